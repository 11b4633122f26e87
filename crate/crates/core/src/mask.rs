//! Refinement masks on the grid `{k / p^{N+1}}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{rational_string, GaussianRational as G};
use crate::padic::{check_prime, coset_representatives, unit_root, IpElement, PadicRational};

pub const DEFAULT_SYMBOL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    p: u64,
    n: u32,
    coeffs: BTreeMap<IpElement, G>,
}

impl Mask {
    /// Build from `(k, h(k/p^{N+1}))` pairs. Zero entries are dropped.
    pub fn new(p: u64, n: u32, entries: impl IntoIterator<Item = (u64, G)>) -> Result<Self> {
        check_prime(p)?;
        let size = grid_size(p, n)?;
        let mut coeffs = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (k, v) in entries {
            if k >= size {
                return Err(Error::InvalidMask(format!(
                    "k = {k} outside 0..{size} for p = {p}, N = {n}"
                )));
            }
            if !seen.insert(k) {
                return Err(Error::InvalidMask(format!("duplicate k = {k}")));
            }
            if !v.is_zero() {
                coeffs.insert(IpElement::reduce(&BigInt::from(k), n + 1, p), v);
            }
        }
        Ok(Self { p, n, coeffs })
    }

    /// Build from a dense vector indexed by `k`.
    pub fn from_grid(p: u64, n: u32, values: Vec<G>) -> Result<Self> {
        let size = grid_size(p, n)?;
        if values.len() as u64 != size {
            return Err(Error::InvalidMask(format!(
                "expected {size} grid values, got {}",
                values.len()
            )));
        }
        Self::new(p, n, values.into_iter().enumerate().map(|(k, v)| (k as u64, v)))
    }

    /// `h(j/p) = 1` for all `j`.
    pub fn haar(p: u64) -> Result<Self> {
        Self::new(p, 0, (0..p).map(|k| (k, G::from_int(1))))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Order `N`: the mask lives on `{k / p^{N+1}}`.
    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn grid_len(&self) -> usize {
        grid_size(self.p, self.n).expect("validated at construction") as usize
    }

    pub fn get(&self, a: &IpElement) -> G {
        self.coeffs.get(a).cloned().unwrap_or_else(G::zero)
    }

    pub fn get_ref(&self, a: &IpElement) -> Option<&G> {
        self.coeffs.get(a)
    }

    pub fn support(&self) -> impl Iterator<Item = &IpElement> {
        self.coeffs.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&IpElement, &G)> {
        self.coeffs.iter()
    }

    /// Grid index `k` of a support point.
    pub fn grid_index(&self, a: &IpElement) -> u64 {
        a.grid_index_u64(self.n + 1).expect("support on grid")
    }

    pub fn dense(&self) -> Vec<G> {
        let mut out = vec![G::zero(); self.grid_len()];
        for (a, v) in &self.coeffs {
            out[self.grid_index(a) as usize] = v.clone();
        }
        out
    }

    pub fn sum(&self) -> G {
        self.coeffs.values().cloned().sum()
    }

    pub fn to_json(&self) -> String {
        let doc = MaskFile {
            p: self.p,
            n: self.n,
            inexact: None,
            coefficients: self
                .coeffs
                .iter()
                .map(|(a, v)| Entry {
                    k: self.grid_index(a),
                    re: Num::Str(rational_string(&v.re)),
                    im: Some(Num::Str(rational_string(&v.im))),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

fn grid_size(p: u64, n: u32) -> Result<u64> {
    p.checked_pow(n + 1)
        .filter(|&s| s <= 1 << 40)
        .ok_or_else(|| Error::InvalidMask(format!("grid p^(N+1) too large for p = {p}, N = {n}")))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum Num {
    Str(String),
    Num(serde_json::Number),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::Str(s) => s.clone(),
            Num::Num(n) => n.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct Entry {
    k: u64,
    re: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<Num>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MaskFile {
    p: u64,
    #[serde(rename = "N")]
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    inexact: Option<bool>,
    coefficients: Vec<Entry>,
}

/// Parse a mask JSON document.
pub fn parse_mask(text: &str) -> Result<Mask> {
    let doc: MaskFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidMask(e.to_string()))?;
    let mut entries = Vec::with_capacity(doc.coefficients.len());
    for e in &doc.coefficients {
        let im = e.im.as_ref().map_or_else(|| "0".to_string(), Num::text);
        entries.push((e.k, G::parse(&e.re.text(), &im)?));
    }
    Mask::new(doc.p, doc.n, entries)
}

/// Serialize float-valued grid coefficients in the mask schema, flagged inexact.
pub fn inexact_json(p: u64, n: u32, values: &[Complex64]) -> String {
    let doc = MaskFile {
        p,
        n,
        inexact: Some(true),
        coefficients: values
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::zero())
            .map(|(k, z)| Entry {
                k: k as u64,
                re: Num::Str(format!("{:.16e}", z.re)),
                im: Some(Num::Str(format!("{:.16e}", z.im))),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    /// Exact coefficient sum.
    pub sum: String,
    pub offenders: Vec<String>,
}

pub fn validate(m: &Mask) -> ValidationReport {
    let sum = m.sum();
    let offenders: Vec<String> = m
        .support()
        .filter(|a| a.exponent() > m.n + 1)
        .map(|a| a.to_string())
        .collect();
    ValidationReport {
        pass: sum == G::from_int(m.p as i64) && offenders.is_empty(),
        sum: sum.to_string(),
        offenders,
    }
}

/// `H(ξ) = (1/p) Σ_k h(k/p^{N+1}) χ(k/p^{N+1}, ξ)`.
pub fn symbol(m: &Mask, xi: &PadicRational) -> Result<Complex64> {
    crate::padic::check_same(m.p, xi.prime())?;
    let mut acc = Complex64::zero();
    for (a, v) in &m.coeffs {
        let t = a.to_padic().mul(xi).frac_part();
        acc += v.to_complex() * unit_root(&t);
    }
    Ok(acc / m.p as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolCheck {
    pub k: u64,
    pub re: f64,
    pub im: f64,
    /// Target of the check: `0` (|H| ≈ 0) or `1` (|H| ≈ 1).
    pub target: u8,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthonormalityReport {
    pub pass: bool,
    pub tol: f64,
    pub checks: Vec<SymbolCheck>,
}

/// Symbol conditions at the integers `1 ≤ k < p^{N+1}`: `H(k) = 0` when `p ∤ k`
/// and `|H(k)| = 1` when `p | k`.
pub fn orthonormality_precheck(m: &Mask, tol: f64) -> OrthonormalityReport {
    let size = m.grid_len() as u64;
    let checks: Vec<SymbolCheck> = (1..size)
        .map(|k| {
            let xi = PadicRational::new_unchecked(m.p, num_rational::BigRational::from_integer(k.into()));
            let h = symbol(m, &xi).expect("same prime");
            let target = u8::from(k % m.p == 0);
            let pass = if target == 0 {
                h.norm() <= tol
            } else {
                (h.norm() - 1.0).abs() <= tol
            };
            SymbolCheck {
                k,
                re: h.re,
                im: h.im,
                target,
                pass,
            }
        })
        .collect();
    OrthonormalityReport {
        pass: checks.iter().all(|c| c.pass),
        tol,
        checks,
    }
}

/// `Σ_{β ∈ I_p} h(α − Aβ)` at an arbitrary point.
///
/// `α − Aβ = ω` has a solution `β` iff `α − ω` has leading digit 0, and it is
/// then unique, so the sum runs over such support points `ω`.
pub fn sum_rule_at(m: &Mask, alpha: &IpElement) -> G {
    m.coeffs
        .iter()
        .filter(|(w, _)| alpha.sub(w).first_digit() == 0)
        .map(|(_, v)| v.clone())
        .sum()
}

/// Sum rules on the coset representatives `E`.
pub fn sum_rules(m: &Mask) -> BTreeMap<IpElement, G> {
    coset_representatives(m.p)
        .expect("prime checked")
        .into_iter()
        .map(|e| {
            let v = sum_rule_at(m, &e);
            (e, v)
        })
        .collect()
}

/// Human-readable sum-rule table.
pub fn sum_rule_table(m: &Mask) -> String {
    let mut s = String::new();
    for (e, v) in sum_rules(m) {
        let _ = writeln!(s, "{e}\t{v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarter_mask() -> Mask {
        let a = G::from_parts((1, 2), (1, 2));
        let b = G::from_parts((1, 2), (-1, 2));
        Mask::new(2, 1, [(0, a.clone()), (1, b.clone()), (2, a), (3, b)]).unwrap()
    }

    fn doubled_delta() -> Mask {
        Mask::new(2, 0, [(0, G::from_int(2))]).unwrap()
    }

    fn xi(p: u64, n: i64) -> PadicRational {
        PadicRational::from_int(p, n).unwrap()
    }

    #[test]
    fn parse_fixture_documents() {
        let m = parse_mask(
            r#"{"p":3,"N":0,"coefficients":[{"k":0,"re":"1"},{"k":1,"re":"1"},{"k":2,"re":"1","im":"0"}]}"#,
        )
        .unwrap();
        assert_eq!(m, Mask::haar(3).unwrap());
        let m = parse_mask(
            r#"{"p":2,"N":1,"coefficients":[
                {"k":0,"re":"1/2","im":"1/2"},{"k":1,"re":"1/2","im":"-1/2"},
                {"k":2,"re":"1/2","im":"1/2"},{"k":3,"re":"1/2","im":"-1/2"}]}"#,
        )
        .unwrap();
        assert_eq!(m, quarter_mask());
        assert_eq!(parse_mask(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        let range = r#"{"p":2,"N":1,"coefficients":[{"k":4,"re":"1"}]}"#;
        assert!(matches!(parse_mask(range), Err(Error::InvalidMask(_))));
        let dup = r#"{"p":2,"N":0,"coefficients":[{"k":0,"re":"1"},{"k":0,"re":"1"}]}"#;
        assert!(parse_mask(dup).is_err());
        let bad = r#"{"p":2,"N":0,"coefficients":[{"k":0,"re":"1/x"}]}"#;
        assert!(matches!(parse_mask(bad), Err(Error::MalformedNumber(_))));
        let np = r#"{"p":4,"N":0,"coefficients":[]}"#;
        assert!(matches!(parse_mask(np), Err(Error::NotPrime(4))));
    }

    #[test]
    fn validation() {
        let r = validate(&Mask::haar(3).unwrap());
        assert!(r.pass);
        assert_eq!(r.sum, "3");
        assert!(validate(&doubled_delta()).pass);
        let r = validate(&Mask::new(2, 0, [(0, G::from_int(1))]).unwrap());
        assert!(!r.pass);
        assert_eq!(r.sum, "1");
    }

    #[test]
    fn symbols() {
        let haar = Mask::haar(2).unwrap();
        assert!((symbol(&haar, &xi(2, 0)).unwrap() - 1.0).norm() < 1e-15);
        assert!(symbol(&haar, &xi(2, 1)).unwrap().norm() < 1e-15);
        let h2 = symbol(&quarter_mask(), &xi(2, 2)).unwrap();
        assert!((h2 - Complex64::i()).norm() < 1e-14);
    }

    #[test]
    fn orthonormality() {
        let r = orthonormality_precheck(&quarter_mask(), 1e-12);
        assert!(r.pass);
        assert_eq!(r.checks.len(), 3);
        assert!(orthonormality_precheck(&Mask::haar(3).unwrap(), 1e-12).pass);
        let r = orthonormality_precheck(&doubled_delta(), 1e-12);
        assert!(!r.pass);
        assert!((r.checks[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_rule_tables() {
        let one = G::from_int(1);
        assert!(sum_rules(&Mask::haar(3).unwrap()).values().all(|v| *v == one));
        assert!(sum_rules(&quarter_mask()).values().all(|v| *v == one));
        let s: Vec<G> = sum_rules(&doubled_delta()).into_values().collect();
        assert_eq!(s, vec![G::from_int(2), G::zero()]);
    }
}
