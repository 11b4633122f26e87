//! L_q-convergence certificates for subdivision schemes.
//!
//! The scheme converges iff the sum rules hold and the transition operators
//! restricted to the invariant subspace generated by the differences
//! `∇_γ δ` have q-norm joint spectral radius below `p^{1/q}`.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gaussian::{rational_string, GaussianRational as G};
use crate::mask::{sum_rules, validate, Mask};
use crate::padic::IpElement;
use crate::spectral::{bracket, JsrBracket, MatrixFamily, MatrixNorm, DEFAULT_BUDGET};
use crate::subdivision::{delta, difference};
use crate::transition::{
    admissible_closure, minimal_invariant_subspace, restrict, transition_family, IndexSet, Subspace,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Convergent => 0,
            Self::Divergent => 2,
            Self::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub depth: usize,
    pub budget: u64,
    pub norm: MatrixNorm,
    pub tolerance: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            depth: DEFAULT_DEPTH,
            budget: DEFAULT_BUDGET,
            norm: MatrixNorm::MaxRowSum,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumRule {
    pub eps: String,
    pub re: String,
    pub im: String,
}

impl SumRule {
    fn is_one(&self) -> bool {
        self.re == "1" && self.im == "0"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub p: u64,
    pub q: Exponent,
    /// `p^{1/q}`.
    pub threshold: f64,
    pub tolerance: f64,
    pub depth_requested: usize,
    pub sum_rules: Vec<SumRule>,
    pub index_set: Vec<String>,
    pub subspace_dim: Option<usize>,
    pub bracket: Option<JsrBracket>,
    /// Set when the enumeration budget cut the requested depth short.
    pub budget_limited: bool,
    pub reason: Option<String>,
}

impl Certificate {
    pub fn sum_rules_hold(&self) -> bool {
        self.sum_rules.iter().all(SumRule::is_one)
    }

    /// Verdict implied by the evidence fields alone.
    pub fn implied_verdict(&self) -> Verdict {
        if !self.sum_rules_hold() {
            return Verdict::Divergent;
        }
        match &self.bracket {
            Some(b) if b.nilpotency_index.is_some() => Verdict::Convergent,
            Some(b) if b.upper < self.threshold - self.tolerance => Verdict::Convergent,
            Some(b) if b.lower >= self.threshold + self.tolerance => Verdict::Divergent,
            _ => Verdict::Inconclusive,
        }
    }

    /// Checks that the verdict and threshold agree with the evidence.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let t = self.q.threshold(self.p);
        if (t - self.threshold).abs() > 1e-12 {
            return Err(format!("threshold {} differs from p^(1/q) = {t}", self.threshold));
        }
        if let Some(b) = &self.bracket {
            if b.nilpotency_index.is_some() && (b.lower != 0.0 || b.upper != 0.0) {
                return Err("nilpotent family with nonzero bounds".into());
            }
            if b.lower > b.upper + 1e-12 {
                return Err(format!("lower bound {} above upper bound {}", b.lower, b.upper));
            }
        }
        let want = self.implied_verdict();
        if want != self.verdict {
            return Err(format!("verdict {:?} but evidence implies {want:?}", self.verdict));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Precondition(e.to_string()))
    }

    pub fn exit_code(&self) -> i32 {
        if self.verdict == Verdict::Inconclusive && self.budget_limited {
            4
        } else {
            self.verdict.exit_code()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NecessaryCheck {
    pub pass: bool,
    pub table: BTreeMap<IpElement, G>,
}

/// Sum rules `Σ_β h(ε − Aβ) = 1` for every `ε ∈ E`, exactly.
pub fn check_necessary(m: &Mask) -> NecessaryCheck {
    let table = sum_rules(m);
    NecessaryCheck {
        pass: table.values().all(|v| v.is_one()),
        table,
    }
}

/// Support points other than 0, ordered by value.
fn difference_points(m: &Mask) -> Vec<IpElement> {
    let mut pts: Vec<IpElement> = m.support().filter(|a| !a.is_zero()).cloned().collect();
    pts.sort_by_key(|a| a.to_rational());
    pts
}

/// Transition operators restricted to the span of `{∇_γ δ : γ ∈ supp h \ {0}}`.
#[derive(Clone, Debug)]
pub struct RestrictedFamily {
    pub index: IndexSet,
    pub subspace: Subspace,
    pub family: MatrixFamily,
}

pub fn restricted_family(m: &Mask) -> Result<RestrictedFamily> {
    let p = m.prime();
    let pts = difference_points(m);
    let mut gens_k: Vec<IpElement> = m.support().cloned().collect();
    gens_k.push(IpElement::zero(p));
    let index = admissible_closure(m, &gens_k)?;
    let ops = transition_family(m, &index)?;
    let d0 = delta(&IpElement::zero(p));
    let gens: Vec<_> = pts.iter().map(|g| difference(&d0, g)).collect();
    let subspace = minimal_invariant_subspace(&ops, &gens)?;
    let restricted = ops
        .iter()
        .map(|op| restrict(op, &subspace))
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictedFamily {
        index,
        subspace,
        family: MatrixFamily::new(restricted)?,
    })
}

pub fn certify(m: &Mask, q: &Exponent, opts: &CertifyOptions) -> Result<Certificate> {
    let report = validate(m);
    if !report.pass {
        return Err(Error::InvalidMask(format!("coefficient sum {} ≠ {}", report.sum, m.prime())));
    }
    if opts.depth == 0 {
        return Err(Error::Precondition("depth must be positive".into()));
    }
    let p = m.prime();
    let nec = check_necessary(m);
    let mut cert = Certificate {
        verdict: Verdict::Inconclusive,
        p,
        q: q.clone(),
        threshold: q.threshold(p),
        tolerance: opts.tolerance,
        depth_requested: opts.depth,
        sum_rules: nec
            .table
            .iter()
            .map(|(e, v)| SumRule {
                eps: e.to_string(),
                re: rational_string(&v.re),
                im: rational_string(&v.im),
            })
            .collect(),
        index_set: Vec::new(),
        subspace_dim: None,
        bracket: None,
        budget_limited: false,
        reason: None,
    };
    if !nec.pass {
        let (e, v) = nec
            .table
            .iter()
            .find(|(_, v)| !v.is_one())
            .expect("a failing sum rule");
        cert.verdict = Verdict::Divergent;
        cert.reason = Some(format!("sum rule at ε = {e}: Σ_β h(ε − Aβ) = {v} ≠ 1"));
        return Ok(cert);
    }
    let r = restricted_family(m)?;
    cert.index_set = r.index.elements().iter().map(|a| a.to_string()).collect();
    cert.subspace_dim = Some(r.subspace.dim());
    let fam = r.family;
    match bracket(&fam, q, opts.depth, opts.norm, opts.budget) {
        Ok(b) => {
            cert.budget_limited = b.nilpotency_index.is_none() && b.depth < opts.depth;
            cert.bracket = Some(b);
        }
        Err(Error::BudgetExceeded(msg)) => {
            cert.budget_limited = true;
            cert.reason = Some(msg);
        }
        Err(e) => return Err(e),
    }
    cert.verdict = cert.implied_verdict();
    if cert.reason.is_none() {
        cert.reason = Some(match (cert.verdict, &cert.bracket) {
            (Verdict::Convergent, Some(b)) if b.nilpotency_index.is_some() => format!(
                "restricted transition operators are jointly nilpotent (index {})",
                b.nilpotency_index.unwrap_or_default()
            ),
            (Verdict::Convergent, Some(b)) => {
                format!("joint spectral radius ≤ {} < {}", b.upper, cert.threshold)
            }
            (Verdict::Divergent, Some(b)) => {
                format!("joint spectral radius ≥ {} ≥ {}", b.lower, cert.threshold)
            }
            (_, Some(b)) => format!(
                "bracket [{}, {}] straddles threshold {}",
                b.lower, b.upper, cert.threshold
            ),
            _ => "no spectral evidence".into(),
        });
    }
    Ok(cert)
}

/// Decay check: `p^{-n/q} ‖∇_γ S_h^n δ‖_q` for `n = 1..=n_max`, per difference point.
pub fn scaled_difference_norms(m: &Mask, q: &Exponent, n_max: u32) -> Vec<(IpElement, Vec<f64>)> {
    let pts = difference_points(m);
    let p = m.prime() as f64;
    let mut a = delta(&IpElement::zero(m.prime()));
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); pts.len()];
    for n in 1..=n_max {
        a = crate::subdivision::subdivide(m, &a).expect("same prime");
        let scale = p.powf(-(n as f64) * q.reciprocal());
        for (row, g) in rows.iter_mut().zip(&pts) {
            row.push(scale * difference(&a, g).norm(q));
        }
    }
    pts.into_iter().zip(rows).collect()
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

    fn opts(depth: usize) -> CertifyOptions {
        CertifyOptions {
            depth,
            ..Default::default()
        }
    }

    #[test]
    fn necessary_conditions() {
        assert!(check_necessary(&Mask::haar(3).unwrap()).pass);
        assert!(check_necessary(&quarter_mask()).pass);
        let c = check_necessary(&doubled_delta());
        assert!(!c.pass);
        assert_eq!(c.table[&IpElement::zero(2)], G::from_int(2));
    }

    #[test]
    fn reference_masks() {
        let c = certify(&Mask::haar(3).unwrap(), &Exponent::two(), &opts(4)).unwrap();
        assert_eq!(c.verdict, Verdict::Convergent);
        assert_eq!(c.bracket.as_ref().unwrap().nilpotency_index, Some(1));
        assert_eq!(c.subspace_dim, Some(2));
        c.check_consistency().unwrap();

        let c = certify(&quarter_mask(), &Exponent::Infinite, &opts(4)).unwrap();
        assert_eq!(c.verdict, Verdict::Convergent);
        assert_eq!(c.subspace_dim, Some(3));
        assert_eq!(c.bracket.as_ref().unwrap().nilpotency_index, Some(2));
        assert_eq!(c.threshold, 1.0);

        let c = certify(&doubled_delta(), &Exponent::one(), &opts(4)).unwrap();
        assert_eq!(c.verdict, Verdict::Divergent);
        assert!(c.reason.as_ref().unwrap().contains("= 2"));
        assert_eq!(c.exit_code(), 2);
        c.check_consistency().unwrap();
    }

    #[test]
    fn json_roundtrip() {
        let c = certify(&quarter_mask(), &Exponent::two(), &opts(3)).unwrap();
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn tampered_certificate_is_inconsistent() {
        let mut c = certify(&doubled_delta(), &Exponent::two(), &opts(3)).unwrap();
        c.verdict = Verdict::Convergent;
        assert!(c.check_consistency().is_err());
    }

    #[test]
    fn invalid_mask_rejected() {
        let m = Mask::new(2, 0, [(0, G::from_int(1))]).unwrap();
        assert!(matches!(certify(&m, &Exponent::two(), &opts(2)), Err(Error::InvalidMask(_))));
    }
}
