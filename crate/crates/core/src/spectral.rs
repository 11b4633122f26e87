//! Joint spectral radii of finite matrix families.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gaussian::GaussianRational as G;
use crate::linalg::{Echelon, QMatrix};

pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixNorm {
    #[default]
    MaxRowSum,
    MaxColSum,
}

impl MatrixNorm {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MaxRowSum => "max-row-sum",
            Self::MaxColSum => "max-col-sum",
        }
    }

    pub fn eval(&self, m: &DMatrix<Complex64>) -> f64 {
        let (r, c) = m.shape();
        match self {
            Self::MaxRowSum => (0..r)
                .map(|i| (0..c).map(|j| m[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max),
            Self::MaxColSum => (0..c)
                .map(|j| (0..r).map(|i| m[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for MatrixNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-row-sum" | "row" | "inf" => Ok(Self::MaxRowSum),
            "max-col-sum" | "col" | "1" => Ok(Self::MaxColSum),
            _ => Err(Error::Precondition(format!("unknown matrix norm {s:?}"))),
        }
    }
}

/// Square matrices of one dimension, with exact forms when available.
#[derive(Clone, Debug)]
pub struct MatrixFamily {
    dim: usize,
    exact: Option<Vec<QMatrix>>,
    float: Vec<DMatrix<Complex64>>,
}

impl MatrixFamily {
    pub fn new(exact: Vec<QMatrix>) -> Result<Self> {
        let dim = check_dims(exact.iter().map(|m| (m.nrows(), m.ncols())))?;
        let float = exact.iter().map(QMatrix::to_complex).collect();
        Ok(Self {
            dim,
            exact: Some(exact),
            float,
        })
    }

    /// A float-only family; exact nilpotency is then unavailable.
    pub fn from_float(float: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let dim = check_dims(float.iter().map(|m| m.shape()))?;
        Ok(Self {
            dim,
            exact: None,
            float,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.float.len()
    }

    pub fn is_empty(&self) -> bool {
        self.float.is_empty()
    }

    pub fn exact(&self) -> Option<&[QMatrix]> {
        self.exact.as_deref()
    }

    pub fn float(&self) -> &[DMatrix<Complex64>] {
        &self.float
    }

    /// Parse `{"matrices": [[[entry, …], …], …]}` where an entry is a rational
    /// string or a `[re, im]` pair of rational strings.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Real(String),
            Pair([String; 2]),
        }
        #[derive(Deserialize)]
        struct Doc {
            matrices: Vec<Vec<Vec<Entry>>>,
        }
        let doc: Doc =
            serde_json::from_str(text).map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        let mats = doc
            .matrices
            .into_iter()
            .map(|rows| {
                let rows = rows
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|e| match e {
                                Entry::Real(s) => G::parse(&s, "0"),
                                Entry::Pair([a, b]) => G::parse(&a, &b),
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                QMatrix::from_rows(rows)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }
}

fn check_dims(mut shapes: impl Iterator<Item = (usize, usize)>) -> Result<usize> {
    let Some((r, c)) = shapes.next() else {
        return Err(Error::DimensionMismatch("empty family".into()));
    };
    if r != c {
        return Err(Error::DimensionMismatch(format!("{r}x{c} is not square")));
    }
    for (a, b) in shapes {
        if (a, b) != (r, r) {
            return Err(Error::DimensionMismatch(format!("{a}x{b} next to {r}x{r}")));
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsrBracket {
    pub q: Exponent,
    /// Word length actually reached.
    pub depth: usize,
    pub lower: f64,
    pub upper: f64,
    pub nilpotency_index: Option<usize>,
    pub norm: MatrixNorm,
}

/// Number of word evaluations needed for all lengths `1..=depth`.
fn word_count(k: usize, depth: usize) -> u64 {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..depth {
        level = level.saturating_mul(k as u64);
        total = total.saturating_add(level);
    }
    total
}

/// Deepest word length whose full enumeration fits the budget.
pub fn achievable_depth(k: usize, depth: usize, budget: u64) -> usize {
    (0..=depth)
        .rev()
        .find(|&d| word_count(k, d) <= budget)
        .unwrap_or(0)
}

#[derive(Clone)]
struct Acc {
    /// Per length: Σ ‖W‖^q (finite q) or max ‖W‖.
    norms: Vec<f64>,
    /// Per length: max ρ(W).
    radii: Vec<f64>,
}

impl Acc {
    fn new(depth: usize) -> Self {
        Self {
            norms: vec![0.0; depth],
            radii: vec![0.0; depth],
        }
    }

    fn combine(mut self, o: &Acc, finite: bool) -> Self {
        for (a, b) in self.norms.iter_mut().zip(&o.norms) {
            *a = if finite { *a + b } else { a.max(*b) };
        }
        for (a, b) in self.radii.iter_mut().zip(&o.radii) {
            *a = a.max(*b);
        }
        self
    }
}

struct Walk<'a> {
    fam: &'a [DMatrix<Complex64>],
    depth: usize,
    q: f64,
    finite: bool,
    norm: MatrixNorm,
    radii: bool,
}

impl Walk<'_> {
    fn visit(&self, prod: &DMatrix<Complex64>, len: usize, acc: &mut Acc) {
        let nv = self.norm.eval(prod);
        let i = len - 1;
        if self.finite {
            acc.norms[i] += nv.powf(self.q);
        } else {
            acc.norms[i] = acc.norms[i].max(nv);
        }
        if self.radii {
            // An unconverged Schur form only forfeits this word's contribution.
            acc.radii[i] = acc.radii[i].max(spectral_radius(prod).unwrap_or(0.0));
        }
        if len < self.depth {
            for a in self.fam {
                self.visit(&(prod * a), len + 1, acc);
            }
        }
    }

    /// Depth-first over all words, split by first letter; partial results are
    /// combined in letter order.
    fn run(&self) -> Acc {
        let parts: Vec<Acc> = self
            .fam
            .par_iter()
            .map(|a| {
                let mut acc = Acc::new(self.depth);
                self.visit(a, 1, &mut acc);
                acc
            })
            .collect();
        parts
            .iter()
            .fold(Acc::new(self.depth), |t, p| t.combine(p, self.finite))
    }
}

fn walk(
    f: &MatrixFamily,
    depth: usize,
    q: &Exponent,
    norm: MatrixNorm,
    radii: bool,
) -> Acc {
    Walk {
        fam: &f.float,
        depth,
        q: q.as_f64(),
        finite: !q.is_infinite(),
        norm,
        radii,
    }
    .run()
}

fn finish(v: f64, q: &Exponent) -> f64 {
    if q.is_infinite() {
        v
    } else {
        v.powf(1.0 / q.as_f64())
    }
}

/// `(Σ_{|W| = n} ‖W‖^q)^{1/q}`, or the max over words at `q = ∞`.
pub fn family_norm(f: &MatrixFamily, n: usize, q: &Exponent, norm: MatrixNorm, budget: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("word length must be positive".into()));
    }
    if word_count(f.len(), n) > budget {
        return Err(Error::BudgetExceeded(format!(
            "{} words of length up to {n} exceed budget {budget}",
            word_count(f.len(), n)
        )));
    }
    let acc = walk(f, n, q, norm, false);
    Ok(finish(acc.norms[n - 1], q))
}

/// `min_{n ≤ depth} family_norm(n)^{1/n}` and the depth reached within budget.
pub fn jsr_upper(
    f: &MatrixFamily,
    q: &Exponent,
    depth: usize,
    norm: MatrixNorm,
    budget: u64,
) -> Result<(f64, usize)> {
    let d = reached(f, depth, budget)?;
    let acc = walk(f, d, q, norm, false);
    Ok((upper_from(&acc, q), d))
}

/// `max_{|W| ≤ depth} ρ(W)^{1/|W|}` and the depth reached within budget.
pub fn jsr_lower(f: &MatrixFamily, depth: usize, budget: u64) -> Result<(f64, usize)> {
    let d = reached(f, depth, budget)?;
    let acc = walk(f, d, &Exponent::Infinite, MatrixNorm::MaxRowSum, true);
    Ok((lower_from(&acc), d))
}

fn reached(f: &MatrixFamily, depth: usize, budget: u64) -> Result<usize> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be positive".into()));
    }
    let d = achievable_depth(f.len(), depth, budget);
    if d == 0 {
        return Err(Error::BudgetExceeded(format!(
            "budget {budget} does not cover words of length 1"
        )));
    }
    Ok(d)
}

fn upper_from(acc: &Acc, q: &Exponent) -> f64 {
    acc.norms
        .iter()
        .enumerate()
        .map(|(i, &v)| finish(v, q).powf(1.0 / (i + 1) as f64))
        .fold(f64::INFINITY, f64::min)
}

fn lower_from(acc: &Acc) -> f64 {
    acc.radii
        .iter()
        .enumerate()
        .map(|(i, &r)| r.powf(1.0 / (i + 1) as f64))
        .fold(0.0, f64::max)
}

/// Least `n ≤ max_n` such that every word of length `n` vanishes, decided
/// exactly through the chain `V_0 = C^d`, `V_k = Σ_A A V_{k-1}`.
pub fn nilpotency_index(f: &MatrixFamily, max_n: usize) -> Option<usize> {
    let exact = f.exact()?;
    let d = f.dim;
    if d == 0 {
        return Some(1);
    }
    let mut basis: Vec<Vec<G>> = QMatrix::identity(d).to_rows();
    for k in 1..=max_n {
        let mut e = Echelon::new(d);
        for a in exact {
            for v in &basis {
                e.insert(&a.mul_vec(v).expect("square family"));
            }
        }
        if e.rank() == 0 {
            return Some(k);
        }
        if e.rank() == basis.len() {
            return None;
        }
        basis = e.rows().to_vec();
    }
    None
}

/// Largest eigenvalue modulus via a complex Schur form.
pub fn spectral_radius(m: &DMatrix<Complex64>) -> Result<f64> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{}x{}", n, m.ncols())));
    }
    match n {
        0 => return Ok(0.0),
        1 => return Ok(m[(0, 0)].norm()),
        _ => {}
    }
    if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::NoConvergence(scale))?;
    let (_, t) = schur.unpack();
    let residual = (1..n).map(|i| t[(i, i - 1)].norm()).fold(0.0, f64::max);
    if residual > 1e-9 * scale.max(1.0) {
        return Err(Error::NoConvergence(residual));
    }
    Ok((0..n).map(|i| t[(i, i)].norm()).fold(0.0, f64::max))
}

/// Nilpotency shortcut, then norm and spectral-radius bounds up to `depth`.
pub fn bracket(
    f: &MatrixFamily,
    q: &Exponent,
    depth: usize,
    norm: MatrixNorm,
    budget: u64,
) -> Result<JsrBracket> {
    if let Some(k) = nilpotency_index(f, f.dim.max(1)) {
        return Ok(JsrBracket {
            q: q.clone(),
            depth: k,
            lower: 0.0,
            upper: 0.0,
            nilpotency_index: Some(k),
            norm,
        });
    }
    let d = reached(f, depth, budget)?;
    let up = walk(f, d, q, norm, true);
    let upper = upper_from(&up, q);
    let lower = lower_from(&up);
    Ok(JsrBracket {
        q: q.clone(),
        depth: d,
        lower,
        upper,
        nilpotency_index: None,
        norm,
    })
}
