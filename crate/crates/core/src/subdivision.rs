//! Finitely supported sequences on `I_p`, the subdivision operator, and
//! exact cascade iterates as step functions on balls.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gaussian::GaussianRational as G;
use crate::mask::Mask;
use crate::padic::{check_same, ipow, rpow, IpElement, PadicRational};

pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

const PAR_THRESHOLD: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    p: u64,
    entries: BTreeMap<IpElement, G>,
}

impl Sequence {
    pub fn zero(p: u64) -> Self {
        Self {
            p,
            entries: BTreeMap::new(),
        }
    }

    pub fn delta(a: &IpElement) -> Self {
        let mut s = Self::zero(a.prime());
        s.entries.insert(a.clone(), G::from_int(1));
        s
    }

    /// Sums repeated keys and drops zeros.
    pub fn from_entries(p: u64, entries: impl IntoIterator<Item = (IpElement, G)>) -> Result<Self> {
        let mut s = Self::zero(p);
        for (a, v) in entries {
            check_same(p, a.prime())?;
            s.accumulate(a, &v);
        }
        Ok(s)
    }

    pub fn from_mask(m: &Mask) -> Self {
        Self {
            p: m.prime(),
            entries: m.entries().map(|(a, v)| (a.clone(), v.clone())).collect(),
        }
    }

    fn accumulate(&mut self, a: IpElement, v: &G) {
        if v.is_zero() {
            return;
        }
        match self.entries.entry(a) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let (mut big, small) = if self.entries.len() >= other.entries.len() {
            (std::mem::take(&mut self.entries), other.entries)
        } else {
            (other.entries, std::mem::take(&mut self.entries))
        };
        let mut out = Self {
            p: self.p,
            entries: std::mem::take(&mut big),
        };
        for (a, v) in small {
            out.accumulate(a, &v);
        }
        out
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn get(&self, a: &IpElement) -> G {
        self.entries.get(a).cloned().unwrap_or_else(G::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &IpElement> {
        self.entries.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&IpElement, &G)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> G {
        self.entries.values().cloned().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        self.clone().merge(other.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&G::from_int(-1)))
    }

    pub fn scale(&self, c: &G) -> Self {
        let mut s = Self::zero(self.p);
        for (a, v) in &self.entries {
            s.accumulate(a.clone(), &(v * c));
        }
        s
    }

    /// `u(· − β)`.
    pub fn shift(&self, b: &IpElement) -> Self {
        Self {
            p: self.p,
            entries: self
                .entries
                .iter()
                .map(|(a, v)| (a.add(b), v.clone()))
                .collect(),
        }
    }

    /// Discrete `ℓ_q` norm.
    pub fn norm(&self, q: &Exponent) -> f64 {
        let abs = self.entries.values().map(|v| v.abs());
        match q {
            Exponent::Infinite => abs.fold(0.0, f64::max),
            Exponent::Finite(_) => {
                let qf = q.as_f64();
                abs.map(|x| x.powf(qf)).sum::<f64>().powf(1.0 / qf)
            }
        }
    }

    /// Exact `max |u(α)|²`.
    pub fn max_norm_sqr(&self) -> BigRational {
        self.entries
            .values()
            .map(|v| v.norm_sqr())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

pub fn delta(a: &IpElement) -> Sequence {
    Sequence::delta(a)
}

/// Largest grid handled by the dense kernel of [`subdivide`].
const DENSE_LIMIT: u64 = 1 << 22;

/// `(S_h u)(α) = Σ_β h(α − Aβ) u(β)`.
pub fn subdivide(m: &Mask, u: &Sequence) -> Result<Sequence> {
    check_same(m.prime(), u.p)?;
    let s = m
        .support()
        .map(IpElement::exponent)
        .chain(u.support().map(|b| b.exponent() + 1))
        .max()
        .unwrap_or(0);
    match m.prime().checked_pow(s) {
        Some(l) if l <= DENSE_LIMIT => Ok(subdivide_dense(m, u, s, l)),
        _ => Ok(subdivide_sparse(m, u)),
    }
}

/// Scales values to Gaussian integers over a common denominator.
fn integer_parts(vals: &[&G]) -> (BigInt, Vec<(BigInt, BigInt)>) {
    let d = vals.iter().fold(BigInt::one(), |d, v| {
        d.lcm(v.re.denom()).lcm(v.im.denom())
    });
    let ints = vals
        .iter()
        .map(|v| {
            let re = v.re.numer() * (&d / v.re.denom());
            let im = v.im.numer() * (&d / v.im.denom());
            (re, im)
        })
        .collect();
    (d, ints)
}

type Acc = std::collections::HashMap<u64, (BigInt, BigInt)>;

/// Accumulates on the grid `{j / p^s}` with machine-integer indices and
/// Gaussian-integer values, dividing by the common denominator at the end.
fn subdivide_dense(m: &Mask, u: &Sequence, s: u32, l: u64) -> Sequence {
    let (dh, hv) = integer_parts(&m.entries().map(|(_, v)| v).collect::<Vec<_>>());
    let h: Vec<(u64, (BigInt, BigInt))> = m
        .support()
        .map(|w| w.grid_index_u64(s).expect("on grid"))
        .zip(hv)
        .collect();
    let (du, uv) = integer_parts(&u.entries.values().collect::<Vec<_>>());
    let items: Vec<(u64, (BigInt, BigInt))> = u
        .support()
        .map(|b| b.dilate_down().grid_index_u64(s).expect("on grid"))
        .zip(uv)
        .collect();
    let work = |chunk: &[(u64, (BigInt, BigInt))]| {
        let mut acc = Acc::new();
        for (ib, (ur, ui)) in chunk {
            for (iw, (hr, hi)) in &h {
                let e = acc.entry((ib + iw) % l).or_default();
                e.0 += hr * ur;
                if !ui.is_zero() || !hi.is_zero() {
                    e.0 -= hi * ui;
                    e.1 += hr * ui + hi * ur;
                }
            }
        }
        acc
    };
    let acc = if items.len() * h.len() < PAR_THRESHOLD {
        work(&items)
    } else {
        let chunk = items.len().div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
        items.par_chunks(chunk).map(work).reduce(Acc::new, |mut a, b| {
            for (k, (re, im)) in b {
                let e = a.entry(k).or_default();
                e.0 += re;
                e.1 += im;
            }
            a
        })
    };
    let d = dh * du;
    let entries = acc
        .into_iter()
        .filter(|(_, (re, im))| !re.is_zero() || !im.is_zero())
        .map(|(k, (re, im))| {
            let v = G::new(BigRational::new(re, d.clone()), BigRational::new(im, d.clone()));
            (IpElement::reduce(&BigInt::from(k), s, u.p), v)
        })
        .collect();
    Sequence { p: u.p, entries }
}

fn subdivide_sparse(m: &Mask, u: &Sequence) -> Sequence {
    let h: Vec<(&IpElement, &G)> = m.entries().collect();
    let work = |chunk: &[(&IpElement, &G)]| {
        let mut s = Sequence::zero(u.p);
        for (b, ub) in chunk {
            let ab = b.dilate_down();
            for (w, hw) in &h {
                s.accumulate(w.add(&ab), &(*hw * *ub));
            }
        }
        s
    };
    let items: Vec<(&IpElement, &G)> = u.entries().collect();
    if items.len() * h.len() < PAR_THRESHOLD {
        return work(&items);
    }
    let chunk = items.len().div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
    items
        .par_chunks(chunk)
        .map(work)
        .reduce(|| Sequence::zero(u.p), Sequence::merge)
}

/// `a_n = S_h^n δ`.
pub fn iterate(m: &Mask, n: u32) -> Sequence {
    iterate_with_budget(m, n, usize::MAX).expect("unbounded budget")
}

pub fn iterate_with_budget(m: &Mask, n: u32, budget: usize) -> Result<Sequence> {
    let mut a = Sequence::delta(&IpElement::zero(m.prime()));
    for _ in 0..n {
        a = subdivide(m, &a)?;
        if a.len() > budget {
            return Err(Error::BudgetExceeded(format!(
                "subdivision support {} exceeds budget {budget}",
                a.len()
            )));
        }
    }
    Ok(a)
}

/// `∇_y u = u − u(· − y)`.
pub fn difference(u: &Sequence, y: &IpElement) -> Sequence {
    u.sub(&u.shift(y))
}

/// `ṽ(τ) u = Σ_β v(β) u(· − β)`.
pub fn apply_symbol_diff(v: &Sequence, u: &Sequence) -> Result<Sequence> {
    check_same(v.p, u.p)?;
    let mut s = Sequence::zero(u.p);
    for (b, vb) in v.entries() {
        for (a, ua) in u.entries() {
            s.accumulate(a.add(b), &(vb * ua));
        }
    }
    Ok(s)
}

/// The ball `c + p^m Z_p` with `c` reduced into `[0, p^m) ∩ Z[1/p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BallCell {
    pub level: u32,
    pub center: PadicRational,
}

impl BallCell {
    pub fn new(level: u32, center: &PadicRational) -> Self {
        Self {
            level,
            center: center.reduce_mod(level as i64),
        }
    }

    /// Haar measure `p^{-m}`.
    pub fn measure(&self) -> f64 {
        (self.center.prime() as f64).powi(-(self.level as i32))
    }

    pub fn contains(&self, x: &PadicRational) -> bool {
        x.sub(&self.center).reduce_mod(self.level as i64).is_zero()
    }

    /// Monna coordinate `Σ c_j p^{-j-1}` of the center digits.
    pub fn monna_exact(&self) -> BigRational {
        monna(&self.center)
    }

    pub fn monna_x(&self) -> f64 {
        self.monna_exact().to_f64().unwrap_or(f64::NAN)
    }
}

/// Digit-reversal `Σ c_j p^j ↦ Σ c_j p^{-j-1}` on nonnegative elements of `Z[1/p]`.
pub fn monna(x: &PadicRational) -> BigRational {
    let (low, digits) = x.digits().expect("canonical center");
    let mut acc = BigRational::zero();
    for (i, c) in digits.iter().enumerate() {
        if *c != 0 {
            let j = low + i as i64;
            acc += BigRational::from_integer((*c).into()) * rpow(x.prime(), -j - 1);
        }
    }
    acc
}

/// A finite combination of indicator functions of disjoint balls of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallStepFunction {
    p: u64,
    level: u32,
    cells: BTreeMap<BigRational, G>,
}

impl BallStepFunction {
    pub fn zero(p: u64, level: u32) -> Self {
        Self {
            p,
            level,
            cells: BTreeMap::new(),
        }
    }

    /// `φ_0 = 1_{Z_p}`.
    pub fn unit_ball(p: u64) -> Self {
        Self::indicator(&PadicRational::zero(p), 0)
    }

    /// `1_{c + p^m Z_p}`.
    pub fn indicator(c: &PadicRational, level: u32) -> Self {
        let mut f = Self::zero(c.prime(), level);
        f.add_cell(c, &G::from_int(1));
        f
    }

    pub fn from_cells(
        p: u64,
        level: u32,
        cells: impl IntoIterator<Item = (PadicRational, G)>,
    ) -> Result<Self> {
        let mut f = Self::zero(p, level);
        for (c, v) in cells {
            check_same(p, c.prime())?;
            f.add_cell(&c, &v);
        }
        Ok(f)
    }

    fn add_cell(&mut self, c: &PadicRational, v: &G) {
        if v.is_zero() {
            return;
        }
        let key = c.reduce_mod(self.level as i64).value().clone();
        add_value(&mut self.cells, key, v);
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = (BallCell, &G)> + '_ {
        self.cells.iter().map(move |(c, v)| {
            (
                BallCell {
                    level: self.level,
                    center: PadicRational::new_unchecked(self.p, c.clone()),
                },
                v,
            )
        })
    }

    pub(crate) fn raw_cells(&self) -> &BTreeMap<BigRational, G> {
        &self.cells
    }

    pub fn eval(&self, x: &PadicRational) -> G {
        let key = x.reduce_mod(self.level as i64);
        self.cells.get(key.value()).cloned().unwrap_or_else(G::zero)
    }

    /// Same function on the finer level `m ≥ level`.
    pub fn refine(&self, m: u32) -> Self {
        assert!(m >= self.level, "refine to a coarser level");
        let step = ipow(self.p, self.level);
        let count = ipow(self.p, m - self.level).to_u64().expect("refinement size");
        let mut out = Self::zero(self.p, m);
        for (c, v) in &self.cells {
            for j in 0..count {
                let key = c + BigRational::from_integer(&step * BigInt::from(j));
                out.cells.insert(key, v.clone());
            }
        }
        out
    }

    /// Coarsest equivalent representation: merges complete sibling groups with
    /// equal values while every cell of the current level merges.
    pub fn simplify(&self) -> Self {
        let mut f = self.clone();
        while f.level > 0 {
            let parent = f.level - 1;
            let mut groups: BTreeMap<BigRational, Vec<&G>> = BTreeMap::new();
            for (c, v) in &f.cells {
                let pc = PadicRational::new_unchecked(f.p, c.clone()).reduce_mod(parent as i64);
                groups.entry(pc.value().clone()).or_default().push(v);
            }
            let ok = groups
                .values()
                .all(|vs| vs.len() as u64 == f.p && vs.iter().all(|v| *v == vs[0]));
            if !ok {
                break;
            }
            let cells = groups
                .into_iter()
                .map(|(c, vs)| (c, vs[0].clone()))
                .collect();
            f = Self {
                p: f.p,
                level: parent,
                cells,
            };
        }
        f
    }

    /// Equality as functions on `Q_p`.
    pub fn same_function(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let m = self.level.max(other.level);
        self.refine(m) == other.refine(m)
    }

    /// `max_x |f(x) − g(x)|` in floating point.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let d = self.add(&other.scale(&G::from_int(-1)));
        d.cells.values().map(G::abs).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        let m = self.level.max(other.level);
        let mut out = self.refine(m);
        for (c, v) in other.refine(m).cells {
            add_value(&mut out.cells, c, &v);
        }
        out
    }

    pub fn scale(&self, s: &G) -> Self {
        let mut out = Self::zero(self.p, self.level);
        for (c, v) in &self.cells {
            add_value(&mut out.cells, c.clone(), &(v * s));
        }
        out
    }

    /// `f(· − h)`.
    pub fn translate(&self, h: &PadicRational) -> Result<Self> {
        check_same(self.p, h.prime())?;
        let mut out = Self::zero(self.p, self.level);
        for (c, v) in &self.cells {
            let x = PadicRational::new_unchecked(self.p, c + h.value());
            out.add_cell(&x, v);
        }
        Ok(out)
    }
}

fn add_value(cells: &mut BTreeMap<BigRational, G>, key: BigRational, v: &G) {
    if v.is_zero() {
        return;
    }
    match cells.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(v.clone());
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += v;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// `f_n = Σ_β a_n(β) 1_{p^n β + p^n Z_p}`.
pub fn cascade_iterate(m: &Mask, n: u32) -> BallStepFunction {
    cascade_iterate_with_budget(m, n, usize::MAX).expect("unbounded budget")
}

pub fn cascade_iterate_with_budget(m: &Mask, n: u32, budget: usize) -> Result<BallStepFunction> {
    let a = iterate_with_budget(m, n, budget)?;
    let scale = rpow(m.prime(), n as i64);
    let mut f = BallStepFunction::zero(m.prime(), n);
    for (b, v) in a.entries() {
        f.cells.insert(b.to_rational() * &scale, v.clone());
    }
    Ok(f)
}

/// `Q_h f = Σ_α h(α) f(A · − α)`.
pub fn cascade_apply(m: &Mask, f: &BallStepFunction) -> Result<BallStepFunction> {
    check_same(m.prime(), f.p)?;
    apply_coefficients(m.entries(), f, usize::MAX)
}

pub fn cascade_apply_with_budget(
    m: &Mask,
    f: &BallStepFunction,
    budget: usize,
) -> Result<BallStepFunction> {
    check_same(m.prime(), f.p)?;
    apply_coefficients(m.entries(), f, budget)
}

/// `Σ_α c(α) f(A · − α)`: the cell `c + p^m Z_p` pulls back to `p(c + α) + p^{m+1} Z_p`.
pub(crate) fn apply_coefficients<'a>(
    coeffs: impl Iterator<Item = (&'a IpElement, &'a G)>,
    f: &BallStepFunction,
    budget: usize,
) -> Result<BallStepFunction> {
    let p = f.p;
    let pr = BigRational::from_integer(p.into());
    let mut out = BallStepFunction::zero(p, f.level + 1);
    let coeffs: Vec<_> = coeffs.collect();
    for (c, v) in &f.cells {
        for (a, h) in &coeffs {
            let x = PadicRational::new_unchecked(p, (c + a.to_rational()) * &pr);
            out.add_cell(&x, &(*h * v));
        }
        if out.cells.len() > budget {
            return Err(Error::BudgetExceeded(format!(
                "cascade cells {} exceed budget {budget}",
                out.cells.len()
            )));
        }
    }
    Ok(out)
}
