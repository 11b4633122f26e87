//! L_q norms, moduli of continuity and best approximation for ball step
//! functions, and critical exponent estimates for refinable functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::convergence::{certify, CertifyOptions, Verdict};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gaussian::GaussianRational as G;
use crate::mask::Mask;
use crate::padic::{ipow, PadicRational};
use crate::subdivision::{cascade_iterate_with_budget, BallStepFunction, DEFAULT_CELL_BUDGET};

const OPT_TOL: f64 = 1e-10;
const OPT_CAP: usize = 10_000;

/// `(Σ_cells p^{-m} |v|^q)^{1/q}`, or `max |v|` at `q = ∞`.
pub fn lq_norm(f: &BallStepFunction, q: &Exponent) -> f64 {
    let mu = (f.prime() as f64).powi(-(f.level() as i32));
    norm_of_values(f.raw_cells().values().map(G::abs), mu, q)
}

fn norm_of_values(vals: impl Iterator<Item = f64>, mu: f64, q: &Exponent) -> f64 {
    match q {
        Exponent::Infinite => vals.fold(0.0, f64::max),
        Exponent::Finite(_) => {
            let qf = q.as_f64();
            (mu * vals.map(|x| x.powf(qf)).sum::<f64>()).powf(1.0 / qf)
        }
    }
}

pub fn translate(f: &BallStepFunction, h: &PadicRational) -> Result<BallStepFunction> {
    f.translate(h)
}

/// `‖f − f(· − h)‖_q` for an integer shift `0 ≤ h < p^m` at the level `m` of `f`.
fn shift_distance(f: &BallStepFunction, h: &BigInt, q: &Exponent) -> f64 {
    let pm = BigRational::from_integer(ipow(f.prime(), f.level()));
    let hr = BigRational::from_integer(h.clone());
    let mut diff: BTreeMap<BigRational, G> = f.raw_cells().clone();
    for (c, v) in f.raw_cells() {
        let mut key = c + &hr;
        if key >= pm {
            key -= &pm;
        }
        let e = diff.entry(key).or_insert_with(G::zero);
        *e -= v;
    }
    let mu = (f.prime() as f64).powi(-(f.level() as i32));
    norm_of_values(
        diff.values().filter(|v| !v.is_zero()).map(G::abs),
        mu,
        q,
    )
}

/// `sup_{|h|_p ≤ p^{-n}} ‖f − f(· − h)‖_q`, realized over the shifts
/// `h = Σ_{n ≤ j < m} c_j p^j`.
pub fn modulus_of_continuity(f: &BallStepFunction, n: u32, q: &Exponent) -> f64 {
    let f = f.simplify();
    let m = f.level();
    if n >= m {
        return 0.0;
    }
    let step = ipow(f.prime(), n);
    let count = ipow(f.prime(), m - n).to_u64().expect("shift count");
    (1..count)
        .into_par_iter()
        .map(|j| shift_distance(&f, &(&step * BigInt::from(j)), q))
        .reduce(|| 0.0, f64::max)
}

/// Distance from `f` to the functions constant on balls of radius `p^{-n}`.
pub fn best_approximation_error(f: &BallStepFunction, n: u32, q: &Exponent) -> f64 {
    let f = f.simplify();
    let m = f.level();
    if n >= m {
        return 0.0;
    }
    let children = ipow(f.prime(), m - n).to_u64().expect("child count") as f64;
    let mut groups: BTreeMap<BigRational, Vec<Complex64>> = BTreeMap::new();
    for (cell, v) in f.cells() {
        let parent = cell.center.reduce_mod(n as i64);
        groups.entry(parent.value().clone()).or_default().push(v.to_complex());
    }
    let mu = (f.prime() as f64).powi(-(m as i32));
    let per_ball: Vec<f64> = groups
        .into_values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|vals| {
            let zeros = children - vals.len() as f64;
            let (pts, w) = weighted_points(vals, zeros);
            ball_error(&pts, &w, q)
        })
        .collect();
    match q {
        Exponent::Infinite => per_ball.into_iter().fold(0.0, f64::max),
        Exponent::Finite(_) => {
            let qf = q.as_f64();
            (mu * per_ball.into_iter().sum::<f64>()).powf(1.0 / qf)
        }
    }
}

/// Distinct values with multiplicities, zeros for absent children included.
fn weighted_points(vals: &[Complex64], zeros: f64) -> (Vec<Complex64>, Vec<f64>) {
    let mut pts: Vec<Complex64> = Vec::new();
    let mut w: Vec<f64> = Vec::new();
    let zero = Complex64::new(0.0, 0.0);
    for (z, c) in vals.iter().map(|z| (*z, 1.0)).chain((zeros > 0.0).then_some((zero, zeros))) {
        match pts.iter().position(|x| *x == z) {
            Some(i) => w[i] += c,
            None => {
                pts.push(z);
                w.push(c);
            }
        }
    }
    (pts, w)
}

/// `min_c Σ w_i |z_i − c|^q` (finite q) or `min_c max |z_i − c|`.
fn ball_error(pts: &[Complex64], w: &[f64], q: &Exponent) -> f64 {
    if pts.len() <= 1 {
        return 0.0;
    }
    match q {
        Exponent::Infinite => min_enclosing_circle(pts).1,
        Exponent::Finite(_) => {
            let qf = q.as_f64();
            let c = if qf == 2.0 {
                weighted_mean(pts, w)
            } else if qf == 1.0 {
                geometric_median(pts, w)
            } else {
                power_center(pts, w, qf)
            };
            objective(pts, w, qf, c)
        }
    }
}

fn objective(pts: &[Complex64], w: &[f64], q: f64, c: Complex64) -> f64 {
    pts.iter().zip(w).map(|(z, wi)| wi * (z - c).norm().powf(q)).sum()
}

fn weighted_mean(pts: &[Complex64], w: &[f64]) -> Complex64 {
    let tw: f64 = w.iter().sum();
    pts.iter().zip(w).map(|(z, wi)| z * *wi).sum::<Complex64>() / tw
}

/// Weiszfeld iteration with the Vardi–Zhang step at data points, and a final
/// comparison against every data point.
pub(crate) fn geometric_median(pts: &[Complex64], w: &[f64]) -> Complex64 {
    let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut c = weighted_mean(pts, w);
    for _ in 0..OPT_CAP {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        let mut at = 0.0;
        let mut grad = Complex64::new(0.0, 0.0);
        for (z, wi) in pts.iter().zip(w) {
            let d = (z - c).norm();
            if d <= 1e-14 * scale {
                at += wi;
                continue;
            }
            num += z * (wi / d);
            den += wi / d;
            grad += (z - c) * (wi / d);
        }
        if den == 0.0 {
            break;
        }
        let t = num / den;
        let next = if at > 0.0 {
            let r = grad.norm();
            if r <= at {
                break;
            }
            let lam = (at / r).min(1.0);
            t * (1.0 - lam) + c * lam
        } else {
            t
        };
        let moved = (next - c).norm();
        c = next;
        if moved <= OPT_TOL * scale {
            break;
        }
    }
    let mut best = (objective(pts, w, 1.0, c), c);
    for z in pts {
        let v = objective(pts, w, 1.0, *z);
        if v < best.0 {
            best = (v, *z);
        }
    }
    best.1
}

/// Damped Newton iteration on `Σ w_i |z_i − c|^q` for `q > 1`.
fn power_center(pts: &[Complex64], w: &[f64], q: f64) -> Complex64 {
    let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let eps = 1e-12 * scale;
    let mut c = weighted_mean(pts, w);
    let mut fc = objective(pts, w, q, c);
    for _ in 0..OPT_CAP {
        let (mut gx, mut gy) = (0.0, 0.0);
        let (mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0);
        for (z, wi) in pts.iter().zip(w) {
            let d = c - z;
            let r = d.norm().max(eps);
            let (ux, uy) = (d.re / r, d.im / r);
            let g = wi * q * r.powf(q - 1.0);
            gx += g * ux;
            gy += g * uy;
            let a = wi * q * r.powf(q - 2.0);
            hxx += a * (1.0 + (q - 2.0) * ux * ux);
            hxy += a * (q - 2.0) * ux * uy;
            hyy += a * (1.0 + (q - 2.0) * uy * uy);
        }
        let det = hxx * hyy - hxy * hxy;
        let (mut sx, mut sy) = if det.abs() > 1e-300 {
            (-(hyy * gx - hxy * gy) / det, -(-hxy * gx + hxx * gy) / det)
        } else {
            (-gx, -gy)
        };
        if sx * gx + sy * gy >= 0.0 {
            sx = -gx;
            sy = -gy;
        }
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-20 {
            let cand = c + Complex64::new(t * sx, t * sy);
            let fcand = objective(pts, w, q, cand);
            if fcand < fc {
                let moved = (cand - c).norm();
                c = cand;
                fc = fcand;
                improved = moved > OPT_TOL * scale;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    c
}

/// Smallest disc containing all points: `(center, radius)`.
pub(crate) fn min_enclosing_circle(pts: &[Complex64]) -> (Complex64, f64) {
    let tol = 1e-12 * pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let inside = |c: &(Complex64, f64), z: &Complex64| (z - c.0).norm() <= c.1 + tol;
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(&c, &pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(&c, &pts[j]) {
                continue;
            }
            let mid = (pts[i] + pts[j]) / 2.0;
            c = (mid, (pts[i] - mid).norm());
            for k in 0..j {
                if !inside(&c, &pts[k]) {
                    c = circumcircle(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    c
}

fn circumcircle(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, f64) {
    let (bx, by) = (b.re - a.re, b.im - a.im);
    let (cx, cy) = (c.re - a.re, c.im - a.im);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        // Collinear: the farthest pair spans the disc.
        let pairs = [(a, b), (a, c), (b, c)];
        let (u, v) = pairs
            .into_iter()
            .max_by(|x, y| (x.0 - x.1).norm().total_cmp(&(y.0 - y.1).norm()))
            .expect("three pairs");
        let mid = (u + v) / 2.0;
        return (mid, (u - mid).norm());
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = Complex64::new(a.re + ux, a.im + uy);
    (center, (ux * ux + uy * uy).sqrt())
}

/// `max_n ω_q(f, n) p^{α n}` over the range.
pub fn lipschitz_constant(
    f: &BallStepFunction,
    q: &Exponent,
    alpha: f64,
    range: std::ops::RangeInclusive<u32>,
) -> f64 {
    let p = f.prime() as f64;
    range
        .map(|n| modulus_of_continuity(f, n, q) * p.powf(alpha * n as f64))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
pub enum ExponentEstimate {
    Infinite,
    Finite(f64),
}

impl Serialize for ExponentEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Infinite => s.serialize_str("infinite"),
            Self::Finite(v) => s.serialize_f64(*v),
        }
    }
}

impl std::fmt::Display for ExponentEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Infinite => write!(f, "infinite"),
            Self::Finite(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub n: u32,
    pub omega: f64,
    pub best_approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub p: u64,
    pub q: Exponent,
    pub iterations: u32,
    pub levels: (u32, u32),
    /// Level of the simplified iterate.
    pub function_level: u32,
    pub rows: Vec<Row>,
    pub exponent: ExponentEstimate,
    /// Least `n` with `ω_q(f, n) = 0`.
    pub zero_level: Option<u32>,
    pub residual: Option<f64>,
    pub points_used: usize,
    pub note: String,
}

impl SmoothnessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,omega,E_n\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:.17e},{:.17e}\n", r.n, r.omega, r.best_approx));
        }
        s
    }
}

/// Moduli and best approximations of `f` over `levels`, plus an exponent fit.
pub fn smoothness_report(
    f: &BallStepFunction,
    q: &Exponent,
    levels: (u32, u32),
    iterations: u32,
) -> SmoothnessReport {
    let (a, b) = levels;
    let f = f.simplify();
    let rows: Vec<Row> = (a..=b)
        .map(|n| Row {
            n,
            omega: modulus_of_continuity(&f, n, q),
            best_approx: best_approximation_error(&f, n, q),
        })
        .collect();
    // ω vanishes exactly from the simplified level on, and nowhere below it.
    let zero_level = Some(f.level());
    let p = f.prime() as f64;
    let (exponent, residual, used, note) = if rows.iter().all(|r| r.omega == 0.0) {
        (
            ExponentEstimate::Infinite,
            None,
            0,
            "locally constant iterate: every modulus in range vanishes exactly".to_string(),
        )
    } else {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.omega > 0.0)
            .map(|r| (r.n as f64, -r.omega.ln() / p.ln()))
            .collect();
        let (slope, res) = least_squares(&pts);
        (
            ExponentEstimate::Finite(slope),
            Some(res),
            pts.len(),
            "heuristic slope of -log_p omega over a finite iterate".to_string(),
        )
    };
    SmoothnessReport {
        p: f.prime(),
        q: q.clone(),
        iterations,
        levels,
        function_level: f.level(),
        rows,
        exponent,
        zero_level,
        residual,
        points_used: used,
        note,
    }
}

/// Slope and RMS residual of the least-squares line through the points.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

/// Critical exponent estimate of the refinable function of a convergent mask.
pub fn critical_exponent_estimate(
    m: &Mask,
    q: &Exponent,
    n_iter: u32,
    levels: (u32, u32),
    cell_budget: Option<usize>,
) -> Result<SmoothnessReport> {
    if levels.0 > levels.1 {
        return Err(Error::Precondition(format!("empty level range {}:{}", levels.0, levels.1)));
    }
    let cert = certify(m, q, &CertifyOptions::default())?;
    if cert.verdict != Verdict::Convergent {
        return Err(Error::NotConvergent(format!(
            "{:?}: {}",
            cert.verdict,
            cert.reason.unwrap_or_default()
        )));
    }
    let f = cascade_iterate_with_budget(m, n_iter, cell_budget.unwrap_or(DEFAULT_CELL_BUDGET))?;
    Ok(smoothness_report(&f, q, levels, n_iter))
}
