//! Completion of orthonormal masks to wavelet masks.
//!
//! With `L = p^{N+1}` and `M = p^N`, the matrix `U` of cyclic shifts
//! `S^a g` (`a < M`) of the `p` filters is unitary iff, writing `w_k` for the
//! vector of filter spectra at frequency `k`, `|w_k|² = p` for every `k` and
//! `w_k ⊥ w_{k'}` whenever `k ≢ k' (mod p)`. Each residue class of frequencies
//! therefore lives on one line `V e_r` of a shared unitary frame `V`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational as G;
use crate::mask::{inexact_json, orthonormality_precheck, Mask, DEFAULT_SYMBOL_TOL};
use crate::padic::IpElement;
use crate::subdivision::{apply_coefficients, cascade_iterate_with_budget, BallStepFunction};

pub const UNITARY_TOL: f64 = 1e-9;

fn root(l: usize, e: usize) -> Complex64 {
    let e = e % l;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / l as f64)
}

/// `v̂[k] = Σ_i v[i] e^{-2πi ik/L}`.
fn dft(v: &[Complex64]) -> Vec<Complex64> {
    let l = v.len();
    (0..l)
        .map(|k| (0..l).map(|i| v[i] * root(l, l - (i * k) % l)).sum())
        .collect()
}

fn idft(v: &[Complex64]) -> Vec<Complex64> {
    let l = v.len();
    (0..l)
        .map(|i| (0..l).map(|k| v[k] * root(l, i * k)).sum::<Complex64>() / l as f64)
        .collect()
}

/// Columns `S^a h, …, S^a h_{p-1}` for `a < p^N`, scaled by `1/√p`.
pub fn build_u(p: u64, n: u32, h: &[Complex64], hjs: &[Vec<Complex64>]) -> Result<DMatrix<Complex64>> {
    let l = p.pow(n + 1) as usize;
    let m = p.pow(n) as usize;
    if hjs.len() as u64 != p - 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected {} wavelet masks, got {}",
            p - 1,
            hjs.len()
        )));
    }
    if h.len() != l || hjs.iter().any(|v| v.len() != l) {
        return Err(Error::DimensionMismatch(format!("mask vectors must have length {l}")));
    }
    let s = 1.0 / (p as f64).sqrt();
    let mut u = DMatrix::zeros(l, l);
    for (b, g) in std::iter::once(h).chain(hjs.iter().map(Vec::as_slice)).enumerate() {
        for a in 0..m {
            for i in 0..l {
                u[(i, b * m + a)] = g[(i + l - a) % l] * s;
            }
        }
    }
    Ok(u)
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitaryCheck {
    pub pass: bool,
    pub max_deviation: f64,
}

/// `‖U*U − I‖_max ≤ tol`.
pub fn verify_unitary(u: &DMatrix<Complex64>, tol: f64) -> UnitaryCheck {
    if u.nrows() != u.ncols() {
        return UnitaryCheck {
            pass: false,
            max_deviation: f64::INFINITY,
        };
    }
    let g = u.adjoint() * u;
    let dev = g
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let (i, j) = (idx % g.nrows(), idx / g.nrows());
            let target = if i == j { 1.0 } else { 0.0 };
            (z - target).norm()
        })
        .fold(0.0, f64::max);
    UnitaryCheck {
        pass: dev <= tol,
        max_deviation: dev,
    }
}

#[derive(Clone, Debug)]
pub struct WaveletMasks {
    pub base: Mask,
    /// `h_1, …, h_{p-1}` on the grid `{k / p^{N+1}}`.
    pub filters: Vec<Vec<Complex64>>,
}

impl WaveletMasks {
    pub fn base_vector(&self) -> Vec<Complex64> {
        self.base.dense().iter().map(G::to_complex).collect()
    }

    pub fn u_matrix(&self) -> Result<DMatrix<Complex64>> {
        build_u(self.base.prime(), self.base.order(), &self.base_vector(), &self.filters)
    }

    /// Mask JSON for `h_j` (1-based), flagged inexact.
    pub fn to_json(&self, j: usize) -> Result<String> {
        let f = self.filter(j)?;
        Ok(inexact_json(self.base.prime(), self.base.order(), f))
    }

    pub fn filter(&self, j: usize) -> Result<&[Complex64]> {
        if j == 0 || j > self.filters.len() {
            return Err(Error::IndexOutOfRange(format!(
                "wavelet index {j} outside 1..={}",
                self.filters.len()
            )));
        }
        Ok(&self.filters[j - 1])
    }
}

/// Householder reflection `H` with `H e_0 = v` for a real unit vector `v`.
fn frame_with_first_row(v: &[f64]) -> DMatrix<Complex64> {
    let p = v.len();
    let mut u: Vec<f64> = v.to_vec();
    u[0] -= 1.0;
    let nn: f64 = u.iter().map(|x| x * x).sum();
    if nn < 1e-30 {
        return DMatrix::identity(p, p);
    }
    DMatrix::from_fn(p, p, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        Complex64::new(d - 2.0 * u[i] * u[j] / nn, 0.0)
    })
}

fn normalize_phase(v: &mut [Complex64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-9 * scale.max(1.0)).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

/// Wavelet masks `h_1, …, h_{p-1}` making `U` unitary.
pub fn complete_masks(m: &Mask) -> Result<WaveletMasks> {
    let pre = orthonormality_precheck(m, DEFAULT_SYMBOL_TOL);
    if !pre.pass {
        return Err(Error::Precondition("mask fails the orthonormality pre-check".into()));
    }
    let p = m.prime() as usize;
    let l = m.grid_len();
    let h: Vec<Complex64> = m.dense().iter().map(G::to_complex).collect();
    let hh = dft(&h);
    let pf = p as f64;
    // First frame row: class magnitudes |ĥ[k]| / p.
    let mags: Vec<f64> = (0..p).map(|r| hh[r].norm() / pf).collect();
    let live = |r: usize| mags[r] > 1e-9;
    let r0 = (0..p)
        .find(|&r| live(r))
        .ok_or_else(|| Error::Completion("mask spectrum vanishes".into()))?;
    let mut phase = vec![Complex64::zero(); l];
    for k in 0..l {
        if live(k % p) {
            phase[k] = hh[k] / (pf * mags[k % p]);
        }
    }
    // Classes with no mask energy borrow phases from a live class by modulation.
    for k in 0..l {
        let r = k % p;
        if !live(r) {
            phase[k] = phase[(k + l + r0 - r) % l];
        }
    }
    let norm0: f64 = mags.iter().map(|x| x * x).sum::<f64>().sqrt();
    let v0: Vec<f64> = mags.iter().map(|x| x / norm0).collect();
    let frame = frame_with_first_row(&v0);
    let filters: Vec<Vec<Complex64>> = (1..p)
        .map(|j| {
            let spec: Vec<Complex64> = (0..l).map(|k| phase[k] * frame[(j, k % p)] * pf).collect();
            let mut v = idft(&spec);
            for z in v.iter_mut() {
                if z.norm() < 1e-15 {
                    *z = Complex64::zero();
                }
            }
            normalize_phase(&mut v);
            v
        })
        .collect();
    let w = WaveletMasks {
        base: m.clone(),
        filters,
    };
    let check = verify_unitary(&w.u_matrix()?, UNITARY_TOL);
    if !check.pass {
        return Err(Error::Completion(format!(
            "completion residual {} above {UNITARY_TOL}",
            check.max_deviation
        )));
    }
    Ok(w)
}

/// `ψ_j ≈ Σ_k h_j(k/p^{N+1}) f_n(A · − k/p^{N+1})` with `f_n` the cascade iterate.
pub fn wavelet_cascade(
    m: &Mask,
    w: &WaveletMasks,
    j: usize,
    n: u32,
    cell_budget: usize,
) -> Result<BallStepFunction> {
    let filt = w.filter(j)?;
    let p = m.prime();
    let s = m.order() + 1;
    let coeffs: Vec<(IpElement, G)> = filt
        .iter()
        .enumerate()
        .filter(|(_, z)| !z.is_zero())
        .map(|(k, z)| Ok((IpElement::new(k as i64, s, p)?, G::from_f64(*z)?)))
        .collect::<Result<_>>()?;
    let f = cascade_iterate_with_budget(m, n, cell_budget)?;
    apply_coefficients(coeffs.iter().map(|(a, v)| (a, v)), &f, cell_budget)
}
