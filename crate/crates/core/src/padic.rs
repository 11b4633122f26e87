//! Exact arithmetic on the shift group `I_p`, p-adic rationals, fractional
//! parts and characters.
//!
//! `I_p` is realised as the Prüfer group of reduced fractions `k / p^γ` taken
//! mod 1, so group addition is ordinary rational addition followed by
//! reduction into `[0, 1)`. The dilation `A x = x / p` maps `I_p` injectively
//! into `[0, 1/p)`; its left inverse is `x ↦ p x mod 1`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

pub(crate) fn check_same(p: u64, q: u64) -> Result<()> {
    if p == q {
        Ok(())
    } else {
        Err(Error::PrimeMismatch(p, q))
    }
}

pub(crate) fn upow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

pub(crate) fn ipow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// `p^e` as an exact rational for any integer `e`.
pub(crate) fn rpow(p: u64, e: i64) -> BigRational {
    let m = ipow(p, e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(m)
    } else {
        BigRational::new(BigInt::one(), m)
    }
}

/// p-adic valuation of a nonzero integer.
fn int_valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Inverse of `a` modulo `m` (`gcd(a, m) = 1`), as a value in `[0, m)`.
fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// An element `k / p^γ` of the shift group `I_p`, stored in lowest terms.
///
/// Invariants: `0 <= k < p^γ`, `γ = 0 ⇒ k = 0`, `γ > 0 ⇒ p ∤ k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IpElement {
    p: u64,
    gamma: u32,
    k: BigUint,
}

impl Ord for IpElement {
    /// Basis order used throughout: by prime, then denominator exponent, then numerator.
    fn cmp(&self, other: &Self) -> Ordering {
        self.p
            .cmp(&other.p)
            .then(self.gamma.cmp(&other.gamma))
            .then_with(|| self.k.cmp(&other.k))
    }
}

impl PartialOrd for IpElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reduced representative of `(k / p^s) mod 1`.
pub fn canonical(k: &BigInt, s: u32, p: u64) -> Result<IpElement> {
    check_prime(p)?;
    Ok(IpElement::reduce(k, s, p))
}

/// The coset representatives `E = {0, 1/p, …, (p-1)/p}`, ascending.
pub fn coset_representatives(p: u64) -> Result<Vec<IpElement>> {
    check_prime(p)?;
    Ok((0..p).map(|j| IpElement::reduce(&BigInt::from(j), 1, p)).collect())
}

/// `(α + β) mod 1`.
pub fn group_add(a: &IpElement, b: &IpElement) -> Result<IpElement> {
    check_same(a.p, b.p)?;
    Ok(a.add(b))
}

pub fn group_neg(a: &IpElement) -> IpElement {
    a.neg()
}

impl IpElement {
    /// Reduce `k / p^s` mod 1 without checking primality.
    pub(crate) fn reduce(k: &BigInt, s: u32, p: u64) -> Self {
        let modulus = ipow(p, s);
        let mut k = k.mod_floor(&modulus);
        let mut s = s;
        let pb = BigInt::from(p);
        if k.is_zero() {
            return Self::zero(p);
        }
        while s > 0 {
            let (q, r) = k.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            k = q;
            s -= 1;
        }
        if s == 0 {
            return Self::zero(p);
        }
        Self {
            p,
            gamma: s,
            k: k.to_biguint().expect("nonnegative after mod_floor"),
        }
    }

    pub fn zero(p: u64) -> Self {
        Self {
            p,
            gamma: 0,
            k: BigUint::zero(),
        }
    }

    /// Convenience constructor for `k / p^s` with machine-size numerator.
    pub fn new(k: i64, s: u32, p: u64) -> Result<Self> {
        canonical(&BigInt::from(k), s, p)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Denominator exponent `γ`.
    pub fn exponent(&self) -> u32 {
        self.gamma
    }

    pub fn numerator(&self) -> &BigUint {
        &self.k
    }

    pub fn is_zero(&self) -> bool {
        self.gamma == 0
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.k.clone()),
            BigInt::from(upow(self.p, self.gamma)),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Numerator on the grid `{j / p^s}`; `None` if the element is not on it.
    pub fn grid_index(&self, s: u32) -> Option<BigUint> {
        if self.gamma > s {
            return None;
        }
        Some(&self.k * upow(self.p, s - self.gamma))
    }

    /// Numerator on the grid `{j / p^s}` as a machine integer.
    pub fn grid_index_u64(&self, s: u32) -> Option<u64> {
        self.grid_index(s).and_then(|k| k.to_u64())
    }

    fn lift(&self, gamma: u32) -> BigInt {
        BigInt::from(&self.k * upow(self.p, gamma - self.gamma))
    }

    /// Group addition. Panics on mismatched primes; use [`group_add`] for a checked version.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let g = self.gamma.max(other.gamma);
        Self::reduce(&(self.lift(g) + other.lift(g)), g, self.p)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            p: self.p,
            gamma: self.gamma,
            k: upow(self.p, self.gamma) - &self.k,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `A α = α / p`.
    pub fn dilate_down(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            p: self.p,
            gamma: self.gamma + 1,
            k: self.k.clone(),
        }
    }

    /// `p α mod 1`, the left inverse of [`dilate_down`](Self::dilate_down).
    pub fn dilate_up(&self) -> Self {
        if self.gamma <= 1 {
            return Self::zero(self.p);
        }
        Self::reduce(&BigInt::from(self.k.clone()), self.gamma - 1, self.p)
    }

    /// Leading base-p digit `⌊p α⌋ ∈ {0, …, p-1}`.
    pub fn first_digit(&self) -> u64 {
        if self.gamma == 0 {
            return 0;
        }
        (&self.k / upow(self.p, self.gamma - 1))
            .to_u64()
            .expect("digit < p")
    }

    /// Unique split `α = ε + A γ` with `ε ∈ E` and `γ ∈ I_p`.
    pub fn decompose(&self) -> (IpElement, IpElement) {
        let eps = Self::reduce(&BigInt::from(self.first_digit()), 1, self.p);
        (eps, self.dilate_up())
    }

    pub fn to_padic(&self) -> PadicRational {
        PadicRational {
            p: self.p,
            value: self.to_rational(),
        }
    }

    /// Parse `"k/m"` or `"0"` where `m` is a power of `p`.
    pub fn parse(s: &str, p: u64) -> Result<Self> {
        check_prime(p)?;
        let r = parse_rational(s)?;
        let x = PadicRational::new(p, r)?;
        if x.value.is_negative() || x.value >= BigRational::one() || !x.is_padic_fraction() {
            return Err(Error::MalformedNumber(s.to_string()));
        }
        Ok(x.frac_part())
    }
}

impl fmt::Display for IpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.k, upow(self.p, self.gamma))
        }
    }
}

/// An exact rational viewed as an element of `Q_p`.
///
/// Stored as a reduced fraction; the canonical p-adic form `u · p^v` with a
/// p-adic unit `u` is available through [`valuation`](Self::valuation) and
/// [`unit`](Self::unit). Elements of `Z[1/p]` have integer units.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PadicRational {
    p: u64,
    value: BigRational,
}

impl PadicRational {
    pub fn new(p: u64, value: BigRational) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { p, value })
    }

    pub(crate) fn new_unchecked(p: u64, value: BigRational) -> Self {
        Self { p, value }
    }

    pub fn from_int(p: u64, n: i64) -> Result<Self> {
        Self::new(p, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: u64, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::MalformedNumber(format!("{num}/0")));
        }
        Self::new(p, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero(p: u64) -> Self {
        Self {
            p,
            value: BigRational::zero(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// `γ(x)` with `x = p^γ · m/n`, `p ∤ m n`; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.value.is_zero() {
            return None;
        }
        let vn = int_valuation(self.value.numer(), self.p) as i64;
        let vd = int_valuation(self.value.denom(), self.p) as i64;
        Some(vn - vd)
    }

    /// The p-adic unit `x · p^{-γ(x)}`; zero for zero.
    pub fn unit(&self) -> BigRational {
        match self.valuation() {
            None => BigRational::zero(),
            Some(v) => &self.value * rpow(self.p, -v),
        }
    }

    /// True when the value lies in `Z[1/p]`.
    pub fn is_padic_fraction(&self) -> bool {
        let mut d = self.value.denom().clone();
        let pb = BigInt::from(self.p);
        while (&d % &pb).is_zero() {
            d /= &pb;
        }
        d.is_one()
    }

    /// `|x|_p = p^{-γ(x)}`, and 0 for `x = 0`.
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            None => 0.0,
            Some(v) => (self.p as f64).powi(-(v as i32)),
        }
    }

    /// Exact `|x|_p` as a rational.
    pub fn norm_exact(&self) -> BigRational {
        match self.valuation() {
            None => BigRational::zero(),
            Some(v) => rpow(self.p, -v),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        Self::new_unchecked(self.p, &self.value + &other.value)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        Self::new_unchecked(self.p, &self.value - &other.value)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mismatched primes");
        Self::new_unchecked(self.p, &self.value * &other.value)
    }

    pub fn neg(&self) -> Self {
        Self::new_unchecked(self.p, -&self.value)
    }

    /// Multiply by `p^e`.
    pub fn scale_pow(&self, e: i64) -> Self {
        Self::new_unchecked(self.p, &self.value * rpow(self.p, e))
    }

    /// Canonical representative of `x mod p^m Z_p`: the unique element of
    /// `Z[1/p] ∩ [0, p^m)` congruent to `x`.
    pub fn reduce_mod(&self, m: i64) -> Self {
        let Some(v) = self.valuation() else {
            return self.clone();
        };
        let e = (-v).max(0);
        let t = m + e;
        if t <= 0 {
            return Self::zero(self.p);
        }
        // y = x p^e is a p-adic integer with denominator prime to p.
        let y = &self.value * rpow(self.p, e);
        let modulus = ipow(self.p, t as u32);
        let k = (y.numer() * mod_inverse(y.denom(), &modulus)).mod_floor(&modulus);
        Self::new_unchecked(
            self.p,
            BigRational::new(k, BigInt::one()) * rpow(self.p, -e),
        )
    }

    /// Fractional part `{x}_p`.
    pub fn frac_part(&self) -> IpElement {
        let r = self.reduce_mod(0);
        let v = r.valuation().unwrap_or(0);
        if v >= 0 {
            return IpElement::zero(self.p);
        }
        let s = (-v) as u32;
        let k = (&r.value * rpow(self.p, s as i64)).to_integer();
        IpElement::reduce(&k, s, self.p)
    }

    /// Base-p digits `(j0, [c_{j0}, c_{j0+1}, …])` of a value in `Z[1/p] ∩ [0, ∞)`,
    /// so that `x = Σ c_j p^j`. Zero has an empty digit list.
    pub fn digits(&self) -> Option<(i64, Vec<u64>)> {
        if self.value.is_negative() || !self.is_padic_fraction() {
            return None;
        }
        if self.value.is_zero() {
            return Some((0, Vec::new()));
        }
        let v = self.valuation().expect("nonzero");
        let low = v.min(0);
        let mut n = (&self.value * rpow(self.p, -low)).to_integer();
        let pb = BigInt::from(self.p);
        let mut out = Vec::new();
        while !n.is_zero() {
            let (q, r) = n.div_rem(&pb);
            out.push(r.to_u64().expect("digit"));
            n = q;
        }
        Some((low, out))
    }
}

impl fmt::Display for PadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn frac_part(x: &PadicRational) -> IpElement {
    x.frac_part()
}

pub fn padic_norm(x: &PadicRational) -> f64 {
    x.norm()
}

/// `χ(a, ξ) = exp(2πi {a ξ}_p)`.
pub fn character(a: &PadicRational, xi: &PadicRational) -> Result<Complex64> {
    check_same(a.p, xi.p)?;
    let t = a.mul(xi).frac_part();
    Ok(unit_root(&t))
}

/// `exp(2πi t)` for `t ∈ I_p`, with the angle folded into `[-π, π)`.
pub(crate) fn unit_root(t: &IpElement) -> Complex64 {
    if t.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let mut r = t.to_rational();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if r >= half {
        r -= BigRational::one();
    }
    let x = r.to_f64().unwrap_or(0.0);
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x)
}

/// Parse `"<int>"`, `"<int>/<int>"` or an exact decimal such as `"-0.25"` or `"7.5e-3"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::MalformedNumber(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_int(n.trim()).ok_or_else(bad)?;
        let d = parse_int(d.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some(n) = parse_int(t) {
        return Ok(BigRational::from_integer(n));
    }
    parse_decimal(t).ok_or_else(bad)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (sign, body) = match mantissa.as_bytes().first()? {
        b'-' => (-1, &mantissa[1..]),
        b'+' => (1, &mantissa[1..]),
        _ => (1, mantissa),
    };
    let (int_part, frac) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac}");
    let n = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(n * ten.pow(scale as u32))
    } else {
        BigRational::new(n, ten.pow((-scale) as u32))
    };
    Some(if sign < 0 { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(k: i64, s: u32, p: u64) -> IpElement {
        IpElement::new(k, s, p).unwrap()
    }

    fn pr(n: i64, d: i64, p: u64) -> PadicRational {
        PadicRational::from_ratio(p, n, d).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(ip(5, 2, 3).to_string(), "5/9");
        assert_eq!(ip(3, 2, 3), ip(1, 1, 3));
        assert!(ip(9, 2, 3).is_zero());
        assert_eq!(ip(-1, 2, 2).to_string(), "3/4");
        assert!(matches!(IpElement::new(1, 1, 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn group_operations() {
        assert!(ip(1, 1, 3).add(&ip(2, 1, 3)).is_zero());
        assert_eq!(ip(1, 1, 2).add(&ip(3, 2, 2)), ip(1, 2, 2));
        assert_eq!(ip(1, 1, 3).add(&ip(1, 2, 3)), ip(4, 2, 3));
        assert_eq!(ip(1, 2, 2).neg(), ip(3, 2, 2));
        assert!(IpElement::zero(5).neg().is_zero());
        assert_eq!(ip(2, 2, 3).neg(), ip(7, 2, 3));
        assert!(matches!(
            group_add(&ip(1, 1, 2), &ip(1, 1, 3)),
            Err(Error::PrimeMismatch(2, 3))
        ));
    }

    #[test]
    fn dilations() {
        assert_eq!(ip(1, 1, 3).dilate_down(), ip(1, 2, 3));
        assert!(IpElement::zero(3).dilate_down().is_zero());
        assert_eq!(ip(3, 2, 2).dilate_down(), ip(3, 3, 2));
        assert_eq!(ip(1, 2, 3).dilate_up(), ip(1, 1, 3));
        assert!(ip(1, 1, 3).dilate_up().is_zero());
        assert_eq!(ip(3, 3, 2).dilate_up(), ip(3, 2, 2));
    }

    #[test]
    fn decompose_examples() {
        let (e, g) = ip(5, 2, 3).decompose();
        assert_eq!((e.clone(), g.clone()), (ip(1, 1, 3), ip(2, 1, 3)));
        assert_eq!(e.add(&g.dilate_down()), ip(5, 2, 3));
        let (e, g) = IpElement::zero(2).decompose();
        assert!(e.is_zero() && g.is_zero());
        let (e, g) = ip(3, 2, 2).decompose();
        assert_eq!((e, g), (ip(1, 1, 2), ip(1, 1, 2)));
    }

    #[test]
    fn coset_reps() {
        let e3: Vec<String> = coset_representatives(3)
            .unwrap()
            .iter()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(e3, ["0", "1/3", "2/3"]);
        assert_eq!(coset_representatives(2).unwrap().len(), 2);
        assert_eq!(coset_representatives(5).unwrap()[4], ip(4, 1, 5));
    }

    #[test]
    fn fractional_parts() {
        assert!(pr(5, 1, 2).frac_part().is_zero());
        assert_eq!(pr(3, 4, 2).frac_part(), ip(3, 2, 2));
        assert_eq!(pr(-1, 3, 3).frac_part(), ip(2, 1, 3));
        // 1/2 in Q_3 is a unit: no fractional part.
        assert!(pr(1, 2, 3).frac_part().is_zero());
        // 1/6 = (1/2)(1/3); 1/2 ≡ 2 mod 3, so {1/6}_3 = 2/3.
        assert_eq!(pr(1, 6, 3).frac_part(), ip(2, 1, 3));
    }

    #[test]
    fn characters() {
        let c = character(&pr(1, 2, 2), &pr(1, 1, 2)).unwrap();
        assert!((c - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let c = character(&pr(7, 9, 3), &PadicRational::zero(3)).unwrap();
        assert_eq!(c, Complex64::new(1.0, 0.0));
        let c = character(&pr(1, 3, 3), &pr(1, 3, 3)).unwrap();
        let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 9.0);
        assert!((c - want).norm() < 1e-14);
    }

    #[test]
    fn norms() {
        assert_eq!(pr(3, 4, 2).norm(), 4.0);
        assert_eq!(PadicRational::zero(7).norm(), 0.0);
        assert!((pr(9, 2, 3).norm() - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(pr(9, 2, 3).valuation(), Some(2));
    }

    #[test]
    fn reduction_mod_balls() {
        // 5/4 mod 2^1 Z_2 -> 5/4 - 0 = 5/4 since 5/4 < 2.
        assert_eq!(pr(5, 4, 2).reduce_mod(1), pr(5, 4, 2));
        assert_eq!(pr(11, 4, 2).reduce_mod(1), pr(3, 4, 2));
        assert_eq!(pr(-1, 1, 3).reduce_mod(2), pr(8, 1, 3));
        assert!(pr(4, 1, 2).reduce_mod(2).is_zero());
        assert_eq!(pr(1, 1, 2).reduce_mod(-1), PadicRational::zero(2));
        assert_eq!(pr(3, 4, 2).reduce_mod(-1), pr(1, 4, 2));
    }

    #[test]
    fn digit_expansion() {
        let (low, d) = pr(11, 4, 2).digits().unwrap();
        // 11/4 = 1*2^-2 + 1*2^-1 + 0*1 + 1*2
        assert_eq!(low, -2);
        assert_eq!(d, vec![1, 1, 0, 1]);
        assert_eq!(pr(6, 1, 3).digits().unwrap(), (0, vec![0, 2]));
        assert!(pr(1, 3, 2).digits().is_none());
    }

    #[test]
    fn rational_strings() {
        let r = |s: &str| parse_rational(s).unwrap();
        assert_eq!(r("3"), BigRational::from_integer(3.into()));
        assert_eq!(r("-1/2"), BigRational::new((-1).into(), 2.into()));
        assert_eq!(r("0.25"), BigRational::new(1.into(), 4.into()));
        assert_eq!(r("-7.5e-1"), BigRational::new((-3).into(), 4.into()));
        assert_eq!(r("1e2"), BigRational::from_integer(100.into()));
        for bad in ["", "1/0", "a", "1/2/3", "--1", ".", "1.2.3", "1/ x"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_ip_elements() {
        assert_eq!(IpElement::parse("3/4", 2).unwrap(), ip(3, 2, 2));
        assert!(IpElement::parse("0", 2).unwrap().is_zero());
        assert!(IpElement::parse("1/3", 2).is_err());
        assert!(IpElement::parse("5/4", 2).is_err());
    }
}
