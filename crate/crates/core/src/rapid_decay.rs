//! Three-vertex norms, the rapid-decay constants `D_N`, the `L^p` exponent
//! selector and checks of the `L^p <= D (deg + 1)^{3/2} L^2` inequality.
//!
//! Exact quantities are ratios of quantum integers. Everything involving `q`
//! as a real number runs on [`Bracket`]s built from the directed bracket of
//! `q`, so reported bounds are one-sided safe.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::Bracket;
use crate::ncpoly::{lp_norm_with, NcPolynomial};
use crate::qnum::{self, DEFAULT_PRECISION_BITS, GUARD_BITS};
use crate::weingarten::Weingarten;

/// Admissible `(n, k, l)`: `l = n + k - 2r` with `0 <= r <= min(n, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThreeVertexParams {
    n: u32,
    k: u32,
    l: u32,
}

impl ThreeVertexParams {
    pub fn new(n: u32, k: u32, l: u32) -> Result<Self> {
        let admissible = l <= n + k && (n + k - l) % 2 == 0 && l >= n.abs_diff(k);
        if admissible {
            Ok(ThreeVertexParams { n, k, l })
        } else {
            Err(Error::Inadmissible { n, k, l })
        }
    }

    /// Parameters with `l = n + k - 2r`.
    pub fn from_r(n: u32, k: u32, r: u32) -> Result<Self> {
        if r > n.min(k) {
            return Err(Error::Inadmissible {
                n,
                k,
                l: (n + k).saturating_sub(2 * r),
            });
        }
        Self::new(n, k, n + k - 2 * r)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn r(&self) -> u32 {
        (self.n + self.k - self.l) / 2
    }

    /// Every admissible triple with `n, k <= max`.
    pub fn all_up_to(max: u32) -> Vec<ThreeVertexParams> {
        let mut out = Vec::new();
        for n in 0..=max {
            for k in 0..=max {
                for r in 0..=n.min(k) {
                    out.push(ThreeVertexParams::from_r(n, k, r).unwrap());
                }
            }
        }
        out
    }
}

fn check_rd_dimension(n: u32) -> Result<()> {
    if n < 3 {
        Err(Error::InvalidDimension { n, min: 3 })
    } else {
        Ok(())
    }
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// `||phi||^{-2}` via `[r+1] [l+1]! [n]! [k]! / ([l+1+r]! [n-r]! [k-r]! [r]!)`.
pub fn three_vertex_norm_inv_factorial(params: ThreeVertexParams, n_dim: u32) -> Result<BigRational> {
    check_rd_dimension(n_dim)?;
    let (n, k, l, r) = (params.n, params.k, params.l, params.r());
    let top = (l + 1 + r).max(n).max(k).max(r + 1);
    let ints = qnum::q_ints(top, n_dim);
    let fact = |a: u32| -> BigInt { ints[1..=a as usize].iter().product() };
    let num = &ints[r as usize + 1] * fact(l + 1) * fact(n) * fact(k);
    let den = fact(l + 1 + r) * fact(n - r) * fact(k - r) * fact(r);
    Ok(ratio(num, den))
}

/// `||phi||^{-2}` via `prod_{s=1..r} [1+s] [n-r+s] [k-r+s] / ([l+1+s] [s]^2)`.
pub fn three_vertex_norm_inv_product(params: ThreeVertexParams, n_dim: u32) -> Result<BigRational> {
    check_rd_dimension(n_dim)?;
    let (n, k, l, r) = (params.n, params.k, params.l, params.r());
    let ints = qnum::q_ints(l + 1 + r.max(1), n_dim);
    let ints = if ints.len() <= (n.max(k) + 1) as usize {
        qnum::q_ints(n.max(k) + 1, n_dim)
    } else {
        ints
    };
    let mut acc = BigRational::one();
    for s in 1..=r {
        let i = |a: u32| &ints[a as usize];
        let num = i(1 + s) * i(n - r + s) * i(k - r + s);
        let den = i(l + 1 + s) * i(s) * i(s);
        acc *= ratio(num, den);
    }
    Ok(acc)
}

/// Radicand `[k+1][n+1] / ([l+1][r+1]^2)` of the dimension prefactor.
pub fn prefactor(params: ThreeVertexParams, n_dim: u32) -> Result<BigRational> {
    check_rd_dimension(n_dim)?;
    let (n, k, l, r) = (params.n, params.k, params.l, params.r());
    let ints = qnum::q_ints(n.max(k).max(l) + 1, n_dim);
    let i = |a: u32| ints[a as usize].clone();
    Ok(ratio(i(k + 1) * i(n + 1), i(l + 1) * i(r + 1) * i(r + 1)))
}

/// Either a finite scan coordinate or the limit along which it grows without bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Finite(v) => write!(f, "{v}"),
            Side::Infinite => write!(f, "inf"),
        }
    }
}

/// Location of the scanned maximum: `n = (n - r) + r`, `k = (k - r) + r`, `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanPoint {
    pub n_minus_r: Side,
    pub k_minus_r: Side,
    pub r: Side,
}

impl ScanPoint {
    fn add(a: Side, b: Side) -> Side {
        match (a, b) {
            (Side::Finite(x), Side::Finite(y)) => Side::Finite(x + y),
            _ => Side::Infinite,
        }
    }

    /// The `(n, k, l)` triple, with `inf` for unbounded coordinates.
    pub fn triple(&self) -> (Side, Side, Side) {
        (
            Self::add(self.n_minus_r, self.r),
            Self::add(self.k_minus_r, self.r),
            Self::add(self.n_minus_r, self.k_minus_r),
        )
    }
}

impl fmt::Display for ScanPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, k, l) = self.triple();
        write!(f, "({n},{k},{l})")
    }
}

/// Scan limits: `r <= r_max`, `n - r` and `k - r` in `0..=side_max` plus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub r_max: u32,
    pub side_max: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { r_max: 64, side_max: 32 }
    }
}

/// Bracketed `D_N`: a scanned lower estimate and a rigorous upper bound.
#[derive(Clone, Debug)]
pub struct RDBound {
    pub n: u32,
    /// Enclosure of the largest scanned value; its lower end is a lower bound for `D_N`.
    pub value: Bracket,
    pub argmax: ScanPoint,
    pub truncation: Truncation,
    /// Number of factors kept before the tail multiplier in the upper bound.
    pub product_terms: u32,
    /// Upper bound for `D_N - value`.
    pub tail_error: BigRational,
    /// Enclosure of the closed-form bound; its upper end bounds `D_N`.
    pub rigorous_upper: Bracket,
}

impl RDBound {
    /// Upper end of the rigorous bound, the value downstream checks consume.
    pub fn upper(&self) -> BigRational {
        self.rigorous_upper.upper()
    }
}

struct QPowers {
    /// `t[m] = 1 - q^{2m}`.
    t: Vec<Bracket>,
    one: Bracket,
}

impl QPowers {
    fn new(q: &Bracket, count: usize) -> Self {
        let bits = q.bits();
        let one = Bracket::from_int(1, bits);
        let q2 = q.mul(q);
        let mut t = Vec::with_capacity(count + 1);
        let mut power = one.clone();
        for _ in 0..=count {
            t.push(one.sub(&power));
            power = power.mul(&q2);
        }
        QPowers { t, one }
    }

    fn t(&self, base: Side, offset: u32) -> &Bracket {
        match base {
            Side::Finite(b) => &self.t[(b + offset) as usize],
            Side::Infinite => &self.one,
        }
    }
}

fn div(a: &Bracket, b: &Bracket) -> Bracket {
    a.div(b).expect("factors 1 - q^{2m} are bounded away from 0 for N >= 3")
}

/// Scanned values along one `(n - r, k - r)` column, returning the best bracket and its `r`.
fn scan_column(pw: &QPowers, a: Side, b: Side, r_max: u32) -> (Bracket, u32) {
    let l = ScanPoint::add(a, b);
    let t1 = &pw.t[1];
    let mut phi = pw.one.clone();
    let mut best: Option<(Bracket, u32)> = None;
    for r in 0..=r_max {
        if r > 0 {
            let num = pw.t[(1 + r) as usize].mul(pw.t(a, r)).mul(pw.t(b, r));
            let ts = &pw.t[r as usize];
            let den = pw.t(l, 1 + r).mul(&ts.mul(ts));
            phi = phi.mul(&div(&num, &den));
        }
        let tr = &pw.t[(r + 1) as usize];
        let radicand = div(&t1.mul(pw.t(a, r + 1)).mul(pw.t(b, r + 1)), &pw.t(l, 1).mul(&tr.mul(tr)));
        let f = radicand.sqrt().mul(&phi);
        if best.as_ref().map_or(true, |(b, _)| f.lower_mantissa() > b.lower_mantissa()) {
            best = Some((f, r));
        }
    }
    best.unwrap()
}

/// `(1-q^2)^{-1/2} prod_{s=1..S} (1-q^{2s})^{-1}`: lower bound for the limit
/// `n - r, k - r, r -> infinity` of the scanned quantity.
fn diagonal_limit(pw: &QPowers, terms: u32) -> Bracket {
    let mut acc = pw.t[1].sqrt().recip().expect("1 - q^2 > 0");
    for s in 1..=terms {
        acc = div(&acc, &pw.t[s as usize]);
    }
    acc
}

/// Closed-form bound `(1-q^2)^{-1} prod_{s=1..S} (1-q^{2s})^{-3} * T`, where
/// `T = 1 + 2y` bounds the neglected tail with
/// `y = 3 q^{2S+2} / ((1-q^2)(1-q^{2S+2}))`. Returns the bound and `S`.
fn closed_form_upper(q: &Bracket, min_terms: u32) -> (Bracket, u32) {
    let bits = q.bits();
    let one = Bracket::from_int(1, bits);
    let q2 = q.mul(q);
    let t1 = one.sub(&q2);
    let threshold = Bracket::from_ratio(&BigRational::new(1.into(), BigInt::from(10u64).pow(12)), bits);
    let mut s_terms = min_terms.max(1);
    let tail = loop {
        let qs = q2.powi(s_terms + 1);
        let y = div(&Bracket::from_int(3, bits).mul(&qs), &t1.mul(&one.sub(&qs)));
        let extra = Bracket::from_int(2, bits).mul(&y);
        if extra.certainly_lt(&threshold) {
            break one.add(&extra);
        }
        s_terms *= 2;
    };
    let mut acc = div(&one, &t1);
    let mut power = one.clone();
    for _ in 1..=s_terms {
        power = power.mul(&q2);
        let f = one.sub(&power);
        acc = div(&acc, &f.mul(&f).mul(&f));
    }
    (acc.mul(&tail), s_terms)
}

/// Scans the dimension-weighted three-vertex norms and brackets `D_N`.
pub fn dn_constant(n: u32, truncation: Truncation) -> Result<RDBound> {
    dn_constant_with_precision(n, truncation, DEFAULT_PRECISION_BITS)
}

/// [`dn_constant`] at an explicit precision.
pub fn dn_constant_with_precision(n: u32, truncation: Truncation, precision_bits: u32) -> Result<RDBound> {
    check_rd_dimension(n)?;
    let bits = precision_bits + GUARD_BITS;
    let q = qnum::q_bracket(n, bits)?;
    let (rigorous_upper, product_terms) = closed_form_upper(&q, truncation.r_max);
    let Truncation { r_max, side_max } = truncation;
    let count = (2 * side_max + 2 * r_max + 2).max(product_terms) as usize + 2;
    let pw = QPowers::new(&q, count);

    let sides: Vec<Side> = (0..=side_max).map(Side::Finite).chain([Side::Infinite]).collect();
    let columns: Vec<(Side, Side)> = sides.iter().flat_map(|&a| sides.iter().map(move |&b| (a, b))).collect();
    let scanned: Vec<(Bracket, ScanPoint)> = columns
        .par_iter()
        .map(|&(a, b)| {
            let (f, r) = scan_column(&pw, a, b, r_max);
            (
                f,
                ScanPoint {
                    n_minus_r: a,
                    k_minus_r: b,
                    r: Side::Finite(r),
                },
            )
        })
        .collect();
    let limit = (
        diagonal_limit(&pw, product_terms),
        ScanPoint {
            n_minus_r: Side::Infinite,
            k_minus_r: Side::Infinite,
            r: Side::Infinite,
        },
    );
    let mut best = limit;
    for cand in scanned {
        if cand.0.lower_mantissa() > best.0.lower_mantissa() {
            best = cand;
        }
    }
    let (value, argmax) = best;
    let tail_error = rigorous_upper.upper() - value.lower();
    Ok(RDBound {
        n,
        value,
        argmax,
        truncation,
        product_terms,
        tail_error,
        rigorous_upper,
    })
}

/// Rigorous upper bound for `D_N` (upper end of the closed-form bound).
pub fn dn_upper_bound(n: u32) -> Result<BigRational> {
    check_rd_dimension(n)?;
    let q = qnum::q_bracket(n, DEFAULT_PRECISION_BITS + GUARD_BITS)?;
    Ok(closed_form_upper(&q, Truncation::default().r_max).0.upper())
}

/// Bound valid for every `N >= 3`: the maximum of the upper bounds over `N = 3..=10`.
/// The bound is increasing in `q`, hence decreasing in `N`, so `N = 3` dominates.
pub fn dn_uniform_upper_bound() -> Result<BigRational> {
    let mut best = dn_upper_bound(3)?;
    for n in 4..=10 {
        let v = dn_upper_bound(n)?;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

fn exact_pow(x: &BigRational, e: u64) -> BigRational {
    num_traits::pow::pow(x.clone(), e as usize)
}

/// Decides `D^2 (2rm+1)^3 <= (1+eps)^{4m}`, the fourth-`m`-th power of
/// `D^{1/2m} (2rm+1)^{3/4m} <= 1 + eps`.
pub fn selector_holds(r: u32, eps: &BigRational, d_star: &BigRational, m: u64) -> bool {
    let base = BigRational::one() + eps;
    let lhs_exact = || {
        let poly = BigRational::from_integer(BigInt::from(2 * r as u64 * m + 1));
        d_star * d_star * &poly * &poly * &poly
    };
    for bits in [192u32, 768, 3072] {
        let lhs = Bracket::from_ratio(&lhs_exact(), bits);
        let Ok(e) = u32::try_from(4 * m) else { break };
        let rhs = Bracket::from_ratio(&base, bits).powi(e);
        if lhs.certainly_le(&rhs) {
            return true;
        }
        if rhs.certainly_lt(&lhs) {
            return false;
        }
    }
    lhs_exact() <= exact_pow(&base, 4 * m)
}

/// Smallest `m` with `D^{1/2m} (2rm+1)^{3/4m} <= 1 + eps`, returned as `(m, p = 4m)`.
pub fn select_p(r: u32, eps: &BigRational, d_star: &BigRational) -> Result<(u64, u64)> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon = {eps} must be positive")));
    }
    if *d_star < BigRational::one() {
        return Err(Error::InvalidArgument(format!("D* = {d_star} must be >= 1")));
    }
    // The left side decreases in m, so the feasible set is a ray.
    let mut hi = 1u64;
    while !selector_holds(r, eps, d_star, hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if selector_holds(r, eps, d_star, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, 4 * hi))
}

/// `D^{1/2m} (2rm+1)^{3/4m}` as a bracket, for reporting.
pub fn selector_value(r: u32, d_star: &BigRational, m: u64, bits: u32) -> Bracket {
    let m32 = u32::try_from(m).expect("m fits in u32");
    let d = Bracket::from_ratio(d_star, bits).nth_root(2 * m32);
    let poly = Bracket::from_bigint(&BigInt::from(2 * r as u64 * m + 1), bits);
    d.mul(&poly.powi(3).nth_root(4 * m32))
}

/// One `p` of an RD check: `lhs <= rhs` with `margin = rhs - lhs`.
#[derive(Clone, Debug)]
pub struct RdRow {
    pub p: u32,
    pub lhs: Bracket,
    pub rhs: Bracket,
    pub margin: Bracket,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct RdReport {
    pub n: u32,
    pub degree: usize,
    pub d_upper: BigRational,
    pub l2: Bracket,
    pub rows: Vec<RdRow>,
}

impl RdReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// `D_upper (deg + 1)^{3/2} ||P||_2` as a bracket.
pub fn rd_bound(d_upper: &BigRational, degree: usize, l2: &Bracket) -> Bracket {
    let bits = l2.bits();
    let d = Bracket::from_ratio(d_upper, bits);
    let growth = Bracket::from_int((degree as i64 + 1).pow(3), bits).sqrt();
    d.mul(&growth).mul(l2)
}

/// Checks `||P||_p <= D_upper(N) (deg P + 1)^{3/2} ||P||_2` for each `p`.
pub fn rd_check_with(engine: &Weingarten, poly: &NcPolynomial, n: u32, p_list: &[u32]) -> Result<RdReport> {
    check_rd_dimension(n)?;
    let bits = DEFAULT_PRECISION_BITS + GUARD_BITS;
    let d_upper = dn_upper_bound(n)?;
    let degree = poly.degree();
    let l2 = lp_norm_with(engine, poly, 2, Some(n), bits)?.value;
    let rhs = rd_bound(&d_upper, degree, &l2);
    let rows = p_list
        .iter()
        .map(|&p| {
            let lhs = lp_norm_with(engine, poly, p, Some(n), bits)?.value;
            Ok(RdRow {
                p,
                margin: rhs.sub(&lhs),
                holds: lhs.certainly_le(&rhs),
                lhs,
                rhs: rhs.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RdReport {
        n,
        degree,
        d_upper,
        l2,
        rows,
    })
}

/// [`rd_check_with`] on the shared engine.
pub fn rd_check(poly: &NcPolynomial, n: u32, p_list: &[u32]) -> Result<RdReport> {
    rd_check_with(Weingarten::global(), poly, n, p_list)
}

/// Exact rational from an `f64`, for user-facing tolerances.
pub fn rational_from_f64(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::InvalidArgument(format!("{v} is not finite")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weingarten::Model;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn admissibility() {
        assert!(ThreeVertexParams::new(2, 2, 2).is_ok());
        assert!(ThreeVertexParams::new(2, 2, 3).is_err());
        assert!(ThreeVertexParams::new(1, 4, 1).is_err());
        assert!(ThreeVertexParams::new(1, 1, 4).is_err());
        assert_eq!(ThreeVertexParams::new(3, 5, 4).unwrap().r(), 2);
        assert!(matches!(ThreeVertexParams::from_r(1, 2, 2), Err(Error::Inadmissible { .. })));
        assert_eq!(ThreeVertexParams::all_up_to(2).len(), 1 + 1 + 1 + 1 + 2 + 2 + 1 + 2 + 3);
    }

    #[test]
    fn norm_examples() {
        let t = ThreeVertexParams::new(2, 2, 2).unwrap();
        assert_eq!(three_vertex_norm_inv_factorial(t, 3).unwrap(), q(9, 7));
        assert_eq!(three_vertex_norm_inv_product(t, 3).unwrap(), q(9, 7));
        let t = ThreeVertexParams::new(1, 1, 0).unwrap();
        for n in 3..10 {
            assert_eq!(three_vertex_norm_inv_factorial(t, n).unwrap(), BigRational::one());
            assert_eq!(three_vertex_norm_inv_product(t, n).unwrap(), BigRational::one());
        }
        let t = ThreeVertexParams::new(4, 3, 7).unwrap();
        assert_eq!(three_vertex_norm_inv_product(t, 5).unwrap(), BigRational::one());
        assert!(matches!(three_vertex_norm_inv_product(t, 2), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn radicand_examples() {
        assert_eq!(prefactor(ThreeVertexParams::new(1, 1, 2).unwrap(), 3).unwrap(), q(9, 8));
        for k in 0..6 {
            assert_eq!(prefactor(ThreeVertexParams::new(0, k, k).unwrap(), 4).unwrap(), BigRational::one());
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(dn_constant(2, Truncation::default()), Err(Error::InvalidDimension { n: 2, min: 3 })));
    }

    #[test]
    fn small_scan() {
        let b = dn_constant(3, Truncation { r_max: 8, side_max: 4 }).unwrap();
        assert!(b.value.lower() > BigRational::one());
        assert!(b.value.upper() <= b.rigorous_upper.lower());
        assert!(b.tail_error.is_positive());
        // (1 - q^2)^{-1/2} prod (1 - q^{2s})^{-1} at q = (3 - sqrt 5)/2
        assert!((b.value.mid_f64() - 1.299155134707888).abs() < 1e-12, "{}", b.value);
        assert!((b.rigorous_upper.mid_f64() - 2.026459382065739).abs() < 1e-11);
    }

    #[test]
    fn selector_basics() {
        let eps = q(1, 2);
        assert_eq!(select_p(0, &eps, &BigRational::one()).unwrap(), (1, 4));
        let d = q(2, 1);
        let (m, p) = select_p(2, &eps, &d).unwrap();
        assert_eq!(p, 4 * m);
        assert!(selector_holds(2, &eps, &d, m));
        assert!(m == 1 || !selector_holds(2, &eps, &d, m - 1));
        assert!(select_p(1, &BigRational::zero(), &d).is_err());
    }

    #[test]
    fn unit_polynomial_margin() {
        let one = NcPolynomial::one(Model::Orthogonal);
        let report = rd_check(&one, 4, &[2, 4]).unwrap();
        assert!(report.holds());
        let expected = &report.d_upper - BigRational::one();
        for row in &report.rows {
            assert!(row.margin.lower() >= BigRational::zero());
            assert!((row.margin.mid_f64() - crate::interval::ratio_to_f64(&expected)).abs() < 1e-30);
        }
    }
}
