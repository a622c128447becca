//! Exact integer linear algebra for Gram matrices.
//!
//! [`bareiss_inverse`] is fraction-free Gaussian elimination on `[A | I]`,
//! returning `det(A) * A^{-1}` as integers together with `det(A)`. For
//! matrices too large for dense big-integer elimination, [`ExactSolver`]
//! solves a single system `A x = b` exactly: a floating LU factorization
//! drives integer iterative refinement, the dyadic approximation is turned
//! into rationals by continued fractions, and the candidate is accepted only
//! after `A x = b` is checked in exact integer arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Row-major Bareiss elimination with partial pivoting on an `n x cols`
/// matrix; only the first `n` columns are pivoted on. Returns the sign of the
/// row permutation, or `None` if singular.
fn bareiss_in_place(m: &mut [BigInt], n: usize, cols: usize) -> Option<i32> {
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k * cols + k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i * cols + k].is_zero())?;
            for j in 0..cols {
                m.swap(k * cols + j, swap * cols + j);
            }
            sign = -sign;
        }
        let pivot = m[k * cols + k].clone();
        for i in k + 1..n {
            let factor = m[i * cols + k].clone();
            for j in k + 1..cols {
                let v = (&pivot * &m[i * cols + j] - &factor * &m[k * cols + j]) / &prev;
                m[i * cols + j] = v;
            }
            m[i * cols + k] = BigInt::zero();
        }
        prev = pivot;
    }
    Some(sign)
}

pub fn determinant(a: &[BigInt], n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_vec();
    match bareiss_in_place(&mut m, n, n) {
        Some(sign) => m[(n - 1) * n + n - 1].clone() * sign,
        None => BigInt::zero(),
    }
}

/// Leading principal minors, via Bareiss without pivoting. Stops early (with
/// a trailing zero) if a minor vanishes.
pub fn leading_minors(a: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut m = a.to_vec();
    let mut prev = BigInt::one();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = m[k * n + k].clone();
        out.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            let factor = m[i * n + k].clone();
            for j in k + 1..n {
                m[i * n + j] = (&pivot * &m[i * n + j] - &factor * &m[k * n + j]) / &prev;
            }
        }
        prev = pivot;
    }
    out
}

/// Exact inverse in scaled form: returns `(Y, d)` with `Y = d * A^{-1}`
/// integral and `d = ±det(A)`, or `None` if `A` is singular.
pub fn bareiss_inverse(a: &[BigInt], n: usize) -> Option<(Vec<BigInt>, BigInt)> {
    let cols = 2 * n;
    let mut m = vec![BigInt::zero(); n * cols];
    for i in 0..n {
        for j in 0..n {
            m[i * cols + j] = a[i * n + j].clone();
        }
        m[i * cols + n + i] = BigInt::one();
    }
    bareiss_in_place(&mut m, n, cols)?;
    let d = m[(n - 1) * cols + n - 1].clone();
    if d.is_zero() {
        return None;
    }
    // Back substitution: a'_ii Y_i = d b'_i - sum_{j>i} a'_ij Y_j, exact division.
    let mut y = vec![BigInt::zero(); n * n];
    for c in 0..n {
        for i in (0..n).rev() {
            let mut acc = &d * &m[i * cols + n + c];
            for j in i + 1..n {
                acc -= &m[i * cols + j] * &y[j * n + c];
            }
            let (q, r) = acc.div_rem(&m[i * cols + i]);
            debug_assert!(r.is_zero(), "inexact Bareiss back substitution");
            y[i * n + c] = q;
        }
    }
    Some((y, d))
}

/// Floating LU with partial pivoting, row-major, in place.
fn lu_factor(a: &mut [f64], n: usize) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, max) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if max == 0.0 || !max.is_finite() {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = a[k * n + k];
        let (top, bottom) = a.split_at_mut((k + 1) * n);
        let row_k = &top[k * n..k * n + n];
        for row in bottom.chunks_mut(n) {
            let f = row[k] / pivot;
            row[k] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    row[j] -= f * row_k[j];
                }
            }
        }
    }
    Some(perm)
}

/// Exact rational solver for integer systems `A x = b`.
#[derive(Clone, Debug)]
pub struct ExactSolver {
    n: usize,
    a: Vec<i64>,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

const STEP_BITS: u32 = 24;
const MAX_BITS: u32 = 60_000;

impl ExactSolver {
    /// Factors `a` (row-major `n x n`). `None` if the floating factorization
    /// breaks down.
    pub fn new(a: Vec<i64>, n: usize) -> Option<Self> {
        assert_eq!(a.len(), n * n);
        let mut lu: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let perm = lu_factor(&mut lu, n)?;
        Some(ExactSolver { n, a, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn lu_solve(&self, r: &[i128]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| r[p] as f64).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..i * n + n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A x = b`; returns `(numerators, denominator)` with a positive
    /// denominator, verified exactly. `None` if refinement fails.
    pub fn solve(&self, b: &[i64]) -> Option<(Vec<BigInt>, BigInt)> {
        let n = self.n;
        let mut r: Vec<i128> = b.iter().map(|&v| v as i128).collect();
        let mut acc = vec![BigInt::zero(); n];
        let mut shift: u32 = 0;
        let r0 = r.iter().map(|v| v.abs()).max().unwrap_or(0).max(1);
        let mut last_den: Option<BigInt> = None;
        while shift < MAX_BITS {
            let z = self.lu_solve(&r);
            let scale = (1u64 << STEP_BITS) as f64;
            let mut y = Vec::with_capacity(n);
            for v in &z {
                let s = (v * scale).round();
                if !s.is_finite() || s.abs() > 1e30 {
                    return None;
                }
                y.push(s as i128);
            }
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                let mut s: i128 = r[i].checked_mul(1i128 << STEP_BITS)?;
                let row = &self.a[i * n..i * n + n];
                for (aij, yj) in row.iter().zip(&y) {
                    s = s.checked_sub((*aij as i128).checked_mul(*yj)?)?;
                }
                next.push(s);
            }
            r = next;
            // Residuals must stay bounded for the refinement to converge.
            let rmax = r.iter().map(|v| v.abs()).max().unwrap_or(0);
            if rmax > r0.saturating_mul(1 << 40).max(1 << 60) {
                return None;
            }
            for (a, yv) in acc.iter_mut().zip(&y) {
                *a = (&*a << STEP_BITS as usize) + BigInt::from(*yv);
            }
            shift += STEP_BITS;
            if shift < 96 {
                continue;
            }
            let Some(den) = self.common_denominator(&acc, shift) else {
                continue;
            };
            if last_den.as_ref() == Some(&den) {
                if let Some(sol) = self.verify(&acc, shift, &den, b) {
                    return Some(sol);
                }
            }
            last_den = Some(den);
        }
        None
    }

    fn common_denominator(&self, acc: &[BigInt], shift: u32) -> Option<BigInt> {
        let limit = BigInt::one() << ((shift as usize).saturating_sub(16) / 2);
        let mut d = BigInt::one();
        for x in acc {
            let (_, q) = best_approximation(&(&d * x), shift, &limit);
            d *= q;
            if d > limit {
                return None;
            }
        }
        Some(d)
    }

    fn verify(&self, acc: &[BigInt], shift: u32, den: &BigInt, b: &[i64]) -> Option<(Vec<BigInt>, BigInt)> {
        let n = self.n;
        let half = BigInt::one() << (shift as usize - 1);
        let nums: Vec<BigInt> = acc
            .iter()
            .map(|x| (den * x + &half).div_floor(&(BigInt::one() << shift as usize)))
            .collect();
        for i in 0..n {
            let row = &self.a[i * n..i * n + n];
            let mut s = BigInt::zero();
            for (aij, xj) in row.iter().zip(&nums) {
                s += xj * *aij;
            }
            if s != den * b[i] {
                return None;
            }
        }
        Some((nums, den.clone()))
    }
}

/// Last continued-fraction convergent `p/q` of `num / 2^shift` with `q <= limit`.
pub fn best_approximation(num: &BigInt, shift: u32, limit: &BigInt) -> (BigInt, BigInt) {
    let mut a = num.clone();
    let mut b = BigInt::one() << shift as usize;
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    while !b.is_zero() {
        let t = a.div_floor(&b);
        let h = &t * &h1 + &h2;
        let k = &t * &k1 + &k2;
        if &k > limit {
            break;
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        let rem = &a - &t * &b;
        a = std::mem::replace(&mut b, rem);
    }
    if k1.is_zero() {
        // limit below 1: fall back to the integer part
        return (num.div_floor(&(BigInt::one() << shift as usize)), BigInt::one());
    }
    (h1, k1)
}

/// Lossy conversion used only for diagnostics.
pub fn to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&ints(&[9, 3, 3, 9]), 2), BigInt::from(72));
        assert_eq!(determinant(&ints(&[0, 1, 1, 0]), 2), BigInt::from(-1));
        assert_eq!(determinant(&ints(&[1, 2, 2, 4]), 2), BigInt::zero());
    }

    #[test]
    fn inverse_with_pivoting() {
        let a = ints(&[0, 2, 1, 1, 1, 0, 3, 0, 1]);
        let (y, d) = bareiss_inverse(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: BigInt = (0..3).map(|t| &a[i * 3 + t] * &y[t * 3 + j]).sum();
                assert_eq!(s, if i == j { d.clone() } else { BigInt::zero() });
            }
        }
        assert!(bareiss_inverse(&ints(&[1, 2, 2, 4]), 2).is_none());
    }

    #[test]
    fn exact_solver_matches_bareiss() {
        let a = vec![27i64, 9, 9, 3, 9, 27, 3, 9, 9, 3, 27, 9, 3, 9, 9, 27];
        let solver = ExactSolver::new(a.clone(), 4).unwrap();
        let (nums, den) = solver.solve(&[1, 0, 1, 1]).unwrap();
        let (y, d) = bareiss_inverse(&ints(&a), 4).unwrap();
        for i in 0..4 {
            let expect = &y[i * 4] + &y[i * 4 + 2] + &y[i * 4 + 3];
            assert_eq!(&nums[i] * &d, expect * &den);
        }
    }

    #[test]
    fn convergents() {
        // 0.1 ~ 6710886 / 2^26
        let (p, q) = best_approximation(&BigInt::from(6710886), 26, &BigInt::from(100));
        assert_eq!((p, q), (BigInt::from(1), BigInt::from(10)));
    }
}
