//! Quantum integers at an integer loop parameter.
//!
//! For a dimension `N >= 2` the deformation parameter `q` in `(0, 1]` solves
//! `q + 1/q = N`. All quantum integers `[a]_q` are then ordinary integers given
//! by the Chebyshev recursion `[a+1] = N [a] - [a-1]`, so this module never
//! touches floating powers of `q` for them. The real `q` is carried as a
//! rigorous [`Bracket`] for the tail bounds in [`crate::rapid_decay`].

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::Bracket;

pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Extra grid bits kept beyond the requested precision.
pub const GUARD_BITS: u32 = 32;

/// Dimension `N`, the matching `q`, and the precision policy.
#[derive(Clone, Debug)]
pub struct QContext {
    n: u32,
    q: Bracket,
    precision_bits: u32,
}

impl QContext {
    pub fn new(n: u32) -> Result<Self> {
        Self::with_precision(n, DEFAULT_PRECISION_BITS)
    }

    pub fn with_precision(n: u32, precision_bits: u32) -> Result<Self> {
        let q = q_bracket(n, precision_bits + GUARD_BITS)?;
        Ok(QContext {
            n,
            q,
            precision_bits,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> &Bracket {
        &self.q
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Grid resolution used by every bracket derived from this context.
    pub fn working_bits(&self) -> u32 {
        self.q.bits()
    }

    pub fn q_int(&self, a: u32) -> BigInt {
        q_int(a, self.n).expect("context dimension already validated")
    }
}

fn check_dimension(n: u32) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDimension { n, min: 2 })
    } else {
        Ok(())
    }
}

/// Root of `q^2 - N q + 1 = 0` in `(0, 1]` as a bracket on a `2^-bits` grid.
///
/// `q = (N - sqrt(N^2 - 4)) / 2`; the square root is bracketed by integer
/// square roots, and `N = 2` gives `q = 1` exactly.
pub fn q_bracket(n: u32, bits: u32) -> Result<Bracket> {
    check_dimension(n)?;
    let disc = BigInt::from(n) * BigInt::from(n) - 4;
    let scaled: BigInt = disc << (2 * bits as usize);
    let s = scaled.sqrt();
    let exact = &s * &s == scaled;
    let n_scaled = BigInt::from(n) << bits as usize;
    // q = (N*2^b - sqrt) / 2 with sqrt in [s, s + 1).
    let s_hi = if exact { s.clone() } else { &s + 1 };
    let lo_num = &n_scaled - &s_hi;
    let hi_num = &n_scaled - &s;
    let lo = num_integer::Integer::div_floor(&lo_num, &BigInt::from(2));
    let hi = -num_integer::Integer::div_floor(&(-hi_num), &BigInt::from(2));
    Ok(Bracket::from_mantissas(lo, hi, bits))
}

/// `q` for dimension `N` at the default precision.
pub fn q_of_n(n: u32) -> Result<Bracket> {
    Ok(QContext::new(n)?.q)
}

/// Quantum integer `[a]_q` at `q + 1/q = N`, exactly.
pub fn q_int(a: u32, n: u32) -> Result<BigInt> {
    check_dimension(n)?;
    Ok(q_ints(a, n).pop().unwrap())
}

/// `[0]_q, [1]_q, ..., [a]_q` in one pass of the recursion.
pub fn q_ints(a: u32, n: u32) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(a as usize + 1);
    out.push(BigInt::zero());
    if a == 0 {
        return out;
    }
    out.push(BigInt::one());
    let nn = BigInt::from(n);
    for i in 2..=a as usize {
        let next = &nn * &out[i - 1] - &out[i - 2];
        out.push(next);
    }
    out
}

/// `[a]_q! = [a]_q [a-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(a: u32, n: u32) -> Result<BigInt> {
    check_dimension(n)?;
    Ok(q_ints(a, n).into_iter().skip(1).fold(BigInt::one(), |acc, x| acc * x))
}

/// Dimension of the `k`-th irreducible representation, `[k+1]_q`.
pub fn dim_irrep(k: u32, n: u32) -> Result<BigInt> {
    q_int(k + 1, n)
}

/// Highest weights in the decomposition of `U^n (x) U^k`: `n+k, n+k-2, ..., |n-k|`.
pub fn fusion_summands(n: u32, k: u32) -> Vec<u32> {
    (0..=n.min(k)).map(|r| n + k - 2 * r).collect()
}
