//! Fixed-point real intervals with outward (directed) rounding.
//!
//! A [`Bracket`] stores two big-integer mantissas `lo`, `hi` sharing a binary
//! scale `bits`; the enclosed real set is `[lo / 2^bits, hi / 2^bits]`. Every
//! operation rounds the lower end toward `-inf` and the upper end toward
//! `+inf`, so a true value enclosed by the inputs stays enclosed by the output.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

impl Bracket {
    /// Degenerate interval holding an integer.
    pub fn from_int(v: i64, bits: u32) -> Self {
        let m = BigInt::from(v) << bits as usize;
        Bracket { lo: m.clone(), hi: m, bits }
    }

    pub fn from_bigint(v: &BigInt, bits: u32) -> Self {
        let m = v << bits as usize;
        Bracket { lo: m.clone(), hi: m, bits }
    }

    /// Tightest enclosure of an exact rational on the `2^-bits` grid.
    pub fn from_ratio(v: &BigRational, bits: u32) -> Self {
        let scaled = v.numer() << bits as usize;
        let lo = scaled.div_floor(v.denom());
        let hi = ceil_div(&scaled, v.denom());
        Bracket { lo, hi, bits }
    }

    /// Builds a bracket directly from grid mantissas. Panics if `lo > hi`.
    pub fn from_mantissas(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        assert!(lo <= hi, "inverted bracket");
        Bracket { lo, hi, bits }
    }

    /// Encloses an `f64` exactly (every finite double is a dyadic rational).
    pub fn from_f64(v: f64, bits: u32) -> Self {
        let r = BigRational::from_float(v).expect("finite float");
        Self::from_ratio(&r, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.bits))
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.bits))
    }

    pub fn lower_mantissa(&self) -> &BigInt {
        &self.lo
    }

    pub fn upper_mantissa(&self) -> &BigInt {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, pow2(self.bits))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lower() <= v && v <= &self.upper()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn lower_f64(&self) -> f64 {
        ratio_to_f64(&self.lower())
    }

    pub fn upper_f64(&self) -> f64 {
        ratio_to_f64(&self.upper())
    }

    pub fn mid_f64(&self) -> f64 {
        ratio_to_f64(&BigRational::new(&self.lo + &self.hi, pow2(self.bits + 1)))
    }

    /// `true` only when every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Bracket) -> bool {
        self.upper() <= other.lower()
    }

    /// `true` only when every point of `self` is `<` every point of `other`.
    pub fn certainly_lt(&self, other: &Bracket) -> bool {
        self.upper() < other.lower()
    }

    fn check(&self, other: &Bracket) {
        assert_eq!(self.bits, other.bits, "bracket precision mismatch");
    }

    pub fn add(&self, other: &Bracket) -> Bracket {
        self.check(other);
        Bracket {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            bits: self.bits,
        }
    }

    pub fn sub(&self, other: &Bracket) -> Bracket {
        self.check(other);
        Bracket {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Bracket {
        Bracket {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &Bracket) -> Bracket {
        self.check(other);
        let scale = pow2(self.bits);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Bracket {
            lo: min.div_floor(&scale),
            hi: ceil_div(max, &scale),
            bits: self.bits,
        }
    }

    /// Division by a bracket that excludes zero. Returns `None` otherwise.
    pub fn div(&self, other: &Bracket) -> Option<Bracket> {
        self.check(other);
        if !(other.lo.is_positive() || other.hi.is_negative()) {
            return None;
        }
        let scale = pow2(self.bits);
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let n = a * &scale;
                let f = n.div_floor(b);
                let c = ceil_div(&n, b);
                lo = Some(match lo {
                    Some(x) if x <= f => x,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(x) if x >= c => x,
                    _ => c,
                });
            }
        }
        Some(Bracket {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            bits: self.bits,
        })
    }

    pub fn recip(&self) -> Option<Bracket> {
        Bracket::from_int(1, self.bits).div(self)
    }

    pub fn powi(&self, exp: u32) -> Bracket {
        let mut result = Bracket::from_int(1, self.bits);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Square root of a non-negative bracket (negative lower ends clamp to 0).
    pub fn sqrt(&self) -> Bracket {
        self.nth_root(2)
    }

    /// Real `n`-th root of a non-negative bracket.
    pub fn nth_root(&self, n: u32) -> Bracket {
        assert!(n >= 1);
        assert!(!self.hi.is_negative(), "root of a negative bracket");
        if n == 1 {
            return self.clone();
        }
        let shift = self.bits as usize * (n as usize - 1);
        let root_floor = |m: &BigInt| -> BigInt {
            if m.sign() != Sign::Plus {
                BigInt::zero()
            } else {
                (m << shift).nth_root(n)
            }
        };
        let lo = root_floor(&self.lo);
        let hi_floor = root_floor(&self.hi);
        let hi = if self.hi.is_positive() && hi_floor.pow(n) == (&self.hi << shift) {
            hi_floor
        } else {
            hi_floor + 1
        };
        Bracket {
            lo,
            hi,
            bits: self.bits,
        }
    }

    /// Hull of two brackets.
    pub fn hull(&self, other: &Bracket) -> Bracket {
        self.check(other);
        Bracket {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            bits: self.bits,
        }
    }

    /// Elementwise maximum: encloses `max(x, y)` for `x` in self and `y` in other.
    pub fn max(&self, other: &Bracket) -> Bracket {
        self.check(other);
        Bracket {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            bits: self.bits,
        }
    }

    /// Deterministic decimal rendering of the midpoint, truncated toward zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let mid = BigRational::new(&self.lo + &self.hi, pow2(self.bits + 1));
        ratio_to_decimal(&mid, digits)
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower_f64(), self.upper_f64())
    }
}

impl PartialOrd for Bracket {
    /// Ordering is defined only for disjoint brackets (or identical ones).
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            Some(Ordering::Equal)
        } else if self.certainly_lt(other) {
            Some(Ordering::Less)
        } else if other.certainly_lt(self) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

/// Nearest-ish `f64` for reporting. Not used in any rigorous comparison.
pub fn ratio_to_f64(v: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (v.numer().to_f64(), v.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Large operands: scale both down to keep the leading bits.
    let nb = v.numer().bits() as i64;
    let db = v.denom().bits() as i64;
    let shift_n = (nb - 900).max(0);
    let shift_d = (db - 900).max(0);
    let n = (v.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (v.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// Decimal string of a rational with `digits` fractional digits, truncated toward zero.
pub fn ratio_to_decimal(v: &BigRational, digits: usize) -> String {
    let negative = v.is_negative();
    let abs = v.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (abs.numer() * &scale) / abs.denom();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let mut s = String::new();
    if negative && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        let frac = frac_part.to_string();
        s.push('.');
        for _ in frac.len()..digits {
            s.push('0');
        }
        s.push_str(&frac);
    }
    s
}
