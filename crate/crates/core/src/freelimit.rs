//! Moments of free semicircular and free circular families.
//!
//! Both laws have vanishing free cumulants beyond order two, so a mixed moment
//! is the number of non-crossing pairings whose pairs join letters with the
//! same label (and, for circular elements, join a `1` to a `*`). Counting is
//! done by interval dynamic programming over the word.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::pairings::Color;
use crate::weingarten::Letter;

/// A word in labeled (semi)circular letters; `row, col` form the label.
pub type LabeledWord = [Letter];

fn count(word: &LabeledWord, use_colors: bool) -> BigUint {
    let k = word.len();
    if k % 2 == 1 {
        return BigUint::zero();
    }
    let joinable = |a: &Letter, b: &Letter| (a.row, a.col) == (b.row, b.col) && (!use_colors || a.color != b.color);
    // c[i][j] = number of admissible pairings of word[i..j]
    let mut c = vec![vec![BigUint::zero(); k + 1]; k + 1];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = BigUint::one();
    }
    for len in (2..=k).step_by(2) {
        for i in 0..=k - len {
            let j = i + len;
            let mut total = BigUint::zero();
            for m in (i + 1..j).step_by(2) {
                if joinable(&word[i], &word[m]) && !c[i + 1][m].is_zero() && !c[m + 1][j].is_zero() {
                    total += &c[i + 1][m] * &c[m + 1][j];
                }
            }
            c[i][j] = total;
        }
    }
    c[0][k].clone()
}

/// `tau(s_{l1} ... s_{lk})` for a free semicircular family; colors are ignored.
pub fn semicircular_moment(word: &LabeledWord) -> BigUint {
    count(word, false)
}

/// `phi(c_{l1}^{e1} ... c_{lk}^{ek})` for a free circular family.
pub fn circular_moment(word: &LabeledWord) -> BigUint {
    let ones = word.iter().filter(|l| l.color == Color::One).count();
    if 2 * ones != word.len() {
        return BigUint::zero();
    }
    count(word, true)
}

/// `k`-th moment of the standard semicircle law on `[-2, 2]`.
pub fn semicircle_moment_single(k: usize) -> BigUint {
    if k % 2 == 1 {
        return BigUint::zero();
    }
    catalan(k / 2)
}

/// Catalan number `C_m = binom(2m, m) / (m + 1)`.
pub fn catalan(m: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..m {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(labels: &[(u32, u32)]) -> Vec<Letter> {
        labels.iter().map(|&(i, j)| Letter::new(i, j)).collect()
    }

    #[test]
    fn single_semicircular() {
        for (k, c) in [(0usize, 1u32), (2, 1), (4, 2), (6, 5), (10, 42)] {
            assert_eq!(semicircle_moment_single(k), BigUint::from(c));
            assert_eq!(semicircular_moment(&s(&vec![(1, 1); k])), BigUint::from(c));
        }
        assert_eq!(semicircle_moment_single(7), BigUint::zero());
    }

    #[test]
    fn mixed_labels() {
        assert_eq!(semicircular_moment(&s(&[(1, 1), (1, 2), (1, 1), (1, 2)])), BigUint::zero());
        assert_eq!(semicircular_moment(&s(&[(1, 1), (1, 2), (1, 2), (1, 1)])), BigUint::one());
    }

    #[test]
    fn circular() {
        let c = Letter::new(1, 1);
        let cs = Letter::star(1, 1);
        assert_eq!(circular_moment(&[c, cs]), BigUint::one());
        assert_eq!(circular_moment(&[c, c]), BigUint::zero());
        assert_eq!(circular_moment(&[c, cs, c, cs]), BigUint::from(2u32));
    }
}
