//! Non-crossing pair partitions, their colored variants, and Temperley–Lieb
//! Gram matrices.
//!
//! Points are numbered `1..=k`. Enumerations come back in canonical order:
//! lexicographic on the sorted list of pairs. That order fixes the row/column
//! indexing of every Gram and Weingarten matrix built on top of it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Letter color: `One` for a generator, `Star` for its adjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    One,
    Star,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::One => Color::Star,
            Color::Star => Color::One,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::One => write!(f, "1"),
            Color::Star => write!(f, "*"),
        }
    }
}

/// Parses a color pattern such as `"1*1*"`.
pub fn parse_pattern(text: &str) -> Result<Vec<Color>> {
    text.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .enumerate()
        .map(|(pos, c)| match c {
            '1' => Ok(Color::One),
            '*' => Ok(Color::Star),
            other => Err(Error::Parse {
                pos,
                msg: format!("unexpected color symbol {other:?}"),
            }),
        })
        .collect()
}

/// A non-crossing perfect matching of `{1..k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NcPairing {
    /// 0-based partner of each point.
    partner: Vec<usize>,
}

impl NcPairing {
    /// Builds a pairing from 1-based pairs, checking it is a non-crossing
    /// perfect matching of `{1..k}`.
    pub fn from_pairs(k: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if k % 2 == 1 {
            return Err(Error::OddOrder { k });
        }
        let mut partner = vec![usize::MAX; k];
        for &(a, b) in pairs {
            if a == 0 || b == 0 || a > k || b > k || a == b {
                return Err(Error::InvalidArgument(format!("bad pair ({a}, {b}) for k = {k}")));
            }
            if partner[a - 1] != usize::MAX || partner[b - 1] != usize::MAX {
                return Err(Error::InvalidArgument(format!("point reused in pair ({a}, {b})")));
            }
            partner[a - 1] = b - 1;
            partner[b - 1] = a - 1;
        }
        if partner.iter().any(|&p| p == usize::MAX) {
            return Err(Error::InvalidArgument("pairs do not cover every point".into()));
        }
        let p = NcPairing { partner };
        if !p.is_non_crossing() {
            return Err(Error::InvalidArgument("pairs cross".into()));
        }
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.partner.len()
    }

    /// 0-based partner of 0-based point `i`.
    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    /// Sorted 1-based pairs `(a, b)` with `a < b`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i < j)
            .map(|(i, &j)| (i + 1, j + 1))
            .collect()
    }

    fn is_non_crossing(&self) -> bool {
        let pairs = self.pairs();
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                if a < c && c < b && b < d {
                    return false;
                }
            }
        }
        true
    }

    /// `true` when every pair joins positions carrying equal values.
    pub fn respects<T: PartialEq>(&self, values: &[T]) -> bool {
        self.partner
            .iter()
            .enumerate()
            .all(|(i, &j)| i > j || values[i] == values[j])
    }

    /// `true` when every pair joins a `One` with a `Star`.
    pub fn respects_colors(&self, pattern: &[Color]) -> bool {
        self.partner
            .iter()
            .enumerate()
            .all(|(i, &j)| i > j || pattern[i] != pattern[j])
    }
}

impl Ord for NcPairing {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k()
            .cmp(&other.k())
            .then_with(|| self.pairs().cmp(&other.pairs()))
    }
}

impl PartialOrd for NcPairing {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NcPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.pairs().iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{{{}}}", body.join(","))
    }
}

/// An NC pairing whose pairs each join a `One` point to a `Star` point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredNcPairing {
    pub base: NcPairing,
    pub pattern: Vec<Color>,
}

fn fill(partner: &mut Vec<usize>, lo: usize, hi: usize, out: &mut Vec<Vec<usize>>) {
    // Pair the first free point of [lo, hi) and recurse on inside/outside.
    if lo >= hi {
        out.push(partner.clone());
        return;
    }
    let mut inner_results = Vec::new();
    for m in (lo + 1..hi).step_by(2) {
        partner[lo] = m;
        partner[m] = lo;
        inner_results.clear();
        fill(partner, lo + 1, m, &mut inner_results);
        for inner in &inner_results {
            let mut state = inner.clone();
            let mut outer = Vec::new();
            fill(&mut state, m + 1, hi, &mut outer);
            out.extend(outer);
        }
    }
}

/// All non-crossing perfect matchings of `{1..k}` in canonical order.
/// Odd `k` gives an empty list; `k = 0` gives the single empty pairing.
pub fn enumerate_nc_pairings(k: usize) -> Vec<NcPairing> {
    if k % 2 == 1 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    let mut partner = vec![0usize; k];
    fill(&mut partner, 0, k, &mut raw);
    let mut out: Vec<NcPairing> = raw.into_iter().map(|partner| NcPairing { partner }).collect();
    out.sort();
    out
}

/// Colored NC pairings for a 1/* pattern, in canonical order of the bases.
pub fn enumerate_colored_nc_pairings(pattern: &[Color]) -> Vec<ColoredNcPairing> {
    let ones = pattern.iter().filter(|&&c| c == Color::One).count();
    if 2 * ones != pattern.len() {
        return Vec::new();
    }
    enumerate_nc_pairings(pattern.len())
        .into_iter()
        .filter(|p| p.respects_colors(pattern))
        .map(|base| ColoredNcPairing {
            base,
            pattern: pattern.to_vec(),
        })
        .collect()
}

/// Number of closed loops when `p` is glued to the reflection of `q`: the
/// connected components of the multigraph with edge set `pairs(p) + pairs(q)`.
pub fn loop_count(p: &NcPairing, q: &NcPairing) -> Result<usize> {
    if p.k() != q.k() {
        return Err(Error::LengthMismatch {
            left: p.k(),
            right: q.k(),
        });
    }
    Ok(loops_unchecked(p, q))
}

pub(crate) fn loops_unchecked(p: &NcPairing, q: &NcPairing) -> usize {
    let k = p.k();
    let mut seen = vec![false; k];
    let mut loops = 0;
    for start in 0..k {
        if seen[start] {
            continue;
        }
        loops += 1;
        let mut v = start;
        loop {
            seen[v] = true;
            let w = p.partner[v];
            seen[w] = true;
            v = q.partner[w];
            if v == start {
                break;
            }
        }
    }
    loops
}

/// Gram matrix `N^{loops(p, q)}` over a (colored) pairing basis.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    k: usize,
    n: u32,
    pattern: Option<Vec<Color>>,
    basis: Vec<NcPairing>,
    loops: Vec<u32>,
}

impl GramMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn pattern(&self) -> Option<&[Color]> {
        self.pattern.as_deref()
    }

    pub fn basis(&self) -> &[NcPairing] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn loops(&self, i: usize, j: usize) -> u32 {
        self.loops[i * self.dim() + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> BigInt {
        BigInt::from(self.n).pow(self.loops(i, j))
    }

    /// Row-major integer entries.
    pub fn entries(&self) -> Vec<BigInt> {
        let powers: Vec<BigInt> = (0..=self.k as u32 / 2 + 1).map(|e| BigInt::from(self.n).pow(e)).collect();
        self.loops.iter().map(|&e| powers[e as usize].clone()).collect()
    }

    /// Row-major entries as `i64` when they fit.
    pub fn entries_i64(&self) -> Option<Vec<i64>> {
        self.loops
            .iter()
            .map(|&e| (self.n as i64).checked_pow(e))
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..i).all(|j| self.loops(i, j) == self.loops(j, i)))
    }

    pub fn determinant(&self) -> BigInt {
        linalg::determinant(&self.entries(), self.dim())
    }

    /// Leading principal minors `M_1, ..., M_d`; the rational LDL^T pivots
    /// are `M_i / M_{i-1}`. All positive iff the matrix is positive definite.
    pub fn leading_minors(&self) -> Vec<BigInt> {
        linalg::leading_minors(&self.entries(), self.dim())
    }
}

/// Gram matrix for `k` points at dimension `N`, optionally restricted to a
/// color pattern of length `k`.
pub fn gram_matrix(k: usize, n: u32, pattern: Option<&[Color]>) -> Result<GramMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    if k % 2 == 1 {
        return Err(Error::OddOrder { k });
    }
    let basis = match pattern {
        Some(pat) => {
            if pat.len() != k {
                return Err(Error::LengthMismatch {
                    left: k,
                    right: pat.len(),
                });
            }
            enumerate_colored_nc_pairings(pat).into_iter().map(|c| c.base).collect()
        }
        None => enumerate_nc_pairings(k),
    };
    Ok(gram_from_basis(k, n, pattern.map(|p| p.to_vec()), basis))
}

pub(crate) fn gram_from_basis(k: usize, n: u32, pattern: Option<Vec<Color>>, basis: Vec<NcPairing>) -> GramMatrix {
    let d = basis.len();
    let mut loops = vec![0u32; d * d];
    for i in 0..d {
        for j in 0..=i {
            let l = loops_unchecked(&basis[i], &basis[j]) as u32;
            loops[i * d + j] = l;
            loops[j * d + i] = l;
        }
    }
    GramMatrix {
        k,
        n,
        pattern,
        basis,
        loops,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(m: usize) -> usize {
        let mut c = vec![1usize; m + 1];
        for i in 1..=m {
            c[i] = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
        }
        c[m]
    }

    #[test]
    fn small_enumerations() {
        let two = enumerate_nc_pairings(2);
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].pairs(), vec![(1, 2)]);
        let four = enumerate_nc_pairings(4);
        assert_eq!(four.iter().map(|p| p.pairs()).collect::<Vec<_>>(), vec![
            vec![(1, 2), (3, 4)],
            vec![(1, 4), (2, 3)]
        ]);
        assert_eq!(enumerate_nc_pairings(8).len(), 14);
        assert!(enumerate_nc_pairings(5).is_empty());
        assert_eq!(enumerate_nc_pairings(0).len(), 1);
    }

    #[test]
    fn catalan_counts_up_to_sixteen() {
        for k in (0..=16).step_by(2) {
            assert_eq!(enumerate_nc_pairings(k).len(), catalan(k / 2), "k = {k}");
        }
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        let ps = enumerate_nc_pairings(10);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn colored_enumerations() {
        use Color::*;
        assert_eq!(enumerate_colored_nc_pairings(&[One, Star]).len(), 1);
        assert!(enumerate_colored_nc_pairings(&[One, One]).is_empty());
        let alt = enumerate_colored_nc_pairings(&[One, Star, One, Star]);
        assert_eq!(
            alt.iter().map(|c| c.base.pairs()).collect::<Vec<_>>(),
            vec![vec![(1, 2), (3, 4)], vec![(1, 4), (2, 3)]]
        );
        for m in 1..=6 {
            let pat: Vec<Color> = (0..2 * m).map(|i| if i % 2 == 0 { One } else { Star }).collect();
            assert_eq!(enumerate_colored_nc_pairings(&pat).len(), catalan(m));
        }
    }

    #[test]
    fn loop_counts() {
        let four = enumerate_nc_pairings(4);
        assert_eq!(loop_count(&four[0], &four[1]).unwrap(), 1);
        assert_eq!(loop_count(&four[0], &four[0]).unwrap(), 2);
        let p = NcPairing::from_pairs(6, &[(1, 2), (3, 4), (5, 6)]).unwrap();
        let q = NcPairing::from_pairs(6, &[(1, 6), (2, 3), (4, 5)]).unwrap();
        assert_eq!(loop_count(&p, &q).unwrap(), 1);
        assert!(matches!(
            loop_count(&p, &four[0]),
            Err(Error::LengthMismatch { left: 6, right: 4 })
        ));
    }

    #[test]
    fn crossing_pairs_rejected() {
        assert!(NcPairing::from_pairs(4, &[(1, 3), (2, 4)]).is_err());
    }

    #[test]
    fn gram_small() {
        let g = gram_matrix(2, 7, None).unwrap();
        assert_eq!(g.entries(), vec![BigInt::from(7)]);
        let g = gram_matrix(4, 3, None).unwrap();
        let e: Vec<i64> = g.entries_i64().unwrap();
        assert_eq!(e, vec![9, 3, 3, 9]);
        assert_eq!(g.determinant(), BigInt::from(72));
        assert!(matches!(gram_matrix(3, 3, None), Err(Error::OddOrder { k: 3 })));
    }
}
