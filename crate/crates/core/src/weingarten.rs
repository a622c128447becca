//! Weingarten calculus for the free orthogonal and free unitary quantum groups.
//!
//! The Haar state of a generator word is
//!
//! ```text
//! h(u^{e1}_{i1 j1} ... u^{ek}_{ik jk}) = sum_{p, q} delta_p(i) delta_q(j) W(p, q)
//! ```
//!
//! where `p, q` run over the NC pairings of `k` points (for the unitary model:
//! the pairings joining a `1` to a `*` in the color pattern `e`), `delta_p(i)`
//! is 1 iff every pair of `p` joins equal indices, and `W` is the inverse of
//! the Gram matrix `N^{loops(p, q)}`.
//!
//! Tables up to [`DENSE_LIMIT`] pairings are inverted exactly by Bareiss
//! elimination and cached. Beyond that, moments are obtained from a single
//! exact solve `G x = 1_B` per column-delta set, which keeps `k = 14, 16`
//! within reach.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use log::warn;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ExactSolver};
use crate::pairings::{self, Color, GramMatrix, NcPairing};

/// Default bound on the word length the engine accepts.
pub const DEFAULT_KMAX: usize = 12;

/// Largest pairing basis inverted densely (132 = orthogonal `k = 12`).
pub const DENSE_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    /// `O_N^+`: self-adjoint generators `u_ij`, every letter colored `1`.
    Orthogonal,
    /// `U_N^+`: generators `v_ij` and adjoints `v*_ij`.
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub row: u32,
    pub col: u32,
    pub color: Color,
}

impl Letter {
    pub fn new(row: u32, col: u32) -> Self {
        Letter {
            row,
            col,
            color: Color::One,
        }
    }

    pub fn star(row: u32, col: u32) -> Self {
        Letter {
            row,
            col,
            color: Color::Star,
        }
    }

    pub fn transpose(self) -> Self {
        Letter {
            row: self.col,
            col: self.row,
            color: self.color,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.color {
            Color::One => write!(f, "x[{},{}]", self.row, self.col),
            Color::Star => write!(f, "v*[{},{}]", self.row, self.col),
        }
    }
}

/// A product of generator letters under a fixed model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorWord {
    letters: Vec<Letter>,
    model: Model,
}

impl GeneratorWord {
    pub fn new(letters: Vec<Letter>, model: Model) -> Result<Self> {
        for l in &letters {
            if l.row == 0 || l.col == 0 {
                return Err(Error::InvalidArgument("indices start at 1".into()));
            }
            if model == Model::Orthogonal && l.color == Color::Star {
                return Err(Error::ModelMismatch(
                    "adjoint letters are not allowed in the orthogonal model".into(),
                ));
            }
        }
        Ok(GeneratorWord { letters, model })
    }

    pub fn orthogonal(indices: &[(u32, u32)]) -> Result<Self> {
        Self::new(indices.iter().map(|&(i, j)| Letter::new(i, j)).collect(), Model::Orthogonal)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn transpose(&self) -> Self {
        GeneratorWord {
            letters: self.letters.iter().map(|l| l.transpose()).collect(),
            model: self.model,
        }
    }

    /// `w*`: reversed letters with flipped colors (orthogonal letters are self-adjoint).
    pub fn adjoint(&self) -> Self {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| match self.model {
                Model::Orthogonal => *l,
                Model::Unitary => Letter {
                    color: l.color.flip(),
                    ..*l
                },
            })
            .collect();
        GeneratorWord {
            letters,
            model: self.model,
        }
    }

    pub fn concat(&self, other: &GeneratorWord) -> Result<Self> {
        if self.model != other.model {
            return Err(Error::ModelMismatch("cannot concatenate words of different models".into()));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(GeneratorWord {
            letters,
            model: self.model,
        })
    }

    fn pattern(&self) -> Option<Vec<Color>> {
        match self.model {
            Model::Orthogonal => None,
            Model::Unitary => Some(self.letters.iter().map(|l| l.color).collect()),
        }
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| match (self.model, l.color) {
                (Model::Orthogonal, _) => format!("x[{},{}]", l.row, l.col),
                (Model::Unitary, Color::One) => format!("v[{},{}]", l.row, l.col),
                (Model::Unitary, Color::Star) => format!("v*[{},{}]", l.row, l.col),
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

type PatternKey = (usize, Option<Vec<Color>>);
type TableKey = (usize, u32, Option<Vec<Color>>);

fn bitset(indices: &[usize], dim: usize) -> Vec<u64> {
    let mut words = vec![0u64; dim.div_ceil(64)];
    for &i in indices {
        words[i / 64] |= 1 << (i % 64);
    }
    words
}

/// Exact Gram inverse for one `(k, N, pattern)` key, stored as `Y / d` with
/// `Y = d * G^{-1}` integral.
#[derive(Debug)]
pub struct WeingartenTable {
    gram: GramMatrix,
    scaled: Vec<BigInt>,
    denom: BigInt,
    row_sums: Mutex<HashMap<Vec<u64>, Arc<Vec<BigInt>>>>,
}

impl WeingartenTable {
    fn build(gram: GramMatrix) -> Result<Self> {
        let d = gram.dim();
        let (mut scaled, mut denom) = linalg::bareiss_inverse(&gram.entries(), d).ok_or(Error::Singular {
            k: gram.k(),
            n: gram.n(),
        })?;
        if denom < BigInt::zero() {
            denom = -denom;
            for v in scaled.iter_mut() {
                *v = -&*v;
            }
        }
        Ok(WeingartenTable {
            gram,
            scaled,
            denom,
            row_sums: Mutex::new(HashMap::new()),
        })
    }

    pub fn k(&self) -> usize {
        self.gram.k()
    }

    pub fn n(&self) -> u32 {
        self.gram.n()
    }

    pub fn pattern(&self) -> Option<&[Color]> {
        self.gram.pattern()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn basis(&self) -> &[NcPairing] {
        self.gram.basis()
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.scaled[i * self.dim() + j].clone(), self.denom.clone())
    }

    /// Row-major rational entries of `W = G^{-1}`.
    pub fn matrix(&self) -> Vec<BigRational> {
        let d = self.dim();
        (0..d * d).map(|t| self.entry(t / d, t % d)).collect()
    }

    /// Checks `W G = I` exactly.
    pub fn verify_inverse(&self) -> bool {
        let d = self.dim();
        let g = self.gram.entries();
        for i in 0..d {
            for j in 0..d {
                let mut s = BigInt::zero();
                for t in 0..d {
                    s += &self.scaled[i * d + t] * &g[t * d + j];
                }
                let expect = if i == j { self.denom.clone() } else { BigInt::zero() };
                if s != expect {
                    return false;
                }
            }
        }
        true
    }

    /// `sum_{p in rows, q in cols} W(p, q)`.
    pub fn block_sum(&self, rows: &[usize], cols: &[usize]) -> BigRational {
        let d = self.dim();
        let total = if rows.len() * cols.len() <= 4 * d {
            let mut s = BigInt::zero();
            for &p in rows {
                for &q in cols {
                    s += &self.scaled[p * d + q];
                }
            }
            s
        } else {
            let sums = self.row_sums_for(rows);
            cols.iter().map(|&q| &sums[q]).sum()
        };
        BigRational::new(total, self.denom.clone())
    }

    fn row_sums_for(&self, rows: &[usize]) -> Arc<Vec<BigInt>> {
        let d = self.dim();
        let key = bitset(rows, d);
        if let Some(hit) = self.row_sums.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let mut sums = vec![BigInt::zero(); d];
        for &p in rows {
            for (q, s) in sums.iter_mut().enumerate() {
                *s += &self.scaled[p * d + q];
            }
        }
        let sums = Arc::new(sums);
        self.row_sums.lock().unwrap().insert(key, sums.clone());
        sums
    }
}

/// Exact solver state for bases above [`DENSE_LIMIT`].
#[derive(Debug)]
struct LargeSystem {
    k: usize,
    n: u32,
    solver: ExactSolver,
    solutions: Mutex<HashMap<Vec<u64>, Arc<(Vec<BigInt>, BigInt)>>>,
}

impl LargeSystem {
    fn block_sum(&self, rows: &[usize], cols: &[usize]) -> Result<BigRational> {
        let d = self.solver.dim();
        let key = bitset(cols, d);
        let cached = self.solutions.lock().unwrap().get(&key).cloned();
        let sol = match cached {
            Some(s) => s,
            None => {
                let mut rhs = vec![0i64; d];
                for &q in cols {
                    rhs[q] = 1;
                }
                let s = Arc::new(self.solver.solve(&rhs).ok_or(Error::SolverDiverged { k: self.k, n: self.n })?);
                self.solutions.lock().unwrap().insert(key, s.clone());
                s
            }
        };
        let total: BigInt = rows.iter().map(|&p| &sol.0[p]).sum();
        Ok(BigRational::new(total, sol.1.clone()))
    }
}

type Slot<T> = Arc<OnceLock<Result<Arc<T>>>>;

/// Result of a unitarity contraction: `sum` over the free column index and
/// the value the relation predicts (`delta_ab` times the moment of the word
/// with both letters removed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub sum: BigRational,
    pub reduced: BigRational,
}

impl Contraction {
    pub fn holds(&self) -> bool {
        self.sum == self.reduced
    }
}

/// Moment engine with write-once caches for pairing bases and tables.
#[derive(Debug)]
pub struct Weingarten {
    kmax: usize,
    bases: Mutex<HashMap<PatternKey, Arc<Vec<NcPairing>>>>,
    tables: Mutex<HashMap<TableKey, Slot<WeingartenTable>>>,
    large: Mutex<HashMap<TableKey, Slot<LargeSystem>>>,
}

impl Default for Weingarten {
    fn default() -> Self {
        Self::new(DEFAULT_KMAX)
    }
}

impl Weingarten {
    pub fn new(kmax: usize) -> Self {
        Weingarten {
            kmax,
            bases: Mutex::new(HashMap::new()),
            tables: Mutex::new(HashMap::new()),
            large: Mutex::new(HashMap::new()),
        }
    }

    /// Shared engine with the default `kmax`.
    pub fn global() -> &'static Weingarten {
        static ENGINE: OnceLock<Weingarten> = OnceLock::new();
        ENGINE.get_or_init(Weingarten::default)
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    fn basis(&self, k: usize, pattern: Option<&[Color]>) -> Arc<Vec<NcPairing>> {
        let key = (k, pattern.map(|p| p.to_vec()));
        if let Some(b) = self.bases.lock().unwrap().get(&key) {
            return b.clone();
        }
        let basis = Arc::new(match pattern {
            Some(p) => pairings::enumerate_colored_nc_pairings(p).into_iter().map(|c| c.base).collect(),
            None => pairings::enumerate_nc_pairings(k),
        });
        self.bases.lock().unwrap().entry(key).or_insert(basis).clone()
    }

    fn check_size(&self, k: usize, n: u32, pattern: Option<&[Color]>) -> Result<()> {
        if k > self.kmax {
            let table_size = match pattern {
                Some(p) => count_colored(p),
                None => catalan(k / 2),
            };
            return Err(Error::Resource {
                k,
                n,
                table_size,
                kmax: self.kmax,
            });
        }
        Ok(())
    }

    /// Exact Weingarten table for `k` points at dimension `N`, optionally for
    /// a color pattern. Memoized per `(k, N, pattern)`.
    pub fn table(&self, k: usize, n: u32, pattern: Option<&[Color]>) -> Result<Arc<WeingartenTable>> {
        if n < 2 {
            return Err(Error::InvalidDimension { n, min: 2 });
        }
        if k % 2 == 1 {
            return Err(Error::OddOrder { k });
        }
        if let Some(p) = pattern {
            if p.len() != k {
                return Err(Error::LengthMismatch { left: k, right: p.len() });
            }
        }
        self.check_size(k, n, pattern)?;
        let key = (k, n, pattern.map(|p| p.to_vec()));
        let slot = self.tables.lock().unwrap().entry(key).or_default().clone();
        slot.get_or_init(|| {
            let basis = self.basis(k, pattern);
            if basis.len() > DENSE_LIMIT {
                warn!(
                    "building a dense {0}x{0} Weingarten table (k = {k}, N = {n}); this is slow",
                    basis.len()
                );
            }
            let gram = pairings::gram_from_basis(k, n, pattern.map(|p| p.to_vec()), (*basis).clone());
            WeingartenTable::build(gram).map(Arc::new)
        })
        .clone()
    }

    fn large_system(&self, k: usize, n: u32, pattern: Option<&[Color]>) -> Result<Arc<LargeSystem>> {
        let key = (k, n, pattern.map(|p| p.to_vec()));
        let slot = self.large.lock().unwrap().entry(key).or_default().clone();
        slot.get_or_init(|| {
            let basis = self.basis(k, pattern);
            let gram = pairings::gram_from_basis(k, n, pattern.map(|p| p.to_vec()), (*basis).clone());
            let entries = gram
                .entries_i64()
                .ok_or_else(|| Error::InvalidArgument(format!("Gram entries overflow i64 at k = {k}, N = {n}")))?;
            let solver = ExactSolver::new(entries, gram.dim()).ok_or(Error::Singular { k, n })?;
            Ok(Arc::new(LargeSystem {
                k,
                n,
                solver,
                solutions: Mutex::new(HashMap::new()),
            }))
        })
        .clone()
    }

    /// Exact Haar state of a generator word at dimension `N`.
    pub fn haar_moment(&self, word: &GeneratorWord, n: u32) -> Result<BigRational> {
        if n < 2 {
            return Err(Error::InvalidDimension { n, min: 2 });
        }
        for l in word.letters() {
            for index in [l.row, l.col] {
                if index > n {
                    return Err(Error::InvalidIndex { index, n });
                }
            }
        }
        let k = word.len();
        if k == 0 {
            return Ok(BigRational::one());
        }
        if k % 2 == 1 {
            return Ok(BigRational::zero());
        }
        let pattern = word.pattern();
        if let Some(p) = &pattern {
            let ones = p.iter().filter(|&&c| c == Color::One).count();
            if 2 * ones != k {
                return Ok(BigRational::zero());
            }
        }
        self.check_size(k, n, pattern.as_deref())?;
        let basis = self.basis(k, pattern.as_deref());
        let rows: Vec<u32> = word.letters().iter().map(|l| l.row).collect();
        let cols: Vec<u32> = word.letters().iter().map(|l| l.col).collect();
        let a: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].respects(&rows)).collect();
        if a.is_empty() {
            return Ok(BigRational::zero());
        }
        let b: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].respects(&cols)).collect();
        if b.is_empty() {
            return Ok(BigRational::zero());
        }
        if basis.len() <= DENSE_LIMIT {
            Ok(self.table(k, n, pattern.as_deref())?.block_sum(&a, &b))
        } else {
            self.large_system(k, n, pattern.as_deref())?.block_sum(&a, &b)
        }
    }

    /// Sums the moment over the free column index `j = 1..N` of the adjacent
    /// letters at `position` and `position + 1`, which get column `j`.
    pub fn unitarity_contraction(&self, word: &GeneratorWord, n: u32, position: usize) -> Result<Contraction> {
        let len = word.len();
        if position + 1 >= len {
            return Err(Error::InvalidPosition { position, len });
        }
        let (x, y) = (word.letters()[position], word.letters()[position + 1]);
        if word.model() == Model::Unitary && x.color == y.color {
            return Err(Error::InvalidArgument(
                "unitary contraction needs a generator next to an adjoint".into(),
            ));
        }
        let mut sum = BigRational::zero();
        let mut letters = word.letters().to_vec();
        for j in 1..=n {
            letters[position].col = j;
            letters[position + 1].col = j;
            let w = GeneratorWord::new(letters.clone(), word.model())?;
            sum += self.haar_moment(&w, n)?;
        }
        let reduced = if x.row == y.row {
            let mut rest = word.letters().to_vec();
            rest.drain(position..position + 2);
            self.haar_moment(&GeneratorWord::new(rest, word.model())?, n)?
        } else {
            if x.row > n || y.row > n {
                return Err(Error::InvalidIndex { index: x.row.max(y.row), n });
            }
            BigRational::zero()
        };
        Ok(Contraction { sum, reduced })
    }
}

pub(crate) fn catalan(m: usize) -> usize {
    let mut c = vec![1usize; m + 1];
    for i in 1..=m {
        c[i] = (0..i).fold(0usize, |acc, j| acc.saturating_add(c[j].saturating_mul(c[i - 1 - j])));
    }
    c[m]
}

/// Number of colored NC pairings of a pattern, by interval dynamic programming.
pub(crate) fn count_colored(pattern: &[Color]) -> usize {
    let k = pattern.len();
    if k % 2 == 1 {
        return 0;
    }
    // c[i][j]: pairings of pattern[i..j]
    let mut c = vec![vec![0usize; k + 1]; k + 1];
    for i in 0..=k {
        c[i][i] = 1;
    }
    for len in (2..=k).step_by(2) {
        for i in 0..=k - len {
            let j = i + len;
            let mut total = 0usize;
            for m in (i + 1..j).step_by(2) {
                if pattern[i] != pattern[m] {
                    total = total.saturating_add(c[i + 1][m].saturating_mul(c[m + 1][j]));
                }
            }
            c[i][j] = total;
        }
    }
    c[0][k]
}

/// [`Weingarten::table`] on the shared engine.
pub fn weingarten_table(k: usize, n: u32, pattern: Option<&[Color]>) -> Result<Arc<WeingartenTable>> {
    Weingarten::global().table(k, n, pattern)
}

/// [`Weingarten::haar_moment`] on the shared engine.
pub fn haar_moment(word: &GeneratorWord, n: u32) -> Result<BigRational> {
    Weingarten::global().haar_moment(word, n)
}

/// [`Weingarten::unitarity_contraction`] on the shared engine.
pub fn unitarity_contraction(word: &GeneratorWord, n: u32, position: usize) -> Result<Contraction> {
    Weingarten::global().unitarity_contraction(word, n, position)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ow(ix: &[(u32, u32)]) -> GeneratorWord {
        GeneratorWord::orthogonal(ix).unwrap()
    }

    #[test]
    fn small_tables() {
        let t = weingarten_table(2, 5, None).unwrap();
        assert_eq!(t.matrix(), vec![q(1, 5)]);
        let t = weingarten_table(4, 3, None).unwrap();
        assert_eq!(t.matrix(), vec![q(9, 72), q(-3, 72), q(-3, 72), q(9, 72)]);
        assert!(t.verify_inverse());
        assert!(matches!(weingarten_table(3, 3, None), Err(Error::OddOrder { k: 3 })));
    }

    #[test]
    fn closed_form_moments() {
        for n in 2..=10u32 {
            let n_i = n as i64;
            assert_eq!(haar_moment(&ow(&[(1, 1), (1, 1)]), n).unwrap(), q(1, n_i));
            assert_eq!(haar_moment(&ow(&[(1, 1), (1, 2)]), n).unwrap(), BigRational::zero());
            assert_eq!(haar_moment(&ow(&[(1, 1); 4]), n).unwrap(), q(2, n_i * (n_i + 1)));
        }
    }

    #[test]
    fn diagonal_delta_pattern() {
        // Indices 1,2,1,2 admit no NC pairing; 1,2,2,1 admit only the nested
        // pairing on both sides, giving W(p2, p2) = N^2 / (N^4 - N^2).
        let n = 5u32;
        assert_eq!(haar_moment(&ow(&[(1, 1), (2, 2), (1, 1), (2, 2)]), n).unwrap(), BigRational::zero());
        let nn = (n * n) as i64;
        let expect = q(nn, nn * nn - nn);
        assert_eq!(haar_moment(&ow(&[(1, 1), (2, 2), (2, 2), (1, 1)]), n).unwrap(), expect);
    }

    #[test]
    fn contraction_examples() {
        let n = 4;
        let c = unitarity_contraction(&ow(&[(1, 1), (1, 1)]), n, 0).unwrap();
        assert_eq!(c.sum, BigRational::one());
        assert!(c.holds());
        let c = unitarity_contraction(&ow(&[(1, 1), (2, 1)]), n, 0).unwrap();
        assert_eq!(c.sum, BigRational::zero());
        let c = unitarity_contraction(&ow(&[(1, 1), (1, 1), (1, 1), (1, 1)]), n, 2).unwrap();
        assert_eq!(c.sum, q(1, 4));
        assert!(c.holds());
        assert!(matches!(
            unitarity_contraction(&ow(&[(1, 1)]), n, 0),
            Err(Error::InvalidPosition { .. })
        ));
    }

    #[test]
    fn unitary_moments() {
        let w = GeneratorWord::new(vec![Letter::new(1, 1), Letter::star(1, 1)], Model::Unitary).unwrap();
        assert_eq!(haar_moment(&w, 3).unwrap(), q(1, 3));
        let w = GeneratorWord::new(vec![Letter::new(1, 1), Letter::new(1, 1)], Model::Unitary).unwrap();
        assert_eq!(haar_moment(&w, 3).unwrap(), BigRational::zero());
        let bad = GeneratorWord::new(vec![Letter::star(1, 1)], Model::Orthogonal);
        assert!(bad.is_err());
    }

    #[test]
    fn index_above_dimension() {
        assert_eq!(
            haar_moment(&ow(&[(1, 4), (1, 4)]), 3).unwrap_err(),
            Error::InvalidIndex { index: 4, n: 3 }
        );
    }

    #[test]
    fn kmax_is_enforced() {
        let engine = Weingarten::new(4);
        let w = ow(&[(1, 1); 6]);
        assert_eq!(
            engine.haar_moment(&w, 3).unwrap_err(),
            Error::Resource {
                k: 6,
                n: 3,
                table_size: 5,
                kmax: 4
            }
        );
    }

    #[test]
    fn colored_counts() {
        use Color::*;
        assert_eq!(count_colored(&[One, Star, One, Star]), 2);
        assert_eq!(count_colored(&[One, One, Star, Star]), 1);
        assert_eq!(count_colored(&[One, One]), 0);
    }
}
