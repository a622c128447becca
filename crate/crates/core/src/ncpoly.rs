//! Noncommutative *-polynomials in the generator letters.
//!
//! Coefficients are exact Gaussian rationals. A polynomial can carry the
//! normalization `X_ij -> sqrt(N) u_ij` symbolically: when `scale = Some(N)`
//! every word `w` implicitly carries the factor `N^{|w|/2}`. Since only words
//! of even length have nonzero moments, every state value stays an exact
//! rational.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freelimit;
use crate::interval::Bracket;
use crate::pairings::Color;
use crate::qnum::DEFAULT_PRECISION_BITS;
use crate::weingarten::{self, GeneratorWord, Letter, Model, Weingarten};

/// Exact complex rational `re + im * i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(BigRational::from_integer(v.into()))
    }

    pub fn i() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussRational {
            re: &self.re * r,
            im: &self.im * r,
        }
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-&self.re, -&self.im)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -&self.im)
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

/// Which state a polynomial is evaluated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum State {
    /// Haar state of `O_N^+` / `U_N^+` at dimension `N`.
    Haar(u32),
    /// Free semicircular (orthogonal model) or free circular (unitary model) limit.
    FreeLimit,
}

impl From<Option<u32>> for State {
    fn from(n: Option<u32>) -> Self {
        match n {
            Some(n) => State::Haar(n),
            None => State::FreeLimit,
        }
    }
}

/// Finite linear combination of generator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcPolynomial {
    model: Model,
    terms: BTreeMap<Vec<Letter>, GaussRational>,
    scale: Option<u32>,
}

impl NcPolynomial {
    pub fn zero(model: Model) -> Self {
        NcPolynomial {
            model,
            terms: BTreeMap::new(),
            scale: None,
        }
    }

    pub fn one(model: Model) -> Self {
        Self::constant(model, GaussRational::one())
    }

    pub fn constant(model: Model, c: GaussRational) -> Self {
        let mut p = Self::zero(model);
        p.insert(Vec::new(), c);
        p
    }

    /// Single letter `x[i,j]` (or `v[i,j]` / `v*[i,j]` in the unitary model).
    pub fn letter(model: Model, letter: Letter) -> Result<Self> {
        Self::monomial(model, vec![letter], GaussRational::one())
    }

    pub fn monomial(model: Model, letters: Vec<Letter>, coef: GaussRational) -> Result<Self> {
        let w = GeneratorWord::new(letters, model)?;
        let mut p = Self::zero(model);
        p.insert(w.letters().to_vec(), coef);
        Ok(p)
    }

    pub fn parse(text: &str, model: Model) -> Result<Self> {
        Parser::new(text, model).parse()
    }

    fn insert(&mut self, word: Vec<Letter>, coef: GaussRational) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(word.clone()).or_insert_with(GaussRational::zero);
        *entry = &*entry + &coef;
        if entry.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// `Some(N)` when the `sqrt(N)` normalization is attached.
    pub fn scale(&self) -> Option<u32> {
        self.scale
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Letter], &GaussRational)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest word length; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Exponent of `sqrt(N)` carried by a word under the attached normalization.
    pub fn half_power(&self, word: &[Letter]) -> Option<(u32, usize)> {
        self.scale.map(|n| (n, word.len()))
    }

    fn compatible(&self, other: &NcPolynomial) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch(format!("{:?} vs {:?}", self.model, other.model)));
        }
        if self.scale != other.scale && !(self.is_scalar() || other.is_scalar()) {
            return Err(Error::ModelMismatch("polynomials carry different normalizations".into()));
        }
        Ok(())
    }

    fn is_scalar(&self) -> bool {
        self.terms.keys().all(Vec::is_empty)
    }

    fn merged_scale(&self, other: &NcPolynomial) -> Option<u32> {
        self.scale.or(other.scale)
    }

    pub fn add(&self, other: &NcPolynomial) -> Result<NcPolynomial> {
        self.compatible(other)?;
        let mut out = self.clone();
        out.scale = self.merged_scale(other);
        for (w, c) in &other.terms {
            out.insert(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPolynomial) -> Result<NcPolynomial> {
        self.add(&other.scale_by(&GaussRational::from_int(-1)))
    }

    pub fn scale_by(&self, c: &GaussRational) -> NcPolynomial {
        let mut out = NcPolynomial {
            model: self.model,
            terms: BTreeMap::new(),
            scale: self.scale,
        };
        for (w, v) in &self.terms {
            out.insert(w.clone(), v * c);
        }
        out
    }

    /// Word-concatenation product, extended bilinearly.
    pub fn mul(&self, other: &NcPolynomial) -> Result<NcPolynomial> {
        self.compatible(other)?;
        let mut out = NcPolynomial {
            model: self.model,
            terms: BTreeMap::new(),
            scale: self.merged_scale(other),
        };
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.insert(w, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, m: u32) -> Result<NcPolynomial> {
        let mut out = NcPolynomial {
            scale: self.scale,
            ..NcPolynomial::one(self.model)
        };
        for _ in 0..m {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Reverses words, flips colors (unitary model) and conjugates coefficients.
    pub fn adjoint(&self) -> NcPolynomial {
        let mut out = NcPolynomial {
            model: self.model,
            terms: BTreeMap::new(),
            scale: self.scale,
        };
        for (w, c) in &self.terms {
            let word = GeneratorWord::new(w.clone(), self.model).expect("stored words are valid");
            out.insert(word.adjoint().letters().to_vec(), c.conj());
        }
        out
    }

    /// Substitutes `X_ij -> sqrt(N) u_ij` and `X_ij -> 0` when `i > N` or `j > N`.
    /// An existing normalization is replaced.
    pub fn scaled_generators(&self, n: u32) -> NcPolynomial {
        let mut out = NcPolynomial {
            model: self.model,
            terms: BTreeMap::new(),
            scale: Some(n),
        };
        for (w, c) in &self.terms {
            if w.iter().all(|l| l.row <= n && l.col <= n) {
                out.insert(w.clone(), c.clone());
            }
        }
        out
    }

    /// Drops the attached normalization, keeping words and coefficients.
    pub fn unscaled(&self) -> NcPolynomial {
        NcPolynomial {
            scale: None,
            ..self.clone()
        }
    }

    fn word_value(&self, engine: &Weingarten, word: &[Letter], state: State) -> Result<BigRational> {
        match state {
            State::Haar(n) => {
                if word.len() % 2 == 1 {
                    return Ok(BigRational::zero());
                }
                let w = GeneratorWord::new(word.to_vec(), self.model)?;
                let h = engine.haar_moment(&w, n)?;
                Ok(match self.scale {
                    Some(_) => h * BigRational::from_integer(BigInt::from(n).pow(word.len() as u32 / 2)),
                    None => h,
                })
            }
            State::FreeLimit => {
                let count = match self.model {
                    Model::Orthogonal => freelimit::semicircular_moment(word),
                    Model::Unitary => freelimit::circular_moment(word),
                };
                Ok(BigRational::from_integer(BigInt::from(count)))
            }
        }
    }

    /// Linear extension of the chosen state over the terms, with an explicit engine.
    pub fn state_eval_with(&self, engine: &Weingarten, state: impl Into<State>) -> Result<GaussRational> {
        let state = state.into();
        match state {
            State::Haar(n) => {
                if let Some(m) = self.scale {
                    if m != n && !self.is_scalar() {
                        return Err(Error::ModelMismatch(format!(
                            "polynomial normalized at N = {m} evaluated at N = {n}"
                        )));
                    }
                }
            }
            State::FreeLimit => {
                if self.scale.is_some() && !self.is_scalar() {
                    return Err(Error::ModelMismatch(
                        "the free limit is evaluated on the unnormalized polynomial".into(),
                    ));
                }
            }
        }
        let terms: Vec<(&Vec<Letter>, &GaussRational)> = self.terms.iter().collect();
        let values: Vec<Result<GaussRational>> = terms
            .par_iter()
            .map(|(w, c)| Ok(c.scale(&self.word_value(engine, w, state)?)))
            .collect();
        let mut total = GaussRational::zero();
        for v in values {
            total = &total + &v?;
        }
        Ok(total)
    }

    /// State value on the shared engine; `None` selects the free limit.
    pub fn state_eval(&self, n: Option<u32>) -> Result<GaussRational> {
        self.state_eval_with(Weingarten::global(), n)
    }
}

/// `||a||_p = state((a* a)^{p/2})^{1/p}`: the exact moment and its root.
#[derive(Clone, Debug)]
pub struct LpNorm {
    pub p: u32,
    pub moment: BigRational,
    pub value: Bracket,
}

/// [`lp_norm`] with an explicit engine and working precision.
pub fn lp_norm_with(engine: &Weingarten, a: &NcPolynomial, p: u32, n: Option<u32>, bits: u32) -> Result<LpNorm> {
    if p < 2 || p % 2 == 1 {
        return Err(Error::InvalidArgument(format!("p = {p} must be an even integer >= 2")));
    }
    let m = p / 2;
    let k = 2 * a.degree() * m as usize;
    if let Some(n) = n {
        if k > engine.kmax() {
            let table_size = weingarten::catalan(k / 2);
            return Err(Error::Resource {
                k,
                n,
                table_size,
                kmax: engine.kmax(),
            });
        }
    }
    let power = a.adjoint().mul(a)?.pow(m)?;
    let moment = power.state_eval_with(engine, n)?;
    if !moment.is_real() || moment.re.is_negative() {
        return Err(Error::InvalidArgument(format!("state of (a* a)^{m} is not a non-negative real: {moment}")));
    }
    let value = Bracket::from_ratio(&moment.re, bits).nth_root(p);
    Ok(LpNorm {
        p,
        moment: moment.re,
        value,
    })
}

/// `L^p` norm under the Haar state at `N` (or the free limit for `None`).
pub fn lp_norm(a: &NcPolynomial, p: u32, n: Option<u32>) -> Result<LpNorm> {
    lp_norm_with(Weingarten::global(), a, p, n, DEFAULT_PRECISION_BITS + 32)
}

/// Free-function form of [`NcPolynomial::mul`].
pub fn poly_mul(a: &NcPolynomial, b: &NcPolynomial) -> Result<NcPolynomial> {
    a.mul(b)
}

/// Free-function form of [`NcPolynomial::adjoint`].
pub fn poly_adjoint(a: &NcPolynomial) -> NcPolynomial {
    a.adjoint()
}

/// Free-function form of [`NcPolynomial::state_eval`].
pub fn state_eval(a: &NcPolynomial, n: Option<u32>) -> Result<GaussRational> {
    a.state_eval(n)
}

/// Free-function form of [`NcPolynomial::scaled_generators`].
pub fn scaled_generators(p: &NcPolynomial, n: u32) -> NcPolynomial {
    p.scaled_generators(n)
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let word = GeneratorWord::new(w.clone(), self.model).expect("stored words are valid");
            let (negative, coef) = if c.is_real() && c.re.is_negative() {
                (true, GaussRational::real(-&c.re))
            } else {
                (false, c.clone())
            };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            first = false;
            let coef_text = if coef.is_real() {
                coef.to_string()
            } else {
                format!("({coef})")
            };
            if w.is_empty() {
                write!(f, "{coef_text}")?;
            } else if coef == GaussRational::one() {
                write!(f, "{word}")?;
            } else {
                write!(f, "{coef_text}*{word}")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    model: Model,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, model: Model) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            model,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn parse(mut self) -> Result<NcPolynomial> {
        let p = self.poly()?;
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(p)
    }

    fn poly(&mut self) -> Result<NcPolynomial> {
        let mut sign = 1;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?.scale_by(&GaussRational::from_int(sign));
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<NcPolynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn index(&mut self) -> Result<u32> {
        let v = self.integer()?;
        match u32::try_from(v) {
            Ok(i) if i >= 1 => Ok(i),
            _ => self.err("indices must be integers >= 1"),
        }
    }

    fn factor(&mut self) -> Result<NcPolynomial> {
        let base = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut value = BigRational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return self.err("zero denominator");
                    }
                    value /= BigRational::from_integer(den);
                }
                let coef = if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    GaussRational::new(BigRational::zero(), value)
                } else {
                    GaussRational::real(value)
                };
                NcPolynomial::constant(self.model, coef)
            }
            Some(b'i') => {
                self.pos += 1;
                NcPolynomial::constant(self.model, GaussRational::i())
            }
            Some(b'x') | Some(b'v') => {
                let head = self.src[self.pos];
                self.pos += 1;
                let mut color = Color::One;
                if head == b'v' && self.peek() == Some(b'*') {
                    let save = self.pos;
                    self.pos += 1;
                    if self.peek() == Some(b'[') {
                        color = Color::Star;
                    } else {
                        self.pos = save;
                    }
                }
                self.expect(b'[')?;
                let row = self.index()?;
                self.expect(b',')?;
                let col = self.index()?;
                self.expect(b']')?;
                if color == Color::Star && self.model == Model::Orthogonal {
                    return self.err("adjoint letter v* in the orthogonal model");
                }
                NcPolynomial::letter(self.model, Letter { row, col, color })?
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.poly()?;
                self.expect(b')')?;
                inner
            }
            Some(c) => return self.err(format!("unexpected character {:?}", c as char)),
            None => return self.err("unexpected end of input"),
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            let e = u32::try_from(e).or_else(|_| self.err("exponent too large"))?;
            return base.pow(e);
        }
        Ok(base)
    }
}
