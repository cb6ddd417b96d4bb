//! Exact Laurent polynomials in `d` variables over the integers, and
//! determinants of square matrices with Laurent polynomial entries.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent `s` of a monomial `x^s = x1^s1 * ... * xd^sd`.
///
/// Ordered lexicographically, which is also the iteration order of terms in
/// a [`LaurentPoly`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(components: Vec<i64>) -> Self {
        ExponentVector(components)
    }

    pub fn zero(dim: usize) -> Self {
        ExponentVector(vec![0; dim])
    }

    /// Unit vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        ExponentVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        ExponentVector(self.0.iter().map(|c| c * k).collect())
    }

    /// Total degree `s1 + ... + sd`.
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

/// Element of `Z[x1^±1, ..., xd^±1]` in canonical form: no stored zero
/// coefficients, terms keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, BigInt::one())
    }

    pub fn constant(dim: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(ExponentVector::zero(dim), c)
    }

    pub fn monomial(exp: ExponentVector, c: impl Into<BigInt>) -> Self {
        let dim = exp.dim();
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { dim, terms }
    }

    /// The variable `x_i` (zero-based index).
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(ExponentVector::unit(dim, i), 1)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, combining
    /// repeated exponents.
    pub fn from_terms<I, C>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, C)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            p.add_term(e, c.into());
        }
        Ok(p)
    }

    /// Univariate polynomial `sum c_k x^(lowest + k)`.
    pub fn from_univariate(lowest: i64, coeffs: &[i64]) -> Self {
        let mut p = LaurentPoly::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(ExponentVector(vec![lowest + k as i64]), BigInt::from(c));
        }
        p
    }

    pub(crate) fn add_term(&mut self, exp: ExponentVector, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &ExponentVector) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&ExponentVector::zero(self.dim))
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&ExponentVector, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Lexicographically smallest term.
    pub fn trailing_term(&self) -> Option<(&ExponentVector, &BigInt)> {
        self.terms.iter().next()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut acc: HashMap<ExponentVector, BigInt> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *acc.entry(ea.add(eb)).or_default() += ca * cb;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(LaurentPoly {
            dim: self.dim,
            terms,
        })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return LaurentPoly::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    /// Multiplication by the monomial `x^s`.
    pub fn shift(&self, s: &ExponentVector) -> Self {
        assert_eq!(s.dim(), self.dim, "shift dimension mismatch");
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(s), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = LaurentPoly::one(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Substitutes `x_i -> x_i^-1` for every variable.
    pub fn involute(&self) -> Self {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.neg(), c.clone()))
                .collect(),
        }
    }

    pub fn is_palindromic(&self) -> bool {
        self.involute() == *self
    }

    /// Monomial change of variables `x_i -> x^(images[i])`.
    pub fn substitute_monomials(&self, images: &[ExponentVector]) -> Result<Self> {
        if images.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: images.len(),
            });
        }
        let target = images.first().map_or(0, |e| e.dim());
        if images.iter().any(|e| e.dim() != target) {
            return Err(Error::InvalidArgument(
                "monomial images have differing dimensions".into(),
            ));
        }
        let mut out = LaurentPoly::zero(target);
        for (e, c) in &self.terms {
            let mut img = ExponentVector::zero(target);
            for (k, &s) in e.components().iter().enumerate() {
                img = img.add(&images[k].scale(s));
            }
            out.add_term(img, c.clone());
        }
        Ok(out)
    }

    /// Sum of coefficients, i.e. the value at `x = (1, ..., 1)`.
    pub fn eval_ones(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Value at `(e^{2 pi i theta_1}, ..., e^{2 pi i theta_d})` in double
    /// precision. Absolute error is O(#terms * max|coeff| * eps).
    pub fn eval_unit_torus(&self, angles: &[f64]) -> Complex64 {
        assert_eq!(angles.len(), self.dim, "angle count must equal dimension");
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let phase: f64 = e
                .components()
                .iter()
                .zip(angles)
                .map(|(&s, &t)| s as f64 * t)
                .sum();
            let turn = phase.rem_euclid(1.0) * std::f64::consts::TAU;
            acc += Complex64::from_polar(big_to_f64(c), turn);
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// Sum of absolute values of the coefficients (as a float).
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| big_to_f64(c).abs()).sum()
    }

    /// Exact quotient `self / divisor`. Fails with an error when the division
    /// is not exact in `Z[x^±1]`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        self.check_dim(divisor)?;
        if divisor.is_zero() {
            return Err(Error::InvalidArgument("division by zero polynomial".into()));
        }
        let mut quotient = LaurentPoly::zero(self.dim);
        if self.is_zero() {
            return Ok(quotient);
        }
        let (lead_e, lead_c) = divisor.leading_term().expect("nonzero divisor");
        let (lead_e, lead_c) = (lead_e.clone(), lead_c.clone());
        let (trail_e, _) = divisor.trailing_term().expect("nonzero divisor");
        // Lex order is a group order on Z^d, so the smallest term of a product
        // is the product of smallest terms. Any quotient term must therefore
        // lie at or above this floor.
        let floor = self.trailing_term().unwrap().0.sub(trail_e);
        let mut rem = self.clone();
        while let Some((e, c)) = rem.leading_term() {
            let qe = e.sub(&lead_e);
            let (qc, r) = c.div_rem(&lead_c);
            if qe < floor || !r.is_zero() {
                return Err(Error::Internal(format!(
                    "inexact Laurent division of {self} by {divisor}"
                )));
            }
            for (de, dc) in divisor.terms() {
                rem.add_term(de.add(&qe), -(dc * &qc));
            }
            quotient.add_term(qe, qc);
        }
        Ok(quotient)
    }

    /// Representative of `self * (±x^s)`: every variable's minimal exponent
    /// is zero and the lexicographically smallest term is positive.
    pub fn unit_normalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut mins = vec![i64::MAX; self.dim];
        for e in self.terms.keys() {
            for (m, &s) in mins.iter_mut().zip(e.components()) {
                *m = (*m).min(s);
            }
        }
        let shift = ExponentVector(mins).neg();
        let shifted = self.shift(&shift);
        if shifted.trailing_term().unwrap().1.is_negative() {
            -&shifted
        } else {
            shifted
        }
    }

    /// Whether `self = ±x^s * other` for some monomial `x^s`.
    pub fn associated(&self, other: &Self) -> bool {
        self.dim == other.dim && self.unit_normalize() == other.unit_normalize()
    }

    /// For `d = 1`: the lowest exponent and the dense coefficient list of the
    /// ordinary polynomial `x^-lowest * self`, lowest degree first.
    pub fn to_dense_univariate(&self) -> Option<(i64, Vec<BigInt>)> {
        if self.dim != 1 || self.is_zero() {
            return None;
        }
        let lo = self.trailing_term().unwrap().0.components()[0];
        let hi = self.leading_term().unwrap().0.components()[0];
        let mut v = vec![BigInt::zero(); (hi - lo) as usize + 1];
        for (e, c) in &self.terms {
            v[(e.components()[0] - lo) as usize] = c.clone();
        }
        Some((lo, v))
    }

    /// Parses with a fixed ambient dimension.
    pub fn parse_with_dim(s: &str, dim: usize) -> Result<Self> {
        let parsed = parse_terms(s)?;
        build_parsed(parsed, Some(dim))
    }
}

pub(crate) fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(if c.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(c: &BigInt) -> f64 {
    let bits = c.bits();
    if bits < 1000 {
        big_to_f64(c).abs().ln()
    } else {
        let drop = bits - 900;
        let top: BigInt = c.abs() >> drop;
        big_to_f64(&top).ln() + drop as f64 * std::f64::consts::LN_2
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs)
            .expect("Laurent polynomial dimension mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs)
            .expect("Laurent polynomial dimension mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs)
            .expect("Laurent polynomial dimension mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

fn fmt_monomial(e: &ExponentVector) -> String {
    let d = e.dim();
    e.components()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s != 0)
        .map(|(i, s)| {
            if d == 1 {
                format!("x^{s}")
            } else {
                format!("x{}^{s}", i + 1)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Terms in descending lexicographic order, e.g. `9*x^1 - 18 + 9*x^-1`;
/// variables are `x` for `d = 1` and `x1, ..., xd` otherwise.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", fmt_monomial(e))?;
            } else {
                write!(f, "{mag}*{}", fmt_monomial(e))?;
            }
        }
        Ok(())
    }
}

struct ParsedTerm {
    coeff: BigInt,
    // (zero-based variable index, exponent)
    powers: Vec<(usize, i64)>,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let d = self.digits().ok_or_else(|| self.err("expected exponent"))?;
        let v: i64 = d.parse().map_err(|_| self.err("exponent out of range"))?;
        if paren {
            if self.peek() != Some(b')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
        }
        Ok(if neg { -v } else { v })
    }

    fn factor(&mut self, term: &mut ParsedTerm) -> Result<()> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().unwrap();
                let v: BigInt = d.parse().map_err(|_| self.err("bad integer"))?;
                term.coeff *= v;
                Ok(())
            }
            Some(c @ (b'x' | b'y' | b'z')) => {
                self.pos += 1;
                let mut idx = match c {
                    b'x' => 0,
                    b'y' => 1,
                    _ => 2,
                };
                if c == b'x' {
                    if let Some(d) = self.digits() {
                        let k: usize = d.parse().map_err(|_| self.err("bad variable index"))?;
                        if k == 0 {
                            return Err(self.err("variable indices start at 1"));
                        }
                        idx = k - 1;
                    }
                }
                let exp = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.exponent()?
                } else {
                    1
                };
                term.powers.push((idx, exp));
                Ok(())
            }
            _ => Err(self.err("expected number or variable")),
        }
    }
}

fn parse_terms(s: &str) -> Result<Vec<ParsedTerm>> {
    let mut lx = Lexer {
        s: s.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    let mut first = true;
    while lx.peek().is_some() {
        let mut negative = false;
        match lx.peek() {
            Some(b'+') => lx.pos += 1,
            Some(b'-') => {
                negative = true;
                lx.pos += 1
            }
            _ if first => {}
            _ => return Err(lx.err("expected '+' or '-'")),
        }
        first = false;
        let mut term = ParsedTerm {
            coeff: BigInt::one(),
            powers: Vec::new(),
        };
        lx.factor(&mut term)?;
        loop {
            match lx.peek() {
                Some(b'*') => {
                    lx.pos += 1;
                    lx.factor(&mut term)?;
                }
                // implicit product such as `9x`
                Some(b'x' | b'y' | b'z') => lx.factor(&mut term)?,
                _ => break,
            }
        }
        if negative {
            term.coeff = -term.coeff;
        }
        out.push(term);
    }
    if first {
        return Err(Error::Parse("empty polynomial".into()));
    }
    Ok(out)
}

fn build_parsed(terms: Vec<ParsedTerm>, dim: Option<usize>) -> Result<LaurentPoly> {
    let needed = terms
        .iter()
        .flat_map(|t| t.powers.iter().map(|(i, _)| i + 1))
        .max()
        .unwrap_or(0);
    let dim = match dim {
        Some(d) if needed > d => {
            return Err(Error::Parse(format!(
                "variable x{needed} exceeds dimension {d}"
            )))
        }
        Some(d) => d,
        None => needed,
    };
    let mut p = LaurentPoly::zero(dim);
    for t in terms {
        let mut e = vec![0i64; dim];
        for (i, s) in t.powers {
            e[i] += s;
        }
        p.add_term(ExponentVector(e), t.coeff);
    }
    Ok(p)
}

/// Parses the rendering grammar; the dimension is the largest variable index
/// used (`x`, `y`, `z` are aliases of `x1`, `x2`, `x3`).
impl FromStr for LaurentPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        build_parsed(parse_terms(s)?, None)
    }
}

/// Square matrix over `Z[x1^±1, ..., xd^±1]`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    n: usize,
    dim: usize,
    entries: Vec<LaurentPoly>,
}

/// Matrices up to this size use memoized cofactor expansion.
pub const COFACTOR_MAX: usize = 6;

impl LaurentMatrix {
    pub fn zeros(n: usize, dim: usize) -> Self {
        LaurentMatrix {
            n,
            dim,
            entries: vec![LaurentPoly::zero(dim); n * n],
        }
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::InvalidArgument("matrix is not square".into()));
            }
            for p in row {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: p.dim(),
                    });
                }
                entries.push(p);
            }
        }
        Ok(LaurentMatrix { n, dim, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        assert_eq!(p.dim(), self.dim);
        self.entries[i * self.n + j] = p;
    }

    pub(crate) fn add_monomial(&mut self, i: usize, j: usize, exp: ExponentVector, c: BigInt) {
        self.entries[i * self.n + j].add_term(exp, c);
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n, self.dim);
        for i in 0..self.n {
            for j in 0..self.n {
                out.entries[j * self.n + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn map_entries(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        LaurentMatrix {
            n: self.n,
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn block_diag(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.n + other.n;
        let mut out = Self::zeros(n, self.dim);
        for i in 0..self.n {
            for j in 0..self.n {
                out.entries[i * n + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                out.entries[(i + self.n) * n + j + self.n] = other.get(i, j).clone();
            }
        }
        Ok(out)
    }

    /// Evaluates every entry at `x = (1, ..., 1)`.
    pub fn eval_ones(&self) -> Vec<Vec<BigInt>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).eval_ones()).collect())
            .collect()
    }

    /// Exact determinant: cofactor expansion up to [`COFACTOR_MAX`], fraction-free
    /// elimination above.
    pub fn det(&self) -> Result<LaurentPoly> {
        if self.n <= COFACTOR_MAX {
            Ok(self.det_cofactor())
        } else {
            self.det_bareiss()
        }
    }

    /// Laplace expansion along rows, memoized over column subsets. Cost is
    /// O(n 2^n) polynomial products.
    pub fn det_cofactor(&self) -> LaurentPoly {
        let n = self.n;
        assert!(n <= 20, "cofactor expansion limited to n <= 20");
        if n == 0 {
            return LaurentPoly::one(self.dim);
        }
        // memo[mask] = det of rows (n - |mask|).. restricted to columns in mask
        let mut memo: HashMap<u32, LaurentPoly> = HashMap::new();
        memo.insert(0, LaurentPoly::one(self.dim));
        for size in 1..=n {
            let row = n - size;
            let masks: Vec<u32> = (0u32..(1 << n))
                .filter(|m| m.count_ones() as usize == size)
                .collect();
            for mask in masks {
                let mut acc = LaurentPoly::zero(self.dim);
                let mut pos = 0;
                for j in 0..n {
                    if mask & (1 << j) == 0 {
                        continue;
                    }
                    let a = self.get(row, j);
                    if !a.is_zero() {
                        let sub = &memo[&(mask & !(1 << j))];
                        if !sub.is_zero() {
                            let t = a * sub;
                            acc = if pos % 2 == 0 { &acc + &t } else { &acc - &t };
                        }
                    }
                    pos += 1;
                }
                memo.insert(mask, acc);
            }
            memo.retain(|m, _| m.count_ones() as usize >= size);
        }
        memo.remove(&((1u32 << n) - 1)).unwrap()
    }

    /// Fraction-free Bareiss elimination. Every division is exact in the
    /// Laurent ring; a failed division is reported as an internal error.
    pub fn det_bareiss(&self) -> Result<LaurentPoly> {
        let n = self.n;
        if n == 0 {
            return Ok(LaurentPoly::one(self.dim));
        }
        let mut a: Vec<Vec<LaurentPoly>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut negate = false;
        let mut prev = LaurentPoly::one(self.dim);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                // Prefer the sparsest nonzero pivot to keep products small.
                let pick = (k + 1..n)
                    .filter(|&i| !a[i][k].is_zero())
                    .min_by_key(|&i| a[i][k].num_terms());
                match pick {
                    Some(i) => {
                        a.swap(i, k);
                        negate = !negate;
                    }
                    None => return Ok(LaurentPoly::zero(self.dim)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev)?;
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if negate { -det } else { det })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn p1(s: &str) -> LaurentPoly {
        LaurentPoly::parse_with_dim(s, 1).unwrap()
    }

    #[test]
    fn products_expand() {
        assert_eq!(p("x - 1") * p("x^-1 - 1"), p("2 - x - x^-1"));
        let a = LaurentPoly::parse_with_dim("2 - x - x^-1", 2).unwrap();
        let b = p("2 - y - y^-1");
        assert_eq!(
            a * b,
            p("4 - 2x - 2x^-1 - 2y - 2y^-1 + x*y + x*y^-1 + x^-1*y + x^-1*y^-1")
        );
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = p1("x");
        let b = LaurentPoly::parse_with_dim("x", 2).unwrap();
        assert!(matches!(
            a.try_add(&b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn involute_examples() {
        assert_eq!(p("x - 2 + x^-1").involute(), p("x - 2 + x^-1"));
        assert_eq!(p("x^2 + 3x").involute(), p("x^-2 + 3x^-1"));
        let d = p("9x - 18 + 9x^-1");
        assert_eq!(d.involute(), d);
    }

    #[test]
    fn torus_evaluation() {
        let g2 = p("4 - x - x^-1 - y - y^-1");
        assert!(g2.eval_unit_torus(&[0.0, 0.0]).norm() < 1e-12);
        assert!((g2.eval_unit_torus(&[0.5, 0.5]) - Complex64::new(8.0, 0.0)).norm() < 1e-12);
        let nine = LaurentPoly::constant(2, 9);
        assert!((nine.eval_unit_torus(&[0.3, 0.77]).re - 9.0).abs() < 1e-15);
    }

    #[test]
    fn display_and_parse() {
        let d = p("9x - 18 + 9x^-1");
        assert_eq!(d.to_string(), "9*x^1 - 18 + 9*x^-1");
        assert_eq!(p(&d.to_string()), d);
        let g = p("4 - x1 - x1^-1 - x2 - x2^-1");
        assert_eq!(g.to_string(), "-x1^1 - x2^1 + 4 - x2^-1 - x1^-1");
        assert_eq!(LaurentPoly::parse_with_dim(&g.to_string(), 2).unwrap(), g);
        assert_eq!(LaurentPoly::zero(1).to_string(), "0");
        assert_eq!(p("x^(-2)*3"), p("3*x^-2"));
        assert!("x^".parse::<LaurentPoly>().is_err());
        assert!("3 4".parse::<LaurentPoly>().is_err());
        assert!(LaurentPoly::parse_with_dim("x2", 1).is_err());
    }

    #[test]
    fn exact_division() {
        let f = p("x^6 - x^5 - x^4 + x^2 + x^-2 - x^-4 - x^-5 + x^-6");
        let q = f.div_exact(&p("x - 2 + x^-1")).unwrap();
        assert_eq!(&q * &p("x - 2 + x^-1"), f);
        assert!(matches!(
            p("x^2 + 1").div_exact(&p("x - 1")),
            Err(Error::Internal(_))
        ));
        assert!(p("2x").div_exact(&p("4")).is_err());
    }

    #[test]
    fn unit_normalization() {
        let f = p("-9x^3 + 18x^2 - 9x");
        assert_eq!(f.unit_normalize(), p("9 - 18x + 9x^2"));
        assert!(f.associated(&p("9x - 18 + 9x^-1")));
        assert!(!f.associated(&p("9x - 17 + 9x^-1")));
    }

    #[test]
    fn determinant_examples() {
        let m = LaurentMatrix::from_rows(1, vec![vec![p("2 - x - x^-1")]]).unwrap();
        assert_eq!(m.det().unwrap(), p("2 - x - x^-1"));
        let m = LaurentMatrix::from_rows(
            1,
            vec![
                vec![p("2 - x - x^-1"), LaurentPoly::zero(1)],
                vec![LaurentPoly::zero(1), LaurentPoly::constant(1, 3)],
            ],
        )
        .unwrap();
        assert_eq!(m.det().unwrap(), p("6 - 3x - 3x^-1"));
        assert_eq!(m.det_bareiss().unwrap(), m.det_cofactor());
    }

    fn arb_poly(dim: usize) -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((prop::collection::vec(-3i64..=3, dim), -9i64..=9), 0..=3).prop_map(
            move |ts| {
                LaurentPoly::from_terms(
                    dim,
                    ts.into_iter().map(|(e, c)| (ExponentVector::new(e), c)),
                )
                .unwrap()
            },
        )
    }

    fn arb_matrix(max_n: usize) -> impl Strategy<Value = LaurentMatrix> {
        (1..=max_n, 1usize..=2).prop_flat_map(|(n, dim)| {
            prop::collection::vec(prop::collection::vec(arb_poly(dim), n), n)
                .prop_map(move |rows| LaurentMatrix::from_rows(dim, rows).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &LaurentPoly::zero(2), a.clone());
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn involution(a in arb_poly(3)) {
            prop_assert_eq!(a.involute().involute(), a);
        }

        #[test]
        fn render_round_trip(a in arb_poly(2)) {
            prop_assert_eq!(LaurentPoly::parse_with_dim(&a.to_string(), 2).unwrap(), a);
        }

        #[test]
        fn evaluation_is_multiplicative(a in arb_poly(2), b in arb_poly(2), t0 in 0.0f64..1.0, t1 in 0.0f64..1.0) {
            let ab = (&a * &b).eval_unit_torus(&[t0, t1]);
            let prod = a.eval_unit_torus(&[t0, t1]) * b.eval_unit_torus(&[t0, t1]);
            let scale = (a.l1_norm() * b.l1_norm()).max(1.0);
            prop_assert!((ab - prod).norm() <= 1e-9 * scale);
        }

        #[test]
        fn product_divides_back(a in arb_poly(2), b in arb_poly(2)) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        }

        #[test]
        fn bareiss_matches_cofactor(m in arb_matrix(6)) {
            prop_assert_eq!(m.det_bareiss().unwrap(), m.det_cofactor());
        }

        #[test]
        fn det_of_involuted_transpose(m in arb_matrix(4)) {
            let t = m.map_entries(|p| p.involute()).transpose();
            prop_assert_eq!(t.det().unwrap(), m.det().unwrap().involute());
        }

        #[test]
        fn block_diagonal_det(a in arb_matrix(3), b in arb_matrix(3)) {
            prop_assume!(a.dim() == b.dim());
            let m = a.block_diag(&b).unwrap();
            prop_assert_eq!(m.det_bareiss().unwrap(), &a.det().unwrap() * &b.det().unwrap());
        }
    }
}
