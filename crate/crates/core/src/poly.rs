//! Sparse multivariate polynomials over arbitrary-precision integers.
//!
//! Terms are kept in a canonical graded-lexicographic order (total degree
//! first, ties broken lexicographically on the exponent vector), which fixes
//! serialization and hashing. Coefficients are `BigInt`, so nothing here ever
//! overflows silently; `shift_scale` in particular blows coefficients up by
//! d^k and must stay exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponent vector with graded-lex ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over ℤ.
///
/// Invariants: no stored zero coefficients; every exponent vector has length
/// `nvars`; iteration order is graded-lex ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars >= 1, "nvars must be at least 1");
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c.into());
        p
    }

    /// The monomial x_i (zero-based index).
    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0u32; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigInt::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Max total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Terms in canonical graded-lex ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(m, c)| (m.0.as_slice(), c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigInt {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Sum of |c| over all terms.
    pub fn coeff_abs_sum(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        assert_eq!(e.len(), self.nvars, "exponent vector length mismatch");
        if c.is_zero() {
            return;
        }
        let key = Monomial(e);
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(self.nvars, 1);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact value of the polynomial at an integer point.
    pub fn evaluate(&self, x: &[BigInt]) -> Result<BigInt> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &ei) in x.iter().zip(&m.0) {
                if ei > 0 {
                    t *= num_traits::pow::pow(xi.clone(), ei as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_i64(&self, x: &[i64]) -> Result<BigInt> {
        let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.evaluate(&xs)
    }

    /// Value mod m, from residues. `x` entries are taken mod m.
    pub fn evaluate_mod(&self, x: &[u64], m: u64) -> Result<u64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        assert!(m >= 1 && m < (1 << 63));
        let mm = BigInt::from(m);
        let mut acc: u128 = 0;
        for (mon, c) in &self.terms {
            let cr = c.mod_floor(&mm).to_u64().unwrap();
            let mut t: u128 = cr as u128;
            for (&xi, &ei) in x.iter().zip(&mon.0) {
                let mut base = (xi % m) as u128;
                let mut exp = ei;
                // square-and-multiply keeps intermediates below m^2 < 2^126
                let mut pw: u128 = 1;
                while exp > 0 {
                    if exp & 1 == 1 {
                        pw = pw * base % m as u128;
                    }
                    base = base * base % m as u128;
                    exp >>= 1;
                }
                t = t * pw % m as u128;
            }
            acc = (acc + t) % m as u128;
        }
        Ok(acc as u64)
    }

    /// g with g(x) = h(r + d·x), computed exactly by iterated single-variable
    /// affine substitution (one variable at a time bounds the intermediate
    /// term count).
    pub fn shift_scale(&self, r: &[BigInt], d: &BigInt) -> Result<Self> {
        if r.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: r.len(),
            });
        }
        let mut out = self.clone();
        for (i, ri) in r.iter().enumerate() {
            out = out.substitute_affine(i, ri, d);
        }
        Ok(out)
    }

    /// x_i → a + b·x_i.
    fn substitute_affine(&self, i: usize, a: &BigInt, b: &BigInt) -> Self {
        let max_e = self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0) as usize;
        // binomials[n][j] = C(n, j)
        let mut binom = vec![vec![BigInt::one()]];
        for n in 1..=max_e {
            let prev = &binom[n - 1];
            let mut row = vec![BigInt::one()];
            for j in 1..n {
                row.push(&prev[j - 1] + &prev[j]);
            }
            row.push(BigInt::one());
            binom.push(row);
        }
        let mut a_pow = vec![BigInt::one()];
        let mut b_pow = vec![BigInt::one()];
        for k in 1..=max_e {
            a_pow.push(&a_pow[k - 1] * a);
            b_pow.push(&b_pow[k - 1] * b);
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let n = m.0[i] as usize;
            for j in 0..=n {
                let coeff = c * &binom[n][j] * &a_pow[n - j] * &b_pow[j];
                let mut e = m.0.clone();
                e[i] = j as u32;
                out.add_term(e, coeff);
            }
        }
        out
    }

    /// Sum of the terms of total degree exactly `i` (possibly zero).
    pub fn homogeneous_part(&self, i: u32) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() == i)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.total_degree());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Formal partial derivative with respect to x_i.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let ei = m.0[i];
            if ei > 0 {
                let mut e = m.0.clone();
                e[i] = ei - 1;
                out.add_term(e, c * BigInt::from(ei));
            }
        }
        out
    }

    /// All formal partial derivatives, in variable order.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// gcd of the nonconstant coefficients; 0 if there is no nonconstant term.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (m, c) in &self.terms {
            if m.total_degree() > 0 {
                g = g.gcd(c);
            }
        }
        g
    }

    /// h/m when every coefficient is divisible by m; errors otherwise.
    pub fn divide_exact(&self, m: &BigInt) -> Result<Self> {
        assert!(m.is_positive(), "divisor must be positive");
        let mut terms = BTreeMap::new();
        for (mon, c) in &self.terms {
            let (q, r) = c.div_rem(m);
            if !r.is_zero() {
                return Err(Error::NotDivisible {
                    coefficient: c.to_string(),
                    divisor: m.to_string(),
                });
            }
            terms.insert(mon.clone(), q);
        }
        Ok(MultiPoly {
            nvars: self.nvars,
            terms,
        })
    }

    /// Coefficients reduced into [0, m); zero terms dropped.
    pub fn reduce_mod(&self, m: u64) -> Self {
        assert!(m >= 2);
        let mm = BigInt::from(m);
        let mut out = Self::zero(self.nvars);
        for (mon, c) in &self.terms {
            out.add_term(mon.0.clone(), c.mod_floor(&mm));
        }
        out
    }

    /// Pre-reduce the coefficients mod m for fast repeated evaluation.
    pub fn compile_mod(&self, m: u64) -> ModularPoly {
        assert!(m >= 1 && m < (1 << 31));
        let mm = BigInt::from(m);
        let terms: Vec<(Vec<u32>, u64)> = self
            .terms
            .iter()
            .filter_map(|(mon, c)| {
                let cr = c.mod_floor(&mm).to_u64().unwrap();
                (cr != 0).then(|| (mon.0.clone(), cr))
            })
            .collect();
        ModularPoly {
            m,
            nvars: self.nvars,
            terms,
        }
    }

    /// Same polynomial viewed in a larger variable set.
    pub fn extend_nvars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.resize(nvars, 0);
            out.add_term(e, c.clone());
        }
        out
    }

    /// True if x_i divides every term.
    pub fn divisible_by_variable(&self, i: usize) -> bool {
        !self.is_zero() && self.terms.keys().all(|m| m.0[i] > 0)
    }

    /// Parse either canonical JSON or the shorthand text grammar.
    pub fn parse(input: &str) -> Result<Self> {
        let trimmed = input.trim();
        if trimmed.starts_with('{') {
            Self::from_json_str(trimmed)
        } else {
            parse_text(trimmed)
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: PolyJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("polynomial JSON: {e}")))?;
        j.try_into()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(PolyJson::from(self)).expect("polynomial serialization")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // display in descending graded-lex, the usual reading order
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote = false;
            if !mag.is_one() || m.total_degree() == 0 {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

/// A polynomial with coefficients reduced into [0, m), m < 2^31; evaluation
/// is pure u64 arithmetic (the hot path of exponential-sum enumerations).
#[derive(Debug, Clone)]
pub struct ModularPoly {
    m: u64,
    nvars: usize,
    terms: Vec<(Vec<u32>, u64)>,
}

impl ModularPoly {
    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        debug_assert_eq!(x.len(), self.nvars);
        let m = self.m;
        let mut acc: u64 = 0;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (&xi, &ei) in x.iter().zip(exps) {
                let mut base = xi % m;
                let mut e = ei;
                let mut pw: u64 = 1;
                while e > 0 {
                    if e & 1 == 1 {
                        pw = pw * base % m;
                    }
                    base = base * base % m;
                    e >>= 1;
                }
                t = t * pw % m;
            }
            acc = (acc + t) % m;
        }
        acc
    }
}

/// Canonical JSON form: coefficients as decimal strings, terms sorted
/// graded-lex ascending.
#[derive(Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub e: Vec<u32>,
    pub c: String,
}

impl From<&MultiPoly> for PolyJson {
    fn from(p: &MultiPoly) -> Self {
        PolyJson {
            nvars: p.nvars,
            terms: p
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    e: m.0.clone(),
                    c: c.to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for MultiPoly {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Self> {
        if j.nvars == 0 {
            return Err(Error::Parse("nvars must be at least 1".into()));
        }
        let mut p = MultiPoly::zero(j.nvars);
        for t in j.terms {
            if t.e.len() != j.nvars {
                return Err(Error::Parse(format!(
                    "exponent vector {:?} has length {}, expected {}",
                    t.e,
                    t.e.len(),
                    j.nvars
                )));
            }
            let c: BigInt =
                t.c.parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient {:?}", t.c)))?;
            p.add_term(t.e, c);
        }
        Ok(p)
    }
}

// ---------------------------------------------------------------------------
// Text grammar: "3*x1^2*x2 - 5*x1 + 7", variables x1.. (aliases x,y,z,w),
// plus parentheses so inputs like "(x+y)^2+x" work.
// ---------------------------------------------------------------------------

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    max_var: usize,
}

fn parse_text(input: &str) -> Result<MultiPoly> {
    // two passes: first to learn the variable count, then to build
    let mut probe = Parser::new(input);
    probe.expr(1)?;
    let nvars = probe.max_var.max(1);
    let mut p = Parser::new(input);
    let poly = p.expr(nvars)?;
    if p.chars.peek().is_some() {
        return Err(Error::Parse(format!(
            "trailing input at {:?}",
            p.chars.collect::<String>()
        )));
    }
    Ok(poly)
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            chars: input.chars().peekable(),
            max_var: 0,
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn expr(&mut self, nvars: usize) -> Result<MultiPoly> {
        self.skip_ws();
        let mut negate = false;
        if let Some(&c) = self.chars.peek() {
            if c == '+' || c == '-' {
                self.chars.next();
                negate = c == '-';
            }
        }
        let mut acc = self.term(nvars)?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some('+') => {
                    self.chars.next();
                    let t = self.term(nvars)?;
                    acc = acc.add(&t);
                }
                Some('-') => {
                    self.chars.next();
                    let t = self.term(nvars)?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self, nvars: usize) -> Result<MultiPoly> {
        let mut acc = self.factor(nvars)?;
        loop {
            self.skip_ws();
            if self.chars.peek() == Some(&'*') {
                self.chars.next();
                let f = self.factor(nvars)?;
                acc = acc.mul(&f);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self, nvars: usize) -> Result<MultiPoly> {
        let base = self.base(nvars)?;
        self.skip_ws();
        if self.chars.peek() == Some(&'^') {
            self.chars.next();
            self.skip_ws();
            let n = self.uint()?;
            Ok(base.pow(n))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self, nvars: usize) -> Result<MultiPoly> {
        self.skip_ws();
        match self.chars.peek() {
            Some('(') => {
                self.chars.next();
                let inner = self.expr(nvars)?;
                self.skip_ws();
                if self.chars.next() != Some(')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                Ok(inner)
            }
            Some('-') => {
                self.chars.next();
                Ok(self.factor(nvars)?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.bigint()?;
                Ok(MultiPoly::constant(nvars, n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let idx = self.var_index()?;
                self.max_var = self.max_var.max(idx);
                if idx > nvars {
                    // only reachable in the probing pass
                    Ok(MultiPoly::zero(nvars))
                } else {
                    Ok(MultiPoly::variable(nvars, idx - 1))
                }
            }
            other => Err(Error::Parse(format!("unexpected input {other:?}"))),
        }
    }

    /// 1-based variable index: x<k>, or the aliases x, y, z, w.
    fn var_index(&mut self) -> Result<usize> {
        let name = self.chars.next().unwrap();
        let mut digits = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.chars.next().unwrap());
        }
        match (name, digits.is_empty()) {
            ('x', false) => {
                let k: usize = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad variable index {digits:?}")))?;
                if k == 0 {
                    return Err(Error::Parse("variable indices start at x1".into()));
                }
                Ok(k)
            }
            ('x', true) => Ok(1),
            ('y', true) => Ok(2),
            ('z', true) => Ok(3),
            ('w', true) => Ok(4),
            (c, _) => Err(Error::Parse(format!("unknown variable {c:?}{digits}"))),
        }
    }

    fn bigint(&mut self) -> Result<BigInt> {
        let mut s = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.chars.next().unwrap());
        }
        s.parse()
            .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
    }

    fn uint(&mut self) -> Result<u32> {
        let n = self.bigint()?;
        n.to_u32()
            .ok_or_else(|| Error::Parse("exponent out of range".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(
            p("x^2+y^2").evaluate_i64(&[3, 4]).unwrap(),
            BigInt::from(25)
        );
        assert_eq!(p("x^2-1").evaluate_i64(&[1]).unwrap(), BigInt::zero());
        assert_eq!(p("2*x^2-2*x").evaluate_i64(&[3]).unwrap(), BigInt::from(12));
        assert!(matches!(
            p("x^2-1").evaluate_i64(&[1, 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn shift_scale_examples() {
        let two = BigInt::from(2);
        assert_eq!(
            p("x^2").shift_scale(&[BigInt::from(1)], &two).unwrap(),
            p("4*x^2+4*x+1")
        );
        assert_eq!(
            p("x^2-1").shift_scale(&[BigInt::from(-1)], &two).unwrap(),
            p("4*x^2-4*x")
        );
        assert_eq!(
            p("x+y")
                .shift_scale(&[BigInt::zero(), BigInt::zero()], &BigInt::one())
                .unwrap(),
            p("x+y")
        );
    }

    #[test]
    fn homogeneous_part_examples() {
        let h = p("x^2+x*y+3*x+7");
        assert_eq!(h.homogeneous_part(2), p("x^2+x*y"));
        assert_eq!(h.homogeneous_part(0), MultiPoly::constant(2, 7));
        assert!(h.homogeneous_part(3).is_zero());
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(
            p("x^2+y^2").gradient(),
            vec![p("2*x").extend_nvars(2), p("2*y")]
        );
        assert_eq!(p("(x+y)^2").gradient(), vec![p("2*x+2*y"), p("2*x+2*y")]);
        assert_eq!(p("x^2-1").gradient(), vec![p("2*x")]);
    }

    #[test]
    fn content_examples() {
        assert_eq!(p("6*x^2+4*x+3").content(), BigInt::from(2));
        assert_eq!(p("x^2").content(), BigInt::one());
        assert_eq!(p("10*x*y+15*y^2").content(), BigInt::from(5));
        assert_eq!(MultiPoly::constant(1, 9).content(), BigInt::zero());
    }

    #[test]
    fn divide_exact_examples() {
        assert_eq!(
            p("4*x^2-4*x").divide_exact(&BigInt::from(2)).unwrap(),
            p("2*x^2-2*x")
        );
        assert_eq!(p("x^2").divide_exact(&BigInt::one()).unwrap(), p("x^2"));
        assert!(matches!(
            p("4*x^2-4*x").divide_exact(&BigInt::from(3)),
            Err(Error::NotDivisible { .. })
        ));
    }

    #[test]
    fn reduce_mod_examples() {
        assert_eq!(p("4*x^2+4*x+1").reduce_mod(2), MultiPoly::constant(1, 1));
        assert_eq!(p("2*x^2-2*x").reduce_mod(5), p("2*x^2+3*x"));
        assert_eq!(p("x^2+y^2").reduce_mod(2), p("x^2+y^2"));
    }

    #[test]
    fn parse_shorthand_grammar() {
        let h = p("3*x1^2*x2 - 5*x1 + 7");
        assert_eq!(h.nvars(), 2);
        assert_eq!(h.coefficient(&[2, 1]), BigInt::from(3));
        assert_eq!(h.coefficient(&[1, 0]), BigInt::from(-5));
        assert_eq!(h.coefficient(&[0, 0]), BigInt::from(7));
        assert_eq!(p("(x+y)^2+x"), p("x^2+2*x*y+y^2+x"));
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let h = p("3*x1^2*x2 - 5*x1 + 7");
        let v = h.to_json_value();
        let back = MultiPoly::from_json_str(&v.to_string()).unwrap();
        assert_eq!(h, back);
        // graded-lex ascending: constant, then x1, then x1^2*x2
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms[0]["e"], serde_json::json!([0, 0]));
        assert_eq!(terms[1]["e"], serde_json::json!([1, 0]));
        assert_eq!(terms[2]["e"], serde_json::json!([2, 1]));
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(p("2*x^2-2*x").to_string(), "2*x1^2 - 2*x1");
        assert_eq!(MultiPoly::zero(1).to_string(), "0");
    }

    fn arb_poly(nvars: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
        let term = (proptest::collection::vec(0..=max_deg, nvars), -20i64..=20);
        proptest::collection::vec(term, 0..6).prop_map(move |ts| {
            MultiPoly::from_terms(nvars, ts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        })
    }

    proptest! {
        #[test]
        fn homogeneous_parts_sum_back(h in arb_poly(2, 4)) {
            let k = h.degree().unwrap_or(0);
            let mut sum = MultiPoly::zero(h.nvars());
            for i in 0..=k {
                sum = sum.add(&h.homogeneous_part(i));
            }
            prop_assert_eq!(sum, h);
        }

        #[test]
        fn shift_scale_identity(h in arb_poly(2, 4)) {
            let r = vec![BigInt::zero(), BigInt::zero()];
            prop_assert_eq!(h.shift_scale(&r, &BigInt::one()).unwrap(), h);
        }

        #[test]
        fn shift_scale_composes(
            h in arb_poly(2, 3),
            r1 in proptest::collection::vec(-5i64..=5, 2),
            r2 in proptest::collection::vec(-5i64..=5, 2),
            d1 in 1i64..=4,
            d2 in 1i64..=4,
        ) {
            let rb1: Vec<BigInt> = r1.iter().map(|&v| BigInt::from(v)).collect();
            let rb2: Vec<BigInt> = r2.iter().map(|&v| BigInt::from(v)).collect();
            let lhs = h
                .shift_scale(&rb1, &BigInt::from(d1)).unwrap()
                .shift_scale(&rb2, &BigInt::from(d2)).unwrap();
            let combined: Vec<BigInt> = r1
                .iter()
                .zip(&r2)
                .map(|(&a, &b)| BigInt::from(a + d1 * b))
                .collect();
            let rhs = h.shift_scale(&combined, &BigInt::from(d1 * d2)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn evaluate_commutes_with_reduce_mod(
            h in arb_poly(2, 4),
            x in proptest::collection::vec(-30i64..=30, 2),
            m in 2u64..=97,
        ) {
            let direct = h
                .evaluate_i64(&x)
                .unwrap()
                .mod_floor(&BigInt::from(m));
            let xs: Vec<u64> = x
                .iter()
                .map(|&v| BigInt::from(v).mod_floor(&BigInt::from(m)).to_u64().unwrap())
                .collect();
            let reduced = h.reduce_mod(m).evaluate_mod(&xs, m).unwrap();
            prop_assert_eq!(direct, BigInt::from(reduced));
        }

        #[test]
        fn content_scales(h in arb_poly(2, 4), c in 1i64..=12) {
            prop_assume!(h.degree().unwrap_or(0) > 0);
            let scaled = h.scale(&BigInt::from(c));
            prop_assert_eq!(scaled.content(), h.content() * BigInt::from(c));
        }
    }
}
