//! Exact coefficient ring: arbitrary-precision rationals and sparse
//! multivariate polynomials over named formal generators.
//!
//! The ring is `Q[s, t5, t7, ..., u, ...]` with no relations imposed. By
//! convention `s` stands for `1/(2 - t3)`, `u` for `pi^2` and `tK` for the
//! odd time `t_K`, but the ring itself never uses those meanings.
//!
//! Canonical order of terms is descending graded-lexicographic, with
//! generators compared by [`Generator`]'s natural order (`s < t5 < t7 < t11 < u`).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!` as an exact rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Rational::from_integer(acc)
}

/// Parses `p`, `-p` or `p/q` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let parsed = match trimmed.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad_rational(text))?;
            let den: BigInt = den.trim().parse().map_err(|_| bad_rational(text))?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            Rational::new(num, den)
        }
        None => Rational::from_integer(trimmed.parse().map_err(|_| bad_rational(text))?),
    };
    Ok(parsed)
}

fn bad_rational(text: &str) -> Error {
    Error::Parse(format!("`{text}` is not an exact rational"))
}

/// Name of a formal generator.
///
/// Ordered naturally: the alphabetic head first, then the numeric tail by
/// value, so `t5 < t7 < t11`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator(String);

impl Generator {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let mut chars = name.chars();
        let valid_head = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if !valid_head || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("invalid generator name `{name}`")));
        }
        Ok(Generator(name))
    }

    /// The generator `s = 1/(2 - t3)`.
    pub fn s() -> Self {
        Generator("s".into())
    }

    /// The generator `u = pi^2`.
    pub fn u() -> Self {
        Generator("u".into())
    }

    /// The formal time `t_index`.
    pub fn time(index: u32) -> Self {
        Generator(format!("t{index}"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    fn split(&self) -> (&str, Option<u64>) {
        let head_len = self.0.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, tail) = self.0.split_at(head_len);
        (head, tail.parse().ok())
    }
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> Ordering {
        let (ha, na) = self.split();
        let (hb, nb) = other.split();
        ha.cmp(hb)
            .then_with(|| na.cmp(&nb))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A power product of generators; exponents are strictly positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(BTreeMap<Generator, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(g: Generator) -> Self {
        Monomial::one().with(g, 1)
    }

    /// Multiplies in `g^exp`.
    pub fn with(mut self, g: Generator, exp: u32) -> Self {
        if exp > 0 {
            *self.0.entry(g).or_insert(0) += exp;
        }
        self
    }

    pub fn from_pairs<I: IntoIterator<Item = (Generator, u32)>>(pairs: I) -> Self {
        pairs
            .into_iter()
            .fold(Monomial::one(), |m, (g, e)| m.with(g, e))
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, g: &Generator) -> u32 {
        self.0.get(g).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Generator, u32)> {
        self.0.iter().map(|(g, &e)| (g, e))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (g, &e) in &other.0 {
            *out.entry(g.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    fn without(&self, g: &Generator) -> Monomial {
        let mut out = self.0.clone();
        out.remove(g);
        Monomial(out)
    }

    fn lower(&self, g: &Generator) -> Option<Monomial> {
        let mut out = self.0.clone();
        match out.get_mut(g) {
            Some(1) => {
                out.remove(g);
            }
            Some(e) => *e -= 1,
            None => return None,
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    // graded lexicographic: total degree, then the exponent of the smallest
    // generator where the two differ
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ga, ea)), Some((gb, eb))) => match ga.cmp(gb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, e) in self.iter() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Sparse polynomial with exact rational coefficients.
///
/// Never stores a zero coefficient, so structural equality is ring equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, Rational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Coefficient::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Coefficient::term(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        Coefficient::constant(int(n))
    }

    pub fn var(g: Generator) -> Self {
        Coefficient::term(Rational::one(), Monomial::var(g))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut out = Coefficient::zero();
        out.add_term(m, c);
        out
    }

    /// Collects `(coefficient, monomial)` pairs, merging repeats.
    pub fn from_terms<I: IntoIterator<Item = (Rational, Monomial)>>(terms: I) -> Self {
        let mut out = Coefficient::zero();
        for (c, m) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this polynomial has no generators.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|(g, _)| g.clone()))
            .collect()
    }

    /// Coefficient of the exact monomial `m` (zero when absent).
    pub fn coeff_of(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Coefficient {
        if c.is_zero() {
            return Coefficient::zero();
        }
        Coefficient {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Coefficient {
        let mut acc = Coefficient::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Exact substitution of every generator; fails on the first unassigned one.
    pub fn eval(&self, assignment: &BTreeMap<Generator, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut value = c.clone();
            for (g, e) in m.iter() {
                let x = assignment
                    .get(g)
                    .ok_or_else(|| Error::MissingGenerator(g.to_string()))?;
                value *= pow_rational(x, e);
            }
            total += value;
        }
        Ok(total)
    }

    /// Substitutes the assigned generators and leaves the others formal.
    pub fn specialize(&self, assignment: &BTreeMap<Generator, Rational>) -> Coefficient {
        let mut out = Coefficient::zero();
        for (m, c) in &self.terms {
            let mut value = c.clone();
            let mut rest = Monomial::one();
            for (g, e) in m.iter() {
                match assignment.get(g) {
                    Some(x) => value *= pow_rational(x, e),
                    None => rest = rest.with(g.clone(), e),
                }
            }
            out.add_term(rest, value);
        }
        out
    }

    /// Replaces `g` by an arbitrary polynomial.
    pub fn substitute(&self, g: &Generator, value: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(g);
            let rest = Coefficient::term(c.clone(), m.without(g));
            out += &(&rest * &value.pow(e));
        }
        out
    }

    /// Exact quotient by a single generator, `None` if some term lacks it.
    pub fn div_generator(&self, g: &Generator) -> Option<Coefficient> {
        let mut out = Coefficient::zero();
        for (m, c) in &self.terms {
            out.terms.insert(m.lower(g)?, c.clone());
        }
        Some(out)
    }

    /// Canonical JSON value: `[[rational, {generator: exponent}], ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("coefficient serialization is infallible")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        Coefficient::deserialize(value).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn pow_rational(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

impl From<Rational> for Coefficient {
    fn from(c: Rational) -> Self {
        Coefficient::constant(c)
    }
}

impl From<Generator> for Coefficient {
    fn from(g: Generator) -> Self {
        Coefficient::var(g)
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, rhs: &Coefficient) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(mut self, rhs: Coefficient) -> Coefficient {
        self += &rhs;
        self
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(mut self, rhs: Coefficient) -> Coefficient {
        self -= &rhs;
        self
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: Coefficient) -> Coefficient {
        &self * &rhs
    }
}

impl fmt::Display for Coefficient {
    /// Text form: `3*s^2*t5/4 - u/12 + 7`, largest monomial first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let numer = c.numer().abs();
            let denom = c.denom();
            if m.is_one() {
                write!(f, "{numer}")?;
            } else {
                if !numer.is_one() {
                    write!(f, "{numer}*")?;
                }
                write!(f, "{m}")?;
            }
            if !denom.is_one() {
                write!(f, "/{denom}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    /// Accepts the text form, plus `p/q*gen` style prefixes and bare rationals.
    fn from_str(text: &str) -> Result<Self> {
        TextParser::new(text).parse()
    }
}

struct TextParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> TextParser<'a> {
    fn new(src: &'a str) -> Self {
        TextParser { src, pos: 0 }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        let rest = &self.src[start..];
        self.pos += rest.find(|c| !pred(c)).unwrap_or(rest.len());
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits.parse().map_err(|_| self.err("expected an integer"))
    }

    fn parse(mut self) -> Result<Coefficient> {
        let mut out = Coefficient::zero();
        let mut sign = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            Some(_) => 1,
            None => return Err(self.err("empty coefficient")),
        };
        loop {
            let (c, m) = self.term()?;
            out.add_term(m, if sign < 0 { -c } else { c });
            match self.peek() {
                None => return Ok(out),
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                Some(_) => return Err(self.err("expected `+` or `-`")),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Rational, Monomial)> {
        let mut c = Rational::one();
        let mut m = Monomial::one();
        self.factor(&mut c, &mut m)?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    self.factor(&mut c, &mut m)?;
                }
                Some('/') => {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    c /= Rational::from_integer(den);
                }
                _ => return Ok((c, m)),
            }
        }
    }

    fn factor(&mut self, c: &mut Rational, m: &mut Monomial) -> Result<()> {
        match self.peek() {
            Some(ch) if ch.is_ascii_digit() => {
                *c *= Rational::from_integer(self.integer()?);
            }
            Some(ch) if ch.is_ascii_alphabetic() || ch == '_' => {
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                let g = Generator::new(name)?;
                let mut exp = 1;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    exp = self
                        .integer()?
                        .to_u32()
                        .ok_or_else(|| self.err("exponent out of range"))?;
                }
                *m = std::mem::take(m).with(g, exp);
            }
            _ => return Err(self.err("expected a number or generator")),
        }
        Ok(())
    }
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in self.terms.iter().rev() {
            let exps: BTreeMap<&str, u32> = m.iter().map(|(g, e)| (g.name(), e)).collect();
            seq.serialize_element(&(c.to_string(), exps))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(String, BTreeMap<String, u32>)> = Vec::deserialize(deserializer)?;
        let mut out = Coefficient::zero();
        for (c, exps) in raw {
            let c = parse_rational(&c).map_err(D::Error::custom)?;
            let mut m = Monomial::one();
            for (name, e) in exps {
                m = m.with(Generator::new(name).map_err(D::Error::custom)?, e);
            }
            out.add_term(m, c);
        }
        Ok(out)
    }
}
