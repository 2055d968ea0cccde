//! Truncated Laurent series in one formal variable `z` with polynomial
//! coefficients.
//!
//! A series knows its coefficients exactly on the window
//! `[min_degree, max_degree]`; everything below is zero and everything above
//! is unknown. Operations narrow `max_degree` rather than guess.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{int, Coefficient, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    min_degree: i32,
    max_degree: i32,
    coeffs: BTreeMap<i32, Coefficient>,
}

impl TruncatedSeries {
    /// The zero series known on `[min_degree, max_degree]`.
    pub fn new(min_degree: i32, max_degree: i32) -> Self {
        TruncatedSeries {
            min_degree,
            max_degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant `c`, known up to `max_degree`.
    pub fn constant(c: Coefficient, max_degree: i32) -> Self {
        let mut out = TruncatedSeries::new(0, max_degree);
        out.add_to(0, &c);
        out
    }

    pub fn from_terms<I>(min_degree: i32, max_degree: i32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, Coefficient)>,
    {
        let mut out = TruncatedSeries::new(min_degree, max_degree);
        for (d, c) in terms {
            if d < min_degree || d > max_degree {
                return Err(Error::OutOfWindow {
                    degree: d,
                    min: min_degree,
                    max: max_degree,
                });
            }
            out.add_to(d, &c);
        }
        Ok(out)
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i32 {
        self.max_degree
    }

    /// Adds `c` to the coefficient of `z^degree`.
    ///
    /// Panics if `degree` is outside the known window.
    pub fn add_to(&mut self, degree: i32, c: &Coefficient) {
        assert!(
            (self.min_degree..=self.max_degree).contains(&degree),
            "degree {degree} outside [{}, {}]",
            self.min_degree,
            self.max_degree
        );
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(degree).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    /// Coefficient of `z^degree`; zero below the window, an error above it.
    pub fn coeff(&self, degree: i32) -> Result<Coefficient> {
        if degree > self.max_degree {
            return Err(Error::OutOfWindow {
                degree,
                min: self.min_degree,
                max: self.max_degree,
            });
        }
        Ok(self.coeffs.get(&degree).cloned().unwrap_or_default())
    }

    /// Stored nonzero terms in ascending degree.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Coefficient)> {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when only even powers of `z` are present.
    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|d| d % 2 == 0)
    }

    /// Forgets everything above `max_degree`.
    pub fn truncate(&self, max_degree: i32) -> TruncatedSeries {
        let max_degree = max_degree.min(self.max_degree);
        TruncatedSeries {
            min_degree: self.min_degree.min(max_degree),
            max_degree,
            coeffs: self
                .coeffs
                .range(..=max_degree)
                .map(|(&d, c)| (d, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coefficient) -> TruncatedSeries {
        let mut out = TruncatedSeries::new(self.min_degree, self.max_degree);
        for (&d, v) in &self.coeffs {
            out.add_to(d, &(v * c));
        }
        out
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let max = self.max_degree.min(other.max_degree);
        let min = self.min_degree.min(other.min_degree).min(max);
        let mut out = TruncatedSeries::new(min, max);
        for (d, c) in self.terms().chain(other.terms()) {
            if d <= max {
                out.add_to(d, c);
            }
        }
        out
    }

    pub fn neg(&self) -> TruncatedSeries {
        self.scale(&Coefficient::integer(-1))
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.add(&other.neg())
    }

    /// Product, known up to `min(a.max + b.min, b.max + a.min)`.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let min = self.min_degree + other.min_degree;
        let max = (self.max_degree + other.min_degree).min(other.max_degree + self.min_degree);
        let mut out = TruncatedSeries::new(min.min(max), max);
        for (&da, ca) in &self.coeffs {
            for (&db, cb) in other.coeffs.range(..=max - da) {
                out.add_to(da + db, &(ca * cb));
            }
        }
        out
    }

    fn require_positive_order(&self, what: &str) -> Result<()> {
        match self.coeffs.keys().next() {
            Some(&d) if d <= 0 => Err(Error::InvalidInput(format!(
                "{what} needs a series vanishing at z = 0, found a z^{d} term"
            ))),
            _ => Ok(()),
        }
    }

    /// `1/(1 - D) = sum_m D^m` for `D(0) = 0`.
    pub fn geometric_inverse(&self) -> Result<TruncatedSeries> {
        self.require_positive_order("geometric inverse")?;
        let max = self.max_degree;
        let mut inv: Vec<Coefficient> = vec![Coefficient::zero(); (max.max(0) + 1) as usize];
        inv[0] = Coefficient::one();
        for n in 1..=max {
            let mut acc = Coefficient::zero();
            for (&k, dk) in self.coeffs.range(1..=n) {
                let prev = &inv[(n - k) as usize];
                if !prev.is_zero() {
                    acc += &(dk * prev);
                }
            }
            inv[n as usize] = acc;
        }
        Self::from_dense(inv, 0, max)
    }

    /// `-ln(1 - f)` for `f(0) = 0`, via `g' (1 - f) = f'`.
    pub fn log_one_minus(&self) -> Result<TruncatedSeries> {
        self.require_positive_order("logarithm")?;
        let max = self.max_degree;
        let mut out: Vec<Coefficient> = vec![Coefficient::zero(); (max.max(0) + 1) as usize];
        for n in 1..=max {
            let mut acc = self.coeff(n)?.scale(&int(n as i64));
            for k in 1..n {
                if out[k as usize].is_zero() {
                    continue;
                }
                if let Some(f) = self.coeffs.get(&(n - k)) {
                    acc += &(&out[k as usize] * f).scale(&int(k as i64));
                }
            }
            out[n as usize] = acc.scale(&Rational::new(1.into(), n.into()));
        }
        Self::from_dense(out, 1, max)
    }

    /// `1 - e^{-g}` for `g(0) = 0`; inverse of [`Self::log_one_minus`].
    pub fn exp_negative(&self) -> Result<TruncatedSeries> {
        self.require_positive_order("exponential")?;
        let max = self.max_degree;
        // h = e^{-g} satisfies h' = -g' h
        let mut h: Vec<Coefficient> = vec![Coefficient::zero(); (max.max(0) + 1) as usize];
        h[0] = Coefficient::one();
        for n in 1..=max {
            let mut acc = Coefficient::zero();
            for (&k, gk) in self.coeffs.range(1..=n) {
                let prev = &h[(n - k) as usize];
                if !prev.is_zero() {
                    acc += &(gk * prev).scale(&int(k as i64));
                }
            }
            h[n as usize] = acc.scale(&Rational::new((-1).into(), n.into()));
        }
        let f: Vec<Coefficient> = h
            .into_iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { Coefficient::zero() } else { -c })
            .collect();
        Self::from_dense(f, 1, max)
    }

    /// Coefficient of `z^{-1}`.
    pub fn residue(&self) -> Result<Coefficient> {
        if self.min_degree > -1 || self.max_degree < -1 {
            return Err(Error::OutOfWindow {
                degree: -1,
                min: self.min_degree,
                max: self.max_degree,
            });
        }
        self.coeff(-1)
    }

    /// `dense[i]` is the coefficient of `z^i`; entries below `min_degree` must vanish.
    fn from_dense(
        dense: Vec<Coefficient>,
        min_degree: i32,
        max_degree: i32,
    ) -> Result<TruncatedSeries> {
        TruncatedSeries::from_terms(
            min_degree.min(max_degree),
            max_degree,
            dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(d, c)| (d as i32, c)),
        )
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, c) in self.terms() {
            write!(f, "({c})*z^{d} + ")?;
        }
        write!(f, "O(z^{})", self.max_degree + 1)
    }
}
