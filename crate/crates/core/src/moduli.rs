//! From correlators to moduli-space quantities: Laplace pairing with volume
//! polynomials, conjugated times, mixed kappa/psi intersection numbers,
//! Weil-Petersson volumes and a small psi-class oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::algebra::{factorial, int, rat, Coefficient, Generator, Monomial, Rational};
use crate::curve::{SpectralCurve, Time3};
use crate::error::{Error, Result};
use crate::recursion::{dimension, is_stable, permutations, Correlator, Engine};
use crate::series::TruncatedSeries;

/// `V_{g,n}(P) = sum_d terms[d] prod_i P_i^{2 d_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumePolynomial {
    pub g: u32,
    pub n: u32,
    pub terms: BTreeMap<Vec<u32>, Coefficient>,
}

impl VolumePolynomial {
    /// The volume as one polynomial with perimeter generators `P1, ..., Pn`.
    pub fn as_polynomial(&self) -> Coefficient {
        let mut out = Coefficient::zero();
        for (d, c) in &self.terms {
            let m = Monomial::from_pairs(d.iter().enumerate().map(|(i, &di)| {
                (
                    Generator::new(format!("P{}", i + 1)).expect("valid name"),
                    2 * di,
                )
            }));
            out += &(c * &Coefficient::term(Rational::one(), m));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(d, c)| {
                let exps: Vec<u32> = d.iter().map(|x| 2 * x).collect();
                json!({"P-exponents": exps, "coeff": c.to_string()})
            })
            .collect();
        json!({"g": self.g, "n": self.n, "terms": terms})
    }
}

impl fmt::Display for VolumePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_polynomial())
    }
}

/// `terms[d] = w[d] / prod_i (2 d_i + 1)!`, from
/// `int_0^inf P^{2d+1} e^{-lambda P} dP = (2d+1)!/lambda^{2d+2}`.
pub fn laplace_to_volume(w: &Correlator) -> VolumePolynomial {
    VolumePolynomial {
        g: w.g,
        n: w.n,
        terms: w
            .terms
            .iter()
            .map(|(d, c)| (d.clone(), c.scale(&laplace_weight(d).recip())))
            .collect(),
    }
}

pub fn volume_to_laplace(v: &VolumePolynomial) -> Correlator {
    let mut out = Correlator::new(v.g, v.n);
    for (d, c) in &v.terms {
        out.insert(d.clone(), c.scale(&laplace_weight(d)));
    }
    out
}

fn laplace_weight(d: &[u32]) -> Rational {
    d.iter().map(|&di| factorial(2 * di + 1)).product()
}

/// Conjugated times `t~_b`, `1 <= b <= max_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugatedTimes {
    pub tilde: BTreeMap<u32, Coefficient>,
    pub max_order: u32,
    /// `s`, with `e^{t~_0} = 2s`.
    pub t0_prefactor_base: Coefficient,
}

impl ConjugatedTimes {
    /// `t~_b`; zero when it vanishes, `None` beyond the computed order.
    pub fn get(&self, b: u32) -> Option<Coefficient> {
        (b >= 1 && b <= self.max_order).then(|| self.tilde.get(&b).cloned().unwrap_or_default())
    }

    pub fn to_json(&self) -> Value {
        let tilde: Map<String, Value> = (1..=self.max_order)
            .map(|b| {
                (
                    b.to_string(),
                    Value::String(self.get(b).unwrap().to_string()),
                )
            })
            .collect();
        json!({
            "max_order": self.max_order,
            "t0_prefactor_base": self.t0_prefactor_base.to_string(),
            "tilde": tilde,
        })
    }
}

/// `c_a = (2a+1)!/a!`.
fn time_weight(a: u32) -> Rational {
    factorial(2 * a + 1) / factorial(a)
}

/// `f(z) = sum_{a>=1} (2a+1)!/a! * t_{2a+3}/(2 - t3) z^a`, then `t~ = -ln(1 - f)`.
pub fn conjugate_times(curve: &SpectralCurve, max_order: u32) -> Result<ConjugatedTimes> {
    if max_order == 0 {
        return Err(Error::InvalidParameter(
            "conjugation order must be >= 1".into(),
        ));
    }
    curve.require_order(max_order)?;
    let s = curve.s()?;
    let mut f = TruncatedSeries::new(1, max_order as i32);
    for a in 1..=max_order {
        let t = curve.time(a);
        f.add_to(a as i32, &(&s * &t).scale(&time_weight(a)));
    }
    let g = f.log_one_minus()?;
    let tilde = g.terms().map(|(d, c)| (d as u32, c.clone())).collect();
    Ok(ConjugatedTimes {
        tilde,
        max_order,
        t0_prefactor_base: s,
    })
}

/// Rebuilds a curve from conjugated times: `f = 1 - e^{-f~}`, then
/// `t_{2a+3} = a!/(2a+1)! * (2 - t3) * f_a` for `1 <= a <= max_k`.
pub fn inverse_conjugate_times(
    tilde: &BTreeMap<u32, Coefficient>,
    t3: &Time3,
    max_k: u32,
) -> Result<SpectralCurve> {
    let mut curve = SpectralCurve::new(t3.clone(), BTreeMap::new())?;
    curve.s()?;
    let mut ft = TruncatedSeries::new(1, max_k as i32);
    for (&b, c) in tilde {
        if b == 0 {
            return Err(Error::InvalidParameter("t~_0 is fixed by t3".into()));
        }
        if b <= max_k {
            ft.add_to(b as i32, c);
        }
    }
    let f = ft.exp_negative()?;
    let mut times = BTreeMap::new();
    for a in 1..=max_k {
        let fa = f.coeff(a as i32)?;
        let t = curve.divide_by_s(&fa)?.scale(&time_weight(a).recip());
        times.insert(a, t);
    }
    curve = SpectralCurve::new(t3.clone(), times)?.with_known_order(max_k);
    Ok(curve)
}

/// `<prod kappa_{b_l} prod psi_i^{d_i}>_{g,n}` keyed by sorted psi vector and
/// sorted kappa partition (all `b_l >= 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTable {
    pub g: u32,
    pub n: u32,
    pub entries: BTreeMap<(Vec<u32>, Vec<u32>), Rational>,
}

impl IntersectionTable {
    pub fn get(&self, kappa: &[u32], psi: &[u32]) -> Option<&Rational> {
        let mut kappa = kappa.to_vec();
        kappa.sort_unstable();
        let mut psi = psi.to_vec();
        psi.sort_unstable();
        self.entries.get(&(psi, kappa))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(
                    |((psi, kappa), v)| json!({"kappa": kappa, "psi": psi, "value": v.to_string()}),
                )
                .collect(),
        )
    }
}

impl fmt::Display for IntersectionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((psi, kappa), v) in &self.entries {
            let mut factors: Vec<String> = kappa.iter().map(|b| format!("kappa_{b}")).collect();
            for (i, &d) in psi.iter().enumerate() {
                match d {
                    0 => {}
                    1 => factors.push(format!("psi_{}", i + 1)),
                    _ => factors.push(format!("psi_{}^{d}", i + 1)),
                }
            }
            let body = if factors.is_empty() {
                "1".to_string()
            } else {
                factors.join(" ")
            };
            writeln!(f, "<{body}>_{{{},{}}} = {v}", self.g, self.n)?;
        }
        Ok(())
    }
}

/// Partitions of `n` into positive parts, each sorted ascending, ordered by
/// number of parts.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            let mut p = prefix.clone();
            p.reverse();
            out.push(p);
            return;
        }
        for part in (1..=rest.min(max_part)).rev() {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out.sort_by_key(|p| p.len());
    out
}

/// Non-decreasing vectors of length `n` with entries summing to at most `budget`.
fn sorted_vectors(n: u32, budget: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, min: u32, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n as usize {
            out.push(prefix.clone());
            return;
        }
        let slots = n - prefix.len() as u32;
        let mut v = min;
        while v * slots <= budget {
            prefix.push(v);
            go(n, v, budget - v, prefix, out);
            prefix.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    go(n, 0, budget, &mut Vec::new(), &mut out);
    out
}

/// `prod t~_{nu_l} / prod_j (multiplicity of j)!` for every partition of
/// every `d0 <= top`.
fn kappa_weights(tilde: &ConjugatedTimes, top: u32) -> Result<HashMap<Vec<u32>, Coefficient>> {
    let mut out = HashMap::new();
    for d0 in 0..=top {
        for nu in partitions(d0) {
            let mut w = Coefficient::one();
            for &b in &nu {
                let t = tilde.get(b).ok_or_else(|| {
                    Error::InvalidParameter(format!("t~_{b} beyond computed order"))
                })?;
                w = &w * &t;
            }
            let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
            for &b in &nu {
                *mult.entry(b).or_default() += 1;
            }
            let denom: Rational = mult.values().map(|&m| factorial(m)).product();
            out.insert(nu, w.scale(&denom.recip()));
        }
    }
    Ok(out)
}

/// `2^{-d} (-1)^{2g-2+n} prod_i (2 d_i + 1)!/d_i!`, the rational part of the
/// prefactor multiplying `s^{2g-2+n}`.
fn structure_constant(g: u32, n: u32, d: &[u32]) -> Rational {
    let top = dimension(g, n) as i32;
    let chi = 2 * g as i64 - 2 + n as i64;
    let sign = if chi % 2 == 0 { int(1) } else { int(-1) };
    let two_pow = num_traits::pow(int(2), top as usize).recip();
    let weights: Rational = d.iter().map(|&di| time_weight(di)).product();
    sign * two_pow * weights
}

/// `s^k prod_l t_{2 mu_l + 3}`.
fn x_monomial(extra_s: u32, mu: &[u32]) -> Monomial {
    mu.iter()
        .fold(Monomial::one().with(Generator::s(), extra_s), |m, &a| {
            m.with(Generator::time(2 * a + 3), 1)
        })
}

fn require_formal(curve: &SpectralCurve, top: u32) -> Result<()> {
    if *curve.t3() != Time3::Symbolic {
        return Err(Error::NonFormalTimes("t3 must be symbolic".into()));
    }
    for k in 1..=top {
        if curve.time(k) != Coefficient::var(Generator::time(2 * k + 3)) {
            return Err(Error::NonFormalTimes(format!(
                "t{} must be the generator t{}",
                2 * k + 3,
                2 * k + 3
            )));
        }
    }
    for (&k, t) in curve.times() {
        let gens = t.generators();
        if gens.contains(&Generator::s()) {
            return Err(Error::NonFormalTimes(format!("t{} involves s", 2 * k + 3)));
        }
    }
    Ok(())
}

/// Inverts the kappa/psi expansion of `W_{g,n}` on a formal curve.
///
/// Matching monomials `prod (s t_{2a+3})` is triangular under refinement of
/// partitions, since `t~_b = (2b+1)!/b! s t_{2b+3} + (products of lower terms)`.
pub fn mumford_decompose(w: &Correlator, curve: &SpectralCurve) -> Result<IntersectionTable> {
    let (g, n) = (w.g, w.n);
    if !is_stable(g, n) {
        return Err(Error::UnstablePair { g, n });
    }
    let top = dimension(g, n) as u32;
    require_formal(curve, top)?;
    let chi = 2 * g + n - 2;
    let tilde = conjugate_times(curve, top.max(1))?;
    let weights = kappa_weights(&tilde, top)?;

    let mut entries = BTreeMap::new();
    for psi in sorted_vectors(n, top) {
        let d0 = top - psi.iter().sum::<u32>();
        let wd = w.coeff(&psi).scale(&structure_constant(g, n, &psi).recip());
        let mut solved: Vec<(Vec<u32>, Rational)> = Vec::new();
        for mu in partitions(d0) {
            let target = x_monomial(mu.len() as u32, &mu);
            let mut rhs = wd.coeff_of(&x_monomial(chi + mu.len() as u32, &mu));
            for (nu, value) in &solved {
                rhs -= value * weights[nu].coeff_of(&target);
            }
            let diag = weights[&mu].coeff_of(&target);
            if diag.is_zero() {
                return Err(Error::SingularSystem(format!(
                    "zero pivot for kappa partition {mu:?}"
                )));
            }
            solved.push((mu, rhs / diag));
        }
        for (kappa, value) in solved {
            entries.insert((psi.clone(), kappa), value);
        }
    }
    Ok(IntersectionTable { g, n, entries })
}

/// The forward expansion: builds `W_{g,n}` on `curve` from intersection numbers,
/// `c_d = 2^{-d_{g,n}} (t3 - 2)^{2-2g-n} prod (2d_i+1)!/d_i!
///        sum_k 1/k! sum_b prod t~_{b_l} <prod kappa_{b_l} prod psi_i^{d_i}>`.
pub fn mumford_compose(table: &IntersectionTable, curve: &SpectralCurve) -> Result<Correlator> {
    let (g, n) = (table.g, table.n);
    let top = dimension(g, n) as u32;
    let chi = 2 * g + n - 2;
    let tilde = conjugate_times(curve, top.max(1))?;
    let weights = kappa_weights(&tilde, top)?;
    let s_pow = curve.s()?.pow(chi);
    let mut out = Correlator::new(g, n);
    for ((psi, kappa), value) in &table.entries {
        let contribution = weights
            .get(kappa)
            .ok_or_else(|| Error::InvalidParameter(format!("kappa partition {kappa:?} too large")))?
            .scale(value);
        for index in permutations(psi) {
            let c = (&s_pow * &contribution).scale(&structure_constant(g, n, &index));
            let slot = out.terms.entry(index).or_default();
            *slot += &c;
        }
    }
    out.terms.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Weil-Petersson volume `V_{g,n}` as a polynomial in `u = pi^2` and `P_i^2`.
///
/// The Laplace transform of the correlator carries `(t3 - 2)^{2-2g-n} = (-1)^n`
/// on this curve; the sign is removed so the result is the positive volume.
pub fn wp_volume(g: u32, n: u32, order: u32) -> Result<VolumePolynomial> {
    let engine = Engine::new(SpectralCurve::weil_petersson(order))?;
    let w = engine.correlator(g, n)?;
    let mut v = laplace_to_volume(&w);
    if n % 2 == 1 {
        for c in v.terms.values_mut() {
            *c = -std::mem::take(c);
        }
    }
    Ok(v)
}

/// Pure psi-class intersection numbers `<tau_{d_1} ... tau_{d_n}>_g`, from the
/// string and dilaton equations and the genus-0 closed form only.
///
/// Returns `Ok(None)` when those reductions cannot reach a seed.
pub fn psi_oracle(g: u32, d: &[u32]) -> Result<Option<Rational>> {
    let n = d.len() as u32;
    let expected = dimension(g, n);
    let sum: u32 = d.iter().sum();
    if sum as i64 != expected {
        return Err(Error::DimensionMismatch { sum, expected });
    }
    Ok(oracle(g, d))
}

fn oracle(g: u32, d: &[u32]) -> Option<Rational> {
    let n = d.len();
    if g == 0 {
        if n < 3 {
            return None;
        }
        let denom: Rational = d.iter().map(|&x| factorial(x)).product();
        return Some(factorial(n as u32 - 3) / denom);
    }
    if g == 1 && d == [1] {
        return Some(rat(1, 24));
    }
    if let Some(i) = d.iter().position(|&x| x == 0) {
        // string equation
        let mut rest = d.to_vec();
        rest.remove(i);
        if rest.is_empty() || !is_stable(g, rest.len() as u32) {
            return None;
        }
        let mut total = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] == 0 {
                continue;
            }
            let mut lowered = rest.clone();
            lowered[j] -= 1;
            total += oracle(g, &lowered)?;
        }
        return Some(total);
    }
    if let Some(i) = d.iter().position(|&x| x == 1) {
        // dilaton equation
        let mut rest = d.to_vec();
        rest.remove(i);
        if rest.is_empty() || !is_stable(g, rest.len() as u32) {
            return None;
        }
        let chi = 2 * g as i64 - 2 + rest.len() as i64;
        return Some(int(chi) * oracle(g, &rest)?);
    }
    None
}
