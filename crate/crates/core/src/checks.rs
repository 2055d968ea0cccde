//! Self-consistency suites run by `mumford check` and the acceptance tests.
//!
//! Every suite takes a budget `b` and covers the stable pairs with
//! `2g - 2 + n <= b`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{factorial, int, rat, Coefficient, Generator, Rational};
use crate::curve::{SpectralCurve, Time3};
use crate::error::{Error, Result};
use crate::moduli::{
    conjugate_times, inverse_conjugate_times, laplace_to_volume, mumford_compose,
    mumford_decompose, psi_oracle, volume_to_laplace, wp_volume,
};
use crate::recursion::{dimension, stable_pairs, Correlator, Engine};

pub const MAX_BUDGET: u32 = 5;

const GOLDEN: [(&str, &str); 4] = [
    ("w03", include_str!("../fixtures/w03.json")),
    ("w11", include_str!("../fixtures/w11.json")),
    ("w12", include_str!("../fixtures/w12.json")),
    ("w21", include_str!("../fixtures/w21.json")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Golden correlators, extracted intersection numbers, WP volumes and
    /// conjugated-time closed forms.
    Identities,
    /// `(2 - 2g - n) W_{g,n} = Res Phi W_{g,n+1}`.
    Dilaton,
    /// Laplace, conjugation and kappa/psi re-substitution inverses.
    Roundtrips,
    /// Airy intersection numbers against the string/dilaton oracle.
    Oracle,
    /// Symmetry, bracket parity, degree bounds, specialization, determinism.
    Structure,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Identities,
        Suite::Dilaton,
        Suite::Roundtrips,
        Suite::Oracle,
        Suite::Structure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Dilaton => "dilaton",
            Suite::Roundtrips => "roundtrips",
            Suite::Oracle => "oracle",
            Suite::Structure => "structure",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub budget: u32,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| match &c.detail {
                Some(d) => json!({"name": c.name, "passed": c.passed, "detail": d}),
                None => json!({"name": c.name, "passed": c.passed}),
            })
            .collect();
        json!({
            "suite": self.suite.name(),
            "budget": self.budget,
            "passed": self.passed(),
            "checks": checks,
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            match &c.detail {
                Some(d) => writeln!(f, "{status} {}: {d}", c.name)?,
                None => writeln!(f, "{status} {}", c.name)?,
            }
        }
        write!(
            f,
            "{} {}/{} passed",
            self.suite,
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        )
    }
}

#[derive(Default)]
struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn record(&mut self, name: impl Into<String>, outcome: Result<bool>) {
        let (passed, detail) = match outcome {
            Ok(true) => (true, None),
            Ok(false) => (false, Some("mismatch".to_string())),
            Err(e) => (false, Some(e.to_string())),
        };
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn expect_eq<T: PartialEq + fmt::Display>(
        &mut self,
        name: impl Into<String>,
        got: Result<T>,
        want: T,
    ) {
        let (passed, detail) = match got {
            Ok(v) if v == want => (true, None),
            Ok(v) => (false, Some(format!("got {v}, expected {want}"))),
            Err(e) => (false, Some(e.to_string())),
        };
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }
}

pub fn run_suite(suite: Suite, budget: u32) -> Result<Report> {
    if budget > MAX_BUDGET {
        return Err(Error::InvalidParameter(format!(
            "budget {budget} exceeds {MAX_BUDGET}"
        )));
    }
    let mut rec = Recorder::default();
    match suite {
        Suite::Identities => identities(budget, &mut rec),
        Suite::Dilaton => dilaton(budget, &mut rec),
        Suite::Roundtrips => roundtrips(budget, &mut rec),
        Suite::Oracle => oracle(budget, &mut rec),
        Suite::Structure => structure(budget, &mut rec),
    }
    Ok(Report {
        suite,
        budget,
        checks: rec.checks,
    })
}

fn chi(g: u32, n: u32) -> u32 {
    2 * g + n - 2
}

/// Largest `d_{g,n}` over the pairs within `budget`, at least one.
fn order_for(budget: u32) -> u32 {
    stable_pairs(budget)
        .into_iter()
        .map(|(g, n)| dimension(g, n) as u32)
        .max()
        .unwrap_or(0)
        .max(1)
}

fn pair_name(prefix: &str, g: u32, n: u32) -> String {
    format!("{prefix}_g{g}_n{n}")
}

pub fn golden(name: &str) -> Option<Correlator> {
    GOLDEN.iter().find(|(n, _)| *n == name).map(|(_, text)| {
        let doc: Value = serde_json::from_str(text).expect("fixture is valid JSON");
        Correlator::from_json(&doc).expect("fixture is a valid correlator")
    })
}

/// The finite-sum form
/// `t~_b = sum_l (-1)^l/l sum_{a_1+..+a_l=b} prod (2a_j+1)!/a_j! t_{2a_j+3}/(t3-2)`,
/// with `1/(t3 - 2) = -s`.
pub fn conjugated_time_closed_form(curve: &SpectralCurve, b: u32) -> Result<Coefficient> {
    let minus_s = -curve.s()?;
    let mut total = Coefficient::zero();
    for l in 1..=b {
        let sign = if l % 2 == 0 { int(1) } else { int(-1) };
        let mut inner = Coefficient::zero();
        for parts in compositions(b, l) {
            let mut term = Coefficient::one();
            for a in parts {
                let w = factorial(2 * a + 1) / factorial(a);
                term = &term * &(&curve.time(a) * &minus_s).scale(&w);
            }
            inner += &term;
        }
        total += &inner.scale(&(sign / int(l as i64)));
    }
    Ok(total)
}

fn compositions(total: u32, parts: u32) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `(g, n, kappa, psi, value)`
type Intersection = (u32, u32, &'static [u32], &'static [u32], Rational);

fn identities(budget: u32, rec: &mut Recorder) {
    let formal = Engine::new(SpectralCurve::formal(order_for(budget))).expect("formal curve");
    for (name, g, n) in [("w03", 0, 3), ("w11", 1, 1), ("w12", 1, 2), ("w21", 2, 1)] {
        if chi(g, n) > budget {
            continue;
        }
        let want = golden(name).expect("fixture exists");
        rec.record(
            format!("golden_{name}"),
            formal.correlator(g, n).map(|w| *w == want),
        );
    }

    let expected: [Intersection; 7] = [
        (0, 3, &[], &[0, 0, 0], int(1)),
        (1, 1, &[], &[1], rat(1, 24)),
        (1, 1, &[1], &[0], rat(1, 24)),
        // <tau_0 tau_1 tau_2>_1; the weight (2d+1)!/d! = 6 is easy to drop here
        (1, 2, &[1], &[0, 1], rat(1, 12)),
        (1, 2, &[1, 1], &[0, 0], rat(1, 8)),
        (1, 2, &[2], &[0, 0], rat(1, 24)),
        (2, 1, &[], &[4], rat(1, 1152)),
    ];
    for (g, n, kappa, psi, value) in expected {
        if chi(g, n) > budget {
            continue;
        }
        let got = formal
            .correlator(g, n)
            .and_then(|w| mumford_decompose(&w, formal.curve()))
            .and_then(|t| {
                t.get(kappa, psi)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput("entry missing".into()))
            });
        rec.expect_eq(
            format!("intersection_g{g}_n{n}_kappa{kappa:?}_psi{psi:?}"),
            got,
            value,
        );
    }

    let volumes = [
        (0, 3, "1"),
        (1, 1, "P1^2/48 + u/12"),
        (0, 4, "P1^2/2 + P2^2/2 + P3^2/2 + P4^2/2 + 2*u"),
    ];
    for (g, n, text) in volumes {
        if chi(g, n) > budget {
            continue;
        }
        let want: Coefficient = text.parse().expect("valid polynomial");
        rec.expect_eq(
            pair_name("wp_volume", g, n),
            wp_volume(g, n, dimension(g, n) as u32).map(|v| v.as_polynomial()),
            want,
        );
    }

    let closed_forms = [
        "6*s*t5",
        "60*s*t7 + 18*s^2*t5^2",
        "840*s*t9 + 360*s^2*t5*t7 + 72*s^3*t5^3",
    ];
    match conjugate_times(&SpectralCurve::formal(3), 3) {
        Ok(ct) => {
            for (b, text) in (1..).zip(closed_forms) {
                let want: Coefficient = text.parse().expect("valid polynomial");
                rec.expect_eq(format!("conjugated_time_{b}"), Ok(ct.get(b).unwrap()), want);
            }
        }
        Err(e) => rec.record("conjugated_times", Err(e)),
    }
    for b in 1..=5 {
        let curve = SpectralCurve::formal(5);
        let got = conjugate_times(&curve, 5).map(|ct| ct.get(b).unwrap());
        rec.expect_eq(
            format!("conjugated_time_{b}_finite_sum"),
            got,
            conjugated_time_closed_form(&curve, b).expect("formal curve"),
        );
    }
    match conjugate_times(&SpectralCurve::weil_petersson(6), 6) {
        Ok(ct) => {
            let four_u = Coefficient::var(Generator::u()).scale(&int(4));
            rec.expect_eq("wp_conjugated_time_1", Ok(ct.get(1).unwrap()), four_u);
            for b in 2..=6 {
                rec.expect_eq(
                    format!("wp_conjugated_time_{b}"),
                    Ok(ct.get(b).unwrap()),
                    Coefficient::zero(),
                );
            }
        }
        Err(e) => rec.record("wp_conjugated_times", Err(e)),
    }
}

fn dilaton(budget: u32, rec: &mut Recorder) {
    let engine = Engine::new(SpectralCurve::formal(order_for(budget))).expect("formal curve");
    for (g, n) in stable_pairs(budget.saturating_sub(1)) {
        rec.record(
            format!("dilaton_g{g}_n{n}_to_n{}", n + 1),
            engine.dilaton_check(g, n),
        );
    }
    if budget >= 3 {
        // F_2 vanishes on the Airy curve
        let airy = Engine::new(SpectralCurve::airy()).expect("airy curve");
        rec.expect_eq(
            "free_energy_g2_airy",
            airy.free_energy(2).map(|f| f.value),
            Coefficient::zero(),
        );
    }
}

fn roundtrips(budget: u32, rec: &mut Recorder) {
    let order = order_for(budget);
    let formal = Engine::new(SpectralCurve::formal(order)).expect("formal curve");
    let wide = Engine::new(SpectralCurve::formal(order + 2)).expect("formal curve");
    let airy = Engine::new(SpectralCurve::airy()).expect("airy curve");
    let wp = Engine::new(SpectralCurve::weil_petersson(order)).expect("wp curve");
    for (g, n) in stable_pairs(budget) {
        let w = match formal.correlator(g, n) {
            Ok(w) => w,
            Err(e) => {
                rec.record(pair_name("correlator", g, n), Err(e));
                continue;
            }
        };
        rec.record(
            pair_name("laplace_roundtrip", g, n),
            Ok(volume_to_laplace(&laplace_to_volume(&w)) == *w),
        );
        let v = laplace_to_volume(&w);
        rec.record(
            pair_name("laplace_inverse_roundtrip", g, n),
            Ok(laplace_to_volume(&volume_to_laplace(&v)) == v),
        );
        let table = match mumford_decompose(&w, formal.curve()) {
            Ok(t) => t,
            Err(e) => {
                rec.record(pair_name("decompose", g, n), Err(e));
                continue;
            }
        };
        rec.record(
            pair_name("resubstitution", g, n),
            mumford_compose(&table, formal.curve()).map(|c| c == *w),
        );
        rec.record(
            pair_name("decompose_ignores_extra_times", g, n),
            wide.correlator(g, n)
                .and_then(|w| mumford_decompose(&w, wide.curve()))
                .map(|t| t == table),
        );
        for (label, engine) in [("airy", &airy), ("wp", &wp)] {
            rec.record(
                pair_name(&format!("compose_on_{label}"), g, n),
                engine
                    .correlator(g, n)
                    .and_then(|w| mumford_compose(&table, engine.curve()).map(|c| c == *w)),
            );
        }
    }

    let k = 6;
    let formal = SpectralCurve::formal(k);
    rec.record(
        "conjugate_then_invert_formal",
        conjugate_times(&formal, k)
            .and_then(|ct| inverse_conjugate_times(&ct.tilde, &Time3::Symbolic, k))
            .map(|c| c.times() == formal.times()),
    );
    let wp = SpectralCurve::weil_petersson(k);
    let tilde = BTreeMap::from([(1, Coefficient::var(Generator::u()).scale(&int(4)))]);
    rec.record(
        "invert_wp_conjugated_times",
        inverse_conjugate_times(&tilde, &Time3::Value(int(1)), k).map(|c| c.times() == wp.times()),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..5 {
        let tilde: BTreeMap<u32, Coefficient> = (1..=k)
            .map(|b| (b, Coefficient::constant(random_rational(&mut rng))))
            .collect();
        let t3 = random_rational(&mut rng);
        if t3 == int(2) {
            continue;
        }
        rec.record(
            format!("invert_then_conjugate_random_{trial}"),
            inverse_conjugate_times(&tilde, &Time3::Value(t3), k)
                .and_then(|c| conjugate_times(&c, k))
                .map(|ct| (1..=k).all(|b| ct.get(b).as_ref() == tilde.get(&b))),
        );
    }
}

fn oracle(budget: u32, rec: &mut Recorder) {
    let formal = Engine::new(SpectralCurve::formal(order_for(budget))).expect("formal curve");
    for (g, n) in stable_pairs(budget) {
        let table = match formal
            .correlator(g, n)
            .and_then(|w| mumford_decompose(&w, formal.curve()))
        {
            Ok(t) => t,
            Err(e) => {
                rec.record(pair_name("decompose", g, n), Err(e));
                continue;
            }
        };
        for ((psi, kappa), value) in &table.entries {
            if !kappa.is_empty() || psi.iter().sum::<u32>() as i64 != dimension(g, n) {
                continue;
            }
            match psi_oracle(g, psi) {
                Ok(Some(want)) => {
                    rec.expect_eq(format!("oracle_g{g}_psi{psi:?}"), Ok(value.clone()), want)
                }
                Ok(None) => {}
                Err(e) => rec.record(format!("oracle_g{g}_psi{psi:?}"), Err(e)),
            }
        }
    }
}

fn structure(budget: u32, rec: &mut Recorder) {
    let order = order_for(budget);
    let formal_curve = SpectralCurve::formal(order);
    let formal = Engine::new(formal_curve.clone()).expect("formal curve");
    let airy = Engine::new(SpectralCurve::airy()).expect("airy curve");
    for (g, n) in stable_pairs(budget) {
        let top = dimension(g, n) as u32;
        rec.record(
            pair_name("symmetric", g, n),
            formal.correlator(g, n).map(|w| w.is_symmetric()),
        );
        rec.record(
            pair_name("degree_bound", g, n),
            formal
                .correlator(g, n)
                .map(|w| w.terms.keys().all(|d| d.iter().sum::<u32>() <= top)),
        );
        rec.record(
            pair_name("airy_degree_equality", g, n),
            airy.correlator(g, n).map(|w| {
                !w.terms.is_empty() && w.terms.keys().all(|d| d.iter().sum::<u32>() == top)
            }),
        );
        rec.record(
            pair_name("bracket_even", g, n),
            formal
                .bracket(g, n - 1)
                .map(|b| b.values().all(|series| series.is_even())),
        );
        let again = Engine::new(formal_curve.clone()).expect("formal curve");
        rec.record(
            pair_name("deterministic", g, n),
            formal
                .correlator(g, n)
                .and_then(|a| again.correlator(g, n).map(|b| a.to_json() == b.to_json())),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x1234_5678);
    let generators: Vec<Generator> = std::iter::once(Generator::s())
        .chain((1..=order).map(|k| Generator::time(2 * k + 3)))
        .collect();
    for trial in 0..20 {
        let assignment: BTreeMap<Generator, Rational> = generators
            .iter()
            .map(|g| {
                let mut v = random_rational(&mut rng);
                while g == &Generator::s() && v.is_zero() {
                    v = random_rational(&mut rng);
                }
                (g.clone(), v)
            })
            .collect();
        let outcome = formal_curve
            .specialize(&assignment)
            .and_then(Engine::new)
            .and_then(|special| {
                for (g, n) in stable_pairs(budget) {
                    let generic = formal.correlator(g, n)?;
                    let direct = special.correlator(g, n)?;
                    let mut via = generic.map_coefficients(|c| c.specialize(&assignment));
                    via.terms.retain(|_, c| !c.is_zero());
                    if via != *direct {
                        return Ok(false);
                    }
                }
                Ok(true)
            });
        rec.record(format!("specialization_commutes_{trial}"), outcome);
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(
        rng.gen_range(-9i64..=9).into(),
        rng.gen_range(1i64..=7).into(),
    )
}
