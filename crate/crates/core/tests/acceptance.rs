//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mumford_core::algebra::{int, rat};
use mumford_core::checks::{self, conjugated_time_closed_form, Suite};
use mumford_core::{
    conjugate_times, dimension, inverse_conjugate_times, laplace_to_volume, mumford_compose,
    mumford_decompose, wp_volume, Coefficient, Correlator, Engine, Generator, Rational,
    SpectralCurve, Time3,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn poly(text: &str) -> Coefficient {
    text.parse().expect("valid polynomial")
}

fn formal_correlator(g: u32, n: u32) -> Result<Correlator, String> {
    let engine = Engine::new(SpectralCurve::formal(dimension(g, n).max(1) as u32))
        .map_err(|e| e.to_string())?;
    engine
        .correlator(g, n)
        .map(|w| (*w).clone())
        .map_err(|e| e.to_string())
}

fn golden_match(name: &str, g: u32, n: u32) -> Outcome {
    let want = checks::golden(name).ok_or("missing fixture")?;
    let got = formal_correlator(g, n)?;
    if got == want {
        Ok(format!("{} terms", got.terms.len()))
    } else {
        Err(format!("engine:\n{got}\nexpected:\n{want}"))
    }
}

fn w03() -> Outcome {
    golden_match("w03", 0, 3)
}

fn w11() -> Outcome {
    golden_match("w11", 1, 1)
}

fn w12() -> Outcome {
    golden_match("w12", 1, 2)
}

fn w21() -> Outcome {
    golden_match("w21", 2, 1)
}

type Intersection = (u32, u32, &'static [u32], &'static [u32], Rational);

fn intersections() -> Outcome {
    let expected: [Intersection; 7] = [
        (1, 1, &[], &[1], rat(1, 24)),
        (1, 1, &[1], &[0], rat(1, 24)),
        (1, 2, &[1], &[0, 1], rat(1, 2)),
        (1, 2, &[1, 1], &[0, 0], rat(1, 8)),
        (1, 2, &[2], &[0, 0], rat(1, 24)),
        (0, 3, &[], &[0, 0, 0], int(1)),
        (2, 1, &[], &[4], rat(1, 1152)),
    ];
    let mut wrong = Vec::new();
    for (g, n, kappa, psi, want) in expected {
        let curve = SpectralCurve::formal(dimension(g, n).max(1) as u32);
        let w = formal_correlator(g, n)?;
        let table = mumford_decompose(&w, &curve).map_err(|e| e.to_string())?;
        match table.get(kappa, psi) {
            Some(v) if *v == want => {}
            Some(v) => wrong.push(format!(
                "g={g} kappa={kappa:?} psi={psi:?}: got {v}, expected {want}"
            )),
            None => wrong.push(format!("g={g} kappa={kappa:?} psi={psi:?}: missing")),
        }
    }
    if wrong.is_empty() {
        Ok("7 values".into())
    } else {
        Err(wrong.join("; "))
    }
}

fn weil_petersson() -> Outcome {
    let cases = [
        (0, 3, "1"),
        (1, 1, "P1^2/48 + u/12"),
        (0, 4, "2*u + P1^2/2 + P2^2/2 + P3^2/2 + P4^2/2"),
    ];
    for (g, n, text) in cases {
        let top = dimension(g, n) as u32;
        let v = wp_volume(g, n, top).map_err(|e| e.to_string())?;
        if v.as_polynomial() != poly(text) {
            return Err(format!("V_{g},{n} = {v}, expected {text}"));
        }
        // second route: extracted intersection numbers re-expanded on the WP curve
        let formal = SpectralCurve::formal(top.max(1));
        let table =
            mumford_decompose(&formal_correlator(g, n)?, &formal).map_err(|e| e.to_string())?;
        let w = mumford_compose(&table, &SpectralCurve::weil_petersson(top.max(1)))
            .map_err(|e| e.to_string())?;
        let sign = if n % 2 == 0 { int(1) } else { int(-1) };
        if laplace_to_volume(&w).as_polynomial().scale(&sign) != poly(text) {
            return Err(format!("V_{g},{n} via intersection numbers disagrees"));
        }
    }
    Ok("V03, V11, V04".into())
}

fn conjugation() -> Outcome {
    let ct = conjugate_times(&SpectralCurve::formal(3), 3).map_err(|e| e.to_string())?;
    let closed_forms = [
        "6*s*t5",
        "60*s*t7 + 18*s^2*t5^2",
        "840*s*t9 + 360*s^2*t5*t7 + 72*s^3*t5^3",
    ];
    for (b, text) in (1..).zip(closed_forms) {
        if ct.get(b) != Some(poly(text)) {
            return Err(format!("t~{b} = {:?}", ct.get(b).map(|c| c.to_string())));
        }
    }
    let wp = conjugate_times(&SpectralCurve::weil_petersson(6), 6).map_err(|e| e.to_string())?;
    if wp.get(1) != Some(poly("4*u")) || (2..=6).any(|b| wp.get(b) != Some(Coefficient::zero())) {
        return Err("WP conjugated times are not 4u delta_{b,1}".into());
    }

    let order = 6;
    let formal = SpectralCurve::formal(order);
    let ct = conjugate_times(&formal, order).map_err(|e| e.to_string())?;
    let back =
        inverse_conjugate_times(&ct.tilde, &Time3::Symbolic, order).map_err(|e| e.to_string())?;
    if back.times() != formal.times() {
        return Err("inverse(conjugate(formal)) differs".into());
    }
    let tilde_wp = BTreeMap::from([(1, poly("4*u"))]);
    let back = inverse_conjugate_times(&tilde_wp, &Time3::Value(int(1)), order)
        .map_err(|e| e.to_string())?;
    if back.times() != SpectralCurve::weil_petersson(order).times() {
        return Err("inverse of WP conjugated times differs from the WP curve".into());
    }
    let symbolic: BTreeMap<u32, Coefficient> = (1..=order)
        .map(|b| {
            (
                b,
                Coefficient::var(Generator::new(format!("T{b}")).unwrap()),
            )
        })
        .collect();
    for t3 in [int(3), rat(-1, 2), rat(7, 3)] {
        let curve = inverse_conjugate_times(&symbolic, &Time3::Value(t3.clone()), order)
            .map_err(|e| e.to_string())?;
        let again = conjugate_times(&curve, order).map_err(|e| e.to_string())?;
        if (1..=order).any(|b| again.get(b).as_ref() != symbolic.get(&b)) {
            return Err(format!("conjugate(inverse(T)) differs at t3 = {t3}"));
        }
    }
    Ok("b <= 3 closed forms, WP, both round-trips to order 6".into())
}

fn suite(suite: Suite, budget: u32) -> Result<usize, String> {
    let report = checks::run_suite(suite, budget).map_err(|e| e.to_string())?;
    if report.passed() {
        Ok(report.checks.len())
    } else {
        let failed: Vec<String> = report
            .failures()
            .map(|c| format!("{} ({})", c.name, c.detail.clone().unwrap_or_default()))
            .collect();
        Err(format!("{suite}: {}", failed.join(", ")))
    }
}

fn properties() -> Outcome {
    let mut total = 0;
    for s in [Suite::Structure, Suite::Dilaton, Suite::Roundtrips] {
        total += suite(s, 4)?;
    }
    Ok(format!("{total} checks"))
}

fn oracle() -> Outcome {
    let count = suite(Suite::Oracle, 4)?;
    if count == 0 {
        return Err("oracle reached no values".into());
    }
    Ok(format!("{count} oracle values"))
}

fn discrepancies() -> Outcome {
    // W_{0,4} from <psi_i>_{0,4} = <kappa_1>_{0,4} = 1: 3 s^2 per psi insertion, 3 s^3 t5
    let w04 = formal_correlator(0, 4)?;
    if w04.coeff(&[1, 0, 0, 0]) != poly("3*s^2") || w04.coeff(&[0, 0, 0, 0]) != poly("3*s^3*t5") {
        return Err(format!("unexpected W04:\n{w04}"));
    }
    let curve = SpectralCurve::formal(2);
    let engine = Engine::new(curve.clone()).map_err(|e| e.to_string())?;
    let table = mumford_decompose(&w04, &curve).map_err(|e| e.to_string())?;
    if mumford_compose(&table, &curve).map_err(|e| e.to_string())? != w04 {
        return Err("W04 re-substitution failed".into());
    }
    for (g, n) in [(0, 3), (0, 4)] {
        if !engine.dilaton_check(g, n).map_err(|e| e.to_string())? {
            return Err(format!("dilaton ({g},{n}) -> ({g},{}) failed", n + 1));
        }
    }
    // t_k = lambda^-k gives t~1 = -6 lambda^-2 / (1 - 2 lambda^3)
    for lambda in [rat(1, 2), int(2), rat(-3, 5)] {
        let curve = SpectralCurve::discrete(&lambda, 3).map_err(|e| e.to_string())?;
        let t1 = conjugate_times(&curve, 1)
            .map_err(|e| e.to_string())?
            .get(1)
            .unwrap();
        let l3 = &lambda * &lambda * &lambda;
        let want = -int(6) / (&lambda * &lambda * (int(1) - int(2) * l3));
        if t1 != Coefficient::constant(want.clone()) {
            return Err(format!("lambda = {lambda}: t~1 = {t1}, expected {want}"));
        }
        if t1 != conjugated_time_closed_form(&curve, 1).map_err(|e| e.to_string())? {
            return Err("series and finite sum disagree".into());
        }
    }
    Ok("W04 consistent, discrete t~1 sign".into())
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "golden W03",
            limit: Duration::from_secs(1),
            run: w03,
        },
        Criterion {
            id: 2,
            title: "golden W11",
            limit: Duration::from_secs(1),
            run: w11,
        },
        Criterion {
            id: 3,
            title: "golden W12",
            limit: Duration::from_secs(5),
            run: w12,
        },
        Criterion {
            id: 4,
            title: "golden W21",
            limit: Duration::from_secs(60),
            run: w21,
        },
        Criterion {
            id: 5,
            title: "intersection extraction",
            limit: Duration::MAX,
            run: intersections,
        },
        Criterion {
            id: 6,
            title: "Weil-Petersson volumes",
            limit: Duration::from_secs(5),
            run: weil_petersson,
        },
        Criterion {
            id: 7,
            title: "conjugated times",
            limit: Duration::MAX,
            run: conjugation,
        },
        Criterion {
            id: 8,
            title: "property suites",
            limit: Duration::from_secs(600),
            run: properties,
        },
        Criterion {
            id: 9,
            title: "oracle equivalence",
            limit: Duration::MAX,
            run: oracle,
        },
        Criterion {
            id: 10,
            title: "documented discrepancies",
            limit: Duration::MAX,
            run: discrepancies,
        },
    ];
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > c.limit => {
                Err(format!("{msg}, but took {elapsed:?} > {:?}", c.limit))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!(
                "PASS criterion {:>2} {}: {msg} [{elapsed:.2?}]",
                c.id, c.title
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "FAIL criterion {:>2} {}: {msg} [{elapsed:.2?}]",
                    c.id, c.title
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
