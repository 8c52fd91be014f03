//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p choquet-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::Instant;

use choquet_core::corpus::{corpus, CorpusEntry, Label};
use choquet_core::distortion::Named;
use choquet_core::distribution::mix;
use choquet_core::verifier::{
    check_m_quasi_concave, check_m_quasi_convex, conflict_check, counterexample_search, pi, search_witness,
    seven_battery, transform_invariance_report, two_point_check, ConflictOutcome, Verdict,
};
use choquet_core::{
    choquet, choquet_numeric_oracle, choquet_rv, classify, is_convex, is_quasi_convex_univariate, Breakpoint,
    CheckConfig, DiscreteDistribution, DistortionFunction, FiniteRandomVariable, QsmParams, TriplePoints, VTransform,
    Witness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cfg() -> CheckConfig {
    CheckConfig {
        grid_resolution: 48,
        random_trials: 300,
        tolerance: 1e-9,
        rng_seed: 7,
        triple: TriplePoints::default(),
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn random_law(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteDistribution {
    let n = rng.gen_range(1..=max_atoms);
    let atoms: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(0.01..1.0)))
        .collect();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    DiscreteDistribution::new(atoms.into_iter().map(|(x, w)| (x, w / total))).unwrap()
}

/// Piecewise-linear `h` with atoms: up to four interior breakpoints, each
/// one-sided limit independently continuous or jumping.
fn random_pwl(rng: &mut ChaCha8Rng) -> DistortionFunction {
    let interior = rng.gen_range(0..=4);
    let mut ts: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.02..0.98)).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut val = || rng.gen_range(-2.0..2.0);
    let mut bps = vec![Breakpoint {
        t: 0.0,
        value: 0.0,
        left: None,
        right: Some(val()),
    }];
    for t in ts {
        bps.push(Breakpoint {
            t,
            value: val(),
            left: Some(val()),
            right: Some(val()),
        });
    }
    bps.push(Breakpoint {
        t: 1.0,
        value: val(),
        left: Some(val()),
        right: None,
    });
    DistortionFunction::new(&bps).unwrap()
}

fn random_named(rng: &mut ChaCha8Rng) -> DistortionFunction {
    let named = match rng.gen_range(0..6) {
        0 => Named::Identity,
        1 => Named::Power {
            gamma: rng.gen_range(0.3..3.0),
            knots: 256,
        },
        2 => Named::DualPower {
            gamma: rng.gen_range(0.3..3.0),
            knots: 256,
        },
        3 => Named::Cap {
            alpha: rng.gen_range(0.0..0.9),
        },
        4 => Named::IndicatorAbove {
            alpha: rng.gen_range(0.0..0.9),
        },
        _ => Named::Qsm(
            QsmParams::new(
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
            )
            .unwrap(),
        ),
    };
    named.build().unwrap()
}

fn revalidated(w: &Witness, h: &DistortionFunction) -> bool {
    w.revalidate(h, cfg().tolerance)
}

fn summarize(failures: &[String], checked: usize, what: &str) -> Outcome {
    if failures.is_empty() {
        Ok(format!("{checked} {what}"))
    } else {
        Err(format!(
            "{} of {checked} {what} failed: {}",
            failures.len(),
            failures.join("; ")
        ))
    }
}

fn evaluation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let n = 600;
    for i in 0..n {
        let h = if i % 2 == 0 {
            random_named(&mut rng)
        } else {
            random_pwl(&mut rng)
        };
        let f = random_law(&mut rng, 8);
        let (c, o) = (choquet(&h, &f), choquet_numeric_oracle(&h, &f));
        if (c - o).abs() > 1e-8 * (1.0 + c.abs()) {
            failures.push(format!("case {i}: {c} vs {o}"));
        }
    }
    summarize(&failures, n, "random (h, F) pairs")
}

fn three_point_identity() -> Outcome {
    let c = corpus();
    let picks: Vec<&CorpusEntry> = c.iter().step_by(c.len() / 10).take(10).collect();
    let triples = [TriplePoints::default(), TriplePoints::new(2.5, 0.5, -0.75).unwrap()];
    let mut failures = Vec::new();
    let mut checked = 0;
    for e in &picks {
        for t in &triples {
            for i in 0..50 {
                for j in i..50 {
                    let (p, q) = (i as f64 / 49.0, j as f64 / 49.0);
                    let lhs = choquet(&e.h, &DiscreteDistribution::three_point(t, p, q).unwrap());
                    let rhs = t.z * e.h.value_at_one() + pi(&e.h, t, p, q).unwrap();
                    checked += 1;
                    if (lhs - rhs).abs() > 1e-10 {
                        failures.push(format!("{} at ({p}, {q}): {lhs} vs {rhs}", e.name));
                    }
                }
            }
        }
    }
    summarize(
        &failures,
        checked,
        &format!("grid points over {} distortions", picks.len()),
    )
}

fn classifier_search_agreement() -> Outcome {
    let cfg = cfg();
    let mut failures = Vec::new();
    let mut witnesses = 0;
    let entries = corpus();
    for e in &entries {
        for (h, tag) in [(e.h.clone(), ""), (e.h.negate(), " (negated)")] {
            let qcx = classify(&h).quasi_convex_in_mixtures;
            if tag.is_empty() && qcx != (e.label != Label::Neither) {
                failures.push(format!("{}: classifier disagrees with label", e.name));
            }
            let found = counterexample_search(&h, &cfg).unwrap();
            if qcx != found.is_none() {
                failures.push(format!(
                    "{}{tag}: classified {qcx}, search found witness {}",
                    e.name,
                    found.is_some()
                ));
            }
            if let Some(w) = &found {
                if !revalidated(w, &h) {
                    failures.push(format!("{}{tag}: witness does not re-validate", e.name));
                }
                witnesses += 1;
            }
            if qcx {
                if let Some(w) = search_witness(&h, &cfg).unwrap() {
                    failures.push(format!("{}{tag}: unexpected witness margin {}", e.name, w.margin));
                }
            }
        }
    }
    summarize(
        &failures,
        entries.len(),
        &format!("corpus members and their negations agree, {witnesses} re-validated witnesses"),
    )
}

fn battery_coherence() -> Outcome {
    let cfg = cfg();
    let mut failures = Vec::new();
    let mut checked = 0;
    for e in corpus() {
        if !(e.continuous || e.label == Label::Qsm) {
            continue;
        }
        checked += 1;
        let r = seven_battery(&e.h, &cfg).unwrap();
        let truth: Vec<bool> = r.conditions.iter().map(|c| c.verdict.is_true()).collect();
        let witnesses_ok = r
            .conditions
            .iter()
            .filter(|c| c.verdict == Verdict::Refuted)
            .all(|c| c.witness.as_ref().is_some_and(|w| revalidated(w, &e.h)));
        let ok = if e.label == Label::Qsm {
            truth == [false, false, false, false, false, false, true]
        } else if is_convex(&e.h) {
            truth.iter().all(|&t| t)
        } else {
            !truth[6] && truth[1..6].iter().any(|&t| !t)
        };
        if !ok || !r.coherent || !witnesses_ok {
            failures.push(format!(
                "{}: verdicts {truth:?}, coherent {}, witnesses ok {witnesses_ok}",
                e.name, r.coherent
            ));
        }
    }
    summarize(&failures, checked, "continuous and step-form batteries")
}

fn spread_invariance() -> Outcome {
    let cfg = CheckConfig {
        grid_resolution: 32,
        random_trials: 200,
        ..cfg()
    };
    let bases: Vec<CorpusEntry> = corpus()
        .into_iter()
        .filter(|e| e.label != Label::Neither)
        .filter(|e| check_m_quasi_convex(&e.h, &cfg).unwrap().holds())
        .collect();
    if bases.is_empty() {
        return Err("no verified base distortions".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    for i in 0..100 {
        let base = &bases[i % bases.len()];
        let (a, b) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let spread = DistortionFunction::from_qsm(&QsmParams::new(a, b, 0.0, 0.5, 0.0).unwrap()).unwrap();
        let h = spread.add(&base.h);
        if let Some(w) = check_m_quasi_convex(&h, &cfg).unwrap().witness() {
            failures.push(format!("{} + spread({a:.3}, {b:.3}): margin {}", base.name, w.margin));
        }
    }
    summarize(
        &failures,
        100,
        &format!("spread additions over {} verified bases", bases.len()),
    )
}

fn two_point_domain() -> Outcome {
    let cfg = cfg();
    let mut failures = Vec::new();
    let entries = corpus();
    for e in &entries {
        for h in [e.h.clone(), e.h.negate()] {
            let searched = two_point_check(&h, &cfg).unwrap();
            let exact = is_quasi_convex_univariate(&h);
            if searched != exact {
                failures.push(format!("{}: search {searched}, exact {exact}", e.name));
            }
        }
    }
    summarize(&failures, 2 * entries.len(), "distortions (corpus and negations)")
}

fn transform_invariance() -> Outcome {
    let cfg = cfg();
    let transforms: [VTransform; 3] = [
        "affine:0.5,2".parse().unwrap(),
        "power:3".parse().unwrap(),
        "abs:0.25".parse().unwrap(),
    ];
    let c = corpus();
    let picks: Vec<&CorpusEntry> = (0..20).map(|i| &c[i * c.len() / 20]).collect();
    let mut failures = Vec::new();
    for e in &picks {
        for v in &transforms {
            let r = transform_invariance_report(&e.h, v, &cfg).unwrap();
            if !r.agree {
                failures.push(format!(
                    "{} under {v}: classified {}, searched {}",
                    e.name, r.classified_quasi_convex, r.empirical_quasi_convex
                ));
            }
            if let Some(w) = &r.witness {
                if !w.revalidate(&e.h, cfg.tolerance) {
                    failures.push(format!("{} under {v}: witness does not re-validate", e.name));
                }
            }
        }
    }
    summarize(
        &failures,
        picks.len() * transforms.len(),
        "(distortion, transform) pairs",
    )
}

fn quasi_linear_forms() -> Outcome {
    let cfg = cfg();
    let mut failures = Vec::new();
    let mut linear = 0;
    let entries = corpus();
    for e in &entries {
        let form = classify(&e.h).quasi_linear_form;
        if form.is_some() != e.quasi_linear {
            failures.push(format!(
                "{}: form {form:?}, expected quasi-linear {}",
                e.name, e.quasi_linear
            ));
        }
        if e.quasi_linear {
            linear += 1;
            if !check_m_quasi_convex(&e.h, &cfg).unwrap().holds() {
                failures.push(format!("{}: m-quasi-convexity refuted", e.name));
            }
            if !check_m_quasi_concave(&e.h, &cfg).unwrap().holds() {
                failures.push(format!("{}: m-quasi-concavity refuted", e.name));
            }
        }
    }
    summarize(&failures, entries.len(), &format!("members, {linear} quasi-linear"))
}

fn conflict_with_outcome_convexity() -> Outcome {
    let cfg = cfg();
    let mut failures = Vec::new();
    let entries = corpus();
    for e in &entries {
        match conflict_check(&e.h, &cfg) {
            Ok(ConflictOutcome::ScaledMean { k }) => {
                if !e.affine || k != e.h.value_at_one() {
                    failures.push(format!("{}: scaled mean {k} for a non-affine member", e.name));
                }
            }
            Ok(ConflictOutcome::ConflictConfirmed { o_convex, m_convex }) => {
                let ws: Vec<&Witness> = o_convex.iter().chain(m_convex.iter()).collect();
                if e.affine || ws.is_empty() || !ws.iter().all(|w| revalidated(w, &e.h)) {
                    failures.push(format!("{}: conflict with {} witnesses", e.name, ws.len()));
                }
            }
            Err(err) => failures.push(format!("{}: {err}", e.name)),
        }
    }
    summarize(&failures, entries.len(), "members")
}

fn algebraic_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = Vec::new();
    let n = 200;
    for i in 0..n {
        let h = random_pwl(&mut rng);
        let states = rng.gen_range(1..=8);
        let weights: Vec<f64> = (0..states).map(|_| rng.gen_range(0.05..1.0)).collect();
        let space = FiniteRandomVariable::space(&weights).unwrap();
        let mut xs: Vec<f64> = (0..states).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut ys: Vec<f64> = (0..states).map(|_| rng.gen_range(-5.0..5.0)).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let x = FiniteRandomVariable::new(space.clone(), xs).unwrap();
        let y = FiniteRandomVariable::new(space, ys).unwrap();
        let (ix, iy) = (choquet_rv(&h, &x), choquet_rv(&h, &y));
        if !rel_close(choquet_rv(&h, &x.sum(&y).unwrap()), ix + iy, 1e-9) {
            failures.push(format!("case {i}: comonotonic additivity"));
        }
        let c = rng.gen_range(-3.0..3.0);
        if !rel_close(choquet_rv(&h, &x.shift(c)), ix + c * h.value_at_one(), 1e-9) {
            failures.push(format!("case {i}: translation"));
        }
        let s = rng.gen_range(0.1..4.0);
        if !rel_close(choquet_rv(&h, &x.scale(s)), s * ix, 1e-9) {
            failures.push(format!("case {i}: positive homogeneity"));
        }
        let f = random_law(&mut rng, 8);
        if !rel_close(choquet(&h, &f), -choquet(&h.negate(), &f), 1e-9) {
            failures.push(format!("case {i}: sign symmetry"));
        }
        let g = random_law(&mut rng, 8);
        let m = mix(&f, &g, 0.5).unwrap();
        if !choquet(&h, &m).is_finite() {
            failures.push(format!("case {i}: non-finite mixture value"));
        }
    }
    summarize(&failures, n, "instances of each invariant")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = dir.path().join("h.json");
    std::fs::write(
        &spec,
        r#"{"type":"pwl_atoms","breakpoints":[{"t":0.0,"value":0.0,"right":-1.0},{"t":0.3,"value":-0.6,"left":-1.0,"right":0.0},{"t":1.0,"value":1.0,"left":0.0}]}"#,
    )
    .map_err(|e| e.to_string())?;
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_choquet"))
            .args(["check", "--battery", "--seed", "42"])
            .arg(&spec)
            .env_remove("CHOQUET_SEED")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    if !a.status.success() || !b.status.success() {
        return Err(format!("exit codes {:?} and {:?}", a.status.code(), b.status.code()));
    }
    if a.stdout != b.stdout || a.stdout.is_empty() {
        return Err("outputs differ".into());
    }
    serde_json::from_slice::<serde_json::Value>(&a.stdout).map_err(|e| format!("invalid JSON: {e}"))?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("evaluation oracle", evaluation_oracle),
        ("three-point identity", three_point_identity),
        ("classifier and search agreement", classifier_search_agreement),
        ("seven-condition battery", battery_coherence),
        ("spread invariance", spread_invariance),
        ("two-point domain", two_point_domain),
        ("transform invariance", transform_invariance),
        ("quasi-linear forms", quasi_linear_forms),
        ("conflict with outcome convexity", conflict_with_outcome_convexity),
        ("algebraic invariants", algebraic_invariants),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
