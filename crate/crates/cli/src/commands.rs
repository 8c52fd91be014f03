use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use choquet_core::distribution::{empirical_from_samples, parse_inline, read_samples_csv};
use choquet_core::numeric::{fmt17, to_json_17};
use choquet_core::verifier::{
    conflict_check, counterexample_search, seven_battery, transform_invariance_report, CheckResult, ConflictOutcome,
};
use choquet_core::{
    choquet, choquet_numeric_oracle, classify, classify_dual_utility, rdu, CheckConfig, DiscreteDistribution,
    DistortionFunction, Property, VTransform, Witness,
};
use serde::Serialize;

use crate::Format;

macro_rules! out {
    ($($arg:tt)*) => {
        write!(std::io::stdout(), $($arg)*)?
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*)?
    };
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    outln!("{}", to_json_17(value, true)?);
    Ok(())
}

fn load_distribution(data: Option<&Path>, dist: Option<&str>) -> Result<DiscreteDistribution> {
    match (data, dist) {
        (Some(path), _) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let samples = read_samples_csv(BufReader::new(file)).with_context(|| format!("{}", path.display()))?;
            Ok(empirical_from_samples(&samples).with_context(|| format!("{}", path.display()))?)
        }
        (None, Some(s)) => Ok(parse_inline(s).context("--dist")?),
        (None, None) => bail!("eval needs --data FILE or --dist x:p,..."),
    }
}

#[derive(Serialize)]
struct EvalOutput {
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    transform: Option<VTransform>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrepancy: Option<f64>,
}

pub fn eval(
    h: &DistortionFunction,
    data: Option<&Path>,
    dist: Option<&str>,
    v: Option<&str>,
    oracle: bool,
    format: Format,
) -> Result<ExitCode> {
    let f = load_distribution(data, dist)?;
    let transform: Option<VTransform> = v.map(|s| s.parse()).transpose().context("--v")?;
    let (value, law) = match &transform {
        Some(t) => (rdu(h, t, &f)?, choquet_core::v_transform(&f, t)?),
        None => (choquet(h, &f), f),
    };
    let oracle_value = oracle.then(|| choquet_numeric_oracle(h, &law));
    let out = EvalOutput {
        value,
        transform,
        oracle: oracle_value,
        discrepancy: oracle_value.map(|o| (o - value).abs()),
    };
    match format {
        Format::Json => emit(&out)?,
        Format::Text => {
            outln!("{}", fmt17(out.value));
            if let (Some(o), Some(d)) = (out.oracle, out.discrepancy) {
                outln!("oracle {}", fmt17(o));
                outln!("discrepancy {}", fmt17(d));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn classification_text(h: &DistortionFunction) -> String {
    let c = classify(h);
    let mut s = format!(
        "quasi-convex in mixtures: {} ({})\nquasi-concave in mixtures: {} ({})\n",
        c.quasi_convex_in_mixtures,
        c.reason.label(),
        c.quasi_concave_in_mixtures,
        c.concave_reason.label()
    );
    if let Some(p) = c.reason.params() {
        s.push_str(&format!(
            "qsm: a={} b={} k={} alpha={} c={}\n",
            fmt17(p.a),
            fmt17(p.b),
            fmt17(p.k),
            fmt17(p.alpha),
            fmt17(p.c)
        ));
    }
    if let Some(q) = c.quasi_linear_form {
        s.push_str(&format!("quasi-linear form: {q:?}\n"));
    }
    if !c.exact {
        s.push_str("note: h is a sampled approximation\n");
    }
    s
}

pub fn classification(h: &DistortionFunction, dual_utility: bool, format: Format) -> Result<ExitCode> {
    match (format, dual_utility) {
        (Format::Json, false) => emit(&classify(h))?,
        (Format::Json, true) => match classify_dual_utility(h) {
            Some(d) => emit(&d)?,
            None => bail!("--dual-utility needs an increasing h with h(1) = 1"),
        },
        (Format::Text, du) => {
            out!("{}", classification_text(h));
            if du {
                match classify_dual_utility(h) {
                    Some(d) => outln!("families: qcx {:?}, qcv {:?}", d.qcx_family, d.qcv_family),
                    None => bail!("--dual-utility needs an increasing h with h(1) = 1"),
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn witness_text(w: &Witness) -> String {
    let mut s = format!(
        "  {} violated by {}: combined {} vs bound {}\n  F = {}\n  G = {}\n",
        w.property,
        fmt17(w.margin),
        fmt17(w.mixed_value),
        fmt17(w.bound),
        law_text(&w.f),
        law_text(&w.g)
    );
    if let Some(l) = w.lambda {
        s.push_str(&format!("  lambda = {}\n", fmt17(l)));
    }
    s
}

fn law_text(f: &DiscreteDistribution) -> String {
    f.atoms()
        .iter()
        .map(|(x, p)| format!("{}:{}", fmt17(*x), fmt17(*p)))
        .collect::<Vec<_>>()
        .join(",")
}

fn result_text(r: &CheckResult) -> String {
    let mut s = format!("{:<24} {:?}\n", r.name, r.verdict);
    if let Some(w) = &r.witness {
        s.push_str(&witness_text(w));
    }
    s
}

pub fn battery(h: &DistortionFunction, cfg: &CheckConfig, format: Format) -> Result<ExitCode> {
    let report = seven_battery(h, cfg)?;
    match format {
        Format::Json => emit(&report)?,
        Format::Text => {
            for c in &report.conditions {
                out!("{}", result_text(c));
            }
            outln!("coherent: {}", report.coherent);
        }
    }
    if report.coherent {
        Ok(ExitCode::SUCCESS)
    } else {
        std::io::stdout().flush()?;
        eprintln!("error: battery verdicts contradict the structure of h");
        Ok(ExitCode::from(1))
    }
}

pub fn property(h: &DistortionFunction, property: Property, cfg: &CheckConfig, format: Format) -> Result<ExitCode> {
    let result = CheckResult::from_outcome(property.name(), property.check(h, cfg)?, cfg);
    match format {
        Format::Json => emit(&result)?,
        Format::Text => out!("{}", result_text(&result)),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn transform(h: &DistortionFunction, v: &str, cfg: &CheckConfig, format: Format) -> Result<ExitCode> {
    let v: VTransform = v.parse().context("--v")?;
    let report = transform_invariance_report(h, &v, cfg)?;
    match format {
        Format::Json => emit(&report)?,
        Format::Text => {
            outln!(
                "transform {}: classified {}, searched {}, agree {}",
                report.transform,
                report.classified_quasi_convex,
                report.empirical_quasi_convex,
                report.agree
            );
            if let Some(w) = &report.witness {
                out!("{}", witness_text(w));
            }
        }
    }
    if report.agree {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: transformed search disagrees with the classification of h");
        Ok(ExitCode::from(1))
    }
}

pub fn counterexample(h: &DistortionFunction, cfg: &CheckConfig, format: Format) -> Result<ExitCode> {
    let found = counterexample_search(h, cfg)?;
    match (format, &found) {
        (Format::Json, Some(w)) => emit(w)?,
        (Format::Json, None) => outln!("\"none\""),
        (Format::Text, Some(w)) => out!("{}", witness_text(w)),
        (Format::Text, None) => outln!("none"),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn conflict(h: &DistortionFunction, cfg: &CheckConfig, format: Format) -> Result<ExitCode> {
    let outcome = conflict_check(h, cfg)?;
    match format {
        Format::Json => emit(&outcome)?,
        Format::Text => match &outcome {
            ConflictOutcome::ScaledMean { k } => outln!("scaled mean, k = {}", fmt17(*k)),
            ConflictOutcome::ConflictConfirmed { o_convex, m_convex } => {
                outln!("conflict confirmed");
                for w in o_convex.iter().chain(m_convex) {
                    out!("{}", witness_text(w));
                }
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

/// Rows `p,kind,value`. Each affine piece is sampled at `samples` evenly
/// spaced levels; at its ends the row carries the one-sided limit. Every
/// breakpoint gets a `point` row and `left-limit`/`right-limit` rows where
/// the limits differ from the point value.
pub fn plot_data(h: &DistortionFunction, samples: usize) -> Result<ExitCode> {
    if samples < 2 {
        bail!("--samples must be at least 2");
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "p,kind,value")?;
    for (t0, v0, t1, v1) in h.segments() {
        for i in 0..samples {
            let (p, value) = if i == 0 {
                (t0, v0)
            } else if i == samples - 1 {
                (t1, v1)
            } else {
                let p = t0 + (t1 - t0) * i as f64 / (samples - 1) as f64;
                (p, h.eval(p)?)
            };
            writeln!(out, "{},segment,{}", fmt17(p), fmt17(value))?;
        }
    }
    for b in h.breakpoints() {
        let left = h.eval_left(b.t)?;
        let right = h.eval_right(b.t)?;
        writeln!(out, "{},point,{}", fmt17(b.t), fmt17(b.value))?;
        if b.t > 0.0 && left != b.value {
            writeln!(out, "{},left-limit,{}", fmt17(b.t), fmt17(left))?;
        }
        if b.t < 1.0 && right != b.value {
            writeln!(out, "{},right-limit,{}", fmt17(b.t), fmt17(right))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
