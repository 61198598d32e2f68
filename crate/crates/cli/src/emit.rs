//! Report serialisation. All three formats are byte-stable: element order
//! follows the spec file, JSON object keys are sorted, floats use the shortest
//! round-trip representation.
//!
//! In JSON every number sits inside a provenance object
//! `{"provenance": "measured" | "predicted" | "bound", "value" | "values": …}`.
//! Configuration values (cap, radius, thresholds) are written as strings.

use std::io::{self, Write};

use num_bigint::BigUint;
use serde_json::{json, Map, Number, Value};

use growthlab_core::product::{BetaClass, Metric};
use growthlab_core::rates::{FitMethod, RateEstimate};

use crate::run::{ElementReport, ExperimentReport, Prediction, TAU_LETTER_LIMIT};
use crate::spec::TargetKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Gnuplot,
}

pub const CSV_HEADER: [&str; 4] = ["element", "n", "word_length", "conj_length"];

pub fn emit(report: &ExperimentReport, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => emit_csv(report, out),
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&to_json(report)).map_err(io::Error::other)?;
            text.push('\n');
            out.write_all(text.as_bytes())
        }
        Format::Gnuplot => emit_gnuplot(report, out),
    }
}

pub fn emit_csv(report: &ExperimentReport, out: &mut dyn Write) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for e in &report.elements {
        for (n, (wl, cl)) in e.word_lengths.iter().zip(&e.conj_lengths).enumerate() {
            w.write_record([e.element.clone(), n.to_string(), wl.to_string(), cl.to_string()])?;
        }
    }
    w.flush()
}

pub fn emit_gnuplot(report: &ExperimentReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "# experiment {} ({} {})", report.experiment, kind_str(report.target_kind), report.target)?;
    writeln!(out, "# columns: n word_length conj_length")?;
    writeln!(out, "# one block per element, separated by two blank lines (use `index i`)")?;
    for (i, e) in report.elements.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
            writeln!(out)?;
        }
        writeln!(out, "# element {}{}", e.element, if e.complete { "" } else { " (incomplete)" })?;
        for (n, (wl, cl)) in e.word_lengths.iter().zip(&e.conj_lengths).enumerate() {
            writeln!(out, "{n} {wl} {cl}")?;
        }
    }
    Ok(())
}

fn kind_str(k: TargetKind) -> &'static str {
    match k {
        TargetKind::Aut => "aut",
        TargetKind::Map => "map",
    }
}

fn metric_str(m: Metric) -> &'static str {
    match m {
        Metric::Word => "word",
        Metric::Conjugacy => "conj",
    }
}

fn big(x: &BigUint) -> Value {
    // exact: arbitrary-precision numbers keep every digit
    Value::Number(x.to_string().parse::<Number>().expect("decimal integer"))
}

fn float(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn labelled(provenance: &str, value: Value) -> Value {
    json!({ "provenance": provenance, "value": value })
}

fn labelled_seq(provenance: &str, values: Vec<Value>) -> Value {
    json!({ "provenance": provenance, "values": values })
}

fn estimate_json(est: Option<&RateEstimate>, predicted: Option<&Prediction>) -> Value {
    let mut m = Map::new();
    match est {
        Some(r) => {
            m.insert("lambda_hat".into(), labelled("measured", float(r.lambda_hat)));
            m.insert("p_hat".into(), labelled("measured", float(r.p_hat)));
            m.insert(
                "window".into(),
                labelled_seq("measured", vec![json!(r.window.0), json!(r.window.1)]),
            );
            m.insert("residual".into(), labelled("measured", float(r.residual)));
            m.insert("verdict".into(), json!(r.verdict.as_str()));
            match r.method {
                FitMethod::Recurrence { order } => {
                    m.insert("method".into(), json!("recurrence"));
                    m.insert("recurrence_order".into(), json!(order.to_string()));
                }
                FitMethod::Regression => {
                    m.insert("method".into(), json!("regression"));
                }
            }
        }
        None => {
            m.insert("lambda_hat".into(), Value::Null);
            m.insert("p_hat".into(), Value::Null);
            m.insert("window".into(), Value::Null);
            m.insert("residual".into(), Value::Null);
            m.insert("verdict".into(), json!("insufficient-samples"));
            m.insert("method".into(), Value::Null);
        }
    }
    if let Some(p) = predicted {
        m.insert("predicted".into(), prediction_json(p));
    }
    Value::Object(m)
}

fn prediction_json(p: &Prediction) -> Value {
    match p {
        Prediction::Rate {
            method,
            lambda,
            p,
            exact,
            display,
        } => json!({
            "method": method,
            "lambda": labelled("predicted", float(*lambda)),
            "p": labelled("predicted", json!(p)),
            "exact": exact,
            "rate": display,
        }),
        Prediction::Lengths { method, values, ratios } => json!({
            "method": method,
            "lengths": labelled_seq("predicted", values.iter().map(|&x| float(x)).collect()),
            "ratio": labelled_seq("measured", ratios.iter().map(|&x| float(x)).collect()),
        }),
        Prediction::Unavailable(reason) => json!({ "method": "none", "reason": reason }),
    }
}

fn element_json(e: &ElementReport) -> Value {
    let mut m = Map::new();
    m.insert("element".into(), json!(e.element));
    m.insert("complete".into(), json!(e.complete));
    m.insert("error".into(), e.error.as_ref().map_or(Value::Null, |s| json!(s)));
    m.insert(
        "word_length".into(),
        labelled_seq("measured", e.word_lengths.iter().map(big).collect()),
    );
    m.insert(
        "conj_length".into(),
        labelled_seq("measured", e.conj_lengths.iter().map(big).collect()),
    );
    m.insert("estimate".into(), estimate_json(e.estimate.as_ref(), e.predicted.as_ref()));
    if let Some(b) = e.beta_class {
        m.insert(
            "beta_class".into(),
            json!(match b {
                BetaClass::Identity => "identity",
                BetaClass::Kernel => "kernel",
                BetaClass::Generic => "generic",
            }),
        );
    }
    Value::Object(m)
}

pub fn to_json(r: &ExperimentReport) -> Value {
    let automorphism = r.automorphism.as_ref().map_or(Value::Null, |a| {
        json!({
            "sigma": labelled_seq("measured", a.sigma.iter().map(|&x| json!(x)).collect()),
            "tau_upper": labelled_seq("bound", a.tau_upper.iter().map(|&x| json!(x)).collect()),
        })
    });
    json!({
        "experiment": r.experiment,
        "target": { "kind": kind_str(r.target_kind), "name": r.target },
        "metric": metric_str(r.metric),
        "status": if r.capped() { "capped" } else { "complete" },
        "environment": {
            "n_max": r.n_max.to_string(),
            "cap": r.config.cap.to_string(),
            "tau_radius": r.config.tau_radius.to_string(),
            "tau_letter_limit": TAU_LETTER_LIMIT.to_string(),
            "base_one": r.thresholds.base_one.to_string(),
            "degree_tol": r.thresholds.degree_tol.to_string(),
            "max_residual": r.thresholds.max_residual.to_string(),
            "seed": "none",
        },
        "automorphism": automorphism,
        "elements": r.elements.iter().map(element_json).collect::<Vec<_>>(),
    })
}
