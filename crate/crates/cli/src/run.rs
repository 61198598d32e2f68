//! Experiment orchestration.

use num_bigint::BigUint;
use rayon::prelude::*;

use growthlab_core::fgaut::FreeEnd;
use growthlab_core::product::{beta_class, BetaClass, Metric, ProductAut, ProductElement};
use growthlab_core::rates::{classify_sequence, RateEstimate, Thresholds, MIN_SAMPLES};
use growthlab_core::splitting::{GenPath, GraphMap, Token};
use growthlab_core::word::{set_letter_cap, Word};
use growthlab_core::zlin::{spectral_growth, IntMatrix, IntVector, SpectralGrowth};
use growthlab_core::Error as CoreError;

use crate::spec::{parse_group_element, AutKind, ExperimentDecl, SpecFile, TargetKind};

pub const DEFAULT_CAP: usize = 100_000_000;
pub const DEFAULT_TAU_RADIUS: usize = 4;
/// `τ_upper(φⁿ)` is only searched while every image has at most this many
/// letters; the conjugator search is `O(radius-ball × |images|)`.
pub const TAU_LETTER_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub cap: usize,
    pub tau_radius: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cap: DEFAULT_CAP,
            tau_radius: DEFAULT_TAU_RADIUS,
        }
    }
}

/// Failures that prevent a report from being produced at all.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("no experiment named {0:?}")]
    UnknownExperiment(String),
    #[error("{0}")]
    Precondition(String),
}

/// A predictor's output for one element.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    /// Pure rate `[n^p λⁿ]` from a linear recursion.
    Rate {
        method: &'static str,
        lambda: f64,
        p: u32,
        exact: bool,
        display: String,
    },
    /// Per-`n` predicted lengths with the measured/predicted ratio.
    Lengths {
        method: &'static str,
        values: Vec<f64>,
        ratios: Vec<f64>,
    },
    /// The predictor did not apply; the reason is recorded.
    Unavailable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementReport {
    pub element: String,
    /// `n = 0, 1, …` up to the last completed iterate.
    pub word_lengths: Vec<BigUint>,
    pub conj_lengths: Vec<BigUint>,
    /// False when iteration stopped early.
    pub complete: bool,
    pub error: Option<String>,
    pub estimate: Option<RateEstimate>,
    pub predicted: Option<Prediction>,
    pub beta_class: Option<BetaClass>,
}

/// `σ(φⁿ)` and `τ_upper(φⁿ)` for a free-group automorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct AutSummary {
    pub sigma: Vec<usize>,
    /// Shorter than `sigma` once the images pass [`TAU_LETTER_LIMIT`].
    pub tau_upper: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub target_kind: TargetKind,
    pub target: String,
    pub metric: Metric,
    pub n_max: usize,
    pub config: RunConfig,
    pub thresholds: Thresholds,
    pub automorphism: Option<AutSummary>,
    pub elements: Vec<ElementReport>,
}

impl ExperimentReport {
    /// True if any element stopped on the letter cap.
    pub fn capped(&self) -> bool {
        self.elements.iter().any(|e| !e.complete) || self.automorphism.as_ref().is_some_and(|a| a.sigma.len() < self.n_max + 1)
    }
}

/// Pick the experiment to run: the named one, or the only one.
pub fn select<'a>(spec: &'a SpecFile, name: Option<&str>) -> Result<&'a ExperimentDecl, RunError> {
    match name {
        Some(n) => spec
            .experiment(n)
            .ok_or_else(|| RunError::UnknownExperiment(n.to_string())),
        None => {
            let all: Vec<_> = spec.experiments().collect();
            match all.as_slice() {
                [one] => Ok(one),
                [] => Err(RunError::Precondition("the spec file declares no experiments".into())),
                _ => Err(RunError::Precondition(format!(
                    "several experiments declared ({}); choose one with --experiment",
                    all.iter().map(|e| e.name.as_str()).collect::<Vec<_>>().join(", ")
                ))),
            }
        }
    }
}

/// Run one experiment. Sets the global letter cap to `config.cap`.
pub fn run_experiment(spec: &SpecFile, name: &str, config: RunConfig) -> Result<ExperimentReport, RunError> {
    let exp = spec
        .experiment(name)
        .ok_or_else(|| RunError::UnknownExperiment(name.to_string()))?;
    set_letter_cap(config.cap);
    let n = exp.n_max;
    let (elements, automorphism) = match exp.target_kind {
        TargetKind::Aut => {
            let aut = spec
                .aut(&exp.target)
                .ok_or_else(|| RunError::Precondition(format!("undeclared automorphism {:?}", exp.target)))?;
            let group = spec
                .group(&aut.group)
                .ok_or_else(|| RunError::Precondition(format!("undeclared group {:?}", aut.group)))?;
            let parsed = exp
                .elements
                .iter()
                .map(|e| parse_group_element(group, e).map_err(|err| RunError::Precondition(err.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let summary = match &aut.kind {
                AutKind::Free { map, .. } => Some(aut_summary(map, n, config.tau_radius)),
                _ => None,
            };
            let reports = exp
                .elements
                .par_iter()
                .zip(parsed.par_iter())
                .map(|(label, g)| match &aut.kind {
                    AutKind::Free { map, .. } => free_element(map, label, &g.h, exp),
                    AutKind::Abelian { psi } => abelian_element(psi, label, &g.a, exp),
                    AutKind::Product { aut } => product_element(aut, label, g, exp),
                })
                .collect();
            (reports, summary)
        }
        TargetKind::Map => {
            let map = spec
                .map(&exp.target)
                .ok_or_else(|| RunError::Precondition(format!("undeclared map {:?}", exp.target)))?;
            let reports = exp
                .elements
                .par_iter()
                .map(|label| map_element(map, label, exp))
                .collect::<Result<Vec<_>, _>>()?;
            (reports, None)
        }
    };
    Ok(ExperimentReport {
        experiment: exp.name.clone(),
        target_kind: exp.target_kind,
        target: exp.target.clone(),
        metric: exp.metric,
        n_max: n,
        config,
        thresholds: Thresholds::default(),
        automorphism,
        elements,
    })
}

fn aut_summary(phi: &FreeEnd, n_max: usize, radius: usize) -> AutSummary {
    let mut sigma = Vec::new();
    let mut tau_upper = Vec::new();
    let mut power = FreeEnd::identity(phi.rank());
    for n in 0..=n_max {
        if n > 0 {
            match power.compose(phi) {
                Ok(p) => power = p,
                Err(_) => break,
            }
        }
        sigma.push(power.sigma());
        if tau_upper.len() == n && power.sigma() <= TAU_LETTER_LIMIT {
            tau_upper.push(power.tau_upper(radius));
        }
    }
    AutSummary { sigma, tau_upper }
}

fn finish(
    label: &str,
    word: Vec<BigUint>,
    conj: Vec<BigUint>,
    error: Option<CoreError>,
    exp: &ExperimentDecl,
    predicted: Option<Prediction>,
    beta: Option<BetaClass>,
) -> ElementReport {
    let chosen = match exp.metric {
        Metric::Word => &word,
        Metric::Conjugacy => &conj,
    };
    let samples: Vec<(u64, BigUint)> = chosen
        .iter()
        .enumerate()
        .map(|(i, x)| (i as u64, x.clone()))
        .collect();
    let estimate = if samples.len() >= MIN_SAMPLES {
        classify_sequence(&samples).ok()
    } else {
        None
    };
    ElementReport {
        element: label.to_string(),
        word_lengths: word,
        conj_lengths: conj,
        complete: error.is_none(),
        error: error.map(|e| e.to_string()),
        estimate,
        predicted: if exp.predict { predicted } else { None },
        beta_class: beta,
    }
}

fn spectral_prediction(method: &'static str, m: &IntMatrix, v: &IntVector) -> Prediction {
    if v.is_zero() {
        return Prediction::Unavailable("zero vector: the sequence is eventually constant".into());
    }
    match spectral_growth(m, v) {
        Ok(SpectralGrowth::Exact(r)) => Prediction::Rate {
            method,
            lambda: r.base.to_f64(),
            p: r.degree,
            exact: true,
            display: r.to_string(),
        },
        Ok(SpectralGrowth::Empirical(est)) => Prediction::Rate {
            method,
            lambda: est.lambda_hat,
            p: est.p_hat.round().max(0.0) as u32,
            exact: false,
            display: format!("fit of the linear recursion ({})", est.verdict),
        },
        Err(e) => Prediction::Unavailable(e.to_string()),
    }
}

fn free_element(phi: &FreeEnd, label: &str, w: &Word, exp: &ExperimentDecl) -> ElementReport {
    let (orbit, err) = phi.orbit(w, exp.n_max);
    let word = orbit.iter().map(|x| BigUint::from(x.len())).collect();
    let conj = orbit.iter().map(|x| BigUint::from(x.conj_len())).collect();
    let predicted = if phi.is_positive() && w.is_positive() {
        // |φⁿ(w)| = 1ᵀ Mⁿ occ(w) exactly when no cancellation can occur
        let occ = w.occurrences().iter().map(|&c| c as i64).collect::<Vec<_>>();
        spectral_prediction("occurrence-matrix", &phi.occurrence_matrix(), &IntVector::from_i64(&occ))
    } else {
        Prediction::Unavailable("no exact predictor for words with cancellation".into())
    };
    finish(label, word, conj, err, exp, Some(predicted), None)
}

fn abelian_element(psi: &IntMatrix, label: &str, v: &IntVector, exp: &ExperimentDecl) -> ElementReport {
    let mut cur = v.clone();
    let mut lens = Vec::with_capacity(exp.n_max + 1);
    let mut err = None;
    for i in 0..=exp.n_max {
        if i > 0 {
            match psi.apply(&cur) {
                Ok(next) => cur = next,
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        lens.push(cur.l1().magnitude().clone());
    }
    let predicted = spectral_prediction("linear-recursion", psi, v);
    finish(label, lens.clone(), lens, err, exp, Some(predicted), None)
}

fn product_element(m: &ProductAut, label: &str, g: &ProductElement, exp: &ExperimentDecl) -> ElementReport {
    let mut cur = g.clone();
    let mut word = Vec::with_capacity(exp.n_max + 1);
    let mut conj = Vec::with_capacity(exp.n_max + 1);
    let mut err = None;
    for i in 0..=exp.n_max {
        if i > 0 {
            match m.apply(&cur) {
                Ok(next) => cur = next,
                Err(CoreError::CapExceeded { len, cap }) => {
                    err = Some(CoreError::IterationCap {
                        completed: i - 1,
                        len,
                        cap,
                    });
                    break;
                }
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        word.push(cur.length(Metric::Word));
        conj.push(cur.length(Metric::Conjugacy));
    }
    // (ab(h), a) evolves by the block matrix [[M(φ), 0], [α, ψ]]
    let phi = m.phi().forward();
    let predicted = match IntMatrix::block_lower(&phi.abelianize(), m.alpha(), m.psi()) {
        Ok(block) => {
            let mut v = g.h.abelian_counts();
            v.extend(g.a.0.iter().map(|x| i64::try_from(x).unwrap_or(i64::MAX)));
            let free_positive = phi.is_positive() && g.h.is_positive();
            if free_positive || g.h.is_identity() {
                spectral_prediction("abelianized-block", &block, &IntVector::from_i64(&v))
            } else {
                Prediction::Unavailable("free part has cancellation; the abelianized rate is only a lower bound".into())
            }
        }
        Err(e) => Prediction::Unavailable(e.to_string()),
    };
    let beta = beta_class(m, g).ok();
    finish(label, word, conj, err, exp, Some(predicted), beta)
}

fn map_element(map: &GraphMap, label: &str, exp: &ExperimentDecl) -> Result<ElementReport, RunError> {
    let g = map.graph();
    let tokens = Token::parse_word(g, label).map_err(|e| RunError::Precondition(e.to_string()))?;
    let pi = GenPath::from_element(g, &tokens).map_err(|e| RunError::Precondition(e.to_string()))?;
    let mut word = Vec::with_capacity(exp.n_max + 1);
    let mut conj = Vec::with_capacity(exp.n_max + 1);
    let mut err = None;
    let mut cur = pi.clone();
    for i in 0..=exp.n_max {
        if i > 0 {
            match map.apply(&cur).and_then(|p| p.pull_tight()) {
                Ok(next) => cur = next,
                Err(CoreError::CapExceeded { len, cap }) => {
                    err = Some(CoreError::IterationCap {
                        completed: i - 1,
                        len,
                        cap,
                    });
                    break;
                }
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        let lengths = cur
            .element_length(g)
            .and_then(|w| cur.conj_normal_form(g).map(|(_, c)| (w, c)));
        match lengths {
            Ok((w, c)) => {
                word.push(w);
                conj.push(c);
            }
            Err(e) => {
                err = Some(e);
                break;
            }
        }
    }
    let predicted = if !exp.predict {
        None
    } else if err.is_some() {
        Some(Prediction::Unavailable("iteration incomplete".into()))
    } else {
        Some(match map.predicted_vs_measured(&pi, exp.n_max) {
            Ok(rows) => Prediction::Lengths {
                method: "node-order-estimate",
                values: rows.iter().map(|r| r.predicted).collect(),
                ratios: rows.iter().map(|r| r.ratio).collect(),
            },
            Err(e) => Prediction::Unavailable(e.to_string()),
        })
    };
    Ok(finish(label, word, conj, err, exp, predicted, None))
}
