//! Randomized soundness testing. Well-typed closed terms are generated and
//! run; each step must keep a type and predicate below the previous one, and
//! no typed term may get stuck. With refinements on, erasure is checked too.

mod gen;
mod shrink;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::checker::{subpred, Checker, Fault, Judgment, Mode, Rule, RuleCounts, TypeEnv};
use crate::eval::{step, trace, EvalOutcome, StepResult};
use crate::refine::{erase_expr, erase_pred, erase_type, erased_judgment, ErasureVerdict};
use crate::syntax::{Constant, Expr, Type};
use crate::types::{normalize, subtype, RefineEnv};

pub use gen::{gen_typed_term, Generator};
pub use shrink::shrink;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    pub max_depth: usize,
    pub fuel: usize,
    pub with_refinements: bool,
    /// A deliberate checker defect, to confirm the harness notices.
    pub fault: Option<Fault>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            count: 1000,
            seed: 1,
            max_depth: 5,
            fuel: 1000,
            with_refinements: false,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("count must be at least 1")]
    ZeroCount,
    #[error("depth must be at least 1")]
    ZeroDepth,
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.count == 0 {
            Err(ConfigError::ZeroCount)
        } else if self.max_depth == 0 {
            Err(ConfigError::ZeroDepth)
        } else {
            Ok(())
        }
    }

    pub fn delta(&self) -> RefineEnv {
        if self.with_refinements {
            [Constant::IsEven, Constant::IsOdd].into_iter().collect()
        } else {
            RefineEnv::empty()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    Preservation,
    Progress,
    Soundness,
    Erasure,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Preservation => "preservation",
            FailureKind::Progress => "progress",
            FailureKind::Soundness => "soundness",
            FailureKind::Erasure => "erasure",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    /// The shrunk term.
    pub term: String,
    /// Index into the shrunk term's trace.
    pub step: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub generated: usize,
    pub failures: Vec<Failure>,
    pub coverage: RuleCounts,
    /// Terms whose primary derivation narrowed a variable or combined two
    /// type tests in a conditional.
    pub occurrence_terms: usize,
    pub values: usize,
    pub fuel_exhausted: usize,
    pub seed: u64,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    generated: usize,
    failures: &'a [Failure],
    coverage: BTreeMap<&'static str, u64>,
    seed: u64,
    elapsed_ms: u128,
}

impl FuzzReport {
    pub fn of_kind(&self, kind: FailureKind) -> impl Iterator<Item = &Failure> {
        self.failures.iter().filter(move |f| f.kind == kind)
    }

    pub fn preservation_failures(&self) -> Vec<&Failure> {
        self.of_kind(FailureKind::Preservation).collect()
    }

    pub fn progress_failures(&self) -> Vec<&Failure> {
        self.of_kind(FailureKind::Progress).collect()
    }

    pub fn soundness_failures(&self) -> Vec<&Failure> {
        self.of_kind(FailureKind::Soundness).collect()
    }

    pub fn erasure_failures(&self) -> Vec<&Failure> {
        self.of_kind(FailureKind::Erasure).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    /// Coverage for every rule, zeros included.
    pub fn rule_coverage(&self) -> BTreeMap<&'static str, u64> {
        Rule::PRIMARY
            .iter()
            .chain(Rule::EXTENDED_ONLY.iter())
            .map(|r| (r.name(), self.coverage.count(*r)))
            .collect()
    }

    pub fn occurrence_fraction(&self) -> f64 {
        self.occurrence_terms as f64 / self.generated.max(1) as f64
    }

    pub fn to_json(&self) -> String {
        let view = JsonReport {
            generated: self.generated,
            failures: &self.failures,
            coverage: self.rule_coverage(),
            seed: self.seed,
            elapsed_ms: self.elapsed.as_millis(),
        };
        serde_json::to_string_pretty(&view).expect("report serializes")
    }
}

/// Outcome of running one term.
#[derive(Debug, Clone, Default)]
pub struct TermReport {
    pub failures: Vec<(FailureKind, usize, String)>,
    pub counts: RuleCounts,
    pub reached_value: bool,
    pub fuel_exhausted: bool,
}

fn sub(delta: &RefineEnv, s: &Type, t: &Type) -> bool {
    subtype(delta, s, t).unwrap_or(false)
}

/// Base types are those built from Number, True and False by union.
fn is_base(t: &Type) -> bool {
    match normalize(t) {
        Type::Num | Type::True | Type::False => true,
        Type::Union(ms) => ms.iter().all(is_base),
        _ => false,
    }
}

fn below(delta: &RefineEnv, lo: &Judgment, hi: &Judgment) -> bool {
    sub(delta, &lo.ty, &hi.ty) && subpred(&lo.pred, &hi.pred)
}

/// Runs `e` and checks every step. `checker` must be in primary mode and
/// accept `e`.
pub fn check_term(checker: &Checker<'_>, e: &Expr, fuel: usize, with_refinements: bool) -> TermReport {
    let mut out = TermReport::default();
    let delta = checker.delta();
    let env = TypeEnv::new();
    let primary = match checker.check_counting(&env, e, &mut out.counts) {
        Ok(j) => j,
        Err(err) => {
            out.failures.push((FailureKind::Preservation, 0, format!("not well typed to begin with: {err}")));
            return out;
        }
    };
    let run = match trace(e, fuel) {
        Ok(t) => t,
        Err(err) => {
            out.failures.push((FailureKind::Progress, 0, err.to_string()));
            return out;
        }
    };

    // The chain starts from the extended judgment of the source term. The
    // extended checker may pick a different derivation than the primary one,
    // so only the final value is compared with the primary judgment.
    let extended = checker.with_mode(Mode::Extended);
    let mut previous: Option<Judgment> = None;
    for (i, term) in run.terms.iter().enumerate() {
        match extended.check_counting(&env, term, &mut out.counts) {
            Ok(j) => match &previous {
                Some(p) if !below(delta, &j, p) => {
                    out.failures.push((
                        FailureKind::Preservation,
                        i,
                        format!("`{term}` has {} ; {}, not below {} ; {} of the previous term", j.ty, j.pred, p.ty, p.pred),
                    ));
                    break;
                }
                _ => previous = Some(j),
            },
            Err(err) => {
                out.failures.push((FailureKind::Preservation, i, format!("`{term}` is ill typed: {err}")));
                break;
            }
        }
    }

    match &run.outcome {
        EvalOutcome::StuckAt { redex, reason, .. } => {
            out.failures.push((
                FailureKind::Progress,
                run.terms.len() - 1,
                format!("stuck on `{redex}`: {reason}"),
            ));
        }
        EvalOutcome::FuelExhausted { .. } => out.fuel_exhausted = true,
        EvalOutcome::Value(v) => {
            out.reached_value = true;
            let want_ty = erase_type(&primary.ty);
            if is_base(&want_ty) {
                let empty = RefineEnv::empty();
                match extended.check(&env, v) {
                    Ok(j) if sub(&empty, &erase_type(&j.ty), &want_ty)
                        && subpred(&erase_pred(&j.pred), &erase_pred(&primary.pred)) => {}
                    Ok(j) => out.failures.push((
                        FailureKind::Soundness,
                        run.terms.len() - 1,
                        format!(
                            "value `{v}` has {} ; {}, not below {} ; {}",
                            j.ty, j.pred, want_ty, erase_pred(&primary.pred)
                        ),
                    )),
                    Err(err) => out.failures.push((
                        FailureKind::Soundness,
                        run.terms.len() - 1,
                        format!("value `{v}` is ill typed: {err}"),
                    )),
                }
            }
        }
    }

    if with_refinements {
        check_erasure(checker, &run.terms, &mut out);
    }
    out
}

fn check_erasure(checker: &Checker<'_>, terms: &[Expr], out: &mut TermReport) {
    let env = TypeEnv::new();
    for (i, term) in terms.iter().enumerate() {
        if checker.check(&env, term).is_ok() {
            if let Ok(ErasureVerdict::Violated { detail }) = erased_judgment(checker.delta(), &env, term) {
                out.failures.push((FailureKind::Erasure, i, format!("typing `{term}`: {detail}")));
                return;
            }
        }
    }
    for (i, pair) in terms.windows(2).enumerate() {
        let (from, to) = (erase_expr(&pair[0]), erase_expr(&pair[1]));
        match step(&from) {
            Ok(StepResult::Stepped(next)) if next == to => {}
            other => {
                out.failures.push((
                    FailureKind::Erasure,
                    i,
                    format!("erased `{from}` should step to `{to}`, got {other:?}"),
                ));
                return;
            }
        }
    }
}

/// Per-step verdicts for one closed term typed in primary mode under
/// `delta`.
pub fn check_subject_reduction(e: &Expr, fuel: usize, delta: &RefineEnv) -> TermReport {
    check_term(&Checker::new(delta, Mode::Primary), e, fuel, false)
}

fn term_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// The `index`-th term of a run, independent of every other index.
pub fn nth_term(config: &FuzzConfig, delta: &RefineEnv, index: usize) -> Expr {
    let checker = Checker::new(delta, Mode::Primary).with_fault(config.fault);
    Generator::new(&checker).term(&mut term_rng(config.seed, index), config.max_depth)
}

struct Verdict {
    failures: Vec<Failure>,
    counts: RuleCounts,
    occurrence: bool,
    value: bool,
    fuel_exhausted: bool,
}

fn run_one(config: &FuzzConfig, delta: &RefineEnv, index: usize) -> Verdict {
    let checker = Checker::new(delta, Mode::Primary).with_fault(config.fault);
    let e = Generator::new(&checker).term(&mut term_rng(config.seed, index), config.max_depth);
    let report = check_term(&checker, &e, config.fuel, config.with_refinements);

    let mut primary_counts = RuleCounts::default();
    let _ = checker.check_counting(&TypeEnv::new(), &e, &mut primary_counts);
    let occurrence = primary_counts.narrowing > 0 || primary_counts.union_combine > 0;

    let mut failures = Vec::new();
    if let Some((kind, _, _)) = report.failures.first() {
        let kind = *kind;
        let fails = |t: &Expr| {
            checker.check(&TypeEnv::new(), t).is_ok()
                && check_term(&checker, t, config.fuel, config.with_refinements)
                    .failures
                    .iter()
                    .any(|f| f.0 == kind)
        };
        let small = shrink(&e, fails);
        let shrunk = check_term(&checker, &small, config.fuel, config.with_refinements);
        for (k, step, detail) in shrunk.failures.into_iter().filter(|f| f.0 == kind) {
            let detail = if small == e { detail } else { format!("{detail} (shrunk from `{e}`)") };
            failures.push(Failure {
                kind: k,
                term: small.to_string(),
                step,
                detail,
            });
        }
        for (k, step, detail) in report.failures.into_iter().filter(|f| f.0 != kind) {
            failures.push(Failure {
                kind: k,
                term: e.to_string(),
                step,
                detail,
            });
        }
    }
    Verdict {
        failures,
        counts: report.counts,
        occurrence,
        value: report.reached_value,
        fuel_exhausted: report.fuel_exhausted,
    }
}

/// Generates and checks `config.count` terms in parallel. The report is
/// the same for the same configuration, apart from `elapsed`.
pub fn run_fuzz(config: &FuzzConfig) -> FuzzReport {
    let start = Instant::now();
    let delta = config.delta();
    let verdicts: Vec<Verdict> = (0..config.count)
        .into_par_iter()
        .map(|i| run_one(config, &delta, i))
        .collect();
    let mut report = FuzzReport {
        generated: config.count,
        failures: Vec::new(),
        coverage: RuleCounts::default(),
        occurrence_terms: 0,
        values: 0,
        fuel_exhausted: 0,
        seed: config.seed,
        elapsed: Duration::ZERO,
    };
    for v in verdicts {
        report.failures.extend(v.failures);
        report.coverage.merge(&v.counts);
        report.occurrence_terms += usize::from(v.occurrence);
        report.values += usize::from(v.value);
        report.fuel_exhausted += usize::from(v.fuel_exhausted);
    }
    report.elapsed = start.elapsed();
    report
}
