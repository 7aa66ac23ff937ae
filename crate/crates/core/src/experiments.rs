//! The two experiments: a step-size sweep at fixed final time and a long
//! integration at fixed step size, both measuring round-off against a
//! same-scheme, same-step reference at higher precision.
//!
//! The run rounds `dt` to its own precision; the reference integrates with
//! that same rounded step (exactly representable at the wider precision),
//! so both trajectories and the analytic solution share the exact times
//! `n * dt_run`. Coefficients `a`, `b` are rounded by each arithmetic on its
//! own.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::error_separation;
use crate::fpcore::{PrecisionConfig, SoftFloat};
use crate::oscillator::{analytic_at_step, OscillatorParams, State};
use crate::schemes::{integrate_with_limit, step_count, SamplingPlan, Scheme, SchemeError, Stepper, Trajectory};
use crate::Wide;

/// Desk-scale step sizes for the sweep, largest first.
pub const DESK_DT_LIST: [f64; 9] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5];
pub const DESK_T_END: f64 = 100.0;
pub const DESK_MAX_STEPS: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("reference precision {reference} is narrower than run precision {run}")]
    ReferenceTooNarrow { run: PrecisionConfig, reference: PrecisionConfig },
    #[error("step size list is empty")]
    EmptyDtList,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("{samples} samples requested but the run has only {steps} steps")]
    MoreSamplesThanSteps { samples: usize, steps: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub params: OscillatorParams,
    pub t_end: f64,
    pub dt_list: Vec<f64>,
    pub run_precision: PrecisionConfig,
    pub ref_precision: PrecisionConfig,
    pub max_steps: u64,
}

impl SweepConfig {
    /// Midpoint, `a = 0.1`, `b = 0.2`, `T = 100`, nine step sizes from
    /// `1e-1` to `1e-5`, single precision against binary128.
    pub fn desk_scale() -> Self {
        SweepConfig {
            scheme: Scheme::MidpointImplicit,
            params: OscillatorParams::default(),
            t_end: DESK_T_END,
            dt_list: DESK_DT_LIST.to_vec(),
            run_precision: PrecisionConfig::SINGLE,
            ref_precision: PrecisionConfig::QUAD,
            max_steps: DESK_MAX_STEPS,
        }
    }

    /// Checks the configuration as a whole. A reference as narrow as the
    /// run is accepted here (it yields `E_r = 0`); narrower is rejected.
    /// Per-step-size guard trips are not errors; they show up in records.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_precisions(self.run_precision, self.ref_precision)?;
        if self.dt_list.is_empty() {
            return Err(ExperimentError::EmptyDtList);
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(SchemeError::BadFinalTime(self.t_end).into());
        }
        Ok(())
    }
}

fn check_precisions(run: PrecisionConfig, reference: PrecisionConfig) -> Result<(), ExperimentError> {
    if reference < run {
        Err(ExperimentError::ReferenceTooNarrow { run, reference })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegStatus {
    Ok,
    /// `round(t_end / dt)` exceeded the step guard; nothing was run.
    SkippedGuard,
    /// The step size itself was unusable (non-positive, or zero steps).
    InvalidStep,
}

impl LegStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LegStatus::Ok => "ok",
            LegStatus::SkippedGuard => "skipped_guard",
            LegStatus::InvalidStep => "invalid_step",
        }
    }

    pub fn parse(s: &str) -> Option<LegStatus> {
        match s {
            "ok" => Some(LegStatus::Ok),
            "skipped_guard" => Some(LegStatus::SkippedGuard),
            "invalid_step" => Some(LegStatus::InvalidStep),
            _ => None,
        }
    }
}

/// Error norms at the final time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepErrors {
    pub e: Wide,
    pub e_t: Wide,
    pub e_r: Wide,
}

/// One step size of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub dt: f64,
    pub n_steps: u64,
    pub status: LegStatus,
    /// Present when `status` is `Ok`.
    pub errors: Option<SweepErrors>,
    pub wall_time_s: f64,
}

/// Sampled error norms from a long integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub e_r: Wide,
    pub e_t: Wide,
}

/// Same scheme, same (already run-rounded) step, wider precision: a
/// trajectory that carries truncation error and negligible round-off.
pub fn reference_trajectory(
    scheme: Scheme,
    params: &OscillatorParams,
    dt: f64,
    t_end: f64,
    ref_precision: PrecisionConfig,
    sampling: &SamplingPlan,
    max_steps: u64,
) -> Result<Trajectory<SoftFloat>, SchemeError> {
    integrate_with_limit(scheme, params, dt, t_end, ref_precision, sampling, max_steps)
}

/// The step a run at `run_precision` actually takes for a requested `dt`.
pub fn run_step(dt: f64, run_precision: PrecisionConfig) -> f64 {
    SoftFloat::from_f64(dt, run_precision).to_f64()
}

/// Run and reference advanced in one loop; each keeps its own arithmetic.
struct Lockstep {
    run: Stepper<SoftFloat>,
    reference: Stepper<SoftFloat>,
    run_state: State<SoftFloat>,
    ref_state: State<SoftFloat>,
    dt_run: f64,
    params: OscillatorParams,
    step: u64,
}

impl Lockstep {
    fn new(
        scheme: Scheme,
        params: &OscillatorParams,
        dt: f64,
        run_precision: PrecisionConfig,
        ref_precision: PrecisionConfig,
    ) -> Self {
        let run = Stepper::<SoftFloat>::new(scheme, params, dt, run_precision);
        let dt_run = run.dt().to_f64();
        let reference = Stepper::new(scheme, params, dt_run, ref_precision);
        Lockstep {
            run,
            reference,
            run_state: State::initial(),
            ref_state: State::initial(),
            dt_run,
            params: *params,
            step: 0,
        }
    }

    fn advance_to(&mut self, target: u64) {
        while self.step < target {
            self.run_state = self.run.step(&self.run_state);
            self.ref_state = self.reference.step(&self.ref_state);
            self.step += 1;
        }
        let t = self.step as f64 * self.dt_run;
        self.run_state.t = t;
        self.ref_state.t = t;
    }

    fn errors(&self) -> crate::analysis::ErrorTriple {
        let analytic = analytic_at_step(&self.params, self.step, self.dt_run);
        error_separation(&self.run_state, &self.ref_state, &analytic).expect("lockstep states share the time stamp")
    }
}

/// One sweep leg for a single step size. Never fails; problems are
/// reported in the record's status.
pub fn sweep_leg(cfg: &SweepConfig, dt: f64) -> SweepRecord {
    let start = Instant::now();
    let n = match step_count(dt, cfg.t_end, cfg.max_steps) {
        Ok(n) => n,
        Err(SchemeError::TooManySteps { requested, .. }) => {
            return SweepRecord { dt, n_steps: requested, status: LegStatus::SkippedGuard, errors: None, wall_time_s: 0.0 };
        }
        Err(_) => {
            return SweepRecord { dt, n_steps: 0, status: LegStatus::InvalidStep, errors: None, wall_time_s: 0.0 };
        }
    };
    let mut ls = Lockstep::new(cfg.scheme, &cfg.params, dt, cfg.run_precision, cfg.ref_precision);
    ls.advance_to(n);
    let triple = ls.errors();
    SweepRecord {
        dt,
        n_steps: n,
        status: LegStatus::Ok,
        errors: Some(SweepErrors { e: triple.e(), e_t: triple.e_t(), e_r: triple.e_r() }),
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

/// Runs every step size (in parallel on the current rayon pool) and
/// returns records ordered by `dt`, largest first.
pub fn stepsize_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>, ExperimentError> {
    cfg.validate()?;
    let mut records: Vec<SweepRecord> = cfg.dt_list.par_iter().map(|&dt| sweep_leg(cfg, dt)).collect();
    records.sort_by(|a, b| b.dt.total_cmp(&a.dt));
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

impl std::str::FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "log" => Ok(Spacing::Log),
            "linear" => Ok(Spacing::Linear),
            other => Err(format!("unknown spacing {other:?} (expected log or linear)")),
        }
    }
}

/// `count` distinct step indices in `1..=n`, ending at `n`.
///
/// Log spacing follows `n^(i/count)` but never repeats an index, so early
/// samples fall on consecutive steps.
pub fn sample_steps(n: u64, count: usize, spacing: Spacing) -> Result<Vec<u64>, ExperimentError> {
    if count < 2 {
        return Err(ExperimentError::TooFewSamples(count));
    }
    if count as u64 > n {
        return Err(ExperimentError::MoreSamplesThanSteps { samples: count, steps: n });
    }
    let c = count as u64;
    let mut out = Vec::with_capacity(count);
    let mut prev = 0u64;
    for i in 1..=c {
        let target = match spacing {
            Spacing::Linear => ((i as f64) * (n as f64) / (c as f64)).round() as u64,
            Spacing::Log => (n as f64).powf(i as f64 / c as f64).round() as u64,
        };
        let step = target.max(prev + 1).min(n - (c - i));
        out.push(step);
        prev = step;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunConfig {
    pub scheme: Scheme,
    pub params: OscillatorParams,
    pub dt: f64,
    pub t_end: f64,
    pub run_precision: PrecisionConfig,
    pub ref_precision: PrecisionConfig,
    pub sample_count: usize,
    pub spacing: Spacing,
    pub max_steps: u64,
}

/// Integrates run and reference together and reports `(t, E_r, E_t)` at
/// each sample time.
pub fn longtime_run(cfg: &LongRunConfig) -> Result<Vec<TimeSeriesRecord>, ExperimentError> {
    check_precisions(cfg.run_precision, cfg.ref_precision)?;
    let n = step_count(cfg.dt, cfg.t_end, cfg.max_steps)?;
    let steps = sample_steps(n, cfg.sample_count, cfg.spacing)?;
    let mut ls = Lockstep::new(cfg.scheme, &cfg.params, cfg.dt, cfg.run_precision, cfg.ref_precision);
    let mut out = Vec::with_capacity(steps.len());
    for step in steps {
        ls.advance_to(step);
        let e = ls.errors();
        out.push(TimeSeriesRecord { t: ls.run_state.t, e_r: e.e_r(), e_t: e.e_t() });
    }
    Ok(out)
}

/// Moving median over windows of `window` consecutive values.
pub fn moving_median(values: &[f64], window: usize) -> Vec<f64> {
    if window == 0 || values.len() < window {
        return Vec::new();
    }
    values
        .windows(window)
        .map(|w| {
            let mut v = w.to_vec();
            v.sort_by(f64::total_cmp);
            let m = v.len() / 2;
            if v.len() % 2 == 0 {
                (v[m - 1] + v[m]) / 2.0
            } else {
                v[m]
            }
        })
        .collect()
}

/// Error norms of a stored run/reference pair at their last common sample.
pub fn separate_trajectories(
    run: &Trajectory<SoftFloat>,
    reference: &Trajectory<SoftFloat>,
) -> Option<crate::analysis::ErrorTriple> {
    let (step, run_state) = run.samples.last()?;
    let (_, ref_state) = reference.samples.iter().find(|(s, _)| s == step)?;
    let analytic = analytic_at_step(&run.params, *step, run.dt_used);
    error_separation(run_state, ref_state, &analytic).ok()
}

/// Convenience for tests and reports: the norms as `f64`.
pub fn norms_f64(e: &SweepErrors) -> (f64, f64, f64) {
    (e.e.to_f64(), e.e_t.to_f64(), e.e_r.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_sweep(run: PrecisionConfig, reference: PrecisionConfig, dt_list: Vec<f64>) -> SweepConfig {
        SweepConfig {
            t_end: 10.0,
            dt_list,
            run_precision: run,
            ref_precision: reference,
            ..SweepConfig::desk_scale()
        }
    }

    #[test]
    fn equal_precisions_have_no_round_off() {
        let cfg = small_sweep(PrecisionConfig::SINGLE, PrecisionConfig::SINGLE, vec![0.01]);
        let recs = stepsize_sweep(&cfg).unwrap();
        let e = recs[0].errors.unwrap();
        assert!(e.e_r.is_zero());
        assert_eq!(e.e, e.e_t);
    }

    #[test]
    fn narrower_reference_is_rejected() {
        let cfg = small_sweep(PrecisionConfig::DOUBLE, PrecisionConfig::SINGLE, vec![0.01]);
        assert!(matches!(stepsize_sweep(&cfg), Err(ExperimentError::ReferenceTooNarrow { .. })));
        let empty = small_sweep(PrecisionConfig::SINGLE, PrecisionConfig::QUAD, vec![]);
        assert_eq!(stepsize_sweep(&empty), Err(ExperimentError::EmptyDtList));
    }

    #[test]
    fn guard_trips_are_recorded_not_fatal() {
        let mut cfg = small_sweep(PrecisionConfig::SINGLE, PrecisionConfig::QUAD, vec![1e-9, 0.1, -1.0]);
        cfg.max_steps = 10_000_000;
        let recs = stepsize_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].status, LegStatus::Ok);
        assert_eq!(recs[1].status, LegStatus::SkippedGuard);
        assert_eq!(recs[1].n_steps, 10_000_000_000);
        assert_eq!(recs[2].status, LegStatus::InvalidStep);
    }

    #[test]
    fn sweep_is_sorted_and_legs_are_independent() {
        let cfg = small_sweep(PrecisionConfig::SINGLE, PrecisionConfig::QUAD, vec![0.01, 0.1, 0.05]);
        let recs = stepsize_sweep(&cfg).unwrap();
        let dts: Vec<f64> = recs.iter().map(|r| r.dt).collect();
        assert_eq!(dts, vec![0.1, 0.05, 0.01]);
        for r in &recs {
            let alone = sweep_leg(&cfg, r.dt);
            assert_eq!(alone.errors, r.errors);
        }
    }

    #[test]
    fn lockstep_matches_separately_stored_trajectories() {
        let cfg = small_sweep(PrecisionConfig::SINGLE, PrecisionConfig::QUAD, vec![0.02]);
        let rec = &stepsize_sweep(&cfg).unwrap()[0];
        let run = integrate_with_limit::<SoftFloat>(
            cfg.scheme,
            &cfg.params,
            0.02,
            cfg.t_end,
            cfg.run_precision,
            &SamplingPlan::Final,
            cfg.max_steps,
        )
        .unwrap();
        let reference = reference_trajectory(
            cfg.scheme,
            &cfg.params,
            run_step(0.02, cfg.run_precision),
            cfg.t_end,
            cfg.ref_precision,
            &SamplingPlan::Final,
            cfg.max_steps,
        )
        .unwrap();
        let triple = separate_trajectories(&run, &reference).unwrap();
        assert_eq!(Some(triple.e_r()), rec.errors.map(|e| e.e_r));
        assert_eq!(Some(triple.e()), rec.errors.map(|e| e.e));
    }

    #[test]
    fn reference_against_itself_has_zero_round_off() {
        let p = OscillatorParams::default();
        let r1 = reference_trajectory(Scheme::MidpointImplicit, &p, 0.01, 1.0, PrecisionConfig::QUAD, &SamplingPlan::Final, 1000).unwrap();
        let r2 = reference_trajectory(Scheme::MidpointImplicit, &p, 0.01, 1.0, PrecisionConfig::QUAD, &SamplingPlan::Final, 1000).unwrap();
        assert_eq!(r1, r2);
        let e = separate_trajectories(&r1, &r2).unwrap();
        assert!(e.e_r().is_zero());
    }

    #[test]
    fn sample_steps_are_distinct_and_end_at_n() {
        for spacing in [Spacing::Log, Spacing::Linear] {
            for &(n, c) in &[(10_000_000u64, 100usize), (10, 10), (1000, 2), (50, 7)] {
                let s = sample_steps(n, c, spacing).unwrap();
                assert_eq!(s.len(), c);
                assert_eq!(*s.last().unwrap(), n);
                assert!(s.windows(2).all(|w| w[0] < w[1]));
                assert!(s[0] >= 1);
            }
        }
        assert_eq!(sample_steps(100, 1, Spacing::Log), Err(ExperimentError::TooFewSamples(1)));
        assert!(sample_steps(5, 6, Spacing::Linear).is_err());
    }

    #[test]
    fn longrun_equal_precision_has_zero_round_off() {
        let cfg = LongRunConfig {
            scheme: Scheme::MidpointImplicit,
            params: OscillatorParams::default(),
            dt: 0.01,
            t_end: 10.0,
            run_precision: PrecisionConfig::SINGLE,
            ref_precision: PrecisionConfig::SINGLE,
            sample_count: 20,
            spacing: Spacing::Log,
            max_steps: 1_000_000,
        };
        let recs = longtime_run(&cfg).unwrap();
        assert_eq!(recs.len(), 20);
        assert!(recs.iter().all(|r| r.e_r.is_zero()));
        assert!(recs.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn quad_reference_matches_exact_truncation_error() {
        // Oracle: the same scheme in exact rational arithmetic.
        use crate::analysis::error_separation;
        use num_rational::BigRational;
        let p = OscillatorParams::default();
        let dt = 0.01;
        let t_end = 1.0;
        let exact = integrate_with_limit::<BigRational>(Scheme::MidpointImplicit, &p, dt, t_end, (), &SamplingPlan::Final, 1000).unwrap();
        let quad = reference_trajectory(Scheme::MidpointImplicit, &p, dt, t_end, PrecisionConfig::QUAD, &SamplingPlan::Final, 1000).unwrap();
        let analytic = analytic_at_step(&p, 100, dt);
        let e_exact = error_separation(exact.final_state().unwrap(), exact.final_state().unwrap(), &analytic).unwrap();
        let e_quad = error_separation(quad.final_state().unwrap(), quad.final_state().unwrap(), &analytic).unwrap();
        let rel = ((e_quad.e_t().to_f64() - e_exact.e_t().to_f64()) / e_exact.e_t().to_f64()).abs();
        assert!(rel < 1e-10, "relative difference {rel}");
    }

    #[test]
    fn moving_median_basics() {
        assert_eq!(moving_median(&[1.0, 3.0, 2.0, 5.0], 3), vec![2.0, 3.0]);
        assert_eq!(moving_median(&[1.0, 2.0], 2), vec![1.5]);
        assert!(moving_median(&[1.0], 3).is_empty());
    }
}
