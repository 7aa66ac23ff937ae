//! Forward Euler, the implicit midpoint rule in closed form, and Kutta's
//! third-order Runge–Kutta method, each generic over the arithmetic.
//!
//! Every scheme evaluates its update in a fixed operation order so that a
//! run at a given precision is reproducible bit for bit. The order is
//! identified by [`OPERATION_ORDER_TAG`] in run manifests.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oscillator::{rhs_with, OscillatorParams, State};
use crate::scalar::Scalar;

/// Version tag of the per-step operation order used below.
pub const OPERATION_ORDER_TAG: &str = "ops-v1";

/// Default guard on the number of steps in one integration.
pub const DEFAULT_MAX_STEPS: u64 = 2_000_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("step size {0} must be finite and positive")]
    BadStep(f64),
    #[error("final time {0} must be finite and positive")]
    BadFinalTime(f64),
    #[error("t_end / dt rounds to zero steps")]
    NoSteps,
    #[error("{requested} steps exceed the limit of {limit}")]
    TooManySteps { requested: u64, limit: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[serde(rename = "euler")]
    ForwardEuler,
    #[serde(rename = "midpoint")]
    MidpointImplicit,
    Rk3,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::ForwardEuler, Scheme::MidpointImplicit, Scheme::Rk3];

    /// Theoretical order of the global truncation error.
    pub fn order(self) -> u32 {
        match self {
            Scheme::ForwardEuler => 1,
            Scheme::MidpointImplicit => 2,
            Scheme::Rk3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ForwardEuler => "euler",
            Scheme::MidpointImplicit => "midpoint",
            Scheme::Rk3 => "rk3",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "euler" => Ok(Scheme::ForwardEuler),
            "midpoint" => Ok(Scheme::MidpointImplicit),
            "rk3" => Ok(Scheme::Rk3),
            other => Err(format!("unknown scheme {other:?} (expected euler, midpoint or rk3)")),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One integrator bound to coefficients and a step size in the arithmetic `T`.
#[derive(Debug, Clone)]
pub struct Stepper<T: Scalar> {
    scheme: Scheme,
    a: T,
    b: T,
    dt: T,
    dt_f64: f64,
    two: T,
    four: T,
    six: T,
}

impl<T: Scalar> Stepper<T> {
    /// `a`, `b` and `dt` are rounded into `T` once, here.
    pub fn new(scheme: Scheme, params: &OscillatorParams, dt: f64, ctx: T::Context) -> Self {
        let (a, b) = params.coefficients::<T>(ctx);
        let dt_t = T::from_f64_in(dt, ctx);
        let two = T::one() + T::one();
        let four = two.clone() + two.clone();
        let six = four.clone() + two.clone();
        Stepper { scheme, a, b, dt_f64: dt_t.to_f64(), dt: dt_t, two, four, six }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// The step size as represented in `T`.
    pub fn dt(&self) -> &T {
        &self.dt
    }

    pub fn step(&self, s: &State<T>) -> State<T> {
        let (x, y) = match self.scheme {
            Scheme::ForwardEuler => self.forward_euler(s),
            Scheme::MidpointImplicit => self.midpoint(s),
            Scheme::Rk3 => self.rk3(s),
        };
        State { x, y, t: s.t + self.dt_f64 }
    }

    /// `x' = x + dt (-a y)`, `y' = y + dt (b x)`.
    fn forward_euler(&self, s: &State<T>) -> (T, T) {
        let dx = -(self.a.clone()) * s.y.clone();
        let dy = self.b.clone() * s.x.clone();
        (
            s.x.clone() + self.dt.clone() * dx,
            s.y.clone() + self.dt.clone() * dy,
        )
    }

    /// Closed-form solve of the midpoint system:
    /// `k = (a dt / 2)(b dt / 2)`,
    /// `x' = (x (1 - k) - a dt y) / (1 + k)`,
    /// `y' = (y (1 - k) + b dt x) / (1 + k)`.
    fn midpoint(&self, s: &State<T>) -> (T, T) {
        let adt = self.a.clone() * self.dt.clone();
        let bdt = self.b.clone() * self.dt.clone();
        let k = (adt.clone() / self.two.clone()) * (bdt.clone() / self.two.clone());
        let one_minus = T::one() - k.clone();
        let one_plus = T::one() + k;
        let x = (s.x.clone() * one_minus.clone() - adt * s.y.clone()) / one_plus.clone();
        let y = (s.y.clone() * one_minus + bdt * s.x.clone()) / one_plus;
        (x, y)
    }

    /// Kutta's tableau: nodes 0, 1/2, 1; weights 1/6, 2/3, 1/6.
    fn rk3(&self, s: &State<T>) -> (T, T) {
        let dt = &self.dt;
        let (k1x, k1y) = rhs_with(&self.a, &self.b, s);

        let half_dt = dt.clone() / self.two.clone();
        let s2 = State {
            x: s.x.clone() + half_dt.clone() * k1x.clone(),
            y: s.y.clone() + half_dt * k1y.clone(),
            t: s.t,
        };
        let (k2x, k2y) = rhs_with(&self.a, &self.b, &s2);

        let s3 = State {
            x: s.x.clone() + dt.clone() * (self.two.clone() * k2x.clone() - k1x.clone()),
            y: s.y.clone() + dt.clone() * (self.two.clone() * k2y.clone() - k1y.clone()),
            t: s.t,
        };
        let (k3x, k3y) = rhs_with(&self.a, &self.b, &s3);

        let incr_x = (k1x + self.four.clone() * k2x + k3x) / self.six.clone();
        let incr_y = (k1y + self.four.clone() * k2y + k3y) / self.six.clone();
        (
            s.x.clone() + dt.clone() * incr_x,
            s.y.clone() + dt.clone() * incr_y,
        )
    }
}

fn check_dt(dt: f64) -> Result<(), SchemeError> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(SchemeError::BadStep(dt))
    }
}

pub fn step_forward_euler<T: Scalar>(
    s: &State<T>,
    dt: f64,
    params: &OscillatorParams,
    ctx: T::Context,
) -> Result<State<T>, SchemeError> {
    check_dt(dt)?;
    Ok(Stepper::new(Scheme::ForwardEuler, params, dt, ctx).step(s))
}

pub fn step_midpoint<T: Scalar>(
    s: &State<T>,
    dt: f64,
    params: &OscillatorParams,
    ctx: T::Context,
) -> Result<State<T>, SchemeError> {
    check_dt(dt)?;
    Ok(Stepper::new(Scheme::MidpointImplicit, params, dt, ctx).step(s))
}

pub fn step_rk3<T: Scalar>(
    s: &State<T>,
    dt: f64,
    params: &OscillatorParams,
    ctx: T::Context,
) -> Result<State<T>, SchemeError> {
    check_dt(dt)?;
    Ok(Stepper::new(Scheme::Rk3, params, dt, ctx).step(s))
}

/// The 2×2 one-step map `(x', y') = A (x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateMatrix<T> {
    pub entries: [[T; 2]; 2],
}

impl<T: Scalar> UpdateMatrix<T> {
    pub fn apply(&self, s: &State<T>) -> (T, T) {
        let [[m00, m01], [m10, m11]] = &self.entries;
        (
            m00.clone() * s.x.clone() + m01.clone() * s.y.clone(),
            m10.clone() * s.x.clone() + m11.clone() * s.y.clone(),
        )
    }

    pub fn to_exact(&self) -> UpdateMatrix<BigRational> {
        UpdateMatrix { entries: self.entries.clone().map(|row| row.map(|v| v.to_exact())) }
    }
}

/// One-step matrix of `scheme`, with entries computed in `T`.
///
/// Midpoint: `(1/(1+k)) [[1-k, -a dt], [b dt, 1-k]]`; forward Euler:
/// `I + dt [[0, -a], [b, 0]]`; RK3: `I + dt J + (dt J)²/2 + (dt J)³/6` with
/// `J = [[0, -a], [b, 0]]`. A zero step gives the identity.
pub fn update_matrix<T: Scalar>(
    scheme: Scheme,
    params: &OscillatorParams,
    dt: f64,
    ctx: T::Context,
) -> UpdateMatrix<T> {
    let (a, b) = params.coefficients::<T>(ctx);
    let dt = T::from_f64_in(dt, ctx);
    let one = T::one();
    let zero = T::zero();
    let two = one.clone() + one.clone();
    let entries = match scheme {
        Scheme::ForwardEuler => [
            [one.clone(), zero.clone() - a * dt.clone()],
            [b * dt, one],
        ],
        Scheme::MidpointImplicit => {
            let adt = a * dt.clone();
            let bdt = b * dt;
            let k = (adt.clone() / two.clone()) * (bdt.clone() / two);
            let denom = one.clone() + k.clone();
            let diag = (one - k) / denom.clone();
            [
                [diag.clone(), -adt / denom.clone()],
                [bdt / denom, diag],
            ]
        }
        Scheme::Rk3 => {
            // With h² = ab dt², J² = -ab I, J³ = -ab J:
            // A = (1 - h²/2) I + dt (1 - h²/6) J.
            let ab_dt2 = a.clone() * b.clone() * dt.clone() * dt.clone();
            let six = two.clone() * (two.clone() + one.clone());
            let diag = one.clone() - ab_dt2.clone() / two;
            let scale = dt * (one - ab_dt2 / six);
            [
                [diag.clone(), zero - scale.clone() * a],
                [scale * b, diag],
            ]
        }
    };
    UpdateMatrix { entries }
}

/// Which states an integration keeps.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingPlan {
    /// Every state, including the initial one.
    EveryStep,
    /// Steps `0, k, 2k, ...` plus the final step.
    Every(u64),
    /// Only the final state.
    Final,
    /// The listed step indices (sorted, deduplicated, clipped to the run).
    AtSteps(Vec<u64>),
}

impl SamplingPlan {
    pub(crate) fn resolve(&self, n: u64) -> Sampler {
        match self {
            SamplingPlan::EveryStep => Sampler::Every(1, n),
            SamplingPlan::Every(k) => Sampler::Every((*k).max(1), n),
            SamplingPlan::Final => Sampler::List(vec![n], 0),
            SamplingPlan::AtSteps(steps) => {
                let mut v: Vec<u64> = steps.iter().copied().filter(|&s| s <= n).collect();
                v.sort_unstable();
                v.dedup();
                Sampler::List(v, 0)
            }
        }
    }
}

pub(crate) enum Sampler {
    Every(u64, u64),
    List(Vec<u64>, usize),
}

impl Sampler {
    /// Whether `step` is sampled; calls must be in increasing step order.
    pub(crate) fn take(&mut self, step: u64) -> bool {
        match self {
            Sampler::Every(k, n) => step.is_multiple_of(*k) || step == *n,
            Sampler::List(v, i) => {
                if *i < v.len() && v[*i] == step {
                    *i += 1;
                    true
                } else {
                    false
                }
            }
        }
    }

    /// Last step that must be reached.
    pub(crate) fn last(&self, n: u64) -> u64 {
        match self {
            Sampler::Every(..) => n,
            Sampler::List(v, _) => v.last().copied().unwrap_or(0),
        }
    }
}

/// Sampled states of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Scalar> {
    pub params: OscillatorParams,
    pub scheme: Scheme,
    /// Requested step size.
    pub dt: f64,
    /// Step size as represented in the run arithmetic (exactly an `f64`
    /// for every arithmetic in this crate).
    pub dt_used: f64,
    pub context: T::Context,
    pub n_steps: u64,
    pub samples: Vec<(u64, State<T>)>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn precision_label(&self) -> String {
        T::context_label(self.context)
    }

    pub fn final_state(&self) -> Option<&State<T>> {
        self.samples.last().map(|(_, s)| s)
    }
}

/// `round(t_end / dt)`, checked against the step limit.
pub fn step_count(dt: f64, t_end: f64, max_steps: u64) -> Result<u64, SchemeError> {
    check_dt(dt)?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(SchemeError::BadFinalTime(t_end));
    }
    let ratio = (t_end / dt).round();
    if ratio < 1.0 {
        return Err(SchemeError::NoSteps);
    }
    if ratio > max_steps as f64 {
        return Err(SchemeError::TooManySteps { requested: ratio.min(u64::MAX as f64) as u64, limit: max_steps });
    }
    Ok(ratio as u64)
}

pub fn integrate<T: Scalar>(
    scheme: Scheme,
    params: &OscillatorParams,
    dt: f64,
    t_end: f64,
    ctx: T::Context,
    sampling: &SamplingPlan,
) -> Result<Trajectory<T>, SchemeError> {
    integrate_with_limit(scheme, params, dt, t_end, ctx, sampling, DEFAULT_MAX_STEPS)
}

/// Runs `round(t_end / dt)` steps from `(1, 0)`. Sample time stamps are
/// `step * dt_used`.
pub fn integrate_with_limit<T: Scalar>(
    scheme: Scheme,
    params: &OscillatorParams,
    dt: f64,
    t_end: f64,
    ctx: T::Context,
    sampling: &SamplingPlan,
    max_steps: u64,
) -> Result<Trajectory<T>, SchemeError> {
    let n = step_count(dt, t_end, max_steps)?;
    let stepper = Stepper::<T>::new(scheme, params, dt, ctx);
    let dt_used = stepper.dt().to_f64();
    let mut sampler = sampling.resolve(n);
    let last = sampler.last(n);

    let mut samples = Vec::new();
    let mut state = State::<T>::initial();
    if sampler.take(0) {
        samples.push((0, state.clone()));
    }
    for step in 1..=last {
        state = stepper.step(&state);
        state.t = step as f64 * dt_used;
        if sampler.take(step) {
            samples.push((step, state.clone()));
        }
    }
    Ok(Trajectory { params: *params, scheme, dt, dt_used, context: ctx, n_steps: n, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpcore::{PrecisionConfig, SoftFloat};
    use crate::oscillator::{invariant_exact, invariant_value};
    use num_traits::{Signed, Zero};

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    fn r(s: &str) -> BigRational {
        crate::fpcore::parse_decimal(s).unwrap()
    }

    /// Parameters that are exactly 0.1, 0.2 as rationals, for checks against
    /// decimal hand arithmetic.
    fn decimal_step(scheme: Scheme, x: &BigRational, y: &BigRational, dt: &BigRational) -> (BigRational, BigRational) {
        let a = r("0.1");
        let b = r("0.2");
        let two = r("2");
        match scheme {
            Scheme::ForwardEuler => (x - dt * &a * y, y + dt * &b * x),
            Scheme::MidpointImplicit => {
                let k = (&a * dt / &two) * (&b * dt / &two);
                let one = r("1");
                (
                    (x * (&one - &k) - &a * dt * y) / (&one + &k),
                    (y * (&one - &k) + &b * dt * x) / (&one + &k),
                )
            }
            Scheme::Rk3 => unreachable!(),
        }
    }

    #[test]
    fn forward_euler_exact_example() {
        let (x, y) = decimal_step(Scheme::ForwardEuler, &r("1"), &r("0"), &r("0.1"));
        assert_eq!((x, y), (r("1"), r("0.02")));
    }

    #[test]
    fn midpoint_exact_example() {
        let (x, y) = decimal_step(Scheme::MidpointImplicit, &r("1"), &r("0"), &r("0.1"));
        assert_eq!(x, r("0.99995") / r("1.00005"));
        assert_eq!(y, r("0.02") / r("1.00005"));
        let inv = invariant_exact(&r("0.1"), &r("0.2"), &x, &y);
        assert_eq!(inv, r("0.2"));
    }

    #[test]
    fn generic_step_agrees_with_hand_formula_on_binary_params() {
        // With binary64 coefficients fed exactly, the generic exact step
        // equals the hand-written rational formula.
        let p = params();
        let s = State::<BigRational>::initial();
        let got = step_midpoint(&s, 0.1, &p, ()).unwrap();
        let (a, b) = (p.exact_a(), p.exact_b());
        let dt = BigRational::from_float(0.1).unwrap();
        let two = r("2");
        let one = r("1");
        let k = (&a * &dt / &two) * (&b * &dt / &two);
        assert_eq!(got.x, (&one - &k) / (&one + &k));
        assert_eq!(got.y, &b * &dt / (&one + &k));
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let p = params();
        let z = State::<BigRational>::new(Zero::zero(), Zero::zero(), 0.0);
        for scheme in Scheme::ALL {
            let out = Stepper::<BigRational>::new(scheme, &p, 0.37, ()).step(&z);
            assert!(out.x.is_zero() && out.y.is_zero(), "{scheme}");
        }
    }

    #[test]
    fn single_step_forward_euler_matches_native_f32() {
        let p = params();
        let s = State::<SoftFloat>::initial();
        let emu = step_forward_euler(&s, 0.1, &p, PrecisionConfig::SINGLE).unwrap();
        let nat = step_forward_euler(&State::<f32>::initial(), 0.1, &p, ()).unwrap();
        assert_eq!(emu.x.to_f32().to_bits(), nat.x.to_bits());
        assert_eq!(emu.y.to_f32().to_bits(), nat.y.to_bits());
    }

    #[test]
    fn rejects_nonpositive_step() {
        let p = params();
        let s = State::<f64>::initial();
        assert_eq!(step_midpoint(&s, 0.0, &p, ()), Err(SchemeError::BadStep(0.0)));
        assert!(step_rk3(&s, -1.0, &p, ()).is_err());
    }

    #[test]
    fn rk3_exact_matches_independent_reimplementation() {
        // Oracle: the classical Kutta update written out directly in
        // rationals, without the Stepper machinery.
        let p = params();
        let (a, b) = (p.exact_a(), p.exact_b());
        let h = BigRational::from_float(0.1).unwrap();
        let f = |x: &BigRational, y: &BigRational| (-(&a * y), &b * x);
        let (x0, y0) = (r("1"), r("0"));
        let (k1x, k1y) = f(&x0, &y0);
        let (k2x, k2y) = f(&(&x0 + &h * &k1x / r("2")), &(&y0 + &h * &k1y / r("2")));
        let (k3x, k3y) = f(
            &(&x0 - &h * &k1x + r("2") * &h * &k2x),
            &(&y0 - &h * &k1y + r("2") * &h * &k2y),
        );
        let x1 = &x0 + &h * (&k1x + r("4") * &k2x + &k3x) / r("6");
        let y1 = &y0 + &h * (&k1y + r("4") * &k2y + &k3y) / r("6");

        let got = step_rk3(&State::<BigRational>::initial(), 0.1, &p, ()).unwrap();
        assert_eq!(got.x, x1);
        assert_eq!(got.y, y1);
        // And at p113 the emulated step rounds the exact one.
        let quad = step_rk3(&State::<SoftFloat>::initial(), 0.1, &p, PrecisionConfig::QUAD).unwrap();
        let rel = ((quad.x.to_rational() - &x1) / &x1).abs();
        assert!(rel < r("1e-32"));
    }

    #[test]
    fn rk3_local_error_is_fourth_order() {
        let p = params();
        let err = |h: f64| {
            let s = step_rk3(&State::<SoftFloat>::initial(), h, &p, PrecisionConfig::QUAD).unwrap();
            let exact = crate::oscillator::analytic_at_step(&p, 1, h);
            let dx = s.x.to_rational() - exact.x.to_rational();
            let dy = s.y.to_rational() - exact.y.to_rational();
            num_traits::ToPrimitive::to_f64(&(dx.clone() * dx + dy.clone() * dy)).unwrap().sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn update_matrix_identity_at_zero_step() {
        let p = params();
        for scheme in Scheme::ALL {
            let m = update_matrix::<BigRational>(scheme, &p, 0.0, ());
            assert_eq!(m.entries, [[r("1"), r("0")], [r("0"), r("1")]], "{scheme}");
        }
    }

    #[test]
    fn update_matrix_reproduces_steps_exactly() {
        let p = params();
        let s = State::<BigRational>::new(r("0.3"), r("-1.1"), 0.0);
        for scheme in Scheme::ALL {
            let m = update_matrix::<BigRational>(scheme, &p, 0.1, ());
            let stepped = Stepper::<BigRational>::new(scheme, &p, 0.1, ()).step(&s);
            assert_eq!(m.apply(&s), (stepped.x, stepped.y), "{scheme}");
        }
    }

    #[test]
    fn midpoint_determinant_is_one_exactly() {
        let p = params();
        let m = update_matrix::<BigRational>(Scheme::MidpointImplicit, &p, 0.1, ());
        let [[m00, m01], [m10, m11]] = &m.entries;
        assert_eq!(m00 * m11 - m01 * m10, r("1"));
    }

    #[test]
    fn integrate_one_step_matches_single_step() {
        let p = params();
        let traj = integrate::<BigRational>(Scheme::MidpointImplicit, &p, 0.1, 0.1, (), &SamplingPlan::Final).unwrap();
        assert_eq!(traj.n_steps, 1);
        let single = step_midpoint(&State::initial(), 0.1, &p, ()).unwrap();
        assert_eq!(traj.final_state().unwrap().x, single.x);
        assert_eq!(traj.final_state().unwrap().y, single.y);
    }

    #[test]
    fn exact_midpoint_conserves_and_euler_grows() {
        let p = params();
        let mid = integrate::<BigRational>(Scheme::MidpointImplicit, &p, 0.1, 3.0, (), &SamplingPlan::EveryStep).unwrap();
        for (_, s) in &mid.samples {
            assert_eq!(invariant_value(&p, s, ()), p.exact_b());
        }
        let eu = integrate::<BigRational>(Scheme::ForwardEuler, &p, 0.1, 3.0, (), &SamplingPlan::EveryStep).unwrap();
        let growth = r("1") + p.exact_a() * p.exact_b() * BigRational::from_float(0.1).unwrap().pow(2);
        let mut prev = p.exact_b();
        for (_, s) in eu.samples.iter().skip(1) {
            let inv = invariant_value(&p, s, ());
            assert_eq!(inv, &prev * &growth);
            prev = inv;
        }
    }

    #[test]
    fn step_count_guards() {
        assert_eq!(step_count(0.1, 1.0, 100), Ok(10));
        assert_eq!(step_count(1.0, 0.4, 100), Err(SchemeError::NoSteps));
        assert!(matches!(step_count(1e-9, 100.0, 10_000_000), Err(SchemeError::TooManySteps { .. })));
        assert!(step_count(0.1, -1.0, 10).is_err());
    }

    #[test]
    fn sampling_plans() {
        let p = params();
        let every = integrate::<f64>(Scheme::Rk3, &p, 0.1, 1.0, (), &SamplingPlan::Every(3)).unwrap();
        let steps: Vec<u64> = every.samples.iter().map(|(i, _)| *i).collect();
        assert_eq!(steps, vec![0, 3, 6, 9, 10]);
        let at = integrate::<f64>(Scheme::Rk3, &p, 0.1, 1.0, (), &SamplingPlan::AtSteps(vec![7, 2, 2, 40])).unwrap();
        let steps: Vec<u64> = at.samples.iter().map(|(i, _)| *i).collect();
        assert_eq!(steps, vec![2, 7]);
        for (i, s) in &at.samples {
            assert_eq!(s.t, *i as f64 * at.dt_used);
        }
    }

    #[test]
    fn dt_is_rounded_to_run_precision() {
        let p = params();
        let traj = integrate::<SoftFloat>(
            Scheme::MidpointImplicit,
            &p,
            0.1,
            1.0,
            PrecisionConfig::SINGLE,
            &SamplingPlan::Final,
        )
        .unwrap();
        assert_eq!(traj.dt_used, 0.1f32 as f64);
        assert_eq!(traj.precision_label(), "p24");
    }
}
