//! Error decomposition and diagnostics.
//!
//! All measurement arithmetic is exact (rationals) and results are rounded
//! once to 113 significand bits, so measuring never adds visible error.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiments::SweepRecord;
use crate::fpcore::{self, PrecisionConfig, SoftFloat};
use crate::oscillator::{invariant_exact, OscillatorParams, State};
use crate::scalar::Scalar;
use crate::schemes::{update_matrix, Scheme, Stepper, Trajectory, UpdateMatrix};
use crate::Wide;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("states are at different times: {0}, {1}, {2}")]
    TimeMismatch(f64, f64, f64),
    #[error("trajectory has no consecutive samples")]
    NoConsecutiveSamples,
    #[error("series is empty")]
    EmptySeries,
    #[error("series times must strictly increase (at index {0})")]
    NonIncreasingTimes(usize),
    #[error("threshold {0} must be positive")]
    BadThreshold(f64),
    #[error("sweep has no completed records")]
    EmptySweep,
    #[error("step count must be at least 1")]
    ZeroSteps,
    #[error("step size {0} must be finite and positive")]
    BadStep(f64),
    #[error("per-step round-off magnitude {0} must be finite and nonnegative")]
    BadEpsilon(f64),
}

/// One error vector: exact components and its Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVector {
    pub dx: BigRational,
    pub dy: BigRational,
    pub norm: Wide,
}

impl ErrorVector {
    fn new(dx: BigRational, dy: BigRational) -> Self {
        let norm = euclidean_norm(&dx, &dy);
        ErrorVector { dx, dy, norm }
    }
}

/// Correctly rounded `sqrt(dx² + dy²)` at 113 bits.
pub fn euclidean_norm(dx: &BigRational, dy: &BigRational) -> Wide {
    let sum = dx * dx + dy * dy;
    fpcore::sqrt_rational(&sum, PrecisionConfig::QUAD).expect("sum of squares is nonnegative")
}

/// Total, truncation and round-off error at one time.
///
/// `total = actual - analytic`, `trunc = reference - analytic`,
/// `round = actual - reference`; components are exact, so
/// `total = trunc + round` holds identically.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTriple {
    pub t: f64,
    pub total: ErrorVector,
    pub trunc: ErrorVector,
    pub round: ErrorVector,
}

impl ErrorTriple {
    /// `E`
    pub fn e(&self) -> Wide {
        self.total.norm
    }

    /// `E_t`
    pub fn e_t(&self) -> Wide {
        self.trunc.norm
    }

    /// `E_r`
    pub fn e_r(&self) -> Wide {
        self.round.norm
    }
}

pub fn error_separation<R: Scalar, F: Scalar, G: Scalar>(
    actual: &State<R>,
    reference: &State<F>,
    analytic: &State<G>,
) -> Result<ErrorTriple, AnalysisError> {
    if actual.t != reference.t || actual.t != analytic.t {
        return Err(AnalysisError::TimeMismatch(actual.t, reference.t, analytic.t));
    }
    let (xr, yr) = (actual.x.to_exact(), actual.y.to_exact());
    let (xt, yt) = (reference.x.to_exact(), reference.y.to_exact());
    let (x, y) = (analytic.x.to_exact(), analytic.y.to_exact());
    Ok(ErrorTriple {
        t: actual.t,
        total: ErrorVector::new(&xr - &x, &yr - &y),
        trunc: ErrorVector::new(&xt - &x, &yt - &y),
        round: ErrorVector::new(xr - xt, yr - yt),
    })
}

/// `(a, b, dt)` exactly as a trajectory's arithmetic represents them.
fn exact_coefficients<T: Scalar>(
    traj: &Trajectory<T>,
    params: &OscillatorParams,
) -> (BigRational, BigRational, BigRational) {
    let (a, b) = params.coefficients::<T>(traj.context);
    (a.to_exact(), b.to_exact(), T::from_f64_in(traj.dt, traj.context).to_exact())
}

/// Norm of each scheme's defining stencil residual over consecutive
/// samples, evaluated exactly with the run's own coefficients.
///
/// * forward Euler: `(u' - u)/dt - J u`
/// * midpoint: `(u' - u)/dt - J (u' + u)/2`
/// * RK3: `(u' - Φ(u))/dt`, with `Φ` the exact RK3 map
///
/// An exact-arithmetic trajectory gives zero; a rounded one gives
/// `|ε/dt|` for the per-step round-off `ε`.
pub fn consistency_residual<T: Scalar>(
    traj: &Trajectory<T>,
    params: &OscillatorParams,
) -> Result<Vec<(u64, Wide)>, AnalysisError> {
    let (a, b, dt) = exact_coefficients(traj, params);
    let two = BigRational::from_integer(2.into());
    let rk3 = (traj.scheme == Scheme::Rk3).then(|| {
        // Rounded coefficients never carry more bits than their f64 source,
        // so they pass through f64 exactly.
        let p = OscillatorParams::new(Scalar::to_f64(&a), Scalar::to_f64(&b))
            .expect("rounding keeps coefficients positive");
        Stepper::<BigRational>::new(Scheme::Rk3, &p, Scalar::to_f64(&dt), ())
    });

    let mut out = Vec::new();
    for pair in traj.samples.windows(2) {
        let (i0, s0) = &pair[0];
        let (i1, s1) = &pair[1];
        if *i1 != i0 + 1 {
            continue;
        }
        let (x0, y0) = (s0.x.to_exact(), s0.y.to_exact());
        let (x1, y1) = (s1.x.to_exact(), s1.y.to_exact());
        let (rx, ry) = match traj.scheme {
            Scheme::ForwardEuler => (
                (&x1 - &x0) / &dt + &a * &y0,
                (&y1 - &y0) / &dt - &b * &x0,
            ),
            Scheme::MidpointImplicit => (
                (&x1 - &x0) / &dt + &a * (&y1 + &y0) / &two,
                (&y1 - &y0) / &dt - &b * (&x1 + &x0) / &two,
            ),
            Scheme::Rk3 => {
                let stepper = rk3.as_ref().expect("built for rk3");
                let next = stepper.step(&State::new(x0, y0, 0.0));
                ((&x1 - next.x) / &dt, (&y1 - next.y) / &dt)
            }
        };
        out.push((*i1, euclidean_norm(&rx, &ry)));
    }
    if out.is_empty() {
        return Err(AnalysisError::NoConsecutiveSamples);
    }
    Ok(out)
}

/// Median of a residual series (upper median for even lengths).
pub fn median(values: &[Wide]) -> Option<Wide> {
    let mut v = values.to_vec();
    v.sort();
    v.get(v.len() / 2).copied()
}

/// How per-step round-off errors combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// Errors add coherently: `n ε`.
    WorstCase,
    /// Errors are independent with random signs: `sqrt(n) ε`.
    RandomWalk,
}

/// Magnitude model for the error recurrence
/// `e^n = A^n e^0 + Σ A^k ε + dt Σ A^k c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundModel {
    pub mode: BoundMode,
    /// Size of one step's round-off, `|ε|`.
    pub per_step_eps: f64,
    /// Multiplier on the scheme's truncation residual scale; `0` drops the
    /// truncation term.
    pub truncation_weight: f64,
}

impl ErrorBoundModel {
    /// `per_step_eps = u * max(1, sqrt(b/a))`, the unit roundoff scaled to
    /// the largest state on the orbit.
    pub fn for_precision(params: &OscillatorParams, cfg: PrecisionConfig, mode: BoundMode) -> Self {
        ErrorBoundModel {
            mode,
            per_step_eps: cfg.unit_roundoff() * params.orbit_scale(),
            truncation_weight: 1.0,
        }
    }

    pub fn round_off_only(mut self) -> Self {
        self.truncation_weight = 0.0;
        self
    }
}

/// Spectral norm of a real 2×2 matrix.
fn spectral_norm(m: &[[f64; 2]; 2]) -> f64 {
    let [[p, q], [r, s]] = *m;
    let fro2 = p * p + q * q + r * r + s * s;
    let det = p * s - q * r;
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
    ((fro2 + disc.sqrt()) / 2.0).sqrt()
}

fn mat_mul(x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// Powers up to this are multiplied out explicitly.
const EXPLICIT_POWERS: u64 = 4096;

/// `K = max_{k <= n} ||A^k||`.
///
/// Up to [`EXPLICIT_POWERS`] the maximum is observed directly; beyond that
/// it is the closed-form cap `cond(V) max(1, ρ)^n` from the eigenvector
/// matrix `V` of the 2×2 map.
pub fn stability_constant(m: &UpdateMatrix<f64>, n: u64) -> f64 {
    let a = m.entries;
    if n <= EXPLICIT_POWERS {
        let mut power = [[1.0, 0.0], [0.0, 1.0]];
        let mut k_max: f64 = 1.0;
        for _ in 0..n {
            power = mat_mul(&power, &a);
            k_max = k_max.max(spectral_norm(&power));
        }
        return k_max;
    }
    let [[p, q], [r, s]] = a;
    let tr = p + s;
    let det = p * s - q * r;
    let disc = tr * tr - 4.0 * det;
    let (rho, cond) = if disc < 0.0 {
        // Complex pair λ = α ± iβ: V = [[q, q], [λ - p, λ̄ - p]], and
        // cond(V) = cond([[q, 0], [α - p, β]]).
        let alpha = tr / 2.0;
        let beta = (-disc).sqrt() / 2.0;
        let w = [[q, 0.0], [alpha - p, beta]];
        let smax = spectral_norm(&w);
        let smin = (w[0][0] * w[1][1] - w[0][1] * w[1][0]).abs() / smax;
        (det.abs().sqrt(), smax / smin)
    } else {
        let root = disc.sqrt();
        let l1 = (tr + root) / 2.0;
        let l2 = (tr - root) / 2.0;
        let v1 = eigvec(p, q, r, s, l1);
        let v2 = eigvec(p, q, r, s, l2);
        let w = [[v1[0], v2[0]], [v1[1], v2[1]]];
        let smax = spectral_norm(&w);
        let d = (w[0][0] * w[1][1] - w[0][1] * w[1][0]).abs();
        let cond = if d == 0.0 { f64::INFINITY } else { smax * smax / d };
        (l1.abs().max(l2.abs()), cond)
    };
    cond * rho.max(1.0).powf(n as f64)
}

fn eigvec(p: f64, q: f64, r: f64, s: f64, l: f64) -> [f64; 2] {
    let v = if q.abs() >= r.abs() && q != 0.0 {
        [q, l - p]
    } else if r != 0.0 {
        [l - s, r]
    } else if (p - l).abs() < (s - l).abs() {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / n, v[1] / n]
}

/// Scale of the local truncation residual `c`: one step of an order-`p`
/// scheme misses the flow by about `R (ω dt)^(p+1) / (p+1)!` for orbit
/// radius `R`, so `c ≈ R ω^(p+1) dt^p / (p+1)!`.
pub fn truncation_residual_scale(params: &OscillatorParams, scheme: Scheme, dt: f64) -> f64 {
    let p = scheme.order() as i32;
    let factorial: f64 = (1..=p + 1).map(f64::from).product();
    params.orbit_scale() * params.omega().powi(p + 1) * dt.powi(p) / factorial
}

/// Error bound after `n` steps:
/// `K (n ε + n dt c)` (worst case) or `K (sqrt(n) ε + n dt c)` (random walk).
pub fn predict_error_bound(
    params: &OscillatorParams,
    scheme: Scheme,
    dt: f64,
    n: u64,
    model: &ErrorBoundModel,
) -> Result<f64, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::ZeroSteps);
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(AnalysisError::BadStep(dt));
    }
    if !(model.per_step_eps.is_finite() && model.per_step_eps >= 0.0) {
        return Err(AnalysisError::BadEpsilon(model.per_step_eps));
    }
    let k = stability_constant(&update_matrix::<f64>(scheme, params, dt, ()), n);
    Ok(bound_from_parts(k, n, dt, model, truncation_residual_scale(params, scheme, dt)))
}

/// The bound formula with an explicit `K` and truncation scale.
pub fn bound_from_parts(k: f64, n: u64, dt: f64, model: &ErrorBoundModel, c_bound: f64) -> f64 {
    let n_f = n as f64;
    let round = match model.mode {
        BoundMode::WorstCase => n_f * model.per_step_eps,
        BoundMode::RandomWalk => n_f.sqrt() * model.per_step_eps,
    };
    k * (round + n_f * dt * model.truncation_weight * c_bound)
}

/// Determinant and eigenvalue moduli of a 2×2 map.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub det: Wide,
    pub moduli: (Wide, Wide),
    /// Whether the eigenvalues form a complex-conjugate pair.
    pub complex_pair: bool,
}

impl Spectrum {
    pub fn spectral_radius(&self) -> Wide {
        self.moduli.0.max(self.moduli.1)
    }
}

/// Determinant exactly, eigenvalue moduli from the exact characteristic
/// polynomial with one rounding per square root, all at 113 bits.
pub fn spectral_analysis<T: Scalar>(m: &UpdateMatrix<T>) -> Spectrum {
    let e = m.to_exact().entries;
    let [[p, q], [r, s]] = &e;
    let det = p * s - q * r;
    let tr = p + s;
    let disc = &tr * &tr - BigRational::from_integer(4.into()) * &det;
    let quad = PrecisionConfig::QUAD;
    let det_w = SoftFloat::from_rational(&det, quad);
    if disc.is_negative() {
        let modulus = fpcore::sqrt_rational(&det, quad).expect("complex pair has positive determinant");
        Spectrum { det: det_w, moduli: (modulus, modulus), complex_pair: true }
    } else {
        let root = fpcore::sqrt_rational(&disc, quad).expect("nonnegative discriminant");
        let half_tr = SoftFloat::from_rational(&(&tr / BigRational::from_integer(2.into())), quad);
        let half_root = SoftFloat::from_rational(&(root.to_rational() / BigRational::from_integer(2.into())), quad);
        let l1 = half_tr + half_root;
        let l2 = half_tr - half_root;
        let (m1, m2) = if l1.abs() >= l2.abs() { (l1.abs(), l2.abs()) } else { (l2.abs(), l1.abs()) };
        Spectrum { det: det_w, moduli: (m1, m2), complex_pair: false }
    }
}

/// Earliest sample time whose error reaches `threshold`; `None` if never.
pub fn effective_computation_time(series: &[(f64, f64)], threshold: f64) -> Result<Option<f64>, AnalysisError> {
    if series.is_empty() {
        return Err(AnalysisError::EmptySeries);
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(AnalysisError::BadThreshold(threshold));
    }
    for (i, w) in series.windows(2).enumerate() {
        if w[1].0 <= w[0].0 {
            return Err(AnalysisError::NonIncreasingTimes(i + 1));
        }
    }
    Ok(series.iter().find(|(_, e)| *e >= threshold).map(|(t, _)| *t))
}

/// The completed sweep record with the smallest total error; ties go to the
/// larger step size.
pub fn optimal_step_size(sweep: &[SweepRecord]) -> Result<&SweepRecord, AnalysisError> {
    sweep
        .iter()
        .filter_map(|r| r.errors.as_ref().map(|e| (r, e.e)))
        .min_by(|(ra, ea), (rb, eb)| {
            ea.cmp(eb).then_with(|| rb.dt.partial_cmp(&ra.dt).unwrap_or(std::cmp::Ordering::Equal))
        })
        .map(|(r, _)| r)
        .ok_or(AnalysisError::EmptySweep)
}

/// `|I(u_t) - I(u_0)|` along a trajectory, with `I = b x² + a y²` built from
/// the coefficients the run actually used.
pub fn conservation_drift<T: Scalar>(traj: &Trajectory<T>, params: &OscillatorParams) -> Vec<(f64, Wide)> {
    let (a, b, _) = exact_coefficients(traj, params);
    let initial = invariant_exact(&a, &b, &BigRational::from_integer(1.into()), &BigRational::zero());
    traj.samples
        .iter()
        .map(|(_, s)| {
            let inv = invariant_exact(&a, &b, &s.x.to_exact(), &s.y.to_exact());
            (s.t, SoftFloat::from_rational(&(inv - &initial).abs(), PrecisionConfig::QUAD))
        })
        .collect()
}
