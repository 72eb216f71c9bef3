//! Time integration of second-order systems `ẍ = a(t, x, ẋ)`.
//!
//! Two schemes are available: classical fixed-step RK4 and an adaptive
//! Dormand–Prince 4(5) pair with PI step control. Acceleration failures of
//! the domain kind reject the step and shrink `h`; the run terminates with
//! [`Termination::DomainViolation`] once `h` falls below `h_min`.

use serde::{Deserialize, Serialize};

use crate::error::{PdmError, Result};
use crate::system::State;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Scheme {
    FixedRk4 {
        h: f64,
    },
    Adaptive45 {
        rel_tol: f64,
        abs_tol: f64,
        h_init: f64,
        h_min: f64,
        h_max: f64,
    },
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme::Adaptive45 {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub scheme: Scheme,
    pub t_end: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    50_000_000
}

impl IntegratorOptions {
    /// Adaptive scheme with default tolerances.
    pub fn adaptive(t_end: f64) -> Self {
        IntegratorOptions {
            scheme: Scheme::default(),
            t_end,
            max_steps: default_max_steps(),
        }
    }

    pub fn fixed(h: f64, t_end: f64) -> Self {
        IntegratorOptions {
            scheme: Scheme::FixedRk4 { h },
            t_end,
            max_steps: default_max_steps(),
        }
    }

    /// Replace the tolerances of an adaptive scheme; no-op for RK4.
    pub fn with_tolerances(mut self, rel: f64, abs: f64) -> Self {
        if let Scheme::Adaptive45 { rel_tol, abs_tol, .. } = &mut self.scheme {
            *rel_tol = rel;
            *abs_tol = abs;
        }
        self
    }

    pub fn validate(&self, t0: f64) -> Result<()> {
        let bad = |field: &str, reason: &str| Err(PdmError::invalid(format!("integrator.{field}"), reason));
        if !self.t_end.is_finite() || self.t_end < t0 {
            return bad("t_end", "must be finite and not before the initial time");
        }
        match self.scheme {
            Scheme::FixedRk4 { h } => {
                if !(h > 0.0) || !h.is_finite() {
                    return bad("h", "must be positive");
                }
            }
            Scheme::Adaptive45 {
                rel_tol,
                abs_tol,
                h_init,
                h_min,
                h_max,
            } => {
                if !(rel_tol > 0.0) {
                    return bad("rel_tol", "must be positive");
                }
                if !(abs_tol > 0.0) {
                    return bad("abs_tol", "must be positive");
                }
                if !(h_min > 0.0 && h_min <= h_init && h_init <= h_max) {
                    return bad("h_init", "need 0 < h_min <= h_init <= h_max");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub max_error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    DomainViolation { t: f64, coordinate: usize },
    StepFailure { t: f64 },
}

/// Accepted steps of an integration, each with its acceleration so the
/// cubic Hermite dense output needs no further right-hand-side calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<State>,
    pub accelerations: Vec<Vec<f64>>,
    pub step_stats: StepStats,
    pub termination: Termination,
}

impl Trajectory {
    /// Wrap externally generated samples, e.g. a tabulated closed form.
    pub fn from_samples(samples: Vec<State>, accelerations: Vec<Vec<f64>>) -> Result<Self> {
        if samples.is_empty() || samples.len() != accelerations.len() {
            return Err(PdmError::invalid("samples", "need one acceleration per sample"));
        }
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(PdmError::invalid("samples", "times must be strictly increasing"));
        }
        Ok(Trajectory {
            samples,
            accelerations,
            step_stats: StepStats::default(),
            termination: Termination::Completed,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn last(&self) -> &State {
        &self.samples[self.samples.len() - 1]
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    /// Index `k` such that `t` lies in `[t_k, t_{k+1}]`.
    fn segment(&self, t: f64) -> Result<usize> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return Err(PdmError::invalid(
                "t",
                format!("{t} outside [{}, {}]", self.t_start(), self.t_end()),
            ));
        }
        let k = self.samples.partition_point(|s| s.t <= t);
        Ok(k.saturating_sub(1).min(self.samples.len().saturating_sub(2)))
    }
}

fn hermite(s: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (3.0 * s2 - 2.0 * s3) * y1 + (s3 - s2) * h * d1
}

/// Dense output: cubic Hermite in `x` from `(x, ẋ)` and in `ẋ` from `(ẋ, ẍ)`.
pub fn interpolate(traj: &Trajectory, t: f64) -> Result<State> {
    if traj.len() == 1 {
        return if t == traj.t_start() {
            Ok(traj.samples[0].clone())
        } else {
            Err(PdmError::invalid("t", "single-sample trajectory"))
        };
    }
    let k = traj.segment(t)?;
    let (a, b) = (&traj.samples[k], &traj.samples[k + 1]);
    let (aa, ab) = (&traj.accelerations[k], &traj.accelerations[k + 1]);
    let h = b.t - a.t;
    let s = (t - a.t) / h;
    let n = a.x.len();
    let x = (0..n).map(|i| hermite(s, h, a.x[i], a.v[i], b.x[i], b.v[i])).collect();
    let v = (0..n).map(|i| hermite(s, h, a.v[i], aa[i], b.v[i], ab[i])).collect();
    Ok(State { t, x, v })
}

/// Interpolated position of one coordinate on segment `k`.
pub(crate) fn interpolate_coordinate(traj: &Trajectory, k: usize, i: usize, t: f64) -> f64 {
    let (a, b) = (&traj.samples[k], &traj.samples[k + 1]);
    let h = b.t - a.t;
    hermite((t - a.t) / h, h, a.x[i], a.v[i], b.x[i], b.v[i])
}

/// One classical RK4 step on `(x, v) → (v, a)`.
pub fn rk4_step<F>(rhs: &F, state: &State, h: f64) -> Result<State>
where
    F: Fn(&State) -> Result<Vec<f64>> + ?Sized,
{
    if h == 0.0 {
        return Ok(state.clone());
    }
    let n = state.n();
    let shifted = |dt: f64, kx: &[f64], kv: &[f64], c: f64| State {
        t: state.t + dt,
        x: (0..n).map(|i| state.x[i] + c * kx[i]).collect(),
        v: (0..n).map(|i| state.v[i] + c * kv[i]).collect(),
    };
    let k1x = state.v.clone();
    let k1v = rhs(state)?;
    let s2 = shifted(0.5 * h, &k1x, &k1v, 0.5 * h);
    let k2v = rhs(&s2)?;
    let k2x = s2.v;
    let s3 = shifted(0.5 * h, &k2x, &k2v, 0.5 * h);
    let k3v = rhs(&s3)?;
    let k3x = s3.v;
    let s4 = shifted(h, &k3x, &k3v, h);
    let k4v = rhs(&s4)?;
    let k4x = s4.v;
    let w = h / 6.0;
    Ok(State {
        t: state.t + h,
        x: (0..n)
            .map(|i| state.x[i] + w * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]))
            .collect(),
        v: (0..n)
            .map(|i| state.v[i] + w * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]))
            .collect(),
    })
}

/// Integrate from `initial` to `opts.t_end`.
///
/// Fails only on invalid options or when the initial state itself cannot be
/// evaluated; failures later on truncate the trajectory instead.
pub fn integrate<F>(rhs: &F, initial: &State, opts: &IntegratorOptions) -> Result<Trajectory>
where
    F: Fn(&State) -> Result<Vec<f64>> + ?Sized,
{
    integrate_guarded(rhs, &|_: &State| None, initial, opts)
}

/// As [`integrate`], with an extra guard evaluated at every stage. The
/// guard returns the index of an offending coordinate, if any.
pub fn integrate_guarded<F, G>(rhs: &F, guard: &G, initial: &State, opts: &IntegratorOptions) -> Result<Trajectory>
where
    F: Fn(&State) -> Result<Vec<f64>> + ?Sized,
    G: Fn(&State) -> Option<usize> + ?Sized,
{
    opts.validate(initial.t)?;
    let eval = |s: &State| -> Result<Vec<f64>> {
        if let Some(coordinate) = guard(s) {
            return Err(PdmError::DomainViolation {
                coordinate,
                x: s.x.get(coordinate).copied().unwrap_or(f64::NAN),
            });
        }
        let a = rhs(s)?;
        if a.iter().any(|v| !v.is_finite()) {
            let coordinate = a.iter().position(|v| !v.is_finite()).unwrap_or(0);
            return Err(PdmError::SingularCoefficient {
                coordinate,
                x: s.x[coordinate],
            });
        }
        Ok(a)
    };
    let a0 = eval(initial)?;
    let mut traj = Trajectory {
        samples: vec![initial.clone()],
        accelerations: vec![a0],
        step_stats: StepStats::default(),
        termination: Termination::Completed,
    };
    if opts.t_end == initial.t {
        return Ok(traj);
    }
    match opts.scheme {
        Scheme::FixedRk4 { h } => run_fixed(&eval, &mut traj, h, opts),
        Scheme::Adaptive45 {
            rel_tol,
            abs_tol,
            h_init,
            h_min,
            h_max,
        } => run_dp45(&eval, &mut traj, opts, rel_tol, abs_tol, h_init, h_min, h_max),
    }
    Ok(traj)
}

fn failure(err: &PdmError, t: f64) -> Termination {
    match err.coordinate() {
        Some(coordinate) if err.is_domain() => Termination::DomainViolation { t, coordinate },
        _ if err.is_domain() => Termination::DomainViolation { t, coordinate: 0 },
        _ => Termination::StepFailure { t },
    }
}

fn run_fixed<E>(eval: &E, traj: &mut Trajectory, h: f64, opts: &IntegratorOptions)
where
    E: Fn(&State) -> Result<Vec<f64>>,
{
    let t0 = traj.t_start();
    let span = opts.t_end - t0;
    let steps = ((span / h) - 1e-9).ceil().max(1.0) as usize;
    for k in 0..steps {
        if k >= opts.max_steps {
            traj.termination = Termination::StepFailure { t: traj.t_end() };
            return;
        }
        let cur = traj.last().clone();
        let t_next = if k + 1 == steps { opts.t_end } else { t0 + (k + 1) as f64 * h };
        let step = rk4_step(eval, &cur, t_next - cur.t).and_then(|mut s| {
            s.t = t_next;
            let a = eval(&s)?;
            Ok((s, a))
        });
        match step {
            Ok((s, a)) => {
                traj.samples.push(s);
                traj.accelerations.push(a);
                traj.step_stats.accepted += 1;
            }
            Err(e) => {
                traj.termination = failure(&e, cur.t);
                return;
            }
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const PI_ALPHA: f64 = 0.17;
const PI_BETA: f64 = 0.04;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const DOMAIN_SHRINK: f64 = 0.25;

/// Outcome of one attempted step.
enum Attempt {
    Ok { y: Vec<f64>, k7: Vec<f64>, err: f64 },
    Domain(PdmError),
    Failed(PdmError),
}

struct Dp45<'a, E> {
    eval: &'a E,
    n: usize,
    rel_tol: f64,
    abs_tol: f64,
}

impl<E> Dp45<'_, E>
where
    E: Fn(&State) -> Result<Vec<f64>>,
{
    /// `dy/dt` for `y = (x, v)`.
    fn deriv(&self, t: f64, y: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let s = State {
            t,
            x: y[..n].to_vec(),
            v: y[n..].to_vec(),
        };
        let a = (self.eval)(&s)?;
        let mut d = Vec::with_capacity(2 * n);
        d.extend_from_slice(&y[n..]);
        d.extend_from_slice(&a);
        Ok(d)
    }

    fn attempt(&self, t: f64, y0: &[f64], k1: &[f64], h: f64) -> Attempt {
        let dim = y0.len();
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        k.push(k1.to_vec());
        let mut y = vec![0.0; dim];
        for stage in 1..7 {
            for j in 0..dim {
                let mut acc = 0.0;
                for (l, kl) in k.iter().enumerate() {
                    acc += A[stage][l] * kl[j];
                }
                y[j] = y0[j] + h * acc;
            }
            match self.deriv(t + C[stage] * h, &y) {
                Ok(d) => k.push(d),
                Err(e) if e.is_domain() => return Attempt::Domain(e),
                Err(e) => return Attempt::Failed(e),
            }
        }
        let mut sum = 0.0;
        for j in 0..dim {
            let mut e = 0.0;
            for (l, kl) in k.iter().enumerate() {
                e += E[l] * kl[j];
            }
            let sc = self.abs_tol + self.rel_tol * y0[j].abs().max(y[j].abs());
            let r = h * e / sc;
            sum += r * r;
        }
        let err = (sum / dim as f64).sqrt();
        Attempt::Ok {
            y,
            k7: k.pop().expect("seven stages"),
            err,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_dp45<E>(
    eval: &E,
    traj: &mut Trajectory,
    opts: &IntegratorOptions,
    rel_tol: f64,
    abs_tol: f64,
    h_init: f64,
    h_min: f64,
    h_max: f64,
) where
    E: Fn(&State) -> Result<Vec<f64>>,
{
    let n = traj.samples[0].n();
    let dp = Dp45 {
        eval,
        n,
        rel_tol,
        abs_tol,
    };
    let first = &traj.samples[0];
    let mut t = first.t;
    let mut y: Vec<f64> = first.x.iter().chain(&first.v).copied().collect();
    let mut k1: Vec<f64> = first.v.iter().chain(&traj.accelerations[0]).copied().collect();
    let mut h = h_init;
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;
    let mut last_domain: Option<PdmError> = None;

    while t < opts.t_end {
        if traj.step_stats.accepted + traj.step_stats.rejected >= opts.max_steps {
            traj.termination = Termination::StepFailure { t };
            return;
        }
        let remaining = opts.t_end - t;
        let last = h >= remaining * (1.0 - 1e-12);
        let h_try = if last { remaining } else { h };
        match dp.attempt(t, &y, &k1, h_try) {
            Attempt::Ok { y: y1, k7, err } if err.is_finite() && err <= 1.0 => {
                let t1 = if last { opts.t_end } else { t + h_try };
                if !(t1 > t) {
                    traj.termination = Termination::StepFailure { t };
                    return;
                }
                traj.step_stats.accepted += 1;
                traj.step_stats.max_error_estimate = traj.step_stats.max_error_estimate.max(err);
                traj.samples.push(State {
                    t: t1,
                    x: y1[..n].to_vec(),
                    v: y1[n..].to_vec(),
                });
                traj.accelerations.push(k7[n..].to_vec());
                t = t1;
                y = y1;
                k1 = k7;
                let e = err.max(1e-10);
                let mut factor = SAFETY * e.powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
                factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
                if rejected_last {
                    factor = factor.min(1.0);
                }
                h = (h_try * factor).min(h_max).max(h_min);
                err_prev = e;
                rejected_last = false;
                last_domain = None;
            }
            Attempt::Ok { err, .. } => {
                traj.step_stats.rejected += 1;
                let factor = if err.is_finite() {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0)
                } else {
                    DOMAIN_SHRINK
                };
                h = h_try * factor;
                rejected_last = true;
            }
            Attempt::Domain(e) => {
                traj.step_stats.rejected += 1;
                h = h_try * DOMAIN_SHRINK;
                rejected_last = true;
                last_domain = Some(e);
            }
            Attempt::Failed(e) => {
                traj.termination = failure(&e, t);
                return;
            }
        }
        if h < h_min {
            traj.termination = match &last_domain {
                Some(e) => failure(e, t),
                None => Termination::StepFailure { t },
            };
            return;
        }
    }
}

/// Mean oscillation period of coordinate `i`.
///
/// Upward crossings of `x_i − ⟨x_i⟩` (time-weighted mean) are located on
/// the Hermite interpolant by bisection; the result is the mean of the
/// spacings between consecutive crossings.
pub fn estimate_period(traj: &Trajectory, coordinate: usize) -> Result<f64> {
    if traj.len() < 3 {
        return Err(PdmError::NoPeriod("too few samples".into()));
    }
    if coordinate >= traj.samples[0].n() {
        return Err(PdmError::invalid("coordinate", "index out of range"));
    }
    let s = &traj.samples;
    let span = traj.t_end() - traj.t_start();
    let mut mean = 0.0;
    for w in s.windows(2) {
        mean += 0.5 * (w[0].x[coordinate] + w[1].x[coordinate]) * (w[1].t - w[0].t);
    }
    mean /= span;

    let mut crossings = Vec::new();
    for k in 0..s.len() - 1 {
        let y0 = s[k].x[coordinate] - mean;
        let y1 = s[k + 1].x[coordinate] - mean;
        if y0 < 0.0 && y1 >= 0.0 {
            let (mut lo, mut hi) = (s[k].t, s[k + 1].t);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if interpolate_coordinate(traj, k, coordinate, mid) - mean < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
    }
    if crossings.len() < 2 {
        return Err(PdmError::NoPeriod(format!(
            "{} upward crossing(s) of the mean",
            crossings.len()
        )));
    }
    let periods: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_p = periods.iter().sum::<f64>() / periods.len() as f64;
    let (lo, hi) = periods
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
    if (hi - lo) / mean_p > 0.01 {
        return Err(PdmError::NoPeriod(format!(
            "period estimates spread over [{lo}, {hi}]"
        )));
    }
    Ok(mean_p)
}
