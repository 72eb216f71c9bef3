//! Measurements behind the named checks. Each returns the raw metric so
//! tests can apply their own thresholds.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eom::{acceleration, el1_acceleration, el1_residual, Derivatives, ReferenceSystem};
use crate::error::{PdmError, Result};
use crate::exact::{exact_energy, exact_solution, frequency_relation, ExactSolutionSpec};
use crate::exprparse::{eval_dual, parse_expression, Jet};
use crate::integrate::{estimate_period, integrate, IntegratorOptions, Scheme, Termination, Trajectory};
use crate::par::{map_range, Execution};
use crate::profiles::{Interval, MassProfile, Sign};
use crate::system::{build_system, Family, KindTag, ParameterSet, PdmSystem, State, SystemSpec};
use crate::transform::{
    coupled_reference_residuals, g_consistency, map_to_reference, potential_match_residual, NonlocalMap,
};

use super::exprgen::{mutate, random_expr, MALFORMED};
use super::scenarios;

/// Golden-ratio offset for sampling grids, keeping sample times away from
/// rational fractions of a period.
const GRID_OFFSET: f64 = 0.618_033_988_749_894_8;

/// Adaptive options with the given tolerances and default step bounds.
pub fn adaptive(t_end: f64, rel_tol: f64, abs_tol: f64) -> IntegratorOptions {
    IntegratorOptions {
        scheme: Scheme::Adaptive45 {
            rel_tol,
            abs_tol,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1.0,
        },
        t_end,
        max_steps: 50_000_000,
    }
}

fn run_el(system: &PdmSystem, initial: &State, opts: &IntegratorOptions) -> Result<Trajectory> {
    integrate(&|s: &State| acceleration(system, s), initial, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub max: f64,
    pub evaluated: usize,
    /// Grid points where the closed form is not real.
    pub skipped: usize,
}

/// Max EL-I residual of `solution` on `points` grid times spanning `[0, t_end]`.
pub fn residual_max<F>(
    system: &PdmSystem,
    solution: &F,
    t_end: f64,
    points: usize,
    mode: Derivatives,
    exec: Execution,
) -> Result<ResidualSummary>
where
    F: Fn(Jet) -> Result<Vec<Jet>> + Sync,
{
    let results = map_range(exec, points, |k| {
        let t = (k as f64 + GRID_OFFSET) * t_end / points as f64;
        el1_residual(system, solution, t, mode)
    });
    let mut out = ResidualSummary {
        max: 0.0,
        evaluated: 0,
        skipped: 0,
    };
    for r in results {
        match r {
            Ok(r) => {
                out.evaluated += 1;
                out.max = r.iter().fold(out.max, |m, v| m.max(v.abs()));
            }
            Err(PdmError::NotReal { .. }) => out.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if out.evaluated == 0 {
        return Err(PdmError::InvalidSpec("closed form is nowhere real on the grid".into()));
    }
    Ok(out)
}

/// Residual of a catalog closed form over `periods` periods.
pub fn exact_residual(spec: &ExactSolutionSpec, periods: f64, mode: Derivatives, exec: Execution) -> Result<ResidualSummary> {
    spec.validate()?;
    let system = spec.system()?;
    let t_end = periods * spec.period()?;
    residual_max(&system, &spec.as_solution(), t_end, 600, mode, exec)
}

/// Residual of `A(1+δ) cos(Ωt)` with `Ω` taken from the unperturbed `A`.
pub fn perturbed_amplitude_residual(spec: &ExactSolutionSpec, delta: f64, exec: Execution) -> Result<ResidualSummary> {
    let system = spec.system()?;
    let omega = frequency_relation(spec)?;
    let amps: Vec<f64> = spec.modes.iter().map(|m| m.amplitude * (1.0 + delta)).collect();
    let phases: Vec<f64> = spec.modes.iter().map(|m| m.phase).collect();
    let solution = move |t: Jet| -> Result<Vec<Jet>> {
        Ok((0..amps.len()).map(|i| (t * omega[i] + phases[i]).cos() * amps[i]).collect())
    };
    residual_max(&system, &solution, spec.period()?, 600, Derivatives::Analytic, exec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackReport {
    pub max_deviation: f64,
    pub termination: Termination,
    pub t_reached: f64,
    pub t_end: f64,
}

impl TrackReport {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }
}

/// Integrate from the closed form's initial state to `t_end` and record
/// the largest deviation from the closed form at the accepted steps.
pub fn track_exact(spec: &ExactSolutionSpec, t_end: f64, opts: &IntegratorOptions) -> Result<TrackReport> {
    let system = spec.system()?;
    let initial = exact_solution(spec, 0.0)?;
    let traj = run_el(&system, &initial, &IntegratorOptions { t_end, ..*opts })?;
    let mut max_deviation: f64 = 0.0;
    for s in &traj.samples {
        let e = exact_solution(spec, s.t)?;
        for (a, b) in s.x.iter().zip(&e.x) {
            max_deviation = max_deviation.max((a - b).abs());
        }
    }
    Ok(TrackReport {
        max_deviation,
        termination: traj.termination,
        t_reached: traj.t_end(),
        t_end,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    /// `max |E(t) − E(0)| / |E(0)|`.
    pub drift: f64,
    /// `|E(0) − E_closed| / |E_closed|`.
    pub closed_form_mismatch: f64,
    pub termination: Termination,
    pub t_reached: f64,
    pub t_end: f64,
}

/// Relative energy drift along an integrated trajectory started on the
/// closed form.
pub fn energy_drift(spec: &ExactSolutionSpec, t_end: f64, opts: &IntegratorOptions) -> Result<EnergyReport> {
    let system = spec.system()?;
    let initial = exact_solution(spec, 0.0)?;
    let e_closed = exact_energy(spec)?;
    let e0 = system.total_energy(&initial)?.total;
    let traj = run_el(&system, &initial, &IntegratorOptions { t_end, ..*opts })?;
    let mut drift: f64 = 0.0;
    for s in &traj.samples {
        drift = drift.max((system.total_energy(s)?.total - e0).abs() / e0.abs());
    }
    Ok(EnergyReport {
        drift,
        closed_form_mismatch: (e0 - e_closed).abs() / e_closed.abs(),
        termination: traj.termination,
        t_reached: traj.t_end(),
        t_end,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodReport {
    pub measured: Result<f64>,
    pub predicted: f64,
    pub termination: Termination,
}

impl PeriodReport {
    pub fn relative_error(&self) -> f64 {
        match &self.measured {
            Ok(p) => (p - self.predicted).abs() / self.predicted,
            Err(_) => f64::INFINITY,
        }
    }
}

/// Integrate the system of `spec` from its closed-form initial state over
/// `periods` predicted periods and measure the period of coordinate 0.
/// `predicted_by` supplies the relation under test.
pub fn measure_period(
    spec: &ExactSolutionSpec,
    predicted_by: &ExactSolutionSpec,
    periods: f64,
    opts: &IntegratorOptions,
) -> Result<PeriodReport> {
    let system = spec.system()?;
    let initial = exact_solution(spec, 0.0)?;
    let omega = frequency_relation(predicted_by)?[0];
    let predicted = match spec.family {
        Family::IsotonicReference | Family::Sw1 | Family::Sw2 => PI / omega,
        _ => 2.0 * PI / omega,
    };
    let t_end = periods * spec.period()?;
    let traj = run_el(&system, &initial, &IntegratorOptions { t_end, ..*opts })?;
    Ok(PeriodReport {
        measured: estimate_period(&traj, 0),
        predicted,
        termination: traj.termination,
    })
}

/// Sampling interval and catalog system for the transformation identities.
pub fn identity_cases() -> Vec<(&'static str, PdmSystem, Interval)> {
    let sys = |family: Family, params: ParameterSet| {
        build_system(&SystemSpec::new(family, params)).expect("valid catalog system")
    };
    let w = Some(vec![1.3]);
    vec![
        (
            "ml1-plus",
            sys(
                Family::Ml1,
                ParameterSet {
                    omega: w.clone(),
                    lambda: Some(0.8),
                    sign: Some(Sign::Plus),
                    ..Default::default()
                },
            ),
            Interval { lo: -3.0, hi: 3.0 },
        ),
        (
            "ml1-minus",
            sys(
                Family::Ml1,
                ParameterSet {
                    omega: w.clone(),
                    lambda: Some(0.8),
                    sign: Some(Sign::Minus),
                    ..Default::default()
                },
            ),
            Interval::symmetric(0.95 / 0.8f64.sqrt()),
        ),
        (
            "power-law",
            sys(
                Family::PowerLaw,
                ParameterSet {
                    omega: w.clone(),
                    upsilon: Some(1.5),
                    alpha: Some(0.7),
                    ..Default::default()
                },
            ),
            Interval { lo: 0.05, hi: 2.0 },
        ),
        (
            "power-law-reflected",
            sys(
                Family::PowerLaw,
                ParameterSet {
                    omega: w.clone(),
                    upsilon: Some(-2.5),
                    alpha: Some(0.7),
                    ..Default::default()
                },
            ),
            Interval { lo: 0.2, hi: 3.0 },
        ),
        ("ml2", scenarios::ml2_generic(), Interval { lo: 0.05, hi: 3.0 }),
        (
            "morse",
            sys(
                Family::Morse,
                ParameterSet {
                    omega: w.clone(),
                    zeta: Some(vec![0.9]),
                    ..Default::default()
                },
            ),
            Interval { lo: -2.0, hi: 2.0 },
        ),
        (
            "sw1",
            sys(
                Family::Sw1,
                ParameterSet {
                    omega: w.clone(),
                    lambda: Some(0.5),
                    sign: Some(Sign::Plus),
                    kappa: Some(vec![0.6]),
                    ..Default::default()
                },
            ),
            Interval { lo: 0.05, hi: 3.0 },
        ),
        (
            "sw2",
            sys(
                Family::Sw2,
                ParameterSet {
                    omega: w.clone(),
                    eta_exp: Some(-1.0),
                    beta: Some(1.2),
                    kappa: Some(vec![0.6]),
                    ..Default::default()
                },
            ),
            Interval { lo: 0.1, hi: 3.0 },
        ),
        (
            "sw2-eta-two",
            sys(
                Family::Sw2,
                ParameterSet {
                    omega: w,
                    eta_exp: Some(2.0),
                    beta: Some(1.2),
                    kappa: Some(vec![0.6]),
                    ..Default::default()
                },
            ),
            Interval { lo: 0.2, hi: 2.0 },
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Max relative `|g − m f²|/g`.
    pub g_mismatch: f64,
    /// Max `|V_I(x) − V(q(x))|`.
    pub potential_mismatch: f64,
    /// Min `f` seen; positive when `τ` increases everywhere sampled.
    pub f_min: f64,
}

/// Transformation identities at `samples` uniform random points of `interval`.
pub fn transformation_identities(system: &PdmSystem, interval: Interval, samples: usize, seed: u64) -> Result<IdentityReport> {
    let map = NonlocalMap::for_system(system)?;
    let reference = ReferenceSystem::for_system(system)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = IdentityReport {
        g_mismatch: 0.0,
        potential_mismatch: 0.0,
        f_min: f64::INFINITY,
    };
    for _ in 0..samples {
        let x: f64 = rng.random_range(interval.lo..interval.hi);
        if x == 0.0 {
            continue;
        }
        out.g_mismatch = out.g_mismatch.max(g_consistency(&map, 0, x)?);
        out.potential_mismatch = out
            .potential_mismatch
            .max(potential_match_residual(&map, system, &reference, &[x])?);
        out.f_min = out.f_min.min(map.f_scale(0, x)?);
    }
    Ok(out)
}

/// Initial state and integration window for the invariance checks.
pub fn invariance_cases() -> Vec<(&'static str, PdmSystem, State, f64)> {
    let from_exact = |spec: ExactSolutionSpec, periods: f64| {
        let sys = spec.system().expect("valid spec");
        let s0 = exact_solution(&spec, 0.0).expect("valid spec");
        let t = periods * spec.period().expect("valid spec");
        (sys, s0, t)
    };
    let mut out = Vec::new();
    let (s, x, t) = from_exact(scenarios::ml1_pair(), 3.0);
    out.push(("ml1", s, x, t));
    // the power-law orbit reaches x = 0 after a quarter period
    let pl = scenarios::power_law(1.0);
    let (s, x, _) = from_exact(pl.clone(), 0.0);
    out.push(("power-law", s, x, 0.9 * pl.period().expect("valid spec") / 4.0));
    // ML2 keeps f > 0 only while x > 0
    out.push((
        "ml2",
        scenarios::ml2_generic(),
        State::new(0.0, vec![1.0], vec![0.0]),
        1.5,
    ));
    let (s, x, t) = from_exact(scenarios::morse(0.5), 3.0);
    out.push(("morse", s, x, t));
    let (s, x, t) = from_exact(scenarios::sw1_plus(), 3.0);
    out.push(("sw1", s, x, t));
    let (s, x, t) = from_exact(scenarios::sw2(-1.0, crate::exact::SolutionForm::Printed), 3.0);
    out.push(("sw2", s, x, t));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub max_residual: f64,
    pub tau_final: Vec<f64>,
    pub termination: Termination,
}

/// Integrate EL-I, map with the family's nonlocal map and evaluate the
/// reference-frame residual at every accepted step.
pub fn invariance(system: &PdmSystem, initial: &State, t_end: f64, opts: &IntegratorOptions) -> Result<InvarianceReport> {
    let traj = integrate(&|s: &State| el1_acceleration(system, s), initial, &IntegratorOptions { t_end, ..*opts })?;
    let map = NonlocalMap::for_system(system)?;
    let reference = ReferenceSystem::for_system(system)?;
    let mapped = map_to_reference(&map, &traj)?;
    let res = map.reference_residuals(&reference, &traj)?;
    let max_residual = res.iter().flatten().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(InvarianceReport {
        max_residual,
        tau_final: mapped.tau.last().cloned().unwrap_or_default(),
        termination: traj.termination,
    })
}

/// Closed forms for the mapped-exactness checks with their windows.
pub fn mapped_cases() -> Vec<(&'static str, ExactSolutionSpec, f64)> {
    let periods = |spec: &ExactSolutionSpec, p: f64| p * spec.period().expect("valid spec");
    let mut out = Vec::new();
    for (name, spec) in [
        ("ml1-plus", scenarios::ml1(1.0, Sign::Plus, 1.0)),
        ("ml1-minus", scenarios::ml1(1.0, Sign::Minus, 0.5)),
        ("morse", scenarios::morse(0.5)),
        ("sw1-plus", scenarios::sw1_plus()),
        ("sw1-minus", scenarios::sw1_minus()),
        ("sw2-eta-minus-one", scenarios::sw2(-1.0, crate::exact::SolutionForm::Printed)),
        ("sw2-amended", scenarios::sw2(2.0, crate::exact::SolutionForm::Validated)),
    ] {
        let t = periods(&spec, 3.0);
        out.push((name, spec, t));
    }
    let pl = scenarios::power_law(1.0);
    let t = 0.9 * pl.period().expect("valid spec") / 4.0;
    out.push(("power-law-u1", pl, t));
    out
}

/// Tabulate a closed form, map it with `τ` by quadrature, and compare `q`
/// and `q̃` against the reference closed form evaluated at the mapped `τ`.
pub fn mapped_exact_error(spec: &ExactSolutionSpec, t_end: f64, points: usize) -> Result<f64> {
    let times: Vec<f64> = (0..=points).map(|k| t_end * k as f64 / points as f64).collect();
    let traj = spec.tabulate(&times)?;
    let system = spec.system()?;
    let map = NonlocalMap::for_system(&system)?;
    let mapped = map_to_reference(&map, &traj)?;
    let reference = spec.reference_counterpart()?;
    let mut err: f64 = 0.0;
    for k in 0..mapped.t.len() {
        for i in 0..spec.n() {
            let tau = mapped.tau[k][i];
            let (q, qd, _) = reference.coordinate_derivatives(i, tau)?;
            err = err.max((mapped.q[k][i] - q).abs()).max((mapped.qt[k][i] - qd).abs());
        }
    }
    Ok(err)
}

/// `τ` accumulated over one period of the ML1 closed form.
pub fn tau_over_period(spec: &ExactSolutionSpec, points: usize) -> Result<f64> {
    let t_end = spec.period()?;
    let times: Vec<f64> = (0..=points).map(|k| t_end * k as f64 / points as f64).collect();
    let traj = spec.tabulate(&times)?;
    let map = NonlocalMap::for_system(&spec.system()?)?;
    Ok(*map.tau_accumulate(&traj, 0)?.last().expect("non-empty"))
}

/// Max reference-frame residual of the coupled free system in `n`
/// dimensions, integrated with EL-II.
pub fn coupled_residual(n: usize, t_end: f64, opts: &IntegratorOptions) -> Result<f64> {
    let system = scenarios::coupled_free(n);
    let (x, v) = if n == 1 {
        (vec![0.7], vec![0.3])
    } else {
        let mut x = vec![0.7, -0.4];
        let mut v = vec![0.3, 0.9];
        x.resize(n, 0.2);
        v.resize(n, -0.5);
        (x, v)
    };
    let traj = run_el(&system, &State::new(0.0, x, v), &IntegratorOptions { t_end, ..*opts })?;
    if !traj.completed() {
        return Err(PdmError::InvalidSpec(format!("integration stopped: {:?}", traj.termination)));
    }
    let res = coupled_reference_residuals(&system, &traj)?;
    Ok(res.iter().flatten().fold(0.0f64, |m, r| m.max(r.abs())))
}

fn one_dimensional_catalog() -> Vec<SystemSpec> {
    let w = Some(vec![1.1]);
    let specs = [
        (
            Family::Ml1,
            ParameterSet {
                omega: w.clone(),
                lambda: Some(0.7),
                sign: Some(Sign::Plus),
                ..Default::default()
            },
        ),
        (
            Family::Ml1,
            ParameterSet {
                omega: w.clone(),
                lambda: Some(0.7),
                sign: Some(Sign::Minus),
                ..Default::default()
            },
        ),
        (
            Family::PowerLaw,
            ParameterSet {
                omega: w.clone(),
                upsilon: Some(1.5),
                alpha: Some(0.8),
                ..Default::default()
            },
        ),
        (
            Family::Ml2,
            ParameterSet {
                omega: w.clone(),
                lambda: Some(0.3),
                sign: Some(Sign::Plus),
                eta_const: Some(vec![1.4]),
                ..Default::default()
            },
        ),
        (
            Family::Morse,
            ParameterSet {
                omega: w.clone(),
                zeta: Some(vec![0.6]),
                ..Default::default()
            },
        ),
        (
            Family::Sw1,
            ParameterSet {
                omega: w.clone(),
                lambda: Some(0.4),
                sign: Some(Sign::Minus),
                kappa: Some(vec![0.5]),
                ..Default::default()
            },
        ),
        (
            Family::Sw2,
            ParameterSet {
                omega: w,
                eta_exp: Some(2.0),
                beta: Some(0.9),
                kappa: Some(vec![0.5]),
                ..Default::default()
            },
        ),
    ];
    specs.into_iter().map(|(f, p)| SystemSpec::new(f, p)).collect()
}

/// Max `|a_II − a_I| / max(1, |a_I|)` over random states of one-dimensional
/// systems built both ways.
pub fn el2_el1_agreement(samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut pairs = Vec::new();
    for spec in one_dimensional_catalog() {
        let one = build_system(&spec)?;
        let mut lifted = spec.clone();
        lifted.kind = KindTag::TypeII;
        pairs.push((one, build_system(&lifted)?));
    }
    let mut custom = SystemSpec::new(Family::Custom, ParameterSet::default());
    custom.n = Some(1);
    custom.custom.mass = Some(vec!["1 + x^2 + 0.3*sin(x)".into()]);
    custom.custom.potential = Some(vec!["0.5*x^2 + x^4".into()]);
    let mut coupled = custom.clone();
    coupled.kind = KindTag::TypeII;
    coupled.custom.mass = None;
    coupled.custom.potential = None;
    coupled.custom.coupled_mass = Some("1 + x1^2 + 0.3*sin(x1)".into());
    coupled.custom.joint_potential = Some("0.5*x1^2 + x1^4".into());
    pairs.push((build_system(&custom)?, build_system(&coupled)?));

    for (one, two) in &pairs {
        let profile: &MassProfile = &one.profiles().expect("type I")[0];
        let d = profile.domain();
        let (lo, hi) = (d.lo.max(-2.0), d.hi.min(2.0));
        for _ in 0..samples {
            let x: f64 = rng.random_range(lo..hi);
            if x == 0.0 || x <= lo {
                continue;
            }
            let v: f64 = rng.random_range(-2.0..2.0);
            let s = State::new(0.0, vec![x], vec![v]);
            let a1 = crate::eom::el1_acceleration(one, &s)?[0];
            let a2 = crate::eom::el2_acceleration(two, &s)?[0];
            worst = worst.max((a1 - a2).abs() / a1.abs().max(1.0));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionReport {
    pub condition_holds: bool,
    pub max_deviation: f64,
}

/// Integrate the ML2 system at the reduction point and its ML1 partner on
/// the same fixed RK4 grid over `periods` periods.
pub fn ml2_reduction(periods: f64, steps_per_period: usize) -> Result<ReductionReport> {
    let (params, ml2, ml1) = scenarios::ml2_reduction_pair();
    let amplitude = 1.0;
    let k = params.sign.expect("sign").value() * params.lambda.expect("lambda");
    let period = 2.0 * PI * (1.0 + k * amplitude * amplitude).sqrt();
    let h = period / steps_per_period as f64;
    let opts = IntegratorOptions::fixed(h, periods * period);
    let s0 = State::new(0.0, vec![amplitude], vec![0.0]);
    let a = run_el(&ml2, &s0, &opts)?;
    let b = run_el(&ml1, &s0, &opts)?;
    if !a.completed() || !b.completed() || a.len() != b.len() {
        return Err(PdmError::InvalidSpec("reduction runs did not complete".into()));
    }
    let max_deviation = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(p, q)| (p.x[0] - q.x[0]).abs().max((p.v[0] - q.v[0]).abs()))
        .fold(0.0, f64::max);
    Ok(ReductionReport {
        condition_holds: crate::exact::ml2_reduction_check(&params),
        max_deviation,
    })
}

/// Fourth-order central differences of `expr` at `x`.
fn central_differences(expr: &crate::exprparse::Expr, x: f64, h: f64) -> Result<(f64, f64)> {
    let f = |x: f64| expr.eval(&[x]).map_err(PdmError::from);
    let (m2, m1, f0, p1, p2) = (f(x - 2.0 * h)?, f(x - h)?, f(x)?, f(x + h)?, f(x + 2.0 * h)?);
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h);
    Ok((d1, d2))
}

/// Central differences at `h` and `h/2` combined by one Richardson step.
fn finite_differences(expr: &crate::exprparse::Expr, x: f64, h: f64) -> Result<(f64, f64)> {
    let (a1, a2) = central_differences(expr, x, h)?;
    let (b1, b2) = central_differences(expr, x, h / 2.0)?;
    Ok(((16.0 * b1 - a1) / 15.0, (16.0 * b2 - a2) / 15.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdReport {
    /// Max `|d1 − fd1| / max(1, |d1|)`.
    pub d1_error: f64,
    /// Max `|d2 − fd2| / max(1, |d2|)`.
    pub d2_error: f64,
    pub expressions: usize,
}

/// Compare AD derivatives of `count` random expressions (printed and
/// re-parsed) with central differences.
pub fn parser_ad(count: usize, seed: u64) -> Result<AdReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = AdReport {
        d1_error: 0.0,
        d2_error: 0.0,
        expressions: 0,
    };
    for _ in 0..count {
        let generated = random_expr(&mut rng, 4);
        let expr = parse_expression(&generated.to_string(), &["x"])?;
        let x: f64 = rng.random_range(-1.0..1.0);
        let (_, d1, d2) = eval_dual(&expr, x)?;
        let (f1, f2) = finite_differences(&expr, x, 1e-3)?;
        out.d1_error = out.d1_error.max((d1 - f1).abs() / d1.abs().max(1.0));
        out.d2_error = out.d2_error.max((d2 - f2).abs() / d2.abs().max(1.0));
        out.expressions += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MalformedReport {
    /// Inputs that panicked, were wrongly accepted, or carried an
    /// out-of-range position.
    pub failures: usize,
    pub rejected: usize,
    pub tried: usize,
}

/// Feed the fixed malformed corpus plus `count` random single-edit
/// mutations of generated expressions to the parser.
pub fn parser_malformed(count: usize, seed: u64) -> MalformedReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = MalformedReport {
        failures: 0,
        rejected: 0,
        tried: 0,
    };
    let probe = |text: &str, must_fail: bool, out: &mut MalformedReport| {
        out.tried += 1;
        match catch_unwind(AssertUnwindSafe(|| parse_expression(text, &["x"]))) {
            Err(_) => out.failures += 1,
            Ok(Ok(_)) if must_fail => out.failures += 1,
            Ok(Ok(_)) => {}
            Ok(Err(e)) => {
                out.rejected += 1;
                if e.offset() > text.len() {
                    out.failures += 1;
                }
            }
        }
    };
    for text in MALFORMED {
        probe(text, true, &mut out);
    }
    for _ in 0..count {
        let text = random_expr(&mut rng, 3).to_string();
        let bad = mutate(&mut rng, &text);
        probe(&bad, false, &mut out);
    }
    out
}

/// Ratio of RK4 global errors at `h` and `h/2` on `ẍ = −x` over 10 periods,
/// with `h = 2π / steps_per_period`.
pub fn rk4_order_factor(steps_per_period: usize) -> Result<f64> {
    let err = |n: usize| -> Result<f64> {
        let t_end = 20.0 * PI;
        let opts = IntegratorOptions::fixed(2.0 * PI / n as f64, t_end);
        let traj = integrate(&|s: &State| Ok(vec![-s.x[0]]), &State::new(0.0, vec![1.0], vec![0.0]), &opts)?;
        let last = traj.last();
        Ok(((last.x[0] - t_end.cos()).powi(2) + (last.v[0] + t_end.sin()).powi(2)).sqrt())
    };
    Ok(err(steps_per_period)? / err(2 * steps_per_period)?)
}
