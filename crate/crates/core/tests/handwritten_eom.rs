mod common;

use common::Oracle;
use pdm_core::eom::{el1_acceleration, el2_acceleration};
use pdm_core::profiles::Sign;
use pdm_core::system::{build_system, Family, ParameterSet, State, SystemSpec};
use pdm_core::verify::scenarios;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cases() -> Vec<(Family, ParameterSet, (f64, f64))> {
    let w = Some(vec![1.3]);
    vec![
        (Family::HarmonicReference, ParameterSet { omega: w.clone(), ..Default::default() }, (-3.0, 3.0)),
        (
            Family::IsotonicReference,
            ParameterSet { omega: w.clone(), kappa: Some(vec![0.7]), ..Default::default() },
            (0.1, 3.0),
        ),
        (
            Family::Ml1,
            ParameterSet { omega: w.clone(), lambda: Some(0.6), sign: Some(Sign::Plus), ..Default::default() },
            (-3.0, 3.0),
        ),
        (
            Family::Ml1,
            ParameterSet { omega: w.clone(), lambda: Some(0.6), sign: Some(Sign::Minus), ..Default::default() },
            (-1.2, 1.2),
        ),
        (
            Family::PowerLaw,
            ParameterSet { omega: w.clone(), upsilon: Some(1.5), alpha: Some(0.8), ..Default::default() },
            (0.1, 3.0),
        ),
        (
            Family::Ml2,
            ParameterSet {
                omega: w.clone(),
                lambda: Some(0.3),
                sign: Some(Sign::Plus),
                eta_const: Some(vec![1.7]),
                ..Default::default()
            },
            (-3.0, 3.0),
        ),
        (Family::Morse, ParameterSet { omega: w.clone(), zeta: Some(vec![0.8]), ..Default::default() }, (-2.0, 2.0)),
        (
            Family::Sw1,
            ParameterSet {
                omega: w.clone(),
                lambda: Some(0.4),
                sign: Some(Sign::Minus),
                kappa: Some(vec![0.9]),
                ..Default::default()
            },
            (0.1, 1.5),
        ),
        (
            Family::Sw2,
            ParameterSet {
                omega: w.clone(),
                eta_exp: Some(-1.0),
                beta: Some(1.1),
                kappa: Some(vec![0.9]),
                ..Default::default()
            },
            (0.2, 3.0),
        ),
        (
            Family::Sw2,
            ParameterSet { omega: w, eta_exp: Some(2.5), beta: Some(0.9), kappa: Some(vec![0.4]), ..Default::default() },
            (0.2, 2.0),
        ),
    ]
}

#[test]
fn el1_matches_handwritten_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (family, params, (lo, hi)) in cases() {
        let system = build_system(&SystemSpec::new(family, params.clone())).unwrap();
        let oracle = Oracle::from_params(family, &params, 0);
        for _ in 0..2000 {
            let x = rng.random_range(lo..hi);
            let v = rng.random_range(-2.0..2.0);
            let a = el1_acceleration(&system, &State::new(0.0, vec![x], vec![v])).unwrap()[0];
            let b = oracle.acceleration(x, v);
            assert!(
                (a - b).abs() <= 1e-12 * b.abs().max(1.0),
                "{family:?} at x = {x}, v = {v}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn el2_matches_coupled_free_equations() {
    // m = 1 + |x|², ∇m = 2x: ẍ = −(2 x·v / m) v + (x / m)|v|²
    let system = scenarios::coupled_free(2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
        let m = 1.0 + x[0] * x[0] + x[1] * x[1];
        let xv = x[0] * v[0] + x[1] * v[1];
        let v2 = v[0] * v[0] + v[1] * v[1];
        let a = el2_acceleration(&system, &State::new(0.0, x.clone(), v.clone())).unwrap();
        for i in 0..2 {
            let expect = -2.0 * xv / m * v[i] + x[i] / m * v2;
            assert!((a[i] - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }
}

#[test]
fn catalog_closed_forms_satisfy_handwritten_equations() {
    for (name, spec) in scenarios::exact_catalog() {
        let period = spec.period().unwrap();
        for k in 0..400 {
            let t = (k as f64 + 0.37) * 3.0 * period / 400.0;
            let Ok((x, v, a)) = spec.derivatives(t) else { continue };
            for i in 0..spec.n() {
                let expect = Oracle::from_params(spec.family, &spec.params, i).acceleration(x[i], v[i]);
                assert!(
                    (a[i] - expect).abs() <= 1e-8 * expect.abs().max(1.0),
                    "{name} at t = {t}: {} vs {expect}",
                    a[i]
                );
            }
        }
    }
}
