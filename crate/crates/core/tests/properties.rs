use pdm_core::eom::{el1_acceleration, el2_acceleration};
use pdm_core::exprparse::{parse_expression, Expr};
use pdm_core::profiles::{MassProfile, Sign};
use pdm_core::system::{build_system, Family, KindTag, ParameterSet, State, SystemSpec};
use pdm_core::transform::{g_consistency, NonlocalMap};
use pdm_core::verify::exprgen::random_node;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

/// A catalog profile and a point inside its domain, kept away from the
/// boundary by a fixed fraction.
fn profile_and_point() -> impl Strategy<Value = (MassProfile, f64)> {
    prop_oneof![
        (0.05f64..3.0, sign(), -0.9f64..0.9).prop_map(|(lambda, sign, u)| {
            let reach = match sign {
                Sign::Plus => 3.0,
                Sign::Minus => 1.0 / lambda.sqrt(),
            };
            (MassProfile::MathewsLakshmanan { lambda, sign }, u * reach)
        }),
        (0.2f64..2.0, -3.0f64..3.0, 0.05f64..4.0)
            .prop_filter("υ ≠ 0", |(_, u, _)| u.abs() > 1e-3)
            .prop_map(|(alpha, upsilon, x)| (MassProfile::PowerLaw { alpha, upsilon }, x)),
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(zeta, x)| (MassProfile::Exponential { zeta }, x)),
        (0.2f64..2.0, -3.0f64..3.0, 0.05f64..4.0)
            .prop_map(|(beta, eta, x)| (MassProfile::IsotonicPowerLaw { beta, eta }, x)),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn profile_derivatives_match_central_differences((profile, x) in profile_and_point()) {
        let d = profile.domain();
        let margin = (x - d.lo).min(d.hi - x).min(1.0);
        let h = 1e-3 * margin;
        let m = |x: f64| profile.eval(x, 0).unwrap();
        let (m2, m1, m0, p1, p2) = (m(x - 2.0 * h), m(x - h), m(x), m(x + h), m(x + 2.0 * h));
        let fd1 = (-p2.m + 8.0 * p1.m - 8.0 * m1.m + m2.m) / (12.0 * h);
        let fd2 = (-p2.dm + 8.0 * p1.dm - 8.0 * m1.dm + m2.dm) / (12.0 * h);
        // a vanishing derivative is compared on the scale of m itself
        let scale1 = m0.dm.abs().max(m0.m * 1e-3 / margin);
        let scale2 = m0.d2m.abs().max(m0.m * 1e-3 / (margin * margin));
        prop_assert!((m0.dm - fd1).abs() <= 1e-6 * scale1, "m' {} vs {}", m0.dm, fd1);
        prop_assert!((m0.d2m - fd2).abs() <= 1e-6 * scale2, "m'' {} vs {}", m0.d2m, fd2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn ml_half_log_slope_identity(lambda in 0.05f64..3.0, s in sign(), u in -0.95f64..0.95) {
        let k = s.value() * lambda;
        let x = match s { Sign::Plus => 4.0 * u, Sign::Minus => u / lambda.sqrt() };
        let p = MassProfile::MathewsLakshmanan { lambda, sign: s }.eval(x, 0).unwrap();
        let expect = -k * x / (1.0 + k * x * x);
        prop_assert!((p.half_log_slope() - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn printed_expressions_parse_back(seed in any::<u64>(), x in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = Expr::from_node(random_node(&mut rng, 4), &["x"]);
        let text = e.to_string();
        let back = parse_expression(&text, &["x"]).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        let (a, b) = (e.eval_jet(&[x], Some(0)).unwrap(), back.eval_jet(&[x], Some(0)).unwrap());
        prop_assert!(close(a.v, b.v, 1e-12) && close(a.d1, b.d1, 1e-12) && close(a.d2, b.d2, 1e-12),
            "{text}: {a:?} vs {b:?}");
    }

    #[test]
    fn parser_is_total(text in "[ -~]{0,40}") {
        match parse_expression(&text, &["x"]) {
            Ok(e) => prop_assert!(!e.to_string().is_empty()),
            Err(err) => prop_assert!(err.offset() <= text.len()),
        }
    }

    #[test]
    fn parser_is_total_near_valid_input(
        text in "(x|1|2\\.5|sin\\(|cos\\(|exp\\(|ln\\(|sqrt\\(|\\(|\\)|\\+|-|\\*|/|\\^| ){0,25}",
    ) {
        match parse_expression(&text, &["x"]) {
            Ok(e) => {
                let again = parse_expression(&e.to_string(), &["x"]).unwrap();
                prop_assert_eq!(again.to_string(), e.to_string());
            }
            Err(err) => prop_assert!(err.offset() <= text.len()),
        }
    }

    #[test]
    fn kinetic_energy_is_non_negative(
        lambda in 0.05f64..2.0, s in sign(), u in -0.95f64..0.95, v in -5.0f64..5.0, w in 0.1f64..3.0,
    ) {
        let params = ParameterSet { omega: Some(vec![w]), lambda: Some(lambda), sign: Some(s), ..Default::default() };
        let system = build_system(&SystemSpec::new(Family::Ml1, params)).unwrap();
        let x = match s { Sign::Plus => 4.0 * u, Sign::Minus => u / lambda.sqrt() };
        let e = system.total_energy(&State::new(0.0, vec![x], vec![v])).unwrap();
        prop_assert!(e.kinetic >= 0.0 && e.potential >= 0.0);
    }

    #[test]
    fn el2_reduces_to_el1_in_one_dimension(
        zeta in 0.1f64..1.5, w in 0.2f64..3.0, x in -2.0f64..2.0, v in -3.0f64..3.0,
    ) {
        let params = ParameterSet { omega: Some(vec![w]), zeta: Some(vec![zeta]), ..Default::default() };
        let one = build_system(&SystemSpec::new(Family::Morse, params.clone())).unwrap();
        let mut spec = SystemSpec::new(Family::Morse, params);
        spec.kind = KindTag::TypeII;
        let two = build_system(&spec).unwrap();
        let s = State::new(0.0, vec![x], vec![v]);
        let (a, b) = (el1_acceleration(&one, &s).unwrap()[0], el2_acceleration(&two, &s).unwrap()[0]);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn oscillator_map_satisfies_g_equals_m_f_squared((profile, x) in profile_and_point()) {
        let map = NonlocalMap::oscillator(vec![profile]);
        prop_assert!(g_consistency(&map, 0, x).unwrap() <= 1e-10);
    }
}
