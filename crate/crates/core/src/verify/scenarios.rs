//! Fixed parameter sets used by the checks and the acceptance tests.

use crate::exact::{ExactSolutionSpec, Mode, SolutionForm};
use crate::profiles::Sign;
use crate::system::{build_system, Family, KindTag, ParameterSet, PdmSystem, SystemSpec};

fn omega(n: usize) -> Option<Vec<f64>> {
    Some(vec![1.0; n])
}

pub fn harmonic_ref() -> ExactSolutionSpec {
    ExactSolutionSpec::new(
        Family::HarmonicReference,
        ParameterSet {
            omega: Some(vec![1.0, 1.6]),
            ..Default::default()
        },
        vec![Mode::new(1.0, 0.0), Mode::new(0.4, 0.3)],
    )
}

pub fn isotonic_ref() -> ExactSolutionSpec {
    ExactSolutionSpec::new(
        Family::IsotonicReference,
        ParameterSet {
            omega: omega(1),
            kappa: Some(vec![4.0]),
            ..Default::default()
        },
        vec![Mode::new(1.5, 0.0)],
    )
}

pub fn ml1(lambda: f64, sign: Sign, amplitude: f64) -> ExactSolutionSpec {
    ExactSolutionSpec::new(
        Family::Ml1,
        ParameterSet {
            omega: omega(1),
            lambda: Some(lambda),
            sign: Some(sign),
            ..Default::default()
        },
        vec![Mode::new(amplitude, 0.0)],
    )
}

/// Two uncoupled ML1 coordinates with different frequencies and phases.
pub fn ml1_pair() -> ExactSolutionSpec {
    ExactSolutionSpec::new(
        Family::Ml1,
        ParameterSet {
            omega: Some(vec![1.0, 2.0]),
            lambda: Some(1.0),
            sign: Some(Sign::Plus),
            ..Default::default()
        },
        vec![Mode::new(1.0, 0.0), Mode::new(0.5, 0.7)],
    )
}

pub fn power_law(upsilon: f64) -> ExactSolutionSpec {
    ExactSolutionSpec::new(
        Family::PowerLaw,
        ParameterSet {
            omega: omega(1),
            upsilon: Some(upsilon),
            alpha: Some(1.0),
            ..Default::default()
        },
        vec![Mode::new(1.0, 0.0)],
    )
}

pub fn morse(b: f64) -> ExactSolutionSpec {
    ExactSolutionSpec::new(
        Family::Morse,
        ParameterSet {
            omega: omega(1),
            zeta: Some(vec![1.0]),
            ..Default::default()
        },
        vec![Mode::new(b, 0.0)],
    )
}

pub fn sw1(lambda: f64, sign: Sign, c: f64) -> ExactSolutionSpec {
    ExactSolutionSpec::new(
        Family::Sw1,
        ParameterSet {
            omega: omega(1),
            lambda: Some(lambda),
            sign: Some(sign),
            kappa: Some(vec![1.0]),
            ..Default::default()
        },
        vec![Mode::new(c, 0.0)],
    )
}

pub fn sw1_plus() -> ExactSolutionSpec {
    sw1(0.5, Sign::Plus, 1.5)
}

pub fn sw1_minus() -> ExactSolutionSpec {
    sw1(0.2, Sign::Minus, 1.2)
}

/// SW2 with `C = 1.5·sign(η)`.
pub fn sw2(eta: f64, form: SolutionForm) -> ExactSolutionSpec {
    let mut spec = ExactSolutionSpec::new(
        Family::Sw2,
        ParameterSet {
            omega: omega(1),
            eta_exp: Some(eta),
            beta: Some(1.0),
            kappa: Some(vec![1.0]),
            ..Default::default()
        },
        vec![Mode::new(1.5 * eta.signum(), 0.0)],
    );
    spec.form = form;
    spec
}

/// ML2 away from the reduction point: `1 − 0.1x²`, `η = 2`.
pub fn ml2_generic() -> PdmSystem {
    build_system(&SystemSpec::new(
        Family::Ml2,
        ParameterSet {
            omega: omega(1),
            lambda: Some(0.1),
            sign: Some(Sign::Minus),
            eta_const: Some(vec![2.0]),
            ..Default::default()
        },
    ))
    .expect("valid ML2 system")
}

/// ML2 at `±λ = −1/η²` with `η = 2`, and the ML1 system it reduces to.
pub fn ml2_reduction_pair() -> (ParameterSet, PdmSystem, PdmSystem) {
    let params = ParameterSet {
        omega: omega(1),
        lambda: Some(0.25),
        sign: Some(Sign::Minus),
        eta_const: Some(vec![2.0]),
        ..Default::default()
    };
    let ml2 = build_system(&SystemSpec::new(Family::Ml2, params.clone())).expect("valid ML2 system");
    let ml1 = build_system(&SystemSpec::new(
        Family::Ml1,
        ParameterSet {
            omega: omega(1),
            lambda: Some(0.25),
            sign: Some(Sign::Minus),
            ..Default::default()
        },
    ))
    .expect("valid ML1 system");
    (params, ml2, ml1)
}

/// Coupled type-II system `m = 1 + Σx_j²`, `V = 0`, in `n` dimensions.
pub fn coupled_free(n: usize) -> PdmSystem {
    let mass = (1..=n).map(|i| format!(" + x{i}^2")).collect::<String>();
    let mut spec = SystemSpec::new(Family::Custom, ParameterSet::default());
    spec.kind = KindTag::TypeII;
    spec.n = Some(n);
    spec.custom.coupled_mass = Some(format!("1{mass}"));
    spec.custom.joint_potential = Some("0".into());
    build_system(&spec).expect("valid coupled system")
}

/// Named closed forms used by the residual, trajectory and energy checks.
pub fn exact_catalog() -> Vec<(&'static str, ExactSolutionSpec)> {
    vec![
        ("harmonic-ref", harmonic_ref()),
        ("isotonic-ref", isotonic_ref()),
        ("ml1-plus", ml1(1.0, Sign::Plus, 1.0)),
        ("ml1-pair", ml1_pair()),
        ("ml1-minus", ml1(1.0, Sign::Minus, 0.5)),
        ("power-law-u1", power_law(1.0)),
        ("power-law-u2", power_law(2.0)),
        ("morse", morse(0.5)),
        ("sw1-plus", sw1_plus()),
        ("sw1-minus", sw1_minus()),
        ("sw2-eta-minus-one", sw2(-1.0, SolutionForm::Printed)),
        ("sw2-amended", sw2(2.0, SolutionForm::Validated)),
    ]
}

/// Cases for the numerical-versus-closed-form comparisons.
pub fn trajectory_catalog() -> Vec<(&'static str, ExactSolutionSpec)> {
    vec![
        ("ml1-plus-0.5", ml1(0.5, Sign::Plus, 1.0)),
        ("ml1-plus-1", ml1(1.0, Sign::Plus, 1.0)),
        ("ml1-minus-0.5", ml1(0.5, Sign::Minus, 1.0)),
        ("ml1-minus-1", ml1(1.0, Sign::Minus, 0.5)),
        ("power-law-u1", power_law(1.0)),
        ("power-law-u2", power_law(2.0)),
        ("morse", morse(0.5)),
        ("sw1-plus", sw1_plus()),
        ("sw1-minus", sw1_minus()),
        ("sw2-eta-minus-one", sw2(-1.0, SolutionForm::Printed)),
    ]
}
