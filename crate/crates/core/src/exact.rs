//! Closed-form solutions, frequency relations and energies.
//!
//! Solutions are evaluated on time [`Jet`]s, so `ẋ` and `ẍ` come out exact.
//! Where a printed relation disagrees with the residual oracle the catalog
//! keeps the validated form as [`SolutionForm::Validated`] and the printed
//! one as [`SolutionForm::Printed`]; see [`misprints`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PdmError, Result};
use crate::exprparse::Jet;
use crate::integrate::Trajectory;
use crate::system::{build_system, Family, ParameterSet, PdmSystem, State, SystemSpec};

/// One coordinate's integration constants.
///
/// `amplitude` is `A` for the harmonic reference, ML1 and the power law,
/// `B` for Morse and `C` for the isotonic families; `phase` is `φ` or `σ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Mode {
    pub fn new(amplitude: f64, phase: f64) -> Self {
        Mode { amplitude, phase }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionForm {
    #[default]
    Validated,
    Printed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolutionSpec {
    pub family: Family,
    pub params: ParameterSet,
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub form: SolutionForm,
}

/// Scalar parameters of one coordinate, resolved from the spec.
#[derive(Debug, Clone, Copy)]
struct Coeffs {
    omega: f64,
    amp: f64,
    phase: f64,
    k: f64,
    kappa: f64,
    zeta: f64,
    alpha: f64,
    upsilon: f64,
    beta: f64,
    eta: f64,
}

impl ExactSolutionSpec {
    pub fn new(family: Family, params: ParameterSet, modes: Vec<Mode>) -> Self {
        ExactSolutionSpec {
            family,
            params,
            modes,
            form: SolutionForm::Validated,
        }
    }

    pub fn printed(mut self) -> Self {
        self.form = SolutionForm::Printed;
        self
    }

    pub fn n(&self) -> usize {
        self.modes.len()
    }

    /// The PDM system the solution belongs to.
    pub fn system(&self) -> Result<PdmSystem> {
        let mut spec = SystemSpec::new(self.family, self.params.clone());
        spec.n = Some(self.modes.len());
        build_system(&spec).map_err(|e| PdmError::InvalidSpec(e.to_string()))
    }

    fn coeffs(&self, i: usize) -> Coeffs {
        let p = &self.params;
        let at = |v: &Option<Vec<f64>>| v.as_ref().and_then(|v| v.get(i).copied()).unwrap_or(f64::NAN);
        let sign = p.sign.map(|s| s.value()).unwrap_or(1.0);
        Coeffs {
            omega: at(&p.omega),
            amp: self.modes[i].amplitude,
            phase: self.modes[i].phase,
            k: sign * p.lambda.unwrap_or(0.0),
            kappa: at(&p.kappa),
            zeta: at(&p.zeta),
            alpha: p.alpha.unwrap_or(f64::NAN),
            upsilon: p.upsilon.unwrap_or(f64::NAN),
            beta: p.beta.unwrap_or(f64::NAN),
            eta: p.eta_exp.unwrap_or(f64::NAN),
        }
    }

    /// Check the spec invariants.
    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::Ml2 | Family::Custom => {
                return Err(PdmError::UnsupportedFamily(format!(
                    "no closed-form solution is catalogued for `{}`",
                    self.family.name()
                )))
            }
            _ => {}
        }
        if self.modes.is_empty() {
            return Err(PdmError::InvalidSpec("at least one mode is required".into()));
        }
        self.system()?;
        for i in 0..self.n() {
            let c = self.coeffs(i);
            if !c.amp.is_finite() || !c.phase.is_finite() {
                return Err(PdmError::InvalidSpec(format!("mode {i}: constants must be finite")));
            }
            match self.family {
                Family::Morse if c.amp.abs() >= 1.0 => {
                    return Err(PdmError::InvalidSpec(format!("mode {i}: Morse needs |B| < 1")))
                }
                Family::Ml1 if 1.0 + c.k * c.amp * c.amp <= 0.0 => {
                    return Err(PdmError::InvalidSpec(format!("mode {i}: need 1 ± λA² > 0")))
                }
                Family::IsotonicReference | Family::Sw1 | Family::Sw2 if c.amp == 0.0 => {
                    return Err(PdmError::InvalidSpec(format!("mode {i}: C must be non-zero")))
                }
                Family::Sw1 => {
                    let d = 1.0 + c.k * c.amp * c.amp;
                    if d <= 0.0 || self.sw1_frequency_squared(&c) <= 0.0 {
                        return Err(PdmError::InvalidSpec(format!(
                            "mode {i}: no real frequency for these constants"
                        )));
                    }
                }
                Family::Sw2 if c.amp.signum() != c.eta.signum() => {
                    return Err(PdmError::InvalidSpec(format!(
                        "mode {i}: C must carry the sign of η for the solution to stay positive"
                    )))
                }
                Family::PowerLaw if c.amp <= 0.0 => {
                    return Err(PdmError::InvalidSpec(format!("mode {i}: A must be positive")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn sw1_frequency_squared(&self, c: &Coeffs) -> f64 {
        let c2 = c.amp * c.amp;
        c.omega * c.omega / (1.0 + c.k * c2) - c.k * c.kappa / c2
    }

    fn frequency(&self, c: &Coeffs) -> f64 {
        match self.family {
            Family::HarmonicReference | Family::IsotonicReference => c.omega,
            Family::Ml1 => {
                let d = (1.0 + c.k * c.amp * c.amp).sqrt();
                match self.form {
                    SolutionForm::Validated => c.omega / d,
                    SolutionForm::Printed => c.omega * c.amp.abs() / d,
                }
            }
            Family::PowerLaw => (1.0 + c.upsilon).abs() * c.omega,
            Family::Morse => c.zeta * c.omega,
            Family::Sw1 => self.sw1_frequency_squared(c).sqrt(),
            Family::Sw2 => c.eta.abs() * c.omega,
            Family::Ml2 | Family::Custom => f64::NAN,
        }
    }

    /// Coordinate jets at time `t`.
    pub fn jets(&self, t: Jet) -> Result<Vec<Jet>> {
        (0..self.n()).map(|i| self.coordinate_jet(i, t)).collect()
    }

    fn coordinate_jet(&self, i: usize, t: Jet) -> Result<Jet> {
        let c = self.coeffs(i);
        let not_real = || PdmError::NotReal { coordinate: i, t: t.v };
        // (1/(wC)) sqrt(w²C⁴ sin²θ + κ cos²θ)
        let isotonic = |w: f64, kappa: f64, theta: Jet| {
            let (s, co) = (theta.sin(), theta.cos());
            let c2 = c.amp * c.amp;
            (s.square() * (w * w * c2 * c2) + co.square() * kappa).sqrt() / (w * c.amp)
        };
        let x = match self.family {
            Family::HarmonicReference => (t * c.omega + c.phase).cos() * c.amp,
            Family::IsotonicReference => isotonic(c.omega, c.kappa, t * c.omega + c.phase),
            Family::Ml1 => (t * self.frequency(&c) + c.phase).cos() * c.amp,
            Family::PowerLaw => {
                let cs = (t * self.frequency(&c) + c.phase).cos();
                let p = 1.0 / (1.0 + c.upsilon);
                if !(cs.v > 0.0) {
                    return Err(not_real());
                }
                cs.powf(p) * c.amp
            }
            Family::Morse => {
                let arg = (t * self.frequency(&c) + c.phase).cos() * c.amp + 1.0;
                arg.ln() / c.zeta
            }
            Family::Sw1 => isotonic(self.frequency(&c), c.kappa, t * self.frequency(&c) + c.phase),
            Family::Sw2 => {
                let theta = t * (c.omega * c.eta) + c.phase;
                let (s, co) = (theta.sin(), theta.cos());
                let c2 = c.amp * c.amp;
                let e2 = c.eta * c.eta;
                let kappa = match self.form {
                    SolutionForm::Validated => e2 * c.kappa,
                    SolutionForm::Printed => c.kappa,
                };
                let base = (s.square() * (e2 * c.omega * c.omega * c2 * c2) + co.square() * kappa).sqrt()
                    / (c.beta * c.eta * c.omega * c.amp);
                if !(base.v > 0.0) {
                    return Err(not_real());
                }
                base.powf(1.0 / c.eta)
            }
            Family::Ml2 | Family::Custom => {
                return Err(PdmError::UnsupportedFamily(self.family.name().into()))
            }
        };
        if !x.is_finite() {
            return Err(not_real());
        }
        Ok(x)
    }

    /// Closure form of [`Self::jets`] for residual evaluation.
    pub fn as_solution(&self) -> impl Fn(Jet) -> Result<Vec<Jet>> + '_ {
        move |t| self.jets(t)
    }

    /// `(x, ẋ, ẍ)` at `t`.
    pub fn derivatives(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let j = self.jets(Jet::variable(t))?;
        Ok((
            j.iter().map(|j| j.v).collect(),
            j.iter().map(|j| j.d1).collect(),
            j.iter().map(|j| j.d2).collect(),
        ))
    }

    /// `(x_i, ẋ_i, ẍ_i)` of a single coordinate at `t`.
    pub fn coordinate_derivatives(&self, i: usize, t: f64) -> Result<(f64, f64, f64)> {
        let j = self.coordinate_jet(i, Jet::variable(t))?;
        Ok((j.v, j.d1, j.d2))
    }

    /// Oscillation period of each coordinate in `t`.
    pub fn periods(&self) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((0..self.n())
            .map(|i| {
                let c = self.coeffs(i);
                let w = self.frequency(&c);
                match self.family {
                    Family::IsotonicReference | Family::Sw1 | Family::Sw2 => PI / w,
                    _ => 2.0 * PI / w,
                }
            })
            .collect())
    }

    /// Longest coordinate period.
    pub fn period(&self) -> Result<f64> {
        Ok(self.periods()?.into_iter().fold(0.0, f64::max))
    }

    /// Tabulate the solution as a trajectory at the given times.
    pub fn tabulate(&self, times: &[f64]) -> Result<Trajectory> {
        let mut samples = Vec::with_capacity(times.len());
        let mut acc = Vec::with_capacity(times.len());
        for &t in times {
            let (x, v, a) = self.derivatives(t)?;
            samples.push(State { t, x, v });
            acc.push(a);
        }
        Trajectory::from_samples(samples, acc)
    }

    /// The reference-frame solution this one maps onto, in `τ`.
    ///
    /// For families whose `τ(t)` is nonlinear the phases must be zero so
    /// that `τ = 0` and `t = 0` label the same point of the orbit.
    pub fn reference_counterpart(&self) -> Result<ExactSolutionSpec> {
        self.validate()?;
        let mut omega = Vec::with_capacity(self.n());
        let mut kappa = Vec::with_capacity(self.n());
        let mut modes = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let c = self.coeffs(i);
            let zero_phase = || {
                if c.phase != 0.0 {
                    Err(PdmError::InvalidSpec("phase alignment is only defined at zero phase".into()))
                } else {
                    Ok(())
                }
            };
            omega.push(c.omega);
            let mode = match self.family {
                Family::HarmonicReference | Family::IsotonicReference => self.modes[i],
                Family::Ml1 => {
                    zero_phase()?;
                    Mode::new(c.amp / (1.0 + c.k * c.amp * c.amp).sqrt(), 0.0)
                }
                Family::PowerLaw => Mode::new(c.alpha * c.amp.powf(1.0 + c.upsilon), c.phase),
                Family::Morse => self.modes[i],
                Family::Sw1 => {
                    zero_phase()?;
                    Mode::new(c.amp / (1.0 + c.k * c.amp * c.amp).sqrt(), 0.0)
                }
                Family::Sw2 => {
                    // the reflected map sends η < 0 onto the q < 0 branch
                    zero_phase()?;
                    Mode::new(c.amp, 0.0)
                }
                Family::Ml2 | Family::Custom => unreachable!("rejected by validate"),
            };
            if matches!(self.family, Family::IsotonicReference | Family::Sw1 | Family::Sw2) {
                kappa.push(c.kappa);
            }
            modes.push(mode);
        }
        let (family, params) = if kappa.is_empty() {
            (
                Family::HarmonicReference,
                ParameterSet {
                    omega: Some(omega),
                    ..Default::default()
                },
            )
        } else {
            (
                Family::IsotonicReference,
                ParameterSet {
                    omega: Some(omega),
                    kappa: Some(kappa),
                    ..Default::default()
                },
            )
        };
        Ok(ExactSolutionSpec::new(family, params, modes))
    }
}

/// `x(t)` and `ẋ(t)` of the closed form.
pub fn exact_solution(spec: &ExactSolutionSpec, t: f64) -> Result<State> {
    spec.validate()?;
    let (x, v, _) = spec.derivatives(t)?;
    Ok(State { t, x, v })
}

/// Angular frequency of each coordinate's closed form.
pub fn frequency_relation(spec: &ExactSolutionSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok((0..spec.n()).map(|i| spec.frequency(&spec.coeffs(i))).collect())
}

/// Total energy from the closed-form expression.
pub fn exact_energy(spec: &ExactSolutionSpec) -> Result<f64> {
    spec.validate()?;
    let mut e = 0.0;
    for i in 0..spec.n() {
        let c = spec.coeffs(i);
        let (w2, a2) = (c.omega * c.omega, c.amp * c.amp);
        e += match spec.family {
            Family::HarmonicReference | Family::Morse => 0.5 * w2 * a2,
            Family::IsotonicReference | Family::Sw2 => 0.5 * (w2 * a2 + c.kappa / a2),
            Family::Ml1 => 0.5 * w2 * a2 / (1.0 + c.k * a2),
            Family::PowerLaw => {
                let b = match spec.form {
                    SolutionForm::Validated => c.amp.powf(1.0 + c.upsilon),
                    SolutionForm::Printed => c.amp.powf(1.0 / (1.0 + c.upsilon)),
                };
                0.5 * c.alpha * c.alpha * w2 * b * b
            }
            Family::Sw1 => {
                // potential at the outer turning point x = C
                let d = 1.0 + c.k * a2;
                0.5 * (w2 * a2 / d + c.kappa * d / a2)
            }
            Family::Ml2 | Family::Custom => unreachable!("rejected by validate"),
        };
    }
    Ok(e)
}

/// True iff `±λ = −1/η_i²` for every coordinate, the condition under which
/// the ML2 force field reproduces the ML1 equations of motion.
pub fn ml2_reduction_check(params: &ParameterSet) -> bool {
    let (Some(lambda), Some(sign), Some(eta)) = (params.lambda, params.sign, params.eta_const.as_ref()) else {
        return false;
    };
    let k = sign.value() * lambda;
    !eta.is_empty()
        && eta.iter().all(|&e| {
            let target = -1.0 / (e * e);
            e != 0.0 && (k - target).abs() <= 1e-12 * target.abs()
        })
}

/// A printed relation that the residual oracle does not confirm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Misprint {
    pub id: &'static str,
    pub topic: &'static str,
    pub printed: &'static str,
    pub validated: &'static str,
    pub evidence: &'static str,
}

const MISPRINTS: [Misprint; 6] = [
    Misprint {
        id: "ml1-frequency",
        topic: "Mathews-Lakshmanan type-I frequency relation",
        printed: "Omega^2 = omega^2 A^2 / (1 +- lambda A^2)",
        validated: "Omega^2 = omega^2 / (1 +- lambda A^2)",
        evidence: "EL-I residual of A cos(Omega t) vanishes only for the validated relation; the energy expression agrees with it",
    },
    Misprint {
        id: "power-law-eom",
        topic: "power-law equation of motion, restoring term",
        printed: "(1 + upsilon) omega^2 x^2",
        validated: "(1 + upsilon) omega^2 x",
        evidence: "generic EL-I with f = 1 + upsilon gives the linear term; the closed form satisfies only that one",
    },
    Misprint {
        id: "power-law-energy",
        topic: "power-law energy constant",
        printed: "B = A^(1/(1 + upsilon))",
        validated: "B = A^(1 + upsilon), E = 1/2 alpha^2 omega^2 A^(2(1 + upsilon))",
        evidence: "total energy evaluated along the closed form",
    },
    Misprint {
        id: "power-law-map-exponent",
        topic: "power-law coordinate map in the transformation identities",
        printed: "exponent alpha + 1",
        validated: "exponent upsilon + 1",
        evidence: "q = x sqrt(m) = alpha x^(1 + upsilon)",
    },
    Misprint {
        id: "morse-scale-subscript",
        topic: "Morse time-scale factor",
        printed: "stray subscript before f_i",
        validated: "f_i = zeta_i",
        evidence: "g = m f^2 with q = exp(zeta x) - 1 and m = exp(2 zeta x)",
    },
    Misprint {
        id: "sw2-eta-restriction",
        topic: "Smorodinsky-Winternitz type-II solution and the eta^2 = 1 restriction",
        printed: "kappa inside the square root; valid only for eta = -1",
        validated: "eta^2 kappa inside the square root; valid for every eta != 0, 1 (C carries the sign of eta)",
        evidence: "EL-I residual: printed form passes at eta = -1 and fails at eta = 2; amended form passes at both",
    },
];

/// The misprint ledger.
pub fn misprints() -> &'static [Misprint] {
    &MISPRINTS
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Sign;

    fn ml1(a: f64) -> ExactSolutionSpec {
        ExactSolutionSpec::new(
            Family::Ml1,
            ParameterSet {
                omega: Some(vec![1.0]),
                lambda: Some(1.0),
                sign: Some(Sign::Plus),
                ..Default::default()
            },
            vec![Mode::new(a, 0.0)],
        )
    }

    #[test]
    fn ml1_at_zero_is_amplitude() {
        assert_eq!(exact_solution(&ml1(1.3), 0.0).unwrap().x, vec![1.3]);
    }

    #[test]
    fn ml1_frequency_and_energy() {
        let w = frequency_relation(&ml1(1.0)).unwrap()[0];
        assert!((w - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((exact_energy(&ml1(1.0)).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(exact_energy(&ml1(0.0)).unwrap(), 0.0);
        let mut flat = ml1(2.0);
        flat.params.lambda = Some(0.0);
        assert_eq!(frequency_relation(&flat).unwrap()[0], 1.0);
    }

    #[test]
    fn power_law_frequency() {
        let spec = ExactSolutionSpec::new(
            Family::PowerLaw,
            ParameterSet {
                omega: Some(vec![1.0]),
                upsilon: Some(1.0),
                alpha: Some(1.0),
                ..Default::default()
            },
            vec![Mode::new(1.0, 0.0)],
        );
        assert_eq!(frequency_relation(&spec).unwrap(), vec![2.0]);
    }

    #[test]
    fn morse_values() {
        let spec = ExactSolutionSpec::new(
            Family::Morse,
            ParameterSet {
                omega: Some(vec![1.0]),
                zeta: Some(vec![1.0]),
                ..Default::default()
            },
            vec![Mode::new(0.5, 0.0)],
        );
        assert!((exact_solution(&spec, 0.0).unwrap().x[0] - 1.5f64.ln()).abs() < 1e-15);
        assert!((exact_energy(&spec).unwrap() - 0.125).abs() < 1e-15);
        let mut bad = spec;
        bad.modes[0].amplitude = 1.0;
        assert!(matches!(exact_solution(&bad, 0.0), Err(PdmError::InvalidSpec(_))));
    }

    #[test]
    fn isotonic_reference_value() {
        let spec = ExactSolutionSpec::new(
            Family::IsotonicReference,
            ParameterSet {
                omega: Some(vec![1.0]),
                kappa: Some(vec![4.0]),
                ..Default::default()
            },
            vec![Mode::new(2.0, 0.0)],
        );
        assert!((exact_solution(&spec, 0.0).unwrap().x[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ml2_reduction_condition() {
        let p = |lambda: f64, sign: Sign, eta: f64| ParameterSet {
            lambda: Some(lambda),
            sign: Some(sign),
            eta_const: Some(vec![eta]),
            ..Default::default()
        };
        assert!(ml2_reduction_check(&p(1.0, Sign::Minus, 1.0)));
        assert!(ml2_reduction_check(&p(0.25, Sign::Minus, 2.0)));
        assert!(ml2_reduction_check(&p(0.25, Sign::Minus, -2.0)));
        assert!(!ml2_reduction_check(&p(0.3, Sign::Minus, 1.0)));
        assert!(!ml2_reduction_check(&p(1.0, Sign::Plus, 1.0)));
    }

    #[test]
    fn unsupported_families() {
        let spec = ExactSolutionSpec::new(Family::Ml2, ParameterSet::default(), vec![Mode::new(1.0, 0.0)]);
        assert!(matches!(frequency_relation(&spec), Err(PdmError::UnsupportedFamily(_))));
    }
}
