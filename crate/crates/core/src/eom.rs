//! Equations of motion: PDM EL-I, PDM EL-II and the constant-mass
//! reference systems, plus a residual evaluator for candidate solutions.

use serde::{Deserialize, Serialize};

use crate::error::{PdmError, Result};
use crate::exprparse::Jet;
use crate::profiles::{MassProfile, ProfileValue};
use crate::system::{Family, PdmSystem, Potential, State, SystemKind};

/// Profile value at `x`, separating divergent coefficients from plain
/// domain exits.
fn profile_at(p: &MassProfile, x: f64, coordinate: usize) -> Result<ProfileValue> {
    let raw = p
        .eval_unchecked(x)
        .map_err(|_| PdmError::DomainViolation { coordinate, x })?;
    if raw.m == 0.0 || !raw.m.is_finite() || !raw.dm.is_finite() {
        return Err(PdmError::SingularCoefficient { coordinate, x });
    }
    p.eval(x, coordinate)
}

fn type_i(system: &PdmSystem) -> Result<&[MassProfile]> {
    system
        .profiles()
        .ok_or_else(|| PdmError::WrongKind("EL-I needs a type-I system".into()))
}

/// `ẍ_i = −(m'_i/2m_i) ẋ_i² − ∂_iV/m_i`.
pub fn el1_acceleration(system: &PdmSystem, state: &State) -> Result<Vec<f64>> {
    let profiles = type_i(system)?;
    let pv = profiles
        .iter()
        .zip(&state.x)
        .enumerate()
        .map(|(i, (p, &x))| profile_at(p, x, i))
        .collect::<Result<Vec<_>>>()?;
    let (_, grad) = system.potential().value_and_gradient(&state.x)?;
    Ok(pv
        .iter()
        .zip(&state.v)
        .zip(&grad)
        .map(|((p, &v), &dv)| -p.half_log_slope() * v * v - dv / p.m)
        .collect())
}

/// `ẍ_i = −(ṁ/m) ẋ_i + ½(∂_im/m) Σẋ_j² − ∂_iV/m`.
pub fn el2_acceleration(system: &PdmSystem, state: &State) -> Result<Vec<f64>> {
    let SystemKind::TypeII(profile) = system.kind() else {
        return Err(PdmError::WrongKind("EL-II needs a type-II system".into()));
    };
    let (m, dm) = profile.eval(&state.x)?;
    let (_, grad) = system.potential().value_and_gradient(&state.x)?;
    let mdot: f64 = dm.iter().zip(&state.v).map(|(d, v)| d * v).sum();
    let v2: f64 = state.v.iter().map(|v| v * v).sum();
    Ok((0..system.n())
        .map(|i| -(mdot / m) * state.v[i] + 0.5 * (dm[i] / m) * v2 - grad[i] / m)
        .collect())
}

/// EL-I or EL-II depending on the system kind.
pub fn acceleration(system: &PdmSystem, state: &State) -> Result<Vec<f64>> {
    match system.kind() {
        SystemKind::TypeI(_) => el1_acceleration(system, state),
        SystemKind::TypeII(_) => el2_acceleration(system, state),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReferencePotential {
    Harmonic { omega: Vec<f64> },
    Isotonic { omega: Vec<f64>, kappa: Vec<f64> },
}

/// Constant unit-mass system in the generalized coordinates `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSystem {
    pub n: usize,
    pub potential: ReferencePotential,
}

impl ReferenceSystem {
    pub fn harmonic(omega: Vec<f64>) -> Result<Self> {
        check_positive(&omega, "omega")?;
        Ok(ReferenceSystem {
            n: omega.len(),
            potential: ReferencePotential::Harmonic { omega },
        })
    }

    pub fn isotonic(omega: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        check_positive(&omega, "omega")?;
        check_positive(&kappa, "kappa")?;
        if kappa.len() != omega.len() {
            return Err(PdmError::invalid("kappa", "length differs from omega"));
        }
        Ok(ReferenceSystem {
            n: omega.len(),
            potential: ReferencePotential::Isotonic { omega, kappa },
        })
    }

    /// The reference system a catalog PDM system maps onto.
    pub fn for_system(system: &PdmSystem) -> Result<Self> {
        match system.potential() {
            Potential::HarmonicReference { omega }
            | Potential::Ml1 { omega, .. }
            | Potential::PowerLaw { omega, .. }
            | Potential::Ml2 { omega, .. }
            | Potential::Morse { omega, .. } => Self::harmonic(omega.clone()),
            Potential::IsotonicReference { omega, kappa }
            | Potential::Sw1 { omega, kappa, .. }
            | Potential::Sw2 { omega, kappa, .. } => Self::isotonic(omega.clone(), kappa.clone()),
            Potential::Custom(_) => Err(PdmError::UnsupportedFamily(Family::Custom.name().into())),
        }
    }

    /// `(V_i(q_i), ∂V/∂q_i)`.
    pub fn term(&self, i: usize, q: f64) -> Result<(f64, f64)> {
        match &self.potential {
            ReferencePotential::Harmonic { omega } => {
                let w2 = omega[i] * omega[i];
                Ok((0.5 * w2 * q * q, w2 * q))
            }
            ReferencePotential::Isotonic { omega, kappa } => {
                if q == 0.0 {
                    return Err(PdmError::SingularPoint { coordinate: i });
                }
                let w2 = omega[i] * omega[i];
                Ok((0.5 * (w2 * q * q + kappa[i] / (q * q)), w2 * q - kappa[i] / (q * q * q)))
            }
        }
    }

    pub fn potential_energy(&self, q: &[f64]) -> Result<f64> {
        let mut v = 0.0;
        for (i, &qi) in q.iter().enumerate() {
            v += self.term(i, qi)?.0;
        }
        Ok(v)
    }
}

fn check_positive(v: &[f64], field: &str) -> Result<()> {
    if v.is_empty() {
        return Err(PdmError::invalid(field, "must not be empty"));
    }
    if let Some(bad) = v.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(PdmError::invalid(field, format!("entries must be positive, got {bad}")));
    }
    Ok(())
}

/// `d q̃_i/dτ_i = −∂V/∂q_i`. The velocities `q̃` do not enter.
pub fn reference_acceleration(reference: &ReferenceSystem, q: &[f64], _qt: &[f64]) -> Result<Vec<f64>> {
    (0..q.len()).map(|i| Ok(-reference.term(i, q[i])?.1)).collect()
}

/// How [`el1_residual`] obtains `ẋ` and `ẍ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivatives {
    /// Propagate a time jet through the solution.
    #[default]
    Analytic,
    /// Fourth-order central differences, `h = 1e-4·max(1, |t|)`.
    FiniteDifference,
}

/// EL-I residual from explicit `(x, ẋ, ẍ)`.
pub fn el1_residual_at(system: &PdmSystem, x: &[f64], v: &[f64], a: &[f64]) -> Result<Vec<f64>> {
    let profiles = type_i(system)?;
    let (_, grad) = system.potential().value_and_gradient(x)?;
    profiles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let pv = profile_at(p, x[i], i)?;
            Ok(a[i] + pv.half_log_slope() * v[i] * v[i] + grad[i] / pv.m)
        })
        .collect()
}

/// `r_i(t) = ẍ_i + (m'_i/2m_i) ẋ_i² + ∂_iV/m_i` along `solution`.
///
/// `solution` maps a time jet to coordinate jets; with
/// [`Derivatives::FiniteDifference`] it is only ever called with constants.
pub fn el1_residual<F>(system: &PdmSystem, solution: F, t: f64, mode: Derivatives) -> Result<Vec<f64>>
where
    F: Fn(Jet) -> Result<Vec<Jet>>,
{
    let (x, v, a) = match mode {
        Derivatives::Analytic => {
            let jets = solution(Jet::variable(t))?;
            (
                jets.iter().map(|j| j.v).collect::<Vec<_>>(),
                jets.iter().map(|j| j.d1).collect::<Vec<_>>(),
                jets.iter().map(|j| j.d2).collect::<Vec<_>>(),
            )
        }
        Derivatives::FiniteDifference => {
            let h = 1e-4 * t.abs().max(1.0);
            let at = |s: f64| -> Result<Vec<f64>> {
                Ok(solution(Jet::constant(t + s))?.iter().map(|j| j.v).collect())
            };
            let (m2, m1, x0, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(0.0)?, at(h)?, at(2.0 * h)?);
            let n = x0.len();
            let v = (0..n)
                .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
                .collect();
            let a = (0..n)
                .map(|i| (-p2[i] + 16.0 * p1[i] - 30.0 * x0[i] + 16.0 * m1[i] - m2[i]) / (12.0 * h * h))
                .collect();
            (x0, v, a)
        }
    };
    el1_residual_at(system, &x, &v, &a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Sign;
    use crate::system::{build_system, KindTag, ParameterSet, SystemSpec};

    fn ml1() -> PdmSystem {
        build_system(&SystemSpec::new(
            Family::Ml1,
            ParameterSet {
                omega: Some(vec![1.0]),
                lambda: Some(1.0),
                sign: Some(Sign::Plus),
                ..Default::default()
            },
        ))
        .unwrap()
    }

    #[test]
    fn ml1_examples() {
        let s = ml1();
        let a = el1_acceleration(&s, &State::new(0.0, vec![1.0], vec![0.0])).unwrap();
        assert!((a[0] + 0.5).abs() < 1e-15);
        let a = el1_acceleration(&s, &State::new(0.0, vec![0.0], vec![5.0])).unwrap();
        assert_eq!(a[0], 0.0);
    }

    #[test]
    fn power_law_origin_is_singular() {
        let s = build_system(&SystemSpec::new(
            Family::PowerLaw,
            ParameterSet {
                omega: Some(vec![1.0]),
                upsilon: Some(1.0),
                alpha: Some(1.0),
                ..Default::default()
            },
        ))
        .unwrap();
        let r = el1_acceleration(&s, &State::new(0.0, vec![0.0], vec![1.0]));
        assert!(matches!(r, Err(PdmError::SingularCoefficient { coordinate: 0, .. })));
        let r = el1_acceleration(&s, &State::new(0.0, vec![-0.5], vec![1.0]));
        assert!(matches!(r, Err(PdmError::DomainViolation { .. })));
    }

    #[test]
    fn el2_coupled_example() {
        let mut spec = SystemSpec::new(Family::Custom, ParameterSet::default());
        spec.kind = KindTag::TypeII;
        spec.n = Some(2);
        spec.custom.coupled_mass = Some("1 + x1^2 + x2^2".into());
        spec.custom.joint_potential = Some("0".into());
        let s = build_system(&spec).unwrap();
        let a = el2_acceleration(&s, &State::new(0.0, vec![1.0, 0.0], vec![0.0, 1.0])).unwrap();
        assert!((a[0] - 0.5).abs() < 1e-15 && a[1].abs() < 1e-15);
        assert!(el1_acceleration(&s, &State::new(0.0, vec![1.0, 0.0], vec![0.0, 1.0])).is_err());
    }

    #[test]
    fn el2_constant_mass_is_harmonic() {
        let mut spec = SystemSpec::new(
            Family::HarmonicReference,
            ParameterSet {
                omega: Some(vec![1.0, 3.0]),
                ..Default::default()
            },
        );
        spec.kind = KindTag::TypeII;
        spec.custom.coupled_mass = Some("1".into());
        let s = build_system(&spec).unwrap();
        let a = el2_acceleration(&s, &State::new(0.0, vec![0.5, -2.0], vec![0.3, 0.1])).unwrap();
        assert_eq!(a, vec![-0.5, 18.0]);
    }

    #[test]
    fn reference_examples() {
        let h = ReferenceSystem::harmonic(vec![1.0]).unwrap();
        assert_eq!(reference_acceleration(&h, &[1.0], &[0.0]).unwrap(), vec![-1.0]);
        let iso = ReferenceSystem::isotonic(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(reference_acceleration(&iso, &[1.0], &[0.0]).unwrap(), vec![0.0]);
        assert_eq!(
            reference_acceleration(&iso, &[0.0], &[0.0]),
            Err(PdmError::SingularPoint { coordinate: 0 })
        );
    }

    #[test]
    fn residual_detects_wrong_ansatz() {
        let s = build_system(&SystemSpec::new(
            Family::PowerLaw,
            ParameterSet {
                omega: Some(vec![1.0]),
                upsilon: Some(1.0),
                alpha: Some(1.0),
                ..Default::default()
            },
        ))
        .unwrap();
        let cosine = |t: Jet| Ok(vec![t.cos()]);
        let r = el1_residual(&s, cosine, 0.3, Derivatives::Analytic).unwrap();
        assert!(r[0].abs() > 0.1);
        let fd = el1_residual(&s, cosine, 0.3, Derivatives::FiniteDifference).unwrap();
        assert!((r[0] - fd[0]).abs() < 1e-6);
    }
}
