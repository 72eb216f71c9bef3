//! Nonlocal point transformation `(x, t) → (q, τ)`.
//!
//! Per coordinate: `q_i = q_i(x_i)`, `dτ_i/dt = f_i(x_i)` and
//! `q̃_i = dq_i/dτ_i = ẋ_i √m_i`, with `(dq_i/dx_i)² = m_i f_i²`.

use serde::{Deserialize, Serialize};

use crate::eom::ReferenceSystem;
use crate::error::{PdmError, Result};
use crate::exprparse::Jet;
use crate::integrate::{interpolate_coordinate, Trajectory};
use crate::profiles::MassProfile;
use crate::system::{Family, PdmSystem, Potential, State, SystemKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `q = x√m`, `f = 1 + x m'/2m`.
    Oscillator,
    /// `q = η√m`, `f = η m'/2m`.
    Constant,
    /// `q = √m (1 − e^{−ζx})`.
    Morse,
    /// `q = x√m` onto the isotonic reference.
    Isotonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CoordinateMap {
    profile: MassProfile,
    /// Orientation sign for the `x√m` maps, `η_i` or `ζ_i` otherwise.
    param: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlocalMap {
    kind: MapKind,
    coords: Vec<CoordinateMap>,
}

impl NonlocalMap {
    /// Build from explicit profiles. `params` holds the orientation signs
    /// (`±1`) for the `x√m` maps, `η_i` for [`MapKind::Constant`] and `ζ_i`
    /// for [`MapKind::Morse`].
    pub fn new(kind: MapKind, profiles: Vec<MassProfile>, params: Vec<f64>) -> Result<Self> {
        if profiles.is_empty() || profiles.len() != params.len() {
            return Err(PdmError::invalid("params", "need one parameter per profile"));
        }
        if matches!(kind, MapKind::Oscillator | MapKind::Isotonic) && params.iter().any(|s| s.abs() != 1.0) {
            return Err(PdmError::invalid("params", "orientation must be +1 or -1"));
        }
        Ok(NonlocalMap {
            kind,
            coords: profiles
                .into_iter()
                .zip(params)
                .map(|(profile, param)| CoordinateMap { profile, param })
                .collect(),
        })
    }

    /// `q = x√m` with positive orientation for every coordinate.
    pub fn oscillator(profiles: Vec<MassProfile>) -> Self {
        let n = profiles.len();
        Self::new(MapKind::Oscillator, profiles, vec![1.0; n]).expect("unit orientation")
    }

    /// The map that takes a catalog type-I system onto its reference
    /// oscillator.
    ///
    /// When the raw `x√m` scale factor is a negative constant (power law
    /// with `υ < −1`, isotonic power law with `η < 0`) the map is reflected,
    /// `q → −q`, and `τ` increases with `t`. The reference potentials are
    /// even and `V(x) = V(q(x))` still holds.
    pub fn for_system(system: &PdmSystem) -> Result<Self> {
        let SystemKind::TypeI(profiles) = system.kind() else {
            return Err(PdmError::WrongKind("the nonlocal map needs a type-I system".into()));
        };
        let profiles = profiles.clone();
        let n = profiles.len();
        let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
        match system.potential() {
            Potential::HarmonicReference { .. } | Potential::Ml1 { .. } => {
                Self::new(MapKind::Oscillator, profiles, vec![1.0; n])
            }
            Potential::PowerLaw { upsilon, .. } => {
                Self::new(MapKind::Oscillator, profiles, vec![sign(1.0 + upsilon); n])
            }
            Potential::Ml2 { eta, .. } => Self::new(MapKind::Constant, profiles, eta.clone()),
            Potential::Morse { zeta, .. } => Self::new(MapKind::Morse, profiles, zeta.clone()),
            Potential::IsotonicReference { .. } | Potential::Sw1 { .. } => {
                Self::new(MapKind::Isotonic, profiles, vec![1.0; n])
            }
            Potential::Sw2 { eta, .. } => Self::new(MapKind::Isotonic, profiles, vec![sign(*eta); n]),
            Potential::Custom(_) => Err(PdmError::UnsupportedFamily(Family::Custom.name().into())),
        }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn profile(&self, i: usize) -> &MassProfile {
        &self.coords[i].profile
    }

    fn q_jet(&self, i: usize, x: f64) -> Result<Jet> {
        let c = &self.coords[i];
        let pv = c.profile.eval(x, i)?;
        let xj = Jet::variable(x);
        let sqrt_m = pv.as_jet(xj).sqrt();
        Ok(match self.kind {
            MapKind::Oscillator | MapKind::Isotonic => sqrt_m * xj * c.param,
            MapKind::Constant => sqrt_m * c.param,
            MapKind::Morse => sqrt_m * (1.0 - (xj * -c.param).exp()),
        })
    }

    /// `(q, dq/dx)`.
    pub fn q_map(&self, i: usize, x: f64) -> Result<(f64, f64)> {
        let j = self.q_jet(i, x)?;
        Ok((j.v, j.d1))
    }

    /// `g = (dq/dx)²`.
    pub fn g(&self, i: usize, x: f64) -> Result<f64> {
        let (_, d) = self.q_map(i, x)?;
        Ok(d * d)
    }

    /// The time-scale factor `f_i(x_i)`.
    pub fn f_scale(&self, i: usize, x: f64) -> Result<f64> {
        let c = &self.coords[i];
        let pv = c.profile.eval(x, i)?;
        let s = pv.half_log_slope();
        Ok(match self.kind {
            MapKind::Oscillator | MapKind::Isotonic => c.param * (1.0 + x * s),
            MapKind::Constant => c.param * s,
            MapKind::Morse => s + (c.param - s) * (-c.param * x).exp(),
        })
    }

    /// `x` with `q_map(i, x) = q`, searched in `[lo, hi]` where the map is
    /// assumed monotone (safeguarded Newton–bisection).
    pub fn inverse(&self, i: usize, q: f64, lo: f64, hi: f64) -> Result<f64> {
        let (mut a, mut b) = (lo, hi);
        let fa = self.q_map(i, a)?.0 - q;
        let fb = self.q_map(i, b)?.0 - q;
        if fa == 0.0 {
            return Ok(a);
        }
        if fb == 0.0 {
            return Ok(b);
        }
        if fa.signum() == fb.signum() {
            return Err(PdmError::invalid("q", format!("{q} is not bracketed by q({lo}), q({hi})")));
        }
        let increasing = fb > 0.0;
        let mut x = 0.5 * (a + b);
        for _ in 0..200 {
            let (qx, d) = self.q_map(i, x)?;
            let r = qx - q;
            if r == 0.0 {
                return Ok(x);
            }
            if (r > 0.0) == increasing {
                b = x;
            } else {
                a = x;
            }
            let newton = x - r / d;
            x = if newton > a && newton < b && d.is_finite() && d != 0.0 {
                newton
            } else {
                0.5 * (a + b)
            };
            if (b - a).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                break;
            }
        }
        Ok(x)
    }

    /// Cumulative `τ_i` at every sample: composite Simpson rule on each
    /// step with the midpoint taken from the Hermite dense output.
    pub fn tau_accumulate(&self, traj: &Trajectory, i: usize) -> Result<Vec<f64>> {
        let s = &traj.samples;
        let f_checked = |t: f64, x: f64| -> Result<f64> {
            let f = self.f_scale(i, x)?;
            if !(f > 0.0) {
                return Err(PdmError::NonPositiveScale { coordinate: i, t, value: f });
            }
            Ok(f)
        };
        let mut tau = Vec::with_capacity(s.len());
        tau.push(0.0);
        let mut f0 = f_checked(s[0].t, s[0].x[i])?;
        for k in 0..s.len().saturating_sub(1) {
            let (t0, t1) = (s[k].t, s[k + 1].t);
            let tm = 0.5 * (t0 + t1);
            let fm = f_checked(tm, interpolate_coordinate(traj, k, i, tm))?;
            let f1 = f_checked(t1, s[k + 1].x[i])?;
            tau.push(tau[k] + (t1 - t0) / 6.0 * (f0 + 4.0 * fm + f1));
            f0 = f1;
        }
        Ok(tau)
    }

    /// `(q, q̃)` for one state.
    pub fn map_state(&self, state: &State) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut q = Vec::with_capacity(self.n());
        let mut qt = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            q.push(self.q_map(i, state.x[i])?.0);
            let m = self.coords[i].profile.eval(state.x[i], i)?.m;
            qt.push(state.v[i] * m.sqrt());
        }
        Ok((q, qt))
    }

    /// EL-G residual `dq̃_i/dτ_i + ∂V/∂q_i` at every sample, with
    /// `dq̃/dτ = (dq̃/dt)/f` and `dq̃/dt = √m (ẍ + (m'/2m) ẋ²)` from the
    /// trajectory's stored accelerations.
    pub fn reference_residuals(&self, reference: &ReferenceSystem, traj: &Trajectory) -> Result<Vec<Vec<f64>>> {
        traj.samples
            .iter()
            .zip(&traj.accelerations)
            .map(|(s, a)| {
                (0..self.n())
                    .map(|i| {
                        let pv = self.coords[i].profile.eval(s.x[i], i)?;
                        let f = self.f_scale(i, s.x[i])?;
                        if f == 0.0 {
                            return Err(PdmError::NonPositiveScale { coordinate: i, t: s.t, value: f });
                        }
                        let dqt_dt = pv.m.sqrt() * (a[i] + pv.half_log_slope() * s.v[i] * s.v[i]);
                        let q = self.q_map(i, s.x[i])?.0;
                        Ok(dqt_dt / f + reference.term(i, q)?.1)
                    })
                    .collect()
            })
            .collect()
    }
}

/// A trajectory expressed in the reference frame. Row `k` holds sample `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedTrajectory {
    pub t: Vec<f64>,
    pub tau: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub qt: Vec<Vec<f64>>,
}

/// Map every sample of `traj` through `map`.
pub fn map_to_reference(map: &NonlocalMap, traj: &Trajectory) -> Result<MappedTrajectory> {
    let n = map.n();
    let taus = (0..n).map(|i| map.tau_accumulate(traj, i)).collect::<Result<Vec<_>>>()?;
    let mut out = MappedTrajectory {
        t: Vec::with_capacity(traj.len()),
        tau: Vec::with_capacity(traj.len()),
        q: Vec::with_capacity(traj.len()),
        qt: Vec::with_capacity(traj.len()),
    };
    for (k, s) in traj.samples.iter().enumerate() {
        let (q, qt) = map.map_state(s)?;
        out.t.push(s.t);
        out.tau.push(taus.iter().map(|col| col[k]).collect());
        out.q.push(q);
        out.qt.push(qt);
    }
    Ok(out)
}

/// `|V_I(x) − V(q(x))|`.
pub fn potential_match_residual(
    map: &NonlocalMap,
    system: &PdmSystem,
    reference: &ReferenceSystem,
    x: &[f64],
) -> Result<f64> {
    let v = system.potential_energy(x)?;
    let q = (0..map.n()).map(|i| Ok(map.q_map(i, x[i])?.0)).collect::<Result<Vec<_>>>()?;
    Ok((v - reference.potential_energy(&q)?).abs())
}

/// Relative mismatch `|g − m f²| / g` at one point.
pub fn g_consistency(map: &NonlocalMap, i: usize, x: f64) -> Result<f64> {
    let g = map.g(i, x)?;
    let m = map.profile(i).eval(x, i)?.m;
    let f = map.f_scale(i, x)?;
    Ok((g - m * f * f).abs() / g.abs().max(f64::MIN_POSITIVE))
}

/// Euclidean norm of the EL-II term `½(∂_im/m) Σẋ_j²`, which has no
/// counterpart in the reference equations once `n ≥ 2`.
pub fn el2_obstruction(system: &PdmSystem, state: &State) -> Result<f64> {
    let SystemKind::TypeII(profile) = system.kind() else {
        return Err(PdmError::WrongKind("the obstruction is defined for type-II systems".into()));
    };
    let (m, dm) = profile.eval(&state.x)?;
    let v2: f64 = state.v.iter().map(|v| v * v).sum();
    Ok(dm.iter().map(|d| (0.5 * d / m * v2).powi(2)).sum::<f64>().sqrt())
}

/// Coupled-profile analogue of [`NonlocalMap::reference_residuals`] with
/// `q̃_i = ẋ_i √m(x⃗)` and `dτ = dt`:
/// `r_i = dq̃_i/dt + ∂_iV/√m`, using the trajectory's accelerations.
///
/// For `n = 1` this vanishes identically along EL-II solutions.
pub fn coupled_reference_residuals(system: &PdmSystem, traj: &Trajectory) -> Result<Vec<Vec<f64>>> {
    let SystemKind::TypeII(profile) = system.kind() else {
        return Err(PdmError::WrongKind("needs a type-II system".into()));
    };
    traj.samples
        .iter()
        .zip(&traj.accelerations)
        .map(|(s, a)| {
            let (m, dm) = profile.eval(&s.x)?;
            let (_, grad) = system.potential().value_and_gradient(&s.x)?;
            let mdot: f64 = dm.iter().zip(&s.v).map(|(d, v)| d * v).sum();
            let sm = m.sqrt();
            Ok((0..s.n())
                .map(|i| sm * a[i] + 0.5 * mdot / sm * s.v[i] + grad[i] / sm)
                .collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Sign;

    fn ml(sign: Sign) -> MassProfile {
        MassProfile::MathewsLakshmanan { lambda: 1.0, sign }
    }

    #[test]
    fn q_map_examples() {
        let osc = NonlocalMap::oscillator(vec![ml(Sign::Plus)]);
        assert!((osc.q_map(0, 1.0).unwrap().0 - 0.5f64.sqrt()).abs() < 1e-15);
        let morse = NonlocalMap::new(MapKind::Morse, vec![MassProfile::Exponential { zeta: 1.0 }], vec![1.0]).unwrap();
        assert_eq!(morse.q_map(0, 0.0).unwrap().0, 0.0);
        let c = NonlocalMap::new(MapKind::Constant, vec![ml(Sign::Plus)], vec![2.0]).unwrap();
        assert!((c.q_map(0, 1.0).unwrap().0 - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn f_scale_examples() {
        let osc = NonlocalMap::oscillator(vec![ml(Sign::Plus)]);
        assert!((osc.f_scale(0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let pl = NonlocalMap::oscillator(vec![MassProfile::PowerLaw { alpha: 1.3, upsilon: 2.0 }]);
        for x in [0.1, 1.0, 7.0] {
            assert!((pl.f_scale(0, x).unwrap() - 3.0).abs() < 1e-14);
        }
        let morse = NonlocalMap::new(MapKind::Morse, vec![MassProfile::Exponential { zeta: 1.0 }], vec![1.0]).unwrap();
        for x in [-2.0, 0.0, 0.7] {
            assert!((morse.f_scale(0, x).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_recovers_x() {
        let osc = NonlocalMap::oscillator(vec![ml(Sign::Minus)]);
        for x in [-0.9, -0.2, 0.0, 0.4, 0.99] {
            let q = osc.q_map(0, x).unwrap().0;
            let back = osc.inverse(0, q, -0.999_999, 0.999_999).unwrap();
            assert!((back - x).abs() < 1e-12, "{x} -> {back}");
        }
    }

    #[test]
    fn obstruction_examples() {
        use crate::system::{build_system, KindTag, ParameterSet, SystemSpec};
        let mut spec = SystemSpec::new(Family::Custom, ParameterSet::default());
        spec.kind = KindTag::TypeII;
        spec.n = Some(2);
        spec.custom.coupled_mass = Some("1 + x1^2 + x2^2".into());
        spec.custom.joint_potential = Some("0".into());
        let s = build_system(&spec).unwrap();
        let ob = el2_obstruction(&s, &State::new(0.0, vec![1.0, 0.0], vec![0.0, 1.0])).unwrap();
        assert!((ob - 0.5).abs() < 1e-15);
        spec.custom.coupled_mass = Some("3".into());
        let s = build_system(&spec).unwrap();
        assert_eq!(el2_obstruction(&s, &State::new(0.0, vec![1.0, 0.0], vec![0.0, 1.0])).unwrap(), 0.0);
    }
}
