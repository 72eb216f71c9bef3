//! PDM system description, validation and energy bookkeeping.
//!
//! A [`PdmSystem`] is either per-coordinate ("type I", kinetic term
//! `½ Σ m_j(x_j) ẋ_j²`) or coupled ("type II", `½ m(x⃗) Σ ẋ_j²`). The rest
//! mass is fixed to 1.

use serde::{Deserialize, Serialize};

use crate::error::{PdmError, Result};
use crate::exprparse::{parse_expression, Expr};
use crate::profiles::{CustomProfile, Interval, MassProfile, Sign};

pub const REST_MASS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    HarmonicReference,
    IsotonicReference,
    Ml1,
    PowerLaw,
    Ml2,
    Morse,
    Sw1,
    Sw2,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::HarmonicReference => "harmonic_reference",
            Family::IsotonicReference => "isotonic_reference",
            Family::Ml1 => "ml1",
            Family::PowerLaw => "power_law",
            Family::Ml2 => "ml2",
            Family::Morse => "morse",
            Family::Sw1 => "sw1",
            Family::Sw2 => "sw2",
            Family::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    #[default]
    TypeI,
    TypeII,
}

/// Raw parameter bag. Which entries are required depends on the family.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParameterSet {
    pub omega: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub sign: Option<Sign>,
    pub upsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub zeta: Option<Vec<f64>>,
    pub eta_const: Option<Vec<f64>>,
    pub eta_exp: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<Vec<f64>>,
}

/// Expressions for custom profiles and potentials.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CustomSpec {
    /// Type I: one profile per coordinate, in the variable `x`.
    pub mass: Option<Vec<String>>,
    /// Optional open domain `[lo, hi]` shared by the custom profiles.
    pub mass_domain: Option<[f64; 2]>,
    /// Type II: one profile in `x1 … xn`.
    pub coupled_mass: Option<String>,
    /// Separable potential: one expression per coordinate, in `x`.
    pub potential: Option<Vec<String>>,
    /// Joint potential in `x1 … xn`.
    pub joint_potential: Option<String>,
}

/// Input to [`build_system`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub family: Family,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub kind: KindTag,
    #[serde(default)]
    pub params: ParameterSet,
    #[serde(default)]
    pub custom: CustomSpec,
}

impl SystemSpec {
    pub fn new(family: Family, params: ParameterSet) -> Self {
        SystemSpec {
            family,
            n: None,
            kind: KindTag::TypeI,
            params,
            custom: CustomSpec::default(),
        }
    }
}

/// Coupled type-II profile `m(x⃗)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoupledProfile {
    Expr(Expr),
    /// A one-dimensional profile used as `m(x₁)`; only valid for `n = 1`.
    Lifted(MassProfile),
}

impl CoupledProfile {
    /// `m(x⃗)` and its gradient.
    pub fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (m, grad) = match self {
            CoupledProfile::Expr(e) => e.gradient(x).map_err(|_| PdmError::DomainViolation {
                coordinate: 0,
                x: x.first().copied().unwrap_or(f64::NAN),
            })?,
            CoupledProfile::Lifted(p) => {
                let v = p.eval(x[0], 0)?;
                (v.m, vec![v.dm])
            }
        };
        if !(m > 0.0) || !m.is_finite() {
            return Err(PdmError::DomainViolation { coordinate: 0, x: x[0] });
        }
        Ok((m, grad))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SystemKind {
    TypeI(Vec<MassProfile>),
    TypeII(CoupledProfile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CustomPotential {
    Separable(Vec<Expr>),
    Joint(Expr),
}

/// Validated potential. Catalog entries are separable, `V = Σ V_i(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    HarmonicReference { omega: Vec<f64> },
    IsotonicReference { omega: Vec<f64>, kappa: Vec<f64> },
    Ml1 { lambda: f64, sign: Sign, omega: Vec<f64> },
    PowerLaw { alpha: f64, upsilon: f64, omega: Vec<f64> },
    Ml2 { lambda: f64, sign: Sign, omega: Vec<f64>, eta: Vec<f64> },
    Morse { zeta: Vec<f64>, omega: Vec<f64> },
    Sw1 { lambda: f64, sign: Sign, omega: Vec<f64>, kappa: Vec<f64> },
    Sw2 { beta: f64, eta: f64, omega: Vec<f64>, kappa: Vec<f64> },
    Custom(CustomPotential),
}

impl Potential {
    pub fn family(&self) -> Family {
        match self {
            Potential::HarmonicReference { .. } => Family::HarmonicReference,
            Potential::IsotonicReference { .. } => Family::IsotonicReference,
            Potential::Ml1 { .. } => Family::Ml1,
            Potential::PowerLaw { .. } => Family::PowerLaw,
            Potential::Ml2 { .. } => Family::Ml2,
            Potential::Morse { .. } => Family::Morse,
            Potential::Sw1 { .. } => Family::Sw1,
            Potential::Sw2 { .. } => Family::Sw2,
            Potential::Custom(_) => Family::Custom,
        }
    }

    /// `(V_i, dV_i/dx_i)` for one coordinate of a separable potential.
    fn term(&self, i: usize, x: f64) -> Result<(f64, f64)> {
        let singular = || PdmError::SingularPoint { coordinate: i };
        let out = match self {
            Potential::HarmonicReference { omega } => {
                let w2 = omega[i] * omega[i];
                (0.5 * w2 * x * x, w2 * x)
            }
            Potential::IsotonicReference { omega, kappa } => {
                if x == 0.0 {
                    return Err(singular());
                }
                let (w2, k) = (omega[i] * omega[i], kappa[i]);
                (0.5 * (w2 * x * x + k / (x * x)), w2 * x - k / (x * x * x))
            }
            Potential::Ml1 { lambda, sign, omega } => {
                let w2 = omega[i] * omega[i];
                let d = 1.0 + sign.value() * lambda * x * x;
                (0.5 * w2 * x * x / d, w2 * x / (d * d))
            }
            Potential::PowerLaw { alpha, upsilon, omega } => {
                let c = alpha * alpha * omega[i] * omega[i];
                let p = x.powf(2.0 * upsilon + 1.0);
                (0.5 * c * p * x, c * (upsilon + 1.0) * p)
            }
            Potential::Ml2 { lambda, sign, omega, eta } => {
                let c = omega[i] * omega[i] * eta[i] * eta[i];
                let k = sign.value() * lambda;
                let d = 1.0 + k * x * x;
                (0.5 * c / d, -c * k * x / (d * d))
            }
            Potential::Morse { zeta, omega } => {
                let w2 = omega[i] * omega[i];
                let e = (zeta[i] * x).exp();
                (0.5 * w2 * (e - 1.0) * (e - 1.0), w2 * zeta[i] * e * (e - 1.0))
            }
            Potential::Sw1 { lambda, sign, omega, kappa } => {
                if x == 0.0 {
                    return Err(singular());
                }
                let (w2, k) = (omega[i] * omega[i], kappa[i]);
                let d = 1.0 + sign.value() * lambda * x * x;
                (
                    0.5 * (w2 * x * x / d + k * d / (x * x)),
                    w2 * x / (d * d) - k / (x * x * x),
                )
            }
            Potential::Sw2 { beta, eta, omega, kappa } => {
                if x == 0.0 {
                    return Err(singular());
                }
                let (w2, k, b2) = (omega[i] * omega[i], kappa[i], beta * beta);
                let p = x.powf(2.0 * eta);
                (
                    0.5 * (b2 * w2 * p + k / (b2 * p)),
                    eta * (b2 * w2 * p - k / (b2 * p)) / x,
                )
            }
            Potential::Custom(CustomPotential::Separable(exprs)) => {
                let j = exprs[i].eval_jet(&[x], Some(0))?;
                (j.v, j.d1)
            }
            Potential::Custom(CustomPotential::Joint(_)) => unreachable!("joint potential is not separable"),
        };
        if !out.0.is_finite() || !out.1.is_finite() {
            return Err(PdmError::SingularCoefficient { coordinate: i, x });
        }
        Ok(out)
    }

    /// `V(x⃗)` and `∇V`.
    pub fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if let Potential::Custom(CustomPotential::Joint(e)) = self {
            return Ok(e.gradient(x)?);
        }
        let mut v = 0.0;
        let mut grad = Vec::with_capacity(x.len());
        for (i, &xi) in x.iter().enumerate() {
            let (vi, gi) = self.term(i, xi)?;
            v += vi;
            grad.push(gi);
        }
        Ok((v, grad))
    }
}

/// Time, positions and velocities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl State {
    pub fn new(t: f64, x: Vec<f64>, v: Vec<f64>) -> Self {
        State { t, x, v }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdmSystem {
    n: usize,
    kind: SystemKind,
    potential: Potential,
}

impl PdmSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn family(&self) -> Family {
        self.potential.family()
    }

    pub fn rest_mass(&self) -> f64 {
        REST_MASS
    }

    /// Per-coordinate profiles; `None` for type II.
    pub fn profiles(&self) -> Option<&[MassProfile]> {
        match &self.kind {
            SystemKind::TypeI(p) => Some(p),
            SystemKind::TypeII(_) => None,
        }
    }

    /// Assemble a type-I system directly from validated parts.
    pub fn type_i(profiles: Vec<MassProfile>, potential: Potential) -> Result<Self> {
        let n = profiles.len();
        let sys = PdmSystem {
            n,
            kind: SystemKind::TypeI(profiles),
            potential,
        };
        sys.check_shapes()?;
        Ok(sys)
    }

    /// Assemble a type-II system directly from validated parts.
    pub fn type_ii(n: usize, profile: CoupledProfile, potential: Potential) -> Result<Self> {
        let sys = PdmSystem {
            n,
            kind: SystemKind::TypeII(profile),
            potential,
        };
        sys.check_shapes()?;
        Ok(sys)
    }

    fn check_shapes(&self) -> Result<()> {
        if self.n == 0 {
            return Err(PdmError::invalid("n", "dimension must be at least 1"));
        }
        match &self.kind {
            SystemKind::TypeI(p) if p.len() != self.n => {
                return Err(PdmError::invalid("profiles", format!("expected {} profiles", self.n)))
            }
            SystemKind::TypeII(CoupledProfile::Lifted(_)) if self.n != 1 => {
                return Err(PdmError::invalid("coupled_mass", "a lifted profile needs n = 1"))
            }
            SystemKind::TypeII(CoupledProfile::Expr(e)) if e.variables().len() != self.n => {
                return Err(PdmError::invalid("coupled_mass", format!("expected variables x1..x{}", self.n)))
            }
            _ => {}
        }
        let len_ok = |v: &Vec<f64>| v.len() == self.n;
        let ok = match &self.potential {
            Potential::HarmonicReference { omega }
            | Potential::Ml1 { omega, .. }
            | Potential::PowerLaw { omega, .. } => len_ok(omega),
            Potential::IsotonicReference { omega, kappa }
            | Potential::Sw1 { omega, kappa, .. }
            | Potential::Sw2 { omega, kappa, .. } => len_ok(omega) && len_ok(kappa),
            Potential::Ml2 { omega, eta, .. } => len_ok(omega) && len_ok(eta),
            Potential::Morse { zeta, omega } => len_ok(omega) && len_ok(zeta),
            Potential::Custom(CustomPotential::Separable(e)) => e.len() == self.n,
            Potential::Custom(CustomPotential::Joint(e)) => e.variables().len() == self.n,
        };
        if !ok {
            return Err(PdmError::invalid("params", format!("per-coordinate lists must have length {}", self.n)));
        }
        Ok(())
    }

    /// Reject positions outside the profile domains.
    pub fn check_position(&self, x: &[f64]) -> Result<()> {
        match &self.kind {
            SystemKind::TypeI(profiles) => {
                for (i, (p, &xi)) in profiles.iter().zip(x).enumerate() {
                    p.eval(xi, i)?;
                }
            }
            SystemKind::TypeII(c) => {
                c.eval(x)?;
            }
        }
        Ok(())
    }

    pub fn kinetic_energy(&self, state: &State) -> Result<f64> {
        match &self.kind {
            SystemKind::TypeI(profiles) => {
                let mut t = 0.0;
                for (i, p) in profiles.iter().enumerate() {
                    let m = p.eval(state.x[i], i)?.m;
                    t += 0.5 * REST_MASS * m * state.v[i] * state.v[i];
                }
                Ok(t)
            }
            SystemKind::TypeII(c) => {
                let (m, _) = c.eval(&state.x)?;
                Ok(0.5 * REST_MASS * m * state.v.iter().map(|v| v * v).sum::<f64>())
            }
        }
    }

    pub fn potential_energy(&self, x: &[f64]) -> Result<f64> {
        self.check_position(x)?;
        Ok(REST_MASS * self.potential.value_and_gradient(x)?.0)
    }

    pub fn total_energy(&self, state: &State) -> Result<EnergyBreakdown> {
        let kinetic = self.kinetic_energy(state)?;
        let potential = self.potential_energy(&state.x)?;
        Ok(EnergyBreakdown {
            kinetic,
            potential,
            total: kinetic + potential,
        })
    }
}

/// Free-function forms of the energy methods.
pub fn kinetic_energy(system: &PdmSystem, state: &State) -> Result<f64> {
    system.kinetic_energy(state)
}

pub fn potential_energy(system: &PdmSystem, x: &[f64]) -> Result<f64> {
    system.potential_energy(x)
}

pub fn total_energy(system: &PdmSystem, state: &State) -> Result<EnergyBreakdown> {
    system.total_energy(state)
}

fn require<T: Clone>(v: &Option<T>, field: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| PdmError::MissingParameter(format!("params.{field}")))
}

fn require_list(v: &Option<Vec<f64>>, field: &str, n: usize, positive: bool) -> Result<Vec<f64>> {
    let list = require(v, field)?;
    if list.len() != n {
        return Err(PdmError::invalid(
            format!("params.{field}"),
            format!("expected {n} entries, got {}", list.len()),
        ));
    }
    for (i, &x) in list.iter().enumerate() {
        if !x.is_finite() || (positive && x <= 0.0) {
            let need = if positive { "positive and finite" } else { "finite" };
            return Err(PdmError::invalid(format!("params.{field}[{i}]"), format!("must be {need}, got {x}")));
        }
    }
    Ok(list)
}

fn require_positive(v: &Option<f64>, field: &str) -> Result<f64> {
    let x = require(v, field)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(PdmError::invalid(format!("params.{field}"), format!("must be positive, got {x}")));
    }
    Ok(x)
}

fn require_lambda(p: &ParameterSet) -> Result<(f64, Sign)> {
    let lambda = require(&p.lambda, "lambda")?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(PdmError::invalid(
            "params.lambda",
            format!("must be non-negative (the branch is carried by `sign`), got {lambda}"),
        ));
    }
    Ok((lambda, require(&p.sign, "sign")?))
}

fn variable_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn parse_joint(text: &str, n: usize, field: &str) -> Result<Expr> {
    let names = variable_names(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    parse_expression(text, &refs).map_err(|e| PdmError::invalid(field, e.to_string()))
}

fn infer_n(spec: &SystemSpec) -> Result<usize> {
    let p = &spec.params;
    let c = &spec.custom;
    let guess = spec
        .n
        .or_else(|| p.omega.as_ref().map(Vec::len))
        .or_else(|| c.mass.as_ref().map(Vec::len))
        .or_else(|| c.potential.as_ref().map(Vec::len));
    match guess {
        Some(0) => Err(PdmError::invalid("n", "dimension must be at least 1")),
        Some(n) => Ok(n),
        None if spec.family == Family::Custom => Err(PdmError::MissingParameter("n".into())),
        None => Err(PdmError::MissingParameter("params.omega".into())),
    }
}

/// Validate a [`SystemSpec`] into a [`PdmSystem`].
pub fn build_system(spec: &SystemSpec) -> Result<PdmSystem> {
    let n = infer_n(spec)?;
    let p = &spec.params;
    let omega = || require_list(&p.omega, "omega", n, true);

    let (potential, catalog_profile): (Potential, Option<MassProfile>) = match spec.family {
        Family::HarmonicReference => (Potential::HarmonicReference { omega: omega()? }, Some(MassProfile::Unit)),
        Family::IsotonicReference => (
            Potential::IsotonicReference {
                omega: omega()?,
                kappa: require_list(&p.kappa, "kappa", n, true)?,
            },
            Some(MassProfile::Unit),
        ),
        Family::Ml1 => {
            let (lambda, sign) = require_lambda(p)?;
            (
                Potential::Ml1 { lambda, sign, omega: omega()? },
                Some(MassProfile::MathewsLakshmanan { lambda, sign }),
            )
        }
        Family::PowerLaw => {
            let upsilon = require(&p.upsilon, "upsilon")?;
            if !upsilon.is_finite() || (upsilon + 1.0).abs() < 1e-12 {
                return Err(PdmError::invalid("params.upsilon", "must differ from -1 (the map collapses to a constant)"));
            }
            let alpha = require_positive(&p.alpha, "alpha")?;
            (
                Potential::PowerLaw { alpha, upsilon, omega: omega()? },
                Some(MassProfile::PowerLaw { alpha, upsilon }),
            )
        }
        Family::Ml2 => {
            let (lambda, sign) = require_lambda(p)?;
            let eta = require_list(&p.eta_const, "eta_const", n, false)?;
            (
                Potential::Ml2 { lambda, sign, omega: omega()?, eta },
                Some(MassProfile::MathewsLakshmanan { lambda, sign }),
            )
        }
        Family::Morse => {
            let zeta = require_list(&p.zeta, "zeta", n, true)?;
            // per-coordinate ζ_i: profiles differ per coordinate, handled below
            (Potential::Morse { zeta, omega: omega()? }, None)
        }
        Family::Sw1 => {
            let (lambda, sign) = require_lambda(p)?;
            (
                Potential::Sw1 {
                    lambda,
                    sign,
                    omega: omega()?,
                    kappa: require_list(&p.kappa, "kappa", n, true)?,
                },
                Some(MassProfile::MathewsLakshmanan { lambda, sign }),
            )
        }
        Family::Sw2 => {
            let eta = require(&p.eta_exp, "eta_exp")?;
            if !eta.is_finite() || (eta - 1.0).abs() < 1e-12 {
                return Err(PdmError::invalid("params.eta_exp", "must differ from 1 (constant-mass case)"));
            }
            let beta = require_positive(&p.beta, "beta")?;
            (
                Potential::Sw2 {
                    beta,
                    eta,
                    omega: omega()?,
                    kappa: require_list(&p.kappa, "kappa", n, true)?,
                },
                Some(MassProfile::IsotonicPowerLaw { beta, eta }),
            )
        }
        Family::Custom => {
            let c = &spec.custom;
            let pot = match (&c.potential, &c.joint_potential) {
                (Some(list), None) => {
                    if list.len() != n {
                        return Err(PdmError::invalid("custom.potential", format!("expected {n} expressions")));
                    }
                    let exprs = list
                        .iter()
                        .enumerate()
                        .map(|(i, s)| {
                            parse_expression(s, &["x"])
                                .map_err(|e| PdmError::invalid(format!("custom.potential[{i}]"), e.to_string()))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    CustomPotential::Separable(exprs)
                }
                (None, Some(s)) => CustomPotential::Joint(parse_joint(s, n, "custom.joint_potential")?),
                (Some(_), Some(_)) => {
                    return Err(PdmError::invalid("custom", "give either `potential` or `joint_potential`, not both"))
                }
                (None, None) => return Err(PdmError::MissingParameter("custom.potential".into())),
            };
            (Potential::Custom(pot), None)
        }
    };

    match spec.kind {
        KindTag::TypeI => {
            let profiles = if let Some(list) = &spec.custom.mass {
                if list.len() != n {
                    return Err(PdmError::invalid("custom.mass", format!("expected {n} expressions")));
                }
                let domain = spec.custom.mass_domain.map(|[lo, hi]| Interval { lo, hi });
                list.iter()
                    .enumerate()
                    .map(|(i, s)| {
                        CustomProfile::parse(s, domain)
                            .map(MassProfile::Custom)
                            .map_err(|e| PdmError::invalid(format!("custom.mass[{i}]"), e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?
            } else if let Potential::Morse { zeta, .. } = &potential {
                zeta.iter().map(|&z| MassProfile::Exponential { zeta: z }).collect()
            } else if let Some(profile) = catalog_profile {
                vec![profile; n]
            } else {
                return Err(PdmError::MissingParameter("custom.mass".into()));
            };
            PdmSystem::type_i(profiles, potential)
        }
        KindTag::TypeII => {
            let coupled = if let Some(s) = &spec.custom.coupled_mass {
                CoupledProfile::Expr(parse_joint(s, n, "custom.coupled_mass")?)
            } else if n == 1 {
                let profile = match (&potential, catalog_profile) {
                    (Potential::Morse { zeta, .. }, _) => MassProfile::Exponential { zeta: zeta[0] },
                    (_, Some(p)) => p,
                    _ => return Err(PdmError::MissingParameter("custom.coupled_mass".into())),
                };
                CoupledProfile::Lifted(profile)
            } else {
                return Err(PdmError::MissingParameter("custom.coupled_mass".into()));
            };
            PdmSystem::type_ii(n, coupled, potential)
        }
    }
}
