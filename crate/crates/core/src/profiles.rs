//! Mass profiles `m(x)` with analytic derivatives and validity domains.

use serde::{Deserialize, Serialize};

use crate::error::{PdmError, Result};
use crate::exprparse::{parse_expression, Expr, Jet};

/// Branch of the `1 ± λx²` deformation. `λ` itself is kept non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn symmetric(half_width: f64) -> Self {
        Interval {
            lo: -half_width,
            hi: half_width,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// `(m, m', m'')` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub m: f64,
    pub dm: f64,
    pub d2m: f64,
}

impl ProfileValue {
    /// `m'/(2m)`, the velocity-squared coefficient of the EL-I equation.
    pub fn half_log_slope(&self) -> f64 {
        self.dm / (2.0 * self.m)
    }

    pub fn as_jet(&self, dx: Jet) -> Jet {
        dx.chain(self.m, self.dm, self.d2m)
    }
}

/// A user-supplied profile: expression in `x` plus the interval on which
/// it is declared positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomProfile {
    pub expr: Expr,
    pub domain: Interval,
}

impl CustomProfile {
    pub fn parse(text: &str, domain: Option<Interval>) -> Result<Self> {
        Ok(CustomProfile {
            expr: parse_expression(text, &["x"])?,
            domain: domain.unwrap_or(Interval::REAL_LINE),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MassProfile {
    /// `m ≡ 1`, the constant-mass reference case.
    Unit,
    /// `m = 1/(1 ± λx²)`.
    MathewsLakshmanan { lambda: f64, sign: Sign },
    /// `m = α² x^{2υ}` on `x > 0`.
    PowerLaw { alpha: f64, upsilon: f64 },
    /// `m = exp(2ζx)`.
    Exponential { zeta: f64 },
    /// `m = β² x^{2(η-1)}` on `x > 0`.
    IsotonicPowerLaw { beta: f64, eta: f64 },
    Custom(CustomProfile),
}

impl MassProfile {
    /// Maximal open interval on which `m > 0`.
    pub fn domain(&self) -> Interval {
        match self {
            MassProfile::Unit | MassProfile::Exponential { .. } => Interval::REAL_LINE,
            MassProfile::MathewsLakshmanan { lambda, sign } => match sign {
                Sign::Minus if *lambda > 0.0 => Interval::symmetric(1.0 / lambda.sqrt()),
                _ => Interval::REAL_LINE,
            },
            MassProfile::PowerLaw { .. } | MassProfile::IsotonicPowerLaw { .. } => Interval::POSITIVE,
            MassProfile::Custom(c) => c.domain,
        }
    }

    /// Formula evaluation with no domain check.
    pub fn eval_unchecked(&self, x: f64) -> Result<ProfileValue> {
        let pv = match self {
            MassProfile::Unit => ProfileValue { m: 1.0, dm: 0.0, d2m: 0.0 },
            MassProfile::MathewsLakshmanan { lambda, sign } => {
                let k = sign.value() * lambda;
                let d = 1.0 + k * x * x;
                let m = 1.0 / d;
                // m' = -2kx m², m'' = (6k²x² - 2k) m³
                ProfileValue {
                    m,
                    dm: -2.0 * k * x * m * m,
                    d2m: (6.0 * k * k * x * x - 2.0 * k) * m * m * m,
                }
            }
            MassProfile::PowerLaw { alpha, upsilon } => power_profile(*alpha, 2.0 * upsilon, x),
            MassProfile::IsotonicPowerLaw { beta, eta } => power_profile(*beta, 2.0 * (eta - 1.0), x),
            MassProfile::Exponential { zeta } => {
                let m = (2.0 * zeta * x).exp();
                ProfileValue {
                    m,
                    dm: 2.0 * zeta * m,
                    d2m: 4.0 * zeta * zeta * m,
                }
            }
            MassProfile::Custom(c) => {
                let j = c.expr.eval_jet(&[x], Some(0))?;
                ProfileValue { m: j.v, dm: j.d1, d2m: j.d2 }
            }
        };
        Ok(pv)
    }

    /// `(m, m', m'')` at `x`, or `DomainViolation` outside the domain.
    pub fn eval(&self, x: f64, coordinate: usize) -> Result<ProfileValue> {
        if !self.domain().contains(x) {
            return Err(PdmError::DomainViolation { coordinate, x });
        }
        let pv = self.eval_unchecked(x)?;
        if !(pv.m > 0.0) || !pv.m.is_finite() {
            return Err(PdmError::DomainViolation { coordinate, x });
        }
        Ok(pv)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MassProfile::Unit => "unit",
            MassProfile::MathewsLakshmanan { .. } => "mathews-lakshmanan",
            MassProfile::PowerLaw { .. } => "power-law",
            MassProfile::Exponential { .. } => "exponential",
            MassProfile::IsotonicPowerLaw { .. } => "isotonic-power-law",
            MassProfile::Custom(_) => "custom",
        }
    }
}

/// `c² x^p` and derivatives, for `x > 0` (any real `p`).
fn power_profile(c: f64, p: f64, x: f64) -> ProfileValue {
    let m = c * c * x.powf(p);
    ProfileValue {
        m,
        dm: p * m / x,
        d2m: p * (p - 1.0) * m / (x * x),
    }
}

/// Free-function form of [`MassProfile::eval`].
pub fn profile_eval(profile: &MassProfile, x: f64) -> Result<ProfileValue> {
    profile.eval(x, 0)
}

/// Free-function form of [`MassProfile::domain`].
pub fn profile_domain(profile: &MassProfile) -> Interval {
    profile.domain()
}
