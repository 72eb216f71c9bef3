//! Equations of motion written out by hand, one per family.

#![allow(dead_code)]

use pdm_core::system::{Family, ParameterSet};

#[derive(Debug, Clone, Copy)]
pub enum Oracle {
    Harmonic { w: f64 },
    Isotonic { w: f64, kappa: f64 },
    Ml1 { k: f64, w: f64 },
    PowerLaw { u: f64, w: f64 },
    Ml2 { k: f64, w: f64, eta: f64 },
    Morse { z: f64, w: f64 },
    Sw1 { k: f64, w: f64, kappa: f64 },
    Sw2 { b: f64, e: f64, w: f64, kappa: f64 },
}

impl Oracle {
    pub fn from_params(family: Family, p: &ParameterSet, i: usize) -> Oracle {
        let at = |v: &Option<Vec<f64>>| v.as_ref().map(|v| v[i]).unwrap_or(f64::NAN);
        let w = at(&p.omega);
        let k = p.sign.map(|s| s.value()).unwrap_or(1.0) * p.lambda.unwrap_or(0.0);
        match family {
            Family::HarmonicReference => Oracle::Harmonic { w },
            Family::IsotonicReference => Oracle::Isotonic { w, kappa: at(&p.kappa) },
            Family::Ml1 => Oracle::Ml1 { k, w },
            Family::PowerLaw => Oracle::PowerLaw { u: p.upsilon.unwrap(), w },
            Family::Ml2 => Oracle::Ml2 { k, w, eta: at(&p.eta_const) },
            Family::Morse => Oracle::Morse { z: at(&p.zeta), w },
            Family::Sw1 => Oracle::Sw1 { k, w, kappa: at(&p.kappa) },
            Family::Sw2 => Oracle::Sw2 {
                b: p.beta.unwrap(),
                e: p.eta_exp.unwrap(),
                w,
                kappa: at(&p.kappa),
            },
            Family::Custom => panic!("no printed oracle for custom systems"),
        }
    }

    /// `ẍ` from the family's own equation of motion.
    pub fn acceleration(&self, x: f64, v: f64) -> f64 {
        match *self {
            Oracle::Harmonic { w } => -w * w * x,
            Oracle::Isotonic { w, kappa } => -w * w * x + kappa / x.powi(3),
            // (1 + kx²)ẍ − kxẋ² + ω²x = 0
            Oracle::Ml1 { k, w } => (k * x * v * v - w * w * x) / (1.0 + k * x * x),
            // ẍ = −υẋ²/x − (1+υ)ω²x
            Oracle::PowerLaw { u, w } => -u * v * v / x - (1.0 + u) * w * w * x,
            // ẍ = kx(ẋ² + ω²η²)/(1 + kx²)
            Oracle::Ml2 { k, w, eta } => k * x * (v * v + w * w * eta * eta) / (1.0 + k * x * x),
            // ẍ = −ζẋ² − ω²ζ(1 − e^{−ζx})
            Oracle::Morse { z, w } => -z * v * v - w * w * z * (1.0 - (-z * x).exp()),
            Oracle::Sw1 { k, w, kappa } => {
                let d = 1.0 + k * x * x;
                k * x * v * v / d - w * w * x / d + kappa * d / x.powi(3)
            }
            // ẍ = −(η−1)ẋ²/x − η(ω²x − κ/(β⁴x^{4η−1}))
            Oracle::Sw2 { b, e, w, kappa } => {
                -(e - 1.0) * v * v / x - e * (w * w * x - kappa / (b.powi(4) * x.powf(4.0 * e - 1.0)))
            }
        }
    }
}
