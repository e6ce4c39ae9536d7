//! The four simulated data-generating processes of the size/power study:
//! MA(1), AR(1), a nonlinear AR(1) and ARCH(1), all driven by i.i.d.
//! standard normal innovations from the counter-based generator.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SciError};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DgpModel {
    /// `X_t = theta eps_{t-1} + eps_t`
    Ma1,
    /// `X_t = theta X_{t-1} + 0.8 eps_t` (fixed innovation scale 0.8)
    Ar1,
    /// `X_t = theta |X_{t-1}|^0.8 + eps_t`
    Nlar,
    /// `X_t = sqrt(1 + theta X_{t-1}^2) eps_t`
    Arch1,
}

impl DgpModel {
    pub fn name(&self) -> &'static str {
        match self {
            DgpModel::Ma1 => "ma1",
            DgpModel::Ar1 => "ar1",
            DgpModel::Nlar => "nlar",
            DgpModel::Arch1 => "arch1",
        }
    }

    /// Model of "DGP i" in the study, `i` in 1..=4.
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(DgpModel::Ma1),
            2 => Ok(DgpModel::Ar1),
            3 => Ok(DgpModel::Nlar),
            4 => Ok(DgpModel::Arch1),
            _ => Err(SciError::InvalidInput(format!("no DGP {i}; use 1..=4"))),
        }
    }
}

impl std::str::FromStr for DgpModel {
    type Err = SciError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ma1" | "1" => Ok(DgpModel::Ma1),
            "ar1" | "2" => Ok(DgpModel::Ar1),
            "nlar" | "3" => Ok(DgpModel::Nlar),
            "arch1" | "4" => Ok(DgpModel::Arch1),
            other => Err(SciError::InvalidInput(format!(
                "unknown DGP '{other}' (expected ma1|ar1|nlar|arch1 or 1..4)"
            ))),
        }
    }
}

/// Innovation scale of the AR(1) model, printed as 0.8 in its definition.
pub const AR1_INNOVATION_SCALE: f64 = 0.8;
/// Exponent of the nonlinear AR(1) model.
pub const NLAR_EXPONENT: f64 = 0.8;

pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_BURN_IN: usize = 1000;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DgpSpec {
    pub model: DgpModel,
    /// Leading coefficient (0.5 in the size study, 0.8 in the power study).
    pub theta: f64,
    /// Output length after burn-in.
    pub n: usize,
    pub seed: u64,
    pub burn_in: usize,
}

impl DgpSpec {
    pub fn new(model: DgpModel, theta: f64, n: usize, seed: u64) -> Self {
        Self {
            model,
            theta,
            n,
            seed,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(SciError::InvalidInput("theta must be finite".into()));
        }
        match self.model {
            DgpModel::Ar1 if self.theta.abs() >= 1.0 => Err(SciError::InvalidInput(format!(
                "ar1 requires |theta| < 1, got {}",
                self.theta
            ))),
            DgpModel::Arch1 if !(0.0..1.0).contains(&self.theta) => {
                Err(SciError::InvalidInput(format!(
                    "arch1 requires theta in [0, 1), got {}",
                    self.theta
                )))
            }
            DgpModel::Nlar if self.theta < 0.0 => Err(SciError::InvalidInput(format!(
                "nlar requires theta >= 0, got {}",
                self.theta
            ))),
            _ if self.n == 0 => Err(SciError::InvalidInput("n must be positive".into())),
            _ => Ok(()),
        }
    }
}

/// i.i.d. standard normal innovation stream for a given seed.
pub fn normal_innovations(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = CounterRng::derive(seed, 0);
    (0..count).map(|_| rng.next_normal()).collect()
}

/// Simulate a series of length `spec.n`, discarding `spec.burn_in` initial
/// values. Deterministic for a fixed spec.
pub fn simulate(spec: &DgpSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    // one extra innovation so the MA(1) recursion has eps_{t-1} at t = 0
    let innovations = normal_innovations(spec.seed, spec.burn_in + spec.n + 1);
    Ok(simulate_with_innovations(spec, &innovations))
}

// Recursion shared by `simulate` and tests that force the innovations.
pub(crate) fn simulate_with_innovations(spec: &DgpSpec, innovations: &[f64]) -> Vec<f64> {
    let total = spec.burn_in + spec.n;
    assert!(innovations.len() >= total + 1);
    let theta = spec.theta;
    let mut out = Vec::with_capacity(total);
    match spec.model {
        DgpModel::Ma1 => {
            for t in 0..total {
                out.push(theta * innovations[t] + innovations[t + 1]);
            }
        }
        DgpModel::Ar1 => {
            let mut x = 0.0;
            for t in 0..total {
                x = theta * x + AR1_INNOVATION_SCALE * innovations[t + 1];
                out.push(x);
            }
        }
        DgpModel::Nlar => {
            let mut x = 0.0f64;
            for t in 0..total {
                x = theta * x.abs().powf(NLAR_EXPONENT) + innovations[t + 1];
                out.push(x);
            }
        }
        DgpModel::Arch1 => {
            let mut x = 0.0f64; // h_1 = 1 + theta * 0 = 1
            for t in 0..total {
                let h = 1.0 + theta * x * x;
                x = h.sqrt() * innovations[t + 1];
                out.push(x);
            }
        }
    }
    out.split_off(spec.burn_in)
}
