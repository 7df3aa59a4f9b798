//! The walk itself: transition kernel, stationary measure, drift, exact
//! evolution of the law of X_n and a seeded Monte Carlo simulator.

mod dp;
mod mc;

pub use dp::{
    evolve, evolve_with_cap, expected_position, mean_trajectory, Distribution, Evolver, Parity,
    DEFAULT_DP_CAP,
};
pub use mc::{simulate, simulate_with_threads, SimulationResult};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::specfun::{log_gamma_ratio, log_gamma_unchecked};

/// Which side of the critical values δ = 1, 2 the parameter sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// 1 < δ < 2: E₀Xₙ grows like n^{1-δ/2}.
    Subcritical,
    /// δ > 2: X_n converges in law with a finite mean.
    Supercritical,
    /// δ = 2 exactly.
    Critical,
}

/// Model parameter δ. Construction enforces δ > 1 so that the stationary
/// measure is normalisable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkParams {
    delta: f64,
    regime: Regime,
}

impl WalkParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 1.0 {
            return domain(format!(
                "δ must exceed 1 for a normalisable stationary measure, got {delta}"
            ));
        }
        let regime = if delta < 2.0 {
            Regime::Subcritical
        } else if delta > 2.0 {
            Regime::Supercritical
        } else {
            Regime::Critical
        };
        Ok(Self { delta, regime })
    }

    /// Like [`WalkParams::new`] but additionally demands δ ∈ (1, 2).
    pub fn subcritical(delta: f64) -> Result<Self> {
        let p = Self::new(delta)?;
        if p.regime != Regime::Subcritical {
            return domain(format!("this operation needs δ in (1, 2), got {delta}"));
        }
        Ok(p)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// π₀ = (δ-1)/(2δ).
    pub fn pi0(&self) -> f64 {
        (self.delta - 1.0) / (2.0 * self.delta)
    }

    /// Mean of the stationary law, δ/(2(δ-2)), which only exists for δ > 2.
    pub fn stationary_mean(&self) -> Option<f64> {
        (self.delta > 2.0).then(|| self.delta / (2.0 * (self.delta - 2.0)))
    }
}

/// One-step probabilities `(p_up, p_down)` from site `y`.
pub fn step_probs(params: &WalkParams, y: u64) -> (f64, f64) {
    if y == 0 {
        return (1.0, 0.0);
    }
    let y = y as f64;
    let denom = 2.0 * y + params.delta;
    (y / denom, (y + params.delta) / denom)
}

/// Mean displacement E(X_{n+1} - X_n | X_n = y) = -δ/(2y+δ) for y ≥ 1.
pub fn drift(params: &WalkParams, y: u64) -> Result<f64> {
    if y == 0 {
        return domain("drift is defined for y ≥ 1; the wall forces 0 → 1");
    }
    Ok(-params.delta / (2.0 * y as f64 + params.delta))
}

/// Stationary (reversible) measure π on sites 0..=N, normalised to a
/// probability measure on the whole half-line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryMeasure {
    pub pi0: f64,
    pub values: Vec<f64>,
}

impl StationaryMeasure {
    /// Σ_{y ≤ N} y π_y, a lower bound for the stationary mean.
    pub fn partial_mean(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(y, p)| y as f64 * p)
            .sum()
    }

    /// π_y / π₀, the weight appearing in the spectral formulas.
    pub fn ratio(&self, y: usize) -> f64 {
        self.values[y] / self.pi0
    }
}

/// π_y / π₀ = (2y+δ) Γ(δ+1) Γ(y) / Γ(y+δ+1) for y ≥ 1 and 1 at y = 0.
pub(crate) fn pi_ratio(delta: f64, y: usize) -> f64 {
    if y == 0 {
        return 1.0;
    }
    let yf = y as f64;
    let lg = log_gamma_unchecked(delta + 1.0) - log_gamma_ratio(yf, delta + 1.0);
    (2.0 * yf + delta) * lg.exp()
}

/// Stationary measure evaluated on sites 0..=`max_site` through
/// log-gamma differences.
pub fn stationary(params: &WalkParams, max_site: usize) -> StationaryMeasure {
    let pi0 = params.pi0();
    let values = (0..=max_site)
        .map(|y| pi0 * pi_ratio(params.delta, y))
        .collect();
    StationaryMeasure { pi0, values }
}
