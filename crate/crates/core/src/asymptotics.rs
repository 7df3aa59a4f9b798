//! The amplitude K_δ of E₀X_n ~ K_δ n^{1-δ/2} and measured checks of the
//! power laws on both the n side and the z side.
//!
//! ```text
//! K_δ = 2^{(δ-5)/2} √(π/2) Γ((δ-1)/2) / (1 - δ/2) / ∫_{-1}^{1} (1-t²)^{(δ-3)/2} / |F(t)|² dt
//! ```

use serde::Serialize;

use crate::error::{domain, Result};
use crate::fit::{ols, power_correction};
use crate::genfun::GenFun;
use crate::measure::{build_measure, SpectralMeasure};
use crate::specfun::gamma;
use crate::walk::{Evolver, WalkParams, DEFAULT_DP_CAP};

/// Relative change under node doubling below which K_δ counts as converged.
pub const K_DELTA_TOL: f64 = 1e-8;

/// K_δ from an already built measure.
pub fn k_delta_from(mu: &SpectralMeasure) -> Result<f64> {
    let d = mu.delta();
    let num =
        2f64.powf(0.5 * (d - 5.0)) * (0.5 * std::f64::consts::PI).sqrt() * gamma(0.5 * (d - 1.0))?
            / (1.0 - 0.5 * d);
    Ok(num / mu.normalization())
}

pub fn k_delta(delta: f64, nodes: usize) -> Result<f64> {
    k_delta_from(&build_measure(delta, nodes)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KDelta {
    pub delta: f64,
    pub k_delta: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// K_δ at `nodes`, flagged converged when the value at 2·nodes agrees to
/// [`K_DELTA_TOL`] relative.
pub fn k_delta_checked(delta: f64, nodes: usize) -> Result<KDelta> {
    let k = k_delta(delta, nodes)?;
    let k2 = k_delta(delta, 2 * nodes)?;
    Ok(KDelta {
        delta,
        k_delta: k,
        nodes,
        converged: (k - k2).abs() <= K_DELTA_TOL * k.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSample {
    pub n: usize,
    pub mean: f64,
    /// E₀X_n / (K_δ n^{1-δ/2})
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub delta: f64,
    pub k_delta: f64,
    /// Slope of log E₀X_n against log n over the top half of the samples.
    pub fitted_exponent: Option<f64>,
    /// κ in |ratio - 1| ≈ C n^{-κ}, fitted over all samples.
    pub correction_exponent: Option<f64>,
    /// C in the same fit.
    pub envelope_constant: Option<f64>,
    pub samples: Vec<MomentSample>,
}

impl AsymptoticReport {
    /// Whether |ratio - 1| shrinks monotonically over the last `k` samples.
    pub fn drifts_toward_one(&self, k: usize) -> bool {
        let tail = &self.samples[self.samples.len().saturating_sub(k)..];
        tail.windows(2)
            .all(|w| (w[1].ratio - 1.0).abs() < (w[0].ratio - 1.0).abs())
    }
}

/// 2^6, 2^7, …, 2^14.
pub fn default_n_list() -> Vec<usize> {
    (6..=14).map(|k| 1usize << k).collect()
}

fn log_log_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    ols(&lx, &ly)
}

pub fn check_moment_asymptotics(
    delta: f64,
    n_list: &[usize],
    nodes: usize,
) -> Result<AsymptoticReport> {
    let params = WalkParams::subcritical(delta)?;
    if n_list.is_empty() {
        return domain("n_list is empty");
    }
    if n_list.iter().any(|n| n % 2 == 1 || *n == 0) {
        return domain("n_list must contain positive even step counts");
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return domain("n_list must be strictly increasing");
    }
    let k = k_delta(delta, nodes)?;
    let top = *n_list.last().unwrap_or(&0);
    if top > DEFAULT_DP_CAP {
        return domain(format!("n_list exceeds the DP cap {DEFAULT_DP_CAP}"));
    }
    let mut ev = Evolver::new(&params, 0, top);
    let expo = 1.0 - 0.5 * delta;
    let mut samples = Vec::with_capacity(n_list.len());
    for &n in n_list {
        while ev.steps() < n {
            ev.step()?;
        }
        let mean = ev.mean();
        samples.push(MomentSample {
            n,
            mean,
            ratio: mean / (k * (n as f64).powf(expo)),
        });
    }

    let half = &samples[samples.len() / 2..];
    let ns: Vec<f64> = half.iter().map(|s| s.n as f64).collect();
    let ms: Vec<f64> = half.iter().map(|s| s.mean).collect();
    let fitted_exponent = log_log_fit(&ns, &ms).map(|(b, _)| b);

    let ns: Vec<f64> = samples.iter().map(|s| s.n as f64).collect();
    let dev: Vec<f64> = samples.iter().map(|s| (s.ratio - 1.0).abs()).collect();
    let env = log_log_fit(&ns, &dev);

    Ok(AsymptoticReport {
        delta,
        k_delta: k,
        fitted_exponent,
        correction_exponent: env.map(|(b, _)| -b),
        envelope_constant: env.map(|(_, a)| a.exp()),
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenSample {
    pub z: f64,
    pub g_e: f64,
    pub g_o: f64,
    /// g_e(z) / (Γ(2-δ/2) K_δ (1-z)^{δ/2-2})
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenAsymptoticReport {
    pub delta: f64,
    pub k_delta: f64,
    /// Γ(2-δ/2) K_δ
    pub amplitude: f64,
    pub nodes: usize,
    pub samples: Vec<GenSample>,
    /// max |r(z) - 1| over the grid.
    pub max_deviation: f64,
    /// Slope of log|r - 1| against log(1-z); None for fewer than 2 points.
    pub correction_exponent: Option<f64>,
    pub envelope_constant: Option<f64>,
    /// c in g_e(z)(1-z)^{2-δ/2} ≈ c + d (1-z)^κ; None for fewer than 3 points.
    pub extrapolated_amplitude: Option<f64>,
}

/// 13 points with 1-z spaced geometrically from 0.1 down to 0.001.
pub fn default_z_grid() -> Vec<f64> {
    (0..13)
        .map(|k| (1.0 - 0.1 * 10f64.powf(-2.0 * k as f64 / 12.0)).min(0.999))
        .collect()
}

pub fn check_gen_asymptotics(
    delta: f64,
    z_grid: &[f64],
    nodes: usize,
) -> Result<GenAsymptoticReport> {
    WalkParams::subcritical(delta)?;
    if z_grid.is_empty() {
        return domain("z grid is empty");
    }
    if z_grid.iter().any(|z| !(0.0..=0.999).contains(z)) {
        return domain("z grid must lie in [0, 0.999]");
    }
    let mu = build_measure(delta, nodes)?;
    let gf = GenFun::new(delta)?;
    let k = k_delta_from(&mu)?;
    let amplitude = gamma(2.0 - 0.5 * delta)? * k;
    let expo = 0.5 * delta - 2.0;
    let mut samples = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let p = gf.generating_functions(&mu, z)?;
        samples.push(GenSample {
            z,
            g_e: p.g_e,
            g_o: p.g_o,
            ratio: p.g_e / (amplitude * (1.0 - z).powf(expo)),
        });
    }
    let max_deviation = samples
        .iter()
        .map(|s| (s.ratio - 1.0).abs())
        .fold(0.0, f64::max);
    let eps: Vec<f64> = samples.iter().map(|s| 1.0 - s.z).collect();
    let dev: Vec<f64> = samples.iter().map(|s| (s.ratio - 1.0).abs()).collect();
    let env = log_log_fit(&eps, &dev);
    let scaled: Vec<f64> = samples.iter().map(|s| s.ratio * amplitude).collect();
    let extrapolated_amplitude = power_correction(&eps, &scaled).map(|p| p.c);

    Ok(GenAsymptoticReport {
        delta,
        k_delta: k,
        amplitude,
        nodes,
        samples,
        max_deviation,
        correction_exponent: env.map(|(b, _)| b),
        envelope_constant: env.map(|(_, a)| a.exp()),
        extrapolated_amplitude,
    })
}
