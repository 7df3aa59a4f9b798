//! Cross-layer check suite: every representation of the walk is compared
//! against another one that was computed independently.

use serde::Serialize;

use crate::asymptotics::{k_delta_from, K_DELTA_TOL};
use crate::error::Result;
use crate::genfun::{dp_partial_sums, ode_residual_with, GenFun};
use crate::measure::{build_measure, dette_checks};
use crate::polys::identity_residuals;
use crate::walk::{evolve, mean_trajectory, stationary, step_probs, Evolver, WalkParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub delta: f64,
    /// Continuous nodes per half for the spectral measure.
    pub nodes: usize,
    /// Negates B_t(u) in the closed form for Ψ'. A correct suite must fail.
    #[doc(hidden)]
    pub mutate_b_sign: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            delta: 1.5,
            nodes: 512,
            mutate_b_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub delta: f64,
    pub nodes: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, value: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            name,
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Runs every check for δ ∈ (1, 2). Errors only on invalid options or a
/// numerical failure that prevents a check from producing a number.
pub fn verify_all(opts: &VerifyOptions) -> Result<VerifyReport> {
    let delta = opts.delta;
    let params = WalkParams::subcritical(delta)?;
    let mut report = VerifyReport {
        delta,
        nodes: opts.nodes,
        checks: Vec::new(),
    };

    // walk
    let pi = stationary(&params, 1001);
    let balance = (0..1000)
        .map(|y| {
            let lhs = pi.values[y] * step_probs(&params, y as u64).0;
            let rhs = pi.values[y + 1] * step_probs(&params, y as u64 + 1).1;
            (lhs - rhs).abs() / lhs.max(rhs)
        })
        .fold(0.0, f64::max);
    report.push("detailed_balance", balance, 1e-12);

    let mut ev = Evolver::new(&params, 0, 2000);
    for _ in 0..2000 {
        ev.step()?;
    }
    report.push(
        "probability_conservation",
        (ev.distribution().total_mass() - 1.0).abs(),
        1e-12,
    );

    let m = mean_trajectory(&params, 0, 1001)?;
    let mut violations = 0usize;
    for n in 1..=500 {
        if m[2 * n] <= m[2 * n - 2] {
            violations += 1;
        }
        if m[2 * n] >= m[2 * n - 1] || m[2 * n + 1] <= m[2 * n] {
            violations += 1;
        }
    }
    report.push("monotonicity_violations", violations as f64, 0.0);

    // measure
    let mu = build_measure(delta, opts.nodes)?;
    report.push("total_mass", (mu.total_mass() - 1.0).abs(), 1e-10);
    report.push(
        "continuous_mass",
        (mu.continuous_mass() - 1.0 / delta).abs(),
        1e-10,
    );
    let gram = mu.gram(30)?;
    let mut ortho: f64 = 0.0;
    for (x, row) in gram.iter().enumerate() {
        for (y, &g) in row.iter().enumerate() {
            let target = if x == y { pi.pi0 / pi.values[y] } else { 0.0 };
            ortho = ortho.max((g - target).abs());
        }
    }
    report.push("orthogonality", ortho, 1e-8);

    let fine = build_measure(delta, 2 * opts.nodes)?.gram(30)?;
    let doubling = gram
        .iter()
        .flatten()
        .zip(fine.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    report.push("node_doubling", doubling, 1e-9);

    let mut km: f64 = 0.0;
    for x in [0, 1, 3] {
        for n in 0..=100 {
            let dp = evolve(&params, x, n)?;
            let row = mu.transition_row(x, n)?;
            for y in dp.reachable() {
                km = km.max((row[y] - dp.prob(y)).abs());
            }
        }
    }
    report.push("karlin_mcgregor_vs_dp", km, 1e-8);

    let k = k_delta_from(&mu)?;
    let k2 = k_delta_from(&build_measure(delta, 2 * opts.nodes)?)?;
    report.push("k_delta_doubling", (k - k2).abs() / k, K_DELTA_TOL);

    // polys and the dual / associated measures
    let ids = identity_residuals(delta, 30, &grid(-1.0, 1.0, 101))?;
    report.push("gegenbauer_identities", ids.max(), 1e-10);
    let dette = dette_checks(delta, 20, 256)?;
    report.push("dette_orthogonality", dette.worst(), 1e-8);

    // generating functions
    let mut gf = GenFun::new(delta)?;
    if opts.mutate_b_sign {
        gf = gf.with_flipped_b();
    }
    let mut series_gap: f64 = 0.0;
    let mut psi_prime_gap: f64 = 0.0;
    for t in [-0.9, 0.0, 0.5, 0.99] {
        for u in [0.06, 0.1, 0.2, 0.3] {
            let (phi, _, dpsi) = gf.series(t, u);
            let v = gf.eval(t, u)?;
            series_gap = series_gap.max((v.phi - phi).abs());
            psi_prime_gap = psi_prime_gap.max((v.psi_prime - dpsi).abs());
        }
    }
    report.push("phi_series_vs_closed", series_gap, 1e-10);
    report.push("psi_prime_series_vs_closed", psi_prime_gap, 1e-9);

    let u_grid = grid(0.1, 0.9, 9);
    let ode = ode_residual_with(&gf, 0.5, &u_grid)?.max(ode_residual_with(&gf, 1.0, &[0.5])?);
    report.push("ode_residual", ode, 1e-6);

    let z = 0.3;
    let spectral = gf.generating_functions(&mu, z)?;
    let dp = dp_partial_sums(delta, z, 400)?;
    report.push(
        "genfun_vs_dp",
        (spectral.g_e - dp.g_e)
            .abs()
            .max((spectral.g_o - dp.g_o).abs())
            + dp.tail_bound,
        1e-8,
    );

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passes_and_catches_mutation() {
        let opts = VerifyOptions {
            nodes: 256,
            ..VerifyOptions::default()
        };
        let good = verify_all(&opts).unwrap();
        assert!(good.all_passed(), "{:#?}", good.checks);
        let bad = verify_all(&VerifyOptions {
            mutate_b_sign: true,
            ..opts
        })
        .unwrap();
        assert!(!bad.all_passed());
        let failed: Vec<_> = bad
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert!(failed.contains(&"genfun_vs_dp"), "{failed:?}");
    }

    #[test]
    fn rejects_supercritical() {
        let opts = VerifyOptions {
            delta: 2.5,
            ..VerifyOptions::default()
        };
        assert!(verify_all(&opts).is_err());
    }
}
