//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p wallwalk-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use wallwalk_core::asymptotics::{
    check_gen_asymptotics, check_moment_asymptotics, default_n_list, default_z_grid,
};
use wallwalk_core::genfun::{dp_partial_sums, ode_residual, GenFun};
use wallwalk_core::measure::build_measure;
use wallwalk_core::walk::{
    evolve, mean_trajectory, simulate_with_threads, stationary, Evolver, WalkParams,
};
use wallwalk_core::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn orthogonality() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for delta in [1.25, 1.5, 1.75] {
        let params = WalkParams::subcritical(delta)?;
        let pi = stationary(&params, 31);
        let gram = build_measure(delta, 512)?.gram(30)?;
        for (x, row) in gram.iter().enumerate() {
            for (y, &g) in row.iter().enumerate() {
                let target = if x == y { pi.pi0 / pi.values[y] } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
    }
    Ok(Outcome::new(
        worst <= 1e-8,
        format!("max |Gram - π₀/π_y δ_xy| = {worst:.3e} (tol 1e-8)"),
    ))
}

fn spectral_vs_dp() -> Result<Outcome> {
    let delta = 1.5;
    let params = WalkParams::subcritical(delta)?;
    let mu = build_measure(delta, 512)?;
    let mut worst: f64 = 0.0;
    for x in [0, 1, 3] {
        for n in 0..=100 {
            let dp = evolve(&params, x, n)?;
            let row = mu.transition_row(x, n)?;
            for y in dp.reachable() {
                worst = worst.max((row[y] - dp.prob(y)).abs());
            }
        }
    }
    Ok(Outcome::new(
        worst <= 1e-8,
        format!("max |P_spectral - P_dp| = {worst:.3e} (tol 1e-8)"),
    ))
}

fn atom_limit() -> Result<Outcome> {
    let params = WalkParams::subcritical(1.5)?;
    let p0 = evolve(&params, 0, 2000)?.prob(0);
    let target = 2.0 * params.pi0();
    let gap = (p0 - target).abs();
    Ok(Outcome::new(
        gap <= 0.01,
        format!("P₀(X_2000 = 0) = {p0:.6}, 2π₀ = {target:.6}, gap {gap:.4} (tol 0.01)"),
    ))
}

fn closed_forms() -> Result<Outcome> {
    let delta = 1.5;
    let gf = GenFun::new(delta)?;
    let mut series_gap: f64 = 0.0;
    for t in linspace(-1.0, 1.0, 21) {
        for u in linspace(-0.3, 0.3, 25) {
            let (phi, _, _) = gf.series(t, u);
            series_gap = series_gap.max((gf.eval(t, u)?.phi - phi).abs());
        }
    }
    let ode = ode_residual(delta, 0.5, &linspace(0.1, 0.9, 9))?;
    Ok(Outcome::new(
        series_gap <= 1e-10 && ode <= 1e-6,
        format!(
            "series vs closed Φ {series_gap:.3e} (tol 1e-10), ODE residual {ode:.3e} (tol 1e-6)"
        ),
    ))
}

fn genfun_oracle() -> Result<Outcome> {
    let delta = 1.5;
    let z = 0.3;
    let mu = build_measure(delta, 512)?;
    let spectral = GenFun::new(delta)?.generating_functions(&mu, z)?;
    let dp = dp_partial_sums(delta, z, 400)?;
    let ge = (spectral.g_e - dp.g_e).abs() + dp.tail_bound;
    let go = (spectral.g_o - dp.g_o).abs() + dp.tail_bound;
    Ok(Outcome::new(
        ge <= 1e-8 && go <= 1e-8,
        format!(
            "g_e {:.12} vs {:.12}, g_o {:.12} vs {:.12}, gap+tail {:.3e}/{:.3e} (tol 1e-8)",
            spectral.g_e, dp.g_e, spectral.g_o, dp.g_o, ge, go
        ),
    ))
}

fn moment_asymptotics() -> Result<Outcome> {
    let report = check_moment_asymptotics(1.5, &default_n_list(), 512)?;
    let slope = report.fitted_exponent.unwrap_or(f64::NAN);
    let last = report.samples.last().map_or(f64::NAN, |s| s.ratio);
    let drifts = report.drifts_toward_one(4);
    let passed = (slope - 0.25).abs() <= 0.02 && (0.7..=1.3).contains(&last) && drifts;
    let ratios: Vec<String> = report
        .samples
        .iter()
        .map(|s| format!("{:.4}", s.ratio))
        .collect();
    Ok(Outcome::new(
        passed,
        format!(
            "slope {slope:.4} (0.25 ± 0.02), ratio at 2^14 {last:.4} (in [0.7, 1.3]), \
             drift toward 1 over top octaves {drifts}; ratios [{}]; ratio vs 2K_δ at 2^14 {:.4}",
            ratios.join(", "),
            last / 2.0
        ),
    ))
}

fn z_asymptotics() -> Result<Outcome> {
    let report = check_gen_asymptotics(1.5, &default_z_grid(), 512)?;
    let end = report
        .samples
        .iter()
        .find(|s| s.z == 0.999)
        .map_or(f64::NAN, |s| s.ratio);
    let kappa = report.correction_exponent.unwrap_or(f64::NAN);
    let passed = (end - 1.0).abs() <= 0.1 && (kappa - 0.125).abs() <= 0.05;
    Ok(Outcome::new(
        passed,
        format!(
            "r(0.999) = {end:.4}, |r - 1| = {:.4} (tol 0.1), correction exponent {kappa:.4} \
             (0.125 ± 0.05), extrapolated amplitude / Γ(2-δ/2)K_δ = {:.4}",
            (end - 1.0).abs(),
            report.extrapolated_amplitude.unwrap_or(f64::NAN) / report.amplitude
        ),
    ))
}

fn monte_carlo() -> Result<Outcome> {
    let params = WalkParams::subcritical(1.5)?;
    let n = 100;
    let seed = 20_240_601;
    let run = |threads| simulate_with_threads(&params, 0, n, 1_000_000, seed, threads);
    let one = run(Some(1))?;
    let four = run(Some(4))?;
    let default = run(None)?;
    let dp = evolve(&params, 0, n)?.mean();
    let z = (one.mean[n] - dp).abs() / one.stderr[n];
    let bits = |r: &wallwalk_core::walk::SimulationResult| {
        r.mean
            .iter()
            .chain(&r.stderr)
            .map(|v| v.to_bits())
            .collect::<Vec<_>>()
    };
    let identical = bits(&one) == bits(&four) && bits(&one) == bits(&default);
    Ok(Outcome::new(
        z <= 3.0 && identical,
        format!(
            "MC {:.5} ± {:.5}, DP {dp:.5}, {z:.2} standard errors (tol 3); identical across 1/4/default threads {identical}",
            one.mean[n], one.stderr[n]
        ),
    ))
}

fn monotonicity() -> Result<Outcome> {
    let params = WalkParams::subcritical(1.5)?;
    let m = mean_trajectory(&params, 0, 1001)?;
    let mut violations = 0;
    for n in 1..=500 {
        violations += usize::from(m[2 * n] <= m[2 * n - 2]);
        violations += usize::from(m[2 * n] >= m[2 * n - 1]);
        violations += usize::from(m[2 * n + 1] <= m[2 * n]);
    }
    let mut delta_violations = 0;
    for x in [0, 2] {
        let means = [1.1, 1.5, 1.9, 2.5]
            .iter()
            .map(|&d| Ok(evolve(&WalkParams::new(d)?, x, 200)?.mean()))
            .collect::<Result<Vec<f64>>>()?;
        delta_violations += means.windows(2).filter(|w| w[1] > w[0]).count();
    }
    Ok(Outcome::new(
        violations == 0 && delta_violations == 0,
        format!("parity-order violations {violations}, δ-order violations {delta_violations}"),
    ))
}

fn supercritical_limit() -> Result<Outcome> {
    let params = WalkParams::new(3.0)?;
    let n = 10_000;
    let mut ev = Evolver::new(&params, 0, n + 1);
    while ev.steps() < n {
        ev.step()?;
    }
    let even = ev.mean();
    ev.step()?;
    let averaged = 0.5 * (even + ev.mean());
    let target = params.stationary_mean().unwrap_or(f64::NAN);
    let gap = (averaged - target).abs();
    // sanity on the target itself: partial stationary mean over a long range
    let partial = stationary(&params, 1_000_000).partial_mean();
    Ok(Outcome::new(
        gap <= 0.01,
        format!(
            "parity-averaged E₀X at n = 10^4 {averaged:.5}, limit {target:.5}, gap {gap:.4} (tol 0.01); \
             Σ_{{y ≤ 10^6}} y π_y = {partial:.5}"
        ),
    ))
}

fn measure_sanity() -> Result<Outcome> {
    let delta = 1.5;
    let mu = build_measure(delta, 512)?;
    let total = (mu.total_mass() - 1.0).abs();
    let cont = (mu.continuous_mass() - 1.0 / delta).abs();
    let coarse = build_measure(delta, 256)?.gram(30)?;
    let fine = mu.gram(30)?;
    let doubling = coarse
        .iter()
        .flatten()
        .zip(fine.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Outcome::new(
        total <= 1e-10 && cont <= 1e-10 && doubling <= 1e-9,
        format!(
            "|mass - 1| {total:.3e}, |continuous - 1/δ| {cont:.3e} (tol 1e-10), 256→512 Gram change {doubling:.3e} (tol 1e-9)"
        ),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "orthogonality",
            orthogonality,
            Some(Duration::from_secs(10)),
        ),
        (
            "spectral vs DP transitions",
            spectral_vs_dp,
            Some(Duration::from_secs(30)),
        ),
        ("atom limit", atom_limit, None),
        ("closed forms and ODE", closed_forms, None),
        ("generating functions vs DP", genfun_oracle, None),
        (
            "moment asymptotics",
            moment_asymptotics,
            Some(Duration::from_secs(60)),
        ),
        ("z-side asymptotics", z_asymptotics, None),
        ("Monte Carlo", monte_carlo, None),
        ("monotonicity", monotonicity, None),
        ("δ > 2 limit", supercritical_limit, None),
        ("measure sanity", measure_sanity, None),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let passed = outcome.passed && in_time;
        failures += usize::from(!passed);
        let budget_note = budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        println!(
            "{} {:>2} {name}: {} [{:.2}s{budget_note}]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
