use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{step_probs, WalkParams};
use crate::error::{domain, Result};

/// Paths per work unit. Fixed so the split never depends on the pool size.
const CHUNK: u64 = 4096;

/// Per-step sample mean of X_k and its standard error, k = 0..=n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub paths: u64,
    pub seed: u64,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Monte Carlo estimate of E_start X_k using the global rayon pool.
pub fn simulate(
    params: &WalkParams,
    start: u64,
    n: usize,
    paths: u64,
    seed: u64,
) -> Result<SimulationResult> {
    simulate_with_threads(params, start, n, paths, seed, None)
}

/// Path `i` draws from ChaCha8 stream `i` under key `seed`, and positions are
/// accumulated as exact integers, so the output is a pure function of
/// `(params, start, n, paths, seed)` whatever `threads` is.
pub fn simulate_with_threads(
    params: &WalkParams,
    start: u64,
    n: usize,
    paths: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<SimulationResult> {
    if paths == 0 {
        return domain("simulate needs at least one path");
    }
    let top = start + n as u64;
    let up: Vec<f64> = (0..=top).map(|y| step_probs(params, y).0).collect();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = paths.div_ceil(CHUNK);

    let run_chunk = |c: u64| -> (Vec<u64>, Vec<u128>) {
        let mut sum = vec![0u64; n + 1];
        let mut sumsq = vec![0u128; n + 1];
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(paths);
        for path in lo..hi {
            let mut rng = base.clone();
            rng.set_stream(path);
            let mut x = start;
            sum[0] += x;
            sumsq[0] += u128::from(x * x);
            for k in 1..=n {
                let u: f64 = rng.random();
                if u < up[x as usize] {
                    x += 1;
                } else {
                    x -= 1;
                }
                sum[k] += x;
                sumsq[k] += u128::from(x * x);
            }
        }
        (sum, sumsq)
    };

    let parts: Vec<(Vec<u64>, Vec<u128>)> = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| crate::Error::Domain(format!("thread pool: {e}")))?;
            pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect())
        }
        None => (0..chunks).into_par_iter().map(run_chunk).collect(),
    };

    let mut sum = vec![0u128; n + 1];
    let mut sumsq = vec![0u128; n + 1];
    for (s, q) in parts {
        for k in 0..=n {
            sum[k] += u128::from(s[k]);
            sumsq[k] += q[k];
        }
    }

    let m = paths as f64;
    let mut mean = Vec::with_capacity(n + 1);
    let mut stderr = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mu = sum[k] as f64 / m;
        mean.push(mu);
        if paths < 2 {
            stderr.push(0.0);
            continue;
        }
        // centred second moment from exact integer sums
        let centred = sumsq[k] as f64 - (sum[k] as f64) * mu;
        let var = (centred / (m - 1.0)).max(0.0);
        stderr.push((var / m).sqrt());
    }
    Ok(SimulationResult {
        paths,
        seed,
        mean,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::expected_position;

    #[test]
    fn forced_first_step() {
        let params = WalkParams::new(1.5).unwrap();
        for seed in [0, 7, 12345] {
            let r = simulate(&params, 0, 1, 1000, seed).unwrap();
            assert_eq!(r.mean, vec![0.0, 1.0]);
            assert_eq!(r.stderr, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn rejects_zero_paths() {
        let params = WalkParams::new(1.5).unwrap();
        assert!(simulate(&params, 0, 5, 0, 1).is_err());
    }

    #[test]
    fn two_steps_within_three_sigma() {
        let params = WalkParams::new(1.5).unwrap();
        let r = simulate(&params, 0, 2, 1_000_000, 42).unwrap();
        let exact = 4.0 / 7.0;
        assert!((r.mean[2] - exact).abs() <= 3.0 * r.stderr[2]);
        // X₂ ∈ {0, 2} so the variance is 4 p (1 - p) with p = 2/7
        let sd = (4.0 * (2.0 / 7.0) * (5.0 / 7.0) / 1e6f64).sqrt();
        assert!((r.stderr[2] - sd).abs() < 1e-2 * sd);
        assert!((exact - expected_position(&params, 0, 2).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn independent_of_thread_count() {
        let params = WalkParams::new(1.3).unwrap();
        let a = simulate_with_threads(&params, 2, 50, 20_000, 9, Some(1)).unwrap();
        let b = simulate_with_threads(&params, 2, 50, 20_000, 9, Some(3)).unwrap();
        let c = simulate_with_threads(&params, 2, 50, 20_000, 9, Some(8)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = simulate_with_threads(&params, 2, 50, 20_000, 10, Some(8)).unwrap();
        assert_ne!(a.mean, d.mean);
    }

    #[test]
    fn prefix_of_paths_is_stable() {
        // path i always uses stream i, so adding paths never changes old ones
        let params = WalkParams::new(1.5).unwrap();
        let one = simulate_with_threads(&params, 0, 30, 1, 5, Some(1)).unwrap();
        let two = simulate_with_threads(&params, 0, 30, 2, 5, Some(2)).unwrap();
        for k in 0..=30 {
            let x0 = one.mean[k];
            let x1 = 2.0 * two.mean[k] - x0;
            assert!(x1 >= 0.0 && x1.fract() == 0.0);
        }
    }
}
