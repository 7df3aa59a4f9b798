//! Small least-squares helpers for the power-law fits.

/// Ordinary least squares y ≈ a + b x. Returns (b, a), or None for fewer
/// than two distinct abscissae.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Fit of v ≈ c + d ε^κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PowerCorrection {
    pub c: f64,
    pub d: f64,
    pub kappa: f64,
    pub rss: f64,
}

/// Scans κ on a grid, solving the linear problem for (c, d) at each κ, and
/// refines around the best grid point by golden-section search.
pub(crate) fn power_correction(eps: &[f64], v: &[f64]) -> Option<PowerCorrection> {
    if eps.len() < 3 || eps.len() != v.len() {
        return None;
    }
    let at = |kappa: f64| -> Option<PowerCorrection> {
        let x: Vec<f64> = eps.iter().map(|e| e.powf(kappa)).collect();
        let (d, c) = ols(&x, v)?;
        let rss = x
            .iter()
            .zip(v)
            .map(|(xi, vi)| (vi - c - d * xi).powi(2))
            .sum();
        Some(PowerCorrection { c, d, kappa, rss })
    };
    let grid: Vec<f64> = (1..=300).map(|k| k as f64 * 0.005).collect();
    let (mut best_k, mut best) = (grid[0], at(grid[0])?);
    for &k in &grid[1..] {
        if let Some(p) = at(k) {
            if p.rss < best.rss {
                best = p;
                best_k = k;
            }
        }
    }
    let (mut lo, mut hi) = ((best_k - 0.005).max(1e-4), best_k + 0.005);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        let (fa, fb) = (at(a)?.rss, at(b)?.rss);
        if fa < fb {
            hi = b;
        } else {
            lo = a;
        }
    }
    let refined = at(0.5 * (lo + hi))?;
    Some(if refined.rss <= best.rss {
        refined
    } else {
        best
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ols_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 - 2.0 * v).collect();
        let (b, a) = ols(&x, &y).unwrap();
        assert_relative_eq!(b, -2.0, max_relative = 1e-14);
        assert_relative_eq!(a, 0.5, max_relative = 1e-14);
        assert!(ols(&[1.0], &[2.0]).is_none());
        assert!(ols(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn recovers_power_correction() {
        let eps: Vec<f64> = (0..12).map(|k| 0.1 * 0.6f64.powi(k)).collect();
        let v: Vec<f64> = eps.iter().map(|e| 2.5 - 1.3 * e.powf(0.37)).collect();
        let p = power_correction(&eps, &v).unwrap();
        assert_relative_eq!(p.c, 2.5, max_relative = 1e-6);
        assert_relative_eq!(p.d, -1.3, max_relative = 1e-5);
        assert_relative_eq!(p.kappa, 0.37, max_relative = 1e-5);
    }
}
