use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::specfun::log_gamma_unchecked;

const QL_MAX_SWEEPS: usize = 60;

/// Gauss rule for the weight (1-t)^α (1+t)^β on [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl QuadratureRule {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// ∫ (1-t)^α (1+t)^β dt, i.e. what the weights sum to.
    pub fn weight_integral(&self) -> f64 {
        jacobi_mass(self.alpha, self.beta)
    }

    /// Σ w_i f(t_i).
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2
        + log_gamma_unchecked(alpha + 1.0)
        + log_gamma_unchecked(beta + 1.0)
        - log_gamma_unchecked(alpha + beta + 2.0))
    .exp()
}

/// Symmetric Gauss–Jacobi rule for (1-t²)^a.
pub fn gauss_jacobi(a: f64, n: usize) -> Result<QuadratureRule> {
    gauss_jacobi_ab(a, a, n)
}

/// Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    gauss_jacobi_ab(0.0, 0.0, n)
}

/// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the
/// monic Jacobi recurrence, weights are μ₀ times the squared first
/// components of the normalised eigenvectors.
pub fn gauss_jacobi_ab(alpha: f64, beta: f64, n: usize) -> Result<QuadratureRule> {
    if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
        return domain(format!(
            "Jacobi exponents must exceed -1, got α = {alpha}, β = {beta}"
        ));
    }
    if n == 0 {
        return domain("a quadrature rule needs at least one node");
    }
    let s = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    diag[0] = (beta - alpha) / (s + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let m = 2.0 * kf + s;
        diag[k] = (beta * beta - alpha * alpha) / (m * (m + 2.0));
        off[k - 1] = if k == 1 {
            (4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s).powi(2) * (3.0 + s))).sqrt()
        } else {
            (4.0 * kf * (kf + alpha) * (kf + beta) * (kf + s) / (m * m * (m + 1.0) * (m - 1.0)))
                .sqrt()
        };
    }
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first)?;

    let mu0 = jacobi_mass(alpha, beta);
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first)
        .map(|(x, z)| (x, mu0 * z * z))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    if alpha == beta {
        // exact mirror symmetry
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-x, w);
            pairs[j] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
    }
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        alpha,
        beta,
    })
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. On return `d` holds
/// the eigenvalues and `z` the first components of the eigenvectors, given
/// `z` = e₁ on entry. `e[i]` couples rows i and i+1; `e[n-1]` is ignored.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::NonConvergence {
                    what: "tridiagonal QL",
                    iterations: QL_MAX_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// A rule on a finite interval, already mapped, with the weight folded
/// into `weights`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MappedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Rule for ∫₀¹ s^β f(s) ds.
pub(crate) fn unit_jacobi(beta: f64, n: usize) -> Result<MappedRule> {
    let rule = gauss_jacobi_ab(0.0, beta, n)?;
    let scale = 0.5f64.powf(beta + 1.0);
    Ok(MappedRule {
        nodes: rule.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
        weights: rule.weights.iter().map(|w| w * scale).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;
    use approx::assert_relative_eq;

    fn beta_fn(a: f64, b: f64) -> f64 {
        gamma(a).unwrap() * gamma(b).unwrap() / gamma(a + b).unwrap()
    }

    #[test]
    fn two_point_legendre() {
        let r = gauss_jacobi(0.0, 2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r.nodes[0], -x, max_relative = 1e-15);
        assert_relative_eq!(r.nodes[1], x, max_relative = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.weights[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn singular_weight_mass_and_moment() {
        let a = -0.75;
        let r = gauss_jacobi(a, 64).unwrap();
        let total = beta_fn(0.5, a + 1.0);
        assert_relative_eq!(total, 5.244115108584239, max_relative = 1e-12);
        let sum: f64 = r.weights.iter().sum();
        assert!((sum - total).abs() <= 1e-10);
        // ∫t²(1-t²)^a = B(3/2, a+1)
        let m2 = r.integrate(|t| t * t);
        let expect = beta_fn(1.5, a + 1.0) / beta_fn(0.5, a + 1.0) * total;
        assert!((m2 - expect).abs() <= 1e-10);
        assert_relative_eq!(r.weight_integral(), total, max_relative = 1e-13);
    }

    #[test]
    fn rule_shape() {
        for (a, n) in [(-0.9, 7), (-0.5, 33), (0.25, 64), (1.25, 128)] {
            let r = gauss_jacobi(a, n).unwrap();
            assert_eq!(r.node_count(), n);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.nodes.iter().all(|&x| x.abs() < 1.0));
            for i in 0..n {
                assert_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
            }
            let sum: f64 = r.weights.iter().sum();
            assert!((sum - r.weight_integral()).abs() <= 1e-10 * r.weight_integral());
        }
    }

    #[test]
    fn polynomial_exactness_asymmetric() {
        // ∫_{-1}^{1} (1-t)^α (1+t)^β t^k dt against a binomial expansion
        // in s = (1+t)/2 computed with beta functions
        let (alpha, beta) = (0.3, -0.6);
        let n = 12;
        let r = gauss_jacobi_ab(alpha, beta, n).unwrap();
        for k in 0..2 * n {
            let got = r.integrate(|t| t.powi(k as i32));
            let mut want = 0.0;
            let mut scale = 0.0;
            // t = 2s - 1
            for j in 0..=k {
                let binom = (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64);
                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                let term = binom
                    * 2f64.powi(j as i32)
                    * 2f64.powf(alpha + beta + 1.0)
                    * beta_fn(beta + 1.0 + j as f64, alpha + 1.0);
                want += sign * term;
                scale += term;
            }
            // the alternating expansion cancels, so compare against its size
            assert!((got - want).abs() <= 1e-13 * scale, "k={k}");
        }
    }

    #[test]
    fn unit_rule() {
        let r = unit_jacobi(0.5, 20).unwrap();
        // ∫₀¹ s^{1/2} s² ds = 2/7
        let v: f64 = r.nodes.iter().zip(&r.weights).map(|(s, w)| w * s * s).sum();
        assert_relative_eq!(v, 2.0 / 7.0, max_relative = 1e-14);
    }

    #[test]
    fn bad_input() {
        assert!(gauss_jacobi(-1.0, 4).is_err());
        assert!(gauss_jacobi(0.0, 0).is_err());
        assert!(gauss_jacobi_ab(0.0, f64::NAN, 4).is_err());
        let one = gauss_jacobi(0.0, 1).unwrap();
        assert_eq!(one.nodes, vec![0.0]);
        assert_relative_eq!(one.weights[0], 2.0, max_relative = 1e-15);
    }
}
