//! Generating functions of the polynomial family and of the mean position.
//!
//! With H_y(t) = Γ(δ+1)Γ(y)/Γ(y+δ+1) · Q_y(t) and q_t(u) = 1 - 2tu + u²,
//!
//! ```text
//! Φ_t(u)  = Σ_{y≥1} H_y(t) u^y
//!         = 1/δ - u^{-δ} q^{δ/2} I,          I = ∫₀^u v^{δ-1} q_t(v)^{-δ/2} dv
//! Ψ_t(u)  = Σ (2y+δ) H_y(t) u^y = 2uΦ' + δΦ
//!         = -1 + δ(1-u²) u^{-δ} q^{δ/2-1} I
//! Ψ'_t(u) = δ(1-u²)/(u q) - B_t(u) δ I / (u^δ q^{2-δ/2})
//! B_t(u)  = 4u(1-t) - 2t(1-u)² + δ(1-ut)(1-u²)/u
//! ```
//!
//! Below [`U_SWITCH`] the power series is used instead of the closed forms,
//! which cancel badly as u → 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::measure::{build_measure, unit_jacobi, MappedRule, SpectralMeasure};
use crate::polys::PolyFamily;
use crate::specfun::{log_gamma_ratio, log_gamma_unchecked};
use crate::walk::{mean_trajectory, WalkParams};

/// Closed forms are used for |u| ≥ U_SWITCH, the series below it.
pub const U_SWITCH: f64 = 0.05;

const JACOBI_NODES: usize = 64;
const PANEL_NODES: usize = 20;
/// Enough series terms for |u| ≤ 0.3 at full precision.
const SERIES_TERMS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiValue {
    pub t: f64,
    pub u: f64,
    pub phi: f64,
    pub psi: f64,
    pub psi_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenFunPoint {
    pub z: f64,
    /// Σ_{n even} z^n E₀X_n
    pub g_e: f64,
    /// Σ_{n odd} z^n E₀X_n
    pub g_o: f64,
}

/// H_0..H_max at t, with H_0 = 0.
pub fn h_series(delta: f64, t: f64, max_y: usize) -> Result<Vec<f64>> {
    WalkParams::new(delta)?;
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("h_series needs |t| ≤ 1, got {t}"));
    }
    let q = PolyFamily::Q { delta }.values(max_y, t)?;
    Ok(q.iter()
        .enumerate()
        .map(|(y, &qy)| if y == 0 { 0.0 } else { h_scale(delta, y) * qy })
        .collect())
}

/// Γ(δ+1)Γ(y)/Γ(y+δ+1)
fn h_scale(delta: f64, y: usize) -> f64 {
    (log_gamma_unchecked(delta + 1.0) - log_gamma_ratio(y as f64, delta + 1.0)).exp()
}

/// Evaluator for Φ, Ψ, Ψ' at a fixed δ, holding the quadrature rules for
/// the inner integral.
#[derive(Debug, Clone)]
pub struct GenFun {
    delta: f64,
    jacobi: MappedRule,
    panel: MappedRule,
    scale: Vec<f64>,
    b_sign: f64,
}

impl GenFun {
    pub fn new(delta: f64) -> Result<Self> {
        WalkParams::new(delta)?;
        let jacobi = unit_jacobi(delta - 1.0, JACOBI_NODES)?;
        let panel = unit_jacobi(0.0, PANEL_NODES)?;
        let scale = (0..=SERIES_TERMS)
            .map(|y| if y == 0 { 0.0 } else { h_scale(delta, y) })
            .collect();
        Ok(Self {
            delta,
            jacobi,
            panel,
            scale,
            b_sign: 1.0,
        })
    }

    /// Flips the sign of B_t(u). Only for mutation testing of the checks.
    #[doc(hidden)]
    pub fn with_flipped_b(mut self) -> Self {
        self.b_sign = -self.b_sign;
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn check(&self, t: f64, u: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&t) {
            return domain(format!("generating functions need |t| ≤ 1, got {t}"));
        }
        if u.is_nan() || u.abs() >= 1.0 {
            return domain(format!("generating functions need |u| < 1, got {u}"));
        }
        Ok(())
    }

    /// Φ, Ψ and Ψ' at (t, u).
    pub fn eval(&self, t: f64, u: f64) -> Result<PhiValue> {
        self.check(t, u)?;
        // Φ_t(-u) = Φ_{-t}(u), Ψ likewise, Ψ'_t(-u) = -Ψ'_{-t}(u)
        let (tt, uu, sign) = if u < 0.0 { (-t, -u, -1.0) } else { (t, u, 1.0) };
        let (phi, psi, dpsi) = if uu < U_SWITCH {
            self.series(tt, uu)
        } else {
            self.closed(tt, uu)
        };
        Ok(PhiValue {
            t,
            u,
            phi,
            psi,
            psi_prime: sign * dpsi,
        })
    }

    /// Ψ'_t(u) only; the hot path of [`GenFun::generating_functions`].
    pub fn psi_prime(&self, t: f64, u: f64) -> f64 {
        if u < U_SWITCH {
            self.series(t, u).2
        } else {
            let q = self.q(t, u);
            let j = self.inner(t, u);
            self.psi_prime_closed(t, u, q, j)
        }
    }

    /// Truncated power series, valid for small |u|.
    pub fn series(&self, t: f64, u: f64) -> (f64, f64, f64) {
        let d = self.delta;
        let (mut q_prev, mut q) = (1.0, t);
        let (mut phi, mut psi, mut dpsi) = (0.0, 0.0, 0.0);
        let mut pow = 1.0; // u^{y-1}
        for y in 1..=SERIES_TERMS {
            let h = self.scale[y] * q;
            let yf = y as f64;
            dpsi += yf * (2.0 * yf + d) * h * pow;
            pow *= u;
            phi += h * pow;
            psi += (2.0 * yf + d) * h * pow;
            if pow.abs() < 1e-18 * phi.abs().max(f64::MIN_POSITIVE) && y > 2 {
                break;
            }
            let next = ((2.0 * yf + d) * t * q - (yf + d) * q_prev) / yf;
            q_prev = q;
            q = next;
        }
        (phi, psi, dpsi)
    }

    /// (1-u)² + 2u(1-t), which avoids cancellation near t = 1.
    fn q(&self, t: f64, u: f64) -> f64 {
        (1.0 - u) * (1.0 - u) + 2.0 * u * (1.0 - t)
    }

    fn psi_prime_closed(&self, t: f64, u: f64, q: f64, j: f64) -> f64 {
        let d = self.delta;
        let one_m_u2 = (1.0 - u) * (1.0 + u);
        let b = 4.0 * u * (1.0 - t) - 2.0 * t * (1.0 - u) * (1.0 - u)
            + d * (1.0 - u * t) * one_m_u2 / u;
        d * one_m_u2 / (u * q) - self.b_sign * b * d * j / q.powf(2.0 - 0.5 * d)
    }

    fn closed(&self, t: f64, u: f64) -> (f64, f64, f64) {
        let d = self.delta;
        let q = self.q(t, u);
        let j = self.inner(t, u);
        let phi = 1.0 / d - q.powf(0.5 * d) * j;
        let psi = -1.0 + d * (1.0 - u) * (1.0 + u) * q.powf(0.5 * d - 1.0) * j;
        (phi, psi, self.psi_prime_closed(t, u, q, j))
    }

    /// u^{-δ} I = ∫₀¹ s^{δ-1} q_t(us)^{-δ/2} ds for 0 < u < 1.
    ///
    /// The integrand has complex singularities at s = (t ± i√(1-t²))/u. Away
    /// from them a Gauss–Jacobi rule absorbs s^{δ-1}; near their real part
    /// Gauss–Legendre panels are graded geometrically.
    pub(crate) fn inner(&self, t: f64, u: f64) -> f64 {
        let d = self.delta;
        let g = |s: f64| self.q(t, u * s).powf(-0.5 * d);
        if t <= 0.0 {
            return self
                .jacobi
                .nodes
                .iter()
                .zip(&self.jacobi.weights)
                .map(|(&s, &w)| w * g(s))
                .sum();
        }
        let re = t / u;
        let im = ((1.0 - t) * (1.0 + t)).sqrt() / u;
        let sa = (0.5 * re).min(1.0);
        let mut acc: f64 = sa.powf(d)
            * self
                .jacobi
                .nodes
                .iter()
                .zip(&self.jacobi.weights)
                .map(|(&s, &w)| w * g(sa * s))
                .sum::<f64>();
        if sa >= 1.0 {
            return acc;
        }
        let c = re.clamp(sa, 1.0);
        let width = (re - c).hypot(im).max(f64::MIN_POSITIVE);
        let f = |s: f64| s.powf(d - 1.0) * g(s);
        let mut panel = |lo: f64, hi: f64| {
            let len = hi - lo;
            acc += len
                * self
                    .panel
                    .nodes
                    .iter()
                    .zip(&self.panel.weights)
                    .map(|(&x, &w)| w * f(lo + len * x))
                    .sum::<f64>();
        };
        let (mut edge, mut w) = (c, width);
        while edge > sa {
            let next = (edge - w).max(sa);
            panel(next, edge);
            edge = next;
            w *= 2.0;
        }
        let (mut edge, mut w) = (c, width);
        while edge < 1.0 {
            // never wider than the distance to the s^{δ-1} branch point
            let next = (edge + w.min(edge)).min(1.0);
            panel(edge, next);
            edge = next;
            w *= 2.0;
        }
        acc
    }

    /// g_e and g_o at z from the continuous part of `mu`.
    pub fn generating_functions(&self, mu: &SpectralMeasure, z: f64) -> Result<GenFunPoint> {
        if !(0.0..1.0).contains(&z) {
            return domain(format!("generating functions need z in [0, 1), got {z}"));
        }
        if mu.delta() != self.delta {
            return domain("measure and evaluator were built for different δ");
        }
        if z == 0.0 {
            return Ok(GenFunPoint {
                z,
                g_e: 0.0,
                g_o: 0.0,
            });
        }
        let inv_z = 1.0 / ((1.0 - z) * (1.0 + z));
        let terms: Vec<(f64, f64)> = mu
            .half_nodes()
            .par_iter()
            .map(|node| {
                let t = node.t;
                let inv_zt = 1.0 / ((1.0 - z * t) * (1.0 + z * t));
                let a = self.psi_prime(t, z * t) * inv_zt;
                let b = self.psi_prime(t, z) * inv_z;
                let c = self.psi_prime(-t, z * t) * inv_zt;
                let d = self.psi_prime(-t, z) * inv_z;
                let even = t * a - b + t * c - d;
                let odd = t * (a - b - c + d);
                (node.weight * even, node.weight * odd)
            })
            .collect();
        let (se, so) = terms
            .iter()
            .fold((0.0, 0.0), |(e, o), &(a, b)| (e + a, o + b));
        Ok(GenFunPoint {
            z,
            g_e: z * se,
            g_o: z * inv_z + z * so,
        })
    }
}

/// Φ, Ψ, Ψ' at (t, u) from the closed forms (series below [`U_SWITCH`]).
pub fn phi_closed(delta: f64, t: f64, u: f64) -> Result<PhiValue> {
    GenFun::new(delta)?.eval(t, u)
}

/// Largest |q Φ' - (t - u - δ(1/u - t) Φ)| over `u_grid`, with Φ' from a
/// centred difference of step 1e-5.
pub fn ode_residual(delta: f64, t: f64, u_grid: &[f64]) -> Result<f64> {
    let gf = GenFun::new(delta)?;
    ode_residual_with(&gf, t, u_grid)
}

pub(crate) fn ode_residual_with(gf: &GenFun, t: f64, u_grid: &[f64]) -> Result<f64> {
    let h = 1e-5;
    let d = gf.delta;
    let mut worst: f64 = 0.0;
    for &u in u_grid {
        if !(u > 0.0 && u <= 0.99) {
            return domain(format!("ODE grid must lie in (0, 0.99], got {u}"));
        }
        let phi = gf.eval(t, u)?.phi;
        let dphi = (gf.eval(t, u + h)?.phi - gf.eval(t, u - h)?.phi) / (2.0 * h);
        let q = 1.0 - 2.0 * t * u + u * u;
        let r = q * dphi - (t - u - d * (1.0 / u - t) * phi);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Largest |Ψ - (2uΦ' + δΦ)| over `u_grid` with a finite-difference Φ'.
pub fn psi_consistency_residual(delta: f64, t: f64, u_grid: &[f64]) -> Result<f64> {
    let gf = GenFun::new(delta)?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for &u in u_grid {
        let v = gf.eval(t, u)?;
        let dphi = (gf.eval(t, u + h)?.phi - gf.eval(t, u - h)?.phi) / (2.0 * h);
        worst = worst.max((v.psi - (2.0 * u * dphi + delta * v.phi)).abs());
    }
    Ok(worst)
}

/// g_e and g_o at z using a freshly built spectral measure.
pub fn generating_functions(delta: f64, z: f64, nodes: usize) -> Result<GenFunPoint> {
    let mu = build_measure(delta, nodes)?;
    GenFun::new(delta)?.generating_functions(&mu, z)
}

/// Partial sums Σ_{n ≤ n_max} z^n E₀X_n split by parity, from the exact
/// evolution, with a bound on the omitted tail from E₀X_n ≤ n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpPartialSums {
    pub z: f64,
    pub n_max: usize,
    pub g_e: f64,
    pub g_o: f64,
    pub tail_bound: f64,
}

pub fn dp_partial_sums(delta: f64, z: f64, n_max: usize) -> Result<DpPartialSums> {
    if !(0.0..1.0).contains(&z) {
        return domain(format!("partial sums need z in [0, 1), got {z}"));
    }
    let params = WalkParams::new(delta)?;
    let means = mean_trajectory(&params, 0, n_max)?;
    let (mut g_e, mut g_o) = (0.0, 0.0);
    let mut zn = 1.0;
    for (n, m) in means.iter().enumerate() {
        if n % 2 == 0 {
            g_e += zn * m;
        } else {
            g_o += zn * m;
        }
        zn *= z;
    }
    // Σ_{n>N} n z^n = z^{N+1} ((N+1) - N z) / (1-z)²
    let nf = n_max as f64;
    let tail_bound = zn * ((nf + 1.0) - nf * z) / ((1.0 - z) * (1.0 - z));
    Ok(DpPartialSums {
        z,
        n_max,
        g_e,
        g_o,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Reference for u^{-δ}I by composite Simpson in w = s^δ, where the
    /// integrand becomes q(u w^{1/δ})^{-δ/2}/δ.
    fn inner_oracle(delta: f64, t: f64, u: f64) -> f64 {
        let n = 200_000;
        let h = 1.0 / n as f64;
        let f = |w: f64| {
            let v = u * w.powf(1.0 / delta);
            (1.0 - 2.0 * t * v + v * v).powf(-0.5 * delta) / delta
        };
        let mut acc = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn h_series_examples() {
        let t = 0.37;
        let h = h_series(1.5, t, 50).unwrap();
        assert_eq!(h[0], 0.0);
        assert_relative_eq!(h[1], t / 2.5, max_relative = 1e-14);
        assert_relative_eq!(
            h[2],
            (3.5 * t * t - 2.5) / (2.5 * 3.5),
            max_relative = 1e-13
        );
        let d = 1.5;
        for y in 2..50 {
            let yf = y as f64;
            let lhs = (2.0 * yf + d) * t * h[y];
            let rhs = (yf + d + 1.0) * h[y + 1] + (yf - 1.0) * h[y - 1];
            assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn h_series_rejects_bad_input() {
        assert!(h_series(0.5, 0.1, 5).is_err());
        assert!(h_series(1.5, 1.1, 5).is_err());
    }

    #[test]
    fn inner_integral_against_simpson() {
        let gf = GenFun::new(1.5).unwrap();
        for (t, u) in [
            (0.5, 0.2),
            (-0.6, 0.9),
            (0.99, 0.95),
            (1.0, 0.9),
            (0.2, 0.99),
        ] {
            let got = gf.inner(t, u);
            let want = inner_oracle(1.5, t, u);
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn inner_integral_stable_under_refinement() {
        // the graded rule against the same rule with twice the panel nodes
        let gf = GenFun::new(1.3).unwrap();
        let mut fine = gf.clone();
        fine.panel = unit_jacobi(0.0, 2 * PANEL_NODES).unwrap();
        fine.jacobi = unit_jacobi(0.3, 2 * JACOBI_NODES).unwrap();
        for t in [0.05, 0.5, 0.9, 0.999, 0.999_999, 1.0] {
            for u in [0.05, 0.5, 0.9, 0.99, 0.999] {
                let a = gf.inner(t, u);
                let b = fine.inner(t, u);
                assert!((a - b).abs() <= 1e-13 * b, "t={t} u={u} {a} {b}");
            }
        }
    }

    #[test]
    fn phi_at_zero() {
        for t in [-1.0, 0.0, 0.4, 1.0] {
            let v = phi_closed(1.5, t, 0.0).unwrap();
            assert_eq!(v.phi, 0.0);
            assert_eq!(v.psi, 0.0);
            assert_relative_eq!(v.psi_prime, 3.5 / 2.5 * t, max_relative = 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_series() {
        for delta in [1.25, 1.5, 1.75] {
            let gf = GenFun::new(delta).unwrap();
            for t in [-0.9, 0.0, 0.5, 0.99] {
                for u in [-0.3, -0.2, -0.06, 0.06, 0.1, 0.2, 0.3] {
                    let (phi, psi, dpsi) = if u < 0.0 {
                        let (a, b, c) = gf.series(-t, -u);
                        (a, b, -c)
                    } else {
                        gf.series(t, u)
                    };
                    let c = gf.eval(t, u).unwrap();
                    assert!((c.phi - phi).abs() <= 1e-10, "δ={delta} t={t} u={u}");
                    assert!((c.psi - psi).abs() <= 1e-10);
                    assert!((c.psi_prime - dpsi).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn psi_prime_leading_term() {
        let v = phi_closed(1.5, 0.5, 1e-9).unwrap();
        assert_relative_eq!(v.psi_prime, 1.4 * 0.5, max_relative = 1e-6);
        // direct series at u = 0.2, 60 terms from h_series
        let h = h_series(1.5, 0.5, 60).unwrap();
        let series: f64 = (1..=60)
            .map(|y| y as f64 * (2.0 * y as f64 + 1.5) * h[y] * 0.2f64.powi(y as i32 - 1))
            .sum();
        let v = phi_closed(1.5, 0.5, 0.2).unwrap();
        assert!((v.psi_prime - series).abs() <= 1e-10);
        let phi: f64 = (1..=60).map(|y| h[y] * 0.2f64.powi(y as i32)).sum();
        assert!((v.phi - phi).abs() <= 1e-10);
    }

    #[test]
    fn ode_and_psi_consistency() {
        let grid: Vec<f64> = (1..=9).map(|k| 0.1 * k as f64).collect();
        assert!(ode_residual(1.5, 0.5, &grid).unwrap() <= 1e-6);
        assert!(ode_residual(1.5, 1.0, &[0.5]).unwrap() <= 1e-6);
        for t in [-0.8, 0.0, 0.5, 0.95] {
            assert!(ode_residual(1.5, t, &grid).unwrap().is_finite());
            assert!(
                psi_consistency_residual(1.5, t, &grid).unwrap() <= 1e-7,
                "t={t}"
            );
        }
        assert!(ode_residual(1.5, 0.5, &[0.0]).is_err());
        assert!(ode_residual(1.5, 0.5, &[0.995]).is_err());
    }

    #[test]
    fn flipped_b_breaks_psi_prime() {
        let gf = GenFun::new(1.5).unwrap().with_flipped_b();
        let (_, _, series) = gf.series(0.5, 0.2);
        assert!((gf.eval(0.5, 0.2).unwrap().psi_prime - series).abs() > 1e-3);
    }

    #[test]
    fn generating_functions_against_dp() {
        let mu = build_measure(1.5, 512).unwrap();
        let gf = GenFun::new(1.5).unwrap();
        let p = gf.generating_functions(&mu, 0.3).unwrap();
        let dp = dp_partial_sums(1.5, 0.3, 400).unwrap();
        assert!(dp.tail_bound < 1e-150);
        assert!((p.g_e - dp.g_e).abs() <= 1e-8, "{p:?} {dp:?}");
        assert!((p.g_o - dp.g_o).abs() <= 1e-8, "{p:?} {dp:?}");
        let zero = gf.generating_functions(&mu, 0.0).unwrap();
        assert_eq!((zero.g_e, zero.g_o), (0.0, 0.0));
        assert!(gf.generating_functions(&mu, 1.0).is_err());
    }

    #[test]
    fn odd_part_from_shifted_start() {
        // E₀X_{2m+1} = E₁X_{2m}, so g_o(z) = z Σ_m z^{2m} E₁X_{2m}
        let params = WalkParams::new(1.5).unwrap();
        let traj = mean_trajectory(&params, 1, 400).unwrap();
        let z: f64 = 0.3;
        let shifted: f64 = (0..=200)
            .map(|m| z.powi(2 * m as i32 + 1) * traj[2 * m])
            .sum();
        let dp = dp_partial_sums(1.5, z, 401).unwrap();
        assert!((shifted - dp.g_o).abs() <= 1e-14);
    }
}
