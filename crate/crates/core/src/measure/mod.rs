//! The orthogonality measure of the random-walk polynomials Q_y:
//!
//! ```text
//! dμ(t) = π₀ (δ_{+1} + δ_{-1}) + c (1-t²)^{(δ-3)/2} / |F(t)|² dt
//! ```
//!
//! with c fixed by ∫dμ^c = 1/δ, together with the Karlin–McGregor formula
//! and the cross-checks against the dual and associated families.
//!
//! The continuous part is integrated with a tanh-sinh rule in the variable
//! σ = (1-t)^{(δ-1)/2} on each half of [-1, 1]; in that variable the
//! (1-t)^{(δ-3)/2} endpoint singularity cancels against the Jacobian.

mod quadrature;

pub use quadrature::{gauss_jacobi, gauss_jacobi_ab, gauss_legendre, QuadratureRule};
pub(crate) use quadrature::{unit_jacobi, MappedRule};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::polys::PolyFamily;
use crate::specfun::BoundaryFunction;
use crate::walk::pi_ratio;

/// Default number of continuous nodes on each half of [-1, 1].
pub const DEFAULT_NODES: usize = 512;

/// Half-width of the tanh-sinh window in the u variable.
const TANH_SINH_WINDOW: f64 = 4.0;

/// One continuous node on (0, 1). Its mirror -t carries the same weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureNode {
    pub t: f64,
    /// 1 - t, kept separately because it can be far below machine epsilon.
    pub s: f64,
    /// Normalised continuous mass attached to this node.
    pub weight: f64,
    /// (1-t)^{(δ-1)/2}
    pub sigma: f64,
    /// 1/|F(t)|²
    pub inv_f2: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    delta: f64,
    atom_mass: f64,
    density_exponent: f64,
    z: f64,
    half: Vec<MeasureNode>,
    boundary: BoundaryFunction,
}

impl SpectralMeasure {
    pub fn new(delta: f64, nodes: usize) -> Result<Self> {
        if !(delta > 1.0 && delta < 2.0) {
            return domain(format!("spectral measure needs δ in (1, 2), got {delta}"));
        }
        if nodes < 2 {
            return domain("the spectral measure needs at least 2 nodes per half");
        }
        let boundary = BoundaryFunction::new(delta)?;
        let b = 0.5 * (delta - 1.0);
        let a = 0.5 * (delta - 3.0);
        let h = 2.0 * TANH_SINH_WINDOW / (nodes - 1) as f64;
        let quarter_pi = 0.25 * std::f64::consts::PI;

        let mut half = Vec::with_capacity(nodes);
        let mut raw_total = 0.0;
        for i in 0..nodes {
            let u = -TANH_SINH_WINDOW + i as f64 * h;
            let v = 2.0 * quarter_pi * u.sinh();
            let ln_sigma = -(-2.0 * v).exp().ln_1p();
            let sigma = ln_sigma.exp();
            let omega = h * quarter_pi * u.cosh() / v.cosh().powi(2);
            let s = (ln_sigma / b).exp();
            let t = -(ln_sigma / b).exp_m1();
            let f = boundary.eval_near_one(s, sigma)?;
            let inv_f2 = 1.0 / f.abs_squared;
            let w = omega / b * (2.0 - s).powf(a) * inv_f2;
            if !w.is_finite() {
                return Err(Error::NonFinite(t));
            }
            raw_total += w;
            half.push(MeasureNode {
                t,
                s,
                weight: w,
                sigma,
                inv_f2,
            });
        }
        let z = 2.0 * raw_total;
        for node in &mut half {
            node.weight /= delta * z;
        }
        half.sort_by(|p, q| p.t.total_cmp(&q.t));
        Ok(Self {
            delta,
            atom_mass: 0.5 * (delta - 1.0) / delta,
            density_exponent: a,
            z,
            half,
            boundary,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// π₀, the mass of each atom at ±1.
    pub fn atom_mass(&self) -> f64 {
        self.atom_mass
    }

    /// (δ-3)/2.
    pub fn density_exponent(&self) -> f64 {
        self.density_exponent
    }

    /// ∫_{-1}^{1} (1-t²)^{(δ-3)/2} / |F(t)|² dt.
    pub fn normalization(&self) -> f64 {
        self.z
    }

    pub fn nodes_per_half(&self) -> usize {
        self.half.len()
    }

    pub fn half_nodes(&self) -> &[MeasureNode] {
        &self.half
    }

    pub fn boundary(&self) -> &BoundaryFunction {
        &self.boundary
    }

    pub fn continuous_mass(&self) -> f64 {
        2.0 * self.half.iter().map(|n| n.weight).sum::<f64>()
    }

    pub fn total_mass(&self) -> f64 {
        2.0 * self.atom_mass + self.continuous_mass()
    }

    /// Density of μ^c at t ∈ (-1, 1).
    pub fn density(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t.abs() >= 1.0 {
            return domain(format!("density is evaluated on (-1, 1), got {t}"));
        }
        let f = self.boundary.eval(t)?;
        Ok(((1.0 - t) * (1.0 + t)).powf(self.density_exponent)
            / (f.abs_squared * self.delta * self.z))
    }

    /// ∫ f dμ: atoms plus the continuous nodes and their mirrors.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
        let mut acc = self.atom_mass * (f(1.0) + f(-1.0));
        if !acc.is_finite() {
            return Err(Error::NonFinite(1.0));
        }
        for node in &self.half {
            let v = f(node.t) + f(-node.t);
            if !v.is_finite() {
                return Err(Error::NonFinite(node.t));
            }
            acc += node.weight * v;
        }
        Ok(acc)
    }

    /// Gram matrix ∫ Q_x Q_y dμ for x, y ≤ max_degree.
    pub fn gram(&self, max_degree: usize) -> Result<Vec<Vec<f64>>> {
        let fam = PolyFamily::Q { delta: self.delta };
        let m = max_degree + 1;
        let mut g = vec![vec![0.0; m]; m];
        // Q_y(±1) = (±1)^y
        for (x, row) in g.iter_mut().enumerate() {
            for (y, cell) in row.iter_mut().enumerate() {
                let sign = if (x + y) % 2 == 0 { 2.0 } else { 0.0 };
                *cell = self.atom_mass * sign;
            }
        }
        for node in &self.half {
            let q = fam.values(max_degree, node.t)?;
            for x in 0..m {
                for y in (x % 2..m).step_by(2) {
                    g[x][y] += 2.0 * node.weight * q[x] * q[y];
                }
            }
        }
        Ok(g)
    }

    /// Raw Karlin–McGregor value (π_y/π₀) ∫ t^n Q_x Q_y dμ.
    pub fn transition(&self, x: usize, y: usize, n: usize) -> Result<f64> {
        if (x + y + n) % 2 == 1 {
            return Ok(0.0);
        }
        let fam = PolyFamily::Q { delta: self.delta };
        let deg = x.max(y);
        let mut acc = 2.0 * self.atom_mass;
        for node in &self.half {
            let q = fam.values(deg, node.t)?;
            let tn = power(node, n);
            acc += 2.0 * node.weight * tn * q[x] * q[y];
        }
        Ok(pi_ratio(self.delta, y) * acc)
    }

    /// All of P_x(X_n = y) for y ≤ x + n in one pass over the nodes.
    pub fn transition_row(&self, x: usize, n: usize) -> Result<Vec<f64>> {
        let fam = PolyFamily::Q { delta: self.delta };
        let top = x + n;
        let mut acc = vec![0.0; top + 1];
        for (y, a) in acc.iter_mut().enumerate() {
            if (x + y + n).is_multiple_of(2) {
                *a = 2.0 * self.atom_mass;
            }
        }
        for node in &self.half {
            let q = fam.values(top, node.t)?;
            let tn = power(node, n);
            let c = 2.0 * node.weight * tn * q[x];
            for y in ((x + n) % 2..=top).step_by(2) {
                acc[y] += c * q[y];
            }
        }
        for (y, a) in acc.iter_mut().enumerate() {
            *a *= pi_ratio(self.delta, y);
        }
        Ok(acc)
    }
}

/// t^n at a node, through ln(1 - s) so that t close to 1 keeps precision.
fn power(node: &MeasureNode, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        (n as f64 * (-node.s).ln_1p()).exp()
    }
}

/// Builds μ for δ ∈ (1, 2) with `nodes` continuous nodes on each half.
pub fn build_measure(delta: f64, nodes: usize) -> Result<SpectralMeasure> {
    SpectralMeasure::new(delta, nodes)
}

/// A transition probability from the spectral formula. `raw` is what the
/// quadrature produced; `clipped` is clamped to [0, 1] for display.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub raw: f64,
    pub clipped: f64,
}

pub fn km_transition(delta: f64, x: usize, y: usize, n: usize, nodes: usize) -> Result<Transition> {
    let raw = build_measure(delta, nodes)?.transition(x, y, n)?;
    Ok(Transition {
        raw,
        clipped: raw.clamp(0.0, 1.0),
    })
}

/// Residuals of the checks linking μ to the measures of the dual and
/// associated families. Gram entries are reported as
/// max |G_xy| / √(G_xx G_yy) over x ≠ y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetteReport {
    pub delta: f64,
    pub max_degree: usize,
    pub nodes: usize,
    /// Q*¹ under (1-t²)^{(δ-1)/2}/|F|², normalised to mass 1.
    pub qstar1_offdiag: f64,
    /// Q¹ under the Gegenbauer weight (1-t²)^{(δ+1)/2}.
    pub q1_offdiag: f64,
    /// Q* under the Gegenbauer weight (1-t²)^{(δ-1)/2}.
    pub qstar_offdiag: f64,
    /// Largest |G_00 - 1| over the three normalised families.
    pub diag00: f64,
    /// (1/p₁)(1-t²) dμ/dt divided by dμ*¹/dt: relative spread over a grid.
    pub density_ratio_spread: f64,
    /// Mean of that ratio; 1 when both sides are normalised.
    pub density_ratio: f64,
    /// |∫ (1/p₁)(1-t²) dμ - 1|.
    pub star1_mass_error: f64,
}

impl DetteReport {
    pub fn worst(&self) -> f64 {
        [
            self.qstar1_offdiag,
            self.q1_offdiag,
            self.qstar_offdiag,
            self.diag00,
            self.density_ratio_spread,
            self.star1_mass_error,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Returns (largest normalised off-diagonal, |G_00 - 1|) of a Gram
/// matrix accumulated from (weight, values) pairs.
fn gram_offdiag<'a>(m: usize, samples: impl Iterator<Item = (f64, &'a [f64])>) -> (f64, f64) {
    let mut g = vec![vec![0.0; m]; m];
    for (w, q) in samples {
        for x in 0..m {
            for y in x..m {
                g[x][y] += w * q[x] * q[y];
            }
        }
    }
    let mut worst: f64 = 0.0;
    for x in 0..m {
        for y in x + 1..m {
            worst = worst.max(g[x][y].abs() / (g[x][x] * g[y][y]).sqrt());
        }
    }
    (worst, (g[0][0] - 1.0).abs())
}

pub fn dette_checks(delta: f64, max_degree: usize, nodes: usize) -> Result<DetteReport> {
    let mu = build_measure(delta, nodes)?;
    let m = max_degree + 1;

    // (i) μ*¹ from the same nodes, weight multiplied by (1-t²)
    let star1 = PolyFamily::QStar1 { delta };
    let mut vals = Vec::with_capacity(2 * mu.half.len());
    let mut z1 = 0.0;
    for node in &mu.half {
        let w = node.weight * node.s * (2.0 - node.s);
        z1 += 2.0 * w;
        vals.push((w, star1.values(max_degree, node.t)?));
        vals.push((w, star1.values(max_degree, -node.t)?));
    }
    let (qstar1_offdiag, d1) = gram_offdiag(m, vals.iter().map(|(w, q)| (w / z1, q.as_slice())));
    // z1 = ∫(1-t²) dμ, and p₁ = 1/(2+δ)
    let star1_mass_error = ((2.0 + delta) * z1 - 1.0).abs();

    // (ii), (iii) Gegenbauer weights via Gauss–Jacobi, normalised to mass 1
    let gj_nodes = nodes.max(m + 1);
    let gegen = |family: PolyFamily, a: f64| -> Result<(f64, f64)> {
        let rule = gauss_jacobi(a, gj_nodes)?;
        let mass = rule.weight_integral();
        let mut vals = Vec::with_capacity(rule.node_count());
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            vals.push((w / mass, family.values(max_degree, t)?));
        }
        Ok(gram_offdiag(
            m,
            vals.iter().map(|(w, q)| (*w, q.as_slice())),
        ))
    };
    let (q1_offdiag, d2) = gegen(PolyFamily::Q1 { delta }, 0.5 * (delta + 1.0))?;
    let (qstar_offdiag, d3) = gegen(PolyFamily::QStar { delta }, 0.5 * (delta - 1.0))?;

    // (iv) pointwise density ratio on 17 points of (-1, 1)
    let mut ratios = Vec::with_capacity(17);
    for k in 0..17 {
        let t = -0.8 + 0.1 * k as f64;
        let lhs = (2.0 + delta) * (1.0 - t * t) * mu.density(t)?;
        let f2 = mu.boundary.eval(t)?.abs_squared;
        let rhs = (1.0 - t * t).powf(0.5 * (delta - 1.0)) / (f2 * mu.z * z1 * delta);
        ratios.push(lhs / rhs);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });

    Ok(DetteReport {
        delta,
        max_degree,
        nodes,
        qstar1_offdiag,
        q1_offdiag,
        qstar_offdiag,
        diag00: d1.max(d2).max(d3),
        density_ratio_spread: (hi - lo) / mean,
        density_ratio: mean,
        star1_mass_error,
    })
}
