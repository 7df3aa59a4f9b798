//! Orthogonal polynomial families generated by three-term recursions.
//!
//! Every family is written as
//!
//! ```text
//! A_y t P_y(t) = B_y P_{y+1}(t) + C_y P_{y-1}(t),   P_{-1} = 0, P_0 = 1
//! ```
//!
//! and evaluated by forward recursion. `Q` is the random-walk family of the
//! walk, `QStar` the family of the dual walk (up and down swapped), and the
//! `…1` variants are the first associated families (index shifted by one).

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::specfun::{log_gamma_ratio, log_gamma_unchecked};

/// Default cap on the polynomial degree accepted by [`eval_family`].
pub const DEFAULT_DEGREE_CAP: usize = 200;

/// Any |value| above this aborts the recursion with [`Error::Overflow`].
pub const OVERFLOW_GUARD: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolyFamily {
    /// (2y+δ) t Q_y = y Q_{y+1} + (y+δ) Q_{y-1}, Q_1 = t.
    Q { delta: f64 },
    /// (2y+2+δ) t Q¹_y = (y+1) Q¹_{y+1} + (y+1+δ) Q¹_{y-1}.
    Q1 { delta: f64 },
    /// (2y+δ) t Q*_y = (y+δ) Q*_{y+1} + y Q*_{y-1}.
    QStar { delta: f64 },
    /// (2y+2+δ) t Q*¹_y = (y+1+δ) Q*¹_{y+1} + (y+1) Q*¹_{y-1}.
    QStar1 { delta: f64 },
    /// (2y+2λ) t G_y = (y+1) G_{y+1} + (y-1+2λ) G_{y-1}.
    Gegenbauer { lambda: f64 },
    /// First associated Gegenbauer family,
    /// (2y+2+2λ) t G_y = (y+2) G_{y+1} + (y+2λ) G_{y-1}.
    GegenbauerAssociated { lambda: f64 },
}

impl PolyFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PolyFamily::Q { .. } => "Q",
            PolyFamily::Q1 { .. } => "Q1",
            PolyFamily::QStar { .. } => "QStar",
            PolyFamily::QStar1 { .. } => "QStar1",
            PolyFamily::Gegenbauer { .. } => "Gegenbauer",
            PolyFamily::GegenbauerAssociated { .. } => "GegenbauerAssociated",
        }
    }

    fn parameter(&self) -> f64 {
        match *self {
            PolyFamily::Q { delta }
            | PolyFamily::Q1 { delta }
            | PolyFamily::QStar { delta }
            | PolyFamily::QStar1 { delta } => delta,
            PolyFamily::Gegenbauer { lambda } | PolyFamily::GegenbauerAssociated { lambda } => {
                lambda
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.parameter();
        if !p.is_finite() || p <= 0.0 {
            return domain(format!(
                "{} needs a positive parameter, got {p}",
                self.name()
            ));
        }
        Ok(())
    }

    /// Coefficients (A_y, B_y, C_y) of the recursion at index y.
    pub fn coefficients(&self, y: usize) -> (f64, f64, f64) {
        let y = y as f64;
        match *self {
            PolyFamily::Q { delta: d } => (2.0 * y + d, y, y + d),
            PolyFamily::Q1 { delta: d } => (2.0 * y + 2.0 + d, y + 1.0, y + 1.0 + d),
            PolyFamily::QStar { delta: d } => (2.0 * y + d, y + d, y),
            PolyFamily::QStar1 { delta: d } => (2.0 * y + 2.0 + d, y + 1.0 + d, y + 1.0),
            PolyFamily::Gegenbauer { lambda: l } => (2.0 * y + 2.0 * l, y + 1.0, y - 1.0 + 2.0 * l),
            PolyFamily::GegenbauerAssociated { lambda: l } => {
                (2.0 * y + 2.0 + 2.0 * l, y + 2.0, y + 2.0 * l)
            }
        }
    }

    fn degree_one(&self, t: f64) -> f64 {
        match self {
            // B_0 = 0 for Q: the wall makes the y = 0 row degenerate
            PolyFamily::Q { .. } => t,
            _ => {
                let (a, b, _) = self.coefficients(0);
                a * t / b
            }
        }
    }

    /// Values P_0(t), …, P_max(t) without the degree cap or |t| check.
    pub(crate) fn values(&self, max_degree: usize, t: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(max_degree + 1);
        out.push(1.0);
        if max_degree == 0 {
            return Ok(out);
        }
        out.push(self.degree_one(t));
        for y in 1..max_degree {
            let (a, b, c) = self.coefficients(y);
            let next = (a * t * out[y] - c * out[y - 1]) / b;
            if next.is_nan() || next.abs() > OVERFLOW_GUARD {
                return Err(Error::Overflow {
                    degree: y + 1,
                    limit: OVERFLOW_GUARD,
                });
            }
            out.push(next);
        }
        Ok(out)
    }
}

fn check_args(max_degree: usize, t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("polynomials are evaluated on [-1, 1], got t = {t}"));
    }
    if max_degree > DEFAULT_DEGREE_CAP {
        return Err(Error::Resource {
            what: "polynomial degree",
            requested: max_degree,
            cap: DEFAULT_DEGREE_CAP,
        });
    }
    Ok(())
}

/// Degrees 0..=max_degree of `family` at `t`.
pub fn eval_family(family: PolyFamily, max_degree: usize, t: f64) -> Result<Vec<f64>> {
    family.validate()?;
    check_args(max_degree, t)?;
    family.values(max_degree, t)
}

/// Gegenbauer polynomials G^λ_0..G^λ_max at `t`.
pub fn gegenbauer(lambda: f64, max_degree: usize, t: f64) -> Result<Vec<f64>> {
    eval_family(PolyFamily::Gegenbauer { lambda }, max_degree, t)
}

/// ln(y! Γ(δ) / Γ(y+δ)).
fn log_star_scale(delta: f64, y: usize) -> f64 {
    log_gamma_unchecked(delta) - log_gamma_ratio(y as f64 + 1.0, delta - 1.0)
}

/// Scale linking Q* to G^{δ/2}: Q*_y = y! Γ(δ)/Γ(y+δ) · G^{δ/2}_y.
pub fn qstar_scale(delta: f64, y: usize) -> f64 {
    log_star_scale(delta, y).exp()
}

/// Scale linking Q*¹ to the associated G^{δ/2,1}:
/// Q*¹_y = (y+1)! Γ(δ+1)/Γ(y+1+δ) · G^{δ/2,1}_y.
pub fn qstar1_scale(delta: f64, y: usize) -> f64 {
    (log_gamma_unchecked(delta + 1.0) - log_gamma_ratio(y as f64 + 2.0, delta - 1.0)).exp()
}

/// Largest residual of each Gegenbauer identification over a grid of t,
/// measured as |lhs - rhs| / max(1, |lhs|).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// Q¹_y = G^{δ/2+1}_y
    pub q1: f64,
    /// Q*_y = y! Γ(δ)/Γ(y+δ) G^{δ/2}_y
    pub qstar: f64,
    /// Q*¹_y = (y+1)! Γ(δ+1)/Γ(y+1+δ) G^{δ/2,1}_y
    pub qstar1: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.q1.max(self.qstar).max(self.qstar1)
    }
}

fn rel_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(1.0)
}

pub fn identity_residuals(
    delta: f64,
    max_degree: usize,
    t_grid: &[f64],
) -> Result<IdentityResiduals> {
    if !(delta > 1.0 && delta < 2.0) {
        return domain(format!("identity check needs δ in (1, 2), got {delta}"));
    }
    let half = 0.5 * delta;
    let mut res = IdentityResiduals {
        q1: 0.0,
        qstar: 0.0,
        qstar1: 0.0,
    };
    for &t in t_grid {
        let q1 = eval_family(PolyFamily::Q1 { delta }, max_degree, t)?;
        let g1 = gegenbauer(half + 1.0, max_degree, t)?;
        let qs = eval_family(PolyFamily::QStar { delta }, max_degree, t)?;
        let g = gegenbauer(half, max_degree, t)?;
        let qs1 = eval_family(PolyFamily::QStar1 { delta }, max_degree, t)?;
        let ga = eval_family(
            PolyFamily::GegenbauerAssociated { lambda: half },
            max_degree,
            t,
        )?;
        for y in 0..=max_degree {
            res.q1 = res.q1.max(rel_gap(q1[y], g1[y]));
            res.qstar = res.qstar.max(rel_gap(qs[y], qstar_scale(delta, y) * g[y]));
            res.qstar1 = res
                .qstar1
                .max(rel_gap(qs1[y], qstar1_scale(delta, y) * ga[y]));
        }
    }
    Ok(res)
}
