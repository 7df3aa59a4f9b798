//! Numerical toolkit for a nearest-neighbour random walk on the nonnegative
//! integers whose drift toward the reflecting site 0 decays like δ/(2y):
//!
//! ```text
//! P(X_{n+1} = y + 1 | X_n = y) = y / (2y + δ),    y ≥ 1
//! P(X_{n+1} = y - 1 | X_n = y) = (y + δ) / (2y + δ)
//! X_{n+1} = 1 whenever X_n = 0
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: log-gamma, gamma, Gauss ₂F₁ and the boundary function F(t).
//! * [`walk`]: kernel, stationary measure, exact distribution evolution and
//!   a seeded Monte Carlo simulator.
//! * [`polys`]: random-walk polynomials, their dual/associated families and
//!   Gegenbauer polynomials.
//! * [`measure`]: quadrature rules, the explicit spectral measure and the
//!   Karlin–McGregor transition formula.
//! * [`genfun`]: the Φ/Ψ generating functions and g_e, g_o.
//! * [`asymptotics`]: the amplitude K_δ and measured power laws.
//! * [`verify`]: the cross-check suite behind `wallwalk verify-all`.

pub mod asymptotics;
pub mod error;
pub mod genfun;
pub mod measure;
pub mod polys;
pub mod specfun;
pub mod verify;
pub mod walk;

pub(crate) mod fit;

pub use asymptotics::{
    check_gen_asymptotics, check_moment_asymptotics, k_delta, AsymptoticReport, GenAsymptoticReport,
};
pub use error::{Error, Result};
pub use genfun::{generating_functions, h_series, ode_residual, phi_closed, GenFunPoint, PhiValue};
pub use measure::{
    build_measure, dette_checks, gauss_jacobi, km_transition, QuadratureRule, SpectralMeasure,
};
pub use polys::{eval_family, gegenbauer, identity_residuals, PolyFamily};
pub use specfun::{boundary_f, gamma, hyp2f1, log_gamma, BoundaryFunctionValue, Hyp2F1Params};
pub use walk::{
    drift, evolve, expected_position, simulate, stationary, step_probs, Distribution,
    StationaryMeasure, WalkParams,
};
