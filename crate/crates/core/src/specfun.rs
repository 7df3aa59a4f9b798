//! Real special functions: log-gamma, gamma, the Gauss hypergeometric
//! function on `[0, 1]` and the boundary function `F(t)` whose modulus
//! shapes the continuous part of the spectral measure.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Lanczos coefficients for g = 607/128, 14 terms plus the constant.
/// Kept at the published digits even where f64 rounds them.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Series stop after this many terms with a non-convergence error.
pub const SERIES_CAP: usize = 10_000;
/// A series has converged once |term / partial sum| stays below this
/// threshold for [`SERIES_QUIET_TERMS`] consecutive terms.
pub const SERIES_TOL: f64 = 1e-16;
pub const SERIES_QUIET_TERMS: usize = 3;

const FACTORIALS: [f64; 21] = {
    let mut f = [1.0; 21];
    let mut i = 1;
    while i < 21 {
        f[i] = f[i - 1] * i as f64;
        i += 1;
    }
    f
};

/// Natural logarithm of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || !x.is_finite() {
        return domain(format!("log_gamma requires x > 0, got {x}"));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    Ok(log_gamma_unchecked(x))
}

#[inline]
pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut denom = x;
    let mut ser = LANCZOS_C0;
    for c in LANCZOS_COEF {
        denom += 1.0;
        ser += c / denom;
    }
    tmp + (SQRT_2PI * ser / x).ln()
}

/// ln Γ(x+c) - ln Γ(x) for x > 0, c ≥ 0, without the cancellation of
/// subtracting two large log-gamma values.
pub(crate) fn log_gamma_ratio(x: f64, c: f64) -> f64 {
    // below this both terms are O(10) and the plain difference is exact enough
    const STIRLING_FROM: f64 = 10.0;
    if x < STIRLING_FROM {
        return log_gamma_unchecked(x + c) - log_gamma_unchecked(x);
    }
    // Stirling: (z-1/2) ln z - z + Σ B_2k / (2k(2k-1) z^{2k-1})
    let main = (x - 0.5) * (c / x).ln_1p() + c * (x + c).ln() - c;
    let series = |z: f64| {
        let z2 = z * z;
        (1.0 / 12.0
            - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * z2)) / z2) / z2) / z2)
            / z
    };
    main + series(x + c) - series(x)
}

/// sin(πx) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ(x) for any real x that is not a nonpositive integer. Negative
/// arguments go through the reflection formula.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("gamma requires a finite argument, got {x}"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        if x == x.round() && x <= 21.0 {
            return Ok(FACTORIALS[x as usize - 1]);
        }
        if x > 171.7 {
            return Ok(f64::INFINITY);
        }
        return Ok(log_gamma_unchecked(x).exp());
    }
    // Γ(x) Γ(1 - x) = π / sin(πx)
    let g = gamma(1.0 - x)?;
    Ok(PI / (sin_pi(x) * g))
}

/// 1/Γ(x), zero at the poles.
pub(crate) fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        // gamma only fails at poles, handled above
        1.0 / gamma(x).unwrap_or(f64::INFINITY)
    }
}

/// Parameters of ₂F₁(a, b; c; x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
}

impl Hyp2F1Params {
    pub fn new(a: f64, b: f64, c: f64, x: f64) -> Self {
        Self { a, b, c, x }
    }
}

/// Plain Gauss series, used for |x| ≤ 1/2.
pub(crate) fn hyp2f1_series(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut quiet = 0;
    for k in 0..SERIES_CAP {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs() {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "hypergeometric series",
        iterations: SERIES_CAP,
    })
}

/// Coefficients of the 1 − x connection formula
///
/// ```text
/// ₂F₁(a,b;c;x) = A ₂F₁(a,b;1-s;1-x) + B (1-x)^s ₂F₁(c-a,c-b;1+s;1-x),  s = c-a-b
/// ```
fn connection_coefficients(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let s = c - a - b;
    if s == s.round() {
        return domain(format!(
            "c - a - b = {s} is an integer; the 1-x transformation is degenerate"
        ));
    }
    let gc = gamma(c)?;
    let big_a = gc * gamma(s)? * recip_gamma(c - a) * recip_gamma(c - b);
    let big_b = gc * gamma(-s)? * recip_gamma(a) * recip_gamma(b);
    Ok((big_a, big_b))
}

/// Gauss hypergeometric function ₂F₁(a, b; c; x) for x ∈ [0, 1].
///
/// The series is summed directly for x ≤ 1/2. Above that the argument is
/// mapped to 1 − x, which requires c − a − b to be a non-integer. At x = 1
/// the Gauss summation theorem is used and needs c − a − b > 0.
pub fn hyp2f1(p: Hyp2F1Params) -> Result<f64> {
    let Hyp2F1Params { a, b, c, x } = p;
    if !(a.is_finite() && b.is_finite() && c.is_finite() && x.is_finite()) {
        return domain("hyp2f1 parameters must be finite");
    }
    if is_nonpositive_integer(c) {
        return domain(format!("c = {c} is a nonpositive integer"));
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("hyp2f1 is implemented for x in [0, 1], got {x}"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x <= 0.5 {
        return hyp2f1_series(a, b, c, x);
    }
    let s = c - a - b;
    if x == 1.0 {
        if s <= 0.0 {
            return domain(format!("₂F₁ at x = 1 needs c - a - b > 0, got {s}"));
        }
        return Ok(gamma(c)? * gamma(s)? * recip_gamma(c - a) * recip_gamma(c - b));
    }
    let (big_a, big_b) = connection_coefficients(a, b, c)?;
    let y = 1.0 - x;
    let first = hyp2f1_series(a, b, 1.0 - s, y)?;
    let second = if big_b == 0.0 {
        0.0
    } else {
        big_b * y.powf(s) * hyp2f1_series(c - a, c - b, 1.0 + s, y)?
    };
    Ok(big_a * first + second)
}

/// Complex value of F(t) together with |F(t)|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryFunctionValue {
    pub re: f64,
    pub im: f64,
    pub abs_squared: f64,
}

impl BoundaryFunctionValue {
    fn new(re: f64, im: f64) -> Self {
        Self {
            re,
            im,
            abs_squared: re * re + im * im,
        }
    }
}

/// The boundary function
///
/// ```text
/// F(t) = ₂F₁(1, 1-δ; (3-δ)/2; (1+t)/2) + K e^{iπ(δ-1)/2} ((1-t²)/4)^{(δ-1)/2}
/// K    = Γ(δ) Γ((1-δ)/2) / Γ((δ-1)/2)
/// ```
///
/// with every δ-dependent constant computed once. Near t = 1 the function
/// is evaluated from `s = 1 - t` and `σ = s^{(δ-1)/2}` so that nodes
/// arbitrarily close to the endpoint keep full relative precision.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    delta: f64,
    /// (δ-1)/2, which is also c - a - b for the ₂F₁ above.
    half_excess: f64,
    k: f64,
    cos_phase: f64,
    sin_phase: f64,
    conn_a: f64,
    conn_b: f64,
}

impl BoundaryFunction {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 1.0 && delta < 2.0) {
            return domain(format!("boundary function needs δ in (1, 2), got {delta}"));
        }
        let half_excess = 0.5 * (delta - 1.0);
        let k = gamma(delta)? * gamma(-half_excess)? / gamma(half_excess)?;
        let (conn_a, conn_b) = connection_coefficients(1.0, 1.0 - delta, 0.5 * (3.0 - delta))?;
        Ok(Self {
            delta,
            half_excess,
            k,
            cos_phase: (PI * half_excess).cos(),
            sin_phase: (PI * half_excess).sin(),
            conn_a,
            conn_b,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The constant K = Γ(δ) Γ((1-δ)/2) / Γ((δ-1)/2).
    pub fn k(&self) -> f64 {
        self.k
    }

    /// F(t) for t ∈ [-1, 1].
    pub fn eval(&self, t: f64) -> Result<BoundaryFunctionValue> {
        if !(-1.0..=1.0).contains(&t) {
            return domain(format!("boundary function needs |t| ≤ 1, got {t}"));
        }
        if t > 0.0 {
            let s = 1.0 - t;
            return self.eval_near_one(s, s.powf(self.half_excess));
        }
        let b = self.half_excess;
        let delta = self.delta;
        let x = 0.5 * (1.0 + t);
        let h = hyp2f1_series(1.0, 1.0 - delta, 0.5 * (3.0 - delta), x)?;
        let m = ((1.0 - t) * (1.0 + t) / 4.0).powf(b);
        Ok(BoundaryFunctionValue::new(
            h + self.k * self.cos_phase * m,
            self.k * self.sin_phase * m,
        ))
    }

    /// F(1 - s) for s ∈ [0, 1], given `sigma = s^{(δ-1)/2}` computed by the
    /// caller. `s` may underflow to zero while `sigma` stays representable.
    pub fn eval_near_one(&self, s: f64, sigma: f64) -> Result<BoundaryFunctionValue> {
        let b = self.half_excess;
        let delta = self.delta;
        let y = 0.5 * s;
        let (a1, b1, c1) = (1.0, 1.0 - delta, 0.5 * (3.0 - delta));
        // (s/2)^b = σ 2^{-b};  ((1-t²)/4)^b = σ ((2-s)/4)^b
        let regular = self.conn_a * hyp2f1_series(a1, b1, 1.0 - b, y)?;
        let singular =
            self.conn_b * sigma * 2f64.powf(-b) * hyp2f1_series(c1 - a1, c1 - b1, 1.0 + b, y)?;
        let m = sigma * (0.25 * (2.0 - s)).powf(b);
        Ok(BoundaryFunctionValue::new(
            regular + singular + self.k * self.cos_phase * m,
            self.k * self.sin_phase * m,
        ))
    }
}

/// F(t) for δ ∈ (1, 2) and t ∈ [-1, 1].
pub fn boundary_f(delta: f64, t: f64) -> Result<BoundaryFunctionValue> {
    BoundaryFunction::new(delta)?.eval(t)
}
