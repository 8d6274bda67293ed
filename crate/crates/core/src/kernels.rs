//! Real Gamma function and Gauss hypergeometric 2F1 on [0, 1).
//!
//! Gamma uses a Lanczos approximation (g = 7, nine coefficients) with the
//! reflection formula below x = 1/2. The hypergeometric series is summed
//! directly for small arguments and through the linear transformation to
//! argument 1 - w otherwise.

use crate::error::{Error, Result};
use crate::scalar::{is_nonpositive_integer, nearest_integer, sin_pi, Real};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument for which Γ(x) is finite in `f64`.
const GAMMA_OVERFLOW_F64: f64 = 171.624_376_956_302_7;

/// Iteration cap for every hypergeometric series.
pub const HYP_MAX_TERMS: usize = 5000;

/// Distance of c - a - b from an integer below which the degenerate
/// (logarithmic) case of the linear transformation is entered.
pub const HYP_DEGENERATE_WINDOW: f64 = 1e-6;

/// Offset applied to c in the degenerate case; the result is Richardson
/// extrapolated from offsets ±δ and ±δ/2.
pub const HYP_DEGENERATE_OFFSET: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalStatus {
    Ok,
    Pole,
    Overflow,
    NotConverged,
    OutOfDomain,
}

/// Scalar result tagged with how the evaluation went.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarEval<T> {
    pub value: T,
    pub status: EvalStatus,
}

impl<T: Real> ScalarEval<T> {
    fn ok(value: T) -> Self {
        Self {
            value,
            status: EvalStatus::Ok,
        }
    }

    fn with(value: T, status: EvalStatus) -> Self {
        Self { value, status }
    }

    pub fn is_ok(&self) -> bool {
        self.status == EvalStatus::Ok
    }

    /// Converts into a `Result`, attaching `context` to the error.
    pub fn into_result(self, context: &str) -> Result<T> {
        match self.status {
            EvalStatus::Ok => Ok(self.value),
            EvalStatus::Pole => Err(Error::pole(context.to_string())),
            EvalStatus::Overflow => Err(Error::Overflow(context.to_string())),
            EvalStatus::NotConverged => Err(Error::NotConverged {
                what: "hypergeometric series",
                estimate: self.value.as_f64(),
                residual: f64::NAN,
            }),
            EvalStatus::OutOfDomain => Err(Error::domain(context.to_string())),
        }
    }
}

fn lanczos_sum<T: Real>(xm1: T) -> T {
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (xm1 + T::from_count(i));
    }
    acc
}

/// Γ(x) for x ≥ 1/2 (no range checks).
fn gamma_lanczos<T: Real>(x: T) -> T {
    let xm1 = x - T::one();
    let t = xm1 + T::lit(LANCZOS_G + 0.5);
    let half_pow = t.powf((xm1 + T::lit(0.5)) * T::lit(0.5));
    // split the power so the intermediate stays finite close to the overflow threshold
    (T::lit(2.0) * T::PI()).sqrt() * (half_pow * (-t).exp()) * half_pow * lanczos_sum(xm1)
}

/// ln Γ(x) for x ≥ 1/2.
fn ln_gamma_lanczos<T: Real>(x: T) -> T {
    let xm1 = x - T::one();
    let t = xm1 + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() + (xm1 + T::lit(0.5)) * t.ln() - t
        + lanczos_sum(xm1).ln()
}

fn overflow_threshold<T: Real>() -> T {
    // ln(max) ~ (x - 1/2) ln x - x; solve coarsely for the float type in use
    if T::max_value().as_f64() > 1e300 {
        T::lit(GAMMA_OVERFLOW_F64)
    } else {
        T::lit(35.04)
    }
}

/// Real Gamma function.
///
/// Poles at the nonpositive integers report `EvalStatus::Pole`; arguments
/// beyond the representable range report `EvalStatus::Overflow`.
pub fn gamma_real<T: Real>(x: T) -> ScalarEval<T> {
    if x.is_nan() {
        return ScalarEval::with(x, EvalStatus::OutOfDomain);
    }
    if is_nonpositive_integer(x) {
        return ScalarEval::with(T::infinity(), EvalStatus::Pole);
    }
    if x > overflow_threshold() {
        return ScalarEval::with(T::infinity(), EvalStatus::Overflow);
    }
    if x < T::lit(0.5) {
        // Γ(x)Γ(1-x) = π / sin(πx)
        let g = gamma_lanczos(T::one() - x);
        return ScalarEval::ok(T::PI() / (sin_pi(x) * g));
    }
    ScalarEval::ok(gamma_lanczos(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma_pos<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain(format!("ln_gamma_pos requires x > 0, got {x}")));
    }
    if x < T::lit(0.5) {
        return Ok(ln_gamma_lanczos(x + T::one()) - x.ln());
    }
    Ok(ln_gamma_lanczos(x))
}

/// (ln |Γ(x)|, sign Γ(x)) for any real x off the poles.
pub fn ln_gamma_abs<T: Real>(x: T) -> Result<(T, T)> {
    if is_nonpositive_integer(x) {
        return Err(Error::pole(format!("Gamma pole at {x}")));
    }
    if x > T::zero() {
        return Ok((ln_gamma_pos(x)?, T::one()));
    }
    let s = sin_pi(x);
    let lg = ln_gamma_pos(T::one() - x)?;
    Ok((T::PI().ln() - s.abs().ln() - lg, s.signum()))
}

/// 1/Γ(x); entire, so poles of Γ map to exact zeros.
pub fn rgamma<T: Real>(x: T) -> T {
    if is_nonpositive_integer(x) {
        return T::zero();
    }
    let g = gamma_real(x);
    if g.is_ok() && g.value.is_finite() && g.value != T::zero() {
        return g.value.recip();
    }
    match ln_gamma_abs(x) {
        Ok((lg, s)) => s * (-lg).exp(),
        Err(_) => T::zero(),
    }
}

/// Π Γ(num_i) / Π Γ(den_j).
///
/// Denominator poles give zero; numerator poles are an error.
pub fn gamma_ratio<T: Real>(num: &[T], den: &[T]) -> Result<T> {
    if let Some(p) = num.iter().find(|&&v| is_nonpositive_integer(v)) {
        return Err(Error::pole(format!("Gamma pole at {p}")));
    }
    if den.iter().any(|&v| is_nonpositive_integer(v)) {
        return Ok(T::zero());
    }
    let small = T::lit(40.0);
    if num.iter().chain(den).all(|v| v.abs() < small) {
        let mut acc = T::one();
        for &v in num {
            acc *= gamma_real(v).value;
        }
        for &v in den {
            acc *= rgamma(v);
        }
        if acc.is_finite() {
            return Ok(acc);
        }
    }
    let mut log = T::zero();
    let mut sign = T::one();
    for &v in num {
        let (l, s) = ln_gamma_abs(v)?;
        log += l;
        sign *= s;
    }
    for &v in den {
        let (l, s) = ln_gamma_abs(v)?;
        log -= l;
        sign *= s;
    }
    Ok(sign * log.exp())
}

/// Outcome of a direct hypergeometric summation.
#[derive(Debug, Clone, Copy)]
struct SeriesSum<T> {
    sum: T,
    abs_sum: T,
    converged: bool,
}

/// Direct summation of Σ (a)_k (b)_k / ((c)_k k!) w^k.
///
/// Caller guarantees c is not a nonpositive integer reached before termination.
fn series<T: Real>(a: T, b: T, c: T, w: T) -> SeriesSum<T> {
    let crit = T::epsilon() * T::lit(0.05);
    let mut term = T::one();
    let mut sum = T::one();
    let mut abs_sum = T::one();
    let mut quiet = 0;
    for k in 0..HYP_MAX_TERMS {
        let kf = T::from_count(k);
        term = term * (a + kf) * (b + kf) / ((c + kf) * (kf + T::one())) * w;
        if term == T::zero() {
            return SeriesSum {
                sum,
                abs_sum,
                converged: true,
            };
        }
        sum += term;
        abs_sum += term.abs();
        if !sum.is_finite() {
            break;
        }
        if term.abs() <= crit * sum.abs() {
            quiet += 1;
            if quiet >= 3 {
                return SeriesSum {
                    sum,
                    abs_sum,
                    converged: true,
                };
            }
        } else {
            quiet = 0;
        }
    }
    SeriesSum {
        sum,
        abs_sum,
        converged: false,
    }
}

fn terminating_degree<T: Real>(a: T, b: T) -> Option<usize> {
    [a, b]
        .iter()
        .filter(|&&v| is_nonpositive_integer(v))
        .map(|v| (-*v).as_f64() as usize)
        .min()
}

/// Σ|terms| / |Σ terms| of the direct series: how much rounding is
/// amplified when the series route is taken.
pub(crate) fn series_amplification<T: Real>(a: T, b: T, c: T, w: T) -> T {
    if is_nonpositive_integer(c) {
        return T::one();
    }
    let s = series(a, b, c, w);
    if s.sum == T::zero() {
        T::infinity()
    } else {
        s.abs_sum / s.sum.abs()
    }
}

/// Which route `hyp2f1_nonreg` ended up taking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum HypRoute {
    Series,
    Transform,
    DegenerateTransform,
}

/// 2F1(a, b; c; w) for w ∈ [0, 1), c not a nonpositive integer (unless the
/// series terminates first).
pub(crate) fn hyp2f1_nonreg<T: Real>(a: T, b: T, c: T, w: T) -> Result<(T, HypRoute)> {
    if w == T::zero() {
        return Ok((T::one(), HypRoute::Series));
    }
    let term_deg = terminating_degree(a, b);
    if is_nonpositive_integer(c) {
        let m = (-c).as_f64() as usize;
        if term_deg.is_none_or(|d| d > m) {
            return Err(Error::pole(format!("2F1 with c = {c} at a nonpositive integer")));
        }
    }
    if let Some(d) = term_deg {
        if d <= 60 || w <= T::lit(0.5) {
            let s = series(a, b, c, w);
            return Ok((s.sum, HypRoute::Series));
        }
    }
    if w <= T::lit(0.5) {
        let s = series(a, b, c, w);
        return if s.converged {
            Ok((s.sum, HypRoute::Series))
        } else {
            Err(Error::NotConverged {
                what: "hypergeometric series",
                estimate: s.sum.as_f64(),
                residual: f64::NAN,
            })
        };
    }
    if w <= T::lit(0.9) {
        // accepted only when the terms do not cancel by more than three digits
        let s = series(a, b, c, w);
        if s.converged && s.sum != T::zero() && s.abs_sum <= T::lit(1e3) * s.sum.abs() {
            return Ok((s.sum, HypRoute::Series));
        }
    }
    let excess = c - a - b;
    let (_, dist) = nearest_integer(excess);
    if dist < T::lit(HYP_DEGENERATE_WINDOW) {
        let d = T::lit(HYP_DEGENERATE_OFFSET);
        let sym = |h: T| -> Result<T> {
            Ok((transform(a, b, c + h, w)? + transform(a, b, c - h, w)?) * T::lit(0.5))
        };
        let coarse = sym(d)?;
        let fine = sym(d * T::lit(0.5))?;
        return Ok((
            (T::lit(4.0) * fine - coarse) / T::lit(3.0),
            HypRoute::DegenerateTransform,
        ));
    }
    Ok((transform(a, b, c, w)?, HypRoute::Transform))
}

/// Linear transformation w -> 1 - w (non-degenerate case).
fn transform<T: Real>(a: T, b: T, c: T, w: T) -> Result<T> {
    let v = T::one() - w;
    let s = c - a - b;
    let k1 = gamma_ratio(&[c], &[c - a, c - b, T::one() - s])?;
    let k2 = gamma_ratio(&[c], &[a, b, T::one() + s])?;
    let mut acc = T::zero();
    if k1 != T::zero() {
        let f1 = series(a, b, T::one() - s, v);
        if !f1.converged {
            return Err(not_converged(f1.sum));
        }
        acc += k1 * f1.sum;
    }
    if k2 != T::zero() {
        let f2 = series(c - a, c - b, T::one() + s, v);
        if !f2.converged {
            return Err(not_converged(f2.sum));
        }
        acc -= k2 * v.powf(s) * f2.sum;
    }
    Ok(T::PI() / sin_pi(s) * acc)
}

fn not_converged<T: Real>(estimate: T) -> Error {
    Error::NotConverged {
        what: "hypergeometric series",
        estimate: estimate.as_f64(),
        residual: f64::NAN,
    }
}

/// Regularized 2F1(a, b; c; w) / Γ(c); finite for every c.
pub(crate) fn hyp2f1_reg<T: Real>(a: T, b: T, c: T, w: T) -> Result<(T, HypRoute)> {
    if is_nonpositive_integer(c) {
        // F/Γ(c) at c = -m equals (a)_{m+1}(b)_{m+1}/(m+1)! w^{m+1} 2F1(a+m+1, b+m+1; m+2; w)
        let m = (-c).as_f64() as usize;
        let mut coef = T::one();
        for k in 0..=m {
            let kf = T::from_count(k);
            coef = coef * (a + kf) * (b + kf) / (kf + T::one()) * w;
        }
        if coef == T::zero() {
            return Ok((T::zero(), HypRoute::Series));
        }
        let shift = T::from_count(m + 1);
        let (f, route) = hyp2f1_nonreg(a + shift, b + shift, shift + T::one(), w)?;
        return Ok((coef * f, route));
    }
    let (f, route) = hyp2f1_nonreg(a, b, c, w)?;
    Ok((f * rgamma(c), route))
}

/// Gauss hypergeometric function 2F1(a, b; c; w) for real parameters and
/// w ∈ [0, 1).
pub fn hyp2f1_real<T: Real>(a: T, b: T, c: T, w: T) -> ScalarEval<T> {
    if !(w >= T::zero() && w < T::one()) {
        return ScalarEval::with(T::nan(), EvalStatus::OutOfDomain);
    }
    match hyp2f1_nonreg(a, b, c, w) {
        Ok((v, _)) if v.is_finite() => ScalarEval::ok(v),
        Ok((v, _)) => ScalarEval::with(v, EvalStatus::Overflow),
        Err(Error::Pole(_)) => ScalarEval::with(T::infinity(), EvalStatus::Pole),
        Err(Error::NotConverged { estimate, .. }) => {
            ScalarEval::with(T::lit(estimate), EvalStatus::NotConverged)
        }
        Err(_) => ScalarEval::with(T::nan(), EvalStatus::NotConverged),
    }
}
