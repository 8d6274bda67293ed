//! Ferrers functions P_ν^μ(x), Q_ν^μ(x) on the cut -1 < x < 1, the
//! phase-removed second-kind function e^{-iπμ}𝔔_ν^μ(z) for real z > 1, and
//! the boundary values of 𝔔 on the cut.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{gamma_ratio, hyp2f1_reg, ln_gamma_abs, series_amplification, HypRoute};
use crate::scalar::{cos_pi, nearest_integer, sin_pi, Real};

/// Integer-order offset used by [`ferrers_q`].
pub const INTEGER_MU_OFFSET: f64 = 1e-4;

/// Orders closer than this to an integer take the offset route.
pub const INTEGER_MU_WINDOW: f64 = 1e-6;

/// Relative Richardson residual above which the offset route gives up.
pub const OFFSET_RESIDUAL_LIMIT: f64 = 1e-6;

const OFFSET_ACCURACY: f64 = 1e-9;

/// Degree and order as they appear in the identities: ν = n+λ-1/2, μ = κ-λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutOrderDegree<T> {
    pub nu: T,
    pub mu: T,
}

impl<T: Real> CutOrderDegree<T> {
    pub fn new(nu: T, mu: T) -> Self {
        Self { nu, mu }
    }

    pub fn from_params(n: usize, lambda: T, kappa: T) -> Self {
        Self {
            nu: T::from_count(n) + lambda - T::lit(0.5),
            mu: kappa - lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FerrersMethod {
    #[serde(rename = "direct-2f1")]
    Direct2f1,
    #[serde(rename = "combination")]
    Combination,
    #[serde(rename = "integer-mu-offset")]
    IntegerMuOffset,
}

/// A Ferrers function value with the route taken and a relative accuracy
/// estimate (infinite outside the supported parameter box).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FerrersValue<T> {
    pub value: T,
    pub method: FerrersMethod,
    pub est_accuracy: T,
}

/// Box inside which the accuracy estimates are meaningful.
pub fn in_supported_box<T: Real>(nu: T, mu: T, x: T) -> bool {
    nu > T::lit(-0.6)
        && nu < T::lit(35.0)
        && mu > T::lit(-35.0)
        && mu < T::one()
        && x.abs() < T::lit(0.999)
}

fn check_x<T: Real>(x: T) -> Result<()> {
    if !(x > -T::one() && x < T::one()) {
        return Err(Error::domain("x must lie in (-1, 1)"));
    }
    Ok(())
}

fn accuracy<T: Real>(nu: T, mu: T, x: T, amplification: T) -> T {
    if !in_supported_box(nu, mu, x) {
        return T::infinity();
    }
    T::epsilon() * T::lit(64.0) * amplification.max(T::one())
}

/// P from the hypergeometric representation, plus its rounding
/// amplification factor.
fn p_direct<T: Real>(nu: T, mu: T, x: T) -> Result<(T, T)> {
    let one = T::one();
    let half = T::lit(0.5);
    let w = (one - x) * half;
    let (a, b, c) = (-nu, nu + one, one - mu);
    let (f, route) = hyp2f1_reg(a, b, c, w)?;
    let pref = ((one + x) / (one - x)).powf(mu * half);
    let amp = match route {
        HypRoute::Series => series_amplification(a, b, c, w),
        HypRoute::Transform | HypRoute::DegenerateTransform => T::lit(16.0),
    };
    Ok((pref * f, amp))
}

/// Lowest degree ≡ ν (mod 1) from which the upward recurrence is used;
/// `None` when ν is already low enough for direct evaluation.
///
/// Both hypergeometric routes cancel badly once the degree grows, while
/// the forward degree recurrence is stable on the cut. Starting at or
/// above μ - 1 keeps every denominator ν'-μ+1 positive; for Q the start
/// must also clear the Gamma poles at negative integer ν+μ.
fn ladder_start<T: Real>(kind: FerrersKind, nu: T, mu: T) -> Option<T> {
    let mut floor_deg = mu.max(T::one()) - T::one();
    if kind == FerrersKind::Q {
        floor_deg = floor_deg.max(-mu);
    }
    if nu < floor_deg + T::lit(1.5) {
        return None;
    }
    Some(nu - (nu - floor_deg).floor())
}

/// Climbs from (F_{ν0}, F_{ν0+1}) to F_ν.
fn climb<T: Real>(nu0: T, nu: T, mu: T, x: T, mut prev: T, mut curr: T) -> T {
    let two = T::lit(2.0);
    let mut k = nu0 + T::one();
    while k < nu - T::lit(0.5) {
        let next = ((two * k + T::one()) * x * curr - (k + mu) * prev) / (k - mu + T::one());
        prev = curr;
        curr = next;
        k += T::one();
    }
    curr
}

/// P value plus its rounding amplification factor.
fn p_raw<T: Real>(nu: T, mu: T, x: T) -> Result<(T, T)> {
    let Some(nu0) = ladder_start(FerrersKind::P, nu, mu) else {
        return p_direct(nu, mu, x);
    };
    let (prev, a0) = p_direct(nu0, mu, x)?;
    let (curr, a1) = p_direct(nu0 + T::one(), mu, x)?;
    let steps = nu - nu0;
    Ok((climb(nu0, nu, mu, x, prev, curr), a0.max(a1) * (steps + T::one())))
}

/// Ferrers function of the first kind,
/// P_ν^μ(x) = ((1+x)/(1-x))^{μ/2} 2F1(-ν, ν+1; 1-μ; (1-x)/2) / Γ(1-μ).
///
/// The regularized 2F1 is used, so positive integer orders are finite.
pub fn ferrers_p<T: Real>(nu: T, mu: T, x: T) -> Result<FerrersValue<T>> {
    check_x(x)?;
    let (value, amp) = p_raw(nu, mu, x)?;
    finite(value, x)?;
    Ok(FerrersValue {
        value,
        method: FerrersMethod::Direct2f1,
        est_accuracy: accuracy(nu, mu, x, amp),
    })
}

fn finite<T: Real>(v: T, x: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Overflow(format!("Ferrers value not finite at x = {x}")))
    }
}

/// Q for non-integer μ and x ≥ 0 from the P combination.
fn q_combination<T: Real>(nu: T, mu: T, x: T) -> Result<(T, T)> {
    let one = T::one();
    let (pp, amp1) = p_raw(nu, mu, x)?;
    let (pm, amp2) = p_raw(nu, -mu, x)?;
    let ratio = gamma_ratio(&[nu + mu + one], &[nu - mu + one])?;
    let s = sin_pi(mu);
    let a = cos_pi(mu) * pp;
    let b = ratio * pm;
    let q = T::FRAC_PI_2() / s * (a - b);
    let cancel = (a.abs() + b.abs()) / (a - b).abs().max(T::min_positive_value());
    Ok((q, amp1.max(amp2) * cancel))
}

/// Q(-y) from P(y), Q(y) for y > 0.
fn reflect_q<T: Real>(nu: T, mu: T, q: T, p: T) -> T {
    let s = nu + mu;
    -q * cos_pi(s) - T::FRAC_PI_2() * p * sin_pi(s)
}

/// Q for any μ at x ≥ 0, climbing from low degree when ν is large.
fn q_nonneg<T: Real>(nu: T, mu: T, x: T, delta: T) -> Result<FerrersValue<T>> {
    let Some(nu0) = ladder_start(FerrersKind::Q, nu, mu) else {
        return q_low(nu, mu, x, delta);
    };
    let a = q_low(nu0, mu, x, delta)?;
    let b = q_low(nu0 + T::one(), mu, x, delta)?;
    let value = climb(nu0, nu, mu, x, a.value, b.value);
    let est = if in_supported_box(nu, mu, x) {
        a.est_accuracy.max(b.est_accuracy) * (nu - nu0 + T::one())
    } else {
        T::infinity()
    };
    Ok(FerrersValue {
        value,
        method: a.method,
        est_accuracy: est,
    })
}

/// Q at x ≥ 0 without the degree ladder; integer μ goes through the
/// offset route.
fn q_low<T: Real>(nu: T, mu: T, x: T, delta: T) -> Result<FerrersValue<T>> {
    let (_, dist) = nearest_integer(mu);
    if dist >= T::lit(INTEGER_MU_WINDOW) {
        let (value, amp) = q_combination(nu, mu, x)?;
        return Ok(FerrersValue {
            value,
            method: FerrersMethod::Combination,
            est_accuracy: accuracy(nu, mu, x, amp),
        });
    }
    let sym = |h: T| -> Result<T> {
        Ok((q_combination(nu, mu + h, x)?.0 + q_combination(nu, mu - h, x)?.0) * T::lit(0.5))
    };
    let coarse = sym(delta)?;
    let fine = sym(delta * T::lit(0.5))?;
    let value = (T::lit(4.0) * fine - coarse) / T::lit(3.0);
    let residual = (value - fine).abs() / value.abs().max(T::one());
    if residual > T::lit(OFFSET_RESIDUAL_LIMIT) {
        return Err(Error::NotConverged {
            what: "integer-order Ferrers Q extrapolation",
            estimate: value.as_f64(),
            residual: residual.as_f64(),
        });
    }
    let est = if in_supported_box(nu, mu, x) {
        T::lit(OFFSET_ACCURACY)
    } else {
        T::infinity()
    };
    Ok(FerrersValue {
        value,
        method: FerrersMethod::IntegerMuOffset,
        est_accuracy: est,
    })
}

/// Ferrers function of the second kind,
/// Q_ν^μ = π/(2 sin πμ) [cos(πμ) P_ν^μ - Γ(ν+μ+1)/Γ(ν-μ+1) P_ν^{-μ}].
///
/// Orders within 1e-6 of an integer are evaluated at μ ± δ and μ ± δ/2
/// (δ = 1e-4) and Richardson-extrapolated. For x < 0 the value is
/// assembled from P and Q at |x|.
pub fn ferrers_q<T: Real>(nu: T, mu: T, x: T) -> Result<FerrersValue<T>> {
    ferrers_q_with_offset(nu, mu, x, T::lit(INTEGER_MU_OFFSET))
}

/// [`ferrers_q`] with an explicit integer-order offset δ.
pub fn ferrers_q_with_offset<T: Real>(nu: T, mu: T, x: T, delta: T) -> Result<FerrersValue<T>> {
    check_x(x)?;
    if !(delta > T::lit(INTEGER_MU_WINDOW)) {
        return Err(Error::domain("integer-order offset must exceed the detection window"));
    }
    let s = nu + mu;
    if s < T::zero() && s == s.round() {
        return Err(Error::pole(format!("Gamma(nu+mu+1) pole at nu+mu = {s}")));
    }
    let out = if x >= T::zero() {
        q_nonneg(nu, mu, x, delta)?
    } else {
        let y = -x;
        let q = q_nonneg(nu, mu, y, delta)?;
        let (p, amp) = p_raw(nu, mu, y)?;
        let value = reflect_q(nu, mu, q.value, p);
        FerrersValue {
            value,
            method: q.method,
            est_accuracy: q.est_accuracy.max(accuracy(nu, mu, x, amp)),
        }
    };
    finite(out.value, x)?;
    Ok(out)
}

/// e^{-iπμ}𝔔_ν^μ(z) for real z > 1, which is real:
///
/// √π Γ(ν+μ+1) (z²-1)^{μ/2} / (2^{ν+1} z^{ν+μ+1})
///   · 2F1((ν+μ+2)/2, (ν+μ+1)/2; ν+3/2; 1/z²) / Γ(ν+3/2).
///
/// Needs Γ(ν+μ+1) finite; ν+μ+1 may be negative.
pub fn offcut_q_phase_removed<T: Real>(nu: T, mu: T, z: T) -> Result<T> {
    if !(z > T::one()) {
        return Err(Error::domain("z must be > 1"));
    }
    let one = T::one();
    let half = T::lit(0.5);
    let s = nu + mu + one;
    if s <= T::zero() && s == s.round() {
        return Err(Error::pole(format!("Gamma(nu+mu+1) pole at nu+mu+1 = {s}")));
    }
    let (lg, sign) = ln_gamma_abs(s)?;
    let w = (z * z).recip();
    let (f, _) = hyp2f1_reg((s + one) * half, s * half, nu + T::lit(1.5), w)?;
    if f == T::zero() {
        return Ok(T::zero());
    }
    let ln_mag = lg + half * T::PI().ln() + mu * half * ((z - one) * (z + one)).ln()
        - (nu + one) * T::LN_2()
        - s * z.ln()
        + f.abs().ln();
    let v = sign * f.signum() * ln_mag.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("offcut Q not representable at z = {z}")))
    }
}

/// Boundary values (x+i0, x-i0) of e^{-iπμ}𝔔_ν^μ on the cut:
/// e^{±iπμ/2}[Q_ν^μ(x) ∓ (iπ/2) P_ν^μ(x)].
pub fn cut_boundary_values<T: Real>(nu: T, mu: T, x: T) -> Result<(Complex<T>, Complex<T>)> {
    let q = ferrers_q(nu, mu, x)?.value;
    let p = ferrers_p(nu, mu, x)?.value;
    let half_mu = mu * T::lit(0.5);
    let phase = Complex::new(cos_pi(half_mu), sin_pi(half_mu));
    let inner_plus = Complex::new(q, -T::FRAC_PI_2() * p);
    let plus = phase * inner_plus;
    Ok((plus, plus.conj()))
}

/// Which Ferrers function a [`DegreeLadder`] walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FerrersKind {
    P,
    Q,
}

/// F_{ν0}, F_{ν0+1}, F_{ν0+2}, ... at fixed (μ, x) by the forward degree
/// recurrence (ν-μ+1)F_{ν+1} = (2ν+1)x F_ν - (ν+μ)F_{ν-1}.
#[derive(Debug, Clone)]
pub struct DegreeLadder<T> {
    kind: FerrersKind,
    nu: T,
    mu: T,
    x: T,
    prev: T,
    curr: T,
    started: bool,
}

impl<T: Real> DegreeLadder<T> {
    /// Seeds the ladder with two direct evaluations at ν0 and ν0+1.
    pub fn new(kind: FerrersKind, nu0: T, mu: T, x: T) -> Result<Self> {
        let eval = |nu: T| match kind {
            FerrersKind::P => ferrers_p(nu, mu, x).map(|v| v.value),
            FerrersKind::Q => ferrers_q(nu, mu, x).map(|v| v.value),
        };
        let prev = eval(nu0)?;
        let curr = eval(nu0 + T::one())?;
        Ok(Self {
            kind,
            nu: nu0,
            mu,
            x,
            prev,
            curr,
            started: false,
        })
    }

    pub fn kind(&self) -> FerrersKind {
        self.kind
    }
}

impl<T: Real> Iterator for DegreeLadder<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        if !self.started {
            self.started = true;
            return Some(self.prev);
        }
        let out = self.curr;
        // advance: prev = F_{ν}, curr = F_{ν+1}; produce F_{ν+2}
        let nu1 = self.nu + T::one();
        let next = ((T::lit(2.0) * nu1 + T::one()) * self.x * self.curr - (nu1 + self.mu) * self.prev)
            / (nu1 - self.mu + T::one());
        self.prev = self.curr;
        self.curr = next;
        self.nu = nu1;
        Some(out)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::gegenbauer::gegenbauer_all;
    use crate::kernels::gamma_real;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn p_examples() {
        let v = ferrers_p(0.0, -0.5, 0.0_f64).unwrap();
        assert!(rel(v.value, std::f64::consts::FRAC_2_SQRT_PI) < 1e-14);
        assert_eq!(v.method, FerrersMethod::Direct2f1);
        assert!(v.est_accuracy <= 1e-11);
        assert!((ferrers_p(2.0, 0.0, 0.5_f64).unwrap().value + 0.125).abs() < 1e-15);
        // 30-digit series oracle, tests/oracles/reference_values.py
        let v = ferrers_p(1.3, -0.7, 0.4_f64).unwrap().value;
        assert!(rel(v, 0.412_455_333_656_069_35) < 1e-13);
        let v = ferrers_p(1.3, 0.4, 0.4_f64).unwrap().value;
        assert!(rel(v, -0.267_514_020_300_903_4) < 1e-13);
    }

    #[test]
    fn q_examples() {
        assert!(ferrers_q(0.0, 0.0, 0.0_f64).unwrap().value.abs() < 1e-12);
        let v = ferrers_q(0.0, 0.0, 0.5_f64).unwrap();
        assert!(rel(v.value, 0.549_306_144_334_054_9) < 1e-10);
        assert_eq!(v.method, FerrersMethod::IntegerMuOffset);
        assert!(v.est_accuracy <= 1e-8);
        let v = ferrers_q(1.3, 0.4, 0.4_f64).unwrap();
        assert_eq!(v.method, FerrersMethod::Combination);
        assert!(rel(v.value, -1.153_855_605_618_455_9) < 1e-13);
    }

    #[test]
    fn q_elementary_integer_cases() {
        for &x in &[-0.9_f64, -0.4, 0.1, 0.7, 0.95] {
            let q0 = x.atanh();
            let q1 = x * x.atanh() - 1.0;
            let q2 = 0.5 * (3.0 * x * x - 1.0) * x.atanh() - 1.5 * x;
            assert!((ferrers_q(0.0, 0.0, x).unwrap().value - q0).abs() < 1e-10, "x={x}");
            assert!((ferrers_q(1.0, 0.0, x).unwrap().value - q1).abs() < 1e-10, "x={x}");
            assert!((ferrers_q(2.0, 0.0, x).unwrap().value - q2).abs() < 1e-10, "x={x}");
            // Q_0^1 = -1/√(1-x²)
            let q01 = -1.0 / (1.0 - x * x).sqrt();
            assert!(rel(ferrers_q(0.0, 1.0, x).unwrap().value, q01) < 1e-9, "x={x}");
        }
    }

    #[test]
    fn p_half_integer_order_closed_form() {
        // P_ν^{1/2}(cos θ) = √(2/(π sin θ)) cos((ν+1/2)θ)
        for &nu in &[0.0_f64, 0.7, 2.3, 5.0] {
            for &x in &[-0.8_f64, -0.1, 0.3, 0.9] {
                let th = x.acos();
                let want = (2.0 / (std::f64::consts::PI * th.sin())).sqrt() * ((nu + 0.5) * th).cos();
                let got = ferrers_p(nu, 0.5, x).unwrap().value;
                assert!((got - want).abs() < 1e-11 * want.abs().max(1.0), "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn positive_integer_order_is_finite() {
        // P_1^1(x) = -√(1-x²) with this phase convention
        let x = 0.3_f64;
        let v = ferrers_p(1.0, 1.0, x).unwrap().value;
        assert!((v + (1.0 - x * x).sqrt()).abs() < 1e-12, "{v}");
        // P_n^m = 0 for m > n
        assert!(ferrers_p(1.0, 2.0, x).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn legendre_specialization() {
        for &x in &[-0.97_f64, -0.5, 0.0, 0.25, 0.9] {
            let c = gegenbauer_all(15, 0.5, x).unwrap();
            for (n, cn) in c.iter().enumerate() {
                let p = ferrers_p(n as f64, 0.0, x).unwrap().value;
                assert!((p - cn).abs() < 1e-10, "n={n} x={x}: {p} vs {cn}");
            }
        }
    }

    #[test]
    fn degree_zero_closed_form() {
        for &mu in &[-2.3_f64, -0.5, 0.2, 0.8] {
            for &x in &[-0.9_f64, -0.2, 0.6] {
                let want = ((1.0 + x) / (1.0 - x)).powf(mu / 2.0) / gamma_real(1.0 - mu).value;
                let got = ferrers_p(0.0, mu, x).unwrap().value;
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn integer_order_continuity() {
        for &(nu, m, x) in &[(1.3_f64, 0.0, 0.4), (0.6, -1.0, -0.3), (2.5, 0.0, 0.85), (0.2, -2.0, 0.1)] {
            let a = ferrers_q_with_offset(nu, m, x, 1e-4).unwrap().value;
            let b = ferrers_q_with_offset(nu, m, x, 1e-5).unwrap().value;
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{nu} {m} {x}: {a} {b}");
            // and it joins the non-integer neighbourhood smoothly
            let c = ferrers_q(nu, m + 1e-3, x).unwrap().value;
            assert!((a - c).abs() < 1e-2 * a.abs().max(1.0));
        }
    }

    #[test]
    fn q_pole_and_domain() {
        assert!(matches!(ferrers_q(-0.5, -0.5, 0.2_f64), Err(Error::Pole(_))));
        assert!(matches!(ferrers_p(0.5, 0.0, 1.0_f64), Err(Error::Domain(_))));
        assert!(matches!(ferrers_q(0.5, 0.0, -1.0_f64), Err(Error::Domain(_))));
    }

    #[test]
    fn accuracy_is_infinite_outside_box() {
        assert!(ferrers_p(40.0, 0.0, 0.2_f64).unwrap().est_accuracy.is_infinite());
        assert!(ferrers_p(1.0, 0.0, 0.9995_f64).unwrap().est_accuracy.is_infinite());
        assert!(ferrers_p(1.0, 0.0, 0.5_f64).unwrap().est_accuracy.is_finite());
    }

    #[test]
    fn offcut_examples() {
        let v = offcut_q_phase_removed(0.0, 0.0, 2.0_f64).unwrap();
        assert!(rel(v, 0.549_306_144_334_054_9) < 1e-13);
        let v = offcut_q_phase_removed(1.0, 0.0, 2.0_f64).unwrap();
        assert!(rel(v, 0.098_612_288_668_109_8) < 1e-12);
        // 30-digit value, cross-checked against the quadrature inversion
        let v = offcut_q_phase_removed(1.5, 0.25, 1.5_f64).unwrap();
        assert!(rel(v, 0.137_650_586_098_496_6) < 1e-12);
    }

    #[test]
    fn offcut_matches_legendre_closed_forms_near_the_cut() {
        for &z in &[1.0005_f64, 1.01, 1.1, 3.0, 50.0] {
            let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
            assert!(rel(offcut_q_phase_removed(0.0, 0.0, z).unwrap(), q0) < 1e-10, "z={z}");
            let q1 = z * q0 - 1.0;
            assert!(rel(offcut_q_phase_removed(1.0, 0.0, z).unwrap(), q1) < 1e-8, "z={z}");
        }
    }

    #[test]
    fn offcut_negative_gamma_argument() {
        // ν+μ+1 = -0.5: allowed, Γ(-0.5) < 0
        let v = offcut_q_phase_removed(-0.5, -1.0, 2.0_f64).unwrap();
        assert!(v.is_finite());
        assert!(matches!(offcut_q_phase_removed(-0.5, -1.5, 2.0_f64), Err(Error::Pole(_))));
        assert!(matches!(offcut_q_phase_removed(0.0, 0.0, 1.0_f64), Err(Error::Domain(_))));
    }

    #[test]
    fn boundary_values() {
        let (p, m) = cut_boundary_values(0.0, 0.0, 0.0_f64).unwrap();
        assert!(p.re.abs() < 1e-12 && (p.im + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(m.re.abs() < 1e-12 && (m.im - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let (p, m) = cut_boundary_values(1.3, 0.4, 0.4_f64).unwrap();
        assert_eq!(p.conj(), m);
        let (q, pv) = (-1.153_855_605_618_455_9_f64, -0.267_514_020_300_903_4_f64);
        let ph = Complex::from_polar(1.0, std::f64::consts::PI * 0.2);
        let want = ph * Complex::new(q, -std::f64::consts::FRAC_PI_2 * pv);
        assert!((p - want).norm() < 1e-12);
    }

    #[test]
    fn wronskian_example() {
        let (nu, mu, x) = (1.3_f64, 0.4, 0.4);
        let h = 1e-5;
        let p = |x| ferrers_p(nu, mu, x).unwrap().value;
        let q = |x| ferrers_q(nu, mu, x).unwrap().value;
        let w = p(x) * (q(x + h) - q(x - h)) / (2.0 * h) - (p(x + h) - p(x - h)) / (2.0 * h) * q(x);
        assert!(rel(w, 1.912_016_064_870_75) < 1e-6);
    }

    #[test]
    fn degree_ladder_matches_direct() {
        for kind in [FerrersKind::P, FerrersKind::Q] {
            let (nu0, mu, x) = (0.25_f64, -0.75, -0.35);
            let ladder = DegreeLadder::new(kind, nu0, mu, x).unwrap();
            for (k, v) in ladder.take(40).enumerate() {
                let nu = nu0 + k as f64;
                let d = match kind {
                    FerrersKind::P => ferrers_p(nu, mu, x).unwrap().value,
                    FerrersKind::Q => ferrers_q(nu, mu, x).unwrap().value,
                };
                assert!((v - d).abs() < 1e-10 * d.abs().max(1.0), "{kind:?} k={k}: {v} vs {d}");
            }
        }
    }

    #[test]
    fn cut_order_degree_from_params() {
        let c = CutOrderDegree::from_params(3, 0.75, 0.35_f64);
        assert_eq!(c.nu, 3.25);
        assert_eq!(c.mu, 0.35 - 0.75);
    }

    #[test]
    fn method_serializes_kebab_case() {
        let s = serde_json::to_string(&FerrersMethod::IntegerMuOffset).unwrap();
        assert_eq!(s, "\"integer-mu-offset\"");
        assert_eq!(serde_json::to_string(&FerrersMethod::Direct2f1).unwrap(), "\"direct-2f1\"");
    }

    #[test]
    fn single_precision_smoke() {
        let v = ferrers_p(2.0_f32, 0.0, 0.5).unwrap().value;
        assert!((v + 0.125).abs() < 1e-5);
        let q = offcut_q_phase_removed(0.0_f32, 0.0, 2.0).unwrap();
        assert!((q - 0.549_306_1).abs() < 1e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reflection(nu in -0.4f64..6.0, mu in -3.0f64..3.0, x in -0.95f64..0.95) {
            prop_assume!(nearest_integer(mu).1 > 1e-3);
            prop_assume!(!((nu + mu) < 0.0 && nearest_integer(nu + mu).1 < 1e-3));
            let p = ferrers_p(nu, mu, x).unwrap().value;
            let q = ferrers_q(nu, mu, x).unwrap().value;
            let pm = ferrers_p(nu, mu, -x).unwrap().value;
            let s = nu + mu;
            let rhs = p * cos_pi(s) - 2.0 / std::f64::consts::PI * q * sin_pi(s);
            let scale = pm.abs().max(p.abs()).max(q.abs()).max(1e-300);
            prop_assert!((pm - rhs).abs() <= 1e-9 * scale, "{} vs {}", pm, rhs);
        }

        #[test]
        fn wronskian(nu in -0.4f64..6.0, mu in -3.0f64..0.95, x in -0.9f64..0.9) {
            prop_assume!(nearest_integer(mu).1 > 1e-3);
            prop_assume!(!((nu + mu) < 0.0 && nearest_integer(nu + mu).1 < 1e-3));
            prop_assume!(!((nu - mu) < -1.0 && nearest_integer(nu - mu).1 < 1e-3));
            let h = 1e-5;
            let p = |x| ferrers_p(nu, mu, x).unwrap().value;
            let q = |x| ferrers_q(nu, mu, x).unwrap().value;
            let w = p(x) * (q(x + h) - q(x - h)) / (2.0 * h) - (p(x + h) - p(x - h)) / (2.0 * h) * q(x);
            let want = gamma_ratio(&[nu + mu + 1.0], &[nu - mu + 1.0]).unwrap() / (1.0 - x * x);
            prop_assert!((w - want).abs() <= 1e-6 * want.abs().max(1e-3), "{} vs {}", w, want);
        }
    }
}
