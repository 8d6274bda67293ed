//! Gamma/Legendre closed forms for the singular Gegenbauer integrals.
//!
//! Each function here is the right-hand side matching one of the
//! quadrature routines in [`crate::quadrature`]; nothing in this module
//! integrates.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernels::{ln_gamma_pos, rgamma};
use crate::legendre::{cut_boundary_values, ferrers_p, ferrers_q, offcut_q_phase_removed, CutOrderDegree};
use crate::quadrature::{check_lambda, check_on_cut};
use crate::scalar::{is_nonpositive_integer, sin_pi, cos_pi, Real};

/// G(n, λ) = (n+λ) Γ(n+2λ) / (n! Γ(λ+1)), continued to n = 0 as
/// Γ(2λ+1) / (2 Γ(λ+1)). Positive for λ > -1/2.
pub fn gamma_prefactor<T: Real>(n: usize, lambda: T) -> Result<T> {
    check_lambda(lambda)?;
    let one = T::one();
    let two = T::lit(2.0);
    let ln = if n == 0 {
        ln_gamma_pos(two * lambda + one)? - T::LN_2() - ln_gamma_pos(lambda + one)?
    } else {
        let nf = T::from_count(n);
        (nf + lambda).ln() + ln_gamma_pos(nf + two * lambda)?
            - ln_gamma_pos(nf + one)?
            - ln_gamma_pos(lambda + one)?
    };
    Ok(ln.exp())
}

/// (1-x²)^α from its two factors.
pub(crate) fn one_minus_sq_pow<T: Real>(x: T, alpha: T) -> T {
    (T::one() - x).powf(alpha) * (T::one() + x).powf(alpha)
}

/// (z²-1)^α for z > 1, split as (z-1)^α (z+1)^α.
pub(crate) fn sq_minus_one_pow<T: Real>(z: T, alpha: T) -> T {
    (z - T::one()).powf(alpha) * (z + T::one()).powf(alpha)
}

/// √π G Γ(1/2-κ) 2^{1/2-λ} (1-x²)^{(λ-κ)/2}, the factor shared by the P forms.
fn p_form_factor<T: Real>(n: usize, lambda: T, kappa: T, x: T) -> Result<T> {
    let half = T::lit(0.5);
    let g = gamma_prefactor(n, lambda)?;
    let ln_rest = half * T::PI().ln() + ln_gamma_pos(half - kappa)? + (half - lambda) * T::LN_2();
    Ok(g * ln_rest.exp() * one_minus_sq_pow(x, (lambda - kappa) * half))
}

/// √π G 2^{3/2-λ} / Γ(κ+1/2), the factor shared by the Q forms.
fn q_form_factor<T: Real>(n: usize, lambda: T, kappa: T) -> Result<T> {
    let half = T::lit(0.5);
    let g = gamma_prefactor(n, lambda)?;
    let ln_rest = half * T::PI().ln() + (T::lit(1.5) - lambda) * T::LN_2();
    Ok(g * ln_rest.exp() * rgamma(kappa + half))
}

/// Right-hand side for [`crate::quadrature::integral_right_lhs`]:
/// √π G Γ(1/2-κ) 2^{1/2-λ} (1-x²)^{(λ-κ)/2} P_{n+λ-1/2}^{κ-λ}(x).
pub fn right_rhs<T: Real>(n: usize, lambda: T, kappa: T, x: T) -> Result<T> {
    check_on_cut(lambda, kappa, x)?;
    let c = CutOrderDegree::from_params(n, lambda, kappa);
    Ok(p_form_factor(n, lambda, kappa, x)? * ferrers_p(c.nu, c.mu, x)?.value)
}

/// Right-hand side for [`crate::quadrature::integral_left_lhs`] in its
/// simplified form: (-1)^n times the right-side form with P at -x.
pub fn left_rhs<T: Real>(n: usize, lambda: T, kappa: T, x: T) -> Result<T> {
    check_on_cut(lambda, kappa, x)?;
    let c = CutOrderDegree::from_params(n, lambda, kappa);
    let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
    Ok(sign * p_form_factor(n, lambda, kappa, x)? * ferrers_p(c.nu, c.mu, -x)?.value)
}

/// Right-hand side for [`crate::quadrature::integral_left_lhs`] before
/// simplification: √π G 2^{3/2-λ}/Γ(κ+1/2) (1-x²)^{(λ-κ)/2}
/// {Q - (π/2) P cot(π(κ+1/2))}.
pub fn left_rhs_q_form<T: Real>(n: usize, lambda: T, kappa: T, x: T) -> Result<T> {
    check_on_cut(lambda, kappa, x)?;
    let half = T::lit(0.5);
    let s = kappa + half;
    if s == s.round() {
        return Err(Error::pole(format!("cot(pi(kappa+1/2)) pole at kappa = {kappa}")));
    }
    let c = CutOrderDegree::from_params(n, lambda, kappa);
    let q = ferrers_q(c.nu, c.mu, x)?.value;
    let p = ferrers_p(c.nu, c.mu, x)?.value;
    let cot = cos_pi(s) / sin_pi(s);
    let brace = q - T::FRAC_PI_2() * p * cot;
    Ok(q_form_factor(n, lambda, kappa)? * one_minus_sq_pow(x, (lambda - kappa) * half) * brace)
}

/// Right-hand side for [`crate::quadrature::integral_offcut_lhs`]:
/// √π G 2^{3/2-λ}/Γ(κ+1/2) (z²-1)^{(λ-κ)/2} e^{-iπμ}𝔔_{n+λ-1/2}^{κ-λ}(z).
pub fn offcut_rhs<T: Real>(n: usize, lambda: T, kappa: T, z: T) -> Result<T> {
    check_lambda(lambda)?;
    if !(z > T::one()) {
        return Err(Error::domain("z must be > 1"));
    }
    let half = T::lit(0.5);
    let s = kappa + half;
    if is_nonpositive_integer(s) {
        // 1/Γ(κ+1/2) vanishes; the Legendre factor stays finite unless n+κ+1/2 ≤ 0
        let nu_mu_1 = T::from_count(n) + s;
        if is_nonpositive_integer(nu_mu_1) {
            return Err(Error::pole(format!(
                "0 * pole at kappa = {kappa}, n = {n}; use the limiting form"
            )));
        }
        return Ok(T::zero());
    }
    let c = CutOrderDegree::from_params(n, lambda, kappa);
    let q = offcut_q_phase_removed(c.nu, c.mu, z)?;
    Ok(q_form_factor(n, lambda, kappa)? * sq_minus_one_pow(z, (lambda - kappa) * half) * q)
}

/// Right-hand side of Neumann's formula ∫ P_n(t)/(z-t) dt = 2 𝔔_n(z).
pub fn neumann_rhs<T: Real>(n: usize, z: T) -> Result<T> {
    Ok(T::lit(2.0) * offcut_q_phase_removed(T::from_count(n), T::zero(), z)?)
}

/// Right-hand sides of the boundary-value integral for z → x ± i0,
/// returned as (upper, lower):
/// √π G 2^{3/2-λ}/Γ(κ+1/2) (1-x²)^{(λ-κ)/2} [Q ∓ (iπ/2) P],
/// with the bracket taken from [`cut_boundary_values`].
pub fn boundary_rhs<T: Real>(
    n: usize,
    lambda: T,
    kappa: T,
    x: T,
) -> Result<(Complex<T>, Complex<T>)> {
    check_on_cut(lambda, kappa, x)?;
    let half = T::lit(0.5);
    let c = CutOrderDegree::from_params(n, lambda, kappa);
    let (bv_plus, bv_minus) = cut_boundary_values(c.nu, c.mu, x)?;
    // undo the e^{±iπμ/2} phase of the boundary values
    let h = c.mu * half;
    let unphase = Complex::new(cos_pi(h), -sin_pi(h));
    let scale = q_form_factor(n, lambda, kappa)? * one_minus_sq_pow(x, (lambda - kappa) * half);
    Ok((bv_plus * unphase * scale, bv_minus * unphase.conj() * scale))
}

/// The boundary-value integral assembled from its two halves:
/// left + e^{∓iπ(κ+1/2)} right, returned as (upper, lower).
pub fn split_combination<T: Real>(left: T, right: T, kappa: T) -> (Complex<T>, Complex<T>) {
    let s = kappa + T::lit(0.5);
    let phase = Complex::new(cos_pi(s), -sin_pi(s));
    let upper = Complex::new(left, T::zero()) + phase * right;
    (upper, upper.conj())
}
