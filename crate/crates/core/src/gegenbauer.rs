//! Gegenbauer polynomials C_n^λ and the renormalized family
//! R_n^λ(t) = ((n+λ)/λ) C_n^λ(t), which stays finite at λ = 0 where
//! R_n = 2 T_n for n ≥ 1.

use crate::error::{Error, Result};
use crate::kernels::ln_gamma_pos;
use crate::quadrature::{check_lambda, tanh_sinh_with_distances, Abscissa};
use crate::scalar::Real;

/// Parameter pair for a truncated Gegenbauer family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerBasis<T> {
    lambda: T,
    n_max: usize,
}

impl<T: Real> GegenbauerBasis<T> {
    pub fn new(lambda: T, n_max: usize) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { lambda, n_max })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// C_0^λ(t)..C_{n_max}^λ(t).
    pub fn values(&self, t: T) -> Result<Vec<T>> {
        gegenbauer_all(self.n_max, self.lambda, t)
    }

    /// R_0^λ(t)..R_{n_max}^λ(t).
    pub fn renorm_values(&self, t: T) -> Result<Vec<T>> {
        check_t(t)?;
        Ok(RenormIter::new(self.lambda, t).take(self.n_max + 1).collect())
    }
}

/// Coefficients a_0..a_N of f ≈ Σ a_n R_n^λ.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoeffs<T> {
    lambda: T,
    coeffs: Vec<T>,
}

impl<T: Real> ExpansionCoeffs<T> {
    /// Wraps coefficients against the renormalized basis.
    pub fn new(lambda: T, coeffs: Vec<T>) -> Result<Self> {
        check_lambda(lambda)?;
        if coeffs.is_empty() {
            return Err(Error::domain("expansion needs at least one coefficient"));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite { at: bad.as_f64() });
        }
        Ok(Self { lambda, coeffs })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree N of the truncation.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients against C_n^λ itself, a_n (n+λ)/λ. Undefined at λ = 0.
    pub fn plain(&self) -> Result<Vec<T>> {
        if self.lambda == T::zero() {
            return Err(Error::domain("plain Gegenbauer coefficients need lambda != 0"));
        }
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &a)| a * (T::from_count(n) + self.lambda) / self.lambda)
            .collect())
    }
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if !(t.abs() <= T::one()) {
        return Err(Error::domain("t must lie in [-1, 1]"));
    }
    Ok(())
}

/// C_0^λ(t)..C_{n_max}^λ(t) by the forward three-term recurrence.
pub fn gegenbauer_all<T: Real>(n_max: usize, lambda: T, t: T) -> Result<Vec<T>> {
    check_lambda(lambda)?;
    if lambda == T::zero() {
        return Err(Error::domain("lambda = 0 is only available through renorm_gegenbauer"));
    }
    check_t(t)?;
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(T::one());
    if n_max >= 1 {
        out.push(two * lambda * t);
    }
    for n in 2..=n_max {
        let nf = T::from_count(n);
        let next = (two * t * (nf + lambda - T::one()) * out[n - 1]
            - (nf + two * lambda - two) * out[n - 2])
            / nf;
        out.push(next);
    }
    Ok(out)
}

/// ((n+λ)/λ) C_n^λ(t), continuous through λ = 0.
pub fn renorm_gegenbauer<T: Real>(n: usize, lambda: T, t: T) -> Result<T> {
    check_lambda(lambda)?;
    check_t(t)?;
    Ok(renorm_unchecked(n, lambda, t))
}

/// [`renorm_gegenbauer`] without argument checks, for integrand loops.
pub(crate) fn renorm_unchecked<T: Real>(n: usize, lambda: T, t: T) -> T {
    RenormIter::new(lambda, t).nth(n).unwrap_or_else(T::zero)
}

/// Yields R_0^λ(t), R_1^λ(t), ... indefinitely.
///
/// Internally runs the recurrence on D_n = C_n^λ / λ, which has a finite
/// limit at λ = 0, and scales by (n+λ).
#[derive(Debug, Clone)]
pub struct RenormIter<T> {
    lambda: T,
    t: T,
    n: usize,
    d_prev: T,
    d_curr: T,
}

impl<T: Real> RenormIter<T> {
    pub fn new(lambda: T, t: T) -> Self {
        Self {
            lambda,
            t,
            n: 0,
            d_prev: T::zero(),
            d_curr: T::zero(),
        }
    }
}

impl<T: Real> Iterator for RenormIter<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let (lam, t) = (self.lambda, self.t);
        let two = T::lit(2.0);
        let n = self.n;
        self.n += 1;
        let d = match n {
            0 => return Some(T::one()),
            1 => two * t,
            2 => t * (T::one() + lam) * self.d_curr - T::one(),
            _ => {
                let nf = T::from_count(n);
                (two * t * (nf + lam - T::one()) * self.d_curr
                    - (nf + two * lam - two) * self.d_prev)
                    / nf
            }
        };
        self.d_prev = self.d_curr;
        self.d_curr = d;
        Some((T::from_count(n) + lam) * d)
    }
}

/// Normalization K_n with a_n = K_n ∫ (1-t²)^{λ-1/2} R_n(t) f(t) dt.
fn projection_factor<T: Real>(n: usize, lambda: T) -> Result<T> {
    let one = T::one();
    let ln2 = T::LN_2();
    let lg1 = ln_gamma_pos(lambda + one)?;
    let ln_k = if n == 0 {
        T::lit(2.0) * lambda * ln2 + T::lit(2.0) * lg1
            - T::PI().ln()
            - ln_gamma_pos(T::lit(2.0) * lambda + one)?
    } else {
        let nf = T::from_count(n);
        (T::lit(2.0) * lambda - one) * ln2 + T::lit(2.0) * lg1 + ln_gamma_pos(nf + one)?
            - T::PI().ln()
            - (nf + lambda).ln()
            - ln_gamma_pos(nf + T::lit(2.0) * lambda)?
    };
    Ok(ln_k.exp())
}

fn default_tol<T: Real>() -> T {
    T::lit(1e-13).max(T::epsilon() * T::lit(64.0))
}

/// Projects f onto R_0..R_N with the Gegenbauer weight, at the default
/// quadrature tolerance.
pub fn gegenbauer_coeffs<T: Real, F: Fn(T) -> T>(
    f: F,
    lambda: T,
    n: usize,
) -> Result<ExpansionCoeffs<T>> {
    gegenbauer_coeffs_with_tol(f, lambda, n, default_tol())
}

pub fn gegenbauer_coeffs_with_tol<T: Real, F: Fn(T) -> T>(
    f: F,
    lambda: T,
    n: usize,
    tol: T,
) -> Result<ExpansionCoeffs<T>> {
    check_lambda(lambda)?;
    let p = lambda - T::lit(0.5);
    let coeffs = (0..=n)
        .map(|k| {
            let q = tanh_sinh_with_distances(
                |x: Abscissa<T>| {
                    x.from_a.powf(p) * x.to_b.powf(p) * renorm_unchecked(k, lambda, x.t) * f(x.t)
                },
                -T::one(),
                T::one(),
                tol,
            )?;
            Ok(projection_factor(k, lambda)? * q.value)
        })
        .collect::<Result<Vec<T>>>()?;
    ExpansionCoeffs::new(lambda, coeffs)
}

/// Σ a_n R_n^λ(t) by Clenshaw's backward recurrence.
pub fn gegenbauer_synth<T: Real>(coeffs: &ExpansionCoeffs<T>, t: T) -> Result<T> {
    check_t(t)?;
    let lam = coeffs.lambda;
    let a = &coeffs.coeffs;
    let two = T::lit(2.0);
    // b_n D_n with D_n = C_n/λ, D_0 := 1 and β_2 = -1 so the recurrence closes
    let b = |k: usize| {
        if k == 0 {
            a[0]
        } else {
            a[k] * (T::from_count(k) + lam)
        }
    };
    let alpha = |k: usize| two * t * (T::from_count(k) + lam - T::one()) / T::from_count(k);
    let beta = |k: usize| {
        if k == 2 {
            -T::one()
        } else {
            -(T::from_count(k) + two * lam - two) / T::from_count(k)
        }
    };
    let big_n = a.len() - 1;
    if big_n == 0 {
        return Ok(a[0]);
    }
    let (mut y1, mut y2) = (T::zero(), T::zero());
    for k in (1..=big_n).rev() {
        let y = b(k) + alpha(k + 1) * y1 + beta(k + 2) * y2;
        y2 = y1;
        y1 = y;
    }
    let s = b(0) + two * t * y1 + beta(2) * y2;
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::NonFinite { at: t.as_f64() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recurrence_examples() {
        assert_eq!(gegenbauer_all(0, 1.5, 0.3).unwrap(), vec![1.0]);
        let v = gegenbauer_all(1, 1.5, 0.3_f64).unwrap();
        assert!((v[1] - 0.9).abs() < 1e-15);
        let v = gegenbauer_all(2, 1.0, 0.5_f64).unwrap();
        assert_eq!(v[..2], [1.0, 1.0]);
        assert!(v[2].abs() < 1e-15);
    }

    #[test]
    fn explicit_low_degree_forms() {
        let (lam, t) = (0.35_f64, -0.62_f64);
        let v = gegenbauer_all(3, lam, t).unwrap();
        let c2 = 2.0 * lam * (lam + 1.0) * t * t - lam;
        let c3 = 4.0 / 3.0 * lam * (lam + 1.0) * (lam + 2.0) * t.powi(3) - 2.0 * lam * (lam + 1.0) * t;
        assert!((v[2] - c2).abs() < 1e-15);
        assert!((v[3] - c3).abs() < 1e-15);
    }

    #[test]
    fn renorm_examples() {
        assert_eq!(renorm_gegenbauer(0, 0.7, 0.2).unwrap(), 1.0);
        assert!((renorm_gegenbauer(2, 0.0, 0.5_f64).unwrap() + 1.0).abs() < 1e-15);
        assert!((renorm_gegenbauer(3, 0.5, 1.0_f64).unwrap() - 7.0).abs() < 1e-14);
    }

    #[test]
    fn renorm_limit_is_twice_chebyshev() {
        for n in 1..30 {
            for &t in &[-0.93_f64, -0.2, 0.0, 0.41, 0.999] {
                let want = 2.0 * (n as f64 * t.acos()).cos();
                let got0 = renorm_gegenbauer(n, 0.0, t).unwrap();
                assert!((got0 - want).abs() < 1e-12, "n={n} t={t}");
                let near = renorm_gegenbauer(n, 1e-9, t).unwrap();
                assert!((near - want).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn renorm_agrees_with_plain_family() {
        let (lam, t) = (-0.3_f64, 0.77);
        let plain = gegenbauer_all(25, lam, t).unwrap();
        for (n, c) in plain.iter().enumerate() {
            let r = renorm_gegenbauer(n, lam, t).unwrap();
            let want = (n as f64 + lam) / lam * c;
            assert!((r - want).abs() <= 1e-12 * want.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(gegenbauer_all(3, 0.0, 0.1_f64).is_err());
        assert!(gegenbauer_all(3, -0.5, 0.1_f64).is_err());
        assert!(gegenbauer_all(3, 1.0, 1.01_f64).is_err());
        assert!(renorm_gegenbauer(3, 1.0, -1.5_f64).is_err());
        assert!(GegenbauerBasis::new(-0.7_f64, 3).is_err());
    }

    #[test]
    fn basis_values() {
        let b = GegenbauerBasis::new(1.5_f64, 2).unwrap();
        assert_eq!(b.values(0.3).unwrap(), gegenbauer_all(2, 1.5, 0.3).unwrap());
        let r = b.renorm_values(0.3).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[1] - 2.5 / 1.5 * 0.9).abs() < 1e-15);
    }

    #[test]
    fn projection_factor_gives_unit_self_coefficient() {
        // projecting R_m itself must return the unit vector e_m
        for &lam in &[0.0_f64, -0.3, 0.5, 1.0, 2.5] {
            let c = gegenbauer_coeffs(|t| renorm_unchecked(3, lam, t), lam, 5).unwrap();
            for (k, &a) in c.coeffs().iter().enumerate() {
                let want = if k == 3 { 1.0 } else { 0.0 };
                assert!((a - want).abs() < 1e-10, "lam={lam} k={k} a={a}");
            }
        }
    }

    #[test]
    fn constant_and_linear_inputs() {
        let c = gegenbauer_coeffs(|_| 1.0_f64, 1.0, 4).unwrap();
        assert!((c.coeffs()[0] - 1.0).abs() < 1e-12);
        assert!(c.coeffs()[1..].iter().all(|a| a.abs() < 1e-10));

        let c = gegenbauer_coeffs(|t: f64| t, 1.0, 3).unwrap();
        let plain = c.plain().unwrap();
        assert!(plain.iter().enumerate().all(|(k, a)| k == 1 || a.abs() < 1e-10));
        for &t in &[-0.8, 0.1, 0.6] {
            assert!((plain[1] * 2.0 * t - t).abs() < 1e-10);
        }
    }

    #[test]
    fn synth_examples() {
        let one = ExpansionCoeffs::new(0.8_f64, vec![1.0]).unwrap();
        assert_eq!(gegenbauer_synth(&one, -0.4).unwrap(), 1.0);

        let sq = gegenbauer_coeffs(|t: f64| t * t, 1.0, 2).unwrap();
        assert!((gegenbauer_synth(&sq, 0.4).unwrap() - 0.16).abs() < 1e-12);
    }

    #[test]
    fn exp_round_trip() {
        let c = gegenbauer_coeffs(f64::exp, 0.75, 20).unwrap();
        assert!((gegenbauer_synth(&c, 0.1).unwrap() - 0.1_f64.exp()).abs() < 1e-10);
        let worst = (0..=40)
            .map(|i| -1.0 + i as f64 / 20.0)
            .map(|t| (gegenbauer_synth(&c, t).unwrap() - t.exp()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn chebyshev_round_trip_at_lambda_zero() {
        let f = |t: f64| 1.0 / (2.0 - t);
        let c = gegenbauer_coeffs(f, 0.0, 30).unwrap();
        for &t in &[-1.0, -0.3, 0.5, 1.0] {
            assert!((gegenbauer_synth(&c, t).unwrap() - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn synth_matches_direct_sum() {
        let c = ExpansionCoeffs::new(-0.2_f64, vec![0.3, -1.2, 0.7, 2.0, -0.1, 0.05]).unwrap();
        for &t in &[-1.0, -0.5, 0.0, 0.33, 1.0] {
            let direct: f64 = c
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, a)| a * renorm_unchecked(n, -0.2, t))
                .sum();
            assert!((gegenbauer_synth(&c, t).unwrap() - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn expansion_rejects_non_finite() {
        assert!(ExpansionCoeffs::new(1.0_f64, vec![1.0, f64::NAN]).is_err());
        assert!(ExpansionCoeffs::new(1.0_f64, vec![]).is_err());
    }

    #[test]
    fn single_precision_smoke() {
        let v = gegenbauer_all(2, 1.0_f32, 0.5).unwrap();
        assert!(v[2].abs() < 1e-6);
        let c = gegenbauer_coeffs(|t: f32| t * t, 1.0_f32, 2).unwrap();
        assert!((gegenbauer_synth(&c, 0.4).unwrap() - 0.16).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn parity(n in 0usize..40, lam in -0.45f64..5.0, t in -1.0f64..=1.0) {
            prop_assume!(lam.abs() > 1e-3);
            let p = gegenbauer_all(n, lam, t).unwrap()[n];
            let m = gegenbauer_all(n, lam, -t).unwrap()[n];
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((m - sign * p).abs() <= 1e-13 * p.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn recurrence_residual(n in 2usize..=40, lam in -0.4f64..5.0, t in -1.0f64..1.0) {
            prop_assume!(lam.abs() > 1e-3);
            let v = gegenbauer_all(n, lam, t).unwrap();
            let nf = n as f64;
            let terms = [
                nf * v[n],
                2.0 * t * (nf + lam - 1.0) * v[n - 1],
                (nf + 2.0 * lam - 2.0) * v[n - 2],
            ];
            let scale = terms.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let resid = terms[0] - terms[1] + terms[2];
            prop_assert!(resid.abs() <= 1e-11 * scale.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn polynomial_round_trip(
            c in proptest::collection::vec(-2.0f64..2.0, 1..6),
            lam in -0.4f64..3.0,
        ) {
            let f = |t: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci);
            let coeffs = gegenbauer_coeffs(f, lam, c.len() + 1).unwrap();
            for i in 0..=20 {
                let t = -1.0 + i as f64 / 10.0;
                prop_assert!((gegenbauer_synth(&coeffs, t).unwrap() - f(t)).abs() < 1e-10);
            }
        }
    }
}
