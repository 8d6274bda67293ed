//! Tanh-sinh (double exponential) quadrature and the singular integrals
//! built on it.
//!
//! The substitution t = tanh(π/2 · sinh u) clusters nodes double
//! exponentially at both ends of the interval, so algebraic endpoint
//! singularities of exponent > -1 are integrated at full speed. Integrands
//! receive the distance of each node to both endpoints computed without
//! cancellation, which is what makes exponents close to -1 usable.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gegenbauer::renorm_unchecked;
use crate::scalar::Real;

/// Finest refinement level; level k uses step 2^-k in the u variable.
pub const MAX_LEVEL: usize = 12;

/// Default requested tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Margin kept from the parameter boundaries λ = -1/2 and κ = 1/2.
pub const DOMAIN_MARGIN: f64 = 1e-3;

const U_MAX: f64 = 6.0;

#[derive(Debug, Clone, Copy)]
struct Node {
    /// 1 - |tanh(π/2 sinh u)|
    comp: f64,
    /// dt/du on [-1, 1]
    weight: f64,
}

fn node(u: f64) -> Node {
    let v = std::f64::consts::FRAC_PI_2 * u.sinh();
    let comp = 2.0 / (1.0 + (2.0 * v).exp());
    Node {
        comp,
        weight: std::f64::consts::FRAC_PI_2 * u.cosh() * comp * (2.0 - comp),
    }
}

/// Node tables per level, built once and shared read-only afterwards.
fn tables() -> &'static [Vec<Node>] {
    static TABLES: OnceLock<Vec<Vec<Node>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        // level 0: u = 1, 2, ..., U_MAX (the centre node is handled separately)
        levels.push((1..=U_MAX as usize).map(|k| node(k as f64)).collect());
        for level in 1..=MAX_LEVEL {
            let h = 0.5_f64.powi(level as i32);
            let nodes = (0..)
                .map(|j| (2 * j + 1) as f64 * h)
                .take_while(|&u| u <= U_MAX)
                .map(node)
                .collect();
            levels.push(nodes);
        }
        levels
    })
}

/// A quadrature node together with its exact distances to the endpoints.
#[derive(Debug, Clone, Copy)]
pub struct Abscissa<T> {
    pub t: T,
    pub from_a: T,
    pub to_b: T,
}

/// Result of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// |I_k - I_{k-1}| for the final level k.
    pub err_est: T,
    pub evals: usize,
    /// Interior abscissas at which the original interval was split.
    pub splits: Vec<T>,
    /// Successive-level differences, one per refinement level.
    pub level_errors: Vec<T>,
}

/// Integrates `f` over (a, b) with `f` seeing plain abscissas.
///
/// Nodes that round onto an endpoint are dropped. For singularities
/// stronger than about |t-a|^{-1/2} use [`tanh_sinh_with_distances`].
pub fn tanh_sinh<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<QuadResult<T>> {
    tanh_sinh_with_distances(
        |x: Abscissa<T>| {
            if x.t == a || x.t == b {
                T::zero()
            } else {
                f(x.t)
            }
        },
        a,
        b,
        tol,
    )
}

/// Integrates `f` over (a, b); `f` receives each node with its distances to
/// both endpoints.
///
/// Convergence is declared once two successive levels agree to
/// `tol · |I|`, or to the rounding floor of the node sum, whichever is
/// larger. At least three levels are always evaluated.
pub fn tanh_sinh_with_distances<T: Real, F: Fn(Abscissa<T>) -> T>(
    f: F,
    a: T,
    b: T,
    tol: T,
) -> Result<QuadResult<T>> {
    if !(a < b) {
        return Err(Error::domain(format!("tanh_sinh needs a < b, got [{a}, {b}]")));
    }
    if !(tol > T::zero()) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let half = (b - a) * T::lit(0.5);
    let mid = a + half;
    let two = T::lit(2.0);
    let mut evals = 0usize;

    let eval = |x: Abscissa<T>, evals: &mut usize| -> Result<T> {
        *evals += 1;
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { at: x.t.as_f64() })
        }
    };
    let pair_sum = |nodes: &[Node], evals: &mut usize| -> Result<(T, T)> {
        let mut s = T::zero();
        let mut s_abs = T::zero();
        for nd in nodes {
            let c = T::lit(nd.comp);
            let w = T::lit(nd.weight);
            let near = half * c;
            if near == T::zero() || w == T::zero() {
                continue;
            }
            let far = half * (two - c);
            let left = eval(
                Abscissa {
                    t: a + near,
                    from_a: near,
                    to_b: far,
                },
                evals,
            )?;
            let right = eval(
                Abscissa {
                    t: b - near,
                    from_a: far,
                    to_b: near,
                },
                evals,
            )?;
            s += w * (left + right);
            s_abs += w * (left.abs() + right.abs());
        }
        Ok((s, s_abs))
    };

    let tabs = tables();
    let centre = eval(
        Abscissa {
            t: mid,
            from_a: half,
            to_b: half,
        },
        &mut evals,
    )?;
    let w0 = T::FRAC_PI_2();
    let (s0, a0) = pair_sum(&tabs[0], &mut evals)?;
    let mut sum = w0 * centre + s0;
    let mut abs_sum = w0 * centre.abs() + a0;
    let mut prev = half * sum;
    let mut level_errors = Vec::with_capacity(MAX_LEVEL);
    let floor_factor = T::epsilon() * T::lit(64.0);

    for (level, nodes) in tabs.iter().enumerate().skip(1) {
        let (s, sa) = pair_sum(nodes, &mut evals)?;
        sum += s;
        abs_sum += sa;
        let h = T::lit(0.5_f64.powi(level as i32));
        let current = half * h * sum;
        let err = (current - prev).abs();
        level_errors.push(err);
        let l1 = half * h * abs_sum;
        if level >= 2 && err <= (tol * current.abs()).max(floor_factor * l1) {
            return Ok(QuadResult {
                value: current,
                err_est: err,
                evals,
                splits: Vec::new(),
                level_errors,
            });
        }
        prev = current;
    }
    Err(Error::NotConverged {
        what: "tanh-sinh quadrature",
        estimate: prev.as_f64(),
        residual: level_errors.last().map_or(f64::NAN, |e| e.as_f64()),
    })
}

/// Checks λ ≥ -1/2 + margin, κ ≤ 1/2 - margin and -1 < x < 1.
pub fn check_on_cut<T: Real>(lambda: T, kappa: T, x: T) -> Result<()> {
    check_lambda(lambda)?;
    if !(kappa <= T::lit(0.5 - DOMAIN_MARGIN)) {
        return Err(Error::domain("kappa must be < 1/2"));
    }
    if !(x > -T::one() && x < T::one()) {
        return Err(Error::domain("x must lie in (-1, 1)"));
    }
    Ok(())
}

pub(crate) fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda >= T::lit(-0.5 + DOMAIN_MARGIN)) {
        return Err(Error::domain("lambda must be > -1/2"));
    }
    Ok(())
}

/// (1 - t²)^p from the two factors 1 - t and 1 + t.
#[inline]
fn weight<T: Real>(one_minus: T, one_plus: T, p: T) -> T {
    one_minus.powf(p) * one_plus.powf(p)
}

/// ((n+λ)/λ) ∫_x^1 (1-t²)^{λ-1/2} (t-x)^{-κ-1/2} C_n^λ(t) dt.
pub fn integral_right_lhs<T: Real>(
    n: usize,
    lambda: T,
    kappa: T,
    x: T,
    tol: T,
) -> Result<QuadResult<T>> {
    check_on_cut(lambda, kappa, x)?;
    let p = lambda - T::lit(0.5);
    let q = -kappa - T::lit(0.5);
    let one_plus_x = T::one() + x;
    let mut res = tanh_sinh_with_distances(
        |s: Abscissa<T>| {
            weight(s.to_b, one_plus_x + s.from_a, p)
                * s.from_a.powf(q)
                * renorm_unchecked(n, lambda, s.t)
        },
        x,
        T::one(),
        tol,
    )?;
    res.splits.push(x);
    Ok(res)
}

/// ((n+λ)/λ) ∫_{-1}^x (1-t²)^{λ-1/2} (x-t)^{-κ-1/2} C_n^λ(t) dt.
pub fn integral_left_lhs<T: Real>(
    n: usize,
    lambda: T,
    kappa: T,
    x: T,
    tol: T,
) -> Result<QuadResult<T>> {
    check_on_cut(lambda, kappa, x)?;
    let p = lambda - T::lit(0.5);
    let q = -kappa - T::lit(0.5);
    let one_minus_x = T::one() - x;
    let mut res = tanh_sinh_with_distances(
        |s: Abscissa<T>| {
            weight(one_minus_x + s.to_b, s.from_a, p)
                * s.to_b.powf(q)
                * renorm_unchecked(n, lambda, s.t)
        },
        -T::one(),
        x,
        tol,
    )?;
    res.splits.push(x);
    Ok(res)
}

fn check_offcut<T: Real>(lambda: T, z: T) -> Result<()> {
    check_lambda(lambda)?;
    if !(z > T::one()) {
        return Err(Error::domain("z must be > 1"));
    }
    Ok(())
}

/// ((n+λ)/λ) ∫_{-1}^1 (1-t²)^{λ-1/2} (z-t)^{-κ-1/2} C_n^λ(t) dt for z > 1.
///
/// For n ≥ 1 the Rodrigues formula is used to move all n derivatives onto
/// (z-t)^{-κ-1/2}, which leaves the sign-definite integrand
/// (1-t²)^{n+λ-1/2} (z-t)^{-κ-1/2-n}. The plain integrand cancels to
/// about ρ^{-n} of its own size, ρ = z + √(z²-1), and loses that many
/// digits; see [`integral_offcut_lhs_literal`].
pub fn integral_offcut_lhs<T: Real>(
    n: usize,
    lambda: T,
    kappa: T,
    z: T,
    tol: T,
) -> Result<QuadResult<T>> {
    check_offcut(lambda, z)?;
    if n == 0 {
        return integral_offcut_lhs_literal(0, lambda, kappa, z, tol);
    }
    let half = T::lit(0.5);
    let s = kappa + half;
    // ((n+λ)/λ) (2λ)_n (κ+1/2)_n / (2^n n! (λ+1/2)_n), with the j = 0 factor simplified
    let mut pref = s * (T::from_count(n) + lambda) / (lambda + half);
    for j in 1..n {
        let jf = T::from_count(j);
        pref *= (s + jf) * (T::lit(2.0) * lambda + jf)
            / (T::lit(2.0) * (jf + T::one()) * (lambda + half + jf));
    }
    if pref == T::zero() {
        // (κ+1/2) is a nonpositive integer > -n, so the n-th derivative vanishes
        return Ok(QuadResult {
            value: T::zero(),
            err_est: T::zero(),
            evals: 0,
            splits: Vec::new(),
            level_errors: Vec::new(),
        });
    }
    let p = T::from_count(n) + lambda - half;
    let q = -s - T::from_count(n);
    let z_minus_1 = z - T::one();
    let mut res = tanh_sinh_with_distances(
        |x: Abscissa<T>| weight(x.to_b, x.from_a, p) * (z_minus_1 + x.to_b).powf(q),
        -T::one(),
        T::one(),
        tol,
    )?;
    res.value *= pref;
    res.err_est *= pref.abs();
    res.level_errors.iter_mut().for_each(|e| *e *= pref.abs());
    Ok(res)
}

/// Same integral as [`integral_offcut_lhs`], integrating the Gegenbauer
/// polynomial directly.
pub fn integral_offcut_lhs_literal<T: Real>(
    n: usize,
    lambda: T,
    kappa: T,
    z: T,
    tol: T,
) -> Result<QuadResult<T>> {
    check_offcut(lambda, z)?;
    let p = lambda - T::lit(0.5);
    let q = -kappa - T::lit(0.5);
    let z_minus_1 = z - T::one();
    tanh_sinh_with_distances(
        |x: Abscissa<T>| {
            weight(x.to_b, x.from_a, p)
                * (z_minus_1 + x.to_b).powf(q)
                * renorm_unchecked(n, lambda, x.t)
        },
        -T::one(),
        T::one(),
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-12;

    #[test]
    fn elementary_singular_integrals() {
        let r = tanh_sinh(|t: f64| t.powf(-0.5), 0.0, 1.0, TOL).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = tanh_sinh_with_distances(
            |x: Abscissa<f64>| (x.from_a * x.to_b).powf(-0.5),
            -1.0,
            1.0,
            TOL,
        )
        .unwrap();
        assert!((r.value - PI).abs() < 1e-12);
        // from t alone, 1 - t² is only known to rounding near ±1
        let r = tanh_sinh(|t: f64| (1.0 - t * t).powf(-0.5), -1.0, 1.0, 1e-7).unwrap();
        assert!((r.value - PI).abs() < 1e-7);
        let r = tanh_sinh(|t: f64| (1.0 / t).ln(), 0.0, 1.0, TOL).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strong_endpoint_singularity_with_distances() {
        // ∫_0^1 t^{-0.95} dt = 20
        let r = tanh_sinh_with_distances(|x: Abscissa<f64>| x.from_a.powf(-0.95), 0.0, 1.0, TOL)
            .unwrap();
        assert!((r.value - 20.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn error_estimate_shrinks_with_level() {
        let r = tanh_sinh(|t: f64| t.exp() * (1.0 - t * t).sqrt(), -1.0, 1.0, 1e-14).unwrap();
        assert!(r.err_est <= 1e-14 * r.value.abs() || r.err_est < 1e-15);
        for pair in r.level_errors.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12) || pair[1] < 1e-15, "{:?}", r.level_errors);
        }
    }

    #[test]
    fn rejects_bad_interval_and_non_finite() {
        assert!(matches!(tanh_sinh(|t: f64| t, 1.0, 0.0, TOL), Err(Error::Domain(_))));
        assert!(matches!(
            tanh_sinh(|t: f64| if t > 0.3 { f64::NAN } else { t }, 0.0, 1.0, TOL),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn not_converged_reports_estimate() {
        // 1/t is not integrable at 0: the level sums keep growing
        let r = tanh_sinh_with_distances(|x: Abscissa<f64>| x.from_a.recip(), 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::NotConverged { .. })), "{r:?}");
    }

    #[test]
    fn nodes_never_touch_the_endpoints() {
        let r = tanh_sinh_with_distances(
            |x: Abscissa<f64>| {
                assert!(x.from_a > 0.0 && x.to_b > 0.0);
                1.0
            },
            -1.0,
            1.0,
            TOL,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn right_integral_elementary_cases() {
        let r = integral_right_lhs(0, 0.5, 0.0, 0.5_f64, TOL).unwrap();
        assert!((r.value - std::f64::consts::SQRT_2).abs() < 1e-11);
        assert_eq!(r.splits, vec![0.5]);
        let r = integral_right_lhs(1, 0.5, 0.0, 0.5_f64, TOL).unwrap();
        assert!((r.value - 2.828_427_124_746_190_3).abs() < 1e-11);
    }

    #[test]
    fn left_integral_elementary_case() {
        let r = integral_left_lhs(0, 0.5, 0.0, 0.5_f64, TOL).unwrap();
        assert!((r.value - 2.449_489_742_783_178).abs() < 1e-11);
    }

    #[test]
    fn frozen_integral_values() {
        // 30-digit quadrature values, see tests/oracles/reference_values.py
        let r = integral_right_lhs(3, 1.25, -0.3, 0.2_f64, TOL).unwrap();
        assert!((r.value - -1.518_823_934_184_745_5).abs() < 1e-10);
        let r = integral_left_lhs(2, 0.75, 0.1, -0.3_f64, TOL).unwrap();
        assert!((r.value - -0.466_351_241_485_156_1).abs() < 1e-10);
        let r = integral_offcut_lhs(2, 1.0, 0.25, 1.5_f64, TOL).unwrap();
        assert!((r.value - 0.359_028_765_195_547_4).abs() < 1e-11);
    }

    #[test]
    fn offcut_neumann_n0() {
        let r = integral_offcut_lhs(0, 0.5, 0.5, 2.0_f64, TOL).unwrap();
        assert!((r.value - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn offcut_rodrigues_matches_literal_when_well_conditioned() {
        for n in 1..5 {
            for &(lam, kap, z) in &[(0.5, 0.5, 2.0), (1.5, -0.3, 1.3), (0.2, 1.1, 3.0), (2.0, -1.0, 1.2)] {
                let a = integral_offcut_lhs(n, lam, kap, z, TOL).unwrap().value;
                let b = integral_offcut_lhs_literal(n, lam, kap, z, TOL).unwrap().value;
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-3), "n={n} {lam} {kap} {z}: {a} {b}");
            }
        }
    }

    #[test]
    fn offcut_polynomial_kernel_vanishes() {
        // κ + 1/2 = -1: (z-t)^1 is linear, so every n ≥ 2 integral is zero
        let r = integral_offcut_lhs(3, 0.75, -1.5, 2.0_f64, TOL).unwrap();
        assert_eq!(r.value, 0.0);
        let lit = integral_offcut_lhs_literal(3, 0.75, -1.5, 2.0_f64, TOL).unwrap();
        assert!(lit.value.abs() < 1e-12);
    }

    #[test]
    fn domain_guards() {
        assert_eq!(
            integral_right_lhs(0, 0.5, 0.6, 0.0_f64, TOL).unwrap_err(),
            Error::Domain("kappa must be < 1/2".into())
        );
        assert!(integral_right_lhs(0, 0.5, 0.4995, 0.0_f64, TOL).is_err());
        assert!(integral_left_lhs(0, -0.4995, 0.0, 0.0_f64, TOL).is_err());
        assert!(integral_left_lhs(0, 0.5, 0.0, 1.0_f64, TOL).is_err());
        assert!(integral_offcut_lhs(0, 0.5, 0.0, 1.0_f64, TOL).is_err());
    }

    #[test]
    fn n0_integrands_are_positive() {
        for &(lam, kap, x) in &[(-0.45, 0.45, 0.3), (2.0, -2.0, -0.9), (0.0, 0.0, 0.0)] {
            assert!(integral_right_lhs(0, lam, kap, x, 1e-10).unwrap().value > 0.0);
            assert!(integral_left_lhs(0, lam, kap, x, 1e-10).unwrap().value > 0.0);
        }
    }

    #[test]
    fn shared_tables_initialise_once_across_threads() {
        let handles: Vec<_> = (0..8)
            .map(|k| {
                std::thread::spawn(move || {
                    tanh_sinh(|t: f64| t.powi(k), 0.0, 1.0, TOL).unwrap().value
                })
            })
            .collect();
        for (k, h) in handles.into_iter().enumerate() {
            assert!((h.join().unwrap() - 1.0 / (k as f64 + 1.0)).abs() < 1e-12);
        }
    }
}
