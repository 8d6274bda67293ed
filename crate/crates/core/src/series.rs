//! Abel summation and the Gegenbauer–Legendre expansions it is used for.
//!
//! On the cut the series Σ R_n(t) F_{n+λ-1/2}^{κ-λ}(±x) converge only
//! conditionally (their sums jump at t = x), so they are evaluated as
//! Abel means Σ a_n r^n at r_k = 1 - 2^{-k} and extrapolated to r → 1.

use num_complex::Complex;
use serde::Serialize;

use crate::closed_form::{one_minus_sq_pow, sq_minus_one_pow};
use crate::error::{Error, Result};
use crate::gegenbauer::RenormIter;
use crate::kernels::{gamma_real, rgamma};
use crate::legendre::{offcut_q_phase_removed, DegreeLadder, FerrersKind};
use crate::quadrature::{check_lambda, check_on_cut};
use crate::scalar::{cos_pi, is_nonpositive_integer, sin_pi, Real};

/// First and last Abel radius exponents: r_k = 1 - 2^{-k}.
pub const ABEL_K_MIN: u32 = 4;
pub const ABEL_K_MAX: u32 = 12;

/// Terms per radius are capped at this multiple of 2^k, enough for r^n to
/// fall below 1e-20.
pub const ABEL_CAP_PER_SCALE: usize = 48;

/// Minimum |t - x| accepted by [`series_lhs`] on the cut.
pub const EXCLUSION_WINDOW: f64 = 0.05;

/// Term budget for plain partial sums of the off-cut family.
pub const PARTIAL_SUM_MAX_TERMS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SeriesFamily {
    /// Σ R_n(t) P(x): the first-kind expansion.
    #[serde(rename = "P-plus")]
    PPlus,
    /// Σ R_n(t) Q(x).
    #[serde(rename = "Q-plus")]
    QPlus,
    /// Σ (-1)^n R_n(t) P(-x).
    #[serde(rename = "P-minus")]
    PMinus,
    /// Σ (-1)^n R_n(t) Q(-x).
    #[serde(rename = "Q-minus")]
    QMinus,
    /// Σ R_n(t) e^{-iπμ}𝔔(z) with z > 1 passed in place of x.
    #[serde(rename = "offcut")]
    Offcut,
}

impl SeriesFamily {
    pub const ALL: [SeriesFamily; 5] = [
        SeriesFamily::PPlus,
        SeriesFamily::QPlus,
        SeriesFamily::PMinus,
        SeriesFamily::QMinus,
        SeriesFamily::Offcut,
    ];

    fn kind(self) -> Option<FerrersKind> {
        match self {
            SeriesFamily::PPlus | SeriesFamily::PMinus => Some(FerrersKind::P),
            SeriesFamily::QPlus | SeriesFamily::QMinus => Some(FerrersKind::Q),
            SeriesFamily::Offcut => None,
        }
    }

    fn is_minus(self) -> bool {
        matches!(self, SeriesFamily::PMinus | SeriesFamily::QMinus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationMethod {
    PartialSums,
    Abel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: usize,
    /// Radii actually used; empty for plain partial sums.
    pub radii: Vec<T>,
    /// Difference of the last two extrapolants, or the tail bound for
    /// partial sums.
    pub extrap_residual: T,
    pub method: SummationMethod,
}

fn radius<T: Real>(k: u32) -> T {
    T::one() - T::lit(0.5_f64.powi(k as i32))
}

fn cap(k: u32) -> usize {
    ABEL_CAP_PER_SCALE << k
}

/// Abel means at r_k, k = 4..12, Richardson-extrapolated in h = 1 - r.
///
/// Terms are drawn from `terms` once and reused across radii. The result
/// is accepted when the last two diagonal extrapolants agree to
/// `tol · max(1, |value|)`.
pub fn abel_sum<T: Real, I>(terms: I, tol: T) -> Result<SeriesResult<T>>
where
    I: IntoIterator<Item = Result<T>>,
{
    let needed = cap(ABEL_K_MAX);
    let mut buf: Vec<T> = Vec::with_capacity(needed.min(1 << 16));
    let mut exhausted = false;
    let mut iter = terms.into_iter();

    let floor = T::lit(1e-20).max(T::epsilon() * T::epsilon());
    let mut means = Vec::new();
    let mut radii = Vec::new();
    for k in ABEL_K_MIN..=ABEL_K_MAX {
        let r = radius::<T>(k);
        // r^n < floor once n > ln(floor)/ln(r)
        let n_stop = ((floor.ln() / r.ln()).ceil().as_f64() as usize).min(cap(k));
        while buf.len() < n_stop && !exhausted {
            match iter.next() {
                Some(v) => {
                    let v = v?;
                    if !v.is_finite() {
                        return Err(Error::NonFinite { at: buf.len() as f64 });
                    }
                    buf.push(v);
                }
                None => exhausted = true,
            }
        }
        let mut s = T::zero();
        let mut comp = T::zero();
        let mut rn = T::one();
        for &a in buf.iter().take(n_stop) {
            // Kahan summation; the means are differenced below
            let y = a * rn - comp;
            let tmp = s + y;
            comp = (tmp - s) - y;
            s = tmp;
            rn *= r;
        }
        means.push(s);
        radii.push(r);
    }

    // Richardson table: column j removes the h^j term, h halves per row
    let rows = means.len();
    let mut table: Vec<Vec<T>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row = vec![means[i]];
        for j in 1..=i {
            let f = T::lit(2f64.powi(j as i32));
            let v = row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (f - T::one());
            row.push(v);
        }
        table.push(row);
    }
    let value = table[rows - 1][rows - 1];
    let residual = (value - table[rows - 2][rows - 2]).abs();
    if !(residual <= tol * value.abs().max(T::one())) {
        return Err(Error::NotConverged {
            what: "Abel summation",
            estimate: value.as_f64(),
            residual: residual.as_f64(),
        });
    }
    Ok(SeriesResult {
        value,
        terms_used: buf.len(),
        radii,
        extrap_residual: residual,
        method: SummationMethod::Abel,
    })
}

fn check_series_args<T: Real>(family: SeriesFamily, lambda: T, kappa: T, x: T, t: T) -> Result<()> {
    if !(t > -T::one() && t < T::one()) {
        return Err(Error::domain("t must lie in (-1, 1)"));
    }
    if family == SeriesFamily::Offcut {
        check_lambda(lambda)?;
        if !(x > T::one()) {
            return Err(Error::domain("z must be > 1"));
        }
        return Ok(());
    }
    check_on_cut(lambda, kappa, x)?;
    if !((t - x).abs() >= T::lit(EXCLUSION_WINDOW)) {
        return Err(Error::domain("|t - x| must be >= 0.05"));
    }
    Ok(())
}

/// Lazily generated terms of one of the expansions, including the (±1)^n
/// sign and the renormalized Gegenbauer factor.
pub struct SeriesTerms<T> {
    gegen: RenormIter<T>,
    ladder: Option<DegreeLadder<T>>,
    offcut: Option<(T, T, T)>,
    sign: T,
    flip: bool,
    n: usize,
}

impl<T: Real> SeriesTerms<T> {
    pub fn new(family: SeriesFamily, lambda: T, kappa: T, x: T, t: T) -> Result<Self> {
        check_series_args(family, lambda, kappa, x, t)?;
        let nu0 = lambda - T::lit(0.5);
        let mu = kappa - lambda;
        let (ladder, offcut) = match family.kind() {
            Some(kind) => {
                let arg = if family.is_minus() { -x } else { x };
                (Some(DegreeLadder::new(kind, nu0, mu, arg)?), None)
            }
            None => (None, Some((nu0, mu, x))),
        };
        Ok(Self {
            gegen: RenormIter::new(lambda, t),
            ladder,
            offcut,
            sign: T::one(),
            flip: family.is_minus(),
            n: 0,
        })
    }
}

impl<T: Real> Iterator for SeriesTerms<T> {
    type Item = Result<T>;

    fn next(&mut self) -> Option<Result<T>> {
        let r = self.gegen.next()?;
        let f = match (&mut self.ladder, self.offcut) {
            (Some(l), _) => l.next()?,
            (None, Some((nu0, mu, z))) => {
                match offcut_q_phase_removed(nu0 + T::from_count(self.n), mu, z) {
                    Ok(v) => v,
                    Err(e) => return Some(Err(e)),
                }
            }
            (None, None) => unreachable!("series terms need a ladder or an off-cut argument"),
        };
        let term = self.sign * r * f;
        if self.flip {
            self.sign = -self.sign;
        }
        self.n += 1;
        Some(Ok(term))
    }
}

/// Sums the chosen expansion at (λ, κ, x, t); for [`SeriesFamily::Offcut`]
/// `x` carries z > 1.
///
/// The off-cut family converges geometrically and is summed plainly, with
/// Abel summation as the fallback when the tail does not settle.
pub fn series_lhs<T: Real>(
    family: SeriesFamily,
    lambda: T,
    kappa: T,
    x: T,
    t: T,
    tol: T,
) -> Result<SeriesResult<T>> {
    let terms = SeriesTerms::new(family, lambda, kappa, x, t)?;
    if family == SeriesFamily::Offcut {
        if let Some(res) = partial_sums(terms, x)? {
            return Ok(res);
        }
        return abel_sum(SeriesTerms::new(family, lambda, kappa, x, t)?, tol);
    }
    abel_sum(terms, tol)
}

/// Plain summation for the off-cut family. The terms decay like ρ^{-n},
/// ρ = z + √(z²-1), so the tail after term n is bounded by |a_n|/(ρ-1)
/// up to the slowly varying Gegenbauer factor.
fn partial_sums<T: Real>(terms: SeriesTerms<T>, z: T) -> Result<Option<SeriesResult<T>>> {
    let rho = z + ((z - T::one()) * (z + T::one())).sqrt();
    let tail_factor = rho / (rho - T::one());
    let mut sum = T::zero();
    let mut recent = [T::zero(); 4];
    for (n, term) in terms.take(PARTIAL_SUM_MAX_TERMS).enumerate() {
        let a = term?;
        sum += a;
        recent[n % 4] = a.abs();
        if n >= 8 {
            let bound = recent.iter().fold(T::zero(), |m, &v| m.max(v)) * tail_factor;
            if bound <= T::epsilon() * sum.abs() {
                return Ok(Some(SeriesResult {
                    value: sum,
                    terms_used: n + 1,
                    radii: Vec::new(),
                    extrap_residual: bound,
                    method: SummationMethod::PartialSums,
                }));
            }
        }
    }
    Ok(None)
}

/// Coefficient of the P-family closed forms,
/// √π (1-x²)^{(κ-λ)/2} / (2^{λ-1/2} Γ(λ+1) Γ(1/2-κ)).
fn p_amplitude<T: Real>(lambda: T, kappa: T, x: T) -> T {
    let half = T::lit(0.5);
    T::PI().sqrt() * rgamma(half - kappa) * rgamma(lambda + T::one())
        / T::lit(2.0).powf(lambda - half)
        * one_minus_sq_pow(x, (kappa - lambda) * half)
}

/// Γ(κ+1/2) √π / (2^{λ+1/2} Γ(λ+1)), shared by the Q-family and off-cut
/// closed forms.
fn q_coefficient<T: Real>(lambda: T, kappa: T) -> Result<T> {
    let half = T::lit(0.5);
    if is_nonpositive_integer(kappa + half) {
        return Err(Error::pole(format!("Gamma(kappa+1/2) pole at kappa = {kappa}")));
    }
    let g = gamma_real(kappa + half).into_result("Gamma(kappa+1/2)")?;
    Ok(T::PI().sqrt() * g * rgamma(lambda + T::one()) / T::lit(2.0).powf(lambda + half))
}

/// Branchwise closed form of each expansion.
///
/// On the cut κ ≤ 1/2 is accepted (at κ = 1/2 the P-family amplitude
/// vanishes); for [`SeriesFamily::Offcut`] `x` carries z > 1.
pub fn series_rhs<T: Real>(family: SeriesFamily, lambda: T, kappa: T, x: T, t: T) -> Result<T> {
    check_lambda(lambda)?;
    if !(t > -T::one() && t < T::one()) {
        return Err(Error::domain("t must lie in (-1, 1)"));
    }
    let half = T::lit(0.5);
    let e = -kappa - half;
    if family == SeriesFamily::Offcut {
        if !(x > T::one()) {
            return Err(Error::domain("z must be > 1"));
        }
        return Ok(q_coefficient(lambda, kappa)?
            * sq_minus_one_pow(x, (kappa - lambda) * half)
            * (x - t).powf(e));
    }
    if !(kappa <= half) {
        return Err(Error::domain("kappa must be <= 1/2"));
    }
    if !(x > -T::one() && x < T::one()) {
        return Err(Error::domain("x must lie in (-1, 1)"));
    }
    if t == x {
        return Err(Error::domain("series closed forms are discontinuous at t = x"));
    }
    let below = t < x;
    let d = (t - x).abs().powf(e);
    let c = cos_pi(kappa + half);
    let v = match family {
        SeriesFamily::PPlus => {
            if below {
                T::zero()
            } else {
                p_amplitude(lambda, kappa, x) * d
            }
        }
        SeriesFamily::PMinus => {
            if below {
                p_amplitude(lambda, kappa, x) * d
            } else {
                T::zero()
            }
        }
        SeriesFamily::QPlus | SeriesFamily::QMinus => {
            let a = q_coefficient(lambda, kappa)? * one_minus_sq_pow(x, (kappa - lambda) * half);
            let cos_branch = (family == SeriesFamily::QPlus) != below;
            if cos_branch {
                a * c * d
            } else {
                a * d
            }
        }
        SeriesFamily::Offcut => unreachable!(),
    };
    Ok(v)
}

/// Closed form of the boundary-value expansion
/// Σ R_n [Q ∓ (iπ/2) P](x) C_n(t), returned as (upper, lower):
/// coefficient × (1-x²)^{(κ-λ)/2} × {(x-t)^{-κ-1/2} or e^{∓iπ(κ+1/2)}(t-x)^{-κ-1/2}}.
pub fn boundary_series_rhs<T: Real>(
    lambda: T,
    kappa: T,
    x: T,
    t: T,
) -> Result<(Complex<T>, Complex<T>)> {
    check_on_cut(lambda, kappa, x)?;
    if !(t > -T::one() && t < T::one()) || t == x {
        return Err(Error::domain("t must lie in (-1, 1) and differ from x"));
    }
    let half = T::lit(0.5);
    let a = q_coefficient(lambda, kappa)? * one_minus_sq_pow(x, (kappa - lambda) * half);
    let d = (t - x).abs().powf(-kappa - half);
    let upper = if t < x {
        Complex::new(a * d, T::zero())
    } else {
        let s = kappa + half;
        Complex::new(cos_pi(s), -sin_pi(s)) * (a * d)
    };
    Ok((upper, upper.conj()))
}
