//! Identity checks: each side of an identity is computed by an independent
//! route (quadrature or Abel summation against Gamma/Legendre closed forms)
//! and the two are compared under a mixed absolute/relative tolerance.
//!
//! The harness works in f64 only; reports are meant for serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value as Json};

use crate::closed_form::{
    boundary_rhs, left_rhs, left_rhs_q_form, neumann_rhs, offcut_rhs, right_rhs,
    split_combination,
};
use crate::error::{Error, Result};
use crate::gegenbauer::{gegenbauer_coeffs, gegenbauer_synth};
use crate::quadrature::{
    check_on_cut, integral_left_lhs, integral_offcut_lhs, integral_right_lhs, DOMAIN_MARGIN,
};
use crate::series::{series_lhs, series_rhs, SeriesFamily, EXCLUSION_WINDOW};

/// Default for quadrature identities (eq1.x, eq2.x).
pub const QUADRATURE_TOL: f64 = 1e-7;
/// Default for the Abel-summed expansions (eq3.x).
pub const SERIES_TOL: f64 = 1e-3;
/// Default for closed-form coherence checks and the closure round trip.
pub const COHERENCE_TOL: f64 = 1e-10;

/// Tolerance handed to the quadrature routines themselves.
const INNER_QUAD_TOL: f64 = 1e-12;
/// Tolerance handed to the Abel extrapolation.
const INNER_SERIES_TOL: f64 = 1e-5;

/// Degree of the expansion used when eq1.4-roundtrip is run without `n`.
pub const DEFAULT_CLOSURE_DEGREE: u32 = 20;

/// Environment variable capping sweep threads.
pub const MAX_THREADS_ENV: &str = "CUTLEG_MAX_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityId {
    Eq1_1,
    Eq1_2,
    Eq1_3,
    Eq1_4Roundtrip,
    Eq1_5,
    Eq1_6,
    Eq2_3Combination,
    Eq2_7,
    Eq2_8,
    Eq2_10,
    Eq3_2,
    Eq3_3,
    Eq3_4,
    Eq3_5,
}

impl IdentityId {
    pub const ALL: [IdentityId; 14] = [
        IdentityId::Eq1_1,
        IdentityId::Eq1_2,
        IdentityId::Eq1_3,
        IdentityId::Eq1_4Roundtrip,
        IdentityId::Eq1_5,
        IdentityId::Eq1_6,
        IdentityId::Eq2_3Combination,
        IdentityId::Eq2_7,
        IdentityId::Eq2_8,
        IdentityId::Eq2_10,
        IdentityId::Eq3_2,
        IdentityId::Eq3_3,
        IdentityId::Eq3_4,
        IdentityId::Eq3_5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Eq1_1 => "eq1.1",
            IdentityId::Eq1_2 => "eq1.2",
            IdentityId::Eq1_3 => "eq1.3",
            IdentityId::Eq1_4Roundtrip => "eq1.4-roundtrip",
            IdentityId::Eq1_5 => "eq1.5",
            IdentityId::Eq1_6 => "eq1.6",
            IdentityId::Eq2_3Combination => "eq2.3-combination",
            IdentityId::Eq2_7 => "eq2.7",
            IdentityId::Eq2_8 => "eq2.8",
            IdentityId::Eq2_10 => "eq2.10",
            IdentityId::Eq3_2 => "eq3.2",
            IdentityId::Eq3_3 => "eq3.3",
            IdentityId::Eq3_4 => "eq3.4",
            IdentityId::Eq3_5 => "eq3.5",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            IdentityId::Eq1_4Roundtrip => COHERENCE_TOL,
            IdentityId::Eq3_2 | IdentityId::Eq3_3 | IdentityId::Eq3_4 | IdentityId::Eq3_5 => {
                SERIES_TOL
            }
            _ => QUADRATURE_TOL,
        }
    }

    fn series_family(self) -> Option<SeriesFamily> {
        match self {
            IdentityId::Eq3_2 => Some(SeriesFamily::PPlus),
            IdentityId::Eq3_3 => Some(SeriesFamily::QPlus),
            IdentityId::Eq3_4 => Some(SeriesFamily::PMinus),
            IdentityId::Eq3_5 => Some(SeriesFamily::QMinus),
            _ => None,
        }
    }

    fn is_on_cut(self) -> bool {
        matches!(
            self,
            IdentityId::Eq2_3Combination
                | IdentityId::Eq2_7
                | IdentityId::Eq2_8
                | IdentityId::Eq2_10
                | IdentityId::Eq3_2
                | IdentityId::Eq3_3
                | IdentityId::Eq3_4
                | IdentityId::Eq3_5
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown identity '{s}'")))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Free parameters of an identity; each identity reads the subset it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IdentityParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

impl IdentityParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn lambda(mut self, v: f64) -> Self {
        self.lambda = Some(v);
        self
    }

    pub fn kappa(mut self, v: f64) -> Self {
        self.kappa = Some(v);
        self
    }

    pub fn x(mut self, v: f64) -> Self {
        self.x = Some(v);
        self
    }

    pub fn t(mut self, v: f64) -> Self {
        self.t = Some(v);
        self
    }

    pub fn z(mut self, v: f64) -> Self {
        self.z = Some(v);
        self
    }
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("missing parameter {name}")))
}

/// A real or complex identity side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl Value {
    fn complex(c: Complex64) -> Self {
        Value::Complex { re: c.re, im: c.im }
    }

    fn as_complex(self) -> Complex64 {
        match self {
            Value::Real(r) => Complex64::new(r, 0.0),
            Value::Complex { re, im } => Complex64::new(re, im),
        }
    }

    pub fn abs(self) -> f64 {
        self.as_complex().norm()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Value::Real(r) => write!(f, "{r:?}"),
            Value::Complex { re, im } if im < 0.0 => write!(f, "{re:?}{im:?}i"),
            Value::Complex { re, im } => write!(f, "{re:?}+{im:?}i"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub params: IdentityParams,
    pub lhs: Value,
    pub rhs: Value,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    pub diagnostics: BTreeMap<String, Json>,
}

/// abs_err and rel_err with the max(|lhs|, |rhs|, 1e-300) denominator.
pub fn mixed_errors(lhs: Value, rhs: Value) -> (f64, f64) {
    let d = (lhs.as_complex() - rhs.as_complex()).norm();
    (d, d / lhs.abs().max(rhs.abs()).max(1e-300))
}

/// abs_err ≤ tol or rel_err ≤ tol; NaN never passes.
pub fn passes(abs_err: f64, rel_err: f64, tol: f64) -> bool {
    abs_err <= tol || rel_err <= tol
}

impl IdentityReport {
    fn assemble(
        id: IdentityId,
        params: IdentityParams,
        lhs: Value,
        rhs: Value,
        tol: f64,
        diagnostics: BTreeMap<String, Json>,
    ) -> Self {
        let (abs_err, rel_err) = mixed_errors(lhs, rhs);
        Self::with_errors(id, params, lhs, rhs, abs_err, rel_err, tol, diagnostics)
    }

    #[allow(clippy::too_many_arguments)]
    fn with_errors(
        id: IdentityId,
        params: IdentityParams,
        lhs: Value,
        rhs: Value,
        abs_err: f64,
        rel_err: f64,
        tol: f64,
        diagnostics: BTreeMap<String, Json>,
    ) -> Self {
        IdentityReport {
            identity_id: id,
            params,
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            pass: passes(abs_err, rel_err, tol),
            diagnostics,
        }
    }

    /// A failed report for a computation that raised `err`.
    fn failed(id: IdentityId, params: IdentityParams, tol: f64, err: &Error) -> Self {
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert("error".to_string(), json!(err.to_string()));
        IdentityReport {
            identity_id: id,
            params,
            lhs: Value::Real(f64::NAN),
            rhs: Value::Real(f64::NAN),
            abs_err: f64::INFINITY,
            rel_err: f64::INFINITY,
            tol,
            pass: false,
            diagnostics,
        }
    }
}

fn check_offcut_params(lambda: f64, z: f64) -> Result<()> {
    if !(lambda >= -0.5 + DOMAIN_MARGIN) {
        return Err(Error::domain("lambda must be > -1/2"));
    }
    if !(z >= 1.0 + DOMAIN_MARGIN) {
        return Err(Error::domain("z must be > 1"));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t > -1.0 && t < 1.0) {
        return Err(Error::domain("t must lie in (-1, 1)"));
    }
    Ok(())
}

fn check_fixed(v: Option<f64>, fixed: f64, name: &str, id: IdentityId) -> Result<()> {
    match v {
        Some(v) if v != fixed => Err(Error::Domain(format!("{id} fixes {name} = {fixed}"))),
        _ => Ok(()),
    }
}

/// Domain guards for `id`, run before any computation.
pub fn validate(id: IdentityId, p: &IdentityParams) -> Result<()> {
    use IdentityId::*;
    match id {
        Eq1_1 => {
            need(p.n, "n")?;
            need(p.kappa, "kappa")?;
            check_offcut_params(need(p.lambda, "lambda")?, need(p.z, "z")?)
        }
        Eq1_2 => {
            need(p.n, "n")?;
            check_fixed(p.kappa, 0.5, "kappa", id)?;
            check_offcut_params(need(p.lambda, "lambda")?, need(p.z, "z")?)
        }
        Eq1_3 => {
            need(p.n, "n")?;
            check_fixed(p.lambda, 0.5, "lambda", id)?;
            check_fixed(p.kappa, 0.5, "kappa", id)?;
            check_offcut_params(0.5, need(p.z, "z")?)
        }
        Eq1_4Roundtrip => {
            let lambda = need(p.lambda, "lambda")?;
            if !(lambda >= -0.5 + DOMAIN_MARGIN) {
                return Err(Error::domain("lambda must be > -1/2"));
            }
            Ok(())
        }
        Eq1_5 => {
            need(p.kappa, "kappa")?;
            check_offcut_params(need(p.lambda, "lambda")?, need(p.z, "z")?)?;
            check_t(need(p.t, "t")?)
        }
        Eq1_6 => {
            check_fixed(p.lambda, 0.5, "lambda", id)?;
            check_fixed(p.kappa, 0.5, "kappa", id)?;
            check_offcut_params(0.5, need(p.z, "z")?)?;
            check_t(need(p.t, "t")?)
        }
        Eq2_3Combination | Eq2_7 | Eq2_8 | Eq2_10 => {
            need(p.n, "n")?;
            check_on_cut(
                need(p.lambda, "lambda")?,
                need(p.kappa, "kappa")?,
                need(p.x, "x")?,
            )
        }
        Eq3_2 | Eq3_3 | Eq3_4 | Eq3_5 => {
            let x = need(p.x, "x")?;
            check_on_cut(need(p.lambda, "lambda")?, need(p.kappa, "kappa")?, x)?;
            let t = need(p.t, "t")?;
            check_t(t)?;
            if !((t - x).abs() >= EXCLUSION_WINDOW) {
                return Err(Error::domain("|t - x| must be >= 0.05"));
            }
            Ok(())
        }
    }
}

type Sides = (Value, Value, BTreeMap<String, Json>);

fn diag(pairs: &[(&str, Json)]) -> BTreeMap<String, Json> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn compute(id: IdentityId, p: &IdentityParams) -> Result<Sides> {
    use IdentityId::*;
    let n = p.n.unwrap_or(0) as usize;
    match id {
        Eq1_1 | Eq1_2 | Eq1_3 => {
            let (lambda, kappa) = match id {
                Eq1_1 => (need(p.lambda, "lambda")?, need(p.kappa, "kappa")?),
                Eq1_2 => (need(p.lambda, "lambda")?, 0.5),
                _ => (0.5, 0.5),
            };
            let z = need(p.z, "z")?;
            let q = integral_offcut_lhs(n, lambda, kappa, z, INNER_QUAD_TOL)?;
            let d = diag(&[("evals", json!(q.evals)), ("quad_err_est", json!(q.err_est))]);
            if id == Eq1_3 {
                // (n+1/2)/(1/2) = 2n+1 removes the renormalization
                let lhs = q.value / (2 * n + 1) as f64;
                return Ok((Value::Real(lhs), Value::Real(neumann_rhs(n, z)?), d));
            }
            Ok((
                Value::Real(q.value),
                Value::Real(offcut_rhs(n, lambda, kappa, z)?),
                d,
            ))
        }
        Eq1_4Roundtrip => unreachable!("handled by closure_roundtrip"),
        Eq1_5 | Eq1_6 => {
            let (lambda, kappa) = if id == Eq1_5 {
                (need(p.lambda, "lambda")?, need(p.kappa, "kappa")?)
            } else {
                (0.5, 0.5)
            };
            let (z, t) = (need(p.z, "z")?, need(p.t, "t")?);
            let s = series_lhs(SeriesFamily::Offcut, lambda, kappa, z, t, INNER_SERIES_TOL)?;
            let rhs = if id == Eq1_6 {
                1.0 / (z - t)
            } else {
                series_rhs(SeriesFamily::Offcut, lambda, kappa, z, t)?
            };
            let d = diag(&[
                ("terms_used", json!(s.terms_used)),
                ("method", json!(s.method)),
                ("extrap_residual", json!(s.extrap_residual)),
            ]);
            Ok((Value::Real(s.value), Value::Real(rhs), d))
        }
        Eq2_3Combination | Eq2_7 | Eq2_8 | Eq2_10 => {
            let (lambda, kappa, x) = (
                need(p.lambda, "lambda")?,
                need(p.kappa, "kappa")?,
                need(p.x, "x")?,
            );
            match id {
                Eq2_7 => {
                    let q = integral_right_lhs(n, lambda, kappa, x, INNER_QUAD_TOL)?;
                    let d = diag(&[("evals", json!(q.evals)), ("quad_err_est", json!(q.err_est))]);
                    Ok((Value::Real(q.value), Value::Real(right_rhs(n, lambda, kappa, x)?), d))
                }
                Eq2_10 => {
                    let q = integral_left_lhs(n, lambda, kappa, x, INNER_QUAD_TOL)?;
                    let d = diag(&[("evals", json!(q.evals)), ("quad_err_est", json!(q.err_est))]);
                    Ok((Value::Real(q.value), Value::Real(left_rhs(n, lambda, kappa, x)?), d))
                }
                Eq2_8 => {
                    let q = integral_left_lhs(n, lambda, kappa, x, INNER_QUAD_TOL)?;
                    let rhs = left_rhs_q_form(n, lambda, kappa, x)?;
                    let simplified = left_rhs(n, lambda, kappa, x)?;
                    let (cabs, crel) = mixed_errors(Value::Real(rhs), Value::Real(simplified));
                    let d = diag(&[
                        ("evals", json!(q.evals)),
                        ("quad_err_est", json!(q.err_est)),
                        ("rhs_eq2.10", json!(simplified)),
                        ("coherence_abs_err", json!(cabs)),
                        ("coherence_rel_err", json!(crel)),
                        ("coherence_pass", json!(passes(cabs, crel, COHERENCE_TOL))),
                    ]);
                    Ok((Value::Real(q.value), Value::Real(rhs), d))
                }
                _ => {
                    let left = integral_left_lhs(n, lambda, kappa, x, INNER_QUAD_TOL)?;
                    let right = integral_right_lhs(n, lambda, kappa, x, INNER_QUAD_TOL)?;
                    let (upper, lower) = split_combination(left.value, right.value, kappa);
                    let (bu, bl) = boundary_rhs(n, lambda, kappa, x)?;
                    let d = diag(&[
                        ("lhs_lower", json!(Value::complex(lower))),
                        ("rhs_lower", json!(Value::complex(bl))),
                        ("lower_abs_err", json!((lower - bl).norm())),
                        ("evals", json!(left.evals + right.evals)),
                    ]);
                    Ok((Value::complex(upper), Value::complex(bu), d))
                }
            }
        }
        Eq3_2 | Eq3_3 | Eq3_4 | Eq3_5 => {
            let family = id.series_family().expect("series identity");
            let (lambda, kappa, x, t) = (
                need(p.lambda, "lambda")?,
                need(p.kappa, "kappa")?,
                need(p.x, "x")?,
                need(p.t, "t")?,
            );
            let rhs = series_rhs(family, lambda, kappa, x, t)?;
            let s = series_lhs(family, lambda, kappa, x, t, INNER_SERIES_TOL)?;
            let d = diag(&[
                ("terms_used", json!(s.terms_used)),
                ("radii", json!(s.radii.len())),
                ("method", json!(s.method)),
                ("extrap_residual", json!(s.extrap_residual)),
            ]);
            Ok((Value::Real(s.value), Value::Real(rhs), d))
        }
    }
}

/// Computes both sides of `id` at `p` and compares them at `tol`.
///
/// Domain violations and parameters sitting on a pole of either side are
/// returned as errors; a side that fails to converge yields a report with
/// `pass = false` and the error in `diagnostics["error"]`.
pub fn verify_identity(id: IdentityId, p: &IdentityParams, tol: f64) -> Result<IdentityReport> {
    validate(id, p)?;
    if id == IdentityId::Eq1_4Roundtrip {
        let n_max = p.n.unwrap_or(DEFAULT_CLOSURE_DEGREE);
        let lambda = need(p.lambda, "lambda")?;
        let mut report = closure_roundtrip(f64::exp, lambda, n_max as usize, &default_closure_grid(), tol)?;
        report.params = *p;
        report.diagnostics.insert("function".to_string(), json!("exp"));
        return Ok(report);
    }
    match compute(id, p) {
        Ok((lhs, rhs, d)) => Ok(IdentityReport::assemble(id, *p, lhs, rhs, tol, d)),
        Err(e @ (Error::Domain(_) | Error::Pole(_))) => Err(e),
        Err(e) => Ok(IdentityReport::failed(id, *p, tol, &e)),
    }
}

/// 41 points spread over (-1, 1), endpoints excluded.
pub fn default_closure_grid() -> Vec<f64> {
    (0..41).map(|j| -0.975 + 0.04875 * j as f64).collect()
}

/// Expands `f` in R_0..R_N, resynthesizes it on `grid` and reports the
/// largest pointwise error as abs_err.
pub fn closure_roundtrip<F: Fn(f64) -> f64>(
    f: F,
    lambda: f64,
    n_max: usize,
    grid: &[f64],
    tol: f64,
) -> Result<IdentityReport> {
    if !(lambda >= -0.5 + DOMAIN_MARGIN) {
        return Err(Error::domain("lambda must be > -1/2"));
    }
    if let Some(&t) = grid.iter().find(|t| !(**t > -1.0 && **t < 1.0)) {
        return Err(Error::Domain(format!("grid point {t} outside (-1, 1)")));
    }
    let params = IdentityParams::new().n(n_max as u32).lambda(lambda);
    let id = IdentityId::Eq1_4Roundtrip;
    let coeffs = match gegenbauer_coeffs(&f, lambda, n_max) {
        Ok(c) => c,
        Err(e) => return Ok(IdentityReport::failed(id, params, tol, &e)),
    };
    let mut worst = (f64::NAN, -1.0, 0.0, 0.0);
    for &t in grid {
        let (exact, synth) = (f(t), gegenbauer_synth(&coeffs, t)?);
        let err = (exact - synth).abs();
        if !(err <= worst.1) {
            worst = (t, err, exact, synth);
        }
    }
    let (t_worst, abs_err, lhs, rhs) = worst;
    let abs_err = abs_err.max(0.0);
    let rel_err = abs_err / lhs.abs().max(rhs.abs()).max(1e-300);
    let d = diag(&[
        ("grid_points", json!(grid.len())),
        ("worst_t", json!(t_worst)),
    ]);
    Ok(IdentityReport::with_errors(
        id,
        params,
        Value::Real(lhs),
        Value::Real(rhs),
        abs_err,
        rel_err,
        tol,
        d,
    ))
}

/// Sweep parameters, in the lexicographic order of sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    N,
    Lambda,
    Kappa,
    X,
    T,
    Z,
}

impl Param {
    pub const ALL: [Param; 6] = [Param::N, Param::Lambda, Param::Kappa, Param::X, Param::T, Param::Z];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::N => "n",
            Param::Lambda => "lambda",
            Param::Kappa => "kappa",
            Param::X => "x",
            Param::T => "t",
            Param::Z => "z",
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown parameter '{s}'")))
    }
}

/// Values per parameter; parameters without an axis stay unset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridSpec {
    axes: BTreeMap<Param, Vec<f64>>,
}

impl GridSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_values(mut self, p: Param, values: impl Into<Vec<f64>>) -> Self {
        self.axes.insert(p, values.into());
        self
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn with_range(self, p: Param, start: f64, stop: f64, count: usize) -> Self {
        self.with_values(p, linspace(start, stop, count))
    }

    pub fn axes(&self) -> &BTreeMap<Param, Vec<f64>> {
        &self.axes
    }

    /// Number of Cartesian points, zero when no axis is given.
    pub fn len(&self) -> usize {
        if self.axes.is_empty() {
            return 0;
        }
        self.axes.values().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn points(&self) -> Vec<Vec<(Param, f64)>> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out: Vec<Vec<(Param, f64)>> = vec![Vec::new()];
        for (&p, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push((p, v));
                        next
                    })
                })
                .collect();
        }
        out
    }
}

/// Parses `param=start:stop:count,...`; a bare value or `a;b;c` list is
/// also accepted per parameter.
impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut spec = GridSpec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (name, range) = item
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("grid item '{item}' lacks '='")))?;
            let param: Param = name.trim().parse()?;
            let num = |v: &str| -> Result<f64> {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad number '{v}' in grid item '{item}'")))
            };
            let parts: Vec<&str> = range.split(':').collect();
            let values = match parts.as_slice() {
                [start, stop, count] => {
                    let count = count.trim().parse::<usize>().map_err(|_| {
                        Error::Domain(format!("bad count '{count}' in grid item '{item}'"))
                    })?;
                    linspace(num(start)?, num(stop)?, count)
                }
                [list] => list.split(';').map(num).collect::<Result<Vec<f64>>>()?,
                _ => {
                    return Err(Error::Domain(format!(
                        "grid item '{item}' must be param=start:stop:count"
                    )))
                }
            };
            if spec.axes.insert(param, values).is_some() {
                return Err(Error::Domain(format!("parameter {name} given twice")));
            }
        }
        Ok(spec)
    }
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Grid points dropped by the |t - x| exclusion window.
    pub skipped: usize,
    pub worst_rel_err: f64,
}

impl SweepSummary {
    pub fn of(reports: &[IdentityReport], skipped: usize) -> Self {
        let passed = reports.iter().filter(|r| r.pass).count();
        SweepSummary {
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
            skipped,
            worst_rel_err: worst_rel_err(reports),
        }
    }
}

/// Largest rel_err, with NaN counted as infinite; 0 for no reports.
pub fn worst_rel_err(reports: &[IdentityReport]) -> f64 {
    reports
        .iter()
        .map(|r| if r.rel_err.is_nan() { f64::INFINITY } else { r.rel_err })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub reports: Vec<IdentityReport>,
    pub summary: SweepSummary,
}

/// Moves a grid value inside the domain with the 1e-3 margin; returns
/// the clipped value when it changed.
fn clip(id: IdentityId, p: Param, v: f64) -> Option<f64> {
    let m = DOMAIN_MARGIN;
    let c = match p {
        Param::N => v.round().max(0.0),
        Param::Lambda => v.max(-0.5 + m),
        Param::Kappa if id.is_on_cut() => v.min(0.5 - m),
        Param::Kappa => v,
        Param::X | Param::T => v.clamp(-1.0 + m, 1.0 - m),
        Param::Z => v.max(1.0 + m),
    };
    (c != v).then_some(c)
}

fn threads_from_env() -> usize {
    std::env::var(MAX_THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

fn sweep_point(id: IdentityId, point: &[(Param, f64)], tol: f64) -> Option<IdentityReport> {
    let mut params = IdentityParams::new();
    let mut clipped = BTreeMap::new();
    for &(p, raw) in point {
        let v = match clip(id, p, raw) {
            Some(c) => {
                clipped.insert(p.as_str().to_string(), json!(raw));
                c
            }
            None => raw,
        };
        match p {
            Param::N => params.n = Some(v as u32),
            Param::Lambda => params.lambda = Some(v),
            Param::Kappa => params.kappa = Some(v),
            Param::X => params.x = Some(v),
            Param::T => params.t = Some(v),
            Param::Z => params.z = Some(v),
        }
    }
    if id.series_family().is_some() {
        if let (Some(x), Some(t)) = (params.x, params.t) {
            if (t - x).abs() < EXCLUSION_WINDOW {
                return None;
            }
        }
    }
    let mut report = match verify_identity(id, &params, tol) {
        Ok(r) => r,
        Err(e) => IdentityReport::failed(id, params, tol, &e),
    };
    if !clipped.is_empty() {
        report.diagnostics.insert("clipped_from".to_string(), Json::Object(clipped.into_iter().collect()));
    }
    Some(report)
}

/// Evaluates `id` on every point of the Cartesian grid, in parallel, with
/// reports in lexicographic (n, λ, κ, x, t, z) order.
///
/// Values outside the domain are clipped to the 1e-3 margin and the
/// original values recorded under `diagnostics["clipped_from"]`. Series
/// points inside the |t - x| exclusion window are skipped and counted.
pub fn sweep(id: IdentityId, grid: &GridSpec, tol: f64) -> SweepOutput {
    let points = grid.points();
    let run = || {
        points
            .par_iter()
            .map(|pt| sweep_point(id, pt, tol))
            .collect::<Vec<_>>()
    };
    let results = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads_from_env())
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let reports: Vec<IdentityReport> = results.into_iter().flatten().collect();
    let summary = SweepSummary::of(&reports, skipped);
    SweepOutput { reports, summary }
}
