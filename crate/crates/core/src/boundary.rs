//! Denjoy-Wolff points, angular limits at the boundary and the closed forms
//! for `F_t'(tau)`, `F_t''(tau)`, `F_t'''(tau)` at a boundary null point.

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{AnalyticExpr, ExprError};
use crate::flow::{evolve_in, FlowError, Frame, GeneratorSpec, IntegratorConfig, Trajectory};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `|beta|` below this is treated as zero (parabolic).
pub const BETA_ZERO_TOL: f64 = 1e-6;
/// Upper end of the band `[BETA_ZERO_TOL, BETA_AMBIGUOUS_TOL)` where no type is assigned.
pub const BETA_AMBIGUOUS_TOL: f64 = 1e-4;
pub const SEPARATION_FLOOR: f64 = 1e-3;
pub const SEPARATION_HORIZON: usize = 200;
pub const BOUNDARY_ORBIT_LEN: usize = 500;
const TREND_WINDOW: usize = 20;
const TREND_DECREASING: f64 = -0.25;
const NEWTON_SEEDS: [(f64, f64); 9] = [
    (0.0, 0.0),
    (0.5, 0.0),
    (-0.5, 0.0),
    (0.0, 0.5),
    (0.0, -0.5),
    (0.5, 0.5),
    (0.5, -0.5),
    (-0.5, 0.5),
    (-0.5, -0.5),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("point {0} is not in the required domain")]
    DomainError(Complex64),
    #[error("angular limit diverges (last sample {last}, growth ratio {growth:.3})")]
    Divergent { last: Complex64, growth: f64 },
    #[error("orbit of F_1 does not cluster within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("cannot decide type: beta = {beta} ({reason})")]
    AmbiguousType { beta: Complex64, reason: String },
    #[error("Denjoy-Wolff point {0} is interior; a boundary point is required")]
    NotBoundary(Complex64),
    #[error("angular limit {0} does not exist numerically")]
    MissingLimit(&'static str),
    #[error("derivative order {0} is outside the supported range")]
    InvalidOrder(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// A limit estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    pub error: f64,
}

/// Richardson extrapolation of samples taken at steps `h_k = h_0 / 2^k`,
/// assuming an error expansion in integer powers of `h`.
///
/// Returns the tableau entry with the smallest error estimate, where an
/// entry's estimate is the larger of its distance to the entry left of it and
/// the entry above it. At most `max_columns` elimination columns are used.
pub fn richardson(samples: &[Complex64], max_columns: usize) -> Extrapolated {
    assert!(!samples.is_empty(), "richardson needs at least one sample");
    let n = samples.len();
    let mut prev: Vec<Complex64> = Vec::new();
    let mut best = Extrapolated { value: samples[n - 1], error: f64::INFINITY };
    for (k, &s) in samples.iter().enumerate() {
        let cols = k.min(max_columns);
        let mut row = Vec::with_capacity(cols + 1);
        row.push(s);
        for j in 1..=cols {
            let factor = f64::powi(2.0, j as i32) - 1.0;
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
            row.push(v);
        }
        for j in 0..row.len() {
            if k == 0 {
                continue;
            }
            let mut err: f64 = 0.0;
            if j > 0 {
                err = err.max((row[j] - row[j - 1]).norm());
            }
            if j < prev.len() {
                err = err.max((row[j] - prev[j]).norm());
            } else {
                continue;
            }
            if err < best.error {
                best = Extrapolated { value: row[j], error: err };
            }
        }
        prev = row;
    }
    if n == 1 {
        best.error = f64::INFINITY;
    }
    best
}

/// How the boundary point is approached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Path {
    Radial,
    /// A ray at `angle` from the radius, inside a Stolz angle when `|angle| < pi/2`.
    StolzRay(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    pub h0: f64,
    /// Samples are taken for `k = 0..=levels`.
    pub levels: usize,
    pub max_columns: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self { h0: 0.25, levels: 20, max_columns: 6 }
    }
}

impl Path {
    fn point(&self, tau: Complex64, h: f64) -> Complex64 {
        match *self {
            Path::Radial => tau * (1.0 - h),
            Path::StolzRay(theta) => tau * (ONE - Complex64::from_polar(h, theta)),
        }
    }
}

fn check_unimodular(tau: Complex64) -> Result<(), BoundaryError> {
    if (tau.norm() - 1.0).abs() > 1e-8 {
        Err(BoundaryError::DomainError(tau))
    } else {
        Ok(())
    }
}

/// Extrapolates `sample(z)` as `z -> tau` along `path`.
///
/// Reports [`BoundaryError::Divergent`] when the raw sample increments stop
/// shrinking geometrically while still above rounding level.
pub fn boundary_limit<F, E>(
    mut sample: F,
    tau: Complex64,
    path: Path,
    opts: &LimitOptions,
) -> Result<Extrapolated, BoundaryError>
where
    F: FnMut(Complex64) -> Result<Complex64, E>,
    BoundaryError: From<E>,
{
    check_unimodular(tau)?;
    let mut samples = Vec::with_capacity(opts.levels + 1);
    for k in 0..=opts.levels {
        let h = opts.h0 * f64::powi(0.5, k as i32);
        samples.push(sample(path.point(tau, h))?);
    }
    if let Some(growth) = divergence(&samples) {
        return Err(BoundaryError::Divergent { last: *samples.last().unwrap(), growth });
    }
    Ok(richardson(&samples, opts.max_columns))
}

/// Mean ratio of successive increments over the tail when they fail to shrink.
fn divergence(samples: &[Complex64]) -> Option<f64> {
    const TAIL: usize = 4;
    if samples.len() < TAIL + 2 {
        return None;
    }
    let diffs: Vec<f64> = samples.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let last = *samples.last().unwrap();
    let tail = &diffs[diffs.len() - TAIL - 1..];
    if tail[TAIL] <= 1e-9 * (1.0 + last.norm()) {
        return None;
    }
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().all(|&r| r > 0.75) {
        Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
    } else {
        None
    }
}

/// Angular limit of the `order`-th derivative of `e` at `tau`.
pub fn angular_limit(
    e: &AnalyticExpr,
    tau: Complex64,
    order: usize,
    path: Path,
) -> Result<Extrapolated, BoundaryError> {
    angular_limit_with(e, tau, order, path, &LimitOptions::default())
}

pub fn angular_limit_with(
    e: &AnalyticExpr,
    tau: Complex64,
    order: usize,
    path: Path,
    opts: &LimitOptions,
) -> Result<Extrapolated, BoundaryError> {
    if order > 3 {
        return Err(BoundaryError::InvalidOrder(order));
    }
    boundary_limit(|z| e.eval_jet(z).map(|j| j.component(order).unwrap()), tau, path, opts)
}

/// Boundary expansion `e(z) = sum a_j (z - tau)^j / j! + gamma_k(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTaylor {
    pub tau: Complex64,
    /// `a_j`, the angular limits of `e^(j)` for `j = 0..=k`.
    pub coeffs: Vec<Complex64>,
    pub coeff_errors: Vec<f64>,
    /// `(r, |gamma_k(r tau)| / |r tau - tau|^k)` along the radius.
    pub remainder_decay: Vec<(f64, f64)>,
}

impl BoundaryTaylor {
    /// Whether the last three remainder ratios are nonincreasing.
    pub fn decays(&self) -> bool {
        let n = self.remainder_decay.len();
        n >= 3
            && self.remainder_decay[n - 3..]
                .windows(2)
                .all(|w| w[1].1 <= w[0].1)
    }
}

const TAYLOR_REMAINDER_LEVELS: usize = 12;

pub fn boundary_taylor(
    e: &AnalyticExpr,
    tau: Complex64,
    k: usize,
) -> Result<BoundaryTaylor, BoundaryError> {
    if k > 3 {
        return Err(BoundaryError::InvalidOrder(k));
    }
    let mut coeffs = Vec::with_capacity(k + 1);
    let mut coeff_errors = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let lim = angular_limit(e, tau, j, Path::Radial)?;
        coeffs.push(lim.value);
        coeff_errors.push(lim.error);
    }
    let opts = LimitOptions::default();
    let mut remainder_decay = Vec::with_capacity(TAYLOR_REMAINDER_LEVELS + 1);
    for level in 0..=TAYLOR_REMAINDER_LEVELS {
        let h = opts.h0 * f64::powi(0.5, level as i32);
        let r = 1.0 - h;
        let z = tau * r;
        let value = e.eval(z)?;
        let dz = z - tau;
        let mut poly = ZERO;
        let mut magnitude = value.norm();
        let mut term_scale = ONE;
        let mut fact = 1.0;
        for (j, a) in coeffs.iter().enumerate() {
            if j > 0 {
                term_scale *= dz;
                fact *= j as f64;
            }
            let term = a * term_scale / fact;
            magnitude += term.norm();
            poly += term;
        }
        let mut remainder = (value - poly).norm();
        // Below rounding level the remainder carries no information.
        if remainder < 64.0 * f64::EPSILON * magnitude {
            remainder = 0.0;
        }
        remainder_decay.push((r, remainder / dz.norm().powi(k as i32)));
    }
    Ok(BoundaryTaylor { tau, coeffs, coeff_errors, remainder_decay })
}

/// `exp(x) - 1` without cancellation for small `|x|`.
fn expm1(x: Complex64) -> Complex64 {
    let half_sin = (0.5 * x.im).sin();
    Complex64::new(
        x.re.exp_m1() * x.im.cos() - 2.0 * half_sin * half_sin,
        x.re.exp() * x.im.sin(),
    )
}

/// Predicted `d^order F_t / dz^order` at a boundary null point with
/// `f'(tau) = beta`, `f''(tau) = alpha`, `f'''(tau) = gamma`.
///
/// The `beta != 0` branch is evaluated in a form that stays accurate as
/// `beta -> 0`; `|beta| < 1e-12` uses the `beta = 0` formulas directly.
pub fn theorem1_closed_form(
    beta: Complex64,
    alpha: Complex64,
    gamma: Complex64,
    t: f64,
    order: usize,
) -> Result<Complex64, BoundaryError> {
    let parabolic = beta.norm() < 1e-12;
    let decay = (-beta * t).exp();
    Ok(match order {
        1 => decay,
        2 if parabolic => -alpha * t,
        // (alpha/beta) e^{-bt} (e^{-bt} - 1)
        2 => alpha * decay * (expm1(-beta * t) / beta),
        3 if parabolic => 1.5 * alpha * alpha * t * t - gamma * t,
        // (3a^2/2b^2)(E^3 - 2E^2 + E) + (g/2b)(E^3 - E) with E = e^{-bt}
        3 => {
            let q = expm1(-beta * t) / beta;
            let q2 = expm1(-2.0 * beta * t) / beta;
            1.5 * alpha * alpha * decay * q * q + 0.5 * gamma * decay * q2
        }
        _ => return Err(BoundaryError::InvalidOrder(order)),
    })
}

/// Predicted vs. measured boundary derivative of `F_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Check {
    pub tau: Complex64,
    pub predicted: Complex64,
    pub measured: Complex64,
    pub measured_error: f64,
    pub residual: f64,
}

pub fn theorem1_verify(
    g: &GeneratorSpec,
    t: f64,
    order: usize,
    cfg: &IntegratorConfig,
) -> Result<Theorem1Check, BoundaryError> {
    let dw = dw_point(g, cfg)?;
    theorem1_verify_with(g, &dw, t, order, cfg)
}

/// [`theorem1_verify`] with a precomputed classification.
pub fn theorem1_verify_with(
    g: &GeneratorSpec,
    dw: &DwClassification,
    t: f64,
    order: usize,
    cfg: &IntegratorConfig,
) -> Result<Theorem1Check, BoundaryError> {
    if !(1..=3).contains(&order) {
        return Err(BoundaryError::InvalidOrder(order));
    }
    if dw.kind.is_interior() {
        return Err(BoundaryError::NotBoundary(dw.tau));
    }
    let tau = dw.tau;
    let beta = if dw.kind.is_parabolic() { ZERO } else { dw.beta };
    let alpha = match (order, dw.alpha) {
        (1, _) => ZERO,
        (_, Some(a)) => a,
        (_, None) => return Err(BoundaryError::MissingLimit("f''(tau)")),
    };
    let gamma = match (order, dw.gamma) {
        (1 | 2, _) => ZERO,
        (_, Some(g)) => g,
        (_, None) => return Err(BoundaryError::MissingLimit("f'''(tau)")),
    };
    let predicted = theorem1_closed_form(beta, alpha, gamma, t, order)?;
    let frame = Frame::Boundary(tau);
    let measured = boundary_limit(
        |z| evolve_in(g, frame, z, t, order, cfg).map(|j| j.derivative(order)),
        tau,
        Path::Radial,
        &LimitOptions::default(),
    )?;
    Ok(Theorem1Check {
        tau,
        predicted,
        measured: measured.value,
        measured_error: measured.error,
        residual: (measured.value - predicted).norm(),
    })
}

/// Hyperbolic distance `artanh |(z - w) / (1 - conj(w) z)|`.
pub fn poincare_distance(z: Complex64, w: Complex64) -> Result<f64, BoundaryError> {
    for p in [z, w] {
        if !(p.norm() < 1.0) {
            return Err(BoundaryError::DomainError(p));
        }
    }
    let ratio = ((z - w) / (ONE - w.conj() * z)).norm();
    Ok(ratio.min(1.0).atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DwKind {
    Dilation,
    Hyperbolic,
    ParabolicAutomorphic,
    ParabolicNonautomorphic,
    AutomorphismGroupElliptic,
}

impl DwKind {
    pub fn is_interior(self) -> bool {
        matches!(self, DwKind::Dilation | DwKind::AutomorphismGroupElliptic)
    }

    pub fn is_parabolic(self) -> bool {
        matches!(self, DwKind::ParabolicAutomorphic | DwKind::ParabolicNonautomorphic)
    }

    pub fn name(self) -> &'static str {
        match self {
            DwKind::Dilation => "Dilation",
            DwKind::Hyperbolic => "Hyperbolic",
            DwKind::ParabolicAutomorphic => "ParabolicAutomorphic",
            DwKind::ParabolicNonautomorphic => "ParabolicNonautomorphic",
            DwKind::AutomorphismGroupElliptic => "AutomorphismGroupElliptic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DwDiagnostics {
    /// Last `rho(F_n(0), F_{n+1}(0))` within the separation horizon (0 for interior points).
    pub orbit_separation: f64,
    /// Log-log slope of the separations over the trend window.
    pub separation_slope: Option<f64>,
    /// `|f(tau)|` at the located point.
    pub f_residual: f64,
    /// Error estimate of `beta`.
    pub beta_error: f64,
    /// `Re f''(tau)`, a necessary condition (zero) for the automorphic subtype.
    pub re_alpha: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwClassification {
    pub tau: Complex64,
    pub kind: DwKind,
    pub beta: Complex64,
    /// `None` when the angular limit of `f''` does not exist numerically.
    pub alpha: Option<Complex64>,
    pub gamma: Option<Complex64>,
    pub diagnostics: DwDiagnostics,
}

fn newton_interior(f: &AnalyticExpr, seed: Complex64) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..50 {
        let j = f.eval_jet(z).ok()?;
        if j.c0.norm() < 1e-12 {
            // one more step to polish, kept only if it does not get worse
            let polished = if j.c1 != ZERO { z - j.c0 / j.c1 } else { z };
            return match f.eval(polished) {
                Ok(v) if v.norm() <= j.c0.norm() && polished.norm() < 1.0 - 1e-6 => Some(polished),
                _ => Some(z),
            };
        }
        if j.c1 == ZERO {
            return None;
        }
        z -= j.c0 / j.c1;
        if !(z.norm() < 1.0 - 1e-6) {
            return None;
        }
    }
    None
}

/// Newton on `f / f'`, quadratically convergent at multiple roots.
fn polish_root(f: &AnalyticExpr, start: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..100 {
        let j = f.eval_jet(z).ok()?;
        if j.c0 == ZERO {
            return Some(z);
        }
        let den = j.c1 * j.c1 - j.c0 * j.c2;
        if den == ZERO {
            return None;
        }
        let step = j.c0 * j.c1 / den;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            return Some(z);
        }
    }
    Some(z)
}

fn interior_kind(f: &AnalyticExpr, tau: Complex64, iterations: usize) -> Result<DwClassification, BoundaryError> {
    let j = f.eval_jet(tau)?;
    let kind = if j.c1.re.abs() < 1e-8 {
        DwKind::AutomorphismGroupElliptic
    } else {
        DwKind::Dilation
    };
    Ok(DwClassification {
        tau,
        kind,
        beta: j.c1,
        alpha: Some(j.c2),
        gamma: Some(j.c3),
        diagnostics: DwDiagnostics {
            f_residual: j.c0.norm(),
            re_alpha: Some(j.c2.re),
            iterations,
            ..Default::default()
        },
    })
}

/// Locates and classifies the Denjoy-Wolff point of the semigroup generated by `g`.
pub fn dw_point(g: &GeneratorSpec, cfg: &IntegratorConfig) -> Result<DwClassification, BoundaryError> {
    let f = &g.f;
    let declared = g.declared_dw.filter(|t| t.norm() < 1.0);
    let seeds = declared
        .into_iter()
        .chain(NEWTON_SEEDS.iter().map(|&(re, im)| Complex64::new(re, im)));
    for seed in seeds {
        if let Some(tau) = newton_interior(f, seed) {
            return interior_kind(f, tau, 0);
        }
    }

    // No interior null point found: follow the orbit of 0 under F_1.
    let mut orbit = vec![ZERO];
    let mut tr = Trajectory::start(g, Frame::Plain, ZERO, 0, cfg)?;
    while orbit.len() <= BOUNDARY_ORBIT_LEN {
        match tr.advance(1.0) {
            Ok(()) => {}
            // Rounding can put a point that has reached the circle on it.
            Err(FlowError::NotAGenerator { .. }) if orbit.last().unwrap().norm() > 1.0 - 1e-6 => break,
            Err(e) => return Err(e.into()),
        }
        let z = tr.offset();
        let prev = *orbit.last().unwrap();
        orbit.push(z);
        if 1.0 - z.norm() < 1e-9 {
            break;
        }
        if (z - prev).norm() < 1e-13 && z.norm() < 0.99 {
            break;
        }
    }
    let iterations = orbit.len() - 1;
    let end = *orbit.last().unwrap();
    if end.norm() < 0.99 {
        let step = (end - orbit[orbit.len() - 2]).norm();
        if step < 1e-9 {
            if let Some(tau) = newton_interior(f, end) {
                return interior_kind(f, tau, iterations);
            }
        }
        return Err(BoundaryError::NoConvergence { iterations });
    }

    let tau = polish_root(f, end)
        .filter(|t| (t.norm() - 1.0).abs() < 1e-8 && (t - end).norm() < 0.1)
        .map(|t| t / t.norm())
        .or_else(|| radial_null_point(f, end))
        .ok_or(BoundaryError::NoConvergence { iterations })?;
    let f_residual = match f.eval(tau) {
        Ok(v) => v.norm(),
        Err(_) => angular_limit(f, tau, 0, Path::Radial).map(|l| l.value.norm()).unwrap_or(f64::NAN),
    };

    let beta_lim = angular_limit(f, tau, 1, Path::Radial)?;
    let beta = beta_lim.value;
    let alpha = angular_limit(f, tau, 2, Path::Radial).ok().map(|l| l.value);
    let gamma = angular_limit(f, tau, 3, Path::Radial).ok().map(|l| l.value);

    let separations: Vec<f64> = orbit
        .windows(2)
        .take(SEPARATION_HORIZON)
        .map(|w| poincare_distance(w[0], w[1]))
        .collect::<Result<_, _>>()?;
    let orbit_separation = separations.last().copied().unwrap_or(0.0);
    let separation_slope = trend_slope(&separations);
    let diagnostics = DwDiagnostics {
        orbit_separation,
        separation_slope,
        f_residual,
        beta_error: beta_lim.error,
        re_alpha: alpha.map(|a| a.re),
        iterations,
    };

    let b = beta.norm();
    let kind = if b < BETA_ZERO_TOL {
        let decreasing = separation_slope.is_some_and(|s| s < TREND_DECREASING);
        if !decreasing && orbit_separation > SEPARATION_FLOOR {
            DwKind::ParabolicAutomorphic
        } else {
            DwKind::ParabolicNonautomorphic
        }
    } else if b < BETA_AMBIGUOUS_TOL {
        return Err(BoundaryError::AmbiguousType {
            beta,
            reason: format!("|beta| in [{BETA_ZERO_TOL:e}, {BETA_AMBIGUOUS_TOL:e})"),
        });
    } else if beta.re > 0.0 {
        DwKind::Hyperbolic
    } else {
        return Err(BoundaryError::AmbiguousType {
            beta,
            reason: "Re beta <= 0 at a boundary Denjoy-Wolff point".into(),
        });
    };
    Ok(DwClassification { tau, kind, beta, alpha, gamma, diagnostics })
}

/// For generators that are singular at the boundary point itself: the radial
/// projection of `end`, kept if the radial limit of `f` vanishes there.
fn radial_null_point(f: &AnalyticExpr, end: Complex64) -> Option<Complex64> {
    let tau = end / end.norm();
    let lim = angular_limit(f, tau, 0, Path::Radial).ok()?;
    (lim.value.norm() < 1e-9 && lim.error < 1e-9).then_some(tau)
}

/// Least-squares slope of `ln s_n` against `ln n` over the trailing window.
fn trend_slope(separations: &[f64]) -> Option<f64> {
    if separations.len() < TREND_WINDOW {
        return None;
    }
    let start = separations.len() - TREND_WINDOW;
    let pts: Vec<(f64, f64)> = separations[start..]
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(i, &s)| (((start + i + 1) as f64).ln(), s.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gen(text: &str) -> GeneratorSpec {
        GeneratorSpec::parse(text, text).unwrap()
    }

    #[test]
    fn richardson_removes_linear_and_quadratic_terms() {
        let samples: Vec<Complex64> = (0..10)
            .map(|k| {
                let h = 0.25 * 0.5f64.powi(k);
                c(3.0 + 2.0 * h - 5.0 * h * h, -1.0 + h)
            })
            .collect();
        let lim = richardson(&samples, 6);
        assert!((lim.value - c(3.0, -1.0)).norm() < 1e-13, "{lim:?}");
    }

    #[test]
    fn limits_of_polynomials() {
        let one = c(1.0, 0.0);
        let l = angular_limit(&parse("(z^2-1)/2").unwrap(), one, 1, Path::Radial).unwrap();
        assert!((l.value - one).norm() < 1e-12);
        let l = angular_limit(&parse("-(1-z)^2").unwrap(), one, 2, Path::Radial).unwrap();
        assert!((l.value - c(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn log_map_second_derivative_diverges() {
        let e = parse("(2*z+(1-z)*log(2/(1-z)))/(2+(1-z)*log(2/(1-z)))").unwrap();
        let one = c(1.0, 0.0);
        assert!(angular_limit(&e, one, 1, Path::Radial).is_ok());
        assert!(matches!(
            angular_limit(&e, one, 2, Path::Radial),
            Err(BoundaryError::Divergent { .. })
        ));
    }

    #[test]
    fn limit_requires_unimodular_tau() {
        assert!(matches!(
            angular_limit(&parse("z").unwrap(), c(0.5, 0.0), 0, Path::Radial),
            Err(BoundaryError::DomainError(_))
        ));
    }

    #[test]
    fn taylor_expansions() {
        let one = c(1.0, 0.0);
        let bt = boundary_taylor(&parse("-(1-z)^2").unwrap(), one, 3).unwrap();
        for (a, want) in bt.coeffs.iter().zip([0.0, 0.0, -2.0, 0.0]) {
            assert!((a - want).norm() < 1e-10, "{:?}", bt.coeffs);
        }
        assert!(bt.remainder_decay.iter().all(|&(_, q)| q < 1e-6));
        assert!(bt.decays());

        let bt = boundary_taylor(&parse("z").unwrap(), one, 1).unwrap();
        assert!((bt.coeffs[0] - one).norm() < 1e-12 && (bt.coeffs[1] - one).norm() < 1e-12);

        let bt = boundary_taylor(&parse("(z^2-1)/2").unwrap(), one, 3).unwrap();
        for (a, want) in bt.coeffs.iter().zip([0.0, 1.0, 1.0, 0.0]) {
            assert!((a - want).norm() < 1e-9, "{:?}", bt.coeffs);
        }
        assert!(bt.decays());
    }

    #[test]
    fn closed_forms() {
        let z = ZERO;
        let v = theorem1_closed_form(z, c(-2.0, 0.0), z, 1.0, 2).unwrap();
        assert!((v - 2.0).norm() < 1e-15);
        let v = theorem1_closed_form(c(1.0, 0.0), c(1.0, 0.0), z, 1.0, 2).unwrap();
        let e = (-1.0f64).exp();
        assert!((v - e * (e - 1.0)).norm() < 1e-15);
        assert!((v.re + 0.2325442).abs() < 1e-7);
        let v = theorem1_closed_form(z, c(-2.0, 0.0), z, 1.0, 3).unwrap();
        assert!((v - 6.0).norm() < 1e-15);
        assert!(theorem1_closed_form(z, z, z, 1.0, 4).is_err());
    }

    #[test]
    fn closed_form_is_continuous_in_beta() {
        let alpha = c(0.7, -0.2);
        let gamma = c(-1.1, 0.4);
        for order in 2..=3 {
            let at_zero = theorem1_closed_form(ZERO, alpha, gamma, 1.3, order).unwrap();
            let near = theorem1_closed_form(c(1e-9, 0.0), alpha, gamma, 1.3, order).unwrap();
            assert!((at_zero - near).norm() < 1e-7, "order {order}");
        }
    }

    #[test]
    fn closed_form_textbook_expression() {
        // Direct (cancellation-prone) formula at a moderate beta.
        let (b, a, g, t) = (c(0.8, 0.3), c(0.5, 0.1), c(-0.3, 0.9), 0.7);
        let e = |k: f64| (-b * k * t).exp();
        let direct = (1.5 * a * a / (b * b) + g / (2.0 * b)) * e(3.0) - 3.0 * a * a / (b * b) * e(2.0)
            + (1.5 * a * a / (b * b) - g / (2.0 * b)) * e(1.0);
        let v = theorem1_closed_form(b, a, g, t, 3).unwrap();
        assert!((v - direct).norm() < 1e-13);
        let direct2 = a / b * e(1.0) * (e(1.0) - 1.0);
        assert!((theorem1_closed_form(b, a, g, t, 2).unwrap() - direct2).norm() < 1e-14);
    }

    #[test]
    fn poincare_values() {
        assert_eq!(poincare_distance(ZERO, ZERO).unwrap(), 0.0);
        assert!((poincare_distance(ZERO, c(0.5, 0.0)).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        let d = poincare_distance(c(0.3, 0.0), c(0.7, 0.0)).unwrap();
        assert!((d - (0.4f64 / 0.79).atanh()).abs() < 1e-15);
        assert!(poincare_distance(c(1.0, 0.0), ZERO).is_err());
    }

    #[test]
    fn classify_dilation_and_rotation() {
        let cfg = IntegratorConfig::default();
        let dw = dw_point(&gen("z"), &cfg).unwrap();
        assert_eq!(dw.kind, DwKind::Dilation);
        assert_eq!(dw.tau, ZERO);
        assert_eq!(dw.beta, c(1.0, 0.0));
        let dw = dw_point(&gen("-i*3.141592653589793*z"), &cfg).unwrap();
        assert_eq!(dw.kind, DwKind::AutomorphismGroupElliptic);
    }

    #[test]
    fn classify_boundary_types() {
        let cfg = IntegratorConfig::default();
        let one = c(1.0, 0.0);
        let dw = dw_point(&gen("(z^2-1)/2"), &cfg).unwrap();
        assert_eq!(dw.kind, DwKind::Hyperbolic);
        assert!((dw.tau - one).norm() < 1e-8);
        assert!((dw.beta - one).norm() < 1e-8);
        assert!((dw.alpha.unwrap() - one).norm() < 1e-8);
        assert!(dw.gamma.unwrap().norm() < 1e-8);

        let dw = dw_point(&gen("-(1-z)^2"), &cfg).unwrap();
        assert_eq!(dw.kind, DwKind::ParabolicNonautomorphic, "{dw:?}");
        assert!((dw.tau - one).norm() < 1e-8);
        assert!(dw.beta.norm() < 1e-8);
        assert!((dw.alpha.unwrap() + 2.0).norm() < 1e-8);

        let dw = dw_point(&gen("-(i/2)*(1-z)^2"), &cfg).unwrap();
        assert_eq!(dw.kind, DwKind::ParabolicAutomorphic, "{dw:?}");
        assert!((dw.tau - one).norm() < 1e-8);
    }

    #[test]
    fn theorem1_parabolic_second_order() {
        let cfg = IntegratorConfig::default();
        let chk = theorem1_verify(&gen("-(1-z)^2"), 1.0, 2, &cfg).unwrap();
        assert!((chk.predicted - 2.0).norm() < 1e-12);
        assert!(chk.residual < 1e-5, "{chk:?}");
    }
}
