//! Koenigs intertwining functions as iteration limits of the time-one map.
//!
//! * interior Schroeder: `h(z) = lim m(F_n(z)) / (mu^n m'(tau))`, with `m` the
//!   involution swapping `tau` and 0, so `h(tau) = 0` and `h'(tau) = 1`;
//! * boundary Schroeder (hyperbolic): `h(z) = lim (1 - F_n(z)) / (1 - F_n(0))`
//!   after rotating `tau` to 1;
//! * Abel (parabolic): `sigma(z) = lim (F_n(z) - F_n(0)) / (F_{n+1}(0) - F_n(0))`.
//!
//! Orbits are integrated in a frame anchored at `tau`, so `F_n(z) - tau` keeps
//! full relative precision however close the orbit gets.
//!
//! The Schroeder multiplier is called `mu` here: `h o F_t = mu^t h` with
//! `mu = F_1'(tau) = exp(-f'(tau))`.

use num_complex::Complex64;
use thiserror::Error;

use crate::boundary::{dw_point, BoundaryError, DwClassification, DwKind};
use crate::flow::{evolve, par_map, FlowError, Frame, GeneratorSpec, IntegratorConfig, Trajectory};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KoenigsError {
    #[error("expected a dilation-type semigroup, found {0:?}")]
    NotDilation(DwKind),
    #[error("expected a hyperbolic semigroup, found {0:?}")]
    NotHyperbolic(DwKind),
    #[error("expected a parabolic semigroup, found {0:?}")]
    NotParabolic(DwKind),
    #[error("slow convergence: n = {n_used}, last Cauchy difference {last_diff:e}")]
    SlowConvergence { n_used: usize, last_diff: f64 },
    #[error("intertwine constant varies over the grid (spread {spread:e}, lambda {lambda})")]
    Inconsistent { lambda: Complex64, spread: f64 },
    #[error("generator does not vanish at the model's Denjoy-Wolff point {0}")]
    NotCommonFixedPoint(Complex64),
    #[error("operation requires an Abel model")]
    NotAbel,
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KoenigsKind {
    InteriorSchroeder,
    BoundarySchroeder,
    Abel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stopping {
    /// Use exactly this many iterations.
    Fixed(usize),
    /// Stop once successive estimates at the probe points differ by less than
    /// `tol`; fail with `SlowConvergence` past `max_n`.
    Cauchy { tol: f64, max_n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KoenigsOptions {
    pub stopping: Stopping,
    /// Abel only: combine `sigma_n` and `sigma_{n/2}` to cancel the `1/n` term.
    pub richardson: bool,
    /// Points used to decide convergence.
    pub probes: Vec<Complex64>,
}

impl KoenigsOptions {
    pub fn schroeder() -> Self {
        Self {
            stopping: Stopping::Cauchy { tol: 1e-12, max_n: 10_000 },
            richardson: false,
            probes: default_probes(),
        }
    }

    pub fn abel() -> Self {
        Self {
            stopping: Stopping::Cauchy { tol: 1e-8, max_n: 100_000 },
            richardson: true,
            probes: default_probes(),
        }
    }
}

fn default_probes() -> Vec<Complex64> {
    vec![
        Complex64::new(0.3, 0.0),
        Complex64::new(-0.2, 0.4),
        Complex64::new(0.1, -0.5),
    ]
}

/// Integration tolerances used for Koenigs orbits, so that integration noise
/// stays below the Cauchy stopping tolerances.
const KOENIGS_REL_TOL: f64 = 1e-13;
const KOENIGS_ABS_TOL: f64 = 1e-15;

fn tightened(cfg: &IntegratorConfig) -> IntegratorConfig {
    IntegratorConfig {
        rel_tol: cfg.rel_tol.min(KOENIGS_REL_TOL),
        abs_tol: cfg.abs_tol.min(KOENIGS_ABS_TOL),
        ..*cfg
    }
}

/// `a / b` by Smith's algorithm; safe when `|b|^2` would underflow.
fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}

/// Abel checkpoints double from here.
const ABEL_FIRST_CHECKPOINT: usize = 16;

#[derive(Debug, Clone)]
pub struct KoenigsModel {
    pub kind: KoenigsKind,
    /// `mu = F_1'(tau)`; `None` for Abel models.
    pub multiplier: Option<Complex64>,
    pub base_map: GeneratorSpec,
    pub tau: Complex64,
    /// `f'(tau)`, so that `mu^t = exp(-beta t)`.
    pub beta: Complex64,
    pub n_used: usize,
    pub richardson: bool,
    pub convergence_estimate: f64,
    cfg: IntegratorConfig,
    /// Abel: offsets of `F_n(0)` for `n = 0..=n_used + 1`.
    /// Boundary Schroeder: the single offset of `F_{n_used}(0)`.
    base_orbit: Vec<Complex64>,
}

impl KoenigsModel {
    fn frame(&self) -> Frame {
        match self.kind {
            KoenigsKind::InteriorSchroeder => Frame::Interior(self.tau),
            _ => Frame::Boundary(self.tau),
        }
    }

    /// Value of the intertwining function at `z`, recomputed from the orbit of `z`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, KoenigsError> {
        let g = &self.base_map;
        let mut tr = Trajectory::start(g, self.frame(), z, 0, &self.cfg)?;
        let n = self.n_used;
        match self.kind {
            KoenigsKind::InteriorSchroeder => {
                tr.advance(n as f64)?;
                Ok(interior_estimate(self.tau, self.beta, tr.offset(), n))
            }
            KoenigsKind::BoundarySchroeder => {
                tr.advance(n as f64)?;
                Ok(cdiv(tr.offset(), self.base_orbit[0]))
            }
            KoenigsKind::Abel => {
                let half = n / 2;
                tr.advance(half as f64)?;
                let at_half = abel_estimate(&self.base_orbit, tr.offset(), half);
                tr.advance((n - half) as f64)?;
                let at_n = abel_estimate(&self.base_orbit, tr.offset(), n);
                Ok(if self.richardson && half > 0 { 2.0 * at_n - at_half } else { at_n })
            }
        }
    }

    /// `mu^t`, or `None` for Abel models.
    pub fn multiplier_power(&self, t: f64) -> Option<Complex64> {
        self.multiplier.map(|_| (-self.beta * t).exp())
    }

    /// `|h(F_t(z)) - mu^t h(z)|` (Schroeder) or `|sigma(F_t(z)) - sigma(z) - t|` (Abel).
    pub fn functional_residual(&self, z: Complex64, t: f64) -> Result<f64, KoenigsError> {
        let moved = evolve(&self.base_map, z, t, 0, &self.cfg)?.u;
        let after = self.eval(moved)?;
        let before = self.eval(z)?;
        Ok(match self.multiplier_power(t) {
            Some(mu_t) => (after - mu_t * before).norm(),
            None => (after - before - t).norm(),
        })
    }
}

/// `m(F_n) / (mu^n m'(tau))` written in terms of the offset `v = F_n - tau`.
fn interior_estimate(tau: Complex64, beta: Complex64, v: Complex64, n: usize) -> Complex64 {
    let s = 1.0 - tau.norm_sqr();
    let mu_n = (-beta * n as f64).exp();
    cdiv(cdiv(v * s, s - tau.conj() * v), mu_n)
}

/// `sigma_n` from boundary-frame offsets: `(v_n^0 - v_n(z)) / (v_n^0 - v_{n+1}^0)`.
fn abel_estimate(base: &[Complex64], v: Complex64, n: usize) -> Complex64 {
    cdiv(base[n] - v, base[n] - base[n + 1])
}

fn classify(g: &GeneratorSpec, cfg: &IntegratorConfig) -> Result<DwClassification, KoenigsError> {
    Ok(dw_point(g, cfg)?)
}

/// Interior Schroeder function of a dilation-type semigroup.
pub fn schroeder_interior(
    g: &GeneratorSpec,
    cfg: &IntegratorConfig,
    opts: &KoenigsOptions,
) -> Result<KoenigsModel, KoenigsError> {
    let dw = classify(g, cfg)?;
    schroeder_interior_with(g, &dw, cfg, opts)
}

pub fn schroeder_interior_with(
    g: &GeneratorSpec,
    dw: &DwClassification,
    cfg: &IntegratorConfig,
    opts: &KoenigsOptions,
) -> Result<KoenigsModel, KoenigsError> {
    let cfg = &tightened(cfg);
    if dw.kind != DwKind::Dilation {
        return Err(KoenigsError::NotDilation(dw.kind));
    }
    let tau = dw.tau;
    let beta = dw.beta;
    let mu = (-beta).exp();
    if mu.norm() > 0.999 {
        return Err(KoenigsError::SlowConvergence { n_used: 0, last_diff: f64::NAN });
    }
    let frame = Frame::Interior(tau);
    let (n_used, estimate) = schroeder_stopping(g, frame, cfg, opts, |v, n| {
        interior_estimate(tau, beta, v, n)
    })?;
    Ok(KoenigsModel {
        kind: KoenigsKind::InteriorSchroeder,
        multiplier: Some(mu),
        base_map: g.clone(),
        tau,
        beta,
        n_used,
        richardson: false,
        convergence_estimate: estimate,
        cfg: *cfg,
        base_orbit: Vec::new(),
    })
}

/// Runs probe orbits and picks `n` per the stopping rule, where `estimate(v, n)`
/// maps the frame offset of `F_n(p)` to the n-th approximation at probe `p`.
fn schroeder_stopping<F>(
    g: &GeneratorSpec,
    frame: Frame,
    cfg: &IntegratorConfig,
    opts: &KoenigsOptions,
    estimate: F,
) -> Result<(usize, f64), KoenigsError>
where
    F: Fn(Complex64, usize) -> Complex64,
{
    let (tol, max_n) = match opts.stopping {
        Stopping::Fixed(n) => (None, n.max(1)),
        Stopping::Cauchy { tol, max_n } => (Some(tol), max_n.max(1)),
    };
    let mut trs = opts
        .probes
        .iter()
        .map(|&p| Trajectory::start(g, frame, p, 0, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut prev: Vec<Complex64> = opts.probes.iter().map(|&p| estimate(frame.from_point(p), 0)).collect();
    let mut last_diff = f64::INFINITY;
    for n in 1..=max_n {
        let mut diff: f64 = 0.0;
        for (tr, pv) in trs.iter_mut().zip(prev.iter_mut()) {
            tr.advance(1.0)?;
            let cur = estimate(tr.offset(), n);
            diff = diff.max((cur - *pv).norm());
            *pv = cur;
        }
        last_diff = diff;
        if tol.is_some_and(|tol| diff < tol) {
            return Ok((n, diff));
        }
    }
    match tol {
        None => Ok((max_n, last_diff)),
        Some(_) => Err(KoenigsError::SlowConvergence { n_used: max_n, last_diff }),
    }
}

/// Boundary Schroeder function of a hyperbolic semigroup, normalized by `h(0) = 1`.
pub fn schroeder_hyperbolic(
    g: &GeneratorSpec,
    cfg: &IntegratorConfig,
    opts: &KoenigsOptions,
) -> Result<KoenigsModel, KoenigsError> {
    let dw = classify(g, cfg)?;
    schroeder_hyperbolic_with(g, &dw, cfg, opts)
}

pub fn schroeder_hyperbolic_with(
    g: &GeneratorSpec,
    dw: &DwClassification,
    cfg: &IntegratorConfig,
    opts: &KoenigsOptions,
) -> Result<KoenigsModel, KoenigsError> {
    let cfg = &tightened(cfg);
    if dw.kind != DwKind::Hyperbolic {
        return Err(KoenigsError::NotHyperbolic(dw.kind));
    }
    let tau = dw.tau;
    let mu = (-dw.beta).exp();
    if mu.norm() > 0.999 {
        return Err(KoenigsError::SlowConvergence { n_used: 0, last_diff: f64::NAN });
    }
    let frame = Frame::Boundary(tau);
    // The estimate at probe p is v_n(p) / v_n(0); run the base orbit alongside.
    let mut base_tr = Trajectory::start(g, frame, ZERO, 0, cfg)?;
    let (tol, max_n) = match opts.stopping {
        Stopping::Fixed(n) => (None, n.max(1)),
        Stopping::Cauchy { tol, max_n } => (Some(tol), max_n.max(1)),
    };
    let mut trs = opts
        .probes
        .iter()
        .map(|&p| Trajectory::start(g, frame, p, 0, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut prev: Vec<Complex64> = opts.probes.iter().map(|&p| frame.from_point(p)).collect();
    let mut n_used = max_n;
    let mut last_diff = f64::INFINITY;
    let mut converged = tol.is_none();
    for n in 1..=max_n {
        base_tr.advance(1.0)?;
        let v0 = base_tr.offset();
        let mut diff: f64 = 0.0;
        for (tr, pv) in trs.iter_mut().zip(prev.iter_mut()) {
            tr.advance(1.0)?;
            let cur = cdiv(tr.offset(), v0);
            diff = diff.max((cur - *pv).norm());
            *pv = cur;
        }
        last_diff = diff;
        if tol.is_some_and(|tol| diff < tol) {
            n_used = n;
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(KoenigsError::SlowConvergence { n_used, last_diff });
    }
    Ok(KoenigsModel {
        kind: KoenigsKind::BoundarySchroeder,
        multiplier: Some(mu),
        base_map: g.clone(),
        tau,
        beta: dw.beta,
        n_used,
        richardson: false,
        convergence_estimate: last_diff,
        cfg: *cfg,
        base_orbit: vec![base_tr.offset()],
    })
}

/// Abel function of a parabolic semigroup, normalized by `sigma(0) = 0`.
pub fn abel_parabolic(
    g: &GeneratorSpec,
    cfg: &IntegratorConfig,
    opts: &KoenigsOptions,
) -> Result<KoenigsModel, KoenigsError> {
    let dw = classify(g, cfg)?;
    abel_parabolic_with(g, &dw, cfg, opts)
}

pub fn abel_parabolic_with(
    g: &GeneratorSpec,
    dw: &DwClassification,
    cfg: &IntegratorConfig,
    opts: &KoenigsOptions,
) -> Result<KoenigsModel, KoenigsError> {
    let cfg = &tightened(cfg);
    if !dw.kind.is_parabolic() {
        return Err(KoenigsError::NotParabolic(dw.kind));
    }
    let tau = dw.tau;
    let frame = Frame::Boundary(tau);
    let max_n = match opts.stopping {
        Stopping::Fixed(n) => n.max(2),
        Stopping::Cauchy { max_n, .. } => max_n.max(2),
    };
    let mut base_orbit = Vec::with_capacity(max_n + 2);
    base_orbit.push(frame.from_point(ZERO));
    let mut base_tr = Trajectory::start(g, frame, ZERO, 0, cfg)?;
    let mut probe_trs = opts
        .probes
        .iter()
        .map(|&p| Trajectory::start(g, frame, p, 0, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut probe_orbits: Vec<Vec<Complex64>> =
        opts.probes.iter().map(|&p| vec![frame.from_point(p)]).collect();

    let estimate = |base: &[Complex64], orbit: &[Complex64], n: usize| -> Complex64 {
        let half = n / 2;
        let at_n = abel_estimate(base, orbit[n], n);
        if opts.richardson && half > 0 {
            2.0 * at_n - abel_estimate(base, orbit[half], half)
        } else {
            at_n
        }
    };
    let checkpoint_diff = |base: &[Complex64], orbits: &[Vec<Complex64>], n: usize| -> f64 {
        orbits
            .iter()
            .map(|o| (estimate(base, o, n) - estimate(base, o, n / 2)).norm())
            .fold(0.0, f64::max)
    };

    let mut checkpoint = match opts.stopping {
        Stopping::Fixed(n) => n.max(2),
        Stopping::Cauchy { .. } => ABEL_FIRST_CHECKPOINT.min(max_n),
    };
    let mut n = 0;
    let (n_used, last_diff) = loop {
        while n < checkpoint {
            n += 1;
            for (tr, orbit) in probe_trs.iter_mut().zip(probe_orbits.iter_mut()) {
                tr.advance(1.0)?;
                orbit.push(tr.offset());
            }
        }
        // sigma_n needs F_{n+1}(0)
        while base_orbit.len() < checkpoint + 2 {
            base_tr.advance(1.0)?;
            base_orbit.push(base_tr.offset());
        }
        let diff = checkpoint_diff(&base_orbit, &probe_orbits, checkpoint);
        match opts.stopping {
            Stopping::Fixed(_) => break (checkpoint, diff),
            Stopping::Cauchy { tol, .. } if diff < tol => break (checkpoint, diff),
            Stopping::Cauchy { .. } if checkpoint >= max_n => {
                return Err(KoenigsError::SlowConvergence { n_used: checkpoint, last_diff: diff })
            }
            Stopping::Cauchy { .. } => checkpoint = (2 * checkpoint).min(max_n),
        }
    };
    base_orbit.truncate(n_used + 2);
    Ok(KoenigsModel {
        kind: KoenigsKind::Abel,
        multiplier: None,
        base_map: g.clone(),
        tau,
        beta: Complex64::new(0.0, 0.0),
        n_used,
        richardson: opts.richardson,
        convergence_estimate: last_diff,
        cfg: *cfg,
        base_orbit,
    })
}

/// Default 20-point interior grid: two circles of 10 points each.
pub fn koenigs_grid() -> Vec<Complex64> {
    [0.25, 0.5]
        .iter()
        .flat_map(|&r| {
            (0..10).map(move |k| Complex64::from_polar(r, (k as f64 + 0.25) * std::f64::consts::PI / 5.0))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntertwineResult {
    pub lambda: Complex64,
    /// Largest deviation of a grid sample from the mean.
    pub spread: f64,
    pub samples: Vec<Complex64>,
}

/// `lambda(s)`, the mean of `sigma(G_s(z)) - sigma(z)` over `grid`.
pub fn intertwine_constant(
    model: &KoenigsModel,
    other: &GeneratorSpec,
    s: f64,
    grid: &[Complex64],
    cfg: &IntegratorConfig,
) -> Result<IntertwineResult, KoenigsError> {
    if model.kind != KoenigsKind::Abel {
        return Err(KoenigsError::NotAbel);
    }
    if let Ok(v) = other.f.eval(model.tau) {
        if v.norm() > 1e-6 {
            return Err(KoenigsError::NotCommonFixedPoint(model.tau));
        }
    }
    let samples = par_map(grid, |&z| {
        let moved = evolve(other, z, s, 0, cfg)?.u;
        Ok::<_, KoenigsError>(model.eval(moved)? - model.eval(z)?)
    })?;
    let lambda = samples.iter().sum::<Complex64>() / samples.len() as f64;
    let spread = samples.iter().map(|x| (x - lambda).norm()).fold(0.0, f64::max);
    if spread > 1e-3 * (1.0 + lambda.norm()) {
        return Err(KoenigsError::Inconsistent { lambda, spread });
    }
    Ok(IntertwineResult { lambda, spread, samples })
}
