//! Semigroup flows `F_t` obtained by integrating `du/dt = -f(u)`, `u(0) = z`,
//! together with the variational equations for `dF_t/dz` through order 3.
//!
//! The integrator is a Dormand-Prince 5(4) pair with PI step control, run in
//! unit-time segments. States can be carried in a [`Frame`] anchored at a fixed
//! point so that orbits converging to it keep full relative precision.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{parse, AnalyticExpr, ExprError, Jet3, ParseError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("start point {0} is not inside the unit disk")]
    OutsideDisk(Complex64),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("trajectory left the unit disk at t = {t} (not a generator, or integration diverged)")]
    NotAGenerator { t: f64 },
    #[error("step size fell below h_min at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("more than max_steps steps in the unit segment ending at t = {t}")]
    MaxStepsExceeded { t: f64 },
    #[error("generator evaluation failed at t = {t}: {source}")]
    Evaluation { t: f64, source: ExprError },
}

/// A generator expression with optional metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub f: AnalyticExpr,
    pub declared_dw: Option<Complex64>,
    pub label: String,
}

impl GeneratorSpec {
    pub fn new(label: impl Into<String>, f: AnalyticExpr) -> Self {
        Self { f, declared_dw: None, label: label.into() }
    }

    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self, ParseError> {
        Ok(Self::new(label, parse(text)?))
    }

    pub fn with_declared_dw(mut self, tau: Complex64) -> Self {
        self.declared_dw = Some(tau);
        self
    }

    /// `c * f` under a new label.
    pub fn scaled(&self, c: Complex64, label: impl Into<String>) -> Self {
        Self::new(label, self.f.scaled(c))
    }

    /// Checks that `f` evaluates on a 64-point interior grid and vanishes at a
    /// declared interior Denjoy-Wolff point.
    pub fn validate(&self) -> Result<(), FlowError> {
        for z in validation_grid() {
            self.f.eval(z).map_err(|e| {
                FlowError::InvalidGenerator(format!("{} fails at {z}: {e}", self.label))
            })?;
        }
        if let Some(tau) = self.declared_dw {
            if tau.norm() > 1.0 {
                return Err(FlowError::InvalidGenerator(format!(
                    "declared Denjoy-Wolff point {tau} lies outside the closed disk"
                )));
            }
            if tau.norm() < 1.0 {
                let v = self.f.eval(tau).map_err(|e| {
                    FlowError::InvalidGenerator(format!("f fails at declared point {tau}: {e}"))
                })?;
                if v.norm() >= 1e-8 {
                    return Err(FlowError::InvalidGenerator(format!(
                        "|f({tau})| = {:e} at the declared interior Denjoy-Wolff point",
                        v.norm()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// 8 radii x 8 angles, offset so no point sits on the real axis.
fn validation_grid() -> impl Iterator<Item = Complex64> {
    (0..8).flat_map(|i| {
        let r = 0.1 + 0.1 * i as f64;
        (0..8).map(move |k| {
            Complex64::from_polar(r, (k as f64 + 0.5) * std::f64::consts::FRAC_PI_4)
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    /// Step budget per unit of integration time.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, h_init: 1e-2, h_min: 1e-12, max_steps: 1_000_000 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: &str| Err(FlowError::InvalidConfig(m.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("rel_tol and abs_tol must be positive");
        }
        if !(self.h_min > 0.0 && self.h_min < self.h_init) {
            return bad("need 0 < h_min < h_init");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        Ok(())
    }
}

/// Coordinates in which the flow state is integrated.
///
/// `Interior(tau)` stores `u = tau + v`; `Boundary(tau)` (with `|tau| = 1`)
/// stores `u = tau * (1 - v)`. Near the anchor `v` is small and keeps full
/// relative precision, which plain coordinates lose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    Plain,
    Interior(Complex64),
    Boundary(Complex64),
}

impl Frame {
    pub fn to_point(&self, v: Complex64) -> Complex64 {
        match *self {
            Frame::Plain => v,
            Frame::Interior(tau) => tau + v,
            Frame::Boundary(tau) => tau * (ONE - v),
        }
    }

    pub fn from_point(&self, u: Complex64) -> Complex64 {
        match *self {
            Frame::Plain => u,
            Frame::Interior(tau) => u - tau,
            Frame::Boundary(tau) => ONE - tau.conj() * u,
        }
    }

    /// `u - tau` as a function of the offset, exact in floating point.
    fn displacement(&self, v: Complex64) -> Option<(Complex64, Complex64)> {
        match *self {
            Frame::Plain => None,
            Frame::Interior(tau) => Some((tau, v)),
            Frame::Boundary(tau) => Some((tau, -tau * v)),
        }
    }

    /// `dv/dt` given `f(u)`.
    fn rate(&self, fu: Complex64) -> Complex64 {
        match *self {
            Frame::Plain | Frame::Interior(_) => -fu,
            Frame::Boundary(tau) => tau.conj() * fu,
        }
    }

    /// `1 - |u|`, computed without cancellation in the boundary frame.
    pub fn margin(&self, v: Complex64) -> f64 {
        match *self {
            Frame::Boundary(_) => (2.0 * v.re - v.norm_sqr()) / (1.0 + (ONE - v).norm()),
            _ => 1.0 - self.to_point(v).norm(),
        }
    }
}

/// `F_t(z)` and its z-derivatives through the requested order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowJet {
    pub u: Complex64,
    /// The state in the integration frame (equal to `u` for [`Frame::Plain`]).
    pub offset: Complex64,
    pub u1: Complex64,
    pub u2: Complex64,
    pub u3: Complex64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub t: f64,
    pub z0: Complex64,
}

impl FlowJet {
    /// `d^k F_t / dz^k` for `k` in 0..=3.
    pub fn derivative(&self, k: usize) -> Complex64 {
        match k {
            0 => self.u,
            1 => self.u1,
            2 => self.u2,
            _ => self.u3,
        }
    }
}

type State = [Complex64; 4];

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Below this offset magnitude `f` is evaluated from its cubic Taylor
/// polynomial at the anchor: `u = tau + d` rounds `d` away once `|d|` nears
/// machine epsilon, while the Taylor remainder is `O(|d|^4)`.
pub const TAYLOR_SWITCH: f64 = 5e-6;

/// Error of a rejected step attempt.
enum Rejection {
    Eval(ExprError),
    LeftDisk,
}

/// An integration in progress; advance it with [`Trajectory::advance`].
#[derive(Debug, Clone)]
pub struct Trajectory<'a> {
    f: &'a AnalyticExpr,
    cfg: IntegratorConfig,
    frame: Frame,
    dim: usize,
    t: f64,
    y: State,
    h: f64,
    fac_old: f64,
    k_first: Option<State>,
    anchor_jet: Option<Jet3>,
    steps_accepted: usize,
    steps_rejected: usize,
    z0: Complex64,
}

impl<'a> Trajectory<'a> {
    /// Starts at the point `z` (given in disk coordinates, not frame ones).
    pub fn start(
        g: &'a GeneratorSpec,
        frame: Frame,
        z: Complex64,
        order: usize,
        cfg: &IntegratorConfig,
    ) -> Result<Self, FlowError> {
        Self::start_offset(g, frame, frame.from_point(z), order, cfg)
    }

    /// Starts at frame offset `v`.
    pub fn start_offset(
        g: &'a GeneratorSpec,
        frame: Frame,
        v: Complex64,
        order: usize,
        cfg: &IntegratorConfig,
    ) -> Result<Self, FlowError> {
        cfg.validate()?;
        if order > 3 {
            return Err(FlowError::InvalidConfig(format!("order {order} exceeds 3")));
        }
        if !(frame.margin(v) > 0.0) {
            return Err(FlowError::OutsideDisk(frame.to_point(v)));
        }
        Ok(Self {
            f: &g.f,
            cfg: *cfg,
            frame,
            dim: order + 1,
            t: 0.0,
            y: [v, ONE, ZERO, ZERO],
            h: cfg.h_init,
            fac_old: 1e-4,
            k_first: None,
            anchor_jet: frame.displacement(ZERO).and_then(|(tau, _)| g.f.eval_jet(tau).ok()),
            steps_accepted: 0,
            steps_rejected: 0,
            z0: frame.to_point(v),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn offset(&self) -> Complex64 {
        self.y[0]
    }

    pub fn jet(&self) -> FlowJet {
        FlowJet {
            u: self.frame.to_point(self.y[0]),
            offset: self.y[0],
            u1: self.y[1],
            u2: self.y[2],
            u3: self.y[3],
            steps_accepted: self.steps_accepted,
            steps_rejected: self.steps_rejected,
            t: self.t,
            z0: self.z0,
        }
    }

    /// `f(u)` near the anchor from its Taylor polynomial, when applicable.
    fn near_anchor_value(&self, v: Complex64) -> Option<Complex64> {
        let a = self.anchor_jet.as_ref()?;
        if v.norm() >= TAYLOR_SWITCH {
            return None;
        }
        let (_, d) = self.frame.displacement(v)?;
        Some(a.c0 + d * (a.c1 + d * (a.c2 / 2.0 + d * a.c3 / 6.0)))
    }

    fn rhs(&self, y: &State) -> Result<State, ExprError> {
        let u = self.frame.to_point(y[0]);
        let mut dy = [ZERO; 4];
        let near = self.near_anchor_value(y[0]);
        if self.dim == 1 {
            let fu = match near {
                Some(v) => v,
                None => self.f.eval(u)?,
            };
            dy[0] = self.frame.rate(fu);
            return Ok(dy);
        }
        let j = self.f.eval_jet(u)?;
        dy[0] = self.frame.rate(near.unwrap_or(j.c0));
        let (y1, y2, y3) = (y[1], y[2], y[3]);
        dy[1] = -j.c1 * y1;
        if self.dim > 2 {
            dy[2] = -j.c2 * y1 * y1 - j.c1 * y2;
        }
        if self.dim > 3 {
            dy[3] = -j.c3 * y1 * y1 * y1 - 3.0 * j.c2 * y1 * y2 - j.c1 * y3;
        }
        Ok(dy)
    }

    /// Advances by `dt >= 0` in unit-time segments.
    pub fn advance(&mut self, dt: f64) -> Result<(), FlowError> {
        if !(dt >= 0.0) {
            return Err(FlowError::NegativeTime(dt));
        }
        let end = self.t + dt;
        while self.t < end {
            let seg_end = (self.t.floor() + 1.0).min(end);
            self.segment(seg_end)?;
        }
        if !(self.frame.margin(self.y[0]) > 0.0) {
            return Err(FlowError::NotAGenerator { t: self.t });
        }
        Ok(())
    }

    fn segment(&mut self, seg_end: f64) -> Result<(), FlowError> {
        let cfg = self.cfg;
        // Anchored frames measure the absolute floor relative to the offset.
        let scale0 = match self.frame {
            Frame::Plain => 1.0,
            _ => self.y[0].norm().clamp(f64::MIN_POSITIVE, 1.0),
        };
        let mut steps = 0usize;
        while self.t < seg_end {
            if steps >= cfg.max_steps {
                return Err(FlowError::MaxStepsExceeded { t: seg_end });
            }
            steps += 1;
            let remaining = seg_end - self.t;
            let last = self.h >= remaining * (1.0 - 1e-12);
            let h = if last { remaining } else { self.h };
            match self.try_step(h, scale0) {
                Ok((y_new, k_last, err)) if err <= 1.0 => {
                    self.t = if last { seg_end } else { self.t + h };
                    self.y = y_new;
                    self.k_first = Some(k_last);
                    self.steps_accepted += 1;
                    let fac11 = err.powf(0.17);
                    let fac = (fac11 / self.fac_old.powf(0.04) / 0.9).clamp(0.1, 5.0);
                    self.fac_old = err.max(1e-4);
                    let h_next = h / fac;
                    // Keep the proposed size when the step was clipped to the segment end.
                    self.h = if last { h_next.max(self.h) } else { h_next };
                }
                Ok((_, _, err)) => {
                    self.steps_rejected += 1;
                    self.h = h / (err.powf(0.17) / 0.9).min(5.0);
                    self.check_h_min(None)?;
                }
                Err(rej) => {
                    self.steps_rejected += 1;
                    self.h = h * 0.5;
                    self.check_h_min(Some(rej))?;
                }
            }
        }
        Ok(())
    }

    fn check_h_min(&self, rej: Option<Rejection>) -> Result<(), FlowError> {
        if self.h >= self.cfg.h_min {
            return Ok(());
        }
        Err(match rej {
            Some(Rejection::LeftDisk) => FlowError::NotAGenerator { t: self.t },
            Some(Rejection::Eval(source)) => FlowError::Evaluation { t: self.t, source },
            None => FlowError::StepUnderflow { t: self.t },
        })
    }

    fn try_step(&self, h: f64, scale0: f64) -> Result<(State, State, f64), Rejection> {
        let n = self.dim;
        let mut k = [[ZERO; 4]; 7];
        k[0] = match self.k_first {
            Some(k0) => k0,
            None => self.rhs(&self.y).map_err(Rejection::Eval)?,
        };
        let mut y_stage = self.y;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = ZERO;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                y_stage[i] = self.y[i] + h * acc;
            }
            k[s] = self.rhs(&y_stage).map_err(Rejection::Eval)?;
        }
        // Stage 7 is evaluated at the fifth-order solution (FSAL).
        let y_new = y_stage;
        let cfg = &self.cfg;
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut e = ZERO;
            for (s, ks) in k.iter().enumerate() {
                e += E[s] * ks[i];
            }
            let floor = if i == 0 { cfg.abs_tol * scale0 } else { cfg.abs_tol };
            let sc = floor.max(cfg.rel_tol * self.y[i].norm().max(y_new[i].norm()));
            err = err.max((h * e).norm() / sc);
        }
        if !err.is_finite() {
            return Err(Rejection::LeftDisk);
        }
        let floor = match self.frame {
            Frame::Plain => cfg.abs_tol,
            _ => cfg.abs_tol * scale0,
        };
        if !(self.frame.margin(y_new[0]) > -10.0 * floor) {
            return Err(Rejection::LeftDisk);
        }
        Ok((y_new, k[6], err))
    }
}

/// `F_t(z)` and derivatives through `order` (0..=3).
pub fn evolve(
    g: &GeneratorSpec,
    z: Complex64,
    t: f64,
    order: usize,
    cfg: &IntegratorConfig,
) -> Result<FlowJet, FlowError> {
    evolve_in(g, Frame::Plain, z, t, order, cfg)
}

/// Like [`evolve`], but integrating in `frame`.
pub fn evolve_in(
    g: &GeneratorSpec,
    frame: Frame,
    z: Complex64,
    t: f64,
    order: usize,
    cfg: &IntegratorConfig,
) -> Result<FlowJet, FlowError> {
    if !(t >= 0.0) {
        return Err(FlowError::NegativeTime(t));
    }
    let mut tr = Trajectory::start(g, frame, z, order, cfg)?;
    tr.advance(t)?;
    Ok(tr.jet())
}

/// The orbit `F_1(z), ..., F_n(z)` of the time-one map.
pub fn iterate(
    g: &GeneratorSpec,
    z: Complex64,
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<Complex64>, FlowError> {
    iterate_offsets(g, Frame::Plain, z, n, cfg)
}

/// Orbit of the time-one map as frame offsets, starting from the disk point `z`.
pub fn iterate_offsets(
    g: &GeneratorSpec,
    frame: Frame,
    z: Complex64,
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<Complex64>, FlowError> {
    let mut tr = Trajectory::start(g, frame, z, 0, cfg)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        tr.advance(1.0)?;
        out.push(tr.offset());
    }
    Ok(out)
}

/// Maps `op` over `points` in parallel, returning results in input order and
/// the first error by position.
pub(crate) fn par_map<T, R, E, F>(points: &[T], op: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync,
{
    let results: Vec<Result<R, E>> = points.par_iter().map(&op).collect();
    results.into_iter().collect()
}

/// 16 points: `|z|` in {0.2, 0.4, 0.6, 0.8} at 4 angles.
pub fn disk16_grid() -> Vec<Complex64> {
    (1..=4)
        .flat_map(|i| {
            let r = 0.2 * i as f64;
            (0..4).map(move |k| {
                Complex64::from_polar(r, (k as f64 + 0.3) * std::f64::consts::FRAC_PI_2)
            })
        })
        .collect()
}

/// `max |F_{t+s}(z) - F_t(F_s(z))|` over `grid`.
pub fn semigroup_residual(
    g: &GeneratorSpec,
    grid: &[Complex64],
    t: f64,
    s: f64,
    cfg: &IntegratorConfig,
) -> Result<f64, FlowError> {
    let residuals = par_map(grid, |&z| {
        let direct = evolve(g, z, t + s, 0, cfg)?.u;
        let inner = evolve(g, z, s, 0, cfg)?.u;
        let composed = evolve(g, inner, t, 0, cfg)?.u;
        Ok::<_, FlowError>((direct - composed).norm())
    })?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(text: &str) -> GeneratorSpec {
        GeneratorSpec::parse(text, text).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_flow_decays() {
        let j = evolve(&gen("z"), c(0.5, 0.0), 1.0, 1, &IntegratorConfig::default()).unwrap();
        let e = (-1.0f64).exp();
        assert!((j.u - 0.5 * e).norm() < 1e-11);
        assert!((j.u1 - e).norm() < 1e-11);
        assert!(j.steps_accepted > 0);
    }

    #[test]
    fn parabolic_flow_from_origin() {
        let j = evolve(&gen("-(1-z)^2"), ZERO, 1.0, 0, &IntegratorConfig::default()).unwrap();
        assert!((j.u - 0.5).norm() < 1e-10);
    }

    #[test]
    fn hyperbolic_flow_from_origin() {
        let j = evolve(&gen("(z^2-1)/2"), ZERO, 1.0, 0, &IntegratorConfig::default()).unwrap();
        assert!((j.u - 0.5f64.tanh()).norm() < 1e-10);
    }

    #[test]
    fn zero_time_is_identity() {
        let z = c(0.2, -0.3);
        let j = evolve(&gen("z*(1+z^2)"), z, 0.0, 3, &IntegratorConfig::default()).unwrap();
        assert_eq!((j.u, j.u1, j.u2, j.u3), (z, ONE, ZERO, ZERO));
    }

    #[test]
    fn boundary_frame_matches_plain() {
        let g = gen("-(1-z)^2");
        let cfg = IntegratorConfig::default();
        let z = c(0.3, 0.2);
        let plain = evolve(&g, z, 3.0, 2, &cfg).unwrap();
        let framed = evolve_in(&g, Frame::Boundary(ONE), z, 3.0, 2, &cfg).unwrap();
        assert!((plain.u - framed.u).norm() < 1e-10);
        assert!((plain.u2 - framed.u2).norm() < 1e-9);
        // offset is 1 - u in this frame
        let w = ONE - z;
        assert!((framed.offset - w / (1.0 + 3.0 * w)).norm() < 1e-10 * framed.offset.norm());
    }

    #[test]
    fn outward_field_is_rejected() {
        let err = evolve(&gen("-z"), c(0.5, 0.0), 2.0, 0, &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(err, FlowError::NotAGenerator { .. }), "{err:?}");
    }

    #[test]
    fn invalid_inputs() {
        let cfg = IntegratorConfig::default();
        let g = gen("z");
        assert!(matches!(evolve(&g, c(1.0, 0.0), 1.0, 0, &cfg), Err(FlowError::OutsideDisk(_))));
        assert!(matches!(evolve(&g, ZERO, -1.0, 0, &cfg), Err(FlowError::NegativeTime(_))));
        let bad = IntegratorConfig { h_min: 1.0, ..cfg };
        assert!(matches!(evolve(&g, ZERO, 1.0, 0, &bad), Err(FlowError::InvalidConfig(_))));
        let tiny = IntegratorConfig { max_steps: 1, ..cfg };
        assert!(matches!(
            evolve(&g, c(0.5, 0.0), 1.0, 0, &tiny),
            Err(FlowError::MaxStepsExceeded { .. })
        ));
    }

    #[test]
    fn generator_validation() {
        assert!(gen("z").with_declared_dw(ZERO).validate().is_ok());
        assert!(gen("z").with_declared_dw(c(0.5, 0.0)).validate().is_err());
        assert!(gen("1/z").validate().is_ok());
        assert!(gen("log(z)").validate().is_ok());
        assert!(gen("z").with_declared_dw(c(1.5, 0.0)).validate().is_err());
    }

    #[test]
    fn iterate_orbits() {
        let cfg = IntegratorConfig::default();
        let orbit = iterate(&gen("-(1-z)^2"), ZERO, 3, &cfg).unwrap();
        for (k, w) in orbit.iter().enumerate() {
            let n = (k + 1) as f64;
            assert!((w - n / (n + 1.0)).norm() < 1e-10);
        }
        let orbit = iterate(&gen("z"), c(0.5, 0.0), 3, &cfg).unwrap();
        for (k, w) in orbit.iter().enumerate() {
            assert!((w - 0.5 * (-(k as f64 + 1.0)).exp()).norm() < 1e-11);
        }
        let orbit = iterate(&gen("(z^2-1)/2"), ZERO, 2, &cfg).unwrap();
        assert!((orbit[0] - 0.5f64.tanh()).norm() < 1e-10);
        assert!((orbit[1] - 1.0f64.tanh()).norm() < 1e-10);
    }

    #[test]
    fn semigroup_law_linear() {
        let r = semigroup_residual(&gen("z"), &[c(0.3, 0.0), c(0.0, 0.5)], 0.7, 0.4, &IntegratorConfig::default())
            .unwrap();
        assert!(r < 1e-12, "{r}");
    }
}
