//! Commutativity of semigroup pairs, generator proportionality, disk
//! automorphism groups and the bundled model families.

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{AnalyticExpr, Node};
use crate::flow::{evolve, par_map, FlowError, GeneratorSpec, IntegratorConfig};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommuteError {
    #[error("point outside the domain: {0}")]
    DomainError(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("g vanishes at {vanishing} of {size} sample points")]
    DegenerateSample { vanishing: usize, size: usize },
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Residual of one `(t, s, z)` combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResidual {
    pub t: f64,
    pub s: f64,
    pub z: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommuteReport {
    pub max_residual: f64,
    pub argmax: PairResidual,
    pub grid_spec: String,
    pub residuals: Vec<PairResidual>,
}

/// 8 points: `|z|` in {0.3, 0.6} at 4 angles.
pub fn default_grid() -> Vec<Complex64> {
    [0.3, 0.6]
        .iter()
        .flat_map(|&r| {
            (0..4).map(move |k| Complex64::from_polar(r, (k as f64 + 0.125) * std::f64::consts::FRAC_PI_2))
        })
        .collect()
}

pub const DEFAULT_TIMES: [(f64, f64); 5] = [(0.5, 0.5), (1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (0.25, 3.0)];

/// `max |F_t(G_s(z)) - G_s(F_t(z))|` over `ts x grid`.
pub fn commute_residual(
    gf: &GeneratorSpec,
    gg: &GeneratorSpec,
    ts: &[(f64, f64)],
    grid: &[Complex64],
    cfg: &IntegratorConfig,
) -> Result<CommuteReport, CommuteError> {
    if ts.is_empty() || grid.is_empty() {
        return Err(CommuteError::InvalidSample("empty time or point set".into()));
    }
    let cases: Vec<(f64, f64, Complex64)> =
        ts.iter().flat_map(|&(t, s)| grid.iter().map(move |&z| (t, s, z))).collect();
    let residuals = par_map(&cases, |&(t, s, z)| {
        let fg = evolve(gf, evolve(gg, z, s, 0, cfg)?.u, t, 0, cfg)?.u;
        let gf_ = evolve(gg, evolve(gf, z, t, 0, cfg)?.u, s, 0, cfg)?.u;
        Ok::<_, FlowError>(PairResidual { t, s, z, residual: (fg - gf_).norm() })
    })?;
    let argmax = *residuals
        .iter()
        .reduce(|a, b| if b.residual > a.residual { b } else { a })
        .expect("nonempty");
    Ok(CommuteReport {
        max_residual: argmax.residual,
        argmax,
        grid_spec: format!("{} points x {} time pairs", grid.len(), ts.len()),
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionalityReport {
    /// Least-squares `a` in `f ~ a g`.
    pub a: Complex64,
    /// `max |f(z) - a g(z)|` over the sample.
    pub residual: f64,
    pub sample_size: usize,
}

const VANISHING: f64 = 1e-14;

/// Fits `f = a g` by least squares over `sample`.
pub fn proportionality(
    gf: &GeneratorSpec,
    gg: &GeneratorSpec,
    sample: &[Complex64],
) -> Result<ProportionalityReport, CommuteError> {
    if sample.len() < 8 {
        return Err(CommuteError::InvalidSample(format!(
            "need at least 8 points, got {}",
            sample.len()
        )));
    }
    if let Some(z) = sample.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(CommuteError::InvalidSample(format!("{z} is not inside the unit disk")));
    }
    let mut pairs = Vec::with_capacity(sample.len());
    for &z in sample {
        let fv = gf.f.eval(z).map_err(|e| CommuteError::InvalidSample(format!("f at {z}: {e}")))?;
        let gv = gg.f.eval(z).map_err(|e| CommuteError::InvalidSample(format!("g at {z}: {e}")))?;
        pairs.push((fv, gv));
    }
    let vanishing = pairs.iter().filter(|(_, g)| g.norm() < VANISHING).count();
    if 2 * vanishing > pairs.len() {
        return Err(CommuteError::DegenerateSample { vanishing, size: pairs.len() });
    }
    let num: Complex64 = pairs.iter().map(|(f, g)| g.conj() * f).sum();
    let den: f64 = pairs.iter().map(|(_, g)| g.norm_sqr()).sum();
    let a = num / den;
    let residual = pairs.iter().map(|(f, g)| (f - a * g).norm()).fold(0.0, f64::max);
    Ok(ProportionalityReport { a, residual, sample_size: pairs.len() })
}

/// `m_tau(z) = (tau - z) / (1 - conj(tau) z)`, the involution swapping `tau` and 0.
pub fn mobius(tau: Complex64, z: Complex64) -> Result<Complex64, CommuteError> {
    if !(tau.norm() < 1.0) {
        return Err(CommuteError::DomainError(format!("tau = {tau} must satisfy |tau| < 1")));
    }
    if !(z.norm() <= 1.0 + 1e-12) {
        return Err(CommuteError::DomainError(format!("z = {z} lies outside the closed disk")));
    }
    let den = ONE - tau.conj() * z;
    if den.norm() == 0.0 {
        return Err(CommuteError::DomainError(format!("zero denominator at z = {z}")));
    }
    Ok((tau - z) / den)
}

/// The automorphism `z -> m_tau(factor * m_tau(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatedLinearMap {
    pub tau: Complex64,
    pub factor: Complex64,
}

impl ConjugatedLinearMap {
    pub fn apply(&self, z: Complex64) -> Result<Complex64, CommuteError> {
        mobius(self.tau, self.factor * mobius(self.tau, z)?)
    }
}

/// `F_t = m_tau o (e^{i phi t} .) o m_tau`.
pub fn elliptic_group(tau: Complex64, phi: f64, t: f64) -> Result<ConjugatedLinearMap, CommuteError> {
    check_interior(tau)?;
    if !(phi.is_finite() && t.is_finite()) {
        return Err(CommuteError::InvalidParameter("phi and t must be finite".into()));
    }
    Ok(ConjugatedLinearMap { tau, factor: Complex64::from_polar(1.0, phi * t) })
}

/// `G_t = m_tau o (e^{-a t} .) o m_tau`, a semigroup of self-maps iff `Re a >= 0`.
pub fn lft_semigroup(tau: Complex64, a: Complex64, t: f64) -> Result<ConjugatedLinearMap, CommuteError> {
    check_interior(tau)?;
    if !(a.re >= 0.0) {
        return Err(CommuteError::InvalidParameter(format!("Re a = {} is negative", a.re)));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CommuteError::InvalidParameter(format!("t = {t} must be finite and >= 0")));
    }
    Ok(ConjugatedLinearMap { tau, factor: (-a * t).exp() })
}

fn check_interior(tau: Complex64) -> Result<(), CommuteError> {
    if tau.norm() < 1.0 {
        Ok(())
    } else {
        Err(CommuteError::DomainError(format!("tau = {tau} must satisfy |tau| < 1")))
    }
}

/// `f(z) = a1 / (tau - sigma) * (z - tau) * (z - sigma)`: the hyperbolic
/// automorphism group attracted to `tau` and repelled from `sigma`.
pub fn hyperbolic_auto_generator(
    tau: Complex64,
    sigma: Complex64,
    a1: f64,
) -> Result<GeneratorSpec, CommuteError> {
    let unimodular = |w: Complex64| (w.norm() - 1.0).abs() < 1e-12;
    if !unimodular(tau) || !unimodular(sigma) {
        return Err(CommuteError::InvalidParameter("tau and sigma must be unimodular".into()));
    }
    if (tau - sigma).norm() < 1e-12 {
        return Err(CommuteError::InvalidParameter("tau and sigma must differ".into()));
    }
    if !(a1 > 0.0 && a1.is_finite()) {
        return Err(CommuteError::InvalidParameter(format!("a1 = {a1} must be positive")));
    }
    let factor = |c: Complex64| Box::new(Node::Sub(Box::new(Node::Var), Box::new(Node::Const(c))));
    let root = Node::Mul(
        Box::new(Node::Mul(Box::new(Node::Const(a1 / (tau - sigma))), factor(tau))),
        factor(sigma),
    );
    Ok(GeneratorSpec::new(format!("hyperbolic automorphism ({tau}, {sigma}, {a1})"), AnalyticExpr::new(root))
        .with_declared_dw(tau))
}

/// `max |G_t(e^{i phi} z) - e^{i phi} G_t(z)|` over `grid`.
pub fn rotation_equivariance(
    gg: &GeneratorSpec,
    phi: f64,
    t: f64,
    grid: &[Complex64],
    cfg: &IntegratorConfig,
) -> Result<f64, CommuteError> {
    let rot = Complex64::from_polar(1.0, phi);
    let residuals = par_map(grid, |&z| {
        let a = evolve(gg, rot * z, t, 0, cfg)?.u;
        let b = rot * evolve(gg, z, t, 0, cfg)?.u;
        Ok::<_, FlowError>((a - b).norm())
    })?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// A bundled model semigroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family {
    pub name: &'static str,
    pub description: &'static str,
    /// Generator expression.
    pub generator: &'static str,
    /// The time-one map, when it is the natural way to state the family.
    pub map: Option<&'static str>,
    pub dw: Complex64,
    /// Every `F_t` is a disk automorphism.
    pub automorphic: bool,
}

impl Family {
    pub fn spec(&self) -> GeneratorSpec {
        GeneratorSpec::parse(self.name, self.generator)
            .expect("bundled generator parses")
            .with_declared_dw(self.dw)
    }
}

const LOG_MAP: &str = "(2*z+(1-z)*log(2/(1-z)))/(2+(1-z)*log(2/(1-z)))";

pub const FAMILIES: [Family; 7] = [
    Family {
        name: "linear-dilation",
        description: "F_t(z) = exp(-t) z",
        generator: "z",
        map: None,
        dw: Complex64::new(0.0, 0.0),
        automorphic: false,
    },
    Family {
        name: "elliptic-rotation",
        description: "rotation group F_t(z) = exp(i pi t) z",
        generator: "-i*3.141592653589793*z",
        map: None,
        dw: Complex64::new(0.0, 0.0),
        automorphic: true,
    },
    Family {
        name: "hyperbolic-automorphism",
        description: "hyperbolic automorphisms fixing 1 and -1, attracted to 1",
        generator: "(z^2-1)/2",
        map: None,
        dw: Complex64::new(1.0, 0.0),
        automorphic: true,
    },
    Family {
        name: "parabolic-nonautomorphic",
        description: "parabolic semigroup at 1, F_t(z) = (z + t(1-z)) / (1 + t(1-z))",
        generator: "-(1-z)^2",
        map: None,
        dw: Complex64::new(1.0, 0.0),
        automorphic: false,
    },
    Family {
        name: "parabolic-automorphic",
        description: "parabolic automorphisms at 1, translations by i t in the half-plane",
        generator: "-(i/2)*(1-z)^2",
        map: None,
        dw: Complex64::new(1.0, 0.0),
        automorphic: true,
    },
    Family {
        name: "odd-cubic",
        description: "odd generator z(1+z^2), equivariant under the half-turn only",
        generator: "z*(1+z^2)",
        map: None,
        dw: Complex64::new(0.0, 0.0),
        automorphic: false,
    },
    Family {
        name: "log-map",
        description: "self-map with F'(1) = 1 and no finite angular F''(1); flow of z - F(z)",
        generator: "z-(2*z+(1-z)*log(2/(1-z)))/(2+(1-z)*log(2/(1-z)))",
        map: Some(LOG_MAP),
        dw: Complex64::new(1.0, 0.0),
        automorphic: false,
    },
];

pub fn family(name: &str) -> Option<&'static Family> {
    FAMILIES.iter().find(|f| f.name == name)
}
