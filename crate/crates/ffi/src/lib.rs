//! C ABI for `diskflow`.
//!
//! Objects are opaque handles created by `df_*_new`/`df_*_build` functions and
//! released with the matching `df_*_free`. Every fallible call returns a
//! [`DfStatus`]; on failure a description is available from
//! [`df_last_error_message`] on the same thread. Output pointers are written
//! only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use diskflow::boundary::{dw_point, theorem1_verify_with, DwKind};
use diskflow::commute::{commute_residual, default_grid, DEFAULT_TIMES};
use diskflow::expr::{parse, AnalyticExpr};
use diskflow::flow::{evolve, GeneratorSpec, IntegratorConfig};
use diskflow::koenigs::{
    abel_parabolic_with, schroeder_hyperbolic_with, schroeder_interior_with, KoenigsKind, KoenigsModel,
    KoenigsOptions,
};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    EvalError = 4,
    InvalidArgument = 5,
    FlowError = 6,
    BoundaryError = 7,
    KoenigsError = 8,
    CommuteError = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for DfComplex {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<DfComplex> for Complex64 {
    fn from(c: DfComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfIntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: u64,
}

impl From<IntegratorConfig> for DfIntegratorConfig {
    fn from(c: IntegratorConfig) -> Self {
        Self {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            h_init: c.h_init,
            h_min: c.h_min,
            max_steps: c.max_steps as u64,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfDwKind {
    Dilation = 0,
    Hyperbolic = 1,
    ParabolicAutomorphic = 2,
    ParabolicNonautomorphic = 3,
    AutomorphismGroupElliptic = 4,
}

impl From<DwKind> for DfDwKind {
    fn from(k: DwKind) -> Self {
        match k {
            DwKind::Dilation => DfDwKind::Dilation,
            DwKind::Hyperbolic => DfDwKind::Hyperbolic,
            DwKind::ParabolicAutomorphic => DfDwKind::ParabolicAutomorphic,
            DwKind::ParabolicNonautomorphic => DfDwKind::ParabolicNonautomorphic,
            DwKind::AutomorphismGroupElliptic => DfDwKind::AutomorphismGroupElliptic,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfClassification {
    pub kind: DfDwKind,
    pub tau: DfComplex,
    pub beta: DfComplex,
    /// Valid only when `has_alpha` is nonzero.
    pub alpha: DfComplex,
    /// Valid only when `has_gamma` is nonzero.
    pub gamma: DfComplex,
    pub has_alpha: u8,
    pub has_gamma: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfBoundaryDerivative {
    pub tau: DfComplex,
    pub predicted: DfComplex,
    pub measured: DfComplex,
    pub measured_error: f64,
    pub residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfKoenigsKind {
    /// Chosen from the Denjoy-Wolff classification.
    Auto = 0,
    Schroeder = 1,
    Abel = 2,
}

/// Parsed expression.
pub struct DfExpr(AnalyticExpr);

/// Semigroup generator.
pub struct DfGenerator(GeneratorSpec);

/// Schroeder or Abel model.
pub struct DfKoenigsModel(KoenigsModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: DfStatus, message: impl std::fmt::Display) -> DfStatus {
    set_error(message.to_string());
    status
}

/// Runs `body`, converting panics to `DfStatus::Panic` and clearing the error on success.
fn guard(body: impl FnOnce() -> DfStatus) -> DfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(DfStatus::Ok) => {
            set_error("");
            DfStatus::Ok
        }
        Ok(status) => status,
        Err(_) => fail(DfStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, DfStatus> {
    if text.is_null() {
        return Err(fail(DfStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(text).to_str().map_err(|e| fail(DfStatus::InvalidUtf8, e))
}

unsafe fn read_cfg(cfg: *const DfIntegratorConfig) -> Result<IntegratorConfig, DfStatus> {
    let cfg = match cfg.as_ref() {
        None => IntegratorConfig::default(),
        Some(c) => IntegratorConfig {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            h_init: c.h_init,
            h_min: c.h_min,
            max_steps: usize::try_from(c.max_steps).unwrap_or(usize::MAX),
        },
    };
    cfg.validate().map_err(|e| fail(DfStatus::InvalidArgument, e))?;
    Ok(cfg)
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(DfStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn df_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn df_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Writes the default integrator settings.
///
/// # Safety
/// `out` must be null or point to writable memory for one `DfIntegratorConfig`.
#[no_mangle]
pub unsafe extern "C" fn df_integrator_default(out: *mut DfIntegratorConfig) -> DfStatus {
    guard(|| {
        non_null!(out);
        *out = IntegratorConfig::default().into();
        DfStatus::Ok
    })
}

/// Parses `text`. On a parse error `*error_offset` (if non-null) receives the
/// byte offset of the error.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable;
/// `error_offset` may be null.
#[no_mangle]
pub unsafe extern "C" fn df_expr_parse(
    text: *const c_char,
    out: *mut *mut DfExpr,
    error_offset: *mut usize,
) -> DfStatus {
    guard(|| {
        non_null!(out);
        let text = try_status!(read_str(text));
        match parse(text) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(DfExpr(e)));
                DfStatus::Ok
            }
            Err(e) => {
                if !error_offset.is_null() {
                    *error_offset = e.offset;
                }
                fail(DfStatus::ParseError, e)
            }
        }
    })
}

/// # Safety
/// `expr` must be null or a handle from `df_expr_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_expr_free(expr: *mut DfExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Value of the expression at `z`.
///
/// # Safety
/// `expr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_expr_eval(expr: *const DfExpr, z: DfComplex, out: *mut DfComplex) -> DfStatus {
    guard(|| {
        non_null!(expr, out);
        match (*expr).0.eval(z.into()) {
            Ok(v) => {
                *out = v.into();
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::EvalError, e),
        }
    })
}

/// Value and derivatives of orders 1..=3 at `z`, written to `out[0..4]`.
///
/// # Safety
/// `expr` must be a live handle; `out` must point to 4 writable `DfComplex`.
#[no_mangle]
pub unsafe extern "C" fn df_expr_eval_jet(expr: *const DfExpr, z: DfComplex, out: *mut DfComplex) -> DfStatus {
    guard(|| {
        non_null!(expr, out);
        match (*expr).0.eval_jet(z.into()) {
            Ok(j) => {
                for (k, c) in [j.c0, j.c1, j.c2, j.c3].into_iter().enumerate() {
                    *out.add(k) = c.into();
                }
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::EvalError, e),
        }
    })
}

/// Canonical printed form; release with `df_string_free`.
///
/// # Safety
/// `expr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_expr_to_string(expr: *const DfExpr, out: *mut *mut c_char) -> DfStatus {
    guard(|| {
        non_null!(expr, out);
        let text = (*expr).0.to_string();
        *out = CString::new(text).expect("printed expressions contain no NUL").into_raw();
        DfStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a generator expression.
///
/// # Safety
/// As for `df_expr_parse`.
#[no_mangle]
pub unsafe extern "C" fn df_generator_new(
    text: *const c_char,
    out: *mut *mut DfGenerator,
    error_offset: *mut usize,
) -> DfStatus {
    guard(|| {
        non_null!(out);
        let text = try_status!(read_str(text));
        let g = match GeneratorSpec::parse(text, text) {
            Ok(g) => g,
            Err(e) => {
                if !error_offset.is_null() {
                    *error_offset = e.offset;
                }
                return fail(DfStatus::ParseError, e);
            }
        };
        if let Err(e) = g.validate() {
            return fail(DfStatus::InvalidArgument, e);
        }
        *out = Box::into_raw(Box::new(DfGenerator(g)));
        DfStatus::Ok
    })
}

/// # Safety
/// `g` must be null or a handle from `df_generator_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_generator_free(g: *mut DfGenerator) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// `F_t(z)` and its z-derivatives through `order` (0..=3), written to
/// `out[0..=order]`. A null `cfg` selects the defaults.
///
/// # Safety
/// `g` must be a live handle; `cfg` null or valid; `out` must point to
/// `order + 1` writable `DfComplex`.
#[no_mangle]
pub unsafe extern "C" fn df_flow_evolve(
    g: *const DfGenerator,
    z: DfComplex,
    t: f64,
    order: u32,
    cfg: *const DfIntegratorConfig,
    out: *mut DfComplex,
) -> DfStatus {
    guard(|| {
        non_null!(g, out);
        if order > 3 {
            return fail(DfStatus::InvalidArgument, format!("order {order} is outside 0..=3"));
        }
        let cfg = try_status!(read_cfg(cfg));
        match evolve(&(*g).0, z.into(), t, order as usize, &cfg) {
            Ok(j) => {
                for k in 0..=order as usize {
                    *out.add(k) = j.derivative(k).into();
                }
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::FlowError, e),
        }
    })
}

/// Denjoy-Wolff point and type.
///
/// # Safety
/// `g` must be a live handle; `cfg` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_classify(
    g: *const DfGenerator,
    cfg: *const DfIntegratorConfig,
    out: *mut DfClassification,
) -> DfStatus {
    guard(|| {
        non_null!(g, out);
        let cfg = try_status!(read_cfg(cfg));
        match dw_point(&(*g).0, &cfg) {
            Ok(dw) => {
                *out = DfClassification {
                    kind: dw.kind.into(),
                    tau: dw.tau.into(),
                    beta: dw.beta.into(),
                    alpha: dw.alpha.unwrap_or_default().into(),
                    gamma: dw.gamma.unwrap_or_default().into(),
                    has_alpha: dw.alpha.is_some() as u8,
                    has_gamma: dw.gamma.is_some() as u8,
                };
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::BoundaryError, e),
        }
    })
}

/// Boundary derivative of order `order` (1..=3) of `F_t` at the Denjoy-Wolff
/// point, measured and predicted from `f'`, `f''`, `f'''` there.
///
/// # Safety
/// `g` must be a live handle; `cfg` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_boundary_derivative(
    g: *const DfGenerator,
    t: f64,
    order: u32,
    cfg: *const DfIntegratorConfig,
    out: *mut DfBoundaryDerivative,
) -> DfStatus {
    guard(|| {
        non_null!(g, out);
        let cfg = try_status!(read_cfg(cfg));
        let g = &(*g).0;
        let check = dw_point(g, &cfg).and_then(|dw| theorem1_verify_with(g, &dw, t, order as usize, &cfg));
        match check {
            Ok(c) => {
                *out = DfBoundaryDerivative {
                    tau: c.tau.into(),
                    predicted: c.predicted.into(),
                    measured: c.measured.into(),
                    measured_error: c.measured_error,
                    residual: c.residual,
                };
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::BoundaryError, e),
        }
    })
}

/// Builds a Schroeder or Abel model with the default stopping rule.
///
/// # Safety
/// `g` must be a live handle; `cfg` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_koenigs_build(
    g: *const DfGenerator,
    kind: DfKoenigsKind,
    cfg: *const DfIntegratorConfig,
    out: *mut *mut DfKoenigsModel,
) -> DfStatus {
    guard(|| {
        non_null!(g, out);
        let cfg = try_status!(read_cfg(cfg));
        let g = &(*g).0;
        let dw = match dw_point(g, &cfg) {
            Ok(dw) => dw,
            Err(e) => return fail(DfStatus::BoundaryError, e),
        };
        let abel = kind == DfKoenigsKind::Abel || (kind == DfKoenigsKind::Auto && dw.kind.is_parabolic());
        let model = if abel {
            abel_parabolic_with(g, &dw, &cfg, &KoenigsOptions::abel())
        } else if dw.kind.is_interior() {
            schroeder_interior_with(g, &dw, &cfg, &KoenigsOptions::schroeder())
        } else {
            schroeder_hyperbolic_with(g, &dw, &cfg, &KoenigsOptions::schroeder())
        };
        match model {
            Ok(m) => {
                *out = Box::into_raw(Box::new(DfKoenigsModel(m)));
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::KoenigsError, e),
        }
    })
}

/// # Safety
/// `m` must be null or a handle from `df_koenigs_build` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_koenigs_free(m: *mut DfKoenigsModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Model kind: `Schroeder` for both interior and boundary Schroeder models.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_koenigs_kind(m: *const DfKoenigsModel, out: *mut DfKoenigsKind) -> DfStatus {
    guard(|| {
        non_null!(m, out);
        *out = match (*m).0.kind {
            KoenigsKind::Abel => DfKoenigsKind::Abel,
            _ => DfKoenigsKind::Schroeder,
        };
        DfStatus::Ok
    })
}

/// Value of the model's intertwining function at `z`.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_koenigs_eval(m: *const DfKoenigsModel, z: DfComplex, out: *mut DfComplex) -> DfStatus {
    guard(|| {
        non_null!(m, out);
        match (*m).0.eval(z.into()) {
            Ok(v) => {
                *out = v.into();
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::KoenigsError, e),
        }
    })
}

/// Largest `|F_t(G_s(z)) - G_s(F_t(z))|` over the default grid and time pairs.
///
/// # Safety
/// `f`, `g` must be live handles; `cfg` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_commute_residual(
    f: *const DfGenerator,
    g: *const DfGenerator,
    cfg: *const DfIntegratorConfig,
    out: *mut f64,
) -> DfStatus {
    guard(|| {
        non_null!(f, g, out);
        let cfg = try_status!(read_cfg(cfg));
        match commute_residual(&(*f).0, &(*g).0, &DEFAULT_TIMES, &default_grid(), &cfg) {
            Ok(r) => {
                *out = r.max_residual;
                DfStatus::Ok
            }
            Err(e) => fail(DfStatus::CommuteError, e),
        }
    })
}
