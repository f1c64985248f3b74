//! Command-line front end.
//!
//! Each run writes one JSON report line to standard output. Failures write a
//! JSON error object to standard error and exit with 1 (usage), 2 (parse) or
//! 3 (numeric failure).

mod config;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::boundary::{boundary_taylor, dw_point, poincare_distance, theorem1_verify_with, DwClassification};
use crate::commute::{self, commute_residual, proportionality, rotation_equivariance, CommuteError, FAMILIES};
use crate::expr::{parse, AnalyticExpr, Node};
use crate::flow::{self, evolve, iterate, par_map, GeneratorSpec, IntegratorConfig};
use crate::koenigs::{self, KoenigsError, KoenigsModel, KoenigsOptions, Stopping};

pub use config::{IntegratorOverrides, RunConfig};
pub use report::{fmt_float, to_json_line, Category, CliError, SCHEMA_VERSION};
use report::{complex, opt_complex};

#[derive(Parser, Debug)]
#[command(name = "diskflow", version, about = "Semigroups of holomorphic self-maps of the unit disk")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON configuration file; flags win on conflict
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Also write orbit or grid data as CSV
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[arg(long, global = true, value_name = "X")]
    rel_tol: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    abs_tol: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    h_init: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    h_min: Option<f64>,
    /// Step budget per unit of integration time
    #[arg(long, global = true, value_name = "N")]
    max_steps: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Auto,
    Schroeder,
    Abel,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression and print it back
    ParseCheck {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Locate and classify the Denjoy-Wolff point
    Classify {
        /// Generator expression, config label or bundled family name
        #[arg(short = 'f', long = "generator", allow_hyphen_values = true)]
        f: Option<String>,
    },
    /// F_t(z) and its z-derivatives
    Flow {
        #[arg(short = 'f', long = "generator", allow_hyphen_values = true)]
        f: Option<String>,
        /// Start point, a constant expression such as 0.3+0.2*i
        #[arg(short = 'z', allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(short = 't', allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Orbit of the time-one map
    Orbit {
        #[arg(short = 'f', long = "generator", allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(short = 'z', allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(short = 'n')]
        n: Option<usize>,
    },
    /// Boundary derivatives of F_t at the Denjoy-Wolff point vs. closed form
    Derivs {
        #[arg(short = 'f', long = "generator", allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(short = 't', allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Boundary Taylor coefficients of f at a unimodular point
    Taylor {
        #[arg(short = 'f', long = "generator", allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(short = 'k')]
        k: Option<usize>,
    },
    /// Schroeder or Abel function of the semigroup
    Koenigs {
        #[arg(short = 'f', long = "generator", allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Fixed iteration count instead of the Cauchy stopping rule
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Commutation residual of two semigroups
    Commute {
        #[arg(short = 'f', long = "generator", allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(short = 'g', long = "other", allow_hyphen_values = true)]
        g: Option<String>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Rotation equivariance residual of G_t
    Equivariance {
        #[arg(short = 'g', long = "generator", allow_hyphen_values = true)]
        g: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[arg(short = 't', allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// List the bundled model families
    Examples,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ParseCheck { .. } => "parse-check",
            Command::Classify { .. } => "classify",
            Command::Flow { .. } => "flow",
            Command::Orbit { .. } => "orbit",
            Command::Derivs { .. } => "derivs",
            Command::Taylor { .. } => "taylor",
            Command::Koenigs { .. } => "koenigs",
            Command::Commute { .. } => "commute",
            Command::Equivariance { .. } => "equivariance",
            Command::Examples => "examples",
        }
    }

    fn writes_csv(&self) -> bool {
        matches!(self, Command::Orbit { .. } | Command::Koenigs { .. } | Command::Commute { .. })
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return match write!(out, "{}", e.render()) {
                    Ok(()) => 0,
                    Err(_) => 1,
                };
            }
            let e = CliError::usage(e.render().to_string().trim_end());
            let _ = err.write_all(to_json_line(&e.to_json(None)).as_bytes());
            return Category::Usage.exit_code();
        }
    };
    let name = cli.command.name();
    match execute(cli) {
        Ok(report) => match out.write_all(to_json_line(&report).as_bytes()) {
            Ok(()) => 0,
            Err(_) => 1,
        },
        Err(e) => {
            let _ = err.write_all(to_json_line(&e.to_json(Some(name))).as_bytes());
            e.category.exit_code()
        }
    }
}

struct Ctx {
    config: RunConfig,
    cfg: IntegratorConfig,
    inputs: Map<String, Value>,
    warnings: Vec<String>,
}

impl Ctx {
    fn param(&self, name: &str) -> Option<&Value> {
        self.config.params.get(name)
    }

    fn missing(name: &str) -> CliError {
        CliError::usage(format!("missing parameter '{name}' (flag or config params)"))
    }

    fn string(&mut self, flag: Option<String>, name: &str) -> Result<String, CliError> {
        let s = match flag {
            Some(s) => s,
            None => match self.param(name) {
                Some(Value::String(s)) => s.clone(),
                Some(_) => return Err(CliError::usage(format!("config param '{name}' must be a string"))),
                None => return Err(Self::missing(name)),
            },
        };
        Ok(s)
    }

    fn number(&mut self, flag: Option<f64>, name: &str, default: Option<f64>) -> Result<f64, CliError> {
        let x = match flag {
            Some(x) => x,
            None => match self.param(name) {
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| CliError::usage(format!("config param '{name}' must be a number")))?,
                None => default.ok_or_else(|| Self::missing(name))?,
            },
        };
        if !x.is_finite() {
            return Err(CliError::usage(format!("parameter '{name}' must be finite")));
        }
        self.inputs.insert(name.into(), json!(x));
        Ok(x)
    }

    fn count(&mut self, flag: Option<usize>, name: &str, default: Option<usize>) -> Result<usize, CliError> {
        let n = match flag {
            Some(n) => n,
            None => match self.param(name) {
                Some(v) => v.as_u64().ok_or_else(|| {
                    CliError::usage(format!("config param '{name}' must be a nonnegative integer"))
                })? as usize,
                None => default.ok_or_else(|| Self::missing(name))?,
            },
        };
        self.inputs.insert(name.into(), json!(n));
        Ok(n)
    }

    fn complex(&mut self, flag: Option<String>, name: &str) -> Result<Complex64, CliError> {
        let c = match (flag, self.param(name)) {
            (Some(s), _) => parse_constant(&s)?,
            (None, Some(Value::String(s))) => parse_constant(&s.clone())?,
            (None, Some(Value::Number(x))) => Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0),
            (None, Some(Value::Array(a))) if a.len() == 2 && a.iter().all(Value::is_number) => {
                Complex64::new(a[0].as_f64().unwrap(), a[1].as_f64().unwrap())
            }
            (None, Some(_)) => {
                return Err(CliError::usage(format!(
                    "config param '{name}' must be a string, number or [re, im]"
                )))
            }
            (None, None) => return Err(Self::missing(name)),
        };
        self.inputs.insert(name.into(), complex(c));
        Ok(c)
    }

    /// A config label, a bundled family name, or an expression.
    fn generator(&mut self, flag: Option<String>, name: &str) -> Result<GeneratorSpec, CliError> {
        let text = self.string(flag, name)?;
        let g = if let Some(expr) = self.config.generators.get(&text) {
            GeneratorSpec::parse(text.clone(), expr).map_err(|e| CliError::parse(&e, expr))?
        } else if let Some(fam) = commute::family(&text) {
            fam.spec()
        } else {
            GeneratorSpec::parse(text.clone(), &text).map_err(|e| CliError::parse(&e, &text))?
        };
        g.validate()?;
        self.inputs.insert(name.into(), json!({ "label": g.label, "expr": g.f.to_string() }));
        Ok(g)
    }

    fn grid(&mut self, flag: Option<String>, default: &str) -> Result<Vec<Complex64>, CliError> {
        let name = match flag {
            Some(n) => n,
            None => match self.param("grid") {
                Some(Value::String(s)) => s.clone(),
                Some(_) => return Err(CliError::usage("config param 'grid' must be a string")),
                None => default.to_string(),
            },
        };
        let points = self
            .config
            .grid(&name)
            .or_else(|| builtin_grid(&name))
            .ok_or_else(|| CliError::usage(format!("unknown grid '{name}'")))?;
        self.inputs.insert("grid".into(), json!({ "name": name, "size": points.len() }));
        Ok(points)
    }
}

/// Names of the grids available without a config file.
pub const BUILTIN_GRIDS: [&str; 3] = ["default", "koenigs", "disk16"];

fn builtin_grid(name: &str) -> Option<Vec<Complex64>> {
    match name {
        "default" => Some(commute::default_grid()),
        "koenigs" => Some(koenigs::koenigs_grid()),
        "disk16" => Some(flow::disk16_grid()),
        _ => None,
    }
}

fn has_var(node: &Node) -> bool {
    match node {
        Node::Var => true,
        Node::Const(_) => false,
        Node::Neg(a) | Node::PowInt(a, _) | Node::Exp(a) | Node::Log(a) | Node::Sqrt(a) => has_var(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => has_var(a) || has_var(b),
    }
}

/// A complex number written as a constant expression, e.g. `-0.2+0.4*i`.
fn parse_constant(text: &str) -> Result<Complex64, CliError> {
    let e: AnalyticExpr = parse(text).map_err(|e| CliError::parse(&e, text))?;
    if has_var(e.root()) {
        return Err(CliError::usage(format!("'{text}' must be a constant, not a function of z")));
    }
    e.eval(Complex64::new(0.0, 0.0))
        .map_err(|err| CliError::usage(format!("cannot evaluate '{text}': {err}")))
}

fn execute(cli: Cli) -> Result<Value, CliError> {
    let config = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = IntegratorOverrides {
        rel_tol: cli.global.rel_tol,
        abs_tol: cli.global.abs_tol,
        h_init: cli.global.h_init,
        h_min: cli.global.h_min,
        max_steps: cli.global.max_steps,
    };
    let cfg = flags.apply(config.integrator.apply(IntegratorConfig::default()));
    cfg.validate()?;
    if cli.global.csv.is_some() && !cli.command.writes_csv() {
        return Err(CliError::usage(format!("--csv is not supported by '{}'", cli.command.name())));
    }
    let mut ctx = Ctx { config, cfg, inputs: Map::new(), warnings: Vec::new() };
    let name = cli.command.name();
    let csv = cli.global.csv.as_deref();
    let (outputs, mut diagnostics) = match cli.command {
        Command::ParseCheck { expr } => parse_check(&mut ctx, expr)?,
        Command::Classify { f } => classify(&mut ctx, f)?,
        Command::Flow { f, z, t, order } => flow_cmd(&mut ctx, f, z, t, order)?,
        Command::Orbit { f, z, n } => orbit(&mut ctx, f, z, n, csv)?,
        Command::Derivs { f, t, order } => derivs(&mut ctx, f, t, order)?,
        Command::Taylor { f, tau, k } => taylor(&mut ctx, f, tau, k)?,
        Command::Koenigs { f, kind, iterations, grid } => koenigs_cmd(&mut ctx, f, kind, iterations, grid, csv)?,
        Command::Commute { f, g, grid } => commute_cmd(&mut ctx, f, g, grid, csv)?,
        Command::Equivariance { g, phi, t, grid } => equivariance(&mut ctx, g, phi, t, grid)?,
        Command::Examples => examples(),
    };
    if name != "parse-check" && name != "examples" {
        let c = &ctx.cfg;
        ctx.inputs.insert(
            "integrator".into(),
            json!({
                "rel_tol": c.rel_tol, "abs_tol": c.abs_tol, "h_init": c.h_init,
                "h_min": c.h_min, "max_steps": c.max_steps,
            }),
        );
    }
    diagnostics.insert("warnings".into(), json!(ctx.warnings));
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": name,
        "inputs": Value::Object(ctx.inputs),
        "outputs": outputs,
        "diagnostics": Value::Object(diagnostics),
    }))
}

type Outcome = Result<(Value, Map<String, Value>), CliError>;

fn parse_check(ctx: &mut Ctx, text: String) -> Outcome {
    ctx.inputs.insert("expr".into(), json!(text));
    let e = parse(&text).map_err(|e| CliError::parse(&e, &text))?;
    let printed = e.to_string();
    let round_trip = parse(&printed).map(|back| back == e).unwrap_or(false);
    Ok((json!({ "printed": printed, "round_trip": round_trip }), Map::new()))
}

fn classification_json(dw: &DwClassification) -> (Value, Map<String, Value>) {
    let d = &dw.diagnostics;
    let outputs = json!({
        "kind": dw.kind.name(),
        "interior": dw.kind.is_interior(),
        "tau": complex(dw.tau),
        "beta": complex(dw.beta),
        "alpha": opt_complex(dw.alpha),
        "gamma": opt_complex(dw.gamma),
    });
    let diagnostics = json!({
        "orbit_separation": d.orbit_separation,
        "separation_slope": d.separation_slope,
        "f_residual": d.f_residual,
        "beta_error": d.beta_error,
        "re_alpha": d.re_alpha,
        "iterations": d.iterations,
    });
    (outputs, into_map(diagnostics))
}

fn into_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn classify(ctx: &mut Ctx, f: Option<String>) -> Outcome {
    let g = ctx.generator(f, "f")?;
    let dw = dw_point(&g, &ctx.cfg)?;
    if dw.alpha.is_none() && !dw.kind.is_interior() {
        ctx.warnings.push("angular limit of f'' at tau does not exist numerically".into());
    }
    Ok(classification_json(&dw))
}

fn flow_cmd(ctx: &mut Ctx, f: Option<String>, z: Option<String>, t: Option<f64>, order: Option<usize>) -> Outcome {
    let g = ctx.generator(f, "f")?;
    let z = ctx.complex(z, "z")?;
    let t = ctx.number(t, "t", None)?;
    let order = ctx.count(order, "order", Some(0))?;
    if order > 3 {
        return Err(CliError::usage(format!("order {order} is outside 0..=3")));
    }
    let j = evolve(&g, z, t, order, &ctx.cfg)?;
    let derivatives: Vec<Value> = (1..=order).map(|k| complex(j.derivative(k))).collect();
    let outputs = json!({ "u": complex(j.u), "derivatives": derivatives });
    let diagnostics = json!({ "steps_accepted": j.steps_accepted, "steps_rejected": j.steps_rejected });
    Ok((outputs, into_map(diagnostics)))
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let fail = |e: csv::Error| CliError::usage(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| fail(e.into()))
}

fn orbit(ctx: &mut Ctx, f: Option<String>, z: Option<String>, n: Option<usize>, csv: Option<&Path>) -> Outcome {
    let g = ctx.generator(f, "f")?;
    let z = ctx.complex(z, "z")?;
    let n = ctx.count(n, "n", None)?;
    let points = iterate(&g, z, n, &ctx.cfg)?;
    let mut prev = z;
    let mut rows = Vec::with_capacity(n);
    for (k, &p) in points.iter().enumerate() {
        // the orbit can reach |z| = 1 in floating point near a boundary point
        let step = poincare_distance(prev, p).unwrap_or(f64::INFINITY);
        rows.push((k + 1, p, step));
        prev = p;
    }
    if rows.iter().any(|r| !r.2.is_finite()) {
        ctx.warnings.push("orbit reached the unit circle in floating point; some Poincare steps are infinite".into());
    }
    if let Some(path) = csv {
        write_csv(
            path,
            &["n", "re", "im", "poincare_step"],
            rows.iter().map(|&(k, p, s)| vec![k.to_string(), fmt_float(p.re), fmt_float(p.im), fmt_float(s)]),
        )?;
    }
    let orbit: Vec<Value> = rows
        .iter()
        .map(|&(k, p, s)| json!({ "n": k, "z": complex(p), "poincare_step": s }))
        .collect();
    Ok((json!({ "orbit": orbit }), Map::new()))
}

fn derivs(ctx: &mut Ctx, f: Option<String>, t: Option<f64>, order: Option<usize>) -> Outcome {
    let g = ctx.generator(f, "f")?;
    let t = ctx.number(t, "t", None)?;
    let order = ctx.count(order, "order", None)?;
    let dw = dw_point(&g, &ctx.cfg)?;
    let check = theorem1_verify_with(&g, &dw, t, order, &ctx.cfg)?;
    let outputs = json!({
        "kind": dw.kind.name(),
        "tau": complex(check.tau),
        "predicted": complex(check.predicted),
        "measured": complex(check.measured),
        "residual": check.residual,
    });
    let diagnostics = json!({ "measured_error": check.measured_error });
    Ok((outputs, into_map(diagnostics)))
}

fn taylor(ctx: &mut Ctx, f: Option<String>, tau: Option<String>, k: Option<usize>) -> Outcome {
    let g = ctx.generator(f, "f")?;
    let tau = ctx.complex(tau, "tau")?;
    let k = ctx.count(k, "k", None)?;
    if (tau.norm() - 1.0).abs() > 1e-12 {
        return Err(CliError::usage(format!("tau = {tau} must be unimodular")));
    }
    let bt = boundary_taylor(&g.f, tau, k)?;
    let coeffs: Vec<Value> = bt.coeffs.iter().map(|&c| complex(c)).collect();
    let decay: Vec<Value> = bt
        .remainder_decay
        .iter()
        .map(|&(r, ratio)| json!({ "r": r, "ratio": ratio }))
        .collect();
    let outputs = json!({ "coeffs": coeffs, "remainder_decays": bt.decays() });
    let diagnostics = json!({ "coeff_errors": bt.coeff_errors, "remainder_decay": decay });
    Ok((outputs, into_map(diagnostics)))
}

fn build_model(
    g: &GeneratorSpec,
    dw: &DwClassification,
    kind: KindArg,
    iterations: Option<usize>,
    cfg: &IntegratorConfig,
) -> Result<KoenigsModel, KoenigsError> {
    let with_stopping = |mut opts: KoenigsOptions| {
        if let Some(n) = iterations {
            opts.stopping = Stopping::Fixed(n);
        }
        opts
    };
    let abel = kind == KindArg::Abel || (kind == KindArg::Auto && dw.kind.is_parabolic());
    if abel {
        koenigs::abel_parabolic_with(g, dw, cfg, &with_stopping(KoenigsOptions::abel()))
    } else if dw.kind.is_interior() {
        koenigs::schroeder_interior_with(g, dw, cfg, &with_stopping(KoenigsOptions::schroeder()))
    } else {
        koenigs::schroeder_hyperbolic_with(g, dw, cfg, &with_stopping(KoenigsOptions::schroeder()))
    }
}

fn koenigs_cmd(
    ctx: &mut Ctx,
    f: Option<String>,
    kind: Option<KindArg>,
    iterations: Option<usize>,
    grid: Option<String>,
    csv: Option<&Path>,
) -> Outcome {
    let g = ctx.generator(f, "f")?;
    let kind = match kind {
        Some(k) => k,
        None => match ctx.param("kind") {
            Some(Value::String(s)) => KindArg::from_str(s, true)
                .map_err(|_| CliError::usage(format!("unknown koenigs kind '{s}'")))?,
            Some(_) => return Err(CliError::usage("config param 'kind' must be a string")),
            None => KindArg::Auto,
        },
    };
    ctx.inputs.insert("kind".into(), json!(format!("{kind:?}").to_lowercase()));
    let iterations = match iterations {
        Some(n) => Some(ctx.count(Some(n), "iterations", None)?),
        None if ctx.param("iterations").is_some() => Some(ctx.count(None, "iterations", None)?),
        None => None,
    };
    let points = ctx.grid(grid, "koenigs")?;
    let dw = dw_point(&g, &ctx.cfg)?;
    let model = build_model(&g, &dw, kind, iterations, &ctx.cfg)?;
    let evaluated = par_map(&points, |&z| {
        Ok::<_, KoenigsError>((model.eval(z)?, model.functional_residual(z, 1.0)?))
    })?;
    let max_residual = evaluated.iter().map(|e| e.1).fold(0.0, f64::max);
    if let Some(path) = csv {
        write_csv(
            path,
            &["re", "im", "value_re", "value_im"],
            points.iter().zip(&evaluated).map(|(z, (h, _))| {
                vec![fmt_float(z.re), fmt_float(z.im), fmt_float(h.re), fmt_float(h.im)]
            }),
        )?;
    }
    let values: Vec<Value> = points
        .iter()
        .zip(&evaluated)
        .map(|(&z, &(h, _))| json!({ "z": complex(z), "value": complex(h) }))
        .collect();
    let outputs = json!({
        "model": format!("{:?}", model.kind),
        "dw_kind": dw.kind.name(),
        "tau": complex(model.tau),
        "beta": complex(model.beta),
        "multiplier": opt_complex(model.multiplier),
        "values": values,
        "max_functional_residual": max_residual,
    });
    let diagnostics = json!({
        "n_used": model.n_used,
        "richardson": model.richardson,
        "convergence_estimate": model.convergence_estimate,
    });
    Ok((outputs, into_map(diagnostics)))
}

fn commute_cmd(
    ctx: &mut Ctx,
    f: Option<String>,
    g: Option<String>,
    grid: Option<String>,
    csv: Option<&Path>,
) -> Outcome {
    let gf = ctx.generator(f, "f")?;
    let gg = ctx.generator(g, "g")?;
    let points = ctx.grid(grid, "default")?;
    let ts = commute::DEFAULT_TIMES;
    ctx.inputs.insert("times".into(), json!(ts.iter().map(|&(t, s)| [t, s]).collect::<Vec<_>>()));
    let report = commute_residual(&gf, &gg, &ts, &points, &ctx.cfg)?;
    let pair_json = |p: &commute::PairResidual| {
        json!({ "t": p.t, "s": p.s, "z": complex(p.z), "residual": p.residual })
    };
    let prop = match proportionality(&gf, &gg, &points) {
        Ok(p) => json!({ "a": complex(p.a), "residual": p.residual, "sample_size": p.sample_size }),
        Err(e @ (CommuteError::DegenerateSample { .. } | CommuteError::InvalidSample(_))) => {
            ctx.warnings.push(format!("proportionality not computed: {e}"));
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = csv {
        write_csv(
            path,
            &["t", "s", "re", "im", "residual"],
            report.residuals.iter().map(|p| {
                vec![fmt_float(p.t), fmt_float(p.s), fmt_float(p.z.re), fmt_float(p.z.im), fmt_float(p.residual)]
            }),
        )?;
    }
    let outputs = json!({
        "max_residual": report.max_residual,
        "argmax": pair_json(&report.argmax),
        "residuals": report.residuals.iter().map(pair_json).collect::<Vec<_>>(),
        "proportionality": prop,
    });
    let diagnostics = json!({ "grid_spec": report.grid_spec });
    Ok((outputs, into_map(diagnostics)))
}

fn equivariance(ctx: &mut Ctx, g: Option<String>, phi: Option<f64>, t: Option<f64>, grid: Option<String>) -> Outcome {
    let gg = ctx.generator(g, "g")?;
    let phi = ctx.number(phi, "phi", None)?;
    let t = ctx.number(t, "t", None)?;
    let points = ctx.grid(grid, "default")?;
    let residual = rotation_equivariance(&gg, phi, t, &points, &ctx.cfg)?;
    Ok((json!({ "residual": residual }), Map::new()))
}

fn examples() -> (Value, Map<String, Value>) {
    let families: Vec<Value> = FAMILIES
        .iter()
        .map(|f| {
            json!({
                "name": f.name,
                "description": f.description,
                "generator": f.generator,
                "map": f.map,
                "dw": complex(f.dw),
                "automorphic": f.automorphic,
            })
        })
        .collect();
    (json!({ "families": families }), Map::new())
}
