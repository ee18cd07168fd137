//! Command-line front end for the `ho` binary.
//!
//! Exit codes: 0 success, 2 domain error (JSON on stderr), 64 usage error.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::cfunc::{c_norm, c_pi, c_tilde, c_tilde_rho, e_exponent};
use crate::dunkl::pairing_gram;
use crate::error::Error;
use crate::hyperfun::{casimir_residual, cosh_factor, HypergeometricEvaluator, SphericalData, UpsilonEvaluator, PERTURB_EPS};
use crate::ktypes::{catalog, parse_orbit_values, solve_matching, verify_assignment, CatalogFilter, MatchedPair, Surd};
use crate::rootsys::{fmt_vec, parse_q, Multiplicity, RootSystem, RootSystemSpec, DEFAULT_WEYL_CAP, Q};
use crate::series::{eigen_residual, hc_coefficients_cached, phi_eval_full, TruncationPolicy};
use crate::transform::{gaussian_bump, hft_forward, hft_forward_adaptive, roundtrip, spectrum_grid, TransformOptions};
use crate::{fmt_complex, parse_complex};

pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "ho", version, about = "Heckman-Opdam hypergeometric functions, c-functions, small K-type matching and transforms")]
pub struct Cli {
    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root system data
    Roots {
        #[command(subcommand)]
        cmd: RootsCmd,
    },
    /// Small K-type catalog
    Ktypes {
        #[command(subcommand)]
        cmd: KtypesCmd,
    },
    /// Matching-condition solver
    Match {
        #[command(subcommand)]
        cmd: MatchCmd,
    },
    /// Hypergeometric function F, the series Φ and the radial Casimir check
    Hyper {
        #[command(subcommand)]
        cmd: HyperCmd,
    },
    /// c-functions
    Cfun {
        #[command(subcommand)]
        cmd: CfunCmd,
    },
    /// Dunkl operators
    Dunkl {
        #[command(subcommand)]
        cmd: DunklCmd,
    },
    /// Υ^π(φ^π_λ) = cosh-factor · F(Σ^π, k^π, λ)
    Spherical {
        #[command(subcommand)]
        cmd: SphericalCmd,
    },
    /// Hypergeometric Fourier transform
    Transform {
        #[command(subcommand)]
        cmd: TransformCmd,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum JsonOnly {
    Json,
}

#[derive(Args, Debug, Clone)]
struct RootsArg {
    /// Root system: a label (A2, BC1, G2, ...), inline JSON spec, or @file.json
    #[arg(long)]
    roots: String,
}

#[derive(Subcommand, Debug)]
enum RootsCmd {
    /// Print roots, orbits, Gram matrix and Weyl group order as JSON
    Show(RootsArg),
}

#[derive(Subcommand, Debug)]
enum KtypesCmd {
    /// List catalog records (JSON)
    List {
        /// sp(p,1), so(2r,1), so(p,q), hermitian (su, sp(n,R), so*, so(p,2), e6, e7), f4-family, split, g2, complex, trivial-only
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        q: Option<i64>,
        #[arg(long)]
        r: Option<i64>,
        #[arg(long)]
        s: Option<i64>,
        #[arg(long)]
        n: Option<i64>,
        /// Hermitian character parameter ν (rational)
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<String>,
        /// Also list the trivial K-type of each group (always shown for trivial-only and complex)
        #[arg(long)]
        with_trivial: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    #[command(flatten)]
    roots: RootsArg,
    /// m per orbit of Σ: positional ("4,3") or labelled ("short=4,double=3")
    #[arg(long, allow_hyphen_values = true)]
    m: String,
    /// κ per orbit of Σ, same syntax as --m
    #[arg(long, allow_hyphen_values = true)]
    kappa: String,
}

#[derive(Subcommand, Debug)]
enum MatchCmd {
    /// All (Σ^π, k^π) inside Σ ∪ 2Σ solving the matching condition
    Solve {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
    },
    /// Check an explicit assignment "v=k;v=k" (vectors in ambient coordinates; negatives added)
    Verify {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, allow_hyphen_values = true)]
        assign: String,
    },
}

#[derive(Args, Debug, Clone)]
struct SeriesArgs {
    #[arg(long, default_value_t = 60)]
    max_height: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1e-2)]
    wall_margin: f64,
    /// Shift λ by 1e-6·i along a fixed direction at resonances
    #[arg(long)]
    perturb: bool,
}

impl SeriesArgs {
    fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { max_height: self.max_height, tail_tol: self.tol, wall_margin: self.wall_margin, perturb: self.perturb }
    }
}

#[derive(Args, Debug, Clone)]
struct PointsArgs {
    /// Ray t·dir for t in linspace(a, b, n): "a:b:n"
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Direction of the ray as simple-root values α_i(dir) (default all 1)
    #[arg(long, allow_hyphen_values = true)]
    dir: Option<String>,
    /// Explicit points as simple-root values, separated by ';' ("-1,-2;-0.5,-3")
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
}

#[derive(Subcommand, Debug)]
enum HyperCmd {
    /// Evaluate F(Σ′,k,λ;H). CSV columns: index,t,s_1..s_r,re,im (s_i = α_i(H), t empty for --point)
    Eval {
        #[command(flatten)]
        roots: RootsArg,
        /// k per orbit: "1", "2,0.5" or "short=2,double=0.5"
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        /// λ(α_i^∨) for the simple roots, comma separated, each "a+bi"
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        points: PointsArgs,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum, default_value = "csv")]
        out: OutFormat,
    },
    /// Evaluate the series Φ(λ;H) at a point of 𝔞₋ (JSON with tail and recurrence residual)
    Phi {
        #[command(flatten)]
        roots: RootsArg,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Point as simple-root values
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        series: SeriesArgs,
        /// Include the coefficient table (μ over simple roots, a_μ)
        #[arg(long)]
        coeffs: bool,
    },
    /// Residual of the radial Casimir equation for Υ at a point
    Casimir {
        #[command(flatten)]
        group: GroupArgs,
        /// Index among the valid matched pairs
        #[arg(long, default_value_t = 0)]
        pair: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        series: SeriesArgs,
    },
}

#[derive(Subcommand, Debug)]
enum CfunCmd {
    /// c̃(λ) with pole bookkeeping, and c(λ) = c̃(λ)/c̃(ρ(k)) when k is regular
    Eval {
        #[command(flatten)]
        roots: RootsArg,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Whether c̃(ρ(k)) ≠ 0
    Regular {
        #[command(flatten)]
        roots: RootsArg,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
    },
}

#[derive(Subcommand, Debug)]
enum DunklCmd {
    /// Exact Gram matrices of the Dunkl pairing per degree
    Gram {
        #[command(flatten)]
        roots: RootsArg,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long)]
        degree: u32,
    },
}

#[derive(Subcommand, Debug)]
enum SphericalCmd {
    /// Evaluate Υ^π(φ^π_λ). CSV columns as for `hyper eval`
    Eval {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 0)]
        pair: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        points: PointsArgs,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
    },
}

#[derive(Args, Debug, Clone)]
struct TransformArgs {
    #[command(flatten)]
    roots: RootsArg,
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    /// Test function: "width=W" (Gaussian of width W, cut off smoothly at 10W)
    #[arg(long, default_value = "width=1.0")]
    bump: String,
    /// Intervals per axis of the space grid
    #[arg(long, default_value_t = 400)]
    grid: usize,
    #[arg(long, default_value_t = 0.05)]
    wall_margin: f64,
    #[arg(long, default_value_t = 16)]
    panel_nodes: usize,
    /// Fixed spectral cutoff (default: adaptive)
    #[arg(long)]
    cutoff: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum TransformCmd {
    /// ℱf on the spectrum. CSV columns: xi_1..xi_r,re,im
    Forward {
        #[command(flatten)]
        args: TransformArgs,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
    },
    /// Forward then inverse, with Plancherel comparison (JSON)
    Roundtrip {
        #[command(flatten)]
        args: TransformArgs,
        #[arg(long, value_enum, default_value = "json")]
        out: JsonOnly,
    },
}

type CliResult<T> = std::result::Result<T, Failure>;

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn error_kind(e: &Error) -> String {
    let d = format!("{:?}", e);
    d.split(|c: char| c == '(' || c == ' ' || c == '{').next().unwrap_or("Error").to_string()
}

/// Run the CLI on `args` (including the program name), writing to `out`/`err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e);
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        0
                    }
                }
                _ => {
                    let _ = write!(err, "{}", e);
                    EXIT_USAGE
                }
            };
        }
    };
    if let Some(n) = cli.threads {
        // fails harmlessly if the pool already exists (repeated in-process runs)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let mut notes = Vec::new();
    let result = dispatch(&cli.command, &mut notes);
    for n in &notes {
        let _ = writeln!(err, "note: {}", n);
    }
    match result {
        Ok(text) => {
            let res = match &cli.output {
                Some(p) => std::fs::write(p, text.as_bytes()).map_err(|e| e.to_string()),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match res {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "{}", json!({"error": {"kind": "Io", "message": e}}));
                    EXIT_DOMAIN
                }
            }
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "{}", json!({"error": {"kind": "Usage", "message": m}}));
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "{}", json!({"error": {"kind": error_kind(&e), "message": e.to_string()}}));
            EXIT_DOMAIN
        }
    }
}

fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load_roots(a: &RootsArg) -> CliResult<RootSystem> {
    let s = a.roots.trim();
    let spec_text = if let Some(path) = s.strip_prefix('@') {
        match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => return usage(format!("cannot read {}: {}", path, e)),
        }
    } else if s.starts_with('{') {
        Some(s.to_string())
    } else {
        None
    };
    match spec_text {
        Some(t) => {
            let spec: RootSystemSpec = match serde_json::from_str(&t) {
                Ok(x) => x,
                Err(e) => return usage(format!("bad root system spec: {}", e)),
            };
            Ok(RootSystem::from_spec(&spec)?)
        }
        None => Ok(RootSystem::from_label(s)?),
    }
}

fn parse_lambda(rs: &RootSystem, s: &str) -> CliResult<Vec<Complex64>> {
    let vals: Option<Vec<Complex64>> = s.split(',').map(|t| parse_complex(t.trim())).collect();
    let Some(vals) = vals else {
        return usage(format!("bad --lambda `{}` (expected comma separated a+bi)", s));
    };
    if vals.len() != rs.rank() {
        return usage(format!("--lambda needs {} values (one per simple coroot), got {}", rs.rank(), vals.len()));
    }
    Ok(rs.lambda_from_coroot_values(&vals))
}

fn parse_reals(s: &str, what: &str) -> CliResult<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) => Ok(v),
        Err(_) => usage(format!("bad {} `{}`", what, s)),
    }
}

/// (t, point as simple-root values)
fn parse_points(rs: &RootSystem, p: &PointsArgs) -> CliResult<Vec<(Option<f64>, Vec<f64>)>> {
    let r = rs.rank();
    match (&p.grid, &p.point) {
        (Some(g), None) => {
            let parts: Vec<&str> = g.split(':').collect();
            if parts.len() != 3 {
                return usage(format!("bad --grid `{}` (expected a:b:n)", g));
            }
            let (a, b, n) = match (parts[0].parse::<f64>(), parts[1].parse::<f64>(), parts[2].parse::<usize>()) {
                (Ok(a), Ok(b), Ok(n)) if n >= 1 => (a, b, n),
                _ => return usage(format!("bad --grid `{}` (expected a:b:n)", g)),
            };
            let dir = match &p.dir {
                Some(d) => parse_reals(d, "--dir")?,
                None => vec![1.0; r],
            };
            if dir.len() != r {
                return usage(format!("--dir needs {} values", r));
            }
            Ok((0..n)
                .map(|i| {
                    let t = if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
                    (Some(t), dir.iter().map(|x| t * x).collect())
                })
                .collect())
        }
        (None, Some(pt)) => {
            let mut out = Vec::new();
            for chunk in pt.split(';').filter(|c| !c.trim().is_empty()) {
                let v = parse_reals(chunk, "--point")?;
                if v.len() != r {
                    return usage(format!("--point needs {} values per point", r));
                }
                out.push((None, v));
            }
            Ok(out)
        }
        (Some(_), Some(_)) => usage("give either --grid or --point, not both"),
        (None, None) => usage("one of --grid or --point is required"),
    }
}

fn parse_k(rs: &RootSystem, s: &str) -> CliResult<Multiplicity> {
    Ok(Multiplicity::parse(rs, s)?)
}

fn values_output(rs: &RootSystem, pts: &[(Option<f64>, Vec<f64>)], vals: &[Complex64], fmt: OutFormat, header: Value) -> String {
    match fmt {
        OutFormat::Csv => {
            let mut s = String::from("index,t");
            for i in 1..=rs.rank() {
                s.push_str(&format!(",s_{}", i));
            }
            s.push_str(",re,im\n");
            for (i, ((t, sv), v)) in pts.iter().zip(vals).enumerate() {
                s.push_str(&format!("{},{}", i, t.map(|x| x.to_string()).unwrap_or_default()));
                for x in sv {
                    s.push_str(&format!(",{}", x));
                }
                s.push_str(&format!(",{},{}\n", v.re, v.im));
            }
            s
        }
        OutFormat::Json => {
            let rows: Vec<Value> = pts
                .iter()
                .zip(vals)
                .map(|((t, sv), v)| json!({"t": t, "simple_values": sv, "value": fmt_complex(v)}))
                .collect();
            let mut h = header;
            h["values"] = Value::Array(rows);
            to_json_text(&h)
        }
    }
}

fn dispatch(cmd: &Command, notes: &mut Vec<String>) -> CliResult<String> {
    match cmd {
        Command::Roots { cmd: RootsCmd::Show(a) } => roots_show(a),
        Command::Ktypes { cmd: KtypesCmd::List { family, p, q, r, s, n, nu, with_trivial } } => {
            let nu = match nu {
                Some(t) => match parse_q(t) {
                    Some(x) => Some(x),
                    None => return usage(format!("bad --nu `{}`", t)),
                },
                None => None,
            };
            let filter = CatalogFilter { family: family.clone(), p: *p, q: *q, r: *r, s: *s, n: *n, nu };
            let only_trivial = matches!(family.as_deref().map(str::to_ascii_lowercase).as_deref(), Some("trivial-only") | Some("complex"));
            let recs: Vec<Value> = catalog(&filter)?
                .iter()
                .filter(|r| *with_trivial || only_trivial || r.ktype_name != "trivial")
                .map(|r| r.to_json())
                .collect();
            Ok(to_json_text(&Value::Array(recs)))
        }
        Command::Match { cmd } => match cmd {
            MatchCmd::Solve { group, out } => match_solve(group, *out),
            MatchCmd::Verify { group, assign } => match_verify(group, assign),
        },
        Command::Hyper { cmd } => match cmd {
            HyperCmd::Eval { roots, k, lambda, points, series, out } => hyper_eval(roots, k, lambda, points, series, *out, notes),
            HyperCmd::Phi { roots, k, lambda, point, series, coeffs } => hyper_phi(roots, k, lambda, point, series, *coeffs),
            HyperCmd::Casimir { group, pair, lambda, point, step, series } => hyper_casimir(group, *pair, lambda, point, *step, series),
        },
        Command::Cfun { cmd } => match cmd {
            CfunCmd::Eval { roots, k, lambda } => {
                let rs = load_roots(roots)?;
                let k = parse_k(&rs, k)?;
                let lam = parse_lambda(&rs, lambda)?;
                let v = c_tilde(&rs, &k, &lam)?;
                let mut j = serde_json::to_value(&v).expect("serializable");
                j["c_norm"] = match c_norm(&rs, &k, &lam) {
                    Ok(c) => Value::String(fmt_complex(&c)),
                    Err(Error::NotRegular) => Value::Null,
                    Err(e) => return Err(e.into()),
                };
                Ok(to_json_text(&j))
            }
            CfunCmd::Regular { roots, k } => {
                let rs = load_roots(roots)?;
                let k = parse_k(&rs, k)?;
                let v = c_tilde_rho(&rs, &k)?;
                Ok(to_json_text(&json!({"regular": !v.is_zero(), "c_tilde_rho": v})))
            }
        },
        Command::Dunkl { cmd: DunklCmd::Gram { roots, k, degree } } => {
            let rs = load_roots(roots)?;
            let k = parse_k(&rs, k)?;
            if k.exact.is_none() {
                return usage("--k must be rational for the exact Gram matrices");
            }
            let g = pairing_gram(&rs, &k, *degree);
            Ok(to_json_text(&serde_json::to_value(g.summary()).expect("serializable")))
        }
        Command::Spherical { cmd: SphericalCmd::Eval { group, pair, lambda, points, series, out } } => spherical_eval(group, *pair, lambda, points, series, *out, notes),
        Command::Transform { cmd } => match cmd {
            TransformCmd::Forward { args, out } => transform_forward(args, *out),
            TransformCmd::Roundtrip { args, .. } => {
                let (rs, k, f, opts) = transform_setup(args)?;
                let rep = roundtrip(&rs, &k, &f, &opts)?;
                Ok(to_json_text(&serde_json::to_value(&rep).expect("serializable")))
            }
        },
    }
}

fn roots_show(a: &RootsArg) -> CliResult<String> {
    let rs = load_roots(a)?;
    let weyl = rs.weyl_elements(DEFAULT_WEYL_CAP).map(|w| w.len()).ok();
    let roots: Vec<Value> = rs
        .positive()
        .iter()
        .map(|&i| json!({"root": fmt_vec(rs.root(i)), "orbit": rs.orbits()[rs.orbit_of(i)].label, "norm2": rs.norm2(i).to_string(), "simple_coeffs": rs.coeffs(i)}))
        .collect();
    let orbits: Vec<Value> = rs
        .orbits()
        .iter()
        .map(|o| json!({"label": o.label, "size": o.members.len(), "norm2": o.norm2.to_string(), "is_double": o.is_double}))
        .collect();
    let v = json!({
        "label": rs.label(),
        "family": format!("{:?}", rs.family()),
        "rank": rs.rank(),
        "ambient_dim": rs.ambient_dim(),
        "gram": rs.gram().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "simple": rs.simple().iter().map(|&i| fmt_vec(rs.root(i))).collect::<Vec<_>>(),
        "cartan": rs.cartan(),
        "positive_roots": roots,
        "num_roots": rs.roots().len(),
        "orbits": orbits,
        "weyl_order": weyl,
        "reduced": rs.is_reduced(),
        "fingerprint": rs.fingerprint(),
    });
    Ok(to_json_text(&v))
}

fn group_data(g: &GroupArgs) -> CliResult<(RootSystem, Vec<Q>, Vec<Q>)> {
    let rs = load_roots(&g.roots)?;
    let m = parse_orbit_values(&rs, &g.m)?;
    let kappa = parse_orbit_values(&rs, &g.kappa)?;
    Ok((rs, m, kappa))
}

fn group_header(rs: &RootSystem, m: &[Q], kappa: &[Q]) -> Value {
    let orbits: Vec<Value> = rs
        .orbits()
        .iter()
        .enumerate()
        .map(|(i, o)| json!({"label": o.label, "m": m[i].to_string(), "kappa": kappa[i].to_string()}))
        .collect();
    json!({"sigma": rs.label(), "orbits": orbits})
}

fn match_solve(g: &GroupArgs, out: OutFormat) -> CliResult<String> {
    let (rs, m, kappa) = group_data(g)?;
    let pairs = solve_matching(&rs, &m, &kappa);
    match out {
        OutFormat::Json => {
            let mut h = group_header(&rs, &m, &kappa);
            h["valid_count"] = json!(pairs.iter().filter(|p| p.valid).count());
            h["pairs"] = Value::Array(pairs.iter().map(|p| p.to_json()).collect());
            Ok(to_json_text(&h))
        }
        OutFormat::Csv => {
            let mut s = String::from("index,valid,branch_tags,assignment,failure_reason\n");
            for (i, p) in pairs.iter().enumerate() {
                let asg: Vec<String> = p
                    .assignment
                    .iter()
                    .filter(|(v, _)| v.iter().find(|x| **x != Q::from_integer(0)).map(|x| *x > Q::from_integer(0)).unwrap_or(false))
                    .map(|(v, k)| format!("{}={}", fmt_vec(v), k))
                    .collect();
                s.push_str(&format!(
                    "{},{},\"{}\",\"{}\",\"{}\"\n",
                    i,
                    p.valid,
                    p.branch_tags.join(" "),
                    asg.join(" "),
                    p.failure_reason.clone().unwrap_or_default()
                ));
            }
            Ok(s)
        }
    }
}

fn parse_vector(s: &str) -> Option<Vec<Q>> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    t.split(',').map(|x| parse_q(x.trim())).collect()
}

fn match_verify(g: &GroupArgs, assign: &str) -> CliResult<String> {
    let (rs, m, kappa) = group_data(g)?;
    let mut asg: Vec<(Vec<Q>, Surd)> = Vec::new();
    for item in assign.split(';').filter(|x| !x.trim().is_empty()) {
        let Some((v, k)) = item.split_once('=') else {
            return usage(format!("bad assignment `{}` (expected vector=k)", item));
        };
        let (Some(v), Some(k)) = (parse_vector(v), parse_q(k.trim())) else {
            return usage(format!("bad assignment `{}`", item));
        };
        if v.len() != rs.ambient_dim() {
            return usage(format!("vector {} has wrong length (ambient dimension {})", fmt_vec(&v), rs.ambient_dim()));
        }
        asg.push((v, Surd::rational(k)));
    }
    let mut full = asg.clone();
    for (v, k) in &asg {
        let neg: Vec<Q> = v.iter().map(|x| -x).collect();
        if !full.iter().any(|(w, _)| *w == neg) {
            full.push((neg, k.clone()));
        }
    }
    full.sort();
    let rep = verify_assignment(&rs, &m, &kappa, &full);
    let mut h = group_header(&rs, &m, &kappa);
    h["valid"] = json!(rep.valid());
    h["failure_reason"] = json!(rep.failure_reason());
    h["report"] = serde_json::to_value(&rep).expect("serializable");
    Ok(to_json_text(&h))
}

fn pick_pair(rs: &RootSystem, m: &[Q], kappa: &[Q], idx: usize) -> CliResult<MatchedPair> {
    let pairs: Vec<MatchedPair> = solve_matching(rs, m, kappa).into_iter().filter(|p| p.valid).collect();
    if pairs.is_empty() {
        return Err(Error::NoMatchedPair.into());
    }
    match pairs.into_iter().nth(idx) {
        Some(p) => Ok(p),
        None => usage(format!("--pair {} out of range", idx)),
    }
}

/// Run `f` with the given policy; on a resonance without --perturb, retry in perturb mode.
fn with_resonance_retry<T>(policy: TruncationPolicy, notes: &mut Vec<String>, f: impl Fn(&TruncationPolicy) -> crate::Result<T>) -> CliResult<T> {
    match f(&policy) {
        Err(e @ Error::ResonantParameter { .. }) if !policy.perturb => {
            notes.push(format!("{}; retrying with --perturb (symmetric shift of size {:e})", e, PERTURB_EPS));
            Ok(f(&TruncationPolicy { perturb: true, ..policy })?)
        }
        r => Ok(r?),
    }
}

#[allow(clippy::too_many_arguments)]
fn hyper_eval(roots: &RootsArg, k: &str, lambda: &str, points: &PointsArgs, series: &SeriesArgs, out: OutFormat, notes: &mut Vec<String>) -> CliResult<String> {
    let rs = load_roots(roots)?;
    let k = parse_k(&rs, k)?;
    let lam = parse_lambda(&rs, lambda)?;
    let pts = parse_points(&rs, points)?;
    let hs: Vec<Vec<f64>> = pts.iter().map(|(_, sv)| rs.h_from_simple_values(sv)).collect();
    let vals: Vec<Complex64> = with_resonance_retry(series.policy(), notes, |p| {
        let ev = HypergeometricEvaluator::new(&rs, &k, &lam, *p)?;
        ev.eval_many(&hs).into_iter().collect::<crate::Result<Vec<_>>>()
    })?;
    let header = json!({"system": rs.label(), "k": k.labelled(&rs), "lambda": lam.iter().map(fmt_complex).collect::<Vec<_>>()});
    Ok(values_output(&rs, &pts, &vals, out, header))
}

fn hyper_phi(roots: &RootsArg, k: &str, lambda: &str, point: &str, series: &SeriesArgs, with_coeffs: bool) -> CliResult<String> {
    let rs = load_roots(roots)?;
    let k = parse_k(&rs, k)?;
    let lam = parse_lambda(&rs, lambda)?;
    let sv = parse_reals(point, "--point")?;
    if sv.len() != rs.rank() {
        return usage(format!("--point needs {} values", rs.rank()));
    }
    let h = rs.h_from_simple_values(&sv);
    let policy = series.policy();
    let sc = hc_coefficients_cached(&rs, &k, &lam, policy.max_height, policy.perturb)?;
    let v = phi_eval_full(&sc, &h, &policy)?;
    let mut j = json!({
        "system": rs.label(),
        "k": k.labelled(&rs),
        "lambda": lam.iter().map(fmt_complex).collect::<Vec<_>>(),
        "simple_values": sv,
        "value": fmt_complex(&v.value),
        "tail": v.tail,
        "height_used": v.height_used,
        "eigen_residual": eigen_residual(&sc),
    });
    if with_coeffs {
        j["coefficients"] = Value::Array(sc.iter().map(|(p, a)| json!({"mu": p.coords, "height": p.height, "a": fmt_complex(&a)})).collect());
    }
    Ok(to_json_text(&j))
}

fn hyper_casimir(g: &GroupArgs, idx: usize, lambda: &str, point: &str, step: f64, series: &SeriesArgs) -> CliResult<String> {
    let (rs, m, kappa) = group_data(g)?;
    let pair = pick_pair(&rs, &m, &kappa, idx)?;
    let lam = parse_lambda(&rs, lambda)?;
    let sv = parse_reals(point, "--point")?;
    if sv.len() != rs.rank() {
        return usage(format!("--point needs {} values", rs.rank()));
    }
    let h = rs.h_from_simple_values(&sv);
    let k = pair.k_exact().ok_or(Error::NoMatchedPair)?;
    let sp = pair.sigma_pi.as_ref().ok_or(Error::NoMatchedPair)?;
    let d = SphericalData { sigma: &rs, m: &m, kappa: &kappa, sigma_pi: sp, k_pi: &k };
    let res = casimir_residual(&d, &lam, &h, step, &series.policy())?;
    let mut j = group_header(&rs, &m, &kappa);
    j["pair"] = pair.to_json();
    j["lambda"] = json!(lam.iter().map(fmt_complex).collect::<Vec<_>>());
    j["simple_values"] = json!(sv);
    j["step"] = json!(step);
    j["residual"] = json!(res);
    Ok(to_json_text(&j))
}

#[allow(clippy::too_many_arguments)]
fn spherical_eval(g: &GroupArgs, idx: usize, lambda: &str, points: &PointsArgs, series: &SeriesArgs, out: OutFormat, notes: &mut Vec<String>) -> CliResult<String> {
    let (rs, m, kappa) = group_data(g)?;
    let pair = pick_pair(&rs, &m, &kappa, idx)?;
    let lam = parse_lambda(&rs, lambda)?;
    let pts = parse_points(&rs, points)?;
    let k = pair.k_exact().ok_or(Error::NoMatchedPair)?;
    let sp = pair.sigma_pi.as_ref().ok_or(Error::NoMatchedPair)?;
    let d = SphericalData { sigma: &rs, m: &m, kappa: &kappa, sigma_pi: sp, k_pi: &k };
    let vals: Vec<Complex64> = with_resonance_retry(series.policy(), notes, |p| {
        let ev = UpsilonEvaluator::new(&d, &lam, p)?;
        pts.iter().map(|(_, sv)| ev.eval(&rs.h_from_simple_values(sv))).collect::<crate::Result<Vec<_>>>()
    })?;
    let cf = cosh_factor(&rs, &m, sp, &k)?;
    let e = e_exponent(&rs, &m, sp, &k)?;
    let cpi = c_pi(&rs, &m, sp, &k, &lam).ok();
    let mut h = group_header(&rs, &m, &kappa);
    h["pair"] = pair.to_json();
    h["cosh_factor"] = json!(cf.to_string());
    h["e"] = json!(e.to_string());
    h["c_pi"] = json!(cpi.map(|z| fmt_complex(&z)));
    h["lambda"] = json!(lam.iter().map(fmt_complex).collect::<Vec<_>>());
    Ok(values_output(&rs, &pts, &vals, out, h))
}

fn transform_setup(a: &TransformArgs) -> CliResult<(RootSystem, Multiplicity, crate::transform::SampledFunction, TransformOptions)> {
    let rs = load_roots(&a.roots)?;
    let k = parse_k(&rs, &a.k)?;
    let width = match a.bump.trim().strip_prefix("width=").map(|w| w.parse::<f64>()) {
        Some(Ok(w)) if w > 0.0 => w,
        _ => return usage(format!("bad --bump `{}` (expected width=W)", a.bump)),
    };
    if a.grid < 2 {
        return usage("--grid must be at least 2");
    }
    let f = gaussian_bump(&rs, width, a.grid)?;
    let opts = TransformOptions { wall_margin: a.wall_margin, panel_nodes: a.panel_nodes.max(1), max_cutoff: a.cutoff, ..TransformOptions::default() };
    Ok((rs, k, f, opts))
}

fn transform_forward(a: &TransformArgs, out: OutFormat) -> CliResult<String> {
    let (rs, k, f, opts) = transform_setup(a)?;
    let spec = match a.cutoff {
        Some(c) => {
            let g = spectrum_grid(&f.grid.basis, c, opts.panel_width, opts.panel_nodes);
            hft_forward(&rs, &k, &f, &g, &opts)?
        }
        None => hft_forward_adaptive(&rs, &k, &f, &opts)?,
    };
    match out {
        OutFormat::Csv => {
            let r = spec.grid.rank();
            let mut s = String::new();
            for i in 1..=r {
                s.push_str(&format!("xi_{},", i));
            }
            s.push_str("re,im\n");
            for (p, v) in spec.grid.points.iter().zip(&spec.values) {
                for x in p {
                    s.push_str(&format!("{},", x));
                }
                s.push_str(&format!("{},{}\n", v.re, v.im));
            }
            Ok(s)
        }
        OutFormat::Json => {
            let rows: Vec<Value> = spec
                .grid
                .points
                .iter()
                .zip(&spec.values)
                .zip(&spec.grid.weights)
                .map(|((p, v), w)| json!({"xi": p, "weight": w, "value": fmt_complex(v)}))
                .collect();
            let cutoff = spec.grid.points.iter().flat_map(|p| p.iter().map(|x| x.abs())).fold(0.0, f64::max);
            Ok(to_json_text(&json!({
                "system": rs.label(),
                "k": k.values,
                "folded": spec.grid.folded,
                "cutoff": cutoff,
                "support_radius": f.support_radius,
                "spectrum": rows,
            })))
        }
    }
}
