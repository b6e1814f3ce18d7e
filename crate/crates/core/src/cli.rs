//! Command-line front end: argument parsing, system files, reports and CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use thiserror::Error;

use crate::classify::{
    eisenstein, is_et, mixing_sweep, zero_entropy_report, ClassifyError, MixingConfig, MixingStatus,
    SystemPresentation,
};
use crate::entropy::{
    entropy_equivalent, generic_relation, mahler_1d_jensen, mahler_2d, sublattice_entropy, EntropyError,
    EntropyResult, MahlerValue, QuadratureConfig, RowVerdict, Verdict,
};
use crate::laurent::{parse_poly_named, LaurentError};
use crate::lattice::{classify_lattice, enumerate_sublattices, LatticeCase, SublatticeBasis};
use crate::shiftspace::{build_window, complete_window, verify_window, Coord, ShiftError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<LaurentError> for CliError {
    fn from(e: LaurentError) -> Self {
        match e {
            LaurentError::RootRadius { .. } | LaurentError::RootNoConvergence => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        match e {
            EntropyError::Config(_) | EntropyError::Arity { .. } | EntropyError::ZeroPolynomial => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Laurent(e) => e.into(),
            ClassifyError::Entropy(e) => e.into(),
            ClassifyError::Undecided { .. } => CliError::Numeric(e.to_string()),
            ClassifyError::Invalid(msg) => CliError::Input(msg),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ShiftError> for CliError {
    fn from(e: ShiftError) -> Self {
        match e {
            ShiftError::Inconsistent { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Outcome of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub exit_code: i32,
    pub report: String,
    pub csv: Option<String>,
    /// Where the CSV should be written; standard output when unset.
    pub csv_path: Option<PathBuf>,
}

impl RunResult {
    fn new(exit_code: i32, report: String) -> Self {
        RunResult { exit_code, report, csv: None, csv_path: None }
    }
}

#[derive(Parser, Debug)]
#[command(name = "algdyn", version, about = "Entropy invariants of algebraic Z^3-actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct QuadArgs {
    /// Comparison and quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Initial outer quadrature nodes.
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    /// Rounds of quadrature refinement.
    #[arg(long, default_value_t = 8)]
    depth: u32,
}

#[derive(Args, Debug, Clone, Copy)]
struct Units {
    /// Print logarithms to base 2.
    #[arg(long, conflicts_with = "log10")]
    log2: bool,
    /// Print logarithms to base 10.
    #[arg(long)]
    log10: bool,
}

impl Units {
    fn scale(self) -> f64 {
        if self.log2 {
            std::f64::consts::LOG2_E
        } else if self.log10 {
            std::f64::consts::LOG10_E
        } else {
            1.0
        }
    }

    fn name(self) -> &'static str {
        if self.log2 {
            "log2"
        } else if self.log10 {
            "log10"
        } else {
            "ln"
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a polynomial and print its canonical form.
    Parse {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Check membership in ET.
    Classify {
        #[arg(long)]
        system: PathBuf,
    },
    /// Certify mixing on the exponents of a box.
    Mixing {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: i64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Logarithmic Mahler measure of a polynomial in one or two variables.
    Mahler {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        units: Units,
    },
    /// Entropy of the sub-action of a rank-two subgroup.
    Entropy {
        #[arg(long)]
        system: PathBuf,
        /// Basis as "a,b,c;d,e,f".
        #[arg(long)]
        lattice: String,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        units: Units,
    },
    /// Compare sub-action entropies of two systems.
    Equiv {
        #[arg(long)]
        system1: PathBuf,
        #[arg(long)]
        system2: PathBuf,
        /// Entry bound of the enumerated sublattice family.
        #[arg(long, default_value_t = 2)]
        bound: i64,
        /// Compare on this single subgroup instead of the enumerated family.
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        units: Units,
    },
    /// Fill a finite window of a system with seeds and check the relations.
    Helmet {
        /// Window size "L1,L2,L3".
        #[arg(long)]
        dims: String,
        /// CSV rows n1,n2,n3,value for the free coordinates.
        #[arg(long)]
        seed_file: PathBuf,
        /// System file; the space helmet by default.
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// A parsed system file.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub system: SystemPresentation,
    pub tol: Option<f64>,
}

/// Parses `key = "value"` lines with keys `name`, `f`, `g` and `tol`. Blank
/// lines and lines starting with `#` are skipped.
pub fn parse_system_spec(text: &str, default_name: &str) -> Result<SystemSpec, CliError> {
    let mut keys: BTreeMap<&str, String> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || CliError::Input(format!("line {}: expected key = \"value\"", lineno + 1));
        let (key, value) = line.split_once('=').ok_or_else(bad)?;
        let key = key.trim();
        let value = value.trim();
        let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value);
        if !matches!(key, "name" | "f" | "g" | "tol") {
            return Err(CliError::Input(format!("line {}: unknown key {key}", lineno + 1)));
        }
        if keys.insert(key, value.to_string()).is_some() {
            return Err(CliError::Input(format!("duplicate key {key}")));
        }
    }
    let get = |k: &str| keys.get(k).ok_or_else(|| CliError::Input(format!("missing key {k}")));
    let f = get("f")?;
    let g = get("g")?;
    let name = keys.get("name").cloned().unwrap_or_else(|| default_name.to_string());
    let system = SystemPresentation::parse(name, f, g)?;
    let tol = match keys.get("tol") {
        None => None,
        Some(t) => Some(
            t.parse::<f64>()
                .ok()
                .filter(|t| *t > 0.0)
                .ok_or_else(|| CliError::Input(format!("tol must be a positive number, got {t}")))?,
        ),
    };
    Ok(SystemSpec { system, tol })
}

pub fn load_system_spec(path: &Path) -> Result<SystemSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("system");
    parse_system_spec(&text, stem)
}

pub fn load_system(path: &Path) -> Result<SystemPresentation, CliError> {
    Ok(load_system_spec(path)?.system)
}

/// At most 12 digits after the point, trailing zeros dropped.
pub fn format_value(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn format_error(x: f64) -> String {
    format!("{x:.3e}")
}

fn format_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", format_value(z.re), format_value(z.im.abs()))
}

fn quad_config(q: &QuadArgs, fallback_tol: Option<f64>) -> QuadratureConfig {
    let d = QuadratureConfig::default();
    QuadratureConfig { nodes: q.nodes, depth: q.depth, tolerance: q.tol.or(fallback_tol).unwrap_or(d.tolerance) }
}

fn parse_lattice(text: &str) -> Result<SublatticeBasis, CliError> {
    text.parse().map_err(|e: crate::lattice::LatticeError| CliError::Input(e.to_string()))
}

/// Runs the command line `argv` (program name first) without touching the
/// process: output and exit code are returned.
pub fn run<I, T>(argv: I) -> RunResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            return RunResult::new(code, e.render().to_string());
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => RunResult::new(e.exit_code(), format!("error: {e}\n")),
    }
}

fn dispatch(cmd: Command) -> Result<RunResult, CliError> {
    match cmd {
        Command::Parse { poly, arity } => cmd_parse(&poly, arity),
        Command::Classify { system } => cmd_classify(&system),
        Command::Mixing { system, bound, csv } => cmd_mixing(&system, bound, csv),
        Command::Mahler { poly, arity, quad, units } => cmd_mahler(&poly, arity, &quad, units),
        Command::Entropy { system, lattice, quad, units } => cmd_entropy(&system, &lattice, &quad, units),
        Command::Equiv { system1, system2, bound, lattice, csv, quad, units } => {
            cmd_equiv(&system1, &system2, bound, lattice.as_deref(), csv, &quad, units)
        }
        Command::Helmet { dims, seed_file, system, csv } => cmd_helmet(&dims, &seed_file, system.as_deref(), csv),
    }
}

fn cmd_parse(poly: &str, arity: usize) -> Result<RunResult, CliError> {
    let (p, names) = parse_poly_named(poly, arity)?;
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(RunResult::new(EXIT_OK, format!("{}\n", p.format_named(&names))))
}

fn cmd_classify(path: &Path) -> Result<RunResult, CliError> {
    let s = load_system(path)?;
    let r = is_et(&s)?;
    let mut out = String::new();
    writeln!(out, "system: {}", s.name).unwrap();
    writeln!(out, "f = {}", s.f).unwrap();
    writeln!(out, "g = {}", s.g.format_named(&["u3"])).unwrap();
    writeln!(out, "expanding: {} (margin={})", yes_no(r.is_expanding), format_value(r.margin)).unwrap();
    writeln!(out, "triangular: {}{}", yes_no(r.is_triangular), if r.is_triangular { format!(" (a={})", r.a) } else { String::new() })
        .unwrap();
    if r.is_et {
        writeln!(out, "ET: yes (a={}, margin={})", r.a, format_value(r.margin)).unwrap();
    } else {
        writeln!(out, "ET: no").unwrap();
        for d in &r.diagnostics {
            writeln!(out, "  - {d}").unwrap();
        }
    }
    if let Ok(true) = eisenstein(&s.g, 2) {
        writeln!(out, "g is irreducible (Eisenstein at 2)").unwrap();
    }
    if let Ok(z) = zero_entropy_report(&s) {
        writeln!(out, "full action: zero entropy ({})", z.reason).unwrap();
    }
    Ok(RunResult::new(if r.is_et { EXIT_OK } else { EXIT_NEGATIVE }, out))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_mixing(path: &Path, bound: i64, csv_path: Option<PathBuf>) -> Result<RunResult, CliError> {
    let s = load_system(path)?;
    let report = mixing_sweep(&s, bound, &MixingConfig::default())?;
    let mut out = String::new();
    writeln!(
        out,
        "mixing: certified {} of {} exponents with |n_i| <= {}",
        report.certified(),
        report.entries.len(),
        bound
    )
    .unwrap();
    for e in report.entries.iter().filter(|e| e.status != MixingStatus::Certified) {
        writeln!(out, "  inconclusive at n = ({}, {}, {})", e.n[0], e.n[1], e.n[2]).unwrap();
    }
    let mut csv = String::from("n1,n2,n3,status,witness,value,error\n");
    for e in &report.entries {
        let status = match e.status {
            MixingStatus::Certified => "certified",
            MixingStatus::Inconclusive => "inconclusive",
        };
        let (witness, value, error) = match &e.witness {
            Some(w) => (
                w.point.iter().map(|&z| format_complex(z)).collect::<Vec<_>>().join(";"),
                format_value(w.value),
                format_error(w.error),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        writeln!(csv, "{},{},{},{status},{witness},{value},{error}", e.n[0], e.n[1], e.n[2]).unwrap();
    }
    let code = if report.all_certified() { EXIT_OK } else { EXIT_INCONCLUSIVE };
    let mut r = RunResult::new(code, out);
    if csv_path.is_some() {
        r.csv = Some(csv);
        r.csv_path = csv_path;
    }
    Ok(r)
}

fn render_value(v: &MahlerValue, units: Units) -> String {
    let s = units.scale();
    let mut out = format!("{} (error {}", format_value(v.value * s), format_error(v.error * s));
    if v.heuristic {
        out.push_str(", estimated");
    }
    if !v.converged {
        out.push_str(", not converged");
    }
    out.push(')');
    out
}

fn cmd_mahler(poly: &str, arity: usize, quad: &QuadArgs, units: Units) -> Result<RunResult, CliError> {
    let (p, _) = parse_poly_named(poly, arity)?;
    let v = match arity {
        1 => mahler_1d_jensen(&p)?,
        2 => mahler_2d(&p, &quad_config(quad, None))?,
        _ => return Err(CliError::Input(format!("Mahler measures need one or two variables, got {arity}"))),
    };
    let code = if v.converged { EXIT_OK } else { EXIT_INCONCLUSIVE };
    Ok(RunResult::new(code, format!("{} M = {}\n", units.name(), render_value(&v, units))))
}

fn describe_case(case: &LatticeCase) -> String {
    match case {
        LatticeCase::Planar => "planar".into(),
        LatticeCase::AxisDegenerate { axis } => format!("axis-degenerate, axis ({}, {}, {})", axis[0], axis[1], axis[2]),
        LatticeCase::Generic { n, m } => {
            format!("generic, n = ({}, {}, {}), m = ({}, {}, {})", n[0], n[1], n[2], m[0], m[1], m[2])
        }
    }
}

fn cmd_entropy(path: &Path, lattice: &str, quad: &QuadArgs, units: Units) -> Result<RunResult, CliError> {
    let spec = load_system_spec(path)?;
    let s = &spec.system;
    let lat = parse_lattice(lattice)?;
    let cfg = quad_config(quad, spec.tol);
    let case = classify_lattice(&lat);
    let mut out = String::new();
    writeln!(out, "system: {}", s.name).unwrap();
    writeln!(out, "lattice: {} ({})", lat.canonical(), describe_case(&case)).unwrap();
    if let LatticeCase::Generic { n, m } = case {
        let rel = generic_relation(s, n, m)?;
        writeln!(out, "relation: {}", rel.format_named(&["w1", "w2"])).unwrap();
    }
    let result = sublattice_entropy(s, &lat, &cfg)?;
    let mut code = EXIT_OK;
    match &result {
        EntropyResult::Finite(v) => {
            writeln!(out, "entropy: {}", render_value(v, units)).unwrap();
            if !v.converged {
                code = EXIT_INCONCLUSIVE;
            }
        }
        EntropyResult::MultipleOfLogMahlerG { base, geometry_key, .. } => {
            writeln!(out, "entropy: a multiple of log M(g) = {}, fixed by the geometry of {geometry_key}", render_value(base, units))
                .unwrap();
        }
        EntropyResult::PlanarStructural { f_key } => {
            writeln!(out, "entropy: structural, sub-action of the (u1, u2)-plane with relation {f_key}").unwrap();
        }
    }
    Ok(RunResult::new(code, out))
}

fn verdict_name(v: RowVerdict) -> &'static str {
    match v {
        RowVerdict::Equal => "equal",
        RowVerdict::Distinct => "distinct",
        RowVerdict::StructuralEqual => "structural-equal",
        RowVerdict::Incomparable => "incomparable",
        RowVerdict::Inconclusive => "inconclusive",
    }
}

fn csv_result(r: &Result<EntropyResult, String>, units: Units) -> (String, String, String) {
    match r {
        Ok(res) => match res.value() {
            Some(v) => (res.variant_name().into(), format_value(v.value * units.scale()), format_error(v.error * units.scale())),
            None => (res.variant_name().into(), String::new(), String::new()),
        },
        Err(_) => ("error".into(), String::new(), String::new()),
    }
}

fn cmd_equiv(
    p1: &Path,
    p2: &Path,
    bound: i64,
    lattice: Option<&str>,
    csv_path: Option<PathBuf>,
    quad: &QuadArgs,
    units: Units,
) -> Result<RunResult, CliError> {
    let s1 = load_system_spec(p1)?;
    let s2 = load_system_spec(p2)?;
    let family = match lattice {
        Some(l) => vec![parse_lattice(l)?.canonical()],
        None if bound >= 1 => enumerate_sublattices(bound),
        None => return Err(CliError::Input(format!("bound must be positive, got {bound}"))),
    };
    let tol = quad.tol.or(s1.tol).or(s2.tol).unwrap_or(QuadratureConfig::default().tolerance);
    let cfg = quad_config(quad, Some(tol));
    let report = entropy_equivalent(&s1.system, &s2.system, &family, &cfg, tol);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for row in &report.rows {
        *counts.entry(verdict_name(row.verdict)).or_default() += 1;
    }
    let mut out = String::new();
    writeln!(out, "systems: {} vs {}", s1.system.name, s2.system.name).unwrap();
    writeln!(out, "subgroups compared: {} (tolerance {})", report.rows.len(), format_error(tol)).unwrap();
    for (k, v) in &counts {
        writeln!(out, "  {k}: {v}").unwrap();
    }
    for row in report.rows.iter().filter(|r| matches!(r.verdict, RowVerdict::Distinct | RowVerdict::Inconclusive)).take(10) {
        let show = |r: &Result<EntropyResult, String>| match r {
            Ok(res) => res.value().map_or(res.variant_name().to_string(), |v| format_value(v.value * units.scale())),
            Err(e) => format!("error: {e}"),
        };
        writeln!(out, "  {} at {}: {} vs {}", verdict_name(row.verdict), row.lattice, show(&row.first), show(&row.second))
            .unwrap();
    }
    let (name, code) = match report.verdict {
        Verdict::Equivalent => ("equivalent", EXIT_OK),
        Verdict::NotEquivalent => ("not equivalent", EXIT_NEGATIVE),
        Verdict::Inconclusive => ("inconclusive", EXIT_INCONCLUSIVE),
    };
    writeln!(out, "verdict: {name}").unwrap();
    let mut r = RunResult::new(code, out);
    if csv_path.is_some() {
        let mut csv = String::from("lattice,variant1,value1,err1,variant2,value2,err2,verdict\n");
        for row in &report.rows {
            let (v1, x1, e1) = csv_result(&row.first, units);
            let (v2, x2, e2) = csv_result(&row.second, units);
            writeln!(csv, "\"{}\",{v1},{x1},{e1},{v2},{x2},{e2},{}", row.lattice, verdict_name(row.verdict)).unwrap();
        }
        r.csv = Some(csv);
        r.csv_path = csv_path;
    }
    Ok(r)
}

fn parse_dims(text: &str) -> Result<[usize; 3], CliError> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("dims must be L1,L2,L3, got {text}")))?;
    match parts[..] {
        [a, b, c] if a > 0 && b > 0 && c > 0 => Ok([a, b, c]),
        _ => Err(CliError::Input(format!("dims must be three positive integers, got {text}"))),
    }
}

/// Reads `n1,n2,n3,value` rows; a header line is allowed.
pub fn parse_seed_csv(text: &str) -> Result<BTreeMap<Coord, f64>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('n')) {
            continue;
        }
        let bad = || CliError::Input(format!("seed line {}: expected n1,n2,n3,value", i + 1));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(bad());
        }
        let n: Coord = [f[0].parse().map_err(|_| bad())?, f[1].parse().map_err(|_| bad())?, f[2].parse().map_err(|_| bad())?];
        let v: f64 = f[3].parse().map_err(|_| bad())?;
        if out.insert(n, v).is_some() {
            return Err(CliError::Input(format!("seed line {}: duplicate coordinate", i + 1)));
        }
    }
    Ok(out)
}

fn cmd_helmet(dims: &str, seed_file: &Path, system: Option<&Path>, csv_path: Option<PathBuf>) -> Result<RunResult, CliError> {
    let dims = parse_dims(dims)?;
    let s = match system {
        Some(p) => load_system(p)?,
        None => SystemPresentation::parse("helmet", "1 + u1 + u2", "u3 - 2").expect("valid"),
    };
    let text = std::fs::read_to_string(seed_file)
        .map_err(|e| CliError::Input(format!("{}: {e}", seed_file.display())))?;
    let seeds = parse_seed_csv(&text)?;
    let space = build_window(&s, dims)?;
    let cfg = complete_window(&space, &seeds)?;
    let residual = verify_window(&space, &cfg);
    let mut csv = String::from("n1,n2,n3,value\n");
    for (n, v) in cfg.iter() {
        writeln!(csv, "{},{},{},{}", n[0], n[1], n[2], format_value(v)).unwrap();
    }
    let report = format!(
        "window {}x{}x{}: {} coordinates from {} seeds, max residual {}\n",
        dims[0],
        dims[1],
        dims[2],
        space.len(),
        space.free_set().len(),
        format_error(residual)
    );
    Ok(RunResult { exit_code: EXIT_OK, report, csv: Some(csv), csv_path })
}
