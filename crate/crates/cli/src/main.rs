use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lsrk::conditions::{is_two_n_storage, order_residuals, two_n_residuals, ResidualReport};
use lsrk::construct::{
    derive_a_from_bc, family_a_minus_one, solve_43, solve_43_special, solve_53, Solutions, Solve43Input, Solve53Input,
    Special43,
};
use lsrk::convert::{a_to_alpha, a_to_lowstorage, legacy_williamson, lowstorage_to_a};
use lsrk::integrate::{convergence_order, error_curve, scheme_stability_region, ProblemId, TestProblem};
use lsrk::numerics::{ExtFloat, Rational, Scalar, DEFAULT_PRECISION};
use lsrk::refine::{format_report, newton_refine, parameter_names, parameter_values, residuals_extended};
use lsrk::schemes::{
    load_scheme, registry_get, registry_names, save_scheme, to_json, ButcherTableau, CoefficientType, Coefficients,
    LowStorageForm, Scheme,
};
use lsrk::search::{search, write_results, Family, Filter, SearchSpec};

// stdout may be a closed pipe (`| head`); data loss there is not an error
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outp {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

/// Decimal residuals below this count as satisfied in `check`.
const DECIMAL_CHECK_TOL: f64 = 1e-30;

#[derive(Parser)]
#[command(name = "lsrk", version, about = "Two-register (2N-storage) explicit Runge-Kutta toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order and 2N-storage residuals of a scheme
    Check {
        #[arg(long)]
        scheme: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        order: u32,
        #[arg(long)]
        two_n: bool,
    },
    /// Convert between the a-, alpha- and A-forms
    Convert {
        #[arg(long)]
        scheme: String,
        #[arg(long, value_enum)]
        to: Target,
        /// Use the original (incorrect) Williamson conversion
        #[arg(long)]
        legacy_williamson: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the two-register scheme determined by weights and nodes
    Derive {
        #[arg(long, allow_hyphen_values = true)]
        b: RatList,
        #[arg(long, allow_hyphen_values = true)]
        c: RatList,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form (4,3) schemes for given nodes
    Solve43 {
        #[arg(long, allow_hyphen_values = true)]
        c2: Rational,
        #[arg(long, allow_hyphen_values = true)]
        c3: Rational,
        #[arg(long, allow_hyphen_values = true)]
        c4: Rational,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// (4,3) special cases
    #[command(name = "solve43-special")]
    Solve43Special {
        #[arg(long, value_parser = parse_special)]
        case: Special43,
        #[arg(long, allow_hyphen_values = true)]
        p1: Rational,
        #[arg(long, allow_hyphen_values = true)]
        p2: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form (5,3) schemes for given nodes and b5
    Solve53 {
        #[arg(long, allow_hyphen_values = true)]
        c2: Rational,
        #[arg(long, allow_hyphen_values = true)]
        c3: Rational,
        #[arg(long, allow_hyphen_values = true)]
        c4: Rational,
        #[arg(long, allow_hyphen_values = true)]
        c5: Rational,
        #[arg(long, allow_hyphen_values = true)]
        b5: Rational,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Scheme with A_i = -1 for the given weights
    #[command(name = "family-aminus1")]
    FamilyAminus1 {
        #[arg(long, allow_hyphen_values = true)]
        b: RatList,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search over rational nodes
    Search {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        max_den: u32,
        #[arg(long, allow_hyphen_values = true)]
        b5_grid: Option<RatList>,
        #[arg(long = "filter", value_parser = parse_filter)]
        filters: Vec<Filter>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Error at t = 20 against the exact solution for a list of steps
    Integrate {
        #[arg(long)]
        scheme: String,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<Rational>,
        #[arg(long)]
        h_list: RatList,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Absolute stability region on a grid
    Stability {
        #[arg(long)]
        scheme: String,
        #[arg(long, allow_hyphen_values = true)]
        re: Range,
        #[arg(long, allow_hyphen_values = true)]
        im: Range,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, value_enum)]
        format: RasterFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Order residuals in extended precision (decimal coefficients are re-read at the requested precision)
    Verify {
        #[arg(long)]
        scheme: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        order: u32,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        bits: u32,
    },
    /// Newton refinement of A, B with pinned parameters; `--pin NAME` keeps
    /// the scheme's value, `--pin NAME=VALUE` sets it (decimal allowed)
    Refine {
        #[arg(long, value_parser = parse_pin, allow_hyphen_values = true)]
        pin: Vec<Pin>,
        #[arg(long)]
        scheme: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        order: u32,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        bits: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List built-in schemes
    Registry,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    A,
    Alpha,
    Lowstorage,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    #[value(name = "1")]
    P1,
    #[value(name = "2")]
    P2,
    #[value(name = "3")]
    P3,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum RasterFormat {
    Csv,
    Pgm,
}

#[derive(Clone, Debug)]
struct RatList(Vec<Rational>);

impl FromStr for RatList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<Rational>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()
            .map(RatList)
    }
}

#[derive(Clone, Copy, Debug)]
struct Range(f64, f64);

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or("expected min:max")?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
        let (lo, hi) = (p(a)?, p(b)?);
        if !(lo < hi) {
            return Err(format!("empty range {s}"));
        }
        Ok(Range(lo, hi))
    }
}

#[derive(Clone, Debug)]
struct Pin {
    name: String,
    value: Option<String>,
}

fn parse_pin(s: &str) -> Result<Pin, String> {
    match s.split_once('=') {
        Some((n, v)) => Ok(Pin {
            name: n.trim().to_string(),
            value: Some(v.trim().to_string()),
        }),
        None => Ok(Pin {
            name: s.trim().to_string(),
            value: None,
        }),
    }
}

fn parse_special(s: &str) -> Result<Special43, String> {
    s.parse().map_err(|e: lsrk::construct::ConstructError| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: lsrk::search::SearchError| e.to_string())
}

fn parse_filter(s: &str) -> Result<Filter, String> {
    s.parse().map_err(|e: lsrk::search::SearchError| e.to_string())
}

/// Bad input that should exit with status 2.
#[derive(Debug)]
struct Usage(String);

impl Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() { 2 } else { 1 })
        }
    }
}

fn load(spec: &str) -> Result<Scheme> {
    if let Ok(s) = registry_get(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if path.exists() {
        return load_scheme(path).with_context(|| format!("reading {spec}"));
    }
    Err(usage(format!(
        "'{spec}' is neither a built-in scheme nor a file (built-ins: {})",
        registry_names().join(", ")
    )))
}

fn join<T: Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn emit(scheme: &Scheme, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            save_scheme(scheme, p).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {}", p.display());
        }
        None => out!("{}", to_json(scheme)),
    }
    Ok(())
}

fn emit_solutions(sol: &Solutions, dir: Option<&Path>) -> Result<bool> {
    for d in &sol.diagnostics {
        eprintln!("note: {d}");
    }
    if let Some(d) = dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    for s in &sol.schemes {
        let path = dir.map(|d| d.join(format!("{}.json", lsrk::search::file_stem(&s.name))));
        emit(s, path.as_deref())?;
    }
    if sol.schemes.is_empty() {
        eprintln!("no scheme produced");
    }
    Ok(!sol.schemes.is_empty())
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Check { scheme, order, two_n } => {
            let s = load(&scheme)?;
            Ok(match &s.coefficients {
                Coefficients::Rational(f) => check(&f.tableau, order, two_n, |r: &Rational| r.is_zero(), "all residuals zero")?,
                Coefficients::Decimal(f) => check(
                    &f.tableau,
                    order,
                    two_n,
                    |r: &ExtFloat| r.to_f64().abs() < DECIMAL_CHECK_TOL,
                    "all residuals below 1e-30",
                )?,
            })
        }
        Command::Convert {
            scheme,
            to,
            legacy_williamson,
            out,
        } => {
            let s = load(&scheme)?;
            match &s.coefficients {
                Coefficients::Rational(f) => convert(&s, &f.tableau, to, legacy_williamson, out.as_deref()),
                Coefficients::Decimal(f) => convert(&s, &f.tableau, to, legacy_williamson, out.as_deref()),
            }
        }
        Command::Derive { b, c, out } => {
            let t = derive_a_from_bc(&b.0, &c.0).map_err(|e| usage(e.to_string()))?;
            let name = format!("derived-{}", b.0.len());
            let s = assemble(name, "derived from b and c".into(), t)?;
            emit(&s, out.as_deref())?;
            Ok(true)
        }
        Command::Solve43 { c2, c3, c4, out_dir } => {
            let sol = solve_43(&Solve43Input::new(c2, c3, c4)).map_err(|e| usage(e.to_string()))?;
            emit_solutions(&sol, out_dir.as_deref())
        }
        Command::Solve43Special { case, p1, p2, out } => {
            let s = solve_43_special(case, &p1, &p2).map_err(|e| usage(e.to_string()))?;
            emit(&s, out.as_deref())?;
            Ok(true)
        }
        Command::Solve53 {
            c2,
            c3,
            c4,
            c5,
            b5,
            out_dir,
        } => {
            let sol = solve_53(&Solve53Input::new(c2, c3, c4, c5, b5)).map_err(|e| usage(e.to_string()))?;
            emit_solutions(&sol, out_dir.as_deref())
        }
        Command::FamilyAminus1 { b, out } => {
            let t = family_a_minus_one(&b.0).map_err(|e| usage(e.to_string()))?;
            let s = assemble(format!("aminus1-{}", b.0.len()), format!("A_i = -1 family, b = {}", join(&b.0)), t)?;
            emit(&s, out.as_deref())?;
            Ok(true)
        }
        Command::Search {
            family,
            max_den,
            b5_grid,
            filters,
            jobs,
            out_dir,
        } => {
            let mut spec = SearchSpec::new(family, max_den);
            spec.filters = filters;
            spec.jobs = jobs;
            if let Some(g) = b5_grid {
                spec.b5_grid = g.0;
            }
            let result = search(&spec).map_err(|e| usage(e.to_string()))?;
            write_results(&out_dir, &spec, &result)?;
            outp!("{}", lsrk::search::summary(&spec, &result));
            Ok(true)
        }
        Command::Integrate {
            scheme,
            problem,
            lambda,
            h_list,
            csv,
        } => {
            let s = load(&scheme)?;
            let id = match (problem, lambda) {
                (ProblemArg::Linear, Some(l)) => ProblemId::Linear(l),
                (ProblemArg::Linear, None) => ProblemId::Linear(Rational::from_integer(-1)),
                (_, Some(_)) => return Err(usage("--lambda only applies to --problem linear")),
                (ProblemArg::P1, None) => ProblemId::P1,
                (ProblemArg::P2, None) => ProblemId::P2,
                (ProblemArg::P3, None) => ProblemId::P3,
            };
            let curve = error_curve(&s, &TestProblem::new(id), &h_list.0)?;
            match csv {
                Some(p) => write_out(&p, &curve.to_csv())?,
                None => outp!("{}", curve.to_csv()),
            }
            match convergence_order(&curve) {
                Ok(p) => eprintln!("fitted order {p:.3}"),
                Err(e) => eprintln!("no order estimate: {e}"),
            }
            Ok(true)
        }
        Command::Stability {
            scheme,
            re,
            im,
            nx,
            ny,
            format,
            out,
        } => {
            if nx < 2 || ny < 2 {
                return Err(usage("--nx and --ny must be at least 2"));
            }
            let s = load(&scheme)?;
            let r = scheme_stability_region(&s, (re.0, re.1), (im.0, im.1), nx, ny);
            let text = match format {
                RasterFormat::Csv => r.to_boundary_csv(),
                RasterFormat::Pgm => r.to_pgm(),
            };
            write_out(&out, &text)?;
            out!("area {:.6}", r.area());
            Ok(true)
        }
        Command::Verify { scheme, order, bits } => {
            let s = load(&scheme)?;
            let r = residuals_extended(&s, order, bits).map_err(|e| usage(e.to_string()))?;
            outp!("{}", format_report(&r));
            match r.max_abs() {
                Some(m) => out!("max |residual| {} at {bits} bits", m.to_sci_digits(6)),
                None => out!("no conditions"),
            }
            Ok(true)
        }
        Command::Refine {
            scheme,
            pin,
            order,
            bits,
            out,
        } => refine(&scheme, &pin, order, bits, out.as_deref()),
        Command::Registry => {
            for name in registry_names() {
                let s = registry_get(name)?;
                let two_n = match &s.coefficients {
                    Coefficients::Rational(f) => f.low_storage.is_some(),
                    Coefficients::Decimal(f) => f.low_storage.is_some(),
                };
                out!(
                    "{name}\tstages {}\torder {}\t{}\t{}",
                    s.stages(),
                    s.order,
                    s.number_kind().as_str(),
                    if two_n { "2N" } else { "-" }
                );
            }
            Ok(true)
        }
    }
}

fn print_report<T: Display>(r: &ResidualReport<T>) {
    for (id, v) in &r.entries {
        out!("{id} {v}");
    }
}

fn check<T: Scalar>(
    t: &ButcherTableau<T>,
    order: u32,
    two_n: bool,
    ok: impl Fn(&T) -> bool,
    ok_text: &str,
) -> Result<bool> {
    let mut r = order_residuals(t, order)?;
    if two_n {
        r.extend(two_n_residuals(t));
    }
    print_report(&r);
    let bad: Vec<&str> = r.entries.iter().filter(|(_, v)| !ok(v)).map(|(id, _)| id.as_str()).collect();
    let mut pass = bad.is_empty();
    if pass {
        out!("{ok_text}");
    } else {
        out!("{} nonzero residuals: {}", bad.len(), bad.join(", "));
    }
    if two_n {
        let (yes, _) = is_two_n_storage(t);
        if !yes {
            pass = false;
            if bad.is_empty() {
                out!("not a 2N-storage scheme: a vanishing alpha or beta leaves A, B undefined");
            }
        }
    }
    Ok(pass)
}

fn print_tableau<T: Scalar>(t: &ButcherTableau<T>) {
    out!("c = {}", join(t.nodes()));
    for (k, row) in t.lower_rows().iter().enumerate() {
        out!("a{} = {}", k + 2, join(row));
    }
    out!("b = {}", join(t.weights()));
}

fn print_lowstorage<T: Scalar>(f: &LowStorageForm<T>) {
    for (k, a) in f.a_coeffs().iter().enumerate() {
        out!("A{} = {a}", k + 1);
    }
    for (k, b) in f.b_coeffs().iter().enumerate() {
        out!("B{} = {b}", k + 1);
    }
}

fn convert<T: CoefficientType>(
    s: &Scheme,
    t: &ButcherTableau<T>,
    to: Target,
    legacy: bool,
    out: Option<&Path>,
) -> Result<bool> {
    if legacy && !matches!(to, Target::Lowstorage) {
        return Err(usage("--legacy-williamson only applies to --to lowstorage"));
    }
    match to {
        Target::A => {
            print_tableau(t);
            if let Some(p) = out {
                save_scheme(s, p)?;
                eprintln!("wrote {}", p.display());
            }
            Ok(true)
        }
        Target::Alpha => {
            let f = a_to_alpha(t);
            let mut text = format!("c = {}\n", join(f.nodes()));
            for (k, row) in f.lower_rows().iter().enumerate() {
                text.push_str(&format!("alpha{} = {}\n", k + 2, join(row)));
            }
            text.push_str(&format!("beta = {}\n", join(f.betas())));
            outp!("{text}");
            if let Some(p) = out {
                write_out(p, &text)?;
            }
            Ok(true)
        }
        Target::Lowstorage => {
            let ls = if legacy { legacy_williamson(t)? } else { a_to_lowstorage(t)? };
            print_lowstorage(&ls);
            let back = lowstorage_to_a(&ls);
            let round_trip = back.near(t);
            if !round_trip {
                let diff = back.first_difference(t).unwrap_or_default();
                eprintln!("warning: round trip fails: A, B give a different tableau ({diff})");
            }
            if let Some(p) = out {
                let name = if legacy { format!("{}-legacy", s.name) } else { s.name.clone() };
                let prov = if legacy {
                    format!("legacy Williamson conversion of {}", s.name)
                } else {
                    s.provenance.clone()
                };
                let ord = if round_trip { s.order } else { 1 };
                let out_scheme = Scheme::from_forms(name, ord, prov, back, Some(ls))?;
                save_scheme(&out_scheme, p)?;
                eprintln!("wrote {}", p.display());
            }
            Ok(true)
        }
    }
}

/// Scheme from a tableau: attach A, B when they exist and record the
/// highest order whose conditions hold.
fn assemble(name: String, provenance: String, t: ButcherTableau<Rational>) -> Result<Scheme> {
    let order = (1..=4)
        .take_while(|&p| order_residuals(&t, p).map(|r| r.all_zero()).unwrap_or(false))
        .last()
        .unwrap_or(0);
    let ls = a_to_lowstorage(&t).ok();
    if ls.is_none() {
        eprintln!("note: no two-register form (a vanishing alpha or beta)");
    }
    eprintln!("order conditions hold through order {order}");
    Ok(Scheme::from_forms(name, order, provenance, t, ls)?)
}

fn start_form(s: &Scheme, bits: u32) -> Result<LowStorageForm<ExtFloat>> {
    Ok(match &s.coefficients {
        Coefficients::Rational(f) => {
            let ls = match &f.low_storage {
                Some(ls) => ls.clone(),
                None => a_to_lowstorage(&f.tableau)?,
            };
            ls.map(|x| ExtFloat::from_rational(x, bits))
        }
        Coefficients::Decimal(f) => match &f.low_storage {
            Some(ls) => ls.map(|x| x.reparse(bits)),
            None => a_to_lowstorage(&f.tableau)?.map(|x| x.reparse(bits)),
        },
    })
}

fn refine(scheme: &str, pins: &[Pin], order: u32, bits: u32, out: Option<&Path>) -> Result<bool> {
    let s = load(scheme)?;
    let start = start_form(&s, bits)?;
    let names = parameter_names(start.stages());
    let values = parameter_values(&start);
    let mut fixed = BTreeMap::new();
    for p in pins {
        let k = names
            .iter()
            .position(|n| *n == p.name)
            .ok_or_else(|| usage(format!("unknown parameter '{}' (expected one of {})", p.name, names.join(", "))))?;
        let v = match &p.value {
            Some(text) => ExtFloat::parse(text, bits).map_err(|e| usage(format!("pin {}: {e}", p.name)))?,
            None => values[k].clone(),
        };
        fixed.insert(p.name.clone(), v);
    }
    let res = newton_refine(&start, &fixed, order, bits).map_err(|e| match e {
        lsrk::refine::RefineError::Argument(_) | lsrk::refine::RefineError::Dimension { .. } => usage(e.to_string()),
        other => anyhow!(other),
    })?;
    for (k, h) in res.history.iter().enumerate() {
        eprintln!("iteration {k}: max |residual| {}", h.to_sci_digits(6));
    }
    out!("converged in {} iterations", res.iterations);
    print_lowstorage(&res.form);
    if let Some(p) = out {
        let t = lowstorage_to_a(&res.form);
        let refined = Scheme::decimal(
            format!("{}-refined", s.name),
            order,
            format!("Newton refinement of {} at {bits} bits", s.name),
            t,
            Some(res.form),
        )?;
        save_scheme(&refined, p)?;
        eprintln!("wrote {}", p.display());
    }
    Ok(true)
}
