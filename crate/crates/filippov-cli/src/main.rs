use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use filippov::canonical::{shear_to_equal_gammas, to_canonical};
use filippov::flow::{backward_orbit, filippov_orbit, sample_orbit};
use filippov::halfmaps::HalfMapContext;
use filippov::periodic::coexistence;
use filippov::report::{analysis_report, canonical_report, classify_report};
use filippov::specfile::{bundled, SystemSpec};
use filippov::sweep::{run_sweep, seed_from_env, DEFAULT_SYSTEMS};
use filippov::verify::run_all;
use filippov::FlpError;

#[derive(Parser)]
#[command(name = "flp", version, about = "Periodic orbits of planar piecewise-linear Filippov systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Switching-line decomposition, equilibria and tangencies
    Classify { spec: PathBuf },
    /// Canonical parameters and premises
    Canonical { spec: PathBuf },
    /// Orbit samples as CSV: t,x,y,segment_kind
    Orbit {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        #[arg(long)]
        backward: bool,
        /// Maximum number of segments
        #[arg(long, default_value_t = 64)]
        budget: usize,
        /// Samples per segment
        #[arg(long, default_value_t = 50)]
        per_segment: usize,
    },
    /// Half-maps and displacement in sheared canonical coordinates
    Dfunc {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        y_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        y_max: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Full analysis report
    Periodic { spec: PathBuf },
    /// Run the acceptance checks and print one line per criterion
    VerifyPaper,
    /// Coexistence counts along a one-parameter family
    Sweep {
        template: PathBuf,
        /// Named parameter or entry path such as `b_minus[1]`
        #[arg(long)]
        param: String,
        /// `a:b:n`, n evenly spaced values from a to b
        #[arg(long, allow_hyphen_values = true)]
        range: String,
    },
    /// Census over random systems; the seed comes from FLP_SEED
    Survey {
        #[arg(long, default_value_t = DEFAULT_SYSTEMS)]
        n: usize,
    },
}

enum Failure {
    Input(String),
    Analysis(String),
}

impl From<FlpError> for Failure {
    fn from(e: FlpError) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Analysis(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Analysis(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Analysis(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// A file path, or the name of a bundled spec when no such file exists.
fn load_spec(path: &Path) -> Result<SystemSpec, Failure> {
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        return Ok(SystemSpec::parse(&text)?);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    bundled(stem).ok_or_else(|| Failure::Input(format!("no such spec file or bundled example: {}", path.display())))
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Analysis(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn csv_out() -> csv::Writer<std::io::Stdout> {
    csv::Writer::from_writer(std::io::stdout())
}

fn orbit(spec: &SystemSpec, z0: [f64; 2], backward: bool, budget: usize, per_segment: usize) -> CliResult {
    let (sys, rec) = spec.system()?;
    let start = rec.push(&z0);
    let (orbit, sign) = if backward {
        (backward_orbit(&sys, start, budget)?, -1.0)
    } else {
        (filippov_orbit(&sys, start, budget)?, 1.0)
    };
    let traced = if backward { sys.time_reversed() } else { sys };
    let mut w = csv_out();
    w.write_record(["t", "x", "y", "segment_kind"])?;
    for s in sample_orbit(&traced, &orbit, per_segment, sign) {
        let z = rec.pullback(&[s.x, s.y]);
        w.write_record([num(s.t), num(z[0]), num(z[1]), s.kind.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn dfunc(spec: &SystemSpec, y_min: f64, y_max: f64, samples: usize) -> CliResult {
    if !(y_min.is_finite() && y_max.is_finite()) || samples == 0 {
        return Err(Failure::Input("need finite --y-min, --y-max and --samples >= 1".into()));
    }
    let (sys, _) = spec.system()?;
    let (params, _) = to_canonical(&sys)?;
    let params = shear_to_equal_gammas(&params).map_or(params, |(q, _)| q);
    let ctx = HalfMapContext::new(&params)?;
    let mut w = csv_out();
    w.write_record(["y", "P_R", "P_Linv", "D"])?;
    for k in 0..samples {
        let y = if samples == 1 { y_min } else { y_min + (y_max - y_min) * k as f64 / (samples - 1) as f64 };
        let pr = ctx.P_R(y).unwrap_or(f64::NAN);
        let pl = ctx.P_L_inv(y).unwrap_or(f64::NAN);
        w.write_record([num(y), num(pr), num(pl), num(pl - pr)])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Input(format!("range must be a:b:n, got {text}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

fn sweep(template: &SystemSpec, param: &str, range: &str) -> CliResult {
    let values = parse_range(range)?;
    if template.get(param).is_none() {
        return Err(Failure::Input(format!("unknown parameter {param}")));
    }
    let specs = values.iter().map(|&v| template.with(param, v)).collect::<Result<Vec<_>, _>>()?;
    let mut w = csv_out();
    w.write_record(["value", "n_crossing", "n_sliding", "configuration", "error"])?;
    for (v, spec) in values.iter().zip(&specs) {
        let row = spec.system().and_then(|(sys, _)| coexistence(&sys));
        match row {
            Ok(r) => {
                let tag = r.tag().map_or(String::new(), |t| format!("{t:?}"));
                w.write_record([num(*v), r.n_crossing.to_string(), r.n_sliding.to_string(), tag, String::new()])?;
            }
            Err(e) => w.write_record([num(*v), String::new(), String::new(), String::new(), e.to_string()])?,
        }
    }
    w.flush()?;
    Ok(())
}

fn verify_paper() -> CliResult {
    let results = run_all(seed_from_env());
    let mut out = std::io::stdout().lock();
    for r in &results {
        writeln!(out, "{}", r.line())?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} of {} criteria passed", results.len() - failed, results.len())?;
    if failed > 0 {
        return Err(Failure::Analysis(format!("{failed} criteria failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Classify { spec } => print_json(&classify_report(&load_spec(&spec)?)?),
        Command::Canonical { spec } => {
            let (sys, _) = load_spec(&spec)?.system()?;
            print_json(&canonical_report(&sys)?)
        }
        Command::Orbit { spec, x0, y0, backward, budget, per_segment } => {
            orbit(&load_spec(&spec)?, [x0, y0], backward, budget, per_segment)
        }
        Command::Dfunc { spec, y_min, y_max, samples } => dfunc(&load_spec(&spec)?, y_min, y_max, samples),
        Command::Periodic { spec } => print_json(&analysis_report(&load_spec(&spec)?, seed_from_env())?),
        Command::VerifyPaper => verify_paper(),
        Command::Sweep { template, param, range } => sweep(&load_spec(&template)?, &param, &range),
        Command::Survey { n } => print_json(&run_sweep(seed_from_env(), n)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Analysis(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
