//! `homsim` — photon-number statistics at a lossless two-port splitter.
//!
//! Subcommands cover the full library surface: joint output grids
//! (`dist`), coincidence diagonals (`coincidence`), pairwise-cancellation
//! certificates (`diagrams`), exact integer coincidence sums
//! (`sum-table`), the nodal-line figure bundle (`figure1`), detector
//! efficiency scans (`efficiency`), and cross-convention amplitude
//! comparisons (`conventions`).
//!
//! Exit codes: 0 success; 2 usage or input-spec errors; 3 photon-capacity
//! overflow; 4 numeric-validation failures (non-unitary matrix,
//! non-normalized state).

mod render;
mod settings;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use homsim::detector::{apply_joint, coincidence_vs_eta, EfficiencyModel};
use homsim::engine::{output_distribution, JointDistribution};
use homsim::states::{build_bipartite, StateSpec};
use homsim::{cancellation_certificate, coincidence_sum, Convention, Error, ScatteringMatrix};

use settings::{parse_list, CommonArgs, Defaults, Format, Settings, DEFAULT_EPSILON};

/// Environment variable naming the default output directory for
/// `figure1` when `--out` is absent.
const OUTPUT_DIR_VAR: &str = "HOMSIM_OUTPUT_DIR";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config, bad state specs — anything the user typed.
    Usage(String),
    /// Library-reported failure; exit code depends on the error class.
    Lib(Error),
    /// Filesystem trouble while reading config or writing results.
    Io(String, std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(err) => match err {
                Error::CapacityExceeded { .. } => 3,
                Error::NonUnitary(_) | Error::NotNormalized { .. } | Error::NumericValidation(_) => 4,
                _ => 2,
            },
            CliError::Io(..) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(err) => write!(f, "{err}"),
            CliError::Io(what, err) => write!(f, "{what}: {err}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Lib(err)
    }
}

#[derive(Parser)]
#[command(
    name = "homsim",
    version,
    about = "Photon-number statistics at a lossless two-port beam splitter",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint photon-number distribution at the two output ports.
    Dist(DistArgs),
    /// Coincidence diagonal P(n,n) and the nodal-line suppression metric.
    Coincidence(DistArgs),
    /// Pairwise-cancellation certificate for a Fock pair |n,m>.
    Diagrams(DiagramsArgs),
    /// Exact integer coincidence sums S(n,m) for equal-parity pairs.
    SumTable(SumTableArgs),
    /// Grid files showing how the central nodal line follows input parity.
    Figure1(Figure1Args),
    /// Coincidence probabilities swept over detector efficiency.
    Efficiency(EfficiencyArgs),
    /// One transition amplitude compared across the three conventions.
    Conventions(ConventionsArgs),
}

#[derive(Debug, clap::Args)]
struct DistArgs {
    /// Mode-1 input state (fock:N, coherent:RE[+IMi], thermal:NBAR,
    /// pure-grid:@FILE).
    #[arg(long)]
    in1: Option<String>,

    /// Mode-2 input state; omit when in1 is a joint pure-grid.
    #[arg(long)]
    in2: Option<String>,

    /// Mode-1 detector efficiency in [0,1]; both default to ideal.
    #[arg(long)]
    eta1: Option<f64>,

    /// Mode-2 detector efficiency in [0,1].
    #[arg(long)]
    eta2: Option<f64>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, clap::Args)]
struct DiagramsArgs {
    /// Mode-1 photon count.
    #[arg(long)]
    n: usize,

    /// Mode-2 photon count (same parity as n for a certificate).
    #[arg(long)]
    m: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, clap::Args)]
struct SumTableArgs {
    /// Largest mode-1 photon count tabulated.
    #[arg(long, default_value_t = 10)]
    max_n: usize,

    /// Largest mode-2 photon count tabulated.
    #[arg(long, default_value_t = 10)]
    max_m: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, clap::Args)]
struct Figure1Args {
    /// Mean photon number of the bright partner beam.
    #[arg(long, default_value_t = 9.0)]
    nbar: f64,

    /// Comma-separated Fock counts for the dim input.
    #[arg(long, default_value = "0,1,3")]
    n_list: String,

    /// Partner beam kind: coherent or thermal.
    #[arg(long, default_value = "coherent")]
    kind: String,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, clap::Args)]
struct EfficiencyArgs {
    /// Mode-1 input state.
    #[arg(long)]
    in1: Option<String>,

    /// Mode-2 input state; omit when in1 is a joint pure-grid.
    #[arg(long)]
    in2: Option<String>,

    /// Comma-separated detector efficiencies to scan.
    #[arg(long, default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
    etas: String,

    /// Comma-separated coincidence orders n to report.
    #[arg(long, default_value = "1,2")]
    ns: String,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, clap::Args)]
struct ConventionsArgs {
    /// Mode-1 input photon count.
    #[arg(long)]
    n: usize,

    /// Mode-2 input photon count.
    #[arg(long)]
    m: usize,

    /// Mode-1 output photon count.
    #[arg(long)]
    p: usize,

    /// Mode-2 output photon count.
    #[arg(long)]
    q: usize,

    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Dist(args) => cmd_dist(args),
        Command::Coincidence(args) => cmd_coincidence(args),
        Command::Diagrams(args) => cmd_diagrams(args),
        Command::SumTable(args) => cmd_sum_table(args),
        Command::Figure1(args) => cmd_figure1(args),
        Command::Efficiency(args) => cmd_efficiency(args),
        Command::Conventions(args) => cmd_conventions(args),
    }
}

/// Parse the mode specs (flags first, config fallback) and produce the
/// splitter output distribution, detector-thinned when requested.
fn distribution_for(
    in1: &Option<String>,
    in2: &Option<String>,
    eta1: Option<f64>,
    eta2: Option<f64>,
    s: &Settings,
) -> Result<JointDistribution, CliError> {
    let first_raw = in1
        .clone()
        .or_else(|| s.in1.clone())
        .ok_or_else(|| CliError::Usage("missing --in1 (mode-1 state spec)".into()))?;
    let second_raw = in2.clone().or_else(|| s.in2.clone());

    let first: StateSpec = first_raw.parse()?;
    let second: Option<StateSpec> = second_raw.map(|raw| raw.parse()).transpose()?;
    let input = build_bipartite(&first, second.as_ref(), s.epsilon)?;

    let matrix = ScatteringMatrix::from_convention(s.convention, s.theta)?;
    let dist = output_distribution(&matrix, &input)?;

    match (eta1, eta2) {
        (None, None) => Ok(dist),
        (e1, e2) => {
            let model = EfficiencyModel::new(e1.unwrap_or(1.0), e2.unwrap_or(1.0))?;
            Ok(apply_joint(&dist, &model)?)
        }
    }
}

fn cmd_dist(args: DistArgs) -> Result<(), CliError> {
    let s = Settings::resolve(
        &args.common,
        Defaults {
            epsilon: DEFAULT_EPSILON,
            format: Format::Csv,
        },
    )?;
    let dist = distribution_for(&args.in1, &args.in2, args.eta1, args.eta2, &s)?;
    let content = match s.format {
        Format::Csv => dist.to_csv_string(),
        Format::Json => {
            let mut text = dist.to_json_string();
            text.push('\n');
            text
        }
        Format::Text => render::distribution_text(&dist),
    };
    render::emit(s.out.as_deref(), &content)
}

fn cmd_coincidence(args: DistArgs) -> Result<(), CliError> {
    let s = Settings::resolve(
        &args.common,
        Defaults {
            epsilon: DEFAULT_EPSILON,
            format: Format::Csv,
        },
    )?;
    let dist = distribution_for(&args.in1, &args.in2, args.eta1, args.eta2, &s)?;
    let metric = dist.cnl_metric()?;
    let content = match s.format {
        Format::Csv => render::coincidence_csv(&dist),
        Format::Json => render::coincidence_json(&dist, &metric),
        Format::Text => render::coincidence_text(&dist, &metric),
    };
    render::emit(s.out.as_deref(), &content)
}

fn cmd_diagrams(args: DiagramsArgs) -> Result<(), CliError> {
    let s = Settings::resolve(
        &args.common,
        Defaults {
            epsilon: DEFAULT_EPSILON,
            format: Format::Text,
        },
    )?;
    // Magnitudes off the constructed matrix keep the balanced-angle
    // exactness pin instead of recomputing cos/sin here.
    let matrix = ScatteringMatrix::from_convention(s.convention, s.theta)?;
    let cert =
        cancellation_certificate(args.n, args.m, matrix.s11().norm(), matrix.s21().norm())?;
    let content = match s.format {
        Format::Text => cert.to_text(),
        Format::Json => {
            let mut text =
                serde_json::to_string_pretty(&cert.to_json()).expect("certificate JSON");
            text.push('\n');
            text
        }
        Format::Csv => {
            return Err(CliError::Usage(
                "the diagrams certificate has no CSV form; use --format text or json".into(),
            ))
        }
    };
    render::emit(s.out.as_deref(), &content)
}

fn cmd_sum_table(args: SumTableArgs) -> Result<(), CliError> {
    let s = Settings::resolve(
        &args.common,
        Defaults {
            epsilon: DEFAULT_EPSILON,
            format: Format::Csv,
        },
    )?;
    let mut rows: Vec<(usize, usize, String)> = Vec::new();
    for n in 0..=args.max_n {
        for m in 0..=args.max_m {
            if (n + m) % 2 == 0 {
                rows.push((n, m, coincidence_sum(n, m)?.to_string()));
            }
        }
    }
    let content = match s.format {
        Format::Csv => {
            let mut out = String::from("n,m,sum\n");
            for (n, m, sum) in &rows {
                out.push_str(&format!("{n},{m},{sum}\n"));
            }
            out
        }
        Format::Json => {
            let doc: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, m, sum)| serde_json::json!({ "n": n, "m": m, "sum": sum }))
                .collect();
            let mut text = serde_json::to_string_pretty(&doc).expect("sum table JSON");
            text.push('\n');
            text
        }
        Format::Text => {
            let width = rows.iter().map(|r| r.2.len()).max().unwrap_or(1);
            let mut out = String::from("   n    m  S(n,m)\n");
            for (n, m, sum) in &rows {
                out.push_str(&format!("{n:>4} {m:>4}  {sum:>width$}\n"));
            }
            out
        }
    };
    render::emit(s.out.as_deref(), &content)
}

fn cmd_figure1(args: Figure1Args) -> Result<(), CliError> {
    let s = Settings::resolve(
        &args.common,
        Defaults {
            epsilon: 1e-9,
            format: Format::Json,
        },
    )?;
    if s.format == Format::Text {
        return Err(CliError::Usage(
            "figure1 writes machine-readable grid files; use --format json or csv".into(),
        ));
    }
    let kind = match args.kind.as_str() {
        "coherent" | "thermal" => args.kind.as_str(),
        other => {
            return Err(CliError::Usage(format!(
                "unknown partner kind `{other}` (expected coherent or thermal)"
            )))
        }
    };
    let n_list: Vec<usize> = parse_list(&args.n_list, "n list")?;
    if n_list.is_empty() {
        return Err(CliError::Usage("n list is empty".into()));
    }
    if !(args.nbar >= 0.0) {
        return Err(CliError::Usage(format!(
            "nbar must be nonnegative, got {}",
            args.nbar
        )));
    }

    let dir = match s.out.clone() {
        Some(d) => d,
        None => std::env::var_os(OUTPUT_DIR_VAR)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("creating {}", dir.display()), e))?;

    let partner_spec: StateSpec = match kind {
        "coherent" => format!("coherent:{}", args.nbar.sqrt()).parse()?,
        _ => format!("thermal:{}", args.nbar).parse()?,
    };
    let matrix = ScatteringMatrix::from_convention(s.convention, s.theta)?;

    let mut summary = String::new();
    let mut entries: Vec<serde_json::Value> = Vec::new();
    for &n in &n_list {
        let first: StateSpec = format!("fock:{n}").parse()?;
        let input = build_bipartite(&first, Some(&partner_spec), s.epsilon)?;
        let dist = output_distribution(&matrix, &input)?;
        let metric = dist.cnl_metric()?;

        let file_name = format!("figure1_{kind}_n{n}.{}", s.format.extension());
        let path = dir.join(&file_name);
        let content = match s.format {
            Format::Csv => dist.to_csv_string(),
            _ => {
                let mut text = dist.to_json_string();
                text.push('\n');
                text
            }
        };
        render::write_file(&path, &content)?;

        summary.push_str(&format!(
            "n={n} file={file_name} ratio={:.3e} central_nodal_line={}\n",
            metric.ratio,
            if metric.is_central_nodal_line() { "yes" } else { "no" }
        ));
        entries.push(serde_json::json!({
            "n": n,
            "file": file_name,
            "cutoff": dist.cutoff(),
            "truncation_mass": dist.truncation_mass(),
            "max_diagonal": metric.max_diagonal,
            "max_cell": metric.max_cell,
            "ratio": metric.ratio,
            "central_nodal_line": metric.is_central_nodal_line(),
        }));
    }

    let meta = serde_json::json!({
        "kind": kind,
        "nbar": args.nbar,
        "epsilon": s.epsilon,
        "theta": s.theta,
        "convention": s.convention.to_string(),
        "grids": entries,
    });
    let meta_name = format!("figure1_{kind}_meta.json");
    let mut meta_text = serde_json::to_string_pretty(&meta).expect("figure1 metadata JSON");
    meta_text.push('\n');
    render::write_file(&dir.join(&meta_name), &meta_text)?;
    summary.push_str(&format!("meta={meta_name}\n"));

    render::emit(None, &summary)
}

fn cmd_efficiency(args: EfficiencyArgs) -> Result<(), CliError> {
    let s = Settings::resolve(
        &args.common,
        Defaults {
            epsilon: DEFAULT_EPSILON,
            format: Format::Csv,
        },
    )?;
    let etas: Vec<f64> = parse_list(&args.etas, "eta list")?;
    let ns: Vec<usize> = parse_list(&args.ns, "n list")?;
    let dist = distribution_for(&args.in1, &args.in2, None, None, &s)?;
    let scan = coincidence_vs_eta(&dist, &etas, &ns)?;
    let content = match s.format {
        Format::Csv => scan.to_csv_string(),
        Format::Json => {
            let mut text = scan.to_json_string();
            text.push('\n');
            text
        }
        Format::Text => render::efficiency_text(&scan),
    };
    render::emit(s.out.as_deref(), &content)
}

fn cmd_conventions(args: ConventionsArgs) -> Result<(), CliError> {
    let s = Settings::resolve(
        &args.common,
        Defaults {
            epsilon: DEFAULT_EPSILON,
            format: Format::Csv,
        },
    )?;
    let mut magnitudes: Vec<(Convention, f64)> = Vec::new();
    for convention in Convention::ALL {
        let matrix = ScatteringMatrix::from_convention(convention, s.theta)?;
        let amp = matrix.transition_amplitude(args.n, args.m, args.p, args.q)?;
        magnitudes.push((convention, amp.norm()));
    }
    let max_dev = magnitudes
        .iter()
        .flat_map(|(_, a)| magnitudes.iter().map(move |(_, b)| (a - b).abs()))
        .fold(0.0f64, f64::max);

    let content = match s.format {
        Format::Csv => {
            let mut out = String::from("convention,magnitude\n");
            for (convention, mag) in &magnitudes {
                out.push_str(&format!("{convention},{mag:.16e}\n"));
            }
            out
        }
        Format::Json => {
            let doc = serde_json::json!({
                "n": args.n,
                "m": args.m,
                "p": args.p,
                "q": args.q,
                "theta": s.theta,
                "magnitudes": magnitudes
                    .iter()
                    .map(|(c, mag)| serde_json::json!({
                        "convention": c.to_string(),
                        "magnitude": mag,
                    }))
                    .collect::<Vec<_>>(),
                "max_pairwise_deviation": max_dev,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("conventions JSON");
            text.push('\n');
            text
        }
        Format::Text => {
            let mut out = format!(
                "|A({}, {} -> {}, {})| at theta = {}\n",
                args.n, args.m, args.p, args.q, s.theta
            );
            for (convention, mag) in &magnitudes {
                out.push_str(&format!("{:>18}  {mag:.16e}\n", convention.to_string()));
            }
            out.push_str(&format!("max pairwise deviation: {max_dev:.3e}\n"));
            out
        }
    };
    render::emit(s.out.as_deref(), &content)
}
