//! `blochlab`: band tables, density surfaces, barrier-probability reports and
//! a self-check for periodic biparabolic and Kronig-Penney potentials.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blochlab::bloch::anomaly_scan;
use blochlab::config::{GridConfig, OutputFormat, RunConfig};
use blochlab::dispersion::{check_parity_rule, find_bands, top_sub_barrier_band, Band};
use blochlab::export::{bands_json, companion_path, fmt_g12, write_bands_csv, write_barrier_csv, write_surface_csv};
use blochlab::potential::{make_biparabolic, PotentialKind, PotentialSpec, DEFAULT_BARRIER_FRACTION};
use blochlab::report::anomaly_report;
use blochlab::selfcheck::{run_selfcheck, SelfcheckOptions};
use blochlab::{BlochError, Mode};

const EXIT_CONFIG: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_SELFCHECK: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "blochlab",
    version,
    about = "Bloch bands and barrier probabilities in periodic potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find the allowed bands and write them as a table.
    Bands(Common),
    /// Write |Psi|^2 over one band and one period, plus the barrier probability.
    Surface {
        #[command(flatten)]
        common: Common,
        /// Band index, or `top` for the highest band below the barrier top.
        #[arg(long, default_value = "top")]
        band: BandChoice,
    },
    /// Report how the barrier probability changes across every band.
    Anomaly {
        #[command(flatten)]
        common: Common,
        /// Add the matching Kronig-Penney report.
        #[arg(long)]
        compare_kp: bool,
    },
    /// Run the built-in invariant suite.
    Selfcheck {
        #[arg(long)]
        quick: bool,
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PotentialArg {
    Biparabolic,
    Kp,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Neartop,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum BandChoice {
    Top,
    Index(usize),
}

impl std::str::FromStr for BandChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("top") {
            return Ok(Self::Top);
        }
        s.parse()
            .map(Self::Index)
            .map_err(|_| format!("expected a band index or `top`, got {s:?}"))
    }
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    potential: Option<PotentialArg>,
    /// Potential height in recoil units.
    #[arg(long = "V", value_name = "REAL")]
    v: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Upper end of the band scan.
    #[arg(long, value_name = "REAL")]
    scan_max: Option<f64>,
    /// Energies by z points, e.g. 20x200.
    #[arg(long, value_name = "NxM")]
    grid: Option<String>,
    /// Output file, `-` for standard output.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

enum Failure {
    Config(String),
    Compute(BlochError),
    Selfcheck,
}

impl From<BlochError> for Failure {
    fn from(e: BlochError) -> Self {
        Failure::Compute(e)
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn build_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            RunConfig::from_json(&text).map_err(config_err)?
        }
        None => RunConfig::for_potential(make_biparabolic(1.4494).map_err(config_err)?),
    };
    let old_v = cfg.potential.v;
    let old_kind = cfg.potential.kind;
    let kind = match c.potential {
        Some(PotentialArg::Biparabolic) => PotentialKind::Biparabolic,
        Some(PotentialArg::Kp) => PotentialKind::KronigPenney,
        None => cfg.potential.kind,
    };
    let v = c.v.unwrap_or(cfg.potential.v);
    if kind != old_kind || v != old_v {
        cfg.potential = match kind {
            PotentialKind::Biparabolic => make_biparabolic(v),
            PotentialKind::KronigPenney => {
                let f = if old_kind == PotentialKind::KronigPenney {
                    cfg.potential.barrier_fraction
                } else {
                    DEFAULT_BARRIER_FRACTION
                };
                PotentialSpec::kronig_penney(v, f)
            }
        }
        .map_err(config_err)?;
        if v != old_v {
            cfg.rescale_scan();
        }
    }
    if let Some(m) = c.mode {
        cfg.mode = match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Neartop => Mode::NearTop,
        };
    }
    if let Some(e) = c.scan_max {
        cfg.scan.e_max = e;
    }
    if let Some(g) = &c.grid {
        cfg.grid = g.parse::<GridConfig>().map_err(config_err)?;
    }
    if let Some(o) = &c.out {
        cfg.output_path = o.clone();
    }
    if let Some(f) = c.format {
        cfg.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn open_output(path: &str) -> Result<Box<dyn Write>, Failure> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).map_err(|e| config_err(format!("{path}: {e}")))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn write_all(path: &str, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let mut w = open_output(path)?;
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| config_err(format!("{path}: {e}")))
}

fn scan(cfg: &RunConfig) -> Result<Vec<Band<f64>>, Failure> {
    Ok(find_bands(&cfg.potential, cfg.mode, cfg.scan.e_max, cfg.scan.de)?)
}

fn cmd_bands(cfg: &RunConfig) -> Result<(), Failure> {
    let bands = scan(cfg)?;
    write_all(&cfg.output_path, |w| match cfg.format {
        OutputFormat::Json => writeln!(w, "{}", bands_json(&bands)),
        OutputFormat::Csv => write_bands_csv(&bands, w),
    })?;
    let v = cfg.potential.v;
    let top = top_sub_barrier_band(&bands, v);
    for b in &bands {
        let mut line = format!(
            "band {}: [{}, {}] {}/{}",
            b.n,
            fmt_g12(b.e_left),
            fmt_g12(b.e_right),
            b.left_cond,
            b.right_cond
        );
        if top.as_ref() == Some(b) {
            line.push_str(&format!("  top inner band, E_max - V = {}", fmt_g12(b.e_right - v)));
        }
        eprintln!("{line}");
    }
    if let Some(widest) = bands.windows(2).map(|w| w[1].e_left - w[0].e_right).reduce(f64::max) {
        eprintln!("widest gap: {}", fmt_g12(widest));
    }
    if let Err(e) = check_parity_rule(&bands) {
        eprintln!("note: {e}");
    }
    Ok(())
}

fn pick_band(bands: &[Band<f64>], choice: &BandChoice, v: f64) -> Result<Band<f64>, Failure> {
    let found = match choice {
        BandChoice::Top => top_sub_barrier_band(bands, v),
        BandChoice::Index(n) => bands.iter().find(|b| b.n == *n).copied(),
    };
    found.ok_or_else(|| {
        let have: Vec<String> = bands.iter().map(|b| b.n.to_string()).collect();
        Failure::Compute(BlochError::Scan(format!(
            "band {choice:?} not found in scan range (bands: {})",
            have.join(", ")
        )))
    })
}

fn cmd_surface(cfg: &RunConfig, choice: &BandChoice) -> Result<(), Failure> {
    let bands = scan(cfg)?;
    let band = pick_band(&bands, choice, cfg.potential.v)?;
    let s = anomaly_scan(&cfg.potential, &band, cfg.grid.n_energies, cfg.grid.n_z, cfg.mode)?;
    match cfg.format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "band": band,
                "energies": s.energies,
                "z_grid": s.z_grid,
                "density": s.density,
                "barrier_prob": s.barrier_prob,
            });
            write_all(&cfg.output_path, |w| {
                writeln!(w, "{}", serde_json::to_string_pretty(&doc).unwrap())
            })?;
        }
        OutputFormat::Csv if cfg.output_path == "-" => {
            write_all("-", |w| {
                write_surface_csv(&s, &mut *w)?;
                writeln!(w)?;
                write_barrier_csv(&s, w)
            })?;
        }
        OutputFormat::Csv => {
            write_all(&cfg.output_path, |w| write_surface_csv(&s, w))?;
            let side = companion_path(Path::new(&cfg.output_path));
            write_all(&side.to_string_lossy(), |w| write_barrier_csv(&s, w))?;
        }
    }
    eprintln!(
        "band {} [{}, {}]: barrier probability {} -> {}, ratio {}, decreasing: {}",
        band.n,
        fmt_g12(band.e_left),
        fmt_g12(band.e_right),
        fmt_g12(s.barrier_prob[0]),
        fmt_g12(*s.barrier_prob.last().unwrap()),
        fmt_g12(s.anomaly_ratio()),
        s.barrier_prob_decreasing()
    );
    Ok(())
}

fn cmd_anomaly(cfg: &RunConfig, compare_kp: bool) -> Result<(), Failure> {
    let bands = scan(cfg)?;
    let report = anomaly_report(&cfg.potential, &bands, cfg.grid.n_energies, cfg.mode)?;
    let doc = if compare_kp {
        let kp = PotentialSpec::kronig_penney(cfg.potential.v, DEFAULT_BARRIER_FRACTION).map_err(config_err)?;
        let kp_bands = find_bands(&kp, Mode::Exact, cfg.scan.e_max, cfg.scan.de)?;
        let kp_report = anomaly_report(&kp, &kp_bands, cfg.grid.n_energies, Mode::Exact)?;
        serde_json::json!({ "primary": report, "kronig_penney": kp_report })
    } else {
        serde_json::to_value(&report).unwrap()
    };
    write_all(&cfg.output_path, |w| {
        writeln!(w, "{}", serde_json::to_string_pretty(&doc).unwrap())
    })?;
    for e in &report.bands {
        eprintln!(
            "band {}: ratio {} monotone {}",
            e.n,
            fmt_g12(e.anomaly_ratio),
            e.monotone
        );
    }
    Ok(())
}

fn cmd_selfcheck(quick: bool, inject_sign_error: bool) -> Result<(), Failure> {
    let report = run_selfcheck(SelfcheckOptions {
        quick,
        inject_sign_error,
    });
    print!("{report}");
    if report.passed() {
        println!("selfcheck passed");
        Ok(())
    } else {
        println!("selfcheck FAILED");
        Err(Failure::Selfcheck)
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("BLOCHLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config_err(format!("BLOCHLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(config_err)
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_threads()?;
    match &cli.command {
        Command::Bands(c) => cmd_bands(&build_config(c)?),
        Command::Surface { common, band } => cmd_surface(&build_config(common)?, band),
        Command::Anomaly { common, compare_kp } => cmd_anomaly(&build_config(common)?, *compare_kp),
        Command::Selfcheck {
            quick,
            inject_sign_error,
        } => cmd_selfcheck(*quick, *inject_sign_error),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_COMPUTE)
        }
        Err(Failure::Selfcheck) => ExitCode::from(EXIT_SELFCHECK),
    }
}
