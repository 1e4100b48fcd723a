use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbpsat_cli::dispersion::{run_dispersion, DispersionMode, DispersionOptions};
use sbpsat_cli::postprocess::{self, Table};
use sbpsat_cli::scenario::parse_scenario_file;
use sbpsat_cli::simulate::{simulate, SimulateOptions};
use sbpsat_cli::verify::{format_table, run_verify, VerifyOptions};
use sbpsat_cli::{EXIT_FAILED, EXIT_OK, EXIT_USAGE, OUTPUT_DIR_ENV};
use sbpsat_core::diagnostics::Window;
use sbpsat_core::io::write_text;

#[derive(Parser)]
#[command(name = "sbpsat", version, about = "SBP-SAT FDTD solver for the 3D Maxwell equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the operator, energy-neutrality and oracle self-checks.
    Verify {
        /// Grid sizes for the SBP operator checks.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Corrupt one operator entry and one SAT coefficient.
        #[arg(long)]
        perturb: bool,
    },
    /// Run a scenario file.
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "sbpsat-out")]
        output: PathBuf,
        #[arg(long)]
        steps: Option<u64>,
        /// Print progress every this many steps.
        #[arg(long)]
        progress: Option<u64>,
    },
    /// Numerical dispersion of the periodic scheme.
    Dispersion(DispersionArgs),
    /// Derived quantities from files written by `simulate`.
    #[command(subcommand)]
    Postprocess(Post),
}

#[derive(Args)]
struct DispersionArgs {
    #[arg(long, default_value_t = sbpsat_core::dispersion::DEFAULT_CELLS)]
    cells: usize,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long, default_value_t = 0.99)]
    dt_factor: f64,
    #[arg(long, default_value_t = sbpsat_core::dispersion::DEFAULT_DIMENSION_CAP)]
    cap: usize,
    /// Normal-incidence k0 h / 2 pi values.
    #[arg(long, value_delimiter = ',', conflicts_with = "scan")]
    ratios: Vec<f64>,
    /// Angle scan instead of a sweep.
    #[arg(long)]
    scan: bool,
    #[arg(long, default_value_t = 10)]
    thetas: usize,
    #[arg(long, default_value_t = 10)]
    phis: usize,
    /// k0 h / 2 pi for the angle scan.
    #[arg(long, default_value_t = 0.05)]
    ratio: f64,
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = "sbpsat-out")]
    output: PathBuf,
}

#[derive(Subcommand)]
enum Post {
    /// Spectrum and peaks of a probe CSV.
    Spectrum {
        input: PathBuf,
        #[arg(long, default_value = "none")]
        window: String,
        #[arg(long)]
        remove_mean: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// S11 and S21 from incident, reflected and transmitted power CSVs.
    Sparams {
        incident: PathBuf,
        reflected: PathBuf,
        transmitted: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        floor: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// SAR per cell from a scenario and its `peak_e_sq.csv`.
    Sar {
        scenario: PathBuf,
        peaks: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILED
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(cmd: Command) -> anyhow::Result<i32> {
    match cmd {
        Command::Verify { sizes, perturb } => {
            let rows = run_verify(&VerifyOptions { sizes, perturb })?;
            print!("{}", format_table(&rows));
            let failed: Vec<_> = rows.iter().filter(|r| !r.passed()).collect();
            if failed.is_empty() {
                println!("all checks passed");
                Ok(EXIT_OK)
            } else {
                for r in &failed {
                    println!("FAILED {} ({})", r.suite, r.case);
                }
                Ok(EXIT_FAILED)
            }
        }
        Command::Simulate { scenario, threads, output, steps, progress } => {
            let sc = match parse_scenario_file(&scenario) {
                Ok(sc) => sc,
                Err(errs) => {
                    eprintln!("{}: invalid scenario", scenario.display());
                    eprintln!("{errs}");
                    return Ok(EXIT_USAGE);
                }
            };
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
            let opts = SimulateOptions { output, steps, progress };
            let summary = pool.install(|| simulate(&sc, &opts))?;
            println!("dt = {:e} s, {} steps", summary.dt, summary.steps_run);
            for (name, peaks) in &summary.peaks {
                if let Some(p) = peaks.iter().min_by(|a, b| a.frequency.total_cmp(&b.frequency)) {
                    println!("probe {name}: lowest peak {:.6e} Hz", p.frequency);
                }
            }
            println!("manifest: {}", summary.manifest.display());
            if let Some(s) = summary.diverged_at {
                eprintln!("non-finite field values at step {s}; outputs are partial");
                return Ok(EXIT_FAILED);
            }
            Ok(EXIT_OK)
        }
        Command::Dispersion(a) => {
            let mode = if a.scan {
                DispersionMode::Scan { thetas: a.thetas, phis: a.phis, ratio: a.ratio }
            } else if a.ratios.is_empty() {
                DispersionOptions::default().mode
            } else {
                DispersionMode::Sweep(a.ratios)
            };
            let name = if a.scan { "scan.csv" } else { "sweep.csv" };
            let out = run_dispersion(&DispersionOptions {
                cells: a.cells,
                h: a.h,
                dt_factor: a.dt_factor,
                cap: a.cap,
                mode,
            })?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            let path = a.output.join(name);
            write_text(&path, &out.csv)?;
            println!("{} rows, max |lambda| - 1 = {:e}: {}", out.rows, out.max_growth, path.display());
            Ok(EXIT_OK)
        }
        Command::Postprocess(p) => postprocess_cmd(p),
    }
}

fn write(path: &Path, contents: &str) -> anyhow::Result<i32> {
    write_text(path, contents)?;
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn postprocess_cmd(p: Post) -> anyhow::Result<i32> {
    match p {
        Post::Spectrum { input, window, remove_mean, output } => {
            let Some(window) = Window::parse(&window) else {
                eprintln!("unknown window {window:?} (expected none or hann)");
                return Ok(EXIT_USAGE);
            };
            let (csv, peaks) = postprocess::probe_spectrum(&Table::read(&input)?, window, remove_mean)?;
            for pk in &peaks {
                println!("peak {:.6e} Hz  magnitude {:.3e}", pk.frequency, pk.magnitude);
            }
            write(&output, &csv)
        }
        Post::Sparams { incident, reflected, transmitted, floor, output } => {
            let csv = postprocess::s_parameters(
                &Table::read(&incident)?,
                &Table::read(&reflected)?,
                &Table::read(&transmitted)?,
                floor,
            )?;
            write(&output, &csv)
        }
        Post::Sar { scenario, peaks, output } => {
            let sc = match parse_scenario_file(&scenario) {
                Ok(sc) => sc,
                Err(errs) => {
                    eprintln!("{}: invalid scenario\n{errs}", scenario.display());
                    return Ok(EXIT_USAGE);
                }
            };
            let csv = postprocess::sar_from_peaks(&sc.material_grid()?, &Table::read(&peaks)?)?;
            write(&output, &csv)
        }
    }
}
