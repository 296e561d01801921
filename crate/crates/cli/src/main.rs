use clap::{Args, Parser, Subcommand};
use qillum::fock::{Transmitter, TruncationSpec};
use qillum::receivers::VarianceConvention;
use qillum_cli::cache::{cached_qcb, sidecar_path, QcbCache};
use qillum_cli::curves::compute_curves;
use qillum_cli::exponents::exponent_table;
use qillum_cli::output::{curves_csv, curves_json, emit, json_text, params_json};
use qillum_cli::plot::curves_svg;
use qillum_cli::validate::{run_validation, Level, ValidateOptions};
use qillum_cli::{CliError, Curve, Format, Result, RunConfig, EXIT_ERROR, EXIT_OK, EXIT_VALIDATION_FAILED};
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "qillum", version, about = "Quantum illumination receiver curves, exponents and Chernoff bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error probability versus M for the selected receivers.
    Curves(RunArgs),
    /// Table of per-mode error exponents.
    Exponents {
        #[command(flatten)]
        run: RunArgs,
        /// Also run the Fock-space oracle for both QCB exponents.
        #[arg(long)]
        numeric: bool,
    },
    /// Fock-space QCB for one or both transmitters, with truncation history.
    Qcb {
        #[command(flatten)]
        run: RunArgs,
        /// tmsv, coherent or both.
        #[arg(long, default_value = "both")]
        transmitter: String,
    },
    /// Run the self-consistency suite.
    Validate {
        /// quick or full.
        #[arg(default_value = "quick")]
        level: Level,
        #[command(flatten)]
        run: RunArgs,
        /// Use the uncorrected H0 variance of the phase-conjugate receiver.
        #[arg(long)]
        inject_sigma0_regression: bool,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    ns: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nb: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    m_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    m_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Comma-separated curve names, e.g. qcb_tmsv,pc_gauss,hom.
    #[arg(long, value_delimiter = ',')]
    receivers: Option<Vec<Curve>>,
    /// Explicit OPA gain G >= 1.
    #[arg(long, allow_negative_numbers = true)]
    gain: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<Format>,
    /// Also write an SVG plot (curves only).
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Starting Fock dims, comma-separated (return, idler, bath).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, allow_negative_numbers = true)]
    tail_tol: Option<f64>,
    #[arg(long)]
    max_levels: Option<usize>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        set!(ns => n_s, nb => n_b, kappa => kappa, m_min => m_min, m_max => m_max, points => points,
             receivers => receivers, seed => seed, format => format, max_levels => max_levels);
        if self.gain.is_some() {
            cfg.gain = self.gain;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.svg.is_some() {
            cfg.svg = self.svg;
        }
        if let Some(d) = self.dims {
            cfg.truncation = TruncationSpec {
                dims: Some(d),
                ..cfg.truncation
            };
        }
        if let Some(t) = self.tail_tol {
            cfg.truncation.tail_tol = t;
        }
        Ok(cfg)
    }
}

fn with_cache<T>(out: Option<&Path>, f: impl FnOnce(Option<&mut QcbCache>) -> Result<T>) -> Result<T> {
    match out {
        Some(path) => {
            let side = sidecar_path(path);
            let mut cache = QcbCache::load(&side)?;
            let before = cache.clone();
            let value = f(Some(&mut cache))?;
            if cache != before {
                cache.save(&side)?;
            }
            Ok(value)
        }
        None => f(None),
    }
}

fn curves(cfg: RunConfig) -> Result<i32> {
    let table = with_cache(cfg.out.as_deref(), |cache| compute_curves(&cfg, cache))?;
    let text = match cfg.format {
        Format::Csv => curves_csv(&table),
        Format::Json => json_text(&curves_json(&cfg, &table)),
    };
    emit(cfg.out.as_deref(), &text)?;
    if let Some(svg) = &cfg.svg {
        std::fs::write(svg, curves_svg(&table)).map_err(|e| CliError::io(svg, e))?;
    }
    Ok(EXIT_OK)
}

fn exponents(cfg: RunConfig, numeric: bool) -> Result<i32> {
    let table = with_cache(cfg.out.as_deref(), |cache| exponent_table(&cfg, numeric, cache))?;
    emit(cfg.out.as_deref(), &json_text(&serde_json::to_value(table).expect("table serializes")))?;
    Ok(EXIT_OK)
}

fn qcb(cfg: RunConfig, which: &str) -> Result<i32> {
    cfg.validate()?;
    let transmitters = match which {
        "tmsv" => vec![Transmitter::Tmsv],
        "coherent" => vec![Transmitter::Coherent],
        "both" => vec![Transmitter::Tmsv, Transmitter::Coherent],
        other => return Err(CliError::Config(format!("unknown transmitter '{other}'"))),
    };
    let p = cfg.params(1)?;
    let results = with_cache(cfg.out.as_deref(), |mut cache| {
        transmitters
            .iter()
            .map(|&t| cached_qcb(cache.as_deref_mut(), &p, t, &cfg.truncation, cfg.max_levels))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut doc = json!({ "params": params_json(&cfg), "truncation": cfg.truncation });
    for r in &results {
        let key = serde_json::to_value(r.transmitter).expect("transmitter serializes");
        doc[key.as_str().expect("unit variant")] = serde_json::to_value(r).expect("qcb serializes");
    }
    if let [q, c] = results.as_slice() {
        doc["ratio"] = json!(q.exponent() / c.exponent());
    }
    emit(cfg.out.as_deref(), &json_text(&doc))?;
    Ok(EXIT_OK)
}

fn validate(cfg: RunConfig, level: Level, inject: bool) -> Result<i32> {
    let opts = ValidateOptions {
        level,
        convention: if inject {
            VarianceConvention::AsPrinted
        } else {
            VarianceConvention::Corrected
        },
        seed: cfg.seed,
        truncation: cfg.truncation.clone(),
        max_levels: cfg.max_levels,
    };
    let report = run_validation(&opts)?;
    let text = match cfg.format {
        Format::Csv => report.text(),
        Format::Json => json_text(&serde_json::to_value(&report).expect("report serializes")),
    };
    emit(cfg.out.as_deref(), &text)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VALIDATION_FAILED })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Curves(args) => curves(args.resolve()?),
        Command::Exponents { run, numeric } => exponents(run.resolve()?, numeric),
        Command::Qcb { run, transmitter } => qcb(run.resolve()?, &transmitter),
        Command::Validate {
            level,
            run,
            inject_sigma0_regression,
        } => validate(run.resolve()?, level, inject_sigma0_regression),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            std::process::exit(EXIT_OK);
        }
        Err(e) => {
            let err = CliError::Config(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            std::process::exit(EXIT_ERROR);
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("{}", e.to_json());
        EXIT_ERROR
    });
    std::process::exit(code);
}
