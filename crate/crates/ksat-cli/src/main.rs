//! `ksat` — batch front end for the estimation library.
//!
//! Five commands: `estimate` (one sample from flags, or every row of a CSV),
//! `evaluate` (machine-readable error tables), `report` (the same tables for
//! humans), `scatter` (long-format plot data plus an SVG per model), and
//! `synth` (seeded synthetic corpus).
//!
//! Exit codes: 0 success (possibly with rejected rows reported on stderr),
//! 1 data or validation error, 2 usage error. All numeric work happens in
//! the library; this binary only parses arguments and formats output.

mod files;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ksat_core::cpxr::{CombinationSpace, Weighting};
use ksat_core::estimator::{evaluate_models, ClassicEstimator, CpxrEstimator, ModelSeries};
use ksat_core::ingest::{ingest_csv, IngestOptions, IngestResult};
use ksat_core::metrics::aggregate_report;
use ksat_core::soil::ValidationOptions;
use ksat_core::synth::{generate_synthetic, SynthConfig};
use ksat_core::{
    CpxrModel, EvalReport, JabroForm, KsatEstimator, ModelId, PhysicalConstants,
    SoilSample,
};

#[derive(Parser)]
#[command(
    name = "ksat",
    version,
    about = "Estimate and evaluate soil saturated hydraulic conductivity (cm/day)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate Ksat for one sample given by flags, or for every CSV row
    Estimate(EstimateArgs),
    /// Evaluate models against measured Ksat; write machine-readable tables
    Evaluate(EvaluateArgs),
    /// Evaluate models and print human-readable tables
    Report(ReportArgs),
    /// Export per-model (log10 measured, log10 estimated) data and SVG plots
    Scatter(ScatterArgs),
    /// Generate a seeded synthetic sample corpus
    Synth(SynthArgs),
}

/// Model selection and model-behavior flags, shared by every command that
/// runs estimators.
#[derive(Args)]
struct ModelArgs {
    /// Comma-separated model ids, or `all`
    #[arg(long, default_value = "all", value_name = "LIST")]
    models: String,

    /// Single model id (shorthand for --models with one entry)
    #[arg(long, value_name = "ID", conflicts_with = "models")]
    model: Option<String>,

    /// Use the Jabro (1992) formula exactly as printed (no 10^ correction).
    /// Audit flag: the printed form yields negative cm/day for fine soils.
    #[arg(long)]
    jabro_as_printed: bool,

    /// How the ensemble weights matching patterns
    #[arg(long, value_enum, default_value_t = WeightingArg::Arr)]
    weighting: WeightingArg,

    /// Space in which the ensemble averages matching local models
    #[arg(long, value_enum, default_value_t = SpaceArg::Log)]
    avg_space: SpaceArg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum WeightingArg {
    /// Proportional to each pattern's average residual reduction
    Arr,
    /// Equal weights
    Uniform,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    /// Average log10 predictions
    Log,
    /// Average conductivities themselves
    Linear,
}

/// Input-file flags shared by the dataset commands.
#[derive(Args)]
struct InputArgs {
    /// Input CSV in the canonical schema
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Tolerated |sand+silt+clay - 100|
    #[arg(long, default_value_t = 0.5, value_name = "REAL")]
    tolerance: f64,

    /// Rescale in-tolerance texture triples to sum to exactly 100
    #[arg(long)]
    renormalize: bool,

    /// Accept and skip columns outside the schema
    #[arg(long)]
    ignore_extra: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    models: ModelArgs,

    /// Input CSV; estimates are printed for every accepted row
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with_all = ["sand", "silt", "clay", "bd", "length", "diameter"]
    )]
    input: Option<PathBuf>,

    /// Sand content, mass percent
    #[arg(long, value_name = "PCT", required_unless_present = "input")]
    sand: Option<f64>,

    /// Silt content, mass percent
    #[arg(long, value_name = "PCT", required_unless_present = "input")]
    silt: Option<f64>,

    /// Clay content, mass percent
    #[arg(long, value_name = "PCT", required_unless_present = "input")]
    clay: Option<f64>,

    /// Dry bulk density, g/cm3
    #[arg(
        long,
        alias = "bulk-density",
        value_name = "G_CM3",
        required_unless_present = "input"
    )]
    bd: Option<f64>,

    /// Sample core height, cm (the ensemble model needs it)
    #[arg(long, alias = "height", value_name = "CM")]
    length: Option<f64>,

    /// Sample core internal diameter, cm (the ensemble model needs it)
    #[arg(long, value_name = "CM")]
    diameter: Option<f64>,

    /// Tolerated |sand+silt+clay - 100|
    #[arg(long, default_value_t = 0.5, value_name = "REAL")]
    tolerance: f64,

    /// Rescale an in-tolerance texture triple to sum to exactly 100
    #[arg(long)]
    renormalize: bool,

    /// Accept and skip columns outside the schema
    #[arg(long)]
    ignore_extra: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    models: ModelArgs,

    /// Directory for the report files
    #[arg(long, default_value = ".", value_name = "DIR")]
    output: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    models: ModelArgs,
}

#[derive(Args)]
struct ScatterArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    models: ModelArgs,

    /// Directory for scatter.csv and the per-model SVGs
    #[arg(long, default_value = ".", value_name = "DIR")]
    output: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator seed
    #[arg(long, default_value_t = 42, value_name = "INT")]
    seed: u64,

    /// Number of samples
    #[arg(long, default_value_t = 10_000, value_name = "INT",
          value_parser = clap::value_parser!(u32).range(1..))]
    count: u32,

    /// Directory for synthetic.csv
    #[arg(long, default_value = ".", value_name = "DIR")]
    output: PathBuf,
}

enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

fn data<E: std::error::Error + Send + Sync + 'static>(e: E) -> CliError {
    CliError::Data(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 for --help/--version.
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Report(args) => cmd_report(args),
        Command::Scatter(args) => cmd_scatter(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

impl ModelArgs {
    fn selection(&self) -> Result<Vec<ModelId>, CliError> {
        let spec = self.model.as_deref().unwrap_or(self.models.as_str());
        if spec == "all" {
            return Ok(ModelId::ALL.to_vec());
        }
        let mut selected = Vec::new();
        for name in spec.split(',').map(str::trim) {
            let model = ModelId::parse(name).ok_or_else(|| {
                let known: Vec<&str> = ModelId::ALL.iter().map(|m| m.id()).collect();
                CliError::Usage(format!(
                    "unknown model `{name}` (expected `all` or any of: {})",
                    known.join(", ")
                ))
            })?;
            if !selected.contains(&model) {
                selected.push(model);
            }
        }
        if selected.is_empty() {
            return Err(CliError::Usage("empty model list".into()));
        }
        Ok(selected)
    }

    fn jabro_form(&self) -> JabroForm {
        if self.jabro_as_printed {
            JabroForm::AsPrinted
        } else {
            JabroForm::CorrectedLog10
        }
    }

    fn weighting(&self) -> Weighting {
        match self.weighting {
            WeightingArg::Arr => Weighting::ArrProportional,
            WeightingArg::Uniform => Weighting::Uniform,
        }
    }

    fn space(&self) -> CombinationSpace {
        match self.avg_space {
            SpaceArg::Log => CombinationSpace::Log10,
            SpaceArg::Linear => CombinationSpace::Linear,
        }
    }

    fn estimators(
        &self,
        selection: &[ModelId],
        constants: PhysicalConstants,
    ) -> Vec<Box<dyn KsatEstimator<f64>>> {
        selection
            .iter()
            .map(|m| -> Box<dyn KsatEstimator<f64>> {
                match m {
                    ModelId::Classic(c) => Box::new(
                        ClassicEstimator::new(*c, constants).with_jabro_form(self.jabro_form()),
                    ),
                    ModelId::Cpxr => Box::new(
                        CpxrEstimator::new(CpxrModel::bundled(), constants)
                            .with_options(self.weighting(), self.space()),
                    ),
                }
            })
            .collect()
    }
}

/// Format with 6 significant digits; plain notation in the everyday range,
/// scientific outside it.
pub(crate) fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let selection = args.models.selection()?;
    let constants = PhysicalConstants::default();

    let bundled = CpxrModel::bundled();

    if let Some(path) = &args.input {
        let options = IngestOptions {
            tolerance: args.tolerance,
            renormalize: args.renormalize,
            require_measured: false,
            ignore_extra: args.ignore_extra,
        };
        let result = ingest_csv(path, &options).map_err(data)?;
        report_rejections(&result);
        if result.accepted.is_empty() {
            return Err(CliError::Data(anyhow::anyhow!(
                "{}: no usable rows",
                path.display()
            )));
        }
        for sample in &result.accepted {
            estimate_sample(
                sample,
                &selection,
                &args.models,
                &bundled,
                &constants,
                Some(&sample.id),
            )?;
        }
        return Ok(());
    }

    // Inline sample. clap guarantees the required flags are present.
    let sample = SoilSample {
        id: "sample".to_string(),
        source: "cli".to_string(),
        method: String::new(),
        sand_pct: args.sand.unwrap(),
        silt_pct: args.silt.unwrap(),
        clay_pct: args.clay.unwrap(),
        bulk_density: args.bd.unwrap(),
        height: args.length,
        diameter: args.diameter,
        ksat_measured: None,
    };
    let sample = sample
        .validate(&ValidationOptions {
            tolerance: args.tolerance,
            renormalize: args.renormalize,
        })
        .map_err(data)?;
    let printed = estimate_sample(&sample, &selection, &args.models, &bundled, &constants, None)?;
    if printed == 0 {
        return Err(CliError::Data(anyhow::anyhow!(
            "no selected model is applicable to this sample"
        )));
    }
    Ok(())
}

/// Print one line per applicable model; returns how many lines were printed.
/// Exclusions go to stderr.
fn estimate_sample(
    sample: &SoilSample,
    selection: &[ModelId],
    margs: &ModelArgs,
    bundled: &CpxrModel,
    constants: &PhysicalConstants,
    label: Option<&str>,
) -> Result<usize, CliError> {
    let prefix = label.map_or(String::new(), |l| format!("{l} "));
    let mut printed = 0;
    for model in selection {
        match model {
            ModelId::Classic(classic) => {
                let estimator =
                    ClassicEstimator::new(*classic, *constants).with_jabro_form(margs.jabro_form());
                if let Some(reason) = estimator.exclusion(sample) {
                    eprintln!("{prefix}{}: excluded: {reason}", classic.id());
                    continue;
                }
                let value = estimator.estimate(sample).map_err(data)?.cm_per_day();
                println!("{prefix}{} {} cm/day", classic.id(), sig6(value));
                printed += 1;
            }
            ModelId::Cpxr => {
                if sample.height.is_none() || sample.diameter.is_none() {
                    eprintln!("{prefix}cpxr: excluded: missing_dimension");
                    continue;
                }
                let (value, prediction) = bundled
                    .predict_ksat_with(sample, constants, margs.weighting(), margs.space())
                    .map_err(data)?;
                let patterns: Vec<String> = prediction
                    .trace
                    .iter()
                    .map(|t| t.pattern_id.to_string())
                    .collect();
                let weights: Vec<String> =
                    prediction.trace.iter().map(|t| sig6(t.weight)).collect();
                println!(
                    "{prefix}cpxr {} cm/day patterns=[{}] weights=[{}]",
                    sig6(value.cm_per_day()),
                    patterns.join(","),
                    weights.join(",")
                );
                printed += 1;
            }
        }
    }
    Ok(printed)
}

/// Ingest for evaluation (measured Ksat required), run the selected models,
/// and aggregate. Shared by `evaluate`, `report`, and `scatter`.
struct Evaluation {
    samples: Vec<SoilSample>,
    series: Vec<ModelSeries<f64>>,
    report: EvalReport,
}

fn run_evaluation(input: &InputArgs, margs: &ModelArgs) -> Result<Evaluation, CliError> {
    let selection = margs.selection()?;
    let options = IngestOptions {
        tolerance: input.tolerance,
        renormalize: input.renormalize,
        require_measured: true,
        ignore_extra: input.ignore_extra,
    };
    let result = ingest_csv(&input.input, &options).map_err(data)?;
    report_rejections(&result);
    if result.accepted.is_empty() {
        return Err(CliError::Data(anyhow::anyhow!(
            "{}: no usable rows",
            input.input.display()
        )));
    }

    let constants = PhysicalConstants::default();
    let estimators = margs.estimators(&selection, constants);
    let refs: Vec<&dyn KsatEstimator<f64>> = estimators.iter().map(|b| b.as_ref()).collect();
    let series = evaluate_models(&result.accepted, &refs).map_err(data)?;
    let report = aggregate_report(&series);
    Ok(Evaluation {
        samples: result.accepted,
        series,
        report,
    })
}

fn report_rejections(result: &IngestResult) {
    for r in &result.rejected {
        eprintln!("{}:{}: rejected: {}", result.path.display(), r.row, r.reason);
    }
    eprintln!(
        "{}: {} rows: {} accepted, {} rejected",
        result.path.display(),
        result.total_rows,
        result.accepted.len(),
        result.rejected.len()
    );
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let eval = run_evaluation(&args.input, &args.models)?;
    let written = files::write_report_files(&args.output, &eval.report, &eval.series)
        .map_err(CliError::Data)?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let eval = run_evaluation(&args.input, &args.models)?;
    let stdout = std::io::stdout();
    tables::print_report(&mut stdout.lock(), &eval.report, &eval.series, &eval.samples)
        .map_err(data)?;
    Ok(())
}

fn cmd_scatter(args: ScatterArgs) -> Result<(), CliError> {
    let eval = run_evaluation(&args.input, &args.models)?;
    let written =
        files::write_scatter_files(&args.output, &eval.series).map_err(CliError::Data)?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let config = SynthConfig {
        seed: args.seed,
        count: args.count as usize,
        ..SynthConfig::default()
    };
    let samples = generate_synthetic(&config).map_err(data)?;
    std::fs::create_dir_all(&args.output)
        .map_err(|e| CliError::Data(anyhow::anyhow!("cannot create {}: {e}", args.output.display())))?;
    let path = args.output.join("synthetic.csv");
    ksat_core::ingest::write_samples_file(&path, &samples).map_err(data)?;
    eprintln!("wrote {} ({} samples, seed {})", path.display(), samples.len(), args.seed);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(376.7), "376.700");
        assert_eq!(sig6(36.395271070150696), "36.3953");
        assert_eq!(sig6(2.1599799809879485), "2.15998");
        assert_eq!(sig6(4425.1251093772735), "4425.13");
        assert_eq!(sig6(-0.10034333188799371), "-0.100343");
        assert_eq!(sig6(0.030103), "0.0301030");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(1.23456789e8), "1.23457e8");
        assert_eq!(sig6(3.2e-7), "3.20000e-7");
    }
}
