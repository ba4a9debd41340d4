use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extropy::distributions::{
    closed_form_relative_exponential, crh_past_measures, AtomConvention, Family, Model, SeededSampler,
};
use extropy::dynamic::{BoundHypotheses, DynamicMeasure, TimeGrid};
use extropy::estimation::{
    estimate_relative_extropy_with, mc_study_table, Boundary, EstimatorOptions, McStudyConfig, DEFAULT_REPS,
    DEFAULT_SEED,
};
use extropy::measures::{extropy, extropy_divergence, extropy_inaccuracy, relative_extropy};
use extropy::{make_model, MeasureReport, QuadratureSpec};
use serde::Serialize;
use serde_json::json;

use crate::dataset::{load_csv, Filter, Grouping, QuantileGroupSpec, DEFAULT_CUTS};
use crate::error::{CliError, Result};
use crate::matrix::pairwise_matrix;
use crate::report::{heatmap_svg, matrix_csv, study_csv, write_file, Format, Report};
use crate::verify::run_verify;

#[derive(Debug, Parser)]
#[command(
    name = "extropy",
    version,
    about = "Extropy measures, kernel estimates and simulation studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Static measures between two families, and dynamic ones at --t.
    Measure(MeasureArgs),
    /// Estimate d(f,g) from the two groups of a CSV file.
    Estimate(EstimateArgs),
    /// Monte-Carlo bias/MSE study of the estimator.
    Simulate(SimulateArgs),
    /// Pairwise estimated relative extropy between groups of a CSV file.
    Groups(GroupsArgs),
    /// Run the identity, ODE, bound and ordering checks on a time grid.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for report files; without it the JSON report goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Files to write into --out (comma-separated).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// e.g. exp:1, weibull:1.5,2, crh:1,2[,atom], uniform:0,1
    #[arg(long)]
    pub family_x: Family,
    #[arg(long)]
    pub family_y: Family,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Time point for the residual and past measures.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value = "ac")]
    pub atom_convention: AtomConvention,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    pub input: PathBuf,
    #[arg(long)]
    pub value_col: String,
    /// Column to group by; with --quantiles, the numeric column to cut.
    #[arg(long)]
    pub group_col: Option<String>,
    /// Cut probabilities for quantile groups, e.g. 0.2,0.4,0.6,0.8.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub quantiles: Option<Vec<f64>>,
    /// Keep only rows where column=value.
    #[arg(long)]
    pub filter: Option<Filter>,
    #[arg(long, value_enum, default_value = "off")]
    pub boundary_reflect: OnOff,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GroupsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "50,75,100")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Truth for bias and MSE; computed by quadrature when absent.
    #[arg(long)]
    pub true_value: Option<f64>,
    #[arg(long, value_enum, default_value = "off")]
    pub boundary_reflect: OnOff,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Time grid as start:end:points.
    #[arg(long, default_value = "0.1:2:10")]
    pub grid: String,
    /// Assert that d_r is nondecreasing on the grid.
    #[arg(long)]
    pub assume_nondecreasing: bool,
    /// Assert X <=_hr Y with a DFR member.
    #[arg(long)]
    pub assume_hr_dfr: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Rendered outputs of a command, keyed by file name.
pub struct Outputs {
    pub json: String,
    pub files: Vec<(&'static str, Format, String)>,
    /// Error to report after the outputs are written.
    pub deferred: Option<CliError>,
}

impl Outputs {
    fn json_only(json: String) -> Self {
        Self {
            json,
            files: Vec::new(),
            deferred: None,
        }
    }

    /// Writes the selected files into `out`, or prints the JSON report.
    /// Returns the paths written.
    pub fn emit(&self, output: &OutputArgs, default_formats: &[Format]) -> Result<Vec<PathBuf>> {
        let Some(dir) = &output.out else {
            print!("{}", self.json);
            return Ok(Vec::new());
        };
        let formats = if output.format.is_empty() {
            default_formats
        } else {
            &output.format
        };
        let mut written = Vec::new();
        if formats.contains(&Format::Json) {
            written.push(write_file(dir, "report.json", &self.json)?);
        }
        for (name, fmt, contents) in &self.files {
            if formats.contains(fmt) {
                written.push(write_file(dir, name, contents)?);
            }
        }
        Ok(written)
    }
}

fn models(pair: &PairArgs) -> Result<(Model, Model)> {
    Ok((make_model(pair.family_x)?, make_model(pair.family_y)?))
}

fn estimator_options(reflect: OnOff) -> EstimatorOptions {
    EstimatorOptions {
        boundary: if reflect == OnOff::On {
            Boundary::Reflect
        } else {
            Boundary::Full
        },
        ..Default::default()
    }
}

fn grouping(data: &DataArgs) -> Result<Grouping> {
    match (&data.quantiles, &data.group_col) {
        (Some(q), col) => {
            let probs = if q.is_empty() { DEFAULT_CUTS.to_vec() } else { q.clone() };
            let column = col.clone().unwrap_or_else(|| data.value_col.clone());
            Ok(Grouping::Quantiles(QuantileGroupSpec::new(column, probs)?))
        }
        (None, Some(col)) => Ok(Grouping::Column { column: col.clone() }),
        (None, None) => Err(CliError::Input("give --group-col, --quantiles, or both".into())),
    }
}

pub fn measure(args: &MeasureArgs) -> Result<Outputs> {
    let (x, y) = models(&args.pair)?;
    let q = QuadratureSpec::default();
    let mut static_measures: BTreeMap<&str, MeasureReport> = BTreeMap::new();
    static_measures.insert("extropy_x", extropy(&x, &q)?);
    static_measures.insert("extropy_y", extropy(&y, &q)?);
    static_measures.insert("inaccuracy", extropy_inaccuracy(&x, &y, &q)?);
    static_measures.insert("divergence_fg", extropy_divergence(&x, &y, &q)?);
    static_measures.insert("divergence_gf", extropy_divergence(&y, &x, &q)?);
    static_measures.insert("relative", relative_extropy(&x, &y, &q)?);

    let mut dynamic = serde_json::Value::Null;
    if let Some(t) = args.t {
        let mut values = BTreeMap::new();
        let mut unavailable = BTreeMap::new();
        for m in DynamicMeasure::ALL {
            let key = serde_json::to_value(m)
                .expect("enum serializes")
                .as_str()
                .unwrap_or_default()
                .to_string();
            match m.evaluate(&x, &y, t, &q) {
                Ok(r) => {
                    values.insert(key, r);
                }
                Err(e) => {
                    unavailable.insert(key, e.to_string());
                }
            }
        }
        dynamic = json!({ "t": t, "values": values, "unavailable": unavailable });
    }

    let mut closed_form = serde_json::Map::new();
    if let (Family::Exponential { rate: a }, Family::Exponential { rate: b }) = (args.pair.family_x, args.pair.family_y)
    {
        closed_form.insert("relative".into(), json!(closed_form_relative_exponential(a, b)?));
    }
    if let (Some(t), Model::ConstantReversedHazard(cx), Model::ConstantReversedHazard(cy)) = (args.t, &x, &y) {
        let c = crh_past_measures(cx, cy, t, args.atom_convention)?;
        closed_form.insert(
            "constant_reversed_hazard_past".into(),
            serde_json::to_value(c).expect("serializes"),
        );
    }

    let report = Report::new(
        "measure",
        json!({
            "family_x": args.pair.family_x.to_string(),
            "family_y": args.pair.family_y.to_string(),
            "t": args.t,
            "atom_convention": args.atom_convention,
            "quadrature": q,
        }),
        json!({ "static": static_measures, "dynamic": dynamic, "closed_form": closed_form }),
    );
    Ok(Outputs::json_only(report.to_json()))
}

pub fn estimate(args: &EstimateArgs) -> Result<Outputs> {
    let ds = load_csv(
        &args.data.input,
        &args.data.value_col,
        &grouping(&args.data)?,
        args.data.filter.as_ref(),
    )?;
    if ds.groups.len() != 2 {
        return Err(CliError::Input(format!(
            "estimate needs exactly 2 groups, found {}",
            ds.groups.len()
        )));
    }
    let opts = estimator_options(args.data.boundary_reflect);
    let (gx, gy) = (&ds.groups[0], &ds.groups[1]);
    let e = estimate_relative_extropy_with(&gx.values, &gy.values, &opts).map_err(|source| CliError::Pair {
        a: gx.label.clone(),
        b: gy.label.clone(),
        source,
    })?;
    let report = Report::new(
        "estimate",
        json!({ "provenance": ds.provenance, "boundary_reflect": args.data.boundary_reflect, "estimator": opts }),
        json!({
            "x": { "label": gx.label, "n": gx.values.len() },
            "y": { "label": gy.label, "n": gy.values.len() },
            "estimate": e,
        }),
    );
    Ok(Outputs::json_only(report.to_json()))
}

pub fn groups(args: &GroupsArgs) -> Result<Outputs> {
    let ds = load_csv(
        &args.data.input,
        &args.data.value_col,
        &grouping(&args.data)?,
        args.data.filter.as_ref(),
    )?;
    let opts = estimator_options(args.data.boundary_reflect);
    let m = pairwise_matrix(&ds, &opts)?;
    let report = Report::new(
        "groups",
        json!({ "provenance": ds.provenance, "boundary_reflect": args.data.boundary_reflect, "estimator": opts }),
        &m,
    );
    let title = format!("Relative extropy of {} between groups", args.data.value_col);
    Ok(Outputs {
        json: report.to_json(),
        files: vec![
            ("matrix.csv", Format::Csv, matrix_csv(&m)),
            ("heatmap.svg", Format::Svg, heatmap_svg(&m, &title)),
        ],
        deferred: None,
    })
}

pub fn simulate(args: &SimulateArgs) -> Result<Outputs> {
    let (x, y) = models(&args.pair)?;
    let true_value = match args.true_value {
        Some(v) => v,
        None => relative_extropy(&x, &y, &QuadratureSpec::default())?.value,
    };
    let base = McStudyConfig {
        family_x: args.pair.family_x,
        family_y: args.pair.family_y,
        n: args.n.first().copied().unwrap_or(0),
        reps: args.reps,
        seed: args.seed,
        true_value,
        options: estimator_options(args.boundary_reflect),
    };
    let rows = mc_study_table(&base, &args.n)?;
    let report = Report::new(
        "simulate",
        json!({
            "family_x": args.pair.family_x.to_string(),
            "family_y": args.pair.family_y.to_string(),
            "n": args.n,
            "reps": args.reps,
            "seed": args.seed,
            "rng": { "algorithm": SeededSampler::ALGORITHM, "streams": "replication r draws x from stream 2r and y from stream 2r+1" },
            "true_value": true_value,
            "true_value_source": if args.true_value.is_some() { "flag" } else { "quadrature" },
            "estimator": base.options,
        }),
        json!({ "rows": rows }),
    );
    Ok(Outputs {
        json: report.to_json(),
        files: vec![("study.csv", Format::Csv, study_csv(&rows))],
        deferred: None,
    })
}

pub fn parse_grid(s: &str) -> Result<TimeGrid> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Input(format!("grid must be start:end:points, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(TimeGrid::linspace(start, end, n)?)
}

pub fn verify(args: &VerifyArgs) -> Result<Outputs> {
    let (x, y) = models(&args.pair)?;
    let grid = parse_grid(&args.grid)?;
    let hypotheses = BoundHypotheses {
        nondecreasing_relative: args.assume_nondecreasing,
        hazard_ordered_dfr: args.assume_hr_dfr,
    };
    let q = QuadratureSpec::default();
    let r = run_verify(&x, &y, &grid, hypotheses, &q)?;
    let report = Report::new(
        "verify",
        json!({
            "family_x": args.pair.family_x.to_string(),
            "family_y": args.pair.family_y.to_string(),
            "grid": grid,
            "hypotheses": hypotheses,
        }),
        &r,
    );
    Ok(Outputs {
        json: report.to_json(),
        files: Vec::new(),
        deferred: r.outcome().err(),
    })
}

/// Runs a parsed command line, writing outputs. Returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let (outputs, output, defaults): (Outputs, &OutputArgs, &[Format]) = match &cli.command {
        Command::Measure(a) => (measure(a)?, &a.output, &[Format::Json]),
        Command::Estimate(a) => (estimate(a)?, &a.output, &[Format::Json]),
        Command::Simulate(a) => (simulate(a)?, &a.output, &[Format::Json, Format::Csv]),
        Command::Groups(a) => (groups(a)?, &a.output, &[Format::Json, Format::Csv, Format::Svg]),
        Command::Verify(a) => (verify(a)?, &a.output, &[Format::Json]),
    };
    let written = outputs.emit(output, defaults)?;
    match outputs.deferred {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

/// Convenience for tests: parse `args` (without the program name) and run.
pub fn run_args<I, S>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(std::iter::once("extropy".into()).chain(args.into_iter().map(Into::into)))
        .map_err(|e| CliError::Input(e.to_string()))?;
    run(&cli)
}
