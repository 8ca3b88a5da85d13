//! Subcommand definitions and their handlers.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use dctapprox::codec::{
    compress_image, psnr_for_csv, r_grid, sweep, write_curves_csv, write_detail_csv, BlockTransform, RetentionPolicy,
    SweepEntry,
};
use dctapprox::fmt::sig6;
use dctapprox::jam::build_scaled;
use dctapprox::kernel::require_feasible;
use dctapprox::metrics::{quality, MetricsReport, SignalModel, DEFAULT_RHO};
use dctapprox::params::{known_optima, ParamVector};
use dctapprox::pgm::GrayImage;
use dctapprox::search::{report_fields, run_search, SearchOptions};
use dctapprox::transform::OrthonormalTransform;

use crate::error::{sibling, CliError, WithPath};
use crate::report::report_tables;

#[derive(Debug, Parser)]
#[command(
    name = "dctapprox",
    version,
    about = "Low-complexity 8-point DCT approximations: build, score, search, scale, compress"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the orthonormal 8-point transform for a parameter vector as JSON.
    Gen(GenArgs),
    /// Score parameter vectors: metrics or complexity as CSV.
    Eval(EvalArgs),
    /// Exhaustive search of all 7^8 parameter vectors; writes the Pareto front.
    Search(SearchArgs),
    /// Grow an 8-point seed to 16 or 32 points and write it as JSON.
    Scale(ScaleArgs),
    /// Compress one PGM image blockwise and report PSNR/SSIM.
    Compress(CompressArgs),
    /// Quality-versus-retention curves over a corpus of PGM images.
    Sweep(SweepArgs),
    /// Render presentation tables from a front CSV.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RhoArg {
    /// AR(1) correlation coefficient of the signal model.
    #[arg(long, env = "DCTAPPROX_RHO", default_value_t = DEFAULT_RHO)]
    pub rho: f64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Parameters a1..a8, comma separated, each in {0, ±0.5, ±1, ±2} ("1/2" accepted).
    #[arg(long, allow_hyphen_values = true)]
    pub params: ParamVector,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Parameter vector to score; repeat for several rows.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "known")]
    pub params: Vec<ParamVector>,
    /// Score the fifteen published optima instead.
    #[arg(long, conflicts_with = "params")]
    pub known: bool,
    /// Transform size; 16 and 32 use the doubled transforms.
    #[arg(long, default_value_t = 8, value_parser = parse_size)]
    pub size: usize,
    /// Print only additions, shifts and the counting rule.
    #[arg(long)]
    pub complexity: bool,
    #[command(flatten)]
    pub rho: RhoArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub rho: RhoArg,
    /// Front CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also evaluate non-orthogonal candidates (row-norm scaled).
    #[arg(long)]
    pub no_feasibility_filter: bool,
    /// Worker threads; all cores when omitted.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    /// Feasible 8-point parameter vector.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: ParamVector,
    #[arg(long, default_value_t = 16, value_parser = parse_size)]
    pub size: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "selector", required = true, multiple = false)]
pub struct TransformSelector {
    /// Transform JSON written by `gen` or `scale`.
    #[arg(long, group = "selector")]
    pub transform: Option<PathBuf>,
    /// Use the exact DCT.
    #[arg(long, group = "selector")]
    pub dct: bool,
    /// Build the transform from a parameter vector.
    #[arg(long, group = "selector", allow_hyphen_values = true)]
    pub params: Option<ParamVector>,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    /// Input binary PGM (P5).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub selector: TransformSelector,
    /// Block size for --dct and --params.
    #[arg(long, default_value_t = 8, value_parser = parse_size)]
    pub size: usize,
    /// Fraction of coefficients kept per block, in (0, 1].
    #[arg(long)]
    pub r: f64,
    /// Reconstructed PGM.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Metrics CSV; stdout when omitted.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Directory of PGM images.
    #[arg(long)]
    pub corpus: PathBuf,
    /// JSON list of transforms to compare.
    #[arg(long)]
    pub transforms: PathBuf,
    /// Curves CSV; per-image detail goes next to it as `<stem>_detail.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Smallest retention fraction.
    #[arg(long, default_value_t = 0.25)]
    pub r_start: f64,
    /// Largest retention fraction.
    #[arg(long, default_value_t = 0.99)]
    pub r_stop: f64,
    /// Grid step; the grid is resolved to hundredths.
    #[arg(long, default_value_t = 0.02)]
    pub r_step: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Front CSV written by `search`.
    pub front_csv: PathBuf,
    /// Directory for the tables.
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub rho: RhoArg,
}

fn parse_size(s: &str) -> Result<usize, String> {
    s.parse::<usize>()
        .ok()
        .and_then(|n| check_size(n).ok())
        .ok_or_else(|| format!("`{s}` is not one of 8, 16, 32"))
}

fn check_size(n: usize) -> Result<usize, CliError> {
    match n {
        8 | 16 | 32 => Ok(n),
        _ => Err(CliError::usage(format!("transform size {n} is not one of 8, 16, 32"))),
    }
}

fn write_output(out: Option<&Path>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, body).at(path),
        None => io::stdout()
            .write_all(body)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::usage(e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::usage(e.to_string()))
}

fn param_header() -> Vec<String> {
    (1..=8).map(|i| format!("a{i}")).collect()
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Eval(args) => eval(args),
        Command::Search(args) => search(args),
        Command::Scale(args) => scale(args),
        Command::Compress(args) => compress(args),
        Command::Sweep(args) => sweep_corpus(args),
        Command::Report(args) => {
            for path in report_tables(&args.front_csv, &args.out_dir, args.rho.rho)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<(), CliError> {
    let t = dctapprox::orthonormal_approx(&args.params)?;
    write_output(args.out.as_deref(), (t.to_json()? + "\n").as_bytes())
}

fn eval(args: EvalArgs) -> Result<(), CliError> {
    let vectors = if args.known { known_optima() } else { args.params };
    let mut header = param_header();
    let mut rows = Vec::new();
    if args.complexity {
        header.extend(["additions", "shifts", "rule"].map(String::from));
        for a in &vectors {
            let c = if args.size == 8 {
                dctapprox::complexity(a)
            } else {
                build_scaled(a, args.size)?.complexity
            };
            let mut row: Vec<String> = a.0.iter().map(|d| d.to_string()).collect();
            row.extend([c.additions.to_string(), c.shifts.to_string(), c.rule.to_string()]);
            rows.push(row);
        }
    } else {
        header.extend(["epsilon", "mse", "cg", "eta", "adds", "shifts"].map(String::from));
        let model = SignalModel::new(args.rho.rho, args.size)?;
        for a in &vectors {
            let s = build_scaled(a, args.size)?;
            let report = MetricsReport::new(quality(&s.transform.to_real(), &model)?, s.complexity);
            let mut row: Vec<String> = a.0.iter().map(|d| d.to_string()).collect();
            // drop the trailing rule column
            row.extend(report_fields(&report).into_iter().take(6));
            rows.push(row);
        }
    }
    write_output(args.out.as_deref(), &csv_bytes(&header, &rows)?)
}

fn search(args: SearchArgs) -> Result<(), CliError> {
    let model = SignalModel::new(args.rho.rho, 8)?;
    let options = SearchOptions {
        feasibility_filter: !args.no_feasibility_filter,
        workers: args.workers.map(usize::from),
    };
    let run = run_search(&model, options)?;
    let mut buf = Vec::new();
    run.write_csv(&mut buf)?;
    write_output(args.out.as_deref(), &buf)?;

    let (surplus, missing) = run.compare_with_known();
    eprintln!(
        "rho {}: {} enumerated, {} feasible, {} evaluated, {} skipped, front {} ({} canonical)",
        run.rho,
        run.enumerated,
        run.feasible,
        run.evaluated,
        run.skipped,
        run.front.len(),
        run.ranked().len()
    );
    let list = |v: &[ParamVector]| v.iter().map(|a| format!("[{a}]")).collect::<Vec<_>>().join(" ");
    if surplus.is_empty() && missing.is_empty() {
        eprintln!("front equals the fifteen published optima");
    } else {
        if !surplus.is_empty() {
            eprintln!("not among the published optima: {}", list(&surplus));
        }
        if !missing.is_empty() {
            eprintln!("published optima missing from the front: {}", list(&missing));
        }
    }
    for group in run.tie_groups() {
        eprintln!("tied objectives: {}", list(&group));
    }
    Ok(())
}

fn scale(args: ScaleArgs) -> Result<(), CliError> {
    let s = build_scaled(&args.seed, args.size)?;
    write_output(args.out.as_deref(), (s.transform.to_json()? + "\n").as_bytes())?;
    eprintln!(
        "{}-point transform: {} additions, {} shifts",
        s.size(),
        s.complexity.additions,
        s.complexity.shifts
    );
    Ok(())
}

fn block_transform(sel: &TransformSelector, size: usize) -> Result<(String, BlockTransform), CliError> {
    if let Some(path) = &sel.transform {
        let t = OrthonormalTransform::load(path).at(path)?;
        return Ok((path.display().to_string(), BlockTransform::from_orthonormal(&t)));
    }
    if let Some(a) = &sel.params {
        require_feasible(a)?;
        let s = build_scaled(a, size)?;
        return Ok((format!("[{a}]"), BlockTransform::from_orthonormal(&s.transform)));
    }
    Ok(("dct".into(), BlockTransform::dct(size)?))
}

fn compress(args: CompressArgs) -> Result<(), CliError> {
    let (label, t) = block_transform(&args.selector, args.size)?;
    let img = GrayImage::load(&args.input).at(&args.input)?;
    let policy = RetentionPolicy::new(args.r, t.size())?;
    let result = compress_image(&img, &t, &policy)?;
    if let Some(out) = &args.out {
        result.image.save(out).at(out)?;
    }
    let header: Vec<String> = ["image", "transform", "n", "r", "psnr", "ssim", "mse"]
        .map(String::from)
        .to_vec();
    let row = vec![
        args.input.display().to_string(),
        label,
        t.size().to_string(),
        format!("{}", args.r),
        sig6(psnr_for_csv(result.scores.psnr_db)),
        sig6(result.scores.ssim),
        sig6(result.scores.mse),
    ];
    write_output(args.metrics.as_deref(), &csv_bytes(&header, &[row])?)
}

/// Entry of the `sweep --transforms` list.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TransformSpec {
    Dct {
        id: String,
        dct: usize,
    },
    Params {
        id: String,
        params: String,
        #[serde(default = "default_size")]
        size: usize,
    },
    File {
        id: String,
        path: PathBuf,
    },
}

fn default_size() -> usize {
    8
}

/// Resolves a transform list; relative file paths are taken from the list's directory.
pub fn load_transform_list(path: &Path) -> Result<Vec<SweepEntry>, CliError> {
    let text = fs::read_to_string(path).at(path)?;
    let specs: Vec<TransformSpec> =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let (id, transform) = match spec {
            TransformSpec::Dct { id, dct } => (id, BlockTransform::dct(check_size(dct)?)?),
            TransformSpec::Params { id, params, size } => {
                let a: ParamVector = params.parse()?;
                (
                    id,
                    BlockTransform::from_orthonormal(&build_scaled(&a, check_size(size)?)?.transform),
                )
            }
            TransformSpec::File { id, path } => {
                let full = base.join(path);
                (
                    id,
                    BlockTransform::from_orthonormal(&OrthonormalTransform::load(&full).at(&full)?),
                )
            }
        };
        out.push(SweepEntry { id, transform });
    }
    Ok(out)
}

/// All `.pgm` files of `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, GrayImage)>, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .at(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::io(dir, "no .pgm images found"));
    }
    paths
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, GrayImage::load(p).at(p)?))
        })
        .collect()
}

fn sweep_corpus(args: SweepArgs) -> Result<(), CliError> {
    let pct = |v: f64| (v * 100.0).round() as u32;
    if args.r_step.is_nan() || args.r_step <= 0.0 || args.r_start > args.r_stop {
        return Err(CliError::usage(
            "retention grid must have r-start <= r-stop and a positive step",
        ));
    }
    let grid = r_grid(pct(args.r_start), pct(args.r_stop), pct(args.r_step));
    let transforms = load_transform_list(&args.transforms)?;
    let images = load_corpus(&args.corpus)?;
    let result = sweep(&images, &transforms, &grid)?;

    let file = fs::File::create(&args.out).at(&args.out)?;
    write_curves_csv(&result.curves, file).at(&args.out)?;
    let detail = sibling(&args.out, "_detail");
    let file = fs::File::create(&detail).at(&detail)?;
    write_detail_csv(&result.detail, file).at(&detail)?;
    eprintln!(
        "{} images x {} transforms x {} r values -> {}, {}",
        images.len(),
        transforms.len(),
        grid.len(),
        args.out.display(),
        detail.display()
    );
    Ok(())
}
