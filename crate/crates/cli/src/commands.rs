use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vbpbb::filter::transfer_curve_to_csv;
use vbpbb::rng::{DERIVATION, GENERATOR};
use vbpbb::sim::{study_grid, GridScale, StudyTable, TableKind};
use vbpbb::{
    bandpass, bootstrap_band, kz_filter, kz_kernel, run_study, series::series_to_csv,
    transfer_curve, BandConfig, BandSpec, EdgePolicy, ResampleMode, Scenario, ScenarioReport,
    ScenarioSummary,
};

use crate::error::{CliError, CliResult};
use crate::output::{emit, read_series_file, with_header, write_atomic};

pub struct FilterArgs {
    pub input: PathBuf,
    pub m: usize,
    pub k: usize,
    pub nu: f64,
    pub edge: EdgePolicy,
    pub output: Option<PathBuf>,
}

pub fn filter(args: &FilterArgs) -> CliResult<()> {
    let band = BandSpec::new(args.nu, args.m, args.k)?;
    let series = read_series_file(&args.input)?;
    let filtered = if args.nu == 0.0 {
        kz_filter(&series, &kz_kernel(args.m, args.k)?, args.edge)?
    } else {
        bandpass(&series, &band, args.edge)?
    };
    let meta = vec![
        format!(
            "vbpbb filter m={} k={} nu={} edge={}",
            args.m, args.k, args.nu, args.edge
        ),
        if args.nu == 0.0 {
            "output: KZ low-pass".to_string()
        } else {
            "output: 2*Re(KZFT) bandpass reconstruction".to_string()
        },
    ];
    emit(
        args.output.as_deref(),
        &with_header(&meta, &series_to_csv(&filtered)),
    )
}

pub struct BootstrapArgs {
    pub input: PathBuf,
    pub period: usize,
    pub resamples: usize,
    pub level: f64,
    pub mode: ResampleMode,
    pub seed: Option<u64>,
    pub filter: Option<(usize, usize)>,
    pub output: Option<PathBuf>,
}

pub fn parse_filter_spec(s: &str) -> Result<(usize, usize), String> {
    let (m, k) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `m,k`, got `{s}`"))?;
    let m = m.trim().parse().map_err(|_| format!("bad m in `{s}`"))?;
    let k = k.trim().parse().map_err(|_| format!("bad k in `{s}`"))?;
    Ok((m, k))
}

pub fn bootstrap(args: &BootstrapArgs) -> CliResult<()> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let config = BandConfig {
        period: args.period,
        resamples: args.resamples,
        level: args.level,
        mode: args.mode,
        seed,
    };
    config.validate()?;
    let band_spec = match args.filter {
        Some((m, k)) => Some(BandSpec::for_period(args.period, m, k)?),
        None => None,
    };

    let series = read_series_file(&args.input)?;
    let series = match &band_spec {
        Some(b) => bandpass(&series, b, EdgePolicy::Truncate)?,
        None => series,
    };
    let band = bootstrap_band(&series, &config)?;

    let filter_desc = match args.filter {
        Some((m, k)) => format!("kzft m={m} k={k} nu=1/{} truncate, 2*Re", args.period),
        None => "none".to_string(),
    };
    let meta = vec![
        format!(
            "vbpbb bootstrap period={} B={} level={} mode={} seed={}",
            args.period, args.resamples, args.level, args.mode, seed
        ),
        format!("filter: {filter_desc}"),
        format!("rng: {GENERATOR}"),
        "point = median of resample periodic means; bounds = type-7 quantiles".to_string(),
    ];
    emit(args.output.as_deref(), &with_header(&meta, &band.to_csv()))
}

pub struct TransferArgs {
    pub m: usize,
    pub k: usize,
    pub nu: f64,
    pub grid_points: usize,
    pub output: Option<PathBuf>,
}

pub fn transfer(args: &TransferArgs) -> CliResult<()> {
    let band = BandSpec::new(args.nu, args.m, args.k)?;
    let curve = transfer_curve(&band, args.grid_points)?;
    let meta = vec![format!(
        "vbpbb transfer m={} k={} nu={} grid_points={}",
        args.m, args.k, args.nu, args.grid_points
    )];
    emit(
        args.output.as_deref(),
        &with_header(&meta, &transfer_curve_to_csv(&curve)),
    )
}

pub enum GridSource {
    File(PathBuf),
    Preset(GridScale),
}

pub struct SimulateArgs {
    pub grid: GridSource,
    pub out_dir: PathBuf,
    pub threads: usize,
    pub seed: Option<u64>,
}

/// Top-level study document written next to the per-scenario reports.
#[derive(Serialize, Deserialize)]
struct StudyDoc {
    generator: String,
    derivation: String,
    grid: Vec<Scenario>,
    summaries: Vec<ScenarioSummary>,
}

pub fn load_grid(source: &GridSource) -> CliResult<Vec<Scenario>> {
    match source {
        GridSource::Preset(scale) => Ok(study_grid(*scale, None)),
        GridSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            let bad = |e: String| {
                CliError::Usage(format!("{}: malformed scenario grid: {e}", path.display()))
            };
            let doc: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
            let list = match doc {
                serde_json::Value::Object(mut obj) => obj
                    .remove("scenarios")
                    .ok_or_else(|| bad("object has no `scenarios` array".into()))?,
                other => other,
            };
            let grid: Vec<Scenario> =
                serde_json::from_value(list).map_err(|e| bad(e.to_string()))?;
            if grid.is_empty() {
                return Err(CliError::Usage(format!(
                    "{}: scenario grid is empty",
                    path.display()
                )));
            }
            Ok(grid)
        }
    }
}

fn report_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("scenario_{index:03}.json"))
}

fn table_path(dir: &Path, kind: TableKind) -> PathBuf {
    dir.join(format!("table{}.csv", kind.number()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let grid: Vec<Scenario> = load_grid(&args.grid)?
        .into_iter()
        .map(|mut s| {
            s.master_seed.get_or_insert(seed);
            s
        })
        .collect();
    for s in &grid {
        s.validate()?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    let study = pool.install(|| run_study(&grid))?;

    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(args.out_dir.display(), e))?;
    for (i, report) in study.reports.iter().enumerate() {
        write_atomic(&report_path(&args.out_dir, i), &to_json(report))?;
    }
    let doc = StudyDoc {
        generator: GENERATOR.to_string(),
        derivation: DERIVATION.to_string(),
        grid: study.reports.iter().map(|r| r.scenario.clone()).collect(),
        summaries: study.reports.iter().map(|r| r.summary.clone()).collect(),
    };
    write_atomic(&args.out_dir.join("study.json"), &to_json(&doc))?;
    for kind in TableKind::ALL {
        write_atomic(
            &table_path(&args.out_dir, kind),
            &study.table(kind).to_csv(false),
        )?;
    }
    eprintln!(
        "wrote {} scenario reports and 4 tables to {} (seed {seed})",
        study.reports.len(),
        args.out_dir.display()
    );
    Ok(())
}

pub struct ReportArgs {
    pub in_dir: PathBuf,
    pub table: TableKind,
    pub threshold_style: bool,
    pub output: Option<PathBuf>,
}

/// Loads every `scenario_*.json` in `dir`, in file-name order.
pub fn load_reports(dir: &Path) -> CliResult<Vec<ScenarioReport>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("scenario_") && n.ends_with(".json"))
        })
        .collect();
    if paths.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no scenario reports found",
            dir.display()
        )));
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p.display(), e))?;
            let mut report: ScenarioReport = serde_json::from_str(&text)
                .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            report.summary = report
                .resummarize()
                .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            Ok(report)
        })
        .collect()
}

pub fn report(args: &ReportArgs) -> CliResult<()> {
    let reports = load_reports(&args.in_dir)?;
    let table = StudyTable::from_reports(args.table, &reports);
    emit(args.output.as_deref(), &table.to_csv(args.threshold_style))
}
