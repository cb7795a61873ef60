use std::fs;
use std::path::{Path, PathBuf};

use somqe::atomic::write_atomic;
use somqe::imaging::{save_image, write_transforms};
use somqe::pipeline::{
    correlate as correlate_report, emit_csv, emit_svg_plots, fit_trend, format_correlation_rows,
    format_regression_rows, ingest_covariates, load_frames, load_manifest, prepare_frames, run_pipeline, scatter_svg,
    score_frames, train_on_anchor, PipelineError, PreparedStack, QeReport, RunConfig, ScatterPlot,
};
use somqe::som::{load_grid, save_grid};
use somqe::stats::{linear_fit, pearson, Series, YearFix};

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_owned(),
        source,
    }
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(io_error(dir))
}

fn write_text(path: PathBuf, text: &str) -> Result<(), PipelineError> {
    write_atomic(&path, text.as_bytes()).map_err(io_error(&path))
}

fn prepare(manifest: &Path, config: &RunConfig) -> Result<(String, PreparedStack), PipelineError> {
    let manifest = load_manifest(manifest)?;
    log::info!("{} frames in '{}'", manifest.entries.len(), manifest.roi_name);
    let frames = load_frames(&manifest)?;
    Ok((manifest.roi_name, prepare_frames(frames, config)?))
}

fn table(path: &Path) -> Result<Vec<Series>, PipelineError> {
    Ok(ingest_covariates(path, true)?.series)
}

fn fixes(year_fix: Option<YearFix>) -> Vec<YearFix> {
    match year_fix {
        Some(f) => vec![f],
        None => vec![YearFix::AsPrinted, YearFix::Relabel1990],
    }
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}

pub fn register(manifest: &Path, out: &Path, config: &RunConfig) -> Result<(), PipelineError> {
    let (_, stack) = prepare(manifest, config)?;
    let frames_dir = out.join("registered");
    ensure_dir(&frames_dir)?;
    for (i, frame) in stack.frames.iter().enumerate() {
        let path = frames_dir.join(format!("{i:03}_{}.ppm", file_stem(&frame.label)));
        save_image(&frame.image, &path).map_err(|source| PipelineError::Load { index: i, source })?;
    }
    let path = out.join("transforms.txt");
    write_transforms(&stack.transforms, &path).map_err(io_error(&path))?;
    println!("registered {} frames onto frame {}", stack.frames.len(), stack.anchor);
    Ok(())
}

pub fn train(manifest: &Path, out: &Path, config: &RunConfig) -> Result<(), PipelineError> {
    let (_, stack) = prepare(manifest, config)?;
    let grid = train_on_anchor(&stack, config)?;
    ensure_dir(out)?;
    let path = out.join("grid.som");
    save_grid(&grid, &path)?;
    println!("{}", path.display());
    Ok(())
}

pub fn score(manifest: &Path, out: &Path, model: &Path, config: &RunConfig) -> Result<(), PipelineError> {
    let grid = load_grid(model)?;
    let (roi_name, stack) = prepare(manifest, config)?;
    let rows = score_frames(&stack.frames, &grid)?;
    let trend = fit_trend(&rows, config.year_fix);
    let report = QeReport {
        roi_name,
        rows,
        grid,
        transforms: stack.transforms,
        trend,
        correlations: Vec::new(),
    };
    ensure_dir(out)?;
    emit_csv(&report, out.join("report.csv"))?;
    print_summary(&report);
    Ok(())
}

pub fn run(manifest: &Path, out: &Path, covariates: Option<&Path>, config: &RunConfig) -> Result<(), PipelineError> {
    let manifest = load_manifest(manifest)?;
    let mut report = run_pipeline(&manifest, config)?;
    if let Some(path) = covariates {
        let series: Vec<Series> = ingest_covariates(path, config.decimal_comma)?
            .series
            .iter()
            .map(|s| s.with_year_fix(config.year_fix))
            .collect();
        report = correlate_report(&report, &series)?;
    }
    ensure_dir(out)?;
    emit_csv(&report, out.join("report.csv"))?;
    emit_svg_plots(&report, out)?;
    save_grid(&report.grid, out.join("grid.som"))?;
    let path = out.join("transforms.txt");
    write_transforms(&report.transforms, &path).map_err(io_error(&path))?;
    print_summary(&report);
    Ok(())
}

fn print_summary(report: &QeReport) {
    for row in &report.rows {
        println!("{}\t{}\t{:.6}\t{}", row.label, row.year, row.qe, row.empty_models);
    }
    match report.trend.fit() {
        Some(f) => println!("trend: slope={:.6e} r2={:.4} p={:.3e}", f.slope, f.r2, f.p),
        None => println!("trend: degenerate"),
    }
}

pub fn stats(covariates: &Path, out: Option<&Path>, year_fix: Option<YearFix>) -> Result<(), PipelineError> {
    let series = table(covariates)?;
    let fixes = fixes(year_fix);
    let mut fits = Vec::new();
    for s in &series {
        for &fix in &fixes {
            let label = if fixes.len() > 1 {
                format!("{} ({fix})", s.label())
            } else {
                s.label().to_owned()
            };
            fits.push((label, linear_fit(&s.with_year_fix(fix))?));
        }
    }
    let text = format_regression_rows(&fits);
    print!("{text}");
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_text(dir.join("stats.csv"), &text)?;
    }
    Ok(())
}

pub fn correlate(
    qe: &Path,
    covariates: &Path,
    out: Option<&Path>,
    year_fix: Option<YearFix>,
) -> Result<(), PipelineError> {
    let qe = table(qe)?;
    let covariates = table(covariates)?;
    // Pairing is positional; the year fix only affects the mismatch warning.
    let fix = year_fix.unwrap_or_default();
    let mut rows = Vec::new();
    for q in &qe {
        for c in &covariates {
            let (q, c) = (q.with_year_fix(fix), c.with_year_fix(fix));
            if q.xs() != c.xs() {
                log::warn!(
                    "'{}' and '{}' have different years; pairing by position",
                    q.label(),
                    c.label()
                );
            }
            rows.push((format!("{}_vs_{}", q.label(), c.label()), pearson(&q, &c)?));
        }
    }
    let text = format_correlation_rows(&rows);
    print!("{text}");
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_text(dir.join("correlations.csv"), &text)?;
    }
    Ok(())
}

pub fn plot(covariates: &Path, out: &Path, year_fix: YearFix) -> Result<(), PipelineError> {
    let series = table(covariates)?;
    ensure_dir(out)?;
    for s in &series {
        let s = s.with_year_fix(year_fix);
        let fit = linear_fit(&s).ok().map(|f| (f.slope, f.intercept, f.r2));
        let title = format!("{} by year", s.label());
        let svg = scatter_svg(&ScatterPlot {
            title: &title,
            x_label: "year",
            y_label: s.label(),
            points: s.points(),
            fit,
        });
        let path = out.join(format!("{}.svg", file_stem(s.label())));
        write_text(path.clone(), &svg)?;
        println!("{}", path.display());
    }
    Ok(())
}
