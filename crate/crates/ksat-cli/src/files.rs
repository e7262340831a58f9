//! Machine-readable outputs: evaluation CSVs, scatter data, and SVG plots.
//!
//! Numbers are written as shortest round-trip decimals (`{}` on `f64`), so
//! files are byte-identical across runs and lossless to reparse. Cells that
//! have no value (a class with no applicable samples) stay empty.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use ksat_core::estimator::ModelSeries;
use ksat_core::{EvalReport, TextureClass};

/// Class column labels: the twelve abbreviations plus `overall`.
fn class_columns() -> Vec<String> {
    TextureClass::ALL
        .iter()
        .map(|c| c.abbreviation().to_string())
        .chain(["overall".to_string()])
        .collect()
}

fn class_of(label: Option<TextureClass>) -> String {
    label.map_or("overall".to_string(), |c| c.abbreviation().to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Write `report_long.csv`, `mle_by_class.csv`, `rmsle_by_class.csv`, and
/// `overall.csv` into `dir`; returns the paths written.
pub fn write_report_files(
    dir: &Path,
    report: &EvalReport,
    series: &[ModelSeries<f64>],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut written = Vec::new();

    let long = dir.join("report_long.csv");
    {
        let mut w = csv::Writer::from_path(&long)
            .with_context(|| format!("cannot write {}", long.display()))?;
        w.write_record(["model", "class", "n", "mle", "rmsle", "best_rmsle"])?;
        for row in &report.rows {
            w.write_record([
                row.model.clone(),
                class_of(row.class),
                row.n.to_string(),
                opt(row.mle),
                opt(row.rmsle),
                row.best_rmsle.to_string(),
            ])?;
        }
        w.flush()?;
    }
    written.push(long);

    for (name, pick) in [
        ("mle_by_class.csv", true),
        ("rmsle_by_class.csv", false),
    ] {
        let path = dir.join(name);
        let mut w = csv::Writer::from_path(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        let mut header = vec!["model".to_string()];
        header.extend(class_columns());
        w.write_record(&header)?;
        for model in &report.models {
            let mut record = vec![model.clone()];
            for class in TextureClass::ALL.iter().copied().map(Some).chain([None]) {
                let row = report.row(model, class).expect("report covers all cells");
                record.push(opt(if pick { row.mle } else { row.rmsle }));
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        written.push(path);
    }

    let overall = dir.join("overall.csv");
    {
        let mut w = csv::Writer::from_path(&overall)
            .with_context(|| format!("cannot write {}", overall.display()))?;
        w.write_record(["model", "n", "excluded", "mle", "rmsle", "best_rmsle"])?;
        for s in series {
            let row = report.row(&s.model, None).expect("overall row exists");
            w.write_record([
                s.model.clone(),
                row.n.to_string(),
                s.excluded.len().to_string(),
                opt(row.mle),
                opt(row.rmsle),
                row.best_rmsle.to_string(),
            ])?;
        }
        w.flush()?;
    }
    written.push(overall);

    Ok(written)
}

/// Write `scatter.csv` (long format) and one `scatter_<model>.svg` per model
/// into `dir`; returns the paths written.
pub fn write_scatter_files(dir: &Path, series: &[ModelSeries<f64>]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut written = Vec::new();

    let csv_path = dir.join("scatter.csv");
    {
        let mut w = csv::Writer::from_path(&csv_path)
            .with_context(|| format!("cannot write {}", csv_path.display()))?;
        w.write_record(["model", "class", "log10_measured", "log10_estimated"])?;
        for s in series {
            for p in &s.points {
                let (measured, estimated) = p.log10_pair();
                w.write_record([
                    s.model.clone(),
                    p.class.abbreviation().to_string(),
                    measured.to_string(),
                    estimated.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    written.push(csv_path);

    for s in series {
        let path = dir.join(format!("scatter_{}.svg", s.model));
        let pairs: Vec<(f64, f64)> = s.points.iter().map(|p| p.log10_pair()).collect();
        fs::write(&path, scatter_svg(&s.model, &pairs))
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }

    Ok(written)
}

/// A square log-log scatter: measured on x, estimated on y, grid at integer
/// decades, and the dashed red 1:1 reference diagonal.
fn scatter_svg(model: &str, pairs: &[(f64, f64)]) -> String {
    const SIZE: f64 = 640.0;
    const MARGIN: f64 = 60.0;
    const PLOT: f64 = SIZE - 2.0 * MARGIN;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (m, e) in pairs {
        lo = lo.min(*m).min(*e);
        hi = hi.max(*m).max(*e);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        lo = -2.0;
        hi = 6.0;
    }
    let lo = lo.floor();
    let hi = (hi.ceil()).max(lo + 1.0);
    let x = |v: f64| MARGIN + (v - lo) / (hi - lo) * PLOT;
    let y = |v: f64| SIZE - MARGIN - (v - lo) / (hi - lo) * PLOT;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 640\" \
         font-family=\"sans-serif\" font-size=\"13\">\n\
         <rect width=\"640\" height=\"640\" fill=\"white\"/>\n\
         <text x=\"320\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{model}</text>\n"
    );

    // Integer-decade grid and tick labels; thin the ticks if the span is wide.
    let step = (((hi - lo) / 8.0).ceil() as i64).max(1);
    let mut tick = lo as i64;
    while tick as f64 <= hi {
        let t = tick as f64;
        let (px, py) = (x(t), y(t));
        let _ = write!(
            svg,
            "<line x1=\"{px:.2}\" y1=\"{top:.2}\" x2=\"{px:.2}\" y2=\"{bottom:.2}\" stroke=\"#dddddd\"/>\n\
             <line x1=\"{left:.2}\" y1=\"{py:.2}\" x2=\"{right:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\"/>\n\
             <text x=\"{px:.2}\" y=\"{label_y:.2}\" text-anchor=\"middle\">{tick}</text>\n\
             <text x=\"{label_x:.2}\" y=\"{text_y:.2}\" text-anchor=\"end\">{tick}</text>\n",
            top = MARGIN,
            bottom = SIZE - MARGIN,
            left = MARGIN,
            right = SIZE - MARGIN,
            label_y = SIZE - MARGIN + 18.0,
            label_x = MARGIN - 8.0,
            text_y = py + 4.0,
        );
        tick += step;
    }

    let _ = write!(
        svg,
        "<rect x=\"{m:.2}\" y=\"{m:.2}\" width=\"{p:.2}\" height=\"{p:.2}\" \
         fill=\"none\" stroke=\"black\"/>\n",
        m = MARGIN,
        p = PLOT
    );

    for (meas, est) in pairs {
        let _ = write!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"#1f77b4\" fill-opacity=\"0.45\"/>\n",
            x(*meas),
            y(*est)
        );
    }

    // 1:1 reference line, drawn over the points.
    let _ = write!(
        svg,
        "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
         stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"7,5\"/>\n",
        x1 = x(lo),
        y1 = y(lo),
        x2 = x(hi),
        y2 = y(hi),
    );

    let _ = write!(
        svg,
        "<text x=\"320\" y=\"625\" text-anchor=\"middle\">log10 measured Ksat (cm/day)</text>\n\
         <text x=\"18\" y=\"320\" text-anchor=\"middle\" transform=\"rotate(-90 18 320)\">\
         log10 estimated Ksat (cm/day)</text>\n</svg>\n"
    );
    svg
}
