//! Human-readable report tables, printed to one writer in a fixed order so
//! the output is byte-identical across runs.

use std::io::{self, Write};

use ksat_core::estimator::ModelSeries;
use ksat_core::metrics::{summary_stats, texture_distribution, FieldStats};
use ksat_core::{EvalReport, SoilSample, TextureClass};

use crate::sig6;

const MODEL_W: usize = 20;
const CELL_W: usize = 11;

fn class_labels() -> Vec<&'static str> {
    TextureClass::ALL
        .iter()
        .map(|c| c.abbreviation())
        .chain(["overall"])
        .collect()
}

fn header(w: &mut impl Write) -> io::Result<()> {
    write!(w, "{:<MODEL_W$}", "model")?;
    for label in class_labels() {
        write!(w, "{label:>CELL_W$}")?;
    }
    writeln!(w)
}

pub fn print_report(
    w: &mut impl Write,
    report: &EvalReport,
    series: &[ModelSeries<f64>],
    samples: &[SoilSample],
) -> io::Result<()> {
    let classes: Vec<Option<TextureClass>> = TextureClass::ALL
        .iter()
        .copied()
        .map(Some)
        .chain([None])
        .collect();

    writeln!(w, "Applicable n by texture class")?;
    header(w)?;
    for model in &report.models {
        write!(w, "{model:<MODEL_W$}")?;
        for class in &classes {
            let row = report.row(model, *class).expect("report covers all cells");
            write!(w, "{:>CELL_W$}", row.n)?;
        }
        writeln!(w)?;
    }
    writeln!(w)?;

    writeln!(w, "MLE by texture class (negative = underestimation)")?;
    header(w)?;
    for model in &report.models {
        write!(w, "{model:<MODEL_W$}")?;
        for class in &classes {
            let row = report.row(model, *class).expect("report covers all cells");
            let cell = row.mle.map_or("-".to_string(), sig6);
            write!(w, "{cell:>CELL_W$}")?;
        }
        writeln!(w)?;
    }
    writeln!(w)?;

    writeln!(w, "RMSLE by texture class (* marks the lowest in the class)")?;
    header(w)?;
    for model in &report.models {
        write!(w, "{model:<MODEL_W$}")?;
        for class in &classes {
            let row = report.row(model, *class).expect("report covers all cells");
            let cell = match row.rmsle {
                Some(v) if row.best_rmsle => format!("{}*", sig6(v)),
                Some(v) => sig6(v),
                None => "-".to_string(),
            };
            write!(w, "{cell:>CELL_W$}")?;
        }
        writeln!(w)?;
    }
    writeln!(w)?;

    writeln!(w, "Overall")?;
    writeln!(
        w,
        "{:<MODEL_W$}{:>9}{:>10}{:>CELL_W$}{:>CELL_W$}  best",
        "model", "n", "excluded", "MLE", "RMSLE"
    )?;
    for s in series {
        let row = report.row(&s.model, None).expect("overall row exists");
        writeln!(
            w,
            "{:<MODEL_W$}{:>9}{:>10}{:>CELL_W$}{:>CELL_W$}  {}",
            s.model,
            row.n,
            s.excluded.len(),
            row.mle.map_or("-".to_string(), sig6),
            row.rmsle.map_or("-".to_string(), sig6),
            if row.best_rmsle { "*" } else { "" }
        )?;
    }
    writeln!(w)?;

    writeln!(w, "Texture class distribution of evaluated samples")?;
    for (class, count) in texture_distribution(samples) {
        writeln!(
            w,
            "{:<6}{:<18}{count:>9}",
            class.abbreviation(),
            class.name()
        )?;
    }
    writeln!(w)?;

    writeln!(w, "Sample summary by source: mean (sd)")?;
    if let Ok(stats) = summary_stats(samples) {
        for group in &stats.groups {
            let tag = if group.singleton { " (singleton)" } else { "" };
            writeln!(w, "source {} n={}{tag}", group.source, group.n_samples)?;
            let cell = |s: Option<FieldStats<f64>>| {
                s.map_or("-".to_string(), |s| {
                    format!("{} ({})", sig6(s.mean), sig6(s.sd))
                })
            };
            writeln!(w, "  bulk_density_g_cm3  {}", cell(Some(group.bulk_density)))?;
            writeln!(w, "  sand_pct            {}", cell(Some(group.sand)))?;
            writeln!(w, "  silt_pct            {}", cell(Some(group.silt)))?;
            writeln!(w, "  clay_pct            {}", cell(Some(group.clay)))?;
            writeln!(w, "  sample_height_cm    {}", cell(group.height))?;
            writeln!(w, "  sample_diameter_cm  {}", cell(group.diameter))?;
            writeln!(w, "  ksat_cm_per_day     {}", cell(group.ksat))?;
        }
    }
    Ok(())
}
