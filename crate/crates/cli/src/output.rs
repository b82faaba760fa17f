//! Files written by `accept analyze`.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use accept::analysis::plot_curve;
use accept::json::to_canonical_json;
use accept::{render_curve_svg, render_table, AnalysisBundle, Layout, PlotSpec, SourceTag, TableFormat};
use clap::ValueEnum;

use crate::Failure;

/// Per-curve artifacts that can be requested with `--emit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Emit {
    Svg,
    Csv,
    Json,
    Md,
}

pub const ALL_EMITS: [Emit; 4] = [Emit::Svg, Emit::Csv, Emit::Json, Emit::Md];

fn tag_name(tag: SourceTag) -> &'static str {
    match tag {
        SourceTag::Bayes => "bayes",
        SourceTag::Freq => "freq",
    }
}

/// File-name-safe version of a trial name.
pub fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "trial".into()
    } else {
        s
    }
}

fn stems(bundle: &AnalysisBundle) -> Vec<String> {
    let mut seen = HashSet::new();
    bundle
        .trials
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut stem = file_stem(&t.name);
            if !seen.insert(stem.clone()) {
                stem = format!("{stem}_{}", i + 1);
                seen.insert(stem.clone());
            }
            stem
        })
        .collect()
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), Failure> {
    fs::write(&path, contents).map_err(|e| Failure::io(&format!("writing {}", path.display()), e))?;
    written.push(path);
    Ok(())
}

/// Write `<trial>_<mode>_curve.<ext>` for every curve and requested format,
/// a faceted `figure_<mode>.svg` when several trials share a mode, and
/// `bundle.json`. Returns the paths written, in order.
pub fn write_outputs(bundle: &AnalysisBundle, dir: &Path, emit: &[Emit]) -> Result<Vec<PathBuf>, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(&format!("creating {}", dir.display()), e))?;
    let mut written = Vec::new();
    for (trial, stem) in bundle.trials.iter().zip(stems(bundle)) {
        for tag in [SourceTag::Bayes, SourceTag::Freq] {
            let Some(report) = trial.report(tag) else { continue };
            let base = format!("{stem}_{}_curve", tag_name(tag));
            for e in ALL_EMITS.iter().filter(|e| emit.contains(e)) {
                let (ext, contents) = match e {
                    Emit::Svg => ("svg", render_curve_svg(&PlotSpec::new(vec![plot_curve(report)]))?),
                    Emit::Csv => ("csv", render_table(&report.table, TableFormat::Csv)),
                    Emit::Md => ("md", render_table(&report.table, TableFormat::Markdown)),
                    Emit::Json => (
                        "json",
                        to_canonical_json(report).map_err(|e| Failure::new("internal", e.to_string()))?,
                    ),
                };
                write(dir.join(format!("{base}.{ext}")), &contents, &mut written)?;
            }
        }
    }
    if emit.contains(&Emit::Svg) {
        for tag in [SourceTag::Bayes, SourceTag::Freq] {
            let n = bundle.trials.iter().filter(|t| t.report(tag).is_some()).count();
            if n > 1 {
                if let Some(svg) = bundle.figure_svg(tag, Layout::Faceted)? {
                    write(dir.join(format!("figure_{}.svg", tag_name(tag))), &svg, &mut written)?;
                }
            }
        }
    }
    write(dir.join("bundle.json"), &bundle.to_canonical_json(), &mut written)?;
    Ok(written)
}
