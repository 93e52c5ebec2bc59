//! Static report: index page, ECDF plots, stats tables and provenance.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use blackbench_core::cfmt::format_g;
use blackbench_core::observer::{parse_logs, ExperimentData, FORMAT_VERSION};
use blackbench_core::perf::{
    aggregate_suite, averages, extract_runtimes, fill_with_simulated_restarts, group_records,
    stats_csv, AggregateStats, GroupKey, Grouping, RuntimeRecord, TargetSet, STATS_CSV_SCHEMA,
};

use crate::svg::render_ecdf_svg;

pub const INDEX_FILE: &str = "index.html";
pub const PROVENANCE_FILE: &str = "provenance.txt";

/// Experiment metadata copied into the provenance block when present.
const PROVENANCE_KEYS: [&str; 7] = [
    "suite",
    "algorithm_name",
    "algorithm_info",
    "optimizer",
    "budget_multiplier",
    "master_seed",
    "timestamp",
];

pub fn stats_file_name(grouping: Grouping) -> String {
    format!("stats_{}.csv", grouping.label())
}

pub fn plot_file_name(grouping: Grouping, dimension: usize) -> String {
    format!("ecdf_{}_d{dimension}.svg", grouping.label())
}

fn is_report_file(name: &str) -> bool {
    name == INDEX_FILE
        || name == PROVENANCE_FILE
        || (name.starts_with("stats_") && name.ends_with(".csv"))
        || (name.starts_with("ecdf_") && name.ends_with(".svg"))
}

/// Files of a generated report, relative to `folder`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub folder: PathBuf,
    pub index: String,
    pub provenance: String,
    pub stats: Vec<String>,
    pub plots: Vec<String>,
}

impl ReportBundle {
    pub fn files(&self) -> impl Iterator<Item = &String> {
        [&self.index, &self.provenance]
            .into_iter()
            .chain(&self.stats)
            .chain(&self.plots)
    }
}

/// Creates `out`, or clears the files of a previous report in it. Any other
/// non-empty folder is left alone and rejected.
fn prepare_output(out: &Path) -> Result<()> {
    if !out.exists() {
        return fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()));
    }
    if !out.is_dir() {
        bail!("{} exists and is not a directory", out.display());
    }
    let entries: Vec<PathBuf> = fs::read_dir(out)
        .with_context(|| format!("reading {}", out.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    if entries.is_empty() {
        return Ok(());
    }
    if !out.join(PROVENANCE_FILE).is_file() {
        bail!(
            "{} is not empty and does not hold a previous report; refusing to write into it",
            out.display()
        );
    }
    for path in entries {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
        if path.is_file() && name.as_deref().is_some_and(is_report_file) {
            fs::remove_file(&path).with_context(|| format!("removing {}", path.display()))?;
        }
    }
    Ok(())
}

fn write(folder: &Path, name: &str, contents: &str) -> Result<()> {
    let path = folder.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

struct Section {
    grouping: Grouping,
    rows: Vec<(GroupKey, AggregateStats)>,
    plots: Vec<(usize, String)>,
}

fn provenance(
    input: &Path,
    data: &ExperimentData,
    seed: u64,
    targets: &TargetSet,
    generated_at: u64,
) -> String {
    let offsets = targets.offsets();
    let mut out = String::new();
    let _ = writeln!(out, "generator = blackbench {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "generated_at = {generated_at}");
    let _ = writeln!(out, "source = {}", input.display());
    let _ = writeln!(out, "report_seed = {seed}");
    let _ = writeln!(out, "log_format_version = {FORMAT_VERSION}");
    let _ = writeln!(out, "stats_csv_schema = {STATS_CSV_SCHEMA}");
    let _ = writeln!(
        out,
        "targets = {} ({} to {})",
        offsets.len(),
        format_g(offsets[0], 6),
        format_g(offsets[offsets.len() - 1], 6)
    );
    for key in PROVENANCE_KEYS {
        if let Some(value) = data.meta(key) {
            let key = if key == "timestamp" {
                "experiment_timestamp"
            } else {
                key
            };
            let _ = writeln!(out, "{key} = {value}");
        }
    }
    let _ = writeln!(out, "runs = {}", data.logs.len());
    let _ = writeln!(out, "dropped_lines = {}", data.warnings);
    let errors = data.metadata.get("error").map_or(0, Vec::len);
    let _ = writeln!(out, "optimizer_errors = {errors}");
    out
}

fn html_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn index_page(provenance: &str, sections: &[Section]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">"
    );
    let _ = writeln!(out, "<title>blackbench report</title>");
    let _ = writeln!(
        out,
        "<style>body{{font-family:sans-serif;margin:2em}}table{{border-collapse:collapse}}\
         td,th{{border:1px solid #ccc;padding:2px 8px;text-align:right}}</style>"
    );
    let _ = writeln!(out, "</head>\n<body>\n<h1>blackbench report</h1>");
    let _ = writeln!(
        out,
        "<h2>Provenance</h2>\n<pre>{}</pre>",
        html_escape(provenance)
    );
    for section in sections {
        let label = section.grouping.label();
        let _ = writeln!(out, "<h2>Grouping: {label}</h2>");
        let _ = writeln!(
            out,
            "<p>Table: <a href=\"{0}\">{0}</a></p>",
            stats_file_name(section.grouping)
        );
        for (dimension, plot) in &section.plots {
            let _ = writeln!(out, "<h3>{label}, dimension {dimension}</h3>");
            let _ = writeln!(
                out,
                "<img src=\"{plot}\" alt=\"ECDF {label} d{dimension}\">"
            );
            let _ = writeln!(
                out,
                "<table>\n<tr><th>group</th><th>records</th><th>successes</th>\
                 <th>mean RT</th><th>geometric mean RT</th><th>ERT</th></tr>"
            );
            for (key, stats) in section
                .rows
                .iter()
                .filter(|(k, _)| k.dimension == *dimension)
            {
                let _ = writeln!(
                    out,
                    "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
                    html_escape(&key.label),
                    stats.record_count,
                    stats.success_count,
                    format_g(stats.arithmetic_mean.unwrap_or(f64::NAN), 6),
                    format_g(stats.geometric_mean.unwrap_or(f64::NAN), 6),
                    format_g(stats.expected_runtime, 6),
                );
            }
            let _ = writeln!(out, "</table>");
        }
    }
    let _ = writeln!(out, "</body>\n</html>");
    out
}

/// Post-processes the experiment folder `input` into a report in `out`.
///
/// Tables are computed from observed runtimes. ECDF plots use records
/// filled by simulated restarts drawn with `seed`.
pub fn build_report(input: &Path, out: &Path, seed: u64) -> Result<ReportBundle> {
    let data = parse_logs(input)?;
    if data.logs.is_empty() {
        bail!("{} contains no completed runs", input.display());
    }
    prepare_output(out)?;

    let targets = TargetSet::standard();
    let records: Vec<RuntimeRecord> = extract_runtimes(&data.logs, &targets);
    let filled = fill_with_simulated_restarts(&records, seed);
    let dimensions: BTreeSet<usize> = records.iter().map(|r| r.descriptor.dimension).collect();

    let mut sections = Vec::new();
    let mut stats_files = Vec::new();
    let mut plot_files = Vec::new();
    for grouping in Grouping::ALL {
        let rows: Vec<(GroupKey, AggregateStats)> = group_records(&records, grouping)
            .into_iter()
            .map(|(key, pool)| (key, averages(&pool)))
            .collect();
        let name = stats_file_name(grouping);
        write(out, &name, &stats_csv(rows.iter().map(|(k, s)| (k, s))))?;
        stats_files.push(name);

        let summaries = aggregate_suite(&filled, grouping)?;
        let mut plots = Vec::new();
        for &dimension in &dimensions {
            let curves: Vec<(&str, _)> = summaries
                .iter()
                .filter(|s| s.key.dimension == dimension)
                .map(|s| (s.key.label.as_str(), &s.curve))
                .collect();
            let title = format!(
                "{} ECDF by {}, dimension {dimension}",
                data.suite.name(),
                grouping.label()
            );
            let name = plot_file_name(grouping, dimension);
            write(out, &name, &render_ecdf_svg(&title, &curves)?)?;
            plots.push((dimension, name.clone()));
            plot_files.push(name);
        }
        sections.push(Section {
            grouping,
            rows,
            plots,
        });
    }

    let generated_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let provenance = provenance(input, &data, seed, &targets, generated_at);
    write(out, PROVENANCE_FILE, &provenance)?;
    write(out, INDEX_FILE, &index_page(&provenance, &sections))?;

    Ok(ReportBundle {
        folder: out.to_path_buf(),
        index: INDEX_FILE.to_string(),
        provenance: PROVENANCE_FILE.to_string(),
        stats: stats_files,
        plots: plot_files,
    })
}
