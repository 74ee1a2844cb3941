//! Emits the figure data behind a summary: one CSV per figure analogue plus
//! a minimal SVG rendering of each.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::summary::ExperimentSummary;
use crate::svg::{Chart, PALETTE};

/// Writes every plot file under `dir`/plots and returns their paths.
pub fn emit_plot_data(summary: &ExperimentSummary, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let plot_dir = dir.join("plots");
    fs::create_dir_all(&plot_dir)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, content: String| -> anyhow::Result<()> {
        let path = plot_dir.join(name);
        fs::write(&path, content)?;
        written.push(path);
        Ok(())
    };

    emit("successes_vs_rate.csv", successes_csv(summary))?;
    emit("diversity_vs_generation.csv", diversity_csv(summary))?;
    emit("rank_vs_generation.csv", rank_csv(summary))?;
    emit("case_usage_histogram.csv", usage_csv(summary))?;

    for problem in problems(summary) {
        emit(
            &format!("successes_vs_rate__{problem}.svg"),
            successes_svg(summary, &problem),
        )?;
        emit(
            &format!("diversity_vs_generation__{problem}.svg"),
            series_svg(summary, &problem, Series::Diversity),
        )?;
        emit(
            &format!("rank_vs_generation__{problem}.svg"),
            series_svg(summary, &problem, Series::Rank),
        )?;
        emit(
            &format!("case_usage_histogram__{problem}.svg"),
            usage_svg(summary, &problem),
        )?;
    }
    Ok(written)
}

fn problems(summary: &ExperimentSummary) -> Vec<String> {
    summary
        .cells
        .iter()
        .map(|c| c.problem.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn fitted(summary: &ExperimentSummary, problem: &str, selection: &str, rate: f64) -> Option<f64> {
    summary
        .regressions
        .iter()
        .find(|r| r.problem == problem && r.selection == selection)
        .and_then(|r| r.result.as_ref())
        .map(|fit| fit.intercept + fit.slope * rate)
}

/// One row per (method, rate), with the method's fitted line evaluated at
/// that rate alongside the observed count.
fn successes_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from("problem,selection,rate,successes,replicates,fitted\n");
    for c in &summary.cells {
        let fit = fitted(summary, &c.problem, &c.selection, c.rate)
            .map(|v| format!("{v:.6}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.problem, c.selection, c.rate, c.successes, c.replicates, fit
        ));
    }
    out
}

fn diversity_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from("problem,selection,rate,generation,mean_diversity,runs\n");
    for s in &summary.series {
        for (g, d) in s.mean_diversity.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.problem, s.selection, s.rate, g, d, s.runs_at_generation[g]
            ));
        }
    }
    out
}

fn rank_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from("problem,selection,rate,generation,mean_selected_rank,runs\n");
    for s in &summary.series {
        for (g, r) in s.mean_selected_rank.iter().enumerate() {
            if let Some(rank) = r {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    s.problem, s.selection, s.rate, g, rank, s.runs_at_generation[g]
                ));
            }
        }
    }
    out
}

fn usage_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from("problem,selection,bin_low,bin_high,fraction\n");
    for u in &summary.case_usage {
        for (i, f) in u.histogram.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.1},{:.1},{}\n",
                u.problem,
                u.selection,
                i as f64 / 10.0,
                (i + 1) as f64 / 10.0,
                f
            ));
        }
    }
    out
}

fn successes_svg(summary: &ExperimentSummary, problem: &str) -> String {
    let cells: Vec<_> = summary
        .cells
        .iter()
        .filter(|c| c.problem == problem)
        .collect();
    let selections: Vec<String> = cells
        .iter()
        .map(|c| c.selection.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let x_max = cells.iter().map(|c| c.rate).fold(0.0, f64::max);
    let y_max = cells.iter().map(|c| c.successes as f64).fold(1.0, f64::max);
    let mut chart = Chart::new(
        &format!("{problem}: solutions vs survival rate"),
        (0.0, x_max),
        (0.0, y_max),
    );
    chart.axes("survival rate (%)", "generalizing solutions");
    let mut legend = Vec::new();
    for (i, sel) in selections.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| &c.selection == sel)
            .map(|c| (c.rate, c.successes as f64))
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let fit_pts: Vec<(f64, f64)> = pts
            .iter()
            .filter_map(|&(rate, _)| fitted(summary, problem, sel, rate).map(|v| (rate, v)))
            .collect();
        chart.polyline(&pts, color, false);
        chart.polyline(&fit_pts, color, true);
        legend.push((sel.clone(), color.to_string()));
    }
    chart.legend(&legend);
    chart.render()
}

enum Series {
    Diversity,
    Rank,
}

fn series_svg(summary: &ExperimentSummary, problem: &str, which: Series) -> String {
    let series: Vec<_> = summary
        .series
        .iter()
        .filter(|s| s.problem == problem)
        .collect();
    let values = |s: &crate::summary::CellSeries| -> Vec<(f64, f64)> {
        match which {
            Series::Diversity => s
                .mean_diversity
                .iter()
                .enumerate()
                .map(|(g, v)| (g as f64, *v))
                .collect(),
            Series::Rank => s
                .mean_selected_rank
                .iter()
                .enumerate()
                .filter_map(|(g, v)| v.map(|v| (g as f64, v)))
                .collect(),
        }
    };
    let x_max = series
        .iter()
        .map(|s| s.mean_diversity.len() as f64)
        .fold(1.0, f64::max);
    let y_max = match which {
        Series::Diversity => 1.0,
        Series::Rank => series
            .iter()
            .flat_map(|s| values(s))
            .map(|p| p.1)
            .fold(1.0, f64::max),
    };
    let (title, y_label) = match which {
        Series::Diversity => ("behavioral diversity by generation", "mean diversity"),
        Series::Rank => ("selected-parent rank by generation", "mean selected rank"),
    };
    let mut chart = Chart::new(&format!("{problem}: {title}"), (0.0, x_max), (0.0, y_max));
    chart.axes("generation", y_label);
    let selections: Vec<String> = series
        .iter()
        .map(|s| s.selection.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let rate_span = series
        .iter()
        .map(|s| s.rate)
        .fold((f64::MAX, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let mut legend = Vec::new();
    for s in &series {
        let idx = selections.iter().position(|x| x == &s.selection).unwrap();
        let color = PALETTE[idx % PALETTE.len()];
        // darker-to-lighter within a method as the rate falls
        let span = (rate_span.1 - rate_span.0).max(1.0);
        let alpha = 0.35 + 0.65 * (s.rate - rate_span.0) / span;
        let faded = format!(
            "{color}{:02x}",
            (alpha * 255.0).round().clamp(0.0, 255.0) as u8
        );
        chart.polyline(&values(s), &faded, false);
    }
    for (idx, sel) in selections.iter().enumerate() {
        legend.push((sel.clone(), PALETTE[idx % PALETTE.len()].to_string()));
    }
    chart.legend(&legend);
    chart.render()
}

fn usage_svg(summary: &ExperimentSummary, problem: &str) -> String {
    let usages: Vec<_> = summary
        .case_usage
        .iter()
        .filter(|u| u.problem == problem && !u.histogram.is_empty())
        .collect();
    let y_max = usages
        .iter()
        .flat_map(|u| u.histogram.iter().copied())
        .fold(0.1, f64::max);
    let mut chart = Chart::new(
        &format!("{problem}: fraction of cases used per selection event"),
        (0.0, 1.0),
        (0.0, y_max),
    );
    chart.axes("fraction of training cases considered", "fraction of events");
    let mut legend = Vec::new();
    let n = usages.len().max(1) as f64;
    for (i, u) in usages.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for (bin, f) in u.histogram.iter().enumerate() {
            if *f == 0.0 {
                continue;
            }
            let lo = bin as f64 / 10.0;
            let width = 0.1 / n;
            chart.bar(lo + i as f64 * width, lo + (i + 1) as f64 * width, *f, color);
        }
        legend.push((u.selection.clone(), color.to_string()));
    }
    chart.legend(&legend);
    chart.render()
}
