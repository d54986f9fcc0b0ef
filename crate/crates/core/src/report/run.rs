//! Execute a [`RunConfig`] and write its tables, figures and summary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::config::{Command, RunConfig};
use super::svg::{self, BoxGlyph, Layer, Panel};
use super::table::{Cell, Table};
use crate::error::{Error, Result};
use crate::estimator_lab::{box_summary, run_estimator_study_with};
use crate::gof_lab::{overlay, simulate_uniform_gof_with, COMPARISON_BINS, COMPARISON_RANGE};
use crate::mh_sampler::{density_histogram, run_chain, MhConfig, TargetDensity};
use crate::numerics::DEFAULT_REL_TOL;
use crate::pooled_testing::{
    cost_curve, divisor_candidates, optimal_pool_size_continuous, optimal_pool_size_integer, savings_ratio,
    simulate_pooling_with, PoolingDesign,
};
use crate::simkit::Harness;

pub const SUMMARY_FILE: &str = "summary.json";

/// Points in the pooling cost curve.
const CURVE_POINTS: usize = 161;
/// Histogram used for the sampler's density check.
pub const MH_BINS: usize = 40;
pub const MH_RANGE: (f64, f64) = (-3.0, 3.0);
const DENSITY_CURVE_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub root_seed: u64,
    pub timestamp_unix: u64,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub name: String,
    pub file: PathBuf,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub metadata: Metadata,
    pub tables: Vec<TableEntry>,
    /// Figure files actually written.
    pub figures: Vec<PathBuf>,
    /// Headline numbers, keyed `problem.quantity`.
    pub highlights: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

struct Writer<'a> {
    dir: &'a Path,
    report: ExperimentReport,
}

impl Writer<'_> {
    fn table(&mut self, table: Table) -> Result<()> {
        let file = self.dir.join(format!("{}.csv", table.name));
        table.write(&file)?;
        self.report.tables.push(TableEntry {
            name: table.name.clone(),
            file,
            rows: table.rows.len(),
        });
        Ok(())
    }

    fn figure(&mut self, name: &str, panels: &[Panel]) -> Result<()> {
        let file = self.dir.join(format!("{name}.svg"));
        std::fs::write(&file, svg::render(panels)).map_err(|e| Error::io(&file, e))?;
        self.report.figures.push(file);
        Ok(())
    }

    fn highlight(&mut self, key: &str, value: f64) {
        self.report.highlights.insert(key.to_owned(), value);
    }
}

/// Create `dir` and prove it is writable.
fn prepare_output_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".statlab-write-probe");
    std::fs::write(&probe, b"").map_err(|e| Error::io(dir, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
    Ok(())
}

pub fn run_and_report(config: &RunConfig) -> Result<ExperimentReport> {
    config.validate()?;
    prepare_output_dir(&config.output_dir)?;
    let harness = match config.workers {
        Some(n) => Harness::with_workers(n),
        None => Harness::new(),
    };
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut w = Writer {
        dir: &config.output_dir,
        report: ExperimentReport {
            metadata: Metadata {
                tool: "statlab".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                root_seed: config.root_seed,
                timestamp_unix,
                config: config.clone(),
            },
            tables: Vec::new(),
            figures: Vec::new(),
            highlights: BTreeMap::new(),
            warnings: Vec::new(),
        },
    };
    if config.command.includes(Command::Pooling) {
        pooling(config, &harness, &mut w)?;
    }
    if config.command.includes(Command::Mh) {
        mh(config, &mut w)?;
    }
    if config.command.includes(Command::Estimator) {
        estimator(config, &harness, &mut w)?;
    }
    if config.command.includes(Command::Gof) {
        gof(config, &harness, &mut w)?;
    }
    let path = config.output_dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(&w.report).expect("report serializes");
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(w.report)
}

fn pooling(config: &RunConfig, harness: &Harness, w: &mut Writer<'_>) -> Result<()> {
    let opts = &config.pooling;
    let (p, population) = (opts.prevalence, opts.population);
    let candidates = divisor_candidates(population, opts.k_range.1.floor() as u64)
        .into_iter()
        .filter(|&k| k as f64 >= opts.k_range.0)
        .collect::<Vec<_>>();
    let best = if candidates.is_empty() {
        w.report
            .warnings
            .push(format!("no divisor of N = {population} lies in the k range"));
        None
    } else {
        Some(optimal_pool_size_integer(population, p, &candidates)?)
    };

    let mut table = Table::new(
        "pooling_candidates",
        &[
            "k",
            "pools",
            "expected_tests_analytic",
            "simulated_mean",
            "simulated_sd",
            "standard_error",
            "z_score",
            "savings_ratio",
            "optimal",
        ],
    );
    for &k in &candidates {
        let design = PoolingDesign::from_population(population, k, p)?;
        let cost = simulate_pooling_with(harness, &design, opts.n_reps, config.root_seed)?;
        table.push(vec![
            k.into(),
            design.pools().into(),
            cost.expected_tests_analytic.into(),
            cost.simulated_mean.into(),
            cost.simulated_sd.into(),
            cost.standard_error().into(),
            cost.z_score().into(),
            cost.savings_ratio.into(),
            (best.map(|b| b.k) == Some(k)).into(),
        ]);
    }
    w.table(table)?;

    let curve = cost_curve(population, p, opts.k_range.0, opts.k_range.1, CURVE_POINTS)?;
    let mut table = Table::new("pooling_curve", &["k", "expected_tests", "savings_ratio"]);
    for pt in &curve {
        table.push(vec![pt.k.into(), pt.expected_tests.into(), savings_ratio(pt.k, p)?.into()]);
    }
    w.table(table)?;

    let mut table = Table::new("pooling_optimum", &["quantity", "value"]);
    table.push(vec!["prevalence".into(), p.into()]);
    table.push(vec!["population".into(), population.into()]);
    table.push(vec!["replicates".into(), opts.n_reps.into()]);
    let cont = if p > 0.0 && p < 1.0 {
        Some(optimal_pool_size_continuous(p)?)
    } else {
        w.report
            .warnings
            .push(format!("continuous optimum undefined at prevalence {p}"));
        None
    };
    if let Some(c) = cont {
        table.push(vec!["k_continuous".into(), c.k.into()]);
        table.push(vec!["cost_per_person_continuous".into(), c.cost_per_person.into()]);
        table.push(vec![
            "stationary_point_bisection".into(),
            c.stationary_point.unwrap_or(f64::NAN).into(),
        ]);
        table.push(vec!["boundary".into(), c.boundary.into()]);
        table.push(vec!["pooling_helps".into(), c.pooling_helps.into()]);
        w.highlight("pooling.k_continuous", c.k);
        if c.boundary {
            w.report
                .warnings
                .push(format!("no interior optimum at prevalence {p}; pool size clamped to {}", c.k));
        }
    }
    if let Some(b) = best {
        table.push(vec!["k_integer".into(), b.k.into()]);
        table.push(vec!["expected_tests_integer".into(), b.expected_tests.into()]);
        let ratio = savings_ratio(b.k as f64, p)?;
        table.push(vec!["savings_ratio_integer".into(), ratio.into()]);
        w.highlight("pooling.k_integer", b.k as f64);
        w.highlight("pooling.savings_ratio", ratio);
    }
    w.table(table)?;

    if config.emit_figures {
        let panel = Panel::new(
            &format!("Expected tests by pool size (N={population}, p={p})"),
            "number in pool (k)",
            "expected number of tests",
        )
        .layer(Layer::Line {
            name: "expected_tests".into(),
            points: curve.iter().map(|c| (c.k, c.expected_tests)).collect(),
            dashed: false,
        });
        w.figure("pooling_cost_curve", &[panel])?;
    }
    Ok(())
}

fn mh(config: &RunConfig, w: &mut Writer<'_>) -> Result<()> {
    let density = TargetDensity::normalize(DEFAULT_REL_TOL)?;
    let chain = run_chain(&config.mh, config.root_seed)?;
    let summary = chain.summary();
    let second_moment = density.second_moment(DEFAULT_REL_TOL)?;
    let hist = density_histogram(&chain.samples, &density, MH_BINS, MH_RANGE)?;
    let distance = hist.iter().map(|b| (b.empirical - b.expected).abs()).fold(0.0, f64::max);
    let short = config.mh.below_defaults();
    if short {
        let d = MhConfig::default();
        w.report.warnings.push(format!(
            "short chain: burn-in {} / samples {} below defaults {} / {}",
            config.mh.burn_in, config.mh.n_samples, d.burn_in, d.n_samples
        ));
    }

    let mut table = Table::new("mh_summary", &["quantity", "value"]);
    let rows: [(&str, Cell); 14] = [
        ("unnormalized_mass", density.mass().value.into()),
        ("mass_abs_error", density.mass().abs_error.into()),
        ("normalizing_constant", density.normalizing_constant().into()),
        ("true_variance", second_moment.into()),
        ("sample_mean", summary.mean.into()),
        ("sample_variance", summary.variance.into()),
        ("positive_fraction", summary.positive_fraction.into()),
        ("acceptance_rate", chain.acceptance_rate.into()),
        ("density_distance", distance.into()),
        ("burn_in", config.mh.burn_in.into()),
        ("samples", config.mh.n_samples.into()),
        ("proposal_sd", config.mh.proposal_sd.into()),
        ("initial_x", config.mh.initial_x.into()),
        ("below_defaults", short.into()),
    ];
    for (k, v) in rows {
        table.push(vec![k.into(), v]);
    }
    w.table(table)?;
    w.highlight("mh.normalizing_constant", density.normalizing_constant());
    w.highlight("mh.acceptance_rate", chain.acceptance_rate);
    w.highlight("mh.density_distance", distance);

    let mut table = Table::new("mh_histogram", &["lo", "hi", "empirical_density", "true_density_bin_mean"]);
    for b in &hist {
        table.push(vec![b.lo.into(), b.hi.into(), b.empirical.into(), b.expected.into()]);
    }
    w.table(table)?;

    let (lo, hi) = MH_RANGE;
    let curve: Vec<(f64, f64)> = (0..DENSITY_CURVE_POINTS)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (DENSITY_CURVE_POINTS - 1) as f64;
            (x, density.pdf(x))
        })
        .collect();
    let mut table = Table::new("mh_density_curve", &["x", "pdf"]);
    for &(x, y) in &curve {
        table.push(vec![x.into(), y.into()]);
    }
    w.table(table)?;

    if config.emit_figures {
        let panel = Panel::new("True density and simulated draws", "x", "density")
            .layer(Layer::Bars {
                name: "samples".into(),
                bars: hist.iter().map(|b| (b.lo, b.hi, b.empirical)).collect(),
            })
            .layer(Layer::Line {
                name: "true_density".into(),
                points: curve,
                dashed: false,
            });
        w.figure("mh_density", &[panel])?;
    }
    Ok(())
}

fn estimator(config: &RunConfig, harness: &Harness, w: &mut Writer<'_>) -> Result<()> {
    let study = run_estimator_study_with(harness, &config.estimator, config.root_seed)?;
    let mut dist = Table::new("estimator_distributions", &["n", "replicate", "sigma_iqr", "sigma_s"]);
    let mut summary = Table::new(
        "estimator_summary",
        &["n", "estimator", "mean", "sd", "min", "q1", "median", "q3", "max", "iqr"],
    );
    let mut boxes = Vec::new();
    for sc in &study.scenarios {
        for (i, (a, b)) in sc.iqr_estimates.iter().zip(&sc.s_estimates).enumerate() {
            dist.push(vec![sc.n.into(), i.into(), (*a).into(), (*b).into()]);
        }
        for (name, values) in [("iqr", &sc.iqr_estimates), ("s", &sc.s_estimates)] {
            let (min, s, max) = box_summary(values)?;
            summary.push(vec![
                sc.n.into(),
                name.into(),
                s.mean.into(),
                s.sd.into(),
                min.into(),
                s.q1.into(),
                s.median.into(),
                s.q3.into(),
                max.into(),
                s.iqr.into(),
            ]);
            w.highlight(&format!("estimator.n{}.{name}.iqr", sc.n), s.iqr);
            boxes.push(BoxGlyph {
                label: format!("n={} ({})", sc.n, if name == "iqr" { "IQR" } else { "S" }),
                min,
                q1: s.q1,
                median: s.median,
                q3: s.q3,
                max,
            });
        }
    }
    w.table(dist)?;
    w.table(summary)?;
    if config.emit_figures {
        let panel = Panel::new(
            "Distribution of sample estimates by estimator and sample size",
            "",
            "distribution of sigma-hat",
        )
        .layer(Layer::Boxes { boxes })
        .layer(Layer::HLine {
            name: "true_sigma".into(),
            y: config.estimator.true_sd,
        });
        w.figure("estimator_boxplot", &[panel])?;
    }
    Ok(())
}

fn gof(config: &RunConfig, harness: &Harness, w: &mut Writer<'_>) -> Result<()> {
    let result = simulate_uniform_gof_with(harness, &config.gof, config.root_seed)?;
    let mut stats = Table::new("gof_statistics", &["n", "replicate", "statistic"]);
    let mut summary = Table::new(
        "gof_summary",
        &["n", "bins", "df", "expected_count", "mean", "mean_se", "variance", "shape_distance"],
    );
    let mut overlay_table = Table::new("gof_overlay", &["n", "lo", "hi", "empirical_density", "chisq_density_bin_mean"]);
    let mut panels = Vec::new();
    for sc in &result.scenarios {
        for (i, t) in sc.statistics.iter().enumerate() {
            stats.push(vec![sc.n.into(), i.into(), (*t).into()]);
        }
        summary.push(vec![
            sc.n.into(),
            config.gof.bins.into(),
            u64::from(result.df).into(),
            sc.expected_count.into(),
            sc.mean.into(),
            sc.mean_se.into(),
            sc.variance.into(),
            sc.shape_distance.into(),
        ]);
        w.highlight(&format!("gof.n{}.mean", sc.n), sc.mean);
        w.highlight(&format!("gof.n{}.shape_distance", sc.n), sc.shape_distance);
        let bins = overlay(&sc.statistics, result.df, COMPARISON_BINS, COMPARISON_RANGE)?;
        for b in &bins {
            overlay_table.push(vec![sc.n.into(), b.lo.into(), b.hi.into(), b.empirical.into(), b.reference.into()]);
        }
        panels.push(
            Panel::new(
                &format!("N={}, {} bins", sc.n, config.gof.bins),
                "chi-square statistic",
                "density",
            )
            .layer(Layer::Bars {
                name: "simulated".into(),
                bars: bins.iter().map(|b| (b.lo, b.hi, b.empirical)).collect(),
            })
            .layer(Layer::Line {
                name: "chisq_reference".into(),
                points: bins.iter().map(|b| (0.5 * (b.lo + b.hi), b.reference)).collect(),
                dashed: true,
            }),
        );
    }
    w.table(stats)?;
    w.table(summary)?;
    w.table(overlay_table)?;
    if config.emit_figures {
        w.figure("gof_overlay", &panels)?;
    }
    Ok(())
}
