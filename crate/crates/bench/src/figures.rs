//! Analysis tables and plot data, one sub-pipeline per figure. Each figure
//! writes `analysis/<figure>.csv` and `analysis/<figure>.json`; figures
//! that also summarize wall-clock times write `analysis/<figure>_timing.csv`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use max2sat_core::analysis::{
    data_collapse, density_histogram, fit, percentile_scaling, percentiles_then_tts, power_law_fit, psat_curve,
    rank_correlation, rho_from_violations, scaling_window, tts, tts_then_percentiles, CollapseForm, FitForm, FitModel,
    FitPoint, HardnessOrder, PlotData, Repetitions, Series, WindowResult,
};
use max2sat_core::anneal::success_histogram;

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::pipeline::load_exact;
use crate::table;
use crate::tables::{read_csv, write_json, write_table, ExactRow, ExactTimingRow, Header, Layout, ReadRow, RunStatsRow};

/// Inapproximability constant for MAX 2-SAT reported alongside ρ′.
const RHO_HARDNESS: f64 = 21.0 / 22.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Figure {
    Psat,
    Window,
    TtsScaling,
    Collapse,
    Percentiles,
    Correlation,
    Density,
    Rho,
    SuccessHist,
    FixedM,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Psat,
        Figure::Window,
        Figure::TtsScaling,
        Figure::Collapse,
        Figure::Percentiles,
        Figure::Correlation,
        Figure::Density,
        Figure::Rho,
        Figure::SuccessHist,
        Figure::FixedM,
    ];

    /// Accepted `--figure` values, including `all`.
    pub const NAMES: [&'static str; 11] = [
        "psat",
        "window",
        "tts-scaling",
        "collapse",
        "percentiles",
        "correlation",
        "density",
        "rho",
        "success-hist",
        "fixed-m",
        "all",
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[Self::ALL.iter().position(|&f| f == self).expect("listed")]
    }

    fn needs_runstats(self) -> bool {
        !matches!(self, Figure::Psat | Figure::Window | Figure::FixedM)
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown figure {s:?}; expected one of {}", Figure::NAMES.join(", "))))
    }
}

/// Which figures to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    One(Figure),
    All,
}

impl FromStr for Selection {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            Ok(Selection::All)
        } else {
            s.parse().map(Selection::One)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeReport {
    pub written: Vec<PathBuf>,
    /// Figures left out of `all` for lack of input tables.
    pub skipped: Vec<(Figure, String)>,
}

/// Every result table joined per instance.
struct Inputs {
    exact: Vec<ExactRow>,
    runstats: Option<HashMap<String, RunStatsRow>>,
    timing: Option<HashMap<String, u64>>,
    reads_path: PathBuf,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    layout: Layout,
    inputs: Inputs,
    report: AnalyzeReport,
}

/// Positive clause densities order like their IEEE bit patterns, which
/// gives a total order for grouping.
fn akey(alpha: f64) -> u64 {
    alpha.to_bits()
}

fn is_fixed_m(ensemble: &str) -> bool {
    ensemble.starts_with("fixed_m")
}

fn median_u64(mut xs: Vec<u64>) -> f64 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2] as f64
    } else {
        (xs[n / 2 - 1] as f64 + xs[n / 2] as f64) / 2.0
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

type GroupKey = (String, usize, u64);

/// (α, P(SAT)) points per (ensemble, N).
type PsatCurves = BTreeMap<(String, usize), Vec<(f64, f64)>>;

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.layout.analysis_dir().join(name)
    }

    fn table<T: serde::Serialize + Header>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let path = self.path(&format!("{name}.csv"));
        write_table(&path, rows)?;
        self.report.written.push(path);
        Ok(())
    }

    fn plot(&mut self, name: &str, plot: &PlotData) -> Result<()> {
        let path = self.path(&format!("{name}.json"));
        write_json(&path, plot)?;
        self.report.written.push(path);
        Ok(())
    }

    fn runstats(&self) -> Result<&HashMap<String, RunStatsRow>> {
        self.inputs
            .runstats
            .as_ref()
            .ok_or_else(|| BenchError::Validation("runstats.csv not found; run `anneal` first".into()))
    }

    fn p_success(&self, id: &str) -> Result<f64> {
        self.runstats()?
            .get(id)
            .map(|r| r.p_success)
            .ok_or_else(|| BenchError::Validation(format!("no annealer statistics for {id}")))
    }

    /// Exact rows of the fixed-α ensembles grouped by (ensemble, N, α).
    fn alpha_groups(&self) -> BTreeMap<GroupKey, Vec<&ExactRow>> {
        let mut groups: BTreeMap<GroupKey, Vec<&ExactRow>> = BTreeMap::new();
        for r in self.inputs.exact.iter().filter(|r| !is_fixed_m(&r.ensemble)) {
            groups.entry((r.ensemble.clone(), r.n, akey(r.alpha))).or_default().push(r);
        }
        groups
    }

    /// P(SAT) curve per (ensemble, N).
    fn psat_curves(&self) -> Result<PsatCurves> {
        let mut optima: BTreeMap<(String, usize), Vec<(f64, usize)>> = BTreeMap::new();
        for r in self.inputs.exact.iter().filter(|r| !is_fixed_m(&r.ensemble)) {
            optima.entry((r.ensemble.clone(), r.n)).or_default().push((r.alpha, r.optimum));
        }
        optima
            .into_iter()
            .map(|(k, v)| Ok((k, psat_curve(&v)?.into_iter().map(|p| (p.alpha, p.p_sat)).collect())))
            .collect()
    }
}

table!(PsatRow {
    ensemble: String,
    n: usize,
    alpha: f64,
    instances: usize,
    satisfiable: usize,
    p_sat: f64,
});

fn fig_psat(ctx: &mut Ctx) -> Result<()> {
    let mut optima: BTreeMap<(String, usize), Vec<(f64, usize)>> = BTreeMap::new();
    for r in ctx.inputs.exact.iter().filter(|r| !is_fixed_m(&r.ensemble)) {
        optima.entry((r.ensemble.clone(), r.n)).or_default().push((r.alpha, r.optimum));
    }
    let mut rows = Vec::new();
    let mut plot = PlotData::new("psat", "alpha", "P(SAT)");
    for ((ensemble, n), v) in optima {
        let curve = psat_curve(&v)?;
        plot = plot.with_series(format!("{ensemble} N={n}"), curve.iter().map(|p| (p.alpha, p.p_sat)));
        rows.extend(curve.into_iter().map(|p| PsatRow {
            ensemble: ensemble.clone(),
            n,
            alpha: p.alpha,
            instances: p.instances,
            satisfiable: p.satisfiable,
            p_sat: p.p_sat,
        }));
    }
    ctx.table("psat", &rows)?;
    ctx.plot("psat", &plot)
}

table!(WindowRow {
    ensemble: String,
    n: usize,
    alpha_left: Option<f64>,
    alpha_right: Option<f64>,
    width: Option<f64>,
});

table!(WindowFitRow {
    ensemble: String,
    sizes: usize,
    exponent: f64,
    prefactor: f64,
    r_squared: f64,
});

fn fig_window(ctx: &mut Ctx) -> Result<()> {
    let (high, low) = (ctx.cfg.analysis.window_high, ctx.cfg.analysis.window_low);
    let mut rows = Vec::new();
    let mut widths: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for ((ensemble, n), curve) in ctx.psat_curves()? {
        let (l, r, w) = match scaling_window(&curve, high, low) {
            Ok(WindowResult::Defined(w)) => {
                widths.entry(ensemble.clone()).or_default().push((n as f64, w.width));
                (Some(w.alpha_left), Some(w.alpha_right), Some(w.width))
            }
            Ok(WindowResult::Undefined { left, right }) => (left, right, None),
            // a single sampled α cannot bracket a crossing
            Err(_) => (None, None, None),
        };
        rows.push(WindowRow {
            ensemble,
            n,
            alpha_left: l,
            alpha_right: r,
            width: w,
        });
    }
    let mut fits = Vec::new();
    let mut plot = PlotData::new("window", "N", "window width");
    for (ensemble, pts) in widths {
        plot = plot.with_series(ensemble.clone(), pts.iter().copied());
        if pts.len() >= 2 {
            if let Ok(fit) = power_law_fit(&pts) {
                plot = plot.with_series(
                    format!("{ensemble} fit N^{:.3}", fit.exponent),
                    pts.iter().map(|&(n, _)| (n, fit.prefactor * n.powf(fit.exponent))),
                );
                fits.push(WindowFitRow {
                    ensemble,
                    sizes: pts.len(),
                    exponent: fit.exponent,
                    prefactor: fit.prefactor,
                    r_squared: fit.r_squared,
                });
            }
        }
    }
    ctx.table("window", &rows)?;
    ctx.table("window_fit", &fits)?;
    ctx.plot("window", &plot)
}

table!(TtsRow {
    ensemble: String,
    n: usize,
    alpha: f64,
    instances: usize,
    mean_p_success: f64,
    repetitions: Option<u64>,
    tts_ms: Option<f64>,
    median_nodes: f64,
});

table!(FitRow {
    ensemble: String,
    target: String,
    A: f64,
    B: f64,
    gamma: f64,
    delta: f64,
    r_squared: f64,
    converged: bool,
    points: usize,
});

table!(MedianTimingRow {
    ensemble: String,
    n: usize,
    alpha: f64,
    median_elapsed_ms: f64,
});

/// Mean-p time to solution per (ensemble, N, α).
fn tts_rows(ctx: &Ctx) -> Result<Vec<TtsRow>> {
    let t_f = ctx.cfg.anneal.t_f();
    let mut rows = Vec::new();
    for ((ensemble, n, _), group) in ctx.alpha_groups() {
        let ps = group.iter().map(|r| ctx.p_success(&r.instance_id)).collect::<Result<Vec<_>>>()?;
        let p = mean(&ps);
        let rec = tts(p, ctx.cfg.analysis.p_desired, t_f)?;
        rows.push(TtsRow {
            ensemble,
            n,
            alpha: group[0].alpha,
            instances: group.len(),
            mean_p_success: p,
            repetitions: rec.k.finite(),
            tts_ms: rec.t_soln.map(|d| d.as_secs_f64() * 1e3),
            median_nodes: median_u64(group.iter().map(|r| r.nodes_expanded).collect()),
        });
    }
    Ok(rows)
}

/// TTS-ansatz fits of annealer time to solution and B&B node counts.
fn tts_fits(rows: &[TtsRow]) -> Vec<(FitRow, FitModel)> {
    let mut by_ensemble: BTreeMap<&str, Vec<&TtsRow>> = BTreeMap::new();
    for r in rows {
        by_ensemble.entry(&r.ensemble).or_default().push(r);
    }
    let mut out = Vec::new();
    for (ensemble, rs) in by_ensemble {
        let targets: [(&str, Vec<FitPoint>); 2] = [
            (
                "anneal_tts_ms",
                rs.iter()
                    .filter_map(|r| r.tts_ms.map(|t| FitPoint::new(r.alpha, r.n as f64, t)))
                    .collect(),
            ),
            (
                "bnb_median_nodes",
                rs.iter().map(|r| FitPoint::new(r.alpha, r.n as f64, r.median_nodes)).collect(),
            ),
        ];
        for (target, data) in targets {
            if data.len() < 4 {
                continue;
            }
            let Ok(m) = fit(FitForm::TtsAnsatz, &data, &[]) else { continue };
            let p = &m.parameters;
            out.push((
                FitRow {
                    ensemble: ensemble.to_string(),
                    target: target.to_string(),
                    A: p[0],
                    B: p[1],
                    gamma: p[2],
                    delta: p[3],
                    r_squared: m.r_squared,
                    converged: m.converged,
                    points: data.len(),
                },
                m,
            ));
        }
    }
    out
}

fn median_timing_rows(ctx: &Ctx) -> Option<Vec<MedianTimingRow>> {
    let timing = ctx.inputs.timing.as_ref()?;
    Some(
        ctx.alpha_groups()
            .into_iter()
            .map(|((ensemble, n, _), group)| MedianTimingRow {
                ensemble,
                n,
                alpha: group[0].alpha,
                median_elapsed_ms: median_u64(group.iter().filter_map(|r| timing.get(&r.instance_id).copied()).collect())
                    / 1e6,
            })
            .collect(),
    )
}

fn fig_tts_scaling(ctx: &mut Ctx) -> Result<()> {
    let rows = tts_rows(ctx)?;
    let fits = tts_fits(&rows);
    let mut plot = PlotData::new("tts-scaling", "N", "time to solution [ms] / median B&B nodes");
    let mut series: BTreeMap<(String, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        if let Some(t) = r.tts_ms {
            series.entry((format!("{} anneal alpha={:.2}", r.ensemble, r.alpha), akey(r.alpha))).or_default().push((r.n as f64, t));
        }
        series
            .entry((format!("{} bnb-nodes alpha={:.2}", r.ensemble, r.alpha), akey(r.alpha)))
            .or_default()
            .push((r.n as f64, r.median_nodes));
    }
    for ((label, _), pts) in series {
        plot = plot.with_series(label, pts);
    }
    let fit_rows: Vec<FitRow> = fits.into_iter().map(|(r, _)| r).collect();
    ctx.table("tts-scaling", &rows)?;
    ctx.table("tts-scaling_fit", &fit_rows)?;
    if let Some(timing) = median_timing_rows(ctx) {
        ctx.table("tts-scaling_timing", &timing)?;
    }
    ctx.plot("tts-scaling", &plot)
}

table!(CollapseRow {
    ensemble: String,
    form: String,
    exponent: f64,
    score: f64,
    best: bool,
});

fn fig_collapse(ctx: &mut Ctx) -> Result<()> {
    let grid = ctx.cfg.analysis.collapse_grid.clone();
    let rows_tts = tts_rows(ctx)?;
    let fits = tts_fits(&rows_tts);
    let mut rows = Vec::new();
    let mut plot = PlotData::new("collapse", "exponent", "normalized within-group residual");
    let mut by_ensemble: BTreeMap<&str, Vec<&TtsRow>> = BTreeMap::new();
    for r in &rows_tts {
        by_ensemble.entry(&r.ensemble).or_default().push(r);
    }
    for (ensemble, rs) in by_ensemble {
        let prob: Vec<FitPoint> = rs.iter().map(|r| FitPoint::new(r.alpha, r.n as f64, r.mean_p_success)).collect();
        let mut attempts = vec![("probability", CollapseForm::Probability, prob)];
        if let Some((_, m)) = fits
            .iter()
            .find(|(f, _)| f.ensemble == ensemble && f.target == "anneal_tts_ms")
        {
            let a = m.parameters[0];
            let pts: Vec<FitPoint> = rs
                .iter()
                .filter_map(|r| r.tts_ms.map(|t| FitPoint::new(r.alpha, r.n as f64, t)))
                .collect();
            attempts.push(("time_to_solution", CollapseForm::TimeToSolution { a }, pts));
        }
        for (name, form, pts) in attempts {
            // too few curves, or values the transform cannot take
            let Ok(res) = data_collapse(&pts, form, &grid) else { continue };
            plot = plot.with_series(format!("{ensemble} {name}"), res.scores.iter().copied());
            rows.extend(res.scores.iter().map(|&(e, s)| CollapseRow {
                ensemble: ensemble.to_string(),
                form: name.to_string(),
                exponent: e,
                score: s,
                best: e == res.exponent,
            }));
        }
    }
    ctx.table("collapse", &rows)?;
    ctx.plot("collapse", &plot)
}

table!(PercentileRow {
    ensemble: String,
    metric: String,
    alpha: f64,
    level: f64,
    n: usize,
    value: Option<f64>,
});

fn fig_percentiles(ctx: &mut Ctx) -> Result<()> {
    let target = ctx.cfg.analysis.percentile_alpha;
    let levels = ctx.cfg.analysis.percentiles.clone();
    let p_desired = ctx.cfg.analysis.p_desired;
    let mut by_ensemble: BTreeMap<String, Vec<&ExactRow>> = BTreeMap::new();
    for r in ctx.inputs.exact.iter().filter(|r| !is_fixed_m(&r.ensemble)) {
        by_ensemble.entry(r.ensemble.clone()).or_default().push(r);
    }
    let mut rows = Vec::new();
    let mut plot = PlotData::new("percentiles", "N", "repetitions / B&B nodes");
    for (ensemble, all) in by_ensemble {
        // the sampled density closest to the requested one
        let alpha = all
            .iter()
            .map(|r| r.alpha)
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
            .expect("group is nonempty");
        let mut p_groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut node_groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in all.iter().filter(|r| r.alpha == alpha) {
            p_groups.entry(r.n).or_default().push(ctx.p_success(&r.instance_id)?);
            node_groups.entry(r.n).or_default().push(r.nodes_expanded as f64);
        }
        let reps = |k: Repetitions| k.finite().map(|k| k as f64);
        let curves = [
            ("anneal_repetitions_percentile_first", percentiles_then_tts(&p_groups, &levels, p_desired)?),
            ("anneal_repetitions_tts_first", tts_then_percentiles(&p_groups, &levels, p_desired)?),
        ];
        for (metric, cs) in curves {
            for c in cs {
                let pts: Vec<(usize, Option<f64>)> = c.points.iter().map(|&(n, k)| (n, reps(k))).collect();
                if metric.ends_with("percentile_first") {
                    plot = plot.with_series(
                        format!("{ensemble} anneal q={}", c.level),
                        pts.iter().filter_map(|&(n, v)| v.map(|v| (n as f64, v))),
                    );
                }
                rows.extend(pts.into_iter().map(|(n, value)| PercentileRow {
                    ensemble: ensemble.clone(),
                    metric: metric.to_string(),
                    alpha,
                    level: c.level,
                    n,
                    value,
                }));
            }
        }
        for c in percentile_scaling(&node_groups, &levels, HardnessOrder::Ascending)? {
            plot = plot.with_series(
                format!("{ensemble} bnb q={}", c.level),
                c.points.iter().map(|&(n, v)| (n as f64, v)),
            );
            rows.extend(c.points.iter().map(|&(n, v)| PercentileRow {
                ensemble: ensemble.clone(),
                metric: "bnb_nodes".to_string(),
                alpha,
                level: c.level,
                n,
                value: Some(v),
            }));
        }
    }
    ctx.table("percentiles", &rows)?;
    ctx.plot("percentiles", &plot)
}

table!(CorrelationRow {
    ensemble: String,
    n: usize,
    alpha: f64,
    instances: usize,
    spearman: Option<f64>,
});

table!(CopulaRow {
    ensemble: String,
    n: usize,
    alpha: f64,
    instance_id: String,
    rank_anneal: usize,
    rank_bnb: usize,
});

fn fig_correlation(ctx: &mut Ctx) -> Result<()> {
    let mut rows = Vec::new();
    let mut timing_rows = Vec::new();
    let mut copula = Vec::new();
    let mut plot = PlotData::new("correlation", "annealer hardness rank", "B&B nodes rank");
    for ((ensemble, n, _), group) in ctx.alpha_groups() {
        let alpha = group[0].alpha;
        // annealer hardness: failure probability, so agreement is positive
        let hard: Vec<f64> = group
            .iter()
            .map(|r| ctx.p_success(&r.instance_id).map(|p| 1.0 - p))
            .collect::<Result<_>>()?;
        let nodes: Vec<f64> = group.iter().map(|r| r.nodes_expanded as f64).collect();
        let spearman = if group.len() >= 2 {
            let rc = rank_correlation(&hard, &nodes)?;
            copula.extend(group.iter().zip(&rc.copula).map(|(r, &(a, b))| CopulaRow {
                ensemble: ensemble.clone(),
                n,
                alpha,
                instance_id: r.instance_id.clone(),
                rank_anneal: a,
                rank_bnb: b,
            }));
            plot.push(Series {
                label: format!("{ensemble} N={n} alpha={alpha:.2}"),
                x: rc.copula.iter().map(|c| c.0 as f64).collect(),
                y: rc.copula.iter().map(|c| c.1 as f64).collect(),
                z: None,
            });
            rc.spearman.value()
        } else {
            None
        };
        rows.push(CorrelationRow {
            ensemble: ensemble.clone(),
            n,
            alpha,
            instances: group.len(),
            spearman,
        });
        if let Some(timing) = &ctx.inputs.timing {
            let elapsed: Vec<f64> = group
                .iter()
                .map(|r| timing.get(&r.instance_id).copied().unwrap_or(0) as f64)
                .collect();
            let spearman = if group.len() >= 2 {
                rank_correlation(&hard, &elapsed)?.spearman.value()
            } else {
                None
            };
            timing_rows.push(CorrelationRow {
                ensemble,
                n,
                alpha,
                instances: group.len(),
                spearman,
            });
        }
    }
    ctx.table("correlation", &rows)?;
    ctx.table("correlation_copula", &copula)?;
    if ctx.inputs.timing.is_some() {
        ctx.table("correlation_timing", &timing_rows)?;
    }
    ctx.plot("correlation", &plot)
}

table!(DensityRow {
    ensemble: String,
    metric: String,
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    count: u64,
    density: f64,
});

fn density_rows(ensemble: &str, metric: &str, x: &[f64], y: &[f64], bins: (usize, usize)) -> Result<(Vec<DensityRow>, Series)> {
    let h = density_histogram(x, y, bins.0, bins.1)?;
    let mut rows = Vec::new();
    let mut series = Series {
        label: format!("{ensemble} {metric}"),
        x: Vec::new(),
        y: Vec::new(),
        z: Some(Vec::new()),
    };
    for (ix, (col, dens)) in h.counts.iter().zip(&h.density).enumerate() {
        for (iy, (&count, &d)) in col.iter().zip(dens).enumerate() {
            let (x_lo, x_hi, y_lo, y_hi) = (h.x_edges[ix], h.x_edges[ix + 1], h.y_edges[iy], h.y_edges[iy + 1]);
            series.x.push((x_lo + x_hi) / 2.0);
            series.y.push((y_lo + y_hi) / 2.0);
            series.z.as_mut().expect("set above").push(d);
            rows.push(DensityRow {
                ensemble: ensemble.to_string(),
                metric: metric.to_string(),
                x_lo,
                x_hi,
                y_lo,
                y_hi,
                count,
                density: d,
            });
        }
    }
    Ok((rows, series))
}

fn fig_density(ctx: &mut Ctx) -> Result<()> {
    let bins = ctx.cfg.analysis.density_bins;
    let mut by_ensemble: BTreeMap<String, Vec<&ExactRow>> = BTreeMap::new();
    for r in ctx.inputs.exact.iter().filter(|r| !is_fixed_m(&r.ensemble)) {
        by_ensemble.entry(r.ensemble.clone()).or_default().push(r);
    }
    let mut rows = Vec::new();
    let mut timing_rows = Vec::new();
    let mut plot = PlotData::new("density", "alpha", "metric");
    for (ensemble, rs) in by_ensemble {
        let x: Vec<f64> = rs.iter().map(|r| r.alpha).collect();
        let fail: Vec<f64> = rs
            .iter()
            .map(|r| ctx.p_success(&r.instance_id).map(|p| 1.0 - p))
            .collect::<Result<_>>()?;
        let nodes: Vec<f64> = rs.iter().map(|r| (r.nodes_expanded.max(1) as f64).log10()).collect();
        for (metric, y) in [("anneal_failure_probability", fail), ("bnb_log10_nodes", nodes)] {
            let (r, s) = density_rows(&ensemble, metric, &x, &y, bins)?;
            rows.extend(r);
            plot.push(s);
        }
        if let Some(timing) = &ctx.inputs.timing {
            let ms: Vec<f64> = rs
                .iter()
                .map(|r| (timing.get(&r.instance_id).copied().unwrap_or(0) as f64 / 1e6).max(1e-6).log10())
                .collect();
            timing_rows.extend(density_rows(&ensemble, "bnb_log10_elapsed_ms", &x, &ms, bins)?.0);
        }
    }
    ctx.table("density", &rows)?;
    if ctx.inputs.timing.is_some() {
        ctx.table("density_timing", &timing_rows)?;
    }
    ctx.plot("density", &plot)
}

table!(RhoRow {
    ensemble: String,
    n: usize,
    alpha: f64,
    reads: usize,
    failed_reads: usize,
    mean_rho: Option<f64>,
    min_rho: Option<f64>,
    below_21_22: usize,
});

fn fig_rho(ctx: &mut Ctx) -> Result<()> {
    ctx.runstats()?;
    let path = &ctx.inputs.reads_path;
    if !path.exists() {
        return Err(BenchError::Validation(format!("{} not found; run `anneal` first", path.display())));
    }
    let reads: Vec<ReadRow> = read_csv(path)?;
    let exact: HashMap<&str, &ExactRow> = ctx.inputs.exact.iter().map(|r| (r.instance_id.as_str(), r)).collect();
    let mut per_group: BTreeMap<GroupKey, (f64, usize, Vec<f64>)> = BTreeMap::new();
    for read in &reads {
        let Some(e) = exact.get(read.instance_id.as_str()) else {
            return Err(BenchError::Validation(format!("read for unknown instance {}", read.instance_id)));
        };
        if is_fixed_m(&e.ensemble) {
            continue;
        }
        let g = per_group.entry((e.ensemble.clone(), e.n, akey(e.alpha))).or_insert((e.alpha, 0, Vec::new()));
        g.1 += 1;
        if read.violations != e.optimum {
            g.2.push(rho_from_violations(e.m, read.violations, e.optimum)?);
        }
    }
    let mut rows = Vec::new();
    let mut all_rhos: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for ((ensemble, n, _), (alpha, total, rhos)) in per_group {
        let failed = rhos.len();
        if failed > 0 {
            all_rhos.entry(ensemble.clone()).or_default().push((alpha, mean(&rhos)));
        }
        rows.push(RhoRow {
            ensemble,
            n,
            alpha,
            reads: total,
            failed_reads: failed,
            mean_rho: (failed > 0).then(|| mean(&rhos)),
            min_rho: rhos.iter().copied().reduce(f64::min),
            below_21_22: rhos.iter().filter(|&&r| r < RHO_HARDNESS).count(),
        });
    }
    let mut plot = PlotData::new("rho", "alpha", "mean rho' of failed reads");
    for (ensemble, pts) in all_rhos {
        plot = plot.with_series(ensemble, pts);
    }
    ctx.table("rho", &rows)?;
    ctx.plot("rho", &plot)
}

table!(SuccessHistRow {
    ensemble: String,
    n: usize,
    alpha: f64,
    p_bin: f64,
    fraction: f64,
});

fn fig_success_hist(ctx: &mut Ctx) -> Result<()> {
    let reads = ctx.cfg.anneal.reads;
    let mut rows = Vec::new();
    let mut plot = PlotData::new("success-hist", "success probability", "fraction of instances");
    for ((ensemble, n, _), group) in ctx.alpha_groups() {
        let ps = group.iter().map(|r| ctx.p_success(&r.instance_id)).collect::<Result<Vec<_>>>()?;
        let alpha = group[0].alpha;
        let hist = success_histogram(&ps, reads);
        plot = plot.with_series(format!("{ensemble} N={n} alpha={alpha:.2}"), hist.iter().copied());
        rows.extend(hist.into_iter().map(|(p_bin, fraction)| SuccessHistRow {
            ensemble: ensemble.clone(),
            n,
            alpha,
            p_bin,
            fraction,
        }));
    }
    ctx.table("success-hist", &rows)?;
    ctx.plot("success-hist", &plot)
}

table!(FixedMRow {
    ensemble: String,
    m: usize,
    n: usize,
    instances: usize,
    median_nodes: f64,
    mean_p_success: Option<f64>,
    tts_ms: Option<f64>,
});

table!(FixedMTimingRow {
    ensemble: String,
    m: usize,
    n: usize,
    median_elapsed_ms: f64,
});

fn fig_fixed_m(ctx: &mut Ctx) -> Result<()> {
    let mut groups: BTreeMap<(String, usize, usize), Vec<&ExactRow>> = BTreeMap::new();
    for r in ctx.inputs.exact.iter().filter(|r| is_fixed_m(&r.ensemble)) {
        groups.entry((r.ensemble.clone(), r.m, r.n)).or_default().push(r);
    }
    let t_f = ctx.cfg.anneal.t_f();
    let mut rows = Vec::new();
    let mut timing_rows = Vec::new();
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for ((ensemble, m, n), group) in groups {
        let median_nodes = median_u64(group.iter().map(|r| r.nodes_expanded).collect());
        let p = match &ctx.inputs.runstats {
            Some(rs) => {
                let ps: Option<Vec<f64>> = group.iter().map(|r| rs.get(&r.instance_id).map(|s| s.p_success)).collect();
                ps.map(|ps| mean(&ps))
            }
            None => None,
        };
        let tts_ms = match p {
            Some(p) => tts(p, ctx.cfg.analysis.p_desired, t_f)?.t_soln.map(|d: Duration| d.as_secs_f64() * 1e3),
            None => None,
        };
        series.entry(format!("{ensemble} M={m} bnb-nodes")).or_default().push((n as f64, median_nodes));
        if let Some(t) = tts_ms {
            series.entry(format!("{ensemble} M={m} anneal-tts-ms")).or_default().push((n as f64, t));
        }
        if let Some(timing) = &ctx.inputs.timing {
            timing_rows.push(FixedMTimingRow {
                ensemble: ensemble.clone(),
                m,
                n,
                median_elapsed_ms: median_u64(group.iter().filter_map(|r| timing.get(&r.instance_id).copied()).collect())
                    / 1e6,
            });
        }
        rows.push(FixedMRow {
            ensemble,
            m,
            n,
            instances: group.len(),
            median_nodes,
            mean_p_success: p,
            tts_ms,
        });
    }
    let mut plot = PlotData::new("fixed-m", "N", "effort");
    for (label, pts) in series {
        plot = plot.with_series(label, pts);
    }
    ctx.table("fixed-m", &rows)?;
    if ctx.inputs.timing.is_some() {
        ctx.table("fixed-m_timing", &timing_rows)?;
    }
    ctx.plot("fixed-m", &plot)
}

fn run_figure(ctx: &mut Ctx, f: Figure) -> Result<()> {
    match f {
        Figure::Psat => fig_psat(ctx),
        Figure::Window => fig_window(ctx),
        Figure::TtsScaling => fig_tts_scaling(ctx),
        Figure::Collapse => fig_collapse(ctx),
        Figure::Percentiles => fig_percentiles(ctx),
        Figure::Correlation => fig_correlation(ctx),
        Figure::Density => fig_density(ctx),
        Figure::Rho => fig_rho(ctx),
        Figure::SuccessHist => fig_success_hist(ctx),
        Figure::FixedM => fig_fixed_m(ctx),
    }
}

/// Builds the selected figures from the result tables on disk.
pub fn cmd_analyze(cfg: &ExperimentConfig, which: Selection) -> Result<AnalyzeReport> {
    let layout = Layout::new(&cfg.output_dir);
    let exact = load_exact(&layout)?;
    let runstats = layout
        .runstats()
        .exists()
        .then(|| read_csv::<RunStatsRow>(&layout.runstats()))
        .transpose()?
        .map(|rows| rows.into_iter().map(|r| (r.instance_id.clone(), r)).collect());
    let timing = layout
        .exact_timing()
        .exists()
        .then(|| read_csv::<ExactTimingRow>(&layout.exact_timing()))
        .transpose()?
        .map(|rows| rows.into_iter().map(|r| (r.instance_id, r.elapsed_ns)).collect());
    let mut ctx = Ctx {
        cfg,
        inputs: Inputs {
            exact,
            runstats,
            timing,
            reads_path: layout.anneal_reads(),
        },
        layout,
        report: AnalyzeReport::default(),
    };
    match which {
        Selection::One(f) => run_figure(&mut ctx, f)?,
        Selection::All => {
            for f in Figure::ALL {
                if f.needs_runstats() && ctx.inputs.runstats.is_none() {
                    ctx.report.skipped.push((f, "runstats.csv not found".into()));
                    continue;
                }
                run_figure(&mut ctx, f)?;
            }
        }
    }
    Ok(ctx.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_names_roundtrip() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert_eq!("all".parse::<Selection>().unwrap(), Selection::All);
        assert!("fig5".parse::<Figure>().is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median_u64(vec![3, 1, 2]), 2.0);
        assert_eq!(median_u64(vec![4, 1, 2, 3]), 2.5);
    }
}
