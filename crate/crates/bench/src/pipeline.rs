//! Instance generation, exact solving and annealing over whole ensembles.
//! Work is spread over a worker pool, but every instance draws from its own
//! derived seed and results are collected in manifest order, so output is
//! independent of scheduling.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use max2sat_core::anneal::run_instance;
use max2sat_core::chimera::ChimeraGraph;
use max2sat_core::ensemble::{self, EnsembleSpec};
use max2sat_core::exact::{branch_and_bound_with, BnbConfig};
use max2sat_core::formula::Formula;
use max2sat_core::io::jsonl::{read_jsonl, write_jsonl, InstanceRecord};
use max2sat_core::seed;

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::tables::{
    create_dir, read_csv, read_json, write_json, write_table, AnnealTimingRow, ExactRow, ExactTimingRow, Layout, ReadRow,
    RunStatsRow,
};

/// Stream index separating annealer randomness from instance sampling.
const ANNEAL_STREAM: u64 = 0x00a1_1ea1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub rows: usize,
    pub cols: usize,
    pub active_qubits: usize,
    pub edges: usize,
    pub max_degree: usize,
}

impl GraphSummary {
    pub fn of(g: &ChimeraGraph) -> Self {
        GraphSummary {
            rows: g.rows(),
            cols: g.cols(),
            active_qubits: g.num_active(),
            edges: g.num_edges(),
            max_degree: g.max_degree(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub label: String,
    pub ensemble: String,
    pub n: usize,
    pub alpha: f64,
    pub m: usize,
    pub realized_alpha: f64,
    pub count: usize,
    pub seed: u64,
    /// Internal couplers of the hardware subgraph, when restricted.
    pub capacity: Option<usize>,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub graph: GraphSummary,
    pub ensembles: Vec<ManifestEntry>,
}

/// One instance read back from disk together with its grouping keys.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub record: InstanceRecord,
    pub formula: Formula,
}

impl LoadedInstance {
    pub fn id(&self) -> &str {
        &self.record.id
    }
}

pub fn thread_pool(cfg: &ExperimentConfig) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        b = b.num_threads(w);
    }
    b.build().map_err(|e| BenchError::Config(format!("cannot start worker pool: {e}")))
}

/// Every ensemble the config describes, validated against graph capacity.
pub fn build_specs(cfg: &ExperimentConfig, g: &ChimeraGraph) -> Result<Vec<EnsembleSpec>> {
    let e = &cfg.ensembles;
    let policy = cfg.graph.selection;
    let mut specs = Vec::new();
    if e.chimera_count + e.random_count > 0 {
        specs.extend(ensemble::grid(g, policy, cfg.seed, &e.n_values, &e.alpha_values, e.chimera_count, e.random_count)?);
    }
    if let Some(fm) = &e.fixed_m {
        let graph = fm.chimera.then_some((g, policy));
        specs.extend(ensemble::fixed_m_grid(&fm.m_values, &fm.n_values, graph, fm.count, cfg.seed)?);
    }
    let mut labels = BTreeSet::new();
    for s in &specs {
        if !labels.insert(s.label()) {
            return Err(BenchError::Config(format!(
                "two ensembles share the label {}; clause densities must differ in the first two decimals",
                s.label()
            )));
        }
    }
    Ok(specs)
}

/// Writes one JSONL file per ensemble plus `manifest.json`.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<Manifest> {
    let layout = Layout::new(&cfg.output_dir);
    let g = cfg.graph.load()?;
    let specs = build_specs(cfg, &g)?;
    let dir = layout.instances_dir();
    create_dir(&dir)?;
    let pool = thread_pool(cfg)?;
    let files: Vec<(ManifestEntry, Vec<u8>)> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let records: Vec<InstanceRecord> = spec.generate()?.map(|i| i.to_record()).collect();
                let mut buf = Vec::new();
                write_jsonl(&records, &mut buf).expect("writing to memory");
                let m = spec.clause_count();
                let entry = ManifestEntry {
                    label: spec.label(),
                    ensemble: spec.ensemble_name(),
                    n: spec.n,
                    alpha: spec.alpha,
                    m,
                    realized_alpha: m as f64 / spec.n as f64,
                    count: spec.count,
                    seed: spec.seed,
                    capacity: spec.topology.as_ref().map(|t| t.edges.len()),
                    file: format!("instances/{}.jsonl", spec.label()),
                };
                Ok((entry, buf))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut entries = Vec::with_capacity(files.len());
    for (entry, buf) in files {
        let path = layout.root.join(&entry.file);
        let mut w = BufWriter::new(File::create(&path).map_err(BenchError::io(&path))?);
        w.write_all(&buf).and_then(|_| w.flush()).map_err(BenchError::io(&path))?;
        entries.push(entry);
    }
    let manifest = Manifest {
        seed: cfg.seed,
        graph: GraphSummary::of(&g),
        ensembles: entries,
    };
    write_json(&layout.manifest(), &manifest)?;
    Ok(manifest)
}

pub fn load_manifest(layout: &Layout) -> Result<Manifest> {
    let path = layout.manifest();
    if !path.exists() {
        return Err(BenchError::Validation(format!("{} not found; run `generate` first", path.display())));
    }
    read_json(&path)
}

/// All instances in manifest order.
pub fn load_instances(layout: &Layout) -> Result<Vec<LoadedInstance>> {
    let manifest = load_manifest(layout)?;
    let mut out = Vec::new();
    for entry in &manifest.ensembles {
        let path = layout.root.join(&entry.file);
        let file = File::open(&path).map_err(BenchError::io(&path))?;
        let records = read_jsonl(BufReader::new(file)).map_err(|e| BenchError::Malformed {
            path: path.clone(),
            msg: e.to_string(),
        })?;
        for record in records {
            let formula = record.formula().map_err(|e| BenchError::Malformed {
                path: path.clone(),
                msg: format!("{}: {e}", record.id),
            })?;
            out.push(LoadedInstance { record, formula });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveSummary {
    pub total: usize,
    pub unsolved: usize,
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

/// Exact optimum of every instance; timing goes to a separate file.
/// Unproven instances are written flagged and reported as an error after
/// all rows are on disk.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<SolveSummary> {
    let layout = Layout::new(&cfg.output_dir);
    let instances = load_instances(&layout)?;
    let bnb = BnbConfig {
        budget: cfg.solver.budget(),
        node_limit: cfg.solver.node_limit,
        no_local_search: false,
    };
    let pool = thread_pool(cfg)?;
    let rows: Vec<(ExactRow, ExactTimingRow)> = pool.install(|| {
        instances
            .par_iter()
            .map(|inst| {
                let mut runs: Vec<_> = (0..cfg.solver.repeats).map(|_| branch_and_bound_with(&inst.formula, &bnb)).collect();
                let elapsed = median(runs.iter().map(|r| r.elapsed).collect());
                let optimal = runs.iter().all(|r| r.optimal);
                let best = runs.iter_mut().min_by_key(|r| r.optimum).expect("at least one repeat");
                let rec = &inst.record;
                (
                    ExactRow {
                        instance_id: rec.id.clone(),
                        ensemble: rec.ensemble.clone(),
                        n: rec.n,
                        alpha: rec.alpha,
                        m: rec.clauses.len(),
                        optimum: best.optimum,
                        nodes_expanded: best.nodes_expanded,
                        optimal_flag: optimal,
                    },
                    ExactTimingRow {
                        instance_id: rec.id.clone(),
                        elapsed_ns: elapsed.as_nanos() as u64,
                    },
                )
            })
            .collect()
    });
    let (exact, timing): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    write_table(&layout.exact_results(), &exact)?;
    write_table(&layout.exact_timing(), &timing)?;
    let summary = SolveSummary {
        total: exact.len(),
        unsolved: exact.iter().filter(|r| !r.optimal_flag).count(),
    };
    if summary.unsolved > 0 {
        return Err(BenchError::BudgetExhausted {
            unsolved: summary.unsolved,
            total: summary.total,
        });
    }
    Ok(summary)
}

pub fn load_exact(layout: &Layout) -> Result<Vec<ExactRow>> {
    let path = layout.exact_results();
    if !path.exists() {
        return Err(BenchError::Validation(format!("{} not found; run `solve` first", path.display())));
    }
    read_csv(&path)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSummary {
    pub total: usize,
    pub mean_p_success: f64,
}

/// Annealer statistics per instance, judged against the exact optima.
pub fn cmd_anneal(cfg: &ExperimentConfig) -> Result<AnnealSummary> {
    let layout = Layout::new(&cfg.output_dir);
    let instances = load_instances(&layout)?;
    let exact: HashMap<String, ExactRow> = load_exact(&layout)?.into_iter().map(|r| (r.instance_id.clone(), r)).collect();
    let mut optima = Vec::with_capacity(instances.len());
    let mut missing = Vec::new();
    for inst in &instances {
        match exact.get(inst.id()) {
            Some(r) if r.optimal_flag => optima.push(r.optimum),
            _ => missing.push(inst.id().to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(BenchError::Validation(format!(
            "{} instances lack a proven optimum (first: {})",
            missing.len(),
            missing[0]
        )));
    }
    let anneal_cfg = cfg.anneal.to_anneal_config();
    let pool = thread_pool(cfg)?;
    let results: Vec<_> = pool.install(|| {
        instances
            .par_iter()
            .zip(optima.par_iter())
            .map(|(inst, &opt)| {
                let s = seed::derive(inst.record.seed, ANNEAL_STREAM);
                run_instance(&inst.formula, Some(opt), &anneal_cfg, s).map(|stats| (inst, stats))
            })
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(|e| BenchError::Validation(e.to_string()))?;

    let mut runstats = Vec::with_capacity(results.len());
    let mut reads = Vec::new();
    let mut timing = Vec::with_capacity(results.len());
    for (inst, stats) in &results {
        let rec = &inst.record;
        runstats.push(RunStatsRow {
            instance_id: rec.id.clone(),
            ensemble: rec.ensemble.clone(),
            n: rec.n,
            alpha: rec.alpha,
            m: rec.clauses.len(),
            reads: stats.reads,
            successes: stats.successes,
            p_success: stats.p_success,
            t_f_ns: stats.t_f.as_nanos() as u64,
            sweeps: stats.sweeps,
            noise_sigma_h: cfg.anneal.noise_sigma_h,
            noise_sigma_J: cfg.anneal.noise_sigma_j,
            seed: stats.seed,
        });
        for (read, (&v, &e)) in stats.violations_per_read.iter().zip(&stats.best_energy_per_read).enumerate() {
            reads.push(ReadRow {
                instance_id: rec.id.clone(),
                read,
                violations: v,
                energy: e,
            });
        }
        timing.push(AnnealTimingRow {
            instance_id: rec.id.clone(),
            cpu_ns: stats.cpu_time.as_nanos() as u64,
        });
    }
    write_table(&layout.runstats(), &runstats)?;
    write_table(&layout.anneal_reads(), &reads)?;
    write_table(&layout.anneal_timing(), &timing)?;
    let total = runstats.len();
    Ok(AnnealSummary {
        total,
        mean_p_success: if total == 0 {
            0.0
        } else {
            runstats.iter().map(|r| r.p_success).sum::<f64>() / total as f64
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub n: usize,
    pub couplers: usize,
    pub max_clauses: usize,
    pub max_density: f64,
    pub unsat_band_low: f64,
    pub unsat_band_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub summary: GraphSummary,
    pub capacities: Vec<CapacityRow>,
}

/// Graph statistics and the clause capacity of each configured N; writes
/// the edge list, mask and summary under `graph/`.
pub fn graph_info(cfg: &ExperimentConfig) -> Result<GraphInfo> {
    let layout = Layout::new(&cfg.output_dir);
    let g = cfg.graph.load()?;
    let mut capacities = Vec::new();
    for &n in &cfg.ensembles.n_values {
        if n > g.num_active() {
            continue;
        }
        let subset = g.select_variables(n, cfg.graph.selection)?;
        let cap = g.capacity(&subset)?;
        let (lo, hi) = cap.unsat_band();
        capacities.push(CapacityRow {
            n,
            couplers: cap.c,
            max_clauses: cap.max_clauses(),
            max_density: cap.max_density(),
            unsat_band_low: lo,
            unsat_band_high: hi,
        });
    }
    let info = GraphInfo {
        summary: GraphSummary::of(&g),
        capacities,
    };
    let dir = layout.graph_dir();
    create_dir(&dir)?;
    let edges = dir.join("edges.csv");
    let mut w = BufWriter::new(File::create(&edges).map_err(BenchError::io(&edges))?);
    g.write_edge_csv(&mut w).and_then(|_| w.flush()).map_err(BenchError::io(&edges))?;
    write_json(&dir.join("mask.json"), &g.to_mask_file())?;
    write_json(&dir.join("info.json"), &info)?;
    Ok(info)
}
