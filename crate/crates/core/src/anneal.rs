//! Classical stand-in for an annealing processor: single-spin-flip
//! Metropolis simulated annealing on the autoscaled Ising image of a
//! formula, repeated over independent reads.

use std::time::{Duration, Instant};

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::ising::{decode, map_formula, ControlErrorModel, IsingProblem, SpinConfiguration};
use crate::seed;

/// Per-read annealing time used in time-to-solution arithmetic.
pub const DEFAULT_T_F: Duration = Duration::from_millis(1);
pub const DEFAULT_READS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnealError {
    #[error("reads must be at least 1")]
    ZeroReads,
    #[error("exact optimum required to judge success")]
    MissingOptimum,
}

/// Linear inverse-temperature ramp over a fixed number of sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub beta_initial: f64,
    pub beta_final: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            sweeps: 1000,
            beta_initial: 0.1,
            beta_final: 5.0,
        }
    }
}

impl AnnealSchedule {
    pub fn new(sweeps: usize, beta_initial: f64, beta_final: f64) -> Self {
        assert!(sweeps >= 1, "at least one sweep");
        assert!(beta_initial > 0.0 && beta_final >= beta_initial, "need 0 < beta_initial <= beta_final");
        AnnealSchedule {
            sweeps,
            beta_initial,
            beta_final,
        }
    }

    /// Inverse temperature of sweep `k`, from `beta_initial` at the first
    /// sweep to `beta_final` at the last.
    pub fn beta(&self, k: usize) -> f64 {
        if self.sweeps == 1 || self.beta_initial == self.beta_final {
            return self.beta_initial;
        }
        let t = k as f64 / (self.sweeps - 1) as f64;
        self.beta_initial + (self.beta_final - self.beta_initial) * t
    }
}

/// Sparse Ising problem prepared for Metropolis updates.
#[derive(Debug, Clone)]
pub struct Annealer {
    h: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
    /// Spins updated by a sweep, in index order.
    order: Vec<usize>,
}

impl Annealer {
    pub fn new(p: &IsingProblem) -> Self {
        let mut neighbors = vec![Vec::new(); p.n()];
        for (&(a, b), &j) in p.couplers() {
            neighbors[a].push((b, j));
            neighbors[b].push((a, j));
        }
        Annealer {
            h: p.h().to_vec(),
            neighbors,
            order: (0..p.n()).filter(|&j| p.active()[j]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    #[inline]
    fn local_field(&self, spins: &[i8], j: usize) -> f64 {
        self.h[j] + self.neighbors[j].iter().map(|&(k, w)| w * spins[k] as f64).sum::<f64>()
    }

    /// One Metropolis pass over the active spins at inverse temperature `beta`.
    pub fn sweep(&self, spins: &mut [i8], beta: f64, rng: &mut seed::Rng) {
        for &j in &self.order {
            let delta = -2.0 * spins[j] as f64 * self.local_field(spins, j);
            if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                spins[j] = -spins[j];
            }
        }
    }

    /// Uniformly random start, linear ramp, final configuration. `observe`
    /// sees the spins after every sweep.
    pub fn anneal_with<F>(&self, sched: &AnnealSchedule, seed_value: u64, mut observe: F) -> SpinConfiguration
    where
        F: FnMut(usize, &[i8]),
    {
        let mut rng = seed::rng(seed_value);
        let mut spins: Vec<i8> = (0..self.n()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        for k in 0..sched.sweeps {
            self.sweep(&mut spins, sched.beta(k), &mut rng);
            observe(k, &spins);
        }
        SpinConfiguration::new(spins)
    }

    pub fn anneal(&self, sched: &AnnealSchedule, seed_value: u64) -> SpinConfiguration {
        self.anneal_with(sched, seed_value, |_, _| {})
    }
}

/// A single annealing read; deterministic in `seed`.
pub fn anneal_read(p: &IsingProblem, sched: &AnnealSchedule, seed_value: u64) -> SpinConfiguration {
    Annealer::new(p).anneal(sched, seed_value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub schedule: AnnealSchedule,
    pub reads: usize,
    /// Nominal per-read time for time-to-solution arithmetic.
    pub t_f: Duration,
    /// Control errors, redrawn for every read.
    pub noise: Option<ControlErrorModel>,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            schedule: AnnealSchedule::default(),
            reads: DEFAULT_READS,
            t_f: DEFAULT_T_F,
            noise: None,
        }
    }
}

/// Outcome of all reads on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub reads: usize,
    pub successes: usize,
    pub p_success: f64,
    /// Final energy of every read in unscaled clause units (`4V - M`),
    /// measured on the unperturbed problem.
    pub best_energy_per_read: Vec<f64>,
    pub violations_per_read: Vec<usize>,
    pub t_f: Duration,
    pub sweeps: usize,
    pub noise: Option<ControlErrorModel>,
    pub seed: u64,
    /// Actual CPU time spent annealing (not the nominal `t_f`).
    pub cpu_time: Duration,
}

impl RunStats {
    /// Counts of reads per final energy, sorted by energy.
    pub fn energy_histogram(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        let mut energies = self.best_energy_per_read.clone();
        energies.sort_by(f64::total_cmp);
        for e in energies {
            match out.last_mut() {
                Some((last, count)) if *last == e => *count += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }
}

/// Anneals `cfg.reads` independent reads of `f` and counts those whose
/// decoded assignment attains `optimum` on the unperturbed formula.
pub fn run_instance(f: &Formula, optimum: Option<usize>, cfg: &AnnealConfig, seed_value: u64) -> Result<RunStats, AnnealError> {
    let optimum = optimum.ok_or(AnnealError::MissingOptimum)?;
    if cfg.reads == 0 {
        return Err(AnnealError::ZeroReads);
    }
    let start = Instant::now();
    let programmed = map_formula(f).autoscale();
    let clean = Annealer::new(&programmed);
    let m = f.num_clauses() as f64;
    let mut violations_per_read = Vec::with_capacity(cfg.reads);
    for read in 0..cfg.reads {
        let read_seed = seed::derive(seed_value, read as u64);
        let spins = match &cfg.noise {
            Some(model) => {
                let noisy = programmed.perturb(&model.with_seed(seed::derive(model.seed ^ seed_value, read as u64)));
                Annealer::new(&noisy).anneal(&cfg.schedule, read_seed)
            }
            None => clean.anneal(&cfg.schedule, read_seed),
        };
        let v = f.count_violations(&decode(&spins)).expect("annealer keeps the formula's length");
        violations_per_read.push(v);
    }
    let successes = violations_per_read.iter().filter(|&&v| v == optimum).count();
    Ok(RunStats {
        reads: cfg.reads,
        successes,
        p_success: successes as f64 / cfg.reads as f64,
        best_energy_per_read: violations_per_read.iter().map(|&v| 4.0 * v as f64 - m).collect(),
        violations_per_read,
        t_f: cfg.t_f,
        sweeps: cfg.schedule.sweeps,
        noise: cfg.noise,
        seed: seed_value,
        cpu_time: start.elapsed(),
    })
}

/// Fraction of instances per success-probability bin `k / reads`,
/// `k = 0..=reads`.
pub fn success_histogram(p_values: &[f64], reads: usize) -> Vec<(f64, f64)> {
    let bins = reads.max(1);
    let mut counts = vec![0usize; bins + 1];
    for &p in p_values {
        let k = (p.clamp(0.0, 1.0) * bins as f64).round() as usize;
        counts[k] += 1;
    }
    let total = p_values.len().max(1) as f64;
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (k as f64 / bins as f64, c as f64 / total))
        .collect()
}
