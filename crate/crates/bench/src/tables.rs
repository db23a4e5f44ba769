//! Result files written under the output directory. Files whose names
//! contain `timing` hold wall-clock measurements; everything else is a pure
//! function of the config.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{BenchError, Result};

/// Paths of every artifact under one output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn instances_dir(&self) -> PathBuf {
        self.root.join("instances")
    }
    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }
    pub fn exact_results(&self) -> PathBuf {
        self.root.join("exact_results.csv")
    }
    pub fn exact_timing(&self) -> PathBuf {
        self.root.join("exact_timing.csv")
    }
    pub fn runstats(&self) -> PathBuf {
        self.root.join("runstats.csv")
    }
    pub fn anneal_reads(&self) -> PathBuf {
        self.root.join("anneal_reads.csv")
    }
    pub fn anneal_timing(&self) -> PathBuf {
        self.root.join("anneal_timing.csv")
    }
    pub fn analysis_dir(&self) -> PathBuf {
        self.root.join("analysis")
    }
    pub fn graph_dir(&self) -> PathBuf {
        self.root.join("graph")
    }
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(BenchError::io(path))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(BenchError::csv(path))?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(BenchError::csv(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    let file = File::create(path).map_err(BenchError::io(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| BenchError::Malformed {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    w.write_all(b"\n").map_err(BenchError::io(path))?;
    w.flush().map_err(BenchError::io(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(BenchError::io(path))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| BenchError::Malformed {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Column names for tables that may be written empty.
pub trait Header {
    fn header() -> &'static [&'static str];
}

#[macro_export]
macro_rules! table {
    ($(#[$m:meta])* $name:ident { $($field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
        #[allow(non_snake_case)]
        pub struct $name {
            $(pub $field: $ty,)*
        }
        impl $crate::tables::Header for $name {
            fn header() -> &'static [&'static str] {
                &[$(stringify!($field)),*]
            }
        }
    };
}

table!(
    /// Exact optimum per instance.
    ExactRow {
        instance_id: String,
        ensemble: String,
        n: usize,
        alpha: f64,
        m: usize,
        optimum: usize,
        nodes_expanded: u64,
        optimal_flag: bool,
    }
);

table!(ExactTimingRow {
    instance_id: String,
    elapsed_ns: u64,
});

table!(
    /// Annealer outcome per instance.
    RunStatsRow {
        instance_id: String,
        ensemble: String,
        n: usize,
        alpha: f64,
        m: usize,
        reads: usize,
        successes: usize,
        p_success: f64,
        t_f_ns: u64,
        sweeps: usize,
        noise_sigma_h: f64,
        noise_sigma_J: f64,
        seed: u64,
    }
);

table!(ReadRow {
    instance_id: String,
    read: usize,
    violations: usize,
    energy: f64,
});

table!(AnnealTimingRow {
    instance_id: String,
    cpu_ns: u64,
});

/// Writes rows, emitting the header even when there are none.
pub fn write_table<T: Serialize + Header>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(BenchError::csv(path))?;
    if rows.is_empty() {
        w.write_record(T::header()).map_err(BenchError::csv(path))?;
    }
    for row in rows {
        w.serialize(row).map_err(BenchError::csv(path))?;
    }
    w.flush().map_err(BenchError::io(path))
}
