//! Instance file formats.

pub mod jsonl;
pub mod wcnf;

pub use jsonl::{read_jsonl, write_jsonl, InstanceRecord, JsonlError};
pub use wcnf::{read_wcnf, to_wcnf_string, write_wcnf, WcnfError};
