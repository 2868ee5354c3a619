//! Persistence, reporting, and experiment plumbing around the core
//! library: versioned JSON system files, provenance-stamped report
//! envelopes, tidy CSV emitters, and seeded random generators.

pub mod format;
pub mod randgen;
pub mod report;

pub use format::{load_system, save_system, system_from_file, system_to_file, FormatError, SystemFile};
pub use randgen::{random_parseval, random_system, random_unit_window};
pub use report::{config_hash, to_json, Constants, Envelope, Provenance};
