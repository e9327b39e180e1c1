//! Shared fixtures for the benchmarks.

use std::path::{Path, PathBuf};

use wdngen::inp::{convert_to_si, read_inp_file, NetworkModel};

pub fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

/// A bundled network converted to SI units.
pub fn load_si(name: &str) -> NetworkModel {
    convert_to_si(&read_inp_file(data_path(name)).expect("bundled network parses"))
}
