//! Scenario generation for water distribution networks.
//!
//! The crate reads EPANET INP files, profiles their hydraulic parameters,
//! samples new parameter sets with a family of strategies, synthesizes
//! junction demand patterns, simulates every candidate with a global
//! gradient solver and keeps only the scenarios that pass a rule set.
//! Sampling bounds can be tuned per parameter with a particle swarm.

pub mod adg;
pub mod hspo;
pub mod hydraulics;
pub mod inp;
pub mod params;
pub mod pipeline;
pub mod profiler;
pub mod stats;
pub mod strategies;

pub use inp::{convert_to_si, parse_inp, read_inp_file, serialize_inp, InpError, NetworkModel};
pub use params::{Component, ParamId, ParamKind, ParamValues, Parameter};
