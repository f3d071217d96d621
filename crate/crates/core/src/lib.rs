// SPDX-License-Identifier: Apache-2.0

//! Opinion dynamics on signed networks with stubborn agents, and the
//! influence of every initial opinion on the final one.

pub mod centrality;
pub mod classify;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod influence;
pub mod io;
mod linalg;
pub mod mason;
pub mod pipeline;
pub mod sfg;
pub mod spectral;

pub use centrality::{absolute_centrality, flip_edge_signs, perturb_initial, CentralityReport, WhatIfResult};
pub use classify::{classify, AgentClassification, AgentParams, SinkInfo, SinkKind};
pub use dynamics::{
    build_matrices, classify_convergence, influence_free_spectra, leader_limit, simulate, sink_spectrum, steady_state,
    steady_state_by, ConvergenceKind, ConvergenceVerdict, ModelMatrices, SimulationOptions, SinkSpectrum, SteadyState,
    SteadyStateMethod, TrajectoryLog,
};
pub use error::{Error, Result};
pub use graph::{check_structural_balance, condense, Balance, Condensation, Edge, Sign, SignedNetwork};
pub use influence::{individual_influence, InfluenceMatrix};
pub use io::{AnalysisReport, FileError, NetworkFile};
pub use mason::{
    collective_influence, mason_collective, mason_gain, solve_gain, CollectiveInfluence, GainComputation, GainMethod,
    GainTerm, MasonLimits,
};
pub use pipeline::Pipeline;
pub use sfg::{build_full_sfg, reduce_sfg, Branch, NodeKind, SfgGraph, SourceKind};
