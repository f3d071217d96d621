// SPDX-License-Identifier: Apache-2.0

//! Graphviz rendering of signal-flow graphs.

use std::fmt::Write;

use signed_influence::sfg::{NodeKind, SfgGraph, SourceKind};

/// `x` with six significant digits, without trailing zeros.
pub fn gain_label(x: f64) -> String {
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn shape(kind: &NodeKind) -> &'static str {
    match kind {
        NodeKind::NonSource(_) => "circle",
        NodeKind::SinkProbe(_) => "point",
        NodeKind::Source(SourceKind::SingletonLeader(_)) => "box",
        NodeKind::Source(SourceKind::StubbornInitial(_)) => "diamond",
        NodeKind::Source(SourceKind::CooperativeSink(_)) => "doubleoctagon",
        NodeKind::Source(SourceKind::BalancedPartition(..)) => "hexagon",
    }
}

pub fn to_dot(g: &SfgGraph, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for (i, kind) in g.nodes().iter().enumerate() {
        let label = g.state_label(i).replace('"', "\\\"");
        writeln!(out, "  n{i} [label=\"{label}\", shape={}];", shape(kind)).unwrap();
    }
    for b in g.branches() {
        writeln!(out, "  n{} -> n{} [label=\"{}\"];", b.from, b.to, gain_label(b.gain)).unwrap();
    }
    out.push_str("}\n");
    out
}
