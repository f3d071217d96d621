// SPDX-License-Identifier: Apache-2.0

//! Signal-flow graphs of the steady-state equation `y = B y`.
//!
//! A branch `j → i` with gain `g` encodes `y_i += g · y_j`, so branches point
//! against the direction of the edges of the underlying network.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::{AgentClassification, SinkKind};
use crate::dynamics::{ModelMatrices, SinkSpectrum};
use crate::error::{Error, Result};
use crate::graph::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceKind {
    /// Final opinion of a singleton leader, equal to its `x_i(0)`.
    SingletonLeader(usize),
    /// Consensus value `wᵀ x_l(0)` of a cooperative sink in `S_n`.
    CooperativeSink(usize),
    /// One side of a balanced sink in `S_n`; `Plus` carries `a`, `Minus` `−a`.
    BalancedPartition(usize, Sign),
    /// Initial opinion `x_k(0)` of a stubborn agent.
    StubbornInitial(usize),
}

impl SourceKind {
    /// Catalog rank: singleton leaders, cooperative sinks, balanced pairs
    /// (plus side first), stubborn initial opinions.
    fn rank(&self) -> (u8, usize, u8) {
        match *self {
            SourceKind::SingletonLeader(a) => (0, a, 0),
            SourceKind::CooperativeSink(l) => (1, l, 0),
            SourceKind::BalancedPartition(l, s) => (2, l, (s == Sign::Minus) as u8),
            SourceKind::StubbornInitial(a) => (3, a, 0),
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceKind::SingletonLeader(a) => write!(f, "leader {a}"),
            SourceKind::CooperativeSink(l) => write!(f, "sink S_{l}"),
            SourceKind::BalancedPartition(l, Sign::Plus) => write!(f, "sink S_{l} (+)"),
            SourceKind::BalancedPartition(l, Sign::Minus) => write!(f, "sink S_{l} (-)"),
            SourceKind::StubbornInitial(a) => write!(f, "x_{a}(0)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    NonSource(usize),
    Source(SourceKind),
    SinkProbe(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfgGraph {
    nodes: Vec<NodeKind>,
    branches: Vec<Branch>,
    out: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    reduced: bool,
}

impl SfgGraph {
    /// Builds a graph, merging parallel branches and dropping zero gains.
    pub fn from_parts(nodes: Vec<NodeKind>, branches: impl IntoIterator<Item = Branch>, reduced: bool) -> Self {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for b in branches {
            assert!(
                b.from < nodes.len() && b.to < nodes.len(),
                "branch endpoint out of range"
            );
            *merged.entry((b.from, b.to)).or_insert(0.0) += b.gain;
        }
        let branches: Vec<Branch> = merged
            .into_iter()
            .filter(|&(_, g)| g != 0.0)
            .map(|((from, to), gain)| Branch { from, to, gain })
            .collect();
        let mut out = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (k, b) in branches.iter().enumerate() {
            out[b.from].push(k);
            incoming[b.to].push(k);
        }
        Self {
            nodes,
            branches,
            out,
            incoming,
            reduced,
        }
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn out_branches(&self, node: usize) -> impl Iterator<Item = &Branch> {
        self.out[node].iter().map(move |&k| &self.branches[k])
    }

    pub fn in_branches(&self, node: usize) -> impl Iterator<Item = &Branch> {
        self.incoming[node].iter().map(move |&k| &self.branches[k])
    }

    pub fn gain(&self, from: usize, to: usize) -> Option<f64> {
        self.out[from]
            .iter()
            .map(|&k| &self.branches[k])
            .find(|b| b.to == to)
            .map(|b| b.gain)
    }

    pub fn is_source(&self, node: usize) -> bool {
        matches!(self.nodes[node], NodeKind::Source(_))
    }

    /// Source node ids in catalog order.
    pub fn sources(&self) -> Vec<usize> {
        let mut s: Vec<(SourceKind, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, k)| match k {
                NodeKind::Source(kind) => Some((*kind, i)),
                _ => None,
            })
            .collect();
        s.sort_by_key(|(k, _)| k.rank());
        s.into_iter().map(|(_, i)| i).collect()
    }

    pub fn source_kinds(&self) -> Vec<SourceKind> {
        self.sources()
            .into_iter()
            .map(|i| match self.nodes[i] {
                NodeKind::Source(k) => k,
                _ => unreachable!(),
            })
            .collect()
    }

    /// Non-source node ids ordered by agent id.
    pub fn non_sources(&self) -> Vec<usize> {
        let mut v: Vec<(usize, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, k)| match k {
                NodeKind::NonSource(a) => Some((*a, i)),
                _ => None,
            })
            .collect();
        v.sort_unstable();
        v.into_iter().map(|(_, i)| i).collect()
    }

    pub fn node_of_agent(&self, agent: usize) -> Option<usize> {
        self.nodes.iter().position(|k| *k == NodeKind::NonSource(agent))
    }

    pub fn source_node(&self, kind: SourceKind) -> Option<usize> {
        self.nodes.iter().position(|k| *k == NodeKind::Source(kind))
    }

    pub fn probe_of(&self, agent: usize) -> Option<usize> {
        self.nodes.iter().position(|k| *k == NodeKind::SinkProbe(agent))
    }

    /// Adds the probe `δ_i` fed by a unit branch from agent `i`'s node.
    pub fn attach_probe(&self, agent: usize) -> Result<SfgGraph> {
        let node = self.node_of_agent(agent).ok_or(Error::NotANode(agent))?;
        if self.probe_of(agent).is_some() {
            return Ok(self.clone());
        }
        let mut nodes = self.nodes.clone();
        nodes.push(NodeKind::SinkProbe(agent));
        let probe = nodes.len() - 1;
        let branches = self.branches.iter().copied().chain([Branch {
            from: node,
            to: probe,
            gain: 1.0,
        }]);
        Ok(SfgGraph::from_parts(nodes, branches, self.reduced))
    }

    /// Probes on every non-source node.
    pub fn with_all_probes(&self) -> SfgGraph {
        let mut nodes = self.nodes.clone();
        let mut branches = self.branches.clone();
        for node in self.non_sources() {
            let NodeKind::NonSource(agent) = self.nodes[node] else {
                unreachable!()
            };
            if self.probe_of(agent).is_none() {
                nodes.push(NodeKind::SinkProbe(agent));
                branches.push(Branch {
                    from: node,
                    to: nodes.len() - 1,
                    gain: 1.0,
                });
            }
        }
        SfgGraph::from_parts(nodes, branches, self.reduced)
    }

    /// Symbolic state carried by a node.
    pub fn state_label(&self, node: usize) -> String {
        match self.nodes[node] {
            NodeKind::NonSource(a) => format!("z_{a}"),
            NodeKind::SinkProbe(a) => format!("delta_{a}"),
            NodeKind::Source(SourceKind::SingletonLeader(a)) => {
                if self.reduced {
                    format!("x_{a}(0)")
                } else {
                    format!("z_{a}")
                }
            }
            NodeKind::Source(SourceKind::StubbornInitial(a)) => format!("x_{a}(0)"),
            NodeKind::Source(SourceKind::CooperativeSink(l)) => format!("w_{l}^T x_{l}(0)"),
            NodeKind::Source(SourceKind::BalancedPartition(l, Sign::Plus)) => format!("a_{l}"),
            NodeKind::Source(SourceKind::BalancedPartition(l, Sign::Minus)) => format!("-a_{l}"),
        }
    }
}

/// Graph of `y = B y` with `B = [[P, β̃], [0, I]]`: one node per agent plus
/// one per stubborn initial opinion.
pub fn build_full_sfg(matrices: &ModelMatrices, classification: &AgentClassification) -> SfgGraph {
    let n = matrices.n();
    let mut nodes = Vec::with_capacity(n + matrices.stubborn.len());
    for i in 0..n {
        let pinned = matches!(
            classification.sink_of[i],
            Some(l) if classification.sinks[l].kind == SinkKind::SingletonLeader
        ) && matrices.beta[i] == 0.0;
        nodes.push(if pinned {
            NodeKind::Source(SourceKind::SingletonLeader(i))
        } else {
            NodeKind::NonSource(i)
        });
    }
    for &k in &matrices.stubborn {
        nodes.push(NodeKind::Source(SourceKind::StubbornInitial(k)));
    }
    let mut branches = Vec::new();
    for (i, node) in nodes.iter().enumerate().take(n) {
        if matches!(node, NodeKind::Source(_)) {
            continue;
        }
        for j in 0..n {
            let g = matrices.p[(i, j)];
            if g != 0.0 {
                branches.push(Branch {
                    from: j,
                    to: i,
                    gain: g,
                });
            }
        }
    }
    for (h, &k) in matrices.stubborn.iter().enumerate() {
        branches.push(Branch {
            from: n + h,
            to: k,
            gain: matrices.btilde[(k, h)],
        });
    }
    SfgGraph::from_parts(nodes, branches, false)
}

/// Role of an agent in the reduced graph.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Fate {
    Kept,
    Into(SourceKind),
    Deleted,
}

fn fate(classification: &AgentClassification, agent: usize) -> Fate {
    let Some(l) = classification.sink_of[agent] else {
        return Fate::Kept;
    };
    let info = &classification.sinks[l];
    match info.kind {
        SinkKind::SingletonLeader => Fate::Into(SourceKind::SingletonLeader(agent)),
        _ if info.has_stubborn => Fate::Kept,
        SinkKind::Cooperative => Fate::Into(SourceKind::CooperativeSink(l)),
        SinkKind::Balanced => Fate::Into(SourceKind::BalancedPartition(
            l,
            classification.sigma(agent).expect("balanced sinks carry sigma"),
        )),
        SinkKind::Unbalanced => Fate::Deleted,
    }
}

/// Collapses influence-free sinks into sources and drops zero-limit leaders.
pub fn reduce_sfg(full: &SfgGraph, classification: &AgentClassification, spectra: &[SinkSpectrum]) -> Result<SfgGraph> {
    for &l in &classification.influence_free_sinks {
        let kind = classification.sinks[l].kind;
        if kind != SinkKind::SingletonLeader && !spectra.iter().any(|s| s.sink == l) {
            return Err(Error::MissingSpectrum(l));
        }
    }
    let n = classification.n;
    let mut kinds: Vec<SourceKind> = Vec::new();
    let mut kept = Vec::new();
    for agent in 0..n {
        match fate(classification, agent) {
            Fate::Kept => kept.push(agent),
            Fate::Into(kind) => kinds.push(kind),
            Fate::Deleted => {}
        }
    }
    for &k in &classification.stubborn {
        if fate(classification, k) == Fate::Kept {
            kinds.push(SourceKind::StubbornInitial(k));
        }
    }
    kinds.sort_by_key(|k| k.rank());
    kinds.dedup();

    let mut nodes: Vec<NodeKind> = kept.iter().map(|&a| NodeKind::NonSource(a)).collect();
    let agent_node: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let mut source_node = BTreeMap::new();
    for kind in kinds {
        source_node.insert(kind, nodes.len());
        nodes.push(NodeKind::Source(kind));
    }

    let mut branches = Vec::new();
    for &agent in &kept {
        let full_node = full.node_of_agent(agent).ok_or(Error::NotANode(agent))?;
        let to = agent_node[&agent];
        for b in full.in_branches(full_node) {
            let from = match full.nodes()[b.from] {
                NodeKind::NonSource(j) | NodeKind::Source(SourceKind::SingletonLeader(j)) => {
                    match fate(classification, j) {
                        Fate::Kept => agent_node[&j],
                        Fate::Into(kind) => source_node[&kind],
                        Fate::Deleted => continue,
                    }
                }
                NodeKind::Source(kind @ SourceKind::StubbornInitial(_)) => source_node[&kind],
                NodeKind::Source(_) | NodeKind::SinkProbe(_) => continue,
            };
            branches.push(Branch { from, to, gain: b.gain });
        }
    }
    Ok(SfgGraph::from_parts(nodes, branches, true))
}
