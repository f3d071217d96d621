// SPDX-License-Identifier: Apache-2.0

//! Signed weighted digraphs and their structural decomposition.
//!
//! Agent ids are 0-based. An edge `(i, j, a_ij)` means agent `i` listens to
//! agent `j`: `i` is an in-neighbour of `j` and its update reads `x_j`.

use std::collections::{BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Validated signed weighted digraph without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedNetwork {
    n: usize,
    /// Out-adjacency, each list sorted by target id.
    out: Vec<Vec<(usize, f64)>>,
    weakly_connected: bool,
}

impl SignedNetwork {
    /// Validates an edge list and builds the network.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, w) in edges {
            for id in [i, j] {
                if id >= n {
                    return Err(Error::BadId { id, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight(i, j));
            }
            if w == 0.0 {
                return Err(Error::ZeroWeight(i, j));
            }
            out[i].push((j, w));
        }
        for (i, list) in out.iter_mut().enumerate() {
            list.sort_by_key(|&(j, _)| j);
            if let Some(pair) = list.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(Error::DuplicateEdge(i, pair[0].0));
            }
        }
        let weakly_connected = is_weakly_connected(n, &out);
        Ok(Self {
            n,
            out,
            weakly_connected,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when the underlying undirected graph is connected.
    pub fn is_weakly_connected(&self) -> bool {
        self.weakly_connected
    }

    pub fn out_edges(&self, i: usize) -> &[(usize, f64)] {
        &self.out[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.out[i]
            .binary_search_by_key(&j, |&(t, _)| t)
            .ok()
            .map(|k| self.out[i][k].1)
    }

    /// Row sum of absolute weights, `Σ_j |a_ij|`.
    pub fn abs_out_weight(&self, i: usize) -> f64 {
        self.out[i].iter().map(|&(_, w)| w.abs()).sum()
    }

    /// Edges in canonical `(from, to)` order.
    pub fn edges(&self) -> Vec<Edge> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(from, list)| list.iter().map(move |&(to, weight)| Edge { from, to, weight }))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Copy of the network with the sign of every listed edge reversed.
    pub fn with_flipped_signs(&self, flips: &[(usize, usize)]) -> Result<Self> {
        let mut next = self.clone();
        for &(i, j) in flips {
            if i >= self.n || j >= self.n {
                return Err(Error::NoSuchEdge(i, j));
            }
            let k = next.out[i]
                .binary_search_by_key(&j, |&(t, _)| t)
                .map_err(|_| Error::NoSuchEdge(i, j))?;
            next.out[i][k].1 = -next.out[i][k].1;
        }
        Ok(next)
    }
}

fn is_weakly_connected(n: usize, out: &[Vec<(usize, f64)>]) -> bool {
    if n == 0 {
        return false;
    }
    let mut undirected = vec![Vec::new(); n];
    for (i, list) in out.iter().enumerate() {
        for &(j, _) in list {
            undirected[i].push(j);
            undirected[j].push(i);
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &undirected[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// Condensation `C(G)` of a network: SCCs, the DAG between them and its sinks.
///
/// Components are ordered by their lowest member id and members are sorted,
/// so sink indices are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Condensation {
    pub components: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    /// Indices into `components` of the SCCs without outgoing edges.
    pub sinks: Vec<usize>,
    /// Component index of every agent.
    pub component_of: Vec<usize>,
}

impl Condensation {
    pub fn sink_members(&self, sink: usize) -> &[usize] {
        &self.components[self.sinks[sink]]
    }

    pub fn sink_count(&self) -> usize {
        self.sinks.len()
    }
}

pub fn condense(net: &SignedNetwork) -> Condensation {
    let mut g = DiGraph::<(), ()>::with_capacity(net.n(), net.edge_count());
    let nodes: Vec<_> = (0..net.n()).map(|_| g.add_node(())).collect();
    for e in net.edges() {
        g.add_edge(nodes[e.from], nodes[e.to], ());
    }
    let mut components: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut members: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
            members.sort_unstable();
            members
        })
        .collect();
    components.sort_by_key(|c| c[0]);

    let mut component_of = vec![0; net.n()];
    for (ci, members) in components.iter().enumerate() {
        for &m in members {
            component_of[m] = ci;
        }
    }
    let edges: BTreeSet<(usize, usize)> = net
        .edges()
        .into_iter()
        .map(|e| (component_of[e.from], component_of[e.to]))
        .filter(|(a, b)| a != b)
        .collect();
    let mut has_out = vec![false; components.len()];
    for &(a, _) in &edges {
        has_out[a] = true;
    }
    let sinks = (0..components.len()).filter(|&c| !has_out[c]).collect();
    Condensation {
        components,
        edges: edges.into_iter().collect(),
        sinks,
        component_of,
    }
}

/// Side of a structurally balanced bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn of(weight: f64) -> Self {
        if weight > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Balance {
    /// `sigma[k]` is the side of `members[k]`; the lowest id is always `Plus`.
    Balanced {
        members: Vec<usize>,
        sigma: Vec<Sign>,
    },
    Unbalanced,
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balance::Balanced { .. })
    }
}

/// Two-colours the undirected signed edge set induced on `members` so that
/// `σ_i σ_j = sign(a_ij)` on every internal edge.
pub fn check_structural_balance(net: &SignedNetwork, members: &[usize]) -> Result<Balance> {
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::NotStronglyConnected);
    }
    for &m in &members {
        if m >= net.n() {
            return Err(Error::BadId { id: m, n: net.n() });
        }
    }
    let local = |agent: usize| members.binary_search(&agent).ok();

    let k = members.len();
    let mut fwd = vec![Vec::new(); k];
    let mut bwd = vec![Vec::new(); k];
    let mut undirected: Vec<Vec<(usize, Sign)>> = vec![Vec::new(); k];
    for (a, &i) in members.iter().enumerate() {
        for &(j, w) in net.out_edges(i) {
            if let Some(b) = local(j) {
                fwd[a].push(b);
                bwd[b].push(a);
                undirected[a].push((b, Sign::of(w)));
                undirected[b].push((a, Sign::of(w)));
            }
        }
    }
    if !reaches_all(&fwd) || !reaches_all(&bwd) {
        return Err(Error::NotStronglyConnected);
    }

    let mut sigma: Vec<Option<Sign>> = vec![None; k];
    sigma[0] = Some(Sign::Plus);
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let su = sigma[u].expect("queued nodes are coloured");
        for &(v, s) in &undirected[u] {
            let want = if s == Sign::Plus { su } else { su.flip() };
            match sigma[v] {
                None => {
                    sigma[v] = Some(want);
                    queue.push_back(v);
                }
                Some(have) if have != want => return Ok(Balance::Unbalanced),
                Some(_) => {}
            }
        }
    }
    Ok(Balance::Balanced {
        members,
        sigma: sigma.into_iter().map(|s| s.expect("connected")).collect(),
    })
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
