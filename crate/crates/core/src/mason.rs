// SPDX-License-Identifier: Apache-2.0

//! Source-to-probe gains of a signal-flow graph.
//!
//! [`mason_gain`] evaluates the topological gain formula by enumerating
//! forward paths, loops and non-touching loop sets. Only the subgraph of nodes
//! that are reachable from the source and reach the probe matters: every loop
//! either lies inside it or shares no node with it, and loops of the second
//! kind contribute the same factor to the determinant and to every cofactor.
//! [`solve_gain`] computes the same numbers from one linear solve.

use fixedbitset::FixedBitSet;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{identity_minus, solve};
use crate::sfg::{NodeKind, SfgGraph, SourceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasonLimits {
    /// Cap on enumerated paths plus loops.
    pub max_objects: usize,
    /// Cap on loop sets visited while evaluating one determinant or cofactor.
    pub max_subsets: usize,
}

impl Default for MasonLimits {
    fn default() -> Self {
        Self {
            max_objects: 1_000_000,
            max_subsets: 100_000,
        }
    }
}

/// A forward path or a loop with its branch-gain product.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTerm {
    /// Node ids in traversal order; a loop does not repeat its first node.
    pub nodes: Vec<usize>,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainComputation {
    pub source: usize,
    pub probe: usize,
    pub forward_paths: Vec<GainTerm>,
    /// Loops of the source-to-probe subgraph.
    pub loops: Vec<GainTerm>,
    pub delta: f64,
    /// `Δ_h` aligned with `forward_paths`.
    pub cofactors: Vec<f64>,
    pub gain: f64,
}

/// Subgraph relevant to one source/probe pair, in local indices.
struct Relevant {
    global: Vec<usize>,
    adj: Vec<Vec<(usize, f64)>>,
}

fn reach(g: &SfgGraph, start: usize, forward: bool) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(g.node_count());
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(u) = stack.pop() {
        let next: Vec<usize> = if forward {
            g.out_branches(u).map(|b| b.to).collect()
        } else {
            g.in_branches(u).map(|b| b.from).collect()
        };
        for v in next {
            if !seen.put(v) {
                stack.push(v);
            }
        }
    }
    seen
}

fn relevant(g: &SfgGraph, source: usize, probe: usize) -> Option<Relevant> {
    let mut set = reach(g, source, true);
    set.intersect_with(&reach(g, probe, false));
    if !set.contains(probe) {
        return None;
    }
    let global: Vec<usize> = set.ones().collect();
    let mut local = vec![usize::MAX; g.node_count()];
    for (k, &u) in global.iter().enumerate() {
        local[u] = k;
    }
    let adj = global
        .iter()
        .map(|&u| {
            g.out_branches(u)
                .filter(|b| local[b.to] != usize::MAX)
                .map(|b| (local[b.to], b.gain))
                .collect()
        })
        .collect();
    Some(Relevant { global, adj })
}

struct Budget {
    used: usize,
    limit: usize,
}

impl Budget {
    fn take(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::ComplexityCapExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Elementary cycles by Johnson's blocking search; each cycle starts at its
/// smallest local index.
fn simple_cycles(adj: &[Vec<(usize, f64)>], budget: &mut Budget) -> Result<Vec<(Vec<usize>, f64)>> {
    struct State<'a> {
        adj: &'a [Vec<(usize, f64)>],
        start: usize,
        blocked: Vec<bool>,
        b_lists: Vec<Vec<usize>>,
        stack: Vec<usize>,
        gains: Vec<f64>,
        out: Vec<(Vec<usize>, f64)>,
    }

    fn unblock(st: &mut State<'_>, u: usize) {
        st.blocked[u] = false;
        while let Some(w) = st.b_lists[u].pop() {
            if st.blocked[w] {
                unblock(st, w);
            }
        }
    }

    fn circuit(st: &mut State<'_>, v: usize, budget: &mut Budget) -> Result<bool> {
        let mut found = false;
        st.stack.push(v);
        st.blocked[v] = true;
        let adj = st.adj;
        for &(w, gain) in &adj[v] {
            if w < st.start {
                continue;
            }
            if w == st.start {
                budget.take()?;
                let product = st.gains.iter().product::<f64>() * gain;
                st.out.push((st.stack.clone(), product));
                found = true;
            } else if !st.blocked[w] {
                st.gains.push(gain);
                let sub = circuit(st, w, budget)?;
                st.gains.pop();
                found |= sub;
            }
        }
        if found {
            unblock(st, v);
        } else {
            for &(w, _) in &adj[v] {
                if w >= st.start && !st.b_lists[w].contains(&v) {
                    st.b_lists[w].push(v);
                }
            }
        }
        st.stack.pop();
        Ok(found)
    }

    let n = adj.len();
    let mut st = State {
        adj,
        start: 0,
        blocked: vec![false; n],
        b_lists: vec![Vec::new(); n],
        stack: Vec::new(),
        gains: Vec::new(),
        out: Vec::new(),
    };
    for s in 0..n {
        st.start = s;
        for u in s..n {
            st.blocked[u] = false;
            st.b_lists[u].clear();
        }
        circuit(&mut st, s, budget)?;
    }
    Ok(st.out)
}

fn simple_paths(
    adj: &[Vec<(usize, f64)>],
    from: usize,
    to: usize,
    budget: &mut Budget,
) -> Result<Vec<(Vec<usize>, f64)>> {
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        adj: &[Vec<(usize, f64)>],
        v: usize,
        to: usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<usize>,
        gain: f64,
        out: &mut Vec<(Vec<usize>, f64)>,
        budget: &mut Budget,
    ) -> Result<()> {
        if v == to {
            budget.take()?;
            out.push((path.clone(), gain));
            return Ok(());
        }
        for &(w, g) in &adj[v] {
            if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(adj, w, to, on_path, path, gain * g, out, budget)?;
                path.pop();
                on_path[w] = false;
            }
        }
        Ok(())
    }

    let mut on_path = vec![false; adj.len()];
    on_path[from] = true;
    let mut out = Vec::new();
    dfs(adj, from, to, &mut on_path, &mut vec![from], 1.0, &mut out, budget)?;
    Ok(out)
}

/// `1 − Σ L_i + Σ L_i L_j − …` over loop sets disjoint from `excluded`.
fn determinant(loops: &[(FixedBitSet, f64)], excluded: &FixedBitSet, limit: usize) -> Result<f64> {
    fn rec(
        loops: &[(FixedBitSet, f64)],
        start: usize,
        used: &mut FixedBitSet,
        product: f64,
        total: &mut f64,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.take()?;
        *total += product;
        for i in start..loops.len() {
            let (nodes, gain) = &loops[i];
            if used.is_disjoint(nodes) {
                used.union_with(nodes);
                rec(loops, i + 1, used, -product * gain, total, budget)?;
                used.difference_with(nodes);
            }
        }
        Ok(())
    }

    let candidates: Vec<(FixedBitSet, f64)> = loops
        .iter()
        .filter(|(nodes, _)| nodes.is_disjoint(excluded))
        .cloned()
        .collect();
    let mut used = excluded.clone();
    let mut total = 0.0;
    let mut budget = Budget { used: 0, limit };
    rec(&candidates, 0, &mut used, 1.0, &mut total, &mut budget)?;
    Ok(total)
}

/// Gain from a source node to the probe of `agent`.
pub fn mason_gain(g: &SfgGraph, source: usize, agent: usize, limits: &MasonLimits) -> Result<GainComputation> {
    if source >= g.node_count() || !g.is_source(source) {
        return Err(Error::NotASource(source));
    }
    let probe = g.probe_of(agent).ok_or(Error::MissingProbe(agent))?;
    let Some(rel) = relevant(g, source, probe) else {
        return Ok(GainComputation {
            source,
            probe,
            forward_paths: Vec::new(),
            loops: Vec::new(),
            delta: 1.0,
            cofactors: Vec::new(),
            gain: 0.0,
        });
    };
    let local_of = |u: usize| rel.global.binary_search(&u).expect("node in relevant set");
    let mut budget = Budget {
        used: 0,
        limit: limits.max_objects,
    };
    let cycles = simple_cycles(&rel.adj, &mut budget)?;
    let paths = simple_paths(&rel.adj, local_of(source), local_of(probe), &mut budget)?;

    let k = rel.global.len();
    let as_set = |nodes: &[usize]| {
        let mut s = FixedBitSet::with_capacity(k);
        s.extend(nodes.iter().copied());
        s
    };
    let loop_sets: Vec<(FixedBitSet, f64)> = cycles.iter().map(|(c, gain)| (as_set(c), *gain)).collect();
    let delta = determinant(&loop_sets, &FixedBitSet::with_capacity(k), limits.max_subsets)?;
    let cofactors = paths
        .iter()
        .map(|(p, _)| determinant(&loop_sets, &as_set(p), limits.max_subsets))
        .collect::<Result<Vec<f64>>>()?;
    if delta == 0.0 {
        return Err(Error::SingularSystem {
            context: "graph determinant",
        });
    }
    let gain = paths.iter().zip(&cofactors).map(|((_, p), d)| p * d).sum::<f64>() / delta;
    let to_global = |nodes: &[usize]| nodes.iter().map(|&u| rel.global[u]).collect::<Vec<_>>();
    Ok(GainComputation {
        source,
        probe,
        forward_paths: paths
            .iter()
            .map(|(p, gain)| GainTerm {
                nodes: to_global(p),
                gain: *gain,
            })
            .collect(),
        loops: cycles
            .iter()
            .map(|(c, gain)| GainTerm {
                nodes: to_global(c),
                gain: *gain,
            })
            .collect(),
        delta,
        cofactors,
        gain,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GainMethod {
    Mason,
    Solve,
    /// Mason, falling back to the linear solve past the complexity caps.
    Auto,
}

/// Gains `c_ir` from every source to every non-source agent.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveInfluence {
    /// Row agents, ascending.
    pub agents: Vec<usize>,
    /// Column sources, in catalog order.
    pub sources: Vec<SourceKind>,
    pub values: DMatrix<f64>,
    /// Method that produced the values (`Mason` or `Solve`).
    pub method: GainMethod,
}

impl CollectiveInfluence {
    pub fn source_index(&self, kind: SourceKind) -> Option<usize> {
        self.sources.iter().position(|&k| k == kind)
    }

    pub fn row_of(&self, agent: usize) -> Option<usize> {
        self.agents.binary_search(&agent).ok()
    }

    /// `c_ir`, zero when the agent or the source is absent.
    pub fn get(&self, agent: usize, kind: SourceKind) -> f64 {
        match (self.row_of(agent), self.source_index(kind)) {
            (Some(i), Some(r)) => self.values[(i, r)],
            _ => 0.0,
        }
    }
}

fn layout(g: &SfgGraph) -> (Vec<usize>, Vec<usize>, Vec<usize>, Vec<SourceKind>) {
    let rows = g.non_sources();
    let agents = rows
        .iter()
        .map(|&u| match g.nodes()[u] {
            NodeKind::NonSource(a) => a,
            _ => unreachable!(),
        })
        .collect();
    (rows, agents, g.sources(), g.source_kinds())
}

/// `(I − P')⁻¹ C` over the non-source nodes.
pub fn solve_gain(g: &SfgGraph) -> Result<CollectiveInfluence> {
    let (rows, agents, cols, sources) = layout(g);
    let mut index = vec![usize::MAX; g.node_count()];
    for (k, &u) in rows.iter().enumerate() {
        index[u] = k;
    }
    let m = rows.len();
    let mut p = DMatrix::zeros(m, m);
    let mut c = DMatrix::zeros(m, cols.len());
    for (r, &s) in cols.iter().enumerate() {
        for b in g.out_branches(s) {
            if index[b.to] != usize::MAX {
                c[(index[b.to], r)] += b.gain;
            }
        }
    }
    for &u in &rows {
        for b in g.out_branches(u) {
            if index[b.to] != usize::MAX {
                p[(index[b.to], index[u])] += b.gain;
            }
        }
    }
    let values = solve(identity_minus(p), &c, "collective influence")?;
    Ok(CollectiveInfluence {
        agents,
        sources,
        values,
        method: GainMethod::Solve,
    })
}

/// Every `c_ir` by the gain formula, one (source, probe) pair per task.
pub fn mason_collective(g: &SfgGraph, limits: &MasonLimits) -> Result<CollectiveInfluence> {
    let probed = g.with_all_probes();
    let (_, agents, cols, sources) = layout(g);
    let pairs: Vec<(usize, usize)> = agents.iter().flat_map(|&a| cols.iter().map(move |&s| (a, s))).collect();
    let gains = pairs
        .par_iter()
        .map(|&(a, s)| mason_gain(&probed, s, a, limits).map(|c| c.gain))
        .collect::<Result<Vec<f64>>>()?;
    let values = DMatrix::from_row_slice(agents.len(), cols.len(), &gains);
    Ok(CollectiveInfluence {
        agents,
        sources,
        values,
        method: GainMethod::Mason,
    })
}

pub fn collective_influence(g: &SfgGraph, method: GainMethod, limits: &MasonLimits) -> Result<CollectiveInfluence> {
    match method {
        GainMethod::Mason => mason_collective(g, limits),
        GainMethod::Solve => solve_gain(g),
        GainMethod::Auto => match mason_collective(g, limits) {
            Err(Error::ComplexityCapExceeded { .. }) => solve_gain(g),
            other => other,
        },
    }
}
