// SPDX-License-Identifier: Apache-2.0

//! Follower / leader / stubborn partition and the sink balance taxonomy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_structural_balance, condense, Balance, Condensation, Sign, SignedNetwork};

/// Per-agent self-belief `γ_i ∈ [0, 1]` and stubbornness `β_i ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentParams {
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

impl AgentParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if gamma.len() != beta.len() {
            return Err(Error::LengthMismatch {
                what: "beta",
                expected: gamma.len(),
                got: beta.len(),
            });
        }
        for (i, (&g, &b)) in gamma.iter().zip(&beta).enumerate() {
            if !(0.0..=1.0).contains(&g) {
                return Err(violation(i, format!("gamma = {g} is outside [0, 1]")));
            }
            if !(0.0..1.0).contains(&b) {
                return Err(violation(i, format!("beta = {b} is outside [0, 1)")));
            }
        }
        Ok(Self { gamma, beta })
    }

    /// Parameters with no stubbornness and a common self-belief.
    pub fn uniform(n: usize, gamma: f64) -> Result<Self> {
        Self::new(vec![gamma; n], vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn is_stubborn(&self, i: usize) -> bool {
        self.beta[i] > 0.0
    }
}

fn violation(agent: usize, reason: String) -> Error {
    Error::ParamConstraintViolated { agent, reason }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SinkKind {
    SingletonLeader,
    Cooperative,
    Balanced,
    Unbalanced,
}

impl SinkKind {
    /// Membership in `S_b`.
    pub fn is_effectively_balanced(self) -> bool {
        !matches!(self, SinkKind::Unbalanced)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinkInfo {
    /// Sorted member ids.
    pub members: Vec<usize>,
    pub kind: SinkKind,
    /// Partition labels aligned with `members`, only for `Balanced` sinks.
    pub sigma: Option<Vec<Sign>>,
    pub has_stubborn: bool,
}

impl SinkInfo {
    pub fn position(&self, agent: usize) -> Option<usize> {
        self.members.binary_search(&agent).ok()
    }

    /// `σ` as ±1 per member (all +1 unless the sink is balanced).
    pub fn sigma_values(&self) -> Vec<f64> {
        match &self.sigma {
            Some(s) => s.iter().map(|s| s.value()).collect(),
            None => vec![1.0; self.members.len()],
        }
    }

    pub fn side(&self, side: Sign) -> Vec<usize> {
        match &self.sigma {
            Some(s) => self
                .members
                .iter()
                .zip(s)
                .filter(|(_, &x)| x == side)
                .map(|(&m, _)| m)
                .collect(),
            None if side == Sign::Plus => self.members.clone(),
            None => Vec::new(),
        }
    }
}

/// Structural roles of every agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentClassification {
    pub n: usize,
    pub condensation: Condensation,
    pub followers: Vec<usize>,
    pub singleton_leaders: Vec<usize>,
    pub group_leaders: Vec<usize>,
    pub stubborn: Vec<usize>,
    /// Sink index of each leader; `None` for followers.
    pub sink_of: Vec<Option<usize>>,
    pub sinks: Vec<SinkInfo>,
    /// `S_n`: effectively balanced sinks without stubborn members.
    pub influence_free_sinks: Vec<usize>,
    /// Block order: followers, then each sink's members contiguously.
    pub order: Vec<usize>,
}

impl AgentClassification {
    pub fn follower_count(&self) -> usize {
        self.followers.len()
    }

    pub fn is_follower(&self, i: usize) -> bool {
        self.sink_of[i].is_none()
    }

    pub fn is_influence_free(&self, sink: usize) -> bool {
        self.influence_free_sinks.binary_search(&sink).is_ok()
    }

    pub fn effectively_balanced_sinks(&self) -> Vec<usize> {
        (0..self.sinks.len())
            .filter(|&l| self.sinks[l].kind.is_effectively_balanced())
            .collect()
    }

    /// Partition label of an agent in a balanced sink.
    pub fn sigma(&self, agent: usize) -> Option<Sign> {
        let sink = &self.sinks[self.sink_of[agent]?];
        let s = sink.sigma.as_ref()?;
        Some(s[sink.position(agent)?])
    }

    /// Index ranges of `order` covering the follower block and each sink block.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::with_capacity(self.sinks.len() + 1);
        out.push(0..self.followers.len());
        let mut start = self.followers.len();
        for s in &self.sinks {
            out.push(start..start + s.members.len());
            start += s.members.len();
        }
        out
    }
}

pub fn classify(net: &SignedNetwork, params: &AgentParams) -> Result<AgentClassification> {
    let n = net.n();
    if params.len() != n {
        return Err(Error::LengthMismatch {
            what: "agent parameters",
            expected: n,
            got: params.len(),
        });
    }
    if !net.is_weakly_connected() {
        return Err(Error::NotWeaklyConnected);
    }
    let condensation = condense(net);

    let mut sink_of = vec![None; n];
    let mut sinks = Vec::with_capacity(condensation.sink_count());
    for l in 0..condensation.sink_count() {
        let members = condensation.sink_members(l).to_vec();
        for &m in &members {
            sink_of[m] = Some(l);
        }
        let has_stubborn = members.iter().any(|&m| params.is_stubborn(m));
        let (kind, sigma) = if members.len() == 1 {
            (SinkKind::SingletonLeader, None)
        } else {
            let all_positive = members.iter().all(|&i| {
                net.out_edges(i)
                    .iter()
                    .filter(|(j, _)| members.binary_search(j).is_ok())
                    .all(|&(_, w)| w > 0.0)
            });
            if all_positive {
                (SinkKind::Cooperative, None)
            } else {
                match check_structural_balance(net, &members)? {
                    Balance::Balanced { sigma, .. } => (SinkKind::Balanced, Some(sigma)),
                    Balance::Unbalanced => (SinkKind::Unbalanced, None),
                }
            }
        };
        sinks.push(SinkInfo {
            members,
            kind,
            sigma,
            has_stubborn,
        });
    }

    let mut followers = Vec::new();
    let mut singleton_leaders = Vec::new();
    let mut group_leaders = Vec::new();
    for (i, sink) in sink_of.iter().enumerate() {
        match *sink {
            None => followers.push(i),
            Some(l) if sinks[l].members.len() == 1 => singleton_leaders.push(i),
            Some(_) => group_leaders.push(i),
        }
    }
    let stubborn = (0..n).filter(|&i| params.is_stubborn(i)).collect();

    for i in 0..n {
        let (g, b) = (params.gamma()[i], params.beta()[i]);
        let is_graph_sink = net.out_edges(i).is_empty();
        if !is_graph_sink && g + b >= 1.0 {
            return Err(violation(
                i,
                format!("gamma + beta = {} must be < 1 for an agent with out-neighbours", g + b),
            ));
        }
    }
    for &i in &group_leaders {
        if params.gamma()[i] <= 0.0 {
            return Err(violation(i, "leaders in a multi-agent sink need gamma > 0".to_string()));
        }
    }

    let influence_free_sinks = (0..sinks.len())
        .filter(|&l| sinks[l].kind.is_effectively_balanced() && !sinks[l].has_stubborn)
        .collect();

    let mut order = followers.clone();
    for s in &sinks {
        order.extend_from_slice(&s.members);
    }

    Ok(AgentClassification {
        n,
        condensation,
        followers,
        singleton_leaders,
        group_leaders,
        stubborn,
        sink_of,
        sinks,
        influence_free_sinks,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_leaves_follow_the_center() {
        let net = SignedNetwork::new(4, &[(1, 0, 1.0), (2, 0, -1.0), (3, 0, 2.0)]).unwrap();
        let params = AgentParams::uniform(4, 0.2).unwrap();
        let c = classify(&net, &params).unwrap();
        assert_eq!(c.followers, vec![1, 2, 3]);
        assert_eq!(c.singleton_leaders, vec![0]);
        assert!(c.group_leaders.is_empty());
        assert_eq!(c.sinks[0].kind, SinkKind::SingletonLeader);
        assert_eq!(c.influence_free_sinks, vec![0]);
        assert_eq!(c.order, vec![1, 2, 3, 0]);
    }

    #[test]
    fn params_are_range_checked() {
        assert!(AgentParams::new(vec![1.5], vec![0.0]).is_err());
        assert!(AgentParams::new(vec![0.5], vec![1.0]).is_err());
        assert!(AgentParams::new(vec![0.5], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn non_sink_gamma_plus_beta_must_stay_below_one() {
        let net = SignedNetwork::new(2, &[(0, 1, 1.0)]).unwrap();
        let params = AgentParams::new(vec![0.6, 0.0], vec![0.4, 0.0]).unwrap();
        assert!(matches!(
            classify(&net, &params),
            Err(Error::ParamConstraintViolated { agent: 0, .. })
        ));
        // a graph sink may carry any admissible pair
        let params = AgentParams::new(vec![0.1, 0.9], vec![0.0, 0.5]).unwrap();
        assert!(classify(&net, &params).is_ok());
    }

    #[test]
    fn group_leaders_need_self_confidence() {
        let net = SignedNetwork::new(2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let params = AgentParams::new(vec![0.3, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            classify(&net, &params),
            Err(Error::ParamConstraintViolated { agent: 1, .. })
        ));
    }

    #[test]
    fn disconnected_networks_are_rejected() {
        let net = SignedNetwork::new(2, &[]).unwrap();
        let params = AgentParams::uniform(2, 0.1).unwrap();
        assert_eq!(classify(&net, &params), Err(Error::NotWeaklyConnected));
    }

    #[test]
    fn stubborn_member_removes_sink_from_influence_free_set() {
        let edges = [(0, 1, 1.0), (1, 2, -1.0), (2, 1, -1.0)];
        let net = SignedNetwork::new(3, &edges).unwrap();
        let free = classify(&net, &AgentParams::uniform(3, 0.2).unwrap()).unwrap();
        assert_eq!(free.sinks[0].kind, SinkKind::Balanced);
        assert_eq!(free.influence_free_sinks, vec![0]);
        assert_eq!(free.sigma(1), Some(Sign::Plus));
        assert_eq!(free.sigma(2), Some(Sign::Minus));
        assert_eq!(free.sigma(0), None);

        let params = AgentParams::new(vec![0.2; 3], vec![0.0, 0.0, 0.1]).unwrap();
        let stubborn = classify(&net, &params).unwrap();
        assert!(stubborn.influence_free_sinks.is_empty());
        assert_eq!(stubborn.stubborn, vec![2]);
    }

    #[test]
    fn single_agent_is_a_singleton_leader() {
        let net = SignedNetwork::new(1, &[]).unwrap();
        let c = classify(&net, &AgentParams::uniform(1, 0.0).unwrap()).unwrap();
        assert_eq!(c.singleton_leaders, vec![0]);
        assert_eq!(c.blocks(), vec![0..0, 0..1]);
    }
}
