// SPDX-License-Identifier: Apache-2.0

//! Seeded random networks with followers and sinks of every kind.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use signed_influence::{AgentParams, SignedNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Planned {
    Cooperative,
    Balanced,
    Unbalanced,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub seed: u64,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Case {
    pub fn network(&self) -> SignedNetwork {
        SignedNetwork::new(self.n, &self.edges).expect("generated edges are valid")
    }

    pub fn params(&self) -> AgentParams {
        AgentParams::new(self.gamma.clone(), self.beta.clone()).expect("generated parameters are valid")
    }
}

fn magnitude(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.2..2.0)
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// Edges of one sink: a ring plus an optional chord, signed by `plan`.
fn sink_edges(rng: &mut ChaCha8Rng, members: &[usize], plan: Planned) -> Vec<(usize, usize, f64)> {
    let k = members.len();
    let sigma: Vec<f64> = (0..k)
        .map(|i| {
            if i == 0 || plan == Planned::Cooperative {
                1.0
            } else {
                random_sign(rng)
            }
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    if k == 2 {
        pairs.truncate(2);
    }
    if k >= 3 && rng.gen_bool(0.5) {
        let a = rng.gen_range(0..k);
        let b = (a + k - 1) % k;
        if !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    let flipped = rng.gen_range(0..pairs.len());
    pairs
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let mut s = sigma[a] * sigma[b];
            if plan == Planned::Unbalanced && e == flipped {
                s = -s;
            }
            (members[a], members[b], s * magnitude(rng))
        })
        .collect()
}

/// A weakly connected network with at most `max_n` agents.
pub fn random_case(seed: u64, max_n: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let sink_count = rng.gen_range(1..=3);
        let mut sizes: Vec<usize> = (0..sink_count).map(|_| rng.gen_range(1..=4)).collect();
        while sizes.iter().sum::<usize>() > max_n.saturating_sub(1) && sizes.len() > 1 {
            sizes.pop();
        }
        let sink_total: usize = sizes.iter().sum();
        let max_followers = (max_n - sink_total).min(6);
        let followers = if sizes.len() > 1 {
            rng.gen_range(1..=max_followers.max(1))
        } else {
            rng.gen_range(0..=max_followers)
        };
        let n = followers + sink_total;

        // ids are shuffled so followers and leaders interleave
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut rng);
        let follower_ids = &ids[..followers];
        let mut edges = Vec::new();
        let mut start = followers;
        let mut sink_ids = Vec::new();
        for &size in &sizes {
            let mut members = ids[start..start + size].to_vec();
            members.sort_unstable();
            start += size;
            let plan = match (size, rng.gen_range(0..3)) {
                (1, _) => Planned::Cooperative,
                (_, 0) => Planned::Cooperative,
                (_, 1) => Planned::Balanced,
                _ => Planned::Unbalanced,
            };
            if size > 1 {
                edges.extend(sink_edges(&mut rng, &members, plan));
            }
            sink_ids.extend(members);
        }

        // follower f has one edge to a later follower or a leader, so every
        // follower reaches a sink; other edges may point anywhere
        for (pos, &f) in follower_ids.iter().enumerate() {
            let later: Vec<usize> = follower_ids[pos + 1..].iter().chain(&sink_ids).copied().collect();
            let mut targets = vec![*later.choose(&mut rng).expect("a sink exists")];
            for _ in 0..rng.gen_range(0..=2) {
                let t = ids[rng.gen_range(0..n)];
                if t != f && !targets.contains(&t) {
                    targets.push(t);
                }
            }
            for t in targets {
                edges.push((f, t, random_sign(&mut rng) * magnitude(&mut rng)));
            }
        }

        let gamma: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.5)).collect();
        let beta: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    rng.gen_range(0.05..0.4)
                } else {
                    0.0
                }
            })
            .collect();
        let case = Case {
            seed,
            n,
            edges,
            gamma,
            beta,
        };
        if case.network().is_weakly_connected() {
            return case;
        }
    }
}

pub fn random_x0(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect()
}
