// SPDX-License-Identifier: Apache-2.0

//! Absolute centrality and what-if analyses.

use crate::error::{Error, Result};
use crate::influence::InfluenceMatrix;
use crate::pipeline::Pipeline;

/// Scores closer than this are ranked by agent id.
const TIE_QUANTUM: f64 = 1e-12;
/// Agents whose final opinion moved less than this (relative) count as unchanged.
const UNCHANGED_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    /// `Σ_i |θ_ij|` for every agent `j`.
    pub scores: Vec<f64>,
    /// Agents by decreasing score.
    pub ranking: Vec<usize>,
    /// Highest score, lowest id among ties.
    pub most_influential: Option<usize>,
}

pub fn absolute_centrality(theta: &InfluenceMatrix) -> CentralityReport {
    let n = theta.n();
    let scores: Vec<f64> = (0..n)
        .map(|j| theta.theta.column(j).iter().map(|x| x.abs()).sum())
        .collect();
    let mut ranking: Vec<usize> = (0..n).collect();
    let key = |j: usize| (scores[j] / TIE_QUANTUM).round();
    ranking.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    CentralityReport {
        scores,
        most_influential: ranking.first().copied(),
        ranking,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhatIfResult {
    pub baseline: Vec<f64>,
    pub modified: Vec<f64>,
    /// `modified − baseline`.
    pub deltas: Vec<f64>,
    /// `Σ |Δz_i| / n`.
    pub mean_abs_deviation: f64,
    /// `‖Δz‖₁ / |δ|` for a perturbation of one initial opinion.
    pub unit_deviation: Option<f64>,
    pub unchanged: Vec<usize>,
}

fn compare(baseline: Vec<f64>, modified: Vec<f64>, delta: Option<f64>) -> WhatIfResult {
    let deltas: Vec<f64> = modified.iter().zip(&baseline).map(|(m, b)| m - b).collect();
    let l1: f64 = deltas.iter().map(|d| d.abs()).sum();
    let unchanged = (0..deltas.len())
        .filter(|&i| deltas[i].abs() <= UNCHANGED_RTOL * baseline[i].abs().max(1.0))
        .collect();
    WhatIfResult {
        mean_abs_deviation: if deltas.is_empty() {
            0.0
        } else {
            l1 / deltas.len() as f64
        },
        unit_deviation: delta.map(|d| l1 / d.abs()),
        baseline,
        modified,
        deltas,
        unchanged,
    }
}

fn check_x0(pipeline: &Pipeline, x0: &[f64]) -> Result<()> {
    if x0.len() != pipeline.n() {
        return Err(Error::LengthMismatch {
            what: "x0",
            expected: pipeline.n(),
            got: x0.len(),
        });
    }
    Ok(())
}

/// Final opinions after adding `delta` to `x_agent(0)`.
pub fn perturb_initial(pipeline: &Pipeline, x0: &[f64], agent: usize, delta: f64) -> Result<WhatIfResult> {
    check_x0(pipeline, x0)?;
    if agent >= pipeline.n() {
        return Err(Error::BadId {
            id: agent,
            n: pipeline.n(),
        });
    }
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::ZeroDelta);
    }
    let baseline = pipeline.steady_state(x0)?.z;
    let mut shifted = x0.to_vec();
    shifted[agent] += delta;
    let modified = pipeline.steady_state(&shifted)?.z;
    Ok(compare(baseline, modified, Some(delta)))
}

/// Final opinions after negating the weight of each listed `(from, to)` edge.
pub fn flip_edge_signs(pipeline: &Pipeline, x0: &[f64], edges: &[(usize, usize)]) -> Result<WhatIfResult> {
    check_x0(pipeline, x0)?;
    let baseline = pipeline.steady_state(x0)?.z;
    let flipped = Pipeline::new(pipeline.network.with_flipped_signs(edges)?, pipeline.params.clone())?;
    let modified = flipped.steady_state(x0)?.z;
    Ok(compare(baseline, modified, None))
}
