// SPDX-License-Identifier: Apache-2.0

//! Individual influence `Θ`, the linear map `x(0) ↦ z`.

use nalgebra::DMatrix;

use crate::classify::{AgentClassification, SinkKind};
use crate::dynamics::SinkSpectrum;
use crate::error::{Error, Result};
use crate::graph::Sign;
use crate::mason::CollectiveInfluence;
use crate::sfg::SourceKind;

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    /// `θ_ij`, the weight of `x_j(0)` in `z_i`.
    pub theta: DMatrix<f64>,
}

impl InfluenceMatrix {
    pub fn n(&self) -> usize {
        self.theta.nrows()
    }

    pub fn abs(&self) -> DMatrix<f64> {
        self.theta.map(f64::abs)
    }

    pub fn apply(&self, x0: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.theta[(i, j)] * x0[j]).sum())
            .collect()
    }
}

/// Expands collective gains into per-agent weights.
///
/// Non-source rows read `c_ir` scaled by the left eigenvector entry of the
/// column agent; members of an influence-free sink take the eigenvector of
/// their own sink; every other entry is zero.
pub fn individual_influence(
    collective: &CollectiveInfluence,
    classification: &AgentClassification,
    spectra: &[SinkSpectrum],
) -> Result<InfluenceMatrix> {
    let n = classification.n;
    let spectrum = |l: usize| spectra.iter().find(|s| s.sink == l).ok_or(Error::MissingSpectrum(l));
    let mut theta = DMatrix::zeros(n, n);
    for j in 0..n {
        let sink = classification.sink_of[j];
        let info = sink.map(|l| &classification.sinks[l]);
        match info {
            Some(s) if s.kind == SinkKind::SingletonLeader => {
                theta[(j, j)] = 1.0;
                for &i in &collective.agents {
                    theta[(i, j)] = collective.get(i, SourceKind::SingletonLeader(j));
                }
            }
            Some(s) if !s.has_stubborn && s.kind != SinkKind::Unbalanced => {
                let l = sink.expect("leader");
                let sp = spectrum(l)?;
                let kappa = sp.members.binary_search(&j).map_err(|_| Error::MissingSpectrum(l))?;
                let w = sp.w[kappa];
                for (&m, &sigma) in sp.members.iter().zip(&sp.v) {
                    theta[(m, j)] = sigma * w;
                }
                for &i in &collective.agents {
                    let c = if s.kind == SinkKind::Cooperative {
                        collective.get(i, SourceKind::CooperativeSink(l))
                    } else {
                        collective.get(i, SourceKind::BalancedPartition(l, Sign::Plus))
                            - collective.get(i, SourceKind::BalancedPartition(l, Sign::Minus))
                    };
                    theta[(i, j)] = c * w;
                }
            }
            _ if classification.stubborn.contains(&j) => {
                for &i in &collective.agents {
                    theta[(i, j)] = collective.get(i, SourceKind::StubbornInitial(j));
                }
            }
            _ => {}
        }
    }
    Ok(InfluenceMatrix { theta })
}
