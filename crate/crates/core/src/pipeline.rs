// SPDX-License-Identifier: Apache-2.0

use crate::classify::{classify, AgentClassification, AgentParams};
use crate::dynamics::{
    build_matrices, classify_convergence, influence_free_spectra, steady_state, ConvergenceVerdict, ModelMatrices,
    SinkSpectrum, SteadyState,
};
use crate::error::Result;
use crate::graph::SignedNetwork;
use crate::influence::{individual_influence, InfluenceMatrix};
use crate::mason::{collective_influence, CollectiveInfluence, GainMethod, MasonLimits};
use crate::sfg::{build_full_sfg, reduce_sfg, SfgGraph};

/// A validated network with everything that does not depend on `x(0)`.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub network: SignedNetwork,
    pub params: AgentParams,
    pub classification: AgentClassification,
    pub matrices: ModelMatrices,
    pub verdict: ConvergenceVerdict,
    pub spectra: Vec<SinkSpectrum>,
}

impl Pipeline {
    pub fn new(network: SignedNetwork, params: AgentParams) -> Result<Self> {
        let classification = classify(&network, &params)?;
        let matrices = build_matrices(&network, &params, &classification);
        let verdict = classify_convergence(&matrices, &classification);
        let spectra = influence_free_spectra(&matrices, &classification)?;
        Ok(Self {
            network,
            params,
            classification,
            matrices,
            verdict,
            spectra,
        })
    }

    pub fn n(&self) -> usize {
        self.network.n()
    }

    pub fn steady_state(&self, x0: &[f64]) -> Result<SteadyState> {
        steady_state(&self.matrices, &self.classification, &self.verdict, x0)
    }

    pub fn full_sfg(&self) -> SfgGraph {
        build_full_sfg(&self.matrices, &self.classification)
    }

    pub fn reduced_sfg(&self) -> Result<SfgGraph> {
        reduce_sfg(&self.full_sfg(), &self.classification, &self.spectra)
    }

    pub fn collective_influence(&self, method: GainMethod, limits: &MasonLimits) -> Result<CollectiveInfluence> {
        collective_influence(&self.reduced_sfg()?, method, limits)
    }

    pub fn individual_influence(&self, method: GainMethod, limits: &MasonLimits) -> Result<InfluenceMatrix> {
        let c = self.collective_influence(method, limits)?;
        individual_influence(&c, &self.classification, &self.spectra)
    }
}
