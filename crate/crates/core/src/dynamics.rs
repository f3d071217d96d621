// SPDX-License-Identifier: Apache-2.0

//! Model matrices of the signed FJ update
//! `x(k+1) = (Γ + (I − Γ − β) Q) x(k) + β x(0)`, its convergence class and
//! three independent routes to the steady state.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::classify::{AgentClassification, AgentParams, SinkKind};
use crate::error::{Error, Result};
use crate::graph::SignedNetwork;
use crate::linalg::{identity_minus, solve_vec, submatrix};
use crate::spectral::spectral_radius;

/// Default residual tolerance for [`simulate`].
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default iteration cap for [`simulate`].
pub const DEFAULT_MAX_ITERS: usize = 100_000;

const EIGEN_SIMPLE_TOL: f64 = 1e-9;

/// `Q`, `P` and the stubbornness input matrix, all in original agent order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMatrices {
    pub q: DMatrix<f64>,
    pub p: DMatrix<f64>,
    /// `n × s`; column `h` has `β_{k_h}` at row `k_h`.
    pub btilde: DMatrix<f64>,
    /// Stubborn agents `k_1 < … < k_s` indexing the columns of `btilde`.
    pub stubborn: Vec<usize>,
    pub beta: Vec<f64>,
    /// Block-triangular agent order (followers first).
    pub order: Vec<usize>,
    /// Ranges of `order` for the follower block and each sink block.
    pub blocks: Vec<Range<usize>>,
}

impl ModelMatrices {
    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// `P` with rows and columns permuted into block order.
    pub fn permuted_p(&self) -> DMatrix<f64> {
        submatrix(&self.p, &self.order, &self.order)
    }

    pub fn beta_x0(&self, x0: &[f64]) -> DVector<f64> {
        DVector::from_iterator(x0.len(), x0.iter().zip(&self.beta).map(|(x, b)| x * b))
    }
}

pub fn build_matrices(
    net: &SignedNetwork,
    params: &AgentParams,
    classification: &AgentClassification,
) -> ModelMatrices {
    let n = net.n();
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        let total = net.abs_out_weight(i);
        if total == 0.0 {
            q[(i, i)] = 1.0;
        } else {
            for &(j, w) in net.out_edges(i) {
                q[(i, j)] = w / total;
            }
        }
    }
    let (gamma, beta) = (params.gamma(), params.beta());
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        let mix = 1.0 - gamma[i] - beta[i];
        for j in 0..n {
            p[(i, j)] = mix * q[(i, j)];
        }
        p[(i, i)] += gamma[i];
    }
    let stubborn = classification.stubborn.clone();
    let mut btilde = DMatrix::zeros(n, stubborn.len());
    for (h, &k) in stubborn.iter().enumerate() {
        btilde[(k, h)] = beta[k];
    }
    ModelMatrices {
        q,
        p,
        btilde,
        stubborn,
        beta: beta.to_vec(),
        order: classification.order.clone(),
        blocks: classification.blocks(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergenceKind {
    Convergent,
    SemiConvergent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceVerdict {
    pub kind: ConvergenceKind,
    /// Diagnostic only; the verdict itself is structural.
    pub spectral_radius_estimate: f64,
    pub estimate_settled: bool,
    pub unit_eigen_count: usize,
}

/// `P` is semi-convergent exactly when `S_n` is non-empty.
pub fn classify_convergence(matrices: &ModelMatrices, classification: &AgentClassification) -> ConvergenceVerdict {
    let count = classification.influence_free_sinks.len();
    let (estimate, settled) = match spectral_radius(&matrices.p) {
        Ok(r) => (r, true),
        Err(Error::NonConvergedEstimate { estimate }) => (estimate, false),
        Err(_) => (f64::NAN, false),
    };
    ConvergenceVerdict {
        kind: if count > 0 {
            ConvergenceKind::SemiConvergent
        } else {
            ConvergenceKind::Convergent
        },
        spectral_radius_estimate: estimate,
        estimate_settled: settled,
        unit_eigen_count: count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Keep every `record_every`-th state; 0 keeps only the endpoints.
    pub record_every: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            record_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    /// Recorded `(k, x(k))` pairs; always starts with `x(0)` and ends with the
    /// last computed state.
    pub states: Vec<(usize, Vec<f64>)>,
    pub converged: bool,
    pub iterations: usize,
    /// `‖x(k+1) − x(k)‖∞` of the final step (infinite when no step ran).
    pub residual: f64,
}

impl TrajectoryLog {
    pub fn final_state(&self) -> &[f64] {
        &self.states.last().expect("x(0) is always recorded").1
    }

    pub fn ensure_converged(&self, max_iters: usize) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::IterationCapReached {
                max_iters,
                residual: self.residual,
            })
        }
    }
}

pub fn simulate(matrices: &ModelMatrices, x0: &[f64], options: SimulationOptions) -> Result<TrajectoryLog> {
    let n = matrices.n();
    check_len(x0, n)?;
    let x_init = DVector::from_column_slice(x0);
    let drive = matrices.beta_x0(x0);
    Ok(iterate(&matrices.p, &x_init, &drive, options))
}

fn iterate(p: &DMatrix<f64>, start: &DVector<f64>, drive: &DVector<f64>, options: SimulationOptions) -> TrajectoryLog {
    let mut states = vec![(0, start.as_slice().to_vec())];
    let mut x = start.clone();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut k = 0;
    while k < options.max_iters {
        let next = p * &x + drive;
        residual = (&next - &x).amax();
        x = next;
        k += 1;
        if residual < options.tol {
            converged = true;
            break;
        }
        if options.record_every > 0 && k % options.record_every == 0 {
            states.push((k, x.as_slice().to_vec()));
        }
    }
    if states.last().map(|s| s.0) != Some(k) {
        states.push((k, x.as_slice().to_vec()));
    }
    TrajectoryLog {
        states,
        converged,
        iterations: k,
        residual,
    }
}

fn check_len(x0: &[f64], n: usize) -> Result<()> {
    if x0.len() != n {
        return Err(Error::LengthMismatch {
            what: "initial opinions",
            expected: n,
            got: x0.len(),
        });
    }
    Ok(())
}

/// Unit eigenpair of one sink block of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkSpectrum {
    pub sink: usize,
    /// Sink members, aligned with `w` and `v`.
    pub members: Vec<usize>,
    /// Left eigenvector with `Σ σ_κ w_κ = 1`.
    pub w: Vec<f64>,
    /// Right eigenvector, `σ` (all ones unless the sink is balanced).
    pub v: Vec<f64>,
}

impl SinkSpectrum {
    /// `wᵀ x_l(0)` for the sink's members.
    pub fn project(&self, x0: &[f64]) -> f64 {
        self.members.iter().zip(&self.w).map(|(&m, w)| w * x0[m]).sum()
    }

    /// Same eigenpair under the opposite partition labelling.
    pub fn flipped(&self) -> Self {
        Self {
            w: self.w.iter().map(|x| -x).collect(),
            v: self.v.iter().map(|x| -x).collect(),
            ..self.clone()
        }
    }
}

pub fn sink_spectrum(
    matrices: &ModelMatrices,
    classification: &AgentClassification,
    sink: usize,
) -> Result<SinkSpectrum> {
    if !classification.is_influence_free(sink) {
        return Err(Error::NotInfluenceFree { sink });
    }
    let info = &classification.sinks[sink];
    let members = info.members.clone();
    let sigma = info.sigma_values();
    let k = members.len();
    let block = submatrix(&matrices.p, &members, &members);
    let a = block.transpose() - DMatrix::identity(k, k);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    if k >= 2 && svd.singular_values[idx[1]] < EIGEN_SIMPLE_TOL {
        return Err(Error::DegenerateEigenspace { sink });
    }
    let null: Vec<f64> = v_t.row(idx[0]).iter().copied().collect();
    let scale: f64 = null.iter().zip(&sigma).map(|(w, s)| w * s).sum();
    if scale.abs() < EIGEN_SIMPLE_TOL {
        return Err(Error::DegenerateEigenspace { sink });
    }
    let w: Vec<f64> = null.iter().map(|x| x / scale).collect();
    Ok(SinkSpectrum {
        sink,
        members,
        w,
        v: sigma,
    })
}

/// Spectra of every sink in `S_n`, in sink order.
pub fn influence_free_spectra(
    matrices: &ModelMatrices,
    classification: &AgentClassification,
) -> Result<Vec<SinkSpectrum>> {
    classification
        .influence_free_sinks
        .iter()
        .map(|&l| sink_spectrum(matrices, classification, l))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SteadyStateMethod {
    DirectSolve,
    Eigenprojection,
    Iteration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub z: Vec<f64>,
    /// Zero-stubbornness response `lim P^k x(0)`.
    pub z_o: Vec<f64>,
    /// Stubborn response `lim Σ P^i β x(0)`.
    pub z_s: Vec<f64>,
    pub method: SteadyStateMethod,
}

/// Default route: direct solve when convergent, eigenprojection otherwise.
pub fn steady_state(
    matrices: &ModelMatrices,
    classification: &AgentClassification,
    verdict: &ConvergenceVerdict,
    x0: &[f64],
) -> Result<SteadyState> {
    let method = match verdict.kind {
        ConvergenceKind::Convergent => SteadyStateMethod::DirectSolve,
        ConvergenceKind::SemiConvergent => SteadyStateMethod::Eigenprojection,
    };
    steady_state_by(method, matrices, classification, x0, SimulationOptions::default())
}

/// Steady state by an explicit route. `options` only affects `Iteration`.
pub fn steady_state_by(
    method: SteadyStateMethod,
    matrices: &ModelMatrices,
    classification: &AgentClassification,
    x0: &[f64],
    options: SimulationOptions,
) -> Result<SteadyState> {
    let n = matrices.n();
    check_len(x0, n)?;
    match method {
        SteadyStateMethod::Iteration => {
            let options = SimulationOptions {
                record_every: 0,
                ..options
            };
            let zero = DVector::zeros(n);
            let start = DVector::from_column_slice(x0);
            let free = iterate(&matrices.p, &start, &zero, options);
            free.ensure_converged(options.max_iters)?;
            let forced = iterate(&matrices.p, &zero, &matrices.beta_x0(x0), options);
            forced.ensure_converged(options.max_iters)?;
            let z_o = free.final_state().to_vec();
            let z_s = forced.final_state().to_vec();
            let z = z_o.iter().zip(&z_s).map(|(a, b)| a + b).collect();
            Ok(SteadyState { z, z_o, z_s, method })
        }
        SteadyStateMethod::Eigenprojection | SteadyStateMethod::DirectSolve => {
            let split = Split::new(classification);
            let z_s = split.stubborn_response(matrices, x0)?;
            let spectra = influence_free_spectra(matrices, classification)?;
            let z = if method == SteadyStateMethod::Eigenprojection {
                let z_o = split.zero_stubbornness_response(matrices, &spectra, x0)?;
                return Ok(SteadyState {
                    z: z_o.iter().zip(&z_s).map(|(a, b)| a + b).collect(),
                    z_o,
                    z_s,
                    method,
                });
            } else {
                split.pinned_solve(matrices, classification, &spectra, x0)?
            };
            let z_o = z.iter().zip(&z_s).map(|(a, b)| a - b).collect();
            Ok(SteadyState { z, z_o, z_s, method })
        }
    }
}

/// Coordinates of `S_n` sinks and their complement.
struct Split {
    pinned: Vec<usize>,
    rest: Vec<usize>,
}

impl Split {
    fn new(classification: &AgentClassification) -> Self {
        let mut is_pinned = vec![false; classification.n];
        for &l in &classification.influence_free_sinks {
            for &m in &classification.sinks[l].members {
                is_pinned[m] = true;
            }
        }
        let (pinned, rest) = (0..classification.n).partition(|&i| is_pinned[i]);
        Self { pinned, rest }
    }

    fn complement_system(&self, matrices: &ModelMatrices) -> DMatrix<f64> {
        identity_minus(submatrix(&matrices.p, &self.rest, &self.rest))
    }

    /// Solves `(I − P_CC) z_C = β_C x_C(0)` and leaves `S_n` coordinates at 0.
    fn stubborn_response(&self, matrices: &ModelMatrices, x0: &[f64]) -> Result<Vec<f64>> {
        let rhs = DVector::from_iterator(self.rest.len(), self.rest.iter().map(|&i| matrices.beta[i] * x0[i]));
        let sol = solve_vec(self.complement_system(matrices), &rhs, "stubborn response")?;
        let mut z = vec![0.0; matrices.n()];
        for (k, &i) in self.rest.iter().enumerate() {
            z[i] = sol[k];
        }
        Ok(z)
    }

    /// `Σ_j v_j w_jᵀ x(0)` with full right eigenvectors of `P`.
    fn zero_stubbornness_response(
        &self,
        matrices: &ModelMatrices,
        spectra: &[SinkSpectrum],
        x0: &[f64],
    ) -> Result<Vec<f64>> {
        let n = matrices.n();
        let mut z = vec![0.0; n];
        if spectra.is_empty() {
            return Ok(z);
        }
        let system = self.complement_system(matrices);
        for sp in spectra {
            let weight = sp.project(x0);
            let coupling = DVector::from_iterator(
                self.rest.len(),
                self.rest.iter().map(|&i| {
                    sp.members
                        .iter()
                        .zip(&sp.v)
                        .map(|(&m, v)| matrices.p[(i, m)] * v)
                        .sum::<f64>()
                }),
            );
            let v_rest = solve_vec(system.clone(), &coupling, "right eigenvector")?;
            for (&m, v) in sp.members.iter().zip(&sp.v) {
                z[m] += v * weight;
            }
            for (k, &i) in self.rest.iter().enumerate() {
                z[i] += v_rest[k] * weight;
            }
        }
        Ok(z)
    }

    /// Pins `S_n` coordinates to their leader limits and solves the rest of
    /// `z = P z + β x(0)` directly.
    fn pinned_solve(
        &self,
        matrices: &ModelMatrices,
        classification: &AgentClassification,
        spectra: &[SinkSpectrum],
        x0: &[f64],
    ) -> Result<Vec<f64>> {
        let mut z = vec![0.0; matrices.n()];
        for sp in spectra {
            for (agent, value) in leader_limit_with(classification, sp.sink, sp, x0)? {
                z[agent] = value;
            }
        }
        let rhs = DVector::from_iterator(
            self.rest.len(),
            self.rest.iter().map(|&i| {
                matrices.beta[i] * x0[i] + self.pinned.iter().map(|&j| matrices.p[(i, j)] * z[j]).sum::<f64>()
            }),
        );
        let sol = solve_vec(self.complement_system(matrices), &rhs, "direct steady state")?;
        for (k, &i) in self.rest.iter().enumerate() {
            z[i] = sol[k];
        }
        Ok(z)
    }
}

/// Limit opinion of every member of a sink without stubborn members.
///
/// A singleton leader keeps `x_i(0)` whatever its `β_i`.
pub fn leader_limit(
    matrices: &ModelMatrices,
    classification: &AgentClassification,
    sink: usize,
    x0: &[f64],
) -> Result<Vec<(usize, f64)>> {
    check_len(x0, classification.n)?;
    let info = &classification.sinks[sink];
    match info.kind {
        SinkKind::SingletonLeader => Ok(vec![(info.members[0], x0[info.members[0]])]),
        _ if info.has_stubborn => Err(Error::StubbornSinkRejected { sink }),
        SinkKind::Unbalanced => Ok(info.members.iter().map(|&m| (m, 0.0)).collect()),
        SinkKind::Cooperative | SinkKind::Balanced => {
            let sp = sink_spectrum(matrices, classification, sink)?;
            leader_limit_with(classification, sink, &sp, x0)
        }
    }
}

fn leader_limit_with(
    classification: &AgentClassification,
    sink: usize,
    sp: &SinkSpectrum,
    x0: &[f64],
) -> Result<Vec<(usize, f64)>> {
    let info = &classification.sinks[sink];
    if info.kind == SinkKind::SingletonLeader {
        return Ok(vec![(info.members[0], x0[info.members[0]])]);
    }
    let consensus = sp.project(x0);
    Ok(sp.members.iter().zip(&sp.v).map(|(&m, s)| (m, s * consensus)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;

    fn setup(
        n: usize,
        edges: &[(usize, usize, f64)],
        gamma: &[f64],
        beta: &[f64],
    ) -> (AgentClassification, ModelMatrices) {
        let net = SignedNetwork::new(n, edges).unwrap();
        let params = AgentParams::new(gamma.to_vec(), beta.to_vec()).unwrap();
        let c = classify(&net, &params).unwrap();
        let m = build_matrices(&net, &params, &c);
        (c, m)
    }

    #[test]
    fn q_row_normalises_absolute_weights() {
        let (_, m) = setup(3, &[(0, 1, 1.0), (0, 2, -1.0)], &[0.0; 3], &[0.0; 3]);
        assert_eq!(m.q.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.5, -0.5]);
        assert_eq!(m.q[(1, 1)], 1.0);
        assert_eq!(m.q[(2, 2)], 1.0);
    }

    #[test]
    fn p_for_two_node_cooperative_sink() {
        let (_, m) = setup(2, &[(0, 1, 1.0), (1, 0, 1.0)], &[0.4, 0.4], &[0.2, 0.0]);
        let expect = DMatrix::from_row_slice(2, 2, &[0.4, 0.4, 0.6, 0.4]);
        assert!((m.p - expect).amax() < 1e-15);
        assert_eq!(m.btilde, DMatrix::from_row_slice(2, 1, &[0.2, 0.0]));
    }

    #[test]
    fn antagonistic_pair_spectrum() {
        let (c, m) = setup(2, &[(0, 1, -1.0), (1, 0, -1.0)], &[0.5, 0.5], &[0.0, 0.0]);
        let s = sink_spectrum(&m, &c, 0).unwrap();
        assert!((s.w[0] - 0.5).abs() < 1e-12 && (s.w[1] + 0.5).abs() < 1e-12);
        assert_eq!(s.v, vec![1.0, -1.0]);
        // x0 = (a, b): limits are ±(a − b)/2
        let lim = leader_limit(&m, &c, 0, &[3.0, 1.0]).unwrap();
        assert!((lim[0].1 - 1.0).abs() < 1e-12 && (lim[1].1 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_cooperative_spectrum() {
        let (c, m) = setup(2, &[(0, 1, 2.0), (1, 0, 2.0)], &[0.3, 0.3], &[0.0, 0.0]);
        let s = sink_spectrum(&m, &c, 0).unwrap();
        assert!((s.w[0] - 0.5).abs() < 1e-12 && (s.w[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectrum_requires_influence_free_sink() {
        let (c, m) = setup(2, &[(0, 1, 1.0), (1, 0, 1.0)], &[0.4, 0.4], &[0.2, 0.0]);
        assert_eq!(sink_spectrum(&m, &c, 0), Err(Error::NotInfluenceFree { sink: 0 }));
        assert_eq!(
            leader_limit(&m, &c, 0, &[1.0, 2.0]),
            Err(Error::StubbornSinkRejected { sink: 0 })
        );
    }

    #[test]
    fn cooperative_sink_with_one_stubborn_member_follows_it() {
        let (c, m) = setup(2, &[(0, 1, 1.0), (1, 0, 1.0)], &[0.4, 0.4], &[0.2, 0.0]);
        let v = classify_convergence(&m, &c);
        assert_eq!(v.kind, ConvergenceKind::Convergent);
        let ss = steady_state(&m, &c, &v, &[3.0, -7.0]).unwrap();
        assert!((ss.z[0] - 3.0).abs() < 1e-12 && (ss.z[1] - 3.0).abs() < 1e-12);
        assert!(ss.z_o.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_initial_opinions_stay_zero() {
        let (_, m) = setup(
            3,
            &[(0, 1, 1.0), (1, 2, -1.0), (2, 1, 1.0)],
            &[0.2; 3],
            &[0.1, 0.0, 0.0],
        );
        let log = simulate(&m, &[0.0; 3], SimulationOptions::default()).unwrap();
        assert!(log.states.iter().all(|(_, x)| x.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn unbalanced_triangle_decays_to_zero() {
        let edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 0, -1.0)];
        let (c, m) = setup(3, &edges, &[0.3; 3], &[0.0; 3]);
        let v = classify_convergence(&m, &c);
        assert_eq!(v.kind, ConvergenceKind::Convergent);
        assert!(v.spectral_radius_estimate < 1.0 - 1e-6, "{v:?}");
        let log = simulate(
            &m,
            &[5.0, -2.0, 1.0],
            SimulationOptions {
                tol: 1e-13,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(log.converged);
        assert!(log.final_state().iter().all(|x| x.abs() < 1e-10));
        assert_eq!(
            leader_limit(&m, &c, 0, &[5.0, -2.0, 1.0]).unwrap(),
            vec![(0, 0.0), (1, 0.0), (2, 0.0)]
        );
    }

    #[test]
    fn chain_into_cooperative_sink_is_semi_convergent() {
        let edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 2, 1.0)];
        let (c, m) = setup(4, &edges, &[0.2; 4], &[0.0; 4]);
        let v = classify_convergence(&m, &c);
        assert_eq!(v.kind, ConvergenceKind::SemiConvergent);
        assert_eq!(v.unit_eigen_count, 1);
        assert!((v.spectral_radius_estimate - 1.0).abs() < 1e-9);
        let x0 = [4.0, -1.0, 2.0, 6.0];
        let expect = 0.5 * 2.0 + 0.5 * 6.0;
        for method in [
            SteadyStateMethod::DirectSolve,
            SteadyStateMethod::Eigenprojection,
            SteadyStateMethod::Iteration,
        ] {
            let ss = steady_state_by(
                method,
                &m,
                &c,
                &x0,
                SimulationOptions {
                    tol: 1e-14,
                    ..Default::default()
                },
            )
            .unwrap();
            for z in &ss.z {
                assert!((z - expect).abs() < 1e-9, "{method:?}: {z}");
            }
        }
    }

    #[test]
    fn singleton_leader_with_stubbornness_keeps_its_opinion() {
        let (c, m) = setup(2, &[(1, 0, 1.0)], &[0.0, 0.3], &[0.4, 0.0]);
        assert!(c.influence_free_sinks.is_empty());
        let v = classify_convergence(&m, &c);
        assert_eq!(v.kind, ConvergenceKind::Convergent);
        let ss = steady_state(&m, &c, &v, &[2.5, 9.0]).unwrap();
        assert!((ss.z[0] - 2.5).abs() < 1e-12 && (ss.z[1] - 2.5).abs() < 1e-12);
        assert_eq!(leader_limit(&m, &c, 0, &[2.5, 9.0]).unwrap(), vec![(0, 2.5)]);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let (_, m) = setup(2, &[(0, 1, 1.0), (1, 0, 1.0)], &[0.4, 0.4], &[0.0, 0.0]);
        let log = simulate(
            &m,
            &[1.0, 0.0],
            SimulationOptions {
                max_iters: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!log.converged);
        assert_eq!(log.iterations, 3);
        assert_eq!(log.states.len(), 4);
        assert!(matches!(
            log.ensure_converged(3),
            Err(Error::IterationCapReached { .. })
        ));

        let none = simulate(
            &m,
            &[1.0, 0.0],
            SimulationOptions {
                max_iters: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(none.states, vec![(0, vec![1.0, 0.0])]);
    }

    #[test]
    fn permuted_p_is_block_upper_triangular() {
        let edges = [(2, 0, 1.0), (2, 3, -1.0), (0, 1, 1.0), (1, 0, 1.0), (3, 2, 0.5)];
        // 2 and 3 form an SCC with an edge out to {0,1}; they are followers
        let (c, m) = setup(4, &edges, &[0.2; 4], &[0.0; 4]);
        assert_eq!(c.followers, vec![2, 3]);
        let pp = m.permuted_p();
        for (bi, block) in m.blocks.iter().enumerate().skip(1) {
            for r in block.clone() {
                for col in 0..pp.ncols() {
                    if !block.contains(&col) {
                        assert_eq!(pp[(r, col)], 0.0, "block {bi} row {r} col {col}");
                    }
                }
            }
        }
    }
}
