//! Lazy-ComBCP: mirror descent on a coordinate distribution `q ∈ P`, played
//! through a Carathéodory decomposition mixed with spanner exploration.

use std::sync::Arc;

use super::{check_precondition, validate_params, LazyLearner, LearnerParams, MetaClock};
use crate::action::Policy;
use crate::domains::ActionSet;
use crate::error::{Error, Result};
use crate::geometry::{decompose, kl_project};
use crate::linalg::norm_inf;
use crate::spanner::{exploration_policy, Spanner};

/// State shared by every ComBCP instance on one action set: the exploration
/// policy and the (projected) uniform starting point with its decomposition.
#[derive(Debug, Clone)]
pub struct CombcpShared {
    pub set: Arc<ActionSet>,
    pub mu: Policy,
    pub q0: Vec<f64>,
    pub p0: Policy,
}

impl CombcpShared {
    pub fn new(set: Arc<ActionSet>, spanner: &Spanner) -> Result<Self> {
        if !set.is_fixed_weight() {
            return Err(Error::invalid(
                "ComBCP needs every action to have the same weight; level the DAG or use ComBand",
            ));
        }
        let d = set.dim();
        // Uniform q need not lie in P (e.g. for paths), so start from its
        // projection, which equals uniform whenever uniform is feasible.
        let q0 = kl_project(&set, &vec![1.0 / d as f64; d])?;
        let p0 = decompose(&set, &q0)?;
        Ok(CombcpShared {
            mu: exploration_policy(spanner),
            set,
            q0,
            p0,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ComBcp {
    shared: Arc<CombcpShared>,
    params: LearnerParams,
    q: Vec<f64>,
    p_tilde: Policy,
    policy: Policy,
    clock: MetaClock,
    version: u64,
}

impl ComBcp {
    pub fn new(shared: Arc<CombcpShared>, params: LearnerParams) -> Result<Self> {
        validate_params(&params)?;
        let policy = shared.p0.mix(&shared.mu, params.gamma);
        Ok(ComBcp {
            q: shared.q0.clone(),
            p_tilde: shared.p0.clone(),
            clock: MetaClock::new(shared.set.dim()),
            shared,
            params,
            policy,
            version: 0,
        })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// The decomposition part of the policy, before exploration is mixed in.
    pub fn decomposition(&self) -> &Policy {
        &self.p_tilde
    }

    fn meta_update(&mut self) -> Result<()> {
        let x = &self.clock.acc;
        check_precondition(self.params.eta, norm_inf(x))?;
        if x.iter().all(|v| *v == 0.0) {
            return Ok(());
        }
        let eta = self.params.eta;
        let raw: Vec<f64> = self.q.iter().zip(x).map(|(q, xi)| q * (eta * xi).exp()).collect();
        self.q = kl_project(&self.shared.set, &raw)?;
        self.p_tilde = decompose(&self.shared.set, &self.q)?;
        self.policy = self.p_tilde.mix(&self.shared.mu, self.params.gamma);
        self.version += 1;
        Ok(())
    }
}

impl LazyLearner for ComBcp {
    fn policy(&self) -> &Policy {
        &self.policy
    }

    fn version(&self) -> u64 {
        self.version
    }

    fn meta_day(&self) -> u64 {
        self.clock.h
    }

    fn day_in_meta(&self) -> u64 {
        self.clock.tau
    }

    fn accumulated(&self) -> &[f64] {
        &self.clock.acc
    }

    fn params(&self) -> &LearnerParams {
        &self.params
    }

    fn ingest(&mut self, estimate: &[f64]) -> Result<()> {
        if self.clock.push(estimate, self.params.meta_len) {
            self.meta_update()?;
            self.clock.advance();
        }
        Ok(())
    }
}
