//! Builds the instance described by a config and runs every (horizon, seed)
//! pair.

use std::sync::Arc;

use rayon::prelude::*;
use swapcomb_core::domains::{build_shortcut_dag, Dag, UGraph};
use swapcomb_core::learners::{CombExpParams, CombExpReplica, CombandShared, ExpWeights};
use swapcomb_core::master::{run_horizon, run_instrumented, Bandit, Doubling, LearnerFactory, LearnerKind, Master, Schedule};
use swapcomb_core::regret::{
    decomposition_audit, prefix_regrets, AuditReport, CustomRewards, IidStochastic, PiecewiseSwitching,
    RewardSequence, ShortcutAdversary,
};
use swapcomb_core::rng::stream;
use swapcomb_core::estimator::Estimator;
use swapcomb_core::{build_spanner, ActionSet, Spanner};

use crate::config::{AdversarySpec, Algorithm, DomainSpec, ExperimentConfig, HSpec, ModeSpec};
use crate::BenchError;

/// Outcome of one (horizon, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub horizon: u64,
    pub seed: u64,
    pub realized: f64,
    pub external: f64,
    pub swap: f64,
    /// `(t, cumulative realized reward, external regret, swap regret)`.
    pub prefix: Vec<(u64, f64, f64, f64)>,
    pub audit: Option<AuditReport>,
}

pub fn build_domain(spec: &DomainSpec) -> Result<ActionSet, BenchError> {
    let set = match spec {
        DomainSpec::MSets { d, m } => ActionSet::m_sets(*d, *m)?,
        DomainSpec::ShortcutDag { n, leveled } => {
            let g = build_shortcut_dag(*n)?;
            if *leveled {
                ActionSet::leveled_dag_paths(&g)?
            } else {
                ActionSet::dag_paths(g)?
            }
        }
        DomainSpec::DagFile { path, leveled } => {
            let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.clone(), e))?;
            let g = Dag::parse(&text)?;
            if *leveled {
                ActionSet::leveled_dag_paths(&g)?
            } else {
                ActionSet::dag_paths(g)?
            }
        }
        DomainSpec::SpanningTrees { vertices, edges } => ActionSet::spanning_trees(UGraph::new(*vertices, edges.clone())?)?,
        DomainSpec::KForests { vertices, edges, k } => ActionSet::k_forests(UGraph::new(*vertices, edges.clone())?, *k)?,
        DomainSpec::Permutations { n } => ActionSet::permutations(*n)?,
        DomainSpec::TruncatedPermutations { k, n } => ActionSet::truncated_permutations(*k, *n)?,
    };
    Ok(set)
}

pub fn build_adversary(
    spec: &AdversarySpec,
    domain: &DomainSpec,
    set: &ActionSet,
    seed: u64,
    horizon: u64,
) -> Result<Box<dyn RewardSequence>, BenchError> {
    Ok(match spec {
        AdversarySpec::Iid { means } => Box::new(IidStochastic::new(set, means.clone(), seed)?),
        AdversarySpec::Switching { blocks } => Box::new(PiecewiseSwitching::new(set, blocks.clone(), horizon)?),
        AdversarySpec::Shortcut => match domain {
            DomainSpec::ShortcutDag { n, .. } => Box::new(ShortcutAdversary::new(set, *n)?),
            _ => return Err(BenchError::Config("adversary: the shortcut adversary needs the shortcut_dag domain".into())),
        },
        AdversarySpec::File { path } => {
            let f = std::fs::File::open(path).map_err(|e| BenchError::Io(path.clone(), e))?;
            let rows = CustomRewards::from_reader(set, f)?;
            if (rows.len() as u64) < horizon {
                return Err(BenchError::Config(format!(
                    "adversary.path: {} has {} rows but the horizon is {horizon}",
                    path.display(),
                    rows.len()
                )));
            }
            Box::new(rows)
        }
    })
}

/// The action set and everything derived from it that runs can share.
pub struct Instance {
    pub set: Arc<ActionSet>,
    pub spanner: Spanner,
    factory: Option<LearnerFactory>,
    comband: Option<Arc<CombandShared>>,
}

impl Instance {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, BenchError> {
        let set = Arc::new(build_domain(&cfg.domain)?);
        let spanner = build_spanner(&set, cfg.params.spanner_c)?;
        log::info!(
            "{}: {} d={} m={} spanner rank {} ({} oracle calls)",
            cfg.name,
            set.kind().name(),
            set.dim(),
            set.weight(),
            spanner.rank(),
            spanner.oracle_calls()
        );
        let factory = match cfg.algorithm {
            Algorithm::SwapCombcp => Some(LearnerFactory::new(LearnerKind::ComBcp, &set, &spanner)?),
            Algorithm::SwapComband => Some(LearnerFactory::new(LearnerKind::ComBand, &set, &spanner)?),
            _ => None,
        };
        let comband = match cfg.algorithm {
            Algorithm::ExpWeightsBaseline => Some(Arc::new(CombandShared::new(&set, &spanner)?)),
            _ => None,
        };
        Ok(Instance {
            set,
            spanner,
            factory,
            comband,
        })
    }

    pub fn schedule(&self, cfg: &ExperimentConfig, horizon: u64) -> Result<Schedule, BenchError> {
        let p = &cfg.params;
        let mut s = match p.mode {
            ModeSpec::Theory => Schedule::theory(self.set.dim(), self.set.weight(), horizon),
            ModeSpec::Practical => {
                let h = match p.h {
                    HSpec::Fixed(h) => h,
                    HSpec::Auto(_) => Schedule::auto_h(horizon),
                };
                Schedule::practical(horizon, h, p.k, p.gamma, p.eta_scale)?
            }
        };
        s.eta_fixed = p.eta;
        Ok(s)
    }

    /// A fresh algorithm tuned for `horizon` days.
    pub fn algorithm(&self, cfg: &ExperimentConfig, horizon: u64) -> Result<Box<dyn Bandit + Send>, BenchError> {
        let p = &cfg.params;
        Ok(match cfg.algorithm {
            Algorithm::SwapCombcp | Algorithm::SwapComband => {
                let factory = self.factory.clone().expect("master algorithms build a factory");
                let sched = self.schedule(cfg, horizon)?;
                Box::new(Master::with_factory(self.set.clone(), &self.spanner, factory, sched)?)
            }
            Algorithm::CombexpReplica => match (p.gamma, p.eta) {
                (Some(gamma), Some(eta)) => Box::new(CombExpReplica::with_params(self.set.clone(), CombExpParams { gamma, eta })?),
                _ => Box::new(CombExpReplica::new(self.set.clone(), horizon)?),
            },
            Algorithm::ExpWeightsBaseline => {
                let shared = self.comband.clone().expect("baseline builds its tables");
                let gamma = p.gamma.unwrap_or((horizon.max(2) as f64).powf(-1.0 / 3.0));
                // Keeps eta·|X̃·M| ≤ 1 for estimates under gamma-exploration.
                let eta = p.eta.unwrap_or(p.eta_scale * gamma * shared.lambda_min / self.set.weight() as f64);
                let est = Estimator::new(self.set.dim(), self.spanner.span_basis().to_vec());
                Box::new(ExpWeights::new(shared, est, gamma, eta)?)
            }
        })
    }
}

/// Runs one (horizon, seed) pair.
pub fn run_one(cfg: &ExperimentConfig, inst: &Instance, horizon: u64, seed: u64) -> Result<RunResult, BenchError> {
    let wrap = |e: BenchError| BenchError::Run {
        horizon,
        seed,
        source: Box::new(e),
    };
    let mut adversary = build_adversary(&cfg.adversary, &cfg.domain, &inst.set, seed, horizon).map_err(wrap)?;
    let mut rng = stream(seed, "play");
    let ledger = if cfg.params.doubling {
        let mut alg = Doubling::new(|len| inst.algorithm(cfg, len).map_err(|e| match e {
            BenchError::Core(c) => c,
            other => swapcomb_core::Error::InvalidInput(other.to_string()),
        }));
        run_horizon(&mut alg, &inst.set, adversary.as_mut(), horizon, &mut rng)
    } else {
        let mut alg = inst.algorithm(cfg, horizon).map_err(wrap)?;
        if cfg.audit {
            run_instrumented(&mut alg, &inst.set, adversary.as_mut(), horizon, &mut rng)
        } else {
            run_horizon(&mut alg, &inst.set, adversary.as_mut(), horizon, &mut rng)
        }
    }
    .map_err(|e| wrap(e.into()))?;

    let stride = cfg.stride_for(horizon);
    let regrets = prefix_regrets(&ledger, &inst.set, stride).map_err(|e| wrap(e.into()))?;
    let mut cum = 0.0;
    let mut days = ledger.days().iter();
    let mut prefix = Vec::with_capacity(regrets.len());
    for (t, ext, swap) in regrets {
        for d in days.by_ref() {
            cum += d.realized;
            if d.t == t {
                break;
            }
        }
        prefix.push((t, cum, ext, swap));
    }
    let &(_, realized, external, swap) = prefix.last().expect("horizon is positive");
    let audit = if cfg.audit {
        Some(decomposition_audit(&ledger, &inst.set).map_err(|e| wrap(e.into()))?)
    } else {
        None
    };
    Ok(RunResult {
        horizon,
        seed,
        realized,
        external,
        swap,
        prefix,
        audit,
    })
}

/// Runs every horizon × seed pair in parallel; results come back in
/// (horizon, seed) order regardless of scheduling.
pub fn run_all(cfg: &ExperimentConfig, seed_offset: u64) -> Result<Vec<RunResult>, BenchError> {
    cfg.validate()?;
    let inst = Instance::new(cfg)?;
    let jobs: Vec<(u64, u64)> = cfg
        .horizons
        .iter()
        .flat_map(|&t| cfg.seeds.seeds().into_iter().map(move |s| (t, s + seed_offset)))
        .collect();
    jobs.par_iter()
        .map(|&(t, s)| {
            let r = run_one(cfg, &inst, t, s);
            if let Ok(r) = &r {
                log::debug!("{} T={t} seed={s}: swap {:.3} external {:.3}", cfg.name, r.swap, r.external);
            }
            r
        })
        .collect()
}
