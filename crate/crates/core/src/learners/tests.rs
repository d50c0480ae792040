use std::sync::Arc;

use rand::Rng;

use super::*;
use crate::action::ActionVector;
use crate::domains::{build_shortcut_dag, ActionSet};
use crate::estimator::Estimator;
use crate::geometry::{decompose, kl_project};
use crate::master::Bandit;
use crate::rng::stream;
use crate::spanner::build_spanner;

fn av(s: &str) -> ActionVector {
    ActionVector::parse(s).unwrap()
}

fn params(gamma: f64, eta: f64, meta_len: u64) -> LearnerParams {
    LearnerParams { k: 1, gamma, eta, meta_len }
}

fn combcp(set: ActionSet, p: LearnerParams) -> ComBcp {
    let set = Arc::new(set);
    let sp = build_spanner(&set, 2.0).unwrap();
    ComBcp::new(Arc::new(CombcpShared::new(set, &sp).unwrap()), p).unwrap()
}

fn comband(set: &ActionSet, p: LearnerParams) -> ComBand {
    let sp = build_spanner(set, 2.0).unwrap();
    ComBand::new(Arc::new(CombandShared::new(set, &sp).unwrap()), p).unwrap()
}

#[test]
fn combcp_initial_policy_mixes_decomposition_and_exploration() {
    let l = combcp(ActionSet::m_sets(3, 2).unwrap(), params(0.5, 0.1, 1));
    l.policy().validate(1e-9).unwrap();
    let allowed = [av("110"), av("101"), av("011")];
    assert!(l.policy().atoms().iter().all(|(a, _)| allowed.contains(a)));
    for q in l.q() {
        assert!((q - 1.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn combcp_pure_exploration_is_the_spanner_policy() {
    let set = ActionSet::m_sets(4, 2).unwrap();
    let sp = build_spanner(&set, 2.0).unwrap();
    let l = combcp(set, params(1.0, 0.1, 1));
    assert_eq!(l.policy().sorted(), crate::spanner::exploration_policy(&sp).sorted());
}

#[test]
fn combcp_start_is_decomposable_on_every_test_domain() {
    for set in crate::domains::tests::test_domains().into_iter().filter(|s| s.is_fixed_weight()) {
        let l = combcp(set, params(0.3, 0.1, 1));
        l.policy().validate(1e-9).unwrap();
    }
}

#[test]
fn combcp_accumulates_until_the_meta_day_ends() {
    let mut l = combcp(ActionSet::m_sets(3, 2).unwrap(), params(0.5, 0.1, 3));
    let before = l.policy().clone();
    l.ingest(&[1.0, 0.0, 0.0]).unwrap();
    l.ingest(&[0.0, 1.0, 0.0]).unwrap();
    assert_eq!(l.accumulated(), &[1.0, 1.0, 0.0]);
    assert_eq!((l.meta_day(), l.day_in_meta(), l.version()), (1, 2, 0));
    assert_eq!(l.policy(), &before);
    l.ingest(&[0.0, 0.0, 0.0]).unwrap();
    assert_eq!(l.accumulated(), &[0.0, 0.0, 0.0]);
    assert_eq!((l.meta_day(), l.day_in_meta(), l.version()), (2, 0, 1));
    assert!(l.q()[2] < l.q()[0]);
}

#[test]
fn combcp_updates_every_day_at_the_finest_scale() {
    let mut l = combcp(ActionSet::m_sets(3, 2).unwrap(), params(0.5, 0.1, 1));
    for h in 1..=3 {
        l.ingest(&[0.5, 0.0, 0.0]).unwrap();
        assert_eq!(l.version(), h);
    }
}

#[test]
fn combcp_zero_and_constant_estimates_leave_q_alone() {
    let mut l = combcp(ActionSet::m_sets(3, 2).unwrap(), params(0.5, 0.1, 1));
    let (q, p) = (l.q().to_vec(), l.policy().clone());
    l.ingest(&[0.0; 3]).unwrap();
    assert_eq!((l.q(), l.policy()), (&q[..], &p));
    l.ingest(&[2.0; 3]).unwrap();
    for (a, b) in l.q().iter().zip(&q) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn combcp_update_moves_mass_toward_the_rewarded_coordinate() {
    let mut l = combcp(ActionSet::m_sets(3, 2).unwrap(), params(0.5, 1.0, 1));
    l.ingest(&[0.5, 0.0, 0.0]).unwrap();
    // Waterfilling by hand: 2/3 mass can't all go to coordinate 0 (cap 1/2),
    // so coordinate 0 is e^0.5/(e^0.5 + 2) unless that exceeds 1/2.
    let e = 0.5f64.exp();
    let expect = (e / (e + 2.0)).min(0.5);
    assert!((l.q()[0] - expect).abs() < 1e-9);
    assert!(l.q()[0] > 1.0 / 3.0 && l.q()[0] <= 0.5);
    assert!((l.q()[1] - l.q()[2]).abs() < 1e-12);
    let fresh = kl_project(&ActionSet::m_sets(3, 2).unwrap(), &[e / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
    for (a, b) in l.q().iter().zip(&fresh) {
        assert!((a - b).abs() < 1e-12);
    }
    decompose(&ActionSet::m_sets(3, 2).unwrap(), l.q()).unwrap();
}

#[test]
fn combcp_rejects_oversized_steps() {
    let mut l = combcp(ActionSet::m_sets(3, 2).unwrap(), params(0.5, 0.5, 1));
    let err = l.ingest(&[3.0, 0.0, 0.0]).unwrap_err();
    assert!(matches!(err, crate::error::Error::OmdPreconditionViolated { .. }));
}

#[test]
fn combcp_needs_fixed_weight_actions() {
    let set = Arc::new(ActionSet::dag_paths(build_shortcut_dag(2).unwrap()).unwrap());
    let sp = build_spanner(&set, 2.0).unwrap();
    assert!(CombcpShared::new(set, &sp).is_err());
}

#[test]
fn comband_weights_follow_action_gains() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let mut l = comband(&set, params(0.2, 1.0, 1));
    let w0 = l.weights();
    l.ingest(&[0.0; 3]).unwrap();
    assert_eq!(l.weights(), w0);
    l.ingest(&[1.0, 0.0, 0.0]).unwrap();
    // Actions are enumerated in order 011, 101, 110.
    let e = 1f64.exp();
    let z = 2.0 * e + 1.0;
    let expect = [1.0 / z, e / z, e / z];
    for (w, x) in l.weights().iter().zip(expect) {
        assert!((w - x).abs() < 1e-12);
    }
}

#[test]
fn comband_favours_an_aligned_action() {
    let set = ActionSet::m_sets(4, 2).unwrap();
    let mut l = comband(&set, params(0.2, 0.3, 1));
    l.ingest(&av("0101").to_f64()).unwrap();
    let w = l.weights();
    let best = w.iter().cloned().fold(0.0, f64::max);
    let idx = set.enumerate(100).unwrap().iter().position(|a| *a == av("0101")).unwrap();
    assert_eq!(w[idx], best);
    assert_eq!(w.iter().filter(|&&x| x == best).count(), 1);
}

#[test]
fn finest_scale_comband_matches_plain_exponential_weights() {
    let set = ActionSet::m_sets(5, 2).unwrap();
    let sp = build_spanner(&set, 2.0).unwrap();
    let shared = Arc::new(CombandShared::new(&set, &sp).unwrap());
    let (gamma, eta) = (0.3, 0.02);
    let est = Estimator::new(set.dim(), sp.span_basis().to_vec());
    let mut lazy = ComBand::new(shared.clone(), params(gamma, eta, 1)).unwrap();
    let mut plain = ExpWeights::new(shared, est.clone(), gamma, eta).unwrap();
    let reward = [0.1, 0.4, 0.05, 0.3, 0.2];
    let (mut r1, mut r2) = (stream(5, "eq"), stream(5, "eq"));
    for _ in 0..200 {
        assert_eq!(lazy.policy(), plain.policy());
        let out = plain.play(&mut r1, &mut |a| a.dot(&reward)).unwrap();
        let p = lazy.policy().clone();
        let a = p.atoms()[p.pick(r2.gen::<f64>())].0.clone();
        assert_eq!(a, out.action);
        lazy.ingest(&est.prepare(&p).unwrap().estimate(&a, a.dot(&reward))).unwrap();
    }
}

#[test]
fn replica_exploration_mass_on_the_shortcut() {
    let g = build_shortcut_dag(3).unwrap();
    let set = Arc::new(ActionSet::leveled_dag_paths(&g).unwrap());
    let r = CombExpReplica::new(set.clone(), 100).unwrap();
    let lv = set.dag().unwrap();
    for (e, o) in lv.original_of.iter().enumerate() {
        if *o == Some(0) {
            assert!((r.mu0()[e] - 1.0 / 36.0).abs() < 1e-12);
        }
    }
    let p = r.params();
    assert!(p.gamma > 0.0 && p.gamma <= 1.0 && p.eta > 0.0);
}

#[test]
fn replica_skips_updates_on_zero_reward_and_learns_on_positive() {
    let g = build_shortcut_dag(3).unwrap();
    let set = Arc::new(ActionSet::leveled_dag_paths(&g).unwrap());
    let mut r = CombExpReplica::new(set.clone(), 100).unwrap();
    let q0 = r.q().to_vec();
    let mut rng = stream(1, "replica");
    r.play(&mut rng, &mut |_| 0.0).unwrap();
    assert_eq!(r.q(), &q0[..]);
    let shortcut: Vec<usize> = set
        .dag()
        .unwrap()
        .original_of
        .iter()
        .enumerate()
        .filter(|(_, o)| **o == Some(0))
        .map(|(e, _)| e)
        .collect();
    let on = |a: &ActionVector| if shortcut.iter().all(|&e| a.get(e)) { 1.0 } else { 0.0 };
    let mut moved = false;
    for _ in 0..400 {
        let out = r.play(&mut rng, &mut |a| on(a)).unwrap();
        if out.reward > 0.0 {
            moved = true;
            break;
        }
    }
    if moved {
        assert!(r.q()[shortcut[0]] > q0[shortcut[0]]);
    }
}

#[test]
fn replica_policy_is_decomposable_throughout() {
    let set = Arc::new(ActionSet::m_sets(4, 2).unwrap());
    let mut r = CombExpReplica::new(set, 50).unwrap();
    let reward = [0.3, 0.1, 0.4, 0.2];
    let mut rng = stream(2, "replica");
    for _ in 0..50 {
        r.current_policy().unwrap().validate(1e-9).unwrap();
        r.play(&mut rng, &mut |a| a.dot(&reward)).unwrap();
    }
    let q = r.q();
    assert!(q[2] > q[1]);
}

#[test]
fn comband_policy_is_a_distribution() {
    let set = ActionSet::m_sets(4, 2).unwrap();
    let l = comband(&set, params(0.1, 0.1, 1));
    l.policy().validate(1e-9).unwrap();
}
