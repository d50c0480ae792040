use std::sync::Arc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use swapcomb_core::domains::{build_shortcut_dag, UGraph};
use swapcomb_core::geometry::{decompose, decompose_point, kl_project};
use swapcomb_core::master::{run_horizon, Bandit, LearnerKind, Master, Schedule};
use swapcomb_core::regret::{external_regret, swap_regret, IidStochastic, RegretLedger};
use swapcomb_core::rng::stream;
use swapcomb_core::{build_spanner, ActionSet, Policy};

fn mixture(set: &ActionSet, weights: &[f64]) -> Policy {
    let actions = set.enumerate(10_000).unwrap();
    let mut p = Policy::new();
    for (a, w) in actions.into_iter().zip(weights) {
        if *w > 0.0 {
            p.add(a, *w);
        }
    }
    p.normalize();
    p
}

fn assert_round_trip(set: &ActionSet, weights: &[f64]) {
    let x = mixture(set, weights).mean();
    let p = decompose_point(set, &x).unwrap();
    assert!(p.len() <= set.dim() + 1);
    assert_abs_diff_eq!(p.total_mass(), 1.0, epsilon = 1e-9);
    for (a, b) in p.mean().iter().zip(&x) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-7);
    }
    assert!(p.atoms().iter().all(|(a, _)| set.contains(a)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m_set_mixtures_decompose(weights in prop::collection::vec(0.0f64..1.0, 20)) {
        prop_assume!(weights.iter().any(|w| *w > 0.0));
        assert_round_trip(&ActionSet::m_sets(6, 3).unwrap(), &weights);
    }

    #[test]
    fn permutation_mixtures_decompose(weights in prop::collection::vec(0.0f64..1.0, 24)) {
        prop_assume!(weights.iter().any(|w| *w > 0.0));
        assert_round_trip(&ActionSet::permutations(4).unwrap(), &weights);
    }

    #[test]
    fn tree_mixtures_decompose(weights in prop::collection::vec(0.0f64..1.0, 16)) {
        prop_assume!(weights.iter().any(|w| *w > 0.0));
        assert_round_trip(&ActionSet::spanning_trees(UGraph::complete(4)).unwrap(), &weights);
    }

    #[test]
    fn m_set_projection_is_feasible_and_idempotent(raw in prop::collection::vec(0.001f64..5.0, 5)) {
        let set = ActionSet::m_sets(5, 2).unwrap();
        let q = kl_project(&set, &raw).unwrap();
        assert_abs_diff_eq!(q.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        prop_assert!(q.iter().all(|v| *v >= 0.0 && *v <= 0.5 + 1e-12));
        let again = kl_project(&set, &q).unwrap();
        for (a, b) in again.iter().zip(&q) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        decompose(&set, &q).unwrap();
    }

    #[test]
    fn swap_regret_dominates_external(seed in 0u64..1000, days in 1usize..20) {
        let set = ActionSet::m_sets(4, 2).unwrap();
        let actions = set.enumerate(6).unwrap();
        let mut rng = stream(seed, "prop/ledger");
        let mut ledger = RegretLedger::new(4);
        for t in 0..days {
            let mut p = Policy::new();
            p.add(actions[t % 6].clone(), 0.5 + (seed % 7) as f64);
            p.add(actions[(t * 5 + seed as usize) % 6].clone(), 1.0);
            p.normalize();
            let r: Vec<f64> = (0..4).map(|_| rand::Rng::gen::<f64>(&mut rng) / 2.0).collect();
            let a = p.atoms()[0].0.clone();
            let realized = a.dot(&r);
            ledger.push_day(&p, &a, r, realized).unwrap();
        }
        let s = swap_regret(&ledger, &set).unwrap();
        let e = external_regret(&ledger, &set).unwrap();
        prop_assert!(s >= e - 1e-9);
        prop_assert!(s >= -1e-9);
    }
}

fn domains() -> Vec<ActionSet> {
    vec![
        ActionSet::m_sets(5, 2).unwrap(),
        ActionSet::leveled_dag_paths(&build_shortcut_dag(2).unwrap()).unwrap(),
        ActionSet::spanning_trees(UGraph::complete(4)).unwrap(),
        ActionSet::k_forests(UGraph::complete(4), 2).unwrap(),
        ActionSet::permutations(3).unwrap(),
        ActionSet::truncated_permutations(2, 3).unwrap(),
    ]
}

#[test]
fn masters_play_valid_actions_on_every_domain() {
    for set in domains() {
        let set = Arc::new(set);
        let sp = build_spanner(&set, 2.0).unwrap();
        for kind in [LearnerKind::ComBcp, LearnerKind::ComBand] {
            let schedule = Schedule::practical(40, 3, Some(2), None, 1.0).unwrap();
            let mut master = Master::new(set.clone(), &sp, kind, schedule).unwrap();
            let means = vec![0.5; set.reward_dim()];
            let mut adv = IidStochastic::new(&set, means, 9).unwrap();
            let mut rng = stream(9, "play");
            let ledger = run_horizon(&mut master, &set, &mut adv, 40, &mut rng).unwrap();
            assert_eq!(master.day(), 40);
            ledger.validate().unwrap();
            for day in ledger.days() {
                assert!(set.contains(ledger.action(day.sampled)), "{}", set.kind().name());
                let mass: f64 = day.policy.iter().map(|(_, w)| w).sum();
                assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-9);
            }
        }
    }
}
