use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::action::{ActionVector, Policy};
use crate::domains::{build_shortcut_dag, ActionSet};

fn av(s: &str) -> ActionVector {
    ActionVector::parse(s).unwrap()
}

fn ledger_of(days: &[(Policy, Vec<f64>)]) -> RegretLedger {
    let mut l = RegretLedger::new(days[0].1.len());
    for (p, r) in days {
        let a = p.atoms()[0].0.clone();
        let v = a.dot(r);
        l.push_day(p, &a, r.clone(), v).unwrap();
    }
    l
}

#[test]
fn external_regret_of_uniform_two_sets() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let p = Policy::uniform([av("110"), av("101"), av("011")]);
    let l = ledger_of(&[(p, vec![1.0, 0.0, 0.0])]);
    assert!((external_regret(&l, &set).unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn zero_rewards_give_zero_regret() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let p = Policy::uniform([av("110"), av("101")]);
    let l = ledger_of(&[(p.clone(), vec![0.0; 3]), (p, vec![0.0; 3])]);
    assert_eq!(external_regret(&l, &set).unwrap(), 0.0);
    assert_eq!(swap_regret(&l, &set).unwrap(), 0.0);
}

#[test]
fn best_point_mass_has_zero_regret_and_swap_equals_external() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let r = vec![0.5, 0.2, 0.3];
    let best = Policy::point_mass(av("101"));
    let l = ledger_of(&[(best, r.clone()), (Policy::point_mass(av("101")), r.clone())]);
    assert!(external_regret(&l, &set).unwrap().abs() < 1e-12);
    let worse = ledger_of(&[(Policy::point_mass(av("011")), r.clone()), (Policy::point_mass(av("011")), r)]);
    let e = external_regret(&worse, &set).unwrap();
    let s = swap_regret(&worse, &set).unwrap();
    assert!((e - 0.6).abs() < 1e-12);
    assert!((e - s).abs() < 1e-12);
}

#[test]
fn alternating_point_masses_have_swap_above_external_regret() {
    // Three actions of a 1-set; each day the other action is rewarded.
    let set = ActionSet::m_sets(3, 1).unwrap();
    let (m1, m2) = (av("100"), av("010"));
    let days: Vec<_> = (0..6)
        .map(|i| {
            if i % 2 == 0 {
                (Policy::point_mass(m1.clone()), vec![0.0, 1.0, 0.0])
            } else {
                (Policy::point_mass(m2.clone()), vec![1.0, 0.0, 0.0])
            }
        })
        .collect();
    let l = ledger_of(&days);
    let ext = external_regret(&l, &set).unwrap();
    let swap = swap_regret(&l, &set).unwrap();
    // best fixed action earns 3 of 0; swapping M1->M2 and M2->M1 earns 6.
    assert!((ext - 3.0).abs() < 1e-12);
    assert!((swap - 6.0).abs() < 1e-12);
    let all = set.enumerate(10).unwrap();
    assert!((brute_force_swap(&l, &all, 10_000).unwrap() - swap).abs() < 1e-12);
}

#[test]
fn swap_matches_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sets = [ActionSet::m_sets(3, 1).unwrap(), ActionSet::m_sets(4, 2).unwrap(), ActionSet::m_sets(3, 2).unwrap()];
    for set in &sets {
        let all = set.enumerate(10).unwrap();
        for _ in 0..40 {
            let support: Vec<_> = (0..rng.gen_range(1..=4.min(all.len())))
                .map(|_| all[rng.gen_range(0..all.len())].clone())
                .collect();
            let mut l = RegretLedger::new(set.dim());
            for _ in 0..rng.gen_range(1..6) {
                let p = Policy::from_atoms(support.iter().map(|a| (a.clone(), rng.gen::<f64>() + 0.01))).unwrap();
                let mut p = p;
                p.normalize();
                let r: Vec<f64> = (0..set.dim()).map(|_| rng.gen::<f64>() / set.weight() as f64).collect();
                let a = p.atoms()[0].0.clone();
                let v = a.dot(&r);
                l.push_day(&p, &a, r, v).unwrap();
            }
            let s = swap_regret(&l, set).unwrap();
            let b = brute_force_swap(&l, &all, 2_000).unwrap();
            assert!((s - b).abs() < 1e-9, "swap {s} vs brute force {b}");
            assert!(s >= external_regret(&l, set).unwrap() - 1e-9);
        }
    }
}

#[test]
fn prefix_tracker_agrees_with_batch_evaluation() {
    let set = ActionSet::m_sets(4, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let all = set.enumerate(100).unwrap();
    let mut l = RegretLedger::new(4);
    for _ in 0..30 {
        let p = Policy::uniform([all[rng.gen_range(0..6)].clone(), all[rng.gen_range(0..6)].clone()]);
        let r: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() / 2.0).collect();
        let a = p.atoms()[0].0.clone();
        let v = a.dot(&r);
        l.push_day(&p, &a, r, v).unwrap();
    }
    let pre = prefix_regrets(&l, &set, 7).unwrap();
    assert_eq!(pre.iter().map(|x| x.0).collect::<Vec<_>>(), vec![7, 14, 21, 28, 30]);
    let last = pre.last().unwrap();
    assert!((last.1 - external_regret(&l, &set).unwrap()).abs() < 1e-12);
    assert!((last.2 - swap_regret(&l, &set).unwrap()).abs() < 1e-12);
}

#[test]
fn audit_with_one_scale_has_rhs_equal_to_horizon() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let p = Policy::uniform([av("110"), av("101"), av("011")]);
    let mut l = RegretLedger::new(3);
    for t in 1..=5 {
        let r = vec![0.3, 0.1, 0.2];
        l.push_day(&p, &av("110"), r.clone(), 0.4).unwrap();
        l.record_scales(t, &[(1, 1, p.clone())], &r, None);
    }
    let a = decomposition_audit(&l, &set).unwrap();
    assert_eq!(a.num_scales, 1);
    assert!((a.rhs - 5.0).abs() < 1e-12);
    assert!(a.holds);
}

#[test]
fn interval_records_tile_the_horizon() {
    let p = Policy::point_mass(av("110"));
    let mut l = RegretLedger::new(3);
    for t in 1..=9u64 {
        l.push_day(&p, &av("110"), vec![0.0; 3], 0.0).unwrap();
        l.record_scales(t, &[(1, (t - 1) / 3 + 1, p.clone()), (2, 1, p.clone())], &[0.0; 3], None);
    }
    l.validate().unwrap();
    let k1: Vec<_> = l.intervals().iter().filter(|r| r.k == 1).map(|r| (r.start, r.end)).collect();
    assert_eq!(k1, vec![(1, 3), (4, 6), (7, 9)]);
    assert_eq!(l.num_scales(), 2);
}

#[test]
fn shortcut_adversary_rewards_only_the_shortcut() {
    for leveled in [false, true] {
        let g = build_shortcut_dag(3).unwrap();
        let set = if leveled { ActionSet::leveled_dag_paths(&g).unwrap() } else { ActionSet::dag_paths(g).unwrap() };
        let mut adv = ShortcutAdversary::new(&set, 3).unwrap();
        let mut total = vec![0.0; set.dim()];
        for t in 1..=50 {
            let r = adv.reward(t).unwrap();
            crate::linalg::axpy(1.0, &r, &mut total);
        }
        assert!((set.max_value(&total).unwrap() - 50.0).abs() < 1e-12);
        assert!(ShortcutAdversary::new(&set, 2).is_err());
    }
}

#[test]
fn iid_replays_and_respects_unit_rewards() {
    let set = ActionSet::m_sets(5, 2).unwrap();
    let means = vec![0.9, 0.5, 0.1, 0.7, 0.3];
    let mut a = IidStochastic::new(&set, means.clone(), 4).unwrap();
    let mut b = IidStochastic::new(&set, means, 4).unwrap();
    for t in 1..=100 {
        let ra = a.reward(t).unwrap();
        assert_eq!(ra, b.reward(t).unwrap());
        assert!(set.max_value(&ra).unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn single_block_switching_is_constant() {
    let set = ActionSet::m_sets(3, 1).unwrap();
    let mut adv = PiecewiseSwitching::new(&set, vec![vec![0.2, 0.9, 0.4]], 10).unwrap();
    let first = adv.reward(1).unwrap();
    for t in 2..=10 {
        assert_eq!(adv.reward(t).unwrap(), first);
    }
    let adv = PiecewiseSwitching::new(&set, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 10).unwrap();
    assert_eq!((adv.block_of(5), adv.block_of(6)), (0, 1));
}

#[test]
fn custom_file_is_rescaled_to_unit_rewards() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let mut c = CustomRewards::from_reader(&set, "1,1,0\n0.5,0,0\n".as_bytes()).unwrap();
    assert_eq!(c.len(), 2);
    assert!((c.scale() - 0.5).abs() < 1e-15);
    assert_eq!(c.reward(2).unwrap(), vec![0.25, 0.0, 0.0]);
    assert!(c.reward(3).is_err());
    assert!(CustomRewards::from_reader(&set, "1,2,0\n".as_bytes()).is_err());
    assert!(CustomRewards::from_reader(&set, "1,0\n".as_bytes()).is_err());
}
