use super::*;
use crate::domains::build_shortcut_dag;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn av(s: &str) -> ActionVector {
    ActionVector::parse(s).unwrap()
}

fn kinds() -> Vec<ActionSet> {
    vec![
        ActionSet::m_sets(5, 2).unwrap(),
        ActionSet::m_sets(6, 3).unwrap(),
        ActionSet::dag_paths(build_shortcut_dag(3).unwrap()).unwrap(),
        ActionSet::leveled_dag_paths(&build_shortcut_dag(3).unwrap()).unwrap(),
        ActionSet::spanning_trees(UGraph::complete(4)).unwrap(),
        ActionSet::spanning_trees(UGraph::new(5, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (0, 4)]).unwrap()).unwrap(),
        ActionSet::k_forests(UGraph::complete(5), 2).unwrap(),
        ActionSet::permutations(3).unwrap(),
        ActionSet::permutations(4).unwrap(),
        ActionSet::truncated_permutations(2, 4).unwrap(),
    ]
}

/// A random convex combination of a random subset of the vertices.
fn random_hull_point(all: &[ActionVector], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = all[0].dim();
    let k = rng.gen_range(1..=all.len().min(8));
    let mut x = vec![0.0; d];
    let ws: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
    let total: f64 = ws.iter().sum();
    for w in ws {
        let a = &all[rng.gen_range(0..all.len())];
        for i in a.ones() {
            x[i] += w / total;
        }
    }
    x
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn two_sets_center_and_vertex() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let p = decompose(&set, &[1.0 / 3.0; 3]).unwrap();
    assert_eq!(p.len(), 3);
    for (_, w) in p.atoms() {
        assert!((w - 1.0 / 3.0).abs() < 1e-12);
    }
    let p = decompose(&set, &[0.5, 0.5, 0.0]).unwrap();
    assert_eq!(p.atoms(), &[(av("110"), 1.0)]);
}

#[test]
fn birkhoff_on_uniform_doubly_stochastic() {
    let set = ActionSet::permutations(3).unwrap();
    let p = decompose(&set, &[1.0 / 9.0; 9]).unwrap();
    let mean = p.mean();
    assert!(max_diff(&mean, &[1.0 / 3.0; 9]) < 1e-12);
    assert!(p.len() <= 10);
    for (a, _) in p.atoms() {
        assert!(set.contains(a));
    }
}

#[test]
fn round_trips_on_random_hull_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for set in kinds() {
        let all = set.enumerate(10_000).unwrap();
        for _ in 0..200 {
            let x = random_hull_point(&all, &mut rng);
            let p = decompose_point(&set, &x).unwrap_or_else(|e| panic!("{:?}: {e}", set.kind()));
            assert!(p.len() <= set.dim() + 1);
            p.validate(1e-9).unwrap();
            assert!(max_diff(&p.mean(), &x) <= 1e-7);
            assert!(p.atoms().iter().all(|(a, _)| set.contains(a)));
        }
    }
}

#[test]
fn column_generation_agrees_on_every_kind() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for set in kinds() {
        let all = set.enumerate(10_000).unwrap();
        for _ in 0..30 {
            let x = random_hull_point(&all, &mut rng);
            let p = decompose_by_columns(&set, &x).unwrap();
            assert!(p.len() <= set.dim() + 1);
            assert!(max_diff(&p.mean(), &x) <= 1e-7, "{:?}", set.kind());
        }
    }
}

#[test]
fn vertices_decompose_to_point_masses() {
    for set in kinds() {
        for a in set.enumerate(10_000).unwrap() {
            let p = decompose_point(&set, &a.to_f64()).unwrap();
            assert_eq!(p.len(), 1, "{:?} {a}", set.kind());
            assert_eq!(p.atoms()[0].0, a);
        }
    }
}

#[test]
fn points_outside_the_hull_are_rejected() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    assert!(matches!(decompose(&set, &[0.9, 0.1, 0.0]), Err(Error::NotInHull { .. })));
    let set = ActionSet::spanning_trees(UGraph::complete(4)).unwrap();
    // all mass on the triangle 0-1-2
    let x = [1.0, 1.0, 0.0, 1.0, 0.0, 0.0];
    assert!(!in_hull(&set, &x));
}

#[test]
fn caratheodory_keeps_the_mean() {
    let set = ActionSet::m_sets(4, 2).unwrap();
    let all = set.enumerate(10).unwrap();
    let p = Policy::uniform(all);
    let r = caratheodory_reduce(&p);
    assert!(r.len() <= 5);
    assert!(max_diff(&r.mean(), &p.mean()) < 1e-12);
}

#[test]
fn waterfilling_example() {
    let set = ActionSet::m_sets(3, 2).unwrap();
    let q = kl_project(&set, &[0.8, 0.1, 0.1]).unwrap();
    assert!(max_diff(&q, &[0.5, 0.25, 0.25]) < 1e-12);
    let q = kl_project(&set, &[1.0 / 3.0; 3]).unwrap();
    assert!(max_diff(&q, &[1.0 / 3.0; 3]) < 1e-15);
}

#[test]
fn waterfilling_is_grid_optimal() {
    // d = 3, m = 2: P = {q ≤ 1/2, Σq = 1}; scan a 1e-3 grid.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let set = ActionSet::m_sets(3, 2).unwrap();
    for _ in 0..5 {
        let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..1.0)).collect();
        let q = kl_project(&set, &raw).unwrap();
        let best_found = generalized_kl(&q, &raw);
        let mut best_grid = f64::INFINITY;
        let steps = 1000;
        for a in 0..=steps / 2 {
            for b in 0..=steps / 2 {
                let (qa, qb) = (a as f64 / steps as f64, b as f64 / steps as f64);
                let qc = 1.0 - qa - qb;
                if (0.0..=0.5 + 1e-12).contains(&qc) {
                    best_grid = best_grid.min(generalized_kl(&[qa, qb, qc], &raw));
                }
            }
        }
        assert!(best_found <= best_grid + 1e-6);
        assert!(best_grid - best_found < 1e-2);
    }
}

#[test]
fn waterfilling_matches_the_generic_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (d, m) in [(3, 2), (4, 2), (6, 3), (5, 1)] {
        let set = ActionSet::m_sets(d, m).unwrap();
        for _ in 0..20 {
            let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.001..2.0)).collect();
            let a = kl_project(&set, &raw).unwrap();
            let b = kl_project_generic(&set, &raw).unwrap();
            assert!(max_diff(&a, &b) < 1e-7, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn projection_fixes_points_of_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for set in kinds() {
        let all = set.enumerate(10_000).unwrap();
        let m = set.weight() as f64;
        for _ in 0..10 {
            // Interior point: mix with the barycenter so every coordinate is positive.
            let x = random_hull_point(&all, &mut rng);
            let bary = Policy::uniform(all.clone()).mean();
            let q: Vec<f64> = x.iter().zip(&bary).map(|(a, b)| (0.5 * a + 0.5 * b) / m).collect();
            let p = kl_project(&set, &q).unwrap();
            assert!(max_diff(&p, &q) < 1e-10, "{:?}", set.kind());
        }
    }
}

#[test]
fn projection_is_in_p_and_beats_other_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for set in kinds() {
        let all = set.enumerate(10_000).unwrap();
        let m = set.weight() as f64;
        for _ in 0..5 {
            let raw: Vec<f64> = (0..set.dim()).map(|_| rng.gen_range(0.01..1.0)).collect();
            let q = kl_project(&set, &raw).unwrap();
            let x: Vec<f64> = q.iter().map(|v| v * m).collect();
            assert!(in_hull(&set, &x), "{:?}", set.kind());
            let kl = generalized_kl(&q, &raw);
            for _ in 0..50 {
                let z: Vec<f64> = random_hull_point(&all, &mut rng).iter().map(|v| v / m).collect();
                assert!(kl <= generalized_kl(&z, &raw) + 1e-9, "{:?}", set.kind());
            }
        }
    }
}

#[test]
fn projection_of_uniform_lands_in_p() {
    for set in kinds() {
        let d = set.dim();
        let q = kl_project(&set, &vec![1.0 / d as f64; d]).unwrap();
        assert!(decompose(&set, &q).is_ok(), "{:?}", set.kind());
    }
}

