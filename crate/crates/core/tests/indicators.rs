use proptest::prelude::*;
use rand::Rng;
use sway_core::metrics::{
    gd, gs, hv, hv_estimate, nondominated_filter, nondominated_points, Front, HvConfig, HvMode,
};
use sway_core::problem::{Candidate, Decisions, Direction, Objective, ObjectiveSpec};
use sway_core::seed;

fn oriented(c: &Candidate, spec: &ObjectiveSpec) -> Vec<f64> {
    c.objectives()
        .unwrap()
        .iter()
        .zip(spec.objectives())
        .map(|(v, o)| {
            if o.direction == Direction::Maximize {
                -v
            } else {
                *v
            }
        })
        .collect()
}

fn brute_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

#[test]
fn nondominated_filter_matches_brute_force() {
    let mut rng = seed::rng(2024);
    for trial in 0..1000 {
        let m = rng.gen_range(2..=5);
        let n = rng.gen_range(1..=200);
        let spec = ObjectiveSpec::new(
            (0..m)
                .map(|j| {
                    if rng.gen_bool(0.5) {
                        Objective::minimize(format!("f{j}"))
                    } else {
                        Objective::maximize(format!("f{j}"))
                    }
                })
                .collect(),
        );
        // Coarse values so ties and duplicates occur.
        let pop: Vec<Candidate> = (0..n)
            .map(|i| {
                Candidate::evaluated(
                    i,
                    Decisions::Real(vec![]),
                    (0..m).map(|_| rng.gen_range(0..8) as f64).collect(),
                )
            })
            .collect();
        let o: Vec<Vec<f64>> = pop.iter().map(|c| oriented(c, &spec)).collect();
        let mut expected: Vec<Vec<f64>> = (0..n)
            .filter(|&i| !(0..n).any(|k| brute_dominates(&o[k], &o[i])))
            .map(|i| o[i].clone())
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        expected.dedup();
        let mut got: Vec<Vec<f64>> = nondominated_filter(&pop, &spec)
            .unwrap()
            .iter()
            .map(|c| oriented(c, &spec))
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, expected, "trial {trial}");
    }
}

#[test]
fn hypervolume_hand_values() {
    let cfg = HvConfig::default();
    let f = |p: Vec<Vec<f64>>| hv(&Front::new(p), &cfg).unwrap();
    assert!((f(vec![vec![0.5, 0.5]]) - 0.25).abs() < 1e-12);
    assert!((f(vec![vec![0.2, 0.6], vec![0.6, 0.2]]) - 0.48).abs() < 1e-12);
    assert_eq!(f(vec![vec![1.0, 1.0]]), 0.0);
    assert_eq!(f(vec![]), 0.0);
}

fn random_front<R: Rng>(rng: &mut R) -> Front {
    let m = rng.gen_range(2..=5);
    let n = rng.gen_range(1..=30);
    nondominated_points(
        (0..n)
            .map(|_| (0..m).map(|_| rng.gen::<f64>()).collect())
            .collect(),
    )
}

#[test]
fn exact_hypervolume_agrees_with_monte_carlo() {
    let mut rng = seed::rng(77);
    for k in 0..100 {
        let front = random_front(&mut rng);
        let exact = hv(&front, &HvConfig::default()).unwrap();
        let mc = hv_estimate(
            &front,
            &HvConfig {
                reference: None,
                mode: HvMode::MonteCarlo {
                    samples: 200_000,
                    seed: k,
                },
            },
        )
        .unwrap();
        assert!(
            (exact - mc.value).abs() < 0.01,
            "front {k}: exact {exact}, estimate {}",
            mc.value
        );
    }
}

fn nearest(p: &[f64], set: &[Vec<f64>]) -> f64 {
    set.iter()
        .map(|q| {
            p.iter()
                .zip(q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn distance_indicators_match_term_by_term() {
    let mut rng = seed::rng(5);
    for k in 0..100 {
        let pf0 = random_front(&mut rng);
        let m = pf0.points[0].len();
        let n = rng.gen_range(2..=25);
        let pfc = nondominated_points(
            (0..n)
                .map(|_| (0..m).map(|_| rng.gen::<f64>()).collect())
                .collect(),
        );

        let d: Vec<f64> = pfc.points.iter().map(|p| nearest(p, &pf0.points)).collect();
        let want_gd = d.iter().map(|x| x * x).sum::<f64>().sqrt() / d.len() as f64;
        assert!((gd(&pfc, &pf0).unwrap() - want_gd).abs() < 1e-9, "pair {k}");

        let want_gs = if pfc.len() < 2 {
            1.0
        } else {
            let extremes: f64 = (0..m)
                .map(|j| {
                    let e = pf0
                        .points
                        .iter()
                        .min_by(|a, b| a[j].total_cmp(&b[j]))
                        .unwrap();
                    nearest(e, &pfc.points)
                })
                .sum();
            let nn: Vec<f64> = (0..pfc.len())
                .map(|i| {
                    let others: Vec<Vec<f64>> = pfc
                        .points
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, q)| q.clone())
                        .collect();
                    nearest(&pfc.points[i], &others)
                })
                .collect();
            let mean = nn.iter().sum::<f64>() / nn.len() as f64;
            let dev: f64 = nn.iter().map(|x| (x - mean).abs()).sum();
            (extremes + dev) / (extremes + nn.len() as f64 * mean)
        };
        assert!((gs(&pfc, &pf0).unwrap() - want_gs).abs() < 1e-9, "pair {k}");
    }
}

#[test]
fn gd_of_the_reference_front_is_zero() {
    let f = Front::new(vec![vec![0.1, 0.9], vec![0.5, 0.5], vec![0.9, 0.1]]);
    assert_eq!(gd(&f, &f).unwrap(), 0.0);
    assert!(gd(&Front::new(vec![]), &f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hypervolume_is_monotone_under_additions(
        pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..20),
        extra in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let cfg = HvConfig::default();
        let base = hv(&nondominated_points(pts.clone()), &cfg).unwrap();
        let mut more = pts;
        more.push(extra);
        let grown = hv(&nondominated_points(more), &cfg).unwrap();
        prop_assert!(grown >= base - 1e-12);
        prop_assert!((0.0..=1.0).contains(&base));
    }

    #[test]
    fn filtered_points_are_mutually_nondominated(
        pts in prop::collection::vec(prop::collection::vec(0u8..5, 3), 1..60),
    ) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
        let f = nondominated_points(pts.clone());
        for a in &f.points {
            prop_assert!(!f.points.iter().any(|b| brute_dominates(b, a)));
        }
        for p in &pts {
            prop_assert!(f.points.iter().any(|q| q == p || brute_dominates(q, p)));
        }
    }
}
