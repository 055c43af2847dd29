use sway_core::models::fmgen::{generate_feature_model, FeatureModelSpec};
use sway_core::models::spl::{SplModel, BUILTIN_MODELS, SYNTHETIC_MODELS};
use sway_core::models::{builtin_models, load_builtin, Pom3Model};
use sway_core::problem::{evaluate, Candidate, Decisions, EvaluationLedger};
use sway_core::satgen::to_dimacs;
use sway_core::seed;

#[test]
fn shipped_synthetic_models_regenerate_exactly() {
    for &(name, features, clauses, s) in SYNTHETIC_MODELS.iter() {
        let cnf =
            generate_feature_model(&FeatureModelSpec::new(name, features, clauses, s)).unwrap();
        assert_eq!(cnf.variable_count, features);
        assert_eq!(cnf.clauses.len(), clauses);
        let shipped = BUILTIN_MODELS.iter().find(|(n, _)| *n == name).unwrap().1;
        assert_eq!(to_dimacs(&cnf), shipped, "{name}");
    }
}

#[test]
fn mobile_phone_is_the_small_example() {
    let m = SplModel::builtin("mobile_phone", 0).unwrap();
    assert_eq!(m.cnf().variable_count, 10);
}

#[test]
fn every_model_evaluates_its_own_samples() {
    for info in builtin_models() {
        let model = load_builtin(info.name, 1).unwrap();
        let ledger = EvaluationLedger::new();
        let m = model.objective_spec().len();
        for (i, d) in model.generate(20, 9).unwrap().into_iter().enumerate() {
            let mut c = Candidate::new(i, d);
            let o = evaluate(model.as_ref(), &mut c, &ledger).unwrap();
            assert_eq!(o.len(), m, "{}", info.name);
            assert!(o.iter().all(|v| v.is_finite()), "{}: {o:?}", info.name);
        }
        assert_eq!(ledger.evaluations(), 20);
        assert_eq!(model.generate(5, 3).unwrap(), model.generate(5, 3).unwrap());
    }
}

#[test]
fn pom3_bigger_teams_cost_more() {
    let model = Pom3Model::builtin("pom3a", 0).unwrap();
    let space = sway_core::problem::ProblemModel::decision_space(&model);
    let team = space.index_of("team_size").unwrap();
    let (lo, hi) = (space.dims()[team].lower, space.dims()[team].upper);
    let mut rng = seed::rng(12);
    let mut wins = 0;
    for _ in 0..100 {
        let Decisions::Real(mut x) = space.sample_uniform(&mut rng) else {
            unreachable!()
        };
        x[team] = hi;
        let big = model.simulate(&x)[2];
        x[team] = lo;
        let small = model.simulate(&x)[2];
        wins += usize::from(big > small);
    }
    assert!(wins >= 90, "{wins}/100");
}

#[test]
fn xomo_objectives_are_finite_and_nonnegative() {
    use sway_core::models::XomoModel;
    for (name, _) in sway_core::models::xomo::BUILTIN_SCENARIOS {
        let model = XomoModel::builtin(name).unwrap();
        for d in sway_core::problem::ProblemModel::generate(&model, 10_000, 1).unwrap() {
            let o = model.objectives_for(d.as_real().unwrap());
            assert!(
                o.iter().all(|v| v.is_finite() && *v >= 0.0),
                "{name}: {o:?}"
            );
            assert!(o[0] <= 100.0);
        }
    }
}

#[test]
fn pom3_objectives_honor_their_ranges() {
    for (name, _) in sway_core::models::pom3::BUILTIN_SCENARIOS {
        let model = Pom3Model::builtin(name, 5).unwrap();
        for d in sway_core::problem::ProblemModel::generate(&model, 10_000, 2).unwrap() {
            let [completion, idle, cost] = model.simulate(d.as_real().unwrap());
            assert!(
                (0.0..=1.0).contains(&completion) && (0.0..=1.0).contains(&idle),
                "{name}"
            );
            assert!(cost.is_finite() && cost >= 0.0);
        }
    }
}

#[test]
fn spl_objectives_move_with_each_added_feature() {
    use sway_core::models::spl::spl_evaluate;
    let mut rng = seed::rng(3);
    for (name, _) in BUILTIN_MODELS {
        let m = SplModel::builtin(name, 4).unwrap();
        for d in sway_core::problem::ProblemModel::generate(&m, 50, 8).unwrap() {
            let bits = d.as_bits().unwrap().to_vec();
            let before = spl_evaluate(&bits, &m).unwrap();
            assert_eq!(before[0], 0.0);
            let off: Vec<usize> = (0..bits.len()).filter(|&i| !bits[i]).collect();
            if off.is_empty() {
                continue;
            }
            let mut more = bits.clone();
            more[off[rand::Rng::gen_range(&mut rng, 0..off.len())]] = true;
            let after = spl_evaluate(&more, &m).unwrap();
            assert_eq!(after[1], before[1] + 1.0);
            assert!(after[2] >= before[2] && after[3] > before[3] && after[4] >= before[4]);
        }
    }
}

#[test]
fn decision_space_sizes_are_ordered() {
    use sway_core::models::spl::PUBLIC_MODEL_SIZES;
    use sway_core::models::xomo::{CocomoTable, XomoScenario};
    let t = CocomoTable::builtin();
    let v = |n| XomoScenario::builtin(n, &t).unwrap().log_volume();
    for small in ["osp", "osp2"] {
        for large in ["ground", "flight"] {
            assert!(v(small) < v(large), "{small} vs {large}");
        }
    }
    let f: Vec<usize> = PUBLIC_MODEL_SIZES.iter().map(|r| r.1).collect();
    assert!(f[0] < f[1] && f[1] < f[2] && f[2].abs_diff(f[3]) < f[2] / 5 && f[3] < f[4]);
    let sizes: Vec<usize> = SYNTHETIC_MODELS.iter().map(|r| r.1).collect();
    assert!(sizes.windows(2).all(|w| w[0] < w[1]));
}
