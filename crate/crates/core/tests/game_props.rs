mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unigame_core::game::{potential, CostModel, EdgeView, LocalGame};
use unigame_core::graph::ball;
use unigame_core::{
    lift_class_vector, partition_classes, uniform_root_ensemble, ActionRule, ClassPartition, ClassRadius, Graph,
    LQModel, Profile, Source, WModel,
};

struct Case {
    g: Graph,
    eta: Vec<f64>,
    prof: Profile,
    rng: ChaCha8Rng,
}

fn case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=12);
    let extra = rng.gen_range(0..=n);
    let g = common::random_connected(&mut rng, n, extra, 4);
    let eta = common::uniform(&mut rng, n, -1.0, 1.0);
    let prof = Profile::scalar(common::uniform(&mut rng, n, -2.0, 2.0)).unwrap();
    Case { g, eta, prof, rng }
}

/// LQ for `p = 0`, otherwise the power interaction `|s|^p / p`.
fn model(eta: &[f64], p: u8) -> Box<dyn CostModel> {
    let src = Source::PerVertex(eta.to_vec());
    if p == 0 {
        Box::new(LQModel::new(src).unwrap())
    } else {
        Box::new(WModel::power(src, p as f64).unwrap())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn deviations_change_the_potential_like_the_cost(seed in any::<u64>(), p in prop_oneof![Just(0u8), Just(2), Just(3), Just(4)]) {
        let mut c = case(seed);
        let m = model(&c.eta, p);
        let game = LocalGame::new(&c.g, m.as_ref()).unwrap();
        let v = c.rng.gen_range(0..c.g.n());
        let a = c.rng.gen_range(-2.0..2.0);
        let mut dev = c.prof.clone();
        dev.set(v, &[a]);
        let d_phi = game.potential_hat(&dev).unwrap() - game.potential_hat(&c.prof).unwrap();
        let d_cost = game.deviation_cost(&c.prof, v, &[a]) - game.player_cost(&c.prof, v);
        prop_assert!((d_phi - d_cost).abs() <= 1e-10, "{} vs {}", d_phi, d_cost);
    }

    #[test]
    fn reduced_gradient_matches_differences(seed in any::<u64>(), p in prop_oneof![Just(0u8), Just(2), Just(3), Just(4)], exact in any::<bool>()) {
        let mut c = case(seed);
        let m = model(&c.eta, p);
        let game = LocalGame::new(&c.g, m.as_ref()).unwrap();
        let part = if exact {
            partition_classes(&c.g, ClassRadius::Exact).unwrap()
        } else {
            ClassPartition::discrete(c.g.n())
        };
        let y = common::uniform(&mut c.rng, part.class_count(), -2.0, 2.0);
        let grad = game.reduced_gradient(&part, &lift_class_vector(&part, 1, &y).unwrap()).unwrap();
        let n = c.g.n() as f64;
        let phi = |z: &[f64]| game.potential_hat(&lift_class_vector(&part, 1, z).unwrap()).unwrap() / n;
        let eps = 1e-5;
        let scale = grad.iter().fold(1.0f64, |s, x| s.max(x.abs()));
        for k in 0..y.len() {
            let (mut up, mut dn) = (y.clone(), y.clone());
            up[k] += eps;
            dn[k] -= eps;
            let fd = (phi(&up) - phi(&dn)) / (2.0 * eps);
            prop_assert!((fd - grad[k]).abs() <= 1e-6 * scale, "class {}: {} vs {}", k, fd, grad[k]);
        }
    }

    #[test]
    fn lq_potential_shifts_linearly(seed in any::<u64>(), shift in -5.0f64..5.0) {
        let c = case(seed);
        let m = LQModel::new(Source::PerVertex(c.eta.clone())).unwrap();
        let game = LocalGame::new(&c.g, &m).unwrap();
        let moved = Profile::scalar(c.prof.values().iter().map(|x| x + shift).collect()).unwrap();
        let lhs = game.potential_hat(&moved).unwrap();
        let rhs = game.potential_hat(&c.prof).unwrap() - shift * c.eta.iter().sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn pair_potential_vanishes_on_the_diagonal(seed in any::<u64>(), p in prop_oneof![Just(0u8), Just(2), Just(3), Just(4)], level in -3.0f64..3.0) {
        let c = case(seed);
        prop_assume!(c.g.n() >= 2);
        let m = model(&c.eta, p);
        let b = ball(&c.g, 0, 1);
        m.prepare(&b).unwrap();
        let e = EdgeView { ball: &b, neighbor: 1 };
        prop_assert_eq!(m.pair_potential(e, &[level], &[level]), 0.0);

        // A constant rule only pays the own cost.
        let rule = ActionRule::constant(vec![level]).unwrap();
        let (ens, _) = uniform_root_ensemble(&c.g).unwrap();
        let phi = potential(&ens, &rule, m.as_ref()).unwrap();
        let own = -level * c.eta.iter().sum::<f64>() / c.g.n() as f64;
        prop_assert!((phi - own).abs() <= 1e-12, "{} vs {}", phi, own);
    }
}
