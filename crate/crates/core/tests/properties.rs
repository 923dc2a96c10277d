use proptest::prelude::*;

use relaynet::info::InfoEval;
use relaynet::io::{channel_to_json, law_to_json, parse_channel, parse_law, Law};
use relaynet::network::{assemble_joint_t1, assemble_joint_t2, Sizes};
use relaynet::pmf::{Alphabet, JointPmf};
use relaynet::random::{random_channel, random_t1_law, random_t2_law, rng_for};
use relaynet::rate_region::{embed_t1_in_t2, eval_theorem1, eval_theorem2, solve_df_rates, DfMode};
use relaynet::sim::typical;
use relaynet::var::{Var, VarSet};

/// A joint over (X0, X1, X2) with the given sizes and positive-ish weights.
fn joint3() -> impl Strategy<Value = JointPmf> {
    (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(a, b, c)| {
        prop::collection::vec(0.0f64..1.0, a * b * c).prop_filter_map("all-zero weights", move |w| {
            let s: f64 = w.iter().sum();
            if s < 1e-6 {
                return None;
            }
            let mass = w.iter().map(|x| x / s).collect();
            JointPmf::new(
                vec![Alphabet::new(Var::X0, a), Alphabet::new(Var::X1, b), Alphabet::new(Var::X2, c)],
                mass,
            )
            .ok()
        })
    })
}

fn sizes() -> impl Strategy<Value = Sizes> {
    (1usize..=2, 1usize..=3, 1usize..=2).prop_map(|(v, yh1, yh2)| {
        Sizes::binary()
            .with(Var::V1, v)
            .with(Var::V2, v)
            .with(Var::Yh1, yh1)
            .with(Var::Yh2, yh2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutual_information_is_nonnegative(j in joint3()) {
        let ev = InfoEval::new(&j);
        for q in ["I(X0;X1)", "I(X0;X1|X2)", "I(X0,X2;X1)", "I(X2;X0|X1)"] {
            prop_assert!(ev.mi_str(q).unwrap() >= 0.0, "{q}");
        }
    }

    #[test]
    fn chain_rule(j in joint3()) {
        let ev = InfoEval::new(&j);
        let whole = ev.mi_str("I(X0;X1,X2)").unwrap();
        let parts = ev.mi_str("I(X0;X1)").unwrap() + ev.mi_str("I(X0;X2|X1)").unwrap();
        prop_assert!((whole - parts).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_is_symmetric(j in joint3()) {
        let ev = InfoEval::new(&j);
        let a = ev.mi_str("I(X0;X1|X2)").unwrap();
        let b = ev.mi_str("I(X1;X0|X2)").unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn marginalization_commutes(j in joint3()) {
        let direct = j.marginalize(VarSet::of(&[Var::X1])).unwrap();
        let staged = j
            .marginalize(VarSet::of(&[Var::X1, Var::X2]))
            .unwrap()
            .marginalize(VarSet::of(&[Var::X1]))
            .unwrap();
        for (a, b) in direct.mass().iter().zip(staged.mass()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn relay_inputs_are_independent(seed in any::<u64>(), s in sizes()) {
        let mut rng = rng_for(seed, 0);
        let ch = random_channel(&mut rng, s).unwrap();
        let l1 = random_t1_law(&mut rng, s).unwrap();
        let l2 = random_t2_law(&mut rng, s).unwrap();
        let j1 = assemble_joint_t1(&ch, &l1).unwrap();
        let j2 = assemble_joint_t2(&ch, &l2).unwrap();
        prop_assert!(InfoEval::new(&j1).mi_str("I(X1;X2)").unwrap() <= 1e-10);
        prop_assert!(InfoEval::new(&j2).mi_str("I(X1,V1;X2,V2)").unwrap() <= 1e-10);
        // the (X1, X2) marginal is the product of the law's marginals
        let m = j1.marginalize(VarSet::of(&[Var::X1, Var::X2])).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let want = l1.p_x1.mass()[a] * l1.p_x2.mass()[b];
                prop_assert!((m.mass()[a * 2 + b] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn embedding_reproduces_the_compress_and_forward_rate(seed in any::<u64>(), s in sizes()) {
        let mut rng = rng_for(seed, 1);
        let ch = random_channel(&mut rng, s).unwrap();
        let law = random_t1_law(&mut rng, s).unwrap();
        let r1 = eval_theorem1(&ch, &law).unwrap();
        let r2 = eval_theorem2(&ch, &embed_t1_in_t2(&law).unwrap(), DfMode::Zero).unwrap();
        prop_assert!((r1.objective - r2.objective).abs() < 1e-9);
        for (a, b) in [("(2)", "(6b)"), ("(3)", "(7b)"), ("(4a)", "(8a)"), ("(4b)", "(8b)")] {
            let (x, y) = (r1.constraint(a).unwrap(), r2.constraint(b).unwrap());
            prop_assert!((x.lhs - y.lhs).abs() < 1e-9 && (x.rhs - y.rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn decode_forward_rates_respect_their_bounds(b1 in -1.0f64..2.0, b2 in -1.0f64..2.0, bs in -1.0f64..3.0) {
        let d = solve_df_rates(b1, b2, bs);
        prop_assert!(d.r21 >= 0.0 && d.r22 >= 0.0);
        prop_assert!(d.r21 <= b1.max(0.0) + 1e-12);
        prop_assert!(d.r22 <= b2.max(0.0) + 1e-12);
        prop_assert!(d.r21 + d.r22 <= bs.max(0.0) + 1e-12);
        // maximal: the sum equals the tightest of the available bounds
        let best = (b1.max(0.0) + b2.max(0.0)).min(bs.max(0.0));
        prop_assert!((d.r21 + d.r22 - best).abs() < 1e-12);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), s in sizes()) {
        let mut rng = rng_for(seed, 2);
        let ch = random_channel(&mut rng, s).unwrap();
        prop_assert_eq!(&parse_channel(&channel_to_json(&ch)).unwrap(), &ch);
        for law in [Law::T1(random_t1_law(&mut rng, s).unwrap()), Law::T2(random_t2_law(&mut rng, s).unwrap())] {
            prop_assert_eq!(&parse_law(&law_to_json(&law)).unwrap(), &law);
        }
    }

    #[test]
    fn huge_epsilon_accepts_any_supported_sequence(
        probs in prop::collection::vec(0.0f64..1.0, 2..5),
        seq in prop::collection::vec(0usize..4, 1..40),
    ) {
        let s: f64 = probs.iter().sum();
        prop_assume!(s > 1e-6);
        let p: Vec<f64> = probs.iter().map(|x| x / s).collect();
        let seq: Vec<usize> = seq.into_iter().map(|x| x % p.len()).collect();
        let j = JointPmf::over(Var::Y0, p.clone()).unwrap();
        let inside = seq.iter().all(|&x| p[x] > 0.0);
        prop_assert_eq!(typical(&[(Var::Y0, &seq)], &j, 1e9).unwrap(), inside);
    }
}
