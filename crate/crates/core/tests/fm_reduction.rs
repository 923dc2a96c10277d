use relaynet::fm::{
    eliminate, eliminate_all, numeric_equiv, prune, random_bindings, Builtin, LpSummary,
    RateSystem,
};

fn reduce(b: Builtin) -> RateSystem {
    let vars: Vec<String> = b.auxiliary_vars().iter().map(|s| s.to_string()).collect();
    eliminate_all(&b.system(), &vars).unwrap().0
}

fn check(b: Builtin, n: usize, seed: u64) -> relaynet::fm::EquivReport {
    let ours = reduce(b);
    let hand = b.reduced().unwrap().system();
    let syms = ours.symbols().union(&hand.symbols()).copied().collect();
    let binds = random_bindings(&syms, n, seed).unwrap();
    numeric_equiv(&ours, &hand, &binds, "RBAR").unwrap()
}

#[test]
fn t1_projection_matches_closed_form() {
    let rep = check(Builtin::T1, 200, 11);
    let bad: Vec<_> = rep.bindings.iter().filter(|r| !r.agree).collect();
    assert!(rep.equivalent, "{bad:?}");
    // the sample must exercise both outcomes to mean anything
    let feasible = rep
        .bindings
        .iter()
        .filter(|r| matches!(r.a, LpSummary::Optimal(_)))
        .count();
    assert!(feasible > 20 && feasible < 180, "{feasible}");
}

#[test]
fn t2_closed_form_is_never_tighter_than_projection() {
    // The closed-form region omits consequences of the split-rate
    // nonnegativity rows, so it may be looser than the true projection,
    // but it must never cut off a point the projection keeps.
    let rep = check(Builtin::T2, 400, 5);
    for r in &rep.bindings {
        match (r.a, r.b) {
            (LpSummary::Optimal(a), LpSummary::Optimal(b)) => assert!(a <= b + 1e-9, "{r:?}"),
            (LpSummary::Optimal(_), other) => panic!("closed form {other:?} but projection feasible"),
            _ => {}
        }
    }
    let agree = rep.bindings.iter().filter(|r| r.agree).count();
    assert!(agree * 10 >= rep.bindings.len() * 9, "{agree}");
}

#[test]
fn t2_projection_keeps_compression_consistency_row() {
    let text = reduce(Builtin::T2).to_string();
    assert!(text.contains(
        "-1*I(X1;X2,Y0) + -1*I(Y0;Yh1|X1,V1) + 1*I(X2,V2,Y1,Y2;Yh1|X1,V1) < 0"
    ));
}

#[test]
fn elimination_order_does_not_matter() {
    let sys = Builtin::T1.system();
    let fwd = ["RH2", "RH1", "RS1", "RS2"];
    let mut a = sys.clone();
    for v in fwd {
        a = prune(&eliminate(&a, v).unwrap());
    }
    let mut b = sys.clone();
    for v in fwd.iter().rev() {
        b = prune(&eliminate(&b, v).unwrap());
    }
    let syms = a.symbols().union(&b.symbols()).copied().collect();
    let binds = random_bindings(&syms, 40, 5).unwrap();
    assert!(numeric_equiv(&a, &b, &binds, "RBAR").unwrap().equivalent);
}

#[test]
fn elimination_is_sound_per_step() {
    // Projecting one variable leaves the optimum unchanged.
    let sys = Builtin::T2.system();
    let one = prune(&eliminate(&sys, "RH1").unwrap());
    let binds = random_bindings(&sys.symbols(), 30, 8).unwrap();
    assert!(numeric_equiv(&sys, &one, &binds, "RBAR").unwrap().equivalent);
}

#[test]
fn pruning_preserves_solution_set() {
    let mut raw = Builtin::T1.system();
    for v in ["RH1", "RH2", "RS1"] {
        raw = eliminate(&raw, v).unwrap();
    }
    let pruned = prune(&raw);
    assert!(pruned.ineqs.len() < raw.ineqs.len());
    let binds = random_bindings(&raw.symbols(), 40, 9).unwrap();
    assert!(numeric_equiv(&raw, &pruned, &binds, "RBAR").unwrap().equivalent);
}

#[test]
fn eliminating_nothing_is_pruning() {
    let sys = Builtin::T1.system();
    let (out, order) = eliminate_all(&sys, &[]).unwrap();
    assert!(order.is_empty());
    assert_eq!(out, prune(&sys));
}

#[test]
fn output_is_byte_stable() {
    let a = reduce(Builtin::T1).to_string();
    let b = reduce(Builtin::T1).to_string();
    assert_eq!(a, b);
    let back: RateSystem = a.parse().unwrap();
    assert_eq!(back.to_string(), a);
}
