//! Fourier–Motzkin elimination and syntactic redundancy pruning.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::expr::{merge_provenance, Inequality, LinearExpr};
use super::system::RateSystem;
use crate::error::{Error, Result};

/// Projects `var` out of the system by pairing every row where it has a
/// positive coefficient with every row where it is negative.
pub fn eliminate(sys: &RateSystem, var: &str) -> Result<RateSystem> {
    if !sys.has_var(var) {
        return Err(Error::UnknownVariable(var.to_string()));
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for q in &sys.ineqs {
        let c = q.expr.rate_coef(var);
        if c.is_positive() {
            pos.push((q, c));
        } else if c.is_negative() {
            neg.push((q, c));
        } else {
            out.push(q.clone());
        }
    }
    for (p, cp) in &pos {
        for (n, cn) in &neg {
            let expr = p.expr.scaled(&-cn.clone()).plus(&n.expr.scaled(cp));
            debug_assert!(expr.rate_coef(var).is_zero());
            out.push(Inequality {
                expr: expr.normalized(),
                strict: p.strict || n.strict,
                provenance: merge_provenance(&p.provenance, &n.provenance),
            });
        }
    }
    Ok(RateSystem {
        vars: sys.vars.iter().filter(|v| *v != var).cloned().collect(),
        ineqs: out,
    })
}

fn pairings(sys: &RateSystem, var: &str) -> usize {
    let (mut p, mut n) = (0usize, 0usize);
    for q in &sys.ineqs {
        let c = q.expr.rate_coef(var);
        if c.is_positive() {
            p += 1;
        } else if c.is_negative() {
            n += 1;
        }
    }
    p * n
}

/// Eliminates every variable in `vars`, cheapest first (fewest
/// positive×negative pairings, ties by name), pruning after each step.
/// Returns the result and the order used.
pub fn eliminate_all(sys: &RateSystem, vars: &[String]) -> Result<(RateSystem, Vec<String>)> {
    if let Some(v) = vars.iter().find(|v| !sys.has_var(v)) {
        return Err(Error::UnknownVariable(v.clone()));
    }
    let mut cur = prune(sys);
    let mut left: Vec<String> = vars.to_vec();
    left.sort();
    left.dedup();
    let mut order = Vec::new();
    while !left.is_empty() {
        let (i, _) = left
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| pairings(&cur, a).cmp(&pairings(&cur, b)).then(a.cmp(b)))
            .expect("nonempty");
        let v = left.remove(i);
        cur = prune(&eliminate(&cur, &v)?);
        order.push(v);
    }
    Ok((cur, order))
}

/// `true` when `e` can never be violated: no rate variables and every
/// symbol coefficient nonpositive, so `e <= 0` holds for all bindings.
fn is_tautology(q: &Inequality) -> bool {
    !q.strict && q.expr.rates().is_empty() && q.expr.syms().values().all(|c| !c.is_positive())
}

/// `a` makes `b` redundant: same rate part and `a - b` is a nonnegative
/// combination of symbols, so `a <= 0` (resp. `< 0`) forces `b`.
fn dominates(a: &Inequality, b: &Inequality) -> bool {
    if a.expr.rates() != b.expr.rates() || (b.strict && !a.strict) {
        return false;
    }
    let diff = a.expr.sym_part().plus(&b.expr.sym_part().scaled(&BigRational::from_integer((-1).into())));
    !diff.is_zero() && diff.syms().values().all(|c| c.is_positive())
}

/// Removes duplicates (including positive multiples), tautologies, and
/// rows dominated by another row, treating every symbol as a free
/// nonnegative number. Output is in canonical order.
pub fn prune(sys: &RateSystem) -> RateSystem {
    let mut uniq: BTreeMap<LinearExpr, Inequality> = BTreeMap::new();
    for q in &sys.ineqs {
        let q = Inequality {
            expr: q.expr.normalized(),
            ..q.clone()
        };
        if is_tautology(&q) {
            continue;
        }
        match uniq.get_mut(&q.expr) {
            None => {
                uniq.insert(q.expr.clone(), q);
            }
            Some(kept) => {
                let better = (q.strict && !kept.strict)
                    || (q.strict == kept.strict && q.provenance < kept.provenance);
                if better {
                    *kept = q;
                }
            }
        }
    }
    let rows: Vec<Inequality> = uniq.into_values().collect();
    let keep: Vec<Inequality> = rows
        .iter()
        .filter(|b| !rows.iter().any(|a| dominates(a, b)))
        .cloned()
        .collect();
    RateSystem {
        vars: sys.vars.clone(),
        ineqs: keep,
    }
    .canonical()
}
