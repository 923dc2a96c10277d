//! Numeric comparison of inequality systems: bind every symbol to a value
//! computed on a random channel and law, then compare the largest feasible
//! objective of each system by exact LP.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::expr::{to_f64, InfoSymbol};
use super::lp::{maximize, LpOutcome};
use super::system::RateSystem;
use crate::error::{Error, Result};
use crate::info::InfoEval;
use crate::network::{assemble_joint_t1, assemble_joint_t2, Sizes};
use crate::pmf::JointPmf;
use crate::random::{random_channel, random_t1_law_tempered, random_t2_law_tempered, rng_for};
use crate::var::{Var, VarSet};

/// Agreement tolerance between two LP optima, in bits.
pub const EQUIV_TOL: f64 = 1e-6;

pub type Binding = BTreeMap<InfoSymbol, f64>;

/// Evaluates each symbol on `joint`.
pub fn bind_joint(symbols: &BTreeSet<InfoSymbol>, joint: &JointPmf) -> Result<Binding> {
    let ev = InfoEval::new(joint);
    symbols
        .iter()
        .map(|s| Ok((*s, ev.mi(s.query())?)))
        .collect()
}

/// One binding per index, each from an independent random binary channel
/// and a random tempered law of the matching family (the two-auxiliary
/// family if any symbol mentions `V1`/`V2`).
pub fn random_bindings(symbols: &BTreeSet<InfoSymbol>, count: usize, seed: u64) -> Result<Vec<Binding>> {
    let vs = VarSet::of(&[Var::V1, Var::V2]);
    let needs_v = symbols.iter().any(|s| !s.query().vars().is_disjoint(vs));
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let ch = random_channel(&mut rng, Sizes::binary())?;
            let joint = if needs_v {
                assemble_joint_t2(&ch, &random_t2_law_tempered(&mut rng, ch.sizes())?)?
            } else {
                assemble_joint_t1(&ch, &random_t1_law_tempered(&mut rng, ch.sizes())?)?
            };
            bind_joint(symbols, &joint)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum LpSummary {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

impl From<&LpOutcome> for LpSummary {
    fn from(o: &LpOutcome) -> Self {
        match o {
            LpOutcome::Optimal { value, .. } => LpSummary::Optimal(to_f64(value)),
            LpOutcome::Infeasible => LpSummary::Infeasible,
            LpOutcome::Unbounded => LpSummary::Unbounded,
        }
    }
}

impl LpSummary {
    pub fn agrees(&self, other: &LpSummary) -> bool {
        match (self, other) {
            (LpSummary::Optimal(a), LpSummary::Optimal(b)) => (a - b).abs() <= EQUIV_TOL,
            (LpSummary::Infeasible, LpSummary::Infeasible) => true,
            (LpSummary::Unbounded, LpSummary::Unbounded) => true,
            _ => false,
        }
    }
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Config(format!("non-finite binding {x}")))
}

/// `max objective` over the system's rate variables with every strict row
/// relaxed to `<=`, symbols fixed by `binding`.
pub fn max_objective(sys: &RateSystem, objective: &str, binding: &Binding) -> Result<LpOutcome> {
    let idx = |v: &str| sys.vars.iter().position(|x| x == v);
    let obj = idx(objective).ok_or_else(|| Error::UnknownVariable(objective.to_string()))?;
    let nv = sys.vars.len();
    let mut a = Vec::with_capacity(sys.ineqs.len());
    let mut b = Vec::with_capacity(sys.ineqs.len());
    for q in &sys.ineqs {
        let mut row = vec![BigRational::from_integer(0.into()); nv];
        for (v, c) in q.expr.rates() {
            row[idx(v).ok_or_else(|| Error::UnknownVariable(v.clone()))?] = c.clone();
        }
        let mut rhs = BigRational::from_integer(0.into());
        for (s, c) in q.expr.syms() {
            let val = binding
                .get(s)
                .ok_or_else(|| Error::Config(format!("no binding for symbol {s}")))?;
            rhs -= c * exact(*val)?;
        }
        a.push(row);
        b.push(rhs);
    }
    let mut c = vec![BigRational::from_integer(0.into()); nv];
    c[obj] = BigRational::from_integer(1.into());
    Ok(maximize(&a, &b, &c))
}

#[derive(Debug, Clone, Serialize)]
pub struct BindingResult {
    pub index: usize,
    pub a: LpSummary,
    pub b: LpSummary,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivReport {
    pub equivalent: bool,
    pub objective: String,
    pub bindings: Vec<BindingResult>,
}

impl EquivReport {
    pub fn verdict(&self) -> &'static str {
        if self.equivalent {
            "equivalent"
        } else {
            "not-equivalent"
        }
    }
}

/// Compares the maximal `objective` of two systems on each binding.
pub fn numeric_equiv(
    a: &RateSystem,
    b: &RateSystem,
    bindings: &[Binding],
    objective: &str,
) -> Result<EquivReport> {
    let results: Vec<BindingResult> = bindings
        .par_iter()
        .enumerate()
        .map(|(index, bind)| {
            let ra = LpSummary::from(&max_objective(a, objective, bind)?);
            let rb = LpSummary::from(&max_objective(b, objective, bind)?);
            Ok(BindingResult {
                index,
                agree: ra.agrees(&rb),
                a: ra,
                b: rb,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EquivReport {
        equivalent: results.iter().all(|r| r.agree),
        objective: objective.to_string(),
        bindings: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fm::builtin::Builtin;

    #[test]
    fn identical_and_redundant_systems_agree() {
        let a = Builtin::T1Reduced.system();
        let mut b = a.clone();
        let extra = "vars: RBAR\n1*RBAR + -1*I(X0;Y0,Yh1,Yh2|X1,X2) + -1*I(X1;X2) + -1*I(X1;Y0,X2) <= 0\n";
        b.ineqs.extend(extra.parse::<RateSystem>().unwrap().ineqs);
        let syms = a.symbols().union(&b.symbols()).copied().collect();
        let binds = random_bindings(&syms, 5, 3).unwrap();
        assert!(numeric_equiv(&a, &a, &binds, "RBAR").unwrap().equivalent);
        assert!(numeric_equiv(&a, &b, &binds, "RBAR").unwrap().equivalent);
    }

    #[test]
    fn missing_binding_is_an_error() {
        let a = Builtin::T1Reduced.system();
        assert!(max_objective(&a, "RBAR", &Binding::new()).is_err());
        assert!(max_objective(&a, "NOPE", &Binding::new()).is_err());
    }
}
