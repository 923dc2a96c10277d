//! Entropy and conditional mutual information, in bits.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pmf::{stable_sum, JointPmf};
use crate::var::VarSet;

/// Mutual-information results closer than this to zero are reported as 0.
pub const MI_ZERO_TOL: f64 = 1e-10;

/// `H(P) = -Σ p log₂ p`, with `0 log 0 = 0`.
pub fn entropy(pmf: &JointPmf) -> f64 {
    entropy_of(pmf.mass())
}

fn entropy_of(mass: &[f64]) -> f64 {
    let terms: Vec<f64> = mass
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .collect();
    stable_sum(&terms).max(0.0)
}

/// `I(left; right | given)`. The two sides are stored in canonical order:
/// the side holding the earlier variable comes first, so `I(A;B|C)` and
/// `I(B;A|C)` are the same value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoQuery {
    left: VarSet,
    right: VarSet,
    given: VarSet,
}

impl InfoQuery {
    pub fn new(left: VarSet, right: VarSet, given: VarSet) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidQuery("both sides must be nonempty".into()));
        }
        if !left.is_disjoint(right) || !left.is_disjoint(given) || !right.is_disjoint(given) {
            return Err(Error::InvalidQuery(format!(
                "sets must be disjoint: I({left};{right}|{given})"
            )));
        }
        let (left, right) = if left.first() <= right.first() {
            (left, right)
        } else {
            (right, left)
        };
        Ok(InfoQuery { left, right, given })
    }

    /// Shorthand parser for compile-time-known queries.
    pub fn parse(s: &str) -> InfoQuery {
        s.parse().unwrap_or_else(|e| panic!("bad query `{s}`: {e}"))
    }

    pub fn left(&self) -> VarSet {
        self.left
    }

    pub fn right(&self) -> VarSet {
        self.right
    }

    pub fn given(&self) -> VarSet {
        self.given
    }

    pub fn vars(&self) -> VarSet {
        self.left.union(self.right).union(self.given)
    }
}

impl fmt::Display for InfoQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.given.is_empty() {
            write!(f, "I({};{})", self.left, self.right)
        } else {
            write!(f, "I({};{}|{})", self.left, self.right, self.given)
        }
    }
}

impl FromStr for InfoQuery {
    type Err = Error;

    /// Parses `I(A,B;C|D)`; the conditioning part is optional.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let body = s
            .strip_prefix("I(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidQuery(format!("expected I(..;..|..), got `{s}`")))?;
        let (sides, given) = match body.split_once('|') {
            Some((a, g)) => (a, g),
            None => (body, ""),
        };
        let (l, r) = sides
            .split_once(';')
            .ok_or_else(|| Error::InvalidQuery(format!("missing `;` in `{s}`")))?;
        InfoQuery::new(l.parse()?, r.parse()?, given.parse()?)
    }
}

/// Mutual information of a query against a joint, uncached.
pub fn mutual_info(joint: &JointPmf, q: &InfoQuery) -> Result<f64> {
    InfoEval::new(joint).mi(q)
}

/// Evaluates many queries against one joint, memoizing marginal entropies.
pub struct InfoEval<'a> {
    joint: &'a JointPmf,
    cache: RefCell<HashMap<VarSet, f64>>,
}

impl<'a> InfoEval<'a> {
    pub fn new(joint: &'a JointPmf) -> Self {
        InfoEval {
            joint,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn joint(&self) -> &JointPmf {
        self.joint
    }

    /// Entropy of the marginal on `vars`.
    pub fn h(&self, vars: VarSet) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        if let Some(&h) = self.cache.borrow().get(&vars) {
            return Ok(h);
        }
        let h = entropy(&self.joint.marginalize(vars)?);
        self.cache.borrow_mut().insert(vars, h);
        Ok(h)
    }

    pub fn mi(&self, q: &InfoQuery) -> Result<f64> {
        let g = q.given;
        let v = self.h(q.left.union(g))? + self.h(q.right.union(g))?
            - self.h(q.vars())?
            - self.h(g)?;
        Ok(if v.abs() <= MI_ZERO_TOL { 0.0 } else { v })
    }

    /// Convenience for a query in text form.
    pub fn mi_str(&self, q: &str) -> Result<f64> {
        self.mi(&q.parse()?)
    }
}
