//! Random-variable identifiers and bit-set collections of them.
//!
//! Every tensor in the crate stores its axes in the canonical order
//! `X0, X1, X2, V1, V2, Y0, Y1, Y2, Yh1, Yh2`, which is also the
//! discriminant order of [`Var`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    X0,
    X1,
    X2,
    V1,
    V2,
    Y0,
    Y1,
    Y2,
    Yh1,
    Yh2,
}

impl Var {
    pub const ALL: [Var; 10] = [
        Var::X0,
        Var::X1,
        Var::X2,
        Var::V1,
        Var::V2,
        Var::Y0,
        Var::Y1,
        Var::Y2,
        Var::Yh1,
        Var::Yh2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Var> {
        Var::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X0 => "X0",
            Var::X1 => "X1",
            Var::X2 => "X2",
            Var::V1 => "V1",
            Var::V2 => "V2",
            Var::Y0 => "Y0",
            Var::Y1 => "Y1",
            Var::Y2 => "Y2",
            Var::Yh1 => "Yh1",
            Var::Yh2 => "Yh2",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Var::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownVariable(s.to_string()))
    }
}

/// A set of variables, stored as a bit mask over the canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VarSet(u16);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn of(vars: &[Var]) -> VarSet {
        vars.iter().fold(VarSet::EMPTY, |s, &v| s.with(v))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn with(self, v: Var) -> VarSet {
        VarSet(self.0 | (1 << v.index()))
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v.index()) != 0
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn minus(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in canonical order.
    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::ALL.into_iter().filter(move |v| self.contains(*v))
    }

    pub fn first(self) -> Option<Var> {
        self.iter().next()
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        iter.into_iter().fold(VarSet::EMPTY, |s, v| s.with(v))
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            f.write_str(v.name())?;
        }
        Ok(())
    }
}

impl FromStr for VarSet {
    type Err = Error;

    /// Parses a comma-separated list such as `Y1,Y2,X2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(VarSet::EMPTY);
        }
        let mut set = VarSet::EMPTY;
        for tok in s.split(',') {
            let v: Var = tok.trim().parse()?;
            if set.contains(v) {
                return Err(Error::InvalidQuery(format!("variable {v} listed twice")));
            }
            set = set.with(v);
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_iteration_order() {
        let s = VarSet::of(&[Var::Yh1, Var::X2, Var::Y0]);
        let got: Vec<_> = s.iter().collect();
        assert_eq!(got, vec![Var::X2, Var::Y0, Var::Yh1]);
        assert_eq!(s.to_string(), "X2,Y0,Yh1");
    }

    #[test]
    fn parse_rejects_unknown_and_duplicates() {
        assert!("X1,Q".parse::<VarSet>().is_err());
        assert!("X1,X1".parse::<VarSet>().is_err());
        assert_eq!("".parse::<VarSet>().unwrap(), VarSet::EMPTY);
        assert_eq!(
            " Y1 , Yh2 ".parse::<VarSet>().unwrap(),
            VarSet::of(&[Var::Y1, Var::Yh2])
        );
    }
}
