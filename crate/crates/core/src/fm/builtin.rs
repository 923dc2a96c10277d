//! Hand-encoded inequality systems for both coding schemes.
//!
//! * `t1`: the decoding conditions of the compress-and-forward scheme over
//!   `RH1, RH2` (compression rates), `RS1, RS2` (bin-index rates) and the
//!   message rate `RBAR`.
//! * `t2`: the conditions of the combined scheme over the split rates
//!   `R1, R21, R22, RH1, RH2, R011, R012, R021, R022`, with `RBAR` tied to
//!   `R1 + R21 + R22`.
//! * `t1-reduced`, `t2-reduced`: the closed-form regions those systems are
//!   expected to project onto.

use std::fmt;
use std::str::FromStr;

use super::expr::{Inequality, LinearExpr};
use super::system::RateSystem;
use crate::error::{Error, Result};
use crate::terms::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    T1,
    T2,
    T1Reduced,
    T2Reduced,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::T1, Builtin::T2, Builtin::T1Reduced, Builtin::T2Reduced];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::T1 => "t1",
            Builtin::T2 => "t2",
            Builtin::T1Reduced => "t1-reduced",
            Builtin::T2Reduced => "t2-reduced",
        }
    }

    /// Auxiliary rates eliminated when reducing `t1` / `t2`.
    pub fn auxiliary_vars(self) -> &'static [&'static str] {
        match self {
            Builtin::T1 => &["RH1", "RH2", "RS1", "RS2"],
            Builtin::T2 => &["RH1", "RH2", "R011", "R012", "R021", "R022"],
            _ => &[],
        }
    }

    /// The reduced counterpart of a raw system.
    pub fn reduced(self) -> Option<Builtin> {
        match self {
            Builtin::T1 => Some(Builtin::T1Reduced),
            Builtin::T2 => Some(Builtin::T2Reduced),
            _ => None,
        }
    }

    pub fn system(self) -> RateSystem {
        match self {
            Builtin::T1 => t1(),
            Builtin::T2 => t2(),
            Builtin::T1Reduced => t1_reduced(),
            Builtin::T2Reduced => t2_reduced(),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown builtin system `{s}`")))
    }
}

fn e() -> LinearExpr {
    LinearExpr::new()
}

fn nonneg(v: &str) -> Inequality {
    Inequality::le(e().rate(v, -1), &format!("nonneg({v})"))
}

fn t1() -> RateSystem {
    let rows = vec![
        Inequality::lt(e().sym(A1, 1).rate("RH1", -1), "(9)"),
        Inequality::lt(e().sym(A2, 1).rate("RH2", -1), "(10)"),
        Inequality::lt(e().sym(C1, 1).rate("RH1", -1), "(11)"),
        Inequality::lt(e().sym(C2, 1).rate("RH2", -1), "(12)"),
        Inequality::lt(
            e().sym(C1, 1).sym(D2, 1).rate("RH1", -1).rate("RH2", -1),
            "(13)",
        ),
        Inequality::lt(e().rate("RS1", 1).sym(E1, -1), "(14)"),
        Inequality::lt(e().rate("RS2", 1).sym(E2, -1), "(15)"),
        Inequality::lt(e().rate("RS1", 1).rate("RS2", 1).sym(E12, -1), "(16)"),
        Inequality::lt(e().rate("RH1", 1).sym(F1, -1).rate("RS1", -1), "(17)"),
        Inequality::lt(e().rate("RH2", 1).sym(F2, -1).rate("RS2", -1), "(18)"),
        Inequality::lt(e().rate("RBAR", 1).sym(G, -1).sym(Z, -1), "(19)"),
        nonneg("RH1"),
        nonneg("RH2"),
        nonneg("RS1"),
        nonneg("RS2"),
    ];
    RateSystem::new(&["RBAR", "RH1", "RH2", "RS1", "RS2"], rows).expect("builtin system")
}

fn t1_reduced() -> RateSystem {
    let cf = |x: LinearExpr| x.sym(A1, 1).sym(A2, 1).sym(B1, 1).sym(B2, 1);
    let rows = vec![
        Inequality::lt(e().rate("RBAR", 1).sym(G, -1).sym(Z, -1), "(1)"),
        Inequality::lt(e().sym(A1, 1).sym(B1, 1).sym(E1, -1).sym(F1, -1), "(2)"),
        Inequality::lt(e().sym(A2, 1).sym(B2, 1).sym(E2, -1).sym(F2, -1), "(3)"),
        Inequality::lt(cf(e()).sym(E12, -1).sym(F1, -1).sym(F2, -1), "(4a)"),
        Inequality::lt(
            cf(e()).sym(E1, -1).sym(E2, -1).sym(F1, -1).sym(F2, -1),
            "(4b)",
        ),
    ];
    RateSystem::new(&["RBAR"], rows).expect("builtin system")
}

fn rbar_definition() -> [Inequality; 2] {
    let def = e().rate("RBAR", 1).rate("R1", -1).rate("R21", -1).rate("R22", -1);
    [
        Inequality::le(def.clone(), "def(RBAR)"),
        Inequality::le(def.scaled(&super::expr::rat(-1)), "def(RBAR)"),
    ]
}

fn t2() -> RateSystem {
    let mut rows = vec![
        Inequality::lt(e().rate("R21", 1).sym(C1V, -1), "(20)"),
        Inequality::lt(e().sym(A1V, 1).rate("RH1", -1), "(21)"),
        Inequality::lt(e().rate("R22", 1).sym(C2V, -1), "(22)"),
        Inequality::lt(e().sym(A2V, 1).rate("RH2", -1), "(23)"),
        Inequality::lt(e().rate("R011", 1).rate("R012", 1).sym(E1, -1), "(24)"),
        Inequality::lt(e().rate("R021", 1).rate("R022", 1).sym(E2, -1), "(25)"),
        Inequality::lt(
            e().rate("R011", 1)
                .rate("R012", 1)
                .rate("R021", 1)
                .rate("R022", 1)
                .sym(E12, -1),
            "(26)",
        ),
        Inequality::lt(e().rate("R21", 1).sym(AV1, -1).rate("R011", -1), "(27)"),
        Inequality::lt(e().rate("R22", 1).sym(AV2, -1).rate("R021", -1), "(28)"),
        Inequality::lt(e().rate("RH1", 1).sym(F1V, -1).rate("R012", -1), "(29)"),
        Inequality::lt(e().rate("RH2", 1).sym(F2V, -1).rate("R022", -1), "(30)"),
        Inequality::lt(e().rate("R1", 1).sym(G2, -1).sym(Z2, -1), "(31)"),
        Inequality::lt(e().sym(K1, 1).rate("RH1", -1), "(32)"),
        Inequality::lt(e().sym(K2, 1).rate("RH2", -1), "(33)"),
        Inequality::lt(
            e().sym(K1, 1).sym(D2V, 1).rate("RH1", -1).rate("RH2", -1),
            "(34)",
        ),
    ];
    for v in ["R1", "R21", "R22", "RH1", "RH2", "R011", "R012", "R021", "R022"] {
        rows.push(nonneg(v));
    }
    rows.extend(rbar_definition());
    RateSystem::new(
        &["RBAR", "R1", "R21", "R22", "RH1", "RH2", "R011", "R012", "R021", "R022"],
        rows,
    )
    .expect("builtin system")
}

fn t2_reduced() -> RateSystem {
    let recv = |x: LinearExpr| x.sym(K1, 1).sym(K2, 1).sym(AV1, -1).sym(AV2, -1).sym(F1V, -1).sym(F2V, -1);
    let both = || e().rate("R21", 1).rate("R22", 1);
    let mut rows = vec![
        Inequality::lt(e().rate("R1", 1).sym(G2, -1).sym(Z2, -1), "(5)"),
        Inequality::lt(e().rate("R21", 1).sym(C1V, -1), "(6a)"),
        Inequality::lt(
            e().rate("R21", 1).sym(K1, 1).sym(AV1, -1).sym(E1, -1).sym(F1V, -1),
            "(6b)",
        ),
        Inequality::lt(e().rate("R22", 1).sym(C2V, -1), "(7a)"),
        Inequality::lt(
            e().rate("R22", 1).sym(K2, 1).sym(AV2, -1).sym(E2, -1).sym(F2V, -1),
            "(7b)",
        ),
        Inequality::lt(recv(both()).sym(E12, -1), "(8a)"),
        Inequality::lt(recv(both()).sym(E1, -1).sym(E2, -1), "(8b)"),
    ];
    for v in ["R1", "R21", "R22"] {
        rows.push(nonneg(v));
    }
    rows.extend(rbar_definition());
    RateSystem::new(&["RBAR", "R1", "R21", "R22"], rows).expect("builtin system")
}
