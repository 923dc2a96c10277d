//! Evaluation of both achievable-rate expressions at a fixed law: objective,
//! constraint sides and feasibility, plus the per-inequality reports of the
//! underlying decoding conditions.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fm::{Builtin, InfoSymbol, RateSystem};
use crate::info::InfoEval;
use crate::network::{assemble_joint_t1, assemble_joint_t2, NetworkChannel, Sizes, T1Law, T2Law};
use crate::pmf::{CondPmf, JointPmf};
use crate::terms::*;
use crate::var::Var;

/// Slack a strict inequality needs before it counts as satisfied.
pub const STRICT_MARGIN: f64 = 1e-9;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Bits,
    Nats,
}

impl Units {
    pub fn scale(self) -> f64 {
        match self {
            Units::Bits => 1.0,
            Units::Nats => std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    T1,
    T2,
}

impl Theorem {
    pub fn tag(self) -> &'static str {
        match self {
            Theorem::T1 => "t1",
            Theorem::T2 => "t2",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(Theorem::T1),
            "t2" => Ok(Theorem::T2),
            _ => Err(Error::Config(format!("unknown theorem tag `{s}` (expected t1 or t2)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl ConstraintRow {
    fn strict(label: &str, lhs: f64, rhs: f64) -> Self {
        ConstraintRow {
            label: label.to_string(),
            lhs,
            rhs,
            satisfied: rhs - lhs > STRICT_MARGIN,
        }
    }

    fn to_json(&self, k: f64) -> Value {
        json!({
            "label": self.label,
            "lhs": self.lhs * k,
            "rhs": self.rhs * k,
            "satisfied": self.satisfied,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub theorem: Theorem,
    /// Supremum-closure value of the rate (bits).
    pub objective: f64,
    pub constraints: Vec<ConstraintRow>,
    pub feasible: bool,
    pub flags: Vec<String>,
    /// `(R21, R22)` chosen by the inner maximization; `None` for the
    /// compress-and-forward rate.
    pub df_rates: Option<(f64, f64)>,
    /// Every named information term the report was built from.
    pub terms: BTreeMap<String, f64>,
    pub law_hash: String,
    pub channel_hash: String,
}

impl RateReport {
    pub fn constraint(&self, label: &str) -> Option<&ConstraintRow> {
        self.constraints.iter().find(|c| c.label == label)
    }

    pub fn to_json(&self, units: Units) -> Value {
        let k = units.scale();
        let mut v = json!({
            "format_version": FORMAT_VERSION,
            "theorem": self.theorem.tag(),
            "units": units.name(),
            "constraints": self.constraints.iter().map(|c| c.to_json(k)).collect::<Vec<_>>(),
            "feasible": self.feasible,
            "flags": self.flags,
            "terms": self.terms.iter().map(|(n, x)| (n.clone(), json!(x * k))).collect::<serde_json::Map<_, _>>(),
            "law_hash": self.law_hash,
            "channel_hash": self.channel_hash,
        });
        v[format!("objective_{}", units.name())] = json!(self.objective * k);
        if let Some((a, b)) = self.df_rates {
            v["df_rates"] = json!({ "r21": a * k, "r22": b * k });
        }
        v
    }
}

fn digest(tag: &str, sizes: &Sizes, parts: &[&[f64]]) -> String {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    for s in sizes.0 {
        h.update((s as u64).to_le_bytes());
    }
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        for x in *p {
            h.update(x.to_le_bytes());
        }
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

pub fn channel_hash(channel: &NetworkChannel) -> String {
    digest("channel", &channel.sizes(), &[channel.kernel().mass()])
}

pub fn t1_law_hash(law: &T1Law) -> String {
    let s = law.slices();
    let parts: Vec<&[f64]> = s.iter().map(|v| v.as_slice()).collect();
    digest("t1", &law.sizes().unwrap_or(Sizes([0; 10])), &parts)
}

pub fn t2_law_hash(law: &T2Law) -> String {
    let s = law.slices();
    let parts: Vec<&[f64]> = s.iter().map(|v| v.as_slice()).collect();
    digest("t2", &law.sizes().unwrap_or(Sizes([0; 10])), &parts)
}

fn terms_of(ev: &InfoEval, names: &[&str]) -> Result<BTreeMap<String, f64>> {
    names
        .iter()
        .map(|n| Ok((n.to_string(), ev.mi_str(n)?)))
        .collect()
}

const T1_TERMS: [&str; 14] = [A1, A2, B1, B2, C1, C2, D2, E1, E2, E12, F1, F2, G, Z];

/// Compress-and-forward rate: `I(X0;Y0,Ŷ1,Ŷ2|X1,X2) + I(X1;X2)` subject to
/// the compression-consistency rows `(2)`, `(3)` and both branches of `(4)`.
pub fn eval_theorem1(channel: &NetworkChannel, law: &T1Law) -> Result<RateReport> {
    let joint = assemble_joint_t1(channel, law)?;
    let ev = InfoEval::new(&joint);
    let t = terms_of(&ev, &T1_TERMS)?;
    let v = |n: &str| t[n];
    let cf = v(A1) + v(A2) + v(B1) + v(B2);
    let constraints = vec![
        ConstraintRow::strict("(2)", v(A1) + v(B1), v(E1) + v(F1)),
        ConstraintRow::strict("(3)", v(A2) + v(B2), v(E2) + v(F2)),
        ConstraintRow::strict("(4a)", cf, v(E12) + v(F1) + v(F2)),
        ConstraintRow::strict("(4b)", cf, v(E1) + v(E2) + v(F1) + v(F2)),
    ];
    Ok(RateReport {
        theorem: Theorem::T1,
        objective: v(G) + v(Z),
        feasible: constraints.iter().all(|c| c.satisfied),
        constraints,
        flags: Vec::new(),
        df_rates: None,
        terms: t,
        law_hash: t1_law_hash(law),
        channel_hash: channel_hash(channel),
    })
}

/// How the decode-and-forward rates are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DfMode {
    /// Maximize `R21 + R22` under the box and sum bounds.
    #[default]
    Optimize,
    /// Pin `R21 = R22 = 0` (the embedded compress-and-forward scheme).
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfRates {
    pub r21: f64,
    pub r22: f64,
    pub clamped_r21: bool,
    pub clamped_r22: bool,
    pub clamped_sum: bool,
    /// The sum bound was active and split proportionally.
    pub sum_binding: bool,
}

/// Maximizes `R21 + R22` over `0 <= R2k <= max(bk, 0)`,
/// `R21 + R22 <= max(bsum, 0)`. When the sum bound binds it is split in
/// proportion to the individual bounds.
pub fn solve_df_rates(b1: f64, b2: f64, bsum: f64) -> DfRates {
    let u1 = b1.max(0.0);
    let u2 = b2.max(0.0);
    let s = bsum.max(0.0);
    let (r21, r22, sum_binding) = if u1 + u2 <= s {
        (u1, u2, false)
    } else {
        // u1 + u2 > s >= 0, so the denominator is positive
        (s * u1 / (u1 + u2), s * u2 / (u1 + u2), true)
    };
    DfRates {
        r21,
        r22,
        clamped_r21: b1 < 0.0,
        clamped_r22: b2 < 0.0,
        clamped_sum: bsum < 0.0,
        sum_binding,
    }
}

const T2_TERMS: [&str; 18] = [
    C1V, C2V, AV1, AV2, E1, E2, E12, F1V, F2V, K1, K2, A1V, A2V, D2V, G2, Z2, A1, A2,
];

/// Combined rate: `I(X0;Y0,Ŷ1,Ŷ2|X1,X2,V1,V2) + I(X1,V1;X2,V2) + R21* + R22*`
/// with the decode-and-forward rates bounded by `(6)`–`(8)`.
///
/// Rows `(6b)`, `(7b)`, `(8a)`, `(8b)` are satisfied when their bound with
/// the decode-and-forward rates removed is positive: they also constrain the
/// compression and cannot be met by silencing the relay message. Rows
/// `(6a)`/`(7a)` only limit that message and hold vacuously when its rate is
/// zero.
pub fn eval_theorem2(channel: &NetworkChannel, law: &T2Law, mode: DfMode) -> Result<RateReport> {
    let joint = assemble_joint_t2(channel, law)?;
    let ev = InfoEval::new(&joint);
    let t = terms_of(&ev, &T2_TERMS)?;
    let v = |n: &str| t[n];

    let rhs6 = v(AV1) + v(E1) + v(F1V);
    let rhs7 = v(AV2) + v(E2) + v(F2V);
    let rhs8a = v(AV1) + v(AV2) + v(E12) + v(F1V) + v(F2V);
    let rhs8b = v(AV1) + v(AV2) + v(E1) + v(E2) + v(F1V) + v(F2V);
    let recv = v(K1) + v(K2);
    let b1 = v(C1V).min(rhs6 - v(K1));
    let b2 = v(C2V).min(rhs7 - v(K2));
    let bsum = (rhs8a - recv).min(rhs8b - recv);

    let mut flags = Vec::new();
    let (r21, r22) = match mode {
        DfMode::Optimize => {
            let d = solve_df_rates(b1, b2, bsum);
            for (on, name) in [
                (d.clamped_r21, "clamped_r21"),
                (d.clamped_r22, "clamped_r22"),
                (d.clamped_sum, "clamped_sum"),
            ] {
                if on {
                    flags.push(name.to_string());
                }
            }
            (d.r21, d.r22)
        }
        DfMode::Zero => {
            flags.push("forced_zero_df".to_string());
            (0.0, 0.0)
        }
    };

    let relay = |label: &str, r: f64, c: f64| ConstraintRow {
        label: label.to_string(),
        lhs: r,
        rhs: c,
        satisfied: r == 0.0 || c > STRICT_MARGIN,
    };
    let recv_row = |label: &str, r: f64, lhs: f64, rhs: f64| ConstraintRow {
        label: label.to_string(),
        lhs: r + lhs,
        rhs,
        satisfied: rhs - lhs > STRICT_MARGIN,
    };
    let constraints = vec![
        relay("(6a)", r21, v(C1V)),
        recv_row("(6b)", r21, v(K1), rhs6),
        relay("(7a)", r22, v(C2V)),
        recv_row("(7b)", r22, v(K2), rhs7),
        recv_row("(8a)", r21 + r22, recv, rhs8a),
        recv_row("(8b)", r21 + r22, recv, rhs8b),
    ];
    Ok(RateReport {
        theorem: Theorem::T2,
        objective: v(G2) + v(Z2) + r21 + r22,
        feasible: constraints.iter().all(|c| c.satisfied),
        constraints,
        flags,
        df_rates: Some((r21, r22)),
        terms: t,
        law_hash: t2_law_hash(law),
        channel_hash: channel_hash(channel),
    })
}

fn check_rates(named: &[(&str, f64)]) -> Result<BTreeMap<String, f64>> {
    named
        .iter()
        .map(|&(n, x)| {
            if x.is_finite() && x >= 0.0 {
                Ok((n.to_string(), x))
            } else {
                Err(Error::Config(format!("rate {n} must be finite and nonnegative, got {x}")))
            }
        })
        .collect()
}

/// Rates of the compress-and-forward scheme (bits per channel use).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct T1Rates {
    pub rbar: f64,
    pub rh1: f64,
    pub rh2: f64,
    pub rs1: f64,
    pub rs2: f64,
}

impl T1Rates {
    pub fn named(&self) -> Result<BTreeMap<String, f64>> {
        check_rates(&[
            ("RBAR", self.rbar),
            ("RH1", self.rh1),
            ("RH2", self.rh2),
            ("RS1", self.rs1),
            ("RS2", self.rs2),
        ])
    }
}

/// Split rates of the combined scheme. The message rate is
/// `R1 + R21 + R22`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct T2Rates {
    pub r1: f64,
    pub r21: f64,
    pub r22: f64,
    pub rh1: f64,
    pub rh2: f64,
    pub r011: f64,
    pub r012: f64,
    pub r021: f64,
    pub r022: f64,
}

impl T2Rates {
    pub fn rbar(&self) -> f64 {
        self.r1 + self.r21 + self.r22
    }

    pub fn named(&self) -> Result<BTreeMap<String, f64>> {
        let mut m = check_rates(&[
            ("R1", self.r1),
            ("R21", self.r21),
            ("R22", self.r22),
            ("RH1", self.rh1),
            ("RH2", self.rh2),
            ("R011", self.r011),
            ("R012", self.r012),
            ("R021", self.r021),
            ("R022", self.r022),
        ])?;
        m.insert("RBAR".into(), self.rbar());
        Ok(m)
    }
}

/// Reports every numbered row of `sys` at the given rates. A row
/// `Σ pos − Σ neg < 0` is shown as `lhs = Σ pos`, `rhs = Σ neg`.
pub fn eval_rows(
    sys: &RateSystem,
    joint: &JointPmf,
    rates: &BTreeMap<String, f64>,
) -> Result<Vec<ConstraintRow>> {
    let ev = InfoEval::new(joint);
    let mut vals: BTreeMap<InfoSymbol, f64> = BTreeMap::new();
    for s in sys.symbols() {
        vals.insert(s, ev.mi(s.query())?);
    }
    let mut out = Vec::new();
    for q in sys.ineqs.iter().filter(|q| q.provenance.starts_with('(')) {
        let (lhs, rhs) = q
            .expr
            .eval_split(|r| rates.get(r).copied(), |s| vals.get(s).copied())
            .ok_or_else(|| Error::Config(format!("row {} references an unbound name", q.provenance)))?;
        let satisfied = if q.strict {
            rhs - lhs > STRICT_MARGIN
        } else {
            rhs - lhs >= -STRICT_MARGIN
        };
        out.push(ConstraintRow {
            label: q.provenance.clone(),
            lhs,
            rhs,
            satisfied,
        });
    }
    Ok(out)
}

/// The eleven decoding conditions `(9)`–`(19)` of the compress-and-forward
/// scheme at `rates`.
pub fn eval_proof_system_t1(
    channel: &NetworkChannel,
    law: &T1Law,
    rates: &T1Rates,
) -> Result<Vec<ConstraintRow>> {
    let joint = assemble_joint_t1(channel, law)?;
    eval_rows(&Builtin::T1.system(), &joint, &rates.named()?)
}

/// The fifteen conditions `(20)`–`(34)` of the combined scheme at `rates`.
pub fn eval_proof_system_t2(
    channel: &NetworkChannel,
    law: &T2Law,
    rates: &T2Rates,
) -> Result<Vec<ConstraintRow>> {
    let joint = assemble_joint_t2(channel, law)?;
    eval_rows(&Builtin::T2.system(), &joint, &rates.named()?)
}

/// Rewrites a compress-and-forward law as a combined-scheme law with
/// `V1 = X1`, `V2 = X2`; every component ignores the copies.
pub fn embed_t1_in_t2(law: &T1Law) -> Result<T2Law> {
    let s = law.sizes()?;
    let (n1, n2) = (s.get(Var::X1), s.get(Var::X2));
    let sizes = s.with(Var::V1, n1).with(Var::V2, n2);
    let a = |v: &[Var]| sizes.alphabets(v);
    let p_x0 = CondPmf::from_fn(
        "p(x0|x1,x2,v1,v2)",
        a(&[Var::X0]),
        a(&[Var::X1, Var::X2, Var::V1, Var::V2]),
        |g, t| law.p_x0.slice(g[0] * n2 + g[1])[t[0]],
    )?;
    let ny1 = s.get(Var::Y1);
    let ny2 = s.get(Var::Y2);
    let p_yh1 = CondPmf::from_fn(
        "p(yh1|x1,v1,y1)",
        a(&[Var::Yh1]),
        a(&[Var::X1, Var::V1, Var::Y1]),
        |g, t| law.p_yh1.slice(g[0] * ny1 + g[2])[t[0]],
    )?;
    let p_yh2 = CondPmf::from_fn(
        "p(yh2|x2,v2,y2)",
        a(&[Var::Yh2]),
        a(&[Var::X2, Var::V2, Var::Y2]),
        |g, t| law.p_yh2.slice(g[0] * ny2 + g[2])[t[0]],
    )?;
    T2Law::new(
        law.p_x1.clone(),
        law.p_x2.clone(),
        CondPmf::identity(sizes.alphabet(Var::X1), Var::V1)?,
        CondPmf::identity(sizes.alphabet(Var::X2), Var::V2)?,
        p_x0,
        p_yh1,
        p_yh2,
    )
}
