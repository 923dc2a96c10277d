//! JSON documents for channels and laws.
//!
//! Tensors are written as one array per conditioning index: row `g` of a
//! conditional component holds `p(target | given = g)`, where `g` is the
//! flat index of the conditioning variables in canonical order (last
//! variable fastest). Sizes are declared before any data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{BscLinks, NetworkChannel, Sizes, T1Law, T2Law};
use crate::pmf::{CondPmf, JointPmf, PMF_TOL};
use crate::rate_region::{eval_theorem1, eval_theorem2, DfMode, RateReport, Theorem, FORMAT_VERSION};
use crate::var::Var;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Preset {
    IdentityDirect,
    AllNoise,
    BinarySymmetricLinks { links: BscLinks },
}

impl Preset {
    pub fn build(&self) -> Result<NetworkChannel> {
        match self {
            Preset::IdentityDirect => Ok(NetworkChannel::identity_direct()),
            Preset::AllNoise => Ok(NetworkChannel::all_noise()),
            Preset::BinarySymmetricLinks { links } => NetworkChannel::binary_symmetric_links(*links),
        }
    }
}

/// On-disk channel: either a preset (optionally with auxiliary sizes
/// overridden through `sizes`) or explicit `sizes` plus `channel` rows,
/// one per `(x0, x1, x2)` index, each of length `|Y0|·|Y1|·|Y2|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<Vec<Vec<f64>>>,
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Document(format!(
            "format_version: expected {FORMAT_VERSION}, found {v}"
        )));
    }
    Ok(())
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

fn size_map(sizes: &Sizes, vars: &[Var]) -> BTreeMap<String, usize> {
    vars.iter().map(|v| (v.name().to_string(), sizes.get(*v))).collect()
}

/// Reads `sizes` into a [`Sizes`], requiring every variable in `required`
/// and defaulting the rest to `fallback`.
fn read_sizes(map: &BTreeMap<String, usize>, required: &[Var], fallback: Sizes) -> Result<Sizes> {
    let mut s = fallback;
    for (name, &n) in map {
        let v: Var = name
            .parse()
            .map_err(|_| Error::Document(format!("sizes.{name}: unknown variable")))?;
        if n == 0 || n > crate::pmf::MAX_ALPHABET {
            return Err(Error::Document(format!(
                "sizes.{name}: {n} outside 1..={}",
                crate::pmf::MAX_ALPHABET
            )));
        }
        s.set(v, n);
    }
    for v in required {
        if !map.contains_key(v.name()) {
            return Err(Error::Document(format!("sizes.{v}: missing")));
        }
    }
    Ok(s)
}

/// Validates `rows` as a list of `count` pmfs of length `len` and
/// flattens them.
fn read_rows(field: &str, rows: &[Vec<f64>], count: usize, len: usize) -> Result<Vec<f64>> {
    if rows.len() != count {
        return Err(Error::Document(format!(
            "{field}: expected {count} rows, found {}",
            rows.len()
        )));
    }
    let mut out = Vec::with_capacity(count * len);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != len {
            return Err(Error::Document(format!(
                "{field}[{i}]: expected {len} entries, found {}",
                row.len()
            )));
        }
        if let Some((j, x)) = row.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < -PMF_TOL) {
            return Err(Error::Document(format!("{field}[{i}][{j}]: invalid probability {x}")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > PMF_TOL {
            return Err(Error::Document(format!("{field}[{i}]: row sums to {s}, not 1")));
        }
        out.extend(row.iter().map(|x| x.max(0.0)));
    }
    Ok(out)
}

fn rows_of(mass: &[f64], len: usize) -> Vec<Vec<f64>> {
    mass.chunks(len).map(|c| c.to_vec()).collect()
}

const CHANNEL_VARS: [Var; 6] = [Var::X0, Var::X1, Var::X2, Var::Y0, Var::Y1, Var::Y2];
const AUX_VARS: [Var; 4] = [Var::V1, Var::V2, Var::Yh1, Var::Yh2];

impl ChannelDoc {
    pub fn from_channel(ch: &NetworkChannel) -> Self {
        let n = ch.sizes().get(Var::Y0) * ch.sizes().get(Var::Y1) * ch.sizes().get(Var::Y2);
        ChannelDoc {
            format_version: FORMAT_VERSION,
            preset: None,
            sizes: Some(size_map(&ch.sizes(), &Var::ALL)),
            channel: Some(rows_of(ch.kernel().mass(), n)),
        }
    }

    pub fn build(&self) -> Result<NetworkChannel> {
        check_version(self.format_version)?;
        let empty = BTreeMap::new();
        let sizes = self.sizes.as_ref().unwrap_or(&empty);
        match (&self.preset, &self.channel) {
            (Some(_), Some(_)) => Err(Error::Document("give either `preset` or `channel`, not both".into())),
            (None, None) => Err(Error::Document("missing field `channel` (or `preset`)".into())),
            (Some(p), None) => {
                let mut ch = p.build()?;
                for (name, &n) in sizes {
                    let v: Var = name
                        .parse()
                        .map_err(|_| Error::Document(format!("sizes.{name}: unknown variable")))?;
                    if !AUX_VARS.contains(&v) {
                        if ch.sizes().get(v) != n {
                            return Err(Error::Document(format!(
                                "sizes.{name}: preset fixes this alphabet at {}",
                                ch.sizes().get(v)
                            )));
                        }
                        continue;
                    }
                    ch = ch.with_aux(v, n).map_err(|e| Error::Document(format!("sizes.{name}: {e}")))?;
                }
                Ok(ch)
            }
            (None, Some(rows)) => {
                if self.sizes.is_none() {
                    return Err(Error::Document("missing field `sizes`".into()));
                }
                let s = read_sizes(sizes, &CHANNEL_VARS, Sizes::binary())?;
                let inputs = s.get(Var::X0) * s.get(Var::X1) * s.get(Var::X2);
                let outputs = s.get(Var::Y0) * s.get(Var::Y1) * s.get(Var::Y2);
                let mass = read_rows("channel", rows, inputs, outputs)?;
                let kernel = CondPmf::new(
                    "channel",
                    s.alphabets(&[Var::Y0, Var::Y1, Var::Y2]),
                    s.alphabets(&[Var::X0, Var::X1, Var::X2]),
                    mass,
                )?;
                NetworkChannel::new(s, kernel)
            }
        }
    }
}

pub fn parse_channel(text: &str) -> Result<NetworkChannel> {
    parse_json::<ChannelDoc>(text)?.build()
}

pub fn channel_to_json(ch: &NetworkChannel) -> String {
    serde_json::to_string_pretty(&ChannelDoc::from_channel(ch)).expect("serializable")
}

/// A law of either family.
#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    T1(T1Law),
    T2(T2Law),
}

impl Law {
    pub fn theorem(&self) -> Theorem {
        match self {
            Law::T1(_) => Theorem::T1,
            Law::T2(_) => Theorem::T2,
        }
    }

    pub fn slices(&self) -> Vec<Vec<f64>> {
        match self {
            Law::T1(l) => l.slices(),
            Law::T2(l) => l.slices(),
        }
    }

    pub fn with_slices(&self, s: &[Vec<f64>]) -> Result<Law> {
        Ok(match self {
            Law::T1(l) => Law::T1(l.with_slices(s)?),
            Law::T2(l) => Law::T2(l.with_slices(s)?),
        })
    }

    /// Uniform law of the given family with auxiliary sizes from `sizes`.
    pub fn uniform(theorem: Theorem, sizes: Sizes) -> Result<Law> {
        Ok(match theorem {
            Theorem::T1 => Law::T1(T1Law::uniform(sizes)?),
            Theorem::T2 => Law::T2(T2Law::uniform(sizes)?),
        })
    }

    pub fn evaluate(&self, ch: &NetworkChannel, mode: DfMode) -> Result<RateReport> {
        match self {
            Law::T1(l) => eval_theorem1(ch, l),
            Law::T2(l) => eval_theorem2(ch, l, mode),
        }
    }

    pub fn to_doc(&self) -> LawDoc {
        let mass = |c: &CondPmf| rows_of(c.mass(), c.target_len());
        match self {
            Law::T1(l) => {
                let s = l.sizes().expect("validated law");
                LawDoc {
                    format_version: FORMAT_VERSION,
                    theorem: "t1".into(),
                    sizes: size_map(&s, &[Var::X0, Var::X1, Var::X2, Var::Y1, Var::Y2, Var::Yh1, Var::Yh2]),
                    p_x1: l.p_x1.mass().to_vec(),
                    p_x2: l.p_x2.mass().to_vec(),
                    p_v1: None,
                    p_v2: None,
                    p_x0: mass(&l.p_x0),
                    p_yh1: mass(&l.p_yh1),
                    p_yh2: mass(&l.p_yh2),
                }
            }
            Law::T2(l) => {
                let s = l.sizes().expect("validated law");
                LawDoc {
                    format_version: FORMAT_VERSION,
                    theorem: "t2".into(),
                    sizes: size_map(
                        &s,
                        &[Var::X0, Var::X1, Var::X2, Var::V1, Var::V2, Var::Y1, Var::Y2, Var::Yh1, Var::Yh2],
                    ),
                    p_x1: l.p_x1.mass().to_vec(),
                    p_x2: l.p_x2.mass().to_vec(),
                    p_v1: Some(mass(&l.p_v1)),
                    p_v2: Some(mass(&l.p_v2)),
                    p_x0: mass(&l.p_x0),
                    p_yh1: mass(&l.p_yh1),
                    p_yh2: mass(&l.p_yh2),
                }
            }
        }
    }
}

/// On-disk law. `p_v1`/`p_v2` are present exactly for `theorem = "t2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawDoc {
    pub format_version: u32,
    pub theorem: String,
    pub sizes: BTreeMap<String, usize>,
    pub p_x1: Vec<f64>,
    pub p_x2: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_v1: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_v2: Option<Vec<Vec<f64>>>,
    pub p_x0: Vec<Vec<f64>>,
    pub p_yh1: Vec<Vec<f64>>,
    pub p_yh2: Vec<Vec<f64>>,
}

impl LawDoc {
    pub fn build(&self) -> Result<Law> {
        check_version(self.format_version)?;
        let theorem: Theorem = self
            .theorem
            .parse()
            .map_err(|_| Error::Document(format!("theorem: expected \"t1\" or \"t2\", found {:?}", self.theorem)))?;
        let mut required = vec![Var::X0, Var::X1, Var::X2, Var::Y1, Var::Y2, Var::Yh1, Var::Yh2];
        if theorem == Theorem::T2 {
            required.extend([Var::V1, Var::V2]);
        }
        let s = read_sizes(&self.sizes, &required, Sizes([1; 10]))?;
        let marginal = |field: &str, v: Var, p: &[f64]| -> Result<JointPmf> {
            let m = read_rows(field, &[p.to_vec()], 1, s.get(v))
                .map_err(|e| Error::Document(e.to_string().replace("[0]", "")))?;
            JointPmf::named(field, s.alphabets(&[v]), m)
        };
        let cond = |field: &str, rows: &[Vec<f64>], t: Var, g: &[Var]| -> Result<CondPmf> {
            let count = g.iter().map(|v| s.get(*v)).product();
            let m = read_rows(field, rows, count, s.get(t))?;
            CondPmf::new(field, s.alphabets(&[t]), s.alphabets(g), m)
        };
        let p_x1 = marginal("p_x1", Var::X1, &self.p_x1)?;
        let p_x2 = marginal("p_x2", Var::X2, &self.p_x2)?;
        match theorem {
            Theorem::T1 => {
                if self.p_v1.is_some() || self.p_v2.is_some() {
                    return Err(Error::Document("p_v1/p_v2: only allowed for theorem t2".into()));
                }
                Ok(Law::T1(T1Law::new(
                    p_x1,
                    p_x2,
                    cond("p_x0", &self.p_x0, Var::X0, &[Var::X1, Var::X2])?,
                    cond("p_yh1", &self.p_yh1, Var::Yh1, &[Var::X1, Var::Y1])?,
                    cond("p_yh2", &self.p_yh2, Var::Yh2, &[Var::X2, Var::Y2])?,
                )?))
            }
            Theorem::T2 => {
                let need = |f: &str, x: &Option<Vec<Vec<f64>>>| {
                    x.clone().ok_or_else(|| Error::Document(format!("missing field `{f}`")))
                };
                Ok(Law::T2(T2Law::new(
                    p_x1,
                    p_x2,
                    cond("p_v1", &need("p_v1", &self.p_v1)?, Var::V1, &[Var::X1])?,
                    cond("p_v2", &need("p_v2", &self.p_v2)?, Var::V2, &[Var::X2])?,
                    cond("p_x0", &self.p_x0, Var::X0, &[Var::X1, Var::X2, Var::V1, Var::V2])?,
                    cond("p_yh1", &self.p_yh1, Var::Yh1, &[Var::X1, Var::V1, Var::Y1])?,
                    cond("p_yh2", &self.p_yh2, Var::Yh2, &[Var::X2, Var::V2, Var::Y2])?,
                )?))
            }
        }
    }
}

pub fn parse_law(text: &str) -> Result<Law> {
    parse_json::<LawDoc>(text)?.build()
}

pub fn law_to_json(law: &Law) -> String {
    serde_json::to_string_pretty(&law.to_doc()).expect("serializable")
}
