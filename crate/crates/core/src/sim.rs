//! Toy-scale Monte Carlo of the block-Markov compress-and-forward scheme:
//! random codebooks, random binning, robust typicality and the relay,
//! sender and receiver decoding stages.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::network::{assemble_joint_t1, NetworkChannel, T1Law};
use crate::pmf::{CondPmf, JointPmf};
use crate::random::rng_for;
use crate::rate_region::{T1Rates, FORMAT_VERSION};
use crate::var::{Var, VarSet};

/// Largest total number of codewords held at once.
pub const CODEWORD_CAP: u64 = 1_000_000;
/// Largest total number of stored symbols (codewords times block length).
pub const SYMBOL_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalityParams {
    pub epsilon: f64,
}

impl TypicalityParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(TypicalityParams { epsilon })
    }
}

/// Robust typicality test against the marginal of a joint pmf on an
/// ordered list of variables.
#[derive(Debug, Clone)]
pub struct Typer {
    vars: Vec<Var>,
    strides: Vec<usize>,
    probs: Vec<f64>,
    eps: f64,
}

impl Typer {
    pub fn new(joint: &JointPmf, vars: &[Var], eps: f64) -> Result<Self> {
        let set: VarSet = vars.iter().copied().collect();
        if set.len() != vars.len() {
            return Err(Error::Config("repeated variable in typicality test".into()));
        }
        let m = joint.marginalize(set)?;
        let dims: Vec<usize> = vars
            .iter()
            .map(|v| m.size_of(*v).ok_or_else(|| Error::UnknownVariable(v.name().into())))
            .collect::<Result<_>>()?;
        let mut strides = vec![1; vars.len()];
        for i in (0..vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let canon: Vec<(Var, usize)> = m.strides();
        let total: usize = dims.iter().product();
        let mut probs = vec![0.0; total];
        for (flat, p) in probs.iter_mut().enumerate() {
            let mut at = 0;
            for (k, v) in vars.iter().enumerate() {
                let digit = (flat / strides[k]) % dims[k];
                let cs = canon.iter().find(|(w, _)| w == v).map(|(_, s)| *s).unwrap_or(0);
                at += digit * cs;
            }
            *p = m.mass()[at];
        }
        Ok(Typer {
            vars: vars.to_vec(),
            strides,
            probs,
            eps,
        })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// Per-position partial cell index from the sequences given so far
    /// (`None` entries contribute nothing).
    pub fn base(&self, seqs: &[Option<&[u8]>], n: usize) -> Vec<u32> {
        let mut b = vec![0u32; n];
        for (k, s) in seqs.iter().enumerate() {
            if let Some(s) = s {
                for (bi, &x) in b.iter_mut().zip(s.iter()) {
                    *bi += (x as usize * self.strides[k]) as u32;
                }
            }
        }
        b
    }

    /// Completes `base` with the remaining sequences (by position in
    /// [`Typer::vars`]) and tests the joint type.
    pub fn check_with(&self, base: &[u32], rest: &[(usize, &[u8])], counts: &mut Vec<u32>) -> bool {
        counts.clear();
        counts.resize(self.probs.len(), 0);
        for (i, &b) in base.iter().enumerate() {
            let mut idx = b as usize;
            for &(k, s) in rest {
                idx += s[i] as usize * self.strides[k];
            }
            counts[idx] += 1;
        }
        let n = base.len() as f64;
        counts
            .iter()
            .zip(&self.probs)
            .all(|(&c, &p)| (c as f64 / n - p).abs() <= self.eps * p + 1e-12)
    }

    pub fn check(&self, seqs: &[&[u8]]) -> bool {
        let n = seqs.first().map_or(0, |s| s.len());
        let all: Vec<Option<&[u8]>> = seqs.iter().map(|s| Some(*s)).collect();
        self.check_with(&self.base(&all, n), &[], &mut Vec::new())
    }
}

/// True iff the sequences (one per variable, all the same length) are
/// robustly `eps`-typical for the marginal of `joint`: every cell's
/// empirical frequency is within `eps · p` of its probability.
pub fn typical(seqs: &[(Var, &[usize])], joint: &JointPmf, eps: f64) -> Result<bool> {
    let n = seqs.first().map_or(0, |(_, s)| s.len());
    if let Some((v, s)) = seqs.iter().find(|(_, s)| s.len() != n) {
        return Err(Error::LengthMismatch(format!("sequence for {v} has length {}, expected {n}", s.len())));
    }
    if n == 0 {
        return Err(Error::LengthMismatch("empty sequences".into()));
    }
    let vars: Vec<Var> = seqs.iter().map(|(v, _)| *v).collect();
    let t = Typer::new(joint, &vars, eps)?;
    let bytes: Vec<Vec<u8>> = seqs
        .iter()
        .map(|(v, s)| {
            let size = joint.size_of(*v).unwrap_or(0);
            s.iter()
                .map(|&x| {
                    if x < size {
                        Ok(x as u8)
                    } else {
                        Err(Error::Config(format!("symbol {x} outside the alphabet of {v}")))
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&[u8]> = bytes.iter().map(|b| b.as_slice()).collect();
    Ok(t.check(&refs))
}

/// `⌈2^{nR}⌉`, rejecting books that could never fit in memory.
pub fn book_size(n: usize, rate: f64) -> Result<u64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Config(format!("rate must be finite and nonnegative, got {rate}")));
    }
    let e = n as f64 * rate;
    if e > 62.0 {
        return Err(Error::CapExceeded(format!("codebook of 2^{e:.1} codewords")));
    }
    // round away float noise such as n * 0.1 = 100.00000000000001
    let e = (e * 1e9).round() / 1e9;
    Ok(e.exp2().ceil() as u64)
}

/// Sampler for each conditional slice of a `CondPmf`.
struct Kernel {
    rows: Vec<WeightedIndex<f64>>,
}

impl Kernel {
    fn new(c: &CondPmf) -> Result<Self> {
        let rows = (0..c.num_slices())
            .map(|g| {
                WeightedIndex::new(c.slice(g).iter().copied())
                    .map_err(|e| Error::pmf("sampler", e.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(Kernel { rows })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, given: usize) -> u8 {
        self.rows[given].sample(rng) as u8
    }
}

/// Everything the simulation samples from, derived once per run.
struct Model {
    sizes: crate::network::Sizes,
    p_x1: Kernel,
    p_x2: Kernel,
    p_x0: Kernel,
    channel: Kernel,
    /// `p(ŷ1|x1)`, the codebook law of the relay-1 compressions.
    p_yh1: Kernel,
    p_yh2: Kernel,
    relay1: Typer,
    relay2: Typer,
    sender: Typer,
    recv_s: Typer,
    recv_l1: Typer,
    recv_l2: Typer,
    recv_w: Typer,
}

fn marginal_kernel(j: &JointPmf, v: Var) -> Result<Kernel> {
    Kernel::new(&j.conditional(VarSet::of(&[v]), VarSet::EMPTY)?)
}

impl Model {
    fn new(channel: &NetworkChannel, law: &T1Law, eps: f64) -> Result<Self> {
        let j = assemble_joint_t1(channel, law)?;
        let t = |vars: &[Var]| Typer::new(&j, vars, eps);
        Ok(Model {
            sizes: channel.sizes(),
            p_x1: marginal_kernel(&j, Var::X1)?,
            p_x2: marginal_kernel(&j, Var::X2)?,
            p_x0: Kernel::new(&law.p_x0)?,
            channel: Kernel::new(channel.kernel())?,
            p_yh1: Kernel::new(&j.conditional(VarSet::of(&[Var::Yh1]), VarSet::of(&[Var::X1]))?)?,
            p_yh2: Kernel::new(&j.conditional(VarSet::of(&[Var::Yh2]), VarSet::of(&[Var::X2]))?)?,
            relay1: t(&[Var::X1, Var::Y1, Var::Yh1])?,
            relay2: t(&[Var::X2, Var::Y2, Var::Yh2])?,
            sender: t(&[Var::X1, Var::X2, Var::Y1, Var::Y2, Var::Yh1, Var::Yh2])?,
            recv_s: t(&[Var::X1, Var::X2, Var::Y0])?,
            recv_l1: t(&[Var::X1, Var::Y0, Var::Yh1])?,
            recv_l2: t(&[Var::X2, Var::Y0, Var::Yh2])?,
            recv_w: t(&[Var::X0, Var::X1, Var::X2, Var::Y0, Var::Yh1, Var::Yh2])?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub n: usize,
    pub blocks: usize,
    pub rates: SimRates,
    pub typicality: TypicalityParams,
    pub trials: usize,
    pub seed: u64,
}

/// Serializable mirror of [`T1Rates`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimRates {
    pub rbar: f64,
    pub rh1: f64,
    pub rh2: f64,
    pub rs1: f64,
    pub rs2: f64,
}

impl From<T1Rates> for SimRates {
    fn from(r: T1Rates) -> Self {
        SimRates {
            rbar: r.rbar,
            rh1: r.rh1,
            rh2: r.rh2,
            rs1: r.rs1,
            rs2: r.rs2,
        }
    }
}

/// Integer codebook sizes implied by a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BookSizes {
    pub w: u64,
    pub s1: u64,
    pub s2: u64,
    pub z1: u64,
    pub z2: u64,
}

impl BookSizes {
    pub fn codewords(&self) -> u64 {
        self.s1
            .saturating_add(self.s2)
            .saturating_add(self.w.saturating_mul(self.s1).saturating_mul(self.s2))
            .saturating_add(self.s1.saturating_mul(self.z1))
            .saturating_add(self.s2.saturating_mul(self.z2))
    }

    /// `log2(size) / n` for each book: the rate actually simulated.
    pub fn effective_rates(&self, n: usize) -> SimRates {
        let r = |m: u64| (m as f64).log2() / n as f64;
        SimRates {
            rbar: r(self.w),
            rh1: r(self.z1),
            rh2: r(self.z2),
            rs1: r(self.s1),
            rs2: r(self.s2),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<BookSizes> {
        if self.n < 1 {
            return Err(Error::Config("block length n must be >= 1".into()));
        }
        if self.blocks < 2 {
            return Err(Error::Config("at least 2 blocks are needed".into()));
        }
        TypicalityParams::new(self.typicality.epsilon)?;
        let r = self.rates;
        let b = BookSizes {
            w: book_size(self.n, r.rbar)?,
            s1: book_size(self.n, r.rs1)?,
            s2: book_size(self.n, r.rs2)?,
            z1: book_size(self.n, r.rh1)?,
            z2: book_size(self.n, r.rh2)?,
        };
        let cw = b.codewords();
        if cw > CODEWORD_CAP {
            return Err(Error::CapExceeded(format!("{cw} codewords (cap {CODEWORD_CAP})")));
        }
        let sym = cw.saturating_mul(self.n as u64);
        if sym > SYMBOL_CAP {
            return Err(Error::CapExceeded(format!("{sym} stored symbols (cap {SYMBOL_CAP})")));
        }
        Ok(b)
    }
}

/// Flat storage of `count` codewords of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Book {
    n: usize,
    data: Vec<u8>,
}

impl Book {
    pub fn len(&self) -> usize {
        self.data.len() / self.n.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebooks {
    pub n: usize,
    pub sizes: BookSizes,
    pub x1: Book,
    pub x2: Book,
    /// Indexed by `(w * |s1| + s1) * |s2| + s2`.
    pub x0: Book,
    /// Indexed by `s1 * |z1| + z1`.
    pub yh1: Book,
    pub yh2: Book,
}

impl Codebooks {
    pub fn x0(&self, w: usize, s1: usize, s2: usize) -> &[u8] {
        let (n1, n2) = (self.sizes.s1 as usize, self.sizes.s2 as usize);
        self.x0.get((w * n1 + s1) * n2 + s2)
    }

    pub fn yh1(&self, z: usize, s1: usize) -> &[u8] {
        self.yh1.get(s1 * self.sizes.z1 as usize + z)
    }

    pub fn yh2(&self, z: usize, s2: usize) -> &[u8] {
        self.yh2.get(s2 * self.sizes.z2 as usize + z)
    }
}

/// Random partitions of the compression indices into bin cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMaps {
    pub bin1: Vec<u32>,
    pub bin2: Vec<u32>,
}

fn draw_book<R: Rng + ?Sized>(rng: &mut R, n: usize, count: u64, mut sym: impl FnMut(&mut R, usize) -> u8) -> Book {
    let mut data = Vec::with_capacity(count as usize * n);
    for _ in 0..count {
        for i in 0..n {
            data.push(sym(rng, i));
        }
    }
    Book { n, data }
}

fn build_with(model: &Model, sizes: BookSizes, n: usize, rng: &mut ChaCha8Rng) -> (Codebooks, BinMaps) {
    let x1 = draw_book(rng, n, sizes.s1, |r, _| model.p_x1.draw(r, 0));
    let x2 = draw_book(rng, n, sizes.s2, |r, _| model.p_x2.draw(r, 0));
    let n2x = model.sizes.get(Var::X2);
    let mut x0 = Book { n, data: Vec::new() };
    for _w in 0..sizes.w {
        for s1 in 0..sizes.s1 as usize {
            for s2 in 0..sizes.s2 as usize {
                let (a, b) = (x1.get(s1), x2.get(s2));
                for i in 0..n {
                    let g = a[i] as usize * n2x + b[i] as usize;
                    x0.data.push(model.p_x0.draw(rng, g));
                }
            }
        }
    }
    let mut yh1 = Book { n, data: Vec::new() };
    for s1 in 0..sizes.s1 as usize {
        let a = x1.get(s1);
        let b = draw_book(rng, n, sizes.z1, |r, i| model.p_yh1.draw(r, a[i] as usize));
        yh1.data.extend(b.data);
    }
    let mut yh2 = Book { n, data: Vec::new() };
    for s2 in 0..sizes.s2 as usize {
        let a = x2.get(s2);
        let b = draw_book(rng, n, sizes.z2, |r, i| model.p_yh2.draw(r, a[i] as usize));
        yh2.data.extend(b.data);
    }
    let bin1 = (0..sizes.z1).map(|_| rng.random_range(0..sizes.s1) as u32).collect();
    let bin2 = (0..sizes.z2).map(|_| rng.random_range(0..sizes.s2) as u32).collect();
    (
        Codebooks {
            n,
            sizes,
            x1,
            x2,
            x0,
            yh1,
            yh2,
        },
        BinMaps { bin1, bin2 },
    )
}

/// Draws every codebook and both bin maps for trial `trial` of `cfg`.
pub fn build(channel: &NetworkChannel, law: &T1Law, cfg: &SimConfig, trial: u64) -> Result<(Codebooks, BinMaps)> {
    let sizes = cfg.validate()?;
    let model = Model::new(channel, law, cfg.typicality.epsilon)?;
    let mut rng = rng_for(cfg.seed, trial);
    Ok(build_with(&model, sizes, cfg.n, &mut rng))
}

/// Decoding stages in attribution order.
pub const STAGES: [&str; 7] = [
    "relay1_covering",
    "relay2_covering",
    "sender_joint_covering",
    "receiver_s_pair",
    "receiver_bin_intersection_1",
    "receiver_bin_intersection_2",
    "receiver_message",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStats {
    pub config: SimConfig,
    pub books: BookSizes,
    pub effective_rates: SimRates,
    /// First-error stage counts, in [`STAGES`] order.
    pub first_errors: [u64; 7],
    /// Blocks whose message was decoded wrongly, whatever the cause.
    pub message_errors: u64,
    pub trials: u64,
    pub blocks_decoded: u64,
}

impl SimStats {
    pub fn to_json(&self) -> Value {
        let stages: serde_json::Map<String, Value> = STAGES
            .iter()
            .zip(self.first_errors)
            .map(|(s, c)| (s.to_string(), json!(c)))
            .collect();
        json!({
            "format_version": FORMAT_VERSION,
            "config": self.config,
            "books": self.books,
            "effective_rates": self.effective_rates,
            "first_errors": stages,
            "message_errors": self.message_errors,
            "trials": self.trials,
            "blocks_decoded": self.blocks_decoded,
        })
    }

    pub fn csv_header() -> String {
        let mut cols = vec!["trials", "blocks_decoded"];
        cols.extend(STAGES);
        cols.push("message_errors");
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.trials.to_string(), self.blocks_decoded.to_string()];
        cols.extend(self.first_errors.iter().map(|c| c.to_string()));
        cols.push(self.message_errors.to_string());
        cols.join(",")
    }
}

/// Outcome of one decoded message.
#[derive(Debug, Default, Clone, Copy)]
struct BlockOutcome {
    first_error: Option<usize>,
    message_wrong: bool,
}

/// The unique index in `cands` passing `test`; `None` if none or several.
fn unique(cands: impl Iterator<Item = usize>, mut test: impl FnMut(usize) -> bool) -> Option<usize> {
    let mut found = None;
    for c in cands {
        if test(c) {
            if found.is_some() {
                return None;
            }
            found = Some(c);
        }
    }
    found
}

fn first(cands: impl Iterator<Item = usize>, mut test: impl FnMut(usize) -> bool) -> Option<usize> {
    cands.into_iter().find(|&c| test(c))
}


/// What one block leaves behind for the decoding of its message.
struct BlockState {
    y0: Vec<u8>,
    /// Bin indices the relays transmitted during the block.
    s: (usize, usize),
    /// Receiver's unique estimate of `s`.
    s_hat: Option<(usize, usize)>,
    w: usize,
    /// Compression indices the relays chose at the end of the block.
    z: (usize, usize),
    /// Relay 1, relay 2 and sender covering failures.
    covering: [bool; 3],
}

fn run_trial(model: &Model, sizes: BookSizes, cfg: &SimConfig, trial: u64) -> Vec<BlockOutcome> {
    let n = cfg.n;
    let mut rng = rng_for(cfg.seed, trial);
    let (cb, bins) = build_with(model, sizes, n, &mut rng);
    let (ny1, ny2) = (model.sizes.get(Var::Y1), model.sizes.get(Var::Y2));
    let (nx1, nx2) = (model.sizes.get(Var::X1), model.sizes.get(Var::X2));
    let (z1n, z2n, s2n) = (sizes.z1 as usize, sizes.z2 as usize, sizes.s2 as usize);
    let mut buf = Vec::new();
    let mut relay_s = (0usize, 0usize);
    let mut sender_s = (0usize, 0usize);
    let mut prev: Option<BlockState> = None;
    let mut out = Vec::with_capacity(cfg.blocks - 1);

    for b in 0..cfg.blocks {
        let last = b + 1 == cfg.blocks;
        let w = if last { 0 } else { rng.random_range(0..sizes.w) as usize };
        let x1 = cb.x1.get(relay_s.0);
        let x2 = cb.x2.get(relay_s.1);
        let x0 = cb.x0(w, sender_s.0, sender_s.1);
        let (mut y0, mut y1, mut y2) = (vec![0u8; n], vec![0u8; n], vec![0u8; n]);
        for i in 0..n {
            let g = (x0[i] as usize * nx1 + x1[i] as usize) * nx2 + x2[i] as usize;
            let y = model.channel.draw(&mut rng, g) as usize;
            y0[i] = (y / (ny1 * ny2)) as u8;
            y1[i] = ((y / ny2) % ny1) as u8;
            y2[i] = (y % ny2) as u8;
        }

        let mut covering = [false; 3];
        let mut z = (0, 0);
        let s_now = relay_s;
        if !last {
            let base1 = model.relay1.base(&[Some(x1), Some(&y1), None], n);
            match first(0..z1n, |c| model.relay1.check_with(&base1, &[(2, cb.yh1(c, relay_s.0))], &mut buf)) {
                Some(c) => z.0 = c,
                None => covering[0] = true,
            }
            let base2 = model.relay2.base(&[Some(x2), Some(&y2), None], n);
            match first(0..z2n, |c| model.relay2.check_with(&base2, &[(2, cb.yh2(c, relay_s.1))], &mut buf)) {
                Some(c) => z.1 = c,
                None => covering[1] = true,
            }
            // The sender sees y1, y2 through feedback and searches for a
            // jointly typical pair, trying the relays' own choice first.
            let bs = model.sender.base(
                &[Some(cb.x1.get(sender_s.0)), Some(cb.x2.get(sender_s.1)), Some(&y1), Some(&y2), None, None],
                n,
            );
            let order = std::iter::once(z.0 * z2n + z.1).chain(0..z1n * z2n);
            let pair = first(order, |p| {
                model.sender.check_with(
                    &bs,
                    &[(4, cb.yh1(p / z2n, sender_s.0)), (5, cb.yh2(p % z2n, sender_s.1))],
                    &mut buf,
                )
            });
            match pair {
                Some(p) => sender_s = (bins.bin1[p / z2n] as usize, bins.bin2[p % z2n] as usize),
                None => {
                    covering[2] = true;
                    sender_s = (bins.bin1[z.0] as usize, bins.bin2[z.1] as usize);
                }
            }
            relay_s = (bins.bin1[z.0] as usize, bins.bin2[z.1] as usize);
        }

        // receiver: the unique relay codeword pair typical with y0
        let base_s = model.recv_s.base(&[None, None, Some(&y0)], n);
        let s_hat = unique(0..(sizes.s1 * sizes.s2) as usize, |p| {
            model.recv_s.check_with(&base_s, &[(0, cb.x1.get(p / s2n)), (1, cb.x2.get(p % s2n))], &mut buf)
        })
        .map(|p| (p / s2n, p % s2n));

        let cur = BlockState {
            y0,
            s: s_now,
            s_hat,
            w,
            z,
            covering,
        };
        if let Some(p) = &prev {
            out.push(decode_message(model, &cb, &bins, p, &cur, &mut buf));
        }
        prev = Some(cur);
    }
    out
}

/// Decodes the message of block `p` once block `cur` has been received.
fn decode_message(
    model: &Model,
    cb: &Codebooks,
    bins: &BinMaps,
    p: &BlockState,
    cur: &BlockState,
    buf: &mut Vec<u32>,
) -> BlockOutcome {
    let n = cb.n;
    let mut errs = [false; 7];
    errs[..3].copy_from_slice(&p.covering);
    errs[3] = p.s_hat != Some(p.s) || cur.s_hat != Some(cur.s);
    let (a1, a2) = p.s_hat.unwrap_or((0, 0));
    let (c1, c2) = cur.s_hat.unwrap_or((0, 0));
    let x1 = cb.x1.get(a1);
    let x2 = cb.x2.get(a2);

    // ambiguity list of the previous block intersected with the decoded bin
    let b1 = model.recv_l1.base(&[Some(x1), Some(&p.y0), None], n);
    let z1 = unique((0..cb.sizes.z1 as usize).filter(|&z| bins.bin1[z] as usize == c1), |z| {
        model.recv_l1.check_with(&b1, &[(2, cb.yh1(z, a1))], buf)
    });
    let b2 = model.recv_l2.base(&[Some(x2), Some(&p.y0), None], n);
    let z2 = unique((0..cb.sizes.z2 as usize).filter(|&z| bins.bin2[z] as usize == c2), |z| {
        model.recv_l2.check_with(&b2, &[(2, cb.yh2(z, a2))], buf)
    });
    errs[4] = z1 != Some(p.z.0);
    errs[5] = z2 != Some(p.z.1);

    let (z1, z2) = (z1.unwrap_or(0), z2.unwrap_or(0));
    let bw = model.recv_w.base(
        &[None, Some(x1), Some(x2), Some(&p.y0), Some(cb.yh1(z1, a1)), Some(cb.yh2(z2, a2))],
        n,
    );
    let w_hat = unique(0..cb.sizes.w as usize, |w| model.recv_w.check_with(&bw, &[(0, cb.x0(w, a1, a2))], buf));
    errs[6] = w_hat != Some(p.w);
    BlockOutcome {
        first_error: errs.iter().position(|&e| e),
        message_wrong: errs[6],
    }
}

/// Monte Carlo of the compress-and-forward scheme: `cfg.trials`
/// independent runs of `cfg.blocks` blocks, each with fresh codebooks.
pub fn run_cf(channel: &NetworkChannel, law: &T1Law, cfg: &SimConfig) -> Result<SimStats> {
    let sizes = cfg.validate()?;
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let model = Model::new(channel, law, cfg.typicality.epsilon)?;
    let per_trial: Vec<Vec<BlockOutcome>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(&model, sizes, cfg, t))
        .collect();
    let mut first_errors = [0u64; 7];
    let mut message_errors = 0;
    let mut blocks = 0;
    for o in per_trial.iter().flatten() {
        blocks += 1;
        if let Some(s) = o.first_error {
            first_errors[s] += 1;
        }
        message_errors += o.message_wrong as u64;
    }
    Ok(SimStats {
        config: *cfg,
        books: sizes,
        effective_rates: sizes.effective_rates(cfg.n),
        first_errors,
        message_errors,
        trials: cfg.trials as u64,
        blocks_decoded: blocks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoveringMethod {
    /// Every codeword drawn and tested.
    Explicit,
    /// Exact per-trial success probability from the method of types.
    TypeClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveringResult {
    pub rh1: f64,
    pub n: usize,
    pub epsilon: f64,
    /// `log2` of the number of codewords (the quantized rate times n).
    pub book_log2: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_fraction: f64,
    pub method: CoveringMethod,
}

impl CoveringResult {
    pub fn csv_header() -> &'static str {
        "rh1,n,epsilon,book_log2,trials,successes,success_fraction,method"
    }

    pub fn csv_row(&self) -> String {
        let m = match self.method {
            CoveringMethod::Explicit => "explicit",
            CoveringMethod::TypeClass => "type-class",
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.rh1, self.n, self.epsilon, self.book_log2, self.trials, self.successes, self.success_fraction, m
        )
    }
}

/// `ln k!` for `k ≤ n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn log_binom_pmf(lf: &[f64], m: usize, k: usize, q: f64) -> f64 {
    if q <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q >= 1.0 {
        return if k == m { 0.0 } else { f64::NEG_INFINITY };
    }
    lf[m] - lf[k] - lf[m - k] + k as f64 * q.ln() + (m - k) as f64 * (-q).ln_1p()
}

/// `ln P(Multinomial(m, probs) lands in the count box [lo_c, hi_c])`,
/// via sequential conditional binomials.
fn log_multinomial_box(lf: &[f64], m: usize, probs: &[f64], lo: &[usize], hi: &[usize]) -> f64 {
    let k = probs.len();
    // f[r] = ln P(components c.. land in their windows | r draws left)
    let mut f = vec![f64::NEG_INFINITY; m + 1];
    for (r, fr) in f.iter_mut().enumerate() {
        if r >= lo[k - 1] && r <= hi[k - 1] {
            *fr = 0.0;
        }
    }
    let mut tail: f64 = probs[k - 1];
    for c in (0..k - 1).rev() {
        tail += probs[c];
        let q = if tail > 0.0 { probs[c] / tail } else { 0.0 };
        let mut g = vec![f64::NEG_INFINITY; m + 1];
        for (r, gr) in g.iter_mut().enumerate() {
            let mut acc = f64::NEG_INFINITY;
            for take in lo[c]..=hi[c].min(r) {
                let rest = f[r - take];
                if rest == f64::NEG_INFINITY {
                    continue;
                }
                acc = log_add(acc, log_binom_pmf(lf, r, take, q) + rest);
            }
            *gr = acc;
        }
        f = g;
    }
    f[m]
}

/// Fraction of trials in which a fresh book of `⌈2^{n·rh1}⌉` compression
/// codewords, drawn from `p(ŷ1|x1)`, contains one that is typical with a
/// freshly drawn `(x1, y1)`.
///
/// Books within [`SYMBOL_CAP`] are drawn and searched codeword by
/// codeword. Larger books use the exact success probability
/// `1 − (1 − q)^M`, where `q` is the probability that a single codeword
/// lands in the typical window; `q` factorizes over the `(x1, y1)` cells
/// into multinomial box probabilities. Each trial then draws one
/// Bernoulli with that probability.
pub fn covering_experiment(
    channel: &NetworkChannel,
    law: &T1Law,
    rh1: f64,
    n: usize,
    trials: usize,
    seed: u64,
    eps: f64,
) -> Result<CoveringResult> {
    TypicalityParams::new(eps)?;
    if n == 0 || trials == 0 {
        return Err(Error::Config("n and trials must be >= 1".into()));
    }
    if !(rh1.is_finite() && rh1 >= 0.0) {
        return Err(Error::Config(format!("rate must be finite and nonnegative, got {rh1}")));
    }
    let j = assemble_joint_t1(channel, law)?;
    let typer = Typer::new(&j, &[Var::X1, Var::Y1, Var::Yh1], eps)?;
    let p_x1 = marginal_kernel(&j, Var::X1)?;
    let p_y1 = Kernel::new(&j.conditional(VarSet::of(&[Var::Y1]), VarSet::of(&[Var::X1]))?)?;
    let yh_cond = j.conditional(VarSet::of(&[Var::Yh1]), VarSet::of(&[Var::X1]))?;
    let p_yh = Kernel::new(&yh_cond)?;
    let sizes = channel.sizes();
    let (nx1, ny1) = (sizes.get(Var::X1), sizes.get(Var::Y1));
    let nyh = yh_cond.target_len();

    let e = (n as f64 * rh1 * 1e9).round() / 1e9;
    let explicit = e <= 62.0 && {
        let m = e.exp2().ceil();
        m <= CODEWORD_CAP as f64 && m * n as f64 <= SYMBOL_CAP as f64
    };
    // log2 M; above 2^52 the ceiling is immaterial
    let book_log2 = if e <= 52.0 { e.exp2().ceil().log2() } else { e };
    let lf = log_factorials(n);
    let m_books = if explicit { e.exp2().ceil() as u64 } else { 0 };

    let outcomes: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let x1: Vec<u8> = (0..n).map(|_| p_x1.draw(&mut rng, 0)).collect();
            let y1: Vec<u8> = x1.iter().map(|&a| p_y1.draw(&mut rng, a as usize)).collect();
            if explicit {
                let base = typer.base(&[Some(&x1), Some(&y1), None], n);
                let mut cw = vec![0u8; n];
                let mut buf = Vec::new();
                (0..m_books).any(|_| {
                    for (c, &a) in cw.iter_mut().zip(&x1) {
                        *c = p_yh.draw(&mut rng, a as usize);
                    }
                    typer.check_with(&base, &[(2, &cw)], &mut buf)
                })
            } else {
                let mut counts = vec![0usize; nx1 * ny1];
                for (&a, &b) in x1.iter().zip(&y1) {
                    counts[a as usize * ny1 + b as usize] += 1;
                }
                let mut log_q = 0.0;
                for a in 0..nx1 {
                    let probs = yh_cond.slice(a);
                    for b in 0..ny1 {
                        let cell = (a * ny1 + b) * nyh;
                        let (mut lo, mut hi) = (vec![0; nyh], vec![0; nyh]);
                        for c in 0..nyh {
                            let p = typer.probs[cell + c];
                            let slack = eps * p + 1e-12;
                            lo[c] = ((p - slack) * n as f64).ceil().max(0.0) as usize;
                            hi[c] = (((p + slack) * n as f64).floor() as usize).min(n);
                        }
                        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                            log_q = f64::NEG_INFINITY;
                        } else {
                            log_q += log_multinomial_box(&lf, counts[a * ny1 + b], probs, &lo, &hi);
                        }
                    }
                }
                // 1 − (1 − q)^M with M = 2^{book_log2}
                let success = if log_q == f64::NEG_INFINITY {
                    0.0
                } else {
                    let ln_miss = (-log_q.exp()).ln_1p();
                    let ln_m = book_log2 * std::f64::consts::LN_2;
                    let exponent = if ln_miss == 0.0 {
                        // q below f64 resolution of 1 - q
                        -(log_q + ln_m).exp()
                    } else {
                        -(ln_m + (-ln_miss).ln()).exp()
                    };
                    -exponent.exp_m1()
                };
                rng.random::<f64>() < success
            }
        })
        .collect();
    let successes = outcomes.iter().filter(|&&s| s).count();
    Ok(CoveringResult {
        rh1,
        n,
        epsilon: eps,
        book_log2,
        trials,
        successes,
        success_fraction: successes as f64 / trials as f64,
        method: if explicit { CoveringMethod::Explicit } else { CoveringMethod::TypeClass },
    })
}

/// One covering experiment per rate in `rates`, all with the same seed so
/// the per-trial `(x1, y1)` draws are paired across points.
pub fn covering_sweep(
    channel: &NetworkChannel,
    law: &T1Law,
    rates: &[f64],
    n: usize,
    trials: usize,
    seed: u64,
    eps: f64,
) -> Result<Vec<CoveringResult>> {
    rates
        .iter()
        .map(|&r| covering_experiment(channel, law, r, n, trials, seed, eps))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::InfoEval;
    use crate::network::BscLinks;
    use crate::pmf::Alphabet;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    /// Relay 1 sees X0 through a BSC(0.1) and quantizes through a BSC(0.2).
    fn quantizer_setup() -> (NetworkChannel, T1Law, f64) {
        let ch = NetworkChannel::binary_symmetric_links(BscLinks::uniform(0.1)).unwrap();
        let law = T1Law::binary_quantizers(ch.sizes(), 0.2).unwrap();
        let j = assemble_joint_t1(&ch, &law).unwrap();
        let i = InfoEval::new(&j).mi_str("I(Yh1;Y1|X1)").unwrap();
        (ch, law, i)
    }

    /// Noiseless direct link, deterministic relay inputs, uniform `X0`.
    fn noiseless() -> (NetworkChannel, T1Law) {
        let ch = NetworkChannel::identity_direct();
        let s = ch.sizes();
        let law = T1Law::new(
            JointPmf::point(Var::X1, 2, 0).unwrap(),
            JointPmf::point(Var::X2, 2, 0).unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::X0]), s.alphabets(&[Var::X1, Var::X2])).unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::Yh1]), s.alphabets(&[Var::X1, Var::Y1])).unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::Yh2]), s.alphabets(&[Var::X2, Var::Y2])).unwrap(),
        )
        .unwrap();
        (ch, law)
    }

    fn cfg(n: usize, rates: SimRates, trials: usize) -> SimConfig {
        SimConfig {
            n,
            blocks: 3,
            rates,
            typicality: TypicalityParams::new(0.2).unwrap(),
            trials,
            seed: 0,
        }
    }

    const ZERO: SimRates = SimRates {
        rbar: 0.0,
        rh1: 0.0,
        rh2: 0.0,
        rs1: 0.0,
        rs2: 0.0,
    };

    fn uniform_bit() -> JointPmf {
        JointPmf::over(Var::X0, vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn constant_sequence_is_not_typical_for_a_fair_bit() {
        let s = vec![0usize; 100];
        assert!(!typical(&[(Var::X0, &s)], &uniform_bit(), 0.1).unwrap());
    }

    #[test]
    fn point_mass_accepts_its_own_sequence() {
        let j = JointPmf::point(Var::X0, 3, 2).unwrap();
        let s = vec![2usize; 37];
        for eps in [1e-9, 0.1, 0.99] {
            assert!(typical(&[(Var::X0, &s)], &j, eps).unwrap());
        }
        let mut bad = s.clone();
        bad[5] = 1;
        assert!(!typical(&[(Var::X0, &bad)], &j, 0.99).unwrap());
    }

    #[test]
    fn large_epsilon_accepts_anything_inside_the_support() {
        let j = JointPmf::over(Var::X0, vec![0.25, 0.75, 0.0]).unwrap();
        let s: Vec<usize> = (0..50).map(|i| (i % 7 == 0) as usize).collect();
        assert!(typical(&[(Var::X0, &s)], &j, 1e6).unwrap());
        let mut out = s.clone();
        out[0] = 2;
        assert!(!typical(&[(Var::X0, &out)], &j, 1e6).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let (ch, law) = noiseless();
        let j = assemble_joint_t1(&ch, &law).unwrap();
        let a = vec![0usize; 10];
        let b = vec![0usize; 9];
        assert!(matches!(
            typical(&[(Var::X0, &a), (Var::Y0, &b)], &j, 0.1),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn iid_sequences_are_typical_with_high_probability() {
        let j = JointPmf::new(
            vec![Alphabet::new(Var::X0, 2), Alphabet::new(Var::Y0, 2)],
            vec![0.3, 0.2, 0.2, 0.3],
        )
        .unwrap();
        let draw = WeightedIndex::new(j.mass().iter().copied()).unwrap();
        let n = 10_000;
        let mut hits = 0;
        for t in 0..100 {
            let mut rng = rng_for(7, t);
            let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let c = draw.sample(&mut rng);
                x.push(c / 2);
                y.push(c % 2);
            }
            hits += typical(&[(Var::X0, &x), (Var::Y0, &y)], &j, 0.1).unwrap() as usize;
        }
        assert!(hits >= 99, "{hits}");
    }

    #[test]
    fn typer_orders_variables_as_requested() {
        let j = JointPmf::new(
            vec![Alphabet::new(Var::X0, 2), Alphabet::new(Var::X1, 3)],
            vec![0.1, 0.2, 0.3, 0.05, 0.15, 0.2],
        )
        .unwrap();
        let t = Typer::new(&j, &[Var::X1, Var::X0], 0.1).unwrap();
        // (x1, x0) row-major
        assert_eq!(t.probs, vec![0.1, 0.05, 0.2, 0.15, 0.3, 0.2]);
    }

    #[test]
    fn book_sizes_round_up() {
        assert_eq!(book_size(100, 0.0).unwrap(), 1);
        assert_eq!(book_size(1000, 0.01).unwrap(), 1024);
        assert_eq!(book_size(10, 0.15).unwrap(), 3);
        assert!(matches!(book_size(1000, 0.5), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn zero_bin_rate_gives_a_single_relay_codeword() {
        let (ch, law) = noiseless();
        let (cb, bins) = build(&ch, &law, &cfg(20, ZERO, 1), 0).unwrap();
        assert_eq!(cb.x1.len(), 1);
        assert_eq!(cb.x0.len(), 1);
        assert_eq!(bins.bin1, vec![0]);
    }

    #[test]
    fn books_are_deterministic_per_seed_and_trial() {
        let (ch, law, _) = quantizer_setup();
        let r = SimRates { rbar: 0.2, rh1: 0.3, rh2: 0.3, rs1: 0.2, rs2: 0.1 };
        let c = cfg(20, r, 1);
        let a = build(&ch, &law, &c, 3).unwrap();
        assert_eq!(a, build(&ch, &law, &c, 3).unwrap());
        assert_ne!(a.0, build(&ch, &law, &c, 4).unwrap().0);
        assert_eq!(a.0.yh1.len(), (a.0.sizes.s1 * a.0.sizes.z1) as usize);
        assert!(a.1.bin1.iter().all(|&b| (b as u64) < a.0.sizes.s1));
    }

    #[test]
    fn relay_codeword_frequencies_match_the_input_law() {
        let (ch, _, _) = quantizer_setup();
        let s = ch.sizes();
        let p1 = 0.3;
        let law = T1Law::new(
            JointPmf::over(Var::X1, vec![1.0 - p1, p1]).unwrap(),
            JointPmf::uniform(s.alphabets(&[Var::X2])).unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::X0]), s.alphabets(&[Var::X1, Var::X2])).unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::Yh1]), s.alphabets(&[Var::X1, Var::Y1])).unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::Yh2]), s.alphabets(&[Var::X2, Var::Y2])).unwrap(),
        )
        .unwrap();
        let r = SimRates { rs1: 0.1, ..ZERO };
        let (cb, _) = build(&ch, &law, &cfg(100, r, 1), 0).unwrap();
        let total = cb.x1.data.len() as f64;
        assert!(total >= 1e4 - 1.0, "{total}");
        let ones = cb.x1.data.iter().filter(|&&x| x == 1).count() as f64;
        let sigma = (total * p1 * (1.0 - p1)).sqrt();
        assert!((ones - total * p1).abs() <= 3.0 * sigma, "{ones} vs {}", total * p1);
    }

    #[test]
    fn codeword_cap_is_enforced() {
        let (ch, law) = noiseless();
        let r = SimRates { rbar: 0.25, ..ZERO };
        assert!(matches!(build(&ch, &law, &cfg(100, r, 1), 0), Err(Error::CapExceeded(_))));
        let bad = SimConfig { blocks: 1, ..cfg(10, ZERO, 1) };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn noiseless_zero_rate_run_has_no_errors() {
        let (ch, law) = noiseless();
        let st = run_cf(&ch, &law, &cfg(1000, ZERO, 50)).unwrap();
        assert_eq!(st.first_errors, [0; 7]);
        assert_eq!(st.message_errors, 0);
        assert_eq!(st.blocks_decoded, 100);
    }

    #[test]
    fn stage_counts_are_bounded_and_reproducible() {
        let (ch, law, _) = quantizer_setup();
        let r = SimRates { rbar: 0.1, rh1: 0.2, rh2: 0.2, rs1: 0.1, rs2: 0.1 };
        let c = SimConfig { blocks: 4, ..cfg(40, r, 6) };
        let a = run_cf(&ch, &law, &c).unwrap();
        assert_eq!(a.blocks_decoded, 18);
        assert!(a.first_errors.iter().sum::<u64>() <= a.blocks_decoded);
        assert!(a.message_errors <= a.blocks_decoded);
        assert_eq!(a, run_cf(&ch, &law, &c).unwrap());
        let row = a.csv_row();
        assert_eq!(row.split(',').count(), SimStats::csv_header().split(',').count());
        assert_eq!(a.to_json()["format_version"], 1);
    }

    #[test]
    fn multinomial_box_matches_enumeration() {
        let lf = log_factorials(12);
        let probs = [0.2, 0.5, 0.3];
        let (lo, hi) = ([1, 2, 0], [3, 6, 4]);
        for m in 0..=12usize {
            let mut want = 0.0;
            for a in 0..=m {
                for b in 0..=m - a {
                    let c = m - a - b;
                    let k = [a, b, c];
                    if (0..3).all(|i| k[i] >= lo[i] && k[i] <= hi[i]) {
                        let lc = lf[m] - lf[a] - lf[b] - lf[c];
                        want += (lc + a as f64 * 0.2f64.ln() + b as f64 * 0.5f64.ln() + c as f64 * 0.3f64.ln()).exp();
                    }
                }
            }
            let got = log_multinomial_box(&lf, m, &probs, &lo, &hi).exp();
            assert!((got - want).abs() < 1e-12, "m={m}: {got} vs {want}");
        }
    }

    #[test]
    fn saturated_book_covers_whenever_a_typical_codeword_exists() {
        // (X1, Y1, Yh1) uniform on 8 cells; a book of 2^19 codewords over
        // the 2^16 possible sequences misses a given one w.p. ~e^-8
        let ch = NetworkChannel::binary_symmetric_links(BscLinks::uniform(0.5)).unwrap();
        let law = T1Law::binary_quantizers(ch.sizes(), 0.5).unwrap();
        let (n, trials, eps) = (16, 30, 0.5);
        let r = covering_experiment(&ch, &law, 19.0 / 16.0, n, trials, 2, eps).unwrap();
        assert_eq!(r.method, CoveringMethod::Explicit);
        let j = assemble_joint_t1(&ch, &law).unwrap();
        let typer = Typer::new(&j, &[Var::X1, Var::Y1, Var::Yh1], eps).unwrap();
        let p_x1 = marginal_kernel(&j, Var::X1).unwrap();
        let p_y1 = Kernel::new(&j.conditional(VarSet::of(&[Var::Y1]), VarSet::of(&[Var::X1])).unwrap()).unwrap();
        let mut coverable = 0;
        for t in 0..trials as u64 {
            let mut rng = rng_for(2, t);
            let x1: Vec<u8> = (0..n).map(|_| p_x1.draw(&mut rng, 0)).collect();
            let y1: Vec<u8> = x1.iter().map(|&a| p_y1.draw(&mut rng, a as usize)).collect();
            let base = typer.base(&[Some(&x1), Some(&y1), None], n);
            let mut buf = Vec::new();
            coverable += (0..1u32 << n).any(|bits| {
                let c: Vec<u8> = (0..n).map(|i| ((bits >> i) & 1) as u8).collect();
                typer.check_with(&base, &[(2, &c)], &mut buf)
            }) as usize;
        }
        assert!(coverable > 0);
        assert_eq!(r.successes, coverable, "{r:?}");
    }

    #[test]
    fn type_class_probability_agrees_with_explicit_search() {
        let (ch, law, _) = quantizer_setup();
        let n = 24;
        let trials = 400;
        let explicit = covering_experiment(&ch, &law, 0.3, n, trials, 1, 0.3).unwrap();
        assert_eq!(explicit.method, CoveringMethod::Explicit);
        // force the analytic path on the same draws of (x1, y1)
        let j = assemble_joint_t1(&ch, &law).unwrap();
        let typer = Typer::new(&j, &[Var::X1, Var::Y1, Var::Yh1], 0.3).unwrap();
        let yh = j.conditional(VarSet::of(&[Var::Yh1]), VarSet::of(&[Var::X1])).unwrap();
        let lf = log_factorials(n);
        let p_x1 = marginal_kernel(&j, Var::X1).unwrap();
        let p_y1 = Kernel::new(&j.conditional(VarSet::of(&[Var::Y1]), VarSet::of(&[Var::X1])).unwrap()).unwrap();
        let m = explicit.book_log2.exp2();
        let mut expected = 0.0;
        for t in 0..trials as u64 {
            let mut rng = rng_for(1, t);
            let x1: Vec<u8> = (0..n).map(|_| p_x1.draw(&mut rng, 0)).collect();
            let y1: Vec<u8> = x1.iter().map(|&a| p_y1.draw(&mut rng, a as usize)).collect();
            let mut log_q = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let cnt = x1.iter().zip(&y1).filter(|&(&u, &v)| u as usize == a && v as usize == b).count();
                    let cell = (a * 2 + b) * 2;
                    let (mut lo, mut hi) = ([0; 2], [0; 2]);
                    for c in 0..2 {
                        let p = typer.probs[cell + c];
                        let s = 0.3 * p + 1e-12;
                        lo[c] = ((p - s) * n as f64).ceil().max(0.0) as usize;
                        hi[c] = (((p + s) * n as f64).floor() as usize).min(n);
                    }
                    log_q += log_multinomial_box(&lf, cnt, yh.slice(a), &lo, &hi);
                }
            }
            expected += 1.0 - (1.0 - log_q.exp()).powf(m);
        }
        let p = expected / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt().max(1e-3);
        assert!(
            (explicit.success_fraction - p).abs() <= 4.0 * sigma,
            "explicit {} vs analytic {p}",
            explicit.success_fraction
        );
    }

    #[test]
    fn covering_threshold_at_block_length_1000() {
        let (ch, law, i) = quantizer_setup();
        assert!((i - (1.0 - h2(0.2))).abs() < 1e-9);
        let above = covering_experiment(&ch, &law, i + 0.1, 1000, 200, 0, 0.2).unwrap();
        let below = covering_experiment(&ch, &law, i - 0.1, 1000, 200, 0, 0.2).unwrap();
        assert_eq!(above.method, CoveringMethod::TypeClass);
        assert!(above.success_fraction >= 0.95, "{above:?}");
        assert!(below.success_fraction <= 0.5, "{below:?}");
    }

    #[test]
    fn covering_success_grows_with_rate() {
        let (ch, law, i) = quantizer_setup();
        let rates: Vec<f64> = (0..7).map(|k| i - 0.15 + 0.05 * k as f64).collect();
        let pts = covering_sweep(&ch, &law, &rates, 400, 200, 5, 0.2).unwrap();
        for w in pts.windows(2) {
            let p = w[0].success_fraction.max(w[1].success_fraction);
            let sigma = (p * (1.0 - p) / 200.0).sqrt();
            assert!(w[1].success_fraction >= w[0].success_fraction - 3.0 * sigma, "{pts:?}");
        }
        assert!(pts[0].success_fraction < pts[6].success_fraction);
    }
}
