//! Search over the factored law families for the largest achievable rate on
//! a fixed channel.
//!
//! Every conditional slice of a law is a point on its own probability
//! simplex. Grid mode runs coordinate ascent over the lattice points
//! `c / r` of each slice, climbing a ladder of resolutions `…, r/4, r/2, r`;
//! random-restart mode runs a derivative-free line search from each start.
//! Both modes start from the uniform law plus `restarts` random laws.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::Law;
use crate::network::{NetworkChannel, T2Law};
use crate::pmf::MAX_JOINT_ENTRIES;
use crate::random::{dirichlet1, rng_for};
use crate::rate_region::{DfMode, RateReport, Theorem, Units, FORMAT_VERSION};

/// Offset that ranks every infeasible law below every feasible one while
/// still letting the search climb inside the infeasible region.
pub const INFEASIBLE_PENALTY: f64 = 1e3;

/// Largest number of lattice points enumerated for a single slice.
pub const GRID_SLICE_CAP: u64 = 200_000;

const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Grid,
    RandomRestart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Simplex steps per slice at the top of the grid ladder.
    pub resolution: usize,
    /// Random starts in addition to the uniform law.
    pub restarts: usize,
    /// Sweeps per grid rung, or line-search sweeps per start.
    pub max_iters: usize,
    pub seed: u64,
    /// A sweep gaining less than this ends the search (bits).
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: SearchMode::Grid,
            resolution: 16,
            restarts: 0,
            max_iters: 50,
            seed: 0,
            tol: 1e-9,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::Config(format!("grid resolution must be >= 2, got {}", self.resolution)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        Ok(())
    }

    /// Resolutions visited by grid mode, coarsest first. Doubling the
    /// resolution appends one rung, so the coarser run is a prefix.
    pub fn ladder(&self) -> Vec<usize> {
        let mut v = Vec::new();
        let mut r = self.resolution;
        while r >= 2 {
            v.push(r);
            r /= 2;
        }
        v.reverse();
        v
    }
}

/// Search key: the objective, pushed down by [`INFEASIBLE_PENALTY`] when
/// the law violates its constraints.
pub fn score(r: &RateReport) -> f64 {
    if r.feasible {
        r.objective
    } else {
        r.objective - INFEASIBLE_PENALTY
    }
}

#[derive(Debug, Clone)]
pub struct OptResult {
    pub theorem: Theorem,
    pub config: SearchConfig,
    pub best: Law,
    /// Fresh evaluation of `best`.
    pub report: RateReport,
    pub evaluations: u64,
    /// Incumbent score after each improvement, in start order.
    pub trace: Vec<f64>,
}

impl OptResult {
    pub fn infeasible_everywhere(&self) -> bool {
        !self.report.feasible
    }

    pub fn to_json(&self, units: Units) -> Value {
        let k = units.scale();
        let mut v = json!({
            "format_version": FORMAT_VERSION,
            "theorem": self.theorem.tag(),
            "units": units.name(),
            "config": self.config,
            "feasible": self.report.feasible,
            "infeasible_everywhere": self.infeasible_everywhere(),
            "evaluations": self.evaluations,
            "trace": self.trace.iter().map(|x| if *x > -INFEASIBLE_PENALTY / 2.0 { x * k } else { *x }).collect::<Vec<_>>(),
            "report": self.report.to_json(units),
            "best_law": self.best.to_doc(),
        });
        v[format!("best_{}", units.name())] = json!(self.report.objective * k);
        v
    }
}

/// Tracks one search path: current slices, their score and the trace.
struct Climb<'a> {
    channel: &'a NetworkChannel,
    template: Law,
    slices: Vec<Vec<f64>>,
    best: f64,
    evals: u64,
    trace: Vec<f64>,
}

impl<'a> Climb<'a> {
    fn new(channel: &'a NetworkChannel, start: Law) -> Result<Self> {
        let slices = start.slices();
        let mut c = Climb {
            channel,
            template: start,
            slices,
            best: f64::NEG_INFINITY,
            evals: 0,
            trace: Vec::new(),
        };
        c.best = c.eval(&c.slices.clone())?;
        c.trace.push(c.best);
        Ok(c)
    }

    fn eval(&mut self, slices: &[Vec<f64>]) -> Result<f64> {
        self.evals += 1;
        let law = self.template.with_slices(slices)?;
        Ok(score(&law.evaluate(self.channel, DfMode::Optimize)?))
    }

    /// Tries `slices[i] = cand`; keeps it on strict improvement.
    fn offer(&mut self, i: usize, cand: Vec<f64>) -> Result<f64> {
        let mut s = self.slices.clone();
        s[i] = cand;
        let v = self.eval(&s)?;
        if v > self.best {
            self.best = v;
            self.slices = s;
            self.trace.push(v);
        }
        Ok(v)
    }

    fn grid_sweeps(&mut self, r: usize, max_iters: usize, tol: f64) -> Result<()> {
        for _ in 0..max_iters {
            let before = self.best;
            for i in 0..self.slices.len() {
                let k = self.slices[i].len();
                if k < 2 {
                    continue;
                }
                for comp in compositions(r, k) {
                    let cand: Vec<f64> = comp.iter().map(|&c| c as f64 / r as f64).collect();
                    if cand != self.slices[i] {
                        self.offer(i, cand)?;
                    }
                }
            }
            if self.best - before < tol {
                break;
            }
        }
        Ok(())
    }

    fn line_sweeps(&mut self, max_iters: usize, tol: f64) -> Result<()> {
        for _ in 0..max_iters {
            let before = self.best;
            for i in 0..self.slices.len() {
                let k = self.slices[i].len();
                for j in 0..k {
                    self.line_search(i, j)?;
                }
            }
            if self.best - before < tol {
                break;
            }
        }
        Ok(())
    }

    /// Golden-section search along `p + t (e_j − p)`, `t ∈ [0, 1]`.
    fn line_search(&mut self, i: usize, j: usize) -> Result<()> {
        let p = self.slices[i].clone();
        if p[j] >= 1.0 {
            return Ok(());
        }
        let at = |t: f64| -> Vec<f64> {
            p.iter()
                .enumerate()
                .map(|(l, &x)| (1.0 - t) * x + if l == j { t } else { 0.0 })
                .collect()
        };
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = self.offer(i, at(c))?;
        let mut fd = self.offer(i, at(d))?;
        for _ in 0..GOLDEN_STEPS {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.offer(i, at(c))?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.offer(i, at(d))?;
            }
        }
        self.offer(i, at(1.0))?;
        Ok(())
    }

    fn law(&self) -> Result<Law> {
        self.template.with_slices(&self.slices)
    }
}

/// All `k`-part compositions of `r` in lexicographic order.
pub fn compositions(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(left - c, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(r, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn check_caps(start: &Law, cfg: &SearchConfig) -> Result<()> {
    let sizes = match start {
        Law::T1(l) => l.sizes()?,
        Law::T2(l) => l.sizes()?,
    };
    let joint: u128 = sizes.0.iter().map(|&n| n as u128).product();
    if joint > MAX_JOINT_ENTRIES as u128 {
        return Err(Error::CapExceeded(format!("joint pmf would have {joint} entries")));
    }
    if cfg.mode == SearchMode::Grid {
        let kmax = start.slices().iter().map(|s| s.len()).max().unwrap_or(1) as u64;
        let r = cfg.resolution as u64;
        let n = binomial(r + kmax - 1, kmax - 1);
        if n > GRID_SLICE_CAP {
            return Err(Error::CapExceeded(format!(
                "grid resolution {r} gives {n} points on a {kmax}-symbol simplex (cap {GRID_SLICE_CAP})"
            )));
        }
    }
    Ok(())
}

/// Improves `law` by line searches over each slice; never returns a law
/// that scores worse than the input.
pub fn local_refine(law: &Law, channel: &NetworkChannel, cfg: &SearchConfig) -> Result<(Law, Vec<f64>)> {
    cfg.validate()?;
    let mut c = Climb::new(channel, law.clone())?;
    c.line_sweeps(cfg.max_iters, cfg.tol)?;
    Ok((c.law()?, c.trace))
}

fn random_start(template: &Law, seed: u64, index: u64) -> Result<Law> {
    let mut rng = rng_for(seed, index);
    let slices: Vec<Vec<f64>> = template
        .slices()
        .iter()
        .map(|s| dirichlet1(&mut rng, s.len()))
        .collect();
    template.with_slices(&slices)
}

struct Run {
    law: Law,
    best: f64,
    evals: u64,
    trace: Vec<f64>,
}

fn search(channel: &NetworkChannel, theorem: Theorem, cfg: &SearchConfig, warm: Vec<Law>) -> Result<OptResult> {
    cfg.validate()?;
    let uniform = Law::uniform(theorem, channel.sizes())?;
    check_caps(&uniform, cfg)?;
    for w in &warm {
        if w.slices().iter().map(Vec::len).ne(uniform.slices().iter().map(Vec::len)) {
            return Err(Error::Config("warm start does not match the channel's law shape".into()));
        }
    }
    let n_warm = warm.len();
    let ladder = cfg.ladder();
    let runs: Vec<Run> = (0..n_warm + 1 + cfg.restarts)
        .into_par_iter()
        .map(|idx| {
            let start = if idx < n_warm {
                warm[idx].clone()
            } else if idx == n_warm {
                uniform.clone()
            } else {
                random_start(&uniform, cfg.seed, (idx - n_warm - 1) as u64)?
            };
            let mut c = Climb::new(channel, start)?;
            match cfg.mode {
                SearchMode::Grid => {
                    for &r in &ladder {
                        c.grid_sweeps(r, cfg.max_iters, cfg.tol)?;
                    }
                }
                SearchMode::RandomRestart => c.line_sweeps(cfg.max_iters, cfg.tol)?,
            }
            Ok(Run {
                law: c.law()?,
                best: c.best,
                evals: c.evals,
                trace: c.trace,
            })
        })
        .collect::<Result<_>>()?;

    let mut winner = 0;
    let mut trace: Vec<f64> = Vec::new();
    let mut evaluations = 0;
    for (i, run) in runs.iter().enumerate() {
        evaluations += run.evals;
        if run.best > runs[winner].best {
            winner = i;
        }
        for &x in &run.trace {
            if trace.last().is_none_or(|&t| x > t) {
                trace.push(x);
            }
        }
    }
    let best = runs[winner].law.clone();
    let report = best.evaluate(channel, DfMode::Optimize)?;
    Ok(OptResult {
        theorem,
        config: *cfg,
        best,
        report,
        evaluations,
        trace,
    })
}

/// Best compress-and-forward rate found on `channel`.
pub fn optimize_t1(channel: &NetworkChannel, cfg: &SearchConfig) -> Result<OptResult> {
    search(channel, Theorem::T1, cfg, Vec::new())
}

/// Best combined-scheme rate found on `channel`.
pub fn optimize_t2(channel: &NetworkChannel, cfg: &SearchConfig) -> Result<OptResult> {
    search(channel, Theorem::T2, cfg, Vec::new())
}

/// As [`optimize_t2`], with extra starting laws searched before the
/// uniform one (for example embedded compress-and-forward optima).
pub fn optimize_t2_from(channel: &NetworkChannel, cfg: &SearchConfig, warm: &[T2Law]) -> Result<OptResult> {
    search(channel, Theorem::T2, cfg, warm.iter().cloned().map(Law::T2).collect())
}

pub fn optimize(channel: &NetworkChannel, theorem: Theorem, cfg: &SearchConfig) -> Result<OptResult> {
    search(channel, theorem, cfg, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Sizes, T1Law};
    use crate::var::Var;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4, 2).len(), 5);
        assert_eq!(compositions(3, 3).len(), binomial(5, 2) as usize);
        assert!(compositions(5, 3).iter().all(|c| c.iter().sum::<usize>() == 5));
    }

    #[test]
    fn ladder_nests_under_doubling() {
        let a = SearchConfig { resolution: 16, ..Default::default() }.ladder();
        let b = SearchConfig { resolution: 32, ..Default::default() }.ladder();
        assert_eq!(a, vec![2, 4, 8, 16]);
        assert_eq!(&b[..4], a.as_slice());
    }

    #[test]
    fn all_noise_is_zero() {
        let ch = NetworkChannel::all_noise();
        let cfg = SearchConfig { resolution: 2, max_iters: 2, ..Default::default() };
        assert_eq!(optimize_t1(&ch, &cfg).unwrap().report.objective, 0.0);
        assert_eq!(optimize_t2(&ch, &cfg).unwrap().report.objective, 0.0);
    }

    #[test]
    fn identity_direct_link_reaches_one_bit() {
        let ch = NetworkChannel::identity_direct();
        let r = optimize_t1(&ch, &SearchConfig { resolution: 32, ..Default::default() }).unwrap();
        assert!(r.report.feasible);
        assert!(r.report.objective >= 0.98, "{}", r.report.objective);
        assert!(r.trace.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn refine_finds_bsc_capacity_input() {
        // Only X0 and Y0 are non-trivial: Y0 = X0 through BSC(0.11).
        let sizes = Sizes([2, 1, 1, 1, 1, 2, 1, 1, 1, 1]);
        let ch = NetworkChannel::from_fn(sizes, |x, y| if x[0] == y[0] { 0.89 } else { 0.11 }).unwrap();
        let start = T1Law::uniform(sizes).unwrap();
        let vertex = start.p_x0.with_slice(0, &[1.0, 0.0]).unwrap();
        let law = Law::T1(T1Law { p_x0: vertex, ..start });
        let cfg = SearchConfig { mode: SearchMode::RandomRestart, max_iters: 5, ..Default::default() };
        let (out, trace) = local_refine(&law, &ch, &cfg).unwrap();
        let Law::T1(out) = out else { panic!() };
        assert!((out.p_x0.slice(0)[0] - 0.5).abs() < 1e-3);
        assert!(trace.windows(2).all(|w| w[0] <= w[1]));
        let r = Law::T1(out).evaluate(&ch, DfMode::Optimize).unwrap();
        assert!((r.objective - (1.0 - h2(0.11))).abs() < 1e-6);
    }

    #[test]
    fn deterministic_and_budget_monotone() {
        let ch = crate::random::random_channel(&mut rng_for(9, 0), Sizes::binary()).unwrap();
        let cfg = SearchConfig { resolution: 4, restarts: 2, max_iters: 3, seed: 1, ..Default::default() };
        let a = optimize_t1(&ch, &cfg).unwrap();
        let b = optimize_t1(&ch, &cfg).unwrap();
        assert_eq!(a.to_json(Units::Bits), b.to_json(Units::Bits));
        let more = optimize_t1(&ch, &SearchConfig { restarts: 4, ..cfg }).unwrap();
        assert!(score(&more.report) >= score(&a.report));
    }

    #[test]
    fn grid_cap_reported_before_work() {
        let ch = NetworkChannel::all_noise().with_aux(Var::Yh1, 8).unwrap();
        let cfg = SearchConfig { resolution: 64, ..Default::default() };
        assert!(matches!(optimize_t1(&ch, &cfg), Err(Error::CapExceeded(_))));
    }
}
