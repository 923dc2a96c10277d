use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use relaynet::error::Error;
use relaynet::fm::{eliminate_all, numeric_equiv, prune, random_bindings, Builtin, RateSystem};
use relaynet::io::{law_to_json, parse_channel, parse_law, Law};
use relaynet::network::{NetworkChannel, T1Law};
use relaynet::optimize::{optimize, SearchConfig, SearchMode};
use relaynet::rate_region::{embed_t1_in_t2, DfMode, Theorem, Units, FORMAT_VERSION};
use relaynet::sim::{covering_sweep, run_cf, CoveringResult, SimConfig, SimRates, SimStats, TypicalityParams};

#[derive(Parser)]
#[command(name = "relaynet", version, about = "Achievable rates for the two-relay network with feedback")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one law on one channel.
    Eval(EvalArgs),
    /// Search the input-law family for the best achievable rate.
    Optimize(OptArgs),
    /// Fourier–Motzkin elimination on a rate system.
    Fm(FmArgs),
    /// Monte Carlo of the compress-and-forward scheme.
    Sim(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    T1,
    T2,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::T1 => Theorem::T1,
            TheoremArg::T2 => Theorem::T2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DfArg {
    Optimize,
    Zero,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Grid,
    RandomRestart,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    law: PathBuf,
    /// Defaults to the law's family; `t2` on a t1 law uses the embedding.
    #[arg(long, value_enum)]
    theorem: Option<TheoremArg>,
    /// How decode-and-forward rates are chosen (t2 only).
    #[arg(long, value_enum, default_value = "optimize")]
    df: DfArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    nats: bool,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, value_enum)]
    theorem: TheoremArg,
    #[arg(long, value_enum, default_value = "grid")]
    mode: ModeArg,
    /// Grid resolution (simplex steps per slice).
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Random starts besides the uniform law.
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the best law as a law file.
    #[arg(long)]
    law_out: Option<PathBuf>,
    #[arg(long)]
    nats: bool,
}

#[derive(Args)]
struct FmArgs {
    /// t1, t2, t1-reduced, t2-reduced, or a system file.
    system: String,
    /// Variables to eliminate (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    eliminate: Vec<String>,
    /// Eliminate the builtin system's auxiliary rates.
    #[arg(long)]
    eliminate_aux: bool,
    /// Builtin name or system file to compare against numerically.
    #[arg(long)]
    check_against: Option<String>,
    #[arg(long, default_value_t = 30)]
    bindings: usize,
    #[arg(long, default_value = "RBAR")]
    objective: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the resulting system (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report of the elimination and the check.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    channel: PathBuf,
    /// A t1 law file.
    #[arg(long)]
    law: PathBuf,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    blocks: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    rbar: f64,
    #[arg(long, default_value_t = 0.0)]
    rh1: f64,
    #[arg(long, default_value_t = 0.0)]
    rh2: f64,
    #[arg(long, default_value_t = 0.0)]
    rs1: f64,
    #[arg(long, default_value_t = 0.0)]
    rs2: f64,
    /// Covering sweep instead of a full run, e.g. `--sweep rh1 0.1:0.5:0.05`.
    #[arg(long, num_args = 2, value_names = ["VAR", "A:B:STEP"])]
    sweep: Option<Vec<String>>,
    /// JSON stats (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV stats: one row per run, or one per sweep point.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Failure with its exit code: 2 validation, 3 resource cap, 4 internal.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded(_) => 3,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Res<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load_channel(p: &Path) -> Res<NetworkChannel> {
    parse_channel(&read(p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))
}

fn load_law(p: &Path) -> Res<Law> {
    parse_law(&read(p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))
}

fn seed_or_default(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("note: no --seed given, using seed 0");
        0
    })
}

fn units(nats: bool) -> Units {
    if nats {
        Units::Nats
    } else {
        Units::Bits
    }
}

fn cmd_eval(a: EvalArgs) -> Res<()> {
    let ch = load_channel(&a.channel)?;
    let law = load_law(&a.law)?;
    let want = a.theorem.map(Theorem::from).unwrap_or(law.theorem());
    let law = match (want, law) {
        (Theorem::T2, Law::T1(l)) => Law::T2(embed_t1_in_t2(&l)?),
        (Theorem::T1, Law::T2(_)) => return Err(invalid("a t2 law cannot be evaluated under t1")),
        (_, l) => l,
    };
    let mode = match a.df {
        DfArg::Optimize => DfMode::Optimize,
        DfArg::Zero => DfMode::Zero,
    };
    let report = law.evaluate(&ch, mode)?;
    emit(a.out.as_deref(), &json_text(&report.to_json(units(a.nats))))
}

fn cmd_optimize(a: OptArgs) -> Res<()> {
    let ch = load_channel(&a.channel)?;
    let cfg = SearchConfig {
        mode: match a.mode {
            ModeArg::Grid => SearchMode::Grid,
            ModeArg::RandomRestart => SearchMode::RandomRestart,
        },
        resolution: a.grid,
        restarts: a.restarts,
        max_iters: a.max_iters,
        seed: seed_or_default(a.seed),
        tol: a.tol,
    };
    let res = optimize(&ch, a.theorem.into(), &cfg)?;
    let u = units(a.nats);
    emit(a.out.as_deref(), &json_text(&res.to_json(u)))?;
    if let Some(p) = &a.law_out {
        write(p, &format!("{}\n", law_to_json(&res.best)))?;
    }
    eprintln!(
        "{}: best {:.6} {} ({}) after {} evaluations",
        res.theorem.tag(),
        res.report.objective * u.scale(),
        u.name(),
        if res.report.feasible { "feasible" } else { "infeasible everywhere" },
        res.evaluations
    );
    Ok(())
}

/// A builtin by name, otherwise a system file.
fn load_system(spec: &str) -> Res<(RateSystem, Option<Builtin>)> {
    match spec.parse::<Builtin>() {
        Ok(b) => Ok((b.system(), Some(b))),
        Err(_) => {
            let text = read(Path::new(spec))?;
            let sys = text.parse::<RateSystem>().map_err(|e| invalid(format!("{spec}: {e}")))?;
            Ok((sys, None))
        }
    }
}

fn cmd_fm(a: FmArgs) -> Res<()> {
    let (sys, builtin) = load_system(&a.system)?;
    let mut vars = a.eliminate.clone();
    if a.eliminate_aux {
        let b = builtin.ok_or_else(|| invalid("--eliminate-aux needs a builtin system"))?;
        vars.extend(b.auxiliary_vars().iter().map(|s| s.to_string()));
    }
    let (result, order) = if vars.is_empty() {
        (prune(&sys), Vec::new())
    } else {
        eliminate_all(&sys, &vars)?
    };
    let text = result.to_string();
    emit(a.out.as_deref(), &text)?;

    let mut report = json!({
        "format_version": FORMAT_VERSION,
        "input": a.system,
        "eliminated": order,
        "system": text,
    });
    if let Some(other) = &a.check_against {
        let seed = seed_or_default(a.seed);
        let (target, _) = load_system(other)?;
        let syms = result.symbols().union(&target.symbols()).cloned().collect();
        let binds = random_bindings(&syms, a.bindings, seed)?;
        let eq = numeric_equiv(&result, &target, &binds, &a.objective)?;
        let agree = eq.bindings.iter().filter(|b| b.agree).count();
        println!("verdict: {} ({agree}/{} bindings agree)", eq.verdict(), eq.bindings.len());
        report["check_against"] = json!(other);
        report["seed"] = json!(seed);
        report["verdict"] = json!(eq.verdict());
        report["equivalence"] = serde_json::to_value(&eq).expect("serializable");
    }
    if let Some(p) = &a.report {
        write(p, &json_text(&report))?;
    }
    Ok(())
}

/// `a:b:step`, inclusive of `b` up to rounding.
fn parse_range(s: &str) -> Res<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("bad range `{s}`, expected a:b:step")))?;
    let [a, b, step] = parts[..] else {
        return Err(invalid(format!("bad range `{s}`, expected a:b:step")));
    };
    if !(a.is_finite() && b.is_finite() && step.is_finite() && step > 0.0 && b >= a) {
        return Err(invalid(format!("bad range `{s}`: need a <= b and step > 0")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(invalid(format!("range `{s}` has {count} points (max 10000)")));
    }
    Ok((0..count).map(|k| a + k as f64 * step).collect())
}

fn cmd_sim(a: SimArgs) -> Res<()> {
    let ch = load_channel(&a.channel)?;
    let law: T1Law = match load_law(&a.law)? {
        Law::T1(l) => l,
        Law::T2(_) => return Err(invalid("the simulation needs a t1 law")),
    };
    let seed = seed_or_default(a.seed);
    if let Some(sw) = &a.sweep {
        if !sw[0].eq_ignore_ascii_case("rh1") {
            return Err(invalid(format!("only rh1 can be swept, got `{}`", sw[0])));
        }
        let rates = parse_range(&sw[1])?;
        let pts = covering_sweep(&ch, &law, &rates, a.n, a.trials, seed, a.eps)?;
        let mut csv = format!("{}\n", CoveringResult::csv_header());
        for p in &pts {
            csv.push_str(&p.csv_row());
            csv.push('\n');
        }
        match &a.csv {
            Some(p) => write(p, &csv)?,
            None if a.out.is_none() => print!("{csv}"),
            None => {}
        }
        if let Some(p) = &a.out {
            let v = json!({ "format_version": FORMAT_VERSION, "sweep": "rh1", "points": pts });
            write(p, &json_text(&v))?;
        }
        return Ok(());
    }
    let cfg = SimConfig {
        n: a.n,
        blocks: a.blocks,
        rates: SimRates {
            rbar: a.rbar,
            rh1: a.rh1,
            rh2: a.rh2,
            rs1: a.rs1,
            rs2: a.rs2,
        },
        typicality: TypicalityParams::new(a.eps)?,
        trials: a.trials,
        seed,
    };
    let stats = run_cf(&ch, &law, &cfg)?;
    emit(a.out.as_deref(), &json_text(&stats.to_json()))?;
    if let Some(p) = &a.csv {
        write(p, &format!("{}\n{}\n", SimStats::csv_header(), stats.csv_row()))?;
    }
    Ok(())
}

fn dispatch(cmd: Cmd) -> Res<()> {
    match cmd {
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Optimize(a) => cmd_optimize(a),
        Cmd::Fm(a) => cmd_fm(a),
        Cmd::Sim(a) => cmd_sim(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = move || {
        std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli.cmd)))
            .unwrap_or_else(|_| Err(Failure { code: 4, msg: "internal error".into() }))
    };
    let result = match cli.jobs {
        Some(0) => Err(invalid("--jobs must be >= 1")),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure { code: 4, msg: e.to_string() }),
        },
        None => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
