//! `altsim`: compute and check (fair) simulation and alternating simulation
//! between system files, export the underlying games, generate random
//! systems and benchmark the three computation routes.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altsim_core::exec::Exec;
use altsim_core::random::{derive_seed, random_fair_ats, random_fair_ts, RandomSpec};
use altsim_core::reductions::Game;
use altsim_core::relations::{
    altsim, altsim_game_detail, altsim_iterative, fairaltsim_detail, fairsim_detail, Algo, IterOptions,
};
use altsim_core::succ_index::SuccIndex;
use altsim_core::sweep::{report_row, run_batch, REPORT_HEADER};
use altsim_core::systems::{index_names, Ats};
use altsim_core::{parse_system, write_system, Error, SimRelation, System};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "altsim", version, about = "Alternating and fair simulation between transition systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the maximal relation and write it as a relation file.
    Compute {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        route: Route,
        /// Write the relation here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the successor-set index of both systems as comments.
        #[arg(long)]
        dump_succ: bool,
    },
    /// Exit 0 if the initial states are related, 1 if not.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        route: Route,
    },
    /// Write the game arena in Graphviz format.
    ExportDot {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random system file.
    GenRandom {
        #[arg(long, default_value_t = 4)]
        states: usize,
        /// Agent-1 actions; for `--ts`, the largest out-degree.
        #[arg(long, default_value_t = 2)]
        actions1: usize,
        #[arg(long, default_value_t = 2)]
        actions2: usize,
        #[arg(long, default_value_t = 2)]
        obs: usize,
        /// Probability of a state being fair; without it no `fair` line is written.
        #[arg(long)]
        fair_density: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generate a transition system instead of an ATS.
        #[arg(long)]
        ts: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run all routes on random instances and print a tab-separated report.
    Bench {
        #[arg(long, default_value_t = 2)]
        min_states: usize,
        #[arg(long, default_value_t = 6)]
        max_states: usize,
        #[arg(long, default_value_t = 2)]
        actions1: usize,
        #[arg(long, default_value_t = 2)]
        actions2: usize,
        #[arg(long, default_value_t = 2)]
        obs: usize,
        /// Instances per state count.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        assert_invariants: bool,
        /// Run instances one after another.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(value_enum)]
    kind: Kind,
    left: PathBuf,
    right: PathBuf,
}

#[derive(Args)]
struct Route {
    #[arg(long, value_enum, default_value_t = AlgoArg::Game)]
    algo: AlgoArg,
    /// Check the iterative engine's invariants while it runs.
    #[arg(long)]
    assert_invariants: bool,
    /// Materialize every pair of successor sets in the game (always the case).
    #[arg(long)]
    strict_game: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Altsim,
    Fairaltsim,
    Fairsim,
    Sim,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Basic,
    Game,
    Iterative,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Algo {
        match a {
            AlgoArg::Basic => Algo::Basic,
            AlgoArg::Game => Algo::Game,
            AlgoArg::Iterative => Algo::Iterative,
        }
    }
}

type CliResult<T> = std::result::Result<T, String>;

fn read_system(path: &Path) -> CliResult<System> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_system(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn core(e: Error) -> String {
    e.to_string()
}

struct Loaded {
    left: System,
    right: System,
}

impl Loaded {
    fn new(input: &Input) -> CliResult<Self> {
        let left = read_system(&input.left)?;
        let right = read_system(&input.right)?;
        if matches!(input.kind, Kind::Sim | Kind::Fairsim) && !(left.is_ts() && right.is_ts()) {
            return Err("`sim` and `fairsim` need two `ts` files".into());
        }
        Ok(Loaded { left, right })
    }
}

fn relation(input: &Input, route: &Route, sys: &Loaded) -> CliResult<SimRelation> {
    let algo = Algo::from(route.algo);
    let fair = matches!(input.kind, Kind::Fairaltsim | Kind::Fairsim);
    if fair && route.algo != AlgoArg::Game {
        return Err("fair kinds are computed by the game route only (`--algo game`)".into());
    }
    let (l, r) = (&sys.left, &sys.right);
    match input.kind {
        Kind::Altsim | Kind::Sim => {
            // `sim` is alternating simulation between the embeddings
            let (k, kp) = (l.to_ats().map_err(core)?, r.to_ats().map_err(core)?);
            if algo == Algo::Iterative && route.assert_invariants {
                return altsim_iterative(&k, &kp, IterOptions { assert_invariants: true })
                    .map(|(rel, _)| rel)
                    .map_err(core);
            }
            altsim(&k, &kp, algo).map_err(core)
        }
        Kind::Fairaltsim => {
            let (fk, fkp) = (l.to_fair_ats().map_err(core)?, r.to_fair_ats().map_err(core)?);
            fairaltsim_detail(&fk, &fkp).map(|(rel, _)| rel).map_err(core)
        }
        Kind::Fairsim => {
            let (ft, ftp) = (l.to_fair_ts().map_err(core)?, r.to_fair_ts().map_err(core)?);
            fairsim_detail(&ft, &ftp).map(|(rel, _)| rel).map_err(core)
        }
    }
}

fn game(input: &Input, sys: &Loaded) -> CliResult<Game> {
    let (l, r) = (&sys.left, &sys.right);
    match input.kind {
        Kind::Altsim | Kind::Sim => {
            let (k, kp) = (l.to_ats().map_err(core)?, r.to_ats().map_err(core)?);
            altsim_game_detail(&k, &kp).map(|(_, g, _)| g).map_err(core)
        }
        Kind::Fairaltsim => {
            let (fk, fkp) = (l.to_fair_ats().map_err(core)?, r.to_fair_ats().map_err(core)?);
            fairaltsim_detail(&fk, &fkp).map(|(_, g)| g).map_err(core)
        }
        Kind::Fairsim => {
            let (ft, ftp) = (l.to_fair_ts().map_err(core)?, r.to_fair_ts().map_err(core)?);
            fairsim_detail(&ft, &ftp).map(|(_, g)| g).map_err(core)
        }
    }
}

/// `# <side> <index> <name>` lines.
fn name_table(side: &str, names: &[String], prefix: &str) -> String {
    let mut s = String::new();
    for (i, n) in names.iter().enumerate() {
        let _ = writeln!(s, "{prefix} {side} {i} {n}");
    }
    s
}

fn succ_dump(side: &str, k: &Ats) -> CliResult<String> {
    let idx = SuccIndex::build(k).map_err(core)?;
    let mut s = String::new();
    for id in 0..idx.count() {
        let members: Vec<String> = idx.set(id).iter().map(usize::to_string).collect();
        let _ = writeln!(s, "# succ {side} T{id} = {{{}}}", members.join(","));
    }
    for w in 0..k.num_states() {
        for &a in &k.enabled1[w] {
            let _ = writeln!(s, "# succ {side} h({w},{}) = T{}", k.actions1[a], idx.id(w, a));
        }
    }
    Ok(s)
}

fn summary(rel: &SimRelation) -> String {
    format!("pairs={} left={} right={}", rel.len(), rel.left_size(), rel.right_size())
}

fn compute(input: &Input, route: &Route, out: Option<&Path>, dump_succ: bool) -> CliResult<ExitCode> {
    let sys = Loaded::new(input)?;
    let rel = relation(input, route, &sys)?;
    let mut text = rel.to_text();
    text.push_str(&name_table("left", sys.left.state_names(), "#"));
    text.push_str(&name_table("right", sys.right.state_names(), "#"));
    emit(out, &text)?;
    if dump_succ {
        let mut s = succ_dump("left", &sys.left.to_ats().map_err(core)?)?;
        s.push_str(&succ_dump("right", &sys.right.to_ats().map_err(core)?)?);
        print!("{s}");
    }
    println!("{}", summary(&rel));
    Ok(ExitCode::SUCCESS)
}

fn check(input: &Input, route: &Route) -> CliResult<ExitCode> {
    let sys = Loaded::new(input)?;
    let rel = relation(input, route, &sys)?;
    if rel.contains(sys.left.init(), sys.right.init()) {
        println!("related");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("not-related");
        Ok(ExitCode::from(1))
    }
}

fn export_dot(input: &Input, out: Option<&Path>) -> CliResult<ExitCode> {
    let sys = Loaded::new(input)?;
    let g = game(input, &sys)?;
    let (ln, rn) = (sys.left.state_names(), sys.right.state_names());
    let mut text = name_table("left", ln, "//");
    text.push_str(&name_table("right", rn, "//"));
    text.push_str(&g.to_dot(&index_names(ln.len()), &index_names(rn.len())));
    emit(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.cmd {
        Cmd::Compute { input, route, out, dump_succ } => compute(&input, &route, out.as_deref(), dump_succ),
        Cmd::Check { input, route } => check(&input, &route),
        Cmd::ExportDot { input, out } => export_dot(&input, out.as_deref()),
        Cmd::GenRandom { states, actions1, actions2, obs, fair_density, seed, ts, out } => {
            let spec = RandomSpec::new(states, actions1, actions2, obs, seed)
                .with_fair_density(fair_density.unwrap_or(0.0));
            let sys = match (ts, fair_density.is_some()) {
                (true, true) => System::FairTs(random_fair_ts(&spec).map_err(core)?),
                (true, false) => System::Ts(random_fair_ts(&spec).map_err(core)?.ts),
                (false, true) => System::FairAts(random_fair_ats(&spec).map_err(core)?),
                (false, false) => System::Ats(random_fair_ats(&spec).map_err(core)?.ats),
            };
            emit(out.as_deref(), &write_system(&sys))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench {
            min_states,
            max_states,
            actions1,
            actions2,
            obs,
            trials,
            seed,
            assert_invariants,
            sequential,
            out,
        } => {
            if min_states == 0 || min_states > max_states {
                return Err("need 1 <= --min-states <= --max-states".into());
            }
            let mut instances = Vec::new();
            for n in min_states..=max_states {
                for _ in 0..trials {
                    let i = (instances.len() as u64) * 2;
                    let l = RandomSpec::new(n, actions1, actions2, obs, derive_seed(seed, i));
                    let r = RandomSpec::new(n, actions1, actions2, obs, derive_seed(seed, i + 1));
                    instances.push((l, r));
                }
            }
            let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
            let reports = run_batch(&instances, IterOptions { assert_invariants }, exec);
            let mut text = format!("{REPORT_HEADER}\n");
            for rep in reports {
                let rep = rep.map_err(core)?;
                text.push_str(&report_row(&rep));
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
