use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gforum::corpus::{ground_sequents, CorpusConfig};
use gforum::cutelim::{cut_eliminate_with, CutElimConfig, CutElimError};
use gforum::engine::{prove, Outcome, SearchConfig};
use gforum::normalize::{
    degenerate_heads, degenerate_heads_clause, foll_to_forum, formula_to_clause, formula_to_goal,
};
use gforum::oracle::{prove_forum, ForumSequent, OracleConfig, Verdict};
use gforum::proofs::{check, proof_from_json, proof_to_json, sequent_from_json, sequent_to_json};
use gforum::sequent::GSequent;
use gforum::syntax::parse_formula;

const OK: u8 = 0;
const NO: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gforum",
    version,
    about = "Proof search, checking and cut elimination in G-Forum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a formula of full linear logic into a goal or a clause.
    Normalize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "goal")]
        to: Target,
    },
    /// Search for a proof of a sequent.
    Prove {
        file: PathBuf,
        /// Bound on goal reductions on the left along a branch; defaults to
        /// GFORUM_DEPTH or 6.
        #[arg(long)]
        depth: Option<u32>,
        /// Deepen the bound one step at a time.
        #[arg(long)]
        iterative: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the proof here as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a proof file.
    Check { file: PathBuf },
    /// Eliminate cuts and contractions from a proof; the result goes to
    /// stdout.
    Cutelim {
        file: PathBuf,
        /// Also print the applied cases or the rank reports to stderr.
        #[arg(long, value_enum)]
        log: Option<Log>,
    },
    /// Decide a sequent with the small-step prover.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Run the engine and the oracle on every sequent file of a directory.
    Compare { dir: PathBuf },
    /// Generate test corpora.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Write seeded ground sequents, one file each, or JSON lines to stdout.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=3))]
        atoms: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Goal,
    Clause,
}

#[derive(Clone, Copy, ValueEnum)]
enum Log {
    Steps,
    Ranks,
}

struct Failure(u8, String);

type Res = Result<u8, Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure(USAGE, msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_sequent(path: &Path) -> Result<GSequent, Failure> {
    sequent_from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn default_depth() -> Result<u32, Failure> {
    match std::env::var("GFORUM_DEPTH") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("GFORUM_DEPTH is not a number: {v}"))),
        Err(_) => Ok(6),
    }
}

fn engine_config(depth: Option<u32>, iterative: bool, seed: u64) -> Result<SearchConfig, Failure> {
    Ok(SearchConfig {
        max_gl_depth: depth.map_or_else(default_depth, Ok)?,
        iterative_deepening: iterative,
        rng_seed: seed,
        ..SearchConfig::default()
    })
}

fn outcome_code(o: &Outcome) -> u8 {
    match o {
        Outcome::Proved(_) => OK,
        Outcome::NoProof => NO,
        Outcome::Unknown => UNKNOWN,
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Provable(_) => OK,
        Verdict::NotProvable => NO,
        Verdict::Unknown => UNKNOWN,
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn normalize(file: &Path, to: Target) -> Res {
    let f = parse_formula(&read(file)?).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let forum = foll_to_forum(&f);
    let (text, degenerate) = match to {
        Target::Goal => formula_to_goal(&forum).map(|g| (g.to_string(), degenerate_heads(&g))),
        Target::Clause => {
            formula_to_clause(&forum).map(|c| (c.to_string(), degenerate_heads_clause(&c)))
        }
    }
    .map_err(|e| Failure(NO, e.to_string()))?;
    if degenerate > 0 {
        eprintln!("warning: {degenerate} clause(s) with head bot are always selectable");
    }
    println!("{text}");
    Ok(OK)
}

fn prove_cmd(file: &Path, cfg: SearchConfig, out: Option<&Path>) -> Res {
    let s = read_sequent(file)?;
    let report = prove(&s, &cfg);
    println!("{}", report.outcome.label());
    if let (Some(p), Some(out)) = (report.outcome.proof(), out) {
        fs::write(out, pretty(&proof_to_json(p)) + "\n")
            .map_err(|e| usage(format!("{}: {e}", out.display())))?;
    }
    Ok(outcome_code(&report.outcome))
}

fn check_cmd(file: &Path) -> Res {
    let p = proof_from_json(&read(file)?).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    match check(&p) {
        Ok(()) => {
            println!("valid");
            Ok(OK)
        }
        Err(e) => {
            println!("invalid {e}");
            Ok(NO)
        }
    }
}

fn cutelim_cmd(file: &Path, log: Option<Log>) -> Res {
    let p = proof_from_json(&read(file)?).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    match cut_eliminate_with(&p, &CutElimConfig::default()) {
        Ok((q, report)) => {
            match log {
                Some(Log::Steps) => report.steps.iter().for_each(|s| eprintln!("{s}")),
                Some(Log::Ranks) => {
                    for (b, a) in &report.gen_cut_ranks {
                        eprintln!("gen-cut pass {b} -> {a}");
                    }
                    let ranks: Vec<String> =
                        report.linear_ranks.iter().map(usize::to_string).collect();
                    eprintln!("linear rounds {}", ranks.join(" -> "));
                }
                None => {}
            }
            println!("{}", pretty(&proof_to_json(&q)));
            Ok(OK)
        }
        Err(e @ CutElimError::NonTermination { .. }) => Err(Failure(UNKNOWN, e.to_string())),
        Err(e) => Err(Failure(NO, e.to_string())),
    }
}

fn oracle_cmd(file: &Path, steps: usize) -> Res {
    let s = read_sequent(file)?;
    let cfg = OracleConfig {
        step_bound: steps,
        ..OracleConfig::default()
    };
    let v = prove_forum(&ForumSequent::from_gsequent(&s), &cfg).verdict;
    println!("{}", v.label());
    Ok(verdict_code(&v))
}

fn compare(dir: &Path) -> Res {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let cfg = engine_config(None, true, 0)?;
    let (mut decided, mut disagree) = (0, 0);
    for f in &files {
        let s = read_sequent(f)?;
        let e = prove(&s, &cfg).outcome;
        let o = prove_forum(&ForumSequent::from_gsequent(&s), &OracleConfig::default()).verdict;
        let (ec, oc) = (outcome_code(&e), verdict_code(&o));
        let mark = if ec == UNKNOWN || oc == UNKNOWN {
            "undecided"
        } else if ec == oc {
            decided += 1;
            "agree"
        } else {
            decided += 1;
            disagree += 1;
            "DISAGREE"
        };
        let name = f.file_name().unwrap_or_default().to_string_lossy();
        println!("{name} engine={} oracle={} {mark}", e.label(), o.label());
    }
    println!(
        "{} sequents, {decided} decided by both, {disagree} disagreements",
        files.len()
    );
    Ok(if disagree > 0 { NO } else { OK })
}

fn corpus_gen(cfg: CorpusConfig, out: Option<&Path>) -> Res {
    let corpus = ground_sequents(&cfg);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            let width = cfg.count.saturating_sub(1).to_string().len();
            for (i, s) in corpus.iter().enumerate() {
                let path = dir.join(format!("{i:0width$}.json"));
                fs::write(&path, pretty(&sequent_to_json(s)) + "\n")
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
        }
        None => corpus
            .iter()
            .for_each(|s| println!("{}", sequent_to_json(s))),
    }
    Ok(OK)
}

fn run(cli: Cli) -> Res {
    match cli.command {
        Command::Normalize { file, to } => normalize(&file, to),
        Command::Prove {
            file,
            depth,
            iterative,
            seed,
            out,
        } => prove_cmd(
            &file,
            engine_config(depth, iterative, seed)?,
            out.as_deref(),
        ),
        Command::Check { file } => check_cmd(&file),
        Command::Cutelim { file, log } => cutelim_cmd(&file, log),
        Command::Oracle { file, steps } => oracle_cmd(&file, steps),
        Command::Compare { dir } => compare(&dir),
        Command::Corpus {
            command:
                CorpusCommand::Gen {
                    seed,
                    count,
                    atoms,
                    depth,
                    out,
                },
        } => {
            let cfg = CorpusConfig {
                seed,
                count,
                atoms: atoms as usize,
                depth: depth as usize,
                ..CorpusConfig::default()
            };
            corpus_gen(cfg, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    // The oracle recurses once per derivation step.
    let worker = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(move || run(cli));
    let result = worker
        .expect("spawn worker")
        .join()
        .unwrap_or_else(|_| Err(Failure(USAGE, "internal error".into())));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("gforum: {msg}");
            ExitCode::from(code)
        }
    }
}
