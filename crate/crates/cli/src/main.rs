use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loesung_core::gim::{brute_force_ordering_search, find_admissible_ordering, Gim, Ordering};
use loesung_core::harness::{
    enumerate_sequences, loesung_scan, probe_conjecture, run_full_verification, verify_sequence,
    Budget,
};
use loesung_core::io::{
    int_json, matrix_json, one_based, parse_matrix_input, parse_sequence, seed_json, vec_json,
    MatrixInput,
};
use loesung_core::matrix::{apply_sequence, row_sign};
use loesung_core::reflections::reflection_state_capped;
use loesung_core::words::{search_pi_equivalent, Word, DEFAULT_SEARCH_NODES};
use loesung_core::Error;
use serde_json::{json, Value};

const EXIT_CANDIDATE: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "loesung",
    version,
    about = "Mutation sequences, reflection words and the λ-recursion in exact arithmetic"
)]
struct Cli {
    /// Worker threads for enumeration commands.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, global = true, default_value_t = Budget::default().max_rank)]
    max_rank: usize,
    #[arg(long, global = true, default_value_t = Budget::default().word_cap)]
    word_cap: usize,
    #[arg(long, global = true, default_value_t = Budget::default().term_cap)]
    term_cap: usize,
    /// Longest sequence the enumeration commands accept.
    #[arg(long, global = true, default_value_t = Budget::default().max_len)]
    len_cap: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_rank: self.max_rank,
            max_len: self.len_cap,
            word_cap: self.word_cap,
            term_cap: self.term_cap,
        }
    }
}

#[derive(Args)]
struct SeqArgs {
    /// JSON file with `B` and optionally `D`.
    #[arg(long)]
    input: PathBuf,
    /// One-based comma-separated mutation sequence.
    #[arg(long, default_value = "")]
    seq: String,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate `[B | I]` along a sequence.
    Mutate(SeqArgs),
    /// c-vectors and their signs after a sequence.
    Cvec(SeqArgs),
    /// Reflection words `r_i` after a sequence.
    Rwords(SeqArgs),
    /// L-matrix for an ordering-induced GIM.
    Lmat {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        ordering: String,
    },
    /// Orderings whose GIM satisfies the parity condition.
    GimSearch {
        #[arg(long)]
        input: PathBuf,
        /// List every admissible ordering instead of constructing one.
        #[arg(long)]
        brute_force: bool,
    },
    /// Which c-vectors are Lösungen for which ordering-induced GIMs.
    Loesung {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seq: Option<String>,
        /// Scan every sequence up to this length instead.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Check C1, C2, C3 and the relations along one or all sequences.
    VerifyTheorem {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ordering: String,
        #[arg(long, conflicts_with = "all_seqs")]
        seq: Option<String>,
        /// Every sequence up to this length.
        #[arg(long)]
        all_seqs: Option<usize>,
    },
    /// Compare π(r_i) across sequences with equal C-matrices.
    VerifyConj {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to an admissible ordering when one exists.
        #[arg(long)]
        ordering: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Operations on words in the free product of order-two groups.
    Words {
        #[command(subcommand)]
        command: WordsCommand,
    },
}

#[derive(Subcommand)]
enum WordsCommand {
    /// Cancel adjacent repeated letters.
    Reduce { word: String },
    /// The reflection `g s_i g⁻¹`, reduced.
    Reflect {
        g: String,
        /// One-based index.
        i: usize,
    },
    /// Short words with the same matrix as `word` under π.
    PiSearch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ordering: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_NODES)]
        nodes: usize,
    },
}

/// A JSON result plus the exit code it calls for.
struct Outcome {
    value: Value,
    code: u8,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Self { value, code: 0 }
    }
}

fn read_matrix(path: &Path) -> Result<MatrixInput, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_matrix_input(&text)
}

fn parse_ordering(s: &str, n: usize) -> Result<Ordering, Error> {
    let o: Ordering = s.parse()?;
    if o.len() != n {
        return Err(Error::InvalidOrdering(format!(
            "{s:?} does not order {n} indices"
        )));
    }
    Ok(o)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let budget = cli.budget.budget();
    let out = match &cli.command {
        Command::Mutate(a) => {
            let b = read_matrix(&a.input)?.matrix;
            let w = parse_sequence(&a.seq, b.rank())?;
            seed_json(&apply_sequence(&b, &w)?).into()
        }
        Command::Cvec(a) => {
            let b = read_matrix(&a.input)?.matrix;
            let w = parse_sequence(&a.seq, b.rank())?;
            let seed = apply_sequence(&b, &w)?;
            let rows: Vec<Value> = (0..b.rank())
                .map(|i| {
                    let c = seed.c(i);
                    Ok(json!({ "c": vec_json(c), "sign": row_sign(c)? }))
                })
                .collect::<Result<_, Error>>()?;
            json!({ "w": one_based(&w), "c_vectors": rows }).into()
        }
        Command::Rwords(a) => {
            let b = read_matrix(&a.input)?.matrix;
            let w = parse_sequence(&a.seq, b.rank())?;
            let st = reflection_state_capped(&b, &w, budget.word_cap)?;
            let r: Vec<String> = st.r.iter().map(Word::to_string).collect();
            let g: Vec<String> = st.g.iter().map(Word::to_string).collect();
            json!({ "w": one_based(&w), "r": r, "g": g }).into()
        }
        Command::Lmat { seq, ordering } => {
            let b = read_matrix(&seq.input)?.matrix;
            let w = parse_sequence(&seq.seq, b.rank())?;
            let o = parse_ordering(ordering, b.rank())?;
            let gim = Gim::from_ordering(&b, &o)?;
            let st = reflection_state_capped(&b, &w, budget.word_cap)?;
            let l = st.l_matrix(&gim);
            let q: Vec<Value> = (0..b.rank())
                .map(|i| gim.quadratic_form(l.row(i)).map(|x| int_json(&x)))
                .collect::<Result<_, Error>>()?;
            json!({
                "w": one_based(&w),
                "ordering": o.to_string(),
                "A": matrix_json(gim.matrix()),
                "L": matrix_json(&l),
                "q": q,
            })
            .into()
        }
        Command::GimSearch { input, brute_force } => {
            let b = read_matrix(input)?.matrix;
            let gim_entry = |o: &Ordering| -> Result<Value, Error> {
                let g = Gim::from_ordering(&b, o)?;
                Ok(json!({ "ordering": o.to_string(), "A": matrix_json(g.matrix()) }))
            };
            if *brute_force {
                let all = brute_force_ordering_search(&b)?;
                let list: Vec<Value> = all.iter().map(gim_entry).collect::<Result<_, _>>()?;
                json!({ "count": list.len(), "orderings": list }).into()
            } else {
                match find_admissible_ordering(&b) {
                    Some(o) => json!({ "found": true, "result": gim_entry(&o)? }).into(),
                    None => json!({ "found": false }).into(),
                }
            }
        }
        Command::Loesung {
            input,
            seq,
            max_len,
        } => {
            let b = read_matrix(input)?.matrix;
            let seqs = match (seq, max_len) {
                (Some(s), _) => vec![parse_sequence(s, b.rank())?],
                (None, Some(l)) => {
                    if *l > budget.max_len {
                        return Err(Error::InvalidInput(format!(
                            "max length {l} exceeds the budget {}",
                            budget.max_len
                        )));
                    }
                    enumerate_sequences(b.rank(), *l)
                }
                (None, None) => vec![Vec::new()],
            };
            to_value(&loesung_scan(&b, &seqs)?).into()
        }
        Command::VerifyTheorem {
            input,
            ordering,
            seq,
            all_seqs,
        } => {
            let b = read_matrix(input)?.matrix;
            let o = parse_ordering(ordering, b.rank())?;
            let report = match (seq, all_seqs) {
                (_, Some(l)) => run_full_verification(&b, &o, *l, &budget)?,
                (s, None) => {
                    let w = parse_sequence(s.as_deref().unwrap_or(""), b.rank())?;
                    verify_sequence(&b, &o, &w, &budget)?
                }
            };
            let code = if report.errors.is_empty() {
                0
            } else {
                EXIT_VIOLATION
            };
            Outcome {
                value: to_value(&report),
                code,
            }
        }
        Command::VerifyConj {
            input,
            ordering,
            max_len,
        } => {
            let b = read_matrix(input)?.matrix;
            let o = match ordering {
                Some(s) => parse_ordering(s, b.rank())?,
                None => find_admissible_ordering(&b).unwrap_or_else(|| Ordering::natural(b.rank())),
            };
            let report = probe_conjecture(&b, &o, *max_len, &budget)?;
            if !report.parity_ok {
                eprintln!(
                    "warning: ordering {o} fails the parity condition; candidates are expected"
                );
            }
            let code = if !report.errors.is_empty() {
                EXIT_VIOLATION
            } else if !report.violations.is_empty() {
                EXIT_CANDIDATE
            } else {
                0
            };
            Outcome {
                value: to_value(&report),
                code,
            }
        }
        Command::Words { command } => words(command)?,
    };
    Ok(out)
}

fn words(cmd: &WordsCommand) -> Result<Outcome, Error> {
    Ok(match cmd {
        WordsCommand::Reduce { word } => {
            let w: Word = word.parse()?;
            json!({ "word": w.to_string(), "length": w.len() }).into()
        }
        WordsCommand::Reflect { g, i } => {
            let g: Word = g.parse()?;
            if *i == 0 {
                return Err(Error::InvalidInput("indices are one-based".into()));
            }
            let r = Word::conjugate(&g, i - 1);
            json!({ "word": r.to_string(), "length": r.len() }).into()
        }
        WordsCommand::PiSearch {
            input,
            ordering,
            word,
            max_len,
            nodes,
        } => {
            let b = read_matrix(input)?.matrix;
            let o = parse_ordering(ordering, b.rank())?;
            let gim = Gim::from_ordering(&b, &o)?;
            let target: Word = word.parse()?;
            let hits = search_pi_equivalent(&target, &gim, *max_len, *nodes)?;
            let hits: Vec<String> = hits.iter().map(Word::to_string).collect();
            json!({ "target": target.to_string(), "ordering": o.to_string(), "matches": hits })
                .into()
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation(_) | Error::NotSignCoherent(_) => EXIT_VIOLATION,
        _ => EXIT_INPUT,
    }
}

/// Pretty JSON with arrays of scalars kept on one line, so vectors and
/// matrix rows stay readable.
fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push_str(&serde_json::to_string(v).expect("valid JSON"));
        }
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                render(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("valid JSON"));
                out.push_str(": ");
                render(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        _ => out.push_str(&serde_json::to_string(v).expect("valid JSON")),
    }
}

fn emit(value: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = String::new();
    render(value, 0, &mut text);
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.value, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
