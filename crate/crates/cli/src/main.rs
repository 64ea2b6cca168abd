//! `kad`: decide, normalise and inspect terms of Kleene algebra with domain.

use std::io::{self, BufRead, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use kad::freealg::{
    decide_cd1, decide_star_free, interp_star_free, interp_truncated, meet_finite, member_down,
    DEFAULT_STAR_CAP,
};
use kad::pdl::{decide_full_with_metrics, witness_search, Verdict};
use kad::relstruct::refute;
use kad::{selftest, Antichain, Error, Fragment, Term, Tree};

#[derive(Parser)]
#[command(
    name = "kad",
    version,
    about = "Equational reasoning for Kleene algebra with domain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two terms are equal in all relational models.
    Decide {
        /// Left term (read from stdin when omitted)
        s: Option<String>,
        /// Right term (read from stdin when omitted)
        t: Option<String>,
        #[arg(long, value_enum, default_value_t = FragmentArg::Auto)]
        fragment: FragmentArg,
        /// Print a tree satisfying exactly one side when invalid
        #[arg(long)]
        witness: bool,
        /// Print per-stage sizes and timings to stderr
        #[arg(long)]
        metrics: bool,
    },
    /// Print the tree interpretation of a term, one tree per line.
    Normalize {
        term: Option<String>,
        /// Star iterations for terms with `*`
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Print the maximal common lower bounds of two star-free terms.
    Meet {
        s: Option<String>,
        t: Option<String>,
    },
    /// Exit 0 if the tree satisfies the term, 1 otherwise.
    Member {
        /// A tree file, or the tree text itself
        tree: String,
        term: Option<String>,
    },
    /// Search small structures for a counterexample; exit 1 if one is found.
    Refute {
        s: Option<String>,
        t: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
    },
    /// Render a tree, or the interpretation of a star-free term, as DOT.
    Dot { input: Option<String> },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FragmentArg {
    Auto,
    Cd1,
    StarFree,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Positional inputs, with missing ones taken from non-empty stdin lines.
fn inputs(given: Vec<Option<String>>) -> Result<Vec<String>> {
    let missing = given.iter().filter(|g| g.is_none()).count();
    let mut lines = Vec::new();
    if missing > 0 {
        for line in io::stdin().lock().lines() {
            let line = line.context("reading stdin")?;
            if !line.trim().is_empty() {
                lines.push(line);
            }
            if lines.len() == missing {
                break;
            }
        }
        if lines.len() < missing {
            bail!("expected {missing} more term(s) on stdin");
        }
    }
    let mut lines = lines.into_iter();
    Ok(given
        .into_iter()
        .map(|g| g.unwrap_or_else(|| lines.next().expect("counted above")))
        .collect())
}

fn parse_terms(given: Vec<Option<String>>) -> Result<Vec<Term>> {
    inputs(given)?
        .iter()
        .map(|s| Term::parse(s).with_context(|| format!("in term `{s}`")))
        .collect()
}

fn run(command: Command) -> Result<u8> {
    let mut out = io::stdout().lock();
    match command {
        Command::Decide {
            s,
            t,
            fragment,
            witness,
            metrics,
        } => {
            let terms = parse_terms(vec![s, t])?;
            let (s, t) = (&terms[0], &terms[1]);
            let verdict = match decide(s, t, fragment, metrics) {
                Err(Error::Unsupported(msg)) => {
                    writeln!(out, "unknown-at-scale")?;
                    eprintln!("{msg}");
                    return Ok(2);
                }
                other => other?,
            };
            match verdict {
                Verdict::Valid => {
                    writeln!(out, "valid")?;
                    Ok(0)
                }
                Verdict::Invalid(w) => {
                    writeln!(out, "invalid")?;
                    if witness {
                        writeln!(out, "{w}")?;
                    }
                    Ok(1)
                }
            }
        }
        Command::Normalize { term, cap } => {
            let t = &parse_terms(vec![term])?[0];
            let l = match cap {
                None if t.classify() > Fragment::StarFree => {
                    bail!("`{t}` contains `*`; pass --cap N (e.g. {DEFAULT_STAR_CAP})")
                }
                None => interp_star_free(t)?,
                Some(cap) => {
                    let (l, exact) = interp_truncated(t, cap)?;
                    if !exact {
                        eprintln!("note: truncated after {cap} star iterations");
                    }
                    l
                }
            };
            write!(out, "{l}")?;
            Ok(0)
        }
        Command::Meet { s, t } => {
            let terms = parse_terms(vec![s, t])?;
            let l1 = interp_star_free(&terms[0])?;
            let l2 = interp_star_free(&terms[1])?;
            write!(out, "{}", meet_finite(&l1, &l2))?;
            Ok(0)
        }
        Command::Member { tree, term } => {
            let tree = read_tree(&tree)?;
            let t = &parse_terms(vec![term])?[0];
            let yes = member_down(&tree, t);
            writeln!(out, "{yes}")?;
            Ok(if yes { 0 } else { 1 })
        }
        Command::Refute { s, t, max_n } => {
            let terms = parse_terms(vec![s, t])?;
            match refute(&terms[0], &terms[1], max_n)? {
                Some(cx) => {
                    writeln!(out, "{cx}")?;
                    Ok(1)
                }
                None => Ok(0),
            }
        }
        Command::Dot { input } => {
            let text = inputs(vec![input])?.remove(0);
            if text.trim_start().starts_with('{') {
                write!(out, "{}", read_tree(&text)?.to_dot("tree"))?;
            } else {
                let t = Term::parse(&text).with_context(|| format!("in term `{text}`"))?;
                write!(out, "{}", dot_antichain(&interp_star_free(&t)?))?;
            }
            Ok(0)
        }
        Command::Selftest => {
            let mut failed = false;
            for c in selftest::run() {
                let (tag, detail) = match &c.outcome {
                    Ok(d) => ("PASS", d),
                    Err(d) => {
                        failed = true;
                        ("FAIL", d)
                    }
                };
                writeln!(out, "{tag} {} ({:?}): {detail}", c.name, c.elapsed)?;
            }
            Ok(if failed { 1 } else { 0 })
        }
    }
}

fn decide(s: &Term, t: &Term, fragment: FragmentArg, metrics: bool) -> kad::Result<Verdict> {
    let route = match fragment {
        FragmentArg::Auto => s.classify().max(t.classify()),
        FragmentArg::Cd1 => Fragment::CD1,
        FragmentArg::StarFree => Fragment::StarFree,
        FragmentArg::Full => Fragment::Full,
    };
    let start = Instant::now();
    let valid = match route {
        Fragment::CD1 => decide_cd1(s, t)?,
        Fragment::StarFree => decide_star_free(s, t)?,
        _ => {
            let (v, m) = decide_full_with_metrics(s, t)?;
            if metrics {
                eprint!("{m}");
            }
            return Ok(v);
        }
    };
    if metrics {
        eprintln!(
            "{:<14} size={:<8} time={:.3}ms",
            "interpret",
            s.size() + t.size(),
            start.elapsed().as_secs_f64() * 1e3
        );
    }
    if valid {
        Ok(Verdict::Valid)
    } else {
        Ok(Verdict::Invalid(witness_search(s, t)))
    }
}

fn read_tree(arg: &str) -> Result<Tree> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    } else {
        arg.to_string()
    };
    Tree::parse(text.trim()).with_context(|| format!("in tree `{}`", text.trim()))
}

/// One digraph; several trees become separate clusters.
fn dot_antichain(l: &Antichain) -> String {
    match l.trees() {
        [t] => t.to_dot("tree"),
        trees => {
            let mut out = String::from("digraph antichain {\n");
            for (k, t) in trees.iter().enumerate() {
                out.push_str(&format!("  subgraph cluster_{k} {{\n"));
                t.write_dot_body(&format!("t{k}_"), &mut out);
                out.push_str("  }\n");
            }
            out.push_str("}\n");
            out
        }
    }
}
