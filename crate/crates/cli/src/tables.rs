//! `reproduce-tables`: measured operation counts and the q-truncation example,
//! checked against an expectations file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ivote::actors::Variant;
use ivote::protocol_messages::truncate_display;
use ivote::sim_harness::{Harness, OpCounters, RunOptions, Scenario};
use log::info;

use crate::commands::{ensure_out, load_scenario, CliError};
use crate::{CommonArgs, EXIT_CLAIM, EXIT_OK};

const BUILTIN: &str = include_str!("expectations.txt");
const TABLE_M: [usize; 4] = [2, 3, 5, 10];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Count {
    Fixed(u64),
    PerCandidate,
}

impl Count {
    fn at(&self, m: usize) -> u64 {
        match self {
            Count::Fixed(n) => *n,
            Count::PerCandidate => m as u64,
        }
    }
}

#[derive(Debug, Clone)]
struct CostLine {
    variant: Variant,
    actor: String,
    counter: String,
    count: Count,
}

#[derive(Debug, Clone)]
struct TruncateLine {
    q: String,
    shown: String,
}

#[derive(Debug, Default)]
struct Expectations {
    cost: Vec<CostLine>,
    truncate: Vec<TruncateLine>,
}

fn parse_expectations(text: &str) -> Result<Expectations, CliError> {
    let mut out = Expectations::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |why: &str| CliError::Usage(format!("expectations line {}: {why}", i + 1));
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            ["cost", variant, actor, counter, count] => {
                let variant = variant.parse::<Variant>().map_err(|e| bad(&e))?;
                if OpCounters::default().actor(actor).is_none() {
                    return Err(bad(&format!("unknown actor {actor}")));
                }
                if OpCounters::default().voter_app.get(counter).is_none() {
                    return Err(bad(&format!("unknown counter {counter}")));
                }
                let count = match *count {
                    "m" => Count::PerCandidate,
                    n => Count::Fixed(n.parse().map_err(|_| bad("count must be an integer or m"))?),
                };
                out.cost.push(CostLine {
                    variant,
                    actor: actor.to_string(),
                    counter: counter.to_string(),
                    count,
                });
            }
            ["truncate", q, shown] => {
                if q.len() != 32 {
                    return Err(bad("q must be 32 bytes"));
                }
                out.truncate.push(TruncateLine {
                    q: q.to_string(),
                    shown: shown.to_string(),
                });
            }
            _ => return Err(bad("expected `cost ...` or `truncate ...`")),
        }
    }
    Ok(out)
}

/// Counters of one honest cast plus verification.
fn measure(variant: Variant, m: usize, seed: [u8; 32]) -> Result<OpCounters, CliError> {
    let s = Scenario {
        variant,
        m,
        trials: 1,
        seed,
        ..Scenario::default()
    };
    let outcome = Harness::new(&s, RunOptions::default())?.run_trial(0)?;
    if outcome.row.verdict != "accept" {
        return Err(CliError::Usage(format!(
            "honest {variant} trial at m={m} ended in {}",
            outcome.row.verdict
        )));
    }
    Ok(outcome.counters)
}

struct Tables {
    cost_csv: String,
    cost_md: String,
    truncation_csv: String,
    truncation_md: String,
    diffs: Vec<String>,
}

fn build(exp: &Expectations, ms: &[usize], seed: [u8; 32]) -> Result<Tables, CliError> {
    let mut t = Tables {
        cost_csv: "variant,m,actor,counter,measured,expected\n".into(),
        cost_md: String::new(),
        truncation_csv: "q,q_left,shown,expected\n".into(),
        truncation_md: String::new(),
        diffs: Vec::new(),
    };

    let columns = ["voter_app", "vfs", "verif_app"];
    writeln!(t.cost_md, "| variant | m | voter_app | vfs | verif_app |").unwrap();
    writeln!(t.cost_md, "|---|---|---|---|---|").unwrap();
    for variant in [Variant::Original, Variant::Proposed] {
        for &m in ms {
            let measured = measure(variant, m, seed)?;
            let mut cells = vec![String::new(); columns.len()];
            for line in exp.cost.iter().filter(|l| l.variant == variant) {
                let got = measured
                    .actor(&line.actor)
                    .and_then(|c| c.get(&line.counter))
                    .expect("validated when parsed");
                let want = line.count.at(m);
                writeln!(
                    t.cost_csv,
                    "{variant},{m},{},{},{got},{want}",
                    line.actor, line.counter
                )
                .unwrap();
                if got != want {
                    t.diffs.push(format!(
                        "{variant} m={m} {}.{}: expected {want}, measured {got}",
                        line.actor, line.counter
                    ));
                }
                if let Some(col) = columns.iter().position(|c| *c == line.actor) {
                    if got > 0 {
                        let cell = &mut cells[col];
                        if !cell.is_empty() {
                            cell.push_str(" + ");
                        }
                        write!(cell, "{got} {}", line.counter).unwrap();
                    }
                }
            }
            for cell in &mut cells {
                if cell.is_empty() {
                    cell.push('-');
                }
            }
            writeln!(t.cost_md, "| {variant} | {m} | {} |", cells.join(" | ")).unwrap();
        }
    }

    writeln!(t.truncation_md, "| q | q_left | shown |").unwrap();
    writeln!(t.truncation_md, "|---|---|---|").unwrap();
    for line in &exp.truncate {
        let bytes: [u8; 32] = line.q.as_bytes().try_into().expect("length checked");
        let shown = truncate_display(&bytes);
        let left = String::from_utf8_lossy(&bytes[..28]);
        writeln!(t.truncation_csv, "{},{left},{shown},{}", line.q, line.shown).unwrap();
        writeln!(t.truncation_md, "| {} | {left} | {shown} |", line.q).unwrap();
        if shown != line.shown {
            t.diffs.push(format!(
                "truncate {}: expected {}, shown {shown}",
                line.q, line.shown
            ));
        }
    }
    Ok(t)
}

pub fn reproduce_tables(args: &CommonArgs, expectations: Option<&Path>) -> Result<u8, CliError> {
    let text = match expectations {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::io(path, e))?,
        None => BUILTIN.to_string(),
    };
    let exp = parse_expectations(&text)?;
    let s = load_scenario(args, Scenario::default())?;
    let mut ms = TABLE_M.to_vec();
    if args.scenario.is_some() && !ms.contains(&s.m) {
        ms.push(s.m);
    }
    ensure_out(&args.out)?;
    info!("measuring costs for m in {ms:?}");
    let tables = build(&exp, &ms, s.seed)?;

    for (name, body) in [
        ("cost.csv", &tables.cost_csv),
        ("cost.md", &tables.cost_md),
        ("truncation.csv", &tables.truncation_csv),
        ("truncation.md", &tables.truncation_md),
    ] {
        let path = args.out.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    }
    println!("{}", tables.cost_md);
    println!("{}", tables.truncation_md);

    if tables.diffs.is_empty() {
        Ok(EXIT_OK)
    } else {
        for d in &tables.diffs {
            eprintln!("mismatch: {d}");
        }
        Ok(EXIT_CLAIM)
    }
}
