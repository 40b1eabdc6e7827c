//! `goimall`: check, interpret, normalize and execute MALL proofs with cut
//! stacks, and verify that execution is invariant under lifted cut
//! elimination.
//!
//! Exit codes: 0 on success or PASS, 1 on FAIL, 2 on usage or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use goimall::corpus;
use goimall::cut_rewrite::normalize_lifted;
use goimall::goi_engine::{build_box, execute_family, to_dot, verify_main_theorem, zero_action, Report};
use goimall::indexed_logic::{check_indexed_proof, fl_forward, fmt_set, IndexedFamily};
use goimall::mall_syntax::{check_proof, parse_proof, ProofTerm};
use goimall::par::{with_jobs, Exec};
use goimall::rel_model::{interp_denotational, interp_with_cuts};
use goimall::traced::{check_all, Law};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "goimall", version, about = "Indexed geometry of interaction for MALL proofs")]
struct Cli {
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Points with the cut stack left unexecuted.
    Cutlist,
    /// The cut-executed relation.
    Denot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Type-check a proof and print its conclusion.
    Check { file: PathBuf },
    /// Relational interpretation.
    Interp {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cutlist")]
        mode: Mode,
    },
    /// Translate a proof along a family into an indexed proof.
    Translate {
        file: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Eliminate cuts, optionally lifting a family along the way.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        trace: bool,
    },
    /// Run the execution formula at every index of a family.
    Exec {
        file: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Check invariance of execution along lifted cut elimination.
    Verify {
        #[arg(required_unless_present = "enumerate", conflicts_with = "enumerate")]
        file: Option<PathBuf>,
        #[arg(long, requires = "file")]
        family: Option<PathBuf>,
        /// Check every proof with a cut up to this many rule nodes.
        #[arg(long)]
        enumerate: Option<usize>,
        /// Indices per family in corpus mode.
        #[arg(long, default_value_t = 4)]
        chunk: usize,
        /// Points taken from each proof's relation in corpus mode.
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Check the traced-category laws on random generator graphs.
    Axioms {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the Graphviz net of one index of a family.
    Diagram {
        file: PathBuf,
        #[arg(long)]
        index: String,
        /// Defaults to the relation of the proof, numbered from 1.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

enum Failure {
    /// The command ran and its verdict is negative.
    Fail(String),
    /// Bad input: unreadable file, syntax error, malformed family.
    Usage(String),
}

type Outcome = Result<bool, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_proof(path: &Path) -> Result<ProofTerm, Failure> {
    let p = parse_proof(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    check_proof(&p).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(p)
}

fn load_family(path: &Path) -> Result<IndexedFamily, Failure> {
    IndexedFamily::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn report_json(r: &Report) -> Value {
    json!({
        "pass": r.pass(),
        "J": r.j_chain(),
        "steps": r.steps.iter().map(|s| json!({"step": s.line, "failures": s.failures})).collect::<Vec<_>>(),
        "final_J": r.final_j,
        "nonzero": r.nonzero,
        "failures": r.final_failures,
        "error": r.error,
    })
}

fn run(cli: Cli) -> Outcome {
    let exec = if cli.jobs == 1 { Exec::Sequential } else { Exec::Parallel };
    let json = cli.json;
    match cli.cmd {
        Cmd::Check { file } => {
            let p = parse_proof(&read(&file)?).map_err(usage)?;
            match check_proof(&p) {
                Ok(s) if json => {
                    print_json(&json!({"ok": true, "sequent": s.to_string(), "cut_free": p.is_cut_free()}))
                }
                Ok(s) => println!("{s}"),
                Err(e) if json => {
                    print_json(&json!({"ok": false, "error": e.to_string()}));
                    return Ok(false);
                }
                Err(e) => return Err(Failure::Fail(e.to_string())),
            }
            Ok(true)
        }
        Cmd::Interp { file, mode } => {
            let p = load_proof(&file)?;
            let items: Vec<(String, Value)> = match mode {
                Mode::Cutlist => interp_with_cuts(&p)
                    .map_err(usage)?
                    .into_iter()
                    .map(|x| (x.to_string(), serde_json::to_value(&x).expect("point")))
                    .collect(),
                Mode::Denot => interp_denotational(&p)
                    .map_err(usage)?
                    .into_iter()
                    .map(|xs| {
                        let t: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                        (format!("[{}]", t.join(", ")), json!(t))
                    })
                    .collect(),
            };
            if json {
                print_json(&Value::Array(items.into_iter().map(|(_, v)| v).collect()));
            } else {
                for (s, _) in items {
                    println!("{s}");
                }
            }
            Ok(true)
        }
        Cmd::Translate { file, family } => {
            let (p, nu) = (load_proof(&file)?, load_family(&family)?);
            let rho = fl_forward(&p, &nu).map_err(|e| Failure::Fail(e.to_string()))?;
            let s = check_indexed_proof(&rho).map_err(|e| Failure::Fail(e.to_string()))?;
            if json {
                print_json(&json!({"J": nu.j, "sequent": s.to_string()}));
            } else {
                println!("{s}");
            }
            Ok(true)
        }
        Cmd::Normalize { file, family, trace } => {
            let p = load_proof(&file)?;
            let nu = match family {
                Some(f) => load_family(&f)?,
                None => IndexedFamily::default(),
            };
            let steps = normalize_lifted(&p, &nu, None).map_err(|e| Failure::Fail(e.to_string()))?;
            let (nf, fam) = steps.last().map(|s| s.after.clone()).unwrap_or((p, nu));
            let lines: Vec<String> = steps.iter().enumerate().map(|(k, s)| format!("step {}: {s}", k + 1)).collect();
            if json {
                print_json(&json!({"steps": lines, "normal_form": nf.to_string(), "J": fam.j}));
            } else {
                if trace {
                    for l in &lines {
                        println!("{l}");
                    }
                }
                println!("{nf}");
            }
            Ok(true)
        }
        Cmd::Exec { file, family } => {
            let (p, nu) = (load_proof(&file)?, load_family(&family)?);
            let vals = execute_family(&p, &nu, exec);
            let mut ok = true;
            let mut out = serde_json::Map::new();
            for (j, v) in vals {
                match v {
                    Ok(v) if json => {
                        out.insert(j, v.to_json());
                    }
                    Ok(v) => {
                        println!("{j}:");
                        for line in v.to_string().lines() {
                            println!("  {line}");
                        }
                    }
                    Err(e) => {
                        ok = false;
                        if json {
                            out.insert(j, json!({"error": e.to_string()}));
                        } else {
                            println!("{j}: error: {e}");
                        }
                    }
                }
            }
            if json {
                print_json(&Value::Object(out));
            }
            Ok(ok)
        }
        Cmd::Verify { file: Some(file), family, .. } => {
            let p = load_proof(&file)?;
            let nu = match family {
                Some(f) => load_family(&f)?,
                None => IndexedFamily::numbered(interp_with_cuts(&p).map_err(usage)?),
            };
            let r = verify_main_theorem(&p, &nu, exec);
            if json {
                print_json(&report_json(&r));
            } else {
                println!("{r}");
            }
            Ok(r.pass())
        }
        Cmd::Verify { file: None, enumerate, chunk, cap, .. } => {
            let n = enumerate.expect("clap enforces file or --enumerate");
            let proofs = corpus::with_cuts(n, exec);
            let jobs: Vec<(usize, IndexedFamily)> = proofs
                .iter()
                .enumerate()
                .flat_map(|(i, e)| corpus::chunk_families(&e.proof, chunk, cap).into_iter().map(move |f| (i, f)))
                .collect();
            let reports = exec.map(&jobs, |(i, nu)| verify_main_theorem(&proofs[*i].proof, nu, Exec::Sequential));
            let indices: usize = jobs.iter().map(|(_, f)| f.j.len()).sum();
            let failed: Vec<(usize, &Report)> =
                jobs.iter().zip(&reports).filter(|(_, r)| !r.pass()).map(|((i, _), r)| (*i, r)).collect();
            let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
            if json {
                print_json(&json!({
                    "max_size": n,
                    "proofs": proofs.len(),
                    "families": jobs.len(),
                    "indices": indices,
                    "failures": failed.iter().map(|(i, r)| json!({"proof": proofs[*i].proof.to_string(), "report": report_json(r)})).collect::<Vec<_>>(),
                    "pass": failed.is_empty(),
                }));
            } else {
                for (i, r) in failed.iter().take(3) {
                    println!("{}\n{r}\n", proofs[*i].proof);
                }
                println!(
                    "size <= {n}: {} proofs, {} families, {indices} indices, {} failing  {verdict}",
                    proofs.len(),
                    jobs.len(),
                    failed.len()
                );
            }
            Ok(failed.is_empty())
        }
        Cmd::Axioms { samples, seed } => {
            let ax = check_all(&Law::AXIOMS, samples, seed, exec);
            let de = check_all(&Law::DERIVED, samples, seed, exec);
            let good = |rs: &[goimall::traced::LawResult]| rs.iter().filter(|r| r.failures == 0).count();
            let (ga, gd) = (good(&ax), good(&de));
            let word = |g: usize, n: usize| if g == n { "PASS" } else { "FAIL" };
            if json {
                let rows = |rs: &[goimall::traced::LawResult]| {
                    rs.iter()
                        .map(|r| json!({"law": r.law.name(), "samples": r.samples, "failures": r.failures, "witness": r.witness}))
                        .collect::<Vec<_>>()
                };
                print_json(
                    &json!({"seed": seed, "axioms": rows(&ax), "derived": rows(&de), "pass": ga == ax.len() && gd == de.len()}),
                );
            } else {
                for r in ax.iter().chain(&de) {
                    println!("{r}");
                }
                println!("{ga}/{} axiom families {}", ax.len(), word(ga, ax.len()));
                println!("{gd}/{} derived laws {}", de.len(), word(gd, de.len()));
            }
            Ok(ga == ax.len() && gd == de.len())
        }
        Cmd::Diagram { file, index, family, out } => {
            let p = load_proof(&file)?;
            let nu = match family {
                Some(f) => load_family(&f)?,
                None => IndexedFamily::numbered(interp_with_cuts(&p).map_err(usage)?),
            };
            let x =
                nu.values.get(&index).ok_or_else(|| usage(format!("index {index} not in J = {}", fmt_set(&nu.j))))?;
            let net = build_box(&p, x).map_err(|e| Failure::Fail(e.to_string()))?;
            let eps = zero_action(&net).map_err(|e| Failure::Fail(e.to_string()))?;
            fs::write(&out, to_dot(&net, &eps)).map_err(|e| usage(format!("{}: {e}", out.display())))?;
            if json {
                print_json(
                    &json!({"out": out.display().to_string(), "occurrences": net.occs.len(), "annihilated": eps.annihilated()}),
                );
            } else {
                println!("wrote {} ({} occurrences, {} annihilated)", out.display(), net.occs.len(), eps.annihilated());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    match with_jobs(jobs, || run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Fail(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
