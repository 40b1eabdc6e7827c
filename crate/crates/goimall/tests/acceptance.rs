//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use goimall::corpus::{chunk_families, enumerate, random_family, seeded, Entry};
use goimall::cut_rewrite::{find_redexes, normalize_lifted, reduce_step};
use goimall::goi_engine::{
    build_box, denotation_morphism, execute_family, tabulate, verify_main_theorem, zero_action, zero_convergence,
    MorphismValue, Report,
};
use goimall::indexed_logic::{
    check_indexed_proof, erase_proof, fl_backward, fl_forward, index_set, restrict_proof, IndexedFamily,
};
use goimall::mall_syntax::{parse_proof, ProofTerm};
use goimall::par::Exec;
use goimall::rel_model::{execute_cuts_rel, interp_denotational, interp_with_cuts};
use goimall::traced::{check_all, Law};

const SIZE: usize = 7;
const CHUNK: usize = 4;
const CAP: usize = 16;
const RANDOM_FAMILIES: usize = 200;
const LAW_SAMPLES: usize = 1000;
const CONVERGENCE_SAMPLES: usize = 200;
/// Printed by a token run that hits its budget.
const DIVERGENT: &str = "exceeded the budget";

struct Outcome {
    failures: Vec<String>,
    summary: String,
    divergent: usize,
}

impl Outcome {
    fn new(summary: String, failures: Vec<String>) -> Self {
        let divergent = failures.iter().filter(|f| f.contains(DIVERGENT)).count();
        Outcome { failures, summary, divergent }
    }
}

fn line(k: usize, name: &str, out: &Outcome, took: Duration, limit: Duration) -> bool {
    let ok = out.failures.is_empty() && took <= limit;
    println!(
        "criterion {k} ({name}): {}  {}  [{:.2}s, limit {}s]",
        if ok { "PASS" } else { "FAIL" },
        out.summary,
        took.as_secs_f64(),
        limit.as_secs()
    );
    for f in out.failures.iter().take(3) {
        println!("    {}", f.replace('\n', "\n    "));
    }
    if took > limit {
        println!("    over the time limit");
    }
    ok
}

fn collect<T: Sync>(items: &[T], f: impl Fn(&T) -> Option<String> + Sync + Send) -> Vec<String> {
    Exec::Parallel.map(items, f).into_iter().flatten().collect()
}

fn sym2() -> MorphismValue {
    use goimall::goi_engine::{Addr, Token};
    let t = |port| Token { port, addr: Addr::EMPTY };
    MorphismValue::from_map(2, [(t(0), t(1)), (t(1), t(0))].into_iter().collect())
}

fn prologue() -> Outcome {
    let mut fails = Vec::new();
    let p = parse_proof("(cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot))").unwrap();
    let rel: Vec<_> = interp_with_cuts(&p).unwrap().into_iter().collect();
    if rel.len() != 2 {
        fails.push(format!("|pi1| has {} points", rel.len()));
    }
    // nu_1 is the matched point
    let (m, u): (Vec<_>, Vec<_>) = rel.iter().cloned().partition(|x| x.cuts[0].is_matched());
    let nu = IndexedFamily::numbered(m.into_iter().chain(u));
    let ex = execute_family(&p, &nu, Exec::Sequential);
    let pi3 = parse_proof("(ax bot)").unwrap();
    let star2 = nu.values["1"].clone();
    let axiom = denotation_morphism(&pi3, &goimall::rel_model::PointVec { cuts: vec![], ctx: star2.ctx }).unwrap();
    if axiom != sym2() {
        fails.push(format!("axiom table is {axiom}"));
    }
    if ex["1"].as_ref().ok() != Some(&axiom) {
        fails.push(format!("Ex_1 = {:?}", ex["1"]));
    }
    if ex["2"].as_ref().ok() != Some(&MorphismValue::Zero { ports: 2 }) {
        fails.push(format!("Ex_2 = {:?}", ex["2"]));
    }
    let steps = normalize_lifted(&p, &nu, None).unwrap();
    let trace: Vec<String> = steps.iter().map(|s| s.to_string()).collect();
    let want = ["WithPlus(1)@root  J: {1,2} -> {1}  dropped: {2}", "AxCut@root  J: {1} -> {1}  dropped: {}"];
    if trace != want {
        fails.push(format!("trace {trace:?}"));
    }
    let pi2 = parse_proof("(cut (ax bot) (ax 1))").unwrap();
    if steps.len() == 2 && (steps[0].after.0 != pi2 || steps[1].after.0 != pi3) {
        fails.push(format!("proofs {} then {}", steps[0].after.0, steps[1].after.0));
    }
    if steps.last().map(|s| s.after.1.j.clone()) != Some(index_set(["1"])) {
        fails.push("final J is not {1}".into());
    }
    let rep = verify_main_theorem(&p, &nu, Exec::Sequential);
    if !rep.pass() {
        fails.push(rep.to_string());
    }
    Outcome::new(format!("|pi1| = 2 points, Ex_1 = s, Ex_2 = ZERO, {}", rep.j_chain()), fails)
}

fn exzio() -> Outcome {
    let p = parse_proof("(tensor (cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot)) (ax bot))").unwrap();
    let Some(x) = interp_with_cuts(&p).unwrap().into_iter().find(|x| !x.cuts[0].is_matched()) else {
        return Outcome::new("no mismatched point".into(), vec!["no mismatched point".into()]);
    };
    let net = build_box(&p, &x).unwrap();
    let v = zero_action(&net).and_then(|eps| tabulate(&net, &eps));
    let fails = match &v {
        Ok(MorphismValue::Zero { ports: 3 }) => vec![],
        other => vec![format!("{x}: {other:?}")],
    };
    Outcome::new(format!("Ex at {x} = {}", v.map(|v| v.to_string()).unwrap_or_else(|e| e.to_string())), fails)
}

fn report_failure(p: &ProofTerm, nu: &IndexedFamily, r: &Report) -> Option<String> {
    (!r.pass()).then(|| format!("{p}\n{}\n{r}", nu.to_json()))
}

fn theorem(corpus: &[Entry]) -> Outcome {
    let counts = Exec::Parallel.map(corpus, |e| {
        let fams = chunk_families(&e.proof, CHUNK, CAP);
        let mut fails = Vec::new();
        for nu in &fams {
            let r = verify_main_theorem(&e.proof, nu, Exec::Sequential);
            fails.extend(report_failure(&e.proof, nu, &r));
        }
        (fams.len(), fams.iter().map(|f| f.j.len()).sum::<usize>(), fails)
    });
    let families: usize = counts.iter().map(|c| c.0).sum();
    let indices: usize = counts.iter().map(|c| c.1).sum();
    let mut fails: Vec<String> = counts.into_iter().flat_map(|c| c.2).collect();

    let cut_proofs: Vec<&ProofTerm> = corpus
        .iter()
        .map(|e| &e.proof)
        .filter(|p| !p.is_cut_free() && !interp_with_cuts(p).unwrap().is_empty())
        .collect();
    let mut rng = seeded(2024);
    let mut sampled = Vec::new();
    while sampled.len() < RANDOM_FAMILIES {
        let p = cut_proofs[rng.random_range(0..cut_proofs.len())];
        let nu = random_family(p, 4, &mut rng);
        if !nu.j.is_empty() {
            sampled.push((p.clone(), nu));
        }
    }
    fails.extend(collect(&sampled, |(p, nu)| report_failure(p, nu, &verify_main_theorem(p, nu, Exec::Sequential))));
    Outcome::new(
        format!(
            "{} proofs, {families} families ({indices} indices) + {RANDOM_FAMILIES} random families with |J| <= 4",
            corpus.len()
        ),
        fails,
    )
}

fn fundamental_lemma(corpus: &[Entry]) -> Outcome {
    let empty = BTreeSet::new();
    let counts = Exec::Parallel.map(corpus, |e| {
        let p = &e.proof;
        // proofs with an empty relation still get the empty family
        let mut fams = chunk_families(p, CHUNK, CAP);
        if fams.is_empty() {
            fams.push(IndexedFamily::default());
        }
        for nu in &fams {
            let rho = match fl_forward(p, nu) {
                Ok(r) => r,
                Err(err) => return (fams.len(), Some(format!("{p}: forward: {err}"))),
            };
            // fl_backward runs the indexed checker on rho first
            let bare = restrict_proof(&rho, &empty);
            if check_indexed_proof(&bare).is_err() || erase_proof(&bare) != *p || erase_proof(&rho) != *p {
                return (fams.len(), Some(format!("{p}: empty restriction differs")));
            }
            match fl_backward(&rho) {
                Ok((nu2, q)) if nu2 == *nu && q == *p => {}
                other => return (fams.len(), Some(format!("{p}: backward gives {other:?}"))),
            }
        }
        (fams.len(), None)
    });
    let families: usize = counts.iter().map(|c| c.0).sum();
    let fails: Vec<String> = counts.into_iter().flat_map(|c| c.1).collect();
    Outcome::new(format!("{} proofs, {families} families round-tripped", corpus.len()), fails)
}

fn coherence(corpus: &[Entry]) -> Outcome {
    let steps = Exec::Parallel.map(corpus, |e| {
        let p = &e.proof;
        let den = interp_denotational(p).unwrap();
        if execute_cuts_rel(&interp_with_cuts(p).unwrap()) != den {
            return (0, Some(format!("{p}: executed cut list differs from composition")));
        }
        let rs = find_redexes(p).unwrap();
        for r in &rs {
            match reduce_step(p, r).map(|q| interp_denotational(&q)) {
                Ok(Ok(d)) if d == den => {}
                other => return (rs.len(), Some(format!("{p} by {r}: {other:?}"))),
            }
        }
        (rs.len(), None)
    });
    let n: usize = steps.iter().map(|s| s.0).sum();
    let fails: Vec<String> = steps.into_iter().flat_map(|s| s.1).collect();
    Outcome::new(format!("{} proofs, {n} single steps", corpus.len()), fails)
}

fn trace_laws() -> Outcome {
    let mut fails = Vec::new();
    let results = check_all(&Law::AXIOMS, LAW_SAMPLES, 7, Exec::Parallel).into_iter().chain(check_all(
        &Law::DERIVED,
        LAW_SAMPLES,
        7,
        Exec::Parallel,
    ));
    let mut passed = 0;
    let mut total = 0;
    for r in results {
        total += 1;
        if r.failures == 0 && r.samples >= LAW_SAMPLES {
            passed += 1;
        } else {
            fails.push(r.to_string());
        }
    }
    let conv = zero_convergence(CONVERGENCE_SAMPLES, 4, 11, Exec::Parallel);
    if !conv.pass() {
        fails.extend(conv.failures.iter().cloned());
    }
    Outcome::new(
        format!(
            "{passed}/{total} laws x {LAW_SAMPLES} graphs, zero convergence {}/{}",
            conv.samples - conv.failures.len().min(conv.samples),
            conv.samples
        ),
        fails,
    )
}

fn main() -> ExitCode {
    // ACCEPTANCE_ONLY=3,4 runs a subset while iterating
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|k| k.trim().parse().ok()).collect());
    let wanted = |k: usize| only.as_ref().is_none_or(|o| o.contains(&k));
    let mut all = true;
    let mut divergent = 0;
    let mut run = |k: usize, name: &str, limit: u64, f: &dyn Fn() -> Outcome| {
        if !wanted(k) {
            return;
        }
        let t = Instant::now();
        let out = f();
        divergent += out.divergent;
        all &= line(k, name, &out, t.elapsed(), Duration::from_secs(limit));
    };
    run(1, "prologue", 1, &prologue);
    run(2, "mismatched cut under a tensor", 1, &exzio);

    let t = Instant::now();
    let corpus = enumerate(SIZE, Exec::Parallel);
    let built = t.elapsed();
    println!("corpus: {} proofs with at most {SIZE} rule nodes [{:.2}s]", corpus.len(), built.as_secs_f64());
    run(3, "main theorem", 600, &|| theorem(&corpus));
    run(4, "fundamental lemma round trip", 300, &|| fundamental_lemma(&corpus));
    run(5, "relational coherence", 600, &|| coherence(&corpus));
    run(6, "trace laws and zero convergence", 120, &trace_laws);

    let ok = divergent == 0;
    println!("criterion 7 (no divergent token runs): {}  {divergent} divergent", if ok { "PASS" } else { "FAIL" });
    all &= ok;
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
