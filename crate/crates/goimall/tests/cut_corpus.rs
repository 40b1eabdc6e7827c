//! Cut elimination over every small proof with a cut.

use goimall::corpus::{chunk_families, with_cuts};
use goimall::cut_rewrite::{find_redexes, normalize_lifted};
use goimall::indexed_logic::{check_indexed_proof, fl_forward};
use goimall::mall_syntax::check_proof;
use goimall::par::Exec;
use goimall::rel_model::{execute_cuts_rel, interp_denotational, interp_with_cuts, is_member};

const SIZE: usize = 6;

#[test]
fn normal_forms_are_cut_free_and_sound() {
    let corpus = with_cuts(SIZE, Exec::Parallel);
    eprintln!("{} proofs with cuts", corpus.len());
    let fails: Vec<String> = Exec::Parallel
        .map(&corpus, |e| {
            let p = &e.proof;
            let fams = chunk_families(p, 4, 16);
            for fam in fams.iter().skip(1) {
                if let Err(err) = normalize_lifted(p, fam, None) {
                    return Some(format!("{p}: {err}"));
                }
            }
            let fam = fams.first().cloned().unwrap_or_default();
            let steps = match normalize_lifted(p, &fam, None) {
                Ok(s) => s,
                Err(err) => return Some(format!("{p}: {err}")),
            };
            let nf = steps.last().map(|s| s.after.0.clone()).unwrap();
            if !find_redexes(&nf).unwrap().is_empty() || !nf.is_cut_free() {
                return Some(format!("{p}: not normal"));
            }
            if check_proof(&nf).unwrap().context != e.seq.context {
                return Some(format!("{p}: conclusion changed"));
            }
            if interp_denotational(&nf).unwrap() != interp_denotational(p).unwrap() {
                return Some(format!("{p}: denotation changed, nf {nf}"));
            }
            if execute_cuts_rel(&interp_with_cuts(p).unwrap()) != interp_denotational(p).unwrap() {
                return Some(format!("{p}: execution differs from composition"));
            }
            for s in &steps {
                let (q, nu) = &s.after;
                if !nu.j.is_subset(&s.before.1.j) {
                    return Some(format!("{p}: J grew at {}", s.redex));
                }
                match fl_forward(q, nu) {
                    Ok(rho) if check_indexed_proof(&rho).is_ok() => {}
                    _ => return Some(format!("{p}: lifted family has no indexed proof at {}", s.redex)),
                }
                for (j, x) in &nu.values {
                    if s.before.1.values[j].ctx != x.ctx {
                        return Some(format!("{p}: context point changed at {}", s.redex));
                    }
                    if !is_member(q, x).unwrap() {
                        return Some(format!("{p}: lifted point not a member at {}", s.redex));
                    }
                }
            }
            None
        })
        .into_iter()
        .flatten()
        .collect();
    assert!(fails.is_empty(), "{} failures, first: {:#?}", fails.len(), &fails[..fails.len().min(5)]);
}
