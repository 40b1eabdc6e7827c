//! Exhaustive small proofs and families drawn from their relations.
//!
//! Proofs are generated bottom-up by node count. Leaves are the axioms on
//! `1`, `bot`, `1 & 1` and `bot & bot`, `one`, and `top` over `[]` or `[0]`; `+` side formulas are units; an
//! exchange never sits directly on another exchange. Every superposition of
//! a `&` whose premises carry compatible stacks is generated.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::indexed_logic::IndexedFamily;
use crate::mall_syntax::{rule_conclusion, Formula, ProofTerm, Rule, Sequent, SigmaSpec};
use crate::par::Exec;
use crate::rel_model::{interp_with_cuts, PointVec};

#[derive(Clone, Debug)]
pub struct Entry {
    pub proof: ProofTerm,
    pub seq: Sequent,
}

fn leaves() -> Vec<Rule> {
    vec![
        Rule::Ax(Formula::One),
        Rule::Ax(Formula::Bot),
        Rule::Ax(Formula::with(Formula::One, Formula::One)),
        Rule::Ax(Formula::with(Formula::Bot, Formula::Bot)),
        Rule::OneI,
        Rule::TopI(vec![]),
        Rule::TopI(vec![Formula::Zero]),
    ]
}

fn unary_rules(s: &Sequent, is_exch: bool) -> Vec<Rule> {
    let n = s.context.len();
    let mut out = vec![Rule::BotI];
    if n >= 2 {
        out.push(Rule::Par);
    }
    for g in [Formula::One, Formula::Bot] {
        out.push(Rule::Plus1(g.clone()));
        out.push(Rule::Plus2(g));
    }
    if !is_exch {
        for i in 0..n {
            for j in i + 1..n {
                out.push(Rule::Exch(i, j));
            }
        }
    }
    out
}

/// Every partial matching between two cut stacks pairing equal entries.
pub fn sigma_choices(d1: &Sequent, d2: &Sequent) -> Vec<SigmaSpec> {
    fn go(i: usize, d1: &Sequent, d2: &Sequent, used: &mut Vec<bool>, cur: &mut SigmaSpec, out: &mut Vec<SigmaSpec>) {
        if i == d1.cuts.len() {
            out.push(cur.clone());
            return;
        }
        go(i + 1, d1, d2, used, cur, out);
        for j in 0..d2.cuts.len() {
            if !used[j] && d1.cuts[i] == d2.cuts[j] {
                used[j] = true;
                cur.push((i, j));
                go(i + 1, d1, d2, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, d1, d2, &mut vec![false; d2.cuts.len()], &mut Vec::new(), &mut out);
    out
}

fn binary_rules(a: &Sequent, b: &Sequent) -> Vec<Rule> {
    let mut out = vec![Rule::Tensor, Rule::Cut];
    let (na, nb) = (a.context.len(), b.context.len());
    if na == nb && a.context[..na - 1] == b.context[..nb - 1] {
        out.extend(sigma_choices(a, b).into_iter().map(Rule::With));
    }
    out
}

fn build(rule: Rule, kids: &[&Entry]) -> Option<Entry> {
    let seqs: Vec<&Sequent> = kids.iter().map(|k| &k.seq).collect();
    let seq = rule_conclusion(&rule, &seqs).ok()?;
    let proof = ProofTerm::from_parts(rule, kids.iter().map(|k| k.proof.clone()).collect());
    Some(Entry { proof, seq })
}

/// All proofs with at most `max_size` rule nodes, grouped by size.
pub fn enumerate_by_size(max_size: usize, exec: Exec) -> Vec<Vec<Entry>> {
    let mut by_size: Vec<Vec<Entry>> = vec![Vec::new(); max_size + 1];
    if max_size == 0 {
        return by_size;
    }
    by_size[1] = leaves().into_iter().filter_map(|r| build(r, &[])).collect();
    for n in 2..=max_size {
        let mut level: Vec<Entry> = Vec::new();
        let prev = &by_size[n - 1];
        let unary = exec.map(prev, |e| {
            let is_exch = matches!(e.proof, ProofTerm::Exch(..));
            unary_rules(&e.seq, is_exch).into_iter().filter_map(|r| build(r, &[e])).collect::<Vec<_>>()
        });
        level.extend(unary.into_iter().flatten());
        let splits: Vec<(usize, usize)> = (1..n - 1).map(|a| (a, n - 1 - a)).collect();
        for (a, b) in splits {
            let lefts = &by_size[a];
            let rights = &by_size[b];
            let made = exec.map(lefts, |l| {
                let mut v = Vec::new();
                for r in rights {
                    for rule in binary_rules(&l.seq, &r.seq) {
                        v.extend(build(rule, &[l, r]));
                    }
                }
                v
            });
            level.extend(made.into_iter().flatten());
        }
        by_size[n] = level;
    }
    by_size
}

pub fn enumerate(max_size: usize, exec: Exec) -> Vec<Entry> {
    enumerate_by_size(max_size, exec).into_iter().flatten().collect()
}

/// Proofs of the corpus that contain at least one cut.
pub fn with_cuts(max_size: usize, exec: Exec) -> Vec<Entry> {
    enumerate(max_size, exec).into_iter().filter(|e| !e.proof.is_cut_free()).collect()
}

/// Members of `|p|`, in order, capped at `cap`.
pub fn members(p: &ProofTerm, cap: usize) -> Vec<PointVec> {
    interp_with_cuts(p).map(|r| r.into_iter().take(cap).collect()).unwrap_or_default()
}

/// Splits the members of `p` into families of at most `chunk` indices,
/// named "1".."chunk".
pub fn chunk_families(p: &ProofTerm, chunk: usize, cap: usize) -> Vec<IndexedFamily> {
    members(p, cap).chunks(chunk.max(1)).map(|c| IndexedFamily::numbered(c.iter().cloned())).collect()
}

/// A random family of up to `max_len` members (repetitions allowed).
pub fn random_family(p: &ProofTerm, max_len: usize, rng: &mut impl Rng) -> IndexedFamily {
    let ms = members(p, usize::MAX);
    if ms.is_empty() {
        return IndexedFamily::new(BTreeMap::new());
    }
    let n = rng.random_range(0..=max_len);
    IndexedFamily::numbered((0..n).map(|_| ms.choose(rng).expect("nonempty").clone()))
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct conclusions seen in a corpus, a quick summary statistic.
pub fn conclusions(entries: &[Entry]) -> BTreeSet<String> {
    entries.iter().map(|e| e.seq.to_string()).collect()
}
