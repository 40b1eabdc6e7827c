//! Gentzen cut elimination on proofs with a cut stack, lifted to families.
//!
//! Rewrites act on [`Decorated`] trees. Every node built by a rewrite
//! recomposes its points from its premises, so the family after a step is
//! read off the new root: indices whose point no longer exists are dropped.
//! That happens exactly at a mismatched axiom cut and at the branch a `&`/`+`
//! cut discards.
//!
//! Context order is tracked with integer labels: every rewrite wraps its
//! result in exchanges so the conclusion keeps the original context order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::indexed_logic::{IndexSet, IndexedFamily};
use crate::mall_syntax::{fmt_path, ProofTerm, Rule};
use crate::rel_model::{Decorated, MembershipError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RedexKind {
    /// The side names the premise that is an axiom (possibly under exchanges).
    AxCut(Side),
    TensorPar,
    /// `i` is the injection used by the `+` premise.
    WithPlus(u8),
    /// `1` against `bot`.
    UnitCut,
    /// The cut moves into both premises of a `&` on the given side.
    CommuteWith(Side),
    /// The cut moves past the named rule on the given side (`ex` for a
    /// chain of exchanges).
    CommuteOther(&'static str, Side),
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RedexKind::AxCut(_) => write!(f, "AxCut"),
            RedexKind::TensorPar => write!(f, "TensorPar"),
            RedexKind::WithPlus(i) => write!(f, "WithPlus({i})"),
            RedexKind::UnitCut => write!(f, "UnitCut"),
            RedexKind::CommuteWith(s) => write!(f, "CommuteWith({s})"),
            RedexKind::CommuteOther(r, s) => write!(f, "CommuteOther({r},{s})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Redex {
    pub path: Vec<usize>,
    pub kind: RedexKind,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, fmt_path(&self.path))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no redex {0} in this proof")]
    PatternMismatch(String),
    #[error("rewrite produced an ill-formed proof: {0}")]
    Broken(String),
    #[error("step budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Membership(#[from] MembershipError),
}

fn broken(e: String) -> RewriteError {
    RewriteError::Broken(e)
}

type Label = u32;
const CUT_A: Label = 1_000_000;
const CUT_B: Label = 1_000_001;

/// Strips a chain of exchanges; returns the first non-exchange node and the
/// swaps from the outside in.
fn peel(d: &Decorated) -> (&Decorated, Vec<(usize, usize)>) {
    let mut cur = d;
    let mut swaps = Vec::new();
    while let Rule::Exch(i, j) = cur.rule {
        swaps.push((i, j));
        cur = &cur.kids[0];
    }
    (cur, swaps)
}

fn inner_labels(outer: &[Label], swaps: &[(usize, usize)]) -> Vec<Label> {
    let mut l = outer.to_vec();
    for &(i, j) in swaps {
        l.swap(i, j);
    }
    l
}

fn without(l: &[Label], x: Label) -> Vec<Label> {
    l.iter().copied().filter(|y| *y != x).collect()
}

fn without_all(l: &[Label], xs: &[Label]) -> Vec<Label> {
    l.iter().copied().filter(|y| !xs.contains(y)).collect()
}

fn concat(a: &[Label], b: &[Label]) -> Vec<Label> {
    a.iter().chain(b).copied().collect()
}

/// Where an entry of a node's cut stack comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Origin {
    Kid(usize, usize),
    Own,
}

/// The origins of each stack entry of a node, following the stack layout of
/// the rules: premises in order, a cut's own pair last, and for `&` the
/// unshared entries of both premises before the superposed ones.
fn layout(rule: &Rule, kids: &[&crate::mall_syntax::Sequent]) -> Vec<Vec<Origin>> {
    match rule {
        Rule::With(sigma) => {
            let mut out = Vec::new();
            for (i, k) in kids.iter().enumerate() {
                for u in 0..k.cuts.len() {
                    let shared = sigma.iter().any(|&(a, b)| if i == 0 { a == u } else { b == u });
                    if !shared {
                        out.push(vec![Origin::Kid(i, u)]);
                    }
                }
            }
            out.extend(sigma.iter().map(|&(a, b)| vec![Origin::Kid(0, a), Origin::Kid(1, b)]));
            out
        }
        _ => {
            let mut out: Vec<Vec<Origin>> = kids
                .iter()
                .enumerate()
                .flat_map(|(i, k)| (0..k.cuts.len()).map(move |u| vec![Origin::Kid(i, u)]))
                .collect();
            if *rule == Rule::Cut {
                out.push(vec![Origin::Own]);
            }
            out
        }
    }
}

fn layout_of(d: &Decorated) -> Vec<Vec<Origin>> {
    let seqs: Vec<_> = d.kids.iter().map(|k| &k.seq).collect();
    layout(&d.rule, &seqs)
}

/// A subproof whose stack entries are tagged with the entries of the
/// rewritten cut they descend from.
#[derive(Clone)]
struct T {
    d: Decorated,
    tags: Vec<Vec<usize>>,
}

impl T {
    fn sub(&self, i: usize) -> T {
        let mut tags = vec![Vec::new(); self.d.kids[i].seq.cuts.len()];
        for (e, os) in layout_of(&self.d).into_iter().enumerate() {
            for o in os {
                if let Origin::Kid(k, u) = o {
                    if k == i {
                        tags[u] = self.tags[e].clone();
                    }
                }
            }
        }
        T { d: self.d.kids[i].clone(), tags }
    }

    fn mk(rule: Rule, kids: Vec<T>, own: &[usize]) -> Result<T, RewriteError> {
        let (ds, kid_tags): (Vec<Decorated>, Vec<Vec<Vec<usize>>>) = kids.into_iter().map(|t| (t.d, t.tags)).unzip();
        let d = Decorated::mk(rule, ds).map_err(broken)?;
        let tags = layout_of(&d)
            .into_iter()
            .map(|os| {
                let mut v: Vec<usize> = Vec::new();
                for o in os {
                    match o {
                        Origin::Kid(i, u) => v.extend(&kid_tags[i][u]),
                        Origin::Own => v.extend(own),
                    }
                }
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        Ok(T { d, tags })
    }

    fn leaf(d: Decorated) -> T {
        T { d, tags: Vec::new() }
    }

    /// Strips exchanges; returns the first other node and the swaps from
    /// the outside in.
    fn peel(&self) -> (T, Vec<(usize, usize)>) {
        let mut cur = self.clone();
        let mut swaps = Vec::new();
        while let Rule::Exch(i, j) = cur.d.rule {
            swaps.push((i, j));
            cur = cur.sub(0);
        }
        (cur, swaps)
    }

    fn rule(&self) -> &Rule {
        &self.d.rule
    }

    fn ctx_len(&self) -> usize {
        self.d.seq.context.len()
    }
}

/// Wraps `t` in exchanges taking context order `cur` to `target`.
fn arrange(mut t: T, cur: &[Label], target: &[Label]) -> Result<T, RewriteError> {
    debug_assert_eq!(cur.len(), target.len());
    let mut cur = cur.to_vec();
    for pos in 0..target.len() {
        if cur[pos] != target[pos] {
            let k = (pos + 1..cur.len())
                .find(|&k| cur[k] == target[pos])
                .ok_or_else(|| broken(format!("label {} missing while arranging", target[pos])))?;
            t = T::mk(Rule::Exch(pos, k), vec![t], &[])?;
            cur.swap(pos, k);
        }
    }
    Ok(t)
}

struct Ctx {
    p: T,
    q: T,
    pl: Vec<Label>,
    ql: Vec<Label>,
    target: Vec<Label>,
    fresh: Label,
    /// Tag of the cut pair being reduced, carried by the cuts a commutation
    /// moves upwards; a principal step cuts on subformulas instead.
    own: Option<usize>,
}

impl Ctx {
    fn new(cut: &Decorated) -> Ctx {
        let root = T { d: cut.clone(), tags: (0..cut.seq.cuts.len()).map(|k| vec![k]).collect() };
        let (p, q) = (root.sub(0), root.sub(1));
        let n1 = p.ctx_len() as Label - 1;
        let n2 = q.ctx_len() as Label - 1;
        let mut pl: Vec<Label> = (0..n1).collect();
        pl.push(CUT_A);
        let mut ql: Vec<Label> = (n1..n1 + n2).collect();
        ql.push(CUT_B);
        let own = None;
        Ctx { p, q, pl, ql, target: (0..n1 + n2).collect(), fresh: 2_000_000, own }
    }

    fn fresh(&mut self) -> Label {
        self.fresh += 1;
        self.fresh
    }

    fn init(l: &[Label]) -> &[Label] {
        &l[..l.len() - 1]
    }

    fn cut(&self, p: T, q: T) -> Result<T, RewriteError> {
        T::mk(Rule::Cut, vec![p, q], self.own.as_slice())
    }

    /// Cuts `r` (labelled `l`, containing the active label) against the
    /// other premise, moving the active formula last first.
    fn cut_into(&self, side: Side, r: T, l: &[Label]) -> Result<(T, Vec<Label>), RewriteError> {
        match side {
            Side::Left => {
                let rest = without(l, CUT_A);
                let r = arrange(r, l, &concat(&rest, &[CUT_A]))?;
                Ok((self.cut(r, self.q.clone())?, concat(&rest, Self::init(&self.ql))))
            }
            Side::Right => {
                let rest = without(l, CUT_B);
                let r = arrange(r, l, &concat(&rest, &[CUT_B]))?;
                Ok((self.cut(self.p.clone(), r)?, concat(Self::init(&self.pl), &rest)))
            }
        }
    }

    /// `cut_into` followed by moving the `last` labels to the end.
    fn cut_into_then(&self, side: Side, r: T, l: &[Label], last: &[Label]) -> Result<(T, Vec<Label>), RewriteError> {
        let (c, lc) = self.cut_into(side, r, l)?;
        let want = concat(&without_all(&lc, last), last);
        Ok((arrange(c, &lc, &want)?, want))
    }
}

/// Classifies a cut node; `None` for cuts this strategy does not reduce
/// directly (a premise that is itself a cut).
fn classify(cut: &Decorated) -> Option<RedexKind> {
    debug_assert_eq!(cut.rule, Rule::Cut);
    let (p, q) = (&cut.kids[0], &cut.kids[1]);
    let ((rp, sp), (rq, sq)) = (peel(p), peel(q));
    if matches!(rp.rule, Rule::Ax(_)) {
        return Some(RedexKind::AxCut(Side::Left));
    }
    if matches!(rq.rule, Rule::Ax(_)) {
        return Some(RedexKind::AxCut(Side::Right));
    }
    if p.rule.is_logical() && q.rule.is_logical() {
        return match (&p.rule, &q.rule) {
            (Rule::Tensor, Rule::Par) | (Rule::Par, Rule::Tensor) => Some(RedexKind::TensorPar),
            (Rule::With(_), Rule::Plus1(_)) | (Rule::Plus1(_), Rule::With(_)) => Some(RedexKind::WithPlus(1)),
            (Rule::With(_), Rule::Plus2(_)) | (Rule::Plus2(_), Rule::With(_)) => Some(RedexKind::WithPlus(2)),
            (Rule::OneI, Rule::BotI) | (Rule::BotI, Rule::OneI) => Some(RedexKind::UnitCut),
            _ => None,
        };
    }
    let (side, d, r, swaps, active) =
        if !p.rule.is_logical() { (Side::Left, p, rp, sp, CUT_A) } else { (Side::Right, q, rq, sq, CUT_B) };
    let mut outer: Vec<Label> = (0..d.seq.context.len() as Label - 1).collect();
    outer.push(active);
    let inner = inner_labels(&outer, &swaps);
    if *inner.last()? == active {
        if swaps.is_empty() {
            // a bare cut as premise: its inner cuts go first
            return None;
        }
        return Some(RedexKind::CommuteOther("ex", side));
    }
    match r.rule {
        Rule::With(_) => Some(RedexKind::CommuteWith(side)),
        Rule::Par => Some(RedexKind::CommuteOther("par", side)),
        Rule::BotI => Some(RedexKind::CommuteOther("bot", side)),
        Rule::Plus1(_) => Some(RedexKind::CommuteOther("plus1", side)),
        Rule::Plus2(_) => Some(RedexKind::CommuteOther("plus2", side)),
        Rule::Tensor => Some(RedexKind::CommuteOther("tensor", side)),
        Rule::TopI(_) => Some(RedexKind::CommuteOther("top", side)),
        _ => None,
    }
}

fn rewrite(cut: &Decorated, kind: &RedexKind) -> Result<T, RewriteError> {
    let mut cx = Ctx::new(cut);
    if matches!(kind, RedexKind::CommuteWith(_) | RedexKind::CommuteOther(..)) {
        cx.own = Some(cut.seq.cuts.len() - 1);
    }
    let width = cut.pts.len();
    let mismatch = || RewriteError::PatternMismatch(kind.to_string());
    match kind {
        RedexKind::AxCut(side) => {
            let (keep, keep_l, relabel) = match side {
                Side::Left => (cx.q.clone(), cx.ql.clone(), (CUT_B, 0)),
                Side::Right => (cx.p.clone(), cx.pl.clone(), (CUT_A, cx.pl.len() as Label - 1)),
            };
            let cur: Vec<Label> = keep_l.iter().map(|&l| if l == relabel.0 { relabel.1 } else { l }).collect();
            let mut out = arrange(keep, &cur, &cx.target)?;
            if out.d.kids.len() == 1 && matches!(peel(&out.d).0.rule, Rule::Ax(_)) && out.ctx_len() == 2 {
                // an exchanged axiom is again an axiom
                let pts = out.d.pts.clone();
                out = T::leaf(Decorated::leaf(Rule::Ax(out.d.seq.context[0].clone()), pts).map_err(broken)?);
            }
            for j in 0..width {
                let a = cx.p.d.pts[j].as_ref().and_then(|x| x.ctx.last());
                let b = cx.q.d.pts[j].as_ref().and_then(|x| x.ctx.last());
                if a.is_none() || a != b {
                    out.d.pts[j] = None;
                }
            }
            Ok(out)
        }
        RedexKind::TensorPar => match (cx.p.rule(), cx.q.rule()) {
            (Rule::Tensor, Rule::Par) => {
                let (p1, p2, q1) = (cx.p.sub(0), cx.p.sub(1), cx.q.sub(0));
                let c1 = cx.cut(p2, q1)?;
                cx.cut(p1, c1)
            }
            (Rule::Par, Rule::Tensor) => {
                let q1 = cx.p.sub(0);
                let (t1, t2) = (cx.q.sub(0), cx.q.sub(1));
                let na = t1.ctx_len() - 1;
                let gc = Ctx::init(&cx.pl).to_vec();
                let (ga, gb) = (cx.ql[..na].to_vec(), Ctx::init(&cx.ql)[na..].to_vec());
                let f = cx.fresh();
                let c1 = cx.cut(q1, t2)?;
                let l1 = concat(&concat(&gc, &[f]), &gb);
                let want = concat(&concat(&gc, &gb), &[f]);
                let c1 = arrange(c1, &l1, &want)?;
                let c2 = cx.cut(c1, t1)?;
                arrange(c2, &concat(&concat(&gc, &gb), &ga), &cx.target)
            }
            _ => Err(mismatch()),
        },
        RedexKind::WithPlus(_) => {
            let (w, plus, with_left) = match (cx.p.rule(), cx.q.rule()) {
                (Rule::With(_), Rule::Plus1(_) | Rule::Plus2(_)) => (&cx.p, &cx.q, true),
                (Rule::Plus1(_) | Rule::Plus2(_), Rule::With(_)) => (&cx.q, &cx.p, false),
                _ => return Err(mismatch()),
            };
            let i = if matches!(plus.rule(), Rule::Plus1(_)) { 0 } else { 1 };
            let (wi, r) = (w.sub(i), plus.sub(0));
            if with_left {
                cx.cut(wi, r)
            } else {
                cx.cut(r, wi)
            }
        }
        RedexKind::UnitCut => match (cx.p.rule(), cx.q.rule()) {
            (Rule::OneI, Rule::BotI) => Ok(cx.q.sub(0)),
            (Rule::BotI, Rule::OneI) => Ok(cx.p.sub(0)),
            _ => Err(mismatch()),
        },
        RedexKind::CommuteWith(side) | RedexKind::CommuteOther(_, side) => {
            let side = *side;
            let (d, own_l, active) = match side {
                Side::Left => (cx.p.clone(), cx.pl.clone(), CUT_A),
                Side::Right => (cx.q.clone(), cx.ql.clone(), CUT_B),
            };
            let (r, swaps) = d.peel();
            let rl = inner_labels(&own_l, &swaps);
            let r_last = *rl.last().expect("nonempty");
            if r_last == active {
                let (c, lc) = match side {
                    Side::Left => (cx.cut(r, cx.q.clone())?, concat(Ctx::init(&rl), Ctx::init(&cx.ql))),
                    Side::Right => (cx.cut(cx.p.clone(), r)?, concat(Ctx::init(&cx.pl), Ctx::init(&rl))),
                };
                return arrange(c, &lc, &cx.target);
            }
            let theta = Ctx::init(&rl).to_vec();
            let rule = r.rule().clone();
            match &rule {
                Rule::Par | Rule::BotI | Rule::Plus1(_) | Rule::Plus2(_) => {
                    let m = match rule {
                        Rule::Par => 2,
                        Rule::BotI => 0,
                        _ => 1,
                    };
                    let fresh: Vec<Label> = (0..m).map(|_| cx.fresh()).collect();
                    let l1 = concat(&theta, &fresh);
                    let (c, lc) = cx.cut_into_then(side, r.sub(0), &l1, &fresh)?;
                    let n = T::mk(rule, vec![c], &[])?;
                    let ln = concat(&without_all(&lc, &fresh), &[r_last]);
                    arrange(n, &ln, &cx.target)
                }
                Rule::Tensor => {
                    let t1 = r.d.kids[0].seq.context.len() - 1;
                    let (f1, f2) = (cx.fresh(), cx.fresh());
                    let mut ks = [concat(&theta[..t1], &[f1]), concat(&theta[t1..], &[f2])];
                    let mut kids = [r.sub(0), r.sub(1)];
                    let t = if ks[0].contains(&active) { 0 } else { 1 };
                    let f = if t == 0 { f1 } else { f2 };
                    let (c, lc) = cx.cut_into_then(side, kids[t].clone(), &ks[t], &[f])?;
                    kids[t] = c;
                    ks[t] = lc;
                    let n = T::mk(Rule::Tensor, kids.to_vec(), &[])?;
                    let ln = concat(&concat(Ctx::init(&ks[0]), Ctx::init(&ks[1])), &[r_last]);
                    arrange(n, &ln, &cx.target)
                }
                Rule::With(sigma) => {
                    let f = cx.fresh();
                    let k = concat(&theta, &[f]);
                    let (c1, lc) = cx.cut_into_then(side, r.sub(0), &k, &[f])?;
                    let (c2, lc2) = cx.cut_into_then(side, r.sub(1), &k, &[f])?;
                    debug_assert_eq!(lc, lc2);
                    let (s1, s2) = (r.d.kids[0].seq.cuts.len(), r.d.kids[1].seq.cuts.len());
                    let new_sigma: Vec<(usize, usize)> = match side {
                        Side::Left => {
                            let sq = cx.q.d.seq.cuts.len();
                            (0..sq).map(|k| (s1 + k, s2 + k)).chain(sigma.iter().copied()).collect()
                        }
                        Side::Right => {
                            let sp = cx.p.d.seq.cuts.len();
                            (0..sp).map(|k| (k, k)).chain(sigma.iter().map(|&(a, b)| (sp + a, sp + b))).collect()
                        }
                    };
                    let n = T::mk(Rule::With(new_sigma), vec![c1, c2], &[])?;
                    let ln = concat(&without(&lc, f), &[r_last]);
                    arrange(n, &ln, &cx.target)
                }
                Rule::TopI(_) => {
                    let pos = theta.iter().position(|&l| l == active).expect("active label present");
                    let mut own = r.d.seq.context[..theta.len()].to_vec();
                    own.remove(pos);
                    let theta_rest = without(&theta, active);
                    let (ctx, ln) = match side {
                        Side::Left => {
                            let other = &cx.q.d.seq.context[..cx.q.ctx_len() - 1];
                            (
                                own.iter().chain(other).cloned().collect::<Vec<_>>(),
                                concat(&concat(&theta_rest, Ctx::init(&cx.ql)), &[r_last]),
                            )
                        }
                        Side::Right => {
                            let other = &cx.p.d.seq.context[..cx.p.ctx_len() - 1];
                            (
                                other.iter().chain(&own).cloned().collect::<Vec<_>>(),
                                concat(&concat(Ctx::init(&cx.pl), &theta_rest), &[r_last]),
                            )
                        }
                    };
                    let n = Decorated::fresh_leaf(Rule::TopI(ctx), width).map_err(broken)?;
                    arrange(T::leaf(n), &ln, &cx.target)
                }
                _ => Err(mismatch()),
            }
        }
    }
}

fn collect_redexes(d: &Decorated, path: &mut Vec<usize>, out: &mut Vec<Redex>) {
    for (i, k) in d.kids.iter().enumerate() {
        path.push(i);
        collect_redexes(k, path, out);
        path.pop();
    }
    if d.rule == Rule::Cut {
        if let Some(kind) = classify(d) {
            out.push(Redex { path: path.clone(), kind });
        }
    }
}

fn plain(p: &ProofTerm) -> Result<Decorated, RewriteError> {
    Ok(Decorated::plain(p)?)
}

/// All reducible cuts, leftmost-innermost first.
pub fn find_redexes(p: &ProofTerm) -> Result<Vec<Redex>, RewriteError> {
    let d = plain(p)?;
    let mut out = Vec::new();
    collect_redexes(&d, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Stack map of a rewrite: for each old stack entry, its positions in the
/// new stack (none when the cut disappears, two when it is duplicated).
type StackMap = Vec<Vec<usize>>;

/// Puts `new` in place of kid `i` of `old`. Superpositions of `&` nodes
/// follow the stack map; a superposed pair whose entry vanished or split is
/// no longer superposed.
fn rebuild(old: Decorated, i: usize, new: Decorated, m: &StackMap) -> Result<(Decorated, StackMap), RewriteError> {
    let old_layout = layout_of(&old);
    let Decorated { rule, mut kids, .. } = old;
    let rule = match rule {
        Rule::With(sigma) => Rule::With(
            sigma
                .into_iter()
                .filter_map(|(a, b)| {
                    let u = if i == 0 { a } else { b };
                    match m[u].as_slice() {
                        [v] if i == 0 => Some((*v, b)),
                        [v] => Some((a, *v)),
                        _ => None,
                    }
                })
                .collect(),
        ),
        r => r,
    };
    kids[i] = new;
    let node = Decorated::mk(rule, kids).map_err(broken)?;
    let mut index = std::collections::HashMap::new();
    for (e, os) in layout_of(&node).into_iter().enumerate() {
        for o in os {
            index.insert(o, e);
        }
    }
    let map = old_layout
        .into_iter()
        .map(|os| {
            let mut v: Vec<usize> = Vec::new();
            for o in os {
                match o {
                    Origin::Kid(k, u) if k == i => v.extend(m[u].iter().map(|&w| index[&Origin::Kid(k, w)])),
                    o => v.push(index[&o]),
                }
            }
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    Ok((node, map))
}

fn replace(
    root: Decorated,
    path: &[usize],
    new: Decorated,
    m: StackMap,
) -> Result<(Decorated, StackMap), RewriteError> {
    match path.split_first() {
        None => Ok((new, m)),
        Some((&i, rest)) => {
            let kid = root.kids[i].clone();
            let (k, km) = replace(kid, rest, new, m)?;
            rebuild(root, i, k, &km)
        }
    }
}

fn step_decorated(root: Decorated, r: &Redex) -> Result<Decorated, RewriteError> {
    let cut = root.at(&r.path).ok_or_else(|| RewriteError::PatternMismatch(r.to_string()))?;
    if cut.rule != Rule::Cut || classify(cut).as_ref() != Some(&r.kind) {
        return Err(RewriteError::PatternMismatch(r.to_string()));
    }
    let new = rewrite(cut, &r.kind)?;
    if new.d.seq.context != cut.seq.context {
        return Err(broken(format!("{r} changed the conclusion context")));
    }
    let mut m: StackMap = vec![Vec::new(); cut.seq.cuts.len()];
    for (e, tags) in new.tags.iter().enumerate() {
        for &k in tags {
            if new.d.seq.cuts[e] != cut.seq.cuts[k] {
                return Err(broken(format!("{r} mistracked a stack entry")));
            }
            m[k].push(e);
        }
    }
    let path = r.path.clone();
    Ok(replace(root, &path, new.d, m)?.0)
}

/// One Gentzen step.
pub fn reduce_step(p: &ProofTerm, r: &Redex) -> Result<ProofTerm, RewriteError> {
    Ok(step_decorated(plain(p)?, r)?.to_term())
}

/// One step together with its action on a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftStep {
    pub redex: Redex,
    pub before: (ProofTerm, IndexedFamily),
    pub after: (ProofTerm, IndexedFamily),
    pub dropped: IndexSet,
}

impl fmt::Display for LiftStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::indexed_logic::fmt_set;
        write!(
            f,
            "{}  J: {} -> {}  dropped: {}",
            self.redex,
            fmt_set(&self.before.1.j),
            fmt_set(&self.after.1.j),
            fmt_set(&self.dropped)
        )
    }
}

pub fn lift_step(p: &ProofTerm, nu: &IndexedFamily, r: &Redex) -> Result<LiftStep, RewriteError> {
    let names: Vec<String> = nu.values.keys().cloned().collect();
    let xs: Vec<_> = nu.values.values().cloned().collect();
    let root = step_decorated(Decorated::decorate(p, &xs)?, r)?;
    let mut values = BTreeMap::new();
    let mut dropped = IndexSet::new();
    for (j, x) in names.into_iter().zip(&root.pts) {
        match x {
            Some(x) => {
                values.insert(j, x.clone());
            }
            None => {
                dropped.insert(j);
            }
        }
    }
    Ok(LiftStep {
        redex: r.clone(),
        before: (p.clone(), nu.clone()),
        after: (root.to_term(), IndexedFamily::new(values)),
        dropped,
    })
}

pub fn default_budget(p: &ProofTerm) -> usize {
    10 * p.size() * p.size()
}

/// Reduces leftmost-innermost until no cut is left.
pub fn normalize_lifted(
    p: &ProofTerm,
    nu: &IndexedFamily,
    budget: Option<usize>,
) -> Result<Vec<LiftStep>, RewriteError> {
    let budget = budget.unwrap_or_else(|| default_budget(p));
    let mut steps: Vec<LiftStep> = Vec::new();
    let (mut cur, mut fam) = (p.clone(), nu.clone());
    while let Some(r) = find_redexes(&cur)?.into_iter().next() {
        if steps.len() >= budget {
            return Err(RewriteError::BudgetExceeded(budget));
        }
        let s = lift_step(&cur, &fam, &r)?;
        (cur, fam) = s.after.clone();
        steps.push(s);
    }
    if !cur.is_cut_free() {
        return Err(broken("normal form still contains a cut".into()));
    }
    Ok(steps)
}

/// The cut-free normal form.
pub fn normalize(p: &ProofTerm) -> Result<ProofTerm, RewriteError> {
    let steps = normalize_lifted(p, &IndexedFamily::default(), None)?;
    Ok(steps.last().map(|s| s.after.0.clone()).unwrap_or_else(|| p.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexed_logic::index_set;
    use crate::mall_syntax::{check_proof, parse_proof};
    use crate::rel_model::{interp_denotational, interp_with_cuts};

    fn pi1() -> ProofTerm {
        parse_proof("(cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot))").unwrap()
    }

    #[test]
    fn prologue_redexes_and_steps() {
        let p1 = pi1();
        let rs = find_redexes(&p1).unwrap();
        assert_eq!(rs, vec![Redex { path: vec![], kind: RedexKind::WithPlus(1) }]);
        let p2 = reduce_step(&p1, &rs[0]).unwrap();
        assert_eq!(p2, parse_proof("(cut (ax bot) (ax 1))").unwrap());
        let rs2 = find_redexes(&p2).unwrap();
        assert!(matches!(rs2[0].kind, RedexKind::AxCut(_)));
        let p3 = reduce_step(&p2, &rs2[0]).unwrap();
        assert_eq!(p3, parse_proof("(ax bot)").unwrap());
        assert!(find_redexes(&p3).unwrap().is_empty());
    }

    #[test]
    fn prologue_lifting() {
        let p = pi1();
        let fam = IndexedFamily::numbered(interp_with_cuts(&p).unwrap());
        let steps = normalize_lifted(&p, &fam, None).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].after.1.j, index_set(["1"]));
        assert_eq!(steps[0].dropped, index_set(["2"]));
        assert_eq!(steps[1].after.1.j, index_set(["1"]));
        assert!(steps[1].dropped.is_empty());
    }

    #[test]
    fn mismatched_axiom_cut_drops() {
        // an axiom on 1&1 cut against a with
        let p = parse_proof("(cut (with (ax bot) (ax bot) ()) (ax (1 & 1)))").unwrap();
        check_proof(&p).unwrap();
        let fam = IndexedFamily::numbered(interp_with_cuts(&p).unwrap());
        assert_eq!(fam.j.len(), 4);
        let s = lift_step(&p, &fam, &find_redexes(&p).unwrap()[0]).unwrap();
        assert_eq!(s.dropped.len(), 2);
    }

    #[test]
    fn commutations_preserve_semantics() {
        let texts = [
            "(cut (ex (par (ex (ax 1) 0 1)) 0 0) (one))",
            "(cut (ex (bot (ax 1)) 1 2) (ax bot))",
            "(cut (ex (tensor (ax 1) (one)) 0 2) (bot (one)))",
            "(cut (one) (ex (with (bot (one)) (bot (one)) ()) 0 1))",
            "(cut (ex (top (1)) 0 1) (top ()))",
            "(cut (tensor (ax 1) (one)) (par (ax bot)))",
        ];
        for t in texts {
            let p = match parse_proof(t) {
                Ok(p) if check_proof(&p).is_ok() => p,
                _ => continue,
            };
            let nf = normalize(&p).unwrap();
            assert!(nf.is_cut_free(), "{t}");
            assert_eq!(check_proof(&nf).unwrap().context, check_proof(&p).unwrap().context, "{t}");
            assert_eq!(interp_denotational(&nf).unwrap(), interp_denotational(&p).unwrap(), "{t}");
        }
    }
}
