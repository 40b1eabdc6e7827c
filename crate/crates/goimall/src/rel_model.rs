//! Relational semantics with unexecuted cuts.
//!
//! A point of `|pi|` records one slot per cut-stack entry (`Present(a, a')`
//! or `Absent`) together with one point per context formula. Cuts are
//! executed afterwards by keeping the points whose present slots match.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::mall_syntax::{check_proof, rule_conclusion, CheckError, CutPair, Formula, ProofTerm, Rule, Sequent};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Star,
    Pair(Box<Point>, Box<Point>),
    In1(Box<Point>),
    In2(Box<Point>),
}

impl Point {
    pub fn pair(a: Point, b: Point) -> Point {
        Point::Pair(Box::new(a), Box::new(b))
    }
    pub fn in1(a: Point) -> Point {
        Point::In1(Box::new(a))
    }
    pub fn in2(a: Point) -> Point {
        Point::In2(Box::new(a))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Star => write!(f, "*"),
            Point::Pair(a, b) => write!(f, "({a},{b})"),
            Point::In1(a) => write!(f, "1.{a}"),
            Point::In2(a) => write!(f, "2.{a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("bad point syntax at offset {offset} in `{text}`")]
pub struct PointSyntaxError {
    pub text: String,
    pub offset: usize,
}

fn parse_point_at(s: &[u8], i: &mut usize) -> Option<Point> {
    match s.get(*i)? {
        b'*' => {
            *i += 1;
            Some(Point::Star)
        }
        b'(' => {
            *i += 1;
            let a = parse_point_at(s, i)?;
            (s.get(*i)? == &b',').then_some(())?;
            *i += 1;
            let b = parse_point_at(s, i)?;
            (s.get(*i)? == &b')').then_some(())?;
            *i += 1;
            Some(Point::pair(a, b))
        }
        c @ (b'1' | b'2') => {
            let tag = *c;
            (s.get(*i + 1)? == &b'.').then_some(())?;
            *i += 2;
            let a = parse_point_at(s, i)?;
            Some(if tag == b'1' { Point::in1(a) } else { Point::in2(a) })
        }
        _ => None,
    }
}

impl FromStr for Point {
    type Err = PointSyntaxError;
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bytes = compact.as_bytes();
        let mut i = 0;
        match parse_point_at(bytes, &mut i) {
            Some(p) if i == bytes.len() => Ok(p),
            _ => Err(PointSyntaxError { text: text.to_string(), offset: i }),
        }
    }
}

/// The state of one cut-stack entry inside a point of `|pi|`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Absent,
    Present(Point, Point),
}

impl Slot {
    pub fn is_present(&self) -> bool {
        matches!(self, Slot::Present(..))
    }
    pub fn is_matched(&self) -> bool {
        matches!(self, Slot::Present(a, b) if a == b)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Absent => write!(f, "-"),
            Slot::Present(a, b) => write!(f, "({a}|{b})"),
        }
    }
}

impl FromStr for Slot {
    type Err = PointSyntaxError;
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim();
        if t == "-" {
            return Ok(Slot::Absent);
        }
        let err = || PointSyntaxError { text: text.to_string(), offset: 0 };
        let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(err)?;
        // split at the top-level bar
        let mut depth = 0i32;
        for (k, c) in inner.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '|' if depth == 0 => {
                    return Ok(Slot::Present(inner[..k].parse()?, inner[k + 1..].parse()?));
                }
                _ => {}
            }
        }
        Err(err())
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}
string_serde!(Point);
string_serde!(Slot);

pub type CutAssignment = Vec<Slot>;

/// An element of `|Delta~| x |Gamma|`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointVec {
    pub cuts: CutAssignment,
    pub ctx: Vec<Point>,
}

impl fmt::Display for PointVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.cuts.iter().enumerate() {
            write!(f, "{}{s}", if i == 0 { "" } else { ", " })?;
        }
        write!(f, "; ")?;
        for (i, p) in self.ctx.iter().enumerate() {
            write!(f, "{}{p}", if i == 0 { "" } else { ", " })?;
        }
        write!(f, "]")
    }
}

/// `|F|` as a finite set of points.
pub fn interp_formula(f: &Formula) -> BTreeSet<Point> {
    match f {
        Formula::One | Formula::Bot => BTreeSet::from([Point::Star]),
        Formula::Zero | Formula::Top => BTreeSet::new(),
        Formula::Tensor(a, b) | Formula::Par(a, b) => {
            let (xa, xb) = (interp_formula(a), interp_formula(b));
            xa.iter().flat_map(|x| xb.iter().map(move |y| Point::pair(x.clone(), y.clone()))).collect()
        }
        Formula::Plus(a, b) | Formula::With(a, b) => {
            interp_formula(a).into_iter().map(Point::in1).chain(interp_formula(b).into_iter().map(Point::in2)).collect()
        }
    }
}

/// Membership `x in |F|` without enumerating `|F|`.
pub fn point_in(f: &Formula, x: &Point) -> bool {
    match (f, x) {
        (Formula::One | Formula::Bot, Point::Star) => true,
        (Formula::Tensor(a, b) | Formula::Par(a, b), Point::Pair(x, y)) => point_in(a, x) && point_in(b, y),
        (Formula::Plus(a, _) | Formula::With(a, _), Point::In1(x)) => point_in(a, x),
        (Formula::Plus(_, b) | Formula::With(_, b), Point::In2(y)) => point_in(b, y),
        _ => false,
    }
}

/// `|Delta~|`: one `Absent`-or-`Present` choice per stack entry.
pub fn sublist_space(cuts: &[CutPair]) -> BTreeSet<CutAssignment> {
    let mut acc: Vec<CutAssignment> = vec![vec![]];
    for c in cuts {
        let (l, r) = (interp_formula(&c.left), interp_formula(&c.right));
        let mut choices = vec![Slot::Absent];
        for a in &l {
            for b in &r {
                choices.push(Slot::Present(a.clone(), b.clone()));
            }
        }
        acc = acc
            .into_iter()
            .flat_map(|pre| {
                choices.iter().map(move |s| {
                    let mut v = pre.clone();
                    v.push(s.clone());
                    v
                })
            })
            .collect();
    }
    acc.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MembershipError {
    #[error("point is not in the interpretation: {0}")]
    NotMember(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

fn not_member(msg: impl Into<String>) -> MembershipError {
    MembershipError::NotMember(msg.into())
}

/// Positions of the non-superposed entries of a `&` premise stack.
fn free_entries(len: usize, sigma: &[(usize, usize)], left: bool) -> Vec<usize> {
    (0..len).filter(|k| !sigma.iter().any(|&(i, j)| if left { i == *k } else { j == *k })).collect()
}

/// Forward clause of `|pi|`: the point of a rule instance from the points of
/// its premises. A `&` node takes exactly one present premise point; the
/// other premise is `None`.
pub fn compose(rule: &Rule, kid_seqs: &[&Sequent], kid_pts: &[Option<&PointVec>]) -> Option<PointVec> {
    let split_last = |y: &PointVec| -> (Vec<Point>, Point) {
        let mut ctx = y.ctx.clone();
        let l = ctx.pop().expect("nonempty premise context");
        (ctx, l)
    };
    match rule {
        Rule::Ax(_) | Rule::TopI(_) => None,
        Rule::OneI => Some(PointVec { cuts: vec![], ctx: vec![Point::Star] }),
        Rule::With(sigma) => {
            let (i, y) = match kid_pts {
                [Some(y), None] => (0, *y),
                [None, Some(y)] => (1, *y),
                _ => return None,
            };
            let (n1, n2) = (kid_seqs[0].cuts.len(), kid_seqs[1].cuts.len());
            let mut cuts = Vec::new();
            for k in free_entries(n1, sigma, true) {
                cuts.push(if i == 0 { y.cuts[k].clone() } else { Slot::Absent });
            }
            for k in free_entries(n2, sigma, false) {
                cuts.push(if i == 1 { y.cuts[k].clone() } else { Slot::Absent });
            }
            for &(a, b) in sigma {
                cuts.push(y.cuts[if i == 0 { a } else { b }].clone());
            }
            let (mut ctx, l) = split_last(y);
            ctx.push(if i == 0 { Point::in1(l) } else { Point::in2(l) });
            Some(PointVec { cuts, ctx })
        }
        _ => {
            let ys: Vec<&PointVec> = kid_pts.iter().copied().collect::<Option<_>>()?;
            match rule {
                Rule::BotI => {
                    let mut y = ys[0].clone();
                    y.ctx.push(Point::Star);
                    Some(y)
                }
                Rule::Par => {
                    let (mut ctx, b) = split_last(ys[0]);
                    let a = ctx.pop()?;
                    ctx.push(Point::pair(a, b));
                    Some(PointVec { cuts: ys[0].cuts.clone(), ctx })
                }
                Rule::Tensor | Rule::Cut => {
                    let (mut ctx, a) = split_last(ys[0]);
                    let (c2, b) = split_last(ys[1]);
                    ctx.extend(c2);
                    let mut cuts = ys[0].cuts.clone();
                    cuts.extend(ys[1].cuts.iter().cloned());
                    if *rule == Rule::Tensor {
                        ctx.push(Point::pair(a, b));
                    } else {
                        cuts.push(Slot::Present(a, b));
                    }
                    Some(PointVec { cuts, ctx })
                }
                Rule::Plus1(_) | Rule::Plus2(_) => {
                    let (mut ctx, a) = split_last(ys[0]);
                    ctx.push(if matches!(rule, Rule::Plus1(_)) { Point::in1(a) } else { Point::in2(a) });
                    Some(PointVec { cuts: ys[0].cuts.clone(), ctx })
                }
                Rule::Exch(i, j) => {
                    let mut y = ys[0].clone();
                    y.ctx.swap(*i, *j);
                    Some(y)
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Inverse of [`compose`]: splits the point of a rule instance into premise
/// points, checking membership at leaves. Inactive `&` premises get `None`.
pub fn decompose(rule: &Rule, kid_seqs: &[&Sequent], x: &PointVec) -> Result<Vec<Option<PointVec>>, MembershipError> {
    let split = |x: &PointVec| -> Result<(Vec<Point>, Point), MembershipError> {
        let mut ctx = x.ctx.clone();
        let l = ctx.pop().ok_or_else(|| not_member("empty context"))?;
        Ok((ctx, l))
    };
    match rule {
        Rule::Ax(a) => {
            if x.cuts.is_empty() && x.ctx.len() == 2 && x.ctx[0] == x.ctx[1] && point_in(a, &x.ctx[0]) {
                Ok(vec![])
            } else {
                Err(not_member(format!("{x} is not on the diagonal of {a}")))
            }
        }
        Rule::OneI => {
            if x.cuts.is_empty() && x.ctx == [Point::Star] {
                Ok(vec![])
            } else {
                Err(not_member(format!("{x} is not the unit point")))
            }
        }
        Rule::TopI(_) => Err(not_member("top has no points")),
        Rule::BotI => {
            let (ctx, l) = split(x)?;
            if l != Point::Star {
                return Err(not_member("bot needs *"));
            }
            Ok(vec![Some(PointVec { cuts: x.cuts.clone(), ctx })])
        }
        Rule::Par => {
            let (mut ctx, l) = split(x)?;
            let Point::Pair(a, b) = l else { return Err(not_member("par needs a pair")) };
            ctx.push(*a);
            ctx.push(*b);
            Ok(vec![Some(PointVec { cuts: x.cuts.clone(), ctx })])
        }
        Rule::Tensor | Rule::Cut => {
            let (n1, n2) = (kid_seqs[0].cuts.len(), kid_seqs[1].cuts.len());
            let g1 = kid_seqs[0].context.len() - 1;
            let (mut ctx, a, b, cuts) = if *rule == Rule::Tensor {
                let (ctx, l) = split(x)?;
                let Point::Pair(a, b) = l else { return Err(not_member("tensor needs a pair")) };
                (ctx, *a, *b, &x.cuts[..])
            } else {
                let Some((Slot::Present(a, b), cuts)) = x.cuts.split_last() else {
                    return Err(not_member("cut slot must be present"));
                };
                (x.ctx.clone(), a.clone(), b.clone(), cuts)
            };
            if cuts.len() != n1 + n2 || ctx.len() < g1 {
                return Err(not_member("shape mismatch"));
            }
            let mut c2 = ctx.split_off(g1);
            ctx.push(a);
            c2.push(b);
            Ok(vec![
                Some(PointVec { cuts: cuts[..n1].to_vec(), ctx }),
                Some(PointVec { cuts: cuts[n1..].to_vec(), ctx: c2 }),
            ])
        }
        Rule::With(sigma) => {
            let (mut ctx, l) = split(x)?;
            let (i, a) = match l {
                Point::In1(a) => (0, *a),
                Point::In2(a) => (1, *a),
                _ => return Err(not_member("with needs a tagged point")),
            };
            let (n1, n2) = (kid_seqs[0].cuts.len(), kid_seqs[1].cuts.len());
            let f1 = free_entries(n1, sigma, true);
            let f2 = free_entries(n2, sigma, false);
            if x.cuts.len() != f1.len() + f2.len() + sigma.len() {
                return Err(not_member("shape mismatch"));
            }
            let (own, other_range) = if i == 0 { (&f1, f1.len()..f1.len() + f2.len()) } else { (&f2, 0..f1.len()) };
            if x.cuts[other_range].iter().any(Slot::is_present) {
                return Err(not_member("inactive with premise has a present cut slot"));
            }
            let base = if i == 0 { 0 } else { f1.len() };
            let n = if i == 0 { n1 } else { n2 };
            let mut cuts = vec![Slot::Absent; n];
            for (k, &pos) in own.iter().enumerate() {
                cuts[pos] = x.cuts[base + k].clone();
            }
            let sig0 = f1.len() + f2.len();
            for (k, &(a, b)) in sigma.iter().enumerate() {
                cuts[if i == 0 { a } else { b }] = x.cuts[sig0 + k].clone();
            }
            ctx.push(a);
            let y = Some(PointVec { cuts, ctx });
            Ok(if i == 0 { vec![y, None] } else { vec![None, y] })
        }
        Rule::Plus1(_) | Rule::Plus2(_) => {
            let (mut ctx, l) = split(x)?;
            let a = match (rule, l) {
                (Rule::Plus1(_), Point::In1(a)) | (Rule::Plus2(_), Point::In2(a)) => *a,
                _ => return Err(not_member("plus tag mismatch")),
            };
            ctx.push(a);
            Ok(vec![Some(PointVec { cuts: x.cuts.clone(), ctx })])
        }
        Rule::Exch(i, j) => {
            let mut y = x.clone();
            if *i >= y.ctx.len() || *j >= y.ctx.len() {
                return Err(not_member("shape mismatch"));
            }
            y.ctx.swap(*i, *j);
            Ok(vec![Some(y)])
        }
    }
}

/// A proof tree whose nodes carry their conclusion and, for each index of a
/// family, the node's point (or `None` where the index does not reach the node).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decorated {
    pub rule: Rule,
    pub kids: Vec<Decorated>,
    pub seq: Sequent,
    pub pts: Vec<Option<PointVec>>,
}

impl Decorated {
    /// Builds a node from premises, checking the rule and composing points.
    pub fn mk(rule: Rule, kids: Vec<Decorated>) -> Result<Decorated, String> {
        let seqs: Vec<&Sequent> = kids.iter().map(|k| &k.seq).collect();
        let seq = rule_conclusion(&rule, &seqs)?;
        let width = kids.first().map(|k| k.pts.len()).unwrap_or(0);
        let pts = (0..width)
            .map(|j| {
                let ys: Vec<Option<&PointVec>> = kids.iter().map(|k| k.pts[j].as_ref()).collect();
                compose(&rule, &seqs, &ys)
            })
            .collect();
        Ok(Decorated { rule, kids, seq, pts })
    }

    /// A fresh leaf for a family of `width` indices; only `one` has points.
    pub fn fresh_leaf(rule: Rule, width: usize) -> Result<Decorated, String> {
        let seq = rule_conclusion(&rule, &[])?;
        let pts = (0..width).map(|_| compose(&rule, &[], &[])).collect();
        Ok(Decorated { rule, kids: vec![], seq, pts })
    }

    /// A leaf with explicit points (axioms and units).
    pub fn leaf(rule: Rule, pts: Vec<Option<PointVec>>) -> Result<Decorated, String> {
        let seq = rule_conclusion(&rule, &[])?;
        Ok(Decorated { rule, kids: vec![], seq, pts })
    }

    /// Decorates `p` with the given points of its conclusion.
    pub fn decorate(p: &ProofTerm, xs: &[PointVec]) -> Result<Decorated, MembershipError> {
        let plain = Decorated::plain(p)?;
        let mut d = plain;
        d.push_down(xs.iter().cloned().map(Some).collect())?;
        Ok(d)
    }

    /// Decoration with zero indices: just the checked tree.
    pub fn plain(p: &ProofTerm) -> Result<Decorated, MembershipError> {
        fn go(p: &ProofTerm, path: &mut Vec<usize>) -> Result<Decorated, CheckError> {
            let mut kids = Vec::new();
            for (i, q) in p.premises().into_iter().enumerate() {
                path.push(i);
                kids.push(go(q, path)?);
                path.pop();
            }
            let seqs: Vec<&Sequent> = kids.iter().map(|k| &k.seq).collect();
            let seq = rule_conclusion(&p.rule(), &seqs).map_err(|msg| CheckError { path: path.clone(), msg })?;
            Ok(Decorated { rule: p.rule(), kids, seq, pts: vec![] })
        }
        Ok(go(p, &mut Vec::new())?)
    }

    fn push_down(&mut self, pts: Vec<Option<PointVec>>) -> Result<(), MembershipError> {
        let mut kid_pts: Vec<Vec<Option<PointVec>>> = vec![Vec::with_capacity(pts.len()); self.kids.len()];
        {
            let seqs: Vec<&Sequent> = self.kids.iter().map(|k| &k.seq).collect();
            for x in &pts {
                match x {
                    None => kid_pts.iter_mut().for_each(|v| v.push(None)),
                    Some(x) => {
                        for (v, y) in kid_pts.iter_mut().zip(decompose(&self.rule, &seqs, x)?) {
                            v.push(y);
                        }
                    }
                }
            }
        }
        for (k, v) in self.kids.iter_mut().zip(kid_pts) {
            k.push_down(v)?;
        }
        self.pts = pts;
        Ok(())
    }

    pub fn to_term(&self) -> ProofTerm {
        ProofTerm::from_parts(self.rule.clone(), self.kids.iter().map(|k| k.to_term()).collect())
    }

    pub fn at(&self, path: &[usize]) -> Option<&Decorated> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.kids.get(i)?.at(rest),
        }
    }

    /// Replaces the subtree at `path` and recomposes the points above it.
    pub fn replace_at(self, path: &[usize], new: Decorated) -> Result<Decorated, String> {
        match path.split_first() {
            None => Ok(new),
            Some((&i, rest)) => {
                let Decorated { rule, mut kids, .. } = self;
                let k = kids.remove(i);
                kids.insert(i, k.replace_at(rest, new)?);
                Decorated::mk(rule, kids)
            }
        }
    }
}

/// Checks `x in |p|` by decomposition.
pub fn is_member(p: &ProofTerm, x: &PointVec) -> Result<bool, CheckError> {
    match Decorated::decorate(p, std::slice::from_ref(x)) {
        Ok(_) => Ok(true),
        Err(MembershipError::NotMember(_)) => Ok(false),
        Err(MembershipError::Check(e)) => Err(e),
    }
}

/// `|p|`, the relation with unexecuted cuts.
pub fn interp_with_cuts(p: &ProofTerm) -> Result<BTreeSet<PointVec>, CheckError> {
    Ok(rel_of(&Decorated::plain(p).map_err(|e| match e {
        MembershipError::Check(c) => c,
        MembershipError::NotMember(_) => unreachable!(),
    })?))
}

fn rel_of(d: &Decorated) -> BTreeSet<PointVec> {
    let seqs: Vec<&Sequent> = d.kids.iter().map(|k| &k.seq).collect();
    let rels: Vec<BTreeSet<PointVec>> = d.kids.iter().map(rel_of).collect();
    let mut out = BTreeSet::new();
    match &d.rule {
        Rule::Ax(a) => {
            for x in interp_formula(a) {
                out.insert(PointVec { cuts: vec![], ctx: vec![x.clone(), x] });
            }
        }
        Rule::OneI => {
            out.insert(PointVec { cuts: vec![], ctx: vec![Point::Star] });
        }
        Rule::TopI(_) => {}
        Rule::With(_) => {
            for y in &rels[0] {
                out.extend(compose(&d.rule, &seqs, &[Some(y), None]));
            }
            for y in &rels[1] {
                out.extend(compose(&d.rule, &seqs, &[None, Some(y)]));
            }
        }
        Rule::Tensor | Rule::Cut => {
            for y in &rels[0] {
                for z in &rels[1] {
                    out.extend(compose(&d.rule, &seqs, &[Some(y), Some(z)]));
                }
            }
        }
        _ => {
            for y in &rels[0] {
                out.extend(compose(&d.rule, &seqs, &[Some(y)]));
            }
        }
    }
    out
}

/// Executes every cut: keeps points whose present slots match and forgets the stack.
pub fn execute_cuts_rel(r: &BTreeSet<PointVec>) -> BTreeSet<Vec<Point>> {
    r.iter().filter(|x| x.cuts.iter().all(|s| !s.is_present() || s.is_matched())).map(|x| x.ctx.clone()).collect()
}

/// `p*`: the usual relational semantics with cut as relational composition.
pub fn interp_denotational(p: &ProofTerm) -> Result<BTreeSet<Vec<Point>>, CheckError> {
    check_proof(p)?;
    Ok(denot(p))
}

fn denot(p: &ProofTerm) -> BTreeSet<Vec<Point>> {
    let pop = |mut v: Vec<Point>| {
        let l = v.pop().expect("nonempty context");
        (v, l)
    };
    match p {
        ProofTerm::Ax(a) => interp_formula(a).into_iter().map(|x| vec![x.clone(), x]).collect(),
        ProofTerm::OneI => BTreeSet::from([vec![Point::Star]]),
        ProofTerm::TopI(_) => BTreeSet::new(),
        ProofTerm::BotI(q) => denot(q)
            .into_iter()
            .map(|mut v| {
                v.push(Point::Star);
                v
            })
            .collect(),
        ProofTerm::ParI(q) => denot(q)
            .into_iter()
            .map(|v| {
                let (mut v, b) = pop(v);
                let a = v.pop().expect("par premise");
                v.push(Point::pair(a, b));
                v
            })
            .collect(),
        ProofTerm::TensorI(q, r) => {
            let (dq, dr) = (denot(q), denot(r));
            let mut out = BTreeSet::new();
            for x in &dq {
                for y in &dr {
                    let (mut u, a) = pop(x.clone());
                    let (w, b) = pop(y.clone());
                    u.extend(w);
                    u.push(Point::pair(a, b));
                    out.insert(u);
                }
            }
            out
        }
        ProofTerm::CutI(q, r) => {
            let (dq, dr) = (denot(q), denot(r));
            let mut out = BTreeSet::new();
            for x in &dq {
                for y in &dr {
                    let (mut u, a) = pop(x.clone());
                    let (w, b) = pop(y.clone());
                    if a == b {
                        u.extend(w);
                        out.insert(u);
                    }
                }
            }
            out
        }
        ProofTerm::WithI(q, r, _) => {
            let tag = |d: BTreeSet<Vec<Point>>, f: fn(Point) -> Point| -> Vec<Vec<Point>> {
                d.into_iter()
                    .map(|v| {
                        let (mut v, a) = pop(v);
                        v.push(f(a));
                        v
                    })
                    .collect()
            };
            let mut out: BTreeSet<Vec<Point>> = tag(denot(q), Point::in1).into_iter().collect();
            out.extend(tag(denot(r), Point::in2));
            out
        }
        ProofTerm::Plus1I(q, _) | ProofTerm::Plus2I(q, _) => {
            let f: fn(Point) -> Point = if matches!(p, ProofTerm::Plus1I(..)) { Point::in1 } else { Point::in2 };
            denot(q)
                .into_iter()
                .map(|v| {
                    let (mut v, a) = pop(v);
                    v.push(f(a));
                    v
                })
                .collect()
        }
        ProofTerm::Exch(q, i, j) => denot(q)
            .into_iter()
            .map(|mut v| {
                v.swap(*i, *j);
                v
            })
            .collect(),
    }
}
