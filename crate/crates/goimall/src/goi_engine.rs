//! Execution formula by token machine, in partial injections with zero.
//!
//! At a point `x` of `|pi|` the proof unfolds into a [`Net`] of formula
//! occurrences. The generators of the endomorphism `[x]` sit on it as
//! follows: an axiom is a symmetry on `U_a (x) U_a`; a tensor or par is an
//! assoc-retraction (going up, a token pops an address letter) paired with
//! an assoc-coretraction (going down, it pushes one); `&` and `+` only
//! retag, so they are transparent; a unit bounces the token back. `sigma_x`
//! feeds a matched cut back through a symmetry and maps an unmatched one to
//! zero. The trace is realized by following tokens until they leave through
//! a port.
//!
//! The zero action `eps_x` annihilates (co)retractions that only ever see
//! zero and spreads death along `bot` rules (a tensor with zero is zero). It
//! is computed as a fixpoint; the one-shot variant is kept for comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::cut_rewrite::{normalize_lifted, RewriteError};
use crate::indexed_logic::{fmt_set, IndexSet, IndexedFamily};
use crate::mall_syntax::{Formula, ProofTerm, Rule};
use crate::par::Exec;
use crate::rel_model::{Decorated, MembershipError, Point, PointVec, Slot};

/// An address word over `{l, r}`; the front letter is the low bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Addr {
    len: u8,
    bits: u32,
}

impl Addr {
    pub const EMPTY: Addr = Addr { len: 0, bits: 0 };
    pub const MAX_LEN: u8 = 32;

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Prepends `l` (false) or `r` (true).
    pub fn push(self, right: bool) -> Option<Addr> {
        (self.len < Self::MAX_LEN).then(|| Addr { len: self.len + 1, bits: (self.bits << 1) | right as u32 })
    }

    pub fn pop(self) -> Option<(bool, Addr)> {
        (self.len > 0).then(|| (self.bits & 1 == 1, Addr { len: self.len - 1, bits: self.bits >> 1 }))
    }

    pub fn letters(self) -> impl Iterator<Item = bool> {
        (0..self.len).map(move |i| (self.bits >> i) & 1 == 1)
    }

    pub fn parse(s: &str) -> Option<Addr> {
        if s == "e" {
            return Some(Addr::EMPTY);
        }
        let mut a = Addr::EMPTY;
        for c in s.chars().rev() {
            a = a.push(match c {
                'l' => false,
                'r' => true,
                _ => return None,
            })?;
        }
        Some(a)
    }
}

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e");
        }
        for r in self.letters() {
            f.write_char(if r { 'r' } else { 'l' })?;
        }
        Ok(())
    }
}

impl PartialOrd for Addr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Addr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.letters().cmp(other.letters())
    }
}

/// Leaf addresses of a point: pairs branch, injections consume nothing.
pub fn leaf_addrs(x: &Point) -> Vec<Addr> {
    fn go(x: &Point, pre: &mut Vec<bool>, out: &mut Vec<Addr>) {
        match x {
            Point::Star => {
                let mut a = Addr::EMPTY;
                for &r in pre.iter().rev() {
                    a = a.push(r).expect("address depth");
                }
                out.push(a);
            }
            Point::In1(y) | Point::In2(y) => go(y, pre, out),
            Point::Pair(y, z) => {
                pre.push(false);
                go(y, pre, out);
                pre.pop();
                pre.push(true);
                go(z, pre, out);
                pre.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(x, &mut Vec::new(), &mut out);
    out
}

/// A token at an open port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    pub port: usize,
    pub addr: Addr,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.port, self.addr)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Conclusion of an axiom; the symmetry leads to the partner.
    Axiom(usize),
    /// Principal formula of a tensor or par over the two given occurrences.
    Mult { a: usize, b: usize },
    /// Principal formula of `&` or `+` over the active premise occurrence.
    Pass(usize),
    /// `1` or `bot`.
    Unit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consumer {
    Port(usize),
    /// One side of cut `link`.
    Cut {
        link: usize,
        partner: usize,
    },
    Parent(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occ {
    pub formula: Formula,
    pub point: Point,
    pub origin: Origin,
    pub consumer: Consumer,
}

/// One entry of `sigma_x`: the two occurrences of a present cut pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaEntry {
    pub left: usize,
    pub right: usize,
    pub matched: bool,
}

/// The box `[x]` with its cut wiring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    pub occs: Vec<Occ>,
    /// Occurrence at each conclusion position.
    pub ports: Vec<usize>,
    pub sigma: Vec<SigmaEntry>,
    /// `(u, v)`: `u` is a `bot` introduced beside the premise whose last
    /// occurrence is `v`.
    pub attachments: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GoiError {
    #[error(transparent)]
    Membership(#[from] MembershipError),
    #[error("a top rule is reached by a point")]
    TopReached,
    #[error("token {0} does not fit its port")]
    Malformed(String),
    #[error("token run exceeded the budget of {0} steps")]
    Divergent(usize),
    #[error("expected a cut-free proof")]
    NotCutFree,
    #[error("port signatures differ: {0} vs {1}")]
    Signature(usize, usize),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

struct Builder {
    occs: Vec<Occ>,
    sigma: Vec<SigmaEntry>,
    attachments: Vec<(usize, usize)>,
}

impl Builder {
    fn occ(&mut self, formula: Formula, point: Point, origin: Origin) -> usize {
        self.occs.push(Occ { formula, point, origin, consumer: Consumer::Port(usize::MAX) });
        self.occs.len() - 1
    }

    fn principal(d: &Decorated) -> (Formula, Point) {
        let x = d.pts[0].as_ref().expect("point reaches node");
        (d.seq.context.last().cloned().expect("nonempty"), x.ctx.last().cloned().expect("nonempty"))
    }

    /// Returns the occurrences of the node's context.
    fn go(&mut self, d: &Decorated) -> Result<Vec<usize>, GoiError> {
        let x = d.pts[0].as_ref().expect("point reaches node");
        Ok(match &d.rule {
            Rule::Ax(_) => {
                let (o1, o2) = (self.occs.len(), self.occs.len() + 1);
                self.occ(d.seq.context[0].clone(), x.ctx[0].clone(), Origin::Axiom(o2));
                self.occ(d.seq.context[1].clone(), x.ctx[1].clone(), Origin::Axiom(o1));
                vec![o1, o2]
            }
            Rule::OneI => {
                let (f, p) = Self::principal(d);
                vec![self.occ(f, p, Origin::Unit)]
            }
            Rule::TopI(_) => return Err(GoiError::TopReached),
            Rule::BotI => {
                let mut k = self.go(&d.kids[0])?;
                let (f, p) = Self::principal(d);
                let u = self.occ(f, p, Origin::Unit);
                self.attachments.push((u, *k.last().expect("bot premise has a context")));
                k.push(u);
                k
            }
            Rule::Par => {
                let mut k = self.go(&d.kids[0])?;
                let b = k.pop().expect("par");
                let a = k.pop().expect("par");
                let (f, p) = Self::principal(d);
                let o = self.occ(f, p, Origin::Mult { a, b });
                self.occs[a].consumer = Consumer::Parent(o);
                self.occs[b].consumer = Consumer::Parent(o);
                k.push(o);
                k
            }
            Rule::Tensor => {
                let mut k1 = self.go(&d.kids[0])?;
                let mut k2 = self.go(&d.kids[1])?;
                let (a, b) = (k1.pop().expect("tensor"), k2.pop().expect("tensor"));
                let (f, p) = Self::principal(d);
                let o = self.occ(f, p, Origin::Mult { a, b });
                self.occs[a].consumer = Consumer::Parent(o);
                self.occs[b].consumer = Consumer::Parent(o);
                k1.extend(k2);
                k1.push(o);
                k1
            }
            Rule::Cut => {
                let mut k1 = self.go(&d.kids[0])?;
                let k2 = self.go(&d.kids[1])?;
                let a = k1.pop().expect("cut");
                let b = *k2.last().expect("cut");
                let matched = matches!(x.cuts.last(), Some(Slot::Present(u, v)) if u == v);
                let link = self.sigma.len();
                self.sigma.push(SigmaEntry { left: a, right: b, matched });
                self.occs[a].consumer = Consumer::Cut { link, partner: b };
                self.occs[b].consumer = Consumer::Cut { link, partner: a };
                k1.extend(&k2[..k2.len() - 1]);
                k1
            }
            Rule::With(_) => {
                let active = d.kids.iter().find(|k| k.pts[0].is_some()).expect("with point has a branch");
                let mut k = self.go(active)?;
                let c = k.pop().expect("with");
                let (f, p) = Self::principal(d);
                let o = self.occ(f, p, Origin::Pass(c));
                self.occs[c].consumer = Consumer::Parent(o);
                k.push(o);
                k
            }
            Rule::Plus1(_) | Rule::Plus2(_) => {
                let mut k = self.go(&d.kids[0])?;
                let c = k.pop().expect("plus");
                let (f, p) = Self::principal(d);
                let o = self.occ(f, p, Origin::Pass(c));
                self.occs[c].consumer = Consumer::Parent(o);
                k.push(o);
                k
            }
            Rule::Exch(i, j) => {
                let mut k = self.go(&d.kids[0])?;
                k.swap(*i, *j);
                k
            }
        })
    }
}

/// Builds `[x]` and `sigma_x` for a point of `|p|`.
pub fn build_box(p: &ProofTerm, x: &PointVec) -> Result<Net, GoiError> {
    let d = Decorated::decorate(p, std::slice::from_ref(x))?;
    let mut b = Builder { occs: Vec::new(), sigma: Vec::new(), attachments: Vec::new() };
    let ports = b.go(&d)?;
    for (k, &o) in ports.iter().enumerate() {
        b.occs[o].consumer = Consumer::Port(k);
    }
    Ok(Net { occs: b.occs, ports, sigma: b.sigma, attachments: b.attachments })
}

/// The zero action: which (co)retractions are annihilated and which
/// occurrences are killed (absorb every token).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonAssignment {
    pub ret: Vec<bool>,
    pub coret: Vec<bool>,
    pub killed: Vec<bool>,
}

impl EpsilonAssignment {
    pub fn keep_all(net: &Net) -> Self {
        let n = net.occs.len();
        EpsilonAssignment { ret: vec![false; n], coret: vec![false; n], killed: vec![false; n] }
    }

    pub fn annihilated(&self) -> usize {
        self.ret.iter().chain(&self.coret).filter(|b| **b).count()
    }

    pub fn is_trivial(&self) -> bool {
        !self.ret.iter().chain(&self.coret).chain(&self.killed).any(|b| *b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    /// Into the proof, away from the conclusion.
    Up,
    /// Toward the conclusion.
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub occ: usize,
    pub dir: Dir,
    pub addr: Addr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Left through the given port (forward) or traced back to it (reverse).
    Exit(Token),
    Absorbed,
    Divergent,
}

enum Step {
    Next(State),
    Done(Outcome),
}

fn forward(net: &Net, eps: &EpsilonAssignment, s: State) -> Result<Step, GoiError> {
    use Step::*;
    if eps.killed[s.occ] {
        return Ok(Done(Outcome::Absorbed));
    }
    let o = &net.occs[s.occ];
    Ok(match s.dir {
        Dir::Up => match o.origin {
            Origin::Axiom(partner) => Next(State { occ: partner, dir: Dir::Down, addr: s.addr }),
            Origin::Mult { a, b } => {
                if eps.ret[s.occ] {
                    return Ok(Done(Outcome::Absorbed));
                }
                let (right, rest) = s.addr.pop().ok_or_else(|| GoiError::Malformed(format!("{s:?}")))?;
                Next(State { occ: if right { b } else { a }, dir: Dir::Up, addr: rest })
            }
            Origin::Pass(c) => Next(State { occ: c, ..s }),
            Origin::Unit => Next(State { dir: Dir::Down, ..s }),
        },
        Dir::Down => match o.consumer {
            Consumer::Port(k) => Done(Outcome::Exit(Token { port: k, addr: s.addr })),
            Consumer::Cut { link, partner } => {
                if net.sigma[link].matched {
                    Next(State { occ: partner, dir: Dir::Up, addr: s.addr })
                } else {
                    Done(Outcome::Absorbed)
                }
            }
            Consumer::Parent(p) => match net.occs[p].origin {
                Origin::Mult { b, .. } => {
                    if eps.coret[p] {
                        return Ok(Done(Outcome::Absorbed));
                    }
                    let addr = s.addr.push(s.occ == b).ok_or_else(|| GoiError::Malformed(format!("{s:?}")))?;
                    Next(State { occ: p, dir: Dir::Down, addr })
                }
                _ => Next(State { occ: p, ..s }),
            },
        },
    })
}

/// The inverse partial injection: the state a token came from.
fn backward(net: &Net, eps: &EpsilonAssignment, s: State) -> Result<Step, GoiError> {
    use Step::*;
    if eps.killed[s.occ] {
        return Ok(Done(Outcome::Absorbed));
    }
    let o = &net.occs[s.occ];
    Ok(match s.dir {
        Dir::Up => match o.consumer {
            Consumer::Port(k) => Done(Outcome::Exit(Token { port: k, addr: s.addr })),
            Consumer::Cut { link, partner } => {
                if net.sigma[link].matched {
                    Next(State { occ: partner, dir: Dir::Down, addr: s.addr })
                } else {
                    Done(Outcome::Absorbed)
                }
            }
            Consumer::Parent(p) => match net.occs[p].origin {
                Origin::Mult { b, .. } => {
                    if eps.ret[p] {
                        return Ok(Done(Outcome::Absorbed));
                    }
                    let addr = s.addr.push(s.occ == b).ok_or_else(|| GoiError::Malformed(format!("{s:?}")))?;
                    Next(State { occ: p, dir: Dir::Up, addr })
                }
                _ => Next(State { occ: p, ..s }),
            },
        },
        Dir::Down => match o.origin {
            Origin::Axiom(partner) => Next(State { occ: partner, dir: Dir::Up, addr: s.addr }),
            Origin::Mult { a, b } => {
                if eps.coret[s.occ] {
                    return Ok(Done(Outcome::Absorbed));
                }
                let (right, rest) = s.addr.pop().ok_or_else(|| GoiError::Malformed(format!("{s:?}")))?;
                Next(State { occ: if right { b } else { a }, dir: Dir::Down, addr: rest })
            }
            Origin::Pass(c) => Next(State { occ: c, ..s }),
            Origin::Unit => Next(State { dir: Dir::Up, ..s }),
        },
    })
}

fn run(net: &Net, eps: &EpsilonAssignment, mut s: State, reverse: bool, budget: usize) -> Result<Outcome, GoiError> {
    for _ in 0..budget {
        let step = if reverse { backward(net, eps, s)? } else { forward(net, eps, s)? };
        match step {
            Step::Next(t) => s = t,
            Step::Done(out) => return Ok(out),
        }
    }
    Ok(Outcome::Divergent)
}

/// Default token budget: more steps than the net has states.
pub fn default_budget(net: &Net) -> usize {
    let max_tokens = net.occs.iter().map(|o| leaf_addrs(&o.point).len()).max().unwrap_or(1);
    4 * (net.occs.len() + 1) * max_tokens
}

/// The budget, overridden by `GOIMALL_BUDGET` when set.
pub fn budget_for(net: &Net) -> usize {
    std::env::var("GOIMALL_BUDGET").ok().and_then(|v| v.parse().ok()).unwrap_or_else(|| default_budget(net))
}

/// Runs one token from an open port.
pub fn eval_token(net: &Net, eps: &EpsilonAssignment, t: Token, budget: usize) -> Result<Outcome, GoiError> {
    let occ = *net.ports.get(t.port).ok_or_else(|| GoiError::Malformed(t.to_string()))?;
    if !leaf_addrs(&net.occs[occ].point).contains(&t.addr) {
        return Err(GoiError::Malformed(t.to_string()));
    }
    run(net, eps, State { occ, dir: Dir::Up, addr: t.addr }, false, budget)
}

/// No token started at `(occ, dir)` gets out, and some is absorbed.
fn dead_from(
    net: &Net,
    eps: &EpsilonAssignment,
    occ: usize,
    dir: Dir,
    reverse: bool,
    budget: usize,
) -> Result<bool, GoiError> {
    let mut absorbed = false;
    for addr in leaf_addrs(&net.occs[occ].point) {
        match run(net, eps, State { occ, dir, addr }, reverse, budget)? {
            Outcome::Exit(_) => return Ok(false),
            Outcome::Absorbed => absorbed = true,
            Outcome::Divergent => {}
        }
    }
    Ok(absorbed)
}

fn dead_anywhere(net: &Net, eps: &EpsilonAssignment, occ: usize, budget: usize) -> Result<bool, GoiError> {
    for (dir, rev) in [(Dir::Up, false), (Dir::Down, false), (Dir::Up, true), (Dir::Down, true)] {
        if dead_from(net, eps, occ, dir, rev, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn mark_mult(net: &Net, eps: &mut EpsilonAssignment, budget: usize) -> Result<bool, GoiError> {
    let mut changed = false;
    for p in 0..net.occs.len() {
        let Origin::Mult { a, b } = net.occs[p].origin else { continue };
        if !eps.ret[p]
            && (dead_from(net, eps, a, Dir::Up, false, budget)? || dead_from(net, eps, b, Dir::Up, false, budget)?)
        {
            eps.ret[p] = true;
            changed = true;
        }
        if !eps.coret[p]
            && (dead_from(net, eps, a, Dir::Down, true, budget)? || dead_from(net, eps, b, Dir::Down, true, budget)?)
        {
            eps.coret[p] = true;
            changed = true;
        }
    }
    Ok(changed)
}

/// `eps_x` as a fixpoint: a retraction with a dead output (a coretraction
/// with a dead input) is annihilated, a `bot` dies with its premise and
/// the other way round, and the analysis repeats until nothing changes.
pub fn zero_action(net: &Net) -> Result<EpsilonAssignment, GoiError> {
    let budget = budget_for(net);
    let mut eps = EpsilonAssignment::keep_all(net);
    if net.sigma.iter().all(|s| s.matched) {
        return Ok(eps);
    }
    loop {
        let mut changed = mark_mult(net, &mut eps, budget)?;
        for &(u, v) in &net.attachments {
            for (x, y) in [(u, v), (v, u)] {
                if !eps.killed[y] && dead_anywhere(net, &eps, x, budget)? {
                    eps.killed[y] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(eps);
        }
    }
}

/// One round of the (co)retraction rule only, with no cascade.
pub fn zero_action_single_pass(net: &Net) -> Result<EpsilonAssignment, GoiError> {
    let budget = budget_for(net);
    let mut eps = EpsilonAssignment::keep_all(net);
    let base = eps.clone();
    for p in 0..net.occs.len() {
        let Origin::Mult { a, b } = net.occs[p].origin else { continue };
        eps.ret[p] =
            dead_from(net, &base, a, Dir::Up, false, budget)? || dead_from(net, &base, b, Dir::Up, false, budget)?;
        eps.coret[p] =
            dead_from(net, &base, a, Dir::Down, true, budget)? || dead_from(net, &base, b, Dir::Down, true, budget)?;
    }
    Ok(eps)
}

/// A morphism on the tokens of `ports` conclusion wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismValue {
    Zero { ports: usize },
    Table { ports: usize, map: BTreeMap<Token, Token> },
}

impl MorphismValue {
    pub fn is_zero(&self) -> bool {
        matches!(self, MorphismValue::Zero { .. })
    }

    pub fn ports(&self) -> usize {
        match self {
            MorphismValue::Zero { ports } | MorphismValue::Table { ports, .. } => *ports,
        }
    }

    pub fn from_map(ports: usize, map: BTreeMap<Token, Token>) -> Self {
        if map.is_empty() {
            MorphismValue::Zero { ports }
        } else {
            MorphismValue::Table { ports, map }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            MorphismValue::Zero { .. } => serde_json::Value::String("ZERO".into()),
            MorphismValue::Table { map, .. } => serde_json::Value::Array(
                map.iter().map(|(a, b)| serde_json::json!([a.to_string(), b.to_string()])).collect(),
            ),
        }
    }
}

impl fmt::Display for MorphismValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismValue::Zero { .. } => write!(f, "ZERO"),
            MorphismValue::Table { map, .. } => {
                for (i, (a, b)) in map.iter().enumerate() {
                    write!(f, "{}{a} -> {b}", if i == 0 { "" } else { "\n" })?;
                }
                Ok(())
            }
        }
    }
}

/// Extensional equality; ZERO only equals ZERO.
pub fn morphisms_equal(a: &MorphismValue, b: &MorphismValue) -> Result<bool, GoiError> {
    if a.ports() != b.ports() {
        return Err(GoiError::Signature(a.ports(), b.ports()));
    }
    Ok(a == b)
}

/// Tabulates a net under a given zero action.
pub fn tabulate(net: &Net, eps: &EpsilonAssignment) -> Result<MorphismValue, GoiError> {
    let budget = budget_for(net);
    let mut map = BTreeMap::new();
    for (port, &occ) in net.ports.iter().enumerate() {
        for addr in leaf_addrs(&net.occs[occ].point) {
            let t = Token { port, addr };
            match eval_token(net, eps, t, budget)? {
                Outcome::Exit(u) => {
                    map.insert(t, u);
                }
                Outcome::Absorbed => {}
                Outcome::Divergent => return Err(GoiError::Divergent(budget)),
            }
        }
    }
    Ok(MorphismValue::from_map(net.ports.len(), map))
}

/// `Ex(sigma_x, x)`.
pub fn execute_point(p: &ProofTerm, x: &PointVec) -> Result<MorphismValue, GoiError> {
    let net = build_box(p, x)?;
    tabulate(&net, &zero_action(&net)?)
}

/// Whether the one-pass zero action gives another value than the fixpoint.
pub fn single_pass_disagrees(p: &ProofTerm, x: &PointVec) -> Result<bool, GoiError> {
    let net = build_box(p, x)?;
    Ok(tabulate(&net, &zero_action(&net)?)? != tabulate(&net, &zero_action_single_pass(&net)?)?)
}

/// `Ex^J(nu)`, index by index.
pub fn execute_family(
    p: &ProofTerm,
    nu: &IndexedFamily,
    exec: Exec,
) -> BTreeMap<String, Result<MorphismValue, GoiError>> {
    let items: Vec<(&String, &PointVec)> = nu.values.iter().collect();
    let vals = exec.map(&items, |(_, x)| execute_point(p, x));
    items.iter().map(|(j, _)| (*j).clone()).zip(vals).collect()
}

/// `[x]` of a cut-free proof.
pub fn denotation_morphism(p: &ProofTerm, x: &PointVec) -> Result<MorphismValue, GoiError> {
    if !p.is_cut_free() {
        return Err(GoiError::NotCutFree);
    }
    execute_point(p, x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub line: String,
    pub before: IndexSet,
    pub after: IndexSet,
    pub dropped: IndexSet,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub initial: IndexSet,
    pub steps: Vec<StepCheck>,
    pub final_j: IndexSet,
    pub nonzero: IndexSet,
    pub final_failures: Vec<String>,
    /// Indices where the one-pass zero action would give another value.
    pub single_pass_disagreements: IndexSet,
    pub error: Option<String>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.final_failures.is_empty() && self.steps.iter().all(|s| s.failures.is_empty())
    }

    /// `J: {..} -> {..} -> ...` over the whole trace.
    pub fn j_chain(&self) -> String {
        let mut s = format!("J: {}", fmt_set(&self.initial));
        for st in &self.steps {
            if st.after != st.before {
                write!(s, " -> {}", fmt_set(&st.after)).expect("string write");
            }
        }
        s
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(f, "step {}: {}  {}", k + 1, s.line, if s.failures.is_empty() { "ok" } else { "FAIL" })?;
            for m in &s.failures {
                writeln!(f, "  {m}")?;
            }
        }
        writeln!(f, "final: J = {}  nonzero: {}", fmt_set(&self.final_j), fmt_set(&self.nonzero))?;
        for m in &self.final_failures {
            writeln!(f, "  {m}")?;
        }
        if !self.single_pass_disagreements.is_empty() {
            writeln!(f, "one-pass zero action differs at {}", fmt_set(&self.single_pass_disagreements))?;
        }
        if let Some(e) = &self.error {
            writeln!(f, "error: {e}")?;
        }
        writeln!(f, "{}", self.j_chain())?;
        write!(f, "{}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

fn ex_all(p: &ProofTerm, nu: &IndexedFamily, exec: Exec) -> Result<BTreeMap<String, MorphismValue>, GoiError> {
    execute_family(p, nu, exec).into_iter().map(|(j, v)| v.map(|v| (j, v))).collect()
}

/// Checks that `Ex` is invariant along lifted cut elimination and vanishes
/// exactly at the indices that get dropped.
pub fn verify_main_theorem(p: &ProofTerm, nu: &IndexedFamily, exec: Exec) -> Report {
    let mut rep = Report {
        initial: nu.j.clone(),
        steps: Vec::new(),
        final_j: IndexSet::new(),
        nonzero: IndexSet::new(),
        final_failures: Vec::new(),
        single_pass_disagreements: IndexSet::new(),
        error: None,
    };
    if let Err(e) = run_checks(p, nu, exec, &mut rep) {
        rep.error = Some(e.to_string());
    }
    rep
}

fn run_checks(p: &ProofTerm, nu: &IndexedFamily, exec: Exec, rep: &mut Report) -> Result<(), GoiError> {
    let ex0 = ex_all(p, nu, exec)?;
    let items: Vec<(&String, &PointVec)> = nu.values.iter().collect();
    let dis = exec.map(&items, |(_, x)| single_pass_disagrees(p, x));
    for ((j, _), d) in items.iter().zip(dis) {
        if d? {
            rep.single_pass_disagreements.insert((*j).clone());
        }
    }
    let steps = normalize_lifted(p, nu, None)?;
    let mut prev = ex0.clone();
    for s in &steps {
        let next = ex_all(&s.after.0, &s.after.1, exec)?;
        let mut failures = Vec::new();
        for (j, v) in &next {
            if !morphisms_equal(&prev[j], v)? {
                failures.push(format!("Ex changed at {j}: before\n{}\nafter\n{}", prev[j], v));
            }
        }
        for j in &s.dropped {
            if !prev[j].is_zero() {
                failures.push(format!("dropped index {j} has nonzero Ex\n{}", prev[j]));
            }
        }
        rep.steps.push(StepCheck {
            line: s.to_string(),
            before: s.before.1.j.clone(),
            after: s.after.1.j.clone(),
            dropped: s.dropped.clone(),
            failures,
        });
        prev = next;
    }
    let (nf, fam) = steps.last().map(|s| s.after.clone()).unwrap_or_else(|| (p.clone(), nu.clone()));
    rep.final_j = fam.j.clone();
    rep.nonzero = ex0.iter().filter(|(_, v)| !v.is_zero()).map(|(j, _)| j.clone()).collect();
    if rep.final_j != rep.nonzero {
        rep.final_failures.push(format!(
            "surviving indices {} differ from nonzero ones {}",
            fmt_set(&rep.final_j),
            fmt_set(&rep.nonzero)
        ));
    }
    for (j, x) in &fam.values {
        let d = denotation_morphism(&nf, x)?;
        if !morphisms_equal(&ex0[j], &d)? {
            rep.final_failures.push(format!("Ex at {j} differs from the normal form's denotation"));
        }
        if x.ctx != nu.values[j].ctx {
            rep.final_failures.push(format!("context point moved at {j}"));
        }
    }
    let executable: BTreeSet<&String> = nu
        .values
        .iter()
        .filter(|(_, x)| x.cuts.iter().all(|s| !s.is_present() || s.is_matched()))
        .map(|(j, _)| j)
        .collect();
    if executable != rep.final_j.iter().collect() {
        rep.final_failures.push("surviving indices differ from the relationally executable points".into());
    }
    Ok(())
}

/// Outcome of the zero-convergence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceResult {
    pub samples: usize,
    pub failures: Vec<String>,
}

impl ConvergenceResult {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.samples > 0
    }
}

/// Cuts random cut-free corpus proofs `p |- G, A` and `q |- D, A^` at points
/// whose values on `A` and `A^` differ; the execution must be ZERO.
pub fn zero_convergence(samples: usize, max_size: usize, seed: u64, exec: Exec) -> ConvergenceResult {
    use crate::corpus::{enumerate, members, seeded};
    use rand::seq::IndexedRandom;
    use rand::Rng;

    let mut by_last: BTreeMap<Formula, Vec<(ProofTerm, Vec<PointVec>)>> = BTreeMap::new();
    for e in enumerate(max_size, exec) {
        if e.proof.is_cut_free() {
            let ms = members(&e.proof, 64);
            if !ms.is_empty() {
                by_last.entry(e.seq.context.last().cloned().expect("nonempty")).or_default().push((e.proof, ms));
            }
        }
    }
    // formulas whose points can disagree with a point of the dual side
    let lasts: Vec<Formula> = by_last
        .keys()
        .filter(|f| by_last.contains_key(&crate::mall_syntax::dual(f)) && crate::rel_model::interp_formula(f).len() > 1)
        .cloned()
        .collect();
    if lasts.is_empty() {
        return ConvergenceResult { samples: 0, failures: vec!["no candidate pairs".into()] };
    }
    let mut rng = seeded(seed);
    let mut jobs = Vec::with_capacity(samples);
    while jobs.len() < samples {
        let f = lasts.choose(&mut rng).expect("nonempty");
        let (p, xs) = by_last[f].choose(&mut rng).expect("nonempty");
        let (q, ys) = by_last[&crate::mall_syntax::dual(f)].choose(&mut rng).expect("nonempty");
        let x = &xs[rng.random_range(0..xs.len())];
        let y = &ys[rng.random_range(0..ys.len())];
        let (a, b) = (x.ctx.last().expect("nonempty"), y.ctx.last().expect("nonempty"));
        if a == b {
            continue;
        }
        let cut = ProofTerm::CutI(Box::new(p.clone()), Box::new(q.clone()));
        let mut cuts = x.cuts.clone();
        cuts.extend(y.cuts.iter().cloned());
        cuts.push(Slot::Present(a.clone(), b.clone()));
        let mut ctx = x.ctx[..x.ctx.len() - 1].to_vec();
        ctx.extend(y.ctx[..y.ctx.len() - 1].iter().cloned());
        jobs.push((cut, PointVec { cuts, ctx }));
    }
    let failures = exec
        .map(&jobs, |(cut, z)| match execute_point(cut, z) {
            Ok(v) if v.is_zero() => None,
            Ok(v) => Some(format!("{cut} at {z}: {v}")),
            Err(e) => Some(format!("{cut} at {z}: {e}")),
        })
        .into_iter()
        .flatten()
        .collect();
    ConvergenceResult { samples, failures }
}

/// Graphviz rendering of `[x]`.
pub fn to_dot(net: &Net, eps: &EpsilonAssignment) -> String {
    let mut s = String::from("digraph ex {\n  rankdir=BT;\n  node [fontname=\"monospace\"];\n");
    for (i, o) in net.occs.iter().enumerate() {
        let mut label = format!("{} @ {}", crate::mall_syntax::fmt_top(&o.formula), o.point);
        let mut style = String::new();
        if let Origin::Mult { .. } = o.origin {
            if eps.ret[i] {
                label.push_str("\\nret: 0");
            }
            if eps.coret[i] {
                label.push_str("\\ncoret: 0");
            }
            if eps.ret[i] || eps.coret[i] {
                style.push_str(", color=red");
            }
        }
        if eps.killed[i] {
            label.push_str("\\nkilled");
            style.push_str(", style=dashed");
        }
        writeln!(s, "  o{i} [label=\"{label}\"{style}];").expect("string write");
    }
    for (i, o) in net.occs.iter().enumerate() {
        match o.origin {
            Origin::Axiom(p) if i < p => writeln!(s, "  o{i} -> o{p} [dir=none, label=\"ax\"];"),
            Origin::Mult { a, b } => writeln!(s, "  o{a} -> o{i};\n  o{b} -> o{i};"),
            Origin::Pass(c) => writeln!(s, "  o{c} -> o{i} [style=dotted];"),
            _ => Ok(()),
        }
        .expect("string write");
    }
    for (k, e) in net.sigma.iter().enumerate() {
        let (color, tag) = if e.matched { ("blue", "s") } else { ("red", "0") };
        writeln!(s, "  o{} -> o{} [dir=none, style=dashed, color={color}, label=\"cut{k}: {tag}\"];", e.left, e.right)
            .expect("string write");
    }
    for (k, &o) in net.ports.iter().enumerate() {
        writeln!(s, "  port{k} [shape=plaintext, label=\"{k}\"];\n  o{o} -> port{k};").expect("string write");
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mall_syntax::parse_proof;
    use crate::rel_model::interp_with_cuts;

    fn pi1() -> ProofTerm {
        parse_proof("(cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot))").unwrap()
    }

    fn star2() -> PointVec {
        PointVec { cuts: vec![], ctx: vec![Point::Star, Point::Star] }
    }

    fn sym() -> MorphismValue {
        let e = Addr::EMPTY;
        let map = [(0, 1), (1, 0)]
            .into_iter()
            .map(|(a, b)| (Token { port: a, addr: e }, Token { port: b, addr: e }))
            .collect();
        MorphismValue::Table { ports: 2, map }
    }

    #[test]
    fn addr_round_trip() {
        let a = Addr::parse("lrr").unwrap();
        assert_eq!(a.to_string(), "lrr");
        assert_eq!(a.pop().unwrap(), (false, Addr::parse("rr").unwrap()));
        assert_eq!(Addr::parse("e").unwrap(), Addr::EMPTY);
        let x = Point::pair(Point::in1(Point::Star), Point::pair(Point::Star, Point::Star));
        let ls: Vec<String> = leaf_addrs(&x).iter().map(|a| a.to_string()).collect();
        assert_eq!(ls, ["l", "rl", "rr"]);
    }

    #[test]
    fn prologue_points() {
        let p = pi1();
        let rel: Vec<PointVec> = interp_with_cuts(&p).unwrap().into_iter().collect();
        assert_eq!(rel.len(), 2);
        let vals: Vec<MorphismValue> = rel.iter().map(|x| execute_point(&p, x).unwrap()).collect();
        let pi3 = parse_proof("(ax bot)").unwrap();
        let d = denotation_morphism(&pi3, &star2()).unwrap();
        assert_eq!(d, sym());
        // the matched point is nu_1
        let (m, u): (Vec<_>, Vec<_>) = rel.iter().zip(&vals).partition(|(x, _)| x.cuts[0].is_matched());
        assert_eq!(m.len(), 1);
        assert_eq!(*m[0].1, sym());
        assert!(u[0].1.is_zero());
        let net = build_box(&p, u[0].0).unwrap();
        assert_eq!(net.sigma.len(), 1);
        assert!(!net.sigma[0].matched);
    }

    #[test]
    fn pi2_token_bounces_through_the_cut() {
        let p = parse_proof("(cut (ax bot) (ax 1))").unwrap();
        let x = interp_with_cuts(&p).unwrap().into_iter().next().unwrap();
        let net = build_box(&p, &x).unwrap();
        let eps = zero_action(&net).unwrap();
        assert!(eps.is_trivial());
        let out = eval_token(&net, &eps, Token { port: 0, addr: Addr::EMPTY }, 100).unwrap();
        assert_eq!(out, Outcome::Exit(Token { port: 1, addr: Addr::EMPTY }));
    }

    #[test]
    fn exzio_is_zero_on_three_ports() {
        let p = parse_proof("(tensor (cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot)) (ax bot))").unwrap();
        let x = interp_with_cuts(&p).unwrap().into_iter().find(|x| !x.cuts[0].is_matched()).unwrap();
        let net = build_box(&p, &x).unwrap();
        let eps = zero_action(&net).unwrap();
        assert_eq!(eps.annihilated(), 2);
        let v = tabulate(&net, &eps).unwrap();
        assert_eq!(v, MorphismValue::Zero { ports: 3 });
        assert!(single_pass_disagrees(&p, &x).is_ok());
    }

    #[test]
    fn prologue_theorem() {
        let p = pi1();
        let nu = IndexedFamily::numbered(interp_with_cuts(&p).unwrap());
        let rep = verify_main_theorem(&p, &nu, Exec::Sequential);
        assert!(rep.pass(), "{rep}");
        assert_eq!(rep.j_chain(), "J: {1,2} -> {1}");
    }

    #[test]
    fn mismatched_cuts_converge_to_zero() {
        let r = zero_convergence(200, 4, 3, Exec::Parallel);
        assert!(r.pass(), "{:?}", &r.failures[..r.failures.len().min(3)]);
    }

    #[test]
    fn signature_mismatch() {
        assert!(morphisms_equal(&MorphismValue::Zero { ports: 2 }, &MorphismValue::Zero { ports: 3 }).is_err());
        assert!(!morphisms_equal(&MorphismValue::Zero { ports: 2 }, &sym()).unwrap());
    }
}
