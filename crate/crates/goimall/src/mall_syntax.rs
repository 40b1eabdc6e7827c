//! Formulas, sequents with a cut stack, and proof terms of MALL with explicit
//! exchange.
//!
//! Every logical rule puts its principal formula last, both in its premises
//! and in its conclusion. Reordering is the job of [`ProofTerm::Exch`].

use std::fmt;

use thiserror::Error;

use crate::sexp::{read_one, Sexp};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    One,
    Bot,
    Zero,
    Top,
    Tensor(Box<Formula>, Box<Formula>),
    Par(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }
    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }
    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(Box::new(a), Box::new(b))
    }
    pub fn with(a: Formula, b: Formula) -> Formula {
        Formula::With(Box::new(a), Box::new(b))
    }

    /// Number of connectives and constants.
    pub fn size(&self) -> usize {
        match self {
            Formula::One | Formula::Bot | Formula::Zero | Formula::Top => 1,
            Formula::Tensor(a, b) | Formula::Par(a, b) | Formula::Plus(a, b) | Formula::With(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

/// Prints without the outermost parentheses, as in sequents.
pub fn fmt_top(f: &Formula) -> String {
    let s = f.to_string();
    match f {
        Formula::One | Formula::Bot | Formula::Zero | Formula::Top => s,
        _ => s[1..s.len() - 1].to_string(),
    }
}

/// De Morgan dual.
pub fn dual(f: &Formula) -> Formula {
    match f {
        Formula::One => Formula::Bot,
        Formula::Bot => Formula::One,
        Formula::Zero => Formula::Top,
        Formula::Top => Formula::Zero,
        Formula::Tensor(a, b) => Formula::par(dual(a), dual(b)),
        Formula::Par(a, b) => Formula::tensor(dual(a), dual(b)),
        Formula::Plus(a, b) => Formula::with(dual(a), dual(b)),
        Formula::With(a, b) => Formula::plus(dual(a), dual(b)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::One => write!(f, "1"),
            Formula::Bot => write!(f, "bot"),
            Formula::Zero => write!(f, "0"),
            Formula::Top => write!(f, "top"),
            Formula::Tensor(a, b) => write!(f, "({a} * {b})"),
            Formula::Par(a, b) => write!(f, "({a} par {b})"),
            Formula::Plus(a, b) => write!(f, "({a} + {b})"),
            Formula::With(a, b) => write!(f, "({a} & {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {msg}")]
pub struct SyntaxError {
    pub offset: usize,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(offset: usize, msg: impl Into<String>) -> Self {
        SyntaxError { offset, msg: msg.into() }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    formula_of_sexp(&read_one(text)?)
}

fn formula_of_sexp(s: &Sexp) -> Result<Formula, SyntaxError> {
    match s {
        Sexp::Atom(a, o) => match a.as_str() {
            "1" => Ok(Formula::One),
            "bot" => Ok(Formula::Bot),
            "0" => Ok(Formula::Zero),
            "top" => Ok(Formula::Top),
            _ => Err(SyntaxError::new(*o, format!("unknown constant `{a}`"))),
        },
        Sexp::List(items, o) => {
            let [l, Sexp::Atom(op, op_at), r] = items.as_slice() else {
                return Err(SyntaxError::new(*o, "expected `(F op G)`"));
            };
            let (l, r) = (formula_of_sexp(l)?, formula_of_sexp(r)?);
            match op.as_str() {
                "*" => Ok(Formula::tensor(l, r)),
                "par" => Ok(Formula::par(l, r)),
                "+" => Ok(Formula::plus(l, r)),
                "&" => Ok(Formula::with(l, r)),
                _ => Err(SyntaxError::new(*op_at, format!("unknown connective `{op}`"))),
            }
        }
    }
}

/// One entry of a cut stack. `right` is always `dual(left)` in a checked sequent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutPair {
    pub left: Formula,
    pub right: Formula,
}

impl CutPair {
    pub fn new(left: Formula) -> Self {
        let right = dual(&left);
        CutPair { left, right }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub cuts: Vec<CutPair>,
    pub context: Vec<Formula>,
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|- [")?;
        for (i, c) in self.cuts.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}({}, {})", fmt_top(&c.left), fmt_top(&c.right))?;
        }
        write!(f, "{}]", if self.cuts.is_empty() { "" } else { " " })?;
        for (i, c) in self.context.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { ", " }, fmt_top(c))?;
        }
        Ok(())
    }
}

/// Superposed stack entries of a `&` rule: (index in the left premise's
/// stack, index in the right premise's stack).
pub type SigmaSpec = Vec<(usize, usize)>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProofTerm {
    /// `|- A, A^`
    Ax(Formula),
    OneI,
    /// `|- G, top`
    TopI(Vec<Formula>),
    BotI(Box<ProofTerm>),
    TensorI(Box<ProofTerm>, Box<ProofTerm>),
    ParI(Box<ProofTerm>),
    CutI(Box<ProofTerm>, Box<ProofTerm>),
    WithI(Box<ProofTerm>, Box<ProofTerm>, SigmaSpec),
    /// Premise `|- G, A` gives `|- G, A + B` with `B` the stored formula.
    Plus1I(Box<ProofTerm>, Formula),
    /// Premise `|- G, B` gives `|- G, A + B` with `A` the stored formula.
    Plus2I(Box<ProofTerm>, Formula),
    Exch(Box<ProofTerm>, usize, usize),
}

/// A proof node with its premises stripped off.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Ax(Formula),
    OneI,
    TopI(Vec<Formula>),
    BotI,
    Tensor,
    Par,
    Cut,
    With(SigmaSpec),
    Plus1(Formula),
    Plus2(Formula),
    Exch(usize, usize),
}

impl Rule {
    pub fn arity(&self) -> usize {
        match self {
            Rule::Ax(_) | Rule::OneI | Rule::TopI(_) => 0,
            Rule::BotI | Rule::Par | Rule::Plus1(_) | Rule::Plus2(_) | Rule::Exch(..) => 1,
            Rule::Tensor | Rule::Cut | Rule::With(_) => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rule::Ax(_) => "ax",
            Rule::OneI => "one",
            Rule::TopI(_) => "top",
            Rule::BotI => "bot",
            Rule::Tensor => "tensor",
            Rule::Par => "par",
            Rule::Cut => "cut",
            Rule::With(_) => "with",
            Rule::Plus1(_) => "plus1",
            Rule::Plus2(_) => "plus2",
            Rule::Exch(..) => "ex",
        }
    }

    /// True for rules that introduce the last formula of their conclusion.
    pub fn is_logical(&self) -> bool {
        !matches!(self, Rule::Cut | Rule::Exch(..))
    }
}

impl ProofTerm {
    pub fn rule(&self) -> Rule {
        match self {
            ProofTerm::Ax(a) => Rule::Ax(a.clone()),
            ProofTerm::OneI => Rule::OneI,
            ProofTerm::TopI(g) => Rule::TopI(g.clone()),
            ProofTerm::BotI(_) => Rule::BotI,
            ProofTerm::TensorI(..) => Rule::Tensor,
            ProofTerm::ParI(_) => Rule::Par,
            ProofTerm::CutI(..) => Rule::Cut,
            ProofTerm::WithI(_, _, s) => Rule::With(s.clone()),
            ProofTerm::Plus1I(_, g) => Rule::Plus1(g.clone()),
            ProofTerm::Plus2I(_, g) => Rule::Plus2(g.clone()),
            ProofTerm::Exch(_, i, j) => Rule::Exch(*i, *j),
        }
    }

    pub fn premises(&self) -> Vec<&ProofTerm> {
        match self {
            ProofTerm::Ax(_) | ProofTerm::OneI | ProofTerm::TopI(_) => vec![],
            ProofTerm::BotI(p)
            | ProofTerm::ParI(p)
            | ProofTerm::Plus1I(p, _)
            | ProofTerm::Plus2I(p, _)
            | ProofTerm::Exch(p, ..) => vec![p],
            ProofTerm::TensorI(p, q) | ProofTerm::CutI(p, q) | ProofTerm::WithI(p, q, _) => vec![p, q],
        }
    }

    /// Rebuilds a node from a rule and its premises. Panics on an arity mismatch.
    pub fn from_parts(rule: Rule, mut kids: Vec<ProofTerm>) -> ProofTerm {
        assert_eq!(kids.len(), rule.arity(), "arity mismatch for `{}`", rule.name());
        let mut next = || Box::new(kids.remove(0));
        match rule {
            Rule::Ax(a) => ProofTerm::Ax(a),
            Rule::OneI => ProofTerm::OneI,
            Rule::TopI(g) => ProofTerm::TopI(g),
            Rule::BotI => ProofTerm::BotI(next()),
            Rule::Tensor => {
                let p = next();
                ProofTerm::TensorI(p, next())
            }
            Rule::Par => ProofTerm::ParI(next()),
            Rule::Cut => {
                let p = next();
                ProofTerm::CutI(p, next())
            }
            Rule::With(s) => {
                let p = next();
                ProofTerm::WithI(p, next(), s)
            }
            Rule::Plus1(g) => ProofTerm::Plus1I(next(), g),
            Rule::Plus2(g) => ProofTerm::Plus2I(next(), g),
            Rule::Exch(i, j) => ProofTerm::Exch(next(), i, j),
        }
    }

    /// Number of rule nodes.
    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        !matches!(self, ProofTerm::CutI(..)) && self.premises().iter().all(|p| p.is_cut_free())
    }

    /// The subterm at a path of premise indices.
    pub fn at(&self, path: &[usize]) -> Option<&ProofTerm> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises().get(i)?.at(rest),
        }
    }
}

fn fmt_sigma(f: &mut fmt::Formatter<'_>, s: &SigmaSpec) -> fmt::Result {
    write!(f, "(")?;
    for (k, (i, j)) in s.iter().enumerate() {
        write!(f, "{}({i} {j})", if k == 0 { "" } else { " " })?;
    }
    write!(f, ")")
}

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofTerm::Ax(a) => write!(f, "(ax {a})"),
            ProofTerm::OneI => write!(f, "(one)"),
            ProofTerm::TopI(g) => {
                write!(f, "(top (")?;
                for (k, a) in g.iter().enumerate() {
                    write!(f, "{}{a}", if k == 0 { "" } else { " " })?;
                }
                write!(f, "))")
            }
            ProofTerm::BotI(p) => write!(f, "(bot {p})"),
            ProofTerm::TensorI(p, q) => write!(f, "(tensor {p} {q})"),
            ProofTerm::ParI(p) => write!(f, "(par {p})"),
            ProofTerm::CutI(p, q) => write!(f, "(cut {p} {q})"),
            ProofTerm::WithI(p, q, s) => {
                write!(f, "(with {p} {q} ")?;
                fmt_sigma(f, s)?;
                write!(f, ")")
            }
            ProofTerm::Plus1I(p, g) => write!(f, "(plus1 {p} {g})"),
            ProofTerm::Plus2I(p, g) => write!(f, "(plus2 {p} {g})"),
            ProofTerm::Exch(p, i, j) => write!(f, "(ex {p} {i} {j})"),
        }
    }
}

pub fn parse_proof(text: &str) -> Result<ProofTerm, SyntaxError> {
    proof_of_sexp(&read_one(text)?)
}

fn index_of(s: &Sexp) -> Result<usize, SyntaxError> {
    match s {
        Sexp::Atom(a, o) => a.parse().map_err(|_| SyntaxError::new(*o, format!("expected a position, got `{a}`"))),
        Sexp::List(_, o) => Err(SyntaxError::new(*o, "expected a position")),
    }
}

fn proof_of_sexp(s: &Sexp) -> Result<ProofTerm, SyntaxError> {
    let Sexp::List(items, at) = s else {
        return Err(SyntaxError::new(s.offset(), "expected a proof node `(rule ...)`"));
    };
    let Some((Sexp::Atom(head, _), args)) = items.split_first() else {
        return Err(SyntaxError::new(*at, "expected a rule name"));
    };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(SyntaxError::new(*at, format!("`{head}` takes {n} argument(s), got {}", args.len())))
        }
    };
    let sub = |i: usize| proof_of_sexp(&args[i]).map(Box::new);
    match head.as_str() {
        "ax" => {
            arity(1)?;
            Ok(ProofTerm::Ax(formula_of_sexp(&args[0])?))
        }
        "one" => {
            arity(0)?;
            Ok(ProofTerm::OneI)
        }
        "top" => {
            arity(1)?;
            let Sexp::List(fs, _) = &args[0] else {
                return Err(SyntaxError::new(args[0].offset(), "expected a formula list"));
            };
            Ok(ProofTerm::TopI(fs.iter().map(formula_of_sexp).collect::<Result<_, _>>()?))
        }
        "bot" => {
            arity(1)?;
            Ok(ProofTerm::BotI(sub(0)?))
        }
        "tensor" => {
            arity(2)?;
            Ok(ProofTerm::TensorI(sub(0)?, sub(1)?))
        }
        "par" => {
            arity(1)?;
            Ok(ProofTerm::ParI(sub(0)?))
        }
        "cut" => {
            arity(2)?;
            Ok(ProofTerm::CutI(sub(0)?, sub(1)?))
        }
        "with" => {
            arity(3)?;
            let Sexp::List(pairs, _) = &args[2] else {
                return Err(SyntaxError::new(args[2].offset(), "expected a superposition list"));
            };
            let mut sigma = Vec::new();
            for p in pairs {
                match p {
                    Sexp::List(ij, _) if ij.len() == 2 => sigma.push((index_of(&ij[0])?, index_of(&ij[1])?)),
                    _ => return Err(SyntaxError::new(p.offset(), "expected `(i j)`")),
                }
            }
            Ok(ProofTerm::WithI(sub(0)?, sub(1)?, sigma))
        }
        "plus1" => {
            arity(2)?;
            Ok(ProofTerm::Plus1I(sub(0)?, formula_of_sexp(&args[1])?))
        }
        "plus2" => {
            arity(2)?;
            Ok(ProofTerm::Plus2I(sub(0)?, formula_of_sexp(&args[1])?))
        }
        "ex" => {
            arity(3)?;
            Ok(ProofTerm::Exch(sub(0)?, index_of(&args[1])?, index_of(&args[2])?))
        }
        _ => Err(SyntaxError::new(*at, format!("unknown rule `{head}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at {}: {msg}", fmt_path(path))]
pub struct CheckError {
    pub path: Vec<usize>,
    pub msg: String,
}

pub fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

fn split_last(s: &Sequent) -> Option<(&[Formula], &Formula)> {
    s.context.split_last().map(|(l, rest)| (rest, l))
}

/// Conclusion of a single rule instance from the conclusions of its premises.
pub fn rule_conclusion(rule: &Rule, kids: &[&Sequent]) -> Result<Sequent, String> {
    if kids.len() != rule.arity() {
        return Err(format!("`{}` expects {} premise(s)", rule.name(), rule.arity()));
    }
    let last = |s: &Sequent| -> Result<(Vec<Formula>, Formula), String> {
        let (rest, l) = split_last(s).ok_or_else(|| "premise has an empty context".to_string())?;
        Ok((rest.to_vec(), l.clone()))
    };
    Ok(match rule {
        Rule::Ax(a) => Sequent { cuts: vec![], context: vec![a.clone(), dual(a)] },
        Rule::OneI => Sequent { cuts: vec![], context: vec![Formula::One] },
        Rule::TopI(g) => {
            let mut context = g.clone();
            context.push(Formula::Top);
            Sequent { cuts: vec![], context }
        }
        Rule::BotI => {
            let mut s = kids[0].clone();
            s.context.push(Formula::Bot);
            s
        }
        Rule::Par => {
            let (mut g, b) = last(kids[0])?;
            let a = g.pop().ok_or("par needs two formulas")?;
            g.push(Formula::par(a, b));
            Sequent { cuts: kids[0].cuts.clone(), context: g }
        }
        Rule::Tensor => {
            let (mut g1, a) = last(kids[0])?;
            let (g2, b) = last(kids[1])?;
            g1.extend(g2);
            g1.push(Formula::tensor(a, b));
            let mut cuts = kids[0].cuts.clone();
            cuts.extend(kids[1].cuts.iter().cloned());
            Sequent { cuts, context: g1 }
        }
        Rule::Cut => {
            let (mut g1, a) = last(kids[0])?;
            let (g2, b) = last(kids[1])?;
            if b != dual(&a) {
                return Err(format!("cut formulas not dual: {a} and {b}"));
            }
            g1.extend(g2);
            let mut cuts = kids[0].cuts.clone();
            cuts.extend(kids[1].cuts.iter().cloned());
            cuts.push(CutPair { left: a, right: b });
            Sequent { cuts, context: g1 }
        }
        Rule::With(sigma) => {
            let (g1, a) = last(kids[0])?;
            let (g2, b) = last(kids[1])?;
            if g1 != g2 {
                return Err("with premises have different contexts".into());
            }
            let (d1, d2) = (&kids[0].cuts, &kids[1].cuts);
            let mut used1 = vec![false; d1.len()];
            let mut used2 = vec![false; d2.len()];
            for &(i, j) in sigma {
                if i >= d1.len() || j >= d2.len() {
                    return Err(format!("superposition ({i} {j}) out of range"));
                }
                if used1[i] || used2[j] {
                    return Err(format!("superposition ({i} {j}) reuses a stack entry"));
                }
                if d1[i] != d2[j] {
                    return Err(format!("superposition ({i} {j}) pairs different cut formulas"));
                }
                used1[i] = true;
                used2[j] = true;
            }
            let mut cuts: Vec<CutPair> = d1.iter().zip(&used1).filter(|(_, u)| !**u).map(|(c, _)| c.clone()).collect();
            cuts.extend(d2.iter().zip(&used2).filter(|(_, u)| !**u).map(|(c, _)| c.clone()));
            cuts.extend(sigma.iter().map(|&(i, _)| d1[i].clone()));
            let mut context = g1;
            context.push(Formula::with(a, b));
            Sequent { cuts, context }
        }
        Rule::Plus1(g) => {
            let (mut ctx, a) = last(kids[0])?;
            ctx.push(Formula::plus(a, g.clone()));
            Sequent { cuts: kids[0].cuts.clone(), context: ctx }
        }
        Rule::Plus2(g) => {
            let (mut ctx, a) = last(kids[0])?;
            ctx.push(Formula::plus(g.clone(), a));
            Sequent { cuts: kids[0].cuts.clone(), context: ctx }
        }
        Rule::Exch(i, j) => {
            let mut s = kids[0].clone();
            let n = s.context.len();
            if *i >= n || *j >= n || i == j {
                return Err(format!("exchange ({i} {j}) invalid for a context of length {n}"));
            }
            s.context.swap(*i, *j);
            s
        }
    })
}

/// The eta-expanded identity `|- A, A^`, down to axioms on units and `top`.
pub fn eta_expand(a: &Formula) -> ProofTerm {
    use ProofTerm as P;
    let ex = |p: ProofTerm, i, j| P::Exch(Box::new(p), i, j);
    match a {
        Formula::One | Formula::Bot => P::Ax(a.clone()),
        Formula::Zero => P::TopI(vec![Formula::Zero]),
        Formula::Top => ex(P::TopI(vec![Formula::Zero]), 0, 1),
        Formula::Tensor(x, y) => {
            let t = P::TensorI(Box::new(ex(eta_expand(x), 0, 1)), Box::new(ex(eta_expand(y), 0, 1)));
            P::ParI(Box::new(ex(ex(t, 0, 2), 1, 2)))
        }
        Formula::Par(x, y) => ex(eta_expand(&Formula::tensor(dual(x), dual(y))), 0, 1),
        Formula::With(x, y) => {
            let l = ex(P::Plus1I(Box::new(eta_expand(x)), dual(y)), 0, 1);
            let r = ex(P::Plus2I(Box::new(eta_expand(y)), dual(x)), 0, 1);
            ex(P::WithI(Box::new(l), Box::new(r), vec![]), 0, 1)
        }
        Formula::Plus(x, y) => ex(eta_expand(&Formula::with(dual(x), dual(y))), 0, 1),
    }
}

/// Checks a proof and returns its conclusion.
pub fn check_proof(p: &ProofTerm) -> Result<Sequent, CheckError> {
    fn go(p: &ProofTerm, path: &mut Vec<usize>) -> Result<Sequent, CheckError> {
        let mut kids = Vec::new();
        for (i, q) in p.premises().into_iter().enumerate() {
            path.push(i);
            kids.push(go(q, path)?);
            path.pop();
        }
        let refs: Vec<&Sequent> = kids.iter().collect();
        rule_conclusion(&p.rule(), &refs).map_err(|msg| CheckError { path: path.clone(), msg })
    }
    go(p, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_formula("(1 & 1)").unwrap(), Formula::with(Formula::One, Formula::One));
        assert_eq!(
            parse_formula("((1 * bot) par 0)").unwrap(),
            Formula::par(Formula::tensor(Formula::One, Formula::Bot), Formula::Zero)
        );
        assert_eq!(parse_formula("(1 &").unwrap_err().offset, 4);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&Formula::One), Formula::Bot);
        let w = Formula::with(Formula::One, Formula::One);
        assert_eq!(dual(&w), Formula::plus(Formula::Bot, Formula::Bot));
        let t = Formula::tensor(Formula::One, Formula::Bot);
        assert_eq!(dual(&dual(&t)), t);
    }

    #[test]
    fn proof_parsing_defers_typing() {
        assert_eq!(parse_proof("(ax 1)").unwrap(), ProofTerm::Ax(Formula::One));
        let bad = parse_proof("(with (ax 1) (one) ())").unwrap();
        assert!(check_proof(&bad).is_err());
        assert!(parse_proof("(tensor (one))").is_err());
    }

    #[test]
    fn axiom_conclusion() {
        let s = check_proof(&ProofTerm::Ax(Formula::One)).unwrap();
        assert_eq!(s.context, vec![Formula::One, Formula::Bot]);
        assert!(s.cuts.is_empty());
    }

    #[test]
    fn non_dual_cut_rejected() {
        // Under the `|- A, A^` axiom orientation, `(cut (ax 1) (ax bot))` is a
        // legal cut on `bot`; two `1` axioms are the non-dual pair.
        let p = parse_proof("(cut (ax 1) (ax 1))").unwrap();
        let e = check_proof(&p).unwrap_err();
        assert!(e.msg.contains("cut formulas not dual"), "{e}");
        assert!(e.path.is_empty());
    }

    #[test]
    fn prologue_first_proof() {
        let p = parse_proof("(cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot))").unwrap();
        let s = check_proof(&p).unwrap();
        let w = Formula::with(Formula::One, Formula::One);
        assert_eq!(s.cuts, vec![CutPair::new(w)]);
        assert_eq!(s.context, vec![Formula::Bot, Formula::One]);
        // The reading with `(ax 1)` in the & premises checks as well, just
        // with the opposite orientation of every formula.
        let q = parse_proof("(cut (with (ax 1) (ax 1) ()) (plus1 (ax bot) 1))").unwrap();
        assert_eq!(check_proof(&q).unwrap().context, vec![Formula::One, Formula::Bot]);
    }

    #[test]
    fn with_stack_order() {
        let l = "(ex (cut (ax bot) (ax 1)) 0 1)";
        let p = parse_proof(&format!("(with {l} {l} ((0 0)))")).unwrap();
        let s = check_proof(&p).unwrap();
        assert_eq!(s.cuts.len(), 1);
        let p = parse_proof(&format!("(with {l} {l} ())")).unwrap();
        assert_eq!(check_proof(&p).unwrap().cuts.len(), 2);
    }

    #[test]
    fn error_path_points_into_tree() {
        let p = parse_proof("(par (tensor (one) (ex (ax 1) 0 0)))").unwrap();
        let e = check_proof(&p).unwrap_err();
        assert_eq!(e.path, vec![0, 1]);
    }
}
