//! Indexed MALL: formulas with domains, restriction, the indexed checker, the
//! translation of point families, and both directions of the fundamental
//! lemma relating families in `|pi|` to indexed proofs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mall_syntax::{dual, fmt_path, CutPair, Formula, ProofTerm, Rule, Sequent};
use crate::rel_model::{is_member, CutAssignment, Decorated, MembershipError, Point, PointVec, Slot};

pub type IndexSet = BTreeSet<String>;

pub fn fmt_set(s: &IndexSet) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))
}

pub fn index_set<I: IntoIterator<Item = S>, S: Into<String>>(xs: I) -> IndexSet {
    xs.into_iter().map(Into::into).collect()
}

/// A formula whose units carry their domain; `0` and `top` always have the
/// empty domain, and compound domains are derived from the children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IFormula {
    One(IndexSet),
    Bot(IndexSet),
    Zero,
    Top,
    Tensor(Box<IFormula>, Box<IFormula>),
    Par(Box<IFormula>, Box<IFormula>),
    Plus(Box<IFormula>, Box<IFormula>),
    With(Box<IFormula>, Box<IFormula>),
}

use IFormula as IF;

impl IFormula {
    fn bin(f: &Formula, a: IFormula, b: IFormula) -> IFormula {
        let (a, b) = (Box::new(a), Box::new(b));
        match f {
            Formula::Tensor(..) => IF::Tensor(a, b),
            Formula::Par(..) => IF::Par(a, b),
            Formula::Plus(..) => IF::Plus(a, b),
            Formula::With(..) => IF::With(a, b),
            _ => unreachable!("not a binary connective"),
        }
    }

    /// The underlying plain formula.
    pub fn erase(&self) -> Formula {
        match self {
            IF::One(_) => Formula::One,
            IF::Bot(_) => Formula::Bot,
            IF::Zero => Formula::Zero,
            IF::Top => Formula::Top,
            IF::Tensor(a, b) => Formula::tensor(a.erase(), b.erase()),
            IF::Par(a, b) => Formula::par(a.erase(), b.erase()),
            IF::Plus(a, b) => Formula::plus(a.erase(), b.erase()),
            IF::With(a, b) => Formula::with(a.erase(), b.erase()),
        }
    }

    /// `d(A)`. For ill-formed formulas this is the union of unit domains.
    pub fn domain(&self) -> IndexSet {
        match self {
            IF::One(j) | IF::Bot(j) => j.clone(),
            IF::Zero | IF::Top => IndexSet::new(),
            IF::Tensor(a, b) | IF::Par(a, b) | IF::Plus(a, b) | IF::With(a, b) => {
                a.domain().union(&b.domain()).cloned().collect()
            }
        }
    }

    /// Checks the domain discipline and returns the domain.
    pub fn well_formed(&self) -> Result<IndexSet, String> {
        match self {
            IF::One(j) | IF::Bot(j) => Ok(j.clone()),
            IF::Zero | IF::Top => Ok(IndexSet::new()),
            IF::Tensor(a, b) | IF::Par(a, b) => {
                let (da, db) = (a.well_formed()?, b.well_formed()?);
                if da != db {
                    return Err(format!("multiplicative children have domains {} and {}", fmt_set(&da), fmt_set(&db)));
                }
                Ok(da)
            }
            IF::Plus(a, b) | IF::With(a, b) => {
                let (da, db) = (a.well_formed()?, b.well_formed()?);
                if !da.is_disjoint(&db) {
                    return Err(format!("additive children overlap: {} and {}", fmt_set(&da), fmt_set(&db)));
                }
                Ok(da.union(&db).cloned().collect())
            }
        }
    }

    pub fn dual(&self) -> IFormula {
        match self {
            IF::One(j) => IF::Bot(j.clone()),
            IF::Bot(j) => IF::One(j.clone()),
            IF::Zero => IF::Top,
            IF::Top => IF::Zero,
            IF::Tensor(a, b) => IF::Par(Box::new(a.dual()), Box::new(b.dual())),
            IF::Par(a, b) => IF::Tensor(Box::new(a.dual()), Box::new(b.dual())),
            IF::Plus(a, b) => IF::With(Box::new(a.dual()), Box::new(b.dual())),
            IF::With(a, b) => IF::Plus(Box::new(a.dual()), Box::new(b.dual())),
        }
    }

    /// The point of this formula at index `j`, if `j` is in its domain.
    pub fn point_at(&self, j: &str) -> Option<Point> {
        match self {
            IF::One(d) | IF::Bot(d) => d.contains(j).then_some(Point::Star),
            IF::Zero | IF::Top => None,
            IF::Tensor(a, b) | IF::Par(a, b) => Some(Point::pair(a.point_at(j)?, b.point_at(j)?)),
            IF::Plus(a, b) | IF::With(a, b) => match a.point_at(j) {
                Some(x) => Some(Point::in1(x)),
                None => b.point_at(j).map(Point::in2),
            },
        }
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, outer: bool) -> fmt::Result {
        let (a, b, op) = match self {
            IF::One(j) => return write!(f, "1{}", fmt_set(j)),
            IF::Bot(j) => return write!(f, "bot{}", fmt_set(j)),
            IF::Zero => return write!(f, "0"),
            IF::Top => return write!(f, "top"),
            IF::Tensor(a, b) => (a, b, "*"),
            IF::Par(a, b) => (a, b, "par"),
            IF::Plus(a, b) => (a, b, "+"),
            IF::With(a, b) => (a, b, "&"),
        };
        if !outer {
            write!(f, "(")?;
        }
        a.fmt_inner(f, false)?;
        write!(f, " {op} ")?;
        b.fmt_inner(f, false)?;
        if !outer {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for IFormula {
    /// Top-level connectives print without parentheses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, true)
    }
}

/// `A|K`.
pub fn restrict_formula(a: &IFormula, k: &IndexSet) -> IFormula {
    let r = |x: &IFormula| Box::new(restrict_formula(x, k));
    match a {
        IF::One(j) => IF::One(j.intersection(k).cloned().collect()),
        IF::Bot(j) => IF::Bot(j.intersection(k).cloned().collect()),
        IF::Zero => IF::Zero,
        IF::Top => IF::Top,
        IF::Tensor(x, y) => IF::Tensor(r(x), r(y)),
        IF::Par(x, y) => IF::Par(r(x), r(y)),
        IF::Plus(x, y) => IF::Plus(r(x), r(y)),
        IF::With(x, y) => IF::With(r(x), r(y)),
    }
}

/// Superposes two formulas of equal shape over disjoint domains.
pub fn merge_formula(a: &IFormula, b: &IFormula) -> Option<IFormula> {
    let m = |x: &IFormula, y: &IFormula| merge_formula(x, y).map(Box::new);
    Some(match (a, b) {
        (IF::One(j), IF::One(k)) if j.is_disjoint(k) => IF::One(j.union(k).cloned().collect()),
        (IF::Bot(j), IF::Bot(k)) if j.is_disjoint(k) => IF::Bot(j.union(k).cloned().collect()),
        (IF::Zero, IF::Zero) => IF::Zero,
        (IF::Top, IF::Top) => IF::Top,
        (IF::Tensor(a1, a2), IF::Tensor(b1, b2)) => IF::Tensor(m(a1, b1)?, m(a2, b2)?),
        (IF::Par(a1, a2), IF::Par(b1, b2)) => IF::Par(m(a1, b1)?, m(a2, b2)?),
        (IF::Plus(a1, a2), IF::Plus(b1, b2)) => IF::Plus(m(a1, b1)?, m(a2, b2)?),
        (IF::With(a1, a2), IF::With(b1, b2)) => IF::With(m(a1, b1)?, m(a2, b2)?),
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("translation of {0} is undefined on a nonempty domain")]
    Undefined(Formula),
    #[error("point {point} at index {index} does not belong to {formula}")]
    Shape { formula: Formula, index: String, point: Point },
}

/// `<A>_a` for a family `a: J -> |A|`.
pub fn translate_formula_family(f: &Formula, a: &BTreeMap<String, Point>) -> Result<IFormula, TranslateError> {
    let shape =
        |j: &String, x: &Point| TranslateError::Shape { formula: f.clone(), index: j.clone(), point: x.clone() };
    match f {
        Formula::One | Formula::Bot => {
            if let Some((j, x)) = a.iter().find(|(_, x)| **x != Point::Star) {
                return Err(shape(j, x));
            }
            let d: IndexSet = a.keys().cloned().collect();
            Ok(if *f == Formula::One { IF::One(d) } else { IF::Bot(d) })
        }
        Formula::Zero | Formula::Top => {
            if a.is_empty() {
                Ok(if *f == Formula::Zero { IF::Zero } else { IF::Top })
            } else {
                Err(TranslateError::Undefined(f.clone()))
            }
        }
        Formula::Tensor(l, r) | Formula::Par(l, r) => {
            let (mut fl, mut fr) = (BTreeMap::new(), BTreeMap::new());
            for (j, x) in a {
                let Point::Pair(u, v) = x else { return Err(shape(j, x)) };
                fl.insert(j.clone(), (**u).clone());
                fr.insert(j.clone(), (**v).clone());
            }
            Ok(IF::bin(f, translate_formula_family(l, &fl)?, translate_formula_family(r, &fr)?))
        }
        Formula::Plus(l, r) | Formula::With(l, r) => {
            let (mut fl, mut fr) = (BTreeMap::new(), BTreeMap::new());
            for (j, x) in a {
                match x {
                    Point::In1(u) => fl.insert(j.clone(), (**u).clone()),
                    Point::In2(v) => fr.insert(j.clone(), (**v).clone()),
                    _ => return Err(shape(j, x)),
                };
            }
            Ok(IF::bin(f, translate_formula_family(l, &fl)?, translate_formula_family(r, &fr)?))
        }
    }
}

/// `<<Delta>>_delta`: one indexed pair per stack entry over the indices where
/// the entry is present. Entries absent everywhere become domain-empty pairs.
pub fn translate_cut_family(
    cuts: &[CutPair],
    delta: &BTreeMap<String, CutAssignment>,
) -> Result<Vec<(IFormula, IFormula)>, TranslateError> {
    cuts.iter()
        .enumerate()
        .map(|(i, c)| {
            let (mut left, mut right) = (BTreeMap::new(), BTreeMap::new());
            for (j, d) in delta {
                if let Slot::Present(a, b) = &d[i] {
                    left.insert(j.clone(), a.clone());
                    right.insert(j.clone(), b.clone());
                }
            }
            Ok((translate_formula_family(&c.left, &left)?, translate_formula_family(&c.right, &right)?))
        })
        .collect()
}

/// `J`-indexed family of points of one relation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedFamily {
    #[serde(rename = "J")]
    pub j: IndexSet,
    pub values: BTreeMap<String, PointVec>,
}

impl IndexedFamily {
    pub fn new(values: BTreeMap<String, PointVec>) -> Self {
        IndexedFamily { j: values.keys().cloned().collect(), values }
    }

    /// Family `1 -> xs[0], 2 -> xs[1], ...`.
    pub fn numbered(xs: impl IntoIterator<Item = PointVec>) -> Self {
        Self::new(xs.into_iter().enumerate().map(|(k, x)| ((k + 1).to_string(), x)).collect())
    }

    pub fn is_consistent(&self) -> bool {
        self.j.iter().eq(self.values.keys())
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let f: IndexedFamily = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if !f.is_consistent() {
            return Err("family `J` does not match the keys of `values`".into());
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serializes")
    }

    pub fn restrict(&self, k: &IndexSet) -> IndexedFamily {
        Self::new(self.values.iter().filter(|(j, _)| k.contains(*j)).map(|(j, x)| (j.clone(), x.clone())).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedSequent {
    pub j: IndexSet,
    pub cuts: Vec<(IFormula, IFormula)>,
    pub context: Vec<IFormula>,
}

impl fmt::Display for IndexedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|-{} [", fmt_set(&self.j))?;
        for (i, (a, b)) in self.cuts.iter().enumerate() {
            write!(f, "{}({a}, {b})", if i == 0 { " " } else { ", " })?;
        }
        write!(f, "{}]", if self.cuts.is_empty() { "" } else { " " })?;
        for (i, a) in self.context.iter().enumerate() {
            write!(f, "{}{a}", if i == 0 { " " } else { ", " })?;
        }
        Ok(())
    }
}

/// `|-_J [<<Delta>>_delta] <Gamma>_gamma` for a family over `|Delta~| x |Gamma|`.
pub fn translate_sequent(s: &Sequent, nu: &IndexedFamily) -> Result<IndexedSequent, TranslateError> {
    let delta = nu.values.iter().map(|(j, x)| (j.clone(), x.cuts.clone())).collect();
    let cuts = translate_cut_family(&s.cuts, &delta)?;
    let context = s
        .context
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let a = nu.values.iter().map(|(j, x)| (j.clone(), x.ctx[k].clone())).collect();
            translate_formula_family(g, &a)
        })
        .collect::<Result<_, _>>()?;
    Ok(IndexedSequent { j: nu.j.clone(), cuts, context })
}

/// Node labels of indexed proofs. Units carry their domain, axioms and `+`
/// side formulas carry indexed formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IRule {
    Ax(IFormula),
    OneI(IndexSet),
    TopI(Vec<IFormula>),
    BotI(IndexSet),
    Tensor,
    Par,
    Cut,
    With(Vec<(usize, usize)>),
    Plus1(IFormula),
    Plus2(IFormula),
    Exch(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedProof {
    pub rule: IRule,
    pub kids: Vec<IndexedProof>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at {}: {msg}", fmt_path(path))]
pub struct IndexedCheckError {
    pub path: Vec<usize>,
    pub msg: String,
}

fn same_domain(ctx: &[IFormula], j: &IndexSet) -> Result<(), String> {
    for a in ctx {
        let d = a.well_formed()?;
        if &d != j {
            return Err(format!("context formula {a} has domain {} instead of {}", fmt_set(&d), fmt_set(j)));
        }
    }
    Ok(())
}

fn indexed_rule_conclusion(rule: &IRule, kids: &[&IndexedSequent]) -> Result<IndexedSequent, String> {
    let last = |s: &IndexedSequent| -> Result<(Vec<IFormula>, IFormula), String> {
        let mut c = s.context.clone();
        let l = c.pop().ok_or("premise has an empty context")?;
        Ok((c, l))
    };
    let need_same_j = || -> Result<IndexSet, String> {
        if kids[0].j != kids[1].j {
            return Err(format!("premise domains differ: {} and {}", fmt_set(&kids[0].j), fmt_set(&kids[1].j)));
        }
        Ok(kids[0].j.clone())
    };
    let out = match rule {
        IRule::Ax(a) => {
            let j = a.well_formed()?;
            IndexedSequent { j, cuts: vec![], context: vec![a.clone(), a.dual()] }
        }
        IRule::OneI(j) => IndexedSequent { j: j.clone(), cuts: vec![], context: vec![IF::One(j.clone())] },
        IRule::TopI(g) => {
            same_domain(g, &IndexSet::new())?;
            let mut context = g.clone();
            context.push(IF::Top);
            IndexedSequent { j: IndexSet::new(), cuts: vec![], context }
        }
        IRule::BotI(j) => {
            if &kids[0].j != j {
                return Err(format!("bot{} over a premise of domain {}", fmt_set(j), fmt_set(&kids[0].j)));
            }
            let mut s = kids[0].clone();
            s.context.push(IF::Bot(j.clone()));
            s
        }
        IRule::Par => {
            let (mut g, b) = last(kids[0])?;
            let a = g.pop().ok_or("par needs two formulas")?;
            g.push(IF::Par(Box::new(a), Box::new(b)));
            IndexedSequent { j: kids[0].j.clone(), cuts: kids[0].cuts.clone(), context: g }
        }
        IRule::Tensor | IRule::Cut => {
            let j = need_same_j()?;
            let (mut g1, a) = last(kids[0])?;
            let (g2, b) = last(kids[1])?;
            g1.extend(g2);
            let mut cuts = kids[0].cuts.clone();
            cuts.extend(kids[1].cuts.iter().cloned());
            if *rule == IRule::Tensor {
                g1.push(IF::Tensor(Box::new(a), Box::new(b)));
            } else {
                // Both cut formulas live on the whole domain; their additive
                // splits may differ (a mismatched pair), so only the plain
                // formulas have to be dual.
                if dual(&a.erase()) != b.erase() {
                    return Err(format!("cut formulas not dual: {a} and {b}"));
                }
                if a.well_formed()? != j || b.well_formed()? != j {
                    return Err(format!("cut formulas must have the domain {}", fmt_set(&j)));
                }
                cuts.push((a, b));
            }
            IndexedSequent { j, cuts, context: g1 }
        }
        IRule::With(sigma) => {
            let (j1, j2) = (&kids[0].j, &kids[1].j);
            if !j1.is_disjoint(j2) {
                return Err(format!("with premises overlap: {} and {}", fmt_set(j1), fmt_set(j2)));
            }
            let (g1, a) = last(kids[0])?;
            let (g2, b) = last(kids[1])?;
            if g1.len() != g2.len() {
                return Err("with premises have different context lengths".into());
            }
            let mut context = Vec::new();
            for (x, y) in g1.iter().zip(&g2) {
                if x.erase() != y.erase() {
                    return Err(format!("with contexts differ: {x} and {y}"));
                }
                context.push(merge_formula(x, y).ok_or_else(|| format!("cannot superpose {x} and {y}"))?);
            }
            let (d1, d2) = (&kids[0].cuts, &kids[1].cuts);
            let mut used1 = vec![false; d1.len()];
            let mut used2 = vec![false; d2.len()];
            let mut merged = Vec::new();
            for &(i, k) in sigma {
                if i >= d1.len() || k >= d2.len() || used1[i] || used2[k] {
                    return Err(format!("bad superposition ({i} {k})"));
                }
                used1[i] = true;
                used2[k] = true;
                let ((a1, b1), (a2, b2)) = (&d1[i], &d2[k]);
                if a1.erase() != a2.erase() {
                    return Err(format!("superposition ({i} {k}) pairs different cut formulas"));
                }
                let m = |x, y| merge_formula(x, y).ok_or_else(|| format!("cannot superpose stack entry ({i} {k})"));
                merged.push((m(a1, a2)?, m(b1, b2)?));
            }
            let mut cuts: Vec<_> = d1.iter().zip(&used1).filter(|(_, u)| !**u).map(|(c, _)| c.clone()).collect();
            cuts.extend(d2.iter().zip(&used2).filter(|(_, u)| !**u).map(|(c, _)| c.clone()));
            cuts.extend(merged);
            context.push(IF::With(Box::new(a), Box::new(b)));
            IndexedSequent { j: j1.union(j2).cloned().collect(), cuts, context }
        }
        IRule::Plus1(g) | IRule::Plus2(g) => {
            let dg = g.well_formed()?;
            if !dg.is_empty() {
                return Err(format!("the unused side of + must have the empty domain, not {}", fmt_set(&dg)));
            }
            let (mut ctx, a) = last(kids[0])?;
            let (a, g) = (Box::new(a), Box::new(g.clone()));
            ctx.push(if matches!(rule, IRule::Plus1(_)) { IF::Plus(a, g) } else { IF::Plus(g, a) });
            IndexedSequent { j: kids[0].j.clone(), cuts: kids[0].cuts.clone(), context: ctx }
        }
        IRule::Exch(i, k) => {
            let mut s = kids[0].clone();
            if *i >= s.context.len() || *k >= s.context.len() || i == k {
                return Err(format!("exchange ({i} {k}) out of range"));
            }
            s.context.swap(*i, *k);
            s
        }
    };
    same_domain(&out.context, &out.j)?;
    for (a, b) in &out.cuts {
        for c in [a, b] {
            let d = c.well_formed()?;
            if !d.is_subset(&out.j) {
                return Err(format!("stack formula {c} escapes the domain {}", fmt_set(&out.j)));
            }
        }
    }
    Ok(out)
}

pub fn check_indexed_proof(rho: &IndexedProof) -> Result<IndexedSequent, IndexedCheckError> {
    fn go(r: &IndexedProof, path: &mut Vec<usize>) -> Result<IndexedSequent, IndexedCheckError> {
        let expected = erase_rule(&r.rule).arity();
        if r.kids.len() != expected {
            return Err(IndexedCheckError { path: path.clone(), msg: format!("expected {expected} premise(s)") });
        }
        let mut kids = Vec::new();
        for (i, k) in r.kids.iter().enumerate() {
            path.push(i);
            kids.push(go(k, path)?);
            path.pop();
        }
        let refs: Vec<&IndexedSequent> = kids.iter().collect();
        indexed_rule_conclusion(&r.rule, &refs).map_err(|msg| IndexedCheckError { path: path.clone(), msg })
    }
    go(rho, &mut Vec::new())
}

fn erase_rule(r: &IRule) -> Rule {
    match r {
        IRule::Ax(a) => Rule::Ax(a.erase()),
        IRule::OneI(_) => Rule::OneI,
        IRule::TopI(g) => Rule::TopI(g.iter().map(IFormula::erase).collect()),
        IRule::BotI(_) => Rule::BotI,
        IRule::Tensor => Rule::Tensor,
        IRule::Par => Rule::Par,
        IRule::Cut => Rule::Cut,
        IRule::With(s) => Rule::With(s.clone()),
        IRule::Plus1(g) => Rule::Plus1(g.erase()),
        IRule::Plus2(g) => Rule::Plus2(g.erase()),
        IRule::Exch(i, j) => Rule::Exch(*i, *j),
    }
}

/// The plain proof underneath (the restriction to the empty domain, up to
/// the isomorphism forgetting empty domains).
pub fn erase_proof(rho: &IndexedProof) -> ProofTerm {
    ProofTerm::from_parts(erase_rule(&rho.rule), rho.kids.iter().map(erase_proof).collect())
}

pub fn restrict_proof(rho: &IndexedProof, k: &IndexSet) -> IndexedProof {
    let meet = |j: &IndexSet| j.intersection(k).cloned().collect();
    let rule = match &rho.rule {
        IRule::Ax(a) => IRule::Ax(restrict_formula(a, k)),
        IRule::OneI(j) => IRule::OneI(meet(j)),
        IRule::TopI(g) => IRule::TopI(g.iter().map(|a| restrict_formula(a, k)).collect()),
        IRule::BotI(j) => IRule::BotI(meet(j)),
        IRule::Plus1(g) => IRule::Plus1(restrict_formula(g, k)),
        IRule::Plus2(g) => IRule::Plus2(restrict_formula(g, k)),
        r => r.clone(),
    };
    IndexedProof { rule, kids: rho.kids.iter().map(|c| restrict_proof(c, k)).collect() }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FlError {
    #[error("index {index}: {source}")]
    NotMember { index: String, source: MembershipError },
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Membership(#[from] MembershipError),
}

/// Direction (i) to (ii): a member family yields an indexed proof of the
/// translated sequent whose erasure is `p`.
pub fn fl_forward(p: &ProofTerm, nu: &IndexedFamily) -> Result<IndexedProof, FlError> {
    for (j, x) in &nu.values {
        match is_member(p, x) {
            Ok(true) => {}
            Ok(false) => {
                return Err(FlError::NotMember {
                    index: j.clone(),
                    source: MembershipError::NotMember(format!("{x} is not in |p|")),
                })
            }
            Err(e) => return Err(FlError::Membership(MembershipError::Check(e))),
        }
    }
    let names: Vec<String> = nu.values.keys().cloned().collect();
    let xs: Vec<PointVec> = nu.values.values().cloned().collect();
    let d = Decorated::decorate(p, &xs)?;
    build_indexed(&d, &names)
}

fn build_indexed(d: &Decorated, names: &[String]) -> Result<IndexedProof, FlError> {
    let here: IndexSet = names.iter().zip(&d.pts).filter(|(_, x)| x.is_some()).map(|(j, _)| j.clone()).collect();
    let empty = BTreeMap::new();
    let rule = match &d.rule {
        Rule::Ax(f) => {
            let fam = names
                .iter()
                .zip(&d.pts)
                .filter_map(|(j, x)| x.as_ref().map(|x| (j.clone(), x.ctx[0].clone())))
                .collect();
            IRule::Ax(translate_formula_family(f, &fam)?)
        }
        Rule::OneI => IRule::OneI(here),
        Rule::TopI(g) => IRule::TopI(g.iter().map(|a| translate_formula_family(a, &empty)).collect::<Result<_, _>>()?),
        Rule::BotI => IRule::BotI(here),
        Rule::Tensor => IRule::Tensor,
        Rule::Par => IRule::Par,
        Rule::Cut => IRule::Cut,
        Rule::With(s) => IRule::With(s.clone()),
        Rule::Plus1(g) => IRule::Plus1(translate_formula_family(g, &empty)?),
        Rule::Plus2(g) => IRule::Plus2(translate_formula_family(g, &empty)?),
        Rule::Exch(i, j) => IRule::Exch(*i, *j),
    };
    let kids = d.kids.iter().map(|k| build_indexed(k, names)).collect::<Result<_, _>>()?;
    Ok(IndexedProof { rule, kids })
}

/// Direction (ii) to (i): reads the family back off an indexed proof.
pub fn fl_backward(rho: &IndexedProof) -> Result<(IndexedFamily, ProofTerm), IndexedCheckError> {
    let concl = check_indexed_proof(rho)?;
    let names: Vec<String> = concl.j.iter().cloned().collect();
    let d = rebuild(rho, &names).map_err(|msg| IndexedCheckError { path: vec![], msg })?;
    let mut values = BTreeMap::new();
    for (j, x) in names.iter().zip(d.pts) {
        let x = x.ok_or_else(|| IndexedCheckError { path: vec![], msg: format!("index {j} has no point") })?;
        values.insert(j.clone(), x);
    }
    Ok((IndexedFamily::new(values), erase_proof(rho)))
}

fn rebuild(rho: &IndexedProof, names: &[String]) -> Result<Decorated, String> {
    let rule = erase_rule(&rho.rule);
    match &rho.rule {
        IRule::Ax(a) => {
            let pts = names
                .iter()
                .map(|j| a.point_at(j).map(|x| PointVec { cuts: vec![], ctx: vec![x.clone(), x] }))
                .collect();
            Decorated::leaf(rule, pts)
        }
        IRule::OneI(d) => {
            let pts = names
                .iter()
                .map(|j| d.contains(j).then(|| PointVec { cuts: vec![], ctx: vec![Point::Star] }))
                .collect();
            Decorated::leaf(rule, pts)
        }
        IRule::TopI(_) => Decorated::leaf(rule, vec![None; names.len()]),
        _ => {
            let kids = rho.kids.iter().map(|k| rebuild(k, names)).collect::<Result<_, _>>()?;
            Decorated::mk(rule, kids)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mall_syntax::{check_proof, parse_formula, parse_proof};
    use crate::rel_model::interp_with_cuts;

    fn s(xs: &[&str]) -> IndexSet {
        index_set(xs.iter().copied())
    }

    fn pi1() -> ProofTerm {
        parse_proof("(cut (with (ax bot) (ax bot) ()) (plus1 (ax 1) bot))").unwrap()
    }

    fn prologue_family() -> IndexedFamily {
        // nu_1 (matched) first, nu_2 (mismatched) second
        let r: Vec<_> = interp_with_cuts(&pi1()).unwrap().into_iter().collect();
        IndexedFamily::numbered(r)
    }

    #[test]
    fn restriction_clauses() {
        let b = IF::Bot(s(&["1", "2"]));
        assert_eq!(restrict_formula(&b, &s(&["2", "3"])), IF::Bot(s(&["2"])));
        assert_eq!(restrict_formula(&IF::Zero, &s(&["1"])), IF::Zero);
        let t = IF::Tensor(Box::new(IF::One(s(&["1"]))), Box::new(IF::Bot(s(&["1"]))));
        assert_eq!(restrict_formula(&t, &s(&[])), IF::Tensor(Box::new(IF::One(s(&[]))), Box::new(IF::Bot(s(&[])))));
    }

    #[test]
    fn translation_examples() {
        let w = parse_formula("(1 & 1)").unwrap();
        let fam =
            BTreeMap::from([("1".to_string(), Point::in1(Point::Star)), ("2".to_string(), Point::in2(Point::Star))]);
        let t = translate_formula_family(&w, &fam).unwrap();
        assert_eq!(t.to_string(), "1{1} & 1{2}");
        let p = parse_formula("(bot + bot)").unwrap();
        let fam =
            BTreeMap::from([("1".to_string(), Point::in1(Point::Star)), ("2".to_string(), Point::in1(Point::Star))]);
        assert_eq!(translate_formula_family(&p, &fam).unwrap().to_string(), "bot{1,2} + bot{}");
        let top = BTreeMap::from([("1".to_string(), Point::Star)]);
        assert!(matches!(translate_formula_family(&Formula::Top, &top), Err(TranslateError::Undefined(_))));
    }

    #[test]
    fn prologue_indexed_conclusion() {
        let rho = fl_forward(&pi1(), &prologue_family()).unwrap();
        let concl = check_indexed_proof(&rho).unwrap();
        assert_eq!(concl.to_string(), "|-{1,2} [ (1{1} & 1{2}, bot{1,2} + bot{}) ] bot{1,2}, 1{1,2}");
        let (nu, p) = fl_backward(&rho).unwrap();
        assert_eq!(nu, prologue_family());
        assert_eq!(p, pi1());
        let r1 = restrict_proof(&rho, &s(&["1"]));
        assert_eq!(
            check_indexed_proof(&r1).unwrap().to_string(),
            "|-{1} [ (1{1} & 1{}, bot{1} + bot{}) ] bot{1}, 1{1}"
        );
        assert_eq!(erase_proof(&restrict_proof(&rho, &s(&[]))), pi1());
    }

    #[test]
    fn empty_family_gives_empty_domains() {
        let rho = fl_forward(&pi1(), &IndexedFamily::new(BTreeMap::new())).unwrap();
        let c = check_indexed_proof(&rho).unwrap();
        assert!(c.j.is_empty());
        assert_eq!(erase_proof(&rho), pi1());
    }

    #[test]
    fn with_rule_rejects_overlap() {
        let one = |j: &[&str]| IndexedProof { rule: IRule::OneI(s(j)), kids: vec![] };
        let rho = IndexedProof { rule: IRule::With(vec![]), kids: vec![one(&["1"]), one(&["1", "2"])] };
        assert!(check_indexed_proof(&rho).is_err());
        let ok = IndexedProof { rule: IRule::With(vec![]), kids: vec![one(&["1"]), one(&["2"])] };
        assert_eq!(check_indexed_proof(&ok).unwrap().to_string(), "|-{1,2} [] 1{1} & 1{2}");
    }

    #[test]
    fn non_member_family_reports_index() {
        let p = parse_proof("(ax (1 & 1))").unwrap();
        let bad = PointVec { cuts: vec![], ctx: vec![Point::in1(Point::Star), Point::in2(Point::Star)] };
        let e = fl_forward(&p, &IndexedFamily::numbered([bad])).unwrap_err();
        assert!(matches!(e, FlError::NotMember { ref index, .. } if index == "1"));
        assert!(check_proof(&p).is_ok());
    }

    #[test]
    fn family_json_round_trip() {
        let f = prologue_family();
        let text = f.to_json();
        assert!(text.contains("\"J\""));
        assert_eq!(IndexedFamily::from_json(&text).unwrap(), f);
    }
}
