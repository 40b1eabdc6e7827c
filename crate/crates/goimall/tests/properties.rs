//! Property tests over random formulas, proofs and generator graphs.

use goimall::corpus::{enumerate, seeded};
use goimall::cut_rewrite::{find_redexes, reduce_step};
use goimall::goi_engine::{denotation_morphism, execute_point, leaf_addrs, Addr, MorphismValue};
use goimall::mall_syntax::{check_proof, dual, eta_expand, parse_formula, parse_proof, Formula, ProofTerm};
use goimall::par::Exec;
use goimall::rel_model::{interp_denotational, interp_formula, interp_with_cuts, PointVec};
use goimall::traced::{check_law, Graph, Law, PInj};
use proptest::prelude::*;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![Just(Formula::One), Just(Formula::Bot), Just(Formula::Zero), Just(Formula::Top)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (0..4u8, inner.clone(), inner).prop_map(|(k, a, b)| match k {
            0 => Formula::tensor(a, b),
            1 => Formula::par(a, b),
            2 => Formula::plus(a, b),
            _ => Formula::with(a, b),
        })
    })
}

fn formulas_up_to(size: usize) -> Vec<Formula> {
    let mut by: Vec<Vec<Formula>> = vec![Vec::new(); size + 1];
    by[1] = vec![Formula::One, Formula::Bot, Formula::Zero, Formula::Top];
    for n in 2..=size {
        for a in 1..n - 1 {
            let b = n - 1 - a;
            let mut level = Vec::new();
            for x in &by[a] {
                for y in &by[b] {
                    level.push(Formula::tensor(x.clone(), y.clone()));
                    level.push(Formula::par(x.clone(), y.clone()));
                    level.push(Formula::plus(x.clone(), y.clone()));
                    level.push(Formula::with(x.clone(), y.clone()));
                }
            }
            by[n].extend(level);
        }
    }
    by.into_iter().flatten().collect()
}

fn diag(x: &goimall::rel_model::Point) -> PointVec {
    PointVec { cuts: vec![], ctx: vec![x.clone(), x.clone()] }
}

#[test]
fn generalized_axioms_agree_with_eta_expansion() {
    let fs = formulas_up_to(5);
    assert!(fs.len() > 2000);
    let bad: Vec<String> = Exec::Parallel
        .map(&fs, |a| {
            let eta = eta_expand(a);
            let seq = check_proof(&eta).map_err(|e| format!("{a}: {e}")).ok()?;
            if seq.context != vec![a.clone(), dual(a)] {
                return Some(format!("{a}: eta concludes {seq}"));
            }
            for x in interp_formula(a) {
                let lhs = execute_point(&ProofTerm::Ax(a.clone()), &diag(&x)).ok()?;
                let rhs = execute_point(&eta, &diag(&x)).ok()?;
                if lhs != rhs {
                    return Some(format!("{a} at {x}: {lhs} vs {rhs}"));
                }
            }
            None
        })
        .into_iter()
        .flatten()
        .collect();
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(5)]);
}

/// A cut-free execution is a bijection from each token domain onto another
/// port's, never ZERO.
fn is_port_bijection(v: &MorphismValue, x: &PointVec) -> bool {
    let MorphismValue::Table { map, .. } = v else { return false };
    let total: usize = x.ctx.iter().map(|p| leaf_addrs(p).len()).sum();
    let images: std::collections::BTreeSet<_> = map.values().collect();
    map.len() == total && images.len() == total
}

#[test]
fn cut_free_execution_is_a_bijection() {
    let corpus: Vec<_> = enumerate(5, Exec::Parallel).into_iter().filter(|e| e.proof.is_cut_free()).collect();
    let bad: Vec<String> = Exec::Parallel
        .map(&corpus, |e| {
            for x in interp_with_cuts(&e.proof).ok()? {
                match denotation_morphism(&e.proof, &x) {
                    Ok(v) if is_port_bijection(&v, &x) => {}
                    other => return Some(format!("{} at {x}: {other:?}", e.proof)),
                }
            }
            None
        })
        .into_iter()
        .flatten()
        .collect();
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(5)]);
}

proptest! {
    #[test]
    fn dual_is_involutive(a in formula()) {
        prop_assert_eq!(dual(&dual(&a)), a);
    }

    #[test]
    fn formula_text_round_trips(a in formula()) {
        prop_assert_eq!(parse_formula(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn eta_points_are_diagonal(a in formula()) {
        let rel = interp_with_cuts(&eta_expand(&a)).unwrap();
        let want: std::collections::BTreeSet<PointVec> = interp_formula(&a).iter().map(diag).collect();
        prop_assert_eq!(rel, want);
    }

    #[test]
    fn addr_push_pop(bits in proptest::collection::vec(any::<bool>(), 0..20)) {
        let mut a = Addr::EMPTY;
        for &b in bits.iter().rev() {
            a = a.push(b).unwrap();
        }
        prop_assert_eq!(a.letters().collect::<Vec<_>>(), bits.clone());
        prop_assert_eq!(Addr::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn random_graphs_are_injective(seed in any::<u64>(), wires in 0usize..5, layers in 0usize..12) {
        let g = Graph::random(wires, layers, &mut seeded(seed));
        prop_assert!(g.eval().is_injective());
    }

    #[test]
    fn trace_laws_hold(seed in any::<u64>(), k in 0usize..10) {
        let law = Law::AXIOMS.iter().chain(&Law::DERIVED).nth(k).copied().unwrap();
        let r = check_law(law, 20, seed, Exec::Sequential);
        prop_assert_eq!(r.failures, 0, "{}", r);
    }

    #[test]
    fn tensor_with_identity_is_neutral(seed in any::<u64>(), wires in 0usize..4) {
        let f = Graph::random(wires, 5, &mut seeded(seed)).eval();
        prop_assert_eq!(f.tensor(&PInj::id(0)), f);
    }

    #[test]
    fn steps_preserve_denotation(idx in 0usize..4000) {
        let p = sample_cut_proof(idx);
        let before = interp_denotational(&p).unwrap();
        for r in find_redexes(&p).unwrap() {
            let q = reduce_step(&p, &r).unwrap();
            prop_assert_eq!(&interp_denotational(&q).unwrap(), &before, "{} by {}", p, r);
        }
    }

    #[test]
    fn proof_text_round_trips(idx in 0usize..4000) {
        let p = sample_cut_proof(idx);
        prop_assert_eq!(parse_proof(&p.to_string()).unwrap(), p);
    }
}

fn sample_cut_proof(idx: usize) -> ProofTerm {
    use std::sync::OnceLock;
    static CUTS: OnceLock<Vec<ProofTerm>> = OnceLock::new();
    let v = CUTS.get_or_init(|| {
        enumerate(6, Exec::Parallel).into_iter().filter(|e| !e.proof.is_cut_free()).map(|e| e.proof).collect()
    });
    v[idx % v.len()].clone()
}
