//! The traced category of partial injections with zero, on bounded objects.
//!
//! An object is `S^n`: `n` wires each carrying the two tokens `l` and `r`
//! (the leaves of `U_(*,*)`). Morphisms are partial injections on tokens,
//! tensor is juxtaposition of wires, and the trace feeds the last wires back
//! until the token leaves or is lost. Random generator graphs are layered
//! from symmetries, zeros, and the depth-one restrictions of the
//! (co)retraction composites `k; s; j` (swap the two halves of a wire) and
//! `(k x k); (1 x s x 1); (j x j)` (exchange halves between adjacent wires).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::par::Exec;

/// A partial injection from the tokens of `S^n_in` to those of `S^n_out`;
/// token `2w + b` is letter `b` on wire `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PInj {
    pub wires_in: usize,
    pub wires_out: usize,
    map: Vec<Option<usize>>,
}

impl PInj {
    pub fn from_fn(wires_in: usize, wires_out: usize, f: impl Fn(usize) -> Option<usize>) -> PInj {
        let map: Vec<Option<usize>> = (0..2 * wires_in).map(f).collect();
        let p = PInj { wires_in, wires_out, map };
        debug_assert!(p.is_injective());
        p
    }

    pub fn id(n: usize) -> PInj {
        PInj::from_fn(n, n, Some)
    }

    pub fn zero(n: usize, m: usize) -> PInj {
        PInj::from_fn(n, m, |_| None)
    }

    /// `s_{S^a, S^b}`.
    pub fn sym(a: usize, b: usize) -> PInj {
        PInj::from_fn(a + b, a + b, |t| Some(if t < 2 * a { t + 2 * b } else { t - 2 * a }))
    }

    pub fn apply(&self, t: usize) -> Option<usize> {
        self.map[t]
    }

    pub fn is_zero(&self) -> bool {
        self.map.iter().all(Option::is_none)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.map.iter().flatten().all(|v| *v < 2 * self.wires_out && seen.insert(*v))
    }

    /// `g o self`.
    pub fn then(&self, g: &PInj) -> PInj {
        assert_eq!(self.wires_out, g.wires_in, "composition of mismatched objects");
        PInj::from_fn(self.wires_in, g.wires_out, |t| self.apply(t).and_then(|u| g.apply(u)))
    }

    pub fn tensor(&self, g: &PInj) -> PInj {
        let (a, c) = (2 * self.wires_in, 2 * self.wires_out);
        PInj::from_fn(self.wires_in + g.wires_in, self.wires_out + g.wires_out, |t| {
            if t < a {
                self.apply(t)
            } else {
                g.apply(t - a).map(|u| u + c)
            }
        })
    }

    /// `Tr^{S^u}` of `self : X (x) S^u -> Y (x) S^u` by feedback iteration.
    pub fn trace(&self, u: usize) -> PInj {
        assert!(u <= self.wires_in && u <= self.wires_out);
        let (x, y) = (self.wires_in - u, self.wires_out - u);
        PInj::from_fn(x, y, |t| {
            let mut cur = self.apply(t)?;
            // each feedback wire token can be visited at most once
            for _ in 0..=2 * u {
                if cur < 2 * y {
                    return Some(cur);
                }
                cur = self.apply(cur - 2 * y + 2 * x)?;
            }
            None
        })
    }
}

impl fmt::Display for PInj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tok = |t: usize| format!("({},{})", t / 2, if t.is_multiple_of(2) { 'l' } else { 'r' });
        if self.is_zero() {
            return write!(f, "ZERO");
        }
        let lines: Vec<String> =
            self.map.iter().enumerate().filter_map(|(t, v)| v.map(|v| format!("{} -> {}", tok(t), tok(v)))).collect();
        write!(f, "{}", lines.join("; "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    /// Swap wires `i` and `i + 1`.
    Sym(usize),
    Zero(usize),
    /// `k; s; j` on wire `i`: swaps its `l` and `r` halves.
    HalfSwap(usize),
    /// Exchanges the `r` half of wire `i` with the `l` half of wire `i + 1`.
    HalfExchange(usize),
    Id,
}

impl Gen {
    pub fn eval(self, n: usize) -> PInj {
        match self {
            Gen::Id => PInj::id(n),
            Gen::Sym(i) => PInj::from_fn(n, n, |t| {
                Some(match t / 2 {
                    w if w == i => t + 2,
                    w if w == i + 1 => t - 2,
                    _ => t,
                })
            }),
            Gen::Zero(i) => PInj::from_fn(n, n, |t| (t / 2 != i).then_some(t)),
            Gen::HalfSwap(i) => PInj::from_fn(n, n, |t| Some(if t / 2 == i { t ^ 1 } else { t })),
            Gen::HalfExchange(i) => PInj::from_fn(n, n, |t| {
                Some(if t == 2 * i + 1 {
                    2 * i + 2
                } else if t == 2 * i + 2 {
                    2 * i + 1
                } else {
                    t
                })
            }),
        }
    }
}

/// A layered generator graph on `wires` wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub wires: usize,
    pub layers: Vec<Gen>,
}

impl Graph {
    pub fn eval(&self) -> PInj {
        self.layers.iter().fold(PInj::id(self.wires), |acc, g| acc.then(&g.eval(self.wires)))
    }

    pub fn random(wires: usize, layers: usize, rng: &mut impl Rng) -> Graph {
        let layers = (0..layers)
            .map(|_| {
                let w = if wires == 0 { 0 } else { rng.random_range(0..wires) };
                let two = wires >= 2 && w + 1 < wires;
                match rng.random_range(0..10) {
                    0..=2 if two => Gen::Sym(w),
                    3..=4 if two => Gen::HalfExchange(w),
                    5..=6 if wires > 0 => Gen::HalfSwap(w),
                    7 if wires > 0 => Gen::Zero(w),
                    _ => Gen::Id,
                }
            })
            .collect();
        Graph { wires, layers }
    }
}

fn rand_map(wires: usize, rng: &mut impl Rng) -> PInj {
    let layers = rng.random_range(0..=6);
    Graph::random(wires, layers, rng).eval()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    NaturalityX,
    NaturalityY,
    Dinaturality,
    VanishingI,
    VanishingII,
    Superposing,
    Yanking,
    GeneralizedYanking,
    TracingZero,
    VanishingWithZero,
}

impl Law {
    /// The seven defining axioms of a trace.
    pub const AXIOMS: [Law; 7] = [
        Law::NaturalityX,
        Law::NaturalityY,
        Law::Dinaturality,
        Law::VanishingI,
        Law::VanishingII,
        Law::Superposing,
        Law::Yanking,
    ];
    /// Identities derived from them that the execution formula relies on.
    pub const DERIVED: [Law; 3] = [Law::GeneralizedYanking, Law::TracingZero, Law::VanishingWithZero];

    pub fn name(self) -> &'static str {
        match self {
            Law::NaturalityX => "naturality in X",
            Law::NaturalityY => "naturality in Y",
            Law::Dinaturality => "dinaturality",
            Law::VanishingI => "vanishing I",
            Law::VanishingII => "vanishing II",
            Law::Superposing => "superposing",
            Law::Yanking => "yanking",
            Law::GeneralizedYanking => "generalized yanking",
            Law::TracingZero => "tracing zero",
            Law::VanishingWithZero => "vanishing with zero",
        }
    }

    /// Checks one random instance; returns both sides on failure.
    pub fn check(self, rng: &mut impl Rng) -> Result<(), (PInj, PInj)> {
        let x = rng.random_range(0..=2);
        let u = rng.random_range(1..=2);
        let (lhs, rhs) = match self {
            Law::NaturalityX => {
                let f = rand_map(x + u, rng);
                let g = rand_map(x, rng);
                (g.tensor(&PInj::id(u)).then(&f).trace(u), g.then(&f.trace(u)))
            }
            Law::NaturalityY => {
                let f = rand_map(x + u, rng);
                let g = rand_map(x, rng);
                (f.then(&g.tensor(&PInj::id(u))).trace(u), f.trace(u).then(&g))
            }
            Law::Dinaturality => {
                let f = rand_map(x + u, rng);
                let g = rand_map(u, rng);
                let idg = PInj::id(x).tensor(&g);
                (idg.then(&f).trace(u), f.then(&idg).trace(u))
            }
            Law::VanishingI => {
                let f = rand_map(x, rng);
                (f.trace(0), f)
            }
            Law::VanishingII => {
                let v = rng.random_range(1..=2);
                let f = rand_map(x + u + v, rng);
                (f.trace(u + v), f.trace(v).trace(u))
            }
            Law::Superposing => {
                let w = rng.random_range(0..=2);
                let g = rand_map(w, rng);
                let f = rand_map(x + u, rng);
                (g.tensor(&f).trace(u), g.tensor(&f.trace(u)))
            }
            Law::Yanking => (PInj::sym(u, u).trace(u), PInj::id(u)),
            Law::GeneralizedYanking => {
                let f = rand_map(u, rng);
                let g = rand_map(u, rng);
                (f.tensor(&g).then(&PInj::sym(u, u)).trace(u), f.then(&g))
            }
            Law::TracingZero => {
                let n = rng.random_range(1..=4);
                let t = rng.random_range(0..=n);
                (PInj::zero(n, n).trace(t), PInj::zero(n - t, n - t))
            }
            Law::VanishingWithZero => {
                let f = rand_map(x + u, rng);
                let direct = PInj::from_fn(x, x, |t| f.apply(t).filter(|&v| v < 2 * x));
                (f.then(&PInj::id(x).tensor(&PInj::zero(u, u))).trace(u), direct)
            }
        };
        if lhs == rhs {
            Ok(())
        } else {
            Err((lhs, rhs))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawResult {
    pub law: Law,
    pub samples: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

impl fmt::Display for LawResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.failures == 0 { "PASS" } else { "FAIL" };
        write!(f, "{:<20} {}/{} {verdict}", self.law.name(), self.samples - self.failures, self.samples)?;
        if let Some(w) = &self.witness {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}

/// Checks `law` on `samples` instances; sample `i` uses its own seeded
/// generator so results do not depend on scheduling.
pub fn check_law(law: Law, samples: usize, seed: u64, exec: Exec) -> LawResult {
    let idx: Vec<u64> = (0..samples as u64).collect();
    let outcomes = exec.map(&idx, |&i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i.wrapping_mul(0x9E37_79B9_7F4A_7C15)) ^ law as u64);
        law.check(&mut rng).err()
    });
    let failures = outcomes.iter().filter(|o| o.is_some()).count();
    let witness = outcomes.into_iter().flatten().next().map(|(l, r)| format!("lhs {l} | rhs {r}"));
    LawResult { law, samples, failures, witness }
}

pub fn check_all(laws: &[Law], samples: usize, seed: u64, exec: Exec) -> Vec<LawResult> {
    laws.iter().map(|&l| check_law(l, samples, seed, exec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_is_involutive() {
        let s = PInj::sym(1, 2);
        assert_eq!(s.then(&PInj::sym(2, 1)), PInj::id(3));
    }

    #[test]
    fn trace_of_sym_is_identity() {
        assert_eq!(PInj::sym(1, 1).trace(1), PInj::id(1));
    }

    #[test]
    fn broken_trace_is_caught() {
        // tracing while ignoring feedback would break yanking
        let s = PInj::sym(1, 1);
        let naive = PInj::from_fn(1, 1, |t| s.apply(t).filter(|&v| v < 2));
        assert_ne!(naive, PInj::id(1));
    }

    #[test]
    fn every_law_holds_on_a_few_samples() {
        for law in Law::AXIOMS.iter().chain(&Law::DERIVED) {
            let r = check_law(*law, 50, 1, Exec::Sequential);
            assert_eq!(r.failures, 0, "{r}");
        }
    }
}
