//! Pair selections and witnesses of non-effective equivalence relations.
//!
//! A pair selection assigns to each `(a, b) ∈ W × W` a set `A_(a,b)` of admissible pairs.
//! Equivalently, it is a partial equivalence on `W × W`, relating `(a, a′)` and `(b, b′)` when
//! `(a′, b′) ∈ A_(a,b)`, that is total on the pairs `(a, a′)` with `a′ ∈ a*`.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::frame_core::{add_final, add_root, cluster, fork, Frame, World, WorldSet};
use crate::limits::{coequalizer, ParallelPair};
use crate::pmorph::PMorphism;
use crate::product::{mediate, product_levels, Cone, ProductBudget, ProductLevel};

/// An explicit table of admissible pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSelection {
    base: Frame,
    /// Row `a * n + b` holds the pairs `a′ * n + b′` admissible for `(a, b)`.
    table: Vec<FixedBitSet>,
}

/// A failed axiom, with the pairs involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `a′ ∈ a*` but `(a′, a′) ∉ A_(a,a)`.
    Reflexivity { a: World, a1: World },
    /// `(a′, b′) ∈ A_(a,b)` but `(b′, a′) ∉ A_(b,a)`.
    Symmetry { pair: (World, World), admissible: (World, World) },
    /// `(a′, b′) ∈ A_(a,b)`, `(b′, c′) ∈ A_(b,c)` but `(a′, c′) ∉ A_(a,c)`.
    Transitivity { a: World, b: World, c: World, a1: World, b1: World, c1: World },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Reflexivity { a, a1 } => write!(f, "({a1},{a1}) missing from A({a},{a})"),
            Violation::Symmetry { pair: (a, b), admissible: (x, y) } => {
                write!(f, "({x},{y}) in A({a},{b}) but ({y},{x}) missing from A({b},{a})")
            }
            Violation::Transitivity { a, b, c, a1, b1, c1 } => write!(
                f,
                "({a1},{b1}) in A({a},{b}) and ({b1},{c1}) in A({b},{c}) but ({a1},{c1}) missing from A({a},{c})"
            ),
        }
    }
}

impl PairSelection {
    /// Table from a predicate `admissible((a, b), (a′, b′))`; not validated.
    pub fn from_fn(base: Frame, admissible: impl Fn((World, World), (World, World)) -> bool) -> PairSelection {
        let n = base.size();
        let table = (0..n * n)
            .map(|row| {
                let mut bits = FixedBitSet::with_capacity(n * n);
                for col in 0..n * n {
                    if admissible((row / n, row % n), (col / n, col % n)) {
                        bits.insert(col);
                    }
                }
                bits
            })
            .collect();
        PairSelection { base, table }
    }

    /// Every pair admissible everywhere.
    pub fn full(base: Frame) -> PairSelection {
        PairSelection::from_fn(base, |_, _| true)
    }

    /// Only the diagonal, everywhere.
    pub fn diagonal(base: Frame) -> PairSelection {
        PairSelection::from_fn(base, |_, (x, y)| x == y)
    }

    /// `A_(a,b) = R_c` when `a` and `b` lie in the same block `c`, and empty otherwise.
    ///
    /// Valid whenever every `R_c` is an equivalence relation on `W`.
    pub fn from_blocks(base: Frame, block: &[usize], relations: &[&dyn Fn(World, World) -> bool]) -> PairSelection {
        PairSelection::from_fn(base, |(a, b), (x, y)| block[a] == block[b] && relations[block[a]](x, y))
    }

    /// `A_(a,b)` is the union of the graphs of the permutations `g` with `g(a) = b`,
    /// over the group generated by `generators`.
    pub fn from_permutations(base: Frame, generators: &[Vec<World>]) -> PairSelection {
        let n = base.size();
        let mut group: Vec<Vec<World>> = vec![(0..n).collect()];
        let mut i = 0;
        while i < group.len() {
            for g in generators {
                let next: Vec<World> = group[i].iter().map(|&x| g[x]).collect();
                if !group.contains(&next) {
                    group.push(next);
                }
            }
            i += 1;
        }
        PairSelection::from_fn(base, |(a, b), (x, y)| group.iter().any(|g| g[a] == b && g[x] == y))
    }

    /// The partial equivalence on `W × W` generated by the cone pairs and `merges`.
    pub fn from_equivalence(base: Frame, merges: &[((World, World), (World, World))]) -> PairSelection {
        let n = base.size();
        let id = |(a, x): (World, World)| a * n + x;
        let mut parent: Vec<usize> = (0..n * n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut domain = FixedBitSet::with_capacity(n * n);
        for a in base.worlds() {
            for x in base.star_bits(a).ones() {
                domain.insert(id((a, x)));
            }
        }
        for &(p, q) in merges {
            domain.insert(id(p));
            domain.insert(id(q));
            let (rp, rq) = (find(&mut parent, id(p)), find(&mut parent, id(q)));
            parent[rp] = rq;
        }
        let roots: Vec<usize> = (0..n * n).map(|x| find(&mut parent, x)).collect();
        PairSelection::from_fn(base, |(a, b), (x, y)| {
            let (p, q) = (id((a, x)), id((b, y)));
            domain.contains(p) && domain.contains(q) && roots[p] == roots[q]
        })
    }

    pub fn base(&self) -> &Frame {
        &self.base
    }

    pub fn admits(&self, pair: (World, World), candidate: (World, World)) -> bool {
        let n = self.base.size();
        self.table[pair.0 * n + pair.1].contains(candidate.0 * n + candidate.1)
    }

    /// The first failed axiom, if any.
    pub fn violation(&self) -> Option<Violation> {
        let w = &self.base;
        let n = w.size();
        for a in w.worlds() {
            for a1 in w.star_bits(a).ones() {
                if !self.admits((a, a), (a1, a1)) {
                    return Some(Violation::Reflexivity { a, a1 });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for col in self.table[a * n + b].ones() {
                    let (x, y) = (col / n, col % n);
                    if !self.admits((b, a), (y, x)) {
                        return Some(Violation::Symmetry { pair: (a, b), admissible: (x, y) });
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for first in self.table[a * n + b].ones() {
                        let (a1, b1) = (first / n, first % n);
                        for c1 in 0..n {
                            if self.admits((b, c), (b1, c1)) && !self.admits((a, c), (a1, c1)) {
                                return Some(Violation::Transitivity { a, b, c, a1, b1, c1 });
                            }
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_valid(&self) -> bool {
        self.violation().is_none()
    }
}

/// `U_A`: the worlds `u` such that `π(y′) ∈ A_π(y)` for all `y ∈ u*` and `y′ ∈ y*`.
pub fn admissible_subframe(g0: &PMorphism, g1: &PMorphism, a: &PairSelection) -> Result<WorldSet> {
    if g0.dom() != g1.dom() || g0.cod() != g1.cod() {
        return Err(Error::Precondition("both maps must share domain and codomain".into()));
    }
    if g0.cod() != a.base() {
        return Err(Error::Precondition("the pair selection is for a different frame".into()));
    }
    let u = g0.dom();
    let pi = |w: World| (g0.apply(w), g1.apply(w));
    // A world is good when its own cone obeys the selection; U_A keeps worlds whose whole cone is good.
    let good: Vec<bool> = u.worlds().map(|y| u.star_bits(y).ones().all(|y1| a.admits(pi(y), pi(y1)))).collect();
    Ok(WorldSet::from_worlds(u.size(), u.worlds().filter(|&w| u.star_bits(w).ones().all(|y| good[y]))))
}

/// Outcome of the two conditions that make `g0, g1, A` witness non-exactness.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub u_a: WorldSet,
    /// Some world outside `U_A`, if there is one.
    pub outside: Option<World>,
    /// `f_A`: the coequalizer of the restrictions of `g0`, `g1` to `U_A`.
    pub f_a: PMorphism,
    /// Whether `f_A g0 = f_A g1`.
    pub coequalizer_merges: bool,
    pub verdict: bool,
}

pub fn non_effectiveness_witness(g0: &PMorphism, g1: &PMorphism, a: &PairSelection) -> Result<WitnessReport> {
    let u_a = admissible_subframe(g0, g1, a)?;
    let outside = g0.dom().worlds().find(|&w| !u_a.contains(w));
    let inc = PMorphism::inclusion(g0.dom_arc().clone(), &u_a)?;
    let (_, f_a) = coequalizer(&ParallelPair::new(inc.then(g0)?, inc.then(g1)?)?)?;
    let coequalizer_merges = g0.dom().worlds().all(|w| f_a.apply(g0.apply(w)) == f_a.apply(g1.apply(w)));
    Ok(WitnessReport { verdict: outside.is_some() && coequalizer_merges, u_a, outside, f_a, coequalizer_merges })
}

/// A selection-induced equivalence relation inside a truncated product `W × W`.
#[derive(Debug, Clone)]
pub struct SelectionRelation {
    pub levels: Vec<ProductLevel>,
    /// `X_A` as a set of worlds of the last level.
    pub set: WorldSet,
    /// The diagonal `W → X`, landing in `X_A`.
    pub r: PMorphism,
    /// The swap `X → X`, mapping `X_A` into itself.
    pub s: PMorphism,
}

/// `X_A` inside the product of `w` with itself truncated at `depth`, with `r` and `s` checked.
///
/// Only the reflexivity and symmetry maps are verified. The third condition quantifies over
/// all test frames and is not checked here.
pub fn equivalence_from_selection(w: &Frame, a: &PairSelection, depth: usize, budget: ProductBudget) -> Result<SelectionRelation> {
    if let Some(v) = a.violation() {
        return Err(Error::Precondition(format!("invalid pair selection: {v}")));
    }
    if depth < w.frame_depth()? {
        return Err(Error::Precondition(format!("depth {depth} is below the depth of the frame")));
    }
    let levels = product_levels(w, w, depth, budget)?;
    let top = levels.last().unwrap();
    let set = admissible_subframe(&top.p0, &top.p1, a)?;
    let id = PMorphism::identity(Arc::new(w.clone()));
    let r = mediate(&Cone::new(id.clone(), id)?, &levels)?;
    if let Some(x) = w.worlds().find(|&x| !set.contains(r.apply(x))) {
        return Err(Error::Precondition(format!("the diagonal point over {x} is not admissible")));
    }
    let s = mediate(&Cone::new(top.p1.clone(), top.p0.clone())?, &levels)?;
    if let Some(x) = set.iter().find(|&x| !set.contains(s.apply(x))) {
        return Err(Error::Precondition(format!("the swap moves {x} out of the relation")));
    }
    Ok(SelectionRelation { levels, set, r, s })
}

/// One of the five configurations that rule out exactness.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    /// The frame whose presence in a logic the fixture refutes.
    pub forbidden: Frame,
    pub g0: PMorphism,
    pub g1: PMorphism,
    pub selection: PairSelection,
    /// Size of the quotient `f_A` lands in.
    pub quotient_size: usize,
}

pub const FIXTURE_NAMES: [&str; 5] = ["chain4", "fork2", "cluster3", "cluster2-root", "cluster3-final"];

fn preorder(size: usize, edges: &[(World, World)]) -> Frame {
    let mut f = Frame::new(size, edges.iter().copied().chain((0..size).map(|w| (w, w)))).unwrap();
    // Close under transitivity.
    loop {
        let extra: Vec<(World, World)> =
            f.edges().flat_map(|(a, b)| f.successor_list(b).into_iter().map(move |c| (a, c))).filter(|&(a, c)| !f.related(a, c)).collect();
        if extra.is_empty() {
            return f;
        }
        f = Frame::new(size, f.edges().chain(extra)).unwrap();
    }
}

fn fixture(name: &'static str, forbidden: Frame, u: Frame, w: Frame, labels: &[(World, World)], selection: PairSelection, quotient_size: usize) -> Fixture {
    let (u, w) = (Arc::new(u), Arc::new(w));
    let g0 = PMorphism::new(u.clone(), w.clone(), labels.iter().map(|l| l.0).collect()).expect("fixture map");
    let g1 = PMorphism::new(u, w, labels.iter().map(|l| l.1).collect()).expect("fixture map");
    Fixture { name, forbidden, g0, g1, selection, quotient_size }
}

/// The five built-in fixtures, worlds numbered by their labels left to right, top to bottom.
pub fn builtin_fixtures() -> Vec<Fixture> {
    let all = |_: World, _: World| true;
    let diag = |x: World, y: World| x == y;
    // [4] over [3]: U = (1,1) (1,2) (2,2) (3,3) with (3,3) the root; W = 1 2 3 with 3 the root.
    let chain4 = {
        let u = preorder(4, &[(3, 2), (2, 1), (1, 0)]);
        let w = preorder(3, &[(2, 1), (1, 0)]);
        let sel = PairSelection::from_blocks(w.clone(), &[0, 0, 1], &[&all, &diag]);
        fixture("chain4", crate::frame_core::chain(4), u, w, &[(0, 0), (0, 1), (1, 1), (2, 2)], sel, 2)
    };
    // fork over itself: U = (1,2) (2,1) (ρ,ρ); W = 1 2 ρ.
    let fork2 = {
        let u = preorder(3, &[(2, 0), (2, 1)]);
        let w = u.clone();
        let sel = PairSelection::from_blocks(w.clone(), &[0, 0, 1], &[&all, &diag]);
        fixture("fork2", fork(2), u, w, &[(0, 1), (1, 0), (2, 2)], sel, 2)
    };
    // Two 3-clusters over C3, labelled by the 3-cycle and by a transposition.
    let cluster3 = {
        let u = preorder(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let w = cluster(3);
        let sel = PairSelection::from_permutations(w.clone(), &[vec![1, 2, 0]]);
        fixture("cluster3", cluster(3), u, w, &[(0, 1), (1, 2), (2, 0), (0, 0), (1, 2), (2, 1)], sel, 1)
    };
    // (C2)+ over C2: the swapped cluster above (1,1).
    let cluster2_root = {
        let u = preorder(3, &[(0, 1), (1, 0), (2, 0)]);
        let w = cluster(2);
        let sel = PairSelection::from_permutations(w.clone(), &[vec![1, 0]]);
        fixture("cluster2-root", add_root(&cluster(2)), u, w, &[(0, 1), (1, 0), (0, 0)], sel, 1)
    };
    // (e,e) above a 3-cluster and a swapped 2-cluster, over C2 below e.
    let cluster3_final = {
        let u = preorder(6, &[(1, 2), (2, 3), (3, 1), (4, 5), (5, 4), (1, 0), (4, 0)]);
        let w = preorder(3, &[(1, 2), (2, 1), (1, 0)]);
        let sel = PairSelection::from_permutations(w.clone(), &[vec![0, 2, 1]]);
        fixture("cluster3-final", add_final(&cluster(3)), u, w, &[(0, 0), (1, 1), (1, 2), (2, 1), (1, 2), (2, 1)], sel, 2)
    };
    vec![chain4, fork2, cluster3, cluster2_root, cluster3_final]
}

pub fn fixture_by_name(name: &str) -> Result<Fixture> {
    builtin_fixtures()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::Precondition(format!("unknown fixture {name:?}; expected one of {}", FIXTURE_NAMES.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census;
    use crate::frame_core::chain;
    use crate::logic::{frame_in_logic, is_barr_exact, s4_vocabulary};
    use proptest::prelude::*;

    #[test]
    fn trivial_selections_are_valid() {
        for f in census::transitive_frames_up_to(3).unwrap() {
            assert!(PairSelection::full(f.clone()).is_valid());
            assert!(PairSelection::diagonal(f).is_valid());
        }
    }

    #[test]
    fn literal_chain_table_breaks_transitivity() {
        // All pairs when neither index is the root 3, the diagonal otherwise.
        let w = builtin_fixtures()[0].g0.cod().clone();
        let literal = PairSelection::from_fn(w, |(a, b), (x, y)| (a != 2 && b != 2) || x == y);
        assert!(matches!(literal.violation(), Some(Violation::Transitivity { .. })));
    }

    #[test]
    fn fixtures_witness_non_exactness() {
        let fixtures = builtin_fixtures();
        assert_eq!(fixtures.len(), 5);
        for fx in &fixtures {
            assert!(fx.selection.is_valid(), "{}: {:?}", fx.name, fx.selection.violation());
            let report = non_effectiveness_witness(&fx.g0, &fx.g1, &fx.selection).unwrap();
            assert!(report.verdict, "{}", fx.name);
            assert_eq!(report.f_a.cod().size(), fx.quotient_size, "{}", fx.name);
        }
    }

    #[test]
    fn chain_fixture_details() {
        let fx = fixture_by_name("chain4").unwrap();
        let report = non_effectiveness_witness(&fx.g0, &fx.g1, &fx.selection).unwrap();
        assert_eq!(report.u_a.to_vec(), vec![0, 1, 2]);
        assert_eq!(report.outside, Some(3));
        // 1 and 2 are identified; 3 stays apart.
        assert_eq!(report.f_a.map()[0], report.f_a.map()[1]);
        assert_ne!(report.f_a.map()[1], report.f_a.map()[2]);
        assert!(report.f_a.cod().is_isomorphic(&chain(2)));
        let full = non_effectiveness_witness(&fx.g0, &fx.g1, &PairSelection::full(fx.g0.cod().clone())).unwrap();
        assert!(!full.verdict);
        assert!(full.outside.is_none());
    }

    #[test]
    fn fixture_frames_are_where_the_forbidden_frame_is() {
        for fx in builtin_fixtures() {
            for l in s4_vocabulary() {
                if frame_in_logic(&l, &fx.forbidden) {
                    assert!(frame_in_logic(&l, fx.g0.dom()), "{} in {l}", fx.name);
                    assert!(frame_in_logic(&l, fx.g0.cod()), "{} in {l}", fx.name);
                    assert!(!is_barr_exact(&l).unwrap(), "{l}");
                }
            }
        }
        assert!(fixture_by_name("cluster3").unwrap().g0.dom().is_equivalence());
    }

    #[test]
    fn diagonal_excludes_disagreeing_cones() {
        let g0 = PMorphism::identity(chain(2));
        let g1 = PMorphism::new(chain(2), chain(2), vec![1, 1]).unwrap();
        let set = admissible_subframe(&g0, &g1, &PairSelection::diagonal(chain(2))).unwrap();
        assert_eq!(set.to_vec(), vec![1]);
        let swap = PMorphism::new(cluster(2), cluster(2), vec![1, 0]).unwrap();
        let id = PMorphism::identity(cluster(2));
        let set = admissible_subframe(&id, &swap, &PairSelection::diagonal(cluster(2))).unwrap();
        assert!(set.is_empty());
        let set = admissible_subframe(&g0, &g0, &PairSelection::diagonal(chain(2))).unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn relation_examples() {
        let w = chain(2);
        let full = equivalence_from_selection(&w, &PairSelection::full(w.clone()), 2, ProductBudget::default()).unwrap();
        assert_eq!(full.set.len(), full.levels.last().unwrap().size());
        let diag = equivalence_from_selection(&w, &PairSelection::diagonal(w.clone()), 2, ProductBudget::default()).unwrap();
        assert_eq!(diag.set, diag.r.image_set());
        assert!(equivalence_from_selection(&w, &PairSelection::full(w.clone()), 1, ProductBudget::default()).is_err());
        let fx = fixture_by_name("fork2").unwrap();
        let rel = equivalence_from_selection(fx.g0.cod(), &fx.selection, 2, ProductBudget::default()).unwrap();
        assert!(rel.set.len() > rel.r.image_set().len());
        assert!(rel.set.len() < rel.levels.last().unwrap().size());
    }

    fn frame_and_merges() -> impl Strategy<Value = (Frame, Vec<((World, World), (World, World))>)> {
        (1usize..=3).prop_flat_map(|n| {
            let frames: Vec<Frame> = census::transitive_frames(n).unwrap().into_iter().filter(|f| f.is_reflexive()).collect();
            let pair = (0..n, 0..n);
            (prop::sample::select(frames), prop::collection::vec((pair.clone(), pair), 0..4))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn generated_selections_are_valid((w, merges) in frame_and_merges()) {
            let a = PairSelection::from_equivalence(w, &merges);
            prop_assert!(a.is_valid(), "{:?}", a.violation());
        }

        #[test]
        fn admissible_subframe_is_up_closed((w, merges) in frame_and_merges(), seed in 0usize..64) {
            let a = PairSelection::from_equivalence(w.clone(), &merges);
            let maps = crate::pmorph::enumerate_pmorphisms(&w, &w, false, crate::Budget::default()).unwrap();
            let g0 = &maps[seed % maps.len()];
            let g1 = &maps[(seed / 7) % maps.len()];
            let set = admissible_subframe(g0, g1, &a).unwrap();
            prop_assert!(w.is_up_closed(&set));
        }

        #[test]
        fn reflexivity_and_symmetry_restrict((w, merges) in frame_and_merges()) {
            let a = PairSelection::from_equivalence(w.clone(), &merges);
            let depth = w.frame_depth().unwrap();
            let budget = ProductBudget { star_cap: Some(6), ..Default::default() };
            let rel = equivalence_from_selection(&w, &a, depth, budget).unwrap();
            prop_assert!(rel.levels.last().unwrap().frame.is_up_closed(&rel.set));
        }
    }
}
