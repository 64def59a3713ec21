//! Finite limits and colimits of frames.

use std::sync::Arc;

use crate::error::{Budget, Error, Result};
use crate::frame_core::{chain, Frame, World, WorldSet};
use crate::pmorph::{enumerate_maps, PMorphism};

/// Two arrows with the same domain and codomain.
#[derive(Debug, Clone)]
pub struct ParallelPair {
    pub f: PMorphism,
    pub g: PMorphism,
}

impl ParallelPair {
    pub fn new(f: PMorphism, g: PMorphism) -> Result<Self> {
        if f.dom() != g.dom() || f.cod() != g.cod() {
            return Err(Error::Precondition("parallel arrows must share domain and codomain".into()));
        }
        Ok(ParallelPair { f, g })
    }
}

/// Two arrows out of a common domain.
#[derive(Debug, Clone)]
pub struct Span {
    pub f0: PMorphism,
    pub f1: PMorphism,
}

impl Span {
    pub fn new(f0: PMorphism, f1: PMorphism) -> Result<Self> {
        if f0.dom() != f1.dom() {
            return Err(Error::Precondition("span legs must share a domain".into()));
        }
        Ok(Span { f0, f1 })
    }
}

/// Two arrows into a common codomain.
#[derive(Debug, Clone)]
pub struct Cospan {
    pub f0: PMorphism,
    pub f1: PMorphism,
}

impl Cospan {
    pub fn new(f0: PMorphism, f1: PMorphism) -> Result<Self> {
        if f0.cod() != f1.cod() {
            return Err(Error::Precondition("cospan legs must share a codomain".into()));
        }
        Ok(Cospan { f0, f1 })
    }

    pub fn is_surjective(&self) -> bool {
        self.f0.is_surjective() && self.f1.is_surjective()
    }
}

/// Whether a universal property was confirmed against test frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Verified { tests: usize },
    Failed { test: Frame },
    /// The check ran out of budget; the construction is still returned.
    Unverified,
}

// ---- limits ----

pub fn terminal() -> Frame {
    chain(1)
}

/// The unique map into the terminal frame.
pub fn to_terminal(f: &Frame) -> PMorphism {
    PMorphism::new(f.clone(), terminal(), vec![0; f.size()]).expect("constant maps into a reflexive point are p-morphisms")
}

/// The largest up-closed set on which `f` and `g` agree, with its inclusion.
pub fn equalizer(p: &ParallelPair) -> (WorldSet, PMorphism) {
    let dom = p.f.dom_arc().clone();
    let set = WorldSet::from_worlds(
        dom.size(),
        dom.worlds().filter(|&w| {
            dom.star_bits(w).ones().all(|v| p.f.apply(v) == p.g.apply(v))
        }),
    );
    let inclusion = PMorphism::inclusion(dom, &set).expect("up-closed sets include as p-morphisms");
    (set, inclusion)
}

/// Disjoint union with its coprojections.
pub fn coproduct(frames: &[Frame]) -> (Frame, Vec<PMorphism>) {
    let mut offsets = Vec::with_capacity(frames.len());
    let mut total = 0;
    for f in frames {
        offsets.push(total);
        total += f.size();
    }
    let owner = |w: World| offsets.iter().rposition(|&o| o <= w).unwrap();
    let sum = Frame::from_fn(total, |a, b| {
        let (i, j) = (owner(a), owner(b));
        i == j && frames[i].related(a - offsets[i], b - offsets[i])
    });
    let sum = Arc::new(sum);
    let injections = frames
        .iter()
        .zip(&offsets)
        .map(|(f, &o)| PMorphism::unchecked(Arc::new(f.clone()), sum.clone(), (o..o + f.size()).collect()))
        .collect();
    (Arc::unwrap_or_clone(sum), injections)
}

/// Pullback of a surjection `surj: A → B` along an injection `inj: C → B`.
///
/// Returns the inverse image `P ⊆ A`, the restricted leg `P → C` and the inclusion `P → A`.
pub fn pullback_along_injective(surj: &PMorphism, inj: &PMorphism) -> Result<(Frame, PMorphism, PMorphism)> {
    if surj.cod() != inj.cod() {
        return Err(Error::Precondition("pullback legs must share a codomain".into()));
    }
    if !inj.is_injective() {
        return Err(Error::Precondition("the second leg must be injective".into()));
    }
    let mut back = vec![usize::MAX; inj.cod().size()];
    for (c, &b) in inj.map().iter().enumerate() {
        back[b] = c;
    }
    let a = surj.dom_arc().clone();
    let set = WorldSet::from_worlds(a.size(), a.worlds().filter(|&w| back[surj.apply(w)] != usize::MAX));
    let inclusion = PMorphism::inclusion(a, &set)?;
    let leg = inclusion.map().iter().map(|&w| back[surj.apply(w)]).collect();
    let restricted = PMorphism::new(inclusion.dom_arc().clone(), inj.dom_arc().clone(), leg)?;
    Ok((inclusion.dom().clone(), restricted, inclusion))
}

/// Carrier `{(w0, w1) | f0(w0) = f1(w1)}` with the product relation, as in directed graphs.
///
/// Each projection is returned only if it validates as a p-morphism.
pub fn dgrph_pullback(c: &Cospan) -> (Frame, Result<PMorphism>, Result<PMorphism>) {
    let (w0, w1) = (c.f0.dom(), c.f1.dom());
    let pairs: Vec<(World, World)> = w0
        .worlds()
        .flat_map(|a| w1.worlds().map(move |b| (a, b)))
        .filter(|&(a, b)| c.f0.apply(a) == c.f1.apply(b))
        .collect();
    let u = Frame::from_fn(pairs.len(), |x, y| {
        w0.related(pairs[x].0, pairs[y].0) && w1.related(pairs[x].1, pairs[y].1)
    });
    let u = Arc::new(u);
    let p0 = PMorphism::new(u.clone(), c.f0.dom_arc().clone(), pairs.iter().map(|p| p.0).collect());
    let p1 = PMorphism::new(u.clone(), c.f1.dom_arc().clone(), pairs.iter().map(|p| p.1).collect());
    (Arc::unwrap_or_clone(u), p0, p1)
}

// ---- colimits ----

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Quotient of the codomain by the equivalence generated by `f(u) ~ g(u)`.
///
/// The relation on classes is the image of the codomain relation. Openness of the
/// quotient map follows by moving successors along the generating zig-zag, because `f`
/// and `g` are open; the map is still validated on every call.
pub fn coequalizer(p: &ParallelPair) -> Result<(Frame, PMorphism)> {
    let cod = p.f.cod_arc().clone();
    let mut uf = UnionFind::new(cod.size());
    for u in p.f.dom().worlds() {
        uf.union(p.f.apply(u), p.g.apply(u));
    }
    quotient(cod, &mut uf)
}

fn quotient(cod: Arc<Frame>, uf: &mut UnionFind) -> Result<(Frame, PMorphism)> {
    let mut class = vec![usize::MAX; cod.size()];
    let mut count = 0;
    let mut rep_class = vec![usize::MAX; cod.size()];
    for w in cod.worlds() {
        let r = uf.find(w);
        if rep_class[r] == usize::MAX {
            rep_class[r] = count;
            count += 1;
        }
        class[w] = rep_class[r];
    }
    let mut q = Frame::discrete(count);
    let edges: Vec<(World, World)> = cod.edges().map(|(a, b)| (class[a], class[b])).collect();
    q = Frame::new(q.size(), edges)?;
    let map = PMorphism::new(cod, q.clone(), class)
        .map_err(|e| Error::Precondition(format!("quotient map failed validation: {e}")))?;
    Ok((q, map))
}

/// Pushout, built as a coproduct followed by a coequalizer.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub frame: Frame,
    pub i0: PMorphism,
    pub i1: PMorphism,
    pub verification: Verification,
}

pub fn pushout(s: &Span) -> Result<Pushout> {
    let (w0, w1) = (s.f0.cod(), s.f1.cod());
    let (sum, inj) = coproduct(&[w0.clone(), w1.clone()]);
    let sum = Arc::new(sum);
    let mut uf = UnionFind::new(sum.size());
    for v in s.f0.dom().worlds() {
        uf.union(inj[0].apply(s.f0.apply(v)), inj[1].apply(s.f1.apply(v)));
    }
    let (frame, q) = quotient(sum, &mut uf)?;
    let i0 = PMorphism::new(s.f0.cod_arc().clone(), q.cod_arc().clone(), inj[0].map().iter().map(|&w| q.apply(w)).collect())?;
    let i1 = PMorphism::new(s.f1.cod_arc().clone(), q.cod_arc().clone(), inj[1].map().iter().map(|&w| q.apply(w)).collect())?;
    Ok(Pushout { frame, i0, i1, verification: Verification::Unverified })
}

/// Pushout whose universal property is checked against every test frame.
pub fn pushout_checked(s: &Span, tests: &[Frame], budget: Budget) -> Result<Pushout> {
    let mut p = pushout(s)?;
    p.verification = match verify_pushout(s, &p, tests, budget) {
        Ok(v) => v,
        Err(Error::BudgetExceeded(_)) => Verification::Unverified,
        Err(e) => return Err(e),
    };
    Ok(p)
}

fn compose_maps(first: &[World], second: &[World]) -> Vec<World> {
    first.iter().map(|&w| second[w]).collect()
}

/// Every commuting pair into a test frame factors uniquely through the pushout.
pub fn verify_pushout(s: &Span, p: &Pushout, tests: &[Frame], budget: Budget) -> Result<Verification> {
    let (w0, w1) = (s.f0.cod(), s.f1.cod());
    for t in tests {
        let h0s = enumerate_maps(w0, t, false, budget)?;
        let h1s = enumerate_maps(w1, t, false, budget)?;
        let meds = enumerate_maps(&p.frame, t, false, budget)?;
        for h0 in &h0s {
            let lhs = compose_maps(s.f0.map(), h0);
            for h1 in h1s.iter().filter(|h1| compose_maps(s.f1.map(), h1) == lhs) {
                let count = meds
                    .iter()
                    .filter(|m| &compose_maps(p.i0.map(), m) == h0 && &compose_maps(p.i1.map(), m) == h1)
                    .count();
                if count != 1 {
                    return Ok(Verification::Failed { test: t.clone() });
                }
            }
        }
    }
    Ok(Verification::Verified { tests: tests.len() })
}

/// Any `h` with `f h = g h` factors through the equalizer exactly once.
pub fn verify_equalizer(p: &ParallelPair, tests: &[Frame], budget: Budget) -> Result<bool> {
    let (_, inc) = equalizer(p);
    for t in tests {
        let into_e = enumerate_maps(t, inc.dom(), false, budget)?;
        for h in enumerate_maps(t, p.f.dom(), false, budget)? {
            if compose_maps(&h, p.f.map()) != compose_maps(&h, p.g.map()) {
                continue;
            }
            let count = into_e.iter().filter(|m| compose_maps(m, inc.map()) == h).count();
            if count != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Any `h` with `h f = h g` factors through the coequalizer exactly once.
pub fn verify_coequalizer(p: &ParallelPair, tests: &[Frame], budget: Budget) -> Result<bool> {
    let (q, map) = coequalizer(p)?;
    for t in tests {
        let meds = enumerate_maps(&q, t, false, budget)?;
        for h in enumerate_maps(p.f.cod(), t, false, budget)? {
            if compose_maps(p.f.map(), &h) != compose_maps(p.g.map(), &h) {
                continue;
            }
            let count = meds.iter().filter(|m| compose_maps(map.map(), m) == h).count();
            if count != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The cokernel pair of `f: X → V`.
///
/// Worlds: `(v, 1)` for every `v` first, then `(v, 0)` for `v` outside the image.
pub fn cokernel_pair(f: &PMorphism) -> (Frame, PMorphism, PMorphism) {
    let v = f.cod_arc().clone();
    let image = f.image_set();
    let outside: Vec<World> = v.worlds().filter(|&w| !image.contains(w)).collect();
    let n = v.size();
    let label = |x: usize| if x < n { (x, 1) } else { (outside[x - n], 0) };
    let u = Frame::from_fn(n + outside.len(), |x, y| {
        let ((a, i), (b, j)) = (label(x), label(y));
        v.related(a, b) && (i == j || (i < j && image.contains(b)))
    });
    let mut zero = vec![0; n];
    for w in v.worlds() {
        zero[w] = w;
    }
    for (k, &w) in outside.iter().enumerate() {
        zero[w] = n + k;
    }
    let u = Arc::new(u);
    let i0 = PMorphism::unchecked(v.clone(), u.clone(), zero);
    let i1 = PMorphism::unchecked(v.clone(), u.clone(), (0..n).collect());
    (Arc::unwrap_or_clone(u), i0, i1)
}

/// Epimorphism test: the two legs of the pushout of `f` with itself coincide.
pub fn is_epimorphism(f: &PMorphism) -> Result<bool> {
    let p = pushout(&Span::new(f.clone(), f.clone())?)?;
    Ok(p.i0 == p.i1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census;
    use crate::frame_core::{cluster, copies, fork, strict_chain};
    use crate::pmorph::enumerate_pmorphisms;

    fn pm(dom: Frame, cod: Frame, map: Vec<World>) -> PMorphism {
        PMorphism::new(dom, cod, map).unwrap()
    }

    #[test]
    fn terminal_examples() {
        assert_eq!(to_terminal(&chain(3)).map(), &[0, 0, 0]);
        assert!(to_terminal(&Frame::empty()).map().is_empty());
        for f in census::all_frames_up_to(3).unwrap().iter().filter(|f| !f.is_empty()) {
            let n = enumerate_pmorphisms(f, &terminal(), false, Budget::default()).unwrap().len();
            // Frames with a dead end admit no map onto a reflexive point.
            let dead_end = f.worlds().any(|w| f.successors(w).is_clear());
            assert_eq!(n, usize::from(!dead_end), "{f:?}");
        }
    }

    #[test]
    fn equalizer_examples() {
        let id = PMorphism::identity(chain(2));
        let (set, _) = equalizer(&ParallelPair::new(id.clone(), id.clone()).unwrap());
        assert_eq!(set.len(), 2);
        // Agreement at the root is not up-closed when the tops differ.
        let f = pm(fork(2), fork(2), vec![0, 1, 2]);
        let g = pm(fork(2), fork(2), vec![0, 2, 1]);
        let (set, inc) = equalizer(&ParallelPair::new(f, g).unwrap());
        assert!(set.is_empty());
        assert!(inc.dom().is_empty());
    }

    #[test]
    fn cokernel_pair_examples() {
        let surj = pm(chain(2), chain(1), vec![0, 0]);
        let (u, i0, i1) = cokernel_pair(&surj);
        assert_eq!(u.size(), 1);
        assert_eq!(i0, i1);
        let top = pm(chain(1), chain(2), vec![1]);
        let (u, i0, i1) = cokernel_pair(&top);
        assert_eq!(u.size(), 3);
        assert!(i0.validate().is_ok() && i1.validate().is_ok());
        let (set, _) = equalizer(&ParallelPair::new(i0, i1).unwrap());
        assert_eq!(set, top.image_set());
    }

    #[test]
    fn coequalizer_glues_cluster() {
        // The identity and the swap of C2 glue its two points into one reflexive point.
        let f = PMorphism::identity(cluster(2));
        let g = pm(cluster(2), cluster(2), vec![1, 0]);
        let (q, map) = coequalizer(&ParallelPair::new(f, g).unwrap()).unwrap();
        assert_eq!(q, chain(1));
        assert!(map.is_surjective());
        let id = PMorphism::identity(chain(3));
        let (q, _) = coequalizer(&ParallelPair::new(id.clone(), id).unwrap()).unwrap();
        assert_eq!(q, chain(3));
    }

    #[test]
    fn pullback_examples() {
        let f = pm(chain(3), chain(2), vec![0, 1, 1]);
        let (p, leg, inc) = pullback_along_injective(&f, &PMorphism::identity(chain(2))).unwrap();
        assert_eq!(p, chain(3));
        assert_eq!(leg.map(), f.map());
        assert_eq!(inc.map(), &[0, 1, 2]);
        let top = pm(chain(1), chain(2), vec![1]);
        let (p, leg, inc) = pullback_along_injective(&f, &top).unwrap();
        assert_eq!(p.size(), 2);
        assert!(leg.is_surjective());
        assert_eq!(inc.map(), &[1, 2]);
    }

    #[test]
    fn dgrph_pullback_examples() {
        let id = PMorphism::identity(fork(2));
        let (u, p0, p1) = dgrph_pullback(&Cospan::new(id.clone(), id).unwrap());
        assert!(u.is_isomorphic(&fork(2)));
        assert!(p0.is_ok() && p1.is_ok());
        let f0 = pm(cluster(2), chain(1), vec![0, 0]);
        let (u, p0, p1) = dgrph_pullback(&Cospan::new(f0.clone(), f0).unwrap());
        assert_eq!(u, cluster(4));
        assert!(p0.unwrap().is_surjective() && p1.unwrap().is_surjective());
    }

    #[test]
    fn epi_examples() {
        assert!(is_epimorphism(&pm(chain(2), chain(1), vec![0, 0])).unwrap());
        assert!(!is_epimorphism(&pm(chain(1), chain(2), vec![1])).unwrap());
        assert!(is_epimorphism(&PMorphism::identity(strict_chain(2))).unwrap());
    }

    /// Exhaustive checks over all frames with at most two worlds.
    #[test]
    fn universal_properties_small() {
        let frames = census::all_frames_up_to(2).unwrap();
        let b = Budget::default();
        for a in &frames {
            for c in &frames {
                let homs = enumerate_pmorphisms(a, c, false, b).unwrap();
                for f in &homs {
                    for g in &homs {
                        let pair = ParallelPair::new(f.clone(), g.clone()).unwrap();
                        assert!(verify_equalizer(&pair, &frames, b).unwrap());
                        assert!(verify_coequalizer(&pair, &frames, b).unwrap());
                    }
                    let (u, i0, i1) = cokernel_pair(f);
                    let p = pushout_checked(&Span::new(f.clone(), f.clone()).unwrap(), &frames, b).unwrap();
                    assert!(matches!(p.verification, Verification::Verified { .. }));
                    assert!(p.frame.is_isomorphic(&u));
                    assert_eq!(i0 == i1, f.is_surjective());
                }
            }
        }
    }

    #[test]
    fn coproducts_are_extensive() {
        // Pulling a coprojection back along a map into the sum splits the domain.
        let (sum, inj) = coproduct(&[chain(2), chain(1)]);
        let f = pm(copies(2, &chain(1)), sum.clone(), vec![1, 2]);
        let (p0, _, inc0) = pullback_along_injective(&f, &inj[0]).unwrap();
        let (p1, _, inc1) = pullback_along_injective(&f, &inj[1]).unwrap();
        assert_eq!(p0.size() + p1.size(), 2);
        assert_eq!(inc0.map(), &[0]);
        assert_eq!(inc1.map(), &[1]);
        let (empty, _, _) = pullback_along_injective(&inj[0], &inj[1]).unwrap();
        assert!(empty.is_empty());
    }
}
