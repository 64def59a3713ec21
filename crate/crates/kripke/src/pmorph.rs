//! P-morphisms: validation, composition, image factorization and exhaustive search.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::census;
use crate::error::{Budget, Error, Meter, Result};
use crate::frame_core::{Frame, World, WorldSet};

/// A stable and open map between frames.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PMorphism {
    dom: Arc<Frame>,
    cod: Arc<Frame>,
    map: Vec<World>,
}

impl fmt::Debug for PMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PMorphism({} -> {}: {:?})", self.dom.size(), self.cod.size(), self.map)
    }
}

impl PMorphism {
    /// Validates `map` as a p-morphism `dom → cod`.
    pub fn new(dom: impl Into<Arc<Frame>>, cod: impl Into<Arc<Frame>>, map: Vec<World>) -> Result<Self> {
        let f = PMorphism { dom: dom.into(), cod: cod.into(), map };
        f.validate()?;
        Ok(f)
    }

    pub(crate) fn unchecked(dom: Arc<Frame>, cod: Arc<Frame>, map: Vec<World>) -> Self {
        debug_assert!(PMorphism { dom: dom.clone(), cod: cod.clone(), map: map.clone() }.validate().is_ok());
        PMorphism { dom, cod, map }
    }

    pub fn identity(f: impl Into<Arc<Frame>>) -> Self {
        let f = f.into();
        let map = (0..f.size()).collect();
        PMorphism { dom: f.clone(), cod: f, map }
    }

    /// The inclusion of an up-closed set, with the restricted frame as domain.
    pub fn inclusion(f: impl Into<Arc<Frame>>, set: &WorldSet) -> Result<Self> {
        let f = f.into();
        let (sub, worlds) = f.restrict(set);
        PMorphism::new(sub, f, worlds)
    }

    pub fn dom(&self) -> &Frame {
        &self.dom
    }

    pub fn cod(&self) -> &Frame {
        &self.cod
    }

    pub fn dom_arc(&self) -> &Arc<Frame> {
        &self.dom
    }

    pub fn cod_arc(&self) -> &Arc<Frame> {
        &self.cod
    }

    pub fn map(&self) -> &[World] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, w: World) -> World {
        self.map[w]
    }

    /// Re-runs the stability and openness checks.
    pub fn validate(&self) -> Result<()> {
        let (dom, cod) = (&*self.dom, &*self.cod);
        if self.map.len() != dom.size() {
            return Err(Error::MapLength { expected: dom.size(), got: self.map.len() });
        }
        for &v in &self.map {
            cod.check_world(v)?;
        }
        for (a, b) in dom.edges() {
            if !cod.related(self.map[a], self.map[b]) {
                return Err(Error::Stability { from: a, to: b });
            }
        }
        let mut reached = FixedBitSet::with_capacity(cod.size());
        for w in dom.worlds() {
            reached.clear();
            for v in dom.successors(w).ones() {
                reached.insert(self.map[v]);
            }
            if let Some(target) = cod.successors(self.map[w]).difference(&reached).next() {
                return Err(Error::Openness { world: w, target });
            }
        }
        Ok(())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = FixedBitSet::with_capacity(self.cod.size());
        self.map.iter().all(|&v| !seen.put(v))
    }

    pub fn is_surjective(&self) -> bool {
        self.image_set().len() == self.cod.size()
    }

    pub fn image_set(&self) -> WorldSet {
        WorldSet::from_worlds(self.cod.size(), self.map.iter().copied())
    }

    /// `self` followed by `next`, i.e. `next ∘ self`.
    pub fn then(&self, next: &PMorphism) -> Result<PMorphism> {
        if self.cod != next.dom {
            return Err(Error::Precondition("composed maps do not share an endpoint".into()));
        }
        let map = self.map.iter().map(|&w| next.map[w]).collect();
        Ok(PMorphism { dom: self.dom.clone(), cod: next.cod.clone(), map })
    }

    /// Coregular factorization `self = m ∘ e` with `e` surjective and `m` the inclusion of the image.
    pub fn image(&self) -> (WorldSet, PMorphism, PMorphism) {
        let set = self.image_set();
        let (sub, worlds) = self.cod.restrict(&set);
        let mut index = vec![0; self.cod.size()];
        for (i, &w) in worlds.iter().enumerate() {
            index[w] = i;
        }
        let sub = Arc::new(sub);
        let e = PMorphism::unchecked(self.dom.clone(), sub.clone(), self.map.iter().map(|&w| index[w]).collect());
        let m = PMorphism::unchecked(sub, self.cod.clone(), worlds);
        (set, e, m)
    }
}

/// `outer ∘ inner`.
pub fn compose(outer: &PMorphism, inner: &PMorphism) -> Result<PMorphism> {
    inner.then(outer)
}

pub fn make_pmorphism(dom: &Frame, cod: &Frame, map: Vec<World>) -> Result<PMorphism> {
    PMorphism::new(dom.clone(), cod.clone(), map)
}

// ---- search ----

/// Backtracking search for p-morphisms in lexicographic order of the map.
pub struct MorphismSearch<'a> {
    dom: &'a Frame,
    cod: &'a Frame,
    candidates: Vec<Vec<World>>,
    surjective: bool,
    preds_before: Vec<Vec<World>>,
    succs_before: Vec<Vec<World>>,
    open_at: Vec<Vec<World>>,
}

impl<'a> MorphismSearch<'a> {
    pub fn new(dom: &'a Frame, cod: &'a Frame) -> Self {
        let n = dom.size();
        let candidates = dom
            .worlds()
            .map(|w| {
                let refl = dom.related(w, w);
                let out = dom.successors(w).count_ones(..);
                cod.worlds()
                    .filter(|&c| {
                        let cout = cod.successors(c).count_ones(..);
                        (!refl || cod.related(c, c)) && (out == 0) == (cout == 0) && cout <= out
                    })
                    .collect()
            })
            .collect();
        let mut open_at = vec![Vec::new(); n];
        for w in 0..n {
            let ready = dom.successors(w).ones().fold(w, usize::max);
            open_at[ready].push(w);
        }
        MorphismSearch {
            dom,
            cod,
            candidates,
            surjective: false,
            preds_before: (0..n).map(|w| (0..w).filter(|&u| dom.related(u, w)).collect()).collect(),
            succs_before: (0..n).map(|w| (0..w).filter(|&u| dom.related(w, u)).collect()).collect(),
            open_at,
        }
    }

    pub fn surjective(mut self, yes: bool) -> Self {
        self.surjective = yes;
        self
    }

    /// Intersects the candidate list of `w` with `allowed`.
    pub fn restrict_world(mut self, w: World, allowed: &[World]) -> Self {
        self.candidates[w].retain(|c| allowed.contains(c));
        self
    }

    /// Visits maps until `visit` returns `false`. Returns whether the search was stopped early.
    pub fn run(&self, budget: Budget, visit: &mut dyn FnMut(&[World]) -> bool) -> Result<bool> {
        if self.surjective && self.cod.size() > self.dom.size() {
            return Ok(false);
        }
        let mut state = State {
            map: vec![usize::MAX; self.dom.size()],
            hits: vec![0; self.cod.size()],
            uncovered: self.cod.size(),
            scratch: FixedBitSet::with_capacity(self.cod.size()),
            meter: budget.meter("enumerating p-morphisms"),
        };
        self.extend(0, &mut state, visit)
    }

    fn extend(&self, w: World, st: &mut State, visit: &mut dyn FnMut(&[World]) -> bool) -> Result<bool> {
        if w == self.dom.size() {
            if self.surjective && st.uncovered > 0 {
                return Ok(false);
            }
            return Ok(!visit(&st.map));
        }
        st.meter.tick()?;
        for &c in &self.candidates[w] {
            if self.surjective && st.hits[c] > 0 && st.uncovered > self.dom.size() - w - 1 {
                continue;
            }
            let stable = (!self.dom.related(w, w) || self.cod.related(c, c))
                && self.preds_before[w].iter().all(|&u| self.cod.related(st.map[u], c))
                && self.succs_before[w].iter().all(|&u| self.cod.related(c, st.map[u]));
            if !stable {
                continue;
            }
            st.map[w] = c;
            if self.open_at[w].iter().all(|&u| self.open(u, st)) {
                st.hits[c] += 1;
                if st.hits[c] == 1 {
                    st.uncovered -= 1;
                }
                let stop = self.extend(w + 1, st, visit)?;
                st.hits[c] -= 1;
                if st.hits[c] == 0 {
                    st.uncovered += 1;
                }
                if stop {
                    st.map[w] = usize::MAX;
                    return Ok(true);
                }
            }
        }
        st.map[w] = usize::MAX;
        Ok(false)
    }

    fn open(&self, u: World, st: &mut State) -> bool {
        st.scratch.clear();
        for v in self.dom.successors(u).ones() {
            st.scratch.insert(st.map[v]);
        }
        self.cod.successors(st.map[u]).is_subset(&st.scratch)
    }
}

struct State {
    map: Vec<World>,
    hits: Vec<usize>,
    uncovered: usize,
    scratch: FixedBitSet,
    meter: Meter,
}

/// Every p-morphism `dom → cod` (or every surjective one), in lexicographic order.
pub fn enumerate_pmorphisms(dom: &Frame, cod: &Frame, surjective_only: bool, budget: Budget) -> Result<Vec<PMorphism>> {
    let (d, c) = (Arc::new(dom.clone()), Arc::new(cod.clone()));
    let mut out = Vec::new();
    MorphismSearch::new(dom, cod).surjective(surjective_only).run(budget, &mut |m| {
        out.push(PMorphism::unchecked(d.clone(), c.clone(), m.to_vec()));
        true
    })?;
    Ok(out)
}

/// Raw maps only; cheaper when the caller does not need validated values.
pub fn enumerate_maps(dom: &Frame, cod: &Frame, surjective_only: bool, budget: Budget) -> Result<Vec<Vec<World>>> {
    let mut out = Vec::new();
    MorphismSearch::new(dom, cod).surjective(surjective_only).run(budget, &mut |m| {
        out.push(m.to_vec());
        true
    })?;
    Ok(out)
}

/// The lexicographically first p-morphism, if any.
pub fn find_pmorphism(dom: &Frame, cod: &Frame, surjective_only: bool, budget: Budget) -> Result<Option<PMorphism>> {
    let mut found = None;
    MorphismSearch::new(dom, cod).surjective(surjective_only).run(budget, &mut |m| {
        found = Some(m.to_vec());
        false
    })?;
    Ok(found.map(|m| PMorphism::unchecked(Arc::new(dom.clone()), Arc::new(cod.clone()), m)))
}

/// A subreduction `w ⊳ v`: a generated subframe `G` of `w` and a surjection `G ↠ v`.
///
/// For rooted `v` only cones need to be tried: a point sent to the root generates a cone
/// whose image is all of `v`.
pub fn subreduces(w: &Frame, v: &Frame, budget: Budget) -> Result<Option<(WorldSet, PMorphism)>> {
    let mut meter = budget.meter("searching for a subreduction");
    let candidates: Vec<WorldSet> = if v.is_rooted() {
        let mut cones: Vec<WorldSet> = Vec::new();
        for x in w.worlds() {
            let cone = w.star(x)?;
            if !cones.contains(&cone) {
                cones.push(cone);
            }
        }
        cones
    } else {
        w.generated_subframes()
    };
    for set in candidates {
        if set.len() < v.size() {
            continue;
        }
        meter.tick()?;
        let (sub, _) = w.restrict(&set);
        let remaining = Budget::new(budget.max_steps);
        if let Some(f) = find_pmorphism(&sub, v, true, remaining)? {
            return Ok(Some((set, f)));
        }
    }
    Ok(None)
}

/// Probe frames for the mono oracle, paired with all maps into `dom`.
pub struct MonoProbes {
    probes: Vec<(Frame, Vec<Vec<World>>)>,
}

impl MonoProbes {
    /// Rooted probes up to `probe_size`, transitive when `dom` is.
    ///
    /// Rooted probes suffice: two maps that differ at `x` still differ on the cone of `x`.
    pub fn new(dom: &Frame, probe_size: usize, budget: Budget) -> Result<Self> {
        let transitive = dom.is_transitive();
        let mut probes = Vec::new();
        for n in 1..=probe_size {
            let frames = if transitive { census::transitive_frames(n)? } else { census::all_frames(n)?.to_vec() };
            for p in frames {
                if !p.is_rooted() {
                    continue;
                }
                let maps = enumerate_maps(&p, dom, false, budget)?;
                if maps.len() > 1 {
                    probes.push((p, maps));
                }
            }
        }
        Ok(MonoProbes { probes })
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    /// No two distinct probe maps are merged by `f`.
    pub fn separates(&self, f: &PMorphism) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.probes.iter().all(|(_, maps)| {
            seen.clear();
            maps.iter().all(|h| seen.insert(h.iter().map(|&x| f.apply(x)).collect::<Vec<_>>()))
        })
    }
}

/// `f` is left-cancellable against all probe maps of size at most `probe_size`.
pub fn is_monomorphism_oracle(f: &PMorphism, probe_size: usize, budget: Budget) -> Result<bool> {
    Ok(MonoProbes::new(f.dom(), probe_size, budget)?.separates(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_core::{add_final, add_root, chain, cluster, copies, disjoint_sum, fork, strict_chain};

    /// Brute-force oracle: all maps, filtered by `validate`.
    fn all_valid_maps(dom: &Frame, cod: &Frame) -> Vec<Vec<World>> {
        let n = dom.size();
        let total = cod.size().pow(n as u32);
        let mut out = Vec::new();
        for mut code in 0..total {
            let mut map = Vec::with_capacity(n);
            for _ in 0..n {
                map.push(code % cod.size());
                code /= cod.size();
            }
            map.reverse();
            if PMorphism::new(dom.clone(), cod.clone(), map.clone()).is_ok() {
                out.push(map);
            }
        }
        if n == 0 {
            out = vec![vec![]];
        }
        out.sort();
        out
    }

    #[test]
    fn validation_examples() {
        assert!(PMorphism::new(chain(3), chain(3), vec![0, 1, 2]).is_ok());
        assert!(PMorphism::new(chain(2), chain(1), vec![0, 0]).is_ok());
        let err = PMorphism::new(strict_chain(2), strict_chain(1), vec![0, 0]).unwrap_err();
        assert!(matches!(err, Error::Stability { .. }), "{err:?}");
        let err = PMorphism::new(chain(2), chain(2), vec![0, 0]).unwrap_err();
        assert_eq!(err, Error::Openness { world: 0, target: 1 });
        let err = PMorphism::new(chain(2), chain(2), vec![1, 0]).unwrap_err();
        assert_eq!(err, Error::Stability { from: 0, to: 1 });
        assert!(matches!(PMorphism::new(chain(2), chain(2), vec![0]), Err(Error::MapLength { .. })));
    }

    #[test]
    fn openness_needs_a_preimage() {
        let err = PMorphism::new(strict_chain(1), strict_chain(2), vec![0]).unwrap_err();
        assert_eq!(err, Error::Openness { world: 0, target: 1 });
    }

    #[test]
    fn enumeration_examples() {
        let maps = enumerate_maps(&chain(2), &chain(2), false, Budget::default()).unwrap();
        assert_eq!(maps, vec![vec![0, 1], vec![1, 1]]);
        assert!(enumerate_maps(&chain(2), &Frame::empty(), false, Budget::default()).unwrap().is_empty());
        assert_eq!(enumerate_maps(&Frame::empty(), &chain(3), false, Budget::default()).unwrap(), vec![vec![]]);
    }

    #[test]
    fn budget_is_reported() {
        let r = enumerate_maps(&cluster(6), &cluster(6), false, Budget::new(10));
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn image_examples() {
        let id = PMorphism::identity(chain(3));
        assert_eq!(id.image().0.len(), 3);
        let collapse = PMorphism::new(chain(2), chain(2), vec![1, 1]).unwrap();
        let (set, e, m) = collapse.image();
        assert_eq!(set.to_vec(), vec![1]);
        assert_eq!(e.then(&m).unwrap(), collapse);
        let surj = PMorphism::new(cluster(3), chain(1), vec![0, 0, 0]).unwrap();
        assert!(surj.image().2.is_injective() && surj.image().2.is_surjective());
    }

    #[test]
    fn subreduction_examples() {
        let b = Budget::default();
        assert!(subreduces(&chain(3), &chain(2), b).unwrap().is_some());
        assert!(subreduces(&chain(2), &chain(3), b).unwrap().is_none());
        let f = fork(2);
        let (set, map) = subreduces(&f, &f, b).unwrap().unwrap();
        assert_eq!(set.len(), 3);
        assert!(map.is_surjective());
        assert!(subreduces(&chain(1), &Frame::empty(), b).unwrap().is_some());
        // A non-rooted target needs a non-cone subframe.
        let two = copies(2, &chain(1));
        assert!(subreduces(&fork(2), &two, b).unwrap().is_some());
        assert!(subreduces(&chain(3), &two, b).unwrap().is_none());
    }

    #[test]
    fn mono_oracle_examples() {
        let b = Budget::default();
        let inj = PMorphism::new(chain(1), chain(2), vec![1]).unwrap();
        assert!(is_monomorphism_oracle(&inj, 3, b).unwrap());
        assert!(is_monomorphism_oracle(&PMorphism::identity(fork(2)), 3, b).unwrap());
        let collapse = PMorphism::new(fork(2), chain(2), vec![0, 1, 1]).unwrap();
        assert!(!is_monomorphism_oracle(&collapse, 3, b).unwrap());
        let c = PMorphism::new(cluster(2), chain(1), vec![0, 0]).unwrap();
        assert!(!is_monomorphism_oracle(&c, 2, b).unwrap());
    }

    #[test]
    fn search_matches_brute_force_on_samples() {
        let frames = [
            Frame::empty(),
            chain(1),
            chain(2),
            strict_chain(2),
            cluster(2),
            fork(2),
            add_final(&cluster(2)),
            add_root(&strict_chain(1)),
            disjoint_sum(&chain(1), &strict_chain(2)),
            Frame::new(2, [(0, 1), (1, 0)]).unwrap(),
        ];
        for a in &frames {
            for b in &frames {
                let fast = enumerate_maps(a, b, false, Budget::default()).unwrap();
                assert_eq!(fast, all_valid_maps(a, b), "{a:?} -> {b:?}");
                let surj: Vec<_> = fast
                    .iter()
                    .filter(|m| (0..b.size()).all(|c| m.contains(&c)))
                    .cloned()
                    .collect();
                assert_eq!(enumerate_maps(a, b, true, Budget::default()).unwrap(), surj);
            }
        }
    }

    use proptest::prelude::*;

    fn arb_frame(max: usize) -> impl Strategy<Value = Frame> {
        (0..=max).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n)
                .prop_map(move |bits| Frame::from_fn(n, |a, b| bits[a * n + b]))
        })
    }

    proptest! {
        #[test]
        fn search_agrees_with_validation(a in arb_frame(3), b in arb_frame(3)) {
            prop_assert_eq!(enumerate_maps(&a, &b, false, Budget::default()).unwrap(), all_valid_maps(&a, &b));
        }

        #[test]
        fn composition_validates_and_is_associative(a in arb_frame(3), b in arb_frame(3), c in arb_frame(3)) {
            let ab = enumerate_pmorphisms(&a, &b, false, Budget::default()).unwrap();
            let bc = enumerate_pmorphisms(&b, &c, false, Budget::default()).unwrap();
            let cc = enumerate_pmorphisms(&c, &c, false, Budget::default()).unwrap();
            for f in ab.iter().take(4) {
                prop_assert_eq!(&f.then(&PMorphism::identity(b.clone())).unwrap(), f);
                prop_assert_eq!(&PMorphism::identity(a.clone()).then(f).unwrap(), f);
                for g in bc.iter().take(4) {
                    let fg = f.then(g).unwrap();
                    prop_assert!(fg.validate().is_ok());
                    for h in cc.iter().take(3) {
                        prop_assert_eq!(fg.then(h).unwrap(), f.then(&g.then(h).unwrap()).unwrap());
                    }
                }
            }
        }

        #[test]
        fn images_are_up_closed(a in arb_frame(4), b in arb_frame(3)) {
            for f in enumerate_pmorphisms(&a, &b, false, Budget::default()).unwrap() {
                let (set, e, m) = f.image();
                prop_assert!(b.is_up_closed(&set));
                prop_assert!(e.is_surjective() && m.is_injective());
                prop_assert_eq!(e.then(&m).unwrap(), f);
            }
        }
    }
}
