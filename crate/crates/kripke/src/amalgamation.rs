//! Coamalgamating cospans of surjective p-morphisms.
//!
//! Given surjections `f₀: W₀ → V` and `f₁: W₁ → V`, a coamalgamation is a frame `U` in the
//! logic with surjections `gᵢ: U → Wᵢ` such that `f₀ g₀ = f₁ g₁`. The solvers only ever
//! report "no solution found"; they never conclude that none exists.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::census;
use crate::error::{Budget, Error, Result};
use crate::frame_core::{chain, Frame, World};
use crate::limits::{coproduct, dgrph_pullback, Cospan};
use crate::logic::{frame_in_logic, Bound, LogicSpec, Param};
use crate::pmorph::{enumerate_maps, MorphismSearch, PMorphism};

/// Which solver produced a coamalgamation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    Horn,
    Chain,
    Reflect,
    Rooted,
    Bruteforce,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Horn => "horn",
            Route::Chain => "chain",
            Route::Reflect => "reflect",
            Route::Rooted => "rooted",
            Route::Bruteforce => "bruteforce",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Coamalgamation {
    pub apex: Frame,
    pub g0: PMorphism,
    pub g1: PMorphism,
    pub route: Route,
}

impl Coamalgamation {
    /// Commuting square, surjective legs and apex membership in `l`.
    pub fn validate(&self, c: &Cospan, l: &LogicSpec) -> Result<()> {
        self.g0.validate()?;
        self.g1.validate()?;
        if self.g0.cod() != c.f0.dom() || self.g1.cod() != c.f1.dom() {
            return Err(Error::Precondition("coamalgamation legs end at the wrong frames".into()));
        }
        if !self.g0.is_surjective() || !self.g1.is_surjective() {
            return Err(Error::Precondition("coamalgamation legs must be surjective".into()));
        }
        if self.apex.worlds().any(|u| c.f0.apply(self.g0.apply(u)) != c.f1.apply(self.g1.apply(u))) {
            return Err(Error::Precondition("coamalgamation square does not commute".into()));
        }
        if !frame_in_logic(l, &self.apex) {
            return Err(Error::Precondition(format!("coamalgamation apex is not a {l} frame")));
        }
        Ok(())
    }
}

fn require_surjective(c: &Cospan) -> Result<()> {
    if !c.is_surjective() {
        return Err(Error::Precondition("cospan legs must be surjective".into()));
    }
    Ok(())
}

fn require_s4(l: &LogicSpec) -> Result<()> {
    if !l.extends_s4() {
        return Err(Error::UnsupportedLogic(l.to_string()));
    }
    Ok(())
}

/// The directed-graph pullback, when it is a frame of `l` with p-morphic projections.
pub fn coamalgamate_horn(c: &Cospan, l: &LogicSpec) -> Result<Option<Coamalgamation>> {
    require_surjective(c)?;
    let (apex, p0, p1) = dgrph_pullback(c);
    let (Ok(g0), Ok(g1)) = (p0, p1) else { return Ok(None) };
    if !frame_in_logic(l, &apex) {
        return Ok(None);
    }
    Ok(Some(Coamalgamation { apex, g0, g1, route: Route::Horn }))
}

/// Position of every world along the chain, root first, if `f` is a reflexive chain.
fn chain_positions(f: &Frame) -> Option<Vec<usize>> {
    let n = f.size();
    let pos: Vec<usize> = f.worlds().map(|w| n.checked_sub(f.successors(w).count_ones(..))).collect::<Option<_>>()?;
    (f.permuted(&pos) == chain(n)).then_some(pos)
}

fn inverse(pos: &[usize]) -> Vec<World> {
    let mut inv = vec![0; pos.len()];
    for (w, &p) in pos.iter().enumerate() {
        inv[p] = w;
    }
    inv
}

/// Coamalgamation of two surjections between reflexive chains, by induction on `n - k`.
///
/// `f: [n] → [k]` and `g: [m] → [k]`; the apex is again a chain.
pub fn coamalgamate_chain(f: &PMorphism, g: &PMorphism) -> Result<Coamalgamation> {
    let not_chains = || Error::Precondition("the chain solver needs surjections between reflexive chains".into());
    if f.cod() != g.cod() || !f.is_surjective() || !g.is_surjective() {
        return Err(not_chains());
    }
    let (pf, pg, pk) = match (chain_positions(f.dom()), chain_positions(g.dom()), chain_positions(f.cod())) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(not_chains()),
    };
    let (n, m, k) = (pf.len(), pg.len(), pk.len());
    let along = |map: &PMorphism, pos: &[usize]| {
        let mut out = vec![0; pos.len()];
        for (w, &p) in pos.iter().enumerate() {
            out[p] = pk[map.apply(w)];
        }
        out
    };
    let (top, g0, g1) = chain_step(n, m, k, &along(f, &pf), &along(g, &pg));
    let (inv_f, inv_g) = (inverse(&pf), inverse(&pg));
    let apex = chain(top);
    let g0 = PMorphism::new(apex.clone(), f.dom_arc().clone(), g0.iter().map(|&p| inv_f[p]).collect())?;
    let g1 = PMorphism::new(apex.clone(), g.dom_arc().clone(), g1.iter().map(|&p| inv_g[p]).collect())?;
    Ok(Coamalgamation { apex, g0, g1, route: Route::Chain })
}

/// Returns `(t, g0, g1)` with `g0: [t] → [n]`, `g1: [t] → [m]`.
fn chain_step(n: usize, m: usize, k: usize, f: &[World], g: &[World]) -> (usize, Vec<World>, Vec<World>) {
    if n == k {
        // A surjection between chains of equal length is the identity.
        return (m, g.to_vec(), (0..m).collect());
    }
    // The first place where `f` collapses two neighbours.
    let i = (0..n - 1).find(|&x| f[x] == f[x + 1]).unwrap();
    if n - k == 1 {
        let j = (0..m).filter(|&y| g[y] == f[i]).max().unwrap();
        let f_bar: Vec<World> = (0..=m).map(|y| if y <= j { y } else { y - 1 }).collect();
        let g_bar: Vec<World> = (0..=m).map(|y| if y <= j { g[y] } else { g[y - 1] + 1 }).collect();
        return (m + 1, g_bar, f_bar);
    }
    // Factor f as [n] → [n-1] → [k], collapsing the first pair.
    let first: Vec<World> = (0..n).map(|y| if y <= i { y } else { y - 1 }).collect();
    let second: Vec<World> = (0..n - 1).map(|z| if z <= i { f[z] } else { f[z + 1] }).collect();
    let (t, a0, a1) = chain_step(n - 1, m, k, &second, g);
    let (s, b0, b1) = chain_step(n, t, n - 1, &first, &a0);
    let g1 = b1.iter().map(|&x| a1[x]).collect();
    debug_assert_eq!(b0.len(), s);
    (s, b0, g1)
}

/// A set `D` with surjections onto both fibres, of the least possible size.
///
/// Returns `(|D|, d0, d1)`. Over each base point the `i`-th elements of the two fibres are
/// paired, reusing the last element of the shorter fibre.
pub fn set_coamalgamation(s0: &[usize], s1: &[usize], base: usize, size_cap: Option<usize>) -> Result<(usize, Vec<usize>, Vec<usize>)> {
    let fibres = |s: &[usize]| {
        let mut out = vec![Vec::new(); base];
        for (x, &c) in s.iter().enumerate() {
            out[c].push(x);
        }
        out
    };
    let (f0, f1) = (fibres(s0), fibres(s1));
    if f0.iter().chain(&f1).any(|f| f.is_empty()) {
        return Err(Error::Precondition("set coamalgamation needs surjections".into()));
    }
    let (mut d0, mut d1) = (Vec::new(), Vec::new());
    for c in 0..base {
        let (a, b) = (&f0[c], &f1[c]);
        for i in 0..a.len().max(b.len()) {
            d0.push(a[i.min(a.len() - 1)]);
            d1.push(b[i.min(b.len() - 1)]);
        }
    }
    if let Some(cap) = size_cap {
        if d0.len() > cap {
            return Err(Error::BudgetExceeded(format!("a cluster of {} worlds is needed but the cap is {cap}", d0.len())));
        }
    }
    Ok((d0.len(), d0, d1))
}

fn cluster_cap(l: &LogicSpec, external: bool) -> Option<usize> {
    match l.bounds.get(if external { Param::Be } else { Param::Bi }) {
        Bound::Finite(n) => Some(n),
        Bound::Omega => None,
    }
}

/// Reflect the cospan to posets, solve there, and inflate every apex point back into a cluster.
pub fn coamalgamate_reflect(c: &Cospan, l: &LogicSpec, budget: Budget) -> Result<Option<Coamalgamation>> {
    require_surjective(c)?;
    require_s4(l)?;
    let (rw0, r0) = c.f0.dom().posetal_reflection()?;
    let (rw1, r1) = c.f1.dom().posetal_reflection()?;
    let (rv, rv_map) = c.f0.cod().posetal_reflection()?;
    let lift = |f: &PMorphism, r: &PMorphism, rw: &Frame| -> Result<PMorphism> {
        let mut map = vec![0; rw.size()];
        for w in f.dom().worlds() {
            map[r.apply(w)] = rv_map.apply(f.apply(w));
        }
        PMorphism::new(rw.clone(), rv.clone(), map)
    };
    let reflected = Cospan::new(lift(&c.f0, &r0, &rw0)?, lift(&c.f1, &r1, &rw1)?)?;
    let lp = (*l).with(Param::Be, 1).with(Param::Bi, 1);
    let inner = match coamalgamate_horn(&reflected, &lp)? {
        Some(s) => Some(s),
        None => match coamalgamate_chain(&reflected.f0, &reflected.f1) {
            Ok(s) => Some(s),
            Err(_) => coamalgamate_bruteforce(&reflected, &lp, reflected.f0.dom().size() + reflected.f1.dom().size(), budget)?,
        },
    };
    let Some(inner) = inner else { return Ok(None) };
    let u = &inner.apex;
    let depths = u.depths()?;
    let members = |r: &PMorphism, class: World| -> Vec<World> { r.dom().worlds().filter(|&w| r.apply(w) == class).collect() };
    // Each apex point becomes a block of pairs (w0, w1).
    let mut blocks: Vec<Vec<(World, World)>> = Vec::with_capacity(u.size());
    for x in u.worlds() {
        let k0 = members(&r0, inner.g0.apply(x));
        let k1 = members(&r1, inner.g1.apply(x));
        // A cluster need not map onto its image cluster; the two images must then agree.
        let image = |k: &[World], f: &PMorphism| {
            let mut out: Vec<World> = k.iter().map(|&w| f.apply(w)).collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let base = image(&k0, &c.f0);
        if base != image(&k1, &c.f1) {
            return Ok(None);
        }
        let index = |v: World| base.iter().position(|&b| b == v).unwrap();
        let s0: Vec<usize> = k0.iter().map(|&w| index(c.f0.apply(w))).collect();
        let s1: Vec<usize> = k1.iter().map(|&w| index(c.f1.apply(w))).collect();
        let cap = cluster_cap(l, depths[x] == 1);
        let (_, d0, d1) = match set_coamalgamation(&s0, &s1, base.len(), cap) {
            Ok(d) => d,
            Err(Error::BudgetExceeded(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        blocks.push(d0.iter().zip(&d1).map(|(&a, &b)| (k0[a], k1[b])).collect());
    }
    let owner: Vec<World> = blocks.iter().enumerate().flat_map(|(x, b)| std::iter::repeat_n(x, b.len())).collect();
    let points: Vec<(World, World)> = blocks.concat();
    let apex = Frame::from_fn(points.len(), |a, b| u.related(owner[a], owner[b]));
    let g0 = PMorphism::new(apex.clone(), c.f0.dom_arc().clone(), points.iter().map(|p| p.0).collect())?;
    let g1 = PMorphism::new(apex.clone(), c.f1.dom_arc().clone(), points.iter().map(|p| p.1).collect())?;
    let (refl, _) = apex.posetal_reflection()?;
    if !refl.is_isomorphic(u) {
        return Err(Error::Precondition("inflated apex does not reflect back onto the poset solution".into()));
    }
    let out = Coamalgamation { apex, g0, g1, route: Route::Reflect };
    Ok(out.validate(c, l).is_ok().then_some(out))
}

/// A solver for a single cospan.
pub type Solver<'a> = dyn Fn(&Cospan, &LogicSpec) -> Result<Option<Coamalgamation>> + 'a;

/// Solve the rooted cospan above every pair `f₀(w₀) = f₁(w₁)` and take the disjoint union.
pub fn amalgamate_rooted_reduction(c: &Cospan, l: &LogicSpec, inner: &Solver) -> Result<Option<Coamalgamation>> {
    require_surjective(c)?;
    let (w0, w1, v) = (c.f0.dom_arc(), c.f1.dom_arc(), c.f0.cod_arc());
    let mut pieces = Vec::new();
    for a in w0.worlds() {
        for b in w1.worlds().filter(|&b| c.f0.apply(a) == c.f1.apply(b)) {
            let sub = |f: &Arc<Frame>, w: World| -> Result<PMorphism> { PMorphism::inclusion(f.clone(), &f.star(w)?) };
            let (i0, i1, iv) = (sub(w0, a)?, sub(w1, b)?, sub(v, c.f0.apply(a))?);
            let restrict = |f: &PMorphism, i: &PMorphism| -> Result<PMorphism> {
                let map = i.map().iter().map(|&w| iv.map().iter().position(|&x| x == f.apply(w)).unwrap()).collect();
                PMorphism::new(i.dom_arc().clone(), iv.dom_arc().clone(), map)
            };
            let piece = Cospan::new(restrict(&c.f0, &i0)?, restrict(&c.f1, &i1)?)?;
            let Some(solved) = inner(&piece, l)? else { return Ok(None) };
            pieces.push((solved, i0, i1));
        }
    }
    let (apex, inj) = coproduct(&pieces.iter().map(|p| p.0.apex.clone()).collect::<Vec<_>>());
    let (mut g0, mut g1) = (vec![0; apex.size()], vec![0; apex.size()]);
    for ((solved, i0, i1), j) in pieces.iter().zip(&inj) {
        for x in solved.apex.worlds() {
            g0[j.apply(x)] = i0.apply(solved.g0.apply(x));
            g1[j.apply(x)] = i1.apply(solved.g1.apply(x));
        }
    }
    let g0 = PMorphism::new(apex.clone(), w0.clone(), g0)?;
    let g1 = PMorphism::new(apex.clone(), w1.clone(), g1)?;
    let out = Coamalgamation { apex, g0, g1, route: Route::Rooted };
    out.validate(c, l)?;
    Ok(Some(out))
}

/// Exhaustive search over frames of `l` with at most `max_size` worlds; the first hit wins.
pub fn coamalgamate_bruteforce(c: &Cospan, l: &LogicSpec, max_size: usize, budget: Budget) -> Result<Option<Coamalgamation>> {
    require_surjective(c)?;
    require_s4(l)?;
    let (w0, w1) = (c.f0.dom(), c.f1.dom());
    let start = w0.size().max(w1.size());
    if max_size < start {
        return Ok(None);
    }
    let keep = |f: &Frame| frame_in_logic(l, f);
    let levels = census::logic_frames(max_size, &keep)?;
    bruteforce_over(c, &levels, budget)
}

fn bruteforce_over(c: &Cospan, levels: &[Vec<Frame>], budget: Budget) -> Result<Option<Coamalgamation>> {
    let (w0, w1) = (c.f0.dom(), c.f1.dom());
    let start = w0.size().max(w1.size());
    let mut preimage = vec![Vec::new(); c.f0.cod().size()];
    for w in w1.worlds() {
        preimage[c.f1.apply(w)].push(w);
    }
    // One meter across the whole search, so a small budget bounds the total work.
    let mut meter = budget.meter("coamalgamation search");
    for level in levels.iter().skip(start) {
        for u in level {
            meter.tick()?;
            for g0 in enumerate_maps(u, w0, true, budget)? {
                meter.tick()?;
                let mut search = MorphismSearch::new(u, w1).surjective(true);
                for x in u.worlds() {
                    search = search.restrict_world(x, &preimage[c.f0.apply(g0[x])]);
                }
                let mut hit = None;
                search.run(budget, &mut |g1| {
                    hit = Some(g1.to_vec());
                    true
                })?;
                if let Some(g1) = hit {
                    let apex = u.clone();
                    let g0 = PMorphism::new(apex.clone(), c.f0.dom_arc().clone(), g0)?;
                    let g1 = PMorphism::new(apex.clone(), c.f1.dom_arc().clone(), g1)?;
                    return Ok(Some(Coamalgamation { apex, g0, g1, route: Route::Bruteforce }));
                }
            }
        }
    }
    Ok(None)
}

/// Try the solvers in order: horn, chain, reflect, brute force.
pub fn coamalgamate(c: &Cospan, l: &LogicSpec, max_size: usize, budget: Budget) -> Result<Option<Coamalgamation>> {
    coamalgamate_with(c, l, max_size, budget, None)
}

/// Census of a logic up to a fixed size, built on first use.
struct LazyCensus<'a> {
    logic: &'a LogicSpec,
    size: usize,
    levels: Option<Vec<Vec<Frame>>>,
}

impl LazyCensus<'_> {
    fn get(&mut self) -> Result<&[Vec<Frame>]> {
        if self.levels.is_none() {
            let keep = |f: &Frame| frame_in_logic(self.logic, f);
            self.levels = Some(census::logic_frames(self.size, &keep)?);
        }
        Ok(self.levels.as_deref().unwrap())
    }
}

fn coamalgamate_with(
    c: &Cospan,
    l: &LogicSpec,
    max_size: usize,
    budget: Budget,
    census: Option<&mut LazyCensus<'_>>,
) -> Result<Option<Coamalgamation>> {
    if let Some(s) = coamalgamate_horn(c, l)? {
        return Ok(Some(s));
    }
    if let Ok(s) = coamalgamate_chain(&c.f0, &c.f1) {
        if s.validate(c, l).is_ok() {
            return Ok(Some(s));
        }
    }
    if let Some(s) = coamalgamate_reflect(c, l, budget)? {
        return Ok(Some(s));
    }
    match census {
        Some(census) if max_size <= census.size => {
            require_surjective(c)?;
            if max_size < c.f0.dom().size().max(c.f1.dom().size()) {
                return Ok(None);
            }
            bruteforce_over(c, &census.get()?[..=max_size], budget)
        }
        _ => coamalgamate_bruteforce(c, l, max_size, budget),
    }
}

/// Outcome of trying every rooted cospan of surjections within a size bound.
#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub cospans: usize,
    pub solved: BTreeMap<Route, usize>,
    pub failures: Vec<Cospan>,
    pub over_budget: Vec<Cospan>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.over_budget.is_empty()
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cospans", self.cospans)?;
        for (route, n) in &self.solved {
            write!(f, ", {route}: {n}")?;
        }
        write!(f, ", unsolved: {}, over budget: {}", self.failures.len(), self.over_budget.len())
    }
}

/// Rooted frames of `l` with at most `size_bound` worlds.
pub fn rooted_frames(l: &LogicSpec, size_bound: usize) -> Result<Vec<Frame>> {
    let keep = |f: &Frame| frame_in_logic(l, f);
    let levels = census::logic_frames(size_bound, &keep)?;
    Ok(levels.iter().flat_map(|level| level.iter().filter(|f| f.is_rooted()).cloned()).collect())
}

pub fn audit_amalgamability(l: &LogicSpec, size_bound: usize, budget: Budget) -> Result<AuditReport> {
    require_s4(l)?;
    let frames = rooted_frames(l, size_bound)?;
    let mut census = LazyCensus { logic: l, size: (2 * size_bound).min(census::MAX_CANONICAL), levels: None };
    let mut report = AuditReport::default();
    for v in &frames {
        let mut legs = Vec::new();
        for w in frames.iter().filter(|w| w.size() >= v.size()) {
            legs.extend(crate::pmorph::enumerate_pmorphisms(w, v, true, budget)?);
        }
        for f0 in &legs {
            for f1 in &legs {
                let c = Cospan::new(f0.clone(), f1.clone())?;
                report.cospans += 1;
                match coamalgamate_with(&c, l, f0.dom().size() + f1.dom().size(), budget, Some(&mut census)) {
                    Ok(Some(s)) => {
                        s.validate(&c, l)?;
                        *report.solved.entry(s.route).or_default() += 1;
                    }
                    Ok(None) => report.failures.push(c),
                    Err(Error::BudgetExceeded(_)) => report.over_budget.push(c),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_core::{cluster, copies, fork};
    use crate::logic::Base;
    use crate::pmorph::enumerate_pmorphisms;
    use proptest::prelude::*;

    fn spec(s: &str) -> LogicSpec {
        s.parse().unwrap()
    }

    fn surjections(w: &Frame, v: &Frame) -> Vec<PMorphism> {
        enumerate_pmorphisms(w, v, true, Budget::default()).unwrap()
    }

    fn chain_cospans(limit: usize) -> Vec<Cospan> {
        let mut out = Vec::new();
        for k in 1..=limit {
            for n in k..=limit {
                for m in k..=limit {
                    for f in surjections(&chain(n), &chain(k)) {
                        for g in surjections(&chain(m), &chain(k)) {
                            out.push(Cospan::new(f.clone(), g).unwrap());
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn horn_route() {
        let f = surjections(&cluster(2), &chain(1)).remove(0);
        let c = Cospan::new(f.clone(), f).unwrap();
        let s4 = LogicSpec::new(Base::S4);
        let s = coamalgamate_horn(&c, &s4).unwrap().unwrap();
        s.validate(&c, &s4).unwrap();
        assert_eq!(s.apex, cluster(4));
        assert!(coamalgamate_horn(&c, &spec("S5+be1")).unwrap().is_none());
        // Two chains collapsing onto a point: the pullback is the square, a poset.
        let g = surjections(&chain(2), &chain(1)).remove(0);
        let c = Cospan::new(g.clone(), g).unwrap();
        assert!(coamalgamate_horn(&c, &spec("Grz")).unwrap().is_some());
        // Not antisymmetric: C2 over [1] squared.
        let h = surjections(&cluster(2), &chain(1)).remove(0);
        let c = Cospan::new(h.clone(), h).unwrap();
        assert!(coamalgamate_horn(&c, &spec("S4+bi1+be1")).unwrap().is_none());
    }

    #[test]
    fn chain_examples() {
        // [3] → [2] collapsing the two upper points, against the identity.
        let f = PMorphism::new(chain(3), chain(2), vec![0, 1, 1]).unwrap();
        let g = PMorphism::identity(chain(2));
        let s = coamalgamate_chain(&f, &g).unwrap();
        assert_eq!(s.apex, chain(3));
        assert_eq!(s.g0.map(), &[0, 1, 2]);
        assert_eq!(s.g1.map(), &[0, 1, 1]);
        let id = PMorphism::identity(chain(2));
        let s = coamalgamate_chain(&id, &f).unwrap();
        assert_eq!(s.apex, chain(3));
        assert!(coamalgamate_chain(&PMorphism::identity(cluster(2)), &PMorphism::identity(cluster(2))).is_err());
    }

    #[test]
    fn chain_solver_on_all_small_cospans() {
        let grz3 = spec("Grz.3");
        for c in chain_cospans(5) {
            let s = coamalgamate_chain(&c.f0, &c.f1).unwrap();
            s.validate(&c, &grz3).unwrap();
            let (n, m, k) = (c.f0.dom().size(), c.f1.dom().size(), c.f0.cod().size());
            assert!(s.apex.size() <= n + m - k);
        }
    }

    #[test]
    fn chain_agrees_with_bruteforce() {
        let grz3 = spec("Grz.3");
        for c in chain_cospans(4) {
            let s = coamalgamate_chain(&c.f0, &c.f1).unwrap();
            let b = coamalgamate_bruteforce(&c, &grz3, s.apex.size(), Budget::default()).unwrap();
            let b = b.expect("the brute-force oracle finds a chain of the same size");
            b.validate(&c, &grz3).unwrap();
            assert!(b.apex.size() <= s.apex.size());
        }
    }

    #[test]
    fn set_coamalgamation_examples() {
        assert_eq!(set_coamalgamation(&[0, 1], &[1, 0], 2, None).unwrap(), (2, vec![0, 1], vec![1, 0]));
        assert_eq!(set_coamalgamation(&[0, 0], &[0], 1, None).unwrap().0, 2);
        assert!(set_coamalgamation(&[0, 0, 0], &[0], 1, Some(2)).is_err());
        assert!(set_coamalgamation(&[0, 0], &[0, 0], 1, Some(2)).is_ok());
    }

    /// Smallest `D` by exhaustive search over relations between the two fibres.
    fn smallest_set_coamalgamation(s0: &[usize], s1: &[usize], base: usize) -> usize {
        let pairs: Vec<(usize, usize)> = (0..s0.len())
            .flat_map(|a| (0..s1.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| s0[a] == s1[b])
            .collect();
        let _ = base;
        (1u32..1 << pairs.len())
            .filter(|mask| {
                let chosen: Vec<_> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
                (0..s0.len()).all(|a| chosen.iter().any(|p| p.0 == a)) && (0..s1.len()).all(|b| chosen.iter().any(|p| p.1 == b))
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    proptest! {
        #[test]
        fn set_coamalgamation_is_minimal(f0 in prop::collection::vec(1usize..4, 1..3), f1 in prop::collection::vec(1usize..4, 1..3)) {
            let base = f0.len().min(f1.len());
            let expand = |fib: &[usize]| fib.iter().take(base).enumerate().flat_map(|(c, &k)| std::iter::repeat_n(c, k)).collect::<Vec<_>>();
            let (s0, s1) = (expand(&f0), expand(&f1));
            let (size, d0, d1) = set_coamalgamation(&s0, &s1, base, None).unwrap();
            prop_assert_eq!(size, smallest_set_coamalgamation(&s0, &s1, base));
            for i in 0..size {
                prop_assert_eq!(s0[d0[i]], s1[d1[i]]);
            }
        }
    }

    #[test]
    fn reflect_examples() {
        // Cluster collapses over a point inflate to one cluster of minimal size.
        let f = surjections(&cluster(2), &chain(1)).remove(0);
        let g = surjections(&cluster(3), &chain(1)).remove(0);
        let c = Cospan::new(f, g).unwrap();
        let s5 = spec("S5");
        let s = coamalgamate_reflect(&c, &s5, Budget::default()).unwrap().unwrap();
        assert_eq!(s.apex, cluster(3));
        // With clusters of at most two worlds the cap of two is respected.
        let h = surjections(&cluster(2), &chain(1)).remove(0);
        let c = Cospan::new(h.clone(), h).unwrap();
        let s = coamalgamate_reflect(&c, &spec("S5+be2"), Budget::default()).unwrap().unwrap();
        assert_eq!(s.apex, cluster(2));
        // Chains reflect to themselves and go through the chain solver.
        let f = PMorphism::new(chain(3), chain(2), vec![0, 0, 1]).unwrap();
        let c = Cospan::new(f.clone(), f).unwrap();
        let s = coamalgamate_reflect(&c, &spec("Grz.3"), Budget::default()).unwrap().unwrap();
        s.validate(&c, &spec("Grz.3")).unwrap();
    }

    #[test]
    fn rooted_reduction_assembles_pieces() {
        let s4 = LogicSpec::new(Base::S4);
        let w = copies(2, &chain(1));
        let f = PMorphism::new(w.clone(), chain(1), vec![0, 0]).unwrap();
        let c = Cospan::new(f.clone(), f).unwrap();
        let inner = |c: &Cospan, l: &LogicSpec| coamalgamate_horn(c, l);
        let s = amalgamate_rooted_reduction(&c, &s4, &inner).unwrap().unwrap();
        assert_eq!(s.apex.size(), 4);
        let f = PMorphism::new(fork(2), chain(2), vec![0, 1, 1]).unwrap();
        let c = Cospan::new(f.clone(), f).unwrap();
        let s = amalgamate_rooted_reduction(&c, &s4, &inner).unwrap().unwrap();
        s.validate(&c, &s4).unwrap();
    }

    #[test]
    fn fork_cospans_need_no_wider_apex() {
        // Depth-two posets of width at most two coamalgamate within forks of width two.
        let l = spec("Grz+bd2+bw2");
        let forks = [chain(1), chain(2), fork(2)];
        for v in &forks {
            for a in &forks {
                for b in &forks {
                    for f0 in surjections(a, v) {
                        for f1 in surjections(b, v) {
                            let c = Cospan::new(f0.clone(), f1).unwrap();
                            let s = coamalgamate_bruteforce(&c, &l, 3, Budget::default()).unwrap();
                            assert!(s.is_some(), "{c:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn audits() {
        let b = Budget::default();
        let grz3 = audit_amalgamability(&spec("Grz.3"), 4, b).unwrap();
        assert!(grz3.passed(), "{grz3}");
        assert_eq!(grz3.solved.get(&Route::Horn).copied().unwrap_or(0) + grz3.solved.get(&Route::Chain).copied().unwrap_or(0), grz3.cospans);
        let s5 = audit_amalgamability(&spec("S5+be2"), 4, b).unwrap();
        assert!(s5.passed(), "{s5}");
        let none = audit_amalgamability(&LogicSpec::inconsistent(), 4, b).unwrap();
        assert_eq!(none.cospans, 0);
        assert!(none.passed());
    }

    #[test]
    fn rejects_non_surjective_legs() {
        let f = PMorphism::new(chain(1), chain(2), vec![1]).unwrap();
        let c = Cospan::new(f.clone(), f).unwrap();
        assert!(coamalgamate_horn(&c, &LogicSpec::new(Base::S4)).is_err());
    }
}
