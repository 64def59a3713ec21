//! Binary products of finite preorders, built level by level.
//!
//! Level `n+1` adds one fresh cluster `{(y, Y, G) | y ∈ Y}` for every admissible pair `(Y, G)`:
//! `Y ⊆ W₀ × W₁` nonempty, `G` an up-closed subset of level `n` holding a point of depth `n`,
//! with `↑πᵢ(y) = πᵢ(Y) ∪ pᵢ(G)` for each `y ∈ Y`, and `Y` not already realised by the points
//! whose cone is exactly `G`. World indices are positional: level `n` is a prefix of level `n+1`.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::frame_core::{Frame, World, WorldSet};
use crate::logic::{frame_in_logic, LogicSpec};
use crate::pmorph::PMorphism;

/// A point of the set-product `W₀ × W₁`.
pub type Pair = (World, World);

/// Where a world of a level comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Genealogy {
    /// Already present in the previous level, at the same index.
    Inherited,
    Fresh { y: Pair, cluster: Vec<Pair>, generated: Vec<World> },
}

#[derive(Debug, Clone)]
pub struct ProductLevel {
    pub n: usize,
    pub frame: Arc<Frame>,
    pub p0: PMorphism,
    pub p1: PMorphism,
    pub prev_embedding: PMorphism,
    pub genealogy: Vec<Genealogy>,
    fresh: HashMap<(Vec<World>, Vec<Pair>), World>,
}

impl ProductLevel {
    fn empty(w0: &Arc<Frame>, w1: &Arc<Frame>) -> ProductLevel {
        let frame = Arc::new(Frame::empty());
        ProductLevel {
            n: 0,
            p0: PMorphism::unchecked(frame.clone(), w0.clone(), Vec::new()),
            p1: PMorphism::unchecked(frame.clone(), w1.clone(), Vec::new()),
            prev_embedding: PMorphism::identity(frame.clone()),
            frame,
            genealogy: Vec::new(),
            fresh: HashMap::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.frame.size()
    }

    /// Number of worlds added at this level.
    pub fn fresh_count(&self) -> usize {
        self.genealogy.iter().filter(|g| matches!(g, Genealogy::Fresh { .. })).count()
    }

    pub fn pair(&self, x: World) -> Pair {
        (self.p0.apply(x), self.p1.apply(x))
    }

    /// First world of the fresh cluster for `(Y, G)`, with both sorted.
    pub fn fresh_cluster(&self, generated: &[World], cluster: &[Pair]) -> Option<World> {
        self.fresh.get(&(generated.to_vec(), cluster.to_vec())).copied()
    }
}

/// Limits on the candidate search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductBudget {
    /// Largest number of candidate sets `G` examined per level.
    pub max_candidates: usize,
    /// Keep only fresh points whose star `|Y| + |G|` has at most this many worlds.
    ///
    /// The kept worlds form a generated subframe of the true level, and every cone whose
    /// apex has at most `cap` worlds still mediates into it.
    pub star_cap: Option<usize>,
}

impl Default for ProductBudget {
    fn default() -> Self {
        ProductBudget { max_candidates: 1_000_000, star_cap: None }
    }
}

struct FactorClusters {
    /// For each cluster: its members and the up-set of the cluster.
    clusters: Vec<(FixedBitSet, FixedBitSet)>,
}

impl FactorClusters {
    fn new(w: &Frame) -> Result<Self> {
        let partition = w.clusters()?;
        let clusters = partition
            .clusters
            .iter()
            .map(|c| {
                let first = c.members.first().unwrap();
                (c.members.bits().clone(), w.successors(first).clone())
            })
            .collect();
        Ok(FactorClusters { clusters })
    }

    /// Clusters `K` with `↑K ∖ K ⊆ image ⊆ ↑K`.
    fn compatible(&self, image: &FixedBitSet) -> Vec<usize> {
        (0..self.clusters.len())
            .filter(|&i| {
                let (k, up) = &self.clusters[i];
                image.is_subset(up) && up.difference(k).all(|w| image.contains(w))
            })
            .collect()
    }
}

fn check_factor(w: &Frame) -> Result<()> {
    if !w.is_preorder() {
        return Err(Error::Precondition("product factors must be reflexive and transitive".into()));
    }
    Ok(())
}

/// Levels `X⁰ = ∅` through `X^max_depth` of the product of two finite preorders.
pub fn product_levels(w0: &Frame, w1: &Frame, max_depth: usize, budget: ProductBudget) -> Result<Vec<ProductLevel>> {
    check_factor(w0)?;
    check_factor(w1)?;
    let (a0, a1) = (Arc::new(w0.clone()), Arc::new(w1.clone()));
    let (c0, c1) = (FactorClusters::new(w0)?, FactorClusters::new(w1)?);
    let mut levels = vec![ProductLevel::empty(&a0, &a1)];
    let mut added_at: Vec<usize> = Vec::new();
    for n in 0..max_depth {
        let next = next_level(&levels[n], &added_at, (&a0, &a1), (&c0, &c1), budget)?;
        added_at.resize(next.size(), n + 1);
        levels.push(next);
    }
    Ok(levels)
}

/// Up-closed subsets of `x` containing a point added at level `n`, or just `∅` when `n = 0`.
fn candidate_sets(x: &Frame, added_at: &[usize], n: usize, budget: ProductBudget) -> Result<Vec<FixedBitSet>> {
    if n == 0 {
        return Ok(vec![FixedBitSet::with_capacity(0)]);
    }
    let limit = budget.star_cap.map_or(usize::MAX, |c| c.saturating_sub(1));
    let cones: Vec<&FixedBitSet> = x.worlds().map(|w| x.successors(w)).collect();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut stack = Vec::new();
    for w in x.worlds().filter(|&w| added_at[w] == n) {
        if cones[w].count_ones(..) <= limit && seen.insert(cones[w].clone()) {
            stack.push(cones[w].clone());
        }
    }
    while let Some(g) = stack.pop() {
        if seen.len() > budget.max_candidates {
            return Err(Error::BudgetExceeded(format!("more than {} candidate sets at level {}", budget.max_candidates, n + 1)));
        }
        for w in x.worlds() {
            if g.contains(w) {
                continue;
            }
            let mut h = g.clone();
            h.union_with(cones[w]);
            if h.count_ones(..) <= limit && !seen.contains(&h) {
                seen.insert(h.clone());
                stack.push(h);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn image_bits(map: &PMorphism, set: &FixedBitSet, universe: usize) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(universe);
    for w in set.ones() {
        out.insert(map.apply(w));
    }
    out
}

fn next_level(
    prev: &ProductLevel,
    added_at: &[usize],
    factors: (&Arc<Frame>, &Arc<Frame>),
    clusters: (&FactorClusters, &FactorClusters),
    budget: ProductBudget,
) -> Result<ProductLevel> {
    let n = prev.n;
    let x = &prev.frame;
    let m = x.size();
    // Pairs realised by the points whose cone is exactly a given set.
    let mut realised: HashMap<&FixedBitSet, HashSet<Pair>> = HashMap::new();
    for w in x.worlds() {
        realised.entry(x.successors(w)).or_default().insert(prev.pair(w));
    }
    let mut found: Vec<(Vec<World>, Vec<Pair>)> = Vec::new();
    for g in candidate_sets(x, added_at, n, budget)? {
        let g_bits = if g.len() < m { let mut b = g.clone(); b.grow(m); b } else { g.clone() };
        let img0 = image_bits(&prev.p0, &g_bits, factors.0.size());
        let img1 = image_bits(&prev.p1, &g_bits, factors.1.size());
        let g_size = g_bits.count_ones(..);
        let y_limit = budget.star_cap.map_or(usize::MAX, |c| c.saturating_sub(g_size));
        if y_limit == 0 {
            continue;
        }
        let empty = HashSet::new();
        let excluded = realised.get(&g_bits).unwrap_or(&empty);
        let g_worlds: Vec<World> = g_bits.ones().collect();
        for k0 in clusters.0.compatible(&img0) {
            for k1 in clusters.1.compatible(&img1) {
                let (k0_bits, _) = &clusters.0.clusters[k0];
                let (k1_bits, _) = &clusters.1.clusters[k1];
                let pairs: Vec<Pair> = k0_bits.ones().flat_map(|a| k1_bits.ones().map(move |b| (a, b))).collect();
                if pairs.len() > 20 {
                    return Err(Error::BudgetExceeded("cluster product too large to enumerate".into()));
                }
                let need0: Vec<World> = k0_bits.ones().filter(|&a| !img0.contains(a)).collect();
                let need1: Vec<World> = k1_bits.ones().filter(|&b| !img1.contains(b)).collect();
                for mask in 1u32..(1 << pairs.len()) {
                    if mask.count_ones() as usize > y_limit {
                        continue;
                    }
                    let y: Vec<Pair> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
                    let covers = need0.iter().all(|a| y.iter().any(|p| p.0 == *a))
                        && need1.iter().all(|b| y.iter().any(|p| p.1 == *b));
                    if covers && !y.iter().all(|p| excluded.contains(p)) {
                        found.push((g_worlds.clone(), y));
                    }
                }
            }
        }
    }
    found.sort();

    let total = m + found.iter().map(|(_, y)| y.len()).sum::<usize>();
    let mut succ: Vec<FixedBitSet> = x
        .worlds()
        .map(|w| {
            let mut s = x.successors(w).clone();
            s.grow(total);
            s
        })
        .collect();
    let mut p0: Vec<World> = prev.p0.map().to_vec();
    let mut p1: Vec<World> = prev.p1.map().to_vec();
    let mut genealogy = vec![Genealogy::Inherited; m];
    let mut fresh = HashMap::new();
    for (g, y) in found {
        let base = succ.len();
        let mut row = FixedBitSet::with_capacity(total);
        for &w in &g {
            row.insert(w);
        }
        row.insert_range(base..base + y.len());
        for &pair in &y {
            succ.push(row.clone());
            p0.push(pair.0);
            p1.push(pair.1);
            genealogy.push(Genealogy::Fresh { y: pair, cluster: y.clone(), generated: g.clone() });
        }
        fresh.insert((g, y), base);
    }
    let frame = Arc::new(Frame::from_fn(total, |a, b| succ[a].contains(b)));
    Ok(ProductLevel {
        n: n + 1,
        p0: PMorphism::new(frame.clone(), factors.0.clone(), p0)?,
        p1: PMorphism::new(frame.clone(), factors.1.clone(), p1)?,
        prev_embedding: PMorphism::new(prev.frame.clone(), frame.clone(), (0..m).collect())?,
        frame,
        genealogy,
        fresh,
    })
}

/// Two arrows out of a common apex.
#[derive(Debug, Clone)]
pub struct Cone {
    pub f0: PMorphism,
    pub f1: PMorphism,
}

impl Cone {
    pub fn new(f0: PMorphism, f1: PMorphism) -> Result<Cone> {
        if f0.dom() != f1.dom() {
            return Err(Error::Precondition("cone legs must share the apex".into()));
        }
        Ok(Cone { f0, f1 })
    }

    pub fn apex(&self) -> &Frame {
        self.f0.dom()
    }
}

/// The unique p-morphism from the apex into the last level commuting with the projections.
pub fn mediate(cone: &Cone, levels: &[ProductLevel]) -> Result<PMorphism> {
    let u = cone.apex();
    if !u.is_preorder() {
        return Err(Error::Precondition("cone apex must be reflexive and transitive".into()));
    }
    let top = levels.last().ok_or_else(|| Error::Precondition("no product levels".into()))?;
    if u.frame_depth()? > top.n {
        return Err(Error::Precondition(format!("apex has depth {} but only {} levels were built", u.frame_depth()?, top.n)));
    }
    let x = &top.frame;
    let mut depth_of = vec![0; x.size()];
    for level in levels.iter().skip(1) {
        for (w, g) in level.genealogy.iter().enumerate() {
            if matches!(g, Genealogy::Fresh { .. }) {
                depth_of[w] = level.n;
            }
        }
    }
    let mut partition = u.clusters()?.clusters;
    partition.sort_by_key(|c| c.depth);
    let mut f = vec![usize::MAX; u.size()];
    for c in &partition {
        let mut y: Vec<Pair> = c.members.iter().map(|w| (cone.f0.apply(w), cone.f1.apply(w))).collect();
        y.sort_unstable();
        y.dedup();
        let first = c.members.first().unwrap();
        let mut g: Vec<World> = u.successors(first).ones().filter(|&v| !c.members.contains(v)).map(|v| f[v]).collect();
        g.sort_unstable();
        g.dedup();
        let n = g.iter().map(|&w| depth_of[w]).max().unwrap_or(0);
        let missing = || Error::Precondition("no mediating point: the levels were truncated by the star cap".into());
        if let Some(base) = levels[n + 1].fresh_cluster(&g, &y) {
            for w in c.members.iter() {
                let pair = (cone.f0.apply(w), cone.f1.apply(w));
                f[w] = base + y.iter().position(|&p| p == pair).unwrap();
            }
        } else {
            let target = WorldSet::from_worlds(x.size(), g.iter().copied());
            for w in c.members.iter() {
                let pair = (cone.f0.apply(w), cone.f1.apply(w));
                f[w] = (0..levels[n].size())
                    .find(|&v| x.successors(v) == target.bits() && top.pair(v) == pair)
                    .ok_or_else(missing)?;
            }
        }
    }
    let m = PMorphism::new(cone.f0.dom_arc().clone(), x.clone(), f)?;
    let commutes = u.worlds().all(|w| top.pair(m.apply(w)) == (cone.f0.apply(w), cone.f1.apply(w)));
    if !commutes {
        return Err(Error::Precondition("cone legs do not land in the factors of these levels".into()));
    }
    Ok(m)
}

/// Per level, the worlds whose cone lies in `l`.
pub fn restrict_to_logic(levels: &[ProductLevel], l: &LogicSpec) -> Result<Vec<ProductLevel>> {
    if !l.extends_s4() {
        return Err(Error::UnsupportedLogic(l.to_string()));
    }
    let Some(top) = levels.last() else { return Ok(Vec::new()) };
    let x = &top.frame;
    let mut keep = WorldSet::new(x.size());
    let mut verdict: HashMap<FixedBitSet, bool> = HashMap::new();
    for w in x.worlds() {
        let cone = x.successors(w).clone();
        let ok = *verdict.entry(cone.clone()).or_insert_with(|| {
            let (sub, _) = x.restrict(&WorldSet::from_worlds(x.size(), cone.ones()));
            frame_in_logic(l, &sub)
        });
        if ok {
            keep.insert(w);
        }
    }
    let mut index = vec![usize::MAX; x.size()];
    for (i, w) in keep.iter().enumerate() {
        index[w] = i;
    }
    let mut out: Vec<ProductLevel> = Vec::with_capacity(levels.len());
    for level in levels {
        let worlds: Vec<World> = keep.iter().filter(|&w| w < level.size()).collect();
        let set = WorldSet::from_worlds(level.size(), worlds.iter().copied());
        let (sub, _) = level.frame.restrict(&set);
        let frame = Arc::new(sub);
        let p0 = PMorphism::new(frame.clone(), level.p0.cod_arc().clone(), worlds.iter().map(|&w| level.p0.apply(w)).collect())?;
        let p1 = PMorphism::new(frame.clone(), level.p1.cod_arc().clone(), worlds.iter().map(|&w| level.p1.apply(w)).collect())?;
        let prev_embedding = match out.last() {
            Some(prev) => PMorphism::new(prev.frame.clone(), frame.clone(), (0..prev.size()).collect())?,
            None => PMorphism::identity(frame.clone()),
        };
        let remap = |g: &[World]| g.iter().map(|&v| index[v]).collect::<Vec<_>>();
        let genealogy: Vec<Genealogy> = worlds
            .iter()
            .map(|&w| match &level.genealogy[w] {
                Genealogy::Inherited => Genealogy::Inherited,
                Genealogy::Fresh { y, cluster, generated } => {
                    Genealogy::Fresh { y: *y, cluster: cluster.clone(), generated: remap(generated) }
                }
            })
            .collect();
        let fresh = level
            .fresh
            .iter()
            .filter(|(_, &base)| keep.contains(base))
            .map(|((g, y), &base)| ((remap(g), y.clone()), index[base]))
            .collect();
        out.push(ProductLevel { n: level.n, frame, p0, p1, prev_embedding, genealogy, fresh });
    }
    Ok(out)
}

/// Worlds of depth at most `n`.
pub fn depth_slice(f: &Frame, n: usize) -> Result<WorldSet> {
    let depths = f.depths()?;
    Ok(WorldSet::from_worlds(f.size(), f.worlds().filter(|&w| depths[w] <= n)))
}

/// True when the last level added nothing.
pub fn is_stable(levels: &[ProductLevel]) -> bool {
    levels.len() >= 2 && levels.last().unwrap().fresh_count() == 0
}
