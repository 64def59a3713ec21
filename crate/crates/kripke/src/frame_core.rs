//! Finite Kripke frames and their structural combinatorics.
//!
//! Worlds are dense indices `0..size`. A frame carries no labels; labels only
//! exist in the text format of the command-line tool.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::pmorph::PMorphism;

pub type World = usize;

/// A finite set of worlds with a binary accessibility relation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    size: usize,
    succ: Vec<FixedBitSet>,
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({}; ", self.size)?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

impl Frame {
    /// Builds a frame, rejecting edges that mention missing worlds.
    pub fn new(size: usize, edges: impl IntoIterator<Item = (World, World)>) -> Result<Frame> {
        let mut frame = Frame::discrete(size);
        for (a, b) in edges {
            for w in [a, b] {
                if w >= size {
                    return Err(Error::WorldOutOfRange { world: w, size });
                }
            }
            frame.succ[a].insert(b);
        }
        Ok(frame)
    }

    pub fn from_fn(size: usize, rel: impl Fn(World, World) -> bool) -> Frame {
        let mut frame = Frame::discrete(size);
        for a in 0..size {
            for b in 0..size {
                if rel(a, b) {
                    frame.succ[a].insert(b);
                }
            }
        }
        frame
    }

    /// `size` worlds and no edges.
    pub fn discrete(size: usize) -> Frame {
        Frame { size, succ: vec![FixedBitSet::with_capacity(size); size] }
    }

    pub fn empty() -> Frame {
        Frame::discrete(0)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn related(&self, a: World, b: World) -> bool {
        self.succ[a].contains(b)
    }

    #[inline]
    pub fn successors(&self, w: World) -> &FixedBitSet {
        &self.succ[w]
    }

    pub fn successor_list(&self, w: World) -> Vec<World> {
        self.succ[w].ones().collect()
    }

    pub fn predecessor_list(&self, w: World) -> Vec<World> {
        (0..self.size).filter(|&v| self.related(v, w)).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (World, World)> + '_ {
        (0..self.size).flat_map(move |a| self.succ[a].ones().map(move |b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(|s| s.count_ones(..)).sum()
    }

    pub fn worlds(&self) -> std::ops::Range<World> {
        0..self.size
    }

    pub fn all_worlds(&self) -> WorldSet {
        WorldSet::full(self.size)
    }

    pub(crate) fn check_world(&self, w: World) -> Result<()> {
        if w < self.size {
            Ok(())
        } else {
            Err(Error::WorldOutOfRange { world: w, size: self.size })
        }
    }

    /// Induced subframe on `members`; the second component lists the old index of each new world.
    pub fn restrict(&self, members: &WorldSet) -> (Frame, Vec<World>) {
        let worlds: Vec<World> = members.iter().collect();
        let mut index = vec![usize::MAX; self.size];
        for (i, &w) in worlds.iter().enumerate() {
            index[w] = i;
        }
        let mut sub = Frame::discrete(worlds.len());
        for (i, &w) in worlds.iter().enumerate() {
            for v in self.succ[w].ones() {
                if index[v] != usize::MAX {
                    sub.succ[i].insert(index[v]);
                }
            }
        }
        (sub, worlds)
    }

    // ---- structural predicates ----

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|w| self.related(w, w))
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.size).all(|w| !self.related(w, w))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.size).all(|a| self.succ[a].ones().all(|b| self.succ[b].is_subset(&self.succ[a])))
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(a, b)| self.related(b, a))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.edges().all(|(a, b)| a == b || !self.related(b, a))
    }

    /// `w ≺ v₁` and `w ≺ v₂` imply a common successor of `v₁` and `v₂`.
    pub fn is_confluent(&self) -> bool {
        (0..self.size).all(|w| {
            let succ: Vec<World> = self.succ[w].ones().collect();
            succ.iter().all(|&v1| {
                succ.iter().all(|&v2| self.succ[v1].intersection(&self.succ[v2]).next().is_some())
            })
        })
    }

    /// `w ≺ v₁` and `w ≺ v₂` imply `v₁ ≺ v₂`, `v₁ = v₂` or `v₂ ≺ v₁`.
    pub fn is_locally_linear(&self) -> bool {
        (0..self.size).all(|w| {
            let succ: Vec<World> = self.succ[w].ones().collect();
            succ.iter().all(|&v1| {
                succ.iter().all(|&v2| v1 == v2 || self.related(v1, v2) || self.related(v2, v1))
            })
        })
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn has_property(&self, p: Property) -> bool {
        match p {
            Property::Reflexive => self.is_reflexive(),
            Property::Transitive => self.is_transitive(),
            Property::Irreflexive => self.is_irreflexive(),
            Property::Confluent => self.is_confluent(),
            Property::LocallyLinear => self.is_locally_linear(),
            Property::Antisymmetric => self.is_antisymmetric(),
            Property::EquivalenceRelation => self.is_equivalence(),
        }
    }

    /// True iff some world sees the whole frame. The empty frame is not rooted.
    pub fn is_rooted(&self) -> bool {
        (0..self.size).any(|w| self.star_bits(w).count_ones(..) == self.size)
    }

    // ---- cones and generated subframes ----

    /// Immediate successors of `w`.
    pub fn up_set(&self, w: World) -> Result<WorldSet> {
        self.check_world(w)?;
        Ok(WorldSet { members: self.succ[w].clone() })
    }

    /// Reflexive-transitive reachability set of `w`.
    pub fn star(&self, w: World) -> Result<WorldSet> {
        self.check_world(w)?;
        Ok(WorldSet { members: self.star_bits(w) })
    }

    pub(crate) fn star_bits(&self, w: World) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.size);
        seen.insert(w);
        let mut stack = vec![w];
        while let Some(v) = stack.pop() {
            for u in self.succ[v].ones() {
                if !seen.put(u) {
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Smallest up-closed set containing `seeds`.
    pub fn generated_by(&self, seeds: impl IntoIterator<Item = World>) -> WorldSet {
        let mut seen = FixedBitSet::with_capacity(self.size);
        let mut stack: Vec<World> = Vec::new();
        for s in seeds {
            if !seen.put(s) {
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for u in self.succ[v].ones() {
                if !seen.put(u) {
                    stack.push(u);
                }
            }
        }
        WorldSet { members: seen }
    }

    pub fn is_up_closed(&self, set: &WorldSet) -> bool {
        set.iter().all(|w| self.succ[w].is_subset(&set.members))
    }

    /// All up-closed subsets, including the empty set and the whole frame.
    pub fn generated_subframes(&self) -> Vec<WorldSet> {
        let units = self.reachability_units();
        let mut out = Vec::new();
        let mut chosen = vec![false; units.members.len()];
        enumerate_up_sets(&units, 0, &mut chosen, &mut |chosen| {
            let mut set = WorldSet::new(self.size);
            for (i, &c) in chosen.iter().enumerate() {
                if c {
                    for &w in &units.members[i] {
                        set.insert(w);
                    }
                }
            }
            out.push(set);
        });
        out
    }

    /// Strongly connected components of the reachability preorder, listed so that
    /// every unit comes after all units it can reach.
    fn reachability_units(&self) -> Units {
        let stars: Vec<FixedBitSet> = (0..self.size).map(|w| self.star_bits(w)).collect();
        let mut unit_of = vec![usize::MAX; self.size];
        let mut members: Vec<Vec<World>> = Vec::new();
        for w in 0..self.size {
            if unit_of[w] != usize::MAX {
                continue;
            }
            let id = members.len();
            let group: Vec<World> =
                (w..self.size).filter(|&v| stars[w].contains(v) && stars[v].contains(w)).collect();
            for &v in &group {
                unit_of[v] = id;
            }
            members.push(group);
        }
        // Order units by the size of their cones: a unit strictly reaches only units with smaller cones.
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.sort_by_key(|&u| (stars[members[u][0]].count_ones(..), members[u][0]));
        let members: Vec<Vec<World>> = order.iter().map(|&u| members[u].clone()).collect();
        let mut unit_of = vec![0; self.size];
        for (i, group) in members.iter().enumerate() {
            for &w in group {
                unit_of[w] = i;
            }
        }
        let above: Vec<Vec<usize>> = members
            .iter()
            .enumerate()
            .map(|(i, group)| {
                let mut targets: Vec<usize> = stars[group[0]].ones().map(|v| unit_of[v]).filter(|&u| u != i).collect();
                targets.sort_unstable();
                targets.dedup();
                targets
            })
            .collect();
        Units { members, above }
    }

    // ---- depth and clusters ----

    /// Depth of every world; errors on non-transitive input.
    pub fn depths(&self) -> Result<Vec<usize>> {
        if !self.is_transitive() {
            return Err(Error::NotTransitive);
        }
        let mut depth = vec![0usize; self.size];
        // In a transitive frame the strict part is acyclic; larger cones come later.
        let mut order: Vec<World> = (0..self.size).collect();
        order.sort_by_key(|&w| self.succ[w].count_ones(..));
        for &w in &order {
            let mut best = 0;
            for v in self.succ[w].ones() {
                if !self.related(v, w) {
                    best = best.max(depth[v]);
                }
            }
            depth[w] = best + 1;
        }
        Ok(depth)
    }

    pub fn depth(&self, w: World) -> Result<usize> {
        self.check_world(w)?;
        Ok(self.depths()?[w])
    }

    /// Maximum depth of a world; zero for the empty frame.
    pub fn frame_depth(&self) -> Result<usize> {
        Ok(self.depths()?.into_iter().max().unwrap_or(0))
    }

    pub fn clusters(&self) -> Result<ClusterPartition> {
        let depth = self.depths()?;
        let mut clusters = Vec::new();
        let mut irreflexive = WorldSet::new(self.size);
        let mut placed = FixedBitSet::with_capacity(self.size);
        for w in 0..self.size {
            if placed.contains(w) {
                continue;
            }
            if !self.related(w, w) {
                irreflexive.insert(w);
                placed.insert(w);
                continue;
            }
            let mut members = WorldSet::new(self.size);
            for v in self.succ[w].ones() {
                if self.related(v, w) {
                    members.insert(v);
                    placed.insert(v);
                }
            }
            clusters.push(Cluster { members, depth: depth[w] });
        }
        Ok(ClusterPartition { size: self.size, clusters, irreflexive_points: irreflexive })
    }

    /// Quotient of a preorder by its clusters, with the projection onto it.
    pub fn posetal_reflection(&self) -> Result<(Frame, PMorphism)> {
        if !self.is_preorder() {
            return Err(Error::Precondition("posetal reflection needs a reflexive transitive frame".into()));
        }
        let partition = self.clusters()?;
        let mut class = vec![0; self.size];
        for (i, c) in partition.clusters.iter().enumerate() {
            for w in c.members.iter() {
                class[w] = i;
            }
        }
        let reps: Vec<World> = partition.clusters.iter().map(|c| c.members.first().unwrap()).collect();
        let quotient = Frame::from_fn(reps.len(), |a, b| self.related(reps[a], reps[b]));
        let map = PMorphism::new(self.clone(), quotient.clone(), class)?;
        Ok((quotient, map))
    }

    // ---- isomorphism ----

    /// Some bijection `m` with `a ≺ b ⟺ m(a) ≺ m(b)`, if one exists.
    pub fn find_isomorphism(&self, other: &Frame) -> Option<Vec<World>> {
        if self.size != other.size || self.edge_count() != other.edge_count() {
            return None;
        }
        let sig = |f: &Frame, w: World| {
            let indeg = (0..f.size).filter(|&v| f.related(v, w)).count();
            (f.related(w, w), f.succ[w].count_ones(..), indeg, f.star_bits(w).count_ones(..))
        };
        let left: Vec<_> = (0..self.size).map(|w| sig(self, w)).collect();
        let right: Vec<_> = (0..other.size).map(|w| sig(other, w)).collect();
        let mut l_sorted = left.clone();
        let mut r_sorted = right.clone();
        l_sorted.sort();
        r_sorted.sort();
        if l_sorted != r_sorted {
            return None;
        }
        let mut map = vec![usize::MAX; self.size];
        let mut used = vec![false; other.size];
        fn go(
            a: &Frame,
            b: &Frame,
            left: &[(bool, usize, usize, usize)],
            right: &[(bool, usize, usize, usize)],
            w: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if w == a.size {
                return true;
            }
            for v in 0..b.size {
                if used[v] || left[w] != right[v] {
                    continue;
                }
                let consistent = (0..w).all(|u| {
                    a.related(u, w) == b.related(map[u], v) && a.related(w, u) == b.related(v, map[u])
                }) && a.related(w, w) == b.related(v, v);
                if !consistent {
                    continue;
                }
                map[w] = v;
                used[v] = true;
                if go(a, b, left, right, w + 1, map, used) {
                    return true;
                }
                used[v] = false;
            }
            false
        }
        go(self, other, &left, &right, 0, &mut map, &mut used).then_some(map)
    }

    pub fn is_isomorphic(&self, other: &Frame) -> bool {
        self.find_isomorphism(other).is_some()
    }

    /// Applies a bijection of worlds: world `w` becomes `perm[w]`.
    pub fn permuted(&self, perm: &[World]) -> Frame {
        let mut out = Frame::discrete(self.size);
        for (a, b) in self.edges() {
            out.succ[perm[a]].insert(perm[b]);
        }
        out
    }
}

struct Units {
    members: Vec<Vec<World>>,
    above: Vec<Vec<usize>>,
}

fn enumerate_up_sets(units: &Units, i: usize, chosen: &mut Vec<bool>, emit: &mut dyn FnMut(&[bool])) {
    if i == units.members.len() {
        emit(chosen);
        return;
    }
    chosen[i] = false;
    enumerate_up_sets(units, i + 1, chosen, emit);
    if units.above[i].iter().all(|&u| chosen[u]) {
        chosen[i] = true;
        enumerate_up_sets(units, i + 1, chosen, emit);
        chosen[i] = false;
    }
}

/// First-order frame conditions accepted by [`check_property`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    Reflexive,
    Transitive,
    Irreflexive,
    Confluent,
    LocallyLinear,
    Antisymmetric,
    EquivalenceRelation,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Reflexive,
        Property::Transitive,
        Property::Irreflexive,
        Property::Confluent,
        Property::LocallyLinear,
        Property::Antisymmetric,
        Property::EquivalenceRelation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Reflexive => "reflexive",
            Property::Transitive => "transitive",
            Property::Irreflexive => "irreflexive",
            Property::Confluent => "confluent",
            Property::LocallyLinear => "locally-linear",
            Property::Antisymmetric => "antisymmetric",
            Property::EquivalenceRelation => "equivalence-relation",
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProperty(s.to_string()))
    }
}

pub fn check_property(f: &Frame, name: &str) -> Result<bool> {
    Ok(f.has_property(name.parse()?))
}

/// A set of worlds of a frame with `universe` worlds.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WorldSet {
    members: FixedBitSet,
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl WorldSet {
    pub fn new(universe: usize) -> WorldSet {
        WorldSet { members: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> WorldSet {
        let mut members = FixedBitSet::with_capacity(universe);
        members.insert_range(..);
        WorldSet { members }
    }

    pub fn from_worlds(universe: usize, worlds: impl IntoIterator<Item = World>) -> WorldSet {
        let mut set = WorldSet::new(universe);
        for w in worlds {
            set.insert(w);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, w: World) -> bool {
        self.members.contains(w)
    }

    pub fn insert(&mut self, w: World) {
        self.members.insert(w);
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn first(&self) -> Option<World> {
        self.members.ones().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = World> + '_ {
        self.members.ones()
    }

    pub fn to_vec(&self) -> Vec<World> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        let mut members = self.members.clone();
        members.union_with(&other.members);
        WorldSet { members }
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub members: WorldSet,
    pub depth: usize,
}

impl Cluster {
    pub fn is_external(&self) -> bool {
        self.depth == 1
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Clusters (maximal sets on which the relation is total) and the irreflexive points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    size: usize,
    pub clusters: Vec<Cluster>,
    pub irreflexive_points: WorldSet,
}

impl ClusterPartition {
    pub fn cluster_of(&self, w: World) -> Option<usize> {
        self.clusters.iter().position(|c| c.members.contains(w))
    }

    pub fn frame_size(&self) -> usize {
        self.size
    }
}

// ---- constructors ----

/// Named frame constructions.
#[derive(Debug, Clone)]
pub enum Construction {
    /// `Cₙ`: one cluster of `n` worlds.
    Cluster(usize),
    /// `[n]`: the reflexive chain; world 0 is the root.
    Chain(usize),
    /// `[n]′`: the irreflexive chain.
    StrictChain(usize),
    /// `W⁺`: a new reflexive root, placed at index 0.
    AddRoot(Frame),
    /// `W⁻`: a new reflexive final world, placed last.
    AddFinal(Frame),
    DisjointSum(Vec<Frame>),
    /// `kW`: `k` disjoint copies; empty for `k = 0`.
    Copies(usize, Frame),
}

pub fn construct(kind: Construction) -> Frame {
    match kind {
        Construction::Cluster(n) => cluster(n),
        Construction::Chain(n) => chain(n),
        Construction::StrictChain(n) => strict_chain(n),
        Construction::AddRoot(w) => add_root(&w),
        Construction::AddFinal(w) => add_final(&w),
        Construction::DisjointSum(ws) => ws.iter().fold(Frame::empty(), |acc, w| disjoint_sum(&acc, w)),
        Construction::Copies(k, w) => copies(k, &w),
    }
}

pub fn cluster(n: usize) -> Frame {
    Frame::from_fn(n, |_, _| true)
}

pub fn chain(n: usize) -> Frame {
    Frame::from_fn(n, |a, b| a <= b)
}

pub fn strict_chain(n: usize) -> Frame {
    Frame::from_fn(n, |a, b| a < b)
}

pub fn add_root(w: &Frame) -> Frame {
    let n = w.size() + 1;
    Frame::from_fn(n, |a, b| a == 0 || (b > 0 && w.related(a - 1, b - 1)))
}

pub fn add_final(w: &Frame) -> Frame {
    let n = w.size();
    Frame::from_fn(n + 1, |a, b| b == n || (a < n && b < n && w.related(a, b)))
}

pub fn disjoint_sum(a: &Frame, b: &Frame) -> Frame {
    let n = a.size();
    Frame::from_fn(n + b.size(), |x, y| match (x < n, y < n) {
        (true, true) => a.related(x, y),
        (false, false) => b.related(x - n, y - n),
        _ => false,
    })
}

pub fn copies(k: usize, w: &Frame) -> Frame {
    (0..k).fold(Frame::empty(), |acc, _| disjoint_sum(&acc, w))
}

/// `(n[1])⁺`: a reflexive root below `n` incomparable reflexive worlds.
pub fn fork(n: usize) -> Frame {
    add_root(&copies(n, &chain(1)))
}

// ---- finite duality ----

/// The complex algebra of a frame: all subsets of the worlds with `◇`.
///
/// Subsets are bitmasks; the table stores `◇X` for every `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalAlgebraFin {
    atoms: usize,
    diamond: Vec<u64>,
}

const MAX_ALGEBRA_ATOMS: usize = 20;

impl ModalAlgebraFin {
    /// Wraps an explicit `◇` table; `table.len()` must be `2^atoms`.
    pub fn from_table(atoms: usize, table: Vec<u64>) -> Result<Self> {
        if atoms > MAX_ALGEBRA_ATOMS || table.len() != 1usize << atoms {
            return Err(Error::Precondition("carrier is not the powerset of its atoms".into()));
        }
        Ok(ModalAlgebraFin { atoms, diamond: table })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn carrier_size(&self) -> usize {
        self.diamond.len()
    }

    pub fn top(&self) -> u64 {
        if self.atoms == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms) - 1
        }
    }

    pub fn bottom(&self) -> u64 {
        0
    }

    pub fn diamond(&self, x: u64) -> u64 {
        self.diamond[x as usize]
    }

    pub fn boxed(&self, x: u64) -> u64 {
        self.top() & !self.diamond(self.top() & !x)
    }

    pub fn is_normal(&self) -> bool {
        self.diamond(0) == 0
    }

    pub fn is_additive(&self) -> bool {
        let n = self.diamond.len() as u64;
        (0..n).all(|x| (0..n).all(|y| self.diamond(x | y) == self.diamond(x) | self.diamond(y)))
    }
}

pub fn complex_algebra(f: &Frame) -> Result<ModalAlgebraFin> {
    if f.size() > MAX_ALGEBRA_ATOMS {
        return Err(Error::BudgetExceeded("building a complex algebra".into()));
    }
    let single: Vec<u64> = (0..f.size())
        .map(|b| (0..f.size()).filter(|&a| f.related(a, b)).fold(0u64, |m, a| m | 1 << a))
        .collect();
    let mut table = vec![0u64; 1 << f.size()];
    for x in 1..table.len() {
        let low = x.trailing_zeros() as usize;
        table[x] = table[x & (x - 1)] | single[low];
    }
    ModalAlgebraFin::from_table(f.size(), table)
}

/// The frame of atoms: `a ≺ b` iff `{a} ≤ ◇{b}`.
pub fn atom_frame(a: &ModalAlgebraFin) -> Result<Frame> {
    if !a.is_normal() || !a.is_additive() {
        return Err(Error::Precondition("diamond is not a normal additive operator".into()));
    }
    Ok(Frame::from_fn(a.atoms, |x, y| a.diamond(1 << y) & (1 << x) != 0))
}
