//! Logics as frame classes: a base condition plus bounded parameters.
//!
//! Bounds are checked structurally on every cone `w*`:
//!
//! | bound | constrains                                   |
//! |-------|----------------------------------------------|
//! | `bd`  | depth                                        |
//! | `bw`  | width (largest antichain)                    |
//! | `bf`  | number of final units                        |
//! | `be`  | size of final units                          |
//! | `bi`  | size of non-final units                      |
//!
//! A unit is a cluster or an irreflexive point; irreflexive points count as size 1.

use std::fmt;
use std::str::FromStr;

use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;

use crate::error::{Budget, Error, Result};
use crate::frame_core::{add_final, chain, cluster, copies, fork, Frame, World};
use crate::pmorph::subreduces;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Finite(usize),
    /// No constraint.
    Omega,
}

impl Bound {
    pub fn allows(self, value: usize) -> bool {
        match self {
            Bound::Finite(n) => value <= n,
            Bound::Omega => true,
        }
    }

    pub fn min(self, other: Bound) -> Bound {
        std::cmp::min(self, other)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::Omega => write!(f, "omega"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Bd,
    Bw,
    Bf,
    Be,
    Bi,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::Bd, Param::Bw, Param::Bf, Param::Be, Param::Bi];

    pub fn name(self) -> &'static str {
        match self {
            Param::Bd => "bd",
            Param::Bw => "bw",
            Param::Bf => "bf",
            Param::Be => "be",
            Param::Bi => "bi",
        }
    }

    /// The frame whose subreduction the bound forbids.
    pub fn forbidden_frame(self, n: usize) -> Frame {
        match self {
            Param::Bd => chain(n + 1),
            Param::Bw => fork(n + 1),
            Param::Bf => copies(n + 1, &chain(1)),
            Param::Be => cluster(n + 1),
            Param::Bi => add_final(&cluster(n + 1)),
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Param> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnsupportedLogic(format!("unknown parameter `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    K,
    K4,
    S4,
    S42,
    S43,
    Grz,
    Grz3,
    S5,
    GL,
    GL3,
    Inconsistent,
}

impl Base {
    pub const ALL: [Base; 11] = [
        Base::K,
        Base::K4,
        Base::S4,
        Base::S42,
        Base::S43,
        Base::Grz,
        Base::Grz3,
        Base::S5,
        Base::GL,
        Base::GL3,
        Base::Inconsistent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Base::K => "K",
            Base::K4 => "K4",
            Base::S4 => "S4",
            Base::S42 => "S4.2",
            Base::S43 => "S4.3",
            Base::Grz => "Grz",
            Base::Grz3 => "Grz.3",
            Base::S5 => "S5",
            Base::GL => "GL",
            Base::GL3 => "GL.3",
            Base::Inconsistent => "inconsistent",
        }
    }

    pub fn extends_s4(self) -> bool {
        matches!(self, Base::S4 | Base::S42 | Base::S43 | Base::Grz | Base::Grz3 | Base::S5 | Base::Inconsistent)
    }

    pub fn holds(self, f: &Frame) -> bool {
        match self {
            Base::K => true,
            Base::K4 => f.is_transitive(),
            Base::S4 => f.is_preorder(),
            Base::S42 => f.is_preorder() && f.is_confluent(),
            Base::S43 => f.is_preorder() && f.is_locally_linear(),
            Base::Grz => f.is_preorder() && f.is_antisymmetric(),
            Base::Grz3 => f.is_preorder() && f.is_antisymmetric() && f.is_locally_linear(),
            Base::S5 => f.is_equivalence(),
            Base::GL => f.is_transitive() && f.is_irreflexive(),
            Base::GL3 => f.is_transitive() && f.is_irreflexive() && f.is_locally_linear(),
            Base::Inconsistent => f.is_empty(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bounds {
    pub bd: Bound,
    pub bw: Bound,
    pub bf: Bound,
    pub be: Bound,
    pub bi: Bound,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { bd: Bound::Omega, bw: Bound::Omega, bf: Bound::Omega, be: Bound::Omega, bi: Bound::Omega }
    }
}

impl Bounds {
    pub fn get(&self, p: Param) -> Bound {
        match p {
            Param::Bd => self.bd,
            Param::Bw => self.bw,
            Param::Bf => self.bf,
            Param::Be => self.be,
            Param::Bi => self.bi,
        }
    }

    pub fn get_mut(&mut self, p: Param) -> &mut Bound {
        match p {
            Param::Bd => &mut self.bd,
            Param::Bw => &mut self.bw,
            Param::Bf => &mut self.bf,
            Param::Be => &mut self.be,
            Param::Bi => &mut self.bi,
        }
    }

    fn is_trivial(&self) -> bool {
        *self == Bounds::default()
    }
}

/// A logic from the supported vocabulary: a base and five bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicSpec {
    pub base: Base,
    pub bounds: Bounds,
}

impl LogicSpec {
    pub fn new(base: Base) -> LogicSpec {
        LogicSpec { base, bounds: Bounds::default() }
    }

    pub fn with(mut self, p: Param, n: usize) -> LogicSpec {
        let slot = self.bounds.get_mut(p);
        *slot = (*slot).min(Bound::Finite(n));
        self
    }

    pub fn inconsistent() -> LogicSpec {
        LogicSpec::new(Base::Inconsistent)
    }

    pub fn extends_s4(&self) -> bool {
        self.base.extends_s4()
    }

    pub fn contains(&self, f: &Frame) -> bool {
        frame_in_logic(self, f)
    }

    /// Rewrites an S4 extension into base `S4` with the tightest equivalent bounds,
    /// or into `inconsistent`. The rewrites are sound for finite frames:
    ///
    /// * S4.2 = S4 + bf1, S4.3 = S4 + bw1, Grz = S4 + be1 + bi1, S5 = S4 + bd1;
    /// * final units form an antichain, so bf ≤ bw;
    /// * at depth 1 a cone is one cluster: bw = bf = 1 and bi is vacuous;
    /// * at depth 2 every antichain of size ≥ 2 consists of final units: bw = bf;
    /// * bd0, bw0, bf0, be0 leave only the empty frame; bi0 forces depth ≤ 1.
    pub fn normalize(&self) -> Result<LogicSpec> {
        if !self.extends_s4() {
            return Err(Error::UnsupportedLogic(format!("{self} does not extend S4")));
        }
        if self.base == Base::Inconsistent {
            return Ok(LogicSpec::inconsistent());
        }
        let one = Bound::Finite(1);
        let mut b = self.bounds;
        match self.base {
            Base::S42 => b.bf = b.bf.min(one),
            Base::S43 => b.bw = b.bw.min(one),
            Base::Grz => {
                b.be = b.be.min(one);
                b.bi = b.bi.min(one);
            }
            Base::Grz3 => {
                b.bw = b.bw.min(one);
                b.be = b.be.min(one);
                b.bi = b.bi.min(one);
            }
            Base::S5 => b.bd = b.bd.min(one),
            _ => {}
        }
        loop {
            let before = b;
            let zero = Bound::Finite(0);
            if [b.bd, b.bw, b.bf, b.be].contains(&zero) {
                return Ok(LogicSpec::inconsistent());
            }
            if b.bi == zero {
                b.bd = b.bd.min(one);
            }
            b.bf = b.bf.min(b.bw);
            match b.bd {
                Bound::Finite(1) => {
                    b.bw = one;
                    b.bf = one;
                    b.bi = Bound::Omega;
                }
                Bound::Finite(2) => {
                    let m = b.bw.min(b.bf);
                    b.bw = m;
                    b.bf = m;
                }
                _ => {}
            }
            if b == before {
                break;
            }
        }
        Ok(LogicSpec { base: Base::S4, bounds: b })
    }

    /// Same logic on finite frames, as decided by normalization.
    pub fn equivalent(&self, other: &LogicSpec) -> Result<bool> {
        Ok(self.normalize()? == other.normalize()?)
    }
}

impl fmt::Display for LogicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base.name())?;
        for p in Param::ALL {
            if let Bound::Finite(n) = self.bounds.get(p) {
                write!(f, "+{}{n}", p.name())?;
            }
        }
        Ok(())
    }
}

impl FromStr for LogicSpec {
    type Err = Error;

    /// `S4.2+bd2+be1+bi2`, `GL.3+bd3`, `inconsistent`; `omega` is accepted as a bound.
    fn from_str(s: &str) -> Result<LogicSpec> {
        let mut parts = s.trim().split('+').map(str::trim);
        let head = parts.next().unwrap_or("");
        let base = Base::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(head))
            .ok_or_else(|| Error::UnsupportedLogic(format!("unknown base logic `{head}`")))?;
        let mut spec = LogicSpec::new(base);
        for part in parts {
            if matches!(base, Base::K | Base::Inconsistent) {
                return Err(Error::UnsupportedLogic(format!("bounds are not supported over {}", base.name())));
            }
            let split = part.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(part.len()).min(2);
            let (name, value) = part.split_at(split);
            let param: Param = name.parse()?;
            match value {
                "omega" | "ω" | "w" => {}
                v => {
                    let n = v
                        .parse::<usize>()
                        .map_err(|_| Error::UnsupportedLogic(format!("bad bound `{part}`")))?;
                    spec = spec.with(param, n);
                }
            }
        }
        Ok(spec)
    }
}

// ---- structural checks ----

/// Per-cone statistics of a transitive frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConeStats {
    pub depth: usize,
    pub width: usize,
    pub finals: usize,
    pub max_final: usize,
    pub max_internal: usize,
}

impl ConeStats {
    pub fn get(&self, p: Param) -> usize {
        match p {
            Param::Bd => self.depth,
            Param::Bw => self.width,
            Param::Bf => self.finals,
            Param::Be => self.max_final,
            Param::Bi => self.max_internal,
        }
    }
}

/// Units (clusters and irreflexive points) with their depths.
struct Units {
    of: Vec<usize>,
    size: Vec<usize>,
    depth: Vec<usize>,
    rep: Vec<World>,
}

fn units(f: &Frame) -> Result<Units> {
    let partition = f.clusters()?;
    let depths = f.depths()?;
    let mut of = vec![0; f.size()];
    let (mut size, mut depth, mut rep) = (Vec::new(), Vec::new(), Vec::new());
    for c in &partition.clusters {
        for w in c.members.iter() {
            of[w] = rep.len();
        }
        size.push(c.len());
        depth.push(c.depth);
        rep.push(c.members.first().unwrap());
    }
    for w in partition.irreflexive_points.iter() {
        of[w] = rep.len();
        size.push(1);
        depth.push(depths[w]);
        rep.push(w);
    }
    Ok(Units { of, size, depth, rep })
}

/// Statistics of the cone of every world; errors on non-transitive frames.
pub fn cone_stats(f: &Frame) -> Result<Vec<ConeStats>> {
    let u = units(f)?;
    let k = u.rep.len();
    let per_unit: Vec<ConeStats> = (0..k)
        .map(|i| {
            let root = u.rep[i];
            let cone: Vec<usize> = (0..k).filter(|&j| j == i || f.related(root, u.rep[j])).collect();
            let strictly_below = |a: usize, b: usize| a != b && f.related(u.rep[a], u.rep[b]);
            let mut g = UnGraph::<(), ()>::with_capacity(2 * cone.len(), 0);
            let nodes: Vec<_> = (0..2 * cone.len()).map(|_| g.add_node(())).collect();
            for (x, &a) in cone.iter().enumerate() {
                for (y, &b) in cone.iter().enumerate() {
                    if strictly_below(a, b) {
                        g.add_edge(nodes[x], nodes[cone.len() + y], ());
                    }
                }
            }
            // Dilworth: a minimum chain cover has |units| - |maximum matching| chains.
            let width = cone.len() - maximum_matching(&g).len();
            let finals: Vec<usize> = cone.iter().copied().filter(|&j| u.depth[j] == 1).collect();
            ConeStats {
                depth: cone.iter().map(|&j| u.depth[j]).max().unwrap_or(0),
                width,
                finals: finals.len(),
                max_final: finals.iter().map(|&j| u.size[j]).max().unwrap_or(0),
                max_internal: cone.iter().filter(|&&j| u.depth[j] > 1).map(|&j| u.size[j]).max().unwrap_or(0),
            }
        })
        .collect();
    Ok(f.worlds().map(|w| per_unit[u.of[w]]).collect())
}

/// Whether every cone of `f` respects `bound` on parameter `p`.
pub fn bound_holds(f: &Frame, p: Param, bound: Bound) -> Result<bool> {
    if bound == Bound::Omega {
        return Ok(true);
    }
    Ok(cone_stats(f)?.iter().all(|s| bound.allows(s.get(p))))
}

/// Base condition and every finite bound, checked structurally.
pub fn frame_in_logic(l: &LogicSpec, f: &Frame) -> bool {
    if !l.base.holds(f) {
        return false;
    }
    if l.bounds.is_trivial() {
        return true;
    }
    // Bounds are only accepted over transitive bases, so the statistics exist.
    let Ok(stats) = cone_stats(f) else { return false };
    bounds_allow(&l.bounds, &stats)
}

/// Whether precomputed cone statistics respect every bound.
pub fn bounds_allow(bounds: &Bounds, stats: &[ConeStats]) -> bool {
    Param::ALL.iter().all(|&p| stats.iter().all(|s| bounds.get(p).allows(s.get(p))))
}

/// The bound read through subreduction: `f` does not subreduce to the forbidden frame.
pub fn bound_via_subreduction(f: &Frame, p: Param, n: usize, budget: Budget) -> Result<bool> {
    if !f.is_transitive() {
        return Err(Error::NotTransitive);
    }
    Ok(subreduces(f, &p.forbidden_frame(n), budget)?.is_none())
}

// ---- catalogs ----

/// A catalog entry with a human-readable provenance label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub logic: LogicSpec,
    pub label: String,
}

fn family_one_bases() -> Vec<(&'static str, LogicSpec)> {
    let s4 = LogicSpec::new(Base::S4);
    let s42 = LogicSpec::new(Base::S42);
    vec![
        ("S4", s4),
        ("S4.2", s42),
        ("S4+bd2", s4.with(Param::Bd, 2)),
        ("S4+bd2+bw2", s4.with(Param::Bd, 2).with(Param::Bw, 2)),
        ("S4.2+bd2", s42.with(Param::Bd, 2)),
    ]
}

const SMALL_BOUNDS: [Bound; 3] = [Bound::Finite(1), Bound::Finite(2), Bound::Omega];

fn bounded(l: LogicSpec, be: Bound, bi: Bound) -> LogicSpec {
    let mut l = l;
    l.bounds.be = l.bounds.be.min(be);
    l.bounds.bi = l.bounds.bi.min(bi);
    l
}

/// The logics above S4 whose categories of finite frames are regular.
pub fn regular_catalog() -> Vec<CatalogEntry> {
    let mut out = vec![CatalogEntry { logic: LogicSpec::inconsistent(), label: "the inconsistent logic".into() }];
    for (name, l) in family_one_bases() {
        for m in SMALL_BOUNDS {
            for n in SMALL_BOUNDS {
                out.push(CatalogEntry {
                    logic: bounded(l, m, n),
                    label: format!("family 1: L' = {name}, be{m}, bi{n}"),
                });
            }
        }
    }
    out.push(CatalogEntry { logic: LogicSpec::new(Base::Grz3), label: "family 2: Grz.3".into() });
    for m in SMALL_BOUNDS {
        out.push(CatalogEntry {
            logic: bounded(LogicSpec::new(Base::S5), m, Bound::Omega),
            label: format!("family 3: S5, be{m}"),
        });
    }
    out
}

/// The logics above S4 whose categories of finite frames are Barr exact.
pub fn exact_catalog() -> Vec<CatalogEntry> {
    let s42bd2 = LogicSpec::new(Base::S42).with(Param::Bd, 2).with(Param::Be, 1);
    vec![
        CatalogEntry { logic: LogicSpec::inconsistent(), label: "the inconsistent logic".into() },
        CatalogEntry { logic: s42bd2.with(Param::Bi, 1), label: "S4.2+bd2+be1+bi1".into() },
        CatalogEntry { logic: s42bd2.with(Param::Bi, 2), label: "S4.2+bd2+be1+bi2".into() },
        CatalogEntry { logic: LogicSpec::new(Base::S5).with(Param::Be, 1), label: "S5+be1".into() },
        CatalogEntry { logic: LogicSpec::new(Base::S5).with(Param::Be, 2), label: "S5+be2".into() },
    ]
}

fn lookup(l: &LogicSpec, catalog: &[CatalogEntry]) -> Result<Option<CatalogEntry>> {
    let target = l.normalize()?;
    for e in catalog {
        if e.logic.normalize()? == target {
            return Ok(Some(e.clone()));
        }
    }
    Ok(None)
}

pub fn regular_entry(l: &LogicSpec) -> Result<Option<CatalogEntry>> {
    lookup(l, &regular_catalog())
}

pub fn exact_entry(l: &LogicSpec) -> Result<Option<CatalogEntry>> {
    lookup(l, &exact_catalog())
}

pub fn is_regular(l: &LogicSpec) -> Result<bool> {
    Ok(regular_entry(l)?.is_some())
}

pub fn is_barr_exact(l: &LogicSpec) -> Result<bool> {
    Ok(exact_entry(l)?.is_some())
}

/// Every S4 extension expressible in the vocabulary with bounds in {0, 1, 2, 3, ω}.
pub fn s4_vocabulary() -> Vec<LogicSpec> {
    let values = [Bound::Finite(0), Bound::Finite(1), Bound::Finite(2), Bound::Finite(3), Bound::Omega];
    let mut out = vec![LogicSpec::inconsistent()];
    for base in [Base::S4, Base::S42, Base::S43, Base::Grz, Base::Grz3, Base::S5] {
        for bd in values {
            for bw in values {
                for bf in values {
                    for be in values {
                        for bi in values {
                            out.push(LogicSpec { base, bounds: Bounds { bd, bw, bf, be, bi } });
                        }
                    }
                }
            }
        }
    }
    out
}
