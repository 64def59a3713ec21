//! Presheaves on finite categories and their frames of elements.
//!
//! `K` sends a presheaf `F` to the preorder on its elements with `x ≺ x·h`. The strict variant
//! `K′` only keeps arrows `h: d → c` with no arrow back from `c` to `d`. `F(W)(c)` is the set of
//! p-morphisms `K(c) → W`. The two functors are adjoint, with counit `ε_W(g) = g(id_c)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::census::{all_frames, MAX_ALL_FRAMES};
use crate::error::{Budget, Error, Result};
use crate::frame_core::{Frame, World};
use crate::logic::{frame_in_logic, LogicSpec};
use crate::pmorph::{MorphismSearch, PMorphism};

/// Names accepted by [`FinCategory::builtin`]; `chain-poset:<n>` takes a size.
pub const BUILTIN_CATEGORIES: [&str; 5] = ["z2-mult", "z3-mult", "trivial", "z2-add", "chain-poset:<n>"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

/// A finite category with an explicit composition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    /// `compose[g][f] = g ∘ f` when `tgt f = src g`.
    compose: Vec<Vec<Option<usize>>>,
    identities: Vec<usize>,
}

impl FinCategory {
    /// Builds and validates a category. `compose(g, f)` is only queried for composable pairs.
    pub fn new(
        name: impl Into<String>,
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<FinCategory> {
        let bad = |m: String| Error::InvalidCategory(m);
        for a in &arrows {
            if a.src >= objects.len() || a.tgt >= objects.len() {
                return Err(bad(format!("arrow {} has an endpoint out of range", a.name)));
            }
        }
        let n = arrows.len();
        let mut table = vec![vec![None; n]; n];
        for g in 0..n {
            for f in 0..n {
                if arrows[f].tgt != arrows[g].src {
                    continue;
                }
                let h = compose(g, f);
                if h >= n || arrows[h].src != arrows[f].src || arrows[h].tgt != arrows[g].tgt {
                    return Err(bad(format!("{} ∘ {} has the wrong type", arrows[g].name, arrows[f].name)));
                }
                table[g][f] = Some(h);
            }
        }
        let mut identities = Vec::with_capacity(objects.len());
        for c in 0..objects.len() {
            let id = (0..n).find(|&i| {
                arrows[i].src == c
                    && arrows[i].tgt == c
                    && (0..n).all(|f| arrows[f].tgt != c || table[i][f] == Some(f))
                    && (0..n).all(|g| arrows[g].src != c || table[g][i] == Some(g))
            });
            identities.push(id.ok_or_else(|| bad(format!("object {} has no identity", objects[c])))?);
        }
        for (h, g, f) in (0..n).cartesian_product(0..n).cartesian_product(0..n).map(|((h, g), f)| (h, g, f)) {
            if let (Some(gf), Some(hg)) = (table[g][f], table[h][g]) {
                if table[h][gf] != table[hg][f] {
                    return Err(bad(format!(
                        "composition is not associative at ({}, {}, {})",
                        arrows[h].name, arrows[g].name, arrows[f].name
                    )));
                }
            }
        }
        Ok(FinCategory { name: name.into(), objects, arrows, compose: table, identities })
    }

    /// A one-object category whose arrows are `0..size` with `g ∘ f = mul(g, f)`.
    pub fn monoid(name: &str, size: usize, mul: impl Fn(usize, usize) -> usize) -> Result<FinCategory> {
        let arrows = (0..size).map(|i| Arrow { name: i.to_string(), src: 0, tgt: 0 }).collect();
        FinCategory::new(name, vec!["*".into()], arrows, mul)
    }

    pub fn trivial() -> FinCategory {
        FinCategory::monoid("trivial", 1, |_, _| 0).unwrap()
    }

    /// `(Z/nZ, ×)`.
    pub fn z_mult(n: usize) -> Result<FinCategory> {
        FinCategory::monoid(&format!("z{n}-mult"), n, move |g, f| g * f % n)
    }

    /// `(Z/nZ, +)`.
    pub fn z_add(n: usize) -> Result<FinCategory> {
        FinCategory::monoid(&format!("z{n}-add"), n, move |g, f| (g + f) % n)
    }

    /// The poset `(n, ≤)`: one arrow `d → c` whenever `d ≤ c`.
    pub fn chain_poset(n: usize) -> FinCategory {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|c| (0..=c).map(move |d| (d, c))).collect();
        let arrows = pairs.iter().map(|&(d, c)| Arrow { name: format!("{d}≤{c}"), src: d, tgt: c }).collect();
        let lookup: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        FinCategory::new(format!("chain-poset:{n}"), (0..n).map(|i| i.to_string()).collect(), arrows, |g, f| {
            lookup[&(pairs[f].0, pairs[g].1)]
        })
        .unwrap()
    }

    pub fn builtin(name: &str) -> Result<FinCategory> {
        match name {
            "z2-mult" => FinCategory::z_mult(2),
            "z3-mult" => FinCategory::z_mult(3),
            "z2-add" => FinCategory::z_add(2),
            "trivial" => Ok(FinCategory::trivial()),
            _ => match name.strip_prefix("chain-poset:").map(str::parse::<usize>) {
                Some(Ok(n)) => Ok(FinCategory::chain_poset(n)),
                _ => Err(Error::InvalidCategory(format!(
                    "unknown category `{name}` (expected one of {})",
                    BUILTIN_CATEGORIES.join(", ")
                ))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_name(&self, c: usize) -> &str {
        &self.objects[c]
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, h: usize) -> &Arrow {
        &self.arrows[h]
    }

    pub fn identity(&self, c: usize) -> usize {
        self.identities[c]
    }

    /// `g ∘ f`, if the arrows are composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g][f]
    }

    /// Arrows `d → c`, in arrow order.
    pub fn hom(&self, d: usize, c: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&h| self.arrows[h].src == d && self.arrows[h].tgt == c).collect()
    }

    /// Whether `h: d → c` survives the strict filter, i.e. there is no arrow `c → d`.
    fn keeps(&self, h: usize, strict: bool) -> bool {
        let a = &self.arrows[h];
        !strict || self.hom(a.tgt, a.src).is_empty()
    }

    fn non_identities(&self) -> Vec<usize> {
        (0..self.arrows.len()).filter(|h| !self.identities.contains(h)).collect()
    }
}

/// A presheaf: finite sets `F(c)` and restriction maps `F(h): F(c) → F(d)` for `h: d → c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Presheaf {
    sets: Vec<usize>,
    action: Vec<Vec<usize>>,
}

impl Presheaf {
    pub fn new(cat: &FinCategory, sets: Vec<usize>, action: Vec<Vec<usize>>) -> Result<Presheaf> {
        let p = Presheaf { sets, action };
        p.validate(cat)?;
        Ok(p)
    }

    pub fn validate(&self, cat: &FinCategory) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPresheaf(m));
        if self.sets.len() != cat.object_count() || self.action.len() != cat.arrow_count() {
            return bad("shape does not match the category".into());
        }
        for (h, a) in cat.arrows.iter().enumerate() {
            let row = &self.action[h];
            if row.len() != self.sets[a.tgt] || row.iter().any(|&y| y >= self.sets[a.src]) {
                return bad(format!("F({}) is not a function F({}) → F({})", a.name, a.tgt, a.src));
            }
        }
        for c in 0..cat.object_count() {
            if self.action[cat.identity(c)].iter().enumerate().any(|(x, &y)| x != y) {
                return bad(format!("F(id_{}) is not the identity", cat.objects[c]));
            }
        }
        for g in 0..cat.arrow_count() {
            for f in 0..cat.arrow_count() {
                if let Some(gf) = cat.compose(g, f) {
                    if (0..self.sets[cat.arrows[g].tgt]).any(|x| self.act(gf, x) != self.act(f, self.act(g, x))) {
                        return bad(format!("F({} ∘ {}) ≠ F({}) F({})", cat.arrows[g].name, cat.arrows[f].name, cat.arrows[f].name, cat.arrows[g].name));
                    }
                }
            }
        }
        Ok(())
    }

    /// The representable presheaf `C[-, c]`; `F(d)` lists `hom(d, c)` in arrow order.
    pub fn representable(cat: &FinCategory, c: usize) -> Presheaf {
        let homs: Vec<Vec<usize>> = (0..cat.object_count()).map(|d| cat.hom(d, c)).collect();
        let action = cat
            .arrows
            .iter()
            .enumerate()
            .map(|(h, a)| {
                homs[a.tgt]
                    .iter()
                    .map(|&k| {
                        let kh = cat.compose(k, h).unwrap();
                        homs[a.src].iter().position(|&x| x == kh).unwrap()
                    })
                    .collect()
            })
            .collect();
        Presheaf { sets: homs.iter().map(Vec::len).collect(), action }
    }

    /// The constant presheaf on a singleton.
    pub fn terminal(cat: &FinCategory) -> Presheaf {
        Presheaf { sets: vec![1; cat.object_count()], action: vec![vec![0]; cat.arrow_count()] }
    }

    pub fn empty(cat: &FinCategory) -> Presheaf {
        Presheaf { sets: vec![0; cat.object_count()], action: vec![Vec::new(); cat.arrow_count()] }
    }

    pub fn sets(&self) -> &[usize] {
        &self.sets
    }

    /// `x·h = F(h)(x)`.
    pub fn act(&self, h: usize, x: usize) -> usize {
        self.action[h][x]
    }

    /// Total number of elements, which is the size of the frame of elements.
    pub fn total_size(&self) -> usize {
        self.sets.iter().sum()
    }

    /// The least relabelling under per-object permutations; equal for isomorphic presheaves.
    pub fn canonical(&self, cat: &FinCategory) -> Presheaf {
        let perms: Vec<Vec<Vec<usize>>> =
            self.sets.iter().map(|&n| (0..n).permutations(n).collect()).collect();
        perms
            .iter()
            .map(|ps| ps.iter())
            .multi_cartesian_product()
            .map(|choice| self.relabel(cat, &choice))
            .min()
            .unwrap_or_else(|| self.clone())
    }

    fn relabel(&self, cat: &FinCategory, perm: &[&Vec<usize>]) -> Presheaf {
        let mut action = self.action.clone();
        for (h, a) in cat.arrows.iter().enumerate() {
            for x in 0..self.sets[a.tgt] {
                action[h][perm[a.tgt][x]] = perm[a.src][self.action[h][x]];
            }
        }
        Presheaf { sets: self.sets.clone(), action }
    }
}

/// Every presheaf with at most `bound` elements in total, one per isomorphism class.
pub fn enumerate_presheaves(cat: &FinCategory, bound: usize, budget: Budget) -> Result<Vec<Presheaf>> {
    let mut meter = budget.meter("enumerating presheaves");
    let free = cat.non_identities();
    let mut seen = BTreeSet::new();
    let objects = cat.object_count();
    let size_vectors = (0..objects).map(|_| 0..=bound).multi_cartesian_product().filter(|s| s.iter().sum::<usize>() <= bound);
    for sets in size_vectors {
        let mut action: Vec<Vec<usize>> =
            cat.arrows.iter().map(|a| vec![0; sets[a.tgt]]).collect();
        for c in 0..objects {
            action[cat.identity(c)] = (0..sets[c]).collect();
        }
        let choices: Vec<Vec<Vec<usize>>> = free
            .iter()
            .map(|&h| {
                let a = &cat.arrows[h];
                (0..sets[a.tgt]).map(|_| 0..sets[a.src]).multi_cartesian_product().collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        if free.is_empty() {
            seen.insert(Presheaf { sets: sets.clone(), action: action.clone() });
            continue;
        }
        for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
            meter.tick()?;
            for (&h, f) in free.iter().zip(&pick) {
                action[h].clone_from(f);
            }
            let p = Presheaf { sets: sets.clone(), action: action.clone() };
            if p.validate(cat).is_ok() {
                seen.insert(p.canonical(cat));
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// A natural transformation, stored with its domain and codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub dom: Presheaf,
    pub cod: Presheaf,
    pub components: Vec<Vec<usize>>,
}

impl NatTrans {
    pub fn new(cat: &FinCategory, dom: Presheaf, cod: Presheaf, components: Vec<Vec<usize>>) -> Result<NatTrans> {
        let t = NatTrans { dom, cod, components };
        t.validate(cat)?;
        Ok(t)
    }

    pub fn identity(f: &Presheaf) -> NatTrans {
        NatTrans { dom: f.clone(), cod: f.clone(), components: f.sets.iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn validate(&self, cat: &FinCategory) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPresheaf(m));
        if self.components.len() != cat.object_count() {
            return bad("wrong number of components".into());
        }
        for c in 0..cat.object_count() {
            let comp = &self.components[c];
            if comp.len() != self.dom.sets[c] || comp.iter().any(|&y| y >= self.cod.sets[c]) {
                return bad(format!("component at {} is not a function", cat.objects[c]));
            }
        }
        for (h, a) in cat.arrows.iter().enumerate() {
            for x in 0..self.dom.sets[a.tgt] {
                if self.components[a.src][self.dom.act(h, x)] != self.cod.act(h, self.components[a.tgt][x]) {
                    return bad(format!("naturality fails at {} on element {x}", a.name));
                }
            }
        }
        Ok(())
    }

    pub fn is_componentwise_injective(&self) -> bool {
        self.components.iter().all(|c| c.iter().all_unique())
    }

    pub fn is_componentwise_surjective(&self) -> bool {
        self.components.iter().zip(&self.cod.sets).all(|(c, &n)| c.iter().unique().count() == n)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &NatTrans) -> NatTrans {
        let components =
            self.components.iter().zip(&next.components).map(|(a, b)| a.iter().map(|&x| b[x]).collect()).collect();
        NatTrans { dom: self.dom.clone(), cod: next.cod.clone(), components }
    }
}

/// A frame of elements, with each world labelled by `(object, element)`.
#[derive(Debug, Clone)]
pub struct ElementsFrame {
    pub frame: Arc<Frame>,
    pub labels: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl ElementsFrame {
    pub fn world(&self, c: usize, x: usize) -> World {
        self.offsets[c] + x
    }
}

/// `K(F)`, or `K′(F)` when `strict`. Worlds follow object order, then element order.
pub fn elements_frame(cat: &FinCategory, f: &Presheaf, strict: bool) -> ElementsFrame {
    let mut offsets = Vec::with_capacity(cat.object_count());
    let mut labels = Vec::new();
    for c in 0..cat.object_count() {
        offsets.push(labels.len());
        labels.extend((0..f.sets[c]).map(|x| (c, x)));
    }
    let mut edges = Vec::new();
    for (h, a) in cat.arrows.iter().enumerate() {
        if cat.keeps(h, strict) {
            for x in 0..f.sets[a.tgt] {
                edges.push((offsets[a.tgt] + x, offsets[a.src] + f.act(h, x)));
            }
        }
    }
    let frame = Frame::new(labels.len(), edges).expect("element indices are in range");
    ElementsFrame { frame: Arc::new(frame), labels, offsets }
}

/// `K(α)`: the map `x ↦ α x` between frames of elements, validated.
pub fn k_on_morphism(cat: &FinCategory, alpha: &NatTrans, strict: bool) -> Result<PMorphism> {
    let kd = elements_frame(cat, &alpha.dom, strict);
    let kc = elements_frame(cat, &alpha.cod, strict);
    let map = kd.labels.iter().map(|&(c, x)| kc.world(c, alpha.components[c][x])).collect();
    PMorphism::new(kd.frame, kc.frame, map)
}

/// `F(W)` with the p-morphisms behind each element.
#[derive(Debug, Clone)]
pub struct FramePresheaf {
    pub frame: Arc<Frame>,
    pub presheaf: Presheaf,
    /// `maps[c][i]` is the `i`-th p-morphism `K(c) → W`.
    pub maps: Vec<Vec<Vec<World>>>,
    index: Vec<HashMap<Vec<World>, usize>>,
}

impl FramePresheaf {
    pub fn element_of(&self, c: usize, map: &[World]) -> Option<usize> {
        self.index[c].get(map).copied()
    }
}

/// The adjunction `K ⊣ F` over a fixed category, caching the frames `K(c)`.
pub struct Adjunction<'a> {
    cat: &'a FinCategory,
    strict: bool,
    budget: Budget,
    reps: Vec<ElementsFrame>,
    /// For `h: d → c`, the map `K(h): K(d) → K(c)`.
    yoneda: Vec<Vec<World>>,
}

impl<'a> Adjunction<'a> {
    pub fn new(cat: &'a FinCategory, strict: bool, budget: Budget) -> Adjunction<'a> {
        let reps: Vec<ElementsFrame> = (0..cat.object_count())
            .map(|c| elements_frame(cat, &Presheaf::representable(cat, c), strict))
            .collect();
        let homs: Vec<Vec<Vec<usize>>> =
            (0..cat.object_count()).map(|c| (0..cat.object_count()).map(|d| cat.hom(d, c)).collect()).collect();
        let yoneda = cat
            .arrows
            .iter()
            .enumerate()
            .map(|(h, a)| {
                reps[a.src]
                    .labels
                    .iter()
                    .map(|&(e, i)| {
                        let hk = cat.compose(h, homs[a.src][e][i]).unwrap();
                        reps[a.tgt].world(e, homs[a.tgt][e].iter().position(|&x| x == hk).unwrap())
                    })
                    .collect()
            })
            .collect();
        Adjunction { cat, strict, budget, reps, yoneda }
    }

    /// `K(c)`.
    pub fn representable_frame(&self, c: usize) -> &ElementsFrame {
        &self.reps[c]
    }

    /// The world of `K(c)` standing for `id_c`.
    fn id_world(&self, c: usize) -> World {
        let id = self.cat.identity(c);
        let homs = self.cat.hom(c, c);
        self.reps[c].world(c, homs.iter().position(|&x| x == id).unwrap())
    }

    pub fn k(&self, f: &Presheaf) -> ElementsFrame {
        elements_frame(self.cat, f, self.strict)
    }

    pub fn f(&self, w: &Arc<Frame>) -> Result<FramePresheaf> {
        let cat = self.cat;
        let mut maps = Vec::with_capacity(cat.object_count());
        for rep in &self.reps {
            let mut found = Vec::new();
            MorphismSearch::new(&rep.frame, w).run(self.budget, &mut |m| {
                found.push(m.to_vec());
                true
            })?;
            maps.push(found);
        }
        let index: Vec<HashMap<Vec<World>, usize>> =
            maps.iter().map(|ms| ms.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect()).collect();
        let mut action = Vec::with_capacity(cat.arrow_count());
        for (h, a) in cat.arrows.iter().enumerate() {
            let mut row = Vec::with_capacity(maps[a.tgt].len());
            for g in &maps[a.tgt] {
                let gk: Vec<World> = self.yoneda[h].iter().map(|&v| g[v]).collect();
                let i = index[a.src].get(&gk).ok_or_else(|| {
                    Error::Precondition(format!("g ∘ K({}) is not a p-morphism", a.name))
                })?;
                row.push(*i);
            }
            action.push(row);
        }
        let presheaf = Presheaf { sets: maps.iter().map(Vec::len).collect(), action };
        presheaf.validate(cat)?;
        Ok(FramePresheaf { frame: w.clone(), presheaf, maps, index })
    }

    /// `ε_W: K(F(W)) → W`, given `F(W)`.
    pub fn counit(&self, fw: &FramePresheaf) -> Result<PMorphism> {
        let kfw = self.k(&fw.presheaf);
        let map = kfw.labels.iter().map(|&(c, i)| fw.maps[c][i][self.id_world(c)]).collect();
        PMorphism::new(kfw.frame, fw.frame.clone(), map)
    }

    /// `η_F: F → F(K(F))`, with the presheaf `F(K(F))` it lands in.
    pub fn unit(&self, f: &Presheaf) -> Result<(FramePresheaf, NatTrans)> {
        let kf = self.k(f);
        let fkf = self.f(&kf.frame)?;
        let mut components = Vec::with_capacity(self.cat.object_count());
        for c in 0..self.cat.object_count() {
            let homs: Vec<Vec<usize>> = (0..self.cat.object_count()).map(|d| self.cat.hom(d, c)).collect();
            let mut comp = Vec::with_capacity(f.sets[c]);
            for x in 0..f.sets[c] {
                let kx: Vec<World> =
                    self.reps[c].labels.iter().map(|&(d, i)| kf.world(d, f.act(homs[d][i], x))).collect();
                comp.push(fkf.element_of(c, &kx).ok_or_else(|| {
                    Error::Precondition("K(x) is not a p-morphism".into())
                })?);
            }
            components.push(comp);
        }
        let eta = NatTrans::new(self.cat, f.clone(), fkf.presheaf.clone(), components)?;
        Ok((fkf, eta))
    }

    /// `F(φ)` for a p-morphism `φ: W → V`, given `F(W)` and `F(V)`.
    pub fn f_on_morphism(&self, phi: &PMorphism, fw: &FramePresheaf, fv: &FramePresheaf) -> Result<NatTrans> {
        let components = (0..self.cat.object_count())
            .map(|c| {
                fw.maps[c]
                    .iter()
                    .map(|g| {
                        let fg: Vec<World> = g.iter().map(|&w| phi.apply(w)).collect();
                        fv.element_of(c, &fg).ok_or_else(|| Error::Precondition("φ ∘ g is missing".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        NatTrans::new(self.cat, fw.presheaf.clone(), fv.presheaf.clone(), components)
    }

    /// `ε_{K(F)} ∘ K(η_F) = id`.
    pub fn triangle_at_presheaf(&self, f: &Presheaf) -> Result<bool> {
        let (fkf, eta) = self.unit(f)?;
        let k_eta = k_on_morphism(self.cat, &eta, self.strict)?;
        let eps = self.counit(&fkf)?;
        Ok(k_eta.then(&eps)?.map().iter().enumerate().all(|(i, &j)| i == j))
    }

    /// `F(ε_W) ∘ η_{F(W)} = id`.
    pub fn triangle_at_frame(&self, fw: &FramePresheaf) -> Result<bool> {
        let (fkfw, eta) = self.unit(&fw.presheaf)?;
        let eps = self.counit(fw)?;
        let f_eps = self.f_on_morphism(&eps, &fkfw, fw)?;
        let round = eta.then(&f_eps);
        Ok(round.components.iter().all(|c| c.iter().enumerate().all(|(i, &j)| i == j)))
    }
}

/// `F(W)` as a bare presheaf.
pub fn frame_presheaf(cat: &FinCategory, w: &Frame, strict: bool, budget: Budget) -> Result<Presheaf> {
    Ok(Adjunction::new(cat, strict, budget).f(&Arc::new(w.clone()))?.presheaf)
}

pub fn counit(cat: &FinCategory, w: &Frame, strict: bool, budget: Budget) -> Result<PMorphism> {
    let adj = Adjunction::new(cat, strict, budget);
    adj.counit(&adj.f(&Arc::new(w.clone()))?)
}

pub fn unit(cat: &FinCategory, f: &Presheaf, strict: bool, budget: Budget) -> Result<NatTrans> {
    Ok(Adjunction::new(cat, strict, budget).unit(f)?.1)
}

/// Outcome of [`verify_equivalence`].
#[derive(Debug, Clone, Default)]
pub struct EquivalenceReport {
    pub category: String,
    pub logic: String,
    pub strict: bool,
    pub presheaves: usize,
    pub frames: usize,
    pub logic_frames: usize,
    pub violations: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} vs {}{}: {} presheaves, {} frames ({} in the logic)",
            self.category,
            self.logic,
            if self.strict { " (strict)" } else { "" },
            self.presheaves,
            self.frames,
            self.logic_frames
        )?;
        for v in &self.violations {
            writeln!(f, "  violation: {v}")?;
        }
        write!(f, "{}", if self.passed() { "pass" } else { "FAIL" })
    }
}

/// Checks that `K` restricts to an equivalence between presheaves and finite `L`-frames.
///
/// Presheaves are those with at most `presheaf_bound` elements; frames are all frames with
/// at most `frame_bound` worlds. For every presheaf `F`: `K(F) ∈ L`, `ε_{K(F)}` is onto,
/// `η_F` is bijective and the first triangle identity holds. For every frame `W`: `ε_W` is
/// injective, and when `W ∈ L` it is bijective and the second triangle identity holds.
pub fn verify_equivalence(
    cat: &FinCategory,
    l: &LogicSpec,
    frame_bound: usize,
    presheaf_bound: usize,
    strict: bool,
    budget: Budget,
) -> Result<EquivalenceReport> {
    if frame_bound > MAX_ALL_FRAMES {
        return Err(Error::BudgetExceeded(format!("listing all frames of size {frame_bound}")));
    }
    let adj = Adjunction::new(cat, strict, budget);
    let mut report = EquivalenceReport {
        category: cat.name().to_string(),
        logic: l.to_string(),
        strict,
        ..Default::default()
    };
    let mut flag = |m: String| {
        if report.violations.len() < 20 {
            report.violations.push(m);
        }
    };
    let presheaves = enumerate_presheaves(cat, presheaf_bound, budget)?;
    for p in &presheaves {
        let kf = adj.k(p);
        if !frame_in_logic(l, &kf.frame) {
            flag(format!("K(F) ∉ L for F = {p:?}"));
        }
        let (fkf, eta) = adj.unit(p)?;
        if !(eta.is_componentwise_injective() && eta.is_componentwise_surjective()) {
            flag(format!("η_F is not bijective for F = {p:?}"));
        }
        if !adj.counit(&fkf)?.is_surjective() {
            flag(format!("ε_K(F) is not surjective for F = {p:?}"));
        }
        if !adj.triangle_at_presheaf(p)? {
            flag(format!("ε_K(F) ∘ K(η_F) ≠ id for F = {p:?}"));
        }
    }
    let mut frames = 0;
    let mut in_logic = 0;
    for n in 0..=frame_bound {
        for w in all_frames(n)? {
            frames += 1;
            let w = Arc::new(w.clone());
            let fw = adj.f(&w)?;
            let eps = adj.counit(&fw)?;
            if !eps.is_injective() {
                flag(format!("ε_W is not injective for W = {:?}", w.edges().collect::<Vec<_>>()));
            }
            if frame_in_logic(l, &w) {
                in_logic += 1;
                if !eps.is_surjective() {
                    flag(format!("ε_W is not surjective for L-frame W = {:?}", w.edges().collect::<Vec<_>>()));
                }
                if !adj.triangle_at_frame(&fw)? {
                    flag(format!("F(ε_W) ∘ η_F(W) ≠ id for W = {:?}", w.edges().collect::<Vec<_>>()));
                }
            }
        }
    }
    report.presheaves = presheaves.len();
    report.frames = frames;
    report.logic_frames = in_logic;
    Ok(report)
}
