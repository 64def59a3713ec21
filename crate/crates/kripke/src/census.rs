//! Isomorphism classes of small frames.
//!
//! Canonical forms use colour refinement with individualization. Vertices that are
//! twins (interchangeable by a transposition) are branched on only once.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::frame_core::Frame;

/// Largest frame accepted by [`canonical_code`].
pub const MAX_CANONICAL: usize = 11;

/// Largest size for which [`all_frames`] enumerates every relation.
pub const MAX_ALL_FRAMES: usize = 5;

struct Adj {
    n: usize,
    out: Vec<u16>,
    inc: Vec<u16>,
}

impl Adj {
    fn new(f: &Frame) -> Adj {
        let n = f.size();
        let mut out = vec![0u16; n];
        let mut inc = vec![0u16; n];
        for (a, b) in f.edges() {
            out[a] |= 1 << b;
            inc[b] |= 1 << a;
        }
        Adj { n, out, inc }
    }

    fn rel(&self, a: usize, b: usize) -> bool {
        self.out[a] >> b & 1 == 1
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        let others = !((1u16 << u) | (1u16 << v));
        self.rel(u, u) == self.rel(v, v)
            && self.rel(u, v) == self.rel(v, u)
            && self.out[u] & others == self.out[v] & others
            && self.inc[u] & others == self.inc[v] & others
    }

    fn code(&self, colour: &[usize]) -> u128 {
        let mut code = 0u128;
        for a in 0..self.n {
            let mut m = self.out[a];
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                code |= 1u128 << (colour[a] * self.n + colour[b]);
            }
        }
        code
    }

    /// Refines until stable; colours are ranks of invariant signatures.
    fn refine(&self, colour: &mut Vec<usize>) {
        let mut classes = distinct(colour);
        loop {
            let sigs: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..self.n)
                .map(|v| {
                    let mut outs: Vec<usize> = ones(self.out[v]).map(|u| colour[u]).collect();
                    let mut ins: Vec<usize> = ones(self.inc[v]).map(|u| colour[u]).collect();
                    outs.sort_unstable();
                    ins.sort_unstable();
                    (colour[v], outs, ins)
                })
                .collect();
            let mut sorted = sigs.clone();
            sorted.sort();
            sorted.dedup();
            *colour = sigs.iter().map(|s| sorted.binary_search(s).unwrap()).collect();
            // Make colours cumulative ranks so a discrete colouring is a permutation.
            let mut counts = vec![0usize; sorted.len()];
            for &c in colour.iter() {
                counts[c] += 1;
            }
            let mut start = vec![0usize; sorted.len()];
            for i in 1..sorted.len() {
                start[i] = start[i - 1] + counts[i - 1];
            }
            for c in colour.iter_mut() {
                *c = start[*c];
            }
            if sorted.len() == classes {
                return;
            }
            classes = sorted.len();
        }
    }

    fn search(&self, colour: Vec<usize>, best: &mut Option<u128>) {
        let mut colour = colour;
        self.refine(&mut colour);
        let mut counts = vec![0usize; self.n];
        for &c in &colour {
            counts[c] += 1;
        }
        let Some(cell) = (0..self.n).find(|&c| counts[c] > 1) else {
            let code = self.code(&colour);
            if best.is_none_or(|b| code < b) {
                *best = Some(code);
            }
            return;
        };
        let members: Vec<usize> = (0..self.n).filter(|&v| colour[v] == cell).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &members {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            // The individualized vertex takes the first slot of its cell.
            let next: Vec<usize> =
                colour.iter().enumerate().map(|(u, &c)| if c == cell && u != v { c + 1 } else { c }).collect();
            self.search(next, best);
        }
    }
}

fn ones(mut m: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

fn distinct(colour: &[usize]) -> usize {
    let mut c = colour.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// An isomorphism invariant that separates non-isomorphic frames.
pub fn canonical_code(f: &Frame) -> Result<u128> {
    if f.size() > MAX_CANONICAL {
        return Err(Error::Precondition(format!("canonical forms are limited to {MAX_CANONICAL} worlds")));
    }
    let adj = Adj::new(f);
    let n = adj.n;
    let mut colour: Vec<usize> = (0..n)
        .map(|v| (!adj.rel(v, v) as usize, adj.out[v].count_ones(), adj.inc[v].count_ones()))
        .map(|t| t.0 * 10_000 + t.1 as usize * 100 + t.2 as usize)
        .collect();
    let mut keys = colour.clone();
    keys.sort_unstable();
    for c in colour.iter_mut() {
        *c = keys.partition_point(|&k| k < *c);
    }
    let mut best = None;
    adj.search(colour, &mut best);
    Ok(best.unwrap_or(0))
}

/// The frame with the given canonical code.
pub fn from_code(n: usize, code: u128) -> Frame {
    Frame::from_fn(n, |a, b| code >> (a * n + b) & 1 == 1)
}

pub fn canonical_form(f: &Frame) -> Result<Frame> {
    Ok(from_code(f.size(), canonical_code(f)?))
}

static ALL: [OnceLock<Vec<Frame>>; MAX_ALL_FRAMES + 1] = [const { OnceLock::new() }; MAX_ALL_FRAMES + 1];

/// One representative of every isomorphism class of frames with exactly `n` worlds.
pub fn all_frames(n: usize) -> Result<&'static [Frame]> {
    if n > MAX_ALL_FRAMES {
        return Err(Error::BudgetExceeded(format!("listing all frames of size {n}")));
    }
    Ok(ALL[n].get_or_init(|| build_all(n)))
}

fn build_all(n: usize) -> Vec<Frame> {
    if n == 0 {
        return vec![Frame::empty()];
    }
    let mut seen = HashSet::new();
    let last = n - 1;
    for base in all_frames(last).unwrap() {
        for pattern in 0u32..(1 << (2 * last + 1)) {
            let f = Frame::from_fn(n, |a, b| match (a == last, b == last) {
                (false, false) => base.related(a, b),
                (true, true) => pattern & 1 == 1,
                (true, false) => pattern >> (1 + b) & 1 == 1,
                (false, true) => pattern >> (1 + last + a) & 1 == 1,
            });
            seen.insert(canonical_code(&f).unwrap());
        }
    }
    let mut codes: Vec<u128> = seen.into_iter().collect();
    codes.sort_unstable();
    codes.into_iter().map(|c| from_code(n, c)).collect()
}

/// Every frame up to `n` worlds, smallest first.
pub fn all_frames_up_to(n: usize) -> Result<Vec<Frame>> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend_from_slice(all_frames(k)?);
    }
    Ok(out)
}

/// Transitive frames of exactly `n` worlds satisfying `keep`, up to isomorphism.
///
/// Frames are grown by one point at a time in a minimal position: a new unit below an
/// up-closed set, or a new member of a minimal cluster. Every transitive frame arises this
/// way from a smaller one, so the result is complete whenever `keep` is closed under
/// generated subframes and p-morphic images, which holds for every modal logic.
pub fn logic_frames(n: usize, keep: &dyn Fn(&Frame) -> bool) -> Result<Vec<Vec<Frame>>> {
    if n > MAX_CANONICAL {
        return Err(Error::BudgetExceeded(format!("listing transitive frames of size {n}")));
    }
    let mut levels = vec![if keep(&Frame::empty()) { vec![Frame::empty()] } else { Vec::new() }];
    for k in 1..=n {
        let mut seen = HashSet::new();
        for base in &levels[k - 1] {
            for f in minimal_extensions(base) {
                if keep(&f) {
                    seen.insert(canonical_code(&f)?);
                }
            }
        }
        let mut codes: Vec<u128> = seen.into_iter().collect();
        codes.sort_unstable();
        levels.push(codes.into_iter().map(|c| from_code(k, c)).collect());
    }
    Ok(levels)
}

fn minimal_extensions(base: &Frame) -> Vec<Frame> {
    let k = base.size();
    let mut out = Vec::new();
    for up in base.generated_subframes() {
        for refl in [false, true] {
            out.push(Frame::from_fn(k + 1, |a, b| match (a == k, b == k) {
                (false, false) => base.related(a, b),
                (true, true) => refl,
                (true, false) => up.contains(b),
                (false, true) => false,
            }));
        }
    }
    if let Ok(partition) = base.clusters() {
        for c in &partition.clusters {
            let rep = c.members.first().unwrap();
            let minimal = base.worlds().all(|w| c.members.contains(w) || !base.related(w, rep));
            if minimal {
                out.push(Frame::from_fn(k + 1, |a, b| match (a == k, b == k) {
                    (false, false) => base.related(a, b),
                    (true, true) => true,
                    (true, false) => base.related(rep, b),
                    (false, true) => c.members.contains(a),
                }));
            }
        }
    }
    out
}

static TRANSITIVE: OnceLock<Vec<Vec<Frame>>> = OnceLock::new();
const CACHED_TRANSITIVE: usize = 5;

/// Transitive frames of exactly `n` worlds, up to isomorphism.
pub fn transitive_frames(n: usize) -> Result<Vec<Frame>> {
    if n <= CACHED_TRANSITIVE {
        let levels = TRANSITIVE.get_or_init(|| logic_frames(CACHED_TRANSITIVE, &|_| true).unwrap());
        return Ok(levels[n].clone());
    }
    Ok(logic_frames(n, &|_| true)?.pop().unwrap())
}

pub fn transitive_frames_up_to(n: usize) -> Result<Vec<Frame>> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(transitive_frames(k)?);
    }
    Ok(out)
}

/// Rooted members of a list, useful for cone-wise arguments.
pub fn rooted(frames: &[Frame]) -> Vec<Frame> {
    frames.iter().filter(|f| f.is_rooted()).cloned().collect()
}
