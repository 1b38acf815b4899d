//! Generator-image backtracking shared by the automorphism and isomorphism
//! engines.

use rustc_hash::FxHashMap;

use crate::finite::FiniteGroup;
use crate::structure::{conjugacy_classes, Classes};
use crate::Result;

/// Automorphism-invariant label of an element: its order, its class size, and
/// the class size and order of each prime power of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey {
    pub order: u32,
    pub class_size: u32,
    pub powers: Vec<(u32, u32, u32)>,
}

/// Element keys of a group, stored once per class.
#[derive(Clone, Debug)]
pub struct Invariants {
    pub classes: Classes,
    pub class_keys: Vec<ElementKey>,
}

impl Invariants {
    pub fn compute(g: &FiniteGroup) -> Result<Self> {
        let classes = conjugacy_classes(g)?;
        Ok(Invariants::from_classes(g, classes))
    }

    pub fn from_classes(g: &FiniteGroup, classes: Classes) -> Self {
        let orders = g.element_orders();
        let class_keys = classes
            .reps
            .iter()
            .enumerate()
            .map(|(c, &r)| {
                let o = orders[r as usize];
                let mut powers = Vec::new();
                let mut m = o;
                let mut p = 2;
                while m > 1 {
                    if m.is_multiple_of(p) {
                        while m.is_multiple_of(p) {
                            m /= p;
                        }
                        let y = g.pow(r, p as i64);
                        let cy = classes.class_of[y as usize] as usize;
                        powers.push((p, classes.sizes[cy] as u32, orders[y as usize]));
                    }
                    p += 1;
                }
                ElementKey { order: o, class_size: classes.sizes[c] as u32, powers }
            })
            .collect();
        Invariants { classes, class_keys }
    }

    pub fn key(&self, x: u32) -> &ElementKey {
        &self.class_keys[self.classes.class_of[x as usize] as usize]
    }

    /// Elements grouped by key, each list in increasing index order.
    pub fn pools(&self) -> FxHashMap<ElementKey, Vec<u32>> {
        let mut out: FxHashMap<ElementKey, Vec<u32>> = FxHashMap::default();
        for x in 0..self.classes.class_of.len() as u32 {
            out.entry(self.key(x).clone()).or_default().push(x);
        }
        out
    }
}

/// Candidates examined per step when choosing a search generating set.
const GENERATOR_CANDIDATES: usize = 96;

/// Greedily picks a generating sequence whose elements have rare keys, trading
/// pool size against how much each new element enlarges the subgroup.
pub fn choose_generators(g: &FiniteGroup, inv: &Invariants) -> Vec<u32> {
    let n = g.order();
    if n == 1 {
        return Vec::new();
    }
    let pools = inv.pools();
    let pool_size = |x: u32| pools[inv.key(x)].len();
    let orders = g.element_orders();
    let mut sorted: Vec<u32> = (1..n as u32).collect();
    sorted.sort_by_key(|&x| (pool_size(x), std::cmp::Reverse(orders[x as usize]), x));

    let mut gens: Vec<u32> = Vec::new();
    let mut mask = g.mask(&[0]);
    let mut size = 1usize;
    while size < n {
        let mut per_class: FxHashMap<u32, usize> = FxHashMap::default();
        let mut best: Option<(f64, u32, usize, Vec<u32>)> = None;
        let mut tried = 0;
        for &x in &sorted {
            if mask[x as usize] {
                continue;
            }
            let c = inv.classes.class_of[x as usize];
            let seen = per_class.entry(c).or_default();
            if *seen >= 4 {
                continue;
            }
            *seen += 1;
            let mut trial = gens.clone();
            trial.push(x);
            let sub = g.closure(&trial);
            let gain = sub.len() as f64 / size as f64;
            let score = pool_size(x) as f64 / gain;
            if best.as_ref().is_none_or(|b| score < b.0) {
                best = Some((score, x, sub.len(), sub));
            }
            tried += 1;
            if tried >= GENERATOR_CANDIDATES {
                break;
            }
        }
        let (_, x, s, sub) = best.expect("some element lies outside a proper subgroup");
        gens.push(x);
        size = s;
        mask = g.mask(&sub);
    }
    // Drop generators that later ones made redundant.
    let mut i = 0;
    while i < gens.len() && gens.len() > 1 {
        let mut trial = gens.clone();
        trial.remove(i);
        if g.closure(&trial).len() == n {
            gens = trial;
        } else {
            i += 1;
        }
    }
    gens
}

/// Backtracking search for injective homomorphisms `src -> dst` determined by
/// images of a fixed generating sequence of `src`.
pub struct ImageSearch<'a> {
    dst: &'a FiniteGroup,
    gens: Vec<u32>,
    /// `prefixes[j]` is the subgroup generated by the first `j + 1` generators.
    prefixes: Vec<FiniteGroup>,
    /// Embedding of the last prefix (all of `src`) into `src`'s indices.
    full_embedding: Vec<u32>,
    pools: Vec<Vec<u32>>,
}

impl<'a> ImageSearch<'a> {
    /// `pools[j]` lists the allowed images of `gens[j]`.
    pub fn new(src: &FiniteGroup, dst: &'a FiniteGroup, gens: Vec<u32>, pools: Vec<Vec<u32>>) -> Self {
        let mut prefixes = Vec::with_capacity(gens.len());
        let mut full_embedding = vec![0];
        for j in 0..gens.len() {
            let (h, emb) = src.subgroup_group(&gens[..=j]);
            if j + 1 == gens.len() {
                full_embedding = emb;
            }
            prefixes.push(h);
        }
        ImageSearch { dst, gens, prefixes, full_embedding, pools }
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn pool(&self, j: usize) -> &[u32] {
        &self.pools[j]
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Whether the images extend to an injective homomorphism on the subgroup
    /// generated by the corresponding prefix of generators.
    pub fn prefix_ok(&self, images: &[u32]) -> bool {
        if images.is_empty() {
            return true;
        }
        self.prefixes[images.len() - 1].extend_homomorphism(self.dst, images).is_some()
    }

    /// Extends a valid prefix of images to a full valid tuple, depth first in
    /// pool order.  On failure `images` is restored.
    pub fn complete(&self, images: &mut Vec<u32>) -> bool {
        let l = images.len();
        if l == self.gens.len() {
            return true;
        }
        for &y in &self.pools[l] {
            images.push(y);
            if self.prefix_ok(images) && self.complete(images) {
                return true;
            }
            images.pop();
        }
        false
    }

    /// Calls `visit` on every full valid tuple extending `images`.
    pub fn for_each(&self, images: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        let l = images.len();
        if l == self.gens.len() {
            visit(images);
            return;
        }
        for &y in &self.pools[l] {
            images.push(y);
            if self.prefix_ok(images) {
                self.for_each(images, visit);
            }
            images.pop();
        }
    }

    /// The element map (indexed by `src` element) of a full valid tuple.
    pub fn element_map(&self, images: &[u32]) -> Vec<u32> {
        let n = self.full_embedding.len();
        if self.gens.is_empty() {
            return vec![0];
        }
        let f = self.prefixes.last().unwrap().extend_homomorphism(self.dst, images).expect("valid tuple");
        let mut map = vec![0u32; n];
        for (i, &x) in self.full_embedding.iter().enumerate() {
            map[x as usize] = f[i];
        }
        map
    }
}
