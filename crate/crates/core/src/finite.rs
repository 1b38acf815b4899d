//! Finite groups held as a right-regular Cayley graph.
//!
//! Elements are numbered `0..n` by breadth-first search from the identity
//! (element 0), trying generators in order.  This numbering is the canonical
//! element ordering used everywhere else: it depends only on the group and the
//! ordered generating sequence, never on the representation it came from.

use std::sync::OnceLock;

use rustc_hash::FxHashMap;

use crate::coset::CosetTable;
use crate::error::{GroupError, Result};
use crate::perm::{lcm, Perm};
use crate::permgroup::PermGroup;
use crate::word::Word;

pub const UNSET: u32 = u32::MAX;

/// Groups up to this order keep a full multiplication table.
pub const CAYLEY_TABLE_LIMIT: usize = 4096;

/// An enumerated finite group.
#[derive(Debug)]
pub struct FiniteGroup {
    n: usize,
    /// `right[g][x]` is the index of `x * g_g`.
    right: Vec<Vec<u32>>,
    parent: Vec<u32>,
    pgen: Vec<u16>,
    gen_elems: Vec<u32>,
    gen_inv: Vec<u32>,
    inv: Vec<u32>,
    table: Option<Vec<u16>>,
    orders: OnceLock<Vec<u32>>,
}

impl Clone for FiniteGroup {
    fn clone(&self) -> Self {
        FiniteGroup {
            n: self.n,
            right: self.right.clone(),
            parent: self.parent.clone(),
            pgen: self.pgen.clone(),
            gen_elems: self.gen_elems.clone(),
            gen_inv: self.gen_inv.clone(),
            inv: self.inv.clone(),
            table: self.table.clone(),
            orders: OnceLock::new(),
        }
    }
}

impl FiniteGroup {
    /// Builds the group from the right action of `ngens` generators on some
    /// numbering of its elements, where `identity` is the identity's number.
    /// The action must be regular.
    pub fn from_regular_action(right_raw: &[Vec<u32>], identity: u32) -> Self {
        let ngens = right_raw.len();
        let raw_n = right_raw.first().map(|r| r.len()).unwrap_or(1);
        let mut newnum = vec![UNSET; raw_n];
        let mut order = vec![identity];
        newnum[identity as usize] = 0;
        let mut parent = vec![0u32];
        let mut pgen = vec![0u16];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for g in 0..ngens {
                let y = right_raw[g][x as usize];
                if newnum[y as usize] == UNSET {
                    newnum[y as usize] = order.len() as u32;
                    order.push(y);
                    parent.push(i as u32);
                    pgen.push(g as u16);
                }
            }
            i += 1;
        }
        let n = order.len();
        let right: Vec<Vec<u32>> = (0..ngens)
            .map(|g| order.iter().map(|&x| newnum[right_raw[g][x as usize] as usize]).collect())
            .collect();
        FiniteGroup::assemble(n, right, parent, pgen)
    }

    fn assemble(n: usize, right: Vec<Vec<u32>>, parent: Vec<u32>, pgen: Vec<u16>) -> Self {
        let ngens = right.len();
        let gen_elems: Vec<u32> = (0..ngens).map(|g| right[g][0]).collect();
        let gen_inv: Vec<u32> = (0..ngens)
            .map(|g| {
                // Walk the cycle of the generator through the identity.
                let mut y = 0u32;
                loop {
                    let z = right[g][y as usize];
                    if z == 0 {
                        break y;
                    }
                    y = z;
                }
            })
            .collect();
        let mut grp = FiniteGroup {
            n,
            right,
            parent,
            pgen,
            gen_elems,
            gen_inv,
            inv: Vec::new(),
            table: None,
            orders: OnceLock::new(),
        };
        if n <= CAYLEY_TABLE_LIMIT {
            let mut t = vec![0u16; n * n];
            for x in 0..n {
                let row = &mut t[x * n..(x + 1) * n];
                row[0] = x as u16;
                for y in 1..n {
                    let p = grp.parent[y] as usize;
                    row[y] = grp.right[grp.pgen[y] as usize][row[p] as usize] as u16;
                }
            }
            grp.table = Some(t);
        }
        let mut inv = vec![0u32; n];
        for y in 1..n {
            let p = grp.parent[y] as usize;
            inv[y] = grp.mul(grp.gen_inv[grp.pgen[y] as usize], inv[p]);
        }
        grp.inv = inv;
        grp
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        FiniteGroup::assemble(1, Vec::new(), vec![0], vec![0])
    }

    /// The right-regular group from a coset table over the trivial subgroup.
    pub fn from_coset_table(t: &CosetTable) -> Self {
        let right: Vec<Vec<u32>> = (0..t.ngens()).map(|g| t.generator_images(g)).collect();
        if right.is_empty() {
            return FiniteGroup::trivial();
        }
        FiniteGroup::from_regular_action(&right, 0)
    }

    /// Enumerates a permutation group using a base: elements are identified by
    /// their base images.
    pub fn from_permutations(gens: &[Perm], base: &[u32]) -> Self {
        let ngens = gens.len();
        if ngens == 0 {
            return FiniteGroup::trivial();
        }
        let b = base.len();
        let mut keys: Vec<u32> = base.to_vec();
        let mut index: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
        index.insert(base.to_vec(), 0);
        let mut right: Vec<Vec<u32>> = vec![Vec::new(); ngens];
        let mut parent = vec![0u32];
        let mut pgen = vec![0u16];
        let mut i = 0usize;
        let mut key = vec![0u32; b];
        while i * b < keys.len() {
            for g in 0..ngens {
                for k in 0..b {
                    key[k] = gens[g].apply(keys[i * b + k]);
                }
                let next = index.len() as u32;
                let y = *index.entry(key.clone()).or_insert_with(|| {
                    keys.extend_from_slice(&key);
                    parent.push(i as u32);
                    pgen.push(g as u16);
                    next
                });
                right[g].push(y);
            }
            i += 1;
        }
        let n = parent.len();
        FiniteGroup::assemble(n, right, parent, pgen)
    }

    /// Enumerates a permutation group, computing a base by Schreier–Sims.
    pub fn from_perm_group(g: &PermGroup) -> Self {
        let base = g.chain().base();
        let gens: Vec<Perm> = g.generators().iter().filter(|p| !p.is_identity()).cloned().collect();
        if gens.is_empty() {
            return FiniteGroup::trivial();
        }
        FiniteGroup::from_permutations(&gens, &base)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn ngens(&self) -> usize {
        self.right.len()
    }

    /// Element index of each generator.
    pub fn generators(&self) -> &[u32] {
        &self.gen_elems
    }

    /// Right multiplication by generator `g` as a permutation of element indices.
    pub fn right_action(&self, g: usize) -> &[u32] {
        &self.right[g]
    }

    pub fn parent(&self, x: u32) -> (u32, usize) {
        (self.parent[x as usize], self.pgen[x as usize] as usize)
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if let Some(t) = &self.table {
            return t[x as usize * self.n + y as usize] as u32;
        }
        let mut stack = [0u16; 256];
        let mut depth = 0usize;
        let mut z = y as usize;
        let mut r = x;
        while z != 0 {
            if depth == stack.len() {
                // Very deep element: multiply the remaining prefix recursively.
                let pre = self.mul(x, z as u32);
                r = pre;
                break;
            }
            stack[depth] = self.pgen[z];
            depth += 1;
            z = self.parent[z] as usize;
        }
        for k in (0..depth).rev() {
            r = self.right[stack[k] as usize][r as usize];
        }
        r
    }

    #[inline]
    pub fn inv(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    pub fn pow(&self, x: u32, k: i64) -> u32 {
        let mut base = if k < 0 { self.inv(x) } else { x };
        let mut e = k.unsigned_abs();
        let mut acc = 0u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `x^y = y^-1 x y`.
    pub fn conj(&self, x: u32, y: u32) -> u32 {
        self.mul(self.mul(self.inv(y), x), y)
    }

    /// `(x, y) = x^-1 y^-1 x y`.
    pub fn comm(&self, x: u32, y: u32) -> u32 {
        self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))
    }

    /// Left multiplication by `a` as a permutation of indices: `x -> a*x`.
    pub fn left_mult(&self, a: u32) -> Vec<u32> {
        let mut out = vec![0u32; self.n];
        out[0] = a;
        for y in 1..self.n {
            out[y] = self.right[self.pgen[y] as usize][out[self.parent[y] as usize] as usize];
        }
        out
    }

    /// Right multiplication by `a` as a permutation of indices: `x -> x*a`.
    pub fn right_mult(&self, a: u32) -> Vec<u32> {
        if self.table.is_some() {
            return (0..self.n as u32).map(|x| self.mul(x, a)).collect();
        }
        let mut word = Vec::new();
        let mut z = a as usize;
        while z != 0 {
            word.push(self.pgen[z] as usize);
            z = self.parent[z] as usize;
        }
        let mut out: Vec<u32> = (0..self.n as u32).collect();
        for &g in word.iter().rev() {
            for v in out.iter_mut() {
                *v = self.right[g][*v as usize];
            }
        }
        out
    }

    /// Conjugation by `a` as a permutation of indices: `x -> a^-1 x a`.
    pub fn conj_action(&self, a: u32) -> Vec<u32> {
        let l = self.left_mult(self.inv(a));
        let r = self.right_mult(a);
        l.iter().map(|&y| r[y as usize]).collect()
    }

    /// Conjugation by the `g`-th generator, computed in linear time.
    pub fn generator_conj_action(&self, g: usize) -> Vec<u32> {
        let l = self.left_mult(self.gen_inv[g]);
        l.iter().map(|&y| self.right[g][y as usize]).collect()
    }

    /// Element orders, computed once.
    pub fn element_orders(&self) -> &[u32] {
        self.orders.get_or_init(|| {
            let mut ord = vec![0u32; self.n];
            ord[0] = 1;
            for x in 1..self.n as u32 {
                if ord[x as usize] != 0 {
                    continue;
                }
                let mut powers = vec![0u32, x];
                let mut r = x;
                while r != 0 {
                    r = self.mul(r, x);
                    powers.push(r);
                }
                let m = powers.len() as u32 - 1;
                // x^k has order m / gcd(m, k).
                for k in 1..m {
                    let y = powers[k as usize];
                    if ord[y as usize] == 0 {
                        ord[y as usize] = m / crate::perm::gcd(m as u64, k as u64) as u32;
                    }
                }
            }
            ord
        })
    }

    pub fn element_order(&self, x: u32) -> u32 {
        self.element_orders()[x as usize]
    }

    pub fn exponent(&self) -> u64 {
        self.element_orders().iter().fold(1u64, |a, &o| lcm(a, o as u64))
    }

    /// A word in the generators evaluating to `x`.
    pub fn word_of(&self, x: u32) -> Word {
        let mut syl = Vec::new();
        let mut z = x as usize;
        while z != 0 {
            syl.push((self.pgen[z] as u32, 1));
            z = self.parent[z] as usize;
        }
        syl.reverse();
        Word::from_syllables(syl)
    }

    /// Evaluates a word whose generator indices refer to `images`.
    pub fn eval_word(&self, w: &Word, images: &[u32]) -> u32 {
        let mut r = 0u32;
        for &(g, e) in w.syllables() {
            let base = images[g as usize];
            r = self.mul(r, self.pow(base, e as i64));
        }
        r
    }

    /// Evaluates a word in this group's own generators.
    pub fn eval(&self, w: &Word) -> u32 {
        self.eval_word(w, &self.gen_elems)
    }

    /// The elements of the subgroup generated by `gens`, in discovery order.
    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut out = vec![0u32];
        let gens: Vec<u32> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in &gens {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    /// Re-enumerates the group on a new generating sequence (elements of this
    /// group).  Returns the new group and the map from old to new indices, or
    /// `None` if `gens` do not generate the whole group.
    pub fn regenerate(&self, gens: &[u32]) -> Option<(FiniteGroup, Vec<u32>)> {
        let (sub, emb) = self.subgroup_group(gens);
        if sub.order() != self.n {
            return None;
        }
        let mut old_to_new = vec![0u32; self.n];
        for (new, &old) in emb.iter().enumerate() {
            old_to_new[old as usize] = new as u32;
        }
        Some((sub, old_to_new))
    }

    /// The subgroup generated by `gens` as a group in its own right, with the
    /// embedding (new index -> index in `self`).
    pub fn subgroup_group(&self, gens: &[u32]) -> (FiniteGroup, Vec<u32>) {
        if gens.is_empty() {
            return (FiniteGroup::trivial(), vec![0]);
        }
        let mut newnum: FxHashMap<u32, u32> = FxHashMap::default();
        newnum.insert(0, 0);
        let mut order = vec![0u32];
        let mut parent = vec![0u32];
        let mut pgen = vec![0u16];
        let k = gens.len();
        let mut right: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for (g, &s) in gens.iter().enumerate() {
                let y = self.mul(x, s);
                let next = order.len() as u32;
                let id = *newnum.entry(y).or_insert_with(|| {
                    order.push(y);
                    parent.push(i as u32);
                    pgen.push(g as u16);
                    next
                });
                right[g].push(id);
            }
            i += 1;
        }
        let n = order.len();
        (FiniteGroup::assemble(n, right, parent, pgen), order)
    }

    /// Extends `images` (one per generator) to a map on all elements if it
    /// defines an injective homomorphism into `target`.
    pub fn extend_homomorphism(&self, target: &FiniteGroup, images: &[u32]) -> Option<Vec<u32>> {
        self.extend_homomorphism_with(target, images, true)
    }

    /// As [`extend_homomorphism`](Self::extend_homomorphism), optionally
    /// allowing non-injective maps.
    pub fn extend_homomorphism_with(&self, target: &FiniteGroup, images: &[u32], injective: bool) -> Option<Vec<u32>> {
        let k = self.ngens();
        debug_assert_eq!(images.len(), k);
        let mut f = vec![UNSET; self.n];
        let mut seen = if injective { vec![false; target.n] } else { Vec::new() };
        f[0] = 0;
        if injective {
            seen[0] = true;
        }
        for x in 0..self.n {
            let fx = f[x];
            for g in 0..k {
                let y = self.right[g][x] as usize;
                let v = target.mul(fx, images[g]);
                if f[y] == UNSET {
                    if injective {
                        if seen[v as usize] {
                            return None;
                        }
                        seen[v as usize] = true;
                    }
                    f[y] = v;
                } else if f[y] != v {
                    return None;
                }
            }
        }
        Some(f)
    }

    /// Permutation representation: right-regular action of the generators.
    pub fn regular_perm_group(&self) -> PermGroup {
        let gens: Vec<Perm> = self.right.iter().map(|r| Perm::from_images_unchecked(r.clone())).collect();
        PermGroup::regular(self.n, gens).expect("regular action")
    }

    /// Membership mask for a list of elements.
    pub fn mask(&self, elems: &[u32]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &x in elems {
            m[x as usize] = true;
        }
        m
    }

    /// Checks that `elems` is closed under multiplication by `gens`'s generators
    /// conjugation, i.e. the subgroup is normal.
    pub fn is_normal_elements(&self, elems: &[u32], sub_gens: &[u32]) -> bool {
        let m = self.mask(elems);
        sub_gens.iter().all(|&h| self.gen_elems.iter().all(|&g| m[self.conj(h, g) as usize]))
    }
}

impl FiniteGroup {
    /// Right action of the generators on the right cosets of a subgroup.
    pub fn coset_action(&self, sub: &[u32]) -> Vec<Perm> {
        let mut label = vec![UNSET; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n as u32 {
            if label[x as usize] != UNSET {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(x);
            for &h in sub {
                label[self.mul(h, x) as usize] = c;
            }
        }
        (0..self.ngens())
            .map(|g| Perm::from_images_unchecked(reps.iter().map(|&r| label[self.right[g][r as usize] as usize]).collect()))
            .collect()
    }

    /// Whether no nontrivial element has all its conjugates inside `sub`.
    pub fn is_core_free(&self, sub: &[u32]) -> bool {
        let mask = self.mask(sub);
        let conj: Vec<Vec<u32>> = (0..self.ngens()).map(|g| self.generator_conj_action(g)).collect();
        sub.iter().filter(|&&h| h != 0).all(|&h| {
            // Walk the class of h and stop as soon as it leaves the subgroup.
            let mut seen = vec![h];
            let mut i = 0;
            while i < seen.len() {
                for c in &conj {
                    let y = c[seen[i] as usize];
                    if !mask[y as usize] {
                        return true;
                    }
                    if !seen.contains(&y) {
                        seen.push(y);
                    }
                }
                i += 1;
            }
            false
        })
    }

    /// A faithful permutation representation of smaller degree: the action on
    /// the cosets of the largest core-free cyclic subgroup found, or the
    /// regular representation if there is none.
    pub fn reduced_degree_action(&self) -> PermGroup {
        let orders = self.element_orders();
        let mut best: Option<Vec<u32>> = None;
        let mut seen_sizes = vec![false; self.n + 1];
        let mut candidates: Vec<u32> = (1..self.n as u32).collect();
        candidates.sort_by_key(|&x| (std::cmp::Reverse(orders[x as usize]), x));
        for &x in candidates.iter().take(4096) {
            let o = orders[x as usize] as usize;
            if best.as_ref().is_some_and(|b| b.len() >= o) || seen_sizes[o] && best.is_some() {
                continue;
            }
            let sub = self.closure(&[x]);
            if self.is_core_free(&sub) {
                seen_sizes[o] = true;
                best = Some(sub);
            }
        }
        match best {
            Some(sub) => PermGroup::new(self.n / sub.len(), self.coset_action(&sub)).expect("common degree"),
            None => self.regular_perm_group(),
        }
    }
}

/// Realizes a presentation as an enumerated group by coset enumeration over the trivial subgroup.
pub fn realize_finite(p: &crate::parser::Presentation, max_cosets: usize) -> Result<FiniteGroup> {
    let t = crate::coset::enumerate(p, &[], max_cosets)?;
    Ok(FiniteGroup::from_coset_table(&t))
}

/// Maps an index list through a permutation of indices.
pub fn apply_all(map: &[u32], xs: &[u32]) -> Vec<u32> {
    xs.iter().map(|&x| map[x as usize]).collect()
}

impl FiniteGroup {
    /// Checks a bound, returning an error naming `what`.
    pub fn check_bound(&self, bound: usize, what: &'static str) -> Result<()> {
        if self.n > bound {
            Err(GroupError::BoundExceeded { what, order: self.n as u64, bound: bound as u64 })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_presentation;

    fn grp(text: &str) -> FiniteGroup {
        realize_finite(&parse_presentation(text).unwrap(), 100_000).unwrap()
    }

    #[test]
    fn arithmetic_matches_permutations() {
        let p = PermGroup::from_cycles(5, &["(1,2,3,4,5)", "(1,2)"]).unwrap();
        let g = FiniteGroup::from_perm_group(&p);
        assert_eq!(g.order(), 120);
        // Rebuild the permutation of every element from its word and compare products.
        let perms: Vec<Perm> = (0..120u32)
            .map(|x| {
                let w = g.word_of(x);
                w.syllables().iter().fold(Perm::identity(5), |acc, &(s, e)| acc.mul(&p.generators()[s as usize].pow(e as i64)))
            })
            .collect();
        for x in 0..120u32 {
            for y in (0..120u32).step_by(7) {
                let z = g.mul(x, y);
                assert_eq!(perms[z as usize], perms[x as usize].mul(&perms[y as usize]));
            }
            assert!(perms[g.inv(x) as usize].mul(&perms[x as usize]).is_identity());
            assert_eq!(g.element_order(x) as u64, perms[x as usize].order());
        }
    }

    #[test]
    fn walk_and_table_agree() {
        // Order 5040 is above the table limit, so `mul` walks words.
        let p = PermGroup::from_cycles(7, &["(1,2,3,4,5,6,7)", "(1,2)"]).unwrap();
        let g = FiniteGroup::from_perm_group(&p);
        assert_eq!(g.order(), 5040);
        assert!(g.table.is_none());
        let lm = g.left_mult(17);
        let rm = g.right_mult(29);
        for x in (0..5040u32).step_by(13) {
            assert_eq!(lm[x as usize], g.mul(17, x));
            assert_eq!(rm[x as usize], g.mul(x, 29));
            assert_eq!(g.mul(g.mul(x, 17), 29), g.mul(x, g.mul(17, 29)));
        }
    }

    #[test]
    fn presentations_realize() {
        assert_eq!(grp("a^3 = a*b*a*((b*a*b)^{-1}) = 1").order(), 24);
        assert_eq!(grp("b*a*b*((a*b*a)^{-1}) = (b^2*(a^{-1}))^2 = 1").order(), 48);
        let s3 = grp("a^2 = b^3 = (a*b)^2 = 1");
        assert_eq!(s3.exponent(), 6);
        let w = s3.word_of(5);
        assert_eq!(s3.eval(&w), 5);
    }

    #[test]
    fn homomorphism_extension() {
        let s3 = grp("a^2 = b^3 = (a*b)^2 = 1");
        let gens = s3.generators().to_vec();
        let f = s3.extend_homomorphism(&s3, &gens).unwrap();
        assert_eq!(f, (0..6).collect::<Vec<u32>>());
        // a -> b is not a homomorphism (orders differ).
        assert!(s3.extend_homomorphism(&s3, &[gens[1], gens[0]]).is_none());
        let c2 = grp("x^2 = 1");
        // Sign map S3 -> C2.
        let sign = s3.extend_homomorphism_with(&c2, &[1, 0], false).unwrap();
        assert_eq!(sign.iter().filter(|&&v| v == 1).count(), 3);
    }

    #[test]
    fn regenerate_and_subgroups() {
        let s4 = grp("a^2 = b^3 = (a*b)^4 = 1");
        assert_eq!(s4.order(), 24);
        let x = s4.mul(s4.generators()[0], s4.generators()[1]);
        let (h, emb) = s4.subgroup_group(&[x]);
        assert_eq!(h.order(), 4);
        assert_eq!(emb.len(), 4);
        assert!(s4.regenerate(&[x]).is_none());
        let (g2, map) = s4.regenerate(&[x, s4.generators()[0]]).unwrap();
        assert_eq!(g2.order(), 24);
        assert_eq!(map[0], 0);
    }

    #[test]
    fn reduced_degree_is_faithful() {
        let s4 = grp("a^2 = b^3 = (a*b)^4 = 1");
        let p = s4.reduced_degree_action();
        assert!(p.degree() < 24);
        assert_eq!(p.order(), 24);
        let back = FiniteGroup::from_perm_group(&p);
        assert_eq!(back.order(), 24);
        // Every subgroup of Q8 contains the center, so only the regular action is faithful.
        let q8 = grp("a^4 = a^2*b^-2 = b^-1*a*b*a = 1");
        assert_eq!(q8.reduced_degree_action().degree(), 8);
    }
}
