//! Permutation groups with a deterministic Schreier–Sims stabilizer chain.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GroupError, Result};
use crate::perm::Perm;

const UNSEEN: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Clone, Debug)]
struct Level {
    point: u32,
    /// Indices into the strong generating set of generators fixing all earlier base points.
    gens: Vec<usize>,
    orbit: Vec<u32>,
    /// Schreier vector: strong generator index that reached each orbit point.
    sv: Vec<u32>,
    /// Number of level generators already paired with each orbit point.
    done: Vec<usize>,
}

/// Base and strong generating set.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    sgs: Vec<Perm>,
    sgs_inv: Vec<Perm>,
    levels: Vec<Level>,
}

impl StabChain {
    fn new(degree: usize) -> Self {
        StabChain { degree, sgs: Vec::new(), sgs_inv: Vec::new(), levels: Vec::new() }
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.sgs
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    fn push_level(&mut self, point: u32) {
        let mut sv = vec![UNSEEN; self.degree];
        sv[point as usize] = ROOT;
        self.levels.push(Level { point, gens: Vec::new(), orbit: vec![point], sv, done: vec![0] });
    }

    /// Extends the orbit at `level` using all of its current generators.
    fn extend_orbit(&mut self, level: usize) {
        let lv = &mut self.levels[level];
        let mut i = 0;
        while i < lv.orbit.len() {
            let b = lv.orbit[i];
            for &s in &lv.gens {
                let c = self.sgs[s].apply(b);
                if lv.sv[c as usize] == UNSEEN {
                    lv.sv[c as usize] = s as u32;
                    lv.orbit.push(c);
                    lv.done.push(0);
                }
            }
            i += 1;
        }
    }

    /// Multiplies `g` on the right by the inverse of the transversal element for `beta`.
    fn unwind(&self, level: usize, g: &mut Perm, mut beta: u32) {
        let lv = &self.levels[level];
        while lv.sv[beta as usize] != ROOT {
            let s = lv.sv[beta as usize] as usize;
            *g = g.mul(&self.sgs_inv[s]);
            beta = self.sgs_inv[s].apply(beta);
        }
    }

    fn transversal(&self, level: usize, beta: u32) -> Perm {
        let mut g = Perm::identity(self.degree);
        self.unwind(level, &mut g, beta);
        g.inverse()
    }

    /// Sifts `g` from level `from`; returns the residue and the level where sifting stopped.
    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for l in from..self.levels.len() {
            let beta = g.apply(self.levels[l].point);
            if self.levels[l].sv[beta as usize] == UNSEEN {
                return (g, l);
            }
            self.unwind(l, &mut g, beta);
        }
        let n = self.levels.len();
        (g, n)
    }

    fn add_strong_generator(&mut self, g: Perm) -> usize {
        self.sgs_inv.push(g.inverse());
        self.sgs.push(g);
        self.sgs.len() - 1
    }

    /// Builds the chain for `gens` deterministically, choosing the lowest moved point
    /// whenever a new base point is needed.
    fn build(degree: usize, gens: &[Perm]) -> Self {
        let mut ch = StabChain::new(degree);
        for g in gens {
            if g.is_identity() {
                continue;
            }
            let idx = ch.add_strong_generator(g.clone());
            if ch.base().iter().all(|&b| g.apply(b) == b) {
                let p = g.first_moved_point().unwrap();
                ch.push_level(p);
            }
            let _ = idx;
        }
        for l in 0..ch.levels.len() {
            let base: Vec<u32> = ch.levels[..l].iter().map(|lv| lv.point).collect();
            ch.levels[l].gens = (0..ch.sgs.len()).filter(|&s| base.iter().all(|&b| ch.sgs[s].apply(b) == b)).collect();
            ch.extend_orbit(l);
        }
        ch.schreier_sims();
        ch
    }

    fn schreier_sims(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() as isize - 1;
        'outer: while i >= 0 {
            let l = i as usize;
            let mut k = 0;
            while k < self.levels[l].orbit.len() {
                let beta = self.levels[l].orbit[k];
                while self.levels[l].done[k] < self.levels[l].gens.len() {
                    let s = self.levels[l].gens[self.levels[l].done[k]];
                    self.levels[l].done[k] += 1;
                    let u = self.transversal(l, beta);
                    let mut h = u.mul(&self.sgs[s]);
                    let img = h.apply(self.levels[l].point);
                    self.unwind(l, &mut h, img);
                    if h.is_identity() {
                        continue;
                    }
                    let (y, j) = self.strip(h, l + 1);
                    if j < self.levels.len() || !y.is_identity() {
                        if j == self.levels.len() {
                            let p = y.first_moved_point().unwrap();
                            self.push_level(p);
                        }
                        let idx = self.add_strong_generator(y);
                        for m in (l + 1)..=j {
                            self.levels[m].gens.push(idx);
                            self.extend_orbit(m);
                        }
                        i = j as isize;
                        continue 'outer;
                    }
                }
                k += 1;
            }
            i -= 1;
        }
    }

    fn contains(&self, x: &Perm) -> bool {
        let (y, j) = self.strip(x.clone(), 0);
        j == self.levels.len() && y.is_identity()
    }
}

/// A permutation group given by generators; the stabilizer chain is built on first use.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<StabChain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        PermGroup { degree: self.degree, gens: self.gens.clone(), chain }
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch { expected: degree, got: g.degree() });
            }
        }
        Ok(PermGroup { degree, gens, chain: OnceLock::new() })
    }

    /// Parses generators written in cycle notation.
    pub fn from_cycles(degree: usize, gens: &[&str]) -> Result<Self> {
        let gens = gens.iter().map(|g| Perm::from_cycles(g, degree)).collect::<Result<Vec<_>>>()?;
        PermGroup::new(degree, gens)
    }

    /// A group known to act regularly (for instance the right-regular action on the
    /// cosets of the trivial subgroup).  The stabilizer of point 0 is trivial, so the
    /// chain has a single level.
    pub fn regular(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        let g = PermGroup::new(degree, gens)?;
        let mut ch = StabChain::new(degree);
        if degree > 1 {
            for p in &g.gens {
                ch.add_strong_generator(p.clone());
            }
            ch.push_level(0);
            ch.levels[0].gens = (0..ch.sgs.len()).collect();
            ch.extend_orbit(0);
            let done = ch.levels[0].gens.len();
            ch.levels[0].done = vec![done; ch.levels[0].orbit.len()];
            if ch.levels[0].orbit.len() != degree {
                return Err(GroupError::InvalidPermutation("regular action is not transitive".into()));
            }
        }
        let _ = g.chain.set(ch);
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| StabChain::build(self.degree, &self.gens))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn contains(&self, x: &Perm) -> Result<bool> {
        if x.degree() != self.degree {
            return Err(GroupError::DegreeMismatch { expected: self.degree, got: x.degree() });
        }
        Ok(self.chain().contains(x))
    }

    /// Uniformly random element, reproducible for a given seed.
    pub fn random_element(&self, seed: u64) -> Perm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_element_with(&mut rng)
    }

    pub fn random_element_with<R: Rng>(&self, rng: &mut R) -> Perm {
        let ch = self.chain();
        let mut g = Perm::identity(self.degree);
        for l in (0..ch.levels.len()).rev() {
            let orbit = &ch.levels[l].orbit;
            let beta = orbit[rng.gen_range(0..orbit.len())];
            g = g.mul(&ch.transversal(l, beta));
        }
        g
    }

    /// Checks the chain against random products of the original generators.
    pub fn verify_chain(&self, trials: usize, seed: u64) -> bool {
        if self.gens.is_empty() {
            return self.order() == 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = self.chain();
        if !self.gens.iter().all(|g| ch.contains(g)) {
            return false;
        }
        (0..trials).all(|_| {
            let len = rng.gen_range(1..20);
            let mut x = Perm::identity(self.degree);
            for _ in 0..len {
                x = x.mul(&self.gens[rng.gen_range(0..self.gens.len())]);
            }
            ch.contains(&x)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Closure of the generators by brute-force multiplication.
    fn brute_elements(g: &PermGroup) -> HashSet<Perm> {
        let mut set = HashSet::new();
        let id = Perm::identity(g.degree());
        set.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for s in g.generators() {
                let y = x.mul(s);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    #[test]
    fn appendix_degree_eight_pair() {
        let g = PermGroup::from_cycles(8, &["(1,2,3,4)(5,7)", "(1,2)(5,8,6,7)"]).unwrap();
        assert_eq!(g.order(), 96);
        assert_eq!(brute_elements(&g).len(), 96);
        assert!(g.verify_chain(100, 1));
    }

    #[test]
    fn small_groups_against_brute_force() {
        let cases: Vec<(usize, Vec<&str>)> = vec![
            (3, vec!["(1,2)", "(1,2,3)"]),
            (5, vec!["(1,2,3,4,5)", "(1,2)"]),
            (6, vec!["(1,2,3)(4,5,6)", "(1,4)(2,5)(3,6)", "(1,2)"]),
            (7, vec!["(1,2,3,4,5,6,7)", "(2,3,5)(4,7,6)"]),
            (9, vec!["(1,2,3)", "(4,5,6)", "(7,8,9)", "(1,4,7)(2,5,8)(3,6,9)"]),
            (4, vec![]),
        ];
        for (n, gens) in cases {
            let g = PermGroup::from_cycles(n, &gens).unwrap();
            let els = brute_elements(&g);
            assert_eq!(g.order(), els.len() as u128, "{gens:?}");
            for x in &els {
                assert!(g.contains(x).unwrap());
            }
            assert!(g.verify_chain(100, 7));
        }
    }

    #[test]
    fn membership() {
        let g = PermGroup::from_cycles(3, &["(1,2,3)"]).unwrap();
        assert!(!g.contains(&Perm::from_cycles("(1,2)", 3).unwrap()).unwrap());
        assert!(g.contains(&Perm::identity(3)).unwrap());
        assert!(g.contains(&Perm::identity(4)).is_err());
    }

    #[test]
    fn random_elements() {
        let trivial = PermGroup::new(4, vec![]).unwrap();
        assert!(trivial.random_element(3).is_identity());
        let c2 = PermGroup::from_cycles(2, &["(1,2)"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let hits: HashSet<Perm> = (0..20).map(|_| c2.random_element_with(&mut rng)).collect();
        assert_eq!(hits.len(), 2);
        assert_eq!(c2.random_element(5), c2.random_element(5));

        // Chi-square sanity check on S3: 6000 draws, 5 degrees of freedom.
        let s3 = PermGroup::from_cycles(3, &["(1,2)", "(1,2,3)"]).unwrap();
        let els: Vec<Perm> = brute_elements(&s3).into_iter().collect();
        let mut counts = [0f64; 6];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..6000 {
            let x = s3.random_element_with(&mut rng);
            counts[els.iter().position(|e| *e == x).unwrap()] += 1.0;
        }
        let chi2: f64 = counts.iter().map(|c| (c - 1000.0).powi(2) / 1000.0).sum();
        // 20.52 is the 0.999 quantile of chi-square with 5 degrees of freedom.
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn regular_shortcut_matches_full_chain() {
        let a = Perm::from_images(vec![1, 2, 0, 4, 5, 3]).unwrap();
        let b = Perm::from_images(vec![3, 5, 4, 0, 2, 1]).unwrap();
        let r = PermGroup::regular(6, vec![a.clone(), b.clone()]).unwrap();
        let g = PermGroup::new(6, vec![a, b]).unwrap();
        assert_eq!(r.order(), 6);
        assert_eq!(g.order(), 6);
    }
}
