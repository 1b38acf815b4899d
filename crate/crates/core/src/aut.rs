//! Automorphism groups, completeness and automorphism towers.
//!
//! |Aut(G)| is computed along a stabilizer chain of the action of Aut(G) on
//! tuples of images of a generating sequence `s_1..s_k`: the stabilizer of
//! `s_1..s_{j-1}` has an orbit `O_j` on images of `s_j`, and
//! `|Aut(G)| = |O_1| * … * |O_k|`.  Orbits are grown from automorphisms found
//! so far (inner automorphisms by centralizer elements are free), and every
//! candidate outside the current orbit is settled by backtracking.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GroupError, Result};
use crate::finite::FiniteGroup;
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use crate::search::{choose_generators, ImageSearch, Invariants};
use crate::structure::{center, normal_subgroups, Subgroup};

/// Default bound on |G| for automorphism computation.
pub const AUT_GROUP_BOUND: usize = 100_000;

/// Default bound on |Aut(G)| for realizing it as an enumerated group.
pub const AUT_REALIZE_BOUND: u128 = 100_000;

#[derive(Clone, Debug)]
pub struct AutGroup {
    order: u128,
    group_order: usize,
    center_order: usize,
    search_gens: Vec<u32>,
    orbit_sizes: Vec<usize>,
    /// Strong generators, as maps on element indices of G.
    generators: Vec<Vec<u32>>,
}

impl AutGroup {
    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn inner_order(&self) -> usize {
        self.group_order / self.center_order
    }

    pub fn outer_order(&self) -> u128 {
        self.order / self.inner_order() as u128
    }

    pub fn search_generators(&self) -> &[u32] {
        &self.search_gens
    }

    pub fn orbit_sizes(&self) -> &[usize] {
        &self.orbit_sizes
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    /// Images of the search generating sequence under the `i`-th generator.
    pub fn images(&self, i: usize) -> Vec<u32> {
        self.search_gens.iter().map(|&s| self.generators[i][s as usize]).collect()
    }

    /// Aut(G) acting on the elements of G.
    pub fn perm_group(&self) -> PermGroup {
        let gens: Vec<Perm> = self.generators.iter().map(|m| Perm::from_images(m.clone()).expect("bijection")).collect();
        PermGroup::new(self.group_order, gens).expect("matching degree")
    }

    /// Aut(G) as an enumerated group.  Elements are identified by their images
    /// of the search generators.
    pub fn to_finite_group(&self, bound: u128) -> Result<FiniteGroup> {
        if self.order > bound {
            return Err(GroupError::BoundExceeded {
                what: "automorphism group realization",
                order: self.order as u64,
                bound: bound as u64,
            });
        }
        let gens: Vec<Perm> = self.generators.iter().map(|m| Perm::from_images(m.clone()).expect("bijection")).collect();
        let full = FiniteGroup::from_permutations(&gens, &self.search_gens);
        assert_eq!(full.order() as u128, self.order, "stabilizer chain and enumeration disagree");
        // Keep a short generating list, chosen greedily among the strong generators.
        let mut chosen: Vec<u32> = Vec::new();
        let mut size = 1;
        for &x in full.generators() {
            if size == full.order() {
                break;
            }
            let mut trial = chosen.clone();
            trial.push(x);
            let s = full.closure(&trial).len();
            if s > size {
                chosen = trial;
                size = s;
            }
        }
        Ok(full.regenerate(&chosen).map(|(g, _)| g).unwrap_or(full))
    }
}

/// Computes Aut(G) with an automatically chosen search generating sequence.
pub fn automorphism_group(g: &FiniteGroup) -> Result<AutGroup> {
    g.check_bound(AUT_GROUP_BOUND, "automorphism group")?;
    let inv = Invariants::compute(g)?;
    let gens = choose_generators(g, &inv);
    Ok(automorphism_group_on(g, &inv, gens))
}

/// Computes Aut(G) searching over images of the given generating sequence.
pub fn automorphism_group_with(g: &FiniteGroup, gens: &[u32]) -> Result<AutGroup> {
    g.check_bound(AUT_GROUP_BOUND, "automorphism group")?;
    assert_eq!(g.closure(gens).len(), g.order(), "sequence must generate the group");
    let inv = Invariants::compute(g)?;
    Ok(automorphism_group_on(g, &inv, gens.to_vec()))
}

fn automorphism_group_on(g: &FiniteGroup, inv: &Invariants, gens: Vec<u32>) -> AutGroup {
    let n = g.order();
    let center_order = center(g).order();
    let pools_by_key = inv.pools();
    let pools: Vec<Vec<u32>> = gens.iter().map(|&s| pools_by_key[inv.key(s)].clone()).collect();
    let search = ImageSearch::new(g, g, gens.clone(), pools);
    let k = gens.len();
    let mut known: Vec<Vec<u32>> = Vec::new();
    let mut orbit_sizes = vec![0usize; k];

    for j in (0..k).rev() {
        // Inner automorphisms by the centralizer of the prefix fix the prefix.
        for c in centralizer_generators(g, &gens[..j]) {
            let m = g.conj_action(c);
            if !known.contains(&m) && m.iter().enumerate().any(|(i, &v)| i as u32 != v) {
                known.push(m);
            }
        }
        let mut in_orbit = vec![false; n];
        let mut orbit = vec![gens[j]];
        in_orbit[gens[j] as usize] = true;
        close_orbit(&known, &mut orbit, &mut in_orbit, 0);
        let mut failed = vec![false; n];
        for &y in search.pool(j) {
            if in_orbit[y as usize] || failed[y as usize] {
                continue;
            }
            let mut images: Vec<u32> = gens[..j].to_vec();
            images.push(y);
            if search.prefix_ok(&images) && search.complete(&mut images) {
                let m = search.element_map(&images);
                known.push(m);
                // A new generator can move any orbit point, so rescan from the start.
                close_orbit(&known, &mut orbit, &mut in_orbit, 0);
            } else {
                let mut fo = vec![y];
                let mut fmask = vec![false; n];
                fmask[y as usize] = true;
                close_orbit(&known, &mut fo, &mut fmask, 0);
                for z in fo {
                    failed[z as usize] = true;
                }
            }
        }
        orbit_sizes[j] = orbit.len();
    }
    let order = orbit_sizes.iter().map(|&s| s as u128).product();
    AutGroup { order, group_order: n, center_order, search_gens: gens, orbit_sizes, generators: known }
}

/// Closes `orbit` under the maps, rescanning from `from`.
fn close_orbit(maps: &[Vec<u32>], orbit: &mut Vec<u32>, mask: &mut [bool], from: usize) {
    let mut i = from;
    while i < orbit.len() {
        let x = orbit[i];
        for m in maps {
            let y = m[x as usize];
            if !mask[y as usize] {
                mask[y as usize] = true;
                orbit.push(y);
            }
        }
        i += 1;
    }
}

/// A generating set of the centralizer of `xs`.
fn centralizer_generators(g: &FiniteGroup, xs: &[u32]) -> Vec<u32> {
    if xs.is_empty() {
        return g.generators().to_vec();
    }
    let elems: Vec<u32> = (0..g.order() as u32).filter(|&c| xs.iter().all(|&x| g.mul(x, c) == g.mul(c, x))).collect();
    let mut gens = Vec::new();
    let mut mask = g.mask(&[0]);
    let mut size = 1;
    for &c in &elems {
        if size == elems.len() {
            break;
        }
        if !mask[c as usize] {
            gens.push(c);
            let sub = g.closure(&gens);
            size = sub.len();
            mask = g.mask(&sub);
        }
    }
    gens
}

/// The inner automorphism group as a subgroup of Aut(G) acting on elements.
pub fn inner_automorphisms(g: &FiniteGroup) -> FiniteGroup {
    if g.ngens() == 0 {
        return FiniteGroup::trivial();
    }
    let maps: Vec<Perm> = g.generators().iter().map(|&s| Perm::from_images(g.conj_action(s)).expect("bijection")).collect();
    FiniteGroup::from_permutations(&maps, &(0..g.order() as u32).collect::<Vec<_>>())
}

/// Trivial center and every automorphism inner.
pub fn is_complete(g: &FiniteGroup) -> Result<bool> {
    if center(g).order() != 1 {
        return Ok(false);
    }
    Ok(automorphism_group(g)?.order() == g.order() as u128)
}

fn odd_primes(mut n: u128) -> Vec<u64> {
    let mut out = Vec::new();
    while n.is_multiple_of(2) && n > 0 {
        n /= 2;
    }
    let mut p = 3u128;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p as u64);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

/// Draws from Aut(G) used when looking for elements of a given prime order.
const ODD_ORDER_DRAWS: usize = 4000;

/// One automorphism of order p for each odd prime p dividing |Aut(G)|, as
/// element maps.  G must be a 2-group.
pub fn odd_order_automorphisms(g: &FiniteGroup, seed: u64) -> Result<Vec<(u64, Vec<u32>)>> {
    if !g.order().is_power_of_two() {
        return Err(GroupError::Construction(format!("order {} is not a power of two", g.order())));
    }
    let aut = automorphism_group(g)?;
    let primes = odd_primes(aut.order());
    if primes.is_empty() {
        return Ok(Vec::new());
    }
    let pg = aut.perm_group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for p in primes {
        let mut found = None;
        for _ in 0..ODD_ORDER_DRAWS {
            let x = pg.random_element_with(&mut rng);
            let o = x.order();
            if o % p == 0 {
                found = Some(x.pow((o / p) as i64));
                break;
            }
        }
        let x = found.ok_or_else(|| GroupError::Construction(format!("no element of order {p} found")))?;
        out.push((p, x.images().to_vec()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerStatus {
    Complete,
    Capacity,
    MaxSteps,
}

impl fmt::Display for TowerStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TowerStatus::Complete => "complete",
            TowerStatus::Capacity => "capacity",
            TowerStatus::MaxSteps => "max_steps",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStep {
    pub order: u128,
    pub center_order: usize,
}

#[derive(Clone, Debug)]
pub struct TowerReport {
    pub steps: Vec<TowerStep>,
    pub status: TowerStatus,
}

impl TowerReport {
    pub fn orders(&self) -> Vec<u128> {
        self.steps.iter().map(|s| s.order).collect()
    }

    /// TSV with columns step, order, center_order, status.  The status column
    /// is filled on the last row only.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("step\torder\tcenter_order\tstatus\n");
        for (i, s) in self.steps.iter().enumerate() {
            let status = if i + 1 == self.steps.len() { self.status.to_string() } else { String::new() };
            out.push_str(&format!("{i}\t{}\t{}\t{status}\n", s.order, s.center_order));
        }
        out
    }
}

/// Iterates G, Aut(G), Aut(Aut(G)), … until a complete group, `max_steps`
/// groups, or a group above `max_order`.
pub fn automorphism_tower(g: &FiniteGroup, max_steps: usize, max_order: u128) -> Result<TowerReport> {
    let mut steps = Vec::new();
    let mut cur = g.clone();
    loop {
        let z = center(&cur).order();
        steps.push(TowerStep { order: cur.order() as u128, center_order: z });
        if cur.order() > AUT_GROUP_BOUND {
            return Ok(TowerReport { steps, status: TowerStatus::Capacity });
        }
        let aut = automorphism_group(&cur)?;
        if z == 1 && aut.order() == cur.order() as u128 {
            return Ok(TowerReport { steps, status: TowerStatus::Complete });
        }
        if steps.len() >= max_steps {
            return Ok(TowerReport { steps, status: TowerStatus::MaxSteps });
        }
        if aut.order() > max_order {
            steps.push(TowerStep { order: aut.order(), center_order: 0 });
            return Ok(TowerReport { steps, status: TowerStatus::Capacity });
        }
        cur = aut.to_finite_group(max_order)?;
    }
}

/// Normal subgroups of `h` isomorphic to `g`.
pub fn isomorphic_normal_subgroups(h: &FiniteGroup, g: &FiniteGroup) -> Result<Vec<Subgroup>> {
    let mut out = Vec::new();
    for s in normal_subgroups(h, Some(g.order()))? {
        let sg = s.as_group(h);
        if crate::iso::is_isomorphic(&sg, g)?.is_isomorphic() {
            out.push(s);
        }
    }
    Ok(out)
}

/// Compares the ratio of the number of normal copies of G in Aut²(G) and in
/// Aut(G) with the ratio of their orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub copies_in_aut: usize,
    pub copies_in_aut2: usize,
    pub aut_order: usize,
    pub aut2_order: usize,
}

impl MultiplicityReport {
    pub fn ratio_matches(&self) -> bool {
        self.copies_in_aut2 * self.aut_order == self.copies_in_aut * self.aut2_order
    }
}

pub fn multiplicity_heuristic_check(g: &FiniteGroup, aut_g: &FiniteGroup, aut2_g: &FiniteGroup) -> Result<MultiplicityReport> {
    Ok(MultiplicityReport {
        copies_in_aut: isomorphic_normal_subgroups(aut_g, g)?.len(),
        copies_in_aut2: isomorphic_normal_subgroups(aut2_g, g)?.len(),
        aut_order: aut_g.order(),
        aut2_order: aut2_g.order(),
    })
}
