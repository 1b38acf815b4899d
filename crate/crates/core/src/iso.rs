//! Isomorphism tests and catalog deduplication.

use rayon::prelude::*;

use crate::error::Result;
use crate::finite::FiniteGroup;
use crate::search::{choose_generators, ImageSearch, Invariants};
use crate::structure::{fingerprint_with, Fingerprint};

/// Default bound on group order for isomorphism testing.
pub const ISO_BOUND: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    /// `witness[x]` is the image in B of element `x` of A.
    Isomorphic { witness: Vec<u32> },
    /// Names the invariant that differs, or `"exhaustive search"`.
    NonIsomorphic { reason: String },
    Undecided { reason: String },
}

impl IsoVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic { .. })
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, IsoVerdict::Undecided { .. })
    }
}

/// Precomputed data for one side of an isomorphism test.
pub struct Prepared<'a> {
    pub group: &'a FiniteGroup,
    pub invariants: Invariants,
    pub fingerprint: Fingerprint,
}

impl<'a> Prepared<'a> {
    pub fn new(group: &'a FiniteGroup) -> Result<Self> {
        let invariants = Invariants::compute(group)?;
        let fingerprint = fingerprint_with(group, &invariants.classes);
        Ok(Prepared { group, invariants, fingerprint })
    }
}

pub fn is_isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> Result<IsoVerdict> {
    if a.order() != b.order() {
        return Ok(IsoVerdict::NonIsomorphic { reason: "order".into() });
    }
    if a.order() > ISO_BOUND {
        return Ok(IsoVerdict::Undecided { reason: format!("order {} above bound {ISO_BOUND}", a.order()) });
    }
    Ok(is_isomorphic_prepared(&Prepared::new(a)?, &Prepared::new(b)?))
}

pub fn is_isomorphic_prepared(a: &Prepared, b: &Prepared) -> IsoVerdict {
    if let Some(field) = a.fingerprint.first_difference(&b.fingerprint) {
        return IsoVerdict::NonIsomorphic { reason: field.to_string() };
    }
    match find_isomorphism(a, b) {
        Some(witness) => IsoVerdict::Isomorphic { witness },
        None => IsoVerdict::NonIsomorphic { reason: "exhaustive search".into() },
    }
}

fn find_isomorphism(a: &Prepared, b: &Prepared) -> Option<Vec<u32>> {
    let gens = choose_generators(a.group, &a.invariants);
    let b_pools = b.invariants.pools();
    let mut pools = Vec::with_capacity(gens.len());
    for &s in &gens {
        pools.push(b_pools.get(a.invariants.key(s))?.clone());
    }
    let search = ImageSearch::new(a.group, b.group, gens, pools);
    let mut images = Vec::new();
    if search.complete(&mut images) {
        Some(search.element_map(&images))
    } else {
        None
    }
}

/// Checks that `witness` is a bijective homomorphism `a -> b`.
pub fn verify_witness(a: &FiniteGroup, b: &FiniteGroup, witness: &[u32]) -> bool {
    if witness.len() != a.order() || a.order() != b.order() {
        return false;
    }
    let mut seen = vec![false; b.order()];
    for &y in witness {
        if seen[y as usize] {
            return false;
        }
        seen[y as usize] = true;
    }
    (0..a.order()).all(|x| (0..a.ngens()).all(|g| witness[a.right_action(g)[x] as usize] == b.mul(witness[x], witness[a.generators()[g] as usize])))
}

/// Isomorphism classes of a catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Each class lists catalog indices in increasing order; classes are
    /// ordered by their first (representative) member.
    pub classes: Vec<Vec<usize>>,
    /// Pairs left undecided; their members were kept apart.
    pub undecided: Vec<(usize, usize)>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&i))
    }
}

/// Partitions `groups` into isomorphism classes.  Fingerprints bucket the
/// catalog; within a bucket each group is compared with the representative of
/// every class found so far.
pub fn dedup(groups: &[FiniteGroup]) -> Result<Partition> {
    let prepared: Vec<Prepared> = groups.par_iter().map(Prepared::new).collect::<Result<_>>()?;
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for i in 0..groups.len() {
        match buckets.iter_mut().find(|b| prepared[b[0]].fingerprint == prepared[i].fingerprint) {
            Some(b) => b.push(i),
            None => buckets.push(vec![i]),
        }
    }
    let results: Vec<(Vec<Vec<usize>>, Vec<(usize, usize)>)> = buckets
        .par_iter()
        .map(|bucket| {
            let mut classes: Vec<Vec<usize>> = Vec::new();
            let mut undecided = Vec::new();
            for &i in bucket {
                let mut placed = false;
                for class in classes.iter_mut() {
                    let r = class[0];
                    let verdict = if groups[i].order() > ISO_BOUND {
                        IsoVerdict::Undecided { reason: "bound".into() }
                    } else {
                        is_isomorphic_prepared(&prepared[r], &prepared[i])
                    };
                    match verdict {
                        IsoVerdict::Isomorphic { .. } => {
                            class.push(i);
                            placed = true;
                            break;
                        }
                        IsoVerdict::Undecided { .. } => undecided.push((r, i)),
                        IsoVerdict::NonIsomorphic { .. } => {}
                    }
                }
                if !placed {
                    classes.push(vec![i]);
                }
            }
            (classes, undecided)
        })
        .collect();
    let mut classes = Vec::new();
    let mut undecided = Vec::new();
    for (c, u) in results {
        classes.extend(c);
        undecided.extend(u);
    }
    classes.sort();
    undecided.sort();
    Ok(Partition { classes, undecided })
}
