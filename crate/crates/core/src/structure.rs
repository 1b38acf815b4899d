//! Structural invariants of enumerated groups.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{GroupError, Result};
use crate::finite::FiniteGroup;

/// Default bound on |G| for normal-subgroup enumeration.
pub const NORMAL_SUBGROUP_BOUND: usize = 5000;

/// Default bound on |G| for conjugacy-class computation.
pub const CLASS_BOUND: usize = 1_000_000;

/// A subgroup given by its sorted element list and a generating set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<u32>,
    gens: Vec<u32>,
}

impl Subgroup {
    pub fn generated(g: &FiniteGroup, gens: &[u32]) -> Self {
        let mut elements = g.closure(gens);
        elements.sort_unstable();
        let gens = gens.iter().copied().filter(|&x| x != 0).collect();
        Subgroup { elements, gens }
    }

    pub fn trivial() -> Self {
        Subgroup { elements: vec![0], gens: Vec::new() }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup { elements: (0..g.order() as u32).collect(), gens: g.generators().to_vec() }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// The subgroup as a group in its own right.
    pub fn as_group(&self, g: &FiniteGroup) -> FiniteGroup {
        g.subgroup_group(&self.gens).0
    }
}

/// Conjugacy classes.  Classes are listed by increasing representative, and
/// each representative is the least element index in its class.
#[derive(Clone, Debug)]
pub struct Classes {
    pub class_of: Vec<u32>,
    pub reps: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn members(&self, c: usize) -> Vec<u32> {
        (0..self.class_of.len() as u32).filter(|&x| self.class_of[x as usize] == c as u32).collect()
    }
}

pub fn conjugacy_classes(g: &FiniteGroup) -> Result<Classes> {
    g.check_bound(CLASS_BOUND, "conjugacy classes")?;
    let n = g.order();
    let actions: Vec<Vec<u32>> = (0..g.ngens()).map(|i| g.generator_conj_action(i)).collect();
    let mut class_of = vec![u32::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for x in 0..n {
        if class_of[x] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x as u32);
        class_of[x] = c;
        queue.clear();
        queue.push(x as u32);
        let mut i = 0;
        while i < queue.len() {
            let y = queue[i];
            for a in &actions {
                let z = a[y as usize];
                if class_of[z as usize] == u32::MAX {
                    class_of[z as usize] = c;
                    queue.push(z);
                }
            }
            i += 1;
        }
        sizes.push(queue.len());
    }
    Ok(Classes { class_of, reps, sizes })
}

/// Per element order: (element count, class count), plus the class total.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassOrderStructure {
    pub ncl: usize,
    pub per_order: BTreeMap<u32, (u64, u32)>,
}

impl ClassOrderStructure {
    /// Checks `1 + sum n_o = order` and `1 + sum c_o = ncl`.
    pub fn is_consistent(&self, order: u64) -> bool {
        let elems: u64 = self.per_order.values().map(|v| v.0).sum();
        let cls: u64 = self.per_order.values().map(|v| v.1 as u64).sum();
        1 + elems == order && 1 + cls == self.ncl as u64 && self.per_order.keys().all(|&o| o >= 2)
    }
}

/// Compact text `o:n/c o:n/c …`, identity omitted.
impl fmt::Display for ClassOrderStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (o, (n, c)) in &self.per_order {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{o}:{n}/{c}")?;
        }
        Ok(())
    }
}

impl FromStr for ClassOrderStructure {
    type Err = String;

    /// Parses the compact form; `ncl` is inferred as one plus the class total.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut per_order = BTreeMap::new();
        for item in s.split_whitespace() {
            let (o, rest) = item.split_once(':').ok_or_else(|| format!("bad item `{item}`"))?;
            let (n, c) = rest.split_once('/').ok_or_else(|| format!("bad item `{item}`"))?;
            let o: u32 = o.parse().map_err(|_| format!("bad order in `{item}`"))?;
            let n: u64 = n.parse().map_err(|_| format!("bad count in `{item}`"))?;
            let c: u32 = c.parse().map_err(|_| format!("bad class count in `{item}`"))?;
            if per_order.insert(o, (n, c)).is_some() {
                return Err(format!("order {o} repeated"));
            }
        }
        let ncl = 1 + per_order.values().map(|v| v.1 as usize).sum::<usize>();
        Ok(ClassOrderStructure { ncl, per_order })
    }
}

pub fn class_order_structure(g: &FiniteGroup, classes: &Classes) -> ClassOrderStructure {
    let orders = g.element_orders();
    let mut per_order: BTreeMap<u32, (u64, u32)> = BTreeMap::new();
    for (c, &r) in classes.reps.iter().enumerate() {
        let o = orders[r as usize];
        if o == 1 {
            continue;
        }
        let e = per_order.entry(o).or_default();
        e.0 += classes.sizes[c] as u64;
        e.1 += 1;
    }
    ClassOrderStructure { ncl: classes.len(), per_order }
}

pub fn center(g: &FiniteGroup) -> Subgroup {
    let actions: Vec<Vec<u32>> = (0..g.ngens()).map(|i| g.generator_conj_action(i)).collect();
    let elements: Vec<u32> = (0..g.order() as u32).filter(|&x| actions.iter().all(|a| a[x as usize] == x)).collect();
    let gens = minimal_generators(g, &elements);
    Subgroup { elements, gens }
}

/// A small generating set for a subgroup given by its elements, chosen greedily
/// in index order.
fn minimal_generators(g: &FiniteGroup, elements: &[u32]) -> Vec<u32> {
    let mut gens = Vec::new();
    let mut mask = g.mask(&[0]);
    let mut size = 1;
    for &x in elements {
        if size == elements.len() {
            break;
        }
        if !mask[x as usize] {
            gens.push(x);
            let sub = g.closure(&gens);
            size = sub.len();
            mask = g.mask(&sub);
        }
    }
    gens
}

/// The smallest normal subgroup containing `gens`.
pub fn normal_closure(g: &FiniteGroup, gens: &[u32]) -> Subgroup {
    let mut hgens: Vec<u32> = gens.iter().copied().filter(|&x| x != 0).collect();
    let mut elems = g.closure(&hgens);
    let mut mask = g.mask(&elems);
    let mut i = 0;
    while i < hgens.len() {
        let h = hgens[i];
        for &s in g.generators() {
            let c = g.conj(h, s);
            if !mask[c as usize] {
                hgens.push(c);
                elems = g.closure(&hgens);
                mask = g.mask(&elems);
            }
        }
        i += 1;
    }
    elems.sort_unstable();
    Subgroup { elements: elems, gens: hgens }
}

pub fn derived_subgroup(g: &FiniteGroup) -> Subgroup {
    let gens = g.generators();
    let mut comms = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            comms.push(g.comm(gens[i], gens[j]));
        }
    }
    normal_closure(g, &comms)
}

/// Orders of G, G', G'', … down to the first perfect term.
pub fn derived_series(g: &FiniteGroup) -> Vec<usize> {
    let mut out = vec![g.order()];
    let mut cur = g.clone();
    loop {
        let d = derived_subgroup(&cur);
        if d.order() == cur.order() {
            break;
        }
        out.push(d.order());
        if d.order() == 1 {
            break;
        }
        cur = d.as_group(&cur);
    }
    out
}

pub fn is_normal(g: &FiniteGroup, h: &Subgroup) -> bool {
    h.gens.iter().all(|&x| g.generators().iter().all(|&s| h.contains(g.conj(x, s))))
}

fn prime_part(n: usize, p: usize) -> usize {
    let mut m = n;
    let mut q = 1;
    while m.is_multiple_of(p) {
        m /= p;
        q *= p;
    }
    q
}

/// A Sylow p-subgroup, grown one factor of p at a time inside normalizers.
pub fn sylow_subgroup(g: &FiniteGroup, p: usize) -> Result<Subgroup> {
    let n = g.order();
    if p < 2 || !n.is_multiple_of(p) {
        return Err(GroupError::PrimeDoesNotDivide { p: p as u64, order: n as u64 });
    }
    let target = prime_part(n, p);
    let mut sub = Subgroup::trivial();
    while sub.order() < target {
        let mask = g.mask(&sub.elements);
        let mut grown = false;
        for x in 1..n as u32 {
            if mask[x as usize] || !sub.gens.iter().all(|&h| mask[g.conj(h, x) as usize]) {
                continue;
            }
            // Order of x modulo the subgroup.
            let mut m = 1usize;
            let mut y = x;
            while !mask[y as usize] {
                y = g.mul(y, x);
                m += 1;
            }
            if m.is_multiple_of(p) {
                let z = g.pow(x, (m / p) as i64);
                let mut gens = sub.gens.clone();
                gens.push(z);
                sub = Subgroup::generated(g, &gens);
                grown = true;
                break;
            }
        }
        assert!(grown, "normalizer argument guarantees growth");
    }
    Ok(sub)
}

pub fn has_normal_sylow(g: &FiniteGroup, p: usize) -> Result<bool> {
    if !g.order().is_multiple_of(p) {
        return Ok(true);
    }
    Ok(is_normal(g, &sylow_subgroup(g, p)?))
}

/// All normal subgroups (optionally only those of `order_filter`), sorted by
/// order and then by element list.
pub fn normal_subgroups(g: &FiniteGroup, order_filter: Option<usize>) -> Result<Vec<Subgroup>> {
    g.check_bound(NORMAL_SUBGROUP_BOUND, "normal subgroups")?;
    let classes = conjugacy_classes(g)?;
    let mut found: Vec<Subgroup> = Vec::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut add = |s: Subgroup, found: &mut Vec<Subgroup>| {
        if seen.insert(s.elements.clone()) {
            found.push(s);
        }
    };
    add(Subgroup::trivial(), &mut found);
    let mut minimal_closures = Vec::new();
    for &r in classes.reps.iter().skip(1) {
        let s = normal_closure(g, &[r]);
        minimal_closures.push(s.clone());
        add(s, &mut found);
    }
    // Every normal subgroup is generated by the closures of the classes it
    // contains, so closing under joins with class closures is complete.
    let mut i = 0;
    while i < found.len() {
        let cur = found[i].clone();
        for c in &minimal_closures {
            if c.elements.iter().all(|&x| cur.contains(x)) {
                continue;
            }
            let mut gens = cur.gens.clone();
            gens.extend_from_slice(&c.gens);
            let s = normal_closure(g, &gens);
            add(s, &mut found);
        }
        i += 1;
    }
    let mut out: Vec<Subgroup> = found.into_iter().filter(|s| order_filter.is_none_or(|o| s.order() == o)).collect();
    out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(out)
}

/// The quotient G/N as an enumerated group on the images of G's generators.
pub fn quotient(g: &FiniteGroup, n: &Subgroup) -> Result<FiniteGroup> {
    if !is_normal(g, n) {
        return Err(GroupError::NotNormal);
    }
    let size = g.order();
    let mut label = vec![u32::MAX; size];
    let mut reps = Vec::new();
    for x in 0..size as u32 {
        if label[x as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x);
        for &h in &n.elements {
            label[g.mul(h, x) as usize] = c;
        }
    }
    let actions: Vec<Vec<u32>> = (0..g.ngens())
        .map(|i| reps.iter().map(|&r| label[g.right_action(i)[r as usize] as usize]).collect())
        .collect();
    if actions.is_empty() {
        return Ok(FiniteGroup::trivial());
    }
    Ok(FiniteGroup::from_regular_action(&actions, label[0]))
}

/// Invariant factors of an abelian group, each dividing the next.
pub fn abelian_invariants(a: &FiniteGroup) -> Vec<u64> {
    let n = a.order() as u64;
    let orders = a.element_orders();
    let mut elementary: Vec<Vec<u64>> = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while m > 1 {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            // counts[k] = #{x : x^(p^k) = 1 and x has p-power order}.
            let mut counts = Vec::new();
            for k in 0..=e {
                let pk = p.pow(k);
                counts.push(orders.iter().filter(|&&o| pk % o as u64 == 0).count() as u64);
            }
            // Number of cyclic factors of exponent >= k is log_p(counts[k]/counts[k-1]).
            let mut ge = Vec::new();
            for k in 1..=e as usize {
                let ratio = counts[k] / counts[k - 1];
                ge.push(ilog(ratio, p));
            }
            let mut factors = Vec::new();
            for k in 1..=e as usize {
                let next = if k < e as usize { ge[k] } else { 0 };
                for _ in 0..(ge[k - 1] - next) {
                    factors.push(p.pow(k as u32));
                }
            }
            elementary.push(factors);
        }
        p += 1;
    }
    // Combine prime-power factors into invariant factors.
    let rank = elementary.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut inv = vec![1u64; rank];
    for mut fs in elementary {
        fs.sort_unstable();
        let off = rank - fs.len();
        for (i, f) in fs.into_iter().enumerate() {
            inv[off + i] *= f;
        }
    }
    inv
}

fn ilog(mut x: u64, p: u64) -> u64 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

pub fn abelianization(g: &FiniteGroup) -> Vec<u64> {
    let d = derived_subgroup(g);
    let q = quotient(g, &d).expect("derived subgroup is normal");
    abelian_invariants(&q)
}

/// An isomorphism-invariant summary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub order: usize,
    pub classes: ClassOrderStructure,
    pub center_order: usize,
    pub derived_series: Vec<usize>,
    pub abelianization: Vec<u64>,
    pub exponent: u64,
    /// Sorted (class size, element order, [(p, size and order of the p-th power class)]).
    pub power_map: Vec<(usize, u32, Vec<(u32, usize, u32)>)>,
}

impl Fingerprint {
    /// The first field (in refinement order) on which two fingerprints differ.
    pub fn first_difference(&self, other: &Fingerprint) -> Option<&'static str> {
        if self.order != other.order {
            Some("order")
        } else if self.classes != other.classes {
            Some("class/order structure")
        } else if self.center_order != other.center_order {
            Some("center order")
        } else if self.derived_series != other.derived_series {
            Some("derived series")
        } else if self.abelianization != other.abelianization {
            Some("abelianization")
        } else if self.exponent != other.exponent {
            Some("exponent")
        } else if self.power_map != other.power_map {
            Some("power map")
        } else {
            None
        }
    }
}

pub fn fingerprint(g: &FiniteGroup) -> Result<Fingerprint> {
    let classes = conjugacy_classes(g)?;
    Ok(fingerprint_with(g, &classes))
}

pub fn fingerprint_with(g: &FiniteGroup, classes: &Classes) -> Fingerprint {
    let orders = g.element_orders();
    let mut primes = Vec::new();
    let mut m = g.order() as u32;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            primes.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    let mut power_map: Vec<(usize, u32, Vec<(u32, usize, u32)>)> = classes
        .reps
        .iter()
        .enumerate()
        .map(|(c, &r)| {
            let pw = primes
                .iter()
                .map(|&p| {
                    let y = g.pow(r, p as i64);
                    let cy = classes.class_of[y as usize] as usize;
                    (p, classes.sizes[cy], orders[y as usize])
                })
                .collect();
            (classes.sizes[c], orders[r as usize], pw)
        })
        .collect();
    power_map.sort();
    Fingerprint {
        order: g.order(),
        classes: class_order_structure(g, classes),
        center_order: classes.sizes.iter().filter(|&&s| s == 1).count(),
        derived_series: derived_series(g),
        abelianization: abelianization(g),
        exponent: g.exponent(),
        power_map,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::realize_finite;
    use crate::parser::parse_presentation;

    fn grp(text: &str) -> FiniteGroup {
        realize_finite(&parse_presentation(text).unwrap(), 100_000).unwrap()
    }

    const S4: &str = "a^2 = b^3 = (a*b)^4 = 1";
    const SL23: &str = "a^3 = a*b*a*((b*a*b)^{-1}) = 1";

    #[test]
    fn s4_classes() {
        let g = grp(S4);
        let c = conjugacy_classes(&g).unwrap();
        let mut sizes = c.sizes.clone();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
        assert_eq!(class_order_structure(&g, &c).to_string(), "2:9/2 3:8/1 4:6/1");
        assert_eq!(derived_series(&g), vec![24, 12, 4, 1]);
        assert_eq!(center(&g).order(), 1);
        assert_eq!(abelianization(&g), vec![2]);
    }

    #[test]
    fn sl23_structure() {
        let p = parse_presentation(SL23).unwrap();
        let g = realize_finite(&p, 1000).unwrap();
        let z = center(&g);
        assert_eq!(z.order(), 2);
        let w = p.parse_word("(a*b^-1)^2").unwrap();
        assert!(z.contains(g.eval(&w)) && g.eval(&w) != 0);
        assert_eq!(derived_subgroup(&g).order(), 8);
        let a4 = quotient(&g, &z).unwrap();
        assert_eq!(a4.order(), 12);
        assert_eq!(fingerprint(&a4).unwrap(), fingerprint(&grp("x^2 = y^3 = (y*x)^3 = 1")).unwrap());
        assert_eq!(sylow_subgroup(&g, 2).unwrap().order(), 8);
        assert!(has_normal_sylow(&g, 2).unwrap());
        assert!(!has_normal_sylow(&g, 3).unwrap());
    }

    #[test]
    fn normal_subgroup_lists() {
        let a5 = grp("a^2 = b^3 = (a*b)^5 = 1");
        assert_eq!(normal_subgroups(&a5, None).unwrap().len(), 2);
        let v4 = grp("a^2 = b^2 = (a,b) = 1");
        assert_eq!(normal_subgroups(&v4, None).unwrap().len(), 5);
        let s4 = grp(S4);
        let orders: Vec<usize> = normal_subgroups(&s4, None).unwrap().iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 4, 12, 24]);
        assert_eq!(normal_subgroups(&s4, Some(12)).unwrap().len(), 1);
    }

    #[test]
    fn abelian_invariant_factors() {
        assert_eq!(abelian_invariants(&grp("a^4 = b^6 = (a,b) = 1")), vec![2, 12]);
        assert_eq!(abelian_invariants(&grp("a^2 = b^2 = c^2 = (a,b) = (a,c) = (b,c) = 1")), vec![2, 2, 2]);
        assert_eq!(abelian_invariants(&grp("a^9 = 1")), vec![9]);
        assert_eq!(abelian_invariants(&FiniteGroup::trivial()), Vec::<u64>::new());
    }

    #[test]
    fn fingerprints_separate_c6_and_s3() {
        let c6 = fingerprint(&grp("a^6 = 1")).unwrap();
        let s3 = fingerprint(&grp("a^2 = b^3 = (a*b)^2 = 1")).unwrap();
        assert_eq!(c6.first_difference(&s3), Some("class/order structure"));
        let d4a = fingerprint(&grp("a^4 = b^2 = (a*b)^2 = 1")).unwrap();
        let d4b = fingerprint(&grp("x^2 = y^2 = (x*y)^4 = 1")).unwrap();
        assert_eq!(d4a, d4b);
    }

    #[test]
    fn structure_text_round_trip() {
        let s: ClassOrderStructure = "2:19/3 3:32/1 4:60/3 6:32/1 8:48/2".parse().unwrap();
        assert_eq!(s.ncl, 11);
        assert!(s.is_consistent(192));
        assert_eq!(s.to_string(), "2:19/3 3:32/1 4:60/3 6:32/1 8:48/2");
        assert!("2:19".parse::<ClassOrderStructure>().is_err());
    }
}
