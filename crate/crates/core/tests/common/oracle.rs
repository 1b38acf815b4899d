//! Brute-force reference computations over a full multiplication table.
//!
//! Everything here works from `FiniteGroup::mul` alone and deliberately avoids
//! the library's class, automorphism and isomorphism algorithms.

#![allow(dead_code)]

use std::collections::BTreeMap;

use grouforge_core::FiniteGroup;

pub struct Table {
    pub n: usize,
    pub mul: Vec<u32>,
    pub inv: Vec<u32>,
}

impl Table {
    pub fn of(g: &FiniteGroup) -> Table {
        let n = g.order();
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[x * n + y] = g.mul(x as u32, y as u32);
            }
        }
        let mut inv = vec![0u32; n];
        for x in 0..n {
            inv[x] = (0..n as u32).find(|&y| mul[x * n + y as usize] == 0).expect("inverse");
        }
        Table { n, mul, inv }
    }

    #[inline]
    pub fn m(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.n + y as usize]
    }

    pub fn order_of(&self, x: u32) -> u32 {
        let (mut y, mut k) = (x, 1);
        while y != 0 {
            y = self.m(y, x);
            k += 1;
        }
        k
    }

    pub fn is_associative(&self) -> bool {
        let n = self.n as u32;
        (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| self.m(self.m(x, y), z) == self.m(x, self.m(y, z)))))
    }

    /// Conjugacy classes by direct orbit computation.
    pub fn classes(&self) -> Vec<Vec<u32>> {
        let n = self.n as u32;
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for x in 0..n {
            if seen[x as usize] {
                continue;
            }
            let mut class: Vec<u32> = (0..n).map(|g| self.m(self.m(self.inv[g as usize], x), g)).collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                seen[y as usize] = true;
            }
            out.push(class);
        }
        out
    }

    pub fn center_order(&self) -> usize {
        let n = self.n as u32;
        (0..n).filter(|&x| (0..n).all(|y| self.m(x, y) == self.m(y, x))).count()
    }

    /// The `o:n/c` census, element order 1 omitted.
    pub fn structure(&self) -> String {
        let mut by_order: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
        for c in self.classes() {
            let o = self.order_of(c[0]);
            let e = by_order.entry(o).or_default();
            e.0 += c.len();
            e.1 += 1;
        }
        by_order
            .iter()
            .filter(|(&o, _)| o > 1)
            .map(|(o, (n, c))| format!("{o}:{n}/{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn closure_size(&self, gens: &[u32]) -> usize {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0u32];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &s in gens {
                let y = self.m(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count
    }

    /// A generating set picked greedily, largest element orders first.
    pub fn small_generating_set(&self) -> Vec<u32> {
        let mut elems: Vec<u32> = (1..self.n as u32).collect();
        elems.sort_by_key(|&x| (std::cmp::Reverse(self.order_of(x)), x));
        let mut gens = Vec::new();
        let mut size = 1;
        for x in elems {
            if size == self.n {
                break;
            }
            gens.push(x);
            let s = self.closure_size(&gens);
            if s > size {
                size = s;
            } else {
                gens.pop();
            }
        }
        gens
    }
}

/// Extends `gens -> images` to a map on all of `a` by walking the Cayley
/// graph, returning `None` if some edge disagrees (not a homomorphism) or the
/// map is not injective.
fn extend(a: &Table, gens: &[u32], b: &Table, images: &[u32]) -> Option<Vec<u32>> {
    let mut map = vec![u32::MAX; a.n];
    map[0] = 0;
    let mut queue = vec![0u32];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        i += 1;
        for (s, &t) in gens.iter().zip(images) {
            let y = a.m(x, *s);
            let fy = b.m(map[x as usize], t);
            if map[y as usize] == u32::MAX {
                map[y as usize] = fy;
                queue.push(y);
            } else if map[y as usize] != fy {
                return None;
            }
        }
    }
    let mut hit = vec![false; b.n];
    for &v in &map {
        if v == u32::MAX || std::mem::replace(&mut hit[v as usize], true) {
            return None;
        }
    }
    Some(map)
}

/// Number of image tuples the brute-force searches would try.
pub fn search_size(a: &Table, b: &Table) -> u128 {
    let gens = a.small_generating_set();
    gens.iter()
        .map(|&g| {
            let o = a.order_of(g);
            (0..b.n as u32).filter(|&y| b.order_of(y) == o).count() as u128
        })
        .product()
}

fn for_each_bijective_hom(a: &Table, b: &Table, visit: &mut dyn FnMut(&[u32]) -> bool) {
    if a.n != b.n {
        return;
    }
    let gens = a.small_generating_set();
    let pools: Vec<Vec<u32>> = gens
        .iter()
        .map(|&g| {
            let o = a.order_of(g);
            (0..b.n as u32).filter(|&y| b.order_of(y) == o).collect()
        })
        .collect();
    let mut idx = vec![0usize; gens.len()];
    if pools.iter().any(|p| p.is_empty()) {
        return;
    }
    loop {
        let images: Vec<u32> = idx.iter().zip(&pools).map(|(&i, p)| p[i]).collect();
        if let Some(map) = extend(a, &gens, b, &images) {
            if !visit(&map) {
                return;
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < pools[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn aut_order(a: &Table) -> u128 {
    let mut count = 0u128;
    for_each_bijective_hom(a, a, &mut |_| {
        count += 1;
        true
    });
    count
}

/// An isomorphism from `a` to `b` as an element map, if one exists.
pub fn isomorphism(a: &Table, b: &Table) -> Option<Vec<u32>> {
    let mut found = None;
    for_each_bijective_hom(a, b, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found
}
