//! Todd–Coxeter coset enumeration.
//!
//! Two deterministic strategies are provided: HLT (relator-based definition
//! with a lookahead pass when the table fills) and Felsch (first-undefined
//! entry definition with full deduction processing).

use crate::error::{GroupError, Result};
use crate::parser::Presentation;
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use crate::word::Word;

const UNDEF: u32 = u32::MAX;

/// Default bound on the number of coset rows.
pub const DEFAULT_MAX_COSETS: usize = 2_000_000;
/// Bound used when enumerating over the trivial subgroup.
pub const REGULAR_MAX_COSETS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Hlt,
    Felsch,
}

/// A closed coset table.  Column `2g` is generator `g`, column `2g+1` its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    ngens: usize,
    index: usize,
    table: Vec<u32>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    /// Image of coset `c` under generator `g` (or its inverse).
    pub fn image(&self, c: usize, g: usize, inverse: bool) -> usize {
        self.table[c * 2 * self.ngens + 2 * g + inverse as usize] as usize
    }

    /// The permutation of cosets induced by generator `g`.
    pub fn generator_images(&self, g: usize) -> Vec<u32> {
        (0..self.index).map(|c| self.image(c, g, false) as u32).collect()
    }

    /// Coset reached from `c` by reading `w`.
    pub fn trace(&self, c: usize, w: &Word) -> usize {
        let mut c = c;
        for l in w.letters() {
            let g = l.unsigned_abs() as usize - 1;
            c = self.image(c, g, l < 0);
        }
        c
    }
}

/// Options controlling an enumeration.
#[derive(Clone, Debug)]
pub struct EnumerationOptions {
    pub max_cosets: usize,
    pub strategy: Strategy,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { max_cosets: DEFAULT_MAX_COSETS, strategy: Strategy::Hlt }
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the group
/// presented by `p`.
pub fn enumerate(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<CosetTable> {
    enumerate_with(p, subgroup, &EnumerationOptions { max_cosets, ..Default::default() })
}

pub fn enumerate_with(p: &Presentation, subgroup: &[Word], opts: &EnumerationOptions) -> Result<CosetTable> {
    let ngens = p.ngens();
    let mut rels: Vec<Vec<usize>> = p
        .relators
        .iter()
        .map(|r| to_cols(&r.cyclically_reduced()))
        .filter(|r| !r.is_empty())
        .collect();
    rels.sort_by_key(|r| r.len());
    rels.dedup();
    let subs: Vec<Vec<usize>> = subgroup.iter().map(to_cols).filter(|w| !w.is_empty()).collect();
    if ngens == 0 {
        return Ok(CosetTable { ngens: 0, index: 1, table: Vec::new() });
    }
    let mut e = Enumerator::new(ngens, rels, opts.max_cosets.max(1));
    match opts.strategy {
        Strategy::Hlt => e.run_hlt(&subs)?,
        Strategy::Felsch => e.run_felsch(&subs)?,
    }
    Ok(e.finish())
}

fn to_cols(w: &Word) -> Vec<usize> {
    w.letters()
        .into_iter()
        .map(|l| 2 * (l.unsigned_abs() as usize - 1) + (l < 0) as usize)
        .collect()
}

struct Enumerator {
    ncols: usize,
    max: usize,
    table: Vec<u32>,
    p: Vec<u32>,
    live: usize,
    rels: Vec<Vec<usize>>,
    /// For Felsch: cyclic conjugates of relators and their inverses, by first column.
    conj_by_col: Vec<Vec<Vec<usize>>>,
    deductions: Vec<(u32, usize)>,
    track_deductions: bool,
    queue: Vec<u32>,
}

enum Full {
    Full,
}

impl Enumerator {
    fn new(ngens: usize, rels: Vec<Vec<usize>>, max: usize) -> Self {
        let ncols = 2 * ngens;
        let mut e = Enumerator {
            ncols,
            max,
            table: Vec::new(),
            p: Vec::new(),
            live: 0,
            rels,
            conj_by_col: vec![Vec::new(); ncols],
            deductions: Vec::new(),
            track_deductions: false,
            queue: Vec::new(),
        };
        e.new_row();
        e
    }

    fn rows(&self) -> usize {
        self.p.len()
    }

    fn new_row(&mut self) -> u32 {
        let n = self.p.len() as u32;
        self.table.extend(std::iter::repeat_n(UNDEF, self.ncols));
        self.p.push(n);
        self.live += 1;
        n
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.ncols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, v: u32) {
        self.table[c as usize * self.ncols + x] = v;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.p[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> std::result::Result<u32, Full> {
        if self.rows() >= self.max {
            return Err(Full::Full);
        }
        let d = self.new_row();
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        if self.track_deductions {
            self.deductions.push((c, x));
        }
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut l = c;
        while self.p[l as usize] != l {
            l = self.p[l as usize];
        }
        let mut k = c;
        while self.p[k as usize] != l {
            let next = self.p[k as usize];
            self.p[k as usize] = l;
            k = next;
        }
        l
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.p[hi as usize] = lo;
            self.live -= 1;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.ncols {
                let d = self.get(g, x);
                if d == UNDEF {
                    continue;
                }
                if self.get(d, x ^ 1) == g {
                    self.set(d, x ^ 1, UNDEF);
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                let m_x = self.get(mu, x);
                if m_x != UNDEF {
                    self.merge(nu, m_x);
                } else {
                    let n_xi = self.get(nu, x ^ 1);
                    if n_xi != UNDEF {
                        self.merge(mu, n_xi);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                        if self.track_deductions {
                            self.deductions.push((mu, x));
                        }
                    }
                }
            }
        }
    }

    /// Scans `w` at `a`; with `fill` set, defines cosets to complete the scan.
    fn scan(&mut self, a: u32, w: &[usize], fill: bool) -> std::result::Result<(), Full> {
        let mut f = a;
        let mut b = a;
        let mut i = 0usize;
        let mut j = w.len();
        loop {
            while i < j {
                let n = self.get(f, w[i]);
                if n == UNDEF {
                    break;
                }
                f = n;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                let n = self.get(b, w[j - 1] ^ 1);
                if n == UNDEF {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                let x = w[i];
                self.set(f, x, b);
                self.set(b, x ^ 1, f);
                if self.track_deductions {
                    self.deductions.push((f, x));
                }
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn lookahead(&mut self) {
        let rels = std::mem::take(&mut self.rels);
        let mut c = 0u32;
        while (c as usize) < self.rows() {
            for r in &rels {
                if !self.is_live(c) {
                    break;
                }
                let _ = self.scan(c, r, false);
            }
            c += 1;
        }
        self.rels = rels;
    }

    /// Removes dead rows, keeping live rows in their relative order.
    /// Returns the map from old to new row numbers.
    fn compact(&mut self) -> Vec<u32> {
        let rows = self.rows();
        let mut map = vec![UNDEF; rows];
        let mut next = 0u32;
        for c in 0..rows {
            if self.p[c] == c as u32 {
                map[c] = next;
                next += 1;
            }
        }
        let mut table = vec![UNDEF; next as usize * self.ncols];
        for c in 0..rows {
            if map[c] == UNDEF {
                continue;
            }
            for x in 0..self.ncols {
                let v = self.table[c * self.ncols + x];
                table[map[c] as usize * self.ncols + x] = if v == UNDEF { UNDEF } else { map[self.rep_ro(v) as usize] };
            }
        }
        let deductions: Vec<(u32, usize)> = self
            .deductions
            .iter()
            .map(|&(c, x)| (map[self.rep_ro(c) as usize], x))
            .collect();
        self.deductions = deductions;
        self.table = table;
        self.p = (0..next).collect();
        self.live = next as usize;
        map
    }

    fn rep_ro(&self, c: u32) -> u32 {
        let mut l = c;
        while self.p[l as usize] != l {
            l = self.p[l as usize];
        }
        l
    }

    fn run_hlt(&mut self, subs: &[Vec<usize>]) -> Result<()> {
        for s in subs {
            if self.scan(0, s, true).is_err() {
                return Err(GroupError::CapacityExceeded(self.max));
            }
        }
        let mut c = 0u32;
        while (c as usize) < self.rows() {
            if !self.is_live(c) {
                c += 1;
                continue;
            }
            let mut full = false;
            let rels = std::mem::take(&mut self.rels);
            for r in &rels {
                if !self.is_live(c) {
                    break;
                }
                if self.scan(c, r, true).is_err() {
                    full = true;
                    break;
                }
            }
            self.rels = rels;
            if !full && self.is_live(c) {
                for x in 0..self.ncols {
                    if self.get(c, x) == UNDEF && self.define(c, x).is_err() {
                        full = true;
                        break;
                    }
                }
            }
            if full {
                self.lookahead();
                let map = self.compact();
                if self.rows() >= self.max {
                    return Err(GroupError::CapacityExceeded(self.max));
                }
                // Resume at the first surviving row at or after `c`.
                let mut nc = c as usize;
                while nc < map.len() && map[nc] == UNDEF {
                    nc += 1;
                }
                c = if nc < map.len() { map[nc] } else { self.rows() as u32 };
                continue;
            }
            c += 1;
        }
        Ok(())
    }

    fn prepare_felsch(&mut self) {
        for r in &self.rels {
            let inv: Vec<usize> = r.iter().rev().map(|&x| x ^ 1).collect();
            for w in [r.clone(), inv] {
                for k in 0..w.len() {
                    let rot: Vec<usize> = w[k..].iter().chain(w[..k].iter()).copied().collect();
                    let col = rot[0];
                    if !self.conj_by_col[col].contains(&rot) {
                        self.conj_by_col[col].push(rot);
                    }
                }
            }
        }
    }

    fn process_deductions(&mut self) {
        while let Some((c, x)) = self.deductions.pop() {
            let conj = std::mem::take(&mut self.conj_by_col);
            let c = self.rep(c);
            for r in &conj[x] {
                let c = self.rep(c);
                let _ = self.scan(c, r, false);
            }
            let c = self.rep(c);
            let d = self.get(c, x);
            if d != UNDEF {
                for r in &conj[x ^ 1] {
                    let d = self.rep(d);
                    let _ = self.scan(d, r, false);
                }
            }
            self.conj_by_col = conj;
        }
    }

    fn run_felsch(&mut self, subs: &[Vec<usize>]) -> Result<()> {
        self.prepare_felsch();
        self.track_deductions = true;
        for s in subs {
            if self.scan(0, s, true).is_err() {
                return Err(GroupError::CapacityExceeded(self.max));
            }
            self.process_deductions();
        }
        let mut c = 0u32;
        loop {
            while (c as usize) < self.rows() {
                if self.is_live(c) && (0..self.ncols).any(|x| self.get(c, x) == UNDEF) {
                    break;
                }
                c += 1;
            }
            if c as usize >= self.rows() {
                break;
            }
            let x = (0..self.ncols).find(|&x| self.get(c, x) == UNDEF).unwrap();
            if self.define(c, x).is_err() {
                let map = self.compact();
                let mut nc = c as usize;
                while nc < map.len() && map[nc] == UNDEF {
                    nc += 1;
                }
                c = if nc < map.len() { map[nc] } else { self.rows() as u32 };
                if self.rows() >= self.max {
                    return Err(GroupError::CapacityExceeded(self.max));
                }
                continue;
            }
            self.process_deductions();
        }
        Ok(())
    }

    /// Compacts and renumbers cosets breadth-first from coset 0.
    fn finish(mut self) -> CosetTable {
        self.compact();
        let n = self.rows();
        let ncols = self.ncols;
        let mut order = Vec::with_capacity(n);
        let mut newnum = vec![UNDEF; n];
        newnum[0] = 0;
        order.push(0u32);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for x in 0..ncols {
                let d = self.table[c as usize * ncols + x];
                if newnum[d as usize] == UNDEF {
                    newnum[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let mut table = vec![0u32; n * ncols];
        for (new, &old) in order.iter().enumerate() {
            for x in 0..ncols {
                table[new * ncols + x] = newnum[self.table[old as usize * ncols + x] as usize];
            }
        }
        CosetTable { ngens: ncols / 2, index: n, table }
    }
}

/// One permutation per generator on the cosets.  Over the trivial subgroup this
/// is the right-regular representation.
pub fn to_perm_group(t: &CosetTable) -> PermGroup {
    let gens: Vec<Perm> = (0..t.ngens()).map(|g| Perm::from_images_unchecked(t.generator_images(g))).collect();
    PermGroup::new(t.index(), gens).expect("coset permutations share the degree")
}

/// Enumerates over the trivial subgroup and returns the regular
/// representation, whose order is the index.  `max_cosets` is capped at
/// [`REGULAR_MAX_COSETS`].
pub fn realize(p: &Presentation, max_cosets: usize) -> Result<PermGroup> {
    let t = enumerate(p, &[], max_cosets.min(REGULAR_MAX_COSETS))?;
    let gens: Vec<Perm> = (0..t.ngens()).map(|g| Perm::from_images_unchecked(t.generator_images(g))).collect();
    PermGroup::regular(t.index(), gens)
}
