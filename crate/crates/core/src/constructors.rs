//! Building presentations from smaller pieces: direct products, split
//! extensions given by action relators, nonsplit variants obtained by
//! replacing relators, and actions of C_p on elementary abelian 2-groups given
//! by GF(2) matrices.
//!
//! Construction files describe these recipes in a line-oriented format:
//!
//! ```text
//! construct split
//! base
//!     a^3 = a*b*a*((b*a*b)^{-1}) = 1
//! quotient
//!     c^8 = 1
//! action
//!     a^c*a*b*a^-1 = b^c*b = 1
//! ```
//!
//! Keywords: `construct <plain|direct|split|nonsplit|matrix>`, the section
//! headers `base`, `quotient`, `action`, `factor`, `group` (each optionally
//! `from <ref>` instead of an indented body), `from <ref>` for nonsplit
//! recipes, `replace <relators> with <chain>`, `prime <p>`, `matrix` and
//! `row <bits>`.  Lines starting with `#` are comments; `# key: value` is
//! metadata.

use std::collections::BTreeMap;

use crate::coset::REGULAR_MAX_COSETS;
use crate::error::{GroupError, Result};
use crate::finite::{realize_finite, FiniteGroup};
use crate::gf2::Gf2Matrix;
use crate::parser::{parse_presentation, Presentation};
use crate::structure::normal_closure;
use crate::word::Word;

/// Maximum group order for the complement search.
pub const COMPLEMENT_SEARCH_BOUND: usize = 5000;
/// Maximum number of candidate tuples examined by the complement search.
const COMPLEMENT_TUPLE_BOUND: usize = 2_000_000;

/// Picks a name not in `taken`, appending digits if needed.
fn fresh_name(name: &str, taken: &[String]) -> String {
    if !taken.iter().any(|t| t == name) {
        return name.to_string();
    }
    (1..).map(|k| format!("{name}{k}")).find(|c| !taken.iter().any(|t| t == c)).unwrap()
}

fn shift(w: &Word, by: u32) -> Word {
    Word::from_syllables(w.syllables().iter().map(|&(g, e)| (g + by, e)))
}

/// Generator names of `a` followed by those of `b`, renamed where they collide.
pub fn combined_generators(a: &Presentation, b: &Presentation) -> Vec<String> {
    let mut names = a.generators.clone();
    for g in &b.generators {
        let n = fresh_name(g, &names);
        names.push(n);
    }
    names
}

/// Relators of `a` and `b` (the latter shifted past `a`'s generators) on the
/// combined alphabet.
fn juxtapose(name: &str, a: &Presentation, b: &Presentation) -> Presentation {
    let names = combined_generators(a, b);
    let m = a.ngens() as u32;
    let mut rels = a.relators.clone();
    rels.extend(b.relators.iter().map(|r| shift(r, m)));
    Presentation::new(name, names, rels)
}

pub fn direct_product(a: &Presentation, b: &Presentation) -> Presentation {
    let mut p = juxtapose(&format!("{} x {}", a.name, b.name), a, b);
    let m = a.ngens() as u32;
    for i in 0..m {
        for j in 0..b.ngens() as u32 {
            p.add_relator(Word::generator(i).commutator(&Word::generator(m + j)));
        }
    }
    p
}

/// A quotient group acting on a base group through relators on the combined
/// alphabet (base generators first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpec {
    pub base: Presentation,
    pub quotient: Presentation,
    pub action: Vec<Word>,
}

impl ActionSpec {
    /// Parses the action relator chains over the combined alphabet.
    pub fn new(base: Presentation, quotient: Presentation, action_text: &str) -> Result<Self> {
        let mut scratch = Presentation::new("", combined_generators(&base, &quotient), Vec::new());
        let action = scratch.parse_chain(action_text, false)?;
        Ok(ActionSpec { base, quotient, action })
    }

    pub fn generators(&self) -> Vec<String> {
        combined_generators(&self.base, &self.quotient)
    }

    /// Base relators, quotient relators and action relators.
    pub fn presentation(&self) -> Presentation {
        let mut p = juxtapose(&format!("{} @ {}", self.base.name, self.quotient.name), &self.base, &self.quotient);
        for r in &self.action {
            p.add_relator(r.clone());
        }
        p
    }
}

/// Replaces target relators of a presentation by new ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralSubstitution {
    pub targets: Vec<Word>,
    pub replacements: Vec<Word>,
}

/// Whether two relators define the same normal closure trivially: equal up to
/// cyclic rotation and inversion.
pub fn relators_equivalent(u: &Word, v: &Word) -> bool {
    let a = u.cyclically_reduced().letters();
    let rotations = |w: &[i32], target: &[i32]| {
        w.len() == target.len() && (0..w.len().max(1)).any(|k| w.iter().cycle().skip(k).take(w.len()).eq(target.iter()))
    };
    let b = v.cyclically_reduced().letters();
    let binv = v.cyclically_reduced().inverse().letters();
    rotations(&a, &b) || rotations(&a, &binv)
}

pub fn substitute(p: &Presentation, sub: &CentralSubstitution) -> Result<Presentation> {
    let mut rels = p.relators.clone();
    for t in &sub.targets {
        let pos = rels
            .iter()
            .position(|r| relators_equivalent(r, t))
            .ok_or_else(|| GroupError::RelatorNotFound(p.word_string(t)))?;
        rels.remove(pos);
    }
    rels.extend(sub.replacements.iter().cloned());
    let mut out = Presentation::new(&p.name, p.generators.clone(), rels);
    out.metadata = p.metadata.clone();
    Ok(out)
}

/// Outcome of the search for a complement to the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplementCheck {
    Found,
    NotFound,
    Unchecked,
}

/// A realized construction.
#[derive(Clone, Debug)]
pub struct Extension {
    pub presentation: Presentation,
    pub group: FiniteGroup,
    pub expected_order: usize,
    /// Realized order equals the product of the factor orders.
    pub split_verified: bool,
    pub complement: ComplementCheck,
}

impl Extension {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// A nonsplit recipe that nevertheless has a complement.
    pub fn actually_split(&self) -> bool {
        self.complement == ComplementCheck::Found
    }
}

fn realize_checked(p: &Presentation, expected: usize) -> Result<FiniteGroup> {
    let g = realize_finite(p, REGULAR_MAX_COSETS)?;
    if g.order() < expected {
        return Err(GroupError::OrderCollapse { expected: expected as u64, realized: g.order() as u64 });
    }
    if g.order() > expected {
        return Err(GroupError::Construction(format!("realized order {} exceeds {expected}", g.order())));
    }
    Ok(g)
}

fn order_of(p: &Presentation) -> Result<usize> {
    Ok(realize_finite(p, REGULAR_MAX_COSETS)?.order())
}

pub fn split_extension(spec: &ActionSpec) -> Result<Extension> {
    let expected = order_of(&spec.base)? * order_of(&spec.quotient)?;
    let presentation = spec.presentation();
    let group = realize_checked(&presentation, expected)?;
    Ok(Extension { presentation, group, expected_order: expected, split_verified: true, complement: ComplementCheck::Found })
}

pub fn nonsplit_extension(spec: &ActionSpec, sub: &CentralSubstitution) -> Result<Extension> {
    let expected = order_of(&spec.base)? * order_of(&spec.quotient)?;
    let presentation = substitute(&spec.presentation(), sub)?;
    let group = realize_checked(&presentation, expected)?;
    let base_gens: Vec<usize> = (0..spec.base.ngens()).collect();
    let complement = find_complement(&group, &base_gens);
    Ok(Extension { presentation, group, expected_order: expected, split_verified: true, complement })
}

/// Searches for a complement to the normal closure N of the given generators:
/// a subgroup meeting N trivially and mapping onto G/N.  A complement has
/// exactly one element in each coset of N, so it suffices to try every choice
/// of coset representative for each remaining generator.
pub fn find_complement(g: &FiniteGroup, base_gens: &[usize]) -> ComplementCheck {
    if g.order() > COMPLEMENT_SEARCH_BOUND {
        return ComplementCheck::Unchecked;
    }
    let gens = g.generators();
    let nsub = normal_closure(g, &base_gens.iter().map(|&i| gens[i]).collect::<Vec<_>>());
    let n_elems = nsub.elements();
    let qorder = g.order() / n_elems.len();
    let others: Vec<u32> = (0..g.ngens()).filter(|i| !base_gens.contains(i)).map(|i| gens[i]).collect();
    if qorder == 1 {
        return ComplementCheck::Found;
    }
    let mask = g.mask(n_elems);
    let orders = g.element_orders();
    // Candidates in each coset with the order of the coset in G/N.
    let mut cands: Vec<Vec<u32>> = Vec::new();
    for &q in &others {
        let mut m = 1;
        let mut y = q;
        while !mask[y as usize] {
            y = g.mul(y, q);
            m += 1;
        }
        cands.push(n_elems.iter().map(|&x| g.mul(x, q)).filter(|&x| orders[x as usize] == m).collect());
    }
    let total: f64 = cands.iter().map(|c| c.len() as f64).product();
    if total > COMPLEMENT_TUPLE_BOUND as f64 {
        return ComplementCheck::Unchecked;
    }
    if cands.iter().any(|c| c.is_empty()) {
        return ComplementCheck::NotFound;
    }
    let mut idx = vec![0usize; cands.len()];
    loop {
        let choice: Vec<u32> = idx.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
        if g.closure(&choice).len() == qorder {
            return ComplementCheck::Found;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return ComplementCheck::NotFound;
            }
            idx[k] += 1;
            if idx[k] < cands[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Generator names `a1 .. an` for the elementary abelian part, then `x` (or
/// `x1 .. xm` for several matrices).
pub fn matrix_action_extension(p: u64, mats: &[Gf2Matrix]) -> Result<Presentation> {
    let n = mats.first().ok_or_else(|| GroupError::Matrix("no matrices".into()))?.dim();
    for m in mats {
        if m.dim() != n {
            return Err(GroupError::Matrix("matrices differ in dimension".into()));
        }
        match m.order() {
            None => return Err(GroupError::Matrix("matrix is singular".into())),
            Some(o) if o != p => return Err(GroupError::Matrix(format!("matrix has order {o}, expected {p}"))),
            _ => {}
        }
    }
    for (i, a) in mats.iter().enumerate() {
        for b in &mats[i + 1..] {
            if a.mul(b) != b.mul(a) {
                return Err(GroupError::Matrix("matrices do not commute".into()));
            }
        }
    }
    let mut names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    if mats.len() == 1 {
        names.push("x".into());
    } else {
        names.extend((1..=mats.len()).map(|i| format!("x{i}")));
    }
    let mut rels = Vec::new();
    for i in 0..n as u32 {
        rels.push(Word::generator(i).pow(2));
        for j in i + 1..n as u32 {
            rels.push(Word::generator(i).commutator(&Word::generator(j)));
        }
    }
    for (k, m) in mats.iter().enumerate() {
        let x = Word::generator((n + k) as u32);
        rels.push(x.pow(p as i64));
        for l in k + 1..mats.len() {
            rels.push(x.commutator(&Word::generator((n + l) as u32)));
        }
        // x^-1 a_i x is the product of the a_j with M[j][i] = 1.
        for i in 0..n {
            let mut image = Word::identity();
            for j in 0..n {
                if m.get(j, i) {
                    image = image.mul(&Word::generator(j as u32));
                }
            }
            rels.push(Word::generator(i as u32).conjugate(&x).mul(&image.inverse()));
        }
    }
    Ok(Presentation::new(&format!("1^{n} @ C{p}"), names, rels))
}

/// The split extension of the group presented by `base` by a cyclic group of
/// order `p` acting through the automorphism `map` (an element map of `g`, the
/// realization of `base` on its presentation generators).
pub fn semidirect_by_automorphism(base: &Presentation, g: &FiniteGroup, map: &[u32], p: u64) -> Presentation {
    let mut names = base.generators.clone();
    let t = fresh_name("t", &names);
    names.push(t);
    let x = Word::generator(base.ngens() as u32);
    let mut rels = base.relators.clone();
    rels.push(x.pow(p as i64));
    for (i, &s) in g.generators().iter().enumerate() {
        let image = g.word_of(map[s as usize]);
        rels.push(Word::generator(i as u32).conjugate(&x).mul(&image.inverse()));
    }
    Presentation::new(&format!("{} @ C{p}", base.name), names, rels)
}

/// One extension of `base` by `h` for each surjection `h -> C2` up to
/// automorphisms of `h`.  Generators of `h` in the kernel commute with the
/// base; the others act by `action`, a relator chain in which `{g}` stands for
/// the generator's name.  Returns the sign vector (image of each generator of
/// `h`) with each presentation.
pub fn extensions_through_c2(base: &Presentation, h: &Presentation, action: &str) -> Result<Vec<(Vec<u8>, Presentation)>> {
    let hg = realize_finite(h, REGULAR_MAX_COSETS)?;
    let c2 = realize_finite(&parse_presentation("t^2 = 1")?, 4)?;
    let k = h.ngens();
    let mut kernels: Vec<(Vec<u8>, Vec<bool>)> = Vec::new();
    for bits in 1u32..(1 << k) {
        let signs: Vec<u8> = (0..k).map(|i| (bits >> i & 1) as u8).collect();
        let images: Vec<u32> = signs.iter().map(|&s| s as u32).collect();
        if let Some(f) = hg.extend_homomorphism_with(&c2, &images, false) {
            kernels.push((signs, f.iter().map(|&v| v == 0).collect()));
        }
    }
    let aut = crate::aut::automorphism_group(&hg)?;
    let mut reps: Vec<(Vec<u8>, Presentation)> = Vec::new();
    let mut covered = vec![false; kernels.len()];
    for i in 0..kernels.len() {
        if covered[i] {
            continue;
        }
        // Mark every kernel in the Aut(h)-orbit of this one.
        let mut orbit = vec![kernels[i].1.clone()];
        let mut j = 0;
        while j < orbit.len() {
            for m in aut.generators() {
                let mut img = vec![false; hg.order()];
                for (x, &inside) in orbit[j].iter().enumerate() {
                    if inside {
                        img[m[x] as usize] = true;
                    }
                }
                if !orbit.contains(&img) {
                    orbit.push(img);
                }
            }
            j += 1;
        }
        for (l, kern) in kernels.iter().enumerate() {
            if orbit.contains(&kern.1) {
                covered[l] = true;
            }
        }
        let signs = kernels[i].0.clone();
        let names = combined_generators(base, h);
        let mut text = String::new();
        for (gi, &s) in signs.iter().enumerate() {
            let gname = &names[base.ngens() + gi];
            if s == 1 {
                text.push_str(&action.replace("{g}", gname));
            } else {
                let parts: Vec<String> = base.generators.iter().map(|b| format!("({gname},{b})")).collect();
                text.push_str(&parts.join(" = "));
                text.push_str(" = 1");
            }
            text.push('\n');
        }
        let spec = ActionSpec::new(base.clone(), h.clone(), &text)?;
        let mut p = spec.presentation();
        p.name = format!("{} @ {}", base.name, h.name);
        reps.push((signs, p));
    }
    Ok(reps)
}

/// A construction recipe as read from a construction file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructSpec {
    Plain(Presentation),
    Direct(Vec<Source>),
    Split { base: Source, quotient: Source, action: String },
    Nonsplit { from: Box<ConstructSpec>, replace: Vec<(String, String)> },
    Matrix { prime: u64, matrices: Vec<Gf2Matrix> },
    /// Another corpus entry, by reference.
    Ref(String),
}

/// A presentation given inline or by reference to another corpus file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Inline(Presentation),
    Ref(String),
}

/// Result of resolving a recipe to a presentation.
#[derive(Clone, Debug)]
pub struct Built {
    pub presentation: Presentation,
    /// Presentations whose orders multiply to the intended order, when known.
    pub factors: Vec<Presentation>,
    /// Indices of the generators spanning the normal base, when known.
    pub base_generators: Vec<usize>,
    pub nonsplit: bool,
    pub metadata: BTreeMap<String, String>,
}

pub type Resolver<'a> = &'a dyn Fn(&str) -> Result<ConstructSpec>;

fn resolve_source(s: &Source, resolve: Resolver) -> Result<Presentation> {
    match s {
        Source::Inline(p) => Ok(p.clone()),
        Source::Ref(r) => Ok(resolve(r)?.build(resolve)?.presentation),
    }
}

impl ConstructSpec {
    pub fn build(&self, resolve: Resolver) -> Result<Built> {
        let empty = BTreeMap::new();
        match self {
            ConstructSpec::Ref(r) => resolve(r)?.build(resolve),
            ConstructSpec::Plain(p) => Ok(Built {
                presentation: p.clone(),
                factors: Vec::new(),
                base_generators: Vec::new(),
                nonsplit: false,
                metadata: empty,
            }),
            ConstructSpec::Direct(fs) => {
                let factors: Vec<Presentation> = fs.iter().map(|f| resolve_source(f, resolve)).collect::<Result<_>>()?;
                let mut p = factors.first().cloned().unwrap_or_default();
                for f in &factors[1..] {
                    p = direct_product(&p, f);
                }
                Ok(Built { presentation: p, factors, base_generators: Vec::new(), nonsplit: false, metadata: empty })
            }
            ConstructSpec::Split { base, quotient, action } => {
                let b = resolve_source(base, resolve)?;
                let q = resolve_source(quotient, resolve)?;
                let spec = ActionSpec::new(b.clone(), q.clone(), action)?;
                Ok(Built {
                    presentation: spec.presentation(),
                    base_generators: (0..b.ngens()).collect(),
                    factors: vec![b, q],
                    nonsplit: false,
                    metadata: empty,
                })
            }
            ConstructSpec::Nonsplit { from, replace } => {
                let inner = from.build(resolve)?;
                let mut p = inner.presentation.clone();
                for (targets, with) in replace {
                    let sub = parse_substitution(&p, targets, with)?;
                    p = substitute(&p, &sub)?;
                }
                Ok(Built { presentation: p, nonsplit: true, metadata: empty, ..inner })
            }
            ConstructSpec::Matrix { prime, matrices } => {
                let p = matrix_action_extension(*prime, matrices)?;
                let n = matrices[0].dim();
                let ea = Presentation::new("", p.generators[..n].to_vec(), p.relators.iter().filter(|r| r.max_generator().is_none_or(|g| (g as usize) < n)).cloned().collect());
                let m = matrices.len();
                let mut cp = Vec::new();
                for i in 0..m as u32 {
                    cp.push(Word::generator(i).pow(*prime as i64));
                    for j in i + 1..m as u32 {
                        cp.push(Word::generator(i).commutator(&Word::generator(j)));
                    }
                }
                let q = Presentation::new("", p.generators[n..].to_vec(), cp);
                Ok(Built { presentation: p, factors: vec![ea, q], base_generators: (0..n).collect(), nonsplit: false, metadata: empty })
            }
        }
    }

    /// Parses a construction file, or a plain presentation if the file does not
    /// start with a `construct` line.
    pub fn parse(text: &str) -> Result<(ConstructSpec, BTreeMap<String, String>)> {
        let mut metadata = BTreeMap::new();
        let mut lines: Vec<(usize, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let t = raw.trim_end();
            if let Some(c) = t.trim_start().strip_prefix('#') {
                if let Some((k, v)) = c.split_once(':') {
                    metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if !t.trim().is_empty() {
                lines.push((i + 1, t));
            }
        }
        let kind = match lines.first() {
            Some((_, l)) if l.starts_with("construct") => l["construct".len()..].trim().to_string(),
            _ => {
                let mut p = parse_presentation(text)?;
                if p.name.is_empty() {
                    p.name = metadata.get("name").cloned().unwrap_or_default();
                }
                return Ok((ConstructSpec::Plain(p), metadata));
            }
        };
        let syntax = |line: usize, msg: String| GroupError::Syntax { line, col: 1, msg };
        // Group lines into (header line number, header, body).
        let mut sections: Vec<(usize, String, String)> = Vec::new();
        for &(no, l) in &lines[1..] {
            if l.starts_with(char::is_whitespace) {
                let last = sections.last_mut().ok_or_else(|| syntax(no, "indented line outside a section".into()))?;
                last.2.push_str(l.trim());
                last.2.push('\n');
            } else {
                sections.push((no, l.trim().to_string(), String::new()));
            }
        }
        let source = |no: usize, args: &str, body: &str| -> Result<Source> {
            if let Some(r) = args.strip_prefix("from") {
                Ok(Source::Ref(r.trim().to_string()))
            } else if body.is_empty() {
                Err(syntax(no, "section has no body".into()))
            } else {
                Ok(Source::Inline(parse_presentation(body)?))
            }
        };
        let mut base = None;
        let mut quotient = None;
        let mut action = String::new();
        let mut factors = Vec::new();
        let mut from = None;
        let mut replace = Vec::new();
        let mut prime = None;
        let mut matrices: Vec<Vec<Vec<u8>>> = Vec::new();
        let mut group = None;
        for (no, header, body) in &sections {
            let (kw, args) = header.split_once(char::is_whitespace).unwrap_or((header.as_str(), ""));
            let args = args.trim();
            match kw {
                "base" => base = Some(source(*no, args, body)?),
                "quotient" => quotient = Some(source(*no, args, body)?),
                "factor" => factors.push(source(*no, args, body)?),
                "group" if !body.is_empty() || args.starts_with("from") => group = Some(source(*no, args, body)?),
                "action" => {
                    action.push_str(args);
                    action.push('\n');
                    action.push_str(body);
                }
                "from" => from = Some(args.to_string()),
                "replace" => {
                    let full = format!("{args} {}", body.replace('\n', " "));
                    let (t, w) = full.split_once(" with ").ok_or_else(|| syntax(*no, "expected `replace <relators> with <chain>`".into()))?;
                    replace.push((t.trim().to_string(), w.trim().to_string()));
                }
                "prime" => prime = Some(args.parse::<u64>().map_err(|_| syntax(*no, format!("bad prime `{args}`")))?),
                "matrix" => matrices.push(Vec::new()),
                "row" => {
                    if matrices.is_empty() {
                        matrices.push(Vec::new());
                    }
                    let row: Vec<u8> = args
                        .split_whitespace()
                        .map(|b| b.parse::<u8>().map_err(|_| syntax(*no, format!("bad matrix entry `{b}`"))))
                        .collect::<Result<_>>()?;
                    matrices.last_mut().unwrap().push(row);
                }
                _ => return Err(syntax(*no, format!("unknown keyword `{kw}`"))),
            }
        }
        let first_line = lines[0].0;
        let spec = match kind.as_str() {
            "plain" => match group {
                Some(Source::Inline(p)) => ConstructSpec::Plain(p),
                _ => return Err(syntax(first_line, "plain construction needs an inline `group` section".into())),
            },
            "direct" => {
                if factors.len() < 2 {
                    return Err(syntax(first_line, "direct product needs two or more factors".into()));
                }
                ConstructSpec::Direct(factors)
            }
            "split" => ConstructSpec::Split {
                base: base.ok_or_else(|| syntax(first_line, "missing `base`".into()))?,
                quotient: quotient.ok_or_else(|| syntax(first_line, "missing `quotient`".into()))?,
                action,
            },
            "nonsplit" => {
                let inner = match (from, base, quotient) {
                    (Some(r), None, None) => ConstructSpec::Ref(r),
                    (None, Some(b), Some(q)) => ConstructSpec::Split { base: b, quotient: q, action },
                    _ => return Err(syntax(first_line, "nonsplit needs `from` or `base` and `quotient`".into())),
                };
                if replace.is_empty() {
                    return Err(syntax(first_line, "nonsplit needs at least one `replace`".into()));
                }
                ConstructSpec::Nonsplit { from: Box::new(inner), replace }
            }
            "matrix" => {
                let prime = prime.ok_or_else(|| syntax(first_line, "missing `prime`".into()))?;
                let mats = matrices.iter().map(|m| Gf2Matrix::from_rows(m)).collect::<Result<Vec<_>>>()?;
                if mats.is_empty() {
                    return Err(syntax(first_line, "missing matrix rows".into()));
                }
                ConstructSpec::Matrix { prime, matrices: mats }
            }
            other => return Err(syntax(first_line, format!("unknown construction `{other}`"))),
        };
        Ok((spec, metadata))
    }
}

fn parse_substitution(p: &Presentation, targets: &str, with: &str) -> Result<CentralSubstitution> {
    let mut ts = Vec::new();
    for t in split_top_level(targets) {
        ts.push(p.parse_word(&t)?);
    }
    let mut scratch = p.clone();
    let replacements = if with.trim() == "1" { Vec::new() } else { scratch.parse_chain(with, false)? };
    Ok(CentralSubstitution { targets: ts, replacements })
}

/// Splits on commas outside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out.into_iter().map(|s| s.trim().to_string()).collect()
}

/// Realizes a built recipe, checking the order against its factors and, for
/// nonsplit recipes, searching for a complement to the base.
pub fn realize_built(b: &Built) -> Result<Extension> {
    let expected = if b.factors.is_empty() {
        None
    } else {
        let mut e = 1usize;
        for f in &b.factors {
            e *= order_of(f)?;
        }
        Some(e)
    };
    let group = match expected {
        Some(e) => realize_checked(&b.presentation, e)?,
        None => realize_finite(&b.presentation, REGULAR_MAX_COSETS)?,
    };
    let complement = if b.base_generators.is_empty() {
        ComplementCheck::Unchecked
    } else if b.nonsplit {
        find_complement(&group, &b.base_generators)
    } else {
        ComplementCheck::Found
    };
    Ok(Extension {
        presentation: b.presentation.clone(),
        expected_order: expected.unwrap_or(group.order()),
        split_verified: expected.is_some(),
        group,
        complement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;
    use crate::permgroup::PermGroup;
    use crate::structure::{center, fingerprint};

    fn pres(text: &str) -> Presentation {
        parse_presentation(text).unwrap()
    }

    const SL23: &str = "a^3 = a*b*a*((b*a*b)^{-1}) = 1";
    const GL23: &str = "b*a*b*((a*b*a)^{-1}) = (b^2*(a^{-1}))^2 = 1";
    const A4: &str = "x^2 = y^3 = (y*x)^3 = 1";

    fn no_refs(r: &str) -> Result<ConstructSpec> {
        Err(GroupError::Construction(format!("no reference `{r}`")))
    }

    #[test]
    fn direct_products() {
        let c2 = pres("a^2 = 1");
        let v = realize_finite(&direct_product(&c2, &c2), 100).unwrap();
        assert_eq!((v.order(), center(&v).order()), (4, 4));
        let p = direct_product(&pres(SL23), &pres("a^4 = 1"));
        assert_eq!(p.generators, vec!["a", "b", "a1"]);
        assert_eq!(realize_finite(&p, 1000).unwrap().order(), 96);
        let e4 = pres("c^2 = d^2 = e^2 = f^2 = (c,d) = (c,e) = (c,f) = (d,e) = (d,f) = (e,f) = 1");
        assert_eq!(realize_finite(&direct_product(&pres(A4), &e4), 1000).unwrap().order(), 192);
    }

    #[test]
    fn split_extensions() {
        let s4 = split_extension(&ActionSpec::new(pres(A4), pres("g^2 = 1"), "(g,x) = y^g*y = 1").unwrap()).unwrap();
        assert_eq!(s4.order(), 24);
        let sym4 = FiniteGroup::from_perm_group(&PermGroup::from_cycles(4, &["(1,2)", "(1,2,3,4)"]).unwrap());
        assert!(is_isomorphic(&s4.group, &sym4).unwrap().is_isomorphic());

        let gl = split_extension(&ActionSpec::new(pres(SL23), pres("x^2 = 1"), "a^x*a*b*a^-1 = b^x*b = 1").unwrap()).unwrap();
        assert_eq!(gl.order(), 48);
        let gl23 = realize_finite(&pres(GL23), 100).unwrap();
        assert_eq!(fingerprint(&gl.group).unwrap(), fingerprint(&gl23).unwrap());

        let s3 = split_extension(&ActionSpec::new(pres("a^3 = 1"), pres("t^2 = 1"), "a^t*a = 1").unwrap()).unwrap();
        assert_eq!((s3.order(), center(&s3.group).order()), (6, 1));
    }

    #[test]
    fn collapse_is_reported() {
        let spec = ActionSpec::new(pres("a^4 = 1"), pres("t^2 = 1"), "a^t*a^-2 = 1").unwrap();
        assert!(matches!(split_extension(&spec), Err(GroupError::OrderCollapse { expected: 8, .. })));
    }

    #[test]
    fn nonsplit_binary_octahedral() {
        let spec = ActionSpec::new(pres(SL23), pres("c^2 = 1"), "a^c*a*b*a^-1 = b^c*b = 1").unwrap();
        let p = spec.presentation();
        let sub = parse_substitution(&p, "c^2", "c^4 = c^2*(a*b^-1)^2 = 1").unwrap();
        let ext = nonsplit_extension(&spec, &sub).unwrap();
        assert_eq!(ext.order(), 48);
        assert_eq!(ext.complement, ComplementCheck::NotFound);
        let gl23 = realize_finite(&pres(GL23), 100).unwrap();
        assert_ne!(fingerprint(&ext.group).unwrap(), fingerprint(&gl23).unwrap());

        // Replacing a relator by itself changes nothing.
        let same = nonsplit_extension(&spec, &parse_substitution(&p, "c^2", "c^2 = 1").unwrap()).unwrap();
        assert!(same.actually_split());
        assert_eq!(fingerprint(&same.group).unwrap(), fingerprint(&gl23).unwrap());

        let missing = parse_substitution(&p, "c^3", "c^6 = 1").unwrap();
        assert!(matches!(substitute(&p, &missing), Err(GroupError::RelatorNotFound(_))));
    }

    #[test]
    fn matrices() {
        let m = Gf2Matrix::from_rows(&[vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 1]]).unwrap();
        let p = matrix_action_extension(7, &[m]).unwrap();
        let g = realize_finite(&p, 1000).unwrap();
        assert_eq!(g.order(), 56);
        assert!(matches!(matrix_action_extension(3, &[Gf2Matrix::identity(3)]), Err(GroupError::Matrix(_))));
    }

    #[test]
    fn relator_equivalence() {
        let p = pres("a^2 = b^3 = 1");
        let w = |t: &str| p.parse_word(t).unwrap();
        assert!(relators_equivalent(&w("a*b*a^-1*b"), &w("b*a*b*a^-1")));
        assert!(relators_equivalent(&w("a*b"), &w("b^-1*a^-1")));
        assert!(!relators_equivalent(&w("a*b"), &w("a*b^-1")));
    }

    #[test]
    fn c2_quotient_enumeration() {
        let action = "(x,{g}) = y^{g}*y = 1";
        assert_eq!(extensions_through_c2(&pres(A4), &pres("g^2 = 1"), action).unwrap().len(), 1);
        assert_eq!(extensions_through_c2(&pres(A4), &pres("g^4 = 1"), action).unwrap().len(), 1);
        let v4 = extensions_through_c2(&pres(A4), &pres("g^2 = h^2 = (g,h) = 1"), action).unwrap();
        assert_eq!(v4.len(), 1);
        assert_eq!(realize_finite(&v4[0].1, 1000).unwrap().order(), 48);
        // C4 x C2 has two classes of surjections onto C2.
        assert_eq!(extensions_through_c2(&pres(A4), &pres("g^4 = h^2 = (g,h) = 1"), action).unwrap().len(), 2);
    }

    #[test]
    fn construction_files() {
        let text = "# id: 99\nconstruct split\nbase\n    a^3 = a*b*a*((b*a*b)^{-1}) = 1\nquotient\n    c^2 = 1\naction\n    a^c*a*b*a^-1 = b^c*b = 1\n";
        let (spec, meta) = ConstructSpec::parse(text).unwrap();
        assert_eq!(meta["id"], "99");
        let built = spec.build(&no_refs).unwrap();
        let ext = realize_built(&built).unwrap();
        assert_eq!((ext.order(), ext.expected_order), (48, 48));

        let ns = "construct nonsplit\nfrom gl\nreplace c^2 with c^4 = c^2*(a*b^-1)^2 = 1\n";
        let (spec2, _) = ConstructSpec::parse(ns).unwrap();
        let split = spec.clone();
        let resolve = move |r: &str| if r == "gl" { Ok(split.clone()) } else { no_refs(r) };
        let ext = realize_built(&spec2.build(&resolve).unwrap()).unwrap();
        assert_eq!((ext.order(), ext.complement), (48, ComplementCheck::NotFound));

        let mx = "construct matrix\nprime 7\nrow 0 1 1\nrow 1 0 0\nrow 1 0 1\n";
        let ext = realize_built(&ConstructSpec::parse(mx).unwrap().0.build(&no_refs).unwrap()).unwrap();
        assert_eq!(ext.order(), 56);

        let dp = "construct direct\nfactor\n    a^3 = a*b*a*((b*a*b)^{-1}) = 1\nfactor\n    c^4 = 1\n";
        let ext = realize_built(&ConstructSpec::parse(dp).unwrap().0.build(&no_refs).unwrap()).unwrap();
        assert_eq!(ext.order(), 96);

        let plain = ConstructSpec::parse("a^2 = 1").unwrap().0;
        assert!(matches!(plain, ConstructSpec::Plain(_)));
        assert!(ConstructSpec::parse("construct split\nbase\n    a^2 = 1\n").is_err());
        assert!(ConstructSpec::parse("construct bogus\n").is_err());
    }
}
