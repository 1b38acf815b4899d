//! Presentation syntax: chained relators with powers, conjugates and commutators.
//!
//! ```text
//! file   := header? chain+
//! header := "group" NAME NL ("gens" NAME+ NL)?
//! chain  := expr ("=" expr)* "=" "1" ";"? NL
//! expr   := term ("*" term)*
//! term   := atom ("^" (INT | atom))*
//! atom   := NAME | "1" | "(" expr ("," expr)? ")"
//! ```
//!
//! `(x,y)` is the commutator `x^-1 y^-1 x y` and `x^y` is `y^-1 x y`.  Integer
//! exponents may be negative and may be braced (`x^{-1}`).  A line that ends
//! in an operator continues on the next line.  Lines starting with `#` are
//! comments; `# key: value` comments become presentation metadata.

use std::collections::BTreeMap;

use crate::error::{GroupError, Result};
use crate::word::Word;

/// Parse tree of a word expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordExpr {
    Identity,
    Generator(u32),
    Product(Vec<WordExpr>),
    Power(Box<WordExpr>, i64),
    Conjugation(Box<WordExpr>, Box<WordExpr>),
    Commutator(Box<WordExpr>, Box<WordExpr>),
    Inverse(Box<WordExpr>),
}

/// Expands an expression into a freely reduced word.
pub fn expand(expr: &WordExpr) -> Word {
    match expr {
        WordExpr::Identity => Word::identity(),
        WordExpr::Generator(g) => Word::generator(*g),
        WordExpr::Product(items) => items.iter().fold(Word::identity(), |acc, e| acc.mul(&expand(e))),
        WordExpr::Power(e, k) => expand(e).pow(*k),
        WordExpr::Conjugation(x, y) => expand(x).conjugate(&expand(y)),
        WordExpr::Commutator(x, y) => expand(x).commutator(&expand(y)),
        WordExpr::Inverse(e) => expand(e).inverse(),
    }
}

/// Generators plus relators, with a name and free-form metadata.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    pub metadata: BTreeMap<String, String>,
}

impl Presentation {
    pub fn new(name: &str, generators: Vec<String>, relators: Vec<Word>) -> Self {
        let mut p = Presentation {
            name: name.to_string(),
            generators,
            relators: Vec::new(),
            metadata: BTreeMap::new(),
        };
        for r in relators {
            p.add_relator(r);
        }
        p
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    /// Adds a relator unless it is trivial or already present.
    pub fn add_relator(&mut self, r: Word) -> bool {
        if r.is_identity() || self.relators.contains(&r) {
            return false;
        }
        self.relators.push(r);
        true
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn word_string(&self, w: &Word) -> String {
        w.display(&self.generators).to_string()
    }

    /// Parses a single word over this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut gens = self.generators.clone();
        let toks = tokenize(text)?;
        let mut p = Parser { toks: &toks, pos: 0, gens: &mut gens, strict: true };
        let e = p.expr()?;
        p.skip_newlines();
        p.expect_eof()?;
        Ok(expand(&e))
    }

    /// Parses a relator chain (`w1 = w2 = 1`) over this presentation's generators.
    /// With `extend` set, unknown names become new generators.
    pub fn parse_chain(&mut self, text: &str, extend: bool) -> Result<Vec<Word>> {
        let toks = tokenize(text)?;
        let mut gens = self.generators.clone();
        let mut out = Vec::new();
        {
            let mut p = Parser { toks: &toks, pos: 0, gens: &mut gens, strict: !extend };
            p.skip_newlines();
            while !p.at_eof() {
                out.extend(p.chain()?);
                p.skip_newlines();
            }
        }
        self.generators = gens;
        Ok(out)
    }
}

/// Parsing options.
#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Reject generators not declared by a `gens` line (or by `generators`).
    pub strict: bool,
    /// Generators declared up front, overriding the file's `gens` line.
    pub generators: Option<Vec<String>>,
}

/// Parses a presentation, inferring generators in order of first appearance
/// unless the file declares them with a `gens` line (which makes parsing strict).
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    parse_presentation_with(text, &ParseOptions::default())
}

pub fn parse_presentation_with(text: &str, opts: &ParseOptions) -> Result<Presentation> {
    let mut metadata = BTreeMap::new();
    for line in text.lines() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                let k = k.trim();
                if !k.is_empty() && k.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
                    metadata.insert(k.to_string(), v.trim().to_string());
                }
            }
        }
    }
    let toks = tokenize(text)?;
    let mut gens: Vec<String> = opts.generators.clone().unwrap_or_default();
    let mut strict = opts.strict || opts.generators.is_some();
    let mut name = String::new();
    let mut relators = Vec::new();
    {
        let mut p = Parser { toks: &toks, pos: 0, gens: &mut gens, strict };
        p.skip_newlines();
        if p.peek_name() == Some("group") {
            p.pos += 1;
            match p.next() {
                Tok { kind: TokKind::Name(n), .. } => name = n.clone(),
                t => return Err(syntax(t, "expected group name")),
            }
            p.expect_line_end()?;
            p.skip_newlines();
            if p.peek_name() == Some("gens") {
                p.pos += 1;
                let mut declared = Vec::new();
                while let TokKind::Name(n) = &p.peek().kind {
                    if declared.contains(n) {
                        return Err(syntax(p.peek(), &format!("generator `{n}` declared twice")));
                    }
                    declared.push(n.clone());
                    p.pos += 1;
                }
                p.expect_line_end()?;
                if opts.generators.is_none() {
                    *p.gens = declared;
                    strict = true;
                    p.strict = true;
                }
            }
        }
        p.skip_newlines();
        while !p.at_eof() {
            relators.extend(p.chain()?);
            p.skip_newlines();
        }
    }
    let _ = strict;
    let mut pres = Presentation::new(&name, gens, relators);
    pres.metadata = metadata;
    Ok(pres)
}

/// Serializes a presentation so that [`parse_presentation`] reads it back.
/// A name that is not a plain identifier is kept as a `# name:` line.
pub fn serialize(p: &Presentation) -> String {
    let mut out = String::new();
    let plain = p.name.chars().next().is_some_and(|c| c.is_alphabetic())
        && p.name.chars().all(|c| c.is_alphanumeric() || c == '_');
    if !plain && !p.name.is_empty() && !p.metadata.contains_key("name") {
        out.push_str(&format!("# name: {}\n", p.name));
    }
    for (k, v) in &p.metadata {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    let name = if plain { p.name.as_str() } else { "G" };
    out.push_str(&format!("group {name}\n"));
    if !p.generators.is_empty() {
        out.push_str("gens");
        for g in &p.generators {
            out.push(' ');
            out.push_str(g);
        }
        out.push('\n');
    }
    for r in &p.relators {
        out.push_str(&format!("{} = 1\n", r.display(&p.generators)));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Name(String),
    Int(i64),
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    LBrace,
    RBrace,
    Eq,
    Semi,
    Minus,
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
struct Tok {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn syntax(t: &Tok, msg: &str) -> GroupError {
    GroupError::Syntax { line: t.line, col: t.col, msg: msg.to_string() }
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let mut toks: Vec<Tok> = Vec::new();
    let mut depth = 0i32;
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let lno = li + 1;
            let push = |toks: &mut Vec<Tok>, kind| toks.push(Tok { kind, line: lno, col });
            match c {
                '#' => break,
                ' ' | '\t' | '\r' => {}
                '*' => push(&mut toks, TokKind::Star),
                '^' => push(&mut toks, TokKind::Caret),
                '(' => {
                    depth += 1;
                    push(&mut toks, TokKind::LParen)
                }
                ')' => {
                    depth -= 1;
                    push(&mut toks, TokKind::RParen)
                }
                ',' => push(&mut toks, TokKind::Comma),
                '{' => push(&mut toks, TokKind::LBrace),
                '}' => push(&mut toks, TokKind::RBrace),
                '=' => push(&mut toks, TokKind::Eq),
                ';' => push(&mut toks, TokKind::Semi),
                '-' => push(&mut toks, TokKind::Minus),
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..=i].iter().collect();
                    let v = s.parse::<i64>().map_err(|_| GroupError::Syntax {
                        line: lno,
                        col,
                        msg: format!("integer `{s}` out of range"),
                    })?;
                    push(&mut toks, TokKind::Int(v));
                }
                c if c.is_alphabetic() => {
                    let start = i;
                    while i + 1 < chars.len()
                        && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '.' || chars[i + 1] == '_')
                    {
                        i += 1;
                    }
                    // A trailing dot is punctuation, not part of the name.
                    while chars[i] == '.' {
                        i -= 1;
                    }
                    let s: String = chars[start..=i].iter().collect();
                    push(&mut toks, TokKind::Name(s));
                }
                other => {
                    return Err(GroupError::Syntax {
                        line: lno,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
            i += 1;
        }
        let continues = depth > 0
            || matches!(
                toks.last().map(|t| &t.kind),
                Some(TokKind::Eq | TokKind::Star | TokKind::Caret | TokKind::LParen | TokKind::Comma | TokKind::LBrace | TokKind::Minus)
            );
        if !continues && !matches!(toks.last().map(|t| &t.kind), None | Some(TokKind::Newline)) {
            toks.push(Tok { kind: TokKind::Newline, line: li + 1, col: chars.len() + 1 });
        }
    }
    let line = text.lines().count() + 1;
    toks.push(Tok { kind: TokKind::Eof, line, col: 1 });
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    gens: &'a mut Vec<String>,
    strict: bool,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> &Tok {
        let t = &self.toks[self.pos.min(self.toks.len() - 1)];
        self.pos += 1;
        t
    }

    fn peek_name(&self) -> Option<&str> {
        match &self.peek().kind {
            TokKind::Name(n) => Some(n.as_str()),
            _ => None,
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokKind::Eof
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek().kind, TokKind::Newline | TokKind::Semi) {
            self.pos += 1;
        }
    }

    fn expect_eof(&mut self) -> Result<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(syntax(self.peek(), "unexpected trailing input"))
        }
    }

    fn expect_line_end(&mut self) -> Result<()> {
        match self.peek().kind {
            TokKind::Newline => {
                self.pos += 1;
                Ok(())
            }
            TokKind::Eof => Ok(()),
            _ => Err(syntax(self.peek(), "expected end of line")),
        }
    }

    fn chain(&mut self) -> Result<Vec<Word>> {
        let mut members = vec![self.expr()?];
        while self.peek().kind == TokKind::Eq {
            self.pos += 1;
            members.push(self.expr()?);
        }
        let last = members.pop().unwrap();
        let start = self.peek().clone();
        if members.is_empty() || last != WordExpr::Identity {
            return Err(syntax(&start, "relator chain must end with `= 1`"));
        }
        match self.peek().kind {
            TokKind::Semi => {
                self.pos += 1;
            }
            TokKind::Newline | TokKind::Eof => {}
            _ => return Err(syntax(self.peek(), "expected `=`, `;` or end of line")),
        }
        Ok(members.iter().map(expand).filter(|w| !w.is_identity()).collect())
    }

    fn expr(&mut self) -> Result<WordExpr> {
        let mut items = vec![self.term()?];
        while self.peek().kind == TokKind::Star {
            self.pos += 1;
            items.push(self.term()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { WordExpr::Product(items) })
    }

    fn term(&mut self) -> Result<WordExpr> {
        let mut e = self.atom()?;
        while self.peek().kind == TokKind::Caret {
            self.pos += 1;
            if let Some(k) = self.try_int()? {
                e = WordExpr::Power(Box::new(e), k);
            } else if matches!(self.peek().kind, TokKind::Name(_) | TokKind::LParen) {
                let by = self.atom()?;
                e = WordExpr::Conjugation(Box::new(e), Box::new(by));
            } else {
                return Err(syntax(self.peek(), "`^` must be followed by an integer or a word"));
            }
        }
        Ok(e)
    }

    fn try_int(&mut self) -> Result<Option<i64>> {
        let braced = self.peek().kind == TokKind::LBrace;
        let save = self.pos;
        if braced {
            self.pos += 1;
        }
        let neg = if self.peek().kind == TokKind::Minus {
            self.pos += 1;
            true
        } else {
            false
        };
        let v = match self.peek().kind {
            TokKind::Int(v) => {
                self.pos += 1;
                v
            }
            _ => {
                if braced || neg {
                    return Err(syntax(self.peek(), "expected integer exponent"));
                }
                self.pos = save;
                return Ok(None);
            }
        };
        if braced {
            if self.peek().kind != TokKind::RBrace {
                return Err(syntax(self.peek(), "expected `}`"));
            }
            self.pos += 1;
        }
        Ok(Some(if neg { -v } else { v }))
    }

    fn atom(&mut self) -> Result<WordExpr> {
        let t = self.peek().clone();
        match &t.kind {
            TokKind::Name(n) => {
                self.pos += 1;
                if let Some(i) = self.gens.iter().position(|g| g == n) {
                    Ok(WordExpr::Generator(i as u32))
                } else if self.strict {
                    Err(GroupError::UnknownGenerator { name: n.clone(), line: t.line, col: t.col })
                } else {
                    self.gens.push(n.clone());
                    Ok(WordExpr::Generator(self.gens.len() as u32 - 1))
                }
            }
            TokKind::Int(1) => {
                self.pos += 1;
                Ok(WordExpr::Identity)
            }
            TokKind::LParen => {
                self.pos += 1;
                let first = self.expr()?;
                let out = if self.peek().kind == TokKind::Comma {
                    self.pos += 1;
                    let second = self.expr()?;
                    WordExpr::Commutator(Box::new(first), Box::new(second))
                } else {
                    first
                };
                if self.peek().kind != TokKind::RParen {
                    return Err(syntax(self.peek(), "expected `)`"));
                }
                self.pos += 1;
                Ok(out)
            }
            _ => Err(syntax(&t, "expected a generator, `1` or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(p: &Presentation, s: &str) -> Word {
        p.parse_word(s).unwrap()
    }

    #[test]
    fn sl23_chain() {
        let p = parse_presentation("a^3 = a*b*a*((b*a*b)^{-1}) = 1;").unwrap();
        assert_eq!(p.generators, vec!["a", "b"]);
        assert_eq!(p.relators.len(), 2);
        assert_eq!(p.relators[0], Word::from_syllables([(0, 3)]));
        assert_eq!(p.relators[1], w(&p, "a*b*a*b^-1*a^-1*b^-1"));
    }

    #[test]
    fn single_relator_and_commutator() {
        let p = parse_presentation("a^2 = 1").unwrap();
        assert_eq!(p.ngens(), 1);
        assert_eq!(p.relators, vec![Word::from_syllables([(0, 2)])]);
        let p = parse_presentation("group G\ngens a b\n(a,b) = 1\n").unwrap();
        assert_eq!(p.relators[0], Word::from_syllables([(0, -1), (1, -1), (0, 1), (1, 1)]));
    }

    #[test]
    fn conjugation_and_powers() {
        let p = parse_presentation("gensless = 1").unwrap();
        assert_eq!(p.generators, vec!["gensless"]);
        let p = parse_presentation("a^b^2 = a^-1 = a^{-2} = 1").unwrap();
        let a = Word::generator(0);
        let b = Word::generator(1);
        assert_eq!(p.relators[0], a.conjugate(&b).pow(2));
        assert_eq!(p.relators[1], a.inverse());
        assert_eq!(p.relators[2], a.pow(-2));
        let p = parse_presentation("a^(b*c) = 1").unwrap();
        assert_eq!(p.relators[0], a.conjugate(&b.mul(&Word::generator(2))));
    }

    #[test]
    fn dotted_names_and_continuation() {
        let p = parse_presentation("T.1^2 = T.10^3 =\n (T.1, T.10) = 1").unwrap();
        assert_eq!(p.generators, vec!["T.1", "T.10"]);
        assert_eq!(p.relators.len(), 3);
    }

    #[test]
    fn errors_carry_position() {
        match parse_presentation("a^2 = b") {
            Err(GroupError::Syntax { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_presentation("group G\ngens a\na^2 = b = 1") {
            Err(GroupError::UnknownGenerator { name, line: 3, col: 7 }) => assert_eq!(name, "b"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_presentation("a^ = 1").is_err());
        assert!(parse_presentation("a^{x} = 1").is_err());
        assert!(parse_presentation("(a*b = 1").is_err());
    }

    #[test]
    fn metadata_and_roundtrip() {
        let text = "# source: test table\ngroup Q\ngens a b\na^4 = a^2*b^-2 = a^b*a = 1\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.metadata.get("source").map(String::as_str), Some("test table"));
        let q = parse_presentation(&serialize(&p)).unwrap();
        assert_eq!(p, q);
        let free = Presentation::new("F", vec!["x".into(), "y".into()], vec![]);
        let back = parse_presentation(&serialize(&free)).unwrap();
        assert_eq!(back.generators, free.generators);
        assert!(back.relators.is_empty());
    }

    #[test]
    fn duplicates_dropped() {
        let p = parse_presentation("a^2 = a^2 = (a^2)^b*b^-1*a^-2*b = 1").unwrap();
        assert_eq!(p.relators.len(), 1);
    }

    #[test]
    fn descriptive_names_survive_serialization() {
        let mut p = parse_presentation("a^3 = b^2 = (a*b)^2 = 1").unwrap();
        p.name = "S3 @ C2, first action".into();
        let q = parse_presentation(&serialize(&p)).unwrap();
        assert_eq!(q.metadata.get("name").map(String::as_str), Some("S3 @ C2, first action"));
        assert_eq!(q.relators, p.relators);
    }
}
