use crate::datastore::syntax::{tokenize, Pos, Tok, TokenStream, VarScope};
use crate::datastore::{Atom, Conjunction, ParseError, Var};

use super::{PackError, PackNode, QueryPack};

fn or_tok() -> Tok {
    Tok::Name("or".into())
}

struct PackParser<'t> {
    ts: TokenStream<'t>,
    scope: VarScope,
    next_leaf: usize,
}

impl PackParser<'_> {
    fn pack(&mut self) -> Result<PackNode, ParseError> {
        if self.ts.peek() == Some(&Tok::LParen) {
            let children = self.alternatives()?;
            return Ok(PackNode::branch(Conjunction::empty(), children));
        }
        let start = self.ts.pos();
        let mut atoms = vec![self.ts.literal(&mut self.scope)?];
        while self.ts.eat(&Tok::Comma) {
            if self.ts.peek() == Some(&Tok::LParen) {
                let children = self.alternatives()?;
                return Ok(PackNode::branch(conjunction(atoms, start)?, children));
            }
            atoms.push(self.ts.literal(&mut self.scope)?);
        }
        let id = self.next_leaf;
        self.next_leaf += 1;
        Ok(PackNode::leaf(conjunction(atoms, start)?, id))
    }

    fn alternatives(&mut self) -> Result<Vec<PackNode>, ParseError> {
        let open = self.ts.pos();
        self.ts.expect(&Tok::LParen)?;
        let mut alts = vec![self.pack()?];
        while self.ts.eat(&or_tok()) {
            alts.push(self.pack()?);
        }
        if alts.len() < 2 {
            return Err(ParseError::new(open, "a group needs at least two `or` alternatives"));
        }
        self.ts.expect(&Tok::RParen)?;
        Ok(alts)
    }
}

/// `true` stands for the empty conjunction.
fn conjunction(atoms: Vec<Atom>, at: Pos) -> Result<Conjunction, ParseError> {
    let is_true = |a: &Atom| a.pred.as_str() == "true" && a.args.is_empty();
    if atoms.len() == 1 && is_true(&atoms[0]) {
        return Ok(Conjunction::empty());
    }
    if atoms.iter().any(is_true) {
        return Err(ParseError::new(at, "`true` may only appear on its own"));
    }
    Ok(Conjunction::new(atoms))
}

/// A pack together with the key variables declared by a `#key` line.
#[derive(Clone, Debug)]
pub struct PackFile {
    pub pack: QueryPack,
    pub key: Vec<Var>,
}

/// Parses `conj`, `conj, (pack or pack ...)` or `(pack or pack ...)`.
pub fn parse_pack(text: &str) -> Result<QueryPack, PackError> {
    let file = parse_pack_file(text)?;
    Ok(file.pack)
}

/// Parses a pack file: an optional `#key V1, ..., Vk` line, then the pack,
/// optionally terminated by `.`.
pub fn parse_pack_file(text: &str) -> Result<PackFile, PackError> {
    let toks = tokenize(text)?;
    let mut scope = VarScope::new();
    let mut key = Vec::new();
    let mut body = &toks[..];
    if let Some((Tok::Directive(d), pos)) = toks.first() {
        let Some(rest) = d.strip_prefix("key") else {
            return Err(ParseError::new(*pos, format!("unknown directive `#{}`", d)).into());
        };
        for name in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if !name.starts_with(|c: char| c.is_uppercase()) || scope.lookup(name).is_some() {
                return Err(ParseError::new(*pos, format!("bad key variable `{}`", name)).into());
            }
            key.push(scope.get(name));
        }
        body = &toks[1..];
    }
    let mut p = PackParser {
        ts: TokenStream::new(body),
        scope,
        next_leaf: 0,
    };
    let root = p.pack()?;
    p.ts.eat(&Tok::Dot);
    if let Some(t) = p.ts.peek() {
        return Err(ParseError::new(p.ts.pos(), format!("unexpected {}", t)).into());
    }
    Ok(PackFile {
        pack: QueryPack::new(root),
        key,
    })
}

/// Canonical text form.
pub fn emit_pack(pack: &QueryPack) -> String {
    let mut out = String::new();
    emit_node(&pack.root, &mut out);
    out
}

fn emit_node(n: &PackNode, out: &mut String) {
    use std::fmt::Write;
    if n.is_leaf() || !n.conj.is_empty() {
        let _ = write!(out, "{}", n.conj);
    }
    if n.is_leaf() {
        return;
    }
    if !n.conj.is_empty() {
        out.push_str(", ");
    }
    out.push('(');
    for (i, c) in n.children.iter().enumerate() {
        if i > 0 {
            out.push_str(" or ");
        }
        emit_node(c, out);
    }
    out.push(')');
}
