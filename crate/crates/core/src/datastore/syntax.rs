//! Tokenizer and literal parser shared by the program, pack and bias readers.

use std::collections::HashMap;
use std::fmt;

use super::term::{Atom, Builtin, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    /// Lower-case identifier or quoted name.
    Name(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Op(Builtin),
    /// A whole `#...` line, without the `#`.
    Directive(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) => write!(f, "name `{}`", s),
            Tok::Var(s) => write!(f, "variable `{}`", s),
            Tok::Int(i) => write!(f, "integer `{}`", i),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::Op(b) => write!(f, "`{}`", b.name()),
            Tok::Directive(d) => write!(f, "directive `#{}`", d),
        }
    }
}

pub fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let mut at_line_start = true;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
                at_line_start = true;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            bump!();
            continue;
        }
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '#' && at_line_start {
            let start = i + 1;
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            let body: String = chars[start..i].iter().collect();
            let body = match body.find('%') {
                Some(p) => body[..p].to_string(),
                None => body,
            };
            out.push((Tok::Directive(body.trim().to_string()), pos));
            continue;
        }
        at_line_start = false;
        match c {
            '(' => {
                out.push((Tok::LParen, pos));
                bump!();
            }
            ')' => {
                out.push((Tok::RParen, pos));
                bump!();
            }
            ',' => {
                out.push((Tok::Comma, pos));
                bump!();
            }
            '.' => {
                out.push((Tok::Dot, pos));
                bump!();
            }
            ':' if chars.get(i + 1) == Some(&'-') => {
                out.push((Tok::Neck, pos));
                bump!();
                bump!();
            }
            '=' if chars.get(i + 1) == Some(&'<') => {
                out.push((Tok::Op(Builtin::LessEq), pos));
                bump!();
                bump!();
            }
            '=' => {
                out.push((Tok::Op(Builtin::Unify), pos));
                bump!();
            }
            '\\' if chars.get(i + 1) == Some(&'=') => {
                out.push((Tok::Op(Builtin::NotEqual), pos));
                bump!();
                bump!();
            }
            '<' => {
                out.push((Tok::Op(Builtin::Less), pos));
                bump!();
            }
            '\'' => {
                bump!();
                let mut name = String::new();
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(ParseError::new(pos, "unterminated quoted name"))
                        }
                        Some('\'') => {
                            bump!();
                            break;
                        }
                        Some('\\') => {
                            bump!();
                            match chars.get(i) {
                                Some(&e) if e != '\n' => {
                                    name.push(e);
                                    bump!();
                                }
                                _ => return Err(ParseError::new(pos, "bad escape in quoted name")),
                            }
                        }
                        Some(&ch) => {
                            name.push(ch);
                            bump!();
                        }
                    }
                }
                out.push((Tok::Name(name), pos));
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<i64>()
                    .map_err(|_| ParseError::new(pos, format!("integer out of range: {}", s)))?;
                out.push((Tok::Int(v), pos));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    bump!();
                }
                let s: String = chars[start..i].iter().collect();
                if c.is_uppercase() || c == '_' {
                    out.push((Tok::Var(s), pos));
                } else {
                    out.push((Tok::Name(s), pos));
                }
            }
            other => return Err(ParseError::new(pos, format!("unexpected character `{}`", other))),
        }
    }
    Ok(out)
}

/// Maps variable names to ids within one scope (a clause, a pack, a query).
#[derive(Clone, Debug, Default)]
pub struct VarScope {
    names: HashMap<String, Var>,
    next: u32,
}

impl VarScope {
    pub fn new() -> VarScope {
        VarScope::default()
    }

    /// Starts numbering at `first`, for scopes extending existing queries.
    pub fn starting_at(first: u32) -> VarScope {
        VarScope {
            names: HashMap::new(),
            next: first,
        }
    }

    pub fn get(&mut self, name: &str) -> Var {
        if name == "_" {
            let v = Var::new(self.next, "_");
            self.next += 1;
            return v;
        }
        if let Some(v) = self.names.get(name) {
            return *v;
        }
        let v = Var::new(self.next, name);
        self.next += 1;
        self.names.insert(name.to_string(), v);
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.names.get(name).copied()
    }

    pub fn count(&self) -> u32 {
        self.next
    }
}

/// Cursor over a token slice.
pub struct TokenStream<'t> {
    toks: &'t [(Tok, Pos)],
    i: usize,
    end: Pos,
}

impl<'t> TokenStream<'t> {
    pub fn new(toks: &'t [(Tok, Pos)]) -> TokenStream<'t> {
        let end = toks
            .last()
            .map(|(_, p)| Pos {
                line: p.line,
                col: p.col + 1,
            })
            .unwrap_or(Pos { line: 1, col: 1 });
        TokenStream { toks, i: 0, end }
    }

    pub fn peek(&self) -> Option<&'t Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    pub fn peek_at(&self, k: usize) -> Option<&'t Tok> {
        self.toks.get(self.i + k).map(|(t, _)| t)
    }

    pub fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    pub fn next(&mut self) -> Option<&'t Tok> {
        let t = self.toks.get(self.i).map(|(t, _)| t);
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    pub fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ParseError::new(pos, format!("expected {}, found {}", want, t))),
            None => Err(ParseError::new(pos, format!("expected {}, found end of input", want))),
        }
    }

    pub fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self, scope: &mut VarScope) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Name(n)) => Ok(Term::constant(n)),
            Some(Tok::Var(n)) => Ok(Term::Var(scope.get(n))),
            Some(Tok::Int(i)) => Ok(Term::Int(*i)),
            Some(t) => Err(ParseError::new(pos, format!("expected a term, found {}", t))),
            None => Err(ParseError::new(pos, "expected a term, found end of input")),
        }
    }

    /// Parses one literal: `name`, `name(t1,...,tn)` or `t1 op t2`.
    pub fn literal(&mut self, scope: &mut VarScope) -> Result<Atom, ParseError> {
        let pos = self.pos();
        match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Name(n)), Some(Tok::LParen)) => {
                let name = n.clone();
                self.next();
                self.next();
                let mut args = Vec::new();
                loop {
                    args.push(self.term(scope)?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(&Tok::RParen)?;
                    break;
                }
                if Builtin::from_name(&name).is_some() {
                    return Err(ParseError::new(pos, format!("`{}` must be written infix", name)));
                }
                Ok(Atom::new(&name, args))
            }
            (Some(Tok::Name(_) | Tok::Var(_) | Tok::Int(_)), Some(Tok::Op(op))) => {
                let op = *op;
                let lhs = self.term(scope)?;
                self.next();
                let rhs = self.term(scope)?;
                Ok(Atom::new(op.name(), vec![lhs, rhs]))
            }
            (Some(Tok::Name(n)), _) => {
                let name = n.clone();
                self.next();
                Ok(Atom::new(&name, Vec::new()))
            }
            (Some(t), _) => Err(ParseError::new(pos, format!("expected a literal, found {}", t))),
            (None, _) => Err(ParseError::new(pos, "expected a literal, found end of input")),
        }
    }
}

/// Parses a comma-separated conjunction until end of input; `true` is the
/// empty conjunction.
pub fn parse_conjunction(text: &str, scope: &mut VarScope) -> Result<Vec<Atom>, ParseError> {
    let toks = tokenize(text)?;
    let mut ts = TokenStream::new(&toks);
    if ts.at_end() {
        return Ok(Vec::new());
    }
    if ts.peek() == Some(&Tok::Name("true".into())) && ts.peek_at(1).is_none() {
        return Ok(Vec::new());
    }
    let mut atoms = vec![ts.literal(scope)?];
    while ts.eat(&Tok::Comma) {
        atoms.push(ts.literal(scope)?);
    }
    ts.eat(&Tok::Dot);
    if !ts.at_end() {
        return Err(ParseError::new(ts.pos(), format!("unexpected {}", ts.peek().unwrap())));
    }
    Ok(atoms)
}
