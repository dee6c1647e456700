use std::fmt;

use crate::datastore::{Sym, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `+`: a variable already in the query.
    Input,
    /// `-`: a fresh variable.
    Output,
    /// `#`: one of the template's enumerated constants.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub pred: Sym,
    pub modes: Vec<Mode>,
    /// Per argument; filled for `#` arguments only.
    pub constants: Vec<Vec<Term>>,
}

impl Template {
    pub fn arity(&self) -> usize {
        self.modes.len()
    }

    fn new(pred: &str, modes: Vec<Mode>) -> Template {
        let n = modes.len();
        Template {
            pred: Sym::intern(pred),
            modes,
            constants: vec![Vec::new(); n],
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let modes: Vec<&str> = self
            .modes
            .iter()
            .map(|m| match m {
                Mode::Input => "+",
                Mode::Output => "-",
                Mode::Constant => "#",
            })
            .collect();
        write!(f, "{}/{} {}", self.pred, self.arity(), modes.join(","))
    }
}

/// The refinement alphabet: literal templates in priority order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LanguageBias {
    pub templates: Vec<Template>,
    /// Most fresh variables one added literal may introduce.
    pub max_new_vars: Option<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("bias line {line}: {message}")]
pub struct BiasError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> BiasError {
    BiasError {
        line,
        message: message.into(),
    }
}

fn pred_arity(s: &str, line: usize) -> Result<(&str, usize), BiasError> {
    let (name, arity) = s.split_once('/').ok_or_else(|| err(line, format!("expected name/arity, got `{}`", s)))?;
    let arity = arity.parse().map_err(|_| err(line, format!("bad arity in `{}`", s)))?;
    if name.is_empty() || !name.starts_with(|c: char| c.is_ascii_lowercase()) {
        return Err(err(line, format!("bad predicate name `{}`", name)));
    }
    Ok((name, arity))
}

fn constant(s: &str) -> Term {
    match s.parse::<i64>() {
        Ok(i) => Term::Int(i),
        Err(_) => Term::constant(s),
    }
}

/// Reads the bias text format:
///
/// ```text
/// template leftof/2 +,-
/// template color/2 +,#
/// constants color/2 red,blue
/// maxnewvars 1
/// ```
///
/// `constants p/n v1,...` supplies values for every `#` argument of the
/// `p/n` templates; `constants p/n/i v1,...` for argument `i` only (from 1).
pub fn parse_bias(text: &str) -> Result<LanguageBias, BiasError> {
    let mut bias = LanguageBias::default();
    // (line, predicate, arity, position, values), applied once all
    // templates are known.
    type Pending = (usize, String, usize, Option<usize>, Vec<Term>);
    let mut constants: Vec<Pending> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('%').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let keyword = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        match keyword {
            "template" => {
                let [sig, modes] = rest[..] else {
                    return Err(err(line, "expected `template name/arity modes`"));
                };
                let (name, arity) = pred_arity(sig, line)?;
                let modes = modes
                    .split(',')
                    .map(|m| match m.trim() {
                        "+" => Ok(Mode::Input),
                        "-" => Ok(Mode::Output),
                        "#" => Ok(Mode::Constant),
                        other => Err(err(line, format!("unknown mode `{}`", other))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if modes.len() != arity {
                    return Err(err(line, format!("{} modes for arity {}", modes.len(), arity)));
                }
                bias.templates.push(Template::new(name, modes));
            }
            "constants" => {
                let [sig, values] = rest[..] else {
                    return Err(err(line, "expected `constants name/arity v1,v2,...`"));
                };
                let mut fields = sig.splitn(3, '/');
                let name = fields.next().unwrap_or_default();
                let arity = fields.next().unwrap_or_default();
                let sig = format!("{}/{}", name, arity);
                let (name, arity) = pred_arity(&sig, line)?;
                let pos = match fields.next() {
                    Some(p) => match p.parse::<usize>() {
                        Ok(p) if p >= 1 && p <= arity => Some(p - 1),
                        _ => return Err(err(line, format!("bad argument position `{}`", p))),
                    },
                    None => None,
                };
                let values: Vec<Term> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).map(constant).collect();
                constants.push((line, name.to_string(), arity, pos, values));
            }
            "maxnewvars" => {
                let [n] = rest[..] else {
                    return Err(err(line, "expected `maxnewvars n`"));
                };
                bias.max_new_vars = Some(n.parse().map_err(|_| err(line, format!("bad count `{}`", n)))?);
            }
            other => return Err(err(line, format!("unknown keyword `{}`", other))),
        }
    }
    for (line, name, arity, pos, values) in constants {
        let mut used = false;
        for t in bias.templates.iter_mut().filter(|t| t.pred.as_str() == name && t.arity() == arity) {
            for (i, m) in t.modes.iter().enumerate() {
                if *m == Mode::Constant && pos.is_none_or(|p| p == i) {
                    t.constants[i].extend(values.iter().copied());
                    used = true;
                }
            }
        }
        if !used {
            return Err(err(line, format!("no `#` argument of a {}/{} template matches", name, arity)));
        }
    }
    for t in &bias.templates {
        for (i, m) in t.modes.iter().enumerate() {
            if *m == Mode::Constant && t.constants[i].is_empty() {
                return Err(err(0, format!("template {} has no constants for argument {}", t, i + 1)));
            }
        }
    }
    Ok(bias)
}
