//! Concrete syntax:
//!
//! ```text
//! expr    := disj ('&' disj)*
//! disj    := concat ('|' concat)*
//! concat  := postfix (',' postfix)*
//! postfix := atom ('?' | '*' | '+' | '[' n ';' (m | '*') ']')*
//! atom    := 'eps' | symbol | '(' expr ')'
//! symbol  := label | label '::' type | '<' wildcard '>' '::' type
//! ```

use std::fmt;

use thiserror::Error;

use super::{Interval, Rbe};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct RbeParseError {
    pub pos: usize,
    pub msg: String,
}

/// A symbol as written, before it is resolved against a schema.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RawSymbol {
    pub label: String,
    pub ty: Option<String>,
    /// Written `<NAME>::t`.
    pub wildcard: bool,
}

impl fmt::Display for RawSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.wildcard {
            write!(f, "<{}>", self.label)?;
        } else {
            write!(f, "{}", self.label)?;
        }
        if let Some(t) = &self.ty {
            write!(f, "::{t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Bar,
    Amp,
    Question,
    Star,
    Plus,
    Range(Interval),
    Eps,
    Sym(RawSymbol),
}

const DELIMS: &str = "(),|&?*+[]";

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, RbeParseError> {
    let err = |pos, msg: &str| RbeParseError { pos, msg: msg.to_string() };
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '|' => Some(Tok::Bar),
            '&' => Some(Tok::Amp),
            '?' => Some(Tok::Question),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            _ => None,
        };
        if let Some(t) = single {
            it.next();
            out.push((pos, t));
            continue;
        }
        if c == '[' {
            let close = src[pos..].find(']').ok_or_else(|| err(pos, "unterminated interval"))? + pos;
            let body = &src[pos + 1..close];
            let (lo, hi) = body.split_once(';').ok_or_else(|| err(pos, "interval needs `;`"))?;
            let lo: u64 = lo.trim().parse().map_err(|_| err(pos, "bad interval lower bound"))?;
            let hi = match hi.trim() {
                "*" => None,
                h => Some(h.parse::<u64>().map_err(|_| err(pos, "bad interval upper bound"))?),
            };
            let interval = Interval::new(lo, hi);
            if interval.is_empty() {
                return Err(err(pos, "empty interval"));
            }
            out.push((pos, Tok::Range(interval)));
            while it.peek().is_some_and(|&(p, _)| p <= close) {
                it.next();
            }
            continue;
        }
        if c == ']' {
            return Err(err(pos, "unexpected `]`"));
        }
        let mut end = pos;
        while let Some(&(p, ch)) = it.peek() {
            if ch.is_whitespace() || DELIMS.contains(ch) {
                break;
            }
            end = p + ch.len_utf8();
            it.next();
        }
        let word = &src[pos..end];
        if word == "eps" {
            out.push((pos, Tok::Eps));
        } else {
            out.push((pos, Tok::Sym(raw_symbol(word).ok_or_else(|| err(pos, "malformed symbol"))?)));
        }
    }
    Ok(out)
}

fn raw_symbol(word: &str) -> Option<RawSymbol> {
    let (label, ty) = match word.rfind("::") {
        Some(i) => (&word[..i], Some(word[i + 2..].to_string())),
        None => (word, None),
    };
    if label.is_empty() || ty.as_deref() == Some("") {
        return None;
    }
    let (label, wildcard) = match label.strip_prefix('<').and_then(|l| l.strip_suffix('>')) {
        Some(inner) if !inner.is_empty() => (inner.to_string(), true),
        _ => (label.to_string(), false),
    };
    if wildcard && ty.is_none() {
        return None;
    }
    Some(RawSymbol { label, ty, wildcard })
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    allow_inter: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn fail<T>(&self, msg: &str) -> Result<T, RbeParseError> {
        Err(RbeParseError { pos: self.pos(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<Rbe<RawSymbol>, RbeParseError> {
        let mut arms = vec![self.disj()?];
        while self.peek() == Some(&Tok::Amp) {
            if !self.allow_inter {
                return self.fail("`&` is not allowed here");
            }
            self.at += 1;
            arms.push(self.disj()?);
        }
        Ok(Rbe::inter(arms))
    }

    fn disj(&mut self) -> Result<Rbe<RawSymbol>, RbeParseError> {
        let mut arms = vec![self.concat()?];
        while self.peek() == Some(&Tok::Bar) {
            self.at += 1;
            arms.push(self.concat()?);
        }
        Ok(Rbe::disj(arms))
    }

    fn concat(&mut self) -> Result<Rbe<RawSymbol>, RbeParseError> {
        let mut parts = vec![self.postfix()?];
        while self.peek() == Some(&Tok::Comma) {
            self.at += 1;
            parts.push(self.postfix()?);
        }
        Ok(Rbe::concat(parts))
    }

    fn postfix(&mut self) -> Result<Rbe<RawSymbol>, RbeParseError> {
        let mut e = self.atom()?;
        loop {
            e = match self.peek() {
                Some(Tok::Question) => Rbe::opt(e),
                Some(Tok::Star) => Rbe::star(e),
                Some(Tok::Plus) => Rbe::plus(e),
                Some(Tok::Range(i)) => match e {
                    Rbe::Symbol(s, one) if one == Interval::ONE => Rbe::Symbol(s, *i),
                    _ => return self.fail("an interval applies only to a bare symbol"),
                },
                _ => return Ok(e),
            };
            self.at += 1;
        }
    }

    fn atom(&mut self) -> Result<Rbe<RawSymbol>, RbeParseError> {
        match self.peek().cloned() {
            Some(Tok::Eps) => {
                self.at += 1;
                Ok(Rbe::Epsilon)
            }
            Some(Tok::Sym(s)) => {
                self.at += 1;
                Ok(Rbe::sym(s))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("expected `)`");
                }
                self.at += 1;
                Ok(e)
            }
            Some(_) => self.fail("expected a symbol, `eps` or `(`"),
            None => self.fail("unexpected end of expression"),
        }
    }
}

/// Parses an expression; `allow_inter` admits the `&` operator.
pub fn parse_rbe(src: &str, allow_inter: bool) -> Result<Rbe<RawSymbol>, RbeParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, end: src.len(), allow_inter };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(e)
}

/// Parses an expression whose symbols are plain strings (`a` or `a::t`).
pub fn parse_plain(src: &str) -> Result<Rbe<String>, RbeParseError> {
    Ok(parse_rbe(src, true)?.map_symbols(&mut |s: &RawSymbol| s.to_string()))
}

/// Parses a comma separated bag such as `a,a,b`.
pub fn parse_bag_list(src: &str) -> Vec<String> {
    src.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}
