//! Regular expressions: parse tree, parser and printer.
//!
//! Grammar: `empty`, `eps`, symbol identifiers, `.` concatenation, `|`
//! union, postfix `*`, parentheses. `*` binds tighter than `.`, which binds
//! tighter than `|`. Binary operators associate to the left.

use std::fmt;

use super::{Alphabet, LangError, Sym};

/// Parse tree of a regular expression over symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Regex {
    Empty,
    Eps,
    Sym(Sym),
    Union(Box<Regex>, Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn union(a: Regex, b: Regex) -> Regex {
        Regex::Union(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Regex) -> Regex {
        Regex::Star(Box::new(a))
    }

    /// Union that folds away the empty set and duplicate operands.
    pub fn union_simpl(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, x) | (x, Regex::Empty) => x,
            (a, b) if a == b => a,
            (a, b) => Regex::union(a, b),
        }
    }

    /// Concatenation that folds away the empty set and epsilon.
    pub fn concat_simpl(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
            (Regex::Eps, x) | (x, Regex::Eps) => x,
            (a, b) => Regex::concat(a, b),
        }
    }

    /// Star that folds `empty*`, `eps*` and `x**`.
    pub fn star_simpl(a: Regex) -> Regex {
        match a {
            Regex::Empty | Regex::Eps => Regex::Eps,
            Regex::Star(x) => Regex::Star(x),
            x => Regex::star(x),
        }
    }

    /// Largest symbol index used, if any.
    pub fn max_symbol(&self) -> Option<Sym> {
        match self {
            Regex::Empty | Regex::Eps => None,
            Regex::Sym(s) => Some(*s),
            Regex::Union(a, b) | Regex::Concat(a, b) => a.max_symbol().max(b.max_symbol()),
            Regex::Star(a) => a.max_symbol(),
        }
    }

    /// Printer bound to an alphabet; output parses back to the same tree.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> RegexDisplay<'a> {
        RegexDisplay {
            regex: self,
            alphabet,
        }
    }
}

/// Display adapter returned by [`Regex::display`].
pub struct RegexDisplay<'a> {
    regex: &'a Regex,
    alphabet: &'a Alphabet,
}

impl fmt::Display for RegexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_regex(f, self.regex, self.alphabet, 0)
    }
}

// Precedence levels: 0 union, 1 concat, 2 star/atom.
fn write_regex(f: &mut fmt::Formatter<'_>, r: &Regex, al: &Alphabet, ctx: u8) -> fmt::Result {
    let own = match r {
        Regex::Union(..) => 0,
        Regex::Concat(..) => 1,
        _ => 2,
    };
    let paren = own < ctx;
    if paren {
        f.write_str("(")?;
    }
    match r {
        Regex::Empty => f.write_str("empty")?,
        Regex::Eps => f.write_str("eps")?,
        Regex::Sym(s) => f.write_str(al.name(*s))?,
        Regex::Union(a, b) => {
            write_regex(f, a, al, 0)?;
            f.write_str(" | ")?;
            write_regex(f, b, al, 1)?;
        }
        Regex::Concat(a, b) => {
            write_regex(f, a, al, 1)?;
            f.write_str(" . ")?;
            write_regex(f, b, al, 2)?;
        }
        Regex::Star(a) => {
            write_regex(f, a, al, 2)?;
            f.write_str("*")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Dot,
    Bar,
    Star,
    Plus,
    Comma,
    LParen,
    RParen,
}

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '.' | '|' | '*' | '+' | ',' | '(' | ')')
}

fn tokenize(text: &str) -> Vec<(Tok, usize)> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let t = match c {
            '.' => Tok::Dot,
            '|' => Tok::Bar,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            ',' => Tok::Comma,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                out.push((Tok::Ident(s), i));
                continue;
            }
        };
        chars.next();
        out.push((t, i));
    }
    out
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl<'a> Parser<'a> {
    fn new(text: &str, alphabet: &'a Alphabet) -> Self {
        Parser {
            toks: tokenize(text),
            pos: 0,
            end: text.len(),
            alphabet,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn union(&mut self) -> Result<Regex, LangError> {
        let mut r = self.concat()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.concat()?;
            r = Regex::union(r, rhs);
        }
        Ok(r)
    }

    fn concat(&mut self) -> Result<Regex, LangError> {
        let mut r = self.postfix()?;
        self.no_juxtaposition()?;
        while self.eat(&Tok::Dot) {
            let rhs = self.postfix()?;
            self.no_juxtaposition()?;
            r = Regex::concat(r, rhs);
        }
        Ok(r)
    }

    fn no_juxtaposition(&self) -> Result<(), LangError> {
        if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen)) {
            return self.err("juxtaposition is not concatenation; use `.`");
        }
        Ok(())
    }

    fn postfix(&mut self) -> Result<Regex, LangError> {
        let mut r = self.atom()?;
        while self.eat(&Tok::Star) {
            r = Regex::star(r);
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex, LangError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let r = self.union()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                Ok(r)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let r = match name.as_str() {
                    "empty" => Regex::Empty,
                    "eps" => Regex::Eps,
                    _ => match self.alphabet.index(&name) {
                        Some(s) => Regex::Sym(s),
                        None => return Err(LangError::UnknownSymbol { name, pos: at }),
                    },
                };
                Ok(r)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses a regular expression over `alphabet`.
pub fn parse_regex(text: &str, alphabet: &Alphabet) -> Result<Regex, LangError> {
    let mut p = Parser::new(text, alphabet);
    let r = p.union()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(r)
}

/// Parses a relation expression `(R1, ..., Rk) + (...)` or `empty`.
///
/// Component `i` of every tuple is parsed over `alphabets[i]`. Returns one
/// regex vector per product term.
pub fn parse_relation(text: &str, alphabets: &[&Alphabet]) -> Result<Vec<Vec<Regex>>, LangError> {
    let dummy = Alphabet::new(Vec::<String>::new())?;
    let mut p = Parser::new(text, &dummy);
    if p.toks.len() == 1 && p.toks[0].0 == Tok::Ident("empty".into()) {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    loop {
        if !p.eat(&Tok::LParen) {
            return p.err("expected `(` opening a tuple");
        }
        let mut comps = Vec::new();
        for (i, al) in alphabets.iter().enumerate() {
            if i > 0 && !p.eat(&Tok::Comma) {
                return p.err(format!("expected `,` before component {}", i + 1));
            }
            p.alphabet = al;
            comps.push(p.union()?);
        }
        if !p.eat(&Tok::RParen) {
            return p.err(format!("expected `)` closing a {}-tuple", alphabets.len()));
        }
        terms.push(comps);
        if !p.eat(&Tok::Plus) {
            break;
        }
    }
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn atoms() {
        assert_eq!(parse_regex("eps", &ab()).unwrap(), Regex::Eps);
        assert_eq!(parse_regex("empty", &ab()).unwrap(), Regex::Empty);
        assert_eq!(parse_regex(" a ", &ab()).unwrap(), Regex::Sym(0));
    }

    #[test]
    fn precedence() {
        let r = parse_regex("a | b . b", &ab()).unwrap();
        assert_eq!(
            r,
            Regex::union(Regex::Sym(0), Regex::concat(Regex::Sym(1), Regex::Sym(1)))
        );
        let al = Alphabet::new(["ED", "EV"]).unwrap();
        let r = parse_regex("ED* . EV*", &al).unwrap();
        assert_eq!(
            r,
            Regex::concat(Regex::star(Regex::Sym(0)), Regex::star(Regex::Sym(1)))
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse_regex("a . c", &ab()) {
            Err(LangError::UnknownSymbol { name, pos }) => {
                assert_eq!(name, "c");
                assert_eq!(pos, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_regex("a b", &ab()),
            Err(LangError::Syntax { .. })
        ));
        assert!(matches!(
            parse_regex("(a", &ab()),
            Err(LangError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_regex("a |", &ab()),
            Err(LangError::Syntax { .. })
        ));
    }

    #[test]
    fn printer_round_trips() {
        let al = ab();
        for text in [
            "a . (b . a)",
            "(a | b) . a*",
            "(a . b)* | b",
            "a | (b | a)",
            "eps | empty",
            "a**",
            "(a | eps)*",
        ] {
            let r = parse_regex(text, &al).unwrap();
            let printed = r.display(&al).to_string();
            assert_eq!(parse_regex(&printed, &al).unwrap(), r, "{text} -> {printed}");
        }
    }

    #[test]
    fn relations() {
        let a = Alphabet::new(["d"]).unwrap();
        let b = Alphabet::new(["x", "y"]).unwrap();
        let t = parse_relation("(d*, x . y) + (eps, empty)", &[&a, &b]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[1], vec![Regex::Eps, Regex::Empty]);
        assert!(parse_relation("empty", &[&a, &b]).unwrap().is_empty());
        assert!(parse_relation("(d)", &[&a, &b]).is_err());
        assert!(parse_relation("(x, x)", &[&a, &b]).is_err());
    }
}
