use std::collections::{BTreeSet, HashSet};

use super::ast::{Atom, AttrType, Attribute, Constant, Program, RelationDecl, Rule, Term};
use super::{ParseError, Pos};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Directive(String),
    Ident(String),
    Num(i64),
    Str(String),
    Prov,
    LParen,
    RParen,
    Comma,
    Colon,
    Turnstile,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Directive(d) => format!("`.{d}`"),
            Tok::Ident(i) => format!("identifier `{i}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Prov => "`@prov`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Turnstile => "`:-`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn err(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    fn ident_tail(&mut self, mut s: String) -> String {
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            // whitespace and comments
            loop {
                match self.chars.peek() {
                    Some(c) if c.is_whitespace() => {
                        self.bump();
                    }
                    Some('/') => {
                        let mut look = self.chars.clone();
                        look.next();
                        match look.peek() {
                            Some('/') => {
                                while let Some(c) = self.bump() {
                                    if c == '\n' {
                                        break;
                                    }
                                }
                            }
                            Some('*') => {
                                let start = self.pos();
                                self.bump();
                                self.bump();
                                let mut prev = ' ';
                                loop {
                                    match self.bump() {
                                        Some('/') if prev == '*' => break,
                                        Some(c) => prev = c,
                                        None => {
                                            return Err(Self::err(start, "unterminated comment"))
                                        }
                                    }
                                }
                            }
                            _ => break,
                        }
                    }
                    _ => break,
                }
            }
            let pos = self.pos();
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, pos));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ':' => {
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        Tok::Turnstile
                    } else {
                        Tok::Colon
                    }
                }
                '.' => match self.chars.peek() {
                    Some(&c) if c.is_ascii_alphabetic() => {
                        Tok::Directive(self.ident_tail(String::new()))
                    }
                    _ => Tok::Dot,
                },
                '@' => {
                    let word = self.ident_tail(String::new());
                    if word != "prov" {
                        return Err(Self::err(pos, format!("unknown annotation `@{word}`")));
                    }
                    Tok::Prov
                }
                '"' => {
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some(c @ ('"' | '\\')) => s.push(c),
                                _ => return Err(Self::err(pos, "invalid escape in string")),
                            },
                            Some('\n') | None => return Err(Self::err(pos, "unterminated string")),
                            Some(c) => s.push(c),
                        }
                    }
                    Tok::Str(s)
                }
                c if c.is_ascii_digit() || c == '-' => {
                    let mut s = c.to_string();
                    while let Some(&d) = self.chars.peek() {
                        if d.is_ascii_digit() {
                            s.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Num(
                        s.parse()
                            .map_err(|_| Self::err(pos, format!("invalid number `{s}`")))?,
                    )
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    Tok::Ident(self.ident_tail(c.to_string()))
                }
                other => return Err(Self::err(pos, format!("unexpected character `{other}`"))),
            };
            out.push((tok, pos));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError {
            pos: self.pos(),
            message: format!("unexpected {}", self.peek().describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(_) => match self.next() {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn decl(&mut self) -> Result<RelationDecl, ParseError> {
        let name = self.ident()?;
        self.expect(Tok::LParen, "`(`")?;
        let mut attributes = Vec::new();
        let mut provenance = false;
        if *self.peek() != Tok::RParen {
            loop {
                if provenance {
                    return Err(ParseError {
                        pos: self.pos(),
                        message: "`@prov` must be the last attribute".into(),
                        expected: vec!["`)`".into()],
                    });
                }
                if *self.peek() == Tok::Prov {
                    self.next();
                    provenance = true;
                    if *self.peek() == Tok::Colon {
                        self.next();
                        self.ident()?;
                    }
                } else {
                    let name = self.ident()?;
                    let ty = if *self.peek() == Tok::Colon {
                        self.next();
                        let pos = self.pos();
                        match self.ident()?.as_str() {
                            "symbol" => AttrType::Symbol,
                            "number" => AttrType::Number,
                            other => {
                                return Err(ParseError {
                                    pos,
                                    message: format!("unknown attribute type `{other}`"),
                                    expected: vec!["`symbol`".into(), "`number`".into()],
                                })
                            }
                        }
                    } else {
                        AttrType::Symbol
                    };
                    attributes.push(Attribute { name, ty });
                }
                match self.peek() {
                    Tok::Comma => {
                        self.next();
                    }
                    Tok::RParen => break,
                    _ => return Err(self.unexpected(&["`,`", "`)`"])),
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(RelationDecl {
            name,
            attributes,
            provenance,
        })
    }

    fn name_list(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            out.push((self.ident()?, pos));
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                return Ok(out);
            }
        }
    }

    fn atom(&mut self) -> Result<(Atom, Pos), ParseError> {
        let pos = self.pos();
        let relation = self.ident()?;
        self.expect(Tok::LParen, "`(`")?;
        let mut terms = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                if !matches!(self.peek(), Tok::Ident(_) | Tok::Num(_) | Tok::Str(_)) {
                    return Err(self.unexpected(&["variable", "number", "string"]));
                }
                let term = match self.next() {
                    Tok::Ident(v) => Term::Var(v),
                    Tok::Num(n) => Term::Const(Constant::Num(n)),
                    Tok::Str(s) => Term::Const(Constant::Sym(s)),
                    _ => unreachable!(),
                };
                terms.push(term);
                match self.peek() {
                    Tok::Comma => {
                        self.next();
                    }
                    Tok::RParen => break,
                    _ => return Err(self.unexpected(&["`,`", "`)`"])),
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok((Atom { relation, terms }, pos))
    }
}

struct Positions {
    decls: Vec<Pos>,
    io: Vec<(String, Pos)>,
    rules: Vec<(Pos, Vec<Pos>)>,
}

/// Parses a program and checks the invariants that make it well-formed:
/// unique declarations, declared relations with matching arity, and range
/// restriction.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, at: 0 };
    let mut program = Program::default();
    let mut pos = Positions {
        decls: Vec::new(),
        io: Vec::new(),
        rules: Vec::new(),
    };

    loop {
        let here = p.pos();
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Directive(d) => {
                p.next();
                match d.as_str() {
                    "decl" => {
                        program.declarations.push(p.decl()?);
                        pos.decls.push(here);
                    }
                    "input" | "output" => {
                        for (name, at) in p.name_list()? {
                            pos.io.push((name.clone(), at));
                            if d == "input" {
                                program.inputs.insert(name);
                            } else {
                                program.outputs.insert(name);
                            }
                        }
                    }
                    other => {
                        return Err(ParseError {
                            pos: here,
                            message: format!("unknown directive `.{other}`"),
                            expected: vec!["`.decl`".into(), "`.input`".into(), "`.output`".into()],
                        })
                    }
                }
            }
            Tok::Ident(_) => {
                let (head, head_pos) = p.atom()?;
                if *p.peek() != Tok::Turnstile {
                    return Err(p.unexpected(&["`:-`"]));
                }
                p.next();
                let mut body = Vec::new();
                let mut body_pos = Vec::new();
                loop {
                    let (a, at) = p.atom()?;
                    body.push(a);
                    body_pos.push(at);
                    match p.peek() {
                        Tok::Comma => {
                            p.next();
                        }
                        Tok::Dot => break,
                        _ => return Err(p.unexpected(&["`,`", "`.`"])),
                    }
                }
                p.expect(Tok::Dot, "`.`")?;
                program.rules.push(Rule { head, body });
                pos.rules.push((head_pos, body_pos));
            }
            _ => return Err(p.unexpected(&["`.decl`", "`.input`", "`.output`", "rule"])),
        }
    }

    check_structure(&program, &pos)?;
    Ok(program)
}

fn semantic(pos: Pos, message: String) -> ParseError {
    ParseError {
        pos,
        message,
        expected: Vec::new(),
    }
}

fn check_structure(program: &Program, pos: &Positions) -> Result<(), ParseError> {
    let mut seen = HashSet::new();
    for (d, at) in program.declarations.iter().zip(&pos.decls) {
        if !seen.insert(d.name.as_str()) {
            return Err(semantic(
                *at,
                format!("duplicate declaration of `{}`", d.name),
            ));
        }
        let mut attrs = HashSet::new();
        for a in &d.attributes {
            if !attrs.insert(a.name.as_str()) {
                return Err(semantic(
                    *at,
                    format!("duplicate attribute `{}` in `{}`", a.name, d.name),
                ));
            }
        }
    }
    for (name, at) in &pos.io {
        if program.decl(name).is_none() {
            return Err(semantic(*at, format!("undeclared relation `{name}`")));
        }
    }
    for (rule, (head_pos, body_pos)) in program.rules.iter().zip(&pos.rules) {
        let atoms = std::iter::once((&rule.head, head_pos)).chain(rule.body.iter().zip(body_pos));
        for (atom, at) in atoms {
            let decl = program
                .decl(&atom.relation)
                .ok_or_else(|| semantic(*at, format!("undeclared relation `{}`", atom.relation)))?;
            if decl.arity() != atom.terms.len() {
                return Err(semantic(
                    *at,
                    format!(
                        "`{}` has arity {} but is used with {} terms",
                        atom.relation,
                        decl.arity(),
                        atom.terms.len()
                    ),
                ));
            }
        }
        if let Some(var) = unrestricted_head_vars(rule).into_iter().next() {
            return Err(semantic(
                *head_pos,
                format!("head variable `{var}` does not occur in the rule body"),
            ));
        }
    }
    Ok(())
}

/// Head variables missing from the body, in order of first occurrence.
pub(crate) fn unrestricted_head_vars(rule: &Rule) -> Vec<String> {
    let body: BTreeSet<&str> = rule.body.iter().flat_map(Atom::variables).collect();
    let mut out: Vec<String> = Vec::new();
    for v in rule.head.variables() {
        if !body.contains(v) && !out.iter().any(|o| o == v) {
            out.push(v.to_string());
        }
    }
    out
}
