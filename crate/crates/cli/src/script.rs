//! Line-oriented script parser.
//!
//! Statements:
//!   manifold M dim=3
//!   liealgebra g dim=3 c[3,1,2]=1 ...
//!   algebroid A base=2 rank=2 a[1,2]=x1 C[1,1,2]=1 ...
//!   bivector P = @1^@2
//!   form psi = dx1^dx2^dx3
//!   multivector W = x1*@1 + 1/2*@2
//!   background B = dx1^dx2^dx3
//!   seed 42
//!   bracket <kind>[:<name>] <a> <b>
//!   check <suite> [<args>...]
//!   print <expr>
//!
//! Expressions use `+`, `-`, rational literals `p/q`, `*` (product), `^`
//! (wedge, a synonym of `*`), parentheses, and symbols: context generators
//! or previously declared names. `#` starts a comment.

use std::fmt;

#[derive(Debug, Clone)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.span, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Rational(i64, i64),
    Symbol(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

/// `(k, i, j) -> p/q` for `C^k_ij`.
pub type RationalConstant = ((usize, usize, usize), (i64, i64));

#[derive(Debug, Clone)]
pub enum Statement {
    Manifold {
        name: String,
        dim: usize,
    },
    LieAlgebra {
        name: String,
        dim: usize,
        /// `c[k,i,j] = rational`
        constants: Vec<RationalConstant>,
    },
    Algebroid {
        name: String,
        base: usize,
        rank: usize,
        /// `a[i,alpha] = base polynomial`
        anchor: Vec<((usize, usize), Expr)>,
        /// `C[k,i,j] = base polynomial`
        structure: Vec<((usize, usize, usize), Expr)>,
    },
    Let {
        sort: ValueSort,
        name: String,
        expr: Expr,
    },
    Seed(u64),
    Bracket {
        kind: String,
        parameter: Option<String>,
        a: Expr,
        b: Expr,
    },
    Check {
        suite: String,
        args: Vec<String>,
    },
    Print(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueSort {
    Bivector,
    Form,
    Multivector,
    Background,
}

impl ValueSort {
    pub fn keyword(self) -> &'static str {
        match self {
            ValueSort::Bivector => "bivector",
            ValueSort::Form => "form",
            ValueSort::Multivector => "multivector",
            ValueSort::Background => "background",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Located {
    pub span: Span,
    pub text: String,
    pub statement: Statement,
}

pub fn parse_script(text: &str) -> Result<Vec<Located>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let statement = parse_statement(line, line_no)?;
        out.push(Located {
            span: Span {
                line: line_no,
                col: 1,
            },
            text: line.trim().to_string(),
            statement,
        });
    }
    Ok(out)
}

fn err(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        span: Span { line, col },
        message: message.into(),
    }
}

fn parse_statement(line: &str, line_no: usize) -> Result<Statement, ParseError> {
    let tokens: Vec<(usize, &str)> = split_tokens(line);
    let (head_col, head) = tokens[0];
    let rest = &tokens[1..];
    match head {
        "manifold" => {
            let (name, fields) = name_and_fields(rest, line_no)?;
            let dim = field_usize(&fields, "dim", line_no)?;
            Ok(Statement::Manifold { name, dim })
        }
        "liealgebra" => {
            let (name, fields) = name_and_fields(rest, line_no)?;
            let dim = field_usize(&fields, "dim", line_no)?;
            let mut constants = Vec::new();
            for (col, key, value) in &fields {
                if key.starts_with("c[") {
                    let idx = parse_indices(key, 3, line_no, *col)?;
                    let rat = parse_rational_literal(value, line_no, *col)?;
                    constants.push(((idx[0], idx[1], idx[2]), rat));
                } else if *key != "dim" {
                    return Err(err(line_no, *col, format!("unknown field `{key}`")));
                }
            }
            Ok(Statement::LieAlgebra {
                name,
                dim,
                constants,
            })
        }
        "algebroid" => {
            let (name, fields) = name_and_fields(rest, line_no)?;
            let base = field_usize(&fields, "base", line_no)?;
            let rank = field_usize(&fields, "rank", line_no)?;
            let mut anchor = Vec::new();
            let mut structure = Vec::new();
            for (col, key, value) in &fields {
                if key.starts_with("a[") {
                    let idx = parse_indices(key, 2, line_no, *col)?;
                    anchor.push(((idx[0], idx[1]), parse_expr_str(value, line_no, *col)?));
                } else if key.starts_with("C[") {
                    let idx = parse_indices(key, 3, line_no, *col)?;
                    structure.push((
                        (idx[0], idx[1], idx[2]),
                        parse_expr_str(value, line_no, *col)?,
                    ));
                } else if *key != "base" && *key != "rank" {
                    return Err(err(line_no, *col, format!("unknown field `{key}`")));
                }
            }
            Ok(Statement::Algebroid {
                name,
                base,
                rank,
                anchor,
                structure,
            })
        }
        "bivector" | "form" | "multivector" | "background" => {
            let sort = match head {
                "bivector" => ValueSort::Bivector,
                "form" => ValueSort::Form,
                "multivector" => ValueSort::Multivector,
                _ => ValueSort::Background,
            };
            // <name> = <expr...>
            if rest.len() < 3 || rest[1].1 != "=" {
                return Err(err(
                    line_no,
                    head_col + 1,
                    format!("expected `{head} <name> = <expr>`"),
                ));
            }
            let name = rest[0].1.to_string();
            let expr_text: String = rest[2..]
                .iter()
                .map(|(_, t)| *t)
                .collect::<Vec<_>>()
                .join(" ");
            let expr = parse_expr_str(&expr_text, line_no, rest[2].0 + 1)?;
            Ok(Statement::Let { sort, name, expr })
        }
        "seed" => {
            if rest.len() != 1 {
                return Err(err(line_no, head_col + 1, "expected `seed <N>`"));
            }
            let n: u64 = rest[0]
                .1
                .parse()
                .map_err(|_| err(line_no, rest[0].0 + 1, "seed must be an integer"))?;
            Ok(Statement::Seed(n))
        }
        "bracket" => {
            if rest.len() != 3 {
                return Err(err(
                    line_no,
                    head_col + 1,
                    format!(
                        "`bracket` takes a kind and two arguments, found {} tokens",
                        rest.len()
                    ),
                ));
            }
            let (kind, parameter) = match rest[0].1.split_once(':') {
                Some((k, p)) => (k.to_string(), Some(p.to_string())),
                None => (rest[0].1.to_string(), None),
            };
            let a = parse_expr_str(rest[1].1, line_no, rest[1].0 + 1)?;
            let b = parse_expr_str(rest[2].1, line_no, rest[2].0 + 1)?;
            Ok(Statement::Bracket {
                kind,
                parameter,
                a,
                b,
            })
        }
        "check" => {
            if rest.is_empty() {
                return Err(err(line_no, head_col + 1, "expected `check <suite> ...`"));
            }
            Ok(Statement::Check {
                suite: rest[0].1.to_string(),
                args: rest[1..].iter().map(|(_, t)| t.to_string()).collect(),
            })
        }
        "print" => {
            let expr_text: String = rest
                .iter()
                .map(|(_, t)| *t)
                .collect::<Vec<_>>()
                .join(" ");
            if expr_text.is_empty() {
                return Err(err(line_no, head_col + 1, "expected `print <expr>`"));
            }
            let expr = parse_expr_str(&expr_text, line_no, rest[0].0 + 1)?;
            Ok(Statement::Print(expr))
        }
        other => Err(err(
            line_no,
            head_col + 1,
            format!("unknown statement `{other}`"),
        )),
    }
}

fn split_tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

type Field<'a> = (usize, &'a str, &'a str);

fn name_and_fields<'a>(
    rest: &[(usize, &'a str)],
    line_no: usize,
) -> Result<(String, Vec<Field<'a>>), ParseError> {
    if rest.is_empty() {
        return Err(err(line_no, 1, "expected a name"));
    }
    let name = rest[0].1.to_string();
    let mut fields = Vec::new();
    for (col, tok) in &rest[1..] {
        match tok.split_once('=') {
            Some((k, v)) => fields.push((*col, k, v)),
            None => {
                return Err(err(line_no, col + 1, format!("expected `key=value`, found `{tok}`")))
            }
        }
    }
    Ok((name, fields))
}

fn field_usize(fields: &[Field<'_>], key: &str, line_no: usize) -> Result<usize, ParseError> {
    for (col, k, v) in fields {
        if *k == key {
            return v
                .parse()
                .map_err(|_| err(line_no, col + 1, format!("`{key}` must be an integer")));
        }
    }
    Err(err(line_no, 1, format!("missing `{key}=`")))
}

fn parse_indices(key: &str, n: usize, line_no: usize, col: usize) -> Result<Vec<usize>, ParseError> {
    let open = key.find('[').unwrap();
    if !key.ends_with(']') {
        return Err(err(line_no, col + 1, "missing `]`"));
    }
    let inner = &key[open + 1..key.len() - 1];
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != n {
        return Err(err(
            line_no,
            col + 1,
            format!("expected {n} indices in `{key}`"),
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| err(line_no, col + 1, format!("bad index in `{key}`")))
        })
        .collect()
}

fn parse_rational_literal(s: &str, line_no: usize, col: usize) -> Result<(i64, i64), ParseError> {
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: i64 = num
        .parse()
        .map_err(|_| err(line_no, col + 1, format!("bad rational `{s}`")))?;
    let q: i64 = den
        .parse()
        .map_err(|_| err(line_no, col + 1, format!("bad rational `{s}`")))?;
    if q == 0 {
        return Err(err(line_no, col + 1, "zero denominator"));
    }
    Ok((p, q))
}

// ----------------------------------------------------------------------
// expression parser

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col0: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Rat(i64, i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

impl<'a> Lexer<'a> {
    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let rest = &self.src[self.pos..];
            let ch = rest.chars().next().unwrap();
            let at = self.col0 + self.pos;
            if ch.is_whitespace() {
                self.pos += ch.len_utf8();
            } else if ch == '+' {
                out.push((at, Tok::Plus));
                self.pos += 1;
            } else if ch == '-' {
                out.push((at, Tok::Minus));
                self.pos += 1;
            } else if ch == '*' || ch == '^' {
                out.push((at, Tok::Star));
                self.pos += 1;
            } else if ch == '(' {
                out.push((at, Tok::LParen));
                self.pos += 1;
            } else if ch == ')' {
                out.push((at, Tok::RParen));
                self.pos += 1;
            } else if ch.is_ascii_digit() {
                let len = rest
                    .find(|c: char| !(c.is_ascii_digit() || c == '/'))
                    .unwrap_or(rest.len());
                let lit = &rest[..len];
                let (p, q) = parse_rational_literal(lit, self.line, at)?;
                out.push((at, Tok::Rat(p, q)));
                self.pos += len;
            } else if ch.is_ascii_alphabetic() || ch == '@' || ch == '_' {
                let len = rest
                    .find(|c: char| {
                        !(c.is_ascii_alphanumeric() || c == '_' || c == '@')
                    })
                    .unwrap_or(rest.len());
                out.push((at, Tok::Ident(rest[..len].to_string())));
                self.pos += len;
            } else {
                return Err(err(
                    self.line,
                    at + 1,
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
        Ok(out)
    }
}

pub fn parse_expr_str(text: &str, line: usize, col0: usize) -> Result<Expr, ParseError> {
    let toks = Lexer {
        src: text,
        pos: 0,
        line,
        col0: col0 - 1,
    }
    .tokens()?;
    let mut p = ExprParser {
        toks: &toks,
        pos: 0,
        line,
        end_col: col0 + text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        let (c, _) = p.toks[p.pos];
        return Err(err(line, c + 1, "trailing tokens in expression"));
    }
    Ok(e)
}

struct ExprParser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some((_, Tok::Rat(p, q))) => Ok(Expr::Rational(p, q)),
            Some((_, Tok::Ident(s))) => Ok(Expr::Symbol(s)),
            Some((_, Tok::Minus)) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some((_, Tok::LParen)) => {
                let e = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(e),
                    other => Err(err(
                        self.line,
                        other.map(|(c, _)| c + 1).unwrap_or(self.end_col),
                        "expected `)`",
                    )),
                }
            }
            other => Err(err(
                self.line,
                other.map(|(c, _)| c + 1).unwrap_or(self.end_col),
                "expected a factor",
            )),
        }
    }
}
