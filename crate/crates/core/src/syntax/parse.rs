//! S-expression reader for expressions, types, visible predicates and whole
//! program files. Sugar (`Boolean`, `Bot`) is expanded while parsing.

use num_bigint::BigInt;

use super::{is_valid_ident, Constant, Expr, Ident, Latent, Type, VisiblePred};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error at {found}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        found: String,
        message: String,
    },
    #[error("{line}:{col}: unknown constant `{name}`")]
    UnknownConstant { line: usize, col: usize, name: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. } | ParseError::UnknownConstant { line, col, .. } => {
                (*line, *col)
            }
        }
    }
}

/// A source file: refinement declarations followed by one expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub declared: Vec<Constant>,
    pub expr: Expr,
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text);
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Reads `tt`, `ff`, `none`, a variable, or `<type> @ <variable>`.
pub fn parse_pred(text: &str) -> Result<VisiblePred, ParseError> {
    let mut p = Parser::new(text);
    let pred = p.pred()?;
    p.finish()?;
    Ok(pred)
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text);
    let mut declared = Vec::new();
    while p.peek().tok == Tok::Open
        && matches!(p.peek_at(1).tok, Tok::Atom(ref a) if a == "declare-refinement")
    {
        p.next();
        p.next();
        declared.push(p.constant()?);
        p.expect(Tok::Close, "expected `)` after declared constant")?;
    }
    let expr = p.expr()?;
    p.finish()?;
    Ok(Program { declared, expr })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Colon,
    At,
    Atom(String),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.tok {
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::At => "`@`".into(),
            Tok::Atom(a) => format!("`{a}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, col);
        let mut bump = |c: char| {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        if c == ';' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(c);
                chars.next();
            }
            continue;
        }
        if c.is_whitespace() {
            bump(c);
            chars.next();
            continue;
        }
        let single = match c {
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            ':' => Some(Tok::Colon),
            '@' => Some(Tok::At),
            _ => None,
        };
        let tok = match single {
            Some(tok) => {
                bump(c);
                chars.next();
                tok
            }
            None => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ':' | ';' | '@') {
                        break;
                    }
                    atom.push(c);
                    bump(c);
                    chars.next();
                }
                Tok::Atom(atom)
            }
        };
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    out
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Parser {
        Parser {
            toks: lex(text),
            pos: 0,
        }
    }

    fn peek(&self) -> &Token {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> &Token {
        let last = self.toks.len() - 1;
        &self.toks[(self.pos + k).min(last)]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(tok: &Token, message: &str) -> ParseError {
        ParseError::Syntax {
            line: tok.line,
            col: tok.col,
            found: tok.describe(),
            message: message.to_string(),
        }
    }

    fn expect(&mut self, want: Tok, message: &str) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == want {
            Ok(())
        } else {
            Err(Self::error(&t, message))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Eof => Ok(()),
            _ => Err(Self::error(&t, "expected end of input")),
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Atom(a) if is_valid_ident(a) => Ok(Ident::new(a).expect("checked")),
            _ => Err(Self::error(&t, "expected an identifier")),
        }
    }

    fn constant(&mut self) -> Result<Constant, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Atom(a) => Constant::from_name(a).ok_or_else(|| ParseError::UnknownConstant {
                line: t.line,
                col: t.col,
                name: a.clone(),
            }),
            _ => Err(Self::error(&t, "expected a constant")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Atom(a) => atom_expr(a).ok_or_else(|| Self::error(&t, "expected an expression")),
            Tok::Open => {
                let head = self.peek().clone();
                match &head.tok {
                    Tok::Atom(a) if a == "lambda" => {
                        self.next();
                        self.expect(Tok::Open, "expected `(` before the parameter")?;
                        let x = self.ident()?;
                        self.expect(Tok::Colon, "expected `:` after the parameter")?;
                        let annot = self.ty()?;
                        self.expect(Tok::Close, "expected `)` after the parameter type")?;
                        let body = self.expr()?;
                        self.expect(Tok::Close, "expected `)` closing the lambda")?;
                        Ok(Expr::Abs(x, annot, Box::new(body)))
                    }
                    Tok::Atom(a) if a == "if" => {
                        self.next();
                        let test = self.expr()?;
                        let then = self.expr()?;
                        let els = self.expr()?;
                        self.expect(Tok::Close, "expected `)` closing the conditional")?;
                        Ok(Expr::if_(test, then, els))
                    }
                    _ => {
                        let rator = self.expr()?;
                        let rand = self.expr()?;
                        self.expect(Tok::Close, "an application takes exactly one argument")?;
                        Ok(Expr::app(rator, rand))
                    }
                }
            }
            _ => Err(Self::error(&t, "expected an expression")),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Atom(a) => atom_type(a).ok_or_else(|| Self::error(&t, "expected a type")),
            Tok::Open => {
                let head = self.next();
                match &head.tok {
                    Tok::Atom(a) if a == "U" => {
                        let mut members = Vec::new();
                        while self.peek().tok != Tok::Close {
                            members.push(self.ty()?);
                        }
                        self.next();
                        Ok(Type::Union(members))
                    }
                    Tok::Atom(a) if a == "->" => {
                        let arg = self.ty()?;
                        let res = self.ty()?;
                        let latent = if self.peek().tok == Tok::Colon {
                            self.next();
                            Latent::Pred(Box::new(self.ty()?))
                        } else {
                            Latent::None
                        };
                        self.expect(Tok::Close, "expected `)` closing the arrow")?;
                        Ok(Type::Arrow(Box::new(arg), Box::new(res), latent))
                    }
                    Tok::Atom(a) if a == "Refinement" => {
                        let c = self.constant()?;
                        self.expect(Tok::Close, "expected `)` closing the refinement")?;
                        Ok(Type::Refine(c))
                    }
                    _ => Err(Self::error(&head, "expected `U`, `->` or `Refinement`")),
                }
            }
            _ => Err(Self::error(&t, "expected a type")),
        }
    }

    fn pred(&mut self) -> Result<VisiblePred, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Atom(a) if self.peek_at(1).tok != Tok::At => {
                self.next();
                match a.as_str() {
                    "tt" => Ok(VisiblePred::True),
                    "ff" => Ok(VisiblePred::False),
                    "none" => Ok(VisiblePred::None),
                    _ if is_valid_ident(a) => Ok(VisiblePred::Var(Ident::new(a).expect("checked"))),
                    _ => Err(Self::error(&t, "expected a predicate")),
                }
            }
            _ => {
                let ty = self.ty()?;
                self.expect(Tok::At, "expected `@` after the predicate type")?;
                Ok(VisiblePred::TypeOf(ty, self.ident()?))
            }
        }
    }
}

fn atom_expr(a: &str) -> Option<Expr> {
    match a {
        "#t" => Some(Expr::Bool(true)),
        "#f" => Some(Expr::Bool(false)),
        _ => {
            if let Some(c) = Constant::from_name(a) {
                return Some(Expr::Const(c));
            }
            if let Some(n) = parse_integer(a) {
                return Some(Expr::Num(n));
            }
            Ident::new(a).ok().map(Expr::Var)
        }
    }
}

fn parse_integer(a: &str) -> Option<BigInt> {
    let digits = a.strip_prefix('-').unwrap_or(a);
    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
        a.parse().ok()
    } else {
        None
    }
}

fn atom_type(a: &str) -> Option<Type> {
    match a {
        "Top" => Some(Type::Top),
        "Number" => Some(Type::Num),
        "True" => Some(Type::True),
        "False" => Some(Type::False),
        "Boolean" => Some(Type::boolean()),
        "Bot" => Some(Type::bot()),
        _ => None,
    }
}
