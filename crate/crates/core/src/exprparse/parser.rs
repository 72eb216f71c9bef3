use super::ast::{BinOp, Func, Node};
use super::ParseError;

/// Deepest nesting accepted before the parser gives up. Keeps recursion
/// bounded so adversarial input cannot exhaust the stack.
const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => return self.number(start),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                return Ok((start, Tok::Ident(self.src[start..self.pos].to_string())));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        self.pos += 1;
        Ok((start, tok))
    }

    fn number(&mut self, start: usize) -> Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - s
        };
        let mut n = digits(&mut self.pos);
        if bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(ParseError::syntax(start, "a digit"));
        }
        if matches!(bytes.get(self.pos), Some(b'e' | b'E')) {
            let mut p = self.pos + 1;
            if matches!(bytes.get(p), Some(b'+' | b'-')) {
                p += 1;
            }
            if digits(&mut p) == 0 {
                return Err(ParseError::syntax(p, "exponent digits"));
            }
            self.pos = p;
        }
        let text = &self.src[start..self.pos];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok((start, Tok::Num(v))),
            _ => Err(ParseError::syntax(start, "a finite number")),
        }
    }
}

pub(super) struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    vars: &'a [String],
    depth: usize,
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, vars: &'a [String]) -> Result<Self, ParseError> {
        let mut lex = Lexer { src, pos: 0 };
        let (at, tok) = lex.next()?;
        Ok(Parser { lex, tok, at, vars, depth: 0 })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (at, tok) = self.lex.next()?;
        self.at = at;
        self.tok = tok;
        Ok(())
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::syntax(self.at, format!("{expected}, found {}", self.tok.describe()))
    }

    pub(super) fn parse_all(mut self) -> Result<Node, ParseError> {
        let node = self.expr()?;
        if self.tok != Tok::End {
            return Err(self.unexpected("operator or end of input"));
        }
        Ok(node)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::syntax(self.at, "shallower nesting"));
        }
        Ok(())
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            self.bump()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            self.bump()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.tok == Tok::Op('-') {
            self.enter()?;
            self.bump()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    // power := primary ('^' unary)?
    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Op('^') {
            self.enter()?;
            self.bump()?;
            let exp = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Node::Num(v))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.at;
                if let Some(f) = Func::from_name(&name) {
                    self.bump()?;
                    if self.tok != Tok::LParen {
                        return Err(self.unexpected(&format!("`(` after `{name}`")));
                    }
                    self.bump()?;
                    let arg = self.expr()?;
                    self.close()?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => {
                        self.bump()?;
                        Ok(Node::Var(i))
                    }
                    None => Err(ParseError::UnknownIdentifier { name, offset: at }),
                }
            }
            _ => Err(self.unexpected("number, identifier, function or `(`")),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(self.unexpected("`)`"));
        }
        self.bump()
    }
}
