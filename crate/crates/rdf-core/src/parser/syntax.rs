//! Recursive-descent parser with backtracking over the token stream.

use super::lexer::{lex, SourceSpan, Token, TokenKind};
use crate::formula::{
    validate, Atom, BinOp, DerRel, ExtEndpoint, Formula, FuncVar, NumRel, NumTerm, ShapeKind,
    ValidationError,
};
use crate::rational::Rational;
use num_traits::Zero;

/// A malformed-input diagnostic, pointing into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub message: String,
    pub span: SourceSpan,
}

impl std::fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "syntax error at {}: {}", self.span, self.message)
    }
}

impl std::error::Error for SyntaxError {}

/// Everything that can go wrong while turning text into a formula.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    Syntax(SyntaxError),
    Validation(ValidationError),
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Syntax(e) => e.fmt(f),
            ParseError::Validation(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for ParseError {}

impl From<SyntaxError> for ParseError {
    fn from(e: SyntaxError) -> Self {
        ParseError::Syntax(e)
    }
}

/// Parse and validate. The result is a validated formula: endpoint
/// restrictions checked and `@0` / `@1` desugared.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let formula = parse_unvalidated(text)?;
    validate(&formula).map_err(ParseError::Validation)
}

/// Parse without the validation pass — the raw surface syntax.
pub fn parse_unvalidated(text: &str) -> Result<Formula, SyntaxError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let formula = p.formula()?;
    p.expect_eof()?;
    Ok(formula)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == kind {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, SyntaxError> {
        if self.peek_kind() == &kind {
            Ok(self.next())
        } else {
            Err(self.unexpected(&format!("expected {}", kind.describe())))
        }
    }

    fn expect_eof(&mut self) -> Result<(), SyntaxError> {
        if matches!(self.peek_kind(), TokenKind::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("expected end of input"))
        }
    }

    fn unexpected(&self, expectation: &str) -> SyntaxError {
        let t = self.peek();
        SyntaxError {
            message: format!("{expectation}, found {}", t.kind.describe()),
            span: t.span,
        }
    }

    // formula := disj ; disj := conj { "|" conj }
    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let mut out = self.conj()?;
        while self.eat(&TokenKind::Pipe) {
            let rhs = self.conj()?;
            out = Formula::or(out, rhs);
        }
        Ok(out)
    }

    // conj := unary { "&" unary }
    fn conj(&mut self) -> Result<Formula, SyntaxError> {
        let mut out = self.unary()?;
        while self.eat(&TokenKind::Amp) {
            let rhs = self.unary()?;
            out = Formula::and(out, rhs);
        }
        Ok(out)
    }

    // unary := "!" unary | "(" formula ")" | atom
    //
    // The three "(" alternatives (derivative atom, function comparison,
    // parenthesized formula) and the term-initial "(" of a numerical
    // relation are disambiguated by backtracking: function-atom patterns
    // are committed to only when their closing ")" is followed by "[".
    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat(&TokenKind::Bang) {
            let inner = self.unary()?;
            return Ok(Formula::not(inner));
        }
        if let TokenKind::Shape(kind) = *self.peek_kind() {
            return self.shape_atom(kind);
        }
        if matches!(self.peek_kind(), TokenKind::LParen) {
            let save = self.pos;
            match self.der_atom() {
                Ok(f) => return Ok(f),
                Err(_) => self.pos = save,
            }
            match self.cmp_atom() {
                Ok(f) => return Ok(f),
                Err(_) => self.pos = save,
            }
            match self.paren_formula() {
                Ok(f) => return Ok(f),
                Err(_) => self.pos = save,
            }
        }
        self.numrel()
    }

    fn paren_formula(&mut self) -> Result<Formula, SyntaxError> {
        self.expect(TokenKind::LParen)?;
        let inner = self.formula()?;
        self.expect(TokenKind::RParen)?;
        Ok(inner)
    }

    // shapekw "(" fid ")" interval
    fn shape_atom(&mut self, kind: ShapeKind) -> Result<Formula, SyntaxError> {
        self.next(); // the keyword
        self.expect(TokenKind::LParen)?;
        let f = self.fid()?;
        self.expect(TokenKind::RParen)?;
        let (lo, hi) = self.interval()?;
        Ok(Formula::atom(Atom::Shape { kind, f, lo, hi }))
    }

    // "(" "D" "[" fid "]" rel term ")" interval
    fn der_atom(&mut self) -> Result<Formula, SyntaxError> {
        self.expect(TokenKind::LParen)?;
        let f = self.deriv_head()?;
        let rel = self.next();
        let (der_rel, negated) = match rel.kind {
            TokenKind::Eq => (DerRel::Eq, false),
            TokenKind::Neq => (DerRel::Eq, true),
            TokenKind::Gt => (DerRel::Gt, false),
            TokenKind::Ge => (DerRel::Ge, false),
            TokenKind::Lt => (DerRel::Lt, false),
            TokenKind::Le => (DerRel::Le, false),
            _ => {
                return Err(SyntaxError {
                    message: format!("expected a comparison, found {}", rel.kind.describe()),
                    span: rel.span,
                })
            }
        };
        let bound = self.term()?;
        self.expect(TokenKind::RParen)?;
        let (lo, hi) = self.interval()?;
        let atom = Formula::atom(Atom::DerRel { f, rel: der_rel, bound, lo, hi });
        Ok(if negated { Formula::not(atom) } else { atom })
    }

    // "(" fid ("=" | "!=" | ">") fid ")" interval
    fn cmp_atom(&mut self) -> Result<Formula, SyntaxError> {
        self.expect(TokenKind::LParen)?;
        let f = self.fid()?;
        let rel = self.next();
        let g = self.fid()?;
        self.expect(TokenKind::RParen)?;
        let (lo, hi) = self.interval()?;
        match rel.kind {
            TokenKind::Eq => Ok(Formula::atom(Atom::FunEq { f, g, lo, hi })),
            TokenKind::Neq => Ok(Formula::not(Formula::atom(Atom::FunEq { f, g, lo, hi }))),
            TokenKind::Gt => Ok(Formula::atom(Atom::FunGt { f, g, lo, hi })),
            other => Err(SyntaxError {
                message: format!(
                    "function variables compare with `=`, `!=`, or `>`, found {}",
                    other.describe()
                ),
                span: rel.span,
            }),
        }
    }

    // numrel := term rel term, with the sugar lowering:
    //   a != b  →  !(a = b)        a >= b  →  !(b > a)
    //   a <  b  →  b > a           a <= b  →  !(a > b)
    fn numrel(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.term()?;
        let rel = self.next();
        let rhs = self.term()?;
        let atom = |rel, lhs, rhs| Formula::atom(Atom::NumRel { rel, lhs, rhs });
        Ok(match rel.kind {
            TokenKind::Eq => atom(NumRel::Eq, lhs, rhs),
            TokenKind::Neq => Formula::not(atom(NumRel::Eq, lhs, rhs)),
            TokenKind::Gt => atom(NumRel::Gt, lhs, rhs),
            TokenKind::Ge => Formula::not(atom(NumRel::Gt, rhs, lhs)),
            TokenKind::Lt => atom(NumRel::Gt, rhs, lhs),
            TokenKind::Le => Formula::not(atom(NumRel::Gt, lhs, rhs)),
            other => {
                return Err(SyntaxError {
                    message: format!("expected a comparison, found {}", other.describe()),
                    span: rel.span,
                })
            }
        })
    }

    // interval := "[" endpoint "," endpoint "]"
    fn interval(&mut self) -> Result<(ExtEndpoint, ExtEndpoint), SyntaxError> {
        self.expect(TokenKind::LBracket)?;
        let lo = self.endpoint()?;
        self.expect(TokenKind::Comma)?;
        let hi = self.endpoint()?;
        self.expect(TokenKind::RBracket)?;
        Ok((lo, hi))
    }

    // endpoint := term | "-inf" | "+inf"
    fn endpoint(&mut self) -> Result<ExtEndpoint, SyntaxError> {
        match self.peek_kind() {
            TokenKind::Minus if self.tokens[self.pos + 1].kind == TokenKind::Inf => {
                self.next();
                self.next();
                Ok(ExtEndpoint::NegInfinity)
            }
            TokenKind::Plus if self.tokens[self.pos + 1].kind == TokenKind::Inf => {
                self.next();
                self.next();
                Ok(ExtEndpoint::PosInfinity)
            }
            TokenKind::Inf => Err(self.unexpected("`inf` needs a sign: `-inf` or `+inf`")),
            _ => Ok(ExtEndpoint::Term(self.term()?)),
        }
    }

    // fid := identifier | "@0" | "@1"
    fn fid(&mut self) -> Result<FuncVar, SyntaxError> {
        match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                self.next();
                Ok(FuncVar::Named(name))
            }
            TokenKind::BoldZero => {
                self.next();
                Ok(FuncVar::Zero)
            }
            TokenKind::BoldOne => {
                self.next();
                Ok(FuncVar::One)
            }
            _ => Err(self.unexpected("expected a function variable")),
        }
    }

    // "D" "[" fid "]" — the common head of derivative applications.
    fn deriv_head(&mut self) -> Result<FuncVar, SyntaxError> {
        match self.peek_kind() {
            TokenKind::Ident(name) if name == "D" => {}
            _ => return Err(self.unexpected("expected `D[`")),
        }
        if self.tokens[self.pos + 1].kind != TokenKind::LBracket {
            return Err(self.unexpected("expected `D[`"));
        }
        self.next(); // D
        self.next(); // [
        let f = self.fid()?;
        self.expect(TokenKind::RBracket)?;
        Ok(f)
    }

    // term := additive chain over mult chains over factors.
    fn term(&mut self) -> Result<NumTerm, SyntaxError> {
        let mut out = self.mult()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.next();
            let rhs = self.mult()?;
            out = fold_binary(op, out, rhs);
        }
        Ok(out)
    }

    fn mult(&mut self) -> Result<NumTerm, SyntaxError> {
        let mut out = self.factor()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            self.next();
            let rhs = self.factor()?;
            out = fold_binary(op, out, rhs);
        }
        Ok(out)
    }

    // factor := "-" factor | primary
    fn factor(&mut self) -> Result<NumTerm, SyntaxError> {
        if self.eat(&TokenKind::Minus) {
            let inner = self.factor()?;
            return Ok(match inner {
                NumTerm::Const(c) => NumTerm::Const(-c),
                other => fold_binary(BinOp::Sub, NumTerm::int(0), other),
            });
        }
        self.primary()
    }

    // primary := numeral | "(" term ")" | fid "(" term ")" | D-application
    //          | identifier
    fn primary(&mut self) -> Result<NumTerm, SyntaxError> {
        match self.peek_kind().clone() {
            TokenKind::Numeral(value) => {
                self.next();
                Ok(NumTerm::Const(value))
            }
            TokenKind::LParen => {
                self.next();
                let inner = self.term()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::BoldZero | TokenKind::BoldOne => {
                let f = self.fid()?;
                self.application(f)
            }
            TokenKind::Ident(name) => {
                if name == "D" && self.tokens[self.pos + 1].kind == TokenKind::LBracket {
                    let f = self.deriv_head()?;
                    self.expect(TokenKind::LParen)?;
                    let arg = self.term()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(NumTerm::deriv(f, arg));
                }
                self.next();
                if matches!(self.peek_kind(), TokenKind::LParen) {
                    self.application(FuncVar::Named(name))
                } else {
                    Ok(NumTerm::Var(name))
                }
            }
            _ => Err(self.unexpected("expected a term")),
        }
    }

    fn application(&mut self, f: FuncVar) -> Result<NumTerm, SyntaxError> {
        self.expect(TokenKind::LParen)?;
        let arg = self.term()?;
        self.expect(TokenKind::RParen)?;
        Ok(NumTerm::apply(f, arg))
    }
}

/// Build a binary term, folding constant operands: `+`, `-`, `*` always,
/// `/` only when the divisor is a nonzero constant (division by a zero
/// constant keeps its syntactic form and is settled by the semantics).
pub(crate) fn fold_binary(op: BinOp, lhs: NumTerm, rhs: NumTerm) -> NumTerm {
    if let (NumTerm::Const(a), NumTerm::Const(b)) = (&lhs, &rhs) {
        let folded: Option<Rational> = match op {
            BinOp::Add => Some(a + b),
            BinOp::Sub => Some(a - b),
            BinOp::Mul => Some(a * b),
            BinOp::Div if !b.is_zero() => Some(a / b),
            BinOp::Div => None,
        };
        if let Some(value) = folded {
            return NumTerm::Const(value);
        }
    }
    NumTerm::Binary(op, Box::new(lhs), Box::new(rhs))
}
