//! Tokenizer with source positions.

use crate::formula::ShapeKind;
use crate::rational::Rational;

/// A half-open byte range in the input, with the 1-based line and column of
/// its start. Attached to tokens and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Numeral(Rational),
    Shape(ShapeKind),
    Inf,
    BoldZero,
    BoldOne,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Amp,
    Pipe,
    Bang,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Neq,
    Gt,
    Ge,
    Lt,
    Le,
    Eof,
}

impl TokenKind {
    /// How the token reads in diagnostics.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::Numeral(_) => "numeral".to_string(),
            TokenKind::Shape(kind) => format!("`{}`", kind.keyword()),
            TokenKind::Inf => "`inf`".to_string(),
            TokenKind::BoldZero => "`@0`".to_string(),
            TokenKind::BoldOne => "`@1`".to_string(),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::LBracket => "`[`".to_string(),
            TokenKind::RBracket => "`]`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Amp => "`&`".to_string(),
            TokenKind::Pipe => "`|`".to_string(),
            TokenKind::Bang => "`!`".to_string(),
            TokenKind::Plus => "`+`".to_string(),
            TokenKind::Minus => "`-`".to_string(),
            TokenKind::Star => "`*`".to_string(),
            TokenKind::Slash => "`/`".to_string(),
            TokenKind::Eq => "`=`".to_string(),
            TokenKind::Neq => "`!=`".to_string(),
            TokenKind::Gt => "`>`".to_string(),
            TokenKind::Ge => "`>=`".to_string(),
            TokenKind::Lt => "`<`".to_string(),
            TokenKind::Le => "`<=`".to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

fn shape_keyword(word: &str) -> Option<ShapeKind> {
    ShapeKind::ALL.into_iter().find(|k| k.keyword() == word)
}

pub fn lex(text: &str) -> Result<Vec<Token>, super::SyntaxError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if bytes[*i] == b'\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < bytes.len() {
        let b = bytes[i];
        let start = (i, line, col);
        let span1 = SourceSpan { begin: i, end: i + 1, line, column: col };
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => advance(&mut i, &mut line, &mut col),
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    advance(&mut i, &mut line, &mut col);
                }
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    advance(&mut i, &mut line, &mut col);
                }
                let word = &text[start.0..i];
                let span = SourceSpan { begin: start.0, end: i, line: start.1, column: start.2 };
                let kind = if word == "inf" {
                    TokenKind::Inf
                } else if let Some(shape) = shape_keyword(word) {
                    TokenKind::Shape(shape)
                } else {
                    TokenKind::Ident(word.to_string())
                };
                tokens.push(Token { kind, span });
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col);
                }
                if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col); // '.'
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        advance(&mut i, &mut line, &mut col);
                    }
                }
                let word = &text[start.0..i];
                let span = SourceSpan { begin: start.0, end: i, line: start.1, column: start.2 };
                let value = crate::rational::parse_numeral(word).ok_or(super::SyntaxError {
                    message: format!("malformed numeral `{word}`"),
                    span,
                })?;
                tokens.push(Token { kind: TokenKind::Numeral(value), span });
            }
            b'@' => {
                let which = bytes.get(i + 1).copied();
                let span = SourceSpan { begin: i, end: i + 2, line, column: col };
                let kind = match which {
                    Some(b'0') => TokenKind::BoldZero,
                    Some(b'1') => TokenKind::BoldOne,
                    _ => {
                        return Err(super::SyntaxError {
                            message: "expected `@0` or `@1`".to_string(),
                            span: span1,
                        })
                    }
                };
                advance(&mut i, &mut line, &mut col);
                advance(&mut i, &mut line, &mut col);
                tokens.push(Token { kind, span });
            }
            b'!' | b'>' | b'<' => {
                let two = bytes.get(i + 1) == Some(&b'=');
                let span = SourceSpan {
                    begin: i,
                    end: i + if two { 2 } else { 1 },
                    line,
                    column: col,
                };
                let kind = match (b, two) {
                    (b'!', true) => TokenKind::Neq,
                    (b'!', false) => TokenKind::Bang,
                    (b'>', true) => TokenKind::Ge,
                    (b'>', false) => TokenKind::Gt,
                    (b'<', true) => TokenKind::Le,
                    (b'<', false) => TokenKind::Lt,
                    _ => unreachable!(),
                };
                advance(&mut i, &mut line, &mut col);
                if two {
                    advance(&mut i, &mut line, &mut col);
                }
                tokens.push(Token { kind, span });
            }
            _ => {
                let kind = match b {
                    b'(' => TokenKind::LParen,
                    b')' => TokenKind::RParen,
                    b'[' => TokenKind::LBracket,
                    b']' => TokenKind::RBracket,
                    b',' => TokenKind::Comma,
                    b'&' => TokenKind::Amp,
                    b'|' => TokenKind::Pipe,
                    b'+' => TokenKind::Plus,
                    b'-' => TokenKind::Minus,
                    b'*' => TokenKind::Star,
                    b'/' => TokenKind::Slash,
                    b'=' => TokenKind::Eq,
                    other => {
                        return Err(super::SyntaxError {
                            message: format!("unexpected character `{}`", other as char),
                            span: span1,
                        })
                    }
                };
                advance(&mut i, &mut line, &mut col);
                tokens.push(Token { kind, span: span1 });
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan { begin: bytes.len(), end: bytes.len(), line, column: col },
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn kinds(text: &str) -> Vec<TokenKind> {
        lex(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn lexes_operators_and_words() {
        assert_eq!(
            kinds("a >= 1 & !x"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Ge,
                TokenKind::Numeral(rat(1)),
                TokenKind::Amp,
                TokenKind::Bang,
                TokenKind::Ident("x".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn decimals_become_exact_rationals() {
        assert_eq!(kinds("0.5"), vec![TokenKind::Numeral(ratio(1, 2)), TokenKind::Eof]);
        assert_eq!(kinds("12.25"), vec![TokenKind::Numeral(ratio(49, 4)), TokenKind::Eof]);
    }

    #[test]
    fn reserved_words_and_bold_constants() {
        assert_eq!(
            kinds("Up inf @0 @1 Uppity infx"),
            vec![
                TokenKind::Shape(crate::formula::ShapeKind::Up),
                TokenKind::Inf,
                TokenKind::BoldZero,
                TokenKind::BoldOne,
                TokenKind::Ident("Uppity".into()),
                TokenKind::Ident("infx".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(
            kinds("x # trailing words > ! [\n= 1"),
            vec![
                TokenKind::Ident("x".into()),
                TokenKind::Eq,
                TokenKind::Numeral(rat(1)),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let tokens = lex("x\n  y").unwrap();
        assert_eq!(tokens[0].span, SourceSpan { begin: 0, end: 1, line: 1, column: 1 });
        assert_eq!(tokens[1].span, SourceSpan { begin: 4, end: 5, line: 2, column: 3 });
    }

    #[test]
    fn bad_character_is_reported_with_span() {
        let err = lex("x = $").unwrap_err();
        assert_eq!(err.span.begin, 4);
        assert!(err.message.contains('$'));
    }
}
