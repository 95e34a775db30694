//! Concrete text syntax: lexer, parser, and canonical printer.
//!
//! The grammar (whitespace-insensitive, `#` starts a line comment):
//!
//! ```text
//! formula  := disj ;  disj := conj { "|" conj } ;  conj := unary { "&" unary } ;
//! unary    := "!" unary | "(" formula ")" | atom ;
//! atom     := funatom | numrel ;
//! numrel   := term ("=" | "!=" | ">" | ">=" | "<" | "<=") term ;
//! funatom  := "(" fid ("=" | "!=" | ">") fid ")" interval
//!           | "(" "D" "[" fid "]" ("=" | "!=" | ">" | ">=" | "<" | "<=") term ")" interval
//!           | shapekw "(" fid ")" interval ;
//! shapekw  := "Up" | "StrictUp" | "Down" | "StrictDown"
//!           | "Convex" | "StrictConvex" | "Concave" | "StrictConcave" ;
//! interval := "[" endpoint "," endpoint "]" ;
//! endpoint := term | "-inf" | "+inf" ;
//! term     := usual precedence over + - * / with parentheses, identifiers,
//!             numerals, fid "(" term ")", and "D" "[" fid "]" "(" term ")" ;
//! fid      := identifier | "@0" | "@1" ;
//! ```
//!
//! Comparison sugar lowers to the primitive atoms at parse time:
//! `a != b` to `!(a = b)`, `a >= b` to `!(b > a)`, `a < b` to `b > a`,
//! `a <= b` to `!(a > b)`, and likewise for the negated function-atom
//! forms. Numerals (including decimals) become exact rationals, and
//! constant arithmetic folds during parsing, so `1/2` is a single constant.
//!
//! [`print`] emits a canonical form that parses back to a structurally
//! identical formula; printing a parsed formula is idempotent on text.

mod lexer;
mod printer;
mod syntax;

pub use lexer::SourceSpan;
pub use printer::{print, print_term};
pub use syntax::{parse, parse_unvalidated, ParseError, SyntaxError};
