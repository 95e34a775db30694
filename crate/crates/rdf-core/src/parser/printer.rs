//! Canonical text form.
//!
//! `parse(print(φ))` is structurally identical to `φ` for every formula the
//! system produces (parsing performs constant folding, so a hand-built term
//! like `1 + 1` would re-fold; the pipeline never builds such terms), and
//! `print(parse(s))` is a fixed point of printing for every input `s`.

use crate::formula::{Atom, BinOp, DerRel, ExtEndpoint, Formula, NumRel, NumTerm};
use num_traits::One;

/// Precedence levels used to decide parenthesization of terms.
#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Prec {
    Additive = 0,
    Multiplicative = 1,
    Factor = 2,
    Primary = 3,
}

fn term_prec(term: &NumTerm) -> Prec {
    match term {
        NumTerm::Binary(BinOp::Add | BinOp::Sub, ..) => Prec::Additive,
        NumTerm::Binary(BinOp::Mul | BinOp::Div, ..) => Prec::Multiplicative,
        NumTerm::Const(c) => {
            if !c.denom().is_one() {
                // `p/q` reads as a division, so it parenthesizes like one.
                Prec::Multiplicative
            } else if c < &crate::rational::rat(0) {
                // `-n` reads as a unary minus.
                Prec::Factor
            } else {
                Prec::Primary
            }
        }
        NumTerm::Var(_) | NumTerm::Apply(..) | NumTerm::Deriv(..) => Prec::Primary,
    }
}

fn write_term(out: &mut String, term: &NumTerm, min_prec: Prec) {
    let prec = term_prec(term);
    let needs_parens = (prec as i32) < (min_prec as i32);
    if needs_parens {
        out.push('(');
    }
    match term {
        NumTerm::Var(v) => out.push_str(v),
        NumTerm::Const(c) => out.push_str(&crate::rational::display(c)),
        NumTerm::Binary(op, a, b) => {
            let (left_min, right_min) = match op {
                BinOp::Add | BinOp::Sub => (Prec::Additive, Prec::Multiplicative),
                BinOp::Mul | BinOp::Div => (Prec::Multiplicative, Prec::Factor),
            };
            write_term(out, a, left_min);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_term(out, b, right_min);
        }
        NumTerm::Apply(f, arg) => {
            out.push_str(f.name());
            out.push('(');
            write_term(out, arg, Prec::Additive);
            out.push(')');
        }
        NumTerm::Deriv(f, arg) => {
            out.push_str("D[");
            out.push_str(f.name());
            out.push_str("](");
            write_term(out, arg, Prec::Additive);
            out.push(')');
        }
    }
    if needs_parens {
        out.push(')');
    }
}

/// Canonical form of a term.
pub fn print_term(term: &NumTerm) -> String {
    let mut out = String::new();
    write_term(&mut out, term, Prec::Additive);
    out
}

fn write_endpoint(out: &mut String, ep: &ExtEndpoint) {
    match ep {
        ExtEndpoint::Term(t) => write_term(out, t, Prec::Additive),
        ExtEndpoint::NegInfinity => out.push_str("-inf"),
        ExtEndpoint::PosInfinity => out.push_str("+inf"),
    }
}

fn write_interval(out: &mut String, lo: &ExtEndpoint, hi: &ExtEndpoint) {
    out.push('[');
    write_endpoint(out, lo);
    out.push_str(", ");
    write_endpoint(out, hi);
    out.push(']');
}

fn write_atom(out: &mut String, atom: &Atom, negated: bool) {
    match atom {
        Atom::NumRel { rel, lhs, rhs } => {
            write_term(out, lhs, Prec::Additive);
            let sym = match (rel, negated) {
                (NumRel::Eq, false) => "=",
                (NumRel::Eq, true) => "!=",
                (NumRel::Gt, false) => ">",
                (NumRel::Gt, true) => "<=",
            };
            out.push(' ');
            out.push_str(sym);
            out.push(' ');
            write_term(out, rhs, Prec::Additive);
        }
        Atom::FunEq { f, g, lo, hi } => {
            out.push('(');
            out.push_str(f.name());
            out.push_str(if negated { " != " } else { " = " });
            out.push_str(g.name());
            out.push(')');
            write_interval(out, lo, hi);
        }
        Atom::FunGt { f, g, lo, hi } => {
            // No textual sugar for a negated strict comparison.
            debug_assert!(!negated);
            out.push('(');
            out.push_str(f.name());
            out.push_str(" > ");
            out.push_str(g.name());
            out.push(')');
            write_interval(out, lo, hi);
        }
        Atom::DerRel { f, rel, bound, lo, hi } => {
            debug_assert!(!(negated && *rel != DerRel::Eq));
            out.push_str("(D[");
            out.push_str(f.name());
            out.push_str("] ");
            out.push_str(if negated { "!=" } else { rel.symbol() });
            out.push(' ');
            write_term(out, bound, Prec::Additive);
            out.push(')');
            write_interval(out, lo, hi);
        }
        Atom::Shape { kind, f, lo, hi } => {
            debug_assert!(!negated);
            out.push_str(kind.keyword());
            out.push('(');
            out.push_str(f.name());
            out.push(')');
            write_interval(out, lo, hi);
        }
    }
}

/// Connective levels: `|` is loosest, then `&`, then `!`/atoms.
#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum FPrec {
    Disj = 0,
    Conj = 1,
    Unary = 2,
}

fn formula_prec(f: &Formula) -> FPrec {
    match f {
        Formula::Or(..) => FPrec::Disj,
        Formula::And(..) => FPrec::Conj,
        Formula::Not(..) | Formula::Atom(_) => FPrec::Unary,
    }
}

/// Negated atoms with textual sugar: `!=` forms replace `!(… = …)`, and a
/// negated `>` between terms prints as `<=`.
fn negation_sugar(atom: &Atom) -> bool {
    matches!(
        atom,
        Atom::NumRel { .. } | Atom::FunEq { .. } | Atom::DerRel { rel: DerRel::Eq, .. }
    )
}

fn write_formula(out: &mut String, formula: &Formula, min_prec: FPrec) {
    let prec = formula_prec(formula);
    let needs_parens = (prec as i32) < (min_prec as i32);
    if needs_parens {
        out.push('(');
    }
    match formula {
        Formula::Atom(atom) => write_atom(out, atom, false),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(atom) if negation_sugar(atom) => write_atom(out, atom, true),
            other => {
                out.push('!');
                // `!` binds a whole unary, so only connectives need parens.
                write_formula(out, other, FPrec::Unary);
            }
        },
        Formula::And(a, b) => {
            write_formula(out, a, FPrec::Conj);
            out.push_str(" & ");
            write_formula(out, b, FPrec::Unary);
        }
        Formula::Or(a, b) => {
            write_formula(out, a, FPrec::Disj);
            out.push_str(" | ");
            write_formula(out, b, FPrec::Conj);
        }
    }
    if needs_parens {
        out.push(')');
    }
}

/// Canonical text of a formula; [`crate::parser::parse`] inverts it.
pub fn print(formula: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, formula, FPrec::Disj);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn round_trip(text: &str) -> String {
        print(&parse(text).unwrap())
    }

    #[test]
    fn canonical_spacing() {
        assert_eq!(round_trip("x>0"), "x > 0");
        assert_eq!(round_trip("(D[f]>=1)[a,b]"), "(D[f] >= 1)[a, b]");
    }

    #[test]
    fn sugar_survives_the_round_trip() {
        assert_eq!(round_trip("x != y"), "x != y");
        assert_eq!(round_trip("x <= y"), "x <= y");
        // `>=` and `<` have no primitive, so they canonicalize.
        assert_eq!(round_trip("x >= y"), "y <= x");
        assert_eq!(round_trip("x < y"), "y > x");
        assert_eq!(round_trip("(f != g)[a, b]"), "(f != g)[a, b]");
        assert_eq!(round_trip("(D[f] != 0)[a, b]"), "(D[f] != 0)[a, b]");
        assert_eq!(round_trip("!Convex(f)[a, b]"), "!Convex(f)[a, b]");
    }

    #[test]
    fn connective_parenthesization() {
        assert_eq!(round_trip("a>0 & (b>0 | c>0)"), "a > 0 & (b > 0 | c > 0)");
        assert_eq!(round_trip("a>0 & b>0 | c>0"), "a > 0 & b > 0 | c > 0");
        assert_eq!(round_trip("!(a>0 & b>0)"), "!(a > 0 & b > 0)");
        // Right-nested connectives keep their grouping.
        assert_eq!(round_trip("a>0 | (b>0 | c>0)"), "a > 0 | (b > 0 | c > 0)");
        assert_eq!(round_trip("a>0 & (b>0 & c>0)"), "a > 0 & (b > 0 & c > 0)");
    }

    #[test]
    fn term_parenthesization() {
        assert_eq!(round_trip("(x+1)*2 = y"), "(x + 1) * 2 = y");
        assert_eq!(round_trip("x - (y - z) = 0"), "x - (y - z) = 0");
        assert_eq!(round_trip("x / (y / z) = 0"), "x / (y / z) = 0");
        assert_eq!(round_trip("x - y - z = 0"), "x - y - z = 0");
        // Rational constants parenthesize like divisions where needed.
        assert_eq!(round_trip("x * (1/2) = y"), "x * (1/2) = y");
        assert_eq!(round_trip("1/2 * x = y"), "1/2 * x = y");
        assert_eq!(round_trip("x = -3"), "x = -3");
        assert_eq!(round_trip("x = -1/2"), "x = -1/2");
        assert_eq!(round_trip("x * -3 = y"), "x * -3 = y");
    }

    #[test]
    fn function_syntax() {
        assert_eq!(round_trip("f(a) = f(b)"), "f(a) = f(b)");
        assert_eq!(round_trip("D[f](a+1) > 0"), "D[f](a + 1) > 0");
        assert_eq!(round_trip("Up(f)[-inf, b]"), "Up(f)[-inf, b]");
        assert_eq!(round_trip("(f = g)[0, +inf]"), "(f = g)[0, +inf]");
        assert_eq!(round_trip("(f > g)[a - 1, b + 1]"), "(f > g)[a - 1, b + 1]");
    }

    #[test]
    fn printing_a_parse_is_idempotent() {
        let samples = [
            "a < b & f(a) = f(b) & D[f](a) != 0 & D[f](b) != 0 \
             & ((D[f] > 0)[a,b] | (D[f] < 0)[a,b])",
            "(D[f] = t)[a,b] & (!Convex(f)[a,b] | !Concave(f)[a,b])",
            "x + y * 2 >= 3 | !(x = y) & StrictDown(g)[x, x + 1]",
        ];
        for text in samples {
            let once = round_trip(text);
            let twice = print(&parse(&once).unwrap());
            assert_eq!(once, twice, "not a fixed point for {text:?}");
        }
    }

    #[test]
    fn parse_print_identity_on_parsed_asts() {
        let samples = [
            "x != 0 & (D[g] <= x * (1/2))[x, x + 1]",
            "!(Up(f)[-inf, +inf] | (f != g)[0, 1])",
            "0 - x = y & x * -5 > z / (1/4)",
        ];
        for text in samples {
            let ast = parse(text).unwrap();
            let reparsed = parse(&print(&ast)).unwrap();
            assert_eq!(ast, reparsed, "parse∘print ≠ id for {text:?}");
        }
    }
}
