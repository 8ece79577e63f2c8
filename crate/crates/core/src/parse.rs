//! Text grammar for classical and operator expressions.
//!
//! Classical atoms: `l`, `sin`, `cos`, `sin[k]`, `cos[k]`, `E[m]`, scalars,
//! and the forms `PB(f,g)`, `Lad[k](f)`, `conj(f)`.
//! Operator atoms: `D`, `E[m]`, `Xi`, `I`, scalars, and the forms
//! `Comm(A,B)`, `Adj(A)`, `Q{scheme}(f)`.
//! Both share `+ - * ^`, parentheses, and `/` by a nonzero constant.
//! Scalars are integers, `i`, and parameter names including `xi[n]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::classical::{ClassicalElement, Mono};
use crate::operator::{OpExpr, OperatorElement};
use crate::quant::{Bindings, QuantError, QuantScheme, SchemeKind};
use crate::scalar::{GaussRat, Param, Scalar, XI_INDEX_BOUND};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown name `{name}` at offset {offset}")]
    UnknownName { offset: usize, name: String },
    #[error("xi index {index} at offset {offset} exceeds the bound {XI_INDEX_BOUND}")]
    XiIndex { offset: usize, index: i64 },
    #[error("division by a non-constant or zero at offset {offset}")]
    Division { offset: usize },
    #[error("at offset {offset}: {source}")]
    Quant { offset: usize, source: QuantError },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_ascii_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let n: BigInt = text[start..pos].parse().expect("digits");
            out.push(Token { tok: Tok::Num(n), offset: start });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..pos].to_string()),
                offset: start,
            });
        } else if "+-*/^()[]{},".contains(c) {
            out.push(Token { tok: Tok::Sym(c), offset: pos });
            pos += 1;
        } else {
            return Err(ParseError::Syntax {
                offset: pos,
                expected: "an expression character".into(),
            });
        }
    }
    out.push(Token { tok: Tok::End, offset: text.len() });
    Ok(out)
}

/// Named schemes available to `Q{name}(...)`.
#[derive(Clone, Debug)]
pub struct SchemeContext {
    schemes: Vec<QuantScheme>,
}

impl Default for SchemeContext {
    /// The three base kinds with every parameter formal (and `lambda = 1`).
    fn default() -> Self {
        SchemeContext {
            schemes: [SchemeKind::TypeI, SchemeKind::TypeII, SchemeKind::PosRep]
                .into_iter()
                .map(|k| QuantScheme::build(k, Bindings::new()))
                .collect(),
        }
    }
}

impl SchemeContext {
    pub fn empty() -> Self {
        SchemeContext { schemes: Vec::new() }
    }

    /// Adds or replaces a scheme under its own name.
    pub fn insert(&mut self, scheme: QuantScheme) {
        self.schemes.retain(|s| s.name() != scheme.name());
        self.schemes.push(scheme);
    }

    pub fn get(&self, name: &str) -> Option<&QuantScheme> {
        self.schemes.iter().find(|s| s.name() == name)
    }
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
    schemes: &'a SchemeContext,
}

/// Common algebra for the two expression kinds.
trait Value: Sized + Clone {
    fn v_scalar(s: Scalar) -> Self;
    fn v_add(self, rhs: Self) -> Self;
    fn v_sub(self, rhs: Self) -> Self;
    fn v_mul(self, rhs: Self) -> Self;
    fn v_neg(self) -> Self;
    fn v_pow(self, exp: u32) -> Self;
    fn v_scale(self, s: Scalar) -> Self;
    /// The value as a constant, if it is one.
    fn v_constant(&self) -> Option<GaussRat>;
}

impl Value for ClassicalElement {
    fn v_scalar(s: Scalar) -> Self {
        ClassicalElement::constant(s)
    }
    fn v_add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn v_sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn v_mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn v_neg(self) -> Self {
        -self
    }
    fn v_pow(self, exp: u32) -> Self {
        ClassicalElement::pow(&self, exp)
    }
    fn v_scale(self, s: Scalar) -> Self {
        ClassicalElement::scale(&self, &s)
    }
    fn v_constant(&self) -> Option<GaussRat> {
        match self.num_terms() {
            0 => Some(GaussRat::zero()),
            1 => self.coeff(Mono { r: 0, m: 0 }).as_constant().filter(|c| !c.is_zero()),
            _ => None,
        }
    }
}

impl Value for OpExpr {
    fn v_scalar(s: Scalar) -> Self {
        OpExpr::Leaf(OperatorElement::scalar(s))
    }
    fn v_add(self, rhs: Self) -> Self {
        match self {
            OpExpr::Sum(mut items) => {
                items.push(rhs);
                OpExpr::Sum(items)
            }
            lhs => OpExpr::Sum(vec![lhs, rhs]),
        }
    }
    fn v_sub(self, rhs: Self) -> Self {
        self.v_add(rhs.v_neg())
    }
    fn v_mul(self, rhs: Self) -> Self {
        match self {
            OpExpr::Product(mut items) => {
                items.push(rhs);
                OpExpr::Product(items)
            }
            lhs => OpExpr::Product(vec![lhs, rhs]),
        }
    }
    fn v_neg(self) -> Self {
        self.v_scale(-Scalar::one())
    }
    fn v_pow(self, exp: u32) -> Self {
        OpExpr::Product(vec![self; exp as usize])
    }
    fn v_scale(self, s: Scalar) -> Self {
        OpExpr::scaled(s, self)
    }
    fn v_constant(&self) -> Option<GaussRat> {
        let op = self.normal_form().ok()?;
        match op.num_terms() {
            0 => Some(GaussRat::zero()),
            1 => op
                .terms()
                .next()
                .filter(|(w, _)| **w == crate::operator::Word::IDENTITY)
                .and_then(|(_, c)| c.as_constant()),
            _ => None,
        }
    }
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, schemes: &'a SchemeContext) -> Result<Self, ParseError> {
        Ok(Parser {
            text,
            toks: lex(text)?,
            pos: 0,
            schemes,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.peek().offset,
            expected: expected.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.at_sym(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::End {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let negative = if self.at_sym('-') {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        match t.tok {
            Tok::Num(n) => {
                let v: i64 = n.try_into().map_err(|_| ParseError::Syntax {
                    offset: t.offset,
                    expected: "a machine-size integer".into(),
                })?;
                Ok(if negative { -v } else { v })
            }
            _ => Err(ParseError::Syntax {
                offset: t.offset,
                expected: "an integer".into(),
            }),
        }
    }

    fn bracketed_int(&mut self) -> Result<i64, ParseError> {
        self.expect('[')?;
        let n = self.integer()?;
        self.expect(']')?;
        Ok(n)
    }

    fn expr<V: Value>(&mut self, atom: &mut dyn FnMut(&mut Self) -> Result<V, ParseError>) -> Result<V, ParseError> {
        let mut acc = self.term(atom)?;
        loop {
            if self.at_sym('+') {
                self.next();
                acc = acc.v_add(self.term(atom)?);
            } else if self.at_sym('-') {
                self.next();
                acc = acc.v_sub(self.term(atom)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<V: Value>(&mut self, atom: &mut dyn FnMut(&mut Self) -> Result<V, ParseError>) -> Result<V, ParseError> {
        let mut acc = self.unary(atom)?;
        loop {
            if self.at_sym('*') {
                self.next();
                acc = acc.v_mul(self.unary(atom)?);
            } else if self.at_sym('/') {
                self.next();
                let offset = self.peek().offset;
                let d = self.unary(atom)?;
                let inv = d.v_constant().and_then(|c| c.inv()).ok_or(ParseError::Division { offset })?;
                acc = acc.v_scale(Scalar::constant(inv));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary<V: Value>(&mut self, atom: &mut dyn FnMut(&mut Self) -> Result<V, ParseError>) -> Result<V, ParseError> {
        if self.at_sym('-') {
            self.next();
            return Ok(self.unary(atom)?.v_neg());
        }
        let base = self.primary(atom)?;
        if self.at_sym('^') {
            self.next();
            let t = self.next();
            let Tok::Num(n) = t.tok else {
                return Err(ParseError::Syntax {
                    offset: t.offset,
                    expected: "a nonnegative exponent".into(),
                });
            };
            let exp: u32 = n.try_into().map_err(|_| ParseError::Syntax {
                offset: t.offset,
                expected: "a small exponent".into(),
            })?;
            return Ok(base.v_pow(exp));
        }
        Ok(base)
    }

    fn primary<V: Value>(&mut self, atom: &mut dyn FnMut(&mut Self) -> Result<V, ParseError>) -> Result<V, ParseError> {
        if self.at_sym('(') {
            self.next();
            let v = self.expr(atom)?;
            self.expect(')')?;
            return Ok(v);
        }
        if let Some(s) = self.scalar_atom()? {
            return Ok(V::v_scalar(s));
        }
        atom(self)
    }

    /// Number, `i` or a parameter; `None` leaves the token in place.
    fn scalar_atom(&mut self) -> Result<Option<Scalar>, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(n) => {
                self.next();
                let q = BigRational::from_integer(n.clone());
                Ok(Some(Scalar::constant(GaussRat::real(q))))
            }
            Tok::Ident(name) if name == "i" => {
                self.next();
                Ok(Some(Scalar::i()))
            }
            Tok::Ident(name) if name == "xi" => {
                self.next();
                let offset = self.peek().offset;
                let n = self.bracketed_int()?;
                let p = Param::xi(n).ok_or(ParseError::XiIndex { offset, index: n })?;
                Ok(Some(Scalar::param(p)))
            }
            Tok::Ident(name) => match Param::from_name(name) {
                Some(p) => {
                    self.next();
                    Ok(Some(Scalar::param(p)))
                }
                None => Ok(None),
            },
            _ => Ok(None),
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(name) => Ok((name, t.offset)),
            _ => Err(ParseError::Syntax {
                offset: t.offset,
                expected: "an expression".into(),
            }),
        }
    }

    fn classical_atom(&mut self) -> Result<ClassicalElement, ParseError> {
        let (name, offset) = self.ident()?;
        let optional_index = |p: &mut Self| -> Result<i64, ParseError> {
            if p.at_sym('[') {
                p.bracketed_int()
            } else {
                Ok(1)
            }
        };
        Ok(match name.as_str() {
            "l" => ClassicalElement::ell(),
            "sin" => ClassicalElement::sin(optional_index(self)?),
            "cos" => ClassicalElement::cos(optional_index(self)?),
            "E" => ClassicalElement::mono(0, self.bracketed_int()?),
            "PB" => {
                self.expect('(')?;
                let f = self.expr(&mut Self::classical_atom)?;
                self.expect(',')?;
                let g = self.expr(&mut Self::classical_atom)?;
                self.expect(')')?;
                f.bracket(&g)
            }
            "Lad" => {
                let k = self.bracketed_int()?;
                self.expect('(')?;
                let f = self.expr(&mut Self::classical_atom)?;
                self.expect(')')?;
                f.ladder(k)
            }
            "conj" => {
                self.expect('(')?;
                let f = self.expr(&mut Self::classical_atom)?;
                self.expect(')')?;
                f.conj()
            }
            _ => return Err(ParseError::UnknownName { offset, name }),
        })
    }

    fn operator_atom(&mut self) -> Result<OpExpr, ParseError> {
        let (name, offset) = self.ident()?;
        Ok(match name.as_str() {
            "D" => OpExpr::Leaf(OperatorElement::d()),
            "Xi" => OpExpr::Leaf(OperatorElement::xi()),
            "I" => OpExpr::Leaf(OperatorElement::identity()),
            "E" => OpExpr::Leaf(OperatorElement::e(self.bracketed_int()?)),
            "Comm" => {
                self.expect('(')?;
                let a = self.expr(&mut Self::operator_atom)?;
                self.expect(',')?;
                let b = self.expr(&mut Self::operator_atom)?;
                self.expect(')')?;
                OpExpr::comm(a, b)
            }
            "Adj" => {
                self.expect('(')?;
                let a = self.expr(&mut Self::operator_atom)?;
                self.expect(')')?;
                OpExpr::Adjoint(Box::new(a))
            }
            "Q" => {
                let brace = self.peek().offset;
                self.expect('{')?;
                let close = self.text[brace..]
                    .find('}')
                    .map(|k| brace + k)
                    .ok_or_else(|| self.error("`}`"))?;
                let name = self.text[brace + 1..close].trim().to_string();
                while self.peek().offset <= close && self.peek().tok != Tok::End {
                    self.next();
                }
                let scheme = self
                    .schemes
                    .get(&name)
                    .ok_or(ParseError::UnknownName { offset: brace + 1, name })?;
                self.expect('(')?;
                let at = self.peek().offset;
                let f = self.expr(&mut Self::classical_atom)?;
                self.expect(')')?;
                let q = scheme.quantize(&f).map_err(|source| ParseError::Quant { offset: at, source })?;
                OpExpr::Leaf(q)
            }
            _ => return Err(ParseError::UnknownName { offset, name }),
        })
    }
}

pub fn parse_scalar(text: &str) -> Result<Scalar, ParseError> {
    let schemes = SchemeContext::empty();
    let mut p = Parser::new(text, &schemes)?;
    let v = p.expr(&mut |p: &mut Parser| -> Result<ClassicalElement, ParseError> {
        let t = p.peek().clone();
        Err(match t.tok {
            Tok::Ident(name) => ParseError::UnknownName { offset: t.offset, name },
            _ => p.error("a scalar"),
        })
    })?;
    p.finish()?;
    Ok(v.coeff(Mono { r: 0, m: 0 }))
}

pub fn parse_classical(text: &str) -> Result<ClassicalElement, ParseError> {
    let schemes = SchemeContext::empty();
    let mut p = Parser::new(text, &schemes)?;
    let v = p.expr(&mut Parser::classical_atom)?;
    p.finish()?;
    Ok(v)
}

/// Parses an operator expression without normal-ordering it.
pub fn parse_operator_expr(text: &str, schemes: &SchemeContext) -> Result<OpExpr, ParseError> {
    let mut p = Parser::new(text, schemes)?;
    let v = p.expr(&mut Parser::operator_atom)?;
    p.finish()?;
    Ok(v)
}

/// Parses and normal-orders an operator expression.
pub fn parse_operator(text: &str, schemes: &SchemeContext) -> Result<OperatorElement, ParseError> {
    parse_operator_expr(text, schemes)?
        .normal_form()
        .map_err(|e| ParseError::Quant {
            offset: 0,
            source: QuantError::Operator(e),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{arb_classical, arb_operator, arb_scalar, fixed_config};
    use proptest::prelude::*;

    type C = ClassicalElement;

    #[test]
    fn bracket_form() {
        let f = parse_classical("PB(l^2, sin)").unwrap();
        assert_eq!(f, (C::ell() * C::cos(1)).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn commutator_form() {
        let op = parse_operator("Comm(D, E[2])", &SchemeContext::default()).unwrap();
        assert_eq!(op, OperatorElement::e(2).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse_classical("l^2 *").unwrap_err();
        assert_eq!(err, ParseError::Syntax { offset: 5, expected: "an expression".into() });
        assert!(matches!(parse_classical("l + foo"), Err(ParseError::UnknownName { offset: 4, .. })));
        assert!(matches!(parse_scalar("xi[65]"), Err(ParseError::XiIndex { index: 65, .. })));
        assert!(matches!(parse_classical("l / l"), Err(ParseError::Division { .. })));
        assert!(matches!(parse_classical("(l"), Err(ParseError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn trig_atoms_and_forms() {
        let f = parse_classical("sin*sin + cos*cos").unwrap();
        assert_eq!(f, C::one());
        assert_eq!(parse_classical("cos[2]").unwrap(), C::cos(2));
        assert_eq!(parse_classical("Lad[1](l)").unwrap(), C::ell().ladder(1));
        assert_eq!(parse_classical("conj(i*E[1])").unwrap(), C::mono(0, -1).scale(&-Scalar::i()));
        assert_eq!(parse_classical("l/2").unwrap(), C::ell().scale(&Scalar::ratio(1, 2)));
    }

    #[test]
    fn quantized_atoms() {
        let s = SchemeContext::default();
        let q = parse_operator("Q{type-i}(l)", &s).unwrap();
        assert_eq!(q, OperatorElement::d_plus(&Scalar::param(Param::Nu)));
        assert!(matches!(parse_operator("Q{type-i}(l^2)", &s), Err(ParseError::Quant { .. })));
        assert!(matches!(parse_operator("Q{nope}(l)", &s), Err(ParseError::UnknownName { .. })));
        // Xi may not pass E in normal form, but stays available lazily
        let e = parse_operator_expr("Comm(Xi, E[1])", &s).unwrap();
        assert!(e.normal_form().is_err());
        assert!(e.matrix_element(1, 0).is_ok());
    }

    proptest! {
        #![proptest_config(fixed_config(1000))]

        #[test]
        fn classical_round_trip(f in arb_classical()) {
            prop_assert_eq!(parse_classical(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn operator_round_trip(a in arb_operator()) {
            prop_assert_eq!(parse_operator(&a.to_string(), &SchemeContext::empty()).unwrap(), a);
        }

        #[test]
        fn scalar_round_trip(s in arb_scalar()) {
            prop_assert_eq!(parse_scalar(&s.to_string()).unwrap(), s);
        }
    }
}
