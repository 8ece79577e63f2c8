use crate::classical::ClassicalElement;
use crate::operator::OperatorElement;
use crate::scalar::Scalar;

use super::{QuantError, QuantScheme};

/// A Poisson-bracket expression, evaluated classically or through a scheme
/// with every bracket replaced by `i[., .]`.
#[derive(Clone, Debug, PartialEq)]
pub enum PbExpr {
    Leaf(ClassicalElement),
    /// A leaf whose quantization is supplied rather than looked up, for
    /// elements outside the scheme domain whose image is arbitrary.
    Opaque(ClassicalElement, OperatorElement),
    Bracket(Box<PbExpr>, Box<PbExpr>),
    Scale(Scalar, Box<PbExpr>),
    Sum(Vec<PbExpr>),
}

impl PbExpr {
    pub fn leaf(f: ClassicalElement) -> Self {
        PbExpr::Leaf(f)
    }

    pub fn bracket(f: impl Into<PbExpr>, g: impl Into<PbExpr>) -> Self {
        PbExpr::Bracket(Box::new(f.into()), Box::new(g.into()))
    }

    pub fn scaled(self, s: Scalar) -> Self {
        PbExpr::Scale(s, Box::new(self))
    }

    pub fn plus(self, other: impl Into<PbExpr>) -> Self {
        match self {
            PbExpr::Sum(mut items) => {
                items.push(other.into());
                PbExpr::Sum(items)
            }
            first => PbExpr::Sum(vec![first, other.into()]),
        }
    }

    pub fn classical(&self) -> ClassicalElement {
        match self {
            PbExpr::Leaf(f) | PbExpr::Opaque(f, _) => f.clone(),
            PbExpr::Bracket(a, b) => a.classical().bracket(&b.classical()),
            PbExpr::Scale(s, a) => a.classical().scale(s),
            PbExpr::Sum(items) => items
                .iter()
                .fold(ClassicalElement::zero(), |acc, e| acc + e.classical()),
        }
    }

    /// The operator forced on the expression's value by the bracket rule.
    pub fn quantize(&self, scheme: &QuantScheme) -> Result<OperatorElement, QuantError> {
        Ok(match self {
            PbExpr::Leaf(f) => scheme.quantize(f)?,
            PbExpr::Opaque(_, op) => op.clone(),
            PbExpr::Bracket(a, b) => a
                .quantize(scheme)?
                .try_commutator(&b.quantize(scheme)?)?
                .scale(&Scalar::i()),
            PbExpr::Scale(s, a) => a.quantize(scheme)?.scale(s),
            PbExpr::Sum(items) => items.iter().try_fold(OperatorElement::zero(), |acc, e| {
                Ok::<_, QuantError>(acc + e.quantize(scheme)?)
            })?,
        })
    }

    /// `quantize(self) - Q(rhs)`, after checking `classical(self) = rhs`.
    pub fn residual(&self, scheme: &QuantScheme, rhs: &ClassicalElement) -> Result<OperatorElement, QuantError> {
        let gap = &self.classical() - rhs;
        if !gap.is_zero() {
            return Err(QuantError::FalseRelation(gap));
        }
        Ok(self.quantize(scheme)? - scheme.quantize(rhs)?)
    }
}

impl From<ClassicalElement> for PbExpr {
    fn from(f: ClassicalElement) -> Self {
        PbExpr::Leaf(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quant::Bindings;

    #[test]
    fn false_relation_rejected() {
        let s = QuantScheme::type_i(Bindings::new());
        let e = PbExpr::bracket(ClassicalElement::ell(), ClassicalElement::sin(1));
        assert!(matches!(
            e.residual(&s, &ClassicalElement::sin(1)),
            Err(QuantError::FalseRelation(_))
        ));
        assert!(e.residual(&s, &ClassicalElement::cos(1)).unwrap().is_zero());
    }
}
