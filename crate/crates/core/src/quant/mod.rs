//! Quantization schemes, Von Neumann rules and bracket residuals.
//!
//! A [`QuantScheme`] is a linear map from classical elements to operators,
//! stored on a finite set of key elements with distinct leading monomials
//! and extended linearly. Elements outside the span are a
//! [`QuantError::DomainMiss`], never a silent zero.

mod obstruction;
mod relation;
mod solve;

pub use obstruction::{
    aside_discrepancy, band_coefficient, nogo_main, nogo_valpha, trig_display, trivial_p, trivial_valpha,
    uniqueness_constraints, Finding, NogoReport, Trig, TrigDisplay, UniquenessReport,
};
pub use relation::PbExpr;
pub use solve::{extract_constraints, solve_linear, Constraint, ConstraintSet, SolveError, Solution, SolveStatus};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::classical::{ClassicalElement, Mono};
use crate::operator::{OpError, OperatorElement, Word};
use crate::scalar::{GaussRat, Param, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantError {
    #[error("{mono} is outside the domain of scheme {scheme}")]
    DomainMiss { scheme: String, mono: Mono },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("rule {rule} requires {requirement}")]
    MissingPrerequisite { rule: Rule, requirement: String },
    #[error("rule {rule} is already determined by the table and disagrees by {discrepancy}")]
    RuleConflict { rule: Rule, discrepancy: OperatorElement },
    #[error("rule {rule} has a non-constant leading coefficient")]
    NonConstantLeading { rule: Rule },
    #[error("classical relation does not hold: lhs - rhs = {0}")]
    FalseRelation(ClassicalElement),
    #[error("word {0} is not of the form E^(+-1) times a polynomial in D")]
    OutsideTrigSpan(Word),
    #[error("parameter {param} must be a constant for this computation")]
    NonConstantParameter { param: Param },
    #[error(transparent)]
    Operator(#[from] OpError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Representation family a scheme starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// `Q(l) = D + nu`, `Q(e^0_{+-1}) = lambda E^{+-1}` on `L^2(S^1)`.
    TypeI,
    /// `Q(l) = mu`, `Q(e^0_{+-1}) = 0` on a one-dimensional space.
    TypeII,
    /// The position representations on all of `P^1`.
    PosRep,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::TypeI => "type-i",
            SchemeKind::TypeII => "type-ii",
            SchemeKind::PosRep => "pos-rep",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = QuantError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "type-i" | "type_i" => Ok(SchemeKind::TypeI),
            "type-ii" | "type_ii" => Ok(SchemeKind::TypeII),
            "pos-rep" | "pos_rep" => Ok(SchemeKind::PosRep),
            other => Err(QuantError::UnknownScheme(other.to_string())),
        }
    }
}

/// Parameter values for a scheme. An unbound parameter stays formal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    values: BTreeMap<Param, Scalar>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, p: Param, value: Scalar) -> Self {
        self.set(p, value);
        self
    }

    pub fn with_rational(self, p: Param, num: i64, den: i64) -> Self {
        self.with(p, Scalar::ratio(num, den))
    }

    pub fn set(&mut self, p: Param, value: Scalar) {
        self.values.insert(p, value);
    }

    /// Makes `p` explicitly formal, overriding a kind's default.
    pub fn set_formal(&mut self, p: Param) {
        self.values.insert(p, Scalar::param(p));
    }

    pub fn is_bound(&self, p: Param) -> bool {
        self.values.get(&p).is_some_and(|v| *v != Scalar::param(p))
    }

    pub fn get(&self, p: Param) -> Scalar {
        self.values.get(&p).cloned().unwrap_or_else(|| Scalar::param(p))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Param, &Scalar)> {
        self.values.iter()
    }
}

/// Von Neumann rules, each a displayed operator identity with its free
/// parameters taken from the scheme bindings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `Q(l^2) = Q(l)^2 + b Q(l) + c`.
    L2,
    /// `Q(l sin) = Q(sin)Q(l) - (i/2)Q(cos) + (b/2)Q(sin)`.
    Ls,
    /// `Q(l cos) = Q(cos)Q(l) + (i/2)Q(sin) + (b/2)Q(cos)`.
    Lc,
    /// `Q(l^2 sin) = Q(sin)Q(l)^2 - iQ(cos)Q(l) + Q(sin)/4`.
    L2s,
    /// `Q(l^2 cos) = Q(cos)Q(l)^2 + iQ(sin)Q(l) + Q(cos)/4`.
    L2c,
    /// `Q(l^3 + 3 alpha l^2) = Q(l)^3 + 3 alpha Q(l)^2 + b' Q(l) + c'`.
    Cubic,
    /// `Q((l^2 + 2 alpha l) sin)`.
    L2sPrime,
    /// `Q((l^2 + 2 alpha l) cos)`.
    L2cPrime,
    /// `Q((l^4 + 4 alpha l^3 + 4 alpha^2 l^2) sin)`.
    L4s,
    /// `Q((l^4 + 4 alpha l^3 + 4 alpha^2 l^2) cos)`.
    L4c,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::L2,
        Rule::Ls,
        Rule::Lc,
        Rule::L2s,
        Rule::L2c,
        Rule::Cubic,
        Rule::L2sPrime,
        Rule::L2cPrime,
        Rule::L4s,
        Rule::L4c,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Rule::L2 => "l2",
            Rule::Ls => "ls",
            Rule::Lc => "lc",
            Rule::L2s => "l2s",
            Rule::L2c => "l2c",
            Rule::Cubic => "cubic",
            Rule::L2sPrime => "l2sp",
            Rule::L2cPrime => "l2cp",
            Rule::L4s => "l4s",
            Rule::L4c => "l4c",
        }
    }

    fn prerequisites(&self) -> &'static [Rule] {
        match self {
            Rule::L2 | Rule::Cubic => &[],
            Rule::Ls | Rule::Lc => &[Rule::L2],
            Rule::L2s | Rule::L2c => &[Rule::L2, Rule::Ls, Rule::Lc],
            Rule::L2sPrime | Rule::L2cPrime => &[Rule::Cubic],
            Rule::L4s | Rule::L4c => &[Rule::Cubic, Rule::L2sPrime, Rule::L2cPrime],
        }
    }

    /// A parameter value the displayed identity presupposes.
    fn required_binding(&self) -> Option<(Param, Scalar)> {
        match self {
            Rule::L2s | Rule::L2c => Some((Param::B, Scalar::zero())),
            Rule::L4s | Rule::L4c => Some((Param::Bp, Scalar::ratio(1, 2))),
            _ => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = QuantError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.replace('\'', "p");
        Rule::ALL
            .iter()
            .copied()
            .find(|r| r.name() == normalized)
            .ok_or_else(|| QuantError::UnknownRule(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    key: ClassicalElement,
    value: OperatorElement,
}

/// A quantization map on a finite-dimensional (or, for `pos-rep`, formula
/// defined) domain.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantScheme {
    name: String,
    kind: SchemeKind,
    bindings: Bindings,
    rules: Vec<Rule>,
    table: BTreeMap<Mono, Entry>,
}

impl QuantScheme {
    pub fn build(kind: SchemeKind, bindings: Bindings) -> Self {
        let mut bindings = bindings;
        if kind == SchemeKind::TypeI && !bindings.values.contains_key(&Param::Lambda) {
            bindings.set(Param::Lambda, Scalar::one());
        }
        Self {
            name: kind.name().to_string(),
            kind,
            bindings,
            rules: Vec::new(),
            table: BTreeMap::new(),
        }
    }

    pub fn type_i(bindings: Bindings) -> Self {
        Self::build(SchemeKind::TypeI, bindings)
    }

    pub fn type_ii(bindings: Bindings) -> Self {
        Self::build(SchemeKind::TypeII, bindings)
    }

    pub fn pos_rep(bindings: Bindings) -> Self {
        Self::build(SchemeKind::PosRep, bindings)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn param(&self, p: Param) -> Scalar {
        self.bindings.get(p)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Operator assigned to a single monomial by the base representation.
    fn base(&self, mono: Mono) -> Option<OperatorElement> {
        let Mono { r, m } = mono;
        match self.kind {
            SchemeKind::TypeI => match (r, m) {
                (0, 0) => Some(OperatorElement::identity()),
                (1, 0) => Some(OperatorElement::d_plus(&self.param(Param::Nu))),
                (0, 1) | (0, -1) => Some(OperatorElement::e(m).scale(&self.param(Param::Lambda))),
                _ => None,
            },
            SchemeKind::TypeII => match (r, m) {
                (0, 0) => Some(OperatorElement::identity()),
                (1, 0) => Some(OperatorElement::scalar(self.param(Param::Mu))),
                (0, 1) | (0, -1) => Some(OperatorElement::zero()),
                _ => None,
            },
            SchemeKind::PosRep => match r {
                // Q(e^0_N) = E^N
                0 => Some(OperatorElement::e(m)),
                // Q(e^1_N) = E^N (D + i N eta + N/2 + nu)
                1 => {
                    let shift = &(&Scalar::i() * &Scalar::from_int(m)) * &self.param(Param::Eta)
                        + Scalar::ratio(m, 2)
                        + self.param(Param::Nu);
                    Some(OperatorElement::e(m) * OperatorElement::d_plus(&shift))
                }
                _ => None,
            },
        }
    }

    /// Resolves the leading monomial of `f`: an element covering it with unit
    /// coefficient, and its image.
    fn cover(&self, mono: Mono) -> Option<(ClassicalElement, OperatorElement)> {
        if let Some(entry) = self.table.get(&mono) {
            return Some((entry.key.clone(), entry.value.clone()));
        }
        self.base(mono).map(|op| (ClassicalElement::mono(mono.r, mono.m), op))
    }

    /// Reduces `f` by covered leading monomials. Returns the uncovered
    /// remainder and the image of the covered part.
    fn reduce(&self, f: &ClassicalElement) -> (ClassicalElement, OperatorElement) {
        let mut rest = f.clone();
        let mut image = OperatorElement::zero();
        let mut uncovered = ClassicalElement::zero();
        while let Some((mono, coeff)) = rest.leading() {
            let coeff = coeff.clone();
            match self.cover(mono) {
                Some((key, value)) => {
                    rest -= &key.scale(&coeff);
                    image += &value.scale(&coeff);
                }
                None => {
                    let t = ClassicalElement::term(mono, coeff);
                    rest -= &t;
                    uncovered += &t;
                }
            }
        }
        (uncovered, image)
    }

    /// `Q(f)` by linear extension.
    pub fn quantize(&self, f: &ClassicalElement) -> Result<OperatorElement, QuantError> {
        let (uncovered, image) = self.reduce(f);
        match uncovered.leading() {
            None => Ok(image),
            Some((mono, _)) => Err(QuantError::DomainMiss {
                scheme: self.name.clone(),
                mono,
            }),
        }
    }

    pub fn in_domain(&self, f: &ClassicalElement) -> bool {
        self.reduce(f).0.is_zero()
    }

    pub fn q_ell(&self) -> Result<OperatorElement, QuantError> {
        self.quantize(&ClassicalElement::ell())
    }

    pub fn q_sin(&self) -> Result<OperatorElement, QuantError> {
        self.quantize(&ClassicalElement::sin(1))
    }

    pub fn q_cos(&self) -> Result<OperatorElement, QuantError> {
        self.quantize(&ClassicalElement::cos(1))
    }

    /// Installs a Von Neumann rule, returning the extended scheme.
    pub fn vn_extend(&self, rule: Rule) -> Result<QuantScheme, QuantError> {
        for pre in rule.prerequisites() {
            if !self.rules.contains(pre) {
                return Err(QuantError::MissingPrerequisite {
                    rule,
                    requirement: format!("rule {pre}"),
                });
            }
        }
        if let Some((p, value)) = rule.required_binding() {
            if self.param(p) != value {
                return Err(QuantError::MissingPrerequisite {
                    rule,
                    requirement: format!("{p} = {value}"),
                });
            }
        }
        let (key, value) = rules::rule_entry(self, rule)?;
        let mut out = self.clone();
        out.install(rule, key, value)?;
        out.rules.push(rule);
        Ok(out)
    }

    /// Installs several rules in order.
    pub fn with_rules(&self, rules: &[Rule]) -> Result<QuantScheme, QuantError> {
        rules.iter().try_fold(self.clone(), |s, r| s.vn_extend(*r))
    }

    fn install(&mut self, rule: Rule, key: ClassicalElement, value: OperatorElement) -> Result<(), QuantError> {
        let mut key = key;
        let mut value = value;
        while let Some((mono, coeff)) = key.leading() {
            let Some((k, v)) = self.cover(mono) else { break };
            let coeff = coeff.clone();
            key -= &k.scale(&coeff);
            value -= &v.scale(&coeff);
        }
        let Some((mono, lead)) = key.leading() else {
            if value.is_zero() {
                return Ok(());
            }
            return Err(QuantError::RuleConflict { rule, discrepancy: value });
        };
        let inv = lead
            .as_constant()
            .and_then(|c| c.inv())
            .ok_or(QuantError::NonConstantLeading { rule })?;
        let inv = Scalar::constant(inv);
        self.table.insert(
            mono,
            Entry {
                key: key.scale(&inv),
                value: value.scale(&inv),
            },
        );
        Ok(())
    }

    /// `Q({f, g}) - i [Q(f), Q(g)]` (with hbar = 1).
    pub fn bracket_residual(&self, f: &ClassicalElement, g: &ClassicalElement) -> Result<OperatorElement, QuantError> {
        let lhs = self.quantize(&f.bracket(g))?;
        let qf = self.quantize(f)?;
        let qg = self.quantize(g)?;
        Ok(lhs - qf.try_commutator(&qg)?.scale(&Scalar::i()))
    }

    /// A constant value for `p`, when bound to one.
    pub fn constant_param(&self, p: Param) -> Result<GaussRat, QuantError> {
        self.param(p)
            .as_constant()
            .ok_or(QuantError::NonConstantParameter { param: p })
    }

    /// Leading monomials of installed table entries.
    pub fn table_keys(&self) -> BTreeSet<Mono> {
        self.table.keys().copied().collect()
    }
}

mod rules {
    use super::*;

    type C = ClassicalElement;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn q(num: i64, den: i64) -> Scalar {
        Scalar::ratio(num, den)
    }

    fn i() -> Scalar {
        Scalar::i()
    }

    /// Classical key and operator value for a rule, built from the scheme's
    /// `Q(l)`, `Q(sin)`, `Q(cos)` and bindings.
    pub(super) fn rule_entry(scheme: &QuantScheme, rule: Rule) -> Result<(C, OperatorElement), QuantError> {
        let missing = |what: &str| QuantError::MissingPrerequisite {
            rule,
            requirement: format!("{what} in the scheme domain"),
        };
        let l = scheme.q_ell().map_err(|_| missing("Q(l)"))?;
        let sn = scheme.q_sin().map_err(|_| missing("Q(sin)"))?;
        let cs = scheme.q_cos().map_err(|_| missing("Q(cos)"))?;
        let one = OperatorElement::identity();
        let b = scheme.param(Param::B);
        let c = scheme.param(Param::C);
        let bp = scheme.param(Param::Bp);
        let cp = scheme.param(Param::Cp);
        let alpha = scheme.param(Param::Alpha);
        let a2 = alpha.pow(2);
        let l2 = &l * &l;
        let l3 = &l2 * &l;
        let l4 = &l3 * &l;

        let ell = C::ell();
        let sin = C::sin(1);
        let cos = C::cos(1);
        let ell2 = C::ell_pow(2);
        let quad = &ell2 + &ell.scale(&(s(2) * alpha.clone()));
        let quart = C::ell_pow(4) + C::ell_pow(3).scale(&(s(4) * alpha.clone())) + ell2.scale(&(s(4) * a2.clone()));
        let cubic_key = C::ell_pow(3) + ell2.scale(&(s(3) * alpha.clone()));
        let third_1bp = &(&Scalar::one() + &bp) * &q(1, 3);

        Ok(match rule {
            Rule::L2 => (ell2, &l2 + &l.scale(&b) + one.scale(&c)),
            Rule::Ls => (
                &ell * &sin,
                &sn * &l - cs.scale(&(i() * q(1, 2))) + sn.scale(&(&b * &q(1, 2))),
            ),
            Rule::Lc => (
                &ell * &cos,
                &cs * &l + sn.scale(&(i() * q(1, 2))) + cs.scale(&(&b * &q(1, 2))),
            ),
            Rule::L2s => (&ell2 * &sin, &sn * &l2 - (&cs * &l).scale(&i()) + sn.scale(&q(1, 4))),
            Rule::L2c => (&ell2 * &cos, &cs * &l2 + (&sn * &l).scale(&i()) + cs.scale(&q(1, 4))),
            Rule::Cubic => (
                cubic_key,
                &l3 + l2.scale(&(s(3) * alpha.clone())) + l.scale(&bp) + one.scale(&cp),
            ),
            Rule::L2sPrime => (
                &quad * &sin,
                &sn * &l2
                    + (sn.scale(&(s(2) * alpha.clone())) - cs.scale(&i())) * &l
                    + sn.scale(&third_1bp)
                    - cs.scale(&(i() * alpha.clone())),
            ),
            Rule::L2cPrime => (
                &quad * &cos,
                &cs * &l2
                    + (cs.scale(&(s(2) * alpha.clone())) + sn.scale(&i())) * &l
                    + cs.scale(&third_1bp)
                    + sn.scale(&(i() * alpha.clone())),
            ),
            Rule::L4s => (
                &quart * &sin,
                &sn * &l4
                    + (sn.scale(&(s(4) * alpha.clone())) - cs.scale(&(i() * s(2)))) * &l3
                    + (sn.scale(&(s(4) * a2.clone() + s(2))) - cs.scale(&(i() * s(6) * alpha.clone()))) * &l2
                    + (sn.scale(&(s(4) * alpha.clone())) - cs.scale(&(i() * (s(4) * a2.clone() + s(1))))) * &l
                    + sn.scale(&(q(1, 4) + a2.clone()))
                    - cs.scale(&(i() * alpha.clone())),
            ),
            Rule::L4c => (
                &quart * &cos,
                &cs * &l4
                    + (cs.scale(&(s(4) * alpha.clone())) + sn.scale(&(i() * s(2)))) * &l3
                    + (cs.scale(&(s(4) * a2.clone() + s(2))) + sn.scale(&(i() * s(6) * alpha.clone()))) * &l2
                    + (cs.scale(&(s(4) * alpha.clone())) + sn.scale(&(i() * (s(4) * a2.clone() + s(1))))) * &l
                    + cs.scale(&(q(1, 4) + a2))
                    + sn.scale(&(i() * alpha)),
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = ClassicalElement;
    type Op = OperatorElement;

    fn nu() -> Scalar {
        Scalar::param(Param::Nu)
    }

    fn alpha() -> Scalar {
        Scalar::param(Param::Alpha)
    }

    pub(crate) fn basic_set() -> Vec<C> {
        vec![C::one(), C::ell(), C::sin(1), C::cos(1)]
    }

    #[test]
    fn pos_rep_monomials() {
        let s = QuantScheme::pos_rep(Bindings::new());
        for n in -3..=3 {
            assert_eq!(s.quantize(&C::mono(0, n)).unwrap(), Op::e(n));
            let shift = Scalar::i() * Scalar::from_int(n) * Scalar::param(Param::Eta)
                + Scalar::ratio(n, 2)
                + nu();
            assert_eq!(s.quantize(&C::mono(1, n)).unwrap(), Op::e(n) * Op::d_plus(&shift));
        }
        assert!(matches!(
            s.quantize(&C::mono(2, 0)),
            Err(QuantError::DomainMiss { .. })
        ));
    }

    #[test]
    fn type_ii_kills_trig() {
        let s = QuantScheme::type_ii(Bindings::new());
        assert!(s.quantize(&C::cos(1)).unwrap().is_zero());
        assert_eq!(s.q_ell().unwrap(), Op::scalar(Scalar::param(Param::Mu)));
    }

    #[test]
    fn basic_set_residuals_vanish() {
        let schemes = [
            QuantScheme::type_i(Bindings::new()),
            QuantScheme::type_ii(Bindings::new()),
            QuantScheme::pos_rep(Bindings::new()),
        ];
        for s in &schemes {
            for f in basic_set() {
                for g in basic_set() {
                    assert!(s.bracket_residual(&f, &g).unwrap().is_zero(), "{} {f} {g}", s.name());
                }
            }
        }
    }

    #[test]
    fn generator_relation() {
        let s = QuantScheme::type_i(Bindings::new());
        for n in [-1, 1] {
            assert!(s.bracket_residual(&C::ell(), &C::mono(0, n)).unwrap().is_zero());
        }
    }

    #[test]
    fn l2_entry() {
        let s = QuantScheme::type_i(Bindings::new()).vn_extend(Rule::L2).unwrap();
        let l = Op::d_plus(&nu());
        let expected = &l * &l + l.scale(&Scalar::param(Param::B)) + Op::scalar(Scalar::param(Param::C));
        assert_eq!(s.quantize(&C::ell_pow(2)).unwrap(), expected);
    }

    #[test]
    fn prerequisites_enforced() {
        let base = QuantScheme::type_i(Bindings::new());
        assert!(matches!(base.vn_extend(Rule::Ls), Err(QuantError::MissingPrerequisite { .. })));
        let with = base.with_rules(&[Rule::L2, Rule::Ls, Rule::Lc]).unwrap();
        // b is still formal
        assert!(matches!(with.vn_extend(Rule::L2s), Err(QuantError::MissingPrerequisite { .. })));
        let bound = QuantScheme::type_i(Bindings::new().with(Param::B, Scalar::zero()));
        let full = bound.with_rules(&[Rule::L2, Rule::Ls, Rule::Lc, Rule::L2s]).unwrap();
        let l4c = full.vn_extend(Rule::L4c);
        assert!(matches!(l4c, Err(QuantError::MissingPrerequisite { .. })));
        assert!("nope".parse::<Rule>().is_err());
        assert_eq!("l2s'".parse::<Rule>().unwrap(), Rule::L2sPrime);
    }

    #[test]
    fn l4c_leading_word() {
        let b = Bindings::new().with(Param::Bp, Scalar::ratio(1, 2)).with(Param::Cp, alpha() * Scalar::ratio(1, 2));
        let s = QuantScheme::type_i(b)
            .with_rules(&[Rule::Cubic, Rule::L2sPrime, Rule::L2cPrime, Rule::L4c])
            .unwrap();
        let key = (C::ell_pow(4) + C::ell_pow(3).scale(&(Scalar::from_int(4) * alpha()))
            + C::ell_pow(2).scale(&(Scalar::from_int(4) * alpha().pow(2))))
            * C::cos(1);
        let op = s.quantize(&key).unwrap();
        let disp = trig_display(&s, &op).unwrap();
        assert_eq!(disp.coeff(Trig::Cos, 4), Scalar::one());
        assert!(disp.coeff(Trig::Sin, 4).is_zero());
        assert_eq!(disp.max_power(), Some(4));
    }

    /// Each displayed rule agrees with quantizing its defining bracket
    /// relation using the rules before it.
    #[test]
    fn rules_follow_from_bracket_relations() {
        let half = Scalar::ratio(1, 2);
        let sin = C::sin(1);
        let cos = C::cos(1);
        let ell = C::ell();
        let ell2 = C::ell_pow(2);

        // formal b, c
        let s = QuantScheme::type_i(Bindings::new()).with_rules(&[Rule::L2, Rule::Ls, Rule::Lc]).unwrap();
        let ls_rel = PbExpr::bracket(ell2.clone(), cos.clone()).scaled(-&half);
        assert!(ls_rel.residual(&s, &(&ell * &sin)).unwrap().is_zero());
        let lc_rel = PbExpr::bracket(ell2.clone(), sin.clone()).scaled(half.clone());
        assert!(lc_rel.residual(&s, &(&ell * &cos)).unwrap().is_zero());

        // b = 0, c formal
        let s = QuantScheme::type_i(Bindings::new().with(Param::B, Scalar::zero()))
            .with_rules(&[Rule::L2, Rule::Ls, Rule::Lc, Rule::L2s, Rule::L2c])
            .unwrap();
        let l2s_rel = PbExpr::bracket(&ell * &cos, ell2.clone()).scaled(half.clone());
        assert!(l2s_rel.residual(&s, &(&ell2 * &sin)).unwrap().is_zero());
        let l2c_rel = PbExpr::bracket(&ell * &sin, ell2.clone()).scaled(-&half);
        assert!(l2c_rel.residual(&s, &(&ell2 * &cos)).unwrap().is_zero());

        // b', c' formal for the quadratic rules
        let cubic = C::ell_pow(3) + ell2.scale(&(Scalar::from_int(3) * alpha()));
        let quad = &ell2 + &ell.scale(&(Scalar::from_int(2) * alpha()));
        let s = QuantScheme::type_i(Bindings::new())
            .with_rules(&[Rule::Cubic, Rule::L2sPrime, Rule::L2cPrime])
            .unwrap();
        let third = Scalar::ratio(1, 3);
        let rel = PbExpr::bracket(cubic.clone(), cos.clone()).scaled(-&third);
        assert!(rel.residual(&s, &(&quad * &sin)).unwrap().is_zero());
        let rel = PbExpr::bracket(cubic.clone(), sin.clone()).scaled(third.clone());
        assert!(rel.residual(&s, &(&quad * &cos)).unwrap().is_zero());

        // quartic rules after b' = 1/2, c' = alpha/2
        let b = Bindings::new().with(Param::Bp, half.clone()).with(Param::Cp, alpha() * half.clone());
        let s = QuantScheme::type_i(b)
            .with_rules(&[Rule::Cubic, Rule::L2sPrime, Rule::L2cPrime, Rule::L4s, Rule::L4c])
            .unwrap();
        let quart = C::ell_pow(4) + C::ell_pow(3).scale(&(Scalar::from_int(4) * alpha()))
            + ell2.scale(&(Scalar::from_int(4) * alpha().pow(2)));
        let rel = PbExpr::bracket(&quad * &cos, cubic.clone()).scaled(third.clone());
        assert!(rel.residual(&s, &(&quart * &sin)).unwrap().is_zero());
        let rel = PbExpr::bracket(&quad * &sin, cubic.clone()).scaled(-&third);
        assert!(rel.residual(&s, &(&quart * &cos)).unwrap().is_zero());
    }

    #[test]
    fn conflicting_rule_is_reported() {
        let b = Bindings::new()
            .with(Param::B, Scalar::zero())
            .with(Param::Bp, Scalar::ratio(1, 2));
        let s = QuantScheme::type_i(b)
            .with_rules(&[Rule::L2, Rule::Ls, Rule::Lc, Rule::L2s, Rule::L2c, Rule::Cubic])
            .unwrap();
        let err = s.vn_extend(Rule::L2sPrime).unwrap_err();
        let QuantError::RuleConflict { discrepancy, .. } = err else { panic!("{err}") };
        // rule value minus tabulated value
        let quarter_sin = s.q_sin().unwrap().scale(&Scalar::ratio(1, 4));
        assert_eq!(discrepancy, quarter_sin);
    }

    #[test]
    fn b_forced_to_zero() {
        let s = QuantScheme::type_i(Bindings::new()).with_rules(&[Rule::L2, Rule::Ls, Rule::Lc]).unwrap();
        let rel = PbExpr::bracket(&C::ell() * &C::cos(1), &C::ell() * &C::sin(1));
        let residual = rel.residual(&s, &C::ell()).unwrap();
        assert_eq!(residual, Op::scalar(Scalar::param(Param::B) * Scalar::ratio(1, 2)));
        let sol = solve_linear(&extract_constraints(&residual, &[Param::B])).unwrap();
        assert_eq!(sol.status, SolveStatus::Unique);
        assert_eq!(sol.value(Param::B), Some(&Scalar::zero()));
    }

    #[test]
    fn cubic_parameters_forced() {
        let s = QuantScheme::type_i(Bindings::new())
            .with_rules(&[Rule::Cubic, Rule::L2sPrime, Rule::L2cPrime])
            .unwrap();
        let quad = C::ell_pow(2) + C::ell().scale(&(Scalar::from_int(2) * alpha()));
        let rel = PbExpr::bracket(&quad * &C::cos(1), &quad * &C::sin(1))
            .scaled(Scalar::ratio(1, 2))
            .plus(C::ell().scale(&(Scalar::from_int(-2) * alpha().pow(2))));
        let cubic = C::ell_pow(3) + C::ell_pow(2).scale(&(Scalar::from_int(3) * alpha()));
        let residual = rel.residual(&s, &cubic).unwrap();
        let sol = solve_linear(&extract_constraints(&residual, &[Param::Bp, Param::Cp])).unwrap();
        assert_eq!(sol.status, SolveStatus::Unique);
        assert_eq!(sol.value(Param::Bp), Some(&Scalar::ratio(1, 2)));
        assert_eq!(sol.value(Param::Cp), Some(&(alpha() * Scalar::ratio(1, 2))));
    }

    #[test]
    fn iden_leaves_b_c_free() {
        let s = QuantScheme::type_i(Bindings::new()).vn_extend(Rule::L2).unwrap();
        let ell2 = C::ell_pow(2);
        let rel = PbExpr::bracket(PbExpr::bracket(ell2.clone(), C::sin(1)), C::sin(1))
            .plus(PbExpr::bracket(PbExpr::bracket(ell2, C::cos(1)), C::cos(1)));
        let residual = rel.residual(&s, &C::constant(Scalar::from_int(2))).unwrap();
        let set = extract_constraints(&residual, &[Param::B, Param::C]);
        assert!(set.constraints.is_empty());
        let sol = solve_linear(&set).unwrap();
        assert_eq!(sol.status, SolveStatus::Underdetermined);
        assert_eq!(sol.free, vec![Param::B, Param::C]);
    }
}
