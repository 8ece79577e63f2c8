//! Coefficient ring: Gaussian rationals extended by commuting real parameters.
//!
//! A [`Scalar`] is a sparse polynomial over `Q(i)` in a closed alphabet of
//! formal parameters. Every parameter is real, so conjugation only acts on
//! the Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest admissible `|n|` for the diagonal sequence parameters `xi[n]`.
pub const XI_INDEX_BOUND: i64 = 64;

/// An exact element of `Q(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Self::new(&self.re / &norm, -(&self.im / &norm)))
    }

    /// Integer power (negative exponents invert).
    pub fn powi(&self, exp: i64) -> Option<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    /// Sign used when printing a term: a coefficient is "negative" when its
    /// first nonzero component is.
    fn is_negative_leading(&self) -> bool {
        if !self.re.is_zero() {
            self.re.is_negative() && self.im.is_zero()
        } else {
            self.im.is_negative()
        }
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussRat {
    /// Parseable rendering: `3/2`, `-i`, `1/2*i`, `(1+2*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |q: &BigRational| -> String {
            if q.is_one() {
                "i".to_string()
            } else if (-q.clone()).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rational(q))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im);
                if im.starts_with('-') {
                    write!(f, "({}{})", fmt_rational(&self.re), im)
                } else {
                    write!(f, "({}+{})", fmt_rational(&self.re), im)
                }
            }
        }
    }
}

/// The closed parameter alphabet. Declaration order is the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Alpha,
    B,
    Bp,
    C,
    Cp,
    Eta,
    Lambda,
    Mu,
    Nu,
    Xi(i64),
}

impl Param {
    pub const NAMED: [Param; 9] = [
        Param::Alpha,
        Param::B,
        Param::Bp,
        Param::C,
        Param::Cp,
        Param::Eta,
        Param::Lambda,
        Param::Mu,
        Param::Nu,
    ];

    pub fn name(&self) -> String {
        match self {
            Param::Alpha => "alpha".into(),
            Param::B => "b".into(),
            Param::Bp => "bp".into(),
            Param::C => "c".into(),
            Param::Cp => "cp".into(),
            Param::Eta => "eta".into(),
            Param::Lambda => "lambda".into(),
            Param::Mu => "mu".into(),
            Param::Nu => "nu".into(),
            Param::Xi(n) => format!("xi[{n}]"),
        }
    }

    /// Looks up a named (non-indexed) parameter.
    pub fn from_name(name: &str) -> Option<Param> {
        Param::NAMED.iter().copied().find(|p| p.name() == name)
    }

    /// `xi[n]`, rejecting indices beyond [`XI_INDEX_BOUND`].
    pub fn xi(n: i64) -> Option<Param> {
        (n.abs() <= XI_INDEX_BOUND).then_some(Param::Xi(n))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A power product of parameters, sorted by parameter, exponents positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamMonomial(Vec<(Param, u32)>);

impl ParamMonomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(p: Param) -> Self {
        Self(vec![(p, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Param, u32)] {
        &self.0
    }

    pub fn exponent(&self, p: Param) -> u32 {
        self.0
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut map: BTreeMap<Param, u32> = self.0.iter().copied().collect();
        for &(p, e) in &other.0 {
            *map.entry(p).or_insert(0) += e;
        }
        Self(map.into_iter().collect())
    }

    /// The monomial with `p` removed.
    pub fn without(&self, p: Param) -> Self {
        Self(self.0.iter().copied().filter(|(q, _)| *q != p).collect())
    }

    pub fn total_degree_in(&self, set: &[Param]) -> u32 {
        self.0
            .iter()
            .filter(|(p, _)| set.contains(p))
            .map(|(_, e)| *e)
            .sum()
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(p, e)| if *e == 1 { p.name() } else { format!("{}^{}", p, e) })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Sparse polynomial in the parameters with `Q(i)` coefficients.
///
/// No stored coefficient is zero, so structural equality is mathematical
/// equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    terms: BTreeMap<ParamMonomial, GaussRat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussRat::one())
    }

    pub fn i() -> Self {
        Self::constant(GaussRat::i())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussRat::from_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(GaussRat::ratio(num, den))
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut s = Self::zero();
        s.add_term(ParamMonomial::one(), c);
        s
    }

    pub fn param(p: Param) -> Self {
        let mut s = Self::zero();
        s.add_term(ParamMonomial::var(p), GaussRat::one());
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (ParamMonomial, GaussRat)>>(iter: I) -> Self {
        let mut s = Self::zero();
        for (m, c) in iter {
            s.add_term(m, c);
        }
        s
    }

    fn add_term(&mut self, mono: ParamMonomial, coeff: GaussRat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                *existing = &*existing + &coeff;
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMonomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value if the scalar carries no parameters.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&ParamMonomial::one()).cloned(),
            _ => None,
        }
    }

    /// Coefficient of the parameter-free monomial.
    pub fn constant_term(&self) -> GaussRat {
        self.terms
            .get(&ParamMonomial::one())
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    pub fn params(&self) -> Vec<Param> {
        let mut out: Vec<Param> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(p, _)| *p))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    /// Real part, treating every parameter as real.
    pub fn re(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), GaussRat::real(c.re.clone()))),
        )
    }

    /// Imaginary part, treating every parameter as real.
    pub fn im(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), GaussRat::real(c.im.clone()))),
        )
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, k)| (m.clone(), k * c)))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces the listed parameters by values; others stay formal.
    pub fn substitute(&self, assignment: &BTreeMap<Param, GaussRat>) -> Self {
        let mut out = Self::zero();
        for (mono, coeff) in &self.terms {
            let mut c = coeff.clone();
            let mut rest = Vec::new();
            for &(p, e) in mono.factors() {
                match assignment.get(&p) {
                    Some(v) => c = &c * &v.powi(e as i64).expect("nonnegative power"),
                    None => rest.push((p, e)),
                }
            }
            out.add_term(ParamMonomial(rest), c);
        }
        out
    }

    /// Replaces parameters by scalar expressions.
    pub fn substitute_scalar(&self, assignment: &BTreeMap<Param, Scalar>) -> Self {
        let mut out = Self::zero();
        for (mono, coeff) in &self.terms {
            let mut acc = Self::constant(coeff.clone());
            for &(p, e) in mono.factors() {
                let factor = match assignment.get(&p) {
                    Some(v) => v.pow(e),
                    None => Self::from_terms([(ParamMonomial(vec![(p, e)]), GaussRat::one())]),
                };
                acc = &acc * &factor;
            }
            out += &acc;
        }
        out
    }

    /// Total degree in the given parameters over all terms.
    pub fn degree_in(&self, set: &[Param]) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree_in(set))
            .max()
            .unwrap_or(0)
    }

    /// Splits a scalar that is at most linear in `p` into `(coefficient of p, rest)`.
    pub fn split_linear(&self, p: Param) -> (Scalar, Scalar) {
        let mut lin = Self::zero();
        let mut rest = Self::zero();
        for (m, c) in &self.terms {
            match m.exponent(p) {
                0 => rest.add_term(m.clone(), c.clone()),
                _ => lin.add_term(m.without(p), c.clone()),
            }
        }
        (lin, rest)
    }

    /// The scalar as an `i64` when it is a real integer constant.
    pub fn as_i64(&self) -> Option<i64> {
        let c = self.as_constant()?;
        if c.im.is_zero() && c.re.is_integer() {
            c.re.to_integer().to_i64()
        } else {
            None
        }
    }
}

impl From<GaussRat> for Scalar {
    fn from(c: GaussRat) -> Self {
        Scalar::constant(c)
    }
}

impl From<Param> for Scalar {
    fn from(p: Param) -> Self {
        Scalar::param(p)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), -c)))
    }
}

macro_rules! forward_owned_binop {
    ($ty:ty, $tr:ident, $method:ident) => {
        impl $tr for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                self.$method(&rhs)
            }
        }
    };
}
pub(crate) use forward_owned_binop;

forward_owned_binop!(Scalar, Add, add);
forward_owned_binop!(Scalar, Sub, sub);
forward_owned_binop!(Scalar, Mul, mul);
forward_owned_binop!(GaussRat, Add, add);
forward_owned_binop!(GaussRat, Sub, sub);
forward_owned_binop!(GaussRat, Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

impl fmt::Display for Scalar {
    /// Parseable sum of terms in canonical order; `0` for the zero scalar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (mono, coeff)) in self.terms.iter().enumerate() {
            let negative = coeff.is_negative_leading();
            let shown = if negative { -coeff } else { coeff.clone() };
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            if mono.is_one() {
                write!(f, "{shown}")?;
            } else if shown.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{shown}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Scalar {
    /// Rendering wrapped in parentheses when it has more than one term or a
    /// leading sign, for use as a coefficient.
    pub fn to_coeff_string(&self) -> String {
        let s = self.to_string();
        if self.terms.len() > 1 || s.starts_with('-') {
            format!("({s})")
        } else {
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{arb_scalar, fixed_config};
    use proptest::prelude::*;

    fn alpha() -> Scalar {
        Scalar::param(Param::Alpha)
    }

    #[test]
    fn gaussian_norm() {
        let a = Scalar::one() + Scalar::i();
        let b = Scalar::one() - Scalar::i();
        assert_eq!(a * b, Scalar::from_int(2));
    }

    #[test]
    fn annihilator_and_cancellation() {
        assert!((alpha() * Scalar::zero()).is_zero());
        let b = Scalar::param(Param::B);
        let c = Scalar::param(Param::C);
        assert_eq!(&(&b + &c) - &b, c);
    }

    #[test]
    fn conjugation_fixes_parameters() {
        assert_eq!((Scalar::i() * alpha()).conj(), -(Scalar::i() * alpha()));
        assert_eq!(Scalar::ratio(3, 2).conj(), Scalar::ratio(3, 2));
        let nu = Scalar::param(Param::Nu);
        let two_plus_i = Scalar::from_int(2) + Scalar::i();
        let two_minus_i = Scalar::from_int(2) - Scalar::i();
        assert_eq!((&two_plus_i * &nu).conj(), two_minus_i * nu);
    }

    #[test]
    fn substitution() {
        let b = Scalar::param(Param::B);
        let c = Scalar::param(Param::C);
        let nu = Scalar::param(Param::Nu);
        let s = &b * &nu + &c;
        let sigma = BTreeMap::from([(Param::B, GaussRat::zero())]);
        assert_eq!(s.substitute(&sigma), c);

        let sigma = BTreeMap::from([(Param::Alpha, GaussRat::ratio(1, 2))]);
        assert_eq!(alpha().pow(2).substitute(&sigma), Scalar::ratio(1, 4));

        let bp = Scalar::param(Param::Bp);
        assert_eq!(bp.substitute(&BTreeMap::new()), bp);
    }

    #[test]
    fn zero_tests() {
        assert!(Scalar::zero().is_zero());
        assert!((alpha() - alpha()).is_zero());
        assert!(!(Scalar::from_int(2) * Scalar::one()).is_zero());
    }

    #[test]
    fn display_is_canonical() {
        let s = Scalar::ratio(-3, 2) * alpha().pow(2) + Scalar::i() * Scalar::param(Param::Xi(-3));
        assert_eq!(s.to_string(), "-3/2*alpha^2 + i*xi[-3]");
        let z = Scalar::ratio(1, 2) - Scalar::i();
        assert_eq!(z.to_string(), "(1/2-i)");
        assert_eq!(Scalar::zero().to_string(), "0");
    }

    #[test]
    fn xi_bound() {
        assert_eq!(Param::xi(64), Some(Param::Xi(64)));
        assert_eq!(Param::xi(-65), None);
    }

    #[test]
    fn split_linear_parts() {
        let bp = Scalar::param(Param::Bp);
        let s = &bp * &alpha() + Scalar::from_int(3);
        let (lin, rest) = s.split_linear(Param::Bp);
        assert_eq!(lin, alpha());
        assert_eq!(rest, Scalar::from_int(3));
    }

    proptest! {
        #![proptest_config(fixed_config(128))]

        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn conj_is_involutive_homomorphism(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }

        #[test]
        fn substitute_commutes_with_mul(a in arb_scalar(), b in arb_scalar(), v in -3i64..=3) {
            let sigma = BTreeMap::from([(Param::Alpha, GaussRat::ratio(v, 2)), (Param::Xi(1), GaussRat::i())]);
            prop_assert_eq!((&a * &b).substitute(&sigma), &a.substitute(&sigma) * &b.substitute(&sigma));
        }
    }
}
