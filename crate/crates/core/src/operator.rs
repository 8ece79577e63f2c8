//! Operators on circle Fourier modes.
//!
//! Words are kept in the normal order `E^m Xi^p D^k`, where `E` multiplies by
//! `e^{i theta}`, `D = -i d/dtheta` and `Xi` is an abstract diagonal operator
//! with `Xi|n> = xi[n]|n>`. The only rewrite needed is `D^k E^m = E^m (D+m)^k`.
//! Moving `Xi` past a nonzero power of `E` shifts its index, which has no
//! finite normal form; such products are deferred to ket evaluation through
//! [`OpExpr`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::classical::render_sum;
use crate::scalar::{forward_owned_binop, GaussRat, Param, Scalar, XI_INDEX_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("cannot normal-order Xi^{xi_power} past E^{shift}; evaluate against kets instead")]
    UnresolvedShift { xi_power: u32, shift: i64 },
    #[error("xi index {index} exceeds the bound {XI_INDEX_BOUND}")]
    XiIndexOverflow { index: i64 },
}

/// Normal-ordered word `E^m Xi^p D^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub m: i64,
    pub p: u32,
    pub k: u32,
}

impl Word {
    pub const IDENTITY: Word = Word { m: 0, p: 0, k: 0 };

    pub const fn new(m: i64, p: u32, k: u32) -> Self {
        Self { m, p, k }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut atoms = Vec::new();
        if self.m != 0 {
            atoms.push(format!("E[{}]", self.m));
        }
        match self.p {
            0 => {}
            1 => atoms.push("Xi".into()),
            p => atoms.push(format!("Xi^{p}")),
        }
        match self.k {
            0 => {}
            1 => atoms.push("D".into()),
            k => atoms.push(format!("D^{k}")),
        }
        if atoms.is_empty() {
            f.write_str("I")
        } else {
            f.write_str(&atoms.join("*"))
        }
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut acc: i64 = 1;
    for j in 0..k as i64 {
        acc = acc * (n as i64 - j) / (j + 1);
    }
    acc
}

/// A finite combination of normal-ordered words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperatorElement {
    terms: BTreeMap<Word, Scalar>,
}

impl OperatorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        Self::term(Word::IDENTITY, s)
    }

    pub fn term(word: Word, coeff: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(word, coeff);
        out
    }

    pub fn word(m: i64, p: u32, k: u32) -> Self {
        Self::term(Word::new(m, p, k), Scalar::one())
    }

    /// `E^m`.
    pub fn e(m: i64) -> Self {
        Self::word(m, 0, 0)
    }

    /// `D = -i d/dtheta`.
    pub fn d() -> Self {
        Self::word(0, 0, 1)
    }

    /// The abstract diagonal operator `Xi`.
    pub fn xi() -> Self {
        Self::word(0, 1, 0)
    }

    /// `D + shift`, e.g. `Q(l) = D + nu`.
    pub fn d_plus(shift: &Scalar) -> Self {
        Self::d() + Self::scalar(shift.clone())
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Scalar)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (w, c) in iter {
            out.add_term(w, c);
        }
        out
    }

    fn add_term(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(existing) => {
                *existing += &coeff;
                if existing.is_zero() {
                    self.terms.remove(&word);
                }
            }
            None => {
                self.terms.insert(word, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: Word) -> Scalar {
        self.terms.get(&word).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn contains_xi(&self) -> bool {
        self.terms.keys().any(|w| w.p > 0)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (*w, c * s)))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (*w, f(c))))
    }

    /// Normal-ordered product, failing only when an `Xi` would have to pass
    /// a nonzero power of `E`.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self, OpError> {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                if a.p > 0 && b.m != 0 {
                    return Err(OpError::UnresolvedShift { xi_power: a.p, shift: b.m });
                }
                // E^a Xi^p D^k E^b Xi^q D^j = E^{a+b} Xi^{p+q} (D+b)^k D^j
                let coeff = ca * cb;
                for j in 0..=a.k {
                    let factor = binomial(a.k, j) as i128 * (b.m as i128).pow(a.k - j);
                    if factor == 0 {
                        continue;
                    }
                    let factor = i64::try_from(factor).expect("binomial factor fits in i64");
                    out.add_term(
                        Word::new(a.m + b.m, a.p + b.p, j + b.k),
                        &coeff * &Scalar::from_int(factor),
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn try_commutator(&self, rhs: &Self) -> Result<Self, OpError> {
        Ok(self.try_mul(rhs)? - rhs.try_mul(self)?)
    }

    /// `[A, B] = AB - BA`.
    ///
    /// # Panics
    /// If either product needs an `Xi` index shift; use [`Self::try_commutator`].
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.try_commutator(rhs).expect("commutator of shift-free operators")
    }

    pub fn try_pow(&self, exp: u32) -> Result<Self, OpError> {
        let mut acc = Self::identity();
        for _ in 0..exp {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// # Panics
    /// As [`Self::commutator`].
    pub fn pow(&self, exp: u32) -> Self {
        self.try_pow(exp).expect("power of a shift-free operator")
    }

    /// Formal adjoint: `(c E^m Xi^p D^k)^dagger = conj(c) D^k Xi^p E^{-m}`,
    /// with every parameter (including `xi[n]`) real.
    pub fn adjoint(&self) -> Result<Self, OpError> {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            if w.p > 0 && w.m != 0 {
                return Err(OpError::UnresolvedShift { xi_power: w.p, shift: -w.m });
            }
            let dk = Self::word(0, 0, w.k);
            let rest = Self::word(-w.m, w.p, 0);
            // D^k Xi^p = Xi^p D^k, so reorder as Xi^p (D^k E^{-m})
            let moved = if w.p > 0 {
                rest.try_mul(&dk)?
            } else {
                dk.try_mul(&rest)?
            };
            out += &moved.scale(&c.conj());
        }
        Ok(out)
    }

    /// Action on kets: `E^m Xi^p D^k |n> = n^k xi[n]^p |n+m>`.
    pub fn apply_ket(&self, ket: &KetCombination) -> Result<KetCombination, OpError> {
        let mut out = KetCombination::zero();
        for (n, cn) in ket.terms() {
            for (w, c) in &self.terms {
                let mut coeff = c * cn;
                if w.k > 0 {
                    coeff = &coeff * &Scalar::from_int(n.pow(w.k));
                }
                if w.p > 0 {
                    let xi = Param::xi(*n).ok_or(OpError::XiIndexOverflow { index: *n })?;
                    coeff = &coeff * &Scalar::param(xi).pow(w.p);
                }
                out.add(n + w.m, &coeff);
            }
        }
        Ok(out)
    }

    pub fn apply_basis(&self, n: i64) -> Result<KetCombination, OpError> {
        self.apply_ket(&KetCombination::basis(n))
    }

    /// `<bra| A |ket>`.
    pub fn matrix_element(&self, bra: i64, ket: i64) -> Result<Scalar, OpError> {
        Ok(self.apply_basis(ket)?.coeff(bra))
    }

    /// Substitutes parameters in every coefficient.
    pub fn substitute(&self, assignment: &BTreeMap<Param, GaussRat>) -> Self {
        self.map_coeffs(|c| c.substitute(assignment))
    }

    pub fn substitute_scalar(&self, assignment: &BTreeMap<Param, Scalar>) -> Self {
        self.map_coeffs(|c| c.substitute_scalar(assignment))
    }

    /// Rewrites the element as a polynomial in `L = D + shift`:
    /// returns `(m, p, j) -> coefficient` of `E^m Xi^p L^j`.
    pub fn in_shifted_d(&self, shift: &Scalar) -> BTreeMap<Word, Scalar> {
        // D^k = (L - shift)^k
        let mut out: BTreeMap<Word, Scalar> = BTreeMap::new();
        let minus = -shift;
        for (w, c) in &self.terms {
            for j in 0..=w.k {
                let coeff = &(c * &Scalar::from_int(binomial(w.k, j))) * &minus.pow(w.k - j);
                let key = Word::new(w.m, w.p, j);
                let entry = out.entry(key).or_default();
                *entry += &coeff;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

impl fmt::Display for OperatorElement {
    /// Parseable rendering, e.g. `E[1]*D + (1/2-i)*E[-1] + nu`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.terms.iter().map(|(w, c)| {
            let atom = if *w == Word::IDENTITY { String::new() } else { w.to_string() };
            (atom, c.clone())
        });
        f.write_str(&render_sum(parts))
    }
}

impl AddAssign<&OperatorElement> for OperatorElement {
    fn add_assign(&mut self, rhs: &OperatorElement) {
        for (w, c) in &rhs.terms {
            self.add_term(*w, c.clone());
        }
    }
}

impl SubAssign<&OperatorElement> for OperatorElement {
    fn sub_assign(&mut self, rhs: &OperatorElement) {
        for (w, c) in &rhs.terms {
            self.add_term(*w, -c);
        }
    }
}

impl Add for &OperatorElement {
    type Output = OperatorElement;
    fn add(self, rhs: &OperatorElement) -> OperatorElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &OperatorElement {
    type Output = OperatorElement;
    fn sub(self, rhs: &OperatorElement) -> OperatorElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &OperatorElement {
    type Output = OperatorElement;
    /// # Panics
    /// When an `Xi` index shift is required; see [`OperatorElement::try_mul`].
    fn mul(self, rhs: &OperatorElement) -> OperatorElement {
        self.try_mul(rhs).expect("product of shift-free operators")
    }
}

impl Neg for &OperatorElement {
    type Output = OperatorElement;
    fn neg(self) -> OperatorElement {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for OperatorElement {
    type Output = OperatorElement;
    fn neg(self) -> OperatorElement {
        -&self
    }
}

forward_owned_binop!(OperatorElement, Add, add);
forward_owned_binop!(OperatorElement, Sub, sub);
forward_owned_binop!(OperatorElement, Mul, mul);

/// A finite combination of orthonormal basis kets `|n>`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KetCombination {
    terms: BTreeMap<i64, Scalar>,
}

impl KetCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(n: i64) -> Self {
        let mut out = Self::zero();
        out.add(n, &Scalar::one());
        out
    }

    pub fn add(&mut self, n: i64, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(n).or_default();
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&n);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, n: i64) -> Scalar {
        self.terms.get(&n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero();
        for (n, c) in &self.terms {
            out.add(*n, &(c * s));
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, c) in &other.terms {
            out.add(*n, c);
        }
        out
    }
}

impl fmt::Display for KetCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.terms.iter().map(|(n, c)| (format!("|{n}>"), c.clone()));
        f.write_str(&render_sum(parts))
    }
}

/// An unevaluated operator expression, applied to kets from the right.
///
/// This is the route for expressions whose normal form would need `Xi` to
/// move past `E`, such as nested commutators of `Xi` with `Q(sin)`.
#[derive(Clone, Debug, PartialEq)]
pub enum OpExpr {
    Leaf(OperatorElement),
    Sum(Vec<OpExpr>),
    Product(Vec<OpExpr>),
    Scale(Scalar, Box<OpExpr>),
    Commutator(Box<OpExpr>, Box<OpExpr>),
    Adjoint(Box<OpExpr>),
}

impl OpExpr {
    pub fn leaf(op: OperatorElement) -> Self {
        OpExpr::Leaf(op)
    }

    pub fn comm(a: OpExpr, b: OpExpr) -> Self {
        OpExpr::Commutator(Box::new(a), Box::new(b))
    }

    pub fn scaled(s: Scalar, a: OpExpr) -> Self {
        OpExpr::Scale(s, Box::new(a))
    }

    /// Normal form, when one exists.
    pub fn normal_form(&self) -> Result<OperatorElement, OpError> {
        match self {
            OpExpr::Leaf(op) => Ok(op.clone()),
            OpExpr::Sum(items) => items.iter().try_fold(OperatorElement::zero(), |acc, e| {
                Ok(acc + e.normal_form()?)
            }),
            OpExpr::Product(items) => items
                .iter()
                .try_fold(OperatorElement::identity(), |acc, e| acc.try_mul(&e.normal_form()?)),
            OpExpr::Scale(s, e) => Ok(e.normal_form()?.scale(s)),
            OpExpr::Commutator(a, b) => a.normal_form()?.try_commutator(&b.normal_form()?),
            OpExpr::Adjoint(a) => a.normal_form()?.adjoint(),
        }
    }

    pub fn apply_ket(&self, ket: &KetCombination) -> Result<KetCombination, OpError> {
        match self {
            OpExpr::Leaf(op) => op.apply_ket(ket),
            OpExpr::Sum(items) => items.iter().try_fold(KetCombination::zero(), |acc, e| {
                Ok(acc.plus(&e.apply_ket(ket)?))
            }),
            OpExpr::Product(items) => items
                .iter()
                .rev()
                .try_fold(ket.clone(), |acc, e| e.apply_ket(&acc)),
            OpExpr::Scale(s, e) => Ok(e.apply_ket(ket)?.scale(s)),
            OpExpr::Commutator(a, b) => {
                let ab = a.apply_ket(&b.apply_ket(ket)?)?;
                let ba = b.apply_ket(&a.apply_ket(ket)?)?;
                Ok(ab.plus(&ba.scale(&-Scalar::one())))
            }
            OpExpr::Adjoint(a) => a.normal_form()?.adjoint()?.apply_ket(ket),
        }
    }

    pub fn matrix_element(&self, bra: i64, ket: i64) -> Result<Scalar, OpError> {
        Ok(self.apply_ket(&KetCombination::basis(ket))?.coeff(bra))
    }
}

impl From<OperatorElement> for OpExpr {
    fn from(op: OperatorElement) -> Self {
        OpExpr::Leaf(op)
    }
}
