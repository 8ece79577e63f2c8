//! The complexified polynomial Poisson algebra of the cylinder.
//!
//! Elements are finite sums of monomials `e^r_m = l^r e^{i m theta}` with
//! [`Scalar`] coefficients. The canonical bracket is monomial in this basis:
//! `{e^r_m, e^s_n} = i(rn - ms) e^{r+s-1}_{m+n}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::scalar::{forward_owned_binop, GaussRat, Scalar};

/// The monomial `e^r_m = l^r e^{i m theta}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub r: u32,
    pub m: i64,
}

impl Mono {
    pub const fn new(r: u32, m: i64) -> Self {
        Self { r, m }
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^{}_{}", self.r, self.m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("harmonic {target} is absent from the element")]
    TargetAbsent { target: i64 },
    #[error("element is not homogeneous in l")]
    NotHomogeneous,
}

/// An element of the complexified polynomial Poisson algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassicalElement {
    terms: BTreeMap<Mono, Scalar>,
}

impl ClassicalElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(s: Scalar) -> Self {
        Self::term(Mono::new(0, 0), s)
    }

    pub fn term(mono: Mono, coeff: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(mono, coeff);
        out
    }

    /// `e^r_m` with unit coefficient.
    pub fn mono(r: u32, m: i64) -> Self {
        Self::term(Mono::new(r, m), Scalar::one())
    }

    /// `l`.
    pub fn ell() -> Self {
        Self::mono(1, 0)
    }

    /// `l^r`.
    pub fn ell_pow(r: u32) -> Self {
        Self::mono(r, 0)
    }

    /// `cos(k theta) = (e_k + e_{-k}) / 2`.
    pub fn cos(k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        let half = Scalar::ratio(1, 2);
        Self::term(Mono::new(0, k), half.clone()) + Self::term(Mono::new(0, -k), half)
    }

    /// `sin(k theta) = (e_k - e_{-k}) / (2i)`.
    pub fn sin(k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        // 1/(2i) = -i/2
        let c = Scalar::i() * Scalar::ratio(-1, 2);
        Self::term(Mono::new(0, k), c.clone()) + Self::term(Mono::new(0, -k), -c)
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Scalar)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (m, c) in iter {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, mono: Mono, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                *existing += &coeff;
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: Mono) -> Scalar {
        self.terms.get(&mono).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The largest monomial in `(r, m)` order.
    pub fn leading(&self) -> Option<(Mono, &Scalar)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c * s)))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// `{f, g} = df/dl dg/dtheta - df/dtheta dg/dl`.
    pub fn bracket(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let factor = a.r as i64 * b.m - a.m * b.r as i64;
                if factor == 0 {
                    continue;
                }
                let coeff = &(ca * cb) * &Scalar::constant(&GaussRat::i() * &GaussRat::from_int(factor));
                out.add_term(Mono::new(a.r + b.r - 1, a.m + b.m), coeff);
            }
        }
        out
    }

    /// Complex conjugate: `coeff(r, m) -> conj(coeff(r, -m))`.
    pub fn conj(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(mono, c)| (Mono::new(mono.r, -mono.m), c.conj())),
        )
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Degree in `l`; `None` for the zero element.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.r).max()
    }

    pub fn homogeneous_part(&self, r: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.r == r)
                .map(|(m, c)| (*m, c.clone())),
        )
    }

    pub fn harmonic_part(&self, harmonic: i64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.m == harmonic)
                .map(|(m, c)| (*m, c.clone())),
        )
    }

    /// Distinct harmonics present, ascending.
    pub fn harmonics(&self) -> Vec<i64> {
        let mut hs: Vec<i64> = self.terms.keys().map(|m| m.m).collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }

    /// Ladder endomorphism `L_k = {l cos k theta, .} + i {l sin k theta, .}`,
    /// acting as `L_k(e^r_m) = i(m - k r) e^r_{m+k}`.
    pub fn ladder(&self, k: i64) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(mono, c)| {
            let factor = mono.m - k * mono.r as i64;
            (factor != 0).then(|| {
                (
                    Mono::new(mono.r, mono.m + k),
                    c * &Scalar::constant(&GaussRat::i() * &GaussRat::from_int(factor)),
                )
            })
        }))
    }

    /// Strips every harmonic except `target` with `p -> L_0(p) - i M p`.
    ///
    /// The result is a nonzero multiple of `e^r_target` for homogeneous `p`.
    pub fn eliminate_to_monomial(&self, target: i64) -> Result<Self, ClassicalError> {
        let degree = self.degree().ok_or(ClassicalError::TargetAbsent { target })?;
        if self.homogeneous_part(degree) != *self {
            return Err(ClassicalError::NotHomogeneous);
        }
        if self.harmonic_part(target).is_zero() {
            return Err(ClassicalError::TargetAbsent { target });
        }
        let mut p = self.clone();
        // each pass removes exactly one harmonic
        for _ in 0..self.harmonics().len() {
            let Some(other) = p.harmonics().into_iter().find(|&h| h != target) else {
                break;
            };
            let shift = Scalar::constant(&GaussRat::i() * &GaussRat::from_int(other));
            p = p.ladder(0) - p.scale(&shift);
        }
        Ok(p)
    }

    /// Rendering in `sin[k]`/`cos[k]` form, pairing `e^r_m` with `e^r_{-m}`.
    pub fn to_trig_string(&self) -> String {
        let mut parts: Vec<(String, Scalar)> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (mono, c) in &self.terms {
            if seen.contains(mono) {
                continue;
            }
            let lpart = match mono.r {
                0 => String::new(),
                1 => "l".to_string(),
                r => format!("l^{r}"),
            };
            let join = |a: &str, b: &str| match (a.is_empty(), b.is_empty()) {
                (true, true) => String::new(),
                (true, false) => b.to_string(),
                (false, true) => a.to_string(),
                (false, false) => format!("{a}*{b}"),
            };
            if mono.m == 0 {
                parts.push((lpart, c.clone()));
                seen.insert(*mono);
                continue;
            }
            let k = mono.m.abs();
            let plus = self.coeff(Mono::new(mono.r, k));
            let minus = self.coeff(Mono::new(mono.r, -k));
            seen.insert(Mono::new(mono.r, k));
            seen.insert(Mono::new(mono.r, -k));
            let cos_c = &plus + &minus;
            let sin_c = &Scalar::i() * &(&plus - &minus);
            let trig = |name: &str| if k == 1 { name.to_string() } else { format!("{name}[{k}]") };
            if !cos_c.is_zero() {
                parts.push((join(&lpart, &trig("cos")), cos_c));
            }
            if !sin_c.is_zero() {
                parts.push((join(&lpart, &trig("sin")), sin_c));
            }
        }
        render_sum(parts.into_iter())
    }
}

/// Joins `(atom, coefficient)` pairs as a parseable sum.
pub(crate) fn render_sum(parts: impl Iterator<Item = (String, Scalar)>) -> String {
    let rendered: Vec<String> = parts
        .map(|(atom, c)| match (atom.is_empty(), c.is_one()) {
            (true, _) => c.to_coeff_string(),
            (false, true) => atom,
            (false, false) if (-&c).is_one() => format!("-{atom}"),
            (false, false) => format!("{}*{}", c.to_coeff_string(), atom),
        })
        .collect();
    if rendered.is_empty() {
        "0".to_string()
    } else {
        rendered.join(" + ")
    }
}

impl fmt::Display for ClassicalElement {
    /// Parseable rendering in the exponential basis, e.g. `2*l*E[1] + -i*E[-1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.terms.iter().map(|(mono, c)| {
            let mut atoms = Vec::new();
            match mono.r {
                0 => {}
                1 => atoms.push("l".to_string()),
                r => atoms.push(format!("l^{r}")),
            }
            if mono.m != 0 {
                atoms.push(format!("E[{}]", mono.m));
            }
            (atoms.join("*"), c.clone())
        });
        f.write_str(&render_sum(parts))
    }
}

impl From<Scalar> for ClassicalElement {
    fn from(s: Scalar) -> Self {
        ClassicalElement::constant(s)
    }
}

impl AddAssign<&ClassicalElement> for ClassicalElement {
    fn add_assign(&mut self, rhs: &ClassicalElement) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&ClassicalElement> for ClassicalElement {
    fn sub_assign(&mut self, rhs: &ClassicalElement) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c);
        }
    }
}

impl Add for &ClassicalElement {
    type Output = ClassicalElement;
    fn add(self, rhs: &ClassicalElement) -> ClassicalElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &ClassicalElement {
    type Output = ClassicalElement;
    fn sub(self, rhs: &ClassicalElement) -> ClassicalElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &ClassicalElement {
    type Output = ClassicalElement;
    fn mul(self, rhs: &ClassicalElement) -> ClassicalElement {
        let mut out = ClassicalElement::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(Mono::new(a.r + b.r, a.m + b.m), ca * cb);
            }
        }
        out
    }
}

impl Neg for &ClassicalElement {
    type Output = ClassicalElement;
    fn neg(self) -> ClassicalElement {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for ClassicalElement {
    type Output = ClassicalElement;
    fn neg(self) -> ClassicalElement {
        -&self
    }
}

forward_owned_binop!(ClassicalElement, Add, add);
forward_owned_binop!(ClassicalElement, Sub, sub);
forward_owned_binop!(ClassicalElement, Mul, mul);
