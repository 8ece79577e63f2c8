//! Finite-cutoff Poisson subalgebras.
//!
//! Elements live in the box `r <= max_deg`, `|m| <= max_harm`. A closure is
//! the least subspace of the box containing the generators and every bracket
//! of two of its vectors that stays inside the box. Brackets leaving the box
//! are dropped whole, so a negative membership verdict only means "not found
//! at this cutoff".

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::classical::{ClassicalElement, Mono};
use crate::scalar::{GaussRat, Param, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubalgebraError {
    #[error("{mono} lies outside the cutoff box {cutoff}")]
    OutsideCutoff { mono: Mono, cutoff: Cutoff },
    #[error("coefficient {coeff} is not an instantiated constant")]
    NotInstantiated { coeff: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cutoff {
    pub max_deg: u32,
    pub max_harm: i64,
}

impl Cutoff {
    pub fn new(max_deg: u32, max_harm: i64) -> Self {
        Cutoff { max_deg, max_harm }
    }

    pub fn contains(&self, mono: Mono) -> bool {
        mono.r <= self.max_deg && mono.m.abs() <= self.max_harm
    }

    pub fn dimension(&self) -> usize {
        (self.max_deg as usize + 1) * (2 * self.max_harm as usize + 1)
    }

    fn width(&self) -> usize {
        2 * self.max_harm as usize + 1
    }

    /// Columns run over degree from high to low, then harmonic upward.
    fn column(&self, mono: Mono) -> usize {
        (self.max_deg - mono.r) as usize * self.width() + (mono.m + self.max_harm) as usize
    }

    fn mono(&self, col: usize) -> Mono {
        let w = self.width();
        Mono {
            r: self.max_deg - (col / w) as u32,
            m: (col % w) as i64 - self.max_harm,
        }
    }

    /// Every monomial of the box, in column order.
    pub fn monomials(&self) -> Vec<Mono> {
        (0..self.dimension()).map(|c| self.mono(c)).collect()
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.max_deg, self.max_harm)
    }
}

type Row = Vec<GaussRat>;

fn instantiate(f: &ClassicalElement, cutoff: Cutoff) -> Result<Option<Row>, SubalgebraError> {
    let mut row = vec![GaussRat::zero(); cutoff.dimension()];
    for (mono, c) in f.terms() {
        let c = c.as_constant().ok_or_else(|| SubalgebraError::NotInstantiated { coeff: c.to_string() })?;
        if !cutoff.contains(*mono) {
            return Ok(None);
        }
        row[cutoff.column(*mono)] = c;
    }
    Ok(Some(row))
}

fn pivot(row: &Row) -> Option<usize> {
    row.iter().position(|c| !c.is_zero())
}

/// A reduced row-echelon basis of a subspace of the cutoff box.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredBasis {
    cutoff: Cutoff,
    rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// Coefficients on the basis vectors, by row index.
    CertifiedIn(Vec<(usize, GaussRat)>),
    /// The nonzero remainder after reduction.
    NotFoundAtCutoff(ClassicalElement),
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::CertifiedIn(_))
    }
}

impl FilteredBasis {
    pub fn empty(cutoff: Cutoff) -> Self {
        FilteredBasis {
            cutoff,
            rows: Vec::new(),
        }
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<Mono> {
        self.rows
            .iter()
            .map(|r| self.cutoff.mono(pivot(r).expect("nonzero row")))
            .collect()
    }

    pub fn vectors(&self) -> Vec<ClassicalElement> {
        self.rows.iter().map(|r| self.element(r)).collect()
    }

    fn element(&self, row: &Row) -> ClassicalElement {
        ClassicalElement::from_terms(
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(col, c)| (self.cutoff.mono(col), Scalar::constant(c.clone()))),
        )
    }

    /// Reduces against the basis; returns the remainder and the multipliers.
    fn reduce(&self, row: &Row) -> (Row, Vec<(usize, GaussRat)>) {
        let mut rest = row.clone();
        let mut used = Vec::new();
        for (idx, b) in self.rows.iter().enumerate() {
            let p = pivot(b).expect("nonzero row");
            if rest[p].is_zero() {
                continue;
            }
            let f = rest[p].clone();
            for (x, y) in rest.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
            used.push((idx, f));
        }
        (rest, used)
    }

    /// Adds a row if independent, keeping the basis fully reduced.
    fn insert(&mut self, row: &Row) -> bool {
        let (mut rest, _) = self.reduce(row);
        let Some(p) = pivot(&rest) else { return false };
        let inv = rest[p].inv().expect("nonzero pivot");
        for x in rest.iter_mut() {
            *x = &*x * &inv;
        }
        for b in self.rows.iter_mut() {
            if !b[p].is_zero() {
                let f = b[p].clone();
                for (x, y) in b.iter_mut().zip(&rest) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        let at = self.rows.partition_point(|b| pivot(b) < Some(p));
        self.rows.insert(at, rest);
        true
    }

    pub fn member(&self, f: &ClassicalElement) -> Result<Membership, SubalgebraError> {
        let row = match instantiate(f, self.cutoff)? {
            Some(row) => row,
            None => {
                let mono = f.terms().map(|(m, _)| *m).find(|m| !self.cutoff.contains(*m)).unwrap();
                return Err(SubalgebraError::OutsideCutoff { mono, cutoff: self.cutoff });
            }
        };
        let (rest, used) = self.reduce(&row);
        if pivot(&rest).is_none() {
            Ok(Membership::CertifiedIn(used))
        } else {
            Ok(Membership::NotFoundAtCutoff(self.element(&rest)))
        }
    }

    /// Whether every monomial of the box is in the span.
    pub fn is_full(&self) -> bool {
        self.dim() == self.cutoff.dimension()
    }
}

/// Bracket closure of `generators` inside `cutoff`, after substituting
/// `assignment` into their coefficients.
pub fn closure(
    generators: &[ClassicalElement],
    cutoff: Cutoff,
    assignment: &BTreeMap<Param, GaussRat>,
) -> Result<FilteredBasis, SubalgebraError> {
    let mut basis = FilteredBasis::empty(cutoff);
    let mut found: Vec<ClassicalElement> = Vec::new();
    for g in generators {
        let g = substitute(g, assignment);
        let row = instantiate(&g, cutoff)?.ok_or_else(|| SubalgebraError::OutsideCutoff {
            mono: g.terms().map(|(m, _)| *m).find(|m| !cutoff.contains(*m)).unwrap(),
            cutoff,
        })?;
        if basis.insert(&row) {
            found.push(g);
        }
    }
    let mut i = 0;
    while i < found.len() {
        for j in 0..i {
            let b = found[i].bracket(&found[j]);
            if let Some(row) = instantiate(&b, cutoff)? {
                if basis.insert(&row) {
                    found.push(b);
                }
            }
        }
        i += 1;
    }
    Ok(basis)
}

fn substitute(f: &ClassicalElement, assignment: &BTreeMap<Param, GaussRat>) -> ClassicalElement {
    f.map_coeffs(|c| c.substitute(assignment))
}

/// `{1, e^0_1, e^0_-1, e^1_0}`.
pub fn b_complex() -> Vec<ClassicalElement> {
    vec![
        ClassicalElement::one(),
        ClassicalElement::mono(0, 1),
        ClassicalElement::mono(0, -1),
        ClassicalElement::mono(1, 0),
    ]
}

/// `e^0_m` and `e^1_m` for `|m| <= max_harm`.
pub fn p1_basis(max_harm: i64) -> Vec<ClassicalElement> {
    (0..=1)
        .flat_map(|r| (-max_harm..=max_harm).map(move |m| ClassicalElement::mono(r, m)))
        .collect()
}

/// `e^2_n + 2 alpha e^1_n` with formal `alpha`.
pub fn walpha_generator(n: i64) -> ClassicalElement {
    let two_alpha = Scalar::from_int(2) * Scalar::param(Param::Alpha);
    ClassicalElement::mono(2, n) + ClassicalElement::mono(1, n).scale(&two_alpha)
}

/// `B` together with the `W_alpha` generators of odd harmonic `|n| <= max_harm`.
pub fn walpha_generators(max_harm: i64) -> Vec<ClassicalElement> {
    let mut gens = b_complex();
    gens.extend((-max_harm..=max_harm).filter(|n| n % 2 != 0).map(walpha_generator));
    gens
}

pub fn alpha_assignment(alpha: GaussRat) -> BTreeMap<Param, GaussRat> {
    BTreeMap::from([(Param::Alpha, alpha)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub r: u32,
    pub seed: i64,
    pub cutoff_m: i64,
    pub reached: BTreeSet<i64>,
    /// `(m, k)` with `L_k(e^r_m) = 0` although `m + k` is in range.
    pub vanishing_steps: Vec<(i64, i64)>,
    /// The seed is annihilated by every ladder operator.
    pub seed_fixed: bool,
}

impl ProbeReport {
    pub fn missing(&self) -> Vec<i64> {
        (-self.cutoff_m..=self.cutoff_m).filter(|m| !self.reached.contains(m)).collect()
    }

    pub fn complete(&self) -> bool {
        self.missing().is_empty()
    }
}

/// Breadth-first search over `e^r_m`, `|m| <= cutoff_m`, along the ladder
/// operators `L_k`, `|k| <= cutoff_m`.
pub fn irreducibility_probe(r: u32, seed: i64, cutoff_m: i64) -> ProbeReport {
    let mut reached = BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    let mut vanishing_steps = Vec::new();
    let mut seed_fixed = true;
    while let Some(m) = queue.pop_front() {
        for k in -cutoff_m..=cutoff_m {
            let target = m + k;
            if k == 0 || target.abs() > cutoff_m {
                continue;
            }
            let image = ClassicalElement::mono(r, m).ladder(k);
            if image.is_zero() {
                vanishing_steps.push((m, k));
                continue;
            }
            if m == seed {
                seed_fixed = false;
            }
            if reached.insert(target) {
                queue.push_back(target);
            }
        }
    }
    ProbeReport {
        r,
        seed,
        cutoff_m,
        reached,
        vanishing_steps,
        seed_fixed,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingTerm {
    pub r: u32,
    pub n: i64,
    /// A span element with the required two top components, when found.
    pub witness: Option<ClassicalElement>,
}

/// For each `(r, N)` of opposite parity in the box, looks for a span element
/// whose degree-`r` part is `e^r_N` and whose degree-`(r-1)` part is
/// `r alpha e^(r-1)_N`.
pub fn leading_term_scan(basis: &FilteredBasis, alpha: &GaussRat) -> Vec<LeadingTerm> {
    let cutoff = basis.cutoff;
    let mut out = Vec::new();
    for r in 0..=cutoff.max_deg {
        for n in -cutoff.max_harm..=cutoff.max_harm {
            if (r as i64 + n).rem_euclid(2) == 0 {
                continue;
            }
            out.push(LeadingTerm {
                r,
                n,
                witness: leading_pair(basis, r, n, alpha),
            });
        }
    }
    out
}

fn leading_pair(basis: &FilteredBasis, r: u32, n: i64, alpha: &GaussRat) -> Option<ClassicalElement> {
    let cutoff = basis.cutoff;
    let top = |mono: Mono| mono.r == r || (r > 0 && mono.r == r - 1);
    let cols: Vec<usize> = (0..cutoff.dimension()).filter(|c| top(cutoff.mono(*c))).collect();
    // Rows with a pivot of degree <= r have no components above degree r.
    let rows: Vec<&Row> = basis
        .rows
        .iter()
        .filter(|row| cutoff.mono(pivot(row).unwrap()).r <= r)
        .collect();
    let mut target = vec![GaussRat::zero(); cols.len()];
    let pos = |mono: Mono| cols.iter().position(|c| *c == cutoff.column(mono)).unwrap();
    target[pos(Mono { r, m: n })] = GaussRat::one();
    if r > 0 {
        target[pos(Mono { r: r - 1, m: n })] = &GaussRat::from_int(r as i64) * alpha;
    }
    // Solve sum x_j rows[j]|cols = target by elimination on the transpose.
    let projected: Vec<Row> = rows.iter().map(|row| cols.iter().map(|c| row[*c].clone()).collect()).collect();
    let x = solve_combination(&projected, &target)?;
    let mut result = ClassicalElement::zero();
    for (row, coeff) in rows.iter().zip(&x) {
        if !coeff.is_zero() {
            result += &basis.element(row).scale(&Scalar::constant(coeff.clone()));
        }
    }
    Some(result)
}

/// Finds `x` with `sum_j x_j vectors[j] = target`, if one exists.
fn solve_combination(vectors: &[Row], target: &Row) -> Option<Vec<GaussRat>> {
    let n = vectors.len();
    let dim = target.len();
    // Augmented matrix: one equation per coordinate.
    let mut m: Vec<Vec<GaussRat>> = (0..dim)
        .map(|i| {
            let mut eq: Vec<GaussRat> = vectors.iter().map(|v| v[i].clone()).collect();
            eq.push(target[i].clone());
            eq
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..dim).find(|i| !m[*i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].inv().unwrap();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..dim {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|eq| !eq[n].is_zero()) {
        return None;
    }
    let mut x = vec![GaussRat::zero(); n];
    for (i, col) in pivots.iter().enumerate() {
        x[*col] = m[i][n].clone();
    }
    Some(x)
}
