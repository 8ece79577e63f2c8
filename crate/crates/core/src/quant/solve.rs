use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::operator::{OperatorElement, Word};
use crate::scalar::{GaussRat, Param, Scalar};

/// One scalar equation `equation = 0`, labelled by the word it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub source: Word,
    pub equation: Scalar,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} = 0", self.source, self.equation)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSet {
    pub unknowns: Vec<Param>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("constraint {0} is not linear in the unknowns")]
    Nonlinear(Constraint),
    #[error("constraint {0} only admits a non-constant pivot")]
    ParametricPivot(Constraint),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Unique,
    Underdetermined,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    /// Solved unknowns, possibly in terms of free unknowns.
    pub assignment: BTreeMap<Param, Scalar>,
    pub free: Vec<Param>,
    /// Leftover equations on the non-unknown parameters alone.
    pub conditions: Vec<Constraint>,
    /// For an inconsistent system, an equation reduced to `c = 0`, `c != 0`.
    pub certificate: Option<Constraint>,
}

/// Every coefficient of `residual = 0`, in word order.
pub fn extract_constraints(residual: &OperatorElement, unknowns: &[Param]) -> ConstraintSet {
    ConstraintSet {
        unknowns: unknowns.to_vec(),
        constraints: residual
            .terms()
            .map(|(w, c)| Constraint {
                source: *w,
                equation: c.clone(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug)]
struct Row {
    source: Word,
    coeffs: BTreeMap<Param, Scalar>,
    constant: Scalar,
}

impl Row {
    fn parse(c: &Constraint, unknowns: &[Param]) -> Result<Row, SolveError> {
        let mut coeffs: BTreeMap<Param, Scalar> = BTreeMap::new();
        let mut constant = Scalar::zero();
        for (mono, coeff) in c.equation.terms() {
            match mono.total_degree_in(unknowns) {
                0 => constant += &Scalar::from_terms([(mono.clone(), coeff.clone())]),
                1 => {
                    let u = *unknowns.iter().find(|u| mono.exponent(**u) == 1).unwrap();
                    let rest = Scalar::from_terms([(mono.without(u), coeff.clone())]);
                    *coeffs.entry(u).or_insert_with(Scalar::zero) += &rest;
                }
                _ => return Err(SolveError::Nonlinear(c.clone())),
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(Row {
            source: c.source,
            coeffs,
            constant,
        })
    }

    fn scale(&mut self, s: &Scalar) {
        for v in self.coeffs.values_mut() {
            *v = &*v * s;
        }
        self.constant = &self.constant * s;
    }

    /// `self -= factor * other`.
    fn eliminate(&mut self, factor: &Scalar, other: &Row) {
        for (u, v) in &other.coeffs {
            let entry = self.coeffs.entry(*u).or_insert_with(Scalar::zero);
            *entry -= &(factor * v);
        }
        self.coeffs.retain(|_, v| !v.is_zero());
        self.constant -= &(factor * &other.constant);
    }

    fn to_constraint(&self) -> Constraint {
        let mut eq = self.constant.clone();
        for (u, v) in &self.coeffs {
            eq += &(v * &Scalar::param(*u));
        }
        Constraint {
            source: self.source,
            equation: eq,
        }
    }
}

/// Gauss-Jordan elimination over the polynomial coefficient ring, pivoting
/// only on constant coefficients.
pub fn solve_linear(set: &ConstraintSet) -> Result<Solution, SolveError> {
    let unknowns = &set.unknowns;
    // All parameters are real, so each equation splits into two.
    let mut rows = Vec::new();
    for c in &set.constraints {
        for part in [c.equation.re(), c.equation.im()] {
            if !part.is_zero() {
                let real = Constraint {
                    source: c.source,
                    equation: part,
                };
                rows.push(Row::parse(&real, unknowns).map_err(|_| SolveError::Nonlinear(c.clone()))?);
            }
        }
    }
    let mut pivots: Vec<(Param, Row)> = Vec::new();

    loop {
        let found = rows.iter().enumerate().find_map(|(idx, row)| {
            row.coeffs
                .iter()
                .find_map(|(u, v)| v.as_constant().map(|c| (idx, *u, c)))
        });
        let Some((idx, u, c)) = found else { break };
        let mut row = rows.remove(idx);
        row.scale(&Scalar::constant(c.inv().expect("nonzero pivot")));
        for other in rows.iter_mut().chain(pivots.iter_mut().map(|(_, r)| r)) {
            if let Some(f) = other.coeffs.get(&u).cloned() {
                other.eliminate(&f, &row);
            }
        }
        pivots.push((u, row));
    }

    let mut conditions = Vec::new();
    let mut certificate = None;
    for row in &rows {
        if !row.coeffs.is_empty() {
            return Err(SolveError::ParametricPivot(row.to_constraint()));
        }
        if row.constant.is_zero() {
            continue;
        }
        if row.constant.as_constant().is_some() {
            certificate.get_or_insert_with(|| row.to_constraint());
        } else {
            conditions.push(row.to_constraint());
        }
    }

    let mut assignment = BTreeMap::new();
    for (u, row) in &pivots {
        // u + sum(coeff * free) + constant = 0
        let mut value = -&row.constant;
        for (v, coeff) in &row.coeffs {
            if v != u {
                value -= &(coeff * &Scalar::param(*v));
            }
        }
        assignment.insert(*u, value);
    }
    let free: Vec<Param> = unknowns.iter().copied().filter(|u| !assignment.contains_key(u)).collect();
    let status = if certificate.is_some() {
        SolveStatus::Inconsistent
    } else if free.is_empty() {
        SolveStatus::Unique
    } else {
        SolveStatus::Underdetermined
    };
    Ok(Solution {
        status,
        assignment,
        free,
        conditions,
        certificate,
    })
}

impl Solution {
    pub fn value(&self, p: Param) -> Option<&Scalar> {
        self.assignment.get(&p)
    }

    /// Constant values of the solved unknowns.
    pub fn constants(&self) -> BTreeMap<Param, GaussRat> {
        self.assignment
            .iter()
            .filter_map(|(p, v)| v.as_constant().map(|c| (*p, c)))
            .collect()
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            SolveStatus::Inconsistent => {
                write!(f, "inconsistent")?;
                if let Some(c) = &self.certificate {
                    write!(f, ": {} reduces to {} = 0", c.source, c.equation)?;
                }
            }
            SolveStatus::Unique | SolveStatus::Underdetermined => {
                let status = if self.status == SolveStatus::Unique { "unique" } else { "underdetermined" };
                write!(f, "{status}")?;
                for (p, v) in &self.assignment {
                    write!(f, "; {p} = {v}")?;
                }
                if !self.free.is_empty() {
                    let names: Vec<String> = self.free.iter().map(|p| p.name()).collect();
                    write!(f, "; free: {}", names.join(", "))?;
                }
            }
        }
        for c in &self.conditions {
            write!(f, "; condition {c}")?;
        }
        Ok(())
    }
}
