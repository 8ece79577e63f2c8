//! Whole-argument computations: no-go residuals, trivial representations
//! and the constraint system satisfied by the position representations.

use std::collections::BTreeMap;
use std::fmt;

use crate::classical::{render_sum, ClassicalElement, Mono};
use crate::operator::OperatorElement;
use crate::scalar::{Param, Scalar};

use super::{
    extract_constraints, solve_linear, Bindings, PbExpr, QuantError, QuantScheme, Rule, SchemeKind, Solution,
    SolveStatus,
};

type C = ClassicalElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Trig {
    Sin,
    Cos,
}

/// An operator written as `sum Q(trig) Q(l)^k` with scalar coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigDisplay {
    coeffs: BTreeMap<(Trig, u32), Scalar>,
}

impl TrigDisplay {
    pub fn coeff(&self, t: Trig, k: u32) -> Scalar {
        self.coeffs.get(&(t, k)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn max_power(&self) -> Option<u32> {
        self.coeffs.keys().map(|(_, k)| *k).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Trig, u32), &Scalar)> {
        self.coeffs.iter()
    }

    /// Coefficients from the highest power down, `Q(sin)` before `Q(cos)`
    /// at equal power, skipping `Q(cos)` at the top power.
    pub fn descending(&self, top: u32) -> Vec<Scalar> {
        let mut out = vec![self.coeff(Trig::Sin, top)];
        for k in (0..top).rev() {
            out.push(self.coeff(Trig::Cos, k));
            out.push(self.coeff(Trig::Sin, k));
        }
        out
    }
}

impl fmt::Display for TrigDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<_> = self.coeffs.iter().collect();
        keys.sort_by(|a, b| b.0 .1.cmp(&a.0 .1).then(a.0 .0.cmp(&b.0 .0)));
        let parts = keys.into_iter().map(|((t, k), c)| {
            let t = match t {
                Trig::Sin => "Q(sin)",
                Trig::Cos => "Q(cos)",
            };
            let atom = match k {
                0 => t.to_string(),
                1 => format!("{t}*Q(l)"),
                k => format!("{t}*Q(l)^{k}"),
            };
            (atom, c.clone())
        });
        f.write_str(&render_sum(parts))
    }
}

/// Writes `op` in the `Q(sin)Q(l)^k`, `Q(cos)Q(l)^k` basis of `scheme`.
pub fn trig_display(scheme: &QuantScheme, op: &OperatorElement) -> Result<TrigDisplay, QuantError> {
    let lambda = match scheme.kind() {
        SchemeKind::TypeI => scheme.constant_param(Param::Lambda)?,
        _ => crate::scalar::GaussRat::one(),
    };
    let inv_lambda = Scalar::constant(lambda.inv().ok_or(QuantError::NonConstantParameter { param: Param::Lambda })?);
    let shifted = op.in_shifted_d(&scheme.param(Param::Nu));
    let mut a: BTreeMap<u32, Scalar> = BTreeMap::new();
    let mut b: BTreeMap<u32, Scalar> = BTreeMap::new();
    for (w, c) in shifted {
        match (w.m, w.p) {
            (1, 0) => a.insert(w.k, c),
            (-1, 0) => b.insert(w.k, c),
            _ => return Err(QuantError::OutsideTrigSpan(w)),
        };
    }
    let mut coeffs = BTreeMap::new();
    let powers: std::collections::BTreeSet<u32> = a.keys().chain(b.keys()).copied().collect();
    for k in powers {
        let ak = a.get(&k).cloned().unwrap_or_else(Scalar::zero);
        let bk = b.get(&k).cloned().unwrap_or_else(Scalar::zero);
        // a E + b E^-1 = (a + b) cos + i (a - b) sin
        let s = &(&Scalar::i() * &(&ak - &bk)) * &inv_lambda;
        let c = &(&ak + &bk) * &inv_lambda;
        if !s.is_zero() {
            coeffs.insert((Trig::Sin, k), s);
        }
        if !c.is_zero() {
            coeffs.insert((Trig::Cos, k), c);
        }
    }
    Ok(TrigDisplay { coeffs })
}

/// Both quantized sides of a bracket relation and their difference.
#[derive(Clone, Debug, PartialEq)]
pub struct NogoReport {
    pub lhs: OperatorElement,
    pub rhs: OperatorElement,
    pub residual: OperatorElement,
    pub lhs_display: TrigDisplay,
    pub rhs_display: TrigDisplay,
    pub residual_display: TrigDisplay,
    pub solution: Solution,
}

fn report(scheme: &QuantScheme, lhs: OperatorElement, rhs: OperatorElement) -> Result<NogoReport, QuantError> {
    let residual = &lhs - &rhs;
    let solution = solve_linear(&extract_constraints(&residual, &[]))?;
    Ok(NogoReport {
        lhs_display: trig_display(scheme, &lhs)?,
        rhs_display: trig_display(scheme, &rhs)?,
        residual_display: trig_display(scheme, &residual)?,
        lhs,
        rhs,
        residual,
        solution,
    })
}

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn alpha() -> Scalar {
    Scalar::param(Param::Alpha)
}

pub(crate) fn quad() -> C {
    C::ell_pow(2) + C::ell().scale(&(int(2) * alpha()))
}

pub(crate) fn cubic() -> C {
    C::ell_pow(3) + C::ell_pow(2).scale(&(int(3) * alpha()))
}

pub(crate) fn quart() -> C {
    C::ell_pow(4) + C::ell_pow(3).scale(&(int(4) * alpha())) + C::ell_pow(2).scale(&(int(4) * alpha().pow(2)))
}

impl QuantScheme {
    /// Type (i) with `b = 0` and the rules up to `Q(l^2 sin)`, `Q(l^2 cos)`.
    pub fn full_p(bindings: Bindings) -> Result<QuantScheme, QuantError> {
        QuantScheme::type_i(bindings.with(Param::B, Scalar::zero()))
            .with_rules(&[Rule::L2, Rule::Ls, Rule::Lc, Rule::L2s, Rule::L2c])
    }

    /// Type (i) with `b' = 1/2`, `c' = alpha/2` and every cubic-family rule.
    pub fn full_v(bindings: Bindings) -> Result<QuantScheme, QuantError> {
        let bindings = bindings
            .with(Param::Bp, Scalar::ratio(1, 2))
            .with(Param::Cp, alpha() * Scalar::ratio(1, 2));
        QuantScheme::type_i(bindings).with_rules(&[Rule::Cubic, Rule::L2sPrime, Rule::L2cPrime, Rule::L4s, Rule::L4c])
    }
}

/// `2{{l^2 sin, l^2 cos}, cos} = 12 l^2 sin`, quantized with `scheme`.
pub fn nogo_main(scheme: &QuantScheme) -> Result<NogoReport, QuantError> {
    let l2s = &C::ell_pow(2) * &C::sin(1);
    let l2c = &C::ell_pow(2) * &C::cos(1);
    let lhs = PbExpr::bracket(PbExpr::bracket(l2s.clone(), l2c), C::cos(1)).scaled(int(2));
    let rhs = l2s.scale(&int(12));
    check_relation(&lhs, &rhs)?;
    report(scheme, lhs.quantize(scheme)?, scheme.quantize(&rhs)?)
}

/// The degree-four relation whose two quantizations disagree on `V_alpha`.
pub fn nogo_valpha(scheme: &QuantScheme) -> Result<NogoReport, QuantError> {
    let (sin, cos) = (C::sin(1), C::cos(1));
    let lhs = PbExpr::bracket(PbExpr::bracket(&quad() * &cos, &quart() * &sin), cos.clone())
        .plus(PbExpr::bracket(PbExpr::bracket(&quart() * &cos, &quad() * &sin), cos));
    let rhs = (&quart() * &sin).scale(&int(-30)) - (&quad() * &sin).scale(&(int(24) * alpha().pow(2)));
    check_relation(&lhs, &rhs)?;
    report(scheme, lhs.quantize(scheme)?, scheme.quantize(&rhs)?)
}

fn check_relation(lhs: &PbExpr, rhs: &C) -> Result<(), QuantError> {
    let gap = &lhs.classical() - rhs;
    if gap.is_zero() {
        Ok(())
    } else {
        Err(QuantError::FalseRelation(gap))
    }
}

/// `Q((l^2 + 2 alpha l) trig)` from the quadratic rules with `b = 0`
/// against the cubic-family rule with `b' = 1/2`, for `sin` then `cos`.
pub fn aside_discrepancy(bindings: Bindings) -> Result<[NogoReport; 2], QuantError> {
    let p = QuantScheme::full_p(bindings.clone())?;
    let v = QuantScheme::full_v(bindings)?;
    let side = |trig: C| -> Result<NogoReport, QuantError> {
        let f = &quad() * &trig;
        report(&p, p.quantize(&f)?, v.quantize(&f)?)
    };
    Ok([side(C::sin(1))?, side(C::cos(1))?])
}

/// A named sub-result of a check.
#[derive(Clone, Debug, PartialEq)]
pub struct Finding {
    pub label: String,
    pub holds: bool,
    pub detail: String,
}

impl Finding {
    fn new(label: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Finding {
            label: label.into(),
            holds,
            detail: detail.into(),
        }
    }
}

/// Type (ii) on all of `P`: brackets force `Q(cos^2) = Q(sin^2) = 0`, so
/// `I = Q(1) = 0`. Returns the findings and the solver outcome.
pub fn trivial_p(bindings: Bindings) -> Result<(Vec<Finding>, Solution), QuantError> {
    let s = QuantScheme::type_ii(bindings).vn_extend(Rule::L2)?;
    let half = Scalar::ratio(1, 2);
    let ell2 = C::ell_pow(2);
    let cos2 = PbExpr::bracket(PbExpr::bracket(ell2.clone(), C::sin(1)), C::sin(1)).scaled(half.clone());
    let sin2 = PbExpr::bracket(PbExpr::bracket(ell2, C::cos(1)), C::cos(1)).scaled(half);
    let mut findings = Vec::new();
    let qc = cos2.quantize(&s)?;
    let qs = sin2.quantize(&s)?;
    findings.push(Finding::new(
        "cos^2 relation",
        cos2.classical() == C::cos(1).pow(2),
        cos2.classical().to_trig_string(),
    ));
    findings.push(Finding::new("Q(cos^2) = 0", qc.is_zero(), qc.to_string()));
    findings.push(Finding::new("Q(sin^2) = 0", qs.is_zero(), qs.to_string()));
    let pyth = C::cos(1).pow(2) + C::sin(1).pow(2);
    findings.push(Finding::new("cos^2 + sin^2 = 1", pyth == C::one(), pyth.to_string()));
    let residual = &qc + &qs - s.quantize(&C::one())?;
    let solution = solve_linear(&extract_constraints(&residual, &[]))?;
    Ok((findings, solution))
}

/// Type (ii) on `V_alpha`: `Q(l) = -alpha`, the generators
/// `e^2_{2N+1} + 2 alpha e^1_{2N+1}` quantize to zero and
/// `Q(b l + c) = c - alpha b`.
pub fn trivial_valpha(max_n: i64) -> Result<Vec<Finding>, QuantError> {
    let mut findings = Vec::new();
    let s = QuantScheme::type_ii(Bindings::new()).vn_extend(Rule::Cubic)?;
    let newiden = PbExpr::bracket(PbExpr::bracket(cubic(), C::sin(1)), C::sin(1))
        .plus(PbExpr::bracket(PbExpr::bracket(cubic(), C::cos(1)), C::cos(1)));
    let rhs = C::ell().scale(&int(6)) + C::constant(int(6) * alpha());
    let residual = newiden.residual(&s, &rhs)?;
    let sol = solve_linear(&extract_constraints(&residual, &[Param::Mu]))?;
    let mu = sol.value(Param::Mu).cloned();
    findings.push(Finding::new(
        "Q(l) = -alpha",
        sol.status == SolveStatus::Unique && mu == Some(-alpha()),
        sol.to_string(),
    ));

    let s = QuantScheme::type_ii(Bindings::new().with(Param::Mu, -alpha()));
    // Scalar stand-in for the unconstrained image of an element outside B.
    let arbitrary = OperatorElement::scalar(Scalar::param(Param::Cp));
    let mut ok = true;
    let mut detail = Vec::new();
    for n in -max_n..=max_n {
        let x = C::mono(3, 2 * n) + C::mono(2, 2 * n).scale(&(int(3) * alpha()))
            - C::mono(0, 2 * n).scale(&(int(2) * alpha().pow(3)));
        let target = C::mono(2, 2 * n + 1) + C::mono(1, 2 * n + 1).scale(&(int(2) * alpha()));
        let tree = PbExpr::bracket(PbExpr::Opaque(x, arbitrary.clone()), C::mono(0, 1));
        let holds_classically = tree.classical() == target.scale(&(int(3) * Scalar::i()));
        let forced = tree.quantize(&s)?.scale(&Scalar::i().scale(&crate::scalar::GaussRat::ratio(-1, 3)));
        ok &= holds_classically && forced.is_zero();
        if !(holds_classically && forced.is_zero()) {
            detail.push(format!("N={n}: {forced}"));
        }
    }
    findings.push(Finding::new(
        format!("Q(e^2_(2N+1) + 2 alpha e^1_(2N+1)) = 0 for |N| <= {max_n}"),
        ok,
        if detail.is_empty() { "0".to_string() } else { detail.join("; ") },
    ));
    let b = Scalar::param(Param::B);
    let c = Scalar::param(Param::C);
    let q = s.quantize(&(C::ell().scale(&b) + C::constant(c.clone())))?;
    let expected = OperatorElement::scalar(&c - &(&alpha() * &b));
    findings.push(Finding::new("Q(b l + c) = c - alpha b", q == expected, q.to_string()));
    Ok(findings)
}

/// Matrix-element data of a `pos-rep` scheme and the checks on it.
#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    pub findings: Vec<Finding>,
}

impl UniquenessReport {
    pub fn holds(&self) -> bool {
        self.findings.iter().all(|f| f.holds)
    }
}

/// Checks the constraint equations on `D^N_n = <n+N|Q(e^0_N)|n>` and
/// `d^N_n = <n+N|Q(e^1_N)|n>` for `|N|, |M|, |n| <= bound`.
pub fn uniqueness_constraints(scheme: &QuantScheme, bound: i64) -> Result<UniquenessReport, QuantError> {
    let nu = scheme.param(Param::Nu);
    let eta = scheme.param(Param::Eta);
    let reach = 2 * bound;
    let mut big_d: BTreeMap<(i64, i64), Scalar> = BTreeMap::new();
    let mut small_d: BTreeMap<(i64, i64), Scalar> = BTreeMap::new();
    let mut band_ok = true;
    for n_idx in -reach..=reach {
        let q0 = scheme.quantize(&C::mono(0, n_idx))?;
        let q1 = scheme.quantize(&C::mono(1, n_idx))?;
        for n in -reach..=reach {
            for (q, store) in [(&q0, &mut big_d), (&q1, &mut small_d)] {
                let ket = q.apply_basis(n)?;
                band_ok &= ket.terms().all(|(m, _)| *m == n + n_idx);
                store.insert((n_idx, n), ket.coeff(n + n_idx));
            }
        }
    }
    let dd = |n_idx: i64, n: i64| big_d[&(n_idx, n)].clone();
    let d = |n_idx: i64, n: i64| small_d[&(n_idx, n)].clone();
    let r = -bound..=bound;

    let mut findings = vec![Finding::new("D: band structure", band_ok, format!("m = n + N, |N|, |n| <= {reach}"))];
    let mut tally = |label: &str, cases: &mut dyn Iterator<Item = (bool, String)>| {
        let mut count = 0usize;
        let mut failure = None;
        for (ok, what) in cases {
            count += 1;
            if !ok && failure.is_none() {
                failure = Some(what);
            }
        }
        let detail = match &failure {
            None => format!("{count} instances"),
            Some(w) => format!("fails at {w}"),
        };
        findings.push(Finding::new(label, failure.is_none(), detail));
    };

    let grid2 = || r.clone().flat_map(move |a| (-bound..=bound).map(move |b| (a, b)));
    tally(
        "qD: D^N_(n+1) = D^N_n",
        &mut grid2().map(|(nn, n)| (dd(nn, n + 1) == dd(nn, n), format!("N={nn} n={n}"))),
    );
    tally(
        "MN: (d^N_(n+M) - d^N_n) D^M = M D^(N+M)",
        &mut grid2().flat_map(|(nn, mm)| {
            let dd = &dd;
            let d = &d;
            (-bound..=bound).map(move |n| {
                let lhs = &(&d(nn, n + mm) - &d(nn, n)) * &dd(mm, 0);
                (lhs == &int(mm) * &dd(nn + mm, 0), format!("N={nn} M={mm} n={n}"))
            })
        }),
    );
    tally(
        "dnD: d^N_n = d^N_0 + n D^(N+1)",
        &mut grid2().map(|(nn, n)| (d(nn, n) == d(nn, 0) + &int(n) * &dd(nn + 1, 0), format!("N={nn} n={n}"))),
    );
    tally(
        "recur1: M d^M_0 - N d^N_0 = (M - N) d^(M+N)_0",
        &mut grid2().map(|(nn, mm)| {
            let lhs = &int(mm) * &d(mm, 0) - &int(nn) * &d(nn, 0);
            (lhs == &int(mm - nn) * &d(mm + nn, 0), format!("N={nn} M={mm}"))
        }),
    );
    tally(
        "plus: d^N_0 + d^(-N)_0 = 2 nu",
        &mut r.clone().map(|nn| (d(nn, 0) + d(-nn, 0) == &int(2) * &nu, format!("N={nn}"))),
    );
    tally(
        "recur2: d^N_0 = N d^1_0 + (1 - N) nu",
        &mut r.clone().map(|nn| (d(nn, 0) == &int(nn) * &d(1, 0) + &int(1 - nn) * &nu, format!("N={nn}"))),
    );
    tally(
        "minus: conj(d^N_0) - d^(-N)_0 = N",
        &mut r.clone().map(|nn| (d(nn, 0).conj() - d(-nn, 0) == int(nn), format!("N={nn}"))),
    );
    tally(
        "D^N = 1",
        &mut grid2().map(|(nn, n)| (dd(nn, n).is_one(), format!("N={nn} n={n}"))),
    );
    tally(
        "Re d^N_0 = N/2 + nu, Im d^N_0 = N eta",
        &mut r.clone().map(|nn| {
            let v = d(nn, 0);
            let ok = v.re() == Scalar::ratio(nn, 2) + nu.clone() && v.im() == &int(nn) * &eta;
            (ok, format!("N={nn}"))
        }),
    );
    tally(
        "action: Q(e^1_N)|n> = (n + i N eta + N/2 + nu)|n+N>",
        &mut grid2().map(|(nn, n)| {
            let expected = int(n) + &(&Scalar::i() * &int(nn)) * &eta + Scalar::ratio(nn, 2) + nu.clone();
            (d(nn, n) == expected, format!("N={nn} n={n}"))
        }),
    );
    Ok(UniquenessReport { findings })
}

/// Value of `<n+N|Q(e^r_N)|n>` for a pos-rep scheme.
pub fn band_coefficient(scheme: &QuantScheme, mono: Mono, n: i64) -> Result<Scalar, QuantError> {
    let q = scheme.quantize(&C::mono(mono.r, mono.m))?;
    Ok(q.matrix_element(n + mono.m, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Scalar {
        Scalar::i()
    }

    fn a(k: u32) -> Scalar {
        alpha().pow(k)
    }

    #[test]
    fn nogo_main_sides() {
        let s = QuantScheme::full_p(Bindings::new()).unwrap();
        let r = nogo_main(&s).unwrap();
        assert_eq!(r.residual, s.q_sin().unwrap().scale(&int(2)));
        assert_eq!(r.lhs_display.descending(2), vec![int(12), int(-12) * i(), int(0), int(0), int(5)]);
        assert_eq!(r.rhs_display.descending(2), vec![int(12), int(-12) * i(), int(0), int(0), int(3)]);
        assert!(r.residual.terms().all(|(_, c)| c.params().is_empty()));
        assert_eq!(r.solution.status, SolveStatus::Inconsistent);
    }

    #[test]
    fn nogo_valpha_sides() {
        let s = QuantScheme::full_v(Bindings::new()).unwrap();
        let r = nogo_valpha(&s).unwrap();
        let lhs = vec![
            int(-30),
            int(60) * i(),
            int(-120) * alpha(),
            int(180) * i() * alpha(),
            -(int(84) + int(144) * a(2)),
            i() * (int(54) + int(144) * a(2)),
            -(int(168) * alpha() + int(48) * a(3)),
            i() * (int(54) * alpha() + int(24) * a(3)),
            -(Scalar::ratio(31, 2) + int(66) * a(2)),
        ];
        let rhs = vec![
            int(-30),
            int(60) * i(),
            int(-120) * alpha(),
            int(180) * i() * alpha(),
            -(int(60) + int(144) * a(2)),
            i() * (int(30) + int(144) * a(2)),
            -(int(120) * alpha() + int(48) * a(3)),
            i() * (int(30) * alpha() + int(24) * a(3)),
            -(Scalar::ratio(15, 2) + int(42) * a(2)),
        ];
        assert_eq!(r.lhs_display.descending(4), lhs);
        assert_eq!(r.rhs_display.descending(4), rhs);
        assert!(r.lhs_display.coeff(Trig::Cos, 4).is_zero());
        let diff = r.residual_display;
        assert_eq!(diff.coeff(Trig::Sin, 2), int(-24));
        assert_eq!(diff.coeff(Trig::Cos, 1), int(24) * i());
        assert_eq!(diff.coeff(Trig::Sin, 1), int(-48) * alpha());
        assert_eq!(diff.coeff(Trig::Cos, 0), int(24) * i() * alpha());
        assert_eq!(diff.coeff(Trig::Sin, 0), -(int(8) + int(24) * a(2)));
        assert_eq!(diff.terms().count(), 5);
    }

    #[test]
    fn aside_only_degree_zero() {
        let [sin, cos] = aside_discrepancy(Bindings::new()).unwrap();
        let p = QuantScheme::full_p(Bindings::new()).unwrap();
        assert_eq!(sin.residual, p.q_sin().unwrap().scale(&Scalar::ratio(-1, 4)));
        assert_eq!(cos.residual, p.q_cos().unwrap().scale(&Scalar::ratio(-1, 4)));
        assert_eq!(sin.residual_display.max_power(), Some(0));
    }

    #[test]
    fn trivial_reps() {
        let (findings, sol) = trivial_p(Bindings::new()).unwrap();
        assert!(findings.iter().all(|f| f.holds), "{findings:?}");
        assert_eq!(sol.status, SolveStatus::Inconsistent);
        assert_eq!(sol.certificate.unwrap().equation, int(-1));
        let findings = trivial_valpha(4).unwrap();
        assert!(findings.iter().all(|f| f.holds), "{findings:?}");
    }

    #[test]
    fn uniqueness_on_pos_rep() {
        let s = QuantScheme::pos_rep(Bindings::new());
        let rep = uniqueness_constraints(&s, 6).unwrap();
        assert!(rep.holds(), "{:?}", rep.findings);
        assert!(band_coefficient(&s, Mono { r: 0, m: 3 }, 5).unwrap().is_one());
        let d2 = band_coefficient(&s, Mono { r: 1, m: 2 }, 0).unwrap();
        let eta = Scalar::param(Param::Eta);
        assert_eq!(d2, int(1) + Scalar::param(Param::Nu) + int(2) * i() * eta);
    }

    #[test]
    fn uniqueness_detects_wrong_rep() {
        // type i has no Q(e^1_N) for N != 0, so the check cannot even start
        let s = QuantScheme::type_i(Bindings::new());
        assert!(uniqueness_constraints(&s, 1).is_err());
    }
}
