//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cylnogo_core::classical::ClassicalElement as C;
use cylnogo_core::operator::OperatorElement as Op;
use cylnogo_core::parse::{parse_classical, parse_operator, SchemeContext};
use cylnogo_core::quant::{
    aside_discrepancy, extract_constraints, nogo_main, nogo_valpha, solve_linear, trivial_p, trivial_valpha,
    uniqueness_constraints, Bindings, PbExpr, QuantScheme, Rule, SolveStatus, Trig,
};
use cylnogo_core::subalgebra::{
    alpha_assignment, b_complex, closure, irreducibility_probe, leading_term_scan, walpha_generators, Cutoff,
};
use cylnogo_core::verify::{recursion_operator, run_checks, Manifest};
use cylnogo_core::{GaussRat, Mono, Param, Scalar};
use proptest::test_runner::TestRunner;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn alpha() -> Scalar {
    Scalar::param(Param::Alpha)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn named(names: &[&str]) -> Result<(), String> {
    let m = Manifest::embedded();
    let sel: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let results = run_checks(&m, &sel, 1).map_err(|e| e.to_string())?;
    for r in &results {
        ensure(r.as_expected(), || format!("{}: {} ({})", r.name, r.status, r.witness))?;
    }
    Ok(())
}

fn double_bracket(f: &C) -> C {
    let (s, c) = (C::sin(1), C::cos(1));
    &f.bracket(&s).bracket(&s) + &f.bracket(&c).bracket(&c)
}

fn classical_identities() -> Outcome {
    let iden = double_bracket(&C::ell_pow(2));
    ensure(iden == C::constant(int(2)), || format!("iden gives {iden}"))?;
    let cubic = &C::ell_pow(3) + &C::ell_pow(2).scale(&(int(3) * alpha()));
    let newiden = double_bracket(&cubic);
    let expected = &C::ell().scale(&int(6)) + &C::constant(int(6) * alpha());
    ensure(newiden == expected, || format!("newiden gives {newiden}"))?;
    let lc_ls = (&C::ell() * &C::cos(1)).bracket(&(&C::ell() * &C::sin(1)));
    ensure(lc_ls == C::ell(), || format!("{{l cos, l sin}} = {lc_ls}"))?;
    named(&["iden", "newiden"])?;
    Ok("2, 6 l + 6 alpha, l".into())
}

fn operator_identity() -> Outcome {
    let s = QuantScheme::type_i(Bindings::new());
    ensure(!s.bindings().is_bound(Param::Nu), || "nu is bound".into())?;
    let l = s.q_ell().map_err(|e| e.to_string())?;
    let l2 = &l * &l;
    let (sn, cs) = (s.q_sin().unwrap(), s.q_cos().unwrap());
    let op = &l2.commutator(&sn).commutator(&sn) + &l2.commutator(&cs).commutator(&cs);
    ensure(op == Op::scalar(int(-2)), || format!("got {op}"))?;
    Ok("-2 I with nu formal".into())
}

type Ket = BTreeMap<i64, Scalar>;

fn push(k: &mut Ket, n: i64, c: Scalar) {
    let v = k.remove(&n).unwrap_or_else(Scalar::zero) + c;
    if !v.is_zero() {
        k.insert(n, v);
    }
}

fn oracle_sin(v: &Ket) -> Ket {
    let h = GaussRat::ratio(1, 2) * (-GaussRat::i());
    let mut out = Ket::new();
    for (n, c) in v {
        push(&mut out, n + 1, c.scale(&h));
        push(&mut out, n - 1, -c.scale(&h));
    }
    out
}

fn oracle_cos(v: &Ket) -> Ket {
    let h = GaussRat::ratio(1, 2);
    let mut out = Ket::new();
    for (n, c) in v {
        push(&mut out, n + 1, c.scale(&h));
        push(&mut out, n - 1, c.scale(&h));
    }
    out
}

fn oracle_xi(v: &Ket) -> Ket {
    v.iter().map(|(n, c)| (*n, c * &Scalar::param(Param::Xi(*n)))).collect()
}

fn minus(a: Ket, b: Ket) -> Ket {
    let mut out = a;
    for (n, c) in b {
        push(&mut out, n, -c);
    }
    out
}

fn plus(a: Ket, b: Ket) -> Ket {
    let mut out = a;
    for (n, c) in b {
        push(&mut out, n, c);
    }
    out
}

type Action = Box<dyn Fn(&Ket) -> Ket>;

fn comm(a: Action, b: Action) -> Action {
    let (a, b) = (std::rc::Rc::new(a), std::rc::Rc::new(b));
    Box::new(move |v| minus(a(&b(v)), b(&a(v))))
}

/// `<n|K|n>` by direct expansion of every product against `|n>`.
fn oracle_k(n: i64) -> Scalar {
    let inner_s = comm(Box::new(oracle_xi), Box::new(oracle_sin));
    let ks = comm(inner_s, Box::new(oracle_sin));
    let inner_c = comm(Box::new(oracle_xi), Box::new(oracle_cos));
    let kc = comm(inner_c, Box::new(oracle_cos));
    let ket: Ket = [(n, Scalar::one())].into_iter().collect();
    plus(ks(&ket), kc(&ket)).remove(&n).unwrap_or_else(Scalar::zero)
}

fn recursion() -> Outcome {
    let k = recursion_operator();
    let mut multiple: Option<Scalar> = None;
    for n in -5..=5 {
        let lib = k.matrix_element(n, n).map_err(|e| e.to_string())?;
        let oracle = oracle_k(n);
        ensure(lib == oracle, || format!("n={n}: engine {lib}, oracle {oracle}"))?;
        let target = int(2) * Scalar::param(Param::Xi(n)) - Scalar::param(Param::Xi(n + 1)) - Scalar::param(Param::Xi(n - 1));
        let coeff = oracle.split_linear(Param::Xi(n)).0;
        let m = coeff.scale(&GaussRat::ratio(1, 2));
        ensure(m.as_constant().is_some_and(|c| !c.is_zero()), || format!("n={n}: multiple {m}"))?;
        ensure(oracle == &m * &target, || format!("n={n}: {oracle} is not {m} times the second difference"))?;
        if let Some(prev) = &multiple {
            ensure(*prev == m, || format!("multiple changes at n={n}"))?;
        }
        multiple = Some(m);
    }
    named(&["recursion"])?;
    Ok(format!("multiple {} for |n| <= 5", multiple.unwrap()))
}

fn parameters() -> Outcome {
    let base = QuantScheme::type_i(Bindings::new());
    let s = base.with_rules(&[Rule::L2, Rule::Ls, Rule::Lc]).map_err(|e| e.to_string())?;
    let rel = PbExpr::bracket(&C::ell() * &C::cos(1), &C::ell() * &C::sin(1));
    let res = rel.residual(&s, &C::ell()).map_err(|e| e.to_string())?;
    let sol = solve_linear(&extract_constraints(&res, &[Param::B])).map_err(|e| e.to_string())?;
    ensure(sol.status == SolveStatus::Unique && sol.value(Param::B) == Some(&Scalar::zero()), || sol.to_string())?;

    let s = base
        .with_rules(&[Rule::Cubic, Rule::L2sPrime, Rule::L2cPrime])
        .map_err(|e| e.to_string())?;
    let quad = &C::ell_pow(2) + &C::ell().scale(&(int(2) * alpha()));
    let cubic = &C::ell_pow(3) + &C::ell_pow(2).scale(&(int(3) * alpha()));
    let rel = PbExpr::bracket(&quad * &C::cos(1), &quad * &C::sin(1))
        .scaled(Scalar::ratio(1, 2))
        .plus(C::ell().scale(&(int(-2) * alpha().pow(2))));
    ensure(rel.classical() == cubic, || format!("cubic relation gives {}", rel.classical()))?;
    let res = rel.residual(&s, &cubic).map_err(|e| e.to_string())?;
    let sol = solve_linear(&extract_constraints(&res, &[Param::Bp, Param::Cp])).map_err(|e| e.to_string())?;
    ensure(
        sol.status == SolveStatus::Unique
            && sol.value(Param::Bp) == Some(&Scalar::ratio(1, 2))
            && sol.value(Param::Cp) == Some(&alpha().scale(&GaussRat::ratio(1, 2))),
        || sol.to_string(),
    )?;

    let s = base.vn_extend(Rule::L2).map_err(|e| e.to_string())?;
    let res = PbExpr::Sum(vec![
        PbExpr::bracket(PbExpr::bracket(C::ell_pow(2), C::sin(1)), C::sin(1)),
        PbExpr::bracket(PbExpr::bracket(C::ell_pow(2), C::cos(1)), C::cos(1)),
    ])
    .residual(&s, &C::constant(int(2)))
    .map_err(|e| e.to_string())?;
    let sol = solve_linear(&extract_constraints(&res, &[Param::B, Param::C])).map_err(|e| e.to_string())?;
    ensure(sol.status == SolveStatus::Underdetermined && sol.free == [Param::B, Param::C], || sol.to_string())?;
    named(&["b-zero", "bprime-cprime", "vn-l2-underdetermined"])?;
    Ok("b = 0; b' = 1/2, c' = alpha/2; free {b, c}".into())
}

fn main_nogo() -> Outcome {
    let s = QuantScheme::full_p(Bindings::new()).map_err(|e| e.to_string())?;
    ensure(!s.bindings().is_bound(Param::C), || "c is bound".into())?;
    let r = nogo_main(&s).map_err(|e| e.to_string())?;
    let sin = s.q_sin().unwrap();
    ensure(r.residual == sin.scale(&int(2)), || format!("residual {}", r.residual))?;
    let i = Scalar::i();
    let lhs = [int(12), int(-12) * i.clone(), int(0), int(0), int(5)];
    let rhs = [int(12), int(-12) * i, int(0), int(0), int(3)];
    ensure(r.lhs_display.descending(2) == lhs, || format!("lhs {}", r.lhs_display))?;
    ensure(r.rhs_display.descending(2) == rhs, || format!("rhs {}", r.rhs_display))?;
    ensure(r.lhs_display.coeff(Trig::Cos, 2).is_zero() && r.rhs_display.coeff(Trig::Cos, 2).is_zero(), || {
        "stray Q(cos)Q(l)^2".into()
    })?;
    named(&["nogo-main"])?;
    Ok(format!("residual 2*Q(sin); {} vs {}", r.lhs_display, r.rhs_display))
}

fn valpha_nogo() -> Outcome {
    let s = QuantScheme::full_v(Bindings::new()).map_err(|e| e.to_string())?;
    ensure(!s.bindings().is_bound(Param::Alpha), || "alpha is bound".into())?;
    let r = nogo_valpha(&s).map_err(|e| e.to_string())?;
    let i = Scalar::i();
    let a = |k: u32| alpha().pow(k);
    // Q(sin)Q(l)^4, Q(cos)Q(l)^3, Q(sin)Q(l)^3, ..., Q(sin)
    let lhs = vec![
        int(-30),
        int(60) * i.clone(),
        int(-120) * alpha(),
        int(180) * i.clone() * alpha(),
        -(int(84) + int(144) * a(2)),
        i.clone() * (int(54) + int(144) * a(2)),
        -(int(168) * alpha() + int(48) * a(3)),
        i.clone() * (int(54) * alpha() + int(24) * a(3)),
        -(Scalar::ratio(31, 2) + int(66) * a(2)),
    ];
    let rhs = vec![
        int(-30),
        int(60) * i.clone(),
        int(-120) * alpha(),
        int(180) * i.clone() * alpha(),
        -(int(60) + int(144) * a(2)),
        i.clone() * (int(30) + int(144) * a(2)),
        -(int(120) * alpha() + int(48) * a(3)),
        i * (int(30) * alpha() + int(24) * a(3)),
        -(Scalar::ratio(15, 2) + int(42) * a(2)),
    ];
    ensure(r.lhs_display.descending(4) == lhs, || format!("lhs {}", r.lhs_display))?;
    ensure(r.rhs_display.descending(4) == rhs, || format!("rhs {}", r.rhs_display))?;
    let diff: Vec<Scalar> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
    ensure(r.residual_display.descending(4) == diff, || format!("residual {}", r.residual_display))?;
    let sin0 = r.residual_display.coeff(Trig::Sin, 0);
    ensure(sin0.constant_term() == GaussRat::from_int(-8), || format!("Q(sin) coefficient {sin0}"))?;
    // -8 - 24 alpha^2 with alpha real never vanishes.
    ensure(sin0 == int(-8) - int(24) * a(2), || format!("Q(sin) coefficient {sin0}"))?;
    named(&["nogo-valpha"])?;
    Ok(format!("Q(sin) coefficient of the difference {sin0}"))
}

fn trivial() -> Outcome {
    let (_, sol) = trivial_p(Bindings::new()).map_err(|e| e.to_string())?;
    ensure(sol.status == SolveStatus::Inconsistent, || sol.to_string())?;
    let cert = sol.certificate.as_ref().ok_or("no certificate")?;
    let c = cert.equation.as_constant().ok_or("certificate is not constant")?;
    ensure(!c.is_zero(), || "certificate is 0 = 0".into())?;
    let findings = trivial_valpha(4).map_err(|e| e.to_string())?;
    ensure(findings.iter().all(|f| f.holds), || format!("{findings:?}"))?;
    let s = QuantScheme::type_ii(Bindings::new().with(Param::Mu, -alpha()));
    let q = s
        .quantize(&(&C::ell().scale(&Scalar::param(Param::B)) + &C::constant(Scalar::param(Param::C))))
        .map_err(|e| e.to_string())?;
    let expected = Op::scalar(Scalar::param(Param::C) - alpha() * Scalar::param(Param::B));
    ensure(q == expected, || format!("Q(b l + c) = {q}"))?;
    named(&["trivial-p", "trivial-valpha"])?;
    Ok(format!("certificate [{}] {} = 0; Q(b l + c) = {q}", cert.source, c))
}

fn position() -> Outcome {
    let s = QuantScheme::pos_rep(Bindings::new());
    ensure(!s.bindings().is_bound(Param::Nu) && !s.bindings().is_bound(Param::Eta), || "bound".into())?;
    let mut pairs = 0;
    for r1 in 0..=1 {
        for n in -8..=8 {
            for r2 in 0..=1 {
                for m in -8..=8 {
                    let res = s.bracket_residual(&C::mono(r1, n), &C::mono(r2, m)).map_err(|e| e.to_string())?;
                    ensure(res.is_zero(), || format!("e^{r1}_{n}, e^{r2}_{m}: {res}"))?;
                    pairs += 1;
                }
            }
        }
    }
    let rep = uniqueness_constraints(&s, 6).map_err(|e| e.to_string())?;
    for label in ["D", "qD", "MN", "dnD", "recur1", "plus", "recur2", "minus", "action"] {
        let f = rep.findings.iter().find(|f| f.label.split(':').next() == Some(label)).ok_or_else(|| format!("{label} not checked"))?;
        ensure(f.holds, || format!("{label}: {}", f.detail))?;
    }
    ensure(rep.holds(), || "uniqueness report has a failure".into())?;
    named(&["posrep-hom", "uniqueness-constraints"])?;
    Ok(format!("{pairs} pairs; all constraint families hold"))
}

fn aside() -> Outcome {
    let reports = aside_discrepancy(Bindings::new()).map_err(|e| e.to_string())?;
    for r in &reports {
        ensure(!r.residual.is_zero(), || "no discrepancy".into())?;
        for (w, _) in r.residual.terms() {
            ensure(w.k == 0 && w.p == 0, || format!("word {w} has positive degree"))?;
        }
    }
    named(&["aside-discrepancy"])?;
    Ok(format!("{}; {}", reports[0].residual_display, reports[1].residual_display))
}

fn subalgebras() -> Outcome {
    let cutoff = Cutoff::new(3, 5);
    for a in [GaussRat::ratio(1, 3), GaussRat::one(), GaussRat::from_int(-2)] {
        let basis = closure(&walpha_generators(5), cutoff, &alpha_assignment(a.clone())).map_err(|e| e.to_string())?;
        for n in [-4, -2, 2, 4] {
            ensure(!basis.member(&C::mono(0, n)).unwrap().is_in(), || format!("alpha {a}: e^0_{n} in W"))?;
            let f = &C::mono(1, n) + &C::mono(0, n).scale(&Scalar::constant(a.clone()));
            ensure(basis.member(&f).unwrap().is_in(), || format!("alpha {a}: {f} missing"))?;
        }
        let f0 = &C::mono(1, 0) + &C::mono(0, 0).scale(&Scalar::constant(a.clone()));
        ensure(basis.member(&f0).unwrap().is_in(), || format!("alpha {a}: {f0} missing"))?;
        let scan = leading_term_scan(&basis, &a);
        ensure(!scan.is_empty() && scan.iter().all(|t| t.witness.is_some() && t.r <= 3), || {
            format!("alpha {a}: leading-term gaps")
        })?;
        for t in &scan {
            let w = t.witness.as_ref().unwrap();
            let lead = w.coeff(Mono::new(t.r, t.n));
            let next = if t.r > 0 { w.coeff(Mono::new(t.r - 1, t.n)) } else { Scalar::zero() };
            let ra = Scalar::constant(a.clone()) * int(t.r as i64);
            ensure(lead.is_one() && next == ra, || format!("alpha {a}: witness {w} for ({}, {})", t.r, t.n))?;
            ensure(w.degree() == Some(t.r), || format!("alpha {a}: witness {w} too high"))?;
        }
    }
    let mut gens = b_complex();
    gens.push(C::ell_pow(2));
    let full = closure(&gens, cutoff, &BTreeMap::new()).map_err(|e| e.to_string())?;
    ensure(full.is_full(), || format!("B + l^2: dim {} of {}", full.dim(), cutoff.dimension()))?;
    for r in 0..=3 {
        let probe = irreducibility_probe(r, 1, 6);
        ensure(probe.complete(), || format!("P_{r}: missing {:?}", probe.missing()))?;
    }
    named(&["walpha-structure", "bootstrap", "p1-maximal", "irred"])?;
    Ok(format!("W_alpha suite at {cutoff}; B + l^2 fills {}", cutoff.dimension()))
}

fn prop(cases: u32, name: &str, mut f: impl FnMut(&mut TestRunner) -> Result<(), String>) -> Result<(), String> {
    let mut runner = TestRunner::new(common::fixed_config(cases));
    f(&mut runner).map_err(|e| format!("{name}: {e}"))
}

fn fail<T: std::fmt::Debug>(e: proptest::test_runner::TestError<T>) -> String {
    e.to_string()
}

fn properties() -> Outcome {
    use common::{arb_classical, arb_numeric_classical, arb_operator};
    prop(64, "classical Jacobi", |r| {
        r.run(&(arb_classical(), arb_classical(), arb_classical()), |(f, g, h)| {
            let j = &(&f.bracket(&g.bracket(&h)) + &g.bracket(&h.bracket(&f))) + &h.bracket(&f.bracket(&g));
            proptest::prop_assert!(j.is_zero());
            Ok(())
        })
        .map_err(fail)
    })?;
    prop(128, "classical antisymmetry and Leibniz", |r| {
        r.run(&(arb_classical(), arb_classical(), arb_classical()), |(f, g, h)| {
            proptest::prop_assert_eq!(f.bracket(&g), -g.bracket(&f));
            let lhs = f.bracket(&(&g * &h));
            let rhs = &(&f.bracket(&g) * &h) + &(&g * &f.bracket(&h));
            proptest::prop_assert_eq!(lhs, rhs);
            Ok(())
        })
        .map_err(fail)
    })?;
    prop(64, "operator associativity and Jacobi", |r| {
        r.run(&(arb_operator(0), arb_operator(0), arb_operator(0)), |(a, b, c)| {
            proptest::prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            let j = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a))) + &c.commutator(&a.commutator(&b));
            proptest::prop_assert!(j.is_zero());
            Ok(())
        })
        .map_err(fail)
    })?;
    prop(128, "adjoint duality", |r| {
        r.run(&(arb_operator(0), arb_operator(0)), |(a, b)| {
            let lhs = (&a * &b).adjoint().unwrap();
            let rhs = &b.adjoint().unwrap() * &a.adjoint().unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
            proptest::prop_assert_eq!(a.adjoint().unwrap().adjoint().unwrap(), a);
            Ok(())
        })
        .map_err(fail)
    })?;
    let ctx = SchemeContext::default();
    prop(1000, "parser round-trip", |r| {
        r.run(&(arb_classical(), arb_operator(1)), |(f, op)| {
            proptest::prop_assert_eq!(parse_classical(&f.to_string()).unwrap(), f);
            proptest::prop_assert_eq!(parse_operator(&op.to_string(), &ctx).unwrap(), op);
            Ok(())
        })
        .map_err(fail)
    })?;
    prop(24, "closure monotonicity", |r| {
        r.run(&proptest::collection::vec(arb_numeric_classical(2, 2), 1..=3), |extra| {
            let mut gens = b_complex();
            gens.extend(extra);
            let none = BTreeMap::new();
            let small = closure(&gens, Cutoff::new(2, 2), &none).unwrap();
            let large = closure(&gens, Cutoff::new(2, 3), &none).unwrap();
            for v in small.vectors() {
                proptest::prop_assert!(large.member(&v).unwrap().is_in(), "{} lost", v);
            }
            Ok(())
        })
        .map_err(fail)
    })?;
    Ok(format!("seed {:#010x}", common::SEED))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("classical identities", classical_identities),
        ("operator identity", operator_identity),
        ("recursion derivation", recursion),
        ("parameter determinations", parameters),
        ("main no-go", main_nogo),
        ("V_alpha no-go", valpha_nogo),
        ("trivial representations", trivial),
        ("position representations", position),
        ("aside discrepancy", aside),
        ("subalgebra suite", subalgebras),
        ("property suites", properties),
    ];
    let limit = Duration::from_secs(10);
    let suite = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(w) if elapsed > limit => Err(format!("took {elapsed:?}: {w}")),
            other => other,
        };
        match outcome {
            Ok(w) => println!("PASS {:>2} {name} ({} ms): {w}", i + 1, elapsed.as_millis()),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({} ms): {e}", i + 1, elapsed.as_millis());
            }
        }
    }
    let total = suite.elapsed();
    if total > Duration::from_secs(120) {
        failed += 1;
        println!("FAIL suite time {total:?} exceeds 2 minutes");
    }
    println!("{} of {} criteria passed in {} ms", criteria.len() - failed.min(criteria.len()), criteria.len(), total.as_millis());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
