use super::*;
use crate::sampling::Sampler;
use std::sync::Arc;

fn st_with_power_j() -> SymbolTable {
    // power-law pair k0 = 1, m = 1: K(u) = u, J(u) = u^2/2
    let mut st = SymbolTable::new();
    st.register_chain("J", "K", Arc::new(|u| Ok(u * u / 2.0)));
    st.register_chain("K", "Kp", Arc::new(|u| Ok(u)));
    st.register_leaf("Kp", Arc::new(|_| Ok(1.0)));
    st
}

fn b(pairs: &[(&str, f64)]) -> Bindings {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn parse_examples_from_grammar() {
    let e = parse("z^2 + 2*z").unwrap();
    assert_eq!(
        e.eval(&b(&[("z", 3.0)]), &SymbolTable::new()).unwrap(),
        15.0
    );
    let e = parse("exp(-(beta*z^2)/(4*t))").unwrap();
    let v = e
        .eval(&b(&[("beta", 1.0), ("z", 2.0), ("t", 1.0)]), &SymbolTable::new())
        .unwrap();
    assert!((v - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn eval_basics() {
    let st = SymbolTable::new();
    assert_eq!(parse("z^2+1").unwrap().eval(&b(&[("z", 3.0)]), &st).unwrap(), 10.0);
    assert!(matches!(
        parse("ln(z)").unwrap().eval(&b(&[("z", -1.0)]), &st),
        Err(crate::Error::Domain(_))
    ));
    assert!(matches!(
        parse("q+1").unwrap().eval(&b(&[]), &st),
        Err(crate::Error::UnboundVar(_))
    ));
}

#[test]
fn eval_j_power_law() {
    let st = st_with_power_j();
    let v = parse("J(u)").unwrap().eval(&b(&[("u", 2.0)]), &st).unwrap();
    assert_eq!(v, 2.0);
}

#[test]
fn diff_power_rule_and_chain_rule() {
    let st = SymbolTable::new();
    assert_eq!(parse("z^2").unwrap().diff("z", &st).unwrap(), parse("2*z").unwrap());
    let d = parse("exp(lam*u)").unwrap().diff("u", &st).unwrap();
    assert_eq!(d, parse("lam*exp(lam*u)").unwrap());
}

#[test]
fn diff_registered_symbol_vs_finite_difference() {
    // d/du J(u) = K(u), checked against a central difference of the numeric
    // evaluator at 50 random points
    let st = st_with_power_j();
    let dj = parse("J(u)").unwrap().diff("u", &st).unwrap();
    assert_eq!(dj, parse("K(u)").unwrap());
    let mut s = Sampler::new(7);
    let h = 1e-5;
    for _ in 0..50 {
        let u = s.uniform(0.2, 3.0);
        let exact = dj.eval(&b(&[("u", u)]), &st).unwrap();
        let jp = parse("J(u)").unwrap();
        let fd = (jp.eval(&b(&[("u", u + h)]), &st).unwrap()
            - jp.eval(&b(&[("u", u - h)]), &st).unwrap())
            / (2.0 * h);
        assert!((exact - fd).abs() / (1.0 + exact.abs()) < 1e-6);
    }
}

#[test]
fn diff_unregistered_symbol_errors() {
    let st = SymbolTable::new();
    assert!(matches!(
        parse("K(u)").unwrap().diff("u", &st),
        Err(crate::Error::Unregistered(_))
    ));
}

#[test]
fn simplify_examples() {
    assert_eq!(parse("z*z^(-1)").unwrap().simplify(), Expr::one());
    assert_eq!(parse("2*z + 3*z - 5*z").unwrap().simplify(), Expr::zero());
    assert_eq!(
        parse("(1-nu)*rho*z^(-nu)*0").unwrap().simplify(),
        Expr::zero()
    );
}

#[test]
fn simplify_exp_ln_interplay() {
    assert_eq!(parse("exp(ln(z))").unwrap().simplify(), Expr::var("z"));
    assert_eq!(parse("ln(exp(t))").unwrap().simplify(), Expr::var("t"));
    // exp(2*ln(z) + t) = z^2 * exp(t)
    let e = parse("exp(2*ln(z)+t)").unwrap().simplify();
    assert_eq!(e, parse("z^2*exp(t)").unwrap().simplify());
    // constant folding of exact roots
    assert_eq!(parse("4^(1/2)").unwrap().simplify(), Expr::num(2));
    assert_eq!(parse("(8/27)^(1/3)").unwrap().simplify(), Expr::ratio(2, 3));
}

fn random_expr(s: &mut Sampler, depth: usize) -> Expr {
    let vars = ["z", "t", "u"];
    if depth == 0 {
        return match s.int(0, 2) {
            0 => Expr::num(s.int(-4, 4)),
            1 => Expr::ratio(s.int(1, 9), s.int(1, 9)),
            _ => Expr::var(vars[s.int(0, 2) as usize]),
        };
    }
    match s.int(0, 6) {
        0 => Expr::Sum(vec![random_expr(s, depth - 1), random_expr(s, depth - 1)]),
        1 => Expr::Prod(vec![random_expr(s, depth - 1), random_expr(s, depth - 1)]),
        2 => Expr::sub(random_expr(s, depth - 1), random_expr(s, depth - 1)),
        3 => Expr::pow_ratio(Expr::var(vars[s.int(0, 2) as usize]), s.int(-2, 3), s.int(1, 2)),
        4 => Expr::exp(Expr::mul(vec![Expr::ratio(1, 4), random_expr(s, depth - 1)])),
        5 => Expr::ln(Expr::Sum(vec![
            Expr::num(2),
            Expr::pow_int(random_expr(s, depth - 1), 2),
        ])),
        _ => Expr::div(
            random_expr(s, depth - 1),
            Expr::Sum(vec![Expr::num(3), Expr::pow_int(Expr::var("t"), 2)]),
        ),
    }
}

fn sample_bindings(s: &mut Sampler) -> Bindings {
    b(&[
        ("z", s.uniform(0.5, 2.0)),
        ("t", s.uniform(0.5, 2.0)),
        ("u", s.uniform(0.5, 2.0)),
    ])
}

#[test]
fn property_parse_unparse_round_trip() {
    // round-trip on 100 random expressions, eval-equal at random points
    let st = SymbolTable::new();
    let mut s = Sampler::new(42);
    let mut checked = 0;
    while checked < 100 {
        let e = random_expr(&mut s, 3);
        let printed = e.to_string();
        let reparsed = parse(&printed)
            .unwrap_or_else(|err| panic!("unparse produced unparsable `{printed}`: {err}"));
        let mut compared = 0;
        for _ in 0..10 {
            let bind = sample_bindings(&mut s);
            match (e.eval(&bind, &st), reparsed.eval(&bind, &st)) {
                (Ok(a), Ok(bv)) => {
                    assert!(
                        (a - bv).abs() <= 1e-12 * (1.0 + a.abs()),
                        "round trip mismatch for `{printed}`: {a} vs {bv}"
                    );
                    compared += 1;
                }
                _ => continue,
            }
        }
        if compared > 0 {
            checked += 1;
        }
    }
}

#[test]
fn property_simplify_idempotent_and_value_preserving() {
    let st = SymbolTable::new();
    let mut s = Sampler::new(4242);
    let mut checked = 0;
    while checked < 100 {
        let e = random_expr(&mut s, 3);
        let s1 = e.simplify();
        let s2 = s1.simplify();
        assert_eq!(s1, s2, "simplify not idempotent for {e}");
        let mut compared = 0;
        for _ in 0..8 {
            let bind = sample_bindings(&mut s);
            match (e.eval(&bind, &st), s1.eval(&bind, &st)) {
                (Ok(a), Ok(bv)) => {
                    assert!(
                        (a - bv).abs() <= 1e-12 * (1.0 + a.abs()),
                        "simplify changed value of {e}: {a} vs {bv}"
                    );
                    compared += 1;
                }
                _ => continue,
            }
        }
        if compared > 0 {
            checked += 1;
        }
    }
}

#[test]
fn property_diff_linearity_and_finite_difference() {
    let st = SymbolTable::new();
    let mut s = Sampler::new(99);
    let mut checked = 0;
    while checked < 50 {
        let e1 = random_expr(&mut s, 2);
        let e2 = random_expr(&mut s, 2);
        let a = Expr::ratio(s.int(1, 5), s.int(1, 3));
        let bq = Expr::ratio(s.int(1, 5), s.int(1, 3));
        let combo = Expr::Sum(vec![
            Expr::Prod(vec![a.clone(), e1.clone()]),
            Expr::Prod(vec![bq.clone(), e2.clone()]),
        ]);
        let lhs = match combo.diff("z", &st) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let rhs = Expr::Sum(vec![
            Expr::Prod(vec![a, e1.diff("z", &st).unwrap()]),
            Expr::Prod(vec![bq, e2.diff("z", &st).unwrap()]),
        ]);
        let bind = sample_bindings(&mut s);
        let (lv, rv) = match (lhs.eval(&bind, &st), rhs.eval(&bind, &st)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => continue,
        };
        assert!((lv - rv).abs() <= 1e-10 * (1.0 + lv.abs()));

        // derivative vs central finite difference
        let h = 1e-5;
        let z0 = bind["z"];
        let mut bp = bind.clone();
        bp.insert("z".into(), z0 + h);
        let mut bm = bind.clone();
        bm.insert("z".into(), z0 - h);
        let combo_d = match combo.eval(&bind, &st) {
            Ok(_) => combo.diff("z", &st).unwrap(),
            Err(_) => continue,
        };
        match (combo.eval(&bp, &st), combo.eval(&bm, &st), combo_d.eval(&bind, &st)) {
            (Ok(fp), Ok(fm), Ok(dv)) => {
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (dv - fd).abs() / (1.0 + dv.abs()) < 1e-6,
                    "diff vs FD mismatch: {dv} vs {fd} for {combo}"
                );
                checked += 1;
            }
            _ => continue,
        }
    }
}

fn ranges_ztu() -> SampleRanges {
    SampleRanges::new()
        .with("z", 0.5, 2.0)
        .with("t", 0.5, 2.0)
        .with("u", 0.5, 2.0)
}

#[test]
fn zero_check_paths() {
    let st = st_with_power_j();
    let ranges = ranges_ztu();
    let mut s = Sampler::new(5);
    // normal-form zero
    let e = parse("z^2 - z*z").unwrap();
    let chk = is_zero(&e, &st, &ranges, &mut s, 20, 1e-10);
    assert!(chk.is_zero && chk.path == ZeroPath::NormalForm);
    // sampled zero: J(u)/K(u) - u/2 vanishes for the power-law pair but the
    // normal form cannot know that
    let e = parse("J(u)/K(u) - u/2").unwrap();
    let chk = is_zero(&e, &st, &ranges, &mut s, 20, 1e-10);
    assert!(chk.is_zero && chk.path == ZeroPath::Sampled, "{chk:?}");
    // non-zero
    let e = parse("J(u)/K(u) - u/3").unwrap();
    let chk = is_zero(&e, &st, &ranges, &mut s, 20, 1e-10);
    assert!(!chk.is_zero);
}
