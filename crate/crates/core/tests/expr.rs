use diskflow::expr::{parse, AnalyticExpr, ExprError, Jet3, Node};
use diskflow::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn leaf() -> impl Strategy<Value = Node> {
    prop_oneof![
        3 => Just(Node::Var),
        2 => (0u32..1000).prop_map(|k| Node::Const(c(f64::from(k) / 8.0, 0.0))),
        1 => (0.0f64..1e6).prop_map(|x| Node::Const(c(x, 0.0))),
        1 => Just(Node::Const(c(0.0, 1.0))),
    ]
}

/// Trees whose constants print exactly: non-negative reals and `i`.
fn tree() -> impl Strategy<Value = Node> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        let b = |n: Node| Box::new(n);
        prop_oneof![
            inner.clone().prop_map(move |a| Node::Neg(b(a))),
            inner.clone().prop_map(move |a| Node::Exp(b(a))),
            inner.clone().prop_map(move |a| Node::Log(b(a))),
            inner.clone().prop_map(move |a| Node::Sqrt(b(a))),
            (inner.clone(), -64i32..=64).prop_map(move |(a, n)| Node::PowInt(b(a), n)),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Node::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Node::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Node::Mul(b(x), b(y))),
            (inner.clone(), inner).prop_map(move |(x, y)| Node::Div(b(x), b(y))),
        ]
    })
}

fn disk_point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(r, a)| Complex64::from_polar(r, a))
}

/// Coefficients `p_0..p_d` of a polynomial with complex coefficients.
fn polynomial() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b)), 1..=7)
}

/// Horner form `p_0 + z*(p_1 + z*(...))`.
fn horner(coeffs: &[Complex64]) -> AnalyticExpr {
    let mut node = Node::Const(*coeffs.last().unwrap());
    for &p in coeffs.iter().rev().skip(1) {
        node = Node::Add(
            Box::new(Node::Const(p)),
            Box::new(Node::Mul(Box::new(Node::Var), Box::new(node))),
        );
    }
    AnalyticExpr::new(node)
}

/// `d^k/dz^k sum p_j z^j`, term by term.
fn symbolic(coeffs: &[Complex64], k: usize, z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(k)
        .map(|(j, p)| {
            let falling: f64 = (0..k).map(|i| (j - i) as f64).product();
            p * falling * z.powi((j - k) as i32)
        })
        .sum()
}

/// `k!/(2 pi i) * contour integral of e(w)/(w-z)^(k+1)` on `|w - z| = r`,
/// by the trapezoidal rule; uses values only.
fn cauchy(e: &AnalyticExpr, z: Complex64, r: f64, k: usize) -> Option<Complex64> {
    const N: usize = 64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..N {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / N as f64);
        sum += e.eval(z + r * w).ok()? * w.powi(-(k as i32));
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    Some(sum * fact / (N as f64 * r.powi(k as i32)))
}

fn primitive(name: &str) -> AnalyticExpr {
    let arg = Box::new(Node::Var);
    AnalyticExpr::new(match name {
        "exp" => Node::Exp(arg),
        "log" => Node::Log(arg),
        "sqrt" => Node::Sqrt(arg),
        "recip" => Node::Div(Box::new(Node::Const(c(1.0, 0.0))), arg),
        "cube" => Node::PowInt(arg, 3),
        "inv_square" => Node::PowInt(arg, -2),
        _ => unreachable!(),
    })
}

#[test]
fn composite_jet_against_hand_derivatives() {
    // e = exp(z) / (1 + z^2)
    let e = parse("exp(z)/(1+z^2)").unwrap();
    let z = c(0.3, -0.2);
    let q = 1.0 + z * z;
    let d1 = z.exp() * (q - 2.0 * z) / (q * q);
    let j = e.eval_jet(z).unwrap();
    assert!((j.c0 - z.exp() / q).norm() < 1e-15);
    assert!((j.c1 - d1).norm() < 1e-14);
}

#[test]
fn log_map_parses_and_evaluates() {
    let text = "(2*z+(1-z)*log(2/(1-z)))/(2+(1-z)*log(2/(1-z)))";
    let e = parse(text).unwrap();
    // at z = 0: (0 + ln 2) / (2 + ln 2)
    let l = 2f64.ln();
    assert!((e.eval(c(0.0, 0.0)).unwrap() - l / (2.0 + l)).norm() < 1e-15);
    assert!(matches!(e.eval(c(1.0, 0.0)), Err(ExprError::DivisionByZero)));
}

#[test]
fn jet_is_exact_for_polynomials_through_order_three() {
    let e = parse("z^5 - 3*z^3 + z").unwrap();
    let z = c(2.0, 0.0);
    let j = e.eval_jet(z).unwrap();
    assert_eq!(j, Jet3::new(c(10.0, 0.0), c(45.0, 0.0), c(124.0, 0.0), c(222.0, 0.0)));
}

#[test]
fn primitives_against_cauchy_integrals() {
    for name in ["exp", "log", "sqrt", "recip", "cube", "inv_square"] {
        let e = primitive(name);
        for z in [c(0.6, 0.3), c(0.5, -0.4), c(1.2, 0.0)] {
            let j = e.eval_jet(z).unwrap();
            for k in 1..=3 {
                let oracle = cauchy(&e, z, 0.1, k).unwrap();
                let got = j.component(k).unwrap();
                let rel = (got - oracle).norm() / oracle.norm().max(1.0);
                assert!(rel < 1e-9, "{name} at {z}, order {k}: {got} vs {oracle}");
            }
        }
    }
}

#[test]
fn branch_cut_is_rejected_in_jets() {
    let e = parse("log(z) + 1").unwrap();
    assert!(matches!(e.eval_jet(c(-0.3, 0.0)), Err(ExprError::BranchCut { func: "log", .. })));
    assert!(e.eval_jet(c(-0.3, 1e-9)).is_ok());
}

#[test]
fn deep_nesting_parses() {
    let text = format!("{}z{}", "(".repeat(200), ")".repeat(200));
    assert_eq!(parse(&text).unwrap().root(), &Node::Var);
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(node in tree()) {
        let e = AnalyticExpr::new(node);
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, e, "{}", printed);
    }

    #[test]
    fn polynomial_jets_match_symbolic_derivatives(p in polynomial(), z in disk_point(0.9)) {
        let j = horner(&p).eval_jet(z).unwrap();
        for k in 0..=3 {
            let want = symbolic(&p, k, z);
            let got = j.component(k).unwrap();
            // size of the largest term, the scale of any cancellation
            let abs: Vec<Complex64> = p.iter().map(|x| c(x.norm(), 0.0)).collect();
            let scale = symbolic(&abs, k, c(z.norm(), 0.0)).re;
            prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(scale), "k={} {} vs {}", k, got, want);
        }
    }

    #[test]
    fn value_and_jet_agree(node in tree(), z in disk_point(0.95)) {
        let e = AnalyticExpr::new(node);
        if let (Ok(v), Ok(j)) = (e.eval(z), e.eval_jet(z)) {
            prop_assert!((v - j.c0).norm() <= 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn exp_log_jets_against_cauchy(z in disk_point(0.8), a in 0.2f64..2.0) {
        // log(a + 1 + z) stays off its cut on the whole disk |w - z| < 0.1
        let e = parse(&format!("exp(z)*log({} + z) - sqrt(2 + z)/(3 - z)", a + 1.0)).unwrap();
        let j = e.eval_jet(z).unwrap();
        for k in 1..=3 {
            let oracle = cauchy(&e, z, 0.1, k).unwrap();
            let got = j.component(k).unwrap();
            prop_assert!((got - oracle).norm() <= 1e-9 * oracle.norm().max(1.0), "k={}", k);
        }
    }
}
