use proptest::prelude::*;

use radial_gauge::expr::{parse, BinOp, EvalError, Expr, Func};

const N: usize = 3;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-50.0f64..50.0).prop_map(Expr::Const),
        (1usize..=N).prop_map(Expr::Var),
    ]
}

fn any_expr() -> impl Strategy<Value = Expr> {
    let ops = prop_oneof![
        Just(BinOp::Add),
        Just(BinOp::Sub),
        Just(BinOp::Mul),
        Just(BinOp::Div),
        Just(BinOp::Pow),
    ];
    let funcs = prop_oneof![
        Just(Func::Sin),
        Just(Func::Cos),
        Just(Func::Tan),
        Just(Func::Exp),
        Just(Func::Log),
        Just(Func::Sqrt),
        Just(Func::Abs),
        Just(Func::Atan),
    ];
    leaf().prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (ops.clone(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Binary(
                op,
                Box::new(a),
                Box::new(b)
            )),
            (funcs.clone(), inner).prop_map(|(f, a)| Expr::Call(f, vec![a])),
        ]
    })
}

fn same_outcome(a: &Result<f64, EvalError>, b: &Result<f64, EvalError>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()),
        (Err(x), Err(y)) => std::mem::discriminant(x) == std::mem::discriminant(y),
        _ => false,
    }
}

fn points() -> Vec<Vec<f64>> {
    (0..100)
        .map(|m| {
            let t = m as f64 * 0.37;
            vec![t.sin() * 2.0, (1.3 * t).cos() * 1.5, 0.01 * m as f64 - 0.5]
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_form_reparses_to_same_values(ast in any_expr()) {
        let text = ast.to_string();
        let back = parse(&text, N).expect("printed form parses");
        prop_assert_eq!(back.to_string(), text.clone());
        for p in points() {
            prop_assert!(same_outcome(&ast.eval(&p), &back.eval(&p)), "{} at {:?}", text, p);
        }
    }

    #[test]
    fn evaluation_is_pure(ast in any_expr(), p in prop::collection::vec(-3.0f64..3.0, N)) {
        let first = ast.eval(&p);
        let second = ast.eval(&p);
        prop_assert!(same_outcome(&first, &second));
    }

    #[test]
    fn successful_evaluations_are_finite(ast in any_expr(), p in prop::collection::vec(-3.0f64..3.0, N)) {
        if let Ok(v) = ast.eval(&p) {
            prop_assert!(v.is_finite());
        }
    }

    #[test]
    fn multiplication_binds_tighter_than_addition(a in -9.0f64..9.0, b in -9.0f64..9.0, c in -9.0f64..9.0) {
        let e = parse("x1 + x2 * x3", 3).unwrap();
        prop_assert_eq!(e.eval(&[a, b, c]).unwrap(), a + b * c);
        let e = parse("x1 - x2 - x3", 3).unwrap();
        prop_assert_eq!(e.eval(&[a, b, c]).unwrap(), (a - b) - c);
        let e = parse("x1 / x2 * x3", 3).unwrap();
        if b != 0.0 {
            prop_assert_eq!(e.eval(&[a, b, c]).unwrap(), (a / b) * c);
        }
    }

    #[test]
    fn power_binds_tighter_than_negation(a in 0.1f64..3.0, b in -2.0f64..2.0) {
        let e = parse("-x1^x2", 2).unwrap();
        prop_assert_eq!(e.eval(&[a, b]).unwrap(), -(a.powf(b)));
    }

    #[test]
    fn variables_beyond_dimension_are_rejected(i in 3usize..20) {
        let source = format!("x{} + 1", i);
        prop_assert!(parse(&source, 2).is_err());
    }
}

#[test]
fn power_is_right_associative() {
    assert_eq!(parse("2^3^2", 1).unwrap().eval(&[0.0]).unwrap(), 512.0);
    assert_eq!(parse("2^-1", 1).unwrap().eval(&[0.0]).unwrap(), 0.5);
}

#[test]
fn domain_errors_are_reported() {
    let e = parse("log(x1)", 1).unwrap();
    assert!(matches!(e.eval(&[0.0]), Err(EvalError::LogDomain(_))));
    let e = parse("1 / x1", 1).unwrap();
    assert!(matches!(e.eval(&[0.0]), Err(EvalError::DivisionByZero)));
    let e = parse("sqrt(x1)", 1).unwrap();
    assert!(matches!(e.eval(&[-1.0]), Err(EvalError::SqrtDomain(_))));
    let e = parse("exp(x1)", 1).unwrap();
    assert!(matches!(e.eval(&[1e4]), Err(EvalError::NonFinite(_))));
}
