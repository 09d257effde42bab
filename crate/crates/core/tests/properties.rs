//! Property tests for the structural invariants: jump monotonicity,
//! integral algebra, phi-operator identities, and the expression
//! print/parse round trip.

use std::sync::Arc;

use proptest::prelude::*;

use tsbvp::expr::{self, BinOp, Expr, Func, Var};
use tsbvp::phi::PExponent;
use tsbvp::timescale::{Component, GridFunction, SampledTimeScale, TimeScaleSpec};

fn discrete_scale() -> impl Strategy<Value = TimeScaleSpec> {
    prop::collection::vec(0.1f64..2.0, 2..20).prop_map(|steps| {
        let mut comps = vec![Component::IsolatedPoint { x: 0.0 }];
        let mut x = 0.0;
        for s in steps {
            x += s;
            comps.push(Component::IsolatedPoint { x });
        }
        TimeScaleSpec::new(comps).expect("strictly increasing by construction")
    })
}

fn mixed_scale() -> impl Strategy<Value = (TimeScaleSpec, f64)> {
    (
        prop::collection::vec((any::<bool>(), 0.1f64..0.9, 0.05f64..0.5), 1..5),
        0.05f64..0.25,
    )
        .prop_map(|(parts, resolution)| {
            let mut comps = Vec::new();
            let mut cursor = 0.0;
            for (i, (interval, len, gap)) in parts.into_iter().enumerate() {
                let start = if i == 0 { 0.0 } else { cursor + gap };
                if interval {
                    comps.push(Component::ClosedInterval {
                        lo: start,
                        hi: start + len,
                    });
                    cursor = start + len;
                } else {
                    comps.push(Component::IsolatedPoint { x: start });
                    cursor = start;
                }
            }
            if cursor == 0.0 {
                comps.push(Component::IsolatedPoint { x: 0.5 });
            }
            (
                TimeScaleSpec::new(comps).expect("ordered by construction"),
                resolution,
            )
        })
}

fn grid_with_values(
    scale: impl Strategy<Value = TimeScaleSpec>,
) -> impl Strategy<Value = (Arc<SampledTimeScale>, Vec<f64>)> {
    scale.prop_flat_map(|spec| {
        let grid = Arc::new(SampledTimeScale::sample(&spec, 1.0).unwrap());
        let n = grid.len();
        (Just(grid), prop::collection::vec(-10.0f64..10.0, n..=n))
    })
}

proptest! {
    #[test]
    fn jumps_are_monotone_and_bracket_the_point((spec, res) in mixed_scale()) {
        let g = SampledTimeScale::sample(&spec, res).unwrap();
        for i in 0..g.len() {
            prop_assert!(g.rho(i) <= g.point(i));
            prop_assert!(g.point(i) <= g.sigma(i));
            if i > 0 {
                prop_assert!(g.sigma(i - 1) <= g.sigma(i));
                prop_assert!(g.rho(i - 1) <= g.rho(i));
            }
        }
    }

    #[test]
    fn every_spec_landmark_is_a_grid_node((spec, res) in mixed_scale()) {
        let g = SampledTimeScale::sample(&spec, res).unwrap();
        for c in spec.components() {
            prop_assert!(g.index_of(c.min()).is_ok());
            prop_assert!(g.index_of(c.max()).is_ok());
        }
        for &t in g.points() {
            prop_assert!(spec.contains(t));
        }
    }

    #[test]
    fn discrete_integrals_match_literal_sums((grid, values) in grid_with_values(discrete_scale())) {
        let u = GridFunction::new(grid.clone(), values).unwrap();
        let t = grid.points();
        let n = grid.len();
        let mut delta = 0.0;
        for i in 0..n - 1 {
            delta += u.value(i) * (t[i + 1] - t[i]);
        }
        let mut nabla = 0.0;
        for i in 1..n {
            nabla += u.value(i) * (t[i] - t[i - 1]);
        }
        // same summation order: bit-for-bit
        prop_assert_eq!(u.delta_integral(0.0, grid.horizon()).unwrap(), delta);
        prop_assert_eq!(u.nabla_integral(0.0, grid.horizon()).unwrap(), nabla);
    }

    #[test]
    fn integral_additivity(
        (grid, values) in grid_with_values(discrete_scale()),
        cuts in (any::<u16>(), any::<u16>()),
    ) {
        let u = GridFunction::new(grid.clone(), values).unwrap();
        let n = grid.len();
        let mut mid = [cuts.0 as usize % n, cuts.1 as usize % n];
        mid.sort_unstable();
        let (a, b, c) = (grid.point(0), grid.point(mid[0]), grid.point(mid[1]));
        for (whole, left, right) in [
            (u.delta_integral(a, grid.horizon()).unwrap(),
             u.delta_integral(a, c).unwrap(),
             u.delta_integral(c, grid.horizon()).unwrap()),
            (u.delta_integral(a, c).unwrap(),
             u.delta_integral(a, b).unwrap(),
             u.delta_integral(b, c).unwrap()),
            (u.nabla_integral(a, c).unwrap(),
             u.nabla_integral(a, b).unwrap(),
             u.nabla_integral(b, c).unwrap()),
        ] {
            prop_assert!((whole - (left + right)).abs() <= 1e-12 * (1.0 + whole.abs()));
        }
    }

    #[test]
    fn integral_linearity(
        (grid, values) in grid_with_values(discrete_scale()),
        alpha in -5.0f64..5.0,
        beta in -5.0f64..5.0,
    ) {
        let u = GridFunction::new(grid.clone(), values.clone()).unwrap();
        let shifted: Vec<f64> = values.iter().map(|v| v * 0.3 + 1.0).collect();
        let v = GridFunction::new(grid.clone(), shifted).unwrap();
        let combo = u.linear_combination(alpha, &v, beta).unwrap();
        let t0 = grid.point(0);
        let tn = grid.horizon();
        let lhs = combo.delta_integral(t0, tn).unwrap();
        let rhs = alpha * u.delta_integral(t0, tn).unwrap() + beta * v.delta_integral(t0, tn).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        let lhs = combo.nabla_integral(t0, tn).unwrap();
        let rhs = alpha * u.nabla_integral(t0, tn).unwrap() + beta * v.nabla_integral(t0, tn).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
    }

    #[test]
    fn fundamental_theorem_on_discrete_scales((grid, values) in grid_with_values(discrete_scale())) {
        let u = GridFunction::new(grid.clone(), values).unwrap();
        let d = u.delta_derivative().unwrap();
        let total = d.delta_integral(grid.point(0), grid.horizon()).unwrap();
        let expected = u.value(grid.len() - 1) - u.value(0);
        prop_assert!((total - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn phi_is_odd_and_increasing(p in 1.1f64..10.0, s in -1e4f64..1e4, gap in 1e-3f64..1e3) {
        let e = PExponent::new(p).unwrap();
        prop_assert_eq!(e.phi(-s), -e.phi(s));
        prop_assert!(e.phi(s) < e.phi(s + gap));
    }

    #[test]
    fn phi_round_trip(p in 1.1f64..10.0, s in -1e6f64..1e6) {
        let e = PExponent::new(p).unwrap();
        let back = e.phi_inv(e.phi(s));
        prop_assert!((back - s).abs() <= 1e-9 * s.abs().max(1.0));
        let back = e.phi(e.phi_inv(s));
        prop_assert!((back - s).abs() <= 1e-9 * s.abs().max(1.0));
    }

    #[test]
    fn phi_positive_homogeneity(p in 1.1f64..10.0, s in -1e4f64..1e4, lambda in 0.01f64..100.0) {
        let e = PExponent::new(p).unwrap();
        let lhs = e.phi(lambda * s);
        let rhs = e.phi(lambda) * e.phi(s);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000u32, 1u32..1000u32).prop_map(|(a, b)| Expr::Number(f64::from(a) / f64::from(b))),
        (0u32..100000u32).prop_map(|a| Expr::Number(f64::from(a))),
        Just(Expr::Variable(Var::U)),
        Just(Expr::Variable(Var::T)),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (
                inner.clone(),
                inner.clone(),
                prop::sample::select(vec![
                    BinOp::Add,
                    BinOp::Sub,
                    BinOp::Mul,
                    BinOp::Div,
                    BinOp::Pow
                ]),
            )
                .prop_map(|(a, b, op)| Expr::Binary(op, Box::new(a), Box::new(b))),
            (
                inner.clone(),
                prop::sample::select(vec![
                    Func::Abs,
                    Func::Exp,
                    Func::Log,
                    Func::Sqrt,
                    Func::Sin,
                    Func::Cos
                ]),
            )
                .prop_map(|(a, f)| Expr::Call(f, vec![a])),
            (
                inner.clone(),
                inner,
                prop::sample::select(vec![Func::Min, Func::Max, Func::Pow]),
            )
                .prop_map(|(a, b, f)| Expr::Call(f, vec![a, b])),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(ast in arb_expr()) {
        let printed = ast.to_string();
        let reparsed = expr::parse(&printed);
        prop_assert_eq!(reparsed.as_ref(), Ok(&ast), "printed form: {}", printed);
    }

    #[test]
    fn eval_is_deterministic(ast in arb_expr(), u in 0.0f64..10.0, t in 0.0f64..10.0) {
        let a = ast.eval(Some(u), Some(t));
        let b = ast.eval(Some(u), Some(t));
        prop_assert_eq!(a, b);
    }
}
