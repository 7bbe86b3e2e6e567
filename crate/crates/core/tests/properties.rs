//! Property tests over randomly generated inputs.

use proptest::prelude::*;
use wlab_core::exprlang::parse;
use wlab_core::geometry::{christoffel_at, metric_at};
use wlab_core::growth::jensen_residual;
use wlab_core::jets::{affine_wronskian, cr_residual, wronskian};
use wlab_core::rootcount::{counting_function, locate_zeros, n_trunc, winding_number};
use wlab_core::{Complex64, CurveMap, Disc, ExprAst, TargetSpace};

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Π (z − a_k)^{m_k}` as an expression tree.
fn planted(roots: &[(Complex64, u32)]) -> ExprAst {
    roots.iter().fold(ExprAst::constant(1.0), |acc, (a, m)| {
        ExprAst::mul(acc, ExprAst::pow(ExprAst::sub(ExprAst::var(), ExprAst::Const(*a)), *m as i32))
    })
}

fn root_strategy() -> impl Strategy<Value = Vec<(Complex64, u32)>> {
    prop::collection::vec(((-4.0f64..4.0), (-4.0f64..4.0), 1u32..=3), 1..=4).prop_map(|v| {
        // Keep planted roots apart so each is isolated at leaf resolution.
        let mut out: Vec<(Complex64, u32)> = Vec::new();
        for (re, im, m) in v {
            let a = cz(re, im);
            if out.iter().all(|(b, _)| (a - b).norm() > 0.2) && (a.norm() - 5.0).abs() > 0.1 {
                out.push((a, m));
            }
        }
        out
    })
}

fn exp_poly() -> impl Strategy<Value = String> {
    (prop::collection::vec((-2.0f64..2.0, -1.5f64..1.5), 2..=3), -1.0f64..1.0).prop_map(|(terms, c0)| {
        let parts: Vec<String> =
            terms.iter().enumerate().map(|(k, (a, b))| format!("({a:.3})*exp(({b:.3})*z + {k})")).collect();
        format!("{} + ({c0:.3})*z", parts.join(" + "))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn planted_roots_are_recovered(roots in root_strategy()) {
        let h = planted(&roots);
        let zs = locate_zeros(&h, Disc::centered(5.0).unwrap()).unwrap();
        let want: u32 = roots.iter().filter(|(a, _)| a.norm() < 5.0).map(|(_, m)| m).sum();
        prop_assert_eq!(zs.total_multiplicity(), want as i64);
        for (a, m) in roots.iter().filter(|(a, _)| a.norm() < 5.0) {
            let hit = zs.zeros.iter().find(|z| (z.location - a).norm() < 1e-6);
            prop_assert!(hit.is_some(), "root {} missing from {:?}", a, zs.zeros);
            prop_assert_eq!(hit.unwrap().multiplicity, *m);
        }
        prop_assert_eq!(winding_number(&h, Disc::centered(5.0).unwrap()).unwrap(), want as i64);
    }

    #[test]
    fn truncated_counting_is_ordered(roots in root_strategy(), r in 1.0f64..4.9) {
        let zs = locate_zeros(&planted(&roots), Disc::centered(5.0).unwrap()).unwrap();
        let n1 = counting_function(&zs, r, 1).unwrap();
        let mut prev = n1;
        for k in 2..=4 {
            let nk = counting_function(&zs, r, k).unwrap();
            prop_assert!(nk >= prev - 1e-15 && nk <= k as f64 * n1 + 1e-12);
            prev = nk;
        }
        prop_assert!(counting_function(&zs, (r + 0.05).min(5.0), 2).unwrap() >= counting_function(&zs, r, 2).unwrap());
        prop_assert!(n_trunc(&zs, r, 2).unwrap() <= 2 * n_trunc(&zs, r, 1).unwrap());
    }

    #[test]
    fn zero_location_is_deterministic(roots in root_strategy()) {
        let h = planted(&roots);
        let a = locate_zeros(&h, Disc::centered(5.0).unwrap()).unwrap();
        let b = locate_zeros(&h, Disc::centered(5.0).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn jensen_holds_for_planted_polynomials(roots in root_strategy(), r in prop::sample::select(vec![2.0, 5.0]) ) {
        let roots: Vec<_> = roots.into_iter().filter(|(a, _)| (a.norm() - 1.0).abs() > 0.05 && (a.norm() - r).abs() > 0.05).collect();
        prop_assume!(!roots.is_empty());
        let res = jensen_residual(&planted(&roots), r).unwrap();
        prop_assert!(res <= 1e-5, "residual {}", res);
    }

    #[test]
    fn kahler_metrics_are_hermitian_and_symmetric(re in -2.0f64..2.0, im in -2.0f64..2.0, re2 in -2.0f64..2.0, im2 in -2.0f64..2.0) {
        let w = [cz(re, im), cz(re2, im2)];
        let g = metric_at(TargetSpace::ProjectiveFS(2), &w).unwrap();
        prop_assert!(g.max_asymmetry() <= 1e-14 && g.is_positive_definite());
        let gamma = christoffel_at(TargetSpace::ProjectiveFS(2), &w).unwrap();
        prop_assert!(gamma.max_asymmetry() <= 1e-12 * (1.0 + gamma.max_abs()));
        let b = [w[0] * 0.2, w[1] * 0.2];
        prop_assume!(b[0].norm_sqr() + b[1].norm_sqr() < 0.9);
        prop_assert!(metric_at(TargetSpace::BallBergman(2), &b).unwrap().is_positive_definite());
    }

    #[test]
    fn projective_wronskian_is_the_affine_one(e1 in exp_poly(), e2 in exp_poly(), re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let curve = CurveMap::projective(vec![ExprAst::constant(1.0), parse(&e1).unwrap(), parse(&e2).unwrap()]).unwrap();
        let z = cz(re, im);
        let (w, chart) = wronskian(&curve, z).unwrap();
        let a = affine_wronskian(&curve, z, chart).unwrap();
        prop_assert!((w - a).norm() <= 1e-9 * (1.0 + a.norm()), "{} vs {}", w, a);
        prop_assert!(cr_residual(&curve, z, 1e-4).unwrap() <= 1e-5);
    }

    #[test]
    fn series_jets_match_symbolic_derivatives(e in exp_poly(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let ast = parse(&e).unwrap();
        let z = cz(re, im);
        let s = ast.compile().series::<3>(z);
        let d1 = ast.differentiate().eval(z);
        let d2 = ast.differentiate().differentiate().eval(z);
        prop_assert!((s.derivative_at(1) - d1).norm() <= 1e-11 * (1.0 + d1.norm()));
        prop_assert!((s.derivative_at(2) - d2).norm() <= 1e-11 * (1.0 + d2.norm()));
        let back = parse(&ast.to_string()).unwrap();
        prop_assert!((back.eval(z) - ast.eval(z)).norm() <= 1e-12 * (1.0 + ast.eval(z).norm()));
    }
}
