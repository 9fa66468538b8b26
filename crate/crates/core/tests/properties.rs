use std::sync::OnceLock;

use gpw_core::expr::{parse, Coord, Expression};
use gpw_core::geodesic::Geodesics;
use gpw_core::invariant::{alpha_direct, enumerate_schemes, ContractionScheme, CurvatureData};
use gpw_core::linalg::Matrix;
use gpw_core::manifold::{nabla_r_closed, CurvatureOracle, ManifoldConfig};
use gpw_core::scalar::{ratio, Rational};
use gpw_core::tensor::{SparseTensor, Symmetry, Variance};
use proptest::prelude::*;

fn config(p: usize, f: &str) -> ManifoldConfig {
    ManifoldConfig::new(p, parse(f).unwrap()).unwrap()
}

/// `Σ c_i z0^{a_i} z1^{b_i}`.
fn polynomial(terms: &[(i64, u32, u32)]) -> Expression {
    Expression::sum(terms.iter().map(|&(c, a, b)| {
        Expression::product([
            Expression::int(c),
            Expression::pow(Expression::var(Coord::Z(0)), a),
            Expression::pow(Expression::var(Coord::Z(1)), b),
        ])
    }))
}

fn terms() -> impl Strategy<Value = Vec<(i64, u32, u32)>> {
    prop::collection::vec((-5i64..=5, 0u32..5, 0u32..4), 1..6)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn coord() -> impl Strategy<Value = Coord> {
    prop_oneof![Just(Coord::Z(0)), Just(Coord::Z(1))]
}

fn rational_point(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), dim)
}

fn dense_tensor(dim: usize, order: usize, variance: Variance) -> impl Strategy<Value = SparseTensor<Rational>> {
    prop::collection::vec(prop_oneof![2 => Just(0i64), 3 => -4i64..=4], dim.pow(order as u32)).prop_map(
        move |vals| {
            let mut t = SparseTensor::new(dim, vec![variance; order], Symmetry::None);
            for (flat, v) in vals.into_iter().enumerate() {
                if v != 0 {
                    let idx: Vec<usize> = (0..order).rev().map(|s| (flat / dim.pow(s as u32)) % dim).collect();
                    t.insert(&idx, ratio(v, 1));
                }
            }
            t
        },
    )
}

fn matrix(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(-3i64..=3, n * n).prop_map(move |v| Matrix::from_fn(n, n, |i, j| ratio(v[i * n + j], 1)))
}

fn entry(t: &SparseTensor<Rational>, idx: &[usize]) -> Rational {
    t.get(idx).unwrap_or_else(|| ratio(0, 1))
}

static ORACLE: OnceLock<(ManifoldConfig, CurvatureOracle)> = OnceLock::new();

fn h_10_2() -> &'static (ManifoldConfig, CurvatureOracle) {
    ORACLE.get_or_init(|| {
        let c = config(1, "(+ (* z1 (^ z0 2)) (^ z0 4))");
        let o = CurvatureOracle::for_config(&c, 2).unwrap();
        (c, o)
    })
}

static SCHEMES: OnceLock<Vec<ContractionScheme>> = OnceLock::new();

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_partials_commute(t in terms(), a in coord(), b in coord(), z0 in small_rational(), z1 in small_rational()) {
        let f = polynomial(&t);
        let at = [(Coord::Z(0), z0), (Coord::Z(1), z1)];
        let ab: Rational = f.multi_partial(&[a, b]).eval(&at).unwrap();
        let ba: Rational = f.multi_partial(&[b, a]).eval(&at).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn derivative_matches_central_difference(t in terms(), rate in -2i64..=2, z0 in -1.0f64..1.0, z1 in -1.0f64..1.0) {
        let f = Expression::sum([
            polynomial(&t),
            Expression::exp(Expression::product([Expression::int(rate), Expression::var(Coord::Z(0))])),
        ]);
        let h = 1e-5;
        let eval = |x: f64| -> f64 { f.eval(&[(Coord::Z(0), x), (Coord::Z(1), z1)]).unwrap() };
        let exact: f64 = f.differentiate(Coord::Z(0)).eval(&[(Coord::Z(0), z0), (Coord::Z(1), z1)]).unwrap();
        let fd = (eval(z0 + h) - eval(z0 - h)) / (2.0 * h);
        prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{} vs {}", exact, fd);
    }

    #[test]
    fn sparse_contraction_matches_dense(
        a in dense_tensor(4, 2, Variance::Co),
        b in dense_tensor(4, 3, Variance::Co),
        g in dense_tensor(4, 2, Variance::Contra),
        s1 in 0usize..2,
        s2 in 0usize..3,
    ) {
        let c = a.contract(s1, &b, s2, &g).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut want = ratio(0, 1);
                    for x in 0..4 {
                        for y in 0..4 {
                            let mut ia = vec![i; 2];
                            ia[s1] = x;
                            let rest: Vec<usize> = [j, k].to_vec();
                            let mut ib = rest.clone();
                            ib.insert(s2, y);
                            want += entry(&a, &ia) * entry(&g, &[x, y]) * entry(&b, &ib);
                        }
                    }
                    prop_assert_eq!(entry(&c, &[i, j, k]), want);
                }
            }
        }
    }

    #[test]
    fn pullback_is_functorial(t in dense_tensor(3, 3, Variance::Co), m in matrix(3), n in matrix(3)) {
        let once = t.pullback(&m.mul(&n).unwrap()).unwrap();
        let twice = t.pullback(&m).unwrap().pullback(&n).unwrap();
        prop_assert_eq!(once.sup_distance(&twice), 0.0);
    }

    #[test]
    fn closed_curvature_matches_oracle(pt in rational_point(10), k in 0usize..=2) {
        let (c, oracle) = h_10_2();
        let closed = nabla_r_closed(c, &pt, k).unwrap();
        prop_assert_eq!(closed.sup_distance(&oracle.evaluate(&pt, k).unwrap()), 0.0);
    }

    #[test]
    fn weyl_invariants_vanish(pt in rational_point(10), pick in any::<prop::sample::Index>()) {
        let schemes = SCHEMES.get_or_init(|| enumerate_schemes(8).unwrap());
        let scheme = pick.get(schemes);
        let c = config(1, "(+ (* z1 (^ z0 2)) (^ z0 4))");
        let data = CurvatureData::for_config(&c, &pt, scheme.max_order()).unwrap();
        prop_assert_eq!(data.evaluate(scheme).unwrap(), ratio(0, 1));
    }

    #[test]
    fn exp_log_round_trip(
        base in prop::collection::vec(-1.0f64..1.0, 10),
        v in prop::collection::vec(-1.0f64..1.0, 10),
    ) {
        let c = config(1, "(+ (* z1 (^ z0 2)) (exp z0))");
        let geo = Geodesics::new(&c);
        let q = geo.exp_map(&base, &v).unwrap();
        let back = geo.log_map(&base, &q).unwrap();
        for (a, b) in back.iter().zip(&v) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn alpha_ignores_the_scale_of_psi(scale in 1i64..=9, z0 in -1.5f64..1.5, k in 2usize..=6) {
        let base = config(1, "(+ (* z1 (^ z0 2)) (exp z0) (exp (* 2 z0)))");
        let scaled = config(1, &format!("(+ (* z1 (^ z0 2)) (* {scale} (+ (exp z0) (exp (* 2 z0)))))"));
        let mut pt = vec![0.0; 10];
        pt[1] = z0;
        let a: f64 = alpha_direct(&base, &pt, k).unwrap();
        let b: f64 = alpha_direct(&scaled, &pt, k).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }
}
