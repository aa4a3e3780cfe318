use nalgebra::DMatrix;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zetageo::algebra::{clifford_check, para_mul, quad_dual, quad_duality_check, CliffordAlgebra, Paracomplex, QuadraticAlgebra};
use zetageo::cat::{channel_compose, compose, cp_check, tp_check, ChoiMatrix, StochasticMatrix};
use zetageo::cone::orthant_wdvv;
use zetageo::ffield::{FieldCtx, FqElem};
use zetageo::infogeo::{bregman, kl, Distribution, NegShannon};
use zetageo::motive::hasse_weil;
use zetageo::poly::Poly;
use zetageo::series::{rat, RatSeries};
use zetageo::variety::VarietySpec;

fn series(c: &[i64]) -> RatSeries {
    RatSeries::new(c.iter().map(|&v| rat(v, 1)).collect()).unwrap()
}

/// Small integer series with constant term 1.
fn unit_series() -> impl Strategy<Value = RatSeries> {
    prop::collection::vec(-4i64..=4, 5).prop_map(|mut c| {
        c[0] = 1;
        series(&c)
    })
}

fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

fn stochastic(rows: usize, cols: usize) -> impl Strategy<Value = StochasticMatrix> {
    prop::collection::vec(0.0f64..1.0, rows * cols).prop_map(move |v| {
        let mut m = DMatrix::from_vec(rows, cols, v);
        for j in 0..cols {
            let s: f64 = m.column(j).sum();
            if s == 0.0 {
                m[(0, j)] = 1.0;
            } else {
                m.column_mut(j).iter_mut().for_each(|x| *x /= s);
            }
        }
        StochasticMatrix::new(m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_inverts_log(a in unit_series()) {
        prop_assert_eq!(a.log().unwrap().exp().unwrap(), a);
    }

    #[test]
    fn inverse_is_two_sided(a in unit_series()) {
        let inv = a.inverse().unwrap();
        prop_assert_eq!(a.mul(&inv), RatSeries::one(4));
    }

    #[test]
    fn ghost_round_trip(a in unit_series()) {
        let g = a.ghost().unwrap();
        prop_assert_eq!(RatSeries::from_ghost(&g).unwrap(), a);
    }

    #[test]
    fn witt_product_is_componentwise_on_ghosts(a in unit_series(), b in unit_series()) {
        let ab = a.witt_mul(&b).unwrap();
        let (ga, gb) = (a.ghost().unwrap(), b.ghost().unwrap());
        let want: Vec<BigRational> = ga.iter().zip(&gb).map(|(x, y)| x * y).collect();
        prop_assert_eq!(ab.ghost().unwrap(), want);
        prop_assert_eq!(ab, b.witt_mul(&a).unwrap());
    }

    #[test]
    fn witt_product_of_geometric_series(x in -5i64..=5, y in -5i64..=5) {
        let g = |v: i64| RatSeries::geometric(6, rat(v, 1), 1);
        prop_assert_eq!(g(x).witt_mul(&g(y)).unwrap(), g(x * y));
    }

    #[test]
    fn witt_distributes_over_addition(a in unit_series(), b in unit_series(), c in unit_series()) {
        let lhs = a.witt_mul(&b.witt_add(&c).unwrap()).unwrap();
        let rhs = a.witt_mul(&b).unwrap().witt_add(&a.witt_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn field_axioms(p in prop::sample::select(vec![2u32, 3, 5, 7]), e in 1usize..=3, seed in any::<u64>()) {
        let ctx = FieldCtx::new(p, e).unwrap();
        let q = ctx.order().unwrap();
        let pick = |k: u64| ctx.from_index((seed.wrapping_mul(k + 1) >> 7) % q);
        let (a, b, c) = (pick(1), pick(2), pick(3));
        let lhs = ctx.mul(&a, &ctx.add(&b, &c));
        prop_assert_eq!(lhs, ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
        if !a.is_zero() {
            prop_assert_eq!(ctx.mul(&a, &ctx.inv(&a).unwrap()), ctx.one());
        }
        let tr = |x: &FqElem| ctx.trace_to_prime(x);
        prop_assert_eq!(tr(&ctx.add(&a, &b)), (tr(&a) + tr(&b)) % p);
        prop_assert_eq!(ctx.pow(&a, q), a);
    }

    #[test]
    fn hasse_weil_is_integral(c in prop::collection::vec(0i64..3, 4)) {
        let ctx = FieldCtx::new(3, 1).unwrap();
        let src = format!("{}*x1^2 + {}*x2 + {}*x1*x2 + {}", c[0], c[1] + 1, c[2], c[3]);
        let x = VarietySpec::affine(&ctx, 2, vec![Poly::parse(&src).unwrap()]).unwrap();
        prop_assert!(hasse_weil(&x, 4).unwrap().to_integers().is_some());
    }

    #[test]
    fn composition_is_stochastic_and_associative(
        s1 in stochastic(3, 2), s2 in stochastic(4, 3), s3 in stochastic(2, 4)
    ) {
        let left = compose(&compose(&s3, &s2).unwrap(), &s1).unwrap();
        let right = compose(&s3, &compose(&s2, &s1).unwrap()).unwrap();
        prop_assert!((left.matrix() - right.matrix()).amax() < 1e-12);
        prop_assert!(left.column_defect() < 1e-12);
    }

    #[test]
    fn divergences_are_nonnegative(x in simplex(4), y in simplex(4)) {
        let b = bregman(&NegShannon, &x, &y).unwrap();
        let d = kl(&Distribution::new(x.clone()).unwrap(), &Distribution::new(y).unwrap()).unwrap();
        prop_assert!(b >= -1e-15 && d >= -1e-15);
        prop_assert!((b - d).abs() < 1e-12);
        prop_assert!(bregman(&NegShannon, &x, &x).unwrap().abs() < 1e-15);
    }

    #[test]
    fn depolarizing_channels_compose_to_channels(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let c = channel_compose(&ChoiMatrix::depolarizing(2, a), &ChoiMatrix::depolarizing(2, b)).unwrap();
        prop_assert!(cp_check(&c) && tp_check(&c));
    }

    #[test]
    fn paracomplex_norm_is_multiplicative(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0) {
        let (z, w) = (Paracomplex::new(a, b), Paracomplex::new(c, d));
        let lhs = para_mul(z, w).norm_sq();
        prop_assert!((lhs - z.norm_sq() * w.norm_sq()).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn quadratic_duality(seed in any::<u64>(), d in 1usize..=2, k in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = QuadraticAlgebra::random(&mut rng, d, k);
        let b = QuadraticAlgebra::random(&mut rng, 2, k);
        prop_assert_eq!(quad_dual(&quad_dual(&a)), a.clone());
        prop_assert!(quad_duality_check(&a, &b));
    }

    #[test]
    fn orthant_is_always_associative(x in prop::collection::vec(0.1f64..10.0, 1..5)) {
        prop_assert!(orthant_wdvv(&x).unwrap());
    }
}

#[test]
fn clifford_signatures_up_to_five_generators() {
    for n in 0..=5 {
        for p in 0..=n {
            assert!(clifford_check(&CliffordAlgebra::new(p, n - p).unwrap()), "Cl({p},{})", n - p);
        }
    }
}
