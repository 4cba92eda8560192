use halfmap::commutators::{op_r3, op_s, op_s_tilde, op_t};
use halfmap::flow::{decay_exponent, required_constant, seq_check, DyadicSequence};
use halfmap::littlewood_paley::DyadicPartition;
use halfmap::norms::{bmo, bmo_vector, hardy, sobolev, BmoVariant};
use halfmap::synth::{band_limited, band_limited_matrix, band_limited_vector, trial_rng, Band};
use halfmap::torus::{analyze, frac_laplacian, synthesize};
use halfmap::{MatrixField, ScalarField, TorusGrid, VectorField};
use proptest::prelude::*;

fn grid(n: usize) -> TorusGrid {
    TorusGrid::standard(n).unwrap()
}

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    (a - b).max_abs()
}

fn vmax_diff(a: &VectorField, b: &VectorField) -> f64 {
    a.sub(b).unwrap().max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip(v in samples(64)) {
        let g = grid(64);
        let f = ScalarField::new(&g, v).unwrap();
        let back = synthesize(&analyze(&f).unwrap()).unwrap();
        prop_assert!(max_diff(&f, &back) < 1e-12);
    }

    #[test]
    fn plancherel(v in samples(128)) {
        let g = grid(128);
        let f = ScalarField::new(&g, v).unwrap();
        let c = analyze(&f).unwrap();
        let spectral: f64 = g.period() * c.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>();
        let physical = f.l2_norm().powi(2);
        prop_assert!((spectral - physical).abs() < 1e-10 * physical.max(1.0));
    }

    #[test]
    fn fractional_powers_compose(v in samples(64), s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let g = grid(64);
        let f = ScalarField::new(&g, v).unwrap();
        let lhs = frac_laplacian(&frac_laplacian(&f, s).unwrap(), t).unwrap();
        let rhs = frac_laplacian(&f, s + t).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-9 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn sobolev_is_a_seminorm(a in samples(64), b in samples(64), alpha in -5.0f64..5.0) {
        let g = grid(64);
        let f = ScalarField::new(&g, a).unwrap();
        let h = ScalarField::new(&g, b).unwrap();
        let nf = sobolev(&f, 0.5).unwrap();
        prop_assert!((sobolev(&f.scale(alpha), 0.5).unwrap() - alpha.abs() * nf).abs() < 1e-10 * (1.0 + nf));
        prop_assert!(sobolev(&(&f + &h), 0.5).unwrap() <= nf + sobolev(&h, 0.5).unwrap() + 1e-10);
        prop_assert!(sobolev(&f.shift(alpha), 0.5).unwrap() - nf < 1e-10 * (1.0 + nf));
    }

    #[test]
    fn bmo_ignores_constants_and_scales(v in samples(64), c in -5.0f64..5.0, alpha in -3.0f64..3.0) {
        let g = grid(64);
        let f = ScalarField::new(&g, v).unwrap();
        let base = bmo(&f, BmoVariant::L2).unwrap();
        prop_assert!((bmo(&f.shift(c), BmoVariant::L2).unwrap() - base).abs() < 1e-9 * (1.0 + base));
        let scaled = bmo(&f.scale(alpha), BmoVariant::L2).unwrap();
        prop_assert!((scaled - alpha.abs() * base).abs() < 1e-9 * (1.0 + base));
        let l1 = bmo(&f, BmoVariant::L1).unwrap();
        prop_assert!(l1 <= base + 1e-12);
        let single = VectorField::new(vec![f.clone()]).unwrap();
        prop_assert!((bmo_vector(&single) - base).abs() < 1e-12 * (1.0 + base));
    }

    #[test]
    fn hardy_is_homogeneous(seed in 0u64..1000, alpha in -4.0f64..4.0) {
        let g = grid(128);
        let f = band_limited(&g, Band::new(30, 0.5), &mut trial_rng(seed, 0)).unwrap();
        let h = hardy(&f);
        prop_assert!((hardy(&f.scale(alpha)) - alpha.abs() * h).abs() < 1e-10 * (1.0 + h));
    }

    #[test]
    fn paraproducts_recombine(seed in 0u64..1000) {
        let g = grid(256);
        let mut rng = trial_rng(seed, 0);
        let f = band_limited(&g, Band::new(60, 0.3), &mut rng).unwrap();
        let h = band_limited(&g, Band::new(60, 0.3), &mut rng).unwrap();
        let p = DyadicPartition::new(&g);
        let sum = &(&p.pi1(&f, &h).unwrap() + &p.pi2(&f, &h).unwrap()) + &p.pi3(&f, &h).unwrap();
        prop_assert!(max_diff(&sum, &(&f * &h)) <= 1e-12 * f.max_abs() * h.max_abs() * 10.0);
    }

    #[test]
    fn commutators_are_bilinear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = grid(128);
        let band = Band::new(20, 0.7);
        let mut rng = trial_rng(seed, 0);
        let q1 = band_limited_matrix(&g, 2, 3, band, &mut rng).unwrap();
        let q2 = band_limited_matrix(&g, 2, 3, band, &mut rng).unwrap();
        let u1 = band_limited_vector(&g, 3, band, &mut rng).unwrap();
        let u2 = band_limited_vector(&g, 3, band, &mut rng).unwrap();
        let q = q1.scale(a).add(&q2.scale(b)).unwrap();
        let u = u1.scale(a).add(&u2.scale(b)).unwrap();
        type Op = fn(&MatrixField, &VectorField) -> halfmap::Result<VectorField>;
        for op in [op_t as Op, op_s, op_r3, op_s_tilde] {
            let left = op(&q, &u1).unwrap();
            let left_want = op(&q1, &u1).unwrap().scale(a).add(&op(&q2, &u1).unwrap().scale(b)).unwrap();
            let right = op(&q1, &u).unwrap();
            let right_want = op(&q1, &u1).unwrap().scale(a).add(&op(&q1, &u2).unwrap().scale(b)).unwrap();
            let scale = 1.0 + left_want.max_abs() + right_want.max_abs();
            prop_assert!(vmax_diff(&left, &left_want) < 1e-10 * scale);
            prop_assert!(vmax_diff(&right, &right_want) < 1e-10 * scale);
        }
    }

    #[test]
    fn beta_decreases_in_c(c in 1e-3f64..1e3, factor in 1.01f64..10.0) {
        let (tau, beta) = decay_exponent(c).unwrap();
        let (tau2, beta2) = decay_exponent(c * factor).unwrap();
        prop_assert!(beta2 < beta && tau2 > tau);
        prop_assert!(beta > 0.0 && beta < 0.5);
    }

    #[test]
    fn decay_follows_from_the_hypothesis(
        head in prop::collection::vec(0.0f64..2.0, 1..30),
        tail in prop::collection::vec(0.01f64..2.0, 1..6),
    ) {
        let start = -(head.len() as i64) + 1;
        let mut values = head;
        values.extend(tail);
        let a = DyadicSequence::new(start, values).unwrap();
        let c = required_constant(&a);
        prop_assume!(c > 0.0);
        let report = seq_check(&a, c).unwrap();
        prop_assert!(report.hypothesis_holds());
        prop_assert!(report.conclusion_holds());
    }
}
