use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pleat::algebra::{angular_distance, IndexTables};
use pleat::flags::{random_complex, triple_ratio, CMat, Flag};
use pleat::obstruction::{
    clock_shift_rep, fuchsian_rep, lift_independence, ob, symmetric_power, torus_rep, LiftedRep, ObError,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_sl2(rng: &mut ChaCha8Rng) -> CMat {
    loop {
        let m = DMatrix::from_fn(2, 2, |_, _| random_complex(rng));
        let det = m.determinant();
        if det.norm() > 0.1 {
            return m / det.sqrt();
        }
    }
}

/// [v | w] with w ⟂ v, both unit length, so the determinant has modulus 1.
fn unit_frame(rng: &mut ChaCha8Rng) -> CMat {
    let (a, b) = (random_complex(rng), random_complex(rng));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let m = CMat::from_row_slice(2, 2, &[a / n, -b.conj() / n, b / n, a.conj() / n]);
    let det = m.determinant();
    m / det.sqrt()
}

fn angle(x: &pleat::algebra::GroupElement) -> f64 {
    match x.to_cylinder() {
        pleat::algebra::GroupElement::Cylinder(_, a) => a,
        _ => unreachable!(),
    }
}

#[test]
fn clock_shift_class_is_a_generator() {
    for d in 2..=7 {
        let o = ob(&clock_shift_rep(d, 2)).unwrap();
        let a = angle(&o.value);
        let want = 2.0 * PI / d as f64;
        let err = angular_distance(a, want).min(angular_distance(a, -want));
        assert!(err <= 1e-9, "d={d} angle {a}");
    }
}

// Beyond d = 4 the relator word's partial products pass 1e4 and float64
// rounding of the Sym^{d-1} entries alone moves the product by more than 1e-6.
const FUCHSIAN_MAX_D: usize = 4;

#[test]
fn fuchsian_symmetric_powers_lift() {
    for d in 2..=FUCHSIAN_MAX_D {
        let o = ob(&fuchsian_rep(d).unwrap()).unwrap();
        assert!(o.value.is_zero(1e-6), "d={d}: {}", o.value);
        assert!(o.residual < 1e-6);
    }
}

#[test]
fn rejects_bad_input() {
    let mut r = LiftedRep::identity(3, 2);
    r.generators[0] *= Complex64::new(2.0, 0.0);
    assert!(matches!(ob(&r), Err(ObError::Determinant(..))));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut r = LiftedRep::identity(2, 2);
    r.generators[0] = random_sl2(&mut rng);
    r.generators[1] = random_sl2(&mut rng);
    assert!(matches!(ob(&r), Err(ObError::NotScalar(_))));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn torus_reps_are_trivial(seed in 0u64..10_000, d in 2usize..8, g in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = ob(&torus_rep(&mut rng, d, g)).unwrap();
        prop_assert!(o.value.is_zero(1e-9));
    }

    #[test]
    fn invariance(seed in 0u64..10_000, d in 2usize..8, rot in 0usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut reps = vec![clock_shift_rep(d, 2), LiftedRep::identity(d, 2)];
        if d <= FUCHSIAN_MAX_D {
            reps.push(fuchsian_rep(d).unwrap());
        }
        for rep in reps {
            prop_assert!(lift_independence(&rep, &mut rng, rot).unwrap());
            let p = CMat::identity(d, d) + DMatrix::from_fn(d, d, |_, _| random_complex(&mut rng) * 0.2);
            let a = ob(&rep).unwrap();
            let b = ob(&rep.conjugate(&p).unwrap()).unwrap();
            prop_assert!(a.value.approx_eq(&b.value, 1e-6));
            prop_assert_eq!(a.residue, b.residue);
        }
    }

    #[test]
    fn symmetric_power_is_multiplicative(seed in 0u64..10_000, d in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = (random_sl2(&mut rng), random_sl2(&mut rng));
        let lhs = symmetric_power(&(&m * &n), d).unwrap();
        let rhs = symmetric_power(&m, d).unwrap() * symmetric_power(&n, d).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn veronese_triples_have_unit_triple_ratios(seed in 0u64..10_000, d in 3usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // the flag of a line [v] is Sym^{d−1} of any unimodular [v | w]
        let flags: Vec<Flag> = (0..3)
            .map(|_| Flag::new(symmetric_power(&unit_frame(&mut rng), d).unwrap()).unwrap())
            .collect();
        let t = [flags[0].clone(), flags[1].clone(), flags[2].clone()];
        for j in &IndexTables::new(d).unwrap().b {
            let x = triple_ratio(&t, *j).unwrap();
            prop_assert!((x - Complex64::new(1.0, 0.0)).norm() < 1e-8, "T^{} = {}", j, x);
        }
    }
}
