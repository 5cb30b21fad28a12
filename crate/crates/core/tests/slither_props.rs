mod common;

use pleat::algebra::GroupKind;
use pleat::slither::{
    closed_form_rhs, cube_root_invariance, ob_from_product, switch_step_log, total_mid_log, PlaqueRoots,
};
use pleat::traintrack::Side;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn corfinal_and_torsion(g in 2usize..4, seed in 1u64..4, tseed in 0u64..500, d in 2usize..7, code in 0u8..4, k in 0i64..7) {
        let kind = common::kind_for(code, d);
        let s = common::space(g, seed, tseed, d, kind);
        let a = s.default_anchors().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(tseed + 17);
        let eps = kind.torsion(d, k % d as i64).unwrap_or(kind.zero());
        let c = s.i2_inverse(&s.random_free(&mut rng, &a), &eps, &a).unwrap();
        let total = total_mid_log(&s, &c).unwrap();
        let rhs = closed_form_rhs(&s, &c);
        prop_assert!(total.approx_eq(&rhs, 1e-9), "total {} rhs {}", total, rhs);
        let ob = ob_from_product(&total, d).unwrap();
        let tor = s.tor_prime(&c).unwrap().to_cylinder();
        prop_assert!(ob.approx_eq(&tor, 1e-9), "ob {} tor {}", ob, tor);
        let np = s.frame.track.plaques.len();
        let b1: Vec<i64> = (0..np).map(|_| rng.gen_range(0..3)).collect();
        let b2: Vec<i64> = (0..np).map(|_| rng.gen_range(0..3)).collect();
        prop_assert!(cube_root_invariance(&s, &c, &b1, &b2).unwrap());
    }

    #[test]
    fn left_and_right_switch_steps_mirror(seed in 0u64..500, d in 2usize..8, m in 1usize..8) {
        prop_assume!(m <= d);
        let s = common::space(2, 1, seed, d, GroupKind::Cylinder);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = s.random_diamond(&mut rng);
        let roots = PlaqueRoots::principal(&s, &c);
        let tb = &s.tables;
        let zt = &c.z[0];
        let hatted: Vec<_> = tb.b.iter().map(|j| zt[tb.b_index(&j.hat())]).collect();
        let p = s.frame.track.switch_plaque[0];
        let l = switch_step_log(m, Side::Left, zt, tb, &roots.roots[p]);
        let r = switch_step_log(d - m + 1, Side::Right, &hatted, tb, &roots.roots[p]);
        prop_assert!(l.approx_eq(&r, 1e-9));
    }
}

#[test]
fn corrupted_point_is_refused() {
    let s = common::space(2, 1, 1, 4, GroupKind::Cylinder);
    let a = s.default_anchors().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut c = s.i2_inverse(&s.random_free(&mut rng, &a), &GroupKind::Cylinder.zero(), &a).unwrap();
    let r = s.frame.class.u_right[0];
    c.v.get_mut(&r).unwrap()[1] = c.v[&r][1] + pleat::algebra::GroupElement::cylinder(0.5, 0.0);
    assert!(total_mid_log(&s, &c).is_err());
}
