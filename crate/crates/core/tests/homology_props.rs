mod common;

use std::collections::BTreeMap;

use pleat::algebra::{vec_distance, GroupKind};
use pleat::homology::{
    beta, boundary, delta, hat, iota_star, k_theta, solvability_defect, solve_tree, w_from_z, Chain,
    StripOrder,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn k_theta_equals_delta_of_w(seed in 1u64..6, tseed in 0u64..1000, d in 3usize..7, code in 0u8..4) {
        let kind = common::kind_for(code, d);
        let s = common::space(2, seed, tseed, d, kind);
        let mut rng = ChaCha8Rng::seed_from_u64(tseed);
        let c = s.random_diamond(&mut rng);
        let k = k_theta(&s.frame, &s.tables, kind, &c.z).unwrap();
        let w = w_from_z(&s.frame, &s.tables, kind, &c.z);
        let dw = delta(&s.frame, kind, s.tables.na(), &w);
        prop_assert!(k.distance(&dw) < 1e-9);
    }

    #[test]
    fn iota_and_hat_relations(seed in 1u64..6, tseed in 0u64..1000, d in 2usize..7) {
        let kind = GroupKind::Cylinder;
        let s = common::space(2, seed, tseed, d, kind);
        let mut rng = ChaCha8Rng::seed_from_u64(tseed ^ 77);
        let na = s.tables.na();
        let mut tree = BTreeMap::new();
        let mut free = BTreeMap::new();
        for r in 0..s.frame.track.nrect() {
            let v = kind.sample_vec(&mut rng, na);
            if s.frame.tree.edges[r] { tree.insert(r, v); } else { free.insert(r, v); }
        }
        let b = beta(&s.frame, kind, na, &tree, &free).unwrap();
        prop_assert!(iota_star(&b).distance(&hat(&b).neg()) < 1e-12);
        // ∂ commutes with the deck involution
        let lhs = boundary(&s.frame, &iota_star(&b));
        let rhs = iota_star(&boundary(&s.frame, &b));
        prop_assert!(lhs.distance(&rhs) < 1e-9);
        // boundaries have zero total coefficient
        let mut total = kind.zeros(na);
        for v in boundary(&s.frame, &b).terms.values() {
            total = pleat::algebra::vec_add(&total, v);
        }
        prop_assert!(vec_distance(&total, &kind.zeros(na)) < 1e-9);
    }

    #[test]
    fn solver_on_y_points(g in 2usize..4, seed in 1u64..4, tseed in 0u64..1000, d in 2usize..7, code in 0u8..4, k in 0i64..7) {
        let kind = common::kind_for(code, d);
        let s = common::space(g, seed, tseed, d, kind);
        let a = s.default_anchors().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(tseed + 1);
        let f = s.random_free(&mut rng, &a);
        let eps = kind.torsion(d, k % d as i64).unwrap_or(kind.zero());
        let c = s.i2_inverse(&f, &eps, &a).unwrap();
        let na = s.tables.na();
        let w = w_from_z(&s.frame, &s.tables, kind, &c.z);
        let v1 = solve_tree(&s.frame, kind, na, &c.v, &w, StripOrder::LowestFirst).unwrap();
        let v2 = solve_tree(&s.frame, kind, na, &c.v, &w, StripOrder::HighestFirst).unwrap();
        let v3 = solve_tree(&s.frame, kind, na, &c.v, &w, StripOrder::Seeded(tseed)).unwrap();
        for (r, x) in &v1 {
            prop_assert!(vec_distance(x, &v2[r]) < 1e-9);
            prop_assert!(vec_distance(x, &v3[r]) < 1e-9);
        }
        let b = beta(&s.frame, kind, na, &v1, &c.v).unwrap();
        let lhs: Chain = boundary(&s.frame, &b);
        let rhs = delta(&s.frame, kind, na, &w);
        prop_assert!(lhs.distance(&rhs) < 1e-8);
    }

    #[test]
    fn solvability_iff_balance(seed in 1u64..6, tseed in 0u64..1000, d in 2usize..7, code in 0u8..4, perturb in any::<bool>()) {
        let kind = common::kind_for(code, d);
        let s = common::space(2, seed, tseed, d, kind);
        let a = s.default_anchors().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(tseed + 2);
        let mut c = if perturb {
            s.random_diamond(&mut rng)
        } else {
            let f = s.random_free(&mut rng, &a);
            s.i2_inverse(&f, &kind.zero(), &a).unwrap()
        };
        if perturb && rng.gen_bool(0.5) {
            // break a single balance equation through one v-coordinate
            let r = *c.v.keys().next().unwrap();
            c.v.get_mut(&r).unwrap()[0] = kind.sample(&mut rng);
        }
        let na = s.tables.na();
        let w = w_from_z(&s.frame, &s.tables, kind, &c.z);
        let defect = solvability_defect(&s.frame, kind, na, &c.v, &w);
        for i in &s.tables.a {
            prop_assert!(defect[i.slot()].approx_eq(&s.club_defect(&c, *i), 1e-9));
        }
        let solvable = solve_tree(&s.frame, kind, na, &c.v, &w, StripOrder::LowestFirst).is_ok();
        let balanced = s.tables.a.iter().all(|&i| s.check_club(&c, i));
        prop_assert_eq!(solvable, balanced);
        prop_assert_eq!(solvable, s.in_y(&c));
    }
}

use rand::Rng;
