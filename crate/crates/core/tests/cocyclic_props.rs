mod common;

use pleat::algebra::{GroupElement, GroupKind, IndexTables};
use pleat::cocyclic::{compose_alpha, Label};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

fn non_torsion(kind: GroupKind, _d: usize) -> GroupElement {
    match kind {
        GroupKind::Real => GroupElement::Real(0.37),
        GroupKind::Circle => GroupElement::circle(0.37),
        GroupKind::Cylinder => GroupElement::cylinder(0.37, 0.0),
        GroupKind::Cyclic(n) => GroupElement::cyclic(n, 1),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn reduced_system_agrees_with_y(g in 2usize..4, seed in 1u64..4, tseed in 0u64..500, d in 2usize..8, code in 0u8..4, mode in 0u8..4) {
        let kind = common::kind_for(code, d);
        let s = common::space(g, seed, tseed, d, kind);
        let a = s.default_anchors().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(tseed * 31 + d as u64);
        let f = s.random_free(&mut rng, &a);
        let c = match mode {
            0 => s.i2_inverse(&f, &kind.torsion(d, 1).unwrap_or(kind.zero()), &a).unwrap(),
            1 => s.assemble(&f, &non_torsion(kind, d), &a).unwrap(),
            2 => s.random_diamond(&mut rng),
            _ => {
                let mut c = s.i2_inverse(&f, &kind.zero(), &a).unwrap();
                let t = rng.gen_range(0..c.z.len());
                if c.z[t].is_empty() {
                    // d = 2 has no switch slots
                    let r = *c.v.keys().next().unwrap();
                    c.v.get_mut(&r).unwrap()[0] = c.v[&r][0] + kind.sample(&mut rng);
                } else {
                    let n = rng.gen_range(0..c.z[t].len());
                    c.z[t][n] = c.z[t][n] + kind.sample(&mut rng);
                }
                c
            }
        };
        let y = s.in_y(&c);
        prop_assert_eq!(y, s.reduced_system_holds(&c));
        if mode == 0 {
            prop_assert!(y);
        }
        if mode == 1 && d > 1 {
            prop_assert!(!y);
        }
    }

    #[test]
    fn club_pair_vs_spade(seed in 1u64..6, tseed in 0u64..500, d in 2usize..8, code in 0u8..4, perturb in any::<bool>()) {
        let kind = common::kind_for(code, d);
        let s = common::space(2, seed, tseed, d, kind);
        let a = s.default_anchors().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(tseed + 5);
        let f = s.random_free(&mut rng, &a);
        let mut c = s.assemble(&f, &non_torsion(kind, d), &a).unwrap();
        if perturb {
            c = s.random_diamond(&mut rng);
        }
        for &i in &s.tables.a {
            let pair = s.check_club(&c, i) && s.check_club(&c, i.hat());
            let alt = s.check_club(&c, i) && s.check_spade(&c, i);
            prop_assert_eq!(pair, alt);
        }
    }

    #[test]
    fn nice_combination(seed in 1u64..6, tseed in 0u64..500, d in 2usize..9, code in 0u8..4) {
        let kind = common::kind_for(code, d);
        let s = common::space(2, seed, tseed, d, kind);
        let mut rng = ChaCha8Rng::seed_from_u64(tseed + 9);
        let c = s.random_diamond(&mut rng);
        for t in 0..c.z.len() {
            let (l, r) = s.nice_combination_check(&c.z, t).unwrap();
            prop_assert!(l.approx_eq(&r, 1e-9), "{} vs {}", l, r);
        }
    }

    #[test]
    fn tor_prime_is_torsion_and_json_roundtrips(g in 2usize..4, seed in 1u64..4, tseed in 0u64..500, d in 2usize..7, code in 0u8..4, k in 0i64..6) {
        let kind = common::kind_for(code, d);
        let s = common::space(g, seed, tseed, d, kind);
        let a = s.default_anchors().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(tseed + 13);
        let eps = kind.torsion(d, k % d as i64).unwrap_or(kind.zero());
        let c = s.i2_inverse(&s.random_free(&mut rng, &a), &eps, &a).unwrap();
        let t = s.tor_prime(&c).unwrap();
        prop_assert!(pleat::algebra::is_d_torsion(&t, d));
        prop_assert!(t.approx_eq(&eps, 1e-9));
        let back = s.from_json(&s.to_json(&c)).unwrap();
        prop_assert!(back.distance(&c) < 1e-12);
    }

    #[test]
    fn alpha_composition_oracle(d in 2usize..9, seed in 0u64..1000, cw in any::<bool>()) {
        let tb = IndexTables::new(d).unwrap();
        let kind = GroupKind::Real;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a12 = kind.sample_vec(&mut rng, tb.na());
        let a23 = kind.sample_vec(&mut rng, tb.na());
        let theta = kind.sample_vec(&mut rng, tb.nb());
        let label = if cw { Label::Clockwise } else { Label::Counterclockwise };
        let got = compose_alpha(&a12, &a23, &theta, &tb, label);
        // brute force over all positive triples summing to d
        for i1 in 1..d {
            let i2 = d - i1;
            let mut extra = 0.0;
            for j1 in 1..d {
                for j2 in 1..d {
                    if j1 + j2 >= d { continue; }
                    let j3 = d - j1 - j2;
                    let n = tb.b.iter().position(|j| (j.j1, j.j2, j.j3) == (j1, j2, j3)).unwrap();
                    let x = match theta[n] { GroupElement::Real(x) => x, _ => unreachable!() };
                    if cw && j2 == i1 { extra += x; }
                    if !cw && j2 == i2 { extra -= x; }
                }
            }
            let want = match (a12[i1 - 1], a23[i1 - 1]) {
                (GroupElement::Real(p), GroupElement::Real(q)) => p + q + extra,
                _ => unreachable!(),
            };
            prop_assert!(got[i1 - 1].approx_eq(&GroupElement::Real(want), 1e-12));
        }
    }
}

#[test]
fn membership_rejects_wrong_shapes() {
    let s = common::space(2, 1, 1, 4, GroupKind::Cylinder);
    let mut v = s.to_json(&s.zero());
    v["d"] = 5.into();
    assert!(s.from_json(&v).is_err());
    let mut v = s.to_json(&s.zero());
    v["group"] = "R".into();
    assert!(s.from_json(&v).is_err());
}

#[test]
fn zero_free_slots_carry_the_torsion_value() {
    for d in 2..=6 {
        let kind = GroupKind::Cylinder;
        let s = common::space(2, 1, 2, d, kind);
        let a = s.default_anchors().unwrap();
        let mut f = s.random_free(&mut ChaCha8Rng::seed_from_u64(0), &a);
        for x in f.v.values_mut().chain(f.w.values_mut()).flatten().chain(&mut f.v_bar).chain(&mut f.w_bar) {
            *x = kind.zero();
        }
        let eps = GroupElement::cylinder(0.0, 2.0 * std::f64::consts::PI / d as f64);
        let c = s.i2_inverse(&f, &eps, &a).unwrap();
        assert!(s.in_y(&c));
        assert!(s.tor_prime(&c).unwrap().approx_eq(&eps, 1e-12));
        assert_eq!(s.tor_prime(&c).unwrap().torsion_residue(d), 1);
    }
}
