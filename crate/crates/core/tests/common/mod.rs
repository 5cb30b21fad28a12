#![allow(dead_code)]

use num_complex::Complex64;
use pleat::algebra::{GroupKind, IndexTables};
use pleat::cocyclic::Space;
use pleat::flags::{adapted_basis, cyl_to_complex, log_invariant, triple_ratio, CMat, Flag};
use pleat::traintrack::{generate_fixture, Frame, Track};

pub fn track(g: usize, seed: u64) -> Track {
    Track::new(generate_fixture(g, seed).unwrap()).unwrap()
}

pub fn space(g: usize, seed: u64, tree_seed: u64, d: usize, kind: GroupKind) -> Space {
    Space::new(Frame::seeded(track(g, seed), tree_seed).unwrap(), d, kind).unwrap()
}

pub fn kind_for(code: u8, d: usize) -> GroupKind {
    match code % 4 {
        0 => GroupKind::Real,
        1 => GroupKind::Circle,
        2 => GroupKind::Cylinder,
        _ => GroupKind::Cyclic(3 * d as u32),
    }
}

/// Basis with u(f_m) predicted by the triple ratios of F.
pub fn unipotent_prediction(t: &[Flag; 3]) -> (CMat, CMat) {
    let d = t[0].d();
    let tb = IndexTables::new(d).unwrap();
    let f = adapted_basis(&[t[1].clone(), t[2].clone(), t[0].clone()]).unwrap();
    let fp_raw = adapted_basis(&[t[2].clone(), t[0].clone(), t[1].clone()]).unwrap();
    let s = f[(0, 0)] / fp_raw[(0, d - 1)];
    let fp = fp_raw * s;
    let mut pred = CMat::zeros(d, d);
    for m in 1..=d {
        let mut expo = Complex64::new(0.0, 0.0);
        for j in tb.b.iter().filter(|j| j.j2 < m) {
            let x = log_invariant(triple_ratio(t, *j).unwrap()).unwrap();
            expo += cyl_to_complex(&x);
        }
        let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
        pred.set_column(m - 1, &(fp.column(d - m) * (expo.exp() * sign)));
    }
    (f, pred)
}
