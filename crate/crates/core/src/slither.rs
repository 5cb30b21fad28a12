//! Logarithmic slithering coefficients along the boundary of the maximal
//! tree, their pairwise rectangle products and the closed-form total.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::algebra::{is_d_torsion, GroupElement, IndexTables};
use crate::cocyclic::{CocyclicCoords, Space};
use crate::traintrack::{boundary_walk, RectClass, Side, Step};

type G = GroupElement;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlitherError {
    #[error("point is not in Y: {0}")]
    NotInY(String),
    #[error("rectangle {0} is crossed {1} times by the walk")]
    Unpaired(u32, usize),
    #[error("m = {0} out of range 1..={1}")]
    BadM(usize, usize),
    #[error("{0} is not d-torsion")]
    NotTorsion(String),
}

fn cyl(x: &G) -> G {
    x.to_cylinder()
}

fn i_pi(k: i64) -> G {
    GroupElement::cylinder(0.0, PI * k as f64)
}

/// r(T) per plaque with 3r(T) = Σ_B z, on a chosen branch of the cube root.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaqueRoots {
    pub roots: Vec<G>,
    pub branches: Vec<i64>,
}

impl PlaqueRoots {
    pub fn new(space: &Space, c: &CocyclicCoords, branches: &[i64]) -> Self {
        let tr = &space.frame.track;
        let roots = tr
            .plaques
            .iter()
            .zip(branches)
            .map(|(p, &k)| {
                let s = c.z[p[0]].iter().fold(GroupElement::cylinder(0.0, 0.0), |acc, x| acc + cyl(x));
                match s {
                    GroupElement::Cylinder(re, ang) => GroupElement::cylinder(re / 3.0, (ang + 2.0 * PI * k as f64) / 3.0),
                    _ => unreachable!(),
                }
            })
            .collect();
        PlaqueRoots { roots, branches: branches.to_vec() }
    }

    pub fn principal(space: &Space, c: &CocyclicCoords) -> Self {
        Self::new(space, c, &vec![0; space.frame.track.plaques.len()])
    }
}

/// log a_m at a switch step: the sign (−1)^{m−1} or (−1)^{d−m} as iπ times
/// the exponent, −2r(T) and the partial sum of z_t over j2 ≤ m−1 (right)
/// or j2 ≤ d−m (left).
pub fn switch_step_log(m: usize, side: Side, zt: &[G], tables: &IndexTables, r: &G) -> G {
    let d = tables.d;
    let (sign, cutoff) = match side {
        Side::Right => (m as i64 - 1, m - 1),
        Side::Left => (d as i64 - m as i64, d - m),
    };
    let mut acc = i_pi(sign) + cyl(r).scale(-2);
    for (n, j) in tables.b.iter().enumerate() {
        if j.j2 <= cutoff {
            acc = acc + cyl(&zt[n]);
        }
    }
    acc
}

/// log of a_m(j)·a_m(j′) for the two rectangle steps inside one rectangle.
pub fn rectangle_pair_log(m: usize, class: RectClass, v: &[G], d: usize) -> G {
    let sgn = match class {
        RectClass::URight => 1,
        RectClass::ULeft => -1,
        _ => return GroupElement::cylinder(0.0, 0.0),
    };
    let mut acc = i_pi(d as i64 - 1);
    if m <= d.div_ceil(2) {
        for i1 in m..=d.saturating_sub(m) {
            if i1 >= 1 {
                acc = acc + cyl(&v[i1 - 1]).scale(-sgn);
            }
        }
    } else {
        for i1 in (d - m + 1)..m {
            acc = acc + cyl(&v[i1 - 1]).scale(sgn);
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub enum EntryKind {
    Leaf,
    Switch,
    Rectangle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub n: usize,
    pub kind: EntryKind,
    pub payload: String,
    pub contribution: G,
}

impl fmt::Display for LedgerEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            EntryKind::Leaf => "leaf",
            EntryKind::Switch => "switch",
            EntryKind::Rectangle => "rectangle",
        };
        write!(f, "step {} {} {} {}", self.n, kind, self.payload, fmt_cyl(&self.contribution))
    }
}

fn fmt_cyl(x: &G) -> String {
    match x {
        GroupElement::Cylinder(re, ang) => format!("({:.12},{:.12})", re + 0.0, ang),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlitherLedger {
    pub m: usize,
    pub entries: Vec<LedgerEntry>,
    pub total: G,
}

impl SlitherLedger {
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s.push_str(&format!("total {}\n", fmt_cyl(&self.total)));
        s
    }
}

/// Walks the tree boundary and records every step's contribution at index m.
/// Rectangle steps are consumed in pairs: the second crossing of a rectangle
/// carries the joint contribution of both.
pub fn slither_ledger(space: &Space, c: &CocyclicCoords, roots: &PlaqueRoots, m: usize) -> Result<SlitherLedger, SlitherError> {
    let d = space.d();
    if m == 0 || m > d {
        return Err(SlitherError::BadM(m, d));
    }
    let frame = &space.frame;
    let tr = &frame.track;
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    let mut total = GroupElement::cylinder(0.0, 0.0);
    for (n, step) in boundary_walk(tr, &frame.tree).into_iter().enumerate() {
        let (kind, payload, contribution) = match step {
            Step::Leaf => (EntryKind::Leaf, "-".to_string(), GroupElement::cylinder(0.0, 0.0)),
            Step::Switch { switch, plaque, .. } => {
                let side = frame.class.side_of(switch);
                let x = switch_step_log(m, side, &c.z[switch], &space.tables, &roots.roots[plaque]);
                let tag = if side == Side::Left { "L" } else { "R" };
                (EntryKind::Switch, format!("switch={},side={tag}", tr.switch_ids[switch]), x)
            }
            Step::Rectangle { rect, end, .. } => {
                let k = seen.entry(rect).or_insert(0);
                *k += 1;
                let id = tr.rect_ids[rect];
                if *k == 1 {
                    (EntryKind::Rectangle, format!("rect={id},end={end},open"), GroupElement::cylinder(0.0, 0.0))
                } else {
                    let class = frame.class.rect_class[rect];
                    let x = rectangle_pair_log(m, class, &c.v[&rect], d);
                    (EntryKind::Rectangle, format!("rect={id},end={end},close"), x)
                }
            }
        };
        total = total + contribution;
        entries.push(LedgerEntry { n: n + 1, kind, payload, contribution });
    }
    for r in frame.class.free_rects() {
        let k = seen.get(&r).copied().unwrap_or(0);
        if k != 2 {
            return Err(SlitherError::Unpaired(tr.rect_ids[r], k));
        }
    }
    Ok(SlitherLedger { m, entries, total })
}

pub fn mid_index(d: usize) -> usize {
    d.div_ceil(2)
}

/// The total at m = ⌊(d+1)/2⌋ with the given roots.
pub fn total_mid_log_with(space: &Space, c: &CocyclicCoords, roots: &PlaqueRoots) -> Result<G, SlitherError> {
    if let Some(why) = space.membership_failure(c) {
        return Err(SlitherError::NotInY(why));
    }
    Ok(slither_ledger(space, c, roots, mid_index(space.d()))?.total)
}

pub fn total_mid_log(space: &Space, c: &CocyclicCoords) -> Result<G, SlitherError> {
    total_mid_log_with(space, c, &PlaqueRoots::principal(space, c))
}

/// Σ_{B*} Σ_T z_{t(T)}, plus for even d the U and S^ℓ terms with i⁰ and B⁰.
pub fn closed_form_rhs(space: &Space, c: &CocyclicCoords) -> G {
    let tb = &space.tables;
    let frame = &space.frame;
    let mut acc = GroupElement::cylinder(0.0, 0.0);
    for p in &frame.track.plaques {
        for j in &tb.b_star {
            acc = acc + cyl(&c.z[p[0]][tb.b_index(j)]);
        }
    }
    if let Some(i0) = tb.i0 {
        for &r in &frame.class.u_left {
            acc = acc + cyl(&c.v[&r][i0.slot()]);
        }
        for &r in &frame.class.u_right {
            acc = acc - cyl(&c.v[&r][i0.slot()]);
        }
        for &t in &frame.class.s_left {
            for j in &tb.b_zero {
                acc = acc + cyl(&c.z[t][tb.b_index(j)]);
            }
        }
    }
    acc
}

/// −total, required to be d-torsion.
pub fn ob_from_product(total: &G, d: usize) -> Result<G, SlitherError> {
    let x = -cyl(total);
    if !is_d_torsion(&x, d) {
        return Err(SlitherError::NotTorsion(x.to_string()));
    }
    Ok(x)
}

pub fn cube_root_invariance(space: &Space, c: &CocyclicCoords, a: &[i64], b: &[i64]) -> Result<bool, SlitherError> {
    let x = total_mid_log_with(space, c, &PlaqueRoots::new(space, c, a))?;
    let y = total_mid_log_with(space, c, &PlaqueRoots::new(space, c, b))?;
    Ok(x.approx_eq(&y, 1e-9))
}
