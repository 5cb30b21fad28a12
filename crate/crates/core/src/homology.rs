//! Relative homology of the orientation cover in the standard generating sets.
//!
//! A degree-1 generator is keyed by a rectangle lift (r, b), a degree-0
//! generator by a switch lift (t, b). Coefficients are G^A vectors with slot
//! i1−1 holding index (i1, i2).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{vec_add, vec_distance, vec_hat, vec_neg, GroupElement, GroupKind, IndexTables};
use crate::traintrack::{core_ends, lift_at_end, Frame, RectClass, Track};

type G = GroupElement;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomologyError {
    #[error("no coefficient given for rectangle {0}")]
    MissingRectangle(u32),
    #[error("triangle data violates the rotation identities")]
    DiamondViolated,
    #[error("solvability condition fails (defect {0:.3e})")]
    SolvabilityViolated(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub dim: u8,
    pub kind: GroupKind,
    pub width: usize,
    pub terms: BTreeMap<(usize, u8), Vec<G>>,
}

impl Chain {
    pub fn zero(dim: u8, kind: GroupKind, width: usize) -> Self {
        Chain { dim, kind, width, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: (usize, u8), coeff: &[G]) {
        let zero = self.kind.zeros(self.width);
        let entry = self.terms.entry(key).or_insert(zero);
        *entry = vec_add(entry, coeff);
    }

    pub fn coeff(&self, key: (usize, u8)) -> Vec<G> {
        self.terms.get(&key).cloned().unwrap_or_else(|| self.kind.zeros(self.width))
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v);
        }
        out
    }

    pub fn neg(&self) -> Chain {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = vec_neg(v);
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.neg())
    }

    /// Reindex every coefficient by i ↦ î.
    pub fn hat(&self) -> Chain {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = vec_hat(v);
        }
        out
    }

    pub fn distance(&self, other: &Chain) -> f64 {
        let zero = self.kind.zeros(self.width);
        let mut keys: Vec<_> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.iter()
            .map(|k| {
                let a = self.terms.get(k).unwrap_or(&zero);
                let b = other.terms.get(k).unwrap_or(&zero);
                vec_distance(a, b)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.distance(&Chain::zero(self.dim, self.kind, self.width)) <= tol
    }

    /// Sorted "(item,bit) coefficients" lines, skipping zero terms.
    pub fn listing(&self, track: &Track) -> String {
        let mut s = String::new();
        for ((item, bit), v) in &self.terms {
            if v.iter().all(|x| x.is_zero(1e-12)) {
                continue;
            }
            let (tag, id) = if self.dim == 1 {
                ("k", track.rect_ids[*item])
            } else {
                ("q", track.switch_ids[*item])
            };
            let coeffs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{tag}({id},{bit}) [{}]", coeffs.join(", "));
        }
        s
    }
}

/// ι_*: on 1-chains g[k(r,b)] ↦ −g[k(r,1−b)], on 0-chains g[q(t,b)] ↦ g[q(t,1−b)].
pub fn iota_star(c: &Chain) -> Chain {
    let mut out = Chain::zero(c.dim, c.kind, c.width);
    for ((item, bit), v) in &c.terms {
        let coeff = if c.dim == 1 { vec_neg(v) } else { v.clone() };
        out.add_term((*item, 1 - bit), &coeff);
    }
    out
}

pub fn hat(c: &Chain) -> Chain {
    c.hat()
}

/// ∂ of a 1-chain: head lift minus tail lift of each core curve.
pub fn boundary(frame: &Frame, c: &Chain) -> Chain {
    assert_eq!(c.dim, 1);
    let mut out = Chain::zero(0, c.kind, c.width);
    for ((r, b), v) in &c.terms {
        let (fwd, bwd) = core_ends(*b);
        out.add_term(lift_at_end(&frame.track, *r, *b, fwd), v);
        out.add_term(lift_at_end(&frame.track, *r, *b, bwd), &vec_neg(v));
    }
    out
}

fn beta_partial(frame: &Frame, kind: GroupKind, width: usize, u: &BTreeMap<usize, Vec<G>>) -> Chain {
    let mut out = Chain::zero(1, kind, width);
    for (&r, v) in u {
        let b = frame.cover.rect_lift[r].expect("rectangle has no chosen lift");
        out.add_term((r, b), v);
        out.add_term((r, 1 - b), &vec_hat(v));
    }
    out
}

/// β(u) = Σ u_R [k_{R°}] + û_R [k_{ι R°}] over all rectangles.
pub fn beta(
    frame: &Frame,
    kind: GroupKind,
    width: usize,
    u_tree: &BTreeMap<usize, Vec<G>>,
    u_free: &BTreeMap<usize, Vec<G>>,
) -> Result<Chain, HomologyError> {
    let mut all = BTreeMap::new();
    for r in 0..frame.track.nrect() {
        let src = if frame.tree.edges[r] { u_tree } else { u_free };
        let v = src.get(&r).ok_or(HomologyError::MissingRectangle(frame.track.rect_ids[r]))?;
        all.insert(r, v.clone());
    }
    Ok(beta_partial(frame, kind, width, &all))
}

/// δ(w) = Σ w_t [q_{t°}] − ŵ_t [q_{ι t°}].
pub fn delta(frame: &Frame, kind: GroupKind, width: usize, w: &[Vec<G>]) -> Chain {
    let mut out = Chain::zero(0, kind, width);
    for (t, wt) in w.iter().enumerate() {
        let o = frame.cover.t_o[t].expect("switch not on tree");
        out.add_term((t, o), wt);
        out.add_term((t, 1 - o), &vec_neg(&vec_hat(wt)));
    }
    out
}

fn sum_j2(kind: GroupKind, tables: &IndexTables, zt: &[G], k: usize) -> G {
    tables.b_with_j2(k).fold(kind.zero(), |acc, n| acc + zt[n])
}

/// Whether z_t^j = z_{t₊}^{j₊} = z_{t₋}^{j₋} for all t and j.
pub fn diamond_holds(track: &Track, tables: &IndexTables, z: &[Vec<G>], tol: f64) -> bool {
    for t in 0..track.nsw() {
        let (tp, tm) = (track.t_plus(t), track.t_minus(t));
        for (n, j) in tables.b.iter().enumerate() {
            let a = z[t][n];
            if !a.approx_eq(&z[tp][tables.b_index(&j.plus())], tol)
                || !a.approx_eq(&z[tm][tables.b_index(&j.minus())], tol)
            {
                return false;
            }
        }
    }
    true
}

/// w_t^i = Σ_{j2=i2} z_t^j for left t and −Σ_{j2=i1} z_t^j for right t.
pub fn w_from_z(frame: &Frame, tables: &IndexTables, kind: GroupKind, z: &[Vec<G>]) -> Vec<Vec<G>> {
    use crate::traintrack::Side;
    (0..frame.track.nsw())
        .map(|t| {
            tables
                .a
                .iter()
                .map(|i| match frame.class.side_of(t) {
                    Side::Left => sum_j2(kind, tables, &z[t], i.i2),
                    Side::Right => -sum_j2(kind, tables, &z[t], i.i1),
                })
                .collect()
        })
        .collect()
}

/// K(θ) as minus the sum over all switch lifts of the labeled-plaque sums: the
/// clockwise labeling at t^cw gives Σ_{j2=i1} z, the reversed one at ι(t^cw)
/// gives −Σ_{j2=i2} z.
pub fn k_theta(
    frame: &Frame,
    tables: &IndexTables,
    kind: GroupKind,
    z: &[Vec<G>],
) -> Result<Chain, HomologyError> {
    if !diamond_holds(&frame.track, tables, z, 1e-9) {
        return Err(HomologyError::DiamondViolated);
    }
    let mut out = Chain::zero(0, kind, tables.na());
    for t in 0..frame.track.nsw() {
        let cw = frame.cover.t_cw[t];
        let s_cw: Vec<G> = tables.a.iter().map(|i| sum_j2(kind, tables, &z[t], i.i1)).collect();
        let s_ccw: Vec<G> = tables.a.iter().map(|i| -sum_j2(kind, tables, &z[t], i.i2)).collect();
        out.add_term((t, cw), &vec_neg(&s_cw));
        out.add_term((t, 1 - cw), &vec_neg(&s_ccw));
    }
    Ok(out)
}

/// Σ_{U^r}(v + v̂) − Σ_{U^ℓ}(v + v̂) − Σ_t w_t; zero iff `solve_tree` succeeds.
pub fn solvability_defect(
    frame: &Frame,
    kind: GroupKind,
    width: usize,
    v_free: &BTreeMap<usize, Vec<G>>,
    w: &[Vec<G>],
) -> Vec<G> {
    let mut acc = kind.zeros(width);
    for (&r, v) in v_free {
        let both = vec_add(v, &vec_hat(v));
        match frame.class.rect_class[r] {
            RectClass::URight => acc = vec_add(&acc, &both),
            RectClass::ULeft => acc = vec_add(&acc, &vec_neg(&both)),
            _ => {}
        }
    }
    for wt in w {
        acc = vec_add(&acc, &vec_neg(wt));
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub enum StripOrder {
    LowestFirst,
    HighestFirst,
    Seeded(u64),
}

/// The unique tree coefficients v′ with ∂β(v′, v) = δ(w), by repeatedly
/// removing a leaf of the tree.
pub fn solve_tree(
    frame: &Frame,
    kind: GroupKind,
    width: usize,
    v_free: &BTreeMap<usize, Vec<G>>,
    w: &[Vec<G>],
    order: StripOrder,
) -> Result<BTreeMap<usize, Vec<G>>, HomologyError> {
    let track = &frame.track;
    for r in 0..track.nrect() {
        if !frame.tree.edges[r] && !v_free.contains_key(&r) {
            return Err(HomologyError::MissingRectangle(track.rect_ids[r]));
        }
    }
    let known = boundary(frame, &beta_partial(frame, kind, width, v_free)).sub(&delta(frame, kind, width, w));
    let nsw = track.nsw();
    let mut res: Vec<Vec<G>> = (0..nsw)
        .map(|t| known.coeff((t, frame.cover.t_o[t].expect("tree must be maximal"))))
        .collect();

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nsw];
    for r in frame.tree.edge_list() {
        let [(a, _), (b, _)] = track.ends[r];
        incident[a].push(r);
        incident[b].push(r);
    }
    // +1 where the core of R° ends, −1 where it starts.
    let sign_at = |r: usize, t: usize| -> i64 {
        let (fwd, _) = core_ends(frame.cover.rect_lift[r].unwrap());
        if track.ends[r][fwd].0 == t {
            1
        } else {
            -1
        }
    };
    let mut alive = vec![true; nsw];
    let mut rng = match order {
        StripOrder::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        _ => None,
    };
    let mut out = BTreeMap::new();
    for _ in 0..nsw - 1 {
        let leaves: Vec<usize> = (0..nsw).filter(|&t| alive[t] && incident[t].len() == 1).collect();
        let t = match order {
            StripOrder::LowestFirst => leaves[0],
            StripOrder::HighestFirst => *leaves.last().unwrap(),
            StripOrder::Seeded(_) => leaves[rng.as_mut().unwrap().gen_range(0..leaves.len())],
        };
        let r = incident[t][0];
        let st = sign_at(r, t);
        let coeff: Vec<G> = res[t].iter().map(|x| x.scale(-st)).collect();
        let [(a, _), (b, _)] = track.ends[r];
        let s = if a == t { b } else { a };
        let ss = sign_at(r, s);
        res[s] = vec_add(&res[s], &coeff.iter().map(|x| x.scale(ss)).collect::<Vec<_>>());
        res[t] = kind.zeros(width);
        incident[s].retain(|&x| x != r);
        incident[t].clear();
        alive[t] = false;
        out.insert(r, coeff);
    }
    let last = (0..nsw).find(|&t| alive[t]).unwrap();
    let defect = vec_distance(&res[last], &kind.zeros(width));
    if defect > 1e-9 {
        return Err(HomologyError::SolvabilityViolated(defect));
    }
    Ok(out)
}
