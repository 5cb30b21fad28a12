//! Coordinates (v, z) of cocyclic pairs, the equations cutting out Y, the
//! torsion invariant tor′ and the isomorphism I₂ with its inverse.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::algebra::{
    is_d_torsion, vec_distance, AlgebraError, GroupElement, GroupKind, IndexTables, PairIndex,
    TripleIndex,
};
use crate::traintrack::{Classification, Frame, RectClass, Side};

type G = GroupElement;

pub const MEMBER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CocyclicError {
    #[error("point is not in Y: {0}")]
    NotInY(String),
    #[error("value {0} is not d-torsion")]
    NotTorsion(String),
    #[error("no admissible anchor: {0}")]
    NoAnchor(String),
    #[error("bad anchor: {0}")]
    BadAnchor(String),
    #[error("malformed coordinates: {0}")]
    Malformed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// (v, z): v on non-tree rectangles (G^A, slot i1−1), z on switches (G^B in
/// lexicographic order of B).
#[derive(Debug, Clone, PartialEq)]
pub struct CocyclicCoords {
    pub d: usize,
    pub kind: GroupKind,
    pub v: BTreeMap<usize, Vec<G>>,
    pub z: Vec<Vec<G>>,
}

impl CocyclicCoords {
    pub fn distance(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (r, a) in &self.v {
            m = m.max(other.v.get(r).map_or(f64::INFINITY, |b| vec_distance(a, b)));
        }
        if self.v.len() != other.v.len() || self.z.len() != other.z.len() {
            return f64::INFINITY;
        }
        for (a, b) in self.z.iter().zip(&other.z) {
            m = m.max(vec_distance(a, b));
        }
        m
    }
}

/// A track with a maximal tree, a degree d and a coefficient group.
#[derive(Debug, Clone)]
pub struct Space {
    pub frame: Frame,
    pub tables: IndexTables,
    pub kind: GroupKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Var {
    V(usize, usize),
    Z(usize, usize),
}

/// Integer linear combination of coordinates.
#[derive(Debug, Clone, Default)]
struct Form {
    terms: BTreeMap<Var, i64>,
}

impl Form {
    fn add(&mut self, v: Var, c: i64) {
        *self.terms.entry(v).or_insert(0) += c;
    }

    fn eval(&self, kind: GroupKind, c: &CocyclicCoords) -> G {
        self.terms.iter().fold(kind.zero(), |acc, (var, &k)| {
            let x = match *var {
                Var::V(r, s) => c.v[&r][s],
                Var::Z(t, n) => c.z[t][n],
            };
            acc + x.scale(k)
        })
    }

    fn coeff(&self, vars: &[Var]) -> i64 {
        vars.iter().map(|v| self.terms.get(v).copied().unwrap_or(0)).sum()
    }
}

/// Anchors fixed once and for all for I₂.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchors {
    /// The distinguished plaque T̄.
    pub t_bar: usize,
    /// The distinguished right-unorientable rectangle R̄.
    pub r_bar: usize,
    /// t(T) for every plaque.
    pub reps: Vec<usize>,
    /// Whether left and right are exchanged (used when U^r is empty).
    pub swapped: bool,
}

/// The free part of I₂(v, z), without the torsion component.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeCoords {
    /// v_R for R ≠ R̄.
    pub v: BTreeMap<usize, Vec<G>>,
    /// v_{R̄}^i for the free indices i ∈ A∖A′ (ascending i1).
    pub v_bar: Vec<G>,
    /// z_{t(T)} for T ≠ T̄.
    pub w: BTreeMap<usize, Vec<G>>,
    /// z_{t(T̄)}^j for j ∈ B∖(B″∪{j′}) (lexicographic).
    pub w_bar: Vec<G>,
}

impl FreeCoords {
    pub fn len(&self) -> usize {
        self.v.values().map(Vec::len).sum::<usize>()
            + self.v_bar.len()
            + self.w.values().map(Vec::len).sum::<usize>()
            + self.w_bar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let mut m = vec_distance(&self.v_bar, &other.v_bar).max(vec_distance(&self.w_bar, &other.w_bar));
        for (k, a) in &self.v {
            m = m.max(other.v.get(k).map_or(f64::INFINITY, |b| vec_distance(a, b)));
        }
        for (k, a) in &self.w {
            m = m.max(other.w.get(k).map_or(f64::INFINITY, |b| vec_distance(a, b)));
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Clockwise,
    Counterclockwise,
}

impl Space {
    pub fn new(frame: Frame, d: usize, kind: GroupKind) -> Result<Self, CocyclicError> {
        Ok(Space { frame, tables: IndexTables::new(d)?, kind })
    }

    pub fn d(&self) -> usize {
        self.tables.d
    }

    fn class(&self, swapped: bool) -> Classification {
        if swapped {
            self.frame.class.swapped()
        } else {
            self.frame.class.clone()
        }
    }

    pub fn zero(&self) -> CocyclicCoords {
        let (na, nb) = (self.tables.na(), self.tables.nb());
        CocyclicCoords {
            d: self.d(),
            kind: self.kind,
            v: self.frame.class.free_rects().into_iter().map(|r| (r, self.kind.zeros(na))).collect(),
            z: vec![self.kind.zeros(nb); self.frame.track.nsw()],
        }
    }

    /// Rotated copies of x on the three cusps of plaque p, starting at switch t.
    fn spread(&self, z: &mut [Vec<G>], t: usize, x: &[G]) {
        let tr = &self.frame.track;
        let (tp, tm) = (tr.t_plus(t), tr.t_minus(t));
        for (n, j) in self.tables.b.iter().enumerate() {
            z[t][n] = x[n];
            z[tp][self.tables.b_index(&j.plus())] = x[n];
            z[tm][self.tables.b_index(&j.minus())] = x[n];
        }
    }

    /// Random v and random plaque data rotated onto the switches, so ♦ holds.
    pub fn random_diamond<R: Rng + ?Sized>(&self, rng: &mut R) -> CocyclicCoords {
        let mut c = self.zero();
        for v in c.v.values_mut() {
            *v = self.kind.sample_vec(rng, self.tables.na());
        }
        for p in &self.frame.track.plaques {
            let x = self.kind.sample_vec(rng, self.tables.nb());
            self.spread(&mut c.z, p[0], &x);
        }
        c
    }

    fn club_form(&self, class: &Classification, i: PairIndex) -> Form {
        let mut f = Form::default();
        for &r in &class.u_right {
            f.add(Var::V(r, i.slot()), 1);
            f.add(Var::V(r, i.hat().slot()), 1);
        }
        for &r in &class.u_left {
            f.add(Var::V(r, i.slot()), -1);
            f.add(Var::V(r, i.hat().slot()), -1);
        }
        for &t in &class.s_left {
            for n in self.tables.b_with_j2(i.i2) {
                f.add(Var::Z(t, n), -1);
            }
        }
        for &t in &class.s_right {
            for n in self.tables.b_with_j2(i.i1) {
                f.add(Var::Z(t, n), 1);
            }
        }
        f
    }

    fn spade_form(&self, i: PairIndex) -> Form {
        let mut f = Form::default();
        for t in 0..self.frame.track.nsw() {
            for n in self.tables.b_with_j2(i.i2) {
                f.add(Var::Z(t, n), 1);
            }
            for n in self.tables.b_with_j2(i.i1) {
                f.add(Var::Z(t, n), -1);
            }
        }
        f
    }

    /// tor′ written with the S^ℓ (or, with `right_form`, the S^r) term.
    fn tor_form(&self, class: &Classification, reps: &[usize], right_form: bool) -> Form {
        let tb = &self.tables;
        let mut f = Form::default();
        for &t in reps {
            for j in &tb.b_star {
                f.add(Var::Z(t, tb.b_index(j)), -1);
            }
        }
        if let Some(i0) = tb.i0 {
            let sgn = if right_form { -1 } else { 1 };
            for &r in &class.u_right {
                f.add(Var::V(r, i0.slot()), sgn);
            }
            for &r in &class.u_left {
                f.add(Var::V(r, i0.slot()), -sgn);
            }
            let ts = if right_form { &class.s_right } else { &class.s_left };
            for &t in ts {
                for j in &tb.b_zero {
                    f.add(Var::Z(t, tb.b_index(j)), -1);
                }
            }
        }
        f
    }

    pub fn check_diamond(&self, c: &CocyclicCoords) -> bool {
        crate::homology::diamond_holds(&self.frame.track, &self.tables, &c.z, MEMBER_TOL)
    }

    /// LHS − RHS of ♣(i).
    pub fn club_defect(&self, c: &CocyclicCoords, i: PairIndex) -> G {
        self.club_form(&self.frame.class, i).eval(self.kind, c)
    }

    pub fn check_club(&self, c: &CocyclicCoords, i: PairIndex) -> bool {
        self.club_defect(c, i).is_zero(MEMBER_TOL)
    }

    pub fn spade_defect(&self, c: &CocyclicCoords, i: PairIndex) -> G {
        self.spade_form(i).eval(self.kind, c)
    }

    pub fn check_spade(&self, c: &CocyclicCoords, i: PairIndex) -> bool {
        self.spade_defect(c, i).is_zero(MEMBER_TOL)
    }

    pub fn in_y(&self, c: &CocyclicCoords) -> bool {
        self.check_diamond(c) && self.tables.a.iter().all(|&i| self.check_club(c, i))
    }

    /// Name of the first failing equation, if any.
    pub fn membership_failure(&self, c: &CocyclicCoords) -> Option<String> {
        if !self.check_diamond(c) {
            return Some("rotation identity".into());
        }
        self.tables
            .a
            .iter()
            .find(|&&i| !self.check_club(c, i))
            .map(|i| format!("balance equation at {i}"))
    }

    /// ♦, ♣ on A″, ♠ on A′∖{(1,d−1)} and d·tor′ = 0.
    pub fn reduced_system_holds(&self, c: &CocyclicCoords) -> bool {
        let d = self.d();
        self.check_diamond(c)
            && self.tables.a_dprime.iter().all(|&i| self.check_club(c, i))
            && self
                .tables
                .a_prime
                .iter()
                .filter(|i| i.i1 != 1)
                .all(|&i| self.check_spade(c, i))
            && self.tor_value(c, &self.default_reps(), false).scale(d as i64).is_zero(MEMBER_TOL)
    }

    pub fn default_reps(&self) -> Vec<usize> {
        self.frame.track.plaques.iter().map(|p| *p.iter().min().unwrap()).collect()
    }

    /// tor′ evaluated without a membership check.
    pub fn tor_value(&self, c: &CocyclicCoords, reps: &[usize], right_form: bool) -> G {
        self.tor_form(&self.frame.class, reps, right_form).eval(self.kind, c)
    }

    pub fn tor_prime(&self, c: &CocyclicCoords) -> Result<G, CocyclicError> {
        self.tor_prime_with(c, &self.default_reps())
    }

    pub fn tor_prime_with(&self, c: &CocyclicCoords, reps: &[usize]) -> Result<G, CocyclicError> {
        if let Some(why) = self.membership_failure(c) {
            return Err(CocyclicError::NotInY(why));
        }
        let t = self.tor_value(c, reps, false);
        if !is_d_torsion(&t, self.d()) {
            return Err(CocyclicError::NotTorsion(t.to_string()));
        }
        Ok(t)
    }

    /// Lowest-index anchors; for d = 4 the plaque and representative are
    /// chosen so that t(T̄) and t(T̄)₋ lie on different sides.
    pub fn default_anchors(&self) -> Result<Anchors, CocyclicError> {
        let class = &self.frame.class;
        let swapped = class.u_right.is_empty();
        let eff = self.class(swapped);
        let r_bar = *eff
            .u_right
            .iter()
            .min()
            .ok_or_else(|| CocyclicError::NoAnchor("no unorientable rectangle".into()))?;
        let mut reps = self.default_reps();
        let tr = &self.frame.track;
        let mut t_bar = 0;
        if self.d() == 4 {
            let mut found = None;
            'outer: for (p, cusps) in tr.plaques.iter().enumerate() {
                let mut cs = *cusps;
                cs.sort();
                for t in cs {
                    if eff.side_of(t) != eff.side_of(tr.t_minus(t)) {
                        found = Some((p, t));
                        break 'outer;
                    }
                }
            }
            let (p, t) = found.ok_or_else(|| {
                CocyclicError::NoAnchor("every plaque has all cusps on one side".into())
            })?;
            t_bar = p;
            reps[p] = t;
        }
        Ok(Anchors { t_bar, r_bar, reps, swapped })
    }

    fn check_anchors(&self, a: &Anchors) -> Result<Classification, CocyclicError> {
        let tr = &self.frame.track;
        if a.t_bar >= tr.plaques.len() || a.reps.len() != tr.plaques.len() {
            return Err(CocyclicError::BadAnchor("plaque data has wrong size".into()));
        }
        for (p, &t) in a.reps.iter().enumerate() {
            if t >= tr.nsw() || tr.switch_plaque[t] != p {
                return Err(CocyclicError::BadAnchor(format!("switch {t} is not a cusp of plaque {p}")));
            }
        }
        let eff = self.class(a.swapped);
        if eff.rect_class.get(a.r_bar) != Some(&RectClass::URight) {
            return Err(CocyclicError::BadAnchor("R̄ is not right-unorientable".into()));
        }
        if self.d() == 4 {
            let t = a.reps[a.t_bar];
            if eff.side_of(t) == eff.side_of(tr.t_minus(t)) {
                return Err(CocyclicError::BadAnchor("for d = 4, t(T̄) and t(T̄)₋ must lie on different sides".into()));
            }
        }
        Ok(eff)
    }

    /// Indices i ∈ A∖A′ whose v_{R̄}^i is a free coordinate.
    fn vbar_free(&self) -> Vec<PairIndex> {
        let tb = &self.tables;
        tb.a.iter()
            .copied()
            .filter(|i| !tb.a_prime.contains(i) && tb.d > 2)
            .collect()
    }

    fn wbar_free(&self) -> Vec<TripleIndex> {
        let tb = &self.tables;
        tb.b.iter()
            .copied()
            .filter(|j| !tb.b_dprime.contains(j) && Some(*j) != tb.j_prime)
            .collect()
    }

    /// Number of free coordinates; equals (d²−1)(2g−2).
    pub fn free_count(&self) -> usize {
        let nfree = self.frame.class.free_rects().len();
        (nfree - 1) * self.tables.na()
            + self.vbar_free().len()
            + (self.frame.track.plaques.len() - 1) * self.tables.nb()
            + self.wbar_free().len()
    }

    pub fn random_free<R: Rng + ?Sized>(&self, rng: &mut R, a: &Anchors) -> FreeCoords {
        let (na, nb) = (self.tables.na(), self.tables.nb());
        FreeCoords {
            v: self
                .frame
                .class
                .free_rects()
                .into_iter()
                .filter(|&r| r != a.r_bar)
                .map(|r| (r, self.kind.sample_vec(rng, na)))
                .collect(),
            v_bar: self.kind.sample_vec(rng, self.vbar_free().len()),
            w: (0..self.frame.track.plaques.len())
                .filter(|&p| p != a.t_bar)
                .map(|p| (p, self.kind.sample_vec(rng, nb)))
                .collect(),
            w_bar: self.kind.sample_vec(rng, self.wbar_free().len()),
        }
    }

    pub fn i2_forward(&self, c: &CocyclicCoords, a: &Anchors) -> Result<(FreeCoords, G), CocyclicError> {
        self.check_anchors(a)?;
        if let Some(why) = self.membership_failure(c) {
            return Err(CocyclicError::NotInY(why));
        }
        let tb = &self.tables;
        let tor = self.tor_prime_with(c, &a.reps)?;
        let free = FreeCoords {
            v: c.v.iter().filter(|(&r, _)| r != a.r_bar).map(|(&r, v)| (r, v.clone())).collect(),
            v_bar: self.vbar_free().iter().map(|i| c.v[&a.r_bar][i.slot()]).collect(),
            w: (0..self.frame.track.plaques.len())
                .filter(|&p| p != a.t_bar)
                .map(|p| (p, c.z[a.reps[p]].clone()))
                .collect(),
            w_bar: self.wbar_free().iter().map(|j| c.z[a.reps[a.t_bar]][tb.b_index(j)]).collect(),
        };
        Ok((free, tor))
    }

    pub fn i2_inverse(&self, free: &FreeCoords, eps: &G, a: &Anchors) -> Result<CocyclicCoords, CocyclicError> {
        if !is_d_torsion(eps, self.d()) {
            return Err(CocyclicError::NotTorsion(eps.to_string()));
        }
        let c = self.assemble(free, eps, a)?;
        if let Some(why) = self.membership_failure(&c) {
            return Err(CocyclicError::Internal(format!("inverse output fails {why}")));
        }
        let t = self.tor_value(&c, &a.reps, false);
        if !t.approx_eq(eps, MEMBER_TOL) {
            return Err(CocyclicError::Internal(format!("torsion {t} != {eps}")));
        }
        Ok(c)
    }

    /// Steps 0–4 of the inverse of I₂ for any eps. When eps is not d-torsion
    /// the result satisfies every equation of the reduced system except
    /// d·tor′ = 0.
    pub fn assemble(&self, free: &FreeCoords, eps: &G, a: &Anchors) -> Result<CocyclicCoords, CocyclicError> {
        let eff = self.check_anchors(a)?;
        let tb = &self.tables;
        let tr = &self.frame.track;
        let d = self.d();
        let kind = self.kind;
        if free.v_bar.len() != self.vbar_free().len()
            || free.w_bar.len() != self.wbar_free().len()
            || free.w.len() + 1 != tr.plaques.len()
            || free.v.len() + 1 != self.frame.class.free_rects().len()
        {
            return Err(CocyclicError::Malformed("free coordinate vector has the wrong shape".into()));
        }
        let mut c = self.zero();
        let mut set: BTreeMap<Var, bool> = BTreeMap::new();
        let orbit = |t: usize, j: &TripleIndex| -> [Var; 3] {
            [
                Var::Z(t, tb.b_index(j)),
                Var::Z(tr.t_plus(t), tb.b_index(&j.plus())),
                Var::Z(tr.t_minus(t), tb.b_index(&j.minus())),
            ]
        };

        // Step 0.
        for (&r, v) in &free.v {
            if r == a.r_bar || !c.v.contains_key(&r) || v.len() != tb.na() {
                return Err(CocyclicError::Malformed(format!("bad free rectangle {r}")));
            }
            c.v.insert(r, v.clone());
            for s in 0..tb.na() {
                set.insert(Var::V(r, s), true);
            }
        }
        for (i, x) in self.vbar_free().iter().zip(&free.v_bar) {
            c.v.get_mut(&a.r_bar).unwrap()[i.slot()] = *x;
            set.insert(Var::V(a.r_bar, i.slot()), true);
        }
        for (&p, w) in &free.w {
            if p == a.t_bar || p >= tr.plaques.len() || w.len() != tb.nb() {
                return Err(CocyclicError::Malformed(format!("bad free plaque {p}")));
            }
            self.spread(&mut c.z, a.reps[p], w);
            for j in &tb.b {
                for v in orbit(a.reps[p], j) {
                    set.insert(v, true);
                }
            }
        }
        let tbar = a.reps[a.t_bar];
        let put = |c: &mut CocyclicCoords, set: &mut BTreeMap<Var, bool>, j: &TripleIndex, x: G| {
            for v in orbit(tbar, j) {
                if let Var::Z(t, n) = v {
                    c.z[t][n] = x;
                }
                set.insert(v, true);
            }
        };
        for (j, x) in self.wbar_free().iter().zip(&free.w_bar) {
            put(&mut c, &mut set, j, *x);
        }

        // Residual of `form = target` with the unknowns at zero, after checking
        // that every other variable has been specified.
        let residual = |c: &CocyclicCoords, set: &BTreeMap<Var, bool>, form: &Form, target: &G, unknowns: &[Var]| {
            for v in form.terms.keys() {
                if form.terms[v] != 0 && !unknowns.contains(v) && !set.contains_key(v) {
                    return Err(CocyclicError::Internal(format!("{v:?} used before it is specified")));
                }
            }
            Ok(form.eval(kind, c) - *target)
        };
        let unit = |k: i64| -> Result<i64, CocyclicError> {
            if k == 1 || k == -1 {
                Ok(k)
            } else {
                Err(CocyclicError::Internal(format!("unknown has coefficient {k}")))
            }
        };
        let tor_form = self.tor_form(&eff, &a.reps, false);

        if d == 2 {
            // No triangle data: v_{R̄}^{(1,1)} is fixed by tor′ = eps.
            let u = [Var::V(a.r_bar, 0)];
            let k = unit(tor_form.coeff(&u))?;
            let r = residual(&c, &set, &tor_form, eps, &u)?;
            c.v.get_mut(&a.r_bar).unwrap()[0] = r.scale(-k);
            set.insert(u[0], true);
        } else if d == 4 {
            // j′ = j⁰₋ lies in B⁰, so ♣(i⁰) and tor′ = eps are solved jointly.
            let (j0, jp, i0) = (tb.j0.unwrap(), tb.j_prime.unwrap(), tb.i0.unwrap());
            let (u0, u1) = (orbit(tbar, &j0), orbit(tbar, &jp));
            let club = self.club_form(&eff, i0);
            let both: Vec<Var> = u0.iter().chain(&u1).copied().collect();
            let m = [
                [club.coeff(&u0), club.coeff(&u1)],
                [tor_form.coeff(&u0), tor_form.coeff(&u1)],
            ];
            let det = unit(m[0][0] * m[1][1] - m[0][1] * m[1][0])?;
            let r0 = residual(&c, &set, &club, &kind.zero(), &both)?;
            let r1 = residual(&c, &set, &tor_form, eps, &both)?;
            let x0 = (r0.scale(-m[1][1]) + r1.scale(m[0][1])).scale(det);
            let x1 = (r0.scale(m[1][0]) + r1.scale(-m[0][0])).scale(det);
            put(&mut c, &mut set, &j0, x0);
            put(&mut c, &mut set, &jp, x1);
        } else {
            // Step 1.
            if let (Some(i0), Some(j0)) = (tb.i0, tb.j0) {
                let u = orbit(tbar, &j0);
                let club = self.club_form(&eff, i0);
                let k = unit(club.coeff(&u))?;
                let r = residual(&c, &set, &club, &kind.zero(), &u)?;
                put(&mut c, &mut set, &j0, r.scale(-k));
            }
            // Step 2.
            let jp = tb.j_prime.unwrap();
            let u = orbit(tbar, &jp);
            let k = unit(tor_form.coeff(&u))?;
            let r = residual(&c, &set, &tor_form, eps, &u)?;
            put(&mut c, &mut set, &jp, r.scale(-k));
        }

        // Step 3, in decreasing i1.
        let mut step3: Vec<PairIndex> = tb.a_prime.iter().copied().filter(|i| i.i1 != 1).collect();
        step3.sort_by_key(|x| std::cmp::Reverse(x.i1));
        for i in step3 {
            let j = TripleIndex::new(d - i.i1, 1, i.i1 - 1);
            let u = orbit(tbar, &j);
            let form = self.spade_form(i);
            let k = unit(form.coeff(&u))?;
            let r = residual(&c, &set, &form, &kind.zero(), &u)?;
            put(&mut c, &mut set, &j, r.scale(-k));
        }

        // Step 4.
        for &i in &tb.a_prime {
            let u = [Var::V(a.r_bar, i.slot())];
            let form = self.club_form(&eff, i);
            let k = unit(form.coeff(&u))?;
            let r = residual(&c, &set, &form, &kind.zero(), &u)?;
            c.v.get_mut(&a.r_bar).unwrap()[i.slot()] = r.scale(-k);
            set.insert(u[0], true);
        }

        let expected = tb.na() * c.v.len() + tb.nb() * tr.nsw();
        if set.len() != expected {
            return Err(CocyclicError::Internal(format!("{} of {expected} coordinates specified", set.len())));
        }
        Ok(c)
    }

    /// (LHS, RHS) of the weighted combination identity at switch t.
    pub fn nice_combination_check(&self, z: &[Vec<G>], t: usize) -> Result<(G, G), CocyclicError> {
        if !crate::homology::diamond_holds(&self.frame.track, &self.tables, z, MEMBER_TOL) {
            return Err(CocyclicError::NotInY("rotation identity".into()));
        }
        let tb = &self.tables;
        let tr = &self.frame.track;
        let kind = self.kind;
        let three = [t, tr.t_plus(t), tr.t_minus(t)];
        let col = |k: usize| -> G {
            let mut acc = kind.zero();
            for &s in &three {
                for n in tb.b_with_j2(k) {
                    acc = acc + z[s][n];
                }
            }
            acc
        };
        let mut lhs = kind.zero();
        for i in &tb.a_prime {
            lhs = lhs + (col(i.i1) - col(i.i2)).scale(i.i1 as i64);
        }
        let mut rhs = kind.zero();
        for j in &tb.b_star {
            rhs = rhs + z[t][tb.b_index(j)].scale(tb.d as i64);
        }
        if tb.d.is_multiple_of(2) {
            let mut acc = kind.zero();
            for j in &tb.b_zero {
                for &s in &three {
                    acc = acc + z[s][tb.b_index(j)];
                }
            }
            rhs = rhs + acc.scale(tb.d as i64 / 2);
        }
        Ok((lhs, rhs))
    }

    pub fn to_json(&self, c: &CocyclicCoords) -> Value {
        let tr = &self.frame.track;
        let mut v = Map::new();
        for (&r, vec) in &c.v {
            let inner: Map<String, Value> =
                self.tables.a.iter().map(|i| (i.i1.to_string(), vec[i.slot()].to_json())).collect();
            v.insert(tr.rect_ids[r].to_string(), Value::Object(inner));
        }
        let mut z = Map::new();
        for (t, vec) in c.z.iter().enumerate() {
            let inner: Map<String, Value> =
                self.tables.b.iter().enumerate().map(|(n, j)| (j.key(), vec[n].to_json())).collect();
            z.insert(tr.switch_ids[t].to_string(), Value::Object(inner));
        }
        serde_json::json!({"d": c.d, "group": c.kind.tag(), "v": v, "z": z})
    }

    pub fn from_json(&self, value: &Value) -> Result<CocyclicCoords, CocyclicError> {
        let bad = |m: &str| CocyclicError::Malformed(m.to_string());
        let d = value.get("d").and_then(Value::as_u64).ok_or_else(|| bad("missing d"))? as usize;
        if d != self.d() {
            return Err(bad(&format!("file has d = {d}, expected {}", self.d())));
        }
        let kind = GroupKind::parse(value.get("group").and_then(Value::as_str).ok_or_else(|| bad("missing group"))?)?;
        if kind != self.kind {
            return Err(bad(&format!("file group {kind} does not match {}", self.kind)));
        }
        let tr = &self.frame.track;
        let mut c = self.zero();
        let vmap = value.get("v").and_then(Value::as_object).ok_or_else(|| bad("missing v"))?;
        if vmap.len() != c.v.len() {
            return Err(bad("v must list exactly the non-tree rectangles"));
        }
        for (key, inner) in vmap {
            let id: u32 = key.parse().map_err(|_| bad("bad rectangle id"))?;
            let r = tr.rect_index(id).ok_or_else(|| bad(&format!("unknown rectangle {id}")))?;
            let slot = c.v.get_mut(&r).ok_or_else(|| bad(&format!("rectangle {id} is a tree edge")))?;
            let inner = inner.as_object().ok_or_else(|| bad("v entry must be an object"))?;
            if inner.len() != self.tables.na() {
                return Err(bad(&format!("rectangle {id} needs {} entries", self.tables.na())));
            }
            for (k, x) in inner {
                let i1: usize = k.parse().map_err(|_| bad("bad i1 key"))?;
                if i1 == 0 || i1 >= d {
                    return Err(bad(&format!("i1 = {i1} out of range")));
                }
                slot[i1 - 1] = GroupElement::from_json(kind, x)?;
            }
        }
        let zmap = value.get("z").and_then(Value::as_object).ok_or_else(|| bad("missing z"))?;
        if zmap.len() != tr.nsw() {
            return Err(bad("z must list every switch"));
        }
        for (key, inner) in zmap {
            let id: u32 = key.parse().map_err(|_| bad("bad switch id"))?;
            let t = tr.switch_index(id).ok_or_else(|| bad(&format!("unknown switch {id}")))?;
            let inner = inner.as_object().ok_or_else(|| bad("z entry must be an object"))?;
            if inner.len() != self.tables.nb() {
                return Err(bad(&format!("switch {id} needs {} entries", self.tables.nb())));
            }
            for (k, x) in inner {
                let j = TripleIndex::parse_key(k).ok_or_else(|| bad("bad triple key"))?;
                let n = self.tables.try_b_index(&j).ok_or_else(|| bad(&format!("{k} not in B")))?;
                c.z[t][n] = GroupElement::from_json(kind, x)?;
            }
        }
        Ok(c)
    }
}

/// α(T1,T3) from α(T1,T2), α(T2,T3) and θ at the middle plaque.
pub fn compose_alpha(a12: &[G], a23: &[G], theta: &[G], tables: &IndexTables, label: Label) -> Vec<G> {
    let kind = a12.first().map(|x| x.kind()).unwrap_or(GroupKind::Real);
    tables
        .a
        .iter()
        .map(|i| {
            let extra = match label {
                Label::Clockwise => tables.b_with_j2(i.i1).fold(kind.zero(), |acc, n| acc + theta[n]),
                Label::Counterclockwise => {
                    -tables.b_with_j2(i.i2).fold(kind.zero(), |acc, n| acc + theta[n])
                }
            };
            a12[i.slot()] + a23[i.slot()] + extra
        })
        .collect()
}

/// Side class of switch t under the anchors' left/right convention.
pub fn effective_side(space: &Space, a: &Anchors, t: usize) -> Side {
    let s = space.frame.class.side_of(t);
    if a.swapped {
        s.flip()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traintrack::{generate_fixture, Track};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(d: usize, kind: GroupKind) -> Space {
        let t = Track::new(generate_fixture(2, 1).unwrap()).unwrap();
        Space::new(Frame::seeded(t, 1).unwrap(), d, kind).unwrap()
    }

    #[test]
    fn zero_point() {
        let s = space(5, GroupKind::Cylinder);
        let z = s.zero();
        assert!(s.in_y(&z));
        assert!(s.tor_prime(&z).unwrap().is_zero(1e-12));
        let a = s.default_anchors().unwrap();
        let (f, t) = s.i2_forward(&z, &a).unwrap();
        assert!(t.is_zero(0.0));
        assert!(f.v.values().flatten().chain(&f.v_bar).all(|x| x.is_zero(0.0)));
    }

    #[test]
    fn free_count_matches_dimension() {
        for d in 2..=6 {
            let s = space(d, GroupKind::Real);
            assert_eq!(s.free_count() as i64, crate::algebra::dimension_count(d, 2).unwrap());
        }
    }

    #[test]
    fn diamond_perturbation_detected() {
        let s = space(4, GroupKind::Cyclic(12));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = s.random_diamond(&mut rng);
        assert!(s.check_diamond(&c));
        c.z[0][0] = c.z[0][0] + GroupElement::cyclic(12, 1);
        assert!(!s.check_diamond(&c));
    }

    #[test]
    fn i2_roundtrip_all_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for g in [2usize, 3] {
            for seed in 1..=3u64 {
                let t = Track::new(generate_fixture(g, seed).unwrap()).unwrap();
                for d in 2..=7 {
                    for kind in [GroupKind::Cylinder, GroupKind::Cyclic(d as u32 * 5), GroupKind::Circle] {
                        let s = Space::new(Frame::seeded(t.clone(), seed + 10).unwrap(), d, kind).unwrap();
                        let a = s.default_anchors().unwrap();
                        for k in 0..d as i64 {
                            let eps = kind.torsion(d, k).unwrap();
                            let f = s.random_free(&mut rng, &a);
                            let c = s.i2_inverse(&f, &eps, &a).unwrap();
                            assert!(s.in_y(&c));
                            let (f2, e2) = s.i2_forward(&c, &a).unwrap();
                            assert!(f.distance(&f2) < 1e-9, "g{g} d{d} {kind}");
                            assert!(e2.approx_eq(&eps, 1e-9));
                            assert!(s.tor_value(&c, &a.reps, true).approx_eq(&eps, 1e-9));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn swapped_anchors_and_rep_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = Track::new(generate_fixture(2, 4).unwrap()).unwrap();
        for d in [3usize, 5, 6] {
            let s = Space::new(Frame::seeded(t.clone(), 2).unwrap(), d, GroupKind::Cylinder).unwrap();
            let mut a = s.default_anchors().unwrap();
            assert!(!s.frame.class.u_left.is_empty());
            a.swapped = !a.swapped;
            a.r_bar = *s.class(a.swapped).u_right.iter().min().unwrap();
            let eps = GroupKind::Cylinder.torsion(d, 1).unwrap();
            let f = s.random_free(&mut rng, &a);
            let c = s.i2_inverse(&f, &eps, &a).unwrap();
            let (f2, _) = s.i2_forward(&c, &a).unwrap();
            assert!(f.distance(&f2) < 1e-9);
            let other: Vec<usize> = s.frame.track.plaques.iter().map(|p| *p.iter().max().unwrap()).collect();
            assert!(s.tor_prime_with(&c, &other).unwrap().approx_eq(&eps, 1e-9));
        }
    }
}
