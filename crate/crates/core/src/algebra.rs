//! Coefficient groups and the index sets A and B.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rand::Rng;
use serde_json::Value;
use thiserror::Error;

const TAU: f64 = 2.0 * PI;

/// Default tolerance for comparing real-backed group elements.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("group kind mismatch: {0} vs {1}")]
    KindMismatch(GroupKind, GroupKind),
    #[error("unknown group tag `{0}`")]
    BadTag(String),
    #[error("d must be at least 2, got {0}")]
    BadDegree(usize),
    #[error("genus must be at least 2, got {0}")]
    BadGenus(usize),
    #[error("dimension count mismatch for d={d}, g={g}: {got} != {want}")]
    DimensionMismatch { d: usize, g: usize, got: i64, want: i64 },
    #[error("cannot read {kind} element from {value}")]
    BadValue { kind: GroupKind, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Real,
    Circle,
    Cylinder,
    Cyclic(u32),
}

impl GroupKind {
    pub fn parse(tag: &str) -> Result<Self, AlgebraError> {
        match tag {
            "real" => Ok(GroupKind::Real),
            "circle" => Ok(GroupKind::Circle),
            "cylinder" => Ok(GroupKind::Cylinder),
            _ => {
                let n = tag
                    .strip_prefix("zd:")
                    .and_then(|s| s.parse::<u32>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| AlgebraError::BadTag(tag.to_string()))?;
                Ok(GroupKind::Cyclic(n))
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            GroupKind::Real => "real".into(),
            GroupKind::Circle => "circle".into(),
            GroupKind::Cylinder => "cylinder".into(),
            GroupKind::Cyclic(n) => format!("zd:{n}"),
        }
    }

    pub fn zero(&self) -> GroupElement {
        match *self {
            GroupKind::Real => GroupElement::Real(0.0),
            GroupKind::Circle => GroupElement::Circle(0.0),
            GroupKind::Cylinder => GroupElement::Cylinder(0.0, 0.0),
            GroupKind::Cyclic(n) => GroupElement::Cyclic { n, k: 0 },
        }
    }

    pub fn zeros(&self, len: usize) -> Vec<GroupElement> {
        vec![self.zero(); len]
    }

    /// Uniform-ish random element: reals in [-1, 1], angles in [0, 2π).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        match *self {
            GroupKind::Real => GroupElement::Real(rng.gen_range(-1.0..1.0)),
            GroupKind::Circle => GroupElement::circle(rng.gen_range(0.0..TAU)),
            GroupKind::Cylinder => {
                GroupElement::cylinder(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU))
            }
            GroupKind::Cyclic(n) => GroupElement::Cyclic { n, k: rng.gen_range(0..n) },
        }
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<GroupElement> {
        (0..len).map(|_| self.sample(rng)).collect()
    }

    /// The element of the d-torsion subgroup with residue `k` in Z_d, if the
    /// group contains one.
    pub fn torsion(&self, d: usize, k: i64) -> Option<GroupElement> {
        let d = d as i64;
        let k = k.rem_euclid(d);
        match *self {
            GroupKind::Real => (k == 0).then_some(GroupElement::Real(0.0)),
            GroupKind::Circle => Some(GroupElement::circle(TAU * k as f64 / d as f64)),
            GroupKind::Cylinder => Some(GroupElement::cylinder(0.0, TAU * k as f64 / d as f64)),
            GroupKind::Cyclic(n) => {
                let n = n as i64;
                ((k * n) % d == 0).then(|| GroupElement::Cyclic {
                    n: n as u32,
                    k: ((k * n / d).rem_euclid(n)) as u32,
                })
            }
        }
    }

    /// Residues in Z_d that the d-torsion subgroup of this group realizes.
    pub fn torsion_residues(&self, d: usize) -> Vec<i64> {
        (0..d as i64).filter(|&k| self.torsion(d, k).is_some()).collect()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, GroupKind::Cyclic(_))
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// An element of R, R/2πZ, C/2πiZ (real part, angle) or Z_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    Real(f64),
    Circle(f64),
    Cylinder(f64, f64),
    Cyclic { n: u32, k: u32 },
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// min(|Δ|, 2π − |Δ|) for two angles.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let x = wrap(a - b);
    x.min(TAU - x)
}

impl GroupElement {
    pub fn circle(a: f64) -> Self {
        GroupElement::Circle(wrap(a))
    }

    pub fn cylinder(re: f64, ang: f64) -> Self {
        GroupElement::Cylinder(re, wrap(ang))
    }

    pub fn cyclic(n: u32, k: i64) -> Self {
        GroupElement::Cyclic { n, k: k.rem_euclid(n as i64) as u32 }
    }

    pub fn kind(&self) -> GroupKind {
        match *self {
            GroupElement::Real(_) => GroupKind::Real,
            GroupElement::Circle(_) => GroupKind::Circle,
            GroupElement::Cylinder(..) => GroupKind::Cylinder,
            GroupElement::Cyclic { n, .. } => GroupKind::Cyclic(n),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        use GroupElement::*;
        match (*self, *other) {
            (Real(a), Real(b)) => Ok(Real(a + b)),
            (Circle(a), Circle(b)) => Ok(GroupElement::circle(a + b)),
            (Cylinder(a, x), Cylinder(b, y)) => Ok(GroupElement::cylinder(a + b, x + y)),
            (Cyclic { n, k }, Cyclic { n: m, k: l }) if n == m => {
                Ok(GroupElement::cyclic(n, k as i64 + l as i64))
            }
            _ => Err(AlgebraError::KindMismatch(self.kind(), other.kind())),
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        use GroupElement::*;
        match *self {
            Real(a) => Real(c as f64 * a),
            Circle(a) => GroupElement::circle(c as f64 * a),
            Cylinder(a, x) => GroupElement::cylinder(c as f64 * a, c as f64 * x),
            Cyclic { n, k } => {
                GroupElement::cyclic(n, ((c as i128 * k as i128).rem_euclid(n as i128)) as i64)
            }
        }
    }

    /// Distance used for tolerance comparisons; 0 or 1 for cyclic groups.
    pub fn distance(&self, other: &Self) -> f64 {
        use GroupElement::*;
        match (*self, *other) {
            (Real(a), Real(b)) => (a - b).abs(),
            (Circle(a), Circle(b)) => angular_distance(a, b),
            (Cylinder(a, x), Cylinder(b, y)) => (a - b).abs().max(angular_distance(x, y)),
            (Cyclic { n, k }, Cyclic { n: m, k: l }) if n == m => {
                if k == l {
                    0.0
                } else {
                    1.0
                }
            }
            _ => f64::INFINITY,
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.approx_eq(&self.kind().zero(), tol)
    }

    /// Image in C/2πiZ. Cyclic residues k map to 2πik/n.
    pub fn to_cylinder(&self) -> Self {
        use GroupElement::*;
        match *self {
            Real(a) => Cylinder(a, 0.0),
            Circle(a) => Cylinder(0.0, a),
            Cylinder(..) => *self,
            Cyclic { n, k } => GroupElement::cylinder(0.0, TAU * k as f64 / n as f64),
        }
    }

    /// Residue in Z_d of a d-torsion element (rounded for real-backed kinds).
    pub fn torsion_residue(&self, d: usize) -> i64 {
        use GroupElement::*;
        let d = d as i64;
        match *self {
            Real(_) => 0,
            Circle(a) | Cylinder(_, a) => ((a * d as f64 / TAU).round() as i64).rem_euclid(d),
            Cyclic { n, k } => ((k as i64 * d) / n as i64).rem_euclid(d),
        }
    }

    pub fn to_json(&self) -> Value {
        use GroupElement::*;
        match *self {
            Real(a) | Circle(a) => Value::from(a),
            Cylinder(a, x) => Value::from(vec![a, x]),
            Cyclic { k, .. } => Value::from(k),
        }
    }

    pub fn from_json(kind: GroupKind, v: &Value) -> Result<Self, AlgebraError> {
        let bad = || AlgebraError::BadValue { kind, value: v.to_string() };
        match kind {
            GroupKind::Real => v.as_f64().map(GroupElement::Real).ok_or_else(bad),
            GroupKind::Circle => v.as_f64().map(GroupElement::circle).ok_or_else(bad),
            GroupKind::Cylinder => {
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let re = arr[0].as_f64().ok_or_else(bad)?;
                let im = arr[1].as_f64().ok_or_else(bad)?;
                Ok(GroupElement::cylinder(re, im))
            }
            GroupKind::Cyclic(n) => {
                let k = v.as_i64().ok_or_else(bad)?;
                Ok(GroupElement::cyclic(n, k))
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroupElement::*;
        match *self {
            Real(a) => write!(f, "{a:.12}"),
            Circle(a) => write!(f, "{a:.12}"),
            Cylinder(a, x) => write!(f, "({a:.12}, {x:.12})"),
            Cyclic { n, k } => write!(f, "{k} mod {n}"),
        }
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("group kind mismatch")
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> Self {
        self.scale(-1)
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

pub fn group_add(a: &GroupElement, b: &GroupElement) -> Result<GroupElement, AlgebraError> {
    a.try_add(b)
}

pub fn int_scale(n: i64, a: &GroupElement) -> GroupElement {
    a.scale(n)
}

pub fn is_d_torsion(a: &GroupElement, d: usize) -> bool {
    a.scale(d as i64).is_zero(TOL)
}

/// Sum of an iterator of elements of one kind.
pub fn sum<'a, I: IntoIterator<Item = &'a GroupElement>>(kind: GroupKind, it: I) -> GroupElement {
    it.into_iter().fold(kind.zero(), |acc, x| acc + *x)
}

pub fn vec_add(a: &[GroupElement], b: &[GroupElement]) -> Vec<GroupElement> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn vec_sub(a: &[GroupElement], b: &[GroupElement]) -> Vec<GroupElement> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn vec_neg(a: &[GroupElement]) -> Vec<GroupElement> {
    a.iter().map(|x| -*x).collect()
}

/// Reindex a G^A vector (slot i1−1) by the hat involution.
pub fn vec_hat(a: &[GroupElement]) -> Vec<GroupElement> {
    a.iter().rev().copied().collect()
}

pub fn vec_distance(a: &[GroupElement], b: &[GroupElement]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| x.distance(y)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    pub i1: usize,
    pub i2: usize,
}

impl PairIndex {
    pub fn new(i1: usize, i2: usize) -> Self {
        PairIndex { i1, i2 }
    }

    pub fn hat(&self) -> Self {
        PairIndex { i1: self.i2, i2: self.i1 }
    }

    /// Slot of this index in a G^A vector.
    pub fn slot(&self) -> usize {
        self.i1 - 1
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i1, self.i2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleIndex {
    pub j1: usize,
    pub j2: usize,
    pub j3: usize,
}

impl TripleIndex {
    pub fn new(j1: usize, j2: usize, j3: usize) -> Self {
        TripleIndex { j1, j2, j3 }
    }

    pub fn plus(&self) -> Self {
        TripleIndex { j1: self.j2, j2: self.j3, j3: self.j1 }
    }

    pub fn minus(&self) -> Self {
        TripleIndex { j1: self.j3, j2: self.j1, j3: self.j2 }
    }

    /// (j3, j2, j1): the index matching a reversed flag triple.
    pub fn hat(&self) -> Self {
        TripleIndex { j1: self.j3, j2: self.j2, j3: self.j1 }
    }

    pub fn parts(&self) -> [usize; 3] {
        [self.j1, self.j2, self.j3]
    }

    pub fn key(&self) -> String {
        format!("{},{},{}", self.j1, self.j2, self.j3)
    }

    pub fn parse_key(s: &str) -> Option<Self> {
        let p: Vec<usize> = s.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
        (p.len() == 3).then(|| TripleIndex::new(p[0], p[1], p[2]))
    }
}

impl fmt::Display for TripleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.j1, self.j2, self.j3)
    }
}

fn floor_half(x: i64) -> i64 {
    x.div_euclid(2)
}

fn ceil_half(x: i64) -> i64 {
    -(-x).div_euclid(2)
}

#[derive(Debug, Clone)]
pub struct IndexTables {
    pub d: usize,
    pub a: Vec<PairIndex>,
    pub a_prime: Vec<PairIndex>,
    pub a_dprime: Vec<PairIndex>,
    pub b: Vec<TripleIndex>,
    pub b_prime: Vec<TripleIndex>,
    pub b_dprime: Vec<TripleIndex>,
    pub b_star: Vec<TripleIndex>,
    pub b_zero: Vec<TripleIndex>,
    pub i0: Option<PairIndex>,
    pub j0: Option<TripleIndex>,
    pub j_prime: Option<TripleIndex>,
    pos: Vec<Option<usize>>,
}

impl IndexTables {
    pub fn new(d: usize) -> Result<Self, AlgebraError> {
        if d < 2 {
            return Err(AlgebraError::BadDegree(d));
        }
        let di = d as i64;
        let a: Vec<PairIndex> = (1..d).map(|i1| PairIndex::new(i1, d - i1)).collect();
        let a_prime = a.iter().copied().filter(|i| (i.i1 as i64) <= floor_half(di - 1)).collect();
        let a_dprime = a.iter().copied().filter(|i| (i.i1 as i64) <= ceil_half(di - 1)).collect();

        let mut b = Vec::new();
        for j1 in 1..d {
            for j2 in 1..d {
                if j1 + j2 < d {
                    b.push(TripleIndex::new(j1, j2, d - j1 - j2));
                }
            }
        }
        let bp = floor_half(di - 3);
        let bdp = ceil_half(di - 3);
        let half = floor_half(di - 1);
        let b_prime = b.iter().copied().filter(|j| j.j2 == 1 && (j.j3 as i64) <= bp).collect();
        let b_dprime = b.iter().copied().filter(|j| j.j2 == 1 && (j.j3 as i64) <= bdp).collect();
        let b_star = b
            .iter()
            .copied()
            .filter(|j| j.parts().iter().all(|&x| x as i64 <= half))
            .collect();
        let even = d.is_multiple_of(2);
        let b_zero = if even { b.iter().copied().filter(|j| j.j2 == d / 2).collect() } else { vec![] };
        let i0 = even.then(|| PairIndex::new(d / 2, d / 2));
        let j0 = (even && d >= 4).then(|| TripleIndex::new(d / 2, 1, (d - 2) / 2));
        let j_prime = if d < 3 {
            None
        } else if even {
            Some(TripleIndex::new((d - 2) / 2, 2, (d - 2) / 2))
        } else {
            Some(TripleIndex::new((d - 1) / 2, 1, (d - 1) / 2))
        };
        let mut pos = vec![None; (d + 1) * (d + 1)];
        for (n, j) in b.iter().enumerate() {
            pos[j.j1 * (d + 1) + j.j2] = Some(n);
        }
        Ok(IndexTables {
            d,
            a,
            a_prime,
            a_dprime,
            b,
            b_prime,
            b_dprime,
            b_star,
            b_zero,
            i0,
            j0,
            j_prime,
            pos,
        })
    }

    /// Position of j in the lexicographic enumeration of B.
    pub fn b_index(&self, j: &TripleIndex) -> usize {
        self.try_b_index(j).expect("triple not in B")
    }

    pub fn try_b_index(&self, j: &TripleIndex) -> Option<usize> {
        if j.j1 == 0 || j.j2 == 0 || j.j3 == 0 || j.j1 + j.j2 + j.j3 != self.d {
            return None;
        }
        self.pos[j.j1 * (self.d + 1) + j.j2]
    }

    pub fn nb(&self) -> usize {
        self.b.len()
    }

    pub fn na(&self) -> usize {
        self.a.len()
    }

    /// B-positions with middle entry k.
    pub fn b_with_j2(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.b.iter().enumerate().filter(move |(_, j)| j.j2 == k).map(|(n, _)| n)
    }
}

pub fn index_tables(d: usize) -> Result<IndexTables, AlgebraError> {
    IndexTables::new(d)
}

/// |A|(6g−5) + |B|(4g−4) − (|A′|+|B″|) − 1, checked against (d²−1)(2g−2).
pub fn dimension_count(d: usize, g: usize) -> Result<i64, AlgebraError> {
    if g < 2 {
        return Err(AlgebraError::BadGenus(g));
    }
    let t = IndexTables::new(d)?;
    let (gi, di) = (g as i64, d as i64);
    let got = t.a.len() as i64 * (6 * gi - 5) + t.b.len() as i64 * (4 * gi - 4)
        - (t.a_prime.len() as i64 + t.b_dprime.len() as i64)
        - 1;
    let want = (di * di - 1) * (2 * gi - 2);
    if got != want {
        return Err(AlgebraError::DimensionMismatch { d, g, got, want });
    }
    Ok(got)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_examples() {
        let a = GroupElement::cyclic(5, 3) + GroupElement::cyclic(5, 4);
        assert_eq!(a, GroupElement::cyclic(5, 2));
        let c = GroupElement::cylinder(1.0, 6.0) + GroupElement::cylinder(0.5, 1.0);
        assert!(c.approx_eq(&GroupElement::Cylinder(1.5, 7.0 - TAU), 1e-12));
        let x = GroupElement::circle(2.5);
        assert_eq!(x + GroupKind::Circle.zero(), x);
        assert_eq!(int_scale(3, &GroupElement::cyclic(6, 2)), GroupElement::cyclic(6, 0));
        assert!(int_scale(2, &GroupElement::circle(PI)).is_zero(TOL));
        assert!(is_d_torsion(&GroupElement::cylinder(0.0, TAU / 3.0), 3));
        assert!(!is_d_torsion(&GroupElement::Real(0.1), 5));
        assert!(is_d_torsion(&GroupElement::cyclic(12, 4), 3));
    }

    #[test]
    fn mismatch_is_error() {
        let r = GroupElement::Real(1.0).try_add(&GroupElement::circle(1.0));
        assert!(matches!(r, Err(AlgebraError::KindMismatch(..))));
        assert!(GroupElement::cyclic(4, 1).try_add(&GroupElement::cyclic(5, 1)).is_err());
    }

    #[test]
    fn near_full_turn_equals_zero() {
        let a = GroupElement::circle(TAU - 1e-12);
        assert!(a.approx_eq(&GroupElement::circle(0.0), TOL));
        assert_eq!(GroupElement::circle(TAU), GroupElement::Circle(0.0));
    }

    #[test]
    fn tags_roundtrip() {
        for tag in ["real", "circle", "cylinder", "zd:12"] {
            assert_eq!(GroupKind::parse(tag).unwrap().tag(), tag);
        }
        assert!(GroupKind::parse("zd:x").is_err());
        assert!(GroupKind::parse("complex").is_err());
    }

    #[test]
    fn torsion_elements() {
        let e = GroupKind::Cylinder.torsion(3, 1).unwrap();
        assert_eq!(e.torsion_residue(3), 1);
        assert_eq!(GroupKind::Cyclic(12).torsion_residues(3), vec![0, 1, 2]);
        assert_eq!(GroupKind::Cyclic(12).torsion_residues(5), vec![0]);
        assert_eq!(GroupKind::Real.torsion_residues(4), vec![0]);
        let t = GroupKind::Cyclic(12).torsion(4, 3).unwrap();
        assert_eq!(t, GroupElement::cyclic(12, 9));
        assert_eq!(t.torsion_residue(4), 3);
    }

    #[test]
    fn tables_d5() {
        let t = IndexTables::new(5).unwrap();
        assert_eq!(t.a.len(), 4);
        assert_eq!(t.a_prime, vec![PairIndex::new(1, 4), PairIndex::new(2, 3)]);
        assert_eq!(
            t.b_star,
            vec![TripleIndex::new(1, 2, 2), TripleIndex::new(2, 1, 2), TripleIndex::new(2, 2, 1)]
        );
        assert_eq!(t.b_dprime, vec![TripleIndex::new(3, 1, 1)]);
        assert_eq!(t.b_prime, t.b_dprime);
        assert_eq!(t.j_prime, Some(TripleIndex::new(2, 1, 2)));
    }

    #[test]
    fn tables_d4() {
        let t = IndexTables::new(4).unwrap();
        assert_eq!(t.i0, Some(PairIndex::new(2, 2)));
        assert_eq!(t.b_zero, vec![TripleIndex::new(1, 2, 1)]);
        assert!(t.b_star.is_empty());
        assert_eq!(t.j0, Some(TripleIndex::new(2, 1, 1)));
        assert_eq!(t.j_prime, Some(TripleIndex::new(1, 2, 1)));
    }

    #[test]
    fn tables_d2() {
        let t = IndexTables::new(2).unwrap();
        assert_eq!(t.a, vec![PairIndex::new(1, 1)]);
        assert!(t.b.is_empty());
        assert!(IndexTables::new(1).is_err());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension_count(3, 2).unwrap(), 16);
        assert_eq!(dimension_count(2, 2).unwrap(), 6);
        assert_eq!(dimension_count(8, 3).unwrap(), 252);
        assert!(dimension_count(3, 1).is_err());
    }

    #[test]
    fn subset_relations_by_parity() {
        for d in 2..=10 {
            let t = IndexTables::new(d).unwrap();
            if d % 2 == 1 {
                assert_eq!(t.a_prime, t.a_dprime);
                assert_eq!(t.b_prime, t.b_dprime);
            } else {
                let mut a = t.a_prime.clone();
                a.push(t.i0.unwrap());
                assert_eq!(a, t.a_dprime);
                let mut b = t.b_prime.clone();
                if let Some(j0) = t.j0 {
                    b.push(j0);
                }
                b.sort();
                assert_eq!(b, t.b_dprime);
            }
            for (n, j) in t.b.iter().enumerate() {
                assert_eq!(t.b_index(j), n);
            }
        }
    }
}
