//! The obstruction class of a projective surface-group representation,
//! computed from unit-determinant lifts along the standard relator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::algebra::GroupElement;
use crate::flags::{matrix_from_json, CMat, FlagError};

pub const DET_TOL: f64 = 1e-8;
pub const SCALAR_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObError {
    #[error("matrix {0} has determinant {1}, expected 1")]
    Determinant(String, String),
    #[error("relator product is not scalar (residual {0:.3e})")]
    NotScalar(f64),
    #[error("bad representation: {0}")]
    Malformed(String),
    #[error("no sign choice makes the octagon relator trivial (best residual {0:.3e})")]
    Octagon(f64),
}

impl From<FlagError> for ObError {
    fn from(e: FlagError) -> Self {
        ObError::Malformed(e.to_string())
    }
}

/// Letter of the relator: generator index (a_k = 2k−2, b_k = 2k−1) and
/// whether it is inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorWord {
    pub genus: usize,
    pub letters: Vec<Letter>,
    /// Position of the inverse occurrence of each letter.
    pub pairing: Vec<usize>,
}

pub fn generator_name(k: usize) -> String {
    format!("{}{}", if k.is_multiple_of(2) { 'a' } else { 'b' }, k / 2 + 1)
}

/// a₁ b₁ a₁⁻¹ b₁⁻¹ … a_g b_g a_g⁻¹ b_g⁻¹.
pub fn standard_relator(g: usize) -> RelatorWord {
    let mut letters = Vec::with_capacity(4 * g);
    let mut pairing = Vec::with_capacity(4 * g);
    for k in 0..g {
        let (a, b) = (2 * k, 2 * k + 1);
        let base = 4 * k;
        letters.extend([
            Letter { generator: a, inverse: false },
            Letter { generator: b, inverse: false },
            Letter { generator: a, inverse: true },
            Letter { generator: b, inverse: true },
        ]);
        pairing.extend([base + 2, base + 3, base, base + 1]);
    }
    RelatorWord { genus: g, letters, pairing }
}

/// Unit-determinant lifts of the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedRep {
    pub d: usize,
    pub genus: usize,
    pub generators: Vec<CMat>,
    /// Known inverses of the generators; computed numerically when absent.
    pub inverses: Option<Vec<CMat>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObValue {
    pub value: GroupElement,
    pub residue: i64,
    pub scalar: Complex64,
    pub residual: f64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl LiftedRep {
    pub fn identity(d: usize, genus: usize) -> Self {
        LiftedRep { d, genus, generators: vec![CMat::identity(d, d); 2 * genus], inverses: None }
    }

    pub fn check(&self) -> Result<(), ObError> {
        if self.generators.len() != 2 * self.genus {
            return Err(ObError::Malformed(format!("need {} generators", 2 * self.genus)));
        }
        for (k, m) in self.generators.iter().enumerate() {
            if m.nrows() != self.d || m.ncols() != self.d {
                return Err(ObError::Malformed(format!("{} is not {}x{}", generator_name(k), self.d, self.d)));
            }
            let det = m.determinant();
            if (det - c(1.0, 0.0)).norm() > DET_TOL {
                return Err(ObError::Determinant(generator_name(k), format!("{det}")));
            }
        }
        Ok(())
    }

    /// The matrices A_1, …, A_{4g} along the relator.
    pub fn sequence(&self) -> Result<Vec<CMat>, ObError> {
        self.check()?;
        let word = standard_relator(self.genus);
        let mut inv = Vec::with_capacity(self.generators.len());
        if let Some(given) = &self.inverses {
            if given.len() != self.generators.len() || given.iter().any(|m| m.nrows() != self.d || m.ncols() != self.d) {
                return Err(ObError::Malformed("inverse list does not match generators".into()));
            }
            inv = given.clone();
        }
        for (k, m) in self.generators.iter().enumerate().skip(inv.len()) {
            inv.push(
                m.clone()
                    .try_inverse()
                    .ok_or_else(|| ObError::Malformed(format!("{} is singular", generator_name(k))))?,
            );
        }
        Ok(word
            .letters
            .iter()
            .map(|l| if l.inverse { inv[l.generator].clone() } else { self.generators[l.generator].clone() })
            .collect())
    }

    pub fn conjugate(&self, p: &CMat) -> Result<Self, ObError> {
        let pinv = p.clone().try_inverse().ok_or_else(|| ObError::Malformed("singular conjugator".into()))?;
        Ok(LiftedRep {
            d: self.d,
            genus: self.genus,
            generators: self.generators.iter().map(|m| p * m * &pinv).collect(),
            inverses: self.inverses.as_ref().map(|v| v.iter().map(|m| p * m * &pinv).collect()),
        })
    }

    /// JSON {"d", "genus", "matrices": {"a1": rows, …}}, entries [re, im].
    pub fn from_json(v: &Value) -> Result<Self, ObError> {
        let bad = |m: &str| ObError::Malformed(m.to_string());
        let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| bad("missing d"))? as usize;
        let genus = v.get("genus").and_then(Value::as_u64).ok_or_else(|| bad("missing genus"))? as usize;
        if d < 2 || genus < 1 {
            return Err(bad("need d ≥ 2 and genus ≥ 1"));
        }
        let mats = v.get("matrices").and_then(Value::as_object).ok_or_else(|| bad("missing matrices"))?;
        let mut generators = Vec::with_capacity(2 * genus);
        for k in 0..2 * genus {
            let name = generator_name(k);
            let m = match mats.get(&name) {
                Some(x) => matrix_from_json(x, false)?,
                None => CMat::identity(d, d),
            };
            generators.push(m);
        }
        if let Some(extra) = mats.keys().find(|k| (0..2 * genus).all(|i| generator_name(i) != **k)) {
            return Err(bad(&format!("unknown generator {extra}")));
        }
        let rep = LiftedRep { d, genus, generators, inverses: None };
        rep.check()?;
        Ok(rep)
    }

    pub fn to_json(&self) -> Value {
        let mut mats = Map::new();
        for (k, m) in self.generators.iter().enumerate() {
            let rows: Vec<Value> = m
                .row_iter()
                .map(|r| Value::Array(r.iter().map(|z| serde_json::json!([z.re, z.im])).collect()))
                .collect();
            mats.insert(generator_name(k), Value::Array(rows));
        }
        serde_json::json!({"d": self.d, "genus": self.genus, "matrices": mats})
    }
}

/// ob from an explicit sequence A_1, …, A_n whose product is scalar.
pub fn ob_of_sequence(seq: &[CMat]) -> Result<ObValue, ObError> {
    let d = seq.first().map(|m| m.nrows()).ok_or_else(|| ObError::Malformed("empty relator".into()))?;
    let mut prod = CMat::identity(d, d);
    for m in seq {
        prod *= m;
    }
    let lambda = prod.trace() / d as f64;
    let residual = (&prod - CMat::identity(d, d) * lambda).norm() / (d as f64).sqrt();
    if residual > SCALAR_TOL || lambda.norm() < 1e-12 {
        return Err(ObError::NotScalar(residual));
    }
    let ang = lambda.arg();
    let value = GroupElement::cylinder(lambda.norm().ln(), ang);
    let k = (ang * d as f64 / (2.0 * PI)).round() as i64;
    Ok(ObValue { value, residue: k.rem_euclid(d as i64), scalar: lambda, residual })
}

pub fn ob(rep: &LiftedRep) -> Result<ObValue, ObError> {
    ob_of_sequence(&rep.sequence()?)
}

/// Same class after rescaling paired lifts by d-th roots of unity and
/// rotating the relator.
pub fn lift_independence<R: Rng + ?Sized>(rep: &LiftedRep, rng: &mut R, rotation: usize) -> Result<bool, ObError> {
    let base = ob(rep)?;
    let mut seq = rep.sequence()?;
    let word = standard_relator(rep.genus);
    let d = rep.d;
    for (i, &j) in word.pairing.iter().enumerate() {
        if i < j {
            let k = rng.gen_range(0..d) as f64;
            let z = Complex64::from_polar(1.0, 2.0 * PI * k / d as f64);
            seq[i] *= z;
            seq[j] *= z.inv();
        }
    }
    let n = seq.len();
    seq.rotate_left(rotation % n);
    let other = ob_of_sequence(&seq)?;
    let tol = (10.0 * (base.residual + other.residual)).max(1e-9);
    Ok(other.residue == base.residue && other.value.approx_eq(&base.value, tol))
}

/// Cyclic shift e_k ↦ e_{k+1} and clock diag(ω^k), scaled to determinant 1.
pub fn clock_shift_rep(d: usize, genus: usize) -> LiftedRep {
    let norm = Complex64::from_polar(1.0, PI * (d as f64 - 1.0) / d as f64);
    let shift = CMat::from_fn(d, d, |i, j| if i == (j + 1) % d { norm } else { c(0.0, 0.0) });
    let clock = CMat::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 2.0 * PI * i as f64 / d as f64) * norm
        } else {
            c(0.0, 0.0)
        }
    });
    let mut rep = LiftedRep::identity(d, genus);
    rep.generators[0] = shift;
    rep.generators[1] = clock;
    rep
}

/// Random diagonal matrices of determinant 1 (an abelian representation).
pub fn torus_rep<R: Rng + ?Sized>(rng: &mut R, d: usize, genus: usize) -> LiftedRep {
    let generators = (0..2 * genus)
        .map(|_| {
            let mut diag: Vec<Complex64> =
                (0..d).map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI))).collect();
            let prod: Complex64 = diag.iter().product();
            diag[d - 1] /= prod;
            CMat::from_diagonal(&nalgebra::DVector::from_vec(diag))
        })
        .collect();
    LiftedRep { d, genus, generators, inverses: None }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Polynomial product of coefficient lists in powers of y.
fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(p: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n).fold(vec![c(1.0, 0.0)], |acc, _| poly_mul(&acc, p))
}

/// Action of m on Sym^{d−1}ℂ² in the basis C(d−1,k−1) x^{d−k} y^{k−1}.
pub fn symmetric_power(m: &CMat, d: usize) -> Result<CMat, ObError> {
    if m.nrows() != 2 || m.ncols() != 2 || d < 1 {
        return Err(ObError::Malformed("symmetric_power needs a 2x2 matrix and d ≥ 1".into()));
    }
    let det = m.determinant();
    if (det - c(1.0, 0.0)).norm() > 1e-10 {
        return Err(ObError::Determinant("input".into(), format!("{det}")));
    }
    // x ↦ m11 x + m21 y, y ↦ m12 x + m22 y, as polynomials in y with x = 1
    let xi = [m[(0, 0)], m[(1, 0)]];
    let yi = [m[(0, 1)], m[(1, 1)]];
    let n = d - 1;
    let mut out = CMat::zeros(d, d);
    for col in 0..d {
        let p = poly_mul(&poly_pow(&xi, n - col), &poly_pow(&yi, col));
        let w = binom(n, col);
        for row in 0..d {
            out[(row, col)] = p[row] * w / binom(n, row);
        }
    }
    Ok(out)
}

fn mobius_translate(m: Complex64) -> CMat {
    let s = (1.0 - m.norm_sqr()).sqrt();
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0) / s, m / s, m.conj() / s, c(1.0, 0.0) / s])
}

fn mobius_rotation(phi: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[Complex64::from_polar(1.0, phi / 2.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, -phi / 2.0)])
}

fn apply(m: &CMat, z: Complex64) -> Complex64 {
    (m[(0, 0)] * z + m[(0, 1)]) / (m[(1, 0)] * z + m[(1, 1)])
}

/// Hyperbolic midpoint of two points of the unit disk.
fn disk_midpoint(p: Complex64, q: Complex64) -> Complex64 {
    let w = (q - p) / (c(1.0, 0.0) - p.conj() * q);
    let r = w.norm();
    let half = (r.atanh() / 2.0).tanh();
    let mid = w * (half / r);
    (mid + p) / (c(1.0, 0.0) + p.conj() * mid)
}

/// SU(1,1) generators a₁, b₁, a₂, b₂ pairing sides i and i+2 of the
/// regular octagon with interior angles π/4, checked against the relator.
pub fn fuchsian_octagon() -> Result<[CMat; 4], ObError> {
    let cosh_r = 3.0 + 2.0 * 2f64.sqrt();
    let radius = (cosh_r.acosh() / 2.0).tanh();
    let vertex = |k: usize| Complex64::from_polar(radius, 2.0 * PI * k as f64 / 8.0);
    let mid: Vec<Complex64> = (0..8).map(|i| disk_midpoint(vertex(i), vertex(i + 1))).collect();
    let half_turn = |m: Complex64| {
        let t = mobius_translate(m);
        let neg = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        let tinv = t.clone().try_inverse().unwrap();
        t * neg * tinv
    };
    let pairing = |i: usize, j: usize| mobius_rotation(mid[j].arg() - mid[i].arg()) * half_turn(mid[i]);
    let base = [pairing(0, 2), pairing(1, 3), pairing(4, 6), pairing(5, 7)];
    for (x, (i, j)) in base.iter().zip([(0, 2), (1, 3), (4, 6), (5, 7)]) {
        let miss = (apply(x, mid[i]) - mid[j]).norm();
        if miss > 1e-9 {
            return Err(ObError::Octagon(miss));
        }
    }
    let comm = |a: &CMat, b: &CMat| {
        let ai = a.clone().try_inverse().unwrap();
        let bi = b.clone().try_inverse().unwrap();
        a * b * ai * bi
    };
    let mut best = f64::INFINITY;
    for mask in 0..16u32 {
        let x: Vec<CMat> = (0..4)
            .map(|k| if mask >> k & 1 == 1 { base[k].clone().try_inverse().unwrap() } else { base[k].clone() })
            .collect();
        let prod = comm(&x[0], &x[1]) * comm(&x[2], &x[3]);
        let res = (&prod - CMat::identity(2, 2)).norm();
        best = best.min(res);
        if res <= 1e-6 {
            return Ok([x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()]);
        }
    }
    Err(ObError::Octagon(best))
}

/// The octagon group pushed into SL_d through Sym^{d−1}.
pub fn fuchsian_rep(d: usize) -> Result<LiftedRep, ObError> {
    let gens = fuchsian_octagon()?;
    let generators = gens.iter().map(|m| symmetric_power(m, d)).collect::<Result<Vec<_>, _>>()?;
    // the adjugate is the exact inverse in SL_2
    let inverses = gens
        .iter()
        .map(|m| {
            let adj = CMat::from_row_slice(2, 2, &[m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]]);
            symmetric_power(&adj, d)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LiftedRep { d, genus: 2, generators, inverses: Some(inverses) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relator_shape() {
        for g in 2..5 {
            let w = standard_relator(g);
            assert_eq!(w.letters.len(), 4 * g);
            for (i, &j) in w.pairing.iter().enumerate() {
                assert_ne!(i, j);
                assert_eq!(w.pairing[j], i);
                assert_eq!(w.letters[i].generator, w.letters[j].generator);
                assert_ne!(w.letters[i].inverse, w.letters[j].inverse);
            }
        }
    }

    #[test]
    fn identity_rep_is_trivial() {
        let o = ob(&LiftedRep::identity(4, 2)).unwrap();
        assert_eq!(o.residue, 0);
        assert!(o.value.is_zero(1e-12));
    }

    #[test]
    fn clock_shift_generates_the_class() {
        for d in 2..=7 {
            let o = ob(&clock_shift_rep(d, 2)).unwrap();
            assert!(o.residue == 1 || o.residue == d as i64 - 1, "d={d} residue {}", o.residue);
        }
    }

    #[test]
    fn symmetric_power_diagonal() {
        let a = c(1.7, 0.3);
        let m = CMat::from_row_slice(2, 2, &[a, c(0.0, 0.0), c(0.0, 0.0), a.inv()]);
        let s = symmetric_power(&m, 4).unwrap();
        for k in 0..4 {
            assert!((s[(k, k)] - a.powi(3 - 2 * k as i32)).norm() < 1e-12);
        }
        let s1 = symmetric_power(&m, 2).unwrap();
        assert!((s1 - m).norm() < 1e-15);
    }

    #[test]
    fn octagon_relator_closes() {
        let g = fuchsian_octagon().unwrap();
        for m in &g {
            assert!((m.determinant() - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn json_roundtrip() {
        let r = clock_shift_rep(3, 2);
        let back = LiftedRep::from_json(&r.to_json()).unwrap();
        assert!(r.generators.iter().zip(&back.generators).all(|(a, b)| (a - b).norm() < 1e-15));
    }
}
