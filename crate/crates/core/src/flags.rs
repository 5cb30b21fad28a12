//! Complete flags in ℂ^d, triple and double ratios, adapted and compatible
//! bases, and the unipotent map fixing one flag.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{GroupElement, PairIndex, TripleIndex};

pub type CMat = DMatrix<Complex64>;

/// Threshold on normalized minors below which flags count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlagError {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("logarithm of zero")]
    Zero,
    #[error("3r differs from the sum of the triple ratio logs by {0}")]
    NotCubeRoot(f64),
    #[error("malformed flag data: {0}")]
    Malformed(String),
}

/// A complete flag: F^k is the span of the first k columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    cols: CMat,
}

impl Flag {
    pub fn new(cols: CMat) -> Result<Self, FlagError> {
        if cols.nrows() != cols.ncols() || cols.nrows() < 2 {
            return Err(FlagError::Shape(format!("{}x{} matrix", cols.nrows(), cols.ncols())));
        }
        if normalized_det(&cols) <= DEGENERACY_TOL {
            return Err(FlagError::Degenerate("flag columns are dependent".into()));
        }
        Ok(Flag { cols })
    }

    pub fn d(&self) -> usize {
        self.cols.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.cols
    }

    /// Columns spanning F^k.
    pub fn sub(&self, k: usize) -> CMat {
        self.cols.columns(0, k).into_owned()
    }

    pub fn transform(&self, a: &CMat) -> Flag {
        Flag { cols: a * &self.cols }
    }

    /// The flag with the same subspaces and rescaled, upper-triangularly
    /// mixed columns; used to check independence of representatives.
    pub fn reparametrized<R: Rng + ?Sized>(&self, rng: &mut R) -> Flag {
        let d = self.d();
        let mut u = CMat::identity(d, d);
        for i in 0..d {
            for j in i..d {
                u[(i, j)] = if i == j { random_complex(rng) + Complex64::new(0.5, 0.0) } else { random_complex(rng) };
            }
        }
        Flag { cols: &self.cols * u }
    }

    pub fn standard(d: usize) -> Flag {
        Flag { cols: CMat::identity(d, d) }
    }

    pub fn opposite(d: usize) -> Flag {
        Flag { cols: reversal(d) }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Flag {
        loop {
            let m = CMat::from_fn(d, d, |_, _| random_complex(rng));
            if let Ok(f) = Flag::new(m) {
                return f;
            }
        }
    }

    /// Column-major JSON: a list of d columns, each a list of [re, im].
    pub fn from_json(v: &Value) -> Result<Flag, FlagError> {
        Flag::new(matrix_from_json(v, true)?)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.cols
                .column_iter()
                .map(|c| Value::Array(c.iter().map(|z| serde_json::json!([z.re, z.im])).collect()))
                .collect(),
        )
    }
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Anti-diagonal permutation matrix.
pub fn reversal(d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| if i + j + 1 == d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Parses a square complex matrix. Column-major means the outer list holds
/// columns; otherwise it holds rows.
pub fn matrix_from_json(v: &Value, column_major: bool) -> Result<CMat, FlagError> {
    let bad = |m: &str| FlagError::Malformed(m.to_string());
    let outer = v.as_array().ok_or_else(|| bad("expected a list"))?;
    let n = outer.len();
    let mut m = CMat::zeros(n, n);
    for (a, line) in outer.iter().enumerate() {
        let line = line.as_array().ok_or_else(|| bad("expected a list of entries"))?;
        if line.len() != n {
            return Err(bad("matrix is not square"));
        }
        for (b, z) in line.iter().enumerate() {
            let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("entries must be [re, im]"))?;
            let re = pair[0].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
            let im = pair[1].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
            let (i, j) = if column_major { (b, a) } else { (a, b) };
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

/// |det| after scaling every column to unit length.
pub fn normalized_det(m: &CMat) -> f64 {
    let mut n = m.clone();
    for mut c in n.column_iter_mut() {
        let norm = c.norm();
        if norm == 0.0 {
            return 0.0;
        }
        c /= Complex64::new(norm, 0.0);
    }
    n.determinant().norm()
}

fn assemble(parts: &[(&Flag, usize)]) -> CMat {
    let d = parts[0].0.d();
    let mut cols = Vec::with_capacity(d);
    for (f, k) in parts {
        for c in 0..*k {
            cols.push(f.cols.column(c).into_owned());
        }
    }
    CMat::from_columns(&cols)
}

/// f_1^{k_1} ∧ … ∧ f_m^{k_m} as a determinant.
pub fn wedge(parts: &[(&Flag, usize)]) -> Result<Complex64, FlagError> {
    let d = parts.first().map(|p| p.0.d()).ok_or_else(|| FlagError::Shape("no flags".into()))?;
    let total: usize = parts.iter().map(|p| p.1).sum();
    if total != d || parts.iter().any(|p| p.0.d() != d) {
        return Err(FlagError::Shape(format!("exponents sum to {total}, expected {d}")));
    }
    Ok(assemble(parts).determinant())
}

/// Whether F_1^{k_1} + … + F_m^{k_m} = ℂ^d.
pub fn general_position(flags: &[&Flag], pattern: &[usize]) -> bool {
    if flags.len() != pattern.len() || flags.is_empty() {
        return false;
    }
    let d = flags[0].d();
    if pattern.iter().sum::<usize>() != d {
        return false;
    }
    let parts: Vec<(&Flag, usize)> = flags.iter().copied().zip(pattern.iter().copied()).collect();
    normalized_det(&assemble(&parts)) > DEGENERACY_TOL
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for k in 0..=n {
        for mut rest in compositions(n - k, parts - 1) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// General position for every composition of d.
pub fn full_general_position(flags: &[&Flag]) -> bool {
    let d = flags[0].d();
    compositions(d, flags.len()).iter().all(|p| general_position(flags, p))
}

pub fn min_minor(flags: &[&Flag]) -> f64 {
    let d = flags[0].d();
    compositions(d, flags.len())
        .iter()
        .map(|p| {
            let parts: Vec<(&Flag, usize)> = flags.iter().copied().zip(p.iter().copied()).collect();
            normalized_det(&assemble(&parts))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random triple whose minors all exceed `guard`.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, d: usize, guard: f64) -> [Flag; 3] {
    loop {
        let t = [Flag::random(rng, d), Flag::random(rng, d), Flag::random(rng, d)];
        if min_minor(&[&t[0], &t[1], &t[2]]) > guard {
            return t;
        }
    }
}

fn ratio(num: Complex64, den: Complex64) -> Result<Complex64, FlagError> {
    if den.norm() == 0.0 || num.norm() == 0.0 {
        return Err(FlagError::Degenerate("vanishing minor".into()));
    }
    Ok(num / den)
}

pub fn triple_ratio(f: &[Flag; 3], j: TripleIndex) -> Result<Complex64, FlagError> {
    let [f1, f2, f3] = f;
    let (a, b, c) = (j.j1, j.j2, j.j3);
    if a + b + c != f1.d() || a == 0 || b == 0 || c == 0 {
        return Err(FlagError::Shape(format!("{j} is not a positive triple summing to {}", f1.d())));
    }
    let w = |x: usize, y: usize, z: usize| wedge(&[(f1, x), (f2, y), (f3, z)]);
    let r1 = ratio(w(a + 1, b, c - 1)?, w(a - 1, b, c + 1)?)?;
    let r2 = ratio(w(a, b - 1, c + 1)?, w(a, b + 1, c - 1)?)?;
    let r3 = ratio(w(a - 1, b + 1, c)?, w(a + 1, b - 1, c)?)?;
    Ok(r1 * r2 * r3)
}

pub fn double_ratio(g1: &Flag, g2: &Flag, h1: &Flag, h2: &Flag, i: PairIndex) -> Result<Complex64, FlagError> {
    let (a, b) = (i.i1, i.i2);
    if a + b != g1.d() || a == 0 || b == 0 {
        return Err(FlagError::Shape(format!("{i} is not a pair summing to {}", g1.d())));
    }
    let w = |x: usize, y: usize, h: &Flag| wedge(&[(g1, x), (g2, y), (h, 1)]);
    let r1 = ratio(w(a, b - 1, h1)?, w(a, b - 1, h2)?)?;
    let r2 = ratio(w(a - 1, b, h2)?, w(a - 1, b, h1)?)?;
    Ok(-(r1 * r2))
}

/// (ln|x|, arg x) in ℂ/2πiℤ.
pub fn log_invariant(x: Complex64) -> Result<GroupElement, FlagError> {
    if x.norm() == 0.0 || !x.norm().is_finite() {
        return Err(FlagError::Zero);
    }
    Ok(GroupElement::cylinder(x.norm().ln(), x.arg()))
}

pub fn cyl_to_complex(x: &GroupElement) -> Complex64 {
    match x.to_cylinder() {
        GroupElement::Cylinder(re, ang) => Complex64::new(re, ang),
        _ => unreachable!(),
    }
}

/// A spanning vector of F_1^m ∩ F_3^{d−m+1}, as the generalized cross
/// product of the columns of [F_1^m | −F_3^{d−m+1}].
fn intersection_line(f1: &Flag, f3: &Flag, m: usize) -> CMat {
    let d = f1.d();
    let a = f1.sub(m);
    let b = -f3.sub(d - m + 1);
    let mut big = CMat::zeros(d, d + 1);
    big.columns_mut(0, m).copy_from(&a);
    big.columns_mut(m, d - m + 1).copy_from(&b);
    let coeff: Vec<Complex64> = (0..=d)
        .map(|k| {
            let minor = big.clone().remove_column(k);
            let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
            minor.determinant() * sgn
        })
        .collect();
    let mut v = CMat::zeros(d, 1);
    for (k, c) in coeff.iter().take(m).enumerate() {
        v += a.column(k) * *c;
    }
    v
}

/// Basis (g_1, …, g_d) with g_m ∈ F1^m ∩ F3^{d−m+1} and Σ g_m ∈ F2^1,
/// pinned so that the first non-negligible coordinate of g_1 is 1.
pub fn adapted_basis(f: &[Flag; 3]) -> Result<CMat, FlagError> {
    let [f1, f2, f3] = f;
    let d = f1.d();
    let lines: Vec<CMat> = (1..=d).map(|m| intersection_line(f1, f3, m)).collect();
    let mut l = CMat::zeros(d, d);
    for (m, v) in lines.iter().enumerate() {
        let n = v.norm();
        if n == 0.0 {
            return Err(FlagError::Degenerate(format!("F1^{} meets F3^{} trivially", m + 1, d - m)));
        }
        l.set_column(m, &(v.column(0) / Complex64::new(n, 0.0)));
    }
    if normalized_det(&l) <= DEGENERACY_TOL {
        return Err(FlagError::Degenerate("intersection lines are dependent".into()));
    }
    let target = f2.sub(1);
    let c = l
        .clone()
        .lu()
        .solve(&target)
        .ok_or_else(|| FlagError::Degenerate("cannot reach F2^1".into()))?;
    let mut g = l.clone();
    for m in 0..d {
        if c[m].norm() < 1e-14 {
            return Err(FlagError::Degenerate("F2^1 lies in a coordinate hyperplane".into()));
        }
        g.set_column(m, &(l.column(m) * c[m]));
    }
    let g1 = g.column(0);
    let scale = g1.norm();
    let pivot = g1
        .iter()
        .find(|z| z.norm() > 1e-8 * scale)
        .copied()
        .ok_or_else(|| FlagError::Degenerate("zero basis vector".into()))?;
    Ok(g / pivot)
}

/// Residual of the columns of x (normalized) outside the span of y.
pub fn span_residual(x: &CMat, y: &CMat) -> f64 {
    let q = y.clone().qr().q();
    let mut worst: f64 = 0.0;
    for c in x.column_iter() {
        let n = c.norm();
        if n == 0.0 {
            continue;
        }
        let c = c / Complex64::new(n, 0.0);
        let proj = &q * (q.adjoint() * &c);
        worst = worst.max((c - proj).norm());
    }
    worst
}

/// LU without pivoting: m = l·u with l unit lower triangular.
fn lu_nopivot(m: &CMat) -> Result<CMat, FlagError> {
    let n = m.nrows();
    let mut u = m.clone();
    let mut l = CMat::identity(n, n);
    for k in 0..n {
        let p = u[(k, k)];
        if p.norm() < 1e-13 * m.norm() {
            return Err(FlagError::Degenerate("flags are not transverse".into()));
        }
        for i in k + 1..n {
            let f = u[(i, k)] / p;
            l[(i, k)] = f;
            for j in k..n {
                let ukj = u[(k, j)];
                u[(i, j)] -= f * ukj;
            }
        }
    }
    Ok(l)
}

/// The unipotent u with u(F2^k) = F2^k and u(F1^k) = F3^k for all k.
///
/// In a basis adapted to F2 the stabilizer of F2 is upper triangular; each
/// transverse flag X is n_X applied to the opposite flag for a unique upper
/// unitriangular n_X, read off from the unpivoted LU of the row-reversed X.
pub fn unipotent_fixing(f2: &Flag, f1: &Flag, f3: &Flag) -> Result<CMat, FlagError> {
    let d = f2.d();
    let e = f2.matrix();
    let e_inv = e.clone().try_inverse().ok_or_else(|| FlagError::Degenerate("F2 singular".into()))?;
    let p = reversal(d);
    let n_of = |x: &Flag| -> Result<CMat, FlagError> {
        let xe = &e_inv * x.matrix();
        let l = lu_nopivot(&(&p * xe))?;
        Ok(&p * l * &p)
    };
    let n1 = n_of(f1)?;
    let n3 = n_of(f3)?;
    let n1_inv = n1.try_inverse().ok_or_else(|| FlagError::Degenerate("singular".into()))?;
    Ok(e * n3 * n1_inv * e_inv)
}

/// Σ_j τ^j(F) as a complex number (imaginary part mod 2π).
pub fn tau_sum(f: &[Flag; 3]) -> Result<Complex64, FlagError> {
    let d = f[0].d();
    let mut acc = GroupElement::cylinder(0.0, 0.0);
    for j in crate::algebra::IndexTables::new(d).map_err(|e| FlagError::Shape(e.to_string()))?.b {
        acc = acc + log_invariant(triple_ratio(f, j)?)?;
    }
    Ok(cyl_to_complex(&acc))
}

/// The cube root r = (Σ τ^j + 2πik)/3 on branch k.
pub fn cube_root(f: &[Flag; 3], branch: i64) -> Result<Complex64, FlagError> {
    let s = tau_sum(f)?;
    Ok((s + Complex64::new(0.0, 2.0 * std::f64::consts::PI * branch as f64)) / 3.0)
}

fn rotate(f: &[Flag; 3], k: usize) -> [Flag; 3] {
    [f[k % 3].clone(), f[(k + 1) % 3].clone(), f[(k + 2) % 3].clone()]
}

/// Least-squares scalar c with c·x ≈ y.
fn scalar_between(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let num: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = x.iter().map(|a| a.norm_sqr()).sum();
    num / den
}

/// Bases (f, g, h) adapted to (F3,F1,F2), (F1,F2,F3), (F2,F3,F1) with
/// e^{2r} f_1 = g_d and e^{2r} g_1 = h_d; g carries the global pinning.
pub fn compatible_triple(f: &[Flag; 3], r: Complex64) -> Result<(CMat, CMat, CMat), FlagError> {
    let s = tau_sum(f)?;
    let diff = r * 3.0 - s;
    let two_pi = 2.0 * std::f64::consts::PI;
    let wrapped = Complex64::new(diff.re, diff.im - two_pi * (diff.im / two_pi).round());
    if wrapped.norm() > 1e-8 {
        return Err(FlagError::NotCubeRoot(wrapped.norm()));
    }
    let d = f[0].d();
    let e2r = (r * 2.0).exp();
    let g = adapted_basis(f)?;
    let mut fb = adapted_basis(&rotate(f, 2))?;
    let mut hb = adapted_basis(&rotate(f, 1))?;
    let col = |m: &CMat, k: usize, s: Complex64| -> Vec<Complex64> { m.column(k).iter().map(|z| z * s).collect() };
    let one = Complex64::new(1.0, 0.0);
    let c = scalar_between(&col(&fb, 0, e2r), &col(&g, d - 1, one));
    fb *= c;
    let c = scalar_between(&col(&hb, d - 1, one), &col(&g, 0, e2r));
    hb *= c;
    Ok((fb, g, hb))
}

/// Projective map carrying the triple F to G when their triple ratios agree.
pub fn projective_map(f: &[Flag; 3], g: &[Flag; 3]) -> Result<CMat, FlagError> {
    let bf = adapted_basis(f)?;
    let bg = adapted_basis(g)?;
    let inv = bf.try_inverse().ok_or_else(|| FlagError::Degenerate("adapted basis singular".into()))?;
    Ok(bg * inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn standard_and_opposite_transverse() {
        let (a, b) = (Flag::standard(4), Flag::opposite(4));
        assert!(full_general_position(&[&a, &b]));
        assert!(!general_position(&[&a, &a], &[2, 2]));
    }

    #[test]
    fn log_invariant_examples() {
        assert!(log_invariant(c(1.0, 0.0)).unwrap().is_zero(1e-15));
        assert!(log_invariant(c(-1.0, 0.0)).unwrap().approx_eq(&GroupElement::cylinder(0.0, std::f64::consts::PI), 1e-15));
        assert!(log_invariant(c(2f64.exp(), 0.0)).unwrap().approx_eq(&GroupElement::cylinder(2.0, 0.0), 1e-12));
        assert_eq!(log_invariant(c(0.0, 0.0)), Err(FlagError::Zero));
    }

    #[test]
    fn adapted_basis_d2_hand_example() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let f1 = Flag::new(CMat::from_column_slice(2, 2, &[one, zero, zero, one])).unwrap();
        let f2 = Flag::new(CMat::from_column_slice(2, 2, &[one, one, one, zero])).unwrap();
        let f3 = Flag::new(CMat::from_column_slice(2, 2, &[zero, one, one, zero])).unwrap();
        // triple (F2, F3, F1): g_1 ∈ F2^1, g_2 ∈ F3^1 and g_1 + g_2 ∈ F1^1
        let g = adapted_basis(&[f2, f3, f1]).unwrap();
        let want = CMat::from_column_slice(2, 2, &[one, one, -one, zero]);
        assert!((g - want).norm() < 1e-12);
    }

    #[test]
    fn unipotent_d2_hand_example() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let f1 = Flag::new(CMat::from_column_slice(2, 2, &[one, zero, zero, one])).unwrap();
        let f2 = Flag::new(CMat::from_column_slice(2, 2, &[one, one, one, zero])).unwrap();
        let f3 = Flag::new(CMat::from_column_slice(2, 2, &[zero, one, one, zero])).unwrap();
        let u = unipotent_fixing(&f2, &f1, &f3).unwrap();
        // u fixes (1,1) and sends e1 to a multiple of e2: u = [[0,1],[-1,2]]
        let want = CMat::from_row_slice(2, 2, &[zero, one, -one, c(2.0, 0.0)]);
        assert!((&u - want).norm() < 1e-12);
        let v = CMat::from_column_slice(2, 1, &[one, one]);
        assert!((&u * &v - &v).norm() < 1e-12);
    }

    #[test]
    fn triple_ratio_d3_cofactor_oracle() {
        // For d = 3 the single triple ratio is a product of 3×3 determinants
        // which we expand by cofactors along the first column.
        fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[1][0] * (m[0][1] * m[2][2] - m[0][2] * m[2][1])
                + m[2][0] * (m[0][1] * m[1][2] - m[0][2] * m[1][1])
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let t = random_triple(&mut rng, 3, 1e-6);
            let col = |f: &Flag, k: usize| [f.matrix()[(0, k)], f.matrix()[(1, k)], f.matrix()[(2, k)]];
            let m = |cols: [[Complex64; 3]; 3]| {
                det3([[cols[0][0], cols[1][0], cols[2][0]], [cols[0][1], cols[1][1], cols[2][1]], [cols[0][2], cols[1][2], cols[2][2]]])
            };
            let (a, b, cc) = (&t[0], &t[1], &t[2]);
            let n1 = m([col(a, 0), col(a, 1), col(b, 0)]);
            let d1 = m([col(b, 0), col(cc, 0), col(cc, 1)]);
            let n2 = m([col(a, 0), col(cc, 0), col(cc, 1)]);
            let d2 = m([col(a, 0), col(b, 0), col(b, 1)]);
            let n3 = m([col(b, 0), col(b, 1), col(cc, 0)]);
            let d3 = m([col(a, 0), col(a, 1), col(cc, 0)]);
            let want = n1 / d1 * (n2 / d2) * (n3 / d3);
            let got = triple_ratio(&t, TripleIndex::new(1, 1, 1)).unwrap();
            assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0));
        }
    }

    #[test]
    fn double_ratio_h_equal_is_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let [g1, g2, h] = random_triple(&mut rng, 4, 1e-6);
        for i1 in 1..4 {
            let x = double_ratio(&g1, &g2, &h, &h, PairIndex::new(i1, 4 - i1)).unwrap();
            assert!((x + c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn double_ratio_d2_cross_ratio() {
        // d = 2: flags are lines [x]; D = −[g1,h1][g2,h2]/([g1,h2][g2,h1]).
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let fl: Vec<Flag> = (0..4).map(|_| Flag::random(&mut rng, 2)).collect();
            let v: Vec<(Complex64, Complex64)> = fl.iter().map(|f| (f.matrix()[(0, 0)], f.matrix()[(1, 0)])).collect();
            let br = |a: usize, b: usize| v[a].0 * v[b].1 - v[a].1 * v[b].0;
            let want = -(br(0, 2) * br(1, 3)) / (br(0, 3) * br(1, 2));
            let got = double_ratio(&fl[0], &fl[1], &fl[2], &fl[3], PairIndex::new(1, 1)).unwrap();
            assert!((got - want).norm() < 1e-10 * want.norm().max(1.0));
        }
    }
}
