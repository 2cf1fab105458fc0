//! Matrix model of the complex spin representation.
//!
//! For `n = 2k` the gamma matrices are tensor products of 2x2 blocks,
//!
//! ```text
//! g_{2j-1} = I^(j-1) (x) i*sx (x) sz^(k-j)
//! g_{2j}   = I^(j-1) (x) i*sy (x) sz^(k-j)
//! ```
//!
//! and for `n = 2k + 1` the last one is `g_n = +-i sz^(k)`. Every gamma is a
//! monomial matrix (one nonzero per row), which is how they are stored;
//! dense copies are materialized on request.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::Multivector;
use crate::error::{Result, SpinError};
use crate::linalg::{antisymmetry_residual, expm, CMatrix, RMatrix};
use crate::MAX_DIM;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square matrix with exactly one nonzero entry per row: row `r` holds
/// `val[r]` in column `col[r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    col: Vec<usize>,
    val: Vec<Complex64>,
}

impl Monomial {
    pub fn identity(dim: usize) -> Self {
        Self {
            col: (0..dim).collect(),
            val: vec![ONE; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.col.len()
    }

    pub fn entry(&self, row: usize) -> (usize, Complex64) {
        (self.col[row], self.val[row])
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        let (col, val) = self
            .col
            .iter()
            .zip(&self.val)
            .map(|(&c, &v)| (rhs.col[c], v * rhs.val[c]))
            .unzip();
        Monomial { col, val }
    }

    pub fn adjoint(&self) -> Monomial {
        let mut col = vec![0; self.dim()];
        let mut val = vec![ZERO; self.dim()];
        for (r, (&c, &v)) in self.col.iter().zip(&self.val).enumerate() {
            col[c] = r;
            val[c] = v.conj();
        }
        Monomial { col, val }
    }

    pub fn kron(&self, rhs: &Monomial) -> Monomial {
        let db = rhs.dim();
        let mut col = Vec::with_capacity(self.dim() * db);
        let mut val = Vec::with_capacity(self.dim() * db);
        for (&ca, &va) in self.col.iter().zip(&self.val) {
            for (&cb, &vb) in rhs.col.iter().zip(&rhs.val) {
                col.push(ca * db + cb);
                val.push(va * vb);
            }
        }
        Monomial { col, val }
    }

    pub fn scaled(&self, s: Complex64) -> Monomial {
        Monomial {
            col: self.col.clone(),
            val: self.val.iter().map(|v| v * s).collect(),
        }
    }

    /// `out += coeff * self`.
    pub fn add_to(&self, out: &mut CMatrix, coeff: Complex64) {
        for (r, (&c, &v)) in self.col.iter().zip(&self.val).enumerate() {
            out[(r, c)] += coeff * v;
        }
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(
            self.dim(),
            self.col.iter().zip(&self.val).map(|(&c, &a)| a * v[c]),
        )
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        self.add_to(&mut m, ONE);
        m
    }
}

fn block(kind: char) -> Monomial {
    let (col, val) = match kind {
        'I' => (vec![0, 1], vec![ONE, ONE]),
        // i * sigma_x
        'x' => (vec![1, 0], vec![I, I]),
        // i * sigma_y = [[0, 1], [-1, 0]]
        'y' => (vec![1, 0], vec![ONE, -ONE]),
        'z' => (vec![0, 1], vec![ONE, -ONE]),
        _ => unreachable!(),
    };
    Monomial { col, val }
}

/// The `n` gamma matrices realizing the spin representation.
#[derive(Debug, Clone)]
pub struct GammaSet {
    n: usize,
    dim: usize,
    odd_sign: f64,
    gammas: Vec<Monomial>,
}

impl GammaSet {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Complex dimension `2^floor(n/2)` of the spinor space.
    pub fn dim_sigma(&self) -> usize {
        self.dim
    }

    /// Sign of the last gamma for odd `n`; always `+1` for even `n`.
    pub fn odd_sign(&self) -> f64 {
        self.odd_sign
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.gammas[i]
    }

    /// Dense copy of `gamma_{i+1}`.
    pub fn gamma(&self, i: usize) -> CMatrix {
        self.gammas[i].to_dense()
    }

    /// `gamma_{i+1} gamma_{j+1}` as a monomial matrix.
    pub fn pair(&self, i: usize, j: usize) -> Monomial {
        self.gammas[i].mul(&self.gammas[j])
    }

    /// Monomial representing the blade with the given mask (factors in
    /// ascending order).
    pub fn blade(&self, mask: u32) -> Monomial {
        let mut m = Monomial::identity(self.dim);
        for i in 0..self.n {
            if mask >> i & 1 == 1 {
                m = m.mul(&self.gammas[i]);
            }
        }
        m
    }

    /// `sum_i v_i gamma_i`.
    pub fn vector_rep(&self, v: &[f64]) -> Result<SpinorMatrix> {
        if v.len() != self.n {
            return Err(SpinError::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (g, &c) in self.gammas.iter().zip(v) {
            g.add_to(&mut out, Complex64::new(c, 0.0));
        }
        Ok(SpinorMatrix {
            n: self.n,
            entries: out,
        })
    }
}

pub fn build_gammas(n: usize) -> Result<GammaSet> {
    build_gammas_with_odd_sign(n, 1.0)
}

/// Same as [`build_gammas`] but with `gamma_n -> sign * gamma_n` for odd `n`,
/// selecting the other irreducible module of `Cl_n`.
pub fn build_gammas_with_odd_sign(n: usize, sign: f64) -> Result<GammaSet> {
    if n == 0 || n > MAX_DIM {
        return Err(SpinError::DimensionOutOfRange(n));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(SpinError::InvalidParameter("odd gamma sign must be +-1".into()));
    }
    let k = n / 2;
    let tensor = |factors: &[Monomial]| factors.iter().fold(Monomial::identity(1), |acc, f| acc.kron(f));
    let mut gammas = Vec::with_capacity(n);
    for j in 0..k {
        for kind in ['x', 'y'] {
            let mut factors = vec![block('I'); j];
            factors.push(block(kind));
            factors.extend(std::iter::repeat_n(block('z'), k - j - 1));
            gammas.push(tensor(&factors));
        }
    }
    let odd_sign = if n % 2 == 1 {
        let z = tensor(&vec![block('z'); k]);
        gammas.push(z.scaled(I * sign));
        sign
    } else {
        1.0
    };
    Ok(GammaSet {
        n,
        dim: 1 << k,
        odd_sign,
        gammas,
    })
}

/// Complex `2^floor(n/2)` square matrix acting on spinors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorMatrix {
    pub n: usize,
    pub entries: CMatrix,
}

impl SpinorMatrix {
    pub fn new(n: usize, entries: CMatrix) -> Result<Self> {
        let dim = 1usize << (n / 2);
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(SpinError::DimensionMismatch {
                expected: dim,
                got: entries.nrows(),
            });
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1usize << (n / 2);
        Self {
            n,
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn mul(&self, rhs: &SpinorMatrix) -> SpinorMatrix {
        SpinorMatrix {
            n: self.n,
            entries: &self.entries * &rhs.entries,
        }
    }

    /// Row-major `[re, im]` pairs, for debugging dumps.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| {
                        let c = self.entries[(i, j)];
                        [c.re, c.im]
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Serialize)]
struct SpinorMatrixJson {
    n: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

impl Serialize for SpinorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpinorMatrixJson {
            n: self.n,
            rows: self.to_rows(),
        }
        .serialize(s)
    }
}

/// Algebra morphism `Cl_n -> End(Sigma_n)` extending `e_i -> gamma_i`.
pub fn rep_multivector(g: &GammaSet, x: &Multivector) -> Result<SpinorMatrix> {
    if x.n() != g.n {
        return Err(SpinError::DimensionMismatch {
            expected: g.n,
            got: x.n(),
        });
    }
    let mut out = CMatrix::zeros(g.dim, g.dim);
    for (mask, c) in x.terms() {
        g.blade(mask).add_to(&mut out, c);
    }
    Ok(SpinorMatrix { n: g.n, entries: out })
}

/// Spin representation of an infinitesimal rotation `A` in `so(n)`.
///
/// With `e_i^2 = -1` the sign that makes `[rho(A), gamma(v)] = gamma(Av)`
/// hold is `rho(A) = -1/4 sum_{i,j} A_ij gamma_i gamma_j`.
pub fn rho_so(g: &GammaSet, a: &RMatrix) -> Result<SpinorMatrix> {
    if a.nrows() != g.n || a.ncols() != g.n {
        return Err(SpinError::DimensionMismatch {
            expected: g.n,
            got: a.nrows(),
        });
    }
    let res = antisymmetry_residual(a);
    if res > 1e-12 * a.amax().max(1.0) {
        return Err(SpinError::NotAntisymmetric(res));
    }
    let mut out = CMatrix::zeros(g.dim, g.dim);
    for i in 0..g.n {
        for j in i + 1..g.n {
            let c = a[(i, j)];
            if c != 0.0 {
                g.pair(i, j).add_to(&mut out, Complex64::new(-0.5 * c, 0.0));
            }
        }
    }
    Ok(SpinorMatrix { n: g.n, entries: out })
}

pub fn exp_spin(m: &SpinorMatrix) -> SpinorMatrix {
    SpinorMatrix {
        n: m.n,
        entries: expm(&m.entries),
    }
}

/// Rotation induced on `R^n` by conjugating gamma matrices with an
/// invertible spinor matrix `u`: `u gamma_i u^{-1} = sum_j R_ji gamma_j`.
pub fn spinor_rotation(g: &GammaSet, u: &SpinorMatrix) -> Result<RMatrix> {
    let inv = u
        .entries
        .clone()
        .try_inverse()
        .ok_or_else(|| SpinError::InvalidParameter("spinor matrix is singular".into()))?;
    let dense: Vec<CMatrix> = (0..g.n).map(|i| g.gamma(i)).collect();
    let d = g.dim as f64;
    let mut r = RMatrix::zeros(g.n, g.n);
    for i in 0..g.n {
        let conj = &u.entries * &dense[i] * &inv;
        for j in 0..g.n {
            let t = (&dense[j] * &conj).trace();
            r[(j, i)] = -t.re / d;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::geometric_product;
    use crate::linalg::{cmax, commutator, random_antisymmetric, to_complex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn anticomm_residual(g: &GammaSet) -> f64 {
        let dense: Vec<CMatrix> = (0..g.n()).map(|i| g.gamma(i)).collect();
        let d = g.dim_sigma();
        let mut worst = 0.0f64;
        for i in 0..g.n() {
            for j in i..g.n() {
                let mut ac = &dense[i] * &dense[j] + &dense[j] * &dense[i];
                if i == j {
                    ac += CMatrix::identity(d, d) * Complex64::new(2.0, 0.0);
                }
                worst = worst.max(ac.iter().map(|c| c.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    #[test]
    fn clifford_relations_hold_for_small_n() {
        for n in 1..=10 {
            let g = build_gammas(n).unwrap();
            assert_eq!(g.dim_sigma(), 1 << (n / 2));
            assert!(anticomm_residual(&g) < 1e-12, "n = {n}");
            for i in 0..n {
                let m = g.gamma(i);
                let u = m.adjoint() * &m;
                assert!(cmax(&(u - CMatrix::identity(g.dim_sigma(), g.dim_sigma()))) < 1e-12);
            }
        }
    }

    #[test]
    fn n2_gammas_square_to_minus_identity() {
        let g = build_gammas(2).unwrap();
        for i in 0..2 {
            let m = g.gamma(i);
            assert_eq!(&m * &m, -CMatrix::identity(2, 2));
        }
    }

    #[test]
    fn n7_sizes() {
        let g = build_gammas(7).unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(g.gamma(6).nrows(), 8);
    }

    #[test]
    fn n8_volume_element_splits_evenly() {
        let g = build_gammas(8).unwrap();
        let mut vol = CMatrix::identity(16, 16);
        for i in 0..8 {
            vol *= g.gamma(i);
        }
        // Hermitian with square one, so eigenvalues are +-1.
        assert!(cmax(&(&vol * &vol - CMatrix::identity(16, 16))) < 1e-12);
        let eig = nalgebra::SymmetricEigen::new(vol).eigenvalues;
        let plus = eig.iter().filter(|&&e| (e - 1.0).abs() < 1e-9).count();
        let minus = eig.iter().filter(|&&e| (e + 1.0).abs() < 1e-9).count();
        assert_eq!((plus, minus), (8, 8));
    }

    #[test]
    fn out_of_range_dimension() {
        assert!(build_gammas(0).is_err());
        assert!(build_gammas(MAX_DIM + 1).is_err());
    }

    #[test]
    fn rep_of_scalar_and_blade() {
        let g = build_gammas(4).unwrap();
        let one = Multivector::scalar(4, 1.0).unwrap();
        assert_eq!(
            rep_multivector(&g, &one).unwrap().entries,
            CMatrix::identity(4, 4)
        );
        let e12 = Multivector::blade(4, 0b11, ONE).unwrap();
        assert_eq!(
            rep_multivector(&g, &e12).unwrap().entries,
            g.gamma(0) * g.gamma(1)
        );
    }

    #[test]
    fn rep_is_multiplicative_on_random_versors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3, 5, 6] {
            let g = build_gammas(n).unwrap();
            let mut versor = || {
                let mut x = Multivector::scalar(n, 1.0).unwrap();
                for _ in 0..3 {
                    let v = crate::linalg::random_antisymmetric(n, 1.0, &mut rng);
                    let col: Vec<f64> = v.column(0).iter().copied().collect();
                    let norm = col.iter().map(|a| a * a).sum::<f64>().sqrt();
                    let col: Vec<f64> = col.iter().map(|a| a / norm).collect();
                    x = geometric_product(&x, &Multivector::vector(&col).unwrap()).unwrap();
                }
                x
            };
            let (x, y) = (versor(), versor());
            let lhs = rep_multivector(&g, &geometric_product(&x, &y).unwrap()).unwrap();
            let rhs = rep_multivector(&g, &x)
                .unwrap()
                .mul(&rep_multivector(&g, &y).unwrap());
            assert!(cmax(&(lhs.entries - rhs.entries)) < 1e-10);
        }
    }

    #[test]
    fn rho_of_zero_and_plane_generator() {
        let g = build_gammas(2).unwrap();
        assert_eq!(
            rho_so(&g, &RMatrix::zeros(2, 2)).unwrap().entries,
            CMatrix::zeros(2, 2)
        );
        let a = RMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let r = rho_so(&g, &a).unwrap().entries;
        // Oracle: (1/2) g1 g2 is diagonal here, with half-spin weights.
        let half = (g.gamma(0) * g.gamma(1)) * Complex64::new(0.5, 0.0);
        assert!(cmax(&(&r - &half)) < 1e-15);
        let mut eig: Vec<f64> = (0..2).map(|k| r[(k, k)].im).collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] + 0.5).abs() < 1e-15 && (eig[1] - 0.5).abs() < 1e-15);
        assert!(r[(0, 1)].norm() < 1e-15 && r[(0, 0)].re.abs() < 1e-15);
    }

    #[test]
    fn rho_rejects_non_antisymmetric() {
        let g = build_gammas(2).unwrap();
        let a = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(rho_so(&g, &a), Err(SpinError::NotAntisymmetric(_))));
    }

    #[test]
    fn rho_commutator_with_gammas() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3, 4, 7] {
            let g = build_gammas(n).unwrap();
            let a = random_antisymmetric(n, 1.0, &mut rng);
            let r = rho_so(&g, &a).unwrap().entries;
            for k in 0..n {
                let lhs = commutator(&r, &g.gamma(k));
                let mut rhs = CMatrix::zeros(g.dim_sigma(), g.dim_sigma());
                for j in 0..n {
                    rhs += g.gamma(j) * Complex64::new(a[(j, k)], 0.0);
                }
                assert!(cmax(&(lhs - rhs)) < 1e-10);
            }
        }
    }

    #[test]
    fn exp_spin_of_half_turn_covers_rotation_by_pi() {
        let g = build_gammas(3).unwrap();
        let mut a = RMatrix::zeros(3, 3);
        a[(1, 0)] = std::f64::consts::PI;
        a[(0, 1)] = -std::f64::consts::PI;
        let u = exp_spin(&rho_so(&g, &a).unwrap());
        let r = spinor_rotation(&g, &u).unwrap();
        let expect = expm(&a);
        assert!((r - expect).amax() < 1e-9);
        let id = exp_spin(&SpinorMatrix::new(3, CMatrix::zeros(2, 2)).unwrap());
        assert_eq!(id.entries, CMatrix::identity(2, 2));
    }

    #[test]
    fn exp_spin_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = build_gammas(6).unwrap();
        let a = random_antisymmetric(6, 2.0, &mut rng);
        let p = exp_spin(&rho_so(&g, &a).unwrap());
        let m = exp_spin(&rho_so(&g, &(-a)).unwrap());
        assert!(cmax(&(p.mul(&m).entries - CMatrix::identity(8, 8))) < 1e-10);
        let _ = to_complex(&RMatrix::zeros(1, 1));
    }
}
