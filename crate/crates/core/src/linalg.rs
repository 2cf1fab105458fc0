//! Dense linear algebra helpers shared by the embedding, lift and fixed-space
//! code. Everything works on `nalgebra::DMatrix`.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SpinError};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Relative singular value threshold for null spaces of constraint systems.
pub const NULL_SPACE_TOL: f64 = 1e-9;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm<T>(m: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    assert!(m.is_square(), "expm needs a square matrix");
    let dim = m.nrows();
    let norm = m
        .column_iter()
        .map(|c| c.iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scale = T::from_real(0.5f64.powi(squarings as i32));
    let a = m * scale;
    let mut result = DMatrix::<T>::identity(dim, dim);
    let mut term = DMatrix::<T>::identity(dim, dim);
    // ||a||_1 <= 1/2, so 20 terms leave a remainder far below f64 resolution.
    for k in 1..=20u32 {
        term = &term * &a * T::from_real(1.0 / k as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Index pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Upper-triangle coordinates of an antisymmetric matrix, in the basis
/// `E_ij - E_ji` (i < j).
pub fn antisym_coeffs(a: &RMatrix) -> DVector<f64> {
    let n = a.nrows();
    DVector::from_iterator(n * (n - 1) / 2, pairs(n).into_iter().map(|(i, j)| a[(i, j)]))
}

pub fn antisym_from_coeffs(n: usize, c: &[f64]) -> RMatrix {
    let mut a = RMatrix::zeros(n, n);
    for (&(i, j), &v) in pairs(n).iter().zip(c) {
        a[(i, j)] = v;
        a[(j, i)] = -v;
    }
    a
}

pub fn antisymmetry_residual(a: &RMatrix) -> f64 {
    (a + a.transpose()).amax()
}

pub fn orthogonality_residual(r: &RMatrix) -> f64 {
    (r.transpose() * r - RMatrix::identity(r.nrows(), r.ncols())).amax()
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &RMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank relative to the largest singular value.
pub fn rank(m: &RMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Orthonormal basis (as columns) of the right null space of `c`.
///
/// The rank decision uses `rel_tol` relative to the largest singular value
/// and must not change when the threshold moves by a factor of ten either
/// way. The returned basis is canonical: coordinate vectors are projected
/// onto the null space in index order and Gram-Schmidt orthonormalized, so
/// the output does not depend on how the SVD resolves degenerate subspaces.
pub fn null_space(c: &RMatrix, rel_tol: f64) -> Result<RMatrix> {
    let vars = c.ncols();
    if c.nrows() == 0 {
        return Ok(RMatrix::identity(vars, vars));
    }
    // Pad wide systems with zero rows so the SVD returns a full V.
    let padded = if c.nrows() < vars {
        let mut p = RMatrix::zeros(vars, vars);
        p.view_mut((0, 0), (c.nrows(), vars)).copy_from(c);
        p
    } else {
        c.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    let count_zero = |tol: f64| sv.iter().filter(|&&s| s <= tol * top).count();
    let nullity = if top == 0.0 { vars } else { count_zero(rel_tol) };
    if top > 0.0 {
        let (lo, hi) = (count_zero(rel_tol / 10.0), count_zero(rel_tol * 10.0));
        if lo != nullity || hi != nullity {
            return Err(SpinError::UnstableRank(format!(
                "null space dimension {lo}/{nullity}/{hi} at thresholds {:e}/{:e}/{:e}",
                rel_tol / 10.0,
                rel_tol,
                rel_tol * 10.0
            )));
        }
    }
    let mut raw = RMatrix::zeros(vars, nullity);
    let mut col = 0;
    for (k, &s) in sv.iter().enumerate() {
        if top == 0.0 || s <= rel_tol * top {
            raw.set_column(col, &v_t.row(k).transpose());
            col += 1;
        }
    }
    Ok(canonical_basis(&raw))
}

/// Canonical orthonormal basis of the column span of an orthonormal `q`.
pub fn canonical_basis(q: &RMatrix) -> RMatrix {
    let (vars, dim) = q.shape();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for i in 0..vars {
        if out.len() == dim {
            break;
        }
        // Projection of e_i onto span(q).
        let mut v = q * q.row(i).transpose();
        for b in &out {
            let d = b.dot(&v);
            v -= b * d;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            out.push(v / norm);
        }
    }
    RMatrix::from_columns(&out)
}

/// Orthonormal basis of the span of the given columns.
pub fn orthonormal_span(cols: &RMatrix, rel_tol: f64) -> RMatrix {
    if cols.ncols() == 0 {
        return RMatrix::zeros(cols.nrows(), 0);
    }
    let svd = cols.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| top > 0.0 && s > rel_tol * top)
        .map(|(k, _)| u.column(k).into_owned())
        .collect();
    if keep.is_empty() {
        RMatrix::zeros(cols.nrows(), 0)
    } else {
        RMatrix::from_columns(&keep)
    }
}

/// Largest residual of projecting each column of `vectors` onto the span of
/// the orthonormal columns of `q`.
pub fn projection_residual(q: &RMatrix, vectors: &RMatrix) -> f64 {
    if vectors.ncols() == 0 {
        return 0.0;
    }
    let proj = q * (q.transpose() * vectors);
    (vectors - proj).amax()
}

pub fn random_antisymmetric<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> RMatrix {
    let c: Vec<f64> = (0..n * (n - 1) / 2)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let a = antisym_from_coeffs(n, &c);
    let norm = a.norm();
    if norm == 0.0 {
        a
    } else {
        a * (scale / norm)
    }
}

/// Haar-distributed element of `SO(n)` via QR of a Gaussian matrix.
pub fn random_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix {
    let g = RMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            let col = -q.column(k);
            q.set_column(k, &col);
        }
    }
    if q.determinant() < 0.0 {
        let col = -q.column(0);
        q.set_column(0, &col);
    }
    q
}

pub fn commutator<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField + Copy,
{
    a * b - b * a
}

/// Largest entry modulus of a complex matrix or vector.
pub fn cmax<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<Complex64, R, C>>(
    m: &nalgebra::Matrix<Complex64, R, C, S>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn matrix_to_rows<T: Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
