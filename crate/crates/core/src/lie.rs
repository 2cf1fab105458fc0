//! Holonomy Lie algebras as explicit subalgebras of `so(n)`.
//!
//! Each constructor sets up a linear constraint system on the coordinates
//! of `so(n)` (the basis `E_ij - E_ji`, i < j) and returns its null space.
//! The complex structure `J1` pairs coordinates as `z_j = x_j + i y_j` with
//! layout `(x_1..x_m, y_1..y_m)`; the quaternionic `J2` on `H^m` pairs
//! `z_j` with `z_{m+j}`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Result, SpinError};
use crate::linalg::{
    antisym_coeffs, antisym_from_coeffs, antisymmetry_residual, canonical_basis, commutator, matrix_to_rows,
    null_space, orthonormal_span, pairs, projection_residual, CMatrix, RMatrix, NULL_SPACE_TOL,
};
use crate::spin_rep::{build_gammas, rho_so};
use crate::MAX_DIM;

/// Residual bound for bracket closure checks.
pub const CLOSURE_TOL: f64 = 1e-9;

/// A linearly independent family of antisymmetric matrices spanning a Lie
/// subalgebra of `so(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebraBasis {
    pub n: usize,
    pub name: String,
    pub basis: Vec<RMatrix>,
}

impl SubalgebraBasis {
    /// Wrap a user supplied family after checking shape and antisymmetry.
    pub fn from_matrices(n: usize, name: impl Into<String>, basis: Vec<RMatrix>) -> Result<Self> {
        for a in &basis {
            if a.nrows() != n || a.ncols() != n {
                return Err(SpinError::DimensionMismatch {
                    expected: n,
                    got: a.nrows(),
                });
            }
            let res = antisymmetry_residual(a);
            if res > 1e-12 * a.amax().max(1.0) {
                return Err(SpinError::NotAntisymmetric(res));
            }
        }
        Ok(Self {
            n,
            name: name.into(),
            basis,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            name: "trivial".into(),
            basis: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Coordinates of the basis elements as columns.
    pub fn coeff_matrix(&self) -> RMatrix {
        let p = self.n * (self.n - 1) / 2;
        let cols: Vec<DVector<f64>> = self.basis.iter().map(antisym_coeffs).collect();
        if cols.is_empty() {
            RMatrix::zeros(p, 0)
        } else {
            RMatrix::from_columns(&cols)
        }
    }

    /// Orthonormal coordinates of the span.
    pub fn span(&self) -> RMatrix {
        orthonormal_span(&self.coeff_matrix(), NULL_SPACE_TOL)
    }

    pub fn rank(&self) -> usize {
        self.span().ncols()
    }

    /// Largest distance of a bracket `[b_i, b_j]` from the span.
    pub fn closure_residual(&self) -> f64 {
        let k = self.basis.len();
        if k < 2 {
            return 0.0;
        }
        let q = self.span();
        let mut cols = Vec::with_capacity(k * (k - 1) / 2);
        for i in 0..k {
            for j in i + 1..k {
                cols.push(antisym_coeffs(&commutator(&self.basis[i], &self.basis[j])));
            }
        }
        projection_residual(&q, &RMatrix::from_columns(&cols))
    }

    /// Largest distance of the elements of `other` from this span.
    pub fn containment_residual(&self, other: &SubalgebraBasis) -> f64 {
        projection_residual(&self.span(), &other.coeff_matrix())
    }

    pub fn conjugated(&self, q: &RMatrix) -> SubalgebraBasis {
        SubalgebraBasis {
            n: self.n,
            name: self.name.clone(),
            basis: self.basis.iter().map(|a| q * a * q.transpose()).collect(),
        }
    }
}

impl Serialize for SubalgebraBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            n: usize,
            name: &'a str,
            basis: Vec<Vec<Vec<f64>>>,
        }
        Json {
            n: self.n,
            name: &self.name,
            basis: self.basis.iter().map(matrix_to_rows).collect(),
        }
        .serialize(s)
    }
}

/// Orthogonal complex structures fixing the standard embeddings.
#[derive(Debug, Clone)]
pub struct ComplexStructurePair {
    pub j1: RMatrix,
    pub j2: Option<RMatrix>,
}

impl ComplexStructurePair {
    /// `J1` on `R^{2m} = C^m`.
    pub fn complex(m: usize) -> Self {
        Self {
            j1: complex_structure(m),
            j2: None,
        }
    }

    /// `J1`, `J2` on `R^{4m} = H^m`.
    pub fn quaternionic(m: usize) -> Self {
        let j1 = complex_structure(2 * m);
        let mut j2 = RMatrix::zeros(4 * m, 4 * m);
        for j in 0..m {
            // (z_j, z_{m+j}) -> (-conj z_{m+j}, conj z_j)
            j2[(j, m + j)] = -1.0;
            j2[(m + j, j)] = 1.0;
            j2[(2 * m + j, 3 * m + j)] = 1.0;
            j2[(3 * m + j, 2 * m + j)] = -1.0;
        }
        Self { j1, j2: Some(j2) }
    }

    /// `J3 = J1 J2`, present in the quaternionic case.
    pub fn j3(&self) -> Option<RMatrix> {
        self.j2.as_ref().map(|j2| &self.j1 * j2)
    }
}

/// Standard complex structure on `R^{2m}`: `J e_j = e_{m+j}`.
pub fn complex_structure(m: usize) -> RMatrix {
    let mut j = RMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        j[(m + k, k)] = 1.0;
        j[(k, m + k)] = -1.0;
    }
    j
}

/// Null space of the linear conditions `[A, J] = 0` for each `J`, plus the
/// optional extra linear functionals on `A`.
fn commutant(n: usize, fixed: &[&RMatrix], functionals: &[&dyn Fn(&RMatrix) -> f64]) -> Result<Vec<RMatrix>> {
    let vars = pairs(n);
    let rows = fixed.len() * n * n + functionals.len();
    let mut c = RMatrix::zeros(rows, vars.len());
    for (p, &(i, j)) in vars.iter().enumerate() {
        let mut e = RMatrix::zeros(n, n);
        e[(i, j)] = 1.0;
        e[(j, i)] = -1.0;
        let mut r = 0;
        for jm in fixed {
            let comm = commutator(&e, jm);
            for v in comm.iter() {
                c[(r, p)] = *v;
                r += 1;
            }
        }
        for f in functionals {
            c[(r, p)] = f(&e);
            r += 1;
        }
    }
    let ns = null_space(&c, NULL_SPACE_TOL)?;
    Ok(columns_to_matrices(n, &ns))
}

fn columns_to_matrices(n: usize, ns: &RMatrix) -> Vec<RMatrix> {
    ns.column_iter()
        .map(|col| antisym_from_coeffs(n, col.as_slice()))
        .collect()
}

fn expect_dim(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        Err(SpinError::UnstableRank(format!(
            "{name}: constraint null space has dimension {got}, expected {want}"
        )))
    } else {
        Ok(())
    }
}

fn range(name: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(SpinError::InvalidParameter(format!(
            "{name}: parameter out of range"
        )))
    }
}

/// `su(m)` inside `so(2m)`.
pub fn su(m: usize) -> Result<SubalgebraBasis> {
    range("su(m)", m >= 2 && 2 * m <= MAX_DIM)?;
    let j1 = complex_structure(m);
    let trace = |a: &RMatrix| (&j1 * a).trace();
    let basis = commutant(2 * m, &[&j1], &[&trace])?;
    expect_dim("su", basis.len(), m * m - 1)?;
    Ok(SubalgebraBasis {
        n: 2 * m,
        name: format!("su({m})"),
        basis,
    })
}

/// `u(m)` inside `so(2m)`.
pub fn u(m: usize) -> Result<SubalgebraBasis> {
    range("u(m)", m >= 1 && 2 * m <= MAX_DIM)?;
    let j1 = complex_structure(m);
    let basis = commutant(2 * m, &[&j1], &[])?;
    expect_dim("u", basis.len(), m * m)?;
    Ok(SubalgebraBasis {
        n: 2 * m,
        name: format!("u({m})"),
        basis,
    })
}

/// `sp(m)` inside `so(4m)`: the commutant of `J1` and `J2`.
pub fn sp(m: usize) -> Result<SubalgebraBasis> {
    range("sp(m)", m >= 1 && 4 * m <= MAX_DIM)?;
    let cs = ComplexStructurePair::quaternionic(m);
    let j2 = cs.j2.as_ref().expect("quaternionic");
    let basis = commutant(4 * m, &[&cs.j1, j2], &[])?;
    expect_dim("sp", basis.len(), m * (2 * m + 1))?;
    Ok(SubalgebraBasis {
        n: 4 * m,
        name: format!("sp({m})"),
        basis,
    })
}

/// `sp(1) + sp(m)` inside `so(4m)`; the last three elements span the
/// `sp(1)` factor `{J1, J2, J3}`.
pub fn sp1sp(m: usize) -> Result<SubalgebraBasis> {
    let mut b = sp(m)?;
    let cs = ComplexStructurePair::quaternionic(m);
    for j in [
        cs.j1.clone(),
        cs.j2.clone().expect("quaternionic"),
        cs.j3().expect("quaternionic"),
    ] {
        let scale = std::f64::consts::SQRT_2 / j.norm();
        b.basis.push(j * scale);
    }
    b.name = format!("sp(1)+sp({m})");
    Ok(b)
}

/// All of `so(n)`: the elementary matrices `E_ij - E_ji`, i < j.
pub fn so(n: usize) -> Result<SubalgebraBasis> {
    range("so(n)", (2..=MAX_DIM).contains(&n))?;
    let basis = pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let mut e = RMatrix::zeros(n, n);
            e[(i, j)] = 1.0;
            e[(j, i)] = -1.0;
            e
        })
        .collect();
    Ok(SubalgebraBasis {
        n,
        name: format!("so({n})"),
        basis,
    })
}

type Quaternion = [f64; 4];

fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn qconj(a: Quaternion) -> Quaternion {
    [a[0], -a[1], -a[2], -a[3]]
}

fn qsub(a: Quaternion, b: Quaternion) -> Quaternion {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn qadd(a: Quaternion, b: Quaternion) -> Quaternion {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Octonion product by Cayley-Dickson doubling of the quaternions:
/// `(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))`. Components are
/// ordered `1, i, j, k, l, il, jl, kl`.
pub fn octonion_mul(x: &[f64; 8], y: &[f64; 8]) -> [f64; 8] {
    let a = [x[0], x[1], x[2], x[3]];
    let b = [x[4], x[5], x[6], x[7]];
    let c = [y[0], y[1], y[2], y[3]];
    let d = [y[4], y[5], y[6], y[7]];
    let lo = qsub(qmul(a, c), qmul(qconj(d), b));
    let hi = qadd(qmul(d, a), qmul(b, qconj(c)));
    [lo[0], lo[1], lo[2], lo[3], hi[0], hi[1], hi[2], hi[3]]
}

/// Cross product on `Im(O) = R^7`: the imaginary part of the octonion
/// product.
pub fn cross7(u: &[f64], v: &[f64]) -> [f64; 7] {
    let mut x = [0.0; 8];
    let mut y = [0.0; 8];
    x[1..].copy_from_slice(&u[..7]);
    y[1..].copy_from_slice(&v[..7]);
    let p = octonion_mul(&x, &y);
    let mut out = [0.0; 7];
    out.copy_from_slice(&p[1..]);
    out
}

/// Derivations of the octonionic cross product, a 14-dimensional
/// subalgebra of `so(7)`.
pub fn g2() -> Result<SubalgebraBasis> {
    let n = 7;
    let unit = |i: usize| {
        let mut e = [0.0; 7];
        e[i] = 1.0;
        e
    };
    let table: Vec<Vec<[f64; 7]>> = (0..n)
        .map(|i| (0..n).map(|j| cross7(&unit(i), &unit(j))).collect())
        .collect();
    let cross = |u: &[f64], v: &[f64]| {
        let mut out = [0.0; 7];
        for a in 0..n {
            for b in 0..n {
                let w = u[a] * v[b];
                if w != 0.0 {
                    for k in 0..n {
                        out[k] += w * table[a][b][k];
                    }
                }
            }
        }
        out
    };
    let vars = pairs(n);
    let mut c = RMatrix::zeros(n * n * n, vars.len());
    for (p, &(i0, j0)) in vars.iter().enumerate() {
        let mut a = RMatrix::zeros(n, n);
        a[(i0, j0)] = 1.0;
        a[(j0, i0)] = -1.0;
        let apply =
            |v: &[f64]| -> Vec<f64> { (0..n).map(|r| (0..n).map(|s| a[(r, s)] * v[s]).sum()).collect() };
        for i in 0..n {
            for j in 0..n {
                let lhs = apply(&table[i][j]);
                let r1 = cross(&apply(&unit(i)), &unit(j));
                let r2 = cross(&unit(i), &apply(&unit(j)));
                for k in 0..n {
                    c[((i * n + j) * n + k, p)] = lhs[k] - r1[k] - r2[k];
                }
            }
        }
    }
    let ns = null_space(&c, NULL_SPACE_TOL)?;
    expect_dim("g2", ns.ncols(), 14)?;
    Ok(SubalgebraBasis {
        n,
        name: "g2".into(),
        basis: columns_to_matrices(n, &ns),
    })
}

/// A real form of the 8-dimensional spin representation of `so(7)`: the
/// columns of `frame` form a unitary basis of spinors fixed by an
/// antilinear structure commuting with the representation, so `so(7)` acts
/// on their real span by real antisymmetric matrices.
#[derive(Debug, Clone)]
pub struct SpinorRealForm {
    pub frame: CMatrix,
}

impl SpinorRealForm {
    pub fn for_so7() -> Result<Self> {
        let g = build_gammas(7)?;
        let dim = g.dim_sigma();
        let gens: Vec<CMatrix> = pairs(7)
            .into_iter()
            .map(|(i, j)| g.pair(i, j).to_dense())
            .collect();
        // Solve M conj(B) = B M for every generator B, over real unknowns
        // (Re M, Im M).
        let vars = 2 * dim * dim;
        let rows = gens.len() * 2 * dim * dim;
        let mut c = RMatrix::zeros(rows, vars);
        for v in 0..vars {
            let mut m = CMatrix::zeros(dim, dim);
            let (k, imag) = (v % (dim * dim), v >= dim * dim);
            m[(k / dim, k % dim)] = if imag {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(1.0, 0.0)
            };
            let mut r = 0;
            for b in &gens {
                let res = &m * b.map(|z| z.conj()) - b * &m;
                for z in res.iter() {
                    c[(r, v)] = z.re;
                    c[(r + 1, v)] = z.im;
                    r += 2;
                }
            }
        }
        let ns = null_space(&c, NULL_SPACE_TOL)?;
        expect_dim("spin7 real structure", ns.ncols(), 2)?;
        let col = ns.column(0);
        let mut m = CMatrix::from_fn(dim, dim, |a, b| {
            Complex64::new(col[a * dim + b], col[dim * dim + a * dim + b])
        });
        let mm = &m * m.map(|z| z.conj());
        let lambda = mm.trace() / Complex64::new(dim as f64, 0.0);
        if lambda.im.abs() > 1e-9 || lambda.re <= 0.0 {
            return Err(SpinError::Internal(format!(
                "antilinear structure squares to {lambda}, not a real structure"
            )));
        }
        m /= Complex64::new(lambda.re.sqrt(), 0.0);
        // Real span of {e_k + M e_k, i(e_k - M e_k)}.
        let mut real_vecs = RMatrix::zeros(2 * dim, 2 * dim);
        for k in 0..dim {
            for a in 0..dim {
                let delta = if a == k { 1.0 } else { 0.0 };
                let me = m[(a, k)];
                let psi = Complex64::new(delta, 0.0) + me;
                let phi = Complex64::new(0.0, 1.0) * (Complex64::new(delta, 0.0) - me);
                real_vecs[(a, 2 * k)] = psi.re;
                real_vecs[(dim + a, 2 * k)] = psi.im;
                real_vecs[(a, 2 * k + 1)] = phi.re;
                real_vecs[(dim + a, 2 * k + 1)] = phi.im;
            }
        }
        let span = canonical_basis(&orthonormal_span(&real_vecs, NULL_SPACE_TOL));
        expect_dim("spin7 real form", span.ncols(), dim)?;
        let frame = CMatrix::from_fn(dim, dim, |a, b| Complex64::new(span[(a, b)], span[(dim + a, b)]));
        Ok(Self { frame })
    }

    /// Real matrix of `A` in `so(7)` acting on the real form.
    pub fn apply(&self, a: &RMatrix) -> Result<RMatrix> {
        let g = build_gammas(7)?;
        let rho = rho_so(&g, a)?;
        let m = self.frame.adjoint() * rho.entries * &self.frame;
        let imag = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > 1e-10 {
            return Err(SpinError::Internal(format!(
                "real form is not preserved (imaginary part {imag:.3e})"
            )));
        }
        let r = m.map(|z| z.re);
        let res = antisymmetry_residual(&r);
        if res > 1e-10 {
            return Err(SpinError::NotAntisymmetric(res));
        }
        Ok(r)
    }
}

/// Image of `spin(7)` in `so(8)` through a real form of its spin
/// representation.
pub fn spin7() -> Result<SubalgebraBasis> {
    let real = SpinorRealForm::for_so7()?;
    let basis = so(7)?
        .basis
        .iter()
        .map(|a| real.apply(a))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubalgebraBasis {
        n: 8,
        name: "spin(7)".into(),
        basis,
    })
}
