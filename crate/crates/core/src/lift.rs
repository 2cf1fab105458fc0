//! Lifting rotations and finitely generated holonomy groups through the
//! double cover `Spin(n) -> SO(n)`.
//!
//! A rotation is written as a product of an even number of hyperplane
//! reflections; the Clifford product of the reflection vectors is one of its
//! two preimages in `Spin(n)`. For a group given by an identity component
//! and discrete generators, the identity component lifts canonically and
//! each discrete generator has two candidate lifts, so a group has `2^k`
//! candidate lifts of which the valid ones are those satisfying every
//! declared order and relation in `Spin(n)`.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::clifford::{geometric_product, twisted_adjoint_all, Multivector, SignAssignment};
use crate::error::{Result, SpinError};
use crate::lie::{SubalgebraBasis, CLOSURE_TOL};
use crate::linalg::{
    antisym_coeffs, cmax, expm, orthogonality_residual, projection_residual, CMatrix, RMatrix,
};
use crate::spin_rep::{exp_spin, rep_multivector, rho_so, GammaSet, Monomial, SpinorMatrix};

/// Tolerance on `R^T R = I`, `det R = 1` and `D^k = I`.
pub const SO_TOL: f64 = 1e-10;
/// Coefficient tolerance for group identities in `Spin(n)`.
pub const LIFT_TOL: f64 = 1e-9;
/// Residual bound for normalization of the connected part.
pub const NORMALIZE_TOL: f64 = 1e-9;

// Columns deviating from the identity by less than this are treated as fixed.
const PEEL_TOL: f64 = 1e-11;

/// Unit vectors `v_1, .., v_2k` with `R = r_{v_1} .. r_{v_2k}`, where
/// `r_v(x) = x - 2 (v.x) v`.
///
/// At each step the column of the remaining rotation farthest from the
/// identity is mapped back onto its basis vector by one reflection; previously
/// fixed basis vectors stay fixed, so at most `n - 1` steps are needed.
pub fn reflect_factor(r: &RMatrix) -> Result<Vec<Vec<f64>>> {
    check_special_orthogonal(r)?;
    let n = r.nrows();
    let mut rest = r.clone();
    let mut vectors = Vec::new();
    loop {
        let dev = &rest - RMatrix::identity(n, n);
        let (col, norm) = (0..n)
            .map(|i| (i, dev.column(i).norm()))
            .fold((0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
        if norm < PEEL_TOL {
            break;
        }
        if vectors.len() >= n {
            return Err(SpinError::Internal("reflection peeling did not terminate".into()));
        }
        // u = (e_i - R e_i) / |e_i - R e_i| sends R e_i to e_i.
        let u: DVector<f64> = -dev.column(col) / norm;
        let reflect = RMatrix::identity(n, n) - &u * u.transpose() * 2.0;
        rest = reflect * rest;
        vectors.push(u.iter().copied().collect());
    }
    if vectors.len() % 2 == 1 {
        return Err(SpinError::Internal(
            "odd number of reflections for a rotation".into(),
        ));
    }
    Ok(vectors)
}

pub fn check_special_orthogonal(r: &RMatrix) -> Result<()> {
    if !r.is_square() {
        return Err(SpinError::NotSpecialOrthogonal("not square".into()));
    }
    let orth = orthogonality_residual(r);
    if orth > SO_TOL {
        return Err(SpinError::NotSpecialOrthogonal(format!(
            "orthogonality residual {orth:.3e}"
        )));
    }
    let det = r.determinant();
    if (det - 1.0).abs() > SO_TOL {
        return Err(SpinError::NotSpecialOrthogonal(format!("determinant {det}")));
    }
    Ok(())
}

/// Both preimages `(x, -x)` of `R` in `Spin(n)`, with `x` the Clifford
/// product of the reflection vectors from [`reflect_factor`].
pub fn lift_element(r: &RMatrix) -> Result<(Multivector, Multivector)> {
    let n = r.nrows();
    let mut x = Multivector::scalar(n, 1.0)?;
    for v in reflect_factor(r)? {
        x = geometric_product(&x, &Multivector::vector(&v)?)?;
    }
    let back = double_cover_pi(&x)?;
    let err = (&back - r).amax();
    if err > LIFT_TOL {
        return Err(SpinError::Internal(format!(
            "lift does not cover the rotation (error {err:.3e})"
        )));
    }
    let neg = x.neg();
    Ok((x, neg))
}

/// Rotation matrix of an even unit multivector; column `i` is `x e_i x^{-1}`.
pub fn double_cover_pi(x: &Multivector) -> Result<RMatrix> {
    let n = x.n();
    let basis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let cols = twisted_adjoint_all(x, &basis)?;
    Ok(RMatrix::from_fn(n, n, |j, i| cols[i][j]))
}

/// The canonical lift of an identity component: its Lie algebra acting on
/// spinors through `rho`. There is no sign choice to make.
#[derive(Debug, Clone)]
pub struct ConnectedLift {
    gammas: GammaSet,
    basis: SubalgebraBasis,
}

impl ConnectedLift {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &SubalgebraBasis {
        &self.basis
    }

    pub fn gammas(&self) -> &GammaSet {
        &self.gammas
    }

    /// Dense `rho(A)` for every basis element.
    pub fn matrices(&self) -> Result<Vec<SpinorMatrix>> {
        self.basis.basis.iter().map(|a| rho_so(&self.gammas, a)).collect()
    }

    /// `exp(rho(A))`, the canonical lift of `exp(A)` for `A` in the algebra.
    pub fn exp(&self, a: &RMatrix) -> Result<SpinorMatrix> {
        Ok(exp_spin(&rho_so(&self.gammas, a)?))
    }

    /// `rho(A) v` for each basis element, computed from the monomial pair
    /// products without forming dense matrices.
    pub fn apply_all(&self, v: &DVector<Complex64>) -> Vec<DVector<Complex64>> {
        let n = self.basis.n;
        let pair_mats: Vec<(usize, usize, Monomial)> = crate::linalg::pairs(n)
            .into_iter()
            .map(|(i, j)| (i, j, self.gammas.pair(i, j)))
            .collect();
        self.basis
            .basis
            .iter()
            .map(|a| {
                let mut out = DVector::zeros(v.len());
                for (i, j, m) in &pair_mats {
                    let c = a[(*i, *j)];
                    if c != 0.0 {
                        out += m.apply(v) * Complex64::new(-0.5 * c, 0.0);
                    }
                }
                out
            })
            .collect()
    }

    /// `sum_k rho(A_k)^* rho(A_k)`, assembled in bivector coordinates as
    /// `1/4 sum_{p,q} C_pq (g_p)^* g_q` with `C = sum_k a_k a_k^T`.
    pub fn gram(&self) -> CMatrix {
        let n = self.basis.n;
        let dim = self.gammas.dim_sigma();
        let mut out = CMatrix::zeros(dim, dim);
        if self.basis.is_empty() {
            return out;
        }
        let coeffs = self.basis.coeff_matrix();
        let c = &coeffs * coeffs.transpose();
        let pair_mats: Vec<Monomial> = crate::linalg::pairs(n)
            .into_iter()
            .map(|(i, j)| self.gammas.pair(i, j))
            .collect();
        let adjoints: Vec<Monomial> = pair_mats.iter().map(Monomial::adjoint).collect();
        for p in 0..pair_mats.len() {
            for q in 0..pair_mats.len() {
                let w = c[(p, q)];
                if w.abs() > 1e-15 {
                    adjoints[p]
                        .mul(&pair_mats[q])
                        .add_to(&mut out, Complex64::new(0.25 * w, 0.0));
                }
            }
        }
        out
    }
}

/// Canonical lift of the identity component spanned by `basis`.
pub fn lift_connected(g: &GammaSet, basis: &SubalgebraBasis) -> Result<ConnectedLift> {
    if basis.n != g.n() {
        return Err(SpinError::DimensionMismatch {
            expected: g.n(),
            got: basis.n,
        });
    }
    let res = basis.closure_residual();
    if res > CLOSURE_TOL {
        return Err(SpinError::NotBracketClosed(res));
    }
    Ok(ConnectedLift {
        gammas: g.clone(),
        basis: basis.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct DiscreteGenerator {
    pub label: String,
    pub matrix: RMatrix,
    /// Declared order: `matrix^order = I`.
    pub order: u32,
}

/// A word in the discrete generators that must equal the identity, or, when
/// `connected_target` is set, must equal `exp(target)` with the target in
/// the connected Lie algebra.
#[derive(Debug, Clone)]
pub struct Relation {
    pub label: String,
    pub word: Vec<(usize, i32)>,
    pub connected_target: Option<RMatrix>,
}

impl Relation {
    pub fn identity(label: impl Into<String>, word: Vec<(usize, i32)>) -> Self {
        Self {
            label: label.into(),
            word,
            connected_target: None,
        }
    }

    /// Total exponent of generator `i` in the word.
    pub fn exponent_sum(&self, i: usize) -> i32 {
        self.word.iter().filter(|(g, _)| *g == i).map(|(_, e)| e).sum()
    }
}

/// A candidate holonomy group: identity component plus discrete generators.
#[derive(Debug, Clone)]
pub struct HolonomySpec {
    pub label: String,
    pub n: usize,
    pub connected_part: SubalgebraBasis,
    /// The identity component is simply connected, so its lift is unique.
    pub simply_connected: bool,
    pub discrete_gens: Vec<DiscreteGenerator>,
    pub relations: Vec<Relation>,
}

impl HolonomySpec {
    pub fn connected(label: impl Into<String>, basis: SubalgebraBasis, simply_connected: bool) -> Self {
        Self {
            label: label.into(),
            n: basis.n,
            connected_part: basis,
            simply_connected,
            discrete_gens: Vec::new(),
            relations: Vec::new(),
        }
    }

    fn word_matrix(&self, word: &[(usize, i32)]) -> RMatrix {
        let mut m = RMatrix::identity(self.n, self.n);
        for &(g, e) in word {
            let d = &self.discrete_gens[g].matrix;
            let base = if e >= 0 { d.clone() } else { d.transpose() };
            for _ in 0..e.unsigned_abs() {
                m *= &base;
            }
        }
        m
    }

    /// Check every structural invariant at the `SO(n)` level.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.connected_part.n != n {
            return Err(SpinError::InvalidSpec(format!(
                "connected part lives in so({}), spec has n = {n}",
                self.connected_part.n
            )));
        }
        let span = self.connected_part.span();
        let id = RMatrix::identity(n, n);
        for d in &self.discrete_gens {
            if d.matrix.nrows() != n || d.matrix.ncols() != n {
                return Err(SpinError::InvalidSpec(format!(
                    "generator {} has wrong size",
                    d.label
                )));
            }
            check_special_orthogonal(&d.matrix)
                .map_err(|e| SpinError::InvalidSpec(format!("generator {}: {e}", d.label)))?;
            if d.order == 0 {
                return Err(SpinError::InvalidSpec(format!(
                    "generator {} has order 0",
                    d.label
                )));
            }
            let mut p = id.clone();
            for _ in 0..d.order {
                p *= &d.matrix;
            }
            let err = (&p - &id).amax();
            if err > SO_TOL {
                return Err(SpinError::InvalidSpec(format!(
                    "generator {}: D^{} differs from I by {err:.3e}",
                    d.label, d.order
                )));
            }
            if !self.connected_part.is_empty() {
                let conj: Vec<DVector<f64>> = self
                    .connected_part
                    .basis
                    .iter()
                    .map(|a| antisym_coeffs(&(&d.matrix * a * d.matrix.transpose())))
                    .collect();
                let res = projection_residual(&span, &RMatrix::from_columns(&conj));
                if res > NORMALIZE_TOL {
                    return Err(SpinError::InvalidSpec(format!(
                        "generator {} does not normalize the connected part (residual {res:.3e})",
                        d.label
                    )));
                }
            }
        }
        for rel in &self.relations {
            if rel.word.iter().any(|(g, _)| *g >= self.discrete_gens.len()) {
                return Err(SpinError::InvalidSpec(format!(
                    "relation {} refers to a missing generator",
                    rel.label
                )));
            }
            let lhs = self.word_matrix(&rel.word);
            let rhs = match &rel.connected_target {
                None => id.clone(),
                Some(t) => {
                    let res = projection_residual(&span, &RMatrix::from_columns(&[antisym_coeffs(t)]));
                    if res > NORMALIZE_TOL {
                        return Err(SpinError::InvalidSpec(format!(
                            "relation {} targets an element outside the connected algebra",
                            rel.label
                        )));
                    }
                    expm(t)
                }
            };
            let err = (&lhs - &rhs).amax();
            if err > SO_TOL * 10.0 {
                return Err(SpinError::InvalidSpec(format!(
                    "relation {} fails in SO({n}) by {err:.3e}",
                    rel.label
                )));
            }
        }
        Ok(())
    }

    /// Conjugate everything by an orthogonal change of frame `Q`.
    pub fn conjugated(&self, q: &RMatrix) -> HolonomySpec {
        let qt = q.transpose();
        HolonomySpec {
            label: self.label.clone(),
            n: self.n,
            connected_part: self.connected_part.conjugated(q),
            simply_connected: self.simply_connected,
            discrete_gens: self
                .discrete_gens
                .iter()
                .map(|d| DiscreteGenerator {
                    label: d.label.clone(),
                    matrix: q * &d.matrix * &qt,
                    order: d.order,
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| Relation {
                    label: r.label.clone(),
                    word: r.word.clone(),
                    connected_target: r.connected_target.as_ref().map(|t| q * t * &qt),
                })
                .collect(),
        }
    }
}

/// One choice of lifts for the discrete generators.
#[derive(Debug, Clone)]
pub struct LiftAssignment {
    pub signs: SignAssignment,
    pub lifted_gens: Vec<Multivector>,
    pub valid: bool,
    /// Which orders or relations failed in `Spin(n)`.
    pub failures: Vec<String>,
}

impl Serialize for LiftAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LiftAssignment", 3)?;
        st.serialize_field("signs", &self.signs)?;
        st.serialize_field("valid", &self.valid)?;
        st.serialize_field("gens", &self.lifted_gens)?;
        st.end()
    }
}

fn spinor_power(x: &SpinorMatrix, e: i32) -> SpinorMatrix {
    let base = if e < 0 {
        SpinorMatrix {
            n: x.n,
            entries: x.entries.adjoint(),
        }
    } else {
        x.clone()
    };
    let mut acc = SpinorMatrix::identity(x.n);
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(&base);
    }
    acc
}

fn word_product(gens: &[SpinorMatrix], word: &[(usize, i32)], n: usize) -> SpinorMatrix {
    word.iter().fold(SpinorMatrix::identity(n), |acc, &(g, e)| {
        acc.mul(&spinor_power(&gens[g], e))
    })
}

fn algebra_word(gens: &[Multivector], word: &[(usize, i32)], n: usize) -> Result<Multivector> {
    let mut x = Multivector::scalar(n, 1.0)?;
    for &(g, e) in word {
        x = geometric_product(&x, &gens[g].powi(e)?)?;
    }
    Ok(x)
}

/// All `2^k` sign choices for the discrete generators, each checked for the
/// homomorphism property in `Spin(n)`.
pub fn enumerate_lifts(spec: &HolonomySpec, g: &GammaSet) -> Result<Vec<LiftAssignment>> {
    spec.validate()?;
    if g.n() != spec.n {
        return Err(SpinError::DimensionMismatch {
            expected: spec.n,
            got: g.n(),
        });
    }
    let n = spec.n;
    let base: Vec<Multivector> = spec
        .discrete_gens
        .iter()
        .map(|d| lift_element(&d.matrix).map(|(x, _)| x))
        .collect::<Result<_>>()?;
    // Canonical lifts of connected targets, compared in the spin
    // representation, which is faithful on Spin(n).
    let targets: Vec<Option<SpinorMatrix>> = spec
        .relations
        .iter()
        .map(|r| {
            r.connected_target
                .as_ref()
                .map(|t| rho_so(g, t).map(|m| exp_spin(&m)))
                .transpose()
        })
        .collect::<Result<_>>()?;
    // Flipping the sign of a generator multiplies a word by (-1)^(exponent
    // sum of that generator), so every word is evaluated once for the base
    // lifts and each check keeps its deviation for both overall signs. Words
    // are multiplied in the algebra when the lifts are short, otherwise in
    // the spin representation, which is faithful on Spin(n).
    let longest = base.iter().map(Multivector::len).max().unwrap_or(1);
    let use_algebra = longest * longest * 8 <= g.dim_sigma().pow(3);
    let base_rep: Vec<SpinorMatrix> = if use_algebra {
        Vec::new()
    } else {
        base.iter()
            .map(|x| rep_multivector(g, x))
            .collect::<Result<_>>()?
    };
    let one = CMatrix::identity(g.dim_sigma(), g.dim_sigma());
    let one_mv = Multivector::scalar(n, 1.0)?;
    let deviations = |word: &[(usize, i32)], target: Option<&SpinorMatrix>| -> Result<[f64; 2]> {
        let t = target.map_or(&one, |t| &t.entries);
        if use_algebra {
            let w = algebra_word(&base, word, n)?;
            if target.is_none() {
                return Ok([w.max_abs_diff(&one_mv)?, w.neg().max_abs_diff(&one_mv)?]);
            }
            let r = rep_multivector(g, &w)?.entries;
            Ok([cmax(&(&r - t)), cmax(&(-&r - t))])
        } else {
            let w = word_product(&base_rep, word, n).entries;
            Ok([cmax(&(&w - t)), cmax(&(-&w - t))])
        }
    };
    let order_devs: Vec<[f64; 2]> = (0..base.len())
        .into_par_iter()
        .map(|k| deviations(&[(k, spec.discrete_gens[k].order as i32)], None))
        .collect::<Result<_>>()?;
    let relation_devs: Vec<[f64; 2]> = spec
        .relations
        .par_iter()
        .zip(&targets)
        .map(|(rel, t)| deviations(&rel.word, t.as_ref()))
        .collect::<Result<_>>()?;
    let tol = LIFT_TOL * 10.0;
    let holds = |devs: &[f64; 2], parity: i32| devs[parity.rem_euclid(2) as usize] <= tol;
    let assignments = SignAssignment::all(spec.discrete_gens.len())
        .into_iter()
        .map(|signs| {
            let flips: Vec<i32> = signs.signs().iter().map(|&s| i32::from(s < 0)).collect();
            let mut failures = Vec::new();
            for (k, d) in spec.discrete_gens.iter().enumerate() {
                if !holds(&order_devs[k], flips[k] * d.order as i32) {
                    failures.push(format!("order of {} is not {} in Spin({n})", d.label, d.order));
                }
            }
            for (rel, devs) in spec.relations.iter().zip(&relation_devs) {
                let parity: i32 = (0..flips.len()).map(|k| flips[k] * rel.exponent_sum(k)).sum();
                if !holds(devs, parity) {
                    failures.push(format!("relation {} fails in Spin({n})", rel.label));
                }
            }
            let lifted_gens = base
                .iter()
                .zip(signs.signs())
                .map(|(x, &s)| if s > 0 { x.clone() } else { x.neg() })
                .collect();
            LiftAssignment {
                signs,
                lifted_gens,
                valid: failures.is_empty(),
                failures,
            }
        })
        .collect();
    Ok(assignments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_special_orthogonal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plane_rotation(n: usize, i: usize, j: usize, theta: f64) -> RMatrix {
        let mut r = RMatrix::identity(n, n);
        r[(i, i)] = theta.cos();
        r[(j, j)] = theta.cos();
        r[(j, i)] = theta.sin();
        r[(i, j)] = -theta.sin();
        r
    }

    #[test]
    fn identity_has_no_reflections() {
        assert!(reflect_factor(&RMatrix::identity(4, 4)).unwrap().is_empty());
        let (p, m) = lift_element(&RMatrix::identity(4, 4)).unwrap();
        assert_eq!(p, Multivector::scalar(4, 1.0).unwrap());
        assert_eq!(m, Multivector::scalar(4, -1.0).unwrap());
    }

    #[test]
    fn half_turn_factors_into_basis_reflections() {
        let r = plane_rotation(3, 0, 1, std::f64::consts::PI);
        let v = reflect_factor(&r).unwrap();
        assert_eq!(v.len(), 2);
        for (got, want) in v.iter().zip([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]) {
            for (a, b) in got.iter().zip(want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn plane_rotation_lifts_to_rotor() {
        let theta = 1.1f64;
        let r = plane_rotation(4, 0, 1, theta);
        let (x, y) = lift_element(&r).unwrap();
        assert_eq!(x.neg(), y);
        let rotor = Multivector::from_terms(
            4,
            [
                (0, Complex64::new((theta / 2.0).cos(), 0.0)),
                (0b11, Complex64::new((theta / 2.0).sin(), 0.0)),
            ],
        )
        .unwrap();
        assert!(
            x.approx_eq(&rotor, 1e-12) || x.approx_eq(&rotor.neg(), 1e-12),
            "{x}"
        );
    }

    #[test]
    fn conjugation_on_c4_lifts_to_imaginary_volume() {
        let mut r = RMatrix::identity(8, 8);
        for k in 4..8 {
            r[(k, k)] = -1.0;
        }
        let (x, _) = lift_element(&r).unwrap();
        let e5678 = Multivector::blade(8, 0b1111_0000, Complex64::new(1.0, 0.0)).unwrap();
        assert!(
            x.approx_eq(&e5678, 1e-12) || x.approx_eq(&e5678.neg(), 1e-12),
            "{x}"
        );
        let sq = geometric_product(&x, &x).unwrap();
        assert!(sq.approx_eq(&Multivector::scalar(8, 1.0).unwrap(), 1e-12));
    }

    #[test]
    fn rejects_improper_rotation() {
        let mut r = RMatrix::identity(3, 3);
        r[(0, 0)] = -1.0;
        assert!(matches!(
            reflect_factor(&r),
            Err(SpinError::NotSpecialOrthogonal(_))
        ));
        let r = RMatrix::identity(3, 3) * 1.01;
        assert!(lift_element(&r).is_err());
    }

    #[test]
    fn random_rotations_recompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=7 {
            let r = random_special_orthogonal(n, &mut rng);
            let vs = reflect_factor(&r).unwrap();
            assert!(vs.len().is_multiple_of(2) && vs.len() <= n);
            let mut m = RMatrix::identity(n, n);
            for v in &vs {
                let u = DVector::from_column_slice(v);
                m *= RMatrix::identity(n, n) - &u * u.transpose() * 2.0;
            }
            assert!((m - &r).amax() < 1e-9);
        }
    }

    #[test]
    fn double_cover_of_one_is_identity() {
        let one = Multivector::scalar(5, 1.0).unwrap();
        assert_eq!(double_cover_pi(&one).unwrap(), RMatrix::identity(5, 5));
    }

    #[test]
    fn empty_connected_lift() {
        let g = crate::spin_rep::build_gammas(4).unwrap();
        let h = lift_connected(&g, &SubalgebraBasis::empty(4)).unwrap();
        assert!(h.is_empty());
        assert!(h.matrices().unwrap().is_empty());
    }

    #[test]
    fn non_closed_basis_is_rejected() {
        let g = crate::spin_rep::build_gammas(3).unwrap();
        let so3 = crate::lie::so(3).unwrap();
        let partial = SubalgebraBasis::from_matrices(3, "pair", so3.basis[..2].to_vec()).unwrap();
        assert!(matches!(
            lift_connected(&g, &partial),
            Err(SpinError::NotBracketClosed(_))
        ));
    }

    #[test]
    fn structured_gram_matches_dense() {
        let g = crate::spin_rep::build_gammas(6).unwrap();
        let h = lift_connected(&g, &crate::lie::su(3).unwrap()).unwrap();
        let mut dense = CMatrix::zeros(8, 8);
        for m in h.matrices().unwrap() {
            dense += m.entries.adjoint() * &m.entries;
        }
        assert!(cmax(&(h.gram() - dense)) < 1e-12);
        let v = DVector::from_fn(8, |i, _| Complex64::new(i as f64, 1.0));
        for (fast, m) in h.apply_all(&v).iter().zip(h.matrices().unwrap()) {
            assert!(cmax(&(fast - &m.entries * &v)) < 1e-12);
        }
    }
}
