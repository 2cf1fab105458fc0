//! Parallel spinor counts: the joint fixed space of a lifted holonomy group
//! on the spin representation.
//!
//! A spinor is fixed by the lift exactly when every `rho(A)` of the identity
//! component annihilates it and every lifted discrete generator `U` fixes it.
//! The joint kernel is found from the Gram matrix `sum M^* M` of all those
//! operators, split into its exactly decoupled blocks and diagonalized block
//! by block. Eigenvalues of a Gram matrix are squared singular values and
//! only resolve down to `sqrt(eps)`, so the near-null eigenvectors are then
//! re-measured against the operators themselves, which restores singular
//! values down to `eps`.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Result, SpinError};
use crate::lift::{enumerate_lifts, lift_connected, HolonomySpec, LiftAssignment};
use crate::linalg::{cmax, CMatrix};
use crate::spin_rep::{build_gammas, rep_multivector, GammaSet, SpinorMatrix};

/// Singular values below this multiple of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Largest acceptable ratio between the largest zero and smallest nonzero
/// singular value.
pub const GAP_MAX: f64 = 1e-4;
/// Bound on `|M v|` for every operator `M` and returned fixed spinor `v`.
pub const RESIDUAL_TOL: f64 = 1e-8;

// Eigenvalues of the Gram matrix below this fraction of the largest are
// re-measured directly.
const CANDIDATE_REL: f64 = 1e-6;
// Gram entries below this fraction of the largest do not couple blocks.
const COUPLING_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rank: f64,
    pub gap: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: RANK_TOL,
            gap: GAP_MAX,
            residual: RESIDUAL_TOL,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank", self.rank),
            ("gap", self.gap),
            ("residual", self.residual),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SpinError::InvalidParameter(format!(
                    "{name} tolerance must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// The joint fixed space of a set of spinor operators.
#[derive(Debug, Clone)]
pub struct FixedSpaceReport {
    /// Complex dimension of the fixed space.
    pub dim: usize,
    /// Orthonormal basis of the fixed space.
    pub basis: Vec<DVector<Complex64>>,
    /// Largest zero singular value over smallest nonzero one; 0 when either
    /// set is empty.
    pub singular_value_gap: f64,
    /// Largest `|M v|` over operators `M` and basis spinors `v`.
    pub max_residual: f64,
}

impl FixedSpaceReport {
    pub fn to_json(&self, emit_basis: bool) -> Value {
        let mut v = json!({
            "N": self.dim,
            "singular_value_gap": self.singular_value_gap,
            "max_residual": self.max_residual,
        });
        if emit_basis {
            let basis: Vec<Vec<[f64; 2]>> = self
                .basis
                .iter()
                .map(|b| b.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            v["basis"] = json!(basis);
        }
        v
    }
}

type ApplyAll<'a> = Box<dyn Fn(&DVector<Complex64>) -> Vec<DVector<Complex64>> + Sync + 'a>;

/// Operators whose joint kernel is wanted: their Gram matrix together with
/// a way to apply all of them to a vector.
struct Operators<'a> {
    gram: CMatrix,
    apply: ApplyAll<'a>,
}

/// Joint fixed space of `rho(A)` for the given Lie algebra images and of
/// the given group elements.
pub fn fixed_space(
    g: &GammaSet,
    lie_mats: &[SpinorMatrix],
    discrete_mats: &[SpinorMatrix],
) -> Result<FixedSpaceReport> {
    fixed_space_with(g, lie_mats, discrete_mats, &Tolerances::default())
}

pub fn fixed_space_with(
    g: &GammaSet,
    lie_mats: &[SpinorMatrix],
    discrete_mats: &[SpinorMatrix],
    tol: &Tolerances,
) -> Result<FixedSpaceReport> {
    let dim = g.dim_sigma();
    for m in lie_mats.iter().chain(discrete_mats) {
        if m.dim() != dim {
            return Err(SpinError::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
    }
    let id = CMatrix::identity(dim, dim);
    let ops: Vec<CMatrix> = lie_mats
        .iter()
        .map(|m| m.entries.clone())
        .chain(discrete_mats.iter().map(|u| &u.entries - &id))
        .collect();
    let mut gram = CMatrix::zeros(dim, dim);
    for m in &ops {
        gram += m.adjoint() * m;
    }
    let operators = Operators {
        gram,
        apply: Box::new(move |v| ops.iter().map(|m| m * v).collect()),
    };
    joint_kernel(dim, &operators, tol)
}

fn discrete_gram(discrete: &[SpinorMatrix], dim: usize) -> CMatrix {
    // (U - I)^* (U - I) = 2I - U - U^* for unitary U.
    let mut gram = CMatrix::zeros(dim, dim);
    for u in discrete {
        gram += CMatrix::identity(dim, dim) * Complex64::new(2.0, 0.0) - &u.entries - u.entries.adjoint();
    }
    gram
}

/// Connected components of the coupling graph of a Hermitian matrix.
fn blocks(gram: &CMatrix) -> Vec<Vec<usize>> {
    let dim = gram.nrows();
    let cut = cmax(gram) * COUPLING_REL;
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..dim {
        for j in i + 1..dim {
            if gram[(i, j)].norm() > cut {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; dim];
    for i in 0..dim {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn joint_kernel(dim: usize, ops: &Operators<'_>, tol: &Tolerances) -> Result<FixedSpaceReport> {
    let gram = (&ops.gram + ops.gram.adjoint()) * Complex64::new(0.5, 0.0);
    if cmax(&gram) == 0.0 {
        return Ok(FixedSpaceReport {
            dim,
            basis: (0..dim)
                .map(|i| {
                    let mut e = DVector::zeros(dim);
                    e[i] = Complex64::new(1.0, 0.0);
                    e
                })
                .collect(),
            singular_value_gap: 0.0,
            max_residual: 0.0,
        });
    }

    // Eigenpairs of each decoupled block, embedded back into full size.
    let pieces: Vec<Vec<(f64, DVector<Complex64>)>> = blocks(&gram)
        .into_par_iter()
        .map(|idx| {
            let k = idx.len();
            let sub = CMatrix::from_fn(k, k, |a, b| gram[(idx[a], idx[b])]);
            let eig = sub.symmetric_eigen();
            (0..k)
                .map(|c| {
                    let mut v = DVector::zeros(dim);
                    for (a, &i) in idx.iter().enumerate() {
                        v[i] = eig.eigenvectors[(a, c)];
                    }
                    (eig.eigenvalues[c].max(0.0), v)
                })
                .collect()
        })
        .collect();
    let pairs: Vec<(f64, DVector<Complex64>)> = pieces.into_iter().flatten().collect();
    let lam_max = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let s_max = lam_max.sqrt();

    let mut nonzero: Vec<f64> = Vec::new();
    let mut candidates: Vec<DVector<Complex64>> = Vec::new();
    for (lam, v) in pairs {
        if lam <= CANDIDATE_REL * lam_max {
            candidates.push(v);
        } else {
            nonzero.push(lam.sqrt());
        }
    }

    let mut zero: Vec<f64> = Vec::new();
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    if !candidates.is_empty() {
        // Stack the operator images of the candidates and take the SVD of
        // that tall matrix: its singular values are measured, not squared.
        let images: Vec<Vec<DVector<Complex64>>> = candidates.par_iter().map(|v| (ops.apply)(v)).collect();
        let rows: usize = images[0].iter().map(|w| w.len()).sum();
        let mut stacked = CMatrix::zeros(rows.max(candidates.len()), candidates.len());
        for (c, imgs) in images.iter().enumerate() {
            let mut r = 0;
            for w in imgs {
                for z in w.iter() {
                    stacked[(r, c)] = *z;
                    r += 1;
                }
            }
        }
        let svd = stacked.svd(false, true);
        let v_t = svd.v_t.expect("requested V^*");
        let cand = CMatrix::from_columns(&candidates);
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= tol.rank * s_max {
                zero.push(s);
                basis.push(&cand * v_t.row(k).adjoint());
            } else {
                nonzero.push(s);
            }
        }
    }

    let largest_zero = zero.iter().copied().fold(0.0, f64::max);
    let smallest_nonzero = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = if zero.is_empty() || nonzero.is_empty() {
        0.0
    } else {
        largest_zero / smallest_nonzero
    };
    if gap >= tol.gap {
        return Err(SpinError::IndeterminateRank { gap });
    }

    let basis = canonical_spinor_basis(&basis, dim);
    let max_residual = basis
        .par_iter()
        .map(|v| (ops.apply)(v).iter().map(|w| w.norm()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    if max_residual > tol.residual {
        return Err(SpinError::ResidualTooLarge(max_residual));
    }
    Ok(FixedSpaceReport {
        dim: basis.len(),
        basis,
        singular_value_gap: gap,
        max_residual,
    })
}

/// Project the coordinate vectors onto the span in index order and
/// orthonormalize, so the basis does not depend on how the eigensolver
/// resolved degenerate eigenvalues.
fn canonical_spinor_basis(span: &[DVector<Complex64>], dim: usize) -> Vec<DVector<Complex64>> {
    let k = span.len();
    let mut out: Vec<DVector<Complex64>> = Vec::with_capacity(k);
    for i in 0..dim {
        if out.len() == k {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(dim);
        for b in span {
            v += b * b[i].conj();
        }
        for _ in 0..2 {
            for b in &out {
                let d = b.dotc(&v);
                v -= b * d;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            // Fix the phase so the leading coordinate is real and positive.
            let lead = v[i];
            let phase = if lead.norm() > 0.0 {
                lead.conj() / lead.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            out.push(v * (phase / norm));
        }
    }
    out
}

/// A lift together with its fixed space; invalid lifts have none.
#[derive(Debug, Clone)]
pub struct LiftOutcome {
    pub assignment: LiftAssignment,
    pub fixed: Option<FixedSpaceReport>,
}

/// The full decision for one candidate holonomy group.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub spec: HolonomySpec,
    pub dim_sigma: usize,
    pub per_lift: Vec<LiftOutcome>,
    pub admits_parallel_spinor: bool,
    /// Valid lifts with at least one fixed spinor.
    pub structure_count: usize,
    pub warnings: Vec<String>,
}

impl CriterionReport {
    /// Fixed-space dimensions of the valid lifts, in enumeration order.
    pub fn valid_counts(&self) -> Vec<usize> {
        self.per_lift
            .iter()
            .filter_map(|o| o.fixed.as_ref().map(|f| f.dim))
            .collect()
    }

    pub fn valid_lifts(&self) -> usize {
        self.per_lift.iter().filter(|o| o.assignment.valid).count()
    }

    pub fn to_json(&self, emit_basis: bool) -> Value {
        let lifts: Vec<Value> = self
            .per_lift
            .iter()
            .map(|o| {
                let mut v = serde_json::to_value(&o.assignment).expect("lift serializes");
                v["failures"] = json!(o.assignment.failures);
                v["fixed_space"] = match &o.fixed {
                    Some(f) => f.to_json(emit_basis),
                    None => Value::Null,
                };
                v
            })
            .collect();
        let gens: Vec<Value> = self
            .spec
            .discrete_gens
            .iter()
            .map(|d| json!({"label": d.label, "order": d.order}))
            .collect();
        json!({
            "group": self.spec.label,
            "n": self.spec.n,
            "dim_sigma": self.dim_sigma,
            "connected_part": {
                "name": self.spec.connected_part.name,
                "dim": self.spec.connected_part.len(),
            },
            "discrete_generators": gens,
            "lifts": lifts,
            "admits_parallel_spinor": self.admits_parallel_spinor,
            "structure_count": self.structure_count,
            "warnings": self.warnings,
        })
    }
}

pub fn check_criterion(spec: &HolonomySpec) -> Result<CriterionReport> {
    check_criterion_with(spec, &build_gammas(spec.n)?, &Tolerances::default())
}

/// [`check_criterion`] with an explicit gamma model and tolerances.
pub fn check_criterion_with(spec: &HolonomySpec, g: &GammaSet, tol: &Tolerances) -> Result<CriterionReport> {
    tol.validate()?;
    let lifts = enumerate_lifts(spec, g)?;
    let connected = lift_connected(g, &spec.connected_part)?;
    let dim = g.dim_sigma();
    let connected_gram = connected.gram();
    let mut warnings = Vec::new();
    if !spec.simply_connected && !spec.connected_part.is_empty() {
        warnings.push(format!(
            "identity component '{}' is not known to be simply connected; \
             lift multiplicity of the identity component is not analyzed",
            spec.connected_part.name
        ));
    }

    let per_lift: Vec<LiftOutcome> = lifts
        .into_par_iter()
        .map(|assignment| {
            if !assignment.valid {
                return Ok(LiftOutcome {
                    assignment,
                    fixed: None,
                });
            }
            let discrete: Vec<SpinorMatrix> = assignment
                .lifted_gens
                .iter()
                .map(|x| rep_multivector(g, x))
                .collect::<Result<_>>()?;
            let id = CMatrix::identity(dim, dim);
            let gram = &connected_gram + discrete_gram(&discrete, dim);
            let connected = &connected;
            let shifted: Vec<CMatrix> = discrete.iter().map(|u| &u.entries - &id).collect();
            let ops = Operators {
                gram,
                apply: Box::new(move |v| {
                    let mut out = connected.apply_all(v);
                    out.extend(shifted.iter().map(|m| m * v));
                    out
                }),
            };
            let fixed = joint_kernel(dim, &ops, tol)?;
            Ok(LiftOutcome {
                assignment,
                fixed: Some(fixed),
            })
        })
        .collect::<Result<_>>()?;

    let structure_count = per_lift
        .iter()
        .filter(|o| o.fixed.as_ref().is_some_and(|f| f.dim >= 1))
        .count();
    Ok(CriterionReport {
        spec: spec.clone(),
        dim_sigma: dim,
        per_lift,
        admits_parallel_spinor: structure_count > 0,
        structure_count,
        warnings,
    })
}
