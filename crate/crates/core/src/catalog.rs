//! The standard holonomy groups with parallel spinors, as concrete
//! [`HolonomySpec`]s, and the table of their spinor counts.
//!
//! Layouts follow [`crate::lie`]: `SU_m` acts on `R^{2m} = C^m` through
//! `J1`, `Sp_m` on `R^{4m} = H^m` commuting with `J1`, `J2`, `J3`. The unit
//! quaternion `q = q0 + q1 i + q2 j + q3 k` acts on `H^m` by
//! `q0 + q1 J1 + q2 J2 + q3 J3`, which commutes with `Sp_m`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::criterion::{check_criterion_with, CriterionReport, Tolerances};
use crate::error::{Result, SpinError};
use crate::lie::{g2, so, sp, sp1sp, spin7, su, u, ComplexStructurePair};
use crate::lift::{DiscreteGenerator, HolonomySpec, Relation};
use crate::linalg::RMatrix;
use crate::spin_rep::build_gammas;
use crate::MAX_DIM;

/// Row labels understood by [`catalog_spec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    SU,
    SUxZ2,
    Sp,
    SpxZd,
    SpGamma,
    Spin7,
    G2,
    U,
    Sp1Sp,
    SO,
}

impl Group {
    pub const ALL: [Group; 10] = [
        Group::SU,
        Group::SUxZ2,
        Group::Sp,
        Group::SpxZd,
        Group::SpGamma,
        Group::Spin7,
        Group::G2,
        Group::U,
        Group::Sp1Sp,
        Group::SO,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::SU => "SU",
            Group::SUxZ2 => "SUxZ2",
            Group::Sp => "Sp",
            Group::SpxZd => "SpxZd",
            Group::SpGamma => "SpGamma",
            Group::Spin7 => "Spin7",
            Group::G2 => "G2",
            Group::U => "U",
            Group::Sp1Sp => "Sp1Sp",
            Group::SO => "SO",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        Group::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Group::ALL.iter().map(|g| g.name()).collect();
                SpinError::InvalidParameter(format!(
                    "unknown group '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Finite subgroups of the unit quaternions, plus the infinite family that
/// cannot be handled by finite enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaType {
    /// `Z_{2d}`, generated by `e^{i pi / d}`.
    Cyclic,
    /// Binary dihedral group of order `4d`.
    Dihedral,
    Tetrahedral,
    Octahedral,
    Icosahedral,
    /// Infinite subgroups of `U(1) x| Z_2`.
    Infinite,
}

impl GammaType {
    pub const ALL: [GammaType; 6] = [
        GammaType::Cyclic,
        GammaType::Dihedral,
        GammaType::Tetrahedral,
        GammaType::Octahedral,
        GammaType::Icosahedral,
        GammaType::Infinite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GammaType::Cyclic => "cyclic",
            GammaType::Dihedral => "dihedral",
            GammaType::Tetrahedral => "tetrahedral",
            GammaType::Octahedral => "octahedral",
            GammaType::Icosahedral => "icosahedral",
            GammaType::Infinite => "infinite",
        }
    }
}

impl FromStr for GammaType {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        GammaType::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = GammaType::ALL.iter().map(|g| g.name()).collect();
                SpinError::InvalidParameter(format!(
                    "unknown gamma type '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Parameters of a catalog row; unused ones are ignored.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Params {
    pub m: Option<usize>,
    pub d: Option<usize>,
    pub gamma: Option<GammaType>,
}

impl Params {
    pub fn m(m: usize) -> Self {
        Self {
            m: Some(m),
            ..Self::default()
        }
    }

    pub fn md(m: usize, d: usize) -> Self {
        Self {
            m: Some(m),
            d: Some(d),
            gamma: None,
        }
    }

    pub fn gamma(m: usize, gamma: GammaType, d: Option<usize>) -> Self {
        Self {
            m: Some(m),
            d,
            gamma: Some(gamma),
        }
    }

    fn need_m(&self, group: Group) -> Result<usize> {
        self.m
            .ok_or_else(|| SpinError::InvalidParameter(format!("{group} needs the parameter m")))
    }

    fn need_d(&self, group: Group) -> Result<usize> {
        self.d
            .ok_or_else(|| SpinError::InvalidParameter(format!("{group} needs the parameter d")))
    }
}

/// Unit quaternion acting on `H^m`.
fn quaternion_action(cs: &ComplexStructurePair, q: [f64; 4]) -> RMatrix {
    let n = cs.j1.nrows();
    let j2 = cs.j2.as_ref().expect("quaternionic structure");
    let j3 = cs.j3().expect("quaternionic structure");
    RMatrix::identity(n, n) * q[0] + &cs.j1 * q[1] + j2 * q[2] + j3 * q[3]
}

/// A complex structure in `sp(m)`: multiplication by `i` from the side
/// opposite to `J1, J2, J3`. `exp(pi K) = -I`, the central element of
/// `Sp_m`.
pub fn sp_central_generator(m: usize) -> RMatrix {
    let mut k = RMatrix::zeros(4 * m, 4 * m);
    for j in 0..m {
        let (a, b, c, d) = (j, 2 * m + j, m + j, 3 * m + j);
        k[(b, a)] = 1.0;
        k[(a, b)] = -1.0;
        k[(d, c)] = -1.0;
        k[(c, d)] = 1.0;
    }
    k
}

fn qmul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn qconj(a: [f64; 4]) -> [f64; 4] {
    [a[0], -a[1], -a[2], -a[3]]
}

/// Generators of `Gamma` as unit quaternions with their orders, and the
/// defining relations of `Gamma` as words (all equal to the identity).
/// The element `-1` is given by the word in the third component.
#[allow(clippy::type_complexity)]
fn gamma_presentation(
    gamma: GammaType,
    d: Option<usize>,
) -> Result<(
    Vec<(&'static str, [f64; 4], u32)>,
    Vec<(&'static str, Vec<(usize, i32)>)>,
    Vec<(usize, i32)>,
)> {
    let s = [0.5, 0.5, 0.5, 0.5];
    match gamma {
        GammaType::Cyclic => {
            let d = d.ok_or_else(|| SpinError::InvalidParameter("cyclic Gamma needs d".into()))?;
            if d < 2 {
                return Err(SpinError::InvalidParameter(
                    "cyclic Gamma = Z_2d needs d > 1".into(),
                ));
            }
            let t = PI / d as f64;
            Ok((
                vec![("a", [t.cos(), t.sin(), 0.0, 0.0], 2 * d as u32)],
                vec![],
                vec![(0, d as i32)],
            ))
        }
        GammaType::Dihedral => {
            let d = d.ok_or_else(|| SpinError::InvalidParameter("dihedral Gamma needs d".into()))?;
            if d < 2 {
                return Err(SpinError::InvalidParameter(
                    "binary dihedral Gamma of order 4d needs d > 1".into(),
                ));
            }
            let t = PI / d as f64;
            Ok((
                vec![
                    ("a", [t.cos(), t.sin(), 0.0, 0.0], 2 * d as u32),
                    ("b", [0.0, 0.0, 1.0, 0.0], 4),
                ],
                vec![
                    ("b^2 = a^d", vec![(1, 2), (0, -(d as i32))]),
                    ("b a b^-1 = a^-1", vec![(1, 1), (0, 1), (1, -1), (0, 1)]),
                ],
                vec![(1, 2)],
            ))
        }
        GammaType::Tetrahedral | GammaType::Octahedral | GammaType::Icosahedral => {
            // R^l = S^m = T^n = RST with S = (1 + i + j + k)/2 of order 6
            // and T = conj(S) R.
            let (l, mm, nn, r) = match gamma {
                GammaType::Tetrahedral => (2, 3, 3, [0.0, 1.0, 0.0, 0.0]),
                GammaType::Octahedral => {
                    let h = std::f64::consts::FRAC_1_SQRT_2;
                    (2, 3, 4, [0.0, h, h, 0.0])
                }
                _ => {
                    let phi = (1.0 + 5f64.sqrt()) / 2.0;
                    (2, 3, 5, [0.0, phi / 2.0, 0.5 / phi, 0.5])
                }
            };
            let t = qmul(qconj(s), r);
            Ok((
                vec![("R", r, 2 * l), ("S", s, 2 * mm), ("T", t, 2 * nn)],
                vec![
                    ("R^l = S^m", vec![(0, l as i32), (1, -(mm as i32))]),
                    ("S^m = T^n", vec![(1, mm as i32), (2, -(nn as i32))]),
                    ("T^n = RST", vec![(2, nn as i32), (2, -1), (1, -1), (0, -1)]),
                ],
                vec![(0, l as i32)],
            ))
        }
        GammaType::Infinite => Err(SpinError::Unsupported(
            "infinite subgroups of U(1) x| Z_2 cannot be enumerated by finite sign assignments".into(),
        )),
    }
}

fn gamma_label(gamma: GammaType, d: Option<usize>) -> String {
    match gamma {
        GammaType::Cyclic => format!("Z_{}", 2 * d.unwrap_or(0)),
        GammaType::Dihedral => format!("2D_{}", 4 * d.unwrap_or(0)),
        GammaType::Tetrahedral => "2T".into(),
        GammaType::Octahedral => "2O".into(),
        GammaType::Icosahedral => "2I".into(),
        GammaType::Infinite => "infinite".into(),
    }
}

/// Human readable label of a catalog group, e.g. `SU_4⋊Z_2`.
pub fn group_label(group: Group, p: &Params) -> String {
    let m = p.m.unwrap_or(0);
    match group {
        Group::SU => format!("SU_{m}"),
        Group::SUxZ2 => format!("SU_{m}⋊Z_2"),
        Group::Sp => format!("Sp_{m}"),
        Group::SpxZd => format!("Sp_{m}×Z_{}", p.d.unwrap_or(0)),
        Group::SpGamma => format!(
            "Sp_{m}·{}",
            p.gamma.map(|g| gamma_label(g, p.d)).unwrap_or_else(|| "Γ".into())
        ),
        Group::Spin7 => "Spin_7".into(),
        Group::G2 => "G_2".into(),
        Group::U => format!("U_{m}"),
        Group::Sp1Sp => format!("Sp_1·Sp_{m}"),
        Group::SO => format!("SO_{m}"),
    }
}

/// Build the holonomy spec of a catalog row.
pub fn catalog_spec(group: Group, p: &Params) -> Result<HolonomySpec> {
    let label = group_label(group, p);
    let spec = match group {
        Group::SU => HolonomySpec::connected(label, su(p.need_m(group)?)?, true),
        Group::Sp => HolonomySpec::connected(label, sp(p.need_m(group)?)?, true),
        Group::G2 => HolonomySpec::connected(label, g2()?, true),
        Group::Spin7 => HolonomySpec::connected(label, spin7()?, true),
        Group::U => HolonomySpec::connected(label, u(p.need_m(group)?)?, false),
        Group::Sp1Sp => HolonomySpec::connected(label, sp1sp(p.need_m(group)?)?, false),
        Group::SO => {
            // For SO the parameter is the dimension itself.
            HolonomySpec::connected(label, so(p.need_m(group)?)?, false)
        }
        Group::SUxZ2 => {
            let m = p.need_m(group)?;
            if m % 2 == 1 {
                return Err(SpinError::InvalidParameter(format!(
                    "m must be even for SU_m⋊Z_2: conjugation on C^{m} has determinant -1"
                )));
            }
            let mut spec = HolonomySpec::connected(label, su(m)?, true);
            let mut sigma = RMatrix::identity(2 * m, 2 * m);
            for k in m..2 * m {
                sigma[(k, k)] = -1.0;
            }
            spec.discrete_gens.push(DiscreteGenerator {
                label: "sigma".into(),
                matrix: sigma,
                order: 2,
            });
            spec
        }
        Group::SpxZd => {
            let m = p.need_m(group)?;
            let d = p.need_d(group)?;
            if d % 2 == 0 {
                return Err(SpinError::InvalidParameter(format!(
                    "d must be odd for Sp_m×Z_d (got d = {d}): -1 already lies in Sp_m"
                )));
            }
            if d < 3 {
                return Err(SpinError::InvalidParameter("d must be greater than 1".into()));
            }
            let mut spec = HolonomySpec::connected(label, sp(m)?, true);
            let cs = ComplexStructurePair::quaternionic(m);
            let t = 2.0 * PI / d as f64;
            spec.discrete_gens.push(DiscreteGenerator {
                label: format!("exp(2pi/{d} J1)"),
                matrix: RMatrix::identity(4 * m, 4 * m) * t.cos() + &cs.j1 * t.sin(),
                order: d as u32,
            });
            spec
        }
        Group::SpGamma => {
            let m = p.need_m(group)?;
            let gamma = p
                .gamma
                .ok_or_else(|| SpinError::InvalidParameter("SpGamma needs a gamma type".into()))?;
            let (gens, rels, minus_one) = gamma_presentation(gamma, p.d)?;
            let mut spec = HolonomySpec::connected(label, sp(m)?, true);
            let cs = ComplexStructurePair::quaternionic(m);
            for (name, q, order) in gens {
                spec.discrete_gens.push(DiscreteGenerator {
                    label: name.into(),
                    matrix: quaternion_action(&cs, q),
                    order,
                });
            }
            for (name, word) in rels {
                spec.relations.push(Relation::identity(name, word));
            }
            spec.relations.push(Relation {
                label: "-1 of Gamma is -1 of Sp_m".into(),
                word: minus_one,
                connected_target: Some(sp_central_generator(m) * PI),
            });
            spec
        }
    };
    if spec.n > MAX_DIM {
        return Err(SpinError::DimensionOutOfRange(spec.n));
    }
    Ok(spec)
}

/// What the classification table states for a row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceValue {
    /// Number of inequivalent lifts carrying parallel spinors.
    pub structures: usize,
    /// Parallel spinor count of each of them.
    pub n: usize,
}

/// Table metadata for a catalog row: the stated count if any, the side
/// conditions, and whether the row satisfies them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub hol0: String,
    pub conditions: &'static str,
    pub within_conditions: bool,
    pub reference: Option<ReferenceValue>,
    /// Whether the row can occur for compact manifolds.
    pub compact: bool,
}

pub fn expectation(group: Group, p: &Params) -> Expectation {
    let m = p.m.unwrap_or(0);
    let d = p.d.unwrap_or(0);
    let value = |structures, n| Some(ReferenceValue { structures, n });
    match group {
        Group::SU => Expectation {
            hol0: format!("SU_{m}"),
            conditions: "",
            within_conditions: true,
            reference: value(1, 2),
            compact: m % 2 == 1,
        },
        Group::SUxZ2 => {
            let ok = m.is_multiple_of(4);
            Expectation {
                hol0: format!("SU_{m}"),
                conditions: "m ≡ 0(4)",
                within_conditions: ok,
                reference: if ok { value(2, 1) } else { None },
                compact: ok,
            }
        }
        Group::Sp => Expectation {
            hol0: format!("Sp_{m}"),
            conditions: "",
            within_conditions: true,
            reference: value(1, m + 1),
            compact: false,
        },
        Group::SpxZd => {
            let ok = d > 1 && d % 2 == 1 && (m + 1).is_multiple_of(d);
            Expectation {
                hol0: format!("Sp_{m}"),
                conditions: "d > 1, d odd, d divides m+1",
                within_conditions: ok,
                reference: if ok { value(1, (m + 1) / d) } else { None },
                compact: ok,
            }
        }
        Group::SpGamma => Expectation {
            hol0: format!("Sp_{m}"),
            conditions: "m ≡ 0(2)",
            within_conditions: m.is_multiple_of(2),
            reference: None,
            compact: false,
        },
        Group::Spin7 => Expectation {
            hol0: "Spin_7".into(),
            conditions: "",
            within_conditions: true,
            reference: value(1, 1),
            compact: false,
        },
        Group::G2 => Expectation {
            hol0: "G_2".into(),
            conditions: "",
            within_conditions: true,
            reference: value(1, 1),
            compact: true,
        },
        Group::U | Group::Sp1Sp | Group::SO => Expectation {
            hol0: group_label(group, p),
            conditions: "no fixed spinors",
            within_conditions: true,
            reference: value(0, 0),
            compact: false,
        },
    }
}

/// The rows of the classification table with ambient dimension at most
/// `max_n`, in table order.
pub fn table_rows(max_n: usize) -> Vec<(Group, Params)> {
    let mut rows = Vec::new();
    for m in 2..=max_n / 2 {
        rows.push((Group::SU, Params::m(m)));
    }
    for m in (4..=max_n / 2).step_by(4) {
        rows.push((Group::SUxZ2, Params::m(m)));
    }
    for m in 1..=max_n / 4 {
        rows.push((Group::Sp, Params::m(m)));
    }
    for m in 1..=max_n / 4 {
        for d in (3..=m + 1).step_by(2) {
            if (m + 1) % d == 0 {
                rows.push((Group::SpxZd, Params::md(m, d)));
            }
        }
    }
    if max_n >= 8 {
        rows.push((Group::Spin7, Params::default()));
    }
    if max_n >= 7 {
        rows.push((Group::G2, Params::default()));
    }
    rows
}

/// One computed table row.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub hol0: String,
    pub n: usize,
    pub group: String,
    pub valid_lifts: usize,
    pub structure_count: usize,
    /// Parallel spinor count of each valid lift.
    pub n_per_lift: Vec<usize>,
    pub reference: Option<ReferenceValue>,
    pub conditions: &'static str,
    pub compact: bool,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

/// Whether a computed report agrees with the stated table value.
pub fn matches_reference(report: &CriterionReport, reference: &ReferenceValue) -> bool {
    let counts = report.valid_counts();
    let carrying: Vec<usize> = counts.iter().copied().filter(|&c| c >= 1).collect();
    report.structure_count == reference.structures
        && carrying.len() == reference.structures
        && carrying.iter().all(|&c| c == reference.n)
        && (reference.structures == 0 || counts.len() == reference.structures)
}

/// Evaluate one catalog row.
pub fn evaluate_row(group: Group, p: &Params, tol: &Tolerances) -> TableRow {
    let exp = expectation(group, p);
    let label = group_label(group, p);
    let result =
        catalog_spec(group, p).and_then(|spec| check_criterion_with(&spec, &build_gammas(spec.n)?, tol));
    match result {
        Ok(report) => TableRow {
            hol0: exp.hol0.clone(),
            n: report.spec.n,
            group: label,
            valid_lifts: report.valid_lifts(),
            structure_count: report.structure_count,
            n_per_lift: report.valid_counts(),
            matched: exp
                .reference
                .as_ref()
                .is_some_and(|pv| matches_reference(&report, pv)),
            reference: exp.reference,
            conditions: exp.conditions,
            compact: exp.compact,
            diagnostics: None,
        },
        Err(e) => TableRow {
            hol0: exp.hol0.clone(),
            n: 0,
            group: label,
            valid_lifts: 0,
            structure_count: 0,
            n_per_lift: Vec::new(),
            matched: false,
            reference: exp.reference,
            conditions: exp.conditions,
            compact: exp.compact,
            diagnostics: Some(e.to_string()),
        },
    }
}

/// Compute every table row up to `max_n`.
pub fn table_report(max_n: usize, tol: &Tolerances) -> Result<Vec<TableRow>> {
    if max_n > MAX_DIM {
        return Err(SpinError::DimensionOutOfRange(max_n));
    }
    tol.validate()?;
    Ok(table_rows(max_n)
        .into_par_iter()
        .map(|(g, p)| evaluate_row(g, &p, tol))
        .collect())
}

/// Fixed-width text rendering of table rows.
pub fn render_table(rows: &[TableRow]) -> String {
    let header = [
        "Hol_0",
        "dim",
        "Hol",
        "N",
        "ref N",
        "conditions",
        "compact",
        "match",
    ];
    let cells: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            let n = if r.n_per_lift.is_empty() {
                "-".to_string()
            } else {
                r.n_per_lift
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let reference = match &r.reference {
                Some(pv) => vec![pv.n.to_string(); pv.structures].join(", "),
                None => "-".into(),
            };
            [
                r.hol0.clone(),
                r.n.to_string(),
                r.group.clone(),
                n,
                reference,
                r.conditions.to_string(),
                if r.compact { "yes" } else { "no" }.into(),
                match (&r.diagnostics, r.matched) {
                    (Some(d), _) => format!("FAIL ({d})"),
                    (None, true) => "ok".into(),
                    (None, false) => "FAIL".into(),
                },
            ]
        })
        .collect();
    let mut width = header.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |row: &[String]| -> String {
        let parts: Vec<String> = row.iter().zip(&width).map(|(c, &w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&line(&header.map(String::from)));
    out.push('\n');
    out.push_str(&line(&width.map(|w| "-".repeat(w))));
    out.push('\n');
    for row in &cells {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::check_criterion;
    use crate::linalg::{commutator, expm, orthogonality_residual};

    #[test]
    fn labels_round_trip() {
        for g in Group::ALL {
            assert_eq!(g.name().parse::<Group>().unwrap(), g);
        }
        for g in GammaType::ALL {
            assert_eq!(g.name().parse::<GammaType>().unwrap(), g);
        }
        assert!("SUxZ3".parse::<Group>().is_err());
    }

    #[test]
    fn central_generator_lies_in_sp_and_exponentiates_to_minus_one() {
        for m in 1..=3 {
            let k = sp_central_generator(m);
            let span = sp(m).unwrap();
            let probe = crate::lie::SubalgebraBasis::from_matrices(4 * m, "K", vec![k.clone()]).unwrap();
            assert!(span.containment_residual(&probe) < 1e-12);
            let e = expm(&(&k * PI));
            assert!((e + RMatrix::identity(4 * m, 4 * m)).amax() < 1e-12);
        }
    }

    #[test]
    fn quaternion_action_commutes_with_sp() {
        let m = 2;
        let cs = ComplexStructurePair::quaternionic(m);
        let q = quaternion_action(&cs, [0.5, 0.5, 0.5, 0.5]);
        assert!(orthogonality_residual(&q) < 1e-14);
        for a in &sp(m).unwrap().basis {
            assert!(commutator(a, &q).amax() < 1e-12);
        }
    }

    #[test]
    fn quaternion_action_is_multiplicative() {
        let cs = ComplexStructurePair::quaternionic(1);
        let p = [0.5, 0.5, -0.5, 0.5];
        let q = [0.0, 0.6, 0.0, 0.8];
        let lhs = quaternion_action(&cs, qmul(p, q));
        let rhs = quaternion_action(&cs, p) * quaternion_action(&cs, q);
        assert!((lhs - rhs).amax() < 1e-14);
    }

    /// Order of the group generated by the given matrices, by closure.
    fn group_order(gens: &[RMatrix]) -> usize {
        let n = gens[0].nrows();
        let mut elems = vec![RMatrix::identity(n, n)];
        let mut frontier = elems.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for x in &frontier {
                for g in gens {
                    let y = x * g;
                    if !elems.iter().any(|e| (e - &y).amax() < 1e-9) {
                        elems.push(y.clone());
                        next.push(y);
                    }
                }
            }
            assert!(elems.len() <= 1000);
            frontier = next;
        }
        elems.len()
    }

    #[test]
    fn gamma_generators_produce_groups_of_the_right_order() {
        let cases = [
            (GammaType::Cyclic, Some(3), 6),
            (GammaType::Dihedral, Some(2), 8),
            (GammaType::Dihedral, Some(3), 12),
            (GammaType::Tetrahedral, None, 24),
            (GammaType::Octahedral, None, 48),
            (GammaType::Icosahedral, None, 120),
        ];
        for (gamma, d, order) in cases {
            let spec = catalog_spec(Group::SpGamma, &Params::gamma(1, gamma, d)).unwrap();
            spec.validate().unwrap();
            let gens: Vec<RMatrix> = spec.discrete_gens.iter().map(|g| g.matrix.clone()).collect();
            assert_eq!(group_order(&gens), order, "{gamma:?}");
        }
    }

    #[test]
    fn conjugation_spec_for_m4() {
        let spec = catalog_spec(Group::SUxZ2, &Params::m(4)).unwrap();
        assert_eq!(spec.n, 8);
        assert_eq!(spec.connected_part.len(), 15);
        assert_eq!(spec.discrete_gens.len(), 1);
        assert_eq!(spec.discrete_gens[0].order, 2);
        spec.validate().unwrap();
    }

    #[test]
    fn product_spec_for_m2_d3() {
        let spec = catalog_spec(Group::SpxZd, &Params::md(2, 3)).unwrap();
        assert_eq!(spec.connected_part.len(), 10);
        assert_eq!(spec.discrete_gens[0].order, 3);
        spec.validate().unwrap();
    }

    #[test]
    fn dihedral_spec_has_two_generators() {
        let spec = catalog_spec(Group::SpGamma, &Params::gamma(2, GammaType::Dihedral, Some(2))).unwrap();
        assert_eq!(spec.connected_part.len(), 10);
        assert_eq!(spec.discrete_gens.len(), 2);
        spec.validate().unwrap();
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let err = catalog_spec(Group::SpxZd, &Params::md(2, 2)).unwrap_err();
        assert!(err.to_string().contains("d must be odd"));
        assert!(matches!(
            catalog_spec(Group::SUxZ2, &Params::m(3)),
            Err(SpinError::InvalidParameter(_))
        ));
        assert!(matches!(
            catalog_spec(Group::SpGamma, &Params::gamma(2, GammaType::Infinite, None)),
            Err(SpinError::Unsupported(_))
        ));
        assert!(catalog_spec(Group::SU, &Params::default()).is_err());
        assert!(catalog_spec(Group::Sp, &Params::m(6)).is_err());
    }

    #[test]
    fn table_slices_have_the_listed_rows() {
        let labels = |max_n| -> Vec<String> {
            table_rows(max_n)
                .iter()
                .map(|(g, p)| group_label(*g, p))
                .collect()
        };
        assert_eq!(labels(4), vec!["SU_2", "Sp_1"]);
        assert_eq!(
            labels(8),
            vec![
                "SU_2",
                "SU_3",
                "SU_4",
                "SU_4⋊Z_2",
                "Sp_1",
                "Sp_2",
                "Sp_2×Z_3",
                "Spin_7",
                "G_2"
            ]
        );
        let l16 = labels(16);
        assert_eq!(l16.len(), 17);
        for want in ["Sp_3", "Sp_4", "SU_8⋊Z_2", "Sp_4×Z_5"] {
            assert!(l16.iter().any(|l| l == want), "{want}");
        }
        assert!(labels(20).iter().any(|l| l == "Sp_5×Z_3"));
    }

    #[test]
    fn small_table_matches() {
        let rows = table_report(4, &Tolerances::default()).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!(r.matched, "{r:?}");
            assert_eq!(r.n_per_lift, vec![2]);
        }
        let text = render_table(&rows);
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("Hol_0"));
    }

    #[test]
    fn conjugation_lifts_depend_on_m_mod_4() {
        let r = check_criterion(&catalog_spec(Group::SUxZ2, &Params::m(2)).unwrap()).unwrap();
        assert_eq!(r.valid_lifts(), 0);
        assert!(!r.admits_parallel_spinor);
        let r = check_criterion(&catalog_spec(Group::SUxZ2, &Params::m(4)).unwrap()).unwrap();
        assert_eq!(r.valid_lifts(), 2);
        assert_eq!(r.valid_counts(), vec![1, 1]);
    }

    #[test]
    fn out_of_conditions_row_is_computed_but_not_asserted() {
        let p = Params::md(3, 3);
        let e = expectation(Group::SpxZd, &p);
        assert!(!e.within_conditions);
        assert!(e.reference.is_none());
        let row = evaluate_row(Group::SpxZd, &p, &Tolerances::default());
        assert!(row.diagnostics.is_none());
        assert_eq!(row.valid_lifts, 1);
        assert!(!row.matched);
    }
}
