//! Sparse multivectors in the Clifford algebra `Cl(0, n)`, where every basis
//! vector squares to `-1`.
//!
//! Blades are encoded as bitmasks: bit `i` set means the factor `e_{i+1}` is
//! present, and factors are always kept in ascending order. The even unit
//! multivectors form `Spin(n)`, so equality of group elements is decided
//! here, coefficient by coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::MAX_DIM;

/// Coefficients with magnitude below this are dropped after every product.
pub const PRUNE_EPS: f64 = 1e-14;

/// Tolerance used when checking evenness and unit norm of lifts.
pub const UNIT_TOL: f64 = 1e-9;

// Above this many pairwise blade products, accumulate into a dense buffer
// indexed by mask instead of an ordered map.
const DENSE_THRESHOLD: usize = 1 << 14;

/// Sign picked up when multiplying blade `a` by blade `b` in `Cl(0, n)`:
/// one factor of `-1` per transposition needed to sort the factors, and one
/// per repeated generator (since `e_i e_i = -1`).
#[inline]
pub fn blade_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^(k(k-1)/2)` for a blade of grade `k`.
#[inline]
pub fn reversal_sign(mask: u32) -> f64 {
    let k = mask.count_ones();
    if (k * k.saturating_sub(1) / 2) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, PartialEq)]
pub struct Multivector {
    n: usize,
    terms: BTreeMap<u32, Complex64>,
}

impl Multivector {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn scalar(n: usize, value: f64) -> Result<Self> {
        Self::blade(n, 0, Complex64::new(value, 0.0))
    }

    /// A single blade `coeff * e_mask`.
    pub fn blade(n: usize, mask: u32, coeff: Complex64) -> Result<Self> {
        check_dim(n)?;
        check_mask(n, mask)?;
        let mut terms = BTreeMap::new();
        if coeff.norm() >= PRUNE_EPS {
            terms.insert(mask, coeff);
        }
        Ok(Self { n, terms })
    }

    /// Basis vector `e_{index+1}` (zero-based index).
    pub fn basis_vector(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(SpinError::InvalidParameter(format!(
                "basis index {index} out of range for n = {n}"
            )));
        }
        Self::blade(n, 1 << index, Complex64::new(1.0, 0.0))
    }

    /// The grade-1 element `sum_i v_i e_{i+1}`.
    pub fn vector(v: &[f64]) -> Result<Self> {
        let n = v.len();
        check_dim(n)?;
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() >= PRUNE_EPS)
            .map(|(i, &c)| (1u32 << i, Complex64::new(c, 0.0)))
            .collect();
        Ok(Self { n, terms })
    }

    /// Build from raw `(mask, coefficient)` pairs; repeated masks are summed.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (u32, Complex64)>) -> Result<Self> {
        check_dim(n)?;
        let mut map = BTreeMap::new();
        for (mask, c) in terms {
            check_mask(n, mask)?;
            *map.entry(mask).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c: &mut Complex64| c.norm() >= PRUNE_EPS);
        Ok(Self { n, terms: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u32) -> Complex64 {
        self.terms.get(&mask).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeff(0)
    }

    /// Euclidean norm of the odd-grade coefficients.
    pub fn odd_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| m.count_ones() & 1 == 1)
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_even(&self, tol: f64) -> bool {
        self.odd_norm() <= tol
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(&m, &c)| (m, -c)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&m, &c)| (m, c * s))
            .filter(|(_, c)| c.norm() >= PRUNE_EPS)
            .collect();
        Self { n: self.n, terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        let mut terms = self.terms.clone();
        for (&m, &c) in &other.terms {
            *terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        terms.retain(|_, c| c.norm() >= PRUNE_EPS);
        Ok(Self { n: self.n, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Largest coefficient difference over all blades.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_dim(self, other)?;
        let mut worst = 0.0f64;
        for (&m, &c) in &self.terms {
            worst = worst.max((c - other.coeff(m)).norm());
        }
        for (&m, &c) in &other.terms {
            if !self.terms.contains_key(&m) {
                worst = worst.max(c.norm());
            }
        }
        Ok(worst)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// `self^k` for `k >= 0` by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self {
            n: self.n,
            terms: BTreeMap::from([(0, Complex64::new(1.0, 0.0))]),
        };
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = product(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = product(&base, &base);
            }
        }
        result
    }

    /// Inverse of a versor: `reverse(x) / (x reverse(x))`, where the
    /// denominator is read off as a scalar.
    pub fn versor_inverse(&self) -> Result<Self> {
        let rev = reversal(self);
        let norm = scalar_part_of_product(self, &rev);
        if norm.norm() < UNIT_TOL {
            return Err(SpinError::NotUnit(1.0));
        }
        Ok(rev.scale(norm.inv()))
    }

    /// Integer power allowing negative exponents for versors.
    pub fn powi(&self, k: i32) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.versor_inverse()?.pow(k.unsigned_abs()))
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(SpinError::DimensionOutOfRange(n))
    } else {
        Ok(())
    }
}

fn check_mask(n: usize, mask: u32) -> Result<()> {
    if n < 32 && mask >> n != 0 {
        Err(SpinError::InvalidParameter(format!(
            "blade mask {mask:#b} does not fit in {n} bits"
        )))
    } else {
        Ok(())
    }
}

fn same_dim(a: &Multivector, b: &Multivector) -> Result<()> {
    if a.n != b.n {
        Err(SpinError::DimensionMismatch {
            expected: a.n,
            got: b.n,
        })
    } else {
        Ok(())
    }
}

/// Geometric product in `Cl(0, n)`.
pub fn geometric_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    same_dim(a, b)?;
    Ok(product(a, b))
}

fn product(a: &Multivector, b: &Multivector) -> Multivector {
    let n = a.n;
    let pairs = a.terms.len() * b.terms.len();
    let terms = if pairs > DENSE_THRESHOLD {
        let rhs: Vec<(u32, Complex64)> = b.terms().collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); 1usize << n];
        for (&ma, &ca) in &a.terms {
            for &(mb, cb) in &rhs {
                buf[(ma ^ mb) as usize] += ca * cb * blade_sign(ma, mb);
            }
        }
        buf.into_iter()
            .enumerate()
            .filter(|(_, c)| c.norm() >= PRUNE_EPS)
            .map(|(m, c)| (m as u32, c))
            .collect()
    } else {
        let rhs: Vec<(u32, Complex64)> = b.terms().collect();
        let mut map: BTreeMap<u32, Complex64> = BTreeMap::new();
        for (&ma, &ca) in &a.terms {
            for &(mb, cb) in &rhs {
                *map.entry(ma ^ mb).or_insert(Complex64::new(0.0, 0.0)) += ca * cb * blade_sign(ma, mb);
            }
        }
        map.retain(|_, c| c.norm() >= PRUNE_EPS);
        map
    };
    Multivector { n, terms }
}

/// Reverse the order of factors in every blade.
pub fn reversal(a: &Multivector) -> Multivector {
    Multivector {
        n: a.n,
        terms: a.terms.iter().map(|(&m, &c)| (m, c * reversal_sign(m))).collect(),
    }
}

/// Scalar part of `a * b` without forming the full product.
pub fn scalar_part_of_product(a: &Multivector, b: &Multivector) -> Complex64 {
    a.terms
        .iter()
        .filter_map(|(&m, &ca)| b.terms.get(&m).map(|&cb| ca * cb * blade_sign(m, m)))
        .sum()
}

/// Grade-1 part of `a * b`, as complex coefficients of `e_1 .. e_n`.
pub fn vector_part_of_product(a: &Multivector, b: &Multivector) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.n];
    for (&ma, &ca) in &a.terms {
        for (k, slot) in out.iter_mut().enumerate() {
            let mb = ma ^ (1u32 << k);
            if let Some(&cb) = b.terms.get(&mb) {
                *slot += ca * cb * blade_sign(ma, mb);
            }
        }
    }
    out
}

/// Check that `x` is even and `x reverse(x) = +-1`; returns that sign.
pub fn check_even_unit(x: &Multivector) -> Result<f64> {
    let odd = x.odd_norm();
    if odd > UNIT_TOL {
        return Err(SpinError::NotEven(odd));
    }
    let rev = reversal(x);
    let s = scalar_part_of_product(x, &rev);
    let sign = if s.re >= 0.0 { 1.0 } else { -1.0 };
    let mut dev = (s - Complex64::new(sign, 0.0)).norm();
    // The non-scalar part of x*rev(x) is only affordable for moderate sizes;
    // for versors it vanishes identically.
    if x.len() <= 4096 {
        let full = product(x, &rev);
        let rest = full
            .terms
            .iter()
            .filter(|(&m, _)| m != 0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        dev = dev.max(rest);
    }
    if dev > UNIT_TOL {
        return Err(SpinError::NotUnit(dev));
    }
    Ok(sign)
}

/// Twisted adjoint action `v -> x v x^{-1}` of an even unit `x` on `R^n`.
pub fn twisted_adjoint(x: &Multivector, v: &[f64]) -> Result<Vec<f64>> {
    Ok(twisted_adjoint_all(x, std::slice::from_ref(&v.to_vec()))?.remove(0))
}

/// [`twisted_adjoint`] applied to several vectors, checking `x` once.
pub fn twisted_adjoint_all(x: &Multivector, vs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if let Some(v) = vs.iter().find(|v| v.len() != x.n) {
        return Err(SpinError::DimensionMismatch {
            expected: x.n,
            got: v.len(),
        });
    }
    let sign = check_even_unit(x)?;
    let rev = reversal(x);
    vs.iter()
        .map(|v| {
            let xv = product(x, &Multivector::vector(v)?);
            Ok(vector_part_of_product(&xv, &rev)
                .into_iter()
                .map(|c| c.re * sign)
                .collect())
        })
        .collect()
}

/// Ordered list of `+-1` choices, one per discrete generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignAssignment(Vec<i8>);

impl SignAssignment {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(SpinError::InvalidParameter(
                "sign assignment entries must be +1 or -1".into(),
            ));
        }
        Ok(Self(signs))
    }

    /// All `2^k` assignments; bit `i` of the index flips generator `i`.
    pub fn all(k: usize) -> Vec<Self> {
        (0..1usize << k)
            .map(|idx| Self((0..k).map(|i| if idx >> i & 1 == 1 { -1 } else { 1 }).collect()))
            .collect()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    mask: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MultivectorJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for Multivector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MultivectorJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(&mask, c)| TermJson {
                    mask,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MultivectorJson::deserialize(d)?;
        Multivector::from_terms(
            raw.n,
            raw.terms
                .into_iter()
                .map(|t| (t.mask, Complex64::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector(n={}, {})", self.n, self)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if m != 0 {
                write!(f, "e")?;
                for bit in 0..32 {
                    if m >> bit & 1 == 1 {
                        write!(f, "{}", bit + 1)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Multivector {
        Multivector::basis_vector(n, i).unwrap()
    }

    fn s(n: usize, v: f64) -> Multivector {
        Multivector::scalar(n, v).unwrap()
    }

    #[test]
    fn generators_square_to_minus_one() {
        let e1 = e(3, 0);
        assert_eq!(geometric_product(&e1, &e1).unwrap(), s(3, -1.0));
    }

    #[test]
    fn generators_anticommute() {
        let (e1, e2) = (e(3, 0), e(3, 1));
        let e12 = Multivector::blade(3, 0b11, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(geometric_product(&e1, &e2).unwrap(), e12);
        assert_eq!(geometric_product(&e2, &e1).unwrap(), e12.neg());
        assert_eq!(geometric_product(&e12, &e12).unwrap(), s(3, -1.0));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = geometric_product(&e(3, 0), &e(4, 0)).unwrap_err();
        assert_eq!(err, SpinError::DimensionMismatch { expected: 3, got: 4 });
    }

    #[test]
    fn reversal_signs_by_grade() {
        let e1 = e(3, 0);
        assert_eq!(reversal(&e1), e1);
        let e12 = geometric_product(&e(3, 0), &e(3, 1)).unwrap();
        let e21 = geometric_product(&e(3, 1), &e(3, 0)).unwrap();
        assert_eq!(reversal(&e12), e21);
        let x = s(3, 1.0)
            .add(&Multivector::blade(3, 0b111, Complex64::new(1.0, 0.0)).unwrap())
            .unwrap();
        let expect = s(3, 1.0)
            .sub(&Multivector::blade(3, 0b111, Complex64::new(1.0, 0.0)).unwrap())
            .unwrap();
        assert_eq!(reversal(&x), expect);
    }

    #[test]
    fn rotor_rotates_in_its_plane() {
        let theta = 0.7f64;
        let x = Multivector::from_terms(
            3,
            [
                (0, Complex64::new((theta / 2.0).cos(), 0.0)),
                (0b11, Complex64::new((theta / 2.0).sin(), 0.0)),
            ],
        )
        .unwrap();
        let out = twisted_adjoint(&x, &[1.0, 0.0, 0.0]).unwrap();
        // Oracle: 2x2 rotation matrix applied to e_1.
        let expect = [theta.cos(), theta.sin(), 0.0];
        for (a, b) in out.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14, "{out:?}");
        }
        let fixed = twisted_adjoint(&x, &[0.0, 0.0, 1.0]).unwrap();
        assert!((fixed[2] - 1.0).abs() < 1e-14 && fixed[0].abs() < 1e-14);
    }

    #[test]
    fn identity_and_bivector_adjoint() {
        assert_eq!(
            twisted_adjoint(&s(3, 1.0), &[1.0, 0.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let e12 = geometric_product(&e(3, 0), &e(3, 1)).unwrap();
        let v = twisted_adjoint(&e12, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(v, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn twisted_adjoint_rejects_odd_and_non_unit() {
        assert!(matches!(
            twisted_adjoint(&e(3, 0), &[1.0, 0.0, 0.0]),
            Err(SpinError::NotEven(_))
        ));
        assert!(matches!(
            twisted_adjoint(&s(3, 2.0), &[1.0, 0.0, 0.0]),
            Err(SpinError::NotUnit(_))
        ));
    }

    #[test]
    fn blade_mask_must_fit() {
        assert!(Multivector::blade(3, 0b1000, Complex64::new(1.0, 0.0)).is_err());
        assert!(Multivector::zero(0).is_err());
        assert!(Multivector::zero(MAX_DIM + 1).is_err());
    }

    #[test]
    fn sign_assignments_enumerate_all_choices() {
        let all = SignAssignment::all(2);
        assert_eq!(all.len(), 4);
        assert_eq!(all[0].signs(), &[1, 1]);
        assert_eq!(all[3].signs(), &[-1, -1]);
        assert!(SignAssignment::new(vec![1, 0]).is_err());
    }

    #[test]
    fn json_shape() {
        let x = Multivector::from_terms(2, [(0, Complex64::new(0.5, 0.0)), (3, Complex64::new(0.0, -1.0))])
            .unwrap();
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(
            js,
            r#"{"n":2,"terms":[{"mask":0,"re":0.5,"im":0.0},{"mask":3,"re":0.0,"im":-1.0}]}"#
        );
        let back: Multivector = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn dense_and_sparse_products_agree() {
        // 10 generic unit vectors in n = 10 produce a dense even element; squaring it
        // takes the dense accumulation path.
        let mut x = s(10, 1.0);
        for k in 0..10 {
            let v: Vec<f64> = (0..10)
                .map(|i| (((i + 1) * (k + 2)) as f64 * 1.3 + (i * i) as f64).sin())
                .collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let v: Vec<f64> = v.iter().map(|a| a / norm).collect();
            x = product(&x, &Multivector::vector(&v).unwrap());
        }
        assert!(x.len() * x.len() > DENSE_THRESHOLD);
        let dense = product(&x, &x);
        let mut map: BTreeMap<u32, Complex64> = BTreeMap::new();
        for (ma, ca) in x.terms() {
            for (mb, cb) in x.terms() {
                *map.entry(ma ^ mb).or_default() += ca * cb * blade_sign(ma, mb);
            }
        }
        let sparse = Multivector::from_terms(10, map).unwrap();
        assert!(dense.approx_eq(&sparse, 1e-12));
    }
}
