//! Float-mode front end: LLL reduction and integer-relation detection.
//!
//! LLL here is the all-integer variant (Cohen, Algorithm 2.6.7): Gram–Schmidt
//! data is kept as the integers d_i and λ_{i,j} = d_j·μ_{i,j}, so the
//! reduction is exact on arbitrary-precision input.
//!
//! Everything produced from floats is a heuristic. A found relation is only
//! numerical evidence of rational dependence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::dimension::RationalStructure;
use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("lattice basis is rank deficient")]
    RankDeficient,
    #[error("LLL parameter δ = {0} outside (1/4, 1]")]
    InvalidDelta(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("non-finite input value")]
    NonFinite,
}

/// Lattice basis, one vector per entry of `vectors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub vectors: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn new(vectors: Vec<Vec<BigInt>>) -> Self {
        Self { vectors }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to num/den (den > 0), ties rounded up.
fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    (num * BigInt::from(2) + den).div_floor(&(den * BigInt::from(2)))
}

pub fn delta_to_rational(delta: f64) -> Result<Rational, RelationError> {
    if !(delta > 0.25 && delta <= 1.0) {
        return Err(RelationError::InvalidDelta(delta.to_string()));
    }
    Rational::from_f64(delta).ok_or_else(|| RelationError::InvalidDelta(delta.to_string()))
}

struct Lll {
    b: Vec<Vec<BigInt>>,
    // d[0] = 1, d[i + 1] = Π_{j ≤ i} |b*_j|².
    d: Vec<BigInt>,
    // lambda[i][j] for j < i.
    lambda: Vec<Vec<BigInt>>,
}

impl Lll {
    fn reduce(&mut self, k: usize, l: usize) {
        let dl = &self.d[l + 1];
        if (&self.lambda[k][l] * BigInt::from(2)).abs() > *dl {
            let q = round_div(&self.lambda[k][l], dl);
            let bl = self.b[l].clone();
            for (x, y) in self.b[k].iter_mut().zip(&bl) {
                *x -= &q * y;
            }
            self.lambda[k][l] -= &q * dl;
            for i in 0..l {
                let delta = &q * &self.lambda[l][i];
                self.lambda[k][i] -= delta;
            }
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 0..k - 1 {
            let tmp = std::mem::take(&mut self.lambda[k][j]);
            self.lambda[k][j] = std::mem::replace(&mut self.lambda[k - 1][j], tmp);
        }
        let lam = self.lambda[k][k - 1].clone();
        // d indices shifted by one: d_k is self.d[k + 1].
        let big_b = (&self.d[k - 1] * &self.d[k + 1] + &lam * &lam) / &self.d[k];
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            self.lambda[i][k] = (&self.d[k + 1] * &self.lambda[i][k - 1] - &lam * &t) / &self.d[k];
            self.lambda[i][k - 1] = (&big_b * &t + &lam * &self.lambda[i][k]) / &self.d[k + 1];
        }
        self.d[k] = big_b;
    }
}

/// LLL-reduces `basis` with parameter δ ∈ (1/4, 1]. The output spans the
/// same lattice, is size-reduced (|μ_{i,j}| ≤ 1/2) and satisfies the Lovász
/// condition with δ.
pub fn lll_reduce(basis: &LatticeBasis, delta: f64) -> Result<LatticeBasis, RelationError> {
    let delta = delta_to_rational(delta)?;
    let (dn, dd) = (delta.numer().clone(), delta.denom().clone());
    let n = basis.len();
    if n == 0 {
        return Ok(basis.clone());
    }
    let mut s = Lll {
        b: basis.vectors.clone(),
        d: vec![BigInt::zero(); n + 1],
        lambda: vec![vec![BigInt::zero(); n]; n],
    };
    s.d[0] = BigInt::one();
    s.d[1] = dot(&s.b[0], &s.b[0]);
    if s.d[1].is_zero() {
        return Err(RelationError::RankDeficient);
    }
    if n == 1 {
        return Ok(basis.clone());
    }
    let mut k = 1;
    let mut kmax = 0;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&s.b[k], &s.b[j]);
                for i in 0..j {
                    u = (&s.d[i + 1] * &u - &s.lambda[k][i] * &s.lambda[j][i]) / &s.d[i];
                }
                if j < k {
                    s.lambda[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(RelationError::RankDeficient);
                    }
                    s.d[k + 1] = u;
                }
            }
        }
        loop {
            s.reduce(k, k - 1);
            // Lovász: d_k·d_{k−2} ≥ δ·d_{k−1}² − λ², scaled by dd.
            let lam = &s.lambda[k][k - 1];
            let lhs = &dd * (&s.d[k + 1] * &s.d[k - 1] + lam * lam);
            let rhs = &dn * &s.d[k] * &s.d[k];
            if lhs < rhs {
                s.swap(k, kmax);
                if k > 1 {
                    k -= 1;
                }
            } else {
                for l in (0..k - 1).rev() {
                    s.reduce(k, l);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(LatticeBasis { vectors: s.b })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationParams {
    /// Inputs are scaled by 10^scale_digits before rounding.
    pub scale_digits: u32,
    /// Largest admissible |c_i|.
    pub max_coeff: u64,
    pub delta: f64,
}

impl Default for RelationParams {
    fn default() -> Self {
        Self {
            scale_digits: 12,
            max_coeff: 1_000_000,
            delta: 0.99,
        }
    }
}

/// Certified residual bound: |Σ c_i X_i| ≤ SAFETY·‖c‖₁ where X_i are the
/// scaled, rounded inputs.
const SAFETY: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RelationResult {
    /// Primitive, first nonzero entry positive.
    pub coefficients: Vec<BigInt>,
    /// |Σ c_i x_i| evaluated exactly on the f64 inputs, rounded to f64.
    pub residual: f64,
}

fn scaled(x: f64, digits: u32) -> Result<BigInt, RelationError> {
    let exact = Rational::from_f64(x).ok_or(RelationError::NonFinite)?;
    let scaled = exact * Rational::from_integer(BigInt::from(10u32).pow(digits));
    Ok(round_div(scaled.numer(), scaled.denom()))
}

fn exact_residual(xs: &[f64], c: &[BigInt]) -> Rational {
    xs.iter()
        .zip(c)
        .map(|(&x, ci)| Rational::from_f64(x).expect("finite") * Rational::from_integer(ci.clone()))
        .sum::<Rational>()
        .abs()
}

fn normalize(mut c: Vec<BigInt>) -> Vec<BigInt> {
    let g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        c.iter_mut().for_each(|x| *x /= &g);
    }
    if c.iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        c.iter_mut().for_each(|x| *x = -&*x);
    }
    c
}

/// `true` when c certifies as a relation of `xs` at scale 10^digits.
pub fn certifies(xs: &[f64], c: &[BigInt], digits: u32) -> bool {
    let l1: BigInt = c.iter().map(|x| x.abs()).sum();
    if l1.is_zero() {
        return false;
    }
    let scaled_residual =
        exact_residual(xs, c) * Rational::from_integer(BigInt::from(10u32).pow(digits));
    scaled_residual <= Rational::from_integer(l1 * SAFETY)
}

/// LLL-reduced vectors of the relation lattice at scale 10^s whose trailing
/// entry certifies |Σ c_i X_i| ≤ 2‖c‖₁ and whose entries are bounded by
/// `max_coeff`, shortest first.
fn relation_candidates(
    xs: &[f64],
    params: &RelationParams,
) -> Result<Vec<Vec<BigInt>>, RelationError> {
    let n = xs.len();
    let scaled_xs = xs
        .iter()
        .map(|&x| scaled(x, params.scale_digits))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = vec![BigInt::zero(); n + 1];
            row[i] = BigInt::one();
            row[n] = scaled_xs[i].clone();
            row
        })
        .collect();
    let reduced = lll_reduce(&LatticeBasis::new(rows), params.delta)?;
    let cap = BigInt::from(params.max_coeff);
    let mut out: Vec<(BigInt, Vec<BigInt>)> = reduced
        .vectors
        .iter()
        .filter_map(|v| {
            let c = &v[..n];
            let l1: BigInt = c.iter().map(|x| x.abs()).sum();
            let certified = !l1.is_zero() && v[n].abs() <= l1 * SAFETY;
            let bounded = c.iter().all(|x| x.abs() <= cap);
            (certified && bounded).then(|| (c.iter().map(|x| x * x).sum::<BigInt>(), c.to_vec()))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, c)| normalize(c)).collect())
}

fn to_result(xs: &[f64], coefficients: Vec<BigInt>) -> RelationResult {
    let residual = exact_residual(xs, &coefficients)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    RelationResult {
        coefficients,
        residual,
    }
}

/// Searches for a nonzero integer vector c with Σ c_i x_i ≈ 0.
///
/// Builds the lattice spanned by (e_i, round(10^s·x_i)), LLL-reduces it and
/// returns the shortest reduced vector that certifies. `Ok(None)` means no
/// admissible relation was found.
pub fn find_integer_relation(
    xs: &[f64],
    params: &RelationParams,
) -> Result<Option<RelationResult>, RelationError> {
    assert!(xs.len() >= 2, "need at least two values");
    Ok(relation_candidates(xs, params)?
        .into_iter()
        .next()
        .map(|c| to_result(xs, c)))
}

/// Digits dropped when searching, relative to the certification scale.
/// A generic lattice vector found at the coarse scale fails the fine-scale
/// check by a factor of about 10^GUARD_DIGITS.
const GUARD_DIGITS: u32 = 4;

/// Floating counterpart of the exact dependence scan on {1, α_1, …, α_q}.
///
/// For each coordinate in turn, a relation between it and the values
/// already kept is searched at scale 10^(s−4) and accepted only if it also
/// certifies at the configured scale 10^s. Accepted relations give t and γ;
/// otherwise the coordinate joins I_k.
pub fn numeric_rational_structure(
    coords: &[Vec<f64>],
    params: &RelationParams,
) -> Result<Vec<RationalStructure>, RelationError> {
    let search = RelationParams {
        scale_digits: params.scale_digits.saturating_sub(GUARD_DIGITS).max(1),
        ..*params
    };
    coords
        .iter()
        .map(|alpha| {
            if alpha.iter().any(|x| !x.is_finite()) {
                return Err(RelationError::NonFinite);
            }
            let mut kept_values = vec![1.0];
            let mut independent = Vec::new();
            let mut offsets = BTreeMap::new();
            let mut gamma: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
            for (j, &a) in alpha.iter().enumerate() {
                let mut xs = kept_values.clone();
                xs.push(a);
                let found = relation_candidates(&xs, &search)?
                    .into_iter()
                    .find(|c| certifies(&xs, c, params.scale_digits))
                    .map(|c| to_result(&xs, c));
                match found {
                    Some(rel) => {
                        let c_last = rel.coefficients.last().expect("nonempty").clone();
                        if c_last.is_zero() {
                            return Err(RelationError::PrecisionExhausted(format!(
                                "relation among values taken as independent while scanning coordinate {j}"
                            )));
                        }
                        let denom = Rational::from_integer(-c_last);
                        let ratio = |c: &BigInt| Rational::from_integer(c.clone()) / &denom;
                        offsets.insert(j, ratio(&rel.coefficients[0]));
                        gamma.insert(j, rel.coefficients[1..xs.len() - 1].iter().map(ratio).collect());
                    }
                    None => {
                        independent.push(j);
                        kept_values.push(a);
                    }
                }
            }
            // Coordinates kept after j carry zero weight in γ_j.
            for row in gamma.values_mut() {
                row.resize(independent.len(), Rational::zero());
            }
            Ok(RationalStructure {
                independent,
                offsets,
                gamma,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_is_already_reduced() {
        let id = LatticeBasis::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(lll_reduce(&id, 0.99).unwrap(), id);
    }

    #[test]
    fn skewed_2d_basis_is_reduced() {
        let b = LatticeBasis::from_i64(&[vec![1, 0], vec![1_000_003, 1]]);
        let out = lll_reduce(&b, 0.75).unwrap();
        let norms: Vec<BigInt> = out.vectors.iter().map(|v| dot(v, v)).collect();
        assert_eq!(norms[0], BigInt::one());
        assert_eq!(norms[1], BigInt::one());
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let b = LatticeBasis::from_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(lll_reduce(&b, 0.99), Err(RelationError::RankDeficient));
        let z = LatticeBasis::from_i64(&[vec![0, 0]]);
        assert_eq!(lll_reduce(&z, 0.99), Err(RelationError::RankDeficient));
    }

    #[test]
    fn delta_is_validated() {
        let id = LatticeBasis::from_i64(&[vec![1]]);
        assert!(matches!(
            lll_reduce(&id, 0.25),
            Err(RelationError::InvalidDelta(_))
        ));
        assert!(matches!(
            lll_reduce(&id, 1.5),
            Err(RelationError::InvalidDelta(_))
        ));
        assert!(lll_reduce(&id, 1.0).is_ok());
    }

    #[test]
    fn relation_examples() {
        let p = RelationParams {
            scale_digits: 10,
            ..RelationParams::default()
        };
        let rel = find_integer_relation(&[1.0, 1.41421356237309, 2.41421356237309], &p)
            .unwrap()
            .unwrap();
        assert_eq!(rel.coefficients, ints(&[1, 1, -1]));
        assert!(rel.residual < 1e-12);
        let rel = find_integer_relation(&[1.0, 1.61803398874989, 2.61803398874989], &p)
            .unwrap()
            .unwrap();
        assert_eq!(rel.coefficients, ints(&[1, 1, -1]));
    }

    #[test]
    fn two_independent_values_have_no_small_relation() {
        let p = RelationParams {
            max_coeff: 1000,
            ..RelationParams::default()
        };
        assert!(find_integer_relation(&[1.0, std::f64::consts::SQRT_2], &p)
            .unwrap()
            .is_none());
    }

    #[test]
    fn numeric_structure_examples() {
        let p = RelationParams::default();
        let s2 = std::f64::consts::SQRT_2;
        let s = numeric_rational_structure(&[vec![1.0, s2, 1.0]], &p).unwrap();
        assert_eq!(s[0].independent, vec![1]);
        assert_eq!(s[0].offsets[&0], rat(1, 1));
        assert_eq!(s[0].gamma[&2], vec![rat(0, 1)]);

        let s = numeric_rational_structure(&[vec![0.5, -3.0]], &p).unwrap();
        assert!(s[0].independent.is_empty());
        assert_eq!(s[0].offsets[&0], rat(1, 2));

        let s = numeric_rational_structure(&[vec![s2]], &p).unwrap();
        assert_eq!(s[0].independent, vec![0]);

        let s = numeric_rational_structure(&[vec![2.0 * s2, 2.0, 3.0 * s2]], &p).unwrap();
        assert_eq!(s[0].independent, vec![0]);
        assert_eq!(s[0].gamma[&2], vec![rat(3, 2)]);
    }

    #[test]
    fn normalize_makes_primitive_and_positive() {
        assert_eq!(normalize(ints(&[-2, 4, 0, -6])), ints(&[1, -2, 0, 3]));
        assert_eq!(normalize(ints(&[0, -3])), ints(&[0, 1]));
    }
}
