//! M_H from floating-point generators. Rational structure comes from
//! integer-relation detection, so every report here is heuristic.

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;

use super::{assemble, Coordinates, DenominatorMode, DimensionError, GroupSpec, MhReport};
use crate::qlinalg::rank_int;
use crate::relation::{numeric_rational_structure, RelationError, RelationParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatParams {
    pub relation: RelationParams,
    /// Singular values below this fraction of the largest count as zero.
    pub rank_tolerance: f64,
}

impl Default for FloatParams {
    fn default() -> Self {
        Self {
            relation: RelationParams::default(),
            rank_tolerance: 1e-9,
        }
    }
}

fn numeric_rank(cols: &[&Vec<f64>], n: usize, tol: f64) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let sv = m.svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Runs the float pipeline on the generators of `g`, each entry rounded to f64.
pub fn build_mh_numeric(g: &GroupSpec, params: &FloatParams) -> Result<MhReport, DimensionError> {
    let floats: Vec<Vec<f64>> = g
        .generators()
        .iter()
        .map(|u| u.iter().map(|x| x.to_f64()).collect())
        .collect();
    build_mh_from_floats(g.ambient_dim(), &floats, params)
}

/// Float pipeline on raw f64 generators. Forced I_k choices are not
/// supported here: the greedy relation scan decides every I_k.
pub fn build_mh_from_floats(
    ambient_dim: usize,
    generators: &[Vec<f64>],
    params: &FloatParams,
) -> Result<MhReport, DimensionError> {
    if ambient_dim == 0 || generators.is_empty() {
        return Err(DimensionError::InvalidSpec(
            "need a positive dimension and a generator".into(),
        ));
    }
    if let Some(k) = generators.iter().position(|u| u.len() != ambient_dim) {
        return Err(DimensionError::InvalidSpec(format!(
            "generator {k} has the wrong length"
        )));
    }
    if generators.iter().flatten().any(|x| !x.is_finite()) {
        return Err(RelationError::NonFinite.into());
    }
    let n = ambient_dim;
    let mut basis_indices: Vec<usize> = Vec::new();
    for k in 0..generators.len() {
        let mut trial: Vec<&Vec<f64>> = basis_indices.iter().map(|&b| &generators[b]).collect();
        trial.push(&generators[k]);
        if numeric_rank(&trial, n, params.rank_tolerance) == trial.len() {
            basis_indices.push(k);
        }
    }
    let q = basis_indices.len();
    let basis = DMatrix::from_fn(n, q, |i, j| generators[basis_indices[j]][i]);
    let svd = (q > 0).then(|| basis.clone().svd(true, true));

    let mut non_basis = Vec::new();
    let mut coords = Vec::new();
    for (k, u) in generators.iter().enumerate() {
        if basis_indices.contains(&k) {
            continue;
        }
        let alpha: Vec<f64> = match &svd {
            None => Vec::new(),
            Some(svd) => {
                let sol = svd
                    .solve(&DVector::from_column_slice(u), params.rank_tolerance)
                    .map_err(|e| DimensionError::InternalInvariantViolation(e.to_string()))?;
                sol.iter().copied().collect()
            }
        };
        non_basis.push(k);
        coords.push(alpha);
    }
    let structures = numeric_rational_structure(&coords, &params.relation)?;
    let entries = non_basis
        .iter()
        .zip(coords)
        .zip(structures)
        .map(|((&k, alpha), s)| (k, Coordinates::Approximate(alpha), s))
        .collect();
    let (data, mh) = assemble(q, entries, DenominatorMode::PerGenerator);

    // d_k·u_k ≈ Σ α_j·u'_j + Σ p_j·u_{b_j}, read in ambient coordinates.
    let scale = generators
        .iter()
        .flatten()
        .fold(1.0f64, |acc, x| acc.max(x.abs()));
    for item in &data {
        let Coordinates::Approximate(alpha) = &item.coords else {
            unreachable!("float pipeline");
        };
        let mut span_rhs = vec![0.0; q];
        for (j, col) in &item.u_prime {
            for (slot, c) in span_rhs.iter_mut().zip(col) {
                *slot += alpha[*j] * c.to_f64().unwrap_or(f64::NAN);
            }
        }
        for (&j, p) in &item.p_coeffs {
            span_rhs[j] += p.to_f64().unwrap_or(f64::NAN);
        }
        let d = item.denominator.to_f64().unwrap_or(f64::NAN);
        let rhs = &basis * DVector::from_vec(span_rhs);
        let err = (0..n)
            .map(|i| (d * generators[item.generator][i] - rhs[i]).abs())
            .fold(0.0f64, f64::max);
        let weight: f64 = item
            .u_prime
            .iter()
            .flat_map(|(_, c)| c)
            .map(|c| c.to_f64().unwrap_or(f64::NAN).abs())
            .sum::<f64>()
            + d;
        let tol = 10f64.powi(-(params.relation.scale_digits as i32)) * 1e3 * weight * scale;
        if !(err <= tol) {
            return Err(RelationError::PrecisionExhausted(format!(
                "reconstruction residual {err:e} for generator {} exceeds {tol:e}",
                item.generator
            ))
            .into());
        }
    }
    let rank = rank_int(&mh);
    Ok(MhReport {
        basis_indices,
        q,
        generators: data,
        mh,
        rank,
        heuristic: true,
    })
}
