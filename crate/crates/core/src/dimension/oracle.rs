//! Brute-force ε-net density check, independent of the M_H pipeline.
//!
//! The target is the box spanned by a chosen set of generators (the
//! "edges"). Because the edges lie in H, every group element may be reduced
//! modulo the edge lattice into the unit box without leaving H, so only the
//! remaining generators need to be enumerated. Samples are Σ c_k u_k with
//! |c_k| ≤ K over those generators, in plain f64.

use nalgebra::DMatrix;

use super::{DimensionError, GroupSpec};

/// Box spanned by the generators at `edges`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTarget {
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    pub coefficient_bound: u64,
    pub epsilon: f64,
    pub sample_cap: u64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            coefficient_bound: 1000,
            epsilon: 0.01,
            sample_cap: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub covered: bool,
    pub samples: u64,
    pub cells: usize,
    pub uncovered_cells: usize,
}

/// True iff every grid center of the target box has a sample within ε.
pub fn epsilon_net_oracle(
    g: &GroupSpec,
    target: &OracleTarget,
    params: &OracleParams,
) -> Result<bool, DimensionError> {
    epsilon_net_report(g, target, params).map(|r| r.covered)
}

pub fn epsilon_net_report(
    g: &GroupSpec,
    target: &OracleTarget,
    params: &OracleParams,
) -> Result<OracleReport, DimensionError> {
    let n = g.ambient_dim();
    let eps = params.epsilon;
    if !(eps > 0.0) || params.coefficient_bound == 0 {
        return Err(DimensionError::InvalidSpec(
            "oracle needs K ≥ 1 and ε > 0".into(),
        ));
    }
    let m = g.generators().len();
    if let Some(&e) = target.edges.iter().find(|&&e| e >= m) {
        return Err(DimensionError::InvalidSpec(format!(
            "edge generator {e} does not exist"
        )));
    }
    let floats: Vec<Vec<f64>> = g
        .generators()
        .iter()
        .map(|u| u.iter().map(|x| x.to_f64()).collect())
        .collect();
    let t = target.edges.len();
    let free: Vec<usize> = (0..m).filter(|k| !target.edges.contains(k)).collect();

    let k = params.coefficient_bound;
    let needed = (2 * k as u128 + 1)
        .checked_pow(free.len() as u32)
        .unwrap_or(u128::MAX);
    if needed > params.sample_cap as u128 {
        return Err(DimensionError::BudgetExceeded {
            needed,
            cap: params.sample_cap,
        });
    }

    let cells_per_axis = (1.0 / eps).ceil() as usize;
    let cells = cells_per_axis.checked_pow(t as u32).unwrap_or(usize::MAX);
    if cells as u128 > params.sample_cap as u128 {
        return Err(DimensionError::BudgetExceeded {
            needed: cells as u128,
            cap: params.sample_cap,
        });
    }

    let edges = DMatrix::from_fn(n, t, |i, j| floats[target.edges[j]][i]);
    let gram = edges.transpose() * &edges;
    let gram_inv = if t == 0 {
        DMatrix::zeros(0, 0)
    } else {
        gram.clone().try_inverse().ok_or_else(|| {
            DimensionError::InvalidSpec("target edges are linearly dependent".into())
        })?
    };
    let projector = &gram_inv * edges.transpose();
    let sigma_min = if t == 0 {
        1.0
    } else {
        edges.clone().svd(false, false).singular_values.min()
    };

    // Edge-lattice coordinates and orthogonal remainder of each free generator.
    let free_y: Vec<Vec<f64>> = free
        .iter()
        .map(|&f| {
            let u = nalgebra::DVector::from_vec(floats[f].clone());
            (&projector * u).iter().copied().collect()
        })
        .collect();
    let free_w: Vec<Vec<f64>> = free
        .iter()
        .zip(&free_y)
        .map(|(&f, y)| {
            (0..n)
                .map(|i| floats[f][i] - (0..t).map(|j| edges[(i, j)] * y[j]).sum::<f64>())
                .collect()
        })
        .collect();

    let radius = ((eps / sigma_min) * cells_per_axis as f64).ceil() as i64 + 1;
    let mut marked = vec![false; cells];
    let mut coeffs = vec![-(k as i64); free.len()];
    let mut samples = 0u64;
    let mut y = vec![0.0; t];
    let mut w = vec![0.0; n];
    let mut offset = vec![-radius; t];
    let mut frac = vec![0.0; t];
    let mut base = vec![0i64; t];
    let mut delta = vec![0.0; t];
    let mut uncovered = cells;
    let edge_cols: Vec<Vec<f64>> = (0..t)
        .map(|j| (0..n).map(|i| edges[(i, j)]).collect())
        .collect();
    while uncovered > 0 {
        samples += 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        w.iter_mut().for_each(|v| *v = 0.0);
        for (idx, &c) in coeffs.iter().enumerate() {
            let c = c as f64;
            for (acc, v) in y.iter_mut().zip(&free_y[idx]) {
                *acc += c * v;
            }
            for (acc, v) in w.iter_mut().zip(&free_w[idx]) {
                *acc += c * v;
            }
        }
        let w_norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if w_norm < eps {
            for axis in 0..t {
                frac[axis] = y[axis] - y[axis].floor();
                base[axis] = (frac[axis] * cells_per_axis as f64).round() as i64;
            }
            offset.iter_mut().for_each(|o| *o = -radius);
            loop {
                // Grid center for base + offset (wrapped), and wrapped delta in box coordinates.
                let mut cell = 0usize;
                for axis in 0..t {
                    let idx =
                        (base[axis] + offset[axis]).rem_euclid(cells_per_axis as i64) as usize;
                    cell = cell * cells_per_axis + idx;
                    let center = idx as f64 / cells_per_axis as f64;
                    let mut d = frac[axis] - center;
                    d -= d.round();
                    delta[axis] = d;
                }
                if !marked[cell] {
                    let dist2: f64 = (0..n)
                        .map(|i| {
                            let v = w[i] + (0..t).map(|j| edge_cols[j][i] * delta[j]).sum::<f64>();
                            v * v
                        })
                        .sum();
                    if dist2 < eps * eps {
                        marked[cell] = true;
                        uncovered -= 1;
                    }
                }
                // Odometer over the neighborhood.
                let mut axis = 0;
                while axis < t {
                    offset[axis] += 1;
                    if offset[axis] <= radius {
                        break;
                    }
                    offset[axis] = -radius;
                    axis += 1;
                }
                if axis == t {
                    break;
                }
            }
        }
        // Odometer over coefficients.
        let mut idx = 0;
        while idx < coeffs.len() {
            coeffs[idx] += 1;
            if coeffs[idx] <= k as i64 {
                break;
            }
            coeffs[idx] = -(k as i64);
            idx += 1;
        }
        if idx == coeffs.len() {
            break;
        }
    }
    let uncovered_cells = marked.iter().filter(|m| !**m).count();
    Ok(OracleReport {
        covered: uncovered_cells == 0,
        samples,
        cells,
        uncovered_cells,
    })
}
