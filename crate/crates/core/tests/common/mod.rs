#![allow(dead_code)]

use cdim_core::exactnum::{Rational, RealElement};
use cdim_core::qlinalg::MatrixZ;
use cdim_core::GroupSpec;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(n: i64) -> RealElement {
    RealElement::from_integer(n)
}

pub fn unit(n: usize, i: usize) -> Vec<RealElement> {
    (0..n).map(|j| int((i == j) as i64)).collect()
}

pub fn rational(rng: &mut impl Rng, num_max: i64, den_max: i64) -> Rational {
    Rational::new(
        BigInt::from(rng.gen_range(-num_max..=num_max)),
        BigInt::from(rng.gen_range(1..=den_max)),
    )
}

/// Sum of up to `terms` surds drawn from `radicands` (1 = rational part).
pub fn real(
    rng: &mut impl Rng,
    radicands: &[u64],
    terms: usize,
    num_max: i64,
    den_max: i64,
) -> RealElement {
    let count = rng.gen_range(0..=terms);
    (0..count).fold(RealElement::zero(), |acc, _| {
        let r = radicands[rng.gen_range(0..radicands.len())];
        acc + RealElement::surd(rational(rng, num_max, den_max), r)
    })
}

pub struct SpecShape {
    pub max_n: usize,
    pub max_m: usize,
    pub radicands: Vec<u64>,
    pub num_max: i64,
    pub den_max: i64,
    /// Only coordinate-axis frames and no free-form generators, so span
    /// coordinates equal the generator entries.
    pub axis_frames: bool,
}

impl Default for SpecShape {
    fn default() -> Self {
        Self {
            max_n: 4,
            max_m: 8,
            radicands: vec![1, 2, 3, 5, 7],
            num_max: 20,
            den_max: 3,
            axis_frames: false,
        }
    }
}

/// Random group: some generators are integer or surd combinations of a
/// random frame of fewer than n directions, others are fully random, so
/// that q < n, rational coordinates and dense parts all occur.
pub fn random_spec(rng: &mut impl Rng, shape: &SpecShape) -> GroupSpec {
    let n = rng.gen_range(1..=shape.max_n);
    let m = rng.gen_range(1..=shape.max_m);
    let frame_size = rng.gen_range(1..=n);
    let frame: Vec<Vec<RealElement>> = (0..frame_size)
        .map(|i| {
            if shape.axis_frames || rng.gen_bool(0.6) {
                unit(n, (i + rng.gen_range(0..n)) % n)
            } else {
                (0..n)
                    .map(|_| RealElement::from_integer(rng.gen_range(-2..=2)))
                    .collect()
            }
        })
        .collect();
    let gens = (0..m)
        .map(|_| {
            if !shape.axis_frames && rng.gen_bool(0.15) {
                (0..n)
                    .map(|_| real(rng, &shape.radicands, 2, shape.num_max, shape.den_max))
                    .collect()
            } else {
                let mut v = vec![RealElement::zero(); n];
                for f in &frame {
                    let c = if rng.gen_bool(0.5) {
                        RealElement::from_integer(rng.gen_range(-3..=3))
                    } else {
                        real(rng, &shape.radicands, 2, shape.num_max, shape.den_max)
                    };
                    for (slot, x) in v.iter_mut().zip(f) {
                        *slot = &*slot + &(&c * x);
                    }
                }
                v
            }
        })
        .collect();
    GroupSpec::new(n, gens).expect("well-formed")
}

/// Random unimodular n × n integer matrix as a product of elementary moves.
pub fn random_unimodular(rng: &mut impl Rng, n: usize) -> MatrixZ {
    let mut m = MatrixZ::identity(n);
    if n < 2 {
        if rng.gen_bool(0.5) && n == 1 {
            m[(0, 0)] = -BigInt::one();
        }
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let f = BigInt::from(rng.gen_range(-2..=2));
        for r in 0..n {
            let delta = &f * &m[(r, j)];
            m[(r, i)] += delta;
        }
        if rng.gen_bool(0.2) {
            for r in 0..n {
                m[(r, i)] = -&m[(r, i)];
            }
        }
    }
    m
}

/// P·u for every generator.
pub fn transform(g: &GroupSpec, p: &MatrixZ) -> GroupSpec {
    let n = g.ambient_dim();
    let gens = g
        .generators()
        .iter()
        .map(|u| {
            (0..n)
                .map(|i| {
                    (0..n).fold(RealElement::zero(), |acc, j| {
                        acc + RealElement::from_bigint(p[(i, j)].clone()) * u[j].clone()
                    })
                })
                .collect()
        })
        .collect();
    GroupSpec::new(n, gens).unwrap()
}

/// Rank from singular values above `threshold` (relative to the largest).
pub fn float_rank(rows: &[Vec<f64>], threshold: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > threshold * max).count()
}

/// Rational rank by elimination scanning columns right to left and picking
/// the last nonzero row as pivot.
pub fn rank_reverse_order(m: &MatrixZ) -> usize {
    let mut a: Vec<Vec<Rational>> = (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let rows = m.rows();
    let mut used = vec![false; rows];
    let mut rank = 0;
    for c in (0..m.cols()).rev() {
        let Some(p) = (0..rows).rev().find(|&r| !used[r] && !a[r][c].is_zero()) else {
            continue;
        };
        used[p] = true;
        rank += 1;
        let pivot_row = a[p].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != p && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    rank
}

fn rdot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_q(v: &[BigInt]) -> Vec<Rational> {
    v.iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect()
}

/// Exact Gram–Schmidt: (b*, μ).
pub fn gram_schmidt(basis: &[Vec<BigInt>]) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let n = basis.len();
    let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        let bi = to_q(&basis[i]);
        let mut v = bi.clone();
        for j in 0..i {
            let m = rdot(&bi, &star[j]) / rdot(&star[j], &star[j]);
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= &m * y;
            }
            mu[i][j] = m;
        }
        star.push(v);
    }
    (star, mu)
}

pub fn is_size_reduced(basis: &[Vec<BigInt>]) -> bool {
    let (_, mu) = gram_schmidt(basis);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    (0..basis.len()).all(|i| (0..i).all(|j| mu[i][j].abs() <= half))
}

pub fn satisfies_lovasz(basis: &[Vec<BigInt>], delta: &Rational) -> bool {
    let (star, mu) = gram_schmidt(basis);
    (1..basis.len()).all(|k| {
        let prev = rdot(&star[k - 1], &star[k - 1]);
        let cur = rdot(&star[k], &star[k]);
        cur >= (delta - &mu[k][k - 1] * &mu[k][k - 1]) * prev
    })
}

/// `true` iff `output = T·input` (rows) for an integer T with det T = ±1.
pub fn related_unimodularly(input: &[Vec<BigInt>], output: &[Vec<BigInt>]) -> bool {
    use cdim_core::qlinalg::{determinant_int, solve_generic, MatrixQ};
    let n = input.len();
    if output.len() != n {
        return false;
    }
    let dim = input[0].len();
    // Columns of the system: the input vectors; solve for each output row.
    let a = MatrixQ::from_fn(dim, n, |r, c| Rational::from_integer(input[c][r].clone()));
    let mut t = MatrixZ::zeros(n, n);
    for (i, row) in output.iter().enumerate() {
        let Ok(x) = solve_generic(&a, &to_q(row)) else {
            return false;
        };
        for (j, v) in x.iter().enumerate() {
            if !v.is_integer() {
                return false;
            }
            t[(i, j)] = v.to_integer();
        }
    }
    determinant_int(&t).abs().is_one()
}

/// Independent check of d·u_k = Σ α_j·u'_j + Σ p_j·u_{b_j}, everything
/// rebuilt in ambient coordinates.
pub fn reconstruction_holds(g: &GroupSpec, report: &cdim_core::dimension::MhReport) -> bool {
    use cdim_core::dimension::Coordinates;
    let n = g.ambient_dim();
    let gens = g.generators();
    let from_span = |coeffs: &[RealElement]| -> Vec<RealElement> {
        (0..n)
            .map(|i| {
                coeffs
                    .iter()
                    .zip(&report.basis_indices)
                    .fold(RealElement::zero(), |acc, (c, &b)| {
                        acc + c.clone() * gens[b][i].clone()
                    })
            })
            .collect()
    };
    report.generators.iter().all(|item| {
        let Coordinates::Exact(alpha) = &item.coords else {
            return false;
        };
        let mut span = vec![RealElement::zero(); report.q];
        for (j, col) in &item.u_prime {
            for (slot, c) in span.iter_mut().zip(col) {
                *slot = slot.clone() + alpha[*j].clone() * RealElement::from_bigint(c.clone());
            }
        }
        for (&j, p) in &item.p_coeffs {
            span[j] = span[j].clone() + RealElement::from_bigint(p.clone());
        }
        let d = RealElement::from_bigint(item.denominator.clone());
        let lhs: Vec<RealElement> = gens[item.generator]
            .iter()
            .map(|x| d.clone() * x.clone())
            .collect();
        lhs == from_span(&span)
    })
}

pub fn complex_modulus_sq(d: cdim_core::ComplexDim) -> usize {
    d.p * d.p + d.r * d.r
}

/// `count` jointly independent vectors in Rⁿ (count ≤ n) with surd entries.
pub fn independent_vectors(rng: &mut impl Rng, n: usize, count: usize) -> Vec<Vec<RealElement>> {
    use cdim_core::qlinalg::{rank_field, MatrixF};
    loop {
        let vs: Vec<Vec<RealElement>> = (0..count)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.gen_bool(0.2) {
                            RealElement::surd(rational(rng, 3, 2), [2, 3][rng.gen_range(0..2)])
                        } else {
                            RealElement::from_integer(rng.gen_range(-2..=2))
                        }
                    })
                    .collect()
            })
            .collect();
        if count == 0 || rank_field(&MatrixF::from_columns(&vs, n).unwrap()) == count {
            return vs;
        }
    }
}

pub fn random_closed_group(
    rng: &mut impl Rng,
    n: usize,
    e: usize,
    d: usize,
) -> cdim_core::morphism::ClosedGroup {
    let vs = independent_vectors(rng, n, e + d);
    let (ev, dv) = vs.split_at(e);
    cdim_core::morphism::ClosedGroup::new(n, ev.to_vec(), dv.to_vec())
        .expect("independent by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomKind {
    Injective,
    Surjective,
    Invertible,
}

/// Random f = f₁ ⊕ f₂ of the requested kind: A from small rationals, B from
/// {−3..3}, drawn until the predicate holds.
pub fn random_hom(rng: &mut impl Rng, kind: HomKind) -> cdim_core::morphism::ClosedHom {
    use cdim_core::morphism::{is_injective, is_surjective, rational_matrix, ClosedHom};
    let (e, d) = loop {
        let e = rng.gen_range(0..=3);
        let d = rng.gen_range(0..=3);
        if e + d > 0 {
            break (e, d);
        }
    };
    let (e2, d2) = match kind {
        HomKind::Injective => (rng.gen_range(e..=3), rng.gen_range(d..=3)),
        HomKind::Surjective => (rng.gen_range(0..=e), rng.gen_range(0..=d)),
        HomKind::Invertible => (e, d),
    };
    let n = (e + d).max(1) + rng.gen_range(0..=1);
    let n2 = (e2 + d2).max(1) + rng.gen_range(0..=1);
    let domain = random_closed_group(rng, n, e, d);
    let codomain = random_closed_group(rng, n2, e2, d2);
    loop {
        let a_rows: Vec<Vec<Rational>> = (0..e2)
            .map(|_| (0..e).map(|_| rational(rng, 4, 3)).collect())
            .collect();
        let a = rational_matrix(&a_rows, e);
        let b = MatrixZ::from_fn(d2, d, |_, _| BigInt::from(rng.gen_range(-3..=3)));
        let f = ClosedHom::new(domain.clone(), codomain.clone(), a, b).expect("shapes match");
        let ok = match kind {
            HomKind::Injective => is_injective(&f),
            HomKind::Surjective => is_surjective(&f),
            HomKind::Invertible => is_injective(&f) && is_surjective(&f),
        };
        if ok {
            return f;
        }
    }
}
