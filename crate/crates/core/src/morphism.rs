//! Closed additive groups E + D (E a vector subspace, D a discrete group with
//! independent generators) and homomorphisms f = f₁ ⊕ f₂ between them.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::dimension::ComplexDim;
use crate::exactnum::{Rational, RealElement};
use crate::qlinalg::{
    column_echelon, nullspace, rank_field, rank_int, select_basis_columns, MatrixF, MatrixZ,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("invalid closed group: {0}")]
    InvalidGroup(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("image of the vector part meets the image of the discrete part")]
    DegenerateImage,
}

/// E + D with E = span(e_basis) and D = Σ Z·d for d in d_gens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedGroup {
    ambient_dim: usize,
    e_basis: Vec<Vec<RealElement>>,
    d_gens: Vec<Vec<RealElement>>,
}

impl ClosedGroup {
    pub fn new(
        ambient_dim: usize,
        e_basis: Vec<Vec<RealElement>>,
        d_gens: Vec<Vec<RealElement>>,
    ) -> Result<Self, MorphismError> {
        if let Some(v) = e_basis
            .iter()
            .chain(&d_gens)
            .find(|v| v.len() != ambient_dim)
        {
            return Err(MorphismError::InvalidGroup(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                ambient_dim
            )));
        }
        let all: Vec<Vec<RealElement>> = e_basis.iter().chain(&d_gens).cloned().collect();
        if !all.is_empty() {
            let m = MatrixF::from_columns(&all, ambient_dim).expect("checked lengths");
            if rank_field(&m) != all.len() {
                return Err(MorphismError::InvalidGroup(
                    "E basis and D generators are not jointly independent".into(),
                ));
            }
        }
        Ok(Self {
            ambient_dim,
            e_basis,
            d_gens,
        })
    }

    /// Z-span of independent vectors.
    pub fn lattice(
        ambient_dim: usize,
        d_gens: Vec<Vec<RealElement>>,
    ) -> Result<Self, MorphismError> {
        Self::new(ambient_dim, Vec::new(), d_gens)
    }

    /// Vector subspace with the given basis.
    pub fn subspace(
        ambient_dim: usize,
        e_basis: Vec<Vec<RealElement>>,
    ) -> Result<Self, MorphismError> {
        Self::new(ambient_dim, e_basis, Vec::new())
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            e_basis: Vec::new(),
            d_gens: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn e_basis(&self) -> &[Vec<RealElement>] {
        &self.e_basis
    }

    pub fn d_gens(&self) -> &[Vec<RealElement>] {
        &self.d_gens
    }

    pub fn is_trivial(&self) -> bool {
        self.e_basis.is_empty() && self.d_gens.is_empty()
    }
}

pub fn cdim(g: &ClosedGroup) -> ComplexDim {
    ComplexDim::new(g.e_basis.len(), g.d_gens.len())
}

/// f = f₁ ⊕ f₂: column j of `a` holds f₁(e_j) in the codomain E basis,
/// column j of `b` holds f₂(d_j) in the codomain D generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedHom {
    pub domain: ClosedGroup,
    pub codomain: ClosedGroup,
    pub a: MatrixF,
    pub b: MatrixZ,
}

impl ClosedHom {
    pub fn new(
        domain: ClosedGroup,
        codomain: ClosedGroup,
        a: MatrixF,
        b: MatrixZ,
    ) -> Result<Self, MorphismError> {
        let want_a = (codomain.e_basis.len(), domain.e_basis.len());
        if (a.rows(), a.cols()) != want_a {
            return Err(MorphismError::DimensionMismatch(format!(
                "A is {}×{}, expected {}×{}",
                a.rows(),
                a.cols(),
                want_a.0,
                want_a.1
            )));
        }
        let want_b = (codomain.d_gens.len(), domain.d_gens.len());
        if (b.rows(), b.cols()) != want_b {
            return Err(MorphismError::DimensionMismatch(format!(
                "B is {}×{}, expected {}×{}",
                b.rows(),
                b.cols(),
                want_b.0,
                want_b.1
            )));
        }
        Ok(Self {
            domain,
            codomain,
            a,
            b,
        })
    }

    pub fn identity(g: &ClosedGroup) -> Self {
        Self {
            domain: g.clone(),
            codomain: g.clone(),
            a: MatrixF::identity(g.e_basis.len()),
            b: MatrixZ::identity(g.d_gens.len()),
        }
    }

    /// f(x) for x = Σ λ_j e_j + Σ c_j d_j.
    pub fn apply(&self, lambda: &[RealElement], c: &[BigInt]) -> Vec<RealElement> {
        let e_coords = self.a.mul_vec(lambda);
        let d_coords: Vec<BigInt> = (0..self.b.rows())
            .map(|i| self.b.row(i).iter().zip(c).map(|(x, y)| x * y).sum())
            .collect();
        let d_real: Vec<RealElement> = d_coords.into_iter().map(RealElement::from_bigint).collect();
        let mut out = combine(&self.codomain.e_basis, &e_coords, self.codomain.ambient_dim);
        for (slot, x) in out.iter_mut().zip(combine(
            &self.codomain.d_gens,
            &d_real,
            self.codomain.ambient_dim,
        )) {
            *slot = &*slot + &x;
        }
        out
    }
}

/// Σ coeffs_j · vectors_j in Rⁿ.
fn combine(vectors: &[Vec<RealElement>], coeffs: &[RealElement], n: usize) -> Vec<RealElement> {
    let mut out = vec![RealElement::zero(); n];
    for (v, c) in vectors.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (slot, x) in out.iter_mut().zip(v) {
            *slot = &*slot + &(c * x);
        }
    }
    out
}

fn int_combine(vectors: &[Vec<RealElement>], coeffs: &[BigInt], n: usize) -> Vec<RealElement> {
    let coeffs: Vec<RealElement> = coeffs
        .iter()
        .cloned()
        .map(RealElement::from_bigint)
        .collect();
    combine(vectors, &coeffs, n)
}

/// f(E + D) = f₁(E) + f₂(D).
pub fn image(f: &ClosedHom) -> Result<ClosedGroup, MorphismError> {
    let n = f.codomain.ambient_dim;
    let e_cols = select_basis_columns(&f.a);
    let e_basis: Vec<Vec<RealElement>> = e_cols
        .iter()
        .map(|&j| combine(&f.codomain.e_basis, &f.a.column(j), n))
        .collect();
    let d_gens: Vec<Vec<RealElement>> = column_echelon(&f.b)
        .image_basis()
        .iter()
        .map(|col| int_combine(&f.codomain.d_gens, col, n))
        .collect();
    ClosedGroup::new(n, e_basis, d_gens).map_err(|_| MorphismError::DegenerateImage)
}

/// Ker f = Ker f₁ + Ker f₂, the two parts being independent in the codomain.
pub fn kernel(f: &ClosedHom) -> Result<ClosedGroup, MorphismError> {
    let n = f.domain.ambient_dim;
    let e_basis: Vec<Vec<RealElement>> = nullspace(&f.a)
        .iter()
        .map(|x| combine(&f.domain.e_basis, x, n))
        .collect();
    let d_gens: Vec<Vec<RealElement>> = column_echelon(&f.b)
        .kernel_basis()
        .iter()
        .map(|x| int_combine(&f.domain.d_gens, x, n))
        .collect();
    ClosedGroup::new(n, e_basis, d_gens)
}

pub fn is_injective(f: &ClosedHom) -> bool {
    rank_field(&f.a) == f.a.cols() && rank_int(&f.b) == f.b.cols()
}

/// f₁ onto E′ and the columns of B generate all of Z^{|D′|}.
pub fn is_surjective(f: &ClosedHom) -> bool {
    if rank_field(&f.a) != f.a.rows() {
        return false;
    }
    let ech = column_echelon(&f.b);
    ech.rank == f.b.rows() && (0..ech.rank).all(|c| ech.echelon[(ech.pivot_rows[c], c)].is_one())
}

/// Rational matrix as a matrix of reals.
pub fn rational_matrix(rows: &[Vec<Rational>], cols: usize) -> MatrixF {
    MatrixF::from_fn(rows.len(), cols, |i, j| {
        RealElement::from_rational(rows[i][j].clone())
    })
}
