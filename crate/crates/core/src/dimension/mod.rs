//! From generators to the matrix M_H, its rank, and the complex dimension
//! of the closure of H = Σ Z·u_k.
//!
//! All work happens in span coordinates: a basis of vect(H) is picked among
//! the generators (greedy, left to right), every generator is rewritten in
//! that basis, and the integer columns u'_{k,j} live in Z^q.
//!
//! Indices in this module are 0-based. Reports meant for people convert to
//! 1-based numbering at the edge.

mod numeric;
mod oracle;

pub use numeric::{build_mh_from_floats, build_mh_numeric, FloatParams};
pub use oracle::{
    epsilon_net_oracle, epsilon_net_report, OracleParams, OracleReport, OracleTarget,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{normalize_radicand, Rational, RealElement};
use crate::qlinalg::{
    express, rank_int, rational_dependence, select_basis_columns, solve_field, MatrixF, MatrixQ,
    MatrixZ,
};
use crate::relation::RelationError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
    #[error("invalid forced index set for generator {generator}: {reason}")]
    InvalidForcedI { generator: usize, reason: String },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("oracle budget exceeded: {needed} samples requested, cap is {cap}")]
    BudgetExceeded { needed: u128, cap: u64 },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// Finitely generated subgroup H = Σ Z·u_k of Rⁿ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    ambient_dim: usize,
    generators: Vec<Vec<RealElement>>,
    forced_choices: BTreeMap<usize, BTreeSet<usize>>,
}

impl GroupSpec {
    pub fn new(
        ambient_dim: usize,
        generators: Vec<Vec<RealElement>>,
    ) -> Result<Self, DimensionError> {
        if ambient_dim == 0 {
            return Err(DimensionError::InvalidSpec(
                "ambient dimension must be positive".into(),
            ));
        }
        if generators.is_empty() {
            return Err(DimensionError::InvalidSpec(
                "at least one generator is required".into(),
            ));
        }
        if let Some(k) = generators.iter().position(|g| g.len() != ambient_dim) {
            return Err(DimensionError::InvalidSpec(format!(
                "generator {} has length {}, expected {}",
                k,
                generators[k].len(),
                ambient_dim
            )));
        }
        Ok(Self {
            ambient_dim,
            generators,
            forced_choices: BTreeMap::new(),
        })
    }

    /// Overrides the greedy choice of I_k for the listed generators. Keys are
    /// generator indices, values coordinate indices in `0..q`. Legality is
    /// checked when M_H is built.
    pub fn with_forced_choices(
        mut self,
        forced: BTreeMap<usize, BTreeSet<usize>>,
    ) -> Result<Self, DimensionError> {
        if let Some(&k) = forced.keys().find(|&&k| k >= self.generators.len()) {
            return Err(DimensionError::InvalidForcedI {
                generator: k,
                reason: format!("only {} generators exist", self.generators.len()),
            });
        }
        self.forced_choices = forced;
        Ok(self)
    }

    pub fn without_forced_choices(&self) -> Self {
        Self {
            forced_choices: BTreeMap::new(),
            ..self.clone()
        }
    }

    /// The spec for H + Z·v.
    pub fn with_generator(&self, v: Vec<RealElement>) -> Result<Self, DimensionError> {
        let mut gens = self.generators.clone();
        gens.push(v);
        let mut out = Self::new(self.ambient_dim, gens)?;
        out.forced_choices = self.forced_choices.clone();
        Ok(out)
    }

    /// Keeps the generators at `indices` (in the given order).
    pub fn select(&self, indices: &[usize]) -> Result<Self, DimensionError> {
        Self::new(
            self.ambient_dim,
            indices
                .iter()
                .map(|&i| self.generators[i].clone())
                .collect(),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[Vec<RealElement>] {
        &self.generators
    }

    pub fn forced_choices(&self) -> &BTreeMap<usize, BTreeSet<usize>> {
        &self.forced_choices
    }

    /// Generators as the columns of an n × m matrix.
    pub fn generator_matrix(&self) -> MatrixF {
        MatrixF::from_columns(&self.generators, self.ambient_dim).expect("validated lengths")
    }

    /// Every squarefree radicand other than 1 appearing in some entry.
    pub fn radicands(&self) -> BTreeSet<u64> {
        self.generators
            .iter()
            .flatten()
            .flat_map(|x| x.support())
            .filter(|&r| r != 1)
            .collect()
    }
}

/// Complex dimension p + r·i: p is the dimension of the largest vector
/// subspace inside the group, p + r that of the smallest one containing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComplexDim {
    pub p: usize,
    pub r: usize,
}

impl ComplexDim {
    pub fn new(p: usize, r: usize) -> Self {
        Self { p, r }
    }

    pub fn modulus_squared(&self) -> usize {
        self.p * self.p + self.r * self.r
    }

    pub fn modulus(&self) -> f64 {
        (self.modulus_squared() as f64).sqrt()
    }
}

impl fmt::Display for ComplexDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.p, self.r)
    }
}

/// Basis of vect(H) among the generators, and every generator in that basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanReduction {
    pub basis_indices: Vec<usize>,
    /// One length-q coordinate vector per generator.
    pub coordinates: Vec<Vec<RealElement>>,
}

impl SpanReduction {
    pub fn q(&self) -> usize {
        self.basis_indices.len()
    }
}

/// q = dim vect(H).
pub fn span_dim(g: &GroupSpec) -> usize {
    crate::qlinalg::rank_field(&g.generator_matrix())
}

pub fn reduce_to_span(g: &GroupSpec) -> Result<SpanReduction, DimensionError> {
    let m = g.generator_matrix();
    let basis_indices = select_basis_columns(&m);
    let basis_cols: Vec<Vec<RealElement>> = basis_indices
        .iter()
        .map(|&i| g.generators[i].clone())
        .collect();
    let basis = MatrixF::from_columns(&basis_cols, g.ambient_dim).expect("consistent lengths");
    let coordinates = g
        .generators
        .iter()
        .enumerate()
        .map(|(k, u)| {
            solve_field(&basis, u).map_err(|e| {
                DimensionError::InternalInvariantViolation(format!(
                    "generator {k} not in the span of the basis: {e}"
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpanReduction {
        basis_indices,
        coordinates,
    })
}

/// Rational data splitting one coordinate vector α into the Q-independent
/// part (with 1) and the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalStructure {
    /// I_k, ascending coordinate indices.
    pub independent: Vec<usize>,
    /// t_{k,j} for every j ∉ I_k.
    pub offsets: BTreeMap<usize, Rational>,
    /// γ_{j,·} for every j ∉ I_k, aligned with `independent`:
    /// α_j = t_j + Σ_i γ_{j,i} α_i.
    pub gamma: BTreeMap<usize, Vec<Rational>>,
}

/// Q-coefficient vectors of 1, α_1, …, α_q over their joint surd support.
fn dependence_vectors(coords: &[RealElement]) -> Vec<Vec<Rational>> {
    let mut radicands: BTreeSet<u64> = coords.iter().flat_map(|x| x.support()).collect();
    radicands.insert(1);
    let radicands: Vec<u64> = radicands.into_iter().collect();
    std::iter::once(RealElement::one())
        .chain(coords.iter().cloned())
        .map(|x| x.coefficients_over(&radicands))
        .collect()
}

fn structure_from_choice(vectors: &[Vec<Rational>], chosen: &[usize]) -> Option<RationalStructure> {
    let q = vectors.len() - 1;
    let mut offsets = BTreeMap::new();
    let mut gamma = BTreeMap::new();
    for j in 0..q {
        if chosen.contains(&(j + 1)) {
            continue;
        }
        let coeffs = express(vectors, chosen, &vectors[j + 1])?;
        offsets.insert(j, coeffs[0].clone());
        gamma.insert(j, coeffs[1..].to_vec());
    }
    Some(RationalStructure {
        independent: chosen[1..].iter().map(|&i| i - 1).collect(),
        offsets,
        gamma,
    })
}

/// Greedy I_k: the constant 1 first, then coordinates left to right.
pub fn exact_structure(coords: &[RealElement]) -> RationalStructure {
    let vectors = dependence_vectors(coords);
    let report = rational_dependence(&vectors);
    debug_assert_eq!(report.independent_indices.first(), Some(&0));
    structure_from_choice(&vectors, &report.independent_indices)
        .expect("greedy choice spans every vector")
}

/// I_k given by the caller, after checking that {1} ∪ {α_j : j ∈ I_k} is
/// Q-independent and spans every other α_j.
pub fn forced_structure(
    coords: &[RealElement],
    forced: &BTreeSet<usize>,
) -> Result<RationalStructure, String> {
    if let Some(&j) = forced.iter().find(|&&j| j >= coords.len()) {
        return Err(format!(
            "coordinate index {} out of range (q = {})",
            j,
            coords.len()
        ));
    }
    let vectors = dependence_vectors(coords);
    let chosen: Vec<usize> = std::iter::once(0)
        .chain(forced.iter().map(|&j| j + 1))
        .collect();
    let subset: Vec<Vec<Rational>> = chosen.iter().map(|&i| vectors[i].clone()).collect();
    if rational_dependence(&subset).independent_indices.len() != chosen.len() {
        return Err("1 together with the chosen coordinates is not rationally independent".into());
    }
    structure_from_choice(&vectors, &chosen).ok_or_else(|| "the chosen set is not maximal".into())
}

/// Every legal I_k for one coordinate vector: all maximal index sets J with
/// {1} ∪ {α_j : j ∈ J} rationally independent.
pub fn legal_choices(coords: &[RealElement]) -> Vec<BTreeSet<usize>> {
    let vectors = dependence_vectors(coords);
    let size = rational_dependence(&vectors).independent_indices.len() - 1;
    let q = coords.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << q) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let set: BTreeSet<usize> = (0..q).filter(|j| mask & (1 << j) != 0).collect();
        if forced_structure(coords, &set).is_ok() {
            out.push(set);
        }
    }
    out
}

/// Per-generator (d_k) or shared denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorMode {
    #[default]
    PerGenerator,
    Global,
}

#[derive(Debug, Clone, Default)]
pub struct MhOptions {
    pub denominator: DenominatorMode,
    /// Ignore the spec's forced I_k sets and choose greedily.
    pub ignore_forced: bool,
}

/// Coordinates of a non-basis generator: exact, or floating in float mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Coordinates {
    Exact(Vec<RealElement>),
    Approximate(Vec<f64>),
}

/// Everything M_H is built from, for one non-basis generator u_k.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorData {
    pub generator: usize,
    pub coords: Coordinates,
    pub structure: RationalStructure,
    /// d_k, the common denominator of t_{k,·} and γ^{(k)}.
    pub denominator: BigInt,
    /// m^{(k)}_{i,·} = d_k·γ_{i,·} for i ∉ I_k, aligned with I_k.
    pub m_coeffs: BTreeMap<usize, Vec<BigInt>>,
    /// p_{k,j} = d_k·t_{k,j} for j ∉ I_k.
    pub p_coeffs: BTreeMap<usize, BigInt>,
    /// (j, u'_{k,j}) for j ∈ I_k, ascending in j.
    pub u_prime: Vec<(usize, Vec<BigInt>)>,
}

/// Full trace of the M_H construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MhReport {
    pub basis_indices: Vec<usize>,
    pub q: usize,
    pub generators: Vec<GeneratorData>,
    /// q × (number of u' columns); columns in generator order, then j ascending.
    pub mh: MatrixZ,
    pub rank: usize,
    /// Set when the rational structure came from floating-point relation finding.
    pub heuristic: bool,
}

impl MhReport {
    pub fn complex_dim(&self) -> ComplexDim {
        ComplexDim::new(self.rank, self.q - self.rank)
    }
}

fn lcm_of_denominators(s: &RationalStructure) -> BigInt {
    s.offsets
        .values()
        .chain(s.gamma.values().flatten())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn to_integer(x: &Rational) -> BigInt {
    assert!(x.is_integer(), "denominator clears all fractions");
    x.to_integer()
}

/// Integer data and u' columns from rational structures.
fn assemble(
    q: usize,
    entries: Vec<(usize, Coordinates, RationalStructure)>,
    mode: DenominatorMode,
) -> (Vec<GeneratorData>, MatrixZ) {
    let global = entries.iter().fold(BigInt::one(), |acc, (_, _, s)| {
        acc.lcm(&lcm_of_denominators(s))
    });
    let mut data = Vec::with_capacity(entries.len());
    let mut columns = Vec::new();
    for (generator, coords, structure) in entries {
        let d = match mode {
            DenominatorMode::PerGenerator => lcm_of_denominators(&structure),
            DenominatorMode::Global => global.clone(),
        };
        let dq = Rational::from_integer(d.clone());
        let p_coeffs: BTreeMap<usize, BigInt> = structure
            .offsets
            .iter()
            .map(|(&j, t)| (j, to_integer(&(t * &dq))))
            .collect();
        let m_coeffs: BTreeMap<usize, Vec<BigInt>> = structure
            .gamma
            .iter()
            .map(|(&i, row)| (i, row.iter().map(|g| to_integer(&(g * &dq))).collect()))
            .collect();
        let u_prime: Vec<(usize, Vec<BigInt>)> = structure
            .independent
            .iter()
            .enumerate()
            .map(|(pos, &j)| {
                let mut col = vec![BigInt::zero(); q];
                col[j] = d.clone();
                for (&i, m_row) in &m_coeffs {
                    col[i] += &m_row[pos];
                }
                (j, col)
            })
            .collect();
        columns.extend(u_prime.iter().map(|(_, c)| c.clone()));
        data.push(GeneratorData {
            generator,
            coords,
            structure,
            denominator: d,
            m_coeffs,
            p_coeffs,
            u_prime,
        });
    }
    let mh = MatrixZ::from_columns(&columns, q).expect("all columns have length q");
    (data, mh)
}

/// d_k·u_k = Σ_{j∈I_k} α_{k,j}·u'_{k,j} + Σ_{j∉I_k} p_{k,j}·u_j, in ambient
/// coordinates with u'_{k,j} read in the chosen basis.
fn check_reconstruction(
    g: &GroupSpec,
    basis: &[usize],
    item: &GeneratorData,
) -> Result<(), DimensionError> {
    let Coordinates::Exact(alpha) = &item.coords else {
        unreachable!("exact check on approximate data");
    };
    let n = g.ambient_dim;
    let in_basis = |coeffs: &[BigInt]| -> Vec<RealElement> {
        let mut v = vec![RealElement::zero(); n];
        for (c, &b) in coeffs.iter().zip(basis) {
            if !c.is_zero() {
                let c = Rational::from_integer(c.clone());
                for (slot, x) in v.iter_mut().zip(&g.generators[b]) {
                    *slot = &*slot + &x.scale(&c);
                }
            }
        }
        v
    };
    let mut rhs = vec![RealElement::zero(); n];
    for (j, col) in &item.u_prime {
        for (slot, x) in rhs.iter_mut().zip(in_basis(col)) {
            *slot = &*slot + &(&alpha[*j] * &x);
        }
    }
    for (&j, p) in &item.p_coeffs {
        let p = Rational::from_integer(p.clone());
        for (slot, x) in rhs.iter_mut().zip(&g.generators[basis[j]]) {
            *slot = &*slot + &x.scale(&p);
        }
    }
    let d = Rational::from_integer(item.denominator.clone());
    let lhs: Vec<RealElement> = g.generators[item.generator]
        .iter()
        .map(|x| x.scale(&d))
        .collect();
    if lhs != rhs {
        return Err(DimensionError::InternalInvariantViolation(format!(
            "reconstruction identity fails for generator {}",
            item.generator
        )));
    }
    Ok(())
}

pub fn build_mh(g: &GroupSpec) -> Result<MhReport, DimensionError> {
    build_mh_with(g, &MhOptions::default())
}

pub fn build_mh_with(g: &GroupSpec, opts: &MhOptions) -> Result<MhReport, DimensionError> {
    let span = reduce_to_span(g)?;
    let q = span.q();
    let mut entries = Vec::new();
    for (k, coords) in span.coordinates.iter().enumerate() {
        if span.basis_indices.contains(&k) {
            if !opts.ignore_forced && g.forced_choices.contains_key(&k) {
                return Err(DimensionError::InvalidForcedI {
                    generator: k,
                    reason: "generator belongs to the chosen basis".into(),
                });
            }
            continue;
        }
        let structure = match g.forced_choices.get(&k).filter(|_| !opts.ignore_forced) {
            Some(forced) => forced_structure(coords, forced).map_err(|reason| {
                DimensionError::InvalidForcedI {
                    generator: k,
                    reason,
                }
            })?,
            None => exact_structure(coords),
        };
        entries.push((k, Coordinates::Exact(coords.clone()), structure));
    }
    let (generators, mh) = assemble(q, entries, opts.denominator);
    for item in &generators {
        check_reconstruction(g, &span.basis_indices, item)?;
    }
    let rank = rank_int(&mh);
    Ok(MhReport {
        basis_indices: span.basis_indices,
        q,
        generators,
        mh,
        rank,
        heuristic: false,
    })
}

/// Complex dimension of the closure: L(M_H) + (q − L(M_H))·i.
pub fn complex_dimension_closure(g: &GroupSpec) -> Result<ComplexDim, DimensionError> {
    Ok(build_mh(g)?.complex_dim())
}

pub fn is_dense_in_span(g: &GroupSpec) -> Result<bool, DimensionError> {
    let report = build_mh(g)?;
    Ok(report.rank == report.q)
}

pub fn is_dense_in_ambient(g: &GroupSpec) -> Result<bool, DimensionError> {
    let report = build_mh(g)?;
    Ok(report.rank == report.q && report.q == g.ambient_dim)
}

/// A generator u with H + Z·u dense in vect(H).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Densified {
    pub vector: Vec<RealElement>,
    /// s_1 < s_2 < …: u = Σ √s_k · (k-th basis generator).
    pub radicands: Vec<u64>,
    pub spec: GroupSpec,
    pub dimension: ComplexDim,
}

fn is_squarefree(n: u64) -> bool {
    normalize_radicand(n).0 == 1
}

pub fn densify(g: &GroupSpec) -> Result<Densified, DimensionError> {
    let span = reduce_to_span(g)?;
    let q = span.q();
    if q == 0 {
        return Err(DimensionError::InvalidSpec(
            "densify needs a nonzero generator".into(),
        ));
    }
    let used = g.radicands();
    let radicands: Vec<u64> = (2u64..)
        .filter(|&s| is_squarefree(s) && !used.contains(&s))
        .take(q)
        .collect();
    let mut vector = vec![RealElement::zero(); g.ambient_dim];
    for (&s, &b) in radicands.iter().zip(&span.basis_indices) {
        let root = RealElement::sqrt(s);
        for (slot, x) in vector.iter_mut().zip(&g.generators[b]) {
            *slot = &*slot + &(&root * x);
        }
    }
    let spec = g.without_forced_choices().with_generator(vector.clone())?;
    let dimension = complex_dimension_closure(&spec)?;
    if dimension != ComplexDim::new(q, 0) {
        return Err(DimensionError::InternalInvariantViolation(format!(
            "densified group has dimension {dimension}, expected {q} + 0i"
        )));
    }
    Ok(Densified {
        vector,
        radicands,
        spec,
        dimension,
    })
}

/// Candidate closure decomposition E + D. `f_basis` spans F = span of the u'
/// columns; `discrete` lists basis generators whose span complements F in
/// vect(H). Whether F is exactly the vector part E of the closure is not
/// established, only dim F = dim E.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureStructure {
    pub basis_indices: Vec<usize>,
    /// Independent u' columns, in span coordinates.
    pub f_basis: Vec<Vec<BigInt>>,
    /// The same vectors in ambient coordinates.
    pub f_basis_ambient: Vec<Vec<RealElement>>,
    /// Positions (into `basis_indices`) of the complementing basis generators.
    pub discrete_positions: Vec<usize>,
    /// Generator indices of the candidate discrete part.
    pub discrete_generators: Vec<usize>,
}

pub fn closure_structure(g: &GroupSpec) -> Result<ClosureStructure, DimensionError> {
    let report = build_mh(g)?;
    let q = report.q;
    let mhq: MatrixQ = report.mh.to_rational();
    let f_cols = select_basis_columns(&mhq);
    let f_basis: Vec<Vec<BigInt>> = f_cols.iter().map(|&c| report.mh.column(c)).collect();

    let mut spanning: Vec<Vec<Rational>> = f_basis
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let mut discrete_positions = Vec::new();
    for i in 0..q {
        let mut unit = vec![Rational::zero(); q];
        unit[i] = Rational::one();
        let mut trial = spanning.clone();
        trial.push(unit.clone());
        let m = MatrixQ::from_columns(&trial, q).expect("length q");
        if crate::qlinalg::rank_rational(&m) == trial.len() {
            spanning.push(unit);
            discrete_positions.push(i);
        }
    }
    let f_basis_ambient = f_basis
        .iter()
        .map(|col| {
            let mut v = vec![RealElement::zero(); g.ambient_dim];
            for (c, &b) in col.iter().zip(&report.basis_indices) {
                let c = Rational::from_integer(c.clone());
                for (slot, x) in v.iter_mut().zip(&g.generators[b]) {
                    *slot = &*slot + &x.scale(&c);
                }
            }
            v
        })
        .collect();
    let discrete_generators = discrete_positions
        .iter()
        .map(|&i| report.basis_indices[i])
        .collect();
    Ok(ClosureStructure {
        basis_indices: report.basis_indices,
        f_basis,
        f_basis_ambient,
        discrete_positions,
        discrete_generators,
    })
}
