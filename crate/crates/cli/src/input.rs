//! Job files: JSON read from `--input` or stdin.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use cdim_core::exactnum::RealElement;
use cdim_core::morphism::ClosedGroup;
use cdim_core::qlinalg::{MatrixF, MatrixZ};
use cdim_core::realparse;
use cdim_core::GroupSpec;
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Rejected input, with enough location data to find the offending text.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobInput {
    pub ambient_dim: usize,
    pub generators: Vec<Vec<String>>,
    /// 1-based generator number → 1-based coordinate indices.
    #[serde(rename = "force_I", default)]
    pub force_i: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub mode: Option<Mode>,
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| {
        InputError::new(format!(
            "invalid job file at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn parse_real(text: &str, location: &str) -> Result<RealElement, InputError> {
    realparse::parse(text).map_err(|e| {
        InputError::new(format!(
            "{location}: {e}\n  {text}\n  {}^",
            " ".repeat(char_offset(text, e.position()))
        ))
    })
}

fn char_offset(text: &str, position: usize) -> usize {
    position.min(text.chars().count())
}

fn check_table(ambient_dim: usize, rows: &[Vec<String>], what: &str) -> Result<(), InputError> {
    if ambient_dim == 0 {
        return Err(InputError::new("ambient_dim must be positive"));
    }
    for (k, row) in rows.iter().enumerate() {
        if row.len() != ambient_dim {
            return Err(InputError::new(format!(
                "{what}[{}] has {} entries, ambient_dim is {ambient_dim}",
                k + 1,
                row.len()
            )));
        }
    }
    Ok(())
}

fn parse_vectors(
    ambient_dim: usize,
    rows: &[Vec<String>],
    what: &str,
) -> Result<Vec<Vec<RealElement>>, InputError> {
    check_table(ambient_dim, rows, what)?;
    rows.iter()
        .enumerate()
        .map(|(k, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| parse_real(s, &format!("{what}[{}][{}]", k + 1, j + 1)))
                .collect()
        })
        .collect()
}

impl JobInput {
    pub fn spec(&self) -> Result<GroupSpec, InputError> {
        if self.generators.is_empty() {
            return Err(InputError::new("at least one generator is required"));
        }
        let gens = parse_vectors(self.ambient_dim, &self.generators, "generators")?;
        let spec =
            GroupSpec::new(self.ambient_dim, gens).map_err(|e| InputError::new(e.to_string()))?;
        if self.force_i.is_empty() {
            return Ok(spec);
        }
        let forced = self.forced_choices()?;
        spec.with_forced_choices(forced)
            .map_err(|e| InputError::new(e.to_string()))
    }

    /// Forced I_k sets, converted to 0-based indices.
    pub fn forced_choices(&self) -> Result<BTreeMap<usize, BTreeSet<usize>>, InputError> {
        let m = self.generators.len();
        let mut out = BTreeMap::new();
        for (key, js) in &self.force_i {
            let k: usize = key.trim().parse().map_err(|_| {
                InputError::new(format!("force_I key {key:?} is not a generator number"))
            })?;
            if k == 0 || k > m {
                return Err(InputError::new(format!(
                    "force_I key {k} is out of range 1..={m}"
                )));
            }
            let mut set = BTreeSet::new();
            for &j in js {
                if j == 0 || j > self.ambient_dim {
                    return Err(InputError::new(format!(
                        "force_I[{k}] index {j} is out of range 1..={}",
                        self.ambient_dim
                    )));
                }
                set.insert(j - 1);
            }
            out.insert(k - 1, set);
        }
        Ok(out)
    }

    /// Generator entries as doubles. Grammar expressions are evaluated
    /// exactly first; anything else must be a decimal literal.
    pub fn float_generators(&self) -> Result<Vec<Vec<f64>>, InputError> {
        check_table(self.ambient_dim, &self.generators, "generators")?;
        if self.generators.is_empty() {
            return Err(InputError::new("at least one generator is required"));
        }
        self.generators
            .iter()
            .enumerate()
            .map(|(k, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| {
                        let location = format!("generators[{}][{}]", k + 1, j + 1);
                        match realparse::parse(s) {
                            Ok(x) => Ok(x.to_f64()),
                            Err(e) => match s.trim().parse::<f64>() {
                                Ok(x) if x.is_finite() => Ok(x),
                                _ => Err(InputError::new(format!(
                                    "{location}: not an expression or a finite decimal ({e})"
                                ))),
                            },
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInput {
    pub ambient_dim: usize,
    /// Basis of the vector part E.
    #[serde(default)]
    pub subspace: Vec<Vec<String>>,
    /// Generators of the discrete part D.
    #[serde(default)]
    pub lattice: Vec<Vec<String>>,
}

impl GroupInput {
    fn build(&self, name: &str) -> Result<ClosedGroup, InputError> {
        let e = parse_vectors(
            self.ambient_dim,
            &self.subspace,
            &format!("{name}.subspace"),
        )?;
        let d = parse_vectors(self.ambient_dim, &self.lattice, &format!("{name}.lattice"))?;
        ClosedGroup::new(self.ambient_dim, e, d)
            .map_err(|err| InputError::new(format!("{name}: {err}")))
    }
}

/// A homomorphism (λ, c) ↦ (Aλ, Bc) between closed groups E + D.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismInput {
    pub domain: GroupInput,
    pub codomain: GroupInput,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<String>>,
    #[serde(rename = "B", default)]
    pub b: Vec<Vec<i64>>,
}

pub struct MorphismJob {
    pub domain: ClosedGroup,
    pub codomain: ClosedGroup,
    pub a: MatrixF,
    pub b: MatrixZ,
}

fn matrix_rows<T>(
    rows: Vec<Vec<T>>,
    shape: (usize, usize),
    name: &str,
) -> Result<Vec<Vec<T>>, InputError> {
    let (r, c) = shape;
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(InputError::new(format!("{name} must be {r} x {c}")));
    }
    Ok(rows)
}

impl MorphismInput {
    pub fn build(&self) -> Result<MorphismJob, InputError> {
        let domain = self.domain.build("domain")?;
        let codomain = self.codomain.build("codomain")?;
        let a_shape = (codomain.e_basis().len(), domain.e_basis().len());
        let b_shape = (codomain.d_gens().len(), domain.d_gens().len());
        let a_rows = self
            .a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| parse_real(s, &format!("A[{}][{}]", i + 1, j + 1)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let a_rows = matrix_rows(a_rows, a_shape, "A")?;
        let b_rows: Vec<Vec<BigInt>> = self
            .b
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let b_rows = matrix_rows(b_rows, b_shape, "B")?;
        let a =
            MatrixF::from_rows(a_rows, a_shape.1).map_err(|e| InputError::new(e.to_string()))?;
        let b =
            MatrixZ::from_rows(b_rows, b_shape.1).map_err(|e| InputError::new(e.to_string()))?;
        Ok(MorphismJob {
            domain,
            codomain,
            a,
            b,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationInput {
    pub values: Vec<f64>,
}
