//! `cdim`: complex dimension, density and M_H reports for finitely
//! generated subgroups of Rⁿ.

mod input;
mod report;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use cdim_core::dimension::{
    build_mh, build_mh_from_floats, closure_structure, densify, epsilon_net_report, DimensionError,
    FloatParams, MhReport, OracleParams, OracleTarget,
};
use cdim_core::morphism::{cdim, image, is_injective, is_surjective, kernel, ClosedHom};
use cdim_core::relation::{
    delta_to_rational, find_integer_relation, RelationError, RelationParams,
};
use cdim_core::GroupSpec;
use clap::{Args, Parser, Subcommand};
use input::{InputError, JobInput, Mode, MorphismInput, RelationInput};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "cdim",
    version,
    about = "Complex dimension of closures of subgroups of R^n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
struct Options {
    /// Job file; stdin when absent.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Overrides the job file's mode.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Scaling digits s for relation finding.
    #[arg(long, global = true, default_value_t = 12)]
    float_precision: u32,
    #[arg(long, global = true, default_value_t = 0.99)]
    lll_delta: f64,
    /// Largest accepted relation coefficient.
    #[arg(long, global = true, default_value_t = 1e6)]
    max_coeff: f64,
    /// JSON output; `--json false` prints `key: value` lines.
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    json: bool,
    /// Cross-check density with the epsilon-net sampler.
    #[arg(long, global = true)]
    oracle: bool,
    /// Coefficient bound K for the sampler.
    #[arg(long, global = true, default_value_t = 1000)]
    bound: u64,
    #[arg(long, global = true, default_value_t = 0.01)]
    epsilon: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Complex dimension p + ri and the M_H summary.
    Dim,
    /// Density in the span and in R^n.
    Dense,
    /// Full M_H construction trace.
    Mh,
    /// A generator that makes the group dense in its span.
    Densify,
    /// Candidate decomposition of the closure into vector and discrete parts.
    Closure,
    /// Dimension laws for a homomorphism of closed groups.
    Morphism,
    /// Integer relation among floating-point values.
    Relation,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<DimensionError> for Failure {
    fn from(e: DimensionError) -> Self {
        match e {
            DimensionError::InternalInvariantViolation(_) => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<RelationError> for Failure {
    fn from(e: RelationError) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

impl Options {
    fn read_input(&self) -> Result<String, Failure> {
        match &self.input {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display()))),
            None => {
                let mut text = String::new();
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| Failure::Input(format!("cannot read stdin: {e}")))?;
                Ok(text)
            }
        }
    }

    fn relation_params(&self) -> Result<RelationParams, Failure> {
        delta_to_rational(self.lll_delta)?;
        if !(self.max_coeff >= 1.0) || !self.max_coeff.is_finite() {
            return Err(Failure::Input("--max-coeff must be at least 1".into()));
        }
        if self.float_precision == 0 || self.float_precision > 15 {
            return Err(Failure::Input("--float-precision must be in 1..=15".into()));
        }
        Ok(RelationParams {
            scale_digits: self.float_precision,
            max_coeff: self.max_coeff as u64,
            delta: self.lll_delta,
        })
    }
}

/// A parsed job and the M_H report for it.
struct Job {
    input: JobInput,
    spec: Option<GroupSpec>,
    report: MhReport,
}

fn run_job(opts: &Options) -> Result<Job, Failure> {
    let input: JobInput = input::from_json(&opts.read_input()?)?;
    let mode = opts.mode.or(input.mode).unwrap_or(Mode::Exact);
    match mode {
        Mode::Exact => {
            let spec = input.spec()?;
            let report = build_mh(&spec)?;
            Ok(Job {
                input,
                spec: Some(spec),
                report,
            })
        }
        Mode::Float => {
            if !input.force_i.is_empty() {
                eprintln!("warning: force_I is ignored in float mode");
            }
            let floats = input.float_generators()?;
            let params = FloatParams {
                relation: opts.relation_params()?,
                ..FloatParams::default()
            };
            let report = build_mh_from_floats(input.ambient_dim, &floats, &params)?;
            Ok(Job {
                input,
                spec: None,
                report,
            })
        }
    }
}

fn exact_spec<'a>(job: &'a Job, command: &str) -> Result<&'a GroupSpec, Failure> {
    job.spec
        .as_ref()
        .ok_or_else(|| Failure::Input(format!("{command} needs exact mode")))
}

fn density_fields(job: &Job) -> Value {
    let d = job.report.complex_dim();
    json!({
        "dense_in_span": d.r == 0,
        "dense_in_ambient": d.r == 0 && d.p == job.input.ambient_dim,
        "heuristic": job.report.heuristic,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

fn cmd_dim(opts: &Options) -> Outcome {
    let job = run_job(opts)?;
    let rep = &job.report;
    let d = rep.complex_dim();
    let fields = json!({
        "p": d.p,
        "r": d.r,
        "q": rep.q,
        "rank_MH": rep.rank,
        "dimension": d.to_string(),
        "basis_indices": report::one_based(&rep.basis_indices),
        "I": report::index_sets(rep),
        "MH": report::matrix(&rep.mh),
    });
    Ok(merge(fields, density_fields(&job)))
}

fn cmd_dense(opts: &Options) -> Outcome {
    let job = run_job(opts)?;
    let mut out = merge(
        json!({ "dimension": report::dimension(job.report.complex_dim()) }),
        density_fields(&job),
    );
    if opts.oracle {
        let spec = exact_spec(&job, "--oracle")?;
        let params = OracleParams {
            coefficient_bound: opts.bound,
            epsilon: opts.epsilon,
            ..OracleParams::default()
        };
        let target = OracleTarget {
            edges: job.report.basis_indices.clone(),
        };
        let rep = epsilon_net_report(spec, &target, &params)?;
        let exact = job.report.complex_dim().r == 0;
        out = merge(
            out,
            json!({ "oracle": {
                "edges": report::one_based(&target.edges),
                "bound": opts.bound,
                "epsilon": opts.epsilon,
                "covered": rep.covered,
                "samples": rep.samples,
                "cells": rep.cells,
                "uncovered_cells": rep.uncovered_cells,
                "agrees": rep.covered == exact,
            }}),
        );
    }
    Ok(out)
}

fn cmd_mh(opts: &Options) -> Outcome {
    let job = run_job(opts)?;
    let rep = &job.report;
    Ok(json!({
        "q": rep.q,
        "basis_indices": report::one_based(&rep.basis_indices),
        "MH": report::matrix(&rep.mh),
        "rank_MH": rep.rank,
        "dimension": report::dimension(rep.complex_dim()),
        "generators": report::mh_detail(rep),
        "heuristic": rep.heuristic,
    }))
}

fn cmd_densify(opts: &Options) -> Outcome {
    let job = run_job(opts)?;
    let d = densify(exact_spec(&job, "densify")?)?;
    Ok(json!({
        "generator": report::reals(&d.vector),
        "radicands": d.radicands,
        "dimension": report::dimension(d.dimension),
        "verified": true,
        "heuristic": false,
    }))
}

fn cmd_closure(opts: &Options) -> Outcome {
    let job = run_job(opts)?;
    let c = closure_structure(exact_spec(&job, "closure")?)?;
    Ok(json!({
        "dimension": report::dimension(job.report.complex_dim()),
        "basis_indices": report::one_based(&c.basis_indices),
        "vector_part_span_coordinates": c.f_basis.iter().map(|v| report::ints(v)).collect::<Vec<_>>(),
        "vector_part": c.f_basis_ambient.iter().map(|v| report::reals(v)).collect::<Vec<_>>(),
        "discrete_generators": report::one_based(&c.discrete_generators),
        "heuristic": false,
    }))
}

fn cmd_morphism(opts: &Options) -> Outcome {
    let spec: MorphismInput = input::from_json(&opts.read_input()?)?;
    let job = spec.build()?;
    let f = ClosedHom::new(job.domain, job.codomain, job.a, job.b)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let (dd, dc) = (cdim(&f.domain), cdim(&f.codomain));
    let injective = is_injective(&f);
    let surjective = is_surjective(&f);
    let laws = json!({
        "injective_modulus_bound": !injective || dd.modulus_squared() <= dc.modulus_squared(),
        "surjective_modulus_bound": !surjective || dd.modulus_squared() >= dc.modulus_squared(),
        "invertible_preserves_dimension": !(injective && surjective) || dd == dc,
    });
    let im = image(&f).map_err(|e| Failure::Input(e.to_string()))?;
    let ker = kernel(&f).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(json!({
        "domain_dimension": report::dimension(dd),
        "codomain_dimension": report::dimension(dc),
        "injective": injective,
        "surjective": surjective,
        "image": report::closed_group(&im),
        "kernel": report::closed_group(&ker),
        "laws": laws,
    }))
}

fn cmd_relation(opts: &Options) -> Outcome {
    let job: RelationInput = input::from_json(&opts.read_input()?)?;
    let found = find_integer_relation(&job.values, &opts.relation_params()?)?;
    Ok(match found {
        Some(rel) => json!({
            "found": true,
            "coefficients": report::ints(&rel.coefficients),
            "residual": rel.residual,
            "heuristic": true,
        }),
        None => json!({ "found": false, "heuristic": true }),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, result) = match cli.command {
        Command::Dim => ("dim", cmd_dim(&cli.opts)),
        Command::Dense => ("dense", cmd_dense(&cli.opts)),
        Command::Mh => ("mh", cmd_mh(&cli.opts)),
        Command::Densify => ("densify", cmd_densify(&cli.opts)),
        Command::Closure => ("closure", cmd_closure(&cli.opts)),
        Command::Morphism => ("morphism", cmd_morphism(&cli.opts)),
        Command::Relation => ("relation", cmd_relation(&cli.opts)),
    };
    match result {
        Ok(fields) => {
            let out = report::envelope(name, fields);
            if cli.opts.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out).expect("serializable")
                );
            } else {
                println!("{}", report::plain(&out));
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
