//! The sign-flip and non-unistochastic counterexamples on `[−1, 1]`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use super::approx::approx_hull_membership;
use super::continuation::continuation_ds_probe;
use super::grid::{GridSpace, MatrixField};
use super::pointwise::pointwise_majorization_check;
use crate::error::{Error, Result};
use crate::finite::{unistochastic3_check, DoublyStochastic};
use crate::linalg::{AbelianFamily, ComplexMatrix};
use crate::tolerance::Tolerances;

/// `ε` used for the approximate certificate in every demo.
pub const DEMO_EPSILON: f64 = 0.05;

/// Below this `|sin x cos x|` the non-unistochastic field degenerates to a
/// permutation and no verdict is expected.
pub const DEGENERACY_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Demo {
    /// `diag(x, −x)` against `diag(|x|, −|x|)`.
    SignFlip,
    /// `sin²x I + cos²x C` with `C` the cyclic shift.
    CyclicField,
    /// Diagonal pairs related by the cyclic field.
    CyclicPairs,
}

impl Demo {
    pub fn name(self) -> &'static str {
        match self {
            Demo::SignFlip => "prop31",
            Demo::CyclicField => "prop33",
            Demo::CyclicPairs => "cor34",
        }
    }
}

impl FromStr for Demo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop31" => Ok(Demo::SignFlip),
            "prop33" => Ok(Demo::CyclicField),
            "cor34" => Ok(Demo::CyclicPairs),
            other => Err(Error::UnknownDemo(other.to_string())),
        }
    }
}

impl fmt::Display for Demo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `X(x) = sin²x I + cos²x C`, rows `(s², c², 0), (0, s², c²), (c², 0, s²)`.
pub fn cyclic_field_matrix(x: f64) -> DMatrix<f64> {
    let (s, c) = x.sin_cos();
    let (s2, c2) = (s * s, c * c);
    DMatrix::from_row_slice(3, 3, &[s2, c2, 0.0, 0.0, s2, c2, c2, 0.0, s2])
}

/// The pair `(A, B)` of the demo on a uniform grid of `[−1, 1]`.
///
/// The cyclic demos share the fields `A = (diag(s², 0, c²), diag(c², s², 0))`
/// and `B = (diag(1, 0, 0), diag(0, 1, 0))`, for which `X(x) B = A`.
pub fn demo_fields(demo: Demo, step: f64) -> Result<(MatrixField, MatrixField)> {
    let space = GridSpace::uniform(-1.0, 1.0, step)?;
    let diag = |cols: &[[f64; 3]]| AbelianFamily::new(cols.iter().map(|d| ComplexMatrix::diagonal(d)).collect());
    match demo {
        Demo::SignFlip => {
            let a = MatrixField::from_fn(space.clone(), |p| {
                AbelianFamily::new(vec![ComplexMatrix::diagonal(&[p[0], -p[0]])])
            })?;
            let b = MatrixField::from_fn(space, |p| {
                AbelianFamily::new(vec![ComplexMatrix::diagonal(&[p[0].abs(), -p[0].abs()])])
            })?;
            Ok((a, b))
        }
        Demo::CyclicField | Demo::CyclicPairs => {
            let a = MatrixField::from_fn(space.clone(), |p| {
                let (s, c) = p[0].sin_cos();
                let (s2, c2) = (s * s, c * c);
                diag(&[[s2, 0.0, c2], [c2, s2, 0.0]])
            })?;
            let b = MatrixField::from_fn(space, |_| diag(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))?;
            Ok((a, b))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpSummary {
    pub max_jump: f64,
    pub left_x: f64,
    pub right_x: f64,
    /// Always `"heuristic"`: a jump suggests, but does not prove, that no
    /// continuous witness exists.
    pub evidence: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproxSummary {
    pub epsilon: f64,
    pub residual: f64,
    pub bound: f64,
    pub cells: usize,
    pub terms: usize,
}

/// One grid point of the plot-ready series.
#[derive(Debug, Clone, Serialize)]
pub struct DemoRow {
    pub x: f64,
    pub pointwise: bool,
    /// `‖X(x) − X(x_prev)‖_F` from the continuation probe.
    pub jump: Option<f64>,
    pub residual: Option<f64>,
    pub ds_valid: Option<bool>,
    pub unistochastic: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub name: &'static str,
    pub step: f64,
    pub points: usize,
    pub pointwise_majorized: bool,
    pub pointwise_failures: Vec<usize>,
    pub continuation: Option<JumpSummary>,
    /// Whether the checked matrix field is doubly stochastic at every point.
    pub ds_valid_everywhere: Option<bool>,
    /// Points with `|sin x cos x| > DEGENERACY_CUTOFF` where the checked
    /// field was reported unistochastic.
    pub unistochastic_exceptions: Option<Vec<usize>>,
    pub approx: Option<ApproxSummary>,
    pub rows: Vec<DemoRow>,
}

/// Builds the demo fields, runs every field check on them and collects the
/// measurements.
///
/// `prop33` checks the closed-form cyclic field for double stochasticity and
/// unistochasticity; `cor34` checks the witnesses found by the continuation
/// probe instead.
pub fn demo_counterexamples(name: &str, step: f64, seed: u64, tol: &Tolerances) -> Result<DemoReport> {
    let demo: Demo = name.parse()?;
    let (a, b) = demo_fields(demo, step)?;
    let space = a.space().clone();
    let len = space.len();

    let check = pointwise_majorization_check(&a, &b, seed, tol)?;
    let mut rows: Vec<DemoRow> = (0..len)
        .map(|p| DemoRow {
            x: space.x(p),
            pointwise: !check.failures.contains(&p),
            jump: None,
            residual: None,
            ds_valid: None,
            unistochastic: None,
        })
        .collect();

    let probe = if check.majorized {
        Some(continuation_ds_probe(&a, &b, seed, tol)?)
    } else {
        None
    };
    let continuation = probe.as_ref().map(|r| {
        for (k, j) in r.jumps.iter().enumerate() {
            rows[k + 1].jump = Some(*j);
        }
        JumpSummary {
            max_jump: r.max_jump,
            left_x: space.x(r.jump_location.0),
            right_x: space.x(r.jump_location.1),
            evidence: "heuristic",
        }
    });

    let (ds_valid_everywhere, unistochastic_exceptions) = match demo {
        Demo::SignFlip => (None, None),
        Demo::CyclicField | Demo::CyclicPairs => {
            let mut exceptions = Vec::new();
            let mut all_valid = true;
            for (p, row) in rows.iter_mut().enumerate() {
                let matrix = match (demo, &probe) {
                    (Demo::CyclicPairs, Some(r)) => Ok(r.ds_field.get(p).clone()),
                    (Demo::CyclicPairs, None) => continue,
                    _ => DoublyStochastic::new(cyclic_field_matrix(row.x)),
                };
                row.ds_valid = Some(matrix.is_ok());
                let Ok(x) = matrix else {
                    all_valid = false;
                    continue;
                };
                let uni = unistochastic3_check(&x)?;
                row.unistochastic = Some(uni);
                let (s, c) = row.x.sin_cos();
                if uni && (s * c).abs() > DEGENERACY_CUTOFF {
                    exceptions.push(p);
                }
            }
            (Some(all_valid), Some(exceptions))
        }
    };

    let approx = if check.majorized {
        let cert = approx_hull_membership(&a, &b, DEMO_EPSILON, seed, tol)?;
        for (row, r) in rows.iter_mut().zip(cert.mixture.residuals(&a, &b)?) {
            row.residual = Some(r);
        }
        Some(ApproxSummary {
            epsilon: cert.epsilon,
            residual: cert.residual,
            bound: cert.bound(),
            cells: cert.mixture.cells().len(),
            terms: cert.mixture.weights().len(),
        })
    } else {
        None
    };

    Ok(DemoReport {
        name: demo.name(),
        step,
        points: len,
        pointwise_majorized: check.majorized,
        pointwise_failures: check.failures,
        continuation,
        ds_valid_everywhere,
        unistochastic_exceptions,
        approx,
        rows,
    })
}
