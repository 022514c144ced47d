use super::birkhoff::birkhoff_decompose;
use super::ds::DoublyStochastic;
use super::prob::ProbabilityVector;
use super::witness::fit_residual;
use crate::error::{Error, Result};
use crate::linalg::{AbelianFamily, ComplexMatrix, EigenColumns, Unitary};
use crate::tolerance::Tolerances;

/// Convex combination `X ↦ Σ tᵢ Wᵢ* X Wᵢ` of unitary conjugations.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMixture {
    weights: ProbabilityVector,
    unitaries: Vec<Unitary>,
}

impl UnitaryMixture {
    pub fn new(weights: ProbabilityVector, unitaries: Vec<Unitary>) -> Result<Self> {
        if weights.len() != unitaries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} unitaries",
                weights.len(),
                unitaries.len()
            )));
        }
        let n = unitaries[0].dim();
        if let Some(u) = unitaries.iter().find(|u| u.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "unitaries of dimension {n} and {}",
                u.dim()
            )));
        }
        Ok(UnitaryMixture { weights, unitaries })
    }

    pub fn single(u: Unitary) -> Self {
        UnitaryMixture {
            weights: ProbabilityVector::uniform(1),
            unitaries: vec![u],
        }
    }

    pub fn weights(&self) -> &ProbabilityVector {
        &self.weights
    }

    pub fn unitaries(&self) -> &[Unitary] {
        &self.unitaries
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].dim()
    }

    /// `Σ tᵢ Wᵢ* B Wᵢ`.
    pub fn apply(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = b.n_rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (t, w) in self.weights.weights().iter().zip(&self.unitaries) {
            if *t == 0.0 {
                continue;
            }
            out = &out + &b.conjugate_by(w.matrix()).scale(*t);
        }
        out
    }

    /// `max_j ‖A_j − Σᵢ tᵢ Wᵢ* B_j Wᵢ‖_max`.
    pub fn residual(&self, a: &AbelianFamily, b: &AbelianFamily) -> Result<f64> {
        if a.n() != b.n() || a.m() != b.m() || a.n() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "mixture of dimension {} for families (n={}, m={}) and (n={}, m={})",
                self.dim(),
                a.n(),
                a.m(),
                b.n(),
                b.m()
            )));
        }
        Ok(a
            .members()
            .iter()
            .zip(b.members())
            .map(|(aj, bj)| aj.max_abs_diff(&self.apply(bj)))
            .fold(0.0, f64::max))
    }
}

/// How a certificate was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Birkhoff,
    TTransform,
    DirectSum,
}

impl Construction {
    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Birkhoff => "birkhoff",
            Construction::TTransform => "ttransform",
            Construction::DirectSum => "direct-sum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "birkhoff" => Some(Construction::Birkhoff),
            "ttransform" => Some(Construction::TTransform),
            "direct-sum" => Some(Construction::DirectSum),
            _ => None,
        }
    }
}

/// A mixture together with its measured residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub mixture: UnitaryMixture,
    pub residual: f64,
    pub construction: Construction,
}

/// Unitary mixture from a witness `X Λ_B = Λ_A`: with `X = Σ tᵢ Pᵢ`, the
/// unitaries are `Wᵢ = V* Pᵢᵀ U` where `U`, `V` diagonalize `A`, `B`.
pub fn mixture_from_ds(
    x: &DoublyStochastic,
    eigen_a: &EigenColumns,
    eigen_b: &EigenColumns,
) -> Result<UnitaryMixture> {
    let n = x.n();
    if eigen_a.n() != n || eigen_b.n() != n || eigen_a.m() != eigen_b.m() {
        return Err(Error::DimensionMismatch(format!(
            "witness of size {n} for eigenvalue matrices {}x{} and {}x{}",
            eigen_a.n(),
            eigen_a.m(),
            eigen_b.n(),
            eigen_b.m()
        )));
    }
    let fit = fit_residual(x.entries(), &eigen_a.lambda, &eigen_b.lambda);
    let tol = Tolerances::default().feasibility_for(eigen_b.max_abs());
    if fit > tol {
        return Err(Error::NotMajorized(format!(
            "witness misfit {fit:e} exceeds {tol:e}"
        )));
    }
    let terms = birkhoff_decompose(x)?;
    let u = eigen_a.diagonalizer.matrix();
    let v_adj = eigen_b.diagonalizer.matrix().adjoint();
    let mut weights = Vec::with_capacity(terms.len());
    let mut unitaries = Vec::with_capacity(terms.len());
    for term in &terms {
        let pt = term.permutation.transpose().to_complex();
        let w = &(&v_adj * &pt) * u;
        weights.push(term.weight);
        unitaries.push(Unitary::with_tolerance(w, 1e-8)?);
    }
    UnitaryMixture::new(ProbabilityVector::new(weights)?, unitaries)
}
