use crate::error::{Error, Result};
use crate::finite::{DoublyStochastic, ProbabilityVector};
use crate::linalg::{AbelianFamily, ComplexMatrix, Unitary};

/// Finite sample of a compact metric space: ordered points in `ℝᵈ` with the
/// Euclidean metric. Points are labelled by their index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpace {
    dim: usize,
    coords: Vec<Vec<f64>>,
}

impl GridSpace {
    pub fn new(dim: usize, coords: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one point and dimension".into()));
        }
        for (i, p) in coords.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidGrid(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGrid(format!("point {i} is not finite")));
            }
        }
        if dim == 1 {
            if let Some(i) = (1..coords.len()).find(|&i| coords[i][0] <= coords[i - 1][0]) {
                return Err(Error::InvalidGrid(format!(
                    "coordinates must increase strictly (point {i})"
                )));
            }
        } else {
            let mut sorted: Vec<&Vec<f64>> = coords.iter().collect();
            sorted.sort_by(|a, b| {
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGrid("grid points must be distinct".into()));
            }
        }
        Ok(GridSpace { dim, coords })
    }

    /// One-dimensional grid.
    pub fn line(coords: Vec<f64>) -> Result<Self> {
        Self::new(1, coords.into_iter().map(|x| vec![x]).collect())
    }

    /// `lo + i·step` for `i = 0, …, ⌊(hi − lo)/step⌉`.
    pub fn uniform(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(hi >= lo) {
            return Err(Error::InvalidGrid(format!(
                "uniform grid on [{lo}, {hi}] with step {step}"
            )));
        }
        let ratio = (hi - lo) / step;
        let count = (ratio + 1e-9).floor() as usize;
        if (ratio - count as f64).abs() <= 1e-9 && count > 0 {
            let c = count as f64;
            return Self::line((0..=count).map(|i| (lo * (c - i as f64) + hi * i as f64) / c).collect());
        }
        Self::line((0..=count).map(|i| lo + i as f64 * step).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.coords
    }

    /// First coordinate of point `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.coords[i][0]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.coords[i]
            .iter()
            .zip(&self.coords[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// An abelian family at every grid point, with common `n` and `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    space: GridSpace,
    families: Vec<AbelianFamily>,
}

impl MatrixField {
    pub fn new(space: GridSpace, families: Vec<AbelianFamily>) -> Result<Self> {
        if families.len() != space.len() {
            return Err(Error::InvalidGrid(format!(
                "{} families for {} grid points",
                families.len(),
                space.len()
            )));
        }
        let (n, m) = (families[0].n(), families[0].m());
        if let Some(i) = families.iter().position(|f| f.n() != n || f.m() != m) {
            return Err(Error::DimensionMismatch(format!(
                "family at point {i} has shape (n={}, m={}), expected (n={n}, m={m})",
                families[i].n(),
                families[i].m()
            )));
        }
        Ok(MatrixField { space, families })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(space: GridSpace, f: impl Fn(&[f64]) -> Result<AbelianFamily>) -> Result<Self> {
        let families = space.points().iter().map(|p| f(p)).collect::<Result<Vec<_>>>()?;
        Self::new(space, families)
    }

    pub fn space(&self) -> &GridSpace {
        &self.space
    }

    pub fn families(&self) -> &[AbelianFamily] {
        &self.families
    }

    pub fn family(&self, i: usize) -> &AbelianFamily {
        &self.families[i]
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn n(&self) -> usize {
        self.families[0].n()
    }

    pub fn m(&self) -> usize {
        self.families[0].m()
    }

    pub fn max_abs(&self) -> f64 {
        self.families.iter().map(AbelianFamily::max_abs).fold(0.0, f64::max)
    }
}

/// Errors unless both fields live on the same grid with the same shape.
pub(crate) fn check_compatible(a: &MatrixField, b: &MatrixField) -> Result<()> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch);
    }
    if a.n() != b.n() || a.m() != b.m() {
        return Err(Error::DimensionMismatch(format!(
            "fields of shape (n={}, m={}) and (n={}, m={})",
            a.n(),
            a.m(),
            b.n(),
            b.m()
        )));
    }
    Ok(())
}

/// A doubly stochastic matrix at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct DSField {
    space: GridSpace,
    matrices: Vec<DoublyStochastic>,
}

impl DSField {
    pub fn new(space: GridSpace, matrices: Vec<DoublyStochastic>) -> Result<Self> {
        if matrices.len() != space.len() {
            return Err(Error::InvalidGrid(format!(
                "{} matrices for {} grid points",
                matrices.len(),
                space.len()
            )));
        }
        let n = matrices[0].n();
        if matrices.iter().any(|x| x.n() != n) {
            return Err(Error::DimensionMismatch("matrices of different sizes".into()));
        }
        Ok(DSField { space, matrices })
    }

    pub fn space(&self) -> &GridSpace {
        &self.space
    }

    pub fn matrices(&self) -> &[DoublyStochastic] {
        &self.matrices
    }

    pub fn get(&self, i: usize) -> &DoublyStochastic {
        &self.matrices[i]
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `‖X_{k+1} − X_k‖_F` for consecutive grid points.
    pub fn increments(&self) -> Vec<f64> {
        self.matrices
            .windows(2)
            .map(|w| w[1].frobenius_distance(&w[0]))
            .collect()
    }

    pub fn max_increment(&self) -> f64 {
        self.increments().into_iter().fold(0.0, f64::max)
    }
}

/// A mixture `Σ tᵢ Wᵢ(x)* · Wᵢ(x)` over a grid with one global weight vector.
///
/// Each unitary factors as `Wᵢ(x) = L(x) Mᵢ(c(x)) R(x)`: the middle factor
/// depends only on the cell `c(x)` containing `x`, while `L` and `R` carry
/// the per-point diagonalizers.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureField {
    space: GridSpace,
    weights: ProbabilityVector,
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
    middles: Vec<Vec<Unitary>>,
    left: Vec<Unitary>,
    right: Vec<Unitary>,
}

impl MixtureField {
    pub fn new(
        space: GridSpace,
        weights: ProbabilityVector,
        cells: Vec<Vec<usize>>,
        middles: Vec<Vec<Unitary>>,
        left: Vec<Unitary>,
        right: Vec<Unitary>,
    ) -> Result<Self> {
        let len = space.len();
        let mut cell_of = vec![usize::MAX; len];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidGrid(format!("cell {c} is empty")));
            }
            for &p in cell {
                if p >= len || cell_of[p] != usize::MAX {
                    return Err(Error::InvalidGrid(format!(
                        "cells do not partition the grid (point {p})"
                    )));
                }
                cell_of[p] = c;
            }
        }
        if let Some(p) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidGrid(format!("point {p} belongs to no cell")));
        }
        if middles.len() != cells.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} middle-unitary lists for {} cells",
                middles.len(),
                cells.len()
            )));
        }
        if middles.iter().any(|ms| ms.len() != weights.len()) {
            return Err(Error::DimensionMismatch(
                "every cell needs one middle unitary per weight".into(),
            ));
        }
        if left.len() != len || right.len() != len {
            return Err(Error::DimensionMismatch(
                "one left and one right unitary per grid point are required".into(),
            ));
        }
        let n = left[0].dim();
        let dims_ok = left.iter().chain(&right).chain(middles.iter().flatten()).all(|u| u.dim() == n);
        if !dims_ok {
            return Err(Error::DimensionMismatch("unitaries of different dimensions".into()));
        }
        Ok(MixtureField {
            space,
            weights,
            cells,
            cell_of,
            middles,
            left,
            right,
        })
    }

    pub fn space(&self) -> &GridSpace {
        &self.space
    }

    pub fn weights(&self) -> &ProbabilityVector {
        &self.weights
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_of(&self, point: usize) -> usize {
        self.cell_of[point]
    }

    pub fn middles(&self) -> &[Vec<Unitary>] {
        &self.middles
    }

    pub fn left(&self) -> &[Unitary] {
        &self.left
    }

    pub fn right(&self) -> &[Unitary] {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left[0].dim()
    }

    /// `Wᵢ(x)` at grid point `point`.
    pub fn unitary(&self, point: usize, term: usize) -> ComplexMatrix {
        let middle = self.middles[self.cell_of[point]][term].matrix();
        &(self.left[point].matrix() * middle) * self.right[point].matrix()
    }

    /// `max_j ‖A_j(x) − Σᵢ tᵢ Wᵢ(x)* B_j(x) Wᵢ(x)‖_max` at one point.
    pub fn residual_at(&self, point: usize, a: &AbelianFamily, b: &AbelianFamily) -> f64 {
        let n = self.dim();
        let ws: Vec<(f64, ComplexMatrix)> = self
            .weights
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, t)| **t != 0.0)
            .map(|(i, t)| (*t, self.unitary(point, i)))
            .collect();
        a.members()
            .iter()
            .zip(b.members())
            .map(|(aj, bj)| {
                let mut acc = ComplexMatrix::zeros(n, n);
                for (t, w) in &ws {
                    acc = &acc + &bj.conjugate_by(w).scale(*t);
                }
                aj.max_abs_diff(&acc)
            })
            .fold(0.0, f64::max)
    }

    /// Residual at every grid point.
    pub fn residuals(&self, a: &MatrixField, b: &MatrixField) -> Result<Vec<f64>> {
        check_compatible(a, b)?;
        if a.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        if a.n() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "mixture of dimension {} for fields with n = {}",
                self.dim(),
                a.n()
            )));
        }
        Ok((0..self.space.len())
            .map(|p| self.residual_at(p, a.family(p), b.family(p)))
            .collect())
    }

    pub fn max_residual(&self, a: &MatrixField, b: &MatrixField) -> Result<f64> {
        Ok(self.residuals(a, b)?.into_iter().fold(0.0, f64::max))
    }
}
