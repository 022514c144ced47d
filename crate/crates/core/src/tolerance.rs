/// Numerical slack used throughout the crate.
///
/// The relative tolerances are scaled by `1 + ‖A‖_max` of the matrices they
/// are applied to; `cert` is an absolute bound on certificate residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub commute: f64,
    pub diagonal: f64,
    pub feasibility: f64,
    pub unitary: f64,
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-9,
            commute: 1e-9,
            diagonal: 1e-8,
            feasibility: 1e-8,
            unitary: 1e-10,
            cert: 1e-6,
        }
    }
}

impl Tolerances {
    /// Absolute feasibility slack for an eigenvalue matrix of the given max-norm.
    pub fn feasibility_for(&self, scale: f64) -> f64 {
        self.feasibility * (1.0 + scale)
    }
}
