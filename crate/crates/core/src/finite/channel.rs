use nalgebra::DVector;

use super::ds::DoublyStochastic;
use crate::error::{Error, Result};

/// Action `diag(d) ↦ diag(X d)` of the diagonal channel induced by `X`.
pub fn ds_as_diagonal_channel(x: &DoublyStochastic, d: &[f64]) -> Result<Vec<f64>> {
    if d.len() != x.n() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a {}x{} matrix",
            d.len(),
            x.n(),
            x.n()
        )));
    }
    let out = x.entries() * DVector::from_column_slice(d);
    Ok(out.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unital_and_trace_preserving() {
        let x = DoublyStochastic::from_rows(&[
            vec![0.2, 0.8, 0.0],
            vec![0.5, 0.1, 0.4],
            vec![0.3, 0.1, 0.6],
        ])
        .unwrap();
        for v in ds_as_diagonal_channel(&x, &[1.0, 1.0, 1.0]).unwrap() {
            assert!((v - 1.0).abs() < 1e-15);
        }
        let d = [3.0, -1.0, 0.5];
        let out = ds_as_diagonal_channel(&x, &d).unwrap();
        assert!((out.iter().sum::<f64>() - 2.5).abs() < 1e-14);
        assert!(ds_as_diagonal_channel(&x, &[1.0]).is_err());
    }
}
