use super::ds::DoublyStochastic;
use crate::error::{Error, Result};

const TRIANGLE_SLACK: f64 = 1e-10;

/// Chain-link test for 3×3 unistochasticity.
///
/// For a row pair `(r, s)` the links `√(X_{rk} X_{sk})` must satisfy the
/// triangle inequality. One pair suffices in exact arithmetic; all three are
/// checked so the verdict is invariant under row permutations.
pub fn unistochastic3_check(x: &DoublyStochastic) -> Result<bool> {
    if x.n() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            actual: x.n(),
        });
    }
    Ok([(0, 1), (0, 2), (1, 2)]
        .iter()
        .all(|&(r, s)| triangle_holds(&chain_links(x, r, s))))
}

/// `√(X_{rk} X_{sk})` for `k = 1, 2, 3`.
pub fn chain_links(x: &DoublyStochastic, r: usize, s: usize) -> [f64; 3] {
    let mut links = [0.0; 3];
    for (k, l) in links.iter_mut().enumerate() {
        *l = (x.get(r, k).max(0.0) * x.get(s, k).max(0.0)).sqrt();
    }
    links
}

fn triangle_holds(l: &[f64; 3]) -> bool {
    (0..3).all(|k| {
        let others: f64 = (0..3).filter(|&q| q != k).map(|q| l[q]).sum();
        l[k] <= others + TRIANGLE_SLACK
    })
}
