use crate::error::{Error, Result};

/// Probabilities are clamped to `[EPSILON, 1 - EPSILON]` inside the loss.
pub const EPSILON: f64 = 1e-12;

/// Mean binary cross-entropy.
pub fn bce_loss(probs: &[f64], labels: &[u8]) -> Result<f64> {
    if probs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            found: probs.len(),
        });
    }
    if probs.is_empty() {
        return Err(Error::Empty);
    }
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(EPSILON, 1.0 - EPSILON);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    Ok(total / probs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_flip_is_ln2() {
        let l = bce_loss(&[0.5; 4], &[0, 1, 1, 0]).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn perfect_prediction_is_near_zero() {
        let l = bce_loss(&[1.0, 0.0, 1.0], &[1, 0, 1]).unwrap();
        assert!((0.0..=1e-10).contains(&l));
    }

    #[test]
    fn completely_wrong_is_large() {
        let l = bce_loss(&[0.0, 1.0], &[1, 0]).unwrap();
        assert!((l + EPSILON.ln()).abs() < 1e-3);
        assert!(l > 27.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(bce_loss(&[0.5], &[0, 1]).is_err());
    }
}
