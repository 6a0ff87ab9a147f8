//! Agreement metrics between an estimated and a reference trace.

use crate::error::{Error, Result};
use crate::trace::EnfTrace;

/// Pearson correlation of the two value sequences.
///
/// Both traces must already be aligned (see [`crate::align_traces`]).
/// A constant input is reported as [`Error::ZeroVariance`] rather than NaN.
pub fn pearson_cc(a: &EnfTrace, b: &EnfTrace) -> Result<f64> {
    pearson_cc_slices(a.values(), b.values())
}

pub fn pearson_cc_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: a.len(),
        });
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Mean absolute error in Hz.
pub fn mae(a: &EnfTrace, b: &EnfTrace) -> Result<f64> {
    mae_slices(a.values(), b.values())
}

pub fn mae_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(values: &[f64]) -> EnfTrace {
        EnfTrace::new(0.0, 1.0, values.to_vec()).unwrap()
    }

    #[test]
    fn self_correlation_is_one() {
        let a = t(&[50.00, 50.01, 49.99]);
        assert!((pearson_cc(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_ramp_is_minus_one() {
        let cc = pearson_cc(&t(&[1.0, 2.0, 3.0]), &t(&[3.0, 2.0, 1.0])).unwrap();
        assert!((cc + 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_correlation() {
        // cov = 5.5, var_a = 5, var_b = 8.75 (sums of squares about the mean)
        // cc = 5.5 / sqrt(5 * 8.75) = 0.98270...
        let cc = pearson_cc(&t(&[1.0, 2.0, 3.0, 4.0]), &t(&[1.0, 2.0, 3.0, 5.0])).unwrap();
        assert!((cc - 0.9827).abs() < 1e-4, "{cc}");
    }

    #[test]
    fn constant_input_is_an_error() {
        let err = pearson_cc(&t(&[50.0, 50.0, 50.0]), &t(&[1.0, 2.0, 3.0])).unwrap_err();
        assert_eq!(err.to_string(), "zero variance");
    }

    #[test]
    fn mae_examples() {
        let a = t(&[50.00, 50.02]);
        assert_eq!(mae(&a, &a).unwrap(), 0.0);
        let m = mae(&a, &t(&[50.01, 50.00])).unwrap();
        assert!((m - 0.015).abs() < 1e-12);
        assert!(mae(&a, &t(&[50.0])).is_err());
    }

    proptest! {
        #[test]
        fn cc_invariant_under_positive_affine_maps(
            a in prop::collection::vec(-1.0f64..1.0, 3..40),
            scale in 0.01f64..100.0,
            shift in -100.0f64..100.0,
            seed in any::<u64>(),
        ) {
            let b: Vec<f64> = a.iter().enumerate()
                .map(|(i, x)| x * 0.3 + ((i as u64).wrapping_mul(seed | 1) % 97) as f64 / 97.0)
                .collect();
            let mapped: Vec<f64> = a.iter().map(|x| scale * x + shift).collect();
            if let (Ok(c1), Ok(c2)) = (pearson_cc_slices(&a, &b), pearson_cc_slices(&mapped, &b)) {
                prop_assert!((c1 - c2).abs() < 1e-12, "{} vs {}", c1, c2);
            }
        }

        #[test]
        fn mae_is_symmetric(a in prop::collection::vec(40.0f64..60.0, 1..50), off in -1.0f64..1.0) {
            let b: Vec<f64> = a.iter().rev().map(|x| x + off).collect();
            prop_assert_eq!(mae_slices(&a, &b).unwrap(), mae_slices(&b, &a).unwrap());
            prop_assert_eq!(mae_slices(&a, &a).unwrap(), 0.0);
        }
    }
}
