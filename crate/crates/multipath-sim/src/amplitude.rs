//! Received-amplitude model.

use crate::error::SimError;

/// Amplitude of a return with the given cross-section over a path whose
/// perceived range is `range`, attenuated by one reflectivity factor per
/// surface bounce: `rcs * reflectivity_product / range^2`.
///
/// The direct path has a reflectivity product of 1 (no surface bounce);
/// a third-bounce ghost off a surface with reflectivity rho carries
/// rho^2 (two surface bounces).
pub fn amplitude_model(rcs: f64, reflectivity_product: f64, range: f64) -> Result<f64, SimError> {
    if !(range > 0.0) {
        return Err(SimError::NonPositiveRange(range));
    }
    Ok(rcs * reflectivity_product / (range * range))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn follows_inverse_square_law() {
        let near = amplitude_model(50.0, 1.0, 5.0).unwrap();
        let far = amplitude_model(50.0, 1.0, 10.0).unwrap();
        assert!((near / far - 4.0).abs() < 1e-12);
        assert!((near - 2.0).abs() < 1e-12);
    }

    #[test]
    fn surface_bounces_attenuate_multiplicatively() {
        let direct = amplitude_model(50.0, 1.0, 10.0).unwrap();
        let ghost = amplitude_model(50.0, 0.6 * 0.6, 10.0).unwrap();
        assert!((ghost / direct - 0.36).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_range() {
        assert!(amplitude_model(50.0, 1.0, 0.0).is_err());
        assert!(amplitude_model(50.0, 1.0, -3.0).is_err());
        assert!(amplitude_model(50.0, 1.0, f64::NAN).is_err());
    }
}
