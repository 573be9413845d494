//! Sensor-grid quantization and band clipping.

use crate::types::{RadarPoint, SensorSpec};

/// Snap `value` to the nearest integer multiple of `resolution`.
///
/// Ties at exactly half a bin round away from zero, so the rule is
/// sign-symmetric. `resolution` must be strictly positive.
pub fn quantize(value: f64, resolution: f64) -> f64 {
    debug_assert!(resolution > 0.0);
    (value / resolution).round() * resolution
}

/// Quantize r/phi/v_r onto the sensor grids and enforce the operational
/// bands. Returns `None` when the point falls outside a band; out-of-band
/// is a normal drop, not an error.
///
/// The band test runs on the quantized values: a point whose nearest grid
/// multiple lies outside a band is dropped, so every retained point is
/// simultaneously in band and on grid.
pub fn clip_and_quantize_point(p: &RadarPoint, spec: &SensorSpec) -> Option<RadarPoint> {
    let r = quantize(p.r, spec.range_res);
    let phi = quantize(p.phi, spec.azimuth_res);
    let v_r = quantize(p.v_r, spec.doppler_res);
    if !spec.range_band.contains(r)
        || !spec.azimuth_band.contains(phi)
        || !spec.doppler_band.contains(v_r)
    {
        return None;
    }
    Some(RadarPoint { r, phi, v_r, ..*p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Label;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point(r: f64, phi: f64, v_r: f64) -> RadarPoint {
        RadarPoint {
            r,
            phi,
            v_r,
            amplitude: 1.0,
            t: 0.0,
            sensor_id: 0,
            label: Label::Background,
        }
    }

    #[test]
    fn snaps_to_nearest_bin() {
        // 1.37 / 0.15 = 9.13..., so 9 bins.
        assert!((quantize(1.37, 0.15) - 1.35).abs() < 1e-12);
    }

    #[test]
    fn half_bin_tie_rounds_away_from_zero() {
        assert!((quantize(0.075, 0.15) - 0.15).abs() < 1e-12);
        assert!((quantize(-0.075, 0.15) + 0.15).abs() < 1e-12);
    }

    #[test]
    fn zero_is_a_fixed_point() {
        assert_eq!(quantize(0.0, 0.15), 0.0);
        assert_eq!(quantize(0.0, 1.8), 0.0);
    }

    #[test]
    fn quantization_is_idempotent_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let v = rng.random_range(-200.0..200.0);
            let res = [0.15, 1.8, 0.087][rng.random_range(0..3)];
            let q = quantize(v, res);
            assert_eq!(quantize(q, res), q, "v={v} res={res}");
            assert!((q - v).abs() <= res / 2.0 + 1e-12);
        }
    }

    #[test]
    fn out_of_band_range_is_dropped() {
        let spec = SensorSpec::default();
        assert!(clip_and_quantize_point(&point(160.0, 0.0, 0.0), &spec).is_none());
    }

    #[test]
    fn out_of_band_doppler_is_dropped() {
        let spec = SensorSpec::default();
        assert!(clip_and_quantize_point(&point(10.05, 0.0, -50.0), &spec).is_none());
    }

    #[test]
    fn on_grid_point_is_retained_unchanged() {
        let spec = SensorSpec::default();
        // Build the point from exact grid multiples so quantization is the
        // identity on it.
        let p = point(0.15 * 67.0, 0.0, 0.0);
        let q = clip_and_quantize_point(&p, &spec).unwrap();
        assert_eq!(q.r, p.r);
        assert_eq!(q.phi, 0.0);
        assert_eq!(q.v_r, 0.0);
        assert_eq!(q.amplitude, p.amplitude);
    }

    #[test]
    fn retained_points_are_in_band_and_on_grid() {
        let spec = SensorSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut retained = 0;
        for _ in 0..10_000 {
            let p = point(
                rng.random_range(-5.0..170.0),
                rng.random_range(-90.0..90.0),
                rng.random_range(-50.0..50.0),
            );
            if let Some(q) = clip_and_quantize_point(&p, &spec) {
                retained += 1;
                assert!(spec.range_band.contains(q.r));
                assert!(spec.azimuth_band.contains(q.phi));
                assert!(spec.doppler_band.contains(q.v_r));
                for (v, res) in [
                    (q.r, spec.range_res),
                    (q.phi, spec.azimuth_res),
                    (q.v_r, spec.doppler_res),
                ] {
                    let k = v / res;
                    assert!((k - k.round()).abs() < 1e-9, "{v} not on grid {res}");
                }
            }
        }
        assert!(retained > 1000);
    }
}
