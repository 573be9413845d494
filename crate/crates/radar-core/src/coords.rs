//! Planar polar/Cartesian conversion. Azimuth convention: degrees,
//! counter-clockwise positive, 0 along the +x axis (sensor boresight).

/// Convert `(r, phi)` to planar Cartesian coordinates.
pub fn polar_to_cartesian(r: f64, phi_deg: f64) -> (f64, f64) {
    let phi = phi_deg.to_radians();
    (r * phi.cos(), r * phi.sin())
}

/// Inverse of [`polar_to_cartesian`]; `phi` lands in `(-180, 180]` degrees.
pub fn cartesian_to_polar(x: f64, y: f64) -> (f64, f64) {
    (x.hypot(y), y.atan2(x).to_degrees())
}

/// Wrap an angle in degrees into `(-180, 180]`.
pub fn wrap_degrees(deg: f64) -> f64 {
    let mut d = deg % 360.0;
    if d <= -180.0 {
        d += 360.0;
    } else if d > 180.0 {
        d -= 360.0;
    }
    d
}
