//! Spherical cap volumes by slice quadrature.
//!
//! A cap of height `t` cut from a ball of radius `R` in `d` dimensions is a
//! stack of `(d-1)`-balls with squared radius `2R s - s^2` at depth `s`:
//!
//! `V = β_{d-1} ∫_0^t (2R s - s^2)^{(d-1)/2} ds`.
//!
//! The substitution `s = u^2` removes the square-root behaviour at the pole.

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, unit_ball_volume};

pub fn cap_volume(d: usize, radius: f64, height: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("cap_volume needs d >= 2"));
    }
    if !(radius.is_finite() && height.is_finite()) || radius <= 0.0 || height < 0.0 {
        return Err(Error::invalid(format!(
            "cap_volume: radius {radius} and height {height} must be finite, radius > 0, height >= 0"
        )));
    }
    if height > 2.0 * radius {
        return Err(Error::invalid(format!(
            "cap height {height} exceeds the diameter {}",
            2.0 * radius
        )));
    }
    if height > radius {
        let ball = unit_ball_volume(d) * radius.powi(d as i32);
        return Ok(ball - slice_integral(d, radius, 2.0 * radius - height));
    }
    Ok(slice_integral(d, radius, height))
}

fn slice_integral(d: usize, radius: f64, height: f64) -> f64 {
    if height == 0.0 {
        return 0.0;
    }
    let expo = (d as f64 - 1.0) / 2.0;
    let beta = unit_ball_volume(d - 1);
    // s = u^2, ds = 2u du, (2R s - s^2) = u^2 (2R - u^2)
    let f = |u: f64| {
        let u2 = u * u;
        2.0 * u * (u2 * (2.0 * radius - u2)).max(0.0).powf(expo)
    };
    let upper = height.sqrt();
    // scale the absolute tolerance to the size of the answer
    let scale = beta * height.powf(expo + 1.0) * radius.powf(expo);
    beta * adaptive_simpson(f, 0.0, upper, 1e-13 * scale.max(1e-300) / beta.max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon::segment_area;
    use std::f64::consts::PI;

    #[test]
    fn half_disk_and_hemisphere() {
        let v = cap_volume(2, 0.5, 0.5).unwrap();
        assert!((v - PI / 8.0).abs() < 1e-9 * PI / 8.0);
        let v = cap_volume(3, 1.0, 1.0).unwrap();
        assert!((v - 2.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn three_dimensional_cap_closed_form() {
        // V = π t^2 (3R - t) / 3
        for &(r, t) in &[(1.0, 0.3), (0.5, 0.01), (0.5, 0.9)] {
            let exact = PI * t * t * (3.0 * r - t) / 3.0;
            let v = cap_volume(3, r, t).unwrap();
            assert!((v - exact).abs() <= 1e-8 * exact, "{r} {t}: {v} vs {exact}");
        }
    }

    #[test]
    fn planar_segments_match_closed_form() {
        for m in 6..=60 {
            let theta = 2.0 * PI / m as f64;
            let h = 0.5 * (1.0 - (theta / 2.0).cos());
            let exact = segment_area(0.5, theta);
            let v = cap_volume(2, 0.5, h).unwrap();
            assert!((v - exact).abs() <= 1e-8 * exact, "M={m}");
        }
    }

    #[test]
    fn rejects_heights_beyond_the_diameter() {
        assert!(cap_volume(2, 0.5, 1.01).is_err());
        assert!(cap_volume(2, 0.5, -0.1).is_err());
        assert!((cap_volume(2, 0.5, 1.0).unwrap() - PI / 4.0).abs() < 1e-12);
    }
}
