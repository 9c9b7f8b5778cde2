//! Geometry of the two-angle, non-orthogonal phase-space frame.

use crate::error::{Error, Result};
use crate::scalar::{c, ci, cis, Real, C};

/// Default guard on `|cos(theta1 - theta2)|`.
pub const EPS_COS: f64 = 1e-6;

/// Validated angle pair reduced to `[0, π)²`, away from the excluded lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair<T> {
    theta1: T,
    theta2: T,
}

/// Angle pair obtained by folding arbitrary angles, with the sign flips that
/// the folding imposes on the phase-space labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Folded<T> {
    pub alpha: T,
    pub beta: T,
    pub angles: AnglePair<T>,
}

fn reduce_mod_pi<T: Real>(theta: T) -> (T, bool) {
    let pi = T::PI();
    let k = (theta / pi).floor();
    let mut r = theta - k * pi;
    let mut odd = (k.to_i64().unwrap_or(0)).rem_euclid(2) == 1;
    if r >= pi {
        r = T::zero();
        odd = !odd;
    }
    if r < T::zero() {
        r = T::zero();
    }
    (r, odd)
}

impl<T: Real> AnglePair<T> {
    /// Reduces both angles modulo π and rejects the excluded lines.
    pub fn new(theta1: T, theta2: T) -> Result<Self> {
        Self::with_eps(theta1, theta2, T::lit(EPS_COS))
    }

    pub fn with_eps(theta1: T, theta2: T, eps_cos: T) -> Result<Self> {
        if !theta1.is_finite() || !theta2.is_finite() {
            return Err(Error::InvalidInput("angles must be finite".into()));
        }
        let (t1, _) = reduce_mod_pi(theta1);
        let (t2, _) = reduce_mod_pi(theta2);
        let cd = (t1 - t2).cos();
        if cd.abs() < eps_cos {
            return Err(Error::ExcludedAngles { theta1: t1.f64(), theta2: t2.f64(), cos_diff: cd.f64() });
        }
        Ok(Self { theta1: t1, theta2: t2 })
    }

    /// Folds arbitrary angles into the fundamental domain, flipping `alpha`
    /// for every odd multiple of π removed from `theta1` and `beta` likewise
    /// for `theta2`.
    pub fn fold(alpha: T, beta: T, theta1: T, theta2: T) -> Result<Folded<T>> {
        let (_, odd1) = reduce_mod_pi(theta1);
        let (_, odd2) = reduce_mod_pi(theta2);
        let angles = Self::new(theta1, theta2)?;
        Ok(Folded { alpha: if odd1 { -alpha } else { alpha }, beta: if odd2 { -beta } else { beta }, angles })
    }

    pub fn theta1(&self) -> T {
        self.theta1
    }

    pub fn theta2(&self) -> T {
        self.theta2
    }

    /// `cos(theta1 - theta2)`, signed.
    pub fn cos_diff(&self) -> T {
        (self.theta1 - self.theta2).cos()
    }

    /// `sin(theta1 - theta2)`.
    pub fn sin_diff(&self) -> T {
        (self.theta1 - self.theta2).sin()
    }

    /// Operator prefactor `|cos(theta1 - theta2)|^{1/2}`.
    pub fn prefactor(&self) -> T {
        self.cos_diff().abs().sqrt()
    }

    pub fn is_orthogonal(&self) -> bool {
        self.theta1 == self.theta2
    }
}

/// Change-of-basis coefficients of the non-orthogonal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoefficients<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> FrameCoefficients<T> {
    pub fn jacobian(&self) -> T {
        self.a * self.d - self.b * self.c
    }
}

pub fn frame_coefficients<T: Real>(angles: &AnglePair<T>) -> FrameCoefficients<T> {
    let cd = angles.cos_diff();
    FrameCoefficients {
        a: angles.theta2.cos() / cd,
        b: angles.theta2.sin() / cd,
        c: -angles.theta1.sin() / cd,
        d: angles.theta1.cos() / cd,
    }
}

/// Interpolating distance `sqrt(x² + y² + 2xy·sin(theta1 - theta2))`.
pub fn frame_distance<T: Real>(x: T, y: T, angles: &AnglePair<T>) -> T {
    let d2 = x * x + y * y + T::lit(2.0) * x * y * angles.sin_diff();
    d2.max(T::zero()).sqrt()
}

/// A phase-space point with its complex frame label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint<T> {
    pub alpha: T,
    pub beta: T,
    pub w: C<T>,
    pub e1: C<T>,
    pub e2: C<T>,
    pub b_factor: C<T>,
}

pub fn frame_units<T: Real>(angles: &AnglePair<T>) -> (C<T>, C<T>) {
    let e1 = ci::<T>() * cis(-angles.theta1);
    let e2 = ci::<T>() * cis(-angles.theta2);
    (e1, e2)
}

/// `(exp(-2i·theta1) - exp(-2i·theta2)) / 4`.
pub fn b_factor<T: Real>(angles: &AnglePair<T>) -> C<T> {
    let two = T::lit(2.0);
    (cis(-two * angles.theta1) - cis(-two * angles.theta2)) * c(T::lit(0.25), T::zero())
}

pub fn phase_point<T: Real>(alpha: T, beta: T, angles: &AnglePair<T>) -> PhasePoint<T> {
    let (e1, e2) = frame_units(angles);
    let w = (e2 * alpha + ci::<T>() * e1 * beta) / angles.cos_diff();
    PhasePoint { alpha, beta, w, e1, e2, b_factor: b_factor(angles) }
}

/// Inverts the frame label: the `(alpha, beta)` whose label is `w`.
pub fn labels_from_w<T: Real>(w: C<T>, angles: &AnglePair<T>) -> (T, T) {
    let (s1, c1) = angles.theta1.sin_cos();
    let (s2, c2) = angles.theta2.sin_cos();
    (w.re * s1 + w.im * c1, w.im * s2 - w.re * c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn identity_frame() {
        let f = frame_coefficients(&AnglePair::<f64>::new(0.0, 0.0).unwrap());
        assert_eq!((f.a, f.b, f.c, f.d), (1.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn quarter_turn_second_angle() {
        let f = frame_coefficients(&AnglePair::<f64>::new(0.0, FRAC_PI_4).unwrap());
        let s = 2f64.sqrt();
        assert!((f.a - 1.0).abs() < 1e-15);
        assert!((f.b - 1.0).abs() < 1e-15);
        assert!(f.c.abs() < 1e-15);
        assert!((f.d - s).abs() < 1e-15);
    }

    #[test]
    fn distances() {
        let eq = AnglePair::<f64>::new(0.3, 0.3).unwrap();
        assert!((frame_distance(3.0, 4.0, &eq) - 5.0).abs() < 1e-15);
        let tilted = AnglePair::<f64>::new(FRAC_PI_6 + 0.2, 0.2).unwrap();
        assert!((frame_distance(1.0, 1.0, &tilted) - 3f64.sqrt()).abs() < 1e-14);
        assert!((frame_distance(-2.5, 0.0, &tilted) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn label_at_wigner_angles() {
        let a = AnglePair::<f64>::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let p = phase_point(0.7, -1.1, &a);
        assert!((p.w - c(0.7, -1.1)).norm() < 1e-15);
        assert_eq!(p.b_factor.norm(), 0.0);
    }

    #[test]
    fn excluded_lines_rejected() {
        assert!(matches!(AnglePair::<f64>::new(FRAC_PI_2, 0.0), Err(Error::ExcludedAngles { .. })));
        assert!(AnglePair::<f64>::new(FRAC_PI_2, 1e-3).is_ok());
    }

    #[test]
    fn folding_flips_labels() {
        let f = AnglePair::<f64>::fold(0.4, -0.9, 1.0 + PI, 0.5 - 2.0 * PI).unwrap();
        assert_eq!((f.alpha, f.beta), (-0.4, -0.9));
        assert!((f.angles.theta1() - 1.0).abs() < 1e-14);
        assert!((f.angles.theta2() - 0.5).abs() < 1e-14);
        let g = AnglePair::<f64>::fold(0.4, 0.9, -0.5, 0.0).unwrap();
        assert_eq!((g.alpha, g.beta), (-0.4, 0.9));
    }

    #[test]
    fn label_inversion_round_trip() {
        let a = AnglePair::<f64>::new(1.1, 0.35).unwrap();
        let p = phase_point(0.8, -0.3, &a);
        let (al, be) = labels_from_w(p.w, &a);
        assert!((al - 0.8).abs() < 1e-14 && (be + 0.3).abs() < 1e-14);
    }

    #[test]
    fn single_precision_frame() {
        let a = AnglePair::<f32>::new(0.4, 1.0).unwrap();
        let f = frame_coefficients(&a);
        assert!((f.jacobian() - 1.0 / a.cos_diff()).abs() < 1e-5);
    }
}
