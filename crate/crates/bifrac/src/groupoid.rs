//! The connected groupoid of transformations between bifractional families.
//!
//! An arrow `T(θ | φ)` maps the whole `(α, β)`-indexed family at angles `θ`
//! to the family at angles `φ`; arrows are keyed by angle pairs only.

use crate::error::{Error, Result};
use crate::frame::AnglePair;
use crate::frft::{frft2_apply, ComplexGrid2D, Frft2, Layout, SampledAxis, Sign};
use crate::scalar::{cr, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupoidArrow<T> {
    source: AnglePair<T>,
    target: AnglePair<T>,
}

impl<T: Real> GroupoidArrow<T> {
    pub fn new(source: AnglePair<T>, target: AnglePair<T>) -> Self {
        Self { source, target }
    }

    pub fn identity(at: AnglePair<T>) -> Self {
        Self { source: at, target: at }
    }

    pub fn source(&self) -> AnglePair<T> {
        self.source
    }

    pub fn target(&self) -> AnglePair<T> {
        self.target
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }

    /// `self` followed by `next`; defined only when the angles match exactly.
    pub fn compose(&self, next: &Self) -> Result<Self> {
        if self.target != next.source {
            return Err(Error::NotComposable);
        }
        Ok(Self { source: self.source, target: next.target })
    }

    pub fn inverse(&self) -> Self {
        Self { source: self.target, target: self.source }
    }

    /// `t ∘ t⁻¹`, the identity at the source.
    pub fn left_identity(&self) -> Self {
        Self::identity(self.source)
    }

    /// `t⁻¹ ∘ t`, the identity at the target.
    pub fn right_identity(&self) -> Self {
        Self::identity(self.target)
    }
}

pub fn arrow_compose<T: Real>(t1: &GroupoidArrow<T>, t2: &GroupoidArrow<T>) -> Result<GroupoidArrow<T>> {
    t1.compose(t2)
}

pub fn arrow_inverse<T: Real>(t: &GroupoidArrow<T>) -> GroupoidArrow<T> {
    t.inverse()
}

/// Transports a sampled family from the source angles to the target angles:
/// kernels `Δ(β, δ; φ₂−θ₂)·Δ(α, γ; φ₁−θ₁)` with prefactor
/// `|cos(φ₁−φ₂)|^{1/2} / |cos(θ₁−θ₂)|^{1/2}`.
pub fn arrow_apply<T: Real>(t: &GroupoidArrow<T>, f: &ComplexGrid2D<T>) -> Result<ComplexGrid2D<T>> {
    arrow_apply_with(t, f, T::lit(crate::frft::TAIL_TOL))
}

pub fn arrow_apply_with<T: Real>(t: &GroupoidArrow<T>, f: &ComplexGrid2D<T>, tail_tol: T) -> Result<ComplexGrid2D<T>> {
    if t.is_identity() {
        return Ok(f.clone());
    }
    let d1 = t.target.theta1() - t.source.theta1();
    let d2 = t.target.theta2() - t.source.theta2();
    let spec = Frft2::new(d1, Sign::Plus, d2, Sign::Plus, Layout::Direct).with_tail_tol(tail_tol);
    let ratio = t.target.prefactor() / t.source.prefactor();
    Ok(frft2_apply(f, &spec)?.map(|z| z * cr(ratio)))
}

/// Errors measured by [`isotropy_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyReport<T> {
    pub identity_error: T,
    pub inverse_error: T,
    pub closure_error: T,
    pub associativity_error: T,
    pub tolerance: T,
    pub passed: bool,
}

impl<T: Real> IsotropyReport<T> {
    pub fn max_error(&self) -> T {
        self.identity_error.max(self.inverse_error).max(self.closure_error).max(self.associativity_error)
    }
}

fn apply_path<T: Real>(path: &[AnglePair<T>], f: &ComplexGrid2D<T>) -> Result<ComplexGrid2D<T>> {
    let mut g = f.clone();
    for w in path.windows(2) {
        g = arrow_apply(&GroupoidArrow::new(w[0], w[1]), &g)?;
    }
    Ok(g)
}

/// Intermediate angle pairs from a golden-ratio sequence, away from the
/// excluded lines.
fn waypoints<T: Real>(count: usize) -> Vec<AnglePair<T>> {
    let g1 = 0.618_033_988_749_894_9_f64;
    let g2 = 0.754_877_666_246_692_7_f64;
    let mut out = Vec::new();
    let mut k = 1usize;
    while out.len() < count {
        let t1 = std::f64::consts::PI * ((k as f64 * g1) % 1.0);
        let t2 = std::f64::consts::PI * ((k as f64 * g2) % 1.0);
        k += 1;
        if (t1 - t2).cos().abs() < 0.3 {
            continue;
        }
        if let Ok(a) = AnglePair::new(T::lit(t1), T::lit(t2)) {
            out.push(a);
        }
    }
    out
}

/// Checks that self-arrows at `angles` act as a group on sampled grids.
///
/// Loops `a → b → a` through `samples` intermediate pairs `b` must act as
/// the identity element; closure, inverse and associativity are compared
/// between different groupings of the same loops.
pub fn isotropy_check<T: Real>(angles: AnglePair<T>, samples: usize) -> Result<IsotropyReport<T>> {
    let axis = SampledAxis::symmetric(T::lit(8.0), 161)?;
    let half = T::lit(0.5);
    let f = ComplexGrid2D::square(axis, |a, b| {
        let g = (-(a * a + b * b) * half).exp();
        crate::scalar::c(T::one() + a * half, b * half - a * b * T::lit(0.25)) * g
    });
    let pts = waypoints::<T>(samples.max(3));
    let a = angles;
    let mut report = IsotropyReport {
        identity_error: T::zero(),
        inverse_error: T::zero(),
        closure_error: T::zero(),
        associativity_error: T::zero(),
        tolerance: T::lit(1e-4),
        passed: false,
    };
    report.identity_error = arrow_apply(&GroupoidArrow::identity(a), &f)?.max_abs_diff(&f);
    for i in 0..pts.len() {
        let b = pts[i];
        let c = pts[(i + 1) % pts.len()];
        let d = pts[(i + 2) % pts.len()];
        let loop_b = apply_path(&[a, b, a], &f)?;
        report.identity_error = report.identity_error.max(loop_b.max_abs_diff(&f));
        let forward = apply_path(&[a, b], &f)?;
        let back = apply_path(&[b, a], &forward)?;
        report.inverse_error = report.inverse_error.max(back.max_abs_diff(&f));
        let two_loops = apply_path(&[a, b, a, c, a], &f)?;
        let merged = apply_path(&[a, b, c, a], &f)?;
        report.closure_error = report.closure_error.max(two_loops.max_abs_diff(&merged));
        let left = apply_path(&[a, b, c, a, d, a], &f)?;
        let right = apply_path(&[a, b, a, c, d, a], &f)?;
        report.associativity_error = report.associativity_error.max(left.max_abs_diff(&right));
    }
    report.passed = report.max_error() < report.tolerance;
    Ok(report)
}
