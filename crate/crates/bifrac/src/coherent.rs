//! Bifractional coherent states, their overlaps and completeness.

use crate::bifrac_op::{bifrac_block, bifrac_grids, Quadrature};
use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, FockSpace, FockState};
use crate::frame::{b_factor, frame_distance, labels_from_w, phase_point, AnglePair};
use crate::frft::SampledAxis;
use crate::linalg::CMatrix;
use crate::scalar::{c, cis, cr, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherentKind {
    /// `U(α,β;θ₁,θ₂)|0⟩`.
    Standard,
    /// `U(0,0;θ₁,θ₂)|α,β⟩`.
    R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifracCoherent<T> {
    pub kind: CoherentKind,
    pub alpha: T,
    pub beta: T,
    pub angles: AnglePair<T>,
    pub state: FockState<T>,
}

impl<T: Real> BifracCoherent<T> {
    /// Frame label `w` of the state.
    pub fn w(&self) -> C<T> {
        phase_point(self.alpha, self.beta, &self.angles).w
    }
}

fn finish<T: Real>(space: FockSpace, amps: Vec<C<T>>) -> Result<FockState<T>> {
    let s = FockState::from_amplitudes(space, amps)?;
    s.check_tail()?;
    Ok(s)
}

pub fn bifrac_coherent<T: Real>(
    alpha: T,
    beta: T,
    angles: &AnglePair<T>,
    space: FockSpace,
) -> Result<BifracCoherent<T>> {
    let u = bifrac_block(alpha, beta, angles, space.dim(), 1, &Quadrature::default())?;
    Ok(BifracCoherent {
        kind: CoherentKind::Standard,
        alpha,
        beta,
        angles: *angles,
        state: finish(space, u.column(0))?,
    })
}

/// `U(0,0;θ₁,θ₂)` restricted to `rows × cols`.
fn origin_block<T: Real>(angles: &AnglePair<T>, rows: usize, cols: usize) -> Result<CMatrix<T>> {
    bifrac_block(T::zero(), T::zero(), angles, rows, cols, &Quadrature::default())
}

/// Rows `0..rows` of `U(0,0;θ₁,θ₂)` with enough columns that the first
/// `block` rows have unit norm to 1e-12.
fn origin_support<T: Real>(angles: &AnglePair<T>, rows: usize, block: usize) -> Result<CMatrix<T>> {
    let mut cols = 2 * rows;
    loop {
        let u0 = origin_block(angles, rows, cols)?;
        let deficit = (0..block.min(rows))
            .map(|i| (T::one() - (0..cols).map(|j| u0[(i, j)].norm_sqr()).sum::<T>()).abs())
            .fold(T::zero(), T::max);
        if deficit < T::lit(1e-12) || cols >= 16 * rows {
            return Ok(u0);
        }
        cols = cols * 3 / 2;
    }
}

pub fn r_coherent<T: Real>(alpha: T, beta: T, angles: &AnglePair<T>, space: FockSpace) -> Result<BifracCoherent<T>> {
    let n = space.dim();
    let z = coherent_amplitudes(c(alpha, beta), n);
    finish(space, z.clone())?;
    let u0 = origin_block(angles, n, n)?;
    Ok(BifracCoherent { kind: CoherentKind::R, alpha, beta, angles: *angles, state: finish(space, u0.matvec(&z))? })
}

/// `b(θ₁,θ₂) = U(0,0)·a·U(0,0)†` restricted to the truncated space, with the
/// inner sums carried over the full support of `U(0,0)`.
pub fn transformed_annihilation<T: Real>(angles: &AnglePair<T>, space: FockSpace) -> Result<CMatrix<T>> {
    let n = space.dim();
    let u0 = origin_support(angles, n + 2, n)?;
    let inner = u0.cols();
    let mut a = CMatrix::zeros(inner, inner);
    for k in 1..inner {
        a[(k - 1, k)] = cr(T::of(k).sqrt());
    }
    Ok(u0.matmul(&a).matmul(&u0.adjoint()).block(n, n))
}

/// `‖b|ψ⟩ − (α+iβ)|ψ⟩‖` for an R-state.
pub fn eigen_residual<T: Real>(s: &BifracCoherent<T>) -> Result<T> {
    let b = transformed_annihilation(&s.angles, s.state.space())?;
    let z = c(s.alpha, s.beta);
    let amps = s.state.amplitudes();
    let bv = b.matvec(amps);
    Ok(bv.iter().zip(amps).map(|(x, y)| (*x - *y * z).norm_sqr()).sum::<T>().sqrt())
}

/// Labels `L(α,β) = (−β cosθ₁ − α sinθ₁, α cosθ₂ − β sinθ₂)`.
pub fn mapped_labels<T: Real>(alpha: T, beta: T, angles: &AnglePair<T>) -> (T, T) {
    let (s1, c1) = angles.theta1().sin_cos();
    let (s2, c2) = angles.theta2().sin_cos();
    (-beta * c1 - alpha * s1, alpha * c2 - beta * s2)
}

/// Phase `X = ¼(β²−α²)(sin2θ₂ − sin2θ₁) + αβ(cos²θ₁ − cos²θ₂)`.
pub fn relation_phase<T: Real>(alpha: T, beta: T, angles: &AnglePair<T>) -> T {
    let two = T::lit(2.0);
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let (c1, c2) = (t1.cos(), t2.cos());
    T::lit(0.25) * (beta * beta - alpha * alpha) * ((two * t2).sin() - (two * t1).sin())
        + alpha * beta * (c1 * c1 - c2 * c2)
}

/// Both sides of the R-state relation.
#[derive(Debug, Clone)]
pub struct RelatedStates<T> {
    pub r_state: BifracCoherent<T>,
    /// Standard state at the mapped labels, before the phase is applied.
    pub mapped: BifracCoherent<T>,
    pub phase: C<T>,
    /// `‖|α,β⟩_R − e^{iX}|L(α,β)⟩‖`.
    pub difference: T,
    /// `⟨mapped|r_state⟩·e^{−iX}`; real and positive when the phase is right.
    pub gauge: C<T>,
}

pub fn relate_states<T: Real>(alpha: T, beta: T, angles: &AnglePair<T>, space: FockSpace) -> Result<RelatedStates<T>> {
    let r_state = r_coherent(alpha, beta, angles, space)?;
    let (a2, b2) = mapped_labels(alpha, beta, angles);
    let mapped = bifrac_coherent(a2, b2, angles, space)?;
    let phase = cis(relation_phase(alpha, beta, angles));
    let difference = r_state.state.sub(&mapped.state.scale(phase)).norm();
    let gauge = mapped.state.inner(&r_state.state) * phase.conj();
    Ok(RelatedStates { r_state, mapped, phase, difference, gauge })
}

/// Fock-space inner product `⟨s1|s2⟩`.
pub fn overlap<T: Real>(s1: &BifracCoherent<T>, s2: &BifracCoherent<T>) -> Result<C<T>> {
    if s1.angles != s2.angles {
        return Err(Error::AngleMismatch);
    }
    if s1.kind != s2.kind {
        return Err(Error::InvalidInput("overlap of coherent states of different kinds".into()));
    }
    Ok(s1.state.inner(&s2.state))
}

/// Closed forms for `⟨w|v⟩` between standard states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapForm {
    /// Gaussian factor times `exp[i(b̄w² + b w̄²)tan(θ₁−θ₂)]·exp[−i(b̄v² + b v̄²)tan(θ₁−θ₂)]`.
    TangentPhase,
    /// Gaussian factor times `exp[i(X(w) − X(v))]` with `X(w) = Im(b̄w²)`.
    GaugePhase,
}

fn gaussian_factor<T: Real>(w: C<T>, v: C<T>) -> C<T> {
    let half = T::lit(0.5);
    (cr(-(w.norm_sqr() + v.norm_sqr()) * half) + w.conj() * v).exp()
}

pub fn overlap_closed_form<T: Real>(w: C<T>, v: C<T>, angles: &AnglePair<T>, form: OverlapForm) -> C<T> {
    let b = b_factor(angles);
    let g = gaussian_factor(w, v);
    match form {
        OverlapForm::TangentPhase => {
            let t = angles.sin_diff() / angles.cos_diff();
            let q = |u: C<T>| (b.conj() * u * u + b * u.conj() * u.conj()).re * t;
            g * cis(q(w) - q(v))
        }
        OverlapForm::GaugePhase => {
            let x = |u: C<T>| (b.conj() * u * u).im;
            g * cis(x(w) - x(v))
        }
    }
}

/// Comparison of Fock overlaps with a closed form over a set of pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapReport<T> {
    pub pairs: usize,
    /// Largest relative error of `|⟨w|v⟩|²` against `exp(−|w−v|²)`.
    pub modulus_error: T,
    /// Same law written through the frame distance, `exp(−d²/cos²(θ₁−θ₂))`.
    pub distance_law_error: T,
    /// Global phase fitted between the Fock overlaps and the closed form.
    pub fitted_phase: T,
    /// Largest `|fock − e^{iφ}·closed|` after the fit.
    pub residual: T,
}

/// Overlaps of standard states at the given label pairs, compared with `form`.
pub fn overlap_report<T: Real>(
    pairs: &[((T, T), (T, T))],
    angles: &AnglePair<T>,
    space: FockSpace,
    form: OverlapForm,
) -> Result<OverlapReport<T>> {
    let mut fock = Vec::with_capacity(pairs.len());
    let mut closed = Vec::with_capacity(pairs.len());
    let mut modulus_error = T::zero();
    let mut distance_law_error = T::zero();
    let cd = angles.cos_diff();
    for &((a1, b1), (a2, b2)) in pairs {
        let s1 = bifrac_coherent(a1, b1, angles, space)?;
        let s2 = bifrac_coherent(a2, b2, angles, space)?;
        let f = overlap(&s1, &s2)?;
        let (w, v) = (s1.w(), s2.w());
        let law = (-(w - v).norm_sqr()).exp();
        let d = frame_distance(a1 - a2, b1 - b2, angles);
        let dist_law = (-d * d / (cd * cd)).exp();
        modulus_error = modulus_error.max((f.norm_sqr() - law).abs() / law);
        distance_law_error = distance_law_error.max((f.norm_sqr() - dist_law).abs() / dist_law);
        fock.push(f);
        closed.push(overlap_closed_form(w, v, angles, form));
    }
    let s: C<T> = fock.iter().zip(&closed).map(|(f, g)| f * g.conj()).sum();
    let fitted_phase = s.arg();
    let rot = cis(fitted_phase);
    let residual = fock.iter().zip(&closed).map(|(f, g)| (f - g * rot).norm()).fold(T::zero(), T::max);
    Ok(OverlapReport { pairs: pairs.len(), modulus_error, distance_law_error, fitted_phase, residual })
}

/// Residuals of the Wirtinger derivative `∂g/∂w̄` for
/// `g = exp(E(w|w̄))·|w⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticityReport<T> {
    pub step: T,
    /// With `E = |w|²/2 − b(w̄)²/2`.
    pub residual: T,
    /// With the `b(w̄)²` term dropped.
    pub ablation_residual: T,
}

impl<T: Real> AnalyticityReport<T> {
    pub fn separation(&self) -> T {
        self.ablation_residual / self.residual
    }
}

pub const WIRTINGER_STEP: f64 = 1e-3;

pub fn analyticity_check<T: Real>(
    angles: &AnglePair<T>,
    space: FockSpace,
    grid: &[C<T>],
) -> Result<AnalyticityReport<T>> {
    let h = T::lit(WIRTINGER_STEP);
    let half = T::lit(0.5);
    let b = b_factor(angles);
    let state_at = |w: C<T>| -> Result<Vec<C<T>>> {
        let (a, bb) = labels_from_w(w, angles);
        Ok(bifrac_coherent(a, bb, angles, space)?.state.amplitudes().to_vec())
    };
    let full = |w: C<T>| (cr(w.norm_sqr() * half) - b * w.conj() * w.conj() * half).exp();
    let ablated = |w: C<T>| cr((w.norm_sqr() * half).exp());
    let mut residual = T::zero();
    let mut ablation_residual = T::zero();
    for &w in grid {
        let shifts = [c(h, T::zero()), c(-h, T::zero()), c(T::zero(), h), c(T::zero(), -h)];
        let states: Vec<Vec<C<T>>> = shifts.iter().map(|&d| state_at(w + d)).collect::<Result<_>>()?;
        for (factor, out) in [(&full as &dyn Fn(C<T>) -> C<T>, &mut residual), (&ablated, &mut ablation_residual)] {
            let f: Vec<C<T>> = shifts.iter().map(|&d| factor(w + d)).collect();
            for k in 0..space.dim() {
                let dx = (states[0][k] * f[0] - states[1][k] * f[1]) / (h + h);
                let dy = (states[2][k] * f[2] - states[3][k] * f[3]) / (h + h);
                // ∂/∂w̄ = (∂x + i∂y)/2
                let dbar = (dx + c(T::zero(), T::one()) * dy) * half;
                *out = out.max(dbar.norm());
            }
        }
    }
    Ok(AnalyticityReport { step: h, residual, ablation_residual })
}

/// Measure normalisation in the completeness relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `1/(2π cos(θ₁−θ₂))` for standard states and `1/(2π)` for R-states.
    TwoPi,
    /// `1/(π|cos(θ₁−θ₂)|)` for standard states and `1/π` for R-states.
    Pi,
}

impl Normalization {
    pub fn factor<T: Real>(self, kind: CoherentKind, angles: &AnglePair<T>) -> T {
        let pi = T::PI();
        match (self, kind) {
            (Normalization::TwoPi, CoherentKind::Standard) => T::one() / (T::lit(2.0) * pi * angles.cos_diff()),
            (Normalization::TwoPi, CoherentKind::R) => T::one() / (T::lit(2.0) * pi),
            (Normalization::Pi, CoherentKind::Standard) => T::one() / (pi * angles.cos_diff().abs()),
            (Normalization::Pi, CoherentKind::R) => T::one() / pi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionConfig {
    pub half_width: f64,
    pub samples: usize,
    /// Fraction of Fock levels checked.
    pub interior: f64,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        Self { half_width: 6.0, samples: 96, interior: 0.8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionReport<T> {
    pub block: usize,
    pub factor: T,
    /// `max |(S − 1)_{mn}|` on the interior block.
    pub defect: T,
    /// Mean diagonal of `S` on the interior block; shows a constant offset.
    pub mean_diagonal: T,
}

/// `factor·∫dαdβ |α,β⟩⟨α,β|` by the trapezoid rule on a square window,
/// compared with the identity on the interior block.
pub fn resolution_of_identity<T: Real>(
    angles: &AnglePair<T>,
    kind: CoherentKind,
    norm: Normalization,
    space: FockSpace,
    config: &ResolutionConfig,
) -> Result<ResolutionReport<T>> {
    let n = space.dim();
    let block = ((n as f64) * config.interior).floor() as usize;
    let axis = SampledAxis::symmetric(T::lit(config.half_width), config.samples)?;
    let factor = norm.factor(kind, angles);
    let weight = |i: usize, j: usize| axis.weight(i) * axis.weight(j);
    let s = match kind {
        CoherentKind::Standard => {
            let grids = bifrac_grids(angles, n, 1, axis, &Quadrature::default())?;
            let mut s = CMatrix::zeros(n, n);
            for i in 0..axis.len() {
                for j in 0..axis.len() {
                    let v: Vec<C<T>> = grids.iter().map(|g| g.get(i, j)).collect();
                    let w = weight(i, j);
                    for p in 0..n {
                        for q in 0..n {
                            s[(p, q)] += v[p] * v[q].conj() * w;
                        }
                    }
                }
            }
            s
        }
        CoherentKind::R => {
            let u0 = origin_support(angles, n, block)?;
            let inner = u0.cols();
            let mut s = CMatrix::zeros(n, n);
            for i in 0..axis.len() {
                for j in 0..axis.len() {
                    let z = coherent_amplitudes(c(axis.point(i), axis.point(j)), inner);
                    let v = u0.matvec(&z);
                    let w = weight(i, j);
                    for p in 0..n {
                        for q in 0..n {
                            s[(p, q)] += v[p] * v[q].conj() * w;
                        }
                    }
                }
            }
            s
        }
    }
    .scale(cr(factor));
    let b = s.block(block, block);
    let defect = b.max_abs_diff(&CMatrix::identity(block));
    let mean_diagonal = (0..block).map(|k| b[(k, k)].re).sum::<T>() / T::of(block);
    Ok(ResolutionReport { block, factor, defect, mean_diagonal })
}
