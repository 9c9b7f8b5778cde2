//! Fractional Fourier kernel and the sampled 1D/2D transform engine.
//!
//! Dense transforms use trapezoid weights. Angles close to 0 or π are
//! realised as a product of two well-conditioned steps,
//! `F(θ) = F(θ ∓ π/2)·F(±π/2)`, so the kernel matrix never has to resolve a
//! steep chirp; the exact delta limits are used within `EPS_THETA`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, cis, cr, Real, C};

/// Guard on `|sin θ|` below which the delta-limit operators take over.
pub const EPS_THETA: f64 = 1e-6;

/// Largest axis built from a spacing requirement. Angles just outside
/// `EPS_THETA` demand spacings that no dense quadrature can afford.
pub const MAX_AXIS_POINTS: usize = 16_384;

/// Default relative tail tolerance for sampled inputs.
pub const TAIL_TOL: f64 = 1e-8;

/// Smallest `|sin θ|` for which a single dense kernel step is used.
const SPLIT_SIN: f64 = 0.5;

/// Reduces an angle into `(-π, π]`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let mut t = theta - two_pi * ((theta + T::PI()) / two_pi).floor();
    if t <= -T::PI() {
        t = t + two_pi;
    }
    t
}

/// `Δ(x, y; θ)` with the principal square root.
pub fn kernel_eval<T: Real>(x: T, y: T, theta: T) -> Result<C<T>> {
    let (s, co) = theta.sin_cos();
    if s.abs() < T::lit(EPS_THETA) {
        return Err(Error::DegenerateAngle { theta: theta.f64(), eps: EPS_THETA });
    }
    Ok(kernel_unchecked(x, y, co / s, T::one() / s, kernel_prefactor(co / s)))
}

fn kernel_prefactor<T: Real>(cot: T) -> C<T> {
    (c(T::one(), cot) / (T::lit(2.0) * T::PI())).sqrt()
}

#[inline]
fn kernel_unchecked<T: Real>(x: T, y: T, cot: T, csc: T, pref: C<T>) -> C<T> {
    let phase = -(x * x + y * y) * cot / T::lit(2.0) + x * y * csc;
    pref * cis(phase)
}

/// The chirp `sqrt(1 - i·tan θ)·exp(i·β²·tan θ / 2)`.
///
/// It is the integral of the kernel over its first argument,
/// `∫Δ(x, β; θ) dx = chirp(β, θ) = √(2π)·Δ(0, β; θ + π/2)`.
pub fn chirp_eval<T: Real>(beta: T, theta: T) -> Result<C<T>> {
    let co = theta.cos();
    if co.abs() < T::lit(EPS_THETA) {
        return Err(Error::DegenerateAngle { theta: theta.f64(), eps: EPS_THETA });
    }
    let t = theta.sin() / co;
    Ok(c(T::one(), -t).sqrt() * cis(beta * beta * t / T::lit(2.0)))
}

/// Uniformly sampled interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledAxis<T> {
    x_min: T,
    x_max: T,
    n: usize,
}

impl<T: Real> SampledAxis<T> {
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        if n_points < 8 {
            return Err(Error::InvalidInput(format!("axis needs at least 8 points, got {n_points}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidInput("axis bounds must be finite and increasing".into()));
        }
        Ok(Self { x_min, x_max, n: n_points })
    }

    /// `[-half_width, half_width]` with `n_points` samples.
    pub fn symmetric(half_width: T, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    /// Symmetric axis with spacing no larger than `max_spacing`.
    pub fn symmetric_with_spacing(half_width: T, max_spacing: T) -> Result<Self> {
        let n = (T::lit(2.0) * half_width / max_spacing).ceil();
        if !(n < T::of(MAX_AXIS_POINTS)) {
            return Err(Error::CostBudget { cost: n.f64(), budget: MAX_AXIS_POINTS as f64 });
        }
        Self::symmetric(half_width, (n.to_usize().unwrap_or(0) + 1).max(8))
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> T {
        (self.x_max - self.x_min) / T::of(self.n - 1)
    }

    pub fn point(&self, i: usize) -> T {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + self.spacing() * T::of(i)
        }
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weight of sample `i`.
    pub fn weight(&self, i: usize) -> T {
        let h = self.spacing();
        if i == 0 || i + 1 == self.n {
            h / T::lit(2.0)
        } else {
            h
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= T::lit(1e-12) * self.x_max.abs().max(T::one())
    }

    /// Index of the sample closest to `x`.
    pub fn nearest(&self, x: T) -> usize {
        let k = ((x - self.x_min) / self.spacing()).round();
        k.max(T::zero()).min(T::of(self.n - 1)).to_usize().unwrap_or(0)
    }

    /// Whether sample `i` lies in the outer 10% of the window.
    pub fn in_tail(&self, i: usize) -> bool {
        let mid = (self.x_min + self.x_max) / T::lit(2.0);
        let half = (self.x_max - self.x_min) / T::lit(2.0);
        (self.point(i) - mid).abs() > T::lit(0.9) * half
    }
}

/// Complex samples on a 1D axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid1D<T> {
    pub axis: SampledAxis<T>,
    pub values: Vec<C<T>>,
}

impl<T: Real> ComplexGrid1D<T> {
    pub fn from_fn(axis: SampledAxis<T>, mut f: impl FnMut(T) -> C<T>) -> Self {
        let values = (0..axis.len()).map(|i| f(axis.point(i))).collect();
        Self { axis, values }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn norm2(&self) -> T {
        self.values.iter().enumerate().map(|(i, z)| z.norm_sqr() * self.axis.weight(i)).sum::<T>().sqrt()
    }

    pub fn integrate(&self) -> C<T> {
        self.values.iter().enumerate().map(|(i, &z)| z * self.axis.weight(i)).sum()
    }

    /// Largest tail modulus relative to the peak modulus.
    pub fn relative_tail(&self) -> T {
        let peak = self.values.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if peak == T::zero() {
            return T::zero();
        }
        let tail =
            (0..self.axis.len()).filter(|&i| self.axis.in_tail(i)).fold(T::zero(), |m, i| m.max(self.values[i].norm()));
        tail / peak
    }
}

/// Complex samples on a rectangular `(alpha, beta)` window, alpha-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid2D<T> {
    pub alpha: SampledAxis<T>,
    pub beta: SampledAxis<T>,
    pub values: Vec<C<T>>,
}

impl<T: Real> ComplexGrid2D<T> {
    pub fn from_fn(alpha: SampledAxis<T>, beta: SampledAxis<T>, mut f: impl FnMut(T, T) -> C<T>) -> Self {
        let mut values = Vec::with_capacity(alpha.len() * beta.len());
        for i in 0..alpha.len() {
            let a = alpha.point(i);
            for j in 0..beta.len() {
                values.push(f(a, beta.point(j)));
            }
        }
        Self { alpha, beta, values }
    }

    pub fn square(axis: SampledAxis<T>, f: impl FnMut(T, T) -> C<T>) -> Self {
        Self::from_fn(axis, axis, f)
    }

    fn from_matrix(alpha: SampledAxis<T>, beta: SampledAxis<T>, m: CMatrix<T>) -> Self {
        debug_assert_eq!((m.rows(), m.cols()), (alpha.len(), beta.len()));
        Self { alpha, beta, values: m.as_slice().to_vec() }
    }

    fn to_matrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.alpha.len(), self.beta.len(), |i, j| self.get(i, j))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.values[i * self.beta.len() + j]
    }

    /// Same axes, values from `f(i, j)`.
    pub fn zip_map_index(&self, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let nb = self.beta.len();
        let values = (0..self.alpha.len() * nb).map(|k| f(k / nb, k % nb)).collect();
        Self { alpha: self.alpha, beta: self.beta, values }
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self { alpha: self.alpha, beta: self.beta, values: self.values.iter().map(|&z| f(z)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if self.alpha != other.alpha || self.beta != other.beta {
            return Err(Error::InvalidInput("grids are sampled on different windows".into()));
        }
        Ok(Self {
            alpha: self.alpha,
            beta: self.beta,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Trapezoid integral over the window.
    pub fn integrate(&self) -> C<T> {
        let mut s = cr(T::zero());
        for i in 0..self.alpha.len() {
            let wa = self.alpha.weight(i);
            for j in 0..self.beta.len() {
                s += self.get(i, j) * (wa * self.beta.weight(j));
            }
        }
        s
    }

    /// Largest modulus in the outer 10% band relative to the peak.
    pub fn relative_tail(&self) -> T {
        let peak = self.max_abs();
        if peak == T::zero() {
            return T::zero();
        }
        let mut tail = T::zero();
        for i in 0..self.alpha.len() {
            let ti = self.alpha.in_tail(i);
            for j in 0..self.beta.len() {
                if ti || self.beta.in_tail(j) {
                    tail = tail.max(self.get(i, j).norm());
                }
            }
        }
        tail / peak
    }

    pub fn check_tail(&self, tol: T) -> Result<()> {
        let tail = self.relative_tail();
        if tail > tol {
            return Err(Error::WindowTooSmall { tail: tail.f64(), tol: tol.f64() });
        }
        Ok(())
    }
}

/// How a 1D transform maps input samples to output samples.
#[derive(Debug, Clone)]
enum AxisMap<T> {
    Identity,
    Reflect,
    Dense(CMatrix<T>),
}

/// Sampled 1D fractional transform `g(x) = ∫Δ(x, s·y; θ) f(y) dy` from an
/// input axis to an output axis.
#[derive(Debug, Clone)]
pub struct AxisTransform<T> {
    input: SampledAxis<T>,
    output: SampledAxis<T>,
    map: AxisMap<T>,
}

/// Orientation of the second kernel argument, `y → ±y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Which delta limit, if any, an angle falls into.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Regime<T> {
    /// `Δ → δ(x - y)`.
    Zero,
    /// `Δ → δ(x + y)`.
    Pi,
    Direct(T),
    /// Realised as `F(rest)·F(first)`.
    Split {
        first: T,
        rest: T,
    },
}

fn regime<T: Real>(theta: T) -> Regime<T> {
    let t = wrap_angle(theta);
    let eps = T::lit(EPS_THETA);
    if t.abs() < eps {
        return Regime::Zero;
    }
    if (t.abs() - T::PI()).abs() < eps {
        return Regime::Pi;
    }
    if t.sin().abs() >= T::lit(SPLIT_SIN) {
        return Regime::Direct(t);
    }
    let half = T::FRAC_PI_2();
    let first = if t.abs() < half { half } else { half * t.signum() };
    Regime::Split { first, rest: t - first }
}

fn dense_kernel<T: Real>(theta: T, sign: Sign, input: &SampledAxis<T>, output: &SampledAxis<T>) -> CMatrix<T> {
    let (s, co) = theta.sin_cos();
    let cot = co / s;
    let csc = T::one() / s;
    let pref = kernel_prefactor(cot);
    let sv = sign.value::<T>();
    let ys: Vec<T> = input.points();
    let ws: Vec<T> = (0..input.len()).map(|j| input.weight(j)).collect();
    CMatrix::from_fn(output.len(), input.len(), |i, j| {
        kernel_unchecked(output.point(i), sv * ys[j], cot, csc, pref) * ws[j]
    })
}

impl<T: Real> AxisTransform<T> {
    pub fn new(theta: T, sign: Sign, input: SampledAxis<T>, output: SampledAxis<T>) -> Result<Self> {
        let map = match regime(theta) {
            Regime::Zero | Regime::Pi => {
                if input != output {
                    return Err(Error::InvalidInput(
                        "delta-limit transform needs identical input and output axes".into(),
                    ));
                }
                if !input.is_symmetric() && (regime(theta) == Regime::Pi || sign == Sign::Minus) {
                    return Err(Error::InvalidInput("reflection needs a symmetric axis".into()));
                }
                let reflect = (regime(theta) == Regime::Pi) ^ (sign == Sign::Minus);
                if reflect {
                    AxisMap::Reflect
                } else {
                    AxisMap::Identity
                }
            }
            Regime::Direct(t) => AxisMap::Dense(dense_kernel(t, sign, &input, &output)),
            Regime::Split { first, rest } => {
                let k1 = dense_kernel(first, sign, &input, &input);
                let k2 = dense_kernel(rest, Sign::Plus, &input, &output);
                AxisMap::Dense(k2.matmul(&k1))
            }
        };
        Ok(Self { input, output, map })
    }

    pub fn input(&self) -> &SampledAxis<T> {
        &self.input
    }

    pub fn output(&self) -> &SampledAxis<T> {
        &self.output
    }

    /// The transform as a dense `output × input` matrix, quadrature weights
    /// included.
    pub fn matrix(&self) -> CMatrix<T> {
        match &self.map {
            AxisMap::Identity => CMatrix::identity(self.input.len()),
            AxisMap::Reflect => {
                let n = self.input.len();
                CMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { cr(T::one()) } else { cr(T::zero()) })
            }
            AxisMap::Dense(k) => k.clone(),
        }
    }

    pub fn apply(&self, f: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(f.len(), self.input.len(), "sample count differs from input axis");
        match &self.map {
            AxisMap::Identity => f.to_vec(),
            AxisMap::Reflect => f.iter().rev().copied().collect(),
            AxisMap::Dense(k) => k.matvec(f),
        }
    }

    /// `K · m`, with `m` indexed by input samples along its rows.
    fn apply_left(&self, m: &CMatrix<T>) -> CMatrix<T> {
        match &self.map {
            AxisMap::Identity => m.clone(),
            AxisMap::Reflect => {
                let n = m.rows();
                CMatrix::from_fn(n, m.cols(), |i, j| m[(n - 1 - i, j)])
            }
            AxisMap::Dense(k) => k.matmul(m),
        }
    }
}

/// Largest local frequency of `Δ(x, s·y; θ)·f(y)` in `y` for `|y| ≤ radius`,
/// when `f` itself is band-limited to `radius` (zero in the delta limits).
pub fn quadrature_bandwidth<T: Real>(theta: T, x_out: T, radius: T) -> T {
    let step = |t: T, x: T| {
        let (s, co) = t.sin_cos();
        radius * (co / s).abs() + x.abs() / s.abs() + radius
    };
    match regime(theta) {
        Regime::Zero | Regime::Pi => T::zero(),
        Regime::Direct(t) => step(t, x_out),
        Regime::Split { first, rest } => step(first, radius).max(step(rest, x_out)),
    }
}

/// Row sums `Σ_i w_i·K[i][j]` of the sampled transform with trapezoid
/// weights `w_i` on the output axis: contracting them with input samples
/// gives the trapezoid integral of the transformed function.
pub fn integrated_weights<T: Real>(
    theta: T,
    sign: Sign,
    input: SampledAxis<T>,
    output: SampledAxis<T>,
) -> Result<Vec<C<T>>> {
    let t = AxisTransform::new(theta, sign, input, output)?;
    let w: Vec<T> = (0..output.len()).map(|i| output.weight(i)).collect();
    Ok(match &t.map {
        AxisMap::Identity => w.iter().map(|&x| cr(x)).collect(),
        AxisMap::Reflect => w.iter().rev().map(|&x| cr(x)).collect(),
        AxisMap::Dense(k) => (0..input.len()).map(|j| (0..output.len()).map(|i| k[(i, j)] * w[i]).sum()).collect(),
    })
}

/// Quadrature rule for evaluating `∫Δ(x, s·y; θ) f(y) dy` at a single `x`.
#[derive(Debug, Clone)]
pub enum PointRule<T> {
    /// The integral collapses to `f(y)` at this coordinate.
    At(T),
    /// Weights to contract with samples of `f` on the input axis.
    Weights(Vec<C<T>>),
}

pub fn point_rule<T: Real>(x: T, theta: T, sign: Sign, input: &SampledAxis<T>) -> PointRule<T> {
    let sv = sign.value::<T>();
    match regime(theta) {
        Regime::Zero => PointRule::At(sv * x),
        Regime::Pi => PointRule::At(-sv * x),
        Regime::Direct(t) => {
            let single = SampledAxis { x_min: x, x_max: x + T::one(), n: 2 };
            let k = dense_kernel(t, sign, input, &single);
            PointRule::Weights(k.row(0).to_vec())
        }
        Regime::Split { first, rest } => {
            let single = SampledAxis { x_min: x, x_max: x + T::one(), n: 2 };
            let k2 = dense_kernel(rest, Sign::Plus, input, &single);
            let k1 = dense_kernel(first, sign, input, input);
            let row = CMatrix::from_fn(1, input.len(), |_, j| k2[(0, j)]);
            PointRule::Weights(row.matmul(&k1).row(0).to_vec())
        }
    }
}

/// Applies the sampled transform to `f`, after the tail precondition.
pub fn frft_apply<T: Real>(f: &ComplexGrid1D<T>, theta: T) -> Result<ComplexGrid1D<T>> {
    frft_apply_signed(f, theta, Sign::Plus)
}

pub fn frft_apply_signed<T: Real>(f: &ComplexGrid1D<T>, theta: T, sign: Sign) -> Result<ComplexGrid1D<T>> {
    if !f.axis.is_symmetric() {
        return Err(Error::InvalidInput("transform needs a symmetric axis".into()));
    }
    let tail = f.relative_tail();
    if tail > T::lit(TAIL_TOL) {
        return Err(Error::WindowTooSmall { tail: tail.f64(), tol: TAIL_TOL });
    }
    let t = AxisTransform::new(theta, sign, f.axis, f.axis)?;
    Ok(ComplexGrid1D { axis: f.axis, values: t.apply(&f.values) })
}

/// Gaussian × polynomial battery used by the additivity check.
pub fn test_battery<T: Real>(axis: SampledAxis<T>) -> Vec<ComplexGrid1D<T>> {
    let g = |x: T| (-x * x / T::lit(2.0)).exp();
    vec![
        ComplexGrid1D::from_fn(axis, |x| cr(g(x))),
        ComplexGrid1D::from_fn(axis, |x| cr(x * g(x))),
        ComplexGrid1D::from_fn(axis, |x| cr((x * x - T::one()) * g(x))),
        ComplexGrid1D::from_fn(axis, |x| cr((-(x - T::one()).powi(2) / T::lit(2.0)).exp())),
        ComplexGrid1D::from_fn(axis, |x| c(T::one(), T::lit(0.5) * x) * g(x) * cis(T::lit(0.1) * x * x)),
    ]
}

/// Max-norm discrepancy between composed and direct transforms over the
/// test battery.
pub fn frft_compose_check<T: Real>(theta1: T, theta2: T, axis: SampledAxis<T>) -> Result<T> {
    let mut worst = T::zero();
    for f in test_battery(axis) {
        let composed = frft_apply(&frft_apply(&f, theta1)?, theta2)?;
        let direct = frft_apply(&f, theta1 + theta2)?;
        worst = worst.max(composed.max_abs_diff(&direct));
    }
    Ok(worst)
}

/// Whether the two output axes are fed by the same-named input axes or by
/// the crossed ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Output alpha from input alpha, output beta from input beta.
    Direct,
    /// Output alpha from input beta, output beta from input alpha.
    Swapped,
}

/// Separable 2D transform: output alpha uses `(theta_alpha, sign_alpha)`,
/// output beta uses `(theta_beta, sign_beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frft2<T> {
    pub theta_alpha: T,
    pub sign_alpha: Sign,
    pub theta_beta: T,
    pub sign_beta: Sign,
    pub layout: Layout,
    pub tail_tol: T,
}

impl<T: Real> Frft2<T> {
    pub fn new(theta_alpha: T, sign_alpha: Sign, theta_beta: T, sign_beta: Sign, layout: Layout) -> Self {
        Self { theta_alpha, sign_alpha, theta_beta, sign_beta, layout, tail_tol: T::lit(TAIL_TOL) }
    }

    pub fn with_tail_tol(mut self, tol: T) -> Self {
        self.tail_tol = tol;
        self
    }
}

/// Applies the separable transform on the input window.
pub fn frft2_apply<T: Real>(f: &ComplexGrid2D<T>, spec: &Frft2<T>) -> Result<ComplexGrid2D<T>> {
    let (oa, ob) = match spec.layout {
        Layout::Direct => (f.alpha, f.beta),
        Layout::Swapped => (f.beta, f.alpha),
    };
    frft2_apply_to(f, spec, oa, ob)
}

/// Applies the separable transform, sampling the result on the given axes.
pub fn frft2_apply_to<T: Real>(
    f: &ComplexGrid2D<T>,
    spec: &Frft2<T>,
    out_alpha: SampledAxis<T>,
    out_beta: SampledAxis<T>,
) -> Result<ComplexGrid2D<T>> {
    f.check_tail(spec.tail_tol)?;
    let m = f.to_matrix();
    let out = match spec.layout {
        Layout::Direct => {
            let ka = AxisTransform::new(spec.theta_alpha, spec.sign_alpha, f.alpha, out_alpha)?;
            let kb = AxisTransform::new(spec.theta_beta, spec.sign_beta, f.beta, out_beta)?;
            ka.apply_left(&kb.apply_left(&m.transpose()).transpose())
        }
        Layout::Swapped => {
            let ka = AxisTransform::new(spec.theta_alpha, spec.sign_alpha, f.beta, out_alpha)?;
            let kb = AxisTransform::new(spec.theta_beta, spec.sign_beta, f.alpha, out_beta)?;
            ka.apply_left(&kb.apply_left(&m).transpose())
        }
    };
    Ok(ComplexGrid2D::from_matrix(out_alpha, out_beta, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn axis() -> SampledAxis<f64> {
        SampledAxis::symmetric(8.0, 512).unwrap()
    }

    #[test]
    fn quarter_turn_is_plane_wave() {
        for &(x, y) in &[(1.0, 1.0), (-0.3, 2.2), (0.0, 5.0)] {
            let k = kernel_eval(x, y, FRAC_PI_2).unwrap();
            let expect = cis(x * y) / (2.0 * PI).sqrt();
            assert!((k - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn kernel_is_symmetric() {
        let a = kernel_eval(0.7, -1.9, 2.3).unwrap();
        let b = kernel_eval(-1.9, 0.7, 2.3).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn kernel_rejects_singular_angles() {
        assert!(matches!(kernel_eval(1.0, 1.0, 0.0), Err(Error::DegenerateAngle { .. })));
        assert!(matches!(kernel_eval(1.0, 1.0, PI), Err(Error::DegenerateAngle { .. })));
    }

    #[test]
    fn chirp_at_zero_angle() {
        assert!((chirp_eval(3.0, 0.0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn delta_limits() {
        let f = ComplexGrid1D::from_fn(axis(), |x| cr((-(x - 1.0f64).powi(2)).exp()));
        let g0 = frft_apply(&f, 0.0).unwrap();
        assert_eq!(g0.values, f.values);
        let gp = frft_apply(&f, PI).unwrap();
        let expect = ComplexGrid1D::from_fn(axis(), |x| cr((-(x + 1.0f64).powi(2)).exp()));
        assert!(gp.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn vacuum_mode_is_fixed_by_fourier() {
        let norm = PI.powf(-0.25);
        let f = ComplexGrid1D::from_fn(axis(), |x| cr(norm * (-x * x / 2.0).exp()));
        let g = frft_apply(&f, FRAC_PI_2).unwrap();
        assert!(g.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn composition_of_eighths() {
        let e = frft_compose_check(FRAC_PI_4, FRAC_PI_4, axis()).unwrap();
        assert!(e < 1e-6, "{e}");
        let r = frft_compose_check(FRAC_PI_2, FRAC_PI_2, axis()).unwrap();
        assert!(r < 1e-6, "{r}");
        let z = frft_compose_check(1.1, 0.0, axis()).unwrap();
        assert!(z < 1e-12, "{z}");
    }

    #[test]
    fn small_angles_use_split_path() {
        let e = frft_compose_check(0.05, 0.07, axis()).unwrap();
        assert!(e < 1e-8, "{e}");
    }

    #[test]
    fn wide_tails_rejected() {
        let f = ComplexGrid1D::from_fn(axis(), |x| cr((-x * x / 50.0f64).exp()));
        assert!(matches!(frft_apply(&f, 1.0), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn wrap_into_half_open_interval() {
        assert!((wrap_angle(3.0f64 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5f64) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_precision_kernel() {
        let k = kernel_eval(1.0f32, 1.0, std::f32::consts::FRAC_PI_2).unwrap();
        assert!((k.re - 1f32.cos() / (2.0 * std::f32::consts::PI).sqrt()).abs() < 1e-6);
    }
}
