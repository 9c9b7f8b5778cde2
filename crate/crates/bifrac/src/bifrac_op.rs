//! Bifractional displacement operators
//! `U(α,β;θ₁,θ₂) = |cos(θ₁−θ₂)|^{1/2} ∫∫ Δ(β,α′;θ₂) Δ(α,−β′;θ₁) D(α′,β′) dα′dβ′`
//! as Fock-space matrices and as sampled functions of `(α, β)`.
//!
//! Matrix elements come from one of two quadratures, picked by cost:
//!
//! * Weyl route: exact displacement elements `⟨m|D|n⟩` sampled on a disc of
//!   Weyl arguments, contracted with the separable kernel weights.
//! * Position route: Hermite functions sandwiching the position kernel
//!   `⟨x|U|y⟩ = |cos(θ₁−θ₂)|^{1/2} √π Δ(β,(x−y)/√2;θ₂) Δ(α,−(x+y)/√2;θ₁+π/2)`,
//!   unavailable near `θ₂ ∈ {0, π}` and `θ₁ = π/2` where the kernels
//!   collapse to deltas.

use crate::error::{Error, Result};
use crate::fock::{displacement_elements, displacement_elements_into, hermite_functions, FockOperator, FockSpace};
use crate::frame::{AnglePair, EPS_COS};
use crate::frft::{
    frft2_apply_to, integrated_weights, kernel_eval, point_rule, quadrature_bandwidth, ComplexGrid2D, Frft2, Layout,
    PointRule, SampledAxis, Sign, EPS_THETA,
};
use crate::linalg::CMatrix;
use crate::scalar::{cr, Real, C};

/// Default tolerance of the interior-block unitarity check.
pub const UNITARITY_TOL: f64 = 1e-5;

/// Sampling controls for the Weyl-argument quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    /// Extra radius beyond `√(rows−1) + √(cols−1)` where the displacement
    /// elements are treated as zero.
    pub margin: T,
    /// Ratio of the sampling rate to the minimum that avoids aliasing.
    pub oversample: T,
    pub route: Route,
}

/// Quadrature used for matrix elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Cheaper of the two by operation count.
    Auto,
    Weyl,
    Position,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self { margin: T::lit(7.0), oversample: T::lit(1.25), route: Route::Auto }
    }
}

/// Smallest `|sin θ₂|` and `|cos θ₁|` accepted by the position route.
const POSITION_MIN: f64 = 0.2;

impl<T: Real> Quadrature<T> {
    /// Radius of the disc of Weyl arguments that carries the elements.
    pub fn radius(&self, rows: usize, cols: usize) -> T {
        T::of(rows.saturating_sub(1)).sqrt() + T::of(cols.saturating_sub(1)).sqrt() + self.margin
    }

    /// Symmetric axis of half-width `half_width` whose spacing resolves the
    /// kernels at both angles for outputs up to `x_out`.
    pub fn axis(&self, theta1: T, theta2: T, radius: T, half_width: T, x_out: T) -> Result<SampledAxis<T>> {
        let w = quadrature_bandwidth(theta1, x_out, radius).max(quadrature_bandwidth(theta2, x_out, radius));
        let w = w.max(radius) + T::lit(4.0);
        let h = T::lit(2.0) * T::PI() / (self.oversample * w);
        SampledAxis::symmetric_with_spacing(half_width, h)
    }
}

fn prefactor<T: Real>(theta1: T, theta2: T) -> Result<T> {
    let cd = (theta1 - theta2).cos();
    if cd.abs() < T::lit(EPS_COS) {
        return Err(Error::ExcludedAngles { theta1: theta1.f64(), theta2: theta2.f64(), cos_diff: cd.f64() });
    }
    Ok(cd.abs().sqrt())
}

fn nodes<T: Real>(rule: PointRule<T>, axis: &SampledAxis<T>) -> (Vec<(T, C<T>)>, bool) {
    match rule {
        PointRule::At(y) => (vec![(y, cr(T::one()))], true),
        PointRule::Weights(w) => (w.into_iter().enumerate().map(|(i, wi)| (axis.point(i), wi)).collect(), false),
    }
}

/// `Σ_ij wa_i·wb_j·⟨m|D(a_i + i b_j)|n⟩` over the disc of radius `radius`.
fn contract<T: Real>(
    na: &[(T, C<T>)],
    nb: &[(T, C<T>)],
    exact: bool,
    radius: T,
    rows: usize,
    cols: usize,
) -> CMatrix<T> {
    let mut acc = CMatrix::zeros(rows, cols);
    let mut buf = CMatrix::zeros(rows, cols);
    let r2 = radius * radius;
    for &(xa, wa) in na {
        for &(xb, wb) in nb {
            if !exact && xa * xa + xb * xb > r2 {
                continue;
            }
            let wt = wa * wb;
            displacement_elements_into(C::new(xa, xb), &mut buf);
            for (o, &v) in acc.as_mut_slice().iter_mut().zip(buf.as_slice()) {
                *o += wt * v;
            }
        }
    }
    acc
}

/// Top-left `rows × cols` block of `U(α,β;θ₁,θ₂)` for raw (unreduced) angles.
pub fn bifrac_block_raw<T: Real>(
    alpha: T,
    beta: T,
    theta1: T,
    theta2: T,
    rows: usize,
    cols: usize,
    quad: &Quadrature<T>,
) -> Result<CMatrix<T>> {
    let pref = prefactor(theta1, theta2)?;
    let position = position_plan(alpha, beta, theta1, theta2, rows, cols, quad);
    let use_position = match (quad.route, &position) {
        (Route::Position, Some(_)) => true,
        (Route::Position, None) => {
            return Err(Error::InvalidInput("position route unavailable at these angles".into()));
        }
        (Route::Weyl, _) | (Route::Auto, None) => false,
        (Route::Auto, Some(p)) => p.cost() < weyl_cost(alpha, beta, theta1, theta2, rows, cols, quad)?,
    };
    let m = if use_position {
        position_block(alpha, beta, theta1, theta2, rows, cols, &position.unwrap())?
    } else {
        weyl_block(alpha, beta, theta1, theta2, rows, cols, quad)?
    };
    Ok(m.scale(cr(pref)))
}

fn weyl_axis<T: Real>(
    alpha: T,
    beta: T,
    theta1: T,
    theta2: T,
    rows: usize,
    cols: usize,
    quad: &Quadrature<T>,
) -> Result<(T, SampledAxis<T>)> {
    let radius = quad.radius(rows, cols);
    let x_out = alpha.abs().max(beta.abs());
    Ok((radius, quad.axis(theta1, theta2, radius, radius, x_out)?))
}

fn weyl_cost<T: Real>(
    alpha: T,
    beta: T,
    theta1: T,
    theta2: T,
    rows: usize,
    cols: usize,
    quad: &Quadrature<T>,
) -> Result<f64> {
    let (_, axis) = weyl_axis(alpha, beta, theta1, theta2, rows, cols, quad)?;
    let m = axis.len() as f64;
    let delta = |t: T, x: T| matches!(point_rule(x, t, Sign::Plus, &axis), PointRule::At(_));
    let na = if delta(theta2, beta) { 1.0 } else { m };
    let nb = if delta(theta1, alpha) { 1.0 } else { m };
    Ok(0.8 * na * nb * (rows * cols + 8) as f64)
}

fn weyl_block<T: Real>(
    alpha: T,
    beta: T,
    theta1: T,
    theta2: T,
    rows: usize,
    cols: usize,
    quad: &Quadrature<T>,
) -> Result<CMatrix<T>> {
    let (radius, axis) = weyl_axis(alpha, beta, theta1, theta2, rows, cols, quad)?;
    let (na, ea) = nodes(point_rule(beta, theta2, Sign::Plus, &axis), &axis);
    let (nb, eb) = nodes(point_rule(alpha, theta1, Sign::Minus, &axis), &axis);
    Ok(contract(&na, &nb, ea || eb, radius, rows, cols))
}

struct PositionPlan<T> {
    axis: SampledAxis<T>,
    rows: usize,
    cols: usize,
}

impl<T: Real> PositionPlan<T> {
    fn cost(&self) -> f64 {
        let m = self.axis.len() as f64;
        m * m * (self.cols as f64 + 24.0) + m * (self.rows * self.cols) as f64
    }
}

fn position_plan<T: Real>(
    alpha: T,
    beta: T,
    theta1: T,
    theta2: T,
    rows: usize,
    cols: usize,
    quad: &Quadrature<T>,
) -> Option<PositionPlan<T>> {
    let (s2, c2) = theta2.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    let min = T::lit(POSITION_MIN);
    if s2.abs() < min || c1.abs() < min {
        return None;
    }
    let n = rows.max(cols);
    let half = (T::of(2 * n + 1)).sqrt() + quad.margin;
    let sqrt2 = T::lit(2.0).sqrt();
    // Hermite functions plus the local frequencies of both kernels in x or y.
    let freq = (T::of(2 * n + 1)).sqrt()
        + half * (c2 / s2).abs()
        + beta.abs() / (sqrt2 * s2.abs())
        + half * (s1 / c1).abs()
        + alpha.abs() / (sqrt2 * c1.abs());
    let h = T::lit(2.0) * T::PI() / (quad.oversample * (freq + T::lit(4.0)));
    let axis = SampledAxis::symmetric_with_spacing(half, h).ok()?;
    Some(PositionPlan { axis, rows, cols })
}

fn position_block<T: Real>(
    alpha: T,
    beta: T,
    theta1: T,
    theta2: T,
    rows: usize,
    cols: usize,
    plan: &PositionPlan<T>,
) -> Result<CMatrix<T>> {
    let axis = &plan.axis;
    let m = axis.len();
    let n = rows.max(cols);
    let xs = axis.points();
    let herm: Vec<Vec<T>> = xs.iter().map(|&x| hermite_functions(x, n)).collect();
    let sqrt2 = T::lit(2.0).sqrt();
    let t1 = theta1 + T::FRAC_PI_2();
    let scale = T::PI().sqrt();
    let mut kh = CMatrix::zeros(m, cols);
    let mut row = vec![cr(T::zero()); m];
    for i in 0..m {
        for (j, r) in row.iter_mut().enumerate() {
            let (x, y) = (xs[i], xs[j]);
            *r = kernel_eval(beta, (x - y) / sqrt2, theta2)?
                * kernel_eval(alpha, -(x + y) / sqrt2, t1)?
                * axis.weight(j);
        }
        for col in 0..cols {
            let mut acc = cr(T::zero());
            for j in 0..m {
                acc += row[j] * herm[j][col];
            }
            kh[(i, col)] = acc * scale;
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |r, col| {
        let mut acc = cr(T::zero());
        for i in 0..m {
            acc += kh[(i, col)] * (herm[i][r] * axis.weight(i));
        }
        acc
    }))
}

/// Top-left `rows × cols` block of `U(α,β;θ₁,θ₂)`.
pub fn bifrac_block<T: Real>(
    alpha: T,
    beta: T,
    angles: &AnglePair<T>,
    rows: usize,
    cols: usize,
    quad: &Quadrature<T>,
) -> Result<CMatrix<T>> {
    bifrac_block_raw(alpha, beta, angles.theta1(), angles.theta2(), rows, cols, quad)
}

/// `⟨m|U(α,β;θ₁,θ₂)|n⟩`.
pub fn bifrac_matrix_element<T: Real>(
    m: usize,
    n: usize,
    alpha: T,
    beta: T,
    angles: &AnglePair<T>,
    space: FockSpace,
) -> Result<C<T>> {
    if m >= space.dim() || n >= space.dim() {
        return Err(Error::InvalidInput(format!("index ({m}, {n}) outside {}-level space", space.dim())));
    }
    let b = bifrac_block(alpha, beta, angles, m + 1, n + 1, &Quadrature::default())?;
    Ok(b[(m, n)])
}

/// `U(α,β;θ₁,θ₂)` on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct BifracOperator<T> {
    pub alpha: T,
    pub beta: T,
    pub angles: AnglePair<T>,
    pub matrix: FockOperator<T>,
}

/// Size of the interior block on which unitarity is enforced.
pub fn interior_block(dim: usize) -> usize {
    (dim / 4).max(1)
}

/// `max |(U†U − 1)_{ij}|` over `i, j < block`, using `rows` rows of `U`.
pub fn unitarity_defect<T: Real>(
    alpha: T,
    beta: T,
    angles: &AnglePair<T>,
    rows: usize,
    block: usize,
    quad: &Quadrature<T>,
) -> Result<T> {
    let u = bifrac_block(alpha, beta, angles, rows, block, quad)?;
    Ok(gram_defect(&u))
}

fn gram_defect<T: Real>(u: &CMatrix<T>) -> T {
    let g = u.adjoint().matmul(u);
    g.max_abs_diff(&CMatrix::identity(g.rows()))
}

pub fn build_bifrac<T: Real>(alpha: T, beta: T, angles: &AnglePair<T>, space: FockSpace) -> Result<BifracOperator<T>> {
    build_bifrac_with(alpha, beta, angles, space, &Quadrature::default(), T::lit(UNITARITY_TOL))
}

/// Full `N × N` matrix, rejected when the interior block is not unitary to
/// within `tol` (a sign that the truncation is too small for these angles).
pub fn build_bifrac_with<T: Real>(
    alpha: T,
    beta: T,
    angles: &AnglePair<T>,
    space: FockSpace,
    quad: &Quadrature<T>,
    tol: T,
) -> Result<BifracOperator<T>> {
    let n = space.dim();
    let u = bifrac_block(alpha, beta, angles, n, n, quad)?;
    let k = interior_block(n);
    let d = gram_defect(&CMatrix::from_fn(n, k, |i, j| u[(i, j)]));
    if d > tol {
        return Err(Error::UnitarityFailure { defect: d.f64(), tol: tol.f64() });
    }
    Ok(BifracOperator { alpha, beta, angles: *angles, matrix: FockOperator::new(space, u)? })
}

/// `⟨m|U(α,β)|n⟩` for `m < rows`, `n < cols`, tabulated over `out × out`
/// by the separable grid transform of the sampled displacement elements.
/// Entry `m * cols + n` holds the grid for `(m, n)`.
pub fn bifrac_grids<T: Real>(
    angles: &AnglePair<T>,
    rows: usize,
    cols: usize,
    out: SampledAxis<T>,
    quad: &Quadrature<T>,
) -> Result<Vec<ComplexGrid2D<T>>> {
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let radius = quad.radius(rows, cols);
    let x_out = out.x_max().abs().max(out.x_min().abs());
    let input = quad.axis(t1, t2, radius, radius, x_out)?;
    let delta =
        quadrature_bandwidth(t1, x_out, radius) == T::zero() || quadrature_bandwidth(t2, x_out, radius) == T::zero();
    let input = if delta { out } else { input };
    let n_in = input.len();
    let mut tables = vec![CMatrix::zeros(n_in, n_in); rows * cols];
    let mut buf = CMatrix::zeros(rows, cols);
    for i in 0..n_in {
        for j in 0..n_in {
            displacement_elements_into(C::new(input.point(i), input.point(j)), &mut buf);
            for (k, v) in buf.as_slice().iter().enumerate() {
                tables[k][(i, j)] = *v;
            }
        }
    }
    let spec = Frft2::new(t1, Sign::Minus, t2, Sign::Plus, Layout::Swapped);
    let pref = cr(angles.prefactor());
    tables
        .into_iter()
        .map(|t| {
            let g = ComplexGrid2D::from_fn(input, input, |_, _| cr(T::zero()));
            let g = ComplexGrid2D { values: t.as_slice().to_vec(), ..g };
            frft2_apply_to(&g, &spec, out, out).map(|r| r.map(|z| z * pref))
        })
        .collect()
}

/// Variables integrated out by [`marginal_u`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal<T> {
    /// `∫ U(α, β) dα` at fixed `β`.
    Alpha { beta: T },
    /// `∫ U(α, β) dβ` at fixed `α`.
    Beta { alpha: T },
    /// `∫∫ U(α, β) dα dβ`.
    Both,
}

/// Integrates `U` over the requested variables by trapezoid quadrature of
/// its sampled values on a window wide enough for `U` to decay.
///
/// The output-axis trapezoid sum is folded into the kernel weights before
/// contracting with the displacement elements, which is the same discrete
/// sum reordered.
pub fn marginal_u<T: Real>(
    angles: &AnglePair<T>,
    which: Marginal<T>,
    space: FockSpace,
    quad: &Quadrature<T>,
) -> Result<FockOperator<T>> {
    let n = space.dim();
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let radius = quad.radius(n, n);
    let fixed = match which {
        Marginal::Alpha { beta } => beta.abs(),
        Marginal::Beta { alpha } => alpha.abs(),
        Marginal::Both => T::zero(),
    };
    let half = radius + fixed;
    let axis = quad.axis(t1, t2, radius, half, half)?;
    let (na, nb, exact) = match which {
        Marginal::Alpha { beta } => {
            let (na, ea) = nodes(point_rule(beta, t2, Sign::Plus, &axis), &axis);
            (na, weighted(&axis, integrated_weights(t1, Sign::Minus, axis, axis)?), ea)
        }
        Marginal::Beta { alpha } => {
            let (nb, eb) = nodes(point_rule(alpha, t1, Sign::Minus, &axis), &axis);
            (weighted(&axis, integrated_weights(t2, Sign::Plus, axis, axis)?), nb, eb)
        }
        Marginal::Both => (
            weighted(&axis, integrated_weights(t2, Sign::Plus, axis, axis)?),
            weighted(&axis, integrated_weights(t1, Sign::Minus, axis, axis)?),
            false,
        ),
    };
    check_edge_decay(angles, which, n, half, quad)?;
    let m = contract(&na, &nb, exact, radius, n, n).scale(cr(angles.prefactor()));
    FockOperator::new(space, m)
}

fn weighted<T: Real>(axis: &SampledAxis<T>, w: Vec<C<T>>) -> Vec<(T, C<T>)> {
    w.into_iter().enumerate().map(|(i, wi)| (axis.point(i), wi)).collect()
}

/// `U` must be negligible on the edge of the integration window.
fn check_edge_decay<T: Real>(
    angles: &AnglePair<T>,
    which: Marginal<T>,
    n: usize,
    half: T,
    quad: &Quadrature<T>,
) -> Result<()> {
    let probes: Vec<(T, T)> = match which {
        Marginal::Alpha { beta } => vec![(half, beta), (-half, beta)],
        Marginal::Beta { alpha } => vec![(alpha, half), (alpha, -half)],
        Marginal::Both => vec![(half, T::zero()), (-half, T::zero()), (T::zero(), half), (T::zero(), -half)],
    };
    let tol = T::lit(1e-7);
    for (a, b) in probes {
        let edge = bifrac_block(a, b, angles, n, n, quad)?.max_abs();
        if edge > tol {
            return Err(Error::WindowTooSmall { tail: edge.f64(), tol: tol.f64() });
        }
    }
    Ok(())
}

/// The same marginals built from the closed-form integrated kernel,
/// `∫Δ(x, y; θ) dx = chirp(y, θ)`, in place of numerical integration.
pub fn chirp_marginal<T: Real>(
    angles: &AnglePair<T>,
    which: Marginal<T>,
    space: FockSpace,
    quad: &Quadrature<T>,
) -> Result<FockOperator<T>> {
    use crate::frft::chirp_eval;
    let n = space.dim();
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let radius = quad.radius(n, n);
    let x_out = match which {
        Marginal::Alpha { beta } => beta.abs(),
        Marginal::Beta { alpha } => alpha.abs(),
        Marginal::Both => T::zero(),
    };
    let tan_band = |t: T| {
        if t.cos().abs() < T::lit(EPS_THETA) {
            T::zero()
        } else {
            radius * t.tan().abs() + radius
        }
    };
    let base = quad.axis(t1, t2, radius, radius, x_out)?;
    let w = tan_band(t1).max(tan_band(t2)) + T::lit(4.0);
    let h = (T::lit(2.0) * T::PI() / (quad.oversample * w)).min(base.spacing());
    let axis = SampledAxis::symmetric_with_spacing(radius, h)?;
    // At cos θ = 0 the integrated kernel is √(2π)·δ(y).
    let chirped = |t: T| -> Result<(Vec<(T, C<T>)>, bool)> {
        if t.cos().abs() < T::lit(EPS_THETA) {
            return Ok((vec![(T::zero(), cr((T::lit(2.0) * T::PI()).sqrt()))], true));
        }
        let nodes = (0..axis.len()).map(|i| Ok((axis.point(i), chirp_eval(axis.point(i), t)? * axis.weight(i))));
        Ok((nodes.collect::<Result<_>>()?, false))
    };
    let (na, nb, exact) = match which {
        Marginal::Alpha { beta } => {
            let (na, ea) = nodes(point_rule(beta, t2, Sign::Plus, &axis), &axis);
            let (nb, eb) = chirped(t1)?;
            (na, nb, ea || eb)
        }
        Marginal::Beta { alpha } => {
            let (nb, eb) = nodes(point_rule(alpha, t1, Sign::Minus, &axis), &axis);
            let (na, ea) = chirped(t2)?;
            (na, nb, ea || eb)
        }
        Marginal::Both => {
            let (na, ea) = chirped(t2)?;
            let (nb, eb) = chirped(t1)?;
            (na, nb, ea || eb)
        }
    };
    let m = contract(&na, &nb, exact, radius, n, n).scale(cr(angles.prefactor()));
    FockOperator::new(space, m)
}

/// `D(β, −α)`, the closed form of `U` at angles `(0, 0)`, from exact elements.
pub fn weyl_limit<T: Real>(alpha: T, beta: T, rows: usize, cols: usize) -> CMatrix<T> {
    displacement_elements(C::new(beta, -alpha), rows, cols)
}
