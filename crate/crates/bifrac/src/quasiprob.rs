//! Bifractional Wigner functions `A(α,β;θ₁,θ₂|ρ) = Tr[ρ U(α,β;θ₁,θ₂)]`,
//! their `|A|²` marginals and the interpolating moments.

use crate::bifrac_op::Quadrature;
use crate::error::{Error, Result};
use crate::fock::{coherent_state, weyl_unchecked, FockOperator, FockSpace};
use crate::frame::AnglePair;
use crate::frft::{frft2_apply_to, quadrature_bandwidth, ComplexGrid2D, Frft2, Layout, SampledAxis, Sign};
use crate::scalar::{c, cr, Real};

/// Relative edge level of `|A|` above which the window is rejected.
pub const A_TAIL_TOL: f64 = 1e-6;

/// Relative change tolerated when the grid spacing is halved.
pub const CONVERGENCE_TOL: f64 = 1e-3;

/// Variance brackets in `[−NEG_VAR_TOL, 0)` are clamped to zero.
pub const NEG_VAR_TOL: f64 = 1e-8;

/// Default output window: half-width 12, spacing 1/8.
pub fn default_window<T: Real>() -> SampledAxis<T> {
    SampledAxis::symmetric(T::lit(12.0), 193).expect("valid axis")
}

#[derive(Debug, Clone)]
pub struct AFunction<T> {
    pub rho: FockOperator<T>,
    pub angles: AnglePair<T>,
    pub grid: ComplexGrid2D<T>,
}

/// Radius beyond which `|W̃|` stays below `1e-13` of its largest value,
/// scanned along rays out to the bound set by the Fock support.
pub(crate) fn weyl_radius<T: Real>(rho: &FockOperator<T>) -> T {
    let k = rho.support().max(1);
    let bound = Quadrature::<T>::default().radius(k, k);
    let rays = 64;
    let step = T::lit(0.25);
    let steps = (bound / step).ceil().to_usize().unwrap_or(1);
    let mut samples = Vec::with_capacity(rays * steps);
    for r in 0..rays {
        let phi = T::lit(2.0) * T::PI() * T::of(r) / T::of(rays);
        let (s, co) = phi.sin_cos();
        for i in 0..=steps {
            let rad = step * T::of(i);
            samples.push((rad, weyl_unchecked(rho, c(rad * co, rad * s), false).norm()));
        }
    }
    let peak = samples.iter().map(|p| p.1).fold(T::zero(), T::max);
    let last = samples.iter().filter(|p| p.1 > peak * T::lit(1e-13)).map(|p| p.0).fold(T::zero(), T::max);
    (last + T::lit(1.5)).min(bound)
}

fn weyl_grid<T: Real>(rho: &FockOperator<T>, a: SampledAxis<T>, b: SampledAxis<T>) -> ComplexGrid2D<T> {
    ComplexGrid2D::from_fn(a, b, |x, y| weyl_unchecked(rho, c(x, y), false))
}

/// `W̃(α′,β′|ρ)` on an axis fine enough for every non-delta angle pair and
/// outputs within `window`, reusable across angle sweeps.
#[derive(Debug, Clone)]
pub struct WeylTable<T> {
    rho: FockOperator<T>,
    grid: ComplexGrid2D<T>,
}

impl<T: Real> WeylTable<T> {
    pub fn new(rho: &FockOperator<T>, window: &SampledAxis<T>) -> Result<Self> {
        let quad = Quadrature::<T>::default();
        let radius = weyl_radius(rho);
        let x_out = window.x_max().abs().max(window.x_min().abs());
        // Worst case over angles: |cot| ≤ √3 and |csc| ≤ 2 once small angles are split.
        let band = radius * (T::one() + T::lit(3.0).sqrt()) + x_out * T::lit(2.0) + T::lit(4.0);
        let h = T::lit(2.0) * T::PI() / (quad.oversample * band);
        let axis = SampledAxis::symmetric_with_spacing(radius, h)?;
        Ok(Self { rho: rho.clone(), grid: weyl_grid(rho, axis, axis) })
    }

    pub fn grid(&self) -> &ComplexGrid2D<T> {
        &self.grid
    }
}

fn is_delta<T: Real>(theta: T) -> bool {
    quadrature_bandwidth(theta, T::one(), T::one()) == T::zero()
}

/// Tabulates `A` on `window × window` from the Weyl function.
pub fn a_function<T: Real>(
    rho: &FockOperator<T>,
    angles: &AnglePair<T>,
    window: SampledAxis<T>,
) -> Result<AFunction<T>> {
    a_function_from(&WeylTable::new(rho, &window)?, angles, window)
}

pub fn a_function_from<T: Real>(
    table: &WeylTable<T>,
    angles: &AnglePair<T>,
    window: SampledAxis<T>,
) -> Result<AFunction<T>> {
    let (t1, t2) = (angles.theta1(), angles.theta2());
    // θ₁ acts on β′, θ₂ on α′; a delta limit pins that input axis to the output.
    let (d1, d2) = (is_delta(t1), is_delta(t2));
    let owned;
    let w = if d1 || d2 {
        let a = if d2 { window } else { table.grid.alpha };
        let b = if d1 { window } else { table.grid.beta };
        owned = weyl_grid(&table.rho, a, b);
        &owned
    } else {
        &table.grid
    };
    let spec = Frft2::new(t1, Sign::Minus, t2, Sign::Plus, Layout::Swapped);
    let pref = cr(angles.prefactor());
    let grid = frft2_apply_to(w, &spec, window, window)?.map(|z| z * pref);
    grid.check_tail(T::lit(A_TAIL_TOL))?;
    Ok(AFunction { rho: table.rho.clone(), angles: *angles, grid })
}

impl<T: Real> AFunction<T> {
    /// Same function on the window with halved spacing.
    pub fn refined(&self) -> Result<Self> {
        let w = self.grid.alpha;
        let fine = SampledAxis::new(w.x_min(), w.x_max(), 2 * w.len() - 1)?;
        a_function(&self.rho, &self.angles, fine)
    }

    fn squared(&self) -> Vec<T> {
        self.grid.values.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Variables integrated out of `|A|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    /// `∫|A|²dα` as a function of `β`.
    Alpha,
    /// `∫|A|²dβ` as a function of `α`.
    Beta,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarginalValue<T> {
    /// Sample points and values of the remaining variable.
    Curve(Vec<(T, T)>),
    Scalar(T),
}

fn integrate_squared<T: Real>(a: &AFunction<T>, which: MarginalAxis) -> MarginalValue<T> {
    let g = &a.grid;
    let sq = a.squared();
    let (na, nb) = (g.alpha.len(), g.beta.len());
    match which {
        MarginalAxis::Alpha => MarginalValue::Curve(
            (0..nb).map(|j| (g.beta.point(j), (0..na).map(|i| sq[i * nb + j] * g.alpha.weight(i)).sum())).collect(),
        ),
        MarginalAxis::Beta => MarginalValue::Curve(
            (0..na).map(|i| (g.alpha.point(i), (0..nb).map(|j| sq[i * nb + j] * g.beta.weight(j)).sum())).collect(),
        ),
        MarginalAxis::Both => MarginalValue::Scalar(
            (0..na).map(|i| g.alpha.weight(i) * (0..nb).map(|j| sq[i * nb + j] * g.beta.weight(j)).sum::<T>()).sum(),
        ),
    }
}

/// Relative difference between a marginal and its refinement, matching
/// curve samples at shared points.
fn marginal_change<T: Real>(coarse: &MarginalValue<T>, fine: &MarginalValue<T>) -> T {
    match (coarse, fine) {
        (MarginalValue::Scalar(a), MarginalValue::Scalar(b)) => (*a - *b).abs() / b.abs().max(T::min_positive_value()),
        (MarginalValue::Curve(a), MarginalValue::Curve(b)) => {
            let peak = b.iter().map(|p| p.1.abs()).fold(T::zero(), T::max);
            let worst = a.iter().enumerate().map(|(i, p)| (p.1 - b[2 * i].1).abs()).fold(T::zero(), T::max);
            worst / peak.max(T::min_positive_value())
        }
        _ => T::infinity(),
    }
}

/// Trapezoid marginals of `|A|²`, accepted only if halving the spacing
/// changes them by less than [`CONVERGENCE_TOL`].
pub fn marginal_a_squared<T: Real>(a: &AFunction<T>, which: MarginalAxis) -> Result<MarginalValue<T>> {
    let value = integrate_squared(a, which);
    let fine = integrate_squared(&a.refined()?, which);
    let change = marginal_change(&value, &fine);
    if change > T::lit(CONVERGENCE_TOL) {
        return Err(Error::ConvergenceFailure { change: change.f64(), tol: CONVERGENCE_TOL });
    }
    Ok(value)
}

/// `∫|A|²dαdβ` without the refinement check.
pub fn total_a_squared<T: Real>(a: &AFunction<T>) -> T {
    match integrate_squared(a, MarginalAxis::Both) {
        MarginalValue::Scalar(s) => s,
        MarginalValue::Curve(_) => unreachable!(),
    }
}

/// Normalisation of the moments `⟨⟨αⁿ⟩⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentNorm {
    /// `1/(π Tr ρ²)`, so that `⟨⟨1⟩⟩ = |cos(θ₁−θ₂)|`.
    Purity,
    /// `1/(π |cos(θ₁−θ₂)| Tr ρ²)`, so that `⟨⟨1⟩⟩ = 1`.
    Probability,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    /// `⟨⟨1⟩⟩`.
    pub norm: T,
    pub mean_alpha: T,
    pub mean_beta: T,
    pub delta_alpha: T,
    pub delta_beta: T,
}

fn spread<T: Real>(second: T, first: T) -> Result<T> {
    let v = second - first * first;
    if v < -T::lit(NEG_VAR_TOL) {
        return Err(Error::NegativeVariance { value: v.f64() });
    }
    Ok(v.max(T::zero()).sqrt())
}

/// `⟨⟨αⁿ⟩⟩ = N ∫αⁿ|A|²dαdβ` for `n ≤ 2` and the spreads
/// `δα = [⟨⟨α²⟩⟩ − ⟨⟨α⟩⟩²]^{1/2}`, likewise for `β`.
pub fn interpolating_moments<T: Real>(a: &AFunction<T>, norm: MomentNorm) -> Result<Moments<T>> {
    let g = &a.grid;
    let sq = a.squared();
    let nb = g.beta.len();
    let mut m = [T::zero(); 5];
    for i in 0..g.alpha.len() {
        let x = g.alpha.point(i);
        for j in 0..nb {
            let y = g.beta.point(j);
            let w = sq[i * nb + j] * g.alpha.weight(i) * g.beta.weight(j);
            m[0] += w;
            m[1] += w * x;
            m[2] += w * x * x;
            m[3] += w * y;
            m[4] += w * y * y;
        }
    }
    let mut scale = T::PI() * a.rho.purity();
    if norm == MomentNorm::Probability {
        scale *= a.angles.cos_diff().abs();
    }
    let m: Vec<T> = m.iter().map(|&v| v / scale).collect();
    Ok(Moments {
        norm: m[0],
        mean_alpha: m[1],
        mean_beta: m[3],
        delta_alpha: spread(m[2], m[1])?,
        delta_beta: spread(m[4], m[3])?,
    })
}

/// `ρ = p|α₀,β₀⟩⟨α₀,β₀| + (1−p)|−α₀,−β₀⟩⟨−α₀,−β₀|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatState<T> {
    pub alpha0: T,
    pub beta0: T,
    pub p: T,
}

impl<T: Real> Default for CatState<T> {
    fn default() -> Self {
        Self { alpha0: T::lit(2.0), beta0: T::zero(), p: T::lit(0.5) }
    }
}

pub fn cat_density<T: Real>(spec: &CatState<T>, space: FockSpace) -> Result<FockOperator<T>> {
    if !(spec.p >= T::zero() && spec.p <= T::one()) {
        return Err(Error::InvalidInput(format!("mixing weight {} outside [0, 1]", spec.p)));
    }
    let plus = coherent_state(space, spec.alpha0, spec.beta0)?;
    let minus = coherent_state(space, -spec.alpha0, -spec.beta0)?;
    let rho = FockOperator::projector(&plus)
        .scale(cr(spec.p))
        .add(&FockOperator::projector(&minus).scale(cr(T::one() - spec.p)));
    rho.validate_density()?;
    Ok(rho)
}

/// Which figure table to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// `δα(π/2,θ₂)·δβ(0,0)` against `θ₂ ∈ [0,π)` for the `p = 1/2` cat.
    Fig2,
    /// `δα(π/4,π/4)·δβ(0,0)` against `p ∈ [0,1]`.
    Fig3,
}

/// Why a sweep row carries no values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The angle pair lies in the excluded band `|cos(θ₁−θ₂)| < ε`.
    Excluded,
    /// `A` does not decay inside the window.
    Window,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRow<T> {
    /// `θ₂` for Fig. 2, `p` for Fig. 3.
    pub x: T,
    pub delta_alpha: T,
    pub delta_beta: T,
    pub product: T,
    pub status: RowStatus,
}

fn delta_beta_weyl<T: Real>(rho: &FockOperator<T>, window: SampledAxis<T>) -> Result<T> {
    let a = a_function(rho, &AnglePair::new(T::zero(), T::zero())?, window)?;
    Ok(interpolating_moments(&a, MomentNorm::Purity)?.delta_beta)
}

/// Rows of Fig. 2 (`resolution` values of `θ₂`) or Fig. 3 (`resolution`
/// values of `p`, endpoints included), with literal moment normalisation.
pub fn figure_curves<T: Real>(
    which: Figure,
    resolution: usize,
    space: FockSpace,
    window: SampledAxis<T>,
) -> Result<Vec<FigureRow<T>>> {
    if resolution < 2 {
        return Err(Error::InvalidInput("figure resolution must be at least 2".into()));
    }
    let mut rows = Vec::with_capacity(resolution);
    match which {
        Figure::Fig2 => {
            let rho = cat_density(&CatState::default(), space)?;
            let db = delta_beta_weyl(&rho, window)?;
            let table = WeylTable::new(&rho, &window)?;
            for k in 0..resolution {
                let t2 = T::PI() * T::of(k) / T::of(resolution);
                let mut row = FigureRow {
                    x: t2,
                    delta_alpha: T::nan(),
                    delta_beta: db,
                    product: T::nan(),
                    status: RowStatus::Ok,
                };
                match AnglePair::new(T::FRAC_PI_2(), t2) {
                    Err(Error::ExcludedAngles { .. }) => row.status = RowStatus::Excluded,
                    Err(e) => return Err(e),
                    Ok(angles) => match a_function_from(&table, &angles, window) {
                        Err(Error::WindowTooSmall { .. }) => row.status = RowStatus::Window,
                        Err(e) => return Err(e),
                        Ok(a) => {
                            row.delta_alpha = interpolating_moments(&a, MomentNorm::Purity)?.delta_alpha;
                            row.product = row.delta_alpha * db;
                        }
                    },
                }
                rows.push(row);
            }
        }
        Figure::Fig3 => {
            // A is linear in ρ: mix the grids of the two pure components.
            let weyl = AnglePair::new(T::zero(), T::zero())?;
            let angles = AnglePair::new(T::FRAC_PI_4(), T::FRAC_PI_4())?;
            let plus = cat_density(&CatState { p: T::one(), ..CatState::default() }, space)?;
            let minus = cat_density(&CatState { p: T::zero(), ..CatState::default() }, space)?;
            let parts = [
                (a_function(&plus, &angles, window)?, a_function(&minus, &angles, window)?),
                (a_function(&plus, &weyl, window)?, a_function(&minus, &weyl, window)?),
            ];
            for k in 0..resolution {
                let p = T::of(k) / T::of(resolution - 1);
                let rho = cat_density(&CatState { p, ..CatState::default() }, space)?;
                let mix = |(a, b): &(AFunction<T>, AFunction<T>)| -> Result<Moments<T>> {
                    let grid = a.grid.zip_map(&b.grid, |x, y| x * p + y * (T::one() - p))?;
                    interpolating_moments(&AFunction { rho: rho.clone(), angles: a.angles, grid }, MomentNorm::Purity)
                };
                let da = mix(&parts[0])?.delta_alpha;
                let db = mix(&parts[1])?.delta_beta;
                rows.push(FigureRow { x: p, delta_alpha: da, delta_beta: db, product: da * db, status: RowStatus::Ok });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::wigner_function;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn vacuum() -> FockOperator<f64> {
        let s = FockSpace::new(24).unwrap();
        FockOperator::projector(&crate::fock::FockState::number(s, 0))
    }

    fn small_window() -> SampledAxis<f64> {
        SampledAxis::symmetric(8.0, 97).unwrap()
    }

    #[test]
    fn weyl_limit_relabels() {
        let rho = cat_density(&CatState { alpha0: 0.8, beta0: 0.3, p: 0.3 }, FockSpace::new(24).unwrap()).unwrap();
        let a = a_function(&rho, &AnglePair::new(0.0, 0.0).unwrap(), small_window()).unwrap();
        let w = small_window();
        for &(i, j) in &[(48, 48), (40, 60), (70, 30)] {
            let expect = weyl_unchecked(&rho, c(w.point(j), -w.point(i)), false);
            assert!((a.grid.get(i, j) - expect).norm() < 1e-6);
        }
        assert!((a.grid.get(48, 48).re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wigner_limit() {
        let rho = cat_density(&CatState { alpha0: 0.8, beta0: 0.3, p: 0.5 }, FockSpace::new(24).unwrap()).unwrap();
        let a = a_function(&rho, &AnglePair::new(FRAC_PI_2, FRAC_PI_2).unwrap(), small_window()).unwrap();
        let w = small_window();
        for &(i, j) in &[(48, 48), (40, 60), (70, 30), (55, 44)] {
            let v = a.grid.get(i, j);
            assert!(v.im.abs() < 1e-6);
            assert!((v.re - wigner_function(&rho, w.point(i), w.point(j)).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn vacuum_total_and_moments() {
        let angles = AnglePair::new(FRAC_PI_3, FRAC_PI_4).unwrap();
        let a = a_function(&vacuum(), &angles, small_window()).unwrap();
        let total = marginal_a_squared(&a, MarginalAxis::Both).unwrap();
        let expect = PI * angles.cos_diff().abs();
        assert!(matches!(total, MarginalValue::Scalar(s) if (s - expect).abs() / expect < 1e-3));
        let w = a_function(&vacuum(), &AnglePair::new(FRAC_PI_2, FRAC_PI_2).unwrap(), small_window()).unwrap();
        let m = interpolating_moments(&w, MomentNorm::Purity).unwrap();
        assert!((m.norm - 1.0).abs() < 1e-9 && m.mean_alpha.abs() < 1e-9);
        assert!((m.delta_alpha - 0.5f64.sqrt()).abs() < 1e-6 && (m.delta_beta - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn cat_purity() {
        let s = FockSpace::new(40).unwrap();
        let pure = cat_density(&CatState::<f64> { p: 1.0, ..CatState::default() }, s).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let half = cat_density(&CatState::<f64>::default(), s).unwrap();
        let ov = (-8.0f64).exp();
        assert!((half.purity() - (0.5 + ov * ov / 2.0)).abs() < 1e-10);
        assert!(cat_density(&CatState { p: 1.5, ..CatState::<f64>::default() }, s).is_err());
    }
}
