//! Operators from their bifractional Wigner functions: reconstruction,
//! trace products and the star product.

use crate::bifrac_op::{bifrac_grids, Quadrature};
use crate::error::{Error, Result};
use crate::fock::{displacement_elements_into, FockOperator, FockSpace, FockState};
use crate::frame::AnglePair;
use crate::frft::{
    frft2_apply_to, quadrature_bandwidth, AxisTransform, ComplexGrid2D, Frft2, Layout, SampledAxis, Sign,
};
use crate::linalg::CMatrix;
use crate::quasiprob::{a_function, weyl_radius, A_TAIL_TOL, CONVERGENCE_TOL};
use crate::scalar::{c, cis, cr, Real, C};

/// Default bound on grid points × `N²` for [`reconstruct_operator`].
pub const COST_BUDGET: f64 = 2e10;

/// Window for operator A-functions: half-width 12, spacing 0.08, fine
/// enough for the inverse transforms.
pub fn moyal_window<T: Real>() -> SampledAxis<T> {
    SampledAxis::symmetric(T::lit(12.0), 301).expect("valid axis")
}

/// `A(α,β|Θ) = Tr(ΘU)` and `A†(α,β|Θ) = Tr(ΘU†)` on a common window.
#[derive(Debug, Clone)]
pub struct OperatorAFunction<T> {
    pub angles: AnglePair<T>,
    pub a: ComplexGrid2D<T>,
    pub a_dagger: ComplexGrid2D<T>,
    pub source: Option<FockOperator<T>>,
    /// Fock levels carrying the operator, used to size Weyl-space grids.
    pub support: usize,
}

pub fn operator_a_function<T: Real>(
    theta: &FockOperator<T>,
    angles: &AnglePair<T>,
    window: SampledAxis<T>,
) -> Result<OperatorAFunction<T>> {
    let a = a_function(theta, angles, window)?.grid;
    let dag = theta.dagger();
    let a_dagger = if dag.matrix().max_abs_diff(theta.matrix()) == T::zero() {
        a.map(|z| z.conj())
    } else {
        a_function(&dag, angles, window)?.grid.map(|z| z.conj())
    };
    Ok(OperatorAFunction { angles: *angles, a, a_dagger, source: Some(theta.clone()), support: theta.support() })
}

fn check_pair<T: Real>(a1: &OperatorAFunction<T>, a2: &OperatorAFunction<T>) -> Result<()> {
    if a1.angles != a2.angles {
        return Err(Error::AngleMismatch);
    }
    if a1.a.alpha != a2.a.alpha || a1.a.beta != a2.a.beta {
        return Err(Error::InvalidInput("A-functions sampled on different windows".into()));
    }
    Ok(())
}

/// `Tr(Θ₁Θ₂) = (1/(π|cos(θ₁−θ₂)|)) ∫ A(·|Θ₁)·A†(·|Θ₂) dαdβ`.
pub fn trace_product<T: Real>(a1: &OperatorAFunction<T>, a2: &OperatorAFunction<T>) -> Result<C<T>> {
    check_pair(a1, a2)?;
    let s = a1.a.zip_map(&a2.a_dagger, |x, y| x * y)?.integrate();
    Ok(s / (T::PI() * a1.angles.cos_diff().abs()))
}

fn delta<T: Real>(theta: T) -> bool {
    quadrature_bandwidth(theta, T::one(), T::one()) == T::zero()
}

/// `Θ = (1/(π|cos(θ₁−θ₂)|)) ∫ A†(α,β|Θ) U(α,β) dαdβ` on `space`.
///
/// The trapezoid sum over the window is regrouped through the Weyl
/// expansion of `U`: the transposed kernels carry `A†` to Weyl arguments,
/// which then weight the exact displacement elements.
pub fn reconstruct_operator<T: Real>(
    a: &OperatorAFunction<T>,
    space: FockSpace,
    budget: f64,
) -> Result<FockOperator<T>> {
    a.a_dagger.check_tail(T::lit(A_TAIL_TOL))?;
    let n = space.dim();
    let quad = Quadrature::<T>::default();
    let (t1, t2) = (a.angles.theta1(), a.angles.theta2());
    let (wa, wb) = (a.a_dagger.alpha, a.a_dagger.beta);
    let radius = quad.radius(n, n);
    let x_out = wa.x_max().abs().max(wb.x_max().abs());
    let fine = quad.axis(t1, t2, radius, radius, x_out)?;
    // Swapped layout: θ₁ maps β′ onto α, θ₂ maps α′ onto β.
    let in_beta = if delta(t1) { wa } else { fine };
    let in_alpha = if delta(t2) { wb } else { fine };
    let cost = (in_alpha.len() * in_beta.len() * n * n) as f64;
    if cost > budget {
        return Err(Error::CostBudget { cost, budget });
    }
    let ka = AxisTransform::new(t1, Sign::Minus, in_beta, wa)?.matrix();
    let kb = AxisTransform::new(t2, Sign::Plus, in_alpha, wb)?.matrix();
    let g = CMatrix::from_fn(wa.len(), wb.len(), |i, j| a.a_dagger.get(i, j) * (wa.weight(i) * wb.weight(j)));
    let b = kb.transpose().matmul(&g.transpose()).matmul(&ka);
    let r2 = radius * radius;
    let mut out = CMatrix::zeros(n, n);
    let mut d = CMatrix::zeros(n, n);
    for k in 0..in_alpha.len() {
        for l in 0..in_beta.len() {
            let z = c(in_alpha.point(k), in_beta.point(l));
            if z.norm_sqr() > r2 {
                continue;
            }
            let w = b[(k, l)];
            displacement_elements_into(z, &mut d);
            for (o, v) in out.as_mut_slice().iter_mut().zip(d.as_slice()) {
                *o += w * v;
            }
        }
    }
    let scale = T::one() / (T::PI() * a.angles.prefactor());
    FockOperator::new(space, out.scale(cr(scale)))
}

/// Symmetric axis with an odd number of points, so that `0` and `−x` are
/// samples whenever `x` is.
fn odd_axis<T: Real>(half: T, max_spacing: T) -> Result<SampledAxis<T>> {
    let mut n = (T::lit(2.0) * half / max_spacing).ceil().to_usize().unwrap_or(8) + 1;
    if n % 2 == 0 {
        n += 1;
    }
    SampledAxis::symmetric(half, n.max(9))
}

/// Local frequency bound of a Weyl function carried by `k` Fock levels.
fn weyl_band<T: Real>(k: usize) -> T {
    T::lit(2.0).sqrt() * (T::of(2 * k + 1).sqrt() + T::lit(3.0))
}

/// Inverts the A-transform onto the Weyl grid `w × w`.
fn to_weyl<T: Real>(a: &ComplexGrid2D<T>, angles: &AnglePair<T>, w: SampledAxis<T>) -> Result<ComplexGrid2D<T>> {
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let spec = Frft2::new(-t2, Sign::Plus, -t1, Sign::Minus, Layout::Swapped).with_tail_tol(T::lit(A_TAIL_TOL));
    let inv = cr(T::one() / angles.prefactor());
    if delta(t1) || delta(t2) {
        // Delta limits need matching axes; transform on the window, then resample.
        let g = frft2_apply_to(a, &spec, a.beta, a.alpha)?;
        return Ok(sinc_resample(&g, w, w).map(|z| z * inv));
    }
    Ok(frft2_apply_to(a, &spec, w, w)?.map(|z| z * inv))
}

/// Forward A-transform of a Weyl grid onto `window × window`.
fn from_weyl<T: Real>(
    wt: &ComplexGrid2D<T>,
    angles: &AnglePair<T>,
    window: SampledAxis<T>,
) -> Result<ComplexGrid2D<T>> {
    let (t1, t2) = (angles.theta1(), angles.theta2());
    let spec = Frft2::new(t1, Sign::Minus, t2, Sign::Plus, Layout::Swapped).with_tail_tol(T::lit(A_TAIL_TOL));
    let quad = Quadrature::<T>::default();
    let half = wt.alpha.x_max();
    let x_out = window.x_max().abs();
    let fine = quad.axis(t1, t2, half, half, x_out)?;
    let in_a = if delta(t2) { window } else { fine };
    let in_b = if delta(t1) { window } else { fine };
    let g = sinc_resample(wt, in_a, in_b);
    Ok(frft2_apply_to(&g, &spec, window, window)?.map(|z| z * cr(angles.prefactor())))
}

fn sinc_matrix<T: Real>(from: &SampledAxis<T>, to: &SampledAxis<T>) -> CMatrix<T> {
    let h = from.spacing();
    CMatrix::from_fn(to.len(), from.len(), |i, j| {
        let u = T::PI() * (to.point(i) - from.point(j)) / h;
        cr(if u.abs() < T::lit(1e-12) { T::one() } else { u.sin() / u })
    })
}

/// Band-limited interpolation of a uniformly sampled, decaying grid.
pub fn sinc_resample<T: Real>(g: &ComplexGrid2D<T>, a: SampledAxis<T>, b: SampledAxis<T>) -> ComplexGrid2D<T> {
    if g.alpha == a && g.beta == b {
        return g.clone();
    }
    let sa = sinc_matrix(&g.alpha, &a);
    let sb = sinc_matrix(&g.beta, &b);
    let m = CMatrix::from_fn(g.alpha.len(), g.beta.len(), |i, j| g.get(i, j));
    let r = sa.matmul(&m).matmul(&sb.transpose());
    ComplexGrid2D::from_fn(a, b, |_, _| cr(T::zero())).zip_map_index(|i, j| r[(i, j)])
}

/// `(1/π) ∫ d²s W̃₁(−s) W̃₂(s+e) exp[i(s_α e_β − s_β e_α)]` on the grid of
/// `w1`, with both functions taken as zero off the grid.
pub fn twisted_convolution<T: Real>(w1: &ComplexGrid2D<T>, w2: &ComplexGrid2D<T>) -> Result<ComplexGrid2D<T>> {
    let ax = w1.alpha;
    if w1.beta != ax || w2.alpha != ax || w2.beta != ax || ax.len() % 2 == 0 || !ax.is_symmetric() {
        return Err(Error::InvalidInput("twisted convolution needs one odd symmetric axis".into()));
    }
    let m = ax.len();
    let mid = (m / 2) as isize;
    let h = ax.spacing();
    let pts = ax.points();
    // e^{i x_p x_q} for all sample pairs.
    let phase = CMatrix::from_fn(m, m, |p, q| cis(pts[p] * pts[q]));
    let mut out = vec![cr(T::zero()); m * m];
    for ea in 0..m {
        for eb in 0..m {
            let (oa, ob) = (ea as isize - mid, eb as isize - mid);
            let mut acc = cr(T::zero());
            for sa in 0..m {
                let ta = sa as isize + oa;
                if ta < 0 || ta >= m as isize {
                    continue;
                }
                let pa = phase[(sa, eb)];
                let mut inner = cr(T::zero());
                for sb in 0..m {
                    let tb = sb as isize + ob;
                    if tb < 0 || tb >= m as isize {
                        continue;
                    }
                    let f = w1.get(m - 1 - sa, m - 1 - sb) * w2.get(ta as usize, tb as usize);
                    inner += f * phase[(sb, ea)].conj();
                }
                acc += inner * pa;
            }
            out[ea * m + eb] = acc * (h * h / T::PI());
        }
    }
    Ok(ComplexGrid2D::from_fn(ax, ax, |_, _| cr(T::zero())).zip_map_index(|i, j| out[i * m + j]))
}

/// Weyl grid shared by two operators: wide enough for both supports and
/// fine enough for the convolution integrand.
fn weyl_axis_for<T: Real>(a1: &OperatorAFunction<T>, a2: &OperatorAFunction<T>) -> Result<SampledAxis<T>> {
    let radius = match (&a1.source, &a2.source) {
        (Some(x), Some(y)) => weyl_radius(x).max(weyl_radius(y)),
        _ => Quadrature::<T>::default().radius(a1.support.max(a2.support), a1.support.max(a2.support)),
    };
    let band = weyl_band::<T>(a1.support) + weyl_band::<T>(a2.support) + radius;
    odd_axis(radius, T::lit(2.0) * T::PI() / (T::lit(1.1) * band))
}

/// `A(·|Θ₁Θ₂)` from `A(·|Θ₁)` and `A(·|Θ₂)`.
pub fn star_product<T: Real>(a1: &OperatorAFunction<T>, a2: &OperatorAFunction<T>) -> Result<OperatorAFunction<T>> {
    check_pair(a1, a2)?;
    let angles = a1.angles;
    let w = weyl_axis_for(a1, a2)?;
    let w1 = to_weyl(&a1.a, &angles, w)?;
    let w2 = to_weyl(&a2.a, &angles, w)?;
    let w12 = twisted_convolution(&w1, &w2)?;
    let window = a1.a.alpha;
    let a = from_weyl(&w12, &angles, window)?;
    // W̃(ξ|Θ†) = conj W̃(−ξ|Θ).
    let m = w.len();
    let w12_dag =
        ComplexGrid2D::from_fn(w, w, |_, _| cr(T::zero())).zip_map_index(|i, j| w12.get(m - 1 - i, m - 1 - j).conj());
    let a_dagger = from_weyl(&w12_dag, &angles, window)?.map(|z| z.conj());
    let source = match (&a1.source, &a2.source) {
        (Some(x), Some(y)) => Some(x.mul(y)),
        _ => None,
    };
    Ok(OperatorAFunction { angles, a, a_dagger, source, support: a1.support + a2.support })
}

/// Relative change of a star product at a few output points when the Weyl
/// grid spacing is halved.
pub fn star_convergence<T: Real>(a1: &OperatorAFunction<T>, a2: &OperatorAFunction<T>) -> Result<T> {
    check_pair(a1, a2)?;
    let angles = a1.angles;
    let w = weyl_axis_for(a1, a2)?;
    let fine = SampledAxis::symmetric(w.x_max(), 2 * w.len() - 1)?;
    let coarse = twisted_convolution(&to_weyl(&a1.a, &angles, w)?, &to_weyl(&a2.a, &angles, w)?)?;
    let refined = twisted_convolution(&to_weyl(&a1.a, &angles, fine)?, &to_weyl(&a2.a, &angles, fine)?)?;
    let peak = coarse.max_abs();
    let mut worst = T::zero();
    for i in 0..w.len() {
        for j in 0..w.len() {
            worst = worst.max((coarse.get(i, j) - refined.get(2 * i, 2 * j)).norm());
        }
    }
    let change = worst / peak;
    if change > T::lit(CONVERGENCE_TOL) {
        return Err(Error::ConvergenceFailure { change: change.f64(), tol: CONVERGENCE_TOL });
    }
    Ok(change)
}

/// One state tuple `(γ, δ, ε, ζ)` for the completeness lemma.
pub type StateTuple<T> = [FockState<T>; 4];

/// Largest `|(1/(π|cos|))∫⟨γ|U†|δ⟩⟨ε|U|ζ⟩ − ⟨γ|ζ⟩⟨ε|δ⟩|` over the tuples.
/// The states must live on the first `levels` Fock levels.
pub fn lemma_check<T: Real>(
    angles: &AnglePair<T>,
    tuples: &[StateTuple<T>],
    levels: usize,
    window: SampledAxis<T>,
) -> Result<T> {
    for t in tuples {
        for s in t {
            if s.amplitudes()[levels.min(s.amplitudes().len())..].iter().any(|z| z.norm() > T::zero()) {
                return Err(Error::InvalidInput(format!("lemma states must lie on the first {levels} levels")));
            }
        }
    }
    let grids = bifrac_grids(angles, levels, levels, window, &Quadrature::default())?;
    let element = |bra: &FockState<T>, ket: &FockState<T>| -> ComplexGrid2D<T> {
        let (x, y) = (bra.amplitudes(), ket.amplitudes());
        let mut g = grids[0].map(|_| cr(T::zero()));
        for m in 0..levels {
            for n in 0..levels {
                let coef = x[m].conj() * y[n];
                if coef.norm() > T::zero() {
                    g = g.zip_map(&grids[m * levels + n], |u, v| u + v * coef).expect("same axes");
                }
            }
        }
        g
    };
    let norm = T::PI() * angles.cos_diff().abs();
    let mut worst = T::zero();
    for [gamma, delta, eps, zeta] in tuples {
        // ⟨γ|U†|δ⟩ = conj⟨δ|U|γ⟩
        let left = element(delta, gamma);
        let right = element(eps, zeta);
        let lhs = left.zip_map(&right, |u, v| u.conj() * v)?.integrate() / norm;
        let rhs = gamma.inner(zeta) * eps.inner(delta);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{displacement, number_op, FockState};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
    const FRAC_PI_5: f64 = std::f64::consts::PI / 5.0;

    fn vacuum(n: usize) -> FockOperator<f64> {
        FockOperator::projector(&FockState::number(FockSpace::new(n).unwrap(), 0))
    }

    #[test]
    fn reconstructs_vacuum_projector() {
        let rho = vacuum(24);
        let angles = AnglePair::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let a = operator_a_function(&rho, &angles, SampledAxis::symmetric(9.0, 145).unwrap()).unwrap();
        let r = reconstruct_operator(&a, FockSpace::new(16).unwrap(), COST_BUDGET).unwrap();
        assert!(r.matrix().max_abs_diff(&rho.restrict(16).matrix().block(16, 16)) < 1e-8);
    }

    #[test]
    fn reconstructs_number_block_generic_angles() {
        let s = FockSpace::new(24).unwrap();
        let theta = number_op::<f64>(s).mul(&FockOperator::low_projector(s, 6));
        let angles = AnglePair::new(FRAC_PI_3, FRAC_PI_5).unwrap();
        let a = operator_a_function(&theta, &angles, SampledAxis::symmetric(12.0, 241).unwrap()).unwrap();
        let r = reconstruct_operator(&a, FockSpace::new(16).unwrap(), COST_BUDGET).unwrap();
        let expect = theta.matrix().block(16, 16);
        assert!(r.matrix().max_abs_diff(&expect) < 1e-8, "{}", r.matrix().max_abs_diff(&expect));
    }

    #[test]
    fn trace_of_orthogonal_projectors() {
        let s = FockSpace::new(24).unwrap();
        let angles = AnglePair::new(FRAC_PI_3, FRAC_PI_5).unwrap();
        let w = SampledAxis::symmetric(9.0, 145).unwrap();
        let p0 = operator_a_function(&vacuum(24), &angles, w).unwrap();
        let p1 = operator_a_function(&FockOperator::projector(&FockState::number(s, 1)), &angles, w).unwrap();
        assert!((trace_product(&p0, &p0).unwrap() - 1.0).norm() < 1e-6);
        assert!(trace_product(&p0, &p1).unwrap().norm() < 1e-6);
    }

    #[test]
    fn star_of_damped_displacements() {
        let s = FockSpace::new(32).unwrap();
        let damp = |x: f64, y: f64| {
            let d = displacement(s, x, y).unwrap();
            let e: Vec<C<f64>> = (0..32).map(|n| cr((-1.5 * n as f64).exp())).collect();
            d.mul(&FockOperator::new(s, CMatrix::from_diag(&e)).unwrap())
        };
        let (t1, t2) = (damp(0.5, 0.0), damp(0.0, 0.5));
        let angles = AnglePair::new(FRAC_PI_3, FRAC_PI_5).unwrap();
        let w = moyal_window();
        let a1 = operator_a_function(&t1, &angles, w).unwrap();
        let a2 = operator_a_function(&t2, &angles, w).unwrap();
        let prod = star_product(&a1, &a2).unwrap();
        let oracle = operator_a_function(&t1.mul(&t2), &angles, w).unwrap();
        let err = prod.a.max_abs_diff(&oracle.a);
        assert!(err < 1e-8, "{err}");
        assert!(prod.a_dagger.max_abs_diff(&oracle.a_dagger) < 1e-8);
    }
}
