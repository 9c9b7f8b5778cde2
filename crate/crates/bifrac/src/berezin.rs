//! Berezin symbols in the bifractional frame, Gaussian smoothing with the
//! interpolating distance, and the product expansion.
//!
//! Symbols are built from coherent states in the analytic gauge
//! `|u⟩ₐ = exp(i·Im(b̄u²))·|u⟩`, whose overlaps are the standard
//! `exp(−|u|²/2 − |v|²/2 + ū v)`. Only in this gauge is
//! `L(z, w̄)` analytic in `z` and `w̄`.

use std::collections::HashMap;

use crate::coherent::bifrac_coherent;
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockState};
use crate::frame::{b_factor, frame_distance, labels_from_w, AnglePair};
use crate::frft::{ComplexGrid2D, SampledAxis};
use crate::scalar::{c, ci, cis, cr, Real, C};

/// Relative size of the last smoothing-series term accepted as settled.
pub const SERIES_TOL: f64 = 1e-3;
/// Finite-difference step for derivatives of diagonal symbols.
pub const FD_STEP: f64 = 1e-2;
/// Radius and sample count of the Cauchy contour for analytic derivatives.
pub const CONTOUR_RADIUS: f64 = 0.5;
pub const CONTOUR_POINTS: usize = 32;
/// Largest change between the full and half contour rules, relative to
/// the Cauchy bound `n!·max|f|/rⁿ`.
pub const CONTOUR_TOL: f64 = 1e-6;
/// Largest relative Richardson change accepted for a derivative.
pub const RICHARDSON_TOL: f64 = 1e-3;

/// Coherent state with frame label `u` in the analytic gauge.
pub fn analytic_state<T: Real>(u: C<T>, angles: &AnglePair<T>, space: crate::fock::FockSpace) -> Result<FockState<T>> {
    let (a, b) = labels_from_w(u, angles);
    let s = bifrac_coherent(a, b, angles, space)?;
    let x = (b_factor(angles).conj() * u * u).im;
    Ok(s.state.scale(cis(x)))
}

fn prefactor<T: Real>(z: C<T>, v: C<T>) -> C<T> {
    let half = T::lit(0.5);
    (cr((z.norm_sqr() + v.norm_sqr()) * half) - z * v).exp()
}

/// `L(z, w̄|Θ) = exp[|z|²/2 + |w|²/2 − z w̄]·⟨z̄|Θ|w̄⟩`.
pub fn l_symbol<T: Real>(theta: &FockOperator<T>, z: C<T>, w: C<T>, angles: &AnglePair<T>) -> Result<C<T>> {
    let space = theta.space();
    let bra = analytic_state(z.conj(), angles, space)?;
    let ket = analytic_state(w.conj(), angles, space)?;
    Ok(prefactor(z, w.conj()) * bra.inner(&theta.apply(&ket)))
}

/// Diagonal symbol `L(z, z̄|Θ)` tabulated over `z = x + iy`.
#[derive(Debug, Clone)]
pub struct LSymbol<T> {
    pub angles: AnglePair<T>,
    pub grid: ComplexGrid2D<T>,
    pub source: FockOperator<T>,
}

impl<T: Real> LSymbol<T> {
    pub fn tabulate(
        theta: &FockOperator<T>,
        angles: &AnglePair<T>,
        x: SampledAxis<T>,
        y: SampledAxis<T>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(x.len() * y.len());
        for i in 0..x.len() {
            for j in 0..y.len() {
                let z = c(x.point(i), y.point(j));
                values.push(l_symbol(theta, z, z, angles)?);
            }
        }
        let grid = ComplexGrid2D::from_fn(x, y, |_, _| cr(T::zero())).zip_map_index(|i, j| values[i * y.len() + j]);
        Ok(Self { angles: *angles, grid, source: theta.clone() })
    }
}

// Eighth-order central stencils.
const D1: [f64; 9] = [1.0 / 280.0, -4.0 / 105.0, 0.2, -0.8, 0.0, 0.8, -0.2, 4.0 / 105.0, -1.0 / 280.0];
const D2: [f64; 9] = [-1.0 / 560.0, 8.0 / 315.0, -0.2, 1.6, -205.0 / 72.0, 1.6, -0.2, 8.0 / 315.0, -1.0 / 560.0];
const HALF: usize = 4;

/// Values on a rectangular grid with a shrinking valid margin.
struct Field<T> {
    na: usize,
    nb: usize,
    margin: usize,
    v: Vec<C<T>>,
}

impl<T: Real> Field<T> {
    fn at(&self, i: usize, j: usize) -> C<T> {
        self.v[i * self.nb + j]
    }

    /// `Δ = ∂²_α + ∂²_β − 2 sin(θ₁−θ₂) ∂_α∂_β`, scaled by `scale`.
    fn laplacian(&self, ha: T, hb: T, sin: T, scale: T) -> Self {
        let m = self.margin + HALF;
        let mut v = vec![cr(T::zero()); self.v.len()];
        let (ia2, ib2, iab) = (scale / (ha * ha), scale / (hb * hb), T::lit(-2.0) * sin * scale / (ha * hb));
        for i in m..self.na.saturating_sub(m) {
            for j in m..self.nb.saturating_sub(m) {
                let mut daa = cr(T::zero());
                let mut dbb = cr(T::zero());
                let mut dab = cr(T::zero());
                for k in 0..9 {
                    let (ii, jj) = (i + k - HALF, j + k - HALF);
                    daa += self.at(ii, j) * T::lit(D2[k]);
                    dbb += self.at(i, jj) * T::lit(D2[k]);
                    if D1[k] != 0.0 {
                        let mut inner = cr(T::zero());
                        for l in 0..9 {
                            if D1[l] != 0.0 {
                                inner += self.at(ii, j + l - HALF) * T::lit(D1[l]);
                            }
                        }
                        dab += inner * T::lit(D1[k]);
                    }
                }
                v[i * self.nb + j] = daa * ia2 + dbb * ib2 + dab * iab;
            }
        }
        Self { na: self.na, nb: self.nb, margin: m, v }
    }
}

/// Both sides of the smoothing lemma on the interior of the input grid.
#[derive(Debug, Clone)]
pub struct SmoothingReport<T> {
    /// `(1/(2π cos(θ₁−θ₂))) ∫ F·K·exp(−K d²/cos²(θ₁−θ₂))` by direct quadrature.
    pub lhs: ComplexGrid2D<T>,
    /// `(1/2) Σ_{k≤order} (Δ/4K)^k F / k!`.
    pub rhs: ComplexGrid2D<T>,
    pub max_error: T,
    /// Least-squares constant `c` with `lhs ≈ c·rhs`.
    pub fitted_constant: C<T>,
    /// Largest value of the last series term relative to `max |F|`.
    pub last_term: T,
}

pub fn smoothing_check<T: Real>(
    f: &ComplexGrid2D<T>,
    k: T,
    angles: &AnglePair<T>,
    order: usize,
) -> Result<SmoothingReport<T>> {
    if !(k > T::zero()) {
        return Err(Error::InvalidInput("smoothing constant K must be positive".into()));
    }
    let (ax, bx) = (f.alpha, f.beta);
    let (na, nb) = (ax.len(), bx.len());
    let (ha, hb) = (ax.spacing(), bx.spacing());
    let (cd, sd) = (angles.cos_diff(), angles.sin_diff());

    // Kernel truncation: the Gaussian must fall below e^{-30} before the edge.
    let reach = (T::lit(30.0) * cd * cd / (k * (T::one() - sd.abs()))).sqrt();
    let kern_a = (reach / ha).ceil().to_usize().unwrap_or(usize::MAX);
    let kern_b = (reach / hb).ceil().to_usize().unwrap_or(usize::MAX);
    let fd = HALF * order;
    let (ma, mb) = (kern_a.max(fd), kern_b.max(fd));
    if na < 2 * ma + 8 || nb < 2 * mb + 8 {
        return Err(Error::InvalidInput(format!(
            "grid too small for K={:.3} and order {order}: needs margins of {ma}×{mb} points",
            k.f64()
        )));
    }

    // Right-hand side: truncated heat series.
    let mut term = Field { na, nb, margin: 0, v: (0..na * nb).map(|n| f.get(n / nb, n % nb)).collect() };
    let mut rhs = term.v.clone();
    let quarter = T::one() / (T::lit(4.0) * k);
    for n in 1..=order {
        term = term.laplacian(ha, hb, sd, quarter / T::of(n));
        for (r, t) in rhs.iter_mut().zip(&term.v) {
            *r += *t;
        }
    }
    let peak = f.max_abs().max(T::min_positive_value());

    // Left-hand side on the interior: kernel depends only on index offsets.
    let inv_c2 = T::one() / (cd * cd);
    let (wa, wb) = (2 * na - 1, 2 * nb - 1);
    let mut kernel = vec![T::zero(); wa * wb];
    for di in 0..wa {
        for dj in 0..wb {
            let x = T::of(di) * ha - T::of(na - 1) * ha;
            let y = T::of(dj) * hb - T::of(nb - 1) * hb;
            let d = frame_distance(x, y, angles);
            kernel[di * wb + dj] = k * (-k * d * d * inv_c2).exp();
        }
    }
    let norm = T::one() / (T::lit(2.0) * T::PI() * cd);
    let weights: Vec<C<T>> =
        (0..na * nb).map(|n| f.get(n / nb, n % nb) * (ax.weight(n / nb) * bx.weight(n % nb))).collect();

    let (ia, ib) = (ma..na - ma, mb..nb - mb);
    let sub_a = SampledAxis::new(ax.point(ma), ax.point(na - 1 - ma), na - 2 * ma)?;
    let sub_b = SampledAxis::new(bx.point(mb), bx.point(nb - 1 - mb), nb - 2 * mb)?;
    let mut lhs_v = Vec::with_capacity(sub_a.len() * sub_b.len());
    let mut rhs_v = Vec::with_capacity(sub_a.len() * sub_b.len());
    let mut last_term = T::zero();
    for i in ia.clone() {
        for j in ib.clone() {
            let mut acc = cr(T::zero());
            for p in 0..na {
                let row = &kernel[(i + na - 1 - p) * wb..];
                for q in 0..nb {
                    acc += weights[p * nb + q] * row[j + nb - 1 - q];
                }
            }
            lhs_v.push(acc * norm);
            rhs_v.push(rhs[i * nb + j] * T::lit(0.5));
            if order > 0 {
                last_term = last_term.max(term.at(i, j).norm() / peak);
            }
        }
    }
    if last_term > T::lit(SERIES_TOL) {
        return Err(Error::ConvergenceFailure { change: last_term.f64(), tol: SERIES_TOL });
    }
    let nsb = sub_b.len();
    let lhs = ComplexGrid2D::from_fn(sub_a, sub_b, |_, _| cr(T::zero())).zip_map_index(|i, j| lhs_v[i * nsb + j]);
    let rhs = ComplexGrid2D::from_fn(sub_a, sub_b, |_, _| cr(T::zero())).zip_map_index(|i, j| rhs_v[i * nsb + j]);
    let max_error = lhs.max_abs_diff(&rhs);
    let num: C<T> = lhs_v.iter().zip(&rhs_v).map(|(l, r)| l * r.conj()).sum();
    let den: T = rhs_v.iter().map(|r| r.norm_sqr()).sum();
    let fitted_constant = if den > T::zero() { num / den } else { cr(T::zero()) };
    Ok(SmoothingReport { lhs, rhs, max_error, fitted_constant, last_term })
}

/// `f⁽ⁿ⁾(0)` from samples `f(r·e^{2πik/M})` by the trapezoid Cauchy
/// integral, checked against the rule on every other sample.
fn contour_derivative<T: Real>(samples: &[C<T>], n: usize, r: T, factorial: T) -> Result<C<T>> {
    let m = samples.len();
    let rule = |step: usize| -> C<T> {
        let count = m / step;
        let mut acc = cr(T::zero());
        for k in (0..m).step_by(step) {
            let phi = T::lit(2.0) * T::PI() * T::of(k) / T::of(m);
            acc += samples[k] * cis(-phi * T::of(n));
        }
        acc * factorial / (T::of(count) * r.powi(n as i32))
    };
    let full = rule(1);
    let half = rule(2);
    let bound = samples.iter().map(|z| z.norm()).fold(T::zero(), T::max) * factorial / r.powi(n as i32);
    let change = (full - half).norm() / bound.max(T::min_positive_value());
    if change > T::lit(CONTOUR_TOL) {
        return Err(Error::StencilTooCoarse { change: change.f64(), tol: CONTOUR_TOL });
    }
    Ok(full)
}

/// Richardson-extrapolated estimate from a second-order rule `d(h)`.
fn richardson<T: Real>(h: T, mut d: impl FnMut(T) -> Result<C<T>>, scale: T) -> Result<C<T>> {
    let coarse = d(h)?;
    let fine = d(h * T::lit(0.5))?;
    let r = (fine * T::lit(4.0) - coarse) / T::lit(3.0);
    let change = (r - fine).norm() / r.norm().max(scale).max(T::min_positive_value());
    if change > T::lit(RICHARDSON_TOL) {
        return Err(Error::StencilTooCoarse { change: change.f64(), tol: RICHARDSON_TOL });
    }
    Ok(r)
}

/// Evaluates analytic-gauge states along `z̄ + t`, memoised by `t`.
struct StateLine<'a, T: Real> {
    base: C<T>,
    angles: &'a AnglePair<T>,
    space: crate::fock::FockSpace,
    cache: HashMap<(i64, i64), FockState<T>>,
}

impl<'a, T: Real> StateLine<'a, T> {
    fn get(&mut self, d: C<T>) -> Result<FockState<T>> {
        let key = ((d.re.f64() * 1e12).round() as i64, (d.im.f64() * 1e12).round() as i64);
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let s = analytic_state(self.base + d, self.angles, self.space)?;
        self.cache.insert(key, s.clone());
        Ok(s)
    }
}

/// Terms of the product expansion at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerezinExpansion<T> {
    /// `L(z, z̄|Θ₁Θ₂)` from the Fock matrices.
    pub full: C<T>,
    /// `(1/n!) ∂ⁿ_ζ̄ L(z,ζ̄|Θ₁) ∂ⁿ_ζ L(ζ,z̄|Θ₂)` at `ζ = z`, `n = 0..=order`.
    pub heat_terms: Vec<C<T>>,
    /// Product, `(1/2)∂_z̄L₁ ∂_zL₂`, `+(i/4)sin(θ₁−θ₂)∂²_z̄(L₁L₂)`,
    /// `−(i/4)sin(θ₁−θ₂)∂²_z(L₁L₂)`, all from diagonal symbols.
    pub taylor_terms: [C<T>; 4],
    /// Single constant `c` with `full = c·Σ taylor_terms`.
    pub taylor_fit: C<T>,
}

impl<T: Real> BerezinExpansion<T> {
    pub fn heat_partial_sums(&self) -> Vec<C<T>> {
        self.heat_terms
            .iter()
            .scan(cr(T::zero()), |acc, t| {
                *acc += *t;
                Some(*acc)
            })
            .collect()
    }

    pub fn taylor_sum(&self) -> C<T> {
        self.taylor_terms.iter().copied().sum()
    }
}

pub fn berezin_product<T: Real>(
    theta1: &FockOperator<T>,
    theta2: &FockOperator<T>,
    z: C<T>,
    angles: &AnglePair<T>,
    order: usize,
) -> Result<BerezinExpansion<T>> {
    let space = theta1.space();
    if theta2.space() != space {
        return Err(Error::InvalidInput("operators live on different Fock spaces".into()));
    }
    let zb = z.conj();
    let mut line = StateLine { base: zb, angles, space, cache: HashMap::new() };
    let centre = line.get(cr(T::zero()))?;
    let bra1 = theta1.dagger().apply(&centre);
    let ket2 = theta2.apply(&centre);
    let full = centre.inner(&theta1.mul(theta2).apply(&centre));

    // L₁(z, z̄+t) and L₂(z+t, z̄): both need the state with label z̄ + t.
    let l1 =
        |line: &mut StateLine<T>, t: C<T>| -> Result<C<T>> { Ok(prefactor(z, zb + t) * bra1.inner(&line.get(t)?)) };
    let l2 = |line: &mut StateLine<T>, t: C<T>| -> Result<C<T>> {
        Ok(prefactor(z + t.conj(), zb) * line.get(t)?.inner(&ket2))
    };

    // L₁ is analytic in ζ̄ = z̄ + t and L₂ in ζ = z + t̄; both sample the circle |t| = r.
    let r = T::lit(CONTOUR_RADIUS);
    let m = CONTOUR_POINTS;
    let mut f1 = Vec::with_capacity(m);
    let mut f2 = Vec::with_capacity(m);
    for k in 0..m {
        let phi = T::lit(2.0) * T::PI() * T::of(k) / T::of(m);
        f1.push(l1(&mut line, cis(phi) * r)?);
        f2.push(l2(&mut line, cis(-phi) * r)?);
    }
    let mut heat_terms = vec![l1(&mut line, cr(T::zero()))? * l2(&mut line, cr(T::zero()))?];
    let mut factorial = T::one();
    for n in 1..=order {
        factorial = factorial * T::of(n);
        let d1 = contour_derivative(&f1, n, r, factorial)?;
        let d2 = contour_derivative(&f2, n, r, factorial)?;
        heat_terms.push(d1 * d2 / factorial);
    }

    // Taylor terms from the diagonal symbols D_i(z+δ) = L_i(z+δ, z̄+δ̄).
    let diag = |line: &mut StateLine<T>, d: C<T>| -> Result<(C<T>, C<T>)> {
        let s = line.get(d.conj())?;
        let (y1, y2) = (theta1.apply(&s), theta2.apply(&s));
        Ok((s.inner(&y1), s.inner(&y2)))
    };
    let h = T::lit(FD_STEP);
    let (d1z, d2z) = diag(&mut line, cr(T::zero()))?;
    let scale = d1z.norm().max(d2z.norm());
    let two = T::lit(2.0);
    // ∂_x, ∂_y of D₁ and D₂.
    let grad = |line: &mut StateLine<T>, which: usize, dir: C<T>| -> Result<C<T>> {
        richardson(
            h,
            |s| {
                let (p1, p2) = diag(line, dir * s)?;
                let (m1, m2) = diag(line, -dir * s)?;
                Ok(if which == 1 { (p1 - m1) / (two * s) } else { (p2 - m2) / (two * s) })
            },
            scale,
        )
    };
    let one = cr(T::one());
    let d1x = grad(&mut line, 1, one)?;
    let d1y = grad(&mut line, 1, ci())?;
    let d2x = grad(&mut line, 2, one)?;
    let d2y = grad(&mut line, 2, ci())?;
    let half = T::lit(0.5);
    let dbar1 = (d1x + ci::<T>() * d1y) * half;
    let dz2 = (d2x - ci::<T>() * d2y) * half;

    let prod = |line: &mut StateLine<T>, d: C<T>| -> Result<C<T>> {
        let (a, b) = diag(line, d)?;
        Ok(a * b)
    };
    let p0 = d1z * d2z;
    let pscale = p0.norm().max(scale * scale);
    let second = |line: &mut StateLine<T>, kind: usize| -> Result<C<T>> {
        richardson(
            h,
            |s| {
                Ok(match kind {
                    0 => (prod(line, c(s, T::zero()))? + prod(line, c(-s, T::zero()))? - p0 * two) / (s * s),
                    1 => (prod(line, c(T::zero(), s))? + prod(line, c(T::zero(), -s))? - p0 * two) / (s * s),
                    _ => {
                        (prod(line, c(s, s))? - prod(line, c(s, -s))? - prod(line, c(-s, s))? + prod(line, c(-s, -s))?)
                            / (T::lit(4.0) * s * s)
                    }
                })
            },
            pscale,
        )
    };
    let pxx = second(&mut line, 0)?;
    let pyy = second(&mut line, 1)?;
    let pxy = second(&mut line, 2)?;
    let quarter = T::lit(0.25);
    let dbar2 = (pxx - pyy + ci::<T>() * pxy * two) * quarter;
    let dz2p = (pxx - pyy - ci::<T>() * pxy * two) * quarter;
    let isin = ci::<T>() * angles.sin_diff() * quarter;
    let taylor_terms = [p0, dbar1 * dz2 * half, isin * dbar2, -isin * dz2p];
    let total: C<T> = taylor_terms.iter().copied().sum();
    let taylor_fit = if total.norm() > T::zero() { full / total } else { cr(T::zero()) };
    Ok(BerezinExpansion { full, heat_terms, taylor_terms, taylor_fit })
}

/// `∫ d²w D_E(z,w) L(z,w̄|Θ₁) L(w,z̄|Θ₂)` with `D_E = |⟨z|w⟩|²` and measure
/// `d²w/π` over the disc of radius `radius` around `z`, sampled on a square
/// grid of `points` per side.
pub fn berezin_kernel_route<T: Real>(
    theta1: &FockOperator<T>,
    theta2: &FockOperator<T>,
    z: C<T>,
    angles: &AnglePair<T>,
    radius: T,
    points: usize,
) -> Result<C<T>> {
    let space = theta1.space();
    let axis = SampledAxis::symmetric(radius, points)?;
    let zb = z.conj();
    let centre = analytic_state(zb, angles, space)?;
    let bra1 = theta1.dagger().apply(&centre);
    let ket2 = theta2.apply(&centre);
    let mut acc = cr(T::zero());
    for i in 0..axis.len() {
        for j in 0..axis.len() {
            let d = c(axis.point(i), axis.point(j));
            if d.norm() > radius {
                continue;
            }
            let w = z + d;
            let s = analytic_state(w.conj(), angles, space)?;
            let de = centre.inner(&s).norm_sqr();
            let l1 = prefactor(z, w.conj()) * bra1.inner(&s);
            let l2 = prefactor(w, zb) * s.inner(&ket2);
            acc += l1 * l2 * (de * axis.weight(i) * axis.weight(j));
        }
    }
    Ok(acc / T::PI())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_op, FockSpace};
    use std::f64::consts::FRAC_PI_2;

    fn loose(n: usize) -> FockSpace {
        FockSpace::with_tol(n, 1e-6).unwrap()
    }

    #[test]
    fn identity_symbol_is_one() {
        let angles = AnglePair::new(0.9, 0.3).unwrap();
        let id = FockOperator::<f64>::identity(loose(64));
        let l = l_symbol(&id, c(0.4, -0.2), c(-0.1, 0.5), &angles).unwrap();
        assert!((l - 1.0).norm() < 1e-9, "{l}");
    }

    #[test]
    fn number_symbol_standard_frame() {
        let angles = AnglePair::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let n = number_op::<f64>(loose(32));
        let z = c(0.7, 0.3);
        let l = l_symbol(&n, z, z, &angles).unwrap();
        assert!((l - z.norm_sqr()).norm() < 1e-9);
    }

    #[test]
    fn symbol_is_analytic_in_second_label() {
        let angles = AnglePair::new(1.1, 0.5).unwrap();
        let n = number_op::<f64>(loose(64));
        let z = c(0.3, 0.1);
        let w = c(-0.2, 0.4);
        let h = 1e-4;
        let f = |d: C<f64>| l_symbol(&n, z, w + d, &angles).unwrap();
        // ∂/∂w̄ of L(z, w̄) as a function of w: must be zero for analytic dependence on w̄.
        let dw = ((f(c(h, 0.0)) - f(c(-h, 0.0))) - ci::<f64>() * (f(c(0.0, h)) - f(c(0.0, -h)))) / (4.0 * h);
        assert!(dw.norm() < 1e-6, "{dw}");
    }

    #[test]
    fn smoothing_constant_and_quadratic() {
        let angles = AnglePair::new(0.6, 0.6).unwrap();
        let axis = SampledAxis::symmetric(12.0, 121).unwrap();
        let one = ComplexGrid2D::square(axis, |_, _| cr(1.0));
        let r = smoothing_check(&one, 1.0, &angles, 2).unwrap();
        assert!(r.max_error < 1e-6);
        let sq = ComplexGrid2D::square(axis, |a, _| cr(a * a));
        let r = smoothing_check(&sq, 1.0, &angles, 2).unwrap();
        assert!(r.max_error < 1e-4, "{}", r.max_error);
    }

    #[test]
    fn smoothing_gaussian_generic_angles() {
        let angles = AnglePair::new(0.9, 0.3).unwrap();
        let axis = SampledAxis::symmetric(12.0, 121).unwrap();
        let g = ComplexGrid2D::square(axis, |a: f64, b: f64| cr((-(a * a + b * b) / 2.0).exp()));
        let r = smoothing_check(&g, 2.0, &angles, 8).unwrap();
        assert!(r.max_error < 1e-4, "{}", r.max_error);
        assert!((r.fitted_constant - 1.0).norm() < 1e-4);
    }

    #[test]
    fn vacuum_product_heat_series() {
        let angles = AnglePair::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let v = FockOperator::projector(&FockState::number(loose(32), 0));
        let e = berezin_product(&v, &v, c(0.3, 0.0), &angles, 3).unwrap();
        assert!((e.full - (-0.09f64).exp()).norm() < 1e-9);
        let sums = e.heat_partial_sums();
        assert!((sums[2] - e.full).norm() < 5e-3);
        assert!((sums[3] - e.full).norm() < 1e-4);
        assert_eq!(e.taylor_terms[2], cr(0.0));
        assert_eq!(e.taylor_terms[3], cr(0.0));
    }

    #[test]
    fn identity_factor_collapses_series() {
        let s = loose(48);
        let angles = AnglePair::new(1.2, 0.9).unwrap();
        let t = crate::fock::displacement::<f64>(s, 0.2, -0.1).unwrap().mul(&FockOperator::low_projector(s, 4));
        let e = berezin_product(&t, &FockOperator::identity(s), c(0.2, 0.1), &angles, 3).unwrap();
        assert!((e.heat_terms[0] - e.full).norm() < 1e-8);
        assert!(e.heat_terms[1..].iter().all(|x| x.norm() < 1e-8));
    }

    #[test]
    fn heat_series_generic_angles() {
        let s = loose(64);
        let damp = FockOperator::new(
            s,
            crate::linalg::CMatrix::from_diag(&(0..64).map(|n| cr((-(n as f64)).exp())).collect::<Vec<_>>()),
        )
        .unwrap();
        let t1 = crate::fock::displacement::<f64>(s, 0.3, 0.1).unwrap().mul(&damp);
        let t2 = crate::fock::displacement::<f64>(s, -0.2, 0.25).unwrap().mul(&damp);
        let angles = AnglePair::new(1.2, 0.9).unwrap();
        let e = berezin_product(&t1, &t2, c(0.3, -0.2), &angles, 8).unwrap();
        let err: Vec<f64> = e.heat_partial_sums().iter().map(|x| (x - e.full).norm()).collect();
        assert!(err[8] < 1e-4, "{err:?}");
        assert!(err.windows(2).all(|w| w[1] < w[0]));
    }
}
