//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use bifrac::fock::hermite_functions;
use bifrac::linalg::CMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

/// Fractional kernel written out independently of the library.
pub fn kernel(x: f64, y: f64, theta: f64) -> Complex64 {
    let cot = theta.cos() / theta.sin();
    let pref = (Complex64::new(1.0, cot) / (2.0 * PI)).sqrt();
    pref * Complex64::from_polar(1.0, -(x * x + y * y) * cot / 2.0 + x * y / theta.sin())
}

/// `⟨m|U(α,β;θ₁,θ₂)|n⟩` from the position-space kernel of `U`,
/// `|cos(θ₁−θ₂)|^{1/2} √π Δ(β,(x−y)/√2;θ₂) Δ(α,−(x+y)/√2;θ₁+π/2)`,
/// sandwiched between Hermite functions on a fine grid.
/// Valid away from `θ₂ ∈ {0, π}` and `θ₁ = π/2`.
pub fn position_kernel_block(
    alpha: f64,
    beta: f64,
    t1: f64,
    t2: f64,
    rows: usize,
    cols: usize,
    half: f64,
    m: usize,
) -> CMatrix<f64> {
    let h = 2.0 * half / (m - 1) as f64;
    let xs: Vec<f64> = (0..m).map(|i| -half + h * i as f64).collect();
    let n = rows.max(cols);
    let herm: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(x, n)).collect();
    let pref = (t1 - t2).cos().abs().sqrt() * PI.sqrt();
    let r2 = 2f64.sqrt();
    // K·H for the columns
    let mut kh = vec![vec![Complex64::new(0.0, 0.0); cols]; m];
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            let k = kernel(beta, (x - y) / r2, t2) * kernel(alpha, -(x + y) / r2, t1 + PI / 2.0) * pref;
            for c in 0..cols {
                kh[i][c] += k * herm[j][c];
            }
        }
    }
    CMatrix::from_fn(rows, cols, |r, c| (0..m).map(|i| kh[i][c] * herm[i][r]).sum::<Complex64>() * (h * h))
}

/// Normalised Hermite function `ψₙ(x)` by the three-term recurrence.
pub fn hermite_fn(n: usize, x: f64) -> f64 {
    let mut p0 = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n == 0 {
        return p0;
    }
    let mut p1 = 2f64.sqrt() * x * p0;
    for k in 1..n {
        let p2 = (2.0 / (k + 1) as f64).sqrt() * x * p1 - (k as f64 / (k + 1) as f64).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Right-hand side of the single-axis `|A|²` marginal identity,
/// `√2·π·|cos(θ₁−θ₂)| ∫dx |∫dt ⟨x−t/√2|ρ|x+t/√2⟩ Δ(y, s·t; θ)|²`,
/// with `ρ` synthesised from Hermite functions.
///
/// `momentum` switches to momentum wavefunctions `⟨p|n⟩ = iⁿψₙ(p)`. The
/// node spacing is `h` for `t` and `h/√2` for `x`, so both arguments of the
/// matrix element fall on one shared grid.
pub fn squared_marginal(
    rho: &CMatrix<f64>,
    y: f64,
    theta: f64,
    sign: f64,
    momentum: bool,
    cos_diff: f64,
    h: f64,
) -> f64 {
    let n = rho.rows();
    let r2 = 2f64.sqrt();
    let reach = 10.0;
    let k_max = (reach * r2 / h).ceil() as i64;
    let phase = |k: usize| match (momentum, k % 4) {
        (false, _) | (true, 0) => Complex64::new(1.0, 0.0),
        (true, 1) => Complex64::new(0.0, 1.0),
        (true, 2) => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let basis: Vec<Vec<Complex64>> = (-k_max..=k_max)
        .map(|k| {
            let u = k as f64 * h / r2;
            hermite_functions(u, n).iter().enumerate().map(|(m, &v)| phase(m) * v).collect()
        })
        .collect();
    let applied: Vec<Vec<Complex64>> =
        basis.iter().map(|v| (0..n).map(|m| (0..n).map(|k| rho[(m, k)] * v[k]).sum()).collect()).collect();
    let idx = |k: i64| (k + k_max) as usize;
    let mut total = 0.0;
    for i in -k_max / 2..=k_max / 2 {
        let mut inner = Complex64::new(0.0, 0.0);
        let j_max = k_max - i.abs();
        for j in -j_max..=j_max {
            let bra = &basis[idx(i - j)];
            let ket = &applied[idx(i + j)];
            let e: Complex64 = bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum();
            inner += e * kernel(y, sign * j as f64 * h, theta) * h;
        }
        total += inner.norm_sqr() * h / r2;
    }
    r2 * PI * cos_diff.abs() * total
}

/// `⟨m|exp(z a† − z̄ a)|n⟩` from the associated Laguerre closed form,
/// `√(n!/m!) z^{m−n} e^{−|z|²/2} L_n^{(m−n)}(|z|²)` for `m ≥ n`.
pub fn displacement_element(m: usize, n: usize, z: Complex64) -> Complex64 {
    let (hi, lo, w) = if m >= n { (m, n, z) } else { (n, m, -z.conj()) };
    let k = (hi - lo) as f64;
    let x = z.norm_sqr();
    let (mut l0, mut l1) = (1.0, 1.0 + k - x);
    let lag = if lo == 0 {
        1.0
    } else {
        for j in 1..lo {
            let j = j as f64;
            let l2 = ((2.0 * j + 1.0 + k - x) * l1 - (j + k) * l0) / (j + 1.0);
            l0 = l1;
            l1 = l2;
        }
        l1
    };
    let ratio: f64 = (lo + 1..=hi).map(|j| 1.0 / (j as f64).sqrt()).product();
    w.powu((hi - lo) as u32) * ratio * lag * (-x / 2.0).exp()
}
