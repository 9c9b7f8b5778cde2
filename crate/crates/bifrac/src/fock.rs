//! Truncated Fock-space linear algebra: ladder operators, displacement and
//! parity operators, coherent states and the base Weyl/Wigner functions.
//!
//! Ladder convention: `a = (x̂ + i p̂)/√2`, so `D(α, β) = exp(z a† − z* a)`
//! with `z = α + iβ`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, cr, Real, C};

/// Default tail-population tolerance.
pub const CUTOFF_TOL: f64 = 1e-8;

/// Truncation of the oscillator Hilbert space to its lowest `dim` levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpace {
    dim: usize,
    cutoff_tol: f64,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_tol(dim, CUTOFF_TOL)
    }

    pub fn with_tol(dim: usize, cutoff_tol: f64) -> Result<Self> {
        if dim < 8 {
            return Err(Error::InvalidInput(format!("Fock dimension must be at least 8, got {dim}")));
        }
        Ok(Self { dim, cutoff_tol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff_tol(&self) -> f64 {
        self.cutoff_tol
    }

    /// First level of the top-10% band used by the tail test.
    pub fn tail_start(&self) -> usize {
        self.dim - (self.dim / 10).max(1)
    }
}

/// Dense operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T> {
    space: FockSpace,
    matrix: CMatrix<T>,
}

impl<T: Real> FockOperator<T> {
    pub fn new(space: FockSpace, matrix: CMatrix<T>) -> Result<Self> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, Fock space has dimension {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: FockSpace) -> Self {
        Self { space, matrix: CMatrix::identity(space.dim()) }
    }

    pub fn zeros(space: FockSpace) -> Self {
        Self { space, matrix: CMatrix::zeros(space.dim(), space.dim()) }
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &FockState<T>, bra: &FockState<T>) -> Self {
        Self { space: ket.space, matrix: CMatrix::outer(&ket.amps, &bra.amps) }
    }

    pub fn projector(s: &FockState<T>) -> Self {
        Self::outer(s, s)
    }

    /// Projector onto the lowest `k` levels.
    pub fn low_projector(space: FockSpace, k: usize) -> Self {
        let d: Vec<C<T>> = (0..space.dim()).map(|n| cr(if n < k { T::one() } else { T::zero() })).collect();
        Self { space, matrix: CMatrix::from_diag(&d) }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn get(&self, m: usize, n: usize) -> C<T> {
        self.matrix[(m, n)]
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self { space: self.space, matrix: self.matrix.matmul(&rhs.matrix) }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { space: self.space, matrix: &self.matrix + &rhs.matrix }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { space: self.space, matrix: &self.matrix - &rhs.matrix }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { space: self.space, matrix: self.matrix.scale(s) }
    }

    pub fn trace(&self) -> C<T> {
        self.matrix.trace()
    }

    pub fn apply(&self, s: &FockState<T>) -> FockState<T> {
        FockState { space: self.space, amps: self.matrix.matvec(&s.amps) }
    }

    /// Restriction `P_k Θ P_k` to the lowest `k` levels.
    pub fn restrict(&self, k: usize) -> Self {
        let n = self.space.dim();
        Self {
            space: self.space,
            matrix: CMatrix::from_fn(n, n, |i, j| if i < k && j < k { self.matrix[(i, j)] } else { cr(T::zero()) }),
        }
    }

    /// Largest entry deviation on the top-left `k × k` block.
    pub fn block_diff(&self, other: &Self, k: usize) -> T {
        self.matrix.block(k, k).max_abs_diff(&other.matrix.block(k, k))
    }

    /// `Tr ρ²` for Hermitian `ρ`.
    /// Smallest `k` such that all entries outside the leading `k × k`
    /// block are below `1e-15` of the largest entry.
    pub fn support(&self) -> usize {
        let n = self.space.dim();
        let floor = self.matrix.max_abs() * T::lit(1e-15);
        let mut k = 0;
        for i in 0..n {
            for j in 0..n {
                if self.matrix[(i, j)].norm() > floor {
                    k = k.max(i.max(j) + 1);
                }
            }
        }
        k
    }

    pub fn purity(&self) -> T {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Population of the top-10% levels (diagonal weight).
    pub fn tail_population(&self) -> T {
        (self.space.tail_start()..self.space.dim()).map(|n| self.matrix[(n, n)].norm()).sum()
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate_density(&self) -> Result<()> {
        let h = self.matrix.hermiticity_defect();
        if h > T::lit(1e-12) {
            return Err(Error::InvalidInput(format!("density matrix not Hermitian (defect {h})")));
        }
        let tr = self.trace();
        if (tr - cr(T::one())).norm() > T::lit(1e-10) {
            return Err(Error::InvalidInput(format!("density matrix trace is {tr}")));
        }
        let ev = self.matrix.hermitian_eigenvalues();
        if let Some(&lo) = ev.first() {
            if lo < T::lit(-1e-10) {
                return Err(Error::InvalidInput(format!("density matrix eigenvalue {lo} is negative")));
            }
        }
        Ok(())
    }

    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail_population();
        if tail.f64() > self.space.cutoff_tol() {
            return Err(Error::CutoffExceeded { tail: tail.f64(), tol: self.space.cutoff_tol() });
        }
        Ok(())
    }
}

/// Vector in a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState<T> {
    space: FockSpace,
    amps: Vec<C<T>>,
}

impl<T: Real> FockState<T> {
    /// Wraps amplitudes without normalisation or tail checks.
    pub fn from_amplitudes(space: FockSpace, amps: Vec<C<T>>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::InvalidInput(format!("{} amplitudes for a {}-level space", amps.len(), space.dim())));
        }
        Ok(Self { space, amps })
    }

    /// Normalised state passing the tail test.
    pub fn checked(space: FockSpace, amps: Vec<C<T>>) -> Result<Self> {
        let s = Self::from_amplitudes(space, amps)?;
        s.check_tail()?;
        let n = s.norm();
        if n == T::zero() {
            return Err(Error::InvalidInput("zero state".into()));
        }
        Ok(Self { space, amps: s.amps.iter().map(|&z| z / n).collect() })
    }

    pub fn number(space: FockSpace, n: usize) -> Self {
        let mut amps = vec![cr(T::zero()); space.dim()];
        amps[n] = cr(T::one());
        Self { space, amps }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { space: self.space, amps: self.amps.iter().map(|&z| z * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { space: self.space, amps: self.amps.iter().zip(&other.amps).map(|(&a, &b)| a - b).collect() }
    }

    pub fn tail_population(&self) -> T {
        self.amps[self.space.tail_start()..].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail_population();
        if tail.f64() > self.space.cutoff_tol() {
            return Err(Error::CutoffExceeded { tail: tail.f64(), tol: self.space.cutoff_tol() });
        }
        Ok(())
    }
}

/// Annihilation, creation, position and momentum operators.
#[derive(Debug, Clone)]
pub struct Ladder<T> {
    pub a: FockOperator<T>,
    pub a_dagger: FockOperator<T>,
    pub x: FockOperator<T>,
    pub p: FockOperator<T>,
}

pub fn ladder_ops<T: Real>(space: FockSpace) -> Ladder<T> {
    let n = space.dim();
    let a = CMatrix::from_fn(n, n, |i, j| if j == i + 1 { cr(T::of(j).sqrt()) } else { cr(T::zero()) });
    let ad = a.adjoint();
    let r2 = T::lit(2.0).sqrt();
    let x = (&a + &ad).scale(cr(T::one() / r2));
    let p = (&a - &ad).scale(c(T::zero(), -T::one() / r2));
    Ladder {
        a: FockOperator { space, matrix: a },
        a_dagger: FockOperator { space, matrix: ad },
        x: FockOperator { space, matrix: x },
        p: FockOperator { space, matrix: p },
    }
}

pub fn number_op<T: Real>(space: FockSpace) -> FockOperator<T> {
    let d: Vec<C<T>> = (0..space.dim()).map(|n| cr(T::of(n))).collect();
    FockOperator { space, matrix: CMatrix::from_diag(&d) }
}

/// `D(α, β)` by matrix exponential of the truncated generator.
pub fn displacement<T: Real>(space: FockSpace, alpha: T, beta: T) -> Result<FockOperator<T>> {
    let l = ladder_ops::<T>(space);
    let z = c(alpha, beta);
    let gen = &l.a_dagger.matrix.scale(z) - &l.a.matrix.scale(z.conj());
    let d = gen.expm();
    let vac = FockState { space, amps: d.column(0) };
    vac.check_tail()?;
    Ok(FockOperator { space, matrix: d })
}

/// Exact matrix elements `⟨m|D(z)|n⟩` of the untruncated displacement
/// operator for `m < rows`, `n < cols`.
///
/// For `m = n + d` the element is `e^{iφd}·h_n` with `φ = arg z` and
/// `h_n = √(n!/(n+d)!)·|z|^d e^{−|z|²/2} L_n^{(d)}(|z|²)`, generated by the
/// normalised Laguerre recurrence in `n`; the upper triangle uses `(−z̄)` in
/// place of `z`. A running log scale keeps large `|z|` in range.
pub fn displacement_elements<T: Real>(z: C<T>, rows: usize, cols: usize) -> CMatrix<T> {
    let mut d = CMatrix::zeros(rows, cols);
    displacement_elements_into(z, &mut d);
    d
}

/// In-place variant of [`displacement_elements`] sized by `d`.
pub fn displacement_elements_into<T: Real>(z: C<T>, d: &mut CMatrix<T>) {
    let (rows, cols) = (d.rows(), d.cols());
    if rows == 0 || cols == 0 {
        return;
    }
    let x = z.norm_sqr();
    if x == T::zero() {
        for v in d.as_mut_slice() {
            *v = cr(T::zero());
        }
        for k in 0..rows.min(cols) {
            d[(k, k)] = cr(T::one());
        }
        return;
    }
    let r = x.sqrt();
    let unit = z / r;
    let half = T::lit(0.5);
    let mut h = vec![T::zero(); rows.max(cols)];
    let mut log_fact = T::zero();
    let mut lower = cr(T::one());
    let mut upper = cr(T::one());
    for off in 0..rows.max(cols) {
        if off > 0 {
            log_fact += T::of(off).ln();
            lower = lower * unit;
            upper = upper * (-unit.conj());
        }
        let len = rows.saturating_sub(off).min(cols).max(cols.saturating_sub(off).min(rows));
        if len == 0 {
            continue;
        }
        laguerre_run(x, off, T::of(off) * half * x.ln() - x * half - log_fact * half, &mut h[..len]);
        for (n, &hn) in h[..len].iter().enumerate() {
            if n + off < rows && n < cols {
                d[(n + off, n)] = lower * hn;
            }
            if off > 0 && n < rows && n + off < cols {
                d[(n, n + off)] = upper * hn;
            }
        }
    }
}

/// Fills `h[k] = √(k!/(k+d)!)·x^{d/2}e^{−x/2}L_k^{(d)}(x)` given `ln h[0]`.
fn laguerre_run<T: Real>(x: T, d: usize, log_h0: T, h: &mut [T]) {
    let big = T::lit(1e100);
    let dd = T::of(d);
    let mut scale = log_h0;
    let mut factor = scale.exp();
    let (mut prev, mut cur) = (T::zero(), T::one());
    for k in 0..h.len() {
        h[k] = cur * factor;
        let kk = T::of(k);
        let next = ((kk + kk + T::one() + dd - x) * cur - (kk * (kk + dd)).sqrt() * prev)
            / ((kk + T::one()) * (kk + T::one() + dd)).sqrt();
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > big {
            prev = prev / m;
            cur = cur / m;
            scale += m.ln();
            factor = scale.exp();
        }
    }
}

/// Coherent amplitudes `⟨n|z⟩` of the untruncated coherent state.
pub fn coherent_amplitudes<T: Real>(z: C<T>, len: usize) -> Vec<C<T>> {
    let mut out = Vec::with_capacity(len);
    let mut v = cr((-z.norm_sqr() / T::lit(2.0)).exp());
    for n in 0..len {
        if n > 0 {
            v = v * z / T::of(n).sqrt();
        }
        out.push(v);
    }
    out
}

/// Parity `Π(0,0) = diag((−1)ⁿ)`.
pub fn parity<T: Real>(space: FockSpace) -> FockOperator<T> {
    let d: Vec<C<T>> = (0..space.dim()).map(|n| cr(if n % 2 == 0 { T::one() } else { -T::one() })).collect();
    FockOperator { space, matrix: CMatrix::from_diag(&d) }
}

/// `Π(α, β) = D(α/2, β/2)·Π(0,0)·D(α/2, β/2)†`.
pub fn parity_displaced<T: Real>(space: FockSpace, alpha: T, beta: T) -> Result<FockOperator<T>> {
    let two = T::lit(2.0);
    let d = displacement(space, alpha / two, beta / two)?;
    Ok(d.mul(&parity(space)).mul(&d.dagger()))
}

/// `|α, β⟩ = D(α, β)|0⟩`.
pub fn coherent_state<T: Real>(space: FockSpace, alpha: T, beta: T) -> Result<FockState<T>> {
    let d = displacement(space, alpha, beta)?;
    let s = FockState { space, amps: d.matrix.column(0) };
    s.check_tail()?;
    Ok(s)
}

/// `Tr[Θ D(α, β)]` from the exact displacement matrix elements.
pub fn weyl_function<T: Real>(rho: &FockOperator<T>, alpha: T, beta: T) -> Result<C<T>> {
    rho.check_tail()?;
    Ok(weyl_unchecked(rho, c(alpha, beta), false))
}

/// `Tr[ρ Π(α, β)]`, required to be real.
pub fn wigner_function<T: Real>(rho: &FockOperator<T>, alpha: T, beta: T) -> Result<T> {
    rho.check_tail()?;
    let w = weyl_unchecked(rho, c(alpha, beta), true);
    if w.im.abs() > T::lit(1e-6) {
        return Err(Error::ImaginaryResidue { residue: w.im.abs().f64() });
    }
    Ok(w.re)
}

/// `Tr[Θ D(z)]`, or `Tr[Θ D(z) Π(0,0)]` when `with_parity` is set.
pub(crate) fn weyl_unchecked<T: Real>(theta: &FockOperator<T>, z: C<T>, with_parity: bool) -> C<T> {
    let n = theta.support();
    let d = displacement_elements(z, n, n);
    let mut s = cr(T::zero());
    for m in 0..n {
        for k in 0..n {
            let mut v = theta.matrix[(k, m)] * d[(m, k)];
            if with_parity && k % 2 == 1 {
                v = -v;
            }
            s += v;
        }
    }
    s
}

/// Normalised Hermite functions `h_0(x), …, h_{len−1}(x)`.
pub fn hermite_functions<T: Real>(x: T, len: usize) -> Vec<T> {
    let mut h = Vec::with_capacity(len);
    if len == 0 {
        return h;
    }
    h.push(T::PI().powf(T::lit(-0.25)) * (-x * x / T::lit(2.0)).exp());
    if len > 1 {
        h.push(T::lit(2.0).sqrt() * x * h[0]);
    }
    for n in 1..len.saturating_sub(1) {
        let nf = T::of(n);
        let next = (T::lit(2.0) / (nf + T::one())).sqrt() * x * h[n] - (nf / (nf + T::one())).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// Position-basis matrix element `⟨x|Θ|y⟩` by Hermite synthesis.
pub fn position_element<T: Real>(theta: &FockOperator<T>, x: T, y: T) -> C<T> {
    let n = theta.space.dim();
    let hx = hermite_functions(x, n);
    let hy = hermite_functions(y, n);
    let mut s = cr(T::zero());
    for m in 0..n {
        if hx[m] == T::zero() {
            continue;
        }
        let mut row = cr(T::zero());
        for k in 0..n {
            row += theta.matrix[(m, k)] * hy[k];
        }
        s += row * hx[m];
    }
    s
}

/// Momentum-basis matrix element `⟨p|Θ|q⟩` by Hermite synthesis, using
/// `⟨p|n⟩ = (−i)ⁿ h_n(p)`.
pub fn momentum_element<T: Real>(theta: &FockOperator<T>, p: T, q: T) -> C<T> {
    let n = theta.space.dim();
    let phase = |k: usize| match k % 4 {
        0 => c(T::one(), T::zero()),
        1 => c(T::zero(), -T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), T::one()),
    };
    let hp = hermite_functions(p, n);
    let hq = hermite_functions(q, n);
    let mut s = cr(T::zero());
    for m in 0..n {
        for k in 0..n {
            s += phase(m) * theta.matrix[(m, k)] * phase(k).conj() * (hp[m] * hq[k]);
        }
    }
    s
}
