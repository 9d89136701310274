//! Hilbert-Schmidt operators on C^L in four equivalent representations.
//!
//! An operator is stored canonically by its kernel κ(x, y), with the impulse
//! response h(t, x) = κ(x, x−t), the spreading function
//! η(t, ν) = L^{-1/2} Σ_x h(t, x) e^{-2πiν(x-t)/L}, and the Kohn-Nirenberg
//! symbol σ(x, ξ) = L^{-1/2} Σ_t h(t, x) e^{-2πiξt/L} derived on demand and
//! cached. All four tables share the Hilbert-Schmidt norm.
//!
//! The lattice-indexed family H_λ shifts the spreading function by the
//! four-parameter time-frequency shift λ = (s, ω; z, y); equivalently it
//! factors into a composition of one-dimensional shift operators around the
//! base operator, and the two constructions agree exactly.

use crate::error::{Error, Result};
use crate::tf::{stft, symmetric_rep, unit_root, Signal};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// The four operator tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Kernel,
    ImpulseResponse,
    Spreading,
    KnSymbol,
}

/// Four-parameter shift index (s, ω; z, y) in Z_L⁴: (s, ω) translates the
/// spreading function, (z, y) modulates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lambda4 {
    pub s: usize,
    pub w: usize,
    pub z: usize,
    pub y: usize,
}

impl Lambda4 {
    pub fn new(s: i64, w: i64, z: i64, y: i64, len: usize) -> Self {
        let m = len as i64;
        Self {
            s: s.rem_euclid(m) as usize,
            w: w.rem_euclid(m) as usize,
            z: z.rem_euclid(m) as usize,
            y: y.rem_euclid(m) as usize,
        }
    }

    pub fn zero() -> Self {
        Self { s: 0, w: 0, z: 0, y: 0 }
    }

    /// Difference (self − other) reduced mod len.
    pub fn sub(&self, other: &Lambda4, len: usize) -> Lambda4 {
        Lambda4::new(
            self.s as i64 - other.s as i64,
            self.w as i64 - other.w as i64,
            self.z as i64 - other.z as i64,
            self.y as i64 - other.y as i64,
            len,
        )
    }
}

/// Hilbert-Schmidt operator on C^L, kernel-canonical with cached conversions.
#[derive(Debug, Clone)]
pub struct HsOperator {
    len: usize,
    kernel: DMatrix<Complex64>,
    impulse: OnceLock<DMatrix<Complex64>>,
    spreading: OnceLock<DMatrix<Complex64>>,
    symbol: OnceLock<DMatrix<Complex64>>,
}

impl HsOperator {
    pub fn from_kernel(kernel: DMatrix<Complex64>) -> Result<Self> {
        if kernel.nrows() != kernel.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "kernel must be square, got {}x{}",
                kernel.nrows(),
                kernel.ncols()
            )));
        }
        Ok(Self {
            len: kernel.nrows(),
            kernel,
            impulse: OnceLock::new(),
            spreading: OnceLock::new(),
            symbol: OnceLock::new(),
        })
    }

    pub fn from_spreading(eta: DMatrix<Complex64>) -> Result<Self> {
        if eta.nrows() != eta.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "spreading table must be square, got {}x{}",
                eta.nrows(),
                eta.ncols()
            )));
        }
        let h = spreading_to_impulse(&eta);
        let kernel = impulse_to_kernel(&h);
        let op = Self::from_kernel(kernel)?;
        let _ = op.impulse.set(h);
        let _ = op.spreading.set(eta);
        Ok(op)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn kernel(&self) -> &DMatrix<Complex64> {
        &self.kernel
    }

    pub fn impulse_response(&self) -> &DMatrix<Complex64> {
        self.impulse.get_or_init(|| kernel_to_impulse(&self.kernel))
    }

    pub fn spreading(&self) -> &DMatrix<Complex64> {
        self.spreading
            .get_or_init(|| impulse_to_spreading(self.impulse_response()))
    }

    pub fn kn_symbol(&self) -> &DMatrix<Complex64> {
        self.symbol
            .get_or_init(|| impulse_to_symbol(self.impulse_response()))
    }

    pub fn convert(&self, target: Representation) -> &DMatrix<Complex64> {
        match target {
            Representation::Kernel => self.kernel(),
            Representation::ImpulseResponse => self.impulse_response(),
            Representation::Spreading => self.spreading(),
            Representation::KnSymbol => self.kn_symbol(),
        }
    }

    /// ‖H‖_HS, equal for every representation.
    pub fn hs_norm(&self) -> f64 {
        self.kernel.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The operator c·H.
    pub fn scaled(&self, c: Complex64) -> HsOperator {
        HsOperator::from_kernel(self.kernel.map(|v| v * c)).expect("square stays square")
    }

    /// (Hf)(x) = Σ_y κ(x, y) f(y).
    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        f.check_len(self.len)?;
        let mut out = vec![Complex64::ZERO; self.len];
        for y in 0..self.len {
            let fy = f.data()[y];
            if fy == Complex64::ZERO {
                continue;
            }
            let col = self.kernel.column(y);
            for (x, slot) in out.iter_mut().enumerate() {
                *slot += col[x] * fy;
            }
        }
        Ok(Signal::new(out))
    }

    /// Family member H_λ: the operator whose spreading function is
    /// π₂(λ) applied to this operator's spreading function.
    pub fn family_member(&self, lam: Lambda4) -> HsOperator {
        HsOperator::from_spreading(shift_spreading(self.spreading(), lam))
            .expect("square table stays square")
    }

    /// Same operator built by composing shift operators around the base:
    /// T_s M_z T_{-y} H₀ T_y M_{ω-z}, assembled at the kernel level.
    pub fn family_member_factored(&self, lam: Lambda4) -> HsOperator {
        let len = self.len;
        let Lambda4 { s, w, z, y } = lam;
        let mut out = DMatrix::zeros(len, len);
        for u in 0..len {
            let src_col = (u + y) % len;
            let col_phase_idx = (w as i64 - z as i64) * u as i64;
            for x in 0..len {
                let src_row = (x + len - s % len + y) % len;
                let idx = z as i64 * (x as i64 - s as i64) + col_phase_idx;
                out[(x, u)] = unit_root(len, idx) * self.kernel[(src_row, src_col)];
            }
        }
        HsOperator::from_kernel(out).expect("square")
    }

    /// H_λ g computed without materializing the shifted kernel:
    /// applies T_y M_{ω-z}, then the base kernel, then T_s M_z T_{-y}.
    pub fn apply_family_member(&self, lam: Lambda4, g: &Signal) -> Result<Signal> {
        g.check_len(self.len)?;
        let len = self.len;
        let Lambda4 { s, w, z, y } = lam;
        let mut u = vec![Complex64::ZERO; len];
        for (x, slot) in u.iter_mut().enumerate() {
            let src = (x + len - y) % len;
            let idx = (w as i64 - z as i64) * (x as i64 - y as i64);
            *slot = unit_root(len, idx) * g.data()[src];
        }
        let v = self.apply(&Signal::new(u))?;
        let mut out = vec![Complex64::ZERO; len];
        for (x, slot) in out.iter_mut().enumerate() {
            let src = (x + len - s % len + y) % len;
            let idx = z as i64 * (x as i64 - s as i64);
            *slot = unit_root(len, idx) * v.data()[src];
        }
        Ok(Signal::new(out))
    }

    /// Ambiguity value ⟨π₂(δ) η₀, η₀⟩ of the spreading function, used to
    /// assemble Gram matrices of spreading families without materializing
    /// each shifted table.
    pub fn spreading_ambiguity(&self, delta: Lambda4) -> Complex64 {
        let eta = self.spreading();
        let len = self.len;
        let Lambda4 { s, w, z, y } = delta;
        let mut acc = Complex64::ZERO;
        for t in 0..len {
            let src_t = (t + len - s) % len;
            let pt = z as i64 * (t as i64 - s as i64);
            for nu in 0..len {
                let src_nu = (nu + len - w) % len;
                let idx = pt + y as i64 * (nu as i64 - w as i64);
                acc += unit_root(len, idx) * eta[(src_t, src_nu)] * eta[(t, nu)].conj();
            }
        }
        acc
    }
}

/// π₂(λ) on a spreading table:
/// out(t, ν) = e^{2πi(z(t-s)+y(ν-ω))/L} η(t-s, ν-ω).
pub fn shift_spreading(eta: &DMatrix<Complex64>, lam: Lambda4) -> DMatrix<Complex64> {
    let len = eta.nrows();
    let Lambda4 { s, w, z, y } = lam;
    let mut out = DMatrix::zeros(len, len);
    for nu in 0..len {
        let pn = y as i64 * (nu as i64 - w as i64);
        let src_nu = (nu + len - w) % len;
        for t in 0..len {
            let src_t = (t + len - s) % len;
            let idx = z as i64 * (t as i64 - s as i64) + pn;
            out[(t, nu)] = unit_root(len, idx) * eta[(src_t, src_nu)];
        }
    }
    out
}

/// Hilbert-Schmidt inner product ⟨H, K⟩ from any matching representation pair.
pub fn hs_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

fn kernel_to_impulse(kernel: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let len = kernel.nrows();
    let mut h = DMatrix::zeros(len, len);
    for t in 0..len {
        for x in 0..len {
            h[(t, x)] = kernel[(x, (x + len - t) % len)];
        }
    }
    h
}

fn impulse_to_kernel(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let len = h.nrows();
    let mut kernel = DMatrix::zeros(len, len);
    for t in 0..len {
        for x in 0..len {
            kernel[(x, (x + len - t) % len)] = h[(t, x)];
        }
    }
    kernel
}

fn impulse_to_spreading(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let len = h.nrows();
    let fft = FftPlanner::new().plan_fft_forward(len);
    let scale = (len as f64).sqrt().recip();
    let mut eta = DMatrix::zeros(len, len);
    let mut buf = vec![Complex64::ZERO; len];
    for t in 0..len {
        for (x, slot) in buf.iter_mut().enumerate() {
            *slot = h[(t, x)];
        }
        fft.process(&mut buf);
        for nu in 0..len {
            eta[(t, nu)] = buf[nu] * scale * unit_root(len, (nu * t) as i64);
        }
    }
    eta
}

fn spreading_to_impulse(eta: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let len = eta.nrows();
    let fft = FftPlanner::new().plan_fft_inverse(len);
    let scale = (len as f64).sqrt().recip();
    let mut h = DMatrix::zeros(len, len);
    let mut buf = vec![Complex64::ZERO; len];
    for t in 0..len {
        for (nu, slot) in buf.iter_mut().enumerate() {
            *slot = eta[(t, nu)] * unit_root(len, -((nu * t) as i64));
        }
        fft.process(&mut buf);
        for x in 0..len {
            h[(t, x)] = buf[x] * scale;
        }
    }
    h
}

fn impulse_to_symbol(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let len = h.nrows();
    let fft = FftPlanner::new().plan_fft_forward(len);
    let scale = (len as f64).sqrt().recip();
    let mut sigma = DMatrix::zeros(len, len);
    let mut buf = vec![Complex64::ZERO; len];
    for x in 0..len {
        for (t, slot) in buf.iter_mut().enumerate() {
            *slot = h[(t, x)];
        }
        fft.process(&mut buf);
        for xi in 0..len {
            sigma[(x, xi)] = buf[xi] * scale;
        }
    }
    sigma
}

/// Base-operator catalog.
#[derive(Debug, Clone)]
pub enum H0Kind {
    /// Separable Gaussian kernel κ(x, y) = e^{-π(x̄²+ȳ²)/L} at symmetric
    /// representatives (rank one: the projection onto a Gaussian bump).
    GaussKernel,
    /// Spreading function χ_{[0,a)×[0,b)}; HS norm √(ab).
    OpwBox { a: usize, b: usize },
    /// Product-convolution H f = ρ · (f ∗ r): κ(x, y) = ρ(x) r(x−y).
    ProdConv { rho: Signal, filter: Signal },
    /// Rank-one f ↦ ⟨f, h⟩ g₀, i.e. κ(x, y) = g₀(x) conj(h(y)). Its
    /// spreading function is L^{-1/2} V_h g₀ in this normalization.
    RankOne { h: Signal, g0: Signal },
}

pub fn make_h0(len: usize, kind: &H0Kind) -> Result<HsOperator> {
    match kind {
        H0Kind::GaussKernel => {
            let g: Vec<f64> = (0..len)
                .map(|x| {
                    let xb = symmetric_rep(x, len) as f64;
                    (-PI * xb * xb / len as f64).exp()
                })
                .collect();
            let mut kernel = DMatrix::zeros(len, len);
            for x in 0..len {
                for y in 0..len {
                    kernel[(x, y)] = Complex64::new(g[x] * g[y], 0.0);
                }
            }
            HsOperator::from_kernel(kernel)
        }
        H0Kind::OpwBox { a, b } => {
            if *a == 0 || *b == 0 || *a > len || *b > len {
                return Err(Error::InvalidParams(format!(
                    "box support ({a}, {b}) must lie in [1, {len}]"
                )));
            }
            let mut eta = DMatrix::zeros(len, len);
            for t in 0..*a {
                for nu in 0..*b {
                    eta[(t, nu)] = Complex64::ONE;
                }
            }
            HsOperator::from_spreading(eta)
        }
        H0Kind::ProdConv { rho, filter } => {
            rho.check_len(len)?;
            filter.check_len(len)?;
            let mut kernel = DMatrix::zeros(len, len);
            for x in 0..len {
                for y in 0..len {
                    kernel[(x, y)] = rho.data()[x] * filter.data()[(x + len - y) % len];
                }
            }
            HsOperator::from_kernel(kernel)
        }
        H0Kind::RankOne { h, g0 } => {
            h.check_len(len)?;
            g0.check_len(len)?;
            let mut kernel = DMatrix::zeros(len, len);
            for x in 0..len {
                for y in 0..len {
                    kernel[(x, y)] = g0.data()[x] * h.data()[y].conj();
                }
            }
            HsOperator::from_kernel(kernel)
        }
    }
}

/// Spreading table of the rank-one operator ⟨·, h⟩ g₀, computed through the
/// short-time Fourier transform route for cross-checks.
pub fn rank_one_spreading(h: &Signal, g0: &Signal) -> Result<DMatrix<Complex64>> {
    let len = g0.len();
    h.check_len(len)?;
    let scale = (len as f64).sqrt().recip();
    Ok(stft(g0, h)?.map(|v| v * scale))
}
