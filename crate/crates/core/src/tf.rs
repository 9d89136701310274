//! Finite time-frequency analysis on the cyclic group Z_L.
//!
//! Signals are complex vectors indexed by 0..L-1. All transforms use the
//! unitary normalization L^{-1/2}, which keeps the Hilbert-Schmidt norm
//! identities of the operator module exact. The continuous ↔ discrete
//! dictionary maps a continuous coordinate t to the grid index
//! round(t·√L), so time and frequency scale symmetrically.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};

/// Complex signal on Z_L.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    data: Vec<Complex64>,
}

/// Time-frequency shift index (k, l), stored reduced mod L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TfIndex {
    pub k: usize,
    pub l: usize,
}

impl TfIndex {
    /// Reduce a possibly negative index pair mod `len`.
    pub fn new(k: i64, l: i64, len: usize) -> Self {
        Self {
            k: k.rem_euclid(len as i64) as usize,
            l: l.rem_euclid(len as i64) as usize,
        }
    }
}

/// e^{2πi idx / len} with the exponent reduced exactly first.
pub(crate) fn unit_root(len: usize, idx: i64) -> Complex64 {
    let r = idx.rem_euclid(len as i64) as f64;
    Complex64::cis(TAU * r / len as f64)
}

impl Signal {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![Complex64::ZERO; len])
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self::new(data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Unit impulse at position `pos`.
    pub fn delta(len: usize, pos: usize) -> Self {
        let mut s = Self::zeros(len);
        s.data[pos % len] = Complex64::ONE;
        s
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// ⟨f, g⟩ = Σ f(x) conj(g(x)), conjugate-linear in the second argument.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal::new(self.data.iter().map(|z| z * c).collect())
    }

    pub fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Time-frequency shift: (π(k,l) f)(x) = e^{2πi l (x-k)/L} f(x-k).
    pub fn tf_shift(&self, idx: TfIndex) -> Signal {
        let len = self.len();
        let mut out = vec![Complex64::ZERO; len];
        for (x, slot) in out.iter_mut().enumerate() {
            let src = (x + len - idx.k) % len;
            *slot = unit_root(len, (idx.l * src) as i64) * self.data[src];
        }
        Signal::new(out)
    }

    /// Unitary discrete Fourier transform F(ξ) = L^{-1/2} Σ f(x) e^{-2πi xξ/L}.
    pub fn dft(&self) -> Signal {
        let len = self.len();
        let mut buf = self.data.clone();
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        let scale = (len as f64).sqrt().recip();
        for z in &mut buf {
            *z *= scale;
        }
        Signal::new(buf)
    }

    /// Inverse of [`Signal::dft`].
    pub fn idft(&self) -> Signal {
        let len = self.len();
        let mut buf = self.data.clone();
        FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
        let scale = (len as f64).sqrt().recip();
        for z in &mut buf {
            *z *= scale;
        }
        Signal::new(buf)
    }
}

/// Short-time Fourier transform table V(k, l) = ⟨f, π(k,l)γ⟩.
///
/// Row index is the time shift k, column index the frequency shift l.
/// Satisfies Σ_{k,l} |V(k,l)|² = L ‖f‖² ‖γ‖².
pub fn stft(f: &Signal, gamma: &Signal) -> Result<DMatrix<Complex64>> {
    let len = f.len();
    gamma.check_len(len)?;
    let fft = FftPlanner::new().plan_fft_forward(len);
    let mut table = DMatrix::zeros(len, len);
    let mut buf = vec![Complex64::ZERO; len];
    for k in 0..len {
        for (x, slot) in buf.iter_mut().enumerate() {
            *slot = f.data[x] * gamma.data[(x + len - k) % len].conj();
        }
        fft.process(&mut buf);
        for l in 0..len {
            table[(k, l)] = buf[l] * unit_root(len, (l * k) as i64);
        }
    }
    Ok(table)
}

/// Zak transform with time step `a` (must divide L): an a×(L/a) table
/// Z(q, j) = b^{-1/2} Σ_r f(q + ra) e^{-2πi r j / b}, unitary C^L → C^{a×b}.
pub fn zak(f: &Signal, a: usize) -> Result<DMatrix<Complex64>> {
    let len = f.len();
    if a == 0 || !len.is_multiple_of(a) {
        return Err(Error::NotADivisor {
            param: "a",
            value: a,
            len,
        });
    }
    let b = len / a;
    let fft = FftPlanner::new().plan_fft_forward(b);
    let scale = (b as f64).sqrt().recip();
    let mut table = DMatrix::zeros(a, b);
    let mut buf = vec![Complex64::ZERO; b];
    for q in 0..a {
        for (r, slot) in buf.iter_mut().enumerate() {
            *slot = f.data[q + r * a];
        }
        fft.process(&mut buf);
        for j in 0..b {
            table[(q, j)] = buf[j] * scale;
        }
    }
    Ok(table)
}

/// Window catalog for identifiers and analysis windows.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowKind {
    /// a^{-1/2} χ_{[0,a)}; unit norm. Requires a | L.
    CharBox { a: usize },
    /// Periodized Gaussian e^{-π x²/L}, unit norm.
    Gauss,
    /// Σ_n δ_{na}: L/a ones. Requires a | L.
    DeltaTrain { a: usize },
    /// Unimodular chirp e^{πi c x²/L}.
    Chirp { c: i64 },
    /// Seeded complex Gaussian vector, unit norm.
    RandomUnit { seed: u64 },
}

pub fn make_window(len: usize, kind: &WindowKind) -> Result<Signal> {
    if len == 0 {
        return Err(Error::InvalidParams("window length must be positive".into()));
    }
    match *kind {
        WindowKind::CharBox { a } => {
            require_divisor(a, len)?;
            let h = (a as f64).sqrt().recip();
            let mut data = vec![Complex64::ZERO; len];
            for slot in data.iter_mut().take(a) {
                *slot = Complex64::new(h, 0.0);
            }
            Ok(Signal::new(data))
        }
        WindowKind::Gauss => {
            let mut g = vec![0.0f64; len];
            for (x, slot) in g.iter_mut().enumerate() {
                let xb = symmetric_rep(x, len) as f64;
                let lf = len as f64;
                *slot = (-3..=3)
                    .map(|j| (-PI * (xb + j as f64 * lf).powi(2) / lf).exp())
                    .sum();
            }
            let norm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok(Signal::new(
                g.iter().map(|&v| Complex64::new(v / norm, 0.0)).collect(),
            ))
        }
        WindowKind::DeltaTrain { a } => {
            require_divisor(a, len)?;
            let mut data = vec![Complex64::ZERO; len];
            for slot in data.iter_mut().step_by(a) {
                *slot = Complex64::ONE;
            }
            Ok(Signal::new(data))
        }
        WindowKind::Chirp { c } => {
            let data = (0..len)
                .map(|x| {
                    let idx = (c * (x * x) as i64).rem_euclid(2 * len as i64);
                    Complex64::cis(PI * idx as f64 / len as f64)
                })
                .collect();
            Ok(Signal::new(data))
        }
        WindowKind::RandomUnit { seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut data = Vec::with_capacity(len);
            for _ in 0..len {
                let (re, im) = gaussian_pair(&mut rng);
                data.push(Complex64::new(re, im));
            }
            let s = Signal::new(data);
            let norm = s.norm();
            Ok(s.scaled(Complex64::new(norm.recip(), 0.0)))
        }
    }
}

fn require_divisor(a: usize, len: usize) -> Result<()> {
    if a == 0 || !len.is_multiple_of(a) {
        return Err(Error::NotADivisor {
            param: "a",
            value: a,
            len,
        });
    }
    Ok(())
}

/// Box-Muller transform from two uniforms.
fn gaussian_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    (r * (TAU * u2).cos(), r * (TAU * u2).sin())
}

/// Symmetric representative of x mod len in [-len/2, len/2).
pub fn symmetric_rep(x: usize, len: usize) -> i64 {
    let half = (len / 2) as i64;
    ((x as i64 + half).rem_euclid(len as i64)) - half
}

/// Polynomial torus weight v_s(z) = (1 + |z|/√L)^s at symmetric representatives.
fn torus_weight(k: usize, l: usize, len: usize, s: f64) -> f64 {
    let kb = symmetric_rep(k, len) as f64;
    let lb = symmetric_rep(l, len) as f64;
    let r = (kb * kb + lb * lb).sqrt() / (len as f64).sqrt();
    (1.0 + r).powf(s)
}

/// Discrete modulation-space norms of f against window γ with weight
/// exponent s: (sup-norm, weighted ℓ¹-norm) of the weighted STFT table.
/// Pass s = 0 for the unweighted norms.
pub fn mod_norms(f: &Signal, gamma: &Signal, s: f64) -> Result<(f64, f64)> {
    let len = f.len();
    gamma.check_len(len)?;
    let table = stft(f, gamma)?;
    let mut sup = 0.0f64;
    let mut sum = 0.0f64;
    for k in 0..len {
        for l in 0..len {
            let w = torus_weight(k, l, len, s);
            let v = table[(k, l)].norm() * w;
            sup = sup.max(v);
            sum += v;
        }
    }
    Ok((sup, sum))
}

/// Weighted ℓ¹ norm Σ |c_λ| (1 + |λ|)^s of a finitely supported coefficient
/// sequence indexed by points λ (Euclidean norm of the point).
pub fn seq_norm_l1s<P: AsRef<[f64]>>(items: &[(P, Complex64)], s: f64) -> f64 {
    items
        .iter()
        .map(|(p, c)| {
            let norm = p.as_ref().iter().map(|x| x * x).sum::<f64>().sqrt();
            c.norm() * (1.0 + norm).powf(s)
        })
        .sum()
}
