//! Riesz-bound estimation, identification matrices and coefficient recovery.
//!
//! For a finite family of vectors the optimal Riesz constants are the extreme
//! squared singular values of the synthesis matrix whose columns are the
//! family members; they are computed here through the Hermitian Gram matrix,
//! which is much cheaper when the vectors are long and the family is small.
//!
//! An identification problem pairs a base operator and a finite set of
//! four-parameter shifts with a probing signal g and an analysis Gabor
//! system (γ, 𝓜). Its matrix A has entries ⟨H_λ g, π(μ)γ⟩; recovering the
//! coefficients of H = Σ c_λ H_λ from the analysis samples of Hg means
//! solving A c = v, which is well posed exactly when A has a numerically
//! bounded left inverse.

use crate::error::{Error, Result};
use crate::hsop::{HsOperator, Lambda4};
use crate::tf::{unit_root, Signal, TfIndex};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::collections::HashMap;

/// Window plus a finite set of distinct time-frequency shift indices.
#[derive(Debug, Clone)]
pub struct GaborSystem {
    pub window: Signal,
    pub indices: Vec<TfIndex>,
}

impl GaborSystem {
    pub fn new(window: Signal, indices: Vec<TfIndex>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for idx in &indices {
            if !seen.insert(*idx) {
                return Err(Error::InvalidParams(format!(
                    "duplicate analysis index ({}, {})",
                    idx.k, idx.l
                )));
            }
        }
        Ok(Self { window, indices })
    }

    /// Full product lattice aZ_L × bZ_L (a, b divisors of L).
    pub fn product_lattice(window: Signal, a: usize, b: usize) -> Result<Self> {
        let len = window.len();
        if a == 0 || !len.is_multiple_of(a) {
            return Err(Error::NotADivisor { param: "a", value: a, len });
        }
        if b == 0 || !len.is_multiple_of(b) {
            return Err(Error::NotADivisor { param: "b", value: b, len });
        }
        let mut indices = Vec::with_capacity((len / a) * (len / b));
        for k in (0..len).step_by(a) {
            for l in (0..len).step_by(b) {
                indices.push(TfIndex { k, l });
            }
        }
        Self::new(window, indices)
    }

    pub fn atoms(&self) -> Vec<Signal> {
        self.indices
            .iter()
            .map(|&idx| self.window.tf_shift(idx))
            .collect()
    }
}

fn eigen_bounds(mut gram: DMatrix<Complex64>) -> (f64, f64) {
    let n = gram.nrows();
    if n == 1 {
        let v = gram[(0, 0)].re.max(0.0);
        return (v, v);
    }
    // Symmetrize away rounding noise before the Hermitian eigensolver.
    let adj = gram.adjoint();
    gram = (gram + adj) * Complex64::new(0.5, 0.0);
    let eig = gram.symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo.max(0.0), hi.max(0.0))
}

/// Optimal Riesz constants (σ_min², σ_max²) of the synthesis matrix with the
/// given columns. The lower constant is zero whenever the family is linearly
/// dependent, in particular when it has more members than the dimension.
pub fn riesz_bounds(vectors: &[Signal]) -> Result<(f64, f64)> {
    if vectors.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = vectors.len();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = vectors[j].inner(&vectors[i]);
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
    }
    Ok(eigen_bounds(gram))
}

/// Riesz constants of the spreading family {π₂(λ) η₀ : λ ∈ points}, with the
/// Gram matrix assembled from ambiguity values of η₀ instead of materialized
/// shifted tables. The entry formula is
/// `G[i,j] = e^{2πi (z_i(s_i−s_j) + y_i(ω_i−ω_j))/L} · ⟨π₂(λ_j−λ_i)η₀, η₀⟩`.
pub fn spreading_riesz_bounds(h0: &HsOperator, points: &[Lambda4]) -> Result<(f64, f64)> {
    if points.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let len = h0.len();
    let n = points.len();
    let mut amb_cache: HashMap<Lambda4, Complex64> = HashMap::new();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let delta = points[j].sub(&points[i], len);
            let amb = *amb_cache
                .entry(delta)
                .or_insert_with(|| h0.spreading_ambiguity(delta));
            let phase_idx = points[i].z as i64 * (points[i].s as i64 - points[j].s as i64)
                + points[i].y as i64 * (points[i].w as i64 - points[j].w as i64);
            let v = unit_root(len, phase_idx) * amb;
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
    }
    Ok(eigen_bounds(gram))
}

/// Responses {H_λ g} of the family to the probing signal g.
pub fn response_family(
    h0: &HsOperator,
    points: &[Lambda4],
    g: &Signal,
) -> Result<Vec<Signal>> {
    points
        .iter()
        .map(|&lam| h0.apply_family_member(lam, g))
        .collect()
}

/// Rank-one shortcut: the response of the operator with spreading function
/// L^{-1/2} V_h g_λ is g_λ scaled by ⟨g, h⟩.
pub fn rank_one_response(h: &Signal, g_lambda: &Signal, g: &Signal) -> Result<Signal> {
    g.check_len(h.len())?;
    g_lambda.check_len(h.len())?;
    Ok(g_lambda.scaled(g.inner(h)))
}

/// One identification experiment: base operator, shift set, prober, analysis.
#[derive(Debug, Clone)]
pub struct IdentificationProblem {
    pub h0: HsOperator,
    pub lattice_points: Vec<Lambda4>,
    pub identifier: Signal,
    pub analysis: GaborSystem,
}

impl IdentificationProblem {
    pub fn new(
        h0: HsOperator,
        lattice_points: Vec<Lambda4>,
        identifier: Signal,
        analysis: GaborSystem,
    ) -> Result<Self> {
        let len = h0.len();
        identifier.check_len(len)?;
        analysis.window.check_len(len)?;
        let mut seen = std::collections::HashSet::new();
        for p in &lattice_points {
            if !seen.insert(*p) {
                return Err(Error::InvalidParams(
                    "lattice points must be distinct".into(),
                ));
            }
        }
        Ok(Self {
            h0,
            lattice_points,
            identifier,
            analysis,
        })
    }

    pub fn len(&self) -> usize {
        self.h0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice_points.is_empty()
    }
}

/// A[μ; λ] = ⟨H_λ g, π(μ)γ⟩, rows over analysis indices, columns over points.
pub fn identification_matrix(problem: &IdentificationProblem) -> Result<DMatrix<Complex64>> {
    let responses = response_family(
        &problem.h0,
        &problem.lattice_points,
        &problem.identifier,
    )?;
    let atoms = problem.analysis.atoms();
    let mut a = DMatrix::zeros(atoms.len(), responses.len());
    for (j, resp) in responses.iter().enumerate() {
        for (i, atom) in atoms.iter().enumerate() {
            a[(i, j)] = resp.inner(atom);
        }
    }
    Ok(a)
}

/// Result of a least-squares coefficient recovery.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub coefficients: DVector<Complex64>,
    pub residual: f64,
    /// σ_max / σ_min of the system matrix.
    pub condition_number: f64,
}

/// Least-squares solve of A c = v through a singular value decomposition.
/// Declares the system not identifiable when σ_min/σ_max < tol.
pub fn recover_coefficients(
    a: &DMatrix<Complex64>,
    v: &DVector<Complex64>,
    tol: f64,
) -> Result<Recovery> {
    if a.nrows() < a.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "need at least as many rows as columns, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if v.len() != a.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "right-hand side length {} does not match {} rows",
            v.len(),
            a.nrows()
        )));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio < tol {
        return Err(Error::NotIdentifiable { ratio, tol });
    }
    let coefficients = svd
        .solve(v, 0.0)
        .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    let residual = (a * &coefficients - v).norm();
    Ok(Recovery {
        coefficients,
        residual,
        condition_number: smax / smin,
    })
}

/// Summary of one identification experiment.
#[derive(Debug, Clone, Serialize)]
pub struct IdentificationReport {
    pub len: usize,
    pub n_points: usize,
    pub riesz_spreading_lo: f64,
    pub riesz_spreading_hi: f64,
    pub riesz_response_lo: f64,
    pub riesz_response_hi: f64,
    /// σ_max/σ_min of the identification matrix (infinite when singular).
    pub cond_a: f64,
    /// σ_min/σ_max of the identification matrix.
    pub sigma_ratio: f64,
    /// Mean relative recovery error over the requested random trials;
    /// absent when the matrix is numerically rank deficient.
    pub recovery_rel_error: Option<f64>,
    /// σ_min/σ_max ≥ tol.
    pub identifiable: bool,
    /// Two-dimensional Beurling density of the continuous generator, when known.
    pub density_2d: Option<f64>,
    /// Beurling density of the derived 2-D lattice, when known and nondegenerate.
    pub density_tilde: Option<f64>,
    pub elapsed_ms: f64,
}

/// Run the full pipeline: Riesz bounds for both families, identification
/// matrix spectrum, and recovery error averaged over `trials` random
/// coefficient vectors.
pub fn identify_report(
    problem: &IdentificationProblem,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<IdentificationReport> {
    let start = std::time::Instant::now();
    let (slo, shi) = spreading_riesz_bounds(&problem.h0, &problem.lattice_points)?;
    let responses = response_family(
        &problem.h0,
        &problem.lattice_points,
        &problem.identifier,
    )?;
    let (rlo, rhi) = riesz_bounds(&responses)?;
    let a = identification_matrix(problem)?;
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let sigma_ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    let identifiable = a.nrows() >= a.ncols() && sigma_ratio >= tol;

    let recovery_rel_error = if identifiable && trials > 0 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut total = 0.0;
        for _ in 0..trials {
            let c_true = DVector::from_fn(a.ncols(), |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let v = &a * &c_true;
            let rec = recover_coefficients(&a, &v, tol)?;
            total += (&rec.coefficients - &c_true).norm() / c_true.norm();
        }
        Some(total / trials as f64)
    } else {
        None
    };

    Ok(IdentificationReport {
        len: problem.len(),
        n_points: problem.lattice_points.len(),
        riesz_spreading_lo: slo,
        riesz_spreading_hi: shi,
        riesz_response_lo: rlo,
        riesz_response_hi: rhi,
        cond_a: if smin > 0.0 { smax / smin } else { f64::INFINITY },
        sigma_ratio,
        recovery_rel_error,
        identifiable,
        density_2d: None,
        density_tilde: None,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
