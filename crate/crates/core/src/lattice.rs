//! Density calculus for rank-≤2 lattices in R⁴ and full-rank lattices in R².
//!
//! A `Lattice4` is the point set Λ = MZ² ⊂ R⁴ generated by the columns of a
//! real 4×2 matrix M. Row coordinates are labelled (a, b, c, d), so column j
//! reads (aⱼ, bⱼ, cⱼ, dⱼ). The two-dimensional Beurling density of a rank-2
//! lattice — points per unit area measured along the plane spanned by the
//! generator — has a closed form in terms of the six 2×2 minors of M, and a
//! slow empirical estimator by counting points in growing balls.

use crate::error::{Error, Result};
use nalgebra::{Matrix2, Matrix4x2, Vector2, Vector4};

/// Relative singular-value threshold below which a direction counts as zero.
pub const RANK_EPS: f64 = 1e-10;

/// Rank-≤2 lattice Λ = MZ² in R⁴, stored by its 4×2 generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice4 {
    gen: Matrix4x2<f64>,
}

/// Full-rank (or degenerate) lattice Γ = GZ² in R².
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice2 {
    gen: Matrix2<f64>,
}

impl Lattice2 {
    pub fn new(gen: Matrix2<f64>) -> Self {
        Self { gen }
    }

    /// Row-major entries [[g11, g12], [g21, g22]].
    pub fn from_rows(r1: [f64; 2], r2: [f64; 2]) -> Self {
        Self::new(Matrix2::new(r1[0], r1[1], r2[0], r2[1]))
    }

    pub fn generator(&self) -> &Matrix2<f64> {
        &self.gen
    }

    pub fn det(&self) -> f64 {
        self.gen.determinant()
    }

    pub fn is_degenerate(&self) -> bool {
        let scale = self.gen.amax();
        self.det().abs() <= RANK_EPS * scale * scale
    }

    /// Beurling density |det G|⁻¹, the reciprocal fundamental-domain area.
    pub fn beurling_density(&self) -> Result<f64> {
        if self.is_degenerate() {
            return Err(Error::DegenerateLattice(
                "2x2 generator is singular; density undefined".into(),
            ));
        }
        Ok(self.det().abs().recip())
    }
}

impl Lattice4 {
    pub fn new(gen: Matrix4x2<f64>) -> Self {
        Self { gen }
    }

    /// Build from the two generating columns (a, b, c, d per column).
    pub fn from_cols(c1: [f64; 4], c2: [f64; 4]) -> Self {
        Self::new(Matrix4x2::from_columns(&[
            Vector4::from_column_slice(&c1),
            Vector4::from_column_slice(&c2),
        ]))
    }

    /// Entries in the order a1,b1,c1,d1,a2,b2,c2,d2 (column 1 then column 2).
    pub fn from_flat(e: [f64; 8]) -> Self {
        Self::from_cols([e[0], e[1], e[2], e[3]], [e[4], e[5], e[6], e[7]])
    }

    /// Lift of Γ ⊂ R² acting by composition on the output side:
    /// columns (aⱼ, bⱼ, bⱼ, 0).
    pub fn lift_gamma(gamma: &Lattice2) -> Self {
        let g = gamma.generator();
        Self::from_cols(
            [g[(0, 0)], g[(1, 0)], g[(1, 0)], 0.0],
            [g[(0, 1)], g[(1, 1)], g[(1, 1)], 0.0],
        )
    }

    /// Lift of 𝓜 ⊂ R² acting by conjugation: columns (0, 0, aⱼ, bⱼ).
    pub fn lift_m(m: &Lattice2) -> Self {
        let g = m.generator();
        Self::from_cols(
            [0.0, 0.0, g[(0, 0)], g[(1, 0)]],
            [0.0, 0.0, g[(0, 1)], g[(1, 1)]],
        )
    }

    pub fn generator(&self) -> &Matrix4x2<f64> {
        &self.gen
    }

    pub fn flat(&self) -> [f64; 8] {
        let g = &self.gen;
        [
            g[(0, 0)],
            g[(1, 0)],
            g[(2, 0)],
            g[(3, 0)],
            g[(0, 1)],
            g[(1, 1)],
            g[(2, 1)],
            g[(3, 1)],
        ]
    }

    /// Lattice point for index (m, n): gen · (m, n)ᵀ, no rounding.
    pub fn point(&self, m: i64, n: i64) -> Vector4<f64> {
        self.gen * Vector2::new(m as f64, n as f64)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new(self.gen * t)
    }

    /// The six 2×2 minors in row-pair order (ab, ac, ad, bc, bd, cd).
    pub fn minors(&self) -> [f64; 6] {
        let g = &self.gen;
        let m = |i: usize, j: usize| g[(i, 0)] * g[(j, 1)] - g[(j, 0)] * g[(i, 1)];
        [m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3)]
    }

    fn minor_sq_sum(&self) -> f64 {
        self.minors().iter().map(|m| m * m).sum()
    }

    /// Numerical rank of the generator (singular values below
    /// `RANK_EPS · σ_max` count as zero).
    pub fn rank(&self) -> usize {
        let sv = self.gen.svd(false, false).singular_values;
        let smax = sv.max();
        if smax == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > RANK_EPS * smax).count()
    }

    /// Density is undefined exactly when all six minors vanish. Each minor is
    /// compared against its own cancellation scale |uᵢ||vⱼ| + |uⱼ||vᵢ| rather
    /// than a global singular-value cutoff: generators with wildly disparate
    /// column scales (density formulas still exact) stay admissible, while
    /// minors that are pure rounding residue count as zero.
    fn all_minors_vanish(&self) -> bool {
        let g = &self.gen;
        let mut all_zero = true;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let prod1 = g[(i, 0)] * g[(j, 1)];
                let prod2 = g[(j, 0)] * g[(i, 1)];
                let minor = prod1 - prod2;
                if minor.abs() > 1e-12 * (prod1.abs() + prod2.abs()) {
                    all_zero = false;
                }
            }
        }
        all_zero
    }

    fn require_rank2(&self) -> Result<()> {
        if self.all_minors_vanish() {
            return Err(Error::DegenerateLattice(
                "all 2x2 minors of the generator vanish; density undefined".into(),
            ));
        }
        Ok(())
    }

    /// Two-dimensional Beurling density: the reciprocal square root of the
    /// sum of squares of the six 2×2 minors. By Cauchy–Binet this equals
    /// det(MᵀM)^{-1/2}, the reciprocal area of the fundamental cell inside
    /// the plane spanned by the generator.
    pub fn two_beurling_density(&self) -> Result<f64> {
        self.require_rank2()?;
        Ok(self.minor_sq_sum().sqrt().recip())
    }

    /// Derived 2-D lattice with generator rows (a₁−d₁, a₂−d₂) and (c₁, c₂).
    /// May be degenerate; downstream density calls flag that.
    pub fn tilde_lattice(&self) -> Lattice2 {
        let g = &self.gen;
        Lattice2::from_rows(
            [g[(0, 0)] - g[(3, 0)], g[(0, 1)] - g[(3, 1)]],
            [g[(2, 0)], g[(2, 1)]],
        )
    }

    /// Necessary condition for identifiability: density at most √2.
    ///
    /// Evaluated as `minor_sq_sum ≥ 1/2`, which is algebraically equivalent
    /// and exact at the boundary for exactly representable generators.
    pub fn necessary_condition_holds(&self) -> Result<bool> {
        self.require_rank2()?;
        Ok(self.minor_sq_sum() >= 0.5)
    }

    /// Exact count of distinct lattice points inside the open ball of radius
    /// `radius` centered at `center`.
    ///
    /// For rank-2 generators the index range |m|, |n| ≤ (radius + |center|)/σ_min
    /// is exhaustive since ‖M(m,n)‖ ≥ σ_min ‖(m,n)‖. Rank-1 lattices are folded
    /// onto their line and counted one-dimensionally.
    pub fn count_points_in_ball(&self, radius: f64, center: &Vector4<f64>) -> Result<usize> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        match self.rank() {
            0 => Err(Error::DegenerateLattice(
                "rank-0 generator: the lattice is the single point 0".into(),
            )),
            1 => self.count_rank1(radius, center),
            _ => {
                let sv = self.gen.svd(false, false).singular_values;
                let smin = sv.min();
                let bound = ((radius + center.norm()) / smin).ceil() as i64 + 2;
                let r2 = radius * radius;
                let c1 = self.gen.column(0).into_owned();
                let c2 = self.gen.column(1).into_owned();
                let mut count = 0usize;
                // Rank 2 makes (m, n) -> M(m, n) injective, so no dedup needed.
                for m in -bound..=bound {
                    let base = c1 * (m as f64) - center;
                    for n in -bound..=bound {
                        let p = base + c2 * (n as f64);
                        if p.norm_squared() < r2 {
                            count += 1;
                        }
                    }
                }
                Ok(count)
            }
        }
    }

    /// Rank-1 case: both columns lie on one line through the origin. Points
    /// are k·step for a primitive step when the column ratio is rational;
    /// otherwise the ball holds infinitely many distinct points.
    fn count_rank1(&self, radius: f64, center: &Vector4<f64>) -> Result<usize> {
        let c1 = self.gen.column(1).into_owned();
        let c0 = self.gen.column(0).into_owned();
        let (u, v) = if c0.norm() >= c1.norm() {
            (c0, c1)
        } else {
            (c1, c0)
        };
        let e = u.normalize();
        let a = u.dot(&e);
        let b = v.dot(&e);
        let par = center.dot(&e);
        let perp_sq = (center - e * par).norm_squared();
        let r2 = radius * radius;
        if perp_sq >= r2 {
            return Ok(0);
        }
        // Points are t·e with t in {m a + n b}; admissible t solve (t - par)^2 < r^2 - perp^2.
        let half = (r2 - perp_sq).sqrt();
        let (lo, hi) = (par - half, par + half);
        let count_multiples = |step: f64| -> usize {
            if step == 0.0 {
                return usize::from(lo < 0.0 && 0.0 < hi);
            }
            let s = step.abs();
            let kmax = (hi / s).ceil() as i64;
            let kmin = (lo / s).floor() as i64;
            (kmin..=kmax)
                .filter(|&k| {
                    let t = k as f64 * s;
                    lo < t && t < hi
                })
                .count()
        };
        if b == 0.0 {
            return Ok(count_multiples(a));
        }
        match rational_ratio(a / b, 10_000_000, 1e-12) {
            Some((_p, q)) => Ok(count_multiples(b / q as f64)),
            None => Err(Error::DegenerateLattice(
                "rank-1 lattice with incommensurable columns has no finite ball count".into(),
            )),
        }
    }
}

/// Continued-fraction search for x ≈ p/q with q ≤ max_den, to rel_tol relative.
pub(crate) fn rational_ratio(x: f64, max_den: i64, rel_tol: f64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - x).abs() <= rel_tol * x.abs().max(1.0) {
            return Some((p1, q1));
        }
        if frac == 0.0 {
            break;
        }
        let r = frac.recip();
        let a = r.floor();
        frac = r - a;
        let (p2, q2) = (a as i64 * p1 + p0, a as i64 * q1 + q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let approx = p1 as f64 / q1 as f64;
    ((approx - x).abs() <= rel_tol * x.abs().max(1.0)).then_some((p1, q1))
}
