//! Two-mode Gaussian states in dimensionless quadratures.
//!
//! Ordering is `(x, p_x, y, p_y)`. Quadratures are scaled so that the vacuum of
//! the reference tweezer has covariance `I/2` and `[x̃, p̃] = i`.

#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::{Matrix2, Matrix4, SMatrix, Vector4};

use crate::error::{Error, Result};
use crate::units::QuadratureUnits;

/// Relative tolerance of the uncertainty-principle check. Fourth-order
/// steps at the default bound keep `σ + (i/2)Ω` within about 1e-8 ‖σ‖ even
/// in exponentially unstable segments.
pub const PHYSICALITY_TOL: f64 = 1e-7;
/// Uncertainty of a vacuum quadrature.
pub const VACUUM_STD: f64 = core::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
    /// [s]
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub purity: f64,
    pub log_negativity: f64,
    /// Standard deviations in vacuum-relative units (vacuum = 1/√2).
    pub delta_x: f64,
    pub delta_p_x: f64,
    pub delta_y: f64,
    pub delta_p_y: f64,
    /// Spread of x (resp. p_x) below the vacuum value.
    pub squeezed_x: bool,
    pub squeezed_p: bool,
    /// Position spread along x over the particle radius, when a radius is given.
    pub delta_x_over_radius: Option<f64>,
}

impl GaussianState {
    pub fn new(mean: Vector4<f64>, cov: Matrix4<f64>, time: f64) -> Self {
        Self { mean, cov, time }
    }

    pub fn vacuum() -> Self {
        thermal_state(0.0, 0.0)
    }

    pub fn with_mean(mut self, mean: Vector4<f64>) -> Self {
        self.mean = mean;
        self
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_c(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)`.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        symplectic_spectrum(&self.cov)
    }

    /// Smallest symplectic eigenvalue of the partially transposed state.
    pub fn partial_transpose_min(&self) -> Result<f64> {
        let flip = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
        Ok(symplectic_spectrum(&(flip * self.cov * flip)).0)
    }

    /// Heisenberg physicality check `σ + (i/2)Ω ≥ 0`, up to
    /// [`PHYSICALITY_TOL`] relative to the largest covariance entry. The
    /// relative form keeps the check meaningful for strongly squeezed states,
    /// whose absolute errors grow with `‖σ‖`.
    pub fn check_physical(&self) -> Result<()> {
        let asym = (self.cov - self.cov.transpose()).abs().max();
        let scale = self.cov.abs().max();
        if !(asym <= 1e-12 * scale.max(1.0)) || !scale.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let slack = PHYSICALITY_TOL * scale.max(1.0);
        if (0..4).any(|i| !(self.cov[(i, i)] > -slack)) {
            return Err(Error::NotPositiveDefinite);
        }
        // Real form of the Hermitian matrix σ + (i/2)Ω: [[σ, −Ω/2], [Ω/2, σ]].
        let mut shifted = SMatrix::<f64, 8, 8>::identity() * slack;
        for i in 0..4 {
            for j in 0..4 {
                shifted[(i, j)] += self.cov[(i, j)];
                shifted[(i + 4, j + 4)] += self.cov[(i, j)];
            }
        }
        for (i, j) in [(0, 1), (2, 3)] {
            shifted[(i, j + 4)] = 0.5;
            shifted[(j, i + 4)] = -0.5;
            shifted[(i + 4, j)] = -0.5;
            shifted[(j + 4, i)] = 0.5;
        }
        if shifted.cholesky().is_none() {
            return Err(Error::Unphysical {
                time: self.time,
                nu: self.symplectic_eigenvalues().0,
            });
        }
        Ok(())
    }

    pub fn purity(&self) -> Result<f64> {
        purity(self)
    }

    pub fn log_negativity(&self) -> Result<f64> {
        log_negativity(self)
    }
}

/// `ν_k` are the singular values of `σ^{1/2} Ω σ^{1/2}`. Going through the
/// symmetric square root keeps them well conditioned near pure states, where
/// the invariant formula `(Δ ± √(Δ² − 4 det σ))/2` loses half the digits.
fn symplectic_spectrum(cov: &Matrix4<f64>) -> (f64, f64) {
    let eig = cov.symmetric_eigen();
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    #[rustfmt::skip]
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    let s = root * omega * root;
    let nu2 = (s.transpose() * s).symmetric_eigenvalues();
    (nu2.min().max(0.0).sqrt(), nu2.max().max(0.0).sqrt())
}

/// Product of thermal states with mean occupations `n_x`, `n_y`.
pub fn thermal_state(n_x: f64, n_y: f64) -> GaussianState {
    let (a, b) = (n_x + 0.5, n_y + 0.5);
    GaussianState {
        mean: Vector4::zeros(),
        cov: Matrix4::from_diagonal(&Vector4::new(a, a, b, b)),
        time: 0.0,
    }
}

/// `Tr ρ² = 1 / (4 √det σ)`.
pub fn purity(state: &GaussianState) -> Result<f64> {
    let det = state.cov.determinant();
    if !(det > 0.0) || state.cov.cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(1.0 / (4.0 * det.sqrt()))
}

/// `L_N = max(0, −ln 2ν̃₋)`.
pub fn log_negativity(state: &GaussianState) -> Result<f64> {
    let nu = state.partial_transpose_min()?;
    if nu <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok((-(2.0 * nu).ln()).max(0.0))
}

/// Purity, negativity and quadrature spreads. `radius` [m] adds `Δx/R`.
pub fn uncertainties(state: &GaussianState, units: &QuadratureUnits, radius: Option<f64>) -> Result<Diagnostics> {
    let sd = |i: usize| state.cov[(i, i)].max(0.0).sqrt();
    let below = |s: f64| s < VACUUM_STD - 1e-9;
    let (dx, dpx, dy, dpy) = (sd(0), sd(1), sd(2), sd(3));
    Ok(Diagnostics {
        purity: purity(state)?,
        log_negativity: log_negativity(state)?,
        delta_x: dx,
        delta_p_x: dpx,
        delta_y: dy,
        delta_p_y: dpy,
        squeezed_x: below(dx),
        squeezed_p: below(dpx),
        delta_x_over_radius: radius.map(|r| dx * units.length[0] / r),
    })
}
