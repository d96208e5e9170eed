//! Free additive convolution with a semicircle via Stieltjes subordination.
//!
//! For `nu = mu ⊞ SC(0, s)` the Stieltjes transform `G = G_nu` solves the
//! subordination fixed point
//!
//! ```text
//! G(z) = G_mu(z - s G(z)),     Im z > 0,
//! ```
//!
//! solved here per evaluation point by damped Picard iteration (damping 0.5,
//! cap 500 iterations, tolerance 1e-10 in G) started from the G-value of the
//! moment-matched semicircle. The density is recovered by Stieltjes
//! inversion `rho(x) = -(1/pi) Im G(x + i eps)` with `eps = dx/2`, refined
//! by one Richardson step in eps: the Poisson kernel smooths the density at
//! first order in eps, so `2 rho_{eps/2} - rho_eps` cancels the leading
//! bias (without it the recovered variance is inflated by the kernel tails
//! beyond quadrature tolerance).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::GridMeasure;

const DAMPING: f64 = 0.5;
const MAX_ITERS: usize = 500;
const G_TOL: f64 = 1e-10;

/// Anything with an evaluable Stieltjes transform `G(z) = ∫ d mu(y)/(z - y)`.
pub trait StieltjesSource: Sync {
    fn g_at(&self, z: Complex64) -> Complex64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
    /// Hull of the support, used to size output grids.
    fn support_hull(&self) -> (f64, f64);
}

impl StieltjesSource for GridMeasure {
    fn g_at(&self, z: Complex64) -> Complex64 {
        let dx = self.dx();
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, rho) in self.cells() {
            acc += rho / (z - x);
        }
        acc * dx
    }

    fn mean(&self) -> f64 {
        GridMeasure::mean(self)
    }

    fn variance(&self) -> f64 {
        GridMeasure::variance(self)
    }

    fn support_hull(&self) -> (f64, f64) {
        (self.x_min(), self.x_max())
    }
}

/// A finite weighted sum of point masses.
#[derive(Debug, Clone)]
pub struct AtomicLaw {
    atoms: Vec<(f64, f64)>,
}

impl AtomicLaw {
    /// Atoms as (position, weight); weights are rescaled to sum to 1.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("atomic law needs at least one atom".into()));
        }
        let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if !(total > 0.0) || atoms.iter().any(|&(x, w)| !x.is_finite() || w < 0.0) {
            return Err(Error::InvalidMeasure("atom weights must be nonnegative with positive sum".into()));
        }
        Ok(Self {
            atoms: atoms.into_iter().map(|(x, w)| (x, w / total)).collect(),
        })
    }

    pub fn dirac(a: f64) -> Self {
        Self { atoms: vec![(a, 1.0)] }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Positions scaled by c (pushforward under x -> c x).
    pub fn dilate(&self, c: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|&(x, w)| (c * x, w)).collect(),
        }
    }
}

impl StieltjesSource for AtomicLaw {
    fn g_at(&self, z: Complex64) -> Complex64 {
        self.atoms.iter().map(|&(x, w)| w / (z - x)).sum()
    }

    fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * x).sum()
    }

    fn variance(&self) -> f64 {
        let m = StieltjesSource::mean(self);
        self.atoms.iter().map(|&(x, w)| w * (x - m) * (x - m)).sum()
    }

    fn support_hull(&self) -> (f64, f64) {
        let lo = self.atoms.iter().map(|&(x, _)| x).fold(f64::INFINITY, f64::min);
        let hi = self.atoms.iter().map(|&(x, _)| x).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Stieltjes transform of SC(m, var), with the branch making G ~ 1/z at
/// infinity and Im G < 0 on the upper half-plane. var = 0 is the point mass.
pub fn semicircle_g(z: Complex64, center: f64, variance: f64) -> Complex64 {
    let w = z - center;
    if variance <= 0.0 {
        return 1.0 / w;
    }
    let mut root = (w * w - 4.0 * variance).sqrt();
    if (root.conj() * w).re < 0.0 {
        root = -root;
    }
    (w - root) / (2.0 * variance)
}

/// Solve `G = G_mu(z - s G)` at one point z in the upper half-plane.
pub fn subordinated_g(
    source: &dyn StieltjesSource,
    s_var: f64,
    z: Complex64,
) -> Result<Complex64> {
    let mut g = semicircle_g(z, source.mean(), source.variance() + s_var);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let next = source.g_at(z - s_var * g);
        let damped = (1.0 - DAMPING) * g + DAMPING * next;
        residual = (damped - g).norm();
        g = damped;
        if residual <= G_TOL {
            return Ok(g);
        }
    }
    Err(Error::FixedPointDiverged { x: z.re, residual })
}

/// Density of `source ⊞ SC(0, s_var)` on a fresh uniform grid.
///
/// The grid spans the source support hull extended by the semicircle radius
/// `2 sqrt(s_var)` plus `padding`. Output is renormalized to unit mass.
pub fn convolve_to_grid(
    source: &dyn StieltjesSource,
    s_var: f64,
    n_cells: usize,
    padding: f64,
) -> Result<GridMeasure> {
    assert!(s_var > 0.0, "semicircle variance must be positive");
    let (lo, hi) = source.support_hull();
    let r = 2.0 * s_var.sqrt();
    let (x_min, x_max) = (lo - r - padding, hi + r + padding);
    let dx = (x_max - x_min) / n_cells as f64;
    let eps = 0.5 * dx;
    let density: Result<Vec<f64>> = (0..n_cells)
        .into_par_iter()
        .map(|i| {
            let x = x_min + (i as f64 + 0.5) * dx;
            let g1 = subordinated_g(source, s_var, Complex64::new(x, eps))?;
            let g2 = subordinated_g(source, s_var, Complex64::new(x, 0.5 * eps))?;
            let rho1 = -g1.im / std::f64::consts::PI;
            let rho2 = -g2.im / std::f64::consts::PI;
            Ok((2.0 * rho2 - rho1).max(0.0))
        })
        .collect();
    GridMeasure::from_unnormalized(x_min, x_max, density?)
}

/// `mu0 ⊞ SC(0, s_var)` for a grid measure; same cell count as the input.
pub fn free_convolve_semicircle(mu0: &GridMeasure, s_var: f64) -> Result<GridMeasure> {
    convolve_to_grid(mu0, s_var, mu0.n_cells(), 0.0)
}

/// Regularize an atomic law into a grid measure by convolving with a small
/// semicircle of variance `heat_var` (free heat smoothing).
pub fn smooth_atoms_to_grid(
    law: &AtomicLaw,
    heat_var: f64,
    n_cells: usize,
    padding: f64,
) -> Result<GridMeasure> {
    convolve_to_grid(law, heat_var, n_cells, padding)
}
