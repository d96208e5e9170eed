//! Spectral-measure representations and the quantile Wasserstein distance.
//!
//! Two interchangeable discretizations are used throughout:
//!
//! - [`GridMeasure`]: a nonnegative density sampled at cell centers of a
//!   uniform grid, total mass 1. The workhorse for quadrature (moments,
//!   logarithmic energy, Hilbert transforms).
//! - [`ParticleMeasure`]: sorted equal-weight atoms, i.e. a quantile
//!   representation. The workhorse for transport distances and particle
//!   flows.
//!
//! The 2-Wasserstein distance between one-dimensional laws reduces to the
//! L2 distance of quantile functions, `W2^2 = ∫_0^1 (Q_mu - Q_nu)^2 du`,
//! which both representations expose through [`QuantileFn`].

use crate::error::{Error, Result};

/// Mass must match 1 to this tolerance for a valid measure.
pub const MASS_TOL: f64 = 1e-9;

/// Number of quantile samples used by [`w2`] when no exact pairing applies.
const W2_SAMPLES: usize = 8192;

/// Parameters of a semicircle family member: center m and variance sigma^2.
///
/// Variance 0 denotes the Dirac mass at the center; it carries no density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemicircleParams {
    pub center: f64,
    pub variance: f64,
}

impl SemicircleParams {
    pub fn new(center: f64, variance: f64) -> Self {
        assert!(variance >= 0.0, "variance must be nonnegative");
        Self { center, variance }
    }

    /// Standard deviation sigma; the support is [m - 2 sigma, m + 2 sigma].
    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn support(&self) -> (f64, f64) {
        let r = 2.0 * self.sigma();
        (self.center - r, self.center + r)
    }

    /// Density (1 / 2 pi sigma^2) sqrt(4 sigma^2 - (x - m)^2) on the support,
    /// zero outside.
    pub fn density(&self, x: f64) -> Result<f64> {
        if self.variance <= 0.0 {
            return Err(Error::DegenerateSemicircle);
        }
        let d = x - self.center;
        let disc = 4.0 * self.variance - d * d;
        if disc <= 0.0 {
            return Ok(0.0);
        }
        Ok(disc.sqrt() / (2.0 * std::f64::consts::PI * self.variance))
    }
}

/// Closed-form distance within the semicircle family:
/// `W2(SC(m1, s1^2), SC(m2, s2^2)) = sqrt((m1 - m2)^2 + (s1 - s2)^2)`.
pub fn w2_semicircle(a: SemicircleParams, b: SemicircleParams) -> f64 {
    let dm = a.center - b.center;
    let ds = a.sigma() - b.sigma();
    (dm * dm + ds * ds).sqrt()
}

/// Density values at the centers of a uniform grid, unit total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    x_min: f64,
    x_max: f64,
    density: Vec<f64>,
}

impl GridMeasure {
    /// Validating constructor: bounds ordered, at least 8 cells, nonnegative
    /// finite density, total mass within [`MASS_TOL`] of 1.
    pub fn new(x_min: f64, x_max: f64, density: Vec<f64>) -> Result<Self> {
        let m = Self::from_unnormalized_raw(x_min, x_max, density, false)?;
        let mass = m.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized { mass });
        }
        Ok(m)
    }

    /// Constructor that rescales the density to unit mass.
    pub fn from_unnormalized(x_min: f64, x_max: f64, density: Vec<f64>) -> Result<Self> {
        Self::from_unnormalized_raw(x_min, x_max, density, true)
    }

    fn from_unnormalized_raw(
        x_min: f64,
        x_max: f64,
        mut density: Vec<f64>,
        renormalize: bool,
    ) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if density.len() < 8 {
            return Err(Error::InvalidMeasure(format!(
                "need at least 8 cells, got {}",
                density.len()
            )));
        }
        for (i, &v) in density.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "density[{i}] = {v} is negative or non-finite"
                )));
            }
        }
        if renormalize {
            let dx = (x_max - x_min) / density.len() as f64;
            let mass: f64 = density.iter().sum::<f64>() * dx;
            if mass <= 0.0 || !mass.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "cannot normalize: total mass {mass}"
                )));
            }
            for v in &mut density {
                *v /= mass;
            }
        }
        Ok(Self { x_min, x_max, density })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.density.len()
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.density.len() as f64
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    /// Iterator over (cell center, density value).
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let dx = self.dx();
        self.density
            .iter()
            .enumerate()
            .map(move |(i, &rho)| (self.x_min + (i as f64 + 0.5) * dx, rho))
    }

    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.dx()
    }

    /// Density linearly interpolated between cell centers, zero outside.
    pub fn density_at(&self, x: f64) -> f64 {
        let dx = self.dx();
        let u = (x - self.x_min) / dx - 0.5;
        if u <= -1.0 || u >= self.density.len() as f64 {
            return 0.0;
        }
        let i = u.floor();
        let frac = u - i;
        let lo = if i < 0.0 { 0.0 } else { self.density[i as usize] };
        let hi = if i + 1.0 >= self.density.len() as f64 {
            0.0
        } else {
            self.density[i as usize + 1]
        };
        lo + frac * (hi - lo)
    }

    /// k-th raw moment by midpoint quadrature. Requires k <= 12.
    pub fn moment(&self, k: u32) -> f64 {
        assert!(k <= 12, "moments above order 12 are not supported");
        let dx = self.dx();
        self.cells().map(|(x, rho)| x.powi(k as i32) * rho).sum::<f64>() * dx
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    /// CDF values at the n+1 cell boundaries, rescaled to end exactly at 1.
    fn boundary_cdf(&self) -> Vec<f64> {
        let dx = self.dx();
        let mut cdf = Vec::with_capacity(self.density.len() + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for &rho in &self.density {
            acc += rho * dx;
            cdf.push(acc);
        }
        if acc > 0.0 {
            for v in &mut cdf {
                *v /= acc;
            }
        }
        cdf
    }

    /// Quantiles at levels (i - 1/2)/n, i = 1..n, by linear CDF interpolation.
    pub fn quantiles(&self, n: usize) -> Vec<f64> {
        let cdf = self.boundary_cdf();
        let dx = self.dx();
        let mut out = Vec::with_capacity(n);
        let mut j = 0usize;
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            while j + 1 < cdf.len() - 1 && cdf[j + 1] < u {
                j += 1;
            }
            let cell_mass = cdf[j + 1] - cdf[j];
            let frac = if cell_mass > 0.0 { (u - cdf[j]) / cell_mass } else { 1.0 };
            out.push(self.x_min + (j as f64 + frac.clamp(0.0, 1.0)) * dx);
        }
        out
    }

    /// Quantile particles at levels (i - 1/2)/N. Errors on a non-normalized
    /// input.
    pub fn to_particles(&self, n: usize) -> Result<ParticleMeasure> {
        let mass = self.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized { mass });
        }
        ParticleMeasure::new(self.quantiles(n))
    }

    /// Shift the grid coordinates by c (exact translation, no resampling).
    pub fn translate(&self, c: f64) -> Self {
        Self {
            x_min: self.x_min + c,
            x_max: self.x_max + c,
            density: self.density.clone(),
        }
    }

    /// Pushforward under x -> c x for c > 0 (exact coordinate rescaling).
    pub fn dilate(&self, c: f64) -> Self {
        assert!(c > 0.0, "dilation factor must be positive");
        Self {
            x_min: c * self.x_min,
            x_max: c * self.x_max,
            density: self.density.iter().map(|&rho| rho / c).collect(),
        }
    }

    /// CSV serialization: header `x,density`, one row per cell center,
    /// 17 significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("x,density\n");
        for (x, rho) in self.cells() {
            s.push_str(&format!("{x:.16e},{rho:.16e}\n"));
        }
        s
    }

    /// Parse the `x,density` CSV produced by [`Self::to_csv_string`]. The
    /// grid geometry is recovered from the first two cell centers.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut rho = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 {
                if line != "x,density" {
                    return Err(Error::Parse(format!(
                        "expected header 'x,density', got '{line}'"
                    )));
                }
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| {
                Error::Parse(format!("line {}: expected 'x,density' pair", lineno + 1))
            })?;
            xs.push(a.trim().parse::<f64>().map_err(|e| {
                Error::Parse(format!("line {}: bad x value: {e}", lineno + 1))
            })?);
            rho.push(b.trim().parse::<f64>().map_err(|e| {
                Error::Parse(format!("line {}: bad density value: {e}", lineno + 1))
            })?);
        }
        if xs.len() < 8 {
            return Err(Error::Parse(format!("need at least 8 rows, got {}", xs.len())));
        }
        let dx = xs[1] - xs[0];
        if dx <= 0.0 {
            return Err(Error::Parse("cell centers must be increasing".into()));
        }
        Self::from_unnormalized(xs[0] - 0.5 * dx, xs[xs.len() - 1] + 0.5 * dx, rho)
    }
}

/// Sorted equal-weight atoms; the i-th position is the quantile at level
/// (i - 1/2)/N.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleMeasure {
    positions: Vec<f64>,
}

impl ParticleMeasure {
    /// Sorts the positions; requires N >= 2 and finite entries.
    pub fn new(mut positions: Vec<f64>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidMeasure(format!(
                "need at least 2 particles, got {}",
                positions.len()
            )));
        }
        if positions.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite particle position".into()));
        }
        positions.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn moment(&self, k: u32) -> f64 {
        assert!(k <= 12, "moments above order 12 are not supported");
        let n = self.positions.len() as f64;
        self.positions.iter().map(|x| x.powi(k as i32)).sum::<f64>() / n
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    /// Grid measure whose quantile function interpolates the particles.
    ///
    /// The CDF is taken piecewise linear through (x_i, (i - 1/2)/N) with the
    /// end knots extended by half the adjacent spacing, then sampled at the
    /// cell boundaries of a uniform grid spanning the knots.
    pub fn to_grid(&self, n_cells: usize) -> Result<GridMeasure> {
        let xs = &self.positions;
        let n = xs.len();
        let lo = xs[0] - 0.5 * (xs[1] - xs[0]);
        let hi = xs[n - 1] + 0.5 * (xs[n - 1] - xs[n - 2]);
        if !(lo < hi) {
            return Err(Error::InvalidMeasure(
                "particles are too degenerate to regrid".into(),
            ));
        }
        // Knots of the piecewise-linear CDF.
        let mut knot_x = Vec::with_capacity(n + 2);
        let mut knot_u = Vec::with_capacity(n + 2);
        knot_x.push(lo);
        knot_u.push(0.0);
        for (i, &x) in xs.iter().enumerate() {
            knot_x.push(x);
            knot_u.push((i as f64 + 0.5) / n as f64);
        }
        knot_x.push(hi);
        knot_u.push(1.0);

        let cdf_at = |x: f64, hint: &mut usize| -> f64 {
            if x <= knot_x[0] {
                return 0.0;
            }
            if x >= knot_x[knot_x.len() - 1] {
                return 1.0;
            }
            while *hint + 1 < knot_x.len() && knot_x[*hint + 1] < x {
                *hint += 1;
            }
            let (x0, x1) = (knot_x[*hint], knot_x[*hint + 1]);
            let (u0, u1) = (knot_u[*hint], knot_u[*hint + 1]);
            if x1 > x0 {
                u0 + (u1 - u0) * (x - x0) / (x1 - x0)
            } else {
                u1
            }
        };

        let dx = (hi - lo) / n_cells as f64;
        let mut hint = 0usize;
        let mut prev = 0.0;
        let mut density = Vec::with_capacity(n_cells);
        for i in 0..n_cells {
            let b = lo + (i as f64 + 1.0) * dx;
            let c = cdf_at(b, &mut hint);
            density.push(((c - prev) / dx).max(0.0));
            prev = c;
        }
        GridMeasure::from_unnormalized(lo, hi, density)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("position\n");
        for x in &self.positions {
            s.push_str(&format!("{x:.16e}\n"));
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 {
                if line != "position" {
                    return Err(Error::Parse(format!(
                        "expected header 'position', got '{line}'"
                    )));
                }
                continue;
            }
            positions.push(line.parse::<f64>().map_err(|e| {
                Error::Parse(format!("line {}: bad position: {e}", lineno + 1))
            })?);
        }
        Self::new(positions)
    }
}

/// Quantile function access shared by both representations.
pub trait QuantileFn {
    /// Left-continuous generalized inverse of the CDF at level u in (0, 1).
    fn quantile(&self, u: f64) -> f64;
}

impl QuantileFn for GridMeasure {
    fn quantile(&self, u: f64) -> f64 {
        // One-off evaluation; bulk callers should use `quantiles`.
        let cdf = self.boundary_cdf();
        let dx = self.dx();
        let u = u.clamp(0.0, 1.0);
        let j = match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(j) => j.min(cdf.len() - 2),
            Err(j) => j.saturating_sub(1).min(cdf.len() - 2),
        };
        let cell_mass = cdf[j + 1] - cdf[j];
        let frac = if cell_mass > 0.0 { (u - cdf[j]) / cell_mass } else { 1.0 };
        self.x_min + (j as f64 + frac.clamp(0.0, 1.0)) * dx
    }
}

impl QuantileFn for ParticleMeasure {
    fn quantile(&self, u: f64) -> f64 {
        let n = self.positions.len();
        let i = ((u * n as f64).floor() as usize).min(n - 1);
        self.positions[i]
    }
}

fn quantile_samples(m: &impl QuantileFn, n: usize) -> Vec<f64> {
    (0..n).map(|i| m.quantile((i as f64 + 0.5) / n as f64)).collect()
}

/// Object-safe adapter so `w2` can mix representations without generics
/// leaking into every caller.
pub trait AnyMeasure {
    fn bulk_quantiles(&self, n: usize) -> Vec<f64>;
    fn particle_positions(&self) -> Option<&[f64]>;
}

impl AnyMeasure for GridMeasure {
    fn bulk_quantiles(&self, n: usize) -> Vec<f64> {
        self.quantiles(n)
    }

    fn particle_positions(&self) -> Option<&[f64]> {
        None
    }
}

impl AnyMeasure for ParticleMeasure {
    fn bulk_quantiles(&self, n: usize) -> Vec<f64> {
        quantile_samples(self, n)
    }

    fn particle_positions(&self) -> Option<&[f64]> {
        Some(&self.positions)
    }
}

/// 2-Wasserstein distance via matched quantiles.
///
/// Equal-size particle measures pair exactly; every other combination is
/// sampled at [`W2_SAMPLES`] midpoint levels of both quantile functions.
pub fn w2(mu: &dyn AnyMeasure, nu: &dyn AnyMeasure) -> f64 {
    if let (Some(a), Some(b)) = (mu.particle_positions(), nu.particle_positions()) {
        if a.len() == b.len() {
            let n = a.len() as f64;
            let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            return (ss / n).sqrt();
        }
    }
    let qa = mu.bulk_quantiles(W2_SAMPLES);
    let qb = nu.bulk_quantiles(W2_SAMPLES);
    let ss: f64 = qa.iter().zip(&qb).map(|(x, y)| (x - y) * (x - y)).sum();
    (ss / W2_SAMPLES as f64).sqrt()
}

/// Cell-centered semicircle density renormalized to unit mass.
///
/// The grid spans the support extended by `padding` on both sides.
pub fn semicircle_to_grid(
    p: SemicircleParams,
    n_cells: usize,
    padding: f64,
) -> Result<GridMeasure> {
    if p.variance <= 0.0 {
        return Err(Error::DegenerateSemicircle);
    }
    assert!(padding >= 0.0, "padding must be nonnegative");
    let (lo, hi) = p.support();
    let (x_min, x_max) = (lo - padding, hi + padding);
    let dx = (x_max - x_min) / n_cells as f64;
    let density: Result<Vec<f64>> = (0..n_cells)
        .map(|i| p.density(x_min + (i as f64 + 0.5) * dx))
        .collect();
    GridMeasure::from_unnormalized(x_min, x_max, density?)
}
