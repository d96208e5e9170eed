//! Logarithmic-energy functionals of a spectral measure.
//!
//! Everything here is driven by the principal-value Hilbert transform
//! `H mu(x) = p.v. ∫ d mu(y) / (x - y)`:
//!
//! - the conjugate field `Xi = 2 H mu` (the free analogue of the score),
//! - the Fisher functional `Phi* = ∫ Xi^2 d mu`,
//! - the double log-energy `∬ log|x - y| d mu d mu` and the entropy
//!   `chi = log-energy + 3/4 + (1/2) log(2 pi)`,
//! - the free energy `F = (1/2) ∫ x^2 d mu - log-energy`, minimized by the
//!   unit-variance semicircle.
//!
//! For a semicircle of variance s^2 these reduce to closed forms
//! (`H mu(x) = x / 2 s^2` inside the support, `Phi* = 1 / s^2`,
//! log-energy `= log s - 1/4`) which the tests pin against.

use rayon::prelude::*;
use serde::Serialize;

use crate::measure::GridMeasure;

/// chi = log-energy + CHI_OFFSET.
pub const CHI_OFFSET: f64 = 0.75 + 0.5 * 1.8378770664093453; // 3/4 + (1/2) log(2 pi)

/// Principal-value integral `p.v. ∫ d mu(y) / (x - y)` by singularity
/// subtraction.
///
/// Inside the grid the constant `rho(x)` is subtracted from the integrand
/// (its own p.v. integral is `log((x - x_min)/(x_max - x))`, added back
/// exactly); the remaining integrand is regular and handled by the midpoint
/// rule. Outside the grid the integrand is already regular. Finite for x
/// strictly inside the grid.
pub fn hilbert_transform(mu: &GridMeasure, x: f64) -> f64 {
    let dx = mu.dx();
    if x <= mu.x_min() || x >= mu.x_max() {
        return mu.cells().map(|(xj, rho)| rho / (x - xj)).sum::<f64>() * dx;
    }
    let rho_x = mu.density_at(x);
    // Slope of the interpolated density, for the removable point y = x.
    let h = 0.5 * dx;
    let slope = (mu.density_at(x + h) - mu.density_at(x - h)) / (2.0 * h);
    let mut acc = 0.0;
    for (xj, rho) in mu.cells() {
        let d = x - xj;
        if d.abs() < 1e-12 * dx.max(1.0) {
            acc += -slope;
        } else {
            acc += (rho - rho_x) / d;
        }
    }
    acc * dx + rho_x * ((x - mu.x_min()) / (mu.x_max() - x)).ln()
}

/// The conjugate field `Xi = 2 H mu` sampled at every cell center.
#[derive(Debug, Clone)]
pub struct ConjugateField {
    x_min: f64,
    x_max: f64,
    values: Vec<f64>,
    /// Set when the measure has an interior support gap wider than 10 cells;
    /// the p.v. quadrature loses accuracy there.
    pub gap_warning: bool,
}

impl ConjugateField {
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.values.len() as f64
    }

    /// Linear interpolation between cell centers; `None` outside their span.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let dx = self.dx();
        let u = (x - self.x_min) / dx - 0.5;
        if u < 0.0 || u > (self.values.len() - 1) as f64 {
            return None;
        }
        let i = (u.floor() as usize).min(self.values.len() - 2);
        let frac = u - i as f64;
        Some(self.values[i] + frac * (self.values[i + 1] - self.values[i]))
    }
}

fn has_support_gap(mu: &GridMeasure) -> bool {
    // Cells are "empty" relative to the mean density over the grid span.
    let threshold = 1e-8 / (mu.x_max() - mu.x_min());
    let rho = mu.density();
    let first = rho.iter().position(|&v| v > threshold);
    let last = rho.iter().rposition(|&v| v > threshold);
    let (Some(first), Some(last)) = (first, last) else {
        return true;
    };
    let mut run = 0usize;
    for &v in &rho[first..=last] {
        if v <= threshold {
            run += 1;
            if run > 10 {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

/// Conjugate field of a unit-mass measure: `Xi(x_i) = 2 H mu(x_i)`.
pub fn conjugate_variable(mu: &GridMeasure) -> ConjugateField {
    let values: Vec<f64> = (0..mu.n_cells())
        .into_par_iter()
        .map(|i| 2.0 * hilbert_transform(mu, mu.cell_center(i)))
        .collect();
    ConjugateField {
        x_min: mu.x_min(),
        x_max: mu.x_max(),
        values,
        gap_warning: has_support_gap(mu),
    }
}

/// The pairing `∫ x Xi(x) d mu(x)`; equals 1 for smooth unit-mass measures
/// (scalar integration by parts).
pub fn xi_pairing(mu: &GridMeasure, field: &ConjugateField) -> f64 {
    let dx = mu.dx();
    mu.cells()
        .zip(field.values())
        .map(|((x, rho), xi)| x * xi * rho)
        .sum::<f64>()
        * dx
}

/// Double quadrature of `∬ log|x - y| d mu(x) d mu(y)`.
///
/// The diagonal cell pair is replaced by the exact self-interaction of a
/// uniform density on one cell, `log(dx) - 3/2`, which removes the
/// `O(dx log dx)` bias of skipping the diagonal.
pub fn log_energy(mu: &GridMeasure) -> f64 {
    let dx = mu.dx();
    let n = mu.n_cells();
    let xs: Vec<f64> = (0..n).map(|i| mu.cell_center(i)).collect();
    let w: Vec<f64> = mu.density().iter().map(|&rho| rho * dx).collect();
    let diag = dx.ln() - 1.5;
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = w[i] * w[i] * diag;
            // Off-diagonal pairs counted once here, doubled below.
            let mut off = 0.0;
            for j in (i + 1)..n {
                off += w[j] * (xs[i] - xs[j]).abs().ln();
            }
            acc += 2.0 * w[i] * off;
            acc
        })
        .collect();
    partials.iter().sum()
}

/// Voiculescu-normalized entropy: log-energy plus `3/4 + (1/2) log(2 pi)`.
pub fn free_entropy_chi(mu: &GridMeasure) -> f64 {
    log_energy(mu) + CHI_OFFSET
}

/// Fisher functional `Phi* = ∫ Xi^2 d mu` with the support-gap flag from the
/// conjugate field.
pub fn free_fisher_flagged(mu: &GridMeasure) -> (f64, bool) {
    let field = conjugate_variable(mu);
    (fisher_from_field(mu, &field), field.gap_warning)
}

/// Fisher functional `Phi* = ∫ Xi^2 d mu`.
pub fn free_fisher(mu: &GridMeasure) -> f64 {
    free_fisher_flagged(mu).0
}

/// `∫ Xi^2 d mu` for an already-computed conjugate field.
pub fn fisher_from_field(mu: &GridMeasure, field: &ConjugateField) -> f64 {
    let dx = mu.dx();
    mu.cells()
        .zip(field.values())
        .map(|((_, rho), xi)| xi * xi * rho)
        .sum::<f64>()
        * dx
}

/// Free energy `F = (1/2) ∫ x^2 d mu - log-energy`; its unique minimizer is
/// the unit-variance centered semicircle.
pub fn free_energy(mu: &GridMeasure) -> f64 {
    0.5 * mu.moment(2) - log_energy(mu)
}

/// All scalar functionals of one measure. The identities
/// `chi = log_energy + 3/4 + (1/2) log(2 pi)` and
/// `free_energy = second_moment / 2 - log_energy` hold exactly by
/// construction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunctionalReport {
    pub log_energy: f64,
    pub chi: f64,
    pub fisher: f64,
    pub free_energy: f64,
    pub second_moment: f64,
}

pub fn functional_report(mu: &GridMeasure) -> FunctionalReport {
    let le = log_energy(mu);
    let m2 = mu.moment(2);
    FunctionalReport {
        log_energy: le,
        chi: le + CHI_OFFSET,
        fisher: free_fisher(mu),
        free_energy: 0.5 * m2 - le,
        second_moment: m2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{semicircle_to_grid, SemicircleParams};

    fn sc_grid(m: f64, var: f64) -> GridMeasure {
        semicircle_to_grid(SemicircleParams::new(m, var), 512, 0.5).unwrap()
    }

    #[test]
    fn hilbert_of_semicircle_is_linear_inside() {
        // H mu(x) = x / (2 sigma^2) inside the support.
        let g = sc_grid(0.0, 1.0);
        assert!((hilbert_transform(&g, 1.0) - 0.5).abs() < 1e-2);
        assert!(hilbert_transform(&g, 0.0).abs() < 1e-3);

        let g2 = sc_grid(0.0, 2.0);
        assert!((hilbert_transform(&g2, 1.0) - 0.25).abs() < 1e-2);
    }

    #[test]
    fn hilbert_outside_support_matches_stieltjes_tail() {
        // For |x| > 2 sigma the transform equals (x - sqrt(x^2 - 4 s^2))/(2 s^2).
        let g = sc_grid(0.0, 1.0);
        let x = 3.0;
        let expect = (x - (x * x - 4.0f64).sqrt()) / 2.0;
        assert!((hilbert_transform(&g, x) - expect).abs() < 2e-3);
    }

    #[test]
    fn conjugate_field_closed_forms() {
        let field = conjugate_variable(&sc_grid(0.0, 1.0));
        assert!((field.value_at(0.7).unwrap() - 0.7).abs() < 1e-2);
        assert!(!field.gap_warning);

        let field = conjugate_variable(&sc_grid(0.0, 4.0));
        assert!((field.value_at(1.0).unwrap() - 0.25).abs() < 1e-2);

        let field = conjugate_variable(&sc_grid(5.0, 1.0));
        assert!(field.value_at(5.0).unwrap().abs() < 1e-2);
    }

    #[test]
    fn pairing_identity_on_semicircles() {
        for (m, var) in [(0.0, 1.0), (0.0, 4.0), (2.0, 0.5), (-1.0, 2.0)] {
            let g = sc_grid(m, var);
            let field = conjugate_variable(&g);
            let p = xi_pairing(&g, &field);
            assert!((p - 1.0).abs() < 1e-2, "pairing {p} for SC({m},{var})");
        }
    }

    #[test]
    fn support_gap_warning() {
        // Two well-separated bumps with > 10 empty cells in between.
        let mut density = vec![0.0; 128];
        for v in &mut density[8..24] {
            *v = 1.0;
        }
        for v in &mut density[104..120] {
            *v = 1.0;
        }
        let g = GridMeasure::from_unnormalized(-2.0, 2.0, density).unwrap();
        let field = conjugate_variable(&g);
        assert!(field.gap_warning);
        let (_, flagged) = free_fisher_flagged(&g);
        assert!(flagged);
    }

    #[test]
    fn log_energy_of_semicircles() {
        // Classical log-potential of the unit-variance semicircle is -1/4.
        assert!((log_energy(&sc_grid(0.0, 1.0)) + 0.25).abs() < 5e-3);
        // Translation invariance is exact (identical pairwise distances).
        let a = log_energy(&sc_grid(0.0, 1.0));
        let b = log_energy(&sc_grid(5.0, 1.0));
        assert!((a - b).abs() < 1e-9);
        // Dilation adds log sigma.
        let c = log_energy(&sc_grid(0.0, 4.0));
        assert!((c - (-0.25 + 2.0f64.ln())).abs() < 5e-3);
    }

    #[test]
    fn chi_values_and_identities() {
        let chi1 = free_entropy_chi(&sc_grid(0.0, 1.0));
        let expect = 0.5 + 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((chi1 - expect).abs() < 5e-3);

        // Dilation identity chi(D_c mu) = chi(mu) + log c.
        let g = sc_grid(0.0, 1.0);
        let chi2 = free_entropy_chi(&g.dilate(2.0));
        assert!((chi2 - chi1 - 2.0f64.ln()).abs() < 5e-3);

        // Translation invariance.
        let chi3 = free_entropy_chi(&sc_grid(2.0, 1.0));
        assert!((chi3 - chi1).abs() < 1e-6);
    }

    #[test]
    fn fisher_closed_forms() {
        assert!((free_fisher(&sc_grid(0.0, 1.0)) - 1.0).abs() < 2e-2);
        assert!((free_fisher(&sc_grid(0.0, 4.0)) - 0.25).abs() < 1e-2);
        assert!((free_fisher(&sc_grid(3.0, 1.0)) - 1.0).abs() < 2e-2);
    }

    #[test]
    fn fisher_dilation_scaling() {
        let g = sc_grid(0.0, 1.0);
        let f1 = free_fisher(&g);
        let f2 = free_fisher(&g.dilate(2.0));
        assert!((f2 - f1 / 4.0).abs() < 2e-2);
        assert!(f1 >= 0.0 && f2 >= 0.0);
    }

    #[test]
    fn free_energy_values_and_minimizer() {
        assert!((free_energy(&sc_grid(0.0, 1.0)) - 0.75).abs() < 1e-2);
        let expect = 2.25 - 2.0f64.ln();
        assert!((free_energy(&sc_grid(0.0, 4.0)) - expect).abs() < 1e-2);

        // F(SC(0, s^2)) = s^2/2 + 1/4 - log s attains its minimum at s^2 = 1.
        let grid: Vec<f64> = (0..40).map(|i| 0.25 + i as f64 * (4.0 - 0.25) / 39.0).collect();
        let energies: Vec<f64> = grid.iter().map(|&v| free_energy(&sc_grid(0.0, v))).collect();
        let argmin = grid[energies
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0];
        let step = (4.0 - 0.25) / 39.0;
        assert!((argmin - 1.0).abs() <= step + 1e-9, "argmin at {argmin}");
    }

    #[test]
    fn report_identities_exact() {
        let r = functional_report(&sc_grid(0.3, 1.3));
        assert_eq!(r.chi, r.log_energy + CHI_OFFSET);
        assert_eq!(r.free_energy, r.second_moment / 2.0 - r.log_energy);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["log_energy", "chi", "fisher", "free_energy", "second_moment"] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }
}
