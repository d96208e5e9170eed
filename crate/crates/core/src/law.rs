//! Initial-law descriptors shared by the flows, the matrix Monte Carlo, and
//! the experiment runner.

use crate::convolve::{smooth_atoms_to_grid, AtomicLaw};
use crate::error::{Error, Result};
use crate::measure::{semicircle_to_grid, GridMeasure, SemicircleParams};

/// Heat-smoothing variance applied when an atomic law must be realized as a
/// density. Atoms have infinite Fisher information; a short free heat step
/// regularizes them before any grid-based pipeline runs.
pub const ATOM_SMOOTHING_VAR: f64 = 0.01;

/// Grid padding used when realizing laws as densities.
pub const DEFAULT_PADDING: f64 = 0.5;

#[derive(Debug, Clone)]
pub enum InitialLaw {
    Semicircle { center: f64, variance: f64 },
    Dirac { a: f64 },
    /// Equal weights at -1 and +1.
    TwoAtom,
    /// Arbitrary weighted atoms.
    Mixture(Vec<(f64, f64)>),
    Grid(GridMeasure),
}

impl InitialLaw {
    /// Parse a textual descriptor:
    /// `semicircle:M,VAR`, `dirac:A`, `two_atom`, `mixture:P@W,P@W,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "two_atom" {
            return Ok(Self::TwoAtom);
        }
        let (kind, args) = text
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("unknown initial law '{text}'")))?;
        let parse_f64 = |s: &str, what: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{what}: expected a number, got '{s}'")))
        };
        match kind {
            "semicircle" => {
                let (m, v) = args.split_once(',').ok_or_else(|| {
                    Error::Config("semicircle law needs 'semicircle:CENTER,VARIANCE'".into())
                })?;
                let variance = parse_f64(v, "semicircle variance")?;
                if variance <= 0.0 {
                    return Err(Error::Config("semicircle variance must be positive".into()));
                }
                Ok(Self::Semicircle {
                    center: parse_f64(m, "semicircle center")?,
                    variance,
                })
            }
            "dirac" => Ok(Self::Dirac { a: parse_f64(args, "dirac position")? }),
            "mixture" => {
                let mut atoms = Vec::new();
                for part in args.split(',') {
                    let (p, w) = part.split_once('@').ok_or_else(|| {
                        Error::Config("mixture atoms use 'POSITION@WEIGHT'".into())
                    })?;
                    atoms.push((parse_f64(p, "atom position")?, parse_f64(w, "atom weight")?));
                }
                AtomicLaw::new(atoms.clone())?;
                Ok(Self::Mixture(atoms))
            }
            _ => Err(Error::Config(format!("unknown initial law kind '{kind}'"))),
        }
    }

    /// Short label for filenames and reports.
    pub fn label(&self) -> String {
        match self {
            Self::Semicircle { center, variance } => format!("semicircle({center},{variance})"),
            Self::Dirac { a } => format!("dirac({a})"),
            Self::TwoAtom => "two_atom".into(),
            Self::Mixture(atoms) => format!("mixture({} atoms)", atoms.len()),
            Self::Grid(_) => "grid".into(),
        }
    }

    /// The atoms of a purely atomic law, if any.
    pub fn atoms(&self) -> Option<AtomicLaw> {
        match self {
            Self::Dirac { a } => Some(AtomicLaw::dirac(*a)),
            Self::TwoAtom => Some(AtomicLaw::new(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()),
            Self::Mixture(atoms) => AtomicLaw::new(atoms.clone()).ok(),
            _ => None,
        }
    }

    /// Realize the law as a unit-mass density. Atomic laws are smoothed by
    /// the free heat step of variance [`ATOM_SMOOTHING_VAR`].
    pub fn to_grid(&self, n_cells: usize) -> Result<GridMeasure> {
        match self {
            Self::Semicircle { center, variance } => semicircle_to_grid(
                SemicircleParams::new(*center, *variance),
                n_cells,
                DEFAULT_PADDING,
            ),
            Self::Grid(g) => Ok(g.clone()),
            _ => {
                let atoms = self.atoms().expect("atomic variants have atoms");
                smooth_atoms_to_grid(&atoms, ATOM_SMOOTHING_VAR, n_cells, DEFAULT_PADDING)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_descriptors() {
        assert!(matches!(
            InitialLaw::parse("semicircle:0,4").unwrap(),
            InitialLaw::Semicircle { center, variance } if center == 0.0 && variance == 4.0
        ));
        assert!(matches!(
            InitialLaw::parse("dirac:1").unwrap(),
            InitialLaw::Dirac { a } if a == 1.0
        ));
        assert!(matches!(InitialLaw::parse("two_atom").unwrap(), InitialLaw::TwoAtom));
        let mix = InitialLaw::parse("mixture:-1@0.3,0.5@0.7").unwrap();
        assert!(matches!(mix, InitialLaw::Mixture(ref a) if a.len() == 2));

        assert!(InitialLaw::parse("gaussian:0,1").is_err());
        assert!(InitialLaw::parse("semicircle:0,-1").is_err());
        assert!(InitialLaw::parse("dirac:abc").is_err());
    }

    #[test]
    fn atomic_laws_smooth_to_unit_mass() {
        let g = InitialLaw::TwoAtom.to_grid(512).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-9);
        assert!(g.mean().abs() < 1e-3);
        // Two narrow bumps at +-1: variance 1 + smoothing.
        assert!((g.variance() - (1.0 + ATOM_SMOOTHING_VAR)).abs() < 5e-3);

        let d = InitialLaw::Dirac { a: 1.0 }.to_grid(512).unwrap();
        assert!((d.mean() - 1.0).abs() < 1e-3);
        assert!((d.variance() - ATOM_SMOOTHING_VAR).abs() < 2e-3);
    }
}
