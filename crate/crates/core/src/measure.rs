//! Discrete probability measures on `[-1, 1]` with finite support.
//!
//! Atoms are stored in ascending position order. The stability numbers index
//! atoms in *descending* position order (`t_1` is the rightmost atom), so that
//! view is only available through [`DiscreteMeasure::descending`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights must sum to one within this tolerance unless renormalization is requested.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "t")]
    pub position: f64,
    #[serde(rename = "p")]
    pub weight: f64,
}

impl Atom {
    pub fn new(position: f64, weight: f64) -> Self {
        Atom { position, weight }
    }
}

impl From<(f64, f64)> for Atom {
    fn from((position, weight): (f64, f64)) -> Self {
        Atom { position, weight }
    }
}

/// A probability measure with finitely many atoms in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

/// JSON form of a measure: `{"atoms": [{"t": -1.0, "p": 0.5}, ...], "renormalize": false}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub renormalize: bool,
}

impl TryFrom<MeasureSpec> for DiscreteMeasure {
    type Error = Error;

    fn try_from(spec: MeasureSpec) -> Result<Self> {
        DiscreteMeasure::new(spec.atoms, spec.renormalize)
    }
}

impl From<DiscreteMeasure> for MeasureSpec {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureSpec {
            atoms: m.atoms,
            renormalize: false,
        }
    }
}

impl DiscreteMeasure {
    /// Validates and sorts `atoms`. With `renormalize` set the weights are
    /// divided by their sum; otherwise they must already sum to 1.
    pub fn new<I, A>(atoms: I, renormalize: bool) -> Result<Self>
    where
        I: IntoIterator<Item = A>,
        A: Into<Atom>,
    {
        let mut atoms: Vec<Atom> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for a in &atoms {
            if !a.position.is_finite() || a.position.abs() > 1.0 {
                return Err(Error::PositionOutOfRange(a.position));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::NonpositiveWeight(a.weight));
            }
        }
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        if let Some(w) = atoms.windows(2).find(|w| w[0].position == w[1].position) {
            return Err(Error::DuplicatePosition(w[0].position));
        }

        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if renormalize {
            for a in &mut atoms {
                a.weight /= total;
            }
        } else if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::WeightsNotNormalized(total));
        }
        Ok(DiscreteMeasure { atoms })
    }

    /// Equal point masses at -1 and +1: `f_α(x) = (f(x+α) + f(x-α)) / 2`.
    pub fn arithmetic() -> Self {
        DiscreteMeasure {
            atoms: vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)],
        }
    }

    /// A unit point mass at `position`.
    pub fn point_mass(position: f64) -> Result<Self> {
        DiscreteMeasure::new([(position, 1.0)], false)
    }

    /// Atoms in ascending position order.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Support size `k`.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms in descending position order, so that element `j - 1` is
    /// `(t_j, p_j)` with `t_k < ... < t_1`.
    pub fn descending(&self) -> Vec<Atom> {
        self.atoms.iter().rev().copied().collect()
    }

    /// Largest `|t_i|`, the factor by which averaging widens a window.
    pub fn max_abs_position(&self) -> f64 {
        self.atoms.iter().map(|a| a.position.abs()).fold(0.0, f64::max)
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_measure_has_two_halves() {
        let m = DiscreteMeasure::new([(-1.0, 0.5), (1.0, 0.5)], false).unwrap();
        assert_eq!(m, DiscreteMeasure::arithmetic());
        assert_eq!(m.len(), 2);
        let desc = m.descending();
        assert_eq!(desc[0].weight, 0.5);
        assert_eq!(desc[1].weight, 0.5);
    }

    #[test]
    fn single_atom_is_valid() {
        let m = DiscreteMeasure::new([(0.3, 1.0)], false).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.descending(), vec![Atom::new(0.3, 1.0)]);
    }

    #[test]
    fn unnormalized_weights_are_rejected() {
        let err = DiscreteMeasure::new([(-1.0, 0.3), (1.0, 0.8)], false).unwrap_err();
        assert!(matches!(err, Error::WeightsNotNormalized(s) if (s - 1.1).abs() < 1e-12));
        let m = DiscreteMeasure::new([(-1.0, 0.3), (1.0, 0.8)], true).unwrap();
        assert!((m.total_weight() - 1.0).abs() < 1e-15);
        assert!((m.atoms()[0].weight - 0.3 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn invalid_atoms_are_rejected() {
        assert!(matches!(
            DiscreteMeasure::new([(1.5, 1.0)], false),
            Err(Error::PositionOutOfRange(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new([(0.0, 0.5), (0.0, 0.5)], false),
            Err(Error::DuplicatePosition(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new([(0.0, 1.0), (0.5, 0.0)], false),
            Err(Error::NonpositiveWeight(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new(Vec::<Atom>::new(), false),
            Err(Error::EmptyMeasure)
        ));
    }

    #[test]
    fn descending_reverses_storage() {
        let m = DiscreteMeasure::new([(1.0, 0.7), (-1.0, 0.3)], false).unwrap();
        assert_eq!(m.descending(), vec![Atom::new(1.0, 0.7), Atom::new(-1.0, 0.3)]);

        let m = DiscreteMeasure::new([(-1.0, 0.25), (0.0, 0.25), (1.0, 0.5)], false).unwrap();
        assert_eq!(
            m.descending(),
            vec![Atom::new(1.0, 0.5), Atom::new(0.0, 0.25), Atom::new(-1.0, 0.25)]
        );
        let mut back = m.descending();
        back.reverse();
        assert_eq!(back, m.atoms());
    }

    #[test]
    fn construction_is_idempotent() {
        let m = DiscreteMeasure::new([(0.2, 0.1), (-0.4, 0.6), (0.9, 0.3)], true).unwrap();
        let again = DiscreteMeasure::new(m.atoms().to_vec(), false).unwrap();
        assert_eq!(m, again);
        let renorm = DiscreteMeasure::new(m.atoms().to_vec(), true).unwrap();
        for (a, b) in m.atoms().iter().zip(renorm.atoms()) {
            assert!((a.weight - b.weight).abs() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip_validates() {
        let m: DiscreteMeasure =
            serde_json::from_str(r#"{"atoms":[{"t":1.0,"p":0.7},{"t":-1.0,"p":0.3}],"renormalize":false}"#).unwrap();
        assert_eq!(m.atoms()[0], Atom::new(-1.0, 0.3));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<DiscreteMeasure>(&s).unwrap(), m);
        assert!(serde_json::from_str::<DiscreteMeasure>(r#"{"atoms":[{"t":2.0,"p":1.0}]}"#).is_err());
    }
}
