//! Exact piecewise functions built from anchored power and cusp terms.
//!
//! Every piece is `constant + Σ term(x - anchor)` where the anchor is an
//! endpoint of the piece. A term is `c·|u|^e` (even) or `c·sgn(u)·|u|^e`
//! (odd), so one-sided derivative limits at the anchor have a closed form,
//! including the infinite limits produced by exponents below one.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;

/// Relative tolerance for the value match between adjacent pieces.
pub const CONTINUITY_TOL: f64 = 1e-12;
/// Interior sample count per finite piece for the monotonicity check.
pub const MONOTONE_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn flipped(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }
}

/// Which end of the real line a tail limit is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    NegInfinity,
    PosInfinity,
}

/// `coeff·|u|^exponent`, or `coeff·sgn(u)·|u|^exponent` when `signed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub exponent: f64,
    #[serde(default)]
    pub signed: bool,
}

impl Term {
    /// `coeff·|u|^exponent`.
    pub const fn even(coeff: f64, exponent: f64) -> Self {
        Term {
            coeff,
            exponent,
            signed: false,
        }
    }

    /// `coeff·sgn(u)·|u|^exponent`.
    pub const fn odd(coeff: f64, exponent: f64) -> Self {
        Term {
            coeff,
            exponent,
            signed: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(Error::InvalidTerm(format!(
                "exponent {} must be positive",
                self.exponent
            )));
        }
        if !self.coeff.is_finite() || self.coeff == 0.0 {
            return Err(Error::InvalidTerm(format!(
                "coefficient {} must be finite and nonzero",
                self.coeff
            )));
        }
        Ok(())
    }

    fn power(&self, u: f64) -> f64 {
        if self.exponent == 1.0 {
            u.abs()
        } else if self.exponent == 2.0 {
            u * u
        } else {
            u.abs().powf(self.exponent)
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        let p = self.coeff * self.power(u);
        if self.signed && u < 0.0 {
            -p
        } else {
            p
        }
    }

    /// Derivative at `u != 0`.
    fn derivative(&self, u: f64) -> f64 {
        let e = self.exponent;
        let magnitude = if e == 1.0 {
            1.0
        } else if e == 2.0 {
            2.0 * u.abs()
        } else {
            e * u.abs().powf(e - 1.0)
        };
        let d = self.coeff * magnitude;
        if !self.signed && u < 0.0 {
            -d
        } else {
            d
        }
    }

    /// Coefficient `κ` with `term'(u) ~ κ·e·|u|^(e-1)` as `u → 0` from `side`.
    fn side_coefficient(&self, side: Side) -> f64 {
        if self.signed {
            self.coeff
        } else {
            self.coeff * side.sign()
        }
    }

    /// Sign of the second derivative on the half-line where `sgn(u) = u_sign`.
    fn curvature_sign(&self, u_sign: f64) -> i8 {
        let e = self.exponent;
        if e == 1.0 {
            return 0;
        }
        let mut s = self.coeff.signum() * if e > 1.0 { 1.0 } else { -1.0 };
        if self.signed {
            s *= u_sign;
        }
        if s > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// One monotone piece of a [`FunctionModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub interval: (ExtendedReal, ExtendedReal),
    pub anchor: f64,
    #[serde(default)]
    pub constant: f64,
    pub terms: Vec<Term>,
}

impl Piece {
    pub fn new(left: ExtendedReal, right: ExtendedReal, anchor: f64, constant: f64, terms: Vec<Term>) -> Self {
        Piece {
            interval: (left, right),
            anchor,
            constant,
            terms,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let u = x - self.anchor;
        self.constant + self.terms.iter().map(|t| t.value(u)).sum::<f64>()
    }

    /// One-sided limit of the derivative at `x0`.
    ///
    /// Away from the anchor every term is smooth, so the limit is the
    /// derivative itself. At the anchor, terms with exponent below one blow
    /// up; among those the smallest exponent with a nonvanishing net
    /// coefficient decides the sign of the infinity.
    pub fn derivative_limit(&self, x0: f64, side: Side) -> ExtendedReal {
        let u = x0 - self.anchor;
        if u != 0.0 {
            return ExtendedReal::Finite(self.terms.iter().map(|t| t.derivative(u)).sum());
        }

        let mut finite = 0.0;
        let mut singular: Vec<(f64, f64)> = Vec::new();
        for t in &self.terms {
            let kappa = t.side_coefficient(side);
            if t.exponent > 1.0 {
                continue;
            } else if t.exponent == 1.0 {
                finite += kappa;
            } else {
                let weight = kappa * t.exponent;
                match singular.iter_mut().find(|(e, _)| *e == t.exponent) {
                    Some((_, w)) => *w += weight,
                    None => singular.push((t.exponent, weight)),
                }
            }
        }
        singular.sort_by(|a, b| a.0.total_cmp(&b.0));
        match singular.iter().find(|(_, w)| *w != 0.0) {
            Some((_, w)) if *w > 0.0 => ExtendedReal::PosInfinity,
            Some(_) => ExtendedReal::NegInfinity,
            None => ExtendedReal::Finite(finite),
        }
    }

    fn contains_anchor_side(&self) -> f64 {
        // sgn(x - anchor) throughout the open interval
        match self.interval {
            (ExtendedReal::Finite(a), _) if a == self.anchor => 1.0,
            (_, ExtendedReal::Finite(b)) if b == self.anchor => -1.0,
            _ => 0.0,
        }
    }

    /// Whether the derivative is certified strictly increasing on the open
    /// interval: every term has nonnegative curvature there and at least one
    /// term has positive curvature.
    pub fn derivative_strictly_increasing(&self) -> bool {
        let u_sign = self.contains_anchor_side();
        if u_sign == 0.0 {
            return false;
        }
        let signs: Vec<i8> = self.terms.iter().map(|t| t.curvature_sign(u_sign)).collect();
        signs.iter().all(|&s| s >= 0) && signs.iter().any(|&s| s > 0)
    }

    fn negated(&self) -> Piece {
        self.scaled(-1.0)
    }

    fn scaled(&self, c: f64) -> Piece {
        Piece {
            interval: self.interval,
            anchor: self.anchor,
            constant: c * self.constant,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: c * t.coeff,
                    ..*t
                })
                .collect(),
        }
    }

    /// Points used to check monotonicity, in increasing order.
    fn sample_points(&self) -> Vec<f64> {
        use ExtendedReal::*;
        let geometric = || (-8..=12).map(|i| 2f64.powi(i));
        match self.interval {
            (Finite(a), Finite(b)) => {
                let n = MONOTONE_SAMPLES + 1;
                let mut xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
                xs[n] = b;
                xs
            }
            (NegInfinity, Finite(b)) => {
                let mut xs: Vec<f64> = geometric().map(|d| b - d).collect();
                xs.reverse();
                xs.push(b);
                xs
            }
            (Finite(a), PosInfinity) => std::iter::once(a).chain(geometric().map(|d| a + d)).collect(),
            _ => {
                let mut xs: Vec<f64> = geometric().map(|d| self.anchor - d).collect();
                xs.reverse();
                xs.push(self.anchor);
                xs.extend(geometric().map(|d| self.anchor + d));
                xs
            }
        }
    }

    /// Direction of strict monotonicity, or `None` if sampling finds a
    /// violation in values or in the sign of the derivative.
    fn monotone_direction(&self) -> Option<Direction> {
        let xs = self.sample_points();
        let ys: Vec<f64> = xs.iter().map(|&x| self.value(x)).collect();
        let first = ys[0];
        let last = *ys.last()?;
        let dir = if last > first {
            Direction::Increasing
        } else if last < first {
            Direction::Decreasing
        } else {
            return None;
        };
        let want = if dir == Direction::Increasing { 1 } else { -1 };

        for w in ys.windows(2) {
            let ok = match dir {
                Direction::Increasing => w[1] > w[0],
                Direction::Decreasing => w[1] < w[0],
            };
            if !ok || w[0].is_nan() || w[1].is_nan() {
                return None;
            }
        }
        let n = xs.len();
        for (i, &x) in xs.iter().enumerate() {
            let side = if i + 1 == n { Side::Left } else { Side::Right };
            if self.derivative_limit(x, side).signum() == -want {
                return None;
            }
        }
        Some(dir)
    }
}

/// A continuous function on ℝ with finitely many strict local extrema,
/// located exactly at `breakpoints`, and strictly monotone in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct FunctionModel {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    directions: Vec<Direction>,
}

/// Unvalidated JSON form of a [`FunctionModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Piece>,
}

impl TryFrom<ModelSpec> for FunctionModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        FunctionModel::new(spec.breakpoints, spec.pieces)
    }
}

impl From<FunctionModel> for ModelSpec {
    fn from(m: FunctionModel) -> Self {
        ModelSpec {
            breakpoints: m.breakpoints,
            pieces: m.pieces,
        }
    }
}

/// Whether a breakpoint is a local minimum or maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::Min => "min",
            ExtremumKind::Max => "max",
        })
    }
}

impl FunctionModel {
    /// Validates coverage, anchors, continuity, strict monotonicity of
    /// every piece and alternation of directions.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::CoverageGap("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::CoverageGap("breakpoints must be strictly increasing".into()));
        }
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::CoverageGap(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }

        for (i, piece) in pieces.iter().enumerate() {
            let left = if i == 0 {
                ExtendedReal::NegInfinity
            } else {
                ExtendedReal::Finite(breakpoints[i - 1])
            };
            let right = breakpoints
                .get(i)
                .map_or(ExtendedReal::PosInfinity, |&b| ExtendedReal::Finite(b));
            if piece.interval != (left, right) {
                return Err(Error::CoverageGap(format!(
                    "piece {i} spans ({}, {}), expected ({left}, {right})",
                    piece.interval.0, piece.interval.1
                )));
            }
            if !piece.anchor.is_finite() || !piece.constant.is_finite() {
                return Err(Error::InvalidAnchor {
                    piece: i,
                    anchor: piece.anchor,
                });
            }
            if !breakpoints.is_empty() && left.finite() != Some(piece.anchor) && right.finite() != Some(piece.anchor) {
                return Err(Error::InvalidAnchor {
                    piece: i,
                    anchor: piece.anchor,
                });
            }
            for t in &piece.terms {
                t.validate()?;
            }
        }

        for (i, &b) in breakpoints.iter().enumerate() {
            let l = pieces[i].value(b);
            let r = pieces[i + 1].value(b);
            if (l - r).abs() > CONTINUITY_TOL * l.abs().max(r.abs()).max(1.0) {
                return Err(Error::ContinuityViolation {
                    at: b,
                    left: l,
                    right: r,
                });
            }
        }

        let directions = pieces
            .iter()
            .enumerate()
            .map(|(i, p)| p.monotone_direction().ok_or(Error::NotStrictlyMonotonePiece(i)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(i) = directions.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::NonAlternatingExtrema(breakpoints[i]));
        }

        Ok(FunctionModel {
            breakpoints,
            pieces,
            directions,
        })
    }

    /// A continuous piecewise-linear function with the given slopes
    /// (`breakpoints.len() + 1` of them) taking `value` at the first
    /// breakpoint, or at 0 when there are no breakpoints.
    pub fn piecewise_linear(breakpoints: &[f64], slopes: &[f64], value: f64) -> Result<Self> {
        use ExtendedReal::*;
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::CoverageGap(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        let line = |s: f64| if s == 0.0 { vec![] } else { vec![Term::odd(s, 1.0)] };
        if breakpoints.is_empty() {
            let piece = Piece::new(NegInfinity, PosInfinity, 0.0, value, line(slopes[0]));
            return FunctionModel::new(vec![], vec![piece]);
        }
        let mut pieces = vec![Piece::new(
            NegInfinity,
            Finite(breakpoints[0]),
            breakpoints[0],
            value,
            line(slopes[0]),
        )];
        let mut v = value;
        for (i, &s) in slopes.iter().enumerate().skip(1) {
            let a = breakpoints[i - 1];
            let right = breakpoints.get(i).map_or(PosInfinity, |&b| Finite(b));
            pieces.push(Piece::new(Finite(a), right, a, v, line(s)));
            if let Some(&b) = breakpoints.get(i) {
                v += s * (b - a);
            }
        }
        FunctionModel::new(breakpoints.to_vec(), pieces)
    }

    /// A single extremum at `at` with value `value`; `left` and `right` are
    /// the terms of the two pieces, both anchored at `at`.
    pub fn germ(at: f64, value: f64, left: Vec<Term>, right: Vec<Term>) -> Result<Self> {
        use ExtendedReal::*;
        FunctionModel::new(
            vec![at],
            vec![
                Piece::new(NegInfinity, Finite(at), at, value, left),
                Piece::new(Finite(at), PosInfinity, at, value, right),
            ],
        )
    }

    /// `f(x) = |x|`.
    pub fn abs() -> Self {
        FunctionModel::germ(0.0, 0.0, vec![Term::even(1.0, 1.0)], vec![Term::even(1.0, 1.0)])
            .expect("|x| is a valid model")
    }

    /// `f(x) = x²`.
    pub fn square() -> Self {
        FunctionModel::germ(0.0, 0.0, vec![Term::even(1.0, 2.0)], vec![Term::even(1.0, 2.0)])
            .expect("x² is a valid model")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    /// Index of the piece that governs `x` approached from `side`.
    pub fn piece_index(&self, x: f64, side: Side) -> usize {
        match side {
            Side::Left => self.breakpoints.partition_point(|&b| b < x),
            Side::Right => self.breakpoints.partition_point(|&b| b <= x),
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x, Side::Right)].value(x)
    }

    /// One-sided limit of `f'` at `x0`.
    pub fn side_derivative(&self, x0: f64, side: Side) -> ExtendedReal {
        self.pieces[self.piece_index(x0, side)].derivative_limit(x0, side)
    }

    /// Limit of `f` at either end of the line. Pieces are strictly monotone
    /// power sums, so the tails are always infinite.
    pub fn tail_limit(&self, tail: Tail) -> ExtendedReal {
        match tail {
            Tail::NegInfinity => match self.directions[0] {
                Direction::Decreasing => ExtendedReal::PosInfinity,
                Direction::Increasing => ExtendedReal::NegInfinity,
            },
            Tail::PosInfinity => match self.directions[self.directions.len() - 1] {
                Direction::Increasing => ExtendedReal::PosInfinity,
                Direction::Decreasing => ExtendedReal::NegInfinity,
            },
        }
    }

    /// Kind of extremum at breakpoint `i`.
    pub fn extremum_kind(&self, i: usize) -> ExtremumKind {
        match self.directions[i] {
            Direction::Decreasing => ExtremumKind::Min,
            Direction::Increasing => ExtremumKind::Max,
        }
    }

    /// Index of `x` in the breakpoint list, if it is one.
    pub fn breakpoint_index(&self, x: f64) -> Option<usize> {
        self.breakpoints.iter().position(|&b| b == x)
    }

    /// The model of `-f`.
    pub fn negate(&self) -> Self {
        FunctionModel {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Piece::negated).collect(),
            directions: self.directions.iter().map(|d| d.flipped()).collect(),
        }
    }

    /// The model of `c·f` for finite nonzero `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(Error::InvalidTerm(format!(
                "scale factor {c} must be finite and nonzero"
            )));
        }
        let directions = if c > 0.0 {
            self.directions.clone()
        } else {
            self.directions.iter().map(|d| d.flipped()).collect()
        };
        Ok(FunctionModel {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scaled(c)).collect(),
            directions,
        })
    }
}
