#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use topostab::{Direction, DiscreteMeasure, ExtendedReal, FunctionModel, Piece, Term};

/// Measure with `k` distinct atoms at least `gap` apart and weights bounded away from zero.
pub fn random_measure<R: Rng>(rng: &mut R, k: usize, gap: f64) -> DiscreteMeasure {
    loop {
        let mut ts: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        ts.sort_by(f64::total_cmp);
        if ts.windows(2).any(|w| w[1] - w[0] < gap) {
            continue;
        }
        let atoms: Vec<(f64, f64)> = ts.into_iter().map(|t| (t, rng.gen_range(0.05..1.0))).collect();
        return DiscreteMeasure::new(atoms, true).unwrap();
    }
}

/// Measure whose atoms sit on the lattice `j / 8`.
pub fn lattice_measure<R: Rng>(rng: &mut R, k: usize) -> (DiscreteMeasure, Vec<i32>) {
    let mut slots: Vec<i32> = (-8..=8).collect();
    slots.shuffle(rng);
    let chosen: Vec<i32> = slots[..k].to_vec();
    let atoms: Vec<(f64, f64)> = chosen
        .iter()
        .map(|&j| (f64::from(j) / 8.0, rng.gen_range(0.05..1.0)))
        .collect();
    (DiscreteMeasure::new(atoms, true).unwrap(), chosen)
}

fn random_exponent<R: Rng>(rng: &mut R, min: f64) -> f64 {
    let choices = [0.5, 0.75, 1.0, 1.5, 2.0, 3.0];
    let allowed: Vec<f64> = choices.iter().copied().filter(|&e| e >= min).collect();
    *allowed.choose(rng).unwrap()
}

/// Random model with `n` extrema in `[-2, 2]`: every piece is a sum of
/// same-signed even power terms anchored at one of its endpoints.
pub fn random_model<R: Rng>(rng: &mut R, n: usize, min_exponent: f64) -> FunctionModel {
    use ExtendedReal::*;
    if n == 0 {
        return random_increasing(rng)
            .scaled(if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .unwrap();
    }
    let mut bps: Vec<f64>;
    loop {
        bps = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        bps.sort_by(f64::total_cmp);
        if bps.windows(2).all(|w| w[1] - w[0] > 0.2) {
            break;
        }
    }
    let mut dir = if rng.gen_bool(0.5) {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let mut pieces = Vec::with_capacity(n + 1);
    let mut value = rng.gen_range(-1.0..1.0);
    for i in 0..=n {
        let left = if i == 0 { NegInfinity } else { Finite(bps[i - 1]) };
        let right = bps.get(i).map_or(PosInfinity, |&b| Finite(b));
        // anchored at the right end only for the first piece
        let (anchor, u_positive) = if i == 0 { (bps[0], false) } else { (bps[i - 1], true) };
        let increasing = dir == Direction::Increasing;
        let sign = if increasing == u_positive { 1.0 } else { -1.0 };
        let terms: Vec<Term> = (0..rng.gen_range(1..=3))
            .map(|_| Term::even(sign * rng.gen_range(0.2..2.0), random_exponent(rng, min_exponent)))
            .collect();
        let piece = Piece::new(left, right, anchor, value, terms);
        if let Some(&b) = bps.get(i) {
            if i > 0 {
                value = piece.value(b);
            }
        }
        pieces.push(piece);
        dir = match dir {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        };
    }
    FunctionModel::new(bps, pieces).unwrap()
}

/// Strictly increasing model without extrema: a sum of odd power terms.
pub fn random_increasing<R: Rng>(rng: &mut R) -> FunctionModel {
    let terms: Vec<Term> = (0..rng.gen_range(1..=3))
        .map(|_| Term::odd(rng.gen_range(0.2..2.0), random_exponent(rng, 0.5)))
        .collect();
    let piece = Piece::new(
        ExtendedReal::NegInfinity,
        ExtendedReal::PosInfinity,
        0.0,
        rng.gen_range(-1.0..1.0),
        terms,
    );
    FunctionModel::new(vec![], vec![piece]).unwrap()
}

/// Convex model with a minimum at a random point: even terms with exponent ≥ 1 on both sides.
pub fn random_convex<R: Rng>(rng: &mut R) -> FunctionModel {
    let at = rng.gen_range(-1.0..1.0);
    let side = |rng: &mut R| -> Vec<Term> {
        (0..rng.gen_range(1..=3))
            .map(|_| Term::even(rng.gen_range(0.2..2.0), random_exponent(rng, 1.0)))
            .collect()
    };
    let left = side(rng);
    let right = side(rng);
    FunctionModel::germ(at, rng.gen_range(-1.0..1.0), left, right).unwrap()
}
