//! α-averaging by a discrete measure.
//!
//! `f_α(x) = Σ p_i f(x - t_i α)` is kept as a formal mixture of shifted
//! copies of `f`, never re-expanded into a single piecewise model, so values
//! and one-sided derivatives stay exact.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::funcmodel::{FunctionModel, Side, Tail};
use crate::measure::DiscreteMeasure;

/// Default number of grid points used by the argmin oracle.
pub const ORACLE_GRID_POINTS: usize = 100_000;

/// Anything that can be evaluated pointwise with exact one-sided derivative
/// limits. Derivative jumps may only occur at `breakpoints()`.
pub trait Evaluable {
    fn value(&self, x: f64) -> f64;
    fn side_derivative(&self, x: f64, side: Side) -> Result<ExtendedReal>;
    /// Sorted points where the derivative may be discontinuous.
    fn breakpoints(&self) -> Vec<f64>;
    fn tail_limit(&self, tail: Tail) -> Result<ExtendedReal>;
}

impl Evaluable for FunctionModel {
    fn value(&self, x: f64) -> f64 {
        self.evaluate(x)
    }

    fn side_derivative(&self, x: f64, side: Side) -> Result<ExtendedReal> {
        Ok(FunctionModel::side_derivative(self, x, side))
    }

    fn breakpoints(&self) -> Vec<f64> {
        FunctionModel::breakpoints(self).to_vec()
    }

    fn tail_limit(&self, tail: Tail) -> Result<ExtendedReal> {
        Ok(FunctionModel::tail_limit(self, tail))
    }
}

impl<E: Evaluable + ?Sized> Evaluable for &E {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }

    fn side_derivative(&self, x: f64, side: Side) -> Result<ExtendedReal> {
        (**self).side_derivative(x, side)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }

    fn tail_limit(&self, tail: Tail) -> Result<ExtendedReal> {
        (**self).tail_limit(tail)
    }
}

/// One shifted, weighted copy of the base function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Component {
    pub weight: f64,
    pub shift: f64,
}

/// `f_α` as a weighted sum of shifts of `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture<F> {
    base: F,
    measure: DiscreteMeasure,
    alpha: f64,
    components: Vec<Component>,
    base_breakpoints: Vec<f64>,
}

pub type MixtureModel = Mixture<FunctionModel>;

impl<F: Evaluable> Mixture<F> {
    pub fn new(base: F, measure: DiscreteMeasure, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::NonpositiveAlpha(alpha));
        }
        let components = measure
            .atoms()
            .iter()
            .map(|a| Component {
                weight: a.weight,
                shift: a.position * alpha,
            })
            .collect();
        let base_breakpoints = base.breakpoints();
        Ok(Mixture {
            base,
            measure,
            alpha,
            components,
            base_breakpoints,
        })
    }

    /// `x - shift`, snapped onto a base breakpoint when it misses one only
    /// by rounding, so a mixture breakpoint `b + shift` maps back to `b`.
    fn shifted(&self, x: f64, shift: f64) -> f64 {
        let y = x - shift;
        let i = self.base_breakpoints.partition_point(|&b| b < y);
        let tol = 4.0 * f64::EPSILON * x.abs().max(shift.abs()).max(1.0);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter_map(|j| self.base_breakpoints.get(j).copied())
            .find(|b| (b - y).abs() <= tol)
            .unwrap_or(y)
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Components in ascending shift order.
    pub fn components(&self) -> &[Component] {
        &self.components
    }
}

impl<F: Evaluable> Evaluable for Mixture<F> {
    fn value(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * self.base.value(x - c.shift))
            .sum()
    }

    fn side_derivative(&self, x: f64, side: Side) -> Result<ExtendedReal> {
        self.components.iter().try_fold(ExtendedReal::Finite(0.0), |acc, c| {
            let d = self
                .base
                .side_derivative(self.shifted(x, c.shift), side)?
                .scale(c.weight);
            acc.checked_add(d).ok_or(Error::IndeterminateSideLimit(x))
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        let base = self.base.breakpoints();
        let mut out: Vec<f64> = self
            .components
            .iter()
            .flat_map(|c| base.iter().map(move |b| b + c.shift))
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Tails transfer from the base: `f_α(x)` is squeezed between the
    /// extreme values of `f` on `[x - α, x + α]`.
    fn tail_limit(&self, tail: Tail) -> Result<ExtendedReal> {
        self.base.tail_limit(tail)
    }
}

impl<F: Serialize> Serialize for Mixture<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Mixture", 3)?;
        s.serialize_field("base", &self.base)?;
        s.serialize_field("measure", &self.measure)?;
        s.serialize_field("alpha", &self.alpha)?;
        s.end()
    }
}

/// `f_α(x) = Σ p_i f(x - t_i α)` for a function model.
pub fn average(model: &FunctionModel, measure: &DiscreteMeasure, alpha: f64) -> Result<MixtureModel> {
    Mixture::new(model.clone(), measure.clone(), alpha)
}

/// `Σ c_j f_j`, used to exercise linearity of averaging.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCombination<F> {
    terms: Vec<(f64, F)>,
}

impl<F: Evaluable> LinearCombination<F> {
    pub fn new(terms: Vec<(f64, F)>) -> Self {
        LinearCombination { terms }
    }
}

impl<F: Evaluable> Evaluable for LinearCombination<F> {
    fn value(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.value(x)).sum()
    }

    fn side_derivative(&self, x: f64, side: Side) -> Result<ExtendedReal> {
        self.terms.iter().try_fold(ExtendedReal::Finite(0.0), |acc, (c, f)| {
            let d = f.side_derivative(x, side)?.scale(*c);
            acc.checked_add(d).ok_or(Error::IndeterminateSideLimit(x))
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.terms.iter().flat_map(|(_, f)| f.breakpoints()).collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn tail_limit(&self, tail: Tail) -> Result<ExtendedReal> {
        self.terms.iter().try_fold(ExtendedReal::Finite(0.0), |acc, (c, f)| {
            let t = f.tail_limit(tail)?.scale(*c);
            acc.checked_add(t).ok_or(Error::IndeterminateTailLimit)
        })
    }
}

/// Values of a function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    xs: Vec<f64>,
    ys: Vec<f64>,
    step: f64,
}

impl SampledSignal {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidSignal(format!(
                "need two or more matching samples, got {} xs and {} ys",
                xs.len(),
                ys.len()
            )));
        }
        let step = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidSignal("grid must be strictly increasing".into()));
        }
        let tol = 1e-12 * xs[0].abs().max(xs[xs.len() - 1].abs()).max(1.0);
        for (i, &x) in xs.iter().enumerate() {
            if (x - (xs[0] + step * i as f64)).abs() > tol {
                return Err(Error::InvalidSignal(format!("grid is not uniform at index {i}")));
            }
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidSignal("sample values must be finite".into()));
        }
        Ok(SampledSignal { xs, ys, step })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Value at fractional grid index `s`, linearly interpolated; indices
    /// within 1e-9 of an integer read the sample directly.
    fn at_index(&self, s: f64) -> f64 {
        let r = s.round();
        if (s - r).abs() <= 1e-9 {
            return self.ys[r as usize];
        }
        let i = (s.floor() as usize).min(self.len() - 2);
        let frac = s - i as f64;
        self.ys[i] + frac * (self.ys[i + 1] - self.ys[i])
    }

    /// Averaging of the samples themselves. The result lives on the grid
    /// points whose distance to either end exceeds `max|t_i|·α`.
    pub fn average(&self, measure: &DiscreteMeasure, alpha: f64) -> Result<SampledSignal> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::NonpositiveAlpha(alpha));
        }
        let margin = measure.max_abs_position() * alpha / self.step;
        let skip = (margin - 1e-9).ceil().max(0.0) as usize;
        let n = self.len();
        if 2 * skip + 2 > n {
            return Err(Error::InvalidSignal(format!(
                "window of {n} samples is too short for a shift of {margin} samples"
            )));
        }
        let shifts: Vec<(f64, f64)> = measure
            .atoms()
            .iter()
            .map(|a| (a.weight, a.position * alpha / self.step))
            .collect();
        let xs = self.xs[skip..n - skip].to_vec();
        let ys = (skip..n - skip)
            .map(|j| {
                shifts
                    .iter()
                    .map(|&(w, s)| w * self.at_index((j as f64 - s).clamp(0.0, (n - 1) as f64)))
                    .sum()
            })
            .collect();
        Ok(SampledSignal {
            xs,
            ys,
            step: self.step,
        })
    }

    /// CSV with header `x,y`, values in 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in self.xs.iter().zip(&self.ys) {
            let _ = writeln!(out, "{x:.16e},{y:.16e}");
        }
        out
    }
}

/// Uniform grid of `n` points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi && n >= 2) {
        return Err(Error::InvalidWindow { lo, hi, n });
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    xs[n - 1] = hi;
    Ok(xs)
}

/// Evaluates `f` on a uniform grid over `[lo, hi]`.
pub fn sample<E: Evaluable + Sync>(f: &E, lo: f64, hi: f64, n: usize) -> Result<SampledSignal> {
    let xs = grid(lo, hi, n)?;
    let ys = xs.par_iter().map(|&x| f.value(x)).collect();
    Ok(SampledSignal {
        step: (hi - lo) / (n - 1) as f64,
        xs,
        ys,
    })
}

/// Leftmost grid point minimizing `f` over `[lo, hi]`, with its value.
pub fn grid_argmin<E: Evaluable + ?Sized>(f: &E, lo: f64, hi: f64, n: usize) -> Result<(f64, f64)> {
    let xs = grid(lo, hi, n)?;
    let mut best = (xs[0], f.value(xs[0]));
    for &x in &xs[1..] {
        let y = f.value(x);
        if y < best.1 {
            best = (x, y);
        }
    }
    Ok(best)
}

/// Leftmost grid point maximizing `f` over `[lo, hi]`, with its value.
pub fn grid_argmax<E: Evaluable + ?Sized>(f: &E, lo: f64, hi: f64, n: usize) -> Result<(f64, f64)> {
    let xs = grid(lo, hi, n)?;
    let mut best = (xs[0], f.value(xs[0]));
    for &x in &xs[1..] {
        let y = f.value(x);
        if y > best.1 {
            best = (x, y);
        }
    }
    Ok(best)
}

/// Exact infimum and supremum of `f` over `[x - α, x + α]`.
///
/// Pieces are monotone, so the extremes are attained at the window ends or
/// at breakpoints inside the window.
pub fn envelope_bounds(model: &FunctionModel, x: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::NonpositiveAlpha(alpha));
    }
    let (a, b) = (x - alpha, x + alpha);
    let candidates = [a, b]
        .into_iter()
        .chain(model.breakpoints().iter().copied().filter(|&t| a < t && t < b));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in candidates {
        let v = model.evaluate(t);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}
