//! Snakes: the ordered list of tail limits and extremum values of a function.
//!
//! Two functions with finitely many strict extrema and strictly monotone in
//! between are topologically equivalent exactly when their snakes are
//! order-isomorphic.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::averaging::{Evaluable, Mixture, SampledSignal};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::funcmodel::{ExtremumKind, FunctionModel, Side, Tail};

/// Smallest accepted scan resolution (points per interval).
pub const MIN_RESOLUTION: usize = 64;
/// Derivative magnitude treated as zero by the plateau detector.
pub const PLATEAU_TOL: f64 = 1e-12;
/// Width to which extremum positions are bisected.
pub const LOCATE_TOL: f64 = 1e-12;

/// `{A_0, A_1, ..., A_{n+1}}`: tails at both ends with the extremum values in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SnakeSpec")]
pub struct Snake {
    values: Vec<ExtendedReal>,
}

#[derive(Deserialize)]
struct SnakeSpec {
    values: Vec<ExtendedReal>,
}

impl TryFrom<SnakeSpec> for Snake {
    type Error = Error;

    fn try_from(spec: SnakeSpec) -> Result<Self> {
        Snake::new(spec.values)
    }
}

impl Snake {
    /// Requires length ≥ 2, finite interior values, and every interior value
    /// strictly below both neighbours or strictly above both.
    pub fn new(values: Vec<ExtendedReal>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSnake(format!("length {} is below 2", values.len())));
        }
        let n = values.len();
        if let Some(v) = values[1..n - 1].iter().find(|v| v.is_infinite()) {
            return Err(Error::InvalidSnake(format!("interior value {v} is not finite")));
        }
        for i in 1..n - 1 {
            let l = values[i].total_cmp(&values[i - 1]);
            let r = values[i].total_cmp(&values[i + 1]);
            if l == Ordering::Equal || l != r {
                return Err(Error::InvalidSnake(format!(
                    "value {} at {i} is not a strict extremum",
                    values[i]
                )));
            }
        }
        Ok(Snake { values })
    }

    pub fn values(&self) -> &[ExtendedReal] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of interior entries, i.e. of local extrema.
    pub fn extremum_count(&self) -> usize {
        self.values.len() - 2
    }

    /// Order-isomorphism: equal lengths and `A_i < A_j ⇔ B_i < B_j` for all pairs.
    pub fn equivalent(&self, other: &Snake) -> bool {
        snakes_equivalent(self, other)
    }
}

pub fn snakes_equivalent(s: &Snake, t: &Snake) -> bool {
    order_isomorphic(&s.values, &t.values)
}

/// Condition (*) on raw sequences, which need not be valid snakes.
pub fn order_isomorphic(a: &[ExtendedReal], b: &[ExtendedReal]) -> bool {
    a.len() == b.len() && (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i].total_cmp(&a[j]) == b[i].total_cmp(&b[j])))
}

/// A located local extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub position: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Result of snake extraction. A function with a plateau has no snake in the
/// classified sense, which is reported rather than treated as an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Extraction {
    Snake { snake: Snake, extrema: Vec<Extremum> },
    PlateauDetected { start: f64, end: f64 },
}

impl Extraction {
    pub fn snake(&self) -> Option<&Snake> {
        match self {
            Extraction::Snake { snake, .. } => Some(snake),
            Extraction::PlateauDetected { .. } => None,
        }
    }

    pub fn extrema(&self) -> &[Extremum] {
        match self {
            Extraction::Snake { extrema, .. } => extrema,
            Extraction::PlateauDetected { .. } => &[],
        }
    }

    pub fn is_plateau(&self) -> bool {
        matches!(self, Extraction::PlateauDetected { .. })
    }
}

/// Things a snake can be read off.
pub trait SnakeSource {
    fn extract_snake(&self, resolution: usize) -> Result<Extraction>;
}

impl SnakeSource for FunctionModel {
    /// Direct read-off: tails and the values at the breakpoints.
    fn extract_snake(&self, _resolution: usize) -> Result<Extraction> {
        let extrema: Vec<Extremum> = self
            .breakpoints()
            .iter()
            .enumerate()
            .map(|(i, &b)| Extremum {
                position: b,
                value: self.evaluate(b),
                kind: self.extremum_kind(i),
            })
            .collect();
        let snake = snake_from(
            self.tail_limit(Tail::NegInfinity),
            &extrema,
            self.tail_limit(Tail::PosInfinity),
        )?;
        Ok(Extraction::Snake { snake, extrema })
    }
}

impl<F: Evaluable> SnakeSource for Mixture<F> {
    fn extract_snake(&self, resolution: usize) -> Result<Extraction> {
        scan_snake(self, resolution)
    }
}

impl<S: SnakeSource + ?Sized> SnakeSource for &S {
    fn extract_snake(&self, resolution: usize) -> Result<Extraction> {
        (**self).extract_snake(resolution)
    }
}

pub fn extract_snake<S: SnakeSource + ?Sized>(source: &S, resolution: usize) -> Result<Extraction> {
    source.extract_snake(resolution)
}

fn snake_from(first: ExtendedReal, extrema: &[Extremum], last: ExtendedReal) -> Result<Snake> {
    let mut values = Vec::with_capacity(extrema.len() + 2);
    values.push(first);
    values.extend(extrema.iter().map(|e| ExtendedReal::Finite(e.value)));
    values.push(last);
    Snake::new(values)
}

struct Probe {
    x: f64,
    slope: ExtendedReal,
}

/// Locates the extrema of `f` by scanning the sign of its derivative.
///
/// Assumes `f` is strictly monotone outside the hull of its breakpoints,
/// which holds for averages of function models. Each gap between
/// consecutive breakpoints is probed at `resolution` interior points, each
/// breakpoint contributes both one-sided limits, and every sign change
/// between probes at distinct positions is bisected down to [`LOCATE_TOL`].
pub fn scan_snake<E: Evaluable + ?Sized>(f: &E, resolution: usize) -> Result<Extraction> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidResolution {
            got: resolution,
            min: MIN_RESOLUTION,
        });
    }
    let breakpoints = f.breakpoints();
    let mut probes = Vec::with_capacity(breakpoints.len() * (resolution + 2) + 2);
    // one probe in each tail, where the slope keeps a fixed nonzero sign
    // even if it vanishes at the outermost breakpoint itself
    let reach = match (breakpoints.first(), breakpoints.last()) {
        (Some(&a), Some(&b)) => (b - a).max(1.0),
        _ => 1.0,
    };
    if let Some(&a) = breakpoints.first() {
        probes.push(Probe {
            x: a - reach,
            slope: f.side_derivative(a - reach, Side::Right)?,
        });
    }
    for (j, &b) in breakpoints.iter().enumerate() {
        probes.push(Probe {
            x: b,
            slope: f.side_derivative(b, Side::Left)?,
        });
        probes.push(Probe {
            x: b,
            slope: f.side_derivative(b, Side::Right)?,
        });
        if let Some(&next) = breakpoints.get(j + 1) {
            let width = next - b;
            for i in 1..=resolution {
                let x = b + width * i as f64 / (resolution + 1) as f64;
                probes.push(Probe {
                    x,
                    slope: f.side_derivative(x, Side::Right)?,
                });
            }
        }
    }
    if let Some(&b) = breakpoints.last() {
        probes.push(Probe {
            x: b + reach,
            slope: f.side_derivative(b + reach, Side::Right)?,
        });
    }

    let flat = |p: &Probe| p.slope.finite().is_some_and(|d| d.abs() <= PLATEAU_TOL);
    for w in probes.windows(2) {
        if w[0].x != w[1].x && flat(&w[0]) && flat(&w[1]) {
            return Ok(Extraction::PlateauDetected {
                start: w[0].x,
                end: w[1].x,
            });
        }
    }

    let mut extrema = Vec::new();
    let mut last: Option<&Probe> = None;
    for p in &probes {
        let s = p.slope.signum();
        if s == 0 {
            continue;
        }
        if let Some(prev) = last {
            let sp = prev.slope.signum();
            if sp != s {
                let position = if prev.x == p.x {
                    p.x
                } else {
                    bisect_slope(f, prev.x, p.x, sp)?
                };
                let kind = if sp < 0 { ExtremumKind::Min } else { ExtremumKind::Max };
                extrema.push(Extremum {
                    position,
                    value: f.value(position),
                    kind,
                });
            }
        }
        last = Some(p);
    }

    let snake = snake_from(
        f.tail_limit(Tail::NegInfinity)?,
        &extrema,
        f.tail_limit(Tail::PosInfinity)?,
    )?;
    Ok(Extraction::Snake { snake, extrema })
}

/// Bisects a sign change of `f'` on `(lo, hi)` where `f'` has sign `lo_sign` near `lo`.
fn bisect_slope<E: Evaluable + ?Sized>(f: &E, mut lo: f64, mut hi: f64, lo_sign: i8) -> Result<f64> {
    while hi - lo > LOCATE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = f.side_derivative(mid, Side::Right)?.signum();
        if s == 0 {
            return Ok(mid);
        }
        if s == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Snake of a sampled signal. The end samples stand in for the tails.
/// A run of two or more consecutive differences within `flat_tol` of zero
/// is reported as a plateau.
pub fn extract_snake_sampled(signal: &SampledSignal, flat_tol: f64) -> Result<Extraction> {
    let (xs, ys) = (signal.xs(), signal.ys());
    let diffs: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
    let is_flat = |d: f64| d.abs() <= flat_tol;
    for (i, w) in diffs.windows(2).enumerate() {
        if is_flat(w[0]) && is_flat(w[1]) {
            return Ok(Extraction::PlateauDetected {
                start: xs[i],
                end: xs[i + 2],
            });
        }
    }

    let mut extrema = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for (i, &d) in diffs.iter().enumerate() {
        if is_flat(d) {
            continue;
        }
        if let Some((j, prev)) = last {
            if prev.signum() != d.signum() {
                // turning sample: the end of the last non-flat step
                let k = j + 1;
                extrema.push(Extremum {
                    position: xs[k],
                    value: ys[k],
                    kind: if prev < 0.0 {
                        ExtremumKind::Min
                    } else {
                        ExtremumKind::Max
                    },
                });
            }
        }
        last = Some((i, d));
    }
    let snake = snake_from(
        ExtendedReal::Finite(ys[0]),
        &extrema,
        ExtendedReal::Finite(ys[ys.len() - 1]),
    )?;
    Ok(Extraction::Snake { snake, extrema })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceReason {
    SameSnakeClass,
    DifferentExtremeCount,
    SnakeOrderMismatch,
    PlateauDetected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub reason: EquivalenceReason,
}

impl EquivalenceVerdict {
    fn from_extractions(a: &Extraction, b: &Extraction) -> Self {
        let (sa, sb) = match (a.snake(), b.snake()) {
            (Some(sa), Some(sb)) => (sa, sb),
            _ => {
                return EquivalenceVerdict {
                    equivalent: false,
                    reason: EquivalenceReason::PlateauDetected,
                }
            }
        };
        let reason = if sa.len() != sb.len() {
            EquivalenceReason::DifferentExtremeCount
        } else if snakes_equivalent(sa, sb) {
            EquivalenceReason::SameSnakeClass
        } else {
            EquivalenceReason::SnakeOrderMismatch
        };
        EquivalenceVerdict {
            equivalent: reason == EquivalenceReason::SameSnakeClass,
            reason,
        }
    }
}

/// Decides topological equivalence through the snake criterion.
pub fn topologically_equivalent<F, G>(f: &F, g: &G, resolution: usize) -> Result<EquivalenceVerdict>
where
    F: SnakeSource + ?Sized,
    G: SnakeSource + ?Sized,
{
    let a = f.extract_snake(resolution)?;
    let b = g.extract_snake(resolution)?;
    Ok(EquivalenceVerdict::from_extractions(&a, &b))
}

/// Verdict for two extractions that are already at hand.
pub fn compare_extractions(a: &Extraction, b: &Extraction) -> EquivalenceVerdict {
    EquivalenceVerdict::from_extractions(a, b)
}
