//! Sufficient conditions for topological stability under averaging.
//!
//! At a local minimum with one-sided slope limits `L ≤ 0 ≤ R` and a measure
//! with atoms `t_k < ... < t_1` of weights `p_i`, the numbers
//! `X_j = L·(p_1 + ... + p_j) + R·(p_{j+1} + ... + p_k)` are the slopes of
//! `f_α` on `(t_{j+1}α, t_jα)` in the small-α limit. If none vanishes the
//! germ is stable and `f_α` has a unique minimum at `t_mα`, where `m` is the
//! first index with `X_m < 0` (or `k` if all are positive). If exactly one
//! of `L`, `R` is infinite the minimum sits at `t_1α` (`L = -∞`) or `t_kα`
//! (`R = +∞`). Maxima are handled by negating the function.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{average, grid_argmax, grid_argmin, ORACLE_GRID_POINTS};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::funcmodel::{ExtremumKind, FunctionModel, Side};
use crate::measure::DiscreteMeasure;
use crate::snake::{compare_extractions, EquivalenceReason, SnakeSource};

/// α values used when a caller does not supply any.
pub const DEFAULT_ALPHAS: [f64; 4] = [0.5, 0.1, 0.05, 0.01];
/// Default scan resolution for snake extraction of averages.
pub const DEFAULT_RESOLUTION: usize = 256;

/// `X_1, ..., X_{k-1}` for finite side limits `left` (L) and `right` (R).
pub fn stability_numbers(left: ExtendedReal, right: ExtendedReal, measure: &DiscreteMeasure) -> Result<Vec<f64>> {
    let (l, r) = match (left.finite(), right.finite()) {
        (Some(l), Some(r)) => (l, r),
        _ => return Err(Error::InfiniteSideLimit),
    };
    let k = measure.len();
    if k < 2 {
        return Err(Error::SingleAtom);
    }
    let p: Vec<f64> = measure.descending().iter().map(|a| a.weight).collect();
    let mut prefix = 0.0;
    let mut numbers = Vec::with_capacity(k - 1);
    for j in 1..k {
        prefix += p[j - 1];
        let suffix: f64 = p[j..].iter().sum();
        numbers.push(l * prefix + r * suffix);
    }
    Ok(numbers)
}

/// Which sufficient condition certified the germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Finite side limits, all `X_j` nonzero.
    #[serde(rename = "a")]
    A,
    /// Exactly one side limit infinite.
    #[serde(rename = "b")]
    B,
    /// Strictly increasing derivative on both sides.
    #[serde(rename = "convexity")]
    Convexity,
    /// A single atom: averaging is a pure shift.
    #[serde(rename = "k1-shift")]
    K1Shift,
    #[serde(rename = "indeterminate")]
    Indeterminate,
}

impl Condition {
    pub fn is_stable(self) -> bool {
        self != Condition::Indeterminate
    }
}

/// Local analysis of one extremum. For a maximum, `L`, `R` and `X` describe `-f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GermReport {
    pub extremum: f64,
    pub kind: ExtremumKind,
    #[serde(rename = "L")]
    pub left_limit: ExtendedReal,
    #[serde(rename = "R")]
    pub right_limit: ExtendedReal,
    #[serde(rename = "X")]
    pub stability_numbers: Vec<f64>,
    pub condition: Condition,
    /// Index in descending order (1-based) of the atom that carries the extremum of `f_α`.
    pub m: Option<usize>,
    /// `t_m`, so that the extremum of `f_α` is at `extremum + t_m·α`.
    #[serde(rename = "predicted_min_atom")]
    pub predicted_atom: Option<f64>,
}

/// Applies the local stability criteria at breakpoint `x0`.
pub fn analyze_germ(model: &FunctionModel, x0: f64, measure: &DiscreteMeasure) -> Result<GermReport> {
    let idx = model.breakpoint_index(x0).ok_or(Error::NotABreakpoint(x0))?;
    let kind = model.extremum_kind(idx);
    let work = match kind {
        ExtremumKind::Min => Cow::Borrowed(model),
        ExtremumKind::Max => Cow::Owned(model.negate()),
    };
    let left = work.side_derivative(x0, Side::Left);
    let right = work.side_derivative(x0, Side::Right);
    let desc = measure.descending();
    let k = desc.len();

    let mut report = GermReport {
        extremum: x0,
        kind,
        left_limit: left,
        right_limit: right,
        stability_numbers: Vec::new(),
        condition: Condition::Indeterminate,
        m: None,
        predicted_atom: None,
    };
    let predict = |report: &mut GermReport, condition: Condition, m: usize| {
        report.condition = condition;
        report.m = Some(m);
        report.predicted_atom = Some(desc[m - 1].position);
    };

    if k == 1 {
        predict(&mut report, Condition::K1Shift, 1);
        return Ok(report);
    }

    use ExtendedReal::*;
    match (left, right) {
        (Finite(_), Finite(_)) => {
            let xs = stability_numbers(left, right, measure)?;
            let all_nonzero = xs.iter().all(|&x| x != 0.0);
            let positives = xs.iter().filter(|&&x| x > 0.0).count();
            report.stability_numbers = xs;
            if all_nonzero {
                predict(&mut report, Condition::A, positives + 1);
            } else if convexity_certified(&work, idx, left, right) {
                report.condition = Condition::Convexity;
            }
        }
        (Finite(_), PosInfinity) => predict(&mut report, Condition::B, k),
        (NegInfinity, Finite(_)) => predict(&mut report, Condition::B, 1),
        _ => {}
    }
    Ok(report)
}

/// Both pieces around minimum `idx` have strictly increasing derivative and
/// the slope does not drop across the breakpoint, so `f` is strictly convex there.
fn convexity_certified(model: &FunctionModel, idx: usize, left: ExtendedReal, right: ExtendedReal) -> bool {
    let pieces = model.pieces();
    left <= right && pieces[idx].derivative_strictly_increasing() && pieces[idx + 1].derivative_strictly_increasing()
}

/// Position of the extremum of `f_α` predicted by `report`.
pub fn predicted_min(report: &GermReport, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::NonpositiveAlpha(alpha));
    }
    let t = report.predicted_atom.ok_or(Error::NoPrediction)?;
    Ok(report.extremum + t * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum FailingReason {
    CriticalValuesNotDistinct { first: f64, second: f64 },
    CriticalValueEqualsTail { extremum: f64 },
    GermIndeterminate { extremum: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalReport {
    pub germ_reports: Vec<GermReport>,
    pub critical_values_distinct: bool,
    pub verdict: Verdict,
    pub failing_reasons: Vec<FailingReason>,
}

/// Global stability: distinct critical values, none equal to a tail
/// limit, and every germ certified stable.
pub fn analyze_global(model: &FunctionModel, measure: &DiscreteMeasure) -> GlobalReport {
    let bps = model.breakpoints();
    let values: Vec<f64> = bps.iter().map(|&b| model.evaluate(b)).collect();
    let tails = [
        model.tail_limit(crate::funcmodel::Tail::NegInfinity),
        model.tail_limit(crate::funcmodel::Tail::PosInfinity),
    ];
    let mut failing_reasons = Vec::new();

    let mut distinct = true;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i] == values[j] {
                distinct = false;
                failing_reasons.push(FailingReason::CriticalValuesNotDistinct {
                    first: bps[i],
                    second: bps[j],
                });
            }
        }
        if tails.iter().any(|t| *t == ExtendedReal::Finite(values[i])) {
            distinct = false;
            failing_reasons.push(FailingReason::CriticalValueEqualsTail { extremum: bps[i] });
        }
    }

    let germ_reports: Vec<GermReport> = bps
        .iter()
        .map(|&b| analyze_germ(model, b, measure).expect("breakpoints are germ positions"))
        .collect();
    for g in &germ_reports {
        if !g.condition.is_stable() {
            failing_reasons.push(FailingReason::GermIndeterminate { extremum: g.extremum });
        }
    }

    GlobalReport {
        germ_reports,
        critical_values_distinct: distinct,
        verdict: if failing_reasons.is_empty() {
            Verdict::Stable
        } else {
            Verdict::Indeterminate
        },
        failing_reasons,
    }
}

/// Predicted against observed extremum of `f_α` near one germ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionCheck {
    pub extremum: f64,
    pub kind: ExtremumKind,
    pub predicted: f64,
    pub observed: f64,
    pub gap: f64,
    pub grid_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub snake_equivalent: bool,
    pub reason: EquivalenceReason,
    /// `None` when `f_α` has a plateau.
    pub extremum_count: Option<usize>,
    pub predictions: Vec<PredictionCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub all_equivalent: bool,
}

/// Checks `f ≅ f_α` for each α and compares predicted extremum positions
/// with a grid search of `f_α` over `[x0 - 2α, x0 + 2α]`.
pub fn sweep_verify(
    model: &FunctionModel,
    measure: &DiscreteMeasure,
    alphas: &[f64],
    resolution: usize,
) -> Result<SweepReport> {
    if alphas.is_empty() {
        return Err(Error::EmptyAlphas);
    }
    if alphas.iter().any(|&a| !(a.is_finite() && a > 0.0)) || alphas.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::AlphasNotDescending);
    }
    let reference = model.extract_snake(resolution)?;
    let germs: Vec<GermReport> = model
        .breakpoints()
        .iter()
        .map(|&b| analyze_germ(model, b, measure))
        .collect::<Result<_>>()?;

    let records = alphas
        .par_iter()
        .map(|&alpha| -> Result<SweepRecord> {
            let mix = average(model, measure, alpha)?;
            let extraction = mix.extract_snake(resolution)?;
            let verdict = compare_extractions(&reference, &extraction);
            let mut predictions = Vec::new();
            for g in germs.iter().filter(|g| g.predicted_atom.is_some()) {
                let predicted = predicted_min(g, alpha)?;
                let (lo, hi) = (g.extremum - 2.0 * alpha, g.extremum + 2.0 * alpha);
                let (observed, _) = match g.kind {
                    ExtremumKind::Min => grid_argmin(&mix, lo, hi, ORACLE_GRID_POINTS)?,
                    ExtremumKind::Max => grid_argmax(&mix, lo, hi, ORACLE_GRID_POINTS)?,
                };
                predictions.push(PredictionCheck {
                    extremum: g.extremum,
                    kind: g.kind,
                    predicted,
                    observed,
                    gap: (predicted - observed).abs(),
                    grid_step: (hi - lo) / (ORACLE_GRID_POINTS - 1) as f64,
                });
            }
            Ok(SweepRecord {
                alpha,
                snake_equivalent: verdict.equivalent,
                reason: verdict.reason,
                extremum_count: extraction.snake().map(|s| s.extremum_count()),
                predictions,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepReport {
        all_equivalent: records.iter().all(|r| r.snake_equivalent),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Term;

    fn weighted() -> DiscreteMeasure {
        DiscreteMeasure::new([(-1.0, 0.3), (1.0, 0.7)], false).unwrap()
    }

    fn zigzag(slopes: &[f64]) -> FunctionModel {
        FunctionModel::piecewise_linear(&[0.0, 1.0, 2.0], slopes, 0.0).unwrap()
    }

    #[test]
    fn stability_number_examples() {
        let (l, r) = (ExtendedReal::Finite(-1.0), ExtendedReal::Finite(1.0));
        assert_eq!(
            stability_numbers(l, r, &DiscreteMeasure::arithmetic()).unwrap(),
            vec![0.0]
        );
        let x = stability_numbers(l, r, &weighted()).unwrap();
        assert!((x[0] + 0.4).abs() < 1e-15);

        // descending-order weights (0.2, 0.3, 0.5) on t = (1, 0, -1)
        let mu = DiscreteMeasure::new([(1.0, 0.2), (0.0, 0.3), (-1.0, 0.5)], false).unwrap();
        let x = stability_numbers(ExtendedReal::Finite(-1.0), ExtendedReal::Finite(2.0), &mu).unwrap();
        assert!((x[0] - 1.4).abs() < 1e-15);
        assert!((x[1] - 0.5).abs() < 1e-15);
        assert!(-1.0 <= x[1] && x[1] < x[0] && x[0] <= 2.0);
    }

    #[test]
    fn stability_number_errors() {
        assert!(matches!(
            stability_numbers(ExtendedReal::NegInfinity, ExtendedReal::Finite(1.0), &weighted()),
            Err(Error::InfiniteSideLimit)
        ));
        assert!(matches!(
            stability_numbers(
                ExtendedReal::Finite(-1.0),
                ExtendedReal::Finite(1.0),
                &DiscreteMeasure::point_mass(0.0).unwrap()
            ),
            Err(Error::SingleAtom)
        ));
    }

    #[test]
    fn weighted_abs_is_case_three() {
        let r = analyze_germ(&FunctionModel::abs(), 0.0, &weighted()).unwrap();
        assert_eq!(r.condition, Condition::A);
        assert_eq!(r.m, Some(1));
        assert_eq!(r.predicted_atom, Some(1.0));
        assert!((r.stability_numbers[0] + 0.4).abs() < 1e-15);
        assert_eq!(predicted_min(&r, 0.1).unwrap(), 0.1);
    }

    #[test]
    fn arithmetic_abs_is_indeterminate() {
        let r = analyze_germ(&FunctionModel::abs(), 0.0, &DiscreteMeasure::arithmetic()).unwrap();
        assert_eq!(r.condition, Condition::Indeterminate);
        assert_eq!(r.stability_numbers, vec![0.0]);
        assert!(matches!(predicted_min(&r, 0.1), Err(Error::NoPrediction)));
    }

    #[test]
    fn cusp_germ_is_condition_b() {
        let f = FunctionModel::germ(0.0, 0.0, vec![Term::even(1.0, 0.5)], vec![Term::odd(1.0, 1.0)]).unwrap();
        let r = analyze_germ(&f, 0.0, &weighted()).unwrap();
        assert_eq!(r.condition, Condition::B);
        assert_eq!(r.m, Some(1));
        assert_eq!(r.predicted_atom, Some(1.0));
        assert!(r.stability_numbers.is_empty());

        let g = FunctionModel::germ(0.0, 0.0, vec![Term::even(1.0, 1.0)], vec![Term::even(1.0, 0.5)]).unwrap();
        let r = analyze_germ(&g, 0.0, &weighted()).unwrap();
        assert_eq!(
            (r.condition, r.m, r.predicted_atom),
            (Condition::B, Some(2), Some(-1.0))
        );

        let both = FunctionModel::germ(0.0, 0.0, vec![Term::even(1.0, 0.5)], vec![Term::even(1.0, 0.5)]).unwrap();
        assert_eq!(
            analyze_germ(&both, 0.0, &weighted()).unwrap().condition,
            Condition::Indeterminate
        );
    }

    #[test]
    fn square_is_certified_by_convexity() {
        let r = analyze_germ(&FunctionModel::square(), 0.0, &DiscreteMeasure::arithmetic()).unwrap();
        assert_eq!(r.condition, Condition::Convexity);
        assert_eq!(r.m, None);
    }

    #[test]
    fn single_atom_is_a_shift() {
        let mu = DiscreteMeasure::point_mass(0.3).unwrap();
        let r = analyze_germ(&FunctionModel::abs(), 0.0, &mu).unwrap();
        assert_eq!(r.condition, Condition::K1Shift);
        assert!((predicted_min(&r, 0.2).unwrap() - 0.06).abs() < 1e-15);
    }

    #[test]
    fn prediction_translates_to_the_extremum() {
        let f = FunctionModel::piecewise_linear(&[2.0], &[-1.0, 3.0], 0.0).unwrap();
        let r = analyze_germ(&f, 2.0, &weighted()).unwrap();
        // X_1 = -0.7 + 0.9 > 0, so m = k = 2 and t_2 = -1
        assert_eq!((r.m, r.predicted_atom), (Some(2), Some(-1.0)));
        assert!((predicted_min(&r, 0.05).unwrap() - 1.95).abs() < 1e-15);
        assert!(matches!(
            analyze_germ(&f, 1.0, &weighted()),
            Err(Error::NotABreakpoint(_))
        ));
    }

    #[test]
    fn zigzag_is_globally_stable() {
        let report = analyze_global(&zigzag(&[-1.0, 2.0, -3.0, 4.0]), &weighted());
        assert_eq!(report.verdict, Verdict::Stable);
        let xs: Vec<f64> = report.germ_reports.iter().map(|g| g.stability_numbers[0]).collect();
        for (got, want) in xs.iter().zip([-0.1, -0.5, -0.9]) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        assert_eq!(report.germ_reports[1].kind, ExtremumKind::Max);
    }

    #[test]
    fn equal_minima_are_indeterminate() {
        // minima at 0 and 2 both with value 0
        let f = zigzag(&[-1.0, 1.0, -1.0, 1.0]);
        let report = analyze_global(&f, &weighted());
        assert_eq!(report.verdict, Verdict::Indeterminate);
        assert!(!report.critical_values_distinct);
        assert!(matches!(
            report.failing_reasons[0],
            FailingReason::CriticalValuesNotDistinct { .. }
        ));
    }

    #[test]
    fn counterexample_is_globally_indeterminate() {
        let report = analyze_global(&FunctionModel::abs(), &DiscreteMeasure::arithmetic());
        assert_eq!(report.verdict, Verdict::Indeterminate);
        assert_eq!(
            report.failing_reasons,
            vec![FailingReason::GermIndeterminate { extremum: 0.0 }]
        );
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["verdict"], "indeterminate");
        assert_eq!(json["germ_reports"][0]["condition"], "indeterminate");
        assert_eq!(json["failing_reasons"][0]["reason"], "germ-indeterminate");
    }

    #[test]
    fn sweep_checks_alpha_list() {
        let f = FunctionModel::abs();
        assert!(matches!(
            sweep_verify(&f, &weighted(), &[], 256),
            Err(Error::EmptyAlphas)
        ));
        assert!(matches!(
            sweep_verify(&f, &weighted(), &[0.1, 0.5], 256),
            Err(Error::AlphasNotDescending)
        ));
    }

    #[test]
    fn sweep_of_weighted_abs() {
        let report = sweep_verify(&FunctionModel::abs(), &weighted(), &[0.5, 0.1, 0.01], 256).unwrap();
        assert!(report.all_equivalent);
        for r in &report.records {
            assert_eq!(r.extremum_count, Some(1));
            let p = &r.predictions[0];
            assert!(p.gap <= p.grid_step, "{p:?}");
        }
    }

    #[test]
    fn sweep_of_counterexample_reports_plateaus() {
        let report = sweep_verify(&FunctionModel::abs(), &DiscreteMeasure::arithmetic(), &[0.5, 0.1], 256).unwrap();
        assert!(!report.all_equivalent);
        for r in &report.records {
            assert_eq!(r.reason, EquivalenceReason::PlateauDetected);
            assert_eq!(r.extremum_count, None);
        }
    }
}
