//! Topological stability of piecewise-differentiable functions under
//! averaging by discrete probability measures.
//!
//! A function `f: ℝ → ℝ` with finitely many strict extrema is averaged as
//! `f_α(x) = Σ p_i f(x - t_i α)`. The crate decides whether `f_α` keeps the
//! shape of `f` (same snake class) for all small α, predicts where each
//! extremum of `f_α` lands, and verifies both claims against brute-force
//! grid searches.

pub mod averaging;
pub mod cli;
pub mod error;
pub mod extended;
pub mod funcmodel;
pub mod measure;
pub mod snake;
pub mod stability;

pub use averaging::{
    average, envelope_bounds, sample, Evaluable, LinearCombination, Mixture, MixtureModel, SampledSignal,
};
pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use funcmodel::{Direction, ExtremumKind, FunctionModel, Piece, Side, Tail, Term};
pub use measure::{Atom, DiscreteMeasure};
pub use snake::{
    extract_snake, extract_snake_sampled, snakes_equivalent, topologically_equivalent, EquivalenceReason,
    EquivalenceVerdict, Extraction, Snake, SnakeSource,
};
pub use stability::{
    analyze_germ, analyze_global, predicted_min, stability_numbers, sweep_verify, Condition, GermReport, GlobalReport,
    SweepReport, Verdict,
};
