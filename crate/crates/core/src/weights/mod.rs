//! Zen measures and their time-domain weights.

mod family;
mod measure;
mod registry;

pub use family::{
    AlphaBergman, Hardy, HardyBergman, LimitExponents, Scaled, Synthesized, Weight, WeightClass,
    WeightFunction,
};
pub use measure::{doubling_ratio, synthesize_weight, Atom, Density, ZenMeasure};
pub use registry::{builtin_weight, WeightEntry, WeightRegistry};
