//! Three- and two-symbol encodings of multi-level quasitilings, decoded back by block codes.

mod code;
mod codebook;
mod recognizable;

pub use code::{
    decode_level, encode_level, horizon_safe, marker_density_bound, Choices, MarkerDensity,
};
pub use codebook::{build_codebook, syndetic_set, LevelCode, ShapeCodebook, SymbolMode};
pub use recognizable::{
    check_fully_recognizable, make_recognizable_family, make_recognizable_origin, margin_of,
    RecognizableFamily,
};
