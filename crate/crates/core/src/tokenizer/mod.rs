//! Spatial tokens: quantizers for orientation, position and sketch coordinates, the
//! added vocabulary, and the whole-model stream codec.

mod codec;
mod quantize;
mod vocab;

pub use codec::{
    decode_model, decode_str, encode_model, DecodeError, TokenizeError, TokenizedSequence,
};
pub use quantize::{
    bin_center, bin_of, dequantize_orientation, dequantize_position, dequantize_sketch,
    normalize_profile, profile_bounds, quantize_orientation, quantize_position, quantize_sketch,
    signed_angle_bin, theta_bin, OrientationIndex, PositionIndex, ProfileNormalization,
    QuantizeError, SketchAxis, SketchLevel, ORIENTATION_BINS, ORIENTATION_COUNT, POSITION_COUNT,
    POSITION_GRID, RANGE_SLACK, SKETCH_LEVELS,
};
pub use vocab::{
    vocabulary, BadToken, Boundary, Family, Token, VocabEntry, Vocabulary, STRUCTURAL_KEYWORDS,
    VOCABULARY_SIZE,
};
