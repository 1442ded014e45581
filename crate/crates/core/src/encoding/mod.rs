//! CNF encodings: the trap-space circuit, marker and containment
//! constraints, cardinality and the synthesis domain.

mod circuit;
mod constraints;
mod synth;

pub use circuit::{
    encode_fun_eval, encode_ts_circuit, encode_ts_circuit_with, new_inputs, Clamp, EncodeOptions,
    FunctionSpec, PerturbationVars, Rails, TsCircuit, DEFAULT_INLINE_LIMIT,
};
pub use constraints::{
    encode_cardinality_at_most, encode_containment, encode_marker_on_cube, encode_strict_containment,
    marker_match_lit, SequentialCounter,
};
pub use synth::{
    encode_synth_structure, sperner_bound, SynthComponent, SynthesisMode, SynthesisVars,
    DEFAULT_CLAUSE_BUDGET,
};
