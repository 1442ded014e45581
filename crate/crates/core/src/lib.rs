//! Minimal trap spaces of locally monotone Boolean networks, marker
//! reprogramming and network synthesis by counter-example guided
//! abstraction refinement over an incremental SAT engine.

pub mod bn;
pub mod bnet;
pub mod cegar;
pub mod encoding;
pub mod error;
pub mod oracle;
pub mod parallel;
pub mod qdimacs;
pub mod random;
pub mod sat;
pub mod subcube;
pub mod trapspace;

pub use bn::{
    BooleanNetwork, Clause, Component, ComponentId, Configuration, InfluenceGraph, Literal, NameIndex,
    PartialAssignment, Sign, UnateDnf,
};
pub use bnet::parse_bnet;
pub use error::{Error, Result};
pub use subcube::Subcube;
