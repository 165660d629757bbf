//! Exact flat-surface toolkit: rational billiard unfoldings, genus-two
//! classification and finite blocking, eigenform prototypes and the golden
//! rel-flow family.
//!
//! All decisions are made in exact arithmetic (see [`exactnum`]).

pub mod blocking;
pub mod exactnum;
pub mod golden;
pub mod polygon;
pub mod prototypes;
pub mod surface;
pub mod unfolding;
