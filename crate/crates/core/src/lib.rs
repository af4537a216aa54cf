//! Weighing strategies for finding a fake coin among genuine ones when one
//! extra chameleon coin may pose as either genuine or fake.
//!
//! Coins are numbered from 1. A [`model::PairState`] tracks which
//! (fake, chameleon) placements are still consistent with the outcomes seen.
//! Trees are read and written by [`codec`], checked by [`verify`], tripled by
//! [`scaling`], found by [`search`], and bounded by [`bounds`].

mod bits;
pub mod bounds;
pub mod codec;
pub mod fixtures;
pub mod graph;
pub mod model;
pub mod scaling;
pub mod search;
pub mod verify;

pub use codec::{parse, serialize_text};
pub use model::{Coin, Leaf, Node, Outcome, PairState, StrategyTree, Weighing};
pub use verify::{verify, Mode, VerificationReport};
