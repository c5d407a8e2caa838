//! Language generation in the limit.
//!
//! A generator watches an adversary enumerate an unknown language `K` from a
//! known countable collection and must eventually output only unseen members
//! of `K`. This crate provides the universe enumeration, collections behind a
//! counting membership oracle, the adversaries and referee, and the
//! generation algorithms (plain and prompted).

pub mod collection;
pub mod error;
pub mod game;
pub mod generators;
pub mod prompted;
pub mod scenario;
pub mod suite;
pub mod universe;

pub use error::{Error, Result};
pub use universe::{Alphabet, Element, Universe, UniverseId};
