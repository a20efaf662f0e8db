//! Finite-scale computations with graphs of groups.

pub mod bass_serre;
pub mod gog;
pub mod ladder;
pub mod limit;
pub mod space;
pub mod stallings;
pub mod words;

pub use stallings::{CoreGraph, StallingsError, SubgroupHandle};
pub use words::{FreeGroup, FreeWord, HalfInt, Letter};
