//! Finite pieces of the tree of spaces: vertex and edge spaces glued by
//! half-length attaching edges over the Bass–Serre tree.

mod ball;
mod lift;
mod point;
mod search;

pub use ball::{Fiber, MetricEstimate, SpaceBall, SpaceBallStats, SpaceError, UNREACHED};
pub use lift::{flare_probe, qi_lift, FlareReport, LiftStrategy, QiLift};
pub use point::{EdgeCoset, Locus, SpacePoint, Step};
pub use search::XSearch;
