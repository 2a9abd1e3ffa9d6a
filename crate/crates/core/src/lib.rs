//! Performance analysis of a wirelessly powered decode-and-forward relay
//! link operating with short packets.
//!
//! The crate models a three-phase time-switching block (power transfer, then
//! one hop per information phase), evaluates exact block error probabilities
//! under Nakagami-m fading with a windowed quadrature engine, cross-checks
//! them by Monte Carlo simulation, and optimizes the block structure subject
//! to reliability and delay constraints.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fbl;
pub mod model;
pub mod montecarlo;
pub mod optimize;

pub use analysis::{ErrorBreakdown, PerformancePoint};
pub use error::{Error, Result};
pub use fbl::{channel_dispersion, fbl_error, qfunc, shannon_capacity, FblPoint};
pub use model::{BlockPlan, ChannelDraw, SystemParams};
