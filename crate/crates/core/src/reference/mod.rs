//! Slow dense reference simulators used as oracles in tests and by the
//! acceptance suite. Nothing here is on a production path.

pub mod dense;
pub mod sim;
