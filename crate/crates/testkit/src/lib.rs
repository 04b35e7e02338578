//! Reference oracles for tests. Everything here is deliberately naive:
//! exhaustive enumeration, a dense exact simplex, direct grid replay. It
//! shares no algorithmic code with the crates under test.

pub mod brute;
pub mod gen;
pub mod grid;
pub mod lp;
pub mod simplex;
pub mod stats;
