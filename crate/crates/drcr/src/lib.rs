//! Host-side companion to `drcr-core`: text file formats, a threaded
//! corridor search, the benchmark harness and the `drcr` command line.

pub mod bench;
pub mod cli;
pub mod formats;
pub mod parallel;

pub use parallel::solve_btcs_parallel;
