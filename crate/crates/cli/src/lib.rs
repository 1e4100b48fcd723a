//! Scenario parsing, command implementations and output writers for the
//! `sbpsat` binary.

pub mod dispersion;
pub mod postprocess;
pub mod scenario;
pub mod simulate;
pub mod verify;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for failed checks or runtime errors.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for usage errors and invalid scenarios.
pub const EXIT_USAGE: i32 = 2;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SBPSAT_OUTPUT_DIR";
