//! Library side of the `gst` command: scenario handling, reports and the
//! oracle certification run.

pub mod certify;
pub mod report;
pub mod scenario;
