#![allow(clippy::result_large_err)]

pub mod coarse;
pub mod equicont;
pub mod exactnum;
pub mod folner;
pub mod localmaps;
pub mod metrization;
pub mod pseudogroup;
pub mod recurrence;
pub mod repro;
pub mod scenario;
