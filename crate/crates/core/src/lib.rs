pub mod error;
pub mod measurement;
pub mod scenarios;
pub mod quantum;
pub mod lhv;
pub mod disturbance;
pub mod cli;
