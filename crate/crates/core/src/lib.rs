pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod par;
pub mod reffun;
pub mod scene;
pub mod synth;
pub mod wavelet;
