pub mod cli;
pub mod coupling;
pub mod config;
pub mod csvio;
pub mod error;
pub mod materials;
pub mod mode;
pub mod numerics;
pub mod photon;
