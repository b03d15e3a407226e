//! Photon statistics of a pumped three-level emitter: simulated detector
//! streams, delay histograms, and lifetime and `g²` fits.

pub mod fit;
pub mod histogram;
pub mod stream;

pub use fit::{fit_g2, fit_lifetime, g2_model, G2FitResult, G2Parameters, LifetimeFitResult, LifetimeWindow};
pub use histogram::{bundled_g2_histogram, histogram_start_stop, Histogram, Sync};
pub use stream::{simulate_stream, PumpMode, ThreeLevelModel, TimeTag, TimeTagStream};
