//! Emitter–wire coupling: decay-rate enhancement, its channels, the
//! diameter–distance map and the predictions for measured systems.

pub mod green;
pub mod map;
pub mod rates;
pub mod table;

pub use green::{tm_denominator, OrderPolicy, Orientation};
pub use rates::{
    band_averaged_total, gamma_plasmon, gamma_plasmon_with, scattering_pole_index, total_enhancement_with,
    total_rate_enhancement, total_rate_enhancement_for_mode, total_rate_enhancement_with, CouplingConfig,
    EmitterConfig, RateBreakdown,
};
pub use map::{enhancement_map, enhancement_map_with, linspace, EnhancementMap, MapMetadata};
pub use table::{bundled_records, predict_table, SystemRecord};
