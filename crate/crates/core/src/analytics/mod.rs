//! Studies built on top of evaluated trips and zone summaries.

pub mod delay;
pub mod integration;
pub mod legs;
pub mod weather;

pub use delay::{delay_sensitivity, DelaySensitivity, ZoneDelta};
pub use integration::{airport_integration, ols_fit, rank_by_slope, IntegrationFit, OlsFit};
pub use legs::{leg_shares, phase_percentages, LegShare};
pub use weather::{weather_diff, Presence, WeatherDelta};
