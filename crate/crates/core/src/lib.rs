//! Door-to-door travel time engine.
//!
//! A trip is split into five phases: the road ride to the departure station,
//! the dwell at the departure station, the time in the vehicle, the dwell at
//! the arrival station and the road ride to the final destination. Ride times
//! come from zone-to-zone aggregates (mean/min/max per day and day period),
//! vehicle times from flight or train schedules.
//!
//! The crate is organised bottom-up:
//!
//! * [`period`], [`model`], [`dwell`], [`geo`]: domain types and primitives.
//! * [`trip`]: evaluation of a single door-to-door trip.
//! * [`ingestion`]: canonical CSV / GeoJSON readers and writers.
//! * [`aggregation`]: per-zone daily means, fastest / most reliable mode
//!   counts, fastest average time and travel time bins.
//! * [`analytics`]: leg shares, airport integration fits, before/after
//!   comparisons and passenger delay sensitivity.
//! * [`pipeline`]: glue that evaluates every trip of a dataset.

pub mod aggregation;
pub mod analytics;
pub mod dwell;
pub mod error;
pub mod geo;
pub mod ingestion;
pub mod model;
pub mod period;
pub mod pipeline;
pub mod trip;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{AnalysisError, IngestError, TripError};
pub use model::{
    DateRange, DwellProfile, GeoPoint, RideVariant, ScheduledSegment, Station, StationKind,
    TripPhaseTimes, TripRecord, Variant, Zone,
};
pub use period::{classify_period, DayPeriod};

/// Seconds in one minute; every duration in the crate is kept in whole seconds.
pub const SECONDS_PER_MINUTE: i64 = 60;
