//! Lifespans, the lifetime-overlap filter and year slices.

mod dates;
mod graph;
mod record;
mod year;

pub use dates::extract_lifespan;
pub use graph::{
    build_full_graph, build_slice, full_slice_range, slice_series, slice_years, Edge, PeopleGraph,
    PersonNode,
};
pub use record::PersonRecord;
pub use year::{
    lifespans_overlap, Lifespan, Year, IMPUTED_LIFETIME, MAX_LIFETIME, PRESENT_YEAR, SLICE_MAX,
    SLICE_MIN,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChronologyError {
    #[error("year 0 does not exist")]
    YearZero,
    #[error("death year {death} precedes birth year {birth}")]
    DeathBeforeBirth { birth: Year, death: Year },
    #[error("lifetime {birth}..{death} exceeds {MAX_LIFETIME} years")]
    ImplausibleLifetime { birth: Year, death: Year },
    #[error("year {0} outside the slice range {SLICE_MIN}..={SLICE_MAX}")]
    OutOfRange(i32),
    #[error("slice step must be positive")]
    InvalidStep,
    #[error("empty slice range {from}..{to}")]
    InvalidRange { from: i32, to: i32 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}
