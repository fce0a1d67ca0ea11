//! Signed historical years and lifespans.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ChronologyError;

/// Earliest year covered by the historical slices (3000 BC).
pub const SLICE_MIN: i32 = -3000;
/// Latest year covered by the historical slices.
pub const SLICE_MAX: i32 = 1950;
/// Reference "present" year. Persons born after `PRESENT_YEAR - MAX_LIFETIME`
/// without a death date are treated as possibly living, and open lifespans
/// extend to this year.
pub const PRESENT_YEAR: i32 = 2020;
/// Upper bound on a plausible lifetime in years.
pub const MAX_LIFETIME: i32 = 120;
/// Lifetime assumed for historical persons whose death year is unknown.
pub const IMPUTED_LIFETIME: i32 = 70;

/// A calendar year with no year zero: `-318` is 318 BC, `46` is AD 46.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Year(i32);

impl Year {
    pub fn new(value: i32) -> Result<Self, ChronologyError> {
        if value == 0 {
            Err(ChronologyError::YearZero)
        } else {
            Ok(Self(value))
        }
    }

    pub fn value(self) -> i32 {
        self.0
    }

    pub fn is_bc(self) -> bool {
        self.0 < 0
    }

    /// Position on a gap-free axis: 1 BC is -1, AD 1 is 0.
    pub fn ordinal(self) -> i32 {
        if self.0 < 0 {
            self.0
        } else {
            self.0 - 1
        }
    }

    pub fn from_ordinal(ordinal: i32) -> Self {
        if ordinal < 0 {
            Self(ordinal)
        } else {
            Self(ordinal + 1)
        }
    }

    /// The year `n` years later, stepping over the missing year zero.
    pub fn plus_years(self, n: i32) -> Self {
        Self::from_ordinal(self.ordinal() + n)
    }

    /// Elapsed years from `self` to `later`.
    pub fn years_until(self, later: Year) -> i32 {
        later.ordinal() - self.ordinal()
    }

    /// True for years inside the historical slice range.
    pub fn in_slice_range(self) -> bool {
        (SLICE_MIN..=SLICE_MAX).contains(&self.0)
    }
}

impl TryFrom<i32> for Year {
    type Error = ChronologyError;

    fn try_from(value: i32) -> Result<Self, Self::Error> {
        Year::new(value)
    }
}

impl From<Year> for i32 {
    fn from(y: Year) -> i32 {
        y.0
    }
}

impl fmt::Display for Year {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Birth and (optional) death year of a person.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLifespan")]
pub struct Lifespan {
    pub birth: Year,
    /// `None` only for persons who may still be alive.
    pub death: Option<Year>,
    /// Set when either date is approximate or imputed.
    pub approx: bool,
}

#[derive(Deserialize)]
struct RawLifespan {
    birth: Year,
    death: Option<Year>,
    #[serde(default)]
    approx: bool,
}

impl TryFrom<RawLifespan> for Lifespan {
    type Error = ChronologyError;

    fn try_from(raw: RawLifespan) -> Result<Self, Self::Error> {
        Lifespan::new(raw.birth, raw.death, raw.approx)
    }
}

impl Lifespan {
    /// Validates chronological order and the lifetime bound.
    pub fn new(birth: Year, death: Option<Year>, approx: bool) -> Result<Self, ChronologyError> {
        if let Some(d) = death {
            if d < birth {
                return Err(ChronologyError::DeathBeforeBirth { birth, death: d });
            }
            if birth.years_until(d) > MAX_LIFETIME {
                return Err(ChronologyError::ImplausibleLifetime { birth, death: d });
            }
        }
        Ok(Self { birth, death, approx })
    }

    /// Convenience constructor from raw signed values, for fixtures and tests.
    pub fn years(birth: i32, death: i32) -> Result<Self, ChronologyError> {
        Self::new(Year::new(birth)?, Some(Year::new(death)?), false)
    }

    /// Death year, or [`PRESENT_YEAR`] for an open lifespan.
    pub fn effective_death(&self) -> Year {
        self.death
            .unwrap_or_else(|| self.birth.max(Year(PRESENT_YEAR)))
    }

    pub fn alive_in(&self, year: Year) -> bool {
        self.birth <= year && year <= self.effective_death()
    }
}

/// True when the two closed lifetime intervals share at least one year.
pub fn lifespans_overlap(a: &Lifespan, b: &Lifespan) -> bool {
    a.birth.max(b.birth) <= a.effective_death().min(b.effective_death())
}
