//! Scalar abstraction shared by every metric.
//!
//! All numeric code in this crate is written against [`Scalar`], which is
//! implemented for `f32` and `f64`. The crate root exposes `f64`/`f32`
//! aliases for the common types.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Floating-point scalar usable by the metric code.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` constant into this scalar.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal fits every float type")
    }

    /// Converts a count into this scalar.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to float")
    }

    /// Tolerance used when checking that probabilities sum to one.
    ///
    /// `1e-9` for `f64`; widened to a few ulps of the type for `f32`.
    fn sum_tolerance() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(64.0))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Base of the logarithm used by entropies and divergences.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogBase {
    /// Bits.
    #[default]
    #[serde(rename = "2")]
    Two,
    /// Nats.
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    /// `log_base(x)` for this base.
    pub fn log<T: Scalar>(self, x: T) -> T {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(format!("log base must be `2` or `e`, got `{other}`")),
        }
    }
}

impl Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
