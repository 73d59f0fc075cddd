use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by parsing, validation, layout and analysis steps.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed geometry document: {0}")]
    MalformedGeometry(String),
    #[error("duplicate region id `{id}`")]
    DuplicateRegionId { id: String },
    #[error("region `{id}` ring {ring}: {reason}")]
    BadRing { id: String, ring: usize, reason: String },
    #[error("region `{id}` has zero area")]
    ZeroAreaRegion { id: String },
    #[error("empty region id")]
    EmptyRegionId,

    #[error("{file} header: expected columns {expected}, got `{got}`")]
    BadCsvHeader {
        file: &'static str,
        expected: &'static str,
        got: String,
    },
    #[error("{file} row {row}: {reason}")]
    BadCsvRow {
        file: &'static str,
        row: usize,
        reason: String,
    },
    #[error("missing data row for region `{id}`")]
    MissingDataRow { id: String },
    #[error("data row for unknown region `{id}`")]
    UnknownRegion { id: String },
    #[error("region `{id}`: rate {value} outside [0, 1]")]
    RateOutOfRange { id: String, value: f64 },
    #[error("region `{id}`: negative population {value}")]
    NegativePopulation { id: String, value: f64 },
    #[error("duplicate city id `{id}`")]
    DuplicateCityId { id: String },
    #[error("city `{id}`: negative population {value}")]
    NegativeCityPopulation { id: String, value: f64 },
    #[error("participant `{participant}`: ranks are not a permutation of 1..{t} ({reason})")]
    RankPermutation {
        participant: String,
        t: usize,
        reason: String,
    },

    #[error("open ring: first and last vertex differ")]
    OpenRing,
    #[error("zero-area polygon")]
    ZeroAreaPolygon,
    #[error("region `{id}` has no neighbors")]
    IsolatedRegion { id: String },

    #[error("empty value list")]
    EmptyValues,
    #[error("invalid class count {k}")]
    BadClassCount { k: usize },
    #[error("palette has {got} colors but {need} classes are in effect")]
    PaletteLength { got: usize, need: usize },
    #[error("invalid color `{0}`: expected #rrggbb")]
    BadColor(String),

    #[error("zero-area region passed to shrink factor")]
    ShrinkZeroArea,
    #[error("non-positive population passed to shrink factor (apply a population floor first)")]
    ShrinkZeroPopulation,
    #[error("density {density} exceeds stated maximum {max_density}")]
    DensityAboveMax { density: f64, max_density: f64 },
    #[error("non-contiguous layout did not separate after {0} sweeps")]
    SeparationDiverged(usize),

    #[error("{op}: {reason}")]
    BadArgument { op: &'static str, reason: String },
    #[error("no cities within the requested regions")]
    NoCitiesInScope,
    #[error("need at least {need} question sets for {t} techniques")]
    TooFewQuestionSets { need: usize, t: usize },

    #[error("non-positive time value {0}")]
    NonPositiveTime(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("paired samples have different lengths ({a} vs {b})")]
    PairMismatch { a: usize, b: usize },
    #[error("need at least {need} resamples, got {got}")]
    TooFewResamples { need: usize, got: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Cli(String),
}
