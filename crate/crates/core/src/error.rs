use thiserror::Error;

/// Errors produced by the codec, code construction, rate analysis and media layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected ({}, {}), found ({}, {})", expected.0, expected.1, found.0, found.1)]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),

    #[error("the zero vector has no canonical representative")]
    ZeroVector,

    #[error("column {0} is not an order-four column")]
    NotQuaternaryColumn(usize),

    #[error("q = {0} is not an odd prime power >= 3")]
    InvalidQ(u32),

    #[error("distortion {0} outside [0, 2/3]")]
    DistortionOutOfRange(f64),

    #[error("query {query} outside frontier range [{min}, {max}]")]
    OutsideFrontier { query: f64, min: f64, max: f64 },

    #[error("m = {m} gives D = {distortion}, not bracketed by the ternary points for mu in {mu_lo}..={mu_hi}")]
    NotBracketed {
        m: u32,
        distortion: f64,
        mu_lo: u32,
        mu_hi: u32,
    },

    #[error("no feasible change plan with at most two ±1 changes{}", block.map(|b| format!(" (block {b})")).unwrap_or_default())]
    DoubleSaturationUnresolvable { block: Option<usize> },

    #[error("capacity exceeded: need {needed_bits} bits, cover holds {available_bits}")]
    CapacityExceeded {
        needed_bits: usize,
        available_bits: usize,
    },

    #[error("cover too short to hold the 32-bit length header ({blocks} blocks)")]
    StreamTooShort { blocks: usize },

    #[error(
        "malformed header: declares {declared_bits} message bits, capacity is {capacity_bits}"
    )]
    MalformedHeader {
        declared_bits: u64,
        capacity_bits: usize,
    },

    #[error("symbol depth B = {0} is not supported here")]
    UnsupportedDepth(u32),

    #[error("symbol value {value} does not fit in {depth} bits")]
    SymbolOutOfRange { value: u32, depth: u32 },

    #[error("not a binary PGM file (expected magic \"P5\")")]
    BadMagic,

    #[error("malformed PGM header: {0}")]
    BadHeader(String),

    #[error("unsupported maxval {0} (expected 255 or 65535)")]
    UnsupportedMaxval(u32),

    #[error("payload truncated: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("raw stream of {len} bytes is not a whole number of {depth}-bit samples")]
    RawLength { len: usize, depth: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
