use thiserror::Error;

/// Failure modes of the ring-resonator models.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RingError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometric series diverges: |x| = {modulus} >= 1")]
    Divergent { modulus: f64 },

    #[error("splitter reflectivity out of range: N = {splitters} < Gamma*L = {loss_length}")]
    ReflectivityOutOfRange { splitters: usize, loss_length: f64 },

    #[error("resonant divergence: round-trip loop factor equals 1")]
    ResonantDivergence,

    #[error("Langevin transfer undefined at gamma_plus = 0 and zero detuning")]
    UndefinedPoint,

    #[error("truncation insufficient: {needed} terms required, cap is {cap}")]
    TruncationInsufficient { needed: f64, cap: usize },

    #[error("no real root for the input boundary coefficient (discriminant {discriminant})")]
    NoRealRoot { discriminant: f64 },

    #[error("unitarity violation: noise commutator diagonal {value} outside [0, 1]")]
    UnitarityViolation { value: f64 },

    #[error("singular matrix: |det| = {det}")]
    SingularMatrix { det: f64 },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("coincidence probability undefined: two-photon sector is empty")]
    UndefinedProbability,

    #[error("sector probabilities inconsistent: {0}")]
    Consistency(String),

    #[error("one-photon sector is empty; its density matrix is not defined")]
    NotApplicable,

    #[error("density matrix has eigenvalue {value} below clipping threshold")]
    NegativeEigenvalue { value: f64 },
}

pub type Result<T, E = RingError> = std::result::Result<T, E>;
