//! Quadratic fermionic Hamiltonians with sublattice symmetry and the
//! entanglement structure of their eigenstates.
//!
//! A single-particle Hamiltonian has *sublattice symmetry* when the fermionic
//! modes split into two blocks A and B such that every nonzero hopping
//! amplitude connects A to B (equivalently, `S h S = -h` for the diagonal
//! sign matrix `S` that is +1 on A and -1 on B). Second-quantized, such
//! Hamiltonians have remarkable entanglement properties:
//!
//! - every number-conserving energy eigenstate carries an *integer* number of
//!   singlets between the sublattices, so all Rényi entropies of block B are
//!   quantized in units of log 2 and independent of the Rényi order;
//! - at least one ground state is maximally entangled between A and B;
//! - dropping number conservation, there is an eigenbasis in which *every*
//!   eigenstate is maximally entangled.
//!
//! The crate is organized in four modules mirroring the pipeline:
//!
//! - [`model`]: build and validate mode-space and Majorana-space
//!   Hamiltonians with (generalized) sublattice symmetry;
//! - [`freefermion`]: number-conserving diagonalization with the paired
//!   eigenvector labeling, singlet counting, correlation-matrix entropies and
//!   the analytic chemical-potential curve;
//! - [`majorana`]: normal forms of real antisymmetric matrices, eigenstate
//!   covariance matrices, mode spectra, and the maximally-entangled and
//!   number-conserving basis constructions;
//! - [`fockoracle`]: a brute-force many-body reference on the full
//!   2^N Fock space, including the interacting chain and fermionic reduced
//!   density matrices for arbitrary (also disconnected) mode subsets.
//!
//! All entropies are reported in units of log 2. Mode indices in the API are
//! 0-based; the JSON serialization of models is 1-based.
//!
//! # Example
//!
//! The maximally entangled ground state of a six-site hopping chain carries
//! one singlet per mode of the smaller sublattice:
//!
//! ```
//! use sublat::freefermion::{self, ZeroModePolicy};
//! use sublat::model::{build_chain_xx, Boundary};
//!
//! let chain = build_chain_xx(6, Boundary::Open, 0.5)?;
//! let basis = freefermion::sublattice_eigenbasis(&chain)?;
//! let gs = freefermion::ground_state_label(&basis, 0.0, ZeroModePolicy::MaxEntangled);
//! let c = freefermion::correlation_matrix(&basis, &gs)?;
//! let entropy = freefermion::renyi_entropy(&c, basis.partition().b_modes(), 1.0)?;
//! assert_eq!(freefermion::singlet_count(&basis, &gs)?, 3);
//! assert!((entropy - 3.0).abs() < 1e-8);
//! # Ok::<(), sublat::Error>(())
//! ```

pub mod entropy;
pub mod fockoracle;
pub mod freefermion;
pub mod majorana;
pub mod model;
pub mod rng;

pub(crate) mod linalg;

/// Errors produced by constructors and operations across the crate.
///
/// Index pairs in witnesses are 0-based.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(
        "matrix is not Hermitian: |h[{i}][{j}] - conj(h[{j}][{i}])| = {dev:.3e} exceeds {tol:.3e}"
    )]
    NotHermitian {
        i: usize,
        j: usize,
        dev: f64,
        tol: f64,
    },

    #[error("matrix is not antisymmetric at ({i},{j})")]
    NotAntisymmetric { i: usize, j: usize },

    #[error("sublattice symmetry violated: nonzero coupling between modes {i} and {j} of the same block")]
    SublatticeViolation { i: usize, j: usize },

    #[error("no sublattice partition exists for the coupling graph")]
    NoSublatticePartition,

    #[error("chain needs at least 2 sites, got {n}")]
    ChainTooShort { n: usize },

    #[error("periodic chain of odd length {n} is not bipartite")]
    OddPeriodicChain { n: usize },

    #[error("invalid partition: {reason}")]
    InvalidPartition { reason: String },

    #[error("Majorana partition splits fermionic mode {mode} across blocks")]
    PartitionSplitsMode { mode: usize },

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for {n} entries")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("subset contains duplicate index {index}")]
    DuplicateIndex { index: usize },

    #[error("Majorana subset must have even size, got {len}")]
    OddMajoranaSubset { len: usize },

    #[error("Hamiltonian does not commute with the number operator: max deviation {dev:.3e}")]
    NotNumberConserving { dev: f64 },

    #[error("operation requires the {expected} construction, got {got}")]
    WrongConstruction {
        expected: &'static str,
        got: &'static str,
    },

    #[error("Fock space for {n} modes exceeds the guard of {guard} modes (dimension 2^{n} = {dim} states, of order {bytes} bytes dense)")]
    FockTooLarge {
        n: usize,
        guard: usize,
        dim: u128,
        bytes: u128,
    },

    #[error(
        "spectrum value {value:.6e} outside [0,1] beyond the clamping window; broken input matrix"
    )]
    SpectrumOutOfRange { value: f64 },

    #[error("mode spectrum singular values do not pair: {a:.6e} vs {b:.6e}")]
    UnpairedModeSpectrum { a: f64, b: f64 },

    #[error("Rényi order must be positive, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("analytic entropy density is defined for mu >= 0, got {mu}")]
    NegativeMu { mu: f64 },

    #[error("state vector is not normalized: ||amp|| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("density matrix invalid: {reason}")]
    InvalidDensityMatrix { reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("normal form construction failed: {0}")]
    NormalFormFailure(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
