//! Quadratic Hamiltonians with (generalized) sublattice symmetry, in the
//! fermionic mode representation and the Majorana representation.
//!
//! A [`ModeHamiltonian`] stores a Hermitian single-particle matrix `hop`
//! (the hopping amplitudes, in energy units) together with a uniform
//! chemical potential `mu` kept separate from `hop` so that the sublattice
//! pattern of the hopping part stays checkable, plus an optional
//! [`ModePartition`] into the blocks A and B. Sublattice symmetry means
//! `hop[i][j] = 0` whenever `i` and `j` belong to the same block;
//! equivalently `S hop S = -hop` for the diagonal sign matrix `S` that is
//! +1 on A and -1 on B.
//!
//! [`to_majorana`] translates the second-quantized Hamiltonian (including
//! optional pairing terms) into the quadratic Majorana form
//! `(i/4) w^T hm w`, with `hm` real antisymmetric, and reports the scalar
//! offset between the two normal orderings.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian (or a pairing
/// matrix as antisymmetric). Inputs beyond it are rejected, not repaired.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Boundary condition of chain builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Coupling topology of the random bipartite ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Nearest-neighbor couplings along a chain with alternating blocks.
    ChainNn,
    /// Every A mode coupled to every B mode.
    Dense,
}

/// Block membership of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    A,
    B,
}

/// Ordered bipartition of the `N` modes into blocks A and B with `|A| >= |B|`.
///
/// The constructor relabels (swaps the two sets) when needed to enforce the
/// size convention. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePartition {
    a: Vec<usize>,
    b: Vec<usize>,
    side: Vec<Block>,
}

impl ModePartition {
    pub fn new(a_modes: Vec<usize>, b_modes: Vec<usize>) -> Result<Self> {
        let (a, b) = if a_modes.len() >= b_modes.len() {
            (a_modes, b_modes)
        } else {
            (b_modes, a_modes)
        };
        let n = a.len() + b.len();
        let mut side = vec![None; n];
        for (&i, block) in a
            .iter()
            .map(|i| (i, Block::A))
            .chain(b.iter().map(|i| (i, Block::B)))
        {
            if i >= n {
                return Err(Error::InvalidPartition {
                    reason: format!("index {i} out of range for {n} modes"),
                });
            }
            if side[i].is_some() {
                return Err(Error::InvalidPartition {
                    reason: format!("mode {i} assigned twice"),
                });
            }
            side[i] = Some(block);
        }
        let side = side
            .into_iter()
            .map(|s| {
                s.ok_or_else(|| Error::InvalidPartition {
                    reason: "blocks do not cover all modes".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { a, b, side })
    }

    pub fn n_modes(&self) -> usize {
        self.side.len()
    }

    pub fn a_modes(&self) -> &[usize] {
        &self.a
    }

    pub fn b_modes(&self) -> &[usize] {
        &self.b
    }

    pub fn block_of(&self, mode: usize) -> Block {
        self.side[mode]
    }

    /// Diagonal of the sign matrix `S`: +1 on A, -1 on B. On a symmetric
    /// model `S hop S = -hop`.
    pub fn sign_vector(&self) -> Vec<f64> {
        self.side
            .iter()
            .map(|s| if *s == Block::A { 1.0 } else { -1.0 })
            .collect()
    }

    /// Induced partition of the 2N Majorana operators: fermionic mode `j`
    /// owns Majorana indices `2j` and `2j + 1`.
    pub fn to_majorana(&self) -> MajoranaPartition {
        let expand = |modes: &[usize]| {
            modes
                .iter()
                .flat_map(|&j| [2 * j, 2 * j + 1])
                .collect::<Vec<_>>()
        };
        MajoranaPartition::new(expand(&self.a), expand(&self.b))
            .expect("induced Majorana partition is always valid")
    }
}

/// Ordered bipartition of `2N` Majorana indices into even-sized blocks with
/// `|A| >= |B|` (the constructor relabels to enforce the convention).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajoranaPartition {
    a: Vec<usize>,
    b: Vec<usize>,
    side: Vec<Block>,
}

impl MajoranaPartition {
    pub fn new(a_idx: Vec<usize>, b_idx: Vec<usize>) -> Result<Self> {
        if !a_idx.len().is_multiple_of(2) || !b_idx.len().is_multiple_of(2) {
            return Err(Error::InvalidPartition {
                reason: format!(
                    "Majorana blocks must have even sizes, got {} and {}",
                    a_idx.len(),
                    b_idx.len()
                ),
            });
        }
        let (a, b) = if a_idx.len() >= b_idx.len() {
            (a_idx, b_idx)
        } else {
            (b_idx, a_idx)
        };
        let n = a.len() + b.len();
        let mut side = vec![None; n];
        for (&i, block) in a
            .iter()
            .map(|i| (i, Block::A))
            .chain(b.iter().map(|i| (i, Block::B)))
        {
            if i >= n {
                return Err(Error::InvalidPartition {
                    reason: format!("index {i} out of range for {n} Majorana operators"),
                });
            }
            if side[i].is_some() {
                return Err(Error::InvalidPartition {
                    reason: format!("Majorana index {i} assigned twice"),
                });
            }
            side[i] = Some(block);
        }
        let side = side
            .into_iter()
            .map(|s| {
                s.ok_or_else(|| Error::InvalidPartition {
                    reason: "blocks do not cover all Majorana indices".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { a, b, side })
    }

    pub fn n_majorana(&self) -> usize {
        self.side.len()
    }

    pub fn a_idx(&self) -> &[usize] {
        &self.a
    }

    pub fn b_idx(&self) -> &[usize] {
        &self.b
    }

    pub fn block_of(&self, idx: usize) -> Block {
        self.side[idx]
    }

    /// Number of fermionic modes carried by block B: `|B| / 2`.
    pub fn fermionic_b_modes(&self) -> usize {
        self.b.len() / 2
    }

    /// Recover the fermionic mode partition, requiring each mode's Majorana
    /// pair `(2j, 2j+1)` to sit in a single block.
    pub fn to_mode_partition(&self) -> Result<ModePartition> {
        let n = self.n_majorana() / 2;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for j in 0..n {
            match (self.side[2 * j], self.side[2 * j + 1]) {
                (Block::A, Block::A) => a.push(j),
                (Block::B, Block::B) => b.push(j),
                _ => return Err(Error::PartitionSplitsMode { mode: j }),
            }
        }
        ModePartition::new(a, b)
    }
}

/// `N` fermionic modes with Hermitian hopping matrix, uniform chemical
/// potential, and an optional sublattice partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeHamiltonian {
    hop: DMatrix<Complex64>,
    mu: f64,
    partition: Option<ModePartition>,
}

impl ModeHamiltonian {
    /// Validates Hermiticity of `hop` (relative tolerance [`HERMITICITY_TOL`];
    /// violating inputs are rejected, never symmetrized) and, when a partition
    /// is supplied, that every same-block entry of `hop` is exactly zero.
    pub fn new(hop: DMatrix<Complex64>, mu: f64, partition: Option<ModePartition>) -> Result<Self> {
        if hop.nrows() != hop.ncols() {
            return Err(Error::InvalidArgument(format!(
                "hop must be square, got {}x{}",
                hop.nrows(),
                hop.ncols()
            )));
        }
        linalg::check_hermitian(&hop, HERMITICITY_TOL)?;
        if let Some(p) = &partition {
            if p.n_modes() != hop.nrows() {
                return Err(Error::InvalidPartition {
                    reason: format!(
                        "partition covers {} modes, matrix has {}",
                        p.n_modes(),
                        hop.nrows()
                    ),
                });
            }
            check_pattern(&hop, p)?;
        }
        Ok(Self { hop, mu, partition })
    }

    pub fn n_modes(&self) -> usize {
        self.hop.nrows()
    }

    pub fn hop(&self) -> &DMatrix<Complex64> {
        &self.hop
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn partition(&self) -> Option<&ModePartition> {
        self.partition.as_ref()
    }

    /// Copy with the chemical potential replaced. The hopping part is
    /// untouched, so the sublattice check on `hop` is unaffected; only the
    /// identity of the ground state can change.
    pub fn with_chemical_potential(&self, mu: f64) -> ModeHamiltonian {
        ModeHamiltonian {
            hop: self.hop.clone(),
            mu,
            partition: self.partition.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelJson::from(self)).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ModelJson = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("model JSON: {e}")))?;
        raw.try_into()
    }
}

fn check_pattern(hop: &DMatrix<Complex64>, p: &ModePartition) -> Result<()> {
    for i in 0..hop.nrows() {
        for j in 0..hop.ncols() {
            if p.block_of(i) == p.block_of(j) && hop[(i, j)] != Complex64::ZERO {
                return Err(Error::SublatticeViolation { i, j });
            }
        }
    }
    Ok(())
}

/// JSON form of a model: matrices row-major, partition indices 1-based.
#[derive(Serialize, Deserialize)]
struct ModelJson {
    n: usize,
    hop_real: Vec<Vec<f64>>,
    hop_imag: Vec<Vec<f64>>,
    mu: f64,
    partition: Option<PartitionJson>,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl From<&ModeHamiltonian> for ModelJson {
    fn from(h: &ModeHamiltonian) -> Self {
        let n = h.n_modes();
        let row = |i: usize, f: fn(&Complex64) -> f64| (0..n).map(|j| f(&h.hop[(i, j)])).collect();
        ModelJson {
            n,
            hop_real: (0..n).map(|i| row(i, |z| z.re)).collect(),
            hop_imag: (0..n).map(|i| row(i, |z| z.im)).collect(),
            mu: h.mu,
            partition: h.partition.as_ref().map(|p| PartitionJson {
                a: p.a_modes().iter().map(|i| i + 1).collect(),
                b: p.b_modes().iter().map(|i| i + 1).collect(),
            }),
        }
    }
}

impl TryFrom<ModelJson> for ModeHamiltonian {
    type Error = Error;

    fn try_from(raw: ModelJson) -> Result<Self> {
        let n = raw.n;
        let shape_ok = raw.hop_real.len() == n
            && raw.hop_imag.len() == n
            && raw.hop_real.iter().all(|r| r.len() == n)
            && raw.hop_imag.iter().all(|r| r.len() == n);
        if !shape_ok {
            return Err(Error::InvalidArgument(format!(
                "hop_real/hop_imag must both be {n}x{n}"
            )));
        }
        let hop = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(raw.hop_real[i][j], raw.hop_imag[i][j])
        });
        let partition = match raw.partition {
            None => None,
            Some(p) => {
                let shift = |v: Vec<usize>| -> Result<Vec<usize>> {
                    v.into_iter()
                        .map(|i| {
                            i.checked_sub(1).ok_or_else(|| Error::InvalidPartition {
                                reason: "JSON partition indices are 1-based".into(),
                            })
                        })
                        .collect()
                };
                Some(ModePartition::new(shift(p.a)?, shift(p.b)?)?)
            }
        };
        ModeHamiltonian::new(hop, raw.mu, partition)
    }
}

/// Nearest-neighbor hopping chain of `n` sites with uniform real `amplitude`
/// and zero chemical potential. Sites alternate between the blocks, so the
/// partition is odd/even sites (0-based: even indices in A).
///
/// A periodic chain must have even length to stay bipartite.
pub fn build_chain_xx(n: usize, boundary: Boundary, amplitude: f64) -> Result<ModeHamiltonian> {
    if n < 2 {
        return Err(Error::ChainTooShort { n });
    }
    if boundary == Boundary::Periodic && !n.is_multiple_of(2) {
        return Err(Error::OddPeriodicChain { n });
    }
    let mut hop = DMatrix::<Complex64>::zeros(n, n);
    let t = Complex64::new(amplitude, 0.0);
    for j in 0..n - 1 {
        hop[(j, j + 1)] = t;
        hop[(j + 1, j)] = t;
    }
    if boundary == Boundary::Periodic && n > 2 {
        hop[(0, n - 1)] = t;
        hop[(n - 1, 0)] = t;
    }
    let a: Vec<usize> = (0..n).step_by(2).collect();
    let b: Vec<usize> = (1..n).step_by(2).collect();
    ModeHamiltonian::new(hop, 0.0, Some(ModePartition::new(a, b)?))
}

/// Random sublattice-symmetric model: couplings between A and B drawn i.i.d.
/// standard normal from [`SplitMix64`] seeded with `seed` (draw order is row
/// by row, so the matrix is a pure function of the arguments).
///
/// `ChainNn` interleaves the blocks along a chain (A at even positions) and
/// draws one coupling per A-B bond; when `n_a > n_b + 1` the surplus A sites
/// trail at the end of the chain and stay decoupled, which makes them exact
/// A-supported zero modes. `Dense` couples every A mode to every B mode with
/// A occupying modes `0..n_a`.
pub fn build_random_bipartite(
    n_a: usize,
    n_b: usize,
    topology: Topology,
    seed: u64,
) -> Result<ModeHamiltonian> {
    if n_b < 1 || n_a < n_b {
        return Err(Error::InvalidArgument(format!(
            "need n_a >= n_b >= 1, got n_a = {n_a}, n_b = {n_b}"
        )));
    }
    let n = n_a + n_b;
    let mut rng = SplitMix64::new(seed);
    let mut hop = DMatrix::<Complex64>::zeros(n, n);
    let (a, b): (Vec<usize>, Vec<usize>) = match topology {
        Topology::ChainNn => {
            // Alternate A, B, A, B, ... until B runs out; the tail is all A.
            let mut a = Vec::with_capacity(n_a);
            let mut b = Vec::with_capacity(n_b);
            for site in 0..n {
                if site % 2 == 1 && b.len() < n_b {
                    b.push(site);
                } else {
                    a.push(site);
                }
            }
            for site in 0..n - 1 {
                let cross = (b.contains(&site)) != (b.contains(&(site + 1)));
                if cross {
                    let t = Complex64::new(rng.standard_normal(), 0.0);
                    hop[(site, site + 1)] = t;
                    hop[(site + 1, site)] = t;
                }
            }
            (a, b)
        }
        Topology::Dense => {
            let a: Vec<usize> = (0..n_a).collect();
            let b: Vec<usize> = (n_a..n).collect();
            for &i in &a {
                for &j in &b {
                    let t = Complex64::new(rng.standard_normal(), 0.0);
                    hop[(i, j)] = t;
                    hop[(j, i)] = t;
                }
            }
            (a, b)
        }
    };
    ModeHamiltonian::new(hop, 0.0, Some(ModePartition::new(a, b)?))
}

/// Outcome of the sublattice symmetry check.
#[derive(Debug, Clone, PartialEq)]
pub enum SublatticeVerdict {
    /// The hopping part is sublattice symmetric for this partition; the sign
    /// matrix with `S hop S = -hop` is [`ModePartition::sign_vector`].
    Symmetric(ModePartition),
    /// A stored partition (or the trivial self-coupling rule) is violated by
    /// the witnessed nonzero same-block entry.
    Violated { witness: (usize, usize) },
    /// No partition is stored and the coupling graph has no 2-coloring.
    NoPartitionFound,
}

/// Verify a stored partition, or search for one by 2-coloring the graph of
/// nonzero `hop` entries. Diagonal hopping entries couple a mode to itself
/// and are always a violation (the uniform `mu` lives outside `hop` and is
/// exempt). The search colors each connected component starting from its
/// lowest-index mode.
pub fn check_sublattice(h: &ModeHamiltonian) -> SublatticeVerdict {
    let n = h.n_modes();
    let hop = h.hop();
    for i in 0..n {
        if hop[(i, i)] != Complex64::ZERO {
            return SublatticeVerdict::Violated { witness: (i, i) };
        }
    }
    if let Some(p) = h.partition() {
        for i in 0..n {
            for j in 0..n {
                if p.block_of(i) == p.block_of(j) && hop[(i, j)] != Complex64::ZERO {
                    return SublatticeVerdict::Violated { witness: (i, j) };
                }
            }
        }
        return SublatticeVerdict::Symmetric(p.clone());
    }
    // BFS 2-coloring of the nonzero coupling graph.
    let mut color: Vec<Option<Block>> = vec![None; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(Block::A);
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if hop[(i, j)] == Complex64::ZERO {
                    continue;
                }
                let next = match color[i].unwrap() {
                    Block::A => Block::B,
                    Block::B => Block::A,
                };
                match color[j] {
                    None => {
                        color[j] = Some(next);
                        queue.push_back(j);
                    }
                    Some(c) if c != next => return SublatticeVerdict::NoPartitionFound,
                    Some(_) => {}
                }
            }
        }
    }
    let a: Vec<usize> = (0..n).filter(|&i| color[i] == Some(Block::A)).collect();
    let b: Vec<usize> = (0..n).filter(|&i| color[i] == Some(Block::B)).collect();
    match ModePartition::new(a, b) {
        Ok(p) => SublatticeVerdict::Symmetric(p),
        Err(_) => SublatticeVerdict::NoPartitionFound,
    }
}

/// `2N` Majorana operators with a real antisymmetric coefficient matrix
/// (`H = (i/4) w^T hm w`) and an optional even bipartition of the Majorana
/// indices. When a partition is present, `hm` couples the two blocks only.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaHamiltonian {
    hm: DMatrix<f64>,
    partition: Option<MajoranaPartition>,
}

impl MajoranaHamiltonian {
    /// Requires an even-dimensional, exactly antisymmetric matrix (all
    /// internal builders produce bit-exact skew symmetry). With a partition,
    /// every same-block entry must vanish.
    pub fn new(hm: DMatrix<f64>, partition: Option<MajoranaPartition>) -> Result<Self> {
        let dim = hm.nrows();
        if dim != hm.ncols() || !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "Majorana matrix must be square with even dimension, got {}x{}",
                hm.nrows(),
                hm.ncols()
            )));
        }
        for i in 0..dim {
            for j in i..dim {
                if hm[(i, j)] != -hm[(j, i)] {
                    return Err(Error::NotAntisymmetric { i, j });
                }
            }
        }
        if let Some(p) = &partition {
            if p.n_majorana() != dim {
                return Err(Error::InvalidPartition {
                    reason: format!(
                        "partition covers {} Majorana indices, matrix has {}",
                        p.n_majorana(),
                        dim
                    ),
                });
            }
            for i in 0..dim {
                for j in 0..dim {
                    if p.block_of(i) == p.block_of(j) && hm[(i, j)] != 0.0 {
                        return Err(Error::SublatticeViolation { i, j });
                    }
                }
            }
        }
        Ok(Self { hm, partition })
    }

    pub fn n_majorana(&self) -> usize {
        self.hm.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.hm.nrows() / 2
    }

    pub fn hm(&self) -> &DMatrix<f64> {
        &self.hm
    }

    pub fn partition(&self) -> Option<&MajoranaPartition> {
        self.partition.as_ref()
    }
}

/// Translate to the Majorana representation, with optional pairing terms
/// `(1/2) sum_ij (p[i][j] f_i^+ f_j^+ + conj(p[i][j]) f_j f_i)` for an
/// antisymmetric complex `pairing`.
///
/// Returns `(hm, constant)` with `(i/4) w^T hm w = H + constant * 1`; the
/// constant (`-tr(hop + mu)/2` for the number-conserving part) is reported
/// rather than folded into `hm`, which must stay antisymmetric. The Majorana
/// partition is induced from the mode partition and kept only when the
/// assembled matrix actually respects it; a nonzero `mu` produces diagonal
/// blocks that break the generalized sublattice symmetry, clearing the flag.
pub fn to_majorana(
    h: &ModeHamiltonian,
    pairing: Option<&DMatrix<Complex64>>,
) -> Result<(MajoranaHamiltonian, f64)> {
    let n = h.n_modes();
    if let Some(p) = pairing {
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "pairing must be {n}x{n}, got {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        linalg::check_antisymmetric_c(p, HERMITICITY_TOL)?;
    }
    let dim = 2 * n;
    // Accumulate the coefficient of w_a w_b for a < b, plus the scalar part.
    let mut coeff = DMatrix::<Complex64>::zeros(dim, dim);
    let mut scalar = Complex64::ZERO;
    let mut add = |a: usize, b: usize, c: Complex64| {
        use std::cmp::Ordering;
        match a.cmp(&b) {
            Ordering::Equal => scalar += c, // w_a^2 = 1
            Ordering::Less => coeff[(a, b)] += c,
            Ordering::Greater => coeff[(b, a)] -= c, // w_a w_b = -w_b w_a
        }
    };
    let i_c = Complex64::new(0.0, 1.0);
    // Number-conserving part: (hop + mu) f_i^+ f_j with
    // f_i^+ = (w_{2i} + i w_{2i+1})/2 and f_j = (w_{2j} - i w_{2j+1})/2.
    for i in 0..n {
        for j in 0..n {
            let mut c = h.hop()[(i, j)];
            if i == j {
                c += Complex64::new(h.mu(), 0.0);
            }
            if c == Complex64::ZERO {
                continue;
            }
            let c = c * Complex64::new(0.25, 0.0);
            add(2 * i, 2 * j, c);
            add(2 * i, 2 * j + 1, -c * i_c);
            add(2 * i + 1, 2 * j, c * i_c);
            add(2 * i + 1, 2 * j + 1, c);
        }
    }
    if let Some(p) = pairing {
        for i in 0..n {
            for j in 0..n {
                let d = p[(i, j)];
                if d == Complex64::ZERO {
                    continue;
                }
                // (1/2) d f_i^+ f_j^+, expanded: prefactor (1/2)(1/4) = 1/8
                let c = d * Complex64::new(0.125, 0.0);
                add(2 * i, 2 * j, c);
                add(2 * i, 2 * j + 1, c * i_c);
                add(2 * i + 1, 2 * j, c * i_c);
                add(2 * i + 1, 2 * j + 1, -c);
                // (1/2) conj(d) f_j f_i
                let c = d.conj() * Complex64::new(0.125, 0.0);
                add(2 * j, 2 * i, c);
                add(2 * j, 2 * i + 1, -c * i_c);
                add(2 * j + 1, 2 * i, -c * i_c);
                add(2 * j + 1, 2 * i + 1, -c);
            }
        }
    }
    // H = sum_{a<b} coeff[a][b] w_a w_b + scalar
    //   = (i/4) w^T hm w + scalar  with  hm[a][b] = -2 i coeff[a][b].
    let mut hm = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        for b in (a + 1)..dim {
            let v = Complex64::new(0.0, -2.0) * coeff[(a, b)];
            debug_assert!(
                v.im.abs() <= 1e-9 * v.re.abs().max(1.0),
                "Hermitian input must give a real Majorana matrix"
            );
            hm[(a, b)] = v.re;
            hm[(b, a)] = -v.re;
        }
    }
    debug_assert!(scalar.im.abs() < 1e-9 * scalar.re.abs().max(1.0));
    let constant = -scalar.re;
    let partition = h.partition().map(|p| p.to_majorana()).filter(|mp| {
        (0..dim).all(|i| (0..dim).all(|j| mp.block_of(i) != mp.block_of(j) || hm[(i, j)] == 0.0))
    });
    Ok((MajoranaHamiltonian::new(hm, partition)?, constant))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn xx_chain_matches_declared_pattern() {
        let h = build_chain_xx(4, Boundary::Open, 0.5).unwrap();
        let p = h.partition().unwrap();
        // 1-based this is A = {1,3}, B = {2,4}.
        assert_eq!(p.a_modes(), &[0, 2]);
        assert_eq!(p.b_modes(), &[1, 3]);
        for j in 0..3 {
            assert_eq!(h.hop()[(j, j + 1)], c(0.5, 0.0));
        }
        assert_eq!(h.hop()[(0, 3)], Complex64::ZERO);
        assert_eq!(h.mu(), 0.0);
    }

    #[test]
    fn two_site_chain_single_particle_spectrum() {
        let h = build_chain_xx(2, Boundary::Open, 0.5).unwrap();
        let eig = nalgebra::SymmetricEigen::new(h.hop().clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 0.5).abs() < 1e-12);
        assert!((ev[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn periodic_odd_chain_rejected() {
        assert!(matches!(
            build_chain_xx(3, Boundary::Periodic, 0.5),
            Err(Error::OddPeriodicChain { n: 3 })
        ));
        assert!(matches!(
            build_chain_xx(1, Boundary::Open, 0.5),
            Err(Error::ChainTooShort { n: 1 })
        ));
    }

    #[test]
    fn random_bipartite_is_deterministic() {
        for topology in [Topology::ChainNn, Topology::Dense] {
            let h1 = build_random_bipartite(6, 6, topology, 7).unwrap();
            let h2 = build_random_bipartite(6, 6, topology, 7).unwrap();
            assert_eq!(h1.hop(), h2.hop(), "bitwise identical for equal seeds");
            let h3 = build_random_bipartite(6, 6, topology, 8).unwrap();
            assert_ne!(h1.hop(), h3.hop());
        }
    }

    #[test]
    fn dense_same_block_entries_are_zero() {
        let h = build_random_bipartite(6, 6, Topology::Dense, 1).unwrap();
        let p = h.partition().unwrap().clone();
        for &i in p.a_modes() {
            for &j in p.a_modes() {
                assert_eq!(h.hop()[(i, j)], Complex64::ZERO);
            }
        }
        for &i in p.b_modes() {
            for &j in p.b_modes() {
                assert_eq!(h.hop()[(i, j)], Complex64::ZERO);
            }
        }
    }

    #[test]
    fn sign_matrix_anticommutes_with_hop() {
        for (na, nb, topo) in [(6, 6, Topology::ChainNn), (5, 3, Topology::Dense)] {
            let h = build_random_bipartite(na, nb, topo, 3).unwrap();
            let s = h.partition().unwrap().sign_vector();
            let n = h.n_modes();
            for i in 0..n {
                for j in 0..n {
                    let lhs = s[i] * h.hop()[(i, j)] * s[j];
                    assert_eq!(lhs, -h.hop()[(i, j)], "S hop S = -hop must hold exactly");
                }
            }
        }
    }

    #[test]
    fn chemical_potential_leaves_hopping_untouched() {
        let h = build_chain_xx(4, Boundary::Open, 0.5).unwrap();
        let shifted = h.with_chemical_potential(0.5);
        assert_eq!(shifted.hop(), h.hop());
        assert_eq!(shifted.mu(), 0.5);
        let same = h.with_chemical_potential(0.0);
        assert_eq!(&same, &h);
        assert!(matches!(
            check_sublattice(&shifted),
            SublatticeVerdict::Symmetric(_)
        ));
    }

    #[test]
    fn check_sublattice_verdicts() {
        let h = build_chain_xx(4, Boundary::Open, 0.5).unwrap();
        assert!(matches!(
            check_sublattice(&h),
            SublatticeVerdict::Symmetric(_)
        ));

        // Extra same-block coupling 1-3 (0-based 0-2) violates the partition.
        let mut hop = h.hop().clone();
        hop[(0, 2)] = c(0.1, 0.0);
        hop[(2, 0)] = c(0.1, 0.0);
        let bad = ModeHamiltonian::new(hop.clone(), 0.0, None).unwrap();
        // Without a stored partition the path graph plus chord 0-2 has an odd cycle.
        assert_eq!(check_sublattice(&bad), SublatticeVerdict::NoPartitionFound);
        // With the stored partition the witness is reported.
        let stored = ModeHamiltonian::new(hop, 0.0, Some(h.partition().unwrap().clone()));
        assert!(matches!(stored, Err(Error::SublatticeViolation { .. })));

        // Diagonal entries couple a mode to itself.
        let mut hop = h.hop().clone();
        hop[(1, 1)] = c(0.3, 0.0);
        let diag = ModeHamiltonian::new(hop, 0.0, None).unwrap();
        assert_eq!(
            check_sublattice(&diag),
            SublatticeVerdict::Violated { witness: (1, 1) }
        );
    }

    #[test]
    fn two_coloring_search_finds_even_odd() {
        let h = build_chain_xx(6, Boundary::Open, 0.5).unwrap();
        let bare = ModeHamiltonian::new(h.hop().clone(), 0.0, None).unwrap();
        match check_sublattice(&bare) {
            SublatticeVerdict::Symmetric(p) => {
                assert_eq!(p.a_modes(), &[0, 2, 4]);
                assert_eq!(p.b_modes(), &[1, 3, 5]);
            }
            v => panic!("expected a partition, got {v:?}"),
        }
    }

    #[test]
    fn hermiticity_is_rejected_not_repaired() {
        let mut hop = DMatrix::<Complex64>::zeros(2, 2);
        hop[(0, 1)] = c(0.5, 0.0);
        hop[(1, 0)] = c(0.5 + 1e-6, 0.0);
        assert!(matches!(
            ModeHamiltonian::new(hop, 0.0, None),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn partition_relabels_to_size_convention() {
        let p = ModePartition::new(vec![1], vec![0, 2]).unwrap();
        assert_eq!(p.a_modes(), &[0, 2], "larger set becomes A");
        assert_eq!(p.b_modes(), &[1]);
        assert!(ModePartition::new(vec![0, 1], vec![1]).is_err());
        assert!(ModePartition::new(vec![0], vec![2]).is_err());
    }

    #[test]
    fn majorana_partition_roundtrip() {
        let p = ModePartition::new(vec![0, 2], vec![1, 3]).unwrap();
        let mp = p.to_majorana();
        assert_eq!(mp.a_idx(), &[0, 1, 4, 5]);
        assert_eq!(mp.b_idx(), &[2, 3, 6, 7]);
        assert_eq!(mp.fermionic_b_modes(), 2);
        let back = mp.to_mode_partition().unwrap();
        assert_eq!(back, p);
        assert!(MajoranaPartition::new(vec![0], vec![1, 2, 3]).is_err());
        let split = MajoranaPartition::new(vec![0, 2], vec![1, 3]).unwrap();
        assert!(matches!(
            split.to_mode_partition(),
            Err(Error::PartitionSplitsMode { mode: 0 })
        ));
    }

    #[test]
    fn single_mode_majorana_image() {
        // H = eps f^+ f via mu: hm = eps J2 and constant -eps/2.
        let eps = 0.7;
        let h = ModeHamiltonian::new(DMatrix::zeros(1, 1), eps, None).unwrap();
        let (m, constant) = to_majorana(&h, None).unwrap();
        assert_eq!(m.n_majorana(), 2);
        assert!((m.hm()[(0, 1)] + eps).abs() < 1e-15);
        assert!((m.hm()[(1, 0)] - eps).abs() < 1e-15);
        assert!((constant + eps / 2.0).abs() < 1e-15);
        // mu breaks the sublattice flag (diagonal J2 block), so no partition.
        assert!(m.partition().is_none());
    }

    #[test]
    fn real_hop_gives_re_hop_tensor_j2_pattern() {
        let h = build_chain_xx(2, Boundary::Open, 0.5).unwrap();
        let (m, constant) = to_majorana(&h, None).unwrap();
        assert_eq!(constant, 0.0, "traceless hopping");
        let hm = m.hm();
        // Expected block between sites 0 and 1: (1/2) J2.
        let mut expect = DMatrix::<f64>::zeros(4, 4);
        expect[(0, 3)] = -0.5;
        expect[(3, 0)] = 0.5;
        expect[(1, 2)] = 0.5;
        expect[(2, 1)] = -0.5;
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (hm[(i, j)] - expect[(i, j)]).abs() < 1e-15,
                    "hm[{i}][{j}] = {} vs {}",
                    hm[(i, j)],
                    expect[(i, j)]
                );
            }
        }
        assert!(m.partition().is_some(), "mu = 0 keeps the symmetry flag");
    }

    #[test]
    fn majorana_tensor_formula_for_complex_hop() {
        // hm = Im(hop) (x) 1_2 + Re(hop) (x) J2 for the number-conserving part.
        let mut hop = DMatrix::<Complex64>::zeros(2, 2);
        hop[(0, 1)] = c(0.3, 0.4);
        hop[(1, 0)] = c(0.3, -0.4);
        let h = ModeHamiltonian::new(hop.clone(), 0.0, None).unwrap();
        let (m, _) = to_majorana(&h, None).unwrap();
        let hm = m.hm();
        for i in 0..2 {
            for j in 0..2 {
                let re = hop[(i, j)].re;
                let im = hop[(i, j)].im;
                assert!((hm[(2 * i, 2 * j)] - im).abs() < 1e-15);
                assert!((hm[(2 * i + 1, 2 * j + 1)] - im).abs() < 1e-15);
                assert!((hm[(2 * i, 2 * j + 1)] + re).abs() < 1e-15);
                assert!((hm[(2 * i + 1, 2 * j)] - re).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn number_operator_constant_is_half_n() {
        // N-hat = sum f_i^+ f_i: hop = 0, mu = 1.
        let n = 5;
        let h = ModeHamiltonian::new(DMatrix::zeros(n, n), 1.0, None).unwrap();
        let (_, constant) = to_majorana(&h, None).unwrap();
        assert!((constant + n as f64 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn cross_block_pairing_keeps_symmetry_flag() {
        let h = build_chain_xx(2, Boundary::Open, 0.5).unwrap();
        let mut pairing = DMatrix::<Complex64>::zeros(2, 2);
        pairing[(0, 1)] = c(0.2, 0.1);
        pairing[(1, 0)] = c(-0.2, -0.1);
        let (m, _) = to_majorana(&h, Some(&pairing)).unwrap();
        assert!(
            m.partition().is_some(),
            "cross-block pairing respects the bipartition"
        );

        // A same-block pairing would need same-block Majorana couplings, but a
        // 2-site chain has no same-block pair; check mu instead clears it.
        let (m2, _) = to_majorana(&h.with_chemical_potential(0.1), None).unwrap();
        assert!(m2.partition().is_none());
    }

    #[test]
    fn pairing_block_matches_hand_algebra() {
        // H_p = D f_1^+ f_2^+ + conj(D) f_2 f_1 with D = d + i g expands to
        // (i/2)[g x1x2 + d x1y2 + d y1x2 - g y1y2], so the Majorana block
        // between the two modes is [[g, d], [d, -g]].
        let (d, g) = (0.3, -0.7);
        let h = ModeHamiltonian::new(DMatrix::zeros(2, 2), 0.0, None).unwrap();
        let mut pairing = DMatrix::<Complex64>::zeros(2, 2);
        pairing[(0, 1)] = c(d, g);
        pairing[(1, 0)] = c(-d, -g);
        let (m, constant) = to_majorana(&h, Some(&pairing)).unwrap();
        assert_eq!(constant, 0.0);
        let hm = m.hm();
        let expect = [[g, d], [d, -g]];
        for (i, row) in expect.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert!(
                    (hm[(i, 2 + j)] - want).abs() < 1e-15,
                    "hm[{i}][{}] = {} vs {want}",
                    2 + j,
                    hm[(i, 2 + j)]
                );
            }
        }
    }

    #[test]
    fn pairing_must_be_antisymmetric() {
        let h = build_chain_xx(2, Boundary::Open, 0.5).unwrap();
        let mut pairing = DMatrix::<Complex64>::zeros(2, 2);
        pairing[(0, 1)] = c(0.2, 0.0);
        pairing[(1, 0)] = c(0.2, 0.0);
        assert!(matches!(
            to_majorana(&h, Some(&pairing)),
            Err(Error::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn json_roundtrip_with_one_based_partition() {
        let h = build_chain_xx(4, Boundary::Open, 0.5).unwrap();
        let json = h.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["n"], 4);
        assert_eq!(v["partition"]["a"], serde_json::json!([1, 3]));
        assert_eq!(v["partition"]["b"], serde_json::json!([2, 4]));
        assert_eq!(v["hop_real"][0][1], serde_json::json!(0.5));
        let back = ModeHamiltonian::from_json(&json).unwrap();
        assert_eq!(back, h);
    }
}
