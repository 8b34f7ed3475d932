//! Brute-force many-body reference on the full 2^N Fock space.
//!
//! Basis convention: the occupation bitstring `b` (bit `k` = mode `k`, LSB
//! first) labels the state built by applying creation operators in
//! increasing mode order to the vacuum. Operators act with the standard
//! fermionic sign strings: annihilating or creating mode `j` picks up
//! `(-1)^(number of occupied modes below j)`.
//!
//! Reduced density matrices for arbitrary (in particular disconnected)
//! mode subsets are computed by first *reordering the modes* so the subset
//! comes first, multiplying each amplitude by the parity of that reordering
//! restricted to the occupied modes, and only then tracing out the
//! complement bitstring. Skipping the reordering sign is exactly the
//! Jordan-Wigner pitfall that makes naive spin-side partial traces wrong for
//! disconnected fermionic subsets.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::freefermion::EigenstateLabel;
use crate::linalg;
use crate::model::{build_chain_xx, Boundary, ModeHamiltonian};
use crate::{entropy, Error, Result};

/// Desk-scale guard: dense Fock-space work refuses more modes than this.
pub const DEFAULT_MODE_GUARD: usize = 14;

fn check_guard(n: usize, guard: usize) -> Result<()> {
    if n > guard {
        let dim = 1u128 << n;
        Err(Error::FockTooLarge {
            n,
            guard,
            dim,
            bytes: dim * dim * 16,
        })
    } else {
        Ok(())
    }
}

/// Normalized many-body state over occupation bitstrings.
#[derive(Debug, Clone)]
pub struct FockStateVector {
    n_modes: usize,
    amp: DVector<Complex64>,
}

impl FockStateVector {
    /// Validates the dimension (`2^n`) and the normalization (to 1e-10).
    pub fn new(n_modes: usize, amp: DVector<Complex64>) -> Result<Self> {
        if amp.len() != 1 << n_modes {
            return Err(Error::LengthMismatch {
                expected: 1 << n_modes,
                got: amp.len(),
            });
        }
        let norm = amp.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { n_modes, amp })
    }

    /// The fermionic vacuum |0...0>.
    pub fn vacuum(n_modes: usize) -> Self {
        let mut amp = DVector::zeros(1 << n_modes);
        amp[0] = Complex64::new(1.0, 0.0);
        Self { n_modes, amp }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amp(&self) -> &DVector<Complex64> {
        &self.amp
    }
}

/// Sign string below mode `j`: parity of the occupied modes with index < j.
fn jw_sign(bits: usize, j: usize) -> f64 {
    let below = bits & ((1usize << j) - 1);
    if below.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Dense matrix of `sum_ij hop[i][j] f_i^+ f_j + mu N-hat` on the 2^N Fock
/// space; block diagonal in particle number.
pub fn build_quadratic_matrix(h: &ModeHamiltonian) -> Result<DMatrix<Complex64>> {
    build_quadratic_matrix_with_guard(h, DEFAULT_MODE_GUARD)
}

pub fn build_quadratic_matrix_with_guard(
    h: &ModeHamiltonian,
    guard: usize,
) -> Result<DMatrix<Complex64>> {
    let n = h.n_modes();
    check_guard(n, guard)?;
    let dim = 1usize << n;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for x in 0..dim {
        let occ = x.count_ones() as f64;
        if h.mu() != 0.0 {
            matrix[(x, x)] += Complex64::new(h.mu() * occ, 0.0);
        }
        for j in 0..n {
            if x & (1 << j) == 0 {
                continue;
            }
            let sign_j = jw_sign(x, j);
            let removed = x & !(1 << j);
            for i in 0..n {
                let t = h.hop()[(i, j)];
                if t == Complex64::ZERO || removed & (1 << i) != 0 {
                    continue;
                }
                let sign_i = jw_sign(removed, i);
                let y = removed | (1 << i);
                matrix[(y, x)] += t * Complex64::new(sign_i * sign_j, 0.0);
            }
        }
    }
    Ok(matrix)
}

/// Dense matrix of the interacting hopping chain
/// `H = (1/2) sum_j (f_j^+ f_{j+1} + H.c.) + g sum_j n_j n_{j+1}`
/// with the chosen boundary. The hopping amplitude stays the 1/2 of the
/// free chain, so `g` is measured against that scale; `g = 0` reproduces
/// `build_quadratic_matrix` of the free chain exactly.
pub fn build_interacting_matrix(
    n: usize,
    g: f64,
    boundary: Boundary,
) -> Result<DMatrix<Complex64>> {
    build_interacting_matrix_with_guard(n, g, boundary, DEFAULT_MODE_GUARD)
}

pub fn build_interacting_matrix_with_guard(
    n: usize,
    g: f64,
    boundary: Boundary,
    guard: usize,
) -> Result<DMatrix<Complex64>> {
    check_guard(n, guard)?;
    let chain = build_chain_xx(n, boundary, 0.5)?;
    let mut matrix = build_quadratic_matrix_with_guard(&chain, guard)?;
    for x in 0..matrix.nrows() {
        matrix[(x, x)] += Complex64::new(g * interaction_diagonal(x, n, boundary), 0.0);
    }
    Ok(matrix)
}

fn interaction_diagonal(bits: usize, n: usize, boundary: Boundary) -> f64 {
    let mut pairs = 0;
    for j in 0..n - 1 {
        if bits & (1 << j) != 0 && bits & (1 << (j + 1)) != 0 {
            pairs += 1;
        }
    }
    if boundary == Boundary::Periodic && n > 2 && bits & 1 != 0 && bits & (1 << (n - 1)) != 0 {
        pairs += 1;
    }
    pairs as f64
}

/// Bitstrings of weight `k` on `n` modes, ascending. The position of a
/// bitstring in this list is its sector index.
pub fn sector_basis(n: usize, k: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|x| x.count_ones() as usize == k)
        .collect()
}

/// Exact eigenpairs of a dense Hermitian Fock-space matrix, energies
/// ascending. With `sector = Some(k)` the matrix is first restricted to the
/// weight-k bitstrings (valid whenever the matrix is number conserving) and
/// the eigenvectors are embedded back into the full space.
///
/// Degeneracy resolution is deterministic: inside a degenerate group the
/// states are ordered by their dominant bitstring (lexicographically
/// smallest first) and each phase is fixed so the dominant amplitude is real
/// positive.
pub fn eigensolve(
    matrix: &DMatrix<Complex64>,
    sector: Option<usize>,
) -> Result<Vec<(f64, FockStateVector)>> {
    let dim = matrix.nrows();
    if dim == 0 || !dim.is_power_of_two() || matrix.ncols() != dim {
        return Err(Error::InvalidArgument(format!(
            "Fock matrix must be square with power-of-two dimension, got {}x{}",
            dim,
            matrix.ncols()
        )));
    }
    let n = dim.trailing_zeros() as usize;
    linalg::check_hermitian(matrix, 1e-10)?;
    let basis: Vec<usize> = match sector {
        Some(k) => {
            if k > n {
                return Err(Error::InvalidArgument(format!(
                    "sector {k} exceeds the mode count {n}"
                )));
            }
            sector_basis(n, k)
        }
        None => (0..dim).collect(),
    };
    let sub = linalg::select_c(matrix, &basis, &basis);
    let eig = nalgebra::SymmetricEigen::new(sub);
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].partial_cmp(&eig.eigenvalues[q]).unwrap());

    let scale = order
        .iter()
        .map(|&i| eig.eigenvalues[i].abs())
        .fold(1.0f64, f64::max);
    let tol = 1e-10 * scale;
    let mut out: Vec<(f64, FockStateVector)> = Vec::with_capacity(order.len());
    let mut group_start = 0;
    while group_start < order.len() {
        let mut group_end = group_start + 1;
        let e0 = eig.eigenvalues[order[group_start]];
        while group_end < order.len() && (eig.eigenvalues[order[group_end]] - e0).abs() <= tol {
            group_end += 1;
        }
        let mut group: Vec<(usize, DVector<Complex64>)> = order[group_start..group_end]
            .iter()
            .map(|&col| {
                let mut amp = DVector::<Complex64>::zeros(dim);
                for (row, &bits) in basis.iter().enumerate() {
                    amp[bits] = eig.eigenvectors[(row, col)];
                }
                let dominant = dominant_bitstring(&amp);
                let phase = amp[dominant] / Complex64::new(amp[dominant].norm(), 0.0);
                amp *= phase.conj();
                (dominant, amp)
            })
            .collect();
        group.sort_by_key(|(dominant, _)| *dominant);
        for (col_idx, (_, amp)) in group.into_iter().enumerate() {
            let energy = eig.eigenvalues[order[group_start + col_idx]];
            out.push((energy, FockStateVector { n_modes: n, amp }));
        }
        group_start = group_end;
    }
    Ok(out)
}

fn dominant_bitstring(amp: &DVector<Complex64>) -> usize {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in amp.iter().enumerate() {
        let m = z.norm();
        if m > best_mag + 1e-15 {
            best_mag = m;
            best = i;
        }
    }
    best
}

/// Build the many-body eigenstate `|E_s> = (a_1^+)^{s_1} ... (a_N^+)^{s_N}
/// |vac>` by applying the normal-mode creation operators
/// `a_k^+ = sum_i modes[i][k] f_i^+` to the Fock vacuum, highest `k` first
/// so the k = 0 operator ends up leftmost.
pub fn eigenstate_from_modes(
    modes: &DMatrix<Complex64>,
    s: &EigenstateLabel,
) -> Result<FockStateVector> {
    let n = modes.nrows();
    check_guard(n, DEFAULT_MODE_GUARD)?;
    if modes.ncols() != n || s.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: s.len().max(modes.ncols()),
        });
    }
    let dim = 1usize << n;
    let mut amp = DVector::<Complex64>::zeros(dim);
    amp[0] = Complex64::new(1.0, 0.0);
    for k in (0..n).rev() {
        if !s.bit(k) {
            continue;
        }
        let mut next = DVector::<Complex64>::zeros(dim);
        for x in 0..dim {
            if amp[x] == Complex64::ZERO {
                continue;
            }
            for i in 0..n {
                let c = modes[(i, k)];
                if c == Complex64::ZERO || x & (1 << i) != 0 {
                    continue;
                }
                next[x | (1 << i)] += c * amp[x] * Complex64::new(jw_sign(x, i), 0.0);
            }
        }
        amp = next;
    }
    FockStateVector::new(n, amp)
}

/// Hermitian, positive semidefinite, unit-trace density matrix on the Fock
/// space of a mode subset.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() || !rho.nrows().is_power_of_two() {
            return Err(Error::InvalidDensityMatrix {
                reason: format!(
                    "must be square power-of-two, got {}x{}",
                    rho.nrows(),
                    rho.ncols()
                ),
            });
        }
        linalg::check_hermitian(&rho, 1e-10).map_err(|_| Error::InvalidDensityMatrix {
            reason: "not Hermitian".into(),
        })?;
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("trace = {trace}"),
            });
        }
        Ok(Self { rho })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }
}

/// Reduced density matrix of the modes in `subset` (in the given order).
///
/// Amplitudes are first mapped to the mode order (subset, complement), each
/// multiplied by the fermionic reordering parity of its occupied modes; the
/// complement bitstring is then traced out. Different orderings of the same
/// subset give unitarily equivalent matrices with identical spectra.
pub fn reduced_density_matrix(psi: &FockStateVector, subset: &[usize]) -> Result<DensityMatrix> {
    let n = psi.n_modes();
    linalg::validate_subset(subset, n)?;
    let m = subset.len();
    let comp: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
    let dim_s = 1usize << m;
    let dim_c = 1usize << comp.len();
    // M[a][c] = signed amplitude of (subset bits a, complement bits c).
    let mut rect = DMatrix::<Complex64>::zeros(dim_s, dim_c);
    for x in 0..psi.dim() {
        let z = psi.amp()[x];
        if z == Complex64::ZERO {
            continue;
        }
        let mut a = 0usize;
        for (p, &mode) in subset.iter().enumerate() {
            if x & (1 << mode) != 0 {
                a |= 1 << p;
            }
        }
        let mut c = 0usize;
        for (q, &mode) in comp.iter().enumerate() {
            if x & (1 << mode) != 0 {
                c |= 1 << q;
            }
        }
        rect[(a, c)] += z * Complex64::new(reordering_sign(x, subset, &comp), 0.0);
    }
    let rho = &rect * rect.adjoint();
    DensityMatrix::new(rho)
}

/// Parity of the permutation that moves the occupied modes of `x` from
/// ascending original order to the order (subset positions, complement
/// positions): the sign picked up by reordering the creation-operator string.
fn reordering_sign(x: usize, subset: &[usize], comp: &[usize]) -> f64 {
    let mut sequence: Vec<usize> = Vec::with_capacity(x.count_ones() as usize);
    for &mode in subset.iter().chain(comp.iter()) {
        if x & (1 << mode) != 0 {
            sequence.push(mode);
        }
    }
    let mut inversions = 0usize;
    for i in 0..sequence.len() {
        for j in (i + 1)..sequence.len() {
            if sequence[i] > sequence[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Eigenvalues of a density matrix as a probability vector: negatives beyond
/// -1e-10 are rejected, values below 1e-12 are clamped to zero.
pub fn rdm_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let eig = linalg::hermitian_eigenvalues(rho.matrix().clone());
    let mut probs = Vec::with_capacity(eig.len());
    for lambda in eig {
        if lambda < -1e-10 {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("negative eigenvalue {lambda}"),
            });
        }
        probs.push(if lambda < 1e-12 { 0.0 } else { lambda });
    }
    Ok(probs)
}

/// Rényi-`alpha` entropy of a density matrix in units of log 2.
pub fn rdm_entropy(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    entropy::validate_alpha(alpha)?;
    let probs = rdm_spectrum(rho)?;
    Ok(entropy::renyi_from_probs(&probs, alpha))
}

/// Ground states of the interacting chain found by sector-resolved exact
/// diagonalization: every particle-number sector is solved in its own
/// (real symmetric) basis and the states within `1e-9 * max(1, |E0|)` of the
/// global minimum are returned, ordered by sector then dominant bitstring.
/// Avoids ever materializing the full 2^n matrix.
pub fn interacting_ground_states(
    n: usize,
    g: f64,
    boundary: Boundary,
) -> Result<(f64, Vec<FockStateVector>)> {
    check_guard(n, DEFAULT_MODE_GUARD)?;
    let mut candidates: Vec<(f64, FockStateVector)> = Vec::new();
    for k in 0..=n {
        let (basis, matrix) = interacting_sector_matrix(n, g, boundary, k)?;
        let eig = nalgebra::SymmetricEigen::new(matrix);
        // Keep the sector minimum and any sector states degenerate with it.
        let e_min = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        let tol = 1e-9 * e_min.abs().max(1.0);
        for col in 0..basis.len() {
            if eig.eigenvalues[col] - e_min > tol {
                continue;
            }
            let mut amp = DVector::<Complex64>::zeros(1 << n);
            for (row, &bits) in basis.iter().enumerate() {
                amp[bits] = Complex64::new(eig.eigenvectors[(row, col)], 0.0);
            }
            let dominant = dominant_bitstring(&amp);
            if amp[dominant].re < 0.0 {
                amp = -amp;
            }
            candidates.push((eig.eigenvalues[col], FockStateVector { n_modes: n, amp }));
        }
    }
    let e0 = candidates.iter().map(|(e, _)| *e).fold(f64::MAX, f64::min);
    let tol = 1e-9 * e0.abs().max(1.0);
    let mut ground: Vec<(usize, usize, FockStateVector)> = candidates
        .into_iter()
        .filter(|(e, _)| *e - e0 <= tol)
        .map(|(_, v)| {
            let weight = dominant_bitstring(v.amp()).count_ones() as usize;
            let dominant = dominant_bitstring(v.amp());
            (weight, dominant, v)
        })
        .collect();
    ground.sort_by_key(|(w, dominant, _)| (*w, *dominant));
    Ok((e0, ground.into_iter().map(|(_, _, v)| v).collect()))
}

/// Hamiltonian of the interacting chain restricted to the weight-`k` sector,
/// as a real symmetric matrix over [`sector_basis`].
pub fn interacting_sector_matrix(
    n: usize,
    g: f64,
    boundary: Boundary,
    k: usize,
) -> Result<(Vec<usize>, DMatrix<f64>)> {
    check_guard(n, DEFAULT_MODE_GUARD)?;
    if n < 2 {
        return Err(Error::ChainTooShort { n });
    }
    if boundary == Boundary::Periodic && !n.is_multiple_of(2) {
        return Err(Error::OddPeriodicChain { n });
    }
    let basis = sector_basis(n, k);
    let index_of = |bits: usize| basis.binary_search(&bits).expect("weight is conserved");
    let mut matrix = DMatrix::<f64>::zeros(basis.len(), basis.len());
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|j| (j, j + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    for (row, &x) in basis.iter().enumerate() {
        matrix[(row, row)] += g * interaction_diagonal(x, n, boundary);
        for &(from, to) in &bonds {
            // (1/2) (f_to^+ f_from + f_from^+ f_to)
            for (src, dst) in [(from, to), (to, from)] {
                if x & (1 << src) != 0 && x & (1 << dst) == 0 {
                    let sign_src = jw_sign(x, src);
                    let removed = x & !(1 << src);
                    let sign_dst = jw_sign(removed, dst);
                    let y = removed | (1 << dst);
                    matrix[(index_of(y), row)] += 0.5 * sign_src * sign_dst;
                }
            }
        }
    }
    Ok((basis, matrix))
}
