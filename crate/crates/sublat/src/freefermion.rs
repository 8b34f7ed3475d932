//! Number-conserving diagonalization of sublattice-symmetric models.
//!
//! For a Hamiltonian whose hopping couples blocks A and B only, the
//! single-particle matrix in the (A, B) block basis is
//! `[[0, h_AB], [h_AB^+, 0]]`, and the singular value decomposition
//! `h_AB = U D W^+` generates the full eigenbasis in a *paired labeling*:
//!
//! - modes `k = 0 .. nb-1`: energy `+d_k`, eigenvector
//!   `(u_k, w_k) / sqrt(2)` supported on A and B;
//! - modes `k + nb`: energy `-d_k`, same A part, negated B part;
//! - modes `2 nb .. N`: exact zero modes supported on A only ("A-modes").
//!
//! The eigenstate labeled by an occupation bitstring `s` then contains
//! exactly `n(s) = sum_k s_k XOR s_{k+nb}` singlets between the blocks: a
//! pair with a single filled member is one shared singlet, a doubly filled
//! or empty pair is a product state. All Rényi entropies of block B equal
//! `n(s)`, independent of the order `alpha`, because the eigenvalues of the
//! B-restricted correlation matrix sit in {0, 1/2, 1}.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::linalg;
use crate::model::{check_sublattice, ModeHamiltonian, ModePartition, SublatticeVerdict};
use crate::{entropy, Error, Result};

/// Occupation bitstring of the normal modes, `s[k] = true` for a filled mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EigenstateLabel {
    bits: Vec<bool>,
}

impl EigenstateLabel {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Label from the binary digits of `index`: bit `k` (LSB = mode 0) is the
    /// occupation of mode `k`. This matches the Fock-basis convention in
    /// [`crate::fockoracle`].
    pub fn from_index(index: usize, n: usize) -> Self {
        Self {
            bits: (0..n).map(|k| (index >> k) & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of occupied modes.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// How [`ground_state_label`] resolves modes whose energy vanishes within
/// the zero tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// Fill exactly one member of each ambiguous pair so that the singlet
    /// count is maximal; A-modes stay empty.
    MaxEntangled,
    /// Leave every ambiguous mode empty.
    Empty,
    /// Fill every ambiguous mode.
    Filled,
}

/// Eigenbasis of a sublattice-symmetric single-particle matrix in the paired
/// labeling described in the module docs.
#[derive(Debug, Clone)]
pub struct NormalModeBasis {
    energies: Vec<f64>,
    modes: DMatrix<Complex64>,
    partition: ModePartition,
    m_z: usize,
    zero_tol: f64,
}

impl NormalModeBasis {
    pub fn n_modes(&self) -> usize {
        self.modes.nrows()
    }

    /// Eigenvalues in the paired ordering; `energies[k + nb] = -energies[k]`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Column `k` is the eigenvector of mode `k` in the site basis.
    pub fn modes(&self) -> &DMatrix<Complex64> {
        &self.modes
    }

    pub fn partition(&self) -> &ModePartition {
        &self.partition
    }

    pub fn na(&self) -> usize {
        self.partition.a_modes().len()
    }

    pub fn nb(&self) -> usize {
        self.partition.b_modes().len()
    }

    /// Count of spurious zero modes: coupling-block singular values below
    /// [`Self::zero_tol`]. A-modes are not spurious, they are structural.
    pub fn m_z(&self) -> usize {
        self.m_z
    }

    /// Scale-aware zero threshold, `1e-10 * max(1, d_max)`.
    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }
}

/// Diagonalize via the SVD of the coupling block `h_AB`.
///
/// Singular values are sorted descending (stable in the original column
/// index on ties); each column phase is fixed by making the largest
/// component of the B part real positive, so the basis is reproducible.
/// Rejected with a witness when the model is not sublattice symmetric.
pub fn sublattice_eigenbasis(h: &ModeHamiltonian) -> Result<NormalModeBasis> {
    let partition = match check_sublattice(h) {
        SublatticeVerdict::Symmetric(p) => p,
        SublatticeVerdict::Violated { witness: (i, j) } => {
            return Err(Error::SublatticeViolation { i, j })
        }
        SublatticeVerdict::NoPartitionFound => return Err(Error::NoSublatticePartition),
    };
    let n = h.n_modes();
    let a_idx = partition.a_modes().to_vec();
    let b_idx = partition.b_modes().to_vec();
    let (na, nb) = (a_idx.len(), b_idx.len());

    let mut modes = DMatrix::<Complex64>::zeros(n, n);
    let mut energies = vec![0.0f64; n];
    let (u_cols, zero_tol, m_z) = if nb == 0 {
        (DMatrix::<Complex64>::zeros(na, 0), 1e-10, 0)
    } else {
        let h_ab = linalg::select_c(h.hop(), &a_idx, &b_idx);
        let svd = h_ab.svd(true, true);
        let u = svd.u.expect("u requested");
        let v = svd.v_t.expect("v_t requested").adjoint();
        // Stable descending order by singular value, then original index.
        let mut order: Vec<usize> = (0..nb).collect();
        order.sort_by(|&p, &q| {
            svd.singular_values[q]
                .partial_cmp(&svd.singular_values[p])
                .unwrap()
                .then(p.cmp(&q))
        });
        let d_max = svd.singular_values[order[0]];
        let zero_tol = 1e-10 * d_max.max(1.0);
        let mut m_z = 0;
        let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut u_sorted = DMatrix::<Complex64>::zeros(na, nb);
        for (k, &col) in order.iter().enumerate() {
            let d = svd.singular_values[col];
            if d < zero_tol {
                m_z += 1;
            }
            let mut psi_b: DVector<Complex64> = v.column(col).into_owned();
            let mut psi_a: DVector<Complex64> = u.column(col).into_owned();
            // The same phase must multiply both halves to keep the pair an
            // eigenvector; recover the correction phase_fix applied to psi_b.
            let correction = {
                let mut tmp = psi_b.clone();
                linalg::phase_fix(&mut tmp);
                let mut corr = Complex64::new(1.0, 0.0);
                for i in 0..psi_b.len() {
                    if psi_b[i].norm() > 1e-300 {
                        corr = tmp[i] / psi_b[i];
                        break;
                    }
                }
                corr
            };
            psi_b *= correction;
            psi_a *= correction;
            u_sorted.set_column(k, &psi_a);
            energies[k] = d;
            energies[k + nb] = -d;
            for (row, &site) in a_idx.iter().enumerate() {
                modes[(site, k)] = psi_a[row] * inv_sqrt2;
                modes[(site, k + nb)] = psi_a[row] * inv_sqrt2;
            }
            for (row, &site) in b_idx.iter().enumerate() {
                modes[(site, k)] = psi_b[row] * inv_sqrt2;
                modes[(site, k + nb)] = -psi_b[row] * inv_sqrt2;
            }
        }
        (u_sorted, zero_tol, m_z)
    };

    // A-modes: orthonormal completion of the psi_A family, zero on B.
    if na > nb {
        let completion = if nb == 0 {
            DMatrix::<Complex64>::identity(na, na)
        } else {
            linalg::complete_orthonormal_c(&u_cols)
        };
        for l in 0..(na - nb) {
            let mut phi: DVector<Complex64> = completion.column(l).into_owned();
            linalg::phase_fix(&mut phi);
            for (row, &site) in a_idx.iter().enumerate() {
                modes[(site, 2 * nb + l)] = phi[row];
            }
            energies[2 * nb + l] = 0.0;
        }
    }

    Ok(NormalModeBasis {
        energies,
        modes,
        partition,
        m_z,
        zero_tol,
    })
}

/// Energy and particle number of the eigenstate labeled `s` at chemical
/// potential `mu`: `E = sum_k s_k (e_k + mu)`, `N = sum_k s_k`.
pub fn label_energy_and_number(
    basis: &NormalModeBasis,
    s: &EigenstateLabel,
    mu: f64,
) -> Result<(f64, usize)> {
    expect_len(basis, s)?;
    let mut energy = 0.0;
    let mut particles = 0;
    for (k, &bit) in s.bits().iter().enumerate() {
        if bit {
            energy += basis.energies[k] + mu;
            particles += 1;
        }
    }
    Ok((energy, particles))
}

/// Number of singlets shared between A and B in the eigenstate labeled `s`:
/// `n(s) = sum_{k<nb} s_k XOR s_{k+nb}`.
pub fn singlet_count(basis: &NormalModeBasis, s: &EigenstateLabel) -> Result<usize> {
    expect_len(basis, s)?;
    let nb = basis.nb();
    Ok((0..nb).filter(|&k| s.bit(k) != s.bit(k + nb)).count())
}

/// Label of a minimal-energy eigenstate at chemical potential `mu`: filled
/// where `e_k + mu < -zero_tol`, empty where `> zero_tol`, and resolved by
/// `policy` in between. Every returned label has minimal energy up to ties
/// within the zero tolerance; `MaxEntangled` additionally maximizes `n(s)`
/// over those ties.
pub fn ground_state_label(
    basis: &NormalModeBasis,
    mu: f64,
    policy: ZeroModePolicy,
) -> EigenstateLabel {
    let tol = basis.zero_tol;
    let n = basis.n_modes();
    let nb = basis.nb();
    let mut bits = vec![false; n];
    let resolve = |ambiguous_fill: bool| match policy {
        ZeroModePolicy::Empty => false,
        ZeroModePolicy::Filled => true,
        ZeroModePolicy::MaxEntangled => ambiguous_fill,
    };
    for k in 0..nb {
        let e_plus = basis.energies[k] + mu;
        let e_minus = basis.energies[k + nb] + mu;
        let amb_plus = e_plus.abs() <= tol;
        let amb_minus = e_minus.abs() <= tol;
        let mut occ_plus = e_plus < -tol;
        let mut occ_minus = e_minus < -tol;
        if amb_minus && amb_plus {
            // Whole pair at zero energy: one filled member makes a singlet.
            occ_minus = resolve(true);
            occ_plus = resolve(false);
        } else if amb_minus {
            occ_minus = resolve(!occ_plus);
        } else if amb_plus {
            occ_plus = resolve(!occ_minus);
        }
        bits[k] = occ_plus;
        bits[k + nb] = occ_minus;
    }
    for (k, bit) in bits.iter_mut().enumerate().skip(2 * nb) {
        let e = basis.energies[k] + mu;
        *bit = if e.abs() <= tol {
            resolve(false)
        } else {
            e < -tol
        };
    }
    EigenstateLabel::new(bits)
}

/// Two-point function matrix `C[i][j] = <f_i^+ f_j>` of a fermionic Gaussian
/// state. For an eigenstate label the full matrix is a projector and its
/// B-restricted eigenvalues lie in {0, 1/2, 1}.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    c: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    pub fn new(c: DMatrix<Complex64>) -> Result<Self> {
        linalg::check_hermitian(&c, 1e-10)?;
        Ok(Self { c })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.c
    }

    pub fn n_modes(&self) -> usize {
        self.c.nrows()
    }
}

/// Correlation matrix of the eigenstate labeled `s`:
/// `C[i][j] = sum_k s_k conj(psi_k(i)) psi_k(j)`.
pub fn correlation_matrix(
    basis: &NormalModeBasis,
    s: &EigenstateLabel,
) -> Result<CorrelationMatrix> {
    expect_len(basis, s)?;
    let n = basis.n_modes();
    let occupied: Vec<usize> = (0..n).filter(|&k| s.bit(k)).collect();
    let g = DMatrix::<Complex64>::from_fn(n, occupied.len(), |i, c| {
        basis.modes[(i, occupied[c])].conj()
    });
    let c = &g * g.adjoint();
    Ok(CorrelationMatrix { c })
}

/// Rényi-`alpha` entanglement entropy (units of log 2) of the modes in
/// `subset`, from the eigenvalues of the subset-restricted block of `C`.
/// Eigenvalues outside [0, 1] by more than 1e-12 signal a broken correlation
/// matrix and are rejected; smaller excursions are clamped. The empty subset
/// has zero entropy.
pub fn renyi_entropy(c: &CorrelationMatrix, subset: &[usize], alpha: f64) -> Result<f64> {
    entropy::validate_alpha(alpha)?;
    linalg::validate_subset(subset, c.n_modes())?;
    if subset.is_empty() {
        return Ok(0.0);
    }
    let block = linalg::select_c(&c.c, subset, subset);
    entropy_of_block(block, alpha)
}

/// Entropy of `subset` in the eigenstate labeled `s`, computed from the
/// subset block of the correlation matrix without materializing the full
/// `N x N` matrix. Identical to `renyi_entropy(correlation_matrix(..))` up
/// to roundoff; this is the path that scales to thousands of modes.
pub fn subsystem_entropy(
    basis: &NormalModeBasis,
    s: &EigenstateLabel,
    subset: &[usize],
    alpha: f64,
) -> Result<f64> {
    expect_len(basis, s)?;
    entropy::validate_alpha(alpha)?;
    linalg::validate_subset(subset, basis.n_modes())?;
    if subset.is_empty() {
        return Ok(0.0);
    }
    let occupied: Vec<usize> = (0..basis.n_modes()).filter(|&k| s.bit(k)).collect();
    let g = DMatrix::<Complex64>::from_fn(subset.len(), occupied.len(), |i, c| {
        basis.modes[(subset[i], occupied[c])].conj()
    });
    entropy_of_block(&g * g.adjoint(), alpha)
}

fn entropy_of_block(block: DMatrix<Complex64>, alpha: f64) -> Result<f64> {
    let eigenvalues = linalg::hermitian_eigenvalues(block);
    let mut total = 0.0;
    for lambda in eigenvalues {
        let lambda = entropy::clamp_unit(lambda)?;
        total += entropy::renyi_two_outcome(lambda, alpha);
    }
    Ok(total)
}

/// Ground-state entanglement entropy density of a sublattice of the periodic
/// hopping chain in the thermodynamic limit, at chemical potential `mu >= 0`:
/// `2 - (2/pi) arccos(-mu)` for `mu <= 1`, zero above.
pub fn analytic_entropy_density(mu: f64) -> Result<f64> {
    if mu < 0.0 {
        return Err(Error::NegativeMu { mu });
    }
    if mu > 1.0 {
        Ok(0.0)
    } else {
        Ok(2.0 - (2.0 / std::f64::consts::PI) * (-mu).acos())
    }
}

fn expect_len(basis: &NormalModeBasis, s: &EigenstateLabel) -> Result<()> {
    if s.len() != basis.n_modes() {
        return Err(Error::LengthMismatch {
            expected: basis.n_modes(),
            got: s.len(),
        });
    }
    Ok(())
}
