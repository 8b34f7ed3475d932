//! Normal forms of quadratic Majorana Hamiltonians and Gaussian-state
//! covariance machinery, including the two special eigenbasis constructions
//! for sublattice-symmetric models.
//!
//! Any real antisymmetric `hm` can be written `hm = R^T [ (+) e_k J2 ] R`
//! with `R` real orthogonal, `e_k >= 0` and `J2 = [[0,-1],[1,0]]`. The rows
//! `r_j` of `R` define new Majorana operators `w' = R w`; consecutive rows
//! `(r_{2k}, r_{2k+1})` span the plane of normal mode `k`. They come from
//! the eigenvectors `psi_k` of the Hermitian matrix `-i hm` with eigenvalue
//! `e_k >= 0` via `r_{2k} = sqrt(2) Re psi_k`, `r_{2k+1} = -sqrt(2) Im
//! psi_k` (0-based rows).
//!
//! For a sublattice-symmetric `hm` the degenerate eigenspaces leave a basis
//! choice, and the two entanglement statements are exactly two such choices:
//!
//! - [`max_entangled_normal_form`] picks the *real* right-singular vectors
//!   of the coupling block, which zeroes the B-restriction of every
//!   eigenstate covariance matrix: every eigenstate is maximally entangled;
//! - [`number_conserving_normal_form`] picks simultaneous eigenvectors of
//!   the number operator, where the B components come in conjugate pairs
//!   and the entanglement counts singlets pair by pair.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::freefermion::{self, EigenstateLabel};
use crate::linalg;
use crate::model::{MajoranaHamiltonian, MajoranaPartition, ModeHamiltonian};
use crate::{entropy, Error, Result};

/// Which eigenbasis the normal form realizes inside degenerate eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Solver output with the deterministic phase convention.
    Generic,
    /// Real singular vectors: every eigenstate maximally entangled.
    MaxEntangled,
    /// Number-operator eigenvectors with conjugate-paired B components.
    NumberConserving,
}

impl Construction {
    fn name(self) -> &'static str {
        match self {
            Construction::Generic => "generic",
            Construction::MaxEntangled => "max_entangled",
            Construction::NumberConserving => "number_conserving",
        }
    }
}

/// Normal form data: orthogonal `R`, non-negative mode energies, and the
/// construction that fixed the degenerate-subspace basis.
#[derive(Debug, Clone)]
pub struct MajoranaNormalForm {
    r: DMatrix<f64>,
    energies: Vec<f64>,
    construction: Construction,
    pairing_map: Option<Vec<usize>>,
    partition: Option<MajoranaPartition>,
    /// Modes whose fermionic energy was negative before the particle-hole
    /// flip that enforces `e_k >= 0` (number-conserving construction only).
    hole_flipped: Vec<bool>,
}

impl MajoranaNormalForm {
    /// Orthogonal matrix whose rows define the new Majorana operators.
    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Mode energies `e_k >= 0`, one per fermionic normal mode.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Involution pairing conjugate modes `k <-> k + |B|/2` in the
    /// number-conserving construction (identity on A-modes).
    pub fn pairing_map(&self) -> Option<&[usize]> {
        self.pairing_map.as_deref()
    }

    pub fn partition(&self) -> Option<&MajoranaPartition> {
        self.partition.as_ref()
    }

    pub fn n_modes(&self) -> usize {
        self.energies.len()
    }

    /// Row pair `(r_{2k}, r_{2k+1})` of mode `k`.
    pub fn mode_rows(&self, k: usize) -> (DVector<f64>, DVector<f64>) {
        (
            self.r.row(2 * k).transpose(),
            self.r.row(2 * k + 1).transpose(),
        )
    }

    /// Eigenstate energy `E_s = -(1/2) sum_k (-1)^{s_k} e_k`.
    pub fn eigenstate_energy(&self, s: &EigenstateLabel) -> Result<f64> {
        self.expect_len(s)?;
        Ok(self
            .energies
            .iter()
            .zip(s.bits())
            .map(|(&e, &bit)| if bit { 0.5 * e } else { -0.5 * e })
            .sum())
    }

    /// Translate occupations of the fermionic eigenbasis (energies of both
    /// signs, paired labeling) into occupations of the `e_k >= 0` normal-form
    /// modes: filling a negative fermionic mode is emptying the flipped one.
    /// Only meaningful for the number-conserving construction.
    pub fn label_from_mode_occupations(&self, s: &EigenstateLabel) -> Result<EigenstateLabel> {
        if self.construction != Construction::NumberConserving {
            return Err(Error::WrongConstruction {
                expected: Construction::NumberConserving.name(),
                got: self.construction.name(),
            });
        }
        self.expect_len(s)?;
        Ok(EigenstateLabel::new(
            s.bits()
                .iter()
                .zip(&self.hole_flipped)
                .map(|(&bit, &flip)| bit != flip)
                .collect(),
        ))
    }

    fn expect_len(&self, s: &EigenstateLabel) -> Result<()> {
        if s.len() != self.n_modes() {
            return Err(Error::LengthMismatch {
                expected: self.n_modes(),
                got: s.len(),
            });
        }
        Ok(())
    }
}

fn zero_tol_for(hm: &MajoranaHamiltonian) -> f64 {
    1e-10 * linalg::max_abs_r(hm.hm()).max(1.0)
}

/// Generic normal form from the Hermitian eigendecomposition of `-i hm`.
///
/// Eigenvectors with positive eigenvalues (sorted descending, phases fixed)
/// give the mode planes directly; the kernel, which is closed under complex
/// conjugation, is handled by pairing a real orthonormal kernel basis.
pub fn normal_form(hm: &MajoranaHamiltonian) -> Result<MajoranaNormalForm> {
    let dim = hm.n_majorana();
    let n = hm.n_modes();
    let tol = zero_tol_for(hm);
    let k_matrix =
        DMatrix::<Complex64>::from_fn(dim, dim, |i, j| Complex64::new(0.0, -hm.hm()[(i, j)]));
    let eig = nalgebra::SymmetricEigen::new(k_matrix);
    let mut positive: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > tol).collect();
    positive.sort_by(|&p, &q| {
        eig.eigenvalues[q]
            .partial_cmp(&eig.eigenvalues[p])
            .unwrap()
            .then(p.cmp(&q))
    });
    let n_zero_modes = (dim - 2 * positive.len()) / 2;
    if dim != 2 * positive.len() + 2 * n_zero_modes {
        return Err(Error::NormalFormFailure(format!(
            "spectrum of -i hm is not symmetric: {} strictly positive eigenvalues in dimension {dim}",
            positive.len()
        )));
    }

    let mut r = DMatrix::<f64>::zeros(dim, dim);
    let mut energies = Vec::with_capacity(n);
    for (k, &col) in positive.iter().enumerate() {
        let mut psi: DVector<Complex64> = eig.eigenvectors.column(col).into_owned();
        linalg::phase_fix(&mut psi);
        let sqrt2 = std::f64::consts::SQRT_2;
        for i in 0..dim {
            r[(2 * k, i)] = sqrt2 * psi[i].re;
            r[(2 * k + 1, i)] = -sqrt2 * psi[i].im;
        }
        energies.push(eig.eigenvalues[col]);
    }
    if n_zero_modes > 0 {
        // Real orthonormal kernel basis from the right-singular vectors of hm.
        let svd = hm.hm().clone().svd(false, true);
        let v_t = svd.v_t.expect("v_t requested");
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&p, &q| {
            svd.singular_values[p]
                .partial_cmp(&svd.singular_values[q])
                .unwrap()
                .then(p.cmp(&q))
        });
        let kernel: Vec<usize> = order.into_iter().take(2 * n_zero_modes).collect();
        for (slot, pair) in kernel.chunks(2).enumerate() {
            let k = positive.len() + slot;
            if svd.singular_values[pair[0]].abs() > tol || svd.singular_values[pair[1]].abs() > tol
            {
                return Err(Error::NormalFormFailure(
                    "kernel dimension mismatch between -i hm and the SVD of hm".into(),
                ));
            }
            let mut v0: DVector<f64> = v_t.row(pair[0]).transpose();
            let mut v1: DVector<f64> = v_t.row(pair[1]).transpose();
            linalg::sign_fix(&mut v0);
            linalg::sign_fix(&mut v1);
            for i in 0..dim {
                r[(2 * k, i)] = v0[i];
                r[(2 * k + 1, i)] = v1[i];
            }
            energies.push(0.0);
        }
    }
    Ok(MajoranaNormalForm {
        r,
        energies,
        construction: Construction::Generic,
        pairing_map: None,
        partition: hm.partition().cloned(),
        hole_flipped: vec![false; n],
    })
}

/// Normal form from the *real* SVD of the coupling block `hm[A][B] = V' D
/// W^T`: mode `k` has `r_{2k}` equal to column `k` of `W` embedded on B and
/// `r_{2k+1}` equal to column `k` of `V'` embedded on A. Because the B-side
/// vectors are real, the B restriction of every eigenstate covariance matrix
/// vanishes identically: every eigenstate is maximally entangled. The
/// leftover A directions pair among themselves at zero energy.
pub fn max_entangled_normal_form(hm: &MajoranaHamiltonian) -> Result<MajoranaNormalForm> {
    let partition = hm
        .partition()
        .cloned()
        .ok_or(Error::NoSublatticePartition)?;
    let dim = hm.n_majorana();
    let n = hm.n_modes();
    let a_idx = partition.a_idx().to_vec();
    let b_idx = partition.b_idx().to_vec();
    let (na, nb) = (a_idx.len(), b_idx.len());

    let block = linalg::select_r(hm.hm(), &a_idx, &b_idx);
    let mut r = DMatrix::<f64>::zeros(dim, dim);
    let mut energies = Vec::with_capacity(n);
    let v_prime = if nb == 0 {
        DMatrix::<f64>::zeros(na, 0)
    } else {
        let svd = block.svd(true, true);
        let u = svd.u.expect("u requested");
        let w = svd.v_t.expect("v_t requested").transpose();
        let mut order: Vec<usize> = (0..nb).collect();
        order.sort_by(|&p, &q| {
            svd.singular_values[q]
                .partial_cmp(&svd.singular_values[p])
                .unwrap()
                .then(p.cmp(&q))
        });
        let mut v_sorted = DMatrix::<f64>::zeros(na, nb);
        for (k, &col) in order.iter().enumerate() {
            let mut w_k: DVector<f64> = w.column(col).into_owned();
            let mut v_k: DVector<f64> = u.column(col).into_owned();
            // One shared sign keeps hm[A][B] = sum_k d_k v_k w_k^T intact.
            let flip = {
                let mut tmp = w_k.clone();
                linalg::sign_fix(&mut tmp);
                tmp != w_k
            };
            if flip {
                w_k = -w_k;
                v_k = -v_k;
            }
            v_sorted.set_column(k, &v_k);
            for (row, &idx) in b_idx.iter().enumerate() {
                r[(2 * k, idx)] = w_k[row];
            }
            for (row, &idx) in a_idx.iter().enumerate() {
                r[(2 * k + 1, idx)] = v_k[row];
            }
            energies.push(svd.singular_values[col]);
        }
        v_sorted
    };

    // Zero-coupling A directions pair among themselves; na - nb is even
    // because both block sizes are.
    let completion = if nb == 0 {
        DMatrix::<f64>::identity(na, na)
    } else {
        linalg::complete_orthonormal_r(&v_prime)
    };
    for slot in 0..(na - nb) / 2 {
        let k = nb + slot;
        let mut v0: DVector<f64> = completion.column(2 * slot).into_owned();
        let mut v1: DVector<f64> = completion.column(2 * slot + 1).into_owned();
        linalg::sign_fix(&mut v0);
        linalg::sign_fix(&mut v1);
        for (row, &idx) in a_idx.iter().enumerate() {
            r[(2 * k, idx)] = v0[row];
            r[(2 * k + 1, idx)] = v1[row];
        }
        energies.push(0.0);
    }
    Ok(MajoranaNormalForm {
        r,
        energies,
        construction: Construction::MaxEntangled,
        pairing_map: None,
        partition: Some(partition),
        hole_flipped: vec![false; n],
    })
}

/// Normal form whose modes are simultaneous eigenvectors of the number
/// operator `n = 1_N (x) J2`.
///
/// Requires `[hm, n] = 0` (checked to 1e-10 relative) and the sublattice
/// partition. The matrix is lifted back to the fermionic picture
/// (`hm = Im h (x) 1_2 + Re h (x) J2`), diagonalized there, and the unitary
/// `U` of normal modes is carried over as `R = Re U (x) 1_2 + Im U (x) J2`;
/// modes with negative fermionic energy are particle-hole flipped to make
/// every `e_k >= 0`. The sublattice pairing `k <-> k + |B|/2` makes each
/// `e_k` at least doubly degenerate.
pub fn number_conserving_normal_form(hm: &MajoranaHamiltonian) -> Result<MajoranaNormalForm> {
    let partition = hm
        .partition()
        .cloned()
        .ok_or(Error::NoSublatticePartition)?;
    let dim = hm.n_majorana();
    let n = hm.n_modes();
    let tol = zero_tol_for(hm);

    // [hm, n] = 0 with n = 1_N (x) J2.
    let mut n_mat = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..n {
        n_mat[(2 * j, 2 * j + 1)] = -1.0;
        n_mat[(2 * j + 1, 2 * j)] = 1.0;
    }
    let comm = hm.hm() * &n_mat - &n_mat * hm.hm();
    let dev = linalg::max_abs_r(&comm);
    if dev > tol {
        return Err(Error::NotNumberConserving { dev });
    }

    // Lift to the fermionic picture: hm = Im h (x) 1_2 + Re h (x) J2.
    let hop = DMatrix::<Complex64>::from_fn(n, n, |j, k| {
        Complex64::new(hm.hm()[(2 * j + 1, 2 * k)], hm.hm()[(2 * j, 2 * k)])
    });
    let mode_partition = partition.to_mode_partition()?;
    let model = ModeHamiltonian::new(hop, 0.0, Some(mode_partition))?;
    let basis = freefermion::sublattice_eigenbasis(&model)?;
    let nb = basis.nb();

    // R = Re U (x) 1_2 + Im U (x) J2 with U rows the normal modes, then a
    // particle-hole flip (negate r_{2k+1}) on the whole negative branch of
    // the paired labeling. Keying the flip on the branch position rather
    // than the sign keeps zero-energy pairs (exactly vanishing singular
    // values) on the conjugate-pairing convention the singlet count assumes.
    let mut r = DMatrix::<f64>::zeros(dim, dim);
    let mut energies = Vec::with_capacity(n);
    let mut hole_flipped = vec![false; n];
    for k in 0..n {
        let flip = (nb..2 * nb).contains(&k);
        hole_flipped[k] = flip;
        let sign = if flip { -1.0 } else { 1.0 };
        for i in 0..n {
            let u_ki = basis.modes()[(i, k)];
            r[(2 * k, 2 * i)] = u_ki.re;
            r[(2 * k, 2 * i + 1)] = -u_ki.im;
            r[(2 * k + 1, 2 * i)] = sign * u_ki.im;
            r[(2 * k + 1, 2 * i + 1)] = sign * u_ki.re;
        }
        energies.push(basis.energies()[k].abs());
    }
    let pairing_map = (0..n)
        .map(|k| {
            if k < nb {
                k + nb
            } else if k < 2 * nb {
                k - nb
            } else {
                k
            }
        })
        .collect();
    Ok(MajoranaNormalForm {
        r,
        energies,
        construction: Construction::NumberConserving,
        pairing_map: Some(pairing_map),
        partition: Some(partition),
        hole_flipped,
    })
}

/// Real antisymmetric covariance matrix `G[j][k] = (i/2) Tr(rho [w_j, w_k])`
/// of a fermionic Gaussian state. Pure states have all mode-spectrum values
/// equal to one.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    gamma: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Requires exact antisymmetry; the builders in this module produce it.
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        for i in 0..gamma.nrows() {
            for j in i..gamma.ncols() {
                if gamma[(i, j)] != -gamma[(j, i)] {
                    return Err(Error::NotAntisymmetric { i, j });
                }
            }
        }
        Ok(Self { gamma })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn n_majorana(&self) -> usize {
        self.gamma.nrows()
    }
}

/// Covariance matrix of the eigenstate labeled `s`:
/// `G_s = -sum_k (-1)^{s_k} (r_{2k+1} r_{2k}^T - r_{2k} r_{2k+1}^T)`.
pub fn covariance_of_eigenstate(
    nf: &MajoranaNormalForm,
    s: &EigenstateLabel,
) -> Result<CovarianceMatrix> {
    if s.len() != nf.n_modes() {
        return Err(Error::LengthMismatch {
            expected: nf.n_modes(),
            got: s.len(),
        });
    }
    let dim = nf.r.nrows();
    let mut raw = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..nf.n_modes() {
        let sign = if s.bit(k) { 1.0 } else { -1.0 };
        let (p0, p1) = nf.mode_rows(k);
        // -(-1)^{s_k} (p1 p0^T - p0 p1^T)
        for i in 0..dim {
            if p1[i] == 0.0 && p0[i] == 0.0 {
                continue;
            }
            for j in 0..dim {
                raw[(i, j)] += sign * (p1[i] * p0[j] - p0[i] * p1[j]);
            }
        }
    }
    // (X - X^T)/2 is antisymmetric to the last bit.
    let gamma = DMatrix::from_fn(dim, dim, |i, j| 0.5 * (raw[(i, j)] - raw[(j, i)]));
    CovarianceMatrix::new(gamma)
}

/// Mode spectrum of the restriction of `gamma` to an even-sized Majorana
/// index subset: singular values of the block, which pair up (mismatch
/// beyond 1e-8 signals a numerically broken matrix), reported once per pair
/// and clamped to at most one.
pub fn mode_spectrum(gamma: &CovarianceMatrix, subset: &[usize]) -> Result<Vec<f64>> {
    linalg::validate_subset(subset, gamma.n_majorana())?;
    if !subset.len().is_multiple_of(2) {
        return Err(Error::OddMajoranaSubset { len: subset.len() });
    }
    if subset.is_empty() {
        return Ok(Vec::new());
    }
    let block = linalg::select_r(gamma.matrix(), subset, subset);
    let svd = block.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let scale = sv[0].max(1.0);
    let mut nu = Vec::with_capacity(sv.len() / 2);
    for pair in sv.chunks(2) {
        if (pair[0] - pair[1]).abs() > 1e-8 * scale {
            return Err(Error::UnpairedModeSpectrum {
                a: pair[0],
                b: pair[1],
            });
        }
        let v = 0.5 * (pair[0] + pair[1]);
        if v > 1.0 + 1e-10 {
            return Err(Error::SpectrumOutOfRange { value: v });
        }
        nu.push(v.min(1.0));
    }
    Ok(nu)
}

/// Rényi-`alpha` entropy (units of log 2) from a mode spectrum: each mode
/// contributes the two-outcome entropy of `lambda = (1 + nu)/2`. Values
/// outside [0, 1] beyond 1e-12 are rejected.
pub fn entropy_from_modes(nu: &[f64], alpha: f64) -> Result<f64> {
    entropy::validate_alpha(alpha)?;
    let mut total = 0.0;
    for &v in nu {
        let v = entropy::clamp_unit(v)?;
        total += entropy::renyi_two_outcome(0.5 * (1.0 + v), alpha);
    }
    Ok(total)
}

/// Singlet count of the number-conserving construction:
/// `n~(s) = sum_{k < |B|/2} (s_k XOR s_{pair(k)} XOR 1)`: pairs with equal
/// occupation bits contribute one singlet (`nu_k = 0`), unequal pairs are
/// product modes (`nu_k = 1`). Equals the B entropy of the covariance route.
pub fn majorana_singlet_count(nf: &MajoranaNormalForm, s: &EigenstateLabel) -> Result<usize> {
    if nf.construction != Construction::NumberConserving {
        return Err(Error::WrongConstruction {
            expected: Construction::NumberConserving.name(),
            got: nf.construction.name(),
        });
    }
    if s.len() != nf.n_modes() {
        return Err(Error::LengthMismatch {
            expected: nf.n_modes(),
            got: s.len(),
        });
    }
    let pairing = nf
        .pairing_map
        .as_ref()
        .expect("number-conserving form has a pairing map");
    let nbf = nf
        .partition
        .as_ref()
        .expect("number-conserving form has a partition")
        .fermionic_b_modes();
    Ok((0..nbf).filter(|&k| s.bit(k) == s.bit(pairing[k])).count())
}

/// Reconstruction residual `max |R^T ((+) e_k J2) R - hm|`; the structural
/// invariant every construction must satisfy.
pub fn reconstruction_error(nf: &MajoranaNormalForm, hm: &MajoranaHamiltonian) -> f64 {
    let dim = hm.n_majorana();
    let mut d = DMatrix::<f64>::zeros(dim, dim);
    for (k, &e) in nf.energies.iter().enumerate() {
        d[(2 * k, 2 * k + 1)] = -e;
        d[(2 * k + 1, 2 * k)] = e;
    }
    let rebuilt = nf.r.transpose() * d * &nf.r;
    linalg::max_abs_r(&(rebuilt - hm.hm()))
}
