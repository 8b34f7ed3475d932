//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its elapsed time (run with `--nocapture` to see them).
//!
//! 1. quantization of eigenstate entanglement on the N = 12 ensemble
//! 2. maximally entangled eigenbasis of the Majorana image
//! 3. Gaussian vs Fock oracle equivalence on N in {4, 6, 8}
//! 4. Rényi order independence on the sublattice split
//! 5. chemical-potential curve against the closed form, with finite-size
//!    convergence over N in {200, 2000}
//! 6. interacting chain at N = 12 by sector-resolved exact diagonalization
//! 7. vanishing intra-B correlators in maximally entangled ground states
//! 8. structural invariants, exhaustively on N <= 8

use std::time::Instant;

use rayon::prelude::*;
use sublat::freefermion::{self, EigenstateLabel, ZeroModePolicy};
use sublat::majorana::{self, Construction};
use sublat::model::{self, Boundary, Topology};
use sublat::rng::SplitMix64;
use sublat::{entropy, fockoracle};
use sublat_cli::config::{ExperimentConfig, ExperimentKind, OutputFormat, SubsetSpec};
use sublat_cli::runner;

const ALPHAS: [f64; 4] = [0.5, 1.0, 2.0, f64::INFINITY];

/// The seeded N = 12 random chain ensemble of criterion 1; seed 7 is the
/// reference instance, the rest back criterion 7.
const ENSEMBLE_SEEDS: [u64; 5] = [7, 8, 9, 10, 11];

/// Fixed seed set of criterion 3: balanced models of 4, 6 and 8 modes in
/// both topologies.
const ORACLE_CASES: [(usize, Topology, u64); 6] = [
    (2, Topology::ChainNn, 101),
    (2, Topology::Dense, 102),
    (3, Topology::ChainNn, 103),
    (3, Topology::Dense, 104),
    (4, Topology::ChainNn, 105),
    (4, Topology::Dense, 106),
];

fn reference_model() -> model::ModeHamiltonian {
    model::build_random_bipartite(6, 6, Topology::ChainNn, ENSEMBLE_SEEDS[0]).unwrap()
}

fn pass(criterion: &str, detail: String, start: Instant) {
    println!(
        "ACCEPTANCE {criterion}: PASS ({detail}) [{:.2} s]",
        start.elapsed().as_secs_f64()
    );
}

fn base_config(kind: ExperimentKind, n: usize) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        n,
        seed: ENSEMBLE_SEEDS[0],
        boundary: None,
        topology: None,
        grid: None,
        alpha: 1.0,
        subset: SubsetSpec::default(),
        out: None,
        format: OutputFormat::Csv,
        plot: false,
    }
}

#[test]
fn criterion_1_quantization() {
    let start = Instant::now();
    let n = 12;
    let h = reference_model();
    let basis = freefermion::sublattice_eigenbasis(&h).unwrap();
    assert_eq!(basis.na(), 6);
    assert_eq!(basis.nb(), 6);
    let b_modes = basis.partition().b_modes().to_vec();

    let (min_energy, best_singlets) = (0..1usize << n)
        .into_par_iter()
        .map(|idx| {
            let s = EigenstateLabel::from_index(idx, n);
            let c = freefermion::correlation_matrix(&basis, &s).unwrap();
            let entropy = freefermion::renyi_entropy(&c, &b_modes, 1.0).unwrap();
            let count = freefermion::singlet_count(&basis, &s).unwrap();
            let nearest = entropy.round();
            assert!(
                (entropy - nearest).abs() < 1e-8 && (0.0..=6.0).contains(&nearest),
                "label {idx}: entropy {entropy} is not an integer in [0, 6]"
            );
            assert!(
                (entropy - count as f64).abs() < 1e-8,
                "label {idx}: entropy {entropy} vs n(s) = {count}"
            );
            let (energy, _) = freefermion::label_energy_and_number(&basis, &s, 0.0).unwrap();
            (energy, count)
        })
        .reduce(
            || (f64::MAX, 0),
            |a, b| {
                // Track the global minimum energy and the best singlet count
                // among labels within tolerance of it.
                let lo = a.0.min(b.0);
                let tol = 1e-9;
                let mut best = 0;
                if a.0 <= lo + tol {
                    best = best.max(a.1);
                }
                if b.0 <= lo + tol {
                    best = best.max(b.1);
                }
                (lo, best)
            },
        );
    assert_eq!(
        best_singlets, 6,
        "a minimal-energy label reaches n(s) = |B| = 6"
    );

    // The max-entangled ground-state label is such a minimal-energy label.
    let gs = freefermion::ground_state_label(&basis, 0.0, ZeroModePolicy::MaxEntangled);
    let (e_gs, _) = freefermion::label_energy_and_number(&basis, &gs, 0.0).unwrap();
    assert!(e_gs <= min_energy + 1e-9);
    assert_eq!(freefermion::singlet_count(&basis, &gs).unwrap(), 6);

    // The same sweep through the experiment runner: 4096 quantized rows.
    let cfg = base_config(ExperimentKind::SpectrumScatter, n);
    let table = runner::run_experiment(&cfg).unwrap();
    assert_eq!(table.rows.len(), 4096);
    for row in &table.rows {
        assert!((row[2] - row[4]).abs() < 1e-8 && row[4] <= 6.0);
    }
    pass(
        "criterion 1 (quantization)",
        "4096 labels, S(B) = n(s) in [0, 6]".into(),
        start,
    );
}

#[test]
fn criterion_2_maximally_entangled_basis() {
    let start = Instant::now();
    let h = reference_model();
    let (hm, _) = model::to_majorana(&h, None).unwrap();
    let nf = majorana::max_entangled_normal_form(&hm).unwrap();
    assert_eq!(nf.construction(), Construction::MaxEntangled);
    let b_idx = hm.partition().unwrap().b_idx().to_vec();
    let n_modes = nf.n_modes();

    let mut rng = SplitMix64::derive(ENSEMBLE_SEEDS[0], 0xC2);
    let labels: Vec<EigenstateLabel> = (0..100)
        .map(|_| EigenstateLabel::new((0..n_modes).map(|_| rng.next_u64() & 1 == 1).collect()))
        .collect();
    labels.par_iter().for_each(|s| {
        let gamma = majorana::covariance_of_eigenstate(&nf, s).unwrap();
        let mut max_b = 0.0f64;
        for &i in &b_idx {
            for &j in &b_idx {
                max_b = max_b.max(gamma.matrix()[(i, j)].abs());
            }
        }
        assert!(max_b < 1e-10, "|Gamma_s restricted to B| = {max_b}");
        let nu = majorana::mode_spectrum(&gamma, &b_idx).unwrap();
        for alpha in ALPHAS {
            let ent = majorana::entropy_from_modes(&nu, alpha).unwrap();
            assert!((ent - 6.0).abs() < 1e-8, "alpha {alpha}: entropy {ent}");
        }
    });
    pass(
        "criterion 2 (maximally entangled basis)",
        "100 random labels, Gamma_B = 0, S = 6 for all alpha".into(),
        start,
    );
}

/// Shared walk over the criterion-3 case list; yields per-label subset
/// spectra so criteria 3 and 4 assert on the same data.
fn oracle_walk(per_case: impl Fn(&str, &[f64], &[f64]) + Send + Sync) {
    ORACLE_CASES.par_iter().for_each(|&(half, topology, seed)| {
        let h = model::build_random_bipartite(half, half, topology, seed).unwrap();
        let n = h.n_modes();
        let basis = freefermion::sublattice_eigenbasis(&h).unwrap();
        let b_modes = basis.partition().b_modes().to_vec();

        let mut subsets: Vec<Vec<usize>> = vec![b_modes.clone()];
        for case in 0..20 {
            let mut rng = SplitMix64::derive(seed, case + 1);
            let size = 1 + (rng.next_u64() as usize) % (n - 1);
            let mut pool: Vec<usize> = (0..n).collect();
            let mut subset = Vec::with_capacity(size);
            for _ in 0..size {
                let pick = (rng.next_u64() as usize) % pool.len();
                subset.push(pool.swap_remove(pick));
            }
            subsets.push(subset);
        }

        (0..1usize << n).into_par_iter().for_each(|idx| {
            let s = EigenstateLabel::from_index(idx, n);
            let psi = fockoracle::eigenstate_from_modes(basis.modes(), &s).unwrap();
            for (ci, subset) in subsets.iter().enumerate() {
                let rho = fockoracle::reduced_density_matrix(&psi, subset).unwrap();
                let probs = fockoracle::rdm_spectrum(&rho).unwrap();
                let gauss: Vec<f64> = ALPHAS
                    .iter()
                    .map(|&alpha| {
                        freefermion::subsystem_entropy(&basis, &s, subset, alpha).unwrap()
                    })
                    .collect();
                let fock: Vec<f64> = ALPHAS
                    .iter()
                    .map(|&alpha| entropy::renyi_from_probs(&probs, alpha))
                    .collect();
                let tag =
                    format!("n = {n}, seed = {seed}, label {idx}, subset case {ci} {subset:?}");
                per_case(&tag, &gauss, &fock);
            }
        });
    });
}

#[test]
fn criterion_3_oracle_equivalence() {
    let start = Instant::now();
    oracle_walk(|tag, gauss, fock| {
        for (a, b) in gauss.iter().zip(fock) {
            assert!((a - b).abs() < 1e-8, "{tag}: gaussian {a} vs fock {b}");
        }
    });
    pass(
        "criterion 3 (oracle equivalence)",
        format!(
            "{} models, all eigenstates, B + 20 random subsets, 4 alphas",
            ORACLE_CASES.len()
        ),
        start,
    );
}

#[test]
fn criterion_4_renyi_alpha_independence() {
    let start = Instant::now();
    // Alpha independence is the subset-B statement (case 0 in the walk);
    // generic subsets are genuinely alpha dependent.
    oracle_walk(|tag, gauss, fock| {
        if !tag.contains("subset case 0 ") {
            return;
        }
        for route in [gauss, fock] {
            let hi = route.iter().cloned().fold(f64::MIN, f64::max);
            let lo = route.iter().cloned().fold(f64::MAX, f64::min);
            assert!(hi - lo < 1e-8, "{tag}: alpha spread {}", hi - lo);
        }
    });
    pass(
        "criterion 4 (Renyi alpha independence)",
        "subset B spread < 1e-8 on both routes".into(),
        start,
    );
}

#[test]
fn criterion_5_chemical_potential_curve() {
    let start = Instant::now();
    let run = |n: usize, grid: Vec<f64>| -> Vec<Vec<f64>> {
        let mut cfg = base_config(ExperimentKind::MuSweep, n);
        cfg.boundary = Some(Boundary::Periodic);
        cfg.grid = Some(grid);
        runner::run_experiment(&cfg).unwrap().rows
    };
    let mus = vec![0.0, 0.25, 0.5, 0.75];
    let rows_2000 = run(2000, mus.clone());
    for row in &rows_2000 {
        assert!(
            row[3] <= 0.01,
            "mu = {}: |density - analytic| = {} exceeds 0.01",
            row[0],
            row[3]
        );
    }
    // Above the band edge the ground state is the vacuum: exactly zero.
    for row in run(2000, vec![1.1, 2.0]) {
        assert_eq!(row[1], 0.0, "mu = {}", row[0]);
    }
    // Finite-size convergence substitutes for the thermodynamic limit.
    let rows_200 = run(200, mus);
    for (small, large) in rows_200.iter().zip(&rows_2000) {
        assert!(
            large[3] <= small[3] + 1e-12,
            "mu = {}: error grew from {} (N=200) to {} (N=2000)",
            small[0],
            small[3],
            large[3]
        );
    }
    let worst = rows_2000.iter().map(|r| r[3]).fold(0.0f64, f64::max);
    pass(
        "criterion 5 (chemical potential curve)",
        format!("N = 2000 worst |density - analytic| = {worst:.2e}"),
        start,
    );
}

#[test]
fn criterion_6_interacting_model() {
    let start = Instant::now();
    let grid = vec![
        -20.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0,
    ];
    let mut cfg = base_config(ExperimentKind::InteractionSweep, 12);
    cfg.boundary = Some(Boundary::Open);
    cfg.grid = Some(grid.clone());
    let table = runner::run_experiment(&cfg).unwrap();
    let entropy_at = |g: f64| -> f64 {
        table
            .rows
            .iter()
            .find(|r| (r[0] - g).abs() < 1e-12)
            .map(|r| r[1])
            .unwrap()
    };

    assert!(
        (entropy_at(0.0) - 6.0).abs() < 1e-6,
        "free point must be maximally entangled, got {}",
        entropy_at(0.0)
    );
    assert!(
        entropy_at(-20.0) < 0.1,
        "strong attraction: S = {}",
        entropy_at(-20.0)
    );
    // Entropy decreases toward zero for increasingly attractive coupling.
    let attractive = [0.0, -1.0, -2.0, -4.0, -8.0, -20.0];
    for pair in attractive.windows(2) {
        assert!(
            entropy_at(pair[1]) <= entropy_at(pair[0]) + 1e-6,
            "S(g = {}) = {} rose above S(g = {}) = {}",
            pair[1],
            entropy_at(pair[1]),
            pair[0],
            entropy_at(pair[0])
        );
    }
    // Repulsive side: finite and bounded above by |B| = 6.
    let mut plateau_report = String::new();
    for row in &table.rows {
        if row[0] > 0.0 {
            assert!(
                row[1].is_finite() && row[1] <= 6.0 + 1e-9,
                "g = {}: S = {}",
                row[0],
                row[1]
            );
        }
        plateau_report.push_str(&format!(
            "S({}) = {:.4} (dist to int {:.3}); ",
            row[0], row[1], row[4]
        ));
    }
    println!("criterion 6 distance-to-integer record: {plateau_report}");
    pass(
        "criterion 6 (interacting model)",
        format!(
            "S(0) = {:.6}, S(-20) = {:.3}, repulsive side bounded by 6",
            entropy_at(0.0),
            entropy_at(-20.0)
        ),
        start,
    );
}

#[test]
fn criterion_7_vanishing_intra_b_correlators() {
    let start = Instant::now();
    for seed in ENSEMBLE_SEEDS {
        let h = model::build_random_bipartite(6, 6, Topology::ChainNn, seed).unwrap();
        let basis = freefermion::sublattice_eigenbasis(&h).unwrap();
        let gs = freefermion::ground_state_label(&basis, 0.0, ZeroModePolicy::MaxEntangled);
        assert_eq!(freefermion::singlet_count(&basis, &gs).unwrap(), basis.nb());
        let c = freefermion::correlation_matrix(&basis, &gs).unwrap();
        let mut worst = 0.0f64;
        for &i in basis.partition().b_modes() {
            for &j in basis.partition().b_modes() {
                if i != j {
                    worst = worst.max(c.matrix()[(i, j)].norm());
                }
            }
        }
        assert!(worst < 1e-8, "seed {seed}: max intra-B correlator {worst}");
    }
    pass(
        "criterion 7 (vanishing intra-B correlators)",
        format!("{} seeds, max |<f_i^+ f_j>| < 1e-8", ENSEMBLE_SEEDS.len()),
        start,
    );
}

#[test]
fn criterion_8_structural_invariants() {
    let start = Instant::now();
    // Every balanced/unbalanced shape with at most 8 modes, both topologies.
    let mut shapes: Vec<(usize, usize)> = Vec::new();
    for na in 1..=7usize {
        for nb in 1..=na {
            if na + nb <= 8 {
                shapes.push((na, nb));
            }
        }
    }
    let mut checked_models = 0usize;
    for &(na, nb) in &shapes {
        for topology in [Topology::ChainNn, Topology::Dense] {
            let seed = (na * 16 + nb) as u64;
            let h = model::build_random_bipartite(na, nb, topology, seed).unwrap();
            checked_models += 1;
            structural_checks(&h);
        }
    }
    // Hopping chains, both boundaries.
    for n in 2..=8usize {
        structural_checks(&model::build_chain_xx(n, Boundary::Open, 0.5).unwrap());
        checked_models += 1;
        if n % 2 == 0 {
            structural_checks(&model::build_chain_xx(n, Boundary::Periodic, 0.5).unwrap());
            checked_models += 1;
        }
    }
    pass(
        "criterion 8 (structural invariants)",
        format!("{checked_models} models with N <= 8"),
        start,
    );
}

fn structural_checks(h: &model::ModeHamiltonian) {
    let n = h.n_modes();
    let basis = freefermion::sublattice_eigenbasis(h).unwrap();
    let nb = basis.nb();
    let m = basis.modes();

    // Energy pairing and A-mode support.
    for k in 0..nb {
        assert!((basis.energies()[k + nb] + basis.energies()[k]).abs() < 1e-12);
    }
    for k in 2 * nb..n {
        assert!(basis.energies()[k].abs() <= basis.zero_tol());
        for &site in basis.partition().b_modes() {
            assert_eq!(m[(site, k)], num_complex::Complex64::ZERO);
        }
    }

    // Orthogonality, reconstruction and conjugation relations for all three
    // normal-form constructions.
    let (hm, _) = model::to_majorana(h, None).unwrap();
    let dim = hm.n_majorana();
    let scale = hm.hm().iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    for nf in [
        majorana::normal_form(&hm).unwrap(),
        majorana::max_entangled_normal_form(&hm).unwrap(),
        majorana::number_conserving_normal_form(&hm).unwrap(),
    ] {
        let r = nf.r();
        let id = nalgebra::DMatrix::<f64>::identity(dim, dim);
        let ortho = (r * r.transpose() - id)
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(ortho < 1e-10, "R R^T = 1 violated by {ortho}");
        let rec = majorana::reconstruction_error(&nf, &hm);
        assert!(rec < 1e-10 * scale, "reconstruction error {rec}");
    }
    let k_matrix = nalgebra::DMatrix::<num_complex::Complex64>::from_fn(dim, dim, |i, j| {
        num_complex::Complex64::new(0.0, -hm.hm()[(i, j)])
    });
    let eig = nalgebra::SymmetricEigen::new(k_matrix.clone());
    for col in 0..dim {
        let e = eig.eigenvalues[col];
        let psi = eig.eigenvectors.column(col).into_owned();
        let conj = psi.map(|z| z.conj());
        let residual = &k_matrix * &conj + &conj * num_complex::Complex64::new(e, 0.0);
        assert!(residual.norm() < 1e-9 * scale, "conjugation relation");
        if e.abs() > 1e-9 * scale {
            let iso = (psi.transpose() * &psi)[(0, 0)];
            assert!(iso.norm() < 1e-10, "psi^T psi = 0 for paired modes");
        }
    }

    // RDM subset-order independence and pure-state complementarity on a few
    // labels per model.
    let mut rng = SplitMix64::derive(91, n as u64);
    for _ in 0..3 {
        let s = EigenstateLabel::from_index(rng.next_u64() as usize % (1 << n), n);
        let psi = fockoracle::eigenstate_from_modes(basis.modes(), &s).unwrap();
        let mask = 1 + rng.next_u64() as usize % ((1 << n) - 2);
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let comp: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        let mut reversed = subset.clone();
        reversed.reverse();
        let e_fwd = fockoracle::rdm_entropy(
            &fockoracle::reduced_density_matrix(&psi, &subset).unwrap(),
            1.0,
        )
        .unwrap();
        let e_rev = fockoracle::rdm_entropy(
            &fockoracle::reduced_density_matrix(&psi, &reversed).unwrap(),
            1.0,
        )
        .unwrap();
        assert!((e_fwd - e_rev).abs() < 1e-10, "subset order independence");
        if !comp.is_empty() {
            let e_comp = fockoracle::rdm_entropy(
                &fockoracle::reduced_density_matrix(&psi, &comp).unwrap(),
                1.0,
            )
            .unwrap();
            assert!((e_fwd - e_comp).abs() < 1e-8, "complementarity");
        }
    }
}
