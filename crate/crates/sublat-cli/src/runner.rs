//! Experiment execution. Grid points and eigenstate labels run in parallel;
//! every per-point random draw comes from a stream derived from (seed, point
//! index), so results are identical regardless of thread scheduling, and
//! rows are emitted in index order.

use rayon::prelude::*;
use sublat::freefermion::{self, EigenstateLabel, ZeroModePolicy};
use sublat::majorana;
use sublat::model::{self, Boundary, Topology};
use sublat::rng::SplitMix64;
use sublat::fockoracle;

use crate::config::{ExperimentConfig, ExperimentKind, NamedSubset, SubsetSpec};
use crate::table::{ColumnSpec, PlotSpec, ResultTable};
use crate::{classify, RunError};

/// Largest `n` for which the 2^n eigenstate scatter stays desk sized.
pub const SCATTER_MODE_GUARD: usize = 16;
/// Largest `n` for the brute-force crosscheck (2^n labels times subsets).
pub const CROSSCHECK_MODE_GUARD: usize = 10;

const CROSSCHECK_ALPHAS: [f64; 4] = [0.5, 1.0, 2.0, f64::INFINITY];
const CROSSCHECK_RANDOM_SUBSETS: usize = 20;

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    match cfg.kind {
        ExperimentKind::SpectrumScatter => spectrum_scatter(cfg),
        ExperimentKind::MuSweep => mu_sweep(cfg),
        ExperimentKind::InteractionSweep => interaction_sweep(cfg),
        ExperimentKind::Crosscheck => crosscheck(cfg),
    }
}

fn require_sublattice_b(cfg: &ExperimentConfig) -> Result<(), RunError> {
    match cfg.subset {
        SubsetSpec::Named(NamedSubset::SublatticeB) => Ok(()),
        SubsetSpec::Explicit(_) => Err(RunError::Config(format!(
            "subset: {} only supports sublattice_b",
            cfg.kind.name()
        ))),
    }
}

fn no_grid(cfg: &ExperimentConfig) -> Result<(), RunError> {
    if cfg.grid.is_some() {
        Err(RunError::Config(format!(
            "grid: not accepted by {}",
            cfg.kind.name()
        )))
    } else {
        Ok(())
    }
}

fn grid_of(cfg: &ExperimentConfig) -> Result<Vec<f64>, RunError> {
    match &cfg.grid {
        Some(g) if !g.is_empty() => Ok(g.clone()),
        _ => Err(RunError::Config(format!(
            "grid: {} needs a nonempty grid",
            cfg.kind.name()
        ))),
    }
}

/// Split `n` chain sites into the builder's (n_a, n_b).
fn split_sites(n: usize) -> (usize, usize) {
    (n - n / 2, n / 2)
}

fn random_model(cfg: &ExperimentConfig) -> Result<model::ModeHamiltonian, RunError> {
    let (n_a, n_b) = split_sites(cfg.n);
    let topology = cfg.topology.unwrap_or(Topology::ChainNn);
    model::build_random_bipartite(n_a, n_b, topology, cfg.seed).map_err(classify)
}

/// One row per eigenstate label of a seeded random sublattice model:
/// `index, energy, entropy_log2, particles, singlet_count`. The entropy
/// column is recomputed from the correlation matrix and must match the
/// singlet count within 1e-8: a violation aborts the run.
fn spectrum_scatter(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    require_sublattice_b(cfg)?;
    no_grid(cfg)?;
    if cfg.boundary.is_some() {
        return Err(RunError::Config(
            "boundary: not accepted by spectrum_scatter".into(),
        ));
    }
    if cfg.n < 2 || cfg.n > SCATTER_MODE_GUARD {
        return Err(RunError::Config(format!(
            "n: spectrum_scatter supports 2..={SCATTER_MODE_GUARD} modes, got {}",
            cfg.n
        )));
    }
    let h = random_model(cfg)?;
    let basis = freefermion::sublattice_eigenbasis(&h).map_err(classify)?;
    let b_modes = basis.partition().b_modes().to_vec();
    let rows: Vec<Vec<f64>> = (0..1usize << cfg.n)
        .into_par_iter()
        .map(|idx| -> Result<Vec<f64>, RunError> {
            let s = EigenstateLabel::from_index(idx, cfg.n);
            let (energy, particles) =
                freefermion::label_energy_and_number(&basis, &s, 0.0).map_err(classify)?;
            let entropy = freefermion::subsystem_entropy(&basis, &s, &b_modes, cfg.alpha)
                .map_err(classify)?;
            let count = freefermion::singlet_count(&basis, &s).map_err(classify)? as f64;
            if (entropy - count).abs() > 1e-8 {
                return Err(RunError::Numeric(format!(
                    "label {idx}: entropy {entropy} deviates from singlet count {count}"
                )));
            }
            Ok(vec![idx as f64, energy, entropy, particles as f64, count])
        })
        .collect::<Result<_, _>>()?;
    ResultTable::new(
        vec![
            ColumnSpec::int("index"),
            ColumnSpec::real("energy", "energy"),
            ColumnSpec::real("entropy_log2", "log2"),
            ColumnSpec::int("particles"),
            ColumnSpec::int("singlet_count"),
        ],
        rows,
        cfg,
        PlotSpec {
            x: 1,
            y: 2,
            overlay: None,
            line: false,
        },
    )
}

/// Ground-state entropy density of sublattice B per chemical potential,
/// against the closed-form curve: `mu, density, analytic_density, abs_error`.
fn mu_sweep(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    require_sublattice_b(cfg)?;
    let grid = grid_of(cfg)?;
    if let Some(&mu) = grid.iter().find(|&&mu| mu < 0.0) {
        return Err(RunError::Config(format!(
            "grid: the analytic density needs mu >= 0, got {mu}"
        )));
    }
    let boundary = cfg.boundary.unwrap_or(Boundary::Periodic);
    let h = model::build_chain_xx(cfg.n, boundary, 0.5).map_err(classify)?;
    let basis = freefermion::sublattice_eigenbasis(&h).map_err(classify)?;
    let b_modes = basis.partition().b_modes().to_vec();
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&mu| -> Result<Vec<f64>, RunError> {
            let gs = freefermion::ground_state_label(&basis, mu, ZeroModePolicy::MaxEntangled);
            let entropy = freefermion::subsystem_entropy(&basis, &gs, &b_modes, cfg.alpha)
                .map_err(classify)?;
            let density = entropy / b_modes.len() as f64;
            let analytic = freefermion::analytic_entropy_density(mu).map_err(classify)?;
            Ok(vec![mu, density, analytic, (density - analytic).abs()])
        })
        .collect::<Result<_, _>>()?;
    ResultTable::new(
        vec![
            ColumnSpec::real("mu", "energy"),
            ColumnSpec::real("density", "log2_per_mode"),
            ColumnSpec::real("analytic_density", "log2_per_mode"),
            ColumnSpec::real("abs_error", "log2_per_mode"),
        ],
        rows,
        cfg,
        PlotSpec {
            x: 0,
            y: 1,
            overlay: Some(2),
            line: true,
        },
    )
}

/// Resolve the configured subset into 0-based mode indices for the chain.
fn chain_subset(cfg: &ExperimentConfig) -> Result<Vec<usize>, RunError> {
    match &cfg.subset {
        // 0-based odd sites are the chain's B sublattice.
        SubsetSpec::Named(NamedSubset::SublatticeB) => Ok((1..cfg.n).step_by(2).collect()),
        SubsetSpec::Explicit(one_based) => {
            let mut seen = vec![false; cfg.n];
            let mut subset = Vec::with_capacity(one_based.len());
            for &i in one_based {
                if i == 0 || i > cfg.n {
                    return Err(RunError::Config(format!(
                        "subset: index {i} outside 1..={}",
                        cfg.n
                    )));
                }
                if seen[i - 1] {
                    return Err(RunError::Config(format!("subset: duplicate index {i}")));
                }
                seen[i - 1] = true;
                subset.push(i - 1);
            }
            if subset.is_empty() {
                return Err(RunError::Config("subset: must not be empty".into()));
            }
            Ok(subset)
        }
    }
}

/// Sector-resolved exact diagonalization of the interacting chain per
/// coupling: `g, entropy_log2, ground_energy, degeneracy, nearest_int_dist`.
/// With a degenerate ground space the minimal entropy over the deterministic
/// ground basis is reported and flagged by the degeneracy column.
fn interaction_sweep(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let grid = grid_of(cfg)?;
    let boundary = cfg.boundary.unwrap_or(Boundary::Open);
    let subset = chain_subset(cfg)?;
    if cfg.n < 2 {
        return Err(RunError::Config(format!(
            "n: need at least 2 sites, got {}",
            cfg.n
        )));
    }
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&g| -> Result<Vec<f64>, RunError> {
            let (e0, states) =
                fockoracle::interacting_ground_states(cfg.n, g, boundary).map_err(classify)?;
            let mut entropy = f64::MAX;
            for state in &states {
                let rho = fockoracle::reduced_density_matrix(state, &subset).map_err(classify)?;
                let e = fockoracle::rdm_entropy(&rho, cfg.alpha).map_err(classify)?;
                entropy = entropy.min(e);
            }
            let dist = (entropy - entropy.round()).abs();
            Ok(vec![g, entropy, e0, states.len() as f64, dist])
        })
        .collect::<Result<_, _>>()?;
    ResultTable::new(
        vec![
            ColumnSpec::real("g", "energy"),
            ColumnSpec::real("entropy_log2", "log2"),
            ColumnSpec::real("ground_energy", "energy"),
            ColumnSpec::int("degeneracy"),
            ColumnSpec::real("nearest_int_dist", "log2"),
        ],
        rows,
        cfg,
        PlotSpec {
            x: 0,
            y: 1,
            overlay: None,
            line: true,
        },
    )
}

/// Majorana index pair of each fermionic mode in `modes`.
fn majorana_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect()
}

/// Maximum deviations between the correlation-matrix, covariance-matrix and
/// Fock-oracle entropies over *all* eigenstate labels, per subset case:
/// `case, subset_size, max_dev_gaussian_fock, max_dev_majorana_fock,
/// max_alpha_spread`. Case 0 is sublattice B; cases 1.. are random subsets
/// drawn from streams derived from (seed, case).
fn crosscheck(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    no_grid(cfg)?;
    if cfg.n < 2 || cfg.n > CROSSCHECK_MODE_GUARD {
        return Err(RunError::Config(format!(
            "n: crosscheck supports 2..={CROSSCHECK_MODE_GUARD} modes, got {}",
            cfg.n
        )));
    }
    let h = random_model(cfg)?;
    let basis = freefermion::sublattice_eigenbasis(&h).map_err(classify)?;
    let (hm, _) = model::to_majorana(&h, None).map_err(classify)?;
    let nf = majorana::number_conserving_normal_form(&hm).map_err(classify)?;
    let n = cfg.n;

    let mut subsets: Vec<Vec<usize>> = vec![basis.partition().b_modes().to_vec()];
    for case in 0..CROSSCHECK_RANDOM_SUBSETS {
        let mut rng = SplitMix64::derive(cfg.seed, case as u64 + 1);
        let size = 1 + (rng.next_u64() as usize) % (n - 1);
        let mut pool: Vec<usize> = (0..n).collect();
        let mut subset = Vec::with_capacity(size);
        for _ in 0..size {
            let pick = (rng.next_u64() as usize) % pool.len();
            subset.push(pool.swap_remove(pick));
        }
        subsets.push(subset);
    }

    // Per label: one Fock state, one covariance matrix; per subset: spectra
    // once, alphas on top. Reduce per-subset maxima over labels.
    let zero = vec![(0.0f64, 0.0f64, 0.0f64); subsets.len()];
    let maxima = (0..1usize << n)
        .into_par_iter()
        .map(|idx| -> Result<Vec<(f64, f64, f64)>, RunError> {
            let s = EigenstateLabel::from_index(idx, n);
            let psi = fockoracle::eigenstate_from_modes(basis.modes(), &s).map_err(classify)?;
            let normal_label = nf.label_from_mode_occupations(&s).map_err(classify)?;
            let gamma = majorana::covariance_of_eigenstate(&nf, &normal_label).map_err(classify)?;
            let mut out = Vec::with_capacity(subsets.len());
            for subset in &subsets {
                let rho = fockoracle::reduced_density_matrix(&psi, subset).map_err(classify)?;
                let nu =
                    majorana::mode_spectrum(&gamma, &majorana_indices(subset)).map_err(classify)?;
                let mut dev_gauss: f64 = 0.0;
                let mut dev_major: f64 = 0.0;
                let mut lo = f64::MAX;
                let mut hi = f64::MIN;
                for alpha in CROSSCHECK_ALPHAS {
                    let ff = freefermion::subsystem_entropy(&basis, &s, subset, alpha)
                        .map_err(classify)?;
                    let mj = majorana::entropy_from_modes(&nu, alpha).map_err(classify)?;
                    let fk = fockoracle::rdm_entropy(&rho, alpha).map_err(classify)?;
                    dev_gauss = dev_gauss.max((ff - fk).abs());
                    dev_major = dev_major.max((mj - fk).abs());
                    lo = lo.min(ff.min(mj).min(fk));
                    hi = hi.max(ff.max(mj).max(fk));
                }
                out.push((dev_gauss, dev_major, hi - lo));
            }
            Ok(out)
        })
        .try_reduce(
            || zero.clone(),
            |a, b| {
                Ok(a.iter()
                    .zip(&b)
                    .map(|(x, y)| (x.0.max(y.0), x.1.max(y.1), x.2.max(y.2)))
                    .collect())
            },
        )?;

    let rows: Vec<Vec<f64>> = maxima
        .iter()
        .enumerate()
        .map(|(case, (dg, dm, spread))| {
            vec![case as f64, subsets[case].len() as f64, *dg, *dm, *spread]
        })
        .collect();
    ResultTable::new(
        vec![
            ColumnSpec::int("case"),
            ColumnSpec::int("subset_size"),
            ColumnSpec::real("max_dev_gaussian_fock", "log2"),
            ColumnSpec::real("max_dev_majorana_fock", "log2"),
            ColumnSpec::real("max_alpha_spread", "log2"),
        ],
        rows,
        cfg,
        PlotSpec {
            x: 0,
            y: 2,
            overlay: None,
            line: false,
        },
    )
}

/// Static description printed by `sublat info`.
pub fn info_text() -> String {
    let mut s = String::new();
    s.push_str(&format!("sublat {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str("subcommands: spectrum-scatter, mu-sweep, interaction-sweep, crosscheck, info\n");
    s.push_str("rng: SplitMix64, seeded; normal deviates via Box-Muller\n");
    s.push_str(&format!(
        "guards: fock modes <= {}, scatter modes <= {}, crosscheck modes <= {}\n",
        fockoracle::DEFAULT_MODE_GUARD,
        SCATTER_MODE_GUARD,
        CROSSCHECK_MODE_GUARD
    ));
    s.push_str("exit codes: 0 ok, 2 config error, 3 numerical invariant violation\n");
    s
}
