//! Self-check suite behind `sbpsat verify`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbpsat_core::assembled::{relative_difference, to_vector, AssembledOperator};
use sbpsat_core::{
    build_sbp_pair, cfl_max_dt, verify_sbp, CellMaterial, FieldScalar, FieldSet, GridSpec, MaterialGrid, NodeGridKind,
    SatConfig, Solver,
};

pub const DEFAULT_SIZES: [usize; 5] = [4, 8, 16, 32, 64];
pub const SBP_TOL: f64 = 1e-13;
pub const NEUTRALITY_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub case: String,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub sizes: Vec<usize>,
    /// Corrupt one SBP entry and one SAT coefficient so that the suites must
    /// fail.
    pub perturb: bool,
}

pub fn sbp_rows(sizes: &[usize], perturb: bool) -> anyhow::Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        let mut pair = build_sbp_pair(n, 1.0 / n as f64)?;
        if perturb {
            pair = pair.with_perturbed_entry(NodeGridKind::Plus, 1, 0, 1e-3)?;
        }
        let r = verify_sbp(&pair);
        rows.push(CheckRow {
            suite: "sbp_identity",
            case: format!("n={n}"),
            value: r.identity_residual,
            tolerance: SBP_TOL,
        });
        rows.push(CheckRow {
            suite: "sbp_accuracy",
            case: format!("n={n}"),
            value: r.max_residual(),
            tolerance: SBP_TOL,
        });
    }
    Ok(rows)
}

pub fn sat_sets() -> anyhow::Result<Vec<(&'static str, SatConfig)>> {
    Ok(vec![("pec", SatConfig::pec()), ("pmc", SatConfig::pmc()), ("periodic", SatConfig::periodic([0.3, -0.7, 1.1])?)])
}

pub fn neutrality_rows(perturb: bool) -> anyhow::Result<Vec<CheckRow>> {
    let g = GridSpec::cubic(4, 0.25)?;
    let mut rows = Vec::new();
    for (name, mut sat) in sat_sets()? {
        if perturb {
            sat.sigma[0] = -sat.sigma[0];
            sat.chi[0] = -sat.chi[0];
        }
        let a = AssembledOperator::new(g, &sat)?;
        rows.push(CheckRow {
            suite: "energy_neutrality",
            case: name.to_string(),
            value: a.neutrality_residual(),
            tolerance: NEUTRALITY_TOL,
        });
    }
    Ok(rows)
}

fn random_fields<T: FieldScalar>(grid: GridSpec, seed: u64) -> FieldSet<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fs = FieldSet::<T>::zeros(grid);
    for f in fs.fields.iter_mut() {
        for v in f.data.iter_mut() {
            let re = rng.random_range(-1.0..1.0);
            let im = if T::IS_COMPLEX { rng.random_range(-1.0..1.0) } else { 0.0 };
            *v = T::from_complex(Complex64::new(re, im));
        }
    }
    fs
}

/// Relative difference between one kernel step and the assembled one-step
/// matrix applied to the same random state.
pub fn oracle_step_difference<T: FieldScalar>(grid: GridSpec, sat: &SatConfig, perturb: bool) -> anyhow::Result<f64> {
    let mut mats = MaterialGrid::vacuum(grid);
    mats.set_cell([1, 1, 1], CellMaterial::dielectric(4.0))?;
    let dt = 0.9 * cfl_max_dt(&grid, &mats);
    let mut kernel_sat = sat.clone();
    if perturb {
        kernel_sat.sigma[1] += 1e-3;
        kernel_sat.chi[1] += 1e-3;
    }
    let mut s = Solver::<T>::new(mats.clone(), kernel_sat, dt)?;
    *s.fields_mut() = random_fields(grid, 42);
    let u0 = to_vector(s.fields());
    s.step();
    let oracle = AssembledOperator::new(grid, sat)?;
    let expect = oracle.one_step_matrix(&mats, dt)? * u0;
    Ok(relative_difference(&to_vector(s.fields()), &expect))
}

pub fn oracle_rows(perturb: bool) -> anyhow::Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for n in [4, 5] {
        let g = GridSpec::new([n; 3], [0.1, 0.08, 0.12])?;
        for (name, sat) in sat_sets()? {
            let value = if sat.has_phase() {
                oracle_step_difference::<Complex64>(g, &sat, perturb)?
            } else {
                oracle_step_difference::<f64>(g, &sat, perturb)?
            };
            rows.push(CheckRow { suite: "oracle_step", case: format!("{name} {n}^3"), value, tolerance: ORACLE_TOL });
        }
    }
    Ok(rows)
}

pub fn run_verify(opts: &VerifyOptions) -> anyhow::Result<Vec<CheckRow>> {
    let sizes = if opts.sizes.is_empty() { DEFAULT_SIZES.to_vec() } else { opts.sizes.clone() };
    let mut rows = sbp_rows(&sizes, opts.perturb)?;
    rows.extend(neutrality_rows(opts.perturb)?);
    rows.extend(oracle_rows(opts.perturb)?);
    Ok(rows)
}

pub fn format_table(rows: &[CheckRow]) -> String {
    let mut s = format!("{:<18} {:<14} {:>12} {:>10}  status\n", "suite", "case", "residual", "tol");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<18} {:<14} {:>12.3e} {:>10.1e}  {}",
            r.suite,
            r.case,
            r.value,
            r.tolerance,
            if r.passed() { "ok" } else { "FAIL" }
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_suite_passes() {
        let rows = run_verify(&VerifyOptions { sizes: vec![4, 8], perturb: false }).unwrap();
        assert_eq!(rows.len(), 4 + 3 + 6);
        assert!(rows.iter().all(CheckRow::passed), "{}", format_table(&rows));
    }

    #[test]
    fn perturbation_fails_every_suite() {
        let rows = run_verify(&VerifyOptions { sizes: vec![4], perturb: true }).unwrap();
        for suite in ["sbp_identity", "sbp_accuracy", "energy_neutrality", "oracle_step"] {
            assert!(rows.iter().any(|r| r.suite == suite && !r.passed()), "{suite}");
        }
    }

    #[test]
    fn table_lists_sizes() {
        let rows = sbp_rows(&[4, 16], false).unwrap();
        let t = format_table(&rows);
        assert!(t.contains("n=4") && t.contains("n=16") && !t.contains("FAIL"));
    }
}
