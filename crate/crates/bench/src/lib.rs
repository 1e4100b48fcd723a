//! Shared setup for the criterion benchmarks.

use sbpsat_core::yee::YeeSolver;
use sbpsat_core::{cfl_max_dt, FieldScalar, GridSpec, KernelMode, MaterialGrid, SatConfig, Solver};

/// Vacuum cube of `n^3` cells with unit edge.
pub fn vacuum(n: usize) -> MaterialGrid {
    MaterialGrid::vacuum(GridSpec::cubic(n, 1.0 / n as f64).expect("valid grid"))
}

/// Solver at 0.99 of the CFL limit with a smooth nonzero initial state.
pub fn solver<T: FieldScalar>(n: usize, sat: SatConfig, mode: KernelMode) -> Solver<T> {
    let m = vacuum(n);
    let dt = 0.99 * cfl_max_dt(&m.grid, &m);
    let mut s = Solver::new(m, sat, dt).expect("valid solver");
    s.set_kernel_mode(mode);
    for (c, f) in s.fields_mut().fields.iter_mut().enumerate() {
        for (i, v) in f.data.iter_mut().enumerate() {
            *v = T::from_real(((i * 7 + c * 13) % 101) as f64 / 101.0 - 0.5);
        }
    }
    s
}

pub fn yee(n: usize) -> YeeSolver {
    let m = vacuum(n);
    let dt = 0.99 * cfl_max_dt(&m.grid, &m);
    YeeSolver::new(&m, dt).expect("valid solver")
}
