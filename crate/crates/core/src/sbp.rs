//! One-dimensional summation-by-parts operator pairs.
//!
//! Every 3D derivative in the solver is a tensor extension of the two
//! operators built here: `d_plus` maps values on the [`NodeGridKind::Minus`]
//! grid to derivatives on the [`NodeGridKind::Plus`] grid, and `d_minus`
//! goes the other way. Together with the diagonal norms `p_plus` and
//! `p_minus` they satisfy
//!
//! ```text
//! P+ D+ + (P- D-)^T = B,    B = diag-corner(-1, ..., +1)
//! ```
//!
//! which is the discrete integration-by-parts rule behind the energy
//! estimate. Material coefficients are not folded into these operators;
//! they are applied per node by the solver.

use crate::error::{Error, Result};
use crate::scalar::FieldScalar;
use nalgebra::DMatrix;

/// Minimum number of cells: the left and right boundary closures of
/// `d_minus` occupy three rows each and must not overlap.
pub const MIN_CELLS: usize = 4;

/// Residual threshold used by [`verify_sbp`].
pub const SBP_TOLERANCE: f64 = 1e-13;

/// The two staggered 1D node distributions.
///
/// `Plus`: `n + 1` nodes at `0, h, ..., nh`.
/// `Minus`: `n + 2` nodes at `0, h/2, 3h/2, ..., (n - 1/2)h, nh`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeGridKind {
    Plus,
    Minus,
}

impl NodeGridKind {
    pub fn node_count(self, n_cells: usize) -> usize {
        match self {
            NodeGridKind::Plus => n_cells + 1,
            NodeGridKind::Minus => n_cells + 2,
        }
    }

    /// The grid a derivative of values on this grid lands on.
    pub fn dual(self) -> Self {
        match self {
            NodeGridKind::Plus => NodeGridKind::Minus,
            NodeGridKind::Minus => NodeGridKind::Plus,
        }
    }

    /// Position of node `i` for a grid of `n_cells` cells of spacing `h`.
    pub fn coordinate(self, i: usize, n_cells: usize, h: f64) -> f64 {
        match self {
            NodeGridKind::Plus => i as f64 * h,
            NodeGridKind::Minus => {
                if i == 0 {
                    0.0
                } else if i == n_cells + 1 {
                    n_cells as f64 * h
                } else {
                    (i as f64 - 0.5) * h
                }
            }
        }
    }

    pub fn coordinates(self, n_cells: usize, h: f64) -> Vec<f64> {
        (0..self.node_count(n_cells)).map(|i| self.coordinate(i, n_cells, h)).collect()
    }

    /// Indices of the cells (`0..n_cells`) touching node `i` along this axis.
    ///
    /// Plus nodes sit on cell faces and touch up to two cells; Minus nodes
    /// sit at cell centres, except the two boundary nodes which sit on the
    /// domain faces and touch only the adjacent cell.
    pub fn adjacent_cells(self, i: usize, n_cells: usize) -> std::ops::Range<usize> {
        match self {
            NodeGridKind::Plus => i.saturating_sub(1)..(i + 1).min(n_cells),
            NodeGridKind::Minus => {
                if i == 0 {
                    0..1
                } else if i >= n_cells {
                    n_cells - 1..n_cells
                } else {
                    i - 1..i
                }
            }
        }
    }
}

/// A banded operator row with at most three nonzeros.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StencilRow {
    /// First source column touched by the row.
    pub start: usize,
    pub len: usize,
    pub coef: [f64; 3],
}

impl StencilRow {
    fn new(start: usize, coef: &[f64], inv_h: f64) -> Self {
        let mut c = [0.0; 3];
        for (dst, &src) in c.iter_mut().zip(coef) {
            *dst = src * inv_h;
        }
        StencilRow { start, len: coef.len(), coef: c }
    }

    #[inline]
    pub fn apply<T: FieldScalar>(&self, src: &[T]) -> T {
        let c = &self.coef;
        match src[self.start..self.start + self.len] {
            [] => T::zero(),
            [a] => a * c[0],
            [a, b] => a * c[0] + b * c[1],
            [a, b, d] => a * c[0] + b * c[1] + d * c[2],
            _ => unreachable!("stencil rows hold at most three entries"),
        }
    }

    pub fn nonzeros(&self) -> usize {
        self.coef[..self.len].iter().filter(|c| **c != 0.0).count()
    }
}

/// The `D+`/`D-` operators and their norms for one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SbpOperatorPair {
    n_cells: usize,
    h: f64,
    d_plus: Vec<StencilRow>,
    d_minus: Vec<StencilRow>,
    p_plus: Vec<f64>,
    p_minus: Vec<f64>,
}

/// Build the second-order staggered SBP pair for `n_cells` cells of width `h`.
pub fn build_sbp_pair(n_cells: usize, h: f64) -> Result<SbpOperatorPair> {
    if n_cells < MIN_CELLS {
        return Err(Error::GridTooSmall(n_cells));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidSpacing(h));
    }
    let n = n_cells;
    let inv_h = 1.0 / h;

    // D+ : (n+1) x (n+2), acting on Minus-grid values.
    let mut d_plus = Vec::with_capacity(n + 1);
    d_plus.push(StencilRow::new(0, &[-1.0, 0.5, 0.5], inv_h));
    d_plus.push(StencilRow::new(0, &[-0.5, -0.25, 0.75], inv_h));
    for i in 2..=n - 2 {
        d_plus.push(StencilRow::new(i, &[-1.0, 1.0], inv_h));
    }
    d_plus.push(StencilRow::new(n - 1, &[-0.75, 0.25, 0.5], inv_h));
    d_plus.push(StencilRow::new(n - 1, &[-0.5, -0.5, 1.0], inv_h));

    // D- : (n+2) x (n+1), acting on Plus-grid values.
    let mut d_minus = Vec::with_capacity(n + 2);
    d_minus.push(StencilRow::new(0, &[-1.0, 1.0], inv_h));
    d_minus.push(StencilRow::new(0, &[-1.0, 1.0], inv_h));
    d_minus.push(StencilRow::new(0, &[-0.2, -0.6, 0.8], inv_h));
    for i in 3..=n - 2 {
        d_minus.push(StencilRow::new(i - 1, &[-1.0, 1.0], inv_h));
    }
    d_minus.push(StencilRow::new(n - 2, &[-0.8, 0.6, 0.2], inv_h));
    d_minus.push(StencilRow::new(n - 1, &[-1.0, 1.0], inv_h));
    d_minus.push(StencilRow::new(n - 1, &[-1.0, 1.0], inv_h));

    let mut p_plus = vec![h; n + 1];
    p_plus[0] = 0.5 * h;
    p_plus[n] = 0.5 * h;

    let mut p_minus = vec![h; n + 2];
    for (idx, w) in [(0, 0.5), (1, 0.25), (2, 1.25)] {
        p_minus[idx] = w * h;
        p_minus[n + 1 - idx] = w * h;
    }

    Ok(SbpOperatorPair { n_cells, h, d_plus, d_minus, p_plus, p_minus })
}

impl SbpOperatorPair {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Rows of the operator whose *result* lives on `dest`.
    ///
    /// `dest = Plus` selects `d_plus` (source on the Minus grid) and
    /// `dest = Minus` selects `d_minus`.
    pub fn rows(&self, dest: NodeGridKind) -> &[StencilRow] {
        match dest {
            NodeGridKind::Plus => &self.d_plus,
            NodeGridKind::Minus => &self.d_minus,
        }
    }

    pub fn norm(&self, kind: NodeGridKind) -> &[f64] {
        match kind {
            NodeGridKind::Plus => &self.p_plus,
            NodeGridKind::Minus => &self.p_minus,
        }
    }

    /// Norm weight of the boundary node on either end (both grids: `h/2`).
    pub fn boundary_weight(&self) -> f64 {
        self.p_plus[0]
    }

    /// Apply `d_plus` (`dest = Plus`) or `d_minus` (`dest = Minus`) row by row.
    pub fn apply_d<T: FieldScalar>(&self, dest: NodeGridKind, values: &[T]) -> Result<Vec<T>> {
        let expected = dest.dual().node_count(self.n_cells);
        if values.len() != expected {
            return Err(Error::Dimension { expected, actual: values.len() });
        }
        Ok(self.rows(dest).iter().map(|r| r.apply(values)).collect())
    }

    pub fn assemble_dense(&self, dest: NodeGridKind) -> DMatrix<f64> {
        let rows = self.rows(dest);
        let ncols = dest.dual().node_count(self.n_cells);
        let mut m = DMatrix::zeros(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            for k in 0..r.len {
                m[(i, r.start + k)] += r.coef[k];
            }
        }
        m
    }

    /// `Q = P D` for the selected operator, assembled densely.
    pub fn q_dense(&self, dest: NodeGridKind) -> DMatrix<f64> {
        let mut q = self.assemble_dense(dest);
        for (i, w) in self.norm(dest).iter().enumerate() {
            q.row_mut(i).scale_mut(*w);
        }
        q
    }

    /// The `(n+1) x (n+2)` boundary matrix with `-1` top-left, `+1` bottom-right.
    pub fn boundary_matrix(&self) -> DMatrix<f64> {
        let n = self.n_cells;
        let mut b = DMatrix::zeros(n + 1, n + 2);
        b[(0, 0)] = -1.0;
        b[(n, n + 1)] = 1.0;
        b
    }

    /// Copy of this pair with one stored stencil coefficient shifted by `delta`.
    /// Used to check that verification catches corrupted operators.
    pub fn with_perturbed_entry(&self, dest: NodeGridKind, row: usize, offset: usize, delta: f64) -> Result<Self> {
        let mut out = self.clone();
        let rows = match dest {
            NodeGridKind::Plus => &mut out.d_plus,
            NodeGridKind::Minus => &mut out.d_minus,
        };
        let r = rows.get_mut(row).ok_or_else(|| Error::OutOfRange(format!("operator row {row}")))?;
        if offset >= r.len {
            return Err(Error::OutOfRange(format!("stencil offset {offset} in row {row}")));
        }
        r.coef[offset] += delta;
        Ok(out)
    }
}

/// Residuals of the SBP identity and the first-order accuracy conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct SbpReport {
    pub n_cells: usize,
    /// `max |P+ D+ + (P- D-)^T - B|`.
    pub identity_residual: f64,
    /// `[D+ 1, D+ x - 1, D- 1, D- x - 1]` in the max norm; the constant
    /// cases are scaled by `h` so the numbers are spacing independent.
    pub accuracy_residuals: [f64; 4],
    pub passed: bool,
}

impl SbpReport {
    pub fn max_residual(&self) -> f64 {
        self.accuracy_residuals.iter().fold(self.identity_residual, |a, &b| a.max(b))
    }
}

pub fn verify_sbp(pair: &SbpOperatorPair) -> SbpReport {
    let n = pair.n_cells;
    let h = pair.h;
    let q_plus = pair.q_dense(NodeGridKind::Plus);
    let q_minus = pair.q_dense(NodeGridKind::Minus);
    let resid = q_plus + q_minus.transpose() - pair.boundary_matrix();
    let identity_residual = resid.iter().fold(0.0_f64, |a, v| a.max(v.abs()));

    let mut accuracy = [0.0; 4];
    for (slot, dest) in [NodeGridKind::Plus, NodeGridKind::Minus].into_iter().enumerate() {
        let src = dest.dual();
        let ones = vec![1.0; src.node_count(n)];
        let xs = src.coordinates(n, h);
        let d1 = pair.apply_d(dest, &ones).expect("length matches");
        let dx = pair.apply_d(dest, &xs).expect("length matches");
        accuracy[2 * slot] = d1.iter().fold(0.0_f64, |a, v| a.max((v * h).abs()));
        accuracy[2 * slot + 1] = dx.iter().fold(0.0_f64, |a, v| a.max((v - 1.0).abs()));
    }

    let passed = identity_residual <= SBP_TOLERANCE && accuracy.iter().all(|r| *r <= SBP_TOLERANCE);
    SbpReport { n_cells: n, identity_residual, accuracy_residuals: accuracy, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_small_grids() {
        assert_eq!(build_sbp_pair(3, 1.0), Err(Error::GridTooSmall(3)));
        assert!(matches!(build_sbp_pair(5, 0.0), Err(Error::InvalidSpacing(_))));
    }

    #[test]
    fn first_row_of_d_plus() {
        let pair = build_sbp_pair(4, 1.0).unwrap();
        let d = pair.assemble_dense(NodeGridKind::Plus);
        assert_eq!(d.shape(), (5, 6));
        let row: Vec<f64> = d.row(0).iter().copied().collect();
        assert_eq!(row, vec![-1.0, 0.5, 0.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_has_two_corner_entries() {
        let pair = build_sbp_pair(4, 1.0).unwrap();
        let s = pair.q_dense(NodeGridKind::Plus) + pair.q_dense(NodeGridKind::Minus).transpose();
        let nz: Vec<_> =
            s.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(idx, v)| (idx % 5, idx / 5, *v)).collect();
        assert_eq!(nz, vec![(0, 0, -1.0), (4, 5, 1.0)]);
    }

    #[test]
    fn interior_row_scales_with_h() {
        let pair = build_sbp_pair(4, 0.5).unwrap();
        let r = pair.rows(NodeGridKind::Plus)[2];
        assert_eq!(r.start, 2);
        assert_eq!(&r.coef[..r.len], &[-2.0, 2.0]);
    }

    #[test]
    fn stencil_structure() {
        for n in [4, 5, 9, 16] {
            let pair = build_sbp_pair(n, 1.0).unwrap();
            let dp = pair.rows(NodeGridKind::Plus);
            let dm = pair.rows(NodeGridKind::Minus);
            assert_eq!(dp.len(), n + 1);
            assert_eq!(dm.len(), n + 2);
            for (i, r) in dp.iter().enumerate() {
                let expect = if i < 2 || i + 2 > n { 3 } else { 2 };
                assert_eq!(r.nonzeros(), expect, "d_plus row {i}, n={n}");
            }
            for (i, r) in dm.iter().enumerate() {
                let expect = if i == 2 || i == n - 1 { 3 } else { 2 };
                assert_eq!(r.nonzeros(), expect, "d_minus row {i}, n={n}");
            }
        }
    }

    #[test]
    fn norm_weights() {
        let pair = build_sbp_pair(6, 2.0).unwrap();
        assert_eq!(pair.norm(NodeGridKind::Plus), &[1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 1.0]);
        assert_eq!(pair.norm(NodeGridKind::Minus), &[1.0, 0.5, 2.5, 2.0, 2.0, 2.5, 0.5, 1.0]);
    }

    #[test]
    fn apply_on_polynomials() {
        let pair = build_sbp_pair(7, 0.3).unwrap();
        for dest in [NodeGridKind::Plus, NodeGridKind::Minus] {
            let src = dest.dual();
            let ones = vec![1.0; src.node_count(7)];
            for v in pair.apply_d(dest, &ones).unwrap() {
                assert!(v.abs() < 1e-14);
            }
            let xs = src.coordinates(7, 0.3);
            for v in pair.apply_d(dest, &xs).unwrap() {
                assert!((v - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn apply_length_mismatch() {
        let pair = build_sbp_pair(6, 1.0).unwrap();
        let err = pair.apply_d(NodeGridKind::Plus, &[0.0; 7]).unwrap_err();
        assert_eq!(err, Error::Dimension { expected: 8, actual: 7 });
    }

    #[test]
    fn apply_matches_dense_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [4, 6, 11] {
            let pair = build_sbp_pair(n, 0.7).unwrap();
            for dest in [NodeGridKind::Plus, NodeGridKind::Minus] {
                let dense = pair.assemble_dense(dest);
                for _ in 0..200 {
                    let v: Vec<f64> = (0..dest.dual().node_count(n)).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let fast = pair.apply_d(dest, &v).unwrap();
                    let slow = &dense * nalgebra::DVector::from_vec(v);
                    let scale = slow.amax().max(1.0);
                    for (a, b) in fast.iter().zip(slow.iter()) {
                        assert!((a - b).abs() <= 1e-13 * scale);
                    }
                }
            }
        }
    }

    #[test]
    fn verify_sweep_and_perturbation() {
        let fresh = verify_sbp(&build_sbp_pair(8, 1.0).unwrap());
        assert!(fresh.passed);
        assert_eq!(fresh.identity_residual, 0.0);
        for n in 4..=64 {
            let r = verify_sbp(&build_sbp_pair(n, 1.0 / n as f64).unwrap());
            assert!(r.passed, "n={n}: {r:?}");
            assert!(r.identity_residual <= 1e-15);
        }
        let bad = build_sbp_pair(8, 1.0).unwrap().with_perturbed_entry(NodeGridKind::Minus, 2, 1, 1e-6).unwrap();
        assert!(!verify_sbp(&bad).passed);
    }

    #[test]
    fn interior_second_order_convergence() {
        // Interior error of D+ applied to sin(x) sampled on the Minus grid.
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let pair = build_sbp_pair(n, h).unwrap();
            let xs = NodeGridKind::Minus.coordinates(n, h);
            let v: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
            let d = pair.apply_d(NodeGridKind::Plus, &v).unwrap();
            let xp = NodeGridKind::Plus.coordinates(n, h);
            (3..n - 2).map(|i| (d[i] - xp[i].cos()).abs()).fold(0.0_f64, f64::max)
        };
        let ratio = err(32) / err(64);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}
