//! Dense reference construction of the semi-discrete operator.
//!
//! Every block is assembled from Kronecker products of the dense 1D
//! operators and norm matrices, and every penalty from explicit
//! restriction matrices, `P'''^{-1} R^T P'' R`. Nothing here shares code
//! with the stencil kernels, so agreement between the two is a real check.
//! Sizes are limited to small grids.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Axis, Component, ComponentLayout, Face, FieldSet, GridSpec};
use crate::material::MaterialGrid;
use crate::sbp::SbpOperatorPair;
use crate::scalar::FieldScalar;
use crate::solver::{sat_pair, BoundaryKind, SatConfig};

/// Refuse to assemble above this many unknowns.
pub const ASSEMBLY_CAP: usize = 6000;

type CMat = DMatrix<Complex64>;

fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}

/// Derivative of a field on `src` along `axis`, as a dense matrix acting on
/// the x-fastest flattening.
fn kron_derivative(src: &ComponentLayout, axis: Axis, pair: &SbpOperatorPair) -> DMatrix<f64> {
    let kind = src.axis_kinds[axis.index()];
    let d = pair.assemble_dense(kind.dual());
    let [nx, ny, nz] = src.dims;
    let (ix, iy, iz) =
        (DMatrix::<f64>::identity(nx, nx), DMatrix::<f64>::identity(ny, ny), DMatrix::<f64>::identity(nz, nz));
    match axis {
        Axis::X => iz.kronecker(&iy).kronecker(&d),
        Axis::Y => iz.kronecker(&d).kronecker(&ix),
        Axis::Z => d.kronecker(&iy).kronecker(&ix),
    }
}

/// `P''' = P_z (x) P_y (x) P_x` on a layout.
fn volume_norm(ops: &[SbpOperatorPair; 3], lay: &ComponentLayout) -> DMatrix<f64> {
    let p: [DMatrix<f64>; 3] = std::array::from_fn(|a| diag(ops[a].norm(lay.axis_kinds[a])));
    p[2].kronecker(&p[1]).kronecker(&p[0])
}

/// Transverse face norm `P''` (slower axis (x) faster axis).
fn face_norm(ops: &[SbpOperatorPair; 3], lay: &ComponentLayout, face: Face) -> DMatrix<f64> {
    let t: Vec<usize> = (0..3).filter(|a| *a != face.axis().index()).collect();
    let fast = diag(ops[t[0]].norm(lay.axis_kinds[t[0]]));
    let slow = diag(ops[t[1]].norm(lay.axis_kinds[t[1]]));
    slow.kronecker(&fast)
}

/// Restriction onto the boundary layer of `face`: one row per face node,
/// ordered with the lower-numbered transverse axis fastest.
fn restriction(lay: &ComponentLayout, face: Face) -> DMatrix<f64> {
    let a = face.axis().index();
    let layer = if face.is_high() { lay.dims[a] - 1 } else { 0 };
    let t: Vec<usize> = (0..3).filter(|x| *x != a).collect();
    let rows = lay.dims[t[0]] * lay.dims[t[1]];
    let mut r = DMatrix::zeros(rows, lay.len());
    for k in 0..lay.dims[2] {
        for j in 0..lay.dims[1] {
            for i in 0..lay.dims[0] {
                let idx = [i, j, k];
                if idx[a] != layer {
                    continue;
                }
                let row = idx[t[0]] + lay.dims[t[0]] * idx[t[1]];
                r[(row, lay.index(i, j, k))] = 1.0;
            }
        }
    }
    r
}

/// Raw (material-free) curl + penalty blocks and the node norm weights.
#[derive(Clone, Debug)]
pub struct AssembledOperator {
    pub grid: GridSpec,
    /// E rows, H columns: `curl H + chi` penalties.
    pub k_eh: CMat,
    /// H rows, E columns: `-curl E + sigma` penalties.
    pub k_he: CMat,
    pub w_e: Vec<f64>,
    pub w_h: Vec<f64>,
    offsets: [usize; 7],
}

impl AssembledOperator {
    pub fn new(grid: GridSpec, sat: &SatConfig) -> Result<Self> {
        sat.validate()?;
        let ops = grid.operators()?;
        let lays = Component::ALL.map(|c| grid.layout(c));
        let mut offsets = [0usize; 7];
        for c in 0..6 {
            offsets[c + 1] = offsets[c] + lays[c].len();
        }
        let n = offsets[6];
        if n > ASSEMBLY_CAP {
            return Err(Error::DimensionCap { dim: n, cap: ASSEMBLY_CAP });
        }
        let ne = offsets[3];
        let nh = n - ne;
        let mut k_eh = CMat::zeros(ne, nh);
        let mut k_he = CMat::zeros(nh, ne);
        let block = |c: Component| offsets[c.index()];
        let hoff = |c: Component| offsets[c.index()] - ne;

        for axis in Axis::ALL {
            let (b, c) = axis.cyclic();
            // E_a += D_b H_c - D_c H_b
            let ea = Component::electric(axis);
            let (hc, hb) = (Component::magnetic(c), Component::magnetic(b));
            add_block(&mut k_eh, block(ea), hoff(hc), &kron_derivative(&lays[hc.index()], b, &ops[b.index()]), 1.0);
            add_block(&mut k_eh, block(ea), hoff(hb), &kron_derivative(&lays[hb.index()], c, &ops[c.index()]), -1.0);
            // H_a += -(D_b E_c - D_c E_b)
            let ha = Component::magnetic(axis);
            let (ec, eb) = (Component::electric(c), Component::electric(b));
            add_block(&mut k_he, hoff(ha), block(ec), &kron_derivative(&lays[ec.index()], b, &ops[b.index()]), -1.0);
            add_block(&mut k_he, hoff(ha), block(eb), &kron_derivative(&lays[eb.index()], c, &ops[c.index()]), 1.0);
        }

        for face in Face::ALL {
            let periodic = sat.face_kind(face) == BoundaryKind::Periodic;
            let phase = sat.bloch_factor(face);
            for pair in 0..2 {
                let slot = SatConfig::slot(face, pair);
                let (ec, hc) = sat_pair(face, pair);
                let (le, lh) = (&lays[ec.index()], &lays[hc.index()]);
                let pf = to_complex(&face_norm(&ops, le, face));
                let coupling = |src: &ComponentLayout| -> CMat {
                    let mut r = to_complex(&restriction(src, face));
                    if periodic {
                        r -= to_complex(&restriction(src, face.opposite())) * phase;
                    }
                    r
                };
                let sigma = sat.sigma[slot];
                if sigma != 0.0 {
                    let inv = to_complex(&volume_norm(&ops, lh).map(|v| if v != 0.0 { 1.0 / v } else { 0.0 }));
                    let rt = to_complex(&restriction(lh, face).transpose());
                    let m = inv * rt * &pf * coupling(le) * Complex64::new(sigma, 0.0);
                    add_cblock(&mut k_he, hoff(hc), block(ec), &m);
                }
                let chi = sat.chi[slot];
                if chi != 0.0 {
                    let inv = to_complex(&volume_norm(&ops, le).map(|v| if v != 0.0 { 1.0 / v } else { 0.0 }));
                    let rt = to_complex(&restriction(le, face).transpose());
                    let m = inv * rt * &pf * coupling(lh) * Complex64::new(chi, 0.0);
                    add_cblock(&mut k_eh, block(ec), hoff(hc), &m);
                }
            }
        }

        let weights = |c: &[Component]| -> Vec<f64> {
            c.iter()
                .flat_map(|c| volume_norm(&ops, &lays[c.index()]).diagonal().iter().copied().collect::<Vec<_>>())
                .collect()
        };
        Ok(AssembledOperator { grid, k_eh, k_he, w_e: weights(&Component::E), w_h: weights(&Component::H), offsets })
    }

    pub fn dim(&self) -> usize {
        self.offsets[6]
    }

    pub fn e_dim(&self) -> usize {
        self.offsets[3]
    }

    /// `W_E K_EH + (W_H K_HE)^H`, relative to the size of `W_E K_EH`.
    /// Zero is the matrix form of a vanishing semi-discrete energy rate.
    pub fn neutrality_residual(&self) -> f64 {
        let a = CMat::from_fn(self.k_eh.nrows(), self.k_eh.ncols(), |i, j| self.k_eh[(i, j)] * self.w_e[i]);
        let b = CMat::from_fn(self.k_he.nrows(), self.k_he.ncols(), |i, j| self.k_he[(i, j)] * self.w_h[i]);
        let r = &a + b.adjoint();
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        r.iter().fold(0.0_f64, |m, v| m.max(v.norm())) / scale
    }

    /// Per-node material factors `(ca, cb)` for E and `dt / mu` for H.
    fn material_factors(&self, materials: &MaterialGrid, dt: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let (mut ca, mut cb, mut dh) = (Vec::new(), Vec::new(), Vec::new());
        for c in Component::ALL {
            let lay = self.grid.layout(c);
            for k in 0..lay.dims[2] {
                for j in 0..lay.dims[1] {
                    for i in 0..lay.dims[0] {
                        let m = materials.sample(c, [i, j, k])?;
                        if c.is_electric() {
                            let l = m.sigma * dt / (2.0 * m.eps);
                            ca.push((1.0 - l) / (1.0 + l));
                            cb.push(dt / m.eps / (1.0 + l));
                        } else {
                            dh.push(dt / m.mu);
                        }
                    }
                }
            }
        }
        Ok((ca, cb, dh))
    }

    /// The one-step map `[E; H]^n -> [E; H]^{n+1}` of the leapfrog scheme:
    /// `H' = H + D_H K_HE E`, `E' = C_A E + C_B K_EH H'`.
    pub fn one_step_matrix(&self, materials: &MaterialGrid, dt: f64) -> Result<CMat> {
        let (ca, cb, dh) = self.material_factors(materials, dt)?;
        let ne = self.e_dim();
        let nh = self.dim() - ne;
        let rows = |k: &CMat, v: &[f64]| CMat::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] * v[i]);
        let hstep = rows(&self.k_he, &dh);
        let estep = rows(&self.k_eh, &cb);
        let mut m = CMat::zeros(ne + nh, ne + nh);
        let mut ee = &estep * &hstep;
        for (i, a) in ca.iter().enumerate() {
            ee[(i, i)] += a;
        }
        m.view_mut((0, 0), (ne, ne)).copy_from(&ee);
        m.view_mut((0, ne), (ne, nh)).copy_from(&estep);
        m.view_mut((ne, 0), (nh, ne)).copy_from(&hstep);
        m.view_mut((ne, ne), (nh, nh)).fill_with_identity();
        Ok(m)
    }

    /// Semi-discrete operator `du/dt = A u` with material scaling.
    pub fn spatial_operator(&self, materials: &MaterialGrid) -> Result<CMat> {
        // dt = 1 gives cb = 1/eps, dh = 1/mu for lossless media
        let (_, cb, dh) = self.material_factors(materials, 1.0)?;
        let ne = self.e_dim();
        let nh = self.dim() - ne;
        let mut m = CMat::zeros(ne + nh, ne + nh);
        let mut eh = self.k_eh.clone();
        for (r, s) in cb.iter().enumerate() {
            eh.row_mut(r).scale_mut(*s);
        }
        let mut he = self.k_he.clone();
        for (r, s) in dh.iter().enumerate() {
            he.row_mut(r).scale_mut(*s);
        }
        m.view_mut((0, ne), (ne, nh)).copy_from(&eh);
        m.view_mut((ne, 0), (nh, ne)).copy_from(&he);
        Ok(m)
    }

    /// Diagonal of the energy weight `diag(eps W_E, mu W_H)`.
    pub fn energy_weights(&self, materials: &MaterialGrid) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dim());
        let mut n = 0;
        for c in Component::ALL {
            let lay = self.grid.layout(c);
            let w = if c.is_electric() { &self.w_e } else { &self.w_h };
            let base = if c.is_electric() { 0 } else { self.e_dim() };
            for k in 0..lay.dims[2] {
                for j in 0..lay.dims[1] {
                    for i in 0..lay.dims[0] {
                        let m = materials.sample(c, [i, j, k])?;
                        let f = if c.is_electric() { m.eps } else { m.mu };
                        out.push(f * w[n - base]);
                        n += 1;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn add_block(dst: &mut CMat, r0: usize, c0: usize, m: &DMatrix<f64>, s: f64) {
    let mut v = dst.view_mut((r0, c0), (m.nrows(), m.ncols()));
    for (d, x) in v.iter_mut().zip(m.iter()) {
        *d += Complex64::new(s * x, 0.0);
    }
}

fn add_cblock(dst: &mut CMat, r0: usize, c0: usize, m: &CMat) {
    let mut v = dst.view_mut((r0, c0), (m.nrows(), m.ncols()));
    v += m;
}

/// Flatten a field set into a complex vector in component order.
pub fn to_vector<T: FieldScalar>(fs: &FieldSet<T>) -> DVector<Complex64> {
    let v = fs.to_vec();
    DVector::from_iterator(v.len(), v.into_iter().map(|x| x.to_complex()))
}

/// Largest entrywise difference relative to the largest entry of `b`.
pub fn relative_difference(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let diff = a.iter().zip(b.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()));
    diff / scale
}

/// Offset of a component's block in the flattened state.
pub fn component_offset(grid: &GridSpec, c: Component) -> usize {
    Component::ALL[..c.index()].iter().map(|c| grid.layout(*c).len()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Solver;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fields<T: FieldScalar>(grid: GridSpec, seed: u64) -> FieldSet<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fs = FieldSet::zeros(grid);
        for f in fs.fields.iter_mut() {
            for v in f.data.iter_mut() {
                *v = T::from_complex(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        fs
    }

    fn check_step<T: FieldScalar>(sat: SatConfig) {
        let grid = GridSpec::new([4, 5, 4], [0.1, 0.08, 0.12]).unwrap();
        let mats = MaterialGrid::vacuum(grid);
        let dt = 0.9 * crate::solver::cfl_max_dt(&grid, &mats);
        let mut s = Solver::<T>::new(mats.clone(), sat.clone(), dt).unwrap();
        *s.fields_mut() = random_fields(grid, 42);
        let u0 = to_vector(s.fields());
        s.step();
        let oracle = AssembledOperator::new(grid, &sat).unwrap();
        let lam = oracle.one_step_matrix(&mats, dt).unwrap();
        let expect = &lam * u0;
        assert!(relative_difference(&to_vector(s.fields()), &expect) < 1e-12);
    }

    #[test]
    fn step_matches_oracle_pec() {
        check_step::<f64>(SatConfig::pec());
    }

    #[test]
    fn step_matches_oracle_pmc() {
        check_step::<f64>(SatConfig::pmc());
    }

    #[test]
    fn step_matches_oracle_periodic_with_phase() {
        check_step::<Complex64>(SatConfig::periodic([0.3, -0.7, 1.1]).unwrap());
    }

    #[test]
    fn neutral_for_default_sets() {
        let g = GridSpec::cubic(4, 0.25).unwrap();
        for sat in [SatConfig::pec(), SatConfig::pmc(), SatConfig::periodic([0.2, 0.4, 0.6]).unwrap()] {
            let a = AssembledOperator::new(g, &sat).unwrap();
            assert!(a.neutrality_residual() < 1e-12, "{:?}", sat.boundary);
        }
    }

    #[test]
    fn flipped_coefficient_is_not_neutral() {
        let g = GridSpec::cubic(4, 0.25).unwrap();
        let mut sat = SatConfig::pec();
        sat.sigma[3] = -sat.sigma[3];
        let a = AssembledOperator::new(g, &sat).unwrap();
        assert!(a.neutrality_residual() > 1e-3);
    }

    #[test]
    fn cap_is_enforced() {
        let g = GridSpec::cubic(12, 0.1).unwrap();
        assert!(matches!(AssembledOperator::new(g, &SatConfig::pec()), Err(Error::DimensionCap { .. })));
    }
}
