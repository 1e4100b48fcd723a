//! Per-cell material properties and their sampling onto component nodes.

use crate::error::{Error, Result};
use crate::grid::{Component, GridSpec};

pub const EPS0: f64 = 8.8541878128e-12;
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Speed of light implied by `EPS0` and `MU0`.
pub fn c0() -> f64 {
    1.0 / (EPS0 * MU0).sqrt()
}

/// Absolute material values at one field node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeMaterial {
    pub eps: f64,
    pub mu: f64,
    pub sigma: f64,
}

/// Relative values of one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellMaterial {
    pub eps_r: f64,
    pub mu_r: f64,
    pub sigma: f64,
    pub rho: f64,
}

impl CellMaterial {
    pub const VACUUM: CellMaterial = CellMaterial { eps_r: 1.0, mu_r: 1.0, sigma: 0.0, rho: 1.0 };

    pub fn dielectric(eps_r: f64) -> Self {
        CellMaterial { eps_r, ..CellMaterial::VACUUM }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_r > 0.0 && self.eps_r.is_finite()) {
            return Err(Error::Material(format!("eps_r = {} must be > 0", self.eps_r)));
        }
        if !(self.mu_r > 0.0 && self.mu_r.is_finite()) {
            return Err(Error::Material(format!("mu_r = {} must be > 0", self.mu_r)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Material(format!("sigma = {} must be >= 0", self.sigma)));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::Material(format!("rho = {} must be >= 0", self.rho)));
        }
        Ok(())
    }
}

/// Geometric region used to paint materials; membership is tested at cell
/// centres.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Box {
        min: [f64; 3],
        max: [f64; 3],
    },
    /// z-aligned cylinder: axis through `(center[0], center[1])`, spanning
    /// `center[2] - height/2 ..= center[2] + height/2`.
    Cylinder {
        center: [f64; 3],
        radius: f64,
        height: f64,
    },
}

impl Region {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        match self {
            Region::Box { min, max } => (0..3).all(|a| p[a] >= min[a] && p[a] <= max[a]),
            Region::Cylinder { center, radius, height } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy <= radius * radius && (p[2] - center[2]).abs() <= 0.5 * height
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialGrid {
    pub grid: GridSpec,
    cells: Vec<CellMaterial>,
}

impl MaterialGrid {
    pub fn uniform(grid: GridSpec, m: CellMaterial) -> Result<Self> {
        m.validate()?;
        Ok(MaterialGrid { grid, cells: vec![m; grid.cell_count()] })
    }

    pub fn vacuum(grid: GridSpec) -> Self {
        MaterialGrid { grid, cells: vec![CellMaterial::VACUUM; grid.cell_count()] }
    }

    #[inline]
    fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, _] = self.grid.cells;
        i + nx * (j + ny * k)
    }

    pub fn cell(&self, i: usize, j: usize, k: usize) -> CellMaterial {
        self.cells[self.cell_index(i, j, k)]
    }

    pub fn cells(&self) -> &[CellMaterial] {
        &self.cells
    }

    pub fn set_cell(&mut self, idx: [usize; 3], m: CellMaterial) -> Result<()> {
        m.validate()?;
        if (0..3).any(|a| idx[a] >= self.grid.cells[a]) {
            return Err(Error::OutOfRange(format!("cell {idx:?}")));
        }
        let n = self.cell_index(idx[0], idx[1], idx[2]);
        self.cells[n] = m;
        Ok(())
    }

    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let h = self.grid.spacing;
        [(i as f64 + 0.5) * h[0], (j as f64 + 0.5) * h[1], (k as f64 + 0.5) * h[2]]
    }

    /// Assign `m` to every cell whose centre lies in `region`. Returns the
    /// number of cells painted.
    pub fn paint(&mut self, region: &Region, m: CellMaterial) -> Result<usize> {
        m.validate()?;
        let [nx, ny, nz] = self.grid.cells;
        let mut count = 0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if region.contains(self.cell_center(i, j, k)) {
                        let n = self.cell_index(i, j, k);
                        self.cells[n] = m;
                        count += 1;
                    }
                }
            }
        }
        Ok(count)
    }

    /// Fastest wave speed over all cells.
    pub fn max_wave_speed(&self) -> f64 {
        self.cells.iter().map(|m| c0() / (m.eps_r * m.mu_r).sqrt()).fold(0.0, f64::max)
    }

    pub fn is_vacuum(&self) -> bool {
        self.cells.iter().all(|m| *m == CellMaterial::VACUUM)
    }

    /// Material at a component node: arithmetic mean over the cells touching
    /// the node (the product of the adjacent cells along each axis). For E
    /// nodes this is the ring of cells around the edge; for H nodes the two
    /// cells sharing the face. Uniform media return the cell value exactly.
    pub fn sample(&self, component: Component, node: [usize; 3]) -> Result<NodeMaterial> {
        let lay = self.grid.layout(component);
        if !lay.contains(node) {
            return Err(Error::OutOfRange(format!("{component} node {node:?} outside {:?}", lay.dims)));
        }
        let ranges: [std::ops::Range<usize>; 3] =
            std::array::from_fn(|a| lay.axis_kinds[a].adjacent_cells(node[a], self.grid.cells[a]));
        let first = self.cell(ranges[0].start, ranges[1].start, ranges[2].start);
        let (mut eps, mut mu, mut sigma, mut n) = (0.0, 0.0, 0.0, 0usize);
        let mut uniform = true;
        for k in ranges[2].clone() {
            for j in ranges[1].clone() {
                for i in ranges[0].clone() {
                    let c = self.cell(i, j, k);
                    uniform &= c == first;
                    eps += c.eps_r;
                    mu += c.mu_r;
                    sigma += c.sigma;
                    n += 1;
                }
            }
        }
        let (eps_r, mu_r, sigma) = if uniform {
            (first.eps_r, first.mu_r, first.sigma)
        } else {
            let inv = 1.0 / n as f64;
            (eps * inv, mu * inv, sigma * inv)
        };
        Ok(NodeMaterial { eps: eps_r * EPS0, mu: mu_r * MU0, sigma })
    }

    /// Parse a voxel override CSV with rows `i,j,k,eps_r,mu_r,sigma,rho`.
    /// A header line is allowed; `#` starts a comment.
    pub fn apply_voxel_csv(&mut self, text: &str) -> Result<usize> {
        let mut count = 0;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 7 {
                return Err(Error::Material(format!("voxel line {}: expected 7 columns, got {}", ln + 1, parts.len())));
            }
            if ln == 0 && parts[0].parse::<usize>().is_err() {
                continue;
            }
            let bad = |what: &str| Error::Material(format!("voxel line {}: bad {what}", ln + 1));
            let mut idx = [0usize; 3];
            for a in 0..3 {
                idx[a] = parts[a].parse().map_err(|_| bad("index"))?;
            }
            let mut v = [0.0; 4];
            for (n, slot) in v.iter_mut().enumerate() {
                *slot = parts[3 + n].parse().map_err(|_| bad("value"))?;
            }
            self.set_cell(idx, CellMaterial { eps_r: v[0], mu_r: v[1], sigma: v[2], rho: v[3] })?;
            count += 1;
        }
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::cubic(6, 0.1).unwrap()
    }

    #[test]
    fn vacuum_sampling() {
        let m = MaterialGrid::vacuum(grid());
        let s = m.sample(Component::Ex, [3, 3, 3]).unwrap();
        assert_eq!(s, NodeMaterial { eps: EPS0, mu: MU0, sigma: 0.0 });
        let s = m.sample(Component::Hz, [0, 7, 6]).unwrap();
        assert_eq!(s.mu, MU0);
    }

    #[test]
    fn uniform_region_is_exact() {
        let g = grid();
        let m = MaterialGrid::uniform(g, CellMaterial::dielectric(38.0)).unwrap();
        for c in Component::ALL {
            let s = m.sample(c, [2, 2, 2]).unwrap();
            assert_eq!(s.eps, 38.0 * EPS0);
        }
    }

    #[test]
    fn interface_node_is_averaged() {
        // Cells with k < 3 vacuum, k >= 3 eps_r = 38. An Ez node is on the
        // Minus grid along z so it never straddles an xy interface; an Ex
        // node at plus-index k = 3 touches cells 2 and 3.
        let g = grid();
        let mut m = MaterialGrid::vacuum(g);
        m.paint(&Region::Box { min: [0.0, 0.0, 0.3], max: [1.0, 1.0, 1.0] }, CellMaterial::dielectric(38.0)).unwrap();
        let s = m.sample(Component::Ex, [3, 3, 3]).unwrap();
        assert!((s.eps / EPS0 - 19.5).abs() < 1e-12);
        let s = m.sample(Component::Ez, [3, 3, 3]).unwrap();
        assert_eq!(s.eps, EPS0);
        let s = m.sample(Component::Ez, [3, 3, 4]).unwrap();
        assert_eq!(s.eps, 38.0 * EPS0);
    }

    #[test]
    fn out_of_range_node() {
        let m = MaterialGrid::vacuum(grid());
        assert!(matches!(m.sample(Component::Ex, [8, 0, 0]), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn cylinder_painting() {
        let g = GridSpec::cubic(20, 0.05).unwrap();
        let mut m = MaterialGrid::vacuum(g);
        let n = m
            .paint(
                &Region::Cylinder { center: [0.5, 0.5, 0.5], radius: 0.3, height: 0.2 },
                CellMaterial::dielectric(4.0),
            )
            .unwrap();
        // 4 layers of cells with centres inside |z - 0.5| <= 0.1.
        assert_eq!(n % 4, 0);
        let area = (n / 4) as f64 * 0.05 * 0.05;
        let exact = std::f64::consts::PI * 0.09;
        assert!((area - exact).abs() / exact < 0.05);
    }

    #[test]
    fn rejects_bad_materials() {
        let g = grid();
        assert!(MaterialGrid::uniform(g, CellMaterial::dielectric(0.0)).is_err());
        let bad = CellMaterial { sigma: -1.0, ..CellMaterial::VACUUM };
        assert!(MaterialGrid::uniform(g, bad).is_err());
    }

    #[test]
    fn voxel_csv_override() {
        let mut m = MaterialGrid::vacuum(grid());
        let n = m.apply_voxel_csv("i,j,k,eps_r,mu_r,sigma,rho\n1,2,3,4.0,1.0,0.5,1000\n").unwrap();
        assert_eq!(n, 1);
        assert_eq!(m.cell(1, 2, 3).sigma, 0.5);
        assert!(m.apply_voxel_csv("1,2\n").is_err());
        assert!(m.apply_voxel_csv("9,0,0,1,1,0,1\n").is_err());
    }

    #[test]
    fn wave_speed() {
        let g = grid();
        let m = MaterialGrid::uniform(g, CellMaterial::dielectric(4.0)).unwrap();
        assert!((m.max_wave_speed() - 0.5 * c0()).abs() < 1e-3);
        assert!((c0() - 2.99792458e8).abs() < 1.0);
    }
}
