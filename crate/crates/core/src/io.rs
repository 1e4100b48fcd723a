//! Snapshot writers: legacy VTK structured points and flat CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Component, FieldSet};
use crate::scalar::FieldScalar;

/// Legacy ASCII VTK of one component. The lattice is written in node-index
/// space (unit spacing) because the Minus grids are not uniform; the
/// physical spacing goes in the title line.
pub fn vtk_structured_points<T: FieldScalar>(fields: &FieldSet<T>, component: Component, step: u64) -> String {
    let f = fields.get(component);
    let [nx, ny, nz] = f.dims;
    let h = fields.grid.spacing;
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{component} step {step} h {:e} {:e} {:e}", h[0], h[1], h[2]);
    let _ = writeln!(s, "ASCII\nDATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {nx} {ny} {nz}\nORIGIN 0 0 0\nSPACING 1 1 1");
    let _ = writeln!(s, "POINT_DATA {}", f.data.len());
    let parts: &[(&str, fn(&T) -> f64)] = if T::IS_COMPLEX {
        &[("re", |v| v.to_complex().re), ("im", |v| v.to_complex().im)]
    } else {
        &[("", |v| v.to_complex().re)]
    };
    for (suffix, get) in parts {
        let name = if suffix.is_empty() { component.name().to_string() } else { format!("{component}_{suffix}") };
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in &f.data {
            let _ = writeln!(s, "{:e}", get(v));
        }
    }
    s
}

/// `i,j,k,value` rows (`i,j,k,re,im` for complex fields), x fastest.
pub fn field_csv<T: FieldScalar>(fields: &FieldSet<T>, component: Component) -> String {
    let f = fields.get(component);
    let [nx, ny, _] = f.dims;
    let mut s = String::from(if T::IS_COMPLEX { "i,j,k,re,im\n" } else { "i,j,k,value\n" });
    for (n, v) in f.data.iter().enumerate() {
        let (i, j, k) = (n % nx, (n / nx) % ny, n / (nx * ny));
        let c = v.to_complex();
        if T::IS_COMPLEX {
            let _ = writeln!(s, "{i},{j},{k},{:e},{:e}", c.re, c.im);
        } else {
            let _ = writeln!(s, "{i},{j},{k},{:e}", c.re);
        }
    }
    s
}

/// Write `contents` to `path`, creating parent directories.
pub fn write_text(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
