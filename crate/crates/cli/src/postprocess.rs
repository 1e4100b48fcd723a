//! `sbpsat postprocess`: spectra, S-parameters and SAR from written CSVs.

use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;
use sbpsat_core::diagnostics::{self, SpectrumOptions, Window};

/// Numeric columns of a CSV with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> anyhow::Result<Table> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines.next().context("empty CSV")?.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (n, l) in lines.enumerate() {
            let row: Vec<f64> = l
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .with_context(|| format!("row {}: {l:?}", n + 2))?;
            if row.len() != header.len() {
                bail!("row {}: expected {} columns", n + 2, header.len());
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn read(path: &Path) -> anyhow::Result<Table> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Table::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn column(&self, name: &str) -> anyhow::Result<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name).with_context(|| format!("missing column {name:?}"))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    /// `re`/`im` columns as complex values, or a real `value` column.
    pub fn complex(&self) -> anyhow::Result<Vec<Complex64>> {
        if self.header.iter().any(|h| h == "re") {
            let (re, im) = (self.column("re")?, self.column("im")?);
            Ok(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
        } else {
            Ok(self.column("value")?.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        }
    }
}

/// Spectrum of a probe CSV (`time,value` or `time,re,im`); the sample
/// interval is read from the time column.
pub fn probe_spectrum(
    table: &Table,
    window: Window,
    remove_mean: bool,
) -> anyhow::Result<(String, Vec<diagnostics::Peak>)> {
    let t = table.column("time")?;
    if t.len() < 2 {
        bail!("probe record needs at least two samples");
    }
    let dt = t[1] - t[0];
    let sp = diagnostics::spectrum_with(
        &table.complex()?,
        dt,
        1,
        &SpectrumOptions { window, remove_mean, ..SpectrumOptions::default() },
    )?;
    Ok((diagnostics::spectrum_csv(&sp), sp.peaks))
}

/// S-parameters from three power CSVs (`f,re,im`) on a common grid.
pub fn s_parameters(inc: &Table, refl: &Table, trans: &Table, floor: f64) -> anyhow::Result<String> {
    let f = inc.column("f")?;
    for (name, t) in [("reflected", refl), ("transmitted", trans)] {
        if t.column("f")? != f {
            bail!("{name} power uses a different frequency grid");
        }
    }
    let sp = diagnostics::s_parameters(&inc.complex()?, &refl.complex()?, &trans.complex()?, floor)?;
    Ok(diagnostics::s_parameters_csv(&f, &sp))
}

/// SAR per cell from a `peak_e_sq.csv` written by `simulate`.
pub fn sar_from_peaks(materials: &sbpsat_core::MaterialGrid, peaks: &Table) -> anyhow::Result<String> {
    let e2 = peaks.column("e_sq_max")?;
    let sar = diagnostics::point_sar(&e2, materials)?;
    Ok(diagnostics::sar_csv(materials, &sar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_parsing() {
        let t = Table::parse("time,value\n0,1\n1e-3,2\n").unwrap();
        assert_eq!(t.column("value").unwrap(), vec![1.0, 2.0]);
        assert!(Table::parse("a,b\n1\n").is_err());
        assert!(Table::parse("a\nx\n").is_err());
        assert!(t.column("nope").is_err());
    }

    #[test]
    fn pass_through_s_parameters() {
        let p = Table::parse("f,re,im\n0,1,0\n1,2,1\n").unwrap();
        let z = Table::parse("f,re,im\n0,0,0\n1,0,0\n").unwrap();
        let csv = s_parameters(&p, &z, &p, 1e-9).unwrap();
        let t = Table::parse(&csv).unwrap();
        assert_eq!(t.column("S21").unwrap(), vec![1.0, 1.0]);
        assert_eq!(t.column("S11").unwrap(), vec![0.0, 0.0]);
        let shifted = Table::parse("f,re,im\n0,0,0\n2,0,0\n").unwrap();
        assert!(s_parameters(&p, &shifted, &p, 1e-9).is_err());
    }
}
