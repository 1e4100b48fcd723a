//! Fused line kernels for the curl updates.
//!
//! A [`LineOperator`] holds the stencil rows of one 1D derivative along
//! with the contiguous run of plain two-point rows, so the bulk of a line
//! is a tight loop and only the closure rows go through the generic path.
//! The same kernels drive both the SBP solver and the Yee baseline.

use std::ops::Range;

use rayon::prelude::*;

use crate::grid::{Axis, Field3};
use crate::sbp::{NodeGridKind, SbpOperatorPair, StencilRow};
use crate::scalar::FieldScalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LineOperator {
    rows: Vec<StencilRow>,
    /// Rows `r` in this range are `(-src[r - shift] + src[r - shift + 1]) / h`.
    interior: Range<usize>,
    shift: usize,
    inv_h: f64,
}

impl LineOperator {
    pub fn new(rows: Vec<StencilRow>, h: f64) -> Self {
        let inv_h = 1.0 / h;
        let plain = |i: usize, r: &StencilRow| -> Option<usize> {
            (r.len == 2 && r.coef[0] == -inv_h && r.coef[1] == inv_h && r.start <= i && i - r.start <= 1)
                .then(|| i - r.start)
        };
        let mut best = (0..0, 0);
        let mut i = 0;
        while i < rows.len() {
            if let Some(shift) = plain(i, &rows[i]) {
                let start = i;
                while i < rows.len() && plain(i, &rows[i]) == Some(shift) {
                    i += 1;
                }
                if i - start > best.0.len() {
                    best = (start..i, shift);
                }
            } else {
                i += 1;
            }
        }
        LineOperator { rows, interior: best.0, shift: best.1, inv_h }
    }

    /// SBP operator producing values on `dest`.
    pub fn sbp(pair: &SbpOperatorPair, dest: NodeGridKind) -> Self {
        LineOperator::new(pair.rows(dest).to_vec(), pair.h())
    }

    pub fn rows(&self) -> &[StencilRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn interior(&self) -> Range<usize> {
        self.interior.clone()
    }

    /// `out += scale * (D src)` for the x-line `(j, k)` of the destination.
    #[inline]
    pub fn add_line<T: FieldScalar>(&self, out: &mut [T], src: &Field3<T>, axis: Axis, j: usize, k: usize, scale: f64) {
        match axis {
            Axis::X => self.add_x(out, src.line(j, k), scale),
            Axis::Y => {
                let r = &self.rows[j];
                self.add_transverse(out, r, |m| src.line(r.start + m, k), scale)
            }
            Axis::Z => {
                let r = &self.rows[k];
                self.add_transverse(out, r, |m| src.line(j, r.start + m), scale)
            }
        }
    }

    #[inline]
    fn add_x<T: FieldScalar>(&self, out: &mut [T], line: &[T], scale: f64) {
        let Range { start: lo, end: hi } = self.interior;
        for (i, r) in self.rows[..lo].iter().enumerate() {
            out[i] += r.apply(line) * scale;
        }
        if hi > lo {
            let s = scale * self.inv_h;
            let a = &line[lo - self.shift..hi - self.shift];
            let b = &line[lo - self.shift + 1..hi - self.shift + 1];
            for ((o, x0), x1) in out[lo..hi].iter_mut().zip(a).zip(b) {
                *o += (*x1 - *x0) * s;
            }
        }
        for (i, r) in self.rows[hi..].iter().enumerate() {
            out[hi + i] += r.apply(line) * scale;
        }
    }

    #[inline]
    fn add_transverse<'a, T: FieldScalar>(
        &self,
        out: &mut [T],
        r: &StencilRow,
        line: impl Fn(usize) -> &'a [T],
        scale: f64,
    ) {
        match r.len {
            0 => {}
            1 => {
                let c0 = r.coef[0] * scale;
                for (o, x0) in out.iter_mut().zip(line(0)) {
                    *o += *x0 * c0;
                }
            }
            2 => {
                let (c0, c1) = (r.coef[0] * scale, r.coef[1] * scale);
                for ((o, x0), x1) in out.iter_mut().zip(line(0)).zip(line(1)) {
                    *o += *x0 * c0 + *x1 * c1;
                }
            }
            _ => {
                let (c0, c1, c2) = (r.coef[0] * scale, r.coef[1] * scale, r.coef[2] * scale);
                for (((o, x0), x1), x2) in out.iter_mut().zip(line(0)).zip(line(1)).zip(line(2)) {
                    *o += *x0 * c0 + *x1 * c1 + *x2 * c2;
                }
            }
        }
    }
}

/// One curl-component update
/// `dst = ca * dst + cb * sign * (D_b src_c - D_c src_b)`
/// where `(b, c)` are the cyclic successors of the component direction.
/// `ca = None` means a factor of one.
pub struct CurlTerm<'a, T> {
    pub src_c: &'a Field3<T>,
    pub op_b: &'a LineOperator,
    pub axis_b: Axis,
    pub src_b: &'a Field3<T>,
    pub op_c: &'a LineOperator,
    pub axis_c: Axis,
    pub sign: f64,
    /// SAT penalties on the two x faces, applied while the line is hot.
    pub x_penalty: Option<LinePenalty<'a, T>>,
}

/// Penalty `scale * cb * (u_end - phase * u_other_end)` on the first or last
/// node of every x-line of the destination, reading the matching x-line of
/// `src`. `phase = None` drops the opposite-end term.
pub struct LinePenalty<'a, T> {
    pub src: &'a Field3<T>,
    pub low: Option<EndPenalty>,
    pub high: Option<EndPenalty>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndPenalty {
    pub scale: f64,
    pub phase: Option<num_complex::Complex64>,
}

#[inline]
fn end_value<T: FieldScalar>(u: T, other: T, e: &EndPenalty) -> T {
    match e.phase {
        Some(p) => u - other.mul_phase(p),
        None => u,
    }
}

pub fn apply_curl<T: FieldScalar>(dst: &mut Field3<T>, term: &CurlTerm<'_, T>, ca: Option<&[f64]>, cb: &[f64]) {
    let [nx, ny, _] = dst.dims;
    let plane = nx * ny;
    if plane == 0 {
        return;
    }
    dst.data.par_chunks_mut(plane).enumerate().for_each(|(k, chunk)| {
        let mut buf = vec![T::zero(); nx];
        for j in 0..ny {
            buf.iter_mut().for_each(|v| *v = T::zero());
            term.op_b.add_line(&mut buf, term.src_c, term.axis_b, j, k, term.sign);
            term.op_c.add_line(&mut buf, term.src_b, term.axis_c, j, k, -term.sign);
            let off = k * plane + j * nx;
            let line = &mut chunk[j * nx..(j + 1) * nx];
            let b = &cb[off..off + nx];
            match ca {
                Some(ca) => {
                    let a = &ca[off..off + nx];
                    for (((d, v), a), b) in line.iter_mut().zip(&buf).zip(a).zip(b) {
                        *d = *d * *a + *v * *b;
                    }
                }
                None => {
                    for ((d, v), b) in line.iter_mut().zip(&buf).zip(b) {
                        *d += *v * *b;
                    }
                }
            }
            if let Some(p) = &term.x_penalty {
                let u = p.src.line(j, k);
                let (first, last) = (u[0], u[u.len() - 1]);
                if let Some(e) = &p.low {
                    line[0] += end_value(first, last, e) * (e.scale * b[0]);
                }
                if let Some(e) = &p.high {
                    line[nx - 1] += end_value(last, first, e) * (e.scale * b[nx - 1]);
                }
            }
        }
    });
}
