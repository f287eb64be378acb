//! Uniform grids on `T^n` and the deterministic parallel sweep over them.
//!
//! Grid point `j` in `{0..N-1}^n` sits at `x = (j + o)/N` with offset `o` in
//! `{1/2, 0}`. With `D = 2N`, every phase `nu . x = m / D` for an integer `m`,
//! so phase reduction is exact integer arithmetic and sine/cosine come from a
//! single [`DyadicSineTable`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trigpoly::kernel::{DyadicSineTable, Enclosure, TermAccumulator};
use crate::trigpoly::TrigPolynomial;

/// Points per sweep chunk. Fixed so that partial results never depend on the
/// number of worker threads.
pub const CHUNK_POINTS: u64 = 1 << 16;

/// Largest supported total point count.
pub const MAX_POINTS: u64 = 1 << 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridOffset {
    /// Cell centers `(j + 1/2)/N`.
    #[default]
    Half,
    /// Cell corners `j/N`.
    Zero,
}

impl GridOffset {
    fn doubled(self) -> i64 {
        match self {
            GridOffset::Half => 1,
            GridOffset::Zero => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub log2: u32,
    pub offset: GridOffset,
}

impl GridSpec {
    pub fn new(dim: usize, log2: u32, offset: GridOffset) -> Result<Self> {
        if log2 == 0 || log2 > 24 {
            return Err(Error::InvalidConfig(format!("grid_log2 must be in 1..=24, got {log2}")));
        }
        let spec = Self { dim, log2, offset };
        if (log2 as u64) * (dim as u64) > 36 {
            return Err(Error::InvalidConfig(format!(
                "grid of 2^{} points exceeds the supported 2^36",
                log2 as u64 * dim as u64
            )));
        }
        Ok(spec)
    }

    pub fn per_axis(&self) -> u64 {
        1 << self.log2
    }

    pub fn total_points(&self) -> u64 {
        1u64 << (self.log2 as u64 * self.dim as u64)
    }

    pub fn mesh(&self) -> f64 {
        1.0 / self.per_axis() as f64
    }

    /// Coordinates of the point with the given multi-index.
    pub fn point(&self, index: &[u64]) -> Vec<f64> {
        let d = 2.0 * self.per_axis() as f64;
        index.iter().map(|&j| (2 * j as i64 + self.offset.doubled()) as f64 / d).collect()
    }

    /// Multi-index of a flat (row-major) index.
    pub fn unflatten(&self, mut flat: u64) -> Vec<u64> {
        let mask = self.per_axis() - 1;
        let mut idx = vec![0; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat & mask;
            flat >>= self.log2;
        }
        idx
    }

    pub fn flatten(&self, index: &[u64]) -> u64 {
        index.iter().fold(0, |acc, &j| (acc << self.log2) | j)
    }

    fn n_chunks(&self) -> u64 {
        self.total_points().div_ceil(CHUNK_POINTS)
    }
}

/// Table-driven error-tracked evaluation of one polynomial on one grid.
#[derive(Debug, Clone)]
pub struct GridEvaluator {
    spec: GridSpec,
    table: DyadicSineTable,
    freqs: Vec<Vec<i64>>,
    coeffs: Vec<[f64; 4]>,
    offset_phase: Vec<i64>,
}

impl GridEvaluator {
    pub fn new(f: &TrigPolynomial, spec: GridSpec) -> Result<Self> {
        if spec.dim != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), found: spec.dim });
        }
        let denominator = 2 * spec.per_axis() as usize;
        let table = DyadicSineTable::new(denominator.max(4));
        let freqs: Vec<Vec<i64>> = f.frequencies().map(|nu| nu.0.clone()).collect();
        let coeffs = f
            .terms()
            .iter()
            .map(|t| {
                [
                    t.sin_coeff.value(),
                    t.sin_coeff.representation_error(),
                    t.cos_coeff.value(),
                    t.cos_coeff.representation_error(),
                ]
            })
            .collect();
        let o = spec.offset.doubled();
        let offset_phase = freqs.iter().map(|nu| nu.iter().sum::<i64>() * o).collect();
        Ok(Self { spec, table, freqs, coeffs, offset_phase })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Phase numerators `m_i = nu_i . (2j + o)` for the multi-index `j`.
    fn phases(&self, index: &[u64], out: &mut [i64]) {
        for ((m, nu), off) in out.iter_mut().zip(&self.freqs).zip(&self.offset_phase) {
            *m = nu.iter().zip(index).map(|(&n, &j)| 2 * n * j as i64).sum::<i64>() + off;
        }
    }

    #[inline(always)]
    fn eval_phases(&self, phases: &[i64]) -> Enclosure {
        let mut acc = TermAccumulator::new();
        for (&m, c) in phases.iter().zip(&self.coeffs) {
            let (s, se) = self.table.sin(m);
            let (co, ce) = self.table.cos(m);
            acc.add_term(c[0], c[1], s, se, c[2], c[3], co, ce);
        }
        acc.finish()
    }

    /// Error-tracked value at a multi-index.
    pub fn eval_index(&self, index: &[u64]) -> Enclosure {
        let mut phases = vec![0; self.freqs.len()];
        self.phases(index, &mut phases);
        self.eval_phases(&phases)
    }

    /// Calls `visit` for each flat index in `[start, end)` in increasing order.
    pub fn for_each_in_range(&self, start: u64, end: u64, mut visit: impl FnMut(u64, Enclosure)) {
        if start >= end {
            return;
        }
        let n = self.spec.per_axis();
        let last = self.spec.dim - 1;
        let mut index = self.spec.unflatten(start);
        let mut phases = vec![0; self.freqs.len()];
        self.phases(&index, &mut phases);
        let steps: Vec<i64> = self.freqs.iter().map(|nu| 2 * nu[last]).collect();
        let mut flat = start;
        loop {
            visit(flat, self.eval_phases(&phases));
            flat += 1;
            if flat == end {
                break;
            }
            index[last] += 1;
            if index[last] < n {
                for (m, s) in phases.iter_mut().zip(&steps) {
                    *m += s;
                }
            } else {
                let mut axis = last;
                while index[axis] == n {
                    index[axis] = 0;
                    axis -= 1;
                    index[axis] += 1;
                }
                self.phases(&index, &mut phases);
            }
        }
    }
}

/// Runs `chunk_fn` over fixed chunks of the grid and returns the per-chunk
/// results in chunk order. `threads = None` uses the global rayon pool.
pub fn sweep_chunks<R, F>(eval: &GridEvaluator, threads: Option<usize>, chunk_fn: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&GridEvaluator, u64, u64) -> R + Sync,
{
    let total = eval.spec.total_points();
    let n_chunks = eval.spec.n_chunks();
    let run = || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK_POINTS;
                let end = (start + CHUNK_POINTS).min(total);
                chunk_fn(eval, start, end)
            })
            .collect::<Vec<R>>()
    };
    match threads {
        None => Ok(run()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}
