//! Sparse cost matrices between a source support and the target support.
//!
//! Infinite costs are never stored: the sparse pattern *is* the transport
//! constraint. Rows index source grid points and columns target grid points,
//! both in column-major linear order. Patterns are immutable once built and
//! are shared by reference between transport plans.

use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::melscale::{mel_axis, MelAxisConfig};
use crate::overlap::{freq_neighbors, mel_freq_neighbors, temporal_neighbors, OverlapContext};
use crate::tf_core::TFSupport;

/// Default cap on stored entries for dense builds (~2.4 GB of entry data).
pub const DEFAULT_ENTRY_CAP: usize = 100_000_000;

/// Finite-entry-only cost pattern in CSR layout.
///
/// Every stored cost is finite and nonnegative; per-row column indices are
/// strictly increasing. A row with no entries means that source point may
/// not transport anywhere (its mass can only be destroyed).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCostMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    costs: Vec<f64>,
}

impl SparseCostMatrix {
    /// Builds from raw CSR arrays, validating the structural invariants.
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        costs: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n_rows + 1 || row_ptr[0] != 0 {
            return Err(Error::InvalidArgument("malformed CSR row pointers".into()));
        }
        if col_idx.len() != costs.len() || *row_ptr.last().unwrap() != col_idx.len() {
            return Err(Error::InvalidArgument("CSR array lengths disagree".into()));
        }
        if row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "CSR row pointers must be non-decreasing".into(),
            ));
        }
        for r in 0..n_rows {
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "columns in row {} are not strictly increasing",
                    r + 1
                )));
            }
            if cols.last().is_some_and(|&c| c as usize >= n_cols) {
                return Err(Error::InvalidArgument(format!(
                    "column index out of range in row {}",
                    r + 1
                )));
            }
        }
        if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Domain(
                "stored costs must be finite and nonnegative".into(),
            ));
        }
        Ok(SparseCostMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            costs,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored (finite) entries.
    pub fn nnz(&self) -> usize {
        self.costs.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Column indices and costs of row `r` (0-based).
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[range.clone()], &self.costs[range])
    }

    /// Cost at `(row, col)` (0-based) if the entry is finite.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let (cols, costs) = self.row(row);
        cols.binary_search(&(col as u32))
            .ok()
            .map(|pos| costs[pos])
    }

    /// 0-based indices of rows with no finite entry.
    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.n_rows)
            .filter(|&r| self.row_ptr[r] == self.row_ptr[r + 1])
            .collect()
    }

    /// 0-based indices of columns with no finite entry.
    pub fn empty_cols(&self) -> Vec<usize> {
        let mut covered = vec![false; self.n_cols];
        for &c in &self.col_idx {
            covered[c as usize] = true;
        }
        covered
            .iter()
            .enumerate()
            .filter_map(|(c, &v)| (!v).then_some(c))
            .collect()
    }
}

/// Squared distance between normalized grid coordinates. All indices 1-based:
/// `((m_s-1)/(M_s-1) - (m-1)/(M-1))^2 + ((n_s-1)/(N_s-1) - (n-1)/(N-1))^2`.
pub fn normalized_cost(src: (usize, usize, usize, usize), tgt: (usize, usize, usize, usize)) -> f64 {
    let (ms, ns, m_src, n_src) = src;
    let (m, n, m_tgt, n_tgt) = tgt;
    let df = (ms - 1) as f64 / (m_src - 1) as f64 - (m - 1) as f64 / (m_tgt - 1) as f64;
    let dt = (ns - 1) as f64 / (n_src - 1) as f64 - (n - 1) as f64 / (n_tgt - 1) as f64;
    df * df + dt * dt
}

struct CsrBuilder {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    costs: Vec<f64>,
}

impl CsrBuilder {
    fn new(n_rows: usize, n_cols: usize) -> Self {
        CsrBuilder {
            n_rows,
            n_cols,
            row_ptr: Vec::with_capacity(n_rows + 1),
            col_idx: Vec::new(),
            costs: Vec::new(),
        }
    }

    fn push(&mut self, col: usize, cost: f64) {
        self.col_idx.push(col as u32);
        self.costs.push(cost);
    }

    fn finish_row(&mut self) {
        if self.row_ptr.is_empty() {
            self.row_ptr.push(0);
        }
        self.row_ptr.push(self.col_idx.len());
    }

    fn finish(mut self) -> SparseCostMatrix {
        if self.row_ptr.is_empty() {
            self.row_ptr.push(0);
        }
        debug_assert_eq!(self.row_ptr.len(), self.n_rows + 1);
        SparseCostMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr,
            col_idx: self.col_idx,
            costs: self.costs,
        }
    }
}

fn check_no_empty_rows(mat: &SparseCostMatrix) -> Result<()> {
    if let Some(&r) = mat.empty_rows().first() {
        return Err(Error::EmptyPattern {
            kind: "source row",
            index: r + 1,
        });
    }
    Ok(())
}

fn check_no_empty_cols(mat: &SparseCostMatrix) -> Result<()> {
    if let Some(&c) = mat.empty_cols().first() {
        return Err(Error::EmptyPattern {
            kind: "target column",
            index: c + 1,
        });
    }
    Ok(())
}

fn dims(s: &TFSupport) -> (usize, usize) {
    (s.n_freqs(), s.n_times())
}

/// Fully dense normalized-coordinate cost matrix (every pair stored).
///
/// Fails fast when the entry count `M_s N_s M N` exceeds `entry_cap`.
pub fn build_dense_cost(
    src: &TFSupport,
    tgt: &TFSupport,
    entry_cap: usize,
) -> Result<SparseCostMatrix> {
    let (m_src, n_src) = dims(src);
    let (m_tgt, n_tgt) = dims(tgt);
    let entries = m_src
        .checked_mul(n_src)
        .and_then(|v| v.checked_mul(m_tgt))
        .and_then(|v| v.checked_mul(n_tgt))
        .ok_or_else(|| Error::ResourceLimit("dense entry count overflows usize".into()))?;
    if entries > entry_cap {
        return Err(Error::ResourceLimit(format!(
            "dense cost would store {entries} entries, cap is {entry_cap}"
        )));
    }
    let mut b = CsrBuilder::new(m_src * n_src, m_tgt * n_tgt);
    for ns in 1..=n_src {
        for ms in 1..=m_src {
            for n in 1..=n_tgt {
                for m in 1..=m_tgt {
                    let cost = normalized_cost((ms, ns, m_src, n_src), (m, n, m_tgt, n_tgt));
                    b.push((n - 1) * m_tgt + (m - 1), cost);
                }
            }
            b.finish_row();
        }
    }
    Ok(b.finish())
}

fn require_equal_axis(kind: &str, a: &[f64], b: &[f64]) -> Result<()> {
    if a != b {
        return Err(Error::AxisMismatch(format!(
            "{kind} axes must be identical ({} vs {} points)",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Frequency-aligned structured cost from the long-window input: an entry
/// exists iff the source and target frequency rows coincide and, with
/// `use_overlap`, the target frame lies in the temporal neighbor set of the
/// source frame. Requires the target frequency axis to equal the source's.
pub fn build_structured_freq(
    src: &TFSupport,
    tgt: &TFSupport,
    ctx: &OverlapContext,
    use_overlap: bool,
) -> Result<SparseCostMatrix> {
    require_equal_axis("frequency", src.freqs(), tgt.freqs())?;
    let (m_src, n_src) = dims(src);
    let (m_tgt, n_tgt) = dims(tgt);
    let neighbor_sets: Vec<RangeInclusive<usize>> = (1..=n_src)
        .map(|n1| {
            if use_overlap {
                temporal_neighbors(n1, ctx, n_tgt)
            } else {
                1..=n_tgt
            }
        })
        .collect();
    let mut b = CsrBuilder::new(m_src * n_src, m_tgt * n_tgt);
    for ns in 1..=n_src {
        let frames = neighbor_sets[ns - 1].clone();
        for ms in 1..=m_src {
            for n in frames.clone() {
                let cost = normalized_cost((ms, ns, m_src, n_src), (ms, n, m_tgt, n_tgt));
                b.push((n - 1) * m_tgt + (ms - 1), cost);
            }
            b.finish_row();
        }
    }
    let mat = b.finish();
    check_no_empty_rows(&mat)?;
    check_no_empty_cols(&mat)?;
    Ok(mat)
}

/// Time-aligned structured cost from the short-window input: an entry exists
/// iff the source and target frames coincide and, with `use_overlap`, the
/// target bin lies in the frequency neighbor set of the source bin. Requires
/// the target time axis to equal the source's.
pub fn build_structured_time(
    src: &TFSupport,
    tgt: &TFSupport,
    ctx: &OverlapContext,
    use_overlap: bool,
) -> Result<SparseCostMatrix> {
    require_equal_axis("time", src.times(), tgt.times())?;
    let (m_src, n_src) = dims(src);
    let (m_tgt, n_tgt) = dims(tgt);
    let neighbor_sets: Vec<RangeInclusive<usize>> = (1..=m_src)
        .map(|m2| {
            if use_overlap {
                freq_neighbors(m2, ctx, m_tgt)
            } else {
                1..=m_tgt
            }
        })
        .collect();
    let mut b = CsrBuilder::new(m_src * n_src, m_tgt * n_tgt);
    for ns in 1..=n_src {
        for ms in 1..=m_src {
            for m in neighbor_sets[ms - 1].clone() {
                let cost = normalized_cost((ms, ns, m_src, n_src), (m, ns, m_tgt, n_tgt));
                b.push((ns - 1) * m_tgt + (m - 1), cost);
            }
            b.finish_row();
        }
    }
    let mat = b.finish();
    check_no_empty_rows(&mat)?;
    check_no_empty_cols(&mat)?;
    Ok(mat)
}

/// Cost pair onto a mel-frequency target `mel_axis x T_2`.
///
/// The long-window matrix masks by temporal neighbors and mel-domain
/// frequency neighbors; the short-window matrix is frame-aligned with
/// mel-domain frequency neighbors. A mel axis much denser in Hz than the
/// window main lobes can leave high-frequency source bins of the long-window
/// input with no reachable mel band; such rows stay empty (their energy is
/// simply not transported), whereas an unreachable target column is an error
/// because that mel band could never receive mass.
pub fn build_mel_costs(
    src1: &TFSupport,
    src2: &TFSupport,
    tgt: &TFSupport,
    ctx: &OverlapContext,
    mel: &MelAxisConfig,
) -> Result<(SparseCostMatrix, SparseCostMatrix)> {
    require_equal_axis("time", src2.times(), tgt.times())?;
    let expected = mel_axis(mel);
    require_equal_axis("mel frequency", &expected, tgt.freqs())?;

    let (m1_count, n1_count) = dims(src1);
    let (m2_count, n2_count) = dims(src2);
    let (m_tgt, n_tgt) = dims(tgt);

    // long-window input: temporal neighbors x mel neighbors (src window = W1)
    let mel_sets_1: Vec<RangeInclusive<usize>> = (1..=m1_count)
        .map(|m1| mel_freq_neighbors(m1, m1_count, ctx.w1, ctx, mel))
        .collect();
    let time_sets: Vec<RangeInclusive<usize>> = (1..=n1_count)
        .map(|n1| temporal_neighbors(n1, ctx, n_tgt))
        .collect();
    let mut b1 = CsrBuilder::new(m1_count * n1_count, m_tgt * n_tgt);
    for ns in 1..=n1_count {
        let frames = time_sets[ns - 1].clone();
        for ms in 1..=m1_count {
            for n in frames.clone() {
                for m in mel_sets_1[ms - 1].clone() {
                    let cost = normalized_cost((ms, ns, m1_count, n1_count), (m, n, m_tgt, n_tgt));
                    b1.push((n - 1) * m_tgt + (m - 1), cost);
                }
            }
            b1.finish_row();
        }
    }
    let c1 = b1.finish();
    check_no_empty_cols(&c1)?;

    // short-window input: frame-aligned x mel neighbors (src window = W2)
    let mel_sets_2: Vec<RangeInclusive<usize>> = (1..=m2_count)
        .map(|m2| mel_freq_neighbors(m2, m2_count, ctx.w2, ctx, mel))
        .collect();
    let mut b2 = CsrBuilder::new(m2_count * n2_count, m_tgt * n_tgt);
    for ns in 1..=n2_count {
        for ms in 1..=m2_count {
            for m in mel_sets_2[ms - 1].clone() {
                let cost = normalized_cost((ms, ns, m2_count, n2_count), (m, ns, m_tgt, n_tgt));
                b2.push((ns - 1) * m_tgt + (m - 1), cost);
            }
            b2.finish_row();
        }
    }
    let c2 = b2.finish();
    check_no_empty_cols(&c2)?;

    Ok((c1, c2))
}

/// Convenience alias used where patterns are shared between plans.
pub type SharedCost = Arc<SparseCostMatrix>;
