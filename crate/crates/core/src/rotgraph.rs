//! Lazily evaluated rotation-map graphs.
//!
//! Graphs defined by schedules of products never materialize intermediate
//! stages: a [`RotationGraph`] answers vertex count, per-vertex degree and
//! single slot rotations, and composite graphs close over their inputs.
//! Every implementation must be an involution over valid slots.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeSlot, LabeledMultigraph};

pub trait RotationGraph: Send + Sync {
    fn vertex_count(&self) -> usize;

    /// Degree of 1-indexed vertex `v`.
    fn degree(&self, v: usize) -> u64;

    /// Rotation map; `s` must be a valid slot.
    fn rot(&self, s: EdgeSlot) -> EdgeSlot;

    /// Depth of the evaluation recursion (1 for explicit graphs).
    fn recursion_depth(&self) -> usize {
        1
    }

    fn total_slots(&self) -> u128 {
        (1..=self.vertex_count()).map(|v| self.degree(v) as u128).sum()
    }
}

impl RotationGraph for LabeledMultigraph {
    fn vertex_count(&self) -> usize {
        self.vertex_count()
    }

    fn degree(&self, v: usize) -> u64 {
        self.degree_of(v)
    }

    fn rot(&self, s: EdgeSlot) -> EdgeSlot {
        self.rot_unchecked(s)
    }
}

impl<T: RotationGraph + ?Sized> RotationGraph for Arc<T> {
    fn vertex_count(&self) -> usize {
        (**self).vertex_count()
    }
    fn degree(&self, v: usize) -> u64 {
        (**self).degree(v)
    }
    fn rot(&self, s: EdgeSlot) -> EdgeSlot {
        (**self).rot(s)
    }
    fn recursion_depth(&self) -> usize {
        (**self).recursion_depth()
    }
}

/// Validate a slot against a graph.
pub fn check_slot(g: &dyn RotationGraph, s: EdgeSlot) -> Result<()> {
    let n = g.vertex_count();
    if s.vertex < 1 || s.vertex > n {
        return Err(Error::VertexOutOfRange { vertex: s.vertex, n });
    }
    let d = g.degree(s.vertex);
    if s.label < 1 || s.label > d {
        return Err(Error::LabelOutOfRange { vertex: s.vertex, label: s.label, degree: d });
    }
    Ok(())
}

/// Every edge duplicated `k` times; copy `c` of slot `j` maps to copy `c`
/// of `rot(j)`.
pub struct DuplicatedGraph {
    inner: Arc<dyn RotationGraph>,
    k: u64,
}

impl DuplicatedGraph {
    pub fn new(inner: Arc<dyn RotationGraph>, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("duplication factor must be >= 1"));
        }
        for v in 1..=inner.vertex_count() {
            inner.degree(v).checked_mul(k).ok_or(Error::DegreeOverflow)?;
        }
        Ok(DuplicatedGraph { inner, k })
    }
}

impl RotationGraph for DuplicatedGraph {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn degree(&self, v: usize) -> u64 {
        self.inner.degree(v) * self.k
    }

    fn rot(&self, s: EdgeSlot) -> EdgeSlot {
        let d = self.inner.degree(s.vertex);
        let copy = (s.label - 1) / d;
        let orig = (s.label - 1) % d + 1;
        let t = self.inner.rot(EdgeSlot::new(s.vertex, orig));
        EdgeSlot::new(t.vertex, copy * self.inner.degree(t.vertex) + t.label)
    }

    fn recursion_depth(&self) -> usize {
        self.inner.recursion_depth() + 1
    }
}

/// Appends per-vertex self loops (rotation fixed points) after the
/// original labels.
pub struct SelfLoopedGraph {
    inner: Arc<dyn RotationGraph>,
    counts: Arc<Vec<u64>>,
}

impl SelfLoopedGraph {
    pub fn new(inner: Arc<dyn RotationGraph>, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != inner.vertex_count() {
            return Err(Error::invalid("loop count vector length mismatch"));
        }
        for v in 1..=inner.vertex_count() {
            inner.degree(v).checked_add(counts[v - 1]).ok_or(Error::DegreeOverflow)?;
        }
        Ok(SelfLoopedGraph { inner, counts: Arc::new(counts) })
    }
}

impl RotationGraph for SelfLoopedGraph {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn degree(&self, v: usize) -> u64 {
        self.inner.degree(v) + self.counts[v - 1]
    }

    fn rot(&self, s: EdgeSlot) -> EdgeSlot {
        let d = self.inner.degree(s.vertex);
        if s.label <= d {
            self.inner.rot(s)
        } else {
            s
        }
    }

    fn recursion_depth(&self) -> usize {
        self.inner.recursion_depth() + 1
    }
}

/// `n` vertices, one self loop each: the normalized Laplacian is the zero
/// matrix, i.e. `I - M^0`.
pub struct AllLoopsGraph {
    pub n: usize,
}

impl RotationGraph for AllLoopsGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn degree(&self, _v: usize) -> u64 {
        1
    }
    fn rot(&self, s: EdgeSlot) -> EdgeSlot {
        s
    }
}

/// Evaluate every slot of `g` into an explicit graph. Fails if the total
/// slot count exceeds `max_slots`, reporting the exact count. Slot ranges
/// are partitioned across worker threads; the merge order is fixed by the
/// slot layout, so the result is deterministic.
pub fn materialize(g: &dyn RotationGraph, max_slots: u64) -> Result<LabeledMultigraph> {
    let n = g.vertex_count();
    let total = g.total_slots();
    if total > max_slots as u128 {
        return Err(Error::BudgetExceeded { slots: total, budget: max_slots });
    }
    let degrees: Vec<u64> = (1..=n).map(|v| g.degree(v)).collect();
    for &d in &degrees {
        if d > u32::MAX as u64 {
            return Err(Error::DegreeOverflow);
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &d in &degrees {
        acc += d as usize;
        offsets.push(acc);
    }

    let mut rot_table = vec![(u32::MAX, u32::MAX); acc];
    {
        // Chunk by vertex: each worker owns a disjoint slice of the table.
        let mut slices: Vec<(usize, &mut [(u32, u32)])> = Vec::with_capacity(n);
        let mut rest: &mut [(u32, u32)] = &mut rot_table;
        for v in 1..=n {
            let (head, tail) = rest.split_at_mut(degrees[v - 1] as usize);
            slices.push((v, head));
            rest = tail;
        }
        slices.into_par_iter().try_for_each(|(v, slice)| -> Result<()> {
            for (idx, cell) in slice.iter_mut().enumerate() {
                let t = g.rot(EdgeSlot::new(v, idx as u64 + 1));
                if t.vertex < 1 || t.vertex > n {
                    return Err(Error::VertexOutOfRange { vertex: t.vertex, n });
                }
                if t.label < 1 || t.label > degrees[t.vertex - 1] {
                    return Err(Error::LabelOutOfRange {
                        vertex: t.vertex,
                        label: t.label,
                        degree: degrees[t.vertex - 1],
                    });
                }
                *cell = (t.vertex as u32 - 1, t.label as u32 - 1);
            }
            Ok(())
        })?;
    }

    let out = LabeledMultigraph::from_parts_unchecked(n, degrees, rot_table);
    out.check_involution()?;
    Ok(out)
}

/// Dense column-stochastic transition matrix by full slot enumeration.
pub fn dense_transition(
    g: &dyn RotationGraph,
    max_slots: u64,
) -> Result<crate::matrix::Matrix<f64>> {
    let total = g.total_slots();
    if total > max_slots as u128 {
        return Err(Error::BudgetExceeded { slots: total, budget: max_slots });
    }
    let n = g.vertex_count();
    let mut t = crate::matrix::Matrix::zeros(n);
    for v in 1..=n {
        let d = g.degree(v);
        let w = 1.0 / d as f64;
        for label in 1..=d {
            let s = g.rot(EdgeSlot::new(v, label));
            t[(s.vertex - 1, v - 1)] += w;
        }
    }
    Ok(t)
}

/// Dense `M = D^{-1/2} A D^{-1/2}` by full slot enumeration, written
/// exactly symmetric from the integer slot counts.
pub fn dense_normalized_adjacency(
    g: &dyn RotationGraph,
    max_slots: u64,
) -> Result<crate::matrix::SymmetricMatrix<f64>> {
    let total = g.total_slots();
    if total > max_slots as u128 {
        return Err(Error::BudgetExceeded { slots: total, budget: max_slots });
    }
    let n = g.vertex_count();
    let mut counts = vec![0u64; n * n];
    for v in 1..=n {
        for label in 1..=g.degree(v) {
            let s = g.rot(EdgeSlot::new(v, label));
            counts[(s.vertex - 1) * n + (v - 1)] += 1;
        }
    }
    let degrees: Vec<f64> = (1..=n).map(|v| g.degree(v) as f64).collect();
    Ok(crate::matrix::SymmetricMatrix::from_fn_upper(n, |i, j| {
        debug_assert_eq!(counts[i * n + j], counts[j * n + i]);
        counts[i * n + j] as f64 / (degrees[i] * degrees[j]).sqrt()
    }))
}

/// Measured lambda of a regular rotation-map graph via slot enumeration.
pub fn measured_lambda(g: &dyn RotationGraph, max_slots: u64) -> Result<f64> {
    if g.vertex_count() == 1 {
        return Ok(0.0);
    }
    let t = dense_transition(g, max_slots)?;
    Ok(crate::spectral::lambda_of_transition(&t))
}

/// Exhaustively verify the involution of a lazy graph without
/// materializing it (used when the slot table would not fit in memory but
/// evaluation is still affordable).
pub fn check_involution_lazy(g: &dyn RotationGraph, max_slots: u64) -> Result<()> {
    let total = g.total_slots();
    if total > max_slots as u128 {
        return Err(Error::BudgetExceeded { slots: total, budget: max_slots });
    }
    for v in 1..=g.vertex_count() {
        for label in 1..=g.degree(v) {
            let s = EdgeSlot::new(v, label);
            if g.rot(g.rot(s)) != s {
                return Err(Error::NotInvolutive { vertex: v, label });
            }
        }
    }
    Ok(())
}
