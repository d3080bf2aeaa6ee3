//! Explicit two-way-labeled undirected multigraphs.
//!
//! A graph on `n` vertices stores per-vertex slot counts (degrees) and a
//! total rotation table pairing every edge slot with its partner slot.
//! Vertices and labels are 1-indexed. A self loop written `u u` occupies
//! exactly one slot and is a fixed point of the rotation map; rotation
//! tables produced by graph operations may additionally pair two distinct
//! slots of the same vertex (a two-slot loop), which counts 2 toward the
//! diagonal of the adjacency matrix.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymmetricMatrix};
use crate::scalar::Scalar;

/// One edge slot: `label` ranges over `1..=degree(vertex)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSlot {
    pub vertex: usize,
    pub label: u64,
}

impl EdgeSlot {
    pub fn new(vertex: usize, label: u64) -> Self {
        EdgeSlot { vertex, label }
    }
}

#[derive(Clone, Debug)]
pub struct LabeledMultigraph {
    n: usize,
    degrees: Vec<u64>,
    offsets: Vec<usize>,
    rot_table: Vec<(u32, u32)>,
}

impl LabeledMultigraph {
    /// Canonical construction from an unordered edge list. Non-loop edge
    /// ends are labeled `1..=d_v` per endpoint in input order; each loop
    /// consumes one slot mapped to itself.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        let mut degrees = vec![0u64; n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w < 1 || w > n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                degrees[u - 1] += 1;
            } else {
                degrees[u - 1] += 1;
                degrees[v - 1] += 1;
            }
        }
        for (i, &d) in degrees.iter().enumerate() {
            if d == 0 {
                return Err(Error::ZeroDegreeVertex(i + 1));
            }
            if d > u32::MAX as u64 {
                return Err(Error::DegreeOverflow);
            }
        }
        let offsets = offsets_of(&degrees);
        let total = offsets[n];
        let mut rot_table = vec![(u32::MAX, u32::MAX); total];
        let mut cursor = vec![0u32; n];
        for &(u, v) in edges {
            if u == v {
                let lu = cursor[u - 1];
                cursor[u - 1] += 1;
                rot_table[offsets[u - 1] + lu as usize] = (u as u32 - 1, lu);
            } else {
                let lu = cursor[u - 1];
                let lv = cursor[v - 1];
                cursor[u - 1] += 1;
                cursor[v - 1] += 1;
                rot_table[offsets[u - 1] + lu as usize] = (v as u32 - 1, lv);
                rot_table[offsets[v - 1] + lv as usize] = (u as u32 - 1, lu);
            }
        }
        Ok(LabeledMultigraph { n, degrees, offsets, rot_table })
    }

    /// Build from an arbitrary slot mapping, validating the involution.
    pub fn from_rot_fn(
        n: usize,
        degrees: Vec<u64>,
        mut rot: impl FnMut(EdgeSlot) -> EdgeSlot,
    ) -> Result<Self> {
        assert_eq!(degrees.len(), n);
        for (i, &d) in degrees.iter().enumerate() {
            if d == 0 {
                return Err(Error::ZeroDegreeVertex(i + 1));
            }
            if d > u32::MAX as u64 {
                return Err(Error::DegreeOverflow);
            }
        }
        let offsets = offsets_of(&degrees);
        let total = offsets[n];
        let mut rot_table = vec![(u32::MAX, u32::MAX); total];
        for v in 1..=n {
            for label in 1..=degrees[v - 1] {
                let t = rot(EdgeSlot::new(v, label));
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
                rot_table[offsets[v - 1] + (label - 1) as usize] =
                    (t.vertex as u32 - 1, t.label as u32 - 1);
            }
        }
        let g = LabeledMultigraph { n, degrees, offsets, rot_table };
        g.check_involution()?;
        Ok(g)
    }

    pub(crate) fn from_parts_unchecked(
        n: usize,
        degrees: Vec<u64>,
        rot_table: Vec<(u32, u32)>,
    ) -> Self {
        let offsets = offsets_of(&degrees);
        debug_assert_eq!(offsets[n], rot_table.len());
        LabeledMultigraph { n, degrees, offsets, rot_table }
    }

    pub fn check_involution(&self) -> Result<()> {
        for v in 1..=self.n {
            for label in 1..=self.degrees[v - 1] {
                let s = EdgeSlot::new(v, label);
                let t = self.rot_unchecked(s);
                if self.rot_unchecked(t) != s {
                    return Err(Error::NotInvolutive { vertex: v, label });
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree_of(&self, v: usize) -> u64 {
        self.degrees[v - 1]
    }

    pub fn total_slot_count(&self) -> usize {
        self.rot_table.len()
    }

    #[inline]
    pub(crate) fn rot_unchecked(&self, s: EdgeSlot) -> EdgeSlot {
        let (v, l) = self.rot_table[self.offsets[s.vertex - 1] + (s.label - 1) as usize];
        EdgeSlot::new(v as usize + 1, l as u64 + 1)
    }

    /// The rotation map: returns the paired slot; `rot(rot(s)) = s`.
    pub fn rot(&self, s: EdgeSlot) -> Result<EdgeSlot> {
        if s.vertex < 1 || s.vertex > self.n {
            return Err(Error::VertexOutOfRange { vertex: s.vertex, n: self.n });
        }
        let d = self.degrees[s.vertex - 1];
        if s.label < 1 || s.label > d {
            return Err(Error::LabelOutOfRange { vertex: s.vertex, label: s.label, degree: d });
        }
        Ok(self.rot_unchecked(s))
    }

    /// Adjacency counts. A one-slot loop adds 1 to the diagonal; a two-slot
    /// loop adds 2. Row sums equal degrees.
    pub fn adjacency<S: Scalar>(&self) -> SymmetricMatrix<S> {
        let mut counts = vec![0u64; self.n * self.n];
        for v in 1..=self.n {
            for label in 1..=self.degrees[v - 1] {
                let t = self.rot_unchecked(EdgeSlot::new(v, label));
                counts[(t.vertex - 1) * self.n + (v - 1)] += 1;
            }
        }
        SymmetricMatrix::from_fn_upper(self.n, |i, j| {
            debug_assert_eq!(counts[i * self.n + j], counts[j * self.n + i]);
            S::from_f64(counts[i * self.n + j] as f64)
        })
    }

    /// Column-stochastic transition matrix `T = A D^{-1}`; entry `(i, j)`
    /// is the fraction of slots at `j` leading to `i`.
    pub fn transition_matrix<S: Scalar>(&self) -> Matrix<S> {
        let a = self.adjacency::<S>();
        Matrix::from_fn(self.n, |i, j| a[(i, j)] / S::from_f64(self.degrees[j] as f64))
    }

    /// `M = D^{-1/2} A D^{-1/2}`.
    pub fn normalized_adjacency<S: Scalar>(&self) -> SymmetricMatrix<S> {
        let a = self.adjacency::<S>();
        SymmetricMatrix::from_fn_upper(self.n, |i, j| {
            a[(i, j)] / S::from_f64(((self.degrees[i] as f64) * (self.degrees[j] as f64)).sqrt())
        })
    }

    /// Normalized Laplacian `I - M`; PSD with eigenvalues in `[0, 2]`.
    pub fn normalized_laplacian<S: Scalar>(&self) -> SymmetricMatrix<S> {
        let m = self.normalized_adjacency::<S>();
        SymmetricMatrix::from_fn_upper(self.n, |i, j| {
            let delta = if i == j { S::one() } else { S::zero() };
            delta - m[(i, j)]
        })
    }

    /// Multiply every edge (and loop) to multiplicity `k`. Copy `c` of slot
    /// `j` carries label `(c-1)*d_v + j`; the normalized Laplacian is
    /// unchanged.
    pub fn duplicate_edges(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("duplication factor must be >= 1"));
        }
        let degrees: Vec<u64> = self
            .degrees
            .iter()
            .map(|&d| d.checked_mul(k).ok_or(Error::DegreeOverflow))
            .collect::<Result<_>>()?;
        for &d in &degrees {
            if d > u32::MAX as u64 {
                return Err(Error::DegreeOverflow);
            }
        }
        let offsets = offsets_of(&degrees);
        let total = offsets[self.n];
        let mut rot_table = vec![(u32::MAX, u32::MAX); total];
        for v in 1..=self.n {
            let d = self.degrees[v - 1];
            for copy in 0..k {
                for label in 1..=d {
                    let t = self.rot_unchecked(EdgeSlot::new(v, label));
                    let dl = copy * d + (label - 1);
                    let tl = copy * self.degrees[t.vertex - 1] + (t.label - 1);
                    rot_table[offsets[v - 1] + dl as usize] = (t.vertex as u32 - 1, tl as u32);
                }
            }
        }
        Ok(LabeledMultigraph { n: self.n, degrees, offsets, rot_table })
    }

    /// Append `counts[v]` one-slot self loops to each vertex; existing
    /// labels are preserved.
    pub fn add_self_loops(&self, counts: &[u64]) -> Result<Self> {
        if counts.len() != self.n {
            return Err(Error::invalid(format!(
                "loop counts length {} != vertex count {}",
                counts.len(),
                self.n
            )));
        }
        let degrees: Vec<u64> = self
            .degrees
            .iter()
            .zip(counts)
            .map(|(&d, &c)| d.checked_add(c).ok_or(Error::DegreeOverflow))
            .collect::<Result<_>>()?;
        for &d in &degrees {
            if d > u32::MAX as u64 {
                return Err(Error::DegreeOverflow);
            }
        }
        let offsets = offsets_of(&degrees);
        let total = offsets[self.n];
        let mut rot_table = vec![(u32::MAX, u32::MAX); total];
        for v in 1..=self.n {
            let d = self.degrees[v - 1];
            for label in 1..=d {
                let t = self.rot_unchecked(EdgeSlot::new(v, label));
                rot_table[offsets[v - 1] + (label - 1) as usize] =
                    (t.vertex as u32 - 1, t.label as u32 - 1);
            }
            for extra in 0..counts[v - 1] {
                let l = d + extra;
                rot_table[offsets[v - 1] + l as usize] = (v as u32 - 1, l as u32);
            }
        }
        Ok(LabeledMultigraph { n: self.n, degrees, offsets, rot_table })
    }

    /// Stream every undirected edge once, in vertex-major, label-minor
    /// order, skipping the mirror of already-reported slots.
    pub fn enumerate_slots(&self) -> impl Iterator<Item = (EdgeSlot, EdgeSlot)> + '_ {
        (1..=self.n)
            .flat_map(move |v| (1..=self.degrees[v - 1]).map(move |l| EdgeSlot::new(v, l)))
            .filter_map(move |s| {
                let t = self.rot_unchecked(s);
                if t < s {
                    None
                } else {
                    Some((s, t))
                }
            })
    }

    /// Number of one-slot (fixed-point) loops.
    pub fn fixed_loop_count(&self) -> usize {
        (1..=self.n)
            .flat_map(|v| (1..=self.degrees[v - 1]).map(move |l| EdgeSlot::new(v, l)))
            .filter(|&s| self.rot_unchecked(s) == s)
            .count()
    }

    /// Sorted multiset of undirected edges `(min, max)`; two graphs with
    /// equal vertex counts and equal edge multisets have identical
    /// adjacency and transition matrices.
    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .enumerate_slots()
            .map(|(a, b)| (a.vertex.min(b.vertex), a.vertex.max(b.vertex)))
            .collect();
        edges.sort_unstable();
        edges
    }
}

fn offsets_of(degrees: &[u64]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(degrees.len() + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &d in degrees {
        acc += d as usize;
        offsets.push(acc);
    }
    offsets
}
