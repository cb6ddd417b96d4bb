//! Finite and `d`-periodic edge-weighted graphs in quotient presentation,
//! their Laplacian matrices and Laplacian polynomials.

use std::collections::VecDeque;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{ExponentVector, LaurentMatrix, LaurentPoly};
use crate::linalg::{self, IntegerMatrix};

/// Orbit of edges `v_(tail, t) -- v_(head, t + shift)` for all `t` in `Z^d`.
/// Vertex indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeOrbit {
    pub tail: usize,
    pub head: usize,
    pub shift: ExponentVector,
    pub weight: i64,
}

impl EdgeOrbit {
    pub fn new(tail: usize, head: usize, shift: Vec<i64>, weight: i64) -> Self {
        EdgeOrbit {
            tail,
            head,
            shift: ExponentVector::new(shift),
            weight,
        }
    }

    /// Edge `tail -- head` of a finite graph (`d = 0`).
    pub fn finite(tail: usize, head: usize, weight: i64) -> Self {
        Self::new(tail, head, Vec::new(), weight)
    }

    /// Edge of a single-vertex-orbit 1-periodic graph winding `s` times.
    pub fn winding(s: i64, weight: i64) -> Self {
        Self::new(0, 0, vec![s], weight)
    }

    fn is_true_loop(&self) -> bool {
        self.tail == self.head && self.shift.is_zero()
    }

    /// Same undirected edge with orientation reversed.
    pub fn reversed(&self) -> Self {
        EdgeOrbit {
            tail: self.head,
            head: self.tail,
            shift: self.shift.neg(),
            weight: self.weight,
        }
    }

    /// Representative with `tail <= head`; for a self-orbit edge the first
    /// nonzero shift coordinate is positive.
    pub fn canonical(&self) -> Self {
        let flip = if self.tail != self.head {
            self.tail > self.head
        } else {
            self.shift
                .components()
                .iter()
                .find(|&&c| c != 0)
                .is_some_and(|&c| c < 0)
        };
        if flip {
            self.reversed()
        } else {
            self.clone()
        }
    }
}

/// A `d`-periodic weighted graph given by `n` vertex orbits and a list of
/// edge orbits. `d = 0` encodes an ordinary finite graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicGraph {
    dim: usize,
    vertex_orbits: usize,
    edges: Vec<EdgeOrbit>,
}

/// Connected components of the quotient graph and their monodromy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentInfo {
    /// Vertex orbits of each component, ascending; components ordered by
    /// smallest vertex.
    pub vertex_sets: Vec<Vec<usize>>,
    /// Rank of the subgroup of `Z^d` generated by cycle shifts.
    pub monodromy_rank: Vec<usize>,
    /// Component lifts to finite (closed) components of the periodic graph.
    pub closed: Vec<bool>,
}

impl ComponentInfo {
    pub fn count(&self) -> usize {
        self.vertex_sets.len()
    }

    pub fn any_closed(&self) -> bool {
        self.closed.iter().any(|&c| c)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    from: usize,
    to: usize,
    #[serde(default)]
    shift: Vec<i64>,
    weight: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    dim: usize,
    vertex_orbits: usize,
    edges: Vec<EdgeRecord>,
}

impl PeriodicGraph {
    /// Validates and canonicalizes. True loops (same vertex, zero shift) are
    /// dropped since they do not change the Laplacian.
    pub fn new(dim: usize, vertex_orbits: usize, edges: Vec<EdgeOrbit>) -> Result<Self> {
        if vertex_orbits == 0 {
            return Err(Error::InvalidGraph(
                "graph needs at least one vertex orbit".into(),
            ));
        }
        let mut kept = Vec::with_capacity(edges.len());
        for (k, e) in edges.into_iter().enumerate() {
            if e.tail >= vertex_orbits || e.head >= vertex_orbits {
                return Err(Error::InvalidGraph(format!(
                    "edge {}: vertex index out of range 1..={vertex_orbits}",
                    k + 1
                )));
            }
            if e.weight == 0 {
                return Err(Error::InvalidGraph(format!("edge {}: zero weight", k + 1)));
            }
            if e.shift.dim() != dim {
                return Err(Error::InvalidGraph(format!(
                    "edge {}: shift has length {}, expected {dim}",
                    k + 1,
                    e.shift.dim()
                )));
            }
            if !e.is_true_loop() {
                kept.push(e.canonical());
            }
        }
        Ok(PeriodicGraph {
            dim,
            vertex_orbits,
            edges: kept,
        })
    }

    /// Finite graph on `n` vertices from zero-based `(u, v, weight)` triples.
    pub fn finite(n: usize, edges: &[(usize, usize, i64)]) -> Result<Self> {
        Self::new(
            0,
            n,
            edges
                .iter()
                .map(|&(u, v, w)| EdgeOrbit::finite(u, v, w))
                .collect(),
        )
    }

    /// The grid graph `G_d`: one vertex orbit, one unit-shift edge per axis.
    pub fn grid(dim: usize) -> Self {
        let edges = (0..dim)
            .map(|i| EdgeOrbit {
                tail: 0,
                head: 0,
                shift: ExponentVector::unit(dim, i),
                weight: 1,
            })
            .collect();
        PeriodicGraph {
            dim,
            vertex_orbits: 1,
            edges,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_orbits(&self) -> usize {
        self.vertex_orbits
    }

    pub fn edges(&self) -> &[EdgeOrbit] {
        &self.edges
    }

    pub fn is_finite(&self) -> bool {
        self.dim == 0
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1)
    }

    /// Parses the JSON graph file format (one-based vertex indices).
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph file: {e}")))?;
        let mut edges = Vec::with_capacity(file.edges.len());
        for (k, r) in file.edges.into_iter().enumerate() {
            if r.from == 0 || r.to == 0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {}: vertex indices are one-based",
                    k + 1
                )));
            }
            edges.push(EdgeOrbit::new(r.from - 1, r.to - 1, r.shift, r.weight));
        }
        Self::new(file.dim, file.vertex_orbits, edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            dim: self.dim,
            vertex_orbits: self.vertex_orbits,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    from: e.tail + 1,
                    to: e.head + 1,
                    shift: e.shift.components().to_vec(),
                    weight: e.weight,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization cannot fail")
    }

    /// `L_G = delta - A` over `Z[x1^±1, ..., xd^±1]`.
    pub fn laplacian_matrix(&self) -> LaurentMatrix {
        let n = self.vertex_orbits;
        let zero = ExponentVector::zero(self.dim);
        let mut m = LaurentMatrix::zeros(n, self.dim);
        for e in &self.edges {
            let w = BigInt::from(e.weight);
            m.add_monomial(e.tail, e.tail, zero.clone(), w.clone());
            m.add_monomial(e.head, e.head, zero.clone(), w.clone());
            m.add_monomial(e.tail, e.head, e.shift.clone(), -w.clone());
            m.add_monomial(e.head, e.tail, e.shift.neg(), -w);
        }
        m
    }

    /// `D_G = det L_G`.
    pub fn laplacian_polynomial(&self) -> Result<LaurentPoly> {
        self.laplacian_matrix().det()
    }

    /// Integer Laplacian of the quotient graph (every `x_i` set to 1). For a
    /// finite graph this is its ordinary weighted Laplacian.
    pub fn integer_laplacian(&self) -> IntegerMatrix {
        let n = self.vertex_orbits;
        let mut m = IntegerMatrix::zeros(n, n);
        for e in &self.edges {
            let w = BigInt::from(e.weight);
            m.add_at(e.tail, e.tail, &w);
            m.add_at(e.head, e.head, &w);
            m.add_at(e.tail, e.head, &-&w);
            m.add_at(e.head, e.tail, &-&w);
        }
        m
    }

    /// Connected components of the quotient graph, with the monodromy rank of
    /// each computed from potentials along a BFS spanning tree.
    pub fn component_orbits(&self) -> ComponentInfo {
        let n = self.vertex_orbits;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.tail].push(k);
            if e.head != e.tail {
                adj[e.head].push(k);
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut potential: Vec<Option<ExponentVector>> = vec![None; n];
        let mut info = ComponentInfo {
            vertex_sets: Vec::new(),
            monodromy_rank: Vec::new(),
            closed: Vec::new(),
        };
        for root in 0..n {
            if comp[root] != usize::MAX {
                continue;
            }
            let id = info.vertex_sets.len();
            let mut verts = vec![root];
            let mut tree_edges = vec![false; self.edges.len()];
            comp[root] = id;
            potential[root] = Some(ExponentVector::zero(self.dim));
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &k in &adj[v] {
                    let e = &self.edges[k];
                    let (other, step) = if e.tail == v {
                        (e.head, e.shift.clone())
                    } else {
                        (e.tail, e.shift.neg())
                    };
                    if comp[other] == usize::MAX {
                        comp[other] = id;
                        potential[other] = Some(potential[v].as_ref().unwrap().add(&step));
                        tree_edges[k] = true;
                        verts.push(other);
                        queue.push_back(other);
                    }
                }
            }
            verts.sort_unstable();
            let defects: Vec<Vec<i64>> = self
                .edges
                .iter()
                .enumerate()
                .filter(|(k, e)| comp[e.tail] == id && !tree_edges[*k])
                .map(|(_, e)| {
                    let pt = potential[e.tail].as_ref().unwrap();
                    let ph = potential[e.head].as_ref().unwrap();
                    pt.add(&e.shift).sub(ph).components().to_vec()
                })
                .filter(|d| d.iter().any(|&c| c != 0))
                .collect();
            let rank = if defects.is_empty() {
                0
            } else {
                linalg::rank(&IntegerMatrix::from_rows(&defects).unwrap())
            };
            info.vertex_sets.push(verts);
            info.monodromy_rank.push(rank);
            info.closed.push(rank == 0);
        }
        info
    }

    /// Induced subgraph on `vertices`, reindexed in the given order.
    pub fn subgraph(&self, vertices: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.vertex_orbits];
        for (k, &v) in vertices.iter().enumerate() {
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.tail] != usize::MAX && index[e.head] != usize::MAX)
            .map(|e| EdgeOrbit {
                tail: index[e.tail],
                head: index[e.head],
                shift: e.shift.clone(),
                weight: e.weight,
            })
            .collect();
        Self::new(self.dim, vertices.len(), edges)
    }

    /// Disjoint union; vertices of `other` are numbered after those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let off = self.vertex_orbits;
        let edges = self
            .edges
            .iter()
            .cloned()
            .chain(other.edges.iter().map(|e| EdgeOrbit {
                tail: e.tail + off,
                head: e.head + off,
                shift: e.shift.clone(),
                weight: e.weight,
            }))
            .collect();
        Self::new(self.dim, off + other.vertex_orbits, edges)
    }
}
