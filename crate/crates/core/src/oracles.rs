//! Brute-force enumerations used to cross-check the determinant and Smith
//! form pipelines on small inputs.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::PeriodicGraph;
use crate::laurent::{ExponentVector, LaurentPoly};
use crate::linalg;

pub const TREE_MAX_VERTICES: usize = 12;
pub const TREE_MAX_EDGES: usize = 20;
pub const CRSF_MAX_EDGE_ORBITS: usize = 10;

/// `|sum over spanning trees of the product of edge weights|`, by
/// deletion and contraction. Zero for a disconnected graph.
pub fn spanning_tree_sum(g: &PeriodicGraph) -> Result<BigInt> {
    if !g.is_finite() {
        return Err(Error::InvalidArgument(
            "spanning trees need a finite graph".into(),
        ));
    }
    let n = g.vertex_orbits();
    if n > TREE_MAX_VERTICES {
        return Err(Error::SizeLimit {
            what: "spanning-tree enumeration vertices",
            size: n as u128,
            limit: TREE_MAX_VERTICES as u128,
        });
    }
    if g.edges().len() > TREE_MAX_EDGES {
        return Err(Error::SizeLimit {
            what: "spanning-tree enumeration edges",
            size: g.edges().len() as u128,
            limit: TREE_MAX_EDGES as u128,
        });
    }
    let edges: Vec<(usize, usize, i64)> = g
        .edges()
        .iter()
        .map(|e| (e.tail, e.head, e.weight))
        .collect();
    Ok(tree_sum(n, edges).abs())
}

fn connected(n: usize, edges: &[(usize, usize, i64)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut parts = n;
    for &(u, v, _) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            parts -= 1;
        }
    }
    parts == 1
}

fn tree_sum(n: usize, mut edges: Vec<(usize, usize, i64)>) -> BigInt {
    edges.retain(|&(u, v, _)| u != v);
    if n == 1 {
        return BigInt::one();
    }
    if !connected(n, &edges) {
        return BigInt::zero();
    }
    let (u, v, w) = edges.pop().unwrap();
    let deleted = tree_sum(n, edges.clone());
    // contract v into u, then move the last vertex into v's slot
    let last = n - 1;
    let relabel = |x: usize| {
        let x = if x == v { u } else { x };
        if x == last {
            v
        } else {
            x
        }
    };
    let contracted: Vec<_> = edges
        .into_iter()
        .map(|(a, b, c)| (relabel(a), relabel(b), c))
        .collect();
    deleted + BigInt::from(w) * tree_sum(n - 1, contracted)
}

/// A cycle-rooted spanning forest of the quotient graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crsf {
    /// Indices into the graph's edge orbits.
    pub edges: Vec<usize>,
    /// Net shift around the cycle of each component.
    pub monodromies: Vec<ExponentVector>,
}

impl Crsf {
    /// `prod c_e * prod (2 - x^w - x^-w)`.
    pub fn weight(&self, g: &PeriodicGraph) -> LaurentPoly {
        let d = g.dim();
        let c: BigInt = self
            .edges
            .iter()
            .map(|&k| BigInt::from(g.edges()[k].weight))
            .product();
        let mut out = LaurentPoly::constant(d, c);
        for w in &self.monodromies {
            let factor = LaurentPoly::from_terms(
                d,
                [
                    (ExponentVector::zero(d), BigInt::from(2)),
                    (w.clone(), BigInt::from(-1)),
                    (w.neg(), BigInt::from(-1)),
                ],
            )
            .expect("well-formed terms");
            out = &out * &factor;
        }
        out
    }
}

/// All CRSFs of the quotient graph: edge-orbit subsets of size `n` in which
/// every component has as many edges as vertices.
pub fn enumerate_crsfs(g: &PeriodicGraph) -> Result<Vec<Crsf>> {
    let m = g.edges().len();
    if m > CRSF_MAX_EDGE_ORBITS {
        return Err(Error::SizeLimit {
            what: "CRSF enumeration edge orbits",
            size: m as u128,
            limit: CRSF_MAX_EDGE_ORBITS as u128,
        });
    }
    let n = g.vertex_orbits();
    let mut out = Vec::new();
    if n > m {
        return Ok(out);
    }
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|k| mask >> k & 1 == 1).collect();
        if let Some(monodromies) = unicyclic_monodromies(g, &chosen) {
            out.push(Crsf {
                edges: chosen,
                monodromies,
            });
        }
    }
    Ok(out)
}

/// Cycle shift of each component if every component of the chosen edges is
/// unicyclic and spans its vertices.
fn unicyclic_monodromies(g: &PeriodicGraph, chosen: &[usize]) -> Option<Vec<ExponentVector>> {
    let n = g.vertex_orbits();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &k in chosen {
        let e = &g.edges()[k];
        adj[e.tail].push(k);
        if e.head != e.tail {
            adj[e.head].push(k);
        }
    }
    let mut potential: Vec<Option<ExponentVector>> = vec![None; n];
    let mut used = vec![false; g.edges().len()];
    let mut out = Vec::new();
    for root in 0..n {
        if potential[root].is_some() {
            continue;
        }
        potential[root] = Some(ExponentVector::zero(g.dim()));
        let mut stack = vec![root];
        let (mut verts, mut edges) = (0usize, Vec::new());
        while let Some(v) = stack.pop() {
            verts += 1;
            for &k in &adj[v] {
                if used[k] {
                    continue;
                }
                used[k] = true;
                edges.push(k);
                let e = &g.edges()[k];
                let (other, step) = if e.tail == v {
                    (e.head, e.shift.clone())
                } else {
                    (e.tail, e.shift.neg())
                };
                let here = potential[v].clone().unwrap();
                match &potential[other] {
                    None => {
                        potential[other] = Some(here.add(&step));
                        stack.push(other);
                    }
                    Some(there) => out.push(here.add(&step).sub(there)),
                }
            }
        }
        if edges.len() != verts {
            return None;
        }
    }
    Some(out)
}

/// `sum over CRSFs of prod c_e * prod (2 - w - w^-1)`; agrees with the
/// Laplacian polynomial up to sign.
pub fn crsf_polynomial(g: &PeriodicGraph) -> Result<LaurentPoly> {
    let mut total = LaurentPoly::zero(g.dim());
    for f in enumerate_crsfs(g)? {
        total = &total + &f.weight(g);
    }
    Ok(total)
}

/// Outcome of [`oracle_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub crsf: LaurentPoly,
    pub determinant: LaurentPoly,
    pub crsf_agrees: bool,
    /// `(tree sum, principal minor)` per component of the quotient graph
    /// with shifts forgotten.
    pub tree_counts: Vec<(BigInt, BigInt)>,
    pub trees_agree: bool,
}

impl OracleReport {
    pub fn all_agree(&self) -> bool {
        self.crsf_agrees && self.trees_agree
    }
}

/// Runs both enumerations against the determinant pipeline. The tree check
/// uses the finite graph obtained by forgetting shifts.
pub fn oracle_check(g: &PeriodicGraph) -> Result<OracleReport> {
    let crsf = crsf_polynomial(g)?;
    let determinant = g.laplacian_polynomial()?;
    let crsf_agrees = crsf == determinant || crsf == -&determinant;
    let flat_edges: Vec<(usize, usize, i64)> = g
        .edges()
        .iter()
        .map(|e| (e.tail, e.head, e.weight))
        .collect();
    let flat = PeriodicGraph::finite(g.vertex_orbits(), &flat_edges)?;
    let lap = flat.integer_laplacian();
    let mut tree_counts = Vec::new();
    for comp in flat.component_orbits().vertex_sets {
        let sub = flat.subgraph(&comp)?;
        let rest = &comp[1..];
        let minor = linalg::bareiss_determinant(&lap.select(rest, rest))?.abs();
        tree_counts.push((spanning_tree_sum(&sub)?, minor));
    }
    let trees_agree = tree_counts.iter().all(|(a, b)| a == b);
    Ok(OracleReport {
        crsf,
        determinant,
        crsf_agrees,
        tree_counts,
        trees_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeOrbit;
    use crate::quotient::{quotient_graph, LatticeSpec};

    #[test]
    fn tree_sums() {
        let k3 = PeriodicGraph::finite(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert_eq!(spanning_tree_sum(&k3).unwrap(), BigInt::from(3));
        let signed = PeriodicGraph::finite(3, &[(0, 1, 1), (1, 2, 1), (0, 2, -1)]).unwrap();
        assert_eq!(spanning_tree_sum(&signed).unwrap(), BigInt::from(1));
        let torus =
            quotient_graph(&PeriodicGraph::grid(2), &LatticeSpec::scaled(2, 2).unwrap()).unwrap();
        assert_eq!(spanning_tree_sum(&torus.graph).unwrap(), BigInt::from(32));
        let k4 = PeriodicGraph::finite(
            4,
            &[
                (0, 1, 1),
                (0, 2, 1),
                (0, 3, 1),
                (1, 2, 1),
                (1, 3, 1),
                (2, 3, 1),
            ],
        )
        .unwrap();
        assert_eq!(spanning_tree_sum(&k4).unwrap(), BigInt::from(16));
        let split = PeriodicGraph::finite(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert!(spanning_tree_sum(&split).unwrap().is_zero());
    }

    #[test]
    fn tree_sum_limits() {
        let path: Vec<_> = (0..12).map(|i| (i, i + 1, 1)).collect();
        let g = PeriodicGraph::finite(13, &path).unwrap();
        assert!(matches!(
            spanning_tree_sum(&g),
            Err(Error::SizeLimit { .. })
        ));
        assert!(spanning_tree_sum(&PeriodicGraph::grid(1)).is_err());
    }

    #[test]
    fn crsf_examples() {
        let g1 = PeriodicGraph::grid(1);
        assert_eq!(
            crsf_polynomial(&g1).unwrap(),
            "2 - x - x^-1".parse().unwrap()
        );
        let k2 = PeriodicGraph::new(
            1,
            2,
            vec![
                EdgeOrbit::new(0, 1, vec![0], 1),
                EdgeOrbit::new(0, 1, vec![0], 1),
            ],
        )
        .unwrap();
        assert!(crsf_polynomial(&k2).unwrap().is_zero());
        assert!(k2.laplacian_polynomial().unwrap().is_zero());
        let g2 = PeriodicGraph::grid(2);
        let report = oracle_check(&g2).unwrap();
        assert!(report.all_agree());
        assert_eq!(enumerate_crsfs(&g2).unwrap().len(), 2);
    }

    #[test]
    fn crsf_matches_torsion_nine_graph() {
        let g = PeriodicGraph::new(
            1,
            4,
            vec![
                EdgeOrbit::new(0, 1, vec![0], -1),
                EdgeOrbit::new(0, 1, vec![-1], 1),
                EdgeOrbit::new(0, 2, vec![0], -1),
                EdgeOrbit::new(0, 3, vec![-1], 1),
                EdgeOrbit::new(1, 2, vec![0], -1),
                EdgeOrbit::new(1, 3, vec![0], 1),
            ],
        )
        .unwrap();
        let r = oracle_check(&g).unwrap();
        assert!(r.crsf_agrees, "{} vs {}", r.crsf, r.determinant);
        assert!(r.trees_agree);
    }

    #[test]
    fn crsf_limit() {
        let edges = (0..11).map(|s| EdgeOrbit::winding(s + 1, 1)).collect();
        let g = PeriodicGraph::new(1, 1, edges).unwrap();
        assert!(matches!(crsf_polynomial(&g), Err(Error::SizeLimit { .. })));
    }
}
