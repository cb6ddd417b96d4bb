//! Finite quotients `G_Λ` of periodic graphs over finite-index sublattices,
//! their torsion and tree complexity, and growth series.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeOrbit, PeriodicGraph};
use crate::laurent::ln_big;
use crate::linalg::{self, IntegerMatrix};

/// Largest dimension accepted by [`LatticeSpec::min_vector_length`].
pub const MIN_VECTOR_MAX_DIM: usize = 4;

/// Largest vertex count of a quotient `G_Λ`. Complexity works on the dense
/// Laplacian, so this bounds memory as well as time.
pub const MAX_QUOTIENT_VERTICES: u128 = 4096;

/// Finite-index sublattice `Λ ⊂ Z^d`, generated by the columns of `basis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    basis: IntegerMatrix,
    index: u64,
}

impl LatticeSpec {
    pub fn new(basis: IntegerMatrix) -> Result<Self> {
        if !basis.is_square() || basis.rows() == 0 {
            return Err(Error::InvalidLattice(
                "basis must be a nonempty square matrix".into(),
            ));
        }
        let det = linalg::bareiss_determinant(&basis)?;
        if det.is_zero() {
            return Err(Error::InvalidLattice("singular basis matrix".into()));
        }
        let index = det
            .abs()
            .to_u64()
            .ok_or_else(|| Error::InvalidLattice(format!("index {det} too large")))?;
        Ok(LatticeSpec { basis, index })
    }

    /// Basis given as a list of column vectors.
    pub fn from_columns(columns: &[Vec<i64>]) -> Result<Self> {
        let d = columns.len();
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|i| {
                columns
                    .iter()
                    .map(|c| c.get(i).copied().unwrap_or(0))
                    .collect()
            })
            .collect();
        if columns.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidLattice(
                "basis columns must have length d".into(),
            ));
        }
        Self::new(IntegerMatrix::from_rows(&rows)?)
    }

    /// `N * Z^d`.
    pub fn scaled(dim: usize, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLattice("scale must be positive".into()));
        }
        Self::new(IntegerMatrix::diagonal(&vec![n; dim]))
    }

    /// `r * Z` in dimension one.
    pub fn cyclic(r: u64) -> Result<Self> {
        Self::scaled(1, r)
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    /// `|Z^d / Λ|`.
    pub fn index(&self) -> u64 {
        self.index
    }

    fn scale_factor(&self) -> Option<BigInt> {
        let d = self.dim();
        let n = self.basis.get(0, 0).clone();
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { &n } else { &BigInt::zero() };
                if self.basis.get(i, j) != want {
                    return None;
                }
            }
        }
        n.is_positive().then_some(n)
    }

    /// Short label: `6Z`, `4Z^2`, or the basis columns.
    pub fn descriptor(&self) -> String {
        match self.scale_factor() {
            Some(n) if self.dim() == 1 => format!("{n}Z"),
            Some(n) => format!("{n}Z^{}", self.dim()),
            None => {
                let cols: Vec<String> = (0..self.dim())
                    .map(|j| {
                        let c: Vec<String> = (0..self.dim())
                            .map(|i| self.basis.get(i, j).to_string())
                            .collect();
                        format!("({})", c.join(" "))
                    })
                    .collect();
                format!("span{}", cols.join(""))
            }
        }
    }

    /// Length of the shortest nonzero vector of Λ, by exhaustive search over
    /// coefficient vectors that can produce a vector no longer than the
    /// shortest basis column.
    pub fn min_vector_length(&self) -> Result<f64> {
        let d = self.dim();
        if d > MIN_VECTOR_MAX_DIM {
            return Err(Error::SizeLimit {
                what: "shortest-vector enumeration dimension",
                size: d as u128,
                limit: MIN_VECTOR_MAX_DIM as u128,
            });
        }
        let b: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.basis.get(i, j).to_f64().unwrap())
                    .collect()
            })
            .collect();
        let col_norm = |j: usize| (0..d).map(|i| b[i][j] * b[i][j]).sum::<f64>().sqrt();
        let radius = (0..d).map(col_norm).fold(f64::INFINITY, f64::min);
        // |c_i| = |(B^-1 v)_i| <= |row_i(B^-1)| * |v|
        let inv = invert(&b);
        let bounds: Vec<i64> = inv
            .iter()
            .map(|row| {
                let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                (n * radius + 1e-9).floor() as i64
            })
            .collect();
        let mut best2 = radius * radius;
        let mut c: Vec<i64> = bounds.iter().map(|&m| -m).collect();
        loop {
            if c.iter().any(|&x| x != 0) {
                let len2: f64 = (0..d)
                    .map(|i| {
                        let v: f64 = (0..d).map(|j| b[i][j] * c[j] as f64).sum();
                        v * v
                    })
                    .sum();
                if len2 < best2 {
                    best2 = len2;
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    return Ok(best2.sqrt());
                }
                if c[k] < bounds[k] {
                    c[k] += 1;
                    break;
                }
                c[k] = -bounds[k];
                k += 1;
            }
        }
    }
}

fn invert(b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = b.len();
    let mut a: Vec<Vec<f64>> = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for k in 0..d {
        let p = (k..d)
            .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
            .unwrap();
        a.swap(k, p);
        let piv = a[k][k];
        for x in a[k].iter_mut() {
            *x /= piv;
        }
        for i in 0..d {
            if i != k {
                let f = a[i][k];
                let pivot_row = a[k].clone();
                for (x, y) in a[i].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[d..].to_vec()).collect()
}

/// `Z^d / Λ` in cyclic coordinates: `v -> (U v) mod m_k` where `U Λ V` is
/// the Smith form of the basis.
#[derive(Clone, Debug)]
struct QuotientGroup {
    moduli: Vec<u64>,
    projection: Vec<Vec<i64>>,
}

impl QuotientGroup {
    fn new(lattice: &LatticeSpec) -> Self {
        let dec = linalg::smith_decomposition(lattice.basis());
        let d = lattice.dim();
        let mut moduli = Vec::new();
        let mut projection = Vec::new();
        for k in 0..d {
            let m = dec.diagonal.get(k, k).to_u64().expect("index fits in u64");
            if m == 1 {
                continue;
            }
            let mb = BigInt::from(m);
            let row = (0..d)
                .map(|j| {
                    let x = dec.left.get(k, j) % &mb;
                    let x = if x.is_negative() { x + &mb } else { x };
                    x.to_i64().unwrap()
                })
                .collect();
            moduli.push(m);
            projection.push(row);
        }
        QuotientGroup { moduli, projection }
    }

    fn coords(&self, v: &[i64]) -> Vec<u64> {
        self.projection
            .iter()
            .zip(&self.moduli)
            .map(|(row, &m)| {
                let s: i128 = row
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                s.rem_euclid(m as i128) as u64
            })
            .collect()
    }

    /// Mixed-radix index, first coordinate most significant.
    fn index_of(&self, c: &[u64]) -> usize {
        c.iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&x, &m)| acc * m as usize + x as usize)
    }

    fn element(&self, mut idx: usize) -> Vec<u64> {
        let mut c = vec![0; self.moduli.len()];
        for k in (0..self.moduli.len()).rev() {
            let m = self.moduli[k] as usize;
            c[k] = (idx % m) as u64;
            idx /= m;
        }
        c
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect()
    }
}

/// A finite cover `G_Λ` of the quotient graph.
#[derive(Clone, Debug)]
pub struct FiniteQuotientGraph {
    pub graph: PeriodicGraph,
    /// `(vertex orbit, group element)` for each vertex, in vertex order.
    pub labels: Vec<(usize, Vec<u64>)>,
    pub lattice: LatticeSpec,
}

/// Builds `G_Λ`. Vertices are ordered orbit-major, then by group element in
/// mixed-radix order; edges that wrap onto themselves are dropped.
pub fn quotient_graph(g: &PeriodicGraph, lattice: &LatticeSpec) -> Result<FiniteQuotientGraph> {
    if g.dim() == 0 {
        return Err(Error::InvalidArgument("quotient of a finite graph".into()));
    }
    if lattice.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: lattice.dim(),
        });
    }
    let vertices = g.vertex_orbits() as u128 * lattice.index() as u128;
    if vertices > MAX_QUOTIENT_VERTICES {
        return Err(Error::SizeLimit {
            what: "quotient vertex count",
            size: vertices,
            limit: MAX_QUOTIENT_VERTICES,
        });
    }
    let group = QuotientGroup::new(lattice);
    let index = lattice.index() as usize;
    let elements: Vec<Vec<u64>> = (0..index).map(|k| group.element(k)).collect();
    let mut edges = Vec::with_capacity(g.edges().len() * index);
    for e in g.edges() {
        let step = group.coords(e.shift.components());
        for (k, c) in elements.iter().enumerate() {
            let target = group.index_of(&group.add(c, &step));
            edges.push(EdgeOrbit::finite(
                e.tail * index + k,
                e.head * index + target,
                e.weight,
            ));
        }
    }
    let labels = (0..g.vertex_orbits())
        .flat_map(|i| elements.iter().map(move |c| (i, c.clone())))
        .collect();
    Ok(FiniteQuotientGraph {
        graph: PeriodicGraph::new(0, g.vertex_orbits() * index, edges)?,
        labels,
        lattice: lattice.clone(),
    })
}

/// Torsion complexity, tree complexity and Laplacian group data of a finite
/// graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityReport {
    pub kappa: BigInt,
    pub tau: BigInt,
    pub nullity: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl ComplexityReport {
    fn checked(self) -> Result<Self> {
        if !self.tau.is_zero() && self.tau != self.kappa {
            return Err(Error::Internal(format!(
                "tree complexity {} differs from torsion complexity {}",
                self.tau, self.kappa
            )));
        }
        Ok(self)
    }
}

/// `κ` from the Smith form of the integer Laplacian; `τ` as the product over
/// connected components of a principal minor of the component Laplacian.
pub fn complexity(g: &PeriodicGraph) -> Result<ComplexityReport> {
    if !g.is_finite() {
        return Err(Error::InvalidArgument(
            "complexity needs a finite graph; take a quotient first".into(),
        ));
    }
    let lap = g.integer_laplacian();
    let snf = linalg::smith_normal_form(&lap);
    let mut tau = BigInt::one();
    for comp in g.component_orbits().vertex_sets {
        if comp.len() < 2 {
            continue;
        }
        let rest = &comp[1..];
        let minor = linalg::bareiss_determinant(&lap.select(rest, rest))?;
        tau *= minor.abs();
        if tau.is_zero() {
            break;
        }
    }
    ComplexityReport {
        kappa: snf.torsion_order(),
        tau,
        nullity: snf.nullity,
        invariant_factors: snf.invariant_factors,
    }
    .checked()
}

/// Integer Laplacian of `G_r` for a 1-periodic graph: `x` in `L_G` is
/// replaced by the `r x r` cyclic permutation matrix.
pub fn companion_quotient_laplacian(g: &PeriodicGraph, r: u64) -> Result<IntegerMatrix> {
    if g.dim() != 1 {
        return Err(Error::InvalidArgument(
            "companion construction needs d = 1".into(),
        ));
    }
    if r == 0 {
        return Err(Error::InvalidLattice("r must be positive".into()));
    }
    let n = g.vertex_orbits();
    if n as u128 * r as u128 > MAX_QUOTIENT_VERTICES {
        return Err(Error::SizeLimit {
            what: "quotient vertex count",
            size: n as u128 * r as u128,
            limit: MAX_QUOTIENT_VERTICES,
        });
    }
    let r = r as usize;
    let lap = g.laplacian_matrix();
    let mut out = IntegerMatrix::zeros(n * r, n * r);
    for i in 0..n {
        for j in 0..n {
            for (e, c) in lap.get(i, j).terms() {
                let k = e.components()[0].rem_euclid(r as i64) as usize;
                for a in 0..r {
                    out.add_at(i * r + a, j * r + (a + k) % r, c);
                }
            }
        }
    }
    Ok(out)
}

/// One family of sublattices for a growth experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeFamily {
    /// `r Z` for `r` in `r_min..=r_max` (`d = 1`).
    Cyclic { r_min: u64, r_max: u64 },
    /// `N Z^d` for `N` in `n_min..=n_max`.
    Scaled { n_min: u64, n_max: u64 },
}

impl LatticeFamily {
    pub fn lattices(&self, dim: usize) -> Result<Vec<LatticeSpec>> {
        let (lo, hi) = match *self {
            LatticeFamily::Cyclic { r_min, r_max } => {
                if dim != 1 {
                    return Err(Error::InvalidArgument(
                        "cyclic lattice family needs d = 1".into(),
                    ));
                }
                (r_min, r_max)
            }
            LatticeFamily::Scaled { n_min, n_max } => (n_min, n_max),
        };
        if lo == 0 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "empty or invalid range {lo}..={hi}"
            )));
        }
        (lo..=hi).map(|n| LatticeSpec::scaled(dim, n)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GrowthEntry {
    pub lattice: String,
    pub index: u64,
    pub min_vector_length: f64,
    pub report: ComplexityReport,
    pub log_kappa: f64,
    /// `log κ / |Z^d / Λ|`.
    pub normalized_rate: f64,
}

#[derive(Clone, Debug)]
pub struct GrowthSeries {
    pub entries: Vec<GrowthEntry>,
    pub vertex_orbits: usize,
}

impl GrowthSeries {
    pub fn last(&self) -> Option<&GrowthEntry> {
        self.entries.last()
    }

    /// Last normalized rate divided by the number of vertex orbits.
    pub fn bulk_limit_estimate(&self) -> Option<f64> {
        self.last()
            .map(|e| e.normalized_rate / self.vertex_orbits as f64)
    }

    /// Change in normalized rate per unit index over the last two entries.
    pub fn tail_slope(&self) -> Option<f64> {
        let n = self.entries.len();
        if n < 2 {
            return None;
        }
        let (a, b) = (&self.entries[n - 2], &self.entries[n - 1]);
        Some((b.normalized_rate - a.normalized_rate) / (b.index as f64 - a.index as f64))
    }

    /// Whether the last entry is within `tolerance` of `target`.
    pub fn agrees_with(&self, target: f64, tolerance: f64) -> bool {
        self.last()
            .is_some_and(|e| (e.normalized_rate - target).abs() <= tolerance)
    }
}

fn growth_entry(g: &PeriodicGraph, lattice: &LatticeSpec) -> Result<GrowthEntry> {
    let q = quotient_graph(g, lattice)?;
    let report = complexity(&q.graph)?;
    let log_kappa = ln_big(&report.kappa);
    let index = lattice.index();
    Ok(GrowthEntry {
        lattice: lattice.descriptor(),
        index,
        min_vector_length: lattice.min_vector_length()?,
        log_kappa,
        normalized_rate: log_kappa / index as f64,
        report,
    })
}

/// Growth series over an explicit list of lattices with strictly increasing
/// index. Entries are computed in parallel and returned in input order.
pub fn growth_series_over(g: &PeriodicGraph, lattices: &[LatticeSpec]) -> Result<GrowthSeries> {
    if lattices.windows(2).any(|w| w[0].index() >= w[1].index()) {
        return Err(Error::InvalidArgument(
            "lattice indices must be strictly increasing".into(),
        ));
    }
    let entries = lattices
        .par_iter()
        .map(|l| growth_entry(g, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthSeries {
        entries,
        vertex_orbits: g.vertex_orbits(),
    })
}

pub fn growth_series(g: &PeriodicGraph, family: LatticeFamily) -> Result<GrowthSeries> {
    growth_series_over(g, &family.lattices(g.dim())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::smith_normal_form;

    fn torsion_nine_graph() -> PeriodicGraph {
        PeriodicGraph::new(
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
        .unwrap()
    }

    #[test]
    fn torus_quotient_of_grid() {
        let q =
            quotient_graph(&PeriodicGraph::grid(2), &LatticeSpec::scaled(2, 2).unwrap()).unwrap();
        assert_eq!(q.graph.vertex_orbits(), 4);
        assert_eq!(q.graph.edges().len(), 8);
        let rep = complexity(&q.graph).unwrap();
        assert_eq!(rep.tau, BigInt::from(32));
        assert_eq!(rep.kappa, BigInt::from(32));
    }

    #[test]
    fn cycle_from_grid_1() {
        let q = quotient_graph(&PeriodicGraph::grid(1), &LatticeSpec::cyclic(3).unwrap()).unwrap();
        let c3 = PeriodicGraph::finite(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert_eq!(q.graph.integer_laplacian(), c3.integer_laplacian());
        let rep = complexity(&q.graph).unwrap();
        assert_eq!((rep.kappa, rep.tau, rep.nullity), (3.into(), 3.into(), 1));
        assert_eq!(
            companion_quotient_laplacian(&PeriodicGraph::grid(1), 3).unwrap(),
            c3.integer_laplacian()
        );
    }

    #[test]
    fn double_cover_of_torsion_nine_graph() {
        let q = quotient_graph(&torsion_nine_graph(), &LatticeSpec::cyclic(2).unwrap()).unwrap();
        assert_eq!(q.graph.vertex_orbits(), 8);
        let rep = complexity(&q.graph).unwrap();
        assert_eq!(rep.kappa, BigInt::from(9));
        assert_eq!(rep.tau, BigInt::zero());
        assert_eq!(rep.nullity, 2);
        let comp = companion_quotient_laplacian(&torsion_nine_graph(), 2).unwrap();
        assert_eq!(comp, q.graph.integer_laplacian());
        assert_eq!(linalg::torsion_order(&comp), BigInt::from(9));
    }

    #[test]
    fn companion_at_r_one_forgets_shifts() {
        let g = torsion_nine_graph();
        assert_eq!(
            companion_quotient_laplacian(&g, 1).unwrap(),
            g.integer_laplacian()
        );
    }

    #[test]
    fn covering_labels() {
        let g = torsion_nine_graph();
        let q = quotient_graph(&g, &LatticeSpec::cyclic(5).unwrap()).unwrap();
        assert_eq!(q.labels.len(), 20);
        assert_eq!(q.labels[7], (1, vec![2]));
        // every edge orbit lifts to exactly `index` edges
        assert_eq!(q.graph.edges().len(), g.edges().len() * 5);
    }

    #[test]
    fn skew_lattice_quotient() {
        let l = LatticeSpec::from_columns(&[vec![2, 0], vec![1, 3]]).unwrap();
        assert_eq!(l.index(), 6);
        let q = quotient_graph(&PeriodicGraph::grid(2), &l).unwrap();
        assert_eq!(q.graph.vertex_orbits(), 6);
        // Lattice sum over characters: same SNF as any other index-6 presentation
        // of G_2 modulo this lattice; check the tree count against the Matrix-Tree minor.
        let rep = complexity(&q.graph).unwrap();
        assert_eq!(rep.kappa, rep.tau);
        assert_eq!(l.descriptor(), "span(2 0)(1 3)");
    }

    #[test]
    fn minimal_vectors() {
        assert_eq!(
            LatticeSpec::scaled(2, 5)
                .unwrap()
                .min_vector_length()
                .unwrap(),
            5.0
        );
        assert_eq!(
            LatticeSpec::cyclic(7).unwrap().min_vector_length().unwrap(),
            7.0
        );
        assert_eq!(
            LatticeSpec::scaled(3, 2)
                .unwrap()
                .min_vector_length()
                .unwrap(),
            2.0
        );
        let l = LatticeSpec::from_columns(&[vec![2, 0], vec![1, 3]]).unwrap();
        // brute force over a fixed coefficient window
        let mut best = f64::INFINITY;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                if (a, b) != (0, 0) {
                    let v = [(2 * a + b) as f64, (3 * b) as f64];
                    best = best.min((v[0] * v[0] + v[1] * v[1]).sqrt());
                }
            }
        }
        assert_eq!(best, 2.0);
        assert_eq!(l.min_vector_length().unwrap(), best);
        let big = LatticeSpec::scaled(5, 2).unwrap();
        assert!(matches!(
            big.min_vector_length(),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn singular_lattice_rejected() {
        assert!(LatticeSpec::from_columns(&[vec![1, 2], vec![2, 4]]).is_err());
        assert!(LatticeSpec::cyclic(0).is_err());
    }

    #[test]
    fn torsion_nine_growth() {
        let s = growth_series(
            &torsion_nine_graph(),
            LatticeFamily::Cyclic { r_min: 1, r_max: 6 },
        )
        .unwrap();
        for (k, e) in s.entries.iter().enumerate() {
            let r = k as u64 + 1;
            assert_eq!(e.report.kappa, BigInt::from(9).pow(r as u32 - 1));
            let expect = (r as f64 - 1.0) / r as f64 * 9f64.ln();
            assert!((e.normalized_rate - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_1_growth() {
        let s = growth_series(
            &PeriodicGraph::grid(1),
            LatticeFamily::Cyclic {
                r_min: 2,
                r_max: 10,
            },
        )
        .unwrap();
        for e in &s.entries {
            assert_eq!(e.report.kappa, BigInt::from(e.index));
            assert!((e.normalized_rate - (e.index as f64).ln() / e.index as f64).abs() < 1e-12);
        }
        assert!(s.tail_slope().unwrap() < 0.0);
    }

    #[test]
    fn doubled_grid_1_growth() {
        let g = PeriodicGraph::new(
            1,
            1,
            vec![EdgeOrbit::winding(1, 1), EdgeOrbit::winding(1, 1)],
        )
        .unwrap();
        let s = growth_series(
            &g,
            LatticeFamily::Cyclic {
                r_min: 2,
                r_max: 12,
            },
        )
        .unwrap();
        for e in &s.entries {
            let r = e.index;
            assert_eq!(
                e.report.kappa,
                BigInt::from(r) * BigInt::from(2).pow(r as u32 - 1)
            );
        }
        let last = s.last().unwrap().normalized_rate;
        let prev = s.entries[s.entries.len() - 2].normalized_rate;
        assert!((last - 2f64.ln()).abs() < (prev - 2f64.ln()).abs());
    }

    #[test]
    fn translate_components_keep_rate_zero() {
        // G_2 without vertical edges: copies of G_1 stacked along x2.
        let g = PeriodicGraph::new(2, 1, vec![EdgeOrbit::new(0, 0, vec![1, 0], 1)]).unwrap();
        assert_eq!(
            g.laplacian_polynomial().unwrap(),
            crate::LaurentPoly::parse_with_dim("2 - x1 - x1^-1", 2).unwrap()
        );
        let s = growth_series(&g, LatticeFamily::Scaled { n_min: 2, n_max: 6 }).unwrap();
        for e in &s.entries {
            // N copies of an N-cycle
            let n = (e.index as f64).sqrt().round() as u64;
            assert_eq!(e.report.kappa, BigInt::from(n).pow(n as u32));
            assert!((e.normalized_rate - (n as f64).ln() / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn union_multiplicativity() {
        let a = quotient_graph(&PeriodicGraph::grid(1), &LatticeSpec::cyclic(4).unwrap())
            .unwrap()
            .graph;
        let b = quotient_graph(&torsion_nine_graph(), &LatticeSpec::cyclic(3).unwrap())
            .unwrap()
            .graph;
        let ra = complexity(&a).unwrap();
        let rb = complexity(&b).unwrap();
        let ru = complexity(&a.disjoint_union(&b).unwrap()).unwrap();
        assert_eq!(ru.kappa, &ra.kappa * &rb.kappa);
        assert_eq!(ru.tau, &ra.tau * &rb.tau);
        assert_eq!(ru.nullity, ra.nullity + rb.nullity);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(complexity(&PeriodicGraph::grid(1)).is_err());
        assert!(
            quotient_graph(&PeriodicGraph::grid(1), &LatticeSpec::scaled(2, 2).unwrap()).is_err()
        );
        assert!(companion_quotient_laplacian(&PeriodicGraph::grid(2), 2).is_err());
        assert!(LatticeFamily::Cyclic { r_min: 0, r_max: 3 }
            .lattices(1)
            .is_err());
        assert!(LatticeFamily::Cyclic { r_min: 1, r_max: 3 }
            .lattices(2)
            .is_err());
        let l = [
            LatticeSpec::cyclic(3).unwrap(),
            LatticeSpec::cyclic(2).unwrap(),
        ];
        assert!(growth_series_over(&PeriodicGraph::grid(1), &l).is_err());
    }

    #[test]
    fn oversized_quotients_are_refused() {
        let big = LatticeSpec::scaled(2, 65).unwrap();
        let err = quotient_graph(&PeriodicGraph::grid(2), &big).unwrap_err();
        assert_eq!(err.kind(), crate::error::ErrorKind::SizeRefusal);
        assert!(quotient_graph(
            &PeriodicGraph::grid(2),
            &LatticeSpec::scaled(2, 64).unwrap()
        )
        .is_ok());
        assert!(companion_quotient_laplacian(&PeriodicGraph::grid(1), 5000).is_err());
    }

    #[test]
    fn companion_matches_cover_snf() {
        let g = torsion_nine_graph();
        for r in 1..=6 {
            let a = companion_quotient_laplacian(&g, r).unwrap();
            let q = quotient_graph(&g, &LatticeSpec::cyclic(r).unwrap()).unwrap();
            assert_eq!(
                smith_normal_form(&a),
                smith_normal_form(&q.graph.integer_laplacian())
            );
        }
    }
}
