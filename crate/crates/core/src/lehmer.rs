//! Palindromic polynomials as Laplacian polynomials of single-orbit
//! 1-periodic graphs, the Lehmer growth experiment, and an exhaustive search
//! for small Mahler measures.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeOrbit, PeriodicGraph};
use crate::laurent::{ExponentVector, LaurentPoly};
use crate::mahler::{self, MahlerResult};
use crate::quotient::{growth_series_over, GrowthSeries, LatticeSpec};

/// Largest number of edge multisets [`search_small_measure`] will visit.
pub const SEARCH_LIMIT: u128 = 2_000_000;

/// `sum w * (2 - x^s - x^-s)` over `(s, w)` with `s` strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WindingDecomposition {
    pub terms: Vec<(i64, i64)>,
}

impl WindingDecomposition {
    pub fn expand(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(1);
        for &(s, w) in &self.terms {
            out = &out + &winding_term(s, w);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `w * (2 - x^s - x^-s)`.
fn winding_term(s: i64, w: i64) -> LaurentPoly {
    let mut p = LaurentPoly::constant(1, 2 * w);
    p.add_term(ExponentVector::new(vec![s]), BigInt::from(-w));
    p.add_term(ExponentVector::new(vec![-s]), BigInt::from(-w));
    p
}

fn require_univariate(p: &LaurentPoly) -> Result<LaurentPoly> {
    match p.dim() {
        0 => Ok(LaurentPoly::constant(1, p.constant_term())),
        1 => Ok(p.clone()),
        d => Err(Error::DimensionMismatch {
            expected: 1,
            found: d,
        }),
    }
}

/// Writes a palindromic `p` with `p(1) = 0` as `sum w (2 - x^s - x^-s)`:
/// each coefficient `a_s` with `s >= 1` contributes `(s, -a_s)`.
pub fn palindrome_decompose(p: &LaurentPoly) -> Result<WindingDecomposition> {
    let p = require_univariate(p)?;
    if !p.is_palindromic() {
        return Err(Error::InvalidArgument(format!("{p} is not palindromic")));
    }
    if !p.eval_ones().is_zero() {
        return Err(Error::InvalidArgument(format!(
            "{p} does not vanish at x = 1"
        )));
    }
    let mut terms = Vec::new();
    for (e, c) in p.terms() {
        let s = e.components()[0];
        if s >= 1 {
            let w = c
                .to_i64()
                .and_then(i64::checked_neg)
                .ok_or_else(|| Error::InvalidArgument(format!("coefficient {c} too large")))?;
            terms.push((s, w));
        }
    }
    let dec = WindingDecomposition { terms };
    if dec.expand() != p {
        return Err(Error::Internal(format!(
            "decomposition does not reproduce {p}"
        )));
    }
    Ok(dec)
}

/// Single vertex orbit with one edge orbit `(s, w)` per term.
pub fn realize_periodic_graph(dec: &WindingDecomposition) -> Result<PeriodicGraph> {
    if dec.is_empty() {
        return Err(Error::InvalidArgument("empty winding decomposition".into()));
    }
    let edges = dec
        .terms
        .iter()
        .map(|&(s, w)| EdgeOrbit::winding(s, w))
        .collect();
    PeriodicGraph::new(1, 1, edges)
}

/// Shifts a one-variable polynomial so that its exponents are symmetric
/// about zero and checks that the result is palindromic.
pub fn center_palindrome(f: &LaurentPoly) -> Result<LaurentPoly> {
    let f = require_univariate(f)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let lo = f.trailing_term().unwrap().0.components()[0];
    let hi = f.leading_term().unwrap().0.components()[0];
    if (lo + hi) % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "{f} has odd span, not palindromic"
        )));
    }
    let centered = f.shift(&ExponentVector::new(vec![-(lo + hi) / 2]));
    if !centered.is_palindromic() {
        return Err(Error::InvalidArgument(format!("{f} is not palindromic")));
    }
    Ok(centered)
}

#[derive(Clone, Debug)]
pub struct LehmerReport {
    /// Input, centered.
    pub polynomial: LaurentPoly,
    pub decomposition: WindingDecomposition,
    pub graph: PeriodicGraph,
    /// `(2 - x - x^-1) * f`, the Laplacian polynomial of `graph`.
    pub laplacian_polynomial: LaurentPoly,
    /// `M(f)`, equal to `M(D_G)`.
    pub mahler: MahlerResult,
    pub series: GrowthSeries,
    /// Indices `r` at which `κ = τ`.
    pub kappa_equals_tau: Vec<u64>,
    pub warnings: Vec<String>,
}

/// Realizes `(2 - x - x^-1) f` and computes the growth series of its cyclic
/// quotients for `r = 1..=r_max`.
pub fn lehmer_experiment(f: &LaurentPoly, r_max: u64) -> Result<LehmerReport> {
    if r_max == 0 {
        return Err(Error::InvalidArgument("r_max must be positive".into()));
    }
    lehmer_experiment_over(f, &(1..=r_max).collect::<Vec<_>>())
}

/// As [`lehmer_experiment`] over an explicit increasing list of `r`.
pub fn lehmer_experiment_over(f: &LaurentPoly, r_values: &[u64]) -> Result<LehmerReport> {
    let polynomial = center_palindrome(f)?;
    let mut warnings = Vec::new();
    if mahler::is_measure_one(&polynomial)? {
        warnings.push(format!(
            "{polynomial} has Mahler measure one; torsion and tree complexity may diverge"
        ));
    }
    let base = mahler::grid_graph_polynomial(1);
    let laplacian_polynomial = &base * &polynomial;
    let decomposition = palindrome_decompose(&laplacian_polynomial)?;
    let graph = realize_periodic_graph(&decomposition)?;
    if graph.laplacian_polynomial()? != laplacian_polynomial {
        return Err(Error::Internal(
            "realized graph has the wrong polynomial".into(),
        ));
    }
    let lattices = r_values
        .iter()
        .map(|&r| LatticeSpec::cyclic(r))
        .collect::<Result<Vec<_>>>()?;
    let series = growth_series_over(&graph, &lattices)?;
    let mut kappa_equals_tau = Vec::new();
    for e in &series.entries {
        if e.report.kappa == e.report.tau {
            kappa_equals_tau.push(e.index);
        } else if e.report.nullity == 1 {
            return Err(Error::Internal(format!(
                "nullity one at r = {} but κ = {} differs from τ = {}",
                e.index, e.report.kappa, e.report.tau
            )));
        }
    }
    Ok(LehmerReport {
        mahler: mahler::mahler_jensen(&polynomial)?,
        polynomial,
        decomposition,
        graph,
        laplacian_polynomial,
        series,
        kappa_equals_tau,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    /// Edge orbits as `(winding, weight)`, in enumeration order.
    pub windings: Vec<(i64, i64)>,
    pub graph: PeriodicGraph,
    /// Unit-normalized Laplacian polynomial.
    pub polynomial: LaurentPoly,
    pub mahler: MahlerResult,
}

/// Number of edge multisets of size `1..=max_edges` over `edge_types` types.
pub fn search_space_size(max_edges: usize, edge_types: usize) -> u128 {
    // C(t + k - 1, k) summed over k
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for k in 1..=max_edges as u128 {
        term = term.saturating_mul(edge_types as u128 + k - 1) / k;
        total = total.saturating_add(term);
    }
    total
}

fn multisets(types: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        start: usize,
        types: usize,
        max_len: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_len {
            return;
        }
        for t in start..types {
            cur.push(t);
            rec(t, types, max_len, cur, out);
            cur.pop();
        }
    }
    rec(0, types, max_len, &mut cur, &mut out);
    out
}

/// Exhaustive search over single-orbit 1-periodic graphs with at most
/// `max_edges` edge orbits, windings `1..=max_winding` and weights from
/// `weights`. Results with `D_G = 0` or `M(D_G) = 1` are dropped, duplicates
/// up to units are reported once, and the list is sorted by measure.
pub fn search_small_measure(
    max_edges: usize,
    max_winding: i64,
    weights: &[i64],
) -> Result<Vec<SearchHit>> {
    let mut ws: Vec<i64> = weights.to_vec();
    ws.sort_unstable();
    ws.dedup();
    if ws.is_empty() || ws.contains(&0) {
        return Err(Error::InvalidArgument(
            "weights must be nonempty and nonzero".into(),
        ));
    }
    if max_edges == 0 || max_winding < 1 {
        return Err(Error::InvalidArgument(
            "need max_edges >= 1 and max_winding >= 1".into(),
        ));
    }
    let types: Vec<(i64, i64)> = (1..=max_winding)
        .flat_map(|s| ws.iter().map(move |&w| (s, w)))
        .collect();
    let size = search_space_size(max_edges, types.len());
    if size > SEARCH_LIMIT {
        return Err(Error::SizeLimit {
            what: "search space (edge multisets)",
            size,
            limit: SEARCH_LIMIT,
        });
    }
    let candidates: Vec<Option<SearchHit>> = multisets(types.len(), max_edges)
        .into_par_iter()
        .map(|ms| -> Result<Option<SearchHit>> {
            let windings: Vec<(i64, i64)> = ms.iter().map(|&t| types[t]).collect();
            let mut d = LaurentPoly::zero(1);
            for &(s, w) in &windings {
                d = &d + &winding_term(s, w);
            }
            if d.is_zero() || mahler::is_measure_one(&d)? {
                return Ok(None);
            }
            let graph = PeriodicGraph::new(
                1,
                1,
                windings
                    .iter()
                    .map(|&(s, w)| EdgeOrbit::winding(s, w))
                    .collect(),
            )?;
            Ok(Some(SearchHit {
                windings,
                graph,
                mahler: mahler::mahler_jensen(&d)?,
                polynomial: d.unit_normalize(),
            }))
        })
        .collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut hits: Vec<SearchHit> = candidates
        .into_iter()
        .flatten()
        .filter(|h| seen.insert(h.polynomial.clone()))
        .collect();
    hits.sort_by(|a, b| a.mahler.log_value.total_cmp(&b.mahler.log_value));
    Ok(hits)
}
