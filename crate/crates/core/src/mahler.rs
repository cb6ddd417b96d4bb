//! Mahler measures: Jensen's formula on numerically isolated roots for one
//! variable, midpoint quadrature over the torus for several.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laurent::{big_to_f64, ln_big, ExponentVector, LaurentPoly};
use crate::quotient::GrowthSeries;

/// Grid size used when no size is requested.
pub const DEFAULT_GRID: usize = 512;
/// Largest number of torus sample points a quadrature will evaluate.
pub const MAX_GRID_POINTS: u128 = 1 << 26;
/// Root-modulus tolerance used by [`is_measure_one`].
pub const MEASURE_ONE_TOLERANCE: f64 = 1e-8;
/// Samples with `|f| < DROP_THRESHOLD * ||f||_1` are discarded.
pub const DROP_THRESHOLD: f64 = 1e-14;

const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MahlerMethod {
    JensenRoots,
    TorusQuadrature,
    GrowthSeries,
}

impl MahlerMethod {
    pub fn name(self) -> &'static str {
        match self {
            MahlerMethod::JensenRoots => "jensen-roots",
            MahlerMethod::TorusQuadrature => "torus-quadrature",
            MahlerMethod::GrowthSeries => "growth-series",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostics {
    /// Distinct roots with multiplicity. Roots of `x ± 1` factors and of
    /// linear factors are exact.
    Roots(Vec<(Complex64, usize)>),
    Grid {
        grid_size: usize,
        coarse_grid_size: usize,
        samples: u128,
        dropped: u128,
    },
    Growth {
        entries: usize,
        last_index: u64,
    },
    /// Constant polynomial, no numerics involved.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MahlerResult {
    pub log_value: f64,
    pub value: f64,
    pub method: MahlerMethod,
    pub error_estimate: f64,
    pub diagnostics: Diagnostics,
}

impl MahlerResult {
    fn new(
        log_value: f64,
        method: MahlerMethod,
        error_estimate: f64,
        diagnostics: Diagnostics,
    ) -> Self {
        MahlerResult {
            log_value,
            value: log_value.exp(),
            method,
            error_estimate,
            diagnostics,
        }
    }

    fn constant(f: &LaurentPoly, method: MahlerMethod) -> Self {
        Self::new(ln_big(&f.constant_term()), method, 0.0, Diagnostics::Exact)
    }
}

fn is_constant(f: &LaurentPoly) -> bool {
    f.num_terms() == 1 && f.terms().next().unwrap().0.is_zero()
}

/// `2d - sum_i (x_i + x_i^-1)`.
pub fn grid_graph_polynomial(d: usize) -> LaurentPoly {
    let mut terms = vec![(ExponentVector::zero(d), BigInt::from(2 * d))];
    for i in 0..d {
        let e = ExponentVector::unit(d, i);
        terms.push((e.neg(), BigInt::from(-1)));
        terms.push((e, BigInt::from(-1)));
    }
    LaurentPoly::from_terms(d, terms).expect("well-formed terms")
}

/// Jensen if `f` has at most one variable, quadrature on [`DEFAULT_GRID`]
/// otherwise.
pub fn mahler_measure(f: &LaurentPoly) -> Result<MahlerResult> {
    if f.dim() <= 1 {
        mahler_jensen(f)
    } else {
        mahler_quadrature(f, DEFAULT_GRID)
    }
}

/// Dense coefficients (constant first) with a multiplicity.
type Factor = (Vec<BigInt>, usize);

/// Squarefree decomposition of `x^-lo * f`: the leading coefficient and the
/// factors `(g_i, i)` with `g_i` primitive and squarefree.
fn univariate_parts(f: &LaurentPoly) -> Result<(BigInt, Vec<Factor>)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (_, dense) = match f.dim() {
        0 => (0, vec![f.constant_term()]),
        1 => f.to_dense_univariate().expect("nonzero univariate"),
        d => {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: d,
            })
        }
    };
    let lead = dense.last().unwrap().clone();
    Ok((lead, zpoly::squarefree(&dense)))
}

/// Logarithmic Mahler measure of a one-variable Laurent polynomial by
/// Jensen's formula.
pub fn mahler_jensen(f: &LaurentPoly) -> Result<MahlerResult> {
    let (lead, parts) = univariate_parts(f)?;
    let mut log_value = ln_big(&lead);
    let mut error = 0.0;
    let mut roots = Vec::new();
    for (g, mult) in &parts {
        for r in isolate_roots(g) {
            let m = r.z.norm();
            log_value += *mult as f64 * m.ln().max(0.0);
            // log+ is 1-Lipschitz in |z| and flat below 1
            if m + r.radius > 1.0 {
                error += *mult as f64 * r.radius / (m - r.radius).max(1.0);
            }
            roots.push((r.z, *mult));
        }
    }
    Ok(MahlerResult::new(
        log_value,
        MahlerMethod::JensenRoots,
        error,
        if roots.is_empty() && f.num_terms() == 1 {
            Diagnostics::Exact
        } else {
            Diagnostics::Roots(roots)
        },
    ))
}

/// Kronecker's criterion: `M(f) = 1` iff `f` is a unit times a product of
/// cyclotomic polynomials, checked through the leading and trailing
/// coefficients and the root moduli.
pub fn is_measure_one(f: &LaurentPoly) -> Result<bool> {
    is_measure_one_with(f, MEASURE_ONE_TOLERANCE)
}

pub fn is_measure_one_with(f: &LaurentPoly, tolerance: f64) -> Result<bool> {
    let (lead, parts) = univariate_parts(f)?;
    let trail = f.trailing_term().unwrap().1;
    if !lead.abs().is_one() || !trail.abs().is_one() {
        return Ok(false);
    }
    Ok(parts.iter().all(|(g, _)| {
        isolate_roots(g)
            .iter()
            .all(|r| r.z.norm() <= 1.0 + tolerance)
    }))
}

struct IsolatedRoot {
    z: Complex64,
    /// A disk of this radius around `z` contains a root.
    radius: f64,
}

/// Roots of a primitive squarefree integer polynomial (ascending
/// coefficients). Factors `x - 1`, `x + 1` and linear polynomials are solved
/// exactly; the rest goes to Aberth iteration.
fn isolate_roots(g: &[BigInt]) -> Vec<IsolatedRoot> {
    let mut g = g.to_vec();
    let mut out = Vec::new();
    for unit in [1i64, -1] {
        let lin = vec![BigInt::from(-unit), BigInt::one()];
        if let Some(q) = zpoly::div_exact(&g, &lin) {
            g = q;
            out.push(IsolatedRoot {
                z: Complex64::new(unit as f64, 0.0),
                radius: 0.0,
            });
        }
    }
    match g.len() {
        0 | 1 => {}
        2 => {
            let z = -big_to_f64(&g[0]) / big_to_f64(&g[1]);
            out.push(IsolatedRoot {
                z: Complex64::new(z, 0.0),
                radius: z.abs() * f64::EPSILON,
            });
        }
        _ => {
            let c: Vec<f64> = g.iter().map(big_to_f64).collect();
            out.extend(aberth(&c));
        }
    }
    out
}

/// `(p(z), p'(z), sum |c_i| |z|^i)` by Horner's rule.
fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let zn = z.norm();
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        mag = mag * zn + a.abs();
    }
    (p, dp, mag)
}

fn aberth(c: &[f64]) -> Vec<IsolatedRoot> {
    let n = c.len() - 1;
    let lead = c[n].abs();
    // geometric mean of root moduli as starting radius
    let rho = (c[0].abs() / lead)
        .powf(1.0 / n as f64)
        .max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = false;
        for i in 0..n {
            let (p, dp, _) = horner(c, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if w.is_finite() {
                z[i] -= w;
                if w.norm() > 4.0 * f64::EPSILON * z[i].norm() {
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    z.into_iter()
        .map(|mut zi| {
            for _ in 0..3 {
                let (p, dp, _) = horner(c, zi);
                let next = zi - p / dp;
                if !next.is_finite() || horner(c, next).0.norm() >= p.norm() {
                    break;
                }
                zi = next;
            }
            let (p, dp, mag) = horner(c, zi);
            let slack = 2.0 * n as f64 * f64::EPSILON * mag;
            IsolatedRoot {
                z: zi,
                radius: n as f64 * (p.norm() + slack) / dp.norm(),
            }
        })
        .collect()
}

/// Deterministic pairwise summation.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

struct GridAverage {
    mean: f64,
    samples: u128,
    dropped: u128,
}

fn grid_average(f: &LaurentPoly, n: usize) -> GridAverage {
    let d = f.dim();
    let two_n = 2 * n as i64;
    let roots: Vec<Complex64> = (0..two_n)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let terms: Vec<(Vec<i64>, f64)> = f
        .terms()
        .map(|(e, c)| (e.components().to_vec(), big_to_f64(c)))
        .collect();
    let floor = DROP_THRESHOLD * f.l1_norm();
    let total = n.pow(d as u32);
    let eval = |idx: usize| -> Option<f64> {
        // point k has angles (k_i + 1/2)/N, so x_i^e = w^{e (2 k_i + 1)} with w = e^{pi i / N}
        let mut ks = [0i64; 8];
        let mut rest = idx;
        for slot in ks.iter_mut().take(d).rev() {
            *slot = 2 * (rest % n) as i64 + 1;
            rest /= n;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &terms {
            let phase: i64 = e.iter().zip(&ks).map(|(a, b)| a * b).sum();
            acc += roots[phase.rem_euclid(two_n) as usize] * c;
        }
        let m = acc.norm();
        (m >= floor).then(|| m.ln())
    };
    let chunks: Vec<(f64, usize)> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ci| {
            let vals: Vec<f64> = (ci * CHUNK..((ci + 1) * CHUNK).min(total))
                .filter_map(eval)
                .collect();
            (pairwise_sum(&vals), vals.len())
        })
        .collect();
    let kept: usize = chunks.iter().map(|c| c.1).sum();
    let sums: Vec<f64> = chunks.iter().map(|c| c.0).collect();
    GridAverage {
        mean: if kept == 0 {
            f64::NEG_INFINITY
        } else {
            pairwise_sum(&sums) / kept as f64
        },
        samples: total as u128,
        dropped: (total - kept) as u128,
    }
}

/// Mean of `log |f|` over the half-shifted `N^d` grid on the torus. The
/// error estimate is the difference from the same rule on the `N/2` grid.
pub fn mahler_quadrature(f: &LaurentPoly, grid_size: usize) -> Result<MahlerResult> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if is_constant(f) {
        return Ok(MahlerResult::constant(f, MahlerMethod::TorusQuadrature));
    }
    let d = f.dim();
    if d > 8 {
        return Err(Error::SizeLimit {
            what: "quadrature dimension",
            size: d as u128,
            limit: 8,
        });
    }
    if grid_size < 2 {
        return Err(Error::InvalidArgument(
            "grid size must be at least 2".into(),
        ));
    }
    let points = (grid_size as u128)
        .checked_pow(d as u32)
        .unwrap_or(u128::MAX);
    if points > MAX_GRID_POINTS {
        return Err(Error::SizeLimit {
            what: "quadrature sample points",
            size: points,
            limit: MAX_GRID_POINTS,
        });
    }
    let fine = grid_average(f, grid_size);
    let coarse = grid_average(f, grid_size / 2);
    Ok(MahlerResult::new(
        fine.mean,
        MahlerMethod::TorusQuadrature,
        (fine.mean - coarse.mean).abs(),
        Diagnostics::Grid {
            grid_size,
            coarse_grid_size: grid_size / 2,
            samples: fine.samples,
            dropped: fine.dropped,
        },
    ))
}

/// Reads `log M` off a growth series: the last normalized rate, with the
/// change from the previous entry as error estimate.
pub fn mahler_from_growth(series: &GrowthSeries) -> Result<MahlerResult> {
    let last = series
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty growth series".into()))?;
    let error = match series.entries.len() {
        0 | 1 => f64::INFINITY,
        n => (last.normalized_rate - series.entries[n - 2].normalized_rate).abs(),
    };
    Ok(MahlerResult::new(
        last.normalized_rate,
        MahlerMethod::GrowthSeries,
        error,
        Diagnostics::Growth {
            entries: series.entries.len(),
            last_index: last.index,
        },
    ))
}

/// Dense integer polynomials, lowest degree first, no trailing zeros.
pub(crate) mod zpoly {
    use super::*;

    fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn derivative(p: &[BigInt]) -> Vec<BigInt> {
        trim(
            p.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn content(p: &[BigInt]) -> BigInt {
        p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(p: &[BigInt]) -> Vec<BigInt> {
        let mut c = content(p);
        if c.is_zero() {
            return Vec::new();
        }
        if p.last().unwrap().is_negative() {
            c = -c;
        }
        p.iter().map(|x| x / &c).collect()
    }

    /// Pseudo-remainder of `a` by `b`.
    fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut r = a.to_vec();
        let lb = b.last().unwrap();
        let db = b.len() - 1;
        while r.len() > db {
            let lr = r.last().unwrap().clone();
            let shift = r.len() - 1 - db;
            for x in r.iter_mut() {
                *x *= lb;
            }
            for (i, c) in b.iter().enumerate() {
                r[i + shift] -= &lr * c;
            }
            r = trim(r);
        }
        r
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let (mut a, mut b) = (primitive(a), primitive(b));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive(&prem(&a, &b));
            a = b;
            b = r;
        }
        a
    }

    /// `a / b` if the division is exact over `Z`.
    pub fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
        if a.len() < b.len() {
            return a.is_empty().then(Vec::new);
        }
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lb = b.last().unwrap();
        let mut q = vec![BigInt::zero(); a.len() - db];
        for k in (0..q.len()).rev() {
            let (qc, rem) = r[k + db].div_rem(lb);
            if !rem.is_zero() {
                return None;
            }
            for (i, c) in b.iter().enumerate() {
                r[i + k] -= &qc * c;
            }
            q[k] = qc;
        }
        r.iter().all(|c| c.is_zero()).then_some(q)
    }

    /// Yun's algorithm on the primitive part: factors `(g_i, i)` with
    /// `prim(p) = prod g_i^i` up to sign, each `g_i` primitive, squarefree and
    /// nonconstant.
    pub fn squarefree(p: &[BigInt]) -> Vec<(Vec<BigInt>, usize)> {
        let f = primitive(p);
        if f.len() <= 1 {
            return Vec::new();
        }
        let df = derivative(&f);
        let a0 = gcd(&f, &df);
        let mut b = div_exact(&f, &a0).expect("gcd divides");
        let c = div_exact(&df, &a0).expect("gcd divides derivative");
        let mut d = sub(&c, &derivative(&b));
        let mut out = Vec::new();
        let mut i = 1;
        // quotients by primitive divisors stay integral (Gauss's lemma)
        while b.len() > 1 {
            let a = gcd(&b, &d);
            if a.len() > 1 {
                out.push((a.clone(), i));
            }
            let nb = div_exact(&b, &a).expect("gcd divides");
            let nc = div_exact(&d, &a).expect("gcd divides");
            d = sub(&nc, &derivative(&nb));
            b = nb;
            i += 1;
        }
        out
    }

    fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = a.len().max(b.len());
        let z = BigInt::zero();
        trim(
            (0..n)
                .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    #[cfg(test)]
    pub fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
}
