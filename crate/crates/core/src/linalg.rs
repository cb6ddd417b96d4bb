//! Exact integer matrix algebra: Smith normal form, torsion orders,
//! fraction-free determinants and determinantal divisors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense rectangular matrix of arbitrary-precision integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone().into());
        }
        m
    }

    /// Builds from rows; all rows must have the same length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::InvalidArgument("ragged matrix rows".into()));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntegerMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &BigInt) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(i + self.rows, j + self.cols, other.get(i, j).clone());
            }
        }
        out
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Simultaneous row and column permutation: entry `(i, j)` of the result
    /// is entry `(perm[i], perm[j])` of `self`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert!(self.is_square() && perm.len() == self.rows);
        self.select(perm, perm)
    }

    fn to_nested(&self) -> Vec<Vec<BigInt>> {
        self.to_rows()
    }

    fn from_nested(rows: usize, cols: usize, v: Vec<Vec<BigInt>>) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: v.into_iter().flatten().collect(),
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Invariant factor decomposition of the abelian group presented by a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero invariant factors `d1 | d2 | ... | dr`, all positive.
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    /// `cols - rank`: the free rank of the presented group.
    pub nullity: usize,
}

impl SmithForm {
    /// Order of the torsion subgroup: product of the invariant factors.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Invariant factors greater than one.
    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

/// Smith form with unimodular `left`, `right` such that `left * M * right`
/// is the diagonal matrix `diagonal`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub form: SmithForm,
    pub left: IntegerMatrix,
    pub right: IntegerMatrix,
    pub diagonal: IntegerMatrix,
}

struct Reducer {
    a: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
    // Row operations are mirrored on `u`, column operations on `v`.
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

fn sub_scaled(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

fn rows_pair(m: &mut [Vec<BigInt>], dst: usize, src: usize) -> (&mut Vec<BigInt>, &Vec<BigInt>) {
    assert_ne!(dst, src);
    if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    }
}

/// Quotient rounded to nearest, so the remainder is at most half the divisor.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    let twice: BigInt = r.abs() << 1;
    if twice > b.abs() {
        if r.is_negative() == b.is_negative() {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

impl Reducer {
    fn new(m: &IntegerMatrix, transforms: bool) -> Self {
        let ident = |n: usize| IntegerMatrix::identity(n).to_nested();
        Reducer {
            a: m.to_nested(),
            rows: m.rows,
            cols: m.cols,
            u: transforms.then(|| ident(m.rows)),
            v: transforms.then(|| ident(m.cols)),
        }
    }

    /// row[dst] -= q * row[src], restricted to columns `from..`.
    fn row_op(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        let (d, s) = rows_pair(&mut self.a, dst, src);
        sub_scaled(&mut d[from..], &s[from..], q);
        if let Some(u) = self.u.as_mut() {
            let (d, s) = rows_pair(u, dst, src);
            sub_scaled(d, s, q);
        }
    }

    /// col[dst] -= q * col[src], restricted to rows `from..`.
    fn col_op(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        for row in &mut self.a[from..] {
            if !row[src].is_zero() {
                let t = q * &row[src];
                row[dst] -= t;
            }
        }
        if let Some(v) = self.v.as_mut() {
            for row in v.iter_mut() {
                if !row[src].is_zero() {
                    let t = q * &row[src];
                    row[dst] -= t;
                }
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(u) = self.u.as_mut() {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in &mut self.a {
                row.swap(i, j);
            }
            if let Some(v) = self.v.as_mut() {
                for row in v {
                    row.swap(i, j);
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = self.u.as_mut() {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    /// Unimodular column mix: (c_i, c_j) <- (s c_i + t c_j, p c_i + q c_j).
    fn col_mix(&mut self, i: usize, j: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
        let mix = |m: &mut Vec<Vec<BigInt>>| {
            for row in m.iter_mut() {
                let (ci, cj) = (row[i].clone(), row[j].clone());
                row[i] = s * &ci + t * &cj;
                row[j] = p * &ci + q * &cj;
            }
        };
        mix(&mut self.a);
        if let Some(v) = self.v.as_mut() {
            mix(v);
        }
    }

    fn min_abs_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let mut best_mag: Option<BigInt> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let mag = x.magnitude();
                if best_mag.as_ref().is_none_or(|b| mag < b.magnitude()) {
                    let one = mag.is_one();
                    best = Some((i, j));
                    best_mag = Some(x.clone());
                    if one {
                        return best;
                    }
                }
            }
        }
        best
    }

    /// Minimal nonzero entry among row `t` and column `t` (from `t` on).
    fn min_abs_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let mut mag = self.a[t][t].magnitude().clone();
        for j in t + 1..self.cols {
            let x = &self.a[t][j];
            if !x.is_zero() && (mag.is_zero() || x.magnitude() < &mag) {
                mag = x.magnitude().clone();
                best = (t, j);
            }
        }
        for i in t + 1..self.rows {
            let x = &self.a[i][t];
            if !x.is_zero() && (mag.is_zero() || x.magnitude() < &mag) {
                mag = x.magnitude().clone();
                best = (i, t);
            }
        }
        best
    }

    /// Diagonalizes; returns the (possibly unsorted) diagonal pivots.
    fn diagonalize(&mut self) -> usize {
        let mut t = 0;
        while t < self.rows.min(self.cols) {
            let Some((pi, pj)) = self.min_abs_in_block(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = nearest_quotient(&self.a[i][t], &self.a[t][t]);
                    self.row_op(i, t, &q, t);
                    dirty |= !self.a[i][t].is_zero();
                }
                for j in t + 1..self.cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = nearest_quotient(&self.a[t][j], &self.a[t][t]);
                    self.col_op(j, t, &q, t);
                    dirty |= !self.a[t][j].is_zero();
                }
                if !dirty {
                    break;
                }
                let (pi, pj) = self.min_abs_in_cross(t);
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }

    /// Enforces d_i | d_j on the first `r` diagonal entries.
    fn fix_divisibility(&mut self, r: usize) {
        for i in 0..r {
            for j in i + 1..r {
                let a = self.a[i][i].clone();
                let b = self.a[j][j].clone();
                if b.is_multiple_of(&a) {
                    continue;
                }
                if self.u.is_none() {
                    let g = a.gcd(&b);
                    self.a[j][j] = (&a / &g) * &b;
                    self.a[i][i] = g;
                    continue;
                }
                // row_i += row_j puts b at (i, j); a unimodular column mix
                // then moves gcd(a, b) to (i, i), and a row op clears (j, i).
                self.row_op(i, j, &BigInt::from(-1), 0);
                let e = a.extended_gcd(&b);
                let g = e.gcd;
                let p = -(&b / &g);
                let q = &a / &g;
                self.col_mix(i, j, &e.x, &e.y, &p, &q);
                let c = &self.a[j][i] / &g;
                self.row_op(j, i, &c, 0);
                if self.a[j][j].is_negative() {
                    self.negate_row(j);
                }
            }
        }
    }
}

fn smith_impl(m: &IntegerMatrix, transforms: bool) -> (SmithForm, Reducer) {
    let mut red = Reducer::new(m, transforms);
    let r = red.diagonalize();
    red.fix_divisibility(r);
    let factors: Vec<BigInt> = (0..r).map(|i| red.a[i][i].clone()).collect();
    let form = SmithForm {
        invariant_factors: factors,
        rank: r,
        nullity: m.cols - r,
    };
    (form, red)
}

/// Invariant factors of the abelian group presented by `m`. Pivots on the
/// entry of least absolute value at each step.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    smith_impl(m, false).0
}

/// Smith form together with its unimodular transforms.
pub fn smith_decomposition(m: &IntegerMatrix) -> SmithDecomposition {
    let (form, red) = smith_impl(m, true);
    SmithDecomposition {
        form,
        diagonal: IntegerMatrix::from_nested(red.rows, red.cols, red.a),
        left: IntegerMatrix::from_nested(red.rows, red.rows, red.u.unwrap()),
        right: IntegerMatrix::from_nested(red.cols, red.cols, red.v.unwrap()),
    }
}

/// Product of the nonzero invariant factors (1 for the zero matrix).
pub fn torsion_order(m: &IntegerMatrix) -> BigInt {
    smith_normal_form(m).torsion_order()
}

/// Exact determinant by fraction-free elimination.
pub fn bareiss_determinant(m: &IntegerMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "determinant of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.to_nested();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in rest.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let num = pivot * &row[j] - &lead * &pivot_row[j];
                row[j] = if prev.is_one() { num } else { num / &prev };
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Largest matrix dimension accepted by [`gcd_minors`].
pub const MINOR_ENUMERATION_LIMIT: usize = 10;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Greatest common divisor of all `k x k` minors (0 when all vanish), by
/// exhaustive enumeration.
pub fn gcd_minors(m: &IntegerMatrix, k: usize) -> Result<BigInt> {
    let big = m.rows.max(m.cols);
    if big > MINOR_ENUMERATION_LIMIT {
        return Err(Error::SizeLimit {
            what: "minor enumeration matrix size",
            size: big as u128,
            limit: MINOR_ENUMERATION_LIMIT as u128,
        });
    }
    if k > m.rows.min(m.cols) {
        return Err(Error::InvalidArgument(format!(
            "minor size {k} exceeds {}x{} matrix",
            m.rows, m.cols
        )));
    }
    if k == 0 {
        return Ok(BigInt::one());
    }
    let row_sets = combinations(m.rows, k);
    let col_sets = combinations(m.cols, k);
    let mut g = BigInt::zero();
    for rs in &row_sets {
        for cs in &col_sets {
            let d = bareiss_determinant(&m.select(rs, cs))?;
            g = g.gcd(&d);
            if g.is_one() {
                return Ok(g);
            }
        }
    }
    Ok(g)
}

/// All principal minors of order `k`.
pub fn principal_minors(m: &IntegerMatrix, k: usize) -> Result<Vec<BigInt>> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(
            "principal minors need a square matrix".into(),
        ));
    }
    combinations(m.rows, k)
        .iter()
        .map(|s| bareiss_determinant(&m.select(s, s)))
        .collect()
}

/// Integer rank.
pub fn rank(m: &IntegerMatrix) -> usize {
    smith_normal_form(m).rank
}
