pub mod zmod;

use crate::error::LinalgError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sparse integer matrix with arbitrary-precision entries, coordinate-list
/// storage in sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IntMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, String)>,
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = IntMatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| (r, c, v.to_string()))
                .collect(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = IntMatrixRepr::deserialize(d)?;
        let mut m = IntMatrix::zero(repr.rows, repr.cols);
        for (r, c, v) in repr.entries {
            let val: BigInt = v.parse().map_err(serde::de::Error::custom)?;
            m.set(r, c, val);
        }
        Ok(m)
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_dense(d: &[Vec<i64>]) -> Self {
        let rows = d.len();
        let cols = d.first().map_or(0, |r| r.len());
        let mut m = Self::zero(rows, cols);
        for (i, row) in d.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense input");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, BigInt::from(v));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn from_dense_big(d: Vec<Vec<BigInt>>) -> Self {
        let rows = d.len();
        let cols = d.first().map_or(0, |r| r.len());
        let mut m = Self::zero(rows, cols);
        for (i, row) in d.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_zero() {
                    m.entries.insert((i, j), v);
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            m.entries.insert((c, r), v.clone());
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        // group other's entries by row for sparse access
        let mut by_row: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); other.rows];
        for (&(r, c), v) in &other.entries {
            by_row[r].push((c, v));
        }
        for (&(r, k), v) in &self.entries {
            for &(c, w) in &by_row[k] {
                let e = acc.entry((r, c)).or_default();
                *e += v * w;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        IntMatrix {
            rows: self.rows,
            cols: other.cols,
            entries: acc,
        }
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len());
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            out[r] += v * &x[c];
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(r, cc), v) in &self.entries {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }

    pub fn hstack(parts: &[&IntMatrix]) -> IntMatrix {
        assert!(!parts.is_empty());
        let rows = parts[0].rows;
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = IntMatrix::zero(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows);
            for (&(r, c), v) in &m.entries {
                out.entries.insert((r, c + off), v.clone());
            }
            off += m.cols;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Finitely generated abelian group: invariant factors d1 | d2 | ... (each
/// > 1) plus a free rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbGroup {
    pub invariants: Vec<u64>,
    pub free_rank: usize,
}

impl AbGroup {
    pub fn trivial() -> Self {
        AbGroup {
            invariants: vec![],
            free_rank: 0,
        }
    }

    pub fn free(rank: usize) -> Self {
        AbGroup {
            invariants: vec![],
            free_rank: rank,
        }
    }

    /// (Z/n)^k
    pub fn elementary(n: u64, k: usize) -> Self {
        assert!(n > 1);
        AbGroup {
            invariants: vec![n; k],
            free_rank: 0,
        }
    }

    /// Builds the canonical invariant-factor chain from an arbitrary list of
    /// cyclic orders (1s dropped, 0s treated as free factors).
    pub fn from_orders(orders: &[u64]) -> Self {
        let mut free = 0usize;
        // prime factorization multiset approach
        let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in orders {
            if n == 0 {
                free += 1;
                continue;
            }
            let mut n = n;
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    let mut e = 0;
                    while n % d == 0 {
                        n /= d;
                        e += 1;
                    }
                    primary.entry(d).or_default().push(e);
                }
                d += 1;
            }
            if n > 1 {
                primary.entry(n).or_default().push(1);
            }
        }
        let k = primary.values().map(|v| v.len()).max().unwrap_or(0);
        let mut invariants = vec![1u64; k];
        for (p, exps) in &mut primary {
            exps.sort_unstable();
            // largest exponent goes to the last invariant factor
            for (slot, &e) in exps.iter().rev().enumerate() {
                invariants[k - 1 - slot] *= p.pow(e);
            }
        }
        invariants.retain(|&d| d > 1);
        AbGroup {
            invariants,
            free_rank: free,
        }
    }

    pub fn order(&self) -> Option<u64> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.invariants.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty() && self.free_rank == 0
    }
}

impl std::fmt::Display for AbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        // group equal invariants
        let mut i = 0;
        while i < self.invariants.len() {
            let d = self.invariants[i];
            let mut j = i;
            while j < self.invariants.len() && self.invariants[j] == d {
                j += 1;
            }
            if j - i == 1 {
                parts.push(format!("Z/{d}"));
            } else {
                parts.push(format!("(Z/{d})^{}", j - i));
            }
            i = j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Saturated lattice basis: columns of `basis` are independent and span a
/// saturated sublattice of Z^ambient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub ambient: usize,
    pub basis: IntMatrix,
}

impl LatticeBasis {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }
}

fn is_zero_row(row: &[BigInt]) -> bool {
    row.iter().all(|x| x.is_zero())
}

/// Row Hermite normal form: returns (H, U) with H = U * M, U unimodular.
/// Canonical form: nonzero rows first, strictly increasing pivot columns,
/// positive pivots, entries above each pivot reduced into [0, pivot).
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.to_dense();
    let mut u = IntMatrix::identity(rows).to_dense();

    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // euclidean elimination in this column below pivot_row
        loop {
            // find row with smallest nonzero |entry|
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if !a[r][col].is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => a[r][col].abs() < a[b][col].abs(),
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
            let Some(b) = best else { break };
            a.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let mut done = true;
            let pv = a[pivot_row][col].clone();
            for r in pivot_row + 1..rows {
                if !a[r][col].is_zero() {
                    let q = div_round(&a[r][col], &pv);
                    if !q.is_zero() {
                        for c in 0..cols {
                            let t = &a[pivot_row][c] * &q;
                            a[r][c] -= t;
                        }
                        for c in 0..rows {
                            let t = &u[pivot_row][c] * &q;
                            u[r][c] -= t;
                        }
                    }
                    if !a[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[pivot_row][col].is_zero() {
            continue;
        }
        // make pivot positive
        if a[pivot_row][col].is_negative() {
            for c in 0..cols {
                a[pivot_row][c] = -a[pivot_row][c].clone();
            }
            for c in 0..rows {
                u[pivot_row][c] = -u[pivot_row][c].clone();
            }
        }
        // reduce entries above the pivot into [0, pivot)
        let pv = a[pivot_row][col].clone();
        for r in 0..pivot_row {
            if !a[r][col].is_zero() {
                let q = a[r][col].div_floor(&pv);
                if !q.is_zero() {
                    for c in 0..cols {
                        let t = &a[pivot_row][c] * &q;
                        a[r][c] -= t;
                    }
                    for c in 0..rows {
                        let t = &u[pivot_row][c] * &q;
                        u[r][c] -= t;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    (IntMatrix::from_dense_big(a), IntMatrix::from_dense_big(u))
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer quotient, biased toward floor, keeps remainders small
    let (q, r) = a.div_rem(b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Smith normal form: returns (invariant factor diagonal including 1s and
/// excluding trailing zeros, U, V) with U*M*V diagonal, U and V unimodular.
pub fn snf(m: &IntMatrix) -> (Vec<BigInt>, IntMatrix, IntMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.to_dense();
    let mut u = IntMatrix::identity(rows).to_dense();
    let mut v = IntMatrix::identity(cols).to_dense();

    let n = rows.min(cols);
    for t in 0..n {
        // find smallest nonzero |entry| in the trailing submatrix
        loop {
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if !a[r][c].is_zero() {
                        let better = match best {
                            None => true,
                            Some((br, bc)) => a[r][c].abs() < a[br][bc].abs(),
                        };
                        if better {
                            best = Some((r, c));
                        }
                    }
                }
            }
            let Some((br, bc)) = best else {
                return finish_snf(a, u, v, t);
            };
            a.swap(t, br);
            u.swap(t, br);
            for row in a.iter_mut() {
                row.swap(t, bc);
            }
            for row in v.iter_mut() {
                row.swap(t, bc);
            }
            let pv = a[t][t].clone();
            let mut clean = true;
            for r in t + 1..rows {
                if !a[r][t].is_zero() {
                    let q = div_round(&a[r][t], &pv);
                    if !q.is_zero() {
                        for c in 0..cols {
                            let s = &a[t][c] * &q;
                            a[r][c] -= s;
                        }
                        for c in 0..rows {
                            let s = &u[t][c] * &q;
                            u[r][c] -= s;
                        }
                    }
                    if !a[r][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for c in t + 1..cols {
                if !a[t][c].is_zero() {
                    let q = div_round(&a[t][c], &pv);
                    if !q.is_zero() {
                        for r in 0..rows {
                            let s = &a[r][t] * &q;
                            a[r][c] -= s;
                        }
                        for r in 0..cols {
                            let s = &v[r][t] * &q;
                            v[r][c] -= s;
                        }
                    }
                    if !a[t][c].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // pivot divides every remaining entry? if not, mix that row in
            let mut offender: Option<usize> = None;
            'scan: for r in t + 1..rows {
                for c in t + 1..cols {
                    if !(&a[r][c] % &a[t][t]).is_zero() {
                        offender = Some(r);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(r) => {
                    for c in 0..cols {
                        let s = a[r][c].clone();
                        a[t][c] += s;
                    }
                    for c in 0..rows {
                        let s = u[r][c].clone();
                        u[t][c] += s;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for c in 0..cols {
                a[t][c] = -a[t][c].clone();
            }
            for c in 0..rows {
                u[t][c] = -u[t][c].clone();
            }
        }
    }
    finish_snf(a, u, v, n)
}

fn finish_snf(
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    rank: usize,
) -> (Vec<BigInt>, IntMatrix, IntMatrix) {
    let diag: Vec<BigInt> = (0..rank).map(|i| a[i][i].abs()).collect();
    (
        diag,
        IntMatrix::from_dense_big(u),
        IntMatrix::from_dense_big(v),
    )
}

/// Cokernel Z^rows / im(M) as an AbGroup, from the Smith normal form.
pub fn cokernel(m: &IntMatrix) -> AbGroup {
    let (diag, _, _) = snf(m);
    let orders: Vec<u64> = diag
        .iter()
        .map(|d| u64::try_from(d).expect("invariant factor fits u64"))
        .collect();
    let mut g = AbGroup::from_orders(&orders);
    g.free_rank += m.rows() - diag.len();
    g
}

/// Saturated canonical basis of {x : M x = 0}.
pub fn kernel_lattice(m: &IntMatrix) -> LatticeBasis {
    let mt = m.transpose();
    let (h, u) = hnf(&mt);
    let hd = h.to_dense();
    let ud = u.to_dense();
    let mut kernel_rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..h.rows() {
        if is_zero_row(&hd[i]) {
            kernel_rows.push(ud[i].clone());
        }
    }
    // canonicalize: HNF of the kernel rows, transposed into columns
    let kr = IntMatrix::from_dense_big(kernel_rows);
    let (kh, _) = hnf(&kr);
    let khd = kh.to_dense();
    let rank = khd.iter().filter(|r| !is_zero_row(r)).count();
    let canon: Vec<Vec<BigInt>> = khd.into_iter().take(rank).collect();
    LatticeBasis {
        ambient: m.cols(),
        basis: IntMatrix::from_dense_big(canon).transpose(),
    }
}

/// Some integral solution of M x = b, or None.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows());
    let mt = m.transpose();
    let (h, u) = hnf(&mt);
    let hd = h.to_dense();
    // greedy reduction of b by the echelon rows of H, integer coefficients
    let mut target: Vec<BigInt> = b.to_vec();
    let mut coeffs = vec![BigInt::zero(); h.rows()];
    for (i, row) in hd.iter().enumerate() {
        let Some(pc) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if target[pc].is_zero() {
            continue;
        }
        let (q, r) = target[pc].div_rem(&row[pc]);
        if !r.is_zero() {
            return None;
        }
        for c in 0..target.len() {
            let t = &row[c] * &q;
            target[c] -= t;
        }
        coeffs[i] = q;
    }
    if target.iter().any(|x| !x.is_zero()) {
        return None;
    }
    let ud = u.to_dense();
    let n = m.cols();
    let mut x = vec![BigInt::zero(); n];
    for (i, ci) in coeffs.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for j in 0..n {
            x[j] += ci * &ud[i][j];
        }
    }
    Some(x)
}

/// Expresses the columns of `jcols` in coordinates of the saturated basis K,
/// and presents K / <columns of jcols> as an abelian group.
pub fn subquotient(
    k: &LatticeBasis,
    jcols: &IntMatrix,
) -> Result<(AbGroup, IntMatrix), LinalgError> {
    assert_eq!(jcols.rows(), k.ambient);
    let rank = k.rank();
    if rank == 0 {
        if !jcols.is_zero() {
            return Err(LinalgError::NotInSpan);
        }
        return Ok((AbGroup::trivial(), IntMatrix::zero(0, jcols.cols())));
    }
    let mut coord = IntMatrix::zero(rank, jcols.cols());
    for c in 0..jcols.cols() {
        let b = jcols.column(c);
        let x = solve(&k.basis, &b).ok_or(LinalgError::NotInSpan)?;
        for (r, v) in x.into_iter().enumerate() {
            coord.set(r, c, v);
        }
    }
    Ok((cokernel(&coord), coord))
}

/// Rank of M over the prime field Z/m.
pub fn modular_rank(m: &IntMatrix, modulus: u64) -> Result<usize, LinalgError> {
    if !is_prime(modulus) {
        return Err(LinalgError::NonPrimeModulus(modulus));
    }
    let md = BigInt::from(modulus);
    let mut a: Vec<Vec<u64>> = {
        let dense = m.to_dense();
        dense
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| {
                        let r = v.mod_floor(&md);
                        u64::try_from(&r).expect("residue fits u64")
                    })
                    .collect()
            })
            .collect()
    };
    let rows = m.rows();
    let cols = m.cols();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] % modulus != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = mod_inverse(a[rank][col], modulus);
        for c in col..cols {
            a[rank][c] = mulmod(a[rank][c], inv, modulus);
        }
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for c in col..cols {
                    let t = mulmod(f, a[rank][c], modulus);
                    a[r][c] = (a[r][c] + modulus - t) % modulus;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Ok(rank)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended euclid; a must be invertible mod m
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "element not invertible");
    (t.rem_euclid(m as i128)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn det(m: &IntMatrix) -> BigInt {
        // cofactor expansion for small tests
        let n = m.rows();
        assert_eq!(n, m.cols());
        let d = m.to_dense();
        fn go(d: &[Vec<BigInt>], cols: &[usize]) -> BigInt {
            if cols.is_empty() {
                return BigInt::one();
            }
            let row = d.len() - cols.len();
            let mut acc = BigInt::zero();
            for (k, &c) in cols.iter().enumerate() {
                if d[row][c].is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols
                    .iter()
                    .copied()
                    .filter(|&x| x != c)
                    .collect();
                let sub = go(d, &rest);
                let term = &d[row][c] * sub;
                if k % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        let cols: Vec<usize> = (0..n).collect();
        go(&d, &cols)
    }

    #[test]
    fn hnf_spec_example() {
        let m = IntMatrix::from_dense(&[vec![2, 4], vec![1, 3]]);
        let (h, u) = hnf(&m);
        assert_eq!(u.mul(&m), h);
        assert_eq!(det(&u).abs(), BigInt::one());
        // [[1,3],[0,2]] with the 3 reduced mod the pivot below it
        assert_eq!(h, IntMatrix::from_dense(&[vec![1, 1], vec![0, 2]]));
    }

    #[test]
    fn hnf_identity_and_zero() {
        let i = IntMatrix::identity(4);
        let (h, _) = hnf(&i);
        assert_eq!(h, i);
        let z = IntMatrix::zero(3, 2);
        let (h, u) = hnf(&z);
        assert_eq!(h, z);
        assert_eq!(det(&u).abs(), BigInt::one());
    }

    #[test]
    fn snf_examples() {
        let m = IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        let (d, u, v) = snf(&m);
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
        let prod = u.mul(&m).mul(&v);
        for (r, c, val) in prod.entries() {
            assert!(r == c && *val == d[r]);
        }
        let (d, _, _) = snf(&IntMatrix::from_dense(&[vec![7]]));
        assert_eq!(d, vec![BigInt::from(7)]);
        let (d, _, _) = snf(&IntMatrix::from_dense(&[vec![0]]));
        assert!(d.is_empty());
        assert_eq!(
            cokernel(&IntMatrix::from_dense(&[vec![0]])),
            AbGroup::free(1)
        );
    }

    #[test]
    fn kernel_lattice_examples() {
        let k = kernel_lattice(&IntMatrix::from_dense(&[vec![1, 1]]));
        assert_eq!(k.rank(), 1);
        let v = k.basis.column(0);
        assert_eq!(v[0].clone() + v[1].clone(), BigInt::zero());
        assert_eq!(v[0].abs(), BigInt::one());

        // saturation: [[2,2]] must still give primitive (1,-1)
        let k = kernel_lattice(&IntMatrix::from_dense(&[vec![2, 2]]));
        assert_eq!(k.rank(), 1);
        let v = k.basis.column(0);
        assert_eq!(v[0].abs(), BigInt::one());
    }

    #[test]
    fn solve_examples() {
        let m = IntMatrix::from_dense(&[vec![2]]);
        assert_eq!(
            solve(&m, &[BigInt::from(4)]),
            Some(vec![BigInt::from(2)])
        );
        assert_eq!(solve(&m, &[BigInt::from(3)]), None);
        let m = IntMatrix::from_dense(&[vec![1, 2], vec![0, 3]]);
        let b = vec![BigInt::from(5), BigInt::from(9)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
    }

    #[test]
    fn subquotient_examples() {
        let k = LatticeBasis {
            ambient: 2,
            basis: IntMatrix::identity(2),
        };
        let j = IntMatrix::from_dense(&[vec![3, 0], vec![0, 3]]);
        let (g, _) = subquotient(&k, &j).unwrap();
        assert_eq!(g, AbGroup::elementary(3, 2));

        let k = LatticeBasis {
            ambient: 1,
            basis: IntMatrix::identity(1),
        };
        let (g, _) = subquotient(&k, &IntMatrix::zero(1, 0)).unwrap();
        assert_eq!(g, AbGroup::free(1));

        // NotInSpan
        let k = LatticeBasis {
            ambient: 2,
            basis: IntMatrix::from_dense(&[vec![1], vec![0]]),
        };
        let j = IntMatrix::from_dense(&[vec![0], vec![1]]);
        assert_eq!(subquotient(&k, &j), Err(LinalgError::NotInSpan));
    }

    #[test]
    fn modular_rank_examples() {
        let m = IntMatrix::from_dense(&[vec![3, 0], vec![0, 1]]);
        assert_eq!(modular_rank(&m, 3).unwrap(), 1);
        assert_eq!(modular_rank(&IntMatrix::identity(5), 3).unwrap(), 5);
        assert_eq!(
            modular_rank(&m, 4),
            Err(LinalgError::NonPrimeModulus(4))
        );
    }

    #[test]
    fn abgroup_from_orders() {
        assert_eq!(
            AbGroup::from_orders(&[2, 3]),
            AbGroup {
                invariants: vec![6],
                free_rank: 0
            }
        );
        assert_eq!(
            AbGroup::from_orders(&[2, 4, 3]),
            AbGroup {
                invariants: vec![2, 12],
                free_rank: 0
            }
        );
        assert_eq!(AbGroup::from_orders(&[1, 1]), AbGroup::trivial());
        assert_eq!(AbGroup::elementary(3, 2).to_string(), "(Z/3)^2");
    }

    #[test]
    fn determinism_under_permuted_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut triples: Vec<(usize, usize, i64)> = Vec::new();
        for r in 0..6 {
            for c in 0..5 {
                if rng.gen_bool(0.6) {
                    triples.push((r, c, rng.gen_range(-9..=9)));
                }
            }
        }
        let build = |order: &[usize]| {
            let mut m = IntMatrix::zero(6, 5);
            for &i in order {
                let (r, c, v) = triples[i];
                m.set(r, c, BigInt::from(v));
            }
            m
        };
        let fwd: Vec<usize> = (0..triples.len()).collect();
        let mut rev = fwd.clone();
        rev.reverse();
        let m1 = build(&fwd);
        let m2 = build(&rev);
        assert_eq!(m1, m2);
        assert_eq!(hnf(&m1).0, hnf(&m2).0);
        assert_eq!(snf(&m1).0, snf(&m2).0);
        assert_eq!(kernel_lattice(&m1).basis, kernel_lattice(&m2).basis);
    }

    #[test]
    fn kernel_saturation_random_vs_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..25 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..8);
            let mut d = vec![vec![0i64; cols]; rows];
            for row in d.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen_range(-4..=4) * if rng.gen_bool(0.5) { 1 } else { 0 };
                }
            }
            let m = IntMatrix::from_dense(&d);
            let k = kernel_lattice(&m);
            // every basis column is a kernel vector
            for c in 0..k.rank() {
                let v = k.basis.column(c);
                assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
            }
            // rank matches rational nullity via a big prime
            let r = modular_rank(&m, 1_000_003).unwrap();
            assert_eq!(k.rank(), cols - r);
            // saturation: x in ker with x/2 integral after doubling stays inside
            // (index check: HNF pivots of coordinates of random kernel vectors are 1)
            if k.rank() > 0 {
                let mut x = vec![BigInt::zero(); cols];
                for c in 0..k.rank() {
                    let col = k.basis.column(c);
                    let f = BigInt::from(rng.gen_range(-3i64..=3));
                    for (j, xv) in x.iter_mut().enumerate() {
                        *xv += &col[j] * &f;
                    }
                }
                assert!(solve(&k.basis, &x).is_some());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn prop_hnf_transform(entries in prop::collection::vec(-9i64..=9, 12)) {
            let d: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let m = IntMatrix::from_dense(&d);
            let (h, u) = hnf(&m);
            prop_assert_eq!(u.mul(&m), h);
            let (du, _, _) = snf(&u);
            for x in du {
                prop_assert_eq!(x, BigInt::one());
            }
        }

        #[test]
        fn prop_snf_divisibility(entries in prop::collection::vec(-9i64..=9, 12)) {
            let d: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let m = IntMatrix::from_dense(&d);
            let (diag, u, v) = snf(&m);
            for w in diag.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            let prod = u.mul(&m).mul(&v);
            for (r, c, val) in prod.entries() {
                prop_assert!(r == c);
                prop_assert_eq!(val.abs(), diag[r].clone());
            }
        }

        #[test]
        fn prop_solve_round_trip(entries in prop::collection::vec(-5i64..=5, 12), xs in prop::collection::vec(-5i64..=5, 4)) {
            let d: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let m = IntMatrix::from_dense(&d);
            let x: Vec<BigInt> = xs.iter().map(|&v| BigInt::from(v)).collect();
            let b = m.mul_vec(&x);
            let got = solve(&m, &b).expect("constructed system must be solvable");
            prop_assert_eq!(m.mul_vec(&got), b);
        }
    }
}
