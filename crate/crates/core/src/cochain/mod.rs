//! Inhomogeneous-cochain cohomology H^n(G, M) for n <= 3 over lattice
//! coefficients, plus restriction, inflation, Tate H^0 for cyclic groups and
//! the Shapiro cross-check.  C^n(G, M) has dimension rank(M) * |G|^n with
//! basis indexed (tuple, coordinate); tuples are big-endian in |G|.

pub mod engine;

use crate::error::CochainError;
use crate::glattice::GLattice;
use crate::group::{HeisenbergGroup, Subgroup};
use crate::linalg::{self, AbGroup, IntMatrix};
use crate::smallgroup::FiniteGroup;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub type SpVec = Vec<(usize, BigInt)>;

pub const DEFAULT_DIM_CAP: usize = 200_000;

/// Dimension cap for materialized cochain spaces, overridable through the
/// NORM1_BUDGET environment variable.
pub fn dim_cap() -> usize {
    std::env::var("NORM1_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_DIM_CAP)
}

pub fn cochain_dim(lat: &GLattice, n: usize) -> usize {
    lat.rank * lat.group.size().pow(n as u32)
}

fn check_dim(lat: &GLattice, n: usize) -> Result<usize, CochainError> {
    let dim = cochain_dim(lat, n);
    let cap = dim_cap();
    if dim > cap {
        return Err(CochainError::BudgetExceeded { dim, cap });
    }
    Ok(dim)
}

fn decode(mut t: usize, n: usize, size: usize) -> Vec<usize> {
    let mut out = vec![0usize; n];
    for k in (0..n).rev() {
        out[k] = t % size;
        t /= size;
    }
    out
}

fn encode(tuple: &[usize], size: usize) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * size + g)
}

/// Sparse row of d^n at row index (tuple g, coordinate r), merged and sorted.
fn d_row(lat: &GLattice, n: usize, g: &[usize], r: usize) -> Vec<(usize, i64)> {
    let size = lat.group.size();
    let rank = lat.rank;
    let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
    // g_1 . f(g_2, ..., g_{n+1})
    let head = encode(&g[1..], size);
    for &(j, c) in &lat.action(g[0]).rows[r] {
        *acc.entry(head * rank + j).or_default() += c;
    }
    // merged-argument terms
    let mut merged = Vec::with_capacity(n);
    for i in 0..n {
        merged.clear();
        merged.extend_from_slice(&g[..i]);
        merged.push(lat.group.mul(g[i], g[i + 1]));
        merged.extend_from_slice(&g[i + 2..]);
        let sign = if i % 2 == 0 { -1 } else { 1 };
        *acc.entry(encode(&merged, size) * rank + r).or_default() += sign;
    }
    // (-1)^{n+1} f(g_1, ..., g_n)
    let sign = if n % 2 == 0 { -1 } else { 1 };
    *acc.entry(encode(&g[..n], size) * rank + r).or_default() += sign;
    acc.into_iter().filter(|&(_, v)| v != 0).collect()
}

/// Streams the rows of d^n: C^n -> C^{n+1}.  Row index = tuple * rank + r.
pub fn for_each_d_row(
    lat: &GLattice,
    n: usize,
    mut cb: impl FnMut(usize, &[(usize, i64)]),
) -> Result<(), CochainError> {
    check_dim(lat, n)?;
    let size = lat.group.size();
    let rank = lat.rank;
    let tuples = size.pow((n + 1) as u32);
    for t in 0..tuples {
        let g = decode(t, n + 1, size);
        for r in 0..rank {
            let row = d_row(lat, n, &g, r);
            cb(t * rank + r, &row);
        }
    }
    Ok(())
}

/// The matrix of d^n: C^n -> C^{n+1}; both dimensions must fit the cap.
pub fn boundary_matrix(lat: &GLattice, n: usize) -> Result<IntMatrix, CochainError> {
    let cols = check_dim(lat, n)?;
    let rows = check_dim(lat, n + 1)?;
    let mut m = IntMatrix::zero(rows, cols);
    for_each_d_row(lat, n, |ri, row| {
        for &(c, v) in row {
            m.set(ri, c, BigInt::from(v));
        }
    })?;
    Ok(m)
}

/// Applies d^n to a cochain vector.
pub fn apply_d(lat: &GLattice, n: usize, f: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(f.len(), cochain_dim(lat, n));
    let size = lat.group.size();
    let rank = lat.rank;
    let tuples = size.pow((n + 1) as u32);
    let mut out = vec![BigInt::zero(); tuples * rank];
    for t in 0..tuples {
        let g = decode(t, n + 1, size);
        for r in 0..rank {
            let mut acc = BigInt::zero();
            for (c, v) in d_row(lat, n, &g, r) {
                acc += &f[c] * v;
            }
            out[t * rank + r] = acc;
        }
    }
    out
}

/// Columns of d^{n-1}: C^{n-1} -> C^n, i.e. the images of the basis
/// cochains, as sparse vectors in C^n.
pub fn image_columns(lat: &GLattice, n: usize) -> Result<Vec<SpVec>, CochainError> {
    assert!(n >= 1);
    check_dim(lat, n - 1)?;
    check_dim(lat, n)?;
    let size = lat.group.size();
    let rank = lat.rank;
    // column access to the action matrices
    let act_cols: Vec<Vec<Vec<(usize, i64)>>> = (0..size)
        .map(|g| {
            let mut cols = vec![Vec::new(); rank];
            for (r, row) in lat.action(g).rows.iter().enumerate() {
                for &(j, c) in row {
                    cols[j].push((r, c));
                }
            }
            cols
        })
        .collect();
    let src_tuples = size.pow((n - 1) as u32);
    let mut out = Vec::with_capacity(src_tuples * rank);
    for t in 0..src_tuples {
        let h = decode(t, n - 1, size);
        for i in 0..rank {
            let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
            // g_1 . f(...) term: rows (g1, h)
            for g1 in 0..size {
                let tup = g1 * src_tuples + t;
                for &(r, c) in &act_cols[g1][i] {
                    *acc.entry(tup * rank + r).or_default() += c;
                }
            }
            // merged terms: split h_j = x * y
            let mut dst = vec![0usize; n];
            for j in 0..n.saturating_sub(1) {
                let sign = if j % 2 == 0 { -1 } else { 1 };
                for x in 0..size {
                    let y = lat.group.mul(lat.group.inv(x), h[j]);
                    dst[..j].copy_from_slice(&h[..j]);
                    dst[j] = x;
                    dst[j + 1] = y;
                    dst[j + 2..].copy_from_slice(&h[j + 1..]);
                    *acc.entry(encode(&dst, size) * rank + i).or_default() += sign;
                }
            }
            // trailing term of d^{n-1}: sign (-1)^n, rows (h, g)
            let sign = if n % 2 == 0 { 1 } else { -1 };
            for gl in 0..size {
                let tup = t * size + gl;
                *acc.entry(tup * rank + i).or_default() += sign;
            }
            out.push(
                acc.into_iter()
                    .filter(|&(_, v)| v != 0)
                    .map(|(k, v)| (k, BigInt::from(v)))
                    .collect(),
            );
        }
    }
    Ok(out)
}

/// A computed cohomology group with cocycle representatives; `orders[i]` is
/// the order of `reps[i]` in the group.
pub struct CohomGroup {
    pub degree: usize,
    pub coeff: String,
    pub structure: AbGroup,
    pub orders: Vec<u64>,
    pub reps: Vec<Vec<BigInt>>,
    parts: Vec<engine::PrimePart>,
}

impl CohomGroup {
    /// Coordinates of a cocycle's class over the representatives, aligned
    /// with `reps`/`orders`.
    pub fn class_of(&self, z: &[BigInt]) -> Result<Vec<u64>, CochainError> {
        let mut out = Vec::with_capacity(self.orders.len());
        for part in &self.parts {
            let coords = part.class_coords(z).ok_or(CochainError::NotInSpan)?;
            out.extend(coords);
        }
        Ok(out)
    }

    pub fn is_coboundary(&self, z: &[BigInt]) -> Result<bool, CochainError> {
        Ok(self.class_of(z)?.iter().all(|&c| c == 0))
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// H^n(G, M) by exact linear algebra; see `engine` for the method.
pub fn cohomology(lat: &GLattice, n: usize) -> Result<CohomGroup, CochainError> {
    let coeff = format!("lattice rank {}", lat.rank);
    if n == 0 {
        // fixed sublattice, free
        let size = lat.group.size();
        let mut stacked = IntMatrix::zero(size * lat.rank, lat.rank);
        for g in 0..size {
            for (i, row) in lat.action(g).rows.iter().enumerate() {
                for &(j, c) in row {
                    let cur = stacked.get(g * lat.rank + i, j);
                    stacked.set(g * lat.rank + i, j, cur + BigInt::from(c));
                }
                let cur = stacked.get(g * lat.rank + i, i);
                stacked.set(g * lat.rank + i, i, cur - 1);
            }
        }
        let fixed = linalg::kernel_lattice(&stacked);
        let k = fixed.rank();
        let reps = (0..k).map(|c| fixed.basis.column(c)).collect();
        return Ok(CohomGroup {
            degree: 0,
            coeff,
            structure: AbGroup {
                invariants: vec![],
                free_rank: k,
            },
            orders: vec![0; k],
            reps,
            parts: vec![],
        });
    }
    let mut parts = Vec::new();
    let mut orders = Vec::new();
    let mut reps = Vec::new();
    for q in prime_factors(lat.group.size() as u64) {
        let part = engine::PrimePart::compute(lat, n, q)?;
        let (o, r) = part.orders_and_reps();
        orders.extend(o);
        reps.extend(r);
        parts.push(part);
    }
    let structure = AbGroup::from_orders(&orders);
    Ok(CohomGroup {
        degree: n,
        coeff,
        structure,
        orders,
        reps,
        parts,
    })
}

/// Restriction of a degree-n cochain to the subgroup given by its (sorted)
/// ambient element indices.
pub fn restrict_cochain(
    c: &[BigInt],
    degree: usize,
    rank: usize,
    ambient_size: usize,
    elems: &[usize],
) -> Vec<BigInt> {
    let sub = elems.len();
    let tuples = sub.pow(degree as u32);
    let mut out = Vec::with_capacity(tuples * rank);
    for t in 0..tuples {
        let h = decode(t, degree, sub);
        let amb: Vec<usize> = h.iter().map(|&i| elems[i]).collect();
        let src = encode(&amb, ambient_size);
        for r in 0..rank {
            out.push(c[src * rank + r].clone());
        }
    }
    out
}

/// Inflation: precompose a cochain over G/N with the projection and include
/// coefficients through `incl` (rank(M) x rank(M^N)).
pub fn inflate_cochain(
    c: &[BigInt],
    degree: usize,
    quot_size: usize,
    proj: &[usize],
    incl: &IntMatrix,
) -> Vec<BigInt> {
    let rank_sub = incl.cols();
    let rank_amb = incl.rows();
    let amb_size = proj.len();
    let tuples = amb_size.pow(degree as u32);
    let mut out = vec![BigInt::zero(); tuples * rank_amb];
    for t in 0..tuples {
        let g = decode(t, degree, amb_size);
        let q: Vec<usize> = g.iter().map(|&x| proj[x]).collect();
        let src = encode(&q, quot_size);
        for (r, col, v) in incl.entries() {
            out[t * rank_amb + r] += v * &c[src * rank_sub + col];
        }
    }
    out
}

/// Tate H^0 for a cyclic acting group: M^C / N(M) with N the norm element.
pub fn tate_h0_cyclic(lat: &GLattice) -> Result<AbGroup, CochainError> {
    let size = lat.group.size();
    let cyclic = (0..size).any(|g| lat.group.element_order(g) == size);
    if !cyclic {
        return Err(CochainError::NotCyclic);
    }
    let gen = (0..size)
        .find(|&g| lat.group.element_order(g) == size)
        .unwrap();
    let mut stacked = IntMatrix::zero(lat.rank, lat.rank);
    for (i, row) in lat.action(gen).rows.iter().enumerate() {
        for &(j, c) in row {
            let cur = stacked.get(i, j);
            stacked.set(i, j, cur + BigInt::from(c));
        }
        let cur = stacked.get(i, i);
        stacked.set(i, i, cur - 1);
    }
    let fixed = linalg::kernel_lattice(&stacked);
    // norm element
    let mut norm = IntMatrix::zero(lat.rank, lat.rank);
    for g in 0..size {
        for (i, row) in lat.action(g).rows.iter().enumerate() {
            for &(j, c) in row {
                let cur = norm.get(i, j);
                norm.set(i, j, cur + BigInt::from(c));
            }
        }
    }
    let (group, _) = linalg::subquotient(&fixed, &norm)
        .map_err(CochainError::Linalg)?;
    Ok(group)
}

/// Shapiro cross-check: H^n(G, Z[G/H]) vs H^n(H, Z), both computed
/// independently.  Returns (induced side, subgroup side).
pub fn shapiro_check(
    g: &HeisenbergGroup,
    h: &Subgroup,
    n: usize,
) -> Result<(AbGroup, AbGroup), CochainError> {
    let (p_lat, _) = crate::glattice::perm_lattice(g, h);
    let lhs = cohomology(&p_lat, n)?.structure;
    let (sub, _) = FiniteGroup::from_subgroup(g, h);
    let triv = crate::glattice::trivial_lattice(sub);
    let rhs = cohomology(&triv, n)?.structure;
    Ok((lhs, rhs))
}

pub(crate) fn big_mod_u64(v: &BigInt, q: u64) -> u64 {
    let m = v % BigInt::from(q);
    let m = if m.is_negative() { m + BigInt::from(q) } else { m };
    m.to_u64().unwrap()
}
