//! Linear algebra over Z/p^k (and prime fields as the k=1 case): streaming
//! row-space compression for very tall sparse systems, and dense local Smith
//! normal form with tracked transforms for the compressed remainder.

use super::{mod_inverse, mulmod};

/// The ring Z/p^k with p prime, q = p^k < 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ring {
    pub p: u64,
    pub k: u32,
    pub q: u64,
}

impl Ring {
    pub fn new(p: u64, k: u32) -> Self {
        assert!(super::is_prime(p), "modulus base must be prime");
        let q = p.checked_pow(k).expect("p^k overflows");
        assert!(q < 1 << 31, "p^k too large");
        assert!(k >= 1);
        Ring { p, k, q }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.q)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    /// p-adic valuation, with val(0) = k.
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.k;
        }
        let mut a = a;
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn unit_part(&self, a: u64) -> u64 {
        assert!(a != 0);
        let mut a = a;
        while a % self.p == 0 {
            a /= self.p;
        }
        a
    }

    pub fn inv_unit(&self, a: u64) -> u64 {
        mod_inverse(a, self.q)
    }

    pub fn pow_p(&self, e: u32) -> u64 {
        self.p.pow(e)
    }
}

/// Streaming row-space compressor over Z/p^k.  Feed arbitrarily many rows;
/// at all times at most `width` rows are retained whose span over the ring
/// equals the span of everything fed so far.
pub struct Echelon {
    pub ring: Ring,
    pub width: usize,
    /// row storage (u16 residues; all supported moduli are < 2^16);
    /// pivots[c] = Some(row index with pivot at column c)
    rows: Vec<Vec<u16>>,
    pivots: Vec<Option<usize>>,
    /// pivot valuation per stored row
    pvals: Vec<u32>,
    pcols: Vec<usize>,
}

impl Echelon {
    pub fn new(ring: Ring, width: usize) -> Self {
        assert!(ring.q < 1 << 16, "echelon storage needs q < 2^16");
        Echelon {
            ring,
            width,
            rows: Vec::new(),
            pivots: vec![None; width],
            pvals: Vec::new(),
            pcols: Vec::new(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn push_sparse(&mut self, entries: &[(usize, i64)]) {
        let mut row = vec![0u64; self.width];
        for &(c, v) in entries {
            row[c] = self.ring.add(row[c], self.ring.reduce_i64(v));
        }
        self.push_dense(row);
    }

    pub fn push_dense(&mut self, mut row: Vec<u64>) {
        let rg = self.ring;
        loop {
            let Some(c) = row.iter().position(|&x| x != 0) else {
                return;
            };
            let v = rg.val(row[c]);
            match self.pivots[c] {
                Some(ri) if self.pvals[ri] <= v => {
                    // reduce: stored pivot is exactly p^pval
                    let m = row[c] / rg.pow_p(self.pvals[ri]);
                    let stored = &self.rows[ri];
                    for j in c..self.width {
                        if stored[j] != 0 {
                            row[j] = rg.sub(row[j], rg.mul(m, u64::from(stored[j])));
                        }
                    }
                }
                Some(ri) => {
                    // incoming has strictly smaller valuation: swap in
                    let scale = rg.inv_unit(rg.unit_part(row[c]));
                    for x in row.iter_mut() {
                        *x = rg.mul(*x, scale);
                    }
                    let displaced: Vec<u64> =
                        self.rows[ri].iter().map(|&x| u64::from(x)).collect();
                    self.rows[ri] = row.iter().map(|&x| x as u16).collect();
                    self.pvals[ri] = v;
                    row = displaced;
                    // re-insert the displaced row
                }
                None => {
                    let scale = rg.inv_unit(rg.unit_part(row[c]));
                    for x in row.iter_mut() {
                        *x = rg.mul(*x, scale);
                    }
                    let ri = self.rows.len();
                    self.rows.push(row.iter().map(|&x| x as u16).collect());
                    self.pivots[c] = Some(ri);
                    self.pvals.push(v);
                    self.pcols.push(c);
                    return;
                }
            }
        }
    }

    /// Reduces a row against the stored rows without modifying the state;
    /// true means the row lies in the accumulated row space over the ring.
    pub fn reduces_to_zero(&self, entries: &[(usize, i64)]) -> bool {
        let rg = self.ring;
        let mut row = vec![0u64; self.width];
        for &(c, v) in entries {
            row[c] = rg.add(row[c], rg.reduce_i64(v));
        }
        loop {
            let Some(c) = row.iter().position(|&x| x != 0) else {
                return true;
            };
            let v = rg.val(row[c]);
            match self.pivots[c] {
                Some(ri) if self.pvals[ri] <= v => {
                    let m = row[c] / rg.pow_p(self.pvals[ri]);
                    let stored = &self.rows[ri];
                    for j in c..self.width {
                        if stored[j] != 0 {
                            row[j] = rg.sub(row[j], rg.mul(m, u64::from(stored[j])));
                        }
                    }
                }
                _ => return false,
            }
        }
    }

    /// Retained rows (a generating set of the accumulated row space).
    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&x| u64::from(x)).collect())
            .collect()
    }

    /// Number of unit pivots = rank of everything fed so far mod p.
    pub fn unit_rank(&self) -> usize {
        self.pvals.iter().filter(|&&v| v == 0).count()
    }

    /// Dense matrix of the retained rows in pivot-column order.
    pub fn to_matrix(&self) -> Vec<Vec<u64>> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pcols[i]);
        idx.into_iter()
            .map(|i| self.rows[i].iter().map(|&x| u64::from(x)).collect())
            .collect()
    }
}

/// Dense local Smith normal form over Z/p^k with transforms:
/// u * a * v = diag(p^dvals), all transforms invertible over the ring.
pub struct LocalSmith {
    pub ring: Ring,
    pub rows: usize,
    pub cols: usize,
    /// valuations of the diagonal, length min(rows, cols); k means 0
    pub dvals: Vec<u32>,
    pub u: Vec<Vec<u64>>,
    pub uinv: Vec<Vec<u64>>,
    pub v: Vec<Vec<u64>>,
    pub vinv: Vec<Vec<u64>>,
}

fn ident(n: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

pub fn local_smith(ring: Ring, a0: &[Vec<u64>]) -> LocalSmith {
    let rows = a0.len();
    let cols = a0.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<u64>> = a0.to_vec();
    let mut u = ident(rows);
    let mut uinv = ident(rows);
    let mut v = ident(cols);
    let mut vinv = ident(cols);
    let rg = ring;
    let n = rows.min(cols);
    let mut dvals = vec![rg.k; n];

    for t in 0..n {
        // min valuation entry in trailing block
        let mut best: Option<(usize, usize, u32)> = None;
        for r in t..rows {
            for c in t..cols {
                if a[r][c] != 0 {
                    let val = rg.val(a[r][c]);
                    if best.map_or(true, |(_, _, bv)| val < bv) {
                        best = Some((r, c, val));
                        if val == 0 {
                            break;
                        }
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((br, bc, d)) = best else { break };
        a.swap(t, br);
        u.swap(t, br);
        for row in uinv.iter_mut() {
            row.swap(t, br);
        }
        for row in a.iter_mut() {
            row.swap(t, bc);
        }
        for row in v.iter_mut() {
            row.swap(t, bc);
        }
        vinv.swap(t, bc);
        // normalize pivot to p^d (scale row by unit inverse)
        let s = rg.inv_unit(rg.unit_part(a[t][t]));
        let sinv = rg.unit_part(a[t][t]);
        for c in 0..cols {
            a[t][c] = rg.mul(a[t][c], s);
        }
        for c in 0..rows {
            u[t][c] = rg.mul(u[t][c], s);
        }
        for row in uinv.iter_mut() {
            row[t] = rg.mul(row[t], sinv);
        }
        let pd = rg.pow_p(d);
        // clear column t
        for r in t + 1..rows {
            if a[r][t] != 0 {
                let m = a[r][t] / pd;
                for c in 0..cols {
                    let x = rg.mul(m, a[t][c]);
                    a[r][c] = rg.sub(a[r][c], x);
                }
                for c in 0..rows {
                    let x = rg.mul(m, u[t][c]);
                    u[r][c] = rg.sub(u[r][c], x);
                }
                for row in uinv.iter_mut() {
                    let x = rg.mul(m, row[r]);
                    row[t] = rg.add(row[t], x);
                }
            }
        }
        // clear row t
        for c in t + 1..cols {
            if a[t][c] != 0 {
                let m = a[t][c] / pd;
                for r in 0..rows {
                    let x = rg.mul(m, a[r][t]);
                    a[r][c] = rg.sub(a[r][c], x);
                }
                for r in 0..cols {
                    let x = rg.mul(m, v[r][t]);
                    v[r][c] = rg.sub(v[r][c], x);
                }
                let add_row: Vec<u64> = vinv[c].iter().map(|&x| rg.mul(m, x)).collect();
                for (j, x) in add_row.into_iter().enumerate() {
                    vinv[t][j] = rg.add(vinv[t][j], x);
                }
            }
        }
        dvals[t] = d;
    }
    LocalSmith {
        ring,
        rows,
        cols,
        dvals,
        u,
        uinv,
        v,
        vinv,
    }
}

impl LocalSmith {
    /// Solve a * x = b over the ring; returns any solution.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let rg = self.ring;
        // y with D y = U b, then x = V y
        let mut ub = vec![0u64; self.rows];
        for (i, row) in self.u.iter().enumerate() {
            let mut acc = 0u64;
            for (j, &m) in row.iter().enumerate() {
                if m != 0 && b[j] != 0 {
                    acc = rg.add(acc, rg.mul(m, b[j]));
                }
            }
            ub[i] = acc;
        }
        let n = self.dvals.len();
        let mut y = vec![0u64; self.cols];
        for i in 0..self.rows {
            if i < n && self.dvals[i] < rg.k {
                let pd = rg.pow_p(self.dvals[i]);
                if ub[i] % pd != 0 {
                    return None;
                }
                y[i] = ub[i] / pd;
            } else if ub[i] != 0 {
                return None;
            }
        }
        let mut x = vec![0u64; self.cols];
        for (r, row) in self.v.iter().enumerate() {
            let mut acc = 0u64;
            for (c, &m) in row.iter().enumerate() {
                if m != 0 && y[c] != 0 {
                    acc = rg.add(acc, rg.mul(m, y[c]));
                }
            }
            x[r] = acc;
        }
        Some(x)
    }

    /// Generators of {x : a x = 0} over the ring.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let rg = self.ring;
        let mut gens = Vec::new();
        for c in 0..self.cols {
            let d = if c < self.dvals.len() {
                self.dvals[c]
            } else {
                rg.k
            };
            if d == 0 {
                continue;
            }
            let scale = rg.pow_p(rg.k - d);
            // kernel gen = scale * (column c of V)
            let g: Vec<u64> = self.v.iter().map(|row| rg.mul(row[c], scale)).collect();
            gens.push(g);
        }
        gens
    }
}
