//! Per-prime H^n engine for n >= 1.  H^n(G, M) is finite, so the rational
//! spans of ker d^n and im d^{n-1} agree and ker d^n is the saturation of
//! the image lattice.  The engine therefore never forms d^n: it streams the
//! columns of d^{n-1} and saturates them at q:
//!
//!   * a mod-q echelon over the generators finds relations Bv = 0 (mod q);
//!     each relation yields the exact integer vector x = Bv/q in ker d^n;
//!   * x is genuinely new iff it fails membership in the current generator
//!     span mod q^K, K = v_q(|G|) + 1.  Membership mod q^K is equivalent to
//!     exact membership here because sat/span is killed by the exponent of
//!     H^n, which divides q^{K-1};
//!   * when no relation yields a new vector, Nakayama's lemma shows the
//!     span is q-saturated, so the mod-q pivot generators X form a local
//!     basis of ker d^n.
//!
//! The q-part of H^n is then the cokernel of the original image columns
//! written in X-coordinates; its local Smith form gives invariants (all
//! strictly below q^K, which certifies exactness), representatives that are
//! exact integer cocycles, and class coordinates for arbitrary cocycles.

use super::{big_mod_u64, image_columns, SpVec};
use crate::error::CochainError;
use crate::glattice::GLattice;
use crate::linalg::zmod::{local_smith, Echelon, Ring};
use num_bigint::BigInt;
use num_traits::Zero;

/// Mod-q echelon over generator columns with expression tracking: every
/// stored row is a known linear combination of the pivot generators.
struct FieldEch {
    pub q: u64,
    width: usize,
    rows: Vec<Vec<u8>>,
    pivot_of_col: Vec<i32>,
    pivcols: Vec<usize>,
    /// t[r][j]: coefficient of pivot generator j in stored row r (mod q)
    t: Vec<Vec<u64>>,
}

enum Push {
    Pivot,
    /// generator = sum of chat[j] * (pivot generator j)  (mod q)
    Relation(Vec<u64>),
}

impl FieldEch {
    fn new(q: u64, width: usize) -> Self {
        assert!(q < 256);
        FieldEch {
            q,
            width,
            rows: Vec::new(),
            pivot_of_col: vec![-1; width],
            pivcols: Vec::new(),
            t: Vec::new(),
        }
    }

    fn inv_mod(&self, a: u64) -> u64 {
        // q prime, q < 256
        let mut x = 1u64;
        for _ in 0..self.q - 2 {
            x = x * a % self.q;
        }
        x
    }

    fn push(&mut self, g: &SpVec) -> Push {
        let q = self.q;
        let mut dense = vec![0u8; self.width];
        for (c, v) in g {
            dense[*c] = ((u64::from(dense[*c]) + big_mod_u64(v, q)) % q) as u8;
        }
        let mut mu = vec![0u64; self.rows.len()];
        let mut start = 0;
        loop {
            let Some(c) = (start..self.width).find(|&c| dense[c] != 0) else {
                // fully reduced: express in pivot-generator coordinates
                let npiv = self.rows.len();
                let mut chat = vec![0u64; npiv];
                for (r, &m) in mu.iter().enumerate() {
                    if m != 0 {
                        for (j, &tv) in self.t[r].iter().enumerate() {
                            chat[j] = (chat[j] + m * tv) % q;
                        }
                    }
                }
                return Push::Relation(chat);
            };
            start = c;
            let r = self.pivot_of_col[c];
            if r >= 0 {
                let r = r as usize;
                let m = u64::from(dense[c]);
                let row = &self.rows[r];
                for j in c..self.width {
                    if row[j] != 0 {
                        let x = (u64::from(dense[j]) + (q - m) * u64::from(row[j])) % q;
                        dense[j] = x as u8;
                    }
                }
                mu[r] = (mu[r] + m) % q;
            } else {
                // install: normalize pivot to 1, record expression
                let s = self.inv_mod(u64::from(dense[c]));
                for x in dense.iter_mut().skip(c) {
                    *x = (u64::from(*x) * s % q) as u8;
                }
                let npiv = self.rows.len();
                let mut trow = vec![0u64; npiv + 1];
                for (r, &m) in mu.iter().enumerate() {
                    if m != 0 {
                        for (j, &tv) in self.t[r].iter().enumerate() {
                            trow[j] = (trow[j] + (q - s) * m % q * tv) % q;
                        }
                    }
                }
                trow[npiv] = s;
                self.pivot_of_col[c] = npiv as i32;
                self.pivcols.push(c);
                self.rows.push(dense);
                self.t.push(trow);
                return Push::Pivot;
            }
        }
    }
}

pub struct PrimePart {
    pub ring: Ring,
    pub q: u64,
    width: usize,
    /// exact integer basis of the q-local cocycle lattice
    x_cols: Vec<SpVec>,
    pivot_rows: Vec<usize>,
    /// inverse mod q^K of S with S[r][c] = X_c[pivot_rows[r]]
    sinv: Vec<Vec<u64>>,
    /// local Smith data of the image written in X-coordinates
    pub dvals: Vec<u32>,
    u: Vec<Vec<u64>>,
    uinv: Vec<Vec<u64>>,
}

fn vp(mut n: u64, q: u64) -> u32 {
    let mut v = 0;
    while n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

fn sp_to_mod(g: &SpVec, ring: Ring) -> Vec<(usize, i64)> {
    g.iter()
        .map(|(c, v)| (*c, big_mod_u64(v, ring.q) as i64))
        .filter(|&(_, v)| v != 0)
        .collect()
}

fn invert_mod(ring: Ring, s: &[Vec<u64>]) -> Vec<Vec<u64>> {
    // Gauss-Jordan; the matrix is invertible mod q by construction
    let n = s.len();
    let mut a: Vec<Vec<u64>> = s.to_vec();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for c in 0..n {
        let r = (c..n)
            .find(|&r| a[r][c] % ring.p != 0)
            .expect("pivot submatrix must be invertible mod q");
        a.swap(c, r);
        inv.swap(c, r);
        let s0 = ring.inv_unit(a[c][c]);
        for j in 0..n {
            a[c][j] = ring.mul(a[c][j], s0);
            inv[c][j] = ring.mul(inv[c][j], s0);
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let m = a[r][c];
                for j in 0..n {
                    let x = ring.mul(m, a[c][j]);
                    a[r][j] = ring.sub(a[r][j], x);
                    let x = ring.mul(m, inv[c][j]);
                    inv[r][j] = ring.sub(inv[r][j], x);
                }
            }
        }
    }
    inv
}

impl PrimePart {
    pub fn compute(lat: &GLattice, n: usize, q: u64) -> Result<PrimePart, CochainError> {
        let width = super::cochain_dim(lat, n);
        let k = vp(lat.group.size() as u64, q) + 1;
        let ring = Ring::new(q, k);
        let mut gens: Vec<SpVec> = image_columns(lat, n)?
            .into_iter()
            .filter(|g| !g.is_empty())
            .collect();
        let m_orig = gens.len();
        let mut echk = Echelon::new(ring, width);
        for g in &gens {
            echk.push_sparse(&sp_to_mod(g, ring));
        }
        // saturation rounds
        let (fe, pivots) = loop {
            let mut fe = FieldEch::new(q, width);
            let mut pivots: Vec<usize> = Vec::new();
            let mut candidates: Vec<SpVec> = Vec::new();
            for (gi, g) in gens.iter().enumerate() {
                match fe.push(g) {
                    Push::Pivot => pivots.push(gi),
                    Push::Relation(chat) => {
                        // x = (g - sum chat_j X_j) / q, exact
                        let mut dense = vec![BigInt::zero(); width];
                        for (c, v) in g {
                            dense[*c] += v;
                        }
                        for (j, &cf) in chat.iter().enumerate() {
                            if cf != 0 {
                                for (c, v) in &gens[pivots[j]] {
                                    dense[*c] -= v * cf;
                                }
                            }
                        }
                        let qb = BigInt::from(q);
                        let mut x: SpVec = Vec::new();
                        for (c, v) in dense.into_iter().enumerate() {
                            if !v.is_zero() {
                                let (quo, rem) = num_integer::Integer::div_rem(&v, &qb);
                                assert!(rem.is_zero(), "relation residual must divide by q");
                                x.push((c, quo));
                            }
                        }
                        if !x.is_empty() {
                            candidates.push(x);
                        }
                    }
                }
            }
            let mut grew = false;
            for x in candidates {
                let xm = sp_to_mod(&x, ring);
                if !echk.reduces_to_zero(&xm) {
                    echk.push_sparse(&xm);
                    gens.push(x);
                    grew = true;
                }
            }
            if !grew {
                break (fe, pivots);
            }
        };
        let rank = pivots.len();
        let x_cols: Vec<SpVec> = pivots.iter().map(|&gi| gens[gi].clone()).collect();
        let pivot_rows = fe.pivcols.clone();
        // S[r][c] = X_c[pivot_rows[r]] mod q^K
        let mut piv_lookup = vec![usize::MAX; width];
        for (r, &p) in pivot_rows.iter().enumerate() {
            piv_lookup[p] = r;
        }
        let mut s = vec![vec![0u64; rank]; rank];
        for (c, col) in x_cols.iter().enumerate() {
            for (row, v) in col {
                let r = piv_lookup[*row];
                if r != usize::MAX {
                    s[r][c] = ring.add(s[r][c], big_mod_u64(v, ring.q));
                }
            }
        }
        let sinv = invert_mod(ring, &s);
        let mut part = PrimePart {
            ring,
            q,
            width,
            x_cols,
            pivot_rows,
            sinv,
            dvals: vec![],
            u: vec![],
            uinv: vec![],
        };
        // image in X-coordinates
        let mut d = vec![vec![0u64; m_orig]; rank];
        for (j, g) in gens.iter().take(m_orig).enumerate() {
            let coords = part
                .coords_sparse(g)
                .ok_or(CochainError::LiftInconsistent)?;
            for (r, &c) in coords.iter().enumerate() {
                d[r][j] = c;
            }
        }
        let ls = local_smith(ring, &d);
        // every diagonal slot must be strictly below q^K: that certifies the
        // quotient is the exact (finite) cohomology group
        if ls.dvals.len() < rank || ls.dvals.iter().any(|&dv| dv >= k) {
            return Err(CochainError::LiftInconsistent);
        }
        part.dvals = ls.dvals.clone();
        part.u = ls.u;
        part.uinv = ls.uinv;
        Ok(part)
    }

    fn coords_dense_mod(&self, z: &[u64]) -> Option<Vec<u64>> {
        let ring = self.ring;
        let rank = self.x_cols.len();
        let mut c = vec![0u64; rank];
        for (i, row) in self.sinv.iter().enumerate() {
            let mut acc = 0u64;
            for (r, &m) in row.iter().enumerate() {
                let zr = z[self.pivot_rows[r]];
                if m != 0 && zr != 0 {
                    acc = ring.add(acc, ring.mul(m, zr));
                }
            }
            c[i] = acc;
        }
        // verify over the full width
        let mut check = vec![0u64; self.width];
        for (i, col) in self.x_cols.iter().enumerate() {
            if c[i] != 0 {
                for (rowi, v) in col {
                    check[*rowi] =
                        ring.add(check[*rowi], ring.mul(c[i], big_mod_u64(v, ring.q)));
                }
            }
        }
        if check != z {
            return None;
        }
        Some(c)
    }

    fn sp_dense_mod(&self, g: &SpVec) -> Vec<u64> {
        let mut z = vec![0u64; self.width];
        for (c, v) in g {
            z[*c] = self.ring.add(z[*c], big_mod_u64(v, self.ring.q));
        }
        z
    }

    fn coords_sparse(&self, g: &SpVec) -> Option<Vec<u64>> {
        self.coords_dense_mod(&self.sp_dense_mod(g))
    }

    /// Coordinates of a cocycle's class in the nontrivial invariant factors.
    pub fn class_coords(&self, z: &[BigInt]) -> Option<Vec<u64>> {
        assert_eq!(z.len(), self.width);
        let ring = self.ring;
        let dense: Vec<u64> = z.iter().map(|v| big_mod_u64(v, ring.q)).collect();
        let c = self.coords_dense_mod(&dense)?;
        let mut out = Vec::new();
        for (i, row) in self.u.iter().enumerate() {
            if self.dvals[i] == 0 {
                continue;
            }
            let mut acc = 0u64;
            for (j, &m) in row.iter().enumerate() {
                if m != 0 && c[j] != 0 {
                    acc = ring.add(acc, ring.mul(m, c[j]));
                }
            }
            out.push(acc % ring.pow_p(self.dvals[i]));
        }
        Some(out)
    }

    /// Orders and exact integer cocycle representatives of the invariant
    /// factors, in the order used by `class_coords`.
    pub fn orders_and_reps(&self) -> (Vec<u64>, Vec<Vec<BigInt>>) {
        let ring = self.ring;
        let mut orders = Vec::new();
        let mut reps = Vec::new();
        for (i, &dv) in self.dvals.iter().enumerate() {
            if dv == 0 {
                continue;
            }
            orders.push(ring.pow_p(dv));
            let mut rep = vec![BigInt::zero(); self.width];
            for (r, col) in self.x_cols.iter().enumerate() {
                // symmetric lift keeps representative entries small
                let m = self.uinv[r][i];
                if m == 0 {
                    continue;
                }
                let lift = if m > ring.q / 2 {
                    BigInt::from(m) - BigInt::from(ring.q)
                } else {
                    BigInt::from(m)
                };
                for (rowi, v) in col {
                    rep[*rowi] += &lift * v;
                }
            }
            reps.push(rep);
        }
        (orders, reps)
    }
}
