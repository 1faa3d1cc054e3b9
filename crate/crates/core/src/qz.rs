//! Cochains valued in Q/Z, represented as residues mod p^N (meaning value/p^N).
//!
//! Degree-2 classes over a p-group are p^N-torsion, so (1/p^N)Z/Z is enough
//! coefficient room: N=2 for coboundary testing of p-torsion cocycles, and
//! N = v_p(|G|) for the full H^2(G, Q/Z).
//!
//! Coboundary solving and H^2 both use the generator-pair reduction: for a
//! 2-cochain f built from (or compared against) genuine cocycle data, the
//! identity d(df) = 0 propagates the cocycle/coboundary conditions from
//! triples (g, h, s) with s a generator to all triples, by induction on the
//! word length of the last argument.  Solutions found on the reduced system
//! are verified on every pair afterwards, so the reduction never weakens the
//! answer.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cochain;
use crate::error::CochainError;
use crate::glattice;
use crate::group::{HeisenbergGroup, SubgroupLabel};
use crate::linalg::zmod::{local_smith, Echelon, Ring};
use crate::linalg::{self, AbGroup, IntMatrix};
use crate::smallgroup::FiniteGroup;

/// A cochain G^degree -> (1/p^nexp)Z/Z, stored as numerator residues mod p^nexp.
#[derive(Clone, Debug, Serialize)]
pub struct QZCochain {
    pub degree: usize,
    pub size: usize,
    pub p: u64,
    pub nexp: u32,
    pub table: Vec<u64>,
}

impl QZCochain {
    pub fn zero(degree: usize, size: usize, p: u64, nexp: u32) -> Self {
        let len = size.pow(degree as u32);
        QZCochain {
            degree,
            size,
            p,
            nexp,
            table: vec![0; len],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.nexp)
    }

    pub fn get2(&self, g: usize, h: usize) -> u64 {
        debug_assert_eq!(self.degree, 2);
        self.table[g * self.size + h]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == 0)
    }

    /// Same Q/Z value, finer denominator: residue r/p^n becomes
    /// (r p^{n'-n})/p^{n'}.
    pub fn rescale(&self, nexp: u32) -> Self {
        assert!(nexp >= self.nexp, "cannot coarsen a cochain");
        let factor = self.p.pow(nexp - self.nexp);
        let q = self.p.pow(nexp);
        QZCochain {
            degree: self.degree,
            size: self.size,
            p: self.p,
            nexp,
            table: self.table.iter().map(|&v| v * factor % q).collect(),
        }
    }

    /// l*f + m*g in additive Q/Z notation (multiplicative f^l g^m).
    pub fn combine(l: u64, f: &QZCochain, m: u64, g: &QZCochain) -> Self {
        assert_eq!(f.size, g.size);
        assert_eq!(f.degree, g.degree);
        assert_eq!(f.nexp, g.nexp);
        assert_eq!(f.p, g.p);
        let q = f.modulus();
        let table = f
            .table
            .iter()
            .zip(&g.table)
            .map(|(&a, &b)| (l % q * (a % q) + m % q * (b % q)) % q)
            .collect();
        QZCochain {
            degree: f.degree,
            size: f.size,
            p: f.p,
            nexp: f.nexp,
            table,
        }
    }

    /// Restriction to a subgroup given by its element indices in the ambient
    /// group; output is indexed by position in `elems`.
    pub fn restrict(&self, elems: &[usize]) -> Self {
        assert_eq!(self.degree, 2);
        let m = elems.len();
        let mut table = Vec::with_capacity(m * m);
        for &g in elems {
            for &h in elems {
                table.push(self.table[g * self.size + h]);
            }
        }
        QZCochain {
            degree: 2,
            size: m,
            p: self.p,
            nexp: self.nexp,
            table,
        }
    }
}

/// The full Heisenberg group as an abstract multiplication table; element
/// indices agree with HeisenbergGroup's lexicographic indices.
pub fn heisenberg_finite(g: &HeisenbergGroup) -> FiniteGroup {
    let full = g.subgroup(SubgroupLabel::Full);
    FiniteGroup::from_subgroup(g, &full).0
}

/// The two explicit 2-cocycles spanning M(G) for G = E_p(p^3):
/// f1 = (u1 s2 + t1 s2(s2-1)/2)/p,  f2 = (t1(t1-1)s2/2 + (t1 s2 + u1) t2)/p.
pub fn make_f1_f2(g: &HeisenbergGroup) -> (QZCochain, QZCochain) {
    let p = i64::from(g.p());
    let n = g.order();
    let mut f1 = QZCochain::zero(2, n, p as u64, 1);
    let mut f2 = QZCochain::zero(2, n, p as u64, 1);
    for i in 0..n {
        let g1 = g.element_at(i);
        let (t1, u1) = (i64::from(g1.t), i64::from(g1.u));
        for j in 0..n {
            let g2 = g.element_at(j);
            let (s2, t2) = (i64::from(g2.s), i64::from(g2.t));
            let v1 = (u1 * s2 + t1 * (s2 * (s2 - 1) / 2)).rem_euclid(p);
            let v2 = (t1 * (t1 - 1) / 2 * s2 + (t1 * s2 + u1) * t2).rem_euclid(p);
            f1.table[i * n + j] = v1 as u64;
            f2.table[i * n + j] = v2 as u64;
        }
    }
    (f1, f2)
}

fn identity_of(gr: &FiniteGroup) -> usize {
    (0..gr.size())
        .find(|&i| gr.mul(i, i) == i)
        .expect("group has an identity")
}

/// Exhaustive when feasible, deterministic sampling otherwise.
fn cocycle_defect(gr: &FiniteGroup, f: &QZCochain, g: usize, h: usize, k: usize) -> u64 {
    let q = f.modulus();
    let n = f.size;
    let a = f.table[h * n + k] + f.table[g * n + gr.mul(h, k)];
    let b = f.table[gr.mul(g, h) * n + k] + f.table[g * n + h];
    (a + 2 * q - b) % q
}

pub fn is_cocycle_qz(gr: &FiniteGroup, f: &QZCochain) -> bool {
    assert_eq!(f.size, gr.size());
    assert_eq!(f.degree, 2);
    let n = gr.size();
    if n.pow(3) <= 8_000_000 {
        for g in 0..n {
            for h in 0..n {
                for k in 0..n {
                    if cocycle_defect(gr, f, g, h, k) != 0 {
                        return false;
                    }
                }
            }
        }
        true
    } else {
        // deterministic LCG sample
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..20_000 {
            let (g, h, k) = (next() % n, next() % n, next() % n);
            if cocycle_defect(gr, f, g, h, k) != 0 {
                return false;
            }
        }
        true
    }
}

/// Decide whether f is a 2-coboundary on gr, over (1/p^nexp)Z/Z.  Returns the
/// potential phi with d(phi) = f, or None when the class of f is nonzero.
pub fn coboundary_test_qz(
    gr: &FiniteGroup,
    f: &QZCochain,
    nexp: u32,
) -> Result<Option<QZCochain>, CochainError> {
    assert_eq!(f.size, gr.size());
    if !is_cocycle_qz(gr, f) {
        return Err(CochainError::NotACocycle);
    }
    let f = f.rescale(nexp);
    let n = gr.size();
    let ring = Ring::new(f.p, nexp);
    let q = ring.q;
    let e = identity_of(gr);
    let gens: Vec<usize> = if gr.generators().is_empty() {
        vec![e]
    } else {
        gr.generators().to_vec()
    };
    // unknowns phi(0..n), plus a homogenizing coordinate carrying -f
    let width = n + 1;
    let mut ech = Echelon::new(ring, width);
    for g in 0..n {
        for &s in &gens {
            let rhs = f.get2(g, s) as i64;
            ech.push_sparse(&[(g, 1), (s, 1), (gr.mul(g, s), -1), (n, -rhs)]);
        }
    }
    let ls = local_smith(ring, &ech.to_matrix());
    let mut phi: Option<Vec<u64>> = None;
    for gen in ls.kernel() {
        if gen[n] % f.p != 0 {
            let scale = ring.inv_unit(gen[n]);
            phi = Some((0..n).map(|i| ring.mul(gen[i], scale)).collect());
            break;
        }
    }
    let Some(phi) = phi else {
        return Ok(None);
    };
    // verify on every pair; failure means f was not a cocycle after all
    for g in 0..n {
        for h in 0..n {
            let lhs = (phi[g] + phi[h] + q - phi[gr.mul(g, h)]) % q;
            if lhs != f.get2(g, h) {
                return Err(CochainError::NotACocycle);
            }
        }
    }
    Ok(Some(QZCochain {
        degree: 1,
        size: n,
        p: f.p,
        nexp,
        table: phi,
    }))
}

/// BFS decomposition of every element as (parent, generator index); the
/// identity is the root.
struct WordTree {
    e: usize,
    gens: Vec<usize>,
    /// element -> (parent element, generator index), None for the identity
    parent: Vec<Option<(usize, usize)>>,
    /// BFS order, identity first
    order: Vec<usize>,
}

fn word_tree(gr: &FiniteGroup) -> WordTree {
    let n = gr.size();
    let e = identity_of(gr);
    let gens: Vec<usize> = if gr.generators().is_empty() {
        vec![e]
    } else {
        gr.generators().to_vec()
    };
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = vec![e];
    seen[e] = true;
    let mut head = 0;
    while head < order.len() {
        let y = order[head];
        head += 1;
        for (si, &s) in gens.iter().enumerate() {
            let x = gr.mul(y, s);
            if !seen[x] {
                seen[x] = true;
                parent[x] = Some((y, si));
                order.push(x);
            }
        }
    }
    assert!(
        order.len() == n,
        "listed generators do not generate the group"
    );
    WordTree {
        e,
        gens,
        parent,
        order,
    }
}

/// Expand a tail vector (values at (g, generator) pairs) into the full
/// 2-cochain it parametrizes, via f(g, ys) = f(g, y) + phi(gy, s) - phi(y, s).
fn expand_tails(gr: &FiniteGroup, wt: &WordTree, tails: &[u64], ring: Ring) -> Vec<u64> {
    let n = gr.size();
    let ns = wt.gens.len();
    let mut table = vec![0u64; n * n];
    let base = tails[wt.e * ns]; // phi(e, s0) = f(., e)
    for g in 0..n {
        table[g * n + wt.e] = base;
        for &x in &wt.order[1..] {
            let (y, si) = wt.parent[x].unwrap();
            let gy = gr.mul(g, y);
            let v = ring.add(
                ring.sub(table[g * n + y], tails[y * ns + si]),
                tails[gy * ns + si],
            );
            table[g * n + x] = v;
        }
    }
    table
}

/// Sparse linear expression over tail unknowns for f(g, x), built in BFS order.
fn tail_exprs_for(
    gr: &FiniteGroup,
    wt: &WordTree,
    g: usize,
) -> Vec<Vec<(usize, i64)>> {
    let n = gr.size();
    let ns = wt.gens.len();
    let mut exprs: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    exprs[wt.e] = vec![(wt.e * ns, 1)];
    for &x in &wt.order[1..] {
        let (y, si) = wt.parent[x].unwrap();
        let gy = gr.mul(g, y);
        let mut ex = exprs[y].clone();
        ex.push((gy * ns + si, 1));
        ex.push((y * ns + si, -1));
        ex.sort_unstable_by_key(|&(c, _)| c);
        ex.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 += a.1;
                true
            } else {
                false
            }
        });
        ex.retain(|&(_, v)| v != 0);
        exprs[x] = ex;
    }
    exprs
}

/// H^2 of a p-group with Q/Z coefficients (the Schur multiplier dual):
/// H^2(G, Z/p^N) with N = v_p(|G|), modulo the connecting images of
/// Hom(G, Q/Z) under (1/p^N)Z/Z -> Q/Z -> Q/Z.
pub struct QzCohom {
    pub structure: AbGroup,
    pub orders: Vec<u64>,
    pub reps: Vec<QZCochain>,
}

fn prime_power_base(n: usize) -> (u64, u32) {
    assert!(n >= 1);
    if n == 1 {
        return (2, 0);
    }
    let mut p = 2u64;
    while (n as u64) % p != 0 {
        p += 1;
    }
    let mut m = n as u64;
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    assert!(m == 1, "group order must be a prime power");
    (p, k)
}

pub fn h2_qz(gr: &FiniteGroup) -> Result<QzCohom, CochainError> {
    let n = gr.size();
    let (p, nexp) = prime_power_base(n);
    if n == 1 {
        return Ok(QzCohom {
            structure: AbGroup::trivial(),
            orders: vec![],
            reps: vec![],
        });
    }
    let ring = Ring::new(p, nexp);
    let wt = word_tree(gr);
    let ns = wt.gens.len();
    let width = n * ns;
    if width * n > cochain::dim_cap() {
        return Err(CochainError::BudgetExceeded {
            dim: width * n,
            cap: cochain::dim_cap(),
        });
    }

    // cocycle constraints D(g, h, s) = 0 on the tail parametrization
    let mut ech = Echelon::new(ring, width);
    for g in 0..n {
        let exprs = tail_exprs_for(gr, &wt, g);
        for h in 0..n {
            let hsrows: Vec<(usize, &Vec<(usize, i64)>)> = wt
                .gens
                .iter()
                .enumerate()
                .map(|(si, &s)| (si, &exprs[gr.mul(h, s)]))
                .collect();
            for (si, hs_expr) in hsrows {
                let gh = gr.mul(g, h);
                let mut row: Vec<(usize, i64)> = exprs[h].clone();
                row.push((gh * ns + si, 1));
                row.push((h * ns + si, -1));
                for &(c, v) in hs_expr.iter() {
                    row.push((c, -v));
                }
                ech.push_sparse(&row);
            }
        }
    }
    let compressed = if ech.row_count() == 0 {
        // no constraints at all; a zero row keeps the transform sizes right
        vec![vec![0u64; width]]
    } else {
        ech.to_matrix()
    };
    let ls = local_smith(ring, &compressed);

    // kernel coordinates: x = V * diag-solution y, p^{d_c} y_c = 0
    let dval = |c: usize| -> u32 {
        if c < ls.dvals.len() {
            ls.dvals[c]
        } else {
            ring.k
        }
    };
    let kernel_coords: Vec<usize> = (0..width).filter(|&c| dval(c) > 0).collect();

    // relation columns in tail space
    let mut relations: Vec<Vec<u64>> = Vec::new();
    // coboundaries d(psi) for psi running over the standard basis of C^1
    for w in 0..n {
        let mut col = vec![0u64; width];
        for g in 0..n {
            for (si, &s) in wt.gens.iter().enumerate() {
                let mut v: i64 = 0;
                if s == w {
                    v += 1;
                }
                if g == w {
                    v += 1;
                }
                if gr.mul(g, s) == w {
                    v -= 1;
                }
                col[g * ns + si] = ring.reduce_i64(v);
            }
        }
        relations.push(col);
    }
    // reparametrization kernel: constant tails per generator map to the zero cochain
    for si in 1..ns {
        let mut col = vec![0u64; width];
        for g in 0..n {
            col[g * ns + si] = 1;
        }
        relations.push(col);
    }
    // connecting images of Hom(G, Q/Z)
    for chi in homs_mod(gr, &wt, ring) {
        let qn = ring.q;
        let mut col = vec![0u64; width];
        for g in 0..n {
            for (si, &s) in wt.gens.iter().enumerate() {
                let num = chi[g] as i64 + chi[s] as i64 - chi[gr.mul(g, s)] as i64;
                assert!(num.rem_euclid(qn as i64) == 0, "not a homomorphism");
                col[g * ns + si] = ring.reduce_i64(num.div_euclid(qn as i64));
            }
        }
        relations.push(col);
    }

    // coordinates of each relation in the kernel presentation
    let mut pres = IntMatrix::zero(kernel_coords.len(), kernel_coords.len() + relations.len());
    for (r, &c) in kernel_coords.iter().enumerate() {
        pres.set(r, r, BigInt::from(ring.pow_p(dval(c))));
    }
    for (j, rel) in relations.iter().enumerate() {
        // y = Vinv * rel
        for (r, &c) in kernel_coords.iter().enumerate() {
            let mut acc = 0u64;
            for (x, &m) in ls.vinv[c].iter().enumerate() {
                if m != 0 && rel[x] != 0 {
                    acc = ring.add(acc, ring.mul(m, rel[x]));
                }
            }
            let shift = ring.pow_p(ring.k - dval(c));
            assert!(acc % shift == 0, "relation is not a cocycle");
            pres.set(
                r,
                kernel_coords.len() + j,
                BigInt::from(acc / shift % ring.pow_p(dval(c))),
            );
        }
        // sanity: components at unit-pivot coordinates must vanish
    }

    let (diag, u, _v) = linalg::snf(&pres);
    let k = kernel_coords.len();
    let uinv = invert_unimodular(&u);
    let mut orders: Vec<u64> = Vec::new();
    let mut reps: Vec<QZCochain> = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        let dv = u64::try_from(d.abs()).expect("invariant factor fits u64");
        if dv <= 1 {
            continue;
        }
        orders.push(dv);
        // generator i of coker(pres) = column i of u^{-1}, in y-coordinates
        let mut tails = vec![0u64; width];
        for r in 0..k {
            let yc = uinv.get(r, i);
            let yv = big_mod(&yc, ring.pow_p(dval(kernel_coords[r])));
            if yv == 0 {
                continue;
            }
            let lift = ring.mul(yv, ring.pow_p(ring.k - dval(kernel_coords[r])));
            // x += lift * (column kernel_coords[r] of V)
            for (x, t) in tails.iter_mut().enumerate() {
                let m = ls.v[x][kernel_coords[r]];
                if m != 0 {
                    *t = ring.add(*t, ring.mul(m, lift));
                }
            }
        }
        let table = expand_tails(gr, &wt, &tails, ring);
        reps.push(QZCochain {
            degree: 2,
            size: n,
            p,
            nexp,
            table,
        });
    }
    let structure = AbGroup::from_orders(&orders);
    Ok(QzCohom {
        structure,
        orders,
        reps,
    })
}

/// Generators of Hom(G, (1/p^N)Z/Z) as residue tables mod p^N.
fn homs_mod(gr: &FiniteGroup, wt: &WordTree, ring: Ring) -> Vec<Vec<u64>> {
    let n = gr.size();
    let mut ech = Echelon::new(ring, n);
    for g in 0..n {
        for &s in &wt.gens {
            ech.push_sparse(&[(g, 1), (s, 1), (gr.mul(g, s), -1)]);
        }
    }
    let ls = local_smith(ring, &ech.to_matrix());
    ls.kernel().into_iter().filter(|v| v.iter().any(|&x| x != 0)).collect()
}

fn invert_unimodular(u: &IntMatrix) -> IntMatrix {
    let k = u.rows();
    let mut inv = IntMatrix::zero(k, k);
    for j in 0..k {
        let mut e = vec![BigInt::zero(); k];
        e[j] = BigInt::from(1);
        let col = linalg::solve(u, &e).expect("unimodular matrix is invertible");
        for (r, v) in col.into_iter().enumerate() {
            inv.set(r, j, v);
        }
    }
    inv
}

fn big_mod(v: &BigInt, q: u64) -> u64 {
    let m = v % BigInt::from(q);
    let m = if m.is_negative() { m + BigInt::from(q) } else { m };
    u64::try_from(&m).unwrap()
}

/// Connecting map H^2(G, Q/Z) -> H^3(G, Z): lift the numerator table to a
/// rational cochain, apply d, divide by p^N.  The result is an integer-valued
/// 3-cocycle, indexed like the degree-3 cochains of the trivial lattice.
pub fn connecting_qz_to_h3z(
    gr: &FiniteGroup,
    f: &QZCochain,
) -> Result<Vec<BigInt>, CochainError> {
    assert_eq!(f.degree, 2);
    assert_eq!(f.size, gr.size());
    let n = gr.size();
    let q = f.modulus() as i64;
    let mut out = Vec::with_capacity(n * n * n);
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                let num = f.table[h * n + k] as i64 - f.table[gr.mul(g, h) * n + k] as i64
                    + f.table[g * n + gr.mul(h, k)] as i64
                    - f.table[g * n + h] as i64;
                if num.rem_euclid(q) != 0 {
                    return Err(CochainError::NotACocycle);
                }
                out.push(BigInt::from(num.div_euclid(q)));
            }
        }
    }
    Ok(out)
}

/// Labels integer 3-cocycles of G = E_p(p^3) by the unique (l, m) with
/// c ~ delta(f1^l f2^m); the coboundary test runs mod p^4, which decides
/// integral solvability because H^3 is killed by |G| = p^3.
pub struct H3Labeler {
    pub p: u64,
    size: usize,
    ring: Ring,
    ech: Echelon,
    tau1: Vec<BigInt>,
    tau2: Vec<BigInt>,
}

impl H3Labeler {
    pub fn new(g: &HeisenbergGroup) -> Result<Self, CochainError> {
        let gr = heisenberg_finite(g);
        let p = u64::from(g.p());
        let n = gr.size();
        let triv = glattice::trivial_lattice(gr.clone());
        // columns of d^2: C^2(G,Z) -> C^3(G,Z)
        let cols = cochain::image_columns(&triv, 3)?;
        let ring = Ring::new(p, 4);
        let mut ech = Echelon::new(ring, n * n * n);
        for col in cols {
            let entries: Vec<(usize, i64)> = col
                .iter()
                .map(|(r, v)| (*r, i64::try_from(v).expect("small boundary entry")))
                .collect();
            ech.push_sparse(&entries);
        }
        let (f1, f2) = make_f1_f2(g);
        let tau1 = connecting_qz_to_h3z(&gr, &f1)?;
        let tau2 = connecting_qz_to_h3z(&gr, &f2)?;
        Ok(H3Labeler {
            p,
            size: n,
            ring,
            ech,
            tau1,
            tau2,
        })
    }

    /// The unique (l, m) with c - l*tau1 - m*tau2 an integral coboundary.
    pub fn label(&self, c: &[BigInt]) -> Result<(u64, u64), CochainError> {
        assert_eq!(c.len(), self.size.pow(3));
        let mut found: Option<(u64, u64)> = None;
        for l in 0..self.p {
            for m in 0..self.p {
                let li = BigInt::from(l);
                let mi = BigInt::from(m);
                let mut entries: Vec<(usize, i64)> = Vec::new();
                for i in 0..c.len() {
                    let v = &c[i] - &li * &self.tau1[i] - &mi * &self.tau2[i];
                    if !v.is_zero() {
                        let vv = big_mod(&v, self.ring.q) as i64;
                        entries.push((i, vv));
                    }
                }
                if self.ech.reduces_to_zero(&entries) {
                    if let Some(prev) = found {
                        panic!(
                            "3-cocycle matches two labels {:?} and {:?}",
                            prev,
                            (l, m)
                        );
                    }
                    found = Some((l, m));
                }
            }
        }
        found.ok_or(CochainError::NotInSpan)
    }
}

/// Lexicographically smallest nonzero element of the line through (l, m) in
/// (Z/p)^2, used as the canonical label of the subgroup <(l, m)>.
pub fn span_label(p: u64, l: u64, m: u64) -> (u64, u64) {
    let (l, m) = (l % p, m % p);
    if l == 0 && m == 0 {
        return (0, 0);
    }
    let mut best = (p, p);
    for k in 1..p {
        let cand = (k * l % p, k * m % p);
        if cand < best {
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::PrimeParam;

    fn heis(p: u32) -> HeisenbergGroup {
        HeisenbergGroup::new(PrimeParam::new(p).unwrap())
    }

    fn invariants(q: &QzCohom) -> Vec<u64> {
        q.structure.invariants.clone()
    }

    #[test]
    fn f1_f2_golden_values() {
        let g = heis(3);
        let (f1, f2) = make_f1_f2(&g);
        let idx = |e: crate::group::GroupElement| g.index_of(e);
        let (a, b, c) = (idx(g.gen_a()), idx(g.gen_b()), idx(g.gen_c()));
        assert_eq!(f1.get2(c, a), 1);
        assert_eq!(f2.get2(c, b), 1);
        assert_eq!(f1.get2(a, b), 0);
        assert_eq!(f2.get2(a, b), 0);
        assert_eq!(f1.get2(a, c), 0);
        assert_eq!(f2.get2(a, c), 0);
        assert_eq!(f1.get2(b, c), 0);
        assert_eq!(f1.get2(c, b), 0);
        assert_eq!(f2.get2(b, a), 0);
    }

    #[test]
    fn f1_f2_are_cocycles() {
        for p in [3u32, 5, 7] {
            let g = heis(p);
            let gr = heisenberg_finite(&g);
            let (f1, f2) = make_f1_f2(&g);
            assert!(is_cocycle_qz(&gr, &f1), "f1 at p={p}");
            assert!(is_cocycle_qz(&gr, &f2), "f2 at p={p}");
            assert!(
                is_cocycle_qz(&gr, &QZCochain::combine(2, &f1, p as u64 - 1, &f2)),
                "combination at p={p}"
            );
        }
    }

    #[test]
    fn restrictions_to_k0_match_closed_forms() {
        // on <a, c> (t = 0): f1 = u1 s2 / p and f2 = 0
        let g = heis(3);
        let p = 3i64;
        let (f1, f2) = make_f1_f2(&g);
        let k0 = g.subgroup(SubgroupLabel::K(0));
        let (_, map) = FiniteGroup::from_subgroup(&g, &k0);
        let r1 = f1.restrict(&map);
        let r2 = f2.restrict(&map);
        for (i, &gi) in map.iter().enumerate() {
            let e1 = g.element_at(gi);
            for (j, &gj) in map.iter().enumerate() {
                let e2 = g.element_at(gj);
                assert_eq!(e1.t, 0);
                let expect = (i64::from(e1.u) * i64::from(e2.s)).rem_euclid(p) as u64;
                assert_eq!(r1.get2(i, j), expect);
                assert_eq!(r2.get2(i, j), 0);
            }
        }
    }

    #[test]
    fn coboundary_test_on_k0() {
        let g = heis(3);
        let (f1, f2) = make_f1_f2(&g);
        let k0 = g.subgroup(SubgroupLabel::K(0));
        let (k0g, map) = FiniteGroup::from_subgroup(&g, &k0);
        let r2 = f2.restrict(&map);
        let phi = coboundary_test_qz(&k0g, &r2, 2).unwrap();
        assert!(phi.is_some(), "f2 restricted to K0 is a coboundary");
        let r1 = f1.restrict(&map);
        assert!(
            coboundary_test_qz(&k0g, &r1, 2).unwrap().is_none(),
            "f1 restricted to K0 is not a coboundary"
        );
        // zero cochain has a potential with zero coboundary
        let z = QZCochain::zero(2, k0g.size(), 3, 1);
        let phi = coboundary_test_qz(&k0g, &z, 2).unwrap().unwrap();
        let q = phi.modulus();
        for g1 in 0..k0g.size() {
            for g2 in 0..k0g.size() {
                let d = (phi.table[g1] + phi.table[g2] + q - phi.table[k0g.mul(g1, g2)]) % q;
                assert_eq!(d, 0);
            }
        }
    }

    #[test]
    fn potentials_actually_satisfy_d_phi_eq_f() {
        let g = heis(3);
        let (f1, f2) = make_f1_f2(&g);
        let f = QZCochain::combine(1, &f1, 2, &f2);
        for label in [SubgroupLabel::H(1), SubgroupLabel::Z, SubgroupLabel::Triv] {
            let h = g.subgroup(label);
            let (hg, map) = FiniteGroup::from_subgroup(&g, &h);
            let r = f.restrict(&map);
            let phi = coboundary_test_qz(&hg, &r, 2)
                .unwrap()
                .expect("restriction to a cyclic subgroup is a coboundary");
            let rr = r.rescale(2);
            let q = phi.modulus();
            for x in 0..hg.size() {
                for y in 0..hg.size() {
                    let d = (phi.table[x] + phi.table[y] + q - phi.table[hg.mul(x, y)]) % q;
                    assert_eq!(d, rr.get2(x, y));
                }
            }
        }
    }

    #[test]
    fn combination_independence_on_full_group() {
        for p in [3u32, 5] {
            let g = heis(p);
            let gr = heisenberg_finite(&g);
            let (f1, f2) = make_f1_f2(&g);
            for l in 0..u64::from(p) {
                for m in 0..u64::from(p) {
                    let f = QZCochain::combine(l, &f1, m, &f2);
                    let res = coboundary_test_qz(&gr, &f, 2).unwrap();
                    assert_eq!(
                        res.is_some(),
                        (l, m) == (0, 0),
                        "p={p} combination ({l},{m})"
                    );
                }
            }
        }
    }

    #[test]
    fn coboundary_results_stable_in_n() {
        let g = heis(3);
        let (f1, f2) = make_f1_f2(&g);
        let gr = heisenberg_finite(&g);
        let k1 = g.subgroup(SubgroupLabel::K(1));
        let (k1g, map) = FiniteGroup::from_subgroup(&g, &k1);
        for l in 0..3u64 {
            for m in 0..3u64 {
                let f = QZCochain::combine(l, &f1, m, &f2);
                let full2 = coboundary_test_qz(&gr, &f, 2).unwrap().is_some();
                let full3 = coboundary_test_qz(&gr, &f, 3).unwrap().is_some();
                assert_eq!(full2, full3, "full group ({l},{m})");
                let r = f.restrict(&map);
                let sub2 = coboundary_test_qz(&k1g, &r, 2).unwrap().is_some();
                let sub3 = coboundary_test_qz(&k1g, &r, 3).unwrap().is_some();
                assert_eq!(sub2, sub3, "K1 ({l},{m})");
            }
        }
    }

    #[test]
    fn rejects_non_cocycles() {
        let g = heis(3);
        let gr = heisenberg_finite(&g);
        let mut f = QZCochain::zero(2, gr.size(), 3, 1);
        f.table[5 * gr.size() + 7] = 1; // arbitrary single entry breaks the identity
        assert!(matches!(
            coboundary_test_qz(&gr, &f, 2),
            Err(CochainError::NotACocycle)
        ));
    }

    #[test]
    fn schur_multiplier_heisenberg_p3() {
        let g = heis(3);
        let h2 = h2_qz(&heisenberg_finite(&g)).unwrap();
        assert_eq!(invariants(&h2), vec![3, 3]);
        // representatives are cocycles and not coboundaries
        let gr = heisenberg_finite(&g);
        for rep in &h2.reps {
            assert!(is_cocycle_qz(&gr, rep));
            assert!(coboundary_test_qz(&gr, rep, rep.nexp).unwrap().is_none());
        }
    }

    #[test]
    fn schur_multiplier_heisenberg_p5() {
        let g = heis(5);
        let h2 = h2_qz(&heisenberg_finite(&g)).unwrap();
        assert_eq!(invariants(&h2), vec![5, 5]);
    }

    #[test]
    fn schur_multiplier_cyclic_is_trivial() {
        for p in [2usize, 3, 5, 7, 11, 13] {
            let h2 = h2_qz(&FiniteGroup::cyclic(p)).unwrap();
            assert!(h2.structure.is_trivial(), "C_{p}");
        }
        // prime powers too
        for n in [4usize, 8, 9, 27] {
            let h2 = h2_qz(&FiniteGroup::cyclic(n)).unwrap();
            assert!(h2.structure.is_trivial(), "C_{n}");
        }
    }

    #[test]
    fn schur_multiplier_elementary_abelian_rank_two() {
        for p in [2usize, 3, 5, 7] {
            let cp = FiniteGroup::cyclic(p);
            let g2 = FiniteGroup::direct_product(&cp, &cp);
            let h2 = h2_qz(&g2).unwrap();
            assert_eq!(invariants(&h2), vec![p as u64], "(C_{p})^2");
        }
    }

    #[test]
    fn connecting_and_h3_labels() {
        let g = heis(3);
        let gr = heisenberg_finite(&g);
        let (f1, f2) = make_f1_f2(&g);
        let zero = QZCochain::zero(2, gr.size(), 3, 1);
        let d0 = connecting_qz_to_h3z(&gr, &zero).unwrap();
        assert!(d0.iter().all(|v| v.is_zero()));

        let labeler = H3Labeler::new(&g).unwrap();
        assert_eq!(labeler.label(&d0).unwrap(), (0, 0));
        for l in 0..3u64 {
            for m in 0..3u64 {
                let f = QZCochain::combine(l, &f1, m, &f2);
                let tau = connecting_qz_to_h3z(&gr, &f).unwrap();
                assert_eq!(labeler.label(&tau).unwrap(), (l, m), "combination ({l},{m})");
            }
        }
        // p * delta(f1) is a coboundary
        let tau1 = connecting_qz_to_h3z(&gr, &f1).unwrap();
        let scaled: Vec<BigInt> = tau1.iter().map(|v| v * 3).collect();
        assert_eq!(labeler.label(&scaled).unwrap(), (0, 0));
    }

    #[test]
    fn span_label_canonicalization() {
        assert_eq!(span_label(3, 0, 0), (0, 0));
        assert_eq!(span_label(3, 0, 2), (0, 1));
        assert_eq!(span_label(3, 2, 1), (1, 2));
        assert_eq!(span_label(3, 1, 2), (1, 2));
        assert_eq!(span_label(5, 4, 2), (1, 3));
    }
}
