use crate::error::LatticeError;
use crate::group::{GroupElement, HeisenbergGroup, Subgroup};
use crate::linalg::{self, IntMatrix, LatticeBasis};
use crate::smallgroup::FiniteGroup;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

pub type SparseRow = Vec<(usize, i64)>;

/// Integer matrix in sparse row form; row i lists (column, coefficient).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMat {
    pub rows: Vec<SparseRow>,
    pub cols: usize,
}

impl SparseMat {
    pub fn identity(n: usize) -> Self {
        SparseMat {
            rows: (0..n).map(|i| vec![(i, 1)]).collect(),
            cols: n,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, c)| c * x[j]).sum())
            .collect()
    }

    pub fn apply_big(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = BigInt::zero();
                for &(j, c) in row {
                    acc += &x[j] * c;
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.cols, other.nrows());
        let mut rows = Vec::with_capacity(self.nrows());
        let mut acc = vec![0i64; other.cols];
        for row in &self.rows {
            let mut touched: Vec<usize> = Vec::new();
            for &(k, c) in row {
                for &(j, d) in &other.rows[k] {
                    if acc[j] == 0 {
                        touched.push(j);
                    }
                    acc[j] += c * d;
                }
            }
            touched.sort_unstable();
            let mut out: SparseRow = Vec::with_capacity(touched.len());
            for j in touched {
                if acc[j] != 0 {
                    out.push((j, acc[j]));
                }
                acc[j] = 0;
            }
            rows.push(out);
        }
        SparseMat {
            rows,
            cols: other.cols,
        }
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.nrows(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                m.set(i, j, BigInt::from(c));
            }
        }
        m
    }

    pub fn from_int_matrix(m: &IntMatrix) -> SparseMat {
        let mut rows = vec![SparseRow::new(); m.rows()];
        for (r, c, v) in m.entries() {
            rows[r].push((c, i64::try_from(v).expect("entry fits i64")));
        }
        SparseMat {
            rows,
            cols: m.cols(),
        }
    }
}

/// Orbit provenance for coset-style lattices, used by the iso search.
#[derive(Debug, Clone)]
pub struct OrbitInfo {
    /// index of the reference basis vector
    pub base: usize,
    /// movers[j] * (coset of base) = coset of basis j, as group element indices
    pub movers: Vec<usize>,
    /// stabilizer of the base coset, as element indices
    pub stab: Vec<usize>,
}

/// Left coset space G/H with deterministic representatives.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    pub reps: Vec<GroupElement>,
    /// element index -> coset position
    pub index_map: Vec<usize>,
}

/// A G-lattice: free Z-module with an action of a finite (table) group by
/// unimodular matrices, one matrix stored per group element.
#[derive(Debug, Clone)]
pub struct GLattice {
    pub group: FiniteGroup,
    pub rank: usize,
    pub labels: Vec<String>,
    act: Vec<SparseMat>,
    pub orbit: Option<OrbitInfo>,
}

impl GLattice {
    /// Builds the full action table from generator matrices and verifies the
    /// homomorphism property exhaustively on (element, generator) pairs.
    pub fn from_generator_matrices(
        group: FiniteGroup,
        gen_mats: Vec<(usize, SparseMat)>,
        labels: Vec<String>,
        orbit: Option<OrbitInfo>,
    ) -> Result<Self, LatticeError> {
        let rank = labels.len();
        let n = group.size();
        let mut act: Vec<Option<SparseMat>> = vec![None; n];
        act[0] = Some(SparseMat::identity(rank));
        for (g, m) in &gen_mats {
            if m.nrows() != rank || m.cols != rank {
                return Err(LatticeError::NotAnAction);
            }
            if *g == 0 {
                continue;
            }
            act[*g] = Some(m.clone());
        }
        // BFS closure; seed with every element whose matrix is already known
        let mut frontier: Vec<usize> =
            (0..n).filter(|&g| act[g].is_some()).collect();
        while let Some(x) = frontier.pop() {
            for &(s, ref ms) in &gen_mats {
                let y = group.mul(x, s);
                if act[y].is_none() {
                    let ax = act[x].as_ref().unwrap();
                    act[y] = Some(ax.mul(ms));
                    frontier.push(y);
                }
            }
        }
        if act.iter().any(|a| a.is_none()) {
            return Err(LatticeError::NotAnAction);
        }
        let act: Vec<SparseMat> = act.into_iter().map(|a| a.unwrap()).collect();
        // exhaustive check act(g) * act(s) == act(gs) for generators
        for g in 0..n {
            for &(s, _) in &gen_mats {
                if act[g].mul(&act[s]) != act[group.mul(g, s)] {
                    return Err(LatticeError::NotAnAction);
                }
            }
            // unimodularity certificate: act(g) act(g^-1) = id
            if act[g].mul(&act[group.inv(g)]) != SparseMat::identity(rank) {
                return Err(LatticeError::NotAnAction);
            }
        }
        Ok(GLattice {
            group,
            rank,
            labels,
            act,
            orbit,
        })
    }

    pub fn action(&self, g: usize) -> &SparseMat {
        &self.act[g]
    }

    /// For a transitive permutation action, records orbit provenance with
    /// basis 0 as the base point.  No-op if the action is not of that shape.
    pub fn compute_perm_orbit(&mut self) {
        let n = self.group.size();
        let mut perms: Vec<Vec<usize>> = Vec::with_capacity(n);
        for a in &self.act {
            let mut perm = vec![usize::MAX; self.rank];
            for (i, row) in a.rows.iter().enumerate() {
                for &(j, c) in row {
                    if c != 1 {
                        return;
                    }
                    perm[j] = i;
                }
            }
            if perm.iter().any(|&x| x == usize::MAX) {
                return;
            }
            perms.push(perm);
        }
        let mut movers = vec![usize::MAX; self.rank];
        let mut stab = Vec::new();
        for g in 0..n {
            let img = perms[g][0];
            if img == 0 {
                stab.push(g);
            }
            if movers[img] == usize::MAX {
                movers[img] = g;
            }
        }
        if movers.iter().any(|&x| x == usize::MAX) {
            return; // not transitive
        }
        self.orbit = Some(OrbitInfo {
            base: 0,
            movers,
            stab,
        });
    }

    /// Restricts a Heisenberg-based lattice (element indices agree with the
    /// ambient group's lexicographic indices) to a canonical subgroup.
    pub fn restrict(
        &self,
        g: &HeisenbergGroup,
        h: &Subgroup,
    ) -> Result<GLattice, LatticeError> {
        let elems: Vec<usize> = h.elements.iter().map(|&e| g.index_of(e)).collect();
        let gens: Vec<usize> = h.generators.iter().map(|&e| g.index_of(e)).collect();
        self.restrict_indices(&elems, &gens)
    }

    /// Restricts the action to a subgroup given by its sorted element indices.
    pub fn restrict_indices(
        &self,
        elems: &[usize],
        gens: &[usize],
    ) -> Result<GLattice, LatticeError> {
        let pos = |e: usize| elems.binary_search(&e).map_err(|_| LatticeError::NotSubgroup);
        if pos(0).is_err() {
            return Err(LatticeError::NotSubgroup);
        }
        let n = elems.len();
        let mut mul = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                mul[i][j] = pos(self.group.mul(elems[i], elems[j]))?;
            }
        }
        let gen_pos: Result<Vec<usize>, _> = gens.iter().map(|&g| pos(g)).collect();
        let gen_pos = gen_pos?;
        let names = elems.iter().map(|&e| self.group.name(e).to_string()).collect();
        let sub = FiniteGroup::from_table(mul, gen_pos.clone(), names)
            .map_err(|_| LatticeError::NotSubgroup)?;
        let gen_mats = gen_pos
            .iter()
            .zip(gens.iter())
            .map(|(&gp, &g)| (gp, self.act[g].clone()))
            .collect();
        GLattice::from_generator_matrices(sub, gen_mats, self.labels.clone(), None)
    }

    /// Fixed sublattice M^N for a normal subgroup N (element indices), with
    /// the induced action of the quotient group.  Returns the lattice, the
    /// inclusion map into M, and the projection element-index map G -> G/N.
    pub fn fixed_sublattice(
        &self,
        normal: &[usize],
    ) -> Result<(GLattice, LatticeMap, Vec<usize>), LatticeError> {
        // normality check happens in FiniteGroup::quotient
        let (quot, proj) = self
            .group
            .quotient(normal)
            .map_err(|_| LatticeError::NotNormal)?;
        // stack (act(n) - id) for the elements of N
        let mut stacked = IntMatrix::zero(normal.len() * self.rank, self.rank);
        for (bi, &nel) in normal.iter().enumerate() {
            let a = &self.act[nel];
            for (i, row) in a.rows.iter().enumerate() {
                for &(j, c) in row {
                    let cur = stacked.get(bi * self.rank + i, j);
                    stacked.set(bi * self.rank + i, j, cur + BigInt::from(c));
                }
                let cur = stacked.get(bi * self.rank + i, i);
                stacked.set(bi * self.rank + i, i, cur - BigInt::one());
            }
        }
        let fixed: LatticeBasis = linalg::kernel_lattice(&stacked);
        let k = fixed.rank();
        // induced action of quotient representatives on the fixed basis
        let mut reps = vec![usize::MAX; quot.size()];
        for g in (0..self.group.size()).rev() {
            reps[proj[g]] = g; // last write wins; any rep works
        }
        let mut gen_mats = Vec::new();
        for &qs in quot.generators() {
            let g = reps[qs];
            // solve fixed * X = act(g) * fixed columnwise
            let mut x = IntMatrix::zero(k, k);
            for c in 0..k {
                let col = fixed.basis.column(c);
                let img = self.act[g].apply_big(&col);
                let sol =
                    linalg::solve(&fixed.basis, &img).ok_or(LatticeError::NotAnAction)?;
                for (r, v) in sol.into_iter().enumerate() {
                    x.set(r, c, v);
                }
            }
            gen_mats.push((qs, SparseMat::from_int_matrix(&x)));
        }
        let labels = (0..k).map(|i| format!("f{i}")).collect();
        let sub = GLattice::from_generator_matrices(quot, gen_mats, labels, None)?;
        let inclusion = LatticeMap {
            matrix: fixed.basis.clone(),
        };
        Ok((sub, inclusion, proj))
    }

    pub fn dump_json(&self) -> serde_json::Value {
        let gens: serde_json::Map<String, serde_json::Value> = self
            .group
            .generators()
            .iter()
            .map(|&g| {
                (
                    self.group.name(g).to_string(),
                    serde_json::to_value(self.act[g].to_int_matrix()).unwrap(),
                )
            })
            .collect();
        json!({
            "rank": self.rank,
            "labels": self.labels,
            "generators": gens,
        })
    }
}

/// An equivariant map of G-lattices over the same acting group, stored as a
/// target-rank x source-rank matrix.
#[derive(Debug, Clone)]
pub struct LatticeMap {
    pub matrix: IntMatrix,
}

impl LatticeMap {
    pub fn new(
        source: &GLattice,
        target: &GLattice,
        matrix: IntMatrix,
    ) -> Result<Self, LatticeError> {
        assert_eq!(matrix.cols(), source.rank);
        assert_eq!(matrix.rows(), target.rank);
        for &s in source.group.generators() {
            let lhs = matrix.mul(&source.action(s).to_int_matrix());
            let rhs = target.action(s).to_int_matrix().mul(&matrix);
            if lhs != rhs {
                return Err(LatticeError::NotAnAction);
            }
        }
        Ok(LatticeMap { matrix })
    }
}

/// Rank-1 lattice with trivial action.
pub fn trivial_lattice(group: FiniteGroup) -> GLattice {
    let gens: Vec<(usize, SparseMat)> = group
        .generators()
        .iter()
        .map(|&g| (g, SparseMat::identity(1)))
        .collect();
    GLattice::from_generator_matrices(group, gens, vec!["1".into()], None)
        .expect("trivial action is an action")
}

/// Permutation lattice from an abstract permutation action: perm maps each
/// generator index to the permutation it induces on the basis (image
/// positions).  Fails if the assignment does not extend to an action.
pub fn perm_lattice_abstract(
    group: FiniteGroup,
    perms: Vec<(usize, Vec<usize>)>,
    labels: Vec<String>,
) -> Result<GLattice, LatticeError> {
    let n = labels.len();
    let gen_mats = perms
        .into_iter()
        .map(|(g, perm)| {
            assert_eq!(perm.len(), n);
            // column j maps to e_{perm[j]}
            let mut rows = vec![SparseRow::new(); n];
            for (j, &i) in perm.iter().enumerate() {
                rows[i].push((j, 1));
            }
            (g, SparseMat { rows, cols: n })
        })
        .collect();
    let mut lat = GLattice::from_generator_matrices(group, gen_mats, labels, None)?;
    lat.compute_perm_orbit();
    Ok(lat)
}

/// Z[G/H] for the Heisenberg group, with the paper's e_{i,j} basis labels
/// when H has all coset representatives of the form b^t c^u.
pub fn perm_lattice(g: &HeisenbergGroup, h: &Subgroup) -> (GLattice, CosetSpace) {
    let (reps, index_map) = g.cosets(h);
    let n = reps.len();
    let full = g.subgroup(crate::group::SubgroupLabel::Full);
    let (fg, _) = FiniteGroup::from_subgroup(g, &full);
    let labels: Vec<String> = if reps.iter().all(|r| r.s == 0) {
        reps.iter().map(|r| format!("e_{{{},{}}}", r.t, r.u)).collect()
    } else {
        reps.iter().map(|r| format!("e[{r}]")).collect()
    };
    let gens = [g.gen_a(), g.gen_b()];
    let gen_mats: Vec<(usize, SparseMat)> = gens
        .iter()
        .map(|&s| {
            let mut rows = vec![SparseRow::new(); n];
            for (j, &rep) in reps.iter().enumerate() {
                let img = index_map[g.index_of(g.multiply(s, rep))];
                rows[img].push((j, 1));
            }
            (g.index_of(s), SparseMat { rows, cols: n })
        })
        .collect();
    // orbit provenance: basis j = reps[j] * (identity coset)
    let stab: Vec<usize> = h.elements.iter().map(|&e| g.index_of(e)).collect();
    let orbit = OrbitInfo {
        base: 0,
        movers: reps.iter().map(|&r| g.index_of(r)).collect(),
        stab,
    };
    let lat = GLattice::from_generator_matrices(fg, gen_mats, labels, Some(orbit))
        .expect("coset translation is an action");
    (lat, CosetSpace { reps, index_map })
}

/// The Chevalley module J = Z[G/H] / <sum of basis>, presented on the basis
/// of all coset vectors except the identity coset (index 0).  Returns J and
/// the projection Z[G/H] -> J.
pub fn chevalley_dual(p_lat: &GLattice) -> (GLattice, LatticeMap) {
    let n = p_lat.rank;
    let rank = n - 1;
    let gen_mats: Vec<(usize, SparseMat)> = p_lat
        .group
        .generators()
        .iter()
        .map(|&s| {
            // sigma: basis permutation of the ambient permutation lattice
            let a = p_lat.action(s);
            let mut sigma = vec![0usize; n];
            for (i, row) in a.rows.iter().enumerate() {
                for &(j, c) in row {
                    assert_eq!(c, 1, "ambient lattice must be a permutation lattice");
                    sigma[j] = i;
                }
            }
            let mut rows = vec![SparseRow::new(); rank];
            // column j-1 (for coset j >= 1): image e_{sigma(j)}, with
            // e_0 = -sum of the others
            for j in 1..n {
                let i = sigma[j];
                if i == 0 {
                    for row in rows.iter_mut() {
                        row.push((j - 1, -1));
                    }
                } else {
                    rows[i - 1].push((j - 1, 1));
                }
            }
            for row in rows.iter_mut() {
                row.sort_unstable();
            }
            (s, SparseMat { rows, cols: rank })
        })
        .collect();
    let labels = p_lat.labels[1..].to_vec();
    let orbit = p_lat.orbit.as_ref().map(|o| OrbitInfo {
        base: 0,
        movers: o.movers[1..].to_vec(),
        stab: {
            // stabilizer of coset 1 = m1 * H * m1^-1
            let m1 = o.movers[1];
            let g = &p_lat.group;
            let mut s: Vec<usize> = o
                .stab
                .iter()
                .map(|&h| g.mul(g.mul(m1, h), g.inv(m1)))
                .collect();
            s.sort_unstable();
            s
        },
    });
    let j = GLattice::from_generator_matrices(
        p_lat.group.clone(),
        gen_mats,
        labels,
        orbit,
    )
    .expect("induced quotient action is an action");
    let mut proj = IntMatrix::zero(rank, n);
    for i in 0..rank {
        proj.set(i, i + 1, BigInt::one());
        proj.set(i, 0, BigInt::from(-1));
    }
    let projection = LatticeMap::new(p_lat, &j, proj).expect("projection is equivariant");
    (j, projection)
}

/// The norm embedding Z -> Z[G/H], 1 -> sum of all basis vectors.
pub fn norm_embedding(p_lat: &GLattice) -> LatticeMap {
    let triv = trivial_lattice(p_lat.group.clone());
    let mut m = IntMatrix::zero(p_lat.rank, 1);
    for i in 0..p_lat.rank {
        m.set(i, 0, BigInt::one());
    }
    LatticeMap::new(&triv, p_lat, m).expect("norm embedding is equivariant")
}

/// Searches for a unimodular equivariant isomorphism M1 -> M2 using the
/// orbit structure of M1.  None means the search was inconclusive.
pub fn equivariant_iso_search(
    m1: &GLattice,
    m2: &GLattice,
    budget: usize,
) -> Option<LatticeMap> {
    if m1.rank != m2.rank || m1.group.size() != m2.group.size() {
        return None;
    }
    let orbit = m1.orbit.as_ref()?;
    // cheap pre-pass: signed unit vectors and the all-(-1) vector cover the
    // permutation-induced isomorphisms
    let mut quick: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..m2.rank {
        for sgn in [1, -1] {
            let mut w = vec![BigInt::zero(); m2.rank];
            w[i] = BigInt::from(sgn);
            quick.push(w);
        }
    }
    for sgn in [1, -1] {
        quick.push(vec![BigInt::from(sgn); m2.rank]);
    }
    for w in &quick {
        if let Some(t) = try_orbit_map(m1, m2, orbit, w) {
            return Some(t);
        }
    }
    // candidate images of the base basis vector must be fixed by its stabilizer
    let mut stacked = IntMatrix::zero(orbit.stab.len() * m2.rank, m2.rank);
    for (bi, &nel) in orbit.stab.iter().enumerate() {
        let a = m2.action(nel);
        for (i, row) in a.rows.iter().enumerate() {
            for &(j, c) in row {
                let cur = stacked.get(bi * m2.rank + i, j);
                stacked.set(bi * m2.rank + i, j, cur + BigInt::from(c));
            }
            let cur = stacked.get(bi * m2.rank + i, i);
            stacked.set(bi * m2.rank + i, i, cur - BigInt::one());
        }
    }
    let fixed = linalg::kernel_lattice(&stacked);
    let k = fixed.rank();
    if k == 0 {
        return None;
    }
    // enumerate small coefficient vectors in the fixed sublattice
    let mut bound = 1usize;
    while (2 * (bound + 1) + 1).pow(k as u32) <= budget {
        bound += 1;
    }
    let mut coeffs = vec![-(bound as i64); k];
    loop {
        if coeffs.iter().any(|&c| c != 0) {
            let mut w = vec![BigInt::zero(); m2.rank];
            for (c, &co) in coeffs.iter().enumerate() {
                if co != 0 {
                    let col = fixed.basis.column(c);
                    for (i, wi) in w.iter_mut().enumerate() {
                        *wi += &col[i] * BigInt::from(co);
                    }
                }
            }
            if let Some(t) = try_orbit_map(m1, m2, orbit, &w) {
                return Some(t);
            }
        }
        // increment odometer
        let mut i = 0;
        loop {
            if i == k {
                return None;
            }
            coeffs[i] += 1;
            if coeffs[i] > bound as i64 {
                coeffs[i] = -(bound as i64);
                i += 1;
            } else {
                break;
            }
        }
    }
}

fn try_orbit_map(
    m1: &GLattice,
    m2: &GLattice,
    orbit: &OrbitInfo,
    w: &[BigInt],
) -> Option<LatticeMap> {
    let g = &m1.group;
    let base_mover_inv = g.inv(orbit.movers[orbit.base]);
    let mut t = IntMatrix::zero(m2.rank, m1.rank);
    for j in 0..m1.rank {
        let mover = g.mul(orbit.movers[j], base_mover_inv);
        let img = m2.action(mover).apply_big(w);
        for (i, v) in img.into_iter().enumerate() {
            t.set(i, j, v);
        }
    }
    // unimodular?
    let (diag, _, _) = linalg::snf(&t);
    if diag.len() != m1.rank || diag.iter().any(|d| !d.abs().is_one()) {
        return None;
    }
    LatticeMap::new(m1, m2, t).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::SubgroupLabel;

    fn heis(p: u32) -> HeisenbergGroup {
        HeisenbergGroup::new(crate::group::PrimeParam::new(p).unwrap())
    }

    fn full_group(g: &HeisenbergGroup) -> FiniteGroup {
        let full = g.subgroup(SubgroupLabel::Full);
        FiniteGroup::from_subgroup(g, &full).0
    }

    fn label_index(lat: &GLattice, label: &str) -> usize {
        lat.labels.iter().position(|l| l == label).unwrap()
    }

    // image basis index of e_j under act(g), for permutation matrices
    fn perm_image(lat: &GLattice, g: usize, j: usize) -> usize {
        for (i, row) in lat.action(g).rows.iter().enumerate() {
            if row.iter().any(|&(c, v)| c == j && v == 1) {
                return i;
            }
        }
        panic!("not a permutation column");
    }

    #[test]
    fn trivial_lattice_is_rank_one_identity() {
        let fg = full_group(&heis(3));
        let t = trivial_lattice(fg);
        assert_eq!(t.rank, 1);
        for g in 0..t.group.size() {
            assert_eq!(*t.action(g), SparseMat::identity(1));
        }
    }

    #[test]
    fn coset_lattice_action_formulas_match() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (lat, cs) = perm_lattice(&g, &h);
        assert_eq!(lat.rank, 9);
        assert_eq!(cs.reps.len(), 9);
        let p = 3i64;
        let ia = g.index_of(g.gen_a());
        let ib = g.index_of(g.gen_b());
        let ic = g.index_of(g.gen_c());
        for i in 0..p {
            for j in 0..p {
                let e = label_index(&lat, &format!("e_{{{i},{j}}}"));
                let ea =
                    label_index(&lat, &format!("e_{{{},{}}}", i, (j - i).rem_euclid(p)));
                let eb =
                    label_index(&lat, &format!("e_{{{},{}}}", (i + 1).rem_euclid(p), j));
                let ec =
                    label_index(&lat, &format!("e_{{{},{}}}", i, (j + 1).rem_euclid(p)));
                assert_eq!(perm_image(&lat, ia, e), ea);
                assert_eq!(perm_image(&lat, ib, e), eb);
                assert_eq!(perm_image(&lat, ic, e), ec);
            }
        }
        // c acts with order 3 and no fixed basis vector
        for j in 0..9 {
            assert_ne!(perm_image(&lat, ic, j), j);
            let mut x = j;
            for _ in 0..3 {
                x = perm_image(&lat, ic, x);
            }
            assert_eq!(x, j);
        }
    }

    #[test]
    fn regular_lattice_has_group_order_rank() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::Triv);
        let (lat, _) = perm_lattice(&g, &h);
        assert_eq!(lat.rank, 27);
    }

    #[test]
    fn chevalley_ranks_and_exactness() {
        let g = heis(3);
        for (label, expect) in [(SubgroupLabel::H(0), 8usize), (SubgroupLabel::Triv, 26)] {
            let h = g.subgroup(label);
            let (p_lat, _) = perm_lattice(&g, &h);
            let (j_lat, proj) = chevalley_dual(&p_lat);
            assert_eq!(j_lat.rank, expect);
            assert_eq!(1 + j_lat.rank, p_lat.rank);
            // identity coset maps to minus the sum of the basis
            let col0 = proj.matrix.column(0);
            assert!(col0.iter().all(|v| *v == BigInt::from(-1)));
            // norm embedding followed by projection is zero
            let emb = norm_embedding(&p_lat);
            assert!(proj.matrix.mul(&emb.matrix).is_zero());
        }
    }

    fn basis_orbits(lat: &GLattice) -> Vec<Vec<usize>> {
        let mut seen = vec![false; lat.rank];
        let mut orbits = Vec::new();
        for start in 0..lat.rank {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < orbit.len() {
                for g in 0..lat.group.size() {
                    let img = perm_image(lat, g, orbit[k]);
                    if !seen[img] {
                        seen[img] = true;
                        orbit.push(img);
                    }
                }
                k += 1;
            }
            orbits.push(orbit);
        }
        orbits
    }

    #[test]
    fn restriction_orbit_shapes() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (p_lat, _) = perm_lattice(&g, &h);
        // restriction to <a,c> splits into p orbits of size p
        let k0 = g.subgroup(SubgroupLabel::K(0));
        let res = p_lat.restrict(&g, &k0).unwrap();
        let orbits = basis_orbits(&res);
        assert_eq!(orbits.len(), 3);
        assert!(orbits.iter().all(|o| o.len() == 3));
        // restriction of J to <a> keeps p-1 basis vectors fixed
        let (j_lat, _) = chevalley_dual(&p_lat);
        let ha = g.subgroup(SubgroupLabel::H(0));
        let res_j = j_lat.restrict(&g, &ha).unwrap();
        let fixed = (0..res_j.rank)
            .filter(|&b| {
                (0..res_j.group.size())
                    .all(|e| res_j.action(e).rows[b] == vec![(b, 1)])
            })
            .count();
        assert_eq!(fixed, 2);
        // restriction to the trivial subgroup
        let triv = g.subgroup(SubgroupLabel::Triv);
        let res_t = p_lat.restrict(&g, &triv).unwrap();
        assert_eq!(res_t.group.size(), 1);
        assert_eq!(res_t.rank, 9);
    }

    #[test]
    fn restrict_rejects_non_subgroup() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (p_lat, _) = perm_lattice(&g, &h);
        // element set that is not closed under multiplication
        let bad = vec![0usize, g.index_of(g.gen_a())];
        assert!(matches!(
            p_lat.restrict_indices(&bad, &[g.index_of(g.gen_a())]),
            Err(LatticeError::NotSubgroup)
        ));
    }

    #[test]
    fn fixed_sublattice_ranks() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (p_lat, _) = perm_lattice(&g, &h);
        // (Z[G/H])^H has rank 2p-1
        let h_idx: Vec<usize> = h.elements.iter().map(|&e| g.index_of(e)).collect();
        // <a> is not normal in G, so compute inside K0 where it is
        let k0 = g.subgroup(SubgroupLabel::K(0));
        let res = p_lat.restrict(&g, &k0).unwrap();
        let k0_idx: Vec<usize> = k0.elements.iter().map(|&e| g.index_of(e)).collect();
        let h_in_k0: Vec<usize> = h_idx
            .iter()
            .map(|&e| k0_idx.binary_search(&e).unwrap())
            .collect();
        let (fixed, incl, _) = res.fixed_sublattice(&h_in_k0).unwrap();
        assert_eq!(fixed.rank, 5);
        // saturation: inclusion basis has trivial elementary divisors
        let (diag, _, _) = linalg::snf(&incl.matrix);
        assert!(diag.iter().all(|d| d.abs().is_one()));
        // M^Triv = M
        let (all, _, _) = p_lat.fixed_sublattice(&[0]).unwrap();
        assert_eq!(all.rank, p_lat.rank);
    }

    #[test]
    fn fixed_sublattice_rejects_non_normal() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (p_lat, _) = perm_lattice(&g, &h);
        let h_idx: Vec<usize> = h.elements.iter().map(|&e| g.index_of(e)).collect();
        assert!(matches!(
            p_lat.fixed_sublattice(&h_idx),
            Err(LatticeError::NotNormal)
        ));
    }

    #[test]
    fn fixed_chevalley_is_cyclic_chevalley() {
        // (J_{G/<a>})^{<a,c>} is J_{C_3} for the quotient <b-bar>
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (p_lat, _) = perm_lattice(&g, &h);
        let (j_lat, _) = chevalley_dual(&p_lat);
        let k0 = g.subgroup(SubgroupLabel::K(0));
        let k0_idx: Vec<usize> = k0.elements.iter().map(|&e| g.index_of(e)).collect();
        let (fixed, _, _) = j_lat.fixed_sublattice(&k0_idx).unwrap();
        assert_eq!(fixed.rank, 2);
        assert_eq!(fixed.group.size(), 3);
        // build the cyclic Chevalley module over the same quotient group
        let quot = fixed.group.clone();
        let qs = quot.generators()[0];
        let perm: Vec<usize> = (0..3).map(|j| quot.mul(qs, j)).collect();
        let reg = perm_lattice_abstract(
            quot.clone(),
            vec![(qs, perm)],
            (0..3).map(|i| format!("r{i}")).collect(),
        )
        .unwrap();
        let (jc3, _) = chevalley_dual(&reg);
        let iso = equivariant_iso_search(&jc3, &fixed, 10_000);
        assert!(iso.is_some());
    }

    #[test]
    fn iso_search_basics() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (p_lat, _) = perm_lattice(&g, &h);
        let (j_lat, _) = chevalley_dual(&p_lat);
        assert!(equivariant_iso_search(&j_lat, &j_lat, 100).is_some());
        // rank mismatch is rejected before searching
        let triv = trivial_lattice(j_lat.group.clone());
        assert!(equivariant_iso_search(&triv, &j_lat, 100).is_none());
    }

    #[test]
    fn twisted_coset_module_is_isomorphic() {
        // J_{G/<a>} against J on phi1-twisted cosets of <ab>
        let g = heis(3);
        let h0 = g.subgroup(SubgroupLabel::H(0));
        let (p0, _) = perm_lattice(&g, &h0);
        let (j0, _) = chevalley_dual(&p0);
        let h1 = g.subgroup(SubgroupLabel::H(1));
        let (p1, _) = perm_lattice(&g, &h1);
        let gens = [g.gen_a(), g.gen_b()];
        let gen_mats: Vec<(usize, SparseMat)> = gens
            .iter()
            .map(|&s| {
                let twisted = g.apply_automorphism(1, s);
                (g.index_of(s), p1.action(g.index_of(twisted)).clone())
            })
            .collect();
        let mut tw = GLattice::from_generator_matrices(
            p1.group.clone(),
            gen_mats,
            p1.labels.clone(),
            None,
        )
        .unwrap();
        tw.compute_perm_orbit();
        let (jtw, _) = chevalley_dual(&tw);
        let iso = equivariant_iso_search(&j0, &jtw, 50_000);
        assert!(iso.is_some());
    }

    #[test]
    fn action_table_random_products_p5() {
        use rand::{Rng, SeedableRng};
        let g = heis(5);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (lat, _) = perm_lattice(&g, &h);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x = rng.gen_range(0..lat.group.size());
            let y = rng.gen_range(0..lat.group.size());
            assert_eq!(
                lat.action(x).mul(lat.action(y)),
                *lat.action(lat.group.mul(x, y))
            );
        }
    }

    #[test]
    fn dump_shape() {
        let g = heis(3);
        let h = g.subgroup(SubgroupLabel::H(0));
        let (lat, _) = perm_lattice(&g, &h);
        let v = lat.dump_json();
        assert_eq!(v["rank"], 9);
        assert_eq!(v["labels"].as_array().unwrap().len(), 9);
        assert!(v["generators"].as_object().unwrap().len() >= 2);
    }
}
