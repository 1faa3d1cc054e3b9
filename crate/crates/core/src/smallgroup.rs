use crate::error::GroupError;
use crate::group::{HeisenbergGroup, Subgroup};

/// A finite group given by its multiplication table.  Element 0 is the
/// identity.  This is the common currency of the cochain engine: the
/// Heisenberg group, its subgroups and its quotients all get flattened to
/// this form before any cohomology is computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    size: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    generators: Vec<usize>,
    names: Vec<String>,
}

impl FiniteGroup {
    pub fn from_table(
        mul_table: Vec<Vec<usize>>,
        generators: Vec<usize>,
        names: Vec<String>,
    ) -> Result<Self, GroupError> {
        let n = mul_table.len();
        if n == 0 || n > u16::MAX as usize {
            return Err(GroupError::NotASubgroup);
        }
        let mut mul = vec![0u16; n * n];
        for (i, row) in mul_table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::NotASubgroup);
            }
            for (j, &k) in row.iter().enumerate() {
                if k >= n {
                    return Err(GroupError::NotASubgroup);
                }
                mul[i * n + j] = k as u16;
            }
        }
        // identity at 0
        for i in 0..n {
            if mul[i] as usize != i || mul[i * n] as usize != i {
                return Err(GroupError::NotASubgroup);
            }
        }
        // associativity and inverses
        let mut inv = vec![u16::MAX; n];
        for i in 0..n {
            for j in 0..n {
                if mul[i * n + j] == 0 {
                    inv[i] = j as u16;
                }
                let ij = mul[i * n + j] as usize;
                for k in 0..n {
                    let jk = mul[j * n + k] as usize;
                    if mul[ij * n + k] != mul[i * n + jk] {
                        return Err(GroupError::NotASubgroup);
                    }
                }
            }
        }
        if inv.iter().any(|&x| x == u16::MAX) {
            return Err(GroupError::NotASubgroup);
        }
        let g = FiniteGroup {
            size: n,
            mul,
            inv,
            generators,
            names,
        };
        if !g.generators_generate() {
            return Err(GroupError::NotASubgroup);
        }
        Ok(g)
    }

    fn generators_generate(&self) -> bool {
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in &self.generators {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        seen.iter().all(|&b| b)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.size + j] as usize
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inv[i] as usize
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut x = i;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, i);
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.size).all(|i| (0..self.size).all(|j| self.mul(i, j) == self.mul(j, i)))
    }

    /// Cyclic group of order n, generated by element 1.
    pub fn cyclic(n: usize) -> Self {
        let mul: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let gens = if n > 1 { vec![1] } else { vec![] };
        let names = (0..n).map(|i| format!("g^{i}")).collect();
        FiniteGroup::from_table(mul, gens, names).expect("cyclic table is a group")
    }

    /// Direct product, indices i*|B| + j.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.size, b.size);
        let n = na * nb;
        let mut mul = vec![vec![0usize; n]; n];
        for i1 in 0..na {
            for j1 in 0..nb {
                for i2 in 0..na {
                    for j2 in 0..nb {
                        mul[i1 * nb + j1][i2 * nb + j2] = a.mul(i1, i2) * nb + b.mul(j1, j2);
                    }
                }
            }
        }
        let mut gens: Vec<usize> = a.generators.iter().map(|&g| g * nb).collect();
        gens.extend(b.generators.iter().map(|&g| g));
        let names = (0..n)
            .map(|k| format!("({},{})", a.names[k / nb], b.names[k % nb]))
            .collect();
        FiniteGroup::from_table(mul, gens, names).expect("product table is a group")
    }

    /// Klein four-group C2 x C2.
    pub fn klein_four() -> Self {
        FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))
    }

    /// Flattens a subgroup of the Heisenberg group.  Returns the table
    /// group together with the list mapping table indices back to ambient
    /// elements (index 0 is the identity; the subgroup's element list is
    /// lex-sorted so this holds automatically).
    pub fn from_subgroup(g: &HeisenbergGroup, h: &Subgroup) -> (Self, Vec<usize>) {
        let n = h.order();
        let pos = |e| h.elements.binary_search(&e).expect("closed subgroup");
        let mul: Vec<Vec<usize>> = h
            .elements
            .iter()
            .map(|&x| {
                h.elements
                    .iter()
                    .map(|&y| pos(g.multiply(x, y)))
                    .collect()
            })
            .collect();
        let gens: Vec<usize> = if h.generators.is_empty() && n > 1 {
            (1..n).collect()
        } else {
            h.generators.iter().map(|&e| pos(e)).collect()
        };
        let names = h.elements.iter().map(|e| e.to_string()).collect();
        let fg = FiniteGroup::from_table(mul, gens, names).expect("subgroup table is a group");
        let back = h.elements.iter().map(|&e| g.index_of(e)).collect();
        (fg, back)
    }

    /// Quotient by a normal subgroup given as a sorted list of element
    /// indices.  Returns the quotient and the projection map.
    pub fn quotient(&self, normal: &[usize]) -> Result<(Self, Vec<usize>), GroupError> {
        let in_n = |x: usize| normal.binary_search(&x).is_ok();
        if !in_n(0) {
            return Err(GroupError::NotASubgroup);
        }
        for &x in normal {
            for &y in normal {
                if !in_n(self.mul(x, y)) {
                    return Err(GroupError::NotASubgroup);
                }
            }
            for g in 0..self.size {
                if !in_n(self.mul(self.mul(self.inv(g), x), g)) {
                    return Err(GroupError::NotASubgroup);
                }
            }
        }
        let mut proj = vec![usize::MAX; self.size];
        let mut reps: Vec<usize> = Vec::new();
        for g in 0..self.size {
            if proj[g] != usize::MAX {
                continue;
            }
            let k = reps.len();
            reps.push(g);
            for &x in normal {
                proj[self.mul(g, x)] = k;
            }
        }
        let m = reps.len();
        let mul: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..m).map(|j| proj[self.mul(reps[i], reps[j])]).collect())
            .collect();
        let gens: Vec<usize> = {
            let mut v: Vec<usize> = self.generators.iter().map(|&g| proj[g]).collect();
            v.sort();
            v.dedup();
            v.retain(|&x| x != 0);
            if v.is_empty() && m > 1 {
                (1..m).collect()
            } else {
                v
            }
        };
        let names = reps.iter().map(|&r| format!("[{}]", self.names[r])).collect();
        let q = FiniteGroup::from_table(mul, gens, names)?;
        Ok((q, proj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{PrimeParam, SubgroupLabel};

    #[test]
    fn cyclic_groups() {
        for n in 1..=12 {
            let g = FiniteGroup::cyclic(n);
            assert_eq!(g.size(), n);
            assert!(g.is_abelian());
            if n > 1 {
                assert_eq!(g.element_order(1), n);
            }
        }
    }

    #[test]
    fn klein_four_structure() {
        let v = FiniteGroup::klein_four();
        assert_eq!(v.size(), 4);
        assert!(v.is_abelian());
        for i in 1..4 {
            assert_eq!(v.element_order(i), 2);
        }
    }

    #[test]
    fn heisenberg_flattening() {
        let g = HeisenbergGroup::new(PrimeParam::new(3).unwrap());
        let full = g.subgroup(SubgroupLabel::Full);
        let (fg, back) = FiniteGroup::from_subgroup(&g, &full);
        assert_eq!(fg.size(), 27);
        assert!(!fg.is_abelian());
        assert_eq!(back[0], 0);
        // table multiplication matches ambient multiplication
        for i in 0..27 {
            for j in 0..27 {
                let x = g.element_at(back[i]);
                let y = g.element_at(back[j]);
                assert_eq!(back[fg.mul(i, j)], g.index_of(g.multiply(x, y)));
            }
        }
    }

    #[test]
    fn quotient_by_center_is_elementary_abelian() {
        let g = HeisenbergGroup::new(PrimeParam::new(3).unwrap());
        let full = g.subgroup(SubgroupLabel::Full);
        let (fg, back) = FiniteGroup::from_subgroup(&g, &full);
        let z = g.subgroup(SubgroupLabel::Z);
        let mut zn: Vec<usize> = z
            .elements
            .iter()
            .map(|&e| back.iter().position(|&bi| bi == g.index_of(e)).unwrap())
            .collect();
        zn.sort();
        let (q, proj) = fg.quotient(&zn).unwrap();
        assert_eq!(q.size(), 9);
        assert!(q.is_abelian());
        assert_eq!(proj[0], 0);
        for i in 1..9 {
            assert_eq!(q.element_order(i), 3);
        }
    }

    #[test]
    fn bad_tables_rejected() {
        // 0 not an identity
        assert!(FiniteGroup::from_table(
            vec![vec![1, 0], vec![0, 1]],
            vec![1],
            vec!["x".into(), "y".into()]
        )
        .is_err());
    }
}
