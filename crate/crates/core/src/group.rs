use crate::error::GroupError;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const SUPPORTED_PRIMES: [u32; 5] = [3, 5, 7, 11, 13];

/// Validated odd prime p with 3 <= p <= 13.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeParam(u32);

impl PrimeParam {
    pub fn new(p: u32) -> Result<Self, GroupError> {
        if SUPPORTED_PRIMES.contains(&p) {
            Ok(PrimeParam(p))
        } else {
            Err(GroupError::UnsupportedPrime(p as u64))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Element a^s b^t c^u of E_p(p^3) in normal form, exponents reduced mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub s: u32,
    pub t: u32,
    pub u: u32,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { s: 0, t: 0, u: 0 }
    }

    pub fn is_identity(self) -> bool {
        self == Self::identity()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (sym, e) in [("a", self.s), ("b", self.t), ("c", self.u)] {
            match e {
                0 => {}
                1 => parts.push(sym.to_string()),
                _ => parts.push(format!("{sym}^{e}")),
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Canonical labels for the 2p+5 subgroup classes up to conjugacy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubgroupLabel {
    /// Trivial subgroup.
    Triv,
    /// Center <c>.
    Z,
    /// Order-p noncentral class: H(i) = <a b^i> for 0 <= i <= p-1, H(p) = <b>.
    H(u32),
    /// Order-p^2 class: K(i) = <a b^i, c> for 0 <= i <= p-1, K(p) = <b, c>.
    K(u32),
    /// The whole group.
    Full,
}

impl fmt::Display for SubgroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupLabel::Triv => write!(f, "Triv"),
            SubgroupLabel::Z => write!(f, "Z"),
            SubgroupLabel::H(i) => write!(f, "H{i}"),
            SubgroupLabel::K(i) => write!(f, "K{i}"),
            SubgroupLabel::Full => write!(f, "G"),
        }
    }
}

impl SubgroupLabel {
    pub fn parse(s: &str, p: u32) -> Result<Self, GroupError> {
        let bad = || GroupError::UnknownLabel(s.to_string());
        match s {
            "Triv" | "1" => return Ok(SubgroupLabel::Triv),
            "Z" => return Ok(SubgroupLabel::Z),
            "G" | "Full" => return Ok(SubgroupLabel::Full),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('H') {
            let i: u32 = rest.parse().map_err(|_| bad())?;
            if i <= p {
                return Ok(SubgroupLabel::H(i));
            }
        }
        if let Some(rest) = s.strip_prefix('K') {
            let i: u32 = rest.parse().map_err(|_| bad())?;
            if i <= p {
                return Ok(SubgroupLabel::K(i));
            }
        }
        Err(bad())
    }
}

/// A subgroup given by generators, with its full (lex-sorted) element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub label: SubgroupLabel,
    pub generators: Vec<GroupElement>,
    pub elements: Vec<GroupElement>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        self.elements.binary_search(&g).is_ok()
    }
}

/// Structural summary of E_p(p^3).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFacts {
    pub p: u32,
    pub order: u64,
    pub exponent: u32,
    pub center_order: usize,
    pub derived_order: usize,
    pub abelianization: Vec<u32>,
    pub subgroup_class_count: usize,
}

/// The Heisenberg group E_p(p^3) of order p^3 and exponent p.
#[derive(Debug, Clone)]
pub struct HeisenbergGroup {
    p: u32,
}

impl HeisenbergGroup {
    pub fn new(p: PrimeParam) -> Self {
        let g = HeisenbergGroup { p: p.get() };
        g.self_check();
        g
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> usize {
        (self.p * self.p * self.p) as usize
    }

    pub fn gen_a(&self) -> GroupElement {
        GroupElement { s: 1, t: 0, u: 0 }
    }

    pub fn gen_b(&self) -> GroupElement {
        GroupElement { s: 0, t: 1, u: 0 }
    }

    pub fn gen_c(&self) -> GroupElement {
        GroupElement { s: 0, t: 0, u: 1 }
    }

    /// a^s b^t c^u with exponents reduced mod p.
    pub fn element(&self, s: i64, t: i64, u: i64) -> GroupElement {
        let p = self.p as i64;
        GroupElement {
            s: s.rem_euclid(p) as u32,
            t: t.rem_euclid(p) as u32,
            u: u.rem_euclid(p) as u32,
        }
    }

    /// (a^s1 b^t1 c^u1)(a^s2 b^t2 c^u2) = a^(s1+s2) b^(t1+t2) c^(u1+u2+t1 s2).
    pub fn multiply(&self, g1: GroupElement, g2: GroupElement) -> GroupElement {
        let p = self.p;
        GroupElement {
            s: (g1.s + g2.s) % p,
            t: (g1.t + g2.t) % p,
            u: (g1.u + g2.u + g1.t * g2.s) % p,
        }
    }

    pub fn inverse(&self, g: GroupElement) -> GroupElement {
        self.element(
            -(g.s as i64),
            -(g.t as i64),
            (g.t as i64) * (g.s as i64) - g.u as i64,
        )
    }

    pub fn commutator(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        let gh = self.multiply(g, h);
        let hg = self.multiply(h, g);
        self.multiply(self.inverse(hg), gh)
    }

    pub fn pow(&self, g: GroupElement, n: i64) -> GroupElement {
        let p = self.p as i64;
        let n = n.rem_euclid(p);
        let mut acc = GroupElement::identity();
        for _ in 0..n {
            acc = self.multiply(acc, g);
        }
        acc
    }

    pub fn conjugate(&self, g: GroupElement, x: GroupElement) -> GroupElement {
        self.multiply(self.multiply(self.inverse(x), g), x)
    }

    /// Elements in lex order of (s, t, u); index = s*p^2 + t*p + u.
    pub fn elements(&self) -> Vec<GroupElement> {
        let p = self.p;
        let mut out = Vec::with_capacity(self.order());
        for s in 0..p {
            for t in 0..p {
                for u in 0..p {
                    out.push(GroupElement { s, t, u });
                }
            }
        }
        out
    }

    pub fn index_of(&self, g: GroupElement) -> usize {
        let p = self.p;
        (g.s * p * p + g.t * p + g.u) as usize
    }

    pub fn element_at(&self, idx: usize) -> GroupElement {
        let p = self.p as usize;
        GroupElement {
            s: (idx / (p * p)) as u32,
            t: ((idx / p) % p) as u32,
            u: (idx % p) as u32,
        }
    }

    /// Closure of a generator list under multiplication.
    pub fn generated_subgroup(
        &self,
        label: SubgroupLabel,
        gens: &[GroupElement],
    ) -> Subgroup {
        let mut elems = vec![GroupElement::identity()];
        let mut frontier = vec![GroupElement::identity()];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.multiply(x, g);
                if elems.binary_search(&y).is_err() {
                    let pos = elems.binary_search(&y).unwrap_err();
                    elems.insert(pos, y);
                    frontier.push(y);
                }
            }
        }
        Subgroup {
            label,
            generators: gens.to_vec(),
            elements: elems,
        }
    }

    pub fn subgroup(&self, label: SubgroupLabel) -> Subgroup {
        let p = self.p;
        let a = self.gen_a();
        let b = self.gen_b();
        let c = self.gen_c();
        match label {
            SubgroupLabel::Triv => self.generated_subgroup(label, &[]),
            SubgroupLabel::Z => self.generated_subgroup(label, &[c]),
            SubgroupLabel::H(i) if i < p => {
                let g = self.multiply(a, self.pow(b, i as i64));
                self.generated_subgroup(label, &[g])
            }
            SubgroupLabel::H(_) => self.generated_subgroup(label, &[b]),
            SubgroupLabel::K(i) if i < p => {
                let g = self.multiply(a, self.pow(b, i as i64));
                self.generated_subgroup(label, &[g, c])
            }
            SubgroupLabel::K(_) => self.generated_subgroup(label, &[b, c]),
            SubgroupLabel::Full => self.generated_subgroup(label, &[a, b]),
        }
    }

    /// The 2p+5 conjugacy classes of subgroups, in canonical order:
    /// Triv, Z, H0..Hp, K0..Kp, G.
    pub fn subgroup_classes(&self) -> Vec<Subgroup> {
        let p = self.p;
        let mut out = Vec::with_capacity(2 * p as usize + 5);
        out.push(self.subgroup(SubgroupLabel::Triv));
        out.push(self.subgroup(SubgroupLabel::Z));
        for i in 0..=p {
            out.push(self.subgroup(SubgroupLabel::H(i)));
        }
        for i in 0..=p {
            out.push(self.subgroup(SubgroupLabel::K(i)));
        }
        out.push(self.subgroup(SubgroupLabel::Full));
        out
    }

    /// Finds the canonical class conjugate to the subgroup generated by
    /// `gens`, returning the class and a conjugating element x with
    /// x^-1 <gens> x = class representative.
    pub fn conjugacy_reduce(
        &self,
        gens: &[GroupElement],
    ) -> Result<(Subgroup, GroupElement), GroupError> {
        let s = self.generated_subgroup(SubgroupLabel::Triv, gens);
        for class in self.subgroup_classes() {
            if class.order() != s.order() {
                continue;
            }
            for x in self.elements() {
                let mut conj: Vec<GroupElement> = s
                    .elements
                    .iter()
                    .map(|&g| self.conjugate(g, x))
                    .collect();
                conj.sort();
                if conj == class.elements {
                    return Ok((class, x));
                }
            }
        }
        // Every subgroup of a finite group hits some conjugacy class, so the
        // only way to get here is an incomplete class list.
        Err(GroupError::NotASubgroup)
    }

    /// phi1: a -> ab, b -> b, c -> c.  phi2: a -> b, b -> a, c -> c^-1.
    pub fn apply_automorphism(&self, which: u32, g: GroupElement) -> GroupElement {
        let (ia, ib, ic) = match which {
            1 => (
                self.multiply(self.gen_a(), self.gen_b()),
                self.gen_b(),
                self.gen_c(),
            ),
            2 => (self.gen_b(), self.gen_a(), self.inverse(self.gen_c())),
            _ => panic!("automorphism index must be 1 or 2"),
        };
        let mut out = self.pow_elem(ia, g.s);
        out = self.multiply(out, self.pow_elem(ib, g.t));
        self.multiply(out, self.pow_elem(ic, g.u))
    }

    fn pow_elem(&self, g: GroupElement, n: u32) -> GroupElement {
        self.pow(g, n as i64)
    }

    /// Left cosets gH.  Representatives are the lex-least element of each
    /// coset, sorted lex, so the identity coset comes first.  Also returns
    /// the map element-index -> coset position.
    pub fn cosets(&self, h: &Subgroup) -> (Vec<GroupElement>, Vec<usize>) {
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in self.elements() {
            if coset_of[self.index_of(g)] != usize::MAX {
                continue;
            }
            let rep_pos = reps.len();
            reps.push(g);
            for &hh in &h.elements {
                let gh = self.multiply(g, hh);
                coset_of[self.index_of(gh)] = rep_pos;
            }
        }
        (reps, coset_of)
    }

    pub fn center(&self) -> Vec<GroupElement> {
        self.elements()
            .into_iter()
            .filter(|&z| {
                self.elements()
                    .into_iter()
                    .all(|g| self.multiply(z, g) == self.multiply(g, z))
            })
            .collect()
    }

    pub fn facts(&self) -> GroupFacts {
        let p = self.p;
        let derived = self.subgroup(SubgroupLabel::Z);
        GroupFacts {
            p,
            order: (p as u64).pow(3),
            exponent: p,
            center_order: self.center().len(),
            derived_order: derived.order(),
            abelianization: vec![p, p],
            subgroup_class_count: 2 * p as usize + 5,
        }
    }

    /// Asserts the defining relations a^p = b^p = c^p = 1, [b,a] = c,
    /// c central, against the normal-form multiplication.
    fn self_check(&self) {
        let a = self.gen_a();
        let b = self.gen_b();
        let c = self.gen_c();
        assert!(self.pow(a, self.p as i64).is_identity());
        assert!(self.pow(b, self.p as i64).is_identity());
        assert!(self.pow(c, self.p as i64).is_identity());
        assert_eq!(self.commutator(b, a), c);
        for g in [a, b] {
            assert_eq!(self.multiply(c, g), self.multiply(g, c));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn group(p: u32) -> HeisenbergGroup {
        HeisenbergGroup::new(PrimeParam::new(p).unwrap())
    }

    #[test]
    fn prime_validation() {
        for p in [3, 5, 7, 11, 13] {
            assert!(PrimeParam::new(p).is_ok());
        }
        for p in [0, 1, 2, 4, 9, 15, 17] {
            assert_eq!(
                PrimeParam::new(p),
                Err(GroupError::UnsupportedPrime(p as u64))
            );
        }
    }

    #[test]
    fn associativity_exhaustive_p3() {
        let g = group(3);
        let els = g.elements();
        for &x in &els {
            for &y in &els {
                let xy = g.multiply(x, y);
                for &z in &els {
                    assert_eq!(g.multiply(xy, z), g.multiply(x, g.multiply(y, z)));
                }
            }
        }
    }

    #[test]
    fn inverses_and_orders() {
        for p in [3, 5, 7] {
            let g = group(p);
            for x in g.elements() {
                assert!(g.multiply(x, g.inverse(x)).is_identity());
                assert!(g.multiply(g.inverse(x), x).is_identity());
                assert!(g.pow(x, p as i64).is_identity());
            }
        }
    }

    #[test]
    fn center_is_generated_by_c() {
        for p in [3, 5] {
            let g = group(p);
            let mut z = g.center();
            z.sort();
            assert_eq!(z, g.subgroup(SubgroupLabel::Z).elements);
        }
    }

    #[test]
    fn subgroup_class_inventory() {
        for p in [3, 5, 7] {
            let g = group(p);
            let classes = g.subgroup_classes();
            assert_eq!(classes.len(), 2 * p as usize + 5);
            assert_eq!(classes[0].order(), 1);
            assert_eq!(classes[1].order(), 1 + p as usize - 1);
            for i in 0..=p as usize {
                assert_eq!(classes[2 + i].order(), p as usize);
                assert_eq!(classes[3 + p as usize + i].order(), (p * p) as usize);
            }
            assert_eq!(classes.last().unwrap().order(), g.order());
            // pairwise distinct element sets
            for i in 0..classes.len() {
                for j in i + 1..classes.len() {
                    assert_ne!(classes[i].elements, classes[j].elements);
                }
            }
        }
    }

    #[test]
    fn order_p_subgroups_fall_into_listed_classes() {
        // every order-p subgroup of E_p(p^3) is conjugate to Z or some H_i
        let p = 3;
        let g = group(p);
        for x in g.elements() {
            if x.is_identity() {
                continue;
            }
            let (class, conj) = g.conjugacy_reduce(&[x]).unwrap();
            assert!(matches!(class.label, SubgroupLabel::Z | SubgroupLabel::H(_)));
            let sub = g.generated_subgroup(SubgroupLabel::Triv, &[x]);
            let mut conjugated: Vec<_> = sub
                .elements
                .iter()
                .map(|&e| g.conjugate(e, conj))
                .collect();
            conjugated.sort();
            assert_eq!(conjugated, class.elements);
        }
    }

    #[test]
    fn automorphisms_are_homomorphisms() {
        for p in [3, 5] {
            let g = group(p);
            for which in [1, 2] {
                for x in g.elements() {
                    for y in g.elements() {
                        assert_eq!(
                            g.apply_automorphism(which, g.multiply(x, y)),
                            g.multiply(
                                g.apply_automorphism(which, x),
                                g.apply_automorphism(which, y)
                            )
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn automorphism_images() {
        let g = group(5);
        let (a, b, c) = (g.gen_a(), g.gen_b(), g.gen_c());
        assert_eq!(g.apply_automorphism(1, a), g.multiply(a, b));
        assert_eq!(g.apply_automorphism(1, b), b);
        assert_eq!(g.apply_automorphism(1, c), c);
        assert_eq!(g.apply_automorphism(2, a), b);
        assert_eq!(g.apply_automorphism(2, b), a);
        assert_eq!(g.apply_automorphism(2, c), g.inverse(c));
    }

    #[test]
    fn coset_reps_for_ha_are_b_c_grid() {
        // left cosets of <a> are represented by b^i c^j
        for p in [3, 5] {
            let g = group(p);
            let h = g.subgroup(SubgroupLabel::H(0));
            let (reps, coset_of) = g.cosets(&h);
            assert_eq!(reps.len(), (p * p) as usize);
            for r in &reps {
                assert_eq!(r.s, 0);
            }
            assert_eq!(reps[0], GroupElement::identity());
            // the map is constant on cosets
            for x in g.elements() {
                for &hh in &h.elements {
                    assert_eq!(
                        coset_of[g.index_of(x)],
                        coset_of[g.index_of(g.multiply(x, hh))]
                    );
                }
            }
        }
    }

    #[test]
    fn label_parsing_round_trip() {
        let p = 5;
        for lbl in [
            SubgroupLabel::Triv,
            SubgroupLabel::Z,
            SubgroupLabel::H(0),
            SubgroupLabel::H(5),
            SubgroupLabel::K(3),
            SubgroupLabel::Full,
        ] {
            assert_eq!(SubgroupLabel::parse(&lbl.to_string(), p).unwrap(), lbl);
        }
        assert!(SubgroupLabel::parse("H9", p).is_err());
        assert!(SubgroupLabel::parse("Q", p).is_err());
    }

    #[test]
    fn facts_summary() {
        let g = group(7);
        let f = g.facts();
        assert_eq!(f.order, 343);
        assert_eq!(f.exponent, 7);
        assert_eq!(f.center_order, 7);
        assert_eq!(f.derived_order, 7);
        assert_eq!(f.abelianization, vec![7, 7]);
        assert_eq!(f.subgroup_class_count, 19);
    }

    proptest! {
        #[test]
        fn prop_associative_p5(xs in prop::array::uniform3(0u32..125)) {
            let g = group(5);
            let [i, j, k] = xs;
            let (x, y, z) = (g.element_at(i as usize), g.element_at(j as usize), g.element_at(k as usize));
            prop_assert_eq!(
                g.multiply(g.multiply(x, y), z),
                g.multiply(x, g.multiply(y, z))
            );
        }

        #[test]
        fn prop_index_round_trip(p in prop::sample::select(vec![3u32, 5, 7, 11, 13]), i in 0usize..2197) {
            let g = group(p);
            let i = i % g.order();
            prop_assert_eq!(g.index_of(g.element_at(i)), i);
        }

        #[test]
        fn prop_commutator_is_central_power(i in 0u32..343, j in 0u32..343) {
            let g = group(7);
            let x = g.element_at(i as usize);
            let y = g.element_at(j as usize);
            let com = g.commutator(x, y);
            prop_assert_eq!(com.s, 0);
            prop_assert_eq!(com.t, 0);
        }
    }
}
