//! Finite groups as multiplication tables.
//!
//! Elements are indices `0..order`. Permutation groups are built by
//! breadth-first closure from the identity, so element numbering is a pure
//! function of the generator list.

mod abelian;
mod perm;
mod semidirect;

use std::collections::{HashMap, VecDeque};

pub use abelian::{abelianization, Abelianization};
pub use perm::Perm;
pub use semidirect::{
    cyclic_power_map, extend_action, semidirect_product, validate_action, SemidirectProduct,
};

use crate::error::{Axiom, Error, Result};

/// Default cap on the number of group elements materialized.
pub const DEFAULT_GROUP_BUDGET: usize = 5000;

#[derive(Clone, Debug)]
pub struct GroupTable {
    order: usize,
    identity: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    perm_images: Option<Vec<Perm>>,
    labels: Vec<String>,
    generators: Vec<usize>,
}

impl GroupTable {
    /// Closure of `generators` inside `Sym(degree)`.
    ///
    /// Elements are numbered in discovery order: breadth-first from the
    /// identity, right-multiplying by the generators in input order.
    pub fn from_permutations(degree: usize, generators: &[Perm], budget: usize) -> Result<Self> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::InvalidPermutation(format!(
                    "{g} has degree {} but the group acts on {degree} points",
                    g.degree()
                )));
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index: HashMap<Perm, usize> = HashMap::from([(id, 0)]);
        // right[x][s] = x * gens[s]; parent links give every element as a word.
        let mut right: Vec<Vec<u32>> = Vec::new();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let mut row = Vec::with_capacity(generators.len());
            for (s, g) in generators.iter().enumerate() {
                let y = elements[x].then(g);
                let j = match index.get(&y) {
                    Some(&j) => j,
                    None => {
                        let j = elements.len();
                        if j >= budget {
                            return Err(Error::budget("closing permutation group", budget, j as u64 + 1));
                        }
                        index.insert(y.clone(), j);
                        elements.push(y);
                        parent.push(Some((x, s)));
                        queue.push_back(j);
                        j
                    }
                };
                row.push(j as u32);
            }
            right.push(row);
        }
        let n = elements.len();
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            mul[a * n] = a as u32;
        }
        // Elements appear after their parents, so each column is ready when needed.
        for b in 1..n {
            let (p, s) = parent[b].expect("non-identity element has a parent");
            for a in 0..n {
                let ap = mul[a * n + p] as usize;
                mul[a * n + b] = right[ap][s];
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        let labels = elements.iter().map(|p| p.to_string()).collect();
        let mut g = GroupTable {
            order: n,
            identity: 0,
            mul,
            inv,
            perm_images: Some(elements),
            labels,
            generators: Vec::new(),
        };
        g.generators = generators.iter().map(|p| g.element_of_perm(p).unwrap()).collect();
        Ok(g)
    }

    /// Validates a Cayley table over `{0..n-1}` and locates identity and inverses.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let labels = (0..table.len()).map(|i| i.to_string()).collect();
        Self::from_table_labeled(table, labels)
    }

    pub fn from_table_labeled(table: &[Vec<usize>], labels: Vec<String>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup {
                axiom: Axiom::Identity,
                witness: vec![],
            });
        }
        if labels.len() != n {
            return Err(Error::input(format!("{} labels for a table of size {n}", labels.len())));
        }
        let mut mul = vec![0u32; n * n];
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAGroup {
                    axiom: Axiom::Closure,
                    witness: vec![a],
                });
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= n {
                    return Err(Error::NotAGroup {
                        axiom: Axiom::Closure,
                        witness: vec![a, b],
                    });
                }
                mul[a * n + b] = c as u32;
            }
        }
        let m = |a: usize, b: usize| mul[a * n + b] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or(Error::NotAGroup {
                axiom: Axiom::Identity,
                witness: vec![],
            })?;
        let mut inv = vec![0u32; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| m(x, y) == identity && m(y, x) == identity)
                .ok_or(Error::NotAGroup {
                    axiom: Axiom::Inverse,
                    witness: vec![x],
                })?;
            inv[x] = y as u32;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(Error::NotAGroup {
                            axiom: Axiom::Associativity,
                            witness: vec![a, b, c],
                        });
                    }
                }
            }
        }
        let mut g = GroupTable {
            order: n,
            identity,
            mul,
            inv,
            perm_images: None,
            labels,
            generators: Vec::new(),
        };
        g.generators = g.greedy_generators();
        Ok(g)
    }

    /// Builds from a table known to be a group, skipping the O(n^3) check.
    pub(crate) fn from_trusted_parts(mul: Vec<u32>, identity: usize, labels: Vec<String>) -> Self {
        let n = labels.len();
        let mut inv = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] as usize == identity {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        let mut g = GroupTable {
            order: n,
            identity,
            mul,
            inv,
            perm_images: None,
            labels,
            generators: Vec::new(),
        };
        g.generators = g.greedy_generators();
        g
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mul = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
        GroupTable::from_trusted_parts(mul, 0, (0..n).map(|i| i.to_string()).collect())
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Perm::from_cycles(n, &[vec![1, 2]]).unwrap());
        }
        if n >= 3 {
            gens.push(Perm::from_cycles(n, &[(1..=n).collect()]).unwrap());
        }
        GroupTable::from_permutations(n.max(1), &gens, usize::MAX).unwrap()
    }

    /// Dihedral group of order `2n` acting on the vertices of an n-gon.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 3);
        let rotation = Perm::from_cycles(n, &[(1..=n).collect()]).unwrap();
        let reflection: Vec<Vec<usize>> = (2..=n)
            .filter_map(|i| {
                let j = n + 2 - i;
                (i < j).then(|| vec![i, j])
            })
            .collect();
        let reflection = Perm::from_cycles(n, &reflection).unwrap();
        GroupTable::from_permutations(n, &[rotation, reflection], usize::MAX).unwrap()
    }

    /// The quaternion group with labels `1, -1, i, -i, j, -j, k, -k`.
    pub fn quaternion() -> Self {
        // element = (sign, unit) with unit 0..4 for 1, i, j, k
        let units = |u: usize, v: usize| -> (bool, usize) {
            match (u, v) {
                (0, x) | (x, 0) => (false, x),
                (a, b) if a == b => (true, 0),
                (1, 2) => (false, 3),
                (2, 3) => (false, 1),
                (3, 1) => (false, 2),
                (2, 1) => (true, 3),
                (3, 2) => (true, 1),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        let idx = |neg: bool, u: usize| 2 * u + usize::from(neg);
        let mut mul = vec![0u32; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (na, ua) = (a % 2 == 1, a / 2);
                let (nb, ub) = (b % 2 == 1, b / 2);
                let (nu, u) = units(ua, ub);
                mul[a * 8 + b] = idx(na ^ nb ^ nu, u) as u32;
            }
        }
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        GroupTable::from_trusted_parts(mul, 0, labels)
    }

    pub fn direct_product(a: &GroupTable, b: &GroupTable) -> Self {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let (xa, xb) = (x / nb, x % nb);
                let (ya, yb) = (y / nb, y % nb);
                mul[x * n + y] = (a.mul(xa, ya) * nb + b.mul(xb, yb)) as u32;
            }
        }
        let labels = (0..n)
            .map(|x| format!("({},{})", a.label(x / nb), b.label(x % nb)))
            .collect();
        GroupTable::from_trusted_parts(mul, a.identity * nb + b.identity, labels)
    }

    /// Same group with element `i` renamed to `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let n = self.order;
        assert_eq!(perm.len(), n);
        let mut back = vec![0usize; n];
        for (i, &p) in perm.iter().enumerate() {
            back[p] = i;
        }
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[x * n + y] = perm[self.mul(back[x], back[y])] as u32;
            }
        }
        let labels = (0..n).map(|x| self.labels[back[x]].clone()).collect();
        let mut g = GroupTable::from_trusted_parts(mul, perm[self.identity], labels);
        g.perm_images = self
            .perm_images
            .as_ref()
            .map(|imgs| (0..n).map(|x| imgs[back[x]].clone()).collect());
        g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g^-1 x g`.
    #[inline]
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn commutator(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))
    }

    pub fn pow(&self, x: usize, e: u64) -> usize {
        let e = e % self.element_order(x) as u64;
        let (mut acc, mut base, mut e) = (self.identity, x, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != self.identity {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order).fold(1, |acc, x| num_integer::lcm(acc, self.element_order(x)))
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element_by_label(&self, label: &str) -> Option<usize> {
        let label = label.trim();
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Some(i);
        }
        let perms = self.perm_images.as_ref()?;
        let p = Perm::parse(perms[0].degree(), label).ok()?;
        self.element_of_perm(&p)
    }

    pub fn perm_images(&self) -> Option<&[Perm]> {
        self.perm_images.as_deref()
    }

    pub fn degree(&self) -> Option<usize> {
        self.perm_images.as_ref().map(|p| p[0].degree())
    }

    pub fn element_of_perm(&self, p: &Perm) -> Option<usize> {
        self.perm_images.as_ref()?.iter().position(|q| q == p)
    }

    /// A generating set: the input generators for permutation groups, else a
    /// greedy choice in element order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for x in 0..self.order {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = subgroup_generated(self, &gens).members;
            }
        }
        gens
    }

    /// Checks the group axioms exhaustively (O(n^3)).
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.order;
        for x in 0..n {
            if self.mul(self.identity, x) != x || self.mul(x, self.identity) != x {
                return Err(Error::NotAGroup {
                    axiom: Axiom::Identity,
                    witness: vec![x],
                });
            }
            if self.mul(x, self.inv(x)) != self.identity {
                return Err(Error::NotAGroup {
                    axiom: Axiom::Inverse,
                    witness: vec![x],
                });
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::NotAGroup {
                            axiom: Axiom::Associativity,
                            witness: vec![a, b, c],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .all(|&a| self.generators.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted multiset of element orders; a cheap isomorphism fingerprint.
    pub fn order_statistics(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.order).map(|x| self.element_order(x)).collect();
        v.sort_unstable();
        v
    }
}

/// A sorted set of element indices of some group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    pub members: Vec<usize>,
}

impl Subset {
    pub fn new(g: &GroupTable, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&x) = members.iter().find(|&&x| x >= g.order()) {
            return Err(Error::input(format!("element index {x} out of range")));
        }
        Ok(Subset { members })
    }

    pub fn whole(g: &GroupTable) -> Self {
        Subset {
            members: (0..g.order()).collect(),
        }
    }

    pub fn non_identity(g: &GroupTable) -> Self {
        Subset {
            members: (0..g.order()).filter(|&x| x != g.identity()).collect(),
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

/// Orbits of a conjugation-closed subset under an acting set of conjugators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClassPartition {
    pub acting: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    class_of: HashMap<usize, usize>,
}

impl ConjClassPartition {
    pub fn class_of(&self, x: usize) -> Option<usize> {
        self.class_of.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Partition of `subset` into orbits under `x -> g^-1 x g` for `g` in `acting`.
pub fn conjugacy_partition(
    g: &GroupTable,
    subset: &Subset,
    acting: &[usize],
) -> Result<ConjClassPartition> {
    for x in subset.iter() {
        for &a in acting {
            let y = g.conj(x, a);
            if !subset.contains(y) {
                return Err(Error::NotClosedUnderConjugation {
                    element: g.label(x).to_string(),
                    conjugator: g.label(a).to_string(),
                });
            }
        }
    }
    let mut class_of = HashMap::new();
    let mut blocks = Vec::new();
    for x in subset.iter() {
        if class_of.contains_key(&x) {
            continue;
        }
        let b = blocks.len();
        let mut block = vec![x];
        class_of.insert(x, b);
        let mut k = 0;
        while k < block.len() {
            let y = block[k];
            for &a in acting {
                let z = g.conj(y, a);
                if let std::collections::hash_map::Entry::Vacant(e) = class_of.entry(z) {
                    e.insert(b);
                    block.push(z);
                }
            }
            k += 1;
        }
        block.sort_unstable();
        blocks.push(block);
    }
    Ok(ConjClassPartition {
        acting: acting.to_vec(),
        blocks,
        class_of,
    })
}

/// Conjugacy classes of the whole group.
pub fn conjugacy_classes(g: &GroupTable) -> ConjClassPartition {
    conjugacy_partition(g, &Subset::whole(g), g.generators()).expect("G is closed under conjugation")
}

/// Union of the G-conjugacy classes of the given elements.
pub fn class_closure(g: &GroupTable, elements: &[usize]) -> Subset {
    let classes = conjugacy_classes(g);
    let mut members: Vec<usize> = elements
        .iter()
        .flat_map(|&x| classes.blocks[classes.class_of(x).unwrap()].iter().copied())
        .collect();
    members.sort_unstable();
    members.dedup();
    Subset { members }
}

pub fn subgroup_generated(g: &GroupTable, gens: &[usize]) -> Subset {
    let mut seen = vec![false; g.order()];
    let mut members = vec![g.identity()];
    seen[g.identity()] = true;
    let mut k = 0;
    while k < members.len() {
        let x = members[k];
        for &s in gens {
            let y = g.mul(x, s);
            if !seen[y] {
                seen[y] = true;
                members.push(y);
            }
        }
        k += 1;
    }
    members.sort_unstable();
    Subset { members }
}

pub fn is_subgroup(g: &GroupTable, h: &Subset) -> bool {
    h.contains(g.identity())
        && h.iter().all(|a| h.iter().all(|b| h.contains(g.mul(a, b))))
}

pub fn is_normal(g: &GroupTable, h: &Subset) -> bool {
    h.iter()
        .all(|x| g.generators().iter().all(|&a| h.contains(g.conj(x, a))))
}

pub fn center(g: &GroupTable) -> Subset {
    Subset {
        members: (0..g.order())
            .filter(|&x| g.generators().iter().all(|&a| g.mul(x, a) == g.mul(a, x)))
            .collect(),
    }
}

pub fn element_order(g: &GroupTable, x: usize) -> usize {
    g.element_order(x)
}

/// Derived subgroup `[G, G]`.
pub fn commutator_subgroup(g: &GroupTable) -> Subset {
    let mut comms: Vec<usize> = Vec::new();
    for a in 0..g.order() {
        for b in 0..g.order() {
            comms.push(g.commutator(a, b));
        }
    }
    comms.sort_unstable();
    comms.dedup();
    subgroup_generated(g, &comms)
}

/// Normal subgroups, found as unions of conjugacy classes closed under
/// multiplication; sorted by (order, members).
pub fn normal_subgroups(g: &GroupTable, max_classes: usize) -> Result<Vec<Subset>> {
    let classes = conjugacy_classes(g);
    let nontrivial: Vec<&Vec<usize>> = classes
        .blocks
        .iter()
        .filter(|b| !b.contains(&g.identity()))
        .collect();
    if nontrivial.len() > max_classes {
        return Err(Error::budget(
            "enumerating normal subgroups",
            max_classes,
            nontrivial.len() as u64,
        ));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << nontrivial.len()) {
        let mut members = vec![g.identity()];
        for (i, b) in nontrivial.iter().enumerate() {
            if mask >> i & 1 == 1 {
                members.extend(b.iter().copied());
            }
        }
        members.sort_unstable();
        let h = Subset { members };
        if g.order().is_multiple_of(h.len()) && is_subgroup(g, &h) {
            out.push(h);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members.cmp(&b.members)));
    Ok(out)
}

/// Coset decomposition `G/N` for a normal subgroup: `coset_of[x]` and one
/// representative (least element) per coset.
pub fn cosets(g: &GroupTable, n: &Subset) -> (Vec<usize>, Vec<usize>) {
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for m in n.iter() {
            coset_of[g.mul(x, m)] = c;
        }
    }
    (coset_of, reps)
}
