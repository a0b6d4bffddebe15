//! Finite racks as operation tables.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupTable, Perm, Subset};

/// Where a conjugation rack came from: rack element `i` is group element
/// `elements[i]`.
#[derive(Clone, Debug)]
pub struct GroupOrigin {
    pub group: Arc<GroupTable>,
    pub elements: Vec<usize>,
}

impl GroupOrigin {
    pub fn subset(&self) -> Subset {
        Subset::new(&self.group, self.elements.clone()).expect("valid elements")
    }

    /// Rack index of a group element, if it lies in `c`.
    pub fn index_of(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }
}

#[derive(Clone, Debug)]
pub struct Rack {
    size: usize,
    act: Vec<u32>,
    inv_act: Option<Vec<u32>>,
    labels: Vec<String>,
    origin: Option<GroupOrigin>,
}

impl Rack {
    /// Wraps a table `act[x][y] = x |> y` without validating the rack axioms.
    pub fn from_table(act: &[Vec<usize>], labels: Option<Vec<String>>) -> Result<Self> {
        let n = act.len();
        if n == 0 {
            return Err(Error::input("rack must be nonempty"));
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in act {
            if row.len() != n || row.iter().any(|&v| v >= n) {
                return Err(Error::input("rack table must be square with entries in range"));
            }
            flat.extend(row.iter().map(|&v| v as u32));
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        if labels.len() != n {
            return Err(Error::input("label count does not match rack size"));
        }
        Ok(Self::from_parts(n, flat, labels, None))
    }

    fn from_parts(size: usize, act: Vec<u32>, labels: Vec<String>, origin: Option<GroupOrigin>) -> Self {
        let mut inv = vec![u32::MAX; size * size];
        let mut bijective = true;
        'rows: for x in 0..size {
            for y in 0..size {
                let z = act[x * size + y] as usize;
                if inv[x * size + z] != u32::MAX {
                    bijective = false;
                    break 'rows;
                }
                inv[x * size + z] = y as u32;
            }
        }
        Rack {
            size,
            act,
            inv_act: bijective.then_some(inv),
            labels,
            origin,
        }
    }

    /// `x |> y = y`.
    pub fn trivial(n: usize) -> Self {
        let act = (0..n * n).map(|k| (k % n) as u32).collect();
        Self::from_parts(n, act, (0..n).map(|i| i.to_string()).collect(), None)
    }

    /// `x |> y = p(y)` for a fixed permutation `p`.
    pub fn permutation_rack(p: &Perm) -> Self {
        let n = p.degree();
        let act = (0..n * n).map(|k| p.apply(k % n) as u32).collect();
        Self::from_parts(n, act, (0..n).map(|i| i.to_string()).collect(), None)
    }

    /// `x |> y = a y + (1 - a) x` on `Z/n`, for a unit `a`.
    pub fn affine_quandle(n: usize, a: usize) -> Result<Self> {
        if n == 0 || num_integer::gcd(n, a) != 1 {
            return Err(Error::input("affine quandle needs a unit multiplier"));
        }
        let b = (1 + n - a % n) % n;
        let act = (0..n * n)
            .map(|k| ((a * (k % n) + b * (k / n)) % n) as u32)
            .collect();
        Ok(Self::from_parts(n, act, (0..n).map(|i| i.to_string()).collect(), None))
    }

    /// The isomorphic rack with element `x` renamed `perm[x]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let n = self.size;
        let mut act = vec![0u32; n * n];
        let mut labels = vec![String::new(); n];
        for x in 0..n {
            labels[perm[x]] = self.labels[x].clone();
            for y in 0..n {
                act[perm[x] * n + perm[y]] = perm[self.act(x, y)] as u32;
            }
        }
        Self::from_parts(n, act, labels, None)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `x |> y`
    #[inline]
    pub fn act(&self, x: usize, y: usize) -> usize {
        self.act[x * self.size + y] as usize
    }

    /// The `z` with `x |> z = y`; `None` if row `x` is not a bijection.
    #[inline]
    pub fn act_inv(&self, x: usize, y: usize) -> Option<usize> {
        self.inv_act.as_ref().map(|t| t[x * self.size + y] as usize)
    }

    pub fn rows_bijective(&self) -> bool {
        self.inv_act.is_some()
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.act[x * self.size..(x + 1) * self.size]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.size)
            .map(|x| self.row(x).iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        let label = label.trim();
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Some(i);
        }
        let origin = self.origin.as_ref()?;
        origin.index_of(origin.group.element_by_label(label)?)
    }

    pub fn group_origin(&self) -> Option<&GroupOrigin> {
        self.origin.as_ref()
    }

    /// Forward braid move at adjacent positions `(i, i+1)`, 0-based:
    /// `(a, b) -> (b, b |> a)`.
    #[inline]
    pub fn sigma_in_place(&self, t: &mut [u16], i: usize) {
        let (a, b) = (t[i] as usize, t[i + 1] as usize);
        t[i] = b as u16;
        t[i + 1] = self.act(b, a) as u16;
    }

    /// Inverse braid move: `(c, d) -> (c |>^-1 d, c)`.
    #[inline]
    pub fn sigma_inv_in_place(&self, t: &mut [u16], i: usize) {
        let (c, d) = (t[i] as usize, t[i + 1] as usize);
        t[i] = self.act_inv(c, d).expect("inverse move needs bijective rows") as u16;
        t[i + 1] = c as u16;
    }

    pub fn row_perm(&self, x: usize) -> Perm {
        Perm::from_images(self.row(x).to_vec()).expect("row is a bijection")
    }
}

/// `x |> y = x^-1 y x` on a conjugation-closed subset `c` of `G`.
pub fn conjugation_rack(g: Arc<GroupTable>, c: &Subset) -> Result<Rack> {
    let elements = c.members.clone();
    if elements.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = elements.len();
    let mut act = Vec::with_capacity(n * n);
    for &x in &elements {
        for &y in &elements {
            let z = g.conj(y, x);
            let k = elements.binary_search(&z).map_err(|_| Error::NotClosedUnderConjugation {
                element: g.label(y).to_string(),
                conjugator: g.label(x).to_string(),
            })?;
            act.push(k as u32);
        }
    }
    let labels = elements.iter().map(|&x| g.label(x).to_string()).collect();
    Ok(Rack::from_parts(
        n,
        act,
        labels,
        Some(GroupOrigin { group: g, elements }),
    ))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RackReport {
    /// Row-bijectivity and self-distributivity both hold.
    pub axioms_ok: bool,
    /// `sigma_1` is a bijection of `c^2`, the braid relation holds on `c^3`
    /// and far commutation holds on `c^4`.
    pub braid_ok: bool,
    pub non_bijective_rows: Vec<usize>,
    /// First failing triple `(x, y, z)` of `x |> (y |> z) = (x |> y) |> (x |> z)`.
    pub distributivity_witness: Option<(usize, usize, usize)>,
    pub braid_witness: Option<Vec<usize>>,
}

impl RackReport {
    pub fn valid(&self) -> bool {
        self.axioms_ok && self.braid_ok
    }
}

/// Checks the rack axioms directly and, independently, through the braid
/// group action on tuples.
pub fn validate_rack(r: &Rack) -> RackReport {
    let n = r.size();
    let mut report = RackReport::default();
    for x in 0..n {
        let mut seen = vec![false; n];
        for &y in r.row(x) {
            seen[y as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            report.non_bijective_rows.push(x);
        }
    }
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if r.act(x, r.act(y, z)) != r.act(r.act(x, y), r.act(x, z)) {
                    report.distributivity_witness = Some((x, y, z));
                    break 'outer;
                }
            }
        }
    }
    report.axioms_ok = report.non_bijective_rows.is_empty() && report.distributivity_witness.is_none();
    report.braid_witness = braid_check(r);
    report.braid_ok = report.braid_witness.is_none();
    report
}

/// Forward moves only, so the check does not depend on inverse rows.
fn braid_check(r: &Rack) -> Option<Vec<usize>> {
    let n = r.size();
    let apply = |t: &mut Vec<u16>, word: &[usize]| {
        for &i in word {
            r.sigma_in_place(t, i);
        }
    };
    let mut image = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut t = vec![a as u16, b as u16];
            r.sigma_in_place(&mut t, 0);
            let k = t[0] as usize * n + t[1] as usize;
            if image[k] {
                return Some(vec![a, b]);
            }
            image[k] = true;
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let start = vec![a as u16, b as u16, c as u16];
                let (mut u, mut v) = (start.clone(), start);
                apply(&mut u, &[0, 1, 0]);
                apply(&mut v, &[1, 0, 1]);
                if u != v {
                    return Some(vec![a, b, c]);
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let start = vec![a as u16, b as u16, c as u16, d as u16];
                    let (mut u, mut v) = (start.clone(), start);
                    apply(&mut u, &[0, 2]);
                    apply(&mut v, &[2, 0]);
                    if u != v {
                        return Some(vec![a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}

/// The permutation group generated by the row maps `y -> x |> y`.
#[derive(Clone, Debug)]
pub struct StructureGroup {
    pub group: GroupTable,
    /// Element of `group` given by the row of each rack element.
    pub row_element: Vec<usize>,
}

pub fn reduced_structure_group(r: &Rack, budget: usize) -> Result<StructureGroup> {
    if !r.rows_bijective() {
        return Err(Error::input("rack rows are not bijections"));
    }
    let mut gens: Vec<Perm> = Vec::new();
    for x in 0..r.size() {
        let p = r.row_perm(x);
        if !p.is_identity() && !gens.contains(&p) {
            gens.push(p);
        }
    }
    let group = GroupTable::from_permutations(r.size(), &gens, budget)?;
    let row_element = (0..r.size())
        .map(|x| group.element_of_perm(&r.row_perm(x)).expect("row lies in the group"))
        .collect();
    Ok(StructureGroup { group, row_element })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RackComponentPartition {
    pub blocks: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
}

impl RackComponentPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Orbits of the rack under all row maps, ordered by least member.
pub fn rack_components(r: &Rack) -> RackComponentPartition {
    let n = r.size();
    let mut component_of = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let b = blocks.len();
        let mut block = vec![start];
        component_of[start] = b;
        let mut k = 0;
        while k < block.len() {
            let y = block[k];
            for x in 0..n {
                let z = r.act(x, y);
                if component_of[z] == usize::MAX {
                    component_of[z] = b;
                    block.push(z);
                }
                if let Some(w) = r.act_inv(x, y) {
                    if component_of[w] == usize::MAX {
                        component_of[w] = b;
                        block.push(w);
                    }
                }
            }
            k += 1;
        }
        block.sort_unstable();
        blocks.push(block);
    }
    RackComponentPartition {
        blocks,
        component_of,
    }
}

/// The rack induced on components; checked to be well defined.
pub fn quotient_rack(r: &Rack, comps: &RackComponentPartition) -> Result<Rack> {
    let k = comps.len();
    let mut act = vec![u32::MAX; k * k];
    for x in 0..r.size() {
        for y in 0..r.size() {
            let (bx, by) = (comps.component_of[x], comps.component_of[y]);
            let bz = comps.component_of[r.act(x, y)] as u32;
            let slot = &mut act[bx * k + by];
            if *slot != u32::MAX && *slot != bz {
                return Err(Error::InvariantViolation(format!(
                    "quotient action not well defined at ({}, {})",
                    r.label(x),
                    r.label(y)
                )));
            }
            *slot = bz;
        }
    }
    let labels = comps
        .blocks
        .iter()
        .map(|b| format!("[{}]", r.label(b[0])))
        .collect();
    Ok(Rack::from_parts(k, act, labels, None))
}

/// Closure of `s` under `|>` and its inverse in both operand positions.
pub fn subrack_generated(r: &Rack, s: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; r.size()];
    let mut members: Vec<usize> = Vec::new();
    for &x in s {
        if !inside[x] {
            inside[x] = true;
            members.push(x);
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = members.clone();
        for &x in &snapshot {
            for &y in &snapshot {
                let mut new = vec![r.act(x, y)];
                new.extend(r.act_inv(x, y));
                for z in new {
                    if !inside[z] {
                        inside[z] = true;
                        members.push(z);
                        changed = true;
                    }
                }
            }
        }
    }
    members.sort_unstable();
    members
}

/// `{x | x |> y in s for all y in s}`.
pub fn normalizer(r: &Rack, s: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; r.size()];
    for &y in s {
        inside[y] = true;
    }
    (0..r.size())
        .filter(|&x| s.iter().all(|&y| inside[r.act(x, y)]))
        .collect()
}

/// Order of the permutation `y -> x |> y`.
pub fn operator_order(r: &Rack, x: usize) -> usize {
    let n = r.size();
    let mut seen = vec![false; n];
    let mut order = 1;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut y = start;
        while !seen[y] {
            seen[y] = true;
            y = r.act(x, y);
            len += 1;
        }
        order = num_integer::lcm(order, len);
    }
    order
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

/// `lhs = rhs` as words in the generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub lhs: Vec<Letter>,
    pub rhs: Vec<Letter>,
}

impl Relation {
    /// `x^-1 y x = y` for some generators.
    pub fn is_commutator(&self) -> bool {
        self.lhs.len() == 3 && self.rhs.len() == 1 && self.lhs[1] == self.rhs[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureGroupPresentation {
    pub generators: Vec<String>,
    /// One relation `[x]^-1 [y] [x] = [x |> y]` per ordered pair, `x` major.
    pub relations: Vec<Relation>,
}

pub fn structure_group_presentation(r: &Rack) -> StructureGroupPresentation {
    let n = r.size();
    let letter = |g, inverse| Letter {
        generator: g,
        inverse,
    };
    let mut relations = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            relations.push(Relation {
                lhs: vec![letter(x, true), letter(y, false), letter(x, false)],
                rhs: vec![letter(r.act(x, y), false)],
            });
        }
    }
    StructureGroupPresentation {
        generators: r.labels().to_vec(),
        relations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{class_closure, subgroup_generated};

    fn s3_rack() -> Rack {
        let g = Arc::new(GroupTable::symmetric(3));
        let c = class_closure(&g, &[g.element_by_label("(1,2)").unwrap()]);
        conjugation_rack(g, &c).unwrap()
    }

    #[test]
    fn s3_transposition_rack() {
        let r = s3_rack();
        assert_eq!(r.size(), 3);
        for x in 0..3 {
            for y in 0..3 {
                let expected = if x == y { x } else { 3 - x - y };
                assert_eq!(r.act(x, y), expected);
            }
        }
        assert!(validate_rack(&r).valid());
        assert_eq!(rack_components(&r).len(), 1);
        assert_eq!(reduced_structure_group(&r, 100).unwrap().group.order(), 6);
        assert_eq!(operator_order(&r, 0), 2);
    }

    #[test]
    fn quaternion_rack() {
        let q = Arc::new(GroupTable::quaternion());
        let c: Vec<usize> = (2..8).collect();
        let r = conjugation_rack(q.clone(), &Subset::new(&q, c).unwrap()).unwrap();
        assert_eq!(r.size(), 6);
        let (i, j) = (r.index_of_label("i").unwrap(), r.index_of_label("j").unwrap());
        assert_eq!(r.label(r.act(i, j)), "-j");
        assert!(validate_rack(&r).valid());
    }

    #[test]
    fn trivial_racks() {
        let r = Rack::trivial(5);
        assert!(validate_rack(&r).valid());
        assert_eq!(rack_components(&Rack::trivial(3)).len(), 3);
        assert_eq!(reduced_structure_group(&r, 10).unwrap().group.order(), 1);
        let z3 = Arc::new(GroupTable::cyclic(3));
        let r = conjugation_rack(z3.clone(), &Subset::new(&z3, vec![1, 2]).unwrap()).unwrap();
        assert!((0..2).all(|x| (0..2).all(|y| r.act(x, y) == y)));
        assert_eq!(reduced_structure_group(&r, 10).unwrap().group.order(), 1);
    }

    #[test]
    fn affine_and_permutation_racks() {
        for (n, a) in [(3, 2), (5, 2), (5, 3), (4, 3), (6, 5)] {
            let r = Rack::affine_quandle(n, a).unwrap();
            assert!(validate_rack(&r).valid());
            assert!((0..n).all(|x| r.act(x, x) == x));
        }
        assert!(Rack::affine_quandle(4, 2).is_err());
        let p = Perm::from_cycles(4, &[vec![1, 2, 3]]).unwrap();
        let r = Rack::permutation_rack(&p);
        assert!(validate_rack(&r).valid());
        assert_eq!(operator_order(&r, 0), 3);
        let relabeled = r.relabeled(&[2, 0, 3, 1]);
        assert!(validate_rack(&relabeled).valid());
        assert_eq!(rack_components(&relabeled).len(), rack_components(&r).len());
    }

    #[test]
    fn non_bijective_row_is_reported() {
        let r = Rack::from_table(&[vec![0, 0], vec![0, 1]], None).unwrap();
        let rep = validate_rack(&r);
        assert!(!rep.valid());
        assert_eq!(rep.non_bijective_rows, vec![0]);
        assert!(!rep.braid_ok);
    }

    #[test]
    fn rejects_non_closed_subsets() {
        let g = Arc::new(GroupTable::symmetric(3));
        let c = Subset::new(&g, vec![g.element_by_label("(1,2)").unwrap(), g.element_by_label("(1,3)").unwrap()])
            .unwrap();
        assert!(matches!(
            conjugation_rack(g, &c),
            Err(Error::NotClosedUnderConjugation { .. })
        ));
    }

    #[test]
    fn quotients_normalizers_and_presentations() {
        let r = s3_rack();
        let comps = rack_components(&r);
        let q = quotient_rack(&r, &comps).unwrap();
        assert!(validate_rack(&q).valid());
        assert!((0..q.size()).all(|x| (0..q.size()).all(|y| q.act(x, y) == y)));
        let all: Vec<usize> = (0..3).collect();
        assert_eq!(normalizer(&r, &all), all);
        assert_eq!(subrack_generated(&r, &[0, 1]), all);
        assert_eq!(subrack_generated(&r, &[0]), vec![0]);
        let p = structure_group_presentation(&r);
        assert_eq!((p.generators.len(), p.relations.len()), (3, 9));
        let p1 = structure_group_presentation(&Rack::trivial(1));
        assert_eq!(p1.relations.len(), 1);
        assert!(structure_group_presentation(&Rack::trivial(4))
            .relations
            .iter()
            .all(Relation::is_commutator));
    }

    #[test]
    fn structure_group_matches_conjugation_image() {
        let g = Arc::new(GroupTable::symmetric(4));
        let c = class_closure(&g, &[g.element_by_label("(1,2)").unwrap()]);
        let r = conjugation_rack(g.clone(), &c).unwrap();
        let sg = reduced_structure_group(&r, 1000).unwrap();
        // S4 acts faithfully on its transpositions
        let gen = subgroup_generated(&g, &c.members);
        assert_eq!(sg.group.order(), gen.len());
    }
}
