//! Frobenius descent on components through the `q^-1`-powering action.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::Serialize;

use crate::braid::{
    conjugate_tuple, enumerate_components, normalizing_generators, ComponentCatalog, TupleSpaceSpec,
};
use crate::error::{Error, Result};
use crate::group::{conjugacy_partition, ConjClassPartition, GroupTable, Subset};
use crate::rack::{conjugation_rack, rack_components};

/// `x -> x^q` on `c` and its inverse, as permutations of the sorted members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoweringMap {
    pub q: u64,
    pub elements: Vec<usize>,
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

impl PoweringMap {
    /// Group element `x^(q^-1)` for `x` in `c`.
    pub fn back_element(&self, x: usize) -> Option<usize> {
        let i = self.elements.binary_search(&x).ok()?;
        Some(self.elements[self.backward[i]])
    }

    pub fn forward_element(&self, x: usize) -> Option<usize> {
        let i = self.elements.binary_search(&x).ok()?;
        Some(self.elements[self.forward[i]])
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Whether `x -> x^(q^-1)` is an automorphism of the conjugation rack on
    /// `c`. When it is, entrywise powering commutes with braid moves.
    pub fn respects_rack(&self, g: &GroupTable) -> bool {
        self.elements.iter().all(|&x| {
            self.elements.iter().all(|&y| {
                let lhs = self.back_element(g.conj(x, y));
                let rhs = g.conj(self.back_element(x).unwrap(), self.back_element(y).unwrap());
                lhs == Some(rhs)
            })
        })
    }

    /// Entrywise `q^-1`-powering of a tuple of indices into `c`.
    pub fn back_tuple(&self, t: &[u16]) -> Vec<u16> {
        t.iter().map(|&x| self.backward[x as usize] as u16).collect()
    }
}

pub fn q_powering(g: &GroupTable, c: &Subset, q: u64) -> Result<PoweringMap> {
    if num_integer::gcd(q, g.order() as u64) != 1 {
        return Err(Error::GcdViolation {
            q,
            modulus: g.order() as u64,
        });
    }
    let elements = c.members.clone();
    let forward = elements
        .iter()
        .map(|&x| {
            let y = g.pow(x, q);
            elements
                .binary_search(&y)
                .map_err(|_| Error::NotClosedUnderPowering {
                    q,
                    element: g.label(x).to_string(),
                    image: g.label(y).to_string(),
                })
        })
        .collect::<Result<Vec<usize>>>()?;
    let mut backward = vec![usize::MAX; forward.len()];
    for (i, &j) in forward.iter().enumerate() {
        backward[j] = i;
    }
    debug_assert!(backward.iter().all(|&b| b != usize::MAX));
    Ok(PoweringMap {
        q,
        elements,
        forward,
        backward,
    })
}

fn check_compatible(catalog: &ComponentCatalog, pm: &PoweringMap) -> Result<()> {
    let origin = catalog.rack().group_origin().ok_or(Error::NotGroupOrigin)?;
    if origin.elements != pm.elements {
        return Err(Error::input("powering map and catalog use different subsets c"));
    }
    if catalog.quotient_by.is_some() {
        return Err(Error::input("powering needs a catalog of braid orbits, not a conjugation quotient"));
    }
    Ok(())
}

/// The permutation of records induced by `[g_1 ... g_n] -> [g_1^(q^-1) ... g_n^(q^-1)]`.
pub fn powering_action_on_components(catalog: &ComponentCatalog, pm: &PoweringMap) -> Result<Vec<usize>> {
    check_compatible(catalog, pm)?;
    let images = catalog
        .records
        .iter()
        .map(|r| catalog.resolve(&pm.back_tuple(&r.canonical_rep)))
        .collect::<Result<Vec<usize>>>()?;
    let mut hit = vec![false; images.len()];
    for &j in &images {
        if std::mem::replace(&mut hit[j], true) {
            return Err(Error::InvariantViolation(
                "entrywise powering of canonical representatives is not injective on components".into(),
            ));
        }
    }
    Ok(images)
}

/// Canonical representative of the braid orbit of `t`, looked up in the
/// catalog when possible and computed by closure otherwise.
fn canonical_of(catalog: &ComponentCatalog, t: &[u16]) -> Result<Vec<u16>> {
    match catalog.resolve(t) {
        Ok(i) => Ok(catalog.records[i].canonical_rep.clone()),
        Err(Error::TupleLeftCatalog(_)) => {
            Ok(crate::braid::component_of(catalog.rack(), t, catalog.spec.budget)?.canonical_rep)
        }
        Err(e) => Err(e),
    }
}

/// Whether some `h` in `k` makes the `q^-1`-powered representative
/// braid-equivalent to the simultaneous conjugate `h^-1 rep h`.
pub fn is_geometrically_irreducible(
    record: usize,
    catalog: &ComponentCatalog,
    pm: &PoweringMap,
    k: &[usize],
) -> Result<bool> {
    check_compatible(catalog, pm)?;
    normalizing_generators(catalog.rack(), k)?;
    let rep = &catalog
        .records
        .get(record)
        .ok_or(Error::IndexOutOfRange {
            index: record,
            len: catalog.len(),
        })?
        .canonical_rep;
    let target = canonical_of(catalog, &pm.back_tuple(rep))?;
    for &h in k {
        if canonical_of(catalog, &conjugate_tuple(catalog.rack(), rep, h)?)? == target {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether some `h` in `k` fixes the formal class sum: `sum n_i c_i =
/// sum n_i h c_i^(q^-1) h^-1`, with classes taken from `partition`.
pub fn multidegree_necessary_condition(
    g: &GroupTable,
    multidegree: &[usize],
    partition: &ConjClassPartition,
    pm: &PoweringMap,
    k: &[usize],
) -> Result<bool> {
    if multidegree.len() != partition.len() {
        return Err(Error::input("multidegree length differs from the class count"));
    }
    for &h in k {
        let mut image = vec![0usize; partition.len()];
        for (i, block) in partition.blocks.iter().enumerate() {
            let x = pm
                .back_element(block[0])
                .ok_or_else(|| Error::input("class lies outside the powering map"))?;
            let y = g.mul(g.mul(h, x), g.inv(h));
            let j = partition
                .class_of(y)
                .ok_or_else(|| Error::input("conjugated class leaves the partition"))?;
            image[j] += multidegree[i];
        }
        if image == multidegree {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Number of orbits of `x -> x^q` on the `G`-conjugacy classes in `c`.
pub fn d_constant(g: &GroupTable, c: &Subset, q: u64) -> Result<usize> {
    let pm = q_powering(g, c, q)?;
    let all: Vec<usize> = (0..g.order()).collect();
    let classes = conjugacy_partition(g, c, &all)?;
    let map: Vec<usize> = classes
        .blocks
        .iter()
        .map(|b| classes.class_of(pm.forward_element(b[0]).expect("closed")).expect("closed"))
        .collect();
    Ok(count_cycles(&map))
}

pub(crate) fn count_cycles(map: &[usize]) -> usize {
    let mut seen = vec![false; map.len()];
    let mut cycles = 0;
    for start in 0..map.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = map[x];
        }
    }
    cycles
}

#[derive(Clone, Debug)]
pub struct PeriodicityQuery {
    pub q: u64,
    /// Conjugating subgroup for the descent test.
    pub k: Vec<usize>,
    /// Residues are taken modulo this (typically `|G|` or `|G|^2`).
    pub modulus: usize,
    /// Keep only multidegrees with these residues, one per rack component.
    pub residues: Option<Vec<usize>>,
    pub n_range: RangeInclusive<usize>,
    /// Count only components with this boundary monodromy.
    pub monodromy: Option<usize>,
    /// Count only tuples generating `G`.
    pub connected: bool,
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicityRow {
    pub multidegree: Vec<usize>,
    pub residues: Vec<usize>,
    /// `None` when the necessary condition already rules out fixed components.
    pub components: Option<u64>,
    pub fixed: u64,
    pub necessary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueSummary {
    pub residues: Vec<usize>,
    /// Least `t` such that all rows with every entry `>= t` share one fixed count.
    pub threshold: usize,
    pub stable_fixed: u64,
    /// Rows at or above the threshold.
    pub supporting_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicityReport {
    pub modulus: usize,
    pub rows: Vec<PeriodicityRow>,
    pub summaries: Vec<ResidueSummary>,
}

/// Tabulates Frobenius-fixed component counts per multidegree.
pub fn periodicity_scan(g: Arc<GroupTable>, c: &Subset, query: &PeriodicityQuery) -> Result<PeriodicityReport> {
    if query.modulus == 0 {
        return Err(Error::input("modulus must be positive"));
    }
    let pm = q_powering(&g, c, query.q)?;
    let rack = Arc::new(conjugation_rack(g.clone(), c)?);
    normalizing_generators(&rack, &query.k)?;
    let comps = rack_components(&rack);
    let acting = c.members.clone();
    // blocks of this partition coincide with the rack components
    let partition = conjugacy_partition(&g, c, &acting)?;
    if let Some(r) = &query.residues {
        if r.len() != comps.len() {
            return Err(Error::input("one residue per rack component is required"));
        }
    }
    let mut rows = Vec::new();
    for n in query.n_range.clone() {
        for m in compositions(n, comps.len()) {
            let residues: Vec<usize> = m.iter().map(|&x| x % query.modulus).collect();
            if let Some(r) = &query.residues {
                if r.iter().map(|x| x % query.modulus).ne(residues.iter().copied()) {
                    continue;
                }
            }
            let necessary = multidegree_necessary_condition(&g, &m, &partition, &pm, &query.k)?;
            if !necessary {
                rows.push(PeriodicityRow {
                    multidegree: m,
                    residues,
                    components: None,
                    fixed: 0,
                    necessary,
                });
                continue;
            }
            let mut spec = TupleSpaceSpec::new(rack.clone(), n)
                .with_multidegree(m.clone())
                .with_budget(query.budget);
            if query.connected {
                spec = spec.with_target((0..g.order()).collect());
            }
            let catalog = enumerate_components(&spec)?;
            let mut components = 0;
            let mut fixed = 0;
            for (i, rec) in catalog.records.iter().enumerate() {
                if query.monodromy.is_some() && rec.boundary_monodromy != query.monodromy {
                    continue;
                }
                components += 1;
                if is_geometrically_irreducible(i, &catalog, &pm, &query.k)? {
                    fixed += 1;
                }
            }
            rows.push(PeriodicityRow {
                multidegree: m,
                residues,
                components: Some(components),
                fixed,
                necessary,
            });
        }
    }
    let summaries = summarize(&rows);
    Ok(PeriodicityReport {
        modulus: query.modulus,
        rows,
        summaries,
    })
}

fn summarize(rows: &[PeriodicityRow]) -> Vec<ResidueSummary> {
    let mut groups: BTreeMap<&[usize], Vec<&PeriodicityRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(&r.residues).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(residues, rows)| {
            let mut by_min: Vec<(usize, u64)> = rows
                .iter()
                .map(|r| (r.multidegree.iter().copied().min().unwrap_or(0), r.fixed))
                .collect();
            by_min.sort_unstable();
            let (top, value) = *by_min.last().expect("nonempty group");
            let mut threshold = top;
            for &(t, f) in by_min.iter().rev() {
                if f != value {
                    break;
                }
                threshold = t;
            }
            // rows sharing the breaking minimum must also agree
            while by_min.iter().any(|&(t, f)| t >= threshold && f != value) {
                threshold += 1;
            }
            ResidueSummary {
                residues: residues.to_vec(),
                threshold,
                stable_fixed: value,
                supporting_rows: by_min.iter().filter(|&&(t, _)| t >= threshold).count(),
            }
        })
        .collect()
}

/// All `parts`-tuples of nonnegative integers summing to `n`, lexicographically.
pub(crate) fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=n {
            cur.push(first);
            go(n - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(n, parts, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{class_closure, Subset};

    fn z3() -> (Arc<GroupTable>, Subset) {
        let g = Arc::new(GroupTable::cyclic(3));
        let c = Subset::new(&g, vec![1, 2]).unwrap();
        (g, c)
    }

    #[test]
    fn powering_examples() {
        let (g, c) = z3();
        let pm = q_powering(&g, &c, 2).unwrap();
        assert_eq!(pm.forward, vec![1, 0]);
        assert!(q_powering(&g, &c, 4).unwrap().is_identity());
        assert!(matches!(q_powering(&g, &c, 3), Err(Error::GcdViolation { .. })));
        let s3 = GroupTable::symmetric(3);
        let t = class_closure(&s3, &[s3.element_by_label("(1,2)").unwrap()]);
        for q in [5, 7, 11, 13] {
            assert!(q_powering(&s3, &t, q).unwrap().is_identity());
        }
        // a single 3-cycle is not closed under squaring
        let r = Subset::new(&s3, vec![s3.element_by_label("(1,2,3)").unwrap()]).unwrap();
        assert!(matches!(
            q_powering(&s3, &r, 5),
            Err(Error::NotClosedUnderPowering { .. })
        ));
    }

    #[test]
    fn z3_fixed_iff_balanced() {
        let (g, c) = z3();
        let pm = q_powering(&g, &c, 2).unwrap();
        let rack = Arc::new(conjugation_rack(g.clone(), &c).unwrap());
        let partition = conjugacy_partition(&g, &c, &c.members).unwrap();
        for n in 1..=8 {
            for m in compositions(n, 2) {
                let cat = enumerate_components(&TupleSpaceSpec::new(rack.clone(), n).with_multidegree(m.clone())).unwrap();
                assert_eq!(cat.len(), 1);
                let fixed = is_geometrically_irreducible(0, &cat, &pm, &[0]).unwrap();
                assert_eq!(fixed, m[0] == m[1]);
                let nec = multidegree_necessary_condition(&g, &m, &partition, &pm, &[0]).unwrap();
                assert!(!fixed || nec);
            }
        }
        assert!(!multidegree_necessary_condition(&g, &[3, 5], &partition, &pm, &[0]).unwrap());
    }

    #[test]
    fn nonabelian_powering_can_fail_to_descend() {
        let s3 = Arc::new(GroupTable::symmetric(3));
        let c = Subset::non_identity(&s3);
        let pm = q_powering(&s3, &c, 5).unwrap();
        assert!(!pm.respects_rack(&s3));
        let rack = Arc::new(conjugation_rack(s3.clone(), &c).unwrap());
        let cat = enumerate_components(&TupleSpaceSpec::new(rack, 2)).unwrap();
        assert!(matches!(
            powering_action_on_components(&cat, &pm),
            Err(Error::InvariantViolation(_))
        ));
        let t = class_closure(&s3, &[s3.element_by_label("(1,2)").unwrap()]);
        assert!(q_powering(&s3, &t, 5).unwrap().respects_rack(&s3));
        let (g, c) = z3();
        assert!(q_powering(&g, &c, 2).unwrap().respects_rack(&g));
    }

    #[test]
    fn action_on_full_catalog() {
        let (g, c) = z3();
        let pm = q_powering(&g, &c, 2).unwrap();
        let rack = Arc::new(conjugation_rack(g.clone(), &c).unwrap());
        let cat = enumerate_components(&TupleSpaceSpec::new(rack, 2)).unwrap();
        let perm = powering_action_on_components(&cat, &pm).unwrap();
        let rec = cat.resolve(&[0, 1]).unwrap();
        assert_eq!(perm[rec], cat.resolve(&[1, 0]).unwrap());
        let twice: Vec<usize> = perm.iter().map(|&i| perm[i]).collect();
        assert_eq!(twice, (0..cat.len()).collect::<Vec<_>>());
        let id = q_powering(&g, &c, 4).unwrap();
        assert_eq!(powering_action_on_components(&cat, &id).unwrap(), (0..cat.len()).collect::<Vec<_>>());
        // multidegree-filtered catalogs are not closed under the swap
        let rack = cat.spec.rack.clone();
        let md = enumerate_components(&TupleSpaceSpec::new(rack, 3).with_multidegree(vec![1, 2])).unwrap();
        assert!(matches!(
            powering_action_on_components(&md, &pm),
            Err(Error::TupleLeftCatalog(_))
        ));
    }

    #[test]
    fn s3_every_component_fixed() {
        let g = Arc::new(GroupTable::symmetric(3));
        let c = class_closure(&g, &[g.element_by_label("(1,2)").unwrap()]);
        let pm = q_powering(&g, &c, 5).unwrap();
        let rack = Arc::new(conjugation_rack(g.clone(), &c).unwrap());
        let cat = enumerate_components(&TupleSpaceSpec::new(rack, 4)).unwrap();
        for i in 0..cat.len() {
            assert!(is_geometrically_irreducible(i, &cat, &pm, &[g.identity()]).unwrap());
        }
    }

    #[test]
    fn d_constants() {
        let g = GroupTable::symmetric(3);
        let c = class_closure(&g, &[g.element_by_label("(1,2)").unwrap()]);
        assert_eq!(d_constant(&g, &c, 5).unwrap(), 1);
        let (z, c) = z3();
        assert_eq!(d_constant(&z, &c, 2).unwrap(), 1);
        assert_eq!(d_constant(&z, &c, 5).unwrap(), 1);
        assert_eq!(d_constant(&z, &c, 4).unwrap(), 2);
        assert_eq!(d_constant(&z, &c, 7).unwrap(), 2);
    }

    #[test]
    fn z3_periodicity() {
        let (g, c) = z3();
        let report = periodicity_scan(
            g,
            &c,
            &PeriodicityQuery {
                q: 2,
                k: vec![0],
                modulus: 3,
                residues: None,
                n_range: 0..=9,
                monodromy: None,
                connected: false,
                budget: 100_000,
            },
        )
        .unwrap();
        for row in &report.rows {
            assert_eq!(row.fixed > 0, row.multidegree[0] == row.multidegree[1]);
        }
        assert_eq!(report.summaries.len(), 9);
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
    }
}
