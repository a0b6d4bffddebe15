//! Braid group orbits on rack tuples.

mod domain;
mod stable;
mod union_find;

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{is_subgroup, subgroup_generated, GroupTable, Subset};
use crate::rack::{rack_components, reduced_structure_group, Rack, RackComponentPartition, StructureGroup};
use domain::{checked_power, Domain};
use union_find::ConcurrentUnionFind;

pub use stable::{stable_count_scan, stable_count_scan_all, StableScan, StableScanRow, StableWindow};

pub const DEFAULT_STATE_BUDGET: usize = 5_000_000;

/// One braid move at 1-based position `i`, acting on `(x_i, x_{i+1})`.
pub fn sigma(r: &Rack, t: &[u16], i: usize, inverse: bool) -> Result<Vec<u16>> {
    if i == 0 || i >= t.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: t.len(),
        });
    }
    if inverse && !r.rows_bijective() {
        return Err(Error::input("inverse braid moves need bijective rack rows"));
    }
    let mut out = t.to_vec();
    if inverse {
        r.sigma_inv_in_place(&mut out, i - 1);
    } else {
        r.sigma_in_place(&mut out, i - 1);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct TupleSpaceSpec {
    pub rack: Arc<Rack>,
    pub n: usize,
    /// Entry counts per rack component, in `rack_components` order.
    pub multidegree_filter: Option<Vec<usize>>,
    /// Keep only tuples whose row maps generate the reduced structure group.
    pub generating_only: bool,
    /// Keep only tuples whose entries generate exactly this subgroup of the
    /// ambient group (group-origin racks).
    pub target_subgroup: Option<Vec<usize>>,
    pub budget: usize,
}

impl TupleSpaceSpec {
    pub fn new(rack: Arc<Rack>, n: usize) -> Self {
        TupleSpaceSpec {
            rack,
            n,
            multidegree_filter: None,
            generating_only: false,
            target_subgroup: None,
            budget: DEFAULT_STATE_BUDGET,
        }
    }

    pub fn with_multidegree(mut self, m: Vec<usize>) -> Self {
        self.multidegree_filter = Some(m);
        self
    }

    pub fn generating(mut self) -> Self {
        self.generating_only = true;
        self
    }

    pub fn with_target(mut self, target: Vec<usize>) -> Self {
        self.target_subgroup = Some(target);
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn validate(&self, comps: &RackComponentPartition) -> Result<()> {
        if self.rack.size() > u16::MAX as usize {
            return Err(Error::input("rack too large for tuple encoding"));
        }
        if let Some(m) = &self.multidegree_filter {
            if m.len() != comps.len() {
                return Err(Error::input(format!(
                    "multidegree has {} entries but the rack has {} components",
                    m.len(),
                    comps.len()
                )));
            }
            if m.iter().sum::<usize>() != self.n {
                return Err(Error::input("multidegree does not sum to n"));
            }
        }
        if let Some(target) = &self.target_subgroup {
            let origin = self.rack.group_origin().ok_or(Error::NotGroupOrigin)?;
            let sub = Subset::new(&origin.group, target.clone())?;
            if !is_subgroup(&origin.group, &sub) {
                return Err(Error::input("target is not a subgroup"));
            }
        }
        if self.generating_only && !self.rack.rows_bijective() {
            return Err(Error::input("generating filter needs bijective rack rows"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRecord {
    pub canonical_rep: Vec<u16>,
    pub orbit_size: u64,
    pub multidegree: Vec<usize>,
    pub boundary_monodromy: Option<usize>,
    /// Order of the subgroup generated by the entries (group-origin racks).
    pub generated_subgroup: Option<usize>,
    /// Set by `quotient_by_conjugation`: the sorted orbit of the monodromy
    /// under the conjugating subgroup.
    pub monodromy_orbit: Option<Vec<usize>>,
    /// Set by `quotient_by_conjugation`: canonical representatives of the
    /// braid orbits merged into this record.
    pub merged: Option<Vec<Vec<u16>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerationMode {
    /// Union-find over the whole admissible set.
    Full,
    /// Orbit closures of caller-provided tuples only.
    Seeded,
}

#[derive(Clone, Debug)]
pub struct EnumerationTotals {
    pub mode: EnumerationMode,
    pub states_visited: u64,
    /// Sum of orbit sizes over the kept records.
    pub admissible_tuples: u64,
    pub wall_time: Duration,
}

struct ResolverBase {
    domain: Domain,
    roots: Vec<u32>,
}

#[derive(Clone)]
struct Resolver {
    base: Arc<ResolverBase>,
    record_of_root: HashMap<u32, usize>,
}

#[derive(Clone)]
pub struct ComponentCatalog {
    pub spec: TupleSpaceSpec,
    pub records: Vec<ComponentRecord>,
    pub totals: EnumerationTotals,
    pub quotient_by: Option<Vec<usize>>,
    index: HashMap<Vec<u16>, usize>,
    resolver: Option<Resolver>,
}

impl std::fmt::Debug for ComponentCatalog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComponentCatalog")
            .field("n", &self.spec.n)
            .field("records", &self.records)
            .field("quotient_by", &self.quotient_by)
            .finish()
    }
}

impl ComponentCatalog {
    /// Reassembles a catalog, e.g. after deserialization.
    pub fn from_parts(
        spec: TupleSpaceSpec,
        mut records: Vec<ComponentRecord>,
        mode: EnumerationMode,
        quotient_by: Option<Vec<usize>>,
    ) -> Result<Self> {
        records.sort_by(|a, b| a.canonical_rep.cmp(&b.canonical_rep));
        for r in &records {
            if r.canonical_rep.len() != spec.n || r.canonical_rep.iter().any(|&x| x as usize >= spec.rack.size()) {
                return Err(Error::input("record does not match the tuple space"));
            }
        }
        let admissible = records.iter().map(|r| r.orbit_size).sum();
        Ok(Self::assemble(
            spec,
            records,
            EnumerationTotals {
                mode,
                states_visited: 0,
                admissible_tuples: admissible,
                wall_time: Duration::ZERO,
            },
            quotient_by,
            None,
        ))
    }

    fn assemble(
        spec: TupleSpaceSpec,
        records: Vec<ComponentRecord>,
        totals: EnumerationTotals,
        quotient_by: Option<Vec<usize>>,
        resolver: Option<Resolver>,
    ) -> Self {
        let mut index = HashMap::new();
        for (k, r) in records.iter().enumerate() {
            match &r.merged {
                Some(reps) => {
                    for rep in reps {
                        index.insert(rep.clone(), k);
                    }
                }
                None => {
                    index.insert(r.canonical_rep.clone(), k);
                }
            }
        }
        ComponentCatalog {
            spec,
            records,
            totals,
            quotient_by,
            index,
            resolver,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn rack(&self) -> &Rack {
        &self.spec.rack
    }

    /// Index of the record containing `t`.
    pub fn resolve(&self, t: &[u16]) -> Result<usize> {
        let left = || Error::TupleLeftCatalog(self.render(t));
        if t.len() != self.spec.n {
            return Err(left());
        }
        if let Some(res) = &self.resolver {
            return match res.base.domain.index_of(t) {
                Some(i) => res
                    .record_of_root
                    .get(&res.base.roots[i])
                    .copied()
                    .ok_or_else(left),
                None => Err(left()),
            };
        }
        let (rep, _) = orbit_closure(&self.spec.rack, t, self.spec.budget)?;
        self.index.get(&rep).copied().ok_or_else(left)
    }

    pub fn render(&self, t: &[u16]) -> String {
        let parts: Vec<&str> = t.iter().map(|&x| self.spec.rack.label(x as usize)).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// Invariants and filters evaluated on tuples of one tuple space.
struct TupleContext<'a> {
    rack: &'a Rack,
    comps: RackComponentPartition,
    structure: Option<StructureGroup>,
    target: Option<Vec<usize>>,
    generating_only: bool,
}

impl<'a> TupleContext<'a> {
    fn new(spec: &'a TupleSpaceSpec) -> Result<Self> {
        let comps = rack_components(&spec.rack);
        spec.validate(&comps)?;
        let structure = if spec.generating_only {
            Some(reduced_structure_group(&spec.rack, spec.budget.max(crate::group::DEFAULT_GROUP_BUDGET))?)
        } else {
            None
        };
        let mut target = spec.target_subgroup.clone();
        if let Some(t) = &mut target {
            t.sort_unstable();
            t.dedup();
        }
        Ok(TupleContext {
            rack: &spec.rack,
            comps,
            structure,
            target,
            generating_only: spec.generating_only,
        })
    }

    fn plain(rack: &'a Rack) -> Self {
        TupleContext {
            rack,
            comps: rack_components(rack),
            structure: None,
            target: None,
            generating_only: false,
        }
    }

    fn multidegree(&self, t: &[u16]) -> Vec<usize> {
        let mut m = vec![0; self.comps.len()];
        for &x in t {
            m[self.comps.component_of[x as usize]] += 1;
        }
        m
    }

    fn monodromy(&self, t: &[u16]) -> Option<usize> {
        let origin = self.rack.group_origin()?;
        let g = &origin.group;
        Some(
            t.iter()
                .fold(g.identity(), |acc, &x| g.mul(acc, origin.elements[x as usize])),
        )
    }

    /// Monodromy and a multidegree fingerprint, both braid invariants.
    fn signature(&self, t: &[u16]) -> (u32, u64) {
        let mono = self.monodromy(t).unwrap_or(0) as u32;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut counts = vec![0u32; self.comps.len()];
        for &x in t {
            counts[self.comps.component_of[x as usize]] += 1;
        }
        for c in counts {
            h = (h ^ c as u64).wrapping_mul(0x0100_0000_01b3);
        }
        (mono, h)
    }

    fn distinct_entries(t: &[u16]) -> Vec<u16> {
        let mut e = t.to_vec();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// `(order of the generated subgroup, passes filters)` for a set of entries.
    fn evaluate(&self, entries: &[u16]) -> (Option<usize>, bool) {
        let mut keep = true;
        let mut order = None;
        if let Some(origin) = self.rack.group_origin() {
            let elems: Vec<usize> = entries.iter().map(|&x| origin.elements[x as usize]).collect();
            let sub = subgroup_generated(&origin.group, &elems);
            order = Some(sub.len());
            if let Some(target) = &self.target {
                keep &= sub.members == *target;
            }
        }
        if self.generating_only {
            let sg = self.structure.as_ref().expect("structure group present");
            let rows: Vec<usize> = entries.iter().map(|&x| sg.row_element[x as usize]).collect();
            keep &= subgroup_generated(&sg.group, &rows).len() == sg.group.order();
        }
        (order, keep)
    }

    fn record(&self, rep: Vec<u16>, size: u64, generated: Option<usize>) -> ComponentRecord {
        ComponentRecord {
            multidegree: self.multidegree(&rep),
            boundary_monodromy: self.monodromy(&rep),
            generated_subgroup: generated,
            canonical_rep: rep,
            orbit_size: size,
            monodromy_orbit: None,
            merged: None,
        }
    }
}

/// Complete orbit partition of the admissible tuple set.
///
/// Runs on the current rayon pool; the result does not depend on its size.
pub fn enumerate_components(spec: &TupleSpaceSpec) -> Result<ComponentCatalog> {
    let start = Instant::now();
    let ctx = TupleContext::new(spec)?;
    let n = spec.n;
    let domain = match &spec.multidegree_filter {
        Some(m) => Domain::with_multidegree(spec.rack.size(), &ctx.comps.component_of, m, n, spec.budget)?,
        None => Domain::dense(spec.rack.size(), n, spec.budget)?,
    };
    let len = domain.len();

    let signatures: Vec<(u32, u64)> = (0..len)
        .into_par_iter()
        .map_init(
            || vec![0u16; n],
            |t, i| {
                domain.decode(i, t);
                ctx.signature(t)
            },
        )
        .collect();

    let uf = ConcurrentUnionFind::new(len);
    let violation = AtomicBool::new(false);
    (0..len).into_par_iter().for_each_init(
        || (vec![0u16; n], vec![0u16; n]),
        |(t, u), i| {
            domain.decode(i, t);
            for k in 0..n.saturating_sub(1) {
                u.copy_from_slice(t);
                spec.rack.sigma_in_place(u, k);
                match domain.index_of(u) {
                    Some(j) if signatures[j] == signatures[i] => uf.union(i as u32, j as u32),
                    _ => violation.store(true, Ordering::Relaxed),
                }
            }
        },
    );
    if violation.load(Ordering::Relaxed) {
        return Err(Error::InvariantViolation(
            "braid move changed monodromy or multidegree".into(),
        ));
    }

    let roots: Vec<u32> = (0..len as u32).into_par_iter().map(|i| uf.find(i)).collect();
    let mut sizes = vec![0u64; len];
    for &r in &roots {
        sizes[r as usize] += 1;
    }

    let mut cache: HashMap<Vec<u16>, (Option<usize>, bool)> = HashMap::new();
    let mut records = Vec::new();
    let mut record_of_root = HashMap::new();
    let mut t = vec![0u16; n];
    for (i, &r) in roots.iter().enumerate() {
        if r as usize != i {
            continue;
        }
        domain.decode(i, &mut t);
        let key = TupleContext::distinct_entries(&t);
        let (generated, keep) = *cache.entry(key).or_insert_with_key(|k| ctx.evaluate(k));
        if keep {
            record_of_root.insert(r, records.len());
            records.push(ctx.record(t.clone(), sizes[i], generated));
        }
    }
    let admissible = records.iter().map(|r| r.orbit_size).sum();
    let totals = EnumerationTotals {
        mode: EnumerationMode::Full,
        states_visited: len as u64,
        admissible_tuples: admissible,
        wall_time: start.elapsed(),
    };
    let resolver = Resolver {
        base: Arc::new(ResolverBase { domain, roots }),
        record_of_root,
    };
    Ok(ComponentCatalog::assemble(spec.clone(), records, totals, None, Some(resolver)))
}

/// Full enumeration when the admissible set fits the budget, otherwise the
/// orbits of the given tuples only. Seeds outside the admissible set are
/// skipped.
pub fn enumerate_components_from_seeds(spec: &TupleSpaceSpec, seeds: &[Vec<u16>]) -> Result<ComponentCatalog> {
    match enumerate_components(spec) {
        Err(Error::BudgetExceeded { .. }) => {}
        other => return other,
    }
    let start = Instant::now();
    let ctx = TupleContext::new(spec)?;
    let mut visited = Visited::new(spec.rack.size(), spec.n);
    let mut records = Vec::new();
    for seed in seeds {
        if seed.len() != spec.n || seed.iter().any(|&x| x as usize >= spec.rack.size()) {
            return Err(Error::input("seed does not lie in the tuple space"));
        }
        if let Some(m) = &spec.multidegree_filter {
            if ctx.multidegree(seed) != *m {
                continue;
            }
        }
        if visited.contains(seed) {
            continue;
        }
        let remaining = spec.budget.saturating_sub(visited.len());
        let (rep, size) = closure_into(&ctx, seed, remaining, &mut visited)
            .map_err(|e| with_reached(e, spec.budget, visited.len()))?;
        let (generated, keep) = ctx.evaluate(&TupleContext::distinct_entries(&rep));
        if keep {
            records.push(ctx.record(rep, size, generated));
        }
    }
    records.sort_by(|a, b| a.canonical_rep.cmp(&b.canonical_rep));
    let totals = EnumerationTotals {
        mode: EnumerationMode::Seeded,
        states_visited: visited.len() as u64,
        admissible_tuples: records.iter().map(|r| r.orbit_size).sum(),
        wall_time: start.elapsed(),
    };
    Ok(ComponentCatalog::assemble(spec.clone(), records, totals, None, None))
}

fn with_reached(e: Error, budget: usize, reached: usize) -> Error {
    match e {
        Error::BudgetExceeded { what, .. } => Error::BudgetExceeded {
            what,
            limit: budget as u64,
            reached: reached as u64,
        },
        other => other,
    }
}

/// Visited-tuple set keyed by packed codes when they fit in a word.
enum Visited {
    Packed { base: u64, set: HashSet<u64> },
    Bytes(HashSet<Vec<u16>>),
}

impl Visited {
    fn new(base: usize, n: usize) -> Self {
        if checked_power(base as u64, n).is_some() {
            Visited::Packed {
                base: base as u64,
                set: HashSet::new(),
            }
        } else {
            Visited::Bytes(HashSet::new())
        }
    }

    fn pack(base: u64, t: &[u16]) -> u64 {
        t.iter().fold(0, |acc, &x| acc * base + x as u64)
    }

    fn insert(&mut self, t: &[u16]) -> bool {
        match self {
            Visited::Packed { base, set } => set.insert(Self::pack(*base, t)),
            Visited::Bytes(set) => set.insert(t.to_vec()),
        }
    }

    fn contains(&self, t: &[u16]) -> bool {
        match self {
            Visited::Packed { base, set } => set.contains(&Self::pack(*base, t)),
            Visited::Bytes(set) => set.contains(t),
        }
    }

    fn len(&self) -> usize {
        match self {
            Visited::Packed { set, .. } => set.len(),
            Visited::Bytes(set) => set.len(),
        }
    }
}

/// Breadth-first closure of `{t}` under forward braid moves, which on a
/// finite set reaches the same orbit as moves in both directions.
fn closure_into(ctx: &TupleContext, t: &[u16], budget: usize, visited: &mut Visited) -> Result<(Vec<u16>, u64)> {
    let sig = ctx.signature(t);
    let mut queue = vec![t.to_vec()];
    visited.insert(t);
    let mut min = t.to_vec();
    let mut head = 0;
    while head < queue.len() {
        let cur = queue[head].clone();
        head += 1;
        for k in 0..cur.len().saturating_sub(1) {
            let mut u = cur.clone();
            ctx.rack.sigma_in_place(&mut u, k);
            if visited.insert(&u) {
                if ctx.signature(&u) != sig {
                    return Err(Error::InvariantViolation(
                        "braid move changed monodromy or multidegree".into(),
                    ));
                }
                if queue.len() >= budget {
                    return Err(Error::budget("orbit states", budget, queue.len() as u64 + 1));
                }
                if u < min {
                    min = u.clone();
                }
                queue.push(u);
            }
        }
    }
    Ok((min, queue.len() as u64))
}

fn orbit_closure(rack: &Rack, t: &[u16], budget: usize) -> Result<(Vec<u16>, u64)> {
    let ctx = TupleContext::plain(rack);
    closure_into(&ctx, t, budget, &mut Visited::new(rack.size(), t.len()))
}

/// The braid orbit of a single tuple.
pub fn component_of(rack: &Rack, t: &[u16], budget: usize) -> Result<ComponentRecord> {
    if t.iter().any(|&x| x as usize >= rack.size()) {
        return Err(Error::input("tuple entry outside the rack"));
    }
    let ctx = TupleContext::plain(rack);
    let (rep, size) = closure_into(&ctx, t, budget, &mut Visited::new(rack.size(), t.len()))?;
    let (generated, _) = ctx.evaluate(&TupleContext::distinct_entries(&rep));
    Ok(ctx.record(rep, size, generated))
}

/// Smallest generating set found greedily in index order.
pub(crate) fn greedy_generators(g: &GroupTable, members: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = subgroup_generated(g, &[]);
    for &x in members {
        if !span.contains(x) {
            gens.push(x);
            span = subgroup_generated(g, &gens);
        }
    }
    gens
}

/// Simultaneous conjugation `t -> (k^-1 t_1 k, ..., k^-1 t_n k)`.
pub fn conjugate_tuple(rack: &Rack, t: &[u16], k: usize) -> Result<Vec<u16>> {
    let origin = rack.group_origin().ok_or(Error::NotGroupOrigin)?;
    let g = &origin.group;
    t.iter()
        .map(|&x| {
            let y = g.conj(origin.elements[x as usize], k);
            origin
                .index_of(y)
                .map(|i| i as u16)
                .ok_or_else(|| Error::KDoesNotNormalize {
                    element: rack.label(x as usize).to_string(),
                    conjugator: g.label(k).to_string(),
                })
        })
        .collect()
}

/// Checks that `k` is a subgroup normalizing `c` and returns a generating set.
pub(crate) fn normalizing_generators(rack: &Rack, k: &[usize]) -> Result<Vec<usize>> {
    let origin = rack.group_origin().ok_or(Error::NotGroupOrigin)?;
    let g = &origin.group;
    let sub = Subset::new(g, k.to_vec())?;
    if !is_subgroup(g, &sub) {
        return Err(Error::input("K is not a subgroup"));
    }
    let gens = greedy_generators(g, &sub.members);
    for &h in &gens {
        for &x in &origin.elements {
            if origin.index_of(g.conj(x, h)).is_none() {
                return Err(Error::KDoesNotNormalize {
                    element: g.label(x).to_string(),
                    conjugator: g.label(h).to_string(),
                });
            }
        }
    }
    Ok(gens)
}

/// Merges records that become braid-equivalent after simultaneous
/// conjugation by an element of `k`.
pub fn quotient_by_conjugation(catalog: &ComponentCatalog, k: &[usize]) -> Result<ComponentCatalog> {
    if catalog.quotient_by.is_some() {
        return Err(Error::input("catalog is already a conjugation quotient"));
    }
    let rack = catalog.rack();
    let gens = normalizing_generators(rack, k)?;
    let origin = rack.group_origin().expect("checked above");
    let g = &origin.group;
    let m = catalog.len();
    let uf = ConcurrentUnionFind::new(m);
    for (i, rec) in catalog.records.iter().enumerate() {
        for &h in &gens {
            let j = catalog.resolve(&conjugate_tuple(rack, &rec.canonical_rep, h)?)?;
            uf.union(i as u32, j as u32);
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        members[uf.find(i as u32) as usize].push(i);
    }
    let mut records = Vec::new();
    let mut new_index = vec![0usize; m];
    for (root, group) in members.iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let first = &catalog.records[root];
        let monodromy_orbit = first.boundary_monodromy.map(|h| {
            let mut orbit: Vec<usize> = k.iter().map(|&x| g.conj(h, x)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            orbit
        });
        for &i in group {
            new_index[i] = records.len();
        }
        records.push(ComponentRecord {
            canonical_rep: first.canonical_rep.clone(),
            orbit_size: group.iter().map(|&i| catalog.records[i].orbit_size).sum(),
            multidegree: first.multidegree.clone(),
            boundary_monodromy: first.boundary_monodromy,
            generated_subgroup: first.generated_subgroup,
            monodromy_orbit,
            merged: Some(group.iter().map(|&i| catalog.records[i].canonical_rep.clone()).collect()),
        });
    }
    let resolver = catalog.resolver.as_ref().map(|r| Resolver {
        base: r.base.clone(),
        record_of_root: r.record_of_root.iter().map(|(&root, &i)| (root, new_index[i])).collect(),
    });
    let mut quotient_by = k.to_vec();
    quotient_by.sort_unstable();
    Ok(ComponentCatalog::assemble(
        catalog.spec.clone(),
        records,
        catalog.totals.clone(),
        Some(quotient_by),
        resolver,
    ))
}

#[cfg(test)]
mod tests;
