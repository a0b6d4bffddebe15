//! Component counts of connected tuples as `n` grows.

use std::sync::Arc;

use serde::Serialize;

use super::{enumerate_components, ComponentCatalog, TupleSpaceSpec};
use crate::error::{Error, Result};
use crate::group::{abelianization, conjugacy_classes, conjugacy_partition, subgroup_generated, GroupTable, Subset};
use crate::rack::conjugation_rack;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableScanRow {
    pub n: usize,
    pub count: u64,
    /// `n [c] != [g]` in `G^ab`, which forces the count to vanish.
    pub obstructed: bool,
}

/// Longest run of unobstructed `n`, ending at the last scanned one, on
/// which the count is constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableWindow {
    pub start: usize,
    pub end: usize,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableScan {
    pub monodromy: usize,
    pub rows: Vec<StableScanRow>,
    pub window: Option<StableWindow>,
}

impl StableScan {
    /// Obstructed rows all have count zero.
    pub fn obstruction_consistent(&self) -> bool {
        self.rows.iter().all(|r| !r.obstructed || r.count == 0)
    }
}

/// Connected-component counts for a single monodromy.
pub fn stable_count_scan(
    g: Arc<GroupTable>,
    c: &Subset,
    monodromy: usize,
    ns: &[usize],
    budget: usize,
) -> Result<StableScan> {
    if monodromy >= g.order() {
        return Err(Error::IndexOutOfRange {
            index: monodromy,
            len: g.order(),
        });
    }
    Ok(scan(g, c, &[monodromy], ns, budget)?.remove(0))
}

/// One scan per conjugacy class of `G`, keyed by the least class member;
/// counts depend only on the class of the monodromy.
pub fn stable_count_scan_all(g: Arc<GroupTable>, c: &Subset, ns: &[usize], budget: usize) -> Result<Vec<StableScan>> {
    let reps: Vec<usize> = conjugacy_classes(&g).blocks.iter().map(|b| b[0]).collect();
    scan(g, c, &reps, ns, budget)
}

fn scan(g: Arc<GroupTable>, c: &Subset, monodromies: &[usize], ns: &[usize], budget: usize) -> Result<Vec<StableScan>> {
    let all: Vec<usize> = (0..g.order()).collect();
    let partition = conjugacy_partition(&g, c, &all)?;
    if partition.len() != 1 {
        return Err(Error::NotSingleClass(format!(
            "c splits into {} conjugacy classes",
            partition.len()
        )));
    }
    if subgroup_generated(&g, &c.members).len() != g.order() {
        return Err(Error::NotGenerator("c does not generate G".into()));
    }
    let ab = abelianization(&g);
    let class_image = ab.image(c.members[0]).to_vec();
    let rack = Arc::new(conjugation_rack(g.clone(), c)?);
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut scans: Vec<StableScan> = monodromies
        .iter()
        .map(|&m| StableScan {
            monodromy: m,
            rows: Vec::new(),
            window: None,
        })
        .collect();
    for &n in &ns {
        let spec = TupleSpaceSpec::new(rack.clone(), n)
            .with_target(all.clone())
            .with_budget(budget);
        let catalog = enumerate_components(&spec)?;
        let predicted_sum = ab.scale(&class_image, n as u64);
        for s in &mut scans {
            s.rows.push(StableScanRow {
                n,
                count: count_with_monodromy(&catalog, s.monodromy),
                obstructed: ab.image(s.monodromy) != predicted_sum.as_slice(),
            });
        }
    }
    for s in &mut scans {
        s.window = stable_window(&s.rows);
    }
    Ok(scans)
}

fn count_with_monodromy(catalog: &ComponentCatalog, h: usize) -> u64 {
    catalog
        .records
        .iter()
        .filter(|r| r.boundary_monodromy == Some(h))
        .count() as u64
}

fn stable_window(rows: &[StableScanRow]) -> Option<StableWindow> {
    let open: Vec<&StableScanRow> = rows.iter().filter(|r| !r.obstructed).collect();
    let last = open.last()?;
    let mut start = last.n;
    for r in open.iter().rev() {
        if r.count != last.count {
            break;
        }
        start = r.n;
    }
    Some(StableWindow {
        start,
        end: last.n,
        count: last.count,
    })
}
