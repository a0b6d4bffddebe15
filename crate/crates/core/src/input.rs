//! JSON specifications for groups, racks, actions and component catalogs.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::braid::{ComponentCatalog, ComponentRecord, EnumerationMode, TupleSpaceSpec};
use crate::error::{Error, Result};
use crate::group::{
    class_closure, extend_action, semidirect_product, GroupTable, Perm, Subset, DEFAULT_GROUP_BUDGET,
};
use crate::rack::{conjugation_rack, Rack};

/// A finite group.
///
/// ```json
/// { "kind": "permutation", "degree": 3, "generators": ["(1,2)", "(1,2,3)"] }
/// { "kind": "table", "table": [[0, 1], [1, 0]], "labels": ["e", "s"] }
/// { "kind": "cyclic", "n": 5 }
/// { "kind": "semidirect", "H": {...}, "Gamma": {...},
///   "action": [{ "gamma": "1", "images": { "1": "2" } }] }
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Permutation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        degree: usize,
        generators: Vec<String>,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Cyclic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        n: usize,
    },
    Symmetric {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        n: usize,
    },
    Dihedral {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        n: usize,
    },
    Quaternion {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    DirectProduct {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        factors: Vec<GroupSpec>,
    },
    Semidirect {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(rename = "H")]
        h: Box<GroupSpec>,
        #[serde(rename = "Gamma")]
        gamma: Box<GroupSpec>,
        action: Vec<ActionGenerator>,
    },
}

/// The automorphism of `H` attached to one element of `Gamma`, given by
/// the images of a generating set of `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionGenerator {
    pub gamma: String,
    pub images: BTreeMap<String, String>,
}

/// Either a bare list of generators or `{ "action": [...] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionSpec {
    List(Vec<ActionGenerator>),
    Wrapped { action: Vec<ActionGenerator> },
}

impl ActionSpec {
    pub fn generators(&self) -> &[ActionGenerator] {
        match self {
            ActionSpec::List(v) | ActionSpec::Wrapped { action: v } => v,
        }
    }
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupTable> {
        match self {
            GroupSpec::Permutation { degree, generators, .. } => {
                let gens = generators
                    .iter()
                    .map(|s| Perm::parse(*degree, s))
                    .collect::<Result<Vec<_>>>()?;
                GroupTable::from_permutations(*degree, &gens, DEFAULT_GROUP_BUDGET)
            }
            GroupSpec::Table { table, labels, .. } => match labels {
                Some(l) => GroupTable::from_table_labeled(table, l.clone()),
                None => GroupTable::from_table(table),
            },
            GroupSpec::Cyclic { n, .. } => {
                positive(*n, "cyclic order")?;
                Ok(GroupTable::cyclic(*n))
            }
            GroupSpec::Symmetric { n, .. } => {
                positive(*n, "symmetric degree")?;
                if *n > 7 {
                    return Err(Error::budget("building a symmetric group", DEFAULT_GROUP_BUDGET, factorial(*n)));
                }
                Ok(GroupTable::symmetric(*n))
            }
            GroupSpec::Dihedral { n, .. } => {
                if *n < 3 {
                    return Err(Error::input("dihedral groups need n >= 3"));
                }
                Ok(GroupTable::dihedral(*n))
            }
            GroupSpec::Quaternion { .. } => Ok(GroupTable::quaternion()),
            GroupSpec::DirectProduct { factors, .. } => {
                let mut it = factors.iter();
                let mut g = it.next().ok_or_else(|| Error::input("direct product of no factors"))?.build()?;
                for f in it {
                    g = GroupTable::direct_product(&g, &f.build()?);
                }
                Ok(g)
            }
            GroupSpec::Semidirect { h, gamma, action, .. } => {
                let h = h.build()?;
                let gamma = gamma.build()?;
                let action = build_action(&h, &gamma, action)?;
                Ok(semidirect_product(&h, &gamma, &action)?.group)
            }
        }
    }
}

fn positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::input(format!("{what} must be positive")));
    }
    Ok(())
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn element(g: &GroupTable, label: &str) -> Result<usize> {
    g.element_by_label(label)
        .ok_or_else(|| Error::input(format!("unknown group element {label:?}")))
}

/// Group elements named by label (or cycle notation for permutation groups).
pub fn parse_elements(g: &GroupTable, labels: &[String]) -> Result<Vec<usize>> {
    let mut out = labels.iter().map(|l| element(g, l)).collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The homomorphism `H -> H` determined by generator images, as a table.
fn extend_endomorphism(h: &GroupTable, images: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut map = vec![usize::MAX; h.order()];
    map[h.identity()] = h.identity();
    let mut queue = vec![h.identity()];
    let mut k = 0;
    while k < queue.len() {
        let x = queue[k];
        for &(s, t) in images {
            let (y, img) = (h.mul(x, s), h.mul(map[x], t));
            if map[y] == usize::MAX {
                map[y] = img;
                queue.push(y);
            } else if map[y] != img {
                return Err(Error::NotAnAction(format!(
                    "generator images do not define a homomorphism at {}",
                    h.label(y)
                )));
            }
        }
        k += 1;
    }
    if let Some(x) = map.iter().position(|&v| v == usize::MAX) {
        return Err(Error::NotAnAction(format!("images do not determine {}", h.label(x))));
    }
    Ok(map)
}

/// `action[gamma][h] = gamma(h)` for all of `Gamma`.
pub fn build_action(h: &GroupTable, gamma: &GroupTable, gens: &[ActionGenerator]) -> Result<Vec<Vec<usize>>> {
    let on_generators = gens
        .iter()
        .map(|a| {
            let pairs = a
                .images
                .iter()
                .map(|(x, y)| Ok((element(h, x)?, element(h, y)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((element(gamma, &a.gamma)?, extend_endomorphism(h, &pairs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    extend_action(h, gamma, &on_generators)
}

/// A finite rack.
///
/// ```json
/// { "kind": "conjugation", "group": {...}, "subset": ["(1,2)", "(1,3)", "(2,3)"] }
/// { "kind": "conjugation", "group": {...}, "classes": ["(1,2)"] }
/// { "kind": "table", "act": [[0, 2, 1], [2, 1, 0], [1, 0, 2]] }
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RackSpec {
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        act: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    /// `subset` lists `c` itself; `classes` lists representatives whose
    /// conjugacy classes make up `c`.
    Conjugation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        group: GroupSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subset: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        classes: Option<Vec<String>>,
    },
    Trivial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        n: usize,
    },
    Permutation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        degree: usize,
        perm: String,
    },
    Affine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        n: usize,
        a: usize,
    },
}

impl RackSpec {
    pub fn build(&self) -> Result<Rack> {
        match self {
            RackSpec::Table { act, labels, .. } => Rack::from_table(act, labels.clone()),
            RackSpec::Conjugation { group, subset, classes, .. } => {
                let g = Arc::new(group.build()?);
                let c = subset_from_labels(&g, subset.as_deref(), classes.as_deref())?;
                conjugation_rack(g, &c)
            }
            RackSpec::Trivial { n, .. } => {
                positive(*n, "rack size")?;
                Ok(Rack::trivial(*n))
            }
            RackSpec::Permutation { degree, perm, .. } => Ok(Rack::permutation_rack(&Perm::parse(*degree, perm)?)),
            RackSpec::Affine { n, a, .. } => Rack::affine_quandle(*n, *a),
        }
    }
}

/// `c` from an explicit member list, from class representatives, or both.
pub fn subset_from_labels(g: &GroupTable, subset: Option<&[String]>, classes: Option<&[String]>) -> Result<Subset> {
    let mut members = Vec::new();
    if let Some(s) = subset {
        members.extend(parse_elements(g, s)?);
    }
    if let Some(c) = classes {
        members.extend(class_closure(g, &parse_elements(g, c)?).members);
    }
    if subset.is_none() && classes.is_none() {
        return Err(Error::input("give `subset` or `classes`"));
    }
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::EmptySubset);
    }
    Subset::new(g, members)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::input(format!("cannot parse {}: {e}", path.display())))
}

pub fn load_group(path: &Path) -> Result<(GroupSpec, GroupTable)> {
    let spec: GroupSpec = read_json(path)?;
    let g = spec.build()?;
    Ok((spec, g))
}

pub fn load_rack(path: &Path) -> Result<(RackSpec, Rack)> {
    let spec: RackSpec = read_json(path)?;
    let r = spec.build()?;
    Ok((spec, r))
}

/// Serialized form of a `ComponentCatalog`; tuples and group elements are
/// written as labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub rack: RackSpec,
    pub n: usize,
    pub multidegree_filter: Option<Vec<usize>>,
    pub generating_only: bool,
    pub target_subgroup: Option<Vec<String>>,
    pub budget: usize,
    pub quotient_by: Option<Vec<String>>,
    pub mode: EnumerationMode,
    pub states_visited: u64,
    pub admissible_tuples: u64,
    pub records: Vec<RecordFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordFile {
    pub canonical_rep: Vec<String>,
    pub orbit_size: u64,
    pub multidegree: Vec<usize>,
    pub boundary_monodromy: Option<String>,
    pub generated_subgroup: Option<usize>,
    pub monodromy_orbit: Option<Vec<String>>,
    pub merged: Option<Vec<Vec<String>>>,
}

impl CatalogFile {
    pub fn from_catalog(spec: RackSpec, catalog: &ComponentCatalog) -> Self {
        let rack = catalog.rack();
        let group = rack.group_origin().map(|o| o.group.clone());
        let glabel = |x: usize| group.as_ref().expect("group-origin rack").label(x).to_string();
        let tuple = |t: &[u16]| t.iter().map(|&x| rack.label(x as usize).to_string()).collect::<Vec<_>>();
        CatalogFile {
            rack: spec,
            n: catalog.spec.n,
            multidegree_filter: catalog.spec.multidegree_filter.clone(),
            generating_only: catalog.spec.generating_only,
            target_subgroup: catalog.spec.target_subgroup.as_ref().map(|t| t.iter().map(|&x| glabel(x)).collect()),
            budget: catalog.spec.budget,
            quotient_by: catalog.quotient_by.as_ref().map(|k| k.iter().map(|&x| glabel(x)).collect()),
            mode: catalog.totals.mode,
            states_visited: catalog.totals.states_visited,
            admissible_tuples: catalog.totals.admissible_tuples,
            records: catalog
                .records
                .iter()
                .map(|r| RecordFile {
                    canonical_rep: tuple(&r.canonical_rep),
                    orbit_size: r.orbit_size,
                    multidegree: r.multidegree.clone(),
                    boundary_monodromy: r.boundary_monodromy.map(glabel),
                    generated_subgroup: r.generated_subgroup,
                    monodromy_orbit: r.monodromy_orbit.as_ref().map(|o| o.iter().map(|&x| glabel(x)).collect()),
                    merged: r.merged.as_ref().map(|m| m.iter().map(|t| tuple(t)).collect()),
                })
                .collect(),
        }
    }

    pub fn into_catalog(self) -> Result<ComponentCatalog> {
        let rack = Arc::new(self.rack.build()?);
        let group = rack.group_origin().map(|o| o.group.clone());
        let labels: HashMap<&str, u16> = rack
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u16))
            .collect();
        let tuple = |t: &[String]| -> Result<Vec<u16>> {
            t.iter()
                .map(|l| match labels.get(l.as_str()) {
                    Some(&i) => Ok(i),
                    None => rack
                        .index_of_label(l)
                        .map(|i| i as u16)
                        .ok_or_else(|| Error::input(format!("unknown rack element {l:?}"))),
                })
                .collect()
        };
        let elem = |l: &String| -> Result<usize> { element(group.as_ref().ok_or(Error::NotGroupOrigin)?, l) };
        let elems = |v: &Vec<String>| -> Result<Vec<usize>> { v.iter().map(elem).collect() };
        let mut spec = TupleSpaceSpec::new(rack.clone(), self.n).with_budget(self.budget);
        spec.multidegree_filter = self.multidegree_filter;
        spec.generating_only = self.generating_only;
        spec.target_subgroup = self.target_subgroup.as_ref().map(elems).transpose()?;
        let records = self
            .records
            .iter()
            .map(|r| {
                Ok(ComponentRecord {
                    canonical_rep: tuple(&r.canonical_rep)?,
                    orbit_size: r.orbit_size,
                    multidegree: r.multidegree.clone(),
                    boundary_monodromy: r.boundary_monodromy.as_ref().map(elem).transpose()?,
                    generated_subgroup: r.generated_subgroup,
                    monodromy_orbit: r.monodromy_orbit.as_ref().map(elems).transpose()?,
                    merged: r
                        .merged
                        .as_ref()
                        .map(|m| m.iter().map(|t| tuple(t)).collect::<Result<Vec<_>>>())
                        .transpose()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let quotient_by = self.quotient_by.as_ref().map(elems).transpose()?;
        let mut catalog = ComponentCatalog::from_parts(spec, records, self.mode, quotient_by)?;
        catalog.totals.states_visited = self.states_visited;
        Ok(catalog)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::enumerate_components;

    fn s3_spec() -> GroupSpec {
        serde_json::from_str(r#"{"kind":"permutation","degree":3,"generators":["(1,2)","(1,2,3)"]}"#).unwrap()
    }

    #[test]
    fn groups() {
        assert_eq!(s3_spec().build().unwrap().order(), 6);
        let d: GroupSpec = serde_json::from_str(r#"{"kind":"dihedral","n":4}"#).unwrap();
        assert_eq!(d.build().unwrap().order(), 8);
        let bad = serde_json::from_str::<GroupSpec>(r#"{"kind":"cyclic","n":3,"extra":1}"#);
        assert!(bad.is_err());
        let semi: GroupSpec = serde_json::from_str(
            r#"{"kind":"semidirect","H":{"kind":"cyclic","n":3},"Gamma":{"kind":"cyclic","n":2},
                "action":[{"gamma":"1","images":{"1":"2"}}]}"#,
        )
        .unwrap();
        let g = semi.build().unwrap();
        assert_eq!(g.order_statistics(), GroupTable::symmetric(3).order_statistics());
        let not_hom: GroupSpec = serde_json::from_str(
            r#"{"kind":"semidirect","H":{"kind":"cyclic","n":3},"Gamma":{"kind":"cyclic","n":2},
                "action":[{"gamma":"1","images":{"1":"0"}}]}"#,
        )
        .unwrap();
        assert!(not_hom.build().is_err());
    }

    #[test]
    fn racks() {
        let r = RackSpec::Conjugation {
            name: None,
            group: s3_spec(),
            subset: None,
            classes: Some(vec!["(1,2)".into()]),
        };
        assert_eq!(r.build().unwrap().size(), 3);
        let open = RackSpec::Conjugation {
            name: None,
            group: s3_spec(),
            subset: Some(vec!["(1,2)".into(), "(1,3)".into()]),
            classes: None,
        };
        assert!(matches!(open.build(), Err(Error::NotClosedUnderConjugation { .. })));
        let t: RackSpec = serde_json::from_str(r#"{"kind":"trivial","n":3}"#).unwrap();
        assert_eq!(t.build().unwrap().size(), 3);
    }

    #[test]
    fn catalog_round_trip() {
        let spec = RackSpec::Conjugation {
            name: Some("s3".into()),
            group: s3_spec(),
            subset: None,
            classes: Some(vec!["(1,2)".into()]),
        };
        let rack = Arc::new(spec.build().unwrap());
        let cat = enumerate_components(&TupleSpaceSpec::new(rack, 3)).unwrap();
        let file = CatalogFile::from_catalog(spec.clone(), &cat);
        let text = serde_json::to_string(&file).unwrap();
        let back: CatalogFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let cat2 = back.into_catalog().unwrap();
        assert_eq!(cat2.records, cat.records);
        for r in &cat.records {
            assert_eq!(cat2.resolve(&r.canonical_rep).unwrap(), cat.resolve(&r.canonical_rep).unwrap());
        }
        assert_eq!(CatalogFile::from_catalog(spec, &cat2), file);
    }
}
