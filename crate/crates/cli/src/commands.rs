//! Subcommand definitions and handlers.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Subcommand};
use serde_json::{json, Value};

use hurwitz_core::braid::{
    enumerate_components, enumerate_components_from_seeds, quotient_by_conjugation, stable_count_scan,
    stable_count_scan_all, ComponentCatalog, TupleSpaceSpec,
};
use hurwitz_core::clm::{build_instance, component_comparison, is_admissible};
use hurwitz_core::frobenius::{d_constant, is_geometrically_irreducible, periodicity_scan, q_powering, PeriodicityQuery};
use hurwitz_core::group::{abelianization, center, conjugacy_classes, is_normal, GroupTable, Subset};
use hurwitz_core::homology::{h2_gc, h2_group, H2Result};
use hurwitz_core::input::{build_action, load_group, load_rack, read_json, ActionSpec, CatalogFile, GroupSpec};
use hurwitz_core::malle::{
    a_constant, b_m_constant, discriminant_invariant, malle_exponents, malle_prediction, normalized_partial_sums,
    pole_order, rdisc_invariant, regular_discriminant_invariant, rho_orbits, stable_picard_prediction,
    tuple_count_coefficients, CountingInvariant, OrbitDecomposition, PicardPrediction,
};
use hurwitz_core::rack::{operator_order, rack_components, reduced_structure_group, validate_rack, Rack};
use hurwitz_core::{Error, Result};

use crate::args::{classes, element, parse_range, subgroup};
use crate::output::{big, float, join, to_value, Output, Table};
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// Order, center, conjugacy classes and abelianization.
    ///
    /// CSV columns: representative,size,order
    Info { spec: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum RackCmd {
    /// Checks the rack axioms and the braid relations; exit 1 if invalid.
    Check { spec: PathBuf },
    /// Components, reduced structure group order and operator orders.
    ///
    /// CSV columns: element,component,operator_order
    Info { spec: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum ComponentsCmd {
    /// Braid-group orbits on n-tuples.
    ///
    /// CSV columns: record,canonical_rep,orbit_size,multidegree,boundary_monodromy,generated_subgroup
    Enumerate(EnumerateArgs),
    /// Connected-component counts per boundary monodromy as n grows.
    ///
    /// CSV columns: monodromy,n,count,obstructed
    StableScan(StableScanArgs),
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    /// Rack spec (JSON).
    pub spec: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Entry counts per rack component, e.g. `2,1`.
    #[arg(long, value_delimiter = ',')]
    pub multidegree: Option<Vec<usize>>,
    /// Keep tuples whose row maps generate the reduced structure group.
    #[arg(long)]
    pub generating: bool,
    /// Keep tuples generating this subgroup (generators, or `all`).
    #[arg(long)]
    pub target: Option<String>,
    /// Merge orbits under simultaneous conjugation by this subgroup (generators).
    #[arg(long)]
    pub quotient_by: Option<String>,
    /// Seed tuple (space-separated labels); used when the full space exceeds the budget.
    #[arg(long)]
    pub seed: Vec<String>,
}

#[derive(Args, Debug)]
pub struct StableScanArgs {
    /// Group spec (JSON).
    pub spec: PathBuf,
    /// A class representative (a single class generating G).
    #[arg(long)]
    pub classes: String,
    #[arg(long, value_parser = parse_range)]
    pub n_range: std::ops::RangeInclusive<usize>,
    /// Restrict to one boundary monodromy; default: one scan per class of G.
    #[arg(long)]
    pub monodromy: Option<String>,
}

#[derive(Args, Debug)]
pub struct H2Args {
    /// Group spec (JSON).
    pub spec: PathBuf,
    /// Class representatives of c; adds H_2(G, c).
    #[arg(long)]
    pub classes: Option<String>,
    /// Include basis cycles of the group homology.
    #[arg(long)]
    pub emit_cycles: bool,
}

#[derive(Subcommand, Debug)]
pub enum FrobeniusCmd {
    /// Frobenius action on the records of a catalog.
    ///
    /// CSV columns: record,canonical_rep,multidegree,boundary_monodromy,image,fixed
    Fixed {
        catalog: PathBuf,
        #[arg(long)]
        q: u64,
        /// Conjugating subgroup K (generators); default trivial.
        #[arg(long = "K")]
        k: Option<String>,
    },
    /// Number of cycles of q-powering on the classes of c.
    D {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        classes: String,
        #[arg(long)]
        q: u64,
    },
    /// Frobenius-fixed component counts over multidegrees.
    ///
    /// CSV columns: multidegree,residues,components,fixed,necessary
    Periodicity(PeriodicityArgs),
}

#[derive(Args, Debug)]
pub struct PeriodicityArgs {
    #[arg(long)]
    pub group: PathBuf,
    #[arg(long)]
    pub classes: String,
    #[arg(long)]
    pub q: u64,
    /// Residue modulus; default |G|.
    #[arg(long)]
    pub modulus: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub residues: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_range)]
    pub n_range: std::ops::RangeInclusive<usize>,
    #[arg(long)]
    pub monodromy: Option<String>,
    /// Count only tuples generating G.
    #[arg(long)]
    pub connected: bool,
    #[arg(long = "K")]
    pub k: Option<String>,
}

#[derive(Args, Debug)]
pub struct InvArgs {
    /// Group spec (JSON).
    pub spec: PathBuf,
    /// Class representatives of c, or `all`.
    #[arg(long)]
    pub classes: String,
    /// `disc` (degree-d), `regular`, `rdisc`, or a JSON file mapping class representatives to values.
    #[arg(long)]
    pub inv: String,
    #[arg(long)]
    pub q: u64,
    /// Normal subgroup N (generators); default G.
    #[arg(long = "N")]
    pub normal: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum MalleCmd {
    /// a, c_inv, the b_M table, b_T with witnesses, and the prediction.
    Exponents {
        #[command(flatten)]
        inv: InvArgs,
        /// Budget on the number of nontrivial classes when listing normal subgroups.
        #[arg(long, default_value_t = 20)]
        max_classes: usize,
    },
    /// Tuple-count coefficients a_delta and normalized partial sums.
    ///
    /// CSV columns: delta,a_delta,partial_sum,normalized
    Series(SeriesArgs),
    /// Stable Picard group prediction for a single class.
    Picard {
        spec: PathBuf,
        #[arg(long)]
        classes: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    /// Group spec (JSON); omit when giving --orbits.
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub classes: Option<String>,
    #[arg(long)]
    pub inv: Option<String>,
    #[arg(long)]
    pub q: u64,
    #[arg(long = "N")]
    pub normal: Option<String>,
    /// Coset generator h of G/N; default the b_M witness.
    #[arg(long)]
    pub h: Option<String>,
    /// Abstract decomposition `size:inv,size:inv,...`.
    #[arg(long, conflicts_with_all = ["spec", "classes", "inv", "normal", "h"])]
    pub orbits: Option<String>,
    #[arg(long)]
    pub delta_max: usize,
}

#[derive(Subcommand, Debug)]
pub enum ClmCmd {
    /// Frobenius-fixed component counts for (G, c1) and (Gamma, c2).
    ///
    /// CSV columns: n,pi_G,pi_Gamma,diff,d_G,d_Gamma (after a `# {header}` line)
    Compare {
        #[arg(long = "H")]
        h: PathBuf,
        #[arg(long = "Gamma")]
        gamma: PathBuf,
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long, value_parser = parse_range)]
        n_range: std::ops::RangeInclusive<usize>,
    },
}

pub fn run(cmd: &crate::Command, global: &Global, out: &Output) -> Result<ExitCode> {
    use crate::Command::*;
    match cmd {
        Group(GroupCmd::Info { spec }) => group_info(spec, out),
        Rack(RackCmd::Check { spec }) => rack_check(spec, out),
        Rack(RackCmd::Info { spec }) => rack_info(spec, global, out),
        Components(ComponentsCmd::Enumerate(a)) => components_enumerate(a, global, out),
        Components(ComponentsCmd::StableScan(a)) => stable_scan(a, global, out),
        H2(a) => h2(a, global, out),
        Frobenius(FrobeniusCmd::Fixed { catalog, q, k }) => frobenius_fixed(catalog, *q, k.as_deref(), out),
        Frobenius(FrobeniusCmd::D { group, classes: cl, q }) => {
            let (_, g) = load_group(group)?;
            let c = classes(&g, cl)?;
            let d = d_constant(&g, &c, *q)?;
            done(out.emit(&json!({ "d": d, "q": q }), None, None))
        }
        Frobenius(FrobeniusCmd::Periodicity(a)) => periodicity(a, global, out),
        Malle(MalleCmd::Exponents { inv, max_classes }) => exponents(inv, *max_classes, out),
        Malle(MalleCmd::Series(a)) => series(a, out),
        Malle(MalleCmd::Picard { spec, classes: cl, n }) => picard(spec, cl, *n, global, out),
        Clm(ClmCmd::Compare {
            h,
            gamma,
            action,
            q,
            n_range,
        }) => clm_compare(h, gamma, action, *q, n_range.clone(), global, out),
    }
}

fn done(r: Result<()>) -> Result<ExitCode> {
    r.map(|_| ExitCode::SUCCESS)
}

fn labels(g: &GroupTable, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| g.label(x).to_string()).collect()
}

fn rack_labels(r: &Rack, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| r.label(x).to_string()).collect()
}

fn tuple_labels(r: &Rack, t: &[u16]) -> Vec<String> {
    t.iter().map(|&x| r.label(x as usize).to_string()).collect()
}

fn group_info(spec: &Path, out: &Output) -> Result<ExitCode> {
    let (gs, g) = load_group(spec)?;
    let classes = conjugacy_classes(&g);
    let mut table = Table::new(&["representative", "size", "order"]);
    let class_json: Vec<Value> = classes
        .blocks
        .iter()
        .map(|b| {
            table.push(vec![
                g.label(b[0]).to_string(),
                b.len().to_string(),
                g.element_order(b[0]).to_string(),
            ]);
            json!({
                "representative": g.label(b[0]),
                "size": b.len(),
                "order": g.element_order(b[0]),
                "members": labels(&g, b),
            })
        })
        .collect();
    let ab = abelianization(&g);
    let v = json!({
        "name": spec_name(&gs),
        "order": g.order(),
        "exponent": g.exponent(),
        "abelian": g.is_abelian(),
        "center": labels(&g, &center(&g).members),
        "classes": class_json,
        "abelianization": ab.invariant_factors,
        "order_statistics": g.order_statistics(),
    });
    done(out.emit(&v, Some(&table), None))
}

fn spec_name(s: &GroupSpec) -> Value {
    let name = match s {
        GroupSpec::Permutation { name, .. }
        | GroupSpec::Table { name, .. }
        | GroupSpec::Cyclic { name, .. }
        | GroupSpec::Symmetric { name, .. }
        | GroupSpec::Dihedral { name, .. }
        | GroupSpec::Quaternion { name }
        | GroupSpec::DirectProduct { name, .. }
        | GroupSpec::Semidirect { name, .. } => name,
    };
    to_value(name)
}

fn rack_check(spec: &Path, out: &Output) -> Result<ExitCode> {
    let (_, r) = load_rack(spec)?;
    let rep = validate_rack(&r);
    let v = json!({
        "status": if rep.valid() { "valid" } else { "invalid" },
        "size": r.size(),
        "axioms_ok": rep.axioms_ok,
        "braid_ok": rep.braid_ok,
        "non_bijective_rows": rack_labels(&r, &rep.non_bijective_rows),
        "distributivity_witness": rep.distributivity_witness.map(|(x, y, z)| rack_labels(&r, &[x, y, z])),
        "braid_witness": rep.braid_witness.as_ref().map(|w| rack_labels(&r, w)),
    });
    let mut table = Table::new(&["status", "axioms_ok", "braid_ok"]);
    table.push(vec![
        v["status"].as_str().unwrap_or_default().to_string(),
        rep.axioms_ok.to_string(),
        rep.braid_ok.to_string(),
    ]);
    out.emit(&v, Some(&table), None)?;
    Ok(if rep.valid() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn rack_info(spec: &Path, global: &Global, out: &Output) -> Result<ExitCode> {
    let (_, r) = load_rack(spec)?;
    let rep = validate_rack(&r);
    if !rep.valid() {
        return Err(Error::InvalidInput("not a rack; run `rack check` for witnesses".into()));
    }
    let comps = rack_components(&r);
    let structure = reduced_structure_group(&r, global.budget)?;
    let mut table = Table::new(&["element", "component", "operator_order"]);
    let mut orders = serde_json::Map::new();
    for x in 0..r.size() {
        let o = operator_order(&r, x);
        table.push(vec![r.label(x).to_string(), comps.component_of[x].to_string(), o.to_string()]);
        orders.insert(r.label(x).to_string(), json!(o));
    }
    let v = json!({
        "size": r.size(),
        "labels": r.labels(),
        "quandle": (0..r.size()).all(|x| r.act(x, x) == x),
        "components": comps.blocks.iter().map(|b| rack_labels(&r, b)).collect::<Vec<_>>(),
        "structure_group_order": structure.group.order(),
        "operator_orders": orders,
    });
    done(out.emit(&v, Some(&table), None))
}

fn components_enumerate(a: &EnumerateArgs, global: &Global, out: &Output) -> Result<ExitCode> {
    let (rs, r) = load_rack(&a.spec)?;
    let rack = Arc::new(r);
    let group = rack.group_origin().map(|o| o.group.clone());
    let need_group = || group.clone().ok_or(Error::NotGroupOrigin);
    let mut spec = TupleSpaceSpec::new(rack.clone(), a.n).with_budget(global.budget);
    if let Some(m) = &a.multidegree {
        spec = spec.with_multidegree(m.clone());
    }
    if a.generating {
        spec = spec.generating();
    }
    if let Some(t) = &a.target {
        let g = need_group()?;
        let target = if t.trim() == "all" {
            (0..g.order()).collect()
        } else {
            subgroup(&g, Some(t))?
        };
        spec = spec.with_target(target);
    }
    let mut catalog = if a.seed.is_empty() {
        enumerate_components(&spec)?
    } else {
        let seeds = a
            .seed
            .iter()
            .map(|s| {
                s.split_whitespace()
                    .map(|l| {
                        rack.index_of_label(l)
                            .map(|i| i as u16)
                            .ok_or_else(|| Error::InvalidInput(format!("unknown rack element {l:?}")))
                    })
                    .collect::<Result<Vec<u16>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        enumerate_components_from_seeds(&spec, &seeds)?
    };
    if let Some(k) = &a.quotient_by {
        let g = need_group()?;
        catalog = quotient_by_conjugation(&catalog, &subgroup(&g, Some(k))?)?;
    }
    emit_catalog(rs, &catalog, out)
}

fn emit_catalog(rs: hurwitz_core::input::RackSpec, catalog: &ComponentCatalog, out: &Output) -> Result<ExitCode> {
    let file = CatalogFile::from_catalog(rs, catalog);
    let mut table = Table::new(&[
        "record",
        "canonical_rep",
        "orbit_size",
        "multidegree",
        "boundary_monodromy",
        "generated_subgroup",
    ]);
    for (i, r) in file.records.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            join(&r.canonical_rep),
            r.orbit_size.to_string(),
            join(r.multidegree.iter().map(|x| x.to_string())),
            r.boundary_monodromy.clone().unwrap_or_default(),
            r.generated_subgroup.map(|x| x.to_string()).unwrap_or_default(),
        ]);
    }
    done(out.emit(&to_value(&file), Some(&table), None))
}

fn stable_scan(a: &StableScanArgs, global: &Global, out: &Output) -> Result<ExitCode> {
    let (_, g) = load_group(&a.spec)?;
    let g = Arc::new(g);
    let c = classes(&g, &a.classes)?;
    let ns: Vec<usize> = a.n_range.clone().collect();
    let scans = match &a.monodromy {
        Some(m) => vec![stable_count_scan(g.clone(), &c, element(&g, m)?, &ns, global.budget)?],
        None => stable_count_scan_all(g.clone(), &c, &ns, global.budget)?,
    };
    let mut table = Table::new(&["monodromy", "n", "count", "obstructed"]);
    let mut items = Vec::new();
    for s in &scans {
        for r in &s.rows {
            table.push(vec![
                g.label(s.monodromy).to_string(),
                r.n.to_string(),
                r.count.to_string(),
                r.obstructed.to_string(),
            ]);
        }
        let mut v = to_value(s);
        v["monodromy"] = json!(g.label(s.monodromy));
        items.push(v);
    }
    done(out.emit(&json!({ "scans": items }), Some(&table), None))
}

fn h2_json(g: &GroupTable, h: &H2Result, cycles: bool) -> Value {
    let mut v = json!({
        "invariant_factors": h.invariant_factors.iter().map(big).collect::<Vec<_>>(),
        "free_rank": h.free_rank,
        "order": h.order().as_ref().map(big),
        "trivial": h.is_trivial(),
    });
    if cycles {
        v["basis_cycles"] = h
            .basis_cycles
            .iter()
            .map(|b| {
                json!({
                    "order": big(&b.order),
                    "terms": b.terms.iter().map(|(x, y, k)| json!([g.label(*x), g.label(*y), big(k)])).collect::<Vec<_>>(),
                })
            })
            .collect();
    }
    v
}

fn h2(a: &H2Args, global: &Global, out: &Output) -> Result<ExitCode> {
    let (_, g) = load_group(&a.spec)?;
    let hg = h2_group(&g, global.budget)?;
    let mut v = json!({ "group": h2_json(&g, &hg, a.emit_cycles) });
    let mut table = Table::new(&["module", "invariant_factors", "free_rank"]);
    table.push(vec![
        "H2(G)".into(),
        join(hg.invariant_factors.iter().map(|x| x.to_string())),
        hg.free_rank.to_string(),
    ]);
    if let Some(cl) = &a.classes {
        let c = classes(&g, cl)?;
        let hc = h2_gc(&g, &c, global.budget)?;
        table.push(vec![
            "H2(G,c)".into(),
            join(hc.invariant_factors.iter().map(|x| x.to_string())),
            hc.free_rank.to_string(),
        ]);
        v["gc"] = h2_json(&g, &hc, a.emit_cycles);
        v["c"] = json!(labels(&g, &c.members));
    }
    done(out.emit(&v, Some(&table), None))
}

fn frobenius_fixed(path: &Path, q: u64, k: Option<&str>, out: &Output) -> Result<ExitCode> {
    let file: CatalogFile = read_json(path)?;
    let catalog = file.into_catalog()?;
    let origin = catalog.rack().group_origin().ok_or(Error::NotGroupOrigin)?;
    let g = origin.group.clone();
    let pm = q_powering(&g, &origin.subset(), q)?;
    let k = subgroup(&g, k)?;
    let rack = catalog.rack();
    let mut table = Table::new(&["record", "canonical_rep", "multidegree", "boundary_monodromy", "image", "fixed"]);
    let mut rows = Vec::new();
    for (i, r) in catalog.records.iter().enumerate() {
        let image = match catalog.resolve(&pm.back_tuple(&r.canonical_rep)) {
            Ok(j) => Some(j),
            Err(Error::TupleLeftCatalog(_)) => None,
            Err(e) => return Err(e),
        };
        let fixed = is_geometrically_irreducible(i, &catalog, &pm, &k)?;
        let mono = r.boundary_monodromy.map(|m| g.label(m).to_string());
        table.push(vec![
            i.to_string(),
            join(tuple_labels(rack, &r.canonical_rep)),
            join(r.multidegree.iter().map(|x| x.to_string())),
            mono.clone().unwrap_or_default(),
            image.map(|j| j.to_string()).unwrap_or_default(),
            fixed.to_string(),
        ]);
        rows.push(json!({
            "record": i,
            "canonical_rep": tuple_labels(rack, &r.canonical_rep),
            "multidegree": r.multidegree,
            "boundary_monodromy": mono,
            "image": image,
            "fixed": fixed,
        }));
    }
    let fixed_count = rows.iter().filter(|r| r["fixed"] == json!(true)).count();
    let v = json!({ "q": q, "K": labels(&g, &k), "records": rows, "fixed": fixed_count });
    done(out.emit(&v, Some(&table), None))
}

fn periodicity(a: &PeriodicityArgs, global: &Global, out: &Output) -> Result<ExitCode> {
    let (_, g) = load_group(&a.group)?;
    let g = Arc::new(g);
    let c = classes(&g, &a.classes)?;
    let query = PeriodicityQuery {
        q: a.q,
        k: subgroup(&g, a.k.as_deref())?,
        modulus: a.modulus.unwrap_or(g.order()),
        residues: a.residues.clone(),
        n_range: a.n_range.clone(),
        monodromy: a.monodromy.as_deref().map(|m| element(&g, m)).transpose()?,
        connected: a.connected,
        budget: global.budget,
    };
    let report = periodicity_scan(g.clone(), &c, &query)?;
    let mut table = Table::new(&["multidegree", "residues", "components", "fixed", "necessary"]);
    for r in &report.rows {
        table.push(vec![
            join(r.multidegree.iter().map(|x| x.to_string())),
            join(r.residues.iter().map(|x| x.to_string())),
            r.components.map(|x| x.to_string()).unwrap_or_default(),
            r.fixed.to_string(),
            r.necessary.to_string(),
        ]);
    }
    done(out.emit(&to_value(&report), Some(&table), None))
}

fn load_invariant(g: &GroupTable, spec: &str) -> Result<CountingInvariant> {
    match spec {
        "disc" => discriminant_invariant(g),
        "regular" => regular_discriminant_invariant(g),
        "rdisc" => Ok(rdisc_invariant(g)),
        path => {
            let map: std::collections::BTreeMap<String, u64> = read_json(std::path::Path::new(path))?;
            let classes = conjugacy_classes(g);
            let mut per_class: Vec<Option<u64>> = vec![None; classes.len()];
            for (label, value) in map {
                let x = element(g, &label)?;
                per_class[classes.class_of(x).expect("every element has a class")] = Some(value);
            }
            let id_class = classes.class_of(g.identity()).expect("identity class");
            per_class[id_class] = Some(0);
            let values = per_class
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| {
                        Error::ValidationFailure(format!("no value for the class of {}", g.label(classes.blocks[i][0])))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            CountingInvariant::from_class_values(g, &values)
        }
    }
}

fn normal_arg(g: &GroupTable, spec: Option<&str>) -> Result<Option<Subset>> {
    match spec {
        None => Ok(None),
        Some(s) => {
            let n = Subset::new(g, subgroup(g, Some(s))?)?;
            if !is_normal(g, &n) {
                return Err(Error::InvalidInput("N is not normal".into()));
            }
            Ok(Some(n))
        }
    }
}

fn exponents(a: &InvArgs, max_classes: usize, out: &Output) -> Result<ExitCode> {
    let (_, g) = load_group(&a.spec)?;
    let c = classes(&g, &a.classes)?;
    let inv = load_invariant(&g, &a.inv)?;
    let e = malle_exponents(&g, &c, &inv, a.q, max_classes)?;
    let normal = normal_arg(&g, a.normal.as_deref())?;
    let prediction = malle_prediction(&g, &c, &inv, a.q, normal.as_ref())?;
    let dec = rho_orbits(&g, &Subset::whole(&g), &c, e.b_m_witness, a.q, &inv)?;
    let candidate = |x: &hurwitz_core::malle::BtCandidate| {
        json!({
            "N": labels(&g, &x.normal_subgroup),
            "field_size": x.field_size,
            "b_M": x.b_m,
            "h": g.label(x.h),
            "table": x.table.iter().map(|t| json!({ "h": g.label(t.h), "orbits": t.orbits })).collect::<Vec<_>>(),
        })
    };
    let v = json!({
        "q": a.q,
        "invariant": inv.provenance.to_string(),
        "a": e.a,
        "c_inv": labels(&g, &e.c_inv),
        "b_M": e.b_m,
        "b_M_witness": g.label(e.b_m_witness),
        "b_M_table": candidate(e.candidates.iter().find(|x| x.normal_subgroup.len() == g.order()).expect("N = G is a candidate"))["table"].clone(),
        "b_T": e.b_t,
        "b_T_witness": candidate(&e.b_t_witness),
        "candidates": e.candidates.iter().map(candidate).collect::<Vec<_>>(),
        "pole_order": pole_order(&dec),
        "prediction": {
            "a": prediction.a,
            "b": prediction.b,
            "N": labels(&g, &prediction.normal_subgroup),
            "field_size": prediction.field_size,
            "h": g.label(prediction.h),
            "regime": prediction.regime,
            "rendered": prediction.rendered,
        },
    });
    done(out.emit(&v, None, None))
}

fn parse_orbits(s: &str) -> Result<Vec<(usize, u64)>> {
    s.split(',')
        .map(|p| {
            let (size, inv) = p
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("expected size:inv, got {p:?}")))?;
            let bad = || Error::InvalidInput(format!("bad orbit {p:?}"));
            Ok((size.trim().parse().map_err(|_| bad())?, inv.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn series(a: &SeriesArgs, out: &Output) -> Result<ExitCode> {
    let dec = match &a.orbits {
        Some(o) => OrbitDecomposition::from_sizes(&parse_orbits(o)?),
        None => {
            let missing = |what: &str| Error::InvalidInput(format!("{what} is required without --orbits"));
            let (_, g) = load_group(a.spec.as_ref().ok_or_else(|| missing("a group spec"))?)?;
            let c = classes(&g, a.classes.as_deref().ok_or_else(|| missing("--classes"))?)?;
            let inv = load_invariant(&g, a.inv.as_deref().ok_or_else(|| missing("--inv"))?)?;
            let n = normal_arg(&g, a.normal.as_deref())?.unwrap_or_else(|| Subset::whole(&g));
            let cap = Subset {
                members: c.iter().filter(|&x| n.contains(x)).collect(),
            };
            let h = match &a.h {
                Some(h) => element(&g, h)?,
                None => b_m_constant(&g, &n, &a_constant(&cap, &inv)?.1, a.q, &inv)?.witness,
            };
            rho_orbits(&g, &n, &cap, h, a.q, &inv)?
        }
    };
    let coeffs = tuple_count_coefficients(&dec, a.q, a.delta_max)?;
    let a_min = dec.min_inv().ok_or_else(|| Error::InvalidInput("empty decomposition".into()))?;
    let b = pole_order(&dec);
    let normalized = normalized_partial_sums(&coeffs, a.q, a_min, b);
    let mut table = Table::new(&["delta", "a_delta", "partial_sum", "normalized"]);
    let mut rows = Vec::new();
    let mut partial = num_bigint::BigInt::from(0);
    for (d, (x, nrm)) in coeffs.iter().zip(&normalized).enumerate() {
        partial += x;
        let nrm_s = nrm.map(float).unwrap_or_default();
        table.push(vec![d.to_string(), x.to_string(), partial.to_string(), nrm_s.clone()]);
        rows.push(json!({ "delta": d, "a_delta": big(x), "partial_sum": big(&partial), "normalized": nrm.map(float) }));
    }
    let v = json!({
        "q": a.q,
        "a": a_min,
        "b": b,
        "orbits": dec.orbits.iter().map(|o| json!({ "size": o.size(), "inv": o.inv })).collect::<Vec<_>>(),
        "rows": rows,
    });
    done(out.emit(&v, Some(&table), None))
}

fn picard(spec: &Path, cl: &str, n: u64, global: &Global, out: &Output) -> Result<ExitCode> {
    let (_, g) = load_group(spec)?;
    let c = classes(&g, cl)?;
    let p = stable_picard_prediction(&g, &c, n, global.budget)?;
    let rendered = match &p {
        PicardPrediction::Empty { .. } => "empty".to_string(),
        PicardPrediction::Cyclic { order, exponent, .. } => format!("(Z/{order})^{exponent}"),
    };
    let mut v = to_value(&p);
    v["n"] = json!(n);
    v["rendered"] = json!(rendered);
    done(out.emit(&v, None, None))
}

fn clm_compare(
    h: &Path,
    gamma: &Path,
    action: &Path,
    q: u64,
    n_range: std::ops::RangeInclusive<usize>,
    global: &Global,
    out: &Output,
) -> Result<ExitCode> {
    let (_, hg) = load_group(h)?;
    let (_, gg) = load_group(gamma)?;
    let action_spec: ActionSpec = read_json(action)?;
    let act = build_action(&hg, &gg, action_spec.generators())?;
    let adm = is_admissible(&hg, &gg, &act)?;
    let inst = build_instance(hg, gg, act, q)?;
    let ns: Vec<usize> = n_range.collect();
    let cmp = component_comparison(&inst, &ns, global.budget)?;
    let header = json!({
        "q": q,
        "admissible": adm.admissible,
        "order_G": inst.g.order(),
        "order_statistics_G": inst.g.order_statistics(),
        "c1": labels(&inst.g, &inst.c1.members),
        "c2": labels(&inst.gamma, &inst.c2.members),
        "moment": cmp.moment.to_string(),
        "d_G": cmp.d_g,
        "d_Gamma": cmp.d_gamma,
        "threshold": cmp.threshold,
    });
    let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_else(|| "NA".into());
    let mut table = Table::new(&["n", "pi_G", "pi_Gamma", "diff", "d_G", "d_Gamma"]);
    for r in &cmp.rows {
        table.push(vec![
            r.n.to_string(),
            opt(r.pi_g),
            opt(r.pi_gamma),
            r.diff.map(|v| v.to_string()).unwrap_or_else(|| "NA".into()),
            cmp.d_g.to_string(),
            cmp.d_gamma.to_string(),
        ]);
    }
    let v = json!({ "header": header, "rows": to_value(&cmp.rows) });
    done(out.emit(&v, Some(&table), Some(&header)))
}
