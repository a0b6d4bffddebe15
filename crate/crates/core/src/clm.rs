//! Component counts on both sides of the Cohen-Lenstra-Martinet comparison
//! for `G = H x| Gamma`.

use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::braid::{enumerate_components, TupleSpaceSpec};
use crate::error::{Error, Result};
use crate::frobenius::{d_constant, powering_action_on_components, q_powering};
use crate::group::{
    conjugacy_partition, semidirect_product, subgroup_generated, validate_action, GroupTable,
    SemidirectProduct, Subset,
};
use crate::rack::conjugation_rack;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub coprime: bool,
    /// The distinct nontrivial elements `h^-1 gamma(h)`.
    pub generators: Vec<usize>,
    /// Order of the subgroup they generate.
    pub generated_order: usize,
    pub failure: Option<String>,
}

/// `gcd(|H|, |Gamma|) = 1` and `H = <h^-1 gamma(h)>`.
pub fn is_admissible(h: &GroupTable, gamma: &GroupTable, action: &[Vec<usize>]) -> Result<Admissibility> {
    validate_action(h, gamma, action)?;
    let coprime = h.order().gcd(&gamma.order()) == 1;
    let mut generators: Vec<usize> = (0..gamma.order())
        .flat_map(|g| (0..h.order()).map(move |x| (g, x)))
        .map(|(g, x)| h.mul(h.inv(x), action[g][x]))
        .filter(|&y| y != h.identity())
        .collect();
    generators.sort_unstable();
    generators.dedup();
    let generated_order = subgroup_generated(h, &generators).len();
    let failure = if !coprime {
        Some(format!("gcd(|H|, |Gamma|) = gcd({}, {}) != 1", h.order(), gamma.order()))
    } else if generated_order != h.order() {
        Some(format!(
            "the elements h^-1 gamma(h) generate a subgroup of order {} in H of order {}",
            generated_order,
            h.order()
        ))
    } else {
        None
    };
    Ok(Admissibility {
        admissible: failure.is_none(),
        coprime,
        generators,
        generated_order,
        failure,
    })
}

#[derive(Clone, Debug)]
pub struct ClmInstance {
    pub h: GroupTable,
    pub gamma: Arc<GroupTable>,
    pub action: Vec<Vec<usize>>,
    pub product: SemidirectProduct,
    pub g: Arc<GroupTable>,
    /// Elements of `G` whose order equals that of their image in `Gamma`.
    pub c1: Subset,
    /// `Gamma - id`.
    pub c2: Subset,
    pub q: u64,
}

pub fn build_instance(h: GroupTable, gamma: GroupTable, action: Vec<Vec<usize>>, q: u64) -> Result<ClmInstance> {
    let adm = is_admissible(&h, &gamma, &action)?;
    if let Some(why) = adm.failure {
        return Err(Error::NotAdmissible(why));
    }
    let modulus = (h.order() * gamma.order()) as u64;
    if q.gcd(&modulus) != 1 {
        return Err(Error::GcdViolation { q, modulus });
    }
    let product = semidirect_product(&h, &gamma, &action)?;
    let g = Arc::new(product.group.clone());
    let c1 = Subset {
        members: (0..g.order())
            .filter(|&x| x != g.identity() && g.element_order(x) == gamma.element_order(product.project(x)))
            .collect(),
    };
    let c2 = Subset::non_identity(&gamma);
    let mut image: Vec<usize> = c1.iter().map(|x| product.project(x)).collect();
    image.sort_unstable();
    image.dedup();
    if image != c2.members {
        return Err(Error::InvariantViolation("c1 does not project onto Gamma - id".into()));
    }
    q_powering(&g, &c1, q)?;
    q_powering(&gamma, &c2, q)?;
    let all_g: Vec<usize> = (0..g.order()).collect();
    let all_gamma: Vec<usize> = (0..gamma.order()).collect();
    let k1 = conjugacy_partition(&g, &c1, &all_g)?.len();
    let k2 = conjugacy_partition(&gamma, &c2, &all_gamma)?.len();
    if k1 != k2 {
        return Err(Error::ClassCountMismatch { c1: k1, c2: k2 });
    }
    Ok(ClmInstance {
        h,
        gamma: Arc::new(gamma),
        action,
        product,
        g,
        c1,
        c2,
        q,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Moment {
    pub numerator: u64,
    pub denominator: u64,
}

impl std::fmt::Display for Moment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// `1 / [H : H^Gamma]`.
pub fn predicted_moment(h: &GroupTable, action: &[Vec<usize>]) -> Moment {
    let fixed = (0..h.order()).filter(|&x| action.iter().all(|a| a[x] == x)).count();
    Moment {
        numerator: 1,
        denominator: (h.order() / fixed) as u64,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    /// `None` when the enumeration for this `n` exceeded its budget.
    pub pi_g: Option<u64>,
    pub pi_gamma: Option<u64>,
    pub diff: Option<i64>,
    pub budget_exceeded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub moment: Moment,
    pub d_g: usize,
    pub d_gamma: usize,
    pub rows: Vec<ComparisonRow>,
    /// Least scanned `n` from which every computed difference vanishes.
    pub threshold: Option<usize>,
}

/// Frobenius-fixed components of generating `c`-tuples with trivial
/// boundary monodromy.
pub fn fixed_component_count(g: Arc<GroupTable>, c: &Subset, q: u64, n: usize, budget: usize) -> Result<u64> {
    let rack = Arc::new(conjugation_rack(g.clone(), c)?);
    let all: Vec<usize> = (0..g.order()).collect();
    let spec = TupleSpaceSpec::new(rack, n).with_target(all).with_budget(budget);
    let catalog = enumerate_components(&spec)?;
    let pm = q_powering(&g, c, q)?;
    let images = powering_action_on_components(&catalog, &pm)?;
    Ok(catalog
        .records
        .iter()
        .enumerate()
        .filter(|(i, r)| r.boundary_monodromy == Some(g.identity()) && images[*i] == *i)
        .count() as u64)
}

pub fn component_comparison(inst: &ClmInstance, ns: &[usize], budget: usize) -> Result<Comparison> {
    let d_g = d_constant(&inst.g, &inst.c1, inst.q)?;
    let d_gamma = d_constant(&inst.gamma, &inst.c2, inst.q)?;
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let side = |g: &Arc<GroupTable>, c: &Subset| match fixed_component_count(g.clone(), c, inst.q, n, budget) {
            Ok(v) => Ok(Some(v)),
            Err(Error::BudgetExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        };
        let pi_g = side(&inst.g, &inst.c1)?;
        let pi_gamma = side(&inst.gamma, &inst.c2)?;
        let diff = match (pi_g, pi_gamma) {
            (Some(a), Some(b)) => Some(a as i64 - b as i64),
            _ => None,
        };
        rows.push(ComparisonRow {
            n,
            pi_g,
            pi_gamma,
            diff,
            budget_exceeded: diff.is_none(),
        });
    }
    let computed: Vec<&ComparisonRow> = rows.iter().filter(|r| r.diff.is_some()).collect();
    let threshold = match computed.iter().rposition(|r| r.diff != Some(0)) {
        Some(i) => computed.get(i + 1).map(|r| r.n),
        None => computed.first().map(|r| r.n),
    };
    Ok(Comparison {
        moment: predicted_moment(&inst.h, &inst.action),
        d_g,
        d_gamma,
        rows,
        threshold,
    })
}
