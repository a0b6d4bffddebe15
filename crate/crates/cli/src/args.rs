//! Argument helpers: label lists, ranges, subsets.

use std::ops::RangeInclusive;

use hurwitz_core::group::{class_closure, subgroup_generated, GroupTable, Subset};
use hurwitz_core::input::parse_elements;
use hurwitz_core::{Error, Result};

/// Splits on commas outside parentheses, so `(1,2),(1,2,3)` has two items.
pub fn split_labels(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out.retain(|x| !x.is_empty());
    out
}

pub fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

/// `all` for `G - id`, else the union of the classes of the listed elements.
pub fn classes(g: &GroupTable, spec: &str) -> Result<Subset> {
    if spec.trim() == "all" {
        return Ok(Subset::non_identity(g));
    }
    let reps = parse_elements(g, &split_labels(spec))?;
    if reps.contains(&g.identity()) {
        return Err(Error::InvalidInput("c must not contain the identity".into()));
    }
    let c = class_closure(g, &reps);
    if c.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(c)
}

/// The subgroup generated by the listed elements; the trivial subgroup when absent.
pub fn subgroup(g: &GroupTable, spec: Option<&str>) -> Result<Vec<usize>> {
    let gens = match spec {
        Some(s) => parse_elements(g, &split_labels(s))?,
        None => Vec::new(),
    };
    Ok(subgroup_generated(g, &gens).members)
}

pub fn element(g: &GroupTable, label: &str) -> Result<usize> {
    g.element_by_label(label)
        .ok_or_else(|| Error::InvalidInput(format!("unknown group element {label:?}")))
}
