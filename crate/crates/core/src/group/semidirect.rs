use super::GroupTable;
use crate::error::{Error, Result};

/// `H x| Gamma` together with the coordinate maps.
#[derive(Clone, Debug)]
pub struct SemidirectProduct {
    pub group: GroupTable,
    /// `coords[x] = (h, gamma)`.
    pub coords: Vec<(usize, usize)>,
    gamma_order: usize,
    gamma_identity: usize,
}

impl SemidirectProduct {
    pub fn element(&self, h: usize, gamma: usize) -> usize {
        h * self.gamma_order + gamma
    }

    pub fn project(&self, x: usize) -> usize {
        self.coords[x].1
    }

    pub fn embed_h(&self, h: usize) -> usize {
        self.element(h, self.gamma_identity)
    }
}

/// Validates `action[gamma][h] = gamma(h)` as a homomorphism `Gamma -> Aut(H)`.
pub fn validate_action(h: &GroupTable, gamma: &GroupTable, action: &[Vec<usize>]) -> Result<()> {
    if action.len() != gamma.order() {
        return Err(Error::NotAnAction(format!(
            "{} automorphisms given for a group of order {}",
            action.len(),
            gamma.order()
        )));
    }
    for (g, map) in action.iter().enumerate() {
        if map.len() != h.order() {
            return Err(Error::NotAnAction(format!("image of {} has wrong length", gamma.label(g))));
        }
        let mut seen = vec![false; h.order()];
        for &y in map {
            if y >= h.order() || seen[y] {
                return Err(Error::NotAnAction(format!("{} is not a bijection", gamma.label(g))));
            }
            seen[y] = true;
        }
        for a in 0..h.order() {
            for b in 0..h.order() {
                if map[h.mul(a, b)] != h.mul(map[a], map[b]) {
                    return Err(Error::NotAnAction(format!(
                        "{} is not a homomorphism at ({}, {})",
                        gamma.label(g),
                        h.label(a),
                        h.label(b)
                    )));
                }
            }
        }
    }
    for g1 in 0..gamma.order() {
        for g2 in 0..gamma.order() {
            let g12 = gamma.mul(g1, g2);
            for x in 0..h.order() {
                if action[g12][x] != action[g1][action[g2][x]] {
                    return Err(Error::NotAnAction(format!(
                        "({})({}) differs from the composite on {}",
                        gamma.label(g1),
                        gamma.label(g2),
                        h.label(x)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Extends automorphisms given on generators of `Gamma` to all of `Gamma`.
pub fn extend_action(
    h: &GroupTable,
    gamma: &GroupTable,
    on_generators: &[(usize, Vec<usize>)],
) -> Result<Vec<Vec<usize>>> {
    let identity: Vec<usize> = (0..h.order()).collect();
    let mut action: Vec<Option<Vec<usize>>> = vec![None; gamma.order()];
    action[gamma.identity()] = Some(identity);
    let mut queue = vec![gamma.identity()];
    let mut k = 0;
    while k < queue.len() {
        let x = queue[k];
        for (s, map_s) in on_generators {
            // (x s)(h) = x(s(h))
            let map_x = action[x].clone().unwrap();
            let composed: Vec<usize> = map_s.iter().map(|&y| map_x[y]).collect();
            let xs = gamma.mul(x, *s);
            match &action[xs] {
                None => {
                    action[xs] = Some(composed);
                    queue.push(xs);
                }
                Some(existing) if *existing != composed => {
                    return Err(Error::NotAnAction(format!(
                        "inconsistent images for {}",
                        gamma.label(xs)
                    )));
                }
                Some(_) => {}
            }
        }
        k += 1;
    }
    let action: Vec<Vec<usize>> = action
        .into_iter()
        .enumerate()
        .map(|(g, a)| {
            a.ok_or_else(|| {
                Error::NotAnAction(format!("generators do not reach {}", gamma.label(g)))
            })
        })
        .collect::<Result<_>>()?;
    validate_action(h, gamma, &action)?;
    Ok(action)
}

/// `(h1, g1)(h2, g2) = (h1 g1(h2), g1 g2)` on `H x Gamma`; element
/// `(h, g)` has index `h * |Gamma| + g`.
pub fn semidirect_product(
    h: &GroupTable,
    gamma: &GroupTable,
    action: &[Vec<usize>],
) -> Result<SemidirectProduct> {
    validate_action(h, gamma, action)?;
    let (nh, ng) = (h.order(), gamma.order());
    let n = nh * ng;
    let coords: Vec<(usize, usize)> = (0..n).map(|x| (x / ng, x % ng)).collect();
    let mut mul = vec![0u32; n * n];
    for x in 0..n {
        let (h1, g1) = coords[x];
        for y in 0..n {
            let (h2, g2) = coords[y];
            let hh = h.mul(h1, action[g1][h2]);
            mul[x * n + y] = (hh * ng + gamma.mul(g1, g2)) as u32;
        }
    }
    let labels = coords
        .iter()
        .map(|&(a, b)| format!("({},{})", h.label(a), gamma.label(b)))
        .collect();
    let identity = h.identity() * ng + gamma.identity();
    Ok(SemidirectProduct {
        group: GroupTable::from_trusted_parts(mul, identity, labels),
        coords,
        gamma_order: ng,
        gamma_identity: gamma.identity(),
    })
}

/// The automorphism `x -> x^k` of a cyclic group `Z/n` in table form.
pub fn cyclic_power_map(n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|x| (x * k) % n).collect()
}
