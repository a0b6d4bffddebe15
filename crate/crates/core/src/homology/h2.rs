use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::bar::{bar_boundary_matrices, BarComplex};
use super::snf::{smith_normal_form, smith_normal_form_with_transforms, IntegerMatrix};
use crate::error::Result;
use crate::group::{GroupTable, Subset};

/// A 2-cycle `sum coeff * [g|h]` generating one cyclic summand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisCycle {
    pub order: BigInt,
    /// `(g, h, coefficient)` with group element indices.
    pub terms: Vec<(usize, usize, BigInt)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H2Result {
    /// Invariant factors greater than one; empty means trivial.
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
    pub basis_cycles: Vec<BasisCycle>,
}

impl H2Result {
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }
}

/// `H_2(G; Z) = ker d2 / im d3` on the normalized bar complex.
pub fn h2_group(g: &GroupTable, budget: usize) -> Result<H2Result> {
    let bar = bar_boundary_matrices(g, budget)?;
    let relations = bar.d3.clone();
    Ok(quotient_of_cycles(&bar, &relations))
}

/// `H_2(G, c)`: `H_2(G; Z)` modulo the classes `[x|y] - [y|x]` of all
/// commuting ordered pairs `x, y` in `c`.
pub fn h2_gc(g: &GroupTable, c: &Subset, budget: usize) -> Result<H2Result> {
    let bar = bar_boundary_matrices(g, budget)?;
    let extra = IntegerMatrix::from_triplets(bar.dim2(), 0, vec![]);
    let mut triplets = Vec::new();
    let mut col = 0;
    for x in c.iter() {
        for y in c.iter() {
            if g.mul(x, y) != g.mul(y, x) {
                continue;
            }
            // x == y gives the zero chain; kept so the column count is |commuting pairs|
            if let Some(i) = bar.pair_index(x, y) {
                triplets.push((i, col, 1));
            }
            if let Some(i) = bar.pair_index(y, x) {
                triplets.push((i, col, -1));
            }
            col += 1;
        }
    }
    let extra = if col == 0 {
        extra
    } else {
        IntegerMatrix::from_triplets(bar.dim2(), col, triplets)
    };
    let relations = bar.d3.hcat(&extra);
    Ok(quotient_of_cycles(&bar, &relations))
}

/// `ker d2 / colspan(relations)` for relations inside `ker d2`.
///
/// `C_2 / ker d2` embeds in `C_1`, so `ker d2` is a direct summand and the
/// torsion of the quotient equals the torsion of `coker(relations)`.
fn quotient_of_cycles(bar: &BarComplex, relations: &IntegerMatrix) -> H2Result {
    let rank_d2 = smith_normal_form(&bar.d2).rank;
    let snf = smith_normal_form_with_transforms(relations);
    let cycles_rank = bar.dim2() - rank_d2;
    let free_rank = cycles_rank - snf.rank;
    let mut invariant_factors = Vec::new();
    let mut basis_cycles = Vec::new();
    for gen in snf.cokernel.unwrap_or_default() {
        if gen.order.is_zero() || gen.order.is_one() {
            continue;
        }
        invariant_factors.push(gen.order.clone());
        let terms = gen
            .vector
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| {
                let (a, b) = bar.pair(i);
                (a, b, v.clone())
            })
            .collect();
        basis_cycles.push(BasisCycle {
            order: gen.order,
            terms,
        });
    }
    H2Result {
        invariant_factors,
        free_rank,
        basis_cycles,
    }
}
