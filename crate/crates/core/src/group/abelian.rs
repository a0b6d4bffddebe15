use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{commutator_subgroup, cosets, GroupTable};
use crate::homology::snf::{smith_normal_form_with_transforms, IntegerMatrix};

/// `G^ab` as `Z/d_1 x ... x Z/d_k` together with the quotient map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abelianization {
    pub invariant_factors: Vec<u64>,
    /// Coordinates of the image of each group element.
    pub coordinates: Vec<Vec<u64>>,
}

impl Abelianization {
    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn image(&self, x: usize) -> &[u64] {
        &self.coordinates[x]
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.invariant_factors)
            .map(|((x, y), d)| (x + y) % d)
            .collect()
    }

    pub fn scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter()
            .zip(&self.invariant_factors)
            .map(|(x, d)| ((*x as u128 * k as u128) % *d as u128) as u64)
            .collect()
    }

    /// Order of the image of `x` in `G^ab`.
    pub fn image_order(&self, x: usize) -> u64 {
        self.coordinates[x]
            .iter()
            .zip(&self.invariant_factors)
            .fold(1, |acc, (&c, &d)| acc.lcm(&(d / c.gcd(&d))))
    }
}

/// Abelianization via Smith normal form of the relation matrix of `G/[G,G]`.
///
/// The quotient is presented on one generator `e_a` per coset with relations
/// `e_a + e_s = e_{a+s}` for `s` running over the images of a generating set;
/// the row transform of the SNF gives the coordinates of each coset.
pub fn abelianization(g: &GroupTable) -> Abelianization {
    let derived = commutator_subgroup(g);
    let (coset_of, reps) = cosets(g, &derived);
    let k = reps.len();
    let gens = g.generators();
    let mut triplets = Vec::new();
    let mut col = 0;
    for (a, &ra) in reps.iter().enumerate() {
        for &s in gens {
            let b = coset_of[s];
            let ab = coset_of[g.mul(ra, s)];
            triplets.push((a, col, 1));
            triplets.push((b, col, 1));
            triplets.push((ab, col, -1));
            col += 1;
        }
    }
    if col == 0 {
        // trivial group
        return Abelianization {
            invariant_factors: vec![],
            coordinates: vec![vec![]; g.order()],
        };
    }
    let m = IntegerMatrix::from_triplets(k, col, triplets);
    let snf = smith_normal_form_with_transforms(&m);
    let p = snf.row_transform.expect("requested transforms");
    // The cokernel is finite, so every summand has a nonzero order.
    let keep: Vec<(usize, BigInt)> = snf
        .cokernel
        .expect("requested transforms")
        .into_iter()
        .filter(|gen| gen.order > BigInt::one())
        .map(|gen| (gen.row, gen.order))
        .collect();
    let invariant_factors: Vec<u64> = keep.iter().map(|(_, d)| d.to_u64().unwrap()).collect();
    let coords_of_coset: Vec<Vec<u64>> = (0..k)
        .map(|a| {
            keep.iter()
                .map(|(row, d)| p[*row][a].mod_floor(d).to_u64().unwrap())
                .collect()
        })
        .collect();
    Abelianization {
        invariant_factors,
        coordinates: (0..g.order()).map(|x| coords_of_coset[coset_of[x]].clone()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;

    #[test]
    fn s3_abelianizes_to_z2() {
        let g = GroupTable::symmetric(3);
        let ab = abelianization(&g);
        assert_eq!(ab.invariant_factors, vec![2]);
        let t = g.element_by_label("(1,2)").unwrap();
        assert_eq!(ab.image_order(t), 2);
        let r = g.element_by_label("(1,2,3)").unwrap();
        assert_eq!(ab.image_order(r), 1);
    }

    #[test]
    fn cyclic_is_its_own_abelianization() {
        let ab = abelianization(&GroupTable::cyclic(6));
        assert_eq!(ab.invariant_factors, vec![6]);
        assert_eq!(ab.image_order(1), 6);
    }

    #[test]
    fn projection_is_a_homomorphism() {
        for g in [
            GroupTable::dihedral(4),
            GroupTable::quaternion(),
            GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(6)),
            GroupTable::symmetric(4),
        ] {
            let ab = abelianization(&g);
            for a in 0..g.order() {
                for b in 0..g.order() {
                    assert_eq!(ab.add(ab.image(a), ab.image(b)), ab.image(g.mul(a, b)).to_vec());
                }
                // onto: every coordinate vector is hit
            }
            let mut images: Vec<&[u64]> = (0..g.order()).map(|x| ab.image(x)).collect();
            images.sort();
            images.dedup();
            assert_eq!(images.len() as u64, ab.order());
        }
        let ab = abelianization(&GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(6)));
        assert_eq!(ab.invariant_factors, vec![2, 6]);
    }

    #[test]
    fn trivial_group() {
        let ab = abelianization(&GroupTable::cyclic(1));
        assert!(ab.invariant_factors.is_empty());
        assert_eq!(ab.image_order(0), 1);
    }
}
