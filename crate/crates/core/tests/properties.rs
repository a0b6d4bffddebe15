use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use hurwitz_core::braid::{enumerate_components, TupleSpaceSpec};
use hurwitz_core::clm::{build_instance, is_admissible, predicted_moment};
use hurwitz_core::frobenius::{d_constant, is_geometrically_irreducible, powering_action_on_components, q_powering};
use hurwitz_core::group::{
    class_closure, conjugacy_classes, cyclic_power_map, extend_action, GroupTable, Subset,
};
use hurwitz_core::homology::h2_group;
use hurwitz_core::malle::{
    b_m_constant, b_t_constant, discriminant_invariant, malle_exponents, pole_order, rdisc_invariant,
    regular_discriminant_invariant, rho_orbits, stable_picard_prediction, tuple_count_coefficients,
    CountingInvariant, OrbitDecomposition, PicardPrediction,
};
use hurwitz_core::rack::conjugation_rack;
use hurwitz_core::Error;

fn small_groups() -> Vec<GroupTable> {
    vec![
        GroupTable::cyclic(2),
        GroupTable::cyclic(3),
        GroupTable::cyclic(4),
        GroupTable::cyclic(5),
        GroupTable::cyclic(6),
        GroupTable::symmetric(3),
        GroupTable::symmetric(4),
        GroupTable::dihedral(4),
        GroupTable::dihedral(5),
        GroupTable::quaternion(),
        GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(2)),
    ]
}

fn arb_group() -> impl Strategy<Value = GroupTable> {
    (0..small_groups().len()).prop_map(|i| small_groups().swap_remove(i))
}

/// A nonempty union of nontrivial classes, closed under prime-to-order powers.
fn arb_group_and_c() -> impl Strategy<Value = (GroupTable, Subset)> {
    arb_group().prop_flat_map(|g| {
        let k = conjugacy_classes(&g).len() - 1;
        (Just(g), proptest::collection::vec(any::<bool>(), k))
    })
    .prop_filter_map("empty c", |(g, pick)| {
        let classes = conjugacy_classes(&g);
        let reps: Vec<usize> = classes
            .blocks
            .iter()
            .filter(|b| !b.contains(&g.identity()))
            .zip(&pick)
            .filter(|(_, &p)| p)
            .map(|(b, _)| b[0])
            .collect();
        (!reps.is_empty()).then(|| {
            let powers: Vec<usize> = reps
                .iter()
                .flat_map(|&x| {
                    let ord = g.element_order(x);
                    (1..=ord).filter(move |j| j.gcd(&ord) == 1).map(move |j| (x, j))
                })
                .map(|(x, j)| g.pow(x, j as u64))
                .collect();
            let c = class_closure(&g, &powers);
            (g, c)
        })
    })
}

/// Naive rational-class oracle: `x ~ y` iff `y` is conjugate to `x^j` with `j` prime to `ord(x)`.
fn rational_class_ids(g: &GroupTable) -> Vec<usize> {
    let n = g.order();
    let mut id = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if id[x] != usize::MAX {
            continue;
        }
        let ord = g.element_order(x);
        for j in 1..=ord.max(1) {
            if j.gcd(&ord) != 1 {
                continue;
            }
            let p = g.pow(x, j as u64);
            for y in 0..n {
                id[g.conj(p, y)] = next;
            }
        }
        next += 1;
    }
    id
}

/// Brute force over multiplicity vectors.
fn coefficients_oracle(sizes: &[(usize, u64)], q: u64, delta_max: usize) -> Vec<BigInt> {
    fn go(i: usize, sizes: &[(usize, u64)], q: u64, delta: usize, weight: BigInt, out: &mut [BigInt]) {
        if i == sizes.len() {
            out[delta] += weight;
            return;
        }
        let (s, inv) = sizes[i];
        let step = s * inv as usize;
        let mut m = 0;
        let mut w = weight;
        while delta + m * step < out.len() {
            go(i + 1, sizes, q, delta + m * step, w.clone(), out);
            w *= BigInt::from(q).pow(s as u32);
            m += 1;
        }
    }
    let mut out = vec![BigInt::zero(); delta_max + 1];
    go(0, sizes, q, 0, BigInt::one(), &mut out);
    out
}

fn coprime_q(g: &GroupTable, raw: u64) -> u64 {
    let mut q = raw.max(2);
    while q.gcd(&(g.order() as u64)) != 1 {
        q += 1;
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn standard_invariants_validate(g in arb_group()) {
        let reg = regular_discriminant_invariant(&g).unwrap();
        let rd = rdisc_invariant(&g);
        for x in 0..g.order() {
            for y in 0..g.order() {
                prop_assert_eq!(reg.value(x), reg.value(g.conj(x, y)));
            }
            if x != g.identity() {
                prop_assert_eq!(rd.value(x), 1);
                prop_assert!(reg.value(x) > 0);
            }
        }
        if g.perm_images().is_some() {
            prop_assert!(discriminant_invariant(&g).is_ok());
        }
    }

    #[test]
    fn custom_invariants_accepted_iff_rational(g in arb_group(), seed in proptest::collection::vec(1u64..4, 16)) {
        let classes = conjugacy_classes(&g);
        let values: Vec<u64> = (0..classes.len()).map(|i| seed[i % seed.len()]).collect();
        let rational = rational_class_ids(&g);
        let consistent = (0..g.order()).all(|x| {
            (0..g.order()).all(|y| {
                rational[x] != rational[y]
                    || x == g.identity()
                    || values[classes.class_of(x).unwrap()] == values[classes.class_of(y).unwrap()]
            })
        });
        let built = CountingInvariant::from_class_values(&g, &values);
        prop_assert_eq!(built.is_ok(), consistent);
        if let Err(e) = built {
            prop_assert!(matches!(e, Error::ValidationFailure(_)));
        }
    }

    #[test]
    fn coefficient_paths_agree_with_oracle(
        sizes in proptest::collection::vec((1usize..4, 1u64..4), 1..5),
        q in 2u64..6,
        delta_max in 0usize..30,
    ) {
        let dec = OrbitDecomposition::from_sizes(&sizes);
        let a = tuple_count_coefficients(&dec, q, delta_max).unwrap();
        prop_assert_eq!(a, coefficients_oracle(&sizes, q, delta_max));
    }

    #[test]
    fn exponents_depend_on_q_mod_exponent((g, c) in arb_group_and_c(), raw in 2u64..40, shift in 1u64..4) {
        let q = coprime_q(&g, raw);
        let q2 = q + shift * g.exponent() as u64;
        let inv = regular_discriminant_invariant(&g).unwrap();
        let e1 = malle_exponents(&g, &c, &inv, q, 20).unwrap();
        let e2 = malle_exponents(&g, &c, &inv, q2, 20).unwrap();
        prop_assert_eq!((e1.a, e1.b_m, e1.b_t), (e2.a, e2.b_m, e2.b_t));
        prop_assert!(e1.b_t >= e1.b_m);
    }

    #[test]
    fn pole_order_matches_b_m((g, c) in arb_group_and_c(), raw in 2u64..40) {
        let q = coprime_q(&g, raw);
        let inv = regular_discriminant_invariant(&g).unwrap();
        let whole = Subset::whole(&g);
        let e = malle_exponents(&g, &c, &inv, q, 20).unwrap();
        let dec = rho_orbits(&g, &whole, &c, e.b_m_witness, q, &inv).unwrap();
        prop_assert_eq!(pole_order(&dec), e.b_m);
        // orbits partition the G-classes of c
        let mut all: Vec<usize> = dec.orbits.iter().flat_map(|o| o.classes.clone()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..dec.classes.len()).collect::<Vec<_>>());
        let bm = b_m_constant(&g, &whole, &Subset { members: e.c_inv.clone() }, q, &inv).unwrap();
        prop_assert_eq!(bm.b, e.b_m);
        let bt = b_t_constant(&g, &c, q, &inv, 20).unwrap();
        prop_assert_eq!(bt.b, e.b_t);
    }

    #[test]
    fn picard_order_is_the_prime_to_2g_part(n in 2u64..200) {
        let g = GroupTable::symmetric(3);
        let c = class_closure(&g, &[g.element_by_label("(1,2)").unwrap()]);
        match stable_picard_prediction(&g, &c, n, 100_000).unwrap() {
            PicardPrediction::Empty { order_in_abelianization, .. } => {
                prop_assert_eq!(order_in_abelianization, 2);
                prop_assert!(n % 2 == 1);
            }
            PicardPrediction::Cyclic { order, exponent, .. } => {
                prop_assert!(n % 2 == 0);
                prop_assert_eq!(exponent, 1);
                prop_assert_eq!((2 * n - 2) % order, 0);
                prop_assert_eq!(order.gcd(&12), 1);
                let mut rest = (2 * n - 2) / order;
                for p in [2, 3] {
                    while rest % p == 0 {
                        rest /= p;
                    }
                }
                prop_assert_eq!(rest, 1);
            }
        }
    }

    #[test]
    fn clm_instances(p in prop::sample::select(vec![3usize, 5, 7]), raw_q in 2u64..60, k_pick in 0usize..6) {
        // Z/p x| Z/m with the generator acting by a unit of order m
        let units: Vec<usize> = (1..p).collect();
        let k = units[k_pick % units.len()];
        let m = (1..).find(|&j| num_traits::pow(k, j) % p == 1).unwrap();
        let h = GroupTable::cyclic(p);
        let gamma = GroupTable::cyclic(m);
        let gen = if m == 1 { 0 } else { 1 };
        let action = extend_action(&h, &gamma, &[(gen, cyclic_power_map(p, k))]).unwrap();
        let adm = is_admissible(&h, &gamma, &action).unwrap();
        prop_assert_eq!(adm.admissible, m > 1);
        let fixed = if m > 1 { 1 } else { p as u64 };
        prop_assert_eq!(predicted_moment(&h, &action).denominator, p as u64 / fixed);
        if m == 1 {
            return Ok(());
        }
        let mut q = raw_q;
        while q.gcd(&((p * m) as u64)) != 1 {
            q += 1;
        }
        let inst = build_instance(h, gamma, action, q).unwrap();
        for x in inst.c1.iter() {
            let img = inst.product.project(x);
            prop_assert!(inst.c2.contains(img));
            prop_assert_eq!(inst.g.element_order(x), inst.gamma.element_order(img));
        }
        prop_assert_eq!(d_constant(&inst.g, &inst.c1, q).unwrap(), d_constant(&inst.gamma, &inst.c2, q).unwrap());
    }

    #[test]
    fn h2_relabeling_invariance(g in arb_group(), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed);
        let mut perm: Vec<usize> = (0..g.order()).collect();
        perm.shuffle(&mut rng);
        let h = g.relabeled(&perm);
        let (a, b) = (h2_group(&g, 200_000).unwrap(), h2_group(&h, 200_000).unwrap());
        prop_assert_eq!(a.invariant_factors, b.invariant_factors);
        prop_assert_eq!(a.free_rank, b.free_rank);
    }

    #[test]
    fn powering_permutes_components((g, c) in arb_group_and_c(), raw in 2u64..30, n in 1usize..4) {
        prop_assume!(c.len() <= 12);
        let q = coprime_q(&g, raw);
        let g = Arc::new(g);
        let rack = Arc::new(conjugation_rack(g.clone(), &c).unwrap());
        let cat = enumerate_components(&TupleSpaceSpec::new(rack, n)).unwrap();
        let pm = q_powering(&g, &c, q).unwrap();
        let images = match powering_action_on_components(&cat, &pm) {
            Ok(images) => images,
            Err(Error::InvariantViolation(_)) => {
                prop_assert!(!pm.respects_rack(&g));
                return Ok(());
            }
            Err(e) => panic!("{e}"),
        };
        let mut sorted = images.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..cat.len()).collect::<Vec<_>>());
        let trivial = [g.identity()];
        for (i, &j) in images.iter().enumerate() {
            prop_assert_eq!(is_geometrically_irreducible(i, &cat, &pm, &trivial).unwrap(), i == j);
            prop_assert_eq!(cat.records[i].orbit_size, cat.records[j].orbit_size);
        }
    }
}
