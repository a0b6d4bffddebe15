use super::*;
use crate::group::{center, class_closure, Perm};
use crate::rack::conjugation_rack;
use proptest::prelude::*;

fn class_rack(g: GroupTable, rep: &str) -> Arc<Rack> {
    let g = Arc::new(g);
    let c = class_closure(&g, &[g.element_by_label(rep).unwrap()]);
    Arc::new(conjugation_rack(g, &c).unwrap())
}

fn s3_rack() -> Arc<Rack> {
    class_rack(GroupTable::symmetric(3), "(1,2)")
}

fn idx(r: &Rack, label: &str) -> u16 {
    r.index_of_label(label).unwrap() as u16
}

/// Connected components of the graph joining tuples one move apart,
/// found by comparing every pair.
fn naive_partition(r: &Rack, n: usize) -> Vec<Vec<Vec<u16>>> {
    let s = r.size();
    let tuples: Vec<Vec<u16>> = (0..s.pow(n as u32))
        .map(|mut code| {
            let mut t = vec![0u16; n];
            for k in (0..n).rev() {
                t[k] = (code % s) as u16;
                code /= s;
            }
            t
        })
        .collect();
    let mut parent: Vec<usize> = (0..tuples.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for i in 0..tuples.len() {
        for j in 0..tuples.len() {
            let adjacent = (1..n).any(|k| {
                sigma(r, &tuples[i], k, false).unwrap() == tuples[j]
                    || sigma(r, &tuples[i], k, true).unwrap() == tuples[j]
            });
            if adjacent {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: HashMap<usize, Vec<Vec<u16>>> = HashMap::new();
    for i in 0..tuples.len() {
        let root = find(&mut parent, i);
        classes.entry(root).or_default().push(tuples[i].clone());
    }
    let mut out: Vec<Vec<Vec<u16>>> = classes.into_values().collect();
    out.sort();
    out
}

#[test]
fn sigma_examples() {
    let t = Rack::trivial(3);
    assert_eq!(sigma(&t, &[0, 1, 2], 1, false).unwrap(), vec![1, 0, 2]);
    let r = s3_rack();
    let (a, b, c) = (idx(&r, "(1,2)"), idx(&r, "(1,3)"), idx(&r, "(2,3)"));
    assert_eq!(sigma(&r, &[a, b], 1, false).unwrap(), vec![b, c]);
    let fwd = sigma(&r, &[a, b, c], 2, false).unwrap();
    assert_eq!(sigma(&r, &fwd, 2, true).unwrap(), vec![a, b, c]);
    assert!(matches!(sigma(&r, &[a, b], 2, false), Err(Error::IndexOutOfRange { .. })));
    assert!(matches!(sigma(&r, &[a, b], 0, false), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn small_catalogs() {
    let one = Arc::new(Rack::trivial(1));
    let cat = enumerate_components(&TupleSpaceSpec::new(one, 7)).unwrap();
    assert_eq!(cat.len(), 1);
    assert_eq!(cat.records[0].orbit_size, 1);

    let cat = enumerate_components(&TupleSpaceSpec::new(Arc::new(Rack::trivial(3)), 2)).unwrap();
    assert_eq!(cat.len(), 6);

    let r = s3_rack();
    let cat = enumerate_components(&TupleSpaceSpec::new(r.clone(), 2)).unwrap();
    let mut sizes: Vec<u64> = cat.records.iter().map(|x| x.orbit_size).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 1, 1, 3, 3]);
    let g = &r.group_origin().unwrap().group;
    let mut cycles: Vec<usize> = cat
        .records
        .iter()
        .filter(|x| x.orbit_size == 3)
        .map(|x| x.boundary_monodromy.unwrap())
        .collect();
    cycles.sort_unstable();
    let mut expected = vec![g.element_by_label("(1,2,3)").unwrap(), g.element_by_label("(1,3,2)").unwrap()];
    expected.sort_unstable();
    assert_eq!(cycles, expected);
    assert_eq!(cat.totals.admissible_tuples, 9);
}

#[test]
fn agrees_with_naive_oracle() {
    for (r, n) in [(s3_rack(), 3), (s3_rack(), 4), (Arc::new(Rack::affine_quandle(5, 2).unwrap()), 3)] {
        let cat = enumerate_components(&TupleSpaceSpec::new(r.clone(), n)).unwrap();
        let oracle = naive_partition(&r, n);
        assert_eq!(cat.len(), oracle.len());
        for class in &oracle {
            let rec = &cat.records[cat.resolve(&class[0]).unwrap()];
            assert_eq!(rec.canonical_rep, *class.iter().min().unwrap());
            assert_eq!(rec.orbit_size, class.len() as u64);
            for t in class {
                assert_eq!(cat.resolve(t).unwrap(), cat.resolve(&class[0]).unwrap());
            }
        }
    }
}

#[test]
fn component_of_matches_catalog() {
    let r = s3_rack();
    let cat = enumerate_components(&TupleSpaceSpec::new(r.clone(), 3)).unwrap();
    for a in 0..3u16 {
        for b in 0..3u16 {
            for c in 0..3u16 {
                let rec = component_of(&r, &[a, b, c], 1000).unwrap();
                assert_eq!(rec, cat.records[cat.resolve(&[a, b, c]).unwrap()]);
            }
        }
    }
    let (a, b) = (idx(&r, "(1,2)"), idx(&r, "(1,3)"));
    assert_eq!(component_of(&r, &[a, b], 100).unwrap().orbit_size, 3);
    assert_eq!(component_of(&r, &[a; 6], 100).unwrap().orbit_size, 1);
    assert!(matches!(
        component_of(&r, &[a, b, a, b, a, b, a], 5),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn filters_match_full_catalog() {
    let r = class_rack(GroupTable::symmetric(4), "(1,2)");
    let g = r.group_origin().unwrap().group.clone();
    let n = 4;
    let full = enumerate_components(&TupleSpaceSpec::new(r.clone(), n)).unwrap();
    let all: Vec<usize> = (0..g.order()).collect();
    let gen = enumerate_components(&TupleSpaceSpec::new(r.clone(), n).with_target(all.clone())).unwrap();
    let expected: Vec<&ComponentRecord> = full
        .records
        .iter()
        .filter(|x| x.generated_subgroup == Some(g.order()))
        .collect();
    assert_eq!(gen.records.iter().collect::<Vec<_>>(), expected);
    // rack-level generation: S4 acts faithfully on transpositions
    let rack_gen = enumerate_components(&TupleSpaceSpec::new(r.clone(), n).generating()).unwrap();
    assert_eq!(rack_gen.records, gen.records);

    let q = Arc::new(Rack::trivial(2));
    let full = enumerate_components(&TupleSpaceSpec::new(q.clone(), 5)).unwrap();
    let md = enumerate_components(&TupleSpaceSpec::new(q, 5).with_multidegree(vec![2, 3])).unwrap();
    let expected: Vec<&ComponentRecord> = full.records.iter().filter(|x| x.multidegree == vec![2, 3]).collect();
    assert_eq!(md.records.iter().collect::<Vec<_>>(), expected);
    assert_eq!(md.totals.admissible_tuples, 10);
}

#[test]
fn multidegree_filter_on_conjugation_rack() {
    // Z/3 with c = {1, 2}: two singleton components
    let g = Arc::new(GroupTable::cyclic(3));
    let r = Arc::new(conjugation_rack(g.clone(), &Subset::new(&g, vec![1, 2]).unwrap()).unwrap());
    let cat = enumerate_components(&TupleSpaceSpec::new(r, 5).with_multidegree(vec![2, 3])).unwrap();
    assert_eq!(cat.len(), 1);
    assert_eq!(cat.records[0].canonical_rep, vec![0, 0, 1, 1, 1]);
    assert_eq!(cat.records[0].orbit_size, 10);
}

#[test]
fn budget_and_seeded_mode() {
    let r = s3_rack();
    let spec = TupleSpaceSpec::new(r.clone(), 6).with_budget(600);
    assert!(matches!(enumerate_components(&spec), Err(Error::BudgetExceeded { .. })));
    let seeds = vec![vec![0u16; 6], vec![0, 1, 0, 1, 0, 1]];
    let cat = enumerate_components_from_seeds(&spec, &seeds).unwrap();
    assert_eq!(cat.totals.mode, EnumerationMode::Seeded);
    let full = enumerate_components(&TupleSpaceSpec::new(r, 6)).unwrap();
    for rec in &cat.records {
        assert_eq!(*rec, full.records[full.resolve(&rec.canonical_rep).unwrap()]);
        assert_eq!(cat.records[cat.resolve(&rec.canonical_rep).unwrap()], *rec);
    }
    assert_eq!(cat.len(), 2);
}

#[test]
fn deterministic_across_pools() {
    let r = class_rack(GroupTable::symmetric(4), "(1,2)");
    let spec = TupleSpaceSpec::new(r, 5);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| enumerate_components(&spec).unwrap().records)
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
    assert_eq!(one.iter().map(|r| r.orbit_size).sum::<u64>(), 6u64.pow(5));
}

#[test]
fn quotient_examples() {
    let r = s3_rack();
    let g = r.group_origin().unwrap().group.clone();
    let cat = enumerate_components(&TupleSpaceSpec::new(r.clone(), 2)).unwrap();
    let trivial = quotient_by_conjugation(&cat, &[g.identity()]).unwrap();
    assert_eq!(
        trivial.records.iter().map(|x| &x.canonical_rep).collect::<Vec<_>>(),
        cat.records.iter().map(|x| &x.canonical_rep).collect::<Vec<_>>()
    );
    let all: Vec<usize> = (0..6).collect();
    let q = quotient_by_conjugation(&cat, &all).unwrap();
    assert_eq!(q.len(), 2);
    let mut sizes: Vec<u64> = q.records.iter().map(|x| x.orbit_size).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![3, 6]);
    let cyc = q.records.iter().find(|x| x.orbit_size == 6).unwrap();
    assert_eq!(cyc.monodromy_orbit.as_ref().unwrap().len(), 2);
    // resolution still works on the quotient
    for t in [[0u16, 1], [1, 0], [2, 2]] {
        assert!(q.resolve(&t).is_ok());
    }

    let d4 = class_rack(GroupTable::dihedral(4), "(1,3)");
    let gd = d4.group_origin().unwrap().group.clone();
    let cat = enumerate_components(&TupleSpaceSpec::new(d4.clone(), 3)).unwrap();
    let z = center(&gd);
    let q = quotient_by_conjugation(&cat, &z.members).unwrap();
    assert_eq!(q.len(), cat.len());
    assert_eq!(
        q.records.iter().map(|x| x.orbit_size).collect::<Vec<_>>(),
        cat.records.iter().map(|x| x.orbit_size).collect::<Vec<_>>()
    );

    assert!(matches!(
        quotient_by_conjugation(
            &enumerate_components(&TupleSpaceSpec::new(Arc::new(Rack::trivial(2)), 2)).unwrap(),
            &[0]
        ),
        Err(Error::NotGroupOrigin)
    ));
}

#[test]
fn quotient_needs_normalizer() {
    // c = {(1,2)} is not normalized by (1,3)
    let g = Arc::new(GroupTable::symmetric(3));
    let t = g.element_by_label("(1,2)").unwrap();
    let r = Arc::new(conjugation_rack(g.clone(), &Subset::new(&g, vec![t]).unwrap()).unwrap());
    let cat = enumerate_components(&TupleSpaceSpec::new(r, 2)).unwrap();
    let k = subgroup_generated(&g, &[g.element_by_label("(1,3)").unwrap()]);
    assert!(matches!(
        quotient_by_conjugation(&cat, &k.members),
        Err(Error::KDoesNotNormalize { .. })
    ));
}

#[test]
fn stable_scan_s3() {
    let g = Arc::new(GroupTable::symmetric(3));
    let c = class_closure(&g, &[g.element_by_label("(1,2)").unwrap()]);
    let scan = stable_count_scan(g.clone(), &c, g.identity(), &[2, 3, 4, 5, 6, 7, 8], DEFAULT_STATE_BUDGET).unwrap();
    for row in &scan.rows {
        assert_eq!(row.obstructed, row.n % 2 == 1);
        if row.n % 2 == 1 {
            assert_eq!(row.count, 0);
        }
    }
    assert!(scan.obstruction_consistent());
    let w = scan.window.unwrap();
    assert_eq!((w.end, w.count), (8, 1));
    assert!(w.start <= 4);

    let s2 = Arc::new(GroupTable::symmetric(2));
    let c2 = Subset::new(&s2, vec![1]).unwrap();
    let scan = stable_count_scan(s2.clone(), &c2, 0, &[2, 4, 6], 1000).unwrap();
    assert!(scan.rows.iter().all(|r| r.count == 1));

    let three = class_closure(&g, &[g.element_by_label("(1,2,3)").unwrap(), g.element_by_label("(1,2)").unwrap()]);
    assert!(matches!(
        stable_count_scan(g.clone(), &three, 0, &[2], 1000),
        Err(Error::NotSingleClass(_))
    ));
}

fn arb_rack() -> impl Strategy<Value = Rack> {
    let affine = (1usize..=6, 1usize..6).prop_filter_map("unit", |(n, a)| Rack::affine_quandle(n, a % n.max(1)).ok());
    let perm = (1usize..=6)
        .prop_flat_map(|n| Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|images| Rack::permutation_rack(&Perm::from_images(images).unwrap()));
    let conj = prop_oneof![
        Just(s3_rack().as_ref().clone()),
        Just(class_rack(GroupTable::symmetric(4), "(1,2)").as_ref().clone()),
        Just(class_rack(GroupTable::dihedral(4), "(1,3)").as_ref().clone()),
        Just(class_rack(GroupTable::symmetric(4), "(1,2)(3,4)").as_ref().clone()),
    ];
    prop_oneof![affine, perm, conj]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn braid_relations_hold(r in arb_rack(), raw in prop::collection::vec(0u16..1000, 3..=6)) {
        let t: Vec<u16> = raw.iter().map(|&x| x % r.size() as u16).collect();
        let n = t.len();
        let apply = |t: &[u16], word: &[usize]| word.iter().fold(t.to_vec(), |acc, &i| sigma(&r, &acc, i, false).unwrap());
        for i in 1..n - 1 {
            prop_assert_eq!(apply(&t, &[i, i + 1, i]), apply(&t, &[i + 1, i, i + 1]));
        }
        for i in 1..n {
            for j in i + 2..n {
                prop_assert_eq!(apply(&t, &[i, j]), apply(&t, &[j, i]));
            }
            let back = sigma(&r, &sigma(&r, &t, i, false).unwrap(), i, true).unwrap();
            prop_assert_eq!(&back, &t);
        }
    }

    #[test]
    fn conservation_and_invariance(r in arb_rack(), n in 1usize..=4) {
        let r = Arc::new(r);
        let cat = enumerate_components(&TupleSpaceSpec::new(r.clone(), n)).unwrap();
        prop_assert_eq!(cat.totals.admissible_tuples, (r.size() as u64).pow(n as u32));
        for rec in &cat.records {
            let again = component_of(&r, &rec.canonical_rep, 100_000).unwrap();
            prop_assert_eq!(&again, rec);
        }
    }
}
