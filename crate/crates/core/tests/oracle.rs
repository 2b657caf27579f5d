use assembly_core::oracle::{
    enumerate_profiles, oracle_moments, structure_oracle_permutations, PROFILE_CAP,
};
use assembly_core::{builtin_class, Error, Family};

/// Partition numbers by the standard coin-change recursion.
fn partition_numbers(upto: usize) -> Vec<u64> {
    let mut p = vec![0u64; upto + 1];
    p[0] = 1;
    for part in 1..=upto {
        for n in part..=upto {
            p[n] += p[n - part];
        }
    }
    p
}

#[test]
fn profile_counts_are_partition_numbers() {
    let p = partition_numbers(60);
    for n in 0..=60 {
        assert_eq!(enumerate_profiles(n).unwrap().count() as u64, p[n], "n={n}");
    }
}

#[test]
fn every_profile_has_the_right_order_and_appears_once() {
    for n in [1, 9, 17] {
        let mut seen = std::collections::HashSet::new();
        for p in enumerate_profiles(n).unwrap() {
            assert_eq!(p.order(), n);
            assert!(seen.insert(p.multiplicities));
        }
    }
}

#[test]
fn cap_is_enforced() {
    assert!(enumerate_profiles(PROFILE_CAP).is_ok());
    assert!(matches!(
        enumerate_profiles(PROFILE_CAP + 1),
        Err(Error::AboveCap { .. })
    ));
    let w = Family::ComponentCount.for_n(9);
    assert!(matches!(
        structure_oracle_permutations(9, &w),
        Err(Error::AboveCap { .. })
    ));
}

#[test]
fn permutation_structures_induce_the_profile_measure() {
    let class = builtin_class("permutations").unwrap();
    for n in 1..=8 {
        for family in [
            Family::ComponentCount,
            Family::SmallComponents,
            Family::Rademacher { seed: 2 },
            Family::DistinctSizes,
            Family::SingleSize { size: 2 },
        ] {
            let h = family.for_n(n);
            assert_eq!(
                structure_oracle_permutations(n, &h).unwrap(),
                oracle_moments(&class, n, &h).unwrap(),
                "n={n} {family}"
            );
        }
    }
}
