mod common;

use common::*;
use parcause::structures::Kind;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn general_structures_agree_with_oracles(seed in any::<u64>(), n in 1usize..=6) {
        let s = random_general(&mut rng(seed), n);
        prop_assert_eq!(oracle_agreement(&s, 3), Ok(()));
    }

    #[test]
    fn prime_like_configurations_agree(seed in any::<u64>(), n in 0usize..=7, k in 0usize..4) {
        let kind = [Kind::Prime, Kind::Ese, Kind::Edc, Kind::Prime][k];
        let s = random_prime_like(&mut rng(seed), n, kind);
        let b = budget();
        prop_assert_eq!(s.all_configs(&b).unwrap(), oracle_configs(&s));
    }
}

#[test]
fn extremal_oracle_on_the_worked_examples() {
    use parcause::fixtures::*;
    use parcause::structures::family_of;
    let b = budget();
    let f3 = family_of(&ex3(), &b).unwrap();
    assert!(oracle_is_extremal(&ex3_extremal(&f3), &f3));
    let f2 = family_of(&ex2(), &b).unwrap();
    assert!(oracle_is_extremal(&ex2_extremal(&f2), &f2));
    for s in [ex1(), ex2(), hide_cex()] {
        assert_eq!(oracle_agreement(&s, 3), Ok(()));
    }
}
