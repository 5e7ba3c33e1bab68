mod common;

use proptest::prelude::*;

use common::{fixtures, rng, Check, Suite, SUITES};

fn run(suite: &Suite, ring: usize, seed: u64) -> Check {
    (suite.1)(&fixtures()[ring], &mut rng(seed))
}

macro_rules! suite {
    ($name:ident, $suite:expr) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]
            #[test]
            fn $name(ring in 0..common::RINGS.len(), seed in any::<u64>()) {
                if let Err(e) = run(&$suite, ring, seed) {
                    prop_assert!(false, "{}", e);
                }
            }
        }
    };
}

suite!(dg_lie_boundary, SUITES[0]);
suite!(dg_lie_bracket, SUITES[1]);
suite!(dg_lie_square, SUITES[2]);
suite!(divided_power_products, SUITES[3]);
suite!(yoneda_associativity, SUITES[4]);
suite!(relations_descend, SUITES[5]);
suite!(omega_right_linear, SUITES[6]);
suite!(omega_left_linear, SUITES[7]);
suite!(chi_linear, SUITES[8]);
suite!(degree_one_dual_action, common::DEGREE_ONE);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn rational_divided_powers(seed in any::<u64>()) {
        if let Err(e) = common::divided_powers_rational(&mut rng(seed)) {
            prop_assert!(false, "{}", e);
        }
    }
}
