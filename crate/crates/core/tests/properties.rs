#[path = "support/jets.rs"]
mod jets;

use jets::{diffeo, jet};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in jet(2, 0), b in jet(2, 0), c in jet(2, 0)) {
        jets::ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn ring_axioms_three_variables(a in jet(3, 0), b in jet(3, 0), c in jet(3, 0)) {
        jets::ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn compose_invert_round_trip(sigma in diffeo()) {
        jets::compose_invert(&sigma)?;
    }

    #[test]
    fn divide_mul_round_trip(quot in jet(2, 0), d in jet(2, 0)) {
        prop_assume!(!d.is_zero());
        jets::divide_mul(&quot, &d)?;
    }

    #[test]
    fn leibniz_and_additivity(a in jet(2, 0), b in jet(2, 0), i in 0usize..2) {
        jets::leibniz(&a, &b, i)?;
    }
}
