mod common;

use common::{arb_hamiltonian, arb_state};
use effham::fidelity::{average_fidelity, composite_fidelity, overall_fidelity, Trial, TrialSet};
use effham::EvolutionMethod;
use proptest::prelude::*;

fn arb_problem() -> impl Strategy<Value = (effham::HamiltonianSum, TrialSet)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            arb_hamiltonian(n, 8),
            prop::collection::vec((arb_state(n), -4.0f64..4.0), 1..5).prop_map(|raw| {
                TrialSet::new(
                    raw.into_iter()
                        .map(|(s, t)| Trial::new(s, t).unwrap())
                        .collect(),
                )
                .unwrap()
            }),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composite_equals_overall((h, trials) in arb_problem()) {
        for m in [EvolutionMethod::Exact, EvolutionMethod::Trotter { steps: 5 }] {
            let a = composite_fidelity(&h, &trials, m).unwrap();
            let b = overall_fidelity(&h, &trials, m).unwrap();
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn overall_bounded_by_average((h, trials) in arb_problem()) {
        let f = overall_fidelity(&h, &trials, EvolutionMethod::Exact).unwrap();
        let fa = average_fidelity(&h, &trials, EvolutionMethod::Exact).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((0.0..=1.0).contains(&fa));
        prop_assert!(f <= fa.sqrt() + 1e-12);
    }

    #[test]
    fn empty_test_hamiltonian_is_perfect((h, trials) in arb_problem()) {
        let zero = h.subtract(&h).unwrap();
        prop_assert_eq!(overall_fidelity(&zero, &trials, EvolutionMethod::Exact).unwrap(), 1.0);
        prop_assert_eq!(average_fidelity(&zero, &trials, EvolutionMethod::Exact).unwrap(), 1.0);
        prop_assert_eq!(composite_fidelity(&zero, &trials, EvolutionMethod::Exact).unwrap(), 1.0);
    }
}
