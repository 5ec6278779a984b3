use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use stargraph::measure::*;

/// Atoms on a quarter grid and nonnegative affine densities on unit cells.
fn measure() -> impl Strategy<Value = ScalarMeasure> {
    let atoms = proptest::collection::btree_map(-24i32..24, 1u32..16, 0..5);
    let cells = proptest::collection::btree_map(-4i32..4, (0u32..8, 0u32..8), 0..3);
    (atoms, cells).prop_map(|(atoms, cells)| {
        let atoms = atoms.into_iter().map(|(x, w)| (x as f64 / 4.0, w as f64 / 8.0)).collect();
        // Density c0 + c1 (x − lo) on [lo, lo + 1].
        let pieces = cells
            .into_iter()
            .filter(|&(_, (c0, c1))| c0 + c1 > 0)
            .map(|(lo, (c0, c1))| {
                let (c0, c1, lo) = (c0 as f64 / 4.0, c1 as f64 / 4.0, lo as f64);
                (lo, lo + 1.0, vec![c0 - c1 * lo, c1])
            })
            .collect();
        ScalarMeasure::new(atoms, pieces).unwrap()
    })
}

fn window() -> impl Strategy<Value = IntervalSet> {
    (-40i32..40, 0i32..40, any::<bool>(), any::<bool>()).prop_map(|(lo, len, lc, hc)| {
        let (lo, hi) = (lo as f64 / 8.0, (lo + len) as f64 / 8.0);
        IntervalSet::new(vec![Interval { lo, hi, lo_closed: lc, hi_closed: hc }])
    })
}

fn probe_points(ms: &[&ScalarMeasure]) -> Vec<f64> {
    let mut xs: Vec<f64> = ms.iter().flat_map(|m| m.atoms().iter().map(|a| a.position)).collect();
    xs.extend((-20..20).map(|k| k as f64 / 4.0 + 0.125));
    xs.extend((-4..=4).map(|k| k as f64));
    xs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mass_is_additive(nu in measure(), sigma in measure(), set in window()) {
        prop_assert_eq!(nu.add(&sigma).mass(&set), nu.mass(&set) + sigma.mass(&set));
    }

    #[test]
    fn decomposition_is_consistent(nu in measure(), sigma in measure(),
                                   sets in proptest::collection::vec(window(), 4)) {
        let (ac, s) = lebesgue_decompose(&nu, &sigma);
        for set in &sets {
            prop_assert_eq!(ac.mass(set) + s.mass(set), nu.mass(set));
        }
        prop_assert!(mutually_singular(&s, &sigma));
        prop_assert_eq!(ac.add(&s).total_mass(), nu.total_mass());
    }

    #[test]
    fn derivative_reciprocity(nu in measure(), sigma in measure()) {
        for x in probe_points(&[&nu, &sigma]) {
            if let (DerivativeValue::Finite(p), DerivativeValue::Finite(q)) =
                (symmetric_derivative(&nu, &sigma, x), symmetric_derivative(&sigma, &nu, x))
            {
                if !p.is_zero() && !q.is_zero() {
                    prop_assert_eq!(p * q, BigRational::one(), "x = {}", x);
                }
            }
        }
    }

    #[test]
    fn derivative_is_finite_on_sigma_atoms(nu in measure(), sigma in measure()) {
        for a in sigma.atoms() {
            prop_assert!(matches!(symmetric_derivative(&nu, &sigma, a.position), DerivativeValue::Finite(_)));
        }
    }

    #[test]
    fn relative_densities_sum_to_one(ms in proptest::collection::vec(measure(), 1..5)) {
        let total = ScalarMeasure::sum(&ms);
        for a in total.atoms() {
            let mut acc = BigRational::zero();
            for m in &ms {
                match symmetric_derivative(m, &total, a.position) {
                    DerivativeValue::Finite(q) => acc += q,
                    other => prop_assert!(false, "{:?} at {}", other, a.position),
                }
            }
            prop_assert_eq!(acc, BigRational::one());
        }
    }

    #[test]
    fn json_round_trip(m in measure()) {
        let back: ScalarMeasure = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}
