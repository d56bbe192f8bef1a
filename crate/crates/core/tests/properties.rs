use ieh::cost::{c_pos, c_vrms_pair, rearrangement_bound};
use ieh::interventions::{cyclic_shift, intervene_pair, periodic_flip, shifted_sum};
use ieh::{Intervention, InterventionParams, VoltageSeries};
use nalgebra::DVector;
use proptest::prelude::*;

fn series_strategy(max_len: usize) -> impl Strategy<Value = VoltageSeries> {
    prop::collection::vec(-100.0f64..100.0, 1..=max_len)
        .prop_map(|x| VoltageSeries::new(x, 1.0).unwrap())
}

fn pair_strategy(max_len: usize) -> impl Strategy<Value = (VoltageSeries, VoltageSeries)> {
    (1..=max_len).prop_flat_map(|d| {
        let side = || {
            prop::collection::vec(-10.0f64..10.0, d)
                .prop_map(|x| VoltageSeries::new(x, 1.0).unwrap())
        };
        (side(), side())
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn interventions_keep_energy(v in series_strategy(64), tau in 1usize..80, offset in 0usize..160, phi in 0usize..200) {
        let e = v.energy();
        prop_assert!(close(periodic_flip(&v, tau, offset).unwrap().energy(), e, 1e-12));
        prop_assert!(close(cyclic_shift(&v, phi).energy(), e, 1e-12));
    }

    #[test]
    fn interventions_are_reversible(v in series_strategy(64), tau in 1usize..80, offset in 0usize..160, phi in 0usize..200) {
        let flipped = periodic_flip(&v, tau, offset).unwrap();
        prop_assert_eq!(periodic_flip(&flipped, tau, offset).unwrap(), v.clone());
        let d = v.len();
        let back = cyclic_shift(&cyclic_shift(&v, phi), d - phi % d);
        prop_assert_eq!(back, v);
    }

    #[test]
    fn matrix_form_matches_direct_form(v in series_strategy(32), tau in 1usize..40, offset in 0usize..80, phi in 0usize..64) {
        for op in [Intervention::Flip { tau, offset }, Intervention::Shift { phi }] {
            let m = op.matrix(v.len()).unwrap();
            let direct = op.apply(&v).unwrap();
            let product = m * DVector::from_column_slice(v.samples());
            prop_assert_eq!(product.as_slice(), direct.samples());
        }
    }

    #[test]
    fn flips_and_shifts_are_linear(
        (a, b) in pair_strategy(48), k in -3.0f64..3.0, tau in 1usize..40, offset in 0usize..80, phi in 0usize..64,
    ) {
        let lhs = |v: &VoltageSeries| cyclic_shift(&periodic_flip(v, tau, offset).unwrap(), phi);
        let mixed = a.add(&b.scale(k).unwrap()).unwrap();
        let expect = lhs(&a).add(&lhs(&b).scale(k).unwrap()).unwrap();
        for (x, y) in lhs(&mixed).samples().iter().zip(expect.samples()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn combined_energy_never_exceeds_bound((v1, v2) in pair_strategy(64), tau in 1usize..40, phi in 0usize..64, offset in 0usize..80) {
        let p = InterventionParams::new(tau, phi, offset).unwrap();
        let bound = rearrangement_bound(&v1, &v2).unwrap();
        let out = intervene_pair(&v1, &v2, &p).unwrap();
        prop_assert!(out.energy() <= bound * (1.0 + 1e-12));
        let pre = shifted_sum(&v1, &v2, phi).unwrap();
        prop_assert!(c_vrms_pair(&v1, &v2, &pre).unwrap() >= -1e-12 * bound);
    }

    #[test]
    fn bound_ignores_signs_and_order((v1, v2) in pair_strategy(64), tau in 1usize..40, offset in 0usize..80, phi in 0usize..64) {
        let base = rearrangement_bound(&v1, &v2).unwrap();
        let moved = rearrangement_bound(&periodic_flip(&v1, tau, offset).unwrap(), &cyclic_shift(&v2, phi)).unwrap();
        prop_assert!(close(base, moved, 1e-12));
        let swapped = rearrangement_bound(&v2, &v1).unwrap();
        prop_assert!(close(base, swapped, 1e-12));
    }

    #[test]
    fn c_pos_extremes(v in series_strategy(64)) {
        prop_assert!(c_pos(&v) >= 0.0);
        let up = VoltageSeries::new(v.samples().iter().map(|x| x.abs()).collect(), 1.0).unwrap();
        let down = up.scale(-1.0).unwrap();
        prop_assert_eq!(c_pos(&up), 0.0);
        prop_assert!(close(c_pos(&down), 4.0 * up.energy(), 1e-12));
    }
}
