//! Property tests across the correlation-side modules.

use proptest::prelude::*;

use qlim_core::boxes::{
    deterministic_box, slice_behavior, to_probabilities, Behavior222, ProbTable222, SliceKind,
    SliceSpec,
};
use qlim_core::qbounds::lo2_clique_sum;
use qlim_core::tsirelson::{
    eigen_oracle, lhvm_max, nosig_max, tsirelson_bound, BoundOptions, CharPolynomial,
    MeasurementAngles, TsirelsonFunctional,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixture of the 16 deterministic vertices and the 8 PR-type vertices:
/// always a valid no-signalling behavior.
fn vertex_mixture(weights: &[f64; 24]) -> Behavior222 {
    let total: f64 = weights.iter().sum();
    let mut acc = Behavior222::zero();
    let mut add = |b: Behavior222, w: f64| {
        let r = b.as_row();
        let a = acc.as_row();
        acc = Behavior222::new(
            a[0] + w * r[0],
            a[1] + w * r[1],
            a[2] + w * r[2],
            a[3] + w * r[3],
            a[4] + w * r[4],
            a[5] + w * r[5],
            a[6] + w * r[6],
            a[7] + w * r[7],
        );
    };
    let mut idx = 0;
    for a0 in 0..2u8 {
        for a1 in 0..2u8 {
            for b0 in 0..2u8 {
                for b1 in 0..2u8 {
                    add(
                        deterministic_box(a0, a1, b0, b1).to_behavior(),
                        weights[idx] / total,
                    );
                    idx += 1;
                }
            }
        }
    }
    for alpha in 0..2u8 {
        for beta in 0..2u8 {
            for g in 0..2u8 {
                let sign = |x: u8, y: u8| -> f64 {
                    if (x & y) ^ (alpha & x) ^ (beta & y) ^ g == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                };
                let pr = Behavior222::new(
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    sign(0, 0),
                    sign(1, 0),
                    sign(0, 1),
                    sign(1, 1),
                );
                add(pr, weights[idx] / total);
                idx += 1;
            }
        }
    }
    acc
}

fn weight_strategy() -> impl Strategy<Value = [f64; 24]> {
    prop::array::uniform24(0.001f64..1.0)
}

proptest! {
    #[test]
    fn round_trip_is_identity(w in weight_strategy()) {
        let b = vertex_mixture(&w);
        let table = to_probabilities(&b).unwrap();
        table.validate().unwrap();
        let back = table.to_behavior();
        for (x, y) in b.as_row().iter().zip(back.as_row().iter()) {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_mixtures_respect_chsh(w in prop::array::uniform16(0.001f64..1.0)) {
        let total: f64 = w.iter().sum();
        let mut value = 0.0;
        let mut idx = 0;
        for a0 in 0..2u8 {
            for a1 in 0..2u8 {
                for b0 in 0..2u8 {
                    for b1 in 0..2u8 {
                        value += w[idx] / total
                            * deterministic_box(a0, a1, b0, b1).to_behavior().chsh_value();
                        idx += 1;
                    }
                }
            }
        }
        prop_assert!(value <= 2.0 + 1e-12);
    }

    #[test]
    fn slices_stay_no_signalling(
        kind in prop::bool::ANY,
        param in 0.0f64..1.0,
        frac in 0.0f64..1.0,
    ) {
        let kind = if kind { SliceKind::GammaSlice } else { SliceKind::BetaSlice };
        let xi = frac * (1.0 - param);
        let spec = SliceSpec { kind, param, xi };
        let b = slice_behavior(&spec).unwrap();
        to_probabilities(&b).unwrap().validate().unwrap();
    }

    #[test]
    fn upper_bound_predicate_is_monotone(
        seed in 0u64..1_000_000,
        dim in 2usize..6,
        z1 in -6.0f64..6.0,
        dz in 0.0f64..6.0,
    ) {
        // Polynomials from random real symmetric matrices keep all roots
        // real, the regime where the predicate is a threshold in z.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for r in 0..dim {
            for c in r..dim {
                let v = rng.random_range(-1.5..1.5);
                m[(r, c)] = Complex64::new(v, 0.0);
                m[(c, r)] = Complex64::new(v, 0.0);
            }
        }
        let p = CharPolynomial::of(&m);
        if p.is_upper_bound(z1) {
            prop_assert!(p.is_upper_bound(z1 + dz));
        }
    }

    #[test]
    fn clique_sum_is_bilinear(
        w1 in weight_strategy(),
        w2 in weight_strategy(),
        w3 in weight_strategy(),
        t in 0.0f64..1.0,
    ) {
        let table = |w: &[f64; 24]| -> ProbTable222 {
            to_probabilities(&vertex_mixture(w)).unwrap()
        };
        let (pa, pb, pc) = (table(&w1), table(&w2), table(&w3));
        // Mix pb and pc in the second argument.
        let mixed = ProbTable222::from_fn(|a, b, x, y| {
            (1.0 - t) * pb.get(a, b, x, y) + t * pc.get(a, b, x, y)
        });
        let lhs = lo2_clique_sum(&pa, &mixed);
        let rhs = (1.0 - t) * lo2_clique_sum(&pa, &pb) + t * lo2_clique_sum(&pa, &pc);
        prop_assert!((lhs - rhs).abs() < 1e-12);
        // And in the first argument.
        let lhs = lo2_clique_sum(&mixed, &pa);
        let rhs = (1.0 - t) * lo2_clique_sum(&pb, &pa) + t * lo2_clique_sum(&pc, &pa);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn round_trip_bulk_seeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0c5);
    for _ in 0..10_000 {
        let mut w = [0.0f64; 24];
        for v in w.iter_mut() {
            *v = rng.random_range(1e-3..1.0);
        }
        let b = vertex_mixture(&w);
        let back = to_probabilities(&b).unwrap().to_behavior();
        for (x, y) in b.as_row().iter().zip(back.as_row().iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}

#[test]
fn constructed_operators_are_traceless() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x77aa);
    for _ in 0..40 {
        let f = TsirelsonFunctional::bipartite(
            [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            [
                [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            ],
        );
        let angles = MeasurementAngles::new(vec![
            rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
            rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
        ])
        .unwrap();
        let p = qlim_core::tsirelson::char_poly(&f, &angles).unwrap();
        let deg = p.degree();
        assert!(p.coeffs()[deg].abs() == 1.0);
        assert!(p.coeffs()[deg - 1].abs() < 1e-10, "trace coefficient");
    }
}

#[test]
fn bounds_sit_between_classical_and_no_signalling() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151);
    let opts = BoundOptions {
        tol: 1e-6,
        grid: 33,
        max_iter: 200,
    };
    for _ in 0..12 {
        let f = TsirelsonFunctional::bipartite(
            [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            [
                [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            ],
        );
        let bound = tsirelson_bound(&f, &opts).unwrap();
        let oracle = eigen_oracle(&f, &opts).unwrap();
        let classical = lhvm_max(&f).unwrap();
        let nosig = nosig_max(&f).unwrap();
        assert!(
            bound >= classical - 1e-5,
            "bound {bound} vs classical {classical}"
        );
        assert!(bound <= nosig + 1e-5, "bound {bound} vs nosig {nosig}");
        assert!(
            (bound - oracle).abs() < 1e-4,
            "bound {bound} vs oracle {oracle}"
        );
    }
}
