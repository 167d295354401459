//! Property suites for the invariants the modules promise.

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use specfree::dsp::{align_ambiguities, align_ambiguities_2d, dft2, dft_vec, idft_vec, spectrum_l1_error, AmbiguityTransform, Spectrum1D, Spectrum2D, WindowKind};
use specfree::gatecost::{trotter_cost, CostQuery, GhzDepth, Hardware, Model};
use specfree::shotnoise::{SampleKey, ShotConfig};
use specfree::simcore::{build_fermi_hubbard, build_number_operator, secondary_bitstrings, signal_2d, FermiHubbardParams, Lattice, QuantumState};
use specfree::vpr::{smallest_two, QuadraticForm, SecondaryMagnitudes, VprDataset};
use specfree::C64;

mod common;
use common::{quadratic_oracle, table_oracle};

fn complex_vec(len: impl Into<proptest::sample::SizeRange>) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), len)
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

proptest! {
    #[test]
    fn dft_round_trip_and_parseval(x in complex_vec(1..80)) {
        let spec = dft_vec(&x);
        let back = idft_vec(&spec);
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        let n = x.len() as f64;
        prop_assert!((norm2(&spec) - n * norm2(&x)).abs() < 1e-10 * (1.0 + n * norm2(&x)));
    }

    #[test]
    fn l1_is_a_pseudometric(a in complex_vec(16), b in complex_vec(16), c in complex_vec(16), phases in prop::collection::vec(0.0f64..2.0 * PI, 16)) {
        let s = |v: &Vec<C64>| Spectrum1D::new(v.clone(), 1.0);
        let d = |x: &Vec<C64>, y: &Vec<C64>| spectrum_l1_error(&s(x), &s(y)).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        let rotated: Vec<C64> = a.iter().zip(&phases).map(|(z, &p)| z * C64::from_polar(1.0, p)).collect();
        prop_assert!(d(&a, &rotated) < 1e-12);
    }

    #[test]
    fn alignment_recovers_constructed_transforms(
        x in complex_vec(5..40),
        shift in 0usize..40,
        conj_reflect in any::<bool>(),
        phase in -PI..PI,
    ) {
        let n = x.len();
        let t = AmbiguityTransform { shift: (shift % n, 0), conj_reflect, global_phase: phase };
        let reference = Spectrum1D::new(x.clone(), 1.0);
        let candidate = Spectrum1D::new(t.apply_1d(&x), 1.0);
        let (_, aligned) = align_ambiguities(&candidate, &reference).unwrap();
        let err = aligned.values.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9, "max deviation {err}");
    }

    #[test]
    fn alignment_2d_recovers_constructed_transforms(
        x in complex_vec(35),
        shift in (0usize..7, 0usize..5),
        conj_reflect in any::<bool>(),
        phase in -PI..PI,
    ) {
        let arr = ndarray::Array2::from_shape_vec((7, 5), x).unwrap();
        let t = AmbiguityTransform { shift, conj_reflect, global_phase: phase };
        let reference = Spectrum2D { values: arr.clone(), period_t: 1.0, period_z: 1.0 };
        let candidate = Spectrum2D { values: t.apply(&arr), period_t: 1.0, period_z: 1.0 };
        let (_, aligned) = align_ambiguities_2d(&candidate, &reference).unwrap();
        let err = aligned.values.iter().zip(arr.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9, "max deviation {err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn ideal_2d_spectrum_is_real_and_nonnegative(
        amps in complex_vec(16),
        tau in 0.2f64..2.0,
        u in 0.0f64..6.0,
        dt in 0.05f64..0.6,
        n in (2usize..9).prop_map(|h| 2 * h + 1),
        m in (1usize..5).prop_map(|h| 2 * h + 1),
    ) {
        let lattice = Lattice::new(1, 2, true).unwrap();
        let h = build_fermi_hubbard(&lattice, &FermiHubbardParams { tau, u }).unwrap();
        let hd = build_number_operator(&lattice).unwrap();
        let Ok(psi) = QuantumState::from_amplitudes(amps) else { return Ok(()) };
        let Ok(sig) = signal_2d(&h, &hd, &psi, dt, n, m, WindowKind::Triangular) else { return Ok(()) };
        let spec = dft2(&sig);
        prop_assert!(spec.max_imag() < 1e-9, "imaginary part {}", spec.max_imag());
        prop_assert!(spec.min_real() > -1e-9, "negative part {}", spec.min_real());
    }

    #[test]
    fn quadratic_form_matches_its_definition(
        n in 4usize..14,
        r_count in 1usize..3,
        s_frac in 0.0f64..1.0,
        weight in 0.1f64..3.0,
        seed_data in prop::collection::vec(0.05f64..1.0, 4 * 3 * 14),
        y in complex_vec(3 * 14),
    ) {
        let s = ((n as f64) * s_frac) as usize;
        let take = |o: usize| seed_data[o * n..(o + 1) * n].to_vec();
        let abs_f1 = take(0);
        let secondary: Vec<SecondaryMagnitudes> = (0..r_count)
            .map(|r| SecondaryMagnitudes { abs_f2: take(3 * r + 1), abs_f3: take(3 * r + 2), abs_f4: take(3 * r + 3) })
            .collect();
        let ds = VprDataset { abs_f1, secondary, dt: 0.1 };
        let y = &y[..(r_count + 1) * n];
        let q = QuadraticForm::assemble(&ds, s, weight).unwrap();

        let oracle = quadratic_oracle(&ds, s, weight, y, q.pinned());
        let scale = 1.0 + oracle;
        prop_assert!((q.cost(y).unwrap() - oracle).abs() < 1e-10 * scale);
        let g = q.gram();
        let gy = specfree::linalg::matvec(&g, y);
        let quad = specfree::linalg::inner(y, &gy).re;
        prop_assert!((quad - oracle).abs() < 1e-10 * scale);
    }

    #[test]
    fn gram_is_psd_and_lambda_min_decreases_in_s(
        n in 6usize..14,
        mags in prop::collection::vec(0.05f64..1.0, 4 * 14),
    ) {
        let take = |o: usize| mags[o * n..(o + 1) * n].to_vec();
        let ds = VprDataset {
            abs_f1: take(0),
            secondary: vec![SecondaryMagnitudes { abs_f2: take(1), abs_f3: take(2), abs_f4: take(3) }],
            dt: 0.1,
        };
        let mut prev = f64::INFINITY;
        for s in 0..n {
            let (lmin, _) = smallest_two(&QuadraticForm::assemble(&ds, s, 1.0).unwrap().gram()).unwrap();
            prop_assert!(lmin > -1e-9, "lambda_min {lmin} at s={s}");
            prop_assert!(lmin <= prev + 1e-9, "lambda_min rose from {prev} to {lmin} at s={s}");
            prev = lmin;
        }
    }

    #[test]
    fn secondaries_keep_weight_and_distance(
        bits in prop::collection::vec(any::<bool>(), 4..14),
        flips in 1usize..3,
        r_count in 1usize..6,
        seed in any::<u64>(),
    ) {
        let target = specfree::simcore::BitString::new(bits);
        match secondary_bitstrings(&target, r_count, flips, seed) {
            Ok(list) => {
                prop_assert_eq!(list.len(), r_count);
                for b in &list {
                    prop_assert_eq!(b.weight(), target.weight());
                    let dist = b.bits().iter().zip(target.bits()).filter(|(x, y)| x != y).count();
                    prop_assert_eq!(dist, 2 * flips);
                }
                let mut uniq = list.clone();
                uniq.sort_by_key(|b| b.index());
                uniq.dedup();
                prop_assert_eq!(uniq.len(), list.len());
            }
            Err(specfree::Error::NotEnoughStates { requested, possible }) => prop_assert!(possible < requested),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

proptest! {
    // fixed seed: a 4-sigma bound still fails once in ~16000 cases
    #![proptest_config(ProptestConfig { cases: 48, rng_seed: RngSeed::Fixed(20), ..ProptestConfig::default() })]

    #[test]
    fn binomial_estimator_is_unbiased(p in 0.0f64..=1.0, shots in 1u64..2000, seed in any::<u64>()) {
        let cfg = ShotConfig::new(shots, seed).unwrap();
        let draws = 400u64;
        let mean = (0..draws).map(|i| cfg.estimate_abs2(p, SampleKey::new(7, i)).unwrap()).sum::<f64>() / draws as f64;
        let se = (p * (1.0 - p) / (shots * draws) as f64).sqrt();
        prop_assert!((mean - p).abs() <= 4.0 * se + 1e-12, "mean {mean} for p {p}, se {se}");
    }
}

#[test]
fn gate_costs_match_the_table_on_the_grid() {
    let rows = [(Model::Tfim1d, Hardware::AllToAll), (Model::Tfim1d, Hardware::Line1d), (Model::Fh2dSpinless, Hardware::Grid2d)];
    for (model, hw) in rows {
        for n in [2u64, 10, 100] {
            for k in [1u64, 10, 25] {
                let q = CostQuery { model, hardware: hw, n, k, use_pr: true, ghz_depth: GhzDepth::Table };
                let pr = trotter_cost(&q).unwrap();
                let ctl = trotter_cost(&q.with_pr(false)).unwrap();
                let (want_pr, want_ctl) = table_oracle(model, hw, n, k);
                assert_eq!((pr.cnots, pr.depth), want_pr, "{model:?} {hw:?} n={n} k={k} PR");
                assert_eq!((ctl.cnots, ctl.depth), want_ctl, "{model:?} {hw:?} n={n} k={k} controlled");
            }
        }
    }
}
