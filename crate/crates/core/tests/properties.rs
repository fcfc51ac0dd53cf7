//! Property-based invariants: unitarity, convention independence,
//! reciprocity, phase insensitivity of counting statistics, thinning
//! algebra, and serialization round-trips.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use homsim::detector::{apply_joint, apply_single, EfficiencyModel};
use homsim::engine::output_distribution;
use homsim::splitter::{Convention, ScatteringMatrix};
use homsim::states::{make_coherent, make_fock, BipartiteInput, StateSpec};
use homsim::{cancellation_certificate, coincidence_sum, JointDistribution, Verdict};

fn named_convention() -> impl Strategy<Value = Convention> {
    prop_oneof![
        Just(Convention::ComplexSymmetric),
        Just(Convention::Asymmetric),
        Just(Convention::RealRotation),
    ]
}

proptest! {
    /// Every input Fock pair scatters into a normalized sector
    /// distribution: the splitter is lossless.
    #[test]
    fn sector_rows_stay_normalized(
        theta in 0.0..=PI,
        convention in named_convention(),
        n in 0usize..=8,
        m in 0usize..=8,
    ) {
        let s = ScatteringMatrix::from_convention(convention, theta).unwrap();
        let total = n + m;
        let sum: f64 = (0..=total)
            .map(|p| s.transition_amplitude(n, m, p, total - p).unwrap().norm_sqr())
            .sum();
        prop_assert!((sum - 1.0).abs() < 1e-10, "sum = {sum}");
    }

    /// The three parameterizations differ only by phases: every
    /// transition magnitude agrees.
    #[test]
    fn conventions_share_amplitude_magnitudes(
        theta in 0.0..=PI,
        n in 0usize..=8,
        m in 0usize..=8,
        p in 0usize..=16,
    ) {
        prop_assume!(p <= n + m);
        let q = n + m - p;
        let mags: Vec<f64> = Convention::ALL
            .iter()
            .map(|&c| {
                ScatteringMatrix::from_convention(c, theta)
                    .unwrap()
                    .transition_amplitude(n, m, p, q)
                    .unwrap()
                    .norm()
            })
            .collect();
        prop_assert!((mags[0] - mags[1]).abs() < 1e-12, "{mags:?}");
        prop_assert!((mags[0] - mags[2]).abs() < 1e-12, "{mags:?}");
    }

    /// A symmetric scattering matrix is blind to relabeling the two rails:
    /// swapping both inputs and outputs reproduces the same amplitude.
    #[test]
    fn complex_symmetric_amplitudes_are_reciprocal(
        theta in 0.0..=PI,
        n in 0usize..=8,
        m in 0usize..=8,
        p in 0usize..=16,
    ) {
        prop_assume!(p <= n + m);
        let q = n + m - p;
        let s = ScatteringMatrix::from_convention(Convention::ComplexSymmetric, theta).unwrap();
        let a = s.transition_amplitude(n, m, p, q).unwrap();
        let b = s.transition_amplitude(m, n, q, p).unwrap();
        prop_assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }

    /// No transition amplitude can exceed unit magnitude.
    #[test]
    fn amplitudes_stay_subunit(
        theta in 0.0..=PI,
        convention in named_convention(),
        n in 0usize..=10,
        m in 0usize..=10,
        p in 0usize..=20,
    ) {
        prop_assume!(p <= n + m);
        let s = ScatteringMatrix::from_convention(convention, theta).unwrap();
        let a = s.transition_amplitude(n, m, p, n + m - p).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-12, "|A| = {}", a.norm());
    }

    /// Counting statistics cannot see the global phase of a coherent
    /// amplitude when the partner port carries a number-diagonal state.
    #[test]
    fn coherent_phase_leaves_counts_unchanged(
        theta in 0.0..=PI,
        n in 0usize..=3,
        mag in 0.1..2.0f64,
        phi in 0.0..(2.0 * PI),
    ) {
        let s = ScatteringMatrix::from_convention(Convention::ComplexSymmetric, theta).unwrap();
        let eps = 1e-8;
        let base = output_distribution(
            &s,
            &BipartiteInput::product_pure(
                make_fock(n).unwrap(),
                make_coherent(Complex64::from_polar(mag, 0.0), eps).unwrap(),
            ),
        )
        .unwrap();
        let rotated = output_distribution(
            &s,
            &BipartiteInput::product_pure(
                make_fock(n).unwrap(),
                make_coherent(Complex64::from_polar(mag, phi), eps).unwrap(),
            ),
        )
        .unwrap();
        prop_assert_eq!(base.cutoff(), rotated.cutoff());
        for p in 0..=base.cutoff() {
            for q in 0..=base.cutoff() {
                prop_assert!(
                    (base.prob(p, q) - rotated.prob(p, q)).abs() < 1e-12,
                    "cell ({p}, {q}): {} vs {}",
                    base.prob(p, q),
                    rotated.prob(p, q)
                );
            }
        }
    }

    /// Probability books always close: grid mass plus truncation mass is 1.
    #[test]
    fn output_mass_is_conserved(
        theta in 0.0..=PI,
        convention in named_convention(),
        n in 0usize..=4,
        mag in 0.0..2.0f64,
    ) {
        let s = ScatteringMatrix::from_convention(convention, theta).unwrap();
        let dist = output_distribution(
            &s,
            &BipartiteInput::product_pure(
                make_fock(n).unwrap(),
                make_coherent(Complex64::new(mag, 0.0), 1e-10).unwrap(),
            ),
        )
        .unwrap();
        let residual = (dist.total_mass() + dist.truncation_mass() - 1.0).abs();
        prop_assert!(residual < 1e-10, "residual = {residual:.3e}");
    }

    /// Bernoulli thinning composes multiplicatively.
    #[test]
    fn thinning_composes(
        raw in proptest::collection::vec(0.0..1.0f64, 1..12),
        eta1 in 0.0..=1.0f64,
        eta2 in 0.0..=1.0f64,
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-3);
        let p: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let two_step = apply_single(&apply_single(&p, eta1).unwrap(), eta2).unwrap();
        let one_step = apply_single(&p, eta1 * eta2).unwrap();
        for (a, b) in two_step.iter().zip(&one_step) {
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    /// Thinning a joint grid and then marginalizing equals marginalizing
    /// and then thinning with that port's efficiency.
    #[test]
    fn joint_thinning_commutes_with_marginals(
        theta in 0.0..=PI,
        n in 0usize..=3,
        m in 0usize..=3,
        eta1 in 0.0..=1.0f64,
        eta2 in 0.0..=1.0f64,
    ) {
        let s = ScatteringMatrix::from_convention(Convention::ComplexSymmetric, theta).unwrap();
        let dist = output_distribution(
            &s,
            &BipartiteInput::product_pure(make_fock(n).unwrap(), make_fock(m).unwrap()),
        )
        .unwrap();
        let model = EfficiencyModel::new(eta1, eta2).unwrap();
        let thinned = apply_joint(&dist, &model).unwrap();

        let side = dist.cutoff() + 1;
        let marginal_a: Vec<f64> =
            (0..side).map(|ma| (0..side).map(|mb| dist.prob(ma, mb)).sum()).collect();
        let expected_a = apply_single(&marginal_a, eta1).unwrap();
        for ma in 0..side {
            let got: f64 = (0..side).map(|mb| thinned.prob(ma, mb)).sum();
            prop_assert!((got - expected_a[ma]).abs() < 1e-12);
        }
    }

    /// The exact integer sum is symmetric and vanishes exactly on
    /// odd-odd pairs.
    #[test]
    fn coincidence_sums_swap_and_vanish(n in 0usize..=25, m in 0usize..=25) {
        prop_assume!((n + m) % 2 == 0);
        let s1 = coincidence_sum(n, m).unwrap();
        let s2 = coincidence_sum(m, n).unwrap();
        prop_assert_eq!(&s1, &s2);
        if n % 2 == 1 {
            prop_assert_eq!(s1.to_string(), "0");
        } else {
            prop_assert_ne!(s1.to_string(), "0");
        }
    }

    /// Certificates at the balanced point reach the verdict the integer
    /// sum dictates, and their recorded total matches the sum's vanishing.
    #[test]
    fn certificates_follow_the_integer_sum(n in 0usize..=9, m in 0usize..=9) {
        prop_assume!((n + m) % 2 == 0);
        let frac = std::f64::consts::FRAC_1_SQRT_2;
        let cert = cancellation_certificate(n, m, frac, frac).unwrap();
        if n % 2 == 1 {
            prop_assert_eq!(cert.verdict, Verdict::CompleteDestructive);
        } else {
            prop_assert_eq!(cert.verdict, Verdict::ConstructiveNonzero);
        }
    }

    /// The state-spec grammar round-trips through its display form.
    #[test]
    fn state_specs_round_trip(
        n in 0usize..=9,
        re in -3.0..3.0f64,
        im in -3.0..3.0f64,
        nbar in 0.0..10.0f64,
    ) {
        let specs = [
            StateSpec::Fock(n),
            StateSpec::Coherent(Complex64::new(re, im)),
            StateSpec::Thermal(nbar),
            StateSpec::PureGridFile("grids/state.json".into()),
        ];
        for spec in specs {
            let text = spec.to_string();
            let parsed: StateSpec = text.parse().unwrap();
            prop_assert_eq!(parsed, spec, "{}", text);
        }
    }

    /// Distribution JSON round-trips with bit-identical floats.
    #[test]
    fn distribution_json_round_trips(
        theta in 0.0..=PI,
        convention in named_convention(),
        n in 0usize..=4,
        m in 0usize..=4,
    ) {
        let s = ScatteringMatrix::from_convention(convention, theta).unwrap();
        let dist = output_distribution(
            &s,
            &BipartiteInput::product_pure(make_fock(n).unwrap(), make_fock(m).unwrap()),
        )
        .unwrap();
        let back = JointDistribution::from_json_str(&dist.to_json_string()).unwrap();
        prop_assert_eq!(back.cutoff(), dist.cutoff());
        prop_assert_eq!(back.convention(), dist.convention());
        for p in 0..=dist.cutoff() {
            for q in 0..=dist.cutoff() {
                prop_assert_eq!(back.prob(p, q).to_bits(), dist.prob(p, q).to_bits());
            }
        }
    }
}
