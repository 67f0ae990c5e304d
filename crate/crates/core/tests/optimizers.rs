use qcap_core::channels::{constant_ground, identity, make_channel, zoo, ChannelKind};
use qcap_core::optimize::{
    ce_gradient, check_additivity, compute_ce, compute_holevo, Argmax, CeOptions, HolevoOptions,
};
use qcap_core::sampling::{
    random_channel, random_density, random_hermitian, random_unitary, SeededRng, STREAM_CHANNELS,
};
use qcap_core::{channel_mutual_information, holevo_chi, ComplexMatrix, DensityMatrix};

/// Binary entropy in bits, written out independently of the library.
fn h2(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// For diag(q, 1−q) through amplitude damping the input, output and
/// environment spectra are {q}, {(1−γ)(1−q)} and {γ(1−q)} respectively.
fn amplitude_damping_grid_oracle(gamma: f64) -> f64 {
    (0..=1000)
        .map(|i| {
            let q = i as f64 / 1000.0;
            h2(q) + h2((1.0 - gamma) * (1.0 - q)) - h2(gamma * (1.0 - q))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn amplitude_damping_matches_grid_oracle() {
    for gamma in [0.25, 0.5, 0.75] {
        let ch = make_channel(&ChannelKind::AmplitudeDamping { gamma }, 2).unwrap();
        let report = compute_ce(&ch, &CeOptions::default()).unwrap();
        let oracle = amplitude_damping_grid_oracle(gamma);
        assert!(
            (report.value - oracle).abs() < 1e-3,
            "gamma {gamma}: optimizer {} oracle {oracle}",
            report.value
        );
        assert!(report.converged);
    }
}

#[test]
fn grid_oracle_agrees_with_library_objective_on_diagonal_inputs() {
    let ch = make_channel(&ChannelKind::AmplitudeDamping { gamma: 0.5 }, 2).unwrap();
    for q in [0.1, 0.4, 0.77] {
        let rho = DensityMatrix::from_matrix(ComplexMatrix::from_diagonal(&[q, 1.0 - q])).unwrap();
        let lib = channel_mutual_information(&ch, &rho).unwrap();
        let closed = h2(q) + h2(0.5 * (1.0 - q)) - h2(0.5 * (1.0 - q));
        assert!((lib - closed).abs() < 1e-10);
    }
}

/// Central difference of the purification-route objective along `dir`.
fn directional_fd(ch: &qcap_core::QuantumChannel, rho: &DensityMatrix, dir: &ComplexMatrix, step: f64) -> f64 {
    let plus = DensityMatrix::from_matrix(rho.matrix() + &dir.scale_real(step)).unwrap();
    let minus = DensityMatrix::from_matrix(rho.matrix() - &dir.scale_real(step)).unwrap();
    (channel_mutual_information(ch, &plus).unwrap() - channel_mutual_information(ch, &minus).unwrap()) / (2.0 * step)
}

fn traceless_direction(rng: &mut SeededRng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    let shift = h.trace().re / dim as f64;
    let d = &h - &ComplexMatrix::identity(dim).scale_real(shift);
    let n = d.frobenius_norm();
    d.scale_real(1.0 / n)
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = SeededRng::new(2024, STREAM_CHANNELS);
    for case in 0..20 {
        let dim = 2 + case % 2;
        let ch = random_channel(&mut rng, dim, 2 + case % 3, 2 + case % 2).unwrap();
        // Mix toward I/d so ρ ± h·D stays positive.
        let raw = random_density(&mut rng, dim);
        let rho = DensityMatrix::mixture(&[0.7, 0.3], &[raw, DensityMatrix::maximally_mixed(dim)]).unwrap();
        let dir = traceless_direction(&mut rng, dim);
        let g = ce_gradient(&ch, &rho).unwrap();
        let analytic = g.inner(&dir).re;
        let fd = directional_fd(&ch, &rho, &dir, 1e-5);
        let rel = (analytic - fd).abs() / fd.abs().max(1e-8);
        assert!(rel < 1e-4, "case {case}: analytic {analytic} fd {fd} rel {rel}");
    }
}

#[test]
fn ce_is_invariant_under_input_unitaries() {
    let mut rng = SeededRng::new(3, STREAM_CHANNELS);
    for ch in zoo() {
        let u = random_unitary(&mut rng, 2);
        let rotated = ch.precompose_unitary(&u).unwrap();
        let a = compute_ce(&ch, &CeOptions::default()).unwrap().value;
        let b = compute_ce(&rotated, &CeOptions::default()).unwrap().value;
        assert!((a - b).abs() < 1e-3, "{}: {a} vs {b}", ch.name());
    }
}

#[test]
fn entanglement_assistance_never_hurts() {
    for ch in zoo() {
        let ce = compute_ce(&ch, &CeOptions::default()).unwrap();
        let chi = compute_holevo(&ch, &HolevoOptions::default()).unwrap();
        assert!(
            ce.value >= chi.value - 1e-3,
            "{}: C_E {} < chi {}",
            ch.name(),
            ce.value,
            chi.value
        );
    }
}

#[test]
fn reports_are_self_consistent_and_monotone() {
    for ch in zoo() {
        let ce = compute_ce(&ch, &CeOptions::default()).unwrap();
        assert!(ce.max_trace_decrease() <= 1e-9, "{}", ch.name());
        let Argmax::State(rho) = &ce.argmax else {
            panic!("state argmax")
        };
        rho.validate().unwrap();
        assert!((channel_mutual_information(&ch, rho).unwrap() - ce.value).abs() < 1e-7);

        let chi = compute_holevo(&ch, &HolevoOptions::default()).unwrap();
        assert!(chi.max_trace_decrease() <= 1e-9, "{}", ch.name());
        let Argmax::Ensemble(ens) = &chi.argmax else {
            panic!("ensemble argmax")
        };
        assert!((holevo_chi(ens, &ch).unwrap() - chi.value).abs() < 1e-7);
    }
}

#[test]
fn optimizers_are_deterministic() {
    let ch = make_channel(&ChannelKind::AmplitudeDamping { gamma: 0.3 }, 2).unwrap();
    let opts = CeOptions {
        seed: 17,
        ..CeOptions::default()
    };
    assert_eq!(compute_ce(&ch, &opts).unwrap(), compute_ce(&ch, &opts).unwrap());
    let hopts = HolevoOptions {
        seed: 17,
        ..HolevoOptions::default()
    };
    assert_eq!(
        compute_holevo(&ch, &hopts).unwrap(),
        compute_holevo(&ch, &hopts).unwrap()
    );
}

#[test]
fn two_use_holevo_is_at_least_twice_single_use() {
    // Product ensembles are feasible for two uses, so the two-use witness
    // should not fall below twice the one-use value.
    let ch = make_channel(&ChannelKind::AmplitudeDamping { gamma: 0.5 }, 2).unwrap();
    let opts = HolevoOptions::default();
    let one = compute_holevo(&ch, &opts).unwrap().value;
    let two = compute_holevo(&ch.tensor(&ch), &opts).unwrap().value;
    assert!(two >= 2.0 * one - 1e-3, "two-use {two} vs 2 x {one}");
}

#[test]
fn additivity_on_fixed_and_random_channels() {
    let opts = CeOptions::default();
    let mut channels = vec![
        identity(2),
        constant_ground(2),
        make_channel(&ChannelKind::Dephasing { p: 0.5 }, 2).unwrap(),
        make_channel(&ChannelKind::AmplitudeDamping { gamma: 0.5 }, 2).unwrap(),
    ];
    let mut rng = SeededRng::new(99, STREAM_CHANNELS);
    for _ in 0..4 {
        channels.push(random_channel(&mut rng, 2, 2, 2).unwrap());
    }
    for ch in channels {
        let r = check_additivity(&ch, &opts).unwrap();
        assert!(r.gap <= 1e-2, "{}: gap {}", ch.name(), r.gap);
    }
    let r = check_additivity(&constant_ground(2), &opts).unwrap();
    assert!(r.gap <= 1e-6);
}
