use proptest::prelude::*;

use qcap_core::channel_mutual_information;
use qcap_core::channels::{zoo, QuantumChannel};
use qcap_core::matrix::{eigh, ComplexMatrix};
use qcap_core::measures::{conditional_mutual_information, holevo_chi, mutual_information};
use qcap_core::sampling::{
    random_channel, random_density, random_ensemble, random_hermitian, random_pure_state, SeededRng,
};
use qcap_core::state::{partial_trace, purify, von_neumann_entropy, DensityMatrix};

fn rng(seed: u64) -> SeededRng {
    SeededRng::new(seed, 0)
}

fn mix(a: &DensityMatrix, b: &DensityMatrix, lambda: f64) -> DensityMatrix {
    DensityMatrix::mixture(&[lambda, 1.0 - lambda], &[a.clone(), b.clone()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn entropy_is_bounded_by_log_dimension(seed in any::<u64>(), dim in 1usize..=8) {
        let rho = random_density(&mut rng(seed), dim);
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!(s >= -1e-9);
        prop_assert!(s <= (dim as f64).log2() + 1e-9);
    }

    #[test]
    fn eigh_reconstructs_and_is_unitary(seed in any::<u64>(), dim in 1usize..=16) {
        let h = random_hermitian(&mut rng(seed), dim);
        let e = eigh(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) <= 1e-9);
        let vv = &e.vectors.adjoint() * &e.vectors;
        prop_assert!(vv.max_abs_diff(&ComplexMatrix::identity(dim)) <= 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), lambda in 0.0f64..1.0) {
        let mut r = rng(seed);
        let a = random_density(&mut r, 6).with_dims(vec![2, 3]).unwrap();
        let b = random_density(&mut r, 6).with_dims(vec![2, 3]).unwrap();
        for keep in [[0usize], [1usize]] {
            let ta = partial_trace(&a, &keep).unwrap();
            prop_assert!((ta.matrix().trace().re - 1.0).abs() <= 1e-9);
            let tb = partial_trace(&b, &keep).unwrap();
            let lhs = partial_trace(&mix(&a, &b, lambda), &keep).unwrap();
            let rhs = mix(&ta, &tb, lambda);
            prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn purification_round_trips(seed in any::<u64>(), dim in 1usize..=6) {
        let rho = random_density(&mut rng(seed), dim);
        let psi = purify(&rho).unwrap();
        prop_assert!(von_neumann_entropy(&psi).unwrap() <= 1e-7);
        let back = partial_trace(&psi, &[1]).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-8);
    }

    #[test]
    fn zoo_channels_preserve_states(seed in any::<u64>()) {
        let rho = random_density(&mut rng(seed), 2);
        for ch in zoo() {
            let out = ch.apply(&rho).unwrap();
            prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-9);
            prop_assert!(out.min_eigenvalue() >= -1e-9);
        }
    }

    #[test]
    fn extended_action_on_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, 2, 3, 2).unwrap();
        let rho_r = random_density(&mut r, 3);
        let rho_q = random_density(&mut r, 2);
        let out = ch.apply_extended(&rho_r.tensor(&rho_q), 1).unwrap();
        let expected = rho_r.tensor(&ch.apply(&rho_q).unwrap());
        prop_assert!(out.matrix().max_abs_diff(expected.matrix()) <= 1e-12);
        let marginal = partial_trace(&out, &[1]).unwrap();
        prop_assert!(marginal.matrix().max_abs_diff(ch.apply(&rho_q).unwrap().matrix()) <= 1e-12);
    }

    #[test]
    fn double_complement_matches_output_entropy(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, 2, 2, 3).unwrap();
        let cc = ch.complementary().complementary();
        let psi = random_pure_state(&mut r, 2);
        let a = von_neumann_entropy(&ch.apply(&psi).unwrap()).unwrap();
        let b = von_neumann_entropy(&cc.apply(&psi).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-7);
    }

    #[test]
    fn data_processing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, 6).with_dims(vec![2, 3]).unwrap();
        let ch = random_channel(&mut r, 3, 2, 2).unwrap();
        let before = mutual_information(&rho).unwrap();
        let after = mutual_information(&ch.apply_extended(&rho, 1).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-7);
    }

    #[test]
    fn holevo_equals_mutual_information_of_cq_state(seed in any::<u64>(), size in 1usize..=5) {
        let mut r = rng(seed);
        let ens = random_ensemble(&mut r, size, 2);
        let ch = random_channel(&mut r, 2, 3, 2).unwrap();
        // Σ pᵢ |i⟩⟨i| ⊗ Λ(ρᵢ), assembled block by block.
        let dout = ch.dim_out();
        let mut cq = ComplexMatrix::zeros(size * dout, size * dout);
        for (i, (p, s)) in ens.probs().iter().zip(ens.states()).enumerate() {
            let out = ch.apply(s).unwrap();
            for a in 0..dout {
                for b in 0..dout {
                    cq[(i * dout + a, i * dout + b)] = out.matrix()[(a, b)] * *p;
                }
            }
        }
        let cq = DensityMatrix::new(cq, vec![size, dout]).unwrap();
        let chi = holevo_chi(&ens, &ch).unwrap();
        prop_assert!((chi - mutual_information(&cq).unwrap()).abs() <= 1e-9);
        prop_assert!(chi >= -1e-9 && chi <= (dout as f64).log2() + 1e-9);
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, 8).with_dims(vec![2, 2, 2]).unwrap();
        let ch = random_channel(&mut r, 2, 2, 2).unwrap();
        prop_assert!(conditional_mutual_information(&rho, &ch).unwrap() >= -1e-7);
    }

    #[test]
    fn channel_mutual_information_is_concave(seed in any::<u64>(), lambda in 0.01f64..0.99) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, 2, 2, 2).unwrap();
        let a = random_density(&mut r, 2);
        let b = random_density(&mut r, 2);
        let ia = channel_mutual_information(&ch, &a).unwrap();
        let ib = channel_mutual_information(&ch, &b).unwrap();
        let imix = channel_mutual_information(&ch, &mix(&a, &b, lambda)).unwrap();
        prop_assert!(imix >= lambda * ia + (1.0 - lambda) * ib - 1e-7);
        prop_assert!((-1e-9..=2.0 + 1e-9).contains(&imix));
    }
}

fn check_dilation(ch: &QuantumChannel, r: &mut SeededRng) {
    let v = ch.stinespring();
    assert!(v.isometry_residual() <= 1e-8, "{}", ch.name());
    for _ in 0..10 {
        let rho = random_density(r, ch.dim_in());
        let via_dilation = v.output_marginal(&rho).unwrap();
        let direct = ch.apply(&rho).unwrap();
        assert!(
            via_dilation.matrix().max_abs_diff(direct.matrix()) <= 1e-8,
            "{}",
            ch.name()
        );
        let env = v.environment_marginal(&rho).unwrap();
        let comp = ch.complementary().apply(&rho).unwrap();
        assert!(env.matrix().max_abs_diff(comp.matrix()) <= 1e-12);
    }
}

#[test]
fn stinespring_contracts_for_zoo_and_random_channels() {
    let mut r = SeededRng::new(8, 1);
    for ch in zoo() {
        check_dilation(&ch, &mut r);
    }
    for i in 0..50 {
        let ch = random_channel(&mut r, 2 + i % 2, 2 + i % 3, 1 + i % 4)
            .unwrap_or_else(|_| random_channel(&mut SeededRng::new(i as u64, 2), 2, 2, 2).unwrap());
        check_dilation(&ch, &mut r);
    }
}
