use std::f64::consts::PI;

use proptest::prelude::*;
use qppo_core::circuits::{
    actor_forward, build_tape, encode_observation, probs_softmax, remap_weight, AngleSource, Architecture,
    CircuitConfig, CircuitParams, Scaling,
};
use qppo_core::envs::Observation;
use qppo_core::nn::clip_grad_norm;
use qppo_core::ppo::{compute_gae, minibatch_partition, normalize_advantages};
use qppo_core::qsim::{run_circuit, Gate, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config_strategy() -> impl Strategy<Value = CircuitConfig> {
    let arch = prop_oneof![
        Just(Architecture::Standard),
        Just(Architecture::Koelle),
        Just(Architecture::Jerbi)
    ];
    let scaling = prop_oneof![Just(Scaling::None), Just(Scaling::Global), Just(Scaling::Local)];
    (arch, scaling, 1usize..5, any::<bool>()).prop_map(|(a, s, layers, cart)| {
        if cart && a == Architecture::Standard {
            CircuitConfig::cart_pole().with_layers(layers).with_output_scaling(s)
        } else {
            CircuitConfig::frozen_lake(a).with_layers(layers).with_output_scaling(s)
        }
    })
}

fn obs_for(config: &CircuitConfig, state: usize, cont: [f64; 4]) -> Observation {
    if config.n_actions() == 4 {
        Observation::Discrete(state)
    } else {
        Observation::Continuous(cont)
    }
}

fn gate_strategy() -> impl Strategy<Value = Gate> {
    (0usize..6, 0usize..4, 1usize..4, -10.0f64..10.0).prop_map(|(k, w, off, angle)| {
        let o = (w + off) % 4;
        match k {
            0 => Gate::Rx { wire: w, angle },
            1 => Gate::Ry { wire: w, angle },
            2 => Gate::Rz { wire: w, angle },
            3 => Gate::H { wire: w },
            4 => Gate::Cnot { control: w, target: o },
            _ => Gate::Cz { a: w, b: o },
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn policy_outputs_lie_on_the_simplex(
        config in config_strategy(),
        seed in any::<u64>(),
        state in 0usize..16,
        cont in prop::array::uniform4(-3.0f64..3.0),
        beta in -4.0f64..4.0,
    ) {
        let mut params = CircuitParams::init(&config, qppo_core::nn::InitStrategy::Standard, &mut ChaCha8Rng::seed_from_u64(seed));
        params.beta.iter_mut().for_each(|b| *b = beta);
        let out = actor_forward(&config, &params, &obs_for(&config, state, cont)).unwrap();
        prop_assert!(out.probs.iter().all(|&p| p >= 0.0));
        prop_assert!((out.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(out.expvals.iter().all(|c| c.abs() <= 1.0));
    }

    #[test]
    fn positive_beta_preserves_argmax(c in prop::collection::vec(-1.0f64..1.0, 2..6), beta in 1e-3f64..20.0) {
        let p = probs_softmax(&c, &[beta]);
        let argmax = |v: &[f64]| v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        prop_assert_eq!(argmax(&p), argmax(&c));
    }

    #[test]
    fn remap_stays_in_open_interval(theta in -15.0f64..15.0) {
        let phi = remap_weight(theta).unwrap();
        prop_assert!(phi > -PI && phi < PI);
    }

    #[test]
    fn remap_is_bounded_for_any_finite_input(theta in prop::num::f64::NORMAL) {
        prop_assert!(remap_weight(theta).unwrap().abs() <= PI);
    }

    #[test]
    fn encoding_angles_are_two_pi_periodic(
        layers in 1usize..4,
        seed in any::<u64>(),
        cont in prop::array::uniform4(-2.0f64..2.0),
        shifts in prop::collection::vec(-2i32..3, 32),
    ) {
        let config = CircuitConfig::cart_pole().with_layers(layers);
        let params = CircuitParams::init(&config, qppo_core::nn::InitStrategy::Standard, &mut ChaCha8Rng::seed_from_u64(seed));
        let encoded = encode_observation(&config, &params, &Observation::Continuous(cont)).unwrap();
        let tape = build_tape(&config, &params, &encoded).unwrap();
        let base = run_circuit(&tape.gates, 4, &config.measured_wires).unwrap();
        let mut shifted = tape.gates.clone();
        let mut n_enc = 0;
        for (k, src) in tape.sources.iter().enumerate() {
            if let AngleSource::Encoding { .. } = src {
                let a = shifted[k].angle().unwrap();
                shifted[k] = shifted[k].with_angle(a + 2.0 * PI * f64::from(shifts[n_enc % shifts.len()]));
                n_enc += 1;
            }
        }
        prop_assert!(n_enc > 0);
        let moved = run_circuit(&shifted, 4, &config.measured_wires).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn norm_and_expectation_bounds(gates in prop::collection::vec(gate_strategy(), 0..80)) {
        let mut sv = StateVector::new(4).unwrap();
        for g in &gates {
            sv.apply(g).unwrap();
        }
        prop_assert!((sv.norm_sqr() - 1.0).abs() < 1e-10);
        for w in 0..4 {
            let e = sv.expval_z(w).unwrap();
            prop_assert!((-1.0..=1.0).contains(&e));
        }
    }

    #[test]
    fn gae_with_zero_gamma_is_one_step_advantage(
        data in prop::collection::vec((-5.0f64..5.0, any::<bool>(), -5.0f64..5.0), 8..64),
        lam in 0.0f64..1.0,
    ) {
        let n_envs = 4;
        let len = data.len() / n_envs * n_envs;
        let rewards: Vec<f64> = data[..len].iter().map(|d| d.0).collect();
        let dones: Vec<bool> = data[..len].iter().map(|d| d.1).collect();
        let values: Vec<f64> = data[..len].iter().map(|d| d.2).collect();
        let (adv, ret) = compute_gae(&rewards, &dones, &values, &[1.0; 4], 0.0, lam);
        for k in 0..len {
            prop_assert!((adv[k] - (rewards[k] - values[k])).abs() < 1e-12);
            prop_assert!((ret[k] - rewards[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn gae_matches_truncated_sum(
        data in prop::collection::vec((-5.0f64..5.0, prop::bool::weighted(0.2), -5.0f64..5.0), 4..40),
        next in prop::array::uniform2(-5.0f64..5.0),
        gamma in 0.0f64..1.0,
        lam in 0.0f64..1.0,
    ) {
        let n = 2;
        let len = data.len() / n * n;
        let steps = len / n;
        let r: Vec<f64> = data[..len].iter().map(|d| d.0).collect();
        let d: Vec<bool> = data[..len].iter().map(|d| d.1).collect();
        let v: Vec<f64> = data[..len].iter().map(|d| d.2).collect();
        let (adv, _) = compute_gae(&r, &d, &v, &next, gamma, lam);
        for i in 0..n {
            for t in 0..steps {
                // A_t = Σ_l (γλ)^l δ_{t+l}, stopping after the first transition that ends an episode.
                let mut want = 0.0;
                let mut weight = 1.0;
                for s in t..steps {
                    let k = s * n + i;
                    let next_v = if s + 1 == steps { next[i] } else { v[k + n] };
                    let mask = if d[k] { 0.0 } else { 1.0 };
                    want += weight * (r[k] + gamma * next_v * mask - v[k]);
                    if d[k] {
                        break;
                    }
                    weight *= gamma * lam;
                }
                prop_assert!((adv[t * n + i] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn minibatches_partition_the_batch(n_mb in 1usize..9, per in 1usize..40, seed in any::<u64>()) {
        let batch = n_mb * per;
        let parts = minibatch_partition(batch, per, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(parts.len(), n_mb);
        prop_assert!(parts.iter().all(|p| p.len() == per));
        let mut all: Vec<usize> = parts.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..batch).collect::<Vec<_>>());
    }

    #[test]
    fn normalised_advantages_have_zero_mean(adv in prop::collection::vec(-100.0f64..100.0, 2..200)) {
        let z = normalize_advantages(&adv);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        prop_assert!(mean.abs() < 1e-9);
    }

    #[test]
    fn clipping_bounds_the_joint_norm(
        a in prop::collection::vec(-10.0f64..10.0, 1..20),
        b in prop::collection::vec(-10.0f64..10.0, 1..20),
        max_norm in 0.01f64..5.0,
    ) {
        let (mut a, mut b) = (a, b);
        let before = clip_grad_norm(&mut [&mut a, &mut b], max_norm);
        let after = a.iter().chain(&b).map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(after <= max_norm * (1.0 + 1e-12) || (after - before).abs() < 1e-12);
        prop_assert!(after <= before + 1e-12);
    }
}
