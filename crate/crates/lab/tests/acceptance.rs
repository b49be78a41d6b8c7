//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

#[path = "../../core/tests/support/dense.rs"]
mod dense;
#[path = "../../core/tests/support/gradcheck.rs"]
mod gradcheck;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use qppo_core::autograd::CircuitGradient;
use qppo_core::circuits::{
    actor_forward, build_tape, count_parameters, encode_observation, probs_softmax, remap_weight, AngleSource,
    Architecture, CircuitConfig, CircuitParams, Scaling,
};
use qppo_core::envs::{EnvKind, FrozenLake, Observation};
use qppo_core::nn::InitStrategy;
use qppo_core::ppo::{compute_gae, minibatch_partition, ActorSpec, HyperParams, LrSchedule};
use qppo_core::qsim::{final_state, run_circuit, Gate};
use qppo_lab::config::Experiment;
use qppo_lab::ewma::{ewma, ALPHA_CART_POLE, ALPHA_FROZEN_LAKE};
use qppo_lab::log_csv::LogRow;
use qppo_lab::runner::{run_experiment, seed_file};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 3] = [0, 1, 2];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- experiments

fn quantum_fl(circuit: CircuitConfig) -> ActorSpec {
    ActorSpec::Quantum {
        circuit,
        init: InitStrategy::Standard,
    }
}

fn experiment(
    root: &Path,
    name: &str,
    env: EnvKind,
    actor: ActorSpec,
    steps: u64,
    lr: Option<LrSchedule>,
) -> Experiment {
    let mut hyper = HyperParams::defaults(env, &actor);
    if let Some(lr) = lr {
        hyper.actor_lr = lr;
    }
    Experiment {
        name: name.into(),
        env,
        actor,
        hyper,
        seeds: SEEDS.to_vec(),
        total_timesteps: steps,
        output_dir: root.join(name),
        smoothing_alpha: match env {
            EnvKind::FrozenLake => ALPHA_FROZEN_LAKE,
            EnvKind::CartPole => ALPHA_CART_POLE,
        },
    }
}

/// Runs experiments on demand and keeps their per-seed logs.
struct Runs<'a> {
    root: &'a Path,
    done: BTreeMap<String, (Vec<Vec<LogRow>>, usize, Duration)>,
}

impl<'a> Runs<'a> {
    fn get(&mut self, exp: Experiment) -> &(Vec<Vec<LogRow>>, usize, Duration) {
        let name = exp.name.clone();
        if !self.done.contains_key(&name) {
            let start = Instant::now();
            let (rows, params) = match run_experiment(&exp) {
                Ok(out) => (out.per_seed, out.manifest.actor_params),
                Err(e) => {
                    eprintln!("  {name}: {e}");
                    (vec![Vec::new(); SEEDS.len()], exp.actor_params())
                }
            };
            self.done.insert(name.clone(), (rows, params, start.elapsed()));
        }
        &self.done[&name]
    }
}

fn first_reaching(rows: &[LogRow], threshold: f64, horizon: u64) -> Option<u64> {
    rows.iter()
        .take_while(|r| r.timestep <= horizon)
        .find(|r| r.smoothed_return >= threshold)
        .map(|r| r.timestep)
}

/// Mean over seeds of the mean smoothed return over all updates.
fn auc(per_seed: &[Vec<LogRow>]) -> f64 {
    let per: Vec<f64> = per_seed
        .iter()
        .map(|rows| {
            if rows.is_empty() {
                f64::NEG_INFINITY
            } else {
                rows.iter().map(|r| r.smoothed_return).sum::<f64>() / rows.len() as f64
            }
        })
        .collect();
    per.iter().sum::<f64>() / per.len() as f64
}

fn threshold_check(runs: &mut Runs, exp: Experiment, threshold: f64, horizon: u64) -> (bool, String) {
    let name = exp.name.clone();
    let (rows, params, took) = runs.get(exp);
    let hits: Vec<Option<u64>> = rows.iter().map(|r| first_reaching(r, threshold, horizon)).collect();
    let count = hits.iter().filter(|h| h.is_some()).count();
    let text: Vec<String> = hits
        .iter()
        .map(|h| h.map_or("never".into(), |t| t.to_string()))
        .collect();
    (
        count * 3 >= 2 * SEEDS.len(),
        format!(
            "{name} ({params}) reached {threshold} at [{}] ({count}/3, {:.0?})",
            text.join(", "),
            took
        ),
    )
}

// ---------------------------------------------------------------- criteria

fn gradient_gate() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for kind in gradcheck::actor_kinds() {
        let mut err = gradcheck::gate(&kind, 20, CircuitGradient::Adjoint, &mut rng);
        if matches!(kind.spec, ActorSpec::Quantum { .. }) {
            err = err.max(gradcheck::gate(&kind, 5, CircuitGradient::ParameterShift, &mut rng));
        }
        worst = worst.max(err);
        parts.push(format!("{} {err:.1e}", kind.name));
    }
    let took = start.elapsed();
    verdict(
        worst < 1e-4 && took < Duration::from_secs(120),
        format!("max rel err {worst:.2e} in {took:.1?} [{}]", parts.join(", ")),
    )
}

fn random_gate(rng: &mut impl Rng) -> Gate {
    let wire = rng.random_range(0..4);
    let other = (wire + rng.random_range(1..4)) % 4;
    let angle = rng.random_range(-7.0..7.0);
    match rng.random_range(0..6) {
        0 => Gate::Rx { wire, angle },
        1 => Gate::Ry { wire, angle },
        2 => Gate::Rz { wire, angle },
        3 => Gate::H { wire },
        4 => Gate::Cnot {
            control: wire,
            target: other,
        },
        _ => Gate::Cz { a: wire, b: other },
    }
}

fn simulator_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut amp_err, mut norm_err, mut exp_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let len = rng.random_range(1..80);
        let gates: Vec<Gate> = (0..len).map(|_| random_gate(&mut rng)).collect();
        let fast = final_state(&gates, 4).unwrap();
        let reference = dense::dense_state(&gates, 4);
        for (a, b) in fast.amplitudes().iter().zip(reference.iter()) {
            amp_err = amp_err.max((a - b).norm());
        }
        norm_err = norm_err.max((fast.norm_sqr() - 1.0).abs());
        let got = run_circuit(&gates, 4, &[0, 1, 2, 3]).unwrap();
        let want = dense::dense_expvals(&gates, 4, &[0, 1, 2, 3]);
        for (g, w) in got.iter().zip(&want) {
            exp_err = exp_err.max((g - w).abs());
        }
    }
    let took = start.elapsed();
    verdict(
        amp_err < 1e-10 && exp_err < 1e-10 && norm_err < 1e-10 && took < Duration::from_secs(60),
        format!("amp err {amp_err:.1e}, expval err {exp_err:.1e}, norm err {norm_err:.1e} in {took:.1?}"),
    )
}

fn published_constants() -> Verdict {
    let p1 = probs_softmax(&[-1.0, 1.0], &[1.0]);
    let p2 = probs_softmax(&[-1.0, 1.0], &[2.0]);
    let close = |p: &[f64], want: [f64; 2]| p.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-3);
    let counts: Vec<usize> = [4, 5]
        .iter()
        .map(|&l| {
            count_parameters(
                &CircuitConfig::cart_pole()
                    .with_layers(l)
                    .with_input_scaling(Scaling::Local)
                    .with_output_scaling(Scaling::Global),
            )
        })
        .collect();
    let play = |actions: &[usize]| {
        let mut env = FrozenLake::new();
        actions.iter().map(|&a| env.fl_step(a).unwrap().reward).sum::<f64>()
    };
    let best = play(&[1, 1, 2, 1, 2, 2]);
    let hole = play(&[1, 2]);
    verdict(
        close(&p1, [0.119, 0.881])
            && close(&p2, [0.018, 0.982])
            && counts == [65, 81]
            && (best - 0.95).abs() < 1e-12
            && (hole + 0.22).abs() < 1e-12,
        format!(
            "softmax β=1 ({:.4}, {:.4}), β=2 ({:.4}, {:.4}); params {counts:?}; returns {best:.2}, {hole:.2}",
            p1[0], p1[1], p2[0], p2[1]
        ),
    )
}

fn reuploading_global(root: &Path) -> Experiment {
    experiment(
        root,
        "qppo-reupload-global",
        EnvKind::FrozenLake,
        quantum_fl(CircuitConfig::frozen_lake(Architecture::Standard).with_output_scaling(Scaling::Global)),
        75_000,
        None,
    )
}

fn frozen_lake_learning(runs: &mut Runs) -> Verdict {
    let root = runs.root;
    let classical = experiment(
        root,
        "ppo-16-3-4",
        EnvKind::FrozenLake,
        ActorSpec::Classical { hidden: vec![3] },
        30_000,
        None,
    );
    let (ok_c, msg_c) = threshold_check(runs, classical, 0.9, 30_000);
    let (ok_q, msg_q) = threshold_check(runs, reuploading_global(root), 0.9, 75_000);
    verdict(ok_c && ok_q, format!("{msg_c}; {msg_q}"))
}

fn ablation_ordering(runs: &mut Runs) -> Verdict {
    let root = runs.root;
    let full = auc(&runs.get(reuploading_global(root)).0);
    let no_reup = experiment(
        root,
        "qppo-no-reupload-global",
        EnvKind::FrozenLake,
        quantum_fl(
            CircuitConfig::frozen_lake(Architecture::Standard)
                .with_output_scaling(Scaling::Global)
                .with_reuploading(false),
        ),
        75_000,
        None,
    );
    debug_assert_eq!(no_reup.hyper.scaling_lr, 1e-3);
    let no_reup = auc(&runs.get(no_reup).0);
    let no_scaling = experiment(
        root,
        "qppo-reupload-plain",
        EnvKind::FrozenLake,
        quantum_fl(CircuitConfig::frozen_lake(Architecture::Standard)),
        75_000,
        None,
    );
    let no_scaling = auc(&runs.get(no_scaling).0);
    verdict(
        full > no_reup && full > no_scaling,
        format!("AUC re-upload+scaling {full:.4}, no re-upload {no_reup:.4}, no output scaling {no_scaling:.4}"),
    )
}

fn schedule_property(runs: &mut Runs) -> Verdict {
    let root = runs.root;
    let decay = auc(&runs.get(reuploading_global(root)).0);
    let mut fixed = Vec::new();
    for lr in [1e-2, 2.5e-3, 1e-4] {
        let exp = experiment(
            root,
            &format!("qppo-fixed-{lr}"),
            EnvKind::FrozenLake,
            quantum_fl(CircuitConfig::frozen_lake(Architecture::Standard).with_output_scaling(Scaling::Global)),
            75_000,
            Some(LrSchedule::Fixed { lr }),
        );
        fixed.push((lr, auc(&runs.get(exp).0)));
    }
    let best = fixed.iter().map(|f| f.1).fold(f64::NEG_INFINITY, f64::max);
    let text: Vec<String> = fixed.iter().map(|(lr, a)| format!("{lr}: {a:.4}")).collect();
    verdict(
        decay >= best,
        format!("AUC exp decay {decay:.4} vs fixed [{}]", text.join(", ")),
    )
}

fn cart_pole_feasibility(runs: &mut Runs) -> Verdict {
    let root = runs.root;
    let quantum = experiment(
        root,
        "qppo-cartpole",
        EnvKind::CartPole,
        ActorSpec::Quantum {
            circuit: CircuitConfig::cart_pole().with_output_scaling(Scaling::Global),
            init: InitStrategy::Small,
        },
        500_000,
        None,
    );
    let classical = experiment(
        root,
        "ppo-cartpole-4-5-5-2",
        EnvKind::CartPole,
        ActorSpec::Classical { hidden: vec![5, 5] },
        500_000,
        None,
    );
    let (ok_q, msg_q) = threshold_check(runs, quantum, 400.0, 500_000);
    let (ok_c, msg_c) = threshold_check(runs, classical, 475.0, 500_000);
    verdict(ok_q && ok_c, format!("{msg_q}; {msg_c}"))
}

fn determinism(root: &Path) -> Verdict {
    let exps = [
        experiment(
            root,
            "det-quantum",
            EnvKind::FrozenLake,
            quantum_fl(CircuitConfig::frozen_lake(Architecture::Jerbi).with_output_scaling(Scaling::Local)),
            5 * 512,
            None,
        ),
        experiment(
            root,
            "det-classical",
            EnvKind::CartPole,
            ActorSpec::Classical { hidden: vec![6, 6] },
            8 * 512,
            None,
        ),
    ];
    let mut identical = true;
    let mut files = 0;
    for exp in exps {
        let mut snapshots = Vec::new();
        for attempt in 0..2 {
            let mut e = exp.clone();
            e.output_dir = root.join(format!("{}-{attempt}", exp.name));
            if let Err(err) = run_experiment(&e) {
                return verdict(false, format!("{}: {err}", exp.name));
            }
            let mut bytes = Vec::new();
            for seed in &e.seeds {
                bytes.push(std::fs::read(e.output_dir.join(seed_file(*seed))).unwrap());
            }
            bytes.push(std::fs::read(e.output_dir.join("aggregate.csv")).unwrap());
            snapshots.push(bytes);
        }
        files += snapshots[0].len();
        identical &= snapshots[0] == snapshots[1];
    }
    verdict(identical, format!("{files} CSV files compared across reruns"))
}

fn invariant_suite() -> Verdict {
    let mut runner = TestRunner::new(PropConfig {
        cases: 256,
        failure_persistence: None,
        ..PropConfig::default()
    });
    let mut failures = Vec::new();
    let mut check = |name: &str, result: Result<(), String>| {
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    };

    let arch = prop_oneof![
        Just(Architecture::Standard),
        Just(Architecture::Koelle),
        Just(Architecture::Jerbi)
    ];
    let scaling = prop_oneof![Just(Scaling::None), Just(Scaling::Global), Just(Scaling::Local)];
    check(
        "simplex",
        runner
            .run(
                &(arch, scaling, any::<u64>(), 0usize..16, -4.0f64..4.0),
                |(a, s, seed, state, beta)| {
                    let config = CircuitConfig::frozen_lake(a).with_output_scaling(s).with_layers(2);
                    let mut params =
                        CircuitParams::init(&config, InitStrategy::Standard, &mut ChaCha8Rng::seed_from_u64(seed));
                    params.beta.iter_mut().for_each(|b| *b = beta);
                    let p = actor_forward(&config, &params, &Observation::Discrete(state))
                        .unwrap()
                        .probs;
                    prop_assert!(p.iter().all(|&x| x >= 0.0));
                    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    check(
        "softmax argmax under β > 0",
        runner
            .run(
                &(prop::collection::vec(-1.0f64..1.0, 2..6), 1e-3f64..20.0),
                |(c, beta)| {
                    let p = probs_softmax(&c, &[beta]);
                    let argmax = |v: &[f64]| v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
                    prop_assert_eq!(argmax(&p), argmax(&c));
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    check(
        "remap range",
        runner
            .run(&(-15.0f64..15.0), |theta| {
                let phi = remap_weight(theta).unwrap();
                prop_assert!(phi > -PI && phi < PI);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    check(
        "encoding 2π periodicity",
        runner
            .run(
                &(any::<u64>(), prop::array::uniform4(-2.0f64..2.0), -3i32..4),
                |(seed, s, k)| {
                    let config = CircuitConfig::cart_pole().with_layers(3);
                    let params =
                        CircuitParams::init(&config, InitStrategy::Standard, &mut ChaCha8Rng::seed_from_u64(seed));
                    let enc = encode_observation(&config, &params, &Observation::Continuous(s)).unwrap();
                    let tape = build_tape(&config, &params, &enc).unwrap();
                    let base = run_circuit(&tape.gates, 4, &config.measured_wires).unwrap();
                    let shifted: Vec<Gate> = tape
                        .gates
                        .iter()
                        .zip(&tape.sources)
                        .map(|(g, src)| match src {
                            AngleSource::Encoding { .. } => g.with_angle(g.angle().unwrap() + 2.0 * PI * f64::from(k)),
                            _ => *g,
                        })
                        .collect();
                    let moved = run_circuit(&shifted, 4, &config.measured_wires).unwrap();
                    for (a, b) in base.iter().zip(&moved) {
                        prop_assert!((a - b).abs() < 1e-10);
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    check(
        "GAE γ = 0",
        runner
            .run(
                &(
                    prop::collection::vec((-5.0f64..5.0, any::<bool>(), -5.0f64..5.0), 16),
                    0.0f64..1.0,
                ),
                |(data, lam)| {
                    let r: Vec<f64> = data.iter().map(|d| d.0).collect();
                    let d: Vec<bool> = data.iter().map(|d| d.1).collect();
                    let v: Vec<f64> = data.iter().map(|d| d.2).collect();
                    let (adv, _) = compute_gae(&r, &d, &v, &[2.0; 4], 0.0, lam);
                    for k in 0..16 {
                        prop_assert!((adv[k] - (r[k] - v[k])).abs() < 1e-12);
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    check(
        "minibatch partition",
        runner
            .run(&any::<u64>(), |seed| {
                let parts = minibatch_partition(512, 128, &mut ChaCha8Rng::seed_from_u64(seed));
                prop_assert_eq!(parts.len(), 4);
                let mut all = parts.concat();
                all.sort_unstable();
                prop_assert_eq!(all, (0..512).collect::<Vec<_>>());
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    check(
        "EWMA identities",
        runner
            .run(
                &(
                    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..60),
                    -3.0f64..3.0,
                    1e-3f64..=1.0,
                    -5.0f64..5.0,
                ),
                |(xy, a, alpha, c)| {
                    let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
                    let y: Vec<f64> = xy.iter().map(|p| p.1).collect();
                    let combo: Vec<f64> = xy.iter().map(|p| p.0 + a * p.1).collect();
                    let (sx, sy, sc) = (
                        ewma(&x, alpha).unwrap(),
                        ewma(&y, alpha).unwrap(),
                        ewma(&combo, alpha).unwrap(),
                    );
                    for i in 0..x.len() {
                        prop_assert!((sc[i] - (sx[i] + a * sy[i])).abs() < 1e-9);
                    }
                    prop_assert!(ewma(&vec![c; x.len()], alpha)
                        .unwrap()
                        .iter()
                        .all(|v| (v - c).abs() < 1e-9));
                    prop_assert_eq!(ewma(&x, 1.0).unwrap(), x);
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );
    let n = 7;
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{n} properties × 256 cases")
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary output directory");
    let mut runs = Runs {
        root: tmp.path(),
        done: BTreeMap::new(),
    };

    type Check<'a> = Box<dyn FnOnce(&mut Runs) -> Verdict + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("1 gradient gate", Box::new(|_| gradient_gate())),
        ("2 simulator oracle", Box::new(|_| simulator_oracle())),
        ("3 published constants", Box::new(|_| published_constants())),
        ("4 frozen lake learning", Box::new(frozen_lake_learning)),
        ("5 ablation ordering", Box::new(ablation_ordering)),
        ("6 learning-rate schedule", Box::new(schedule_property)),
        ("7 cart pole feasibility", Box::new(cart_pole_feasibility)),
        ("8 determinism", Box::new(|r: &mut Runs| determinism(r.root))),
        ("9 invariant suite", Box::new(|_| invariant_suite())),
    ];

    let mut failed = 0;
    for (name, check) in criteria {
        let v = check(&mut runs);
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
