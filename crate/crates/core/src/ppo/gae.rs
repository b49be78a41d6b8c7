/// Generalised advantage estimation over a `[steps × envs]` row-major rollout.
///
/// `dones[t·n + i]` marks that the transition taken at step `t` in env `i` ended its episode,
/// so nothing is bootstrapped across it. Returns `(advantages, returns)` with
/// `returns = advantages + values`.
pub fn compute_gae(
    rewards: &[f64],
    dones: &[bool],
    values: &[f64],
    next_value: &[f64],
    gamma: f64,
    gae_lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = next_value.len();
    let steps = rewards.len() / n.max(1);
    let mut adv = vec![0.0; rewards.len()];
    let mut last = vec![0.0; n];
    for t in (0..steps).rev() {
        for i in 0..n {
            let k = t * n + i;
            let next_v = if t + 1 == steps { next_value[i] } else { values[k + n] };
            let nonterminal = if dones[k] { 0.0 } else { 1.0 };
            let delta = rewards[k] + gamma * next_v * nonterminal - values[k];
            last[i] = delta + gamma * gae_lambda * nonterminal * last[i];
            adv[k] = last[i];
        }
    }
    let returns = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    (adv, returns)
}
