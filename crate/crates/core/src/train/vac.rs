use alloc::vec;
use alloc::vec::Vec;

use super::{
    evaluate, run_loop, state_features, Critic, EvalPoint, Policy, Proposal, TrainConfig,
    TrainObserver,
};
use crate::env::Environment;
use crate::fourier::FourierBasis;
use crate::mapping::{enumerate_action_space, lex_cmp};
use crate::mlp::{Activation, Mlp};
use crate::{Error, Result, Rng, Stream};

/// Softmax policy with one logit per enumerated action.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalActor {
    net: Mlp,
}

impl CategoricalActor {
    pub fn new(
        n_features: usize,
        hidden: &[usize],
        n_actions: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        let mut sizes = vec![n_features];
        sizes.extend_from_slice(hidden);
        sizes.push(n_actions);
        Ok(CategoricalActor {
            net: Mlp::new(&sizes, Activation::Relu, Activation::Identity, rng)?,
        })
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn probabilities(&self, features: &[f64]) -> Result<Vec<f64>> {
        Ok(softmax(&self.net.predict(features)?))
    }

    pub fn sample(&self, features: &[f64], rng: &mut Rng) -> Result<usize> {
        let p = self.probabilities(features)?;
        let u = rng.uniform();
        let mut acc = 0.0;
        for (i, pi) in p.iter().enumerate() {
            acc += pi;
            if u < acc {
                return Ok(i);
            }
        }
        Ok(p.len() - 1)
    }

    /// Most probable index, lowest index on ties.
    pub fn greedy(&self, features: &[f64]) -> Result<usize> {
        let logits = self.net.predict(features)?;
        let mut best = 0;
        for (i, &l) in logits.iter().enumerate() {
            if l > logits[best] {
                best = i;
            }
        }
        Ok(best)
    }

    /// `θ ← θ + α δ ∇θ log π(index | s)`.
    pub fn update(&mut self, features: &[f64], index: usize, delta: f64, lr: f64) -> Result<()> {
        if !delta.is_finite() {
            return Err(Error::NonFinite("TD error"));
        }
        if delta == 0.0 || lr == 0.0 {
            return Ok(());
        }
        let (logits, cache) = self.net.forward(features)?;
        if index >= logits.len() {
            return Err(Error::invalid("action index out of range"));
        }
        // d log softmax_i / d logits = e_i − p, ascended so negated for sgd_step
        let mut upstream = softmax(&logits);
        upstream[index] -= 1.0;
        upstream.iter_mut().for_each(|u| *u *= delta);
        let grad = self.net.backward(&cache, &upstream)?;
        self.net.sgd_step(&grad, lr)
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logits.iter().map(|&l| libm::exp(l - max)).collect();
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= sum);
    p
}

/// Categorical actor and critic over an enumerated action space.
#[derive(Debug, Clone, PartialEq)]
pub struct VacAgent {
    pub features: FourierBasis,
    pub actor: CategoricalActor,
    pub critic: Critic,
    pub actions: Vec<Vec<f64>>,
}

impl Policy for VacAgent {
    type Choice = usize;

    fn act(
        &self,
        features: &[f64],
        _: &Critic,
        policy_rng: &mut Rng,
        _: &mut Rng,
    ) -> Result<(usize, Vec<f64>)> {
        let i = self.actor.sample(features, policy_rng)?;
        Ok((i, self.actions[i].clone()))
    }

    fn greedy(&self, features: &[f64], _: &Critic, _: &mut Rng) -> Result<Vec<f64>> {
        Ok(self.actions[self.actor.greedy(features)?].clone())
    }

    fn proposal(choice: &usize) -> Proposal<'_> {
        Proposal::Index(*choice)
    }

    fn update(&mut self, features: &[f64], choice: &usize, delta: f64, lr: f64) -> Result<()> {
        self.actor.update(features, *choice, delta, lr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VacResult {
    pub episode_returns: Vec<f64>,
    pub evals: Vec<EvalPoint>,
    pub agent: VacAgent,
    pub steps: u64,
}

/// Actor-critic with the discrete action drawn directly from a softmax over
/// every action. Fails with `CardinalityExceeded` when `|A| > limit`.
pub fn vac_train_run<E, O>(
    env: &mut E,
    cfg: &TrainConfig,
    seed: u64,
    limit: usize,
    observer: &mut O,
) -> Result<VacResult>
where
    E: Environment + ?Sized,
    O: TrainObserver + ?Sized,
{
    cfg.validate()?;
    let space = env.action_space().clone();
    let mut actions = enumerate_action_space(&space, limit)?;
    actions.sort_by(|a, b| lex_cmp(a, b));
    let mut init_rng = Rng::new(seed).substream(Stream::Init);
    let features = state_features(env, &cfg.features)?;
    let actor = CategoricalActor::new(
        features.output_dim(),
        &cfg.actor_hidden,
        actions.len(),
        &mut init_rng,
    )?;
    let mut critic = Critic::new(
        features.output_dim(),
        &cfg.critic_hidden,
        space,
        &mut init_rng,
    )?;
    let mut agent = VacAgent {
        features: features.clone(),
        actor,
        critic: critic.clone(),
        actions,
    };
    let out = run_loop(env, &features, &mut agent, &mut critic, cfg, seed, observer)?;
    agent.critic = critic;
    Ok(VacResult {
        episode_returns: out.episode_returns,
        evals: out.evals,
        agent,
        steps: out.steps,
    })
}

/// Mean return of the most probable action in every state.
pub fn vac_eval_policy<E: Environment + ?Sized>(
    env: &mut E,
    agent: &VacAgent,
    n_episodes: usize,
    seed: u64,
) -> Result<f64> {
    evaluate(env, &agent.features, agent, &agent.critic, n_episodes, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[1000.0, 0.0, -3.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > 0.999);
    }

    #[test]
    fn positive_delta_raises_chosen_probability() {
        let mut rng = Rng::new(4);
        let mut actor = CategoricalActor::new(2, &[], 3, &mut rng).unwrap();
        let x = [1.0, -0.5];
        let before = actor.probabilities(&x).unwrap()[2];
        actor.update(&x, 2, 1.0, 0.1).unwrap();
        assert!(actor.probabilities(&x).unwrap()[2] > before);
    }
}
