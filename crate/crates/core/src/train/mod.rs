//! Online actor-critic training with a pluggable action mapper.
//!
//! Each step samples `â ~ π(s)`, maps it to a grid action `a`, steps the
//! environment, samples and maps `â'` in the successor state, and then
//! updates the critic on `(s, a)` and the actor on `(s, â)` with the same TD
//! error. There is no replay buffer and no target network.

mod actor;
mod critic;
mod vac;

use alloc::boxed::Box;
use alloc::vec::Vec;

pub use actor::{softplus, GaussianActor, SIGMA_FLOOR};
pub use critic::Critic;
pub use vac::{vac_eval_policy, vac_train_run, CategoricalActor, VacAgent, VacResult};

use crate::env::Environment;
use crate::fourier::{FourierBasis, FourierBasisConfig};
use crate::loss::DEFAULT_HUBER_DELTA;
use crate::mapping::Mapper;
use crate::{Error, Result, Rng, Stream};

/// Standard deviation of the Gaussian policy.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaMode {
    /// One value shared by all action entries.
    Constant(f64),
    PerEntry(Vec<f64>),
    /// Extra actor heads through softplus, starting at `init`.
    Learned {
        init: f64,
    },
}

impl SigmaMode {
    fn validate(&self, n_actions: usize) -> Result<()> {
        let ok = |s: f64| s > 0.0 && s.is_finite();
        match self {
            SigmaMode::Constant(s) | SigmaMode::Learned { init: s } if !ok(*s) => {
                Err(Error::invalid("sigma must be positive and finite"))
            }
            SigmaMode::PerEntry(v) => {
                Error::check_dim(n_actions, v.len())?;
                if v.iter().all(|s| ok(*s)) {
                    Ok(())
                } else {
                    Err(Error::invalid("sigma must be positive and finite"))
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub order: usize,
    pub coupled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub gamma: f64,
    pub alpha_cr: f64,
    pub alpha_ac: f64,
    pub sigma: SigmaMode,
    pub n_episodes: usize,
    /// Evaluate after every `eval_every` training episodes; 0 disables evaluation.
    pub eval_every: usize,
    pub eval_episodes: usize,
    /// Hidden layer widths; empty means a linear (shallow) network.
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub features: FeatureConfig,
    pub huber_delta: f64,
    /// Rewards are multiplied by this before they reach the critic.
    /// Recorded returns stay unscaled.
    pub reward_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            gamma: 0.99,
            alpha_cr: 1e-2,
            alpha_ac: 1e-3,
            sigma: SigmaMode::Constant(0.5),
            n_episodes: 1000,
            eval_every: 100,
            eval_episodes: 10,
            actor_hidden: Vec::new(),
            critic_hidden: alloc::vec![32, 32],
            features: FeatureConfig {
                order: 3,
                coupled: false,
            },
            huber_delta: DEFAULT_HUBER_DELTA,
            reward_scale: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma must lie in [0, 1)"));
        }
        for (name, a) in [("alpha_cr", self.alpha_cr), ("alpha_ac", self.alpha_ac)] {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "{name} must be finite and non-negative"
                )));
            }
        }
        if self.alpha_ac > self.alpha_cr {
            return Err(Error::invalid("alpha_ac must not exceed alpha_cr"));
        }
        if !(self.huber_delta > 0.0) || !self.huber_delta.is_finite() {
            return Err(Error::invalid("huber_delta must be positive"));
        }
        if !(self.reward_scale > 0.0) || !self.reward_scale.is_finite() {
            return Err(Error::invalid("reward_scale must be positive"));
        }
        if self.eval_every > 0 && self.eval_episodes == 0 {
            return Err(Error::invalid(
                "eval_episodes must be positive when evaluating",
            ));
        }
        if self.actor_hidden.contains(&0) || self.critic_hidden.contains(&0) {
            return Err(Error::invalid("hidden layer widths must be positive"));
        }
        Ok(())
    }
}

/// `r + γ Q(s', a') − Q(s, a)`, with no bootstrap when `terminal`.
///
/// Truncation at the horizon is not terminal: callers pass `terminal = false`
/// there so the successor value is still bootstrapped.
pub fn td_error(r: f64, gamma: f64, q_next: f64, q_curr: f64, terminal: bool) -> f64 {
    let bootstrap = if terminal { 0.0 } else { gamma * q_next };
    r + bootstrap - q_curr
}

/// Fourier features of observations for an environment.
pub fn state_features<E: Environment + ?Sized>(
    env: &E,
    cfg: &FeatureConfig,
) -> Result<FourierBasis> {
    FourierBasis::new(FourierBasisConfig {
        order: cfg.order,
        coupled: cfg.coupled,
        input_bounds: env.observation_bounds(),
    })
}

/// What the actor was updated with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Proposal<'a> {
    Continuous(&'a [f64]),
    Index(usize),
}

/// Hooks fired by the training loop, for logging and auditing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainEvent<'a> {
    EnvStep {
        episode: usize,
        action: &'a [f64],
        observation: &'a [f64],
        reward: f64,
    },
    CriticUpdate {
        features: &'a [f64],
        action: &'a [f64],
        target: f64,
    },
    ActorUpdate {
        features: &'a [f64],
        proposal: Proposal<'a>,
        delta: f64,
    },
    EpisodeEnd {
        episode: usize,
        train_return: f64,
    },
    Eval {
        episode: usize,
        mean_return: f64,
    },
}

pub trait TrainObserver {
    fn observe(&mut self, event: &TrainEvent<'_>);
}

/// Ignores every event.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoObserver;

impl TrainObserver for NoObserver {
    fn observe(&mut self, _: &TrainEvent<'_>) {}
}

impl<F: FnMut(&TrainEvent<'_>)> TrainObserver for F {
    fn observe(&mut self, event: &TrainEvent<'_>) {
        self(event)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    /// Number of training episodes completed.
    pub episode: usize,
    pub mean_return: f64,
}

/// Features, actor and critic of a Gaussian actor-critic agent.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorCritic {
    pub features: FourierBasis,
    pub actor: GaussianActor,
    pub critic: Critic,
}

impl ActorCritic {
    pub fn new<E: Environment + ?Sized>(env: &E, cfg: &TrainConfig, rng: &mut Rng) -> Result<Self> {
        let features = state_features(env, &cfg.features)?;
        let space = env.action_space().clone();
        let actor = GaussianActor::new(
            features.output_dim(),
            &cfg.actor_hidden,
            space.n_dims(),
            cfg.sigma.clone(),
            rng,
        )?;
        let critic = Critic::new(features.output_dim(), &cfg.critic_hidden, space, rng)?;
        Ok(ActorCritic {
            features,
            actor,
            critic,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub episode_returns: Vec<f64>,
    pub evals: Vec<EvalPoint>,
    pub agent: ActorCritic,
    pub steps: u64,
}

/// A policy that turns features into grid actions and learns from TD errors.
pub(crate) trait Policy {
    type Choice;

    fn act(
        &self,
        features: &[f64],
        critic: &Critic,
        policy_rng: &mut Rng,
        search_rng: &mut Rng,
    ) -> Result<(Self::Choice, Vec<f64>)>;

    fn greedy(&self, features: &[f64], critic: &Critic, search_rng: &mut Rng) -> Result<Vec<f64>>;

    fn proposal(choice: &Self::Choice) -> Proposal<'_>;

    fn update(
        &mut self,
        features: &[f64],
        choice: &Self::Choice,
        delta: f64,
        lr: f64,
    ) -> Result<()>;
}

struct Mapped<'a, M: ?Sized> {
    actor: &'a mut GaussianActor,
    mapper: &'a M,
}

impl<M: Mapper + ?Sized> Policy for Mapped<'_, M> {
    type Choice = Vec<f64>;

    fn act(
        &self,
        features: &[f64],
        critic: &Critic,
        policy_rng: &mut Rng,
        search_rng: &mut Rng,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let a_hat = self.actor.sample(features, policy_rng)?;
        let action = self.mapper.map(features, &a_hat, critic, search_rng)?;
        Ok((a_hat, action))
    }

    fn greedy(&self, features: &[f64], critic: &Critic, search_rng: &mut Rng) -> Result<Vec<f64>> {
        let mu = self.actor.mean(features)?;
        self.mapper.map(features, &mu, critic, search_rng)
    }

    fn proposal(choice: &Vec<f64>) -> Proposal<'_> {
        Proposal::Continuous(choice)
    }

    fn update(&mut self, features: &[f64], a_hat: &Vec<f64>, delta: f64, lr: f64) -> Result<()> {
        self.actor.update(features, a_hat, delta, lr)
    }
}

fn check_compatible<E: Environment + ?Sized>(env: &E, critic: &Critic) -> Result<()> {
    if env.action_space() != critic.space() {
        return Err(Error::invalid(
            "mapper and environment action spaces differ",
        ));
    }
    Ok(())
}

/// Mean undiscounted return of the greedy policy over `n_episodes`.
pub(crate) fn evaluate<E, P>(
    env: &mut E,
    features: &FourierBasis,
    policy: &P,
    critic: &Critic,
    n_episodes: usize,
    seed: u64,
) -> Result<f64>
where
    E: Environment + ?Sized,
    P: Policy,
{
    if n_episodes == 0 {
        return Err(Error::invalid("evaluation needs at least one episode"));
    }
    let root = Rng::new(seed);
    let mut env_rng = root.substream(Stream::Env);
    let mut search_rng = root.substream(Stream::Search);
    let mut total = 0.0;
    for _ in 0..n_episodes {
        let mut obs = env.reset(&mut env_rng);
        loop {
            let f = features.features(&obs)?;
            let action = policy.greedy(&f, critic, &mut search_rng)?;
            let step = env.step(&action, &mut env_rng)?;
            total += step.reward;
            if step.done() {
                break;
            }
            obs = step.observation;
        }
    }
    Ok(total / n_episodes as f64)
}

fn with_episode<T>(episode: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Episode {
        episode,
        source: Box::new(e),
    })
}

pub(crate) struct LoopOutput {
    pub episode_returns: Vec<f64>,
    pub evals: Vec<EvalPoint>,
    pub steps: u64,
}

pub(crate) fn run_loop<E, P, O>(
    env: &mut E,
    features: &FourierBasis,
    policy: &mut P,
    critic: &mut Critic,
    cfg: &TrainConfig,
    seed: u64,
    observer: &mut O,
) -> Result<LoopOutput>
where
    E: Environment + ?Sized,
    P: Policy,
    O: TrainObserver + ?Sized,
{
    cfg.validate()?;
    check_compatible(env, critic)?;
    let root = Rng::new(seed);
    let mut env_rng = root.substream(Stream::Env);
    let mut policy_rng = root.substream(Stream::Policy);
    let mut search_rng = root.substream(Stream::Search);
    let eval_seed = root.substream(Stream::Eval).next_u64();

    let mut episode_returns = Vec::with_capacity(cfg.n_episodes);
    let mut evals = Vec::new();
    let mut steps = 0u64;
    for episode in 0..cfg.n_episodes {
        let ret = with_episode(
            episode,
            (|| {
                let obs = env.reset(&mut env_rng);
                let mut f = features.features(&obs)?;
                let mut ret = 0.0;
                loop {
                    let (choice, action) =
                        policy.act(&f, critic, &mut policy_rng, &mut search_rng)?;
                    let step = env.step(&action, &mut env_rng)?;
                    steps += 1;
                    ret += step.reward;
                    observer.observe(&TrainEvent::EnvStep {
                        episode,
                        action: &action,
                        observation: &step.observation,
                        reward: step.reward,
                    });
                    let f_next = features.features(&step.observation)?;
                    let q_next = if step.terminal {
                        0.0
                    } else {
                        let (_, next_action) =
                            policy.act(&f_next, critic, &mut policy_rng, &mut search_rng)?;
                        critic.q(&f_next, &next_action)?
                    };
                    let q_curr = critic.q(&f, &action)?;
                    let r = step.reward * cfg.reward_scale;
                    let delta = td_error(r, cfg.gamma, q_next, q_curr, step.terminal);
                    if !delta.is_finite() {
                        return Err(Error::NonFinite("TD error"));
                    }
                    let target = q_curr + delta;
                    observer.observe(&TrainEvent::CriticUpdate {
                        features: &f,
                        action: &action,
                        target,
                    });
                    critic.update(&f, &action, target, cfg.huber_delta, cfg.alpha_cr)?;
                    observer.observe(&TrainEvent::ActorUpdate {
                        features: &f,
                        proposal: P::proposal(&choice),
                        delta,
                    });
                    policy.update(&f, &choice, delta, cfg.alpha_ac)?;
                    if step.done() {
                        break;
                    }
                    f = f_next;
                }
                Ok(ret)
            })(),
        )?;
        episode_returns.push(ret);
        observer.observe(&TrainEvent::EpisodeEnd {
            episode,
            train_return: ret,
        });
        let done = episode + 1;
        if cfg.eval_every > 0 && done % cfg.eval_every == 0 {
            let mean_return = with_episode(
                episode,
                evaluate(env, features, policy, critic, cfg.eval_episodes, eval_seed),
            )?;
            evals.push(EvalPoint {
                episode: done,
                mean_return,
            });
            observer.observe(&TrainEvent::Eval {
                episode: done,
                mean_return,
            });
        }
    }
    Ok(LoopOutput {
        episode_returns,
        evals,
        steps,
    })
}

/// Trains a Gaussian actor and a critic with `mapper` between them.
pub fn train_run<E, M, O>(
    env: &mut E,
    mapper: &M,
    cfg: &TrainConfig,
    seed: u64,
    observer: &mut O,
) -> Result<TrainResult>
where
    E: Environment + ?Sized,
    M: Mapper + ?Sized,
    O: TrainObserver + ?Sized,
{
    cfg.validate()?;
    if mapper.space() != env.action_space() {
        return Err(Error::invalid(
            "mapper and environment action spaces differ",
        ));
    }
    let mut init_rng = Rng::new(seed).substream(Stream::Init);
    let mut agent = ActorCritic::new(env, cfg, &mut init_rng)?;
    let out = {
        let ActorCritic {
            features,
            actor,
            critic,
        } = &mut agent;
        let mut policy = Mapped { actor, mapper };
        run_loop(env, features, &mut policy, critic, cfg, seed, observer)?
    };
    Ok(TrainResult {
        episode_returns: out.episode_returns,
        evals: out.evals,
        agent,
        steps: out.steps,
    })
}

/// Mean return over `n_episodes` with `â = μ(s)` and no exploration noise.
pub fn eval_policy<E, M>(
    env: &mut E,
    agent: &ActorCritic,
    mapper: &M,
    n_episodes: usize,
    seed: u64,
) -> Result<f64>
where
    E: Environment + ?Sized,
    M: Mapper + ?Sized,
{
    check_compatible(env, &agent.critic)?;
    let mut actor = agent.actor.clone();
    let policy = Mapped {
        actor: &mut actor,
        mapper,
    };
    evaluate(
        env,
        &agent.features,
        &policy,
        &agent.critic,
        n_episodes,
        seed,
    )
}
