//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `DNC_ACCEPTANCE_ONLY=1,5,12` restricts the run to the listed criteria.
//! `DNC_MOVIES_CSV` points criterion 11 at a real movies.csv.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use dnc_bench::catalog_io::ingest;
use dnc_bench::experiment::EnvSpec;
use dnc_bench::{run_experiment, ExperimentConfig};
use dnc_core::catalog::{pick_probability_scaled, synthetic_catalog, tier_rewards};
use dnc_core::env::{recommender_step, CatalogEnvConfig};
use dnc_core::gaussian::GaussianPolicyParams;
use dnc_core::linalg::distance;
use dnc_core::loss::huber_loss_grad;
use dnc_core::mapping::*;
use dnc_core::mlp::{Activation, Mlp};
use dnc_core::train::{eval_policy, ActorCritic, GaussianActor, SigmaMode};
use dnc_core::{Result as CoreResult, Rng};

struct Suite {
    only: Option<BTreeSet<u32>>,
    results: Vec<(u32, bool)>,
}

impl Suite {
    fn run(&mut self, n: u32, check: impl FnOnce() -> (bool, String)) {
        if self.only.as_ref().is_some_and(|s| !s.contains(&n)) {
            return;
        }
        let start = Instant::now();
        let (ok, detail) = check();
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {verdict}: {detail} [{:.1}s]",
            start.elapsed().as_secs_f64()
        );
        self.results.push((n, ok));
    }
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn load(config: &str, out: &Path, overrides: &[(&str, String)]) -> ExperimentConfig {
    let mut pairs: Vec<(String, String)> = overrides
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect();
    pairs.push(("output_dir".into(), out.display().to_string()));
    ExperimentConfig::load(&workspace().join("configs").join(config), &pairs)
        .expect("shipped config parses")
}

fn cpus() -> String {
    std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .to_string()
}

fn random_oracle(seed: u64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |_: &[f64], a: &[f64]| {
        let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
        for v in a {
            h ^= (v * 1000.0).round() as i64 as u64;
            h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
            h ^= h >> 33;
        }
        (h % 10_000) as f64 / 100.0
    }
}

fn mapping_exactness() -> (bool, String) {
    let inv = ActionSpaceSpec::uniform(1, 0.0, 66.0, 1.0).unwrap();
    let rec = ActionSpaceSpec::uniform(1, 0.0, 1.0, 0.01).unwrap();
    let maze = ActionSpaceSpec::uniform(8, 0.0, 1.0, 1.0).unwrap();
    let g = |a: f64, s: &ActionSpaceSpec| discretize_base(&vec![a; s.n_dims()], s).unwrap()[0];
    let cases = [
        (g(-1.0, &inv), 0.0),
        (g(1.0, &inv), 66.0),
        (g(0.0, &inv), 33.0),
        (g(-1.0, &rec), 0.0),
        (g(1.0, &rec), 1.0),
        (g(-1.0, &maze), 0.0),
        (g(1.0, &maze), 1.0),
        (g(-5.0, &inv), 0.0),
        (g(5.0, &inv), 66.0),
    ];
    let endpoints = cases.iter().all(|(got, want)| got == want);
    let grid = (g(0.2, &rec) - 0.6).abs() < 0.005;
    (
        endpoints && grid,
        format!(
            "endpoints and clipping exact: {endpoints}, 0.2 -> {} on the 0.01 grid",
            g(0.2, &rec)
        ),
    )
}

fn perturbation_structure() -> (bool, String) {
    let mut rng = Rng::new(2);
    let mut bad = 0;
    for _ in 0..200 {
        let n = 1 + rng.index(20);
        let d = 1 + rng.index(5);
        let eps = rng.uniform_range(0.01, 10.0);
        let p = perturbation_matrix(n, &PerturbationParams::new(d, eps).unwrap());
        let mut max_norm: f64 = 0.0;
        let mut ok = p.rows() == n && p.cols() == 2 * d * n;
        for j in 0..p.cols() {
            let col = p.column(j);
            ok &= col.iter().filter(|v| **v != 0.0).count() == 1;
            max_norm = max_norm.max(distance(&col, &vec![0.0; n]));
        }
        ok &= max_norm == d as f64 * eps;
        bad += usize::from(!ok);
    }
    (
        bad == 0,
        format!(
            "{} of 200 random (N, d, eps) triples structurally correct",
            200 - bad
        ),
    )
}

fn lipschitz_certificate() -> (bool, String) {
    let mut rng = Rng::new(3);
    let (mut violations, mut pairs) = (0usize, 0usize);
    let mut done = 0;
    while done < 1000 {
        let n = 1 + rng.index(5);
        let spec = ActionSpaceSpec::uniform(n, 0.0, 10.0, 1.0).unwrap();
        let base: Vec<f64> = (0..n).map(|_| rng.index(11) as f64).collect();
        let pert = PerturbationParams::new(1 + rng.index(3), (1 + rng.index(2)) as f64).unwrap();
        let nbh = generate_neighbors(&base, &spec, &pert).unwrap();
        if nbh.len() < 2 {
            continue;
        }
        let q = (0..nbh.len())
            .map(|_| rng.uniform_range(-100.0, 100.0))
            .collect();
        let nbh = nbh.with_q_values(q).unwrap();
        let l = lipschitz_estimate(&nbh).unwrap();
        for i in 0..nbh.len() {
            for j in 0..nbh.len() {
                let dist = distance(&nbh.candidates[i], &nbh.candidates[j]);
                if i == j || dist == 0.0 {
                    continue;
                }
                pairs += 1;
                if (nbh.q_values[i] - nbh.q_values[j]).abs() / dist > l {
                    violations += 1;
                }
            }
        }
        done += 1;
    }
    (
        violations == 0,
        format!("1000 neighborhoods, {pairs} ordered pairs, {violations} violations"),
    )
}

fn concave_neighborhood_bound() -> (bool, String) {
    let mut rng = Rng::new(4);
    let mut bad = 0;
    for _ in 0..500 {
        let n = 1 + rng.index(6);
        let spec = ActionSpaceSpec::uniform(n, 0.0, 20.0, 1.0).unwrap();
        let pert = PerturbationParams::new(1 + rng.index(3), (1 + rng.index(2)) as f64).unwrap();
        let base: Vec<f64> = (0..n).map(|_| (6 + rng.index(9)) as f64).collect();
        let c = rng.uniform_range(-50.0, 50.0);
        let q = |a: &[f64]| {
            c - a
                .iter()
                .zip(&base)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        };
        let nbh = generate_neighbors(&base, &spec, &pert).unwrap();
        let outer: Vec<&Vec<f64>> = nbh
            .candidates
            .iter()
            .filter(|a| distance(a, &base) == pert.radius())
            .collect();
        let worst = outer.iter().map(|a| q(a)).fold(f64::INFINITY, f64::min);
        if outer.len() != 2 * n || nbh.candidates.iter().any(|a| q(a) < worst) {
            bad += 1;
        }
    }
    (
        bad == 0,
        format!(
            "{} of 500 concave quadratic oracles bounded by the maximal perturbations",
            500 - bad
        ),
    )
}

fn annealing_reaches_global_best() -> (bool, String) {
    let spec = ActionSpaceSpec::uniform(2, 0.0, 10.0, 1.0).unwrap();
    let all = enumerate_action_space(&spec, 5000).unwrap();
    // decoy peak at the start, true peak far away
    let oracle = FnOracle(|_: &[f64], a: &[f64]| {
        let sq = |t: [f64; 2]| (a[0] - t[0]).powi(2) + (a[1] - t[1]).powi(2);
        5.0 * (-sq([1.0, 1.0])).exp() + 10.0 * (-sq([9.0, 9.0]) / 8.0).exp()
    });
    let target = brute_force_best(&[], &all, &oracle).unwrap();
    let pert = PerturbationParams::new(10, 1.0).unwrap();
    let params = SaParams {
        k_init_fraction: 1.0,
        cooling_fraction: 0.05,
        ..SaParams::default()
    };
    let a_hat = [-0.8, -0.8];
    let first = generate_neighbors(&discretize_base(&a_hat, &spec).unwrap(), &spec, &pert).unwrap();
    let outside = !first.candidates.contains(&target);
    let hits = (0..100)
        .filter(|&s| {
            sa_search(
                &[],
                &a_hat,
                &oracle,
                &spec,
                &pert,
                &params,
                &mut Rng::new(s),
            )
            .unwrap()
                == target
        })
        .count();
    (
        outside && hits >= 95,
        format!("argmax {target:?} outside first neighborhood: {outside}; found in {hits}/100 runs (need 95)"),
    )
}

const H: f64 = 1e-5;

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / (a.abs() + n.abs()).max(1e-4)
}

fn closest_kink(net: &Mlp, x: &[f64]) -> f64 {
    let mut act = x.to_vec();
    let mut closest = f64::INFINITY;
    let layers = net.layers();
    for l in &layers[..layers.len() - 1] {
        let z: Vec<f64> = (0..l.fan_out())
            .map(|r| {
                l.weights
                    .row(r)
                    .iter()
                    .zip(&act)
                    .map(|(w, a)| w * a)
                    .sum::<f64>()
                    + l.bias[r]
            })
            .collect();
        closest = z.iter().fold(closest, |c, v| c.min(v.abs()));
        act = z
            .iter()
            .map(|&v| net.hidden_activation().apply(v))
            .collect();
    }
    closest
}

fn param_fd(net: &Mlp, grad: &[f64], f: &dyn Fn(&Mlp) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &g) in grad.iter().enumerate() {
        let mut plus = net.clone();
        *plus.param_mut(i) += H;
        let mut minus = net.clone();
        *minus.param_mut(i) -= H;
        worst = worst.max(rel_err(g, (f(&plus) - f(&minus)) / (2.0 * H)));
    }
    worst
}

fn vec_in(rng: &mut Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.uniform_range(lo, hi)).collect()
}

fn gradients() -> (bool, String) {
    let mut rng = Rng::new(6);
    let mut worst = [0.0f64; 5];
    let mut count = 0;
    while count < 100 {
        let act = if count % 2 == 0 {
            Activation::Relu
        } else {
            Activation::Tanh
        };
        let net = Mlp::new(
            &[4, 1 + rng.index(5), 2],
            act,
            Activation::Identity,
            &mut rng,
        )
        .unwrap();
        let x = vec_in(&mut rng, 4, -2.0, 2.0);
        if act == Activation::Relu && closest_kink(&net, &x) < 1e-3 {
            continue;
        }
        let up = vec_in(&mut rng, 2, -1.0, 1.0);
        let (_, cache) = net.forward(&x).unwrap();
        let grad = net.backward(&cache, &up).unwrap().flat();
        let loss = |n: &Mlp| {
            n.predict(&x)
                .unwrap()
                .iter()
                .zip(&up)
                .map(|(o, u)| o * u)
                .sum::<f64>()
        };
        worst[0] = worst[0].max(param_fd(&net, &grad, &loss));
        count += 1;
    }
    count = 0;
    while count < 100 {
        let (p, t, d) = (
            rng.uniform_range(-10.0, 10.0),
            rng.uniform_range(-10.0, 10.0),
            rng.uniform_range(0.1, 5.0),
        );
        if ((p - t).abs() - d).abs() < 1e-3 {
            continue;
        }
        let numeric = (huber_loss_grad(p + H, t, d).0 - huber_loss_grad(p - H, t, d).0) / (2.0 * H);
        worst[1] = worst[1].max(rel_err(huber_loss_grad(p, t, d).1, numeric));
        count += 1;
    }
    for _ in 0..100 {
        let mu = vec_in(&mut rng, 3, -1.0, 1.0);
        let sigma = vec_in(&mut rng, 3, 0.1, 2.0);
        let a = vec_in(&mut rng, 3, -3.0, 3.0);
        let lp = |m: &[f64], s: &[f64]| {
            GaussianPolicyParams::new(m.to_vec(), s.to_vec())
                .unwrap()
                .log_prob_grad(&a)
                .unwrap()
                .log_prob
        };
        let g = GaussianPolicyParams::new(mu.clone(), sigma.clone())
            .unwrap()
            .log_prob_grad(&a)
            .unwrap();
        for i in 0..3 {
            let (mut mp, mut mm, mut sp, mut sm) =
                (mu.clone(), mu.clone(), sigma.clone(), sigma.clone());
            mp[i] += H;
            mm[i] -= H;
            sp[i] += H;
            sm[i] -= H;
            worst[2] = worst[2].max(rel_err(
                g.d_mu[i],
                (lp(&mp, &sigma) - lp(&mm, &sigma)) / (2.0 * H),
            ));
            worst[2] = worst[2].max(rel_err(
                g.d_sigma[i],
                (lp(&mu, &sp) - lp(&mu, &sm)) / (2.0 * H),
            ));
        }
    }
    for (slot, learned) in [(3, false), (4, true)] {
        count = 0;
        while count < 100 {
            let mode = if learned {
                SigmaMode::Learned { init: 0.5 }
            } else {
                SigmaMode::Constant(0.4)
            };
            let mut actor = GaussianActor::new(3, &[5], 2, mode, &mut rng).unwrap();
            for i in 0..actor.net().param_count() {
                *actor.net_mut().param_mut(i) += rng.uniform_range(-0.3, 0.3);
            }
            let x = vec_in(&mut rng, 3, -1.0, 1.0);
            let a = vec_in(&mut rng, 2, -1.5, 1.5);
            if closest_kink(actor.net(), &x) < 1e-3 {
                continue;
            }
            let (_, grad) = actor.log_prob_grad(&x, &a).unwrap();
            let f = |n: &Mlp| {
                let mut probe = actor.clone();
                *probe.net_mut() = n.clone();
                probe
                    .policy(&x)
                    .unwrap()
                    .log_prob_grad(&a)
                    .unwrap()
                    .log_prob
            };
            worst[slot] = worst[slot].max(param_fd(actor.net(), &grad.flat(), &f));
            count += 1;
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    (
        max < 1e-4,
        format!(
            "max relative error mlp {:.1e}, huber {:.1e}, gaussian {:.1e}, actor fixed-sigma {:.1e}, actor learned-sigma {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn knn_equivalence() -> (bool, String) {
    let mut rng = Rng::new(7);
    let mut agree = 0;
    let mut largest = 0;
    for t in 0..100u64 {
        let spec = match t % 3 {
            0 => ActionSpaceSpec::uniform(2, 0.0, 66.0, 1.0).unwrap(),
            1 => ActionSpaceSpec::uniform(3, 0.0, 12.0, 1.0).unwrap(),
            _ => ActionSpaceSpec::uniform(1 + rng.index(4), 0.0, 6.0, 1.0).unwrap(),
        };
        let all = enumerate_action_space(&spec, 5000).unwrap();
        largest = largest.max(all.len());
        let q = FnOracle(random_oracle(rng.next_u64()));
        let a_hat = vec_in(&mut rng, spec.n_dims(), -1.0, 1.0);
        let knn = knn_map(&[], &a_hat, &spec, &all, all.len(), &q).unwrap();
        agree += usize::from(knn == brute_force_best(&[], &all, &q).unwrap());
    }
    (
        agree == 100,
        format!("{agree}/100 random oracles agree, spaces up to {largest} actions"),
    )
}

fn maze_learning(tmp: &Path) -> (bool, String) {
    let cfg = load("maze-dnc.txt", &tmp.join("c8"), &[("workers", cpus())]);
    let out = run_experiment(&cfg, None).expect("maze run");
    let finals: Vec<f64> = out.seeds.iter().map(|s| s.final_eval().unwrap()).collect();
    let good = finals.iter().filter(|&&r| r >= 80.0).count();
    (
        good >= 7,
        format!(
            "{good}/10 seeds reach eval return >= 80 after {} episodes (alpha_cr {}, alpha_ac {}); finals {:?}",
            cfg.n_episodes,
            cfg.alpha_cr,
            cfg.alpha_ac,
            finals.iter().map(|r| (r * 10.0).round() / 10.0).collect::<Vec<_>>()
        ),
    )
}

/// The lowest grid point everywhere: order nothing.
struct NeverOrder(ActionSpaceSpec);

impl Mapper for NeverOrder {
    fn map(&self, _: &[f64], _: &[f64], _: &dyn QOracle, _: &mut Rng) -> CoreResult<Vec<f64>> {
        Ok((0..self.0.n_dims()).map(|i| self.0.low(i)).collect())
    }

    fn space(&self) -> &ActionSpaceSpec {
        &self.0
    }

    fn name(&self) -> &'static str {
        "never-order"
    }
}

fn inventory_ordering(tmp: &Path) -> (bool, String) {
    let overrides = [("seeds", "0..5".to_string()), ("workers", cpus())];
    let mean_final = |name: &str| {
        let cfg = load(
            &format!("inventory-{name}.txt"),
            &tmp.join(format!("c9-{name}")),
            &overrides,
        );
        let out = run_experiment(&cfg, None).expect("inventory run");
        let finals: Vec<f64> = out.seeds.iter().map(|s| s.final_eval().unwrap()).collect();
        (finals.iter().sum::<f64>() / finals.len() as f64, cfg)
    };
    let (dnc, cfg) = mean_final("dnc");
    let (minmax, _) = mean_final("minmax");

    let spec = EnvSpec::from_config(&cfg).unwrap();
    let mut env = spec.build().unwrap();
    let never = NeverOrder(env.action_space().clone());
    let agent = ActorCritic::new(
        env.as_ref(),
        &dnc_bench::experiment::train_config(&cfg),
        &mut Rng::new(0),
    )
    .unwrap();
    let never_ret = (0..5u64)
        .map(|s| eval_policy(env.as_mut(), &agent, &never, cfg.eval_episodes, s).unwrap())
        .sum::<f64>()
        / 5.0;
    let ok = dnc >= minmax - 0.01 * minmax.abs() && dnc > never_ret && minmax > never_ret;
    (
        ok,
        format!(
            "mean final eval over 5 seeds after {} episodes: dnc {dnc:.1}, minmax {minmax:.1}, never-order {never_ret:.1}",
            cfg.n_episodes
        ),
    )
}

fn peak_rss_mib() -> Option<f64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn scalability(tmp: &Path) -> (bool, String) {
    let start = Instant::now();
    let cfg = load(
        "inventory-dnc.txt",
        &tmp.join("c10"),
        &[
            ("n_items", "40".into()),
            ("seeds", "0".into()),
            ("n_episodes", "100".into()),
            ("eval_every", "100".into()),
            ("eval_episodes", "1".into()),
        ],
    );
    let out = run_experiment(&cfg, None).expect("large inventory run");
    let secs = start.elapsed().as_secs_f64();
    let episodes = out.seeds[0].episode_returns.len();
    let rss = peak_rss_mib();
    let mut codes = Vec::new();
    for method in ["vac", "knn"] {
        let status = Command::new(env!("CARGO_BIN_EXE_dnc-bench"))
            .args(["run", "--config"])
            .arg(workspace().join(format!("configs/inventory-{method}.txt")))
            .args(["--n-items", "40", "--output-dir"])
            .arg(tmp.join(format!("c10-{method}")))
            .output()
            .expect("binary runs")
            .status;
        codes.push(status.code());
    }
    let ok = episodes == 100
        && secs < 600.0
        && rss.is_none_or(|m| m < 2048.0)
        && codes == [Some(3), Some(3)];
    (
        ok,
        format!(
            "dnc finished {episodes} episodes on |A| = 67^40 in {secs:.0}s, peak RSS {}; vac/knn exit codes {:?}",
            rss.map_or("unknown".into(), |m| format!("{m:.0} MiB")),
            codes
        ),
    )
}

fn recommender_properties() -> std::result::Result<String, String> {
    let catalog = synthetic_catalog(0, 1639, 23)
        .map_err(|e| e.to_string())?
        .precompute_similarity();
    let n = catalog.len();
    if n == 0 || n > 1639 || catalog.n_features() != 23 {
        return Err(format!(
            "synthetic catalog is {}x{}",
            n,
            catalog.n_features()
        ));
    }
    if catalog.rewards() != tier_rewards(n).as_slice() {
        return Err("tier rewards differ".into());
    }
    let probs: Vec<f64> = (0..=100)
        .map(|i| pick_probability_scaled(i as f64 / 100.0, 5.0))
        .collect();
    if !probs.windows(2).all(|w| w[1] > w[0]) {
        return Err("pick probability not increasing in similarity".into());
    }
    for i in (0..catalog.len()).step_by(97) {
        let own = catalog.similarity(i, i);
        if (0..catalog.len()).any(|j| catalog.similarity(i, j) > own + 1e-12) {
            return Err(format!("item {i} is not its own most similar item"));
        }
    }
    let cfg = CatalogEnvConfig::new(1);
    let mut rng = Rng::new(11);
    let (mut picks, mut pick_ends, mut others, mut other_ends) = (0u32, 0u32, 0u32, 0u32);
    for t in 0..100_000 {
        let last = (t * 7) % catalog.len();
        let action: Vec<f64> = (0..23)
            .map(|_| (rng.uniform() * 100.0).round() / 100.0)
            .collect();
        let s =
            recommender_step(last, &action, &catalog, &cfg, &mut rng).map_err(|e| e.to_string())?;
        let expected = if s.accepted {
            catalog.rewards()[s.offered]
        } else {
            0.0
        };
        if s.reward != expected {
            return Err("reward does not follow the pick".into());
        }
        if s.accepted {
            picks += 1;
            pick_ends += u32::from(s.done);
        } else {
            others += 1;
            other_ends += u32::from(s.done);
        }
    }
    let (p, o) = (
        pick_ends as f64 / picks as f64,
        other_ends as f64 / others as f64,
    );
    if (p - 0.1).abs() > 0.01 || (o - 0.2).abs() > 0.01 {
        return Err(format!("end frequencies {p:.3}/{o:.3}"));
    }
    Ok(format!("synthetic {n}x23 catalog (1639 drawn, duplicates removed) passes recommender properties (end frequencies {p:.3}/{o:.3})"))
}

fn ingestion(tmp: &Path) -> (bool, String) {
    let movies = std::env::var_os("DNC_MOVIES_CSV")
        .map(PathBuf::from)
        .filter(|p| p.is_file());
    let fallback = recommender_properties();
    match movies {
        Some(path) => match ingest(&path, &tmp.join("c11/catalog.csv")) {
            Ok(r) if r.vocabulary == 23 && r.unique_rows == 1639 => (
                true,
                format!("{} movies -> 23 features, 1639 unique rows", r.records),
            ),
            Ok(r) => (
                fallback.is_ok(),
                format!(
                    "snapshot gives {} features and {} unique rows from {} movies; {}",
                    r.vocabulary,
                    r.unique_rows,
                    r.records,
                    fallback.unwrap_or_else(|e| format!("synthetic fallback failed: {e}"))
                ),
            ),
            Err(e) => (false, format!("ingest failed: {e:#}")),
        },
        None => (
            fallback.is_ok(),
            format!(
                "no movies.csv (set DNC_MOVIES_CSV); {}",
                fallback.unwrap_or_else(|e| format!("synthetic fallback failed: {e}"))
            ),
        ),
    }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism(tmp: &Path) -> (bool, String) {
    let runs = [
        ("maze-dnc.txt", "300", "100"),
        ("maze-vac.txt", "100", "50"),
        ("recommender-dnc.txt", "60", "20"),
        ("recommender-minmax.txt", "60", "20"),
        ("inventory-dnc.txt", "30", "10"),
        ("inventory-knn.txt", "30", "10"),
    ];
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for (config, episodes, every) in runs {
        let dirs: Vec<PathBuf> = (0..3)
            .map(|i| tmp.join(format!("c12-{config}-{i}")))
            .collect();
        for (i, dir) in dirs.iter().enumerate() {
            let workers = if i == 0 { "1" } else { "3" };
            let overrides = [
                ("seeds", "0,1,2".to_string()),
                ("n_episodes", episodes.to_string()),
                ("eval_every", every.to_string()),
                ("eval_episodes", "3".to_string()),
                ("workers", workers.to_string()),
            ];
            let cfg = if i < 2 {
                load(config, dir, &overrides)
            } else {
                // rerun from the snapshot written by the first run
                let snap = dirs[0].join("config.txt");
                ExperimentConfig::load(&snap, &[("output_dir".into(), dir.display().to_string())])
                    .unwrap()
            };
            run_experiment(&cfg, None).expect("determinism run");
        }
        let reference = csv_files(&dirs[0]);
        for dir in &dirs[1..] {
            if csv_files(dir) != reference {
                mismatched.push(config);
            }
        }
        compared += reference.len();
    }
    (
        mismatched.is_empty(),
        format!(
            "{compared} CSV files per rerun across 6 configs, byte-identical across worker counts and snapshot reruns; mismatches {mismatched:?}"
        ),
    )
}

fn main() {
    let only = std::env::var("DNC_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let tmp = tempfile::tempdir().expect("temp dir");
    let t = tmp.path();
    let mut suite = Suite {
        only,
        results: Vec::new(),
    };
    suite.run(1, mapping_exactness);
    suite.run(2, perturbation_structure);
    suite.run(3, lipschitz_certificate);
    suite.run(4, concave_neighborhood_bound);
    suite.run(5, annealing_reaches_global_best);
    suite.run(6, gradients);
    suite.run(7, knn_equivalence);
    suite.run(8, || maze_learning(t));
    suite.run(9, || inventory_ordering(t));
    suite.run(10, || scalability(t));
    suite.run(11, || ingestion(t));
    suite.run(12, || determinism(t));

    let failed: Vec<u32> = suite.results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed{}",
        suite.results.len() - failed.len(),
        suite.results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(", failed {failed:?}")
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
