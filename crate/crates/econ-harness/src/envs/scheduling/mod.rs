//! Stable-matching environment: preference generation under four score
//! models, blocking-pair enumeration, worker-proposing deferred acceptance,
//! and the Monte Carlo score denominator.

mod env;

pub use env::SchedulingEnv;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envs::Difficulty;
use crate::rng;

/// How worker and task preference orders are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenMethod {
    /// Both sides uniform random orders.
    Uniform,
    /// Uniform worker orders; one shared uniform task order.
    UniformWIdenticalT,
    /// Public scores on both sides (exponential latents).
    Correlated,
    /// Public-scores worker orders; one shared uniform task order.
    CorrelatedWIdenticalT,
}

impl GenMethod {
    pub const ALL: [GenMethod; 4] = [
        GenMethod::Uniform,
        GenMethod::UniformWIdenticalT,
        GenMethod::Correlated,
        GenMethod::CorrelatedWIdenticalT,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GenMethod::Uniform => "uniform",
            GenMethod::UniformWIdenticalT => "uniform_w_identical_t",
            GenMethod::Correlated => "correlated",
            GenMethod::CorrelatedWIdenticalT => "correlated_w_identical_t",
        }
    }
}

/// A matching environment instance: complete strict preference orders on both
/// sides, and the feedback sample size `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulingInstance {
    pub seed: u64,
    pub difficulty: Difficulty,
    pub method: GenMethod,
    pub n: usize,
    /// Blocking pairs revealed per period.
    pub k: usize,
    /// `worker_prefs[w]` lists task indices, most preferred first.
    pub worker_prefs: Vec<Vec<usize>>,
    /// `task_prefs[t]` lists worker indices, most preferred first.
    pub task_prefs: Vec<Vec<usize>>,
}

/// Difficulty presets: (n, k).
pub fn difficulty_params(difficulty: Difficulty) -> (usize, usize) {
    match difficulty {
        Difficulty::Basic => (10, 1),
        Difficulty::Medium => (20, 2),
        Difficulty::Hard => (50, 5),
    }
}

/// A worker -> task bijection, `assignment[w] = t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching(pub Vec<usize>);

impl Matching {
    /// Validate that `assignment` is a bijection on `0..n`.
    pub fn new(assignment: Vec<usize>, n: usize) -> Result<Self, String> {
        if assignment.len() != n {
            return Err(format!(
                "assignment covers {} workers, expected {n}",
                assignment.len()
            ));
        }
        let mut seen = vec![false; n];
        for &t in &assignment {
            if t >= n {
                return Err(format!("task index {t} out of range"));
            }
            if seen[t] {
                return Err(format!("task {t} assigned more than once"));
            }
            seen[t] = true;
        }
        Ok(Matching(assignment))
    }

    pub fn task_of(&self, worker: usize) -> usize {
        self.0[worker]
    }

    pub fn worker_of(&self, task: usize) -> usize {
        self.0.iter().position(|&t| t == task).expect("bijection")
    }
}

/// A worker-task pair in which both prefer each other over their match.
pub type BlockingPair = (usize, usize);

/// Generate an instance with the stated difficulty and generation method.
pub fn generate_instance(
    difficulty: Difficulty,
    method: GenMethod,
    seed: u64,
) -> SchedulingInstance {
    let (n, k) = difficulty_params(difficulty);
    generate_with_size(n, k, difficulty, method, seed)
}

/// Generation with explicit size, used by tests on tiny instances.
pub fn generate_with_size(
    n: usize,
    k: usize,
    difficulty: Difficulty,
    method: GenMethod,
    seed: u64,
) -> SchedulingInstance {
    let mut gen_rng = rng::stream(seed, "scheduling-instance");
    let (worker_prefs, task_prefs) = match method {
        GenMethod::Uniform => (
            uniform_side(&mut gen_rng, n),
            uniform_side(&mut gen_rng, n),
        ),
        GenMethod::UniformWIdenticalT => {
            let workers = uniform_side(&mut gen_rng, n);
            let shared = uniform_order(&mut gen_rng, n);
            (workers, vec![shared; n])
        }
        GenMethod::Correlated => {
            let worker_scores = public_scores(&mut gen_rng, n);
            let task_scores = public_scores(&mut gen_rng, n);
            let workers = correlated_side(&mut gen_rng, n, &task_scores);
            let tasks = correlated_side(&mut gen_rng, n, &worker_scores);
            (workers, tasks)
        }
        GenMethod::CorrelatedWIdenticalT => {
            let task_scores = public_scores(&mut gen_rng, n);
            let workers = correlated_side(&mut gen_rng, n, &task_scores);
            let shared = uniform_order(&mut gen_rng, n);
            (workers, vec![shared; n])
        }
    };
    SchedulingInstance {
        seed,
        difficulty,
        method,
        n,
        k,
        worker_prefs,
        task_prefs,
    }
}

fn uniform_order(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

fn uniform_side(rng: &mut impl Rng, n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|_| uniform_order(rng, n)).collect()
}

fn public_scores(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(1.0..3.0)).collect()
}

/// `rows` preference lists ranking the items of `scores` by ascending
/// exponential latents; the latent for item `j` has rate `scores[j]`, so
/// higher-score items sort earlier on average.
fn correlated_side(rng: &mut impl Rng, rows: usize, scores: &[f64]) -> Vec<Vec<usize>> {
    (0..rows)
        .map(|_| {
            let latents: Vec<f64> = scores.iter().map(|&b| rng::exponential(rng, b)).collect();
            let mut order: Vec<usize> = (0..scores.len()).collect();
            // Ties are measure-zero; index order breaks them deterministically.
            order.sort_by(|&a, &b| {
                latents[a]
                    .partial_cmp(&latents[b])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            order
        })
        .collect()
}

/// Rank lookup tables: `ranks[i][j]` is the position of `j` in `prefs[i]`.
pub fn rank_table(prefs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    prefs
        .iter()
        .map(|order| {
            let mut ranks = vec![0usize; order.len()];
            for (rank, &item) in order.iter().enumerate() {
                ranks[item] = rank;
            }
            ranks
        })
        .collect()
}

/// All blocking pairs of `matching`, in (worker, task) index order.
pub fn blocking_pairs(instance: &SchedulingInstance, matching: &Matching) -> Vec<BlockingPair> {
    let worker_rank = rank_table(&instance.worker_prefs);
    let task_rank = rank_table(&instance.task_prefs);
    blocking_pairs_with_ranks(instance.n, &worker_rank, &task_rank, matching)
}

fn blocking_pairs_with_ranks(
    n: usize,
    worker_rank: &[Vec<usize>],
    task_rank: &[Vec<usize>],
    matching: &Matching,
) -> Vec<BlockingPair> {
    let mut worker_of = vec![0usize; n];
    for w in 0..n {
        worker_of[matching.task_of(w)] = w;
    }
    let mut pairs = Vec::new();
    for w in 0..n {
        let matched_rank = worker_rank[w][matching.task_of(w)];
        for t in 0..n {
            if worker_rank[w][t] < matched_rank && task_rank[t][w] < task_rank[t][worker_of[t]] {
                pairs.push((w, t));
            }
        }
    }
    pairs
}

/// Count blocking pairs without materializing them.
pub fn count_blocking_pairs(
    n: usize,
    worker_rank: &[Vec<usize>],
    task_rank: &[Vec<usize>],
    assignment: &[usize],
) -> usize {
    let mut worker_of = vec![0usize; n];
    for (w, &t) in assignment.iter().enumerate() {
        worker_of[t] = w;
    }
    let mut count = 0;
    for w in 0..n {
        let matched_rank = worker_rank[w][assignment[w]];
        for t in 0..n {
            if worker_rank[w][t] < matched_rank && task_rank[t][w] < task_rank[t][worker_of[t]] {
                count += 1;
            }
        }
    }
    count
}

/// Worker-proposing deferred acceptance. The result has no blocking pairs.
pub fn gale_shapley(instance: &SchedulingInstance) -> Matching {
    let n = instance.n;
    let task_rank = rank_table(&instance.task_prefs);
    let mut next_proposal = vec![0usize; n];
    let mut task_holder: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<usize> = (0..n).rev().collect();

    while let Some(w) = free.pop() {
        let t = instance.worker_prefs[w][next_proposal[w]];
        next_proposal[w] += 1;
        match task_holder[t] {
            None => task_holder[t] = Some(w),
            Some(current) => {
                if task_rank[t][w] < task_rank[t][current] {
                    task_holder[t] = Some(w);
                    free.push(current);
                } else {
                    free.push(w);
                }
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for (t, holder) in task_holder.iter().enumerate() {
        assignment[holder.expect("perfect matching")] = t;
    }
    Matching(assignment)
}

/// Monte Carlo estimate of the expected number of blocking pairs of a uniform
/// random matching, with a bootstrap 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomBpEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

impl RandomBpEstimate {
    /// CI width relative to the mean.
    pub fn relative_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / self.mean
    }
}

pub const DENOMINATOR_SAMPLES: usize = 10_000;

/// Estimate the score denominator from `samples` random bijections drawn from
/// the instance's Monte Carlo stream.
pub fn expected_random_bp(instance: &SchedulingInstance, samples: usize) -> RandomBpEstimate {
    let mut mc_rng = rng::stream(instance.seed, "scheduling-denominator");
    let worker_rank = rank_table(&instance.worker_prefs);
    let task_rank = rank_table(&instance.task_prefs);
    let n = instance.n;

    let mut counts = Vec::with_capacity(samples);
    let mut assignment: Vec<usize> = (0..n).collect();
    for _ in 0..samples {
        assignment.shuffle(&mut mc_rng);
        counts.push(count_blocking_pairs(n, &worker_rank, &task_rank, &assignment) as u32);
    }
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / samples as f64;

    // Bootstrap the sample mean.
    const BOOTSTRAP_ROUNDS: usize = 1_000;
    let mut boot_means = Vec::with_capacity(BOOTSTRAP_ROUNDS);
    for _ in 0..BOOTSTRAP_ROUNDS {
        let mut sum = 0u64;
        for _ in 0..samples {
            sum += counts[mc_rng.gen_range(0..samples)] as u64;
        }
        boot_means.push(sum as f64 / samples as f64);
    }
    boot_means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo_idx = ((BOOTSTRAP_ROUNDS as f64) * 0.025).round() as usize;
    let hi_idx = (((BOOTSTRAP_ROUNDS as f64) * 0.975).round() as usize).min(BOOTSTRAP_ROUNDS - 1);

    RandomBpEstimate {
        mean,
        ci_low: boot_means[lo_idx],
        ci_high: boot_means[hi_idx],
        samples,
    }
}

/// Exact expected blocking pairs over all `n!` matchings; test oracle for
/// tiny instances.
pub fn exhaustive_random_bp(instance: &SchedulingInstance) -> f64 {
    let worker_rank = rank_table(&instance.worker_prefs);
    let task_rank = rank_table(&instance.task_prefs);
    let n = instance.n;
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut total = 0usize;
    let mut matchings = 0usize;
    permute(&mut assignment, 0, &mut |perm| {
        total += count_blocking_pairs(n, &worker_rank, &task_rank, perm);
        matchings += 1;
    });
    total as f64 / matchings as f64
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// Benchmark score: `1 - |BP(final)| / denominator`; may be negative. A run
/// that ended in a stable matching scores 1.
pub fn score(final_bp_count: usize, denominator: f64) -> f64 {
    1.0 - final_bp_count as f64 / denominator
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two workers, both prefer t1; both tasks prefer w1.
    fn tiny_instance() -> SchedulingInstance {
        SchedulingInstance {
            seed: 0,
            difficulty: Difficulty::Basic,
            method: GenMethod::Uniform,
            n: 2,
            k: 1,
            worker_prefs: vec![vec![0, 1], vec![0, 1]],
            task_prefs: vec![vec![0, 1], vec![0, 1]],
        }
    }

    #[test]
    fn blocking_pairs_hand_example() {
        let instance = tiny_instance();
        // w1 -> t2, w2 -> t1: (w1, t1) blocks.
        let matching = Matching::new(vec![1, 0], 2).unwrap();
        assert_eq!(blocking_pairs(&instance, &matching), vec![(0, 0)]);
    }

    #[test]
    fn top_choice_matching_has_no_blocking_pairs() {
        // Identity preferences: everyone's top choice is consistent.
        let instance = SchedulingInstance {
            seed: 0,
            difficulty: Difficulty::Basic,
            method: GenMethod::Uniform,
            n: 3,
            k: 1,
            worker_prefs: vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 0, 1]],
            task_prefs: vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 0, 1]],
        };
        let matching = Matching::new(vec![0, 1, 2], 3).unwrap();
        assert!(blocking_pairs(&instance, &matching).is_empty());
    }

    /// Definitional oracle: direct double loop over raw preference lists.
    fn oracle_blocking_pairs(inst: &SchedulingInstance, m: &Matching) -> Vec<BlockingPair> {
        let pos = |order: &[usize], item: usize| order.iter().position(|&x| x == item).unwrap();
        let mut pairs = Vec::new();
        for w in 0..inst.n {
            for t in 0..inst.n {
                let prefers_t =
                    pos(&inst.worker_prefs[w], t) < pos(&inst.worker_prefs[w], m.task_of(w));
                let prefers_w =
                    pos(&inst.task_prefs[t], w) < pos(&inst.task_prefs[t], m.worker_of(t));
                if prefers_t && prefers_w {
                    pairs.push((w, t));
                }
            }
        }
        pairs
    }

    #[test]
    fn blocking_pairs_match_definitional_oracle() {
        for seed in 0..25 {
            let instance =
                generate_with_size(4, 1, Difficulty::Basic, GenMethod::Uniform, seed);
            let mut order: Vec<usize> = (0..4).collect();
            order.rotate_left((seed % 4) as usize);
            let matching = Matching::new(order, 4).unwrap();
            assert_eq!(
                blocking_pairs(&instance, &matching),
                oracle_blocking_pairs(&instance, &matching)
            );
        }
    }

    #[test]
    fn gale_shapley_tiny() {
        let matching = gale_shapley(&tiny_instance());
        assert_eq!(matching.0, vec![0, 1]);
    }

    #[test]
    fn gale_shapley_identity_preferences() {
        let n = 5;
        let prefs: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut order: Vec<usize> = (0..n).collect();
                order.rotate_left(i);
                order
            })
            .collect();
        let instance = SchedulingInstance {
            seed: 0,
            difficulty: Difficulty::Basic,
            method: GenMethod::Uniform,
            n,
            k: 1,
            worker_prefs: prefs.clone(),
            task_prefs: prefs,
        };
        // Everyone's top choice forms the identity-shifted matching, which is
        // consistent, hence stable and worker-optimal.
        let matching = gale_shapley(&instance);
        assert!(blocking_pairs(&instance, &matching).is_empty());
    }

    #[test]
    fn gale_shapley_output_is_stable_across_methods() {
        for method in GenMethod::ALL {
            for seed in 0..250 {
                let instance = generate_instance(Difficulty::Basic, method, seed);
                let matching = gale_shapley(&instance);
                assert!(
                    blocking_pairs(&instance, &matching).is_empty(),
                    "unstable GS output: {method:?} seed {seed}"
                );
            }
        }
    }

    #[test]
    fn identical_task_variants_share_one_order() {
        for method in [GenMethod::UniformWIdenticalT, GenMethod::CorrelatedWIdenticalT] {
            let instance = generate_instance(Difficulty::Basic, method, 9);
            for prefs in &instance.task_prefs {
                assert_eq!(prefs, &instance.task_prefs[0]);
            }
        }
    }

    #[test]
    fn uniform_orders_are_complete_and_strict() {
        let instance = generate_instance(Difficulty::Basic, GenMethod::Uniform, 4);
        for prefs in instance.worker_prefs.iter().chain(&instance.task_prefs) {
            let mut sorted = prefs.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..instance.n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn correlated_scores_shift_average_rank() {
        // Tasks with larger public score b_t should appear earlier in worker
        // lists on average (Exp(b) latents shrink as b grows). With 2000
        // sampled workers, check the rank/score rank correlation is negative.
        let n = 10;
        let mut gen_rng = rng::stream(77, "correlated-oracle");
        let scores = public_scores(&mut gen_rng, n);
        let side = correlated_side(&mut gen_rng, 2000, &scores);

        let mut mean_rank = vec![0.0f64; n];
        for order in &side {
            for (rank, &task) in order.iter().enumerate() {
                mean_rank[task] += rank as f64;
            }
        }
        for rank in &mut mean_rank {
            *rank /= side.len() as f64;
        }
        let spearman = rank_correlation(&scores, &mean_rank);
        assert!(spearman < -0.8, "expected strongly negative, got {spearman}");
    }

    fn rank_correlation(a: &[f64], b: &[f64]) -> f64 {
        let rank_of = |xs: &[f64]| {
            let mut idx: Vec<usize> = (0..xs.len()).collect();
            idx.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap());
            let mut ranks = vec![0.0; xs.len()];
            for (r, &i) in idx.iter().enumerate() {
                ranks[i] = r as f64;
            }
            ranks
        };
        let (ra, rb) = (rank_of(a), rank_of(b));
        let n = a.len() as f64;
        let mean = (n - 1.0) / 2.0;
        let mut cov = 0.0;
        let mut var_a = 0.0;
        let mut var_b = 0.0;
        for i in 0..a.len() {
            cov += (ra[i] - mean) * (rb[i] - mean);
            var_a += (ra[i] - mean).powi(2);
            var_b += (rb[i] - mean).powi(2);
        }
        cov / (var_a.sqrt() * var_b.sqrt())
    }

    #[test]
    fn expected_random_bp_tiny_exact() {
        // n=2 instance above: the two matchings have 0 and 1 blocking pairs.
        let instance = tiny_instance();
        assert_eq!(exhaustive_random_bp(&instance), 0.5);
        let estimate = expected_random_bp(&instance, 4000);
        assert!((estimate.mean - 0.5).abs() < 0.05);
    }

    #[test]
    fn expected_random_bp_n1_is_zero() {
        let instance = SchedulingInstance {
            seed: 0,
            difficulty: Difficulty::Basic,
            method: GenMethod::Uniform,
            n: 1,
            k: 1,
            worker_prefs: vec![vec![0]],
            task_prefs: vec![vec![0]],
        };
        assert_eq!(exhaustive_random_bp(&instance), 0.0);
        assert_eq!(expected_random_bp(&instance, 100).mean, 0.0);
    }

    #[test]
    fn expected_random_bp_matches_exhaustive_n4() {
        let instance = generate_with_size(4, 1, Difficulty::Basic, GenMethod::Uniform, 21);
        let exact = exhaustive_random_bp(&instance);
        let estimate = expected_random_bp(&instance, DENOMINATOR_SAMPLES);
        assert!(
            estimate.ci_low <= exact && exact <= estimate.ci_high,
            "exact {exact} outside CI [{}, {}]",
            estimate.ci_low,
            estimate.ci_high
        );
    }

    #[test]
    fn score_examples() {
        assert_eq!(score(0, 25.0), 1.0);
        assert_eq!(score(25, 25.0), 0.0);
        assert_eq!(score(50, 25.0), -1.0);
    }
}
