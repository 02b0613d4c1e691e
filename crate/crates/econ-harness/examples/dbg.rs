// scratch debug — not part of the crate
use econ_harness::envs::procurement::*;
use econ_harness::envs::Difficulty;
use std::time::Instant;

fn main() {
    for difficulty in [Difficulty::Basic, Difficulty::Medium] {
        let mut worst = 0.0f64;
        let mut total = 0.0f64;
        let mut inexact = 0;
        let n_seeds = if difficulty == Difficulty::Basic { 30 } else { 8 };
        for seed in 0..n_seeds {
            let instance = generate_instance(difficulty, seed);
            let t0 = Instant::now();
            let r = solve_opt(&instance, DEFAULT_TIME_LIMIT);
            let dt = t0.elapsed().as_secs_f64();
            if !r.exact { inexact += 1; }
            worst = worst.max(dt);
            total += dt;
            if dt > 2.0 { println!("  slow seed {seed}: {dt:.2}s nodes {} budget {:.1}", r.nodes, instance.budget); }
        }
        println!("{difficulty:?}: {n_seeds} seeds, worst {worst:.3}s, mean {:.3}s, inexact {inexact}", total / n_seeds as f64);
    }
}
