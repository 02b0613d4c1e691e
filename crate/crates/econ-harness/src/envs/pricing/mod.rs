//! Non-stationary multi-product pricing under nested logit demand.
//!
//! Products sit in categories with within-category substitution sigma; price
//! sensitivities alpha_i(t) drift over the horizon on a linear or sinusoidal
//! schedule the agent must learn. Per-period optimal prices normalize the
//! benchmark score.

mod env;

pub use env::PricingEnv;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envs::Difficulty;
use crate::numeric::golden_section_max_adaptive;
use crate::rng;

/// Horizon length the alpha schedules are defined over.
pub const HORIZON: usize = 100;
/// Within-category substitution parameter.
pub const SIGMA: f64 = 0.5;
/// Overall market scale.
pub const MARKET_SIZE: f64 = 100.0;
/// Quality of the outside option.
pub const OUTSIDE_QUALITY: f64 = 0.0;

/// How price sensitivities move over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    Linear,
    Periodic,
}

/// Per-product alpha schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftSchedule {
    /// alpha_i(t) = alpha_init_i + delta_i * t; deltas are bounded so alpha
    /// stays within [alpha_init/2, 3*alpha_init/2] over the horizon.
    Linear { alpha_init: Vec<f64>, delta: Vec<f64> },
    /// alpha_i(t) = alpha_init_i + amplitude_i * sin(2*pi*t/frequency + phase),
    /// frequency and phase shared across products.
    Periodic {
        alpha_init: Vec<f64>,
        amplitude: Vec<f64>,
        frequency: u32,
        phase: f64,
    },
}

impl ShiftSchedule {
    pub fn kind(&self) -> ShiftKind {
        match self {
            ShiftSchedule::Linear { .. } => ShiftKind::Linear,
            ShiftSchedule::Periodic { .. } => ShiftKind::Periodic,
        }
    }

    pub fn alpha(&self, product: usize, t: usize) -> f64 {
        match self {
            ShiftSchedule::Linear { alpha_init, delta } => {
                alpha_init[product] + delta[product] * t as f64
            }
            ShiftSchedule::Periodic {
                alpha_init,
                amplitude,
                frequency,
                phase,
            } => {
                alpha_init[product]
                    + amplitude[product]
                        * (2.0 * std::f64::consts::PI * t as f64 / *frequency as f64 + phase).sin()
            }
        }
    }
}

/// A generated pricing world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingInstance {
    pub seed: u64,
    pub difficulty: Difficulty,
    pub n: usize,
    /// Product -> category, labels consecutive from 0.
    pub category: Vec<usize>,
    pub quality: Vec<f64>,
    pub cost: Vec<f64>,
    pub sigma: f64,
    pub market_size: f64,
    pub outside_quality: f64,
    pub shift: ShiftSchedule,
}

impl PricingInstance {
    pub fn num_categories(&self) -> usize {
        self.category.iter().copied().max().map_or(0, |c| c + 1)
    }

    pub fn alpha(&self, product: usize, t: usize) -> f64 {
        self.shift.alpha(product, t)
    }

    pub fn product_name(&self, product: usize) -> String {
        format!("Product_{}", product + 1)
    }
}

/// Quantities and profits realized by one price vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandOutcome {
    pub prices: Vec<f64>,
    pub quantities: Vec<f64>,
    pub profits: Vec<f64>,
    pub total_profit: f64,
}

pub fn difficulty_products(difficulty: Difficulty) -> usize {
    match difficulty {
        Difficulty::Basic => 1,
        Difficulty::Medium => 4,
        Difficulty::Hard => 10,
    }
}

/// Generate an instance; the shift kind is part of the instance identity.
pub fn generate_instance(difficulty: Difficulty, kind: ShiftKind, seed: u64) -> PricingInstance {
    let mut gen_rng = rng::stream(seed, "pricing-instance");
    let n = difficulty_products(difficulty);

    // Category membership: geometric right-truncated at min(n, 5), relabeled
    // to consecutive ids by first appearance.
    let bound = n.min(5) as u64;
    let mut raw = Vec::with_capacity(n);
    for _ in 0..n {
        let draw = loop {
            let l = rng::geometric(&mut gen_rng, 0.2);
            if l <= bound {
                break l;
            }
        };
        raw.push(draw);
    }
    let mut label_of = std::collections::HashMap::new();
    let mut category = Vec::with_capacity(n);
    for draw in raw {
        let next = label_of.len();
        let label = *label_of.entry(draw).or_insert(next);
        category.push(label);
    }

    let quality: Vec<f64> = (0..n).map(|_| gen_rng.gen_range(2.0..3.0)).collect();
    let cost: Vec<f64> = (0..n).map(|_| gen_rng.gen_range(1.0..10.0)).collect();
    let alpha_init: Vec<f64> = (0..n).map(|_| gen_rng.gen_range(1.0..10.0)).collect();

    let shift = match kind {
        ShiftKind::Linear => {
            let delta: Vec<f64> = alpha_init
                .iter()
                .map(|&a| {
                    let half_step = a / (2.0 * HORIZON as f64);
                    gen_rng.gen_range(-half_step..half_step)
                })
                .collect();
            ShiftSchedule::Linear { alpha_init, delta }
        }
        ShiftKind::Periodic => {
            let frequency = gen_rng.gen_range(10..=20);
            let amplitude: Vec<f64> = alpha_init
                .iter()
                .map(|&a| gen_rng.gen_range(a / 4.0..a / 2.0))
                .collect();
            let phase = gen_rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            ShiftSchedule::Periodic {
                alpha_init,
                amplitude,
                frequency,
                phase,
            }
        }
    };

    PricingInstance {
        seed,
        difficulty,
        n,
        category,
        quality,
        cost,
        sigma: SIGMA,
        market_size: MARKET_SIZE,
        outside_quality: OUTSIDE_QUALITY,
        shift,
    }
}

/// Nested logit demand at period `t`.
///
/// For product i in category j:
/// q_i = M * (e^{u_i} / D_j) * D_j^{1-sigma} / (e^{a0/(1-sigma)} + sum_j' D_j'^{1-sigma})
/// with u_g = (a_g - p_g/alpha_g(t)) / (1-sigma) and D_j = sum_{g in j} e^{u_g}.
pub fn demand(instance: &PricingInstance, prices: &[f64], t: usize) -> Result<Vec<f64>, String> {
    assert_eq!(prices.len(), instance.n);
    assert!(t < HORIZON, "period {t} outside the {HORIZON}-period horizon");
    let one_minus_sigma = 1.0 - instance.sigma;
    let k = instance.num_categories();

    let mut exps = Vec::with_capacity(instance.n);
    for i in 0..instance.n {
        let alpha = instance.alpha(i, t);
        let u = (instance.quality[i] - prices[i] / alpha) / one_minus_sigma;
        let e = u.exp();
        if !e.is_finite() {
            return Err("price out of numeric range".to_string());
        }
        exps.push(e);
    }

    let mut cat_sums = vec![0.0f64; k];
    for i in 0..instance.n {
        cat_sums[instance.category[i]] += exps[i];
    }
    let outside = (instance.outside_quality / one_minus_sigma).exp();
    let total: f64 = outside
        + cat_sums
            .iter()
            .map(|&d| d.powf(one_minus_sigma))
            .sum::<f64>();
    if !total.is_finite() {
        return Err("price out of numeric range".to_string());
    }

    Ok((0..instance.n)
        .map(|i| {
            let d = cat_sums[instance.category[i]];
            if d <= 0.0 {
                0.0
            } else {
                instance.market_size * (exps[i] / d) * d.powf(one_minus_sigma) / total
            }
        })
        .collect())
}

/// Mass choosing the outside option; quantities plus this sum to the market size.
pub fn outside_mass(instance: &PricingInstance, prices: &[f64], t: usize) -> Result<f64, String> {
    let quantities = demand(instance, prices, t)?;
    Ok(instance.market_size - quantities.iter().sum::<f64>())
}

/// Demand plus per-product profits pi_i = (p_i/alpha_i - c_i) * q_i.
pub fn profit(instance: &PricingInstance, prices: &[f64], t: usize) -> Result<DemandOutcome, String> {
    let quantities = demand(instance, prices, t)?;
    let profits: Vec<f64> = (0..instance.n)
        .map(|i| (prices[i] / instance.alpha(i, t) - instance.cost[i]) * quantities[i])
        .collect();
    let total_profit = profits.iter().sum();
    Ok(DemandOutcome {
        prices: prices.to_vec(),
        quantities,
        profits,
        total_profit,
    })
}

fn total_profit_unchecked(instance: &PricingInstance, prices: &[f64], t: usize) -> f64 {
    match profit(instance, prices, t) {
        Ok(outcome) => outcome.total_profit,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Per-period profit maximum and its witness prices.
///
/// Multi-start cyclic coordinate ascent; each coordinate step is a
/// golden-section line search on an adaptively widened bracket above marginal
/// cost. A coarse per-coordinate grid pass afterwards guards against a start
/// landing on a poor basin.
pub fn optimal_prices(instance: &PricingInstance, t: usize) -> (Vec<f64>, f64) {
    const START_MARGINS: [f64; 8] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &margin in &START_MARGINS {
        let start: Vec<f64> = (0..instance.n)
            .map(|i| instance.alpha(i, t) * (instance.cost[i] + margin))
            .collect();
        let (prices, value) = coordinate_ascent(instance, t, start);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((prices, value));
        }
    }
    let (mut prices, mut value) = best.expect("at least one start");

    // Verification pass: coarse grid per coordinate, refined by ascent when
    // it finds an improvement.
    for _ in 0..4 {
        let mut improved = false;
        for i in 0..instance.n {
            let alpha = instance.alpha(i, t);
            let lo = alpha * instance.cost[i];
            let hi = alpha * (instance.cost[i] + 16.0);
            let mut trial = prices.clone();
            for step in 0..=400 {
                trial[i] = lo + (hi - lo) * step as f64 / 400.0;
                let v = total_profit_unchecked(instance, &trial, t);
                if v > value * (1.0 + 1e-9) + 1e-12 {
                    let (p2, v2) = coordinate_ascent(instance, t, trial.clone());
                    if v2 > value {
                        prices = p2;
                        value = v2;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    (prices, value)
}

fn coordinate_ascent(
    instance: &PricingInstance,
    t: usize,
    mut prices: Vec<f64>,
) -> (Vec<f64>, f64) {
    let mut value = total_profit_unchecked(instance, &prices, t);
    for _sweep in 0..200 {
        let before = value;
        for i in 0..instance.n {
            let alpha = instance.alpha(i, t);
            let lo = alpha * instance.cost[i];
            let hi = alpha * (instance.cost[i] + 16.0);
            let (x, fx) = golden_section_max_adaptive(
                |p| {
                    let mut trial = prices.clone();
                    trial[i] = p;
                    total_profit_unchecked(instance, &trial, t)
                },
                lo,
                hi,
                90,
                8,
            );
            if fx > value {
                prices[i] = x;
                value = fx;
            }
        }
        // No coordinate improved by more than 1e-9 relative: converged.
        if value - before <= 1e-9 * value.abs().max(1e-12) {
            break;
        }
    }
    (prices, value)
}

/// Benchmark score: profit earned over the final 50 periods divided by the
/// optimal profit over the same periods, clamped below at zero.
pub fn score_from_profits(profits_by_period: &[f64], optimal_by_period: &[f64]) -> f64 {
    assert_eq!(profits_by_period.len(), HORIZON);
    assert_eq!(optimal_by_period.len(), HORIZON);
    let earned: f64 = profits_by_period[50..].iter().sum();
    let optimal: f64 = optimal_by_period[50..].iter().sum();
    (earned / optimal).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_product_instance(alpha: f64, quality: f64, cost: f64) -> PricingInstance {
        PricingInstance {
            seed: 0,
            difficulty: Difficulty::Basic,
            n: 1,
            category: vec![0],
            quality: vec![quality],
            cost: vec![cost],
            sigma: SIGMA,
            market_size: MARKET_SIZE,
            outside_quality: OUTSIDE_QUALITY,
            shift: ShiftSchedule::Linear {
                alpha_init: vec![alpha],
                delta: vec![0.0],
            },
        }
    }

    #[test]
    fn closed_form_at_zero_utility() {
        // a=2, alpha=1, p=2: u=0, D=1, q = M * 1 * 1/(1+1) = 50.
        let instance = single_product_instance(1.0, 2.0, 1.0);
        let q = demand(&instance, &[2.0], 0).unwrap();
        assert!((q[0] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn demand_vanishes_at_extreme_price() {
        let instance = single_product_instance(1.0, 2.0, 1.0);
        let q = demand(&instance, &[1e6], 0).unwrap();
        assert!(q[0] < 1e-12);
    }

    #[test]
    fn profit_closed_form() {
        // p=2, alpha=1, c=1, q=50 -> profit 50.
        let instance = single_product_instance(1.0, 2.0, 1.0);
        let outcome = profit(&instance, &[2.0], 0).unwrap();
        assert!((outcome.total_profit - 50.0).abs() < 1e-12);

        // Pricing at marginal cost earns nothing.
        let at_cost = profit(&instance, &[1.0], 0).unwrap();
        assert!(at_cost.total_profit.abs() < 1e-12);
    }

    #[test]
    fn choice_mass_normalizes_to_market_size() {
        let instance = generate_instance(Difficulty::Medium, ShiftKind::Linear, 5);
        let prices: Vec<f64> = (0..instance.n).map(|i| 3.0 + i as f64).collect();
        for t in [0, 17, 99] {
            let q = demand(&instance, &prices, t).unwrap();
            let outside = outside_mass(&instance, &prices, t).unwrap();
            let total = q.iter().sum::<f64>() + outside;
            assert!((total - MARKET_SIZE).abs() < 1e-9, "t={t}: {total}");
            assert!(q.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn profit_matches_hand_formula_on_random_case() {
        let instance = generate_instance(Difficulty::Medium, ShiftKind::Periodic, 8);
        let prices = vec![7.0, 9.0, 11.0, 13.0];
        let t = 31;
        let outcome = profit(&instance, &prices, t).unwrap();
        let q = demand(&instance, &prices, t).unwrap();
        for i in 0..instance.n {
            let expected = (prices[i] / instance.alpha(i, t) - instance.cost[i]) * q[i];
            assert!((outcome.profits[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_price_is_an_error() {
        let instance = single_product_instance(1.0, 2.0, 1.0);
        assert!(demand(&instance, &[-1e9], 0).is_err());
    }

    #[test]
    fn alpha_schedules_stay_within_bounds() {
        for (kind, seed) in [(ShiftKind::Linear, 3u64), (ShiftKind::Periodic, 4u64)] {
            let instance = generate_instance(Difficulty::Hard, kind, seed);
            let init: Vec<f64> = match &instance.shift {
                ShiftSchedule::Linear { alpha_init, .. } => alpha_init.clone(),
                ShiftSchedule::Periodic { alpha_init, .. } => alpha_init.clone(),
            };
            for t in 0..HORIZON {
                for i in 0..instance.n {
                    let a = instance.alpha(i, t);
                    assert!(a > 0.0);
                    assert!(a >= init[i] / 2.0 - 1e-12 && a <= 1.5 * init[i] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn categories_are_consecutive_and_bounded() {
        let instance = generate_instance(Difficulty::Hard, ShiftKind::Linear, 9);
        let k = instance.num_categories();
        assert!(k >= 1 && k <= 5);
        for c in 0..k {
            assert!(instance.category.contains(&c), "label {c} skipped");
        }
    }

    #[test]
    fn optimal_price_scales_with_alpha() {
        // Prices enter only through p/alpha, so scaling alpha scales the
        // argmax and leaves the optimal profit unchanged.
        let base = single_product_instance(1.0, 2.5, 2.0);
        let scaled = single_product_instance(3.0, 2.5, 2.0);
        let (p1, v1) = optimal_prices(&base, 0);
        let (p3, v3) = optimal_prices(&scaled, 0);
        assert!((p3[0] / p1[0] - 3.0).abs() < 1e-5, "{} vs {}", p3[0], p1[0]);
        assert!((v1 - v3).abs() < 1e-7 * v1.abs());
    }

    #[test]
    fn symmetric_products_get_symmetric_prices() {
        let instance = PricingInstance {
            seed: 0,
            difficulty: Difficulty::Medium,
            n: 2,
            category: vec![0, 0],
            quality: vec![2.5, 2.5],
            cost: vec![3.0, 3.0],
            sigma: SIGMA,
            market_size: MARKET_SIZE,
            outside_quality: OUTSIDE_QUALITY,
            shift: ShiftSchedule::Linear {
                alpha_init: vec![2.0, 2.0],
                delta: vec![0.0, 0.0],
            },
        };
        let (prices, _) = optimal_prices(&instance, 0);
        assert!((prices[0] - prices[1]).abs() < 1e-5);
    }

    #[test]
    fn single_product_optimum_matches_fine_grid() {
        let instance = single_product_instance(1.7, 2.2, 4.0);
        let (p_star, v_star) = optimal_prices(&instance, 0);
        // Grid oracle at 1e-4 resolution in price.
        let lo = instance.alpha(0, 0) * instance.cost[0];
        let hi = instance.alpha(0, 0) * (instance.cost[0] + 8.0);
        let mut best = (0.0, f64::NEG_INFINITY);
        let steps = ((hi - lo) / 1e-4).ceil() as usize;
        for s in 0..=steps {
            let p = lo + s as f64 * 1e-4;
            let v = total_profit_unchecked(&instance, &[p], 0);
            if v > best.1 {
                best = (p, v);
            }
        }
        assert!((p_star[0] - best.0).abs() < 1e-3);
        assert!((v_star - best.1).abs() <= 1e-6 * best.1);
    }

    #[test]
    fn demand_decreases_in_own_price() {
        let instance = generate_instance(Difficulty::Medium, ShiftKind::Linear, 13);
        let base: Vec<f64> = (0..instance.n)
            .map(|i| instance.alpha(i, 10) * (instance.cost[i] + 1.0))
            .collect();
        for i in 0..instance.n {
            let q0 = demand(&instance, &base, 10).unwrap()[i];
            let mut bumped = base.clone();
            bumped[i] += 1e-4;
            let q1 = demand(&instance, &bumped, 10).unwrap()[i];
            assert!(q1 < q0, "own-price response not negative for product {i}");
        }
    }
}
