//! Exact optimum solver for procurement instances.
//!
//! Maximizing the geometric-mean production function is equivalent to
//! maximizing the sum of log category sums, which is concave in the purchase
//! quantities. Branch and bound over per-deal quantities uses two bounds:
//!
//! * a cheap per-category bound (each category granted the whole remaining
//!   budget at the best remaining effectiveness-per-dollar rate), and
//! * a certified bound on the continuous relaxation from Frank-Wolfe
//!   iterations over the budget simplex; the duality gap at any iterate gives
//!   a valid upper bound, so no convergence assumption is needed.
//!
//! Upfront costs and minimum order quantities are dropped in the relaxation
//! (both only shrink the feasible set). Dominated deals (another simple deal
//! offers at least as much effectiveness in every category for at most the
//! same price) are fixed to zero up front.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{plan_cost, plan_workers, ProcurementInstance, PurchasePlan};

/// Wall-clock budget for the search; generous for Basic and Medium.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

/// Solver output: optimum value and witness, with an exactness flag that is
/// false when the search was cut off by the time limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub value: f64,
    pub plan: PurchasePlan,
    pub exact: bool,
    pub nodes: u64,
}

struct SearchCtx<'a> {
    instance: &'a ProcurementInstance,
    order: Vec<usize>,
    weights: Vec<Vec<f64>>,
    prices: Vec<f64>,
    upfronts: Vec<f64>,
    min_buys: Vec<u64>,
    /// `rates[d][i]`: effectiveness per dollar of deal d in category i.
    rates: Vec<Vec<f64>>,
    /// `rate_suffix[pos][i]`: best per-dollar rate for category `i` among
    /// deals at order positions >= pos.
    rate_suffix: Vec<Vec<f64>>,
    deadline: Instant,
    nodes: u64,
    expired: bool,
    best_value: f64,
    best_plan: Vec<u64>,
    quantities: Vec<u64>,
    // Frank-Wolfe scratch buffers, reused across nodes.
    fw_alloc: Vec<f64>,
    fw_sums: Vec<f64>,
}

/// Solve for the optimal purchase plan within the budget.
pub fn solve_opt(instance: &ProcurementInstance, time_limit: Duration) -> OptResult {
    let k = instance.k;
    let m = instance.menu.len();
    let weights: Vec<Vec<f64>> = instance
        .menu
        .iter()
        .map(|deal| instance.deal_category_weights(deal))
        .collect();
    let prices: Vec<f64> = instance.menu.iter().map(|d| d.unit_price).collect();
    let upfronts: Vec<f64> = instance
        .menu
        .iter()
        .map(|d| d.upfront_cost.unwrap_or(0.0))
        .collect();
    let min_buys: Vec<u64> = instance
        .menu
        .iter()
        .map(|d| d.min_qty.map(u64::from).unwrap_or(1))
        .collect();

    let dominated = dominance_mask(instance, &weights, &prices);
    let mut order: Vec<usize> = (0..m).filter(|&d| !dominated[d]).collect();
    // Branch on the most cost-effective deals first.
    order.sort_by(|&a, &b| {
        let score = |d: usize| weights[d].iter().sum::<f64>() / prices[d];
        score(b).partial_cmp(&score(a)).unwrap().then(a.cmp(&b))
    });

    let mut rate_suffix = vec![vec![0.0f64; k]; order.len() + 1];
    for pos in (0..order.len()).rev() {
        let d = order[pos];
        for i in 0..k {
            rate_suffix[pos][i] = rate_suffix[pos + 1][i].max(weights[d][i] / prices[d]);
        }
    }

    let rates: Vec<Vec<f64>> = (0..m)
        .map(|d| weights[d].iter().map(|w| w / prices[d]).collect())
        .collect();
    let mut ctx = SearchCtx {
        instance,
        order,
        weights,
        prices,
        upfronts,
        min_buys,
        rates,
        rate_suffix,
        deadline: Instant::now() + time_limit,
        nodes: 0,
        expired: false,
        best_value: 0.0,
        best_plan: vec![0; m],
        quantities: vec![0; m],
        fw_alloc: vec![0.0; m],
        fw_sums: vec![0.0; k],
    };

    // Seed the incumbent with the budget witness and a greedy fill.
    ctx.try_incumbent_plan(&instance.budget_witness);
    let greedy = greedy_plan(instance, &ctx.weights, &ctx.prices, &ctx.upfronts, &ctx.min_buys);
    ctx.try_incumbent_plan(&greedy);

    let mut sums = vec![0.0f64; k];
    ctx.search(0, instance.budget, &mut sums);

    let plan = PurchasePlan {
        quantities: ctx
            .best_plan
            .iter()
            .enumerate()
            .filter(|&(_, &q)| q > 0)
            .map(|(d, &q)| (d, q))
            .collect(),
    }
    .canonical();
    OptResult {
        value: ctx.best_value,
        plan,
        exact: !ctx.expired,
        nodes: ctx.nodes,
    }
}

impl SearchCtx<'_> {
    fn try_incumbent_plan(&mut self, plan: &PurchasePlan) {
        if let Ok(cost) = plan_cost(self.instance, plan) {
            if cost <= self.instance.budget {
                let value = plan_workers(self.instance, plan);
                if value > self.best_value {
                    self.best_value = value;
                    self.best_plan = vec![0; self.instance.menu.len()];
                    for &(d, q) in &plan.quantities {
                        self.best_plan[d] = q;
                    }
                }
            }
        }
    }

    fn record_current(&mut self, sums: &[f64]) {
        let value = super::workers_from_category_sums(sums);
        if value > self.best_value {
            // Revalidate against the canonical cost path before accepting.
            let plan = PurchasePlan {
                quantities: self
                    .quantities
                    .iter()
                    .enumerate()
                    .filter(|&(_, &q)| q > 0)
                    .map(|(d, &q)| (d, q))
                    .collect(),
            };
            if plan_cost(self.instance, &plan).is_ok_and(|c| c <= self.instance.budget) {
                self.best_value = value;
                self.best_plan = self.quantities.clone();
            }
        }
    }

    fn search(&mut self, pos: usize, budget_left: f64, sums: &mut Vec<f64>) {
        self.nodes += 1;
        if self.expired {
            return;
        }
        if self.nodes % 1024 == 0 && Instant::now() >= self.deadline {
            self.expired = true;
            return;
        }
        self.record_current(sums);
        if pos == self.order.len() {
            return;
        }

        // Subtree bound: certified Frank-Wolfe bound on the relaxation.
        let bound = self.fw_bound(sums, pos, budget_left, 48);
        if !beats_incumbent(bound, self.best_value) {
            return;
        }

        let deal = self.order[pos];
        let price = self.prices[deal];
        let upfront = self.upfronts[deal];
        let min_buy = self.min_buys[deal];
        let max_qty = if budget_left >= upfront + price * min_buy as f64 {
            ((budget_left - upfront) / price).floor() as u64
        } else {
            0
        };

        let k = sums.len();
        for qty in (min_buy..=max_qty).rev() {
            // Cheap per-child bound: every category granted the entire
            // remaining budget at the best remaining rate.
            let child_budget = budget_left - upfront - price * qty as f64;
            let mut quick = 0.0;
            let mut positive = true;
            for i in 0..k {
                let s = sums[i]
                    + self.weights[deal][i] * qty as f64
                    + self.rate_suffix[pos + 1][i] * child_budget;
                if s <= 0.0 {
                    positive = false;
                    break;
                }
                quick += s.ln();
            }
            if positive && beats_incumbent((quick / k as f64).exp(), self.best_value) {
                for i in 0..k {
                    sums[i] += self.weights[deal][i] * qty as f64;
                }
                self.quantities[deal] = qty;
                self.search(pos + 1, child_budget, sums);
                self.quantities[deal] = 0;
                for i in 0..k {
                    sums[i] -= self.weights[deal][i] * qty as f64;
                }
                if self.expired {
                    return;
                }
            }
        }
        // qty = 0 branch.
        self.search(pos + 1, budget_left, sums);
    }
}

/// Prune unless the (slightly inflated) bound strictly exceeds the incumbent.
/// The inflation absorbs float error in the bound itself so the true optimum
/// is never pruned.
fn beats_incumbent(bound: f64, incumbent: f64) -> bool {
    bound * (1.0 + 1e-9) + 1e-12 > incumbent
}

fn dominance_mask(
    instance: &ProcurementInstance,
    weights: &[Vec<f64>],
    prices: &[f64],
) -> Vec<bool> {
    let m = instance.menu.len();
    let simple = |d: usize| {
        instance.menu[d].min_qty.is_none() && instance.menu[d].upfront_cost.is_none()
    };
    let mut dominated = vec![false; m];
    for d in 0..m {
        'outer: for other in 0..m {
            if other == d || !simple(other) || prices[other] > prices[d] {
                continue;
            }
            let mut strictly_better = prices[other] < prices[d];
            for i in 0..instance.k {
                if weights[other][i] < weights[d][i] {
                    continue 'outer;
                }
                if weights[other][i] > weights[d][i] {
                    strictly_better = true;
                }
            }
            if strictly_better || !simple(d) || other < d {
                dominated[d] = true;
                break;
            }
        }
    }
    dominated
}

impl SearchCtx<'_> {
    /// Upper bound on achievable workers for the subtree rooted at `pos`:
    /// maximize sum_i ln(s0_i + sum_d v_{d,i} b_d) over the budget simplex,
    /// where b_d is the (continuous) budget allocated to free deal d and v
    /// its per-dollar effectiveness rates. Upfronts and minimum quantities
    /// are relaxed away, which only enlarges the feasible set.
    ///
    /// Returns the best certified bound seen across Frank-Wolfe iterates
    /// (objective value plus duality gap), valid at any iteration count.
    fn fw_bound(&mut self, s0: &[f64], pos: usize, budget: f64, iters: usize) -> f64 {
        let k = s0.len();
        let free = &self.order[pos..];
        // Categories that can never become positive cap the whole subtree at 0.
        for i in 0..k {
            if s0[i] <= 0.0 && self.rate_suffix[pos][i] <= 0.0 {
                return 0.0;
            }
        }
        if free.is_empty() || budget <= 0.0 {
            return super::workers_from_category_sums(s0);
        }

        let nf = free.len();
        let b = &mut self.fw_alloc[..nf];
        b.fill(budget / nf as f64);
        let s = &mut self.fw_sums[..k];
        let mut best_bound = f64::INFINITY;

        for iter in 0..iters {
            s.copy_from_slice(s0);
            for (&d, bd) in free.iter().zip(b.iter()) {
                for (i, r) in self.rates[d].iter().enumerate() {
                    s[i] += r * bd;
                }
            }
            let mut objective = 0.0;
            for &si in s.iter() {
                if si <= 0.0 {
                    // The iterate left the domain; certify nothing from it.
                    return if best_bound.is_finite() {
                        (best_bound / k as f64).exp()
                    } else {
                        f64::INFINITY
                    };
                }
                objective += si.ln();
            }
            let mut best_dir = 0usize;
            let mut best_grad = f64::NEG_INFINITY;
            let mut inner = 0.0;
            for (idx, &d) in free.iter().enumerate() {
                let mut g = 0.0;
                for (i, r) in self.rates[d].iter().enumerate() {
                    g += r / s[i];
                }
                inner += g * b[idx];
                if g > best_grad {
                    best_grad = g;
                    best_dir = idx;
                }
            }
            let gap = budget * best_grad - inner;
            best_bound = best_bound.min(objective + gap.max(0.0));
            if !beats_incumbent((best_bound / k as f64).exp(), self.best_value) {
                break;
            }

            // Capped step keeps every allocation strictly positive, so the
            // log objective never leaves its domain.
            let step = (2.0 / (iter as f64 + 2.0)).min(0.5);
            for (idx, bd) in b.iter_mut().enumerate() {
                *bd *= 1.0 - step;
                if idx == best_dir {
                    *bd += step * budget;
                }
            }
        }
        (best_bound / k as f64).exp()
    }
}

/// Greedy incumbent: cover all categories, then repeatedly add the copy with
/// the best marginal value per dollar.
fn greedy_plan(
    instance: &ProcurementInstance,
    weights: &[Vec<f64>],
    prices: &[f64],
    upfronts: &[f64],
    min_buys: &[u64],
) -> PurchasePlan {
    let m = instance.menu.len();
    let k = instance.k;
    let mut quantities = vec![0u64; m];
    let mut sums = vec![0.0f64; k];
    let mut spent = 0.0;

    loop {
        let covered = sums.iter().filter(|&&s| s > 0.0).count();
        let value = super::workers_from_category_sums(&sums);
        let mut best: Option<(usize, u64, usize, f64)> = None; // (deal, step, cover, gain/dollar)
        for d in 0..m {
            let step = if quantities[d] == 0 { min_buys[d] } else { 1 };
            let add_cost = if quantities[d] == 0 { upfronts[d] } else { 0.0 }
                + prices[d] * step as f64;
            if spent + add_cost > instance.budget {
                continue;
            }
            let mut new_cover = 0;
            let mut new_value = 0.0;
            let mut positive = true;
            for i in 0..k {
                let s = sums[i] + weights[d][i] * step as f64;
                if s > 0.0 {
                    new_cover += 1;
                    new_value += s.ln();
                } else {
                    positive = false;
                }
            }
            let new_value = if positive {
                (new_value / k as f64).exp()
            } else {
                0.0
            };
            let gain = (new_value - value) / add_cost;
            let better = match best {
                None => new_cover > covered || gain > 0.0,
                Some((_, _, bc, bg)) => {
                    (new_cover, gain).partial_cmp(&(bc, bg)) == Some(std::cmp::Ordering::Greater)
                }
            };
            if better {
                best = Some((d, step, new_cover, gain));
            }
        }
        match best {
            Some((d, step, new_cover, gain)) if new_cover > covered || gain > 0.0 => {
                let add_cost = if quantities[d] == 0 { upfronts[d] } else { 0.0 }
                    + prices[d] * step as f64;
                spent += add_cost;
                quantities[d] += step;
                for i in 0..k {
                    sums[i] += weights[d][i] * step as f64;
                }
            }
            _ => break,
        }
    }

    PurchasePlan {
        quantities: quantities
            .iter()
            .enumerate()
            .filter(|&(_, &q)| q > 0)
            .map(|(d, &q)| (d, q))
            .collect(),
    }
}

/// Exhaustive enumeration oracle for micro instances. Independent of the
/// branch-and-bound path: walks every feasible quantity vector and evaluates
/// plans through the public cost and production functions.
pub fn brute_force_opt(instance: &ProcurementInstance) -> OptResult {
    let mut best_value = 0.0f64;
    let mut best: Vec<(usize, u64)> = Vec::new();
    let mut quantities: Vec<(usize, u64)> = Vec::new();
    let mut visited = 0u64;

    fn recurse(
        instance: &ProcurementInstance,
        deal: usize,
        quantities: &mut Vec<(usize, u64)>,
        best_value: &mut f64,
        best: &mut Vec<(usize, u64)>,
        visited: &mut u64,
    ) {
        if deal == instance.menu.len() {
            *visited += 1;
            let plan = PurchasePlan {
                quantities: quantities.clone(),
            };
            match plan_cost(instance, &plan) {
                Ok(cost) if cost <= instance.budget => {
                    let value = plan_workers(instance, &plan);
                    if value > *best_value {
                        *best_value = value;
                        *best = quantities.clone();
                    }
                }
                _ => {}
            }
            return;
        }
        let d = &instance.menu[deal];
        let cap = ((instance.budget - d.upfront_cost.unwrap_or(0.0)) / d.unit_price).floor();
        let cap = if cap.is_sign_negative() { 0 } else { cap as u64 };
        let min_buy = d.min_qty.map(u64::from).unwrap_or(1);
        recurse(instance, deal + 1, quantities, best_value, best, visited);
        for q in min_buy..=cap {
            quantities.push((deal, q));
            recurse(instance, deal + 1, quantities, best_value, best, visited);
            quantities.pop();
        }
    }

    recurse(
        instance,
        0,
        &mut quantities,
        &mut best_value,
        &mut best,
        &mut visited,
    );
    OptResult {
        value: best_value,
        plan: PurchasePlan { quantities: best }.canonical(),
        exact: true,
        nodes: visited,
    }
}

/// Rough size of the brute-force search space, for selecting micro instances.
pub fn enumeration_size(instance: &ProcurementInstance) -> f64 {
    instance
        .menu
        .iter()
        .map(|d| {
            let cap = ((instance.budget - d.upfront_cost.unwrap_or(0.0)) / d.unit_price)
                .floor()
                .max(0.0);
            let min_buy = d.min_qty.map(u64::from).unwrap_or(1) as f64;
            (cap - min_buy + 1.0).max(0.0) + 1.0
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::super::{generate_with_params, plan_workers, GenParams};
    use super::*;
    use crate::envs::Difficulty;

    fn micro_params() -> GenParams {
        GenParams {
            n: 4,
            k: 2,
            effectiveness_max: 3,
            p1: 0.8,
            p2: 0.6,
        }
    }

    #[test]
    fn matches_brute_force_on_micro_instances() {
        let mut checked = 0;
        let mut seed = 0u64;
        while checked < 8 {
            let instance = generate_with_params(micro_params(), Difficulty::Basic, 900 + seed);
            seed += 1;
            if enumeration_size(&instance) > 2e5 {
                continue;
            }
            let exact = brute_force_opt(&instance);
            let solved = solve_opt(&instance, DEFAULT_TIME_LIMIT);
            assert!(solved.exact);
            assert_eq!(
                solved.value, exact.value,
                "seed {}: b&b {} vs brute force {}",
                900 + seed - 1,
                solved.value,
                exact.value
            );
            checked += 1;
        }
    }

    #[test]
    fn single_deal_closed_form() {
        // One category, one useful deal: the optimum buys
        // floor(budget / price) copies of it.
        let instance = super::super::ProcurementInstance {
            seed: 0,
            difficulty: Difficulty::Basic,
            n: 1,
            k: 1,
            effectiveness: vec![2],
            menu: vec![super::super::Deal {
                items: vec![(0, 1)],
                kind: super::super::DealKind::Simple,
                unit_price: 3.0,
                min_qty: None,
                upfront_cost: None,
            }],
            budget: 10.0,
            budget_witness: PurchasePlan {
                quantities: vec![(0, 1)],
            },
        };
        let result = solve_opt(&instance, DEFAULT_TIME_LIMIT);
        assert!(result.exact);
        assert_eq!(result.plan.quantities, vec![(0, 3)]);
        assert_eq!(result.value, 6.0);
    }

    #[test]
    fn opt_at_least_witness_value() {
        for seed in 0..10 {
            let instance = super::super::generate_instance(Difficulty::Basic, 3000 + seed);
            let witness_value = plan_workers(&instance, &instance.budget_witness);
            let result = solve_opt(&instance, DEFAULT_TIME_LIMIT);
            assert!(result.exact, "seed {seed} inexact");
            assert!(result.value >= witness_value);
            assert!(witness_value > 0.0);
        }
    }

    #[test]
    fn opt_leaves_no_affordable_extension() {
        // Optimality implies the leftover budget cannot pay for one more copy
        // of anything (adding a copy strictly raises output once every
        // category is covered). In particular the optimum uses most of the
        // budget; the generation anchors the budget to a plan's cost plus
        // less than one unit.
        for seed in 0..10 {
            let instance = super::super::generate_instance(Difficulty::Basic, 4000 + seed);
            let result = solve_opt(&instance, DEFAULT_TIME_LIMIT);
            assert!(result.exact);
            let cost = plan_cost(&instance, &result.plan).unwrap();
            let leftover = instance.budget - cost;
            for (d, deal) in instance.menu.iter().enumerate() {
                let marginal = if result.plan.quantity_of(d) > 0 {
                    deal.unit_price
                } else {
                    deal.upfront_cost.unwrap_or(0.0)
                        + deal.unit_price * deal.min_qty.map(u64::from).unwrap_or(1) as f64
                };
                assert!(
                    marginal > leftover,
                    "seed {seed}: Offer_{} extension {marginal} fits in leftover {leftover}",
                    d + 1
                );
            }
            // Budget utilization stays high at Basic scale.
            assert!(cost / instance.budget > 0.8, "seed {seed}: low utilization");
        }
    }
}
