//! Procurement environment: deal menus over categorized products, a CES-style
//! production function (geometric mean of category effectiveness sums),
//! budget feasibility, and an exact optimum solver for score normalization.

mod env;
mod solver;

pub use env::ProcurementEnv;
pub use solver::{brute_force_opt, solve_opt, OptResult, DEFAULT_TIME_LIMIT};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envs::Difficulty;
use crate::rng;

/// Deal pricing structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DealKind {
    Simple,
    BulkOnly,
    TwoPartTariff,
}

/// One purchasable deal: a bundle of product copies at a per-copy price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deal {
    /// Offered products and copies per unit purchased, anchor product first.
    pub items: Vec<(usize, u32)>,
    pub kind: DealKind,
    pub unit_price: f64,
    /// Minimum order quantity; bulk-only deals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_qty: Option<u32>,
    /// One-time cost when any positive quantity is bought; two-part tariffs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upfront_cost: Option<f64>,
}

/// Quantities of each deal to purchase, indexed by deal id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurchasePlan {
    /// (deal index, quantity) with quantity > 0, in submission order.
    pub quantities: Vec<(usize, u64)>,
}

impl PurchasePlan {
    pub fn quantity_of(&self, deal: usize) -> u64 {
        self.quantities
            .iter()
            .find(|(d, _)| *d == deal)
            .map(|&(_, q)| q)
            .unwrap_or(0)
    }

    /// Canonical form: sorted by deal index, zero quantities dropped.
    pub fn canonical(&self) -> PurchasePlan {
        let mut quantities: Vec<(usize, u64)> = self
            .quantities
            .iter()
            .copied()
            .filter(|&(_, q)| q > 0)
            .collect();
        quantities.sort_unstable();
        PurchasePlan { quantities }
    }
}

/// Generation parameters; the three difficulty presets plus free choice for
/// micro instances in tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    pub effectiveness_max: u32,
    /// Geometric parameter for the number of distinct products per deal.
    pub p1: f64,
    /// Geometric parameter for copies per product and witness quantities.
    pub p2: f64,
}

impl GenParams {
    pub fn for_difficulty(difficulty: Difficulty) -> Self {
        match difficulty {
            Difficulty::Basic => GenParams {
                n: 12,
                k: 3,
                effectiveness_max: 3,
                p1: 0.8,
                p2: 0.5,
            },
            Difficulty::Medium => GenParams {
                n: 30,
                k: 5,
                effectiveness_max: 5,
                p1: 0.5,
                p2: 0.2,
            },
            Difficulty::Hard => GenParams {
                n: 100,
                k: 10,
                effectiveness_max: 20,
                p1: 0.1,
                p2: 0.1,
            },
        }
    }
}

/// A generated procurement world. Immutable once generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcurementInstance {
    pub seed: u64,
    pub difficulty: Difficulty,
    pub n: usize,
    pub k: usize,
    /// Effectiveness score of each product.
    pub effectiveness: Vec<u32>,
    /// Product `j` belongs to category `j / (n/k)`; names are "A1".."A4",
    /// "B1".. and so on by category.
    pub menu: Vec<Deal>,
    pub budget: f64,
    /// The positive-output plan whose cost anchored the budget.
    pub budget_witness: PurchasePlan,
}

impl ProcurementInstance {
    pub fn category_of(&self, product: usize) -> usize {
        product / (self.n / self.k)
    }

    pub fn product_name(&self, product: usize) -> String {
        let per = self.n / self.k;
        let letter = (b'A' + (product / per) as u8) as char;
        format!("{letter}{}", product % per + 1)
    }

    pub fn deal_name(&self, deal: usize) -> String {
        format!("Offer_{}", deal + 1)
    }

    pub fn deal_index(&self, name: &str) -> Option<usize> {
        let idx: usize = name.strip_prefix("Offer_")?.parse().ok()?;
        (1..=self.menu.len()).contains(&idx).then(|| idx - 1)
    }

    /// Per-category effectiveness contribution of one unit of deal `d`.
    pub fn deal_category_weights(&self, deal: &Deal) -> Vec<f64> {
        let mut weights = vec![0.0; self.k];
        for &(product, copies) in &deal.items {
            weights[self.category_of(product)] +=
                self.effectiveness[product] as f64 * copies as f64;
        }
        weights
    }
}

/// Workers supported by product quantities `z`: the geometric mean across
/// categories of the category effectiveness sums. Zero as soon as any
/// category is uncovered (products across categories are complements).
pub fn workers_supported(instance: &ProcurementInstance, z: &[u64]) -> f64 {
    assert_eq!(z.len(), instance.n);
    let mut sums = vec![0.0f64; instance.k];
    for (product, &qty) in z.iter().enumerate() {
        sums[instance.category_of(product)] += instance.effectiveness[product] as f64 * qty as f64;
    }
    workers_from_category_sums(&sums)
}

/// Same production function evaluated on precomputed category sums.
pub fn workers_from_category_sums(sums: &[f64]) -> f64 {
    if sums.iter().any(|&s| s <= 0.0) {
        return 0.0;
    }
    match sums.len() {
        1 => sums[0],
        2 => (sums[0] * sums[1]).sqrt(),
        k => (sums.iter().map(|&s| s.ln()).sum::<f64>() / k as f64).exp(),
    }
}

/// Violation of a deal's purchase rules.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("unknown offer ID '{0}'")]
    UnknownDeal(String),
    #[error("{deal}: quantity {qty} is below minimum order quantity {min}")]
    BelowMinimum { deal: String, qty: u64, min: u32 },
}

/// Total money cost of a plan: per-deal upfront cost (once, when bought) plus
/// unit price times quantity. Bulk-only deals reject 0 < qty < min.
pub fn plan_cost(instance: &ProcurementInstance, plan: &PurchasePlan) -> Result<f64, PlanError> {
    let mut cost = 0.0;
    for &(deal_idx, qty) in &plan.quantities {
        if qty == 0 {
            continue;
        }
        let deal = instance
            .menu
            .get(deal_idx)
            .ok_or_else(|| PlanError::UnknownDeal(format!("Offer_{}", deal_idx + 1)))?;
        if let Some(min) = deal.min_qty {
            if qty < min as u64 {
                return Err(PlanError::BelowMinimum {
                    deal: instance.deal_name(deal_idx),
                    qty,
                    min,
                });
            }
        }
        cost += deal.upfront_cost.unwrap_or(0.0) + deal.unit_price * qty as f64;
    }
    Ok(cost)
}

/// Aggregate product quantities produced by a plan.
pub fn plan_quantities(instance: &ProcurementInstance, plan: &PurchasePlan) -> Vec<u64> {
    let mut z = vec![0u64; instance.n];
    for &(deal_idx, qty) in &plan.quantities {
        if qty == 0 {
            continue;
        }
        for &(product, copies) in &instance.menu[deal_idx].items {
            z[product] += copies as u64 * qty;
        }
    }
    z
}

/// Workers supported by a plan; 0-cost empty plans support 0 workers.
pub fn plan_workers(instance: &ProcurementInstance, plan: &PurchasePlan) -> f64 {
    workers_supported(instance, &plan_quantities(instance, plan))
}

/// Generate an instance at a difficulty preset.
pub fn generate_instance(difficulty: Difficulty, seed: u64) -> ProcurementInstance {
    generate_with_params(GenParams::for_difficulty(difficulty), difficulty, seed)
}

/// Generation with explicit parameters (micro instances for oracle tests).
pub fn generate_with_params(
    params: GenParams,
    difficulty: Difficulty,
    seed: u64,
) -> ProcurementInstance {
    assert!(params.n % params.k == 0, "category sizes must be equal");
    let mut gen_rng = rng::stream(seed, "procurement-instance");
    let n = params.n;
    let m = n; // menu size equals product count

    let effectiveness: Vec<u32> = (0..n)
        .map(|_| gen_rng.gen_range(1..=params.effectiveness_max))
        .collect();

    // Uniform permutation anchoring deal i to product sigma(i), so every
    // product is offered by at least one deal.
    let sigma = rng::sample_without_replacement(&mut gen_rng, n, n);

    let mut menu = Vec::with_capacity(m);
    for &anchor in sigma.iter().take(m) {
        let distinct = (rng::geometric(&mut gen_rng, params.p1) as usize).min(n);
        let mut products = vec![anchor];
        if distinct > 1 {
            let others: Vec<usize> = (0..n).filter(|&p| p != anchor).collect();
            let picks =
                rng::sample_without_replacement(&mut gen_rng, others.len(), distinct - 1);
            products.extend(picks.into_iter().map(|i| others[i]));
        }
        let items: Vec<(usize, u32)> = products
            .into_iter()
            .map(|p| (p, rng::geometric(&mut gen_rng, params.p2) as u32))
            .collect();
        let kind = match gen_rng.gen_range(0..3) {
            0 => DealKind::Simple,
            1 => DealKind::BulkOnly,
            _ => DealKind::TwoPartTariff,
        };
        let unit_price = gen_rng.gen_range(1.0..20.0);
        let min_qty = (kind == DealKind::BulkOnly).then(|| gen_rng.gen_range(2..=10));
        let upfront_cost =
            (kind == DealKind::TwoPartTariff).then(|| gen_rng.gen_range(1.0..20.0));
        menu.push(Deal {
            items,
            kind,
            unit_price,
            min_qty,
            upfront_cost,
        });
    }

    let mut instance = ProcurementInstance {
        seed,
        difficulty,
        n,
        k: params.k,
        effectiveness,
        menu,
        budget: 0.0,
        budget_witness: PurchasePlan::default(),
    };

    // Budget: cost of a sampled positive-output plan plus a fraction of a
    // currency unit. One deal per category guarantees positive output, so the
    // retry loop is a safeguard only.
    loop {
        let witness = sample_witness_plan(&instance, params.p2, &mut gen_rng);
        if plan_workers(&instance, &witness) > 0.0 {
            let cost = plan_cost(&instance, &witness).expect("witness plan is valid");
            instance.budget = cost + gen_rng.gen_range(0.0..1.0);
            instance.budget_witness = witness;
            break;
        }
    }
    instance
}

fn sample_witness_plan(
    instance: &ProcurementInstance,
    p2: f64,
    rng_stream: &mut rng::Stream,
) -> PurchasePlan {
    let per = instance.n / instance.k;
    let mut quantities: Vec<(usize, u64)> = Vec::new();
    for category in 0..instance.k {
        let product = category * per + rng_stream.gen_range(0..per);
        let offering: Vec<usize> = instance
            .menu
            .iter()
            .enumerate()
            .filter(|(_, deal)| deal.items.iter().any(|&(p, _)| p == product))
            .map(|(idx, _)| idx)
            .collect();
        let deal_idx = offering[rng_stream.gen_range(0..offering.len())];
        let mut qty = rng::geometric(rng_stream, p2);
        if let Some(min) = instance.menu[deal_idx].min_qty {
            qty = qty.max(min as u64);
        }
        match quantities.iter_mut().find(|(d, _)| *d == deal_idx) {
            Some(entry) => entry.1 += qty,
            None => quantities.push((deal_idx, qty)),
        }
    }
    PurchasePlan { quantities }.canonical()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn micro_instance(k: usize, effectiveness: Vec<u32>) -> ProcurementInstance {
        let n = effectiveness.len();
        ProcurementInstance {
            seed: 0,
            difficulty: Difficulty::Basic,
            n,
            k,
            effectiveness,
            menu: Vec::new(),
            budget: 0.0,
            budget_witness: PurchasePlan::default(),
        }
    }

    #[test]
    fn workers_single_category() {
        let instance = micro_instance(1, vec![2, 3]);
        assert_eq!(workers_supported(&instance, &[1, 2]), 8.0);
    }

    #[test]
    fn workers_two_categories_sqrt() {
        let instance = micro_instance(2, vec![1, 4]);
        assert!((workers_supported(&instance, &[4, 1]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn empty_category_supports_nobody() {
        let instance = micro_instance(2, vec![1, 4]);
        assert_eq!(workers_supported(&instance, &[7, 0]), 0.0);
    }

    #[test]
    fn cost_examples() {
        let mut instance = micro_instance(1, vec![1]);
        instance.menu = vec![
            Deal {
                items: vec![(0, 1)],
                kind: DealKind::Simple,
                unit_price: 2.5,
                min_qty: None,
                upfront_cost: None,
            },
            Deal {
                items: vec![(0, 1)],
                kind: DealKind::TwoPartTariff,
                unit_price: 1.34,
                min_qty: None,
                upfront_cost: Some(1.64),
            },
            Deal {
                items: vec![(0, 1)],
                kind: DealKind::BulkOnly,
                unit_price: 1.0,
                min_qty: Some(3),
                upfront_cost: None,
            },
        ];
        let plan = PurchasePlan {
            quantities: vec![(0, 3)],
        };
        assert_eq!(plan_cost(&instance, &plan).unwrap(), 7.5);

        let tariff = PurchasePlan {
            quantities: vec![(1, 230)],
        };
        assert!((plan_cost(&instance, &tariff).unwrap() - 309.84).abs() < 1e-9);

        let below_min = PurchasePlan {
            quantities: vec![(2, 2)],
        };
        let err = plan_cost(&instance, &below_min).unwrap_err();
        assert!(matches!(err, PlanError::BelowMinimum { qty: 2, min: 3, .. }));
        assert!(err.to_string().contains("below minimum order"));
    }

    #[test]
    fn basic_instance_shape() {
        let instance = generate_instance(Difficulty::Basic, 42);
        assert_eq!(instance.n, 12);
        assert_eq!(instance.k, 3);
        assert_eq!(instance.menu.len(), 12);
        // 3 categories of 4 products each.
        for category in 0..3 {
            let members = (0..12).filter(|&p| instance.category_of(p) == category).count();
            assert_eq!(members, 4);
        }
        assert_eq!(instance.product_name(0), "A1");
        assert_eq!(instance.product_name(11), "C4");
        assert!(instance.effectiveness.iter().all(|&e| (1..=3).contains(&e)));
    }

    #[test]
    fn budget_exceeds_witness_cost_by_less_than_one() {
        for seed in 0..50 {
            let instance = generate_instance(Difficulty::Basic, seed);
            let cost = plan_cost(&instance, &instance.budget_witness).unwrap();
            let eps = instance.budget - cost;
            assert!((0.0..1.0).contains(&eps), "seed {seed}: eps {eps}");
            assert!(plan_workers(&instance, &instance.budget_witness) > 0.0);
        }
    }

    #[test]
    fn deal_kind_frequencies_are_uniform() {
        // Binomial oracle: over 1000 Basic menus (12,000 deals), each kind's
        // frequency should be within 3 sigma of 1/3.
        let mut counts = [0usize; 3];
        let mut total = 0usize;
        for seed in 0..1000 {
            let instance = generate_instance(Difficulty::Basic, 10_000 + seed);
            for deal in &instance.menu {
                let idx = match deal.kind {
                    DealKind::Simple => 0,
                    DealKind::BulkOnly => 1,
                    DealKind::TwoPartTariff => 2,
                };
                counts[idx] += 1;
                total += 1;
            }
        }
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / total as f64).sqrt();
        for count in counts {
            let freq = count as f64 / total as f64;
            assert!(
                (freq - p).abs() < 3.0 * sigma,
                "frequency {freq} vs 1/3 (3 sigma {})",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn every_product_is_offered() {
        let instance = generate_instance(Difficulty::Medium, 7);
        for product in 0..instance.n {
            assert!(
                instance
                    .menu
                    .iter()
                    .any(|deal| deal.items.iter().any(|&(p, _)| p == product)),
                "product {product} unoffered"
            );
        }
    }

    #[test]
    fn prices_and_bulk_minimums_in_range() {
        let instance = generate_instance(Difficulty::Hard, 5);
        for deal in &instance.menu {
            assert!((1.0..20.0).contains(&deal.unit_price));
            assert!(!deal.items.is_empty());
            assert!(deal.items.iter().all(|&(_, c)| c >= 1));
            if let Some(min) = deal.min_qty {
                assert!((2..=10).contains(&min));
                assert_eq!(deal.kind, DealKind::BulkOnly);
            }
            if let Some(upfront) = deal.upfront_cost {
                assert!((1.0..20.0).contains(&upfront));
                assert_eq!(deal.kind, DealKind::TwoPartTariff);
            }
        }
    }
}
