//! Episode wiring for the pricing environment.

use serde_json::{json, Value};

use super::{optimal_prices, profit, DemandOutcome, PricingInstance, HORIZON};
use crate::harness::{
    digest_json, pydict, ActionOutcome, EnvKind, Environment, ToolCall, ToolParam, ToolSchema,
};
use crate::textfmt::two_dp;

const SYSTEM_TEXT: &str = "Your job is to make price-setting decisions for a user. Your goal is \
    to price in a way that maximizes the user's profits. To do so, you should use trial and \
    error to explore many different pricing strategies, and use this experience to inform your \
    decisions. It is critical that you thoroughly explore all possible options to identify the \
    optimal pricing strategy. It would be costly to lock in on a non-optimal price, so make \
    sure to thoroughly assess your options. You can do your job by using various tools \
    available to you, listed below. Always make your decision informed by data. Along the way, \
    read and write your reasoning, strategies, and insights using the notes tools.";

/// Pricing episode state. Optimal prices for the whole horizon are computed up
/// front; they set the advertised price cap and the score denominator.
pub struct PricingEnv {
    instance: PricingInstance,
    history: Vec<DemandOutcome>,
    optimal_by_period: Vec<(Vec<f64>, f64)>,
    price_cap: f64,
}

impl PricingEnv {
    pub fn new(instance: PricingInstance) -> Self {
        let optimal_by_period: Vec<(Vec<f64>, f64)> =
            (0..HORIZON).map(|t| optimal_prices(&instance, t)).collect();
        // Advertised cap: twice the largest per-product optimal price over
        // the horizon.
        let price_cap = 2.0
            * optimal_by_period
                .iter()
                .flat_map(|(prices, _)| prices.iter().copied())
                .fold(0.0f64, f64::max);
        Self {
            instance,
            history: Vec::new(),
            optimal_by_period,
            price_cap,
        }
    }

    pub fn instance(&self) -> &PricingInstance {
        &self.instance
    }

    /// Optimal total profit for each period of the horizon.
    pub fn optimal_profits(&self) -> Vec<f64> {
        self.optimal_by_period.iter().map(|&(_, v)| v).collect()
    }

    pub fn price_cap(&self) -> f64 {
        self.price_cap
    }

    fn current_period(&self) -> usize {
        self.history.len()
    }

    fn render_history(&self) -> String {
        if self.history.is_empty() {
            return "No previous attempts.".to_string();
        }
        let blocks: Vec<String> = self
            .history
            .iter()
            .enumerate()
            .map(|(t, outcome)| {
                let mut lines = vec![format!("Attempt {t}:")];
                for i in 0..self.instance.n {
                    lines.push(format!("{}:", self.instance.product_name(i)));
                    lines.push(format!("Price: {}", two_dp(outcome.prices[i])));
                    lines.push(format!("Quantity: {}", two_dp(outcome.quantities[i])));
                    lines.push(format!("Profit: {}", two_dp(outcome.profits[i])));
                    lines.push(format!("Cost: {}", two_dp(self.instance.cost[i])));
                }
                if self.instance.n > 1 {
                    lines.push(format!("Total profit: {}", two_dp(outcome.total_profit)));
                }
                lines.join("\n")
            })
            .collect();
        blocks.join("\n\n")
    }

    fn parse_prices(&self, text: &str) -> Result<Vec<f64>, String> {
        let pairs = pydict::parse(text)?;
        let mut prices = vec![f64::NAN; self.instance.n];
        for (key, value) in &pairs {
            let idx = key
                .strip_prefix("Product_")
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|i| (1..=self.instance.n).contains(i))
                .ok_or_else(|| format!("unknown product ID '{key}'"))?;
            if !prices[idx - 1].is_nan() {
                return Err(format!("product '{key}' listed more than once"));
            }
            prices[idx - 1] = pydict::parse_f64(value)
                .map_err(|_| format!("price for '{key}' must be a number"))?;
        }
        if prices.iter().any(|p| p.is_nan()) {
            return Err(format!(
                "prices must be set for all {} products",
                self.instance.n
            ));
        }
        Ok(prices)
    }

    fn apply_prices(&mut self, prices: Vec<f64>) -> Result<ActionOutcome, String> {
        let t = self.current_period();
        let outcome = profit(&self.instance, &prices, t)?;
        let action = json!({ "prices": outcome.prices });
        let feedback = serde_json::to_value(&outcome).expect("serialize outcome");
        self.history.push(outcome);
        Ok(ActionOutcome {
            action,
            feedback,
            ack: "Prices set.".to_string(),
            terminal: false,
        })
    }
}

impl Environment for PricingEnv {
    fn kind(&self) -> EnvKind {
        EnvKind::Pricing
    }

    fn instance_seed(&self) -> u64 {
        self.instance.seed
    }

    fn instance_json(&self) -> Value {
        serde_json::to_value(&self.instance).expect("serialize instance")
    }

    fn tool_schemas(&self) -> Vec<ToolSchema> {
        vec![
            ToolSchema::getter(
                "get_previous_pricing_data",
                "Returns all data from previous pricing decisions. Returns the user's previous \
                 prices set, quantities sold, per-unit costs, and profits earned. Always read \
                 this data before making a final price-setting decision.",
            ),
            ToolSchema::getter(
                "get_product_ids",
                "Returns a list of all IDs of products that you are pricing.",
            ),
            ToolSchema::getter(
                "get_attempt_number",
                "Returns the current attempt number, 0-indexed. (E.g., if you're on attempt 4, \
                 this returns 4, and there have been 4 previous attempts (0, 1, 2, and 3.)",
            ),
            ToolSchema::action(
                "set_prices",
                "Submit your pricing plan for this attempt. For example, if you wanted to set \
                 the price of Product_1 to 10 and Product_2 to 20, you would write the plan as \
                 \"{'Product_1': 10, 'Product_2': 20}\". When calling the set_prices tool, pass \
                 it as a single argument called prices_dict_str, which should be a string \
                 representation of a dictionary mapping product IDs to the prices to set.",
                vec![ToolParam::new(
                    "prices_dict_str",
                    "string",
                    "A string representation of a dictionary mapping product IDs to the prices \
                     to set. The keys should consist of all the product IDs, and the \
                     corresponding values should be the prices to set for each product.",
                )],
            ),
        ]
    }

    fn system_text(&self) -> String {
        SYSTEM_TEXT.to_string()
    }

    fn initial_text(&self, _period: usize, _num_periods: usize) -> String {
        format!(
            "Now you can start using the tools to make your price-setting decisions. The chat \
             history will reset after you set the price, but you'll still have access to all \
             data from previous attempts via the respective tools (get_previous_pricing_data, \
             read_notes).\n\nAdditional information: it is not recommended to set any prices \
             above {}.",
            two_dp(self.price_cap)
        )
    }

    fn action_tool(&self) -> &'static str {
        "set_prices"
    }

    fn call_getter(&self, tool: &str, _call: &ToolCall) -> Result<String, String> {
        match tool {
            "get_previous_pricing_data" => Ok(self.render_history()),
            "get_product_ids" => {
                let ids: Vec<String> = (0..self.instance.n)
                    .map(|i| format!("'{}'", self.instance.product_name(i)))
                    .collect();
                Ok(format!("[{}]", ids.join(", ")))
            }
            other => Err(format!("unknown getter '{other}'")),
        }
    }

    fn submit_action(&mut self, call: &ToolCall) -> Result<ActionOutcome, String> {
        let text = call
            .str_arg("prices_dict_str")
            .ok_or("set_prices requires a 'prices_dict_str' string argument")?;
        let prices = self.parse_prices(text)?;
        self.apply_prices(prices)
    }

    fn pass_action(&mut self) -> ActionOutcome {
        // Resubmit the last prices; before any submission, half the
        // advertised cap for every product.
        let prices = match self.history.last() {
            Some(outcome) => outcome.prices.clone(),
            None => vec![self.price_cap / 2.0; self.instance.n],
        };
        self.apply_prices(prices).expect("pass prices are valid")
    }

    fn state_digest(&self) -> String {
        digest_json(&json!({
            "instance": self.instance_json(),
            "history": serde_json::to_value(&self.history).expect("serialize history"),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{generate_instance, ShiftKind};
    use super::*;
    use crate::envs::Difficulty;

    #[test]
    fn feedback_lines_follow_template() {
        let mut env = PricingEnv::new(generate_instance(Difficulty::Basic, ShiftKind::Linear, 2));
        env.submit_action(&ToolCall::new(
            "set_prices",
            json!({"prices_dict_str": "{'Product_1': 20}"}),
        ))
        .unwrap();
        let history = env.render_history();
        assert!(history.starts_with("Attempt 0:\nProduct_1:\nPrice: 20.00\nQuantity: "));
        assert!(history.contains("\nProfit: "));
        assert!(history.contains("\nCost: "));
    }

    #[test]
    fn empty_history_has_explicit_header() {
        let env = PricingEnv::new(generate_instance(Difficulty::Basic, ShiftKind::Linear, 2));
        assert_eq!(env.render_history(), "No previous attempts.");
    }

    #[test]
    fn all_products_must_be_priced() {
        let mut env =
            PricingEnv::new(generate_instance(Difficulty::Medium, ShiftKind::Periodic, 3));
        let result = env.submit_action(&ToolCall::new(
            "set_prices",
            json!({"prices_dict_str": "{'Product_1': 5}"}),
        ));
        assert!(result.is_err());
    }

    #[test]
    fn price_cap_covers_every_period_optimum() {
        let env = PricingEnv::new(generate_instance(Difficulty::Basic, ShiftKind::Periodic, 4));
        for (prices, _) in &env.optimal_by_period {
            for &p in prices {
                assert!(p <= env.price_cap / 2.0 + 1e-9);
            }
        }
    }
}
