//! Episode wiring for the procurement environment.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{plan_cost, plan_quantities, PlanError, ProcurementInstance, PurchasePlan};
use crate::envs::procurement::workers_supported;
use crate::harness::{
    digest_json, pydict, ActionOutcome, EnvKind, Environment, ToolCall, ToolParam, ToolSchema,
};
use crate::textfmt::two_dp;

const SYSTEM_TEXT: &str = "Your job is to manage the purchase of equipment. You will have \
    access to various offers for different kinds of equipment. Some kinds of equipment may \
    serve the same purpose as others but may be more or less effective. Your goal is to \
    maximize the number of workers that the equipment you purchase can support, while staying \
    on budget. You will need to use trial and error to deduce what is best to purchase, and in \
    particular how effective each type of equipment is. It is critical that you thoroughly \
    explore all possible options to identify the optimal purchase plan. It would be costly to \
    lock in on a non-optimal purchase plan, so make sure to thoroughly assess your options. You \
    can do your job by using various tools available to you, listed below. Always make your \
    decision informed by data. Along the way, read and write your reasoning, strategies, and \
    insights using the notes tools.";

const INITIAL_TEXT: &str = "Now you can start using the tools to devise a purchase plan for \
    this attempt. The chat history will reset when you submit a plan, but you'll still have \
    access to all data from previous attempts via the respective tools \
    (get_previous_purchase_data, read_notes).";

/// Why a consumed period produced no production feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum InfeasibleReason {
    OverBudget,
    BelowMinimum,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Attempt {
    /// Entries in submitted order, zeros included, for the text echo.
    submitted: Vec<(usize, u64)>,
    feasible: bool,
    workers: Option<f64>,
    cost: Option<f64>,
    reason: Option<InfeasibleReason>,
}

/// Procurement episode state.
pub struct ProcurementEnv {
    instance: ProcurementInstance,
    attempts: Vec<Attempt>,
}

impl ProcurementEnv {
    pub fn new(instance: ProcurementInstance) -> Self {
        Self {
            instance,
            attempts: Vec::new(),
        }
    }

    pub fn instance(&self) -> &ProcurementInstance {
        &self.instance
    }

    fn render_menu(&self) -> String {
        let lines: Vec<String> = self
            .instance
            .menu
            .iter()
            .enumerate()
            .map(|(idx, deal)| {
                let qualifier = if let Some(min) = deal.min_qty {
                    format!("[minimum order quantity {min}] ")
                } else if let Some(upfront) = deal.upfront_cost {
                    format!("[additional upfront cost ${}] ", two_dp(upfront))
                } else {
                    String::new()
                };
                let items: Vec<String> = deal
                    .items
                    .iter()
                    .map(|&(product, copies)| {
                        let unit = if copies == 1 { "unit" } else { "units" };
                        format!("{copies} {unit} of {}", self.instance.product_name(product))
                    })
                    .collect();
                let bundle = match items.len() {
                    1 => items[0].clone(),
                    2 => format!("{} and {}", items[0], items[1]),
                    _ => format!(
                        "{}, and {}",
                        items[..items.len() - 1].join(", "),
                        items[items.len() - 1]
                    ),
                };
                format!(
                    "- {}: {qualifier}${} for {bundle}",
                    self.instance.deal_name(idx),
                    two_dp(deal.unit_price)
                )
            })
            .collect();
        lines.join("\n")
    }

    fn render_plan(&self, entries: &[(usize, u64)]) -> String {
        let parts: Vec<String> = entries
            .iter()
            .map(|&(deal, qty)| format!("'{}': {qty}", self.instance.deal_name(deal)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn render_history(&self) -> String {
        if self.attempts.is_empty() {
            return "No previous attempts.".to_string();
        }
        let blocks: Vec<String> = self
            .attempts
            .iter()
            .enumerate()
            .map(|(idx, attempt)| {
                let results = if attempt.feasible {
                    format!(
                        "supports {} workers and incurs cost of {}",
                        two_dp(attempt.workers.unwrap_or(0.0)),
                        two_dp(attempt.cost.unwrap_or(0.0))
                    )
                } else {
                    match attempt.reason {
                        Some(InfeasibleReason::BelowMinimum) => {
                            "the plan is not feasible (an offer was below its minimum order \
                             quantity)"
                                .to_string()
                        }
                        _ => "the plan is not feasible (exceeds the budget)".to_string(),
                    }
                };
                format!(
                    "Attempt {idx}:\nPurchase plan proposed: {}\nPurchase plan results: {results}",
                    self.render_plan(&attempt.submitted)
                )
            })
            .collect();
        blocks.join("\n\n")
    }

    fn parse_plan(&self, text: &str) -> Result<Vec<(usize, u64)>, String> {
        let pairs = pydict::parse(text)?;
        let mut entries = Vec::with_capacity(pairs.len());
        for (key, value) in pairs {
            let deal = self
                .instance
                .deal_index(&key)
                .ok_or_else(|| format!("unknown offer ID '{key}'"))?;
            if entries.iter().any(|&(d, _)| d == deal) {
                return Err(format!("offer '{key}' listed more than once"));
            }
            let qty = pydict::parse_u64(&value)
                .map_err(|_| format!("quantity for '{key}' must be a non-negative integer"))?;
            entries.push((deal, qty));
        }
        Ok(entries)
    }
}

impl Environment for ProcurementEnv {
    fn kind(&self) -> EnvKind {
        EnvKind::Procurement
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
                "get_previous_purchase_data",
                "Returns all data from previous purchases. Always read this data before \
                 submitting a plan.",
            ),
            ToolSchema::getter(
                "get_equipment_information",
                "Returns the list of offer IDs and their costs.",
            ),
            ToolSchema::getter("get_budget", "Returns the budget for your purchase plan."),
            ToolSchema::getter(
                "get_attempt_number",
                "Returns the current attempt number, 0-indexed. (E.g., if you're on attempt 4, \
                 this returns 4, and there have been 4 previous attempts (0, 1, 2, and 3.)",
            ),
            ToolSchema::action(
                "submit_purchase_plan",
                "Submit your purchase plan for this attempt. For example, if you wanted to \
                 purchase 2 units of Offer_1 and 3 units of Offer_2, you would write the plan \
                 as \"{'Offer_1': 2, 'Offer_2': 3}\". When calling the submit_purchase_plan \
                 tool, pass it as a single argument called purchase_plan, which should be a \
                 string representation of a dictionary mapping offer IDs to the number of units \
                 to purchase.",
                vec![ToolParam::new(
                    "purchase_plan",
                    "string",
                    "A string representation of a dictionary mapping offer IDs to the number \
                     of units to purchase.",
                )],
            ),
        ]
    }

    fn system_text(&self) -> String {
        SYSTEM_TEXT.to_string()
    }

    fn initial_text(&self, _period: usize, _num_periods: usize) -> String {
        INITIAL_TEXT.to_string()
    }

    fn action_tool(&self) -> &'static str {
        "submit_purchase_plan"
    }

    fn call_getter(&self, tool: &str, _call: &ToolCall) -> Result<String, String> {
        match tool {
            "get_previous_purchase_data" => Ok(self.render_history()),
            "get_equipment_information" => Ok(self.render_menu()),
            "get_budget" => Ok(two_dp(self.instance.budget)),
            other => Err(format!("unknown getter '{other}'")),
        }
    }

    fn submit_action(&mut self, call: &ToolCall) -> Result<ActionOutcome, String> {
        let text = call
            .str_arg("purchase_plan")
            .ok_or("submit_purchase_plan requires a 'purchase_plan' string argument")?;
        let submitted = self.parse_plan(text)?;
        let plan = PurchasePlan {
            quantities: submitted.clone(),
        }
        .canonical();

        let attempt = match plan_cost(&self.instance, &plan) {
            Ok(cost) if cost <= self.instance.budget => {
                let workers =
                    workers_supported(&self.instance, &plan_quantities(&self.instance, &plan));
                Attempt {
                    submitted,
                    feasible: true,
                    workers: Some(workers),
                    cost: Some(cost),
                    reason: None,
                }
            }
            Ok(_) => Attempt {
                submitted,
                feasible: false,
                workers: None,
                cost: None,
                reason: Some(InfeasibleReason::OverBudget),
            },
            Err(PlanError::BelowMinimum { .. }) => Attempt {
                submitted,
                feasible: false,
                workers: None,
                cost: None,
                reason: Some(InfeasibleReason::BelowMinimum),
            },
            Err(PlanError::UnknownDeal(name)) => {
                return Err(format!("unknown offer ID '{name}'"));
            }
        };

        let feedback = json!({
            "feasible": attempt.feasible,
            "workers": attempt.workers,
            "cost": attempt.cost,
            "reason": attempt.reason,
        });
        let action = json!({ "plan": plan.quantities });
        self.attempts.push(attempt);
        Ok(ActionOutcome {
            action,
            feedback,
            ack: "Purchase plan submitted.".to_string(),
            terminal: false,
        })
    }

    fn pass_action(&mut self) -> ActionOutcome {
        // Resubmit the last plan; before any submission, the empty plan.
        let last = self
            .attempts
            .last()
            .map(|a| a.submitted.clone())
            .unwrap_or_default();
        let rendered = self.render_plan(&last);
        let call = ToolCall::new(
            "submit_purchase_plan",
            json!({ "purchase_plan": rendered }),
        );
        self.submit_action(&call).expect("pass action is valid")
    }

    fn state_digest(&self) -> String {
        digest_json(&json!({
            "instance": self.instance_json(),
            "attempts": serde_json::to_value(&self.attempts).expect("serialize attempts"),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::super::generate_instance;
    use super::*;
    use crate::envs::Difficulty;

    fn env() -> ProcurementEnv {
        ProcurementEnv::new(generate_instance(Difficulty::Basic, 11))
    }

    fn submit(env: &mut ProcurementEnv, plan: &str) -> Result<ActionOutcome, String> {
        env.submit_action(&ToolCall::new(
            "submit_purchase_plan",
            json!({ "purchase_plan": plan }),
        ))
    }

    #[test]
    fn menu_lines_follow_template() {
        let env = env();
        let menu = env.render_menu();
        for idx in 0..env.instance.menu.len() {
            assert!(menu.contains(&format!("- Offer_{}: ", idx + 1)));
        }
        assert!(menu.contains(" for "));
        assert!(menu.contains("$"));
    }

    #[test]
    fn zero_plan_supports_zero_workers_at_zero_cost() {
        let mut env = env();
        let outcome = submit(&mut env, "{}").unwrap();
        assert_eq!(outcome.feedback["feasible"], json!(true));
        assert_eq!(outcome.feedback["workers"], json!(0.0));
        assert_eq!(outcome.feedback["cost"], json!(0.0));
        let history = env.render_history();
        assert!(history.contains("supports 0.00 workers and incurs cost of 0.00"));
    }

    #[test]
    fn over_budget_plan_consumes_the_period_without_revealing_output() {
        let mut env = env();
        // 10000 copies of Offer_1 exceeds any generated budget.
        let outcome = submit(&mut env, "{'Offer_1': 10000}").unwrap();
        assert_eq!(outcome.feedback["feasible"], json!(false));
        assert!(outcome.feedback["workers"].is_null());
        assert_eq!(env.attempts.len(), 1);
        assert!(env.render_history().contains("not feasible"));
    }

    #[test]
    fn unknown_offer_is_a_protocol_error_and_does_not_consume() {
        let mut env = env();
        assert!(submit(&mut env, "{'Offer_99': 1}").is_err());
        assert!(submit(&mut env, "{'Gadget_1': 1}").is_err());
        assert!(submit(&mut env, "not a dict").is_err());
        assert!(env.attempts.is_empty());
    }

    #[test]
    fn history_echoes_submitted_plan_order() {
        let mut env = env();
        submit(&mut env, "{'Offer_4': 1, 'Offer_2': 0, 'Offer_9': 3}").unwrap();
        let history = env.render_history();
        assert!(history.contains("Purchase plan proposed: {'Offer_4': 1, 'Offer_2': 0, 'Offer_9': 3}"));
    }

    #[test]
    fn budget_renders_with_two_decimals() {
        let env = env();
        let budget = env.call_getter("get_budget", &ToolCall::bare("get_budget")).unwrap();
        assert_eq!(budget, two_dp(env.instance.budget));
        assert!(budget.contains('.'));
    }
}
