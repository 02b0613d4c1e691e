//! Episode wiring for the scheduling environment: tools, feedback rendering,
//! and blocking-pair sampling.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{blocking_pairs, Matching, SchedulingInstance};
use crate::harness::{
    digest_json, pydict, ActionOutcome, EnvKind, Environment, ToolCall, ToolParam, ToolSchema,
};
use crate::rng::{self, Stream};

const SYSTEM_TEXT: &str = "Your job is to assign workers to tasks, where each worker gets \
    exactly one task. Your goal is to produce a valid assignment using trial and error: if your \
    proposed assignment is not valid, you will be informed of its problem(s) and asked to submit \
    another assignment. You can do your job by using various tools available to you, listed \
    below. Always make your decision informed by data. Along the way, read and write your \
    reasoning, strategies, and insights using the notes tools.";

const INITIAL_TEXT: &str = "Now you can start using the tools to devise an assignment. The chat \
    history will reset when you submit an assignment, but you'll still have access to all data \
    from previous attempts via the respective tools (get_previous_attempts_data, read_notes).";

const FINAL_ATTEMPT_TEXT: &str = "**This is your final attempt.** This time, you should submit \
    the highest quality assignment possible, that has the fewest problems.";

/// One submitted assignment with the feedback it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Attempt {
    assignment: Vec<usize>,
    shown_pairs: Vec<(usize, usize)>,
    stable: bool,
}

/// Scheduling episode state: immutable instance plus attempt history.
pub struct SchedulingEnv {
    instance: SchedulingInstance,
    attempts: Vec<Attempt>,
    feedback_rng: Stream,
}

impl SchedulingEnv {
    pub fn new(instance: SchedulingInstance) -> Self {
        let feedback_rng = rng::stream(instance.seed, "scheduling-feedback");
        Self {
            instance,
            attempts: Vec::new(),
            feedback_rng,
        }
    }

    pub fn instance(&self) -> &SchedulingInstance {
        &self.instance
    }

    fn worker_name(&self, w: usize) -> String {
        format!("W{}", w + 1)
    }

    fn task_name(&self, t: usize) -> String {
        format!("T{}", t + 1)
    }

    fn parse_assignment(&self, text: &str) -> Result<Matching, String> {
        let n = self.instance.n;
        let pairs = pydict::parse(text)?;
        let mut assignment = vec![usize::MAX; n];
        for (key, value) in &pairs {
            let w = parse_id(key, 'W', n)
                .ok_or_else(|| format!("'{key}' is not a valid worker ID"))?;
            let t = parse_id(value, 'T', n)
                .ok_or_else(|| format!("'{value}' is not a valid task ID"))?;
            if assignment[w] != usize::MAX {
                return Err(format!("worker {key} assigned more than once"));
            }
            assignment[w] = t;
        }
        if assignment.iter().any(|&t| t == usize::MAX) {
            return Err(format!(
                "assignment must cover all {n} workers, got {} entries",
                pairs.len()
            ));
        }
        Matching::new(assignment, n)
    }

    fn render_assignment(&self, assignment: &[usize]) -> String {
        let entries: Vec<String> = assignment
            .iter()
            .enumerate()
            .map(|(w, &t)| format!("'{}': '{}'", self.worker_name(w), self.task_name(t)))
            .collect();
        format!("{{{}}}", entries.join(", "))
    }

    fn render_problem(&self, matching: &[usize], (w, t): (usize, usize)) -> String {
        let displaced = matching.iter().position(|&task| task == t).expect("bijection");
        format!(
            "worker {w_name} was matched to task {wt_name} and worker {d_name} was assigned to \
             {t_name}. However, worker {w_name} would have preferred task {t_name}, and in fact \
             worker {w_name} is more suited to task {t_name} than worker {d_name}.",
            w_name = self.worker_name(w),
            wt_name = self.task_name(matching[w]),
            d_name = self.worker_name(displaced),
            t_name = self.task_name(t),
        )
    }

    fn render_history(&self) -> String {
        if self.attempts.is_empty() {
            return "No previous attempts.".to_string();
        }
        let mut blocks = Vec::new();
        for (idx, attempt) in self.attempts.iter().enumerate() {
            let mut lines = vec![
                format!("Attempt {idx}:"),
                format!(
                    "Assignment proposed: {}",
                    self.render_assignment(&attempt.assignment)
                ),
            ];
            if attempt.stable {
                lines.push("\tThe assignment was valid.".to_string());
            } else {
                for (i, &pair) in attempt.shown_pairs.iter().enumerate() {
                    lines.push(format!(
                        "\t({}) Problem with assignment: {}",
                        i + 1,
                        self.render_problem(&attempt.assignment, pair)
                    ));
                }
            }
            blocks.push(lines.join("\n"));
        }
        blocks.join("\n\n")
    }

    fn apply_matching(&mut self, matching: Matching) -> ActionOutcome {
        let all_pairs = blocking_pairs(&self.instance, &matching);
        let stable = all_pairs.is_empty();
        let shown: Vec<(usize, usize)> = if stable {
            Vec::new()
        } else {
            let count = self.instance.k.min(all_pairs.len());
            rng::sample_without_replacement(&mut self.feedback_rng, all_pairs.len(), count)
                .into_iter()
                .map(|i| all_pairs[i])
                .collect()
        };
        let action = json!({ "assignment": matching.0 });
        let feedback = json!({
            "stable": stable,
            "shown_pairs": shown,
        });
        self.attempts.push(Attempt {
            assignment: matching.0,
            shown_pairs: shown,
            stable,
        });
        ActionOutcome {
            action,
            feedback,
            ack: if stable {
                "Assignment submitted. The assignment was valid.".to_string()
            } else {
                "Assignment submitted.".to_string()
            },
            terminal: stable,
        }
    }
}

fn parse_id(token: &str, prefix: char, n: usize) -> Option<usize> {
    let rest = token.strip_prefix(prefix)?;
    let idx: usize = rest.parse().ok()?;
    (1..=n).contains(&idx).then(|| idx - 1)
}

impl Environment for SchedulingEnv {
    fn kind(&self) -> EnvKind {
        EnvKind::Scheduling
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
                "get_previous_attempts_data",
                "Returns all data from previous assignments tried and why they didn't work. \
                 Always read this data before submitting an assignment.",
            ),
            ToolSchema::getter(
                "get_attempt_number",
                "Returns the current attempt number, 0-indexed. (E.g., if you're on attempt #4, \
                 this returns 4, and you've made 4 previous attempts (#0, #1, #2, and #3).)",
            ),
            ToolSchema::getter("get_worker_ids", "Returns the list of worker IDs to be assigned."),
            ToolSchema::getter("get_task_ids", "Returns the list of task IDs to be assigned."),
            ToolSchema::action(
                "submit_assignment",
                "Submit an attempt at a valid assignment of workers to tasks. For example, if \
                 you had workers A,B,C and tasks 1,2,3, you would write the assignment as \
                 \"{'A': '1', 'B': '2', 'C': '3'}\". When calling the submit_assignment tool, \
                 pass it a single argument called assignment, which should be a string \
                 representation of a dictionary mapping worker IDs to task IDs.",
                vec![ToolParam::new(
                    "assignment",
                    "string",
                    "A string representation of a dictionary mapping worker IDs to task IDs. \
                     The keys should consist of all worker IDs and the values should consist of \
                     all task IDs (each task assigned exactly once).",
                )],
            ),
        ]
    }

    fn system_text(&self) -> String {
        SYSTEM_TEXT.to_string()
    }

    fn initial_text(&self, period: usize, num_periods: usize) -> String {
        if period + 1 == num_periods {
            format!("{INITIAL_TEXT}\n\n{FINAL_ATTEMPT_TEXT}")
        } else {
            INITIAL_TEXT.to_string()
        }
    }

    fn action_tool(&self) -> &'static str {
        "submit_assignment"
    }

    fn call_getter(&self, tool: &str, _call: &ToolCall) -> Result<String, String> {
        match tool {
            "get_previous_attempts_data" => Ok(self.render_history()),
            "get_worker_ids" => Ok(render_id_list('W', self.instance.n)),
            "get_task_ids" => Ok(render_id_list('T', self.instance.n)),
            other => Err(format!("unknown getter '{other}'")),
        }
    }

    fn submit_action(&mut self, call: &ToolCall) -> Result<ActionOutcome, String> {
        let text = call
            .str_arg("assignment")
            .ok_or("submit_assignment requires an 'assignment' string argument")?;
        let matching = self.parse_assignment(text)?;
        Ok(self.apply_matching(matching))
    }

    fn pass_action(&mut self) -> ActionOutcome {
        // Resubmit the last matching; before any submission, the identity
        // assignment is the canonical default.
        let matching = match self.attempts.last() {
            Some(attempt) => Matching(attempt.assignment.clone()),
            None => Matching((0..self.instance.n).collect()),
        };
        self.apply_matching(matching)
    }

    fn state_digest(&self) -> String {
        digest_json(&json!({
            "instance": self.instance_json(),
            "attempts": serde_json::to_value(&self.attempts).expect("serialize attempts"),
        }))
    }
}

fn render_id_list(prefix: char, n: usize) -> String {
    let ids: Vec<String> = (1..=n).map(|i| format!("'{prefix}{i}'")).collect();
    format!("[{}]", ids.join(", "))
}
