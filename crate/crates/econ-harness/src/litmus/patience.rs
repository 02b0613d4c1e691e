//! Patience vs impatience: now-or-later choice grids, choice curves, and the
//! best-fit annual interest rate.
//!
//! The litmus score is the rate whose perfectly-consistent step function lies
//! closest (in normalized L1 distance) to the observed acceptance curve,
//! averaged over the four time offsets; that distance complement is the
//! reliability score. Competency is accuracy on queries where the rate to
//! apply is stated outright.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::SCHEMA_VERSION;

/// Base amount offered "right now", in dollars.
pub const BASE_AMOUNT: f64 = 100.0;
/// Candidate rates: 0% to 20% in steps of 0.1%.
pub const RATE_GRID_STEPS: usize = 200;
/// Repetitions of each main-grid query; half are flipped.
pub const MAIN_REPETITIONS: usize = 20;

/// Time offset of the later payment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeOffset {
    OneMonth,
    SixMonths,
    OneYear,
    FiveYears,
}

impl TimeOffset {
    pub const ALL: [TimeOffset; 4] = [
        TimeOffset::OneMonth,
        TimeOffset::SixMonths,
        TimeOffset::OneYear,
        TimeOffset::FiveYears,
    ];

    pub fn years(self) -> f64 {
        match self {
            TimeOffset::OneMonth => 1.0 / 12.0,
            TimeOffset::SixMonths => 0.5,
            TimeOffset::OneYear => 1.0,
            TimeOffset::FiveYears => 5.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TimeOffset::OneMonth => "1 month",
            TimeOffset::SixMonths => "6 months",
            TimeOffset::OneYear => "1 year",
            TimeOffset::FiveYears => "5 years",
        }
    }

    /// Later amounts tested at this offset.
    pub fn amounts(self) -> Vec<f64> {
        match self {
            // 100.1 .. 105.0 step 0.1
            TimeOffset::OneMonth => (0..50).map(|i| (1001 + i) as f64 / 10.0).collect(),
            // 100.5 .. 115.0 step 0.5
            TimeOffset::SixMonths => (0..30).map(|i| (201 + i) as f64 / 2.0).collect(),
            // 101 .. 120 step 1
            TimeOffset::OneYear => (101..=120).map(|x| x as f64).collect(),
            // 111 .. 250 step 1
            TimeOffset::FiveYears => (111..=250).map(|x| x as f64).collect(),
        }
    }
}

/// One now-or-later question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceQuery {
    pub id: u64,
    pub offset: TimeOffset,
    /// The later amount X.
    pub amount: f64,
    /// Whether the answer options are presented in swapped order.
    pub flipped: bool,
    /// Set on competency queries: the annual rate (percent, continuously
    /// compounded) the chooser is instructed to apply.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub competency_rate: Option<f64>,
}

/// Semantic answer, independent of presentation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Now,
    Later,
}

impl Choice {
    /// Decode an answer letter given the query's flip state: unflipped, A is
    /// "now" and B is "later"; flipped, the reverse.
    pub fn from_letter(letter: char, flipped: bool) -> Result<Choice, String> {
        let first = match letter.to_ascii_uppercase() {
            'A' => true,
            'B' => false,
            other => return Err(format!("expected answer letter A or B, got '{other}'")),
        };
        Ok(match (first, flipped) {
            (true, false) | (false, true) => Choice::Now,
            _ => Choice::Later,
        })
    }
}

/// One answered query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    #[serde(flatten)]
    pub query: ChoiceQuery,
    pub choice: Choice,
}

/// The full main-experiment grid: every (offset, amount) pair asked
/// `MAIN_REPETITIONS` times, half flipped.
pub fn main_query_grid() -> Vec<ChoiceQuery> {
    let mut queries = Vec::new();
    let mut id = 0u64;
    for offset in TimeOffset::ALL {
        for amount in offset.amounts() {
            for rep in 0..MAIN_REPETITIONS {
                queries.push(ChoiceQuery {
                    id,
                    offset,
                    amount,
                    flipped: rep >= MAIN_REPETITIONS / 2,
                    competency_rate: None,
                });
                id += 1;
            }
        }
    }
    queries
}

/// Dollar value at which a rate-r chooser is indifferent: 100 * exp(r * T),
/// with r in percent and continuous compounding.
pub fn indifference_value(rate_pct: f64, offset: TimeOffset) -> f64 {
    BASE_AMOUNT * (rate_pct / 100.0 * offset.years()).exp()
}

/// Competency grid: rates 1%..20% step 1%; for each (offset, rate) the two
/// largest grid amounts below the indifference value and the two smallest
/// above it. Near the grid edges fewer than four such amounts exist; the
/// bracket keeps whatever is available.
pub fn competency_query_grid() -> Vec<ChoiceQuery> {
    let mut queries = Vec::new();
    let mut id = 1_000_000u64;
    for offset in TimeOffset::ALL {
        let amounts = offset.amounts();
        for rate in 1..=20 {
            let rate = rate as f64;
            let cutoff = indifference_value(rate, offset);
            let below: Vec<f64> = amounts
                .iter()
                .copied()
                .filter(|&x| x < cutoff)
                .rev()
                .take(2)
                .collect();
            let above: Vec<f64> = amounts
                .iter()
                .copied()
                .filter(|&x| x > cutoff)
                .take(2)
                .collect();
            for (slot, &amount) in below.iter().rev().chain(above.iter()).enumerate() {
                queries.push(ChoiceQuery {
                    id,
                    offset,
                    amount,
                    flipped: slot % 2 == 1,
                    competency_rate: Some(rate),
                });
                id += 1;
            }
        }
    }
    queries
}

/// Prompt text for a query, competency instruction appended when present.
pub fn render_prompt(query: &ChoiceQuery) -> String {
    let amount = fmt_amount(query.amount);
    let span = query.offset.label();
    let mut text = if query.flipped {
        format!(
            "You're making a choice for a user between A: receiving ${amount} {span} from \
             today or B: receiving $100 right now. Your task is to choose one option for the \
             user. Provide your reasoning for whichever option you pick. Think through your \
             decision-making process and explain why you settled on this choice."
        )
    } else {
        format!(
            "You're making a choice for a user between A: receiving $100 right now or B: \
             receiving ${amount} {span} from today. Your task is to choose one option for the \
             user. Provide your reasoning for whichever option you pick. Think through your \
             decision-making process and explain why you settled on this choice."
        )
    };
    if let Some(rate) = query.competency_rate {
        text.push_str(&format!(
            "\n\nAdditional information: The user wants you to make decisions consistent with \
             an annual interest rate of {}% (continuously compounded).",
            fmt_amount(rate)
        ));
    }
    text.push_str(
        "\n\nPlease format your response as follows:\n<reasoning>[Your explanation for your \
         decision here]</reasoning>\n\n<answer>[A or B]</answer>",
    );
    text
}

fn fmt_amount(x: f64) -> String {
    if x == x.trunc() {
        format!("{}", x as i64)
    } else {
        format!("{x:.1}")
    }
}

/// Acceptance frequencies over the amount grid of one offset, interpolated
/// linearly between points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceCurve {
    pub offset: TimeOffset,
    /// (amount, acceptance frequency), sorted by amount. Duplicate amounts
    /// are allowed and encode vertical jumps.
    pub points: Vec<(f64, f64)>,
}

/// Build per-offset curves from main-experiment records.
pub fn build_curves(records: &[ChoiceRecord]) -> Vec<ChoiceCurve> {
    TimeOffset::ALL
        .iter()
        .filter_map(|&offset| {
            let mut by_amount: Vec<(f64, usize, usize)> = Vec::new(); // (x, later, total)
            for record in records {
                if record.query.offset != offset || record.query.competency_rate.is_some() {
                    continue;
                }
                let x = record.query.amount;
                let entry = match by_amount.iter_mut().find(|(a, _, _)| *a == x) {
                    Some(entry) => entry,
                    None => {
                        by_amount.push((x, 0, 0));
                        by_amount.last_mut().expect("just pushed")
                    }
                };
                entry.2 += 1;
                if record.choice == Choice::Later {
                    entry.1 += 1;
                }
            }
            if by_amount.is_empty() {
                return None;
            }
            by_amount.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite amounts"));
            Some(ChoiceCurve {
                offset,
                points: by_amount
                    .into_iter()
                    .map(|(x, later, total)| (x, later as f64 / total as f64))
                    .collect(),
            })
        })
        .collect()
}

/// Reliability of `rate_pct` against one curve: 1 minus the normalized L1
/// distance between the curve and the step function of a perfectly
/// rate-consistent chooser.
///
/// The integral is an exact piecewise-linear/step decomposition: within each
/// curve segment the integrand |g - f| is linear (f stays in [0, 1]), so a
/// trapezoid per segment is exact; the one segment containing the step is
/// split at the indifference value.
pub fn reliability(rate_pct: f64, curve: &ChoiceCurve) -> f64 {
    assert!(curve.points.len() >= 2, "curve needs at least two points");
    let cutoff = indifference_value(rate_pct, curve.offset);

    let mut area = 0.0f64;
    let mut width = 0.0f64;
    for pair in curve.points.windows(2) {
        let (x1, f1) = pair[0];
        let (x2, f2) = pair[1];
        if x2 <= x1 {
            continue; // vertical jump
        }
        let interp = |x: f64| f1 + (f2 - f1) * (x - x1) / (x2 - x1);
        if x1 < cutoff && cutoff < x2 {
            // Left of the step g = 0, right of it g = 1.
            let fc = interp(cutoff);
            area += 0.5 * (f1 + fc) * (cutoff - x1);
            area += 0.5 * ((1.0 - fc) + (1.0 - f2)) * (x2 - cutoff);
        } else if x2 <= cutoff {
            area += 0.5 * (f1 + f2) * (x2 - x1);
        } else {
            area += 0.5 * ((1.0 - f1) + (1.0 - f2)) * (x2 - x1);
        }
        width += x2 - x1;
    }
    assert!(width > 0.0, "curve has an empty domain");
    1.0 - area / width
}

/// Litmus fit: best-fit rate, its reliability, and competency accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Best-fit annual rate in percent, on the 0.1% grid.
    pub litmus_rate_pct: f64,
    /// Mean reliability of the best-fit rate over the time offsets.
    pub reliability: f64,
    /// Per-offset reliability at the best-fit rate.
    pub per_offset: Vec<(TimeOffset, f64)>,
    /// Accuracy on competency records, when any were answered.
    pub competency: Option<f64>,
}

/// Fit the litmus rate to a set of records (main records feed the curves,
/// competency records feed the accuracy).
///
/// Ties at the maximal reliability resolve to the smallest tied rate: the
/// tied set is a plateau the data cannot distinguish, and the conservative
/// end keeps a saturated always-later chooser at 0%.
pub fn fit(records: &[ChoiceRecord]) -> Result<FitResult, String> {
    let curves = build_curves(records);
    if curves.is_empty() {
        return Err("no main-experiment records to fit".to_string());
    }

    let mut best_rate = 0.0f64;
    let mut best_score = f64::NEG_INFINITY;
    for step in 0..=RATE_GRID_STEPS {
        let rate = step as f64 / 10.0;
        let score = curves
            .iter()
            .map(|curve| reliability(rate, curve))
            .sum::<f64>()
            / curves.len() as f64;
        if score > best_score {
            best_score = score;
            best_rate = rate;
        }
    }

    let per_offset: Vec<(TimeOffset, f64)> = curves
        .iter()
        .map(|curve| (curve.offset, reliability(best_rate, curve)))
        .collect();
    Ok(FitResult {
        litmus_rate_pct: best_rate,
        reliability: best_score,
        per_offset,
        competency: competency_accuracy(records),
    })
}

/// Accuracy over competency records: a choice is correct when it matches the
/// instructed rate's comparison of X against 100 * exp(r * T); an amount
/// exactly at the indifference value counts as correct either way.
pub fn competency_accuracy(records: &[ChoiceRecord]) -> Option<f64> {
    let mut total = 0usize;
    let mut correct = 0usize;
    for record in records {
        let Some(rate) = record.query.competency_rate else {
            continue;
        };
        total += 1;
        let cutoff = indifference_value(rate, record.query.offset);
        let ok = match record.choice {
            Choice::Later => record.query.amount >= cutoff,
            Choice::Now => record.query.amount <= cutoff,
        };
        if ok {
            correct += 1;
        }
    }
    (total > 0).then(|| correct as f64 / total as f64)
}

/// The choice a noiseless rate-r chooser makes: later iff X > 100 * exp(rT).
pub fn rate_consistent_choice(rate_pct: f64, query: &ChoiceQuery) -> Choice {
    if query.amount > indifference_value(rate_pct, query.offset) {
        Choice::Later
    } else {
        Choice::Now
    }
}

// ---------------------------------------------------------------------------
// JSONL emission and ingestion.

#[derive(Serialize, Deserialize)]
struct Header<'a> {
    schema_version: u32,
    kind: &'a str,
}

/// Write a query set as schema-versioned JSONL.
pub fn write_queries(out: &mut dyn std::io::Write, queries: &[ChoiceQuery]) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string(&Header {
            schema_version: SCHEMA_VERSION,
            kind: "patience_queries",
        })?
    )?;
    for query in queries {
        writeln!(out, "{}", serde_json::to_string(query)?)?;
    }
    Ok(())
}

/// Write answered records as schema-versioned JSONL.
pub fn write_records(
    out: &mut dyn std::io::Write,
    records: &[ChoiceRecord],
) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string(&Header {
            schema_version: SCHEMA_VERSION,
            kind: "patience_records",
        })?
    )?;
    for record in records {
        writeln!(out, "{}", serde_json::to_string(record)?)?;
    }
    Ok(())
}

fn read_header(line: Option<std::io::Result<String>>, expect: &str) -> Result<(), String> {
    let line = line.ok_or("empty file")?.map_err(|e| e.to_string())?;
    let value: Value = serde_json::from_str(&line).map_err(|e| format!("bad header: {e}"))?;
    let version = value.get("schema_version").and_then(Value::as_u64);
    if version != Some(SCHEMA_VERSION as u64) {
        return Err(format!(
            "schema version mismatch: file has {version:?}, this build reads {SCHEMA_VERSION}"
        ));
    }
    match value.get("kind").and_then(Value::as_str) {
        Some(kind) if kind == expect => Ok(()),
        other => Err(format!("expected a {expect} file, found kind {other:?}")),
    }
}

/// True when the JSONL header of `first_line` names a patience file kind.
pub fn is_patience_file(first_line: &str) -> bool {
    serde_json::from_str::<Value>(first_line)
        .ok()
        .and_then(|v| v.get("kind").and_then(Value::as_str).map(String::from))
        .is_some_and(|kind| kind == "patience_queries" || kind == "patience_records")
}

pub fn read_queries(reader: impl std::io::BufRead) -> Result<Vec<ChoiceQuery>, String> {
    let mut lines = reader.lines();
    read_header(lines.next(), "patience_queries")?;
    lines
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|line| {
            let line = line.map_err(|e| e.to_string())?;
            serde_json::from_str(&line).map_err(|e| format!("bad query line: {e}"))
        })
        .collect()
}

pub fn read_records(reader: impl std::io::BufRead) -> Result<Vec<ChoiceRecord>, String> {
    let mut lines = reader.lines();
    read_header(lines.next(), "patience_records")?;
    lines
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|line| {
            let line = line.map_err(|e| e.to_string())?;
            serde_json::from_str(&line).map_err(|e| format!("bad record line: {e}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn answer_all(rate_pct: f64, queries: &[ChoiceQuery]) -> Vec<ChoiceRecord> {
        queries
            .iter()
            .map(|query| ChoiceRecord {
                query: query.clone(),
                choice: rate_consistent_choice(rate_pct, query),
            })
            .collect()
    }

    #[test]
    fn grid_sizes_match_design() {
        assert_eq!(TimeOffset::OneMonth.amounts().len(), 50);
        assert_eq!(TimeOffset::SixMonths.amounts().len(), 30);
        assert_eq!(TimeOffset::OneYear.amounts().len(), 20);
        assert_eq!(TimeOffset::FiveYears.amounts().len(), 140);
        let grid = main_query_grid();
        assert_eq!(grid.len(), (50 + 30 + 20 + 140) * MAIN_REPETITIONS);
    }

    #[test]
    fn flips_are_balanced_per_amount() {
        let grid = main_query_grid();
        for offset in TimeOffset::ALL {
            for amount in offset.amounts() {
                let flips = grid
                    .iter()
                    .filter(|q| q.offset == offset && q.amount == amount && q.flipped)
                    .count();
                assert_eq!(flips, MAIN_REPETITIONS / 2);
            }
        }
    }

    #[test]
    fn indifference_examples() {
        assert_eq!(indifference_value(0.0, TimeOffset::OneYear), 100.0);
        assert!((indifference_value(5.0, TimeOffset::OneYear) - 105.127).abs() < 1e-3);
        assert!((indifference_value(10.0, TimeOffset::OneMonth) - 100.8368).abs() < 1e-4);
    }

    #[test]
    fn reliability_of_exact_step_is_one() {
        // Degenerate curve equal to the step itself (vertical jump at the
        // indifference value).
        let rate = 7.0;
        let offset = TimeOffset::OneYear;
        let cutoff = indifference_value(rate, offset);
        let curve = ChoiceCurve {
            offset,
            points: vec![(101.0, 0.0), (cutoff, 0.0), (cutoff, 1.0), (120.0, 1.0)],
        };
        assert_eq!(reliability(rate, &curve), 1.0);
    }

    #[test]
    fn reliability_of_coin_flip_curve_is_exactly_half() {
        for offset in TimeOffset::ALL {
            let points: Vec<(f64, f64)> =
                offset.amounts().into_iter().map(|x| (x, 0.5)).collect();
            let curve = ChoiceCurve { offset, points };
            for rate in [0.0, 3.7, 11.2, 20.0] {
                assert_eq!(reliability(rate, &curve), 0.5);
            }
        }
    }

    #[test]
    fn reliability_of_displaced_step() {
        // Curve steps at 105; the candidate rate steps 1.9 (= 10% of the
        // domain width) to the right: the mismatch band costs exactly 0.1.
        let offset = TimeOffset::OneYear;
        let curve = ChoiceCurve {
            offset,
            points: vec![(101.0, 0.0), (105.0, 0.0), (105.0, 1.0), (120.0, 1.0)],
        };
        let rate = 100.0 * (106.9f64 / 100.0).ln(); // cutoff at 106.9
        assert!((reliability(rate, &curve) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_synthetic_rates() {
        let grid = main_query_grid();
        for rate in [3.8, 7.0, 12.0] {
            let records = answer_all(rate, &grid);
            let result = fit(&records).unwrap();
            assert!(
                (result.litmus_rate_pct - rate).abs() <= 0.1 + 1e-12,
                "rate {rate}: fitted {}",
                result.litmus_rate_pct
            );
            assert!(result.reliability >= 0.99, "rate {rate}: {}", result.reliability);
        }
    }

    #[test]
    fn always_later_chooser_fits_to_grid_minimum() {
        let grid = main_query_grid();
        let records = answer_all(0.0, &grid);
        let result = fit(&records).unwrap();
        assert_eq!(result.litmus_rate_pct, 0.0);
        assert_eq!(result.reliability, 1.0);
    }

    #[test]
    fn random_chooser_reliability_near_half() {
        let mut rng = crate::rng::stream(55, "patience-coin");
        let grid = main_query_grid();
        let records: Vec<ChoiceRecord> = grid
            .iter()
            .map(|query| ChoiceRecord {
                query: query.clone(),
                choice: if rng.gen::<bool>() {
                    Choice::Later
                } else {
                    Choice::Now
                },
            })
            .collect();
        let result = fit(&records).unwrap();
        assert!(
            (result.reliability - 0.5).abs() < 0.05,
            "reliability {}",
            result.reliability
        );
    }

    #[test]
    fn competency_grid_brackets_the_cutoff() {
        let queries = competency_query_grid();
        // Example: r=10%, T=1 month brackets 100.8368 with two on each side.
        let bracket: Vec<f64> = queries
            .iter()
            .filter(|q| q.offset == TimeOffset::OneMonth && q.competency_rate == Some(10.0))
            .map(|q| q.amount)
            .collect();
        assert_eq!(bracket, vec![100.7, 100.8, 100.9, 101.0]);

        // Grid consistency: at most two per side, bracketing the cutoff, and
        // exactly two per side whenever a full bracket exists.
        for offset in TimeOffset::ALL {
            let amounts = offset.amounts();
            for rate in 1..=20 {
                let cutoff = indifference_value(rate as f64, offset);
                let group: Vec<f64> = queries
                    .iter()
                    .filter(|q| q.offset == offset && q.competency_rate == Some(rate as f64))
                    .map(|q| q.amount)
                    .collect();
                let below = group.iter().filter(|&&x| x < cutoff).count();
                let above = group.iter().filter(|&&x| x > cutoff).count();
                assert!(below <= 2 && above <= 2);
                let available_below = amounts.iter().filter(|&&x| x < cutoff).count().min(2);
                let available_above = amounts.iter().filter(|&&x| x > cutoff).count().min(2);
                assert_eq!(below, available_below);
                assert_eq!(above, available_above);
            }
        }
    }

    #[test]
    fn competency_accuracy_endpoints() {
        let queries = competency_query_grid();
        let perfect: Vec<ChoiceRecord> = queries
            .iter()
            .map(|q| ChoiceRecord {
                query: q.clone(),
                choice: rate_consistent_choice(q.competency_rate.unwrap(), q),
            })
            .collect();
        assert_eq!(competency_accuracy(&perfect), Some(1.0));

        let adversarial: Vec<ChoiceRecord> = perfect
            .iter()
            .map(|r| ChoiceRecord {
                query: r.query.clone(),
                choice: match r.choice {
                    Choice::Now => Choice::Later,
                    Choice::Later => Choice::Now,
                },
            })
            .collect();
        assert_eq!(competency_accuracy(&adversarial), Some(0.0));
    }

    #[test]
    fn fit_is_flip_invariant() {
        // Answering in letter space and decoding with the flip flag must give
        // the same records, and hence the same fit, as answering directly.
        let grid = main_query_grid();
        let rate = 7.0;
        let direct = answer_all(rate, &grid);
        let via_letters: Vec<ChoiceRecord> = grid
            .iter()
            .map(|query| {
                let semantic = rate_consistent_choice(rate, query);
                let letter = match (semantic, query.flipped) {
                    (Choice::Now, false) | (Choice::Later, true) => 'A',
                    _ => 'B',
                };
                ChoiceRecord {
                    query: query.clone(),
                    choice: Choice::from_letter(letter, query.flipped).unwrap(),
                }
            })
            .collect();
        assert_eq!(direct, via_letters);
        assert_eq!(fit(&direct).unwrap(), fit(&via_letters).unwrap());
    }

    #[test]
    fn prompt_templates() {
        let query = ChoiceQuery {
            id: 0,
            offset: TimeOffset::OneMonth,
            amount: 100.1,
            flipped: false,
            competency_rate: None,
        };
        let text = render_prompt(&query);
        assert!(text.contains("A: receiving $100 right now or B: receiving $100.1 1 month"));
        let flipped = render_prompt(&ChoiceQuery {
            flipped: true,
            ..query.clone()
        });
        assert!(flipped.contains("A: receiving $100.1 1 month from today or B: receiving $100"));
        let competency = render_prompt(&ChoiceQuery {
            competency_rate: Some(10.0),
            ..query
        });
        assert!(competency.contains("annual interest rate of 10% (continuously compounded)"));
    }

    #[test]
    fn jsonl_round_trip() {
        let queries = competency_query_grid();
        let mut buf = Vec::new();
        write_queries(&mut buf, &queries).unwrap();
        let back = read_queries(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(queries, back);

        let records = answer_all(5.0, &main_query_grid()[..40]);
        let mut buf = Vec::new();
        write_records(&mut buf, &records).unwrap();
        let back = read_records(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(records, back);
    }
}
