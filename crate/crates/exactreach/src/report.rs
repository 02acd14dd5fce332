//! Text and JSON rendering of results.

use std::fmt::Write as _;

use exactreach_core::rational::{decimal, fraction_string, to_f64};
use serde::Serialize;

use crate::pipeline::{ExactResult, Timings};

#[derive(Serialize)]
struct JsonValue {
    state: usize,
    num: String,
    den: String,
    approx: f64,
}

#[derive(Serialize)]
struct JsonTimings {
    value_iteration_s: f64,
    lp_construction_s: f64,
    simplex_s: f64,
    total_s: f64,
}

#[derive(Serialize)]
struct JsonResult<'a> {
    status: String,
    objective: String,
    values: Vec<JsonValue>,
    pivots: usize,
    scheduler_optimal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'a str>,
    timings: JsonTimings,
}

fn shown(result: &ExactResult, timings: bool) -> Timings {
    if timings {
        result.timings
    } else {
        Timings::default()
    }
}

/// One JSON document per result. `approx` is the nearest double to the
/// exact value. With `timings` off every timing is reported as 0, which
/// makes the output reproducible byte for byte.
pub fn to_json(result: &ExactResult, timings: bool) -> String {
    let t = shown(result, timings);
    let doc = JsonResult {
        status: result.status.to_string(),
        objective: result.objective.to_string(),
        values: result
            .values
            .iter()
            .enumerate()
            .map(|(state, v)| JsonValue {
                state,
                num: v.numer().to_string(),
                den: v.denom().to_string(),
                approx: to_f64(v),
            })
            .collect(),
        pivots: result.pivots,
        scheduler_optimal: result.scheduler_optimal,
        message: result.message.as_deref(),
        timings: JsonTimings {
            value_iteration_s: t.value_iteration_s,
            lp_construction_s: t.lp_construction_s,
            simplex_s: t.simplex_s,
            total_s: t.total_s,
        },
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n"
}

pub fn to_text(result: &ExactResult, timings: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status: {}", result.status);
    let _ = writeln!(out, "objective: {}", result.objective);
    if let Some(msg) = &result.message {
        let _ = writeln!(out, "message: {msg}");
    }
    let _ = writeln!(out, "pivots: {}", result.pivots);
    let _ = writeln!(out, "scheduler optimal: {}", result.scheduler_optimal);
    if result.repaired {
        let _ = writeln!(out, "scheduler repaired: true");
    }
    for (s, v) in result.values.iter().enumerate() {
        let _ = writeln!(out, "state {s}: {} ({})", fraction_string(v), decimal(v));
    }
    if timings {
        let t = result.timings;
        let _ = writeln!(
            out,
            "timings: value iteration {:.6}s, lp construction {:.6}s, simplex {:.6}s, total {:.6}s",
            t.value_iteration_s, t.lp_construction_s, t.simplex_s, t.total_s
        );
    }
    out
}
