//! Batch processing: one whitespace-separated record "D1 D2 [x]" per line,
//! `#` comments and blank lines ignored. Rows run concurrently up to the
//! jobs bound; output order matches input order. Per-row failures carry
//! machine-readable codes and never abort the batch.

use std::io::Read;
use std::sync::Mutex;

use linkcount::arith::Int;
use linkcount::error::{Error, Result};
use linkcount::intersection::total_intersection;
use linkcount::linking::{
    build_profile, candidate_orders, classify_discs, count_linked, ramified_set, CountQuery,
};
use linkcount::quadclass::make_discriminant;

use crate::{Format, SCHEMA};

#[derive(Debug)]
struct Row {
    line_no: usize,
    d1: Int,
    d2: Int,
    x: Option<Int>,
}

#[derive(serde::Serialize)]
struct RowResult {
    line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<serde_json::Value>,
}

fn parse_rows(text: &str) -> (Vec<Row>, Vec<RowResult>) {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed: Result<Row> = (|| {
            if fields.len() < 2 || fields.len() > 3 {
                return Err(Error::InvalidArgument(format!(
                    "expected 'D1 D2 [x]', found {} fields",
                    fields.len()
                )));
            }
            let num = |s: &str| -> Result<Int> {
                s.parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad integer {s:?}")))
            };
            Ok(Row {
                line_no,
                d1: num(fields[0])?,
                d2: num(fields[1])?,
                x: fields.get(2).map(|s| num(s)).transpose()?,
            })
        })();
        match parsed {
            Ok(row) => rows.push(row),
            Err(e) => errors.push(RowResult {
                line: line_no,
                error: Some(e.to_string()),
                code: Some(e.code().into()),
                summary: None,
            }),
        }
    }
    (rows, errors)
}

fn process(row: &Row, disc: Option<Int>, level: Int) -> Result<serde_json::Value> {
    let d1 = make_discriminant(row.d1)?;
    let d2 = make_discriminant(row.d2)?;
    match (row.x, disc) {
        (None, None) => {
            let cands = candidate_orders(&d1, &d2)?;
            let classes: std::collections::BTreeSet<Vec<Int>> = cands
                .iter()
                .map(|c| c.ramified.iter().copied().collect())
                .collect();
            Ok(serde_json::json!({
                "kind": "pair",
                "d1": row.d1, "d2": row.d2,
                "x_count": cands.len(),
                "ramification_classes": classes.len(),
            }))
        }
        (None, Some(disc)) => {
            let q = CountQuery::new(disc, level, None)?;
            let report = total_intersection(&d1, &d2, &q)?;
            Ok(serde_json::json!({
                "kind": "intersect",
                "d1": row.d1, "d2": row.d2, "disc": disc, "level": level,
                "total_unsigned": report.total_unsigned,
                "total_signed": report.total_signed,
            }))
        }
        (Some(x), None) => {
            let t = classify_discs(&d1, &d2, x)?;
            let ram: Vec<Int> = ramified_set(&t)?.into_iter().collect();
            Ok(serde_json::json!({
                "kind": "triple",
                "d1": row.d1, "d2": row.d2, "x": x,
                "nice": t.is_nice(),
                "ramified": ram,
            }))
        }
        (Some(x), Some(disc)) => {
            let t = classify_discs(&d1, &d2, x)?;
            let profile = build_profile(&t)?;
            let q = CountQuery::new(disc, level, None)?;
            Ok(serde_json::json!({
                "kind": "count",
                "d1": row.d1, "d2": row.d2, "x": x, "disc": disc, "level": level,
                "count": count_linked(&profile, &q)?,
            }))
        }
    }
}

pub fn run(path: &str, disc: Option<Int>, level: Int, format: Format, jobs: usize) -> Result<i32> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::InvalidArgument(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{path}: {e}")))?;
    }
    let (rows, parse_errors) = parse_rows(&text);

    let results: Mutex<Vec<Option<RowResult>>> =
        Mutex::new((0..rows.len()).map(|_| None).collect());
    let next: Mutex<usize> = Mutex::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(rows.len().max(1)) {
            scope.spawn(|| loop {
                let i = {
                    let mut n = next.lock().unwrap();
                    let i = *n;
                    *n += 1;
                    i
                };
                if i >= rows.len() {
                    break;
                }
                let row = &rows[i];
                let out = match process(row, disc, level) {
                    Ok(summary) => RowResult {
                        line: row.line_no,
                        error: None,
                        code: None,
                        summary: Some(summary),
                    },
                    Err(e) => RowResult {
                        line: row.line_no,
                        error: Some(e.to_string()),
                        code: Some(e.code().into()),
                        summary: None,
                    },
                };
                results.lock().unwrap()[i] = Some(out);
            });
        }
    });

    let mut all: Vec<RowResult> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("row processed"))
        .chain(parse_errors)
        .collect();
    all.sort_by_key(|r| r.line);

    let failed = all.iter().filter(|r| r.error.is_some()).count();
    match format {
        Format::Json => {
            let v = serde_json::json!({ "schema": SCHEMA, "rows": all });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Table | Format::Tsv => {
            for r in &all {
                match (&r.error, &r.summary) {
                    (Some(e), _) => println!("line {}\terror[{}]\t{e}", r.line, r.code.as_deref().unwrap_or("")),
                    (None, Some(s)) => println!("line {}\tok\t{s}", r.line),
                    _ => unreachable!(),
                }
            }
        }
    }
    Ok(if failed == 0 { 0 } else { 1 })
}
