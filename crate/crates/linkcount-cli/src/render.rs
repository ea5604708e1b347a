//! Deterministic table / TSV / JSON rendering. Every number is exact;
//! rationals print as "n" or "n/d".

use std::collections::BTreeMap;

use linkcount::arith::Int;
use linkcount::error::Result;
use linkcount::intersection::IntersectionReport;
use linkcount::linking::XCandidate;
use linkcount::orders::RationalLattice;
use linkcount::rat::{rat_display, Rat};

use crate::{Format, SCHEMA};

pub fn epsilon_table(rows: &[(Int, Option<i32>)], format: Format) {
    match format {
        Format::Table => {
            let cells: Vec<(String, String)> = rows
                .iter()
                .map(|(p, e)| {
                    (
                        p.to_string(),
                        e.map(|v| v.to_string()).unwrap_or_else(|| "·".into()),
                    )
                })
                .collect();
            let width = |s: &str| s.len();
            let mut top = String::from("p      ");
            let mut bottom = String::from("eps(p) ");
            for (p, e) in &cells {
                let w = width(p).max(width(e));
                top.push_str(&format!(" {p:>w$}"));
                bottom.push_str(&format!(" {e:>w$}"));
            }
            println!("{top}");
            println!("{bottom}");
        }
        Format::Tsv => {
            println!("p\tepsilon");
            for (p, e) in rows {
                println!(
                    "{p}\t{}",
                    e.map(|v| v.to_string()).unwrap_or_else(|| "·".into())
                );
            }
        }
        Format::Json => {
            let map: BTreeMap<String, Option<i32>> =
                rows.iter().map(|(p, e)| (p.to_string(), *e)).collect();
            let v = serde_json::json!({ "schema": SCHEMA, "epsilon": map });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
    }
}

fn ramified_label(primes: &std::collections::BTreeSet<Int>) -> String {
    if primes.is_empty() {
        "-".into()
    } else {
        primes
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn algebras_table(cands: &[XCandidate], format: Format) {
    // Group x values by ramification class, keeping the class order by
    // sorted prime set.
    let mut groups: BTreeMap<Vec<Int>, Vec<Int>> = BTreeMap::new();
    for c in cands {
        groups
            .entry(c.ramified.iter().copied().collect())
            .or_default()
            .push(c.x);
    }
    match format {
        Format::Table => {
            println!("{:<16} x", "ramified");
            for (primes, xs) in &groups {
                let label = if primes.is_empty() {
                    "-".to_string()
                } else {
                    primes
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                let xs = xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                println!("{label:<16} {xs}");
            }
        }
        Format::Tsv => {
            println!("x\tnice\tramified\tlevels");
            for c in cands {
                println!(
                    "{}\t{}\t{}\t{}",
                    c.x,
                    c.nice,
                    ramified_label(&c.ramified),
                    c.levels
                        .as_ref()
                        .map(|ls| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","))
                        .unwrap_or_else(|| "-".into()),
                );
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = cands
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "x": c.x,
                        "nice": c.nice,
                        "ramified": c.ramified.iter().copied().collect::<Vec<Int>>(),
                        "levels": c.levels,
                    })
                })
                .collect();
            let v = serde_json::json!({ "schema": SCHEMA, "algebras": items });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
    }
}

pub fn count_table(rows: &[(Option<Int>, Int)], format: Format) {
    match format {
        Format::Table => {
            if rows.len() == 1 && rows[0].0.is_none() {
                println!("{}", rows[0].1);
            } else {
                println!("{:<8} count", "ell");
                for (e, n) in rows {
                    println!("{:<8} {n}", e.map(|x| x.to_string()).unwrap_or_else(|| "*".into()));
                }
            }
        }
        Format::Tsv => {
            println!("ell\tcount");
            for (e, n) in rows {
                println!("{}\t{n}", e.map(|x| x.to_string()).unwrap_or_else(|| "*".into()));
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(e, n)| serde_json::json!({ "ell": e, "count": n }))
                .collect();
            let v = serde_json::json!({ "schema": SCHEMA, "counts": items });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
    }
}

pub fn intersect_report(report: &IntersectionReport, q: Option<Int>, format: Format) {
    match format {
        Format::Table => {
            println!("{:<8} {:<8} levels", "x", "F");
            for px in &report.per_x {
                if px.f_value == 0 {
                    continue;
                }
                let levels = px
                    .levels
                    .iter()
                    .map(|(l, c)| format!("{l}:{c}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("{:<8} {:<8} {levels}", px.x, px.f_value);
            }
            println!("total_unsigned {}", report.total_unsigned);
            println!("total_signed   {}", report.total_signed);
            match q {
                Some(p) => println!(
                    "q_weighted[{p}] {}",
                    report.q_weighted.get(&p).copied().unwrap_or(report.total_unsigned)
                ),
                None => {
                    for (p, w) in &report.q_weighted {
                        println!("q_weighted[{p}] {w}");
                    }
                }
            }
        }
        Format::Tsv => {
            println!("x\tF\tlevels");
            for px in &report.per_x {
                let levels = px
                    .levels
                    .iter()
                    .map(|(l, c)| format!("{l}:{c}"))
                    .collect::<Vec<_>>()
                    .join(",");
                println!("{}\t{}\t{levels}", px.x, px.f_value);
            }
        }
        Format::Json => {
            let v = serde_json::json!({ "schema": SCHEMA, "report": report });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
    }
}

pub fn order_json(lat: &RationalLattice, frame_det: Option<Rat>) -> Result<()> {
    let json = lat.to_json()?;
    let v = serde_json::json!({
        "schema": SCHEMA,
        "lattice": json,
        "reduced_discriminant": rat_display(&lat.reduced_discriminant()?),
        "determinant": rat_display(&lat.determinant()?),
        "frame_determinant": frame_det.map(|d| rat_display(&d)),
    });
    println!("{}", serde_json::to_string_pretty(&v).unwrap());
    Ok(())
}
