//! Turbofan run-to-failure records: whitespace-separated text with 26
//! columns per line (engine id, cycle, 3 operating settings, 21 sensors).

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const COLUMNS: usize = 26;
pub const DEFAULT_CYCLE_CUTOFF: u32 = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct TurbofanRecord {
    pub engine_id: u32,
    pub cycle: u32,
    pub settings: [f64; 3],
    pub sensors: [f64; 21],
    /// The original numeric tokens, kept for lossless output.
    pub tokens: Vec<String>,
}

pub fn parse(text: &str) -> CliResult<Vec<TurbofanRecord>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::data(format!("line {}: {msg}", n + 1));
        if tokens.len() != COLUMNS {
            return Err(bad(format!("expected {COLUMNS} columns, found {}", tokens.len())));
        }
        let int = |i: usize, what: &str| -> CliResult<u32> {
            let v: f64 = tokens[i]
                .parse()
                .map_err(|_| bad(format!("{what} '{}' is not a number", tokens[i])))?;
            if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
                return Err(bad(format!("{what} '{}' is not a positive integer", tokens[i])));
            }
            Ok(v as u32)
        };
        let engine_id = int(0, "engine id")?;
        let cycle = int(1, "cycle")?;
        let mut vals = [0.0; 24];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = tokens[k + 2]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("column {} '{}' is not a finite number", k + 3, tokens[k + 2])))?;
        }
        let mut settings = [0.0; 3];
        settings.copy_from_slice(&vals[..3]);
        let mut sensors = [0.0; 21];
        sensors.copy_from_slice(&vals[3..]);
        out.push(TurbofanRecord {
            engine_id,
            cycle,
            settings,
            sensors,
            tokens: tokens[2..].iter().map(|s| s.to_string()).collect(),
        });
    }
    if out.is_empty() {
        return Err(CliError::data("no turbofan records found"));
    }
    Ok(out)
}

/// Records grouped by engine, with a warning for every engine whose cycles
/// do not run 1, 2, 3, ... in file order.
pub fn group(records: &[TurbofanRecord]) -> BTreeMap<u32, Vec<&TurbofanRecord>> {
    let mut by_engine: BTreeMap<u32, Vec<&TurbofanRecord>> = BTreeMap::new();
    for r in records {
        by_engine.entry(r.engine_id).or_default().push(r);
    }
    for (id, recs) in &by_engine {
        if recs.iter().enumerate().any(|(i, r)| r.cycle as usize != i + 1) {
            log::warn!("engine {id}: cycles are not contiguous from 1");
        }
    }
    by_engine
}

/// Operating-condition label: the three settings rounded to 2 decimals,
/// hashed.
pub fn condition_label(settings: &[f64; 3]) -> String {
    let key: Vec<String> = settings
        .iter()
        .map(|v| {
            let r = (v * 100.0).round() / 100.0;
            // Avoid "-0.00" and "0.00" hashing differently.
            format!("{:.2}", if r == 0.0 { 0.0 } else { r })
        })
        .collect();
    let digest = Sha256::digest(key.join(",").as_bytes());
    format!("op-{}", &format!("{digest:x}")[..8])
}

pub fn header() -> Vec<String> {
    let mut h: Vec<String> = ["engine_id", "cycle", "condition", "normal"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((1..=3).map(|i| format!("setting_{i}")));
    h.extend((1..=21).map(|i| format!("sensor_{i:02}")));
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub engines: usize,
    pub records: usize,
    pub shortest_life: u32,
    pub longest_life: u32,
    pub conditions: usize,
}

pub fn summarize(records: &[TurbofanRecord]) -> Summary {
    let groups = group(records);
    let lives: Vec<u32> = groups
        .values()
        .map(|rs| rs.iter().map(|r| r.cycle).max().unwrap_or(0))
        .collect();
    let conditions: std::collections::BTreeSet<String> =
        records.iter().map(|r| condition_label(&r.settings)).collect();
    Summary {
        engines: groups.len(),
        records: records.len(),
        shortest_life: lives.iter().copied().min().unwrap_or(0),
        longest_life: lives.iter().copied().max().unwrap_or(0),
        conditions: conditions.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: u32, cycle: u32, s: [f64; 3]) -> String {
        let mut t = vec![id.to_string(), cycle.to_string()];
        t.extend(s.iter().map(|v| v.to_string()));
        t.extend((0..21).map(|k| format!("{}", 500.0 + k as f64)));
        t.join(" ")
    }

    #[test]
    fn two_line_file() {
        let text = format!("{}\n{}\n", line(1, 1, [0.0, 0.0, 100.0]), line(1, 2, [0.0, 0.0, 100.0]));
        let recs = parse(&text).unwrap();
        let s = summarize(&recs);
        assert_eq!((s.engines, s.records, s.shortest_life, s.conditions), (1, 2, 2, 1));
        assert_eq!(recs[1].sensors[20], 520.0);
    }

    #[test]
    fn short_line_is_named() {
        let mut bad = line(1, 1, [0.0; 3]);
        bad.truncate(bad.rfind(' ').unwrap());
        let text = format!("{}\n{bad}\n", line(1, 1, [0.0; 3]));
        let e = parse(&text).unwrap_err();
        assert!(e.message.contains("line 2") && e.message.contains("25"), "{}", e.message);
    }

    #[test]
    fn conditions_round_to_two_decimals() {
        let a = condition_label(&[42.0049, 0.8400, 100.0]);
        let b = condition_label(&[41.9982, 0.8408, 100.0]);
        let c = condition_label(&[35.0, 0.84, 100.0]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(condition_label(&[-0.0001, 0.0, 100.0]), condition_label(&[0.0001, 0.0, 100.0]));
        assert!(a.starts_with("op-") && a.len() == 11);
    }

    #[test]
    fn header_width() {
        assert_eq!(header().len(), COLUMNS + 2);
    }
}
