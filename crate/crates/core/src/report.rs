//! Plain-text spectrum reports: a version header, config echo, stage stats,
//! then one line per length with its witness route spelled out in vertex ids
//! so small instances can be audited by eye. `verify` re-realizes every
//! witness against the instance.

use crate::engine::SpectrumReport;
use crate::error::{Error, Result};
use crate::graph::{realize_route, Dir, HamGraph, RouteDescriptor, RouteStep};

pub const REPORT_HEADER: &str = "CYCLESPEC-REPORT v1";

pub fn write_report(rep: &SpectrumReport, g: &HamGraph) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    out.push_str(&format!("N {}\n", rep.stats.n));
    for line in rep.config.serialize().lines() {
        out.push_str(&format!("CONFIG {line}\n"));
    }
    let s = &rep.stats;
    out.push_str(&format!(
        "STAT ell={} heavy={} offset={} good={} blocks={} selected={}\n",
        s.ell, s.heavy, s.offset, s.good, s.blocks, s.blocks_selected
    ));
    if let Some(reason) = &s.degraded {
        out.push_str(&format!("STAT degraded={}\n", reason.replace('\n', " ")));
    }
    for b in &s.block_stats {
        out.push_str(&format!(
            "STAT block index={} chords={} family={} branch={}\n",
            b.index, b.chords, b.family, b.branch
        ));
    }
    out.push_str(&format!("LENGTHS {}\n", rep.lengths.len()));
    for (l, route) in &rep.lengths {
        out.push_str(&format!("L {l} {}", if route.closed { "closed" } else { "open" }));
        for step in &route.steps {
            match *step {
                RouteStep::Arc { from, to, dir } => {
                    out.push_str(&format!(
                        " ; A{dir} {} {}",
                        g.vertex_at(from),
                        g.vertex_at(to)
                    ));
                }
                RouteStep::Chord { from, to } => {
                    out.push_str(&format!(" ; C {} {}", g.vertex_at(from), g.vertex_at(to)));
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_lengths_csv(rep: &SpectrumReport) -> String {
    let mut out = String::from("length\n");
    for (l, _) in &rep.lengths {
        out.push_str(&format!("{l}\n"));
    }
    out
}

/// A parsed report: claimed lengths with their witness routes in vertex ids.
#[derive(Debug, Clone)]
pub struct ParsedReport {
    pub n: u32,
    pub entries: Vec<(u64, RouteDescriptor)>,
}

/// Parses a report against its instance, mapping vertex ids to positions.
pub fn parse_report(text: &str, g: &HamGraph) -> Result<ParsedReport> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (l0, header) = lines
        .next()
        .ok_or(Error::Parse { line: 0, msg: "empty report".into() })?;
    if header.trim() != REPORT_HEADER {
        return Err(Error::Parse { line: l0, msg: format!("bad header '{header}'") });
    }
    let mut n: Option<u32> = None;
    let mut declared: Option<usize> = None;
    let mut entries = Vec::new();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("N ") {
            n = Some(rest.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: "bad N".into(),
            })?);
        } else if line.starts_with("CONFIG ") || line.starts_with("STAT ") {
            continue;
        } else if let Some(rest) = line.strip_prefix("LENGTHS ") {
            declared = Some(rest.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: "bad LENGTHS count".into(),
            })?);
        } else if let Some(rest) = line.strip_prefix("L ") {
            entries.push(parse_length_line(rest, lineno, g)?);
        } else {
            return Err(Error::Parse { line: lineno, msg: format!("unexpected line '{line}'") });
        }
    }
    let n = n.ok_or(Error::Parse { line: 0, msg: "missing N line".into() })?;
    if n != g.n() {
        return Err(Error::Parse {
            line: 0,
            msg: format!("report is for n = {n}, instance has n = {}", g.n()),
        });
    }
    if let Some(d) = declared {
        if d != entries.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("declared {d} lengths, found {}", entries.len()),
            });
        }
    }
    Ok(ParsedReport { n, entries })
}

fn parse_length_line(rest: &str, lineno: usize, g: &HamGraph) -> Result<(u64, RouteDescriptor)> {
    let bad = |msg: String| Error::Parse { line: lineno, msg };
    let mut parts = rest.split(';');
    let head = parts.next().ok_or_else(|| bad("empty length line".into()))?;
    let mut it = head.split_whitespace();
    let length: u64 = it
        .next()
        .ok_or_else(|| bad("missing length".into()))?
        .parse()
        .map_err(|_| bad("bad length".into()))?;
    let closed = match it.next() {
        Some("closed") => true,
        Some("open") => false,
        other => return Err(bad(format!("expected closed/open, got {other:?}"))),
    };
    let pos = |tok: Option<&str>| -> Result<u32> {
        let t = tok.ok_or_else(|| bad("missing vertex".into()))?;
        let v: u32 = t.parse().map_err(|_| bad(format!("bad vertex '{t}'")))?;
        g.pos_of(v)
            .ok_or_else(|| bad(format!("vertex {v} not in instance")))
    };
    let mut steps = Vec::new();
    for step in parts {
        let mut it = step.split_whitespace();
        match it.next() {
            Some("A+") => steps.push(RouteStep::Arc {
                from: pos(it.next())?,
                to: pos(it.next())?,
                dir: Dir::Fwd,
            }),
            Some("A-") => steps.push(RouteStep::Arc {
                from: pos(it.next())?,
                to: pos(it.next())?,
                dir: Dir::Bwd,
            }),
            Some("C") => steps.push(RouteStep::Chord { from: pos(it.next())?, to: pos(it.next())? }),
            other => return Err(bad(format!("unknown step '{other:?}'"))),
        }
        if it.next().is_some() {
            return Err(bad("trailing tokens in step".into()));
        }
    }
    Ok((length, RouteDescriptor { steps, closed }))
}

/// Re-realizes every witness in a report: each must be a simple closed cycle
/// of exactly the claimed length. Returns the number of verified witnesses.
pub fn verify_report(g: &HamGraph, text: &str) -> Result<usize> {
    let parsed = parse_report(text, g)?;
    let mut seen = std::collections::HashSet::new();
    for (claimed, route) in &parsed.entries {
        if !route.closed {
            return Err(Error::InvalidRoute(format!(
                "witness for length {claimed} is not closed"
            )));
        }
        let w = realize_route(g, route)?;
        if w.length != *claimed {
            return Err(Error::InvalidRoute(format!(
                "witness realizes to length {}, claimed {claimed}",
                w.length
            )));
        }
        if !seen.insert(*claimed) {
            return Err(Error::InvalidRoute(format!("duplicate length {claimed}")));
        }
    }
    Ok(parsed.entries.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{full_spectrum, EngineConfig};
    use crate::testbed::{complete_k4, gen_chain_extremal};

    #[test]
    fn report_round_trip_verifies() {
        let g = complete_k4();
        let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
        let text = write_report(&rep, &g);
        assert!(text.starts_with(REPORT_HEADER));
        let count = verify_report(&g, &text).unwrap();
        assert_eq!(count, rep.lengths.len());
    }

    #[test]
    fn verify_detects_tampering() {
        let g = gen_chain_extremal(24, 3).unwrap();
        let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
        let text = write_report(&rep, &g);
        verify_report(&g, &text).unwrap();
        // Corrupt one digit of one witness line.
        let tampered: String = text
            .lines()
            .map(|l| {
                if l.starts_with("L ") && l.contains("; C ") {
                    l.replacen("; C ", "; C 0 ", 1)
                } else {
                    l.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        if tampered != text {
            assert!(verify_report(&g, &tampered).is_err());
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = complete_k4();
        let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
        let csv = write_lengths_csv(&rep);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "length");
        assert_eq!(lines.len(), rep.lengths.len() + 1);
    }
}
