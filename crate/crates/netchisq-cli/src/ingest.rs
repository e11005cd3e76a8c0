//! Reads campaign data files into [`CampaignPair`] values.
//!
//! Two CSV schemas are supported, both with a mandatory header:
//!
//! * aggregate counts, header `subgroup,group,responders,total`, exactly
//!   one row per (subgroup, group) combination;
//! * individual records, header `subgroup,group,response`, one row per
//!   person with `response` equal to 0 or 1.
//!
//! `group` is `target` or `control` (case-insensitive). Subgroup labels
//! are arbitrary strings mapped to subgroups 1 and 2 in first-seen order,
//! except that the literal labels `1` and `2` keep their meaning. Extra
//! columns are ignored with a warning.

use netchisq::{CampaignPair, SubgroupCounts};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A row could not be parsed; line numbers are 1-based and include
    /// the header.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },
    /// The file does not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),
    /// A value violates a domain constraint.
    #[error("validation error: {0}")]
    Validation(String),
}

/// A parsed file: the campaign pair plus non-fatal warnings.
#[derive(Debug)]
pub struct Ingested {
    pub pair: CampaignPair,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Group {
    Target,
    Control,
}

fn parse_group(raw: &str, line: u64) -> Result<Group, IngestError> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "target" => Ok(Group::Target),
        "control" => Ok(Group::Control),
        other => Err(IngestError::Parse {
            line,
            msg: format!("group must be 'target' or 'control', got '{other}'"),
        }),
    }
}

fn parse_count(raw: &str, what: &str, line: u64) -> Result<u64, IngestError> {
    let raw = raw.trim();
    raw.parse::<u64>().map_err(|_| IngestError::Parse {
        line,
        msg: format!("{what} must be a whole nonnegative number, got '{raw}'"),
    })
}

/// Maps subgroup labels to indices 0/1: literal labels "1"/"2" keep
/// their positions, anything else is assigned in first-seen order.
#[derive(Debug, Default)]
struct SubgroupLabels {
    seen: Vec<String>,
}

impl SubgroupLabels {
    fn index(&mut self, raw: &str, line: u64) -> Result<usize, IngestError> {
        let label = raw.trim().to_string();
        if let Some(pos) = self.seen.iter().position(|s| *s == label) {
            return Ok(pos);
        }
        if self.seen.len() == 2 {
            return Err(IngestError::Schema(format!(
                "more than two subgroup labels: '{}', '{}' and '{label}' (line {line})",
                self.seen[0], self.seen[1]
            )));
        }
        self.seen.push(label);
        Ok(self.seen.len() - 1)
    }

    /// Literal "1"/"2" labels override first-seen order.
    fn final_order(&self) -> [usize; 2] {
        if self.seen.len() == 2
            && self.seen.contains(&"1".into())
            && self.seen.contains(&"2".into())
        {
            if self.seen[0] == "1" {
                [0, 1]
            } else {
                [1, 0]
            }
        } else {
            [0, 1]
        }
    }
}

struct Header {
    columns: Vec<usize>,
    warnings: Vec<String>,
}

/// Locates `required` column names (case-insensitive) in the header and
/// warns about extras.
fn resolve_header(headers: &csv::StringRecord, required: &[&str]) -> Result<Header, IngestError> {
    let names: Vec<String> = headers
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let mut columns = Vec::with_capacity(required.len());
    for want in required {
        match names.iter().position(|n| n == want) {
            Some(idx) => columns.push(idx),
            None => {
                return Err(IngestError::Schema(format!(
                    "missing column '{want}' (expected header: {})",
                    required.join(",")
                )))
            }
        }
    }
    let warnings = names
        .iter()
        .filter(|n| !required.contains(&n.as_str()))
        .map(|n| format!("ignoring unknown column '{n}'"))
        .collect();
    Ok(Header { columns, warnings })
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn csv_error(err: csv::Error) -> IngestError {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    match err.kind() {
        csv::ErrorKind::Io(_) => match err.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            _ => unreachable!(),
        },
        _ => IngestError::Parse {
            line,
            msg: err.to_string(),
        },
    }
}

/// Reads an aggregate count table; see the module docs for the schema.
pub fn read_aggregate(path: &Path) -> Result<Ingested, IngestError> {
    read_aggregate_from(File::open(path)?)
}

pub fn read_aggregate_from<R: Read>(reader: R) -> Result<Ingested, IngestError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(IngestError::Schema("empty file".into()));
    }
    let header = resolve_header(&headers, &["subgroup", "group", "responders", "total"])?;
    parse_aggregate_rows(rdr, header)
}

fn parse_aggregate_rows<R: Read>(
    mut rdr: csv::Reader<R>,
    header: Header,
) -> Result<Ingested, IngestError> {
    let [sub_col, group_col, resp_col, total_col] = [
        header.columns[0],
        header.columns[1],
        header.columns[2],
        header.columns[3],
    ];
    let mut labels = SubgroupLabels::default();
    // cells[subgroup][group] = (responders, total)
    let mut cells: [[Option<(u64, u64)>; 2]; 2] = [[None; 2]; 2];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = line_of(&record);
        let sub = labels.index(&record[sub_col], line)?;
        let group = parse_group(&record[group_col], line)?;
        let responders = parse_count(&record[resp_col], "responders", line)?;
        let total = parse_count(&record[total_col], "total", line)?;
        if responders > total {
            return Err(IngestError::Validation(format!(
                "line {line}: responders ({responders}) exceed total ({total})"
            )));
        }
        let slot = &mut cells[sub][group as usize];
        if slot.is_some() {
            return Err(IngestError::Schema(format!(
                "duplicate row for subgroup '{}' {} group (line {line})",
                labels.seen[sub],
                if group == Group::Target {
                    "target"
                } else {
                    "control"
                },
            )));
        }
        *slot = Some((responders, total));
    }

    let order = labels.final_order();
    let mut subs = Vec::with_capacity(2);
    for &idx in &order {
        let label = labels
            .seen
            .get(idx)
            .ok_or_else(|| IngestError::Schema("fewer than two subgroups".into()))?;
        let (a_t, n) = cells[idx][Group::Target as usize].ok_or_else(|| {
            IngestError::Schema(format!("missing target row for subgroup '{label}'"))
        })?;
        let (a_c, k) = cells[idx][Group::Control as usize].ok_or_else(|| {
            IngestError::Schema(format!("missing control row for subgroup '{label}'"))
        })?;
        let sub = SubgroupCounts::new(n, a_t, k, a_c)
            .map_err(|e| IngestError::Validation(e.to_string()))?;
        subs.push(sub);
    }
    Ok(Ingested {
        pair: CampaignPair::new(subs[0], subs[1]),
        warnings: header.warnings,
    })
}

/// Reads individual response records and tallies them; equivalent to
/// [`read_aggregate`] on the aggregated table.
pub fn read_individual(path: &Path) -> Result<Ingested, IngestError> {
    read_individual_from(File::open(path)?)
}

pub fn read_individual_from<R: Read>(reader: R) -> Result<Ingested, IngestError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(IngestError::Schema("empty file".into()));
    }
    let header = resolve_header(&headers, &["subgroup", "group", "response"])?;
    parse_individual_rows(rdr, header)
}

fn parse_individual_rows<R: Read>(
    mut rdr: csv::Reader<R>,
    header: Header,
) -> Result<Ingested, IngestError> {
    let [sub_col, group_col, resp_col] = [header.columns[0], header.columns[1], header.columns[2]];
    let mut labels = SubgroupLabels::default();
    // tallies[subgroup][group] = (persons, responses)
    let mut tallies = [[(0u64, 0u64); 2]; 2];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = line_of(&record);
        let sub = labels.index(&record[sub_col], line)?;
        let group = parse_group(&record[group_col], line)?;
        let response = match record[resp_col].trim() {
            "0" => 0u64,
            "1" => 1u64,
            other => {
                return Err(IngestError::Validation(format!(
                    "line {line}: response must be 0 or 1, got '{other}'"
                )))
            }
        };
        let tally = &mut tallies[sub][group as usize];
        tally.0 += 1;
        tally.1 += response;
    }

    let order = labels.final_order();
    let mut subs = Vec::with_capacity(2);
    for &idx in &order {
        let label = labels
            .seen
            .get(idx)
            .ok_or_else(|| IngestError::Schema("fewer than two subgroups".into()))?;
        let (n, a_t) = tallies[idx][Group::Target as usize];
        let (k, a_c) = tallies[idx][Group::Control as usize];
        if n == 0 {
            return Err(IngestError::Schema(format!(
                "no target records for subgroup '{label}'"
            )));
        }
        if k == 0 {
            return Err(IngestError::Schema(format!(
                "no control records for subgroup '{label}'"
            )));
        }
        subs.push(SubgroupCounts::new(n, a_t, k, a_c).expect("tallies are consistent"));
    }
    Ok(Ingested {
        pair: CampaignPair::new(subs[0], subs[1]),
        warnings: header.warnings,
    })
}

/// Reads either schema, deciding by the header row.
pub fn read_auto(path: &Path) -> Result<Ingested, IngestError> {
    let mut content = String::new();
    File::open(path)?.read_to_string(&mut content)?;
    let first_line = content.lines().next().unwrap_or("");
    let names: Vec<String> = first_line
        .split(',')
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    if names.iter().any(|n| n == "responders") {
        read_aggregate_from(content.as_bytes())
    } else if names.iter().any(|n| n == "response") {
        read_individual_from(content.as_bytes())
    } else {
        Err(IngestError::Schema(format!(
            "unrecognised header '{first_line}': expected 'subgroup,group,responders,total' \
             or 'subgroup,group,response'"
        )))
    }
}

/// Writes `pair` in the aggregate schema, subgroups labelled 1 and 2.
pub fn write_aggregate<W: Write>(mut w: W, pair: &CampaignPair) -> std::io::Result<()> {
    writeln!(w, "subgroup,group,responders,total")?;
    for (label, sub) in [(1, pair.sub1()), (2, pair.sub2())] {
        writeln!(
            w,
            "{label},target,{},{}",
            sub.target_responses(),
            sub.target_size()
        )?;
        writeln!(
            w,
            "{label},control,{},{}",
            sub.control_responses(),
            sub.control_size()
        )?;
    }
    Ok(())
}

/// Writes `pair` as individual records, one row per person. Intended for
/// small data sets and round-trip tests.
pub fn write_individual<W: Write>(mut w: W, pair: &CampaignPair) -> std::io::Result<()> {
    writeln!(w, "subgroup,group,response")?;
    for (label, sub) in [(1, pair.sub1()), (2, pair.sub2())] {
        let cells = [
            ("target", sub.target_responses(), sub.target_size()),
            ("control", sub.control_responses(), sub.control_size()),
        ];
        for (group, responses, size) in cells {
            for i in 0..size {
                let response = if i < responses { 1 } else { 0 };
                writeln!(w, "{label},{group},{response}")?;
            }
        }
    }
    Ok(())
}
