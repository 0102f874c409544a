//! Line-oriented text formats for instances and schedules.
//!
//! Instance files (`#` starts a comment, blank lines are ignored):
//!
//! ```text
//! <model> <n> <m> <T>
//! # identical / related: one line per job
//! <id> <weight> <size>
//! # related only: m speeds written as num/den
//! speeds 1/1 3/2
//! # unrelated: one line per job, then one row per machine ('-' = forbidden)
//! <id> <weight>
//! <machine> <p_0> ... <p_{n-1}>
//! edges
//! <j> <j'>
//! ```
//!
//! Schedule files:
//!
//! ```text
//! schedule <n>
//! <job> <machine> <start> <end>
//! ```
//!
//! Times are integers or `num/den` fractions. [`write_instance`] and
//! [`write_schedule`] emit the canonical form, which the readers parse back
//! to an equal value.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{Instance, Job, Model, PrecedenceDag, Rational, Schedule, ScheduledJob};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-empty line with comments stripped, as (line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = content.split_whitespace().collect();
            if !toks.is_empty() {
                self.last = idx + 1;
                return Some((idx + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let after = self.last;
        self.next_tokens().ok_or_else(|| Error::Parse {
            line: after + 1,
            message: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| perr(line, format!("invalid {what} `{tok}`")))
}

fn parse_rational(line: usize, tok: &str) -> Result<Rational> {
    let (num, den) = match tok.split_once('/') {
        Some((a, b)) => (parse_int::<i128>(line, a, "numerator")?, parse_int::<i128>(line, b, "denominator")?),
        None => (parse_int::<i128>(line, tok, "number")?, 1),
    };
    if den == 0 {
        return Err(perr(line, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn fmt_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses an instance. The result is not validated; call
/// [`validate_instance`](crate::validate_instance) for semantic checks.
pub fn read_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines.next_tokens().ok_or_else(|| perr(1, "missing header"))?;
    if header.len() != 4 {
        return Err(perr(hl, "malformed header, expected `model n m T`"));
    }
    let model: Model = header[0].parse().map_err(|e: String| perr(hl, format!("malformed header: {e}")))?;
    let n: usize = parse_int(hl, header[1], "job count")?;
    let m: usize = parse_int(hl, header[2], "machine count")?;
    let horizon: i64 = parse_int(hl, header[3], "horizon")?;

    let mut jobs = Vec::with_capacity(n);
    for j in 0..n {
        let (ln, toks) = lines.expect("job line")?;
        let want = if model == Model::Unrelated { 2 } else { 3 };
        if toks.len() != want {
            return Err(perr(ln, format!("job line needs {want} fields")));
        }
        let id: usize = parse_int(ln, toks[0], "job id")?;
        if id != j {
            return Err(perr(ln, format!("expected job id {j}, found {id}")));
        }
        let weight: i64 = parse_int(ln, toks[1], "weight")?;
        let size = if want == 3 { Some(parse_int(ln, toks[2], "size")?) } else { None };
        jobs.push(Job { id, weight, size });
    }

    let mut speeds = Vec::new();
    if model == Model::Related {
        let (ln, toks) = lines.expect("speeds line")?;
        if toks[0] != "speeds" || toks.len() != m + 1 {
            return Err(perr(ln, format!("expected `speeds` followed by {m} values")));
        }
        for tok in &toks[1..] {
            speeds.push(parse_rational(ln, tok)?);
        }
    }

    let mut pmatrix = Vec::new();
    if model == Model::Unrelated {
        for i in 0..m {
            let (ln, toks) = lines.expect("machine row")?;
            if toks.len() != n + 1 {
                return Err(perr(ln, format!("machine row needs {} fields", n + 1)));
            }
            let id: usize = parse_int(ln, toks[0], "machine id")?;
            if id != i {
                return Err(perr(ln, format!("expected machine id {i}, found {id}")));
            }
            let row = toks[1..]
                .iter()
                .map(|t| if *t == "-" { Ok(None) } else { parse_int(ln, t, "processing time").map(Some) })
                .collect::<Result<Vec<_>>>()?;
            pmatrix.push(row);
        }
    }

    let (ln, toks) = lines.expect("`edges`")?;
    if toks != ["edges"] {
        return Err(perr(ln, "expected `edges`"));
    }
    let mut edges = Vec::new();
    while let Some((ln, toks)) = lines.next_tokens() {
        if toks.len() != 2 {
            return Err(perr(ln, "edge line needs 2 fields"));
        }
        let a: usize = parse_int(ln, toks[0], "job index")?;
        let b: usize = parse_int(ln, toks[1], "job index")?;
        if a >= n || b >= n {
            return Err(perr(ln, format!("edge ({a}, {b}) index out of range")));
        }
        edges.push((a, b));
    }

    Ok(Instance {
        model,
        jobs,
        dag: PrecedenceDag::new(n, edges),
        machines: m,
        speeds,
        pmatrix,
        horizon,
    })
}

pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {}", inst.model, inst.n(), inst.machines, inst.horizon);
    for job in &inst.jobs {
        match job.size {
            Some(p) if inst.model != Model::Unrelated => {
                let _ = writeln!(out, "{} {} {}", job.id, job.weight, p);
            }
            _ => {
                let _ = writeln!(out, "{} {}", job.id, job.weight);
            }
        }
    }
    if inst.model == Model::Related {
        out.push_str("speeds");
        for s in &inst.speeds {
            let _ = write!(out, " {}/{}", s.numer(), s.denom());
        }
        out.push('\n');
    }
    if inst.model == Model::Unrelated {
        for (i, row) in inst.pmatrix.iter().enumerate() {
            let _ = write!(out, "{i}");
            for p in row {
                match p {
                    Some(v) => {
                        let _ = write!(out, " {v}");
                    }
                    None => out.push_str(" -"),
                }
            }
            out.push('\n');
        }
    }
    out.push_str("edges\n");
    for (a, b) in inst.dag.edges() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}

pub fn read_schedule(text: &str) -> Result<Schedule> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines.next_tokens().ok_or_else(|| perr(1, "missing header"))?;
    if header.len() != 2 || header[0] != "schedule" {
        return Err(perr(hl, "malformed header, expected `schedule n`"));
    }
    let count: usize = parse_int(hl, header[1], "entry count")?;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, toks) = lines.expect("schedule entry")?;
        if toks.len() != 4 {
            return Err(perr(ln, "schedule entry needs `job machine start end`"));
        }
        entries.push(ScheduledJob {
            job: parse_int(ln, toks[0], "job")?,
            machine: parse_int(ln, toks[1], "machine")?,
            start: parse_rational(ln, toks[2])?,
            end: parse_rational(ln, toks[3])?,
        });
    }
    if let Some((ln, _)) = lines.next_tokens() {
        return Err(perr(ln, "trailing content after schedule entries"));
    }
    Ok(Schedule { entries })
}

pub fn write_schedule(sched: &Schedule) -> String {
    let mut out = format!("schedule {}\n", sched.entries.len());
    for e in &sched.entries {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            e.job,
            e.machine,
            fmt_rational(&e.start),
            fmt_rational(&e.end)
        );
    }
    out
}
