//! Set families over small ground sets.
//!
//! A family is a list of distinct member sets over labeled elements
//! `x_0..x_{n-1}` with `n <= 64`, each member stored as one machine word
//! (bit `k` set means element `k` belongs to the member). Everything here
//! is exact integer arithmetic; rows keep insertion order but all
//! predicates are order-independent.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Full mask of the `n` low bits.
pub fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Default element labels: `a..z` for small ground sets, `x1..` beyond.
pub fn default_labels(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n)
            .map(|k| ((b'a' + k as u8) as char).to_string())
            .collect()
    } else {
        (1..=n).map(|k| format!("x{k}")).collect()
    }
}

/// A family of distinct subsets of a labeled ground set.
#[derive(Debug, Clone)]
pub struct SetFamily {
    labels: Vec<String>,
    rows: Vec<u64>,
}

/// Outcome of the reduced-family test: which of the three requirements
/// fail, and for the separation requirement, which elements are never
/// obtained as a one-element difference of two members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedDiagnostic {
    pub missing_empty: bool,
    pub missing_full: bool,
    pub unseparated: Vec<usize>,
}

impl ReducedDiagnostic {
    pub fn is_reduced(&self) -> bool {
        !self.missing_empty && !self.missing_full && self.unseparated.is_empty()
    }
}

impl fmt::Display for ReducedDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_reduced() {
            return write!(f, "reduced");
        }
        let mut parts = Vec::new();
        if self.missing_empty {
            parts.push("empty set missing".to_string());
        }
        if self.missing_full {
            parts.push("full ground set missing".to_string());
        }
        if !self.unseparated.is_empty() {
            let list: Vec<String> = self.unseparated.iter().map(|k| format!("#{k}")).collect();
            parts.push(format!("elements not separated: {}", list.join(", ")));
        }
        write!(f, "not reduced ({})", parts.join("; "))
    }
}

/// Per-element membership counts and signed imbalance.
///
/// `count_in[k]` is the number of members containing element `k`,
/// `count_out[k] = m - count_in[k]`, and `delta[k]` their difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementStats {
    pub count_in: Vec<u64>,
    pub count_out: Vec<u64>,
    pub delta: Vec<i64>,
}

impl SetFamily {
    pub fn new(labels: Vec<String>, rows: Vec<u64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        if n > 64 {
            return Err(Error::CapacityExceeded(n));
        }
        if rows.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut seen_labels = HashSet::new();
        for label in &labels {
            if !seen_labels.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let mask = full_mask(n);
        let mut seen_rows = HashSet::new();
        for &row in &rows {
            if row & !mask != 0 {
                return Err(Error::RowOutOfRange { row, n });
            }
            if !seen_rows.insert(row) {
                return Err(Error::DuplicateRow(row));
            }
        }
        Ok(SetFamily { labels, rows })
    }

    /// Family with default labels over `n` elements.
    pub fn from_masks(n: usize, rows: Vec<u64>) -> Result<Self> {
        SetFamily::new(default_labels(n), rows)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn full_row(&self) -> u64 {
        full_mask(self.n())
    }

    pub fn contains_row(&self, row: u64) -> bool {
        self.rows.contains(&row)
    }

    /// Rows sorted ascending as integers; family equality and displays use this.
    pub fn sorted_rows(&self) -> Vec<u64> {
        let mut rows = self.rows.clone();
        rows.sort_unstable();
        rows
    }

    /// Member rendered as `{a,b}` with `{}` for the empty set.
    pub fn member_label(&self, row: u64) -> String {
        let names: Vec<&str> = (0..self.n())
            .filter(|&k| row >> k & 1 == 1)
            .map(|k| self.labels[k].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// True iff the union of every pair of members is again a member.
    pub fn is_union_closed(&self) -> bool {
        let set: HashSet<u64> = self.rows.iter().copied().collect();
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &a)| self.rows[i..].iter().all(|&b| set.contains(&(a | b))))
    }

    /// True iff the intersection of every pair of members is again a member.
    pub fn is_intersection_closed(&self) -> bool {
        let set: HashSet<u64> = self.rows.iter().copied().collect();
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &a)| self.rows[i..].iter().all(|&b| set.contains(&(a & b))))
    }

    /// Reduced test: the empty set and the full ground set are members, and
    /// every element `x` arises as a one-element difference `A \ B = {x}`.
    pub fn reduced_diagnostic(&self) -> ReducedDiagnostic {
        let n = self.n();
        let mask = self.full_row();
        let mut separated = 0u64;
        for &a in &self.rows {
            for &b in &self.rows {
                let d = a & !b & mask;
                if d.count_ones() == 1 {
                    separated |= d;
                }
            }
        }
        ReducedDiagnostic {
            missing_empty: !self.contains_row(0),
            missing_full: !self.contains_row(mask),
            unseparated: (0..n).filter(|&k| separated >> k & 1 == 0).collect(),
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced_diagnostic().is_reduced()
    }

    /// Family of complements of the members, on the same ground set.
    pub fn complement_family(&self) -> SetFamily {
        let mask = self.full_row();
        SetFamily {
            labels: self.labels.clone(),
            rows: self.rows.iter().map(|&r| !r & mask).collect(),
        }
    }

    pub fn element_stats(&self) -> ElementStats {
        let m = self.m() as u64;
        let count_in: Vec<u64> = (0..self.n())
            .map(|k| self.rows.iter().filter(|&&r| r >> k & 1 == 1).count() as u64)
            .collect();
        let count_out: Vec<u64> = count_in.iter().map(|&c| m - c).collect();
        let delta: Vec<i64> = count_in.iter().map(|&c| 2 * c as i64 - m as i64).collect();
        ElementStats {
            count_in,
            count_out,
            delta,
        }
    }

    /// Close under pairwise unions, shrink the ground set to the union of all
    /// members, insert the empty set and the new full set, and collapse
    /// elements whose membership columns are identical into one element
    /// (labels concatenated, lowest index representative). Separation
    /// failures are reported, not repaired.
    pub fn reduce(&self) -> Result<(SetFamily, ReducedDiagnostic)> {
        // union closure to a fixed point
        let mut closed: BTreeSet<u64> = self.rows.iter().copied().collect();
        let mut frontier: Vec<u64> = closed.iter().copied().collect();
        while !frontier.is_empty() {
            let snapshot: Vec<u64> = closed.iter().copied().collect();
            let mut fresh = Vec::new();
            for &a in &frontier {
                for &b in &snapshot {
                    let u = a | b;
                    if closed.insert(u) {
                        fresh.push(u);
                    }
                }
            }
            frontier = fresh;
        }

        let support = closed.iter().fold(0u64, |acc, &r| acc | r);
        if support == 0 {
            return Err(Error::EmptyGroundSet);
        }

        // compress columns to the support
        let kept: Vec<usize> = (0..self.n()).filter(|&k| support >> k & 1 == 1).collect();
        let compress = |row: u64| -> u64 {
            kept.iter()
                .enumerate()
                .fold(0u64, |acc, (new, &old)| acc | ((row >> old & 1) << new))
        };
        let mut rows: Vec<u64> = closed.iter().map(|&r| compress(r)).collect();
        let full = full_mask(kept.len());
        if !rows.contains(&0) {
            rows.push(0);
        }
        if !rows.contains(&full) {
            rows.push(full);
        }
        rows.sort_unstable();

        // group identical columns; the column signature of element k is the
        // set of members containing it, read along the sorted row list
        let column = |k: usize| -> Vec<bool> { rows.iter().map(|&r| r >> k & 1 == 1).collect() };
        let mut rep_of: Vec<usize> = (0..kept.len()).collect();
        for k in 0..kept.len() {
            for r in 0..k {
                if rep_of[r] == r && column(r) == column(k) {
                    rep_of[k] = r;
                    break;
                }
            }
        }
        let reps: Vec<usize> = (0..kept.len()).filter(|&k| rep_of[k] == k).collect();
        let labels: Vec<String> = reps
            .iter()
            .map(|&rep| {
                (0..kept.len())
                    .filter(|&k| rep_of[k] == rep)
                    .map(|k| self.labels[kept[k]].clone())
                    .collect::<Vec<_>>()
                    .concat()
            })
            .collect();
        let final_rows: Vec<u64> = rows
            .iter()
            .map(|&r| {
                reps.iter()
                    .enumerate()
                    .fold(0u64, |acc, (new, &rep)| acc | ((r >> rep & 1) << new))
            })
            .collect();

        let family = SetFamily::new(labels, final_rows)?;
        let diagnostic = family.reduced_diagnostic();
        Ok((family, diagnostic))
    }

    /// Parse the `.fam` text format: first line `elements: a b c`, then one
    /// member per line as space-separated element names, `-` for the empty
    /// set. Blank lines and lines starting with `#` are skipped.
    pub fn parse_fam(text: &str) -> Result<Self> {
        let mut labels: Option<Vec<String>> = None;
        let mut rows: Vec<u64> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match &labels {
                None => {
                    let rest = line.strip_prefix("elements:").ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: "expected `elements: <name> <name> ...`".to_string(),
                    })?;
                    let names: Vec<String> =
                        rest.split_whitespace().map(|s| s.to_string()).collect();
                    if names.is_empty() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "ground set must name at least one element".to_string(),
                        });
                    }
                    if names.iter().any(|s| s == "-") {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "`-` is reserved for the empty member".to_string(),
                        });
                    }
                    labels = Some(names);
                }
                Some(names) => {
                    let row = if line == "-" {
                        0u64
                    } else {
                        let mut row = 0u64;
                        for token in line.split_whitespace() {
                            let k = names.iter().position(|l| l == token).ok_or_else(|| {
                                Error::Parse {
                                    line: line_no,
                                    msg: format!("unknown element name {token:?}"),
                                }
                            })?;
                            if row >> k & 1 == 1 {
                                return Err(Error::Parse {
                                    line: line_no,
                                    msg: format!("element {token:?} repeated in member"),
                                });
                            }
                            row |= 1 << k;
                        }
                        row
                    };
                    if rows.contains(&row) {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "duplicate member".to_string(),
                        });
                    }
                    rows.push(row);
                }
            }
        }
        let labels = labels.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing `elements:` header".to_string(),
        })?;
        if rows.is_empty() {
            return Err(Error::EmptyFamily);
        }
        SetFamily::new(labels, rows)
    }

    /// Serialize in the `.fam` format, members in sorted row order.
    pub fn to_fam_string(&self) -> String {
        let mut out = format!("elements: {}\n", self.labels.join(" "));
        for row in self.sorted_rows() {
            if row == 0 {
                out.push_str("-\n");
            } else {
                let names: Vec<&str> = (0..self.n())
                    .filter(|&k| row >> k & 1 == 1)
                    .map(|k| self.labels[k].as_str())
                    .collect();
                out.push_str(&names.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

impl PartialEq for SetFamily {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.sorted_rows() == other.sorted_rows()
    }
}

impl Eq for SetFamily {}
