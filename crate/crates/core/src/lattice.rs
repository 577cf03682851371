//! Finite lattices, irreducible filters and ideals, and the two-way
//! correspondence with reduced closed families.
//!
//! A lattice is validated from its order relation (or from cover
//! relations, closed transitively first): reflexivity, antisymmetry,
//! transitivity, and a unique meet and join for every pair. Irreducible
//! filters are the principal filters of join-irreducible elements; the
//! definitional brute force over all filter subsets is kept as an oracle.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::conjectures::{ConjectureId, ConjectureReport, Relation, Verdict, Witness};
use crate::error::{Error, Result};
use crate::family::{full_mask, SetFamily};

/// A verified finite lattice on at most 64 elements.
///
/// `leq[i]` holds the up-set of `i` as a bitmask (bit `j` set iff
/// `i <= j`); meet and join tables are computed once at validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    labels: Vec<String>,
    leq: Vec<u64>,
    down: Vec<u64>,
    meet: Vec<usize>,
    join: Vec<usize>,
    bottom: usize,
    top: usize,
}

/// Upward-closed, meet-closed, nonempty subset of a lattice, as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Filter(u64);

/// Downward-closed, join-closed, nonempty subset of a lattice, as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ideal(u64);

impl Filter {
    pub fn new(lattice: &FiniteLattice, mask: u64) -> Result<Self> {
        if mask == 0 {
            return Err(Error::Precondition("filter must be nonempty".to_string()));
        }
        for a in lattice.members(mask) {
            if lattice.leq[a] & !mask != 0 {
                return Err(Error::Precondition(format!(
                    "filter is not upward closed at {}",
                    lattice.labels[a]
                )));
            }
            for b in lattice.members(mask) {
                if mask >> lattice.meet_of(a, b) & 1 == 0 {
                    return Err(Error::Precondition(format!(
                        "filter is not meet-closed at ({}, {})",
                        lattice.labels[a], lattice.labels[b]
                    )));
                }
            }
        }
        Ok(Filter(mask))
    }

    /// The principal filter of `a`, its up-set.
    pub fn principal(lattice: &FiniteLattice, a: usize) -> Self {
        Filter(lattice.leq[a])
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn size(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0 >> a & 1 == 1
    }
}

impl Ideal {
    pub fn new(lattice: &FiniteLattice, mask: u64) -> Result<Self> {
        if mask == 0 {
            return Err(Error::Precondition("ideal must be nonempty".to_string()));
        }
        for a in lattice.members(mask) {
            if lattice.down[a] & !mask != 0 {
                return Err(Error::Precondition(format!(
                    "ideal is not downward closed at {}",
                    lattice.labels[a]
                )));
            }
            for b in lattice.members(mask) {
                if mask >> lattice.join_of(a, b) & 1 == 0 {
                    return Err(Error::Precondition(format!(
                        "ideal is not join-closed at ({}, {})",
                        lattice.labels[a], lattice.labels[b]
                    )));
                }
            }
        }
        Ok(Ideal(mask))
    }

    /// The principal ideal of `a`, its down-set.
    pub fn principal(lattice: &FiniteLattice, a: usize) -> Self {
        Ideal(lattice.down[a])
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn size(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0 >> a & 1 == 1
    }
}

impl FiniteLattice {
    /// Validate a full order relation given as up-set masks.
    pub fn from_leq(labels: Vec<String>, leq: Vec<u64>) -> Result<Self> {
        let size = labels.len();
        if size < 2 {
            return Err(Error::NotALattice(
                "a lattice needs at least two elements".to_string(),
            ));
        }
        if size > 64 {
            return Err(Error::LatticeTooLarge(size));
        }
        if leq.len() != size {
            return Err(Error::DimensionMismatch(format!(
                "{} relation rows for {} elements",
                leq.len(),
                size
            )));
        }
        {
            let mut seen = HashSet::new();
            for label in &labels {
                if !seen.insert(label.clone()) {
                    return Err(Error::DuplicateLabel(label.clone()));
                }
            }
        }
        let mask = full_mask(size);
        for (i, &row) in leq.iter().enumerate() {
            if row & !mask != 0 {
                return Err(Error::RowOutOfRange { row, n: size });
            }
            if row >> i & 1 == 0 {
                return Err(Error::NotALattice(format!(
                    "relation is not reflexive at {}",
                    labels[i]
                )));
            }
        }
        for i in 0..size {
            for j in 0..size {
                if i != j && leq[i] >> j & 1 == 1 && leq[j] >> i & 1 == 1 {
                    return Err(Error::NotALattice(format!(
                        "relation is not antisymmetric on ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        for i in 0..size {
            for j in (0..size).filter(|&j| leq[i] >> j & 1 == 1) {
                if leq[j] & !leq[i] != 0 {
                    return Err(Error::NotALattice(format!(
                        "relation is not transitive through ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }

        let mut down = vec![0u64; size];
        for (i, &row) in leq.iter().enumerate() {
            for j in 0..size {
                if row >> j & 1 == 1 {
                    down[j] |= 1 << i;
                }
            }
        }

        let bound =
            |candidates: u64, sets: &[u64], a: usize, b: usize, kind: &str| -> Result<usize> {
                for g in 0..size {
                    if candidates >> g & 1 == 1 && candidates & !sets[g] == 0 {
                        return Ok(g);
                    }
                }
                Err(Error::NotALattice(format!(
                    "no {kind} for ({}, {})",
                    labels[a], labels[b]
                )))
            };
        let mut meet = vec![0usize; size * size];
        let mut join = vec![0usize; size * size];
        for a in 0..size {
            for b in 0..size {
                meet[a * size + b] = bound(down[a] & down[b], &down, a, b, "meet")?;
                join[a * size + b] = bound(leq[a] & leq[b], &leq, a, b, "join")?;
            }
        }
        let bottom = (0..size).fold(0usize, |acc, x| meet[acc * size + x]);
        let top = (0..size).fold(0usize, |acc, x| join[acc * size + x]);
        Ok(FiniteLattice {
            labels,
            leq,
            down,
            meet,
            join,
            bottom,
            top,
        })
    }

    /// Build from cover relations `(lower, upper)`; the reflexive
    /// transitive closure is computed, then validated.
    pub fn from_cover_relations(labels: Vec<String>, covers: &[(usize, usize)]) -> Result<Self> {
        let size = labels.len();
        if size > 64 {
            return Err(Error::LatticeTooLarge(size));
        }
        let mut leq: Vec<u64> = (0..size).map(|i| 1u64 << i).collect();
        for &(lo, hi) in covers {
            if lo >= size || hi >= size {
                return Err(Error::DimensionMismatch(format!(
                    "cover ({lo}, {hi}) out of range for {size} elements"
                )));
            }
            leq[lo] |= 1 << hi;
        }
        loop {
            let mut changed = false;
            for i in 0..size {
                let mut row = leq[i];
                for j in 0..size {
                    if leq[i] >> j & 1 == 1 {
                        row |= leq[j];
                    }
                }
                if row != leq[i] {
                    leq[i] = row;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        FiniteLattice::from_leq(labels, leq)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a] >> b & 1 == 1
    }

    pub fn meet_of(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }

    pub fn join_of(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Up-set of `a` as a bitmask.
    pub fn up_mask(&self, a: usize) -> u64 {
        self.leq[a]
    }

    /// Down-set of `a` as a bitmask.
    pub fn down_mask(&self, a: usize) -> u64 {
        self.down[a]
    }

    fn members(&self, mask: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.size()).filter(move |&a| mask >> a & 1 == 1)
    }

    pub fn lower_covers(&self, a: usize) -> Vec<usize> {
        let below: Vec<usize> = self.members(self.down[a]).filter(|&b| b != a).collect();
        below
            .iter()
            .copied()
            .filter(|&b| !below.iter().any(|&c| c != b && self.leq(b, c)))
            .collect()
    }

    pub fn upper_covers(&self, a: usize) -> Vec<usize> {
        let above: Vec<usize> = self.members(self.leq[a]).filter(|&b| b != a).collect();
        above
            .iter()
            .copied()
            .filter(|&b| !above.iter().any(|&c| c != b && self.leq(c, b)))
            .collect()
    }

    /// Elements with exactly one lower cover (excludes the bottom).
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&a| self.lower_covers(a).len() == 1)
            .collect()
    }

    /// Elements with exactly one upper cover (excludes the top).
    pub fn meet_irreducibles(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&a| self.upper_covers(a).len() == 1)
            .collect()
    }

    /// Definitional oracle: a filter is irreducible iff it is not the
    /// intersection of a set of filters not containing it. All filters of
    /// a finite lattice are principal, so the candidates are exactly the
    /// up-sets; the empty intersection is the whole lattice, which makes
    /// the full filter reducible. Capped at 20 elements.
    pub fn irreducible_filters_bruteforce(&self) -> Result<Vec<Filter>> {
        let masks: Vec<u64> = (0..self.size()).map(|a| self.leq[a]).collect();
        self.irreducible_bruteforce(&masks)
            .map(|out| out.into_iter().map(Filter).collect())
    }

    /// Dual oracle over ideals (principal down-sets).
    pub fn irreducible_ideals_bruteforce(&self) -> Result<Vec<Ideal>> {
        let masks: Vec<u64> = (0..self.size()).map(|a| self.down[a]).collect();
        self.irreducible_bruteforce(&masks)
            .map(|out| out.into_iter().map(Ideal).collect())
    }

    fn irreducible_bruteforce(&self, masks: &[u64]) -> Result<Vec<u64>> {
        if self.size() > 20 {
            return Err(Error::BruteForceCap(format!(
                "irreducibility oracle limited to 20 elements, lattice has {}",
                self.size()
            )));
        }
        let full = full_mask(self.size());
        let mut out = Vec::new();
        for (c, &cand) in masks.iter().enumerate() {
            // the empty set of filters intersects to the full lattice
            let mut reducible = cand == full;
            // only supersets of the candidate can intersect down to it
            let supers: Vec<u64> = masks
                .iter()
                .enumerate()
                .filter(|&(i, &f)| i != c && cand & !f == 0)
                .map(|(_, &f)| f)
                .collect();
            for subset in 1u32..1 << supers.len() {
                let inter = supers
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| subset >> i & 1 == 1)
                    .fold(full, |acc, (_, &f)| acc & f);
                if inter == cand {
                    reducible = true;
                    break;
                }
            }
            if !reducible {
                out.push(cand);
            }
        }
        Ok(out)
    }

    /// The reduced intersection-closed family of the lattice: one ground
    /// element per irreducible filter, one member per lattice element `a`
    /// collecting the irreducible filters that contain `a`.
    pub fn to_intersection_family(&self) -> Result<SetFamily> {
        let gens = self.join_irreducibles();
        let labels: Vec<String> = gens.iter().map(|&g| self.labels[g].clone()).collect();
        let rows: Vec<u64> = (0..self.size())
            .map(|a| {
                gens.iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &g)| acc | (u64::from(self.leq(g, a)) << i))
            })
            .collect();
        SetFamily::new(labels, rows)
    }

    /// The reduced union-closed family of the lattice: one ground element
    /// per irreducible ideal, one member per lattice element `a`
    /// collecting the irreducible ideals that do not contain `a`.
    pub fn to_union_family(&self) -> Result<SetFamily> {
        let gens = self.meet_irreducibles();
        let labels: Vec<String> = gens.iter().map(|&g| self.labels[g].clone()).collect();
        let rows: Vec<u64> = (0..self.size())
            .map(|a| {
                gens.iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &g)| acc | (u64::from(!self.leq(a, g)) << i))
            })
            .collect();
        SetFamily::new(labels, rows)
    }

    /// Boolean lattice test: as many elements as subsets of its atoms and
    /// the filter embedding is the full powerset.
    pub fn is_boolean(&self) -> bool {
        let atoms = self.upper_covers(self.bottom).len();
        if atoms >= 64 || self.size() != 1usize << atoms {
            return false;
        }
        match self.to_intersection_family() {
            Ok(fam) => fam.n() < 64 && fam.m() == 1usize << fam.n(),
            Err(_) => false,
        }
    }

    /// Least irreducible-filter size: `2 min |A| <= |L|`.
    pub fn check_conjecture_1(&self) -> ConjectureReport {
        let gens = self.join_irreducibles();
        let best = gens
            .iter()
            .copied()
            .min_by_key(|&g| self.leq[g].count_ones())
            .expect("a lattice with two or more elements has a join-irreducible");
        let report = ConjectureReport::new(
            ConjectureId::C1,
            num_rational::BigRational::from_integer((2 * self.leq[best].count_ones()).into()),
            num_rational::BigRational::from_integer((self.size() as u32).into()),
            Relation::Leq,
            Some(Witness::Element(best)),
        );
        let ok = match report.verdict {
            Verdict::HoldsStrict => true,
            Verdict::HoldsEquality => self.is_boolean(),
            Verdict::Fails => false,
        };
        report.with_reinforcement(ok)
    }

    /// Greatest irreducible-ideal complement: `2 max |A^C| >= |L|`,
    /// complements taken within the lattice.
    pub fn check_conjecture_2(&self) -> ConjectureReport {
        let gens = self.meet_irreducibles();
        let complement_size = |g: usize| self.size() as u32 - self.down[g].count_ones();
        let best = gens
            .iter()
            .copied()
            .fold(None::<usize>, |best, g| match best {
                Some(b) if complement_size(g) <= complement_size(b) => Some(b),
                _ => Some(g),
            })
            .expect("a lattice with two or more elements has a meet-irreducible");
        let complement = self.size() as u32 - self.down[best].count_ones();
        let report = ConjectureReport::new(
            ConjectureId::C2,
            num_rational::BigRational::from_integer((2 * complement).into()),
            num_rational::BigRational::from_integer((self.size() as u32).into()),
            Relation::Geq,
            Some(Witness::Element(best)),
        );
        let ok = match report.verdict {
            Verdict::HoldsStrict => true,
            Verdict::HoldsEquality => self.is_boolean(),
            Verdict::Fails => false,
        };
        report.with_reinforcement(ok)
    }

    /// Check that `map` (ours -> theirs) is an order isomorphism, edge by edge.
    pub fn verify_order_isomorphism(&self, other: &FiniteLattice, map: &[usize]) -> bool {
        if self.size() != other.size() || map.len() != self.size() {
            return false;
        }
        let mut seen = vec![false; self.size()];
        for &img in map {
            if img >= self.size() || seen[img] {
                return false;
            }
            seen[img] = true;
        }
        for a in 0..self.size() {
            for b in 0..self.size() {
                if self.leq(a, b) != other.leq(map[a], map[b]) {
                    return false;
                }
            }
        }
        true
    }

    /// Parse the `.lat` format: `elements: 0 a b 1` then cover lines `x < y`.
    pub fn parse_lat(text: &str) -> Result<Self> {
        let mut labels: Option<Vec<String>> = None;
        let mut covers: Vec<(usize, usize)> = Vec::new();
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
                    if names.len() < 2 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "a lattice needs at least two elements".to_string(),
                        });
                    }
                    labels = Some(names);
                }
                Some(names) => {
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() != 3 || parts[1] != "<" {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "expected a cover relation `x < y`".to_string(),
                        });
                    }
                    let find = |token: &str| -> Result<usize> {
                        names
                            .iter()
                            .position(|l| l == token)
                            .ok_or_else(|| Error::Parse {
                                line: line_no,
                                msg: format!("unknown element name {token:?}"),
                            })
                    };
                    covers.push((find(parts[0])?, find(parts[2])?));
                }
            }
        }
        let labels = labels.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing `elements:` header".to_string(),
        })?;
        FiniteLattice::from_cover_relations(labels, &covers)
    }

    /// DOT rendering of the Hasse diagram, each node annotated with its
    /// up-set size.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for a in 0..self.size() {
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\\n|up|={}\"];",
                self.labels[a],
                self.labels[a],
                self.leq[a].count_ones()
            );
        }
        for a in 0..self.size() {
            for b in self.upper_covers(a) {
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", self.labels[a], self.labels[b]);
            }
        }
        out.push_str("}\n");
        out
    }

    // --- named catalog ---

    /// Chain with `k >= 2` elements.
    pub fn chain(k: usize) -> Self {
        let labels = (0..k).map(|i| format!("c{i}")).collect();
        let covers: Vec<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
        FiniteLattice::from_cover_relations(labels, &covers).expect("chain is a lattice")
    }

    /// Boolean lattice of all subsets of `k` atoms (`k <= 6`).
    pub fn boolean(k: usize) -> Self {
        assert!(k <= 6, "boolean lattice capacity is 2^6 elements");
        let size = 1usize << k;
        let labels = (0..size)
            .map(|s| format!("s{s:0width$b}", width = k.max(1)))
            .collect();
        let mut covers = Vec::new();
        for s in 0..size {
            for bit in 0..k {
                if s >> bit & 1 == 0 {
                    covers.push((s, s | 1 << bit));
                }
            }
        }
        FiniteLattice::from_cover_relations(labels, &covers).expect("powerset is a lattice")
    }

    /// The pentagon: 0 < a < c < 1 and 0 < b < 1.
    pub fn n5() -> Self {
        let labels = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        FiniteLattice::from_cover_relations(labels, &[(0, 1), (0, 2), (1, 3), (3, 4), (2, 4)])
            .expect("pentagon is a lattice")
    }

    /// The diamond: three incomparable atoms between bottom and top.
    pub fn m3() -> Self {
        let labels = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        FiniteLattice::from_cover_relations(
            labels,
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .expect("diamond is a lattice")
    }
}

/// Inclusion lattice of a reduced closed family: one lattice element per
/// member, ordered by set inclusion.
pub fn family_to_lattice(family: &SetFamily) -> Result<FiniteLattice> {
    if !family.is_reduced() {
        return Err(Error::Precondition("is_reduced".to_string()));
    }
    if !family.is_union_closed() && !family.is_intersection_closed() {
        return Err(Error::Precondition(
            "is_union_closed or is_intersection_closed".to_string(),
        ));
    }
    if family.m() > 64 {
        return Err(Error::LatticeTooLarge(family.m()));
    }
    let rows = family.sorted_rows();
    let labels: Vec<String> = rows.iter().map(|&r| family.member_label(r)).collect();
    let leq: Vec<u64> = rows
        .iter()
        .map(|&a| {
            rows.iter()
                .enumerate()
                .fold(0u64, |acc, (j, &b)| acc | (u64::from(a & !b == 0) << j))
        })
        .collect();
    FiniteLattice::from_leq(labels, leq)
}
