//! Exact checkers for the conjecture hierarchy on reduced closed families.
//!
//! Numbering: conj1/conj2 are the lattice forms (least irreducible-filter
//! size, greatest irreducible-ideal complement), conj3..conj6 the family
//! and matrix column-sum forms, conj7 the simplex weighting, conj9 the
//! power-weight form with its minimal exponent, conj10 the r-tuple
//! intersection averages, conj11..conj14 the pairwise strong forms, and
//! prop12/prop13/prop14 the symmetric-difference inequality, the exact
//! identity behind it, and the sufficient condition built from it.
//! (conj8, the bare existence of a weight function, has no effective
//! checker of its own; conj9 instantiates it with the power weights.)
//!
//! Every inequality is evaluated in cross-multiplied big-integer form;
//! rationals appear only in reports and weight vectors.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{pow, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::matrix::{characteristic_matrix, product_sum, BitMatrix, IntMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConjectureId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C9,
    C10,
    C11,
    C12,
    C13,
    C14,
    P12,
    P13,
    P14,
}

impl fmt::Display for ConjectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConjectureId::C1 => "conj1",
            ConjectureId::C2 => "conj2",
            ConjectureId::C3 => "conj3",
            ConjectureId::C4 => "conj4",
            ConjectureId::C5 => "conj5",
            ConjectureId::C6 => "conj6",
            ConjectureId::C7 => "conj7",
            ConjectureId::C9 => "conj9",
            ConjectureId::C10 => "conj10",
            ConjectureId::C11 => "conj11",
            ConjectureId::C12 => "conj12",
            ConjectureId::C13 => "conj13",
            ConjectureId::C14 => "conj14",
            ConjectureId::P12 => "prop12",
            ConjectureId::P13 => "prop13",
            ConjectureId::P14 => "prop14",
        };
        f.write_str(s)
    }
}

/// Claimed direction of the inequality `lhs <relation> rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Geq,
    Leq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Geq => ">=",
            Relation::Leq => "<=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    HoldsStrict,
    HoldsEquality,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsStrict => "holds_strict",
            Verdict::HoldsEquality => "holds_equality",
            Verdict::Fails => "fails",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Ground-set element index.
    Element(usize),
    /// Weight exponent.
    Exponent(u32),
}

/// Verdict record for one conjecture instance: both sides exactly, the
/// claimed direction, the witness where one applies, and the
/// strict-unless-powerset reinforcement where one is stated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureReport {
    pub id: ConjectureId,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub relation: Relation,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub reinforcement_ok: Option<bool>,
}

impl ConjectureReport {
    /// The verdict is derived from the sides, never stored independently.
    pub fn new(
        id: ConjectureId,
        lhs: BigRational,
        rhs: BigRational,
        relation: Relation,
        witness: Option<Witness>,
    ) -> Self {
        let verdict = match (relation, lhs.cmp(&rhs)) {
            (_, std::cmp::Ordering::Equal) => Verdict::HoldsEquality,
            (Relation::Geq, std::cmp::Ordering::Greater) => Verdict::HoldsStrict,
            (Relation::Leq, std::cmp::Ordering::Less) => Verdict::HoldsStrict,
            _ => Verdict::Fails,
        };
        ConjectureReport {
            id,
            lhs,
            rhs,
            relation,
            verdict,
            witness,
            reinforcement_ok: None,
        }
    }

    pub fn with_reinforcement(mut self, ok: bool) -> Self {
        self.reinforcement_ok = Some(ok);
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict != Verdict::Fails
    }

    /// Signed slack in the claimed direction (negative iff the claim fails).
    pub fn slack(&self) -> BigRational {
        match self.relation {
            Relation::Geq => &self.lhs - &self.rhs,
            Relation::Leq => &self.rhs - &self.lhs,
        }
    }
}

fn rat(value: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(value.into())
}

fn big_pow(base: u64, exp: u32) -> BigInt {
    // 0^0 = 1 by convention
    pow(BigInt::from(base), exp as usize)
}

fn is_powerset_size(m: usize, n: usize) -> bool {
    n < 64 && (m as u128) == 1u128 << n
}

fn require(flag: bool, predicate: &str) -> Result<()> {
    if flag {
        Ok(())
    } else {
        Err(Error::Precondition(predicate.to_string()))
    }
}

/// Which closure the base conjecture is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FranklVariant {
    /// Twice the least membership count is at most the family size
    /// (intersection-closed form).
    MinIntersection,
    /// Twice the greatest membership count is at least the family size
    /// (union-closed form).
    MaxUnion,
}

fn frankl_from_counts(
    id: ConjectureId,
    counts: &[u64],
    m: usize,
    n: usize,
    variant: FranklVariant,
) -> ConjectureReport {
    // ties are broken toward the lowest element index
    let (value, witness) = match variant {
        FranklVariant::MinIntersection => {
            let k = (0..counts.len())
                .fold(0, |best, k| if counts[k] < counts[best] { k } else { best });
            (counts[k], k)
        }
        FranklVariant::MaxUnion => {
            let k = (0..counts.len())
                .fold(0, |best, k| if counts[k] > counts[best] { k } else { best });
            (counts[k], k)
        }
    };
    let relation = match variant {
        FranklVariant::MinIntersection => Relation::Leq,
        FranklVariant::MaxUnion => Relation::Geq,
    };
    let report = ConjectureReport::new(
        id,
        rat(2 * value),
        rat(m as u64),
        relation,
        Some(Witness::Element(witness)),
    );
    let ok = match report.verdict {
        Verdict::HoldsStrict => true,
        Verdict::HoldsEquality => is_powerset_size(m, n),
        Verdict::Fails => false,
    };
    report.with_reinforcement(ok)
}

/// Base conjecture on a reduced closed family (conj3 / conj4).
pub fn check_frankl(family: &SetFamily, variant: FranklVariant) -> Result<ConjectureReport> {
    require(family.is_reduced(), "is_reduced")?;
    let id = match variant {
        FranklVariant::MinIntersection => {
            require(family.is_intersection_closed(), "is_intersection_closed")?;
            ConjectureId::C3
        }
        FranklVariant::MaxUnion => {
            require(family.is_union_closed(), "is_union_closed")?;
            ConjectureId::C4
        }
    };
    let counts = family.element_stats().count_in;
    Ok(frankl_from_counts(
        id,
        &counts,
        family.m(),
        family.n(),
        variant,
    ))
}

/// Base conjecture via the characteristic matrix column sums (conj5 / conj6).
pub fn check_frankl_matrix(matrix: &BitMatrix, variant: FranklVariant) -> Result<ConjectureReport> {
    require(matrix.is_reduced_matrix(), "is_reduced_matrix")?;
    let id = match variant {
        FranklVariant::MinIntersection => {
            require(
                matrix.is_intersection_closed_matrix(),
                "is_intersection_closed_matrix",
            )?;
            ConjectureId::C5
        }
        FranklVariant::MaxUnion => {
            require(matrix.is_union_closed_matrix(), "is_union_closed_matrix")?;
            ConjectureId::C6
        }
    };
    let counts = matrix.column_sums();
    Ok(frankl_from_counts(
        id,
        &counts,
        matrix.m(),
        matrix.n(),
        variant,
    ))
}

/// A point of the rational simplex: nonnegative components of exact sum 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    components: Vec<BigRational>,
}

impl WeightVector {
    pub fn new(components: Vec<BigRational>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::OutsideSimplex("no components".to_string()));
        }
        if let Some(neg) = components.iter().find(|c| c.is_negative()) {
            return Err(Error::OutsideSimplex(format!("negative component {neg}")));
        }
        let total: BigRational = components.iter().sum();
        if !total.is_one() {
            return Err(Error::OutsideSimplex(format!(
                "components sum to {total}, not 1"
            )));
        }
        Ok(WeightVector { components })
    }

    pub fn uniform(n: usize) -> Self {
        let share = BigRational::new(BigInt::one(), BigInt::from(n as u64));
        WeightVector {
            components: vec![share; n],
        }
    }

    /// The unit coordinate vector `e_k`.
    pub fn vertex(n: usize, k: usize) -> Self {
        let mut components = vec![BigRational::zero(); n];
        components[k] = BigRational::one();
        WeightVector { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[BigRational] {
        &self.components
    }
}

/// The power weight: components proportional to the r-th powers of the
/// column sums (uniform at r = 0).
pub fn weight_wr(matrix: &BitMatrix, r: u32) -> Result<WeightVector> {
    let powers: Vec<BigInt> = matrix
        .column_sums()
        .iter()
        .map(|&s| big_pow(s, r))
        .collect();
    let denom: BigInt = powers.iter().sum();
    if denom.is_zero() {
        return Err(Error::UndefinedWeight(format!(
            "all column sums are zero and r = {r} >= 1"
        )));
    }
    let components = powers
        .into_iter()
        .map(|p| BigRational::new(p, denom.clone()))
        .collect();
    WeightVector::new(components)
}

/// Weighted form (conj7): is `2 sum[F x] >= m` at this simplex point?
/// The witness is the best vertex, where the weighted sum is maximal.
pub fn check_simplex(family: &SetFamily, x: &WeightVector) -> Result<ConjectureReport> {
    require(family.is_reduced(), "is_reduced")?;
    require(family.is_union_closed(), "is_union_closed")?;
    if x.len() != family.n() {
        return Err(Error::DimensionMismatch(format!(
            "weight vector has {} components for {} elements",
            x.len(),
            family.n()
        )));
    }
    let counts = family.element_stats().count_in;
    let weighted: BigRational = x
        .components()
        .iter()
        .zip(&counts)
        .map(|(w, &s)| w * rat(s))
        .sum();
    let best = (0..counts.len()).fold(0, |best, k| if counts[k] > counts[best] { k } else { best });
    Ok(ConjectureReport::new(
        ConjectureId::C7,
        rat(2u8) * weighted,
        rat(family.m() as u64),
        Relation::Geq,
        Some(Witness::Element(best)),
    ))
}

/// One evaluated row of the power-sum table: the cross-multiplied sides
/// `2 sum_i s_i^{r+1}` and `m sum_i s_i^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSumRow {
    pub r: u32,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

/// What the limit `r -> infinity` says about the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitDiagnosis {
    /// `2 max > m`: some finite exponent works.
    StrictlyAbove,
    /// `2 max = m`: equality in the limit; a finite exponent reaches
    /// equality iff all column sums coincide (then already at r = 0).
    EqualityAtInfinity { finite: bool },
    /// `2 max < m`: no exponent exists; the family would refute the base
    /// conjecture itself.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalROutcome {
    pub report: ConjectureReport,
    /// Least exponent satisfying the inequality, if one was found.
    pub r: Option<u32>,
    /// Rows evaluated, in increasing r.
    pub table: Vec<PowerSumRow>,
    pub limit: LimitDiagnosis,
}

fn minimal_r_from_counts(counts: &[u64], m: usize, r_max: u32) -> MinimalROutcome {
    let mx = counts.iter().copied().max().expect("nonempty");
    let m_int = BigInt::from(m as u64);
    let sum_counts: u64 = counts.iter().sum();
    let n = counts.len();

    if 2 * mx < m as u64 {
        let report = ConjectureReport::new(
            ConjectureId::C9,
            rat(2 * mx),
            rat(m as u64),
            Relation::Geq,
            None,
        );
        return MinimalROutcome {
            report,
            r: None,
            table: Vec::new(),
            limit: LimitDiagnosis::Violation,
        };
    }
    let all_equal = counts.iter().all(|&s| s == mx);
    if 2 * mx == m as u64 && !all_equal {
        // the weighted mean stays strictly below the maximum at every
        // finite exponent, so only the limit reaches m/2
        let lhs = BigInt::from(2 * sum_counts);
        let rhs = &m_int * BigInt::from(n as u64);
        let report = ConjectureReport::new(
            ConjectureId::C9,
            BigRational::from_integer(lhs.clone()),
            BigRational::from_integer(rhs.clone()),
            Relation::Geq,
            None,
        );
        return MinimalROutcome {
            report,
            r: None,
            table: vec![PowerSumRow { r: 0, lhs, rhs }],
            limit: LimitDiagnosis::EqualityAtInfinity { finite: false },
        };
    }

    let limit = if 2 * mx == m as u64 {
        LimitDiagnosis::EqualityAtInfinity { finite: true }
    } else {
        LimitDiagnosis::StrictlyAbove
    };

    // incrementally maintained powers s_i^r, starting from s_i^0 = 1
    let mut powers: Vec<BigInt> = vec![BigInt::one(); n];
    let mut table = Vec::new();
    for r in 0..=r_max {
        let sum_r: BigInt = powers.iter().sum();
        let sum_r1: BigInt = powers
            .iter()
            .zip(counts)
            .map(|(p, &s)| p * BigInt::from(s))
            .sum();
        let lhs = BigInt::from(2) * &sum_r1;
        let rhs = &m_int * &sum_r;
        let found = lhs >= rhs;
        table.push(PowerSumRow {
            r,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        });
        if found {
            let report = ConjectureReport::new(
                ConjectureId::C9,
                BigRational::from_integer(lhs),
                BigRational::from_integer(rhs),
                Relation::Geq,
                Some(Witness::Exponent(r)),
            );
            return MinimalROutcome {
                report,
                r: Some(r),
                table,
                limit,
            };
        }
        for (p, &s) in powers.iter_mut().zip(counts) {
            *p *= BigInt::from(s);
        }
    }
    // exhausted: a finite exponent exists by the limit but lies above r_max
    let last = table.last().expect("at least r = 0 evaluated");
    let report = ConjectureReport::new(
        ConjectureId::C9,
        BigRational::from_integer(last.lhs.clone()),
        BigRational::from_integer(last.rhs.clone()),
        Relation::Geq,
        None,
    );
    MinimalROutcome {
        report,
        r: None,
        table,
        limit,
    }
}

/// Least exponent `r <= r_max` with `2 sum_i s_i^{r+1} >= m sum_i s_i^r`,
/// with the limit-based short-circuits for the `2 max <= m` cases.
pub fn minimal_r(family: &SetFamily, r_max: u32) -> Result<MinimalROutcome> {
    require(family.is_reduced(), "is_reduced")?;
    require(family.is_union_closed(), "is_union_closed")?;
    Ok(minimal_r_from_counts(
        &family.element_stats().count_in,
        family.m(),
        r_max,
    ))
}

pub const DEFAULT_R_MAX: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMethod {
    BruteForce,
    ColumnPower,
}

/// Average cardinality of intersections over all ordered r-tuples of
/// members. The empty (r = 0) intersection is the whole ground set.
pub fn r_tuple_intersection_average(
    family: &SetFamily,
    r: u32,
    method: AverageMethod,
) -> Result<BigRational> {
    let m = family.m() as u64;
    match method {
        AverageMethod::ColumnPower => {
            let total: BigInt = family
                .element_stats()
                .count_in
                .iter()
                .map(|&s| big_pow(s, r))
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            Ok(BigRational::new(total, big_pow(m, r)))
        }
        AverageMethod::BruteForce => {
            let tuples = (m as u128).checked_pow(r).filter(|&t| t <= 10_000_000);
            let tuples = tuples.ok_or_else(|| {
                Error::BruteForceCap(format!("{m}^{r} ordered tuples exceed 10^7"))
            })?;
            let mask = family.full_row();
            let rows = family.rows();
            let mut total: u128 = 0;
            let mut odometer = vec![0usize; r as usize];
            for _ in 0..tuples {
                let inter = odometer.iter().fold(mask, |acc, &i| acc & rows[i]);
                total += inter.count_ones() as u128;
                for slot in odometer.iter_mut() {
                    *slot += 1;
                    if *slot < rows.len() {
                        break;
                    }
                    *slot = 0;
                }
            }
            Ok(BigRational::new(BigInt::from(total), big_pow(m, r)))
        }
    }
}

/// Tuple-average form (conj10) at a fixed exponent, in cross-multiplied
/// integer form: `2 sum_x s_x^{r+1}` against `m sum_x s_x^r`.
pub fn check_conjecture_10(family: &SetFamily, r: u32) -> Result<ConjectureReport> {
    require(family.is_reduced(), "is_reduced")?;
    require(family.is_union_closed(), "is_union_closed")?;
    let counts = family.element_stats().count_in;
    let lhs: BigInt = counts.iter().map(|&s| big_pow(s, r + 1)).sum::<BigInt>() * 2;
    let rhs: BigInt =
        counts.iter().map(|&s| big_pow(s, r)).sum::<BigInt>() * BigInt::from(family.m() as u64);
    Ok(ConjectureReport::new(
        ConjectureId::C10,
        BigRational::from_integer(lhs),
        BigRational::from_integer(rhs),
        Relation::Geq,
        Some(Witness::Exponent(r)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrongPreconditions {
    pub union_closed: bool,
    pub reduced: bool,
}

/// The four pairwise strong-form verdicts. Computable on any family for
/// exploration; `preconditions` records whether the conjectures actually
/// apply to the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongBundle {
    pub preconditions: StrongPreconditions,
    /// Twice the pair-intersection total against `m` times the member
    /// cardinality total.
    pub c11: ConjectureReport,
    /// Pair intersections against differences `A \ B`, set route.
    pub c12_diff: ConjectureReport,
    /// Pair intersections against reversed differences `B \ A`.
    pub c12_rev: ConjectureReport,
    /// Three times pair intersections against pair unions.
    pub c13: ConjectureReport,
    /// Same comparison as c12, through the matrix products.
    pub c14: ConjectureReport,
}

impl StrongBundle {
    /// Slack of the strong form, `sum|A∩B| - sum|A\B|`.
    pub fn c12_slack(&self) -> BigInt {
        self.c12_diff.slack().to_integer()
    }

    pub fn all_hold(&self) -> bool {
        self.c11.holds()
            && self.c12_diff.holds()
            && self.c12_rev.holds()
            && self.c13.holds()
            && self.c14.holds()
    }
}

pub fn check_strong(family: &SetFamily) -> StrongBundle {
    let preconditions = StrongPreconditions {
        union_closed: family.is_union_closed(),
        reduced: family.is_reduced(),
    };
    let mask = family.full_row();
    let rows = family.rows();
    let m = family.m() as u128;
    let (mut inter, mut diff_ab, mut diff_ba, mut uni) = (0u128, 0u128, 0u128, 0u128);
    for &a in rows {
        for &b in rows {
            inter += (a & b).count_ones() as u128;
            diff_ab += (a & !b & mask).count_ones() as u128;
            diff_ba += (b & !a & mask).count_ones() as u128;
            uni += (a | b).count_ones() as u128;
        }
    }
    let total_card: u128 = rows.iter().map(|r| r.count_ones() as u128).sum();

    let c11 = ConjectureReport::new(
        ConjectureId::C11,
        rat(2 * inter),
        rat(m * total_card),
        Relation::Geq,
        None,
    );
    let c12_diff = ConjectureReport::new(
        ConjectureId::C12,
        rat(inter),
        rat(diff_ab),
        Relation::Geq,
        None,
    );
    let c12_rev = ConjectureReport::new(
        ConjectureId::C12,
        rat(inter),
        rat(diff_ba),
        Relation::Geq,
        None,
    );
    let c13 = ConjectureReport::new(
        ConjectureId::C13,
        rat(3 * inter),
        rat(uni),
        Relation::Geq,
        None,
    );

    // matrix route for the same comparison
    let f = characteristic_matrix(family);
    let fc = f.complement();
    let mat_inter = product_sum(&f, &f, true).expect("same dimensions");
    let mat_diff = product_sum(&f, &fc, true).expect("same dimensions");
    let c14 = ConjectureReport::new(
        ConjectureId::C14,
        BigRational::from_integer(mat_inter),
        BigRational::from_integer(mat_diff),
        Relation::Geq,
        None,
    );

    StrongBundle {
        preconditions,
        c11,
        c12_diff,
        c12_rev,
        c13,
        c14,
    }
}

/// The exact symmetric-difference identity and its strictness. All three
/// computation routes (pairwise sets, matrix products, column formulas)
/// are evaluated and must agree bit for bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymDiffIdentity {
    /// `sum |A XNOR B|` over ordered pairs.
    pub xnor_total: BigInt,
    /// `sum |A XOR B|` over ordered pairs.
    pub xor_total: BigInt,
    /// `sum_x delta_x^2`.
    pub delta_sq_total: BigInt,
    /// XNOR total strictly exceeds XOR total.
    pub strict: bool,
    /// Every element sits in exactly half of the members.
    pub balanced: bool,
}

impl SymDiffIdentity {
    /// The inequality `sum|A XNOR B| >= sum|A XOR B|` as a report.
    pub fn prop12_report(&self) -> ConjectureReport {
        ConjectureReport::new(
            ConjectureId::P12,
            BigRational::from_integer(self.xnor_total.clone()),
            BigRational::from_integer(self.xor_total.clone()),
            Relation::Geq,
            None,
        )
    }

    /// The exact identity as an equality report.
    pub fn prop13_report(&self) -> ConjectureReport {
        ConjectureReport::new(
            ConjectureId::P13,
            BigRational::from_integer(self.xnor_total.clone()),
            BigRational::from_integer(&self.xor_total + &self.delta_sq_total),
            Relation::Geq,
            None,
        )
    }
}

pub fn symdiff_identity(family: &SetFamily) -> Result<SymDiffIdentity> {
    let rows = family.rows();
    let n = family.n() as u128;
    let m = family.m() as u128;

    // route 1: pairwise set operations
    let mut xor_total: u128 = 0;
    for &a in rows {
        for &b in rows {
            xor_total += (a ^ b).count_ones() as u128;
        }
    }
    let xnor_total = n * m * m - xor_total;
    let stats = family.element_stats();
    let delta_sq: i128 = stats.delta.iter().map(|&d| d as i128 * d as i128).sum();
    let set_route = (
        BigInt::from(xnor_total),
        BigInt::from(xor_total),
        BigInt::from(delta_sq),
    );

    // route 2: matrix products
    let f = characteristic_matrix(family);
    let fc = f.complement();
    let mat_xnor = product_sum(&f, &f, true)? + product_sum(&fc, &fc, true)?;
    let mat_xor = product_sum(&f, &fc, true)? + product_sum(&fc, &f, true)?;
    let signed = IntMatrix::signed_difference(&f);
    let mat_delta_sq = signed.mul_transpose(&signed)?.total();
    let mat_route = (mat_xnor, mat_xor, mat_delta_sq);

    // route 3: column formulas
    let m_i = BigInt::from(m);
    let col_xnor: BigInt = stats
        .count_in
        .iter()
        .map(|&s| {
            let s = BigInt::from(s);
            let out = &m_i - &s;
            &s * &s + &out * &out
        })
        .sum();
    let col_xor: BigInt = stats
        .count_in
        .iter()
        .map(|&s| {
            let s = BigInt::from(s);
            let out = &m_i - &s;
            BigInt::from(2) * s * out
        })
        .sum();
    let col_delta_sq: BigInt = stats
        .delta
        .iter()
        .map(|&d| BigInt::from(d) * BigInt::from(d))
        .sum();
    let col_route = (col_xnor, col_xor, col_delta_sq);

    if set_route != mat_route || set_route != col_route {
        return Err(Error::Internal(format!(
            "symmetric-difference routes disagree: sets {set_route:?}, matrix {mat_route:?}, columns {col_route:?}"
        )));
    }
    let (xnor_total, xor_total, delta_sq_total) = set_route;
    if xnor_total != &xor_total + &delta_sq_total {
        return Err(Error::Internal(
            "symmetric-difference identity violated".to_string(),
        ));
    }
    Ok(SymDiffIdentity {
        strict: xnor_total > xor_total,
        balanced: stats.delta.iter().all(|&d| d == 0),
        xnor_total,
        xor_total,
        delta_sq_total,
    })
}

/// The sufficient condition (prop14) together with the strong-form verdict
/// it implies; on every input a true hypothesis must come with a true
/// conjecture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop14Outcome {
    /// `sum|A∩B| + sum_x delta_x^2 >= sum|A^C ∩ B^C|`.
    pub hypothesis: ConjectureReport,
    /// The implied strong form, same numbers as `check_strong`'s c12.
    pub conjecture12: ConjectureReport,
}

pub fn check_prop14(family: &SetFamily) -> Result<Prop14Outcome> {
    require(family.is_reduced(), "is_reduced")?;
    require(family.is_union_closed(), "is_union_closed")?;
    let f = characteristic_matrix(family);
    let fc = f.complement();
    let inter = product_sum(&f, &f, true)?;
    let codiff = product_sum(&fc, &fc, true)?;
    let diff = product_sum(&f, &fc, true)?;
    let stats = family.element_stats();
    let delta_sq: BigInt = stats
        .delta
        .iter()
        .map(|&d| BigInt::from(d) * BigInt::from(d))
        .sum();
    let hypothesis = ConjectureReport::new(
        ConjectureId::P14,
        BigRational::from_integer(&inter + &delta_sq),
        BigRational::from_integer(codiff),
        Relation::Geq,
        None,
    );
    let conjecture12 = ConjectureReport::new(
        ConjectureId::C12,
        BigRational::from_integer(inter),
        BigRational::from_integer(diff),
        Relation::Geq,
        None,
    );
    Ok(Prop14Outcome {
        hypothesis,
        conjecture12,
    })
}

/// Exact rendering: integers plain, proper rationals as `num/den`.
pub fn rational_string(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Header for the per-family report rows.
pub fn csv_header() -> &'static str {
    "key,conjecture,lhs_num,lhs_den,rhs_num,rhs_den,verdict,witness,reinforcement_ok"
}

/// One CSV row per (family canonical key, conjecture id), all values exact.
pub fn csv_row(key_hex: &str, family: &SetFamily, report: &ConjectureReport) -> String {
    let witness = match &report.witness {
        Some(Witness::Element(k)) => family.labels()[*k].clone(),
        Some(Witness::Exponent(r)) => format!("r={r}"),
        None => String::new(),
    };
    let reinforcement = match report.reinforcement_ok {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    };
    format!(
        "{},{},{},{},{},{},{},{},{}",
        key_hex,
        report.id,
        report.lhs.numer(),
        report.lhs.denom(),
        report.rhs.numer(),
        report.rhs.denom(),
        report.verdict,
        witness,
        reinforcement
    )
}
