//! Dimension sieve for almost perfect linear Lee codes of packing radius 2.
//!
//! Each `n >= 3` passes through four rules in order and stops at the first
//! that excludes it:
//!
//! 1. `mod6`: `n = 0, 3, 4 (mod 6)`.
//! 2. `threshold`: a lower bound on `n` depending on `n mod 6` and `n mod 5`.
//! 3. `prop81`: `8n-7` is not a square and `n^2+n+1` has one of a few small
//!    prime divisors.
//! 4. `prop82`: a prime `v > 2n+1` dividing `2(n^2+n+1)` forces a linear
//!    Diophantine equation that has no nonnegative solution.
//!
//! `n = 1, 2` are candidates unconditionally.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{factor, gcd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("{base} is not invertible modulo {modulus}")]
    NotInvertible { base: u64, modulus: u64 },
    #[error("unknown stage `{0}` (expected all, mod6, thresholds, prop81 or prop82)")]
    UnknownStage(String),
}

/// Exact integer square test.
pub fn is_square(m: u64) -> bool {
    let r = m.isqrt();
    r * r == m
}

/// Least `t >= 1` with `base^t = 1 (mod modulus)`.
pub fn mult_order(base: u64, modulus: u64) -> Result<u64, SieveError> {
    if modulus == 1 {
        return Ok(1);
    }
    if modulus == 0 || gcd(base % modulus, modulus) != 1 {
        return Err(SieveError::NotInvertible { base, modulus });
    }
    let b = base % modulus;
    let mut acc = b;
    let mut t = 1;
    while acc != 1 {
        acc = ((acc as u128 * b as u128) % modulus as u128) as u64;
        t += 1;
    }
    Ok(t)
}

/// Excluded by residue: `n >= 3` and `n mod 6` in `{0, 3, 4}`.
pub fn rule_mod6(n: u64) -> bool {
    n >= 3 && matches!(n % 6, 0 | 3 | 4)
}

/// Smallest excluded `n` in each residue class, indexed by `n mod 5`.
/// `0` marks a class that is excluded outright.
const THRESHOLDS_5_MOD_6: [u64; 5] = [19, 207, 114, 154, 232];
const THRESHOLDS_2_MOD_6: [u64; 5] = [20, 206, 115, 163, 235];
const THRESHOLDS_1_MOD_6: [u64; 5] = [0, 186, 125, 0, 83];

/// The threshold that applies to `n`, if its class has one.
pub fn threshold_for(n: u64) -> Option<u64> {
    let table = match n % 6 {
        1 => &THRESHOLDS_1_MOD_6,
        2 => &THRESHOLDS_2_MOD_6,
        5 => &THRESHOLDS_5_MOD_6,
        _ => return None,
    };
    Some(table[(n % 5) as usize])
}

/// Excluded by threshold: returns the bound that `n` reaches.
pub fn rule_thresholds(n: u64) -> Option<u64> {
    if n < 3 {
        return None;
    }
    threshold_for(n).filter(|&t| n >= t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prop81Witness {
    /// `8n - 7`, not a square.
    pub square_test: u64,
    /// The prime dividing `n^2+n+1` that triggers the rule.
    pub divisor: u64,
}

/// Excluded when `8n-7` is not a square and either one of 3, 7, 19, 31
/// divides `n^2+n+1`, or 13 divides it and `8n-11` is not `13k^2`.
pub fn rule_prop81(n: u64) -> Option<Prop81Witness> {
    let square_test = 8 * n - 7;
    if n < 1 || is_square(square_test) {
        return None;
    }
    let order = n * n + n + 1;
    if let Some(&divisor) = [3, 7, 19, 31].iter().find(|&&p| order % p == 0) {
        return Some(Prop81Witness { square_test, divisor });
    }
    if order % 13 == 0 {
        let s = (8 * n).checked_sub(11);
        let thirteen_square = s.is_some_and(|s| s % 13 == 0 && is_square(s / 13));
        if !thirteen_square {
            return Some(Prop81Witness { square_test, divisor: 13 });
        }
    }
    None
}

fn serialize_order<S: Serializer>(a: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
    match a {
        Some(a) => s.serialize_u64(*a),
        None => s.serialize_str("inf"),
    }
}

/// Data for one prime `v > 2n+1` dividing `2(n^2+n+1) = m v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prop82Witness {
    pub v: u64,
    pub m: u64,
    /// Least `a >= 1` with `v | 4^a + 4n + 2`; `None` if no such `a` exists.
    #[serde(serialize_with = "serialize_order")]
    pub a: Option<u64>,
    /// Multiplicative order of 4 modulo `v`.
    pub b: u64,
    /// First solution `(l, x, y)` of `a(x+1) + b y = n - l`, `l <= m/4`,
    /// ordered by `l` then `y`.
    pub solution: Option<(u64, u64, u64)>,
}

impl Prop82Witness {
    /// Whether the recorded data obeys the rule's arithmetic.
    pub fn is_consistent(&self, n: u64) -> bool {
        let order_ok = mult_order(4, self.v) == Ok(self.b);
        let split_ok = self.m.checked_mul(self.v) == Some(2 * (n * n + n + 1));
        let solution_ok = match (self.a, self.solution) {
            (Some(a), Some((l, x, y))) => {
                l <= self.m / 4 && l <= n && a * (x + 1) + self.b * y == n - l
            }
            (_, None) => true,
            (None, Some(_)) => false,
        };
        split_ok && order_ok && solution_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop82Outcome {
    /// No prime divisor of `2(n^2+n+1)` exceeds `2n+1`.
    NotApplicable,
    Pass(Vec<Prop82Witness>),
    Excluded(Vec<Prop82Witness>),
}

fn least_solution(n: u64, a: u64, b: u64, l_max: u64) -> Option<(u64, u64, u64)> {
    for l in 0..=l_max.min(n) {
        let rest = n - l;
        let mut y = 0;
        while b * y + a <= rest {
            let r = rest - b * y;
            if r % a == 0 {
                return Some((l, r / a - 1, y));
            }
            y += 1;
        }
    }
    None
}

fn prop82_for(n: u64, v: u64) -> Prop82Witness {
    let m = 2 * (n * n + n + 1) / v;
    let b = mult_order(4, v).expect("v is an odd prime");
    let target = (v - (4 * n + 2) % v) % v;
    let mut power = 1u64;
    let mut a = None;
    for t in 1..=b {
        power = power * 4 % v;
        if power == target {
            a = Some(t);
            break;
        }
    }
    let solution = a.and_then(|a| least_solution(n, a, b, m / 4));
    Prop82Witness { v, m, a, b, solution }
}

pub fn rule_prop82(n: u64) -> Prop82Outcome {
    let witnesses: Vec<_> = factor(2 * (n * n + n + 1))
        .primes()
        .filter(|&v| v > 2 * n + 1)
        .map(|v| prop82_for(n, v))
        .collect();
    if witnesses.is_empty() {
        Prop82Outcome::NotApplicable
    } else if witnesses.iter().any(|w| w.solution.is_none()) {
        Prop82Outcome::Excluded(witnesses)
    } else {
        Prop82Outcome::Pass(witnesses)
    }
}

/// The last rule a run applies; earlier rules always run too.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Mod6,
    Thresholds,
    Prop81,
    Prop82,
}

impl Stage {
    pub const ALL: Stage = Stage::Prop82;
}

impl FromStr for Stage {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" | "prop82" => Ok(Stage::Prop82),
            "mod6" => Ok(Stage::Mod6),
            "thresholds" => Ok(Stage::Thresholds),
            "prop81" => Ok(Stage::Prop81),
            other => Err(SieveError::UnknownStage(other.to_string())),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Mod6 => "mod6",
            Stage::Thresholds => "thresholds",
            Stage::Prop81 => "prop81",
            Stage::Prop82 => "prop82",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Excluded,
    Candidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExcludingRule {
    Mod6,
    Threshold,
    Prop81,
    Prop82,
    None,
}

impl fmt::Display for ExcludingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExcludingRule::Mod6 => "mod6",
            ExcludingRule::Threshold => "threshold",
            ExcludingRule::Prop81 => "prop81",
            ExcludingRule::Prop82 => "prop82",
            ExcludingRule::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Residue { residue_mod6: u64 },
    Threshold { residue_mod6: u64, residue_mod5: u64, bound: u64 },
    Prop81(Prop81Witness),
    Prop82(Vec<Prop82Witness>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveRecord {
    pub n: u64,
    pub verdict: Verdict,
    pub rule: ExcludingRule,
    /// Data for the excluding rule, or the order-rule data a candidate passed.
    pub witness: Option<Witness>,
}

impl SieveRecord {
    fn candidate(n: u64, witness: Option<Witness>) -> Self {
        Self {
            n,
            verdict: Verdict::Candidate,
            rule: ExcludingRule::None,
            witness,
        }
    }

    fn excluded(n: u64, rule: ExcludingRule, witness: Witness) -> Self {
        Self {
            n,
            verdict: Verdict::Excluded,
            rule,
            witness: Some(witness),
        }
    }

    pub fn is_candidate(&self) -> bool {
        self.verdict == Verdict::Candidate
    }

    pub fn csv_header() -> &'static str {
        "n,verdict,rule,v,m,a,b,ell,x,y"
    }

    /// One CSV row; the order-rule columns are blank unless that rule ran
    /// and found a prime.
    pub fn csv_row(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Excluded => "excluded",
            Verdict::Candidate => "candidate",
        };
        let mut row = format!("{},{},{}", self.n, verdict, self.rule);
        match &self.witness {
            Some(Witness::Prop82(ws)) => {
                let col = |f: &dyn Fn(&Prop82Witness) -> String| {
                    ws.iter().map(f).collect::<Vec<_>>().join("|")
                };
                let sol = |i: usize| {
                    col(&|w: &Prop82Witness| {
                        w.solution
                            .map(|s| [s.0, s.1, s.2][i].to_string())
                            .unwrap_or_default()
                    })
                };
                row.push_str(&format!(
                    ",{},{},{},{},{},{},{}",
                    col(&|w| w.v.to_string()),
                    col(&|w| w.m.to_string()),
                    col(&|w| w.a.map_or("inf".into(), |a| a.to_string())),
                    col(&|w| w.b.to_string()),
                    sol(0),
                    sol(1),
                    sol(2),
                ));
            }
            _ => row.push_str(",,,,,,,"),
        }
        row
    }
}

/// Runs the rules up to `stage` on a single `n`.
pub fn sieve_one(n: u64, stage: Stage) -> SieveRecord {
    if n <= 2 {
        return SieveRecord::candidate(n, None);
    }
    if rule_mod6(n) {
        return SieveRecord::excluded(n, ExcludingRule::Mod6, Witness::Residue { residue_mod6: n % 6 });
    }
    if stage >= Stage::Thresholds {
        if let Some(bound) = rule_thresholds(n) {
            let w = Witness::Threshold {
                residue_mod6: n % 6,
                residue_mod5: n % 5,
                bound,
            };
            return SieveRecord::excluded(n, ExcludingRule::Threshold, w);
        }
    }
    if stage >= Stage::Prop81 {
        if let Some(w) = rule_prop81(n) {
            return SieveRecord::excluded(n, ExcludingRule::Prop81, Witness::Prop81(w));
        }
    }
    if stage >= Stage::Prop82 {
        match rule_prop82(n) {
            Prop82Outcome::Excluded(ws) => {
                return SieveRecord::excluded(n, ExcludingRule::Prop82, Witness::Prop82(ws))
            }
            Prop82Outcome::Pass(ws) => return SieveRecord::candidate(n, Some(Witness::Prop82(ws))),
            Prop82Outcome::NotApplicable => {}
        }
    }
    SieveRecord::candidate(n, None)
}

/// Records for `n = 1..=n_max`, in order.
pub fn run_sieve(n_max: u64, stage: Stage) -> Vec<SieveRecord> {
    (1..=n_max)
        .into_par_iter()
        .map(|n| sieve_one(n, stage))
        .collect()
}

/// The number of values the reference intermediate list is stated to have;
/// it actually lists 32 (see [`SieveSummary`]).
pub const STATED_INTERMEDIATE_COUNT: usize = 23;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveSummary {
    pub max: u64,
    pub stage: Stage,
    pub candidates: Vec<u64>,
    /// `n >= 3` surviving mod6, thresholds and prop81; present when the run
    /// reached prop81.
    pub intermediate: Option<Vec<u64>>,
    pub intermediate_count: Option<usize>,
    /// The stated count of the intermediate list, kept for comparison
    /// with `intermediate_count`; the two disagree.
    pub intermediate_stated_count: Option<usize>,
}

pub fn summarize(records: &[SieveRecord], stage: Stage) -> SieveSummary {
    let candidates = records.iter().filter(|r| r.is_candidate()).map(|r| r.n).collect();
    let intermediate: Option<Vec<u64>> = (stage >= Stage::Prop81).then(|| {
        records
            .iter()
            .filter(|r| r.n >= 3 && matches!(r.rule, ExcludingRule::None | ExcludingRule::Prop82))
            .map(|r| r.n)
            .collect()
    });
    SieveSummary {
        max: records.last().map_or(0, |r| r.n),
        stage,
        candidates,
        intermediate_count: intermediate.as_ref().map(Vec::len),
        intermediate,
        intermediate_stated_count: (stage >= Stage::Prop81).then_some(STATED_INTERMEDIATE_COUNT),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mult_order_examples() {
        assert_eq!(mult_order(4, 19), Ok(9));
        assert_eq!(mult_order(4, 3), Ok(1));
        assert_eq!(mult_order(4, 67), Ok(33));
        assert_eq!(
            mult_order(38, 19),
            Err(SieveError::NotInvertible { base: 38, modulus: 19 })
        );
    }

    #[test]
    fn squares() {
        assert!(is_square(225));
        assert!(is_square(0));
        assert!(is_square(289));
        assert!(!is_square(481));
        assert!(is_square(u32::MAX as u64 * u32::MAX as u64));
    }

    #[test]
    fn mod6_examples() {
        assert!(rule_mod6(6));
        assert!(!rule_mod6(7));
        assert!(rule_mod6(9));
        assert!(!rule_mod6(1) && !rule_mod6(2));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(rule_thresholds(115), Some(0));
        assert_eq!(rule_thresholds(119), None);
        assert_eq!(rule_thresholds(235), Some(0));
        assert_eq!(rule_thresholds(35), Some(19));
        assert_eq!(rule_thresholds(20), Some(20));
        assert_eq!(rule_thresholds(239), Some(232));
        assert_eq!(rule_thresholds(227), Some(114));
        assert_eq!(rule_thresholds(107), None);
    }

    #[test]
    fn prop81_examples() {
        assert_eq!(rule_prop81(61), Some(Prop81Witness { square_test: 481, divisor: 3 }));
        assert_eq!(rule_prop81(29), None);
        assert_eq!(rule_prop81(35), Some(Prop81Witness { square_test: 273, divisor: 13 }));
        // 8*37-7 = 17^2
        assert_eq!(rule_prop81(37), None);
    }

    #[test]
    fn prop82_examples() {
        match rule_prop82(7) {
            Prop82Outcome::Excluded(ws) => {
                assert_eq!(ws, vec![Prop82Witness { v: 19, m: 6, a: None, b: 9, solution: None }]);
            }
            other => panic!("{other:?}"),
        }
        match rule_prop82(29) {
            Prop82Outcome::Pass(ws) => {
                assert_eq!(
                    ws,
                    vec![Prop82Witness { v: 67, m: 26, a: Some(2), b: 33, solution: Some((1, 13, 0)) }]
                );
                assert!(ws[0].is_consistent(29));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(rule_prop82(11), Prop82Outcome::NotApplicable);
    }

    #[test]
    fn prop82_against_brute_force() {
        for n in 3..400u64 {
            let big = 2 * (n * n + n + 1);
            let primes: Vec<u64> = (2 * n + 2..=big)
                .filter(|v| big % v == 0 && (2..*v).take_while(|d| d * d <= *v).all(|d| v % d != 0))
                .collect();
            let outcome = rule_prop82(n);
            if primes.is_empty() {
                assert_eq!(outcome, Prop82Outcome::NotApplicable, "n={n}");
                continue;
            }
            let mut excluded = false;
            for v in primes {
                let m = big / v;
                let mut b = 1;
                let mut p = 4 % v;
                while p != 1 {
                    p = p * 4 % v;
                    b += 1;
                }
                let a = (1..=b)
                    .scan(1u64, |q, a| {
                        *q = *q * 4 % v;
                        Some((a, *q))
                    })
                    .find(|&(_, q)| (q + 4 * n + 2) % v == 0)
                    .map(|(a, _)| a);
                let solvable = a.is_some_and(|a| {
                    (0..=(m / 4).min(n)).any(|l| {
                        (0..=n).any(|x| (0..=n).any(|y| a * (x + 1) + b * y == n - l))
                    })
                });
                excluded |= !solvable;
            }
            assert_eq!(matches!(outcome, Prop82Outcome::Excluded(_)), excluded, "n={n}");
        }
    }

    #[test]
    fn small_runs() {
        let rs = run_sieve(2, Stage::ALL);
        assert!(rs.iter().all(SieveRecord::is_candidate));
        assert_eq!(rs.len(), 2);
    }

    #[test]
    fn stage_parsing() {
        assert_eq!("all".parse::<Stage>(), Ok(Stage::Prop82));
        assert_eq!("thresholds".parse::<Stage>(), Ok(Stage::Thresholds));
        assert!("threshold".parse::<Stage>().is_err());
    }

    #[test]
    fn record_formats() {
        let r = sieve_one(29, Stage::ALL);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"n":29,"verdict":"candidate","rule":"none","witness":[{"v":67,"m":26,"a":2,"b":33,"solution":[1,13,0]}]}"#
        );
        assert_eq!(r.csv_row(), "29,candidate,none,67,26,2,33,1,13,0");
        let r = sieve_one(7, Stage::ALL);
        assert_eq!(r.csv_row(), "7,excluded,prop82,19,6,inf,9,,,");
        assert!(serde_json::to_string(&r).unwrap().contains(r#""a":"inf""#));
        let r = sieve_one(6, Stage::ALL);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"n":6,"verdict":"excluded","rule":"mod6","witness":{"residue_mod6":0}}"#
        );
        assert_eq!(r.csv_row(), "6,excluded,mod6,,,,,,,");
    }

    #[test]
    fn stages_are_cumulative() {
        assert!(sieve_one(35, Stage::Mod6).is_candidate());
        assert_eq!(sieve_one(35, Stage::Thresholds).rule, ExcludingRule::Threshold);
        assert!(sieve_one(61, Stage::Thresholds).is_candidate());
        assert_eq!(sieve_one(61, Stage::Prop81).rule, ExcludingRule::Prop81);
        assert!(sieve_one(7, Stage::Prop81).is_candidate());
        assert_eq!(sieve_one(7, Stage::Prop82).rule, ExcludingRule::Prop82);
    }
}
