//! Certificates `(H, T0, T1)` for almost perfect linear Lee codes of packing
//! radius 2, and the diagnostic battery run against them.
//!
//! A certificate is a pair of inverse-closed subsets of an abelian group `H`
//! of order `n^2+n+1` with `e in T0`, satisfying
//!
//! ```text
//! T0 T1       = H - e
//! T0^2 + T1^2 = 2H - T0^(2) - T1^(2) + 2n e
//! ```
//!
//! in `Z[H]`. Everything else in this module is a consequence of those two
//! equations, checked on the instance at hand.

mod checks;
mod profile;
mod report;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAbelianGroup, GroupElement, GroupRingElement};

pub use checks::{
    cubic_identities, evaluate_cubic_identities, evaluate_quintic_identities,
    necessary_conditions, quintic_identities, repetition_bounds, verify_certificate,
};
pub use profile::{
    counting_identities, intersection_bounds, partition_profile, residue_class_checks,
    PartitionProfile,
};
pub use report::{CheckEntry, CheckStatus, DiagnosticsReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("certificate line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("element {0} listed twice")]
    DuplicateElement(String),
    #[error("certificate does not satisfy the defining equations")]
    NotVerified,
    #[error("|T1 cap Supp(T^(2))| = {0} is odd, so theta1 is not an integer")]
    NonIntegralTheta1(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    group: Arc<FiniteAbelianGroup>,
    n: u64,
    t0: Vec<usize>,
    t1: Vec<usize>,
}

fn sorted_distinct(group: &FiniteAbelianGroup, mut ranks: Vec<usize>) -> Result<Vec<usize>, CertificateError> {
    ranks.sort_unstable();
    if let Some(w) = ranks.windows(2).find(|w| w[0] == w[1]) {
        return Err(CertificateError::DuplicateElement(group.element_at(w[0]).to_string()));
    }
    Ok(ranks)
}

impl Certificate {
    /// Builds a candidate certificate. Only membership and distinctness are
    /// enforced here; the structural conditions are reported by
    /// [`verify_certificate`].
    pub fn new(
        group: Arc<FiniteAbelianGroup>,
        n: u64,
        t0: &[GroupElement],
        t1: &[GroupElement],
    ) -> Result<Self, CertificateError> {
        let ranks = |set: &[GroupElement]| -> Result<Vec<usize>, CertificateError> {
            set.iter()
                .map(|g| group.check(g).map(|_| group.rank_of(g)).map_err(Into::into))
                .collect()
        };
        let t0 = ranks(t0)?;
        let t1 = ranks(t1)?;
        Self::from_ranks(group, n, t0, t1)
    }

    /// As [`Certificate::new`], with elements given by rank.
    ///
    /// # Panics
    /// If a rank is out of range for the group.
    pub fn from_ranks(
        group: Arc<FiniteAbelianGroup>,
        n: u64,
        t0: Vec<usize>,
        t1: Vec<usize>,
    ) -> Result<Self, CertificateError> {
        assert!(t0.iter().chain(&t1).all(|&r| r < group.len()), "rank out of range");
        let t0 = sorted_distinct(&group, t0)?;
        let t1 = sorted_distinct(&group, t1)?;
        Ok(Self { group, n, t0, t1 })
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        &self.group
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Ranks of `T0`, ascending.
    pub fn t0_ranks(&self) -> &[usize] {
        &self.t0
    }

    pub fn t1_ranks(&self) -> &[usize] {
        &self.t1
    }

    pub fn t0(&self) -> Vec<GroupElement> {
        self.t0.iter().map(|&r| self.group.element_at(r)).collect()
    }

    pub fn t1(&self) -> Vec<GroupElement> {
        self.t1.iter().map(|&r| self.group.element_at(r)).collect()
    }

    pub fn k0(&self) -> u64 {
        self.t0.len() as u64
    }

    pub fn k1(&self) -> u64 {
        self.t1.len() as u64
    }

    pub fn t0_element(&self) -> GroupRingElement {
        GroupRingElement::from_ranks(&self.group, &self.t0)
    }

    pub fn t1_element(&self) -> GroupRingElement {
        GroupRingElement::from_ranks(&self.group, &self.t1)
    }

    /// Applies a map on element ranks to both sets, e.g. a group automorphism.
    pub fn map_ranks(&self, f: impl Fn(usize) -> usize) -> Result<Self, CertificateError> {
        Self::from_ranks(
            Arc::clone(&self.group),
            self.n,
            self.t0.iter().map(|&r| f(r)).collect(),
            self.t1.iter().map(|&r| f(r)).collect(),
        )
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, group: &FiniteAbelianGroup, set: &[usize]) -> fmt::Result {
    for (i, &r) in set.iter().enumerate() {
        if i > 0 {
            write!(f, ";")?;
        }
        write!(f, "{}", group.element_at(r))?;
    }
    Ok(())
}

/// The text format read by [`FromStr`]:
///
/// ```text
/// group: 7
/// n: 2
/// T0: 0;1;6
/// T1: 2;5
/// ```
impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "group:")?;
        for d in self.group.invariant_factors() {
            write!(f, " {d}")?;
        }
        writeln!(f)?;
        writeln!(f, "n: {}", self.n)?;
        write!(f, "T0: ")?;
        write_set(f, &self.group, &self.t0)?;
        writeln!(f)?;
        write!(f, "T1: ")?;
        write_set(f, &self.group, &self.t1)?;
        writeln!(f)
    }
}

impl FromStr for Certificate {
    type Err = CertificateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut last_line = 0;
        let mut field = |key: &str| -> Result<(usize, String), CertificateError> {
            let (line, text) = lines.next().ok_or_else(|| CertificateError::Parse {
                line: last_line + 1,
                message: format!("missing `{key}:` line"),
            })?;
            last_line = line;
            let (k, v) = text.split_once(':').ok_or_else(|| CertificateError::Parse {
                line,
                message: format!("expected `{key}: ...`, found `{text}`"),
            })?;
            if k.trim() != key {
                return Err(CertificateError::Parse {
                    line,
                    message: format!("expected key `{key}`, found `{}`", k.trim()),
                });
            }
            Ok((line, v.trim().to_string()))
        };
        let parse_err = |line, message: String| CertificateError::Parse { line, message };

        let (line, text) = field("group")?;
        let factors = text
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| parse_err(line, format!("not an integer: `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let group = Arc::new(
            FiniteAbelianGroup::new(factors).map_err(|e| parse_err(line, e.to_string()))?,
        );

        let (line, text) = field("n")?;
        let n = text
            .parse::<u64>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| parse_err(line, format!("expected a positive integer, found `{text}`")))?;

        let mut sets = Vec::with_capacity(2);
        for key in ["T0", "T1"] {
            let (line, text) = field(key)?;
            let mut ranks = Vec::new();
            for item in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                let residues = item
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u64>()
                            .map_err(|_| parse_err(line, format!("bad element `{item}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let g = group
                    .element(residues)
                    .map_err(|e| parse_err(line, format!("element `{item}`: {e}")))?;
                ranks.push(group.rank_of(&g));
            }
            let ranks = sorted_distinct(&group, ranks).map_err(|e| parse_err(line, e.to_string()))?;
            sets.push(ranks);
        }
        if let Some((line, _)) = lines.next() {
            return Err(parse_err(line, "trailing content after `T1:`".into()));
        }
        let t1 = sets.pop().unwrap();
        let t0 = sets.pop().unwrap();
        Ok(Self { group, n, t0, t1 })
    }
}

/// Everything the battery computes for one certificate.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: DiagnosticsReport,
    /// Present iff the certificate verified.
    pub profile: Option<PartitionProfile>,
}

/// Runs every check in dependency order. Checks whose preconditions fail are
/// reported as not applicable.
pub fn analyze(c: &Certificate) -> Result<Analysis, CertificateError> {
    let mut report = verify_certificate(c);
    let verified = report.passed();
    report.extend(necessary_conditions(c));
    report.extend(cubic_identities(c));
    report.extend(quintic_identities(c));
    report.extend(repetition_bounds(c));
    let profile = if verified {
        let p = partition_profile(c)?;
        report.extend(counting_identities(&p, c));
        report.extend(residue_class_checks(&p, c));
        report.extend(intersection_bounds(&p, c));
        Some(p)
    } else {
        for id in profile::PROFILE_CHECK_IDS {
            report.push(CheckEntry::not_applicable(id));
        }
        None
    };
    Ok(Analysis { report, profile })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let c = example_n2();
        assert_eq!(c.n(), 2);
        assert_eq!(c.t0_ranks(), &[0, 1, 6]);
        assert_eq!(c.t1_ranks(), &[2, 5]);
        assert_eq!(c.to_string(), "group: 7\nn: 2\nT0: 0;1;6\nT1: 2;5\n");
        let again: Certificate = c.to_string().parse().unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn parse_non_cyclic_group() {
        let text = "# comment\ngroup: 3 3\nn: 1\n\nT0: 0,0\nT1: 0,1;0,2\n";
        let c: Certificate = text.parse().unwrap();
        assert_eq!(c.group().invariant_factors(), &[3, 3]);
        assert_eq!(c.t1_ranks(), &[1, 2]);
        assert_eq!(c.to_string(), "group: 3 3\nn: 1\nT0: 0,0\nT1: 0,1;0,2\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("group: 7\nn: 2\nT0: 0;1;9\nT1: 2;5\n", 3),
            ("group: 7\nn: x\nT0: 0\nT1: 2;5\n", 2),
            ("group: 7\nn: 2\nT0: 0;1;1\nT1: 2;5\n", 3),
            ("group: 4 2\nn: 2\nT0: 0\nT1: 1\n", 1),
            ("group: 7\nn: 2\nT1: 0\nT0: 2;5\n", 3),
            ("group: 7\nn: 2\nT0: 0;1\n", 4),
            ("group: 7\nn: 2\nT0: 0\nT1: 1\nextra\n", 5),
            ("group: 7\nn: 2\nT0: 0,1\nT1: 1\n", 3),
        ];
        for (text, expected) in cases {
            match text.parse::<Certificate>() {
                Err(CertificateError::Parse { line, .. }) => assert_eq!(line, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn full_battery_on_examples() {
        for c in [example_n1(), example_n2()] {
            let a = analyze(&c).unwrap();
            assert!(a.report.passed(), "{}", a.report);
            assert!(a.report.entries().iter().all(|e| e.status != CheckStatus::Fail));
            assert!(a.profile.is_some());
        }
    }

    #[test]
    fn failed_verification_gates_the_battery() {
        let c: Certificate = "group: 7\nn: 2\nT0: 0;1;6\nT1: 3;4\n".parse().unwrap();
        let a = analyze(&c).unwrap();
        assert!(!a.report.passed());
        assert!(a.profile.is_none());
        assert_eq!(a.report.status("cubic_t0"), Some(CheckStatus::NotApplicable));
        assert_eq!(a.report.status("count_weighted_x"), Some(CheckStatus::NotApplicable));
        let ids: Vec<_> = a.report.entries().iter().map(|e| e.check).collect();
        let mut dedup = ids.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(ids.len(), dedup.len(), "every check appears once");
    }
}
