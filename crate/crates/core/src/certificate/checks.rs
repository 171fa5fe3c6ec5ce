//! Checks evaluated directly on the sets `T0`, `T1`: the defining equations,
//! the set-theoretic necessary conditions, the cubic and quintic identities,
//! and the repetition bounds on cube maps.

use std::sync::Arc;

use crate::algebra::{is_inverse_closed, AlgebraError, FiniteAbelianGroup, GroupRingElement};

use super::report::{CheckEntry, DiagnosticsReport};
use super::Certificate;

/// The ring elements every check starts from.
pub(super) struct Parts {
    pub group: Arc<FiniteAbelianGroup>,
    pub n: i64,
    pub k0: i64,
    pub k1: i64,
    pub e: GroupRingElement,
    pub h: GroupRingElement,
    pub t0: GroupRingElement,
    pub t1: GroupRingElement,
    pub that: GroupRingElement,
}

impl Parts {
    pub fn new(c: &Certificate) -> Self {
        let group = Arc::clone(c.group());
        let t0 = c.t0_element();
        let t1 = c.t1_element();
        let that = t0.checked_add(&t1).expect("0/1 sums cannot overflow");
        Self {
            n: c.n() as i64,
            k0: c.k0() as i64,
            k1: c.k1() as i64,
            e: GroupRingElement::identity(&group),
            h: GroupRingElement::all_ones(&group),
            group,
            t0,
            t1,
            that,
        }
    }
}

/// `sum_i lambda_i A_i`.
pub(super) fn combo(
    group: &Arc<FiniteAbelianGroup>,
    terms: &[(i64, &GroupRingElement)],
) -> Result<GroupRingElement, AlgebraError> {
    terms.iter().try_fold(GroupRingElement::zero(group), |acc, (lambda, a)| {
        acc.checked_add(&a.checked_scale(*lambda)?)
    })
}

pub(super) fn indicator(len: usize, ranks: &[usize]) -> Vec<bool> {
    let mut out = vec![false; len];
    for &r in ranks {
        out[r] = true;
    }
    out
}

pub(super) fn support(a: &GroupRingElement) -> Vec<bool> {
    a.coefficients().iter().map(|&c| c > 0).collect()
}

fn ring_equality(
    check: &'static str,
    group: &FiniteAbelianGroup,
    sides: Result<(GroupRingElement, GroupRingElement), AlgebraError>,
) -> CheckEntry {
    match sides {
        Err(e) => CheckEntry::fail(check, e.to_string()),
        Ok((lhs, rhs)) => {
            let diff = lhs
                .coefficients()
                .iter()
                .zip(rhs.coefficients())
                .position(|(a, b)| a != b);
            match diff {
                None => CheckEntry::pass(check),
                Some(r) => CheckEntry::fail(
                    check,
                    format!(
                        "coefficient of {}: left {}, right {}",
                        group.element_at(r),
                        lhs.coefficient(r),
                        rhs.coefficient(r)
                    ),
                ),
            }
        }
    }
}

/// Structural conditions, then the two defining equations. The equations are
/// not evaluated unless the structure is sound.
pub fn verify_certificate(c: &Certificate) -> DiagnosticsReport {
    let g = c.group();
    let n = c.n();
    let mut report = DiagnosticsReport::new();

    let expected = n.checked_mul(n).and_then(|s| s.checked_add(n + 1));
    report.push(CheckEntry::from_bool(
        "group_order",
        expected == Some(g.order()),
        || format!("|H| = {}, n^2+n+1 = {}", g.order(), expected.map_or("overflow".into(), |v| v.to_string())),
    ));
    report.push(CheckEntry::from_bool(
        "identity_in_t0",
        c.t0_ranks().first() == Some(&0),
        || "e is not in T0".into(),
    ));
    for (check, set) in [("t0_inverse_closed", c.t0_ranks()), ("t1_inverse_closed", c.t1_ranks())] {
        report.push(CheckEntry::from_bool(check, is_inverse_closed(g, set), || {
            let member = indicator(g.len(), set);
            let r = set.iter().find(|&&r| !member[g.neg_rank(r)]).unwrap();
            format!("inverse of {} is missing", g.element_at(*r))
        }));
    }
    if !report.passed() {
        report.push(CheckEntry::not_applicable("product_equation"));
        report.push(CheckEntry::not_applicable("square_equation"));
        return report;
    }

    let p = Parts::new(c);
    report.push(ring_equality(
        "product_equation",
        g,
        (|| Ok((p.t0.checked_mul(&p.t1)?, p.h.checked_sub(&p.e)?)))(),
    ));
    report.push(ring_equality(
        "square_equation",
        g,
        (|| {
            let lhs = p.t0.checked_mul(&p.t0)?.checked_add(&p.t1.checked_mul(&p.t1)?)?;
            let rhs = combo(
                g,
                &[
                    (2, &p.h),
                    (-1, &p.t0.power_map(2)),
                    (-1, &p.t1.power_map(2)),
                    (2 * p.n, &p.e),
                ],
            )?;
            Ok((lhs, rhs))
        })(),
    ));
    report
}

fn verified(c: &Certificate) -> bool {
    verify_certificate(c).passed()
}

fn first_where(group: &FiniteAbelianGroup, flags: impl Iterator<Item = bool>) -> Option<String> {
    flags
        .enumerate()
        .find(|(_, f)| *f)
        .map(|(r, _)| group.element_at(r).to_string())
}

/// The set-theoretic necessary conditions on `T0`, `T1`. Evaluated on any
/// candidate, since each is a plain statement about the two sets.
pub fn necessary_conditions(c: &Certificate) -> DiagnosticsReport {
    let p = Parts::new(c);
    let g = &*p.group;
    let len = g.len();
    let in_t0 = indicator(len, c.t0_ranks());
    let in_t1 = indicator(len, c.t1_ranks());
    let t0_sq2 = support(&p.t0.power_map(2));
    let t1_sq2 = support(&p.t1.power_map(2));
    let t0_cube = support(&p.t0.power_map(3));
    let mut report = DiagnosticsReport::new();

    let e_in_t0 = in_t0[0];
    let e_in_t1 = in_t1[0];
    report.push(CheckEntry::from_bool("nc_identity_placement", e_in_t0 && !e_in_t1, || {
        format!("e in T0: {e_in_t0}, e in T1: {e_in_t1}")
    }));

    let meet = first_where(g, (0..len).map(|r| in_t0[r] && in_t1[r]));
    let meet_sq = first_where(g, (0..len).map(|r| t0_sq2[r] && t1_sq2[r]));
    report.push(CheckEntry::from_bool("nc_disjointness", meet.is_none() && meet_sq.is_none(), || match meet {
        Some(x) => format!("{x} in T0 and T1"),
        None => format!("{} in T0^(2) and T1^(2)", meet_sq.clone().unwrap()),
    }));

    let a = first_where(g, (0..len).map(|r| r != 0 && in_t0[r] && t0_sq2[r]));
    let b = first_where(g, (0..len).map(|r| in_t0[r] && t1_sq2[r]));
    report.push(CheckEntry::from_bool("nc_square_avoidance", a.is_none() && b.is_none(), || match a {
        Some(x) => format!("{x} in T0 and T0^(2)"),
        None => format!("{} in T0 and T1^(2)", b.clone().unwrap()),
    }));

    let mut distinct_products = vec![false; len];
    for (i, &x) in c.t0_ranks().iter().enumerate() {
        for &y in &c.t0_ranks()[i + 1..] {
            distinct_products[g.add_ranks(x, y)] = true;
        }
    }
    let stray = first_where(g, (0..len).map(|r| r != 0 && distinct_products[r] && t0_sq2[r]));
    let needs_e = c.k0() >= 2 && !(distinct_products[0] && t0_sq2[0]);
    report.push(CheckEntry::from_bool("nc_distinct_products", stray.is_none() && !needs_e, || match stray {
        Some(x) => format!("{x} is a product of distinct elements of T0 and lies in T0^(2)"),
        None => "e is missing from the intersection".into(),
    }));

    let (k0, k1, n) = (c.k0(), c.k1(), c.n());
    let sizes = |check: &'static str, applies: bool, want0: u64, want1: u64| {
        if !applies {
            CheckEntry::not_applicable(check)
        } else {
            CheckEntry::from_bool(check, k0 == want0 && k1 == want1, || {
                format!("|T0| = {k0}, |T1| = {k1}, expected {want0} and {want1}")
            })
        }
    };
    report.push(sizes("nc_sizes_odd", n % 2 == 1, n, n + 1));
    report.push(sizes("nc_sizes_even", n % 2 == 0, n + 1, n));

    let sq0 = p.t0.checked_mul(&p.t0).map(|a| support(&a));
    let sq1 = p.t1.checked_mul(&p.t1).map(|a| support(&a));
    report.push(match (sq0, sq1) {
        (Ok(sq0), Ok(sq1)) => {
            let common = first_where(g, (0..len).map(|r| r != 0 && sq0[r] && sq1[r]));
            CheckEntry::from_bool("nc_square_overlap", common.is_none(), || {
                format!("{} in T0^2 and T1^2", common.clone().unwrap())
            })
        }
        (Err(e), _) | (_, Err(e)) => CheckEntry::fail("nc_square_overlap", e.to_string()),
    });

    let stray = first_where(g, (0..len).map(|r| r != 0 && in_t0[r] && t0_cube[r]));
    let has_e = in_t0[0] && t0_cube[0];
    report.push(CheckEntry::from_bool("nc_cube_intersection", stray.is_none() && has_e, || match stray {
        Some(x) => format!("{x} in T0 and T0^(3)"),
        None => "e is not in T0 and T0^(3)".into(),
    }));
    report
}

/// The cubic identities for `T0^3` and `T1^3`, evaluated without gating.
pub fn evaluate_cubic_identities(c: &Certificate) -> DiagnosticsReport {
    let p = Parts::new(c);
    let g = &p.group;
    let that2 = p.that.power_map(2);
    let side = |ti: &GroupRingElement, tj: &GroupRingElement, ki: i64, kj: i64| {
        Ok((
            ti.checked_pow(3)?,
            combo(
                g,
                &[(2 * ki - kj, &p.h), (2 * p.n, ti), (1, tj), (-1, &ti.checked_mul(&that2)?)],
            )?,
        ))
    };
    [
        ring_equality("cubic_t0", g, side(&p.t0, &p.t1, p.k0, p.k1)),
        ring_equality("cubic_t1", g, side(&p.t1, &p.t0, p.k1, p.k0)),
    ]
    .into_iter()
    .collect()
}

pub fn cubic_identities(c: &Certificate) -> DiagnosticsReport {
    if verified(c) {
        evaluate_cubic_identities(c)
    } else {
        ["cubic_t0", "cubic_t1"].map(CheckEntry::not_applicable).into_iter().collect()
    }
}

/// The quintic identities for `T^(4) T0` and `T^(4) T1`, evaluated without
/// gating.
pub fn evaluate_quintic_identities(c: &Certificate) -> DiagnosticsReport {
    let p = Parts::new(c);
    let g = &p.group;
    let n = p.n;
    let that2 = p.that.power_map(2);
    let that4 = p.that.power_map(4);
    let side = |ti: &GroupRingElement, tj: &GroupRingElement, ki: i64, kj: i64| {
        let lambda = 5 * ki + (2 * ki - kj) * (ki * ki - 1);
        Ok((
            that4.checked_mul(ti)?,
            combo(
                g,
                &[
                    (lambda, &p.h),
                    (4 * n * n + 2 * n - 3, ti),
                    (2 * n, tj),
                    (-4 * n, &that2.checked_mul(ti)?),
                    (-1, &that2.checked_mul(tj)?),
                    (-1, &ti.checked_pow(5)?),
                ],
            )?,
        ))
    };
    [
        ring_equality("quintic_t0", g, side(&p.t0, &p.t1, p.k0, p.k1)),
        ring_equality("quintic_t1", g, side(&p.t1, &p.t0, p.k1, p.k0)),
    ]
    .into_iter()
    .collect()
}

pub fn quintic_identities(c: &Certificate) -> DiagnosticsReport {
    if verified(c) {
        evaluate_quintic_identities(c)
    } else {
        ["quintic_t0", "quintic_t1"].map(CheckEntry::not_applicable).into_iter().collect()
    }
}

pub(super) const REPETITION_CHECK_IDS: [&str; 3] = [
    "repetition_max_multiplicity",
    "repetition_identity_once",
    "repetition_duplicate_counts",
];

/// Multiplicities in the cube maps `T0^(3)`, `T1^(3)` when `n = 1 (mod 3)`,
/// where 3 divides `|H|` and cubing need not be injective.
pub fn repetition_bounds(c: &Certificate) -> DiagnosticsReport {
    if c.n() % 3 != 1 {
        return REPETITION_CHECK_IDS.map(CheckEntry::not_applicable).into_iter().collect();
    }
    let p = Parts::new(c);
    let g = &p.group;
    let cubes = [p.t0.power_map(3), p.t1.power_map(3)];
    let mut report = DiagnosticsReport::new();

    let worst = cubes
        .iter()
        .enumerate()
        .flat_map(|(j, a)| a.nonzero().map(move |(r, m)| (m, j, r)))
        .max_by_key(|&(m, j, r)| (m, std::cmp::Reverse((j, r))));
    report.push(match worst {
        Some((m, j, r)) if m > 2 => CheckEntry::fail(
            REPETITION_CHECK_IDS[0],
            format!("{} appears {m} times in T{j}^(3)", g.element_at(r)),
        ),
        _ => CheckEntry::pass(REPETITION_CHECK_IDS[0]),
    });

    let e_count = cubes[0].coefficient(0);
    report.push(CheckEntry::from_bool(REPETITION_CHECK_IDS[1], e_count == 1, || {
        format!("e appears {e_count} times in T0^(3)")
    }));

    let repeated = |a: &GroupRingElement| a.coefficients().iter().filter(|&&m| m >= 2).count();
    let (d0, d1) = (repeated(&cubes[0]), repeated(&cubes[1]));
    report.push(CheckEntry::from_bool(
        REPETITION_CHECK_IDS[2],
        (d0 == 0 || d0 == 2) && d1 <= 2,
        || format!("{d0} repeated elements in T0^(3), {d1} in T1^(3)"),
    ));
    report
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::CheckStatus;
    use super::*;

    fn cert(text: &str) -> Certificate {
        text.parse().unwrap()
    }

    #[test]
    fn verify_examples() {
        for c in [example_n1(), example_n2()] {
            let r = verify_certificate(&c);
            assert!(r.passed(), "{r}");
            assert_eq!(r.status("product_equation"), Some(CheckStatus::Pass));
            assert_eq!(r.status("square_equation"), Some(CheckStatus::Pass));
        }
    }

    #[test]
    fn wrong_t1_fails_product_equation() {
        let c = cert("group: 7\nn: 2\nT0: 0;1;6\nT1: 3;4\n");
        let r = verify_certificate(&c);
        assert_eq!(r.status("product_equation"), Some(CheckStatus::Fail));
        let w = r.entry("product_equation").unwrap().witness.clone().unwrap();
        assert!(w.starts_with("coefficient of "), "{w}");
    }

    #[test]
    fn structural_failures_skip_equations() {
        let cases = [
            ("group: 7\nn: 3\nT0: 0;1;6\nT1: 2;5\n", "group_order"),
            ("group: 7\nn: 2\nT0: 1;6\nT1: 2;5\n", "identity_in_t0"),
            ("group: 7\nn: 2\nT0: 0;1\nT1: 2;5\n", "t0_inverse_closed"),
            ("group: 7\nn: 2\nT0: 0;1;6\nT1: 2\n", "t1_inverse_closed"),
        ];
        for (text, failing) in cases {
            let r = verify_certificate(&cert(text));
            assert_eq!(r.status(failing), Some(CheckStatus::Fail), "{text}");
            assert_eq!(r.status("product_equation"), Some(CheckStatus::NotApplicable));
            assert_eq!(r.status("square_equation"), Some(CheckStatus::NotApplicable));
            assert!(!r.passed());
        }
    }

    #[test]
    fn necessary_conditions_on_examples() {
        let r = necessary_conditions(&example_n2());
        assert!(r.passed(), "{r}");
        assert_eq!(r.status("nc_sizes_even"), Some(CheckStatus::Pass));
        assert_eq!(r.status("nc_sizes_odd"), Some(CheckStatus::NotApplicable));
        let r = necessary_conditions(&example_n1());
        assert!(r.passed(), "{r}");
        assert_eq!(r.status("nc_sizes_odd"), Some(CheckStatus::Pass));
        assert_eq!(r.entries().len(), 8);
    }

    #[test]
    fn swapped_roles_fail_identity_placement() {
        let c = cert("group: 7\nn: 2\nT0: 2;5\nT1: 0;1;6\n");
        let r = necessary_conditions(&c);
        assert_eq!(r.status("nc_identity_placement"), Some(CheckStatus::Fail));
        assert_eq!(r.status("nc_sizes_even"), Some(CheckStatus::Fail));
    }

    #[test]
    fn cubic_and_quintic_hold_on_examples() {
        for c in [example_n1(), example_n2()] {
            assert!(cubic_identities(&c).entries().iter().all(|e| e.status == CheckStatus::Pass));
            assert!(quintic_identities(&c).entries().iter().all(|e| e.status == CheckStatus::Pass));
        }
    }

    #[test]
    fn identities_are_gated_and_fail_off_certificates() {
        let c = cert("group: 7\nn: 2\nT0: 0;1;6\nT1: 3;4\n");
        for r in [cubic_identities(&c), quintic_identities(&c)] {
            assert!(r.entries().iter().all(|e| e.status == CheckStatus::NotApplicable));
        }
        assert!(!evaluate_quintic_identities(&c).passed());
        assert!(!evaluate_cubic_identities(&c).passed());
    }

    #[test]
    fn repetition_examples() {
        let r = repetition_bounds(&example_n2());
        assert!(r.entries().iter().all(|e| e.status == CheckStatus::NotApplicable));
        let r = repetition_bounds(&example_n1());
        assert!(r.entries().iter().all(|e| e.status == CheckStatus::Pass), "{r}");
        // in C21 the cube map is x -> 3x, with fibres of size 3
        let c = cert("group: 21\nn: 4\nT0: 0\nT1: 1;6;8;13;15;20\n");
        let r = repetition_bounds(&c);
        assert_eq!(r.status("repetition_max_multiplicity"), Some(CheckStatus::Fail));
        let w = r.entry("repetition_max_multiplicity").unwrap().witness.clone().unwrap();
        assert_eq!(w, "3 appears 3 times in T1^(3)");
    }
}
