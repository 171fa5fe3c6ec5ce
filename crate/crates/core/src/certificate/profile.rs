//! Multiplicity profiles of `T^(2) T_j` and `T^(4) T_j` and the counting,
//! residue-class and intersection inequalities stated in terms of them.
//!
//! Throughout, `X_i` / `Y_i` / `U_i` / `V_i` is the set of elements appearing
//! exactly `i` times in `T^(2) T0` / `T^(2) T1` / `T^(4) T0` / `T^(4) T1`,
//! where `T = T0 + T1`.

use num_rational::Ratio;
use serde::Serialize;

use crate::geometry::serialize_ratio;

use super::checks::{indicator, support, Parts};
use super::report::{CheckEntry, DiagnosticsReport};
use super::{verify_certificate, Certificate, CertificateError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionProfile {
    pub n: u64,
    pub k0: u64,
    pub k1: u64,
    /// Entry `i` is `|X_i|`; truncated after the last nonempty class.
    pub x_counts: Vec<u64>,
    pub y_counts: Vec<u64>,
    pub u_counts: Vec<u64>,
    pub v_counts: Vec<u64>,
    /// `|(T0^2 \ T0^(2)) cap T^(4)|`, on supports.
    pub theta0: u64,
    /// `|T1 cap T^(2)|/2 + |(T1^2 \ (T1^(2) u {e})) cap T^(4)|`, integral by
    /// construction (a half-integer is rejected).
    #[serde(serialize_with = "serialize_ratio")]
    pub theta1: Ratio<u64>,
    /// `|T1 cap T0^(3)|`
    pub ell0: u64,
    pub u: u64,
    /// `|T1^(3) cap T0|`
    pub u0: u64,
    /// `|T1^(3) cap T1|`
    pub u1: u64,
    /// Whether the repeated-cube sets were computed (`n = 1 mod 3`).
    pub delta_applicable: bool,
    /// Elements appearing at least twice in `T0^(3)`.
    pub delta0_size: u64,
    /// `|Delta0 cap T1|`
    pub delta0_in_t1: u64,
    pub delta1_size: u64,
    /// `|Delta1 cap T0|`, `|Delta1 cap T1|`, and the remainder.
    pub delta1_split: [u64; 3],
    /// `|X_1 cap Y_1|`
    pub sigma: u64,
    /// `|X_3 cap Y_3|`
    pub epsilon: u64,
    pub x1_y4: u64,
    pub y1_x4: u64,
    pub x4_y4: u64,
    /// `2(k1-1)k1` minus the pairwise overlaps `|b_i T1 cap b_j T1|` over the
    /// elements `b_i` of `T^(4)`.
    pub eta: i64,
}

fn histogram(coeffs: &[i64]) -> Vec<u64> {
    let max = coeffs.iter().copied().max().unwrap_or(0).max(0) as usize;
    let mut out = vec![0u64; max + 1];
    for &c in coeffs {
        // products of 0/1 elements are never negative
        out[c as usize] += 1;
    }
    out
}

fn count(len: usize, pred: impl Fn(usize) -> bool) -> u64 {
    (0..len).filter(|&r| pred(r)).count() as u64
}

/// Builds the profile by explicit convolution and histogramming.
pub fn partition_profile(c: &Certificate) -> Result<PartitionProfile, CertificateError> {
    if !verify_certificate(c).passed() {
        return Err(CertificateError::NotVerified);
    }
    let p = Parts::new(c);
    let g = &*p.group;
    let len = g.len();
    let that2 = p.that.power_map(2);
    let that4 = p.that.power_map(4);
    let x = that2.checked_mul(&p.t0)?;
    let y = that2.checked_mul(&p.t1)?;
    let u_el = that4.checked_mul(&p.t0)?;
    let v_el = that4.checked_mul(&p.t1)?;

    let in_t0 = indicator(len, c.t0_ranks());
    let in_t1 = indicator(len, c.t1_ranks());
    let s_that2 = support(&that2);
    let s_that4 = support(&that4);
    let t0_sq = support(&p.t0.checked_mul(&p.t0)?);
    let t1_sq = support(&p.t1.checked_mul(&p.t1)?);
    let t0_p2 = support(&p.t0.power_map(2));
    let t1_p2 = support(&p.t1.power_map(2));

    let theta0 = count(len, |r| t0_sq[r] && !t0_p2[r] && s_that4[r]);
    let half = count(len, |r| in_t1[r] && s_that2[r]);
    if half % 2 == 1 {
        return Err(CertificateError::NonIntegralTheta1(half));
    }
    let theta1 = Ratio::new(half, 2) + count(len, |r| r != 0 && t1_sq[r] && !t1_p2[r] && s_that4[r]);

    let t0_cube = p.t0.power_map(3);
    let t1_cube = p.t1.power_map(3);
    let ell0 = count(len, |r| in_t1[r] && t0_cube.coefficient(r) > 0);
    let u0 = count(len, |r| in_t0[r] && t1_cube.coefficient(r) > 0);
    let u1 = count(len, |r| in_t1[r] && t1_cube.coefficient(r) > 0);

    let delta_applicable = c.n() % 3 == 1;
    let (mut delta0_size, mut delta0_in_t1, mut delta1_size, mut delta1_split) = (0, 0, 0, [0; 3]);
    if delta_applicable {
        let d0 = |r: usize| t0_cube.coefficient(r) >= 2;
        let d1 = |r: usize| t1_cube.coefficient(r) >= 2;
        delta0_size = count(len, d0);
        delta0_in_t1 = count(len, |r| d0(r) && in_t1[r]);
        delta1_size = count(len, d1);
        delta1_split = [
            count(len, |r| d1(r) && in_t0[r]),
            count(len, |r| d1(r) && in_t1[r]),
            count(len, |r| d1(r) && !in_t0[r] && !in_t1[r]),
        ];
    }

    let xs = x.coefficients();
    let ys = y.coefficients();
    let both = |i: i64, j: i64| count(len, |r| xs[r] == i && ys[r] == j);

    let b: Vec<usize> = c
        .t0_ranks()
        .iter()
        .chain(c.t1_ranks())
        .map(|&r| g.pow_rank(r, 4))
        .collect();
    let overlaps = p.t1.checked_mul(&p.t1.power_map(-1))?;
    let mut pair_sum = 0i64;
    for (i, &bi) in b.iter().enumerate() {
        for &bj in &b[i + 1..] {
            pair_sum += overlaps.coefficient(g.sub_ranks(bi, bj));
        }
    }
    let k1 = c.k1() as i64;

    Ok(PartitionProfile {
        n: c.n(),
        k0: c.k0(),
        k1: c.k1(),
        x_counts: histogram(xs),
        y_counts: histogram(ys),
        u_counts: histogram(u_el.coefficients()),
        v_counts: histogram(v_el.coefficients()),
        theta0,
        theta1,
        ell0,
        u: u0 + u1,
        u0,
        u1,
        delta_applicable,
        delta0_size,
        delta0_in_t1,
        delta1_size,
        delta1_split,
        sigma: both(1, 1),
        epsilon: both(3, 3),
        x1_y4: both(1, 4),
        y1_x4: both(4, 1),
        x4_y4: both(4, 4),
        eta: 2 * (k1 - 1) * k1 - pair_sum,
    })
}

fn at(v: &[u64], i: usize) -> i64 {
    v.get(i).copied().unwrap_or(0) as i64
}

fn total(v: &[u64]) -> i64 {
    v.iter().sum::<u64>() as i64
}

fn weighted(v: &[u64]) -> i64 {
    v.iter().enumerate().map(|(i, &c)| i as i64 * c as i64).sum()
}

fn sum_from(v: &[u64], start: usize) -> i64 {
    v.iter().skip(start).sum::<u64>() as i64
}

/// `sum_{s>=3} (s-1)(s-2)/2 |Z_s|`
fn triangular_tail(v: &[u64]) -> i64 {
    v.iter()
        .enumerate()
        .skip(3)
        .map(|(s, &c)| ((s - 1) * (s - 2) / 2) as i64 * c as i64)
        .sum()
}

/// Weights `s_i` for `i >= 5`.
fn tail_weight(i: usize) -> i64 {
    let i = i as i64;
    if i % 3 == 1 {
        (i - 1) * (i - 4) / 2
    } else {
        (i - 2) * (i - 3) / 2
    }
}

fn weighted_tail(v: &[u64]) -> i64 {
    v.iter()
        .enumerate()
        .skip(5)
        .map(|(i, &c)| tail_weight(i) * c as i64)
        .sum()
}

fn equality(check: &'static str, what: &str, lhs: i64, rhs: i64) -> CheckEntry {
    CheckEntry::from_bool(check, lhs == rhs, || format!("{what}: {lhs} != {rhs}"))
}

/// `3 * value <= num`
fn at_most_third(check: &'static str, what: &str, value: i64, num: i64) -> CheckEntry {
    CheckEntry::from_bool(check, 3 * value <= num, || format!("{what} = {value} > {num}/3"))
}

/// `lo <= 3 * value <= hi`
fn within_thirds(check: &'static str, what: &str, lo: i64, value: i64, hi: i64) -> CheckEntry {
    CheckEntry::from_bool(check, lo <= 3 * value && 3 * value <= hi, || {
        format!("{what} = {value} outside [{lo}/3, {hi}/3]")
    })
}

fn within(check: &'static str, what: &str, lo: i64, value: i64, hi: i64) -> CheckEntry {
    CheckEntry::from_bool(check, lo <= value && value <= hi, || {
        format!("{what} = {value} outside [{lo}, {hi}]")
    })
}

const COUNTING_CHECK_IDS: [&str; 13] = [
    "count_weighted_x",
    "count_weighted_y",
    "count_total_x",
    "count_total_y",
    "count_distinct_x",
    "count_distinct_y",
    "count_total_u",
    "count_total_v",
    "count_weighted_u",
    "count_weighted_v",
    "count_distinct_v",
    "count_eta_nonnegative",
    "count_v_inequality",
];

const CLASS1_CHECK_IDS: [&str; 10] = [
    "class1_x0",
    "class1_x1",
    "class1_x2",
    "class1_x3",
    "class1_x_tail",
    "class1_cube_avoids_t1",
    "class1_theta0_zero",
    "class1_delta0_in_t1",
    "class1_y3_bounds",
    "class1_y0_bounds",
];

const CLASS5_CHECK_IDS: [&str; 8] = [
    "class5_x0",
    "class5_x_weighted_tail",
    "class5_x1",
    "class5_x4",
    "class5_y0",
    "class5_y_weighted_tail",
    "class5_y1",
    "class5_y4",
];

const CLASS2_CHECK_IDS: [&str; 8] = [
    "class2_x0",
    "class2_x_weighted_tail",
    "class2_y0",
    "class2_y_weighted_tail",
    "class2_x4",
    "class2_x1",
    "class2_y4",
    "class2_y1",
];

const INTERSECTION_CHECK_IDS: [&str; 7] = [
    "sandwich_x1_y4",
    "sandwich_y1_x4",
    "sandwich_x4_y4",
    "tail_x",
    "tail_y",
    "tail_y_from2",
    "tail_x_from2",
];

/// Every check that needs a profile, in report order.
pub(super) const PROFILE_CHECK_IDS: [&str; 46] = {
    let mut out = [""; 46];
    let groups: [&[&str]; 5] = [
        &COUNTING_CHECK_IDS,
        &CLASS1_CHECK_IDS,
        &CLASS5_CHECK_IDS,
        &CLASS2_CHECK_IDS,
        &INTERSECTION_CHECK_IDS,
    ];
    let mut k = 0;
    let mut gi = 0;
    while gi < groups.len() {
        let mut j = 0;
        while j < groups[gi].len() {
            out[k] = groups[gi][j];
            k += 1;
            j += 1;
        }
        gi += 1;
    }
    out
};

pub fn counting_identities(p: &PartitionProfile, c: &Certificate) -> DiagnosticsReport {
    let n = c.n() as i64;
    let (k0, k1) = (c.k0() as i64, c.k1() as i64);
    let order = n * n + n + 1;
    let theta1 = p.theta1.to_integer() as i64;
    let [wx, wy, tx, ty, dx, dy, tu, tv, wu, wv, dv, eta, vin] = COUNTING_CHECK_IDS;
    let mut r = DiagnosticsReport::new();
    r.push(equality(wx, "sum i|X_i| vs (2n+1)k0", weighted(&p.x_counts), (2 * n + 1) * k0));
    r.push(equality(wy, "sum i|Y_i| vs (2n+1)k1", weighted(&p.y_counts), (2 * n + 1) * k1));
    r.push(equality(tx, "sum |X_i| vs |H|", total(&p.x_counts), order));
    r.push(equality(ty, "sum |Y_i| vs |H|", total(&p.y_counts), order));
    r.push(equality(
        dx,
        "sum_{i>=1} |X_i|",
        sum_from(&p.x_counts, 1),
        (2 * n + 1) * k0 - 2 * (k0 - 1) * k0 + p.theta0 as i64 + triangular_tail(&p.x_counts),
    ));
    r.push(equality(
        dy,
        "sum_{i>=1} |Y_i|",
        sum_from(&p.y_counts, 1),
        (2 * n + 1) * k1 - 2 * (k1 - 1) * k1 + theta1 + triangular_tail(&p.y_counts),
    ));
    r.push(equality(tu, "sum |U_i| vs |H|", total(&p.u_counts), order));
    r.push(equality(tv, "sum |V_i| vs |H|", total(&p.v_counts), order));
    r.push(equality(wu, "sum i|U_i| vs (2n+1)k0", weighted(&p.u_counts), (2 * n + 1) * k0));
    r.push(equality(wv, "sum i|V_i| vs (2n+1)k1", weighted(&p.v_counts), (2 * n + 1) * k1));
    r.push(equality(
        dv,
        "sum_{i>=1} |V_i|",
        sum_from(&p.v_counts, 1),
        (2 * n + 1) * k1 - 2 * (k1 - 1) * k1 + p.eta + triangular_tail(&p.v_counts),
    ));
    r.push(CheckEntry::from_bool(eta, p.eta >= 0, || format!("eta = {}", p.eta)));
    r.push(if n % 2 == 1 {
        let v = &p.v_counts;
        let lhs = 2 * at(v, 1) + 3 * at(v, 2) + 3 * at(v, 3) + 2 * at(v, 4);
        let rhs = 2 * n * n + 4 * n + 2;
        CheckEntry::from_bool(vin, lhs >= rhs, || format!("2|V1|+3|V2|+3|V3|+2|V4| = {lhs} < {rhs}"))
    } else {
        CheckEntry::not_applicable(vin)
    });
    r
}

/// Exact values and bounds on the class sizes, by `n mod 6`.
pub fn residue_class_checks(p: &PartitionProfile, c: &Certificate) -> DiagnosticsReport {
    let n = c.n() as i64;
    let mut r = DiagnosticsReport::new();
    let residue = n % 6;
    let na = |ids: &[&'static str], r: &mut DiagnosticsReport| {
        for id in ids {
            r.push(CheckEntry::not_applicable(id));
        }
    };
    let x = |i| at(&p.x_counts, i);
    let y = |i| at(&p.y_counts, i);
    let ell0 = p.ell0 as i64;
    let theta0 = p.theta0 as i64;
    let theta1 = p.theta1.to_integer() as i64;
    let u = p.u as i64;

    if residue == 1 {
        let [x0, x1, x2, x3, xt, cube, th0, d0, y3, y0] = CLASS1_CHECK_IDS;
        let sq = (n - 1) * (n - 1);
        r.push(equality(x0, "3|X_0| vs (n-1)^2", 3 * x(0), sq));
        r.push(equality(x1, "|X_1| vs n+2", x(1), n + 2));
        r.push(equality(x2, "|X_2| vs 2n-2", x(2), 2 * n - 2));
        r.push(equality(x3, "3|X_3| vs 2(n-1)^2", 3 * x(3), 2 * sq));
        r.push(equality(xt, "sum_{i>3} |X_i|", sum_from(&p.x_counts, 4), 0));
        r.push(equality(cube, "|T1 cap T0^(3)|", ell0, 0));
        r.push(equality(th0, "theta0", theta0, 0));
        r.push(equality(d0, "|Delta0 \\ T1|", (p.delta0_size - p.delta0_in_t1) as i64, 0));
        let (u0, u1) = (p.u0 as i64, p.u1 as i64);
        let [_, d11, d12] = p.delta1_split.map(|v| v as i64);
        r.push(
            within_thirds(
                y3,
                "|Y_3|",
                2 * n * n - 5 * n - 4 + theta1 + 3 * (2 * u0 + u1 + 2 * d11 + d12),
                y(3),
                2 * n * n - 2 * n - 3 + 3 * (u0 + u1 + d11 + d12),
            )
            .advisory(),
        );
        r.push(
            within_thirds(
                y0,
                "|Y_0|",
                n * n - 10 * n - 3 + 3 * (theta1 - u0 - u1 - d11 - d12),
                y(0),
                n * n - n + 1 - theta1,
            )
            .advisory(),
        );
    } else {
        na(&CLASS1_CHECK_IDS, &mut r);
    }

    if residue == 5 {
        let [x0, xt, x1, x4, y0, yt, y1, y4] = CLASS5_CHECK_IDS;
        let xnum = n - 2 * ell0 + 1 - theta0;
        let ynum = n - 2 * u + 2 - theta1;
        r.push(at_most_third(x0, "|X_0|", x(0), xnum));
        r.push(CheckEntry::from_bool(xt, weighted_tail(&p.x_counts) <= xnum, || {
            format!("sum s_i|X_i| = {} > {xnum}", weighted_tail(&p.x_counts))
        }));
        r.push(within_thirds(
            x1,
            "|X_1|",
            2 * n * n - 4 * n + 7 * ell0 + 3 + 2 * theta0,
            x(1),
            2 * n * n - ell0 + 7 - 2 * theta0,
        ));
        r.push(within_thirds(
            x4,
            "|X_4|",
            n * n - 6 * n + 7 * ell0 - 1 + 2 * theta0,
            x(4),
            n * n - 3 * n + ell0 + 2 - theta0,
        ));
        r.push(at_most_third(y0, "|Y_0|", y(0), ynum));
        r.push(CheckEntry::from_bool(yt, weighted_tail(&p.y_counts) <= ynum, || {
            format!("sum s_i|Y_i| = {} > {ynum}", weighted_tail(&p.y_counts))
        }));
        r.push(within_thirds(
            y1,
            "|Y_1|",
            2 * n * n - 6 * n + 7 * u - 4 + 2 * theta1,
            y(1),
            2 * n * n - 2 * n - u + 4 - 2 * theta1,
        ));
        r.push(within_thirds(
            y4,
            "|Y_4|",
            n * n - 4 * n + 7 * u - 7 + 2 * theta1,
            y(4),
            n * n - n + u - 1 - theta1,
        ));
    } else {
        na(&CLASS5_CHECK_IDS, &mut r);
    }

    if residue == 2 {
        let [x0, xt, y0, yt, x4, x1, y4, y1] = CLASS2_CHECK_IDS;
        let xnum = n - 2 * ell0 - theta0;
        let ynum = n - 2 * u + 3 - theta1;
        r.push(at_most_third(x0, "|X_0|", x(0), xnum));
        r.push(CheckEntry::from_bool(xt, weighted_tail(&p.x_counts) <= xnum, || {
            format!("sum s_i|X_i| = {} > {xnum}", weighted_tail(&p.x_counts))
        }));
        r.push(at_most_third(y0, "|Y_0|", y(0), ynum));
        r.push(CheckEntry::from_bool(yt, weighted_tail(&p.y_counts) <= ynum, || {
            format!("sum s_i|Y_i| = {} > {ynum}", weighted_tail(&p.y_counts))
        }));
        r.push(within_thirds(
            x4,
            "|X_4|",
            n * n - 4 * n + 7 * ell0 + 2 * theta0,
            x(4),
            n * n - n + ell0 - theta0,
        ));
        r.push(within_thirds(
            x1,
            "|X_1|",
            2 * n * n - 6 * n + 7 * ell0 + 3 + 2 * theta0,
            x(1),
            2 * n * n - 2 * n - ell0 + 3 - 2 * theta0,
        ));
        r.push(within_thirds(
            y4,
            "|Y_4|",
            n * n - 6 * n + 7 * u - 8 + 2 * theta1,
            y(4),
            n * n - 3 * n + u + 1 - theta1,
        ));
        r.push(within_thirds(
            y1,
            "|Y_1|",
            2 * n * n - 4 * n + 7 * u - 4 + 2 * theta1,
            y(1),
            2 * n * n - u + 8 - 2 * theta1,
        ));
    } else {
        na(&CLASS2_CHECK_IDS, &mut r);
    }
    r
}

/// Sandwich bounds on `|X_1 cap Y_4|`, `|Y_1 cap X_4|`, `|X_4 cap Y_4|` for
/// every certificate, and the tail bounds for `n = 5 (mod 6)`.
pub fn intersection_bounds(p: &PartitionProfile, c: &Certificate) -> DiagnosticsReport {
    let n = c.n() as i64;
    let x = |i| at(&p.x_counts, i);
    let y = |i| at(&p.y_counts, i);
    let sigma = p.sigma as i64;
    let (x1y4, y1x4, x4y4) = (p.x1_y4 as i64, p.y1_x4 as i64, p.x4_y4 as i64);
    let y_rest = y(2) + y(3) + sum_from(&p.y_counts, 5);
    let x_rest = x(2) + x(3) + sum_from(&p.x_counts, 5);
    let [s1, s2, s3, tx, ty, ty2, tx2] = INTERSECTION_CHECK_IDS;
    let mut r = DiagnosticsReport::new();
    r.push(within(s1, "|X_1 cap Y_4|", x(1) - sigma - y_rest, x1y4, x(1) - sigma));
    r.push(within(s2, "|Y_1 cap X_4|", y(1) - sigma - x_rest, y1x4, y(1) - sigma));
    r.push(within(s3, "|X_4 cap Y_4|", x(4) - y1x4 - y_rest, x4y4, x(4) - y1x4));

    if n % 6 == 5 {
        let ell0 = p.ell0 as i64;
        let theta0 = p.theta0 as i64;
        let theta1 = p.theta1.to_integer() as i64;
        let u = p.u as i64;
        let from = |v: &[u64], start: usize| sum_from(v, start) - at(v, 4);
        let lower = |check, what: &str, value: i64, num: i64| {
            CheckEntry::from_bool(check, 3 * value >= num, || format!("{what} = {value} < {num}/3"))
        };
        r.push(lower(
            tx,
            "-sum_{i>=1,i!=4} |X_i|",
            -from(&p.x_counts, 1),
            -2 * n * n - 9 * n + 7 * ell0 - 4 + 2 * theta0,
        ));
        r.push(lower(
            ty,
            "-sum_{i>=1,i!=4} |Y_i|",
            -from(&p.y_counts, 1),
            -2 * n * n - 7 * n + 7 * u - 10 + 2 * theta1,
        ));
        r.push(lower(
            ty2,
            "-sum_{i>=2,i!=4} |Y_i|",
            -from(&p.y_counts, 2),
            -10 * n + 8 * u - 8 + theta1,
        ));
        r.push(lower(
            tx2,
            "-sum_{i>=2,i!=4} |X_i|",
            -from(&p.x_counts, 2),
            -10 * n + 8 * ell0 + 2 + theta0,
        ));
    } else {
        for id in [tx, ty, ty2, tx2] {
            r.push(CheckEntry::not_applicable(id));
        }
    }
    r
}
