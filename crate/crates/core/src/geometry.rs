//! Lee-metric geometry of `Z^n`: sphere sizes, sphere enumeration, and the
//! classification of lattice packings as perfect or almost perfect.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Default cap on the number of points enumerated by [`sphere_points`] and
/// the minimum-distance search.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Default cap on `|Z^n / L|` for covering-radius computation.
pub const DEFAULT_COSET_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("basis is not square: expected {expected} entries in row {row}, found {found}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("basis is singular")]
    Singular,
    #[error("enumeration budget exceeded ({needed} > {budget})")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("integer overflow during lattice reduction")]
    Overflow,
    #[error("lattice file line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn lee_distance(x: &[i64], y: &[i64]) -> Result<u64, GeometryError> {
    if x.len() != y.len() {
        return Err(GeometryError::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (*a as i128 - *b as i128).unsigned_abs() as u64)
        .sum())
}

pub fn lee_weight(x: &[i64]) -> u64 {
    x.iter().map(|a| a.unsigned_abs()).sum()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// `|S(n, r)| = sum_{i=0}^{min(n,r)} 2^i C(n,i) C(r,i)`.
///
/// # Panics
/// If the size does not fit in a `u64`.
pub fn sphere_size(n: u64, r: u64) -> u64 {
    (0..=n.min(r))
        .map(|i| {
            1u64.checked_shl(i as u32)
                .and_then(|p| p.checked_mul(binomial(n, i)))
                .and_then(|p| p.checked_mul(binomial(r, i)))
                .expect("sphere size overflows u64")
        })
        .try_fold(0u64, |acc, t| acc.checked_add(t))
        .expect("sphere size overflows u64")
}

/// All points of `Z^n` with Lee weight at most `r`, lexicographically sorted.
pub fn sphere_points(n: usize, r: u64, budget: u64) -> Result<Vec<Vec<i64>>, GeometryError> {
    let needed = sphere_size(n as u64, r);
    if needed > budget {
        return Err(GeometryError::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::with_capacity(needed as usize);
    let mut point = vec![0i64; n];
    fn rec(i: usize, rest: i64, point: &mut [i64], out: &mut Vec<Vec<i64>>) {
        if i == point.len() {
            out.push(point.to_vec());
            return;
        }
        for v in -rest..=rest {
            point[i] = v;
            rec(i + 1, rest - v.abs(), point, out);
        }
        point[i] = 0;
    }
    rec(0, r as i64, &mut point, &mut out);
    Ok(out)
}

/// Calls `visit` on every point of Lee weight exactly `w`; stops early when
/// `visit` returns `true`. Returns whether it stopped early.
fn for_each_shell_point(n: usize, w: u64, mut visit: impl FnMut(&[i64]) -> bool) -> bool {
    fn rec(
        i: usize,
        rest: i64,
        point: &mut [i64],
        visit: &mut dyn FnMut(&[i64]) -> bool,
    ) -> bool {
        let n = point.len();
        if i + 1 == n {
            for v in [-rest, rest] {
                point[i] = v;
                if visit(point) {
                    return true;
                }
                if rest == 0 {
                    break;
                }
            }
            return false;
        }
        for v in -rest..=rest {
            point[i] = v;
            if rec(i + 1, rest - v.abs(), point, visit) {
                return true;
            }
        }
        point[i] = 0;
        false
    }
    let mut point = vec![0i64; n];
    rec(0, w as i64, &mut point, &mut visit)
}

/// Integer basis of a full-rank sublattice of `Z^n`, rows as generators.
///
/// Stores the row-style Hermite normal form alongside the input rows: an
/// upper-triangular basis with positive diagonal `d_j`, so that every coset
/// of `Z^n / L` has exactly one representative with `0 <= x_j < d_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    rows: Vec<Vec<i64>>,
    hnf: Vec<Vec<i128>>,
}

impl LatticeBasis {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, GeometryError> {
        let n = rows.len();
        if n == 0 {
            return Err(GeometryError::Singular);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GeometryError::NotSquare {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let hnf = hermite_form(&rows)?;
        Ok(Self { rows, hnf })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::new(rows).expect("identity is nonsingular")
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    fn diagonal(&self) -> impl Iterator<Item = i128> + '_ {
        self.hnf.iter().enumerate().map(|(j, row)| row[j])
    }

    /// Reduces `x` in place to its canonical coset representative.
    fn reduce(&self, x: &mut [i128]) {
        for (j, row) in self.hnf.iter().enumerate() {
            let q = x[j].div_euclid(row[j]);
            if q != 0 {
                for (xk, rk) in x[j..].iter_mut().zip(&row[j..]) {
                    *xk -= q * rk;
                }
            }
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let mut v: Vec<i128> = x.iter().map(|&a| a as i128).collect();
        self.reduce(&mut v);
        v.iter().all(|&a| a == 0)
    }

    fn coset_id(&self, rep: &[i128]) -> usize {
        rep.iter()
            .zip(self.diagonal())
            .fold(0usize, |acc, (&x, d)| acc * d as usize + x as usize)
    }
}

impl FromStr for LatticeBasis {
    type Err = GeometryError;

    /// First non-empty line `n`, then `n` lines of `n` integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, head) = lines.next().ok_or(GeometryError::Parse {
            line: 1,
            message: "missing dimension line".into(),
        })?;
        let n: usize = head.parse().map_err(|_| GeometryError::Parse {
            line,
            message: format!("expected dimension, found `{head}`"),
        })?;
        if n == 0 {
            return Err(GeometryError::Parse {
                line,
                message: "dimension must be positive".into(),
            });
        }
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, text) = lines.next().ok_or(GeometryError::Parse {
                line: line + rows.len() + 1,
                message: format!("expected {n} basis rows, found {}", rows.len()),
            })?;
            let row = text
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>().map_err(|_| GeometryError::Parse {
                        line,
                        message: format!("not an integer: `{t}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != n {
                return Err(GeometryError::Parse {
                    line,
                    message: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(GeometryError::Parse {
                line,
                message: "trailing content after basis rows".into(),
            });
        }
        LatticeBasis::new(rows)
    }
}

fn hermite_form(rows: &[Vec<i64>]) -> Result<Vec<Vec<i128>>, GeometryError> {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&a| a as i128).collect())
        .collect();
    let sub_mul = |target: &mut Vec<i128>, src: &[i128], q: i128| -> Result<(), GeometryError> {
        for (t, s) in target.iter_mut().zip(src) {
            *t = s
                .checked_mul(q)
                .and_then(|p| t.checked_sub(p))
                .ok_or(GeometryError::Overflow)?;
        }
        Ok(())
    };
    for j in 0..n {
        // Euclid on column j over rows j..n
        loop {
            let pivot = (j..n)
                .filter(|&i| m[i][j] != 0)
                .min_by_key(|&i| m[i][j].unsigned_abs());
            let Some(p) = pivot else {
                return Err(GeometryError::Singular);
            };
            m.swap(j, p);
            let mut done = true;
            for i in j + 1..n {
                if m[i][j] != 0 {
                    let q = m[i][j].div_euclid(m[j][j]);
                    let pivot_row = m[j].clone();
                    sub_mul(&mut m[i], &pivot_row, q)?;
                    if m[i][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[j][j] < 0 {
            for a in m[j].iter_mut() {
                *a = -*a;
            }
        }
        let pivot_row = m[j].clone();
        for i in 0..j {
            let q = m[i][j].div_euclid(pivot_row[j]);
            if q != 0 {
                sub_mul(&mut m[i], &pivot_row, q)?;
            }
        }
    }
    Ok(m)
}

/// `|Z^n / L| = |det B|`.
pub fn lattice_index(basis: &LatticeBasis) -> Result<u64, GeometryError> {
    basis
        .diagonal()
        .try_fold(1i128, |acc, d| acc.checked_mul(d))
        .and_then(|v| u64::try_from(v).ok())
        .ok_or(GeometryError::Overflow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Perfect(u64),
    AlmostPerfect(u64),
    Other,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Perfect(r) => write!(f, "perfect({r})"),
            Classification::AlmostPerfect(r) => write!(f, "almost_perfect({r})"),
            Classification::Other => write!(f, "other"),
        }
    }
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn serialize_ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingReport {
    pub dimension: usize,
    pub index: u64,
    pub min_lee_distance: u64,
    pub packing_radius: u64,
    pub covering_radius: u64,
    /// `|S(n, packing_radius)| / index` in lowest terms.
    #[serde(serialize_with = "serialize_ratio")]
    pub density: Ratio<u64>,
    pub classification: Classification,
}

#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    pub enumeration: u64,
    pub cosets: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            enumeration: DEFAULT_ENUMERATION_BUDGET,
            cosets: DEFAULT_COSET_BUDGET,
        }
    }
}

/// Minimum Lee weight of a nonzero lattice vector, scanning shells of growing
/// weight. Terminates by `index`, since `index * e_1` lies in the lattice.
pub fn min_lee_distance(basis: &LatticeBasis, budget: u64) -> Result<u64, GeometryError> {
    let n = basis.dimension();
    let mut scanned = 0u64;
    let mut w = 1u64;
    loop {
        let mut over_budget = false;
        let found = for_each_shell_point(n, w, |p| {
            scanned += 1;
            if scanned > budget {
                over_budget = true;
                return true;
            }
            basis.contains(p)
        });
        if over_budget {
            return Err(GeometryError::BudgetExceeded {
                needed: scanned,
                budget,
            });
        }
        if found {
            return Ok(w);
        }
        w += 1;
    }
}

/// Largest Lee distance from a point of `Z^n` to the lattice, by breadth-first
/// search over the cosets of `Z^n / L` with steps `+-e_i`.
pub fn covering_radius(basis: &LatticeBasis, budget: u64) -> Result<u64, GeometryError> {
    let index = lattice_index(basis)?;
    if index > budget {
        return Err(GeometryError::BudgetExceeded {
            needed: index,
            budget,
        });
    }
    let n = basis.dimension();
    let mut dist = vec![u64::MAX; index as usize];
    let mut queue = VecDeque::new();
    dist[0] = 0;
    queue.push_back(vec![0i128; n]);
    let mut radius = 0;
    while let Some(rep) = queue.pop_front() {
        let d = dist[basis.coset_id(&rep)];
        radius = radius.max(d);
        for i in 0..n {
            for step in [1i128, -1] {
                let mut next = rep.clone();
                next[i] += step;
                basis.reduce(&mut next);
                let id = basis.coset_id(&next);
                if dist[id] == u64::MAX {
                    dist[id] = d + 1;
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(radius)
}

pub fn classify_packing(basis: &LatticeBasis, r: u64) -> Result<PackingReport, GeometryError> {
    classify_packing_with(basis, r, Budgets::default())
}

pub fn classify_packing_with(
    basis: &LatticeBasis,
    r: u64,
    budgets: Budgets,
) -> Result<PackingReport, GeometryError> {
    let n = basis.dimension();
    let index = lattice_index(basis)?;
    let covering = covering_radius(basis, budgets.cosets)?;
    let min_distance = min_lee_distance(basis, budgets.enumeration)?;
    let packing = (min_distance - 1) / 2;
    let density = Ratio::new(sphere_size(n as u64, packing), index);
    let sphere = sphere_size(n as u64, r);
    let classification = if index == sphere && packing == r && covering == r {
        Classification::Perfect(r)
    } else if index == sphere + 1 && packing == r && covering == r + 1 {
        Classification::AlmostPerfect(r)
    } else {
        Classification::Other
    };
    Ok(PackingReport {
        dimension: n,
        index,
        min_lee_distance: min_distance,
        packing_radius: packing,
        covering_radius: covering,
        density,
        classification,
    })
}
