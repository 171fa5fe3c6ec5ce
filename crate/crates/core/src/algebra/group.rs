use std::fmt;

use serde::Serialize;

use super::factor::{factor, partitions};
use super::AlgebraError;

/// A finite abelian group `C_{d1} x ... x C_{dk}` in invariant-factor form.
///
/// Elements are residue tuples written additively. Each element has a
/// mixed-radix rank in `0..order` (first component most significant), which
/// is the canonical element order used everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
    order: u64,
}

/// An element of a [`FiniteAbelianGroup`], as a residue tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FiniteAbelianGroup {
    /// Builds a group from invariant factors `d1 | d2 | ... | dk`, each `>= 2`.
    /// The empty list is the trivial group.
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self, AlgebraError> {
        if let Some(&d) = invariant_factors.iter().find(|&&d| d < 2) {
            return Err(AlgebraError::InvalidInvariantFactors(format!(
                "factor {d} is smaller than 2"
            )));
        }
        if let Some(w) = invariant_factors.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(AlgebraError::InvalidInvariantFactors(format!(
                "{} does not divide {}",
                w[0], w[1]
            )));
        }
        let order = invariant_factors
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .ok_or(AlgebraError::Overflow)?;
        Ok(Self {
            invariant_factors,
            order,
        })
    }

    pub fn cyclic(m: u64) -> Self {
        if m == 1 {
            Self::new(Vec::new()).unwrap()
        } else {
            Self::new(vec![m]).expect("cyclic group of order >= 2")
        }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Number of elements as a table length.
    pub fn len(&self) -> usize {
        self.order as usize
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.invariant_factors.len()],
        }
    }

    pub fn element(&self, residues: Vec<u64>) -> Result<GroupElement, AlgebraError> {
        let g = GroupElement { residues };
        self.check(&g)?;
        Ok(g)
    }

    /// Checks that `g` is a valid residue tuple for this group.
    pub fn check(&self, g: &GroupElement) -> Result<(), AlgebraError> {
        if g.residues.len() != self.invariant_factors.len()
            || g
                .residues
                .iter()
                .zip(&self.invariant_factors)
                .any(|(&x, &d)| x >= d)
        {
            return Err(AlgebraError::GroupMismatch(format!(
                "element ({g}) does not belong to {self}"
            )));
        }
        Ok(())
    }

    pub fn rank_of(&self, g: &GroupElement) -> usize {
        g.residues
            .iter()
            .zip(&self.invariant_factors)
            .fold(0u64, |acc, (&x, &d)| acc * d + x) as usize
    }

    pub fn element_at(&self, mut rank: usize) -> GroupElement {
        debug_assert!(rank < self.len());
        let mut residues = vec![0; self.invariant_factors.len()];
        for (slot, &d) in residues.iter_mut().zip(&self.invariant_factors).rev() {
            *slot = rank as u64 % d;
            rank /= d as usize;
        }
        GroupElement { residues }
    }

    /// All elements in rank order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.len()).map(|r| self.element_at(r))
    }

    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, AlgebraError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.element_at(self.add_ranks(self.rank_of(g), self.rank_of(h))))
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement, AlgebraError> {
        self.check(g)?;
        Ok(self.element_at(self.neg_rank(self.rank_of(g))))
    }

    /// `g^t`; negative `t` goes through the inverse.
    pub fn power(&self, g: &GroupElement, t: i64) -> Result<GroupElement, AlgebraError> {
        self.check(g)?;
        Ok(self.element_at(self.pow_rank(self.rank_of(g), t)))
    }

    /// Group operation on ranks.
    #[inline]
    pub fn add_ranks(&self, a: usize, b: usize) -> usize {
        if let [d] = self.invariant_factors[..] {
            let s = a + b;
            return if s >= d as usize { s - d as usize } else { s };
        }
        self.combine(a, b, |x, y, d| (x + y) % d)
    }

    #[inline]
    pub fn neg_rank(&self, a: usize) -> usize {
        if let [d] = self.invariant_factors[..] {
            return if a == 0 { 0 } else { d as usize - a };
        }
        self.combine(a, 0, |x, _, d| (d - x) % d)
    }

    /// `a - b` on ranks.
    #[inline]
    pub fn sub_ranks(&self, a: usize, b: usize) -> usize {
        self.add_ranks(a, self.neg_rank(b))
    }

    pub fn pow_rank(&self, a: usize, t: i64) -> usize {
        self.combine(a, 0, |x, _, d| {
            let t = (t as i128).rem_euclid(d as i128) as u128;
            ((x as u128 * t) % d as u128) as u64
        })
    }

    fn combine(&self, a: usize, b: usize, op: impl Fn(u64, u64, u64) -> u64) -> usize {
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for &d in self.invariant_factors.iter().rev() {
            out += op(a % d, b % d, d) * place;
            place *= d;
            a /= d;
            b /= d;
        }
        out as usize
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "C1");
        }
        for (i, d) in self.invariant_factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "C{d}")?;
        }
        Ok(())
    }
}

/// One representative per isomorphism class of abelian groups of order `m`,
/// in invariant-factor form.
///
/// Classes are built from one partition of each prime exponent; the i-th
/// largest invariant factor collects the i-th largest part of every prime.
pub fn enumerate_abelian_groups(m: u64) -> Vec<FiniteAbelianGroup> {
    assert!(m >= 1, "group order must be positive");
    let fac = factor(m);
    let choices: Vec<(u64, Vec<Vec<u32>>)> = fac
        .factors()
        .iter()
        .map(|&(p, e)| (p, partitions(e)))
        .collect();

    let mut out = Vec::new();
    let mut picked: Vec<usize> = vec![0; choices.len()];
    loop {
        let width = choices
            .iter()
            .zip(&picked)
            .map(|((_, parts), &i)| parts[i].len())
            .max()
            .unwrap_or(0);
        // largest factor first, then reverse into divisibility order
        let mut factors = vec![1u64; width];
        for ((p, parts), &i) in choices.iter().zip(&picked) {
            for (slot, &e) in factors.iter_mut().zip(&parts[i]) {
                *slot *= p.pow(e);
            }
        }
        factors.reverse();
        out.push(FiniteAbelianGroup::new(factors).expect("valid invariant factors"));

        // odometer over the partition choices, last prime fastest
        let mut k = choices.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            picked[k] += 1;
            if picked[k] < choices[k].1.len() {
                break;
            }
            picked[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::partition_count;

    #[test]
    fn invariant_factor_validation() {
        assert!(FiniteAbelianGroup::new(vec![2, 4]).is_ok());
        assert!(FiniteAbelianGroup::new(vec![4, 2]).is_err());
        assert!(FiniteAbelianGroup::new(vec![1]).is_err());
        let trivial = FiniteAbelianGroup::new(vec![]).unwrap();
        assert_eq!(trivial.order(), 1);
        assert_eq!(trivial.rank_of(&trivial.identity()), 0);
    }

    #[test]
    fn cyclic_seven_operations() {
        let g = FiniteAbelianGroup::cyclic(7);
        let e = |x| g.element(vec![x]).unwrap();
        assert_eq!(g.compose(&e(2), &e(5)).unwrap(), e(0));
        assert_eq!(g.inverse(&e(3)).unwrap(), e(4));
        assert_eq!(g.power(&e(2), 3).unwrap(), e(6));
        assert_eq!(g.power(&e(2), -1).unwrap(), e(5));
        assert_eq!(g.power(&e(3), 0).unwrap(), e(0));
    }

    #[test]
    fn group_mismatch_is_reported() {
        let g = FiniteAbelianGroup::cyclic(7);
        let h = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let foreign = h.element(vec![1, 1]).unwrap();
        assert!(matches!(
            g.compose(&g.identity(), &foreign),
            Err(AlgebraError::GroupMismatch(_))
        ));
        assert!(g.element(vec![7]).is_err());
    }

    #[test]
    fn rank_round_trip_and_ops_match_componentwise() {
        let g = FiniteAbelianGroup::new(vec![2, 6]).unwrap();
        for r in 0..g.len() {
            assert_eq!(g.rank_of(&g.element_at(r)), r);
        }
        for a in g.elements() {
            for b in g.elements() {
                let c = g.compose(&a, &b).unwrap();
                let expected: Vec<u64> = a
                    .residues()
                    .iter()
                    .zip(b.residues())
                    .zip(g.invariant_factors())
                    .map(|((x, y), d)| (x + y) % d)
                    .collect();
                assert_eq!(c.residues(), &expected[..]);
            }
            let inv = g.inverse(&a).unwrap();
            assert_eq!(g.compose(&a, &inv).unwrap(), g.identity());
            let mut acc = g.identity();
            for t in 0..8i64 {
                assert_eq!(g.power(&a, t).unwrap(), acc);
                acc = g.compose(&acc, &a).unwrap();
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let names = |m| {
            enumerate_abelian_groups(m)
                .iter()
                .map(|g| g.invariant_factors().to_vec())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(1), vec![Vec::<u64>::new()]);
        assert_eq!(names(3), vec![vec![3]]);
        assert_eq!(names(4), vec![vec![4], vec![2, 2]]);
        assert_eq!(names(133), vec![vec![133]]);
        assert_eq!(names(72), vec![
            vec![72],
            vec![3, 24],
            vec![2, 36],
            vec![6, 12],
            vec![2, 2, 18],
            vec![2, 6, 6],
        ]);
    }

    #[test]
    fn enumerate_counts_match_partition_product() {
        for m in 1..=400u64 {
            let groups = enumerate_abelian_groups(m);
            let expected: u64 = factor(m)
                .factors()
                .iter()
                .map(|&(_, e)| partition_count(e))
                .product();
            assert_eq!(groups.len() as u64, expected, "m = {m}");
            for g in &groups {
                assert_eq!(g.order(), m);
            }
            for (i, a) in groups.iter().enumerate() {
                assert!(groups[i + 1..].iter().all(|b| a != b));
            }
            if factor(m).is_squarefree() {
                assert_eq!(groups.len(), 1);
            }
        }
    }
}
