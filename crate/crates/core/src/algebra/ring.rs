use std::sync::Arc;

use super::group::{FiniteAbelianGroup, GroupElement};
use super::AlgebraError;

/// An element of the integral group ring `Z[G]`: a dense table of `i64`
/// coefficients indexed by element rank.
///
/// Subsets of `G` are identified with their 0/1 indicator elements. All
/// arithmetic is checked; overflow is an error, never a wrap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    group: Arc<FiniteAbelianGroup>,
    coeffs: Vec<i64>,
}

impl GroupRingElement {
    pub fn zero(group: &Arc<FiniteAbelianGroup>) -> Self {
        Self {
            group: Arc::clone(group),
            coeffs: vec![0; group.len()],
        }
    }

    /// The identity element `e` of the group, as a ring element.
    pub fn identity(group: &Arc<FiniteAbelianGroup>) -> Self {
        let mut out = Self::zero(group);
        out.coeffs[0] = 1;
        out
    }

    /// The sum of all group elements.
    pub fn all_ones(group: &Arc<FiniteAbelianGroup>) -> Self {
        Self {
            group: Arc::clone(group),
            coeffs: vec![1; group.len()],
        }
    }

    pub fn from_coefficients(
        group: &Arc<FiniteAbelianGroup>,
        coeffs: Vec<i64>,
    ) -> Result<Self, AlgebraError> {
        if coeffs.len() != group.len() {
            return Err(AlgebraError::GroupMismatch(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                group.order()
            )));
        }
        Ok(Self {
            group: Arc::clone(group),
            coeffs,
        })
    }

    /// Multiset indicator: every listed rank adds one to its coefficient.
    pub fn from_ranks(group: &Arc<FiniteAbelianGroup>, ranks: &[usize]) -> Self {
        let mut out = Self::zero(group);
        for &r in ranks {
            out.coeffs[r] += 1;
        }
        out
    }

    pub fn from_elements<'a>(
        group: &Arc<FiniteAbelianGroup>,
        elements: impl IntoIterator<Item = &'a GroupElement>,
    ) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(group);
        for g in elements {
            group.check(g)?;
            out.coeffs[group.rank_of(g)] += 1;
        }
        Ok(out)
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        &self.group
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coefficient(&self, rank: usize) -> i64 {
        self.coeffs[rank]
    }

    pub fn coefficient_of(&self, g: &GroupElement) -> Result<i64, AlgebraError> {
        self.group.check(g)?;
        Ok(self.coeffs[self.group.rank_of(g)])
    }

    /// Sum of all coefficients (the augmentation).
    pub fn total(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    fn same_group(&self, other: &Self) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(AlgebraError::GroupMismatch(format!(
                "{} vs {}",
                self.group, other.group
            )))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, i64::checked_add)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, i64::checked_sub)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(i64, i64) -> Option<i64>,
    ) -> Result<Self, AlgebraError> {
        self.same_group(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| op(a, b).ok_or(AlgebraError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            group: Arc::clone(&self.group),
            coeffs,
        })
    }

    pub fn checked_scale(&self, lambda: i64) -> Result<Self, AlgebraError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| a.checked_mul(lambda).ok_or(AlgebraError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            group: Arc::clone(&self.group),
            coeffs,
        })
    }

    /// Convolution product `sum_g (sum_h a_h b_{h^-1 g}) g`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_group(other)?;
        let g = &self.group;
        let rhs: Vec<(usize, i64)> = other.nonzero().collect();
        let mut out = vec![0i64; g.len()];
        for (h, a) in self.nonzero() {
            for &(k, b) in &rhs {
                let slot = &mut out[g.add_ranks(h, k)];
                let prod = a.checked_mul(b).ok_or(AlgebraError::Overflow)?;
                *slot = slot.checked_add(prod).ok_or(AlgebraError::Overflow)?;
            }
        }
        Ok(Self {
            group: Arc::clone(g),
            coeffs: out,
        })
    }

    /// Ring power `A^k` for `k >= 0` (`A^0 = e`).
    pub fn checked_pow(&self, k: u32) -> Result<Self, AlgebraError> {
        let mut acc = Self::identity(&self.group);
        for _ in 0..k {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// `A^(t) = sum_g a_g g^t`; coefficients of elements with the same image
    /// accumulate.
    pub fn power_map(&self, t: i64) -> Self {
        let g = &self.group;
        let mut out = vec![0i64; g.len()];
        for (h, a) in self.nonzero() {
            // |sum| <= sum of |a_g|, which already fits since the input does
            out[g.pow_rank(h, t)] += a;
        }
        Self {
            group: Arc::clone(g),
            coeffs: out,
        }
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(r, &c)| (r, c))
    }

    /// Ranks with strictly positive coefficient, ascending.
    pub fn support_ranks(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(r, _)| r)
            .collect()
    }

    /// Elements with strictly positive coefficient, in rank order.
    pub fn support(&self) -> Vec<GroupElement> {
        self.support_ranks()
            .into_iter()
            .map(|r| self.group.element_at(r))
            .collect()
    }
}

/// `S = S^(-1)` for a set of element ranks.
pub fn is_inverse_closed(group: &FiniteAbelianGroup, ranks: &[usize]) -> bool {
    let mut member = vec![false; group.len()];
    for &r in ranks {
        member[r] = true;
    }
    ranks.iter().all(|&r| member[group.neg_rank(r)])
}

/// [`is_inverse_closed`] on explicit elements.
pub fn is_inverse_closed_elements(
    group: &FiniteAbelianGroup,
    elements: &[GroupElement],
) -> Result<bool, AlgebraError> {
    let ranks = elements
        .iter()
        .map(|g| group.check(g).map(|_| group.rank_of(g)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(is_inverse_closed(group, &ranks))
}
