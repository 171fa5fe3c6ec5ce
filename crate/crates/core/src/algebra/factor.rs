//! Trial-division factorization and a few integer helpers shared by the
//! sieve and the group enumeration.

use std::fmt;

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimeFactorization {
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Multiplies the factors back out.
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

impl fmt::Display for PrimeFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factors `m` by trial division. `factor(1)` is the empty product.
///
/// # Panics
/// If `m == 0`.
pub fn factor(mut m: u64) -> PrimeFactorization {
    assert!(m >= 1, "cannot factor 0");
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    PrimeFactorization { factors }
}

pub fn is_prime(m: u64) -> bool {
    m >= 2 && factor(m).factors == [(m, 1)]
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of integer partitions of `k`.
pub fn partition_count(k: u32) -> u64 {
    partitions(k).len() as u64
}

/// All partitions of `k`, each as a non-increasing list of parts, in reverse
/// lexicographic order (`[k]` first, `[1; k]` last).
pub fn partitions(k: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small_values() {
        assert!(factor(1).factors().is_empty());
        assert_eq!(factor(133).factors(), &[(7, 1), (19, 1)]);
        assert_eq!(factor(871).factors(), &[(13, 1), (67, 1)]);
        assert_eq!(factor(1742).factors(), &[(2, 1), (13, 1), (67, 1)]);
        assert_eq!(factor(343).factors(), &[(7, 3)]);
        assert_eq!(factor(97).factors(), &[(97, 1)]);
    }

    #[test]
    fn factor_multiplies_back() {
        for m in 1..5000u64 {
            let f = factor(m);
            assert_eq!(f.value(), m);
            assert!(f.primes().all(is_prime_naive));
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    fn is_prime_naive(p: u64) -> bool {
        p >= 2 && (2..p).all(|d| p % d != 0)
    }

    #[test]
    fn partition_counts() {
        let expected = [1u64, 1, 2, 3, 5, 7, 11, 15, 22];
        for (k, &c) in expected.iter().enumerate() {
            assert_eq!(partition_count(k as u32), c);
        }
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
    }

    #[test]
    fn display() {
        assert_eq!(factor(1).to_string(), "1");
        assert_eq!(factor(12).to_string(), "2^2 * 3");
    }
}
