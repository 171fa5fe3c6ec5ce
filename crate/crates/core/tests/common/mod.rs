//! Independent oracles. Nothing here goes through the crate's rank
//! arithmetic: group elements are handled as residue tuples.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use apll::algebra::{enumerate_abelian_groups, FiniteAbelianGroup, GroupRingElement};

pub fn groups_up_to(max_order: u64) -> Vec<Arc<FiniteAbelianGroup>> {
    (1..=max_order)
        .flat_map(enumerate_abelian_groups)
        .map(Arc::new)
        .collect()
}

/// Double loop over residue tuples, added componentwise.
pub fn naive_mul(g: &FiniteAbelianGroup, a: &[i64], b: &[i64]) -> Vec<i64> {
    let elems: Vec<Vec<u64>> = g.elements().map(|e| e.residues().to_vec()).collect();
    let index: HashMap<&[u64], usize> = elems.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    let d = g.invariant_factors();
    let mut out = vec![0i64; elems.len()];
    for (i, x) in elems.iter().enumerate() {
        for (j, y) in elems.iter().enumerate() {
            let z: Vec<u64> = (0..d.len()).map(|k| (x[k] + y[k]) % d[k]).collect();
            out[index[z.as_slice()]] += a[i] * b[j];
        }
    }
    out
}

/// Lattice points of `Z^n` in the Lee ball of radius `r`, by scanning the cube.
pub fn sphere_count_brute(n: usize, r: i64) -> u64 {
    let side = (2 * r + 1) as usize;
    let mut count = 0;
    let mut digits = vec![0usize; n];
    loop {
        let w: i64 = digits.iter().map(|&d| (d as i64 - r).abs()).sum();
        if w <= r {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return count;
            }
            digits[k] += 1;
            if digits[k] < side {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

pub fn element(g: &Arc<FiniteAbelianGroup>, coeffs: Vec<i64>) -> GroupRingElement {
    GroupRingElement::from_coefficients(g, coeffs).unwrap()
}

/// Histogram `h[i] = #{x : coefficient of T^(j) T_i at x is i}`, where
/// `T` is `t_all` and `T^(j)` its image under `x -> x^j`.
pub fn class_sizes(g: &FiniteAbelianGroup, t_all: &[Vec<u64>], t_i: &[Vec<u64>], j: u64) -> Vec<u64> {
    let d = g.invariant_factors();
    let mut coeff: HashMap<Vec<u64>, u64> = HashMap::new();
    for a in t_all {
        for b in t_i {
            let z: Vec<u64> = (0..d.len()).map(|k| (a[k] * j + b[k]) % d[k]).collect();
            *coeff.entry(z).or_default() += 1;
        }
    }
    let max = coeff.values().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max + 1];
    hist[0] = g.order() - coeff.len() as u64;
    for c in coeff.values() {
        hist[*c as usize] += 1;
    }
    hist
}
