mod common;

use std::sync::{Arc, OnceLock};

use apll::algebra::{gcd, FiniteAbelianGroup, GroupRingElement};
use apll::certificate::{verify_certificate, Certificate};
use apll::geometry::{
    classify_packing, covering_radius, lattice_index, min_lee_distance, sphere_points, sphere_size, LatticeBasis,
};
use apll::sieve::{is_square, rule_prop81, run_sieve, Stage, Witness};
use proptest::prelude::*;

use common::*;

fn groups() -> &'static [Arc<FiniteAbelianGroup>] {
    static G: OnceLock<Vec<Arc<FiniteAbelianGroup>>> = OnceLock::new();
    G.get_or_init(|| groups_up_to(40))
}

fn group_and_elements(k: usize) -> impl Strategy<Value = (Arc<FiniteAbelianGroup>, Vec<Vec<i64>>)> {
    prop::sample::select(groups().to_vec()).prop_flat_map(move |g| {
        let len = g.len();
        (Just(g), prop::collection::vec(prop::collection::vec(-5i64..=5, len), k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mul_matches_naive_oracle((g, v) in group_and_elements(2)) {
        let a = element(&g, v[0].clone());
        let b = element(&g, v[1].clone());
        let ab = a.checked_mul(&b).unwrap();
        let expected = naive_mul(&g, &v[0], &v[1]);
        prop_assert_eq!(ab.coefficients(), expected.as_slice());
    }

    #[test]
    fn ring_laws((g, v) in group_and_elements(3)) {
        let [a, b, c] = [0, 1, 2].map(|i| element(&g, v[i].clone()));
        let ab = a.checked_mul(&b).unwrap();
        prop_assert_eq!(&ab, &b.checked_mul(&a).unwrap());
        prop_assert_eq!(ab.checked_mul(&c).unwrap(), a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.checked_mul(&b.checked_add(&c).unwrap()).unwrap(),
            ab.checked_add(&a.checked_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(ab.total(), a.total() * b.total());
        let one = GroupRingElement::identity(&g);
        prop_assert_eq!(a.checked_mul(&one).unwrap(), a.clone());
    }

    #[test]
    fn power_map_is_a_ring_endomorphism((g, v) in group_and_elements(2), t in -12i64..=12) {
        let a = element(&g, v[0].clone());
        let b = element(&g, v[1].clone());
        prop_assert_eq!(a.power_map(t).total(), a.total());
        prop_assert_eq!(
            a.checked_mul(&b).unwrap().power_map(t),
            a.power_map(t).checked_mul(&b.power_map(t)).unwrap()
        );
        if gcd(t.unsigned_abs(), g.order()) == 1 {
            // a bijection on H just permutes coefficients
            let mut x = a.power_map(t).coefficients().to_vec();
            let mut y = a.coefficients().to_vec();
            x.sort_unstable();
            y.sort_unstable();
            prop_assert_eq!(x, y);
        }
    }
}

#[test]
fn sphere_size_matches_enumeration() {
    for n in 1..=6usize {
        for r in 0..=4u64 {
            let brute = sphere_count_brute(n, r as i64);
            assert_eq!(sphere_size(n as u64, r), brute, "n={n} r={r}");
            assert_eq!(sphere_points(n, r, u64::MAX).unwrap().len() as u64, brute, "n={n} r={r}");
        }
    }
}

fn unimodular(dim: usize) -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0..dim, 0..dim, -2i64..=2), 0..6)
}

fn apply_row_ops(rows: &[Vec<i64>], ops: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut rows = rows.to_vec();
    for &(i, j, k) in ops {
        if i != j {
            let src = rows[j].clone();
            for (x, y) in rows[i].iter_mut().zip(src) {
                *x += k * y;
            }
        } else {
            let len = rows.len();
            rows.swap(i, (i + 1) % len);
        }
    }
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_quantities_are_basis_independent(
        a in 1i64..=6, b in -6i64..=6, c in -6i64..=6, d in 1i64..=6,
        ops in unimodular(2),
    ) {
        let rows = vec![vec![a, b], vec![c, d]];
        prop_assume!(a * d - b * c != 0);
        let base = LatticeBasis::new(rows.clone()).unwrap();
        let moved = LatticeBasis::new(apply_row_ops(&rows, &ops)).unwrap();
        prop_assert_eq!(lattice_index(&base).unwrap(), lattice_index(&moved).unwrap());
        prop_assert_eq!(min_lee_distance(&base, 1_000_000).unwrap(), min_lee_distance(&moved, 1_000_000).unwrap());
        prop_assert_eq!(covering_radius(&base, 1_000_000).unwrap(), covering_radius(&moved, 1_000_000).unwrap());
        for r in 1..=2 {
            prop_assert_eq!(classify_packing(&base, r).unwrap(), classify_packing(&moved, r).unwrap());
        }
    }

    #[test]
    fn verdict_is_automorphism_invariant(
        idx in 0usize..3,
        t in 1u64..200,
        picks in prop::collection::vec(0usize..1000, 0..6),
    ) {
        let (order, n, base) = [
            (3, 1, "group: 3\nn: 1\nT0: 0\nT1: 1;2\n"),
            (7, 2, "group: 7\nn: 2\nT0: 0;1;6\nT1: 2;5\n"),
            (13, 3, "group: 13\nn: 3\nT0: 0;1;12\nT1: 2;11;3;10\n"),
        ][idx];
        prop_assume!(gcd(t, order) == 1);
        let cert: Certificate = base.parse().unwrap();
        // random inverse-closed perturbation of T1, mostly breaking the certificate
        let g = cert.group().clone();
        let mut t1: Vec<usize> = cert.t1_ranks().to_vec();
        for p in picks {
            let r = 1 + p % (g.len() - 1);
            if !cert.t0_ranks().contains(&r) && !t1.contains(&r) {
                t1.push(r);
                t1.push(g.neg_rank(r));
            }
        }
        t1.sort_unstable();
        t1.dedup();
        let c = Certificate::from_ranks(g.clone(), n, cert.t0_ranks().to_vec(), t1).unwrap();
        let image = c.map_ranks(|r| g.pow_rank(r, t as i64)).unwrap();
        prop_assert_eq!(verify_certificate(&c).passed(), verify_certificate(&image).passed());
    }
}

#[test]
fn prop81_never_excludes_a_square_discriminant() {
    for n in 1..=10_000u64 {
        if is_square(8 * n - 7) {
            assert!(rule_prop81(n).is_none(), "n={n}");
        }
    }
}

#[test]
fn prop82_witnesses_are_consistent() {
    for r in run_sieve(1000, Stage::ALL) {
        if let Some(Witness::Prop82(ws)) = &r.witness {
            assert!(!ws.is_empty());
            for w in ws {
                assert!(w.is_consistent(r.n), "n={} {w:?}", r.n);
                assert!(w.v > 2 * r.n + 1);
            }
        }
    }
}
