use kchains::chains::{chain_count_dp, count_chains_brute};
use kchains::charsums::decompose;
use kchains::pointsets::sample_uniform;
use kchains::{ChainSpec, Element, Int, Limits, Policy, PointSet, Structure};
use num_bigint::BigInt;
use proptest::prelude::*;

fn structures() -> Vec<Structure> {
    vec![
        Structure::prime_field(3).unwrap(),
        Structure::prime_field(5).unwrap(),
        Structure::extension_field(3, 2).unwrap(),
        Structure::integer_ring(3, 2).unwrap(),
    ]
}

prop_compose! {
    fn instance(max_n: u64, max_k: usize)
        (which in 0..4usize, d in 1..=3usize, seed in any::<u64>(), n_frac in 0.0..1.0f64,
         k in 1..=max_k, raw in prop::collection::vec(any::<u32>(), max_k))
        -> (PointSet, Vec<Element>)
    {
        let s = structures()[which].clone();
        let space = (s.q() as u64).pow(d as u32);
        let n = ((n_frac * max_n.min(space) as f64) as u64).min(space);
        let e = sample_uniform(&s, d, n, seed, &Limits::default()).unwrap();
        let alphas = raw[..k].iter().map(|r| Element(r % s.q())).collect();
        (e, alphas)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reversal_symmetry((e, alphas) in instance(30, 4)) {
        let mut rev = alphas.clone();
        rev.reverse();
        for policy in [Policy::AllTuples, Policy::AdjacentDistinct] {
            let a: Int = chain_count_dp(&e, &alphas, policy).unwrap();
            let b: Int = chain_count_dp(&e, &rev, policy).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn unit_scaling_covariance((e, alphas) in instance(30, 3), pick in any::<u32>()) {
        let s = e.structure().clone();
        let units: Vec<Element> = s.elements().filter(|a| s.is_unit(*a)).collect();
        let c = units[pick as usize % units.len()];
        let c2 = s.mul(c, c);
        let scaled_alphas: Vec<Element> = alphas.iter().map(|a| s.mul(c2, *a)).collect();
        let a: Int = chain_count_dp(&e, &alphas, Policy::AllTuples).unwrap();
        let b: Int = chain_count_dp(&e.scaled(c), &scaled_alphas, Policy::AllTuples).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn policies_are_monotone((e, alphas) in instance(9, 3)) {
        let spec = ChainSpec::new(alphas, Policy::AllTuples).unwrap();
        let budget = 1u128 << 24;
        let all = count_chains_brute::<Int>(&e, &spec, budget).unwrap().count;
        let adj = count_chains_brute::<Int>(&e, &spec.with_policy(Policy::AdjacentDistinct), budget).unwrap().count;
        let pw = count_chains_brute::<Int>(&e, &spec.with_policy(Policy::PairwiseDistinct), budget).unwrap().count;
        prop_assert!(pw <= adj && adj <= all);
    }

    #[test]
    fn dp_matches_brute((e, alphas) in instance(10, 3)) {
        for policy in [Policy::AllTuples, Policy::AdjacentDistinct] {
            let spec = ChainSpec::new(alphas.clone(), policy).unwrap();
            let dp: Int = chain_count_dp(&e, &alphas, policy).unwrap();
            let brute = count_chains_brute::<Int>(&e, &spec, 1 << 24).unwrap().count;
            prop_assert_eq!(dp, brute);
        }
    }

    #[test]
    fn decomposition_sums_to_scaled_count((e, alphas) in instance(20, 4)) {
        let spec = ChainSpec::new(alphas.clone(), Policy::AllTuples).unwrap();
        let r = decompose::<Int>(&e, &spec, &Limits::default()).unwrap();
        let dp: Int = chain_count_dp(&e, &alphas, Policy::AllTuples).unwrap();
        let qk = (e.structure().q() as Int).pow(alphas.len() as u32);
        prop_assert_eq!(r.scaled_terms.values().sum::<Int>(), qk * dp);
        prop_assert_eq!(r.scaled_terms[&0], (e.len() as Int).pow(alphas.len() as u32 + 1));
        prop_assert_eq!(r.count, dp);
    }
}

#[test]
fn global_mass_over_all_types() {
    for s in structures() {
        let e = sample_uniform(&s, 2, 7, 21, &Limits::default()).unwrap();
        for k in 1..=2u32 {
            let q = s.q();
            let mut total: Int = 0;
            for idx in 0..q.pow(k) {
                let alphas: Vec<Element> = (0..k).map(|j| Element(idx / q.pow(j) % q)).collect();
                total += chain_count_dp::<Int>(&e, &alphas, Policy::AllTuples).unwrap();
            }
            assert_eq!(total, 7i128.pow(k + 1), "{s} k={k}");
        }
    }
}

#[test]
fn scalar_types_agree() {
    let s = Structure::prime_field(5).unwrap();
    let e = sample_uniform(&s, 2, 20, 3, &Limits::default()).unwrap();
    let alphas = [Element(1), Element(2), Element(3)];
    let a: i64 = chain_count_dp(&e, &alphas, Policy::AllTuples).unwrap();
    let b: i128 = chain_count_dp(&e, &alphas, Policy::AllTuples).unwrap();
    let c: BigInt = chain_count_dp(&e, &alphas, Policy::AllTuples).unwrap();
    assert_eq!(BigInt::from(a), c);
    assert_eq!(BigInt::from(b), c);
}
