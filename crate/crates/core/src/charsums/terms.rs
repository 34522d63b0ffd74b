//! Shape of a remainder term `R_j` for a binary support tuple `j`.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermStructure {
    pub support: Vec<bool>,
    /// Number of nonzero entries.
    pub n: usize,
    /// Distinct points `x_i` touched by the constrained links.
    pub m: usize,
    /// `#{i : s_i = 0, s_{i-1} = 0}` with `s_0 = 0`.
    pub z: usize,
    /// `#{i : s_i = 0, s_{i-1} != 0}`.
    pub z_prime: usize,
    /// `#{i : s_i != 0, s_{i-1} = 0}`; the closed form is `m = n + a`.
    pub a: usize,
    /// `m` found by marking the endpoints of every constrained link.
    pub m_simulated: usize,
}

impl TermStructure {
    pub fn k(&self) -> usize {
        self.support.len()
    }

    /// `z <= k - m + 1`.
    pub fn bound_holds(&self) -> bool {
        self.z + self.m <= self.k() + 1
    }

    pub fn closed_form_holds(&self) -> bool {
        self.m == self.n + self.a && self.m == self.m_simulated
    }
}

pub fn term_structure(support: &[bool]) -> TermStructure {
    let k = support.len();
    let s = |i: usize| i >= 1 && support[i - 1];
    let n = support.iter().filter(|b| **b).count();
    let (mut z, mut z_prime, mut a) = (0, 0, 0);
    for i in 1..=k {
        match (s(i), s(i - 1)) {
            (false, false) => z += 1,
            (false, true) => z_prime += 1,
            (true, false) => a += 1,
            (true, true) => {}
        }
    }
    // Link i joins x_i and x_{i+1}.
    let mut touched = vec![false; k + 2];
    for i in (1..=k).filter(|&i| s(i)) {
        touched[i] = true;
        touched[i + 1] = true;
    }
    let m_simulated = touched.iter().filter(|t| **t).count();
    TermStructure {
        support: support.to_vec(),
        n,
        m: n + a,
        z,
        z_prime,
        a,
        m_simulated,
    }
}

/// All binary tuples of length `k`, as bool vectors, lowest bit first.
pub fn binary_tuples(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << k).map(move |mask| (0..k).map(|i| mask >> i & 1 == 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones() {
        for k in 1..8 {
            let t = term_structure(&vec![true; k]);
            assert_eq!((t.n, t.m, t.z), (k, k + 1, 0));
            assert_eq!(t.z + t.m, k + 1);
        }
    }

    #[test]
    fn all_zeros() {
        let t = term_structure(&[false, false, false]);
        assert_eq!((t.n, t.m, t.z), (0, 0, 3));
        assert!(t.bound_holds());
    }

    #[test]
    fn separated_pair() {
        let t = term_structure(&[true, false, true]);
        assert_eq!((t.n, t.m, t.z), (2, 4, 0));
        assert_eq!(t.m_simulated, 4);
        assert_eq!(t.z + t.m, 4);
    }

    #[test]
    fn exhaustive_small() {
        for k in 1..=10 {
            for j in binary_tuples(k) {
                let t = term_structure(&j);
                assert!(t.bound_holds(), "{j:?}");
                assert!(t.closed_form_holds(), "{j:?}");
                assert_eq!(t.z + t.z_prime, k - t.n);
            }
        }
    }
}
