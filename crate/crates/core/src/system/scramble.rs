//! Seeded basis scrambling.
//!
//! `θ_t` are drawn from a ChaCha8 stream seeded with `seed`. Each unitary is
//! `e^{iφ} [[a, -conj(b)], [b, conj(a)]]` where `(a, b)` is a standard complex
//! Gaussian pair normalised to the unit sphere of `C²` and `φ` is uniform in
//! `[0, 2π)`; this is Haar measure on `U(2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::num::{phase, CVec2, Mat2};
use crate::system::grid::FiniteGridSystem;
use crate::C64;

pub fn random_unitary<R: Rng>(rng: &mut R) -> Mat2 {
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let v = CVec2::new(C64::new(g[0], g[1]), C64::new(g[2], g[3]));
        if let Some(u) = v.normalized() {
            let (a, b) = (u.0[0], u.0[1]);
            let p = phase(rng.gen_range(0.0..std::f64::consts::TAU));
            return Mat2([[a * p, -b.conj() * p], [b * p, a.conj() * p]]);
        }
    }
}

/// `horizon` Haar-random unitaries from `seed`.
pub fn random_unitary_family(seed: u64, horizon: u64) -> Vec<Mat2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..horizon).map(|_| random_unitary(&mut rng)).collect()
}

/// Isomorphic copy `β'_{s,t} = (θ_s⊗θ_t) β_{s,t} θ_{s+t}^{-1}` and the family used.
pub fn scramble(sys: &FiniteGridSystem, seed: u64) -> Result<(FiniteGridSystem, Vec<Mat2>)> {
    let thetas = random_unitary_family(seed, sys.horizon());
    Ok((sys.transport(&thetas)?, thetas))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::canonical::generate_canonical;
    use crate::system::spec::SystemSpec;

    #[test]
    fn draws_are_unitary_and_reproducible() {
        let a = random_unitary_family(7, 5);
        let b = random_unitary_family(7, 5);
        assert_eq!(a, b);
        assert_ne!(a, random_unitary_family(8, 5));
        for u in &a {
            assert!(u.unitarity_residual() < 1e-15);
        }
    }

    #[test]
    fn identity_family_leaves_system_unchanged() {
        let (sys, _) = generate_canonical(&SystemSpec::E1 { a: 0.3 }, 1, 5).unwrap();
        let same = sys.transport(&vec![Mat2::identity(); 5]).unwrap();
        assert_eq!(same, sys);
    }

    #[test]
    fn scrambling_preserves_validity() {
        let (sys, _) = generate_canonical(&SystemSpec::E1 { a: 0.3 }, 1, 6).unwrap();
        let (s2, _) = scramble(&sys, 42).unwrap();
        assert!(s2.check_associativity() <= 1e-12);
        assert!(s2.isometry_report().0 <= 1e-13);
        assert!(s2.max_map_diff(&sys).unwrap() > 1e-3);
    }

    #[test]
    fn restriction_commutes_with_scrambling() {
        let (sys, _) = generate_canonical(&SystemSpec::E2 { a: 0.4 }, 1, 8).unwrap();
        let (scr, thetas) = scramble(&sys, 3).unwrap();
        let sub: Vec<Mat2> = (1..=4).map(|j| thetas[2 * j - 1]).collect();
        let lhs = scr.restrict(2).unwrap();
        let rhs = sys.restrict(2).unwrap().transport(&sub).unwrap();
        assert!(lhs.max_map_diff(&rhs).unwrap() < 1e-15);
    }
}
