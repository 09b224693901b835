use num_complex::Complex64 as C64;
use proptest::prelude::*;
use triphoton::detection::{overlap_eta, LocalOscillator};
use triphoton::jsa::Jsa;
use triphoton::numerics::{l2_norm3, FrequencyGrid, Tensor3C};

const N: usize = 7;

fn grid() -> FrequencyGrid {
    FrequencyGrid::new(-2.0, 2.0, N).unwrap()
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), len)
}

fn symmetric_tensor() -> impl Strategy<Value = Tensor3C> {
    complex_vec(N * N * N).prop_map(|raw| {
        Tensor3C::from_symmetric_fn(grid(), |i, j, k| raw[(i * N + j) * N + k])
    })
}

fn nonzero(t: &Tensor3C) -> bool {
    l2_norm3(t) > 1e-6
}

proptest! {
    #[test]
    fn norm_is_absolutely_homogeneous(t in symmetric_tensor(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let c = C64::new(re, im);
        let lhs = l2_norm3(&t.scaled(c));
        let rhs = c.norm() * l2_norm3(&t);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn overlap_never_exceeds_one(t in symmetric_tensor(), g in complex_vec(N)) {
        prop_assume!(nonzero(&t));
        let lo = match LocalOscillator::new(grid(), g) {
            Ok(lo) => lo,
            Err(_) => return Ok(()),
        };
        let j = Jsa::normalize(t, 1e-3).unwrap();
        let eta = overlap_eta(&j, &lo).unwrap();
        prop_assert!(eta.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn global_lo_phase_only_rotates_eta(t in symmetric_tensor(), g in complex_vec(N), phi in -3.2f64..3.2) {
        prop_assume!(nonzero(&t));
        let lo = match LocalOscillator::new(grid(), g.clone()) {
            Ok(lo) => lo,
            Err(_) => return Ok(()),
        };
        let rot = C64::from_polar(1.0, phi);
        let lo_rot = LocalOscillator::new(grid(), g.iter().map(|c| c * rot).collect()).unwrap();
        let j = Jsa::normalize(t, 1e-3).unwrap();
        let a = overlap_eta(&j, &lo).unwrap();
        let b = overlap_eta(&j, &lo_rot).unwrap();
        prop_assert!((b - a * C64::from_polar(1.0, -3.0 * phi)).norm() <= 1e-12);
    }

    #[test]
    fn symmetric_fill_is_exact(t in symmetric_tensor()) {
        prop_assert_eq!(t.permutation_defect(), 0.0);
    }
}
