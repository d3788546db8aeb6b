//! Property tests for the algebraic identities of the tensor layer.

use proptest::prelude::*;
use rheokit::laws::{cauchy_from_piola, piola_from_cauchy};
use rheokit::tensor3::{cofactor, principal_invariants, sym_skew, DefGrad, Mat3, Sym3};

fn mat_strategy() -> impl Strategy<Value = Mat3> {
    prop::array::uniform9(-10.0f64..10.0).prop_map(|a| Mat3::from_flat(&a))
}

fn invertible_strategy() -> impl Strategy<Value = Mat3> {
    mat_strategy().prop_filter("well-conditioned", |m| m.det().abs() > 0.5)
}

fn def_grad_strategy() -> impl Strategy<Value = DefGrad> {
    mat_strategy()
        .prop_map(|mut m| {
            if m.det() < 0.0 {
                m.0.swap(0, 1);
            }
            m
        })
        .prop_filter("det in range", |m| m.det() > 0.5 && m.det() < 1e3)
        .prop_map(DefGrad::new_unchecked)
}

proptest! {
    #[test]
    fn sym_skew_splits_to_machine_precision(m in mat_strategy()) {
        let (s, w) = sym_skew(&m);
        let back = s.to_mat() + w;
        // Each reconstructed entry is 0.5 fl(a+b) + 0.5 fl(a-b): exact up to
        // the two inner roundings.
        prop_assert!((back - m).norm() <= 1e-15 * (1.0 + m.norm()));
        // Anti-symmetry of the skew part is exact (negation commutes with
        // rounding).
        prop_assert!((w + w.transpose()).norm() == 0.0);
    }

    #[test]
    fn cofactor_is_multiplicative(f in invertible_strategy(), g in invertible_strategy()) {
        let lhs = cofactor(&(f * g));
        let rhs = cofactor(&f) * cofactor(&g);
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn cofactor_transposed_recovers_det(f in invertible_strategy()) {
        // F (cof F)^T = det(F) I.
        let prod = f * cofactor(&f).transpose();
        let expected = Mat3::identity() * f.det();
        prop_assert!((prod - expected).norm() <= 1e-11 * expected.norm());
    }

    #[test]
    fn invariants_match_characteristic_polynomial(m in mat_strategy()) {
        // det(B - x I) = -x^3 + i1 x^2 - i2 x + i3 at a probe point.
        let b = Sym3::from_mat_symmetrized(&m);
        let (i1, i2, i3) = principal_invariants(&b);
        let x = 0.7321;
        let shifted = b.to_mat() - Mat3::identity() * x;
        let lhs = shifted.det();
        let rhs = -x * x * x + i1 * x * x - i2 * x + i3;
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
    }

    #[test]
    fn piola_cauchy_round_trip(f in def_grad_strategy(), s in mat_strategy()) {
        let sigma = Sym3::from_mat_symmetrized(&s).to_mat();
        let back = cauchy_from_piola(&piola_from_cauchy(&sigma, &f), &f);
        prop_assert!((back - sigma).norm() <= 1e-12 * sigma.norm().max(1.0) * (1.0 + f.det()));
    }
}
