use proptest::prelude::*;
use singular_heat::coefficients::{fit_moderateness, NormKind};
use singular_heat::{Background, Boundary, Grid, SingularAtom, SingularCoefficient};

const LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

fn atom() -> impl Strategy<Value = SingularAtom> {
    (-0.2..0.2f64, 0.0..2.0f64, 0..3u8, 0.0..3.0f64, 0.0..3.0f64).prop_map(|(x, w, kind, l, r)| {
        match kind {
            0 => SingularAtom::delta(x, w).unwrap(),
            1 => SingularAtom::delta_squared(x, w).unwrap(),
            _ => SingularAtom::jump(x, w, l, r).unwrap(),
        }
    })
}

fn grid() -> Grid {
    Grid::new(-1.0, 1.0, 401, Boundary::DirichletZero).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn regularization_stays_above_the_floor(atoms in prop::collection::vec(atom(), 0..4), value in 0.5..3.0f64) {
        let coeff = SingularCoefficient::new(Background::Constant { value }, value, atoms).unwrap();
        for eps in LADDER {
            let h = coeff.regularize(eps, &grid()).unwrap();
            prop_assert!(h.min() >= value * (1.0 - 1e-12), "eps {eps}: {}", h.min());
        }
    }

    // Same-kind localized atoms with disjoint regularized supports. On a
    // finite ladder overlapping atoms can lower the fitted exponent (two Dirac
    // atoms 0.076 apart, weights 1.95 and 1.10: 1.83 -> 1.73), and so can a
    // second jump, which raises the eps-independent plateau.
    #[test]
    fn adding_a_separated_atom_never_lowers_the_exponent(
        kind in 0..2u8,
        weights in prop::collection::vec(0.0..2.0f64, 5),
        slot in 0..5usize,
        extra_weight in 0.0..2.0f64,
        keep in prop::collection::vec(any::<bool>(), 5),
    ) {
        let make = |x: f64, w: f64| match kind {
            0 => SingularAtom::delta(x, w).unwrap(),
            _ => SingularAtom::delta_squared(x, w).unwrap(),
        };
        let slots = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let atoms: Vec<_> = (0..5).filter(|&i| keep[i] && i != slot).map(|i| make(slots[i], weights[i])).collect();
        let wide = Grid::new(-2.0, 2.0, 801, Boundary::DirichletZero).unwrap();
        let base = SingularCoefficient::new(Background::Constant { value: 1.0 }, 1.0, atoms).unwrap();
        let mut more = base.clone();
        more.push_atom(make(slots[slot], extra_weight));
        let a = fit_moderateness(&base, &LADDER, NormKind::W1Inf, &wide).unwrap();
        let b = fit_moderateness(&more, &LADDER, NormKind::W1Inf, &wide).unwrap();
        prop_assert!(b.fitted_exponent >= a.fitted_exponent - 1e-9, "{} -> {}", a.fitted_exponent, b.fitted_exponent);
        prop_assert!(!b.positivity_violated);
    }
}
