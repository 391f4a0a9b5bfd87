use std::sync::Arc;

use frakgeo_core::frac::{
    exterior_derivative, wedge, Basis, ChartSpec, FormField, FractionalOrder, GridField, Lattice,
    PowerField, Scalar, MAX_DEGREE,
};
use frakgeo_core::kahler::AlmostComplex;
use frakgeo_core::lagrange::{hessian_lower, Lagrangian};
use proptest::prelude::*;

const ALPHAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

fn chart(n: usize) -> Arc<ChartSpec> {
    Arc::new(ChartSpec::origin(n).unwrap())
}

/// Terms with exponents on the `k·α` ladder, so repeated differentiation
/// never produces negative powers.
fn terms(dim: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((-3.0..3.0f64, prop::collection::vec(0u8..4, dim)), 1..5)
}

fn field(chart: &Arc<ChartSpec>, alpha: f64, terms: &[(f64, Vec<u8>)]) -> PowerField {
    let terms = terms.iter().map(|(c, k)| {
        (
            *c,
            k.iter().map(|&k| f64::from(k) * alpha).collect::<Vec<_>>(),
        )
    });
    PowerField::from_terms(chart.clone(), terms).unwrap()
}

fn power_max(s: &Scalar) -> f64 {
    match s {
        Scalar::Power(p) => p.max_abs_coeff(),
        Scalar::Grid(g) => g.max_abs(),
    }
}

fn form_max(f: &FormField) -> f64 {
    f.components()
        .map(|(_, c)| power_max(c))
        .fold(0.0, f64::max)
}

type Terms = Vec<(f64, Vec<u8>)>;

fn random_form(
    chart: &Arc<ChartSpec>,
    alpha: f64,
    degree: usize,
    seeds: &[(usize, Terms)],
) -> FormField {
    let dim = chart.dim();
    let mut f = FormField::zero(chart.clone(), degree, Basis::Coordinate);
    for (pick, t) in seeds {
        // pick a sorted index set of the right size from the bits of `pick`
        let idx: Vec<usize> = (0..dim).filter(|b| pick >> b & 1 == 1).collect();
        if idx.len() == degree {
            f.add_to(&idx, &Scalar::Power(field(chart, alpha, t)))
                .unwrap();
        }
    }
    f
}

proptest! {
    #[test]
    fn caputo_is_linear(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        f in terms(4),
        g in terms(4),
        alpha_ix in 0usize..4,
        axis in 0usize..4,
    ) {
        let alpha = ALPHAS[alpha_ix];
        let order = FractionalOrder::new(alpha).unwrap();
        let c = chart(2);
        let (f, g) = (field(&c, alpha, &f), field(&c, alpha, &g));
        let lhs = f.scale(a).add(&g.scale(b)).caputo(axis, order).unwrap();
        let rhs = f.caputo(axis, order).unwrap().scale(a).add(&g.caputo(axis, order).unwrap().scale(b));
        prop_assert!(lhs.sub(&rhs).max_abs_coeff() <= 1e-12);
    }

    #[test]
    fn constants_are_annihilated(value in -1e3..1e3f64, alpha in 0.05..1.0f64, axis in 0usize..2) {
        let order = FractionalOrder::new(alpha).unwrap();
        let c = chart(1);
        prop_assert!(PowerField::constant(c.clone(), value).caputo(axis, order).unwrap().is_zero());
        let lattice = Arc::new(Lattice::uniform(c, 1.0, 24).unwrap());
        let grid = GridField::constant(lattice, value).caputo_partial(axis, order).unwrap();
        prop_assert!(grid.max_abs() <= 1e-12 * value.abs().max(1.0));
    }

    #[test]
    fn grid_caputo_is_linear(a in -2.0..2.0f64, f in terms(2), g in terms(2), alpha_ix in 0usize..4) {
        let alpha = ALPHAS[alpha_ix];
        let order = FractionalOrder::new(alpha).unwrap();
        let c = chart(1);
        let lattice = Arc::new(Lattice::uniform(c.clone(), 1.0, 20).unwrap());
        let f = field(&c, alpha, &f).sample(&lattice).unwrap();
        let g = field(&c, alpha, &g).sample(&lattice).unwrap();
        let lhs = f.axpy(a, &g).unwrap().caputo_partial(1, order).unwrap();
        let rhs = f.caputo_partial(1, order).unwrap().axpy(a, &g.caputo_partial(1, order).unwrap()).unwrap();
        let scale = lhs.max_abs().max(1.0);
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-11 * scale);
    }

    #[test]
    fn d_squared_vanishes(
        f in terms(4),
        seeds in prop::collection::vec((0usize..16, terms(4)), 1..4),
        alpha_ix in 0usize..4,
    ) {
        let alpha = ALPHAS[alpha_ix];
        let order = FractionalOrder::new(alpha).unwrap();
        let c = chart(2);
        let zero_form = FormField::function(c.clone(), Scalar::Power(field(&c, alpha, &f)), Basis::Coordinate);
        let dd = exterior_derivative(&exterior_derivative(&zero_form, order).unwrap(), order).unwrap();
        prop_assert!(form_max(&dd) <= 1e-10);
        let one_form = random_form(&c, alpha, 1, &seeds);
        let dd = exterior_derivative(&exterior_derivative(&one_form, order).unwrap(), order).unwrap();
        prop_assert!(form_max(&dd) <= 1e-10);
    }

    #[test]
    fn wedge_is_graded_antisymmetric(
        p in 1usize..3,
        q in 1usize..3,
        a in prop::collection::vec((0usize..16, terms(4)), 1..4),
        b in prop::collection::vec((0usize..16, terms(4)), 1..4),
    ) {
        prop_assume!(p + q <= MAX_DEGREE);
        let c = chart(2);
        let fa = random_form(&c, 1.0, p, &a);
        let fb = random_form(&c, 1.0, q, &b);
        let ab = wedge(&fa, &fb).unwrap();
        let ba = wedge(&fb, &fa).unwrap();
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(form_max(&ab.sub(&ba.scale(sign)).unwrap()) <= 1e-10);
    }

    #[test]
    fn hessian_is_symmetric(f in terms(4), alpha_ix in 0usize..4) {
        let alpha = ALPHAS[alpha_ix];
        let c = chart(2);
        // a guaranteed velocity-dependent term keeps the density admissible
        let density = field(&c, alpha, &f).add(&field(&c, alpha, &[(1.0, vec![0, 0, 2, 1])]));
        let lag = Lagrangian::new(density, FractionalOrder::new(alpha).unwrap(), false).unwrap();
        let g = hessian_lower(&lag).unwrap();
        prop_assert!(g[0][1].sub(&g[1][0]).max_abs_coeff() <= 1e-12);
    }

    #[test]
    fn almost_complex_squares_to_minus_identity(n in 1usize..6) {
        prop_assert_eq!(AlmostComplex::new(n).square_residual(), 0.0);
    }
}
