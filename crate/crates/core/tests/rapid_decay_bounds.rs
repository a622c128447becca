use num_rational::BigRational;
use num_traits::One;

use freeqg_core::interval::Bracket;
use freeqg_core::ncpoly::NcPolynomial;
use freeqg_core::qnum::q_bracket;
use freeqg_core::rapid_decay::{
    dn_constant, dn_uniform_upper_bound, prefactor, rd_check, select_p, three_vertex_norm_inv_product,
    ThreeVertexParams, Truncation,
};
use freeqg_core::weingarten::Model;

const BITS: u32 = 192;

fn one_minus_q2_powers(n_dim: u32, count: u32) -> Vec<Bracket> {
    let q = q_bracket(n_dim, BITS).unwrap();
    let q2 = q.mul(&q);
    let one = Bracket::from_int(1, BITS);
    (0..=count).map(|s| one.sub(&q2.powi(s))).collect()
}

#[test]
fn norm_inverse_lies_between_one_and_the_product_bound() {
    for n_dim in [3u32, 4, 7] {
        let t = one_minus_q2_powers(n_dim, 20);
        for params in ThreeVertexParams::all_up_to(16) {
            let v = three_vertex_norm_inv_product(params, n_dim).unwrap();
            assert!(v >= BigRational::one(), "{params:?}");
            let mut bound = Bracket::from_int(1, BITS);
            for s in 1..=params.r() {
                let f = &t[s as usize];
                bound = bound.div(&f.mul(f).mul(f)).unwrap();
            }
            assert!(v <= bound.upper(), "{params:?} N={n_dim}");
        }
    }
}

#[test]
fn radicand_stays_in_its_bracket() {
    for n_dim in [3u32, 5] {
        let t = one_minus_q2_powers(n_dim, 1);
        let lower = t[1].powi(3);
        let upper = Bracket::from_int(1, BITS).div(&t[1].powi(2)).unwrap();
        for n in 0..=40 {
            for k in 0..=40 {
                for r in (0..=n.min(k)).step_by(3) {
                    let params = ThreeVertexParams::from_r(n, k, r).unwrap();
                    let v = prefactor(params, n_dim).unwrap();
                    assert!(lower.lower() <= v && v <= upper.upper(), "{params:?} N={n_dim}");
                }
            }
        }
    }
}

#[test]
fn dn_decreases_and_halves_its_excess() {
    let grid = [3u32, 5, 10, 20, 50];
    let bounds: Vec<_> = grid.iter().map(|&n| dn_constant(n, Truncation::default()).unwrap()).collect();
    for (w, n) in bounds.windows(2).zip(grid.windows(2)) {
        assert!(w[1].value.upper() <= w[0].value.lower(), "N = {:?}", n);
        assert!(w[1].upper() < w[0].upper());
        let excess_big = w[0].value.lower() - BigRational::one();
        let excess_small = w[1].value.upper() - BigRational::one();
        assert!(excess_small * BigRational::from_integer(2.into()) <= excess_big, "N = {:?}", n);
    }
    for b in &bounds {
        assert!(b.value.upper() <= b.rigorous_upper.lower());
        assert!(b.tail_error > BigRational::from_integer(0.into()));
    }
}

#[test]
fn finer_truncation_does_not_lower_the_scan() {
    let coarse = dn_constant(4, Truncation { r_max: 16, side_max: 8 }).unwrap();
    let fine = dn_constant(4, Truncation::default()).unwrap();
    assert!(coarse.value.lower() <= fine.value.upper());
}

#[test]
fn selector_is_monotone() {
    let d = dn_uniform_upper_bound().unwrap();
    let eps_grid = [BigRational::new(1.into(), 1.into()), BigRational::new(1.into(), 3.into()), BigRational::new(1.into(), 20.into())];
    for r in 0..5 {
        let mut prev_p = 0;
        for eps in &eps_grid {
            let (_, p) = select_p(r, eps, &d).unwrap();
            assert!(p >= prev_p, "eps decreasing should not lower p");
            prev_p = p;
            let (_, p_next_r) = select_p(r + 1, eps, &d).unwrap();
            assert!(p_next_r >= p);
        }
    }
}

#[test]
fn rd_check_examples() {
    let x11 = NcPolynomial::parse("x[1,1]", Model::Orthogonal).unwrap();
    let report = rd_check(&x11.scaled_generators(4), 4, &[2, 4, 8]).unwrap();
    assert!(report.holds());
    assert!(report.rows.iter().all(|r| r.margin.lower() >= BigRational::from_integer(0.into())));
    let sum = NcPolynomial::parse("x[1,1] + x[1,2]", Model::Orthogonal).unwrap();
    for n in 3..=8 {
        assert!(rd_check(&sum.scaled_generators(n), n, &[2, 4, 6, 8]).unwrap().holds());
    }
}
