//! Fast invariant suite behind `freeqg check`.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;

use freeqg_core::ncpoly::NcPolynomial;
use freeqg_core::qnum::{dim_irrep, fusion_summands};
use freeqg_core::rapid_decay::{
    dn_constant, rd_check, three_vertex_norm_inv_factorial, three_vertex_norm_inv_product, ThreeVertexParams,
    Truncation,
};
use freeqg_core::weingarten::{GeneratorWord, Letter, Model, Weingarten};
use freeqg_core::Result;

use crate::{output, CmdResult, Failure};

type Outcome = Result<Option<String>>;

fn fusion_dimensions() -> Outcome {
    for n_dim in 3..=10 {
        for n in 0..=12 {
            for k in 0..=12 {
                let lhs = dim_irrep(n, n_dim)? * dim_irrep(k, n_dim)?;
                let rhs = fusion_summands(n, k).into_iter().try_fold(BigInt::from(0), |acc, l| Ok::<_, freeqg_core::Error>(acc + dim_irrep(l, n_dim)?))?;
                if lhs != rhs {
                    return Ok(Some(format!("n={n} k={k} N={n_dim}")));
                }
            }
        }
    }
    Ok(None)
}

fn inverse_tables(engine: &Weingarten) -> Outcome {
    for k in (2..=10).step_by(2) {
        for n in 2..=10 {
            if !engine.table(k, n, None)?.verify_inverse() {
                return Ok(Some(format!("k={k} N={n}")));
            }
        }
    }
    Ok(None)
}

fn contractions(engine: &Weingarten) -> Outcome {
    let words: Vec<Vec<Letter>> = vec![
        vec![Letter::new(1, 1), Letter::new(2, 1)],
        vec![Letter::new(1, 2), Letter::new(1, 1), Letter::new(2, 2), Letter::new(2, 1)],
        vec![Letter::new(2, 1), Letter::new(2, 1), Letter::new(1, 2), Letter::new(1, 1), Letter::new(2, 2), Letter::new(1, 2)],
    ];
    for n in 2..=6 {
        for letters in &words {
            let w = GeneratorWord::new(letters.clone(), Model::Orthogonal)?;
            for pos in 0..w.len() - 1 {
                if letters[pos].col != 1 || letters[pos + 1].col != 1 {
                    continue;
                }
                let c = engine.unitarity_contraction(&w, n, pos)?;
                if !c.holds() {
                    return Ok(Some(format!("{w} at N={n}, position {pos}")));
                }
            }
        }
        let u = GeneratorWord::new(vec![Letter::new(1, 1), Letter::star(2, 1), Letter::new(2, 2), Letter::star(2, 2)], Model::Unitary)?;
        let c = engine.unitarity_contraction(&u, n, 0)?;
        if !c.holds() {
            return Ok(Some(format!("{u} at N={n}")));
        }
    }
    Ok(None)
}

fn three_vertex() -> Outcome {
    for n_dim in 3..=8 {
        for params in ThreeVertexParams::all_up_to(12) {
            if three_vertex_norm_inv_factorial(params, n_dim)? != three_vertex_norm_inv_product(params, n_dim)? {
                return Ok(Some(format!("{params:?} at N={n_dim}")));
            }
        }
    }
    Ok(None)
}

fn dn_brackets() -> Outcome {
    let t = Truncation { r_max: 32, side_max: 16 };
    let mut prev: Option<freeqg_core::RDBound> = None;
    for n in [3, 5, 10] {
        let b = dn_constant(n, t)?;
        if !(b.value.lower() > BigRational::from_integer(1.into()) && b.value.upper() <= b.rigorous_upper.lower()) {
            return Ok(Some(format!("N={n}")));
        }
        if let Some(p) = &prev {
            if !b.value.certainly_lt(&p.value) {
                return Ok(Some(format!("D_{n} not below D_{}", p.n)));
            }
        }
        prev = Some(b);
    }
    Ok(None)
}

fn rd_sandwich() -> Outcome {
    for text in ["x[1,1]", "x[1,1] + x[1,2]", "x[1,1]*x[2,2]"] {
        let base = NcPolynomial::parse(text, Model::Orthogonal)?;
        for n in 3..=5 {
            let ps: &[u32] = if base.degree() == 1 { &[2, 4, 8] } else { &[2, 4] };
            if !rd_check(&base.scaled_generators(n), n, ps)?.holds() {
                return Ok(Some(format!("{text} at N={n}")));
            }
        }
    }
    Ok(None)
}

pub fn run(out: Option<&Path>) -> CmdResult {
    let engine = Weingarten::new(12);
    let checks: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("fusion dimensions", Box::new(fusion_dimensions)),
        ("Wg * G = I", Box::new(|| inverse_tables(&engine))),
        ("unitarity contraction", Box::new(|| contractions(&engine))),
        ("three-vertex formulas", Box::new(three_vertex)),
        ("D_N brackets", Box::new(dn_brackets)),
        ("RD sandwich", Box::new(rd_sandwich)),
    ];
    let mut report = String::new();
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(None) => report.push_str(&format!("PASS {name}\n")),
            Ok(Some(detail)) => {
                report.push_str(&format!("FAIL {name}: {detail}\n"));
                failures.push(name);
            }
            Err(e) => {
                report.push_str(&format!("FAIL {name}: {e}\n"));
                failures.push(name);
            }
        }
    }
    output::write(out, &report)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!("failed: {}", failures.join(", "))))
    }
}
