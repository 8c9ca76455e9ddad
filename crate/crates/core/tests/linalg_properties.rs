mod common;

use cdim_core::exactnum::{Rational, RealElement};
use cdim_core::qlinalg::{
    column_echelon, determinant_int, rank_field, rank_int, rational_dependence,
    select_basis_columns, solve_field, MatrixF, MatrixQ, MatrixZ,
};
use common::{float_rank, rank_reverse_order, rng};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

fn surd_entry(rng: &mut impl Rng) -> RealElement {
    let r = [1u64, 2, 3, 5][rng.gen_range(0..4)];
    let extra = [1u64, 2, 3, 5][rng.gen_range(0..4)];
    RealElement::surd(common::rational(rng, 5, 3), r)
        + RealElement::surd(common::rational(rng, 2, 1), extra)
}

/// Random matrix of prescribed rank: a product of random factors, which is
/// well conditioned with high probability at these sizes.
fn random_rank_matrix(rng: &mut impl Rng) -> (MatrixF, usize) {
    let rows = rng.gen_range(1..=5);
    let cols = rng.gen_range(1..=5);
    let k = rng.gen_range(0..=rows.min(cols));
    let left = MatrixF::from_fn(rows, k, |_, _| surd_entry(rng));
    let right = MatrixF::from_fn(k, cols, |_, _| surd_entry(rng));
    let m = MatrixF::from_fn(rows, cols, |i, j| {
        (0..k).fold(RealElement::zero(), |acc, t| {
            acc + &left[(i, t)] * &right[(t, j)]
        })
    });
    (m, k)
}

#[test]
fn rank_field_matches_float_oracle() {
    let mut rng = rng(11);
    let mut checked = 0;
    while checked < 200 {
        let (m, _) = random_rank_matrix(&mut rng);
        let floats: Vec<Vec<f64>> = m
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64()).collect())
            .collect();
        // Skip the rare ill-conditioned draw: the oracle is only meaningful
        // when the singular values separate cleanly from 1e-8.
        let sv_gap_ok = float_rank(&floats, 1e-8) == float_rank(&floats, 1e-4);
        if !sv_gap_ok {
            continue;
        }
        assert_eq!(rank_field(&m), float_rank(&floats, 1e-8), "{m:?}");
        checked += 1;
    }
}

#[test]
fn solve_field_back_substitutes_exactly() {
    let mut rng = rng(12);
    for _ in 0..100 {
        let (m, _) = random_rank_matrix(&mut rng);
        let x: Vec<RealElement> = (0..m.cols()).map(|_| surd_entry(&mut rng)).collect();
        let b = m.mul_vec(&x);
        let sol = solve_field(&m, &b).expect("b is in the column space");
        let residual: Vec<RealElement> =
            m.mul_vec(&sol).iter().zip(&b).map(|(l, r)| l - r).collect();
        assert!(residual.iter().all(|e| e.is_zero()));
    }
}

#[test]
fn basis_columns_are_independent_and_maximal() {
    let mut rng = rng(13);
    for _ in 0..100 {
        let (m, _) = random_rank_matrix(&mut rng);
        let chosen = select_basis_columns(&m);
        assert_eq!(chosen.len(), rank_field(&m));
        let cols = m.columns();
        let sub: Vec<Vec<RealElement>> = chosen.iter().map(|&c| cols[c].clone()).collect();
        if !sub.is_empty() {
            assert_eq!(
                rank_field(&MatrixF::from_columns(&sub, m.rows()).unwrap()),
                sub.len()
            );
        }
    }
}

#[test]
fn rational_dependence_reconstructs_and_is_maximal() {
    let mut rng = rng(14);
    for _ in 0..200 {
        let len = rng.gen_range(1..=5);
        let count = rng.gen_range(1..=6);
        let base: Vec<Vec<Rational>> = (0..rng.gen_range(1..=3))
            .map(|_| (0..len).map(|_| common::rational(&mut rng, 6, 4)).collect())
            .collect();
        let vectors: Vec<Vec<Rational>> = (0..count)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    (0..len).map(|_| common::rational(&mut rng, 6, 4)).collect()
                } else {
                    let mut v = vec![Rational::zero(); len];
                    for b in &base {
                        let c = common::rational(&mut rng, 3, 2);
                        for (x, y) in v.iter_mut().zip(b) {
                            *x += &c * y;
                        }
                    }
                    v
                }
            })
            .collect();
        let rep = rational_dependence(&vectors);
        let ind = &rep.independent_indices;
        let as_matrix = |idx: &[usize]| {
            MatrixQ::from_columns(
                &idx.iter().map(|&i| vectors[i].clone()).collect::<Vec<_>>(),
                len,
            )
            .unwrap()
        };
        if !ind.is_empty() {
            assert_eq!(
                cdim_core::qlinalg::rank_rational(&as_matrix(ind)),
                ind.len()
            );
        }
        for (j, coeffs) in &rep.expressions {
            let mut rebuilt = vec![Rational::zero(); len];
            for (c, &i) in coeffs.iter().zip(ind) {
                for (x, y) in rebuilt.iter_mut().zip(&vectors[i]) {
                    *x += c * y;
                }
            }
            assert_eq!(&rebuilt, &vectors[*j]);
            let mut extended = ind.clone();
            extended.push(*j);
            assert!(cdim_core::qlinalg::rank_rational(&as_matrix(&extended)) < extended.len());
        }
        assert_eq!(ind.len() + rep.expressions.len(), count);
    }
}

#[test]
fn rank_int_matches_second_elimination_order() {
    let mut rng = rng(15);
    for _ in 0..200 {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let k = rng.gen_range(0..=rows.min(cols));
        let left = MatrixZ::from_fn(rows, k, |_, _| BigInt::from(rng.gen_range(-9..=9)));
        let right = MatrixZ::from_fn(k, cols, |_, _| BigInt::from(rng.gen_range(-9..=9)));
        let m = left.mul(&right);
        assert_eq!(rank_int(&m), rank_reverse_order(&m), "{m:?}");
    }
}

#[test]
fn column_echelon_is_unimodular_and_spans() {
    let mut rng = rng(16);
    for _ in 0..200 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=5);
        let m = MatrixZ::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-6..=6)));
        let ech = column_echelon(&m);
        assert_eq!(m.mul(&ech.transform), ech.echelon);
        assert!(
            determinant_int(&ech.transform) == BigInt::one()
                || determinant_int(&ech.transform) == -BigInt::one()
        );
        assert_eq!(ech.rank, rank_int(&m));
        for k in ech.kernel_basis() {
            let km = MatrixZ::from_columns(&[k], cols).unwrap();
            assert!(m.mul(&km).columns()[0].iter().all(|x| x.is_zero()));
        }
        assert_eq!(ech.kernel_basis().len(), cols - ech.rank);
    }
}
