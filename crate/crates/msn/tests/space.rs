mod common;

use std::sync::Arc;

use common::*;
use msn::space::{extend_with_norm, graded_closure, invariant_alpha, is_separated, product_space, truncate, MultiSpace, ProductMode};
use msn::{Error, Matrix, Rational, Vector};
use num_traits::Zero;
use proptest::prelude::*;

fn coords2() -> Arc<MultiSpace> {
    space(2, vec![vec![v(&[1, 0])], vec![v(&[0, 1])]])
}

#[test]
fn alpha_examples() {
    assert_eq!(invariant_alpha(&coords2()).unwrap().entries(), &[2, 1, 1, 0]);
    let norms = space(2, vec![vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[1, 1]), v(&[1, -1])]]);
    assert_eq!(invariant_alpha(&norms).unwrap().entries(), &[2, 0, 0, 0]);
    let x = space(3, vec![vec![v(&[1, 0, 0])], vec![v(&[1, 1, 0])]]);
    assert_eq!(invariant_alpha(&x).unwrap().entries(), &[3, 2, 2, 1]);
    assert_eq!(invariant_alpha(&x).unwrap().get_set(&[0, 1]), 1);
}

#[test]
fn separation() {
    assert!(is_separated(&coords2()));
    assert!(!is_separated(&space(2, vec![vec![v(&[1, 0])]])));
    assert!(!is_separated(&space(1, vec![vec![]])));
}

#[test]
fn extending() {
    let x = space(2, vec![vec![v(&[1, 0])]]);
    let e = extend_with_norm(&x);
    assert_eq!(e.length(), 2);
    assert!(e.is_separated());
    assert_eq!(e.seminorm(0), x.seminorm(0));

    let e = extend_with_norm(&coords2());
    assert_eq!(e.length(), 3);
    assert!(e.is_separated());

    let g = Arc::new(MultiSpace::from_functionals(2, vec![vec![v(&[2, 0])]], true).unwrap());
    let e = extend_with_norm(&g);
    assert!(e.graded());
    // last level dominates the previous one: every old functional has dual gauge ≤ 1
    for phi in e.seminorm(0).functionals() {
        assert!(e.seminorm(1).dual_gauge(phi).is_some_and(|c| c <= int(1)));
    }
    assert_eq!(e.eval(1, &v(&[1, 1])).unwrap(), int(2));
}

#[test]
fn truncating() {
    let x = space(3, vec![vec![v(&[1, 0, 0])], vec![v(&[0, 1, 0])], vec![v(&[0, 0, 1])]]);
    assert_eq!(truncate(&x, 3).unwrap(), *x);
    let t = truncate(&x, 1).unwrap();
    assert_eq!(t.length(), 1);
    assert_eq!(t.seminorm(0), x.seminorm(0));
    assert!(!truncate(&coords2(), 1).unwrap().is_separated());
    assert!(matches!(truncate(&x, 0), Err(Error::BadLength { .. })));
    assert!(matches!(truncate(&x, 4), Err(Error::BadLength { .. })));
}

#[test]
fn graded_closures() {
    let g = Arc::new(MultiSpace::from_functionals(1, vec![vec![v(&[1])], vec![v(&[2])]], true).unwrap());
    let c = graded_closure(&g);
    for x in [-3, 1, 7] {
        for n in 0..2 {
            assert_eq!(c.eval(n, &v(&[x])).unwrap(), g.eval(n, &v(&[x])).unwrap());
        }
    }
    let x = space(2, vec![vec![v(&[0, 1])], vec![v(&[1, 0])]]);
    let c = graded_closure(&x);
    assert!(c.graded());
    assert_eq!(c.eval(1, &v(&[3, -5])).unwrap(), int(5));
    assert_eq!(c.eval(1, &v(&[-7, 5])).unwrap(), int(7));
}

#[test]
fn mislabeled_graded_space_is_rejected() {
    let r = MultiSpace::from_functionals(1, vec![vec![v(&[2])], vec![v(&[1])]], true);
    assert!(matches!(r, Err(Error::NotGraded(..))));
}

#[test]
fn products() {
    let f = (*line(1)).clone();
    let p = product_space(&[f.clone(), f.clone()], ProductMode::Coordinate).unwrap();
    assert_eq!(p.eval(0, &v(&[3, 5])).unwrap(), int(3));
    assert_eq!(p.eval(1, &v(&[3, 5])).unwrap(), int(5));
    let p = product_space(&[f.clone(), f.clone()], ProductMode::GradedMax).unwrap();
    assert_eq!(p.eval(0, &v(&[3, 5])).unwrap(), int(3));
    assert_eq!(p.eval(1, &v(&[3, 5])).unwrap(), int(5));
    assert_eq!(p.eval(1, &v(&[5, 3])).unwrap(), int(5));
    let single = product_space(std::slice::from_ref(&f), ProductMode::Coordinate).unwrap();
    assert_eq!(single, f);
}

fn nonzero(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-2i64..=2, dim).prop_filter("nonzero", |x| x.iter().any(|&a| a != 0)).prop_map(|x| v(&x))
}

fn random_space() -> impl Strategy<Value = MultiSpace> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(d, l)| {
        prop::collection::vec(prop::collection::vec(nonzero(d), 0..=3), l)
            .prop_map(move |levels| MultiSpace::from_functionals(d, levels, false).unwrap())
    })
}

/// `dim ⋂_{k∈s} ker` by rank–nullity on the stacked functionals.
fn alpha_oracle(x: &MultiSpace) -> Vec<usize> {
    (0..1usize << x.length())
        .map(|mask| {
            let rows: Vec<Vector> = (0..x.length()).filter(|k| mask >> k & 1 == 1).flat_map(|k| x.seminorm(k).functionals().to_vec()).collect();
            x.dim() - if rows.is_empty() { 0 } else { Matrix::from_rows(x.dim(), rows).unwrap().rank() }
        })
        .collect()
}

fn shear(d: usize, i: usize, j: usize, c: i64) -> Matrix {
    let mut m = Matrix::identity(d);
    if i != j {
        m.set(i, j, int(c));
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn alpha_is_monotone(x in random_space()) {
        let a = invariant_alpha(&x).unwrap();
        let oracle = alpha_oracle(&x);
        prop_assert_eq!(a.entries(), oracle.as_slice());
        prop_assert_eq!(a.get(0), x.dim());
        for s in 0..1usize << x.length() {
            for t in 0..1usize << x.length() {
                if s & t == s {
                    prop_assert!(a.get(s) >= a.get(t));
                }
            }
        }
    }

    #[test]
    fn alpha_survives_basis_change(x in random_space(), i in 0usize..3, j in 0usize..3, c in -2i64..=2) {
        let d = x.dim();
        let t = shear(d, i % d, j % d, c);
        let t_inv = t.inverse().unwrap();
        let levels = (0..x.length()).map(|k| x.seminorm(k).functionals().iter().map(|phi| t_inv.pullback(phi)).collect()).collect();
        let y = MultiSpace::from_functionals(d, levels, false).unwrap();
        prop_assert_eq!(invariant_alpha(&x).unwrap(), invariant_alpha(&y).unwrap());
    }

    #[test]
    fn truncate_commutes_with_closure(x in random_space(), k in 1usize..=3, pts in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 20)) {
        let k = k.min(x.length());
        let a = truncate(&graded_closure(&x), k).unwrap();
        let b = graded_closure(&truncate(&x, k).unwrap());
        prop_assert!(b.graded());
        for p in &pts {
            let p = v(&p[..x.dim()]);
            for n in 0..k {
                prop_assert_eq!(a.eval(n, &p).unwrap(), b.eval(n, &p).unwrap());
                let running: Rational = (0..=n).map(|m| x.eval(m, &p).unwrap()).max().unwrap();
                prop_assert_eq!(b.eval(n, &p).unwrap(), running);
            }
        }
    }

    #[test]
    fn extension_separates(x in random_space()) {
        let e = extend_with_norm(&x);
        prop_assert!(e.is_separated());
        prop_assert_eq!(e.length(), x.length() + 1);
        prop_assert_eq!(&e.seminorms()[..x.length()], x.seminorms());
        prop_assert!(e.seminorm(x.length()).kernel().is_empty());
        prop_assert!(invariant_alpha(&e).unwrap().get((1 << e.length()) - 1).is_zero());
    }
}
