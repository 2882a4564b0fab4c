mod common;

use std::sync::Arc;

use common::*;
use msn::amalgam::{pushout_nap, PushoutOptions};
use msn::maps::*;
use msn::space::{invariant_alpha, MultiSpace};
use msn::{Matrix, Rational, Vector};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn linf2() -> Arc<MultiSpace> {
    space(2, vec![vec![v(&[1, 0]), v(&[0, 1])]])
}

fn twice(x: &Arc<MultiSpace>) -> LinearMap {
    LinearMap::identity(x.clone()).scaled(&int(2))
}

#[test]
fn operator_seminorms() {
    assert_eq!(operator_seminorm(&twice(&line(1)), 0).unwrap(), Bound::Finite(int(2)));
    let half = space(2, vec![vec![v(&[1, 0])]]);
    let f = map(&half, &line(1), vec![v(&[0, 1])]);
    assert_eq!(operator_seminorm(&f, 0).unwrap(), Bound::Unbounded);
    let f = map(&linf2(), &line(1), vec![v(&[1, 1])]);
    let brute = [[1, 1], [1, -1], [-1, 1], [-1, -1]].iter().map(|p| int(p[0] + p[1]).abs()).max().unwrap();
    assert_eq!(operator_seminorm(&f, 0).unwrap(), Bound::Finite(brute));
    assert!(operator_seminorm(&f, 1).is_err());
}

#[test]
fn distortions() {
    let diag = map(&line(1), &linf2(), vec![v(&[1]), v(&[1])]);
    let d = distortion(&diag).unwrap();
    assert_eq!(d.minimal_delta, Some(int(0)));
    assert!(d.injective);

    let d = distortion(&twice(&line(1))).unwrap();
    assert_eq!(d.minimal_delta, Some(int(1)));
    assert_eq!(d.per_level[0].upper, Bound::Finite(int(2)));

    let second = space(2, vec![vec![v(&[0, 1])]]);
    let d = distortion(&map(&line(1), &second, vec![v(&[1]), v(&[0])])).unwrap();
    assert_eq!(d.per_level[0].lower, Lower::Constant(int(0)));
    assert_eq!(d.minimal_delta, None);
}

#[test]
fn embeddings() {
    assert!(is_embedding(&LinearMap::identity(line(1)), &int(0)).holds);
    let c = is_embedding(&twice(&line(1)), &q("1/2"));
    assert!(!c.holds);
    let w = c.witness.unwrap();
    assert_eq!(w.level, 0);
    assert_eq!(w.vector.len(), 1);
    assert!(w.vector[0] == "1" || w.vector[0] == "-1");
    assert!(is_embedding(&twice(&line(1)), &int(1)).holds);
    // seminorm-preserving but not injective
    let flat = space(2, vec![vec![v(&[1, 0])]]);
    let p = map(&flat, &line(1), vec![v(&[1, 0])]);
    assert!(!p.is_injective());
    assert!(!is_embedding(&p, &int(0)).holds);
}

#[test]
fn distances() {
    let id = LinearMap::identity(line(1));
    assert_eq!(map_distance(&id, &id, 0).unwrap(), Bound::Finite(int(0)));
    assert_eq!(map_distance(&id, &id.scaled(&int(-1)), 0).unwrap(), Bound::Finite(int(2)));
    let r = pushout_nap(&id, &id, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    let d = map_distance(&r.leg_y, &r.leg_z, 0).unwrap();
    assert_eq!(d, Bound::Finite(q("1/2")));
}

#[test]
fn isomorphisms() {
    let x = space(2, vec![vec![v(&[1, 0])], vec![v(&[0, 1])]]);
    match build_iso_from_invariant(&x, &x).unwrap() {
        IsoOutcome::Iso(h) => assert_eq!(h.matrix(), &Matrix::identity(2)),
        other => panic!("{other:?}"),
    }
    let y = space(2, vec![vec![v(&[0, 1])], vec![v(&[1, 0])]]);
    assert_eq!(invariant_alpha(&y).unwrap().entries(), &[2, 1, 1, 0]);
    let IsoOutcome::Iso(h) = build_iso_from_invariant(&x, &y).unwrap() else { panic!("expected an iso") };
    assert!(multi_bounded_norm(&h).unwrap().is_some());
    assert!(multi_bounded_norm(&inverse(&h).unwrap()).unwrap().is_some());
    assert_eq!(h.apply(&v(&[1, 0])).iter().filter(|c| !c.is_zero()).count(), 1);
    assert!(h.apply(&v(&[1, 0]))[0].is_zero());

    let nonsep = space(2, vec![vec![v(&[1, 0])], vec![v(&[1, 0])]]);
    assert_eq!(build_iso_from_invariant(&x, &nonsep).unwrap(), IsoOutcome::NoIso(NoIsoReason::InvariantMismatch));
}

#[test]
fn equal_invariants_without_iso() {
    // level kernels: three independent lines against three coplanar ones
    let indep = space(3, vec![vec![v(&[1, 0, 0]), v(&[0, 1, 0])], vec![v(&[0, 1, 0]), v(&[0, 0, 1])], vec![v(&[1, 0, 0]), v(&[0, 0, 1])]]);
    let coplanar = space(3, vec![vec![v(&[0, 1, 0]), v(&[0, 0, 1])], vec![v(&[1, 0, 0]), v(&[0, 0, 1])], vec![v(&[1, -1, 0]), v(&[0, 0, 1])]]);
    assert_eq!(invariant_alpha(&indep).unwrap(), invariant_alpha(&coplanar).unwrap());
    // any iso carries kernels onto kernels, so it would preserve the span dimension
    let kernels = |x: &MultiSpace| -> Vec<Vector> { (0..3).flat_map(|k| x.seminorm(k).kernel()).collect() };
    let span = |vs: Vec<Vector>| Matrix::from_rows(3, vs).unwrap().rank();
    assert_eq!((span(kernels(&indep)), span(kernels(&coplanar))), (3, 2));
    assert_eq!(
        build_iso_from_invariant(&indep, &coplanar).unwrap(),
        IsoOutcome::NoIso(NoIsoReason::KernelArrangement { certified: true })
    );
    assert_eq!(bm_upper_bound(&indep, &coplanar).unwrap(), None);
}

#[test]
fn banach_mazur_bounds() {
    let x = space(2, vec![vec![v(&[1, 0])], vec![v(&[0, 1])]]);
    assert_eq!(bm_upper_bound(&x, &x).unwrap(), Some(int(1)));
    let double = space(1, vec![vec![v(&[2])]]);
    // ‖id: X → Y‖ = 2 and ‖id: Y → X‖ = 1/2
    let id = map(&line(1), &double, vec![v(&[1])]);
    let back = map(&double, &line(1), vec![v(&[1])]);
    let oracle = operator_seminorm(&id, 0).unwrap().finite().unwrap().clone() * operator_seminorm(&back, 0).unwrap().finite().unwrap().clone();
    assert_eq!(oracle, int(1));
    assert_eq!(bm_upper_bound(&line(1), &double).unwrap(), Some(oracle));
    let nonsep = space(2, vec![vec![v(&[1, 0])], vec![v(&[1, 0])]]);
    assert_eq!(bm_upper_bound(&x, &nonsep).unwrap(), None);
}

#[test]
fn rescaling_makes_embeddings_expansive() {
    let delta = q("1/4");
    let x = space(2, vec![vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[1, 1])]]);
    let y = space(2, vec![vec![vq(&["4/5", "0"]), vq(&["0", "5/4"])], vec![vq(&["5/4", "5/4"])]]);
    let f = map(&x, &y, vec![v(&[1, 0]), v(&[0, 1])]);
    assert!(is_embedding(&f, &delta).holds);
    let x2 = Arc::new(MultiSpace::new(2, x.seminorms().iter().map(|s| rescale_seminorm(s, &delta)).collect(), false).unwrap());
    let f2 = f.with_domain(x2).unwrap();
    let dprime = int(2) * delta.clone() + delta.clone() * delta.clone();
    assert!(is_embedding(&f2, &dprime).holds);
    for l in distortion(&f2).unwrap().per_level {
        let Lower::Constant(c) = l.lower else { panic!("vacuous") };
        assert!(c >= Rational::one());
    }
}

fn nonzero(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-2i64..=2, dim).prop_filter("nonzero", |x| x.iter().any(|&a| a != 0)).prop_map(|x| v(&x))
}

fn small_space(dim: usize, length: usize) -> impl Strategy<Value = Arc<MultiSpace>> {
    prop::collection::vec(prop::collection::vec(nonzero(dim), 0..=3), length)
        .prop_map(move |levels| Arc::new(MultiSpace::from_functionals(dim, levels, false).unwrap()))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, cols), rows).prop_map(move |rs| Matrix::from_rows(cols, rs.iter().map(|r| v(r)).collect()).unwrap())
}

fn sum(a: &Bound, b: &Bound) -> Bound {
    match (a, b) {
        (Bound::Finite(x), Bound::Finite(y)) => Bound::Finite(x.clone() + y.clone()),
        _ => Bound::Unbounded,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_delta_iff_isometric(x in small_space(2, 2), y in small_space(2, 2), m in matrix(2, 2)) {
        let f = LinearMap::new(x, y, m).unwrap();
        let d = distortion(&f).unwrap();
        prop_assert_eq!(d.minimal_delta == Some(Rational::zero()) && d.injective, is_embedding(&f, &int(0)).holds);
    }

    #[test]
    fn identities_and_scalings(x in small_space(2, 2), c in 1i64..=3) {
        let id = LinearMap::identity(x.clone());
        prop_assert!(is_embedding(&id, &int(0)).holds);
        let d = distortion(&id.scaled(&int(c))).unwrap();
        let seminormed = x.seminorms().iter().any(|s| !s.is_zero());
        let want = if seminormed { int(c - 1) } else { int(0) };
        prop_assert_eq!(d.minimal_delta, Some(want.clone()));
        prop_assert_eq!(is_embedding(&id.scaled(&int(c)), &int(0)).holds, want.is_zero());
    }

    #[test]
    fn distance_is_a_pseudometric(x in small_space(2, 1), y in small_space(2, 1), a in matrix(2, 2), b in matrix(2, 2), c in matrix(2, 2)) {
        let (f, g, h) = (
            LinearMap::new(x.clone(), y.clone(), a).unwrap(),
            LinearMap::new(x.clone(), y.clone(), b).unwrap(),
            LinearMap::new(x, y, c).unwrap(),
        );
        let d = |p: &LinearMap, q: &LinearMap| map_distance(p, q, 0).unwrap();
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        prop_assert!(d(&f, &h) <= sum(&d(&f, &g), &d(&g, &h)));
        prop_assert_eq!(d(&f, &f), Bound::Finite(int(0)));
    }

    #[test]
    fn constructed_isos_respect_kernels(x in small_space(3, 2), y in small_space(3, 2)) {
        let alpha_equal = invariant_alpha(&x).unwrap() == invariant_alpha(&y).unwrap();
        if let IsoOutcome::Iso(h) = build_iso_from_invariant(&x, &y).unwrap() {
            prop_assert!(alpha_equal);
            // h(⋂_{k∈s} ker_X) = ⋂_{k∈s} ker_Y for every s
            for mask in 1usize..4 {
                let ker = |z: &MultiSpace| -> Vec<Vector> {
                    let rows: Vec<Vector> = (0..2).filter(|k| mask >> k & 1 == 1).flat_map(|k| z.seminorm(k).functionals().to_vec()).collect();
                    if rows.is_empty() { Matrix::identity(3).row_vecs() } else { Matrix::from_rows(3, rows).unwrap().kernel() }
                };
                let image: Vec<Vector> = ker(&x).iter().map(|u| h.apply(u)).collect();
                let target = ker(&y);
                prop_assert_eq!(image.len(), target.len());
                let mut both = image.clone();
                both.extend(target.iter().cloned());
                let r = |vs: Vec<Vector>| if vs.is_empty() { 0 } else { Matrix::from_rows(3, vs).unwrap().rank() };
                prop_assert_eq!(r(both), r(target));
            }
        } else if alpha_equal {
            let certified = IsoOutcome::NoIso(NoIsoReason::KernelArrangement { certified: true });
            prop_assert_eq!(build_iso_from_invariant(&x, &y).unwrap(), certified);
        }
    }

    #[test]
    fn basis_changes_are_isomorphic(x in small_space(3, 3), m in matrix(3, 3)) {
        prop_assume!(m.rank() == 3);
        let m_inv = m.inverse().unwrap();
        let levels = (0..3).map(|k| x.seminorm(k).functionals().iter().map(|phi| m_inv.pullback(phi)).collect()).collect();
        let y = Arc::new(MultiSpace::from_functionals(3, levels, false).unwrap());
        prop_assert!(matches!(build_iso_from_invariant(&x, &y).unwrap(), IsoOutcome::Iso(_)));
    }
}
