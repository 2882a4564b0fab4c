mod common;

use common::*;
use msn::amalgam::*;
use msn::maps::{is_embedding, map_distance, Bound, LinearMap};
use msn::space::MultiSpace;
use msn::{Error, Rational, Vector};
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::sync::Arc;

fn id_line() -> (LinearMap, LinearMap) {
    let x = line(1);
    (LinearMap::identity(x.clone()), LinearMap::identity(x))
}

fn sorted(mut fs: Vec<Vector>) -> Vec<Vector> {
    fs.sort();
    fs
}

/// `inf_x |a − x| + |b + x| + c|x|` by checking the breakpoints.
fn line_oracle(a: &Rational, b: &Rational, c: &Rational) -> Rational {
    let f = |x: &Rational| {
        let t1 = a.clone() - x.clone();
        let t2 = b.clone() + x.clone();
        num_traits::Signed::abs(&t1) + num_traits::Signed::abs(&t2) + c.clone() * num_traits::Signed::abs(x)
    };
    [a.clone(), -b.clone(), Rational::zero()].iter().map(f).min().unwrap()
}

#[test]
fn line_pushout_hexagon() {
    let (f, g) = id_line();
    let r = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    let s = r.w.seminorm(0);
    let expected = sorted(vec![v(&[1, 1]), vq(&["1", "1/2"]), vq(&["1/2", "1"])]);
    let got = sorted(s.functionals().to_vec());
    assert_eq!(got.len(), 3);
    // functionals are stored up to sign
    for (e, g) in expected.iter().zip(&got) {
        let neg: Vector = e.iter().map(|x| -x.clone()).collect();
        assert!(g == e || *g == neg, "{:?}", got);
    }
    assert_eq!(s.eval_unchecked(&v(&[1, -1])), q("1/2"));
    assert_eq!(s.eval_unchecked(&v(&[1, 0])), int(1));
    assert_eq!(r.certificate, vec![Bound::Finite(q("1/2"))]);
    assert!(r.within_bound());
    assert!(is_embedding(&r.leg_y, &int(0)).holds);
    assert!(is_embedding(&r.leg_z, &int(0)).holds);
}

#[test]
fn line_pushout_matches_breakpoint_oracle() {
    let (f, g) = id_line();
    let r = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    for a in -3..=3 {
        for b in -3..=3 {
            let y = v(&[a, b]);
            assert_eq!(r.w.seminorm(0).eval_unchecked(&y), line_oracle(&int(a), &int(b), &q("1/2")));
        }
    }
}

#[test]
fn compact_mode_agrees_on_the_line() {
    let (f, g) = id_line();
    let full = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    let compact = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/2")).mode(AmalgamMode::Compact)).unwrap();
    assert!(compact.w.is_separated());
    assert!(compact.within_bound());
    for y in [v(&[1, -1]), v(&[2, 1]), v(&[0, 1])] {
        assert!(compact.w.seminorm(0).eval_unchecked(&y) <= full.w.seminorm(0).eval_unchecked(&y));
    }
}

#[test]
fn trivial_base_gives_the_joint_embedding() {
    let x = Arc::new(MultiSpace::trivial(1));
    let y = line(1);
    let f = map(&x, &y, vec![vec![]]);
    let r = pushout_nap(&f, &f, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    assert_eq!(r.certificate, vec![Bound::Finite(int(0))]);
    assert_eq!(r.w.seminorm(0).eval_unchecked(&v(&[1, -1])), int(2));
    assert!(is_embedding(&r.leg_y, &int(0)).holds);
    assert!(is_embedding(&r.leg_z, &int(0)).holds);
}

#[test]
fn eps_must_be_positive() {
    let (f, g) = id_line();
    assert!(matches!(pushout_nap(&f, &g, &PushoutOptions::new(int(0), int(0))), Err(Error::EpsNonPositive)));
}

#[test]
fn non_embedding_is_rejected() {
    let x = line(1);
    let f = map(&x, &x, vec![v(&[2])]);
    let g = LinearMap::identity(x);
    let e = pushout_nap(&f, &g, &PushoutOptions::new(q("1/2"), q("1/2"))).unwrap_err();
    assert!(matches!(e, Error::NotAnEmbedding { .. }));
}

#[test]
fn longer_y_is_swapped() {
    let x = line(1);
    let y = line(2);
    let z = line(1);
    let f = map(&x, &y, vec![v(&[1])]);
    let g = map(&x, &z, vec![v(&[1])]);
    let r = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    assert_eq!(r.w.length(), 2);
    assert_eq!(r.leg_y.domain().length(), 2);
    assert!(is_embedding(&r.leg_y, &int(0)).holds);
    assert!(is_embedding(&r.leg_z, &int(0)).holds);
}

#[test]
fn rescale_examples() {
    let x = line(1);
    assert_eq!(rescale_expansive(&x, &int(0)).unwrap(), *x);
    let r = rescale_expansive(&x, &int(1)).unwrap();
    assert_eq!(r.seminorm(0).eval_unchecked(&v(&[1])), q("1/2"));
    let half = Arc::new(rescale_expansive(&x, &q("1/2")).unwrap());
    let f = map(&half, &x, vec![v(&[1])]);
    let d = msn::maps::distortion(&f).unwrap();
    assert_eq!(d.per_level[0].upper, Bound::Finite(q("3/2")));
    assert!(expansive_delta(&q("1/2")) == q("5/4"));
}

#[test]
fn n_embedding_sum_levels() {
    let x = line(2);
    let f = LinearMap::identity(x.clone());
    let r = pushout_n_embedding(&f, &f, 1, &q("1/2")).unwrap();
    assert!(r.certificate[0].le(&q("1/2")));
    assert_eq!(r.w.seminorm(1).eval_unchecked(&v(&[1, -1])), int(2));
    assert!(is_embedding(&r.leg_y, &int(0)).holds);
    assert!(is_embedding(&r.leg_z, &int(0)).holds);
}

#[test]
fn n_embedding_rejects_distortion_below_n() {
    let x = line(2);
    let y = space(1, vec![vec![v(&[2])], vec![v(&[1])]]);
    let f = map(&x, &y, vec![v(&[1])]);
    let g = LinearMap::identity(x);
    assert!(matches!(
        pushout_n_embedding(&f, &g, 1, &q("1/2")),
        Err(Error::ShapeMismatch(_)) | Err(Error::NotAnNEmbedding { .. })
    ));
}

#[test]
fn product_amalgam_matches_single_pushout_on_the_line() {
    let (f, g) = id_line();
    let p = product_amalgam(&f, &g, &int(0), &q("1/2"), &normed_pushout).unwrap();
    let s = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    assert_eq!(p.certificate, s.certificate);
}

#[test]
fn product_amalgam_over_trivial_base() {
    let x = Arc::new(MultiSpace::trivial(1));
    let y = line(1);
    let f = map(&x, &y, vec![vec![]]);
    let r = product_amalgam(&f, &f, &int(0), &q("1/2"), &normed_pushout).unwrap();
    assert_eq!(r.w.dim(), 2);
    assert_eq!(r.w.seminorm(0).eval_unchecked(&v(&[3, -2])), int(5));
}

#[test]
fn product_amalgam_uneven_lengths() {
    let x = line(1);
    let y = line(1);
    let z = space(1, vec![vec![v(&[1])], vec![v(&[2])]]);
    let f = map(&x, &y, vec![v(&[1])]);
    let g = map(&x, &z, vec![v(&[1])]);
    let r = product_amalgam(&f, &g, &int(0), &q("1/2"), &normed_pushout).unwrap();
    assert!(is_embedding(&r.leg_y, &int(0)).holds);
    assert!(is_embedding(&r.leg_z, &int(0)).holds);
    assert!(r.within_bound());
}

#[test]
fn product_amalgam_needs_separated_inputs() {
    let x = space(2, vec![vec![v(&[1, 0])]]);
    let f = LinearMap::identity(x.clone());
    assert!(matches!(product_amalgam(&f, &f, &int(0), &q("1/2"), &normed_pushout), Err(Error::NotSeparated)));
}

#[test]
fn multi_amalgam_cases() {
    let y = line(1);
    let empty = multi_amalgam_ap(&y, &[], &q("1/2"), AmalgamMode::Full, true).unwrap();
    assert_eq!(empty.z, y);
    assert_eq!(empty.i_map, LinearMap::identity(y.clone()));

    let x = line(1);
    let pair = EmbeddingPair {
        gamma: LinearMap::identity(x.clone()),
        eta: map(&x, &y, vec![v(&[-1])]),
        delta: int(0),
    };
    let one = multi_amalgam_ap(&y, &[pair.clone()], &q("1/2"), AmalgamMode::Full, true).unwrap();
    let single = pushout_nap(&pair.gamma, &pair.eta, &PushoutOptions::new(int(0), q("1/2"))).unwrap();
    assert_eq!(one.certificates[0], single.certificate);

    let two = multi_amalgam_ap(&y, &[pair.clone(), pair], &q("1/2"), AmalgamMode::Full, true).unwrap();
    for c in &two.certificates {
        assert!(c.iter().all(|b| b.le(&q("1/2"))));
    }
    assert!(is_embedding(&two.i_map, &int(0)).holds);
    for j in &two.js {
        assert!(is_embedding(j, &int(0)).holds);
    }
}

fn small_space(dim: usize, length: usize, seed: &[i8]) -> Arc<MultiSpace> {
    let mut it = seed.iter().cycle();
    let levels = (0..length)
        .map(|_| {
            let mut fs: Vec<Vector> = (0..dim).map(|i| {
                let mut u = vec![Rational::zero(); dim];
                u[i] = Rational::one();
                u
            }).collect();
            fs.push((0..dim).map(|_| int(*it.next().unwrap() as i64)).collect());
            fs
        })
        .collect();
    space(dim, levels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dual_matches_primal(
        seed in proptest::collection::vec(-2i8..=2, 6),
        fm in proptest::collection::vec(-2i8..=2, 2),
        delta_q in 0u8..2,
        pts in proptest::collection::vec(-3i64..=3, 4 * 8),
    ) {
        let delta = if delta_q == 0 { int(0) } else { q("1/4") };
        let x = line(2);
        let y = small_space(2, 2, &seed);
        let z = small_space(2, 2, &seed[3..]);
        let col: Vec<i64> = fm.iter().map(|&c| c as i64).collect();
        let f = map(&x, &y, vec![v(&[col[0]]), v(&[col[1]])]);
        let g = map(&x, &z, vec![v(&[1]), v(&[col[0]])]);
        if !is_embedding(&f, &delta).holds || !is_embedding(&g, &delta).holds {
            return Ok(());
        }
        let eps = q("1/3");
        let r = pushout_nap(&f, &g, &PushoutOptions::new(delta.clone(), eps.clone())).unwrap();
        prop_assert!(r.within_bound());
        prop_assert!(is_embedding(&r.leg_y, &int(0)).holds);
        prop_assert!(is_embedding(&r.leg_z, &int(0)).holds);
        for n in 0..2 {
            for p in pts.chunks(4) {
                let (yy, zz) = (v(&p[..2]), v(&p[2..]));
                let w: Vector = yy.iter().chain(&zz).cloned().collect();
                let primal = primal_pushout_value(&f, &g, &delta, &eps, n, &yy, &zz).unwrap();
                prop_assert_eq!(r.w.seminorm(n).eval_unchecked(&w), primal);
            }
        }
    }

    #[test]
    fn graded_mode_is_graded(a in 1i64..=3, b in 1i64..=3) {
        let x = line(2);
        let y = Arc::new(MultiSpace::from_functionals(1, vec![vec![v(&[1])], vec![v(&[a])]], true).unwrap());
        let z = Arc::new(MultiSpace::from_functionals(1, vec![vec![v(&[1])], vec![v(&[b])], vec![v(&[b + 1])]], true).unwrap());
        let f = map(&x, &y, vec![v(&[1])]);
        let g = map(&x, &z, vec![v(&[1])]);
        let d = Rational::from_integer((a.max(b) - 1).into());
        let r = pushout_nap(&f, &g, &PushoutOptions::new(d, q("1/2")).graded(true)).unwrap();
        prop_assert!(r.w.is_graded());
        prop_assert!(r.w.as_ref().clone().with_graded_recomputed().graded());
    }
}

#[test]
fn n_embedding_certificate_levels() {
    let x = line(3);
    let f = LinearMap::identity(x.clone());
    let r = pushout_n_embedding(&f, &f, 2, &q("1/2")).unwrap();
    assert_eq!(r.certificate.len(), 2);
    for n in 0..2 {
        assert_eq!(map_distance(&r.leg_y, &r.leg_z, n).unwrap(), r.certificate[n]);
    }
}

#[test]
fn separated_variant_is_separated() {
    let x = line(1);
    let y = space(2, vec![vec![v(&[1, 0])]]);
    let f = map(&x, &y, vec![v(&[1]), v(&[0])]);
    let g = LinearMap::identity(x.clone());
    let plain = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/4"))).unwrap();
    assert!(!plain.w.is_separated());
    let sep = pushout_nap(&f, &g, &PushoutOptions::new(int(0), q("1/4")).separated(true)).unwrap();
    assert!(sep.w.is_separated());
    assert!(is_embedding(&sep.leg_y, &int(0)).holds && is_embedding(&sep.leg_z, &int(0)).holds);
    assert!(sep.certificate.iter().all(|b| b.le(&q("1/4"))));
}
