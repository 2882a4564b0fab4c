#![allow(dead_code)]

use std::sync::Arc;

use msn::maps::LinearMap;
use msn::space::MultiSpace;
use msn::{Matrix, Rational, Vector};

pub fn q(s: &str) -> Rational {
    s.parse().expect("rational literal")
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn v(xs: &[i64]) -> Vector {
    xs.iter().map(|&x| int(x)).collect()
}

pub fn vq(xs: &[&str]) -> Vector {
    xs.iter().map(|x| q(x)).collect()
}

/// `(ℚ, |·|)` repeated over `length` levels.
pub fn line(length: usize) -> Arc<MultiSpace> {
    Arc::new(MultiSpace::from_functionals(1, vec![vec![v(&[1])]; length], true).unwrap())
}

pub fn space(dim: usize, levels: Vec<Vec<Vector>>) -> Arc<MultiSpace> {
    Arc::new(MultiSpace::from_functionals(dim, levels, false).unwrap())
}

pub fn map(x: &Arc<MultiSpace>, y: &Arc<MultiSpace>, rows: Vec<Vector>) -> LinearMap {
    LinearMap::new(x.clone(), y.clone(), Matrix::from_rows(x.dim(), rows).unwrap()).unwrap()
}
