//! Dense reference implementations written independently of the library:
//! every train and operator is expanded entry by entry from its cores.

#![allow(dead_code)]

use ndarray::{Array1, Array2, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tteig::rounding::{round_svd, RoundingStrategy};
use tteig::{expectation, TTMatrix, TensorTrain, C64};

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Mixed-radix digits of `flat`, first mode most significant.
fn digits(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    idx
}

/// Full vector of a train, computed as a product of core slices per entry.
pub fn dense_vector(v: &TensorTrain) -> Array1<C64> {
    let dims = v.mode_sizes();
    let total: usize = dims.iter().product();
    Array1::from_shape_fn(total, |flat| {
        let idx = digits(flat, &dims);
        let mut row = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
        for (core, &i) in v.cores().iter().zip(&idx) {
            row = row.dot(&core.slice(ndarray::s![.., i, ..]));
        }
        row[[0, 0]]
    })
}

/// Full matrix of an operator, entry by entry.
pub fn dense_matrix(a: &TTMatrix) -> Array2<C64> {
    let rows = a.row_sizes();
    let cols = a.col_sizes();
    let (nr, nc) = (rows.iter().product(), cols.iter().product());
    Array2::from_shape_fn((nr, nc), |(i, j)| {
        let (ri, ci) = (digits(i, &rows), digits(j, &cols));
        let mut acc = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
        for (k, core) in a.cores().iter().enumerate() {
            acc = acc.dot(&core.slice(ndarray::s![.., ri[k], ci[k], ..]));
        }
        acc[[0, 0]]
    })
}

pub fn vnorm(x: &Array1<C64>) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vdot(x: &Array1<C64>, y: &Array1<C64>) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub struct Instance {
    pub dims: Vec<usize>,
    pub x: TensorTrain,
    pub y: TensorTrain,
    pub a: TTMatrix,
    pub alpha: C64,
}

fn random_ranks(d: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut r: Vec<usize> = (0..=d).map(|_| rng.gen_range(1..=3)).collect();
    r[0] = 1;
    r[d] = 1;
    r
}

/// Random train with unnormalized, uneven cores.
fn random_train(dims: &[usize], ranks: &[usize], rng: &mut ChaCha8Rng) -> TensorTrain {
    let cores = (0..dims.len())
        .map(|k| ndarray::Array3::from_shape_simple_fn((ranks[k], dims[k], ranks[k + 1]), || gaussian(rng)))
        .collect();
    TensorTrain::new(cores).unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let d = rng.gen_range(1..=4);
    let dims: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=4)).collect();
    let x = random_train(&dims, &random_ranks(d, rng), rng);
    let y = random_train(&dims, &random_ranks(d, rng), rng);
    let ra = random_ranks(d, rng);
    let cores = (0..d).map(|k| Array4::from_shape_simple_fn((ra[k], dims[k], dims[k], ra[k + 1]), || gaussian(rng))).collect();
    let a = TTMatrix::new(cores).unwrap();
    Instance { dims, x, y, a, alpha: gaussian(rng) }
}

/// Largest discrepancy found over `count` random instances, relative to the
/// size of the reference quantity. Names the operation that produced it.
pub struct SuiteResult {
    pub worst_relative: f64,
    pub worst_op: &'static str,
    /// `|reported − ‖v − round(v)‖|` for SVD rounding.
    pub worst_round_gap: f64,
}

pub fn oracle_suite(count: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = SuiteResult { worst_relative: 0.0, worst_op: "", worst_round_gap: 0.0 };
    let mut note = |op: &'static str, got: f64, scale: f64| {
        let rel = got / scale.max(1e-300);
        if rel > res.worst_relative {
            res.worst_relative = rel;
            res.worst_op = op;
        }
    };
    for _ in 0..count {
        let inst = random_instance(&mut rng);
        let (x, y, a) = (&inst.x, &inst.y, &inst.a);
        let (dx, dy, da) = (dense_vector(x), dense_vector(y), dense_matrix(a));
        let (nx, ny) = (vnorm(&dx), vnorm(&dy));

        note("to_vector", vnorm(&(&x.to_vector().unwrap() - &dx)), nx);
        let idx: Vec<usize> = inst.dims.iter().map(|&n| n - 1).collect();
        let flat = idx.iter().zip(&inst.dims).fold(0, |acc, (&i, &n)| acc * n + i);
        note("entry", (x.entry(&idx) - dx[flat]).norm(), nx);
        note("inner", (x.inner(y).unwrap() - vdot(&dx, &dy)).norm(), nx * ny);
        note("norm", (x.norm() - nx).abs(), nx);
        note("scale", vnorm(&(&dense_vector(&x.scale(inst.alpha)) - &dx.mapv(|z| z * inst.alpha))), inst.alpha.norm() * nx);
        note("add", vnorm(&(&dense_vector(&x.add(y).unwrap()) - &(&dx + &dy))), nx + ny);
        let coeffs = [inst.alpha, C64::new(-0.5, 0.25)];
        let comb = TensorTrain::combination(&[x.clone(), y.clone()], &coeffs).unwrap();
        let want = &dx.mapv(|z| z * coeffs[0]) + &dy.mapv(|z| z * coeffs[1]);
        note("combination", vnorm(&(&dense_vector(&comb) - &want)), inst.alpha.norm() * nx + 0.56 * ny);
        let ax = da.dot(&dx);
        let na = da.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        note("apply", vnorm(&(&dense_vector(&a.apply(x).unwrap()) - &ax)), na * nx);
        note("to_dense", (&a.to_dense().unwrap() - &da).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), na);
        note("expectation", (expectation(y, a, x).unwrap() - vdot(&dy, &ax)).norm(), ny * na * nx);
        let rebuilt = TensorTrain::from_vector(&dx, &inst.dims, 0.0, None).unwrap();
        note("from_vector", vnorm(&(&dense_vector(&rebuilt) - &dx)), nx);
        for center in [0, inst.dims.len() - 1] {
            let (o, _) = x.orthogonalize(center).unwrap();
            note("orthogonalize", vnorm(&(&dense_vector(&o) - &dx)), nx);
        }
        for cap in [1, 2] {
            let (t, err) = round_svd(&comb, &RoundingStrategy::svd(Some(cap), 0.0));
            let gap = (err - vnorm(&(&dense_vector(&t) - &want))).abs() / vnorm(&want).max(1.0);
            res.worst_round_gap = res.worst_round_gap.max(gap);
        }
    }
    res
}
