//! Independent reference implementations shared by the integration tests.
//! They follow the definitions literally, with plain loops and no shared
//! code from the crate.

#![allow(dead_code)]

use crg::stats::SubsetEmbeddings;
use crg::EmbeddingVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Views = Vec<Vec<Vec<f64>>>;

pub fn cos(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for k in 0..u.len() {
        dot += u[k] * v[k];
        uu += u[k] * u[k];
        vv += v[k] * v[k];
    }
    dot / (uu.sqrt() * vv.sqrt())
}

fn mae(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]).abs();
    }
    s / a.len() as f64
}

/// Cosine similarities of all image pairs `i < j` under view `v`.
fn relation_set(views: &Views, v: usize) -> Vec<f64> {
    let n = views.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(cos(&views[i][v], &views[j][v]));
        }
    }
    out
}

/// `[S_U^gg, S_U^ll, S_U^gl, S_B^gg, S_B^ll, S_B^gl]` by direct summation.
pub fn naive_sets(global: &Views, local: &Views) -> [f64; 6] {
    let d = global.len() as f64;
    let m = global[0].len();
    let n = local[0].len();
    let (mf, nf) = (m as f64, n as f64);

    let mut gg = 0.0;
    let mut ll = 0.0;
    let mut gl = 0.0;
    for i in 0..global.len() {
        for a in 0..m {
            for b in a + 1..m {
                gg += cos(&global[i][a], &global[i][b]);
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                ll += cos(&local[i][a], &local[i][b]);
            }
        }
        for a in 0..m {
            for b in 0..n {
                gl += cos(&global[i][a], &local[i][b]);
            }
        }
    }
    let s_u_gg = 2.0 / (d * mf * (mf - 1.0)) * gg;
    let s_u_ll = 2.0 / (d * nf * (nf - 1.0)) * ll;
    let s_u_gl = 1.0 / (d * mf * nf) * gl;

    let g: Vec<Vec<f64>> = (0..m).map(|v| relation_set(global, v)).collect();
    let l: Vec<Vec<f64>> = (0..n).map(|v| relation_set(local, v)).collect();
    let mut bgg = 0.0;
    let mut bll = 0.0;
    let mut bgl = 0.0;
    for a in 0..m {
        for b in a + 1..m {
            bgg += mae(&g[a], &g[b]);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            bll += mae(&l[a], &l[b]);
        }
    }
    for a in 0..m {
        for b in 0..n {
            bgl += mae(&g[a], &l[b]);
        }
    }
    [
        s_u_gg,
        s_u_ll,
        s_u_gl,
        -2.0 / (mf * (mf - 1.0)) * bgg,
        -2.0 / (nf * (nf - 1.0)) * bll,
        -1.0 / (mf * nf) * bgl,
    ]
}

/// A random subset with `2 <= n <= max_n` images, `2 <= M <= max_m`,
/// `2 <= N <= max_n_views`, `1 <= dim <= max_dim`.
pub fn random_views(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_m: usize,
    max_n_views: usize,
    max_dim: usize,
) -> (Views, Views) {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(2..=max_m);
    let k = rng.random_range(2..=max_n_views);
    let dim = rng.random_range(1..=max_dim);
    let vector = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            if v.iter().any(|x: &f64| x.abs() > 1e-3) {
                return v;
            }
        }
    };
    let global = (0..n).map(|_| (0..m).map(|_| vector(rng)).collect()).collect();
    let local = (0..n).map(|_| (0..k).map(|_| vector(rng)).collect()).collect();
    (global, local)
}

pub fn subset(global: &Views, local: &Views) -> SubsetEmbeddings {
    let wrap = |views: &Views| -> Vec<Vec<EmbeddingVector>> {
        views
            .iter()
            .map(|row| row.iter().map(|v| EmbeddingVector::new(v.clone()).unwrap()).collect())
            .collect()
    };
    let ids = (0..global.len()).map(|i| format!("img{i}")).collect();
    SubsetEmbeddings::new(ids, wrap(global), wrap(local)).unwrap()
}

pub fn sets_array(s: &crg::SimilaritySets) -> [f64; 6] {
    [s.s_u_gg, s.s_u_ll, s.s_u_gl, s.s_b_gg, s.s_b_ll, s.s_b_gl]
}

/// AUROC by counting every positive/negative pair.
pub fn exhaustive_auroc(scores: &[(f64, bool)]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for p in scores.iter().filter(|s| s.1) {
        for q in scores.iter().filter(|s| !s.1) {
            pairs += 1.0;
            if p.0 > q.0 {
                wins += 1.0;
            } else if p.0 == q.0 {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Published one-tailed critical values `t` with `P(T > t) = alpha`:
/// `(df, [alpha 0.05, 0.025, 0.01, 0.005])`.
pub const CRITICAL_VALUES: [(f64, [f64; 4]); 5] = [
    (1.0, [6.314, 12.706, 31.821, 63.657]),
    (4.0, [2.132, 2.776, 3.747, 4.604]),
    (10.0, [1.812, 2.228, 2.764, 3.169]),
    (30.0, [1.697, 2.042, 2.457, 2.750]),
    (100.0, [1.660, 1.984, 2.364, 2.626]),
];
pub const TAIL_PROBS: [f64; 4] = [0.05, 0.025, 0.01, 0.005];

/// Solves `P(T > t) = alpha` for `t` by bisection on the crate's survival
/// function.
pub fn invert_upper_tail(alpha: f64, df: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1000.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if crg::ttest::t_sf(mid, df) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
