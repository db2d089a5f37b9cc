//! Constrained quadratic program for the window tap weights.
//!
//! The estimator needs `argmin_w  wᵀHw − 2fᵀw` subject to
//!
//! * non-negativity: `w_k ≥ 0`,
//! * monotonicity:  `w_k ≥ w_{k+1}`,
//! * normality:     `Σ w_k = 1/2`.
//!
//! The constraint set is tiny and structured, so instead of a generic QP
//! routine we substitute `w_k = Σ_{j≥k} v_j`, which turns monotonicity and
//! non-negativity into the non-negative orthant `v ≥ 0` and normality into
//! a single equality `Σ (j+1)·v_j = 1/2`, and run a primal active-set
//! method from the feasible equal-weights point. Each step solves one
//! small KKT system; the objective never increases, so the result always
//! dominates equal weights. Solutions are certified with
//! [`kkt_residual`].

use thiserror::Error;

use crate::estimation::TapWeights;

#[derive(Debug, Error)]
pub enum QpError {
    #[error("active-set solver did not converge within the iteration cap")]
    NotConverged,
    #[error("point is infeasible (violation {0:.3e})")]
    Infeasible(f64),
    #[error("KKT system is singular even after regularization")]
    Singular,
}

/// `minimize wᵀHw − 2fᵀw` over the monotone non-negative simplex.
#[derive(Debug, Clone)]
pub struct QpProblem {
    h: Vec<f64>,
    f: Vec<f64>,
    m: usize,
}

impl QpProblem {
    /// `h` is the `m×m` matrix in row-major order; it must be symmetric
    /// (checked to `1e-9` relative to its largest entry).
    pub fn new(h: Vec<f64>, f: Vec<f64>) -> Self {
        let m = f.len();
        assert!(m >= 1, "dimension must be at least 1");
        assert_eq!(h.len(), m * m, "H must be m×m");
        let scale = h.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
        for i in 0..m {
            for j in (i + 1)..m {
                assert!(
                    (h[i * m + j] - h[j * m + i]).abs() <= 1e-9 * scale,
                    "H must be symmetric"
                );
            }
        }
        QpProblem { h, f, m }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Objective value `wᵀHw − 2fᵀw`.
    pub fn objective(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.m);
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..self.m {
            let mut row = 0.0;
            for (j, &wj) in w.iter().enumerate() {
                row += self.h[i * self.m + j] * wj;
            }
            quad += w[i] * row;
            lin += self.f[i] * w[i];
        }
        quad - 2.0 * lin
    }
}

const FEAS_TOL: f64 = 1e-8;
const ACTIVE_TOL: f64 = 1e-9;

/// Solves the constrained program; the returned weights satisfy all three
/// constraints and the objective is within solver precision of the
/// constrained optimum.
pub fn solve(problem: &QpProblem) -> Result<TapWeights, QpError> {
    let m = problem.m;
    if m == 1 {
        // Normality pins the single weight regardless of H and f.
        return Ok(TapWeights::new(vec![0.5]));
    }

    // Normalize so tolerances are scale-free; the argmin is unchanged.
    let scale = problem
        .h
        .iter()
        .chain(problem.f.iter())
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let h: Vec<f64> = problem.h.iter().map(|&x| x / scale).collect();
    let f: Vec<f64> = problem.f.iter().map(|&x| x / scale).collect();

    // Substituted problem: minimize vᵀQv − 2rᵀv, cᵀv = 1/2, v ≥ 0, with
    // Q = TᵀHT and r = Tᵀf computed as 2-D/1-D prefix sums of H and f.
    let mut q = prefix_sums_2d(&h, m);
    let r = prefix_sums_1d(&f);
    let c: Vec<f64> = (0..m).map(|j| (j + 1) as f64).collect();

    // Equal weights w ≡ 1/(2m) correspond to v = (0, …, 0, 1/(2m)).
    let mut v = vec![0.0f64; m];
    v[m - 1] = 0.5 / m as f64;
    let mut free = vec![false; m];
    free[m - 1] = true;

    let mut regularized = false;
    let max_changes = 10 * m;
    for _ in 0..max_changes {
        let idx: Vec<usize> = (0..m).filter(|&j| free[j]).collect();
        let (v_face, mu) = match solve_face(&q, &r, &c, &idx) {
            Some(sol) => sol,
            None => {
                if regularized {
                    return Err(QpError::Singular);
                }
                regularize(&mut q, &h, m);
                regularized = true;
                continue;
            }
        };

        let min_component = v_face.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_component >= -1e-12 {
            for (&j, &vj) in idx.iter().zip(&v_face) {
                v[j] = vj.max(0.0);
            }
            // Lagrange multipliers of the bound constraints on the
            // active set; release the most negative one, if any.
            let grad = gradient(&q, &r, &v);
            let mut worst = (0usize, 0.0f64);
            for j in 0..m {
                if free[j] {
                    continue;
                }
                let lambda = grad[j] - mu * c[j];
                if lambda < worst.1 {
                    worst = (j, lambda);
                }
            }
            if worst.1 >= -1e-10 {
                return Ok(TapWeights::new(suffix_sums(&v)));
            }
            free[worst.0] = true;
        } else {
            // Partial step to the nearest bound; the blocker leaves the
            // free set. Ties break toward the smallest index.
            let mut alpha = 1.0f64;
            let mut blocker = None;
            for (&j, &target) in idx.iter().zip(&v_face) {
                if target < 0.0 {
                    let t = v[j] / (v[j] - target);
                    if t < alpha {
                        alpha = t;
                        blocker = Some(j);
                    }
                }
            }
            let blocker = blocker.expect("some component was negative");
            for (&j, &target) in idx.iter().zip(&v_face) {
                v[j] = (v[j] + alpha * (target - v[j])).max(0.0);
            }
            v[blocker] = 0.0;
            free[blocker] = false;
        }
    }
    Err(QpError::NotConverged)
}

/// Maximum KKT violation of `w` for the original problem: feasibility,
/// dual feasibility and complementary slackness with multipliers recovered
/// from the gradient; zero at an exact optimum.
pub fn kkt_residual(problem: &QpProblem, w: &[f64]) -> Result<f64, QpError> {
    let m = problem.m;
    assert_eq!(w.len(), m);

    let mut feas: f64 = (w.iter().sum::<f64>() - 0.5).abs();
    for k in 0..m {
        let gap = slack(w, k);
        feas = feas.max(-gap.min(0.0));
    }
    if feas > FEAS_TOL {
        return Err(QpError::Infeasible(feas));
    }

    // grad = 2Hw − 2f; the constraint rows telescope, so the multiplier of
    // the k-th bound constraint is the gradient prefix sum minus the
    // equality multiplier: λ_k = S_k − (k+1)μ.
    let mut grad = vec![0.0f64; m];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &wj) in w.iter().enumerate() {
            acc += problem.h[i * m + j] * wj;
        }
        *g = 2.0 * acc - 2.0 * problem.f[i];
    }
    let s = prefix_sums_1d(&grad);

    // μ fitted on the inactive constraints, where λ must vanish.
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, &sk) in s.iter().enumerate() {
        if slack(w, k) > ACTIVE_TOL {
            let ck = (k + 1) as f64;
            num += ck * sk;
            den += ck * ck;
        }
    }
    let mu = if den > 0.0 { num / den } else { s[m - 1] / m as f64 };

    let mut resid = feas;
    for (k, &sk) in s.iter().enumerate() {
        let lambda = sk - (k + 1) as f64 * mu;
        let gap = slack(w, k);
        if gap > ACTIVE_TOL {
            resid = resid.max(lambda.abs());
        } else {
            resid = resid.max(-lambda.min(0.0));
        }
        resid = resid.max((lambda * gap).abs());
    }
    Ok(resid)
}

/// Slack of the k-th inequality: `w_k − w_{k+1}` for interior constraints,
/// `w_m` for the last.
fn slack(w: &[f64], k: usize) -> f64 {
    if k + 1 < w.len() {
        w[k] - w[k + 1]
    } else {
        w[k]
    }
}

fn prefix_sums_1d(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for &v in x {
        acc += v;
        out.push(acc);
    }
    out
}

fn prefix_sums_2d(h: &[f64], m: usize) -> Vec<f64> {
    let mut q = vec![0.0f64; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = h[i * m + j];
            if i > 0 {
                acc += q[(i - 1) * m + j];
            }
            if j > 0 {
                acc += q[i * m + j - 1];
            }
            if i > 0 && j > 0 {
                acc -= q[(i - 1) * m + j - 1];
            }
            q[i * m + j] = acc;
        }
    }
    q
}

fn suffix_sums(v: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0f64; v.len()];
    let mut acc = 0.0;
    for j in (0..v.len()).rev() {
        acc += v[j];
        w[j] = acc;
    }
    w
}

fn gradient(q: &[f64], r: &[f64], v: &[f64]) -> Vec<f64> {
    let m = v.len();
    (0..m)
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..m {
                acc += q[i * m + j] * v[j];
            }
            2.0 * (acc - r[i])
        })
        .collect()
}

/// Tikhonov term on the original H propagated through the substitution:
/// `H + δI` becomes `Q + δ·TᵀT` with `(TᵀT)_{ij} = min(i,j)+1`.
fn regularize(q: &mut [f64], h: &[f64], m: usize) {
    let trace: f64 = (0..m).map(|i| h[i * m + i]).sum();
    let delta = 1e-10 * trace.max(1.0);
    for i in 0..m {
        for j in 0..m {
            q[i * m + j] += delta * (i.min(j) + 1) as f64;
        }
    }
}

/// Equality-constrained solve on the free face: minimize over `v_F` with
/// `cᵀv = 1/2`. Returns `None` when the KKT matrix is singular.
fn solve_face(q: &[f64], r: &[f64], c: &[f64], idx: &[usize]) -> Option<(Vec<f64>, f64)> {
    let m = c.len();
    let nf = idx.len();
    let dim = nf + 1;
    let mut a = vec![0.0f64; dim * dim];
    let mut b = vec![0.0f64; dim];
    for (row, &i) in idx.iter().enumerate() {
        for (col, &j) in idx.iter().enumerate() {
            a[row * dim + col] = 2.0 * q[i * m + j];
        }
        a[row * dim + nf] = -c[i];
        a[nf * dim + row] = c[i];
        b[row] = 2.0 * r[i];
    }
    b[nf] = 0.5;
    solve_dense(&mut a, &mut b, dim)?;
    let mu = b[nf];
    b.truncate(nf);
    Some((b, mu))
}

/// Gaussian elimination with partial pivoting; `a` is row-major `n×n` and
/// the solution overwrites `b`. Returns `None` on a vanishing pivot.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    let scale = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())).max(1.0);
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() <= 1e-13 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    Some(())
}
