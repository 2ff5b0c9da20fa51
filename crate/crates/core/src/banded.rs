//! Lowest eigenpairs of a real symmetric banded matrix.
//!
//! Eigenvalues come from bisection on the inertia of `A - sigma I`, counted
//! from the signs of an `L D L^T` factorization (Sylvester's law of inertia).
//! Eigenvectors come from inverse iteration with a banded LU that pivots
//! partially. Both cost `O(n b^2)` per factorization, so a few thousand grid
//! points with a pentadiagonal stencil solve in milliseconds.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 200;
const INVERSE_ITERATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBanded {
    n: usize,
    bandwidth: usize,
    /// `lower[d][i] = A[i + d][i]`.
    lower: Vec<Vec<f64>>,
}

impl SymmetricBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let lower = (0..=bandwidth)
            .map(|d| vec![0.0; n.saturating_sub(d)])
            .collect();
        Self { n, bandwidth, lower }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bandwidth {
            0.0
        } else {
            self.lower[d][lo]
        }
    }

    /// Sets `A[i][j]` and `A[j][i]`. Panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.bandwidth, "({i}, {j}) lies outside the band");
        self.lower[d][lo] = value;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.lower[0].iter().zip(x).map(|(a, v)| a * v).collect();
        for d in 1..=self.bandwidth {
            for (i, &a) in self.lower[d].iter().enumerate() {
                y[i + d] += a * x[i];
                y[i] += a * x[i + d];
            }
        }
        y
    }

    /// Gershgorin interval containing the whole spectrum.
    fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let radius: f64 = (i.saturating_sub(self.bandwidth)..(i + self.bandwidth + 1).min(self.n))
                .filter(|&j| j != i)
                .map(|j| self.get(i, j).abs())
                .sum();
            let c = self.get(i, i);
            lo = lo.min(c - radius);
            hi = hi.max(c + radius);
        }
        (lo, hi)
    }

    fn norm_estimate(&self) -> f64 {
        let (lo, hi) = self.spectral_bounds();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let (n, b) = (self.n, self.bandwidth);
        let tiny = f64::EPSILON * self.norm_estimate();
        // l[i][c] = L[i][i - b + c] for c < b; d[i] = D[i].
        let mut l = vec![vec![0.0; b]; n];
        let mut d = vec![0.0; n];
        let mut negatives = 0;
        for j in 0..n {
            let start = j.saturating_sub(b);
            let mut dj = self.get(j, j) - sigma;
            for k in start..j {
                let ljk = l[j][k + b - j];
                dj -= ljk * ljk * d[k];
            }
            if dj.abs() < tiny {
                dj = -tiny;
            }
            d[j] = dj;
            if dj < 0.0 {
                negatives += 1;
            }
            for i in (j + 1)..(j + b + 1).min(n) {
                let mut v = self.get(i, j);
                for k in i.saturating_sub(b)..j {
                    v -= l[i][k + b - i] * l[j][k + b - j] * d[k];
                }
                l[i][j + b - i] = v / dj;
            }
        }
        negatives
    }

    /// The `index`-th smallest eigenvalue (0-based) by inertia bisection.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.n {
            return Err(Error::Domain(format!(
                "eigenvalue {index} requested from a {0}x{0} matrix",
                self.n
            )));
        }
        let (mut lo, mut hi) = self.spectral_bounds();
        let pad = f64::EPSILON * self.norm_estimate() * 4.0 + f64::MIN_POSITIVE;
        lo -= pad;
        hi += pad;
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Lowest `count` eigenpairs, eigenvalues ascending, eigenvectors with unit
    /// Euclidean norm.
    pub fn lowest_eigenpairs(&self, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let mut values = Vec::with_capacity(count);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
        for index in 0..count {
            let lambda = self.eigenvalue(index)?;
            let v = self.inverse_iteration(lambda, index, &vectors)?;
            values.push(lambda);
            vectors.push(v);
        }
        Ok((values, vectors))
    }

    fn inverse_iteration(&self, lambda: f64, seed: usize, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let lu = BandedLu::factor(self, lambda);
        let n = self.n;
        // Deterministic start with components along every eigenvector.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i * (seed + 3)) as f64 * 0.618_033_988_75).sin())
            .collect();
        for _ in 0..INVERSE_ITERATIONS {
            for p in previous {
                let overlap: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(p).for_each(|(xi, pi)| *xi -= overlap * pi);
            }
            normalize(&mut x)?;
            x = lu.solve(x);
        }
        for p in previous {
            let overlap: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(p).for_each(|(xi, pi)| *xi -= overlap * pi);
        }
        normalize(&mut x)?;
        Ok(x)
    }
}

fn normalize(x: &mut [f64]) -> Result<()> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InternalConsistency(
            "inverse iteration collapsed".into(),
        ));
    }
    x.iter_mut().for_each(|v| *v /= norm);
    Ok(())
}

/// LU of `A - shift I` with partial pivoting. Rows are stored in windows
/// covering columns `[i - b, i + 2b]`, enough for the fill-in of pivoting.
struct BandedLu {
    n: usize,
    b: usize,
    rows: Vec<Vec<f64>>,
    multipliers: Vec<Vec<f64>>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn factor(a: &SymmetricBanded, shift: f64) -> Self {
        let (n, b) = (a.n, a.bandwidth);
        let width = 3 * b + 1;
        let mut lu = Self {
            n,
            b,
            rows: vec![vec![0.0; width]; n],
            multipliers: vec![vec![0.0; b]; n],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in i.saturating_sub(b)..(i + b + 1).min(n) {
                let v = a.get(i, j) - if i == j { shift } else { 0.0 };
                lu.set(i, j, v);
            }
        }
        let tiny = f64::EPSILON * a.norm_estimate();
        for k in 0..n {
            let last = (k + b).min(n - 1);
            let p = (k..=last)
                .max_by(|&r, &s| lu.at(r, k).abs().total_cmp(&lu.at(s, k).abs()))
                .unwrap_or(k);
            lu.pivots[k] = p;
            let cols = k..(k + 2 * b + 1).min(n);
            if p != k {
                for j in cols.clone() {
                    let (x, y) = (lu.at(k, j), lu.at(p, j));
                    lu.set(k, j, y);
                    lu.set(p, j, x);
                }
            }
            if lu.at(k, k).abs() < tiny {
                lu.set(k, k, tiny);
            }
            let pivot = lu.at(k, k);
            for r in (k + 1)..=last {
                let m = lu.at(r, k) / pivot;
                lu.multipliers[k][r - k - 1] = m;
                if m != 0.0 {
                    for j in cols.clone() {
                        let v = lu.at(r, j) - m * lu.at(k, j);
                        lu.set(r, j, v);
                    }
                }
            }
        }
        lu
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j + self.b - i]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.rows[i][j + self.b - i] = v;
    }

    fn solve(&self, mut x: Vec<f64>) -> Vec<f64> {
        let (n, b) = (self.n, self.b);
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for r in (k + 1)..(k + b + 1).min(n) {
                x[r] -= self.multipliers[k][r - k - 1] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut v = x[k];
            for j in (k + 1)..(k + 2 * b + 1).min(n) {
                v -= self.at(k, j) * x[j];
            }
            x[k] = v / self.at(k, k);
        }
        x
    }
}
