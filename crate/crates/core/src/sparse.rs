//! Compressed sparse rows and Jacobi-preconditioned conjugate gradients for
//! the symmetric positive definite systems of the flow and the initializer.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Clone, Debug, Default)]
pub struct Triplets {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Triplets {
            n,
            entries: Vec::new(),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    pub fn build(mut self) -> Csr {
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col = Vec::with_capacity(self.entries.len());
        let mut val: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr {
            n: self.n,
            row_ptr,
            col,
            val,
        }
    }
}

impl Csr {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * x[self.col[k]];
            }
            y[i] = s;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.col[k] == i)
                    .map_or(0.0, |k| self.val[k])
            })
            .collect()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.col[k], self.val[k]))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive definite `A` to relative residual `tol`.
pub fn pcg(a: &Csr, b: &[f64], x0: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.n();
    let d = a.diag();
    if d.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::SingularSystem("non-positive diagonal entry".into()));
    }
    let mut x = x0.map_or_else(|| vec![0.0; n], |x| x.to_vec());
    let mut r = vec![0.0; n];
    a.mul(&x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut z: Vec<f64> = r.iter().zip(&d).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Ok(x);
        }
        a.mul(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::SingularSystem(format!("p^T A p = {pap:e}")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / d[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = dot(&r, &r).sqrt() / bnorm;
    if res <= tol * 10.0 {
        return Ok(x);
    }
    Err(Error::NonConvergence {
        what: "conjugate gradients",
        iterations: max_iter,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_path_laplacian() {
        // tridiagonal (2, -1) plus identity, exact solution x_i = i
        let n = 50;
        let mut t = Triplets::new(n);
        for i in 0..n {
            t.add(i, i, 3.0);
            if i > 0 {
                t.add(i, i - 1, -1.0);
                t.add(i - 1, i, -1.0);
            }
        }
        let a = t.build();
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut b = vec![0.0; n];
        a.mul(&xs, &mut b);
        let x = pcg(&a, &b, None, 1e-14, 500).unwrap();
        for i in 0..n {
            assert!((x[i] - xs[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn duplicates_are_summed() {
        let mut t = Triplets::new(2);
        t.add(0, 0, 1.0);
        t.add(0, 0, 2.0);
        t.add(1, 1, 4.0);
        let a = t.build();
        assert_eq!(a.diag(), vec![3.0, 4.0]);
        assert_eq!(a.row(0).collect::<Vec<_>>(), vec![(0, 3.0)]);
    }

    #[test]
    fn rejects_zero_diagonal() {
        let mut t = Triplets::new(2);
        t.add(0, 0, 1.0);
        assert!(matches!(
            pcg(&t.build(), &[1.0, 1.0], None, 1e-12, 10),
            Err(Error::SingularSystem(_))
        ));
    }
}
