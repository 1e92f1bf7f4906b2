//! Dense small matrices over F_q.

use crate::finite_field::{Fq, Poly};

/// Row-major n×n matrix with entries in F_q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<u8>,
}

impl Mat {
    pub fn zero(n: usize) -> Mat {
        Mat { n, a: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[&[u8]]) -> Mat {
        let n = rows.len();
        let mut m = Mat::zero(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            m.a[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.a[i * self.n + j] = v;
    }

    /// Pack the entry vector into a u64 key; requires q^(n²) ≤ 2^64.
    pub fn key(&self, q: u64) -> u64 {
        self.a.iter().rev().fold(0u64, |acc, &d| acc * q + d as u64)
    }

    pub fn mul(&self, f: &Fq, other: &Mat) -> Mat {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut out = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = f.mul(aik, other.get(k, j));
                    out.a[i * n + j] = f.add(out.a[i * n + j], v);
                }
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self, f: &Fq) -> Option<Mat> {
        let n = self.n;
        let mut aug = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| aug.get(r, col) != 0)?;
            if piv != col {
                for j in 0..n {
                    let t = aug.get(col, j);
                    aug.set(col, j, aug.get(piv, j));
                    aug.set(piv, j, t);
                    let t = inv.get(col, j);
                    inv.set(col, j, inv.get(piv, j));
                    inv.set(piv, j, t);
                }
            }
            let s = f.inv(aug.get(col, col));
            for j in 0..n {
                aug.set(col, j, f.mul(aug.get(col, j), s));
                inv.set(col, j, f.mul(inv.get(col, j), s));
            }
            for r in 0..n {
                if r != col && aug.get(r, col) != 0 {
                    let c = aug.get(r, col);
                    for j in 0..n {
                        let v = f.sub(aug.get(r, j), f.mul(c, aug.get(col, j)));
                        aug.set(r, j, v);
                        let v = f.sub(inv.get(r, j), f.mul(c, inv.get(col, j)));
                        inv.set(r, j, v);
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self, f: &Fq) -> bool {
        self.rank(f) == self.n
    }

    pub fn rank(&self, f: &Fq) -> usize {
        let n = self.n;
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..n {
            if let Some(piv) = (rank..n).find(|&r| m.get(r, col) != 0) {
                if piv != rank {
                    for j in 0..n {
                        let t = m.get(rank, j);
                        m.set(rank, j, m.get(piv, j));
                        m.set(piv, j, t);
                    }
                }
                let s = f.inv(m.get(rank, col));
                for j in 0..n {
                    m.set(rank, j, f.mul(m.get(rank, j), s));
                }
                for r in 0..n {
                    if r != rank && m.get(r, col) != 0 {
                        let c = m.get(r, col);
                        for j in 0..n {
                            m.set(r, j, f.sub(m.get(r, j), f.mul(c, m.get(rank, j))));
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    pub fn det(&self, f: &Fq) -> u8 {
        let n = self.n;
        let mut m = self.clone();
        let mut det = 1u8;
        for col in 0..n {
            let piv = match (col..n).find(|&r| m.get(r, col) != 0) {
                Some(p) => p,
                None => return 0,
            };
            if piv != col {
                det = f.neg(det);
                for j in 0..n {
                    let t = m.get(col, j);
                    m.set(col, j, m.get(piv, j));
                    m.set(piv, j, t);
                }
            }
            det = f.mul(det, m.get(col, col));
            let s = f.inv(m.get(col, col));
            for r in col + 1..n {
                if m.get(r, col) != 0 {
                    let c = f.mul(m.get(r, col), s);
                    for j in col..n {
                        m.set(r, j, f.sub(m.get(r, j), f.mul(c, m.get(col, j))));
                    }
                }
            }
        }
        det
    }

    /// Characteristic polynomial det(xI − A), monic of degree n, by cofactor
    /// expansion over the polynomial ring (n ≤ 4 in practice).
    pub fn char_poly(&self, f: &Fq) -> Poly {
        let n = self.n;
        let entries: Vec<Poly> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                if i == j {
                    Poly::new(vec![f.neg(self.get(i, j)), 1])
                } else {
                    Poly::new(vec![f.neg(self.get(i, j))])
                }
            })
            .collect();
        poly_det(f, &entries, &(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>(), n)
    }

    /// Apply a polynomial with F_q coefficients to the matrix.
    pub fn eval_poly(&self, f: &Fq, p: &Poly) -> Mat {
        let n = self.n;
        let mut acc = Mat::zero(n);
        for &c in p.coeffs.iter().rev() {
            acc = acc.mul(f, self);
            for i in 0..n {
                acc.a[i * n + i] = f.add(acc.a[i * n + i], c);
            }
        }
        acc
    }

    pub fn pow(&self, f: &Fq, mut e: u64) -> Mat {
        let mut result = Mat::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(f, &base);
            }
            base = base.mul(f, &base);
            e >>= 1;
        }
        result
    }
}

fn poly_det(f: &Fq, entries: &[Poly], rows: &[usize], cols: &[usize], n: usize) -> Poly {
    if rows.len() == 1 {
        return entries[rows[0] * n + cols[0]].clone();
    }
    let mut acc = Poly::zero();
    let sub_rows: Vec<usize> = rows[1..].to_vec();
    for (k, &c) in cols.iter().enumerate() {
        let e = &entries[rows[0] * n + c];
        if e.is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &v)| v)
            .collect();
        let minor = poly_det(f, entries, &sub_rows, &sub_cols, n);
        let term = e.mul(f, &minor);
        let term = if k % 2 == 0 {
            term
        } else {
            term.scale(f, f.neg(1))
        };
        acc = acc.add(f, &term);
    }
    acc
}
