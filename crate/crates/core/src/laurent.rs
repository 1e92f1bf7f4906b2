//! Truncated Laurent series over F_q: the computational model of the local
//! field F_q((π)).
//!
//! A series carries an explicit precision: it is known modulo π^prec
//! (`prec = None` meaning exact, used for polynomial data such as lattice
//! bases). Arithmetic propagates precision; predicates that would need
//! unavailable coefficients fail with an insufficient-precision error
//! instead of guessing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::Fq;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Laurent {
    /// exponent of the first stored coefficient; meaningful when coeffs is
    /// nonempty (the zero series stores val = 0)
    pub val: i64,
    /// coefficients of π^val, π^{val+1}, …; first entry nonzero
    pub coeffs: Vec<u8>,
    /// known modulo π^prec; None = exact
    pub prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl Laurent {
    pub fn normalized(mut val: i64, mut coeffs: Vec<u8>, prec: Option<i64>) -> Laurent {
        if let Some(p) = prec {
            let keep = (p - val).max(0) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead_zeros = coeffs.iter().take_while(|&&c| c == 0).count();
        if lead_zeros > 0 {
            coeffs.drain(..lead_zeros);
            val += lead_zeros as i64;
        }
        if coeffs.is_empty() {
            val = 0;
        }
        Laurent { val, coeffs, prec }
    }

    pub fn zero() -> Laurent {
        Laurent { val: 0, coeffs: vec![], prec: None }
    }

    pub fn one() -> Laurent {
        Laurent { val: 0, coeffs: vec![1], prec: None }
    }

    pub fn constant(c: u8) -> Laurent {
        Laurent::normalized(0, vec![c], None)
    }

    /// c·π^k
    pub fn monomial(c: u8, k: i64) -> Laurent {
        Laurent::normalized(k, vec![c], None)
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// All known coefficients vanish (zero to available precision).
    pub fn known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Valuation: Ok(Some(v)) when a nonzero coefficient is known, Ok(None)
    /// for the exact zero, and an error when truncation hides the answer.
    pub fn valuation(&self) -> Result<Option<i64>> {
        if !self.coeffs.is_empty() {
            return Ok(Some(self.val));
        }
        match self.prec {
            None => Ok(None),
            Some(p) => Err(Error::InsufficientPrecision(format!(
                "series is 0 mod π^{p}; its valuation is undecidable"
            ))),
        }
    }

    /// A certified lower bound for the valuation.
    pub fn valuation_at_least(&self) -> i64 {
        if !self.coeffs.is_empty() {
            self.val
        } else {
            self.prec.unwrap_or(i64::MAX)
        }
    }

    pub fn is_integral(&self) -> Result<bool> {
        if let Some(&_c) = self.coeffs.first() {
            return Ok(self.val >= 0);
        }
        match self.prec {
            None => Ok(true),
            Some(p) if p >= 0 => Ok(true),
            Some(p) => Err(Error::InsufficientPrecision(format!(
                "series is 0 mod π^{p}; integrality is undecidable"
            ))),
        }
    }

    /// Coefficient of π^k, when determined.
    pub fn coeff(&self, k: i64) -> Result<u8> {
        if let Some(p) = self.prec {
            if k >= p {
                return Err(Error::InsufficientPrecision(format!(
                    "coefficient of π^{k} is beyond precision {p}"
                )));
            }
        }
        if self.coeffs.is_empty() || k < self.val {
            return Ok(0);
        }
        let idx = (k - self.val) as usize;
        Ok(self.coeffs.get(idx).copied().unwrap_or(0))
    }

    /// Residue: the image in F_q of an integral series.
    pub fn residue(&self) -> Result<u8> {
        if !self.is_integral()? {
            return Err(Error::Invalid("residue of a non-integral series".into()));
        }
        self.coeff(0)
    }

    pub fn add(&self, f: &Fq, other: &Laurent) -> Laurent {
        let prec = min_prec(self.prec, other.prec);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return Laurent::normalized(0, vec![], prec);
        }
        let lo = if self
            .coeffs
            .is_empty() { other.val } else { {
                if other.coeffs.is_empty() {
                    self.val
                } else {
                    self.val.min(other.val)
                }
            } };
        let hi_a = self.val + self.coeffs.len() as i64;
        let hi_b = other.val + other.coeffs.len() as i64;
        let hi = hi_a.max(hi_b);
        let mut coeffs = vec![0u8; (hi - lo) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.val - lo) as usize + i] = c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            let idx = (other.val - lo) as usize + i;
            coeffs[idx] = f.add(coeffs[idx], c);
        }
        Laurent::normalized(lo, coeffs, prec)
    }

    pub fn neg(&self, f: &Fq) -> Laurent {
        Laurent {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, f: &Fq, other: &Laurent) -> Laurent {
        self.add(f, &other.neg(f))
    }

    pub fn mul(&self, f: &Fq, other: &Laurent) -> Laurent {
        if self.is_exactly_zero() || other.is_exactly_zero() {
            return Laurent::zero();
        }
        // prec(a·b) = min(val(a)+prec(b), val(b)+prec(a))
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            _ => {
                let pa = self
                    .prec
                    .map(|p| other.valuation_at_least().saturating_add(p));
                let pb = other
                    .prec
                    .map(|p| self.valuation_at_least().saturating_add(p));
                min_prec(pa, pb)
            }
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Laurent::normalized(0, vec![], prec);
        }
        let mut coeffs = vec![0u8; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Laurent::normalized(self.val + other.val, coeffs, prec)
    }

    /// Multiply by π^k.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p.saturating_add(k)),
        }
    }

    /// Truncate to precision π^p.
    pub fn truncate(&self, p: i64) -> Laurent {
        Laurent::normalized(self.val, self.coeffs.clone(), Some(min_prec(self.prec, Some(p)).unwrap()))
    }

    /// Inverse of a series of known valuation, to the requested precision.
    pub fn invert_to(&self, f: &Fq, target_prec: i64) -> Result<Laurent> {
        let v = self
            .valuation()?
            .ok_or_else(|| Error::Invalid("inverting the zero series".into()))?;
        // need self known mod π^{v + k} to get k coefficients of the inverse
        let k = (target_prec + v).max(1);
        if let Some(p) = self.prec {
            if p < v + k {
                return Err(Error::InsufficientPrecision(format!(
                    "need precision {} to invert to precision {target_prec}",
                    v + k
                )));
            }
        }
        // unit part u = Σ u_i π^i with u_0 ≠ 0; reciprocal by the standard
        // recurrence r_0 = u_0^{-1}, r_m = -u_0^{-1} Σ_{i≥1} u_i r_{m-i}
        let klen = k as usize;
        let mut u = vec![0u8; klen];
        for (i, slot) in u.iter_mut().enumerate() {
            *slot = self.coeffs.get(i).copied().unwrap_or(0);
        }
        let inv0 = f.inv(u[0]);
        let mut r = vec![0u8; klen];
        r[0] = inv0;
        for m in 1..klen {
            let mut acc = 0u8;
            for i in 1..=m {
                acc = f.add(acc, f.mul(u[i], r[m - i]));
            }
            r[m] = f.neg(f.mul(inv0, acc));
        }
        Ok(Laurent::normalized(-v, r, Some(target_prec)))
    }

    /// Quotient self/other known modulo π^target_prec.
    pub fn div_to(&self, f: &Fq, other: &Laurent, target_prec: i64) -> Result<Laurent> {
        if self.known_zero() {
            let ov = other.valuation()?.ok_or_else(|| {
                Error::Invalid("dividing by the zero series".into())
            })?;
            let prec = min_prec(self.prec.map(|p| p - ov), Some(target_prec));
            return Ok(Laurent::normalized(0, vec![], prec));
        }
        let need = target_prec - self.val;
        let inv = other.invert_to(f, need)?;
        Ok(self.mul(f, &inv).truncate(target_prec))
    }
}

/// 2×2 matrix of Laurent series (row major).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LMat {
    pub a: [Laurent; 4],
}

impl LMat {
    pub fn new(a00: Laurent, a01: Laurent, a10: Laurent, a11: Laurent) -> LMat {
        LMat { a: [a00, a01, a10, a11] }
    }

    pub fn identity() -> LMat {
        LMat::new(Laurent::one(), Laurent::zero(), Laurent::zero(), Laurent::one())
    }

    /// Constant matrix from residue entries.
    pub fn from_residues(m: [[u8; 2]; 2]) -> LMat {
        LMat::new(
            Laurent::constant(m[0][0]),
            Laurent::constant(m[0][1]),
            Laurent::constant(m[1][0]),
            Laurent::constant(m[1][1]),
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.a[i * 2 + j]
    }

    pub fn mul(&self, f: &Fq, other: &LMat) -> LMat {
        let e = |i: usize, j: usize| -> Laurent {
            self.get(i, 0)
                .mul(f, other.get(0, j))
                .add(f, &self.get(i, 1).mul(f, other.get(1, j)))
        };
        LMat::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self, f: &Fq) -> Laurent {
        self.get(0, 0)
            .mul(f, self.get(1, 1))
            .sub(f, &self.get(0, 1).mul(f, self.get(1, 0)))
    }

    /// Adjugate: adj(M)·M = det(M)·I.
    pub fn adjugate(&self, f: &Fq) -> LMat {
        LMat::new(
            self.get(1, 1).clone(),
            self.get(0, 1).neg(f),
            self.get(1, 0).neg(f),
            self.get(0, 0).clone(),
        )
    }

    pub fn shift(&self, k: i64) -> LMat {
        LMat::new(
            self.a[0].shift(k),
            self.a[1].shift(k),
            self.a[2].shift(k),
            self.a[3].shift(k),
        )
    }

    pub fn scale(&self, f: &Fq, s: &Laurent) -> LMat {
        LMat::new(
            self.a[0].mul(f, s),
            self.a[1].mul(f, s),
            self.a[2].mul(f, s),
            self.a[3].mul(f, s),
        )
    }

    /// Column j as a pair of series.
    pub fn column(&self, j: usize) -> (Laurent, Laurent) {
        (self.get(0, j).clone(), self.get(1, j).clone())
    }

    pub fn from_columns(c0: (Laurent, Laurent), c1: (Laurent, Laurent)) -> LMat {
        LMat::new(c0.0, c1.0, c0.1, c1.1)
    }

    pub fn all_integral(&self) -> Result<bool> {
        for e in &self.a {
            if !e.is_integral()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Residue matrix of an integral LMat.
    pub fn residue(&self) -> Result<[[u8; 2]; 2]> {
        Ok([
            [self.a[0].residue()?, self.a[1].residue()?],
            [self.a[2].residue()?, self.a[3].residue()?],
        ])
    }
}
