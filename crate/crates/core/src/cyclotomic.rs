//! Exact arithmetic in cyclotomic fields Q(ζ_m).
//!
//! A value is a vector of integer coordinates in the power basis
//! 1, ζ_m, …, ζ_m^{φ(m)−1} of Z\[ζ_m\], together with a positive integer
//! denominator. Every operation re-reduces modulo the m-th cyclotomic
//! polynomial, so equality is coordinate-wise once two values share a
//! modulus; values with different moduli are compared after lifting both
//! into Z\[ζ_lcm\].
//!
//! The cyclotomic polynomial Φ_m is obtained by recursive exact division
//! of x^m − 1, not from tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Euler totient.
pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Möbius function.
pub fn moebius(m: u64) -> i64 {
    let mut n = m;
    let mut k = 0u32;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_i64(a as i64, b as i64) as u64 * b
}

fn divisors(m: u64) -> Vec<u64> {
    let mut ds = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            ds.push(d);
            if d != m / d {
                ds.push(m / d);
            }
        }
        d += 1;
    }
    ds.sort_unstable();
    ds
}

/// Exact division of integer polynomials; `b` must be monic and divide `a`.
fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    assert_eq!(*b.last().unwrap(), 1, "divisor must be monic");
    let mut rem: Vec<i64> = a.to_vec();
    if rem.len() < b.len() {
        assert!(rem.iter().all(|&c| c == 0));
        return vec![0];
    }
    let qlen = rem.len() - b.len() + 1;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + b.len() - 1];
        quot[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                rem[i + j] -= c * bj;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division was not exact");
    quot
}

/// Per-modulus reduction data, computed once and shared.
struct Ctx {
    phi: usize,
    /// Φ_m, monic, length phi+1, constant term first.
    phim: Vec<i64>,
    /// Reduction of ζ_m^{phi+j} to the power basis, for j = 0..phi-1.
    pow_red: Vec<Vec<i64>>,
}

fn cyclotomic_poly(m: u64) -> Vec<i64> {
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut q = vec![0i64; m as usize + 1];
    q[0] = -1;
    q[m as usize] = 1;
    for d in divisors(m) {
        if d < m {
            q = poly_div_exact(&q, &ctx(d).phim);
        }
    }
    q
}

fn ctx(m: u64) -> Arc<Ctx> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Ctx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&m) {
        return c.clone();
    }
    // Built outside the lock: cyclotomic_poly recurses into ctx() for divisors.
    let phim = if m == 1 {
        vec![-1, 1]
    } else {
        cyclotomic_poly(m)
    };
    let phi = phim.len() - 1;
    let mut pow_red: Vec<Vec<i64>> = Vec::with_capacity(phi.saturating_sub(1));
    // ζ^phi = -Φ_m truncated to degree < phi (Φ_m is monic).
    let base: Vec<i64> = phim[..phi].iter().map(|&c| -c).collect();
    let mut cur = base.clone();
    for _ in 0..phi.saturating_sub(1) {
        pow_red.push(cur.clone());
        // multiply by ζ: shift, fold the overflowing top coefficient.
        let top = cur[phi - 1];
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..phi {
                cur[i] += top * base[i];
            }
        }
    }
    let built = Arc::new(Ctx { phi, phim, pow_red });
    cache
        .lock()
        .unwrap()
        .entry(m)
        .or_insert_with(|| built.clone())
        .clone()
}

/// Reduce an arbitrary-degree integer polynomial in ζ_m to the power basis.
fn reduce_full(coeffs: &[i64], c: &Ctx) -> Vec<i64> {
    if coeffs.len() <= c.phi {
        let mut out = vec![0i64; c.phi];
        out[..coeffs.len()].copy_from_slice(coeffs);
        return out;
    }
    let mut rem = coeffs.to_vec();
    for i in (c.phi..rem.len()).rev() {
        let t = rem[i];
        if t != 0 {
            rem[i] = 0;
            for (j, &pj) in c.phim.iter().enumerate().take(c.phi) {
                rem[i - c.phi + j] -= t * pj;
            }
        }
    }
    rem.truncate(c.phi);
    rem
}

/// An exact element of Q(ζ_m): integer coordinates in the power basis of
/// Z\[ζ_m\] over a positive integer denominator, kept reduced.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CycloRepr", into = "CycloRepr")]
pub struct Cyclo {
    m: u64,
    num: Vec<i64>,
    den: i64,
}

#[derive(Serialize, Deserialize, Clone)]
struct CycloRepr {
    m: u64,
    num: Vec<i64>,
    den: i64,
}

impl From<Cyclo> for CycloRepr {
    fn from(c: Cyclo) -> Self {
        CycloRepr { m: c.m, num: c.num, den: c.den }
    }
}

impl TryFrom<CycloRepr> for Cyclo {
    type Error = Error;
    fn try_from(r: CycloRepr) -> Result<Self, Error> {
        if r.m == 0 || r.den <= 0 {
            return Err(Error::Invalid("cyclotomic value needs m >= 1, den >= 1".into()));
        }
        if r.num.len() != euler_phi(r.m) as usize {
            return Err(Error::Invalid(format!(
                "cyclotomic value mod {} needs phi({}) = {} coordinates",
                r.m,
                r.m,
                euler_phi(r.m)
            )));
        }
        let mut c = Cyclo { m: r.m, num: r.num, den: r.den };
        c.normalize();
        Ok(c)
    }
}

impl Cyclo {
    pub fn zero(m: u64) -> Cyclo {
        let c = ctx(m);
        Cyclo { m, num: vec![0; c.phi], den: 1 }
    }

    pub fn one(m: u64) -> Cyclo {
        let mut v = Cyclo::zero(m);
        v.num[0] = 1;
        v
    }

    pub fn integer(n: i64) -> Cyclo {
        Cyclo { m: 1, num: vec![n], den: 1 }
    }

    pub fn rational(num: i64, den: i64) -> Cyclo {
        assert!(den != 0, "zero denominator");
        let mut v = Cyclo { m: 1, num: vec![num], den: den.abs() };
        if den < 0 {
            v.num[0] = -v.num[0];
        }
        v.normalize();
        v
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn numerator(&self) -> &[i64] {
        &self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    fn normalize(&mut self) {
        let mut g = self.den;
        for &c in &self.num {
            g = gcd_i64(g, c);
            if g == 1 {
                break;
            }
        }
        if g > 1 {
            self.den /= g;
            for c in &mut self.num {
                *c /= g;
            }
        }
        if self.num.iter().all(|&c| c == 0) {
            self.den = 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.den == 1 && self.num[0] == 1 && self.num[1..].iter().all(|&c| c == 0)
    }

    /// Lift into Z\[ζ_target\]; `target` must be a multiple of the modulus.
    pub fn lift_to(&self, target: u64) -> Cyclo {
        if target == self.m {
            return self.clone();
        }
        assert!(target.is_multiple_of(self.m), "lift target must be a multiple of the modulus");
        let d = (target / self.m) as usize;
        let tc = ctx(target);
        let mut poly = vec![0i64; (self.num.len() - 1) * d + 1];
        for (i, &c) in self.num.iter().enumerate() {
            poly[i * d] = c;
        }
        Cyclo { m: target, num: reduce_full(&poly, &tc), den: self.den }
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        if a.m == b.m {
            (a.clone(), b.clone())
        } else {
            let m = lcm_u64(a.m, b.m);
            (a.lift_to(m), b.lift_to(m))
        }
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        let (a, b) = Cyclo::common(self, other);
        let den = a.den / gcd_i64(a.den, b.den) * b.den;
        let fa = den / a.den;
        let fb = den / b.den;
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(&x, &y)| x * fa + y * fb)
            .collect();
        let mut v = Cyclo { m: a.m, num, den };
        v.normalize();
        v
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { m: self.m, num: self.num.iter().map(|&c| -c).collect(), den: self.den }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        cyclo_mul(self, other)
    }

    /// Exact scaling by the rational num/den.
    pub fn scale(&self, num: i64, den: i64) -> Cyclo {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let mut v = Cyclo {
            m: self.m,
            num: self.num.iter().map(|&c| c * num).collect(),
            den: self.den * den,
        };
        v.normalize();
        v
    }

    /// Galois automorphism ζ_m ↦ ζ_m^t, for t prime to m.
    pub fn galois(&self, t: i64) -> Cyclo {
        let m = self.m as i64;
        let tm = t.rem_euclid(m) as u64;
        assert!(gcd_i64(tm as i64, m) == 1, "galois exponent must be prime to the modulus");
        let c = ctx(self.m);
        let mut poly = vec![0i64; self.m as usize];
        for (i, &a) in self.num.iter().enumerate() {
            if a != 0 {
                let e = (i as u64 * tm % self.m) as usize;
                poly[e] += a;
            }
        }
        Cyclo { m: self.m, num: reduce_full(&poly, &c), den: self.den }
    }

    /// Complex conjugation ζ ↦ ζ^{−1}.
    pub fn conj(&self) -> Cyclo {
        if self.m <= 2 {
            self.clone()
        } else {
            self.galois(-1)
        }
    }

    pub fn eq_value(&self, other: &Cyclo) -> bool {
        let (a, b) = Cyclo::common(self, other);
        a.den == b.den && a.num == b.num
    }

    /// The value as a rational, if it lies in Q.
    pub fn try_as_rational(&self) -> Option<(i64, i64)> {
        if self.num[1..].iter().all(|&c| c == 0) {
            Some((self.num[0], self.den))
        } else {
            None
        }
    }

    pub fn try_as_integer(&self) -> Option<i64> {
        match self.try_as_rational() {
            Some((n, 1)) => Some(n),
            _ => None,
        }
    }

    /// Floating-point image under ζ_m ↦ exp(2πi/m); diagnostic only.
    pub fn to_complex(&self) -> (f64, f64) {
        let (mut re, mut im) = (0f64, 0f64);
        for (i, &c) in self.num.iter().enumerate() {
            let ang = 2.0 * std::f64::consts::PI * (i as f64) / (self.m as f64);
            re += c as f64 * ang.cos();
            im += c as f64 * ang.sin();
        }
        (re / self.den as f64, im / self.den as f64)
    }

    /// Rewrite in Z\[ζ_target\] for target | m, if the value lies in Q(ζ_target).
    pub fn try_lower_to(&self, target: u64) -> Option<Cyclo> {
        if target == self.m {
            return Some(self.clone());
        }
        assert!(self.m.is_multiple_of(target), "lower target must divide the modulus");
        let lc = lower_ctx(self.m, target);
        let phi2 = euler_phi(target) as usize;
        let n = self.num.len();
        // coordinates in the mixed basis ζ_target^i ζ_m^j
        let mut coords = vec![0i128; n];
        for (row, out) in coords.iter_mut().enumerate() {
            let mut acc: i128 = 0;
            for col in 0..n {
                acc += lc.inv[row * n + col] * self.num[col] as i128;
            }
            *out = acc;
        }
        if coords[phi2..].iter().any(|&c| c != 0) {
            return None;
        }
        let num: Vec<i64> = coords[..phi2]
            .iter()
            .map(|&c| i64::try_from(c).expect("lowered coordinate overflows i64"))
            .collect();
        let mut v = Cyclo { m: target, num, den: self.den };
        v.normalize();
        Some(v)
    }
}

/// Σ_k coeffs\[k\]·ζ_m^k in canonical form.
pub fn root_combination(m: u64, coeffs: &[i64]) -> Cyclo {
    assert!(m >= 1 && coeffs.len() <= m as usize);
    let c = ctx(m);
    let mut v = Cyclo { m, num: reduce_full(coeffs, &c), den: 1 };
    v.normalize();
    v
}

/// ζ_m^k in canonical form.
pub fn root_of_unity(m: u64, k: i64) -> Cyclo {
    assert!(m >= 1);
    let c = ctx(m);
    let e = k.rem_euclid(m as i64) as usize;
    if e < c.phi {
        let mut v = Cyclo::zero(m);
        v.num[e] = 1;
        return v;
    }
    let mut poly = vec![0i64; e + 1];
    poly[e] = 1;
    Cyclo { m, num: reduce_full(&poly, &c), den: 1 }
}

fn cyclo_mul(a: &Cyclo, b: &Cyclo) -> Cyclo {
    let (a, b) = Cyclo::common(a, b);
    let c = ctx(a.m);
    let phi = c.phi;
    let mut conv = vec![0i64; 2 * phi - 1];
    for (i, &x) in a.num.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.num.iter().enumerate() {
            conv[i + j] += x * y;
        }
    }
    let mut num = vec![0i64; phi];
    num.copy_from_slice(&conv[..phi]);
    for j in 0..phi.saturating_sub(1) {
        let t = conv[phi + j];
        if t != 0 {
            for (k, &r) in c.pow_red[j].iter().enumerate() {
                num[k] += t * r;
            }
        }
    }
    let mut v = Cyclo { m: a.m, num, den: a.den * b.den };
    v.normalize();
    v
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        self.eq_value(other)
    }
}
impl Eq for Cyclo {}

impl std::fmt::Display for Cyclo {
    /// Rationals print plainly; other values as power-basis coordinates
    /// `[c0,c1,…]/den@m`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some((n, d)) = self.try_as_rational() {
            return if d == 1 {
                write!(f, "{n}")
            } else {
                write!(f, "{n}/{d}")
            };
        }
        write!(
            f,
            "[{}]",
            self.num
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )?;
        if self.den != 1 {
            write!(f, "/{}", self.den)?;
        }
        write!(f, "@{}", self.m)
    }
}

impl std::ops::Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        Cyclo::add(self, rhs)
    }
}
impl std::ops::Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        Cyclo::sub(self, rhs)
    }
}
impl std::ops::Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        Cyclo::mul(self, rhs)
    }
}
impl std::ops::Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo::neg(self)
    }
}

// ---------------------------------------------------------------------------
// Change of basis Z[ζ_m] -> Z[ζ_target] for target | m.
//
// Z[ζ_m] is free over Z with basis ζ_target^i ζ_m^j (i < φ(target),
// j < φ(m)/φ(target)), so the change-of-basis matrix from that mixed basis to
// the power basis is unimodular and its inverse is an integer matrix. The
// inverse is computed modulo a few word-size primes, CRT-combined, and then
// verified exactly.
// ---------------------------------------------------------------------------

struct LowerCtx {
    /// Row-major φ(m) × φ(m) integer inverse of the mixed-basis matrix.
    inv: Vec<i128>,
}

fn lower_ctx(m: u64, target: u64) -> Arc<LowerCtx> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<LowerCtx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&(m, target)) {
        return c.clone();
    }
    let built = Arc::new(build_lower_ctx(m, target));
    cache
        .lock()
        .unwrap()
        .entry((m, target))
        .or_insert_with(|| built.clone())
        .clone()
}

fn build_lower_ctx(m: u64, target: u64) -> LowerCtx {
    let c = ctx(m);
    let n = c.phi;
    let phi2 = euler_phi(target) as usize;
    let r = n / phi2;
    let d = (m / target) as usize;
    // columns: c = i + j*phi2  ->  ζ_m^{i*d + j}
    let mut basis = vec![0i64; n * n]; // row-major, basis[row*n + col]
    for j in 0..r {
        for i in 0..phi2 {
            let col = i + j * phi2;
            let e = i * d + j;
            let mut poly = vec![0i64; e + 1];
            poly[e] = 1;
            let red = reduce_full(&poly, &c);
            for (row, &v) in red.iter().enumerate() {
                basis[row * n + col] = v;
            }
        }
    }
    let inv = invert_integer_matrix(&basis, n);
    LowerCtx { inv }
}

/// Invert an integer matrix with integer inverse (unimodular up to sign),
/// by modular inversion + CRT + exact verification.
fn invert_integer_matrix(a: &[i64], n: usize) -> Vec<i128> {
    let primes: [u64; 4] = [2147483647, 2147483629, 2147483587, 2147483579];
    let mut residues: Vec<Vec<u64>> = Vec::new();
    for (k, &p) in primes.iter().enumerate() {
        residues.push(invert_mod_p(a, n, p));
        let inv = crt_symmetric(&residues, &primes[..=k]);
        if verify_inverse(a, &inv, n) {
            return inv;
        }
    }
    panic!("integer matrix inverse did not stabilize; basis matrix not unimodular?");
}

fn invert_mod_p(a: &[i64], n: usize, p: u64) -> Vec<u64> {
    let red = |x: i64| -> u64 { x.rem_euclid(p as i64) as u64 };
    // augmented [A | I]
    let mut aug = vec![0u64; n * 2 * n];
    for i in 0..n {
        for j in 0..n {
            aug[i * 2 * n + j] = red(a[i * n + j]);
        }
        aug[i * 2 * n + n + i] = 1;
    }
    let w = 2 * n;
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| aug[r * w + col] != 0)
            .expect("singular matrix mod p");
        if piv != col {
            for j in 0..w {
                aug.swap(col * w + j, piv * w + j);
            }
        }
        let inv = mod_inverse(aug[col * w + col], p);
        for j in 0..w {
            aug[col * w + j] = aug[col * w + j] * inv % p;
        }
        for r in 0..n {
            if r != col && aug[r * w + col] != 0 {
                let f = aug[r * w + col];
                for j in 0..w {
                    let sub = f * aug[col * w + j] % p;
                    aug[r * w + j] = (aug[r * w + j] + p - sub) % p;
                }
            }
        }
    }
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = aug[i * w + n + j];
        }
    }
    out
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn crt_symmetric(residues: &[Vec<u64>], primes: &[u64]) -> Vec<i128> {
    let n2 = residues[0].len();
    let mut modulus: i128 = 1;
    for &p in primes {
        modulus *= p as i128;
    }
    let mut out = vec![0i128; n2];
    for idx in 0..n2 {
        // incremental CRT
        let mut x: i128 = residues[0][idx] as i128;
        let mut m: i128 = primes[0] as i128;
        for (k, &p) in primes.iter().enumerate().skip(1) {
            let pk = p as i128;
            let rk = residues[k][idx] as i128;
            let minv = mod_inverse((m.rem_euclid(pk)) as u64, p) as i128;
            let t = ((rk - x).rem_euclid(pk) * minv).rem_euclid(pk);
            x += m * t;
            m *= pk;
        }
        if x > modulus / 2 {
            x -= modulus;
        }
        out[idx] = x;
    }
    out
}

fn verify_inverse(a: &[i64], inv: &[i128], n: usize) -> bool {
    for i in 0..n {
        for j in 0..n {
            let mut acc: i128 = 0;
            for k in 0..n {
                acc += a[i * n + k] as i128 * inv[k * n + j];
            }
            if acc != if i == j { 1 } else { 0 } {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roots_of_unity_basics() {
        assert!(root_of_unity(1, 0).is_one());
        assert_eq!(root_of_unity(4, 2), Cyclo::integer(-1));
        let sum = root_of_unity(3, 1).add(&root_of_unity(3, 2));
        assert_eq!(sum, Cyclo::integer(-1));
        // inverse roots multiply to one
        assert!(root_of_unity(5, 1).mul(&root_of_unity(5, 4)).is_one());
        // vanishing sum 1 + ζ_3 + ζ_3²
        let s = Cyclo::one(3)
            .add(&root_of_unity(3, 1))
            .add(&root_of_unity(3, 2));
        assert!(s.is_zero());
        // multiplicativity in the exponent
        for k in 0..24 {
            assert_eq!(
                root_of_unity(12, k).mul(&root_of_unity(12, 7)),
                root_of_unity(12, k + 7)
            );
        }
    }

    #[test]
    fn cross_modulus_comparison() {
        // ζ_8² = ζ_4 after lifting
        assert_eq!(root_of_unity(8, 2), root_of_unity(4, 1));
        assert_eq!(root_of_unity(6, 3), Cyclo::integer(-1));
        assert!(root_of_unity(8, 1) != root_of_unity(4, 1));
    }

    #[test]
    fn rational_scaling() {
        assert!(Cyclo::integer(9).scale(1, 9).is_one());
        assert!(root_of_unity(3, 1).scale(0, 1).is_zero());
        let half = Cyclo::integer(1).scale(1, 2);
        assert_eq!(half.add(&half), Cyclo::integer(1));
        assert_eq!(Cyclo::rational(6, -4), Cyclo::rational(-3, 2));
    }

    #[test]
    fn moebius_sum_of_primitive_roots() {
        for m in 1..=100u64 {
            let mut sum = Cyclo::zero(m);
            for k in 0..m {
                if gcd_i64(k as i64, m as i64) == 1 {
                    sum = sum.add(&root_of_unity(m, k as i64));
                }
            }
            assert_eq!(sum, Cyclo::integer(moebius(m)), "m = {m}");
        }
    }

    #[test]
    fn galois_and_conjugation() {
        let a = root_of_unity(7, 3);
        assert_eq!(a.conj(), root_of_unity(7, -3));
        assert_eq!(a.galois(2), root_of_unity(7, 6));
        // conj is a ring automorphism
        let b = root_of_unity(7, 5).add(&Cyclo::integer(2));
        assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
    }

    #[test]
    fn complex_embedding_diagnostic() {
        // exact equality implies float agreement within 1e-9
        let pairs = [
            (root_of_unity(8, 2), root_of_unity(4, 1)),
            (root_of_unity(3, 1).add(&root_of_unity(3, 2)), Cyclo::integer(-1)),
            (root_of_unity(12, 3).mul(&root_of_unity(12, 9)), Cyclo::integer(1)),
        ];
        for (x, y) in pairs {
            assert_eq!(x, y);
            let (xr, xi) = x.to_complex();
            let (yr, yi) = y.to_complex();
            assert!((xr - yr).abs() < 1e-9 && (xi - yi).abs() < 1e-9);
        }
    }

    #[test]
    fn lowering_to_subfields() {
        // ζ_12^4 = ζ_3 lives in Z[ζ_3]
        let z = root_of_unity(12, 4);
        assert_eq!(z.try_lower_to(3).unwrap(), root_of_unity(3, 1));
        // ζ_12 itself does not
        assert!(root_of_unity(12, 1).try_lower_to(3).is_none());
        // integers lower all the way
        let full = root_of_unity(12, 4).add(&root_of_unity(12, 8)); // = -1
        assert_eq!(full.try_lower_to(1).unwrap(), Cyclo::integer(-1));
        // a denominator survives lowering
        let half = root_of_unity(20, 4).scale(1, 2);
        assert_eq!(half.try_lower_to(5).unwrap(), root_of_unity(5, 1).scale(1, 2));
    }

    #[test]
    fn serde_roundtrip_and_shape() {
        let v = root_of_unity(8, 3).scale(3, 2);
        let js = serde_json::to_string(&v).unwrap();
        assert!(js.contains("\"m\":8"));
        let back: Cyclo = serde_json::from_str(&js).unwrap();
        assert_eq!(v, back);
        assert!(serde_json::from_str::<Cyclo>("{\"m\":8,\"num\":[1],\"den\":1}").is_err());
    }

    fn arb_cyclo() -> impl Strategy<Value = Cyclo> {
        (prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12]), prop::collection::vec(-4i64..5, 4), 1i64..4)
            .prop_map(|(m, coeffs, den)| {
                let mut v = Cyclo::zero(m);
                for (k, c) in coeffs.into_iter().enumerate() {
                    v = v.add(&root_of_unity(m, k as i64).scale(c, den));
                }
                v
            })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_cyclo(), b in arb_cyclo(), c in arb_cyclo()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn lifting_respects_arithmetic(a in arb_cyclo(), b in arb_cyclo()) {
            let m = lcm_u64(a.modulus(), b.modulus()) * 2;
            prop_assert_eq!(a.add(&b).lift_to(m), a.lift_to(m).add(&b.lift_to(m)));
            prop_assert_eq!(a.mul(&b).lift_to(m), a.lift_to(m).mul(&b.lift_to(m)));
            // lifting then comparing is consistent with direct comparison
            prop_assert_eq!(a == b, a.lift_to(m) == b.lift_to(m));
        }
    }
}
