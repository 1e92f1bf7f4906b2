//! Arithmetic in F_q and its extensions F_{q^n}, polynomial factorization
//! over F_q, dense discrete logarithms, and depth-zero residue characters
//! of F_{q^n}^×.
//!
//! Fields are modelled deterministically: the defining polynomial is always
//! the lexicographically least primitive monic polynomial over F_p
//! (coefficients compared as integer tuples, constant term first), so two
//! runs agree bit for bit. Extensions are equipped with one dense discrete
//! logarithm table; sizes are capped at 2^20 elements.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{root_of_unity, Cyclo};
use crate::error::{Error, Result};

const MAX_FIELD: u64 = 1 << 20;
/// Base fields get full multiplication tables; this caps the table size.
const MAX_BASE: u64 = 128;

// ---------------------------------------------------------------------------
// F_p polynomial helpers used during field construction.
// ---------------------------------------------------------------------------

fn fp_poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let d = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce modulo monic f
    for i in (d..prod.len()).rev() {
        let c = prod[i];
        if c != 0 {
            prod[i] = 0;
            for (j, &fj) in f.iter().enumerate().take(d) {
                let sub = c * fj % p;
                prod[i - d + j] = (prod[i - d + j] + p - sub) % p;
            }
        }
    }
    prod.truncate(d);
    prod
}

fn fp_poly_powmod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let d = f.len() - 1;
    let mut result = vec![0u64; d];
    result[0] = 1;
    let mut base = a.to_vec();
    base.resize(d, 0);
    while e > 0 {
        if e & 1 == 1 {
            result = fp_poly_mulmod(&result, &base, f, p);
        }
        base = fp_poly_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    result
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The lexicographically least primitive monic polynomial of degree d over
/// F_p. The residue class of the variable then generates the unit group,
/// which also forces irreducibility.
fn least_primitive_poly(p: u64, d: u32) -> Vec<u64> {
    let size = p.pow(d);
    let order = size - 1;
    let lfactors = prime_factors(order);
    let count = p.pow(d); // candidate constant-first coefficient tuples
    for idx in 0..count {
        // decode idx as (c_0, c_1, ..., c_{d-1}) with c_0 varying slowest
        let mut coeffs = vec![0u64; d as usize + 1];
        coeffs[d as usize] = 1;
        let mut rest = idx;
        for i in 0..d as usize {
            let pow = p.pow(d - 1 - i as u32);
            coeffs[i] = rest / pow;
            rest %= pow;
        }
        if coeffs[0] == 0 {
            continue; // x divides f, the variable cannot be a unit
        }
        let x = if d == 1 {
            // residue of the variable is -c_0
            vec![(p - coeffs[0]) % p]
        } else {
            let mut v = vec![0u64; d as usize];
            v[1] = 1;
            v
        };
        if order == 1 {
            return coeffs; // F_2: the only unit is 1, trivially primitive
        }
        let f = coeffs.clone();
        let one = {
            let mut v = vec![0u64; d as usize];
            v[0] = 1;
            v
        };
        if fp_poly_powmod(&x, order, &f, p) != one {
            continue;
        }
        if lfactors
            .iter()
            .all(|&l| fp_poly_powmod(&x, order / l, &f, p) != one)
        {
            return coeffs;
        }
    }
    unreachable!("a primitive polynomial of degree {d} over F_{p} exists");
}

// ---------------------------------------------------------------------------
// Small base field with dense operation tables.
// ---------------------------------------------------------------------------

/// F_q for q = p^e, with full operation tables. Elements are u8 indices:
/// the polynomial c_0 + c_1 x + … packs to Σ c_i p^i.
pub struct Fq {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    pub defining: Vec<u64>,
    pub generator: u8,
    add: Vec<u8>,
    mul: Vec<u8>,
    inv: Vec<u8>,
    neg: Vec<u8>,
}

impl Fq {
    fn build(p: u64, e: u32) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let q = p.pow(e);
        if q > MAX_BASE {
            return Err(Error::TooLarge(format!("base field size {q} exceeds {MAX_BASE}")));
        }
        let defining = least_primitive_poly(p, e);
        let unpack = |idx: u64| -> Vec<u64> {
            let mut v = vec![0u64; e as usize];
            let mut rest = idx;
            for d in v.iter_mut() {
                *d = rest % p;
                rest /= p;
            }
            v
        };
        let pack = |v: &[u64]| -> u64 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let n = q as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        let mut neg = vec![0u8; n];
        let mut inv = vec![0u8; n];
        for i in 0..n {
            let a = unpack(i as u64);
            neg[i] = pack(&a.iter().map(|&d| (p - d) % p).collect::<Vec<_>>()) as u8;
            for j in 0..n {
                let b = unpack(j as u64);
                let s: Vec<u64> = a.iter().zip(&b).map(|(&x, &y)| (x + y) % p).collect();
                add[i * n + j] = pack(&s) as u8;
                mul[i * n + j] = pack(&fp_poly_mulmod(&a, &b, &defining, p)) as u8;
            }
        }
        for i in 1..n {
            for j in 1..n {
                if mul[i * n + j] == 1 {
                    inv[i] = j as u8;
                }
            }
        }
        let generator = if e == 1 {
            ((p - defining[0]) % p) as u8
        } else {
            pack(&{
                let mut v = vec![0u64; e as usize];
                v[1] = 1;
                v
            }) as u8
        };
        Ok(Fq { p, e, q, defining, generator, add, mul, inv, neg })
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverting zero");
        self.inv[a as usize]
    }
    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q as u8
    }

    pub fn units(&self) -> impl Iterator<Item = u8> {
        1..self.q as u8
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Shared, memoised base fields.
pub fn fq(p: u64, e: u32) -> Result<Arc<Fq>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<Fq>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&(p, e)) {
        return Ok(f.clone());
    }
    let built = Arc::new(Fq::build(p, e)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry((p, e))
        .or_insert(built)
        .clone())
}

/// Base field of prime-power order q.
pub fn fq_of_order(q: u64) -> Result<Arc<Fq>> {
    let mut p = 2;
    while p <= q {
        if q.is_multiple_of(p) {
            let mut e = 0;
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
                e += 1;
            }
            if r != 1 {
                return Err(Error::Invalid(format!("{q} is not a prime power")));
            }
            return fq(p, e);
        }
        p += 1;
    }
    Err(Error::Invalid(format!("{q} is not a prime power")))
}

// ---------------------------------------------------------------------------
// Polynomials over F_q.
// ---------------------------------------------------------------------------

/// Dense polynomial over F_q, constant term first, no trailing zeros
/// (the zero polynomial has an empty coefficient vector).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub coeffs: Vec<u8>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<u8>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![1] }
    }

    pub fn x() -> Poly {
        Poly { coeffs: vec![0, 1] }
    }

    /// x - c
    pub fn linear(f: &Fq, c: u8) -> Poly {
        Poly::new(vec![f.neg(c), 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> u8 {
        *self.coeffs.last().expect("zero polynomial")
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// Canonical comparison key: degree, then coefficients as an integer
    /// tuple with the constant term first.
    pub fn key(&self) -> (usize, Vec<u8>) {
        (self.coeffs.len(), self.coeffs.clone())
    }

    pub fn add(&self, f: &Fq, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u8; n];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *o = f.add(a, b);
        }
        Poly::new(out)
    }

    pub fn mul(&self, f: &Fq, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u8; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, f: &Fq, c: u8) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn divrem(&self, f: &Fq, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.is_zero() || self.coeffs.len() < div.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dlen = div.coeffs.len();
        let lead_inv = f.inv(div.leading());
        let mut quot = vec![0u8; rem.len() - dlen + 1];
        for i in (0..quot.len()).rev() {
            let c = f.mul(rem[i + dlen - 1], lead_inv);
            quot[i] = c;
            if c != 0 {
                for (j, &dj) in div.coeffs.iter().enumerate() {
                    rem[i + j] = f.sub(rem[i + j], f.mul(c, dj));
                }
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn divides(&self, f: &Fq, other: &Poly) -> bool {
        other.divrem(f, self).1.is_zero()
    }

    pub fn eval(&self, f: &Fq, x: u8) -> u8 {
        let mut acc = 0u8;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }
}

/// All monic irreducible polynomials over F_q of degree 1..=max_deg,
/// in canonical order.
pub fn irreducible_polys(f: &Arc<Fq>, max_deg: usize) -> Arc<Vec<Poly>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32, usize), Arc<Vec<Poly>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (f.p, f.e, max_deg);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.clone();
    }
    let mut irreducibles: Vec<Poly> = Vec::new();
    for d in 1..=max_deg {
        // monic polynomials of degree d in canonical order
        let total = f.q.pow(d as u32);
        for idx in 0..total {
            let mut coeffs = vec![0u8; d + 1];
            coeffs[d] = 1;
            let mut rest = idx;
            for i in (0..d).rev() {
                let pow = f.q.pow(i as u32);
                // constant term varies slowest: decode with c_0 as the most
                // significant digit
                coeffs[d - 1 - i] = (rest / pow) as u8;
                rest %= pow;
            }
            let cand = Poly::new(coeffs);
            let reducible = irreducibles
                .iter()
                .take_while(|g| g.coeffs.len() - 1 <= d / 2)
                .any(|g| g.divides(f, &cand));
            if !reducible {
                irreducibles.push(cand);
            }
        }
    }
    irreducibles.sort_by_key(|g| g.key());
    let arc = Arc::new(irreducibles);
    cache.lock().unwrap().insert(key, arc.clone());
    arc
}

/// Factor a nonzero polynomial over F_q into its leading unit and monic
/// irreducible factors with multiplicities, in canonical factor order.
pub fn factor(f: &Arc<Fq>, poly: &Poly) -> Result<(u8, Vec<(Poly, u32)>)> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let lead = poly.leading();
    let mut rem = poly.scale(f, f.inv(lead));
    let mut out: Vec<(Poly, u32)> = Vec::new();
    if rem.degree() == 0 {
        return Ok((lead, out));
    }
    let irreducibles = irreducible_polys(f, (rem.degree() / 2).max(1));
    for g in irreducibles.iter() {
        if rem.degree() == 0 {
            break;
        }
        if g.coeffs.len() - 1 > rem.degree() / 2 {
            break;
        }
        let mut mult = 0;
        loop {
            let (q, r) = rem.divrem(f, g);
            if r.is_zero() {
                rem = q;
                mult += 1;
            } else {
                break;
            }
        }
        if mult > 0 {
            out.push((g.clone(), mult));
        }
    }
    if rem.degree() > 0 {
        out.push((rem, 1)); // no factor of degree <= d/2 remains: irreducible
    }
    out.sort_by_key(|(g, _)| g.key());
    Ok((lead, out))
}

// ---------------------------------------------------------------------------
// The tower F_q ⊂ F_{q^n} with a dense discrete logarithm table.
// ---------------------------------------------------------------------------

/// F_{q^n} presented over F_p by the lexicographically least primitive monic
/// polynomial of degree e·n, with its distinguished subfield F_q and a dense
/// dlog table for the full unit group.
pub struct FieldTower {
    pub base: Arc<Fq>,
    pub n: u32,
    pub qn: u64,
    pub defining: Vec<u64>,
    /// generator (residue class of the variable), packed base p
    pub generator: u32,
    dlog: Vec<u32>,
    antilog: Vec<u32>,
    embed: Vec<u32>,
    p: u64,
    deg: u32,
}

impl FieldTower {
    #[inline]
    pub fn zero(&self) -> u32 {
        0
    }

    #[inline]
    pub fn one(&self) -> u32 {
        1
    }

    pub fn dlog(&self, x: u32) -> Result<u64> {
        if x == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.dlog[x as usize] as u64)
    }

    pub fn pow_of_generator(&self, k: u64) -> u32 {
        self.antilog[(k % (self.qn - 1)) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = self.dlog[a as usize] as u64 + self.dlog[b as usize] as u64;
        self.pow_of_generator(k)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let mut out = 0u64;
        let (mut a, mut b) = (a as u64, b as u64);
        let mut place = 1u64;
        for _ in 0..self.deg {
            out += (a % p + b % p) % p * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out as u32
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if a == 0 {
            assert!(k > 0, "0^0 in field tower");
            return 0;
        }
        self.pow_of_generator(self.dlog[a as usize] as u64 * (k % (self.qn - 1).max(1)))
    }

    /// Frobenius x ↦ x^q relative to the base field.
    pub fn frobenius(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.pow(a, self.base.q)
        }
    }

    /// The canonical image of a base-field element.
    pub fn embed_base(&self, a: u8) -> u32 {
        self.embed[a as usize]
    }

    pub fn in_base_field(&self, a: u32) -> bool {
        self.frobenius(a) == a
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(0).chain((0..self.qn - 1).map(|k| self.antilog[k as usize]))
    }

    pub fn units(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.qn - 1).map(|k| self.antilog[k as usize])
    }

    /// Evaluate a polynomial with base-field coefficients at a tower element.
    pub fn eval_base_poly(&self, poly: &Poly, x: u32) -> u32 {
        let mut acc = 0u32;
        for &c in poly.coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), self.embed_base(c));
        }
        acc
    }

    /// Multiplicative order of a unit.
    pub fn order(&self, a: u32) -> Result<u64> {
        let d = self.dlog(a)?;
        let m = self.qn - 1;
        Ok(m / crate::cyclotomic::gcd_i64(d as i64, m as i64) as u64)
    }
}

/// Build the tower F_q ⊂ F_{q^n}, q = p^e.
pub fn build_tower(p: u64, e: u32, n: u32) -> Result<Arc<FieldTower>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32, u32), Arc<FieldTower>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(p, e, n)) {
        return Ok(t.clone());
    }
    let base = fq(p, e)?;
    let deg = e * n;
    let qn = base.q.pow(n);
    if qn > MAX_FIELD {
        return Err(Error::TooLarge(format!(
            "field of size {qn} exceeds the dlog table bound {MAX_FIELD}"
        )));
    }
    let defining = least_primitive_poly(p, deg);
    let pack = |v: &[u64]| -> u64 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
    let generator_poly: Vec<u64> = if deg == 1 {
        vec![(p - defining[0]) % p]
    } else {
        let mut v = vec![0u64; deg as usize];
        v[1] = 1;
        v
    };
    let generator = pack(&generator_poly) as u32;
    // dense antilog/dlog
    let mut antilog = vec![0u32; (qn - 1) as usize];
    let mut dlog = vec![0u32; qn as usize];
    let mut cur = vec![0u64; deg as usize];
    cur[0] = 1;
    for k in 0..(qn - 1) as usize {
        let packed = pack(&cur) as u32;
        antilog[k] = packed;
        dlog[packed as usize] = k as u32;
        cur = fp_poly_mulmod(&cur, &generator_poly, &defining, p);
    }
    let mut tower = FieldTower {
        base: base.clone(),
        n,
        qn,
        defining,
        generator,
        dlog,
        antilog,
        embed: vec![0; base.q as usize],
        p,
        deg,
    };
    tower.embed = build_embedding(&base, &tower)?;
    let arc = Arc::new(tower);
    Ok(cache
        .lock()
        .unwrap()
        .entry((p, e, n))
        .or_insert(arc)
        .clone())
}

/// The canonical embedding F_q → F_{q^n}: the base generator maps to the
/// subfield generator of matching minimal polynomial with least dlog.
fn build_embedding(base: &Arc<Fq>, tower: &FieldTower) -> Result<Vec<u32>> {
    let q = base.q;
    let mut embed = vec![0u32; q as usize];
    embed[0] = 0;
    if q == 2 {
        embed[1] = 1;
        return Ok(embed);
    }
    if base.e == 1 {
        // prime subfield: k maps to 1 + 1 + … + 1
        for k in 1..q {
            embed[k as usize] = tower.add(embed[(k - 1) as usize], 1);
        }
        // reindex so that embed[g^j] matches powers of the embedded generator
        return Ok(embed);
    }
    // subfield units have dlog divisible by (q^n-1)/(q-1)
    let step = (tower.qn - 1) / (q - 1);
    let mut image = None;
    for j in 1..q - 1 {
        if crate::cyclotomic::gcd_i64(j as i64, (q - 1) as i64) != 1 {
            continue;
        }
        let cand = tower.pow_of_generator(j * step);
        if min_poly_matches(base, tower, cand) {
            image = Some(cand);
            break; // least dlog wins
        }
    }
    let g_img = image.ok_or_else(|| {
        Error::Invalid("no subfield generator matches the base minimal polynomial".into())
    })?;
    // embed 0, then g^k for all k, then fix up additive representatives
    let mut cur = tower.one();
    let mut pow_base = 1u8;
    embed[1] = 1;
    for _ in 0..q - 1 {
        embed[pow_base as usize] = cur;
        pow_base = base.mul(pow_base, base.generator);
        cur = tower.mul(cur, g_img);
    }
    Ok(embed)
}

fn min_poly_matches(base: &Arc<Fq>, tower: &FieldTower, cand: u32) -> bool {
    // minimal polynomial of cand over F_p must equal the base defining poly
    let p = tower.p;
    let e = base.e;
    // conjugates cand^{p^i}
    let mut conj = Vec::with_capacity(e as usize);
    let mut c = cand;
    for _ in 0..e {
        conj.push(c);
        c = tower.pow(c, p);
    }
    if c != cand {
        return false; // degree over F_p is not e
    }
    // expand prod (x - conj_i) with coefficients in the tower
    let mut coeffs: Vec<u32> = vec![1];
    for &r in &conj {
        let neg_r = tower.mul(r, neg_one(tower));
        let mut next = vec![0u32; coeffs.len() + 1];
        for (i, &ci) in coeffs.iter().enumerate() {
            next[i + 1] = tower.add(next[i + 1], ci);
            next[i] = tower.add(next[i], tower.mul(ci, neg_r));
        }
        coeffs = next;
    }
    // compare with the base defining polynomial (coefficients are in F_p,
    // packed identically in both models)
    coeffs
        .iter()
        .zip(base.defining.iter())
        .all(|(&a, &b)| a as u64 == b)
}

fn neg_one(tower: &FieldTower) -> u32 {
    // -1 in the prime field, packed
    (tower.p - 1) as u32
}

// ---------------------------------------------------------------------------
// Depth-zero residue characters of F_{q^n}^×.
// ---------------------------------------------------------------------------

/// θ_a(x) = ζ_{q^n−1}^{a·dlog x}; the datum of a depth-zero character of an
/// unramified torus block, with unramified twists dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCharacter {
    pub q: u64,
    pub n: u32,
    pub a: u64,
}

impl ResidueCharacter {
    pub fn new(q: u64, n: u32, a: u64) -> ResidueCharacter {
        let m = q.pow(n) - 1;
        ResidueCharacter { q, n, a: if m == 0 { 0 } else { a % m } }
    }

    pub fn modulus(&self) -> u64 {
        self.q.pow(self.n) - 1
    }

    /// Frobenius orbit {a, aq, aq², …} mod q^n − 1.
    pub fn orbit(&self) -> Vec<u64> {
        let m = self.modulus();
        if m == 0 {
            return vec![0];
        }
        let mut out = Vec::new();
        let mut cur = self.a % m;
        loop {
            out.push(cur);
            cur = cur * self.q % m;
            if cur == self.a % m {
                break;
            }
        }
        out
    }

    /// Regular (in general position): the Frobenius orbit has full size n.
    pub fn is_regular(&self) -> bool {
        self.orbit().len() == self.n as usize
    }

    pub fn evaluate(&self, tower: &FieldTower, x: u32) -> Result<Cyclo> {
        if x == 0 {
            return Err(Error::ZeroElement);
        }
        let m = self.modulus();
        let d = tower.dlog(x)?;
        Ok(root_of_unity(m, ((self.a % m) * d % m) as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::root_of_unity;

    #[test]
    fn tower_f2() {
        let t = build_tower(2, 1, 1).unwrap();
        assert_eq!(t.defining, vec![1, 1]); // x + 1
        assert_eq!(t.generator, 1);
        assert_eq!(t.dlog(1).unwrap(), 0);
    }

    #[test]
    fn tower_f4() {
        let t = build_tower(2, 1, 2).unwrap();
        assert_eq!(t.defining, vec![1, 1, 1]); // x² + x + 1, the only choice
        assert_eq!(t.order(t.generator).unwrap(), 3);
    }

    #[test]
    fn tower_f9() {
        let t = build_tower(3, 1, 2).unwrap();
        assert_eq!(t.order(t.generator).unwrap(), 8);
        // the subfield F_3 is the prime field
        for x in t.elements() {
            assert_eq!(t.in_base_field(x), x < 3);
        }
    }

    #[test]
    fn size_bound() {
        assert!(matches!(build_tower(2, 1, 21), Err(Error::TooLarge(_))));
    }

    #[test]
    fn dlog_multiplicative() {
        let t = build_tower(5, 1, 2).unwrap();
        let g = t.generator;
        assert_eq!(t.dlog(g).unwrap(), 1);
        assert_eq!(t.dlog(t.mul(g, g)).unwrap(), 2);
        for x in t.units() {
            for y in [g, t.mul(g, g)] {
                let lhs = t.dlog(t.mul(x, y)).unwrap();
                let rhs = (t.dlog(x).unwrap() + t.dlog(y).unwrap()) % (t.qn - 1);
                assert_eq!(lhs, rhs);
            }
        }
        assert!(t.dlog(0).is_err());
    }

    #[test]
    fn characters_on_f4() {
        let t = build_tower(2, 1, 2).unwrap();
        let theta0 = ResidueCharacter::new(2, 2, 0);
        let theta1 = ResidueCharacter::new(2, 2, 1);
        for x in t.units() {
            assert!(theta0.evaluate(&t, x).unwrap().is_one());
        }
        let mut values: Vec<Cyclo> = t.units().map(|x| theta1.evaluate(&t, x).unwrap()).collect();
        values.sort_by_key(|v| v.numerator().to_vec());
        let mut expect = vec![root_of_unity(3, 0), root_of_unity(3, 1), root_of_unity(3, 2)];
        expect.sort_by_key(|v| v.numerator().to_vec());
        assert_eq!(values, expect);
        // θ_a(generator) = ζ^a
        let t9 = build_tower(3, 1, 2).unwrap();
        let th = ResidueCharacter::new(3, 2, 5);
        assert_eq!(th.evaluate(&t9, t9.generator).unwrap(), root_of_unity(8, 5));
        assert!(th.evaluate(&t9, 0).is_err());
    }

    #[test]
    fn character_multiplicative_and_frobenius() {
        let t = build_tower(3, 1, 2).unwrap();
        let th = ResidueCharacter::new(3, 2, 3);
        for x in t.units() {
            for y in [t.generator, t.mul(t.generator, t.generator)] {
                assert_eq!(
                    th.evaluate(&t, t.mul(x, y)).unwrap(),
                    th.evaluate(&t, x).unwrap().mul(&th.evaluate(&t, y).unwrap())
                );
            }
            // Frobenius orbit: θ_a(x^q) = θ_{aq}(x)
            let tq = ResidueCharacter::new(3, 2, 3 * 3);
            assert_eq!(
                th.evaluate(&t, t.frobenius(x)).unwrap(),
                tq.evaluate(&t, x).unwrap()
            );
        }
    }

    #[test]
    fn regularity_matches_orbit_size() {
        for (q, n) in [(2u64, 2u32), (3, 2), (5, 2), (2, 3), (3, 3), (2, 4)] {
            let m = q.pow(n) - 1;
            for a in 0..m {
                let th = ResidueCharacter::new(q, n, a);
                let orbit = th.orbit();
                assert_eq!(th.is_regular(), orbit.len() == n as usize, "q={q} n={n} a={a}");
            }
        }
        // n = 1 is always regular
        assert!(ResidueCharacter::new(2, 1, 0).is_regular());
    }

    #[test]
    fn factor_examples() {
        let f2 = fq(2, 1).unwrap();
        let (u, fs) = factor(&f2, &Poly::new(vec![0, 1, 1])).unwrap(); // x² + x
        assert_eq!(u, 1);
        assert_eq!(
            fs,
            vec![(Poly::new(vec![0, 1]), 1), (Poly::new(vec![1, 1]), 1)]
        );
        let f3 = fq(3, 1).unwrap();
        let (_, fs) = factor(&f3, &Poly::new(vec![1, 0, 1])).unwrap(); // x² + 1
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].1, 1);
        assert_eq!(fs[0].0.degree(), 2);
        let (_, fs) = factor(&f2, &Poly::new(vec![1, 1, 0, 1])).unwrap(); // x³ + x + 1
        assert_eq!(fs, vec![(Poly::new(vec![1, 1, 0, 1]), 1)]);
        assert!(factor(&f2, &Poly::zero()).is_err());
    }

    #[test]
    fn factor_refactors_exhaustively() {
        // every polynomial of degree ≤ 6 over F_q (q ≤ 5) re-multiplies to itself
        for q in [2u64, 3, 5] {
            let f = fq_of_order(q).unwrap();
            for deg in 1..=6usize {
                let total = q.pow(deg as u32);
                for lead in 1..q as u8 {
                    for idx in 0..total {
                        let mut coeffs = vec![0u8; deg + 1];
                        coeffs[deg] = lead;
                        let mut rest = idx;
                        for c in coeffs.iter_mut().take(deg) {
                            *c = (rest % q) as u8;
                            rest /= q;
                        }
                        let poly = Poly::new(coeffs);
                        let (unit, factors) = factor(&f, &poly).unwrap();
                        let mut prod = Poly::new(vec![unit]);
                        for (g, mult) in &factors {
                            for _ in 0..*mult {
                                prod = prod.mul(&f, g);
                            }
                        }
                        assert_eq!(prod, poly);
                    }
                }
            }
        }
    }

    #[test]
    fn subfield_embedding_f4_in_f16() {
        let t = build_tower(2, 2, 2).unwrap();
        let base = t.base.clone();
        assert_eq!(base.q, 4);
        // the embedding is a field homomorphism
        for a in base.elements() {
            for b in base.elements() {
                assert_eq!(
                    t.embed_base(base.add(a, b)),
                    t.add(t.embed_base(a), t.embed_base(b))
                );
                assert_eq!(
                    t.embed_base(base.mul(a, b)),
                    t.mul(t.embed_base(a), t.embed_base(b))
                );
            }
            // the image lands in the fixed field of x ↦ x^q
            assert!(t.in_base_field(t.embed_base(a)));
        }
    }
}
