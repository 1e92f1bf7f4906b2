//! Conjugacy classes of GL(n, F_q) and of products of such groups.
//!
//! A class is the map sending each monic irreducible polynomial f ≠ x to the
//! partition recording the block structure of the f-primary component; the
//! polynomial x never appears because the matrices are invertible. Classes
//! are enumerated combinatorially with centralizer orders given by the
//! classical formula, and cross-checked against exhaustive enumeration of
//! group elements whenever the full group is materialised.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::finite_field::{factor, fq_of_order, irreducible_polys, Fq, Poly};
use crate::matrix::Mat;

/// Full-enumeration bound for group element tables (covers GL(2,q≤7),
/// GL(3,q≤3), GL(4,2)).
pub const MAX_GROUP_ORDER: i64 = 1 << 16;

/// A conjugacy class of GL(n, F_q): per irreducible polynomial, a partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GlClass {
    pub n: u32,
    pub q: u64,
    /// sorted by the canonical polynomial key
    pub data: Vec<(Vec<u8>, Vec<u32>)>,
}

impl GlClass {
    fn new(n: u32, q: u64, mut data: Vec<(Poly, Vec<u32>)>) -> GlClass {
        data.sort_by_key(|(f, _)| f.key());
        GlClass {
            n,
            q,
            data: data
                .into_iter()
                .map(|(f, lam)| (f.coeffs, lam))
                .collect(),
        }
    }

    pub fn identity(n: u32, q: u64) -> GlClass {
        let f = fq_of_order(q).expect("prime power");
        GlClass::new(n, q, vec![(Poly::linear(&f, 1), vec![1; n as usize])])
    }

    /// The determinant of any representative, as an element of F_q^×.
    pub fn det(&self, f: &Fq) -> u8 {
        let mut d = 1u8;
        for (coeffs, lam) in &self.data {
            let poly = Poly { coeffs: coeffs.clone() };
            let deg = poly.degree();
            // det of the companion block of f is (−1)^deg f(0)
            let mut c = poly.coeffs[0];
            if deg % 2 == 1 {
                c = f.neg(c);
            }
            let weight: u32 = lam.iter().sum();
            for _ in 0..weight {
                d = f.mul(d, c);
            }
        }
        d
    }

    /// True if the class is regular elliptic semisimple: one irreducible
    /// polynomial of full degree n with partition (1).
    pub fn is_regular_elliptic(&self) -> bool {
        self.data.len() == 1
            && self.data[0].1 == vec![1]
            && self.data[0].0.len() == self.n as usize + 1
    }

    /// Pretty label "f-coeffs:partition;…" used by the CSV output.
    pub fn label(&self) -> String {
        self.data
            .iter()
            .map(|(f, lam)| {
                format!(
                    "{}:{}",
                    f.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
                    lam.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                )
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

pub fn group_order(n: u32, q: u64) -> i64 {
    let qn = q.pow(n) as i64;
    let mut ord = 1i64;
    for i in 0..n {
        ord *= qn - q.pow(i) as i64;
    }
    ord
}

fn partitions(k: u32) -> Vec<Vec<u32>> {
    fn go(k: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        let top = max.min(k);
        for part in (1..=top).rev() {
            cur.push(part);
            go(k - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, k, &mut Vec::new(), &mut out);
    out
}

/// n(λ) = Σ (i−1) λ_i.
fn n_of_partition(lam: &[u32]) -> u64 {
    lam.iter()
        .enumerate()
        .map(|(i, &p)| i as u64 * p as u64)
        .sum()
}

/// Centralizer order in GL(k·?, Q) of a single primary block with partition
/// λ over the field of Q = q^{deg f} elements:
/// Q^{|λ|+2n(λ)−Σ T(m_i)} · ∏_i ∏_{j=1}^{m_i} (Q^j − 1).
fn primary_centralizer(big_q: u64, lam: &[u32]) -> i64 {
    let size: u64 = lam.iter().map(|&p| p as u64).sum();
    let mut mult: HashMap<u32, u64> = HashMap::new();
    for &p in lam {
        *mult.entry(p).or_insert(0) += 1;
    }
    let mut exp = size + 2 * n_of_partition(lam);
    let mut prod = 1i64;
    for &m in mult.values() {
        exp -= m * (m + 1) / 2;
        for j in 1..=m {
            prod *= big_q.pow(j as u32) as i64 - 1;
        }
    }
    prod * (big_q as i64).pow(exp as u32)
}

pub fn centralizer_order(class: &GlClass) -> i64 {
    let mut ord = 1i64;
    for (coeffs, lam) in &class.data {
        let deg = (coeffs.len() - 1) as u32;
        ord *= primary_centralizer(class.q.pow(deg), lam);
    }
    ord
}

/// The complete, canonically ordered class list of GL(n, F_q), with
/// centralizer orders and class sizes.
pub struct ClassSet {
    pub n: u32,
    pub q: u64,
    pub classes: Vec<GlClass>,
    pub centralizers: Vec<i64>,
    pub sizes: Vec<i64>,
    pub index: HashMap<GlClass, usize>,
}

impl ClassSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, c: &GlClass) -> usize {
        *self
            .index
            .get(c)
            .unwrap_or_else(|| panic!("unknown class {c:?}"))
    }
}

pub fn class_set(n: u32, q: u64) -> Result<Arc<ClassSet>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), Arc<ClassSet>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&(n, q)) {
        return Ok(c.clone());
    }
    let built = Arc::new(build_class_set(n, q)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry((n, q))
        .or_insert(built)
        .clone())
}

fn build_class_set(n: u32, q: u64) -> Result<ClassSet> {
    let f = fq_of_order(q)?;
    let irred: Vec<Poly> = irreducible_polys(&f, n as usize)
        .iter()
        .filter(|g| g.coeffs != vec![0, 1]) // exclude x: matrices are invertible
        .cloned()
        .collect();
    let mut classes: Vec<GlClass> = Vec::new();
    let mut assignment: Vec<(Poly, Vec<u32>)> = Vec::new();
    fn go(
        irred: &[Poly],
        idx: usize,
        rem: u32,
        n: u32,
        q: u64,
        assignment: &mut Vec<(Poly, Vec<u32>)>,
        out: &mut Vec<GlClass>,
    ) {
        if rem == 0 {
            out.push(GlClass::new(n, q, assignment.clone()));
            return;
        }
        if idx == irred.len() {
            return;
        }
        let deg = irred[idx].degree() as u32;
        // skip this polynomial entirely
        go(irred, idx + 1, rem, n, q, assignment, out);
        let mut weight = deg;
        while weight <= rem {
            for lam in partitions(weight / deg) {
                assignment.push((irred[idx].clone(), lam));
                go(irred, idx + 1, rem - weight, n, q, assignment, out);
                assignment.pop();
            }
            weight += deg;
        }
    }
    go(&irred, 0, n, n, q, &mut assignment, &mut classes);
    classes.sort();
    let centralizers: Vec<i64> = classes.iter().map(centralizer_order).collect();
    let order = group_order(n, q);
    let sizes: Vec<i64> = centralizers.iter().map(|&z| order / z).collect();
    // the class equation must close up exactly
    let total: i64 = sizes.iter().sum();
    assert_eq!(total, order, "class sizes must partition GL({n},{q})");
    let index = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    Ok(ClassSet { n, q, classes, centralizers, sizes, index })
}

/// Conjugacy class of an invertible matrix, read off the characteristic
/// polynomial factorization and the rank sequence of f(A)^k per factor.
pub fn class_of_matrix(f: &Arc<Fq>, a: &Mat) -> Result<GlClass> {
    let chi = a.char_poly(f);
    if chi.coeffs[0] == 0 {
        return Err(Error::SingularMatrix);
    }
    let (_, factors) = factor(f, &chi)?;
    let n = a.n;
    let mut data: Vec<(Poly, Vec<u32>)> = Vec::new();
    for (g, mult) in factors {
        let d = g.degree() as u32;
        let lam = if mult == 1 {
            vec![1]
        } else {
            // conjugate partition from ranks of g(A)^k
            let b = a.eval_poly(f, &g);
            let mut conj: Vec<u32> = Vec::new();
            let mut prev = n;
            let mut power = Mat::identity(n);
            loop {
                power = power.mul(f, &b);
                let r = power.rank(f);
                let c = (prev - r) as u32 / d;
                if c == 0 {
                    break;
                }
                conj.push(c);
                prev = r;
                if conj.iter().sum::<u32>() == mult {
                    break;
                }
            }
            let mut lam: Vec<u32> = Vec::new();
            for k in (1..=conj.len()).rev() {
                let count = conj[k - 1] - conj.get(k).copied().unwrap_or(0);
                for _ in 0..count {
                    lam.push(k as u32);
                }
            }
            debug_assert_eq!(lam.iter().sum::<u32>(), mult);
            lam
        };
        data.push((g, lam));
    }
    Ok(GlClass::new(n as u32, f.q, data))
}

/// Companion matrix of a monic polynomial.
pub fn companion(f: &Fq, poly: &Poly) -> Mat {
    assert!(poly.is_monic());
    let d = poly.degree();
    let mut m = Mat::zero(d);
    for i in 1..d {
        m.set(i, i - 1, 1);
    }
    for i in 0..d {
        m.set(i, d - 1, f.neg(poly.coeffs[i]));
    }
    m
}

/// Direct sum of square blocks along the diagonal.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.n).sum();
    let mut m = Mat::zero(n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.n {
            for j in 0..b.n {
                m.set(off + i, off + j, b.get(i, j));
            }
        }
        off += b.n;
    }
    m
}

/// A concrete representative: per (f, λ), a companion block of f^k for each
/// part k of λ.
pub fn class_representative(f: &Arc<Fq>, class: &GlClass) -> Mat {
    let mut blocks = Vec::new();
    for (coeffs, lam) in &class.data {
        let poly = Poly { coeffs: coeffs.clone() };
        for &part in lam {
            let mut fk = Poly::one();
            for _ in 0..part {
                fk = fk.mul(f, &poly);
            }
            blocks.push(companion(f, &fk));
        }
    }
    let m = block_diag(&blocks);
    debug_assert_eq!(&class_of_matrix(f, &m).unwrap(), class);
    m
}

// ---------------------------------------------------------------------------
// Exhaustive group tables.
// ---------------------------------------------------------------------------

/// Fully enumerated GL(n, F_q): elements, inverses, and the class of every
/// element, indexed against the canonical class list.
pub struct GroupData {
    pub n: u32,
    pub q: u64,
    pub fq: Arc<Fq>,
    pub classes: Arc<ClassSet>,
    pub elements: Vec<Mat>,
    pub inverse: Vec<u32>,
    pub class_of: Vec<u16>,
    pub class_elements: Vec<Vec<u32>>,
    pub class_reps: Vec<u32>,
    key_to_idx: HashMap<u64, u32>,
}

impl GroupData {
    pub fn order(&self) -> i64 {
        self.elements.len() as i64
    }

    pub fn index_of(&self, m: &Mat) -> u32 {
        self.key_to_idx[&m.key(self.q)]
    }

    pub fn class_index_of(&self, m: &Mat) -> u16 {
        self.class_of[self.index_of(m) as usize]
    }
}

pub fn group_data(n: u32, q: u64) -> Result<Arc<GroupData>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), Arc<GroupData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().unwrap().get(&(n, q)) {
        return Ok(g.clone());
    }
    let built = Arc::new(build_group_data(n, q)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry((n, q))
        .or_insert(built)
        .clone())
}

fn build_group_data(n: u32, q: u64) -> Result<GroupData> {
    let order = group_order(n, q);
    if order > MAX_GROUP_ORDER {
        return Err(Error::TooLarge(format!(
            "|GL({n},{q})| = {order} exceeds the exhaustive bound {MAX_GROUP_ORDER}"
        )));
    }
    let f = fq_of_order(q)?;
    let classes = class_set(n, q)?;
    let nn = (n * n) as usize;
    let total = q.pow(n * n);
    let mut elements: Vec<Mat> = Vec::with_capacity(order as usize);
    for idx in 0..total {
        let mut m = Mat::zero(n as usize);
        let mut rest = idx;
        for k in 0..nn {
            m.a[k] = (rest % q) as u8;
            rest /= q;
        }
        if m.is_invertible(&f) {
            elements.push(m);
        }
    }
    assert_eq!(elements.len() as i64, order);
    let key_to_idx: HashMap<u64, u32> = elements
        .iter()
        .enumerate()
        .map(|(i, m)| (m.key(q), i as u32))
        .collect();
    let inverse: Vec<u32> = elements
        .iter()
        .map(|m| {
            let inv = m.inverse(&f).expect("group elements are invertible");
            key_to_idx[&inv.key(q)]
        })
        .collect();
    let mut class_of = vec![0u16; elements.len()];
    let mut class_elements = vec![Vec::new(); classes.len()];
    for (i, m) in elements.iter().enumerate() {
        let c = class_of_matrix(&f, m)?;
        let ci = classes.index_of(&c);
        class_of[i] = ci as u16;
        class_elements[ci].push(i as u32);
    }
    // exhaustive sizes must agree with the centralizer formula
    for (ci, elems) in class_elements.iter().enumerate() {
        assert_eq!(
            elems.len() as i64,
            classes.sizes[ci],
            "class size mismatch for {:?}",
            classes.classes[ci]
        );
    }
    let class_reps: Vec<u32> = class_elements.iter().map(|v| v[0]).collect();
    Ok(GroupData {
        n,
        q,
        fq: f,
        classes,
        elements,
        inverse,
        class_of,
        class_elements,
        class_reps,
        key_to_idx,
    })
}

// ---------------------------------------------------------------------------
// Class functions on products of GL blocks.
// ---------------------------------------------------------------------------

/// The domain shape of a class function: a product ∏ GL(m_i, F_q).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub q: u64,
    pub blocks: Vec<u32>,
}

impl Shape {
    pub fn new(q: u64, blocks: Vec<u32>) -> Shape {
        Shape { q, blocks }
    }

    pub fn total(&self) -> u32 {
        self.blocks.iter().sum()
    }

    pub fn class_sets(&self) -> Result<Vec<Arc<ClassSet>>> {
        self.blocks.iter().map(|&m| class_set(m, self.q)).collect()
    }

    pub fn class_count(&self) -> Result<usize> {
        Ok(self.class_sets()?.iter().map(|s| s.len()).product())
    }

    pub fn group_order(&self) -> i64 {
        self.blocks.iter().map(|&m| group_order(m, self.q)).product()
    }
}

/// A dense exact class function on ∏ GL(m_i, F_q): one cyclotomic value per
/// tuple of per-block classes, in row-major order over the canonical class
/// lists.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassFunction {
    pub shape: Shape,
    pub values: Vec<Cyclo>,
}

impl ClassFunction {
    pub fn constant(shape: Shape, value: Cyclo) -> Result<ClassFunction> {
        let count = shape.class_count()?;
        Ok(ClassFunction { shape, values: vec![value; count] })
    }

    pub fn try_from_fn(
        shape: Shape,
        mut f: impl FnMut(&[usize]) -> Result<Cyclo>,
    ) -> Result<ClassFunction> {
        let sets = shape.class_sets()?;
        let count: usize = sets.iter().map(|s| s.len()).product();
        let mut values = Vec::with_capacity(count);
        let mut tuple = vec![0usize; sets.len()];
        for flat in 0..count {
            decompose(flat, &sets, &mut tuple);
            values.push(f(&tuple)?);
        }
        Ok(ClassFunction { shape, values })
    }

    pub fn flat_index(&self, tuple: &[usize]) -> usize {
        let sets = self.shape.class_sets().expect("shape already validated");
        let mut flat = 0;
        for (i, &t) in tuple.iter().enumerate() {
            flat = flat * sets[i].len() + t;
        }
        flat
    }

    pub fn value(&self, tuple: &[usize]) -> &Cyclo {
        &self.values[self.flat_index(tuple)]
    }

    /// Tensor product f_1 ⊠ … ⊠ f_k of single-block functions.
    pub fn tensor(parts: &[ClassFunction]) -> Result<ClassFunction> {
        assert!(!parts.is_empty());
        let q = parts[0].shape.q;
        let blocks: Vec<u32> = parts
            .iter()
            .flat_map(|p| p.shape.blocks.iter().copied())
            .collect();
        let shape = Shape::new(q, blocks);
        let sizes: Vec<usize> = parts.iter().map(|p| p.values.len()).collect();
        let count: usize = sizes.iter().product();
        let mut values = Vec::with_capacity(count);
        for flat in 0..count {
            let mut rest = flat;
            let mut idxs = vec![0usize; parts.len()];
            for i in (0..parts.len()).rev() {
                idxs[i] = rest % sizes[i];
                rest /= sizes[i];
            }
            let mut v = parts[0].values[idxs[0]].clone();
            for (p, &i) in parts.iter().zip(&idxs).skip(1) {
                v = v.mul(&p.values[i]);
            }
            values.push(v);
        }
        Ok(ClassFunction { shape, values })
    }

    /// Pointwise product with another function of the same shape.
    pub fn pointwise_mul(&self, other: &ClassFunction) -> Result<ClassFunction> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(ClassFunction {
            shape: self.shape.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    pub fn add(&self, other: &ClassFunction) -> Result<ClassFunction> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(ClassFunction {
            shape: self.shape.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn scale(&self, num: i64, den: i64) -> ClassFunction {
        ClassFunction {
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| v.scale(num, den)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Largest cyclotomic modulus appearing among the values.
    pub fn max_modulus(&self) -> u64 {
        self.values.iter().map(|v| v.modulus()).max().unwrap_or(1)
    }

    /// Value at the identity tuple.
    pub fn degree(&self) -> Result<Cyclo> {
        let sets = self.shape.class_sets()?;
        let tuple: Vec<usize> = sets
            .iter()
            .map(|s| s.index_of(&GlClass::identity(s.n, s.q)))
            .collect();
        Ok(self.value(&tuple).clone())
    }
}

fn decompose(flat: usize, sets: &[Arc<ClassSet>], tuple: &mut [usize]) {
    let mut rest = flat;
    for i in (0..sets.len()).rev() {
        tuple[i] = rest % sets[i].len();
        rest /= sets[i].len();
    }
}

/// ⟨f, g⟩ = |G|^{-1} Σ_c |c| f(c) conj(g(c)), with conj the automorphism
/// ζ ↦ ζ^{-1}.
pub fn inner_product(f: &ClassFunction, g: &ClassFunction) -> Result<Cyclo> {
    if f.shape != g.shape {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            f.shape, g.shape
        )));
    }
    let sets = f.shape.class_sets()?;
    let count: usize = sets.iter().map(|s| s.len()).product();
    let mut acc = Cyclo::integer(0);
    let mut tuple = vec![0usize; sets.len()];
    for flat in 0..count {
        decompose(flat, &sets, &mut tuple);
        let mut weight = 1i64;
        for (i, &t) in tuple.iter().enumerate() {
            weight *= sets[i].sizes[t];
        }
        let term = f.values[flat].mul(&g.values[flat].conj()).scale(weight, 1);
        acc = acc.add(&term);
    }
    Ok(acc.scale(1, f.shape.group_order()))
}

// ---------------------------------------------------------------------------
// JSON representation: {"shape":[...],"q":...,"values":[{"class":...,"value":...}]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    class: Vec<Vec<(Vec<u8>, Vec<u32>)>>,
    value: Cyclo,
}

#[derive(Serialize, Deserialize)]
struct ClassFunctionRepr {
    shape: Vec<u32>,
    q: u64,
    values: Vec<EntryRepr>,
}

impl Serialize for ClassFunction {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let sets = self.shape.class_sets().map_err(serde::ser::Error::custom)?;
        let mut tuple = vec![0usize; sets.len()];
        let mut values = Vec::with_capacity(self.values.len());
        for (flat, v) in self.values.iter().enumerate() {
            decompose(flat, &sets, &mut tuple);
            let class: Vec<Vec<(Vec<u8>, Vec<u32>)>> = tuple
                .iter()
                .enumerate()
                .map(|(i, &t)| sets[i].classes[t].data.clone())
                .collect();
            values.push(EntryRepr { class, value: v.clone() });
        }
        ClassFunctionRepr {
            shape: self.shape.blocks.clone(),
            q: self.shape.q,
            values,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ClassFunction {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = ClassFunctionRepr::deserialize(de)?;
        let shape = Shape::new(repr.q, repr.shape);
        let sets = shape.class_sets().map_err(DeError::custom)?;
        let count: usize = sets.iter().map(|s| s.len()).product();
        if repr.values.len() != count {
            return Err(DeError::custom(format!(
                "expected {count} class values, got {}",
                repr.values.len()
            )));
        }
        let mut values = vec![None; count];
        for entry in repr.values {
            if entry.class.len() != sets.len() {
                return Err(DeError::custom("class tuple arity mismatch"));
            }
            let mut flat = 0usize;
            for (i, block) in entry.class.iter().enumerate() {
                let gc = GlClass {
                    n: sets[i].n,
                    q: sets[i].q,
                    data: block.clone(),
                };
                let idx = sets[i]
                    .index
                    .get(&gc)
                    .copied()
                    .ok_or_else(|| DeError::custom(format!("unknown class {gc:?}")))?;
                flat = flat * sets[i].len() + idx;
            }
            values[flat] = Some(entry.value);
        }
        let values: Option<Vec<Cyclo>> = values.into_iter().collect();
        Ok(ClassFunction {
            shape,
            values: values.ok_or_else(|| DeError::custom("missing class values"))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::fq;

    #[test]
    fn class_counts_and_sizes() {
        let s22 = class_set(2, 2).unwrap();
        assert_eq!(s22.len(), 3);
        assert_eq!(s22.sizes.iter().sum::<i64>(), 6);
        assert_eq!(group_order(2, 2), 6);

        let s23 = class_set(2, 3).unwrap();
        assert_eq!(s23.len(), 8);
        assert_eq!(s23.sizes.iter().sum::<i64>(), 48);

        // GL(1,q): q−1 central classes
        for q in [2u64, 3, 5, 7] {
            let s = class_set(1, q).unwrap();
            assert_eq!(s.len(), (q - 1) as usize);
            assert!(s.centralizers.iter().all(|&z| z == (q - 1) as i64));
        }
    }

    #[test]
    fn class_of_matrix_examples() {
        let f = fq(3, 1).unwrap();
        let id = Mat::identity(2);
        let c = class_of_matrix(&f, &id).unwrap();
        assert_eq!(c, GlClass::identity(2, 3));
        assert_eq!(c.data[0].1, vec![1, 1]);

        // a 2×2 Jordan block at eigenvalue 1: partition (2)
        let j = Mat::from_rows(&[&[1, 1], &[0, 1]]);
        let c = class_of_matrix(&f, &j).unwrap();
        assert_eq!(c.data.len(), 1);
        assert_eq!(c.data[0].1, vec![2]);

        // companion matrix of an irreducible quadratic: single (f, (1))
        let poly = Poly::new(vec![1, 0, 1]); // x² + 1 over F_3
        let comp = companion(&f, &poly);
        let c = class_of_matrix(&f, &comp).unwrap();
        assert_eq!(c.data, vec![(vec![1, 0, 1], vec![1])]);
        assert!(c.is_regular_elliptic());

        // singular matrices are rejected
        assert!(class_of_matrix(&f, &Mat::zero(2)).is_err());
    }

    #[test]
    fn char_poly_of_companion_is_the_polynomial() {
        let f = fq(5, 1).unwrap();
        for coeffs in [vec![2, 3, 1], vec![1, 0, 0, 1], vec![4, 1, 2, 0, 1]] {
            let p = Poly::new(coeffs);
            assert_eq!(companion(&f, &p).char_poly(&f), p);
        }
    }

    #[test]
    fn centralizer_orders() {
        // identity centralizes everything
        let s = class_set(2, 3).unwrap();
        let id = GlClass::identity(2, 3);
        assert_eq!(s.centralizers[s.index_of(&id)], group_order(2, 3));
        // diag(1, g) regular split in GL(2,3): centralizer of order 4
        let f = fq(3, 1).unwrap();
        let m = Mat::from_rows(&[&[1, 0], &[0, 2]]);
        let c = class_of_matrix(&f, &m).unwrap();
        assert_eq!(centralizer_order(&c), 4);
        // cross-check exhaustively
        let g = group_data(2, 3).unwrap();
        let count = g
            .elements
            .iter()
            .filter(|h| h.mul(&f, &m) == m.mul(&f, h))
            .count();
        assert_eq!(count, 4);
    }

    #[test]
    fn exhaustive_group_tables_agree_with_formulas() {
        // group_data asserts internally that exhaustive class sizes match
        // the centralizer formula
        for (n, q) in [(2u32, 2u64), (2, 3), (2, 4), (2, 5), (3, 2)] {
            let g = group_data(n, q).unwrap();
            assert_eq!(g.order(), group_order(n, q));
        }
        assert!(group_data(3, 4).is_err());
    }

    #[test]
    fn conjugation_invariance_of_class_data() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for (n, q) in [(2u32, 2u64), (2, 3), (2, 5), (3, 2), (3, 3)] {
            let g = group_data(n, q).unwrap();
            let f = g.fq.clone();
            for _ in 0..1000 {
                let a = &g.elements[rng.gen_range(0..g.elements.len())];
                let pi = rng.gen_range(0..g.elements.len());
                let p = &g.elements[pi];
                let pinv = &g.elements[g.inverse[pi] as usize];
                let conj = p.mul(&f, a).mul(&f, pinv);
                assert_eq!(
                    class_of_matrix(&f, a).unwrap(),
                    class_of_matrix(&f, &conj).unwrap()
                );
            }
        }
    }

    #[test]
    fn inner_products() {
        let shape = Shape::new(3, vec![2]);
        let triv = ClassFunction::constant(shape.clone(), Cyclo::integer(1)).unwrap();
        assert!(inner_product(&triv, &triv).unwrap().is_one());
        // regular character contains the trivial exactly once
        let set = class_set(2, 3).unwrap();
        let id = set.index_of(&GlClass::identity(2, 3));
        let mut reg = ClassFunction::constant(shape, Cyclo::integer(0)).unwrap();
        reg.values[id] = Cyclo::integer(group_order(2, 3));
        assert!(inner_product(&reg, &triv).unwrap().is_one());
        // shape mismatch is an error
        let other = ClassFunction::constant(Shape::new(3, vec![1, 1]), Cyclo::integer(1)).unwrap();
        assert!(inner_product(&triv, &other).is_err());
    }

    #[test]
    fn representatives_realize_their_classes() {
        let f = fq(2, 1).unwrap();
        for set in [class_set(2, 2).unwrap(), class_set(3, 2).unwrap(), class_set(4, 2).unwrap()] {
            for class in &set.classes {
                let m = class_representative(&f, class);
                assert_eq!(&class_of_matrix(&f, &m).unwrap(), class);
            }
        }
    }

    #[test]
    fn class_function_serde_roundtrip() {
        let shape = Shape::new(2, vec![1, 2]);
        let set1 = class_set(1, 2).unwrap();
        let set2 = class_set(2, 2).unwrap();
        let mut k = 0i64;
        let f = ClassFunction::try_from_fn(shape, |_| {
            k += 1;
            Ok(crate::cyclotomic::root_of_unity(3, k).scale(k, 2))
        })
        .unwrap();
        assert_eq!(f.values.len(), set1.len() * set2.len());
        let js = serde_json::to_string(&f).unwrap();
        let back: ClassFunction = serde_json::from_str(&js).unwrap();
        assert_eq!(f, back);
    }
}
