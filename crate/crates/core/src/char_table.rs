//! Brute-force irreducible character tables by class-algebra splitting.
//!
//! The table of GL(n, F_q) (|G| ≤ 2^16) is computed the classical way: split
//! the class algebra over a prime field F_p (p ≡ 1 mod exponent,
//! p > 2√|G|) by common eigenvectors of class-sum multiplication matrices,
//! read off degrees and modular character values, and lift to exact
//! cyclotomic values through eigenvalue multiplicities on the cyclic group
//! generated by each class representative. Row and column orthogonality are
//! then verified exactly before the table is released.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::cyclotomic::{lcm_u64, root_combination, Cyclo};
use crate::error::{Error, Result};
use crate::gl_classes::{group_data, ClassFunction, GroupData, Shape};
use crate::matrix::Mat;

pub struct CharacterTable {
    pub n: u32,
    pub q: u64,
    pub group: Arc<GroupData>,
    /// Irreducible characters as single-block class functions, sorted by
    /// (degree, value key); values all live in Z\[ζ_exponent\].
    pub irreducibles: Vec<ClassFunction>,
    pub degrees: Vec<i64>,
    /// Group exponent: the common cyclotomic modulus of the table.
    pub exponent: u64,
}

impl CharacterTable {
    pub fn class_count(&self) -> usize {
        self.irreducibles.len()
    }
}

fn cache() -> &'static Mutex<HashMap<(u32, u64), Arc<CharacterTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), Arc<CharacterTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn character_table(n: u32, q: u64) -> Result<Arc<CharacterTable>> {
    if let Some(t) = cache().lock().unwrap().get(&(n, q)) {
        return Ok(t.clone());
    }
    let built = Arc::new(build_table(n, q)?);
    Ok(cache()
        .lock()
        .unwrap()
        .entry((n, q))
        .or_insert(built)
        .clone())
}

/// Install a previously computed table (e.g. from a disk cache). The table
/// is re-verified: class count, integral degrees, the group exponent, and
/// full row/column orthogonality must all check out before it is trusted.
pub fn install_table(
    n: u32,
    q: u64,
    exponent: u64,
    irreducibles: Vec<ClassFunction>,
) -> Result<Arc<CharacterTable>> {
    let group = group_data(n, q)?;
    if irreducibles.len() != group.classes.len() {
        return Err(Error::Invalid(format!(
            "expected {} irreducibles, got {}",
            group.classes.len(),
            irreducibles.len()
        )));
    }
    let id_class = group.class_index_of(&Mat::identity(n as usize)) as usize;
    let degrees: Result<Vec<i64>> = irreducibles
        .iter()
        .map(|chi| {
            chi.values[id_class]
                .try_as_integer()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::Invalid("character degree is not a positive integer".into()))
        })
        .collect();
    let table = CharacterTable { n, q, group, irreducibles, degrees: degrees?, exponent };
    let check: i64 = table.degrees.iter().map(|d| d * d).sum();
    if check != table.group.order() {
        return Err(Error::Invalid("degree squares do not sum to the group order".into()));
    }
    verify_orthogonality(&table)?;
    let arc = Arc::new(table);
    Ok(cache()
        .lock()
        .unwrap()
        .entry((n, q))
        .or_insert(arc)
        .clone())
}

fn build_table(n: u32, q: u64) -> Result<CharacterTable> {
    let group = group_data(n, q)?;
    let r = group.classes.len();
    let order = group.order() as u64;
    let f = group.fq.clone();

    // orders of class representatives and the group exponent
    let rep_orders: Vec<u64> = group
        .class_reps
        .iter()
        .map(|&idx| {
            let g = &group.elements[idx as usize];
            let mut cur = g.clone();
            let mut ord = 1u64;
            let id = Mat::identity(n as usize);
            while cur != id {
                cur = cur.mul(&f, g);
                ord += 1;
            }
            ord
        })
        .collect();
    let exponent = rep_orders.iter().fold(1u64, |acc, &o| lcm_u64(acc, o));

    // prime p ≡ 1 (mod exponent), p > 2√|G|
    let bound = 2.0 * (order as f64).sqrt();
    let mut p = exponent + 1;
    while (p as f64) <= bound || !is_prime_u64(p) {
        p += exponent;
    }
    let z = element_of_order(exponent, p);

    // class of g_i^s for s = 0..ord(g_i)
    let powers: Vec<Vec<u16>> = group
        .class_reps
        .iter()
        .enumerate()
        .map(|(i, &idx)| {
            let g = &group.elements[idx as usize];
            let mut out = Vec::with_capacity(rep_orders[i] as usize);
            let mut cur = Mat::identity(n as usize);
            for _ in 0..rep_orders[i] {
                out.push(group.class_index_of(&cur));
                cur = cur.mul(&f, g);
            }
            out
        })
        .collect();
    let inv_class: Vec<usize> = group
        .class_reps
        .iter()
        .map(|&idx| group.class_of[group.inverse[idx as usize] as usize] as usize)
        .collect();

    // simultaneous eigenvectors of the class-sum matrices over F_p
    let eigvecs = split_class_algebra(&group, r, p)?;

    // degrees from Σ_i ω(i) ω(i*) / h_i = |G| / d²
    let sizes: Vec<u64> = group.classes.sizes.iter().map(|&s| s as u64).collect();
    let mut rows: Vec<(i64, Vec<Cyclo>)> = Vec::with_capacity(r);
    for v in &eigvecs {
        let mut s = 0u64;
        for i in 0..r {
            s = (s + v[i] * v[inv_class[i]] % p % p * mod_inv(sizes[i] % p, p)) % p;
        }
        let d2 = order % p * mod_inv(s, p) % p;
        let dmax = (order as f64).sqrt() as u64 + 1;
        let degree = (1..=dmax)
            .find(|&d| d * d % p == d2)
            .ok_or_else(|| Error::Invalid("no integer degree matches the eigenvector".into()))?;
        // modular character values χ(g_i) = d ω(i) / h_i
        let chi_mod: Vec<u64> = (0..r)
            .map(|i| degree % p * v[i] % p * mod_inv(sizes[i] % p, p) % p)
            .collect();
        // exact lift on the cyclic group generated by each representative
        let mut values = Vec::with_capacity(r);
        for i in 0..r {
            let di = rep_orders[i];
            let zd = pow_mod(z, exponent / di, p); // order d_i
            let zd_inv = mod_inv(zd, p);
            let di_inv = mod_inv(di % p, p);
            let mut coeffs = vec![0i64; di as usize];
            for (k, ck) in coeffs.iter_mut().enumerate() {
                let mut acc = 0u64;
                let step = pow_mod(zd_inv, k as u64, p);
                let mut w = 1u64;
                for s in 0..di as usize {
                    acc = (acc + chi_mod[powers[i][s] as usize] * w) % p;
                    w = w * step % p;
                }
                let c = acc * di_inv % p;
                if c > degree {
                    return Err(Error::Invalid(format!(
                        "lifted multiplicity {c} exceeds the degree {degree}"
                    )));
                }
                *ck = c as i64;
            }
            values.push(root_combination(di, &coeffs).lift_to(exponent));
        }
        rows.push((degree as i64, values));
    }
    if rows.len() != r {
        return Err(Error::OracleSelection { found: rows.len() });
    }
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| value_key(&a.1).cmp(&value_key(&b.1)))
    });

    let shape = Shape::new(q, vec![n]);
    let degrees: Vec<i64> = rows.iter().map(|(d, _)| *d).collect();
    let irreducibles: Vec<ClassFunction> = rows
        .into_iter()
        .map(|(_, values)| ClassFunction { shape: shape.clone(), values })
        .collect();

    let table = CharacterTable { n, q, group, irreducibles, degrees, exponent };
    verify_orthogonality(&table)?;
    Ok(table)
}

fn value_key(values: &[Cyclo]) -> Vec<(i64, Vec<i64>)> {
    values
        .iter()
        .map(|v| (v.denominator(), v.numerator().to_vec()))
        .collect()
}

/// Exact first and second orthogonality of a finished table.
pub fn verify_orthogonality(table: &CharacterTable) -> Result<()> {
    let group = &table.group;
    let r = group.classes.len();
    let order = group.order();
    let inv_class: Vec<usize> = group
        .class_reps
        .iter()
        .map(|&idx| group.class_of[group.inverse[idx as usize] as usize] as usize)
        .collect();
    for t in 0..r {
        for u in t..r {
            let mut acc = Cyclo::integer(0);
            for i in 0..r {
                let term = table.irreducibles[t].values[i]
                    .mul(&table.irreducibles[u].values[inv_class[i]])
                    .scale(group.classes.sizes[i], 1);
                acc = acc.add(&term);
            }
            let expect = if t == u { order } else { 0 };
            if acc.try_as_integer() != Some(expect) {
                return Err(Error::Invalid(format!(
                    "row orthogonality fails at characters {t},{u} of GL({},{})",
                    table.n, table.q
                )));
            }
        }
    }
    for i in 0..r {
        for j in i..r {
            let mut acc = Cyclo::integer(0);
            for t in 0..r {
                let term = table.irreducibles[t].values[i]
                    .mul(&table.irreducibles[t].values[inv_class[j]]);
                acc = acc.add(&term);
            }
            let expect = if i == j { group.classes.centralizers[i] } else { 0 };
            if acc.try_as_integer() != Some(expect) {
                return Err(Error::Invalid(format!(
                    "column orthogonality fails at classes {i},{j} of GL({},{})",
                    table.n, table.q
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Modular class-algebra machinery.
// ---------------------------------------------------------------------------

fn is_prime_u64(n: u64) -> bool {
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

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn element_of_order(m: u64, p: u64) -> u64 {
    // any generator of the cyclic group F_p^× raised to (p-1)/m works; scan
    // for one and verify the exact order
    let factors = prime_factors_u64(m);
    'outer: for g in 2..p {
        let z = pow_mod(g, (p - 1) / m, p);
        if z == 1 && m > 1 {
            continue;
        }
        for &l in &factors {
            if pow_mod(z, m / l, p) == 1 {
                continue 'outer;
            }
        }
        return z;
    }
    unreachable!("F_p^× is cyclic of order divisible by m");
}

fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The class-sum multiplication matrix N_i with (N_i)_{jk} =
/// #{x ∈ C_i : x^{-1} g_k ∈ C_j}, reduced mod p.
fn class_matrix(group: &GroupData, i: usize, p: u64) -> Vec<u64> {
    let r = group.classes.len();
    let f = &group.fq;
    let mut m = vec![0u64; r * r];
    for &xidx in &group.class_elements[i] {
        let xinv = &group.elements[group.inverse[xidx as usize] as usize];
        for (k, &rep) in group.class_reps.iter().enumerate() {
            let y = xinv.mul(f, &group.elements[rep as usize]);
            let j = group.class_index_of(&y) as usize;
            m[j * r + k] += 1;
        }
    }
    for v in m.iter_mut() {
        *v %= p;
    }
    m
}

/// Split F_p^r into the common eigenvectors of the class matrices,
/// normalised so that the identity-class coordinate is 1.
fn split_class_algebra(group: &GroupData, r: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    // subspaces as lists of basis vectors (coordinates in the class basis)
    let mut done: Vec<Vec<u64>> = Vec::new();
    let mut pending: Vec<Vec<Vec<u64>>> = Vec::new();
    let full: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut v = vec![0u64; r];
            v[i] = 1;
            v
        })
        .collect();
    if r == 1 {
        done.push(full.into_iter().next().unwrap());
    } else {
        pending.push(full);
    }
    let id_class = group.class_index_of(&Mat::identity(group.n as usize)) as usize;
    for i in 0..r {
        if pending.is_empty() {
            break;
        }
        if i == id_class {
            continue; // the identity class matrix is the identity
        }
        let nmat = class_matrix(group, i, p);
        let mut next: Vec<Vec<Vec<u64>>> = Vec::new();
        for basis in pending {
            for sub in split_invariant_subspace(&nmat, &basis, r, p) {
                if sub.len() == 1 {
                    done.push(sub.into_iter().next().unwrap());
                } else {
                    next.push(sub);
                }
            }
        }
        pending = next;
    }
    if !pending.is_empty() {
        return Err(Error::Invalid(
            "class algebra did not split into one-dimensional eigenspaces".into(),
        ));
    }
    // normalise: coordinate at the identity class equals ω(identity) = 1
    let mut out = Vec::with_capacity(done.len());
    for v in done {
        let c = v[id_class];
        if c == 0 {
            return Err(Error::Invalid("eigenvector vanishes at the identity class".into()));
        }
        let cinv = mod_inv(c, p);
        out.push(v.into_iter().map(|x| x * cinv % p).collect());
    }
    Ok(out)
}

/// Split an N-invariant subspace into eigenspaces of N restricted to it.
fn split_invariant_subspace(
    nmat: &[u64],
    basis: &[Vec<u64>],
    r: usize,
    p: u64,
) -> Vec<Vec<Vec<u64>>> {
    let d = basis.len();
    // images N·b_j
    let images: Vec<Vec<u64>> = basis
        .iter()
        .map(|b| {
            (0..r)
                .map(|row| {
                    let mut acc = 0u64;
                    for (col, &bc) in b.iter().enumerate() {
                        if bc != 0 {
                            acc = (acc + nmat[row * r + col] * bc) % p;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    // restricted matrix X with B X = images, solved via row reduction of B
    let x = solve_in_basis(basis, &images, r, d, p);
    // eigenvalues of X from its characteristic polynomial
    let charpoly = char_poly_mod(&x, d, p);
    let mut out = Vec::new();
    for lam in 0..p {
        if eval_poly_mod(&charpoly, lam, p) != 0 {
            continue;
        }
        // kernel of X - lam I
        let mut m = x.clone();
        for i in 0..d {
            m[i * d + i] = (m[i * d + i] + p - lam) % p;
        }
        let kernel = kernel_mod(&m, d, p);
        if kernel.is_empty() {
            continue;
        }
        let sub: Vec<Vec<u64>> = kernel
            .iter()
            .map(|w| {
                let mut v = vec![0u64; r];
                for (j, &wj) in w.iter().enumerate() {
                    if wj != 0 {
                        for (coord, &bc) in basis[j].iter().enumerate() {
                            v[coord] = (v[coord] + wj * bc) % p;
                        }
                    }
                }
                v
            })
            .collect();
        out.push(sub);
    }
    out
}

/// Solve B·x_j = images_j for each image, where B is r×d of rank d;
/// returns X as a d×d row-major matrix with columns x_j.
fn solve_in_basis(basis: &[Vec<u64>], images: &[Vec<u64>], r: usize, d: usize, p: u64) -> Vec<u64> {
    // augmented [B | images] as columns; row-reduce
    let cols = d + images.len();
    let mut aug = vec![0u64; r * cols];
    for (j, b) in basis.iter().enumerate() {
        for (i, &v) in b.iter().enumerate() {
            aug[i * cols + j] = v;
        }
    }
    for (j, im) in images.iter().enumerate() {
        for (i, &v) in im.iter().enumerate() {
            aug[i * cols + d + j] = v;
        }
    }
    // full column rank: column `col` pivots in row `col`
    for col in 0..d {
        let piv = (col..r)
            .find(|&rr| aug[rr * cols + col] != 0)
            .expect("basis has full column rank");
        if piv != col {
            for j in 0..cols {
                aug.swap(col * cols + j, piv * cols + j);
            }
        }
        let inv = mod_inv(aug[col * cols + col], p);
        for j in 0..cols {
            aug[col * cols + j] = aug[col * cols + j] * inv % p;
        }
        for rr in 0..r {
            if rr != col && aug[rr * cols + col] != 0 {
                let c = aug[rr * cols + col];
                for j in 0..cols {
                    let sub = c * aug[col * cols + j] % p;
                    aug[rr * cols + j] = (aug[rr * cols + j] + p - sub) % p;
                }
            }
        }
    }
    let mut x = vec![0u64; d * d];
    for j in 0..d {
        for col in 0..d {
            x[col * d + j] = aug[col * cols + d + j];
        }
    }
    x
}

/// Characteristic polynomial of a d×d matrix mod p (Faddeev–LeVerrier;
/// p exceeds d, so the integer divisions are invertible).
fn char_poly_mod(a: &[u64], d: usize, p: u64) -> Vec<u64> {
    let mut coeffs = vec![0u64; d + 1];
    coeffs[d] = 1;
    let mut m = vec![0u64; d * d]; // M_0 = 0
    let mut c_prev = 1u64; // c_d = 1
    for k in 1..=d {
        // M_k = A·M_{k-1} + c_{d-k+1}·I
        let mut am = vec![0u64; d * d];
        for i in 0..d {
            for l in 0..d {
                let ail = a[i * d + l];
                if ail == 0 {
                    continue;
                }
                for j in 0..d {
                    am[i * d + j] = (am[i * d + j] + ail * m[l * d + j]) % p;
                }
            }
        }
        for i in 0..d {
            am[i * d + i] = (am[i * d + i] + c_prev) % p;
        }
        // c_{d-k} = -tr(A·M_k)/k
        let mut tr = 0u64;
        for i in 0..d {
            for l in 0..d {
                tr = (tr + a[i * d + l] * am[l * d + i]) % p;
            }
        }
        let c = (p - tr % p) % p * mod_inv(k as u64 % p, p) % p;
        coeffs[d - k] = c;
        m = am;
        c_prev = c;
    }
    coeffs
}

fn eval_poly_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = (acc * x + c) % p;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl_classes::{class_set, GlClass};

    #[test]
    fn gl1_tables_are_the_linear_characters() {
        for q in [2u64, 3, 5] {
            let t = character_table(1, q).unwrap();
            assert_eq!(t.class_count(), (q - 1) as usize);
            assert!(t.degrees.iter().all(|&d| d == 1));
        }
    }

    #[test]
    fn gl22_is_the_symmetric_group_on_three_letters() {
        let t = character_table(2, 2).unwrap();
        assert_eq!(t.degrees, vec![1, 1, 2]);
        // classes: identity, the unipotent (x−1, (2)) of size 3, the
        // order-3 class (x²+x+1) of size 2
        let set = class_set(2, 2).unwrap();
        let id = set.index_of(&GlClass::identity(2, 2));
        let unip = set.index_of(&GlClass { n: 2, q: 2, data: vec![(vec![1, 1], vec![2])] });
        let ell = set.index_of(&GlClass { n: 2, q: 2, data: vec![(vec![1, 1, 1], vec![1])] });
        // the degree-2 character is the standard representation of S_3
        let std_char = &t.irreducibles[2];
        assert_eq!(std_char.values[id].try_as_integer(), Some(2));
        assert_eq!(std_char.values[unip].try_as_integer(), Some(0));
        assert_eq!(std_char.values[ell].try_as_integer(), Some(-1));
        // the two linear characters are trivial and sign
        let sgn = &t.irreducibles[1];
        assert_eq!(sgn.values[unip].try_as_integer().unwrap().abs(), 1);
    }

    #[test]
    fn degree_sums() {
        for (n, q) in [(2u32, 3u64), (3, 2), (2, 4), (2, 5)] {
            let t = character_table(n, q).unwrap();
            let sum: i64 = t.degrees.iter().map(|d| d * d).sum();
            assert_eq!(sum, crate::gl_classes::group_order(n, q));
            assert_eq!(t.class_count(), t.group.classes.len());
        }
    }

    #[test]
    fn gl23_has_one_cuspidal_degree_per_regular_orbit() {
        let t = character_table(2, 3).unwrap();
        // regular exponents mod 8 fall into the orbits {1,3}, {2,6}, {5,7}
        let count = t.degrees.iter().filter(|&&d| d == 2).count();
        assert_eq!(count, 3);
    }

    #[test]
    fn orthogonality_is_rechecked() {
        let t = character_table(2, 3).unwrap();
        assert!(verify_orthogonality(&t).is_ok());
    }
}

/// Basis of the kernel of a d×d matrix mod p.
fn kernel_mod(a: &[u64], d: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = a.to_vec();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..d {
        if let Some(piv) = (row..d).find(|&rr| m[rr * d + col] != 0) {
            if piv != row {
                for j in 0..d {
                    m.swap(row * d + j, piv * d + j);
                }
            }
            let inv = mod_inv(m[row * d + col], p);
            for j in 0..d {
                m[row * d + j] = m[row * d + j] * inv % p;
            }
            for rr in 0..d {
                if rr != row && m[rr * d + col] != 0 {
                    let c = m[rr * d + col];
                    for j in 0..d {
                        let sub = c * m[row * d + j] % p;
                        m[rr * d + j] = (m[rr * d + j] + p - sub) % p;
                    }
                }
            }
            pivot_col_of_row.push(col);
            row += 1;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let free_cols: Vec<usize> = (0..d).filter(|c| !pivot_cols.contains(c)).collect();
    let mut kernel = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![0u64; d];
        v[fc] = 1;
        for (r_idx, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = (p - m[r_idx * d + fc]) % p;
        }
        kernel.push(v);
    }
    kernel
}
