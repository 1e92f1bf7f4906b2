//! Harish-Chandra induction and restriction of class functions for block
//! Levi subgroups of GL(n, F_q), the q^{-n} twist, and the cuspidal and
//! virtual characters attached to residue characters of F_{q^n}^×.
//!
//! Induction is the exhaustive coset-free sum
//!     (Ind f)(g) = |P|^{-1} Σ_{h : h^{-1}gh ∈ P} f(π_P(h^{-1}gh)),
//! restriction the normalised average over the unipotent fibre
//!     (Res f)(l) = q^{-dim U} Σ_{u ∈ U} f(l·u),
//! both over the standard (upper block-triangular) parabolic with blocks in
//! composition order. A second, independently coded fibre-sum evaluation of
//! restriction is kept alongside the averaging one as a cross-check.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::char_table::character_table;
use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::finite_field::{build_tower, fq_of_order, Fq, Poly, ResidueCharacter};
use crate::gl_classes::{
    block_diag, class_of_matrix, class_representative, class_set, group_data, group_order,
    ClassFunction, ClassSet, Shape,
};
use crate::matrix::Mat;

/// The standard block Levi datum: composition (m_1, …, m_r) of n, with the
/// upper block-triangular parabolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeviDatum {
    pub n: u32,
    pub q: u64,
    pub composition: Vec<u32>,
}

impl LeviDatum {
    pub fn new(n: u32, q: u64, composition: Vec<u32>) -> Result<LeviDatum> {
        if composition.is_empty() || composition.contains(&0) {
            return Err(Error::Invalid("composition parts must be positive".into()));
        }
        if composition.iter().sum::<u32>() != n {
            return Err(Error::ShapeMismatch(format!(
                "composition {composition:?} does not sum to {n}"
            )));
        }
        Ok(LeviDatum { n, q, composition })
    }

    /// dim U = (n² − Σ m_i²)/2.
    pub fn dim_u(&self) -> u32 {
        let n2 = self.n * self.n;
        let s: u32 = self.composition.iter().map(|&m| m * m).sum();
        (n2 - s) / 2
    }

    pub fn levi_shape(&self) -> Shape {
        Shape::new(self.q, self.composition.clone())
    }

    pub fn parabolic_order(&self) -> i64 {
        let levi: i64 = self
            .composition
            .iter()
            .map(|&m| group_order(m, self.q))
            .product();
        levi * (self.q as i64).pow(self.dim_u())
    }

    /// Row ranges of the blocks.
    fn block_spans(&self) -> Vec<(usize, usize)> {
        let mut spans = Vec::with_capacity(self.composition.len());
        let mut off = 0usize;
        for &m in &self.composition {
            spans.push((off, off + m as usize));
            off += m as usize;
        }
        spans
    }
}

fn in_parabolic(m: &Mat, spans: &[(usize, usize)]) -> bool {
    for (bi, &(r0, r1)) in spans.iter().enumerate() {
        for &(c0, c1) in spans.iter().take(bi) {
            for i in r0..r1 {
                for j in c0..c1 {
                    if m.get(i, j) != 0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn diag_blocks(m: &Mat, spans: &[(usize, usize)]) -> Vec<Mat> {
    spans
        .iter()
        .map(|&(r0, r1)| {
            let d = r1 - r0;
            let mut b = Mat::zero(d);
            for i in 0..d {
                for j in 0..d {
                    b.set(i, j, m.get(r0 + i, r0 + j));
                }
            }
            b
        })
        .collect()
}

fn levi_tuple_index(f: &Arc<Fq>, blocks: &[Mat], sets: &[Arc<ClassSet>]) -> Result<usize> {
    let mut flat = 0usize;
    for (b, set) in blocks.iter().zip(sets) {
        let c = class_of_matrix(f, b)?;
        flat = flat * set.len() + set.index_of(&c);
    }
    Ok(flat)
}

/// Harish-Chandra induction from the block Levi to GL(n, F_q), by exhaustive
/// summation over the group per class representative.
pub fn hc_induce(levi: &LeviDatum, f: &ClassFunction) -> Result<ClassFunction> {
    if f.shape.q != levi.q || f.shape.blocks != levi.composition {
        return Err(Error::ShapeMismatch(format!(
            "function shape {:?} does not match Levi {:?}",
            f.shape, levi.composition
        )));
    }
    let group = group_data(levi.n, levi.q)?;
    let field = group.fq.clone();
    let spans = levi.block_spans();
    let sets = f.shape.class_sets()?;
    let porder = levi.parabolic_order();
    let mut values = Vec::with_capacity(group.classes.len());
    for &rep in &group.class_reps {
        let g = &group.elements[rep as usize];
        let mut acc = Cyclo::integer(0);
        for h in 0..group.elements.len() {
            let hinv = &group.elements[group.inverse[h] as usize];
            let conj = hinv
                .mul(&field, g)
                .mul(&field, &group.elements[h]);
            if !in_parabolic(&conj, &spans) {
                continue;
            }
            let blocks = diag_blocks(&conj, &spans);
            let idx = levi_tuple_index(&field, &blocks, &sets)?;
            acc = acc.add(&f.values[idx]);
        }
        values.push(acc.scale(1, porder));
    }
    Ok(ClassFunction { shape: Shape::new(levi.q, vec![levi.n]), values })
}

/// Harish-Chandra restriction of a class function on GL(n, F_q) to the
/// block Levi: averaging over the unipotent radical.
pub fn hc_restrict(f: &ClassFunction, levi: &LeviDatum) -> Result<ClassFunction> {
    if f.shape.q != levi.q || f.shape.blocks != vec![levi.n] {
        return Err(Error::ShapeMismatch(format!(
            "function shape {:?} is not GL({})",
            f.shape, levi.n
        )));
    }
    let refinements: Vec<Vec<u32>> = vec![levi.composition.clone()];
    hc_restrict_multi(f, &refinements)
}

/// General per-block restriction: refine each block m_i of the shape by the
/// composition refinements\[i\]. Averaging over the product of the per-block
/// unipotent radicals.
pub fn hc_restrict_multi(f: &ClassFunction, refinements: &[Vec<u32>]) -> Result<ClassFunction> {
    if refinements.len() != f.shape.blocks.len() {
        return Err(Error::ShapeMismatch("one refinement per block required".into()));
    }
    let q = f.shape.q;
    let field = fq_of_order(q)?;
    let coarse_sets = f.shape.class_sets()?;
    let mut fine_blocks: Vec<u32> = Vec::new();
    let mut levis: Vec<LeviDatum> = Vec::new();
    for (i, r) in refinements.iter().enumerate() {
        let levi = LeviDatum::new(f.shape.blocks[i], q, r.clone())?;
        fine_blocks.extend(r.iter().copied());
        levis.push(levi);
    }
    let fine_shape = Shape::new(q, fine_blocks);
    let fine_sets = fine_shape.class_sets()?;
    let total_dim_u: u32 = levis.iter().map(|l| l.dim_u()).sum();
    let qdim = (q as i64).pow(total_dim_u);

    // flat list of strictly-upper positions of every coarse block, offset so
    // the positions index into that block's matrix
    let positions_per_block: Vec<Vec<(usize, usize)>> = levis
        .iter()
        .map(|levi| {
            let spans = levi.block_spans();
            let mut pos = Vec::new();
            for (bi, &(r0, r1)) in spans.iter().enumerate() {
                for &(c0, c1) in spans.iter().skip(bi + 1) {
                    for i in r0..r1 {
                        for j in c0..c1 {
                            pos.push((i, j));
                        }
                    }
                }
            }
            pos
        })
        .collect();

    let count: usize = fine_sets.iter().map(|s| s.len()).product();
    let mut values = Vec::with_capacity(count);
    let mut tuple = vec![0usize; fine_sets.len()];
    for flat in 0..count {
        let mut rest = flat;
        for i in (0..fine_sets.len()).rev() {
            tuple[i] = rest % fine_sets[i].len();
            rest /= fine_sets[i].len();
        }
        // per coarse block, the embedded Levi representative
        let mut block_reps: Vec<Mat> = Vec::with_capacity(levis.len());
        let mut k = 0usize;
        for levi in &levis {
            let parts: Vec<Mat> = levi
                .composition
                .iter()
                .map(|_| {
                    let set = &fine_sets[k];
                    let rep = class_representative(&field, &set.classes[tuple[k]]);
                    k += 1;
                    rep
                })
                .collect();
            block_reps.push(block_diag(&parts));
        }
        // average f over the joint unipotent assignments
        let u_counts: Vec<usize> = positions_per_block
            .iter()
            .map(|p| (q as usize).pow(p.len() as u32))
            .collect();
        let joint: usize = u_counts.iter().product();
        let mut acc = Cyclo::integer(0);
        for assignment in 0..joint {
            let mut rest = assignment;
            let mut coarse_mats: Vec<Mat> = Vec::with_capacity(levis.len());
            for (bi, positions) in positions_per_block.iter().enumerate() {
                let local = rest % u_counts[bi];
                rest /= u_counts[bi];
                let mut m = block_reps[bi].clone();
                let mut digits = local;
                for &(i, j) in positions {
                    let v = (digits % q as usize) as u8;
                    digits /= q as usize;
                    if v != 0 {
                        // right-multiply by the elementary unipotent E_{i,j}(v);
                        // ranging over all root coordinates covers l·U exactly once
                        add_column_multiple(&mut m, i, j, v, &field);
                    }
                }
                coarse_mats.push(m);
            }
            let idx = levi_tuple_index(&field, &coarse_mats, &coarse_sets)?;
            acc = acc.add(&f.values[idx]);
        }
        values.push(acc.scale(1, qdim));
    }
    Ok(ClassFunction { shape: fine_shape, values })
}

/// m ← m · E_{i,j}(v): column j gains v times column i.
fn add_column_multiple(m: &mut Mat, i: usize, j: usize, v: u8, f: &Fq) {
    let n = m.n;
    for row in 0..n {
        let add = f.mul(m.get(row, i), v);
        let cur = m.get(row, j);
        m.set(row, j, f.add(cur, add));
    }
}

/// The fibre-sum route for restriction along a single-block Levi: enumerate
/// the full parabolic P(k) and sum χ over each τ-fibre, scaled by
/// q^{-dim τ}. Independent of the averaging implementation.
pub fn hc_restrict_fibre_sum(f: &ClassFunction, levi: &LeviDatum) -> Result<ClassFunction> {
    if f.shape.q != levi.q || f.shape.blocks != vec![levi.n] {
        return Err(Error::ShapeMismatch(format!(
            "function shape {:?} is not GL({})",
            f.shape, levi.n
        )));
    }
    let q = levi.q;
    let field = fq_of_order(q)?;
    let fine_shape = levi.levi_shape();
    let fine_sets = fine_shape.class_sets()?;
    let coarse_sets = f.shape.class_sets()?;
    let spans = levi.block_spans();
    // target representatives, keyed by their concatenated diagonal blocks
    let count: usize = fine_sets.iter().map(|s| s.len()).product();
    let mut rep_key_to_flat: std::collections::HashMap<Vec<u8>, usize> =
        std::collections::HashMap::new();
    let mut tuple = vec![0usize; fine_sets.len()];
    for flat in 0..count {
        let mut rest = flat;
        for i in (0..fine_sets.len()).rev() {
            tuple[i] = rest % fine_sets[i].len();
            rest /= fine_sets[i].len();
        }
        let key: Vec<u8> = tuple
            .iter()
            .enumerate()
            .flat_map(|(i, &t)| class_representative(&field, &fine_sets[i].classes[t]).a)
            .collect();
        rep_key_to_flat.insert(key, flat);
    }
    // enumerate P = (block diagonal in ∏ GL(m_i)) × (free upper entries)
    let block_groups: Vec<Arc<crate::gl_classes::GroupData>> = levi
        .composition
        .iter()
        .map(|&m| group_data(m, q))
        .collect::<Result<_>>()?;
    let mut upper_positions: Vec<(usize, usize)> = Vec::new();
    for (bi, &(r0, r1)) in spans.iter().enumerate() {
        for &(c0, c1) in spans.iter().skip(bi + 1) {
            for i in r0..r1 {
                for j in c0..c1 {
                    upper_positions.push((i, j));
                }
            }
        }
    }
    let u_count = (q as usize).pow(upper_positions.len() as u32);
    let mut sums = vec![Cyclo::integer(0); count];
    let diag_counts: Vec<usize> = block_groups.iter().map(|g| g.elements.len()).collect();
    let diag_total: usize = diag_counts.iter().product();
    for dflat in 0..diag_total {
        let mut idxs = vec![0usize; block_groups.len()];
        let mut rest = dflat;
        for i in (0..block_groups.len()).rev() {
            idxs[i] = rest % diag_counts[i];
            rest /= diag_counts[i];
        }
        let diag_mats: Vec<&Mat> = block_groups
            .iter()
            .enumerate()
            .map(|(i, g)| &g.elements[idxs[i]])
            .collect();
        let key: Vec<u8> = diag_mats.iter().flat_map(|m| m.a.clone()).collect();
        let target = match rep_key_to_flat.get(&key) {
            Some(&t) => t,
            None => continue, // the diagonal part is not one of the fibre base points
        };
        let base = assemble_parabolic(&diag_mats, &spans, levi.n as usize);
        for u in 0..u_count {
            let mut m = base.clone();
            let mut digits = u;
            for &(i, j) in &upper_positions {
                let v = (digits % q as usize) as u8;
                digits /= q as usize;
                if v != 0 {
                    m.set(i, j, v); // upper blocks of the base are zero
                }
            }
            let c = class_of_matrix(&field, &m)?;
            let ci = coarse_sets[0].index_of(&c);
            sums[target] = sums[target].add(&f.values[ci]);
        }
    }
    let qdim = (q as i64).pow(levi.dim_u());
    Ok(ClassFunction {
        shape: fine_shape,
        values: sums.into_iter().map(|s| s.scale(1, qdim)).collect(),
    })
}

fn assemble_parabolic(diag: &[&Mat], spans: &[(usize, usize)], n: usize) -> Mat {
    let mut m = Mat::zero(n);
    for (b, &(r0, _)) in diag.iter().zip(spans) {
        for i in 0..b.n {
            for j in 0..b.n {
                m.set(r0 + i, r0 + j, b.get(i, j));
            }
        }
    }
    m
}

/// Pointwise multiplication by q^{-n} (the function-level Tate twist).
pub fn tate_scale(f: &ClassFunction, n: i32) -> ClassFunction {
    let q = f.shape.q as i64;
    if n >= 0 {
        f.scale(1, q.pow(n as u32))
    } else {
        f.scale(q.pow((-n) as u32), 1)
    }
}

/// All compositions of n (ordered tuples of positive parts).
pub fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            let mut c = vec![first];
            c.append(&mut rest);
            out.push(c);
        }
    }
    out
}

/// The character θ_a of GL(1, F_q) = F_q^× as a class function.
pub fn gl1_character(q: u64, a: u64) -> Result<ClassFunction> {
    let field = fq_of_order(q)?;
    let tower = build_tower(field.p, field.e, 1)?;
    let theta = ResidueCharacter::new(q, 1, a);
    let shape = Shape::new(q, vec![1]);
    let set = class_set(1, q)?;
    let mut values = Vec::with_capacity(set.len());
    for class in &set.classes {
        // class polynomial is x - c
        let c = field.neg(class.data[0].0[0]);
        values.push(theta.evaluate(&tower, tower.embed_base(c))?);
    }
    Ok(ClassFunction { shape, values })
}

/// The character θ_b ∘ det of GL(n, F_q).
pub fn det_character(n: u32, q: u64, b: u64) -> Result<ClassFunction> {
    let field = fq_of_order(q)?;
    let tower = build_tower(field.p, field.e, 1)?;
    let theta = ResidueCharacter::new(q, 1, b);
    let set = class_set(n, q)?;
    let shape = Shape::new(q, vec![n]);
    let mut values = Vec::with_capacity(set.len());
    for class in &set.classes {
        let d = class.det(&field);
        values.push(theta.evaluate(&tower, tower.embed_base(d))?);
    }
    Ok(ClassFunction { shape, values })
}

/// The irreducible cuspidal character of GL(n, F_q) attached to a regular
/// residue character exponent: selected from the brute-force table by
/// degree ∏_{i<n}(q^i−1), vanishing proper restrictions, and regular
/// elliptic values (−1)^{n−1} Σ_j θ(x^{q^j}); uniqueness is verified.
/// Values are returned in the basis of Z\[ζ_{q^n−1}\].
pub fn cuspidal_character(n: u32, q: u64, a: u64) -> Result<ClassFunction> {
    let theta = ResidueCharacter::new(q, n, a);
    if !theta.is_regular() {
        return Err(Error::NonRegular { a, modulus: theta.modulus().max(1) });
    }
    let field = fq_of_order(q)?;
    let tower = build_tower(field.p, field.e, n)?;
    let table = character_table(n, q)?;
    let set = table.group.classes.clone();
    let target_degree: i64 = (1..n).map(|i| q.pow(i) as i64 - 1).product();
    // expected values on regular elliptic classes
    let m = theta.modulus();
    let sign = if (n - 1).is_multiple_of(2) { 1 } else { -1 };
    let mut elliptic_targets: Vec<(usize, Cyclo)> = Vec::new();
    for (ci, class) in set.classes.iter().enumerate() {
        if !class.is_regular_elliptic() {
            continue;
        }
        let poly = Poly { coeffs: class.data[0].0.clone() };
        let x = tower
            .elements()
            .find(|&z| tower.eval_base_poly(&poly, z) == 0)
            .ok_or_else(|| Error::Invalid("irreducible polynomial has no root upstairs".into()))?;
        let mut sum = Cyclo::zero(m);
        let mut xq = x;
        for _ in 0..n {
            sum = sum.add(&theta.evaluate(&tower, xq)?);
            xq = tower.frobenius(xq);
        }
        elliptic_targets.push((ci, sum.scale(sign, 1)));
    }
    let proper: Vec<Vec<u32>> = compositions(n)
        .into_iter()
        .filter(|c| c.len() > 1)
        .collect();
    let mut found: Vec<usize> = Vec::new();
    'next: for (ti, chi) in table.irreducibles.iter().enumerate() {
        if table.degrees[ti] != target_degree {
            continue;
        }
        for (ci, expected) in &elliptic_targets {
            if !chi.values[*ci].eq_value(expected) {
                continue 'next;
            }
        }
        for comp in &proper {
            let levi = LeviDatum::new(n, q, comp.clone())?;
            if !hc_restrict(chi, &levi)?.is_zero() {
                continue 'next;
            }
        }
        found.push(ti);
    }
    if found.len() != 1 {
        return Err(Error::OracleSelection { found: found.len() });
    }
    let chi = &table.irreducibles[found[0]];
    // rewrite in the natural basis Z[ζ_{q^n−1}]
    let values: Result<Vec<Cyclo>> = chi
        .values
        .iter()
        .map(|v| {
            v.try_lower_to(m).ok_or_else(|| {
                Error::Invalid("cuspidal value does not lie in Z[ζ_{q^n−1}]".into())
            })
        })
        .collect();
    Ok(ClassFunction { shape: chi.shape.clone(), values: values? })
}

/// The Frobenius-orbit–invariant virtual character attached to any exponent:
/// the cuspidal character for regular a; for n ≤ 2 and non-regular a, the
/// explicit decomposition over the table, with the sign pinned by
/// ⟨dl, dl⟩ = #{j : a q^j ≡ a}.
pub fn dl_virtual(n: u32, q: u64, a: u64) -> Result<ClassFunction> {
    let theta = ResidueCharacter::new(q, n, a);
    if theta.is_regular() {
        return cuspidal_character(n, q, a);
    }
    if n != 2 {
        return Err(Error::UnsupportedVirtual(format!(
            "non-regular exponent {a} in GL({n},{q})"
        )));
    }
    // non-regular for n = 2 means a = (q+1)·b
    debug_assert_eq!(theta.a % (q + 1), 0);
    let b = theta.a / (q + 1);
    let levi = LeviDatum::new(2, q, vec![1, 1])?;
    let pair = ClassFunction::tensor(&[gl1_character(q, b)?, gl1_character(q, b)?])?;
    let ind = hc_induce(&levi, &pair)?;
    let twist = det_character(2, q, b)?;
    ind.add(&twist.scale(-2, 1))
}
