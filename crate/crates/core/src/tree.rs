//! Fixed facets of elements of GL(2, F_q((π))) acting on the reduced
//! Bruhat–Tits tree.
//!
//! Vertices are homothety classes of o-lattices in K², canonicalised by the
//! upper-triangular normal form of a basis matrix; the tree is explored
//! breadth first from the standard vertex \[o²\]. For an isometry with a
//! nonempty fixed set the displacement d(v, g·v) equals twice the distance
//! from v to the fixed subtree, which is convex; the search follows
//! displacement-decreasing branches until the first fixed facet, then grows
//! only from fixed vertices, and stops at the first ring without one. An
//! element acts on the reduced tree only after its determinant valuation is
//! normalised away, which requires that valuation to be even.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finite_field::Fq;
use crate::laurent::{LMat, Laurent};
use crate::matrix::Mat;

/// Canonical name of a vertex: homothety-normalised triangular form
/// [[π^a, c],[0, π^b]] with c reduced mod π^a; key = (a, b, digits of c).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexKey {
    pub a: i64,
    pub b: i64,
    pub c: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct FixedVertex {
    pub key: VertexKey,
    /// exact polynomial basis with det = π^depth
    pub basis: LMat,
    pub depth: u32,
}

#[derive(Clone, Debug)]
pub struct FixedEdge {
    /// basis (b1, b2) of the parent lattice L with the child lattice equal
    /// to πb1·o ⊕ b2·o
    pub aligned_basis: LMat,
    pub parent: VertexKey,
    pub child: VertexKey,
}

#[derive(Debug)]
pub struct FixedFacets {
    pub vertices: Vec<FixedVertex>,
    pub edges: Vec<FixedEdge>,
    /// true when the radius hint stopped the search before natural
    /// termination
    pub truncated: bool,
}

/// Hard cap on the search radius when no hint is given.
const DEFAULT_MAX_RADIUS: u32 = 24;
/// Hard cap on explored vertices when no hint is given; elliptic fixed sets
/// at desk scale are far smaller, so overrunning this means the fixed set
/// is unbounded (split or central element).
const DEFAULT_MAX_VISITED: usize = 50_000;

/// B^{-1} g B via the adjugate: sound for any basis whose determinant has a
/// decidable valuation.
fn conjugate_by_basis(f: &Fq, basis: &LMat, g: &LMat) -> Result<LMat> {
    let det = basis.det(f);
    let dv = det
        .valuation()?
        .ok_or_else(|| Error::Invalid("degenerate lattice basis".into()))?;
    let raw = basis.adjugate(f).mul(f, g).mul(f, basis);
    let min_val = raw
        .a
        .iter()
        .map(|e| e.valuation_at_least())
        .min()
        .unwrap_or(0)
        .min(0);
    // det^{-1} precise enough to decide integrality and read the residue
    let det_inv = det.invert_to(f, 2 + dv - min_val)?;
    Ok(raw.scale(f, &det_inv))
}

/// Normalise the determinant valuation to zero (the scalar π acts trivially
/// on the reduced tree); odd valuations do not act on it at all.
fn normalize_det(f: &Fq, g: &LMat) -> Result<LMat> {
    let det = g.det(f);
    let dv = det.valuation()?.ok_or(Error::SingularMatrix)?;
    if dv.rem_euclid(2) != 0 {
        return Err(Error::OddDeterminantValuation);
    }
    Ok(g.shift(-dv / 2))
}

/// d(v, g·v) = -2·min(0, min valuation of B^{-1}gB), for det-normalised g.
fn displacement(conj: &LMat) -> Result<i64> {
    let mut min_val: i64 = 0;
    for e in &conj.a {
        if !e.coeffs.is_empty() {
            min_val = min_val.min(e.val);
        } else if let Some(p) = e.prec {
            if p < min_val {
                return Err(Error::InsufficientPrecision(format!(
                    "entry is 0 mod π^{p}; displacement is undecidable"
                )));
            }
        }
    }
    Ok(-2 * min_val)
}

/// The q+1 index-q sublattices of a lattice (containing π times it), as
/// right basis multipliers; the last one is diag(π, 1).
fn child_multipliers(q: u64) -> Vec<LMat> {
    let mut out = Vec::with_capacity(q as usize + 1);
    for c in 0..q as u8 {
        // columns (1, c) and (0, π)
        out.push(LMat::new(
            Laurent::one(),
            Laurent::zero(),
            Laurent::constant(c),
            Laurent::monomial(1, 1),
        ));
    }
    // columns (π, 0) and (0, 1)
    out.push(LMat::new(
        Laurent::monomial(1, 1),
        Laurent::zero(),
        Laurent::zero(),
        Laurent::one(),
    ));
    out
}

/// Canonical key of the homothety class of the lattice spanned by the
/// columns of an integral basis whose determinant has valuation det_val.
pub fn vertex_key(f: &Fq, basis: &LMat, det_val: i64) -> Result<VertexKey> {
    let m = det_val + 2; // the reduced invariants live below π^m
    let mut c0 = basis.column(0);
    let mut c1 = basis.column(1);
    let v0 = c0.1.valuation_at_least();
    let v1 = c1.1.valuation_at_least();
    if !c0.1.known_zero() && (c1.1.known_zero() || v0 < v1) {
        std::mem::swap(&mut c0, &mut c1);
    }
    if !c0.1.known_zero() {
        // val(c0.1) ≥ val(c1.1): one column operation clears the bottom entry
        let t = c0.1.div_to(f, &c1.1, m)?;
        c0 = (
            c0.0.sub(f, &t.mul(f, &c1.0)).truncate(m),
            c0.1.sub(f, &t.mul(f, &c1.1)).truncate(m),
        );
        if !c0.1.known_zero() {
            return Err(Error::InsufficientPrecision(
                "column reduction did not stabilise".into(),
            ));
        }
    }
    // triangular: columns (u, 0), (w, z)
    let a = c0
        .0
        .valuation()?
        .ok_or_else(|| Error::Invalid("degenerate lattice basis".into()))?;
    let b = c1
        .1
        .valuation()?
        .ok_or_else(|| Error::Invalid("degenerate lattice basis".into()))?;
    // normalise the second column by the unit part of z, then reduce w mod π^a
    let z_inv = c1.1.invert_to(f, m - b)?;
    let w = c1.0.mul(f, &z_inv).shift(b).truncate(m);
    let mut digits = vec![0u8; a.max(0) as usize];
    for (k, d) in digits.iter_mut().enumerate() {
        *d = w.coeff(k as i64)?;
    }
    // homothety normalisation: the representative is primitive
    let wv = digits
        .iter()
        .position(|&d| d != 0)
        .map(|i| i as i64)
        .unwrap_or(i64::MAX);
    let mu = a.min(b).min(wv);
    let mut c: Vec<u8> = if wv == i64::MAX {
        vec![]
    } else {
        digits[(mu as usize)..(a as usize)].to_vec()
    };
    while c.last() == Some(&0) {
        c.pop();
    }
    Ok(VertexKey { a: a - mu, b: b - mu, c })
}

struct Node {
    key: VertexKey,
    basis: LMat,
    depth: u32,
    fixed: bool,
    displacement: i64,
}

/// Exhaustive enumeration of the facets of the reduced tree fixed by g.
pub fn fixed_facets_gl2(
    f: &Arc<Fq>,
    g_in: &LMat,
    radius_hint: Option<u32>,
) -> Result<FixedFacets> {
    let g = normalize_det(f, g_in)?;

    let base = LMat::identity();
    let base_conj = conjugate_by_basis(f, &base, &g)?;
    let base_disp = displacement(&base_conj)?;
    let certify_depth = (base_disp / 2) as u32;

    let max_radius = radius_hint.unwrap_or(DEFAULT_MAX_RADIUS);
    let mults = child_multipliers(f.q);

    let mut visited: HashMap<VertexKey, ()> = HashMap::new();
    let mut fixed_vertices: Vec<FixedVertex> = Vec::new();
    let mut fixed_edges: Vec<FixedEdge> = Vec::new();
    let mut truncated = false;

    let base_key = vertex_key(f, &base, 0)?;
    let base_fixed = base_conj.all_integral()?;
    let mut found_any = base_fixed;
    visited.insert(base_key.clone(), ());
    if base_fixed {
        fixed_vertices.push(FixedVertex { key: base_key.clone(), basis: base.clone(), depth: 0 });
    }
    let mut frontier: VecDeque<Node> = VecDeque::new();
    frontier.push_back(Node {
        key: base_key,
        basis: base,
        depth: 0,
        fixed: base_fixed,
        displacement: base_disp,
    });

    fn expandable(n: &Node, found_any: bool, certify_depth: u32) -> bool {
        if found_any {
            n.fixed
        } else {
            n.displacement == 2 * (certify_depth as i64 - n.depth as i64)
        }
    }

    let mut depth = 0u32;
    loop {
        if frontier.is_empty()
            || !frontier.iter().any(|n| expandable(n, found_any, certify_depth))
        {
            break;
        }
        if !found_any && depth >= certify_depth {
            break; // certified: no fixed point exists at all
        }
        if depth >= max_radius {
            if radius_hint.is_some() {
                truncated = true;
                break;
            }
            return Err(Error::UnboundedFixedSet);
        }
        if radius_hint.is_none() && visited.len() > DEFAULT_MAX_VISITED {
            return Err(Error::UnboundedFixedSet);
        }
        let mut next: VecDeque<Node> = VecDeque::new();
        while let Some(node) = frontier.pop_front() {
            if !expandable(&node, found_any, certify_depth) {
                continue;
            }
            for (mi, mult) in mults.iter().enumerate() {
                let child_basis = node.basis.mul(f, mult);
                let child_depth = node.depth + 1;
                let key = vertex_key(f, &child_basis, child_depth as i64)?;
                if visited.contains_key(&key) {
                    continue;
                }
                visited.insert(key.clone(), ());
                let conj = conjugate_by_basis(f, &child_basis, &g)?;
                let fixed = conj.all_integral()?;
                let disp = if fixed { 0 } else { displacement(&conj)? };
                if fixed {
                    fixed_vertices.push(FixedVertex {
                        key: key.clone(),
                        basis: child_basis.clone(),
                        depth: child_depth,
                    });
                    if node.fixed {
                        fixed_edges.push(FixedEdge {
                            aligned_basis: aligned_edge_basis(f, &node.basis, mi, mults.len()),
                            parent: node.key.clone(),
                            child: key.clone(),
                        });
                    }
                    found_any = true;
                }
                next.push_back(Node { key, basis: child_basis, depth: child_depth, fixed, displacement: disp });
            }
        }
        frontier = next;
        depth += 1;
    }

    Ok(FixedFacets { vertices: fixed_vertices, edges: fixed_edges, truncated })
}

/// Basis (b1, b2) of the parent lattice such that the child reached through
/// multiplier `mi` is πb1·o ⊕ b2·o.
fn aligned_edge_basis(f: &Fq, parent_basis: &LMat, mi: usize, mult_count: usize) -> LMat {
    let b1 = parent_basis.column(0);
    let b2 = parent_basis.column(1);
    if mi + 1 == mult_count {
        // child = πb1 ⊕ b2: already aligned
        parent_basis.clone()
    } else {
        // child = (b1 + c·b2)·o ⊕ π·b2·o: aligned by (b2, b1 + c·b2)
        let cc = Laurent::constant(mi as u8);
        let new_b2 = (b1.0.add(f, &cc.mul(f, &b2.0)), b1.1.add(f, &cc.mul(f, &b2.1)));
        LMat::from_columns(b2, new_b2)
    }
}

/// Reduction of g at a fixed vertex: the residue of B^{-1} g B in GL(2, F_q).
pub fn vertex_reduction(f: &Arc<Fq>, vertex: &FixedVertex, g: &LMat) -> Result<Mat> {
    let gn = normalize_det(f, g)?;
    let conj = conjugate_by_basis(f, &vertex.basis, &gn)?;
    let r = conj.residue()?;
    Ok(Mat::from_rows(&[&r[0], &r[1]]))
}

/// Reduction of g at a fixed edge: the diagonal residues acting on the two
/// graded pieces L/L' and L'/πL of the chain.
pub fn edge_reduction(f: &Arc<Fq>, edge: &FixedEdge, g: &LMat) -> Result<(u8, u8)> {
    let gn = normalize_det(f, g)?;
    let conj = conjugate_by_basis(f, &edge.aligned_basis, &gn)?;
    let r = conj.residue()?;
    if r[0][1] != 0 {
        return Err(Error::Invalid(
            "edge reduction does not stabilise the chain".into(),
        ));
    }
    Ok((r[0][0], r[1][1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::fq;

    #[test]
    fn elliptic_residue_element_fixes_one_vertex() {
        // companion of an irreducible quadratic over F_q: the reduction mod π
        // is elliptic, so exactly the standard vertex is fixed
        for (q, m) in [(2u64, [[0u8, 1], [1, 1]]), (3, [[0, 2], [1, 0]])] {
            let f = fq(q, 1).unwrap();
            let g = LMat::from_residues(m);
            let fixed = fixed_facets_gl2(&f, &g, None).unwrap();
            assert_eq!(fixed.vertices.len(), 1, "q = {q}");
            assert_eq!(fixed.edges.len(), 0);
            assert!(!fixed.truncated);
            assert_eq!(fixed.vertices[0].depth, 0);
            // the reduction at the standard vertex is the matrix itself
            let red = vertex_reduction(&f, &fixed.vertices[0], &g).unwrap();
            assert_eq!(red, Mat::from_rows(&[&m[0], &m[1]]));
        }
    }

    #[test]
    fn identity_needs_a_radius_hint() {
        let f = fq(2, 1).unwrap();
        let id = LMat::identity();
        assert!(matches!(
            fixed_facets_gl2(&f, &id, None),
            Err(Error::UnboundedFixedSet)
        ));
        // truncated report: all facets within the hint
        let fixed = fixed_facets_gl2(&f, &id, Some(2)).unwrap();
        assert!(fixed.truncated);
        let q = 2usize;
        let expect_vertices = 1 + (q + 1) + (q + 1) * q;
        let expect_edges = (q + 1) + (q + 1) * q;
        assert_eq!(fixed.vertices.len(), expect_vertices);
        assert_eq!(fixed.edges.len(), expect_edges);
    }

    #[test]
    fn split_units_fix_the_apartment_line() {
        // diag(1, 2) over F_3((π)): the fixed set is the full apartment line
        let f = fq(3, 1).unwrap();
        let g = LMat::from_residues([[1, 0], [0, 2]]);
        let r = 3;
        let fixed = fixed_facets_gl2(&f, &g, Some(r)).unwrap();
        assert!(fixed.truncated);
        assert_eq!(fixed.vertices.len(), 2 * r as usize + 1);
        assert_eq!(fixed.edges.len(), 2 * r as usize);
        // the fixed vertices are exactly [diag(π^j, 1)] up to homothety:
        // keys (j, 0, []) and (0, j, [])
        let mut keys: Vec<(i64, i64)> = fixed.vertices.iter().map(|v| (v.key.a, v.key.b)).collect();
        keys.sort_unstable();
        for v in &fixed.vertices {
            assert!(v.key.c.is_empty());
        }
        let mut expect: Vec<(i64, i64)> = (0..=r as i64)
            .map(|j| (j, 0))
            .chain((1..=r as i64).map(|j| (0, j)))
            .collect();
        expect.sort_unstable();
        assert_eq!(keys, expect);
    }

    #[test]
    fn reduction_map_on_the_standard_vertex() {
        // g ∈ GL(2, o) with unit-entry reduction: fixes the base, and the
        // reduction map is literally "mod π"
        let f = fq(3, 1).unwrap();
        let g = LMat::new(
            Laurent::normalized(0, vec![1, 2, 1], None), // 1 + 2π + π²
            Laurent::normalized(0, vec![2, 1], None),
            Laurent::normalized(1, vec![1], None), // π
            Laurent::normalized(0, vec![1, 0, 2], None),
        );
        let fixed = fixed_facets_gl2(&f, &g, Some(0)).unwrap();
        assert!(!fixed.vertices.is_empty());
        let base = fixed.vertices.iter().find(|v| v.depth == 0).unwrap();
        let red = vertex_reduction(&f, base, &g).unwrap();
        assert_eq!(red, Mat::from_rows(&[&[1, 2], &[0, 1]]));
    }

    #[test]
    fn odd_determinant_valuation_is_rejected() {
        let f = fq(3, 1).unwrap();
        let g = LMat::new(
            Laurent::monomial(1, 1),
            Laurent::zero(),
            Laurent::zero(),
            Laurent::one(),
        );
        assert!(matches!(
            fixed_facets_gl2(&f, &g, None),
            Err(Error::OddDeterminantValuation)
        ));
    }

    #[test]
    fn conjugated_elliptic_element_is_found_off_the_base() {
        // h g h^{-1} fixes h·[o²]; h is an elementary shear with π-entries,
        // so the fixed vertex sits away from the base and the descent phase
        // has to locate it
        let f = fq(2, 1).unwrap();
        let g = LMat::from_residues([[0, 1], [1, 1]]);
        // h = [[1, 0], [π, 1]] · [[1, π²],[0,1]]
        let h = LMat::new(
            Laurent::one(),
            Laurent::zero(),
            Laurent::monomial(1, 1),
            Laurent::one(),
        )
        .mul(
            &f,
            &LMat::new(
                Laurent::one(),
                Laurent::monomial(1, 2),
                Laurent::zero(),
                Laurent::one(),
            ),
        );
        let hinv = h.adjugate(&f); // det h = 1
        let conj = h.mul(&f, &g).mul(&f, &hinv);
        let fixed = fixed_facets_gl2(&f, &conj, None).unwrap();
        assert_eq!(fixed.vertices.len(), 1);
        assert_eq!(fixed.edges.len(), 0);
        // the class of the reduction is preserved under transport
        let red = vertex_reduction(&f, &fixed.vertices[0], &conj).unwrap();
        let c1 = crate::gl_classes::class_of_matrix(&f, &red).unwrap();
        let c2 = crate::gl_classes::class_of_matrix(&f, &Mat::from_rows(&[&[0, 1], &[1, 1]])).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn truncated_inputs_can_fail_honestly() {
        // an element known only mod π cannot certify vertices far away
        let f = fq(2, 1).unwrap();
        let g = LMat::new(
            Laurent::normalized(0, vec![1], Some(1)),
            Laurent::normalized(0, vec![], Some(1)),
            Laurent::normalized(0, vec![], Some(1)),
            Laurent::normalized(0, vec![1], Some(1)),
        );
        let res = fixed_facets_gl2(&f, &g, Some(3));
        assert!(matches!(res, Err(Error::InsufficientPrecision(_))));
    }
}
