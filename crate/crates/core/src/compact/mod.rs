//! Root-of-unity representation of the quantized triangle coordinates.
//!
//! Each triangle `t` owns one tensor factor `C^N`, on which its generators
//! act as the clock `U = diag(omega^k)` and the shift `V|k> = |k+1>`, so
//! that `U V = omega V U`. Moves act on generators by the morphisms `M_h`,
//! which depend on a classical point `h` threaded along a move word.
//!
//! A [`GeneratorMap`] records the image of every generator of the current
//! triangulation as a matrix on the Hilbert space of the starting one.

mod intertwiner;
mod psi;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::classical::{triangle_move, TrianglePoint};
use crate::scalar::{q_to_f64, Q};
use crate::triangulation::{DecoratedTriangulation, EdgeId, Move, MoveWord, TriId};
use crate::{Error, Result};

pub use intertwiner::{
    build_t, conjugation_residual, loop_operator, relabel_operator, rotation_intertwiner,
    LoopOperator, MatrixOperator,
};
pub use psi::{cyclic_psi, cyclic_psi_from, CyclicPsi};

pub type CMat = DMatrix<Complex64>;

/// Largest Hilbert space dimension a context may have.
pub const MAX_DIM: usize = 4096;

/// `max |a_ij - b_ij|`.
pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular matrix".into()))
}

pub fn power(a: &CMat, k: usize) -> CMat {
    let mut out = CMat::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

#[derive(Clone, Debug)]
pub struct CyclicRepContext {
    n: usize,
    triangles: Vec<TriId>,
    omega: Complex64,
    omega_half: Complex64,
    gens: BTreeMap<TriId, [CMat; 2]>,
}

impl CyclicRepContext {
    /// Context on the tensor factors of `triangles`, in that order.
    pub fn new(n: usize, triangles: Vec<TriId>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Constraint(format!("N must be at least 2, got {n}")));
        }
        let mut sorted = triangles.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != triangles.len() || triangles.is_empty() {
            return Err(Error::Constraint(
                "factor triangles must be distinct".into(),
            ));
        }
        let dim = n
            .checked_pow(triangles.len() as u32)
            .filter(|&d| d <= MAX_DIM)
            .ok_or_else(|| Error::Constraint(format!("dimension above {MAX_DIM}")))?;
        let mut ctx = Self {
            n,
            triangles,
            omega: Complex64::from_polar(1.0, 2.0 * PI / n as f64),
            omega_half: Complex64::from_polar(1.0, PI * (n as f64 + 1.0) / n as f64),
            gens: BTreeMap::new(),
        };
        let (u, v) = (ctx.clock(), ctx.shift());
        for &t in &ctx.triangles.clone() {
            let g = [ctx.embed(&u, &[t])?, ctx.embed(&v, &[t])?];
            ctx.gens.insert(t, g);
        }
        debug_assert_eq!(ctx.dim(), dim);
        Ok(ctx)
    }

    /// Context on all triangles of `d`.
    pub fn build(d: &DecoratedTriangulation, n: usize) -> Result<Self> {
        Self::new(n, (0..d.num_triangles()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// The square root `exp(i pi (N+1) / N)` of omega; its `N`-th power is
    /// `(-1)^(N-1)`.
    pub fn omega_half(&self) -> Complex64 {
        self.omega_half
    }

    pub fn triangles(&self) -> &[TriId] {
        &self.triangles
    }

    pub fn contains(&self, t: TriId) -> bool {
        self.gens.contains_key(&t)
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.triangles.len() as u32)
    }

    pub fn clock(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| {
            if i == j {
                self.omega.powu(i as u32)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn shift(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| {
            if i == (j + 1) % self.n {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Generator `i` (0 or 1) of triangle `t` on the full space.
    pub fn generator(&self, t: TriId, i: usize) -> Result<&CMat> {
        self.gens
            .get(&t)
            .map(|g| &g[i])
            .ok_or(Error::UnknownTriangle(t))
    }

    fn position(&self, t: TriId) -> Result<usize> {
        self.triangles
            .iter()
            .position(|&u| u == t)
            .ok_or(Error::UnknownTriangle(t))
    }

    /// Embeds an operator acting on the factors of `tris` (first factor
    /// most significant) into the full space.
    pub fn embed(&self, op: &CMat, tris: &[TriId]) -> Result<CMat> {
        let m = self.triangles.len();
        let k = tris.len();
        if op.nrows() != self.n.pow(k as u32) || op.ncols() != op.nrows() {
            return Err(Error::Domain(
                "operator size does not match its factors".into(),
            ));
        }
        let pos: Vec<usize> = tris
            .iter()
            .map(|&t| self.position(t))
            .collect::<Result<_>>()?;
        let dim = self.dim();
        let digits = |mut i: usize| {
            let mut d = vec![0; m];
            for p in (0..m).rev() {
                d[p] = i % self.n;
                i /= self.n;
            }
            d
        };
        let sub = |d: &[usize]| pos.iter().fold(0, |acc, &p| acc * self.n + d[p]);
        let all: Vec<Vec<usize>> = (0..dim).map(digits).collect();
        let rest = |d: &[usize]| -> Vec<usize> {
            (0..m).filter(|p| !pos.contains(p)).map(|p| d[p]).collect()
        };
        let rests: Vec<Vec<usize>> = all.iter().map(|d| rest(d)).collect();
        let subs: Vec<usize> = all.iter().map(|d| sub(d)).collect();
        Ok(CMat::from_fn(dim, dim, |i, j| {
            if rests[i] == rests[j] {
                op[(subs[i], subs[j])]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Largest residual of the defining relations: `U V = omega V U`,
    /// `U^N = V^N = 1` per triangle, commutation across triangles,
    /// unitarity, and the two constraints on the square root of omega.
    pub fn relation_residual(&self) -> f64 {
        let id = GeneratorMap::identity(self);
        let mut r = id.relation_residual(self);
        for g in self.gens.values().flatten() {
            r = r.max(max_diff(
                &(g * g.adjoint()),
                &CMat::identity(g.nrows(), g.ncols()),
            ));
        }
        let n = self.n as u32;
        r = r.max((self.omega_half * self.omega_half - self.omega).norm());
        let sign = if self.n % 2 == 1 { 1.0 } else { -1.0 };
        // omega^(N/2) with the chosen root equals (-1)^(N-1)
        r.max((self.omega_half.powu(n) - sign).norm())
    }
}

/// Images of the generators of the current triangulation.
#[derive(Clone, Debug)]
pub struct GeneratorMap {
    pub images: BTreeMap<TriId, [CMat; 2]>,
}

impl GeneratorMap {
    pub fn identity(ctx: &CyclicRepContext) -> Self {
        Self {
            images: ctx.gens.clone(),
        }
    }

    fn get(&self, t: TriId) -> Result<&[CMat; 2]> {
        self.images.get(&t).ok_or(Error::UnknownTriangle(t))
    }

    /// Largest entrywise distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.images
            .iter()
            .flat_map(|(t, a)| {
                let b = other.images.get(t);
                a.iter().enumerate().map(move |(i, m)| match b {
                    Some(b) => max_diff(m, &b[i]),
                    None => f64::INFINITY,
                })
            })
            .fold(0.0, f64::max)
    }

    /// Residual of the relations of the algebra among the images.
    pub fn relation_residual(&self, ctx: &CyclicRepContext) -> f64 {
        let dim = ctx.dim();
        let id = CMat::identity(dim, dim);
        let w = ctx.omega;
        let mut r: f64 = 0.0;
        let scale = |m: &CMat| max_abs(m).max(1.0);
        for (t, [a, b]) in &self.images {
            let ab = a * b;
            r = r.max(max_diff(&ab, &(b * a * w)) / scale(&ab));
            r = r.max(max_diff(&power(a, ctx.n), &id));
            r = r.max(max_diff(&power(b, ctx.n), &id));
            for (u, other) in &self.images {
                if u <= t {
                    continue;
                }
                for x in [a, b] {
                    for y in other {
                        let xy = x * y;
                        r = r.max(max_diff(&xy, &(y * x)) / scale(&xy));
                    }
                }
            }
        }
        r
    }
}

/// `h_{x,y} = (x1 y2 / x2)^(1/N)`.
pub fn h_xy(x: [f64; 2], y: [f64; 2], n: usize) -> f64 {
    (x[0] * y[1] / x[1]).powf(1.0 / n as f64)
}

/// Corner change on triangle `t`: `(A1, A2) -> (omega^(1/2) A1^-1 A2, A1^-1)`.
pub fn corner_step(ctx: &CyclicRepContext, phi: &GeneratorMap, t: TriId) -> Result<GeneratorMap> {
    let [a1, a2] = phi.get(t)?;
    let a1i = inverse(a1)?;
    let mut out = phi.clone();
    out.images.insert(t, [&a1i * a2 * ctx.omega_half, a1i]);
    Ok(out)
}

/// Flip of `x` and `y` with parameter `h = h_{x,y}`:
/// `x' = (X1 Y1, B)`, `y' = (Y1 X2 B^-1, Y2 B^-1)` with
/// `B = (X2 + h X1 Y2) / (1 + h^N)^(1/N)`.
pub fn flip_step(
    ctx: &CyclicRepContext,
    phi: &GeneratorMap,
    x: TriId,
    y: TriId,
    h: f64,
) -> Result<GeneratorMap> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!(
            "flip parameter must be positive, got {h}"
        )));
    }
    let [x1, x2] = phi.get(x)?;
    let [y1, y2] = phi.get(y)?;
    let norm = (1.0 + h.powi(ctx.n as i32)).powf(1.0 / ctx.n as f64);
    let b = (x2 + x1 * y2 * Complex64::new(h, 0.0)) / Complex64::new(norm, 0.0);
    let bi = inverse(&b)?;
    let mut out = phi.clone();
    out.images.insert(x, [x1 * y1, b]);
    out.images.insert(y, [y1 * x2 * &bi, y2 * &bi]);
    Ok(out)
}

/// Image of the generators under the corner change in `t`.
pub fn morphism_corner_change(ctx: &CyclicRepContext, t: TriId) -> Result<GeneratorMap> {
    corner_step(ctx, &GeneratorMap::identity(ctx), t)
}

/// Image of the generators under the flip along `e` at the classical point
/// `h` of the source triangulation.
pub fn morphism_flip(
    ctx: &CyclicRepContext,
    d: &DecoratedTriangulation,
    e: EdgeId,
    h: &TrianglePoint<f64>,
) -> Result<GeneratorMap> {
    let r = d.flip_roles(e)?;
    let p = h_xy(h.0[r.x], h.0[r.y], ctx.n);
    flip_step(ctx, &GeneratorMap::identity(ctx), r.x, r.y, p)
}

pub fn to_f64(k: &TrianglePoint<Q>) -> TrianglePoint<f64> {
    k.map(q_to_f64)
}

/// One step of a move word on a generator map, with the classical point
/// `h` of the source triangulation.
pub fn generator_step(
    ctx: &CyclicRepContext,
    d: &DecoratedTriangulation,
    phi: &GeneratorMap,
    h: &TrianglePoint,
    m: &Move,
) -> Result<GeneratorMap> {
    match m {
        Move::Flip { edge } => {
            let r = d.flip_roles(*edge)?;
            let hp = h_xy(to_f64_pair(&h.0[r.x]), to_f64_pair(&h.0[r.y]), ctx.n);
            flip_step(ctx, phi, r.x, r.y, hp)
        }
        Move::Rotate { tri } => corner_step(ctx, phi, *tri),
        Move::Relabel { map } => {
            map.check(d)?;
            let mut out = GeneratorMap {
                images: BTreeMap::new(),
            };
            for (t, img) in &phi.images {
                out.images.insert(map.triangles[*t], img.clone());
            }
            if out.images.keys().any(|t| !ctx.contains(*t)) {
                return Err(Error::Domain(
                    "relabeling moves a triangle out of the context".into(),
                ));
            }
            Ok(out)
        }
    }
}

fn to_f64_pair(p: &[Q; 2]) -> [f64; 2] {
    [q_to_f64(&p[0]), q_to_f64(&p[1])]
}

/// Result of composing the morphisms along a word.
#[derive(Clone, Debug)]
pub struct LoopReport {
    pub map: GeneratorMap,
    pub end: DecoratedTriangulation,
    pub end_point: TrianglePoint,
    /// Distance of the composite to the identity map; meaningful when the
    /// word returns to its starting triangulation.
    pub residual: f64,
    /// Largest relation residual seen on any intermediate map.
    pub relation_residual: f64,
}

/// Composes `M_h` along `word`, threading `h` by the classical flow:
/// the map after step `i` is the map before it composed with the morphism
/// of step `i` at the point reached after `i` steps.
pub fn compose_loop(
    ctx: &CyclicRepContext,
    d: &DecoratedTriangulation,
    word: &MoveWord,
    h: &TrianglePoint,
    check_relations: bool,
) -> Result<LoopReport> {
    let mut phi = GeneratorMap::identity(ctx);
    let mut cur = (d.clone(), h.clone());
    let mut rel: f64 = 0.0;
    for (index, m) in word.iter().enumerate() {
        let wrap = |e| Error::WordStep {
            index,
            source: Box::new(e),
        };
        phi = generator_step(ctx, &cur.0, &phi, &cur.1, m).map_err(wrap)?;
        cur = triangle_move(&cur.0, &cur.1, m).map_err(wrap)?;
        if check_relations {
            rel = rel.max(phi.relation_residual(ctx));
        }
    }
    let residual = phi.distance(&GeneratorMap::identity(ctx));
    Ok(LoopReport {
        map: phi,
        end: cur.0,
        end_point: cur.1,
        residual,
        relation_residual: rel,
    })
}

/// Triangles whose factors a word acts on.
pub fn touched_triangles(d: &DecoratedTriangulation, word: &MoveWord) -> Result<Vec<TriId>> {
    let mut out = std::collections::BTreeSet::new();
    let mut cur = d.clone();
    for m in word.iter() {
        match m {
            Move::Flip { edge } => {
                let r = cur.flip_roles(*edge)?;
                out.extend([r.x, r.y]);
            }
            Move::Rotate { tri } => {
                out.insert(*tri);
            }
            Move::Relabel { map } => {
                for (t, &u) in map.triangles.iter().enumerate() {
                    if t != u {
                        out.extend([t, u]);
                    }
                }
            }
        }
        cur = cur.apply(m)?;
    }
    Ok(out.into_iter().collect())
}

/// Scalar-dressed generators `t_i^(1/N) * g_i` of a map at a point.
pub fn dressed(ctx: &CyclicRepContext, phi: &GeneratorMap, k: &TrianglePoint<f64>) -> GeneratorMap {
    let r = 1.0 / ctx.n as f64;
    let images = phi
        .images
        .iter()
        .map(|(&t, [a, b])| {
            let [t1, t2] = k.0[t];
            (
                t,
                [
                    a * Complex64::new(t1.powf(r), 0.0),
                    b * Complex64::new(t2.powf(r), 0.0),
                ],
            )
        })
        .collect();
    GeneratorMap { images }
}

/// Relative residual between the dressed images of a flip and the
/// classical formulas `x . y`, `x * y` evaluated on dressed generators
/// (in the operator ordering of the morphism).
pub fn dressing_residual(
    ctx: &CyclicRepContext,
    d: &DecoratedTriangulation,
    e: EdgeId,
    k: &TrianglePoint<f64>,
) -> Result<f64> {
    let r = d.flip_roles(e)?;
    let phi = morphism_flip(ctx, d, e, k)?;
    let moved = crate::classical::decorated_flip(d, k, e)?;
    let new = dressed(ctx, &phi, &moved);
    let old = dressed(ctx, &GeneratorMap::identity(ctx), k);
    let [x1, x2] = old.get(r.x)?;
    let [y1, y2] = old.get(r.y)?;
    let b = x2 + x1 * y2;
    let bi = inverse(&b)?;
    let predicted = [[x1 * y1, b], [y1 * x2 * &bi, y2 * &bi]];
    let got = [new.get(r.x)?, new.get(r.y)?];
    let mut res: f64 = 0.0;
    for (p, g) in predicted.iter().zip(got) {
        for i in 0..2 {
            res = res.max(max_diff(&p[i], &g[i]) / max_abs(&p[i]));
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{triangle_from_penner, PennerPoint, Sampler};
    use crate::triangulation::double_flip_word;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_generators() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let ctx = CyclicRepContext::new(2, vec![0]).unwrap();
        assert!(
            max_diff(
                &ctx.clock(),
                &CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1., 0.), c(-1., 0.)]))
            ) < 1e-15
        );
        assert_eq!(
            ctx.shift(),
            CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
        );
        assert!(ctx.relation_residual() <= 1e-15);
        let full = CyclicRepContext::build(&d, 3).unwrap();
        assert_eq!(full.dim(), 9);
        assert!(full.relation_residual() <= 1e-14);
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(CyclicRepContext::new(1, vec![0]).is_err());
        assert!(CyclicRepContext::new(2, vec![0, 0]).is_err());
        assert!(CyclicRepContext::new(7, (0..6).collect()).is_err());
    }

    #[test]
    fn corner_change_has_order_three() {
        for n in [2, 3, 5] {
            let ctx = CyclicRepContext::new(n, vec![0, 1]).unwrap();
            let mut phi = GeneratorMap::identity(&ctx);
            for _ in 0..3 {
                phi = corner_step(&ctx, &phi, 1).unwrap();
                assert!(phi.relation_residual(&ctx) <= 1e-12);
            }
            assert!(phi.distance(&GeneratorMap::identity(&ctx)) <= 1e-12);
        }
    }

    #[test]
    fn n2_explicit_images() {
        let ctx = CyclicRepContext::new(2, vec![0]).unwrap();
        let phi = morphism_corner_change(&ctx, 0).unwrap();
        // omega^(1/2) = exp(3 i pi / 2) = -i; U^-1 V = [[0,1],[-1,0]]
        let a1 = CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        assert!(max_diff(&phi.images[&0][0], &a1) < 1e-15);
        assert!(max_diff(&phi.images[&0][1], &ctx.clock()) < 1e-15);
    }

    #[test]
    fn flip_images_satisfy_relations() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        for n in [2, 3, 5] {
            let ctx = CyclicRepContext::build(&d, n).unwrap();
            let mut s = Sampler::new(n as u64);
            let k = to_f64(&triangle_from_penner(&d, &s.penner(&d)).unwrap());
            for e in 0..3 {
                let w = d.normalize_for_flip(e).unwrap();
                let (dn, kn) = crate::classical::triangle_word(&d, &k, &w).unwrap();
                let phi = morphism_flip(&ctx, &dn, e, &kn).unwrap();
                assert!(phi.relation_residual(&ctx) <= 1e-12);
                assert!(dressing_residual(&ctx, &dn, e, &kn).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn double_flip_loop_is_identity() {
        let d = DecoratedTriangulation::new_surface(1, 1).unwrap();
        let mut s = Sampler::new(11);
        for n in [2, 3, 5] {
            let ctx = CyclicRepContext::build(&d, n).unwrap();
            for e in 0..3 {
                let w = double_flip_word(&d, e).unwrap();
                let h = triangle_from_penner(&d, &s.penner(&d)).unwrap();
                let r = compose_loop(&ctx, &d, &w, &h, true).unwrap();
                assert!(r.residual <= 1e-11, "N={n} e={e}: {}", r.residual);
                assert!(r.relation_residual <= 1e-12);
                assert_eq!(r.end_point, h);
            }
        }
    }

    #[test]
    fn embedding_orders_factors() {
        let ctx = CyclicRepContext::new(2, vec![4, 1]).unwrap();
        let u = ctx.clock();
        let id = CMat::identity(2, 2);
        assert!(max_diff(ctx.generator(4, 0).unwrap(), &u.kronecker(&id)) < 1e-15);
        assert!(max_diff(ctx.generator(1, 0).unwrap(), &id.kronecker(&u)) < 1e-15);
        let both = ctx.embed(&u.kronecker(&ctx.shift()), &[1, 4]).unwrap();
        assert!(max_diff(&both, &ctx.shift().kronecker(&u)) < 1e-15);
    }

    #[test]
    fn touched_by_double_flip() {
        let d = DecoratedTriangulation::new_surface(0, 4).unwrap();
        let w = double_flip_word(&d, 0).unwrap();
        let t = touched_triangles(&d, &w).unwrap();
        assert_eq!(t.len(), 2);
        let _ = PennerPoint::ones(&d);
    }
}
