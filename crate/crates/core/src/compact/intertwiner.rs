//! Operators implementing moves by conjugation: `Op * image = base * Op`
//! for every generator, where `image` is the morphism image of a generator
//! and `base` the generator itself.

use num_complex::Complex64;
use serde::Serialize;

use super::{
    cyclic_psi, flip_step, h_xy, inverse, max_abs, max_diff, power, CMat, CyclicRepContext,
    GeneratorMap,
};
use crate::classical::{triangle_move, TrianglePoint};
use crate::scalar::q_to_f64;
use crate::triangulation::{DecoratedTriangulation, Move, MoveWord, Relabeling, TriId};
use crate::{Error, Result};

/// A dense operator on the tensor factors of `factors`.
#[derive(Clone, Debug)]
pub struct MatrixOperator {
    pub matrix: CMat,
    pub factors: Vec<TriId>,
}

/// Scales `a` so that `|det a| = 1`.
fn unimodular(a: CMat) -> Result<CMat> {
    let det = a.determinant().norm();
    if !(det > 0.0 && det.is_finite()) {
        return Err(Error::Numerical("operator is singular".into()));
    }
    let s = det.powf(1.0 / a.nrows() as f64);
    Ok(a / Complex64::new(s, 0.0))
}

/// Flip intertwiner on the factors `(x, y)`:
/// `T = (sum_ij omega^(-ij) Y1^i X2^j) Psi_h(M)` with `M = -X2^-1 X1 Y2`,
/// normalised to `|det T| = 1`.
pub fn build_t(n: usize, x: TriId, y: TriId, h: f64) -> Result<MatrixOperator> {
    let local = CyclicRepContext::new(n, vec![x, y])?;
    let g = |t, i| local.generator(t, i).cloned();
    let (x1, x2, y2) = (g(x, 0)?, g(x, 1)?, g(y, 1)?);
    let y1 = g(y, 0)?;
    let m = -(inverse(&x2)? * &x1 * &y2);
    let psi = cyclic_psi(n, h)?;
    let pm = psi.apply(&m)?;
    let dim = local.dim();
    let mut s = CMat::zeros(dim, dim);
    let w = local.omega();
    let mut yi = CMat::identity(dim, dim);
    for i in 0..n {
        let mut xj = CMat::identity(dim, dim);
        for j in 0..n {
            s += &yi * &xj * w.powi(-((i * j) as i32));
            xj = &xj * &x2;
        }
        yi = &yi * &y1;
    }
    Ok(MatrixOperator {
        matrix: unimodular(s * pm)?,
        factors: vec![x, y],
    })
}

/// `max ||Op image - base Op||` over the generators of the triangles of
/// `images`, for an operator on the full space of `ctx`.
pub fn conjugation_residual(ctx: &CyclicRepContext, op: &CMat, images: &GeneratorMap) -> f64 {
    let scale = max_abs(op);
    images
        .images
        .iter()
        .flat_map(|(&t, img)| {
            (0..2).map(move |i| {
                let base = ctx.generator(t, i).expect("image of a context triangle");
                max_diff(&(op * &img[i]), &(base * op)) / scale
            })
        })
        .fold(0.0, f64::max)
}

/// Operator `R` with `R a_k = b_k R` for two Weyl pairs with the same
/// commutation relation, obtained by averaging `b^g X a^-g` over the
/// Heisenberg group; normalised to `|det R| = 1`.
pub fn rotation_intertwiner(a: &[CMat; 2], b: &[CMat; 2], n: usize) -> Result<CMat> {
    let dim = a[0].nrows();
    let a_inv = [inverse(&a[0])?, inverse(&a[1])?];
    let b_pow: Vec<Vec<CMat>> = (0..n)
        .map(|i| (0..n).map(|j| power(&b[0], i) * power(&b[1], j)).collect())
        .collect();
    let a_pow: Vec<Vec<CMat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| power(&a_inv[1], j) * power(&a_inv[0], i))
                .collect()
        })
        .collect();
    for seed in 0..dim * dim {
        let mut x = CMat::zeros(dim, dim);
        x[(seed / dim, seed % dim)] = Complex64::new(1.0, 0.0);
        let mut r = CMat::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                r += &b_pow[i][j] * &x * &a_pow[i][j];
            }
        }
        if max_abs(&r) > 1e-8 {
            return unimodular(r);
        }
    }
    Err(Error::Numerical("no intertwiner found".into()))
}

/// Permutation of tensor factors `P` with `P g_t P^-1 = g_{r(t)}`.
pub fn relabel_operator(ctx: &CyclicRepContext, r: &Relabeling) -> Result<CMat> {
    let tris = ctx.triangles();
    let m = tris.len();
    let n = ctx.n();
    let mut target = vec![0; m];
    for (p, &t) in tris.iter().enumerate() {
        let u = *r.triangles.get(t).ok_or(Error::UnknownTriangle(t))?;
        target[p] = tris
            .iter()
            .position(|&v| v == u)
            .ok_or_else(|| Error::Domain("relabeling leaves the context".into()))?;
    }
    let dim = ctx.dim();
    let mut out = CMat::zeros(dim, dim);
    for i in 0..dim {
        let mut digits = vec![0; m];
        let mut k = i;
        for p in (0..m).rev() {
            digits[p] = k % n;
            k /= n;
        }
        let mut moved = vec![0; m];
        for p in 0..m {
            moved[target[p]] = digits[p];
        }
        let j = moved.iter().fold(0, |acc, &d| acc * n + d);
        out[(j, i)] = Complex64::new(1.0, 0.0);
    }
    Ok(out)
}

/// Product of the move operators along a closed word.
#[derive(Clone, Debug, Serialize)]
pub struct LoopOperator {
    /// `K / trace(K) * dim` should be the identity; this is its distance.
    pub scalar_residual: f64,
    /// Modulus of the scalar after normalising `|det K| = 1`.
    pub modulus: f64,
    /// Argument of that scalar, in radians.
    pub phase: f64,
    /// `max ||K^-1 g K - Phi(g)||` against the composed generator map.
    pub map_residual: f64,
    /// Largest conjugation residual of a single move operator.
    pub step_residual: f64,
    #[serde(skip)]
    pub matrix: CMat,
}

/// Multiplies the flip, rotation and relabeling operators along `word`
/// (later moves on the left), threading `h` classically.
pub fn loop_operator(
    ctx: &CyclicRepContext,
    d: &DecoratedTriangulation,
    word: &MoveWord,
    h: &TrianglePoint,
) -> Result<LoopOperator> {
    let dim = ctx.dim();
    let n = ctx.n();
    let mut k = CMat::identity(dim, dim);
    let mut phi = GeneratorMap::identity(ctx);
    let mut cur = (d.clone(), h.clone());
    let mut step_residual: f64 = 0.0;
    let id = GeneratorMap::identity(ctx);
    for (index, m) in word.iter().enumerate() {
        let wrap = |e| Error::WordStep {
            index,
            source: Box::new(e),
        };
        let (op, image) = match m {
            Move::Flip { edge } => {
                let r = cur.0.flip_roles(*edge).map_err(wrap)?;
                let pt = |t: TriId| [q_to_f64(&cur.1 .0[t][0]), q_to_f64(&cur.1 .0[t][1])];
                let hp = h_xy(pt(r.x), pt(r.y), n);
                let t = build_t(n, r.x, r.y, hp).map_err(wrap)?;
                let op = ctx.embed(&t.matrix, &t.factors).map_err(wrap)?;
                let img = flip_step(ctx, &id, r.x, r.y, hp).map_err(wrap)?;
                (op, img)
            }
            Move::Rotate { tri } => {
                let img = super::corner_step(ctx, &id, *tri).map_err(wrap)?;
                let local = CyclicRepContext::new(n, vec![*tri]).map_err(wrap)?;
                let a = super::corner_step(&local, &GeneratorMap::identity(&local), *tri)
                    .map_err(wrap)?;
                let b = [local.clock(), local.shift()];
                let r = rotation_intertwiner(&a.images[tri], &b, n).map_err(wrap)?;
                (ctx.embed(&r, &[*tri]).map_err(wrap)?, img)
            }
            Move::Relabel { map } => {
                let p = relabel_operator(ctx, map).map_err(wrap)?;
                (
                    p,
                    GeneratorMap {
                        images: std::collections::BTreeMap::new(),
                    },
                )
            }
        };
        step_residual = step_residual.max(conjugation_residual(ctx, &op, &image));
        phi = super::generator_step(ctx, &cur.0, &phi, &cur.1, m).map_err(wrap)?;
        k = &op * &k;
        cur = triangle_move(&cur.0, &cur.1, m).map_err(wrap)?;
    }
    let k_inv = inverse(&k)?;
    let mut map_residual: f64 = 0.0;
    for (&t, img) in &phi.images {
        for (i, im) in img.iter().enumerate() {
            let g = ctx.generator(t, i)?;
            map_residual = map_residual.max(max_diff(&(&k_inv * g * &k), im));
        }
    }
    let k = unimodular(k)?;
    let c = k.trace() / dim as f64;
    let scalar_residual = max_diff(&k, &(CMat::identity(dim, dim) * c));
    Ok(LoopOperator {
        scalar_residual,
        modulus: c.norm(),
        phase: c.arg(),
        map_residual,
        step_residual,
        matrix: k,
    })
}
