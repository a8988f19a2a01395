//! Verification suites. Each check produces one [`Property`]; a suite is a
//! list of properties with a verdict each, serialised as JSON by the CLI.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classical::{
    action_s_log_jacobian, alpha_form, beta_form, exactness_report, flow_equals_action_check,
    h1_basis, holonomy_covector, intersection_index, log_projection, penner_log_jacobian,
    penner_word, poisson_bracket, pullback_check, triangle_from_penner, triangle_log_jacobian,
    triangle_word, Sampler, TrianglePoint,
};
use crate::compact::{
    build_t, compose_loop, corner_step, cyclic_psi, cyclic_psi_from, flip_step, h_xy, inverse,
    loop_operator, max_abs, max_diff, power, touched_triangles, CMat, CyclicRepContext,
    GeneratorMap,
};
use crate::qdilog::{functional_residual, psi_eval, psi_eval_refined, Grid, QDilogParams};
use crate::scalar::{q_to_f64, Q};
use crate::triangulation::{
    apply_word, double_flip_word, find_pentagon, pentagon_word, torus_twist_words, Move, MoveWord,
};
use crate::{DecoratedTriangulation, Error, Result};

pub const CENSUS_SURFACES: [(u32, u32); 4] = [(1, 1), (0, 4), (1, 2), (2, 1)];
pub const SMALL_SURFACES: [(u32, u32); 2] = [(1, 1), (0, 4)];
pub const PENTAGON_SURFACES: [(u32, u32); 2] = [(0, 4), (1, 2)];
pub const COMPACT_N: [usize; 3] = [2, 3, 5];
pub const HBARS: [f64; 3] = [0.3, 1.0, PI / 2.0];
pub const GRID: Grid = Grid {
    start: -5.0,
    stop: 5.0,
    step: 0.25,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExactPass,
    ExactFail,
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        matches!(self, Verdict::ExactPass | Verdict::Pass)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Property {
    pub name: String,
    /// Acceptance criterion this property belongs to.
    pub criterion: u8,
    pub kind: Kind,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub detail: Value,
}

impl Property {
    pub fn exact(criterion: u8, name: impl Into<String>, ok: bool, detail: Value) -> Self {
        Property {
            name: name.into(),
            criterion,
            kind: Kind::Exact,
            verdict: if ok {
                Verdict::ExactPass
            } else {
                Verdict::ExactFail
            },
            residual: None,
            tolerance: None,
            detail,
        }
    }

    pub fn numeric(
        criterion: u8,
        name: impl Into<String>,
        residual: f64,
        tolerance: f64,
        detail: Value,
    ) -> Self {
        Property {
            name: name.into(),
            criterion,
            kind: Kind::Numeric,
            verdict: if residual <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            residual: Some(residual),
            tolerance: Some(tolerance),
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Runs `f`; an error becomes a failed property carrying the message.
fn guard(criterion: u8, name: &str, kind: Kind, f: impl FnOnce() -> Result<Property>) -> Property {
    f().unwrap_or_else(|e| Property {
        name: name.to_string(),
        criterion,
        kind,
        verdict: match kind {
            Kind::Exact => Verdict::ExactFail,
            Kind::Numeric => Verdict::Fail,
        },
        residual: None,
        tolerance: None,
        detail: json!({ "error": e.to_string() }),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Classical,
    QuantumCompact,
    Qdilog,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Classical => "classical",
            Suite::QuantumCompact => "quantum-compact",
            Suite::Qdilog => "qdilog",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    /// Restricts the classical suite to one surface; the acceptance
    /// surfaces are used when absent.
    pub surface: Option<(u32, u32)>,
    pub n_values: Vec<usize>,
    pub hbars: Vec<f64>,
    pub grid: Grid,
    pub runtime: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 7,
            surface: None,
            n_values: COMPACT_N.to_vec(),
            hbars: HBARS.to_vec(),
            grid: GRID,
            runtime: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<Property>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

pub fn run_suite(suite: Suite, opts: &Options) -> VerificationReport {
    let start = Instant::now();
    let mut props = Vec::new();
    let seed = opts.seed;
    if matches!(suite, Suite::Classical | Suite::All) {
        let only = opts.surface.map(|s| vec![s]);
        let pick = |default: &[(u32, u32)]| only.clone().unwrap_or_else(|| default.to_vec());
        props.extend(census(&pick(&CENSUS_SURFACES)));
        props.extend(ptolemy_involution(&pick(&SMALL_SURFACES), 1000, seed));
        props.extend(pentagon(&pick(&PENTAGON_SURFACES), 100, seed));
        props.extend(form_preservation(&pick(&SMALL_SURFACES), 100, seed));
        props.extend(intertwining_and_exactness(
            &pick(&CENSUS_SURFACES),
            100,
            seed,
        ));
        props.extend(poisson_intersection(&pick(&SMALL_SURFACES)));
        props.extend(flow_action(&pick(&[(0, 4)]), 20, seed));
        if only.is_none() || opts.surface == Some((1, 1)) {
            props.extend(mapping_class_classical(100, seed));
        }
    }
    if matches!(suite, Suite::QuantumCompact | Suite::All) {
        props.extend(compact_representation(&opts.n_values, seed));
        props.extend(cyclic_dilog(&opts.n_values));
        props.extend(mapping_class_compact(&opts.n_values, seed));
    }
    if matches!(suite, Suite::Qdilog | Suite::All) {
        props.extend(qdilog_checks(&opts.hbars, &opts.grid));
    }
    VerificationReport {
        suite: suite.name().to_string(),
        seed,
        passed: props.iter().all(Property::passed),
        properties: props,
        runtime_seconds: opts.runtime.then(|| start.elapsed().as_secs_f64()),
    }
}

fn surface(g: u32, s: u32) -> Result<DecoratedTriangulation> {
    DecoratedTriangulation::new_surface(g, s)
}

fn tag(g: u32, s: u32) -> String {
    format!("({g},{s})")
}

/// Criterion 1.
pub fn census(surfaces: &[(u32, u32)]) -> Vec<Property> {
    surfaces
        .iter()
        .map(|&(g, s)| {
            let name = format!("census {}", tag(g, s));
            guard(1, &name, Kind::Exact, || {
                let d = surface(g, s)?;
                let k = 2 * g as usize + s as usize - 2;
                let ok = d.num_triangles() == 2 * k
                    && d.num_edges() == 3 * k
                    && d.count_puncture_classes() == s as usize
                    && d.genus() == g
                    && d.validate().is_ok();
                Ok(Property::exact(
                    1,
                    name.clone(),
                    ok,
                    json!({
                        "triangles": d.num_triangles(),
                        "edges": d.num_edges(),
                        "punctures": d.count_puncture_classes(),
                        "euler_characteristic": d.euler_characteristic(),
                    }),
                ))
            })
        })
        .collect()
}

/// Criterion 2: every double flip word returns every sampled edge point.
pub fn ptolemy_involution(surfaces: &[(u32, u32)], samples: usize, seed: u64) -> Vec<Property> {
    surfaces
        .iter()
        .map(|&(g, s)| {
            let name = format!("ptolemy involution {}", tag(g, s));
            guard(2, &name, Kind::Exact, || {
                let d = surface(g, s)?;
                let words = (0..d.num_edges())
                    .map(|e| double_flip_word(&d, e))
                    .collect::<Result<Vec<_>>>()?;
                let mut rng = Sampler::new(seed);
                let mut bad = 0;
                for i in 0..samples {
                    let p = rng.penner(&d);
                    let w = &words[i % words.len()];
                    let (end, q) = penner_word(&d, &p, w)?;
                    if end.without_flags() != d || q != p {
                        bad += 1;
                    }
                }
                Ok(Property::exact(
                    2,
                    name.clone(),
                    bad == 0,
                    json!({ "points": samples, "edges": words.len(), "mismatches": bad }),
                ))
            })
        })
        .collect()
}

/// Criterion 3: the pentagon word on edge and triangle coordinates.
pub fn pentagon(surfaces: &[(u32, u32)], samples: usize, seed: u64) -> Vec<Property> {
    let mut out = Vec::new();
    for &(g, s) in surfaces {
        let Ok(d) = surface(g, s) else { continue };
        let Some((e1, e2)) = find_pentagon(&d) else {
            continue;
        };
        let name = format!("pentagon {}", tag(g, s));
        out.push(guard(3, &name, Kind::Exact, || {
            let w = pentagon_word(&d, e1, e2)?;
            let mut rng = Sampler::new(seed);
            let (mut bad_r, mut bad_s) = (0, 0);
            for _ in 0..samples {
                let p = rng.penner(&d);
                let (end, q) = penner_word(&d, &p, &w)?;
                if end.without_flags() != d || q != p {
                    bad_r += 1;
                }
                let k = rng.triangle(&d);
                let (end, l) = triangle_word(&d, &k, &w)?;
                if end.without_flags() != d || l != k {
                    bad_s += 1;
                }
            }
            Ok(Property::exact(
                3,
                name.clone(),
                bad_r + bad_s == 0,
                json!({
                    "points": samples,
                    "flips": w.number_of_flips(),
                    "moves": w.len(),
                    "edge_mismatches": bad_r,
                    "triangle_mismatches": bad_s,
                }),
            ))
        }));
    }
    out
}

/// Criterion 4.
pub fn form_preservation(surfaces: &[(u32, u32)], samples: usize, seed: u64) -> Vec<Property> {
    let mut out = Vec::new();
    for &(g, s) in surfaces {
        let Ok(d) = surface(g, s) else { continue };
        let mut rng = Sampler::new(seed);
        let flips: Vec<MoveWord> = match (0..d.num_edges())
            .map(|e| d.normalized_flip_word(e))
            .collect::<Result<_>>()
        {
            Ok(f) => f,
            Err(_) => continue,
        };
        let points: Vec<_> = (0..samples)
            .map(|_| (rng.penner(&d), rng.triangle(&d), rng.weights(&d)))
            .collect();
        let name = format!("alpha under flips {}", tag(g, s));
        out.push(guard(4, &name, Kind::Exact, || {
            let mut bad = 0;
            for (i, (p, _, _)) in points.iter().enumerate() {
                let w = &flips[i % flips.len()];
                let (end, j) = penner_log_jacobian(&d, w, p)?;
                if !pullback_check(&j, &alpha_form(&d), &alpha_form(&end)) {
                    bad += 1;
                }
            }
            Ok(Property::exact(
                4,
                name.clone(),
                bad == 0,
                json!({ "points": samples, "failures": bad }),
            ))
        }));
        let name = format!("beta under flips and rotations {}", tag(g, s));
        out.push(guard(4, &name, Kind::Exact, || {
            let mut bad = 0;
            for (i, (_, k, _)) in points.iter().enumerate() {
                let t = i % d.num_triangles();
                let rot = MoveWord(vec![Move::Rotate { tri: t }]);
                for w in [&flips[i % flips.len()], &rot] {
                    let (end, j) = triangle_log_jacobian(&d, w, k)?;
                    if !pullback_check(&j, &beta_form(&d), &beta_form(&end)) {
                        bad += 1;
                    }
                }
            }
            Ok(Property::exact(
                4,
                name.clone(),
                bad == 0,
                json!({ "points": samples, "failures": bad }),
            ))
        }));
        let name = format!("beta under decoration action {}", tag(g, s));
        out.push(guard(4, &name, Kind::Exact, || {
            let mut bad = 0;
            for (_, k, f) in &points {
                let j = action_s_log_jacobian(&d, f, k)?;
                if !pullback_check(&j, &beta_form(&d), &beta_form(&d)) {
                    bad += 1;
                }
            }
            Ok(Property::exact(
                4,
                name.clone(),
                bad == 0,
                json!({ "points": samples, "failures": bad }),
            ))
        }));
    }
    out
}

/// Criterion 5: the edge-to-triangle map commutes with normalized flips and
/// pulls the triangle form back to the edge form; the rank report.
pub fn intertwining_and_exactness(
    surfaces: &[(u32, u32)],
    samples: usize,
    seed: u64,
) -> Vec<Property> {
    let mut out = Vec::new();
    for &(g, s) in surfaces {
        let name = format!("intertwining {}", tag(g, s));
        out.push(guard(5, &name, Kind::Exact, || {
            let d = surface(g, s)?;
            let mut rng = Sampler::new(seed);
            let mut bad = 0;
            for i in 0..samples {
                let p = rng.penner(&d);
                let w = d.normalized_flip_word(i % d.num_edges())?;
                let (end_r, q) = penner_word(&d, &p, &w)?;
                let (end_s, k) = triangle_word(&d, &triangle_from_penner(&d, &p)?, &w)?;
                if end_r != end_s || triangle_from_penner(&end_r, &q)? != k {
                    bad += 1;
                }
            }
            let pulls_back = pullback_check(&log_projection(&d), &alpha_form(&d), &beta_form(&d));
            Ok(Property::exact(
                5,
                name.clone(),
                bad == 0 && pulls_back,
                json!({ "points": samples, "mismatches": bad, "beta_pulls_back_to_alpha": pulls_back }),
            ))
        }));
        let name = format!("exactness {}", tag(g, s));
        out.push(guard(5, &name, Kind::Exact, || {
            let r = exactness_report(&surface(g, s)?)?;
            Ok(Property::exact(
                5,
                name.clone(),
                r.passed,
                serde_json::to_value(&r).unwrap_or(Value::Null),
            ))
        }));
    }
    out
}

/// Criterion 6: brackets of holonomies against intersection numbers over a
/// basis of first homology.
pub fn poisson_intersection(surfaces: &[(u32, u32)]) -> Vec<Property> {
    surfaces
        .iter()
        .map(|&(g, s)| {
            let name = format!("poisson equals intersection {}", tag(g, s));
            guard(6, &name, Kind::Exact, || {
                let d = surface(g, s)?;
                let basis = h1_basis(&d);
                let form = beta_form(&d);
                let hol = basis
                    .iter()
                    .map(|c| holonomy_covector(&d, c))
                    .collect::<Result<Vec<_>>>()?;
                let mut pairs = Vec::new();
                let mut ok = true;
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        let b = poisson_bracket(&hol[i], &hol[j], &form)?;
                        let n = intersection_index(&d, &basis[i], &basis[j])?;
                        ok &= b == Q::from_integer(n.into());
                        if n != 0 || !num_traits::Zero::is_zero(&b) {
                            pairs.push(json!({ "i": i, "j": j, "bracket": b.to_string(), "intersection": n }));
                        }
                    }
                }
                Ok(Property::exact(
                    6,
                    name.clone(),
                    ok,
                    json!({ "basis_size": basis.len(), "nonzero_pairs": pairs }),
                ))
            })
        })
        .collect()
}

/// Criterion 7.
pub fn flow_action(surfaces: &[(u32, u32)], samples: usize, seed: u64) -> Vec<Property> {
    surfaces
        .iter()
        .map(|&(g, s)| {
            let name = format!("flow equals action {}", tag(g, s));
            guard(7, &name, Kind::Exact, || {
                let d = surface(g, s)?;
                let mut rng = Sampler::new(seed);
                let mut bad = 0;
                for _ in 0..samples {
                    let k = rng.triangle(&d);
                    let f = rng.weights(&d);
                    if !flow_equals_action_check(&d, &f, &k)?.equal {
                        bad += 1;
                    }
                }
                Ok(Property::exact(
                    7,
                    name.clone(),
                    bad == 0,
                    json!({ "weight_functions": samples, "mismatches": bad }),
                ))
            })
        })
        .collect()
}

/// Criterion 11, coordinates: the map of a concatenation is the composite
/// of the maps, and `(m1 m2)^6` acts trivially.
pub fn mapping_class_classical(samples: usize, seed: u64) -> Vec<Property> {
    let name = "mapping class homomorphism (1,1)";
    vec![guard(11, name, Kind::Exact, || {
        let d = surface(1, 1)?;
        let (m1, m2) = torus_twist_words(&d)?;
        let both = m1.concat(&m2);
        let order6 = both.repeat(6);
        if apply_word(&d, &m1)?.without_flags() != d || apply_word(&d, &m2)?.without_flags() != d {
            return Err(Error::Domain("twist words do not close".into()));
        }
        let mut rng = Sampler::new(seed);
        let (mut bad, mut bad6) = (0, 0);
        for _ in 0..samples {
            let p = rng.penner(&d);
            let (_, a) = penner_word(&d, &p, &both)?;
            let (_, mid) = penner_word(&d, &p, &m1)?;
            let (_, b) = penner_word(&d, &mid, &m2)?;
            let k = rng.triangle(&d);
            let (_, c) = triangle_word(&d, &k, &both)?;
            let (_, kmid) = triangle_word(&d, &k, &m1)?;
            let (_, e) = triangle_word(&d, &kmid, &m2)?;
            if a != b || c != e {
                bad += 1;
            }
            if penner_word(&d, &p, &order6)?.1 != p || triangle_word(&d, &k, &order6)?.1 != k {
                bad6 += 1;
            }
        }
        Ok(Property::exact(
            11,
            name,
            bad + bad6 == 0,
            json!({
                "points": samples,
                "m1_moves": m1.len(),
                "m2_moves": m2.len(),
                "composition_mismatches": bad,
                "order_six_mismatches": bad6,
            }),
        ))
    })]
}

fn pair(k: &TrianglePoint, t: usize) -> [f64; 2] {
    [q_to_f64(&k.0[t][0]), q_to_f64(&k.0[t][1])]
}

/// Criterion 8.
pub fn compact_representation(ns: &[usize], seed: u64) -> Vec<Property> {
    let mut out = Vec::new();
    for &n in ns {
        let num = |name: &str, tol: f64, f: &dyn Fn() -> Result<(f64, Value)>| {
            let full = format!("{name} N={n}");
            guard(8, &full, Kind::Numeric, || {
                let (r, detail) = f()?;
                Ok(Property::numeric(8, full.clone(), r, tol, detail))
            })
        };
        out.push(num("generator relations", 1e-12, &|| {
            let torus = CyclicRepContext::build(&surface(1, 1)?, n)?;
            let local = CyclicRepContext::new(n, vec![0, 1, 2])?;
            let r = torus.relation_residual().max(local.relation_residual());
            Ok((r, json!({ "contexts": [torus.dim(), local.dim()] })))
        }));
        out.push(num("morphism image relations", 1e-12, &|| {
            let d = surface(1, 1)?;
            let ctx = CyclicRepContext::build(&d, n)?;
            let mut rng = Sampler::new(seed);
            let mut r: f64 = 0.0;
            let mut count = 0;
            for _ in 0..5 {
                let h = rng.triangle(&d);
                for e in 0..d.num_edges() {
                    let w = d.normalized_flip_word(e)?;
                    r = r.max(compose_loop(&ctx, &d, &w, &h, true)?.relation_residual);
                    count += 1;
                }
                for t in 0..d.num_triangles() {
                    let m = corner_step(&ctx, &GeneratorMap::identity(&ctx), t)?;
                    r = r.max(m.relation_residual(&ctx));
                    count += 1;
                }
            }
            Ok((r, json!({ "morphisms": count })))
        }));
        out.push(num("M^N = -1", 1e-12, &|| {
            let ctx = CyclicRepContext::new(n, vec![0, 1])?;
            let g = |t, i| ctx.generator(t, i).cloned();
            let m = -(inverse(&g(0, 1)?)? * g(0, 0)? * g(1, 1)?);
            let id = CMat::identity(ctx.dim(), ctx.dim());
            Ok((max_diff(&power(&m, n), &(-id)), json!({})))
        }));
        out.push(num("T conjugation", 1e-10, &|| {
            let d = surface(1, 1)?;
            let mut rng = Sampler::new(seed);
            let (mut r, mut cond): (f64, f64) = (0.0, 0.0);
            let mut count = 0;
            for _ in 0..5 {
                let h = rng.triangle(&d);
                for e in 0..d.num_edges() {
                    let w = d.normalize_for_flip(e)?;
                    let (at, hk) = triangle_word(&d, &h, &w)?;
                    let roles = at.flip_roles(e)?;
                    let hp = h_xy(pair(&hk, roles.x), pair(&hk, roles.y), n);
                    let t = build_t(n, roles.x, roles.y, hp)?;
                    let local = CyclicRepContext::new(n, t.factors.clone())?;
                    let img = flip_step(
                        &local,
                        &GeneratorMap::identity(&local),
                        roles.x,
                        roles.y,
                        hp,
                    )?;
                    r = r.max(crate::compact::conjugation_residual(
                        &local, &t.matrix, &img,
                    ));
                    let sv = t.matrix.clone().svd(false, false).singular_values;
                    cond = cond.max(sv.max() / sv.min());
                    count += 1;
                }
            }
            Ok((r, json!({ "flips": count, "max_condition_number": cond })))
        }));
        out.push(num("loop words compose to the identity", 1e-11, &|| {
            let mut rng = Sampler::new(seed);
            let mut r: f64 = 0.0;
            let mut words = 0;
            let torus = surface(1, 1)?;
            let ctx = CyclicRepContext::build(&torus, n)?;
            for e in 0..torus.num_edges() {
                let w = double_flip_word(&torus, e)?;
                let h = rng.triangle(&torus);
                r = r.max(compose_loop(&ctx, &torus, &w, &h, false)?.residual);
                words += 1;
            }
            let sphere = surface(0, 4)?;
            let (e1, e2) =
                find_pentagon(&sphere).ok_or_else(|| Error::Domain("no pentagon".into()))?;
            let w = pentagon_word(&sphere, e1, e2)?;
            let local = CyclicRepContext::new(n, touched_triangles(&sphere, &w)?)?;
            for _ in 0..3 {
                let h = rng.triangle(&sphere);
                r = r.max(compose_loop(&local, &sphere, &w, &h, false)?.residual);
                words += 1;
            }
            Ok((r, json!({ "words": words })))
        }));
        out.push(num("triple corner change", 1e-12, &|| {
            let d = surface(1, 1)?;
            let ctx = CyclicRepContext::build(&d, n)?;
            let id = GeneratorMap::identity(&ctx);
            let mut r: f64 = 0.0;
            for t in 0..d.num_triangles() {
                let mut m = id.clone();
                for _ in 0..3 {
                    m = corner_step(&ctx, &m, t)?;
                }
                r = r.max(m.distance(&id));
            }
            Ok((r, json!({})))
        }));
        let pent = |rng: &mut Sampler| -> Result<Vec<crate::compact::LoopOperator>> {
            let sphere = surface(0, 4)?;
            let (e1, e2) =
                find_pentagon(&sphere).ok_or_else(|| Error::Domain("no pentagon".into()))?;
            let w = pentagon_word(&sphere, e1, e2)?;
            let local = CyclicRepContext::new(n, touched_triangles(&sphere, &w)?)?;
            (0..3)
                .map(|_| loop_operator(&local, &sphere, &w, &rng.triangle(&sphere)))
                .collect()
        };
        let ops = pent(&mut Sampler::new(seed));
        out.push(num("pentagon T-product scalar modulus", 1e-9, &|| {
            let ops = ops.clone()?;
            let r = ops
                .iter()
                .map(|k| (k.modulus - 1.0).abs())
                .fold(0.0, f64::max);
            Ok((
                r,
                json!({ "phases": ops.iter().map(|k| k.phase).collect::<Vec<_>>() }),
            ))
        }));
        out.push(num("pentagon T-product is scalar", 1e-9, &|| {
            let ops = ops.clone()?;
            let r = ops.iter().map(|k| k.scalar_residual).fold(0.0, f64::max);
            let map = ops.iter().map(|k| k.map_residual).fold(0.0, f64::max);
            let step = ops.iter().map(|k| k.step_residual).fold(0.0, f64::max);
            Ok((r, json!({ "map_residual": map, "step_residual": step })))
        }));
    }
    out
}

/// Criterion 9.
pub fn cyclic_dilog(ns: &[usize]) -> Vec<Property> {
    let mut out = Vec::new();
    let lambdas = [0.5, 1.0, 3.0];
    out.push(guard(
        9,
        "cyclic dilogarithm closure",
        Kind::Numeric,
        || {
            let mut r: f64 = 0.0;
            for &n in ns {
                for l in lambdas {
                    let p = cyclic_psi(n, l)?;
                    r = r.max(p.closure_residual()).max(p.functional_residual());
                }
            }
            Ok(Property::numeric(
                9,
                "cyclic dilogarithm closure",
                r,
                1e-12,
                json!({ "n": ns, "lambda": lambdas }),
            ))
        },
    ));
    out.push(guard(
        9,
        "cyclic dilogarithm base point",
        Kind::Numeric,
        || {
            let mut r: f64 = 0.0;
            for &n in ns {
                for l in lambdas {
                    let p = cyclic_psi(n, l)?;
                    for b in 1..n {
                        r = r.max(cyclic_psi_from(n, l, b)?.distance_up_to_factor(&p));
                    }
                }
            }
            Ok(Property::numeric(
                9,
                "cyclic dilogarithm base point",
                r,
                1e-12,
                json!({}),
            ))
        },
    ));
    out.push(guard(
        9,
        "cyclic dilogarithm N=2 value",
        Kind::Numeric,
        || {
            let p = cyclic_psi(2, 1.0)?;
            let ratio = p.values[1] / p.values[0];
            let r = (ratio - Complex64::from_polar(1.0, PI / 4.0)).norm();
            Ok(Property::numeric(
                9,
                "cyclic dilogarithm N=2 value",
                r,
                1e-12,
                json!({ "ratio": [ratio.re, ratio.im] }),
            ))
        },
    ));
    out
}

/// Criterion 11, compact analogue: `Phi_{m1 m2}(h) = K_{m1}^-1 Phi_{m2}(h') K_{m1}`
/// where `K_{m1}` implements `Phi_{m1}(h)` and `h'` is the image of `h`.
pub fn mapping_class_compact(ns: &[usize], seed: u64) -> Vec<Property> {
    ns.iter()
        .map(|&n| {
            let name = format!("mapping class homomorphism compact N={n}");
            guard(11, &name, Kind::Numeric, || {
                let d = surface(1, 1)?;
                let ctx = CyclicRepContext::build(&d, n)?;
                let (m1, m2) = torus_twist_words(&d)?;
                let both = m1.concat(&m2);
                let mut rng = Sampler::new(seed);
                let (mut r, mut implement): (f64, f64) = (0.0, 0.0);
                for _ in 0..5 {
                    let h = rng.triangle(&d);
                    let (_, h2) = triangle_word(&d, &h, &m1)?;
                    let k1 = loop_operator(&ctx, &d, &m1, &h)?;
                    implement = implement.max(k1.map_residual);
                    let k1i = inverse(&k1.matrix)?;
                    let phi12 = compose_loop(&ctx, &d, &both, &h, false)?.map;
                    let phi2 = compose_loop(&ctx, &d, &m2, &h2, false)?.map;
                    for (t, img) in &phi12.images {
                        for (a, b) in img.iter().zip(&phi2.images[t]) {
                            let rhs = &k1i * b * &k1.matrix;
                            r = r.max(max_diff(a, &rhs) / max_abs(a));
                        }
                    }
                }
                Ok(Property::numeric(
                    11,
                    name.clone(),
                    r,
                    1e-11,
                    json!({ "implementation_residual": implement }),
                ))
            })
        })
        .collect()
}

/// Criterion 10.
pub fn qdilog_checks(hbars: &[f64], grid: &Grid) -> Vec<Property> {
    let mut out = Vec::new();
    for &hbar in hbars {
        let p = QDilogParams::new(hbar);
        let xs = grid.points();
        let label = |what: &str| format!("{what} hbar={hbar}");
        out.push(guard(
            10,
            &label("functional equation"),
            Kind::Numeric,
            || {
                let mut r: f64 = 0.0;
                for &x in &xs {
                    r = r.max(functional_residual(x, &p)?);
                }
                Ok(Property::numeric(
                    10,
                    label("functional equation"),
                    r,
                    1e-8,
                    json!({ "grid": grid.to_string() }),
                ))
            },
        ));
        out.push(guard(10, &label("unitarity"), Kind::Numeric, || {
            let mut r: f64 = 0.0;
            for &x in &xs {
                r = r.max((psi_eval(Complex64::new(x, 0.0), &p)?.norm() - 1.0).abs());
            }
            Ok(Property::numeric(
                10,
                label("unitarity"),
                r,
                1e-8,
                json!({ "grid": grid.to_string() }),
            ))
        }));
        let tol = p.tol;
        out.push(guard(
            10,
            &label("contour independence"),
            Kind::Numeric,
            || {
                let half = p.clone().with_delta(p.delta / 2.0);
                let mut r: f64 = 0.0;
                for z in sample_points(&xs, hbar) {
                    let a = psi_eval(z, &p)?;
                    r = r.max((a - psi_eval(z, &half)?).norm() / a.norm());
                }
                Ok(Property::numeric(
                    10,
                    label("contour independence"),
                    r,
                    tol,
                    json!({ "delta": [p.delta, half.delta] }),
                ))
            },
        ));
        out.push(guard(
            10,
            &label("refinement independence"),
            Kind::Numeric,
            || {
                let mut r: f64 = 0.0;
                for z in sample_points(&xs, hbar) {
                    let a = psi_eval(z, &p)?;
                    r = r.max((a - psi_eval_refined(z, &p)?).norm() / a.norm());
                }
                Ok(Property::numeric(
                    10,
                    label("refinement independence"),
                    r,
                    tol,
                    json!({}),
                ))
            },
        ));
    }
    out
}

/// Grid points on the real line and on both shifted lines used by the
/// functional equation.
fn sample_points(xs: &[f64], hbar: f64) -> Vec<Complex64> {
    xs.iter()
        .step_by(4)
        .flat_map(|&x| [0.0, -hbar, hbar].map(|y| Complex64::new(x, y)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert!(Property::numeric(1, "a", 0.5, 1.0, Value::Null).passed());
        assert!(!Property::numeric(1, "a", f64::NAN, 1.0, Value::Null).passed());
        assert!(!Property::exact(1, "a", false, Value::Null).passed());
        let p = guard(3, "boom", Kind::Exact, || Err(Error::Domain("x".into())));
        assert_eq!(p.verdict, Verdict::ExactFail);
    }

    #[test]
    fn small_classical_suite_is_deterministic() {
        let opts = Options {
            surface: Some((0, 4)),
            ..Options::default()
        };
        let a = serde_json::to_string(&run_suite(Suite::Classical, &opts)).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Classical, &opts)).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("runtime"));
    }
}
