//! Independent oracles and random instance generators shared by the integration tests and the
//! acceptance suite. Nothing here calls the library's projection or sampling code.
#![allow(dead_code)]

use altproj_core::sets::{Constraint, SetDescriptor};
use altproj_core::Point;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn p(v: &[f64]) -> Point {
    Point::new(v.to_vec()).unwrap()
}

pub fn gaussian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g = gaussian(d, rng);
        let n = norm(&g);
        if n > 1e-6 {
            return g.iter().map(|x| x / n).collect();
        }
    }
}

/// Gram–Schmidt on Gaussian vectors.
pub fn random_orthonormal<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    while out.len() < k {
        let mut v = gaussian(d, rng);
        for _ in 0..2 {
            for u in &out {
                let c = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = norm(&v);
        if n > 1e-3 {
            out.push(v.iter().map(|x| x / n).collect());
        }
    }
    out
}

pub const KIND_NAMES: [&str; 9] = [
    "halfspace",
    "hyperplane",
    "ball",
    "polygon2d",
    "ortho_subspace",
    "affine_subspace",
    "nonneg_orthant",
    "polyhedron",
    "diagonal_affine_graph",
];

/// A random instance of kind `KIND_NAMES[kind]` in dimension 2 or 3 (graphs: 2 or 4).
pub fn random_set<R: Rng + ?Sized>(kind: usize, rng: &mut R) -> SetDescriptor {
    let d = rng.random_range(2..=3usize);
    match kind {
        0 => SetDescriptor::halfspace(p(&gaussian(d, rng)), rng.random_range(-1.0..1.0)).unwrap(),
        1 => SetDescriptor::hyperplane(p(&gaussian(d, rng)), rng.random_range(-1.0..1.0)).unwrap(),
        2 => SetDescriptor::ball(p(&gaussian(d, rng)), rng.random_range(0.2..2.0)).unwrap(),
        3 => loop {
            let n = rng.random_range(3..=8);
            let pts: Vec<Point> = (0..n).map(|_| p(&gaussian(2, rng))).collect();
            if let Ok(s) = SetDescriptor::polygon(&pts) {
                return s;
            }
        },
        4 => {
            let k = rng.random_range(0..d);
            let basis = random_orthonormal(d, k, rng).iter().map(|v| p(v)).collect();
            SetDescriptor::ortho_subspace(d, basis).unwrap()
        }
        5 => {
            let k = rng.random_range(1..d);
            let basis = random_orthonormal(d, k, rng).iter().map(|v| p(v)).collect();
            SetDescriptor::affine_subspace(p(&gaussian(d, rng)), basis).unwrap()
        }
        6 => SetDescriptor::nonneg_orthant(d).unwrap(),
        7 => random_polyhedron(d, rng),
        8 => {
            let h = d - 1;
            let theta: Vec<f64> = (0..h).map(|_| rng.random_range(-2.0..2.0)).collect();
            let offset = gaussian(h, rng);
            SetDescriptor::diagonal_graph(theta, offset).unwrap()
        }
        _ => unreachable!(),
    }
}

/// `{⟨a_i, x⟩ ≤ b_i}` with a witness `w` where every constraint holds strictly.
pub fn random_polyhedron<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SetDescriptor {
    let m = rng.random_range(1..=6usize);
    let w = gaussian(d, rng);
    let cons = (0..m)
        .map(|_| {
            let a = gaussian(d, rng);
            let b = dot(&a, &w) + rng.random_range(0.05..1.5);
            Constraint { a: p(&a), b }
        })
        .collect();
    SetDescriptor::polyhedron(cons, p(&w)).unwrap()
}

/// Membership from the defining formulas, with absolute slack `tol`.
pub fn oracle_member(set: &SetDescriptor, x: &[f64], tol: f64) -> bool {
    match set {
        SetDescriptor::Halfspace(h) => dot(h.a().coords(), x) - h.b() <= tol * norm(h.a().coords()),
        SetDescriptor::Hyperplane(h) => (dot(h.a().coords(), x) - h.b()).abs() <= tol * norm(h.a().coords()),
        SetDescriptor::Ball(b) => {
            let diff: Vec<f64> = x.iter().zip(b.center().coords()).map(|(u, c)| u - c).collect();
            norm(&diff) <= b.radius() + tol
        }
        SetDescriptor::Polygon2D(poly) => {
            let v = poly.vertices();
            (0..v.len()).all(|i| {
                let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
                let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                let cross = ex * (x[1] - a[1]) - ey * (x[0] - a[0]);
                cross >= -tol * (ex * ex + ey * ey).sqrt()
            })
        }
        SetDescriptor::OrthoSubspace(s) => residual_to_span(x, &zero_like(x), s.basis()) <= tol,
        SetDescriptor::AffineSubspace(s) => residual_to_span(x, s.anchor().coords(), s.basis()) <= tol,
        SetDescriptor::NonnegOrthant(_) => x.iter().all(|v| *v >= -tol),
        SetDescriptor::Polyhedron(s) => s
            .constraints()
            .iter()
            .all(|c| dot(c.a.coords(), x) - c.b <= tol * norm(c.a.coords())),
        SetDescriptor::DiagonalAffineGraph(g) => {
            let h = g.theta().len();
            (0..h).all(|i| (x[h + i] - g.offset()[i] - g.theta()[i] * x[i]).abs() <= tol)
        }
        SetDescriptor::ShiftedConvexCone(_) => unimplemented!("cones have no projection"),
    }
}

fn zero_like(x: &[f64]) -> Vec<f64> {
    vec![0.0; x.len()]
}

fn residual_to_span(x: &[f64], anchor: &[f64], basis: &[Point]) -> f64 {
    let mut r: Vec<f64> = x.iter().zip(anchor).map(|(a, b)| a - b).collect();
    for u in basis {
        let c = dot(u.coords(), &r);
        r.iter_mut().zip(u.coords()).for_each(|(v, w)| *v -= c * w);
    }
    norm(&r)
}

/// A random member of `set`, built from its definition.
pub fn oracle_sample_member<R: Rng + ?Sized>(set: &SetDescriptor, rng: &mut R) -> Vec<f64> {
    let d = set.dim();
    match set {
        SetDescriptor::Halfspace(h) => {
            let a = h.a().coords();
            let mut z = gaussian(d, rng).iter().map(|v| 2.0 * v).collect::<Vec<_>>();
            let excess = dot(a, &z) - h.b();
            if excess > 0.0 {
                let na = dot(a, a);
                let s = excess + rng.random_range(0.0..1.0) * na.sqrt();
                z.iter_mut().zip(a).for_each(|(v, w)| *v -= s / na * w);
                if dot(a, &z) > h.b() {
                    z.iter_mut().zip(a).for_each(|(v, w)| *v -= 1e-12 * w);
                }
            }
            z
        }
        SetDescriptor::Hyperplane(h) => {
            let a = h.a().coords();
            let mut z = gaussian(d, rng).iter().map(|v| 2.0 * v).collect::<Vec<_>>();
            let s = (dot(a, &z) - h.b()) / dot(a, a);
            z.iter_mut().zip(a).for_each(|(v, w)| *v -= s * w);
            z
        }
        SetDescriptor::Ball(b) => {
            let u = unit(d, rng);
            let r = b.radius() * rng.random::<f64>().powf(1.0 / d as f64) * (1.0 - 1e-12);
            b.center().coords().iter().zip(&u).map(|(c, v)| c + r * v).collect()
        }
        SetDescriptor::Polygon2D(poly) => {
            let w: Vec<f64> = poly.vertices().iter().map(|_| -rng.random::<f64>().ln()).collect();
            let s: f64 = w.iter().sum();
            let mut out = vec![0.0; 2];
            for (v, wi) in poly.vertices().iter().zip(&w) {
                out[0] += wi / s * v[0];
                out[1] += wi / s * v[1];
            }
            out
        }
        SetDescriptor::OrthoSubspace(s) => span_point(&zero_like(&vec![0.0; d]), s.basis(), rng),
        SetDescriptor::AffineSubspace(s) => span_point(s.anchor().coords(), s.basis(), rng),
        SetDescriptor::NonnegOrthant(_) => gaussian(d, rng).iter().map(|v| 2.0 * v.abs()).collect(),
        SetDescriptor::Polyhedron(s) => {
            // Ratio test along a random ray from the witness.
            let w = s.witness().coords();
            let dir = unit(d, rng);
            let mut t_max = 5.0f64;
            for c in s.constraints() {
                let rate = dot(c.a.coords(), &dir);
                if rate > 0.0 {
                    t_max = t_max.min((c.b - dot(c.a.coords(), w)) / rate);
                }
            }
            let t = t_max * rng.random::<f64>() * (1.0 - 1e-9);
            w.iter().zip(&dir).map(|(a, b)| a + t * b).collect()
        }
        SetDescriptor::DiagonalAffineGraph(g) => {
            let h = g.theta().len();
            let x = gaussian(h, rng).iter().map(|v| 2.0 * v).collect::<Vec<_>>();
            let mut out = x.clone();
            out.extend((0..h).map(|i| g.offset()[i] + g.theta()[i] * x[i]));
            out
        }
        SetDescriptor::ShiftedConvexCone(_) => unimplemented!("cones have no projection"),
    }
}

fn span_point<R: Rng + ?Sized>(anchor: &[f64], basis: &[Point], rng: &mut R) -> Vec<f64> {
    let mut out = anchor.to_vec();
    for u in basis {
        let c: f64 = 2.0 * Distribution::<f64>::sample(&StandardNormal, rng);
        out.iter_mut().zip(u.coords()).for_each(|(v, w)| *v += c * w);
    }
    out
}

/// Exact projection onto a polyhedron in `d ≤ 3`: the closest feasible point among the
/// projections onto every affine face `{⟨a_i, x⟩ = b_i, i ∈ S}` with `|S| ≤ d`.
pub fn brute_force_polyhedron(cons: &[Constraint], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let m = cons.len();
    let feasible = |y: &[f64]| cons.iter().all(|c| dot(c.a.coords(), y) - c.b <= 1e-11 * (1.0 + c.b.abs()));
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |y: Vec<f64>| {
        if feasible(&y) {
            let dist = norm(&y.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>());
            if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
                best = Some((dist, y));
            }
        }
    };
    for mask in 0u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > d {
            continue;
        }
        if idx.is_empty() {
            consider(x.to_vec());
            continue;
        }
        let a = DMatrix::from_fn(idx.len(), d, |r, c| cons[idx[r]].a[c]);
        let resid = DVector::from_fn(idx.len(), |r, _| dot(cons[idx[r]].a.coords(), x) - cons[idx[r]].b);
        let gram = &a * a.transpose();
        let Some(inv) = gram.clone().try_inverse() else { continue };
        if gram.determinant().abs() < 1e-12 {
            continue;
        }
        let lam = inv * resid;
        let step = a.transpose() * lam;
        consider((0..d).map(|i| x[i] - step[i]).collect());
    }
    best.expect("the witness face set is nonempty").1
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    for _ in 0..iters {
        if f(c) < f(d) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - g * (hi - lo);
        d = lo + g * (hi - lo);
    }
    0.5 * (lo + hi)
}

/// Largest singular value of `U^T V` by alternating maximization of `⟨Us, Vt⟩` over unit `s`,
/// `t`, from several random starts.
pub fn omega_by_ascent<R: Rng + ?Sized>(u: &[Vec<f64>], v: &[Vec<f64>], starts: usize, rng: &mut R) -> f64 {
    let (k, l) = (u.len(), v.len());
    let g: Vec<Vec<f64>> = (0..k).map(|i| (0..l).map(|j| dot(&u[i], &v[j])).collect()).collect();
    let mut best = 0.0f64;
    for _ in 0..starts {
        let mut t = unit(l, rng);
        let mut val = 0.0;
        for _ in 0..20_000 {
            let s: Vec<f64> = (0..k).map(|i| dot(&g[i], &t)).collect();
            let ns = norm(&s);
            if ns == 0.0 {
                break;
            }
            let s: Vec<f64> = s.iter().map(|x| x / ns).collect();
            let tn: Vec<f64> = (0..l).map(|j| (0..k).map(|i| g[i][j] * s[i]).sum()).collect();
            let nt = norm(&tn);
            if nt == 0.0 {
                break;
            }
            let prev = val;
            val = nt;
            t = tn.iter().map(|x| x / nt).collect();
            if (val - prev).abs() < 1e-16 {
                break;
            }
        }
        best = best.max(val);
    }
    best.min(1.0)
}

/// `w ∈ W(ε)` by searching `u ∈ W ∩ ‖w‖S` for `‖u − w‖² ≤ 2ε‖w‖²`: random coefficients,
/// then coordinate hill-climbing on `‖u − w‖`.
pub fn wset_by_search<R: Rng + ?Sized>(w: &[f64], basis: &[Vec<f64>], eps: f64, rng: &mut R) -> bool {
    let nw = norm(w);
    if nw <= eps {
        return true;
    }
    let k = basis.len();
    let embed = |c: &[f64]| -> Vec<f64> {
        let nc = norm(c);
        let mut out = vec![0.0; w.len()];
        for (ci, u) in c.iter().zip(basis) {
            out.iter_mut().zip(u).for_each(|(o, x)| *o += ci / nc * nw * x);
        }
        out
    };
    let gap = |c: &[f64]| -> f64 {
        let u = embed(c);
        u.iter().zip(w).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
    };
    let mut best_c = unit(k, rng);
    let mut best = gap(&best_c);
    for _ in 0..200 {
        let c = unit(k, rng);
        let g = gap(&c);
        if g < best {
            best = g;
            best_c = c;
        }
    }
    let mut step = 0.5;
    while step > 1e-13 {
        let mut improved = false;
        for i in 0..k {
            for s in [step, -step] {
                let mut c = best_c.clone();
                c[i] += s;
                if norm(&c) == 0.0 {
                    continue;
                }
                let g = gap(&c);
                if g < best {
                    best = g;
                    best_c = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best <= 2.0 * eps * nw * nw
}

/// A random convex polygon containing `r·B`, by rejection on the distance from the origin to
/// each edge line.
pub fn random_polygon_around_ball<R: Rng + ?Sized>(r: f64, outer: f64, rng: &mut R) -> SetDescriptor {
    loop {
        let n = rng.random_range(4..=10usize);
        let pts: Vec<Point> = (0..n)
            .map(|_| {
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                let rad = rng.random_range(r..outer);
                p(&[rad * t.cos(), rad * t.sin()])
            })
            .collect();
        let Ok(set) = SetDescriptor::polygon(&pts) else { continue };
        let SetDescriptor::Polygon2D(poly) = &set else { unreachable!() };
        let v = poly.vertices();
        let clear = (0..v.len()).all(|i| {
            let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            // Signed distance of the origin to the left of the counter-clockwise edge.
            (ex * (-a[1]) - ey * (-a[0])) / (ex * ex + ey * ey).sqrt() >= r
        });
        if clear {
            return set;
        }
    }
}
