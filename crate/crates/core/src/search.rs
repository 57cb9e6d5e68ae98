//! Seeded multistart minimization of a pointwise maximum of smooth pieces
//! over a union of boxes ("faces").
//!
//! Every class predicate, the extremal Pareto values and β reduce to
//! `min_z max_j g_j(z)` on the faces of the ∞-sphere `{‖x‖_∞ = 1}`, where
//! each face pins one coordinate to ±1 and leaves the rest in a box. The
//! search grids every face, keeps the best grid points as seeds, adds random
//! seeds from per-start RNG streams, and runs a local descent from each seed
//! in parallel. Results are merged in a fixed order so the outcome does not
//! depend on the number of worker threads.

use rand::Rng;
use rayon::prelude::*;

use crate::budget::SearchBudget;

/// Total grid evaluations spread across all faces of one search.
const GRID_CAP: usize = 200_000;
const MAX_ITERS: usize = 400;
const MAX_HALVINGS: usize = 40;
const ARMIJO: f64 = 1e-4;
const VERTEX_STEPS: usize = 20;
const VERTEX_ACTIVE: f64 = 1e-3;

/// A box `lo <= z <= hi`; coordinates with `lo == hi` are fixed.
#[derive(Debug, Clone)]
pub(crate) struct Face {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Coordinates allowed to be nonzero (the support subset this face belongs to).
    pub support: Vec<usize>,
}

impl Face {
    fn clip(&self, z: &mut [f64]) {
        for ((v, &lo), &hi) in z.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(lo, hi);
        }
    }

    fn free_axes(&self) -> Vec<usize> {
        (0..self.lo.len()).filter(|&i| self.lo[i] < self.hi[i]).collect()
    }
}

pub(crate) struct Pieces {
    pub values: Vec<f64>,
    /// One gradient per piece; empty when gradients were not requested.
    pub grads: Vec<Vec<f64>>,
}

impl Pieces {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates the pieces at a point of a face, with gradients when asked.
pub(crate) type PieceFn<'a> = Box<dyn Fn(&Face, &[f64], bool) -> Pieces + Sync + 'a>;

pub(crate) struct Problem<'a> {
    pub faces: Vec<Face>,
    pub eval: PieceFn<'a>,
}

#[derive(Debug, Clone)]
pub(crate) struct LocalResult {
    pub value: f64,
    pub z: Vec<f64>,
    pub face: usize,
    pub start: usize,
}

impl<'a> Problem<'a> {
    pub fn value(&self, face: &Face, z: &[f64]) -> f64 {
        let v = (self.eval)(face, z, false).max();
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// Runs the full seeded search; results sorted by value, ties by start.
    pub fn multistart(&self, budget: &SearchBudget) -> Vec<LocalResult> {
        if self.faces.is_empty() {
            return Vec::new();
        }
        let starts = budget.multistarts.max(1);
        let grid_seeds = starts.div_ceil(2);
        let seeds = self.grid_seeds(budget.grid_resolution, grid_seeds);
        let mut jobs: Vec<(usize, Vec<f64>)> = seeds;
        let mut s = jobs.len();
        while jobs.len() < starts {
            let mut rng = budget.rng(s as u64);
            let face_ix = rng.gen_range(0..self.faces.len());
            let face = &self.faces[face_ix];
            let z = face
                .lo
                .iter()
                .zip(&face.hi)
                .map(|(&lo, &hi)| if lo < hi { rng.gen_range(lo..=hi) } else { lo })
                .collect();
            jobs.push((face_ix, z));
            s += 1;
        }
        let mut results: Vec<LocalResult> = jobs
            .into_par_iter()
            .enumerate()
            .map(|(start, (face, z0))| {
                let (value, z) = self.descend(&self.faces[face], z0);
                LocalResult {
                    value,
                    z,
                    face,
                    start,
                }
            })
            .collect();
        results.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.start.cmp(&b.start)));
        results
    }

    /// Best `keep` grid points across all faces, ordered by value then position.
    fn grid_seeds(&self, resolution: f64, keep: usize) -> Vec<(usize, Vec<f64>)> {
        let per_face = (GRID_CAP / self.faces.len()).max(1);
        let mut all: Vec<(f64, usize, usize, Vec<f64>)> = self
            .faces
            .par_iter()
            .enumerate()
            .flat_map_iter(|(fi, face)| {
                let axes = face.free_axes();
                let counts: Vec<usize> = axes
                    .iter()
                    .map(|&a| ((face.hi[a] - face.lo[a]) / resolution).round().max(1.0) as usize + 1)
                    .collect();
                let counts = cap_counts(counts, per_face);
                let total: usize = counts.iter().product();
                let mut best: Vec<(f64, usize, usize, Vec<f64>)> = Vec::new();
                let mut digits = vec![0usize; axes.len()];
                let mut z = face.lo.clone();
                for p in 0..total {
                    for (k, &a) in axes.iter().enumerate() {
                        let t = if counts[k] == 1 {
                            0.0
                        } else {
                            digits[k] as f64 / (counts[k] - 1) as f64
                        };
                        z[a] = face.lo[a] + t * (face.hi[a] - face.lo[a]);
                    }
                    let v = self.value(face, &z);
                    push_best(&mut best, (v, fi, p, z.clone()), keep);
                    for k in (0..digits.len()).rev() {
                        digits[k] += 1;
                        if digits[k] < counts[k] {
                            break;
                        }
                        digits[k] = 0;
                    }
                }
                best
            })
            .collect();
        sort_seeds(&mut all);
        all.truncate(keep);
        all.into_iter().map(|(_, f, _, z)| (f, z)).collect()
    }

    /// Local minimax descent: steps along the negated minimum-norm element of
    /// the hull of ε-active projected gradients, with Armijo backtracking.
    pub fn descend(&self, face: &Face, mut z: Vec<f64>) -> (f64, Vec<f64>) {
        face.clip(&mut z);
        let mut pieces = (self.eval)(face, &z, true);
        let mut f = pieces.max();
        if !f.is_finite() {
            return (f64::INFINITY, z);
        }
        let mut step = 1.0;
        for _ in 0..MAX_ITERS {
            let mut moved = false;
            let scale = 1.0 + f.abs();
            for eps in [1e-2, 1e-4, 1e-6, 1e-9, 1e-12].map(|e| e * scale) {
                let active: Vec<Vec<f64>> = pieces
                    .values
                    .iter()
                    .zip(&pieces.grads)
                    .filter(|(v, _)| **v >= f - eps)
                    .map(|(_, g)| project_gradient(face, &z, g))
                    .collect();
                let d: Vec<f64> = min_norm_point(&active).iter().map(|v| -v).collect();
                let dn2: f64 = d.iter().map(|v| v * v).sum();
                if dn2 <= 1e-30 {
                    continue;
                }
                let mut a = step;
                for _ in 0..MAX_HALVINGS {
                    let mut zt: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + a * di).collect();
                    face.clip(&mut zt);
                    let ds: f64 = zt.iter().zip(&z).zip(&d).map(|((t, z0), di)| (t - z0) * di).sum();
                    if ds <= 0.0 {
                        break;
                    }
                    let ft = self.value(face, &zt);
                    if ft <= f - ARMIJO * ds {
                        z = zt;
                        moved = true;
                        break;
                    }
                    a *= 0.5;
                }
                if moved {
                    step = (a * 2.0).min(1e3);
                    break;
                }
            }
            if !moved {
                break;
            }
            pieces = (self.eval)(face, &z, true);
            f = pieces.max();
        }
        self.vertex_polish(face, z, f)
    }

    /// Newton on `g_j(z) = t` over the active pieces when they outnumber the
    /// interior free coordinates by exactly one, i.e. the local minimax is a
    /// vertex. Each step is kept only if it lowers the max.
    fn vertex_polish(&self, face: &Face, mut z: Vec<f64>, mut f: f64) -> (f64, Vec<f64>) {
        for _ in 0..VERTEX_STEPS {
            let pieces = (self.eval)(face, &z, true);
            let tol = VERTEX_ACTIVE * (1.0 + f.abs());
            let active: Vec<usize> = (0..pieces.values.len())
                .filter(|&j| pieces.values[j] >= f - tol)
                .collect();
            let free: Vec<usize> = (0..z.len())
                .filter(|&i| face.lo[i] < z[i] && z[i] < face.hi[i])
                .collect();
            let k = free.len() + 1;
            if active.len() != k {
                break;
            }
            let mut jac = nalgebra::DMatrix::<f64>::zeros(k, k);
            let mut rhs = nalgebra::DVector::<f64>::zeros(k);
            for (r, &j) in active.iter().enumerate() {
                for (c, &i) in free.iter().enumerate() {
                    jac[(r, c)] = pieces.grads[j][i];
                }
                jac[(r, k - 1)] = -1.0;
                rhs[r] = f - pieces.values[j];
            }
            let Some(delta) = jac.lu().solve(&rhs) else {
                break;
            };
            let mut zt = z.clone();
            for (c, &i) in free.iter().enumerate() {
                zt[i] += delta[c];
            }
            face.clip(&mut zt);
            let ft = self.value(face, &zt);
            if ft < f {
                z = zt;
                f = ft;
            } else {
                break;
            }
        }
        (f, z)
    }

    /// Newton polish for single-piece smooth problems, driven by the
    /// gradient of the lone piece with a central-difference Hessian.
    /// Steps are kept only if they shrink the projected gradient without
    /// raising the objective.
    pub fn polish_smooth(&self, face: &Face, mut z: Vec<f64>) -> (f64, Vec<f64>) {
        let grad = |z: &[f64]| -> Vec<f64> {
            let p = (self.eval)(face, z, true);
            p.grads.into_iter().next().unwrap_or_default()
        };
        let mut f = self.value(face, &z);
        for _ in 0..30 {
            let g = grad(&z);
            let pg = project_gradient(face, &z, &g);
            let gnorm = norm2(&pg);
            if gnorm < 1e-14 {
                break;
            }
            let free: Vec<usize> = (0..z.len())
                .filter(|&i| pg[i] != 0.0 && face.lo[i] < face.hi[i])
                .collect();
            let k = free.len();
            let mut h = nalgebra::DMatrix::<f64>::zeros(k, k);
            for (c, &j) in free.iter().enumerate() {
                let step = 1e-6 * (1.0 + z[j].abs());
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += step;
                zm[j] -= step;
                let gp = grad(&zp);
                let gm = grad(&zm);
                for (r, &i) in free.iter().enumerate() {
                    h[(r, c)] = (gp[i] - gm[i]) / (2.0 * step);
                }
            }
            let h = (&h + h.transpose()) * 0.5;
            let rhs = nalgebra::DVector::from_iterator(k, free.iter().map(|&i| -pg[i]));
            let Some(delta) = h.lu().solve(&rhs) else {
                break;
            };
            let mut zt = z.clone();
            for (r, &i) in free.iter().enumerate() {
                zt[i] += delta[r];
            }
            face.clip(&mut zt);
            let ft = self.value(face, &zt);
            let gt = project_gradient(face, &zt, &grad(&zt));
            if norm2(&gt) < gnorm && ft <= f + 1e-13 * (1.0 + f.abs()) {
                z = zt;
                f = ft;
            } else {
                break;
            }
        }
        (self.value(face, &z), z)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sort_seeds(v: &mut [(f64, usize, usize, Vec<f64>)]) {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
}

fn push_best(best: &mut Vec<(f64, usize, usize, Vec<f64>)>, item: (f64, usize, usize, Vec<f64>), keep: usize) {
    if best.len() < keep {
        best.push(item);
        if best.len() == keep {
            sort_seeds(best);
        }
        return;
    }
    if let Some(last) = best.last() {
        if item.0 < last.0 {
            best.pop();
            let pos = best.partition_point(|b| b.0 <= item.0);
            best.insert(pos, item);
        }
    }
}

/// Shrinks per-axis point counts until their product fits `cap`.
fn cap_counts(mut counts: Vec<usize>, cap: usize) -> Vec<usize> {
    while counts.iter().product::<usize>() > cap {
        let Some(k) = (0..counts.len()).max_by_key(|&k| counts[k]) else {
            break;
        };
        if counts[k] <= 2 {
            break;
        }
        counts[k] = (counts[k] - 1) / 2 + 1;
    }
    counts
}

/// Zeroes gradient components of fixed coordinates and of coordinates at a
/// bound where a descent step would leave the box.
fn project_gradient(face: &Face, z: &[f64], g: &[f64]) -> Vec<f64> {
    g.iter()
        .enumerate()
        .map(|(i, &gi)| {
            let fixed = face.lo[i] >= face.hi[i];
            let blocked_lo = z[i] <= face.lo[i] && gi > 0.0;
            let blocked_hi = z[i] >= face.hi[i] && gi < 0.0;
            if fixed || blocked_lo || blocked_hi {
                0.0
            } else {
                gi
            }
        })
        .collect()
}

/// Minimum-norm point of the convex hull of `vs` (Frank-Wolfe with exact
/// line search).
pub(crate) fn min_norm_point(vs: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = vs
        .iter()
        .min_by(|a, b| dot(a, a).total_cmp(&dot(b, b)))
    else {
        return Vec::new();
    };
    let mut v = first.clone();
    if vs.len() == 1 {
        return v;
    }
    for _ in 0..200 {
        let vv = dot(&v, &v);
        let (j, m) = vs
            .iter()
            .enumerate()
            .map(|(j, g)| (j, dot(g, &v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let gap = vv - m;
        if gap <= 1e-15 * vv.max(1e-300) {
            break;
        }
        let diff: Vec<f64> = v.iter().zip(&vs[j]).map(|(a, b)| a - b).collect();
        let denom = dot(&diff, &diff);
        if denom == 0.0 {
            break;
        }
        let gamma = (dot(&v, &diff) / denom).clamp(0.0, 1.0);
        for (vi, di) in v.iter_mut().zip(&diff) {
            *vi -= gamma * di;
        }
    }
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Every nonempty subset of `0..n` as a sorted index list, small first.
pub(crate) fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1u32 << n))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Faces of `{x ≥ 0, ‖x‖_∞ = 1, supp(x) ⊆ S}` for each support `S`.
pub(crate) fn nonneg_faces(n: usize, supports: &[Vec<usize>]) -> Vec<Face> {
    let mut faces = Vec::new();
    for s in supports {
        for &k in s {
            let mut lo = vec![0.0; n];
            let mut hi = vec![0.0; n];
            for &j in s {
                hi[j] = 1.0;
            }
            lo[k] = 1.0;
            faces.push(Face {
                lo,
                hi,
                support: s.clone(),
            });
        }
    }
    faces
}

/// Faces of `{‖x‖_∞ = 1, supp(x) ⊆ S}`, one per pinned coordinate and sign.
pub(crate) fn signed_faces(n: usize, supports: &[Vec<usize>]) -> Vec<Face> {
    let mut faces = Vec::new();
    for s in supports {
        for &k in s {
            for sign in [1.0, -1.0] {
                let mut lo = vec![0.0; n];
                let mut hi = vec![0.0; n];
                for &j in s {
                    lo[j] = -1.0;
                    hi[j] = 1.0;
                }
                lo[k] = sign;
                hi[k] = sign;
                faces.push(Face {
                    lo,
                    hi,
                    support: s.clone(),
                });
            }
        }
    }
    faces
}
