use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use super::weight::WeightFunction;
use super::TruncationPolicy;
use crate::error::{Error, Result};
use crate::numerics::{GaussLegendre, Neumaier};

const TAU: f64 = 2.0 * PI;
/// Grid points evaluated per exact reseed of the rotation recurrence.
const CHUNK: usize = 64;
/// Chunks evaluated per parallel batch while searching for a cutoff.
const BATCH: usize = 64;

/// Φ̃(ξ) = ∫ (cos 2πξx + sin 2πξx) Φ(x) dx by composite Gauss–Legendre.
///
/// Panels never exceed min(support/16, 1/(4|ξ|+1)) and are split at the
/// weight's breakpoints; the panel count doubles until two successive
/// estimates agree to `policy.quad_tol`.
pub fn tilde_transform(w: &WeightFunction, xi: f64, policy: &TruncationPolicy) -> f64 {
    let (lo, hi) = w.support();
    let width = (hi - lo) / 16.0;
    let max_panel = width.min(1.0 / (4.0 * xi.abs() + 1.0));
    let f = |x: f64| {
        let t = TAU * xi * x;
        (t.cos() + t.sin()) * w.eval(x)
    };
    let gl = GaussLegendre::g16();
    let pts = w.breakpoints();
    let estimate = |scale: usize| {
        let mut acc = Neumaier::new();
        for seg in pts.windows(2) {
            let n = (((seg[1] - seg[0]) / max_panel).ceil() as usize).max(1) * scale;
            acc.add(gl.composite(f, seg[0], seg[1], n));
        }
        acc.value()
    };
    let mut scale = 1;
    let mut prev = estimate(scale);
    loop {
        scale *= 2;
        let next = estimate(scale);
        if (next - prev).abs() <= policy.quad_tol || scale >= 1 << 12 {
            return next;
        }
        prev = next;
    }
}

/// ∫_0^1 e^{iθu} du and ∫_0^1 u e^{iθu} du.
fn segment_moments(theta: f64) -> (Complex64, Complex64) {
    let it = Complex64::new(0.0, theta);
    if theta.abs() < 0.25 {
        let mut g0 = Complex64::new(0.0, 0.0);
        let mut g1 = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..20 {
            let kf = k as f64;
            if k > 0 {
                fact *= kf;
                pow *= it;
            }
            g0 += pow / (fact * (kf + 1.0));
            g1 += pow / (fact * (kf + 2.0));
        }
        (g0, g1)
    } else {
        let e = Complex64::from_polar(1.0, theta);
        let g0 = (e - 1.0) / it;
        let g1 = (e - g0) / it;
        (g0, g1)
    }
}

/// Exact Φ̃ for piecewise-linear weights.
fn tilde_piecewise_linear(pieces: &[(f64, f64, f64, f64)], xi: f64) -> f64 {
    let omega = TAU * xi;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x0, y0, x1, y1) in pieces {
        let h = x1 - x0;
        let (g0, g1) = segment_moments(omega * h);
        acc += Complex64::from_polar(1.0, omega * x0) * h * (y0 * g0 + (y1 - y0) * g1);
    }
    acc.re + acc.im
}

/// Cubic Hermite interpolant on the uniform grid k·step, k = 0..len.
#[derive(Debug, Clone)]
struct Hermite {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Hermite {
    fn end(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    fn eval(&self, x: f64) -> f64 {
        let t = x / self.step;
        let k = t.floor() as usize;
        if k + 1 >= self.values.len() {
            return if k + 1 == self.values.len() && t == k as f64 {
                self.values[k]
            } else {
                0.0
            };
        }
        let s = t - k as f64;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = 3.0 * s2 - 2.0 * s3;
        let h11 = s3 - s2;
        h00 * self.values[k]
            + h10 * self.step * self.slopes[k]
            + h01 * self.values[k + 1]
            + h11 * self.step * self.slopes[k + 1]
    }
}

/// Cosine transform Σ_j c_j cos(2π ξ u_j) and its ξ-derivative on the grid
/// ξ = k·step, for k in `start..start + CHUNK`.
///
/// The phases advance with a rotation recurrence that is reseeded exactly at
/// the start of every chunk.
fn cosine_chunk(nodes: &[f64], coeffs: &[f64], step: f64, start: usize) -> [(f64, f64); CHUNK] {
    let mut val = [0.0f64; CHUNK];
    let mut der = [0.0f64; CHUNK];
    let xi0 = step * start as f64;
    for (&u, &c) in nodes.iter().zip(coeffs) {
        let rot = Complex64::from_polar(1.0, TAU * step * u);
        let mut z = Complex64::from_polar(1.0, TAU * xi0 * u);
        let cd = -TAU * u * c;
        for t in 0..CHUNK {
            val[t] += c * z.re;
            der[t] += cd * z.im;
            z *= rot;
        }
    }
    let mut out = [(0.0, 0.0); CHUNK];
    for t in 0..CHUNK {
        out[t] = (val[t], der[t]);
    }
    out
}

/// Tabulates Σ c_j cos(2πξu_j) on a grid, extending in batches until
/// `envelope(value)` has stayed below `tol` for a whole batch.
fn tabulate_until_decay(
    nodes: &[f64],
    coeffs: &[f64],
    step: f64,
    tol: f64,
    max_points: usize,
    envelope: impl Fn(f64) -> f64,
) -> Result<Hermite> {
    let mut values = Vec::new();
    let mut slopes = Vec::new();
    let mut last_above = 0usize;
    loop {
        let base = values.len();
        let batch: Vec<[(f64, f64); CHUNK]> = (0..BATCH)
            .into_par_iter()
            .map(|c| cosine_chunk(nodes, coeffs, step, base + c * CHUNK))
            .collect();
        for chunk in &batch {
            for &(v, d) in chunk {
                if envelope(v) >= tol {
                    last_above = values.len();
                }
                values.push(v);
                slopes.push(d);
            }
        }
        if values.len() - last_above > BATCH * CHUNK {
            break;
        }
        if values.len() >= max_points {
            return Err(Error::NonFinite {
                context: format!("transform did not decay below {tol:e} within {max_points} grid points"),
            });
        }
    }
    // Keep one zero-level point past the last significant value so the
    // interpolant closes at the cutoff.
    let keep = (last_above + 2).min(values.len());
    values.truncate(keep);
    slopes.truncate(keep);
    Ok(Hermite {
        step,
        values,
        slopes,
    })
}

#[derive(Debug, Clone)]
enum TildeRepr {
    /// Φ̃(ξ) = A(|ξ|)·(cos 2πξc + sin 2πξc) with A the cosine transform of Φ
    /// about its centre c; valid for weights symmetric about c.
    Centered { center: f64, a: Hermite },
    Exact(Vec<(f64, f64, f64, f64)>),
}

/// Φ̃ precomputed once per weight.
///
/// Smooth weights are tabulated out to the point where the envelope √2·|A|
/// stays below `m_cutoff_tol`, with Hermite interpolation whose error bound
/// sits inside `quad_tol / 10`. Piecewise-linear weights use the exact
/// antiderivative and have no natural cutoff, so `policy.sharp_xi_max` is
/// reported instead.
#[derive(Debug, Clone)]
pub struct TildeTable {
    weight: WeightFunction,
    repr: TildeRepr,
    cutoff: f64,
    at_zero: f64,
}

impl TildeTable {
    pub fn new(w: &WeightFunction, policy: &TruncationPolicy) -> Result<Self> {
        policy.validate()?;
        if let Some(pieces) = w.linear_pieces() {
            let at_zero = tilde_piecewise_linear(&pieces, 0.0);
            return Ok(Self {
                weight: w.clone(),
                repr: TildeRepr::Exact(pieces),
                cutoff: policy.sharp_xi_max,
                at_zero,
            });
        }
        let c = w.center();
        let r = w.half_width();
        // Symmetric half of a composite rule on [−r, r].
        let (nodes, ws) = GaussLegendre::g16().composite_nodes(0.0, r, 96);
        let coeffs: Vec<f64> = nodes
            .iter()
            .zip(&ws)
            .map(|(&u, &wt)| 2.0 * wt * w.eval(c + u))
            .collect();
        let step = match policy.grid_step {
            Some(h) => h,
            None => {
                let m4: f64 = nodes
                    .iter()
                    .zip(&coeffs)
                    .map(|(&u, &k)| k.abs() * (TAU * u).powi(4))
                    .sum();
                let budget = 0.1 * policy.quad_tol;
                (budget * 384.0 / (SQRT_2 * m4)).powf(0.25)
            }
        };
        let a = tabulate_until_decay(&nodes, &coeffs, step, policy.m_cutoff_tol, 1 << 24, |v| {
            SQRT_2 * v.abs()
        })?;
        let cutoff = a.end();
        let at_zero = a.values[0];
        Ok(Self {
            weight: w.clone(),
            repr: TildeRepr::Centered { center: c, a },
            cutoff,
            at_zero,
        })
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    /// |ξ| beyond which the table treats Φ̃ as zero (smooth weights) or beyond
    /// which sums over Φ̃ are truncated (piecewise-linear weights).
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Φ̃(0) = ∫Φ.
    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, TildeRepr::Exact(_))
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match &self.repr {
            TildeRepr::Centered { center, a } => {
                let s = xi.abs();
                if s > self.cutoff {
                    return 0.0;
                }
                let t = TAU * xi * center;
                a.eval(s) * (t.cos() + t.sin())
            }
            TildeRepr::Exact(pieces) => tilde_piecewise_linear(pieces, xi),
        }
    }
}

/// Ĥ(0) = ∫_{x>0} Φ(x)/√x dx, computed as 2∫_0^{√hi} Φ(s²) ds.
pub fn hat_at_zero(w: &WeightFunction) -> f64 {
    let (lo, hi) = w.support();
    if hi <= 0.0 {
        return 0.0;
    }
    let s_lo = if lo > 0.0 { lo.sqrt() } else { 0.0 };
    let mut pts: Vec<f64> = w
        .breakpoints()
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(f64::sqrt)
        .collect();
    pts.insert(0, s_lo);
    pts.dedup();
    let gl = GaussLegendre::g16();
    let mut acc = Neumaier::new();
    for seg in pts.windows(2) {
        acc.add(2.0 * gl.composite(|s| w.eval(s * s), seg[0], seg[1], 256));
    }
    acc.value()
}

/// Ĥ(ξ) = 2∫_0^∞ Φ̃(w²) cos(2πwξ) dw for smooth weights, tabulated on a
/// uniform grid with Hermite interpolation.
#[derive(Debug, Clone)]
pub struct HatTable {
    table: Hermite,
    cutoff: f64,
}

impl HatTable {
    pub fn new(tilde: &TildeTable, policy: &TruncationPolicy) -> Result<Self> {
        if tilde.is_exact() {
            return Err(Error::InvalidArgument(format!(
                "the dual transform needs a smooth weight, got {}",
                tilde.weight()
            )));
        }
        let beta = tilde.weight().beta();
        let w_end = tilde.cutoff().sqrt();
        let tol = policy.m_cutoff_tol.max(0.01 * policy.quad_tol);
        let mut xi_max = 64.0 / tilde.weight().half_width().sqrt().max(0.1);
        loop {
            // Panels span about two oscillations of Φ̃(w²)cos(2πwξ) at the
            // largest ξ covered.
            let mut nodes = Vec::new();
            let mut coeffs = Vec::new();
            let gl = GaussLegendre::g16();
            let mut w0 = 0.0;
            while w0 < w_end {
                let freq = 2.0 * w0 * beta + xi_max + 1.0;
                let w1 = (w0 + (2.0 / freq).min(0.25)).min(w_end);
                let half = 0.5 * (w1 - w0);
                let mid = 0.5 * (w1 + w0);
                for (x, wt) in gl.nodes().iter().zip(gl.weights()) {
                    let w = mid + half * x;
                    nodes.push(w);
                    coeffs.push(2.0 * half * wt * tilde.eval(w * w));
                }
                w0 = w1;
            }
            let step = match policy.grid_step {
                Some(h) => h,
                None => {
                    let m4: f64 = nodes
                        .iter()
                        .zip(&coeffs)
                        .map(|(&w, &k)| k.abs() * (TAU * w).powi(4))
                        .sum();
                    (10.0 * policy.quad_tol * 384.0 / m4).powf(0.25)
                }
            };
            let max_points = (xi_max / step) as usize + BATCH * CHUNK;
            match tabulate_until_decay(&nodes, &coeffs, step, tol, max_points, f64::abs) {
                Ok(table) => {
                    let cutoff = table.end();
                    return Ok(Self { table, cutoff });
                }
                Err(_) if xi_max < 4096.0 => xi_max *= 2.0,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let s = xi.abs();
        if s > self.cutoff {
            0.0
        } else {
            self.table.eval(s)
        }
    }
}
