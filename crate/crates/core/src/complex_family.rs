//! Murmuration functions for complex Dirichlet characters and their limits.
//!
//! Each sum is built as a reusable family object (one per window, parity and
//! mode) so that y-sweeps pay for character tables once. The single-point
//! functions construct the object and evaluate it at one y.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{is_prime_u64, next_prime_at_or_above, primes_in_interval, Factorization};
use crate::characters::{
    fundamental_discriminants, CharacterGroup, FamilySelector, GaussKernel, GroupSpectrum,
    Parity, ResidueTable,
};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, unit_root, ComplexNeumaier, Neumaier};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Conductor range of a family sum (both endpoints included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowSpec {
    /// N ∈ [X, cX].
    Geometric { x: u64, c: f64 },
    /// N ∈ [X, X + X^δ].
    Short { x: u64, delta: f64 },
}

impl WindowSpec {
    pub fn geometric(x: u64, c: f64) -> Result<Self> {
        if x < 1 || !(c > 1.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "geometric window needs X >= 1 and c > 1, got X={x}, c={c}"
            )));
        }
        Ok(WindowSpec::Geometric { x, c })
    }

    pub fn short(x: u64, delta: f64) -> Result<Self> {
        if x < 1 || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "short window needs X >= 1 and 0 < delta < 1, got X={x}, delta={delta}"
            )));
        }
        Ok(WindowSpec::Short { x, delta })
    }

    pub fn x(&self) -> u64 {
        match *self {
            WindowSpec::Geometric { x, .. } | WindowSpec::Short { x, .. } => x,
        }
    }

    /// Inclusive integer bounds.
    pub fn bounds(&self) -> (u64, u64) {
        match *self {
            WindowSpec::Geometric { x, c } => (x, (c * x as f64).floor() as u64),
            WindowSpec::Short { x, delta } => {
                let xf = x as f64;
                (x, (xf + xf.powf(delta)).floor() as u64)
            }
        }
    }

    /// X for geometric windows, X^δ for short ones.
    pub fn length_scale(&self) -> f64 {
        match *self {
            WindowSpec::Geometric { x, .. } => x as f64,
            WindowSpec::Short { x, delta } => (x as f64).powf(delta),
        }
    }
}

/// Which conductors N in the window are summed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConductorFilter {
    PrimesOnly,
    NotTwoModFour,
    /// N prime or squarefull, and N ≢ 2 (mod 4).
    SpecialS,
}

impl ConductorFilter {
    pub fn admits(self, n: u64) -> bool {
        match self {
            ConductorFilter::PrimesOnly => is_prime_u64(n),
            ConductorFilter::NotTwoModFour => n % 4 != 2,
            ConductorFilter::SpecialS => {
                n % 4 != 2 && (is_prime_u64(n) || Factorization::new(n).is_squarefull())
            }
        }
    }

    pub fn conductors(self, lo: u64, hi: u64) -> Vec<u64> {
        match self {
            ConductorFilter::PrimesOnly => primes_in_interval(lo, hi),
            _ => (lo.max(1)..=hi).filter(|&n| self.admits(n)).collect(),
        }
    }
}

/// Brute enumeration of characters and Gauss sums, or the algebraic closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComputeMode {
    Brute,
    Closed,
}

/// ⌈yX⌉^𝔭.
pub fn family_prime(y: f64, x: u64) -> Result<u64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!("y must be finite and >= 0, got {y}")));
    }
    next_prime_at_or_above(y * x as f64)
}

/// Residue table F(r) = Σ_χ c_χ χ(r), r = 0..N, from explicit coefficients.
fn combine_direct(
    g: &CharacterGroup,
    kernel: &GaussKernel,
    terms: &[(Vec<u32>, Complex64)],
) -> Vec<Complex64> {
    let n = g.modulus() as usize;
    let mut acc = vec![ComplexNeumaier::new(); n];
    let units = g.units_by_position();
    for (walk, c) in terms {
        for (&r, &t) in units.iter().zip(walk) {
            acc[r as usize].add(c * kernel.phase(t as u64));
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

/// F(r) = Σ_{χ ∈ D±(N)} χ(r)/τ(χ), and optionally
/// G(r) = (1/N) Σ_{χ ∈ I±(N)} τ(χ̄)χ(r), by direct Gauss sums.
fn brute_tables(n: u64, parity: Parity, with_imprimitive: bool) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let g = CharacterGroup::new(n)?;
    let kernel = GaussKernel::new(&g);
    let sign = parity.sign();
    let chars: Vec<_> = g.characters().collect();
    let walks: Vec<Vec<u32>> = chars.iter().map(|c| g.phase_walk(c)).collect();
    let taus: Vec<Complex64> = walks.iter().map(|w| kernel.gauss_sum_from_walk(&g, w)).collect();
    let mut prim = Vec::new();
    let mut imprim = Vec::new();
    for (k, chi) in chars.iter().enumerate() {
        if chi.is_principal() || g.parity(chi) != sign {
            continue;
        }
        if g.is_primitive(chi) {
            prim.push((walks[k].clone(), 1.0 / taus[k]));
        } else if with_imprimitive {
            let conj = g.position(&g.conjugate(chi)) as usize;
            imprim.push((walks[k].clone(), taus[conj] / n as f64));
        }
    }
    let f = combine_direct(&g, &kernel, &prim);
    let e = if with_imprimitive {
        combine_direct(&g, &kernel, &imprim)
    } else {
        Vec::new()
    };
    Ok((f, e))
}

/// F(r) = Σ_{χ ∈ D±(N)} χ(r)/τ(χ) through the group DFT.
fn spectral_table(n: u64, parity: Parity) -> Result<Vec<Complex64>> {
    let g = CharacterGroup::new(n)?;
    let s = GroupSpectrum::new(&g);
    let taus = s.gauss_sums();
    let fam = FamilySelector::primitive(parity);
    let coeffs: Vec<Complex64> = (0..g.order())
        .map(|k| {
            let chi = g.character(k);
            if fam.contains(&g, &chi) {
                1.0 / taus[k as usize]
            } else {
                ZERO
            }
        })
        .collect();
    Ok(s.synthesize(&coeffs))
}

// ---------------------------------------------------------------------------
// Prime conductors: P± and P̃±.

/// Σ_{N prime in window} Σ_{χ ∈ D±(N)} χ(p)/τ(χ), scaled by log X / X (or X^δ).
#[derive(Debug, Clone)]
pub struct PrimeConductorSum {
    window: WindowSpec,
    parity: Parity,
    conductors: Vec<u64>,
    tables: Option<Vec<Vec<Complex64>>>,
}

impl PrimeConductorSum {
    pub fn new(window: WindowSpec, parity: Parity, mode: ComputeMode) -> Result<Self> {
        let (lo, hi) = window.bounds();
        let conductors = primes_in_interval(lo, hi);
        let tables = match mode {
            ComputeMode::Closed => None,
            ComputeMode::Brute => Some(
                conductors
                    .par_iter()
                    .map(|&n| brute_tables(n, parity, false).map(|t| t.0))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Self {
            window,
            parity,
            conductors,
            tables,
        })
    }

    pub fn conductors(&self) -> &[u64] {
        &self.conductors
    }

    /// The unscaled double sum at the prime p.
    pub fn raw_sum_at_prime(&self, p: u64) -> Complex64 {
        let mut acc = ComplexNeumaier::new();
        for (i, &n) in self.conductors.iter().enumerate() {
            // p = N contributes nothing: every character mod N vanishes at N.
            if n == p {
                continue;
            }
            let v = match &self.tables {
                Some(t) => t[i][(p % n) as usize],
                None => closed_prime(n, p, self.parity),
            };
            acc.add(v);
        }
        acc.value()
    }

    pub fn eval(&self, y: f64) -> Result<Complex64> {
        let x = self.window.x();
        let p = family_prime(y, x)?;
        let scale = (x as f64).ln() / self.window.length_scale();
        Ok(scale * self.raw_sum_at_prime(p))
    }
}

fn closed_prime(n: u64, p: u64, parity: Parity) -> Complex64 {
    let z = unit_root(p % n, n);
    let nf = n as f64;
    let w = (nf - 1.0) / nf;
    match parity {
        Parity::Even => Complex64::new(w * z.re + 1.0 / nf, 0.0),
        Parity::Odd => Complex64::new(0.0, -w * z.im),
    }
}

pub fn murmuration_p(y: f64, x: u64, c: f64, parity: Parity, mode: ComputeMode) -> Result<Complex64> {
    PrimeConductorSum::new(WindowSpec::geometric(x, c)?, parity, mode)?.eval(y)
}

pub fn murmuration_p_short(
    y: f64,
    x: u64,
    delta: f64,
    parity: Parity,
    mode: ComputeMode,
) -> Result<Complex64> {
    PrimeConductorSum::new(WindowSpec::short(x, delta)?, parity, mode)?.eval(y)
}

/// ∫₁^c cos(2πy/x)dx (even) or −i∫₁^c sin(2πy/x)dx (odd).
pub fn limit_p(y: f64, c: f64, parity: Parity) -> Complex64 {
    const TOL: f64 = 1e-10;
    match parity {
        Parity::Even => Complex64::new(adaptive_simpson(|x| (TAU * y / x).cos(), 1.0, c, TOL), 0.0),
        Parity::Odd => Complex64::new(0.0, -adaptive_simpson(|x| (TAU * y / x).sin(), 1.0, c, TOL)),
    }
}

/// cos(2πy) (even) or −i·sin(2πy) (odd).
pub fn limit_p_short(y: f64, parity: Parity) -> Complex64 {
    let (s, c) = exact_sin_cos(y);
    match parity {
        Parity::Even => Complex64::new(c, 0.0),
        Parity::Odd => Complex64::new(0.0, -s),
    }
}

/// sin and cos of 2πy, exact when 4y is an integer.
fn exact_sin_cos(y: f64) -> (f64, f64) {
    let q = 4.0 * y;
    if q.fract() == 0.0 && q.abs() < 1e15 {
        return match (q as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    (TAU * y).sin_cos()
}

// ---------------------------------------------------------------------------
// Composite conductors: Q±, E±, T±.

/// The three composite-conductor sums. Q and E are only filled in brute mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TValues {
    pub q: Option<Complex64>,
    pub e: Option<Complex64>,
    pub t: Complex64,
}

/// T± = Q± ± E± over N ≢ 2 (mod 4) in a window, scaled by 1/X (or 1/X^δ).
#[derive(Debug, Clone)]
pub struct CompositeConductorSum {
    window: WindowSpec,
    parity: Parity,
    conductors: Vec<u64>,
    tables: Option<Vec<(Vec<Complex64>, Vec<Complex64>)>>,
}

impl CompositeConductorSum {
    pub fn new(window: WindowSpec, parity: Parity, mode: ComputeMode) -> Result<Self> {
        let (lo, hi) = window.bounds();
        let conductors = ConductorFilter::NotTwoModFour.conductors(lo, hi);
        let tables = match mode {
            ComputeMode::Closed => None,
            ComputeMode::Brute => Some(
                conductors
                    .par_iter()
                    .map(|&n| brute_tables(n, parity, true))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Self {
            window,
            parity,
            conductors,
            tables,
        })
    }

    pub fn eval(&self, y: f64) -> Result<TValues> {
        let x = self.window.x();
        let p = family_prime(y, x)?;
        let scale = 1.0 / self.window.length_scale();
        let sign = self.parity.sign() as f64;
        match &self.tables {
            Some(tables) => {
                let mut q = ComplexNeumaier::new();
                let mut e = ComplexNeumaier::new();
                for (&n, (f, g)) in self.conductors.iter().zip(tables) {
                    let r = (p % n) as usize;
                    q.add(f[r]);
                    e.add(g[r]);
                }
                let q = scale * q.value();
                let e = scale * e.value();
                Ok(TValues {
                    q: Some(q),
                    e: Some(e),
                    t: q + sign * e,
                })
            }
            None => {
                let mut acc = ComplexNeumaier::new();
                for &n in &self.conductors {
                    acc.add(closed_composite(n, p, self.parity));
                }
                Ok(TValues {
                    q: None,
                    e: None,
                    t: scale * acc.value(),
                })
            }
        }
    }
}

/// Per-N contribution to T±: −μ(N)/N + (φ(N)/N)cos(2πp/N), or
/// −i(φ(N)/N)sin(2πp/N); zero when p | N.
fn closed_composite(n: u64, p: u64, parity: Parity) -> Complex64 {
    if n % p == 0 {
        return ZERO;
    }
    let f = Factorization::new(n);
    let nf = n as f64;
    let w = f.euler_phi() as f64 / nf;
    let z = unit_root(p % n, n);
    match parity {
        Parity::Even => Complex64::new(-(f.mobius() as f64) / nf + w * z.re, 0.0),
        Parity::Odd => Complex64::new(0.0, -w * z.im),
    }
}

pub fn murmuration_t(
    y: f64,
    window: WindowSpec,
    parity: Parity,
    mode: ComputeMode,
) -> Result<TValues> {
    CompositeConductorSum::new(window, parity, mode)?.eval(y)
}

/// Geometric (with c) or short window limit shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitWindow {
    Geometric(f64),
    Short,
}

/// (5/π²) times the matching prime-conductor limit.
pub fn limit_t(y: f64, window: LimitWindow, parity: Parity) -> Complex64 {
    let k = 5.0 / (PI * PI);
    k * match window {
        LimitWindow::Geometric(c) => limit_p(y, c, parity),
        LimitWindow::Short => limit_p_short(y, parity),
    }
}

// ---------------------------------------------------------------------------
// Special conductor set S.

/// Q̃ˢ± over N ∈ S in the short window, normalized by Σ_{N ∈ S ∩ window} φ(N)/N.
#[derive(Debug, Clone)]
pub struct SpecialConductorSum {
    x: u64,
    parity: Parity,
    conductors: Vec<u64>,
    weight: f64,
    tables: Option<Vec<Vec<Complex64>>>,
}

impl SpecialConductorSum {
    pub fn new(x: u64, delta: f64, parity: Parity, mode: ComputeMode) -> Result<Self> {
        let window = WindowSpec::short(x, delta)?;
        let (lo, hi) = window.bounds();
        let conductors = ConductorFilter::SpecialS.conductors(lo, hi);
        if conductors.is_empty() {
            return Err(Error::EmptySpecialWindow { lo, hi });
        }
        let weight: Neumaier = conductors
            .iter()
            .map(|&n| Factorization::new(n).euler_phi() as f64 / n as f64)
            .collect();
        let tables = match mode {
            ComputeMode::Closed => None,
            ComputeMode::Brute => Some(
                conductors
                    .par_iter()
                    .map(|&n| brute_tables(n, parity, false).map(|t| t.0))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Self {
            x,
            parity,
            conductors,
            weight: weight.value(),
            tables,
        })
    }

    pub fn conductors(&self) -> &[u64] {
        &self.conductors
    }

    pub fn eval(&self, y: f64) -> Result<Complex64> {
        let p = family_prime(y, self.x)?;
        let mut acc = ComplexNeumaier::new();
        for (i, &n) in self.conductors.iter().enumerate() {
            let v = match &self.tables {
                Some(t) => t[i][(p % n) as usize],
                // On S the imprimitive correction vanishes, leaving the
                // principal-character term and the cosine (or sine).
                None => closed_composite(n, p, self.parity),
            };
            acc.add(v);
        }
        Ok(acc.value() / self.weight)
    }
}

pub fn murmuration_qs(
    y: f64,
    x: u64,
    delta: f64,
    parity: Parity,
    mode: ComputeMode,
) -> Result<Complex64> {
    SpecialConductorSum::new(x, delta, parity, mode)?.eval(y)
}

// ---------------------------------------------------------------------------
// Raw dyadic sums behind the quadratic and complex dyadic figures.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyadicFamily {
    /// Primitive quadratic characters.
    Quadratic,
    /// All primitive characters.
    Primitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    None,
    InverseX,
}

/// Σ_{N ∈ [X, 2X)} Σ_{χ ∈ family±(N)} χ(p)/τ(χ) for every prime p ≤ p_max.
pub fn dyadic_raw_sum(
    x: u64,
    parity: Parity,
    family: DyadicFamily,
    p_max: u64,
    normalization: Normalization,
) -> Result<Vec<(u64, Complex64)>> {
    if x < 1 {
        return Err(Error::InvalidArgument("dyadic window needs X >= 1".into()));
    }
    let primes = primes_in_interval(2, p_max);
    let values = match family {
        DyadicFamily::Quadratic => quadratic_dyadic(x, parity, &primes),
        DyadicFamily::Primitive => primitive_dyadic(x, parity, &primes)?,
    };
    let scale = match normalization {
        Normalization::None => 1.0,
        Normalization::InverseX => 1.0 / x as f64,
    };
    Ok(primes
        .into_iter()
        .zip(values)
        .map(|(p, v)| (p, scale * v))
        .collect())
}

fn primitive_dyadic(x: u64, parity: Parity, primes: &[u64]) -> Result<Vec<Complex64>> {
    let moduli: Vec<u64> = (x..2 * x).filter(|n| n % 4 != 2).collect();
    let tables = moduli
        .par_iter()
        .map(|&n| spectral_table(n, parity))
        .collect::<Result<Vec<_>>>()?;
    Ok(primes
        .par_iter()
        .map(|&p| {
            let mut acc = ComplexNeumaier::new();
            for (&n, t) in moduli.iter().zip(&tables) {
                acc.add(t[(p % n) as usize]);
            }
            acc.value()
        })
        .collect())
}

/// Quadratic family through fundamental discriminants: the primitive
/// quadratic characters mod N are χ_D with |D| = N, even iff D > 0, and
/// τ(χ_D) = √N or i√N.
fn quadratic_dyadic(x: u64, parity: Parity, primes: &[u64]) -> Vec<Complex64> {
    let discs: Vec<i64> = fundamental_discriminants(x, 2 * x)
        .into_iter()
        .filter(|&d| (d > 0) == (parity == Parity::Even))
        .collect();
    let moduli: Vec<u64> = discs.iter().map(|d| d.unsigned_abs()).collect();
    let inv_sqrt: Vec<f64> = moduli.iter().map(|&m| 1.0 / (m as f64).sqrt()).collect();
    let tau_unit = match parity {
        Parity::Even => Complex64::new(1.0, 0.0),
        Parity::Odd => Complex64::new(0.0, -1.0),
    };
    primes
        .par_iter()
        .map(|&p| {
            let mut acc = Neumaier::new();
            if p == 2 {
                for (&d, &w) in discs.iter().zip(&inv_sqrt) {
                    acc.add(crate::arith::kronecker_two(d as i128) as f64 * w);
                }
                return tau_unit * acc.value();
            }
            let table = ResidueTable::new(p);
            let mut prev = 0u64;
            let mut r = 0u64;
            for (&m, &w) in moduli.iter().zip(&inv_sqrt) {
                // Moduli ascend in small steps, so the residue advances by the
                // gap instead of a fresh division.
                let gap = m - prev;
                r += if gap < p { gap } else { gap % p };
                if r >= p {
                    r -= p;
                }
                prev = m;
                acc.add(table.legendre_residue(r) as f64 * w);
            }
            // (D/p) = (−1/p)(|D|/p) for negative D.
            let sign = if parity == Parity::Odd { table.legendre(-1) } else { 1 };
            tau_unit * (sign as f64 * acc.value())
        })
        .collect()
}
