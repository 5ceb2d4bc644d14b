use super::transform::TildeTable;
use super::weight::WeightFunction;
use super::{TruncationPolicy, Variant};
use crate::arith::{is_prime_u64, kronecker_symbol, kronecker_two, mobius, primes_in_interval};
use crate::characters::ResidueTable;
use crate::error::{Error, Result};
use crate::numerics::{block_sum, Neumaier};

/// Positive odd squarefree magnitudes n with weights Φ(±n/X), stored as gaps
/// so residues mod p can be advanced without division.
#[derive(Debug, Clone, Default)]
struct Series {
    first: u64,
    gaps: Vec<u32>,
    weights: Vec<f64>,
    max_gap: u32,
}

impl Series {
    fn push(&mut self, last: &mut Option<u64>, n: u64, w: f64) {
        match *last {
            None => self.first = n,
            Some(prev) => {
                let g = (n - prev) as u32;
                self.max_gap = self.max_gap.max(g);
                self.gaps.push(g);
            }
        }
        *last = Some(n);
        self.weights.push(w);
    }

    /// Σ Φ(±n/X)·(n/p).
    fn legendre_sum(&self, table: &ResidueTable) -> f64 {
        if self.weights.is_empty() {
            return 0.0;
        }
        let p = table.modulus();
        let mut r = self.first % p;
        let mut acc = Neumaier::new();
        acc.add(self.weights[0] * table.legendre_residue(r) as f64);
        let fast = (self.max_gap as u64) < p;
        for (&g, &w) in self.gaps.iter().zip(&self.weights[1..]) {
            r += g as u64;
            if fast {
                if r >= p {
                    r -= p;
                }
            } else {
                r %= p;
            }
            match table.legendre_residue(r) {
                1 => acc.add(w),
                -1 => acc.add(-w),
                _ => {}
            }
        }
        acc.value()
    }

    fn len(&self) -> usize {
        self.weights.len()
    }
}

/// The weighted set {Φ(d/X) : d ∈ 𝒢} for one X and one weight, reusable
/// across primes, y values and both variants.
#[derive(Debug, Clone)]
pub struct SquarefreeWeights {
    x: u64,
    pos: Series,
    neg: Series,
    mass: f64,
}

/// Odd squarefree flags for 0..=n.
fn odd_squarefree_flags(n: u64) -> Vec<bool> {
    let n = n as usize;
    let mut ok: Vec<bool> = (0..=n).map(|k| k % 2 == 1).collect();
    let mut p = 3usize;
    while p * p <= n {
        // Composite p have a prime square-divisor already struck.
        for m in (p * p..=n).step_by(p * p) {
            ok[m] = false;
        }
        p += 2;
    }
    ok
}

impl SquarefreeWeights {
    pub fn new(x: u64, w: &WeightFunction) -> Result<Self> {
        if x == 0 {
            return Err(Error::ZeroArgument("X"));
        }
        let xf = x as f64;
        let bound = (w.beta() * xf).floor() as u64;
        let flags = odd_squarefree_flags(bound);
        let mut pos = Series::default();
        let mut neg = Series::default();
        let (mut lp, mut ln) = (None, None);
        let mut mass = Neumaier::new();
        for n in (1..=bound).filter(|&n| flags[n as usize]) {
            let nf = n as f64;
            let wp = w.eval(nf / xf);
            if wp > 0.0 {
                pos.push(&mut lp, n, wp);
                mass.add(wp);
            }
            let wn = w.eval(-nf / xf);
            if wn > 0.0 {
                neg.push(&mut ln, n, wn);
                mass.add(wn);
            }
        }
        Ok(Self {
            x,
            pos,
            neg,
            mass: mass.value(),
        })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    /// Σ_{d∈𝒢} Φ(d/X).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Number of d > 0 and d < 0 with Φ(d/X) > 0.
    pub fn counts(&self) -> (usize, usize) {
        (self.pos.len(), self.neg.len())
    }

    /// Σ_{d∈𝒢} Φ(d/X) χ(p) √p for one odd prime p, with χ = χ_{8d} or (d/·).
    pub fn prime_term(&self, p: u64, variant: Variant) -> f64 {
        let table = ResidueTable::new(p);
        let s_pos = self.pos.legendre_sum(&table);
        let s_neg = if self.neg.len() == 0 {
            0.0
        } else {
            // (−n/p) = (−1/p)(n/p).
            let eps = if p % 4 == 1 { 1.0 } else { -1.0 };
            eps * self.neg.legendre_sum(&table)
        };
        let two = match variant {
            Variant::EightD => kronecker_two(p as i128) as f64,
            Variant::Dagger => 1.0,
        };
        two * (s_pos + s_neg) * (p as f64).sqrt()
    }

    fn window(&self, y: f64, delta: f64) -> Result<Vec<u64>> {
        let xf = self.x as f64;
        if !(y.is_finite() && delta.is_finite()) || y * xf <= 2.0 {
            return Err(Error::InvalidArgument(format!(
                "empirical sums need yX > 2, got y = {y}, X = {}",
                self.x
            )));
        }
        let lo = (y * xf).ceil() as u64;
        let hi = (y * xf + xf.powf(delta)).floor() as u64;
        Ok(primes_in_interval(lo, hi))
    }

    /// M(y, X, δ) = (log X / X^{1+δ}) Σ_{p∈[yX, yX+X^δ]} Σ_{d∈𝒢} Φ(d/X) χ(p) √p.
    pub fn murmuration(&self, y: f64, delta: f64, variant: Variant) -> Result<f64> {
        let primes = self.window(y, delta)?;
        let total = block_sum(primes.len(), |i| self.prime_term(primes[i], variant));
        let xf = self.x as f64;
        Ok(xf.ln() / xf.powf(1.0 + delta) * total)
    }

    pub fn double_average(&self, y: f64, delta: f64, variant: Variant) -> Result<DoubleAverage> {
        let primes = self.window(y, delta)?;
        let xf = self.x as f64;
        if primes.is_empty() {
            return Err(Error::EmptyPrimeWindow {
                lo: (y * xf).ceil() as u64,
                hi: (y * xf + xf.powf(delta)).floor() as u64,
            });
        }
        if self.mass == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let total = block_sum(primes.len(), |i| self.prime_term(primes[i], variant));
        Ok(DoubleAverage {
            value: total / self.mass / primes.len() as f64,
            weight_mass: self.mass / xf,
            prime_count: primes.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleAverage {
    /// The prime-average of the Φ-weighted averages over 𝒢.
    pub value: f64,
    /// (1/X) Σ_{d∈𝒢} Φ(d/X), which tends to (4/π²)∫Φ.
    pub weight_mass: f64,
    pub prime_count: usize,
}

pub fn empirical_m(y: f64, x: u64, delta: f64, w: &WeightFunction, variant: Variant) -> Result<f64> {
    SquarefreeWeights::new(x, w)?.murmuration(y, delta, variant)
}

pub fn double_average_d(y: f64, x: u64, delta: f64, w: &WeightFunction) -> Result<DoubleAverage> {
    SquarefreeWeights::new(x, w)?.double_average(y, delta, Variant::EightD)
}

/// M(y, X, δ) with every symbol computed by [`kronecker_symbol`] and every d
/// classified by factorization. Slow; used to check the residue-table path.
pub fn empirical_m_naive(
    y: f64,
    x: u64,
    delta: f64,
    w: &WeightFunction,
    variant: Variant,
) -> Result<f64> {
    let xf = x as f64;
    if y * xf <= 2.0 {
        return Err(Error::InvalidArgument(format!("yX must exceed 2, got {}", y * xf)));
    }
    let lo = (y * xf).ceil() as u64;
    let hi = (y * xf + xf.powf(delta)).floor() as u64;
    let bound = (w.beta() * xf).floor() as i64;
    let mut ds = Vec::new();
    for d in -bound..=bound {
        if d % 2 == 0 || mobius(d.abs())? == 0 {
            continue;
        }
        let wt = w.eval(d as f64 / xf);
        if wt != 0.0 {
            ds.push((d, wt));
        }
    }
    let mut total = Neumaier::new();
    for p in (lo..=hi).filter(|&p| is_prime_u64(p)) {
        for &(d, wt) in &ds {
            let num = match variant {
                Variant::EightD => 8 * d,
                Variant::Dagger => d,
            };
            let chi = kronecker_symbol(num, p as i64)? as f64;
            total.add(wt * chi * (p as f64).sqrt());
        }
    }
    Ok(xf.ln() / xf.powf(1.0 + delta) * total.value())
}

/// ψ_k(t) = Σ_{3≤p≤t} (k/p).
pub fn character_prime_partial_sum(k: i64, t: f64) -> Result<i64> {
    if !(t >= 3.0) {
        return Ok(0);
    }
    let top = t.floor() as u64;
    let mut s = 0i64;
    for p in primes_in_interval(3, top) {
        s += kronecker_symbol(k, p as i64)? as i64;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Both sides of the Poisson identity
/// (1/X) Σ_{d odd} (Σ_{a²|d, a≤A} μ(a)) Φ(d/X)(d/p)√p
///   = (1/2)(2/p) Σ_{a≤A, (a,2p)=1} μ(a)/a² Σ_{k∈ℤ} (−1)^k (k/p) Φ̃(kX/(2a²p)).
pub fn soundararajan_identity_check(
    p: u64,
    x: u64,
    a_cap: u64,
    w: &WeightFunction,
) -> Result<IdentityCheck> {
    let table = TildeTable::new(w, &TruncationPolicy::default())?;
    soundararajan_identity_with(&table, p, x, a_cap)
}

/// [`soundararajan_identity_check`] with a prebuilt Φ̃ table.
pub fn soundararajan_identity_with(
    table: &TildeTable,
    p: u64,
    x: u64,
    a_cap: u64,
) -> Result<IdentityCheck> {
    let w = table.weight();
    if !w.is_smooth() {
        return Err(Error::SharpWeight);
    }
    if p < 3 || !is_prime_u64(p) {
        return Err(Error::NotOddPrime(p as i64));
    }
    if x == 0 || a_cap == 0 {
        return Err(Error::ZeroArgument("X and A must be positive"));
    }
    let xf = x as f64;
    if (a_cap * a_cap) as f64 > w.beta() * xf {
        return Err(Error::InvalidArgument(format!(
            "A = {a_cap} exceeds sqrt(beta X) = {}",
            (w.beta() * xf).sqrt()
        )));
    }
    let sp = (p as f64).sqrt();
    let (lo, hi) = w.support();
    let d_lo = (lo * xf).floor() as i64;
    let d_hi = (hi * xf).ceil() as i64;
    let mut lhs = Neumaier::new();
    for d in d_lo..=d_hi {
        if d % 2 == 0 {
            continue;
        }
        let wt = w.eval(d as f64 / xf);
        if wt == 0.0 {
            continue;
        }
        let mut c = 0i64;
        for a in 1..=a_cap as i64 {
            if d % (a * a) == 0 {
                c += mobius(a)? as i64;
            }
        }
        if c != 0 {
            lhs.add(c as f64 * wt * kronecker_symbol(d, p as i64)? as f64 * sp);
        }
    }

    let mut rhs = Neumaier::new();
    for a in (1..=a_cap).filter(|&a| a % 2 == 1 && a % p != 0) {
        let mu = mobius(a as i64)? as f64;
        if mu == 0.0 {
            continue;
        }
        let scale = xf / (2.0 * (a * a * p) as f64);
        let k_max = (table.cutoff() / scale).ceil() as i64;
        let mut inner = Neumaier::new();
        for k in -k_max..=k_max {
            let chi = kronecker_symbol(k, p as i64)? as f64;
            if chi == 0.0 {
                continue;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            inner.add(sign * chi * table.eval(k as f64 * scale));
        }
        rhs.add(mu / (a * a) as f64 * inner.value());
    }
    let two = kronecker_two(p as i128) as f64;
    Ok(IdentityCheck {
        lhs: lhs.value() / xf,
        rhs: 0.5 * two * rhs.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn residue_path_matches_naive_oracle() {
        let w = WeightFunction::bump(1.0, 2.0).unwrap();
        for v in [Variant::EightD, Variant::Dagger] {
            let fast = empirical_m(1.0, 50, 0.6, &w, v).unwrap();
            let slow = empirical_m_naive(1.0, 50, 0.6, &w, v).unwrap();
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
        let w = WeightFunction::indicator(-2.0, 0.5).unwrap();
        for (y, x) in [(0.3, 400u64), (1.7, 250)] {
            let fast = empirical_m(y, x, 0.7, &w, Variant::EightD).unwrap();
            let slow = empirical_m_naive(y, x, 0.7, &w, Variant::EightD).unwrap();
            assert!((fast - slow).abs() < 1e-12);
        }
        // Small primes exercise the slow residue update.
        let fast = empirical_m(0.1, 40, 0.5, &w, Variant::Dagger).unwrap();
        let slow = empirical_m_naive(0.1, 40, 0.5, &w, Variant::Dagger).unwrap();
        assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn negative_support_selects_odd_characters() {
        let w = WeightFunction::bump(-2.0, -1.0).unwrap();
        let s = SquarefreeWeights::new(500, &w).unwrap();
        let (npos, nneg) = s.counts();
        assert_eq!(npos, 0);
        assert!(nneg > 0);
        for d in (-1000i64..-500).filter(|d| d % 2 != 0).step_by(7) {
            if w.eval(d as f64 / 500.0) > 0.0 {
                assert_eq!(kronecker_symbol(8 * d, -1).unwrap(), -1);
            }
        }
        let w = WeightFunction::bump(1.0, 2.0).unwrap();
        let s = SquarefreeWeights::new(500, &w).unwrap();
        assert_eq!(s.counts().1, 0);
    }

    #[test]
    fn yx_must_exceed_two() {
        let w = WeightFunction::bump(1.0, 2.0).unwrap();
        assert!(empirical_m(0.01, 100, 0.6, &w, Variant::EightD).is_err());
        assert!(empirical_m(0.03, 100, 0.6, &w, Variant::EightD).is_ok());
    }

    #[test]
    fn double_average_consistency() {
        let w = WeightFunction::bump(1.0, 2.0).unwrap();
        let x = 10_000u64;
        let delta = 0.7;
        let s = SquarefreeWeights::new(x, &w).unwrap();
        for y in [0.5, 1.0, 1.5] {
            let d = s.double_average(y, delta, Variant::EightD).unwrap();
            let m = s.murmuration(y, delta, Variant::EightD).unwrap();
            let xf = x as f64;
            let back = d.value * d.weight_mass * d.prime_count as f64 * xf.ln() / xf.powf(delta);
            assert!((back - m).abs() < 1e-9, "{back} vs {m}");
        }
        // No primes in [24, 24 + 24^0.3].
        let empty = SquarefreeWeights::new(24, &w).unwrap().double_average(1.0, 0.3, Variant::EightD);
        assert!(matches!(empty, Err(Error::EmptyPrimeWindow { .. })));
    }

    #[test]
    fn odd_squarefree_mass() {
        let w = WeightFunction::bump(1.0, 2.0).unwrap();
        let s = SquarefreeWeights::new(1_000_000, &w).unwrap();
        let want = 4.0 / (PI * PI) * 0.221996908;
        assert!((s.mass() / 1e6 - want).abs() < 0.002);
        let flags = odd_squarefree_flags(2000);
        for n in 0..=2000u64 {
            let sf = n % 2 == 1 && mobius(n as i64).unwrap() != 0;
            assert_eq!(flags[n as usize], sf, "n={n}");
        }
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(character_prime_partial_sum(1, 10.0).unwrap(), 3);
        assert_eq!(character_prime_partial_sum(5, 10.0).unwrap(), -2);
        assert_eq!(character_prime_partial_sum(7, 2.5).unwrap(), 0);
    }

    #[test]
    fn soundararajan_examples() {
        let w = WeightFunction::bump(1.0, 2.0).unwrap();
        let c = soundararajan_identity_check(3, 50, 3, &w).unwrap();
        assert!(c.gap() < 1e-8, "{c:?}");
        // Φ symmetric about 75 and (150 − d / 3) = −(d/3) make this side vanish.
        assert!(c.lhs.abs() < 1e-15);
        let w = WeightFunction::bump(-2.0, -1.0).unwrap();
        let c = soundararajan_identity_check(5, 40, 1, &w).unwrap();
        assert!(c.gap() < 1e-8, "{c:?}");
        let ind = WeightFunction::indicator(1.0, 2.0).unwrap();
        assert!(matches!(
            soundararajan_identity_check(3, 50, 1, &ind),
            Err(Error::SharpWeight)
        ));
        assert!(soundararajan_identity_check(3, 50, 11, &WeightFunction::bump(1.0, 2.0).unwrap()).is_err());
    }

    #[test]
    fn soundararajan_grid() {
        let pol = TruncationPolicy::default();
        for w in [WeightFunction::bump(1.0, 2.0).unwrap(), WeightFunction::bump(-1.7, 0.4).unwrap()] {
            let t = TildeTable::new(&w, &pol).unwrap();
            let mut nontrivial = 0;
            for p in [5u64, 7, 11, 13] {
                for x in [37u64, 64, 101] {
                    for a in 1..=3u64 {
                        let c = soundararajan_identity_with(&t, p, x, a).unwrap();
                        assert!(c.gap() < 1e-8, "p={p} x={x} a={a}: {c:?}");
                        nontrivial += (c.lhs.abs() > 1e-3) as usize;
                    }
                }
            }
            assert!(nontrivial > 20, "{nontrivial}");
        }
    }

    #[test]
    fn identity_with_a_one_is_plain_sum() {
        let w = WeightFunction::bump(1.0, 2.0).unwrap();
        let c = soundararajan_identity_check(7, 60, 1, &w).unwrap();
        let mut plain = 0.0;
        for d in (61..120i64).step_by(2) {
            plain += w.eval(d as f64 / 60.0) * kronecker_symbol(d, 7).unwrap() as f64 * 7f64.sqrt();
        }
        assert!((c.lhs - plain / 60.0).abs() < 1e-14);
    }
}
