//! Primes, factorization and the multiplicative functions used throughout.

use crate::error::{Error, Result};

/// Bit-packed sieve of Eratosthenes on `0..=limit`.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    bits: Vec<u64>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let words = (limit / 64 + 1) as usize;
        let mut bits = vec![u64::MAX; words];
        clear_bit(&mut bits, 0);
        if limit >= 1 {
            clear_bit(&mut bits, 1);
        }
        let mut p = 2u64;
        while p * p <= limit {
            if test_bit(&bits, p) {
                let mut m = p * p;
                while m <= limit {
                    clear_bit(&mut bits, m);
                    m += p;
                }
            }
            p += 1;
        }
        // Clear the padding past `limit` so iteration stops cleanly.
        for n in limit + 1..(words as u64) * 64 {
            clear_bit(&mut bits, n);
        }
        Self { limit, bits }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Primality of `n`; falls back to Miller-Rabin above the table.
    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit {
            test_bit(&self.bits, n)
        } else {
            is_prime_u64(n)
        }
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let tz = word.trailing_zeros() as u64;
                word &= word - 1;
                Some(w as u64 * 64 + tz)
            })
        })
    }

    /// Primes in `lo..=hi`. The table is only consulted up to its limit and
    /// beyond that a segmented pass over `lo..=hi` is used.
    pub fn primes_in_interval(&self, lo: u64, hi: u64) -> Vec<u64> {
        if hi <= self.limit {
            return (lo..=hi).filter(|&n| test_bit(&self.bits, n)).collect();
        }
        primes_in_interval(lo, hi)
    }
}

#[inline]
fn test_bit(bits: &[u64], n: u64) -> bool {
    bits[(n / 64) as usize] >> (n % 64) & 1 == 1
}

#[inline]
fn clear_bit(bits: &mut [u64], n: u64) {
    bits[(n / 64) as usize] &= !(1u64 << (n % 64));
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Primes `p` with `lo <= p <= hi`, ascending.
///
/// Memory is one base table up to √hi plus one segment of at most 2^18 flags.
pub fn primes_in_interval(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = PrimeSieve::new(isqrt(hi));
    let base_primes: Vec<u64> = base.primes().collect();
    const SEG: u64 = 1 << 18;
    let mut out = Vec::new();
    let mut seg_lo = lo;
    loop {
        let seg_hi = seg_lo.saturating_add(SEG - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        let mut flags = vec![true; len];
        for &p in &base_primes {
            if p * p > seg_hi {
                break;
            }
            let first = (p * p).max(seg_lo.div_ceil(p) * p);
            let mut m = first;
            while m <= seg_hi {
                flags[(m - seg_lo) as usize] = false;
                m += p;
            }
        }
        out.extend(
            flags
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .map(|(i, _)| seg_lo + i as u64),
        );
        if seg_hi == hi {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    out
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least prime `p >= x`.
pub fn next_prime_at_or_above(x: f64) -> Result<u64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("next prime of NaN".into()));
    }
    if x <= 2.0 {
        return Ok(2);
    }
    // 2^64 as f64; anything at or above cannot be represented.
    if x >= 18_446_744_073_709_551_616.0 {
        return Err(Error::Overflow(x));
    }
    let mut n = x.ceil() as u64;
    if n > 2 && n % 2 == 0 {
        n = n.checked_add(1).ok_or(Error::Overflow(x))?;
    }
    loop {
        if is_prime_u64(n) {
            return Ok(n);
        }
        n = n.checked_add(2).ok_or(Error::Overflow(x))?;
    }
}

/// Prime factorization with factors in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Factors `n >= 1`; `1` has no factors.
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "cannot factor zero");
        let mut primes = Vec::new();
        let mut m = n;
        for p in [2u64, 3, 5] {
            while m % p == 0 {
                primes.push(p);
                m /= p;
            }
        }
        // Wheel trial division up to a modest bound, then Pollard rho.
        const TRIAL: u64 = 1 << 16;
        let mut d = 7u64;
        let gaps = [4u64, 2, 4, 2, 4, 6, 2, 6];
        let mut gi = 0;
        while d <= TRIAL && d * d <= m {
            while m % d == 0 {
                primes.push(d);
                m /= d;
            }
            d += gaps[gi];
            gi = (gi + 1) % gaps.len();
        }
        if m > 1 {
            if d * d > m {
                primes.push(m);
            } else {
                split_rho(m, &mut primes);
            }
        }
        primes.sort_unstable();
        let mut factors: Vec<(u64, u32)> = Vec::new();
        for p in primes {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        Self { n, factors }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Every exponent at least two (vacuously true for 1).
    pub fn is_squarefull(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e >= 2)
    }

    pub fn mobius(&self) -> i8 {
        if self.is_squarefree() {
            if self.factors.len() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

fn split_rho(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_rho(d, out);
    split_rho(n / d, out);
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut q, mut g) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Möbius function of |n|.
pub fn mobius(n: i64) -> Result<i8> {
    if n == 0 {
        return Err(Error::ZeroArgument("mobius"));
    }
    Ok(Factorization::new(n.unsigned_abs()).mobius())
}

/// Euler's totient. Returns 0 for 0.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    Factorization::new(n).euler_phi()
}

/// Divisors of `n >= 1` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    Factorization::new(n).divisors()
}

/// Kronecker symbol (a/n).
pub fn kronecker_symbol(a: i64, n: i64) -> Result<i8> {
    if a == 0 && n == 0 {
        return Err(Error::KroneckerZeroZero);
    }
    let mut a = a as i128;
    let mut b = n as i128;
    if b == 0 {
        return Ok(if a == 1 || a == -1 { 1 } else { 0 });
    }
    if a % 2 == 0 && b % 2 == 0 {
        return Ok(0);
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k: i8 = 1;
    if v % 2 == 1 {
        k = kronecker_two(a);
    }
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    a = a.rem_euclid(b);
    Ok(k * jacobi(a as u64, b as u64))
}

/// (a/2) for the Kronecker symbol.
#[inline]
pub fn kronecker_two(a: i128) -> i8 {
    match a.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Jacobi symbol (a/b) for odd positive `b`.
pub fn jacobi(mut a: u64, mut b: u64) -> i8 {
    debug_assert!(b % 2 == 1);
    let mut k = 1i8;
    a %= b;
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 && matches!(b % 8, 3 | 5) {
            k = -k;
        }
        if a % 4 == 3 && b % 4 == 3 {
            k = -k;
        }
        (a, b) = (b, a);
        a %= b;
    }
    if b == 1 {
        k
    } else {
        0
    }
}

/// Parity and square-structure flags of |n|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegerClass {
    pub odd: bool,
    pub squarefree: bool,
    pub squarefull: bool,
}

pub fn classify_integer(n: i64) -> Result<IntegerClass> {
    if n == 0 {
        return Err(Error::ZeroArgument("classify_integer"));
    }
    let f = Factorization::new(n.unsigned_abs());
    Ok(IntegerClass {
        odd: n % 2 != 0,
        squarefree: f.is_squarefree(),
        squarefull: f.is_squarefull(),
    })
}

/// Linear sieve of smallest prime factor, μ and φ on `0..=limit`.
#[derive(Debug, Clone)]
pub struct MultiplicativeTable {
    spf: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u32>,
}

impl MultiplicativeTable {
    pub fn new(limit: usize) -> Self {
        assert!(limit < u32::MAX as usize);
        let mut spf = vec![0u32; limit + 1];
        let mut mu = vec![0i8; limit + 1];
        let mut phi = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        if limit >= 1 {
            mu[1] = 1;
            phi[1] = 1;
        }
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                phi[i] = i as u32 - 1;
                primes.push(i as u32);
            }
            for &p in &primes {
                let m = i * p as usize;
                if p > spf[i] || m > limit {
                    break;
                }
                spf[m] = p;
                if p == spf[i] {
                    mu[m] = 0;
                    phi[m] = phi[i] * p;
                } else {
                    mu[m] = -mu[i];
                    phi[m] = phi[i] * (p - 1);
                }
            }
        }
        Self { spf, mu, phi }
    }

    pub fn limit(&self) -> usize {
        self.mu.len() - 1
    }

    #[inline]
    pub fn mu(&self, n: usize) -> i8 {
        self.mu[n]
    }

    #[inline]
    pub fn phi(&self, n: usize) -> u32 {
        self.phi[n]
    }

    #[inline]
    pub fn smallest_prime_factor(&self, n: usize) -> u32 {
        self.spf[n]
    }

    pub fn mu_slice(&self) -> &[i8] {
        &self.mu
    }

    /// Factorization of `1 <= n <= limit` by repeated table lookup.
    pub fn factor(&self, n: usize) -> Factorization {
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p as u64, e));
        }
        Factorization {
            n: n as u64,
            factors,
        }
    }
}
