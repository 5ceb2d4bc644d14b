use num_complex::Complex64;

use crate::arith::Factorization;
use crate::error::{Error, Result};
use crate::numerics::unit_root;

/// Largest modulus accepted by [`CharacterGroup::new`].
pub const BRUTE_FORCE_BOUND: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    /// (ℤ/p^k)* for odd p, or (ℤ/4)*.
    Cyclic,
    /// The ⟨−1⟩ factor of (ℤ/2^k)*, k ≥ 3.
    TwoSign,
    /// The ⟨5⟩ factor of (ℤ/2^k)*, k ≥ 3.
    TwoFive,
}

/// One cyclic factor of (ℤ/N)*.
#[derive(Debug, Clone)]
pub struct Component {
    pub prime: u64,
    pub exponent: u32,
    /// The prime power p^k this factor lives in.
    pub modulus: u64,
    pub kind: ComponentKind,
    /// Generator modulo `modulus`.
    pub generator: u64,
    /// The unit mod N that is `generator` here and 1 at every other prime.
    pub lift: u64,
    pub order: u64,
}

/// Index of a character: one exponent per cyclic component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterIndex {
    pub exponents: Vec<u64>,
}

impl CharacterIndex {
    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

/// The dual group of (ℤ/Nℤ)* with discrete-log tables for O(1) evaluation.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    modulus: u64,
    components: Vec<Component>,
    /// lcm of the component orders; every value is a power of e(1/lcm).
    lcm: u64,
    order: u64,
    /// `residue_logs[r * ncomp + i]` is the log of r at component i.
    residue_logs: Vec<u32>,
    units: Vec<bool>,
    /// Unit residues in mixed-radix log order (component 0 fastest).
    units_by_position: Vec<u32>,
}

const NON_UNIT: u32 = u32::MAX;

impl CharacterGroup {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroArgument("character_group"));
        }
        if n > BRUTE_FORCE_BOUND {
            return Err(Error::ModulusTooLarge {
                n,
                bound: BRUTE_FORCE_BOUND,
            });
        }
        let fact = Factorization::new(n);
        let mut components = Vec::new();
        for &(p, k) in &fact.factors {
            let q = p.pow(k);
            let cofactor = n / q;
            let mut push = |kind, generator: u64, order: u64| {
                let lift = crt_lift(generator, q, cofactor);
                components.push(Component {
                    prime: p,
                    exponent: k,
                    modulus: q,
                    kind,
                    generator,
                    lift,
                    order,
                });
            };
            if p == 2 {
                match k {
                    1 => {}
                    2 => push(ComponentKind::Cyclic, 3, 2),
                    _ => {
                        push(ComponentKind::TwoSign, q - 1, 2);
                        push(ComponentKind::TwoFive, 5, q / 4);
                    }
                }
            } else {
                let mut g = primitive_root_mod_prime(p);
                if k >= 2 && pow_mod(g, p - 1, p * p) == 1 {
                    g += p;
                }
                push(ComponentKind::Cyclic, g, (p - 1) * q / p);
            }
        }
        let ncomp = components.len();
        let lcm = components.iter().fold(1u64, |acc, c| lcm(acc, c.order));
        let order = components.iter().map(|c| c.order).product();
        let nu = n as usize;
        let mut residue_logs = vec![NON_UNIT; nu * ncomp];
        let mut units = vec![false; nu];
        // Walk every unit as a product of generator lifts, so each residue
        // receives its logs directly.
        let mut logs = vec![0u64; ncomp];
        let mut a = 1 % n;
        let mut units_by_position = Vec::with_capacity(order as usize);
        for _ in 0..order {
            units[a as usize] = true;
            units_by_position.push(a as u32);
            for (i, &l) in logs.iter().enumerate() {
                residue_logs[a as usize * ncomp + i] = l as u32;
            }
            // Mixed-radix increment with component 0 fastest.
            for i in 0..ncomp {
                logs[i] += 1;
                a = mul_mod(a, components[i].lift, n);
                if logs[i] < components[i].order {
                    break;
                }
                logs[i] = 0;
            }
        }
        if n == 1 {
            units[0] = true;
        }
        Ok(Self {
            modulus: n,
            components,
            lcm,
            order,
            residue_logs,
            units,
            units_by_position,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_orders(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.order).collect()
    }

    /// One generator lift per component, as units mod N.
    pub fn generators(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.lift).collect()
    }

    /// φ(N), the number of characters.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Common denominator of all character phases.
    pub fn phase_denominator(&self) -> u64 {
        self.lcm
    }

    pub fn principal(&self) -> CharacterIndex {
        CharacterIndex {
            exponents: vec![0; self.components.len()],
        }
    }

    /// Character number `k` in mixed-radix order (component 0 fastest).
    pub fn character(&self, mut k: u64) -> CharacterIndex {
        let exponents = self
            .components
            .iter()
            .map(|c| {
                let e = k % c.order;
                k /= c.order;
                e
            })
            .collect();
        CharacterIndex { exponents }
    }

    /// Position of `chi` in the mixed-radix order.
    pub fn position(&self, chi: &CharacterIndex) -> u64 {
        let mut k = 0;
        for (c, &e) in self.components.iter().zip(&chi.exponents).rev() {
            k = k * c.order + e;
        }
        k
    }

    pub fn characters(&self) -> impl Iterator<Item = CharacterIndex> + '_ {
        (0..self.order).map(|k| self.character(k))
    }

    /// Builds an index, reducing each exponent modulo its component order.
    pub fn index(&self, exponents: &[u64]) -> Result<CharacterIndex> {
        if exponents.len() != self.components.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} exponents for modulus {}, got {}",
                self.components.len(),
                self.modulus,
                exponents.len()
            )));
        }
        Ok(CharacterIndex {
            exponents: exponents
                .iter()
                .zip(&self.components)
                .map(|(&e, c)| e % c.order)
                .collect(),
        })
    }

    pub fn conjugate(&self, chi: &CharacterIndex) -> CharacterIndex {
        CharacterIndex {
            exponents: chi
                .exponents
                .iter()
                .zip(&self.components)
                .map(|(&e, c)| (c.order - e) % c.order)
                .collect(),
        }
    }

    pub fn multiply(&self, a: &CharacterIndex, b: &CharacterIndex) -> CharacterIndex {
        CharacterIndex {
            exponents: a
                .exponents
                .iter()
                .zip(&b.exponents)
                .zip(&self.components)
                .map(|((&x, &y), c)| (x + y) % c.order)
                .collect(),
        }
    }

    /// Order of `chi` in the dual group.
    pub fn character_order(&self, chi: &CharacterIndex) -> u64 {
        chi.exponents
            .iter()
            .zip(&self.components)
            .fold(1, |acc, (&e, c)| lcm(acc, c.order / gcd(e, c.order)))
    }

    /// Unit residues ordered by their discrete-log position.
    pub fn units_by_position(&self) -> &[u32] {
        &self.units_by_position
    }

    /// Phases of χ at every unit, in the order of [`Self::units_by_position`].
    ///
    /// Walks the log lattice with a mixed-radix counter, so each step adds one
    /// precomputed increment instead of recombining all logs.
    pub fn phase_walk(&self, chi: &CharacterIndex) -> Vec<u32> {
        let l = self.lcm;
        let steps: Vec<u64> = chi
            .exponents
            .iter()
            .zip(&self.components)
            .map(|(&e, c)| e * (l / c.order) % l)
            .collect();
        let mut digits = vec![0u64; self.components.len()];
        let mut t = 0u64;
        let mut out = Vec::with_capacity(self.order as usize);
        for _ in 0..self.order {
            out.push(t as u32);
            for (i, c) in self.components.iter().enumerate() {
                t += steps[i];
                if t >= l {
                    t -= l;
                }
                digits[i] += 1;
                if digits[i] < c.order {
                    break;
                }
                digits[i] = 0;
            }
        }
        out
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> usize {
        a.rem_euclid(self.modulus as i64) as usize
    }

    #[inline]
    pub fn is_unit_residue(&self, r: usize) -> bool {
        self.units[r]
    }

    /// Discrete logs of the residue `r`, or `None` for a non-unit.
    #[inline]
    pub fn residue_logs(&self, r: usize) -> Option<&[u32]> {
        if !self.units[r] {
            return None;
        }
        let nc = self.components.len();
        Some(&self.residue_logs[r * nc..(r + 1) * nc])
    }

    /// χ(a) as the integer numerator t of e(t / phase_denominator).
    #[inline]
    pub fn phase(&self, chi: &CharacterIndex, a: i64) -> Option<u64> {
        self.phase_at_residue(chi, self.reduce(a))
    }

    #[inline]
    pub fn phase_at_residue(&self, chi: &CharacterIndex, r: usize) -> Option<u64> {
        let logs = self.residue_logs(r)?;
        let mut t = 0u64;
        for ((&l, &e), c) in logs.iter().zip(&chi.exponents).zip(&self.components) {
            let step = self.lcm / c.order;
            t = (t + (e * l as u64 % c.order) * step) % self.lcm;
        }
        Some(t)
    }

    /// χ(a): zero on non-units, otherwise an exact-phase root of unity.
    pub fn evaluate(&self, chi: &CharacterIndex, a: i64) -> Complex64 {
        match self.phase(chi, a) {
            Some(t) => unit_root(t, self.lcm),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// χ(−1) as ±1.
    pub fn parity(&self, chi: &CharacterIndex) -> i8 {
        match self.phase(chi, -1) {
            Some(0) | None => 1,
            Some(_) => -1,
        }
    }

    /// Conductor by the definition scan: the least d | N such that χ is
    /// trivial on every unit a ≡ 1 (mod d).
    pub fn conductor(&self, chi: &CharacterIndex) -> u64 {
        let n = self.modulus;
        for d in Factorization::new(n).divisors() {
            let trivial = (0..n / d)
                .map(|k| (1 + k * d) % n)
                .all(|a| match self.phase_at_residue(chi, a as usize) {
                    Some(t) => t == 0,
                    None => true,
                });
            if trivial {
                return d;
            }
        }
        n
    }

    /// Conductor from the component exponents, without scanning residues.
    pub fn conductor_structural(&self, chi: &CharacterIndex) -> u64 {
        let mut cond = 1u64;
        let mut i = 0;
        while i < self.components.len() {
            let c = &self.components[i];
            let e = chi.exponents[i];
            match c.kind {
                ComponentKind::Cyclic if c.prime == 2 => {
                    if e != 0 {
                        cond *= 4;
                    }
                }
                ComponentKind::Cyclic => {
                    if e != 0 {
                        let mut v = 0u32;
                        let mut x = e;
                        while x % c.prime == 0 && v < c.exponent - 1 {
                            x /= c.prime;
                            v += 1;
                        }
                        cond *= c.prime.pow(c.exponent - v);
                    }
                }
                ComponentKind::TwoSign => {
                    // Always followed by its TwoFive partner.
                    let five = &self.components[i + 1];
                    let s = e;
                    let t = chi.exponents[i + 1];
                    if t == 0 {
                        if s != 0 {
                            cond *= 4;
                        }
                    } else {
                        let order_t = five.order / gcd(t, five.order);
                        cond *= 4 * order_t;
                    }
                    i += 1;
                }
                ComponentKind::TwoFive => unreachable!("TwoFive always follows TwoSign"),
            }
            i += 1;
        }
        cond
    }

    pub fn is_primitive(&self, chi: &CharacterIndex) -> bool {
        self.conductor_structural(chi) == self.modulus
    }

    /// The primitive character mod the conductor that induces `chi`.
    pub fn inducing_character(&self, chi: &CharacterIndex) -> Result<(CharacterGroup, CharacterIndex)> {
        let n1 = self.conductor_structural(chi);
        let g1 = CharacterGroup::new(n1)?;
        let n = self.modulus;
        let mut exps = Vec::with_capacity(g1.components.len());
        for c in &g1.components {
            // A unit mod N in the residue class of the lift mod N1.
            let mut a = c.lift % n1.max(1);
            while gcd(a, n) != 1 {
                a += n1;
            }
            let t = self
                .phase_at_residue(chi, (a % n) as usize)
                .expect("lifted element is a unit");
            let scaled = t as u128 * c.order as u128;
            if scaled % self.lcm as u128 != 0 {
                return Err(Error::NotInduced(format!(
                    "phase {t}/{} is not of order dividing {}",
                    self.lcm, c.order
                )));
            }
            exps.push((scaled / self.lcm as u128) as u64);
        }
        let chi1 = g1.index(&exps)?;
        Ok((g1, chi1))
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// x ≡ g (mod q), x ≡ 1 (mod m), for coprime q and m.
fn crt_lift(g: u64, q: u64, m: u64) -> u64 {
    if m == 1 {
        return g % q;
    }
    let inv = mod_inverse(m % q, q);
    let k = mul_mod((g + q - 1) % q, inv, q);
    (1 + m * k) % (q * m)
}

/// Least primitive root modulo an odd prime.
pub fn primitive_root_mod_prime(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs: Vec<u64> = Factorization::new(p - 1)
        .factors
        .iter()
        .map(|&(q, _)| q)
        .collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}
