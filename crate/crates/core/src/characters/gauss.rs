use num_complex::Complex64;

use super::group::{gcd, CharacterGroup, CharacterIndex};
use crate::arith::{is_prime_u64, kronecker_symbol, mobius};
use crate::error::{Error, Result};
use crate::numerics::{unit_root, ComplexNeumaier};

/// τ(χ) = Σ_{b=1}^{N} χ(b) e(b/N), summed directly.
///
/// Each term is evaluated from the exact rational angle t_b/L + b/N, so no
/// rounding accumulates through products of roots of unity.
pub fn gauss_sum(g: &CharacterGroup, chi: &CharacterIndex) -> Complex64 {
    let n = g.modulus();
    let l = g.phase_denominator();
    let den = l * n;
    let mut acc = ComplexNeumaier::new();
    for b in 1..=n {
        let r = (b % n) as usize;
        if let Some(t) = g.phase_at_residue(chi, r) {
            acc.add(unit_root((t * n + b * l) % den, den));
        }
    }
    acc.value()
}

/// Root-of-unity tables for repeated Gauss sums over one group.
///
/// Terms are products of two table entries, which costs one rounding per term
/// relative to [`gauss_sum`] and is much faster when every character is needed.
#[derive(Debug, Clone)]
pub struct GaussKernel {
    additive: Vec<Complex64>,
    phases: Vec<Complex64>,
}

impl GaussKernel {
    pub fn new(g: &CharacterGroup) -> Self {
        let n = g.modulus();
        let l = g.phase_denominator();
        Self {
            additive: (0..n).map(|b| unit_root(b, n)).collect(),
            phases: (0..l).map(|t| unit_root(t, l)).collect(),
        }
    }

    /// e(t / phase_denominator).
    #[inline]
    pub fn phase(&self, t: u64) -> Complex64 {
        self.phases[t as usize]
    }

    pub fn gauss_sum(&self, g: &CharacterGroup, chi: &CharacterIndex) -> Complex64 {
        self.gauss_sum_from_walk(g, &g.phase_walk(chi))
    }

    /// τ(χ) from a precomputed [`CharacterGroup::phase_walk`].
    pub fn gauss_sum_from_walk(&self, g: &CharacterGroup, walk: &[u32]) -> Complex64 {
        let mut acc = ComplexNeumaier::new();
        for (&r, &t) in g.units_by_position().iter().zip(walk) {
            acc.add(self.phases[t as usize] * self.additive[r as usize]);
        }
        acc.value()
    }

    /// All values χ(r), r = 0..N, as a dense table.
    pub fn value_table(&self, g: &CharacterGroup, chi: &CharacterIndex) -> Vec<Complex64> {
        (0..g.modulus() as usize)
            .map(|r| match g.phase_at_residue(chi, r) {
                Some(t) => self.phases[t as usize],
                None => Complex64::new(0.0, 0.0),
            })
            .collect()
    }
}

/// τ(χ̄) for χ induced by the primitive χ₁ mod N₁, from
/// τ(χ̄) = μ(N/N₁)·conj(χ₁(N/N₁))·τ(χ̄₁).
pub fn imprimitive_gauss_sum(
    g: &CharacterGroup,
    chi: &CharacterIndex,
    inducing: &CharacterGroup,
    chi1: &CharacterIndex,
) -> Result<Complex64> {
    let n = g.modulus();
    let n1 = inducing.modulus();
    if n % n1 != 0 {
        return Err(Error::NotInduced(format!("{n1} does not divide {n}")));
    }
    if !inducing.is_primitive(chi1) {
        return Err(Error::NotInduced(format!(
            "inducing character mod {n1} is not primitive"
        )));
    }
    // The generator lifts generate (ℤ/N)*, so agreement there is agreement
    // everywhere on units.
    for lift in g.generators() {
        let lhs = g.phase(chi, lift as i64).expect("lift is a unit");
        let rhs = inducing
            .phase(chi1, lift as i64)
            .expect("unit mod N is a unit mod N1");
        let lhs_scaled = lhs as u128 * inducing.phase_denominator() as u128;
        let rhs_scaled = rhs as u128 * g.phase_denominator() as u128;
        if lhs_scaled != rhs_scaled {
            return Err(Error::NotInduced(format!(
                "values differ at the unit {lift} mod {n}"
            )));
        }
    }
    let m = n / n1;
    let mu = mobius(m as i64)? as f64;
    if mu == 0.0 || gcd(m, n1) != 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let chi1_m = inducing.evaluate(chi1, m as i64).conj();
    let tau1 = gauss_sum(inducing, &inducing.conjugate(chi1));
    Ok(mu * chi1_m * tau1)
}

/// τ_k(p) by direct summation together with G_k(p) derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistedGaussSum {
    /// τ_k(p) = Σ_{b mod p} (b/p) e(bk/p).
    pub tau: Complex64,
    /// G_k(p) = ((1−i)/2 + (−1/p)(1+i)/2)·τ_k(p).
    pub g: Complex64,
}

pub fn twisted_quadratic_gauss_sum(k: i64, p: i64) -> Result<TwistedGaussSum> {
    if p < 3 || p % 2 == 0 || !is_prime_u64(p as u64) {
        return Err(Error::NotOddPrime(p));
    }
    let pu = p as u64;
    let kr = k.rem_euclid(p) as u64;
    let mut acc = ComplexNeumaier::new();
    for b in 1..pu {
        let s = kronecker_symbol(b as i64, p)? as f64;
        acc.add(s * unit_root(b * kr % pu, pu));
    }
    let tau = acc.value();
    let eps = kronecker_symbol(-1, p)? as f64;
    let half = Complex64::new(0.5, 0.0);
    let i_half = Complex64::new(0.0, 0.5);
    let prefactor = (half - i_half) + eps * (half + i_half);
    Ok(TwistedGaussSum {
        tau,
        g: prefactor * tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gauss_sums() {
        let g5 = CharacterGroup::new(5).unwrap();
        let quad = g5.index(&[2]).unwrap();
        let t = gauss_sum(&g5, &quad);
        assert!((t - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let g3 = CharacterGroup::new(3).unwrap();
        let t = gauss_sum(&g3, &g3.index(&[1]).unwrap());
        assert!((t - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        let t = gauss_sum(&g5, &g5.index(&[1]).unwrap());
        assert!((t.norm() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kernel_matches_exact_sum() {
        for n in [7u64, 12, 45, 64, 99] {
            let g = CharacterGroup::new(n).unwrap();
            let k = GaussKernel::new(&g);
            for chi in g.characters() {
                assert!((k.gauss_sum(&g, &chi) - gauss_sum(&g, &chi)).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn principal_gauss_sum_is_mobius() {
        for n in 1..=60u64 {
            let g = CharacterGroup::new(n).unwrap();
            let t = gauss_sum(&g, &g.principal());
            let mu = mobius(n as i64).unwrap() as f64;
            assert!((t - Complex64::new(mu, 0.0)).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn imprimitive_examples() {
        let g9 = CharacterGroup::new(9).unwrap();
        let chi = g9.index(&[3]).unwrap();
        let (g3, chi1) = g9.inducing_character(&chi).unwrap();
        assert_eq!(g3.modulus(), 3);
        let v = imprimitive_gauss_sum(&g9, &chi, &g3, &chi1).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        assert!((v - gauss_sum(&g9, &g9.conjugate(&chi))).norm() < 1e-12);

        let g15 = CharacterGroup::new(15).unwrap();
        let chi1 = g3.index(&[1]).unwrap();
        let chi = g15
            .characters()
            .find(|c| {
                g15.conductor(c) == 3 && !c.is_principal()
            })
            .unwrap();
        let v = imprimitive_gauss_sum(&g15, &chi, &g3, &chi1).unwrap();
        // μ(5)·χ₁(5)·i√3 with χ₁(5) = χ₁(2) = −1.
        assert!((v - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        assert!((v - gauss_sum(&g15, &g15.conjugate(&chi))).norm() < 1e-12);

        let g7 = CharacterGroup::new(7).unwrap();
        let chi = g7.index(&[1]).unwrap();
        let v = imprimitive_gauss_sum(&g7, &chi, &g7, &chi).unwrap();
        assert!((v - gauss_sum(&g7, &g7.conjugate(&chi))).norm() < 1e-12);
    }

    #[test]
    fn imprimitive_rejects_bad_inducing_data() {
        let g15 = CharacterGroup::new(15).unwrap();
        let g4 = CharacterGroup::new(4).unwrap();
        let chi = g15.principal();
        assert!(imprimitive_gauss_sum(&g15, &chi, &g4, &g4.index(&[1]).unwrap()).is_err());
        let g3 = CharacterGroup::new(3).unwrap();
        // The principal character mod 15 is not induced by the quadratic one mod 3.
        assert!(imprimitive_gauss_sum(&g15, &chi, &g3, &g3.index(&[1]).unwrap()).is_err());
        // Non-primitive inducing character.
        assert!(imprimitive_gauss_sum(&g15, &chi, &g3, &g3.principal()).is_err());
    }

    #[test]
    fn twisted_examples() {
        let r = twisted_quadratic_gauss_sum(0, 7).unwrap();
        assert!(r.tau.norm() < 1e-12 && r.g.norm() < 1e-12);
        let r = twisted_quadratic_gauss_sum(1, 5).unwrap();
        assert!((r.tau - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let r = twisted_quadratic_gauss_sum(2, 5).unwrap();
        assert!((r.g - Complex64::new(-5f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(twisted_quadratic_gauss_sum(1, 9).is_err());
        assert!(twisted_quadratic_gauss_sum(1, 2).is_err());
    }
}
