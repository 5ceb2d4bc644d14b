use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::gauss::GaussKernel;
use super::group::{CharacterGroup, CharacterIndex};
use crate::arith::{divisors, euler_phi, is_prime_u64, mobius};
use crate::error::{Error, Result};
use crate::numerics::{unit_root, ComplexNeumaier};

/// Even (+) or odd (−) characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Parity::Even => "+",
            Parity::Odd => "-",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "even" | "plus" => Ok(Parity::Even),
            "-" | "odd" | "minus" => Ok(Parity::Odd),
            _ => Err(Error::InvalidArgument(format!("unknown parity {s:?}"))),
        }
    }
}

/// Which characters a family sum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilySelector {
    /// Primitive, non-principal, even.
    DPlus,
    /// Primitive, odd.
    DMinus,
    /// Imprimitive, non-principal, even.
    IPlus,
    /// Imprimitive, odd.
    IMinus,
    /// Primitive quadratic, even.
    QPlus,
    /// Primitive quadratic, odd.
    QMinus,
}

impl FamilySelector {
    pub fn primitive(parity: Parity) -> Self {
        match parity {
            Parity::Even => FamilySelector::DPlus,
            Parity::Odd => FamilySelector::DMinus,
        }
    }

    pub fn imprimitive(parity: Parity) -> Self {
        match parity {
            Parity::Even => FamilySelector::IPlus,
            Parity::Odd => FamilySelector::IMinus,
        }
    }

    pub fn quadratic(parity: Parity) -> Self {
        match parity {
            Parity::Even => FamilySelector::QPlus,
            Parity::Odd => FamilySelector::QMinus,
        }
    }

    pub fn parity(self) -> Parity {
        match self {
            FamilySelector::DPlus | FamilySelector::IPlus | FamilySelector::QPlus => Parity::Even,
            _ => Parity::Odd,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilySelector::DPlus => "D+",
            FamilySelector::DMinus => "D-",
            FamilySelector::IPlus => "I+",
            FamilySelector::IMinus => "I-",
            FamilySelector::QPlus => "Q+",
            FamilySelector::QMinus => "Q-",
        }
    }

    /// Membership test for one character of `g`.
    pub fn contains(self, g: &CharacterGroup, chi: &CharacterIndex) -> bool {
        if chi.is_principal() || g.parity(chi) != self.parity().sign() {
            return false;
        }
        let primitive = g.is_primitive(chi);
        match self {
            FamilySelector::DPlus | FamilySelector::DMinus => primitive,
            FamilySelector::IPlus | FamilySelector::IMinus => !primitive,
            FamilySelector::QPlus | FamilySelector::QMinus => {
                primitive && g.character_order(chi) == 2
            }
        }
    }
}

/// Members of the family inside the dual group mod N, in mixed-radix order.
pub fn enumerate_family(g: &CharacterGroup, f: FamilySelector) -> Vec<CharacterIndex> {
    g.characters().filter(|chi| f.contains(g, chi)).collect()
}

/// Number of primitive characters mod N, Σ_{d|N} μ(N/d) φ(d).
pub fn count_primitive(n: u64) -> u64 {
    let total: i64 = divisors(n)
        .into_iter()
        .map(|d| mobius((n / d) as i64).expect("nonzero") as i64 * euler_phi(d) as i64)
        .sum();
    total as u64
}

/// Σ_{χ ∈ family} χ(p)/τ(χ) by enumeration and direct Gauss sums.
///
/// Imprimitive families are rejected because their Gauss sums can vanish.
pub fn normalized_character_sum(n: u64, p: u64, f: FamilySelector) -> Result<Complex64> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if matches!(f, FamilySelector::IPlus | FamilySelector::IMinus) {
        return Err(Error::VanishingGaussSum(f.name()));
    }
    let g = CharacterGroup::new(n)?;
    let kernel = GaussKernel::new(&g);
    let r = (p % n) as usize;
    let mut acc = ComplexNeumaier::new();
    for chi in enumerate_family(&g, f) {
        let tau = super::gauss::gauss_sum(&g, &chi);
        if let Some(t) = g.phase_at_residue(&chi, r) {
            acc.add(kernel.phase(t) / tau);
        }
    }
    Ok(acc.value())
}

/// Closed form of Σ_{χ ∈ D±(N)} χ(p)/τ(χ) for prime N ≠ p.
pub fn closed_form_primitive_sum(n: u64, p: u64, parity: Parity) -> Result<Complex64> {
    if !is_prime_u64(n) {
        return Err(Error::NotPrime(n));
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if n == p {
        return Err(Error::InvalidArgument(format!(
            "closed form needs p != N, got p = N = {n}"
        )));
    }
    let z = unit_root(p % n, n);
    let nf = n as f64;
    let w = (nf - 1.0) / nf;
    Ok(match parity {
        Parity::Even => Complex64::new(w * z.re + 1.0 / nf, 0.0),
        Parity::Odd => Complex64::new(0.0, -w * z.im),
    })
}
