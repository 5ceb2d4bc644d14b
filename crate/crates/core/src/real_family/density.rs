use std::f64::consts::PI;

use num_rational::Ratio;

use super::transform::{hat_at_zero, HatTable, TildeTable};
use super::weight::WeightFunction;
use super::{TruncationPolicy, Variant};
use crate::arith::{Factorization, MultiplicativeTable};
use crate::error::{Error, Result};
use crate::numerics::{block_sum, Neumaier};

/// Consecutive squarefree a with a negligible inner-sum deviation required
/// before the outer sum stops early.
const STOP_RUN: usize = 8;

/// b_n = Σ_{a|n, a odd} μ(a)/a = Π_{odd p|n} (1 − 1/p), with b_n = 0 for even n
/// in the 8d family.
pub fn b_coefficient(n: u64, variant: Variant) -> Result<Ratio<i64>> {
    if n == 0 {
        return Err(Error::ZeroArgument("b_coefficient"));
    }
    if variant == Variant::EightD && n % 2 == 0 {
        return Ok(Ratio::from_integer(0));
    }
    let mut r = Ratio::from_integer(1i64);
    for (p, _) in Factorization::new(n).factors {
        if p != 2 {
            r *= Ratio::new(p as i64 - 1, p as i64);
        }
    }
    Ok(r)
}

/// b_1..=b_n as floats, index 0 unused.
pub fn b_table(n: usize, variant: Variant) -> Vec<f64> {
    let mut b = vec![1.0; n + 1];
    b[0] = 0.0;
    let mut composite = vec![false; n + 1];
    for p in (3..=n).step_by(2) {
        if composite[p] {
            continue;
        }
        let f = 1.0 - 1.0 / p as f64;
        for m in (p..=n).step_by(p) {
            composite[m] = true;
            b[m] *= f;
        }
    }
    if variant == Variant::EightD {
        for v in b.iter_mut().skip(2).step_by(2) {
            *v = 0.0;
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimalDensity {
    pub value: f64,
    pub error_estimate: f64,
    /// Largest a included explicitly.
    pub a_stop: u64,
    /// Whether the outer sum stopped because the inner sums reached their
    /// large-a form, rather than at `a_max`.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualDensity {
    pub value: f64,
    pub terms: u64,
    /// The n-sum was cut at `n_max` before Ĥ became negligible.
    pub truncated: bool,
}

/// Precomputed transforms of one weight, shared by every density evaluation.
#[derive(Debug, Clone)]
pub struct AnalyticDensity {
    tilde: TildeTable,
    hat: Option<HatTable>,
    hat_zero: f64,
    policy: TruncationPolicy,
}

impl AnalyticDensity {
    pub fn new(w: &WeightFunction, policy: &TruncationPolicy) -> Result<Self> {
        let tilde = TildeTable::new(w, policy)?;
        let hat = if w.is_smooth() {
            Some(HatTable::new(&tilde, policy)?)
        } else {
            None
        };
        Ok(Self {
            tilde,
            hat,
            hat_zero: hat_at_zero(w),
            policy: policy.clone(),
        })
    }

    pub fn tilde(&self) -> &TildeTable {
        &self.tilde
    }

    pub fn hat(&self) -> Option<&HatTable> {
        self.hat.as_ref()
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// Replaces the a_max and n_max caps; the tables do not depend on them.
    pub fn with_caps(mut self, a_max: u64, n_max: u64) -> Self {
        self.policy.a_max = a_max.max(1);
        self.policy.n_max = n_max.max(1);
        self
    }

    /// −(2/π²)Φ̃(0), the y → ∞ limit.
    pub fn large_y_limit(&self) -> f64 {
        -2.0 / (PI * PI) * self.tilde.at_zero()
    }

    /// (1/2) Σ_{a odd} μ(a)/a² Σ_{m≥1} s_m Φ̃(m²/(a²κy)) with s_m = (−1)^m,
    /// κ = 2 for the 8d family and s_m = 1, κ = 1 for the dagger family.
    ///
    /// The outer sum stops once the inner sums match their large-a form
    /// (−Φ̃(0)/2, resp. (a√y Ĥ(0) − Φ̃(0))/2) for several consecutive a, and
    /// the remaining a are added in that form using Σ_{a odd} μ(a)/a² = 8/π²
    /// and Σ_{a odd} μ(a)/a = 0.
    pub fn primal(&self, y: f64, variant: Variant) -> Result<PrimalDensity> {
        check_y(y)?;
        let a_max = self.policy.a_max as usize;
        let mu = MultiplicativeTable::new(a_max.max(1));
        let kappa = match variant {
            Variant::EightD => 2.0,
            Variant::Dagger => 1.0,
        };
        let phi0 = self.tilde.at_zero();
        let sy = y.sqrt();
        let xi_cut = self.tilde.cutoff();
        let sharp = self.tilde.is_exact();

        let mut acc = Neumaier::new();
        let mut mu2 = Neumaier::new();
        let mut mu1 = Neumaier::new();
        let mut run = 0usize;
        let mut window_dev = 0.0f64;
        let mut trunc_err = 0.0f64;
        let mut a_stop = 1u64;
        let mut converged = false;
        for a in (1..=a_max).step_by(2) {
            let m = mu.mu(a);
            a_stop = a as u64;
            if m == 0 {
                continue;
            }
            let af = a as f64;
            let muf = m as f64;
            mu2.add(muf / (af * af));
            mu1.add(muf / af);
            let scale = af * af * kappa * y;
            let m_max = (scale * xi_cut).sqrt().floor() as usize;
            let inner = block_sum(m_max, |i| {
                let mm = (i + 1) as f64;
                let v = self.tilde.eval(mm * mm / scale);
                match variant {
                    Variant::EightD if i % 2 == 0 => -v,
                    _ => v,
                }
            });
            trunc_err += (muf / (af * af)).abs()
                * if sharp {
                    // Φ̃ ≪ 1/(πξ) past the cap; alternating tails are bounded
                    // by their first term, the others by the tail integral.
                    match variant {
                        Variant::EightD => 1.0 / (PI * xi_cut),
                        Variant::Dagger => (scale / xi_cut).sqrt() / PI,
                    }
                } else {
                    self.policy.m_cutoff_tol * (m_max as f64 + 1.0)
                };
            acc.add(muf / (af * af) * inner);
            let asym = match variant {
                Variant::EightD => -0.5 * phi0,
                Variant::Dagger => 0.5 * (af * sy * self.hat_zero - phi0),
            };
            let dev = (inner - asym).abs();
            let stop_tol = self.policy.quad_tol * (1.0 + (m_max as f64).sqrt());
            if dev <= stop_tol {
                run += 1;
                window_dev = window_dev.max(dev);
            } else {
                run = 0;
                window_dev = dev;
            }
            if run >= STOP_RUN {
                converged = true;
                break;
            }
        }
        let tail2 = 8.0 / (PI * PI) - mu2.value();
        let tail1 = -mu1.value();
        let mut total = acc.value() + tail2 * (-0.5 * phi0);
        if variant == Variant::Dagger {
            total += tail1 * 0.5 * sy * self.hat_zero;
        }
        let value = 0.5 * total;
        let error_estimate = 0.5 * (window_dev / a_stop as f64 + trunc_err);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: format!("primal density at y = {y}"),
            });
        }
        Ok(PrimalDensity {
            value,
            error_estimate,
            a_stop,
            converged,
        })
    }

    /// −(2/π²)Φ̃(0) + h Σ_{n odd} b_n Ĥ(nh), h = √(y/2), for the 8d family and
    /// −(2/π²)Φ̃(0) + (√y/2) Σ_{n≥1} b†_n Ĥ(n√y) for the dagger family.
    pub fn dual(&self, y: f64, variant: Variant) -> Result<DualDensity> {
        check_y(y)?;
        let hat = self.hat.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "the dual density needs a smooth weight, got {}",
                self.tilde.weight()
            ))
        })?;
        let (h, pref) = match variant {
            Variant::EightD => ((0.5 * y).sqrt(), (0.5 * y).sqrt()),
            Variant::Dagger => (y.sqrt(), 0.5 * y.sqrt()),
        };
        let n_stop = (hat.cutoff() / h).ceil();
        let truncated = n_stop > self.policy.n_max as f64;
        let terms = if truncated {
            self.policy.n_max
        } else {
            n_stop as u64
        };
        let b = b_table(terms as usize, variant);
        let s = block_sum(terms as usize, |i| {
            let n = i + 1;
            if b[n] == 0.0 {
                0.0
            } else {
                b[n] * hat.eval(n as f64 * h)
            }
        });
        let value = self.large_y_limit() + pref * s;
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: format!("dual density at y = {y}"),
            });
        }
        Ok(DualDensity {
            value,
            terms,
            truncated,
        })
    }
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "density needs finite y > 0, got {y}"
        )));
    }
    Ok(())
}

pub fn analytic_density_primal(
    y: f64,
    w: &WeightFunction,
    variant: Variant,
    policy: &TruncationPolicy,
) -> Result<PrimalDensity> {
    AnalyticDensity::new(w, policy)?.primal(y, variant)
}

pub fn analytic_density_dual(
    y: f64,
    w: &WeightFunction,
    variant: Variant,
    policy: &TruncationPolicy,
) -> Result<DualDensity> {
    AnalyticDensity::new(w, policy)?.dual(y, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn bump12() -> &'static AnalyticDensity {
        static D: OnceLock<AnalyticDensity> = OnceLock::new();
        D.get_or_init(|| {
            AnalyticDensity::new(
                &WeightFunction::bump(1.0, 2.0).unwrap(),
                &TruncationPolicy::default(),
            )
            .unwrap()
        })
    }

    #[test]
    fn b_examples() {
        let r = |a, b| Ratio::new(a, b);
        assert_eq!(b_coefficient(1, Variant::EightD).unwrap(), r(1, 1));
        assert_eq!(b_coefficient(2, Variant::EightD).unwrap(), r(0, 1));
        assert_eq!(b_coefficient(2, Variant::Dagger).unwrap(), r(1, 1));
        assert_eq!(b_coefficient(3, Variant::EightD).unwrap(), r(2, 3));
        assert_eq!(b_coefficient(15, Variant::EightD).unwrap(), r(8, 15));
        assert_eq!(b_coefficient(64, Variant::Dagger).unwrap(), r(1, 1));
        assert_eq!(b_coefficient(12, Variant::Dagger).unwrap(), r(2, 3));
        assert!(b_coefficient(0, Variant::Dagger).is_err());
    }

    #[test]
    fn b_table_matches_exact() {
        for variant in [Variant::EightD, Variant::Dagger] {
            let t = b_table(500, variant);
            for n in 1..=500u64 {
                let e = b_coefficient(n, variant).unwrap();
                let want = *e.numer() as f64 / *e.denom() as f64;
                assert!((t[n as usize] - want).abs() < 1e-14, "n={n}");
            }
        }
    }

    #[test]
    fn b_divisor_sum_definition() {
        for n in 1..=300u64 {
            let mut s = Ratio::from_integer(0i64);
            for a in crate::arith::divisors(n).into_iter().filter(|a| a % 2 == 1) {
                let mu = crate::arith::mobius(a as i64).unwrap() as i64;
                s += Ratio::new(mu, a as i64);
            }
            assert_eq!(b_coefficient(n, Variant::Dagger).unwrap(), s);
        }
    }

    #[test]
    fn primal_reference_values() {
        let d = bump12();
        for (y, e8, ed) in [
            (0.25, 0.0212311490707, -0.0036640970636),
            (1.0, 0.0825043715429, -0.0686407958065),
            (2.0, -0.0100793969038, -0.15239562157),
        ] {
            let p8 = d.primal(y, Variant::EightD).unwrap();
            let pd = d.primal(y, Variant::Dagger).unwrap();
            assert!((p8.value - e8).abs() < 1e-9, "y={y}: {}", p8.value);
            assert!((pd.value - ed).abs() < 1e-9, "y={y}: {}", pd.value);
            assert!(p8.converged && pd.converged);
            assert!(p8.error_estimate < 1e-8 && pd.error_estimate < 1e-8);
        }
    }

    #[test]
    fn primal_matches_dual() {
        let d = bump12();
        for y in [0.1, 0.25, 0.5, 1.0, 2.0, 5.0] {
            for v in [Variant::EightD, Variant::Dagger] {
                let p = d.primal(y, v).unwrap().value;
                let q = d.dual(y, v).unwrap();
                assert!(!q.truncated);
                assert!((p - q.value).abs() < 1e-8, "y={y} {v:?}: {p} vs {}", q.value);
            }
        }
    }

    #[test]
    fn endpoint_limits() {
        let d = bump12();
        let lim = d.large_y_limit();
        for v in [Variant::EightD, Variant::Dagger] {
            let q = d.dual(1e4, v).unwrap().value;
            assert!((q - lim).abs() < 1e-6 * lim.abs());
        }
        let p = d.primal(1e4, Variant::EightD).unwrap().value;
        assert!((p - lim).abs() < 1e-3 * lim.abs());
        let policy = TruncationPolicy {
            n_max: 1_000_000,
            ..TruncationPolicy::default()
        };
        let d = AnalyticDensity::new(d.tilde().weight(), &policy).unwrap();
        for v in [Variant::EightD, Variant::Dagger] {
            let vals: Vec<f64> = [1e-2, 1e-4, 1e-6]
                .iter()
                .map(|&y| d.dual(y, v).unwrap().value.abs())
                .collect();
            assert!(vals[0] > vals[1] && vals[1] > vals[2], "{v:?}: {vals:?}");
            assert!(vals[2] <= 0.05 * d.tilde().at_zero());
        }
    }

    #[test]
    fn first_primal_term_uses_half() {
        // At y = 1 the (a, m) = (1, 1) term of the 8d sum is −Φ̃(1/2).
        let d = bump12();
        let t = d.tilde();
        let direct = crate::real_family::tilde_transform(
            t.weight(),
            0.5,
            &TruncationPolicy::default(),
        );
        assert!((t.eval(1.0 / (2.0 * 1.0)) - direct).abs() < 1e-10);
    }

    #[test]
    fn sharp_weights_use_primal_only() {
        let d = AnalyticDensity::new(
            &WeightFunction::indicator(1.0, 2.0).unwrap(),
            &TruncationPolicy {
                a_max: 61,
                ..TruncationPolicy::default()
            },
        )
        .unwrap();
        assert!(d.dual(1.0, Variant::EightD).is_err());
        let p = d.primal(1.0, Variant::EightD).unwrap();
        assert!(p.value.is_finite() && !p.converged);
        assert!(p.error_estimate > 0.0 && p.error_estimate < 0.01);
    }

    #[test]
    fn rejects_bad_y() {
        let d = bump12();
        assert!(d.primal(0.0, Variant::EightD).is_err());
        assert!(d.dual(f64::NAN, Variant::Dagger).is_err());
    }
}
