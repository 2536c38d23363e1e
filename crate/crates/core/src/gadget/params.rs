use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::space::OmegaBeta;
use crate::error::{Error, Result};
use crate::rational::{self, from_usize, int, pow, Rational};
use crate::ug::BlockPermutationGroup;

/// Parameters the gadget construction itself consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetParams {
    pub r: usize,
    pub k: usize,
    pub ell: usize,
    pub eps_t: Rational,
    pub eps_v: Rational,
    pub omega: OmegaBeta,
}

impl GadgetParams {
    pub fn new(r: usize, k: usize, ell: usize, eps_t: Rational, eps_v: Rational, omega: OmegaBeta) -> Result<Self> {
        BlockPermutationGroup::new(r, k)?;
        if ell == 0 {
            return Err(Error::invalid("ell must be positive"));
        }
        for (name, e) in [("eps_T", &eps_t), ("eps_V", &eps_v)] {
            if e.is_negative() || *e > Rational::one() {
                return Err(Error::invalid(format!("{name} outside [0, 1]")));
            }
        }
        Ok(GadgetParams {
            r,
            k,
            ell,
            eps_t,
            eps_v,
            omega,
        })
    }

    pub fn block_len(&self) -> usize {
        self.r / self.k
    }

    pub fn group(&self) -> BlockPermutationGroup {
        BlockPermutationGroup::new(self.r, self.k).expect("validated on construction")
    }

    pub fn beta(&self) -> &Rational {
        self.omega.beta()
    }
}

/// The full parameter list of the hardness reduction.
///
/// `t`, `κ`, `d` come from the subcube-test theorem, which gives no
/// formulas; they are inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    #[serde(with = "rational::serde_str")]
    pub beta: Rational,
    #[serde(with = "rational::serde_str")]
    pub gamma: Rational,
    pub k: usize,
    #[serde(with = "rational::serde_str")]
    pub eps_t: Rational,
    pub t: usize,
    #[serde(with = "rational::serde_str")]
    pub kappa: Rational,
    pub d: usize,
    pub ell: usize,
    #[serde(with = "rational::serde_str")]
    pub eps_v: Rational,
    #[serde(with = "rational::serde_str")]
    pub eta: Rational,
    #[serde(with = "rational::serde_str")]
    pub m: Rational,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub r: usize,
    #[serde(with = "rational::serde_str")]
    pub zeta: Rational,
}

pub const DEFAULT_T: usize = 2;
pub const DEFAULT_D: usize = 3;

pub fn default_kappa() -> Rational {
    rational::ratio(1, 16)
}

/// Smallest `L ≥ 0` with `2^L ≥ x^e`, for `x ≥ 1`.
pub fn ceil_log2_pow(x: &Rational, e: u32) -> u64 {
    let num = x.numer().pow(e);
    let den = x.denom().pow(e);
    if num <= den {
        return 0;
    }
    // 2^L · den ≥ num; start just below the bit-length difference.
    let guess = (num.bits() as i64 - den.bits() as i64 - 1).max(0) as u64;
    let mut l = guess;
    while (&den << l as usize) < num {
        l += 1;
    }
    l
}

/// `ζ = γκ² / (4d²ℓ²)`.
pub fn zeta(gamma: &Rational, kappa: &Rational, d: usize, ell: usize) -> Rational {
    gamma * kappa * kappa / (int(4) * from_usize(d * d) * from_usize(ell * ell))
}

impl ReductionParams {
    /// The parameter recipe with every hidden constant set to 1 and
    /// logarithms in base 2:
    ///
    /// `β = ε/30`, `γ = ε/6`, `k = ⌈log₂(4/ε)⌉`, `ε_T = βε`,
    /// `ℓ = max{100t, ⌈1000 log₂(1/ε)⌉}`, `ε_V = εβ/ℓ`,
    /// `η = min{ζ/(32k), εβ/ℓ}`, `M = max{16k/(βζ), 3β/ε_V}`,
    /// `R = k⌊1/(βδ)⌋`.
    pub fn recipe(eps: Rational, t: usize, kappa: Rational, d: usize, delta: Rational) -> Result<Self> {
        if !(eps.is_positive() && eps < Rational::one()) {
            return Err(Error::invalid("eps must lie in (0, 1)"));
        }
        if !(delta.is_positive() && delta < Rational::one()) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if !kappa.is_positive() || t == 0 || d == 0 {
            return Err(Error::invalid("t, d and kappa must be positive"));
        }
        let beta = &eps / int(30);
        let gamma = &eps / int(6);
        let k = ceil_log2_pow(&(int(4) / &eps), 1).max(1) as usize;
        let eps_t = &beta * &eps;
        let log_term = ceil_log2_pow(&(Rational::one() / &eps), 1000);
        let ell = (100 * t).max(log_term.to_usize().ok_or(Error::Overflow)?);
        let zeta = zeta(&gamma, &kappa, d, ell);
        let eps_v = &eps * &beta / from_usize(ell);
        let eta = rational::min(&(&zeta / from_usize(32 * k)), &eps_v);
        let m = rational::max(&(from_usize(16 * k) / (&beta * &zeta)), &(int(3) * &beta / &eps_v));
        let blocks = (Rational::one() / (&beta * &delta)).floor();
        let r = (blocks.to_integer() * BigInt::from(k))
            .to_usize()
            .ok_or(Error::Overflow)?;
        let p = ReductionParams {
            eps,
            beta,
            gamma,
            k,
            eps_t,
            t,
            kappa,
            d,
            ell,
            eps_v,
            eta,
            m,
            delta,
            r,
            zeta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Structural invariants: `k | R`, `ζ = γκ²/(4d²ℓ²)` and
    /// `δ ∈ [k/(10βR), k/(βR)]`.
    pub fn validate(&self) -> Result<()> {
        BlockPermutationGroup::new(self.r, self.k)?;
        if self.zeta != zeta(&self.gamma, &self.kappa, self.d, self.ell) {
            return Err(Error::invalid("zeta does not equal gamma kappa^2 / (4 d^2 ell^2)"));
        }
        delta_window(&self.delta, &self.beta, self.k, self.r)?;
        Ok(())
    }

    /// Gadget parameters with `Ω = {0, 1, ⊥}_β`.
    pub fn gadget(&self) -> Result<GadgetParams> {
        GadgetParams::new(
            self.r,
            self.k,
            self.ell,
            self.eps_t.clone(),
            self.eps_v.clone(),
            OmegaBeta::new(self.beta.clone())?,
        )
    }

    /// The decoding target `γκ²/(4d²ℓ²)`.
    pub fn decode_target(&self) -> &Rational {
        &self.zeta
    }
}

/// Checks `δ ∈ [k/(10βR), k/(βR)]`.
pub fn delta_window(delta: &Rational, beta: &Rational, k: usize, r: usize) -> Result<()> {
    let hi = from_usize(k) / (beta * from_usize(r));
    let lo = &hi / int(10);
    if *delta < lo || *delta > hi {
        return Err(Error::DeltaOutOfWindow {
            delta: rational::format(delta),
            lo: rational::format(&lo),
            hi: rational::format(&hi),
        });
    }
    Ok(())
}

/// `(R/k)βδ(1 − βδ)^{R/k − 1}`: the chance that a block holds exactly one
/// coordinate with `A_i ∈ S` and `x_i ≠ ⊥`.
pub fn c1_formula(r: usize, k: usize, beta: &Rational, delta: &Rational) -> Rational {
    let m = r / k;
    let q = beta * delta;
    from_usize(m) * &q * pow(&(Rational::one() - &q), m - 1)
}

/// [`c1_formula`] under the window precondition, also requiring the
/// value to lie in `[10⁻⁵, 1/2]`.
pub fn c1_closed_form(r: usize, k: usize, beta: &Rational, delta: &Rational) -> Result<Rational> {
    delta_window(delta, beta, k, r)?;
    let c1 = c1_formula(r, k, beta, delta);
    if c1 < rational::ratio(1, 100_000) || c1 > rational::ratio(1, 2) || c1.is_zero() {
        return Err(Error::PreconditionViolated(format!(
            "c1 = {} outside [1/100000, 1/2]",
            rational::format(&c1)
        )));
    }
    Ok(c1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn ceil_log2_pow_examples() {
        assert_eq!(ceil_log2_pow(&int(8), 1), 3);
        assert_eq!(ceil_log2_pow(&int(9), 1), 4);
        assert_eq!(ceil_log2_pow(&int(1), 5), 0);
        assert_eq!(ceil_log2_pow(&int(2), 1000), 1000);
        assert_eq!(ceil_log2_pow(&int(3), 2), 4);
    }

    #[test]
    fn recipe_satisfies_invariants() {
        let p = ReductionParams::recipe(ratio(1, 10), DEFAULT_T, default_kappa(), DEFAULT_D, ratio(1, 1000)).unwrap();
        assert_eq!(p.beta, ratio(1, 300));
        assert_eq!(p.gamma, ratio(1, 60));
        assert_eq!(p.k, 6);
        // ⌈1000 log₂ 10⌉ = 3322.
        assert_eq!(p.ell, 3322);
        assert_eq!(p.r, 6 * 300_000);
        p.validate().unwrap();
        assert!(p.eta <= p.zeta.clone() / from_usize(32 * p.k));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<ReductionParams>(&json).unwrap(), p);
    }

    #[test]
    fn c1_examples() {
        // R/k = 1: c₁ = βδ.
        assert_eq!(c1_formula(3, 3, &ratio(1, 2), &ratio(1, 3)), ratio(1, 6));
        // βδ = k/R: c₁ = (1 − k/R)^{R/k − 1}.
        let (r, k) = (8, 2);
        let beta = ratio(1, 2);
        let delta = ratio(1, 2);
        assert_eq!(c1_formula(r, k, &beta, &delta), pow(&ratio(3, 4), 3));
        assert_eq!(c1_closed_form(r, k, &beta, &delta).unwrap(), ratio(27, 64));
        assert!(matches!(
            c1_closed_form(r, k, &beta, &ratio(9, 10)),
            Err(Error::DeltaOutOfWindow { .. })
        ));
    }
}
