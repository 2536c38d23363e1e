use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::decode_tuple;
use crate::oracles::Budget;
use crate::rational::{self, Rational};

/// A 0/1 function on a product space `Ω^R` with explicit atom
/// probabilities. Points are ranked lexicographically over atom indices,
/// coordinate 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    r: usize,
    probs: Vec<Rational>,
    values: Vec<bool>,
}

/// On-disk format: `{"R": int, "atoms": ["p/q", ...], "bitstring": "0110..."}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionJson {
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(with = "rational::serde_vec")]
    pub atoms: Vec<Rational>,
    pub bitstring: String,
}

impl FunctionTable {
    pub fn new(r: usize, probs: Vec<Rational>, values: Vec<bool>) -> Result<Self> {
        if probs.is_empty()
            || probs.iter().any(|p| !p.is_positive())
            || probs.iter().sum::<Rational>() != Rational::one()
        {
            return Err(Error::invalid("atom probabilities must be positive and sum to 1"));
        }
        let size = (probs.len() as u128).checked_pow(r as u32);
        if size != Some(values.len() as u128) {
            return Err(Error::invalid(format!(
                "table has {} entries, expected {}^{}",
                values.len(),
                probs.len(),
                r
            )));
        }
        Ok(FunctionTable { r, probs, values })
    }

    pub fn from_fn(r: usize, probs: Vec<Rational>, budget: Budget, f: impl Fn(&[usize]) -> bool) -> Result<Self> {
        let q = probs.len();
        let size = (q as u128).saturating_pow(r as u32);
        budget.check(size)?;
        let values = (0..size as usize).map(|i| f(&decode_tuple(i, q, r))).collect();
        Self::new(r, probs, values)
    }

    /// `f(x) = x_j` on uniform `{0, 1}^R`.
    pub fn dictator(r: usize, j: usize) -> Self {
        let half = rational::ratio(1, 2);
        Self::from_fn(r, vec![half.clone(), half], Budget::default(), |x| x[j] == 1).expect("valid dictator")
    }

    pub fn constant(r: usize, probs: Vec<Rational>, value: bool) -> Result<Self> {
        let size = probs.len().pow(r as u32);
        Self::new(r, probs, vec![value; size])
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn atoms(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn value(&self, x: &[usize]) -> bool {
        self.values[x.iter().fold(0, |acc, &a| acc * self.atoms() + a)]
    }

    pub fn point_probability(&self, idx: usize) -> Rational {
        decode_tuple(idx, self.atoms(), self.r)
            .iter()
            .map(|&a| &self.probs[a])
            .product()
    }

    /// `E[f]`, which equals `E[f²]` for a 0/1 function.
    pub fn mean(&self) -> Rational {
        (0..self.values.len())
            .filter(|&i| self.values[i])
            .map(|i| self.point_probability(i))
            .sum()
    }

    pub fn to_json(&self) -> FunctionJson {
        FunctionJson {
            r: self.r,
            atoms: self.probs.clone(),
            bitstring: self.values.iter().map(|&b| if b { '1' } else { '0' }).collect(),
        }
    }

    pub fn from_json(json: &FunctionJson) -> Result<Self> {
        let values = json
            .bitstring
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("bad bit {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.r, json.atoms.clone(), values)
    }
}

/// Orthogonal (not normalized) single-coordinate basis: `φ_0 = 1`, then
/// Gram–Schmidt on the indicators of atoms `0, …, q − 2`.
/// Returns `(φ_s(a), ‖φ_s‖²)` for `s ∈ 0..q`.
pub fn coordinate_basis(probs: &[Rational]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let q = probs.len();
    let inner = |u: &[Rational], v: &[Rational]| -> Rational { (0..q).map(|a| &probs[a] * &u[a] * &v[a]).sum() };
    let mut basis: Vec<Vec<Rational>> = vec![vec![Rational::one(); q]];
    let mut norms = vec![Rational::one()];
    for atom in 0..q.saturating_sub(1) {
        let mut v: Vec<Rational> = (0..q)
            .map(|a| if a == atom { Rational::one() } else { Rational::zero() })
            .collect();
        for (b, nb) in basis.iter().zip(&norms) {
            let c = inner(&v, b) / nb;
            for a in 0..q {
                v[a] -= &c * &b[a];
            }
        }
        norms.push(inner(&v, &v));
        basis.push(v);
    }
    (basis, norms)
}

/// Coefficients in the product basis `φ_σ = ∏ φ_{σ_i}`, indexed by
/// `σ ∈ [q]^R` with `σ_i = 0` the constant factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierExpansion {
    r: usize,
    q: usize,
    /// `⟨f, φ_σ⟩`.
    inner: Vec<Rational>,
    /// `‖φ_σ‖²`.
    norms: Vec<Rational>,
}

pub fn fourier_expand(f: &FunctionTable, budget: Budget) -> Result<FourierExpansion> {
    let (r, q) = (f.r, f.atoms());
    let size = f.values.len();
    budget.check(
        (size as u128)
            .saturating_mul(q as u128)
            .saturating_mul(r.max(1) as u128),
    )?;
    let (basis, coord_norms) = coordinate_basis(&f.probs);
    // Weighted values, then one basis change per coordinate.
    let mut cur: Vec<Rational> = (0..size)
        .map(|i| {
            if f.values[i] {
                f.point_probability(i)
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mut stride = 1;
    for _ in 0..r {
        let mut next = vec![Rational::zero(); size];
        for base in 0..size {
            if (base / stride) % q != 0 {
                continue;
            }
            for s in 0..q {
                let mut acc = Rational::zero();
                for a in 0..q {
                    let v = &cur[base + a * stride];
                    if !v.is_zero() && !basis[s][a].is_zero() {
                        acc += v * &basis[s][a];
                    }
                }
                next[base + s * stride] = acc;
            }
        }
        cur = next;
        stride *= q;
    }
    let norms = (0..size)
        .map(|i| decode_tuple(i, q, r).iter().map(|&s| &coord_norms[s]).product())
        .collect();
    Ok(FourierExpansion {
        r,
        q,
        inner: cur,
        norms,
    })
}

impl FourierExpansion {
    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn sigma(&self, idx: usize) -> Vec<usize> {
        decode_tuple(idx, self.q, self.r)
    }

    /// `#σ`: the number of non-constant factors.
    pub fn degree(&self, idx: usize) -> usize {
        self.sigma(idx).iter().filter(|&&s| s != 0).count()
    }

    /// `f̂(σ)²` in the orthonormal basis.
    pub fn coefficient_sq(&self, idx: usize) -> Rational {
        let c = &self.inner[idx];
        c * c / &self.norms[idx]
    }

    /// `f̂` at the all-constant index, which is `E[f]`.
    pub fn constant(&self) -> &Rational {
        &self.inner[0]
    }

    /// `Σ_σ f̂(σ)²`.
    pub fn total_mass(&self) -> Rational {
        (0..self.len()).map(|i| self.coefficient_sq(i)).sum()
    }

    /// `Infl_j^d = Σ_{σ_j ≠ 0, #σ ≤ d} f̂(σ)²`, with `j` zero-based.
    pub fn influence(&self, j: usize, d: usize) -> Rational {
        (0..self.len())
            .filter(|&i| {
                let s = self.sigma(i);
                s[j] != 0 && s.iter().filter(|&&v| v != 0).count() <= d
            })
            .map(|i| self.coefficient_sq(i))
            .sum()
    }

    pub fn influences(&self, d: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.r];
        for i in 0..self.len() {
            let s = self.sigma(i);
            let deg = s.iter().filter(|&&v| v != 0).count();
            if deg == 0 || deg > d {
                continue;
            }
            let c = self.coefficient_sq(i);
            for (j, &sj) in s.iter().enumerate() {
                if sj != 0 {
                    out[j] += &c;
                }
            }
        }
        out
    }
}

pub fn influence_deg(f: &FunctionTable, j: usize, d: usize, budget: Budget) -> Result<Rational> {
    if j >= f.r {
        return Err(Error::invalid(format!("coordinate {j} outside 0..{}", f.r)));
    }
    Ok(fourier_expand(f, budget)?.influence(j, d))
}

/// `{j | Infl_j^d(f) ≥ κ}`, zero-based.
pub fn candidate_set(f: &FunctionTable, kappa: &Rational, d: usize, budget: Budget) -> Result<Vec<usize>> {
    if !kappa.is_positive() {
        return Err(Error::invalid("kappa must be positive"));
    }
    let infl = fourier_expand(f, budget)?.influences(d);
    Ok((0..f.r).filter(|&j| infl[j] >= *kappa).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn uniform2() -> Vec<Rational> {
        vec![ratio(1, 2), ratio(1, 2)]
    }

    #[test]
    fn constant_function() {
        let f = FunctionTable::constant(3, uniform2(), true).unwrap();
        let e = fourier_expand(&f, Budget::default()).unwrap();
        assert_eq!(e.constant(), &int(1));
        assert!((1..e.len()).all(|i| e.coefficient_sq(i).is_zero()));
        assert!(e.influences(3).iter().all(|v| v.is_zero()));
        assert!(candidate_set(&f, &ratio(1, 8), 1, Budget::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn dictator_expansion() {
        let f = FunctionTable::dictator(2, 0);
        let e = fourier_expand(&f, Budget::default()).unwrap();
        assert_eq!(e.constant(), &ratio(1, 2));
        let nonzero: Vec<usize> = (1..e.len()).filter(|&i| !e.coefficient_sq(i).is_zero()).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(e.coefficient_sq(nonzero[0]), ratio(1, 4));
        assert_eq!(influence_deg(&f, 0, 1, Budget::default()).unwrap(), ratio(1, 4));
        assert_eq!(influence_deg(&f, 1, 1, Budget::default()).unwrap(), int(0));
        assert_eq!(candidate_set(&f, &ratio(1, 8), 1, Budget::default()).unwrap(), vec![0]);
    }

    #[test]
    fn three_atom_basis_is_orthogonal() {
        let probs = vec![ratio(1, 6), ratio(1, 6), ratio(2, 3)];
        let (basis, norms) = coordinate_basis(&probs);
        for s in 0..3 {
            for t in 0..3 {
                let ip: Rational = (0..3).map(|a| &probs[a] * &basis[s][a] * &basis[t][a]).sum();
                assert_eq!(ip, if s == t { norms[s].clone() } else { int(0) });
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = FunctionTable::dictator(3, 2);
        assert_eq!(FunctionTable::from_json(&f.to_json()).unwrap(), f);
    }
}
