use num_traits::{One, Signed, Zero};

use super::table::FunctionTable;
use crate::error::{Error, Result};
use crate::oracles::Budget;
use crate::rational::Rational;

/// `f ≡ 1 on C_D(x)` for every `x`, with `D` given as a coordinate mask:
/// the table AND-reduced along every coordinate in `D`.
fn all_ones_on_subcubes(f: &FunctionTable, d_mask: u64) -> Vec<bool> {
    let (r, q) = (f.r(), f.atoms());
    let mut cur = f.values().to_vec();
    let size = cur.len();
    for coord in 0..r {
        if d_mask >> coord & 1 == 0 {
            continue;
        }
        let stride = q.pow((r - 1 - coord) as u32);
        for base in 0..size {
            if (base / stride) % q != 0 {
                continue;
            }
            let all = (0..q).all(|a| cur[base + a * stride]);
            for a in 0..q {
                cur[base + a * stride] = all;
            }
        }
    }
    cur
}

/// `Pr_{x ∼ Ω^R, D ∼ S_{ε_T}(R)}[∧_i f_i(C_D(x)) ≡ 1]`, where `D` holds
/// each coordinate independently with probability `ε_T`.
pub fn test_accept(fs: &[FunctionTable], eps_t: &Rational, budget: Budget) -> Result<Rational> {
    let Some(first) = fs.first() else {
        return Ok(Rational::one());
    };
    if fs.iter().any(|f| f.r() != first.r() || f.probs() != first.probs()) {
        return Err(Error::invalid("functions must share a domain"));
    }
    if eps_t.is_negative() || *eps_t > Rational::one() {
        return Err(Error::invalid("eps_T outside [0, 1]"));
    }
    let r = first.r();
    if r >= 64 {
        return Err(Error::invalid("R too large for subcube enumeration"));
    }
    let size = first.values().len() as u128;
    budget.check(
        (1u128 << r)
            .saturating_mul(size)
            .saturating_mul(fs.len() as u128 * r.max(1) as u128),
    )?;
    let point_p: Vec<Rational> = (0..first.values().len()).map(|i| first.point_probability(i)).collect();
    let keep = Rational::one() - eps_t;
    let mut total = Rational::zero();
    for d_mask in 0..1u64 << r {
        let in_d = d_mask.count_ones() as usize;
        let pd = crate::rational::pow(eps_t, in_d) * crate::rational::pow(&keep, r - in_d);
        if pd.is_zero() {
            continue;
        }
        let mut ok = vec![true; point_p.len()];
        for f in fs {
            for (o, v) in ok.iter_mut().zip(all_ones_on_subcubes(f, d_mask)) {
                *o &= v;
            }
        }
        let px: Rational = point_p.iter().zip(&ok).filter(|(_, &o)| o).map(|(p, _)| p).sum();
        total += pd * px;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn accept_examples() {
        let b = Budget::default();
        let half = vec![ratio(1, 2), ratio(1, 2)];
        let one = FunctionTable::constant(2, half.clone(), true).unwrap();
        assert_eq!(test_accept(&[one.clone(), one], &ratio(1, 3), b).unwrap(), int(1));
        let eps = ratio(1, 5);
        let dict = FunctionTable::dictator(2, 0);
        assert_eq!(
            test_accept(std::slice::from_ref(&dict), &eps, b).unwrap(),
            (int(1) - &eps) / int(2)
        );
        assert!(test_accept(&[dict], &int(0), b).unwrap() < int(1));
    }
}
