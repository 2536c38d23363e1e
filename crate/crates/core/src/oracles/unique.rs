use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{from_usize, Rational};
use crate::ug::UniqueGame;

/// `val_U(F)`: weight fraction of edges with `perm[F(u)] = F(v)`.
pub fn ug_value(u: &UniqueGame, f: &[usize]) -> Result<Rational> {
    if f.len() != u.vertex_count() {
        return Err(Error::invalid(format!(
            "assignment has {} labels for {} vertices",
            f.len(),
            u.vertex_count()
        )));
    }
    if let Some(l) = f.iter().find(|&&l| l >= u.r()) {
        return Err(Error::invalid(format!("label {l} outside 0..{}", u.r())));
    }
    let total = u.total_weight();
    if total.is_zero() {
        return Ok(total);
    }
    let satisfied: Rational = u
        .edges()
        .iter()
        .filter(|e| e.perm[f[e.u]] == f[e.v])
        .map(|e| &e.weight)
        .sum();
    Ok(satisfied / total)
}

/// Expected value of an assignment with i.i.d. uniform labels. A loop
/// `(u, u)` is satisfied with probability `fixed_points(perm) / R`.
pub fn random_assignment_value(u: &UniqueGame) -> Rational {
    let total = u.total_weight();
    if total.is_zero() {
        return total;
    }
    let r = from_usize(u.r());
    let sum: Rational = u
        .edges()
        .iter()
        .map(|e| {
            if e.u == e.v {
                let fixed = e.perm.iter().enumerate().filter(|(i, p)| *i == **p).count();
                &e.weight * from_usize(fixed) / &r
            } else {
                &e.weight / &r
            }
        })
        .sum();
    sum / total
}
