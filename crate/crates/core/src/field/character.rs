//! Characters on a ray class group, specified by the images of the
//! group's cyclic generators as exponents of a fixed primitive n-th root
//! of unity; evaluation lands in a cyclotomic character ring.

use super::{Ideal, RayClassGroup};
use crate::cyclotomic::{root_pow, CycRing};
use crate::error::{Error, Result};
use crate::cyclotomic::CycElem;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Character {
    /// exact order n (the character ring is (Z/p^M)[x]/Phi_n)
    pub order: u64,
    /// chi(g_i) = zeta_n^(exps[i]) on the i-th cyclic generator
    exps: Vec<u64>,
}

impl Character {
    pub fn trivial() -> Character {
        Character {
            order: 1,
            exps: Vec::new(),
        }
    }

    /// Validates well-definedness on the relations (n | e_i d_i) and that
    /// the declared order is the exact order of the character.
    pub fn new(group: &RayClassGroup, order: u64, exps: Vec<u64>) -> Result<Character> {
        if order == 0 {
            return Err(Error::Invalid("character order must be >= 1".into()));
        }
        let inv = group.invariants();
        if exps.len() != inv.len() {
            return Err(Error::Invalid(format!(
                "character needs {} generator exponents, got {}",
                inv.len(),
                exps.len()
            )));
        }
        let mut true_order = 1u64;
        for (&e, &d) in exps.iter().zip(inv) {
            if (e * d) % order != 0 {
                return Err(Error::Invalid(format!(
                    "exponent {e} is not well defined on a generator of order {d}"
                )));
            }
            let val_order = order / num_integer::gcd(order, e);
            true_order = num_integer::lcm(true_order, val_order);
        }
        if true_order != order {
            return Err(Error::Invalid(format!(
                "declared order {order} but the images generate order {true_order}"
            )));
        }
        Ok(Character {
            order,
            exps: exps.into_iter().map(|e| e % order).collect(),
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    /// Exponent k with chi(class) = zeta_n^k.
    pub fn exponent_on_tuple(&self, tuple: &[u64]) -> u64 {
        let mut k = 0u64;
        for (e, t) in self.exps.iter().zip(tuple) {
            k = (k + e * t) % self.order;
        }
        k
    }

    pub fn exponent_on_ideal(&self, group: &RayClassGroup, ideal: &Ideal) -> Result<u64> {
        Ok(self.exponent_on_tuple(&group.dlog_ideal(ideal)?))
    }

    /// chi of a class, as an element of the character ring.
    pub fn eval_tuple(&self, ring: &Arc<CycRing>, tuple: &[u64]) -> CycElem {
        root_pow(ring, self.exponent_on_tuple(tuple))
    }

    /// conj(chi) of a class.
    pub fn eval_tuple_conj(&self, ring: &Arc<CycRing>, tuple: &[u64]) -> CycElem {
        let k = self.exponent_on_tuple(tuple);
        root_pow(ring, (self.order - k) % self.order)
    }
}

/// The twist chi * kappa^(1-m): kappa(a) = omega(N(a)), so evaluation
/// multiplies chi by the Teichmueller scalar omega(N(a))^(1-m). The
/// L-function for general m routes through the m = 1 engine this way.
#[derive(Clone, Debug)]
pub struct TwistedCharacter {
    pub chi: Character,
    pub m: i64,
}

impl TwistedCharacter {
    /// Exponent of omega applied to the absolute norm.
    pub fn omega_exponent(&self) -> i64 {
        1 - self.m
    }
}

pub fn kappa_twist(chi: &Character, m: i64) -> TwistedCharacter {
    TwistedCharacter {
        chi: chi.clone(),
        m,
    }
}
