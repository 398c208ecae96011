//! Roots of unity in discrete-log form.
//!
//! Every root of unity of the model lives in one cyclic group of order
//! `q^M - 1`, written as an exponent with respect to a fixed abstract
//! primitive root. Products are sums of exponents and the Frobenius
//! `x -> x^q` multiplies the exponent by `q`. Character values are kept
//! exactly in `Q/Z`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ambient order accepted; keeps every exponent product inside `u128`.
pub const MAX_AMBIENT_ORDER: u128 = 1 << 62;

/// A root of unity `g0^exponent` in the ambient cyclic group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootOfUnity {
    pub exponent: u128,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { exponent: 0 };

    pub fn is_one(self) -> bool {
        self.exponent == 0
    }
}

/// A cyclic subgroup of the ambient group, determined by its order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicSubgroup {
    pub order: u128,
}

/// The ambient cyclic group `mu_{q^M - 1}` together with the residue
/// characteristic needed for Frobenius twists and signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootGroup {
    pub p: u64,
    pub q: u64,
    pub degree: u32,
    pub order: u128,
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// `base^exp mod modulus` for `modulus < 2^64`.
pub fn pow_mod(base: u128, mut exp: u128, modulus: u128) -> u128 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u128;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    result
}

/// Multiplicative order of `a` modulo `m` (`gcd(a, m) = 1` required).
pub fn multiplicative_order(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(1);
    }
    if a.gcd(&m) != 1 {
        return None;
    }
    let mut x = a % m;
    let mut k = 1u128;
    while x != 1 {
        x = x * a % m;
        k += 1;
        if k > m {
            return None;
        }
    }
    Some(k)
}

/// Returns `(p, r)` with `q = p^r` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut r = 0;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p, r))
}

impl RootGroup {
    /// The group `mu_{q^degree - 1}`.
    pub fn new(q: u64, degree: u32) -> Result<Self> {
        let (p, _) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let size = checked_pow(q as u128, degree)
            .filter(|s| *s - 1 <= MAX_AMBIENT_ORDER)
            .ok_or(Error::AmbientTooLarge { q, degree })?;
        Ok(RootGroup {
            p,
            q,
            degree,
            order: size - 1,
        })
    }

    pub fn root(&self, exponent: u128) -> RootOfUnity {
        RootOfUnity {
            exponent: exponent % self.order,
        }
    }

    pub fn one(&self) -> RootOfUnity {
        RootOfUnity::ONE
    }

    /// The element `-1`, when the group order is even.
    pub fn minus_one(&self) -> Option<RootOfUnity> {
        (self.order % 2 == 0).then(|| self.root(self.order / 2))
    }

    pub fn mul(&self, a: RootOfUnity, b: RootOfUnity) -> RootOfUnity {
        self.root(a.exponent + b.exponent)
    }

    pub fn inv(&self, a: RootOfUnity) -> RootOfUnity {
        self.root(self.order - a.exponent)
    }

    pub fn div(&self, a: RootOfUnity, b: RootOfUnity) -> RootOfUnity {
        self.mul(a, self.inv(b))
    }

    /// `a^k` for a signed exponent `k`.
    pub fn pow(&self, a: RootOfUnity, k: i128) -> RootOfUnity {
        let k = k.rem_euclid(self.order as i128) as u128;
        self.root(a.exponent * k % self.order)
    }

    /// `a^k` for an unsigned exponent of any size.
    pub fn pow_u(&self, a: RootOfUnity, k: u128) -> RootOfUnity {
        self.root(a.exponent * (k % self.order) % self.order)
    }

    /// `q^c mod order`, the exponent multiplier of the `c`-th Frobenius power.
    pub fn frobenius_multiplier(&self, c: u128) -> u128 {
        pow_mod(self.q as u128, c, self.order)
    }

    /// `a^(q^c)`.
    pub fn frob(&self, a: RootOfUnity, c: u128) -> RootOfUnity {
        self.root(a.exponent * self.frobenius_multiplier(c) % self.order)
    }

    /// `q^k`, when it divides nothing larger than the ambient.
    pub fn q_pow(&self, k: u32) -> u128 {
        checked_pow(self.q as u128, k).expect("power of q within ambient range")
    }

    /// `mu_{q^k - 1}`, the roots of unity of the degree-`k` residue extension.
    pub fn residue_units(&self, k: u32) -> Result<CyclicSubgroup> {
        self.subgroup(self.q_pow(k) - 1)
    }

    pub fn subgroup(&self, order: u128) -> Result<CyclicSubgroup> {
        if order == 0 || self.order % order != 0 {
            return Err(Error::SubgroupOrder {
                order,
                ambient: self.order,
            });
        }
        Ok(CyclicSubgroup { order })
    }

    /// The canonical generator `g0^(N/order)` of a subgroup.
    pub fn generator(&self, h: CyclicSubgroup) -> RootOfUnity {
        self.root(self.order / h.order)
    }

    pub fn contains(&self, h: CyclicSubgroup, x: RootOfUnity) -> bool {
        x.exponent % (self.order / h.order) == 0
    }

    /// Discrete logarithm of `x` with respect to the canonical generator of `h`.
    pub fn log_in(&self, h: CyclicSubgroup, x: RootOfUnity) -> Option<u128> {
        self.contains(h, x)
            .then(|| x.exponent / (self.order / h.order))
    }

    /// `N / gcd(exponent, N)`.
    pub fn element_order(&self, x: RootOfUnity) -> u128 {
        self.order / x.exponent.gcd(&self.order)
    }

    /// All `w` with `w^e = c`. Empty when `c` is not an `e`-th power.
    pub fn power_solutions(&self, e: u128, c: RootOfUnity) -> Result<Vec<RootOfUnity>> {
        if e == 0 || self.order % e != 0 {
            return Err(Error::PowerNotDividing {
                e,
                ambient: self.order,
            });
        }
        if c.exponent % e != 0 {
            return Ok(Vec::new());
        }
        let base = c.exponent / e;
        let step = self.order / e;
        let mut out: Vec<RootOfUnity> = (0..e).map(|k| self.root(base + k * step)).collect();
        out.sort();
        Ok(out)
    }

    /// `(x / H)`: `+1` when `x` is a square in `H`, `-1` otherwise.
    pub fn square_class_symbol(&self, x: RootOfUnity, h: CyclicSubgroup) -> Result<i8> {
        if !self.contains(h, x) {
            return Err(Error::NotInSubgroup {
                exponent: x.exponent,
                order: h.order,
            });
        }
        if h.order % 2 == 1 {
            return Ok(1);
        }
        Ok(if self.pow_u(x, h.order / 2).is_one() {
            1
        } else {
            -1
        })
    }

    /// Sign of multiplication by `alpha` as a permutation of the field with
    /// `p^k` elements.
    pub fn multiplication_signature(&self, alpha: RootOfUnity, k: u32) -> Result<i8> {
        let field = checked_pow(self.p as u128, k).ok_or(Error::FieldTooLarge { p: self.p, k })?;
        let r = self.element_order(alpha);
        if (field - 1) % r != 0 {
            return Err(Error::NotInField {
                order: r,
                p: self.p,
                k,
            });
        }
        Ok(signature_closed_form(r, field))
    }

    /// Sign of multiplication by `alpha` on an `F_p`-space that is a vector
    /// space of dimension `c` over the field `F_p[alpha]`; this is the
    /// permutation sign on a set of size `field^c`.
    pub fn multiplication_signature_on(&self, alpha: RootOfUnity, set_size: u128) -> i8 {
        signature_closed_form(self.element_order(alpha), set_size)
    }

    /// `x^((q^big - 1)/(q^small - 1))`.
    pub fn finite_field_norm(&self, x: RootOfUnity, big: u32, small: u32) -> Result<RootOfUnity> {
        if small == 0 || big % small != 0 {
            return Err(Error::DegreeNotDividing { big, small });
        }
        let ratio = (self.q_pow(big) - 1) / (self.q_pow(small) - 1);
        Ok(self.pow_u(x, ratio))
    }

    /// Some `w` of order dividing `q^n - 1` whose norm down to degree `f` is `z`.
    pub fn solve_norm_equation(&self, z: RootOfUnity, n: u32, f: u32) -> Result<RootOfUnity> {
        if f == 0 || n % f != 0 {
            return Err(Error::DegreeNotDividing { big: n, small: f });
        }
        let small = self.residue_units(f)?;
        let big = self.residue_units(n)?;
        let c = self.log_in(small, z).ok_or(Error::NotInSubgroup {
            exponent: z.exponent,
            order: small.order,
        })?;
        Ok(self.pow_u(self.generator(big), c))
    }

    /// The value of `x` read as an element of `Q/Z`.
    pub fn angle(&self, x: RootOfUnity) -> Qz {
        Qz::new(x.exponent, self.order)
    }

    /// The value `+-1` of an element of order dividing 2.
    pub fn as_sign(&self, x: RootOfUnity) -> Option<i8> {
        if x.is_one() {
            Some(1)
        } else if Some(x) == self.minus_one() {
            Some(-1)
        } else {
            None
        }
    }
}

/// `(-1)^((r-1)(P-1)/r)`: multiplication by an element of order `r` on a set
/// of `P` field elements has `(P-1)/r` cycles of length `r` and one fixed point.
pub fn signature_closed_form(r: u128, field_size: u128) -> i8 {
    let cycles = (field_size - 1) / r;
    if (r - 1) % 2 == 1 && cycles % 2 == 1 {
        -1
    } else {
        1
    }
}

/// Sign of `y -> g^x * y` on the field with `field_size` elements, found by
/// walking every cycle. The nonzero elements are indexed by their discrete
/// logarithm, so the permutation is `i -> i + x mod (field_size - 1)`; zero is
/// fixed.
pub fn signature_by_cycles(x: u64, field_size: u64) -> i8 {
    let n = (field_size - 1) as usize;
    let step = (x as usize) % n.max(1);
    let mut seen = vec![false; n];
    let mut transpositions = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i += step;
            if i >= n {
                i -= n;
            }
        }
        transpositions += len - 1;
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An exact element of `Q/Z`, standing for `exp(2 pi i num/den)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Qz {
    num: u128,
    den: u128,
}

impl Qz {
    pub const ZERO: Qz = Qz { num: 0, den: 1 };
    pub const HALF: Qz = Qz { num: 1, den: 2 };

    pub fn new(num: u128, den: u128) -> Qz {
        assert!(den > 0, "zero denominator");
        let num = num % den;
        let g = num.gcd(&den);
        Qz {
            num: num / g,
            den: den / g,
        }
    }

    pub fn from_signed(num: i128, den: u128) -> Qz {
        Qz::new(num.rem_euclid(den as i128) as u128, den)
    }

    pub fn num(self) -> u128 {
        self.num
    }

    pub fn den(self) -> u128 {
        self.den
    }

    pub fn from_sign(s: i8) -> Qz {
        if s < 0 {
            Qz::HALF
        } else {
            Qz::ZERO
        }
    }

    /// `Some(+-1)` when the value has order dividing 2.
    pub fn to_sign(self) -> Option<i8> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_trivial(self) -> bool {
        self.num == 0
    }

    pub fn add(self, other: Qz) -> Qz {
        let den = self.den.lcm(&other.den);
        Qz::new(
            self.num * (den / self.den) + other.num * (den / other.den),
            den,
        )
    }

    pub fn neg(self) -> Qz {
        Qz::new(self.den - self.num, self.den)
    }

    pub fn sub(self, other: Qz) -> Qz {
        self.add(other.neg())
    }

    /// `k * self`, i.e. the value of the character at the `k`-th power.
    pub fn scale(self, k: u128) -> Qz {
        Qz::new(self.num * (k % self.den) % self.den, self.den)
    }

    pub fn scale_signed(self, k: i128) -> Qz {
        self.scale(k.rem_euclid(self.den as i128) as u128)
    }

    pub fn order(self) -> u128 {
        self.den
    }
}

impl Default for Qz {
    fn default() -> Self {
        Qz::ZERO
    }
}

impl PartialOrd for Qz {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Qz {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Qz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for Qz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadFraction(s.to_string());
        let (a, b) = s.split_once('/').ok_or_else(bad)?;
        let num: u128 = a.trim().parse().map_err(|_| bad())?;
        let den: u128 = b.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ok(Qz::new(num, den))
    }
}

impl Serialize for Qz {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Qz {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
