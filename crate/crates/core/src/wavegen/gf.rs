//! Small finite fields GF(p^k) via exp/log tables, enough for Costas
//! constructions up to q of a few hundred.

#[derive(Debug, Clone)]
pub(crate) struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub(crate) fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FiniteField {
    pub(crate) fn new(q: u32) -> Option<Self> {
        let (p, k) = prime_power(q)?;
        // Elements are base-p digit strings of polynomial coefficients. Search
        // the monic degree-k polynomials for one with x primitive.
        for low in 0..q {
            let modulus: Vec<u32> = (0..k).map(|i| (low / p.pow(i)) % p).collect();
            if let Some(exp) = Self::powers_of_x(p, k, &modulus) {
                let mut log = vec![0; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                return Some(Self { p, k, q, exp, log });
            }
        }
        None
    }

    /// Powers x^0..x^{q-2} modulo `x^k + Σ modulus[i] x^i`, if x has order q-1.
    fn powers_of_x(p: u32, k: u32, modulus: &[u32]) -> Option<Vec<u32>> {
        let q = p.pow(k);
        let mut cur = vec![0u32; k as usize];
        cur[0] = 1;
        let mut out = Vec::with_capacity(q as usize - 1);
        let encode = |c: &[u32]| c.iter().rev().fold(0, |acc, &d| acc * p + d);
        for i in 0..q - 1 {
            let e = encode(&cur);
            if e == 0 || (i > 0 && e == 1) {
                return None;
            }
            out.push(e);
            // multiply by x and reduce: x^k = -Σ modulus[i] x^i
            let top = cur[k as usize - 1];
            for j in (1..k as usize).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            for j in 0..k as usize {
                cur[j] = (cur[j] + (p - modulus[j]) * top) % p;
            }
        }
        (encode(&cur) == 1).then_some(out)
    }

    pub(crate) fn one(&self) -> u32 {
        1
    }

    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub(crate) fn neg(&self, a: u32) -> u32 {
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// g^i for the fixed primitive element g.
    pub(crate) fn pow_gen(&self, i: u64) -> u32 {
        self.exp[(i % (self.q as u64 - 1)) as usize]
    }

    /// Discrete log base g of a nonzero element.
    pub(crate) fn log(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.log[a as usize]
    }

    /// Exponents e with g^e primitive.
    pub(crate) fn primitive_exponents(&self) -> Vec<u32> {
        (1..self.q - 1).filter(|&e| gcd(e, self.q - 1) == 1).collect()
    }
}
