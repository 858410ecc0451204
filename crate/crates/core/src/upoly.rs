//! Dense univariate polynomials over F_p and root finding.
//!
//! Roots are isolated by `gcd(f, x^p - x)` and then split with the
//! Cantor–Zassenhaus equal-degree method for linear factors.

use rand::Rng;

use crate::field::{FieldElement, PrimeContext};

type Fe = FieldElement;

/// Coefficients from the constant term upwards, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<Fe>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn x() -> Self {
        UPoly { coeffs: vec![Fe::ZERO, Fe::ONE] }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: Fe, f: &PrimeContext) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, c| f.mul_add(*c, acc, x))
    }

    pub fn add(&self, other: &UPoly, f: &PrimeContext) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &UPoly, i: usize| p.coeffs.get(i).copied().unwrap_or(Fe::ZERO);
        UPoly::new((0..n).map(|i| f.add(get(self, i), get(other, i))).collect())
    }

    pub fn sub(&self, other: &UPoly, f: &PrimeContext) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &UPoly, i: usize| p.coeffs.get(i).copied().unwrap_or(Fe::ZERO);
        UPoly::new((0..n).map(|i| f.sub(get(self, i), get(other, i))).collect())
    }

    pub fn mul(&self, other: &UPoly, f: &PrimeContext) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.mul_add(out[i + j], *a, *b);
            }
        }
        UPoly::new(out)
    }

    /// Remainder of division by a nonzero `m`.
    pub fn rem(&self, m: &UPoly, f: &PrimeContext) -> UPoly {
        let dm = m.degree().expect("division by zero polynomial");
        let lead_inv = f.inv(m.coeffs[dm]).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        while r.len() > dm {
            let top = r.len() - 1;
            let c = f.mul(r[top], lead_inv);
            if !c.is_zero() {
                for j in 0..=dm {
                    let idx = top - dm + j;
                    r[idx] = f.sub(r[idx], f.mul(c, m.coeffs[j]));
                }
            }
            r.pop();
        }
        UPoly::new(r)
    }

    pub fn monic(&self, f: &PrimeContext) -> UPoly {
        match self.coeffs.last() {
            None => UPoly::zero(),
            Some(&lead) => {
                let inv = f.inv(lead).expect("nonzero");
                UPoly::new(self.coeffs.iter().map(|c| f.mul(*c, inv)).collect())
            }
        }
    }

    pub fn gcd(&self, other: &UPoly, f: &PrimeContext) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `base^e mod m`.
    pub fn powmod(base: &UPoly, mut e: u64, m: &UPoly, f: &PrimeContext) -> UPoly {
        let mut acc = UPoly::new(vec![Fe::ONE]).rem(m, f);
        let mut b = base.rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b, f).rem(m, f);
            }
            b = b.mul(&b, f).rem(m, f);
            e >>= 1;
        }
        acc
    }

    /// Interpolates through `(x_i, y_i)` with distinct nodes.
    pub fn interpolate(xs: &[Fe], ys: &[Fe], f: &PrimeContext) -> UPoly {
        assert_eq!(xs.len(), ys.len());
        let mut out = UPoly::zero();
        for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
            let mut basis = UPoly::new(vec![Fe::ONE]);
            let mut denom = Fe::ONE;
            for (j, &xj) in xs.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = basis.mul(&UPoly::new(vec![f.neg(xj), Fe::ONE]), f);
                denom = f.mul(denom, f.sub(xi, xj));
            }
            let c = f.mul(yi, f.inv(denom).expect("distinct nodes"));
            let scaled = UPoly::new(basis.coeffs.iter().map(|b| f.mul(*b, c)).collect());
            out = out.add(&scaled, f);
        }
        out
    }

    /// All distinct roots in F_p, sorted by residue value.
    pub fn roots<R: Rng + ?Sized>(&self, f: &PrimeContext, rng: &mut R) -> Vec<Fe> {
        let Some(d) = self.degree() else { return Vec::new() };
        if d == 0 {
            return Vec::new();
        }
        let g = self.monic(f);
        // product of the distinct linear factors
        let xp = UPoly::powmod(&UPoly::x(), f.modulus(), &g, f);
        let split = g.gcd(&xp.sub(&UPoly::x(), f), f);
        let mut out = Vec::new();
        split_linear(&split, f, rng, &mut out);
        out.sort();
        out
    }
}

/// Splits a monic squarefree product of distinct linear factors.
fn split_linear<R: Rng + ?Sized>(g: &UPoly, f: &PrimeContext, rng: &mut R, out: &mut Vec<Fe>) {
    match g.degree() {
        None | Some(0) => {}
        Some(1) => out.push(f.neg(g.coeffs[0])),
        Some(_) => loop {
            let a = f.random_element(rng);
            let shifted = UPoly::new(vec![a, Fe::ONE]);
            let h = UPoly::powmod(&shifted, (f.modulus() - 1) / 2, g, f);
            let d = g.gcd(&h.sub(&UPoly::new(vec![Fe::ONE]), f), f);
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && dd < g.degree().unwrap() {
                split_linear(&d, f, rng, out);
                let other = quotient(g, &d, f);
                split_linear(&other, f, rng, out);
                return;
            }
        },
    }
}

fn quotient(a: &UPoly, b: &UPoly, f: &PrimeContext) -> UPoly {
    let db = b.degree().expect("nonzero divisor");
    let inv = f.inv(b.coeffs[db]).expect("nonzero");
    let mut r = a.coeffs.clone();
    let mut q = vec![Fe::ZERO; r.len().saturating_sub(db)];
    while r.len() > db {
        let top = r.len() - 1;
        let c = f.mul(r[top], inv);
        q[top - db] = c;
        for j in 0..=db {
            let idx = top - db + j;
            r[idx] = f.sub(r[idx], f.mul(c, b.coeffs[j]));
        }
        r.pop();
    }
    UPoly::new(q)
}
