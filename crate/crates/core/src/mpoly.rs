//! Sparse multivariate polynomials over F_p, polynomial maps and first-order jets.
//!
//! [`IntPoly`] is the prime-independent integer form used in variety
//! descriptions; it is reduced to an [`MPoly`] once a modulus is fixed.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeContext};
use crate::linalg::Matrix;

type Fe = FieldElement;

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Fe>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Fe) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MPoly::monomial(e, Fe::ONE)
    }

    pub fn monomial(exps: Exponents, c: Fe) -> Self {
        let mut p = MPoly::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Fe)>, f: &PrimeContext) -> Self {
        let mut p = MPoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, c, f);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: Fe, f: &PrimeContext) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Fe)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, other: &MPoly, f: &PrimeContext) -> MPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c, f);
        }
        out
    }

    pub fn sub(&self, other: &MPoly, f: &PrimeContext) -> MPoly {
        self.add(&other.scale(f.neg(Fe::ONE), f), f)
    }

    pub fn scale(&self, c: Fe, f: &PrimeContext) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), f.mul(*v, c))).collect() }
    }

    pub fn multiply(&self, other: &MPoly, f: &PrimeContext) -> MPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut acc: BTreeMap<Exponents, Fe> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let slot = acc.entry(e).or_insert(Fe::ZERO);
                *slot = f.mul_add(*slot, *ca, *cb);
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MPoly { nvars: self.nvars, terms: acc }
    }

    pub fn pow(&self, e: u32, f: &PrimeContext) -> MPoly {
        let mut acc = MPoly::constant(self.nvars, Fe::ONE);
        for _ in 0..e {
            acc = acc.multiply(self, f);
        }
        acc
    }

    /// Formal partial derivative in variable `var`.
    pub fn partial(&self, var: usize, f: &PrimeContext) -> MPoly {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, f.mul(*c, f.from_u64(e[var] as u64)), f);
        }
        out
    }

    pub fn gradient(&self, f: &PrimeContext) -> Vec<MPoly> {
        (0..self.nvars).map(|i| self.partial(i, f)).collect()
    }

    pub fn eval(&self, t: &[Fe], f: &PrimeContext) -> Fe {
        assert_eq!(t.len(), self.nvars, "point length");
        let mut acc = Fe::ZERO;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (x, &k) in t.iter().zip(e) {
                if k > 0 {
                    m = f.mul(m, f.pow(*x, k as u64));
                }
            }
            acc = f.add(acc, m);
        }
        acc
    }

    /// Evaluates on jets: the result carries the value and all directional
    /// derivatives seeded in the inputs.
    pub fn eval_jet(&self, t: &[Jet], f: &PrimeContext) -> Jet {
        assert_eq!(t.len(), self.nvars, "point length");
        let width = t.first().map_or(0, |j| j.derivs.len());
        let mut acc = Jet::constant(Fe::ZERO, width);
        for (e, c) in &self.terms {
            let mut m = Jet::constant(*c, width);
            for (x, &k) in t.iter().zip(e) {
                for _ in 0..k {
                    m = m.mul(x, f);
                }
            }
            acc = acc.add(&m, f);
        }
        acc
    }

    /// Substitutes `polys[i]` for variable `i`; the result lives in the
    /// variables of `polys`.
    pub fn compose(&self, polys: &[MPoly], f: &PrimeContext) -> MPoly {
        assert_eq!(polys.len(), self.nvars, "one substitute per variable");
        let target = polys.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<MPoly>> = polys.iter().map(|p| vec![MPoly::constant(p.nvars, Fe::ONE), p.clone()]).collect();
        let mut out = MPoly::zero(target);
        for (e, c) in &self.terms {
            let mut m = MPoly::constant(target, *c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().multiply(&polys[i], f);
                    powers[i].push(next);
                }
                m = m.multiply(&powers[i][k as usize], f);
            }
            out = out.add(&m, f);
        }
        out
    }

    /// Re-indexes into `nvars` variables, sending variable `i` to `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> MPoly {
        assert_eq!(map.len(), self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = vec![0; nvars];
                for (i, &k) in e.iter().enumerate() {
                    e2[map[i]] += k;
                }
                (e2, *c)
            })
            .collect();
        MPoly { nvars, terms }
    }
}

/// Ordered coordinate functions of a map into an affine cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    nvars: usize,
    coords: Vec<MPoly>,
}

impl PolyMap {
    pub fn new(nvars: usize, coords: Vec<MPoly>) -> Result<Self> {
        if coords.iter().any(|c| c.nvars != nvars) {
            return Err(Error::InvalidSpec("coordinates use differing variable counts".into()));
        }
        if coords.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidSpec("all coordinates vanish identically".into()));
        }
        Ok(PolyMap { nvars, coords })
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coords(&self) -> &[MPoly] {
        &self.coords
    }

    /// Number of ambient homogeneous coordinates, `r + 1`.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn eval(&self, t: &[Fe], f: &PrimeContext) -> Vec<Fe> {
        self.coords.iter().map(|c| c.eval(t, f)).collect()
    }

    /// Rows `F(t), dF/dt_1, ..., dF/dt_n` without any rank check.
    pub fn jacobian_rows(&self, t: &[Fe], f: &PrimeContext) -> Matrix {
        let seeds = Jet::variables(t);
        let jets: Vec<Jet> = self.coords.iter().map(|c| c.eval_jet(&seeds, f)).collect();
        let mut m = Matrix::zeros(self.nvars + 1, self.coords.len());
        for (j, jet) in jets.iter().enumerate() {
            m.set(0, j, jet.value);
            for (i, d) in jet.derivs.iter().enumerate() {
                m.set(i + 1, j, *d);
            }
        }
        m
    }

    /// Affine-cone tangent frame at `t`; fails when the rows are dependent.
    pub fn jacobian_at(&self, t: &[Fe], f: &PrimeContext) -> Result<Matrix> {
        let m = self.jacobian_rows(t, f);
        if m.row(0).iter().all(|x| x.is_zero()) || m.rank(f) < self.nvars + 1 {
            return Err(Error::SingularSample);
        }
        Ok(m)
    }

    /// Coordinates `M * coords(F)`.
    pub fn compose_linear(&self, m: &Matrix, f: &PrimeContext) -> Result<PolyMap> {
        if m.cols() != self.coords.len() {
            return Err(Error::Shape(format!("matrix has {} columns, map has {} coordinates", m.cols(), self.coords.len())));
        }
        let coords = m
            .iter_rows()
            .map(|row| {
                let mut acc = MPoly::zero(self.nvars);
                for (c, p) in row.iter().zip(&self.coords) {
                    if !c.is_zero() {
                        acc = acc.add(&p.scale(*c, f), f);
                    }
                }
                acc
            })
            .collect();
        PolyMap::new(self.nvars, coords)
    }

    /// `outer` applied to the coordinates of `self`.
    pub fn then(&self, outer: &[MPoly], f: &PrimeContext) -> Result<PolyMap> {
        let coords = outer.iter().map(|g| g.compose(&self.coords, f)).collect();
        PolyMap::new(self.nvars, coords)
    }
}

/// First-order jet: a value together with derivatives along fixed directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    pub value: Fe,
    pub derivs: Vec<Fe>,
}

impl Jet {
    pub fn constant(value: Fe, width: usize) -> Self {
        Jet { value, derivs: vec![Fe::ZERO; width] }
    }

    pub fn new(value: Fe, derivs: Vec<Fe>) -> Self {
        Jet { value, derivs }
    }

    /// Coordinate jets at `t`, seeded with the unit directions.
    pub fn variables(t: &[Fe]) -> Vec<Jet> {
        (0..t.len())
            .map(|i| {
                let mut d = vec![Fe::ZERO; t.len()];
                d[i] = Fe::ONE;
                Jet { value: t[i], derivs: d }
            })
            .collect()
    }

    /// Jets for the coordinates of `point`, differentiated along each row of `dirs`.
    pub fn along(point: &[Fe], dirs: &Matrix) -> Vec<Jet> {
        (0..point.len())
            .map(|j| Jet { value: point[j], derivs: (0..dirs.rows()).map(|i| dirs.get(i, j)).collect() })
            .collect()
    }

    pub fn add(&self, other: &Jet, f: &PrimeContext) -> Jet {
        Jet {
            value: f.add(self.value, other.value),
            derivs: self.derivs.iter().zip(&other.derivs).map(|(a, b)| f.add(*a, *b)).collect(),
        }
    }

    pub fn scale(&self, c: Fe, f: &PrimeContext) -> Jet {
        Jet { value: f.mul(self.value, c), derivs: self.derivs.iter().map(|a| f.mul(*a, c)).collect() }
    }

    pub fn mul(&self, other: &Jet, f: &PrimeContext) -> Jet {
        Jet {
            value: f.mul(self.value, other.value),
            derivs: self
                .derivs
                .iter()
                .zip(&other.derivs)
                .map(|(da, db)| f.mul_add(f.mul(self.value, *db), other.value, *da))
                .collect(),
        }
    }
}

/// Integer-coefficient polynomial in variables `x0, x1, ...`.
///
/// Exponent vectors are stored without trailing zeros so that the same
/// polynomial compares equal regardless of how many variables it is viewed in.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    terms: BTreeMap<Exponents, i128>,
}

fn trim(mut e: Exponents) -> Exponents {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly::default()
    }

    pub fn constant(c: i128) -> Self {
        IntPoly::monomial(&[], c)
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        IntPoly::monomial(&e, 1)
    }

    pub fn monomial(exps: &[u32], c: i128) -> Self {
        let mut p = IntPoly::zero();
        p.add_term(exps.to_vec(), c);
        p
    }

    fn add_term(&mut self, e: Exponents, c: i128) {
        if c == 0 {
            return;
        }
        let e = trim(e);
        let slot = self.terms.entry(e.clone()).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &i128)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// One more than the largest variable index that occurs.
    pub fn min_vars(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, c: i128) -> IntPoly {
        let mut out = IntPoly::zero();
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let n = ea.len().max(eb.len());
                let e = (0..n).map(|i| ea.get(i).unwrap_or(&0) + eb.get(i).unwrap_or(&0)).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Reduction mod p, viewed in `nvars` variables.
    pub fn to_field(&self, nvars: usize, f: &PrimeContext) -> Result<MPoly> {
        if self.min_vars() > nvars {
            return Err(Error::InvalidSpec(format!(
                "polynomial {self} uses x{} but only {nvars} variables are available",
                self.min_vars() - 1
            )));
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut e2 = e.clone();
            e2.resize(nvars, 0);
            (e2, f.from_i128(*c))
        });
        Ok(MPoly::from_terms(nvars, terms, f))
    }

    /// All monomials of degree `d` in `nvars` variables, in lexicographic order.
    pub fn monomials(nvars: usize, d: u32) -> Vec<IntPoly> {
        monomial_exponents(nvars, d).into_iter().map(|e| IntPoly::monomial(&e, 1)).collect()
    }
}

/// Exponent vectors of all degree-`d` monomials in `nvars` variables, highest power of `x0` first.
pub fn monomial_exponents(nvars: usize, d: u32) -> Vec<Exponents> {
    fn rec(i: usize, left: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut vec![0; nvars], &mut out);
    out
}

impl fmt::Display for IntPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        // graded order, largest first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| {
                let n = a.len().max(b.len());
                let pa: Vec<u32> = (0..n).map(|i| *a.get(i).unwrap_or(&0)).collect();
                let pb: Vec<u32> = (0..n).map(|i| *b.get(i).unwrap_or(&0)).collect();
                pb.cmp(&pa)
            })
        });
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = *c < 0;
            let mag = c.unsigned_abs();
            if idx == 0 {
                if neg {
                    write!(out, "-")?;
                }
            } else {
                write!(out, " {} ", if neg { '-' } else { '+' })?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
                .collect();
            if factors.is_empty() {
                write!(out, "{mag}")?;
            } else if mag == 1 {
                write!(out, "{}", factors.join("*"))?;
            } else {
                write!(out, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = Error;

    /// Accepts sums of terms such as `-3*x0^2*x1 + x2 - 7`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: &str| Error::Parse(format!("{msg} in polynomial {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        // split into signed terms at top-level + and -
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in compact.char_indices() {
            if ch == '+' || ch == '-' {
                if !cur.is_empty() {
                    pieces.push((neg, std::mem::take(&mut cur)));
                } else if i > 0 {
                    return Err(err("dangling sign"));
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(err("trailing sign"));
        }
        pieces.push((neg, cur));

        let mut poly = IntPoly::zero();
        for (neg, term) in pieces {
            let mut coeff: i128 = 1;
            let mut exps: Exponents = Vec::new();
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, pow) = match rest.split_once('^') {
                        Some((a, b)) => (a, b.parse::<u32>().map_err(|_| err("bad exponent"))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| err("bad variable index"))?;
                    if idx > 4096 {
                        return Err(err("variable index too large"));
                    }
                    if exps.len() <= idx {
                        exps.resize(idx + 1, 0);
                    }
                    exps[idx] += pow;
                } else {
                    let v: i128 = factor.parse().map_err(|_| err("bad coefficient"))?;
                    coeff = coeff.checked_mul(v).ok_or_else(|| err("coefficient overflow"))?;
                }
            }
            poly.add_term(exps, if neg { -coeff } else { coeff });
        }
        Ok(poly)
    }
}

impl serde::Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
