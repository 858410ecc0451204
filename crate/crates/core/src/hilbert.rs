//! Degree-two Hilbert function by evaluation, and Castelnuovo-type bounds.

use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg::EchelonBasis;
use crate::parallel::par_map;
use crate::variety::{span_pivots, Compiled, VarietySpec};

/// Extra samples beyond the number of quadratic monomials.
pub const SAMPLE_MARGIN: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertReport {
    pub h1: usize,
    pub h2: usize,
    pub d: Option<u64>,
    pub iota: Option<i64>,
    pub bound2: Option<i64>,
    pub equality2: Option<bool>,
}

/// `(h1, h2)` for one prime: the span dimension and the dimension of the
/// space of quadrics restricted to the variety.
pub fn hilbert12_compiled(c: &Compiled, rng: &mut crate::rng::StreamRng) -> Result<(usize, usize)> {
    let f = *c.ctx();
    let piv = span_pivots(c, c.ncoords() + 2, rng)?;
    let h1 = piv.len();
    let cols = h1 * (h1 + 1) / 2;
    let mut basis = EchelonBasis::new(cols);
    let mut row = Vec::with_capacity(cols);
    for _ in 0..cols + SAMPLE_MARGIN {
        let p = c.sample_point(rng)?;
        let y: Vec<_> = piv.iter().map(|&i| p[i]).collect();
        row.clear();
        for i in 0..h1 {
            for j in i..h1 {
                row.push(f.mul(y[i], y[j]));
            }
        }
        basis.insert(&row, &f);
        if basis.rank() == cols {
            break;
        }
    }
    Ok((h1, basis.rank()))
}

/// Span dimension and degree-two Hilbert value, maximized over primes and trials.
pub fn hilbert12(engine: &Engine, spec: &VarietySpec) -> Result<(usize, usize)> {
    let compiled = engine.compile(spec)?;
    hilbert12_with(engine, &compiled)
}

pub fn hilbert12_with(engine: &Engine, compiled: &[Compiled]) -> Result<(usize, usize)> {
    let jobs: Vec<(usize, usize)> = (0..compiled.len()).map(|p| (p, 0)).collect();
    let out = par_map(jobs, engine.parallel(), |(p, t)| {
        let mut rng = engine.stream("hilbert", p, t);
        hilbert12_compiled(&compiled[p], &mut rng)
    });
    let out = out.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().fold((0, 0), |(a, b), (x, y)| (a.max(x), b.max(y))))
}

/// `h_X(2)`.
pub fn hilbert2(engine: &Engine, spec: &VarietySpec) -> Result<usize> {
    Ok(hilbert12(engine, spec)?.1)
}

/// `(iota, bound)` with `iota = min(d + n - r - 1, r - n)` and
/// `bound = iota + r(n+1) - n(n-1)/2 + 1`, the least possible `h_X(2)` for a
/// nondegenerate `X` of dimension `n` and degree `d` in `P^r`.
pub fn castelnuovo_bound(r: usize, n: usize, d: usize) -> Result<(i64, i64)> {
    if n > r || d + n < r + 1 {
        return Err(Error::MinimalDegreeViolated { r, n, d });
    }
    let (r, n, d) = (r as i64, n as i64, d as i64);
    let iota = (d + n - r - 1).min(r - n);
    Ok((iota, iota + r * (n + 1) - n * (n - 1) / 2 + 1))
}

/// Full report; the bound fields are filled when the spec declares its degree.
pub fn hilbert_report(engine: &Engine, spec: &VarietySpec) -> Result<HilbertReport> {
    let compiled = engine.compile(spec)?;
    let (h1, h2) = hilbert12_with(engine, &compiled)?;
    let d = spec.declared_degree();
    let mut rep = HilbertReport { h1, h2, d, iota: None, bound2: None, equality2: None };
    if let Some(d) = d {
        let (iota, bound) = castelnuovo_bound(h1 - 1, compiled[0].dim(), d as usize)?;
        rep.iota = Some(iota);
        rep.bound2 = Some(bound);
        rep.equality2 = Some(h2 as i64 == bound);
    }
    Ok(rep)
}

/// Result of comparing `h_Y(2)` of a contact image `Y` in `P^(k+1)` with its
/// two a priori bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eq9Report {
    pub k: usize,
    pub h2: usize,
    pub lower: i64,
    pub upper: usize,
    pub holds: bool,
}

/// Checks `castelnuovo_bound(k+1, n, d) <= h_Y(2) <= 4k + 4` for a variety `Y`
/// spanning `P^(k+1)` with declared degree `d`.
pub fn check_eq9(engine: &Engine, y: &VarietySpec, k: usize) -> Result<Eq9Report> {
    let compiled = engine.compile(y)?;
    let n = compiled[0].dim();
    let (h1, h2) = hilbert12_with(engine, &compiled)?;
    if h1 != k + 2 {
        return Err(Error::InvalidSpec(format!("variety spans P^{} rather than P^{}", h1 - 1, k + 1)));
    }
    if n >= k + 1 {
        return Err(Error::InvalidSpec("variety fills its span".into()));
    }
    let d = y.declared_degree().ok_or_else(|| Error::InvalidSpec("degree is not declared".into()))?;
    let (_, lower) = castelnuovo_bound(k + 1, n, d as usize)?;
    let upper = 4 * k + 4;
    Ok(Eq9Report { k, h2, lower, upper, holds: lower <= h2 as i64 && h2 <= upper })
}
