//! Secant dimensions through ranks of stacked tangent frames.
//!
//! `s^(h)` is the dimension of the span of `h + 1` tangent spaces at general
//! points. Randomized ranks can only come out too small, so every dimension is
//! the maximum over all trials and primes of the engine.

use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::field::PrimeContext;
use crate::linalg::{EchelonBasis, Matrix};
use crate::mpoly::{MPoly, PolyMap};
use crate::parallel::par_map;
use crate::rng::{label, StreamRng};
use crate::variety::{center_annihilator, span_dim, Center, Compiled, VarietySpec};

/// Measured secant dimensions up to order `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantReport {
    pub k: usize,
    /// Dimension of the linear span of the variety.
    pub r: usize,
    pub n: usize,
    /// `s^(0), ..., s^(k)`.
    pub chain: Vec<usize>,
    pub sigma_k: usize,
    pub delta_k: usize,
    /// `r - s^(k-1) - 1`, the ambient dimension after projecting from `k` tangent spaces.
    pub r_k: usize,
    pub trials: usize,
    pub primes: Vec<u64>,
    pub agreement: bool,
}

impl SecantReport {
    pub fn s_k(&self) -> usize {
        self.chain[self.k]
    }

    /// Defective at order k: below the expected dimension without filling the span.
    pub fn is_defective(&self) -> bool {
        self.delta_k > 0 && self.s_k() < self.r
    }

    /// The report truncated to order `h <= k`.
    pub fn at(&self, h: usize) -> SecantReport {
        assert!(h <= self.k);
        let chain = self.chain[..=h].to_vec();
        let sigma = expected_dim(self.r, self.n, h);
        SecantReport {
            k: h,
            r: self.r,
            n: self.n,
            sigma_k: sigma,
            delta_k: sigma.saturating_sub(chain[h]),
            r_k: residual_dim(self.r, &chain, h),
            chain,
            trials: self.trials,
            primes: self.primes.clone(),
            agreement: self.agreement,
        }
    }
}

/// Expected dimension `min(r, n(k+1) + k)`.
pub fn expected_dim(r: usize, n: usize, k: usize) -> usize {
    r.min(n * (k + 1) + k)
}

fn residual_dim(r: usize, chain: &[usize], k: usize) -> usize {
    if k == 0 {
        r
    } else {
        r.saturating_sub(chain[k - 1] + 1)
    }
}

/// Image of a general `k`-tangential projection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentialReport {
    pub k: usize,
    pub n_k: usize,
    pub m_k: usize,
    /// The variety projected from the tangent spaces at `k` general points.
    pub projected_spec: VarietySpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactClass {
    DivisorViaCurveImage,
    DivisorViaDevelopableImage,
    NotDivisorial,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactShape {
    pub classification: ContactClass,
    /// Lower bound `m_k` for the dimension of the tangential contact locus.
    pub gamma_lower: usize,
}

/// Per-trial chain of ranks of stacked frames.
fn trial_chain(c: &Compiled, k: usize, rng: &mut StreamRng) -> Result<Vec<usize>> {
    let f = *c.ctx();
    let mut basis = EchelonBasis::new(c.ncoords());
    let mut chain = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        if basis.rank() < c.ncoords() {
            let pf = c.sample(rng)?;
            for row in pf.frame.iter_rows() {
                basis.insert(row, &f);
            }
        }
        chain.push(basis.rank() - 1);
    }
    Ok(chain)
}

/// Secant dimensions `s^(0..=k)` of `spec`.
pub fn secant_dim(engine: &Engine, spec: &VarietySpec, k: usize) -> Result<SecantReport> {
    let compiled = engine.compile(spec)?;
    secant_dim_compiled(engine, &compiled, k)
}

/// [`secant_dim`] for a spec already compiled with `engine.compile`.
pub fn secant_dim_compiled(engine: &Engine, compiled: &[Compiled], k: usize) -> Result<SecantReport> {
    let n = compiled[0].dim();
    let spans = par_map((0..compiled.len()).collect(), engine.parallel(), |p| {
        let c = &compiled[p];
        let mut rng = engine.stream("span", p, 0);
        span_dim(c, c.ncoords() + 2, &mut rng)
    });
    let r = spans.into_iter().collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(1) - 1;
    let chains = par_map(engine.jobs(), engine.parallel(), |(p, t)| {
        let mut rng = engine.stream("secant", p, t);
        trial_chain(&compiled[p], k, &mut rng).map(|c| (p, c))
    });
    let chains = chains.into_iter().collect::<Result<Vec<_>>>()?;
    let chain: Vec<usize> = (0..=k).map(|h| chains.iter().map(|(_, c)| c[h]).max().unwrap()).collect();
    let agreement = chains.iter().all(|(_, c)| *c == chain);
    let sigma = expected_dim(r, n, k);
    Ok(SecantReport {
        k,
        r,
        n,
        sigma_k: sigma,
        delta_k: sigma.saturating_sub(chain[k]),
        r_k: residual_dim(r, &chain, k),
        chain,
        trials: engine.trials(),
        primes: engine.moduli(),
        agreement,
    })
}

/// `delta_k` of `spec`.
pub fn defect(engine: &Engine, spec: &VarietySpec, k: usize) -> Result<usize> {
    Ok(secant_dim(engine, spec, k)?.delta_k)
}

/// Smallest `h` in `1..=k_max` at which `spec` is defective, together with the
/// reports for every `h` in `0..=k_max`.
pub fn min_defective_scan(engine: &Engine, spec: &VarietySpec, k_max: usize) -> Result<(Option<usize>, Vec<SecantReport>)> {
    let full = secant_dim(engine, spec, k_max)?;
    Ok(scan_from_report(&full))
}

/// Splits one report at order `k_max` into per-order reports.
pub fn scan_from_report(full: &SecantReport) -> (Option<usize>, Vec<SecantReport>) {
    let reports: Vec<SecantReport> = (0..=full.k).map(|h| full.at(h)).collect();
    let first = reports.iter().skip(1).find(|r| r.is_defective()).map(|r| r.k);
    (first, reports)
}

/// Dimension of the image of `c` under the linear map with rows `m`,
/// maximized over `samples` fresh points.
fn projected_dim(c: &Compiled, m: &Matrix, samples: usize, rng: &mut StreamRng) -> Result<usize> {
    let f = *c.ctx();
    let mt = m.transpose();
    let mut best = 0;
    for _ in 0..samples {
        let pf = c.sample(rng)?;
        let img = pf.frame.mul(&mt, &f)?;
        best = best.max(img.rank(&f));
    }
    Ok(best.saturating_sub(1))
}

/// Seed of the tangent center used by [`tangential_projection`].
fn tangent_seed(engine: &Engine, k: usize) -> u64 {
    engine.seed() ^ label("tangential").rotate_left(k as u32)
}

/// General `k`-tangential projection: the image of the variety from the span
/// of its tangent spaces at `k` general points.
pub fn tangential_projection(engine: &Engine, spec: &VarietySpec, k: usize) -> Result<TangentialReport> {
    let compiled = engine.compile(spec)?;
    tangential_projection_compiled(engine, spec, &compiled, k)
}

pub fn tangential_projection_compiled(engine: &Engine, spec: &VarietySpec, compiled: &[Compiled], k: usize) -> Result<TangentialReport> {
    let n = compiled[0].dim();
    let center = Center::Tangent { count: k, seed: tangent_seed(engine, k) };
    let projected_spec = VarietySpec::project(spec.clone(), center.clone());
    if k == 0 {
        return Ok(TangentialReport { k, n_k: n, m_k: 0, projected_spec });
    }
    let dims = par_map((0..compiled.len()).collect(), engine.parallel(), |p| {
        let c = &compiled[p];
        let m = center_annihilator(&center, c)?;
        let mut rng = engine.stream("tangential", p, k);
        // The center lies in the span of the variety; when it exhausts that span
        // there is nothing left to project to.
        if c.ncoords() - m.rows() >= span_dim(c, c.ncoords() + 2, &mut rng)? {
            return Err(Error::FillsAmbient(k));
        }
        projected_dim(c, &m, engine.trials(), &mut rng)
    });
    let n_k = dims.into_iter().collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
    Ok(TangentialReport { k, n_k, m_k: n - n_k.min(n), projected_spec })
}

/// Generic fiber dimension of the Gauss map of a parametrized variety.
///
/// The differential of `t -> T_t` is read in `Hom(T, V/T)`: each parameter
/// direction `j` sends the generator `dF/dt_i` to `d2F/dt_j dt_i` modulo `T`.
pub fn gauss_fiber_dim_map<R: rand::Rng + ?Sized>(map: &PolyMap, f: &PrimeContext, rng: &mut R) -> Result<usize> {
    let q = map.nvars();
    let second: Vec<Vec<Vec<MPoly>>> = (0..q)
        .map(|i| {
            let di: Vec<MPoly> = map.coords().iter().map(|c| c.partial(i, f)).collect();
            (0..q).map(|j| di.iter().map(|c| c.partial(j, f)).collect()).collect()
        })
        .collect();
    let mut last = Error::SingularSample;
    for _ in 0..crate::variety::SAMPLE_ATTEMPTS {
        let t = f.random_vec(q, rng);
        let j = map.jacobian_rows(&t, f);
        if j.row(0).iter().all(|x| x.is_zero()) {
            last = Error::SingularSample;
            continue;
        }
        let mut basis = EchelonBasis::new(map.len());
        basis.insert(j.row(0), f);
        let mut gens = Vec::new();
        for i in 0..q {
            if basis.insert(j.row(i + 1), f) {
                gens.push(i);
            }
        }
        let rank_t = basis.rank();
        let ann = basis.to_matrix().kernel_basis(f);
        let mut d = Matrix::zeros(0, gens.len() * ann.rows());
        for jj in 0..q {
            let mut row = Vec::with_capacity(gens.len() * ann.rows());
            for &i in &gens {
                let v: Vec<_> = second[i][jj].iter().map(|c| c.eval(&t, f)).collect();
                row.extend(ann.mul_vec(&v, f));
            }
            d.push_row(&row)?;
        }
        return Ok((rank_t - 1) - d.rank(f).min(rank_t - 1));
    }
    Err(Error::SampleExhausted { attempts: crate::variety::SAMPLE_ATTEMPTS, last: last.to_string() })
}

/// Gauss-map fiber dimension of a fully parametric spec, minimized over trials and primes.
pub fn gauss_fiber_dim(engine: &Engine, spec: &VarietySpec) -> Result<usize> {
    let compiled = engine.compile(spec)?;
    gauss_fiber_dim_compiled(engine, &compiled)
}

pub fn gauss_fiber_dim_compiled(engine: &Engine, compiled: &[Compiled]) -> Result<usize> {
    let maps = compiled.iter().map(|c| c.to_polymap()).collect::<Result<Vec<_>>>()?;
    let dims = par_map(engine.jobs(), engine.parallel(), |(p, t)| {
        let mut rng = engine.stream("gauss", p, t);
        gauss_fiber_dim_map(&maps[p], compiled[p].ctx(), &mut rng)
    });
    Ok(dims.into_iter().collect::<Result<Vec<_>>>()?.into_iter().min().unwrap_or(0))
}

/// Shape of the image of the `k`-tangential projection, as a proxy for the
/// contact locus.
pub fn contact_shape(engine: &Engine, spec: &VarietySpec, k: usize) -> Result<ContactShape> {
    let tp = tangential_projection(engine, spec, k)?;
    contact_shape_from(engine, &tp)
}

pub fn contact_shape_from(engine: &Engine, tp: &TangentialReport) -> Result<ContactShape> {
    let classification = match tp.n_k {
        1 => ContactClass::DivisorViaCurveImage,
        2 if tp.projected_spec.is_parametric() => {
            let compiled = engine.compile(&tp.projected_spec)?;
            if gauss_fiber_dim_compiled(engine, &compiled)? > 0 {
                ContactClass::DivisorViaDevelopableImage
            } else {
                ContactClass::NotDivisorial
            }
        }
        _ => ContactClass::Indeterminate,
    };
    Ok(ContactShape { classification, gamma_lower: tp.m_k })
}
