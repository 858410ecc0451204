//! Generators and property checks shared by the property suite and the
//! acceptance run.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rand::Rng;
use secant_core::field::PRIME_BITS;
use secant_core::linalg::EchelonBasis;
use secant_core::mpoly::{monomial_exponents, MPoly, PolyMap};
use secant_core::rng::{label, stream, StreamRng};
use secant_core::terracini::secant_dim;
use secant_core::{Center, Engine, FieldElement as Fe, IntPoly, Matrix, PrimeContext, VarietySpec};

pub const PROPERTY_SEED: u64 = 0x00c0_ffee_2024;

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(PROPERTY_SEED), failure_persistence: None, ..Config::default() }
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(config(cases))
}

pub fn prime(seed: u64) -> PrimeContext {
    PrimeContext::random(PRIME_BITS, seed, &mut stream(seed, &[label("test-prime")])).unwrap()
}

pub fn rng(seed: u64, tag: &str) -> StreamRng {
    stream(seed, &[label(tag)])
}

/// Naive rank with `u128` products and Fermat inverses, independent of `Matrix::rank`.
pub fn naive_rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let powm = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, a);
            }
            a = mulm(a, a);
            e >>= 1;
        }
        r
    };
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = powm(m[rank][c], p - 2);
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let factor = mulm(m[i][c], inv);
                for j in 0..cols {
                    let sub = mulm(factor, m[rank][j]);
                    m[i][j] = (m[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn values(m: &Matrix) -> Vec<Vec<u64>> {
    m.iter_rows().map(|r| r.iter().map(|x| x.value()).collect()).collect()
}

/// A `rows x cols` matrix of rank at most `rank`, as a product of random factors.
pub fn low_rank(f: &PrimeContext, rows: usize, cols: usize, rank: usize, rng: &mut StreamRng) -> Matrix {
    let a = random_matrix(f, rows, rank, rng);
    let b = random_matrix(f, rank, cols, rng);
    a.mul(&b, f).unwrap()
}

pub fn random_matrix(f: &PrimeContext, rows: usize, cols: usize, rng: &mut StreamRng) -> Matrix {
    let data = (0..rows).map(|_| f.random_vec(cols, rng)).collect();
    Matrix::from_rows(data, cols).unwrap()
}

pub fn random_poly(f: &PrimeContext, nvars: usize, deg: u32, terms: usize, rng: &mut StreamRng) -> MPoly {
    let terms: Vec<_> = (0..terms)
        .map(|_| {
            let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=deg)).collect();
            (e, f.random_element(rng))
        })
        .collect();
    MPoly::from_terms(nvars, terms, f)
}

pub fn random_form(f: &PrimeContext, nvars: usize, deg: u32, rng: &mut StreamRng) -> MPoly {
    let terms: Vec<_> = monomial_exponents(nvars, deg).into_iter().map(|e| (e, f.random_element(rng))).collect();
    MPoly::from_terms(nvars, terms, f)
}

/// Integer polynomial in `nvars` variables with every monomial of degree at most `deg`.
pub fn random_int_poly(nvars: usize, deg: u32, rng: &mut StreamRng) -> IntPoly {
    let mut p = IntPoly::zero();
    for d in 0..=deg {
        for e in monomial_exponents(nvars, d) {
            p = p.add(&IntPoly::monomial(&e, rng.gen_range(-9..=9)));
        }
    }
    p
}

/// Affine parametrization `1, t_1, ..., t_m, extra random polynomials`.
pub fn random_parametric(m: usize, extra: usize, deg: u32, rng: &mut StreamRng) -> Vec<IntPoly> {
    let mut coords = vec![IntPoly::constant(1)];
    coords.extend((0..m).map(IntPoly::var));
    coords.extend((0..extra).map(|_| random_int_poly(m, deg, rng)));
    coords
}

fn leaf(rng: &mut StreamRng) -> VarietySpec {
    match rng.gen_range(0..5) {
        0 => VarietySpec::linear(rng.gen_range(1..=2)),
        1 => {
            let blocks = rng.gen_range(1..=2);
            let degrees: Vec<u32> = (0..blocks).map(|_| rng.gen_range(1..=2)).collect();
            VarietySpec::scroll(&degrees)
        }
        2 => VarietySpec::rational_normal_curve(rng.gen_range(2..=4)),
        3 => {
            let extra = rng.gen_range(1..=3);
            VarietySpec::Parametric { coords: random_parametric(1, extra, 3, rng), nvars: Some(1) }
        }
        _ => {
            let mut g = IntPoly::zero();
            for e in monomial_exponents(4, rng.gen_range(2..=3)) {
                g = g.add(&IntPoly::monomial(&e, rng.gen_range(-9..=9)));
            }
            VarietySpec::hypersurface(3, g)
        }
    }
}

fn ncoords(spec: &VarietySpec) -> Option<(usize, usize)> {
    let c = spec.compile(&prime(1)).ok()?;
    Some((c.ncoords(), c.dim()))
}

/// Random constructor tree of depth at most `depth`, kept below 30 coordinates.
pub fn random_tree(depth: usize, rng: &mut StreamRng) -> VarietySpec {
    if depth == 0 {
        return leaf(rng);
    }
    let child = random_tree(depth - 1, rng);
    let Some((nc, dim)) = ncoords(&child) else { return leaf(rng) };
    let candidate = match rng.gen_range(0..5) {
        0 if nc <= 5 => VarietySpec::veronese(child, 2),
        1 => VarietySpec::segre(child, leaf(rng)),
        2 => VarietySpec::cone(child, rng.gen_range(0..=1)),
        3 if nc >= dim + 3 => VarietySpec::project(child, Center::Random { dim: 0, seed: rng.gen() }),
        _ => child,
    };
    match ncoords(&candidate) {
        Some((nc, _)) if nc < 30 => candidate,
        _ => leaf(rng),
    }
}

// Property checks. Each takes a seed and draws everything else from it.

/// `sum_i x_i dF/dx_i = d F` for a random form `F` of degree `d`.
pub fn check_euler(seed: u64, nvars: usize, deg: u32) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let mut rng = rng(seed, "euler");
    let g = random_form(&f, nvars, deg, &mut rng);
    let x = f.random_vec(nvars, &mut rng);
    let grad = g.gradient(&f);
    let lhs = (0..nvars).fold(f.zero(), |acc, i| f.mul_add(acc, x[i], grad[i].eval(&x, &f)));
    let rhs = f.mul(f.from_u64(deg as u64), g.eval(&x, &f));
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `d(gh) = g dh + h dg`, checked as polynomials and at a random point.
pub fn check_leibniz(seed: u64, nvars: usize, deg: u32) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let mut rng = rng(seed, "leibniz");
    let g = random_poly(&f, nvars, deg, 5, &mut rng);
    let h = random_poly(&f, nvars, deg, 5, &mut rng);
    let x = f.random_vec(nvars, &mut rng);
    let gh = g.multiply(&h, &f);
    for i in 0..nvars {
        let lhs = gh.partial(i, &f);
        let rhs = g.multiply(&h.partial(i, &f), &f).add(&h.multiply(&g.partial(i, &f), &f), &f);
        prop_assert_eq!(&lhs, &rhs);
        let at = f.add(
            f.mul(g.eval(&x, &f), h.partial(i, &f).eval(&x, &f)),
            f.mul(h.eval(&x, &f), g.partial(i, &f).eval(&x, &f)),
        );
        prop_assert_eq!(lhs.eval(&x, &f), at);
    }
    Ok(())
}

/// Evaluation is a ring homomorphism.
pub fn check_eval_hom(seed: u64, nvars: usize, deg: u32) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let mut rng = rng(seed, "eval");
    let g = random_poly(&f, nvars, deg, 6, &mut rng);
    let h = random_poly(&f, nvars, deg, 6, &mut rng);
    let x = f.random_vec(nvars, &mut rng);
    let (gx, hx) = (g.eval(&x, &f), h.eval(&x, &f));
    prop_assert_eq!(g.add(&h, &f).eval(&x, &f), f.add(gx, hx));
    prop_assert_eq!(g.multiply(&h, &f).eval(&x, &f), f.mul(gx, hx));
    prop_assert_eq!(g.sub(&g, &f).is_zero(), true);
    Ok(())
}

/// The Jacobian rows of `M * F` are the Jacobian rows of `F` times `M^T`.
pub fn check_linear_composition(seed: u64, nvars: usize, len: usize, out: usize) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let mut rng = rng(seed, "compose");
    let coords: Vec<MPoly> = (0..len).map(|_| random_poly(&f, nvars, 3, 4, &mut rng)).collect();
    let map = PolyMap::new(nvars, coords).unwrap();
    let m = random_matrix(&f, out, len, &mut rng);
    let t = f.random_vec(nvars, &mut rng);
    let lhs = map.compose_linear(&m, &f).unwrap().jacobian_rows(&t, &f);
    let rhs = map.jacobian_rows(&t, &f).mul(&m.transpose(), &f).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Rank agrees with a naive elimination and is invariant under row
/// permutations and nonzero row scalings.
pub fn check_rank(seed: u64, rows: usize, cols: usize, rank: usize) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let mut rng = rng(seed, "rank");
    let m = low_rank(&f, rows, cols, rank, &mut rng);
    let r = m.rank(&f);
    prop_assert_eq!(r, naive_rank(&values(&m), f.modulus()));
    prop_assert!(r <= rank.min(rows).min(cols));
    let mut shuffled = m.to_rows();
    for i in (1..shuffled.len()).rev() {
        let j = rng.gen_range(0..=i);
        shuffled.swap(i, j);
    }
    for row in shuffled.iter_mut() {
        let c = f.random_nonzero(&mut rng);
        row.iter_mut().for_each(|x| *x = f.mul(*x, c));
    }
    prop_assert_eq!(Matrix::from_rows(shuffled, cols).unwrap().rank(&f), r);
    Ok(())
}

/// `max(rank A, rank B) <= rank [A; B] <= rank A + rank B`.
pub fn check_stack(seed: u64, cols: usize, ra: usize, rb: usize) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let mut rng = rng(seed, "stack");
    let a = low_rank(&f, ra + 1, cols, ra, &mut rng);
    let b = low_rank(&f, rb + 2, cols, rb, &mut rng);
    let (x, y) = (a.rank(&f), b.rank(&f));
    let s = a.stack(&b).unwrap().rank(&f);
    prop_assert!(x.max(y) <= s && s <= x + y);
    Ok(())
}

/// Kernel vectors are annihilated, independent, and complete the rank.
pub fn check_kernel(seed: u64, rows: usize, cols: usize, rank: usize) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let mut rng = rng(seed, "kernel");
    let m = low_rank(&f, rows, cols, rank, &mut rng);
    let k = m.kernel_basis(&f);
    prop_assert_eq!(k.cols(), cols);
    for v in k.iter_rows() {
        prop_assert!(m.mul_vec(v, &f).iter().all(|x| x.is_zero()));
    }
    prop_assert_eq!(naive_rank(&values(&k), f.modulus()), k.rows());
    prop_assert_eq!(k.rows() + m.rank(&f), cols);
    Ok(())
}

/// `a * a^(-1) = 1` for nonzero `a`.
pub fn check_inverse(seed: u64) -> Result<(), TestCaseError> {
    let f = prime(seed);
    let a = f.random_nonzero(&mut rng(seed, "inverse"));
    let inv = f.inv(a).unwrap();
    prop_assert_eq!(f.mul(a, inv), f.one());
    prop_assert!(f.inv(f.zero()).is_none());
    Ok(())
}

/// A sampled frame on a random tree has rank `dim + 1` and contains its point.
pub fn check_frame(seed: u64, depth: usize) -> Result<(), TestCaseError> {
    let spec = random_tree(depth, &mut rng(seed, "tree"));
    let f = prime(seed);
    let c = spec.compile(&f).map_err(|e| TestCaseError::fail(format!("{spec:?}: {e}")))?;
    if let Some(d) = spec.declared_dim() {
        prop_assert_eq!(c.dim(), d, "{:?}", spec);
    }
    let mut r = rng(seed, "frame");
    for _ in 0..2 {
        let pf = c.sample(&mut r).map_err(|e| TestCaseError::fail(format!("{spec:?}: {e}")))?;
        prop_assert_eq!(pf.frame.cols(), c.ncoords());
        prop_assert_eq!(naive_rank(&values(&pf.frame), f.modulus()), c.dim() + 1, "{:?}", spec);
        let mut basis = EchelonBasis::new(c.ncoords());
        for row in pf.frame.iter_rows() {
            basis.insert(row, &f);
        }
        prop_assert!(basis.contains(&pf.point, &f));
    }
    Ok(())
}

/// Secant chains of a random tree agree prime by prime.
pub fn check_cross_prime(seed: u64) -> Result<(), TestCaseError> {
    let spec = random_tree(2, &mut rng(seed, "cross"));
    let engine = Engine::with_trials(seed, 2);
    let full = secant_dim(&engine, &spec, 2).map_err(|e| TestCaseError::fail(format!("{spec:?}: {e}")))?;
    prop_assert!(full.agreement, "{:?}", spec);
    for p in engine.primes() {
        let single = Engine::with_primes(seed, 2, vec![*p]);
        let rep = secant_dim(&single, &spec, 2).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&rep.chain, &full.chain, "{:?}", spec);
    }
    Ok(())
}

/// Any point `F(t)` of a random hypersurface sampler satisfies the equation.
pub fn check_hypersurface(seed: u64, deg: u32) -> Result<(), TestCaseError> {
    let mut r = rng(seed, "hyper");
    let mut g = IntPoly::zero();
    for e in monomial_exponents(5, deg) {
        g = g.add(&IntPoly::monomial(&e, r.gen_range(-9..=9)));
    }
    let f = prime(seed);
    let c = VarietySpec::hypersurface(4, g.clone()).compile(&f).unwrap();
    let gf = g.to_field(5, &f).unwrap();
    for _ in 0..3 {
        let pf = c.sample(&mut r).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(gf.eval(&pf.point, &f).is_zero());
        let grad: Vec<Fe> = gf.gradient(&f).iter().map(|d| d.eval(&pf.point, &f)).collect();
        for row in pf.frame.iter_rows() {
            prop_assert!(f.dot(&grad, row).is_zero());
        }
    }
    Ok(())
}

/// Runs `check` on `cases` seeds drawn by a pinned runner.
pub fn run_seeded<F>(cases: u32, check: F) -> Result<(), String>
where
    F: Fn(u64) -> Result<(), TestCaseError>,
{
    runner(cases).run(&any::<u64>(), |s| check(s)).map_err(|e| e.to_string())
}

// Cone laws.

/// A random base variety: an affine parametrization in `m` variables.
pub struct Base {
    pub m: usize,
    pub coords: Vec<IntPoly>,
}

impl Base {
    pub fn spec(&self) -> VarietySpec {
        VarietySpec::Parametric { coords: self.coords.clone(), nvars: Some(self.m) }
    }
}

/// Three random bases: a curve spanning P^10, a surface whose secants fill
/// quickly, and a surface spanning P^16.
pub fn cone_bases(seed: u64) -> Vec<Base> {
    let mut r = rng(seed, "cone-bases");
    [(1, 9, 10), (2, 5, 3), (2, 14, 5)]
        .into_iter()
        .map(|(m, extra, deg)| Base { m, coords: random_parametric(m, extra, deg, &mut r) })
        .collect()
}

/// `X` swept by lines joining the base to a vertex `P^s`, so that `X` projects
/// from the vertex onto the base with one dimension less.
pub fn ruled_over(base: &Base, s: usize, rng: &mut StreamRng) -> VarietySpec {
    let vertex = (0..=s).map(|_| random_int_poly(base.m, 2, rng)).collect();
    VarietySpec::ruled_join(base.coords.clone(), vertex)
}

/// `X` swept by planes joining the base to a pencil of points of a vertex
/// `P^(2s)`, so that `X` projects from the vertex with two dimensions less.
pub fn fibered_over(base: &Base, s: usize, rng: &mut StreamRng) -> VarietySpec {
    let vertex = (0..=2 * s).map(|_| random_int_poly(base.m + 1, 2, rng)).collect();
    VarietySpec::fibered_join(base.coords.clone(), vertex)
}

/// Checks `s^(k)(X) = s^(k)(Y) + shift` for `from_k <= k <= k_max`.
pub fn check_cone_law(engine: &Engine, x: &VarietySpec, y: &VarietySpec, shift: usize, from_k: usize, k_max: usize) -> Result<(), String> {
    let cx = secant_dim(engine, x, k_max).map_err(|e| e.to_string())?;
    let cy = secant_dim(engine, y, k_max).map_err(|e| e.to_string())?;
    for k in from_k..=k_max {
        if cx.chain[k] != cy.chain[k] + shift {
            return Err(format!("k={k}: s(X)={} but s(Y)+{shift}={}", cx.chain[k], cy.chain[k] + shift));
        }
    }
    Ok(())
}

// Chain law.

/// Specs with a scan bound for the chain law.
pub fn chain_corpus() -> Vec<(String, VarietySpec, usize)> {
    use secant_core::catalog::{build_family, Family};
    let cubic: IntPoly = "x0^3 + x1^3 + x2^3 + x3^3 + x4^3 - 2*x0*x1*x2 + x2*x3*x4".parse().unwrap();
    let mut corpus = vec![
        ("rnc5".to_string(), VarietySpec::rational_normal_curve(5), 3),
        ("v2(P3)".to_string(), VarietySpec::veronese(VarietySpec::linear(3), 2), 3),
        ("v2(scroll 1,1,1)".to_string(), VarietySpec::veronese(VarietySpec::scroll(&[1, 1, 1]), 2), 4),
        ("segre(P1,P2)".to_string(), VarietySpec::segre(VarietySpec::linear(1), VarietySpec::linear(2)), 2),
        ("cubic threefold".to_string(), VarietySpec::hypersurface(4, cubic), 1),
        ("cone(rnc3,1)".to_string(), VarietySpec::cone(VarietySpec::rational_normal_curve(3), 1), 2),
    ];
    for (family, k, variant) in [
        (Family::F1, 2, "point"),
        (Family::F7, 2, "i1"),
        (Family::F11, 2, "default"),
        (Family::F13, 2, "full"),
        (Family::F14, 2, "secant"),
        (Family::ExTerracini13, 4, "default"),
    ] {
        let e = build_family(family, k, Some(variant)).unwrap();
        corpus.push((e.key(), e.spec, k + 1));
    }
    corpus
}

/// Checks `s^(h) = n_h + s^(h-1) + 1` for `1 <= h <= bound` wherever the
/// `h`-tangential projection exists.
pub fn check_chain_law(engine: &Engine, spec: &VarietySpec, bound: usize) -> Result<usize, String> {
    use secant_core::terracini::tangential_projection;
    let rep = secant_dim(engine, spec, bound).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for h in 1..=bound {
        match tangential_projection(engine, spec, h) {
            Ok(tp) => {
                if rep.chain[h] != tp.n_k + rep.chain[h - 1] + 1 {
                    return Err(format!("h={h}: chain {:?}, n_h={}", rep.chain, tp.n_k));
                }
                checked += 1;
            }
            Err(secant_core::Error::FillsAmbient(_)) if rep.chain[h - 1] == rep.r => {}
            Err(e) => return Err(format!("h={h}: {e}")),
        }
    }
    Ok(checked)
}

// Hilbert bound.

pub fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Degree-two Hilbert value of a variety of minimal degree, by counting:
/// a rational normal scroll with block degrees `a_i` and `c` blocks has
/// `h(2) = sum over pairs i <= j of (a_i + a_j + 1)`, the number of monomials
/// `t^e u_i u_j` with `e <= a_i + a_j`.
pub fn scroll_h2(degrees: &[u32]) -> usize {
    let mut total = 0;
    for i in 0..degrees.len() {
        for j in i..degrees.len() {
            total += (degrees[i] + degrees[j] + 1) as usize;
        }
    }
    total
}

/// `iota + r(n+1) - n(n-1)/2 + 1` with `iota = min(d + n - r - 1, r - n)`.
pub fn bound_formula(r: usize, n: usize, d: usize) -> usize {
    let iota = (d + n).saturating_sub(r + 1).min(r - n);
    iota + r * (n + 1) - n * (n.saturating_sub(1)) / 2 + 1
}

/// Minimal degree specs paired with `(r, n, d)`.
pub fn minimal_degree_cases() -> Vec<(String, VarietySpec, usize, usize, usize)> {
    let mut cases = Vec::new();
    for d in 2..=8u32 {
        cases.push((format!("rnc{d}"), VarietySpec::rational_normal_curve(d), d as usize, 1, d as usize));
    }
    for degrees in [vec![1, 1], vec![2, 1], vec![3, 2], vec![1, 1, 1], vec![2, 1, 1], vec![2, 2, 1], vec![2, 2, 2, 1]] {
        let d: u32 = degrees.iter().sum();
        let n = degrees.len();
        let r = d as usize + n - 1;
        cases.push((format!("scroll{degrees:?}"), VarietySpec::scroll(&degrees), r, n, d as usize));
    }
    cases
}

/// A cone with vertex a line over the projection to `P^(r-3)` of the
/// rational normal curve of degree `r - 2`.
pub fn line_cone_over_curve(r: usize) -> VarietySpec {
    let c = VarietySpec::project(VarietySpec::rational_normal_curve(r as u32 - 2), Center::Random { dim: 0, seed: 7 + r as u64 });
    VarietySpec::cone(c, 1)
}
