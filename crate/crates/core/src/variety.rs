//! Projective varieties as constructor trees, and their samplers.
//!
//! A [`VarietySpec`] is prime independent: every coefficient is an integer and
//! every random choice is pinned by a seed. [`VarietySpec::compile`] reduces it
//! modulo a prime into a [`Compiled`] tree whose `sample` returns a point of
//! the affine cone together with a frame spanning the affine tangent space.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeContext};
use crate::linalg::{EchelonBasis, Matrix};
use crate::mpoly::{monomial_exponents, IntPoly, Jet, MPoly, PolyMap};
use crate::rng::{label, stream};
use crate::upoly::UPoly;

type Fe = FieldElement;

/// Attempts made by [`Compiled::sample`] before giving up.
pub const SAMPLE_ATTEMPTS: usize = 32;

/// Where a projection center comes from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Center {
    /// Integer points spanning the center, in the child's coordinates.
    Explicit { rows: Vec<Vec<i64>> },
    /// `dim + 1` random integer points of the child's ambient space.
    Random { dim: usize, seed: u64 },
    /// Points sampled on the child together with general points of its span.
    Span { on_variety: usize, generic: usize, seed: u64 },
    /// Span of the tangent spaces at `count` general points of the child.
    Tangent { count: usize, seed: u64 },
}

/// Constructor tree of a projective variety.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum VarietySpec {
    /// The whole of P^dim.
    Linear { dim: usize },
    /// Affine parametrization in variables `x0, x1, ...`.
    Parametric {
        coords: Vec<IntPoly>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nvars: Option<usize>,
    },
    /// Rational normal scroll with the given block degrees.
    Scroll { degrees: Vec<u32> },
    Hypersurface {
        equation: IntPoly,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ambient: Option<usize>,
    },
    /// Intersection of the smooth quadric `x0*x5 - x1*x4 + x2*x3` in P^5 with `equation`.
    OnQuadric { equation: IntPoly },
    Veronese { d: u32, child: Box<VarietySpec> },
    Segre { left: Box<VarietySpec>, right: Box<VarietySpec> },
    Cone { vertex_dim: usize, child: Box<VarietySpec> },
    Project { center: Center, child: Box<VarietySpec> },
    /// `(s, t) -> s * left(t) + right(t)` on complementary coordinate blocks.
    RuledJoin { left: Vec<IntPoly>, right: Vec<IntPoly> },
    /// Like `RuledJoin`, with `right` depending on extra fiber parameters.
    FiberedJoin { left: Vec<IntPoly>, right: Vec<IntPoly> },
    /// Image of `child` under homogeneous forms in its coordinates.
    Lift { coords: Vec<IntPoly>, child: Box<VarietySpec> },
    /// Joins each point `y` of `child` to `right(y)`: points `a * left(y) + b * right(y)`.
    JoinOver { left: Vec<IntPoly>, right: Vec<IntPoly>, child: Box<VarietySpec> },
}

impl VarietySpec {
    pub fn linear(dim: usize) -> Self {
        VarietySpec::Linear { dim }
    }

    pub fn scroll(degrees: &[u32]) -> Self {
        VarietySpec::Scroll { degrees: degrees.to_vec() }
    }

    /// Rational normal curve of degree `d`.
    pub fn rational_normal_curve(d: u32) -> Self {
        VarietySpec::scroll(&[d])
    }

    pub fn parametric(coords: Vec<IntPoly>) -> Self {
        VarietySpec::Parametric { coords, nvars: None }
    }

    pub fn hypersurface(ambient: usize, equation: IntPoly) -> Self {
        VarietySpec::Hypersurface { equation, ambient: Some(ambient) }
    }

    pub fn on_quadric(equation: IntPoly) -> Self {
        VarietySpec::OnQuadric { equation }
    }

    pub fn veronese(child: VarietySpec, d: u32) -> Self {
        VarietySpec::Veronese { d, child: Box::new(child) }
    }

    pub fn segre(left: VarietySpec, right: VarietySpec) -> Self {
        VarietySpec::Segre { left: Box::new(left), right: Box::new(right) }
    }

    pub fn cone(child: VarietySpec, vertex_dim: usize) -> Self {
        VarietySpec::Cone { vertex_dim, child: Box::new(child) }
    }

    pub fn project(child: VarietySpec, center: Center) -> Self {
        VarietySpec::Project { center, child: Box::new(child) }
    }

    pub fn ruled_join(left: Vec<IntPoly>, right: Vec<IntPoly>) -> Self {
        VarietySpec::RuledJoin { left, right }
    }

    pub fn fibered_join(base: Vec<IntPoly>, fiber: Vec<IntPoly>) -> Self {
        VarietySpec::FiberedJoin { left: base, right: fiber }
    }

    pub fn lift(child: VarietySpec, coords: Vec<IntPoly>) -> Self {
        VarietySpec::Lift { coords, child: Box::new(child) }
    }

    pub fn join_over(child: VarietySpec, left: Vec<IntPoly>, right: Vec<IntPoly>) -> Self {
        VarietySpec::JoinOver { left, right, child: Box::new(child) }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Structural projective dimension; `None` where it is only known after
    /// compiling (projections).
    pub fn declared_dim(&self) -> Option<usize> {
        use VarietySpec::*;
        Some(match self {
            Linear { dim } => *dim,
            Parametric { coords, nvars } => nvars.unwrap_or_else(|| max_vars(coords)),
            Scroll { degrees } => degrees.len(),
            Hypersurface { equation, ambient } => ambient.unwrap_or(equation.min_vars().saturating_sub(1)).checked_sub(1)?,
            OnQuadric { .. } => 3,
            Veronese { child, .. } | Lift { child, .. } => child.declared_dim()?,
            Segre { left, right } => left.declared_dim()? + right.declared_dim()?,
            Cone { vertex_dim, child } => child.declared_dim()? + vertex_dim + 1,
            Project { .. } => return None,
            RuledJoin { left, right } | FiberedJoin { left, right } => max_vars(left).max(max_vars(right)) + 1,
            JoinOver { child, .. } => child.declared_dim()? + 1,
        })
    }

    /// Degree where the constructor determines it.
    pub fn declared_degree(&self) -> Option<u64> {
        use VarietySpec::*;
        match self {
            Linear { .. } => Some(1),
            Scroll { degrees } => Some(degrees.iter().map(|&d| d as u64).sum()),
            Hypersurface { equation, .. } => Some(equation.total_degree() as u64),
            OnQuadric { equation } => Some(2 * equation.total_degree() as u64),
            Veronese { d, child } => {
                let n = child.declared_dim()? as u32;
                Some((*d as u64).pow(n) * child.declared_degree()?)
            }
            _ => None,
        }
    }

    /// Whether every node admits a global polynomial parametrization.
    pub fn is_parametric(&self) -> bool {
        use VarietySpec::*;
        match self {
            Hypersurface { .. } | OnQuadric { .. } => false,
            Linear { .. } | Parametric { .. } | Scroll { .. } | RuledJoin { .. } | FiberedJoin { .. } => true,
            Veronese { child, .. } | Cone { child, .. } | Project { child, .. } | Lift { child, .. } | JoinOver { child, .. } => {
                child.is_parametric()
            }
            Segre { left, right } => left.is_parametric() && right.is_parametric(),
        }
    }

    /// Reduces the tree modulo the prime of `f`.
    pub fn compile(&self, f: &PrimeContext) -> Result<Compiled> {
        use VarietySpec::*;
        let f = *f;
        let node_parametric = |map: PolyMap, dim: usize| -> Result<Compiled> {
            let ncoords = map.len();
            Ok(Compiled { node: Node::Parametric(map), dim, ncoords, ctx: f })
        };
        match self {
            Linear { dim } => {
                let mut coords = vec![IntPoly::constant(1)];
                coords.extend((0..*dim).map(IntPoly::var));
                node_parametric(int_map(&coords, *dim, &f)?, *dim)
            }
            Parametric { coords, nvars } => {
                let n = nvars.unwrap_or_else(|| max_vars(coords));
                node_parametric(int_map(coords, n, &f)?, n)
            }
            Scroll { degrees } => {
                if degrees.is_empty() || degrees.iter().sum::<u32>() == 0 {
                    return Err(Error::InvalidSpec("scroll needs a positive total degree".into()));
                }
                node_parametric(int_map(&scroll_coords(degrees), degrees.len(), &f)?, degrees.len())
            }
            RuledJoin { left, right } | FiberedJoin { left, right } => {
                let n = max_vars(left).max(max_vars(right));
                if left.is_empty() || right.is_empty() {
                    return Err(Error::InvalidSpec("join needs two nonempty maps".into()));
                }
                let s = IntPoly::var(n);
                let mut coords: Vec<IntPoly> = left.iter().map(|p| p.mul(&s)).collect();
                coords.extend(right.iter().cloned());
                node_parametric(int_map(&coords, n + 1, &f)?, n + 1)
            }
            Hypersurface { equation, ambient } => {
                let m = ambient.unwrap_or(equation.min_vars().saturating_sub(1));
                if m == 0 || equation.is_zero() || !equation.is_homogeneous() || equation.total_degree() == 0 {
                    return Err(Error::InvalidSpec("hypersurface needs a nonconstant homogeneous equation in at least two variables".into()));
                }
                let g = equation.to_field(m + 1, &f)?;
                let grad = g.gradient(&f);
                Ok(Compiled { node: Node::Hypersurface { g, grad }, dim: m - 1, ncoords: m + 1, ctx: f })
            }
            OnQuadric { equation } => {
                if equation.is_zero() || !equation.is_homogeneous() {
                    return Err(Error::InvalidSpec("on_quadric needs a homogeneous equation".into()));
                }
                let eq = equation.to_field(6, &f)?;
                let chart = quadric_chart(&f)?;
                Ok(Compiled { node: Node::Restricted { chart, eq }, dim: 3, ncoords: 6, ctx: f })
            }
            Veronese { d, child } => {
                if *d == 0 {
                    return Err(Error::InvalidSpec("veronese degree must be positive".into()));
                }
                let c = child.compile(&f)?;
                let coords = monomial_exponents(c.ncoords, *d).into_iter().map(|e| MPoly::monomial(e, Fe::ONE)).collect();
                Ok(Compiled::lift(c, coords))
            }
            Lift { coords, child } => {
                let c = child.compile(&f)?;
                check_forms(coords, "lift")?;
                let coords = coords.iter().map(|p| p.to_field(c.ncoords, &f)).collect::<Result<Vec<_>>>()?;
                Ok(Compiled::lift(c, coords))
            }
            Segre { left, right } => {
                let a = left.compile(&f)?;
                let b = right.compile(&f)?;
                let (dim, ncoords) = (a.dim + b.dim, a.ncoords * b.ncoords);
                Ok(Compiled { node: Node::Segre(Box::new(a), Box::new(b)), dim, ncoords, ctx: f })
            }
            Cone { vertex_dim, child } => {
                let c = child.compile(&f)?;
                let (dim, ncoords) = (c.dim + vertex_dim + 1, c.ncoords + vertex_dim + 1);
                Ok(Compiled { node: Node::Cone { child: Box::new(c), v: *vertex_dim }, dim, ncoords, ctx: f })
            }
            Project { center, child } => {
                let c = child.compile(&f)?;
                let m = center_annihilator(center, &c)?;
                Compiled::projection(c, m)
            }
            JoinOver { left, right, child } => {
                let c = child.compile(&f)?;
                check_forms(left, "join_over left")?;
                check_forms(right, "join_over right")?;
                let l = left.iter().map(|p| p.to_field(c.ncoords, &f)).collect::<Result<Vec<_>>>()?;
                let r = right.iter().map(|p| p.to_field(c.ncoords, &f)).collect::<Result<Vec<_>>>()?;
                let (dim, ncoords) = (c.dim + 1, l.len() + r.len());
                Ok(Compiled { node: Node::Join { child: Box::new(c), left: l, right: r }, dim, ncoords, ctx: f })
            }
        }
    }
}

fn max_vars(coords: &[IntPoly]) -> usize {
    coords.iter().map(|p| p.min_vars()).max().unwrap_or(0)
}

fn int_map(coords: &[IntPoly], nvars: usize, f: &PrimeContext) -> Result<PolyMap> {
    let c = coords.iter().map(|p| p.to_field(nvars, f)).collect::<Result<Vec<_>>>()?;
    PolyMap::new(nvars, c)
}

fn check_forms(coords: &[IntPoly], what: &str) -> Result<()> {
    if coords.is_empty() || coords.iter().all(|p| p.is_zero()) {
        return Err(Error::InvalidSpec(format!("{what}: no nonzero coordinates")));
    }
    let degs: Vec<u32> = coords.iter().filter(|p| !p.is_zero()).map(|p| p.total_degree()).collect();
    if coords.iter().any(|p| !p.is_homogeneous()) || degs.iter().any(|&d| d != degs[0]) || degs[0] == 0 {
        return Err(Error::InvalidSpec(format!("{what}: coordinates must be forms of one positive degree")));
    }
    Ok(())
}

/// Affine parametrization of a scroll: `x0` is the base parameter, `x1, ...` the fiber ones.
pub fn scroll_coords(degrees: &[u32]) -> Vec<IntPoly> {
    let t = IntPoly::var(0);
    let mut out = Vec::new();
    for (i, &a) in degrees.iter().enumerate() {
        let head = if i == 0 { IntPoly::constant(1) } else { IntPoly::var(i) };
        let mut m = head;
        for _ in 0..=a {
            out.push(m.clone());
            m = m.mul(&t);
        }
    }
    out
}

/// Chart `(1, u0, u1, u2, u3, u0*u3 - u1*u2)` of the quadric `x0*x5 - x1*x4 + x2*x3 = 0`.
fn quadric_chart(f: &PrimeContext) -> Result<PolyMap> {
    let coords: Vec<IntPoly> = ["1", "x0", "x1", "x2", "x3", "x0*x3 - x1*x2"]
        .iter()
        .map(|s| s.parse().expect("static polynomial"))
        .collect();
    int_map(&coords, 4, f)
}

/// Linear forms cutting out the center: rows `v` with `A v = 0` for the center points `A`.
pub(crate) fn center_annihilator(center: &Center, child: &Compiled) -> Result<Matrix> {
    let f = child.ctx;
    let n = child.ncoords;
    let points = match center {
        Center::Explicit { rows } => {
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidSpec(format!("center rows must have {n} entries")));
            }
            let v = rows.iter().map(|r| r.iter().map(|&x| f.from_i128(x as i128)).collect()).collect();
            Matrix::from_rows(v, n)?
        }
        Center::Random { dim, seed } => {
            // integer entries, identical for every prime
            let mut rng = stream(*seed, &[label("random-center")]);
            let v = (0..=*dim)
                .map(|_| (0..n).map(|_| f.from_i128(rng.gen_range(-(1i128 << 20)..=1 << 20))).collect())
                .collect();
            Matrix::from_rows(v, n)?
        }
        Center::Span { on_variety, generic, seed } => {
            let mut rng = stream(*seed, &[label("span-center"), f.modulus()]);
            let mut a = Matrix::zeros(0, n);
            for _ in 0..*on_variety {
                a.push_row(&child.sample_point(&mut rng)?)?;
            }
            if *generic > 0 {
                let pool: Vec<Vec<Fe>> = (0..n + 2).map(|_| child.sample_point(&mut rng)).collect::<Result<_>>()?;
                for _ in 0..*generic {
                    let mut v = vec![Fe::ZERO; n];
                    for p in &pool {
                        let c = f.random_element(&mut rng);
                        for (x, y) in v.iter_mut().zip(p) {
                            *x = f.mul_add(*x, c, *y);
                        }
                    }
                    a.push_row(&v)?;
                }
            }
            a
        }
        Center::Tangent { count, seed } => {
            let mut rng = stream(*seed, &[label("tangent-center"), f.modulus()]);
            let mut a = Matrix::zeros(0, n);
            for _ in 0..*count {
                a = a.stack(&child.sample(&mut rng)?.frame)?;
            }
            a
        }
    };
    Ok(points.kernel_basis(&f))
}

/// A sampled point of the affine cone and a basis of the tangent space there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFrame {
    pub point: Vec<Fe>,
    pub frame: Matrix,
}

/// A variety tree reduced modulo one prime.
#[derive(Clone, Debug)]
pub struct Compiled {
    node: Node,
    dim: usize,
    ncoords: usize,
    ctx: PrimeContext,
}

#[derive(Clone, Debug)]
enum Node {
    Parametric(PolyMap),
    Hypersurface { g: MPoly, grad: Vec<MPoly> },
    Restricted { chart: PolyMap, eq: MPoly },
    Lift { child: Box<Compiled>, coords: Vec<MPoly> },
    Segre(Box<Compiled>, Box<Compiled>),
    Cone { child: Box<Compiled>, v: usize },
    Project { child: Box<Compiled>, m: Matrix },
    Join { child: Box<Compiled>, left: Vec<MPoly>, right: Vec<MPoly> },
}

/// Raw sample: point plus tangent generators (possibly dependent).
type Raw = (Vec<Fe>, Option<Matrix>);

impl Compiled {
    fn lift(child: Compiled, coords: Vec<MPoly>) -> Compiled {
        let (dim, ctx, ncoords) = (child.dim, child.ctx, coords.len());
        Compiled { node: Node::Lift { child: Box::new(child), coords }, dim, ncoords, ctx }
    }

    /// Projection with annihilator `m`; the image dimension is measured.
    pub fn projection(child: Compiled, m: Matrix) -> Result<Compiled> {
        if m.rows() == 0 {
            return Err(Error::CenterContainsVariety);
        }
        let ctx = child.ctx;
        let mut probe = Compiled { node: Node::Project { child: Box::new(child), m }, dim: 0, ncoords: 0, ctx };
        probe.ncoords = match &probe.node {
            Node::Project { m, .. } => m.rows(),
            _ => unreachable!(),
        };
        let mut rng = stream(ctx.modulus(), &[label("project-probe")]);
        let mut best = 0;
        let mut hits = 0;
        for _ in 0..SAMPLE_ATTEMPTS {
            match probe.raw(&mut rng, true) {
                Ok((_, fr)) => {
                    best = best.max(fr.expect("frame requested").rank(&ctx));
                    hits += 1;
                    if hits == 3 {
                        break;
                    }
                }
                Err(e) if e.is_retryable() => {}
                Err(e) => return Err(e),
            }
        }
        if best <= 1 {
            return Err(Error::CenterContainsVariety);
        }
        probe.dim = best - 1;
        Ok(probe)
    }

    /// Projective dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of homogeneous coordinates of the ambient space, `r + 1`.
    pub fn ncoords(&self) -> usize {
        self.ncoords
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    /// Point and tangent frame, resampling on degenerate draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointFrame> {
        let mut last = Error::SingularSample;
        for _ in 0..SAMPLE_ATTEMPTS {
            match self.sample_frame_once(rng) {
                Ok(pf) => return Ok(pf),
                Err(e) if e.is_retryable() => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(Error::SampleExhausted { attempts: SAMPLE_ATTEMPTS, last: last.to_string() })
    }

    /// A point of the affine cone only; cheaper than [`Compiled::sample`].
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Fe>> {
        self.sample_raw_retry(rng, false).map(|(p, _)| p)
    }

    fn sample_raw_retry<R: Rng + ?Sized>(&self, rng: &mut R, frame: bool) -> Result<Raw> {
        let mut last = Error::SingularSample;
        for _ in 0..SAMPLE_ATTEMPTS {
            match self.raw(rng, frame) {
                Ok(r) if r.0.iter().any(|x| !x.is_zero()) => return Ok(r),
                Ok(_) => last = Error::SingularSample,
                Err(e) if e.is_retryable() => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(Error::SampleExhausted { attempts: SAMPLE_ATTEMPTS, last: last.to_string() })
    }

    fn sample_frame_once<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointFrame> {
        let f = self.ctx;
        let (point, gens) = self.raw(rng, true)?;
        if point.iter().all(|x| x.is_zero()) {
            return Err(Error::SingularSample);
        }
        let gens = gens.expect("frame requested");
        let mut basis = EchelonBasis::new(self.ncoords);
        basis.insert(&point, &f);
        for r in gens.iter_rows() {
            basis.insert(r, &f);
        }
        let rank = basis.rank();
        if rank < self.dim + 1 {
            return Err(Error::SingularSample);
        }
        if rank > self.dim + 1 {
            return Err(Error::InvalidSpec(format!(
                "tangent frame has rank {rank}, larger than dimension {} + 1",
                self.dim
            )));
        }
        Ok(PointFrame { point, frame: basis.to_matrix() })
    }

    fn raw<R: Rng + ?Sized>(&self, rng: &mut R, want: bool) -> Result<Raw> {
        let f = self.ctx;
        match &self.node {
            Node::Parametric(map) => {
                let t = f.random_vec(map.nvars(), rng);
                if want {
                    let j = map.jacobian_rows(&t, &f);
                    Ok((j.row(0).to_vec(), Some(j)))
                } else {
                    Ok((map.eval(&t, &f), None))
                }
            }
            Node::Hypersurface { g, grad } => {
                let n = g.nvars();
                let a = f.random_vec(n, rng);
                let b = f.random_vec(n, rng);
                let deg = g.total_degree() as usize;
                let line = restrict(deg, &f, |lam| g.eval(&axpy(&a, lam, &b, &f), &f));
                let lam = pick_root(&line, &f, rng)?;
                let x = axpy(&a, lam, &b, &f);
                if !want {
                    return Ok((x, None));
                }
                let gv: Vec<Fe> = grad.iter().map(|p| p.eval(&x, &f)).collect();
                if gv.iter().all(|v| v.is_zero()) {
                    return Err(Error::SingularSample);
                }
                let frame = Matrix::from_rows(vec![gv], n)?.kernel_basis(&f);
                Ok((x, Some(frame)))
            }
            Node::Restricted { chart, eq } => {
                let q = chart.nvars();
                let a = f.random_vec(q, rng);
                let b = f.random_vec(q, rng);
                let chart_deg = chart.coords().iter().map(|c| c.total_degree()).max().unwrap_or(1) as usize;
                let deg = eq.total_degree() as usize * chart_deg;
                let line = restrict(deg, &f, |lam| eq.eval(&chart.eval(&axpy(&a, lam, &b, &f), &f), &f));
                let lam = pick_root(&line, &f, rng)?;
                let u = axpy(&a, lam, &b, &f);
                let j = chart.jacobian_rows(&u, &f);
                let x = j.row(0).to_vec();
                if !want {
                    return Ok((x, None));
                }
                // gradient of eq along each chart direction
                let ge = eq.eval_jet(&Jet::along(&x, &drop_first_row(&j)), &f);
                if ge.derivs.iter().all(|v| v.is_zero()) {
                    return Err(Error::SingularSample);
                }
                let dirs = Matrix::from_rows(vec![ge.derivs], q)?.kernel_basis(&f);
                let mut frame = Matrix::zeros(0, self.ncoords);
                frame.push_row(&x)?;
                for w in dirs.iter_rows() {
                    let mut row = vec![Fe::ZERO; self.ncoords];
                    for (i, c) in w.iter().enumerate() {
                        for (k, v) in row.iter_mut().enumerate() {
                            *v = f.mul_add(*v, *c, j.get(i + 1, k));
                        }
                    }
                    frame.push_row(&row)?;
                }
                Ok((x, Some(frame)))
            }
            Node::Lift { child, coords } => {
                let (x, fr) = child.raw(rng, want)?;
                match fr {
                    None => Ok((coords.iter().map(|c| c.eval(&x, &f)).collect(), None)),
                    Some(fr) => {
                        let seeds = Jet::along(&x, &fr);
                        let jets: Vec<Jet> = coords.iter().map(|c| c.eval_jet(&seeds, &f)).collect();
                        Ok(jets_to_raw(&jets, fr.rows()))
                    }
                }
            }
            Node::Segre(a, b) => {
                let (x, fa) = a.raw(rng, want)?;
                let (y, fb) = b.raw(rng, want)?;
                let point = kron(&x, &y, &f);
                let frame = match (fa, fb) {
                    (Some(fa), Some(fb)) => {
                        let mut m = Matrix::zeros(0, self.ncoords);
                        for r in fa.iter_rows() {
                            m.push_row(&kron(r, &y, &f))?;
                        }
                        for r in fb.iter_rows() {
                            m.push_row(&kron(&x, r, &f))?;
                        }
                        Some(m)
                    }
                    _ => None,
                };
                Ok((point, frame))
            }
            Node::Cone { child, v } => {
                let (x, fr) = child.raw(rng, want)?;
                let w = f.random_vec(v + 1, rng);
                let mut point = x.clone();
                point.extend_from_slice(&w);
                let frame = fr.map(|fr| {
                    let mut m = Matrix::zeros(0, self.ncoords);
                    for r in fr.iter_rows() {
                        let mut row = r.to_vec();
                        row.resize(self.ncoords, Fe::ZERO);
                        m.push_row(&row).expect("width");
                    }
                    for j in 0..=*v {
                        let mut row = vec![Fe::ZERO; self.ncoords];
                        row[x.len() + j] = Fe::ONE;
                        m.push_row(&row).expect("width");
                    }
                    m
                });
                Ok((point, frame))
            }
            Node::Project { child, m } => {
                let (x, fr) = child.raw(rng, want)?;
                let point = m.mul_vec(&x, &f);
                if point.iter().all(|v| v.is_zero()) {
                    return Err(Error::SingularSample);
                }
                let frame = fr.map(|fr| {
                    let rows = fr.iter_rows().map(|r| m.mul_vec(r, &f)).collect();
                    Matrix::from_rows(rows, m.rows()).expect("width")
                });
                Ok((point, frame))
            }
            Node::Join { child, left, right } => {
                let (x, fr) = child.raw(rng, want)?;
                let a = f.random_nonzero(rng);
                let b = f.random_nonzero(rng);
                let width = fr.as_ref().map_or(0, |m| m.rows());
                let seeds = match &fr {
                    Some(fr) => Jet::along(&x, fr),
                    None => x.iter().map(|v| Jet::constant(*v, 0)).collect(),
                };
                let lj: Vec<Jet> = left.iter().map(|c| c.eval_jet(&seeds, &f)).collect();
                let rj: Vec<Jet> = right.iter().map(|c| c.eval_jet(&seeds, &f)).collect();
                let mut point: Vec<Fe> = lj.iter().map(|j| f.mul(a, j.value)).collect();
                point.extend(rj.iter().map(|j| f.mul(b, j.value)));
                if !want {
                    return Ok((point, None));
                }
                let nl = lj.len();
                let mut m = Matrix::zeros(0, self.ncoords);
                let mut row = vec![Fe::ZERO; self.ncoords];
                for (k, j) in lj.iter().enumerate() {
                    row[k] = j.value;
                }
                m.push_row(&row)?;
                let mut row = vec![Fe::ZERO; self.ncoords];
                for (k, j) in rj.iter().enumerate() {
                    row[nl + k] = j.value;
                }
                m.push_row(&row)?;
                for i in 0..width {
                    let mut row: Vec<Fe> = lj.iter().map(|j| f.mul(a, j.derivs[i])).collect();
                    row.extend(rj.iter().map(|j| f.mul(b, j.derivs[i])));
                    m.push_row(&row)?;
                }
                Ok((point, Some(m)))
            }
        }
    }

    /// Global polynomial parametrization of the affine cone, if every node has one.
    pub fn to_polymap(&self) -> Result<PolyMap> {
        let f = self.ctx;
        match &self.node {
            Node::Parametric(map) => Ok(map.clone()),
            Node::Hypersurface { .. } | Node::Restricted { .. } => Err(Error::NotParametric),
            Node::Lift { child, coords } => child.to_polymap()?.then(coords, &f),
            Node::Segre(a, b) => {
                let (pa, pb) = (a.to_polymap()?, b.to_polymap()?);
                let (na, nb) = (pa.nvars(), pb.nvars());
                let ia: Vec<usize> = (0..na).collect();
                let ib: Vec<usize> = (na..na + nb).collect();
                let la: Vec<MPoly> = pa.coords().iter().map(|c| c.embed(na + nb, &ia)).collect();
                let lb: Vec<MPoly> = pb.coords().iter().map(|c| c.embed(na + nb, &ib)).collect();
                let coords = la.iter().flat_map(|x| lb.iter().map(move |y| (x, y))).map(|(x, y)| x.multiply(y, &f)).collect();
                PolyMap::new(na + nb, coords)
            }
            Node::Cone { child, v } => {
                let pc = child.to_polymap()?;
                let nc = pc.nvars();
                let total = nc + v + 1;
                let idx: Vec<usize> = (0..nc).collect();
                let mut coords: Vec<MPoly> = pc.coords().iter().map(|c| c.embed(total, &idx)).collect();
                coords.extend((nc..total).map(|i| MPoly::var(total, i)));
                PolyMap::new(total, coords)
            }
            Node::Project { child, m } => child.to_polymap()?.compose_linear(m, &f),
            Node::Join { child, left, right } => {
                let pc = child.to_polymap()?;
                let nc = pc.nvars();
                let idx: Vec<usize> = (0..nc).collect();
                let s = MPoly::var(nc + 1, nc);
                let l = pc.then(left, &f)?;
                let r = pc.then(right, &f)?;
                let mut coords: Vec<MPoly> = l.coords().iter().map(|c| c.embed(nc + 1, &idx).multiply(&s, &f)).collect();
                coords.extend(r.coords().iter().map(|c| c.embed(nc + 1, &idx)));
                PolyMap::new(nc + 1, coords)
            }
        }
    }
}

fn drop_first_row(m: &Matrix) -> Matrix {
    let rows = m.iter_rows().skip(1).map(|r| r.to_vec()).collect();
    Matrix::from_rows(rows, m.cols()).expect("width")
}

fn jets_to_raw(jets: &[Jet], width: usize) -> Raw {
    let point = jets.iter().map(|j| j.value).collect();
    let mut m = Matrix::zeros(width, jets.len());
    for (k, j) in jets.iter().enumerate() {
        for i in 0..width {
            m.set(i, k, j.derivs[i]);
        }
    }
    (point, Some(m))
}

fn kron(x: &[Fe], y: &[Fe], f: &PrimeContext) -> Vec<Fe> {
    x.iter().flat_map(|a| y.iter().map(move |b| f.mul(*a, *b))).collect()
}

fn axpy(a: &[Fe], lam: Fe, b: &[Fe], f: &PrimeContext) -> Vec<Fe> {
    a.iter().zip(b).map(|(x, y)| f.mul_add(*x, lam, *y)).collect()
}

/// Univariate restriction of degree at most `deg`, recovered by interpolation.
fn restrict(deg: usize, f: &PrimeContext, eval: impl Fn(Fe) -> Fe) -> UPoly {
    let xs: Vec<Fe> = (0..=deg as u64).map(|i| f.from_u64(i)).collect();
    let ys: Vec<Fe> = xs.iter().map(|&x| eval(x)).collect();
    UPoly::interpolate(&xs, &ys, f)
}

fn pick_root<R: Rng + ?Sized>(line: &UPoly, f: &PrimeContext, rng: &mut R) -> Result<Fe> {
    if line.is_zero() {
        // the whole line lies on the variety; a different line is needed
        return Err(Error::NoRootFound);
    }
    let roots = line.roots(f, rng);
    if roots.is_empty() {
        return Err(Error::NoRootFound);
    }
    Ok(roots[rng.gen_range(0..roots.len())])
}

/// Dimension of the linear span of the variety, counted as a vector space
/// (`dim <X> + 1`), from `samples` random points.
pub fn span_dim<R: Rng + ?Sized>(c: &Compiled, samples: usize, rng: &mut R) -> Result<usize> {
    let f = *c.ctx();
    let mut basis = EchelonBasis::new(c.ncoords());
    for _ in 0..samples {
        let p = c.sample_point(rng)?;
        basis.insert(&p, &f);
        if basis.rank() == c.ncoords() {
            break;
        }
    }
    Ok(basis.rank())
}

/// Pivot coordinates of the span: a maximal set of coordinates independent on the variety.
pub fn span_pivots<R: Rng + ?Sized>(c: &Compiled, samples: usize, rng: &mut R) -> Result<Vec<usize>> {
    let f = *c.ctx();
    let mut basis = EchelonBasis::new(c.ncoords());
    for _ in 0..samples {
        let p = c.sample_point(rng)?;
        basis.insert(&p, &f);
    }
    let mut piv = basis.pivots().to_vec();
    piv.sort();
    Ok(piv)
}
