//! Representatives of the known families of minimally defective threefolds,
//! their expected invariants, and verification against measurement.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::hilbert::hilbert12_with;
use crate::mpoly::{monomial_exponents, IntPoly};
use crate::parallel::par_map;
use crate::rng::{label, stream, StreamRng};
use crate::terracini::{
    contact_shape_from, scan_from_report, secant_dim_compiled, tangential_projection_compiled, ContactShape,
    SecantReport, TangentialReport,
};
use crate::variety::{scroll_coords, Center, VarietySpec};

/// Seed for the random coefficients inside catalog constructions. Fixed so
/// that a family id, `k` and variant always name the same variety.
pub const CATALOG_SEED: u64 = 0x5ec4_2024;

/// Largest coefficient magnitude of randomly drawn forms.
const COEFF: i128 = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
    F13,
    F14,
    #[serde(rename = "EX_VERONESE_P3")]
    ExVeroneseP3,
    #[serde(rename = "EX_SEGRE")]
    ExSegre,
    #[serde(rename = "EX_TERRACINI_13")]
    ExTerracini13,
}

impl Family {
    pub const ALL: [Family; 17] = [
        Family::F1,
        Family::F2,
        Family::F3,
        Family::F4,
        Family::F5,
        Family::F6,
        Family::F7,
        Family::F8,
        Family::F9,
        Family::F10,
        Family::F11,
        Family::F12,
        Family::F13,
        Family::F14,
        Family::ExVeroneseP3,
        Family::ExSegre,
        Family::ExTerracini13,
    ];

    pub fn id(self) -> &'static str {
        use Family::*;
        match self {
            F1 => "F1",
            F2 => "F2",
            F3 => "F3",
            F4 => "F4",
            F5 => "F5",
            F6 => "F6",
            F7 => "F7",
            F8 => "F8",
            F9 => "F9",
            F10 => "F10",
            F11 => "F11",
            F12 => "F12",
            F13 => "F13",
            F14 => "F14",
            ExVeroneseP3 => "EX_VERONESE_P3",
            ExSegre => "EX_SEGRE",
            ExTerracini13 => "EX_TERRACINI_13",
        }
    }

    /// Whether any representative can be built at all.
    pub fn constructible(self) -> bool {
        !matches!(self, Family::F3 | Family::F6 | Family::F9)
    }

    pub fn description(self) -> &'static str {
        use Family::*;
        match self {
            F1 => "cone with vertex a point or line over the 2-uple embedding of a minimal-degree threefold in P^(k+1)",
            F2 => "2-uple embedding of a hypersurface in P^4 (k = 3), or a cone with vertex a point over it",
            F3 => "2-uple embedding of a degree-k threefold with elliptic curve sections",
            F4 => "2-uple embedding of a cone with vertex a line over a rational curve of degree k in P^(k-1)",
            F5 => "2-uple embedding of a threefold in a quadric of P^5 (k = 4)",
            F6 => "2-uple embedding of a degree-(k+1) threefold with genus-2 curve sections",
            F7 => "cone with vertex of dimension k-i over the 2-uple embedding of a minimal-degree surface",
            F8 => "cone with vertex a line over the 2-uple embedding of a surface in P^3 (k = 2)",
            F9 => "cone over the 2-uple embedding of a surface with elliptic curve sections",
            F10 => "cone with vertex of dimension k-1 over a general rational surface",
            F11 => "cone with vertex of dimension 2k over a rational curve",
            F12 => "cone with vertex of dimension 2k-1 over a rational curve",
            F13 => "2-uple embedding of a minimal-degree threefold in P^(k+2), or its projection from a point or a line",
            F14 => "threefold in a linear section of the Segre embedding of P^(k+1) x P^(k+1)",
            ExVeroneseP3 => "2-uple embedding of P^3",
            ExSegre => "Segre embedding of P^(k+1) x P^(k+1)",
            ExTerracini13 => "P^1 x P^2 embedded by forms of bidegree (1, 3)",
        }
    }

    /// Default variants that exist at this `k`; empty when the family has no
    /// representative there.
    pub fn variants(self, k: usize) -> &'static [&'static str] {
        use Family::*;
        match self {
            F1 => &["point", "line"],
            F2 if k == 3 => &["hypersurface", "cone"],
            F4 if k >= 4 => &["cone-line"],
            F5 if k == 4 => &["default"],
            F7 => &["i0", "i1"],
            F8 if k == 2 => &["default"],
            F10 | F11 | F12 => &["default", "wide"],
            F13 => &["full", "point", "line"],
            F14 => &["secant"],
            ExVeroneseP3 | ExSegre | ExTerracini13 => &["default"],
            _ => &[],
        }
    }

    /// Variants that can be built but are left out of default verification.
    pub fn optional_variants(self) -> &'static [&'static str] {
        match self {
            Family::F14 => &["one-on", "external"],
            _ => &[],
        }
    }

    /// Why no representative exists at `k`, if it does not.
    pub fn unavailable_reason(self, k: usize) -> Option<String> {
        use Family::*;
        match self {
            F3 => Some("needs a threefold with elliptic curve sections; no rational parametrization".into()),
            F6 => Some("needs a threefold with genus-2 curve sections; no rational parametrization".into()),
            F9 => Some("needs a surface with elliptic curve sections; no rational parametrization".into()),
            F2 if k != 3 => Some("only exists for k = 3".into()),
            F4 if k < 4 => Some("a smooth rational curve of degree k in P^(k-1) needs k >= 4".into()),
            F5 if k != 4 => Some("only exists for k = 4".into()),
            F8 if k != 2 => Some("only exists for k = 2".into()),
            _ if k < 1 => Some("k must be positive".into()),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Family::ALL
            .into_iter()
            .find(|f| f.id() == up)
            .ok_or_else(|| Error::Parse(format!("unknown family id {s:?}")))
    }
}

/// Expected invariants at the secancy order of the entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub r: usize,
    pub s_k: usize,
    pub delta_k: usize,
    pub n_k: usize,
    pub minimal: bool,
    pub s_k_plus_1: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub family: Family,
    pub k: usize,
    pub variant: String,
    /// Order at which the variety is expected to be minimally defective.
    pub order: usize,
    pub spec: VarietySpec,
    pub expected: Expected,
}

impl CatalogEntry {
    /// Stable key such as `F13/full/k2`.
    pub fn key(&self) -> String {
        format!("{}/{}/k{}", self.family, self.variant, self.k)
    }
}

/// A `(family, k)` pair without a representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub family: Family,
    pub k: usize,
    pub reason: String,
}

fn catalog_rng(family: Family, k: usize, variant: &str) -> StreamRng {
    stream(CATALOG_SEED, &[label(family.id()), k as u64, label(variant)])
}

/// Random integer combination of all degree-`d` monomials in `nvars` variables.
fn random_form(nvars: usize, d: u32, rng: &mut StreamRng) -> IntPoly {
    monomial_exponents(nvars, d)
        .into_iter()
        .fold(IntPoly::zero(), |acc, e| acc.add(&IntPoly::monomial(&e, rng.gen_range(-COEFF..=COEFF))))
}

fn random_forms(nvars: usize, d: u32, count: usize, rng: &mut StreamRng) -> Vec<IntPoly> {
    (0..count).map(|_| random_form(nvars, d, rng)).collect()
}

/// Block degrees of a balanced scroll with `blocks` blocks and total degree `total`, largest first.
pub fn balanced_blocks(total: u32, blocks: u32) -> Vec<u32> {
    (0..blocks).map(|i| total / blocks + u32::from(i < total % blocks)).collect()
}

fn ncoords(degrees: &[u32]) -> usize {
    degrees.iter().map(|&a| a as usize + 1).sum()
}

/// Value of the scroll parametrization at integer parameters.
fn scroll_point(degrees: &[u32], params: &[i128]) -> Vec<i128> {
    scroll_coords(degrees)
        .iter()
        .map(|p| {
            p.terms()
                .map(|(e, c)| e.iter().enumerate().fold(*c, |acc, (i, &k)| acc * params[i].pow(k)))
                .sum()
        })
        .collect()
}

/// Linear forms `x_i - p_i x_0`, `i >= 1`, cutting out the point `p` with `p_0 = 1`.
fn forms_vanishing_at(p: &[i128]) -> Vec<IntPoly> {
    assert_eq!(p[0], 1, "point must be in the chart x0 = 1");
    (1..p.len()).map(|i| IntPoly::var(i).add(&IntPoly::var(0).scale(-p[i]))).collect()
}

fn quadrics(nvars: usize) -> Vec<IntPoly> {
    IntPoly::monomials(nvars, 2)
}

fn smallest_degree(count: usize) -> u32 {
    (3u32..).find(|&d| ((d + 1) * (d + 2) / 2) as usize >= count).unwrap()
}

fn exp(r: usize, s_k: usize, delta_k: usize, n_k: usize, s_k_plus_1: Option<usize>) -> Expected {
    Expected { r, s_k, delta_k, n_k, minimal: true, s_k_plus_1 }
}

/// Builds the representative of `family` at `k`. `variant = None` picks the first default variant.
pub fn build_family(family: Family, k: usize, variant: Option<&str>) -> Result<CatalogEntry> {
    if let Some(reason) = family.unavailable_reason(k) {
        return Err(Error::NotConstructible(family.id().into(), reason));
    }
    let variants = family.variants(k);
    let variant = variant.unwrap_or(variants[0]);
    if !variants.contains(&variant) && !family.optional_variants().contains(&variant) {
        return Err(Error::InvalidSpec(format!("family {family} has no variant {variant:?}")));
    }
    let mut rng = catalog_rng(family, k, variant);
    let kk = k as u32;
    use Family::*;
    let (order, spec, expected) = match (family, variant) {
        (F1, v) => {
            let blocks = balanced_blocks(kk - 1, 3);
            let m = ncoords(&blocks);
            let h = random_form(m, 1, &mut rng);
            let mut coords: Vec<IntPoly> = quadrics(m).iter().map(|q| q.mul(&h)).collect();
            let cubics = if v == "point" { 1 } else { 2 };
            coords.extend(random_forms(m, 3, cubics, &mut rng));
            let spec = VarietySpec::lift(VarietySpec::scroll(&blocks), coords);
            let e = if v == "point" {
                exp(4 * k + 2, 4 * k + 1, 1, 1, Some(4 * k + 2))
            } else {
                exp(4 * k + 3, 4 * k + 2, 1, 2, Some(4 * k + 3))
            };
            (k, spec, e)
        }
        (F2, v) => {
            let y = VarietySpec::hypersurface(4, random_form(5, 3, &mut rng));
            if v == "hypersurface" {
                (k, VarietySpec::veronese(y, 2), exp(14, 13, 1, 1, Some(14)))
            } else {
                let l = random_form(5, 1, &mut rng);
                let mut coords: Vec<IntPoly> = quadrics(5).iter().map(|q| q.mul(&l)).collect();
                coords.push(random_form(5, 3, &mut rng));
                (k, VarietySpec::lift(y, coords), exp(15, 14, 1, 2, Some(15)))
            }
        }
        (F4, _) => {
            let curve = VarietySpec::project(
                VarietySpec::rational_normal_curve(kk),
                Center::Span { on_variety: 0, generic: 1, seed: rng.gen() },
            );
            let y = VarietySpec::cone(curve, 1);
            (k, VarietySpec::veronese(y, 2), exp(4 * k + 3, 4 * k + 2, 1, 2, Some(4 * k + 3)))
        }
        (F5, _) => {
            let y = VarietySpec::on_quadric(random_form(6, 3, &mut rng));
            (k, VarietySpec::veronese(y, 2), exp(19, 18, 1, 2, Some(19)))
        }
        (F7, v) => {
            let i = if v == "i0" { 0 } else { 1 };
            let blocks = balanced_blocks(kk, 2);
            let m = ncoords(&blocks);
            let vertex = random_forms(m, 1, k - i + 1, &mut rng);
            let spec = VarietySpec::join_over(VarietySpec::scroll(&blocks), quadrics(m), vertex);
            let r = 4 * k + 3 - i;
            (k, spec, exp(r, r - 1, 1, 2 - i, Some(r)))
        }
        (F8, _) => {
            let y = VarietySpec::hypersurface(3, random_form(4, 3, &mut rng));
            let vertex = random_forms(4, 1, 2, &mut rng);
            (k, VarietySpec::join_over(y, quadrics(4), vertex), exp(11, 10, 1, 2, Some(11)))
        }
        (F10, v) => {
            let surface = if v == "default" { 3 * k + 4 } else { 3 * k + 7 };
            let d = smallest_degree(surface.max(k));
            let left = random_forms(3, d, surface, &mut rng);
            let right = random_forms(3, d, k, &mut rng);
            let r = surface + k - 1;
            let spec = VarietySpec::join_over(VarietySpec::linear(2), left, right);
            (k, spec, exp(r, 4 * k + 2, 1, 2, Some(r.min(4 * k + 5))))
        }
        (F11, v) => {
            let base_deg = if v == "default" { 2 * kk + 2 } else { 2 * kk + 4 };
            let base = scroll_coords(&[base_deg]);
            let fiber = scroll_coords(&[kk, kk - 1]);
            let r = base.len() + fiber.len() - 1;
            (k, VarietySpec::fibered_join(base, fiber), exp(r, 4 * k + 2, 1, 2, Some(r.min(4 * k + 4))))
        }
        (F12, v) => {
            let base_deg = if v == "default" { 2 * kk + 2 } else { 2 * kk + 4 };
            let base = scroll_coords(&[base_deg]);
            let fiber = scroll_coords(&balanced_blocks(2 * kk - 2, 2));
            let r = base.len() + fiber.len() - 1;
            let delta = (4 * k + 3).min(r) - (4 * k + 1);
            (k, VarietySpec::fibered_join(base, fiber), exp(r, 4 * k + 1, delta, 1, Some(r.min(4 * k + 3))))
        }
        (F13, v) => {
            let x = VarietySpec::veronese(VarietySpec::scroll(&balanced_blocks(kk, 3)), 2);
            // the printed table gives n_k = 1 for every variant
            match v {
                "full" => (k, x, exp(4 * k + 5, 4 * k + 2, 1, 1, Some(4 * k + 4))),
                "point" => {
                    let c = Center::Span { on_variety: 0, generic: 1, seed: rng.gen() };
                    (k, VarietySpec::project(x, c), exp(4 * k + 4, 4 * k + 2, 1, 1, Some(4 * k + 4)))
                }
                _ => {
                    let c = Center::Span { on_variety: 0, generic: 2, seed: rng.gen() };
                    (k, VarietySpec::project(x, c), exp(4 * k + 3, 4 * k + 2, 1, 1, Some(4 * k + 3)))
                }
            }
        }
        (F14, v) => {
            let blocks = balanced_blocks(kk, 3);
            let m = ncoords(&blocks);
            let on_y = |params: &[i128]| scroll_point(&blocks, params);
            let off_y = |rng: &mut StreamRng| {
                let mut p: Vec<i128> = (0..m).map(|_| rng.gen_range(-COEFF..=COEFF)).collect();
                p[0] = 1;
                p
            };
            let (p1, p2) = match v {
                "secant" => (on_y(&[2, 3, 5]), on_y(&[-1, 4, -3])),
                "one-on" => (on_y(&[2, 3, 5]), off_y(&mut rng)),
                _ => (off_y(&mut rng), off_y(&mut rng)),
            };
            let (l, mm) = (forms_vanishing_at(&p1), forms_vanishing_at(&p2));
            let coords = l.iter().flat_map(|a| mm.iter().map(move |b| a.mul(b))).collect();
            let spec = VarietySpec::lift(VarietySpec::scroll(&blocks), coords);
            (k, spec, exp(4 * k + 3, 4 * k + 2, 1, 2, Some(4 * k + 3)))
        }
        (ExVeroneseP3, _) => (1, VarietySpec::veronese(VarietySpec::linear(3), 2), exp(9, 6, 1, 2, Some(8))),
        (ExSegre, _) => {
            let spec = VarietySpec::segre(VarietySpec::linear(k + 1), VarietySpec::linear(k + 1));
            (1, spec, exp(k * k + 4 * k + 3, 4 * k + 3, 2, 2 * k, None))
        }
        (ExTerracini13, _) => {
            let spec = VarietySpec::segre(VarietySpec::linear(1), VarietySpec::veronese(VarietySpec::linear(2), 3));
            (4, spec, exp(19, 18, 1, 2, Some(19)))
        }
        (F3 | F6 | F9, _) => unreachable!("rejected above"),
    };
    Ok(CatalogEntry { family, k, variant: variant.to_string(), order, spec, expected })
}

/// Every default entry at `k`, and the families skipped there. Fixed-size
/// examples only appear once, under the smallest `k` of a range.
pub fn entries_for(k: usize, include_examples: bool) -> (Vec<CatalogEntry>, Vec<Skipped>) {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for family in Family::ALL {
        let is_example = matches!(family, Family::ExVeroneseP3 | Family::ExSegre | Family::ExTerracini13);
        if is_example && !include_examples && family != Family::ExSegre {
            continue;
        }
        if let Some(reason) = family.unavailable_reason(k) {
            skipped.push(Skipped { family, k, reason });
            continue;
        }
        for v in family.variants(k) {
            entries.push(build_family(family, k, Some(v)).expect("default variants build"));
        }
    }
    (entries, skipped)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub field: String,
    pub expected: String,
    pub measured: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measured {
    /// Report at the highest order measured (`order + 1` when that value is expected).
    pub secant: SecantReport,
    pub first_defective: Option<usize>,
    pub tangential: TangentialReport,
    pub contact: ContactShape,
    pub h1: usize,
    pub h2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub entry: CatalogEntry,
    pub measured: Measured,
    pub pass: bool,
    pub mismatches: Vec<Mismatch>,
}

/// Measures an entry and compares every expected field.
pub fn verify_family(engine: &Engine, entry: &CatalogEntry) -> Result<VerifyResult> {
    let compiled = engine.compile(&entry.spec)?;
    let k = entry.order;
    let top = if entry.expected.s_k_plus_1.is_some() { k + 1 } else { k };
    let secant = secant_dim_compiled(engine, &compiled, top)?;
    let (first_defective, reports) = scan_from_report(&secant);
    let at_k = &reports[k];
    let tangential = tangential_projection_compiled(engine, &entry.spec, &compiled, k)?;
    let contact = contact_shape_from(engine, &tangential)?;
    let (h1, h2) = hilbert12_with(engine, &compiled)?;

    let e = &entry.expected;
    let mut mismatches = Vec::new();
    let mut check = |field: &str, expected: String, measured: String| {
        if expected != measured {
            mismatches.push(Mismatch { field: field.into(), expected, measured });
        }
    };
    check("r", e.r.to_string(), at_k.r.to_string());
    check("s_k", e.s_k.to_string(), at_k.s_k().to_string());
    check("delta_k", e.delta_k.to_string(), at_k.delta_k.to_string());
    check("n_k", e.n_k.to_string(), tangential.n_k.to_string());
    let minimal = first_defective == Some(k);
    check("minimal", e.minimal.to_string(), minimal.to_string());
    if let Some(s) = e.s_k_plus_1 {
        check("s_k_plus_1", s.to_string(), secant.chain[k + 1].to_string());
    }
    Ok(VerifyResult {
        entry: entry.clone(),
        measured: Measured { secant, first_defective, tangential, contact, h1, h2 },
        pass: mismatches.is_empty(),
        mismatches,
    })
}

/// Outcome of one entry inside [`verify_all`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryOutcome {
    Verified(Box<VerifyResult>),
    Failed { key: String, error: String },
}

impl EntryOutcome {
    pub fn pass(&self) -> bool {
        matches!(self, EntryOutcome::Verified(r) if r.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyAll {
    pub entries: Vec<(String, EntryOutcome)>,
    pub skipped: Vec<Skipped>,
}

impl VerifyAll {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|(_, o)| o.pass())
    }
}

/// Verifies every default entry for `k` in `ks`. Errors become failed entries.
pub fn verify_all(engine: &Engine, ks: std::ops::RangeInclusive<usize>) -> VerifyAll {
    let first = *ks.start();
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for k in ks {
        let (e, s) = entries_for(k, k == first);
        entries.extend(e);
        skipped.extend(s);
    }
    let outcomes = par_map(entries, engine.parallel(), |entry| {
        let key = entry.key();
        let out = match verify_family(engine, &entry) {
            Ok(r) => EntryOutcome::Verified(Box::new(r)),
            Err(e) => EntryOutcome::Failed { key: key.clone(), error: e.to_string() },
        };
        (key, out)
    });
    VerifyAll { entries: outcomes, skipped }
}
