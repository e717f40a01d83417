//! Checks of dimer identities between a graph on a non-orientable surface and
//! its orientation double cover. Every check records both sides; a report
//! only fails when its preconditions verifiably hold.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{Signed, Zero};

use crate::cover::{lift_matching, lift_orientation, orientation_cover, CoverMap};
use crate::dimer::{
    brute_force_partition, enumerate_matchings, partition_function, twisted_partition, Matching,
    Method, PfaffianSetup, TwistedZ,
};
use crate::error::{Error, Result};
use crate::kasteleyn::{find_kasteleyn, Orientation};
use crate::lattices::{generate, Family, LatticeSpec, Surface, Translation, Weights};
use crate::pfaffian::{graph_pfaffian, skew_adjacency, twisted_pfaffian};
use crate::quadform::{
    enhancement_sum, enumerate_enhancements, induced_cover_form, lifted_is_kasteleyn, Enhancement,
    QuadraticForm,
};
use crate::scalar::{exact_norm_sqr, format_rational, int, rational, Exact, Mode, Value, Weight};
use crate::surface::homology_basis;
use crate::surface::{
    bipartite_flags, check_cuts, default_omega, for_each_simple_curve, simple_cycles, validate,
    Class, ClosedWalk, EdgeSet, EmbeddedGraph, HomologyBasis, SurfaceData,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionFailed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::PreconditionFailed => "precondition-failed",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One equality with both of its sides.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub identity: String,
    pub instance: String,
    pub preconditions: BTreeMap<String, bool>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(identity: impl Into<String>, instance: impl Into<String>) -> Self {
        Report {
            identity: identity.into(),
            instance: instance.into(),
            preconditions: BTreeMap::new(),
            checks: Vec::new(),
            verdict: Verdict::PreconditionFailed,
            timings: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Records a precondition and returns whether it holds.
    pub fn precondition(&mut self, name: &str, holds: bool) -> bool {
        self.preconditions.insert(name.to_string(), holds);
        holds
    }

    pub fn check(&mut self, name: impl Into<String>, lhs: Value, rhs: Value, tol: f64) -> bool {
        let holds = lhs.agrees(&rhs, tol);
        self.checks.push(Check {
            name: name.into(),
            lhs,
            rhs,
            holds,
        });
        holds
    }

    pub fn check_exact(&mut self, name: impl Into<String>, lhs: &Weight, rhs: &Weight) -> bool {
        self.check(
            name,
            Value::Exact(lhs.clone()),
            Value::Exact(rhs.clone()),
            0.0,
        )
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn timed<R>(&mut self, phase: &str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        *self.timings.entry(phase.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        out
    }

    /// Sets the verdict from the recorded preconditions and checks.
    pub fn finish(mut self) -> Self {
        self.verdict = if self.preconditions.values().any(|&ok| !ok) {
            Verdict::PreconditionFailed
        } else if self.checks.iter().all(|c| c.holds) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// The headline check: the first one recorded.
    pub fn headline(&self) -> Option<&Check> {
        self.checks.first()
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Arithmetic for the Pfaffian evaluations; enumeration is always exact.
    pub mode: Mode,
    /// Relative tolerance for float comparisons.
    pub tol: f64,
    /// Also evaluate every side through Pfaffians.
    pub pfaffian: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Exact,
            tol: 1e-9,
            pfaffian: true,
        }
    }
}

/// A graph on a non-orientable surface together with its orientation cover.
#[derive(Clone, Debug)]
pub struct CoverSetting {
    pub surface: SurfaceData,
    pub basis: HomologyBasis,
    pub omega: EdgeSet,
    pub cover: CoverMap,
    pub cover_basis: HomologyBasis,
}

impl CoverSetting {
    pub fn new(g: &EmbeddedGraph) -> Result<Self> {
        let surface = validate(g)?;
        check_cuts(g, &surface)?;
        if surface.orientable {
            return Err(Error::PreconditionFailed("surface is orientable".into()));
        }
        let basis = homology_basis(g, &surface)?;
        let omega = default_omega(g);
        let cover = orientation_cover(g, &omega)?;
        let cover_basis = homology_basis(&cover.cover, &cover.surface)?;
        Ok(CoverSetting {
            surface,
            basis,
            omega,
            cover,
            cover_basis,
        })
    }

    /// Non-orientable genus `h`.
    pub fn genus(&self) -> usize {
        self.basis.dim()
    }

    pub fn lift(&self, g: &EmbeddedGraph, d0: &Matching) -> Result<Matching> {
        lift_matching(g, &self.cover, d0)
    }
}

fn pfaffian_z(g: &EmbeddedGraph, opts: &VerifyOptions) -> Result<Value> {
    partition_function(g, Method::Pfaffian, opts.mode)
}

/// `factor · v²`, staying exact when `v` is.
fn scaled_square(v: &Value, factor: &Weight) -> Value {
    match v {
        Value::Exact(q) => Value::Exact(factor * q * q),
        Value::Float(x) => {
            Value::Float(num_traits::ToPrimitive::to_f64(factor).unwrap_or(f64::NAN) * x * x)
        }
    }
}

fn sum_of_squares(values: &[Value]) -> Value {
    if values.iter().all(|v| matches!(v, Value::Exact(_))) {
        Value::Exact(values.iter().fold(Weight::zero(), |acc, v| match v {
            Value::Exact(q) => acc + q * q,
            Value::Float(_) => unreachable!(),
        }))
    } else {
        Value::Float(values.iter().map(|v| v.to_f64() * v.to_f64()).sum())
    }
}

fn exact(q: Weight) -> Value {
    Value::Exact(q)
}

/// Per-class `Z_{α, D0}` recovered from Pfaffians in the requested mode.
fn pfaffian_classes(
    g: &EmbeddedGraph,
    setting: &CoverSetting,
    d0: &Matching,
    mode: Mode,
) -> Result<Vec<Value>> {
    let setup = PfaffianSetup::with_omega(g, setting.surface.clone(), setting.omega.clone())?;
    let classes = match mode {
        Mode::Exact => crate::dimer::pfaffian_partition::<Exact>(g, &setup, Some(d0))?
            .classes
            .map(|c| {
                c.iter()
                    .map(crate::scalar::GaussianField::real_value)
                    .collect()
            }),
        Mode::Float => {
            crate::dimer::pfaffian_partition::<num_complex::Complex64>(g, &setup, Some(d0))?
                .classes
                .map(|c| {
                    c.iter()
                        .map(crate::scalar::GaussianField::real_value)
                        .collect()
                })
        }
    };
    classes.ok_or_else(|| Error::PreconditionFailed("no reference matching".into()))
}

/// The three square-lattice identities between a surface and its cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeEquation {
    /// `Z^C_{2m,4n} = (Z^M_{2m,2n})²`
    CylinderEven,
    /// `Z^C_{2m-1,4n} = ½ (Z^M_{2m-1,2n})²`
    CylinderOdd,
    /// `Z^T_{2m-1,4n} = ½ (Z^K_{2m-1,2n})²`
    Torus,
}

impl FromStr for LatticeEquation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "eq1" => Ok(LatticeEquation::CylinderEven),
            "eq2" => Ok(LatticeEquation::CylinderOdd),
            "eq3" => Ok(LatticeEquation::Torus),
            other => Err(format!(
                "unknown lattice identity `{other}` (expected eq1|eq2|eq3)"
            )),
        }
    }
}

impl LatticeEquation {
    pub fn name(self) -> &'static str {
        match self {
            LatticeEquation::CylinderEven => "eq1",
            LatticeEquation::CylinderOdd => "eq2",
            LatticeEquation::Torus => "eq3",
        }
    }

    /// `(cover-side spec, base spec, factor)` for parameters `m, n ≥ 1`.
    pub fn specs(self, m: usize, n: usize, weights: Weights) -> (LatticeSpec, LatticeSpec, Weight) {
        let (top, bottom, rows, factor) = match self {
            LatticeEquation::CylinderEven => (Surface::Cylinder, Surface::Mobius, 2 * m, int(1)),
            LatticeEquation::CylinderOdd => (
                Surface::Cylinder,
                Surface::Mobius,
                2 * m - 1,
                rational(1, 2),
            ),
            LatticeEquation::Torus => (Surface::Torus, Surface::Klein, 2 * m - 1, rational(1, 2)),
        };
        (
            LatticeSpec::new(Family::Square, top, rows, 4 * n).with_weights(weights.clone()),
            LatticeSpec::new(Family::Square, bottom, rows, 2 * n).with_weights(weights),
            factor,
        )
    }
}

/// Checks one of the square-lattice identities with horizontal weight `x` and
/// vertical weight `y`, by enumeration and through Pfaffians.
pub fn verify_lattice_equation(
    eq: LatticeEquation,
    m: usize,
    n: usize,
    x: &Weight,
    y: &Weight,
    opts: &VerifyOptions,
) -> Result<Report> {
    let mut report = Report::new(
        eq.name(),
        format!(
            "m={m} n={n} x={} y={}",
            format_rational(x),
            format_rational(y)
        ),
    );
    if !report.precondition("m >= 1 and n >= 1", m >= 1 && n >= 1)
        || !report.precondition("positive weights", x.is_positive() && y.is_positive())
    {
        return Ok(report.finish());
    }
    let (top_spec, base_spec, factor) = eq.specs(m, n, Weights::Xy(x.clone(), y.clone()));
    let top = generate(&top_spec)?;
    let base = generate(&base_spec)?;
    let z_top = report.timed("brute", || brute_force_partition(&top.graph));
    let z_base = report.timed("brute", || brute_force_partition(&base.graph));
    report.check_exact("brute force", &z_top, &(&factor * &z_base * &z_base));
    let cm = orientation_cover(&base.graph, &default_omega(&base.graph))?;
    let z_cover = report.timed("brute", || brute_force_partition(&cm.cover));
    report.check_exact(
        "orientation cover matches the generated lattice",
        &z_cover,
        &z_top,
    );
    if opts.pfaffian {
        let p_top = report.timed("pfaffian", || pfaffian_z(&top.graph, opts))?;
        let p_base = report.timed("pfaffian", || pfaffian_z(&base.graph, opts))?;
        report.check(
            "pfaffian",
            p_top.clone(),
            scaled_square(&p_base, &factor),
            opts.tol,
        );
        report.check(
            "pfaffian agrees with enumeration (cover side)",
            p_top,
            exact(z_top),
            opts.tol,
        );
        report.check(
            "pfaffian agrees with enumeration (base side)",
            p_base,
            exact(z_base),
            opts.tol,
        );
    }
    Ok(report.finish())
}

fn instance_name(g: &EmbeddedGraph, surface: Option<&SurfaceData>) -> String {
    match surface {
        Some(s) => format!("{} V={} E={}", s.name(), g.num_vertices(), g.num_edges()),
        None => format!("V={} E={}", g.num_vertices(), g.num_edges()),
    }
}

/// Validates `g` and records the preconditions shared by all cover identities.
fn cover_preconditions(
    g: &EmbeddedGraph,
    report: &mut Report,
    genus: Option<usize>,
) -> Result<Option<CoverSetting>> {
    let surface = validate(g)?;
    report.instance = instance_name(g, Some(&surface));
    let mut ok = report.precondition("non-orientable", !surface.orientable);
    ok &= report.precondition("even vertex count", g.num_vertices().is_multiple_of(2));
    if let Some(h) = genus {
        ok &= report.precondition(
            &format!("non-orientable genus {h}"),
            !surface.orientable && surface.h1_dim() == h,
        );
    }
    if !ok {
        return Ok(None);
    }
    Ok(Some(CoverSetting::new(g)?))
}

fn reference_for(g: &EmbeddedGraph, d0: Option<&Matching>) -> Option<Matching> {
    d0.cloned().or_else(|| crate::dimer::first_matching(g))
}

/// `Z(G̃) = Z_{0,D0}(G)² + Z_{1,D0}(G)²` on a graph in the projective plane
/// (a Möbius strip with its boundary capped).
pub fn verify_prop24(
    g: &EmbeddedGraph,
    d0: Option<&Matching>,
    opts: &VerifyOptions,
) -> Result<Report> {
    let mut report = Report::new("prop24", "");
    let Some(setting) = cover_preconditions(g, &mut report, Some(1))? else {
        return Ok(report.finish());
    };
    let tz = report.timed("brute", || twisted_partition(g, &setting.basis, d0))?;
    let z_cover = report.timed("brute", || brute_force_partition(&setting.cover.cover));
    let rhs: Weight = tz.classes.iter().map(|z| z * z).sum();
    report.check_exact("Z(cover) = Z_0^2 + Z_1^2", &z_cover, &rhs);
    if opts.pfaffian {
        pfaffian_cover_side(g, &setting, &tz, &mut report, opts, |classes| {
            sum_of_squares(classes)
        })?;
    }
    Ok(report.finish())
}

/// Pfaffian versions of `Z(G̃) = f(Z_α(G))`, plus the Pfaffian magnitude identity.
fn pfaffian_cover_side(
    g: &EmbeddedGraph,
    setting: &CoverSetting,
    tz: &TwistedZ,
    report: &mut Report,
    opts: &VerifyOptions,
    rhs: impl Fn(&[Value]) -> Value,
) -> Result<()> {
    let p_cover = report.timed("pfaffian", || pfaffian_z(&setting.cover.cover, opts))?;
    let classes = match &tz.reference {
        Some(d0) => report.timed("pfaffian", || pfaffian_classes(g, setting, d0, opts.mode))?,
        None => vec![Value::Exact(Weight::zero()); tz.classes.len()],
    };
    report.check("pfaffian", p_cover, rhs(&classes), opts.tol);
    for (a, z) in classes.iter().enumerate() {
        let label = Class(a as u64).label(tz.dim);
        report.check(
            format!("pfaffian Z_{label} agrees with enumeration"),
            z.clone(),
            exact(tz.classes[a].clone()),
            opts.tol,
        );
    }
    let k = find_kasteleyn(g, &setting.surface, &setting.omega)?;
    let (cover_pf, base_sq) = report.timed("pfaffian", || pfaffian_magnitudes(g, setting, &k));
    report.check_exact("|Pf(cover)| = |Pf(base)|^2", &cover_pf, &base_sq);
    Ok(())
}

/// `(|Pf(A^{K̃}(G̃))|, |Pf(A^{K,ω}(G))|²)` in exact arithmetic.
pub fn pfaffian_magnitudes(
    g: &EmbeddedGraph,
    setting: &CoverSetting,
    k: &Orientation,
) -> (Weight, Weight) {
    let cover = &setting.cover;
    let kt = lift_orientation(cover, k);
    let cover_pf =
        graph_pfaffian::<Exact>(&cover.cover, &kt, &EdgeSet::empty(cover.cover.num_edges()));
    let base_pf = graph_pfaffian::<Exact>(g, k, &setting.omega);
    (
        cover_pf.re.abs() + cover_pf.im.abs(),
        exact_norm_sqr(&base_pf),
    )
}

/// Whether, with copy-0 vertices listed before copy-1 vertices, the cover
/// matrix is `[[M1, M2], [M2, -M1]]` where `A^{K,ω}(G) = M1 + i M2`.
pub fn has_block_structure(
    g: &EmbeddedGraph,
    cover: &CoverMap,
    omega: &EdgeSet,
    k: &Orientation,
) -> bool {
    let n = g.num_vertices();
    let base = skew_adjacency::<Exact>(g, k, Some(omega));
    let kt = lift_orientation(cover, k);
    let lifted = skew_adjacency::<Exact>(&cover.cover, &kt, None);
    (0..n).all(|i| {
        (0..n).all(|j| {
            let (m1, m2) = (&base.get(i, j).re, &base.get(i, j).im);
            let real = |r: usize, c: usize| {
                let z = lifted.get(r, c);
                z.im.is_zero().then(|| z.re.clone())
            };
            real(i, j).as_ref() == Some(m1)
                && real(i, j + n).as_ref() == Some(m2)
                && real(i + n, j).as_ref() == Some(m2)
                && real(i + n, j + n) == Some(-m1.clone())
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Thm1Variant {
    /// Locally bipartite, not bipartite: `Z(G̃) = Z(G)²`.
    LocallyBipartite,
    /// Translation-invariant with a reference `D0`, `[D0 ∆ τD0] = 1`: `Z(G̃) = ½ Z(G)²`.
    Translation,
}

impl FromStr for Thm1Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "i" | "thm1i" => Ok(Thm1Variant::LocallyBipartite),
            "ii" | "thm1ii" => Ok(Thm1Variant::Translation),
            other => Err(format!("unknown variant `{other}` (expected i|ii)")),
        }
    }
}

/// Whether `τ` maps edges onto edges with matching endpoints and weights;
/// returns `(automorphism, weight preserving)`.
pub fn translation_status(g: &EmbeddedGraph, tau: &Translation) -> (bool, bool) {
    let (nv, ne) = (g.num_vertices(), g.num_edges());
    let shapes = tau.vertices.len() == nv && tau.edges.len() == ne;
    let automorphism = shapes && {
        let mut seen = vec![false; ne];
        (0..ne).all(|e| {
            let (a, b) = (g.edge(e), g.edge(tau.edges[e]));
            let (u, v) = (tau.vertices[a.u], tau.vertices[a.v]);
            let fresh = !std::mem::replace(&mut seen[tau.edges[e]], true);
            fresh && ((u, v) == (b.u, b.v) || (u, v) == (b.v, b.u))
        })
    };
    let weights = automorphism && (0..ne).all(|e| g.weight(e) == g.weight(tau.edges[e]));
    (automorphism, weights)
}

/// A matching `D0` with `[D0 ∆ τD0]` satisfying `accept`, preferring `given`.
fn translated_reference(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    tau: &Translation,
    given: Option<&Matching>,
    accept: impl Fn(Class) -> bool,
) -> Option<(Matching, Class)> {
    let class_of = |d: &Matching| {
        let image = Matching::new(tau.apply_edges(d.edges()));
        basis.class_from_pairing(
            basis.pairing_vector(d.symmetric_difference(&image, g.num_edges()).iter()),
        )
    };
    let candidates = match given {
        Some(d) => vec![d.clone()],
        None => enumerate_matchings(g),
    };
    candidates
        .into_iter()
        .map(|d| {
            let c = class_of(&d);
            (d, c)
        })
        .find(|&(_, c)| accept(c))
}

/// Theorem-1 identities on a graph in the projective plane.
pub fn verify_thm1(
    g: &EmbeddedGraph,
    variant: Thm1Variant,
    tau: Option<&Translation>,
    d0: Option<&Matching>,
    opts: &VerifyOptions,
) -> Result<Report> {
    let name = match variant {
        Thm1Variant::LocallyBipartite => "thm1i",
        Thm1Variant::Translation => "thm1ii",
    };
    let mut report = Report::new(name, "");
    let Some(setting) = cover_preconditions(g, &mut report, Some(1))? else {
        return Ok(report.finish());
    };
    let (reference, factor) = match variant {
        Thm1Variant::LocallyBipartite => {
            let flags = bipartite_flags(g, &setting.surface, &setting.basis);
            let ok = report.precondition("locally bipartite", flags.locally_bipartite)
                & report.precondition("not bipartite", !flags.bipartite);
            if !ok {
                return Ok(report.finish());
            }
            (reference_for(g, d0), int(1))
        }
        Thm1Variant::Translation => {
            let Some(tau) = tau else {
                report.precondition("translation supplied", false);
                return Ok(report.finish());
            };
            let (auto, weights) = translation_status(g, tau);
            let ok = report.precondition("translation is an automorphism", auto)
                & report.precondition("weights are translation invariant", weights);
            if !ok {
                return Ok(report.finish());
            }
            let found = report.timed("search", || {
                translated_reference(g, &setting.basis, tau, d0, |c| c.0 == 1)
            });
            if !report.precondition("some D0 has [D0 + tau(D0)] = 1", found.is_some()) {
                return Ok(report.finish());
            }
            (found.map(|(d, _)| d), rational(1, 2))
        }
    };
    let tz = report.timed("brute", || {
        twisted_partition(g, &setting.basis, reference.as_ref())
    })?;
    let z_cover = report.timed("brute", || brute_force_partition(&setting.cover.cover));
    let z = &tz.total;
    report.check_exact("Z(cover) = c * Z^2", &z_cover, &(&factor * z * z));
    match variant {
        Thm1Variant::LocallyBipartite => {
            report.check_exact("Z_1 = 0", &tz.classes[1], &Weight::zero())
        }
        Thm1Variant::Translation => report.check_exact("Z_0 = Z_1", &tz.classes[0], &tz.classes[1]),
    };
    report.check_exact(
        "Z(cover) = Z_0^2 + Z_1^2",
        &z_cover,
        &tz.classes.iter().map(|z| z * z).sum(),
    );
    if opts.pfaffian {
        let p = report.timed("pfaffian", || pfaffian_z(g, opts))?;
        let p_cover = report.timed("pfaffian", || pfaffian_z(&setting.cover.cover, opts))?;
        report.check(
            "pfaffian: Z(cover) = c * Z^2",
            p_cover,
            scaled_square(&p, &factor),
            opts.tol,
        );
        report.check(
            "pfaffian agrees with enumeration",
            p,
            exact(z.clone()),
            opts.tol,
        );
    }
    Ok(report.finish())
}

/// The Klein-bottle basis `β1, β2` (`w1 = 0, 1`, `β1·β2 = 1`) and the cover
/// basis `β̃'1` (a lift of a simple `β1` curve) and `β̃2` (the preimage of a
/// simple `β2` curve).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleinFrame {
    pub beta1: Class,
    pub beta2: Class,
    pub cover_beta1: Class,
    /// The other lift of the `β1` curve; homologous to `cover_beta1`.
    pub cover_beta1_other: Class,
    pub cover_beta2: Class,
}

impl KleinFrame {
    pub fn new(g: &EmbeddedGraph, setting: &CoverSetting, beta2: Class) -> Result<Self> {
        let basis = &setting.basis;
        if basis.dim() != 2 || basis.w1_of(beta2) != 1 {
            return Err(Error::PreconditionFailed(
                "need a Klein bottle and a one-sided beta2".into(),
            ));
        }
        let beta1 = basis
            .classes()
            .find(|&a| !a.is_zero() && basis.w1_of(a) == 0)
            .ok_or_else(|| Error::PreconditionFailed("no two-sided class".into()))?;
        let (c1, c2) = (
            simple_representative(g, basis, beta1)?,
            simple_representative(g, basis, beta2)?,
        );
        let cb = &setting.cover_basis;
        let frame = KleinFrame {
            beta1,
            beta2,
            cover_beta1: cb.walk_class(&setting.cover.lift_walk(&c1, 0)),
            cover_beta1_other: cb.walk_class(&setting.cover.lift_walk(&c1, 1)),
            cover_beta2: cb.walk_class(&setting.cover.lift_walk(&c2, 0)),
        };
        if cb.dim() != 2 || cb.intersect(frame.cover_beta1, frame.cover_beta2) != 1 {
            return Err(Error::LawViolation(
                "lifted curves do not form a basis of the cover".into(),
            ));
        }
        Ok(frame)
    }

    fn coords(a: Class, x: Class, y: Class) -> (usize, usize) {
        (0..4)
            .map(|i| (i & 1, i >> 1))
            .find(|&(s, t)| {
                let mut c = Class::zero();
                if s == 1 {
                    c = c.add(x);
                }
                if t == 1 {
                    c = c.add(y);
                }
                c == a
            })
            .expect("frame is a basis")
    }

    /// `(coefficient of β1, coefficient of β2)`.
    pub fn base_coords(&self, a: Class) -> (usize, usize) {
        Self::coords(a, self.beta1, self.beta2)
    }

    /// `(coefficient of β̃'1, coefficient of β̃2)`.
    pub fn cover_coords(&self, a: Class) -> (usize, usize) {
        Self::coords(a, self.cover_beta1, self.cover_beta2)
    }

    /// `Z_{st}` tables indexed `[s][t]` in frame coordinates.
    pub fn base_table(&self, tz: &TwistedZ) -> [[Weight; 2]; 2] {
        let mut t: [[Weight; 2]; 2] = Default::default();
        for (a, z) in tz.classes.iter().enumerate() {
            let (s, u) = self.base_coords(Class(a as u64));
            t[s][u] = z.clone();
        }
        t
    }

    pub fn cover_table(&self, tz: &TwistedZ) -> [[Weight; 2]; 2] {
        let mut t: [[Weight; 2]; 2] = Default::default();
        for (a, z) in tz.classes.iter().enumerate() {
            let (s, u) = self.cover_coords(Class(a as u64));
            t[s][u] = z.clone();
        }
        t
    }
}

/// A simple closed curve of the graph in class `class`.
pub fn simple_representative(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    class: Class,
) -> Result<ClosedWalk> {
    if let Some(w) = simple_cycles(g)
        .into_iter()
        .find(|w| basis.walk_class(w) == class)
    {
        return Ok(w);
    }
    let mut found = None;
    for_each_simple_curve(g, |w| {
        if basis.walk_class(w) == class {
            found = Some(w.clone());
        }
        found.is_none()
    });
    found.ok_or_else(|| {
        Error::Underdetermined(format!(
            "no simple closed curve in class {}",
            class.label(basis.dim())
        ))
    })
}

/// Both sides of `|Z00~ + Z01~ + εZ10~ − εZ11~| = (Z00 + εZ10)² + (Z01 − εZ11)²`.
pub fn klein_sides(
    base: &[[Weight; 2]; 2],
    cover: &[[Weight; 2]; 2],
    epsilon: i8,
) -> (Weight, Weight) {
    let e = int(epsilon.into());
    let lhs = (&cover[0][0] + &cover[0][1] + &e * &cover[1][0] - &e * &cover[1][1]).abs();
    let a = &base[0][0] + &e * &base[1][0];
    let b = &base[0][1] - &e * &base[1][1];
    (lhs, &a * &a + &b * &b)
}

/// `Z(G̃) = ½ Z(G)²` on the Klein bottle for locally bipartite, non-bipartite,
/// translation-invariant graphs with `[D0 ∆ τD0]` one-sided.
pub fn verify_thm2(
    g: &EmbeddedGraph,
    tau: Option<&Translation>,
    d0: Option<&Matching>,
    opts: &VerifyOptions,
) -> Result<Report> {
    let mut report = Report::new("thm2", "");
    let Some(setting) = cover_preconditions(g, &mut report, Some(2))? else {
        return Ok(report.finish());
    };
    let flags = bipartite_flags(g, &setting.surface, &setting.basis);
    let mut ok = report.precondition("locally bipartite", flags.locally_bipartite);
    ok &= report.precondition("not bipartite", !flags.bipartite);
    let Some(tau) = tau else {
        report.precondition("translation supplied", false);
        return Ok(report.finish());
    };
    let (auto, weights) = translation_status(g, tau);
    ok &= report.precondition("translation is an automorphism", auto);
    ok &= report.precondition("weights are translation invariant", weights);
    if !ok {
        return Ok(report.finish());
    }
    let basis = &setting.basis;
    let found = report.timed("search", || {
        translated_reference(g, basis, tau, d0, |c| basis.w1_of(c) == 1)
    });
    let Some((d0, beta2)) = found else {
        report.precondition("some D0 has one-sided [D0 + tau(D0)]", false);
        return Ok(report.finish());
    };
    report.precondition("some D0 has one-sided [D0 + tau(D0)]", true);
    let frame = KleinFrame::new(g, &setting, beta2)?;
    let tz = report.timed("brute", || twisted_partition(g, basis, Some(&d0)))?;
    let lifted = setting.lift(g, &d0)?;
    let tz_cover = report.timed("brute", || {
        twisted_partition(&setting.cover.cover, &setting.cover_basis, Some(&lifted))
    })?;
    let z = &tz.total;
    report.check_exact(
        "Z(cover) = Z^2 / 2",
        &tz_cover.total,
        &(rational(1, 2) * z * z),
    );
    let (bt, ct) = (frame.base_table(&tz), frame.cover_table(&tz_cover));
    let zero = Weight::zero();
    report.check_exact("Z_10(G) = 0", &bt[1][0], &zero);
    report.check_exact("Z_11(G) = 0", &bt[1][1], &zero);
    report.check_exact("Z_10(cover) = 0", &ct[1][0], &zero);
    report.check_exact("Z_11(cover) = 0", &ct[1][1], &zero);
    report.check_exact("Z_00(G) = Z_01(G)", &bt[0][0], &bt[0][1]);
    if opts.pfaffian {
        let p = report.timed("pfaffian", || pfaffian_z(g, opts))?;
        let p_cover = report.timed("pfaffian", || pfaffian_z(&setting.cover.cover, opts))?;
        report.check(
            "pfaffian: Z(cover) = Z^2 / 2",
            p_cover,
            scaled_square(&p, &rational(1, 2)),
            opts.tol,
        );
        report.check(
            "pfaffian agrees with enumeration",
            p,
            exact(z.clone()),
            opts.tol,
        );
    }
    Ok(report.finish())
}

/// The conditional Klein-bottle statement: if `G` is locally bipartite with
/// `ℓ(β1) = 0`, `ℓ(β2) = 1` and `Z10(G̃) = 0` or `Z11(G̃) = 0`, then
/// `Z(G̃) = Z(G)²`. Not part of the supported catalogue.
pub fn verify_klein_vanishing(g: &EmbeddedGraph, d0: Option<&Matching>) -> Result<Report> {
    let mut report = Report::new("klein-vanishing", "");
    let Some(setting) = cover_preconditions(g, &mut report, Some(2))? else {
        return Ok(report.finish());
    };
    let basis = &setting.basis;
    let flags = bipartite_flags(g, &setting.surface, basis);
    if !report.precondition("locally bipartite", flags.locally_bipartite) {
        return Ok(report.finish());
    }
    let beta1 = basis
        .classes()
        .find(|&a| !a.is_zero() && basis.w1_of(a) == 0)
        .expect("Klein bottle");
    let beta2 = basis
        .classes()
        .find(|&a| basis.w1_of(a) == 1 && flags.ell(a) == Ok(1));
    let ok = report.precondition("l(beta1) = 0", flags.ell(beta1) == Ok(0))
        & report.precondition("l(beta2) = 1", beta2.is_some());
    if !ok {
        return Ok(report.finish());
    }
    let frame = KleinFrame::new(g, &setting, beta2.expect("checked"))?;
    let Some(d0) = reference_for(g, d0) else {
        report.check_exact(
            "Z(cover) = Z^2",
            &brute_force_partition(&setting.cover.cover),
            &Weight::zero(),
        );
        return Ok(report.finish());
    };
    let tz = twisted_partition(g, basis, Some(&d0))?;
    let tz_cover = twisted_partition(
        &setting.cover.cover,
        &setting.cover_basis,
        Some(&setting.lift(g, &d0)?),
    )?;
    let ct = frame.cover_table(&tz_cover);
    report.precondition(
        "Z_10(cover) = 0 or Z_11(cover) = 0",
        ct[1][0].is_zero() || ct[1][1].is_zero(),
    );
    report.check_exact("Z(cover) = Z^2", &tz_cover.total, &(&tz.total * &tz.total));
    Ok(report.finish())
}

/// `(Σ_{w1=0} (−1)^{q/2} Z_α)² + (Σ_{w1=1} (−1)^{(q−1)/2} Z_α)²`.
pub fn enhancement_rhs(basis: &HomologyBasis, q: &Enhancement, tz: &TwistedZ) -> Weight {
    let mut sums = [Weight::zero(), Weight::zero()];
    for a in basis.classes() {
        let w = basis.w1_of(a) as usize;
        let z = tz.get(a);
        if ((q.get(a) - w as u8) / 2).is_multiple_of(2) {
            sums[w] += z;
        } else {
            sums[w] -= z;
        }
    }
    &sums[0] * &sums[0] + &sums[1] * &sums[1]
}

/// `|Σ_α̃ (−1)^{q̃(α̃)} Z_α̃|`.
pub fn form_lhs(form: &QuadraticForm, tz: &TwistedZ) -> Weight {
    tz.classes
        .iter()
        .enumerate()
        .fold(Weight::zero(), |acc, (a, z)| {
            if form.get(Class(a as u64)) == 0 {
                acc + z
            } else {
                acc - z
            }
        })
        .abs()
}

fn values_label(q: &Enhancement, dim: usize) -> String {
    q.on_basis(dim)
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Side values for every enhancement, keyed by the enhancement's basis values.
fn side_values(
    g: &EmbeddedGraph,
    setting: &CoverSetting,
    enhancements: &[Enhancement],
    d0: Option<&Matching>,
) -> Result<(
    Vec<(Weight, Weight)>,
    Vec<QuadraticForm>,
    TwistedZ,
    TwistedZ,
)> {
    let tz = twisted_partition(g, &setting.basis, d0)?;
    let lifted = match &tz.reference {
        Some(d) => Some(setting.lift(g, d)?),
        None => None,
    };
    let tz_cover = twisted_partition(&setting.cover.cover, &setting.cover_basis, lifted.as_ref())?;
    let mut sides = Vec::with_capacity(enhancements.len());
    let mut forms = Vec::with_capacity(enhancements.len());
    for q in enhancements {
        q.check(&setting.basis)?;
        let form = induced_cover_form(g, &setting.basis, q, &setting.cover, &setting.cover_basis)?;
        sides.push((
            form_lhs(&form, &tz_cover),
            enhancement_rhs(&setting.basis, q, &tz),
        ));
        forms.push(form);
    }
    Ok((sides, forms, tz, tz_cover))
}

/// The general identity between twisted partition functions on `Σ` and `Σ̃`,
/// for one enhancement `q` or, when `q` is `None`, for all of them.
pub fn verify_main(
    g: &EmbeddedGraph,
    q: Option<&Enhancement>,
    d0: Option<&Matching>,
    opts: &VerifyOptions,
) -> Result<Report> {
    let mut report = Report::new("main", "");
    let Some(setting) = cover_preconditions(g, &mut report, None)? else {
        return Ok(report.finish());
    };
    let h = setting.genus();
    let enhancements = match q {
        Some(q) => vec![q.clone()],
        None => enumerate_enhancements(&setting.basis)?,
    };
    let (sides, forms, tz, tz_cover) =
        report.timed("brute", || side_values(g, &setting, &enhancements, d0))?;
    for (q, (lhs, rhs)) in enhancements.iter().zip(&sides) {
        report.check_exact(format!("q on basis = ({})", values_label(q, h)), lhs, rhs);
    }
    if q.is_none() {
        let mut counts: BTreeMap<&[u8], usize> = BTreeMap::new();
        for f in &forms {
            *counts.entry(&f.values).or_default() += 1;
        }
        report.check_exact(
            "distinct identities",
            &int(counts.len() as i64),
            &int(1 << (h - 1)),
        );
        let two_to_one = counts.values().all(|&c| c == 2);
        report.check_exact(
            "q -> induced form is two-to-one",
            &int(two_to_one.into()),
            &int(1),
        );
        if h == 2 {
            klein_checks(
                g,
                &setting,
                &enhancements,
                &forms,
                &tz,
                &tz_cover,
                &mut report,
            )?;
        }
        if let Some(alt) = alternative_reference(g, tz.reference.as_ref()) {
            let (alt_sides, ..) = report.timed("brute", || {
                side_values(g, &setting, &enhancements, Some(&alt))
            })?;
            let mut before: Vec<&(Weight, Weight)> = sides.iter().collect();
            let mut after: Vec<&(Weight, Weight)> = alt_sides.iter().collect();
            before.sort();
            after.sort();
            let same = before == after;
            report.check_exact(
                "side values over all enhancements are independent of D0",
                &int(same.into()),
                &int(1),
            );
        }
    }
    if opts.pfaffian {
        if let Some(d0) = &tz.reference {
            pfaffian_main(g, &setting, d0, &mut report)?;
        }
    }
    Ok(report.finish())
}

/// A perfect matching different from `d0`, if any.
fn alternative_reference(g: &EmbeddedGraph, d0: Option<&Matching>) -> Option<Matching> {
    let d0 = d0?;
    enumerate_matchings(g).into_iter().rev().find(|d| d != d0)
}

fn klein_checks(
    g: &EmbeddedGraph,
    setting: &CoverSetting,
    enhancements: &[Enhancement],
    forms: &[QuadraticForm],
    tz: &TwistedZ,
    tz_cover: &TwistedZ,
    report: &mut Report,
) -> Result<()> {
    let basis = &setting.basis;
    let beta2 = basis
        .classes()
        .find(|&a| basis.w1_of(a) == 1)
        .expect("one-sided class");
    let frame = KleinFrame::new(g, setting, beta2)?;
    report.check_exact(
        "lifts of beta1 are homologous",
        &int(frame.cover_beta1.0 as i64),
        &int(frame.cover_beta1_other.0 as i64),
    );
    let (bt, ct) = (frame.base_table(tz), frame.cover_table(tz_cover));
    let mut seen = [false; 2];
    for (q, form) in enhancements.iter().zip(forms) {
        let half = q.get(frame.beta1) / 2;
        report.check_exact(
            "induced form vanishes on beta2~",
            &int(form.get(frame.cover_beta2).into()),
            &int(0),
        );
        report.check_exact(
            "induced form on beta1~ is q(beta1)/2",
            &int(form.get(frame.cover_beta1).into()),
            &int(half.into()),
        );
        let epsilon: i8 = if half == 0 { 1 } else { -1 };
        if !std::mem::replace(&mut seen[half as usize], true) {
            let (lhs, rhs) = klein_sides(&bt, &ct, epsilon);
            report.check_exact(format!("klein identity epsilon = {epsilon:+}"), &lhs, &rhs);
        }
    }
    Ok(())
}

/// Ties the identity to Kasteleyn orientations: with `q` fitted to `(K, ω, D0)`
/// the right side is `|Pf(A^{K,ω})|²` and the left side `|Pf(A^{K̃})|`.
fn pfaffian_main(
    g: &EmbeddedGraph,
    setting: &CoverSetting,
    d0: &Matching,
    report: &mut Report,
) -> Result<()> {
    let k = find_kasteleyn(g, &setting.surface, &setting.omega)?;
    let kasteleyn_lift = lifted_is_kasteleyn(&setting.cover, &k)?;
    report.check_exact(
        "lifted orientation is Kasteleyn",
        &int(kasteleyn_lift.into()),
        &int(1),
    );
    report.check_exact(
        "cover matrix has the [[M1, M2], [M2, -M1]] block structure",
        &int(has_block_structure(g, &setting.cover, &setting.omega, &k).into()),
        &int(1),
    );
    let (cover_pf, base_sq) = report.timed("pfaffian", || pfaffian_magnitudes(g, setting, &k));
    report.check_exact("|Pf(cover)| = |Pf(base)|^2", &cover_pf, &base_sq);
    let tz = twisted_partition(g, &setting.basis, Some(d0))?;
    let p = twisted_pfaffian::<Exact>(g, &k, &setting.omega, Some(d0))?;
    let candidates: Vec<Enhancement> = enumerate_enhancements(&setting.basis)?
        .into_iter()
        .filter(|q| enhancement_sum(q, &tz) == p.value)
        .collect();
    report.check_exact(
        "some enhancement reproduces the twisted Pfaffian",
        &int((!candidates.is_empty()).into()),
        &int(1),
    );
    let (sides, ..) = side_values(g, setting, &candidates, Some(d0))?;
    for (q, (lhs, rhs)) in candidates.iter().zip(&sides) {
        let label = values_label(q, setting.genus());
        report.check_exact(
            format!("Kasteleyn enhancement ({label}): right side = |Pf(base)|^2"),
            rhs,
            &base_sq,
        );
        report.check_exact(
            format!("Kasteleyn enhancement ({label}): left side = |Pf(cover)|"),
            lhs,
            &cover_pf,
        );
    }
    Ok(())
}
