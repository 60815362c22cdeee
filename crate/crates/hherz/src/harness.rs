//! The verification suites behind the CLI subcommands.

use std::cell::{Cell, RefCell};
use std::f64::consts::{LN_2, PI};

use hherz_core::graded::{det_inv_bounds_check, g_function, sampled_heis_norm, weighted_point_bound_check, GradedMatrix, MatrixField};
use hherz_core::group::{self, norm_of, GroupDims, HPoint};
use hherz_core::hausdorff::{
    apply_commutator, apply_hausdorff, check_hypotheses, k1_constant, k2_constant, k3_constant, theorem_constant, theta_weight,
    Kernel, TheoremCase, TheoremParams,
};
use hherz_core::quadrature::{integrate_radial, integrate_region, QuadSpec, Region};
use hherz_core::spaces::{ball_average, cbmo_norm, combine_herz, herz_norm, herz_term, lq_norm, HerzParams, HerzTerm, TestFunction};
use hherz_core::weights::{
    ap_ratio, power_ball_measure, power_weight_indices, rh_ratio, sandwich_check, weighted_avg_bound_check, weighted_measure, Ball, Weight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::BaselineTable;
use crate::report::{Check, CheckReport, Hypotheses, InequalityReport, NestedBudget, Quantity, Tabular, TermRow};
use crate::scenario::{Resolved, Scenario, ScenarioError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("hypotheses violated: {}", .0.join("; "))]
    Hypotheses(Vec<String>),
    #[error("numerical failure: {0}")]
    Numeric(#[from] hherz_core::Error),
}

impl HarnessError {
    /// 2 for malformed input or failed hypotheses, 1 for anything that went wrong while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Scenario(_) | HarnessError::Hypotheses(_) => 2,
            HarnessError::Numeric(_) => 1,
        }
    }
}

fn hypotheses_of(tp: &TheoremParams, dims: &GroupDims) -> Hypotheses {
    let h = check_hypotheses(tp, dims);
    Hypotheses { ok: h.ok, case: h.case.map(|c| c.name().to_string()), violations: h.violations }
}

fn resolve_checked(sc: &Scenario) -> Result<(Resolved, Hypotheses), HarnessError> {
    let r = sc.resolve()?;
    let hyp = hypotheses_of(&r.tp, &r.dims);
    if !hyp.ok {
        return Err(HarnessError::Hypotheses(hyp.violations));
    }
    r.kernel.check_integrable(&r.spec, &r.dims)?;
    Ok((r, hyp))
}

fn herz_quantity(name: &str, terms: Vec<HerzTerm>, p: f64) -> (Quantity, Vec<TermRow>) {
    let h = combine_herz(terms, p);
    let mut q = Quantity { value: h.value, err_est: h.err_est, flags: Vec::new() };
    if !h.converged {
        q.flags.push(format!(
            "{name}: window edge terms carry {:.2}% (lower) and {:.2}% (upper) of the sum",
            100.0 * h.lower_edge_fraction,
            100.0 * h.upper_edge_fraction
        ));
    }
    for t in &h.terms {
        if t.lq.divergent {
            q.flags.push(format!("{name}: annulus {} not integrable", t.k));
        }
    }
    (q, h.terms.iter().map(TermRow::from).collect())
}

/// One annulus of the LHS Herz norm. Each outer node evaluates `T^b f` by its own inner quadrature.
fn lhs_term(r: &Resolved, k: i32, inner_evals: &Cell<u64>) -> hherz_core::Result<HerzTerm> {
    let failure = RefCell::new(None);
    let (abs_sum, err_sum) = (Cell::new(0.0f64), Cell::new(0.0f64));
    let mut t = herz_term(
        |x| {
            let at = match HPoint::new(x) {
                Ok(p) => p,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return 0.0;
                }
            };
            match apply_commutator(|z| r.b.eval(z), |z| r.f.eval(z), &r.kernel, &r.field, &at, &r.lhs_inner, &r.dims) {
                Ok(v) => {
                    inner_evals.set(inner_evals.get() + v.n_evals);
                    abs_sum.set(abs_sum.get() + v.value.abs());
                    err_sum.set(err_sum.get() + v.err_est);
                    v.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        &r.lhs_herz,
        k,
        &r.lhs_outer,
        &r.dims,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // inner errors enter through the mean relative error over the outer nodes
    if abs_sum.get() > 0.0 {
        t.lq.err_est += err_sum.get() / abs_sum.get() * t.lq.value;
    }
    Ok(t)
}

fn lhs_norm(r: &Resolved) -> hherz_core::Result<(Quantity, Vec<TermRow>, u64)> {
    let ks: Vec<i32> = (r.lhs_herz.k_min..=r.lhs_herz.k_max).collect();
    let out: Vec<(HerzTerm, u64)> = ks
        .par_iter()
        .map(|&k| {
            let evals = Cell::new(0);
            lhs_term(r, k, &evals).map(|t| (t, evals.get()))
        })
        .collect::<hherz_core::Result<_>>()?;
    let inner: u64 = out.iter().map(|o| o.1).sum();
    let (q, rows) = herz_quantity("lhs", out.into_iter().map(|o| o.0).collect(), r.lhs_herz.p);
    Ok((q, rows, inner))
}

fn f_norm(r: &Resolved) -> hherz_core::Result<(Quantity, Vec<TermRow>)> {
    let ks: Vec<i32> = (r.f_herz.k_min..=r.f_herz.k_max).collect();
    let terms = ks
        .par_iter()
        .map(|&k| herz_term(|x| r.f.eval(x), &r.f_herz, k, &r.spec, &r.dims))
        .collect::<hherz_core::Result<Vec<_>>>()?;
    Ok(herz_quantity("f_herz", terms, r.f_herz.p))
}

fn b_norm(r: &Resolved) -> hherz_core::Result<(Quantity, f64)> {
    let c = cbmo_norm(|x| r.b.eval(x), r.tp.q, &r.tp.weight, r.cbmo_grid, &r.spec, &r.dims)?;
    let mut q = Quantity::exact(c.value);
    if c.edge_max {
        q.flags.push(format!("b_cbmo: maximum sits on the grid edge R = {}", c.argmax_radius));
    }
    Ok((q, c.argmax_radius))
}

/// End-to-end check of one scenario: `lhs`, the theorem constant, `‖b‖_CBMO` and `‖f‖_Herz`.
pub fn run_inequality(sc: &Scenario) -> Result<InequalityReport, HarnessError> {
    let (r, hyp) = resolve_checked(sc)?;
    let k = theorem_constant(&r.kernel, &r.field, &r.tp, &r.spec, &r.dims)?;
    let k_q = Quantity::from_quad("k_constant", &k);
    let ((b_res, f_res), lhs_res) = rayon::join(|| rayon::join(|| b_norm(&r), || f_norm(&r)), || lhs_norm(&r));
    let (b_q, argmax) = b_res?;
    let (f_q, f_terms) = f_res?;
    let (lhs_q, lhs_terms, inner_evals) = lhs_res?;

    let rhs = k_q.value * b_q.value * f_q.value;
    let (ratio, degenerate) = if rhs > 0.0 {
        (Some(lhs_q.value / rhs), false)
    } else if lhs_q.value == 0.0 && k_q.value > 0.0 {
        // constant symbol: both sides vanish
        (Some(0.0), false)
    } else if lhs_q.value == 0.0 {
        (None, true)
    } else {
        (Some(f64::INFINITY), false)
    };
    let pass = degenerate || ratio.is_some_and(f64::is_finite);
    Ok(InequalityReport {
        scenario: sc.name.clone(),
        digest: sc.digest(),
        theorem: r.tp.which.name().to_string(),
        n: sc.n,
        seed: sc.quad.seed,
        budget: sc.quad.budget,
        hypotheses: hyp,
        lhs: lhs_q,
        k_constant: k_q,
        b_cbmo: b_q,
        f_herz: f_q,
        rhs,
        ratio,
        degenerate,
        nested: NestedBudget {
            outer_budget: r.lhs_outer.budget,
            inner_budget: r.lhs_inner.budget,
            annuli: lhs_terms.len(),
            inner_evals,
        },
        lhs_terms,
        f_terms,
        cbmo_argmax_radius: argmax,
        baseline: None,
        pass,
    })
}

/// Compares against (or pins into) the baseline table. Degenerate runs have nothing to pin.
pub fn apply_baseline(report: &mut InequalityReport, table: &mut BaselineTable) {
    if let Some(ratio) = report.ratio.filter(|r| r.is_finite()) {
        let check = table.check_or_pin(&report.scenario, ratio);
        report.pass &= check.pass;
        report.baseline = Some(check);
    }
}

/// Named values without references, for the `norms` and `constants` subcommands.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ValuesReport {
    pub scenario: String,
    pub digest: String,
    pub values: Vec<(String, Quantity)>,
    pub hypotheses: Option<Hypotheses>,
    pub pass: bool,
}

impl Tabular for ValuesReport {
    fn header() -> Vec<&'static str> {
        vec!["scenario", "quantity", "value", "err_est", "flags"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.values
            .iter()
            .map(|(name, q)| {
                vec![self.scenario.clone(), name.clone(), format!("{:e}", q.value), format!("{:e}", q.err_est), q.flags.join("; ")]
            })
            .collect()
    }
}

/// `‖f‖_Herz` with `(α₁, p, q₁)`, `‖b‖_CBMO`, and `‖f‖_{L^{q₁}}` over the window.
pub fn run_norms(sc: &Scenario) -> Result<ValuesReport, HarnessError> {
    let r = sc.resolve()?;
    let (f_q, _) = f_norm(&r)?;
    let (b_q, _) = b_norm(&r)?;
    let region = Region::annulus(r.f_herz.k_min - 1, r.f_herz.k_max);
    let lq = lq_norm(|x| r.f.eval(x), r.f_herz.q, &region, &r.tp.weight, &r.spec, &r.dims)?;
    let values = vec![
        (String::from("f_herz"), f_q),
        (String::from("b_cbmo"), b_q),
        (String::from("f_lq_window"), Quantity::from_quad("f_lq_window", &lq)),
    ];
    let pass = values.iter().all(|(_, q)| q.value.is_finite());
    Ok(ValuesReport { scenario: sc.name.clone(), digest: sc.digest(), values, hypotheses: None, pass })
}

/// The kernel integral and the theorem constant.
pub fn run_constants(sc: &Scenario) -> Result<ValuesReport, HarnessError> {
    let (r, hyp) = resolve_checked(sc)?;
    let kint = r.kernel.check_integrable(&r.spec, &r.dims)?;
    let k = theorem_constant(&r.kernel, &r.field, &r.tp, &r.spec, &r.dims)?;
    let name = match r.tp.which {
        TheoremCase::Thm1CaseI => "k1",
        TheoremCase::Thm1CaseII => "k2",
        TheoremCase::Thm2 => "k3",
    };
    let values = vec![
        (String::from("kernel_integral"), Quantity::from_quad("kernel_integral", &kint)),
        (name.to_string(), Quantity::from_quad(name, &k)),
    ];
    let pass = values.iter().all(|(_, q)| q.value.is_finite());
    Ok(ValuesReport { scenario: sc.name.clone(), digest: sc.digest(), values, hypotheses: Some(hyp), pass })
}

/// Sample counts for [`run_axioms`].
#[derive(Debug, Clone, Copy)]
pub struct AxiomOptions {
    pub n: usize,
    /// Random instances for each group identity.
    pub samples: usize,
    pub seed: u64,
    pub matrices: usize,
    /// Sphere samples per matrix for the operator-norm check.
    pub norm_samples: usize,
    /// Points per matrix for the weighted point bound.
    pub point_samples: usize,
    /// Random `(M, β, p, q)` for the multiplicativity of `G`.
    pub g_trials: usize,
}

impl AxiomOptions {
    pub fn new(n: usize, samples: usize, seed: u64) -> Self {
        AxiomOptions { n, samples, seed, matrices: 50, norm_samples: 100_000, point_samples: 10_000, g_trials: 1_000 }
    }
}

pub const AXIOM_TOL: f64 = 1e-12;

/// Default evaluation budget per integral for the calibration suite.
pub const CALIBRATION_BUDGET: u64 = 1 << 17;

fn random_point(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> HPoint {
    let c: Vec<f64> = (0..len).map(|_| rng.gen_range(-scale..scale)).collect();
    HPoint::new(&c).expect("finite coordinates")
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let mag = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / mag
}

/// A random invertible graded matrix with entries of order one.
pub fn random_graded(rng: &mut ChaCha8Rng, n: usize) -> GradedMatrix {
    let dim = 2 * n;
    loop {
        let b: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let a = rng.gen_range(0.25..4.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        if let Ok(m) = GradedMatrix::new(n, &b, a) {
            if m.block().len() == dim * dim && m.condition_number() < 50.0 {
                return m;
            }
        }
    }
}

/// Group identities and graded-matrix properties on random instances.
pub fn run_axioms(opts: &AxiomOptions) -> Result<CheckReport, HarnessError> {
    let dims = GroupDims::new(opts.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = group_checks(opts.n, opts.samples, &mut rng)?;
    checks.extend(graded_checks(opts, &dims, &mut rng)?);
    Ok(CheckReport::new("axioms", opts.seed, checks))
}

/// Group law, dilations and the homogeneous norm on `samples` random triples.
pub fn group_checks(n: usize, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, HarnessError> {
    let dims = GroupDims::new(n)?;
    let len = dims.coord_len();
    let zero = HPoint::zero(n)?;
    let (mut assoc, mut ident, mut inv, mut auto, mut homog, mut sym, mut left, mut tri) = (0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
    for _ in 0..samples {
        let a = random_point(rng, len, 2.0);
        let b = random_point(rng, len, 2.0);
        let c = random_point(rng, len, 2.0);
        let r = (rng.gen_range(0.01f64.ln()..100f64.ln())).exp();
        let ab_c = a.mul(&b)?.mul(&c)?;
        let a_bc = a.mul(&b.mul(&c)?)?;
        assoc = assoc.max(rel_gap(ab_c.coords(), a_bc.coords()));
        ident = ident.max(rel_gap(a.mul(&zero)?.coords(), a.coords())).max(rel_gap(zero.mul(&a)?.coords(), a.coords()));
        inv = inv.max(rel_gap(a.mul(&a.inv())?.coords(), zero.coords())).max(rel_gap(a.inv().mul(&a)?.coords(), zero.coords()));
        let lhs = a.mul(&b)?.dilate(r)?;
        let rhs = a.dilate(r)?.mul(&b.dilate(r)?)?;
        auto = auto.max(rel_gap(lhs.coords(), rhs.coords()));
        let na = a.norm();
        homog = homog.max((a.dilate(r)?.norm() - r * na).abs() / (r * na).max(1e-300));
        sym = sym.max((a.inv().norm() - na).abs() / na.max(1e-300));
        let d_ab = a.dist(&b)?;
        let d_shift = c.mul(&a)?.dist(&c.mul(&b)?)?;
        left = left.max((d_shift - d_ab).abs() / d_ab.max(1.0));
        let d_ac = a.dist(&c)?;
        let d_bc = b.dist(&c)?;
        tri = tri.max((d_ac - d_ab - d_bc).max(0.0) / d_ac.max(1.0));
    }
    Ok(vec![
        Check::relative("homogeneous dimension Q", dims.q as f64, (2 * n + 2) as f64, 0.0),
        Check::residual("associativity", assoc, AXIOM_TOL),
        Check::residual("identity", ident, AXIOM_TOL),
        Check::residual("inverse", inv, AXIOM_TOL),
        Check::residual("dilation is an automorphism", auto, AXIOM_TOL),
        Check::residual("norm homogeneity", homog, AXIOM_TOL),
        Check::residual("norm symmetry", sym, AXIOM_TOL),
        Check::residual("left invariance of distance", left, AXIOM_TOL),
        Check::residual("triangle inequality", tri, AXIOM_TOL),
    ])
}

/// Norm, determinant, `G` and point-bound properties of `opts.matrices` random graded matrices.
pub fn graded_checks(opts: &AxiomOptions, dims: &GroupDims, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, HarnessError> {
    let n = opts.n;
    let len = dims.coord_len();
    let mats: Vec<GradedMatrix> = (0..opts.matrices).map(|_| random_graded(rng, n)).collect();
    let seeds: Vec<u64> = (0..opts.matrices).map(|_| rng.gen()).collect();

    // operator norm: the sampled sup must sit in [closed(1−10⁻³), closed]
    let per_matrix: Vec<(f64, f64, bool, f64, bool)> = mats
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(m, &s)| {
            let mut local = ChaCha8Rng::seed_from_u64(s);
            let closed = m.heis_norm();
            let sampled = sampled_heis_norm(m, opts.norm_samples, &mut local);
            let over = ((sampled - closed) / closed).max(0.0);
            let under = ((closed - sampled) / closed).max(0.0);
            let det = det_inv_bounds_check(m, dims);
            let beta = local.gen_range(-(n as f64) + 1e-3..3.0);
            let pts: Vec<HPoint> = (0..opts.point_samples).map(|_| random_point(&mut local, len, 3.0)).collect();
            let pb = weighted_point_bound_check(m, beta, &pts).expect("beta above -n");
            (over, under, det.holds, pb.max_ratio / pb.bound, pb.holds)
        })
        .collect();
    let over = per_matrix.iter().map(|p| p.0).fold(0.0, f64::max);
    let under = per_matrix.iter().map(|p| p.1).fold(0.0, f64::max);
    let det_ok = per_matrix.iter().filter(|p| p.2).count();
    let worst_point = per_matrix.iter().map(|p| p.3).fold(0.0, f64::max);
    let point_ok = per_matrix.iter().filter(|p| p.4).count();

    let mut g_res = 0.0f64;
    for _ in 0..opts.g_trials {
        let m = &mats[rng.gen_range(0..mats.len())];
        let beta = rng.gen_range(-3.0..3.0);
        let p = rng.gen_range(1..=6) as f64;
        let q = rng.gen_range(1..=6) as f64;
        let whole = g_function(m, beta * (1.0 / q + 1.0 / p));
        let split = g_function(m, beta / q) * g_function(m, beta / p);
        g_res = g_res.max((whole - split).abs() / whole.abs());
    }
    Ok(vec![
        Check::residual("operator norm: sampled sup above closed form", over, AXIOM_TOL),
        Check::residual("operator norm: sampled sup below closed form", under, 1e-3),
        Check::holds("determinant sandwich ‖M‖^-Q ≤ |det M⁻¹| ≤ ‖M⁻¹‖^Q", det_ok as f64, det_ok == mats.len()),
        Check::residual("G multiplicativity", g_res, AXIOM_TOL),
        Check::holds("weighted point bound |Mx|^β ≤ G(M,β)|x|^β (max ratio/bound)", worst_point, point_ok == mats.len()),
    ])
}

/// Ω_Q by hit-or-miss sampling in the cube `[-1, 1]^{2n+1}`.
pub fn monte_carlo_ball_volume(n: usize, samples: usize, seed: u64) -> f64 {
    let len = 2 * n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; len];
    let mut hits = 0usize;
    for _ in 0..samples {
        for c in x.iter_mut() {
            *c = rng.gen_range(-1.0..1.0);
        }
        if group::norm4_of(&x) < 1.0 {
            hits += 1;
        }
    }
    hits as f64 / samples as f64 * (1u64 << len) as f64
}

fn worked_thm1() -> TheoremParams {
    TheoremParams {
        which: TheoremCase::Thm1CaseI,
        p: 2.0,
        q: 4.0,
        q1: 2.0,
        q2: 1.25,
        alpha1: -1.0,
        alpha2: -2.2,
        delta: None,
        weight: Weight::Unit,
        indices: None,
    }
}

fn worked_thm2() -> TheoremParams {
    TheoremParams { which: TheoremCase::Thm2, q2: 4.0 / 3.0, alpha1: 0.0, alpha2: -1.0, ..worked_thm1() }
}

/// Every analytic oracle, computed by the library and compared with its closed form.
pub fn run_calibration(seed: u64, budget: u64) -> Result<CheckReport, HarnessError> {
    let mut c = measure_checks(seed, budget)?;
    c.extend(oracle_checks(seed, budget)?);
    c.extend(weight_checks(budget, seed)?);
    Ok(CheckReport::new("calibrate", seed, c))
}

/// Ball volumes and power-weight ball measures.
pub fn measure_checks(seed: u64, budget: u64) -> Result<Vec<Check>, HarnessError> {
    let d = GroupDims::new(1)?;
    let spec = QuadSpec::stratified(budget, seed);
    let omega = PI * PI / 2.0;
    let mut c = Vec::new();

    // group constants
    c.push(Check::relative("Ω_Q(n=1) by Monte Carlo, 10⁶ samples", monte_carlo_ball_volume(1, 1_000_000, seed), omega, 5e-3));
    c.push(Check::relative("Ω_Q(n=1) by radial reduction", d.omega_q, omega, 1e-10));
    let d2 = GroupDims::new(2)?;
    c.push(Check::relative("Ω_Q(n=2) by radial reduction", d2.omega_q, 2.0 * PI * PI / 3.0, 1e-10));
    c.push(Check::relative("Ω_Q(n=2) by Monte Carlo", monte_carlo_ball_volume(2, 1_000_000, seed), d2.omega_q, 1e-2));

    // quadrature
    let ball = integrate_region(|_| 1.0, &Region::ball(0), &spec, &d)?;
    c.push(Check::relative("|B(0,1)| by quadrature", ball.value, omega, 1e-2));
    let ann = integrate_region(|y| norm_of(y).powi(-2), &Region::annulus(0, 1), &spec, &d)?;
    c.push(Check::relative("∫_{1≤|y|<2} |y|^-2", ann.value, 3.0 * PI * PI, 1e-2));
    let cube = integrate_region(|_| 1.0, &Region::unit_cube(1), &spec, &d)?;
    c.push(Check::relative("unit cube volume", cube.value, 1.0, 1e-12));

    // weights
    for beta in [-2.0, 0.0, 2.0] {
        for k in -2..=2 {
            let closed = power_ball_measure(beta, k, &d)?;
            let quad = weighted_measure(&Weight::Power { beta }, &Region::ball(k), &spec, &d)?;
            c.push(Check::relative(format!("v(B_{k}) for β={beta}"), quad.value, closed, 1e-2));
        }
    }
    c.push(Check::relative("v(B_0), β=2", power_ball_measure(2.0, 0, &d)?, PI * PI / 3.0, 1e-12));
    c.push(Check::relative("v(B_1), β=2", power_ball_measure(2.0, 1, &d)?, 2.0 * PI * PI * 64.0 / 6.0, 1e-12));
    Ok(c)
}

/// Weight ratios, norms, operators and constants against their closed forms.
pub fn oracle_checks(seed: u64, budget: u64) -> Result<Vec<Check>, HarnessError> {
    let d = GroupDims::new(1)?;
    let spec = QuadSpec::stratified(budget, seed);
    let omega = PI * PI / 2.0;
    let w_q = 2.0 * PI * PI;
    let mut c = Vec::new();
    let b1 = Ball::origin(1.0);
    let a1 = ap_ratio(&Weight::Power { beta: -2.0 }, 1.0, &b1, &spec, &d)?;
    c.push(Check::relative("A_1 ratio of |x|^-2 on B(0,1)", a1.value, 2.0, 1e-2));
    let rh = rh_ratio(&Weight::Power { beta: -2.0 }, 1.5, &b1, &spec, &d)?;
    c.push(Check::relative("RH_1.5 ratio of |x|^-2 on B(0,1)", rh.value, 4f64.powf(2.0 / 3.0) / 2.0, 1e-2));
    let avg = weighted_avg_bound_check(&Weight::Unit, 2.0, norm_of, &b1, &spec, &d)?;
    c.push(Check::relative("avg |x| on B(0,1)", avg.lhs, 0.8, 1e-2));
    c.push(Check::relative("(avg |x|²)^½ on B(0,1)", avg.rhs, (2.0f64 / 3.0).sqrt(), 1e-2));

    // function spaces
    let cb = TestFunction::CharBall { k: 0 };
    let lq = lq_norm(|x| cb.eval(x), 2.0, &Region::ball(0), &Weight::Unit, &spec, &d)?;
    c.push(Check::relative("‖χ_B0‖_L2", lq.value, omega.sqrt(), 1e-2));
    let hp = HerzParams::new(1.0, 2.0, 2.0, Weight::Unit, -12, 12)?;
    let h = herz_norm(|x| cb.eval(x), &hp, &spec, &d)?;
    let herz_oracle = (omega.powf(1.5) * (15.0 / 16.0) * (64.0 / 63.0)).sqrt();
    c.push(Check::relative("Herz norm of χ_B0 (α=1, p=q=2)", h.value, herz_oracle, 1e-2));
    let sq = ball_average(|x| norm_of(x).powi(2), 1.0, &spec, &d)?;
    c.push(Check::relative("avg |x|² on B(0,1)", sq.value, 2.0 / 3.0, 1e-2));
    let log = TestFunction::LogNorm;
    let cbmo2 = cbmo_norm(|x| log.eval(x), 2.0, &Weight::Unit, (-8, 8), &spec, &d)?;
    c.push(Check::relative("CBMO_2 of log|x|", cbmo2.value, 0.25, 1e-2));
    let cbmo4 = cbmo_norm(|x| log.eval(x), 4.0, &Weight::Unit, (-8, 8), &spec, &d)?;
    c.push(Check::relative("CBMO_4 of log|x|", cbmo4.value, 3f64.sqrt() / 4.0, 1e-2));

    // operators and constants
    let shell = Kernel::char_shell(1.0, 2.0)?;
    let pow2 = TestFunction::Power { lambda: 2.0 };
    let x = HPoint::new(&[0.6, -0.3, 0.8])?;
    let nx2 = x.norm().powi(2);
    let t = apply_hausdorff(|z| pow2.eval(z), &shell, &MatrixField::InverseDilation, &x, &spec, &d)?;
    c.push(Check::relative("T_Φ|x|^-2 = 3π²|x|^-2", t.value, 3.0 * PI * PI / nx2, 1e-2));
    let id = MatrixField::Constant(GradedMatrix::identity(1)?);
    let bump = TestFunction::Bump { k_center: 0.0, width: 3.0 };
    let ti = apply_hausdorff(|z| bump.eval(z), &shell, &id, &x, &spec, &d)?;
    c.push(Check::relative("T_{Φ,I} f = 2π² log2 f", ti.value, 2.0 * PI * PI * LN_2 * bump.eval(x.coords()), 1e-2));
    let com = apply_commutator(|z| log.eval(z), |z| pow2.eval(z), &shell, &MatrixField::InverseDilation, &x, &spec, &d)?;
    c.push(Check::relative("commutator with log|x|", com.value, 2.0 * PI * PI * (2.0 * LN_2 - 0.75) / nx2, 1e-2));
    let k1 = k1_constant(&shell, &MatrixField::InverseDilation, &worked_thm1(), &spec, &d)?;
    c.push(Check::relative("K₁ worked value", k1.value, 4.0 * PI * PI * (3.0 * LN_2 - 1.0), 1e-2));
    let tp2 = TheoremParams { which: TheoremCase::Thm1CaseII, q1: 8.0, q2: 2.0, alpha2: -2.5, ..worked_thm1() };
    let k2 = k2_constant(&Kernel::char_shell(0.25, 0.5)?, &MatrixField::InverseDilation, &tp2, &spec, &d)?;
    let k2_oracle = 2.0 * w_q * (4.0 * 2f64.sqrt() * (1.0 - LN_2) - 8.0 + 12.0 * LN_2);
    c.push(Check::relative("K₂ worked value", k2.value, k2_oracle, 1e-2));
    let unit_kernel = Kernel::custom(|_| 1.0, 1e-3, None, true)?;
    let tp_theta = TheoremParams { q: 2.0, q1: 2.0, ..worked_thm2() };
    let th = theta_weight(&[2.0, 0.0, 0.0], &unit_kernel, &MatrixField::InverseDilation, &tp_theta, &d)?;
    c.push(Check::relative("Θ at |y|=2", th, LN_2, 1e-12));
    let k3 = k3_constant(&shell, &MatrixField::InverseDilation, &worked_thm2(), &spec, &d)?;
    let k3_oracle = integrate_radial(|r| 2.0 * r.powi(-2) * (2.0 * r).ln(), 1.0, 2.0, &d)?.value;
    c.push(Check::relative("K₃ (α₁=0) against the radial reduction", k3.value, k3_oracle, 1e-2));
    Ok(c)
}

/// Power weights `|x|^β`, `β ∈ {-2..2}`: measure sandwich, doubling, and the weighted average bound.
pub fn weight_checks(budget: u64, seed: u64) -> Result<Vec<Check>, HarnessError> {
    let d = GroupDims::new(1)?;
    let q = d.q_f64();
    let spec = QuadSpec::stratified(budget, seed);
    let mut off = vec![0.0; d.coord_len()];
    off[0] = 1.0;
    off[d.coord_len() - 1] = 0.5;
    let balls = [Ball::origin(1.0), Ball::at(HPoint::new(&off)?, 0.5)];
    let per_beta: Vec<Vec<Check>> = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .par_iter()
        .map(|&beta| -> Result<Vec<Check>, HarnessError> {
            let w = Weight::power(beta, &d)?;
            let idx = power_weight_indices(beta, &d)?;
            // A_p with room above the critical index
            let p = 2.0;
            let r = if idx.r_w.is_finite() { 0.5 * (1.0 + idx.r_w) } else { f64::INFINITY };
            let mut c = Vec::new();
            let closed = power_ball_measure(beta, 1, &d)? / power_ball_measure(beta, 0, &d)?;
            c.push(Check::relative(format!("β={beta}: v(2B)/v(B) closed form"), closed, 2f64.powf(q + beta), 1e-12));
            let quad = weighted_measure(&w, &Region::ball(1), &spec, &d)?.value / weighted_measure(&w, &Region::ball(0), &spec, &d)?.value;
            c.push(Check::relative(format!("β={beta}: v(2B)/v(B) by quadrature"), quad, 2f64.powf(q + beta), 1e-2));
            let sw = sandwich_check(&w, p, r, 6, &spec, &d)?;
            c.push(Check::holds(format!("β={beta}: measure sandwich lower constant (p={p})"), sw.c1, sw.holds));
            c.push(Check::holds(format!("β={beta}: measure sandwich upper constant (r={r})"), sw.c2, sw.holds));
            for (i, ball) in balls.iter().enumerate() {
                let avg = weighted_avg_bound_check(&w, p, |x| 1.0 + norm_of(x), ball, &spec, &d)?;
                let ap = ap_ratio(&w, p, ball, &spec, &d)?;
                let bound = ap.value.powf(1.0 / p);
                c.push(Check::holds(
                    format!("β={beta}: average bound constant ≤ A_p ratio^(1/p) on ball {i}"),
                    avg.c_min,
                    avg.c_min <= bound * (1.0 + 1e-9),
                ));
            }
            Ok(c)
        })
        .collect::<Result<_, _>>()?;
    Ok(per_beta.into_iter().flatten().collect())
}
