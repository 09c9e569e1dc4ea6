//! One function per subcommand: compute rows and in-run checks.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use belltime_core::feasibility::{bisect_critical_g, lhv_membership, target_matrix, verify_certificate};
use belltime_core::lhv::{chsh_of_model, monte_carlo_correlation_on_stream, CosineModel, TrigResponseModel};
use belltime_core::random_field::{
    continuum_covariance, lattice_covariance, lattice_covariance_matrix, moment_from_samples, sample_fields,
    MomentumLattice,
};
use belltime_core::rng::stream_rng;
use belltime_core::spatial::{
    disentanglement_scan, product_representation, BoxRegion, GaussianPacket3D, ProductWavefunction,
};
use belltime_core::spin::{chsh_combination, pair_expectation, singlet_correlation, AngleSet, UnitVector3};
use belltime_core::vacuum::{
    cluster_decay_sweep, fit_decay, proper_time_integral, residual_series, w0_asymptotic, w0_asymptotic_4pi,
    w0_spacelike, MassParam, SmearedField, SpacetimePoint, WickMonomial,
};
use belltime_core::{Error, Result};

use crate::args::{ChshArgs, FeasibilityArgs, GfactorArgs, LhvArgs, ModelKind, RandomFieldArgs, SpreadingArgs, VacuumArgs};
use crate::output::{Check, Report, Table};

/// Stream pair reserved for drawing random model parameters and vectors.
const SETUP_STREAM: u32 = u32::MAX;

pub fn chsh(a: &ChshArgs, seed: u64) -> Result<Report> {
    let angles = AngleSet::new(a.alphas.clone(), a.betas.clone())?;
    let mut table = Table::new(&["kind", "i", "j", "alpha", "beta", "value", "reference", "abs_error"]);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    let mut p = vec![vec![0.0; angles.betas().len()]; angles.alphas().len()];
    for (i, &alpha) in angles.alphas().iter().enumerate() {
        for (j, &beta) in angles.betas().iter().enumerate() {
            let v = pair_expectation(i + 1, j + 1, &angles)?;
            let r = (alpha - beta).cos();
            worst = worst.max((v - r).abs());
            p[i][j] = v;
            table.push(vec![
                ("kind", "pair".into()),
                ("i", (i + 1).into()),
                ("j", (j + 1).into()),
                ("alpha", alpha.into()),
                ("beta", beta.into()),
                ("value", v.into()),
                ("reference", r.into()),
                ("abs_error", (v - r).abs().into()),
            ]);
        }
    }
    checks.push(Check::new("operator family equals cos(α_i − β_j)", worst <= 1e-12, format!("max error {worst:e}")));

    if angles.alphas().len() == 2 && angles.betas().len() == 2 {
        let s = chsh_combination([[p[0][0], p[0][1]], [p[1][0], p[1][1]]]);
        let optimal = AngleSet::chsh_optimal();
        let is_optimal = angles == optimal;
        let reference = 2.0 * SQRT_2;
        table.push(vec![
            ("kind", "chsh".into()),
            ("value", s.into()),
            ("reference", reference.into()),
            ("abs_error", (s - reference).abs().into()),
        ]);
        if is_optimal {
            checks.push(Check::new("CHSH value equals 2√2", (s - reference).abs() <= 1e-12, format!("{s}")));
        } else {
            checks.push(Check::new("CHSH value within Tsirelson bound", s <= reference + 1e-9, format!("{s}")));
        }
    }

    let mut rng = stream_rng(seed, SETUP_STREAM, 0);
    let mut worst = 0.0f64;
    for _ in 0..a.pairs {
        let x = UnitVector3::random(&mut rng);
        let y = UnitVector3::random(&mut rng);
        worst = worst.max((singlet_correlation(&x, &y) + x.dot(&y)).abs());
    }
    table.push(vec![("kind", "singlet".into()), ("i", a.pairs.into()), ("abs_error", worst.into())]);
    checks.push(Check::new("singlet correlation equals −a·b", worst <= 1e-12, format!("{} pairs, max error {worst:e}", a.pairs)));
    Ok(Report { table, checks })
}

pub fn lhv_simulate(a: &LhvArgs, seed: u64) -> Result<Report> {
    let angles = AngleSet::new(a.alphas.clone(), a.betas.clone())?;
    let mut table = Table::new(&["kind", "model", "alpha", "beta", "mean", "stderr", "reference", "z"]);
    let mut checks = Vec::new();
    match a.model {
        ModelKind::Cosine => {
            let model = CosineModel::new(a.g)?;
            let mut worst = 0.0f64;
            for (i, &alpha) in angles.alphas().iter().enumerate() {
                for (j, &beta) in angles.betas().iter().enumerate() {
                    let pair = (i * angles.betas().len() + j) as u32;
                    let est = monte_carlo_correlation_on_stream(&model, alpha, beta, a.n, seed, pair)?;
                    let r = a.g * (alpha - beta).cos();
                    let z = (est.mean - r) / est.stderr;
                    worst = worst.max(z.abs());
                    table.push(vec![
                        ("kind", "correlation".into()),
                        ("model", "cosine".into()),
                        ("alpha", alpha.into()),
                        ("beta", beta.into()),
                        ("mean", est.mean.into()),
                        ("stderr", est.stderr.into()),
                        ("reference", r.into()),
                        ("z", z.into()),
                    ]);
                }
            }
            checks.push(Check::new("cosine model within 4·stderr of g·cos(α−β)", worst <= 4.0, format!("max |z| = {worst:.3}")));
        }
        ModelKind::Random => {
            if angles.alphas().len() != 2 || angles.betas().len() != 2 {
                return Err(Error::Validation("random models are scored by CHSH and need 2 + 2 angles".into()));
            }
            let mut rng = stream_rng(seed, SETUP_STREAM, 0);
            let mut worst = f64::NEG_INFINITY;
            for k in 0..a.models {
                let model = TrigResponseModel::random(&mut rng);
                let est = chsh_of_model(&model, &angles, a.n, seed.wrapping_add(k as u64 + 1))?;
                let z = (est.value - 2.0) / est.stderr.max(f64::MIN_POSITIVE);
                worst = worst.max(z);
                table.push(vec![
                    ("kind", "chsh".into()),
                    ("model", k.into()),
                    ("mean", est.value.into()),
                    ("stderr", est.stderr.into()),
                    ("reference", 2.0.into()),
                    ("z", z.into()),
                ]);
            }
            checks.push(Check::new(
                "every model has CHSH ≤ 2 + 4·stderr",
                worst <= 4.0,
                format!("{} models, max (S − 2)/stderr = {worst:.3}", a.models),
            ));
        }
    }
    Ok(Report { table, checks })
}

pub fn feasibility(a: &FeasibilityArgs) -> Result<Report> {
    let angles = AngleSet::new(a.alphas.clone(), a.betas.clone())?;
    let mut table = Table::new(&[
        "kind", "g", "feasible", "certificate", "lp_residual", "functional_value", "functional_bound", "lower", "upper",
        "iterations",
    ]);
    let mut checks = Vec::new();
    let mut all_ok = true;
    for &g in &a.g_values {
        let target = target_matrix(g, &angles)?;
        let r = lhv_membership(&target)?;
        let ok = verify_certificate(&r, &target)?;
        all_ok &= ok;
        let f = r.violated_functional.as_ref();
        table.push(vec![
            ("kind", "membership".into()),
            ("g", g.into()),
            ("feasible", r.feasible.into()),
            ("certificate", ok.into()),
            ("lp_residual", r.lp_residual.into()),
            ("functional_value", f.map(|f| f.evaluate(&target)).into()),
            ("functional_bound", f.map(|f| f.bound).into()),
            ("iterations", r.lp_iterations.into()),
        ]);
    }
    checks.push(Check::new("membership certificates verified", all_ok, format!("{} targets", a.g_values.len())));
    if a.bisect {
        let c = bisect_critical_g(&angles, a.tol)?;
        table.push(vec![
            ("kind", "critical".into()),
            ("g", c.g_star.into()),
            ("certificate", c.certificates_verified.into()),
            ("lower", c.lower.into()),
            ("upper", c.upper.into()),
            ("iterations", c.iterations.into()),
        ]);
        checks.push(Check::new("bisection certificates verified", c.certificates_verified, format!("g* = {}", c.g_star)));
        checks.push(Check::new(
            "critical g at least 1/2",
            c.g_star >= 0.5 - a.tol,
            format!("g* = {}", c.g_star),
        ));
    }
    Ok(Report { table, checks })
}

pub fn gfactor(a: &GfactorArgs, seed: u64) -> Result<Report> {
    let p1 = GaussianPacket3D::new(a.center1, a.eps1)?;
    let p2 = GaussianPacket3D::new(a.center2, a.eps2)?;
    let wf = ProductWavefunction::new(p1, p2);
    let box_a = BoxRegion::new(a.box_a_lo, a.box_a_hi)?;
    let box_b = BoxRegion::new(a.box_b_lo, a.box_b_hi)?;
    let mut table = Table::new(&["kind", "alpha", "beta", "l_norm", "g", "value", "stderr", "reference", "z"]);
    let mut checks = Vec::new();

    let norm = a.direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Validation("direction must be nonzero".into()));
    }
    let dir: [f64; 3] = std::array::from_fn(|k| a.direction[k] / norm);
    let width = p1.width_at_time(a.t)?;
    let steps = a.scan_steps.max(2);
    let ls: Vec<[f64; 3]> = (0..steps)
        .map(|i| {
            let d = a.scan_max * width * i as f64 / (steps - 1) as f64;
            std::array::from_fn(|k| d * dir[k])
        })
        .collect();
    let spin_a = UnitVector3::coplanar_a(a.alpha);
    let spin_b = UnitVector3::coplanar_b(a.beta);
    let scan = disentanglement_scan(&wf, &spin_a, &spin_b, &box_a, &box_b, &ls, a.t)?;
    // Separation onset: the translated box lies wholly beyond packet 1's
    // center along the scan direction.
    let lead = |l: &[f64; 3]| {
        let b = box_a.translated(l);
        let corner: [f64; 3] = std::array::from_fn(|k| if dir[k] >= 0.0 { b.lo()[k] } else { b.hi()[k] });
        (0..3).map(|k| (corner[k] - a.center1[k]) * dir[k]).sum::<f64>() > 0.0
    };
    let mut decreasing = true;
    let mut prev: Option<f64> = None;
    for (pt, l) in scan.iter().zip(&ls) {
        table.push(vec![
            ("kind", "scan".into()),
            ("alpha", a.alpha.into()),
            ("beta", a.beta.into()),
            ("l_norm", pt.l_norm.into()),
            ("g", pt.g.into()),
            ("value", pt.correlation.into()),
        ]);
        if lead(l) && pt.correlation != 0.0 {
            if let Some(p) = prev {
                decreasing &= pt.correlation.abs() < p;
            }
            prev = Some(pt.correlation.abs());
        }
    }
    let last = scan.last().expect("nonempty scan");
    checks.push(Check::new("scan strictly decreasing beyond separation onset", decreasing, format!("{} points", scan.len())));
    if a.scan_max >= 30.0 {
        checks.push(Check::new(
            "correlation below 1e-12 at 30 widths",
            last.correlation.abs() < 1e-12,
            format!("|corr| = {:e} at |l| = {}", last.correlation.abs(), last.l_norm),
        ));
    }

    if a.representation {
        let grid: Vec<f64> = (0..a.grid).map(|i| i as f64 * FRAC_PI_4).collect();
        let angles = AngleSet::new(grid.clone(), grid)?;
        let rep = product_representation(&wf, &box_a, &box_b, a.radius, &angles, a.n, seed, a.t)?;
        let mut worst = 0.0f64;
        for c in &rep.cells {
            let z = (c.estimate.mean - c.analytic) / c.estimate.stderr.max(f64::MIN_POSITIVE);
            worst = worst.max(z.abs());
            table.push(vec![
                ("kind", "product".into()),
                ("alpha", c.alpha.into()),
                ("beta", c.beta.into()),
                ("g", rep.g.into()),
                ("value", c.estimate.mean.into()),
                ("stderr", c.estimate.stderr.into()),
                ("reference", c.analytic.into()),
                ("z", z.into()),
            ]);
        }
        checks.push(Check::new(
            "product representation within 4·stderr of g·cos(α−β)",
            worst <= 4.0,
            format!("{} cells, max |z| = {worst:.3}, ε(L) = {}", rep.cells.len(), rep.epsilon),
        ));
        checks.push(Check::new(
            "classical variables bounded by 1",
            rep.max_spin_response <= 1.0,
            format!("max |ξ_spin| = √(2ε) = {}", rep.max_spin_response),
        ));
    }
    Ok(Report { table, checks })
}

pub fn spreading(a: &SpreadingArgs) -> Result<Report> {
    let p = GaussianPacket3D::with_units([0.0; 3], a.eps, a.mass, a.hbar)?;
    let cube = BoxRegion::cube([0.0; 3], a.box_half)?;
    let mut table = Table::new(&["t", "width", "asymptotic", "ratio", "probability"]);
    let mut checks = Vec::new();
    let mut times = a.times.clone();
    times.sort_by(f64::total_cmp);
    let mut monotone = true;
    let mut prev: Option<(f64, f64)> = None;
    for &t in &times {
        let w = p.width_at_time(t)?;
        let asym = p.asymptotic_width(t);
        let pr = p.region_probability(&cube, t)?;
        let ratio = if t > 0.0 { Some(w / asym) } else { None };
        table.push(vec![
            ("t", t.into()),
            ("width", w.into()),
            ("asymptotic", asym.into()),
            ("ratio", ratio.into()),
            ("probability", pr.into()),
        ]);
        if t == 0.0 {
            checks.push(Check::new("width equals ε at t = 0", w == a.eps, format!("{w}")));
        }
        if let Some((pw, pp)) = prev {
            monotone &= w > pw && pr <= pp;
        }
        prev = Some((w, pr));
    }
    checks.push(Check::new("width increasing and centred probability non-increasing", monotone, format!("{} times", times.len())));
    if let Some(&t) = times.last() {
        if t >= 1e6 {
            let r = p.width_at_time(t)? / p.asymptotic_width(t);
            checks.push(Check::new("ratio to (ħ/Mε)t within 1e-6", (r - 1.0).abs() <= 1e-6, format!("t = {t}, ratio − 1 = {:e}", r - 1.0)));
        }
    }
    Ok(Report { table, checks })
}

pub fn vacuum(a: &VacuumArgs) -> Result<Report> {
    let m = MassParam::new(a.mass)?;
    let mv = a.mass;
    let mut table = Table::new(&[
        "kind", "state", "s", "value", "reference", "rel_error", "asymptotic", "ratio", "ratio_4pi", "rate", "power",
        "plain_rate",
    ]);
    let mut checks = Vec::new();
    if a.points < 2 || !(a.s_min > 0.0) || !(a.s_max > a.s_min) {
        return Err(Error::Validation("need points ≥ 2 and 0 < s-min < s-max".into()));
    }
    let mut worst = 0.0f64;
    let mut ratio_at_20 = None;
    for i in 0..a.points {
        let lam = a.s_min * (a.s_max / a.s_min).powf(i as f64 / (a.points - 1) as f64);
        let s = lam / mv;
        let w = w0_spacelike(s, m)?;
        let pt = proper_time_integral(s, 0.0, mv)?;
        let rel = ((w - pt) / pt).abs();
        worst = worst.max(rel);
        let asym = w0_asymptotic(s, m);
        if (lam - 20.0).abs() < 1e-9 {
            ratio_at_20 = Some(w / asym);
        }
        table.push(vec![
            ("kind", "w0".into()),
            ("s", s.into()),
            ("value", w.into()),
            ("reference", pt.into()),
            ("rel_error", rel.into()),
            ("asymptotic", asym.into()),
            ("ratio", (w / asym).into()),
            ("ratio_4pi", (w / w0_asymptotic_4pi(s, m)).into()),
        ]);
    }
    checks.push(Check::new("Bessel closed form matches proper-time integral within 1e-6", worst <= 1e-6, format!("max rel {worst:e}")));
    if let Some(r) = ratio_at_20 {
        checks.push(Check::new("ratio to K₁ asymptotics within 5% at λ = 20", (r - 1.0).abs() <= 0.05, format!("{r}")));
    }

    let fit_s: Vec<f64> = (0..=28).map(|i| (a.fit_min + (a.fit_max - a.fit_min) * i as f64 / 28.0) / mv).collect();
    let fit_y = fit_s.iter().map(|&s| w0_spacelike(s, m)).collect::<Result<Vec<_>>>()?;
    let fit = fit_decay(&fit_s, &fit_y)?;
    table.push(vec![
        ("kind", "w0-fit".into()),
        ("rate", fit.rate.into()),
        ("power", fit.power.into()),
        ("plain_rate", fit.plain_rate.into()),
    ]);
    checks.push(Check::new("W₀ decay rate equals m within 15%", (fit.rate / mv - 1.0).abs() <= 0.15, format!("κ = {}", fit.rate)));

    if a.cluster {
        let sigma = a.sigma / mv;
        let f = |x: f64| SmearedField::new(SpacetimePoint::at_rest([x / mv, 0.0, 0.0]), sigma);
        let phi = WickMonomial::new(vec![f(0.0)?])?;
        let states = [
            ("vacuum", WickMonomial::identity()),
            ("phi(h)", WickMonomial::new(vec![f(0.0)?])?),
            ("phi(h1)phi(h2)", WickMonomial::new(vec![f(-0.5)?, f(0.5)?])?),
        ];
        let distances: Vec<f64> = a.distances.iter().map(|d| d / mv).collect();
        let dir = [1.0, 0.0, 0.0];
        for (label, c) in &states {
            let sweep = cluster_decay_sweep(&phi, &phi, c, &dir, &distances, m)?;
            push_cluster(&mut table, &mut checks, label, "connected", &sweep, false, mv)?;
        }
        let a2 = WickMonomial::new(vec![f(0.0)?, f(0.0)?])?;
        let sweep = cluster_decay_sweep(&a2, &WickMonomial::identity(), &states[1].1, &dir, &distances, m)?;
        push_cluster(&mut table, &mut checks, "phi(h)", "second-limit", &sweep, true, 2.0 * mv)?;
    }
    Ok(Report { table, checks })
}

fn push_cluster(
    table: &mut Table,
    checks: &mut Vec<Check>,
    state: &str,
    what: &'static str,
    sweep: &[(f64, belltime_core::vacuum::ClusterResidual)],
    second: bool,
    expected_rate: f64,
) -> Result<()> {
    let (s, y) = residual_series(sweep, second);
    for (d, v) in s.iter().zip(&y) {
        table.push(vec![("kind", what.into()), ("state", state.into()), ("s", (*d).into()), ("value", (*v).into())]);
    }
    let fit = fit_decay(&s, &y)?;
    table.push(vec![
        ("kind", format!("{what}-fit").into()),
        ("state", state.into()),
        ("reference", expected_rate.into()),
        ("rate", fit.rate.into()),
        ("power", fit.power.into()),
        ("plain_rate", fit.plain_rate.into()),
    ]);
    checks.push(Check::new(
        format!("{what} residual rate for C = {state} within 15% of {expected_rate}"),
        (fit.rate / expected_rate - 1.0).abs() <= 0.15,
        format!("κ = {}", fit.rate),
    ));
    Ok(())
}

pub fn randomfield(a: &RandomFieldArgs, seed: u64) -> Result<Report> {
    let m = MassParam::new(a.mass)?;
    let mv = a.mass;
    let lattice = if a.regulator > 0.0 {
        MomentumLattice::with_gaussian_regulator(a.cutoff * mv, a.n_per_axis, m, a.regulator / mv)?
    } else {
        MomentumLattice::new(a.cutoff * mv, a.n_per_axis, m)?
    };
    let mut table = Table::new(&["kind", "label", "s", "lattice", "continuum", "rel_error", "within_2pct", "mean_re", "mean_im", "stderr", "analytic_re", "analytic_im", "z"]);
    let mut checks = Vec::new();

    // Continuum comparison is reported, not asserted; the sharp cutoff does
    // not converge to W₀ pointwise.
    let origin = SpacetimePoint::at_rest([0.0; 3]);
    for &s in &a.separations {
        let y = SpacetimePoint::at_rest([s / mv, 0.0, 0.0]);
        let lat = lattice_covariance(&origin, &y, &lattice).re;
        let cont = continuum_covariance(s / mv, &lattice)?;
        let rel = ((lat - cont) / cont).abs();
        table.push(vec![
            ("kind", "covariance".into()),
            ("s", (s / mv).into()),
            ("lattice", lat.into()),
            ("continuum", cont.into()),
            ("rel_error", rel.into()),
            ("within_2pct", (rel <= 0.02).into()),
        ]);
    }

    let points = vec![
        SpacetimePoint::at_rest([0.0; 3]),
        SpacetimePoint::at_rest([0.5 / mv, 0.0, 0.0]),
        SpacetimePoint::at_rest([0.0, 1.0 / mv, 0.0]),
        SpacetimePoint::new(0.3 / mv, [0.2 / mv, -0.4 / mv, 0.6 / mv]),
        SpacetimePoint::new(-0.5 / mv, [1.5 / mv, 0.5 / mv, -0.5 / mv]),
    ];
    let cov = lattice_covariance_matrix(&points, &lattice)?;
    let min_eig = cov.hermitian_eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
    checks.push(Check::new("lattice covariance PSD", min_eig >= -1e-10, format!("min eigenvalue {min_eig:e}")));

    let samples = sample_fields(&lattice, &points, a.samples, seed)?;
    let mut worst_two: f64 = 0.0;
    let mut worst_xx: f64 = 0.0;
    let mut worst_four: f64 = 0.0;
    let mut worst_odd: f64 = 0.0;
    let moment = |label: String, xs: &[usize], ys: &[usize], table: &mut Table| -> Result<f64> {
        let est = moment_from_samples(&samples, xs, ys)?;
        let px: Vec<SpacetimePoint> = xs.iter().map(|&i| points[i]).collect();
        let py: Vec<SpacetimePoint> = ys.iter().map(|&i| points[i]).collect();
        let analytic = belltime_core::random_field::analytic_moment(&px, &py, &lattice);
        let z = est.z_score(analytic);
        table.push(vec![
            ("kind", "moment".into()),
            ("label", label.into()),
            ("mean_re", est.mean.re.into()),
            ("mean_im", est.mean.im.into()),
            ("stderr", est.stderr.into()),
            ("analytic_re", analytic.re.into()),
            ("analytic_im", analytic.im.into()),
            ("z", z.into()),
        ]);
        Ok(z)
    };
    for i in 0..points.len() {
        for j in 0..points.len() {
            worst_two = worst_two.max(moment(format!("xi{i} xi*{j}"), &[i], &[j], &mut table)?);
        }
    }
    for i in 0..points.len() {
        for j in i..points.len() {
            worst_xx = worst_xx.max(moment(format!("xi{i} xi{j}"), &[i, j], &[], &mut table)?);
        }
    }
    for (x, y) in [([0, 0], [0, 0]), ([0, 1], [0, 1]), ([0, 1], [2, 3]), ([1, 3], [4, 2]), ([2, 4], [4, 0])] {
        let label = format!("xi{} xi{} xi*{} xi*{}", x[0], x[1], y[0], y[1]);
        worst_four = worst_four.max(moment(label, &x, &y, &mut table)?);
    }
    worst_odd = worst_odd.max(moment("xi0 xi1 xi*2".into(), &[0, 1], &[2], &mut table)?);
    checks.push(Check::new("E ξξ* within 5·stderr of lattice covariance", worst_two <= 5.0, format!("max z {worst_two:.3}")));
    checks.push(Check::new("E ξξ within 5·stderr of 0", worst_xx <= 5.0, format!("max z {worst_xx:.3}")));
    checks.push(Check::new("4-point moments within 5·stderr of Wick value", worst_four <= 5.0, format!("max z {worst_four:.3}")));
    checks.push(Check::new("unbalanced moment within 5·stderr of 0", worst_odd <= 5.0, format!("z {worst_odd:.3}")));
    Ok(Report { table, checks })
}
