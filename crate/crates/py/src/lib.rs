//! Python bindings for belltime-core.

use pyo3::prelude::*;

#[pymodule]
mod belltime {
    use belltime_core::feasibility::{self, target_matrix};
    use belltime_core::lhv::{self, CosineModel};
    use belltime_core::random_field::{self, MomentumLattice};
    use belltime_core::spatial::{self, BoxRegion, GaussianPacket3D, ProductWavefunction};
    use belltime_core::spin::{self, AngleSet, UnitVector3};
    use belltime_core::vacuum::{self, MassParam, SmearedField, SpacetimePoint};
    use belltime_core::Error;
    use pyo3::exceptions::{PyRuntimeError, PyValueError};
    use pyo3::prelude::*;
    use pyo3::types::PyComplex;

    #[allow(non_upper_case_globals)]
    #[pymodule_export]
    const __version__: &str = belltime_core::VERSION;

    fn err(e: Error) -> PyErr {
        match e {
            Error::Numerical { .. } => PyRuntimeError::new_err(e.to_string()),
            _ => PyValueError::new_err(e.to_string()),
        }
    }

    fn unit(v: [f64; 3]) -> PyResult<UnitVector3> {
        UnitVector3::normalized(v[0], v[1], v[2]).map_err(err)
    }

    fn angles(alphas: Vec<f64>, betas: Vec<f64>) -> PyResult<AngleSet> {
        AngleSet::new(alphas, betas).map_err(err)
    }

    /// `(t, x, y, z)` tuples.
    fn points(p: Vec<[f64; 4]>) -> Vec<SpacetimePoint> {
        p.into_iter().map(|q| SpacetimePoint::new(q[0], [q[1], q[2], q[3]])).collect()
    }

    /// Singlet `⟨σ·a ⊗ σ·b⟩`; directions are normalized first.
    #[pyfunction]
    fn singlet_correlation(a: [f64; 3], b: [f64; 3]) -> PyResult<f64> {
        Ok(spin::singlet_correlation(&unit(a)?, &unit(b)?))
    }

    /// `⟨ψ|M_i ⊗ N_j|ψ⟩` for the rotated operator family (1-based indices).
    #[pyfunction]
    fn pair_expectation(i: usize, j: usize, alphas: Vec<f64>, betas: Vec<f64>) -> PyResult<f64> {
        spin::pair_expectation(i, j, &angles(alphas, betas)?).map_err(err)
    }

    /// CHSH combination of the operator family on 2 + 2 angles.
    #[pyfunction]
    #[pyo3(signature = (alphas = vec![std::f64::consts::FRAC_PI_2, 0.0], betas = vec![std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4]))]
    fn chsh_value(alphas: Vec<f64>, betas: Vec<f64>) -> PyResult<f64> {
        let set = angles(alphas, betas)?;
        if set.alphas().len() != 2 || set.betas().len() != 2 {
            return Err(PyValueError::new_err("CHSH needs exactly two angles per side"));
        }
        let p = |i, j| spin::pair_expectation(i, j, &set).map_err(err);
        Ok(spin::chsh_combination([[p(1, 1)?, p(1, 2)?], [p(2, 1)?, p(2, 2)?]]))
    }

    #[pyclass(frozen, get_all)]
    struct CorrelationEstimate {
        mean: f64,
        stderr: f64,
        n_samples: usize,
        seed: u64,
    }

    #[pymethods]
    impl CorrelationEstimate {
        fn __repr__(&self) -> String {
            format!("CorrelationEstimate(mean={}, stderr={}, n_samples={})", self.mean, self.stderr, self.n_samples)
        }
    }

    impl From<lhv::CorrelationEstimate> for CorrelationEstimate {
        fn from(e: lhv::CorrelationEstimate) -> Self {
            CorrelationEstimate { mean: e.mean, stderr: e.stderr, n_samples: e.n_samples, seed: e.seed }
        }
    }

    /// Monte Carlo `E ξ_α η_β` for the cosine model with visibility `g ≤ 1/2`.
    #[pyfunction]
    #[pyo3(signature = (g, alpha, beta, n = 100_000, seed = 0))]
    fn cosine_lhv_correlation(g: f64, alpha: f64, beta: f64, n: usize, seed: u64) -> PyResult<CorrelationEstimate> {
        let model = CosineModel::new(g).map_err(err)?;
        Ok(lhv::monte_carlo_correlation(&model, alpha, beta, n, seed).map_err(err)?.into())
    }

    #[pyfunction]
    fn analytic_cosine_lhv(g: f64, alpha: f64, beta: f64) -> PyResult<f64> {
        lhv::analytic_cosine_lhv(g, alpha, beta).map_err(err)
    }

    /// `"representable"`, `"open-gap"` or `"not-representable"`.
    #[pyfunction]
    fn classify_g(g: f64) -> PyResult<&'static str> {
        Ok(lhv::classify_g(g).map_err(err)?.as_str())
    }

    #[pyclass(frozen, get_all)]
    struct Membership {
        feasible: bool,
        certified: bool,
        lp_residual: f64,
        /// Separating functional (row-major) and its local bound, when infeasible.
        functional: Option<Vec<f64>>,
        bound: Option<f64>,
    }

    /// LP membership of `g·cos(α_i − β_j)` in the local polytope.
    #[pyfunction]
    fn lhv_membership(g: f64, alphas: Vec<f64>, betas: Vec<f64>) -> PyResult<Membership> {
        let target = target_matrix(g, &angles(alphas, betas)?).map_err(err)?;
        let r = feasibility::lhv_membership(&target).map_err(err)?;
        let certified = feasibility::verify_certificate(&r, &target).map_err(err)?;
        let f = r.violated_functional.as_ref();
        Ok(Membership {
            feasible: r.feasible,
            certified,
            lp_residual: r.lp_residual,
            functional: f.map(|f| f.coefficients.clone()),
            bound: f.map(|f| f.bound),
        })
    }

    #[pyclass(frozen, get_all)]
    struct CriticalVisibility {
        g_star: f64,
        lower: f64,
        upper: f64,
        iterations: usize,
        certificates_verified: bool,
    }

    #[pyfunction]
    #[pyo3(signature = (alphas, betas, tol = 1e-6))]
    fn critical_g(alphas: Vec<f64>, betas: Vec<f64>, tol: f64) -> PyResult<CriticalVisibility> {
        let c = feasibility::bisect_critical_g(&angles(alphas, betas)?, tol).map_err(err)?;
        Ok(CriticalVisibility {
            g_star: c.g_star,
            lower: c.lower,
            upper: c.upper,
            iterations: c.iterations,
            certificates_verified: c.certificates_verified,
        })
    }

    /// Freely spreading Gaussian packet; boxes are given as `(lo, hi)` corners.
    #[pyclass(name = "GaussianPacket3D", frozen, from_py_object)]
    #[derive(Clone)]
    struct Packet(GaussianPacket3D);

    fn region(lo: [f64; 3], hi: [f64; 3]) -> PyResult<BoxRegion> {
        BoxRegion::new(lo, hi).map_err(err)
    }

    #[pymethods]
    impl Packet {
        #[new]
        #[pyo3(signature = (center, eps, mass = 1.0, hbar = 1.0))]
        fn new(center: [f64; 3], eps: f64, mass: f64, hbar: f64) -> PyResult<Self> {
            Ok(Packet(GaussianPacket3D::with_units(center, eps, mass, hbar).map_err(err)?))
        }

        #[getter]
        fn center(&self) -> [f64; 3] {
            self.0.center()
        }

        #[getter]
        fn eps(&self) -> f64 {
            self.0.eps0()
        }

        fn width_at_time(&self, t: f64) -> PyResult<f64> {
            self.0.width_at_time(t).map_err(err)
        }

        fn asymptotic_width(&self, t: f64) -> f64 {
            self.0.asymptotic_width(t)
        }

        #[pyo3(signature = (r, t = 0.0))]
        fn density(&self, r: [f64; 3], t: f64) -> PyResult<f64> {
            self.0.density(&r, t).map_err(err)
        }

        #[pyo3(signature = (lo, hi, t = 0.0))]
        fn region_probability(&self, lo: [f64; 3], hi: [f64; 3], t: f64) -> PyResult<f64> {
            self.0.region_probability(&region(lo, hi)?, t).map_err(err)
        }

        fn translated(&self, l: [f64; 3]) -> Self {
            Packet(self.0.translated(&l))
        }
    }

    /// `g(O_A, O_B) = P(r₁ ∈ O_A) P(r₂ ∈ O_B)` for a product state.
    #[pyfunction]
    #[pyo3(signature = (p1, p2, box_a, box_b, t = 0.0))]
    fn g_factor(p1: Packet, p2: Packet, box_a: ([f64; 3], [f64; 3]), box_b: ([f64; 3], [f64; 3]), t: f64) -> PyResult<f64> {
        let wf = ProductWavefunction::new(p1.0, p2.0);
        spatial::g_factor(&wf, &region(box_a.0, box_a.1)?, &region(box_b.0, box_b.1)?, t).map_err(err)
    }

    /// `(|l|, correlation, g)` with detector A translated by each `l`.
    #[pyfunction]
    #[pyo3(signature = (p1, p2, a, b, box_a, box_b, translations, t = 0.0))]
    #[allow(clippy::too_many_arguments)]
    fn disentanglement_scan(
        p1: Packet,
        p2: Packet,
        a: [f64; 3],
        b: [f64; 3],
        box_a: ([f64; 3], [f64; 3]),
        box_b: ([f64; 3], [f64; 3]),
        translations: Vec<[f64; 3]>,
        t: f64,
    ) -> PyResult<Vec<(f64, f64, f64)>> {
        let wf = ProductWavefunction::new(p1.0, p2.0);
        let scan = spatial::disentanglement_scan(
            &wf,
            &unit(a)?,
            &unit(b)?,
            &region(box_a.0, box_a.1)?,
            &region(box_b.0, box_b.1)?,
            &translations,
            t,
        )
        .map_err(err)?;
        Ok(scan.into_iter().map(|p| (p.l_norm, p.correlation, p.g)).collect())
    }

    #[pyfunction]
    fn bessel_k0(x: f64) -> PyResult<f64> {
        vacuum::bessel_k0(x).map_err(err)
    }

    #[pyfunction]
    fn bessel_k1(x: f64) -> PyResult<f64> {
        vacuum::bessel_k1(x).map_err(err)
    }

    /// `m K₁(ms) / (4π² s)`.
    #[pyfunction]
    #[pyo3(signature = (s, m = 1.0))]
    fn w0_spacelike(s: f64, m: f64) -> PyResult<f64> {
        vacuum::w0_spacelike(s, MassParam::new(m).map_err(err)?).map_err(err)
    }

    /// Proper-time integral of the Gaussian-smeared two-point function;
    /// `a = 0` gives W₀.
    #[pyfunction]
    #[pyo3(signature = (l, a, m = 1.0))]
    fn proper_time_integral(l: f64, a: f64, m: f64) -> PyResult<f64> {
        vacuum::proper_time_integral(l, a, m).map_err(err)
    }

    /// `⟨0|φ(f)* φ(g)|0⟩` for equal-time Gaussian smearings.
    #[pyfunction]
    #[pyo3(signature = (center_f, width_f, center_g, width_g, m = 1.0, t = 0.0))]
    fn smeared_covariance(center_f: [f64; 3], width_f: f64, center_g: [f64; 3], width_g: f64, m: f64, t: f64) -> PyResult<f64> {
        let f = SmearedField::new(SpacetimePoint::new(t, center_f), width_f).map_err(err)?;
        let g = SmearedField::new(SpacetimePoint::new(t, center_g), width_g).map_err(err)?;
        Ok(vacuum::smeared_covariance(&f, &g, MassParam::new(m).map_err(err)?).map_err(err)?.re)
    }

    /// Midpoint momentum lattice for the classical random field. Points are
    /// `(t, x, y, z)` tuples.
    #[pyclass(name = "MomentumLattice", frozen)]
    struct Lattice(MomentumLattice);

    #[pymethods]
    impl Lattice {
        #[new]
        #[pyo3(signature = (cutoff = 8.0, n_per_axis = 48, mass = 1.0, regulator = None))]
        fn new(cutoff: f64, n_per_axis: usize, mass: f64, regulator: Option<f64>) -> PyResult<Self> {
            let m = MassParam::new(mass).map_err(err)?;
            let lat = match regulator {
                Some(rho) => MomentumLattice::with_gaussian_regulator(cutoff, n_per_axis, m, rho),
                None => MomentumLattice::new(cutoff, n_per_axis, m),
            };
            Ok(Lattice(lat.map_err(err)?))
        }

        #[getter]
        fn mode_count(&self) -> usize {
            self.0.mode_count()
        }

        fn covariance<'py>(&self, py: Python<'py>, x: [f64; 4], y: [f64; 4]) -> Bound<'py, PyComplex> {
            let (x, y) = (points(vec![x])[0], points(vec![y])[0]);
            let c = random_field::lattice_covariance(&x, &y, &self.0);
            PyComplex::from_doubles(py, c.re, c.im)
        }

        /// Continuum covariance at equal-time separation `s`, with the same
        /// regulator as the lattice.
        fn continuum_covariance(&self, s: f64) -> PyResult<f64> {
            random_field::continuum_covariance(s, &self.0).map_err(err)
        }

        /// `n` field samples at `pts`, one row of complex values per sample.
        #[pyo3(signature = (pts, n, seed = 0))]
        fn sample<'py>(&self, py: Python<'py>, pts: Vec<[f64; 4]>, n: usize, seed: u64) -> PyResult<Vec<Vec<Bound<'py, PyComplex>>>> {
            let samples = py.detach(|| random_field::sample_fields(&self.0, &points(pts), n, seed)).map_err(err)?;
            Ok(samples
                .iter()
                .map(|s| s.values.iter().map(|v| PyComplex::from_doubles(py, v.re, v.im)).collect())
                .collect())
        }

        /// `(mean, stderr, analytic)` for `E Π ξ(xs) Π ξ*(ys)`.
        #[pyo3(signature = (xs, ys, n_samples = 10_000, seed = 0))]
        fn moment_check<'py>(
            &self,
            py: Python<'py>,
            xs: Vec<[f64; 4]>,
            ys: Vec<[f64; 4]>,
            n_samples: usize,
            seed: u64,
        ) -> PyResult<(Bound<'py, PyComplex>, f64, Bound<'py, PyComplex>)> {
            let c = py
                .detach(|| random_field::verify_moment_identity(&points(xs), &points(ys), &self.0, n_samples, seed))
                .map_err(err)?;
            Ok((
                PyComplex::from_doubles(py, c.estimate.mean.re, c.estimate.mean.im),
                c.estimate.stderr,
                PyComplex::from_doubles(py, c.analytic.re, c.analytic.im),
            ))
        }
    }
}
