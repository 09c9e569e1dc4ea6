use belltime_core::random_field::{lattice_covariance, MomentumLattice};
use belltime_core::vacuum::{w0_spacelike, MassParam, SpacetimePoint};

/// Sharp-cutoff lattice at Λ = 8m, n = 48 against W₀ at 2%. Fails: the
/// cube-truncated integrand oscillates like sin(Λs)/s and the lattice
/// converges to the truncated integral, not to W₀ (deviations of order
/// 10²% to 10⁴% over s·m ∈ [0.5, 4]). Kept as the unmet target.
#[test]
#[ignore = "unattainable with a sharp cube cutoff; see README"]
fn default_lattice_within_2pct_of_w0() {
    let m = MassParam::new(1.0).unwrap();
    let lattice = MomentumLattice::default_for(m);
    let origin = SpacetimePoint::at_rest([0.0; 3]);
    for s in [0.5, 1.0, 2.0, 4.0] {
        let lat = lattice_covariance(&origin, &SpacetimePoint::at_rest([s, 0.0, 0.0]), &lattice).re;
        let w = w0_spacelike(s, m).unwrap();
        assert!(((lat - w) / w).abs() <= 0.02, "s = {s}: lattice {lat}, W0 {w}");
    }
}
