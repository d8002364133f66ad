//! Catalog closed forms against the generic computations, and the six-vertex
//! correspondence on simulated grids.

use pks_core::catalog::{
    check_kernels, check_rates, default_preset, preset, six_vertex_export, six_vertex_local_law,
    PresetArgs, SixVertexVariant, ENTRIES,
};
use pks_core::dynamics::simulate;
use pks_core::statistics::hypothesis::chi_square_gof;
use pks_core::{Error, Seed};

fn in_scope() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().filter(|e| e.out_of_scope.is_none()).map(|e| e.name)
}

#[test]
fn closed_form_rates_match_the_generic_convolution() {
    let mut checked = 0;
    for name in in_scope() {
        let p = default_preset(name).unwrap();
        for r in check_rates(&p, 100) {
            assert!(r.passed(), "{r}");
            checked += 1;
        }
    }
    assert!(checked >= 30, "{checked}");
}

#[test]
fn generic_kernel_samples_follow_the_closed_form_laws() {
    for (i, name) in in_scope().enumerate() {
        let p = default_preset(name).unwrap();
        let reports = check_kernels(&p, 100_000, Seed::new(1000 + i as u64, 0), 0.001).unwrap();
        for r in &reports {
            assert!(r.passed(), "{r}");
        }
    }
}

#[test]
fn mixed_rows_are_out_of_scope() {
    for name in ["exp-geom", "negexp-geom"] {
        assert!(matches!(default_preset(name), Err(Error::OutOfScope(_))), "{name}");
    }
}

#[test]
fn table_examples() {
    use pks_core::catalog::KernelLaw;
    use pks_core::measures::ContinuousKernel;
    let normal = default_preset("normal").unwrap();
    assert_eq!(
        normal.kernel(3.0),
        Some(KernelLaw::Continuous(ContinuousKernel::Normal { mean: 1.5, var: 0.5 }))
    );
    let mut args = PresetArgs::new();
    args.insert("gv".into(), 2.0);
    args.insert("gh".into(), 3.0);
    let poisson = preset("poisson", &args).unwrap();
    let Some(KernelLaw::Lattice(k)) = poisson.kernel(4.0) else { panic!("lattice kernel") };
    // Bin(4, 3/5)
    let binom = [0.0256, 0.1536, 0.3456, 0.3456, 0.1296];
    for (t, want) in binom.iter().enumerate() {
        assert!((k.pmf(t as i64) - want).abs() < 1e-12, "{t}");
    }
}

/// Type of the crossing in the middle of the grid, one per drawing so the
/// observations are independent.
fn middle_types(name: &str, variant: SixVertexVariant, qv: f64, qh: f64, n: usize) -> [u64; 6] {
    let mut args = PresetArgs::new();
    for (k, v) in [("qv", qv), ("qh", qh), ("pv", 0.0), ("ph", 0.0), ("q", 0.0), ("p0", 0.0)] {
        args.insert(k.into(), v);
    }
    let p = preset(name, &args).unwrap().params;
    let mut counts = [0u64; 6];
    let mut used = 0;
    for i in 0..n as u64 {
        let d = simulate(&p, 3.0, 3.0, Seed::new(77, i)).unwrap();
        let cfg = six_vertex_export(&d, variant).unwrap();
        if cfg.rows == 0 || cfg.cols == 0 {
            continue;
        }
        let t = cfg.cells[cfg.rows / 2][cfg.cols / 2];
        counts[usize::from(t) - 1] += 1;
        used += 1;
    }
    assert!(used > n * 9 / 10);
    counts
}

#[test]
fn six_vertex_frequencies_follow_the_weights() {
    for (name, variant) in [
        ("ber-ber", SixVertexVariant::BerBer { qv: 0.3, qh: 0.6 }),
        ("negber-ber", SixVertexVariant::NegBerBer { qv: 0.3, qh: 0.6 }),
    ] {
        let counts = middle_types(name, variant, 0.3, 0.6, 20_000);
        let law = six_vertex_local_law(variant);
        let (stat, dof, p) = chi_square_gof(&counts, &law);
        assert!(dof >= 3, "{name}: {counts:?}");
        assert!(p >= 0.001, "{name}: chi2={stat} dof={dof} p={p} counts={counts:?} law={law:?}");
    }
}

#[test]
fn six_vertex_test_rejects_swapped_weights() {
    let variant = SixVertexVariant::BerBer { qv: 0.3, qh: 0.6 };
    let counts = middle_types("ber-ber", variant, 0.3, 0.6, 20_000);
    let mut law = six_vertex_local_law(variant);
    law.swap(2, 3);
    assert!(chi_square_gof(&counts, &law).2 < 1e-6);
}
