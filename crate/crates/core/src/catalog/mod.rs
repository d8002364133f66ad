//! Named models with closed-form rates and crossing kernels.
//!
//! Every preset is addressed by a name and a map of numeric arguments. The
//! functions `p_V`, `p_H`, `q` are constants (`pv`, `ph`, `q`) restricted to the
//! supports the admissibility rules demand; `p0` is the annihilation
//! probability. Family parameters use the names listed in [`ENTRIES`].

mod checks;
mod closed;
mod six_vertex;

use std::collections::BTreeMap;

use serde::Serialize;

pub use checks::{check_kernels, check_rates, kernel_totals, support_points, RATE_TOLERANCE};
pub use closed::{Family, KernelLaw};
pub use six_vertex::{
    six_vertex_export, six_vertex_local_law, SixVertexConfig, SixVertexVariant,
};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::measures::{IntensityMeasure, PksParams};

/// Numeric preset arguments by name.
pub type PresetArgs = BTreeMap<String, f64>;

/// One catalog line, for listings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Accepted argument names, with defaults.
    pub args: &'static str,
    pub nu_v: &'static str,
    pub nu_h: &'static str,
    /// `λ_V(s) / (ν_H(ℝ) p_V(s))`
    pub vertical_rate: &'static str,
    /// `λ_H(s) / (ν_V(ℝ) p_H(s))`
    pub horizontal_rate: &'static str,
    pub kernel: &'static str,
    /// Set for rows that are listed but cannot be built.
    pub out_of_scope: Option<&'static str>,
}

const MIXED: &str =
    "mixes a continuous and a lattice measure; only purely continuous or purely lattice pairs are supported";

const COMMON: &str = "pv=0, ph=0, q=0";

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "dirac-dirac",
        args: "pv=0.25, ph=0.25, q=0.1, p0=0",
        nu_v: "δ0",
        nu_h: "δ0",
        vertical_rate: "1",
        horizontal_rate: "1",
        kernel: "δ0",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "dirac-a-dirac-b",
        args: "a=-1, b=2, q=0, p0=0 (p_V = p_H = 0 forced)",
        nu_v: "δa, a≠0",
        nu_h: "δb, b≠0",
        vertical_rate: "p_V = 0 necessarily",
        horizontal_rate: "p_H = 0 necessarily",
        kernel: "δb",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "dirac-a-dirac-0",
        args: "a=1, pv=0.3 (p_H = 0 forced)",
        nu_v: "δa, a≠0",
        nu_h: "δ0",
        vertical_rate: "1",
        horizontal_rate: "p_H = 0 necessarily",
        kernel: "δ0",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "ber-ber",
        args: "qv=0.4, qh=0.6, pv=0.2, ph=0.2, q=0.1, p0=0",
        nu_v: "Ber(qv)",
        nu_h: "Ber(qh)",
        vertical_rate: "(1-qh)1{s=0} + (1+qh(1/qv-2))1{s=1}",
        horizontal_rate: "(1-qv)1{s=0} + (1+qv(1/qh-2))1{s=1}",
        kernel: "δ0 at s=0; Ber(qh(1-qv)/(qv+qh-2qvqh)) at s=1; δ1 at s=2",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "negber-ber",
        args: "qv=0.4, qh=0.6, pv=0.2, ph=0.2, q=0.1, p0=0.2",
        nu_v: "-Ber(qv)",
        nu_h: "Ber(qh)",
        vertical_rate: "(1-qh)1{s=-1} + (1+qh(2qv-1)/(1-qv))1{s=0}",
        horizontal_rate: "(1-qv)1{s=1} + (1+qv(2qh-1)/(1-qh))1{s=0}",
        kernel: "δ0 at s=-1; Ber(qvqh/(1-qv-qh+2qvqh)) at s=0; δ1 at s=1",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "unif-unif",
        args: "a=1, b=2, pv=0.3, ph=0.3, q=0.1",
        nu_v: "Unif[0,a]",
        nu_h: "Unif[0,b]",
        vertical_rate: "min(s/b, 1) on [0,a]",
        horizontal_rate: "min(s/a, 1) on [0,b]",
        kernel: "Unif[max(0,s-a), min(b,s)]",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "negunif-unif",
        args: "a=1, b=2, pv=0.3, ph=0.3",
        nu_v: "-Unif[0,a]",
        nu_h: "Unif[0,b]",
        vertical_rate: "min((a+s)/b, 1) on [-a,0]",
        horizontal_rate: "min((b-s)/a, 1) on [0,b]",
        kernel: "Unif[max(0,s), min(b,s+a)]",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "geom-geom",
        args: "qv=0.5, pv=0.2, ph=0.2, q=0.1, p0=0",
        nu_v: "Geom(qv)",
        nu_h: "Geom(qv)",
        vertical_rate: "(s+1) qv",
        horizontal_rate: "(s+1) qv",
        kernel: "Unif{0..s}",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "exp-exp",
        args: "gamma=1, pv=0.2, ph=0.2, q=0.1",
        nu_v: "Exp(gamma)",
        nu_h: "Exp(gamma)",
        vertical_rate: "gamma s 1{s>=0}",
        horizontal_rate: "gamma s 1{s>=0}",
        kernel: "Unif[0,s]",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "exp-geom",
        args: "",
        nu_v: "Exp(gv)",
        nu_h: "Geom(qh)",
        vertical_rate: "qh Σ_{t<=floor(s)} ((1-qh)e^gv)^t",
        horizontal_rate: "p_H = 0 necessarily",
        kernel: "∝ ((1-qh)e^gv)^t on {0..floor(s)}",
        out_of_scope: Some(MIXED),
    },
    CatalogEntry {
        name: "gamma-gamma",
        args: "kv=2, kh=3, theta=1, pv=0.2, ph=0.2, q=0.1",
        nu_v: "Gamma(kv, theta)",
        nu_h: "Gamma(kh, theta)",
        vertical_rate: "Γ(kv)/Γ(kv+kh) (s/theta)^kh",
        horizontal_rate: "Γ(kh)/Γ(kv+kh) (s/theta)^kv",
        kernel: "s Beta(kh, kv)",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "negber-geom",
        args: "qv=0.4, qh=0.5, pv=0.2, ph=0.2, p0=0.2",
        nu_v: "-Ber(qv)",
        nu_h: "Geom(qh)",
        vertical_rate: "qh 1{s=-1} + qh(1-qv qh)/(1-qv) 1{s=0}",
        horizontal_rate: "(1-qv qh) 1{s>=0}",
        kernel: "δ0 at s=-1; max(0,s) + Ber(qv(1-qh)/(1-qv qh)) for s>=0",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "neggeom-geom",
        args: "qv=0.5, qh=0.5, pv=0.2, ph=0.2, p0=0.2",
        nu_v: "-Geom(qv)",
        nu_h: "Geom(qh)",
        vertical_rate: "qh/(qv+qh-qv qh) 1{s<=0}",
        horizontal_rate: "qv/(qv+qh-qv qh) 1{s>=0}",
        kernel: "max(0,s) + Geom(qv+qh-qv qh)",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "negexp-exp",
        args: "gv=1, gh=1, pv=0.2, ph=0.2",
        nu_v: "-Exp(gv)",
        nu_h: "Exp(gh)",
        vertical_rate: "gh/(gv+gh) 1{s<=0}",
        horizontal_rate: "gv/(gv+gh) 1{s>=0}",
        kernel: "max(0,s) + Exp(gv+gh)",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "negexp-geom",
        args: "",
        nu_v: "-Exp(gv)",
        nu_h: "Geom(qh)",
        vertical_rate: "qh/(1-(1-qh)e^-gv) 1{s<=0}",
        horizontal_rate: "p_H = 0 necessarily",
        kernel: "max(0,ceil(s)) + Geom((1-qh)e^-gv)",
        out_of_scope: Some(MIXED),
    },
    CatalogEntry {
        name: "normal",
        args: "pv=0.4, ph=0.4, q=0.1",
        nu_v: "N(0,1)",
        nu_h: "N(0,1)",
        vertical_rate: "exp(s^2/4)/sqrt(2)",
        horizontal_rate: "exp(s^2/4)/sqrt(2)",
        kernel: "N(s/2, 1/2)",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "poisson",
        args: "gv=1, gh=2, pv=0.2, ph=0.2, q=0.1, p0=0",
        nu_v: "Poi(gv)",
        nu_h: "Poi(gh)",
        vertical_rate: "e^-gh (1+gh/gv)^s",
        horizontal_rate: "e^-gv (1+gv/gh)^s",
        kernel: "Bin(s, gh/(gv+gh))",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "hammersley",
        args: "p0=1",
        nu_v: "δ-1",
        nu_h: "δ1",
        vertical_rate: "p_V = 0 necessarily",
        horizontal_rate: "p_H = 0 necessarily",
        kernel: "δ1",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "bullet",
        args: "pv=0.25, ph=0.25",
        nu_v: "δ0",
        nu_h: "δ0",
        vertical_rate: "1",
        horizontal_rate: "1",
        kernel: "δ0",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "exponential-lpp",
        args: "gv=1, gh=1",
        nu_v: "-Exp(gv)",
        nu_h: "Exp(gh)",
        vertical_rate: COMMON,
        horizontal_rate: COMMON,
        kernel: "max(0,s) + Exp(gv+gh)",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "geometric-lpp",
        args: "qv=0.5, qh=0.5",
        nu_v: "-Geom(qv)",
        nu_h: "Geom(qh)",
        vertical_rate: COMMON,
        horizontal_rate: COMMON,
        kernel: "max(0,s) + Geom(qv+qh-qv qh)",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "geometric-lpp-shifted",
        args: "qv=0.5, qh=0.5",
        nu_v: "-Geom(qv) on {-1,-2,...}",
        nu_h: "Geom(qh) on {1,2,...}",
        vertical_rate: COMMON,
        horizontal_rate: COMMON,
        kernel: "generic",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "discrete-hammersley",
        args: "qv=0.4, qh=0.5",
        nu_v: "-Ber(qv)",
        nu_h: "Geom(qh)",
        vertical_rate: COMMON,
        horizontal_rate: COMMON,
        kernel: "δ0 at s=-1; max(0,s) + Ber(qv(1-qh)/(1-qv qh)) for s>=0",
        out_of_scope: None,
    },
    CatalogEntry {
        name: "generalized-lpp",
        args: "p=0.5 (μ0 = Geom(p) on {1,2,...})",
        nu_v: "-sqrt(μ0)/Z",
        nu_h: "sqrt(μ0)/Z",
        vertical_rate: COMMON,
        horizontal_rate: COMMON,
        kernel: "generic",
        out_of_scope: None,
    },
];

/// A built preset: parameters plus the closed forms of its family.
#[derive(Clone, Debug)]
pub struct ModelPreset {
    pub name: String,
    pub family: Family,
    pub params: PksParams,
}

impl ModelPreset {
    /// Closed form of `λ_V(s) / (ν_H(ℝ) p_V(s))`, or `None` without one.
    pub fn vertical_rate_ratio(&self, s: f64) -> Option<f64> {
        self.family.vertical_rate_ratio(s)
    }

    pub fn horizontal_rate_ratio(&self, s: f64) -> Option<f64> {
        self.family.horizontal_rate_ratio(s)
    }

    /// Closed-form crossing kernel at total `s`; `None` without one or when
    /// `s` is not a possible total.
    pub fn kernel(&self, s: f64) -> Option<KernelLaw> {
        self.family.kernel(s)
    }
}

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

struct Args<'a> {
    map: &'a PresetArgs,
    known: Vec<&'static str>,
}

impl Args<'_> {
    fn get(&mut self, key: &'static str, default: f64) -> f64 {
        self.known.push(key);
        self.map.get(key).copied().unwrap_or(default)
    }

    fn int(&mut self, key: &'static str, default: i64) -> Result<i64> {
        let v = self.get(key, default as f64);
        if v.fract() != 0.0 || !v.is_finite() {
            return Err(Error::Parameter(format!("{key} must be an integer, got {v}")));
        }
        Ok(v as i64)
    }

    fn finish(&self, name: &str) -> Result<()> {
        for key in self.map.keys() {
            if !self.known.contains(&key.as_str()) {
                return Err(Error::Parameter(format!(
                    "preset {name} takes no argument '{key}' (accepted: {})",
                    self.known.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// `value` on the support described by `cond`, zero elsewhere.
fn on(value: f64, cond: &str) -> Result<Expr> {
    if value == 0.0 {
        return Ok(Expr::zero());
    }
    if cond.is_empty() {
        return Ok(Expr::constant(value));
    }
    Expr::parse(&format!("{value:?}*1{{{cond}}}"))
}

fn intersect(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_string(),
        (_, true) => a.to_string(),
        _ => format!("({a}) && ({b})"),
    }
}

struct Setup {
    family: Family,
    nu_v: IntensityMeasure,
    nu_h: IntensityMeasure,
    /// support conditions of ν_V and ν_H in the expression grammar
    supp_v: String,
    supp_h: String,
}

/// Builds the preset `name`. Unknown argument names are rejected, and the
/// result is validated.
pub fn preset(name: &str, args: &PresetArgs) -> Result<ModelPreset> {
    let e = entry(name).ok_or_else(|| {
        Error::Parameter(format!(
            "unknown preset '{name}' (known: {})",
            ENTRIES.iter().map(|e| e.name).collect::<Vec<_>>().join(", ")
        ))
    })?;
    if let Some(why) = e.out_of_scope {
        return Err(Error::OutOfScope(format!("preset {name} {why}")));
    }
    let mut a = Args {
        map: args,
        known: Vec::new(),
    };
    let lpp = matches!(
        name,
        "exponential-lpp" | "geometric-lpp" | "geometric-lpp-shifted" | "discrete-hammersley" | "generalized-lpp"
    );
    let (default_p, default_q) = match name {
        "normal" => (0.4, 0.1),
        "bullet" => (0.25, 0.0),
        "dirac-dirac" => (0.25, 0.1),
        "unif-unif" | "negunif-unif" | "dirac-a-dirac-0" => (0.3, 0.1),
        _ => (0.2, 0.1),
    };

    let setup = family_setup(name, &mut a)?;
    let (mut pv, mut ph, mut q, mut p0) = (0.0, 0.0, 0.0, 0.0);
    if !lpp && name != "hammersley" {
        pv = a.get("pv", default_p);
        ph = a.get("ph", default_p);
    }
    if !lpp && !matches!(name, "hammersley" | "bullet" | "negunif-unif" | "neggeom-geom" | "negexp-exp" | "negber-geom" | "dirac-a-dirac-0") {
        q = a.get("q", default_q);
    }
    if setup.nu_v.kind() == crate::measures::MeasureKind::Lattice && !lpp {
        let default_p0 = match name {
            "hammersley" => 1.0,
            "negber-ber" | "negber-geom" | "neggeom-geom" => 0.2,
            _ => 0.0,
        };
        p0 = a.get("p0", default_p0);
    }
    if let Family::DiracDirac { a: va, b: hb } = setup.family {
        // a line can only split into its own intensity plus a zero share
        if hb != 0 {
            pv = 0.0;
        }
        if va != 0 {
            ph = 0.0;
        }
    }
    for (key, v) in [("pv", pv), ("ph", ph), ("q", q), ("p0", p0)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Parameter(format!("{key} = {v} must be non-negative")));
        }
    }
    a.get("mv", 1.0);
    a.get("mh", 1.0);
    a.finish(name)?;
    let nu_v = setup.nu_v.with_mass(args.get("mv").copied().unwrap_or(1.0))?;
    let nu_h = setup.nu_h.with_mass(args.get("mh").copied().unwrap_or(1.0))?;
    let params = PksParams::new(
        nu_v,
        nu_h,
        on(pv, &setup.supp_v)?,
        on(ph, &setup.supp_h)?,
        on(q, &intersect(&setup.supp_v, &setup.supp_h))?,
        p0,
    )?;
    params.check()?;
    Ok(ModelPreset {
        name: name.to_string(),
        family: setup.family,
        params,
    })
}

/// The preset with its default arguments.
pub fn default_preset(name: &str) -> Result<ModelPreset> {
    preset(name, &PresetArgs::new())
}

fn prob(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::Parameter(format!("{key} = {v} must lie in (0, 1)")))
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parameter(format!("{key} = {v} must be positive")))
    }
}

fn family_setup(name: &str, a: &mut Args<'_>) -> Result<Setup> {
    let lattice_range = |lo: i64, hi: Option<i64>| match hi {
        Some(hi) => format!("s>={lo} && s<={hi}"),
        None => format!("s>={lo}"),
    };
    let setup = match name {
        "dirac-dirac" | "bullet" => Setup {
            family: Family::DiracDirac { a: 0, b: 0 },
            nu_v: IntensityMeasure::dirac(0),
            nu_h: IntensityMeasure::dirac(0),
            supp_v: "s==0".into(),
            supp_h: "s==0".into(),
        },
        "dirac-a-dirac-b" | "hammersley" => {
            let (da, db) = if name == "hammersley" { (-1, 1) } else { (-1, 2) };
            let va = a.int("a", da)?;
            let hb = a.int("b", db)?;
            if name == "hammersley" && (va, hb) != (-1, 1) {
                return Err(Error::Parameter("hammersley has a=-1, b=1".into()));
            }
            if va == 0 || hb == 0 {
                return Err(Error::Parameter("a and b must be non-zero".into()));
            }
            Setup {
                family: Family::DiracDirac { a: va, b: hb },
                nu_v: IntensityMeasure::dirac(va),
                nu_h: IntensityMeasure::dirac(hb),
                supp_v: format!("s=={va}"),
                supp_h: format!("s=={hb}"),
            }
        }
        "dirac-a-dirac-0" => {
            let va = a.int("a", 1)?;
            if va == 0 {
                return Err(Error::Parameter("a must be non-zero".into()));
            }
            Setup {
                family: Family::DiracDirac { a: va, b: 0 },
                nu_v: IntensityMeasure::dirac(va),
                nu_h: IntensityMeasure::dirac(0),
                supp_v: format!("s=={va}"),
                supp_h: "s==0".into(),
            }
        }
        "ber-ber" => {
            let qv = prob("qv", a.get("qv", 0.4))?;
            let qh = prob("qh", a.get("qh", 0.6))?;
            Setup {
                family: Family::BerBer { qv, qh },
                nu_v: IntensityMeasure::bernoulli(qv)?,
                nu_h: IntensityMeasure::bernoulli(qh)?,
                supp_v: lattice_range(0, Some(1)),
                supp_h: lattice_range(0, Some(1)),
            }
        }
        "negber-ber" => {
            let qv = prob("qv", a.get("qv", 0.4))?;
            let qh = prob("qh", a.get("qh", 0.6))?;
            Setup {
                family: Family::NegBerBer { qv, qh },
                nu_v: IntensityMeasure::bernoulli(qv)?.reflected(),
                nu_h: IntensityMeasure::bernoulli(qh)?,
                supp_v: lattice_range(-1, Some(0)),
                supp_h: lattice_range(0, Some(1)),
            }
        }
        "unif-unif" | "negunif-unif" => {
            let wa = positive("a", a.get("a", 1.0))?;
            let wb = positive("b", a.get("b", 2.0))?;
            let neg = name == "negunif-unif";
            let v = IntensityMeasure::uniform(0.0, wa)?;
            Setup {
                family: if neg {
                    Family::NegUnifUnif { a: wa, b: wb }
                } else {
                    Family::UnifUnif { a: wa, b: wb }
                },
                nu_v: if neg { v.reflected() } else { v },
                nu_h: IntensityMeasure::uniform(0.0, wb)?,
                supp_v: if neg {
                    format!("s>={:?} && s<=0", -wa)
                } else {
                    format!("s>=0 && s<={wa:?}")
                },
                supp_h: format!("s>=0 && s<={wb:?}"),
            }
        }
        "geom-geom" => {
            let q = prob("qv", a.get("qv", 0.5))?;
            Setup {
                family: Family::GeomGeom { q },
                nu_v: IntensityMeasure::geometric(q)?,
                nu_h: IntensityMeasure::geometric(q)?,
                supp_v: lattice_range(0, None),
                supp_h: lattice_range(0, None),
            }
        }
        "exp-exp" => {
            let g = positive("gamma", a.get("gamma", 1.0))?;
            Setup {
                family: Family::ExpExp { gamma: g },
                nu_v: IntensityMeasure::exponential(g)?,
                nu_h: IntensityMeasure::exponential(g)?,
                supp_v: "s>=0".into(),
                supp_h: "s>=0".into(),
            }
        }
        "gamma-gamma" => {
            let kv = positive("kv", a.get("kv", 2.0))?;
            let kh = positive("kh", a.get("kh", 3.0))?;
            let theta = positive("theta", a.get("theta", 1.0))?;
            Setup {
                family: Family::GammaGamma { kv, kh, theta },
                nu_v: IntensityMeasure::gamma(kv, theta)?,
                nu_h: IntensityMeasure::gamma(kh, theta)?,
                supp_v: "s>0".into(),
                supp_h: "s>0".into(),
            }
        }
        "negber-geom" | "discrete-hammersley" => {
            let qv = prob("qv", a.get("qv", 0.4))?;
            let qh = prob("qh", a.get("qh", 0.5))?;
            Setup {
                family: Family::NegBerGeom { qv, qh },
                nu_v: IntensityMeasure::bernoulli(qv)?.reflected(),
                nu_h: IntensityMeasure::geometric(qh)?,
                supp_v: lattice_range(-1, Some(0)),
                supp_h: lattice_range(0, None),
            }
        }
        "neggeom-geom" | "geometric-lpp" => {
            let qv = prob("qv", a.get("qv", 0.5))?;
            let qh = prob("qh", a.get("qh", 0.5))?;
            Setup {
                family: Family::NegGeomGeom { qv, qh },
                nu_v: IntensityMeasure::geometric(qv)?.reflected(),
                nu_h: IntensityMeasure::geometric(qh)?,
                supp_v: "s<=0".into(),
                supp_h: "s>=0".into(),
            }
        }
        "geometric-lpp-shifted" => {
            let qv = prob("qv", a.get("qv", 0.5))?;
            let qh = prob("qh", a.get("qh", 0.5))?;
            Setup {
                family: Family::Generic,
                nu_v: IntensityMeasure::geometric_from(qv, 1)?.reflected(),
                nu_h: IntensityMeasure::geometric_from(qh, 1)?,
                supp_v: "s<=-1".into(),
                supp_h: "s>=1".into(),
            }
        }
        "negexp-exp" | "exponential-lpp" => {
            let gv = positive("gv", a.get("gv", 1.0))?;
            let gh = positive("gh", a.get("gh", 1.0))?;
            Setup {
                family: Family::NegExpExp { gv, gh },
                nu_v: IntensityMeasure::exponential(gv)?.reflected(),
                nu_h: IntensityMeasure::exponential(gh)?,
                supp_v: "s<=0".into(),
                supp_h: "s>=0".into(),
            }
        }
        "normal" => Setup {
            family: Family::Normal,
            nu_v: IntensityMeasure::normal(0.0, 1.0)?,
            nu_h: IntensityMeasure::normal(0.0, 1.0)?,
            supp_v: String::new(),
            supp_h: String::new(),
        },
        "poisson" => {
            let gv = positive("gv", a.get("gv", 1.0))?;
            let gh = positive("gh", a.get("gh", 2.0))?;
            Setup {
                family: Family::Poisson { gv, gh },
                nu_v: IntensityMeasure::poisson(gv)?,
                nu_h: IntensityMeasure::poisson(gh)?,
                supp_v: lattice_range(0, None),
                supp_h: lattice_range(0, None),
            }
        }
        "generalized-lpp" => {
            let p = prob("p", a.get("p", 0.5))?;
            let (v, h) = generalized_lpp_pair(&|k| p * (1.0 - p).powi((k - 1) as i32))?;
            Setup {
                family: Family::Generic,
                nu_v: v,
                nu_h: h,
                supp_v: "s<=-1".into(),
                supp_h: "s>=1".into(),
            }
        }
        other => unreachable!("catalog entry {other} without a family"),
    };
    Ok(setup)
}

/// `ν_V(-A) = ν_H(A) = sqrt(μ0(A)) / Z` for a probability `μ0` on `{1, 2, ...}`
/// given by its pmf; the table is cut where the atoms fall below `1e-17` of the
/// largest one.
pub fn generalized_lpp_pair(
    mu0: &dyn Fn(i64) -> f64,
) -> Result<(IntensityMeasure, IntensityMeasure)> {
    let mut roots = Vec::new();
    let mut peak: f64 = 0.0;
    for k in 1..=100_000i64 {
        let r = mu0(k).max(0.0).sqrt();
        peak = peak.max(r);
        roots.push(r);
        if k > 8 && r < 1e-17 * peak {
            break;
        }
    }
    while roots.last() == Some(&0.0) {
        roots.pop();
    }
    let z: f64 = roots.iter().sum();
    if !(z > 0.0) {
        return Err(Error::Parameter("μ0 has no mass on {1, 2, ...}".into()));
    }
    let weights: Vec<f64> = roots.iter().map(|r| r / z).collect();
    let h = IntensityMeasure::from_pmf(1, weights)?;
    Ok((h.clone().reflected(), h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_in_scope_entry_builds_and_validates() {
        for e in ENTRIES {
            match preset(e.name, &PresetArgs::new()) {
                Ok(_) => assert!(e.out_of_scope.is_none(), "{}", e.name),
                Err(Error::OutOfScope(_)) => assert!(e.out_of_scope.is_some()),
                Err(err) => panic!("{}: {err}", e.name),
            }
        }
    }

    #[test]
    fn dirac_pair_forces_zero_splits() {
        let mut args = PresetArgs::new();
        args.insert("pv".into(), 0.3);
        args.insert("ph".into(), 0.3);
        let p = preset("dirac-a-dirac-b", &args).unwrap();
        assert!(p.params.p_v_expr().as_constant() == Some(0.0));
        assert!(p.params.p_h_expr().as_constant() == Some(0.0));
    }

    #[test]
    fn unknown_names_and_arguments_are_rejected() {
        assert!(matches!(default_preset("nope"), Err(Error::Parameter(_))));
        let mut args = PresetArgs::new();
        args.insert("zeta".into(), 1.0);
        assert!(matches!(preset("normal", &args), Err(Error::Parameter(_))));
        assert!(matches!(default_preset("exp-geom"), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn generalized_lpp_is_normalized() {
        let p = default_preset("generalized-lpp").unwrap();
        let h = p.params.nu_h();
        assert!((h.mass() - 1.0).abs() < 1e-12);
        // sqrt of Geom(1/2) on {1,..}: ratio of consecutive atoms is 1/sqrt 2
        assert!((h.atom(2) / h.atom(1) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.params.nu_v().atom(-1), h.atom(1));
    }
}
