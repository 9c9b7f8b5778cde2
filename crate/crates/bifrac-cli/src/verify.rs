//! Invariant suites behind `bifrac verify`.
//!
//! Each invariant measures one non-negative error and passes when the error
//! is finite and at most its tolerance. Engine errors (for example an
//! undersized Fock space) are recorded as failures with the message.

use std::f64::consts::{FRAC_PI_2, PI};

use bifrac::berezin::{berezin_product, smoothing_check};
use bifrac::coherent::{
    analyticity_check, overlap_report, resolution_of_identity, CoherentKind, Normalization, OverlapForm,
    ResolutionConfig,
};
use bifrac::fock::{wigner_function, FockOperator, FockSpace, FockState};
use bifrac::frame::AnglePair;
use bifrac::frft::{frft_apply, frft_compose_check, kernel_eval, test_battery, ComplexGrid2D, SampledAxis};
use bifrac::groupoid::{arrow_apply, isotropy_check, GroupoidArrow};
use bifrac::moyal::{
    lemma_check, moyal_window, operator_a_function, reconstruct_operator, trace_product, StateTuple, COST_BUDGET,
};
use bifrac::quasiprob::{a_function, cat_density, interpolating_moments, total_a_squared, CatState, MomentNorm};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const SUITES: [&str; 6] = ["frft", "groupoid", "coherent", "quasiprob", "moyal", "berezin"];

pub const DEFAULT_TOLERANCES: [(&str, f64); 22] = [
    ("frft.kernel_spot", 1e-12),
    ("frft.additivity", 1e-5),
    ("frft.inverse", 1e-6),
    ("groupoid.arrow_algebra", 0.0),
    ("groupoid.isotropy", 1e-4),
    ("groupoid.compatibility", 1e-4),
    ("groupoid.round_trip", 1e-4),
    ("coherent.overlap_modulus", 1e-4),
    ("coherent.overlap_phase", 1e-5),
    ("coherent.resolution", 1e-3),
    ("coherent.analyticity", 1e-4),
    ("coherent.ablation_ratio", 1e-3),
    ("quasiprob.total_square", 1e-3),
    ("quasiprob.wigner_collapse", 1e-4),
    ("quasiprob.uncertainty", 0.0),
    ("moyal.lemma", 1e-3),
    ("moyal.trace_product", 1e-3),
    ("moyal.reconstruction", 1e-3),
    ("berezin.smoothing", 1e-3),
    ("berezin.heat_order2", 5e-3),
    ("berezin.heat_order8", 1e-3),
    ("berezin.sine_terms", 0.0),
];

#[derive(Debug, Clone, Serialize)]
pub struct Invariant {
    pub name: String,
    pub error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub config_hash: String,
    pub passed: bool,
    pub invariants: Vec<Invariant>,
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    out: Vec<Invariant>,
}

impl Runner<'_> {
    fn check(&mut self, name: &str, measure: impl FnOnce() -> CliResult<f64>) {
        let tolerance = self.cfg.tolerance(name);
        let inv = match measure() {
            Ok(e) => Invariant {
                name: name.into(),
                error: Some(e),
                tolerance,
                passed: e.is_finite() && e <= tolerance,
                detail: None,
            },
            Err(e) => {
                Invariant { name: name.into(), error: None, tolerance, passed: false, detail: Some(e.to_string()) }
            }
        };
        self.out.push(inv);
    }
}

fn ap(t1: f64, t2: f64) -> CliResult<AnglePair<f64>> {
    Ok(AnglePair::new(t1, t2)?)
}

/// Deterministic points in `[-r, r]²` from a two-dimensional golden sequence.
fn golden_points(count: usize, r: f64) -> Vec<(f64, f64)> {
    let (g1, g2) = (0.618_033_988_749_894_9, 0.754_877_666_246_692_7);
    (1..=count)
        .map(|k| (r * (2.0 * ((k as f64 * g1) % 1.0) - 1.0), r * (2.0 * ((k as f64 * g2) % 1.0) - 1.0)))
        .collect()
}

/// Borrows a result computed once for several invariants.
fn shared<T>(r: &CliResult<T>) -> CliResult<&T> {
    r.as_ref().map_err(|e| CliError::Upstream(e.to_string()))
}

fn projector(space: FockSpace, n: usize) -> FockOperator<f64> {
    FockOperator::projector(&FockState::number(space, n))
}

fn frft_suite(r: &mut Runner) {
    r.check("frft.kernel_spot", || {
        let k = kernel_eval(1.0, 1.0, FRAC_PI_2)?;
        let want = Complex64::new(1f64.cos(), 1f64.sin()) / (2.0 * PI).sqrt();
        Ok((k - want).norm())
    });
    let axis = || SampledAxis::symmetric(8.0, 512);
    r.check("frft.additivity", || {
        let axis = axis()?;
        let mut worst = 0.0f64;
        for (t1, t2) in [(0.7, 1.1), (2.0, -0.6), (0.4, 2.5), (1.3, 1.3)] {
            worst = worst.max(frft_compose_check(t1, t2, axis)?);
        }
        Ok(worst)
    });
    r.check("frft.inverse", || {
        let f = &test_battery(axis()?)[4];
        let mut worst = 0.0f64;
        for t in [0.3, 1.9, -2.4] {
            worst = worst.max(frft_apply(&frft_apply(f, t)?, -t)?.max_abs_diff(f));
        }
        Ok(worst)
    });
}

fn groupoid_suite(r: &mut Runner) {
    let cfg = r.cfg;
    r.check("groupoid.arrow_algebra", || {
        let (a, b, c) = (cfg.angles()?, ap(FRAC_PI_2, FRAC_PI_2)?, ap(0.4, 0.9)?);
        let (ab, bc) = (GroupoidArrow::new(a, b), GroupoidArrow::new(b, c));
        let ok = ab.compose(&bc)? == GroupoidArrow::new(a, c)
            && ab.inverse() == GroupoidArrow::new(b, a)
            && ab.compose(&ab.inverse())? == GroupoidArrow::identity(a)
            && ab.left_identity().compose(&ab)? == ab
            && ab.compose(&ab.right_identity())? == ab
            && ab.compose(&bc)?.compose(&bc.inverse())? == ab.compose(&bc.compose(&bc.inverse())?)?
            && bc.compose(&ab).is_err();
        Ok(if ok { 0.0 } else { 1.0 })
    });
    r.check("groupoid.isotropy", || Ok(isotropy_check(cfg.angles()?, 2)?.max_error()));
    let transport = (|| -> CliResult<_> {
        let rho = cfg.density()?;
        let (a, b) = (cfg.angles()?, ap(FRAC_PI_2, FRAC_PI_2)?);
        let fa = a_function(&rho, &a, cfg.window()?)?.grid;
        let fb = a_function(&rho, &b, cfg.window()?)?.grid;
        let moved = arrow_apply(&GroupoidArrow::new(a, b), &fa)?;
        let back = arrow_apply(&GroupoidArrow::new(b, a), &moved)?;
        Ok((fa, fb, moved, back))
    })();
    r.check("groupoid.compatibility", || {
        let (_, fb, moved, _) = shared(&transport)?;
        Ok(moved.max_abs_diff(fb))
    });
    r.check("groupoid.round_trip", || {
        let (fa, _, _, back) = shared(&transport)?;
        Ok(back.max_abs_diff(fa))
    });
}

fn coherent_suite(r: &mut Runner) {
    let cfg = r.cfg;
    let pairs: Vec<((f64, f64), (f64, f64))> = golden_points(20, 1.0).chunks(2).map(|p| (p[0], p[1])).collect();
    let ov =
        (|| -> CliResult<_> { Ok(overlap_report(&pairs, &cfg.angles()?, cfg.space()?, OverlapForm::GaugePhase)?) })();
    r.check("coherent.overlap_modulus", || Ok(shared(&ov)?.modulus_error));
    r.check("coherent.overlap_phase", || Ok(shared(&ov)?.residual));
    r.check("coherent.resolution", || {
        let rc = ResolutionConfig { half_width: 11.0, samples: 176, interior: 0.8 };
        Ok(resolution_of_identity(&cfg.angles()?, CoherentKind::Standard, Normalization::Pi, cfg.space()?, &rc)?.defect)
    });
    let grid: Vec<Complex64> = golden_points(3, 0.6).into_iter().map(|(x, y)| Complex64::new(x, y)).collect();
    let rep = (|| -> CliResult<_> { Ok(analyticity_check(&cfg.angles()?, cfg.space()?, &grid)?) })();
    r.check("coherent.analyticity", || Ok(shared(&rep)?.residual));
    r.check("coherent.ablation_ratio", || shared(&rep).map(|x| x.residual / x.ablation_residual));
}

fn quasiprob_suite(r: &mut Runner) {
    let cfg = r.cfg;
    r.check("quasiprob.total_square", || {
        let rho = cfg.density()?;
        let angles = cfg.angles()?;
        let a = a_function(&rho, &angles, cfg.window()?)?;
        let want = PI * angles.cos_diff().abs() * rho.purity();
        Ok((total_a_squared(&a) - want).abs() / want)
    });
    r.check("quasiprob.wigner_collapse", || {
        let rho = cfg.density()?;
        let w = cfg.window()?;
        let a = a_function(&rho, &ap(FRAC_PI_2, FRAC_PI_2)?, w)?;
        let mut worst = 0.0f64;
        let step = (w.len() / 16).max(1);
        for i in (0..w.len()).step_by(step) {
            for j in (0..w.len()).step_by(step) {
                let v = a.grid.get(i, j);
                let d = (v - wigner_function(&rho, w.point(i), w.point(j))?).norm();
                worst = worst.max(d);
            }
        }
        Ok(worst)
    });
    r.check("quasiprob.uncertainty", || {
        let rho = cat_density(&CatState::default(), cfg.space()?)?;
        let w = cfg.window()?;
        let da =
            interpolating_moments(&a_function(&rho, &ap(FRAC_PI_2, FRAC_PI_2)?, w)?, MomentNorm::Purity)?.delta_alpha;
        let db = interpolating_moments(&a_function(&rho, &ap(0.0, 0.0)?, w)?, MomentNorm::Purity)?.delta_beta;
        Ok((0.5 - da * db).max(0.0))
    });
}

fn lemma_tuples(space: FockSpace, levels: usize) -> CliResult<Vec<StateTuple<f64>>> {
    let pts = golden_points(3 * 4 * levels, 1.0);
    let mut chunks = pts.chunks(levels);
    let mut state = || -> CliResult<FockState<f64>> {
        let c = chunks.next().expect("enough points");
        let mut amps: Vec<Complex64> = c.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= n);
        amps.resize(space.dim(), Complex64::new(0.0, 0.0));
        Ok(FockState::from_amplitudes(space, amps)?)
    };
    (0..3).map(|_| Ok([state()?, state()?, state()?, state()?])).collect()
}

fn moyal_suite(r: &mut Runner) {
    let cfg = r.cfg;
    r.check("moyal.lemma", || {
        let levels = 4;
        let tuples = lemma_tuples(cfg.space()?, levels)?;
        Ok(lemma_check(&cfg.angles()?, &tuples, levels, SampledAxis::symmetric(11.0, 176)?)?)
    });
    let built = (|| -> CliResult<_> {
        let s = cfg.space()?;
        let angles = cfg.angles()?;
        let a0 = operator_a_function(&projector(s, 0), &angles, moyal_window())?;
        let a1 = operator_a_function(&projector(s, 1), &angles, moyal_window())?;
        Ok((a0, a1))
    })();
    r.check("moyal.trace_product", || {
        let (a0, a1) = shared(&built)?;
        let same = (trace_product(a0, a0)? - 1.0).norm();
        let cross = trace_product(a0, a1)?.norm();
        Ok(same.max(cross))
    });
    r.check("moyal.reconstruction", || {
        let (a0, _) = shared(&built)?;
        let s = cfg.space()?;
        let rec = reconstruct_operator(a0, s, COST_BUDGET)?;
        Ok(rec.matrix().max_abs_diff(projector(s, 0).matrix()))
    });
}

fn berezin_suite(r: &mut Runner) {
    let cfg = r.cfg;
    r.check("berezin.smoothing", || {
        let axis = SampledAxis::symmetric(12.0, 121)?;
        let g = ComplexGrid2D::square(axis, |a: f64, b: f64| {
            Complex64::new((1.0 + a / 2.0) * (-(a * a + b * b) / 8.0).exp(), 0.0)
        });
        Ok(smoothing_check(&g, 1.0, &cfg.angles()?, 8)?.max_error)
    });
    let heat = (|| -> CliResult<_> {
        let v = projector(cfg.space()?, 0);
        Ok(berezin_product(&v, &v, Complex64::new(0.3, 0.0), &cfg.angles()?, 8)?)
    })();
    for (name, order) in [("berezin.heat_order2", 2), ("berezin.heat_order8", 8)] {
        r.check(name, || shared(&heat).map(|e| (e.heat_partial_sums()[order] - e.full).norm()));
    }
    r.check("berezin.sine_terms", || {
        let s = cfg.space()?;
        let e = berezin_product(
            &projector(s, 0),
            &projector(s, 1),
            Complex64::new(0.2, -0.3),
            &ap(cfg.theta1, cfg.theta1)?,
            2,
        )?;
        Ok(e.taylor_terms[2].norm().max(e.taylor_terms[3].norm()))
    });
}

/// Runs `suite` (`all` or one of [`SUITES`]).
pub fn run(suite: &str, cfg: &RunConfig) -> CliResult<Report> {
    let selected: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(CliError::Config(format!("unknown suite '{s}'; expected one of {SUITES:?} or all"))),
    };
    let mut r = Runner { cfg, out: Vec::new() };
    for s in selected {
        match s {
            "frft" => frft_suite(&mut r),
            "groupoid" => groupoid_suite(&mut r),
            "coherent" => coherent_suite(&mut r),
            "quasiprob" => quasiprob_suite(&mut r),
            "moyal" => moyal_suite(&mut r),
            _ => berezin_suite(&mut r),
        }
    }
    let passed = r.out.iter().all(|i| i.passed);
    Ok(Report { suite: suite.into(), config_hash: cfg.hash(), passed, invariants: r.out })
}
