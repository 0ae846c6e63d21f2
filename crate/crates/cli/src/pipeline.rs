//! The counterexample pipeline and its named subsets.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use contact_sphere::auxiliary::{
    circle_integral, circle_zero_count, critical_points_are_translated, invariant_flow, CircleMap,
    CriticalPointReport, InvariantHamiltonian,
};
use contact_sphere::maps::{conjugate, iterate, verify_contact, ContactMap};
use contact_sphere::moebius::{build_conjugator_with_margin, fixed_point_spectrum, FixedPointSpectrum, MoebiusMap};
use contact_sphere::sphere::{sample_sphere, tangent_frame, SpherePoint};
use contact_sphere::translated::{
    decay_table_with_samples, defect, extract_zero_set_with, lemma_constants, search_translated_with,
    separation_certificate_with, CertificateOptions, DecayReport, DefectReport, LemmaConstants, SearchOptions,
    SeparationCertificate, ZeroSetOptions, ZeroSetSample,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, StageExt};

/// Random points per map in the contact-condition battery.
pub const VERIFY_SAMPLES: usize = 1_000;
/// Step of the central differences in the Jacobian check.
pub const FD_STEP: f64 = 1e-6;
/// Random circle maps in the circle suite.
pub const CIRCLE_MAPS: usize = 100;
pub const CIRCLE_RESOLUTION: usize = 4_096;
/// Iterates searched for the lemma constant `N`.
pub const LEMMA_N_LIMIT: usize = 256;
/// Grid cap for the lemma constants, which iterate every sample.
pub const LEMMA_GRID: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Verify,
    Spectrum,
    Decay,
    Search,
    Certify,
    Circle,
    Hamiltonian,
    /// The full counterexample pipeline.
    Run,
    /// `Run` plus the circle and Hamiltonian checks.
    All,
}

impl std::str::FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "verify" => Suite::Verify,
            "spectrum" => Suite::Spectrum,
            "decay" => Suite::Decay,
            "search" => Suite::Search,
            "certify" => Suite::Certify,
            "circle" => Suite::Circle,
            "hamiltonian" => Suite::Hamiltonian,
            "run" => Suite::Run,
            "all" => Suite::All,
            other => return Err(CliError::Config(format!("unknown suite `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub map: String,
    pub samples: usize,
    pub max_residual: f64,
    /// Largest relative deviation of the pushforward from central differences.
    pub max_fd_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub repelling: FixedPointSpectrum,
    pub attracting: FixedPointSpectrum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatorReport {
    pub p: SpherePoint,
    pub q: SpherePoint,
    pub fiber_distance: f64,
    pub required_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub n: usize,
    #[serde(flatten)]
    pub report: DefectReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSuiteReport {
    pub maps: usize,
    pub resolution: usize,
    pub min_zero_count: usize,
    pub maps_with_two_zeros: usize,
    pub max_integral_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSuiteReport {
    pub critical: CriticalPointReport,
    pub probe: SpherePoint,
    /// Defect of the flow at `t = 1` at a point off the critical set.
    pub probe_defect: f64,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Defect bounded away from zero and the separation certificate holds.
    NoTranslatedPoint,
    TranslatedPointFound,
    /// Neither of the above.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub n: usize,
    pub min_total: f64,
    pub certified: bool,
    pub verdict: Verdict,
    /// The verdict is numerical evidence, not a proof.
    pub note: String,
}

impl Conclusion {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::NoTranslatedPoint => 0,
            Verdict::TranslatedPointFound => 2,
            Verdict::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub suite: Suite,
    pub config: ExperimentConfig,
    pub verification: Option<VerifyReport>,
    pub spectrum: Option<SpectrumReport>,
    pub conjugator: Option<ConjugatorReport>,
    pub decay: Option<DecayReport>,
    pub defects: Vec<DefectRow>,
    pub certificates: Vec<SeparationCertificate>,
    pub lemma_constants: Option<LemmaConstants>,
    pub circle: Option<CircleSuiteReport>,
    pub hamiltonian: Option<HamiltonianSuiteReport>,
    pub conclusion: Option<Conclusion>,
    /// Wall-clock seconds per stage; written separately from the report so
    /// that the report itself is reproducible.
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
    #[serde(skip)]
    pub zero_sets: Vec<ZeroSetSample>,
}

impl PipelineReport {
    fn new(suite: Suite, config: &ExperimentConfig) -> Self {
        Self {
            suite,
            config: config.clone(),
            verification: None,
            spectrum: None,
            conjugator: None,
            decay: None,
            defects: Vec::new(),
            certificates: Vec::new(),
            lemma_constants: None,
            circle: None,
            hamiltonian: None,
            conclusion: None,
            timings: Vec::new(),
            zero_sets: Vec::new(),
        }
    }

    /// Exit status for the report: the conclusion's code when there is one,
    /// otherwise 0 if every check that ran passed and 3 if not.
    pub fn exit_code(&self) -> i32 {
        if let Some(c) = &self.conclusion {
            return c.exit_code();
        }
        let ok = self.verification.as_ref().is_none_or(|v| v.passed)
            && self.circle.as_ref().is_none_or(|c| c.passed)
            && self.hamiltonian.as_ref().is_none_or(|h| h.passed)
            && self.certificates.iter().all(|c| c.holds || c.n < self.config.largest_n());
        if ok {
            0
        } else {
            3
        }
    }
}

struct Timer<'a> {
    timings: &'a mut Vec<StageTiming>,
}

impl Timer<'_> {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Central difference of `φ` along the great circle through `z` in the unit
/// tangent direction `v`.
fn central_difference(map: &ContactMap, z: &[Complex64], v: &[Complex64], h: f64) -> Vec<Complex64> {
    let step = |s: f64| {
        let moved: Vec<Complex64> = z.iter().zip(v).map(|(zi, vi)| zi * s.cos() + vi * s.sin()).collect();
        map.apply(&SpherePoint::new(moved).expect("great circle stays on the sphere"))
    };
    let (plus, minus) = (step(h), step(-h));
    plus.coords()
        .iter()
        .zip(minus.coords())
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect()
}

/// Contact residual and finite-difference Jacobian check at `samples` points.
pub fn verify_battery(
    map: &ContactMap,
    name: &str,
    samples: usize,
    seed: u64,
    residual_tol: f64,
) -> Result<VerifyEntry, CliError> {
    let points = sample_sphere(map.dim(), samples, seed);
    let results: Vec<Result<(f64, f64), CliError>> = points
        .par_iter()
        .map(|z| {
            let frame = tangent_frame(z);
            let residual = verify_contact(map, z, &frame).stage("verify")?;
            let jac = map.jacobian(z);
            let mut fd_err: f64 = 0.0;
            for (v, col) in frame.iter().zip(&jac.columns) {
                let fd = central_difference(map, z.coords(), v.vec(), FD_STEP);
                let scale = col.norm().max(1.0);
                let err = col
                    .vec()
                    .iter()
                    .zip(&fd)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                fd_err = fd_err.max(err / scale);
            }
            Ok((residual, fd_err))
        })
        .collect();
    let mut max_residual: f64 = 0.0;
    let mut max_fd_error: f64 = 0.0;
    for r in results {
        let (res, fd) = r?;
        max_residual = max_residual.max(res);
        max_fd_error = max_fd_error.max(fd);
    }
    Ok(VerifyEntry {
        map: name.to_string(),
        samples,
        max_residual,
        max_fd_error,
        passed: max_residual <= residual_tol && max_fd_error <= 1e-6,
    })
}

struct Setup {
    phi: MoebiusMap,
    psi: ContactMap,
    conjugator: ConjugatorReport,
}

fn setup(config: &ExperimentConfig) -> Result<Setup, CliError> {
    let phi = MoebiusMap::canonical(config.a, config.n, 1).stage("build focal map")?;
    let c = build_conjugator_with_margin(config.b, config.n, config.tolerances.fiber_margin).stage("conjugator")?;
    let psi = conjugate(&phi.to_contact_map(), &c.map).stage("conjugator")?;
    Ok(Setup {
        phi,
        psi,
        conjugator: ConjugatorReport {
            p: c.p,
            q: c.q,
            fiber_distance: c.fiber_distance,
            required_margin: config.tolerances.fiber_margin,
        },
    })
}

fn zero_set_options(config: &ExperimentConfig) -> ZeroSetOptions {
    ZeroSetOptions {
        tolerance: config.tolerances.bisection,
        ..ZeroSetOptions::default()
    }
}

fn certificate_options(config: &ExperimentConfig) -> CertificateOptions {
    CertificateOptions {
        grid: config.grid,
        seed: config.seed,
        ..CertificateOptions::default()
    }
}

fn run_verify(config: &ExperimentConfig, s: &Setup) -> Result<VerifyReport, CliError> {
    let tol = config.tolerances.residual;
    let entries = vec![
        verify_battery(&s.phi.to_contact_map(), "phi_a", VERIFY_SAMPLES, config.seed, tol)?,
        verify_battery(&s.psi, "psi", VERIFY_SAMPLES, config.seed, tol)?,
    ];
    let passed = entries.iter().all(|e| e.passed);
    Ok(VerifyReport { entries, passed })
}

fn run_spectrum(s: &Setup) -> Result<SpectrumReport, CliError> {
    let (repelling, attracting) = fixed_point_spectrum(&s.phi).stage("spectrum")?;
    Ok(SpectrumReport { repelling, attracting })
}

fn run_search(config: &ExperimentConfig, psi: &ContactMap, n: usize) -> Result<DefectReport, CliError> {
    let opts = SearchOptions {
        starts: config.starts,
        grid: config.grid,
        seed: config.seed,
        tolerance: config.tolerances.refinement,
        ..SearchOptions::default()
    };
    search_translated_with(&iterate(psi, n), &opts).stage("search")
}

fn run_certificate(
    config: &ExperimentConfig,
    s: &Setup,
    n: usize,
    sigma: Option<&ZeroSetSample>,
) -> Result<SeparationCertificate, CliError> {
    let r = config.tolerances.certificate_radius;
    separation_certificate_with(
        &s.psi,
        n,
        &s.conjugator.p,
        &s.conjugator.q,
        r,
        r,
        &certificate_options(config),
        sigma,
    )
    .stage("certify")
}

fn run_circle(config: &ExperimentConfig) -> Result<CircleSuiteReport, CliError> {
    let mut min_zero_count = usize::MAX;
    let mut with_two = 0;
    let mut max_integral_error: f64 = 0.0;
    for i in 0..CIRCLE_MAPS {
        let map = CircleMap::random(1 + i % 5, config.seed.wrapping_add(i as u64));
        let zeros = circle_zero_count(&map, CIRCLE_RESOLUTION).stage("circle")?;
        min_zero_count = min_zero_count.min(zeros.count);
        if zeros.count >= 2 {
            with_two += 1;
        }
        let err = (circle_integral(&map, CIRCLE_RESOLUTION) - 2.0 * PI).abs();
        max_integral_error = max_integral_error.max(err);
    }
    Ok(CircleSuiteReport {
        maps: CIRCLE_MAPS,
        resolution: CIRCLE_RESOLUTION,
        min_zero_count,
        maps_with_two_zeros: with_two,
        max_integral_error,
        passed: with_two == CIRCLE_MAPS && max_integral_error <= 1e-6,
    })
}

fn run_hamiltonian(config: &ExperimentConfig) -> Result<HamiltonianSuiteReport, CliError> {
    let h = InvariantHamiltonian::new((1..=config.n).map(|i| i as f64).collect());
    let critical =
        critical_points_are_translated(&h, &[0.1, 1.0, PI], 1e-10, 100, config.seed).stage("hamiltonian")?;
    let probe = SpherePoint::new(vec![Complex64::new(1.0, 0.0); config.n]).stage("hamiltonian")?;
    let probe_defect = defect(&invariant_flow(&h, 1.0), &probe).stage("hamiltonian")?.total;
    Ok(HamiltonianSuiteReport {
        passed: critical.holds && probe_defect >= 1e-2,
        critical,
        probe,
        probe_defect,
    })
}

fn conclude(config: &ExperimentConfig, report: &PipelineReport) -> Option<Conclusion> {
    let n = config.largest_n();
    let row = report.defects.iter().find(|d| d.n == n)?;
    let certified = report.certificates.iter().any(|c| c.n == n && c.holds);
    let t = &config.tolerances;
    let verdict = if row.report.min_total <= t.translated {
        Verdict::TranslatedPointFound
    } else if row.report.min_total >= t.defect_threshold && certified {
        Verdict::NoTranslatedPoint
    } else {
        Verdict::Inconclusive
    };
    Some(Conclusion {
        n,
        min_total: row.report.min_total,
        certified,
        verdict,
        note: "sampled numerical evidence".into(),
    })
}

/// Runs the full pipeline: verification, spectra, conjugation, decay table,
/// defect search and separation certificate for every scheduled iterate.
pub fn run_counterexample(config: &ExperimentConfig) -> Result<PipelineReport, CliError> {
    run_suite(Suite::Run, config)
}

pub fn run_suite(suite: Suite, config: &ExperimentConfig) -> Result<PipelineReport, CliError> {
    config.validate()?;
    let mut report = PipelineReport::new(suite, config);
    let mut timings = Vec::new();
    let mut timer = Timer { timings: &mut timings };
    let full = matches!(suite, Suite::Run | Suite::All);
    let geometric = full || !matches!(suite, Suite::Circle | Suite::Hamiltonian);
    let schedule = config.schedule();

    if geometric {
        let s = timer.time("setup", || setup(config))?;
        report.conjugator = Some(s.conjugator.clone());
        if full || suite == Suite::Verify {
            report.verification = Some(timer.time("verify", || run_verify(config, &s))?);
        }
        if full || suite == Suite::Spectrum {
            report.spectrum = Some(timer.time("spectrum", || run_spectrum(&s))?);
        }
        if full || suite == Suite::Decay {
            let (decay, samples) = timer.time("decay", || {
                decay_table_with_samples(
                    &s.psi,
                    &s.conjugator.p,
                    &s.conjugator.q,
                    &schedule,
                    config.grid,
                    config.seed,
                    &zero_set_options(config),
                )
                .stage("decay")
            })?;
            report.decay = Some(decay);
            report.zero_sets = samples;
        }
        if full || suite == Suite::Search {
            for &n in &schedule {
                let r = timer.time(&format!("search n={n}"), || run_search(config, &s.psi, n))?;
                report.defects.push(DefectRow { n, report: r });
            }
        }
        if full || suite == Suite::Certify {
            for &n in &schedule {
                let cert = timer.time(&format!("certify n={n}"), || {
                    let cached = report.zero_sets.iter().find(|z| z.iterate_index == n);
                    match cached {
                        Some(sigma) => run_certificate(config, &s, n, Some(sigma)),
                        None => {
                            let sigma = extract_zero_set_with(&s.psi, n, config.grid, config.seed, &zero_set_options(config))
                                .stage("certify")?;
                            let cert = run_certificate(config, &s, n, Some(&sigma));
                            report.zero_sets.push(sigma);
                            cert
                        }
                    }
                })?;
                report.certificates.push(cert);
            }
            let r = config.tolerances.certificate_radius;
            report.lemma_constants = Some(timer.time("lemma constants", || {
                lemma_constants(
                    &s.psi,
                    &s.conjugator.p,
                    &s.conjugator.q,
                    r,
                    r,
                    config.grid.min(LEMMA_GRID),
                    config.seed,
                    LEMMA_N_LIMIT,
                )
                .stage("certify")
            })?);
        }
        for row in report.defects.iter_mut() {
            row.report.certified = report.certificates.iter().any(|c| c.n == row.n && c.holds);
        }
        if full {
            report.conclusion = conclude(config, &report);
        }
    }
    if matches!(suite, Suite::Circle | Suite::All) {
        report.circle = Some(timer.time("circle", || run_circle(config))?);
    }
    if matches!(suite, Suite::Hamiltonian | Suite::All) {
        report.hamiltonian = Some(timer.time("hamiltonian", || run_hamiltonian(config))?);
    }
    report.zero_sets.sort_by_key(|z| z.iterate_index);
    report.timings = timings;
    Ok(report)
}
