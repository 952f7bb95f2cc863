//! JSON-configured experiment runner behind the `rrlab` binary.  Every
//! subcommand reads one config file, evaluates one harness operation, and
//! writes its dataset as CSV plus JSON with a metadata sidecar; identical
//! config and seed produce byte-identical artifacts.

use crate::bigarith::{digits_for_bits, fmt_float, parse_float, unit_point, PrecisionContext};
use crate::cfrac::{build_s_point, mod_convergents, StreamRule};
use crate::error::{Error, Result};
use crate::rrcf::{classical_approximants, odd_even_limits, EvalPoint};
use crate::schur::{catalog_range, general_limit_class, RootOfUnity};
use crate::verify::{
    check_growth, check_k_rate, check_lipschitz, check_perturbation, divergence_trace,
    general_convergence_contrast, general_divergence_probe, measure_sampler, ratio_blowup_probe,
    ten_limits_trace, verify_all, CandidateSpec, SamplerThreshold, TraceReport,
};
use rug::{Complex, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const SCHEMA: &str = "rrlab-v1";

pub const SUBCOMMANDS: [&str; 14] = [
    "schur-catalog",
    "trace",
    "diverge",
    "ten-limits",
    "general-probe",
    "lipschitz",
    "growth",
    "k-rate",
    "perturb",
    "outside",
    "mod-pattern",
    "build-point",
    "sample-measure",
    "verify-all",
];

/// Evaluation point, in the three shapes experiments use: an exact angle in
/// turns ("7/109"), a root of unity by numerator and order, or a point of the
/// open disk given as decimal re/im.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PointSpec {
    Angle { angle: String },
    Root { k: i64, m: u64 },
    Disk { re: String, im: String },
}

fn parse_rational(s: &str) -> Result<Rational> {
    Rational::parse(s)
        .map(Rational::from)
        .map_err(|e| Error::ConfigInvalid(format!("bad rational {s:?}: {e}")))
}

impl PointSpec {
    pub fn angle(&self) -> Result<Rational> {
        match self {
            PointSpec::Angle { angle } => parse_rational(angle),
            PointSpec::Root { k, m } => {
                let root = RootOfUnity::new(*k, *m)?;
                Ok(root.angle())
            }
            PointSpec::Disk { .. } => Err(Error::ConfigInvalid(
                "this experiment needs a point on the unit circle (angle or root)".into(),
            )),
        }
    }

    pub fn eval_point(&self, ctx: &PrecisionContext) -> Result<EvalPoint> {
        match self {
            PointSpec::Disk { re, im } => {
                let re = parse_float(re, ctx.bits())?;
                let im = parse_float(im, ctx.bits())?;
                Ok(EvalPoint::from_complex(
                    Complex::with_val(ctx.bits(), (re, im)),
                    ctx,
                ))
            }
            _ => Ok(EvalPoint::from_unit(&unit_point(&self.angle()?, ctx)?)),
        }
    }

    pub fn as_root(&self) -> Result<RootOfUnity> {
        match self {
            PointSpec::Root { k, m } => RootOfUnity::new(*k, *m),
            PointSpec::Angle { angle } => {
                let a = parse_rational(angle)?;
                let denom = a.denom().to_u64().ok_or_else(|| {
                    Error::ConfigInvalid(format!("angle {angle} has an oversized denominator"))
                })?;
                let numer = a.numer().to_i64().ok_or_else(|| {
                    Error::ConfigInvalid(format!("angle {angle} has an oversized numerator"))
                })?;
                RootOfUnity::new(numer, denom)
            }
            PointSpec::Disk { .. } => Err(Error::ConfigInvalid(
                "this experiment needs a root of unity".into(),
            )),
        }
    }

    pub fn as_disk(&self, bits: u32) -> Result<Complex> {
        match self {
            PointSpec::Disk { re, im } => {
                let re = parse_float(re, bits)?;
                let im = parse_float(im, bits)?;
                Ok(Complex::with_val(bits, (re, im)))
            }
            _ => Err(Error::ConfigInvalid(
                "this experiment needs a disk point with decimal re/im".into(),
            )),
        }
    }
}

/// One experiment, fully described.  The file must validate before anything
/// is computed; unknown fields are rejected so configs stay archivable.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub subcommand: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_b: Option<PointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream: Option<StreamRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone_from: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<CandidateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<SamplerThreshold>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::ConfigInvalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::ConfigInvalid(format!(
                "schema must be {SCHEMA:?}, got {:?}",
                self.schema
            )));
        }
        if !SUBCOMMANDS.contains(&self.subcommand.as_str()) {
            return Err(Error::ConfigInvalid(format!(
                "unknown subcommand {:?}",
                self.subcommand
            )));
        }
        if let Some(bits) = self.precision_bits {
            if !(192..=1 << 22).contains(&bits) {
                return Err(Error::ConfigInvalid(format!(
                    "precision_bits must lie in [192, 2^22], got {bits}"
                )));
            }
        }
        let need = |field: Option<bool>, name: &str| -> Result<()> {
            match field {
                Some(true) => Ok(()),
                _ => Err(Error::ConfigInvalid(format!(
                    "subcommand {:?} requires the {name:?} field",
                    self.subcommand
                ))),
            }
        };
        match self.subcommand.as_str() {
            "trace" | "outside" => need(self.point.as_ref().map(|_| true), "point")?,
            "growth" | "k-rate" => need(self.point.as_ref().map(|_| true), "point")?,
            "lipschitz" | "perturb" => {
                need(self.point.as_ref().map(|_| true), "point")?;
                need(self.point_b.as_ref().map(|_| true), "point_b")?;
            }
            "diverge" | "mod-pattern" | "build-point" => {
                need(self.stream.as_ref().map(|_| true), "stream")?
            }
            "general-probe" => {
                if self.stream.is_none() && self.point.is_none() {
                    return Err(Error::ConfigInvalid(
                        "general-probe needs either \"stream\" (divergence probe) or \"point\" (convergence contrast)".into(),
                    ));
                }
                if self.stream.is_some() && self.point.is_some() {
                    return Err(Error::ConfigInvalid(
                        "general-probe takes \"stream\" or \"point\", not both".into(),
                    ));
                }
            }
            "verify-all" => match self.profile.as_deref() {
                Some("quick") | Some("full") => {}
                Some(other) => {
                    return Err(Error::ConfigInvalid(format!(
                        "profile must be \"quick\" or \"full\", got {other:?}"
                    )))
                }
                None => {
                    return Err(Error::ConfigInvalid(
                        "verify-all requires the \"profile\" field".into(),
                    ))
                }
            },
            _ => {}
        }
        Ok(())
    }

    /// Canonical serialized form: the bytes the config hash commits to.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn bits(&self) -> u32 {
        self.precision_bits.unwrap_or(256)
    }

    fn ctx(&self) -> Result<PrecisionContext> {
        // The runner always asks for the wide rounding guard: several
        // experiments walk thousands of recurrence steps.
        PrecisionContext::new(self.bits(), 64)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// 0 when every reported bound held, 1 otherwise.
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    /// Human-readable result lines (also useful for logs).
    pub lines: Vec<String>,
}

struct ArtifactSet {
    /// (file name, content) pairs, written verbatim.
    files: Vec<(String, String)>,
    pass: bool,
    lines: Vec<String>,
}

/// Execute one validated config: compute, then write `<subcommand>.csv`,
/// `<subcommand>.json` and `<subcommand>.meta.json` under `out_dir`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let set = dispatch(config)?;
    let out_dir = PathBuf::from(config.out_dir.as_deref().unwrap_or("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Error::ConfigInvalid(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut artifacts = Vec::new();
    for (name, content) in &set.files {
        let path = out_dir.join(name);
        std::fs::write(&path, content)
            .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", path.display())))?;
        artifacts.push(path);
    }
    let meta = serde_json::to_string_pretty(&MetaJson {
        schema: SCHEMA.into(),
        subcommand: config.subcommand.clone(),
        config_sha256: config.sha256(),
        precision_bits: config.bits(),
        seed: config.seed,
        pass: set.pass,
    })
    .expect("meta serializes");
    let meta_path = out_dir.join(format!("{}.meta.json", config.subcommand));
    std::fs::write(&meta_path, meta)
        .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", meta_path.display())))?;
    artifacts.push(meta_path);

    Ok(RunOutcome {
        exit_code: if set.pass { 0 } else { 1 },
        artifacts,
        lines: set.lines,
    })
}

#[derive(Serialize, Deserialize)]
struct MetaJson {
    schema: String,
    subcommand: String,
    config_sha256: String,
    precision_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    pass: bool,
}

fn report_files(name: &str, report: &TraceReport) -> ArtifactSet {
    ArtifactSet {
        files: vec![
            (format!("{name}.csv"), report.to_csv()),
            (format!("{name}.json"), report.to_json()),
        ],
        pass: report.all_pass(),
        lines: vec![format!(
            "{name}: {} rows, {}",
            report.rows.len(),
            if report.all_pass() { "all bounds hold" } else { "BOUND VIOLATED" }
        )],
    }
}

fn dispatch(config: &ExperimentConfig) -> Result<ArtifactSet> {
    match config.subcommand.as_str() {
        "schur-catalog" => run_schur_catalog(config),
        "trace" => run_trace(config),
        "diverge" => {
            let stream = config.stream.as_ref().expect("validated");
            let report = divergence_trace(stream, config.levels.unwrap_or(3))?;
            Ok(report_files("diverge", &report))
        }
        "ten-limits" => {
            let report = ten_limits_trace(config.levels.unwrap_or(2))?;
            Ok(report_files("ten-limits", &report))
        }
        "general-probe" => run_general_probe(config),
        "lipschitz" => {
            let ctx = config.ctx()?;
            let x = config.point.as_ref().expect("validated").eval_point(&ctx)?;
            let y = config.point_b.as_ref().expect("validated").eval_point(&ctx)?;
            let report = check_lipschitz(&x, &y, config.n_max.unwrap_or(200), &ctx)?;
            Ok(report_files("lipschitz", &report))
        }
        "growth" => {
            let ctx = config.ctx()?;
            let x = config.point.as_ref().expect("validated").as_root()?;
            let report = check_growth(&x, config.q_max.unwrap_or(20), &ctx)?;
            Ok(report_files("growth", &report))
        }
        "k-rate" => {
            let ctx = config.ctx()?;
            let x = config.point.as_ref().expect("validated").as_root()?;
            let report = check_k_rate(&x, config.q_max.unwrap_or(20), &ctx)?;
            Ok(report_files("k-rate", &report))
        }
        "perturb" => {
            let ctx = config.ctx()?;
            let x = config.point.as_ref().expect("validated").as_root()?;
            let y = config.point_b.as_ref().expect("validated").angle()?;
            let report = check_perturbation(&x, &y, config.q.unwrap_or(5), &ctx)?;
            Ok(report_files("perturb", &report))
        }
        "outside" => run_outside(config),
        "mod-pattern" => run_mod_pattern(config),
        "build-point" => run_build_point(config),
        "sample-measure" => run_sample_measure(config),
        "verify-all" => run_verify_all(config),
        other => Err(Error::ConfigInvalid(format!("unknown subcommand {other:?}"))),
    }
}

// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CatalogJson {
    schema: String,
    bits: u32,
    rows: Vec<CatalogRowJson>,
}

#[derive(Serialize, Deserialize)]
struct CatalogRowJson {
    m: u64,
    k: u64,
    lambda: i32,
    sigma: u32,
    exponent: i64,
    r_index: u8,
    re_k: String,
    im_k: String,
    re_r: String,
    im_r: String,
}

fn run_schur_catalog(config: &ExperimentConfig) -> Result<ArtifactSet> {
    let ctx = config.ctx()?;
    let m_max = config.m_max.unwrap_or(50);
    if !(1..=5000).contains(&m_max) {
        return Err(Error::ConfigInvalid(format!(
            "schur-catalog m_max must lie in [1, 5000], got {m_max}"
        )));
    }
    let entries = catalog_range(m_max, &ctx)?;
    let digits = digits_for_bits(ctx.bits());
    let mut csv = String::from("m,k,lambda,sigma,exponent,r_index,re_k,im_k,re_r,im_r\n");
    let mut rows = Vec::with_capacity(entries.len());
    for e in &entries {
        let v = &e.value;
        let row = CatalogRowJson {
            m: e.m,
            k: e.k,
            lambda: v.lambda,
            sigma: v.sigma,
            exponent: v.exponent,
            r_index: v.r_index,
            re_k: fmt_float(v.k_value.real(), digits),
            im_k: fmt_float(v.k_value.imag(), digits),
            re_r: fmt_float(v.r_value.real(), digits),
            im_r: fmt_float(v.r_value.imag(), digits),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.m,
            row.k,
            row.lambda,
            row.sigma,
            row.exponent,
            row.r_index,
            row.re_k,
            row.im_k,
            row.re_r,
            row.im_r
        ));
        rows.push(row);
    }
    let count = rows.len();
    let json = serde_json::to_string_pretty(&CatalogJson {
        schema: SCHEMA.into(),
        bits: ctx.bits(),
        rows,
    })
    .expect("catalog serializes");
    Ok(ArtifactSet {
        files: vec![
            ("schur-catalog.csv".into(), csv),
            ("schur-catalog.json".into(), json),
        ],
        pass: true,
        lines: vec![format!(
            "schur-catalog: {count} primitive roots up to m = {m_max}"
        )],
    })
}

fn run_trace(config: &ExperimentConfig) -> Result<ArtifactSet> {
    let ctx = config.ctx()?;
    let n_max = config.n_max.unwrap_or(100);
    if n_max > 1_000_000 {
        return Err(Error::ConfigInvalid(format!(
            "trace n_max must not exceed 10^6, got {n_max}"
        )));
    }
    let point = config.point.as_ref().expect("validated").eval_point(&ctx)?;
    let trace = classical_approximants(&point, n_max, &ctx)?;
    Ok(ArtifactSet {
        files: vec![
            ("trace.csv".into(), trace.to_csv()),
            ("trace.json".into(), trace.to_json()),
        ],
        pass: true,
        lines: vec![format!("trace: {} approximants", trace.entries.len())],
    })
}

fn run_general_probe(config: &ExperimentConfig) -> Result<ArtifactSet> {
    if let Some(stream) = &config.stream {
        let candidates = config
            .candidates
            .clone()
            .unwrap_or(CandidateSpec::CommonLimit { re: 1.0, im: 0.0 });
        let probe = general_divergence_probe(
            stream,
            config.levels.unwrap_or(2),
            &candidates,
            config.monotone_from.unwrap_or(0),
        )?;
        // Bound-type flags decide the exit status; monotonicity only feeds
        // the verdict (constant candidates legitimately stay inconclusive).
        let flags_ok = probe.limit_gap_ok
            && probe.rows.iter().all(|r| r.in_band && r.pole_is_infinite);
        return Ok(ArtifactSet {
            files: vec![
                ("general-probe.csv".into(), probe.to_csv()),
                ("general-probe.json".into(), probe.to_json()),
            ],
            pass: flags_ok,
            lines: vec![format!(
                "general-probe: levels={} limits=({},{}) verdict={}",
                probe.reachable, probe.limit_a, probe.limit_b, probe.verdict
            )],
        });
    }
    // Contrast mode at a 5m-th root: the same tail probes, where the
    // fraction genuinely converges generally.
    let ctx = config.ctx()?;
    let x = config.point.as_ref().expect("validated").as_root()?;
    let (v, w) = match config.candidates {
        Some(CandidateSpec::Constants { v, w }) => (v, w),
        Some(CandidateSpec::CommonLimit { .. }) => {
            return Err(Error::ConfigInvalid(
                "contrast mode takes constant candidates".into(),
            ))
        }
        None => {
            let glc = general_limit_class(&x, &ctx)?;
            (glc.witness_v.to_f64(), glc.witness_w.to_f64())
        }
    };
    let report = general_convergence_contrast(&x, v, w, config.q_max.unwrap_or(12), &ctx)?;
    let mut set = report_files("general-probe", &report);
    set.lines = vec![format!(
        "general-probe (contrast): m={} candidates=({v}, {w}), {}",
        x.m(),
        if set.pass { "limits agree" } else { "BOUND VIOLATED" }
    )];
    Ok(set)
}

fn run_outside(config: &ExperimentConfig) -> Result<ArtifactSet> {
    let ctx = config.ctx()?;
    let x = config.point.as_ref().expect("validated").as_disk(ctx.bits())?;
    let n_max = config.n_max.unwrap_or(36);
    let report = ratio_blowup_probe(&x, n_max)?;
    let n_even = (n_max - n_max % 2).max(10);
    let limits = odd_even_limits(&x, n_even, &ctx)?;
    let digits = digits_for_bits(ctx.bits());
    let limits_json = serde_json::to_string_pretty(&OutsideLimitsJson {
        schema: SCHEMA.into(),
        re_odd: fmt_float(limits.odd.real(), digits),
        im_odd: fmt_float(limits.odd.imag(), digits),
        re_even: fmt_float(limits.even.real(), digits),
        im_even: fmt_float(limits.even.imag(), digits),
        gap: fmt_float(&limits.gap, digits),
    })
    .expect("limits serialize");
    let mut set = report_files("outside", &report);
    set.files.push(("outside-limits.json".into(), limits_json));
    set.lines.push(format!(
        "outside: odd/even parity limits differ by {}",
        fmt_float(&limits.gap, 6)
    ));
    Ok(set)
}

#[derive(Serialize, Deserialize)]
struct OutsideLimitsJson {
    schema: String,
    re_odd: String,
    im_odd: String,
    re_even: String,
    im_even: String,
    gap: String,
}

#[derive(Serialize, Deserialize)]
struct ModPatternJson {
    schema: String,
    modulus: u32,
    preperiod: Option<u64>,
    period: Option<u64>,
    pairs: Vec<(u32, u32)>,
}

fn run_mod_pattern(config: &ExperimentConfig) -> Result<ArtifactSet> {
    let stream = config.stream.as_ref().expect("validated");
    let modulus = config.modulus.unwrap_or(5);
    let steps = config.steps.unwrap_or(24);
    if steps > 100_000 {
        return Err(Error::ConfigInvalid(format!(
            "mod-pattern steps must not exceed 10^5, got {steps}"
        )));
    }
    let trace = mod_convergents(stream, modulus, steps)?;
    let mut csv = String::from("index,c_mod,d_mod\n");
    for (i, (c, d)) in trace.pairs.iter().enumerate() {
        csv.push_str(&format!("{i},{c},{d}\n"));
    }
    let json = serde_json::to_string_pretty(&ModPatternJson {
        schema: SCHEMA.into(),
        modulus: trace.modulus,
        preperiod: trace.preperiod,
        period: trace.period,
        pairs: trace.pairs.clone(),
    })
    .expect("mod trace serializes");
    Ok(ArtifactSet {
        files: vec![
            ("mod-pattern.csv".into(), csv),
            ("mod-pattern.json".into(), json),
        ],
        pass: true,
        lines: vec![format!(
            "mod-pattern: {} pairs mod {}, period {:?}",
            trace.pairs.len(),
            trace.modulus,
            trace.period
        )],
    })
}

#[derive(Serialize, Deserialize)]
struct BuildPointJson {
    schema: String,
    levels: u64,
    angle: String,
    convergents: Vec<BuildConvergentJson>,
    certificates: Vec<BuildCertJson>,
}

#[derive(Serialize, Deserialize)]
struct BuildConvergentJson {
    index: u64,
    c: String,
    d: String,
}

#[derive(Serialize, Deserialize)]
struct BuildCertJson {
    level: u64,
    kind: String,
    quotient: String,
    ceiling: String,
    verified: bool,
}

fn run_build_point(config: &ExperimentConfig) -> Result<ArtifactSet> {
    let stream = config.stream.as_ref().expect("validated");
    let levels = config.levels.unwrap_or(3);
    let (convs, certs) = build_s_point(stream, levels)?;
    let last = convs.last().ok_or_else(|| {
        Error::InvalidArgument("build-point needs levels ≥ 1".into())
    })?;
    let mut csv = String::from("index,c,d\n");
    let mut conv_rows = Vec::new();
    for cv in &convs {
        csv.push_str(&format!("{},{},{}\n", cv.index, cv.c, cv.d));
        conv_rows.push(BuildConvergentJson {
            index: cv.index,
            c: cv.c.to_string(),
            d: cv.d.to_string(),
        });
    }
    let cert_rows: Vec<BuildCertJson> = certs
        .iter()
        .map(|c| {
            Ok(BuildCertJson {
                level: c.level,
                kind: format!("{:?}", c.kind),
                quotient: c.quotient.to_string(),
                ceiling: c.ceiling.to_string(),
                verified: c.verify()?,
            })
        })
        .collect::<Result<_>>()?;
    let pass = cert_rows.iter().all(|c| c.verified);
    let json = serde_json::to_string_pretty(&BuildPointJson {
        schema: SCHEMA.into(),
        levels,
        angle: format!("{}/{}", last.c, last.d),
        convergents: conv_rows,
        certificates: cert_rows,
    })
    .expect("point serializes");
    Ok(ArtifactSet {
        files: vec![
            ("build-point.csv".into(), csv),
            ("build-point.json".into(), json),
        ],
        pass,
        lines: vec![format!(
            "build-point: {} levels, angle denominator of {} digits",
            levels,
            last.d.to_string().len()
        )],
    })
}

fn run_sample_measure(config: &ExperimentConfig) -> Result<ArtifactSet> {
    let threshold = config
        .threshold
        .clone()
        .unwrap_or(SamplerThreshold::GoldenPower);
    let report = measure_sampler(
        &threshold,
        config.depth.unwrap_or(10),
        config.samples.unwrap_or(1000),
        config.seed.unwrap_or(0),
    )?;
    Ok(ArtifactSet {
        files: vec![
            ("sample-measure.csv".into(), report.to_csv()),
            ("sample-measure.json".into(), report.to_json()),
        ],
        pass: true,
        lines: vec![format!(
            "sample-measure: frequency {} over {} samples at depth {}",
            report.frequency, report.samples, report.depth
        )],
    })
}

#[derive(Serialize, Deserialize)]
struct VerifyAllJson {
    schema: String,
    profile: String,
    all_pass: bool,
    items: Vec<VerifyItemJson>,
}

#[derive(Serialize, Deserialize)]
struct VerifyItemJson {
    name: String,
    pass: bool,
    detail: String,
}

fn run_verify_all(config: &ExperimentConfig) -> Result<ArtifactSet> {
    let profile = config.profile.as_deref().expect("validated");
    let summary = verify_all(profile == "full")?;
    let mut csv = String::from("name,pass,detail\n");
    for item in &summary.items {
        csv.push_str(&format!("{},{},{}\n", item.name, item.pass, item.detail));
    }
    let json = serde_json::to_string_pretty(&VerifyAllJson {
        schema: SCHEMA.into(),
        profile: profile.into(),
        all_pass: summary.all_pass(),
        items: summary
            .items
            .iter()
            .map(|i| VerifyItemJson {
                name: i.name.clone(),
                pass: i.pass,
                detail: i.detail.clone(),
            })
            .collect(),
    })
    .expect("summary serializes");
    Ok(ArtifactSet {
        files: vec![
            ("verify-all.csv".into(), csv),
            ("verify-all.json".into(), json),
        ],
        pass: summary.all_pass(),
        lines: summary.lines(),
    })
}

// ---------------------------------------------------------------------------
