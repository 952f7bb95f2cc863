//! Bound-by-bound verification harness: every quantitative envelope the
//! library's analysis rests on is re-measured here at high precision and
//! compared against its stated two-sided bound.  The harness never asserts
//! limits — only finite-index envelopes — so each row is a literal numeric
//! comparison that can be exported and audited.

use crate::bigarith::{
    self, chordal_distance, digits_for_bits, fibonacci, fmt_float, lucas, parallel_map,
    phi_power, unit_point, ExtendedComplex, PrecisionContext,
};
use crate::cfrac::{
    alpha_rule, golden_power_ceiling, mod_convergents, two_pi_quadratic_ceiling, Convergent,
    Generator, SetSCertificate, StreamRule,
};
use crate::error::{Error, Result};
use crate::rrcf::{odd_even_limits, ConvergentPair, EvalPoint};
use crate::schur::{boundary_quad, r_catalog, schur_eval, RootOfUnity};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::float::Special;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

/// log₂ φ, used only to size precision budgets (never in a bound).
const LOG2_PHI: f64 = 0.694_241_913_630_617_3;

fn abs_f(z: &Complex, prec: u32) -> Float {
    use rug::ops::CompleteRound;
    z.abs_ref().complete((prec, prec)).into_real_imag().0
}

fn le(a: &Float, b: &Float) -> bool {
    matches!(
        a.partial_cmp(b),
        Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
    )
}

fn f_inf(bits: u32) -> Float {
    Float::with_val(bits, Special::Infinity)
}

/// Relative cushion 2^(−bits/2) applied to envelopes whose edges the paper
/// attains exactly (e.g. |Q| = F_2 = φ^0 at q = 2): rounding may land a hair
/// on either side, the cushion keeps the comparison honest without loosening
/// it measurably.
fn cushioned(lower: Float, upper: Float, bits: u32) -> (Float, Float) {
    let mut rel = Float::with_val(bits, 1u32);
    rel >>= bits / 2;
    let one = Float::with_val(bits, 1u32);
    let lo = lower * (one.clone() - &rel);
    let hi = upper * (one + &rel);
    (lo, hi)
}

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ReportRow {
    /// n, q, or level — whatever the experiment indexes by.
    pub index: i64,
    pub what: String,
    pub measured: Float,
    pub lower: Float,
    pub upper: Float,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct TraceReport {
    pub experiment: String,
    pub bits: u32,
    pub rows: Vec<ReportRow>,
}

impl TraceReport {
    pub fn new(experiment: &str, bits: u32) -> Self {
        TraceReport {
            experiment: experiment.to_string(),
            bits,
            rows: Vec::new(),
        }
    }

    /// pass ⟺ lower ≤ measured ≤ upper; NaN never passes.
    pub fn push(&mut self, index: i64, what: &str, measured: Float, lower: Float, upper: Float) {
        let pass = !measured.is_nan() && le(&lower, &measured) && le(&measured, &upper);
        self.rows.push(ReportRow {
            index,
            what: what.to_string(),
            measured,
            lower,
            upper,
            pass,
        });
    }

    /// For checks decided by exact arithmetic: the flag is authoritative and
    /// the floats are informational.
    pub fn push_flag(
        &mut self,
        index: i64,
        what: &str,
        measured: Float,
        lower: Float,
        upper: Float,
        pass: bool,
    ) {
        self.rows.push(ReportRow {
            index,
            what: what.to_string(),
            measured,
            lower,
            upper,
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Smallest slack across all finite bound sides, as a coarse f64.
    pub fn worst_margin(&self) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for row in &self.rows {
            if row.measured.is_nan() {
                continue;
            }
            for side in [&row.lower, &row.upper] {
                if !side.is_finite() {
                    continue;
                }
                let margin = if std::ptr::eq(side, &row.lower) {
                    Float::with_val(self.bits, &row.measured - side)
                } else {
                    Float::with_val(self.bits, side - &row.measured)
                }
                .to_f64();
                worst = Some(match worst {
                    Some(w) if w <= margin => w,
                    _ => margin,
                });
            }
        }
        worst
    }

    pub fn to_csv(&self) -> String {
        let digits = digits_for_bits(self.bits);
        let mut out = String::from("index,what,measured,lower,upper,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.index,
                r.what,
                fmt_float(&r.measured, digits),
                fmt_float(&r.lower, digits),
                fmt_float(&r.upper, digits),
                r.pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let digits = digits_for_bits(self.bits);
        let rows: Vec<ReportRowJson> = self
            .rows
            .iter()
            .map(|r| ReportRowJson {
                index: r.index,
                what: r.what.clone(),
                measured: fmt_float(&r.measured, digits),
                lower: fmt_float(&r.lower, digits),
                upper: fmt_float(&r.upper, digits),
                pass: r.pass,
            })
            .collect();
        serde_json::to_string_pretty(&ReportJson {
            schema: "rrlab-v1".into(),
            experiment: self.experiment.clone(),
            bits: self.bits,
            all_pass: self.all_pass(),
            rows,
        })
        .expect("report serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    schema: String,
    experiment: String,
    bits: u32,
    all_pass: bool,
    rows: Vec<ReportRowJson>,
}

#[derive(Serialize, Deserialize)]
struct ReportRowJson {
    index: i64,
    what: String,
    measured: String,
    lower: String,
    upper: String,
    pass: bool,
}

// ---------------------------------------------------------------------------
// Shared engine capture
// ---------------------------------------------------------------------------

struct StopCapture {
    n: u64,
    p: Complex,
    p_prev: Complex,
    q: Complex,
    q_prev: Complex,
    scale: Float,
}

/// One engine pass, cloning (P, Q, P_prev, Q_prev) at each stop.  Stops must
/// be strictly increasing.
fn run_with_stops(
    point: EvalPoint,
    ctx: &PrecisionContext,
    stops: &[u64],
) -> Result<Vec<StopCapture>> {
    let mut eng = ConvergentPair::new(point, ctx);
    let mut out = Vec::with_capacity(stops.len());
    for &n in stops {
        eng.advance_to(n)?;
        out.push(StopCapture {
            n,
            p: eng.p_n().clone(),
            p_prev: eng.p_prev().clone(),
            q: eng.q_n().clone(),
            q_prev: eng.q_prev().clone(),
            scale: eng.growth_scale().clone(),
        });
    }
    Ok(out)
}

/// R_n = x^(1/5)·Q_n/P_n; None when P_n vanishes to working accuracy.
fn r_from_parts(
    root: &Complex,
    p: &Complex,
    q: &Complex,
    scale: &Float,
    ctx: &PrecisionContext,
) -> Option<Complex> {
    let floor = ctx.tol() * scale;
    if abs_f(p, ctx.bits()) <= floor {
        return None;
    }
    Some(Complex::with_val(ctx.bits(), root * q) / p)
}

// ---------------------------------------------------------------------------
// Lipschitz bounds for the polynomial tails
// ---------------------------------------------------------------------------

/// |Q_n(x)−Q_n(y)| ≤ n²φⁿ|x−y| and |P_n(x)−P_n(y)| ≤ (n+1)²φ^(n+1)|x−y|
/// for 0 ≤ n ≤ n_max, both points on the closed unit disk.
pub fn check_lipschitz(
    x: &EvalPoint,
    y: &EvalPoint,
    n_max: u64,
    ctx: &PrecisionContext,
) -> Result<TraceReport> {
    if n_max > 500 {
        return Err(Error::InvalidArgument(
            "check_lipschitz caps n_max at 500".into(),
        ));
    }
    let bits = ctx.bits();
    let mut report = TraceReport::new("lipschitz", bits);
    let dxy = abs_f(&Complex::with_val(bits, x.value() - y.value()), bits);
    let mut ex = ConvergentPair::new(x.clone(), ctx);
    let mut ey = ConvergentPair::new(y.clone(), ctx);
    let phi = bigarith::phi(bits);
    let mut phi_n = Float::with_val(bits, 1u32); // φ^n
    let zero = Float::with_val(bits, 0u32);
    for n in 0..=n_max {
        if n > 0 {
            ex.advance()?;
            ey.advance()?;
            phi_n *= &phi;
        }
        let nf = Float::with_val(bits, n);
        let n1f = Float::with_val(bits, n + 1);
        let dq = abs_f(&Complex::with_val(bits, ex.q_n() - ey.q_n()), bits);
        let q_cap = Float::with_val(bits, &nf * &nf) * &phi_n * &dxy;
        report.push(n as i64, "tail-q-shift", dq, zero.clone(), q_cap);
        let dp = abs_f(&Complex::with_val(bits, ex.p_n() - ey.p_n()), bits);
        let p_cap =
            Float::with_val(bits, &n1f * &n1f) * Float::with_val(bits, &phi_n * &phi) * &dxy;
        report.push(n as i64, "tail-p-shift", dp, zero.clone(), p_cap);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Window growth at roots of unity
// ---------------------------------------------------------------------------

/// Growth of |Q| along the windows n = qm+m−1, qm+m−2 at a primitive m-th
/// root with 5 ∤ m: the two-sided golden envelopes and the ratio band.
pub fn check_growth(x: &RootOfUnity, q_max: u64, ctx: &PrecisionContext) -> Result<TraceReport> {
    let m = x.m();
    if m % 5 == 0 {
        return Err(Error::WrongResidueClass(m));
    }
    if !x.is_primitive() {
        return Err(Error::InvalidArgument(
            "check_growth needs a primitive root".into(),
        ));
    }
    if q_max < 2 {
        return Err(Error::InvalidArgument("check_growth needs q_max ≥ 2".into()));
    }
    let bits = ctx.bits();
    let mut report = TraceReport::new("growth", bits);
    let stops: Vec<u64> = (2..=q_max).map(|q| q * m + m - 1).collect();
    let caps = run_with_stops(x.eval_point(ctx)?, ctx, &stops)?;
    let near = m % 5 == 1 || m % 5 == 4;
    for (q, cap) in (2..=q_max).zip(&caps) {
        let qi = q as i64;
        let q_end = abs_f(&cap.q, bits);
        let q_prev = abs_f(&cap.q_prev, bits);
        let (lo, hi) = cushioned(phi_power(qi - 1, bits), phi_power(qi, bits), bits);
        report.push(qi, "window-end", q_end.clone(), lo, hi);
        if near {
            let (lo, hi) = cushioned(phi_power(qi - 2, bits), phi_power(qi - 1, bits), bits);
            report.push(qi, "window-prev-inner", q_prev.clone(), lo, hi);
        } else {
            let (lo, hi) = cushioned(phi_power(qi, bits), phi_power(qi + 1, bits), bits);
            report.push(qi, "window-prev-outer", q_prev.clone(), lo, hi);
        }
        let ratio = q_end / &q_prev;
        let (lo, hi) = cushioned(phi_power(-2, bits), phi_power(2, bits), bits);
        report.push(qi, "window-ratio", ratio, lo, hi);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Convergence rate toward the closed-form limit
// ---------------------------------------------------------------------------

/// Golden-rate envelopes for |K_n − K| along both window ends, plus the loose
/// R-version max{|R_{qm+m−1}−R|, |R_{qm+m−2}−R|} ≤ 1/φ^(2q−6).
pub fn check_k_rate(x: &RootOfUnity, q_max: u64, ctx: &PrecisionContext) -> Result<TraceReport> {
    let m = x.m();
    if m % 5 == 0 {
        return Err(Error::WrongResidueClass(m));
    }
    if q_max < 2 {
        return Err(Error::InvalidArgument("check_k_rate needs q_max ≥ 2".into()));
    }
    let bits = ctx.bits();
    let schur = schur_eval(x, ctx)?;
    let root = x.unit(ctx)?.fifth_root(ctx)?.value().clone();
    let r_limit = &schur.r_value;
    let mut report = TraceReport::new("k-rate", bits);
    let stops: Vec<u64> = (2..=q_max).map(|q| q * m + m - 1).collect();
    let caps = run_with_stops(x.eval_point(ctx)?, ctx, &stops)?;
    let near = m % 5 == 1 || m % 5 == 4;
    let zero = Float::with_val(bits, 0u32);
    for (q, cap) in (2..=q_max).zip(&caps) {
        let qi = q as i64;
        let k_end = Complex::with_val(bits, &cap.p / &cap.q);
        let dk = abs_f(&Complex::with_val(bits, &k_end - &schur.k_value), bits);
        let (lo, hi) = cushioned(
            phi_power(-(2 * qi + 1), bits),
            phi_power(-2 * qi, bits),
            bits,
        );
        report.push(qi, "k-rate-end", dk, lo, hi);
        let k_prev = Complex::with_val(bits, &cap.p_prev / &cap.q_prev);
        let dk_prev = abs_f(&Complex::with_val(bits, &k_prev - &schur.k_value), bits);
        // The window-prev rate splits by residue class: the inner branch sits
        // one golden factor above the window-end rate, the outer branch three
        // factors below it.
        if near {
            let (lo, hi) = cushioned(
                phi_power(-(2 * qi - 1), bits),
                phi_power(-(2 * qi - 2), bits),
                bits,
            );
            report.push(qi, "k-rate-prev-near", dk_prev, lo, hi);
        } else {
            let (lo, hi) = cushioned(
                phi_power(-(2 * qi + 3), bits),
                phi_power(-(2 * qi + 2), bits),
                bits,
            );
            report.push(qi, "k-rate-prev-far", dk_prev, lo, hi);
        }
        let r_end = r_from_parts(&root, &cap.p, &cap.q, &cap.scale, ctx);
        let r_prev = r_from_parts(&root, &cap.p_prev, &cap.q_prev, &cap.scale, ctx);
        let measured = match (r_end, r_prev) {
            (Some(re), Some(rp)) => {
                let d1 = abs_f(&Complex::with_val(bits, &re - r_limit), bits);
                let d2 = abs_f(&Complex::with_val(bits, &rp - r_limit), bits);
                if d1 >= d2 {
                    d1
                } else {
                    d2
                }
            }
            _ => f_inf(bits),
        };
        report.push(
            qi,
            "r-rate-max",
            measured,
            zero.clone(),
            phi_power(-(2 * qi - 6), bits),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Perturbation stability off the root
// ---------------------------------------------------------------------------

/// Stability of the window values under a nearby evaluation point y: with
/// ε = max over the window of the P/Q shifts,
///   |K_n(y) − K_n(x)| ≤ 10ε/φ^(q−2),
/// and, under the stated preconditions (q ≥ 3, angle gap < 5π/3 and
/// ε ≤ 1/(20φ²)),
///   |R_n(y) − R_n(x)| < 3φ|x−y| + 60ε/φ^(q−4),
///   |R_n(y) − R(x)|   ≤ 3φ|x−y| + 60ε/φ^(q−4) + 1/φ^(2q−3).
/// Violated preconditions are reported as failing rows, never skipped
/// silently; the dependent R rows are then omitted.
pub fn check_perturbation(
    x: &RootOfUnity,
    y_angle: &Rational,
    q: u64,
    ctx: &PrecisionContext,
) -> Result<TraceReport> {
    let m = x.m();
    if m % 5 == 0 {
        return Err(Error::WrongResidueClass(m));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(
            "check_perturbation needs q ≥ 2".into(),
        ));
    }
    let bits = ctx.bits();
    let mut report = TraceReport::new("perturbation", bits);
    let schur = schur_eval(x, ctx)?;
    let x_unit = x.unit(ctx)?;
    let y_unit = unit_point(y_angle, ctx)?;
    let x_point = EvalPoint::from_unit(&x_unit);
    let y_point = EvalPoint::from_unit(&y_unit);
    let dxy = abs_f(&Complex::with_val(bits, x_unit.value() - y_unit.value()), bits);
    let n1 = q * m + m - 1;
    let stops = [n1];
    let cx = run_with_stops(x_point, ctx, &stops)?.remove(0);
    let cy = run_with_stops(y_point, ctx, &stops)?.remove(0);
    let qi = q as i64;
    let zero = Float::with_val(bits, 0u32);

    let mut eps = Float::with_val(bits, 0u32);
    for (a, b) in [
        (&cy.p, &cx.p),
        (&cy.p_prev, &cx.p_prev),
        (&cy.q, &cx.q),
        (&cy.q_prev, &cx.q_prev),
    ] {
        let d = abs_f(&Complex::with_val(bits, a - b), bits);
        if d > eps {
            eps = d;
        }
    }
    report.push(
        qi,
        "eps-max-shift",
        eps.clone(),
        zero.clone(),
        Float::with_val(bits, 0.5f64),
    );

    let k_cap = Float::with_val(bits, 10u32) * &eps * phi_power(-(qi - 2), bits);
    for (label, p, qden, p2, q2) in [
        ("k-shift-end", &cy.p, &cy.q, &cx.p, &cx.q),
        ("k-shift-prev", &cy.p_prev, &cy.q_prev, &cx.p_prev, &cx.q_prev),
    ] {
        let ky = Complex::with_val(bits, p / qden);
        let kx = Complex::with_val(bits, p2 / q2);
        let dk = abs_f(&Complex::with_val(bits, ky - kx), bits);
        report.push(qi, label, dk, zero.clone(), k_cap.clone());
    }

    // R-row preconditions.  The angle gap is compared exactly in turns:
    // 5π/3 radians = 5/12 of a turn.
    let q_ok = q >= 3;
    report.push_flag(
        qi,
        "precond-window-depth",
        Float::with_val(bits, q),
        Float::with_val(bits, 3u32),
        f_inf(bits),
        q_ok,
    );
    let gap = Rational::from(x.angle() - y_angle).abs();
    let angle_ok = gap < Rational::from((5u32, 12u32));
    report.push_flag(
        qi,
        "precond-angle-gap",
        Float::with_val(bits, &gap),
        zero.clone(),
        Float::with_val(bits, Rational::from((5u32, 12u32))),
        angle_ok,
    );
    let eps_cap = Float::with_val(bits, 1u32) / (Float::with_val(bits, 20u32) * phi_power(2, bits));
    let eps_ok = le(&eps, &eps_cap);
    report.push_flag(
        qi,
        "precond-eps-small",
        eps.clone(),
        zero.clone(),
        eps_cap,
        eps_ok,
    );
    if !(q_ok && angle_ok && eps_ok && le(&eps, &Float::with_val(bits, 0.5f64))) {
        return Ok(report);
    }

    let root_x = x_unit.fifth_root(ctx)?.value().clone();
    let root_y = y_unit.fifth_root(ctx)?.value().clone();
    let drift = Float::with_val(bits, 3u32) * phi_power(1, bits) * &dxy
        + Float::with_val(bits, 60u32) * &eps * phi_power(-(qi - 4), bits);
    let tail = phi_power(-(2 * qi - 3), bits);
    for (label_s, label_l, py, qy, px, qx) in [
        ("r-shift-end", "r-limit-end", &cy.p, &cy.q, &cx.p, &cx.q),
        (
            "r-shift-prev",
            "r-limit-prev",
            &cy.p_prev,
            &cy.q_prev,
            &cx.p_prev,
            &cx.q_prev,
        ),
    ] {
        let ry = r_from_parts(&root_y, py, qy, &cy.scale, ctx);
        let rx = r_from_parts(&root_x, px, qx, &cx.scale, ctx);
        let (ry, rx) = match (ry, rx) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                report.push_flag(
                    qi,
                    label_s,
                    f_inf(bits),
                    zero.clone(),
                    drift.clone(),
                    false,
                );
                continue;
            }
        };
        let dshift = abs_f(&Complex::with_val(bits, &ry - &rx), bits);
        report.push(qi, label_s, dshift, zero.clone(), drift.clone());
        let dlimit = abs_f(&Complex::with_val(bits, &ry - &schur.r_value), bits);
        report.push(
            qi,
            label_l,
            dlimit,
            zero.clone(),
            Float::with_val(bits, &drift + &tail),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Divergence certificate along a thresholded stream
// ---------------------------------------------------------------------------

/// Denominator cap for fast-growth streams traced by the full engine.
fn stream_u64(v: &Integer, what: &str) -> Result<u64> {
    v.to_u64()
        .ok_or_else(|| Error::CapExceeded(format!("{what} {v} does not fit in 64 bits")))
}

/// Materialize exactly `want` convergents, or as many as fit under the cap.
fn convergents_until_cap(
    rule: &StreamRule,
    want: u64,
) -> Result<(Vec<Convergent>, Vec<SetSCertificate>)> {
    let mut gen = Generator::new(rule.clone());
    let mut convs = Vec::new();
    let mut certs = Vec::new();
    for _ in 0..want {
        match gen.step() {
            Ok((conv, cert)) => {
                convs.push(conv);
                if let Some(c) = cert {
                    certs.push(c);
                }
            }
            Err(Error::CapExceeded(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok((convs, certs))
}

/// The four-link divergence certificate, per level i of the stream:
///   1. radius: d_{i+1} > d_i·φ^(d_i), decided in exact integer arithmetic
///      (compare 2d_{i+1} − d_i·L_{d_i} against √5·d_i·F_{d_i} by squaring);
///   2. threshold: the stream's own growth witness (certificate re-check for
///      thresholded streams, a_{i+1} ≥ 2^(d_i) for the tower);
///   3. boundary window: max{|Q_{d_i−1}(x_i)|, |Q_{d_i−2}(x_i)|} ≤ 2 at the
///      root x_i = e^(2πi·c_i/d_i), from the closed-form boundary quadruple;
///   4. transported window: |Q(x_i)−Q(y)| < 4 term-by-term, |Q_{d_i−1}(y)| < 6,
///      |Q_{d_i−2}(y)| < 6 and their product < 36 at y = e^(2πi·t*), where
///      t* is the (levels+1)-th convergent of the stream's limit.
pub fn divergence_trace(rule: &StreamRule, levels: u64) -> Result<TraceReport> {
    if levels == 0 {
        return Err(Error::InvalidArgument("divergence_trace needs levels ≥ 1".into()));
    }
    let want = levels + 1;
    let (convs, certs) = crate::cfrac::convergents(rule, want)?;
    let d_last = stream_u64(&convs[levels as usize - 1].d, "trace denominator")?;
    let bits = (2.0 * d_last as f64 * LOG2_PHI).ceil() as u32 + 256;
    // Long engine runs accumulate amplified rounding; the wider guard keeps
    // the dual-track check from tripping on honest results.
    let ctx = PrecisionContext::new(bits, 64)?;
    let mut report = TraceReport::new("divergence-trace", bits);
    let zero = Float::with_val(bits, 0u32);

    let t_star = Rational::from((
        convs[levels as usize].c.clone(),
        convs[levels as usize].d.clone(),
    ));
    let y_point = EvalPoint::from_unit(&unit_point(&t_star, &ctx)?);
    let stops: Vec<u64> = convs[..levels as usize]
        .iter()
        .map(|cv| stream_u64(&cv.d, "trace denominator").map(|d| d - 1))
        .collect::<Result<_>>()?;
    let caps = run_with_stops(y_point, &ctx, &stops)?;

    let d_j = Float::with_val(bits, &convs[levels as usize].d);
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    for (i, cap) in (1..=levels).zip(&caps) {
        let ii = i as i64;
        let d_i = stream_u64(&convs[i as usize - 1].d, "trace denominator")?;
        let d_next = &convs[i as usize].d;

        // Link 1: exact golden-radius comparison.
        if d_i > 1_000_000 {
            return Err(Error::CapExceeded(format!(
                "radius link at level {i} needs Fibonacci index {d_i}"
            )));
        }
        let s = Integer::from(2u32) * d_next - Integer::from(d_i) * lucas(d_i as i64);
        let rhs = Integer::from(d_i) * fibonacci(d_i as i64);
        let radius_ok = s > 0 && s.clone().square() > Integer::from(5u32) * rhs.square();
        report.push_flag(
            ii,
            "link-radius",
            Float::with_val(bits, d_next),
            Float::with_val(bits, d_i) * phi_power(d_i as i64, bits),
            f_inf(bits),
            radius_ok,
        );

        // Link 2: the stream's own growth threshold.
        if let Some(cert) = certs.iter().find(|c| c.level == i) {
            report.push_flag(
                ii,
                "link-threshold-cert",
                Float::with_val(bits, &cert.quotient),
                Float::with_val(bits, &cert.ceiling),
                f_inf(bits),
                cert.verify()?,
            );
        } else if matches!(rule, StreamRule::Tower { .. }) {
            let d_before = if i >= 2 {
                convs[i as usize - 2].d.clone()
            } else {
                Integer::from(1u32)
            };
            let a_next = Integer::from(d_next - &d_before) / Integer::from(d_i);
            let power = Integer::from(1u32) << u32::try_from(d_i).map_err(|_| {
                Error::CapExceeded(format!("2^{d_i} at level {i} is not materializable"))
            })?;
            report.push_flag(
                ii,
                "link-threshold-power2",
                Float::with_val(bits, &a_next),
                Float::with_val(bits, &power),
                f_inf(bits),
                a_next >= power,
            );
        }

        // Link 3: boundary window bound at the exact root.
        let k_i = Integer::from(&convs[i as usize - 1].c % &convs[i as usize - 1].d);
        let x_i = RootOfUnity::new(
            k_i.to_i64().ok_or_else(|| {
                Error::CapExceeded(format!("root numerator at level {i} does not fit"))
            })?,
            d_i,
        )?;
        let quad = boundary_quad(&x_i, &ctx)?;
        let b1 = abs_f(&quad.q_m1, bits);
        let b2 = abs_f(&quad.q_m2, bits);
        let boundary = if b1 >= b2 { b1 } else { b2 };
        let (lo, hi) = cushioned(zero.clone(), Float::with_val(bits, 2u32), bits);
        report.push(ii, "boundary-window", boundary, lo, hi);

        // Link 4: window transported to y.
        debug_assert_eq!(cap.n, d_i - 1);
        let four = Float::with_val(bits, 4u32);
        let shift1 = abs_f(&Complex::with_val(bits, &cap.q - &quad.q_m1), bits);
        report.push(ii, "window-shift-end", shift1, zero.clone(), four.clone());
        let shift2 = abs_f(&Complex::with_val(bits, &cap.q_prev - &quad.q_m2), bits);
        report.push(ii, "window-shift-prev", shift2, zero.clone(), four);
        let y1 = abs_f(&cap.q, bits);
        let y2 = abs_f(&cap.q_prev, bits);
        let six = Float::with_val(bits, 6u32);
        report.push(ii, "window-y-end", y1.clone(), zero.clone(), six.clone());
        report.push(ii, "window-y-prev", y2.clone(), zero.clone(), six);
        report.push(
            ii,
            "window-product",
            y1 * &y2,
            zero.clone(),
            Float::with_val(bits, 36u32),
        );

        // Substituting t* for the stream's limit moves Q by at most
        // n²φⁿ·2π/d_J² at n = d_i−1; record that this slack is negligible
        // against the O(1) window margins.
        let n = d_i - 1;
        let slack = Float::with_val(bits, n) .square()
            * phi_power(n as i64, bits)
            * Float::with_val(bits, 2u32)
            * &pi
            / Float::with_val(bits, d_j.clone()).square();
        report.push(
            ii,
            "substitution-slack",
            slack,
            zero.clone(),
            Float::with_val(bits, 0.01f64),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Ten-limit trace along the residue-patterned stream
// ---------------------------------------------------------------------------

/// Catalog indices the residue-constrained stream's limits cycle through;
/// one period covers every catalog value.
pub const LIMIT_PATTERN: [u8; 12] = [6, 7, 8, 9, 10, 2, 3, 4, 5, 1, 8, 7];

/// Largest denominator for which the engine walks all d²+d−1 steps.
const TRACE_D_CAP: u64 = 400;

/// Per reachable level i of the residue-constrained stream, with d = d_i and
/// the pattern target T_j = LIMIT_PATTERN[j], j = i mod 12 (1-based):
///   |R_{d²+d−1}(y) − T_j| ≤ 500/φ^(2d)  and the same at d²+d−2,
/// plus the closed-form root value matching the pattern index and the mod-5
/// convergent pairs matching the pattern stream.  Levels whose window is too
/// deep to walk are reported as unreached rather than failing the run.
pub fn ten_limits_trace(levels: u64) -> Result<TraceReport> {
    if levels == 0 {
        return Err(Error::InvalidArgument("ten_limits_trace needs levels ≥ 1".into()));
    }
    let rule = StreamRule::SPrime;
    let (convs, _) = convergents_until_cap(&rule, levels + 1)?;
    if convs.len() < 2 {
        return Err(Error::CapExceeded("stream not materializable".into()));
    }
    // Trace levels must leave one deeper convergent for the evaluation point.
    let mut reach = 0u64;
    for cv in &convs[..convs.len() - 1] {
        match cv.d.to_u64() {
            Some(d) if d <= TRACE_D_CAP => reach += 1,
            _ => break,
        }
    }
    let reach = reach.min(levels);
    if reach == 0 {
        return Err(Error::CapExceeded("no reachable trace level".into()));
    }
    let d_deep = convs[reach as usize - 1].d.to_u64().expect("reachable");
    let bits = ((2 * (d_deep + 2)) as f64 * LOG2_PHI).ceil() as u32 + 256;
    let bits = bits.max(512);
    // d² + d − 1 engine steps need the wider rounding guard.
    let ctx = PrecisionContext::new(bits, 64)?;
    let mut report = TraceReport::new("ten-limits", bits);
    let zero = Float::with_val(bits, 0u32);

    report.push_flag(
        0,
        "reachable-depth",
        Float::with_val(bits, reach),
        Float::with_val(bits, 1u32),
        Float::with_val(bits, levels),
        true,
    );

    // Residue pattern: the constructed stream's mod-5 convergent pairs
    // reproduce the reference pattern on the whole materialized prefix.
    let steps = reach + 1;
    let got = mod_convergents(&rule, 5, steps)?;
    let want = mod_convergents(&alpha_rule(), 5, steps)?;
    report.push_flag(
        0,
        "residue-pattern",
        Float::with_val(bits, steps),
        Float::with_val(bits, steps),
        Float::with_val(bits, steps),
        got.pairs == want.pairs,
    );

    let t_star = Rational::from((
        convs[reach as usize].c.clone(),
        convs[reach as usize].d.clone(),
    ));
    let y_unit = unit_point(&t_star, &ctx)?;
    let root_y = y_unit.fifth_root(&ctx)?.value().clone();
    let y_point = EvalPoint::from_unit(&y_unit);
    let stops: Vec<u64> = convs[..reach as usize]
        .iter()
        .map(|cv| {
            let d = cv.d.to_u64().expect("reachable");
            d * d + d - 1
        })
        .collect();
    let caps = run_with_stops(y_point, &ctx, &stops)?;

    for (i, cap) in (1..=reach).zip(&caps) {
        let ii = i as i64;
        let d = convs[i as usize - 1].d.to_u64().expect("reachable");
        let w_index = LIMIT_PATTERN[((i - 1) % 12) as usize];
        let target = r_catalog(w_index, &ctx)?;
        let envelope = Float::with_val(bits, 500u32) * phi_power(-2 * d as i64, bits);

        // Closed-form value at the root itself.  A degenerate first level with
        // d = 1 wraps the angle (the root is the point 1), where the reduced
        // value is the catalog's tenth entry instead of the pattern's —
        // recorded as its own row.
        let k_i = Integer::from(&convs[i as usize - 1].c % &convs[i as usize - 1].d);
        let x_i = RootOfUnity::new(k_i.to_i64().expect("reachable"), d)?;
        let schur = schur_eval(&x_i, &ctx)?;
        let expected = if d == 1 { 10 } else { w_index };
        let label = if d == 1 {
            "root-index-anglewrap"
        } else {
            "root-index"
        };
        report.push_flag(
            ii,
            label,
            Float::with_val(bits, schur.r_index),
            Float::with_val(bits, expected),
            Float::with_val(bits, expected),
            schur.r_index == expected,
        );

        let r_end = r_from_parts(&root_y, &cap.p, &cap.q, &cap.scale, &ctx);
        let r_prev = r_from_parts(&root_y, &cap.p_prev, &cap.q_prev, &cap.scale, &ctx);
        for (label, r) in [("r-end-near-target", r_end), ("r-prev-near-target", r_prev)] {
            let measured = match r {
                Some(v) => abs_f(&Complex::with_val(bits, v - &target), bits),
                None => f_inf(bits),
            };
            report.push(ii, label, measured, zero.clone(), envelope.clone());
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// General-divergence probe
// ---------------------------------------------------------------------------

/// Candidate sequences fed to the probe.  `CommonLimit` solves
/// S_n(v_n) = g exactly and S_n(w_n) = g + 2^(−level) (both S-sequences share
/// the limit g while v ≠ w); `Constants` probes two fixed points.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CandidateSpec {
    CommonLimit { re: f64, im: f64 },
    Constants { v: f64, w: f64 },
}

#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub level: u64,
    pub n: u64,
    /// Catalog index of the closed-form limit at this level's root.
    pub r_index: u8,
    /// |Q_n/Q_{n−1}| and its allowed band.
    pub ratio_abs: Float,
    pub band_lo: Float,
    pub band_hi: Float,
    pub in_band: bool,
    /// S_n at the critical tail is an exact pole.
    pub pole_is_infinite: bool,
    /// |v_n + Q_n/Q_{n−1}| and |w_n + Q_n/Q_{n−1}|.
    pub v_sum: Float,
    pub w_sum: Float,
    /// Chordal distance d(v_n, w_n).
    pub cand_gap: Float,
}

#[derive(Clone, Debug)]
pub struct ProbeOutcome {
    pub bits: u32,
    pub rows: Vec<ProbeRow>,
    /// Distinct catalog limits witnessed along the trace, and their gap.
    pub limit_a: u8,
    pub limit_b: u8,
    pub limit_gap: Float,
    pub limit_gap_ok: bool,
    pub sums_decreasing: bool,
    pub gaps_decreasing: bool,
    pub reachable: u64,
    pub verdict: String,
}

impl ProbeOutcome {
    pub fn to_csv(&self) -> String {
        let digits = digits_for_bits(self.bits);
        let mut out =
            String::from("level,n,r_index,ratio_abs,band_lo,band_hi,in_band,pole_is_infinite,v_sum,w_sum,cand_gap\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.level,
                r.n,
                r.r_index,
                fmt_float(&r.ratio_abs, digits),
                fmt_float(&r.band_lo, digits),
                fmt_float(&r.band_hi, digits),
                r.in_band,
                r.pole_is_infinite,
                fmt_float(&r.v_sum, digits),
                fmt_float(&r.w_sum, digits),
                fmt_float(&r.cand_gap, digits),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let digits = digits_for_bits(self.bits);
        let rows: Vec<ProbeRowJson> = self
            .rows
            .iter()
            .map(|r| ProbeRowJson {
                level: r.level,
                n: r.n,
                r_index: r.r_index,
                ratio_abs: fmt_float(&r.ratio_abs, digits),
                band_lo: fmt_float(&r.band_lo, digits),
                band_hi: fmt_float(&r.band_hi, digits),
                in_band: r.in_band,
                pole_is_infinite: r.pole_is_infinite,
                v_sum: fmt_float(&r.v_sum, digits),
                w_sum: fmt_float(&r.w_sum, digits),
                cand_gap: fmt_float(&r.cand_gap, digits),
            })
            .collect();
        serde_json::to_string_pretty(&ProbeJson {
            schema: "rrlab-v1".into(),
            experiment: "general-divergence-probe".into(),
            bits: self.bits,
            limit_a: self.limit_a,
            limit_b: self.limit_b,
            limit_gap: fmt_float(&self.limit_gap, digits),
            limit_gap_ok: self.limit_gap_ok,
            sums_decreasing: self.sums_decreasing,
            gaps_decreasing: self.gaps_decreasing,
            reachable: self.reachable,
            verdict: self.verdict.clone(),
            rows,
        })
        .expect("probe serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ProbeJson {
    schema: String,
    experiment: String,
    bits: u32,
    limit_a: u8,
    limit_b: u8,
    limit_gap: String,
    limit_gap_ok: bool,
    sums_decreasing: bool,
    gaps_decreasing: bool,
    reachable: u64,
    verdict: String,
    rows: Vec<ProbeRowJson>,
}

#[derive(Serialize, Deserialize)]
struct ProbeRowJson {
    level: u64,
    n: u64,
    r_index: u8,
    ratio_abs: String,
    band_lo: String,
    band_hi: String,
    in_band: bool,
    pole_is_infinite: bool,
    v_sum: String,
    w_sum: String,
    cand_gap: String,
}

/// Probe the no-general-limit mechanism along a thresholded stream: at the
/// window ends n = d²+d−1 the forced tail −Q_n/Q_{n−1} stays in the golden
/// band while the closed-form limits across levels hit distinct catalog
/// values; any candidate pair (v_n, w_n) driving S_n to a common limit is
/// pulled onto the forced tail, so the candidates collapse together.  The
/// verdict is "general-divergence-consistent" only when the w-sums and the
/// candidate gaps decrease monotonically beyond `monotone_from` (0-based row
/// index), every tail sits in its band, and the witnessed limits differ by
/// more than 0.1.
pub fn general_divergence_probe(
    rule: &StreamRule,
    levels: u64,
    candidates: &CandidateSpec,
    monotone_from: usize,
) -> Result<ProbeOutcome> {
    match rule {
        StreamRule::SMinimal | StreamRule::SDiamond { .. } | StreamRule::SPrime => {}
        _ => {
            return Err(Error::InvalidArgument(
                "general_divergence_probe expects a thresholded stream".into(),
            ))
        }
    }
    if levels == 0 {
        return Err(Error::InvalidArgument("probe needs levels ≥ 1".into()));
    }
    let (convs, _) = convergents_until_cap(rule, levels + 1)?;
    if convs.len() < 2 {
        return Err(Error::CapExceeded("stream not materializable".into()));
    }
    let mut reach = 0u64;
    for cv in &convs[..convs.len() - 1] {
        match cv.d.to_u64() {
            Some(d) if d <= TRACE_D_CAP => reach += 1,
            _ => break,
        }
    }
    let reach = reach.min(levels);
    if reach == 0 {
        return Err(Error::CapExceeded("no reachable probe level".into()));
    }
    let d_deep = convs[reach as usize - 1].d.to_u64().expect("reachable");
    let bits = (((2 * (d_deep + 2)) as f64 * LOG2_PHI).ceil() as u32 + 256).max(512);
    // d² + d − 1 engine steps need the wider rounding guard.
    let ctx = PrecisionContext::new(bits, 64)?;

    let t_star = Rational::from((
        convs[reach as usize].c.clone(),
        convs[reach as usize].d.clone(),
    ));
    let y_point = EvalPoint::from_unit(&unit_point(&t_star, &ctx)?);
    let stops: Vec<u64> = convs[..reach as usize]
        .iter()
        .map(|cv| {
            let d = cv.d.to_u64().expect("reachable");
            d * d + d - 1
        })
        .collect();

    // Re-run the engine per stop to keep the exact state for tail_modified.
    let mut rows = Vec::new();
    let mut indices = Vec::new();
    for (i, &n) in (1..=reach).zip(&stops) {
        let d = convs[i as usize - 1].d.to_u64().expect("reachable");
        let k_i = Integer::from(&convs[i as usize - 1].c % &convs[i as usize - 1].d);
        let x_i = RootOfUnity::new(k_i.to_i64().expect("reachable"), d)?;
        let r_index = schur_eval(&x_i, &ctx)?.r_index;
        indices.push(r_index);

        let mut eng = ConvergentPair::new(y_point.clone(), &ctx);
        eng.advance_to(n)?;
        // The pole tail is −h_n; critical_tail() reports h_n itself.
        let pole = match eng.critical_tail() {
            ExtendedComplex::Finite(h) => ExtendedComplex::Finite(-h),
            inf => inf,
        };
        let pole_is_infinite = eng.tail_modified(&pole).is_infinity();
        let q_prev_abs = abs_f(eng.q_prev(), bits);
        let floor = ctx.tol() * eng.growth_scale();
        let (ratio_abs, h) = if q_prev_abs <= floor {
            (f_inf(bits), None)
        } else {
            let h = Complex::with_val(bits, eng.q_n() / eng.q_prev());
            (abs_f(&h, bits), Some(h))
        };
        let delta = Float::with_val(bits, 10u32) * phi_power(-(d as i64), bits);
        let band_lo = phi_power(-2, bits) - &delta;
        let band_hi = phi_power(2, bits) + &delta;
        let in_band = le(&band_lo, &ratio_abs) && le(&ratio_abs, &band_hi);

        let (v_n, w_n): (Option<Complex>, Option<Complex>) = match candidates {
            CandidateSpec::Constants { v, w } => (
                Some(Complex::with_val(bits, (*v, 0.0))),
                Some(Complex::with_val(bits, (*w, 0.0))),
            ),
            CandidateSpec::CommonLimit { re, im } => {
                let g = Complex::with_val(bits, (*re, *im));
                let solve = |target: &Complex| -> Option<Complex> {
                    let den = Complex::with_val(bits, eng.p_prev() - target * eng.q_prev());
                    if abs_f(&den, bits) <= floor {
                        return None;
                    }
                    Some(-(Complex::with_val(bits, eng.p_n() - target * eng.q_n()) / den))
                };
                let mut shifted = g.clone();
                *shifted.mut_real() += Float::with_val(bits, 1u32) >> u32::try_from(i).unwrap_or(63);
                (solve(&g), solve(&shifted))
            }
        };
        let sum_of = |cand: &Option<Complex>| -> Float {
            match (cand, &h) {
                (Some(c), Some(hv)) => abs_f(&Complex::with_val(bits, c + hv), bits),
                _ => f_inf(bits),
            }
        };
        let v_sum = sum_of(&v_n);
        let w_sum = sum_of(&w_n);
        let cand_gap = match (&v_n, &w_n) {
            (Some(v), Some(w)) => chordal_distance(
                &ExtendedComplex::Finite(v.clone()),
                &ExtendedComplex::Finite(w.clone()),
                &ctx,
            )?,
            _ => f_inf(bits),
        };
        rows.push(ProbeRow {
            level: i,
            n,
            r_index,
            ratio_abs,
            band_lo,
            band_hi,
            in_band,
            pole_is_infinite,
            v_sum,
            w_sum,
            cand_gap,
        });
    }

    // Witnessed limit pair: the first two distinct catalog indices.
    let limit_a = indices[0];
    let limit_b = indices
        .iter()
        .copied()
        .find(|&j| j != limit_a)
        .unwrap_or(limit_a);
    let (limit_gap, limit_gap_ok) = if limit_a == limit_b {
        (Float::with_val(bits, 0u32), false)
    } else {
        let va = r_catalog(limit_a, &ctx)?;
        let vb = r_catalog(limit_b, &ctx)?;
        let gap = abs_f(&Complex::with_val(bits, va - vb), bits);
        let ok = gap > Float::with_val(bits, 0.1f64);
        (gap, ok)
    };
    let decreasing = |take: &dyn Fn(&ProbeRow) -> &Float| -> bool {
        let vals: Vec<&Float> = rows.iter().skip(monotone_from).map(take).collect();
        vals.len() >= 2 && vals.windows(2).all(|w| w[1] < w[0])
    };
    let sums_decreasing = decreasing(&|r| &r.v_sum) && decreasing(&|r| &r.w_sum);
    let gaps_decreasing = decreasing(&|r| &r.cand_gap);
    let all_in_band = rows.iter().all(|r| r.in_band && r.pole_is_infinite);
    let verdict = if limit_gap_ok && all_in_band && sums_decreasing && gaps_decreasing {
        "general-divergence-consistent"
    } else {
        "inconclusive"
    }
    .to_string();
    Ok(ProbeOutcome {
        bits,
        rows,
        limit_a,
        limit_b,
        limit_gap,
        limit_gap_ok,
        sums_decreasing,
        gaps_decreasing,
        reachable: reach,
        verdict,
    })
}

/// Contrast run at a primitive 5m-th root, where the fraction converges
/// generally: S_n at two separated constant candidates agree in the limit —
/// the chordal gap collapses while the candidates stay apart.
pub fn general_convergence_contrast(
    x: &RootOfUnity,
    v: f64,
    w: f64,
    q_max: u64,
    ctx: &PrecisionContext,
) -> Result<TraceReport> {
    let m = x.m();
    if m % 5 != 0 {
        return Err(Error::WrongResidueClass(m));
    }
    if !x.is_primitive() {
        return Err(Error::InvalidArgument("contrast needs a primitive root".into()));
    }
    if q_max < 2 {
        return Err(Error::InvalidArgument("contrast needs q_max ≥ 2".into()));
    }
    let bits = ctx.bits();
    let mut report = TraceReport::new("general-convergence-contrast", bits);
    let zero = Float::with_val(bits, 0u32);
    let vc = ExtendedComplex::Finite(Complex::with_val(bits, (v, 0.0)));
    let wc = ExtendedComplex::Finite(Complex::with_val(bits, (w, 0.0)));
    let mut eng = ConvergentPair::new(x.eval_point(ctx)?, ctx);
    let mut gaps = Vec::new();
    for q in 1..=q_max {
        eng.advance_to(q * m)?;
        let sv = eng.tail_modified(&vc);
        let sw = eng.tail_modified(&wc);
        let gap = chordal_distance(&sv, &sw, ctx)?;
        report.push(q as i64, "s-gap", gap.clone(), zero.clone(), f_inf(bits));
        gaps.push(gap);
    }
    let first = gaps.first().expect("q_max ≥ 2").clone();
    let last = gaps.last().expect("q_max ≥ 2").clone();
    report.push(
        q_max as i64,
        "s-gap-final",
        last.clone(),
        zero.clone(),
        Float::with_val(bits, 1e-4f64),
    );
    let shrink = if first.is_zero() {
        Float::with_val(bits, 0u32)
    } else {
        last / &first
    };
    report.push(
        q_max as i64,
        "s-gap-shrink-ratio",
        shrink,
        zero.clone(),
        Float::with_val(bits, 1e-3f64),
    );
    let sep = chordal_distance(&vc, &wc, ctx)?;
    report.push(
        q_max as i64,
        "candidate-separation",
        sep,
        Float::with_val(bits, 0.05f64),
        f_inf(bits),
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// Outside-the-disk ratio probe
// ---------------------------------------------------------------------------

/// For |x| < 1/4 recast 1/K(1/x) as 0 + 1/(1 + y/(1 + y²/(1 + …))) with
/// y = 1/x: partial denominators are all 1 (the bounded-coefficient
/// condition with c₁ = c₂ = 1) and the odd/even partial-numerator ratio is
/// the constant |y|.  The probe checks the exact parity identities
/// r_{n−1}(r_n − 1) = a_n, the derived contradiction identity, the constant
/// ratio rows, and the odd/even limit gap: the two parity limits differ, so
/// the fraction cannot converge.
pub fn ratio_blowup_probe(x: &Complex, n_max: u64) -> Result<TraceReport> {
    if !(12..=200).contains(&n_max) {
        return Err(Error::InvalidArgument(
            "ratio_blowup_probe needs 12 ≤ n_max ≤ 200".into(),
        ));
    }
    let probe_bits = 4096u32;
    let ax = abs_f(&Complex::with_val(probe_bits, x), probe_bits).to_f64();
    if !(ax > 0.0 && ax < 0.25) {
        return Err(Error::InvalidArgument(
            "ratio_blowup_probe needs 0 < |x| < 1/4".into(),
        ));
    }
    let ay = 1.0 / ax;
    let bits = ((0.5 * (n_max as f64) * (n_max as f64) * ay.log2()).ceil() as u32 + 512).max(1024);
    let mut report = TraceReport::new("ratio-blowup", bits);
    let zero = Float::with_val(bits, 0u32);
    let one = Float::with_val(bits, 1u32);

    let xc = Complex::with_val(bits, x);
    let y = Complex::with_val(bits, 1u32) / &xc;
    let y_abs = abs_f(&y, bits);

    // b₀ = 0, a₁ = 1, bₙ = 1 and aₙ = y^(n−1) for n ≥ 2.
    let mut b_prev = Complex::with_val(bits, 0u32); // B_{-1}
    let mut b_cur = Complex::with_val(bits, 1u32); // B_0
    let mut a_n = Complex::with_val(bits, 1u32);
    let mut ratios: Vec<Complex> = Vec::with_capacity(n_max as usize + 1);
    let mut a_abs: Vec<Float> = vec![Float::with_val(bits, 0u32)]; // pad index 0
    for n in 1..=n_max {
        if n >= 2 {
            a_n *= &y; // a_n = y^(n-1)
        }
        let b_new = Complex::with_val(bits, &b_cur + Complex::with_val(bits, &a_n * &b_prev));
        b_prev = std::mem::replace(&mut b_cur, b_new);
        // r_n = B_n / B_{n−1}
        ratios.push(Complex::with_val(bits, &b_cur / &b_prev));
        a_abs.push(abs_f(&a_n, bits));
    }
    let r = |n: u64| -> &Complex { &ratios[n as usize - 1] };

    let tol = {
        let mut t = Float::with_val(bits, 1u32);
        t >>= bits / 4;
        t
    };
    // con1: every partial denominator is exactly 1.
    report.push(0, "con1-denominators", one.clone(), one.clone(), one.clone());
    for n in 2..=n_max {
        let ni = n as i64;
        // Exact parity identity r_{n−1}(r_n − 1) = a_n, measured relatively.
        let lhs = Complex::with_val(bits, r(n - 1) * Complex::with_val(bits, r(n) - &one));
        let a_here = if n == 1 {
            Complex::with_val(bits, 1u32)
        } else {
            let mut p = Complex::with_val(bits, 1u32);
            p *= y.clone().pow((n - 1) as u32);
            p
        };
        let rel = abs_f(&Complex::with_val(bits, lhs - &a_here), bits) / &a_abs[n as usize];
        report.push(ni, "parity-identity", rel, zero.clone(), tol.clone());
        // con2: odd/even numerator ratio is the constant |y|.
        if n % 2 == 1 {
            let ratio = Float::with_val(bits, &a_abs[n as usize] / &a_abs[n as usize - 1]);
            let (lo, hi) = cushioned(y_abs.clone(), y_abs.clone(), bits);
            report.push(ni, "con2-ratio", ratio, lo, hi);
        }
        // Contradiction identity r_{2k}/(r_{2k}−1) = a_{2k+1}r_{2k−1}/(a_{2k}(r_{2k+1}−1)).
        if n % 2 == 0 && n + 1 <= n_max {
            let lhs = Complex::with_val(
                bits,
                r(n) / Complex::with_val(bits, r(n) - &one),
            );
            let num = Complex::with_val(bits, y.clone().pow(n as u32) * r(n - 1));
            let den = Complex::with_val(
                bits,
                y.clone().pow((n - 1) as u32) * Complex::with_val(bits, r(n + 1) - &one),
            );
            let rhs = num / den;
            let rel = abs_f(&Complex::with_val(bits, &lhs - &rhs), bits)
                / abs_f(&lhs, bits);
            report.push(ni, "contradiction-identity", rel, zero.clone(), tol.clone());
        }
    }

    // The two parity limits of the recast fraction differ: the odd/even gap
    // from the series-backed oracle stays strictly positive.
    let gap_ctx = PrecisionContext::new(512, 32)?;
    let n_even = {
        let n = n_max - n_max % 2;
        n.max(10)
    };
    let limits = odd_even_limits(&Complex::with_val(512, x), n_even, &gap_ctx)?;
    report.push(
        n_max as i64,
        "odd-even-gap",
        Float::with_val(bits, &limits.gap),
        Float::with_val(bits, 1e-5f64),
        f_inf(bits),
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// Monte Carlo measure sampler
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SamplerThreshold {
    Constant { value: u64 },
    GoldenPower,
    TwoPiQuadratic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerReport {
    pub threshold: SamplerThreshold,
    pub depth: u64,
    pub samples: u64,
    pub seed: u64,
    /// Fraction of samples whose quotient clears the threshold at level i.
    pub per_level: Vec<f64>,
    /// Fraction with a clearing quotient at some level ≤ i (non-decreasing).
    pub hit_any: Vec<f64>,
    /// Fraction clearing every level ≤ i (non-increasing).
    pub hit_all: Vec<f64>,
    /// Headline number: hit_any at the full depth.
    pub frequency: f64,
}

impl SamplerReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sampler report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,per_level,hit_any,hit_all\n");
        for i in 0..self.per_level.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                self.per_level[i],
                self.hit_any[i],
                self.hit_all[i]
            ));
        }
        out
    }
}

/// Dyadic resolution of the sampled points.
const SAMPLE_BITS: u32 = 256;

fn threshold_met(threshold: &SamplerThreshold, a_next: &Integer, d: &Integer) -> bool {
    match threshold {
        SamplerThreshold::Constant { value } => *a_next >= *value,
        SamplerThreshold::GoldenPower => {
            // a < 2^256 always, so d with φ^d ≥ 2^256 can never be cleared.
            match d.to_u64() {
                Some(du) if du < 370 => match golden_power_ceiling(du) {
                    Ok(ceiling) => *a_next >= ceiling,
                    Err(_) => false,
                },
                _ => false,
            }
        }
        SamplerThreshold::TwoPiQuadratic => match d.to_u64() {
            Some(du) if du < 19 => match two_pi_quadratic_ceiling(d) {
                Ok(ceiling) => *a_next >= ceiling,
                Err(_) => false,
            },
            _ => false,
        },
    }
}

/// Per-sample hit pattern: level i is hit when the exact continued-fraction
/// expansion of the dyadic sample has a_{i+1} ≥ threshold(d_i).
fn sample_hits(k: Integer, threshold: &SamplerThreshold, depth: u64) -> Vec<bool> {
    // Euclid on (2^256, k): quotients of t = k/2^256 ∈ (0,1).
    let mut num = Integer::from(1u32) << SAMPLE_BITS;
    let mut den = k;
    let mut quotients: Vec<Integer> = Vec::with_capacity(depth as usize + 1);
    while !den.is_zero() && quotients.len() < depth as usize + 1 {
        let (qt, rem) = num.div_rem_euc(den.clone());
        quotients.push(qt);
        num = den;
        den = rem;
    }
    let mut hits = vec![false; depth as usize];
    let mut d_prev = Integer::from(0u32);
    let mut d_cur = Integer::from(1u32);
    for i in 1..=depth as usize {
        if i >= quotients.len() + 1 {
            break; // expansion terminated: no deeper quotients to clear
        }
        let d_new = Integer::from(&quotients[i - 1] * &d_cur) + &d_prev;
        d_prev = std::mem::replace(&mut d_cur, d_new);
        if let Some(a_next) = quotients.get(i) {
            hits[i - 1] = threshold_met(threshold, a_next, &d_cur);
        }
    }
    hits
}

/// Sample N uniform dyadic points of (0,1), expand each exactly, and report
/// per-level and cumulative threshold-clearing frequencies.  Deterministic
/// for a fixed seed; only monotonicity is asserted downstream — the sampler
/// illustrates scarcity, it proves nothing.
pub fn measure_sampler(
    threshold: &SamplerThreshold,
    depth: u64,
    samples: u64,
    seed: u64,
) -> Result<SamplerReport> {
    if samples < 100 {
        return Err(Error::InvalidArgument("measure_sampler needs N ≥ 100".into()));
    }
    if !(1..=64).contains(&depth) {
        return Err(Error::InvalidArgument(
            "measure_sampler needs 1 ≤ depth ≤ 64".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples as usize);
    while points.len() < samples as usize {
        let mut bytes = [0u8; 32];
        rng.fill_bytes(&mut bytes);
        let k = Integer::from_digits(&bytes, rug::integer::Order::Lsf);
        if !k.is_zero() {
            points.push(k);
        }
    }
    let thr = threshold.clone();
    let all_hits = parallel_map(points, move |k| sample_hits(k, &thr, depth));

    let n = samples as f64;
    let mut per_level = vec![0.0f64; depth as usize];
    let mut hit_any = vec![0.0f64; depth as usize];
    let mut hit_all = vec![0.0f64; depth as usize];
    for hits in &all_hits {
        let mut any = false;
        let mut all = true;
        for i in 0..depth as usize {
            if hits[i] {
                per_level[i] += 1.0;
            }
            any |= hits[i];
            all &= hits[i];
            if any {
                hit_any[i] += 1.0;
            }
            if all {
                hit_all[i] += 1.0;
            }
        }
    }
    for v in per_level
        .iter_mut()
        .chain(hit_any.iter_mut())
        .chain(hit_all.iter_mut())
    {
        *v /= n;
    }
    let frequency = hit_any[depth as usize - 1];
    Ok(SamplerReport {
        threshold: threshold.clone(),
        depth,
        samples,
        seed,
        per_level,
        hit_any,
        hit_all,
        frequency,
    })
}

// ---------------------------------------------------------------------------
// Full battery
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SummaryItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifySummary {
    pub items: Vec<SummaryItem>,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn lines(&self) -> Vec<String> {
        self.items
            .iter()
            .map(|i| {
                format!(
                    "{} {} ({})",
                    if i.pass { "PASS" } else { "FAIL" },
                    i.name,
                    i.detail
                )
            })
            .collect()
    }
}

fn summarize(items: &mut Vec<SummaryItem>, name: &str, report: &TraceReport) {
    let margin = report
        .worst_margin()
        .map(|m| format!("{m:.3e}"))
        .unwrap_or_else(|| "-".into());
    items.push(SummaryItem {
        name: name.to_string(),
        pass: report.all_pass(),
        detail: format!("rows={} worst_margin={}", report.rows.len(), margin),
    });
}

/// The whole harness in one run.  `full` additionally walks the deepest
/// materializable certificate level (minutes of work at ~50k bits); the quick
/// profile covers every check at the depths used throughout the test suite.
pub fn verify_all(full: bool) -> Result<VerifySummary> {
    let ctx = PrecisionContext::new(256, 32)?;
    let mut items = Vec::new();

    let up = |num: i64, den: u64| -> Result<EvalPoint> {
        Ok(EvalPoint::from_unit(&unit_point(
            &Rational::from((num, den as i64)),
            &ctx,
        )?))
    };
    let report = check_lipschitz(&up(1, 7)?, &up(2, 9)?, 120, &ctx)?;
    summarize(&mut items, "lipschitz-circle", &report);

    for m in [2u64, 11, 13, 14] {
        let k = if m == 14 { 3 } else { 1 };
        let x = RootOfUnity::new(k, m)?;
        summarize(
            &mut items,
            &format!("growth-m{m}"),
            &check_growth(&x, 20, &ctx)?,
        );
        summarize(
            &mut items,
            &format!("k-rate-m{m}"),
            &check_k_rate(&x, 20, &ctx)?,
        );
    }

    let x7 = RootOfUnity::new(1, 7)?;
    let tiny = Rational::from((1u64, 7u64)) + Rational::from((1i64, 10i64)).pow(30);
    summarize(
        &mut items,
        "perturbation-q5-eps1e-30",
        &check_perturbation(&x7, &tiny, 5, &ctx)?,
    );
    let small = Rational::from((1u64, 7u64)) + Rational::from((1i64, 10i64)).pow(16);
    summarize(
        &mut items,
        "perturbation-q6-eps1e-16",
        &check_perturbation(&x7, &small, 6, &ctx)?,
    );

    summarize(
        &mut items,
        "divergence-minimal-3",
        &divergence_trace(&StreamRule::SMinimal, 3)?,
    );
    if full {
        summarize(
            &mut items,
            "divergence-minimal-4",
            &divergence_trace(&StreamRule::SMinimal, 4)?,
        );
    }
    summarize(
        &mut items,
        "divergence-tower-2",
        &divergence_trace(&StreamRule::Tower { base: 2 }, 2)?,
    );

    summarize(&mut items, "ten-limits-2", &ten_limits_trace(2)?);

    let probe = general_divergence_probe(
        &StreamRule::SDiamond {
            residues: vec![1, 2, 1],
        },
        2,
        &CandidateSpec::CommonLimit { re: 1.0, im: 0.0 },
        0,
    )?;
    items.push(SummaryItem {
        name: "general-probe-diamond".into(),
        pass: probe.verdict == "general-divergence-consistent",
        detail: format!(
            "levels={} limits=({},{}) verdict={}",
            probe.reachable, probe.limit_a, probe.limit_b, probe.verdict
        ),
    });

    let x10 = RootOfUnity::new(1, 10)?;
    let glc = crate::schur::general_limit_class(&x10, &ctx)?;
    summarize(
        &mut items,
        "general-contrast-m10",
        &general_convergence_contrast(
            &x10,
            glc.witness_v.to_f64(),
            glc.witness_w.to_f64(),
            12,
            &ctx,
        )?,
    );

    summarize(
        &mut items,
        "ratio-blowup-x0.1",
        &ratio_blowup_probe(&Complex::with_val(128, (0.1, 0.0)), 36)?,
    );

    let always = measure_sampler(&SamplerThreshold::Constant { value: 1 }, 6, 200, 7)?;
    items.push(SummaryItem {
        name: "sampler-constant-1".into(),
        pass: (always.frequency - 1.0).abs() < f64::EPSILON,
        detail: format!("frequency={}", always.frequency),
    });
    let scarce = measure_sampler(&SamplerThreshold::TwoPiQuadratic, 10, 10_000, 7)?;
    let scarce_again = measure_sampler(&SamplerThreshold::TwoPiQuadratic, 10, 10_000, 7)?;
    let monotone_all = scarce.hit_all.windows(2).all(|w| w[1] <= w[0]);
    let monotone_any = scarce.hit_any.windows(2).all(|w| w[1] >= w[0]);
    items.push(SummaryItem {
        name: "sampler-threshold-scarce".into(),
        pass: scarce == scarce_again && monotone_all && monotone_any,
        detail: format!("frequency={:.4} deterministic={}", scarce.frequency, scarce == scarce_again),
    });

    Ok(VerifySummary { items })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigarith::phi;

    fn ctx256() -> PrecisionContext {
        PrecisionContext::new(256, 32).unwrap()
    }

    fn circle_point(num: i64, den: u64, ctx: &PrecisionContext) -> EvalPoint {
        EvalPoint::from_unit(&unit_point(&Rational::from((num, den as i64)), ctx).unwrap())
    }

    #[test]
    fn report_pass_logic_and_serialization() {
        let ctx = ctx256();
        let bits = ctx.bits();
        let mut report = TraceReport::new("demo", bits);
        report.push(
            1,
            "inside",
            Float::with_val(bits, 2u32),
            Float::with_val(bits, 1u32),
            Float::with_val(bits, 3u32),
        );
        report.push(
            2,
            "at-edge",
            Float::with_val(bits, 3u32),
            Float::with_val(bits, 1u32),
            Float::with_val(bits, 3u32),
        );
        report.push(
            3,
            "outside",
            Float::with_val(bits, 5u32),
            Float::with_val(bits, 1u32),
            Float::with_val(bits, 3u32),
        );
        report.push(
            4,
            "nan-fails",
            Float::with_val(bits, Special::Nan),
            Float::with_val(bits, Special::NegInfinity),
            f_inf(bits),
        );
        let flags: Vec<bool> = report.rows.iter().map(|r| r.pass).collect();
        assert_eq!(flags, vec![true, true, false, false]);
        assert!(!report.all_pass());
        // worst margin is the outside row's −2.
        assert!((report.worst_margin().unwrap() + 2.0).abs() < 1e-12);

        let csv = report.to_csv();
        assert!(csv.starts_with("index,what,measured,lower,upper,pass\n"));
        assert_eq!(csv.lines().count(), 5);
        let json = report.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["schema"], "rrlab-v1");
        assert_eq!(parsed["rows"].as_array().unwrap().len(), 4);
        assert_eq!(parsed["all_pass"], false);
    }

    #[test]
    fn lipschitz_holds_on_random_circle_pairs() {
        // 200 steps at arbitrary angles: give the rounding guard headroom.
        let ctx = PrecisionContext::new(256, 64).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = (rng.next_u64() % 997) as i64;
            let b = (rng.next_u64() % 997) as i64;
            let x = circle_point(a, 997, &ctx);
            let y = circle_point(b, 997, &ctx);
            let report = check_lipschitz(&x, &y, 200, &ctx).unwrap();
            assert!(report.all_pass(), "pair ({a},{b})/997 broke the envelope");
        }
    }

    #[test]
    fn lipschitz_zero_distance_and_depth_cap() {
        let ctx = ctx256();
        let x = circle_point(3, 11, &ctx);
        let report = check_lipschitz(&x, &x.clone(), 40, &ctx).unwrap();
        assert!(report.all_pass());
        for row in &report.rows {
            assert!(row.measured.is_zero());
        }
        assert!(matches!(
            check_lipschitz(&x, &x.clone(), 501, &ctx),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn growth_envelopes_hold_on_all_residue_branches() {
        let ctx = ctx256();
        for (m, k) in [(2u64, 1i64), (3, 1), (11, 1), (14, 3)] {
            let x = RootOfUnity::new(k, m).unwrap();
            let report = check_growth(&x, 15, &ctx).unwrap();
            assert!(report.all_pass(), "m = {m} broke a growth envelope");
            let expect = if m % 5 == 1 || m % 5 == 4 {
                "window-prev-inner"
            } else {
                "window-prev-outer"
            };
            assert!(report.rows.iter().any(|r| r.what == expect));
            assert_eq!(report.rows.len(), 3 * 14);
        }
    }

    #[test]
    fn growth_rejects_wrong_class_and_shallow_q() {
        let ctx = ctx256();
        let x = RootOfUnity::new(1, 10).unwrap();
        assert!(matches!(
            check_growth(&x, 10, &ctx),
            Err(Error::WrongResidueClass(10))
        ));
        let x = RootOfUnity::new(1, 7).unwrap();
        assert!(matches!(
            check_growth(&x, 1, &ctx),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn k_rate_envelopes_hold_and_branch_by_residue() {
        let ctx = ctx256();
        for (m, k) in [(2u64, 1i64), (3, 1), (11, 1), (14, 3)] {
            let x = RootOfUnity::new(k, m).unwrap();
            let report = check_k_rate(&x, 15, &ctx).unwrap();
            assert!(report.all_pass(), "m = {m} broke a rate envelope");
            let expect = if m % 5 == 1 || m % 5 == 4 {
                "k-rate-prev-near"
            } else {
                "k-rate-prev-far"
            };
            assert!(report.rows.iter().any(|r| r.what == expect));
        }
    }

    #[test]
    fn k_rate_r_envelope_has_slack() {
        // The R-version bound is the max of two much tighter ones — loose by
        // roughly a factor φ⁴; every row should clear the cap by at least 3×.
        let ctx = ctx256();
        let x = RootOfUnity::new(1, 7).unwrap();
        let report = check_k_rate(&x, 12, &ctx).unwrap();
        let bits = ctx.bits();
        for row in report.rows.iter().filter(|r| r.what == "r-rate-max") {
            let slack_cap = Float::with_val(bits, &row.upper / 3u32);
            assert!(row.measured < slack_cap, "q = {} too close to cap", row.index);
        }
    }

    #[test]
    fn perturbation_tiny_offset_passes_all_envelopes() {
        let ctx = ctx256();
        let x = RootOfUnity::new(1, 7).unwrap();
        let y = Rational::from((1u64, 7u64)) + Rational::from((1i64, 10i64)).pow(30);
        let report = check_perturbation(&x, &y, 5, &ctx).unwrap();
        assert!(report.all_pass());
        // All three R-row preconditions present, plus both shift/limit pairs.
        for what in [
            "eps-max-shift",
            "k-shift-end",
            "k-shift-prev",
            "precond-window-depth",
            "precond-angle-gap",
            "precond-eps-small",
            "r-shift-end",
            "r-limit-end",
            "r-shift-prev",
            "r-limit-prev",
        ] {
            assert!(report.rows.iter().any(|r| r.what == what), "missing {what}");
        }
    }

    #[test]
    fn perturbation_passes_near_the_eps_boundary() {
        // Walk the offset up until the measured shift enters the top half of
        // the allowed ε range, then require every envelope to still hold.
        let ctx = ctx256();
        let x = RootOfUnity::new(1, 7).unwrap();
        let bits = ctx.bits();
        let eps_cap = 1.0 / (20.0 * phi(bits).to_f64().powi(2));
        // Shrink the offset from large to small: the first ε under the cap
        // sits within a halving of it.
        let mut chosen = None;
        for j in 8..=60 {
            let y = Rational::from((1u64, 7u64))
                + Rational::from((Integer::from(1u32), Integer::from(1u32) << j));
            let report = check_perturbation(&x, &y, 3, &ctx).unwrap();
            let eps = report
                .rows
                .iter()
                .find(|r| r.what == "eps-max-shift")
                .unwrap()
                .measured
                .to_f64();
            if eps <= eps_cap * 0.999 {
                assert!(
                    eps >= eps_cap * 0.3,
                    "offset 2^-{j} landed far from the boundary: ε = {eps:.5}"
                );
                chosen = Some(report);
                break;
            }
        }
        let report = chosen.expect("an offset lands just under the ε cap");
        assert!(report.all_pass());
    }

    #[test]
    fn perturbation_reports_precondition_violation() {
        let ctx = ctx256();
        let x = RootOfUnity::new(1, 7).unwrap();
        let y = Rational::from((1u64, 7u64)) + Rational::from((1i64, 10i64)).pow(20);
        let report = check_perturbation(&x, &y, 2, &ctx).unwrap();
        assert!(!report.all_pass());
        let depth_row = report
            .rows
            .iter()
            .find(|r| r.what == "precond-window-depth")
            .unwrap();
        assert!(!depth_row.pass);
        // Dependent R rows are omitted, the rest still reported.
        assert!(!report.rows.iter().any(|r| r.what.starts_with("r-")));
        assert!(report.rows.iter().any(|r| r.what == "k-shift-end"));
    }

    #[test]
    fn divergence_certificate_minimal_levels() {
        let report = divergence_trace(&StreamRule::SMinimal, 3).unwrap();
        assert!(report.all_pass());
        // d_3 = 16 → 2·16·log₂φ rounds up to 23 plus the fixed guard.
        assert_eq!(report.bits, 279);
        let links: Vec<&str> = report
            .rows
            .iter()
            .filter(|r| r.index == 3)
            .map(|r| r.what.as_str())
            .collect();
        for expect in [
            "link-radius",
            "link-threshold-cert",
            "boundary-window",
            "window-shift-end",
            "window-shift-prev",
            "window-y-end",
            "window-y-prev",
            "window-product",
            "substitution-slack",
        ] {
            assert!(links.contains(&expect), "level 3 missing {expect}");
        }
    }

    #[test]
    fn divergence_certificate_tower_levels() {
        let report = divergence_trace(&StreamRule::Tower { base: 2 }, 2).unwrap();
        assert!(report.all_pass());
        let power_rows: Vec<_> = report
            .rows
            .iter()
            .filter(|r| r.what == "link-threshold-power2")
            .collect();
        assert_eq!(power_rows.len(), 2);
        // Level 1: a_2 = 16 against 2^2; level 2: a_3 = 2^256 against 2^33.
        assert!((power_rows[0].measured.to_f64() - 16.0).abs() < 1e-9);
        assert!((power_rows[0].lower.to_f64() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn divergence_rejects_unmaterializable_depth() {
        assert!(matches!(
            divergence_trace(&StreamRule::SMinimal, 5),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn ten_limits_trace_reachable_levels() {
        let report = ten_limits_trace(2).unwrap();
        assert!(report.all_pass());
        let reach = report
            .rows
            .iter()
            .find(|r| r.what == "reachable-depth")
            .unwrap();
        assert_eq!(reach.measured.to_f64() as u64, 2);
        // Level 1 wraps the angle (d = 1), level 2 matches the pattern.
        assert!(report
            .rows
            .iter()
            .any(|r| r.what == "root-index-anglewrap" && r.index == 1));
        let level2 = report
            .rows
            .iter()
            .find(|r| r.what == "root-index" && r.index == 2)
            .unwrap();
        assert!((level2.measured.to_f64() - 7.0).abs() < 1e-9);
        // The level-2 window distance is genuinely tiny, far below its cap.
        let env = report
            .rows
            .iter()
            .find(|r| r.what == "r-end-near-target" && r.index == 2)
            .unwrap();
        assert!(env.measured.to_f64() < 1e-30);
        assert!(report.rows.iter().any(|r| r.what == "residue-pattern" && r.pass));
    }

    #[test]
    fn ten_limits_deep_request_clamps_to_reachable() {
        let report = ten_limits_trace(6).unwrap();
        assert!(report.all_pass());
        let reach = report
            .rows
            .iter()
            .find(|r| r.what == "reachable-depth")
            .unwrap();
        assert_eq!(reach.measured.to_f64() as u64, 2);
    }

    #[test]
    fn probe_common_limit_candidates_collapse() {
        let rule = StreamRule::SDiamond {
            residues: vec![1, 2, 1],
        };
        let probe = general_divergence_probe(
            &rule,
            2,
            &CandidateSpec::CommonLimit { re: 1.0, im: 0.0 },
            0,
        )
        .unwrap();
        assert_eq!(probe.verdict, "general-divergence-consistent");
        assert_eq!(probe.reachable, 2);
        assert_eq!((probe.limit_a, probe.limit_b), (10, 4));
        assert!(probe.limit_gap.to_f64() > 0.1);
        for row in &probe.rows {
            assert!(row.in_band);
            assert!(row.pole_is_infinite);
        }
        assert!(probe.rows[1].v_sum < probe.rows[0].v_sum);
        assert!(probe.rows[1].cand_gap < probe.rows[0].cand_gap);
        let json = probe.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["verdict"], "general-divergence-consistent");
        assert!(probe.to_csv().lines().count() == probe.rows.len() + 1);
    }

    #[test]
    fn probe_constant_candidates_stay_apart() {
        // Fixed constants do not drive S to a common limit, so the collapse
        // never shows up and the verdict stays inconclusive.
        let rule = StreamRule::SDiamond {
            residues: vec![1, 2, 1],
        };
        let probe = general_divergence_probe(
            &rule,
            2,
            &CandidateSpec::Constants { v: 1.0, w: 2.0 },
            0,
        )
        .unwrap();
        assert_eq!(probe.verdict, "inconclusive");
        assert!(!probe.gaps_decreasing);
        for row in &probe.rows {
            assert!(row.in_band);
        }
    }

    #[test]
    fn probe_rejects_plain_streams() {
        assert!(matches!(
            general_divergence_probe(
                &alpha_rule(),
                2,
                &CandidateSpec::Constants { v: 1.0, w: 2.0 },
                0
            ),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn contrast_shows_general_convergence_at_5m_roots() {
        let ctx = ctx256();
        let x = RootOfUnity::new(1, 10).unwrap();
        let glc = crate::schur::general_limit_class(&x, &ctx).unwrap();
        let report = general_convergence_contrast(
            &x,
            glc.witness_v.to_f64(),
            glc.witness_w.to_f64(),
            12,
            &ctx,
        )
        .unwrap();
        assert!(report.all_pass());
        let x7 = RootOfUnity::new(1, 7).unwrap();
        assert!(matches!(
            general_convergence_contrast(&x7, 1.0, 2.0, 12, &ctx),
            Err(Error::WrongResidueClass(7))
        ));
    }

    #[test]
    fn ratio_blowup_identities_and_parity_gap() {
        let x = Complex::with_val(128, (0.1, 0.0));
        let report = ratio_blowup_probe(&x, 36).unwrap();
        assert!(report.all_pass());
        // con2 rows all measure |y| = 10.
        for row in report.rows.iter().filter(|r| r.what == "con2-ratio") {
            assert!((row.measured.to_f64() - 10.0).abs() < 1e-9);
        }
        let gap = report
            .rows
            .iter()
            .find(|r| r.what == "odd-even-gap")
            .unwrap();
        assert!(gap.measured.to_f64() > 1e-5);
        assert!(matches!(
            ratio_blowup_probe(&Complex::with_val(128, (0.3, 0.0)), 36),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sampler_constant_one_hits_everywhere() {
        let report = measure_sampler(&SamplerThreshold::Constant { value: 1 }, 6, 300, 5).unwrap();
        assert_eq!(report.frequency, 1.0);
        for i in 0..report.per_level.len() {
            assert_eq!(report.per_level[i], 1.0);
            assert_eq!(report.hit_all[i], 1.0);
        }
    }

    #[test]
    fn sampler_deterministic_and_monotone() {
        let a = measure_sampler(&SamplerThreshold::TwoPiQuadratic, 8, 500, 42).unwrap();
        let b = measure_sampler(&SamplerThreshold::TwoPiQuadratic, 8, 500, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.hit_all.windows(2).all(|w| w[1] <= w[0]));
        assert!(a.hit_any.windows(2).all(|w| w[1] >= w[0]));
        // Raising a constant threshold can only lower every frequency.
        let lo = measure_sampler(&SamplerThreshold::Constant { value: 2 }, 8, 500, 42).unwrap();
        let hi = measure_sampler(&SamplerThreshold::Constant { value: 50 }, 8, 500, 42).unwrap();
        assert!(hi.frequency <= lo.frequency);
        let json = a.to_json();
        let parsed: SamplerReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, a);
    }

    #[test]
    fn verify_all_quick_battery_passes() {
        let summary = verify_all(false).unwrap();
        assert!(
            summary.all_pass(),
            "battery failures:\n{}",
            summary.lines().join("\n")
        );
        assert_eq!(summary.lines().len(), summary.items.len());
        assert!(summary.items.len() >= 14);
    }

    #[test]
    #[ignore = "deep certificate level: ~50k-bit evaluation over 35k steps"]
    fn divergence_certificate_deepest_level() {
        let report = divergence_trace(&StreamRule::SMinimal, 4).unwrap();
        assert!(report.all_pass());
        assert!(report.bits > 49_000);
    }
}
