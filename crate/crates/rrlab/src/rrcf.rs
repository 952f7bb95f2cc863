//! The Rogers–Ramanujan convergent engine: P_n/Q_n recurrences at an
//! arbitrary complex point, classical approximants K_n = P_n/Q_n and their
//! normalization R_n = x^(1/5)/K_n, tail-modified values S_n(w), critical
//! tails h_n = Q_n/Q_{n−1}, and the odd/even limit functions F₁/F₂ that
//! govern behaviour outside the unit circle.
//!
//! Both precision tracks advance in lockstep; every public accessor hands
//! out doubling-checked values.

use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::bigarith::{
    self, fmt_float, parse_float, ExtendedComplex, PrecisionContext, UnitPoint,
};
use crate::error::{Error, Result};

/// Evaluation point: the working/shadow pair, plus the exact circle angle
/// when the point was built as a root of unity (needed for the principal
/// fifth root).
#[derive(Clone, Debug)]
pub struct EvalPoint {
    z: Complex,
    shadow: Complex,
    angle: Option<Rational>,
}

impl EvalPoint {
    pub fn from_unit(p: &UnitPoint) -> Self {
        EvalPoint {
            z: p.value().clone(),
            shadow: p.shadow().clone(),
            angle: Some(p.angle().clone()),
        }
    }

    /// Treat `z` (at working precision) as the exact point: the shadow track
    /// widens it without rounding error.
    pub fn from_complex(z: Complex, ctx: &PrecisionContext) -> Self {
        let shadow = Complex::with_val(ctx.shadow_bits(), &z);
        EvalPoint {
            z,
            shadow,
            angle: None,
        }
    }

    /// Round an exact rational point onto both tracks independently.
    pub fn from_rational(re: &Rational, im: &Rational, ctx: &PrecisionContext) -> Self {
        EvalPoint {
            z: Complex::with_val(ctx.bits(), (re, im)),
            shadow: Complex::with_val(ctx.shadow_bits(), (re, im)),
            angle: None,
        }
    }

    pub fn value(&self) -> &Complex {
        &self.z
    }

    pub fn angle(&self) -> Option<&Rational> {
        self.angle.as_ref()
    }

    /// x^(1/5) on both tracks: principal circle branch e^(2πiθ/5) when the
    /// angle is known, general principal branch otherwise.
    fn fifth_root(&self, ctx: &PrecisionContext) -> Result<(Complex, Complex)> {
        match &self.angle {
            Some(a) => {
                let fifth = Rational::from(a / 5u32);
                let p = bigarith::unit_point(&fifth, ctx)?;
                Ok((p.value().clone(), p.shadow().clone()))
            }
            None => {
                let w = bigarith::fifth_root_general(&self.z, ctx)?;
                let shadow_ctx = PrecisionContext::new(ctx.shadow_bits(), ctx.guard())?;
                let s = bigarith::fifth_root_general(&self.shadow, &shadow_ctx)?;
                Ok((w, s))
            }
        }
    }
}

/// Rolling P/Q state at index n:
///   P_{n+1} = P_n + x^(n+1)·P_{n−1},  Q likewise,
/// with (P_{−1}, Q_{−1}) = (1, 0) and (P_0, Q_0) = (1, 1), so that
/// K_0 = 1 and K_1 = 1 + x. The power x^(n+1) is carried incrementally.
pub struct ConvergentPair {
    pub n: u64,
    ctx: PrecisionContext,
    point: EvalPoint,
    p: Complex,
    p_prev: Complex,
    q: Complex,
    q_prev: Complex,
    xpow: Complex,
    sp: Complex,
    sp_prev: Complex,
    sq: Complex,
    sq_prev: Complex,
    sxpow: Complex,
    /// Running max of 1, |P_k|, |Q_k|: the growth factor that scales the
    /// doubling tolerance and the Q≈0 threshold.
    scale: Float,
}

impl ConvergentPair {
    pub fn new(point: EvalPoint, ctx: &PrecisionContext) -> Self {
        let b = ctx.bits();
        let s = ctx.shadow_bits();
        ConvergentPair {
            n: 0,
            ctx: *ctx,
            p: Complex::with_val(b, (1, 0)),
            p_prev: Complex::with_val(b, (1, 0)),
            q: Complex::with_val(b, (1, 0)),
            q_prev: Complex::with_val(b, (0, 0)),
            xpow: Complex::with_val(b, (1, 0)),
            sp: Complex::with_val(s, (1, 0)),
            sp_prev: Complex::with_val(s, (1, 0)),
            sq: Complex::with_val(s, (1, 0)),
            sq_prev: Complex::with_val(s, (0, 0)),
            sxpow: Complex::with_val(s, (1, 0)),
            scale: Float::with_val(b, 1u32),
            point,
        }
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn point(&self) -> &EvalPoint {
        &self.point
    }

    /// Advance one index on both tracks and re-check their agreement.
    pub fn advance(&mut self) -> Result<()> {
        self.xpow *= self.point.z.clone();
        let p_new = self.p.clone() + self.xpow.clone() * &self.p_prev;
        let q_new = self.q.clone() + self.xpow.clone() * &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p_new);
        self.q_prev = std::mem::replace(&mut self.q, q_new);

        self.sxpow *= self.point.shadow.clone();
        let sp_new = self.sp.clone() + self.sxpow.clone() * &self.sp_prev;
        let sq_new = self.sq.clone() + self.sxpow.clone() * &self.sq_prev;
        self.sp_prev = std::mem::replace(&mut self.sp, sp_new);
        self.sq_prev = std::mem::replace(&mut self.sq, sq_new);

        self.n += 1;

        let pa = abs_f(&self.p, self.ctx.bits());
        let qa = abs_f(&self.q, self.ctx.bits());
        if pa > self.scale {
            self.scale = pa;
        }
        if qa > self.scale {
            self.scale = qa;
        }
        self.ctx
            .check_complex(&self.p, &self.sp, &self.scale, "pq_advance(P)")?;
        self.ctx
            .check_complex(&self.q, &self.sq, &self.scale, "pq_advance(Q)")?;
        Ok(())
    }

    pub fn advance_to(&mut self, n: u64) -> Result<()> {
        while self.n < n {
            self.advance()?;
        }
        Ok(())
    }

    pub fn p_n(&self) -> &Complex {
        &self.p
    }

    pub fn q_n(&self) -> &Complex {
        &self.q
    }

    pub fn p_prev(&self) -> &Complex {
        &self.p_prev
    }

    pub fn q_prev(&self) -> &Complex {
        &self.q_prev
    }

    pub fn q_abs(&self) -> Float {
        abs_f(&self.q, self.ctx.bits())
    }

    pub fn growth_scale(&self) -> &Float {
        &self.scale
    }

    /// Threshold below which a magnitude counts as a vanishing denominator.
    fn vanish_threshold(&self) -> Float {
        let mut t = self.ctx.tol();
        t *= &self.scale;
        t
    }

    /// K_n = P_n/Q_n; ∞ when Q_n vanishes to working accuracy.
    pub fn k_n(&self) -> ExtendedComplex {
        self.divide(&self.p, &self.q)
    }

    /// S_n(w) = (P_n + w·P_{n−1})/(Q_n + w·Q_{n−1}); S_n(∞) = P_{n−1}/Q_{n−1}.
    pub fn tail_modified(&self, w: &ExtendedComplex) -> ExtendedComplex {
        match w {
            ExtendedComplex::Infinity => self.divide(&self.p_prev, &self.q_prev),
            ExtendedComplex::Finite(w) => {
                let num = self.p.clone() + w.clone() * &self.p_prev;
                let den = self.q.clone() + w.clone() * &self.q_prev;
                self.divide(&num, &den)
            }
        }
    }

    /// h_n = Q_n/Q_{n−1}: the tail that S_n maps to ∞ is w = −h_n.
    pub fn critical_tail(&self) -> ExtendedComplex {
        self.divide(&self.q, &self.q_prev)
    }

    fn divide(&self, num: &Complex, den: &Complex) -> ExtendedComplex {
        if abs_f(den, self.ctx.bits()) <= self.vanish_threshold() {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(Complex::with_val(
                self.ctx.bits(),
                num / den.clone(),
            ))
        }
    }
}

fn abs_f(z: &Complex, prec: u32) -> Float {
    use rug::ops::CompleteRound;
    z.abs_ref().complete((prec, prec)).into_real_imag().0
}

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub n: u64,
    pub k: ExtendedComplex,
    pub r: ExtendedComplex,
    pub q_abs: Float,
    pub h: ExtendedComplex,
    /// Set when |Q_n| fell within the vanishing threshold — the division
    /// blow-ups that matter near divergence points.
    pub q_small: bool,
}

#[derive(Clone, Debug)]
pub struct ApproximantTrace {
    pub bits: u32,
    pub entries: Vec<TraceEntry>,
}

/// Walk the recurrence at `point` up to index N, recording K_n, R_n, |Q_n|
/// and h_n at every index 0..=N. Q_n ≈ 0 events are flagged, never fatal.
pub fn classical_approximants(
    point: &EvalPoint,
    n_max: u64,
    ctx: &PrecisionContext,
) -> Result<ApproximantTrace> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("trace needs N ≥ 1".into()));
    }
    let is_zero = point.z.real().is_zero() && point.z.imag().is_zero();
    let root = if is_zero {
        Complex::with_val(ctx.bits(), (0, 0))
    } else {
        point.fifth_root(ctx)?.0
    };
    let mut state = ConvergentPair::new(point.clone(), ctx);
    let mut entries = Vec::with_capacity(n_max as usize + 1);
    loop {
        let k = state.k_n();
        let q_abs = state.q_abs();
        let q_small = q_abs <= state.vanish_threshold();
        let r = match &k {
            // R_n = x^(1/5)/K_n = x^(1/5)·Q_n/P_n; P_n ≈ 0 sends R_n to ∞.
            ExtendedComplex::Infinity => ExtendedComplex::Finite(Complex::with_val(
                ctx.bits(),
                (0, 0),
            )),
            ExtendedComplex::Finite(_) => {
                let num = root.clone() * &state.q;
                state.divide(&num, &state.p)
            }
        };
        let h = state.critical_tail();
        entries.push(TraceEntry {
            n: state.n,
            k,
            r,
            q_abs,
            h,
            q_small,
        });
        if state.n == n_max {
            break;
        }
        state.advance()?;
    }
    Ok(ApproximantTrace {
        bits: ctx.bits(),
        entries,
    })
}

// ---------------------------------------------------------------------------
// Serialization: CSV columns n,re_k,im_k,re_r,im_r,abs_q,re_h,im_h with
// "inf" for the point at infinity; enough digits for bit-exact round-trips.

fn cell_pair(v: &ExtendedComplex, digits: usize) -> (String, String) {
    match v {
        ExtendedComplex::Infinity => ("inf".into(), "inf".into()),
        ExtendedComplex::Finite(z) => (
            fmt_float(z.real(), digits),
            fmt_float(z.imag(), digits),
        ),
    }
}

fn parse_pair(re: &str, im: &str, bits: u32) -> Result<ExtendedComplex> {
    if re == "inf" && im == "inf" {
        return Ok(ExtendedComplex::Infinity);
    }
    let r = parse_float(re, bits)?;
    let i = parse_float(im, bits)?;
    Ok(ExtendedComplex::Finite(Complex::with_val(bits, (r, i))))
}

impl ApproximantTrace {
    pub fn to_csv(&self) -> String {
        let digits = bigarith::digits_for_bits(self.bits);
        let mut out = String::from("n,re_k,im_k,re_r,im_r,abs_q,re_h,im_h\n");
        for e in &self.entries {
            let (kr, ki) = cell_pair(&e.k, digits);
            let (rr, ri) = cell_pair(&e.r, digits);
            let (hr, hi) = cell_pair(&e.h, digits);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                e.n,
                kr,
                ki,
                rr,
                ri,
                fmt_float(&e.q_abs, digits),
                hr,
                hi
            ));
        }
        out
    }

    pub fn from_csv(text: &str, bits: u32) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty CSV".into()))?;
        if header != "n,re_k,im_k,re_r,im_r,abs_q,re_h,im_h" {
            return Err(Error::InvalidArgument(format!("bad CSV header: {header}")));
        }
        let mut entries = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(Error::InvalidArgument(format!("bad CSV row: {line}")));
            }
            let n: u64 = cols[0]
                .parse()
                .map_err(|e| Error::InvalidArgument(format!("bad index: {e}")))?;
            let q_abs = parse_float(cols[5], bits)?;
            let k = parse_pair(cols[1], cols[2], bits)?;
            let r = parse_pair(cols[3], cols[4], bits)?;
            let h = parse_pair(cols[6], cols[7], bits)?;
            let tol = Float::with_val(bits, 0u32);
            let q_small = q_abs <= tol; // flag not stored in CSV; recomputed as "exact zero"
            entries.push(TraceEntry {
                n,
                k,
                r,
                q_abs,
                h,
                q_small,
            });
        }
        Ok(ApproximantTrace { bits, entries })
    }

    pub fn to_json(&self) -> String {
        let digits = bigarith::digits_for_bits(self.bits);
        let rows: Vec<TraceRowJson> = self
            .entries
            .iter()
            .map(|e| {
                let (kr, ki) = cell_pair(&e.k, digits);
                let (rr, ri) = cell_pair(&e.r, digits);
                let (hr, hi) = cell_pair(&e.h, digits);
                TraceRowJson {
                    n: e.n,
                    re_k: kr,
                    im_k: ki,
                    re_r: rr,
                    im_r: ri,
                    abs_q: fmt_float(&e.q_abs, digits),
                    re_h: hr,
                    im_h: hi,
                    q_small: e.q_small,
                }
            })
            .collect();
        serde_json::to_string_pretty(&TraceJson {
            bits: self.bits,
            entries: rows,
        })
        .expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: TraceJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("bad trace JSON: {e}")))?;
        let bits = parsed.bits;
        let entries = parsed
            .entries
            .iter()
            .map(|r| {
                Ok(TraceEntry {
                    n: r.n,
                    k: parse_pair(&r.re_k, &r.im_k, bits)?,
                    r: parse_pair(&r.re_r, &r.im_r, bits)?,
                    q_abs: parse_float(&r.abs_q, bits)?,
                    h: parse_pair(&r.re_h, &r.im_h, bits)?,
                    q_small: r.q_small,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ApproximantTrace { bits, entries })
    }
}

#[derive(Serialize, Deserialize)]
struct TraceJson {
    bits: u32,
    entries: Vec<TraceRowJson>,
}

#[derive(Serialize, Deserialize)]
struct TraceRowJson {
    n: u64,
    re_k: String,
    im_k: String,
    re_r: String,
    im_r: String,
    abs_q: String,
    re_h: String,
    im_h: String,
    q_small: bool,
}

// ---------------------------------------------------------------------------
// Outside the unit circle: the odd/even limit functions.

/// F₁(x) = 1 − x/(1 + x²/(1 − x³/(1 + …))): partial numerators (−1)^n·x^n.
pub fn f1_series(x: &Complex, depth: u64, ctx: &PrecisionContext) -> Result<Complex> {
    stable_cf_value(x, depth, ctx, "f1_series", |x, n, prec| {
        let mut a = Complex::with_val(prec, x);
        a = a.pow(rug::Integer::from(n));
        if n % 2 == 1 {
            a = -a;
        }
        a
    })
}

/// F₂(x) = x/(1 + x⁴/(1 + x⁸/(1 + x¹²/(1 + …)))): numerators x, then
/// x^(4(n−1)).
pub fn f2_series(x: &Complex, depth: u64, ctx: &PrecisionContext) -> Result<Complex> {
    stable_cf_value(x, depth, ctx, "f2_series", |x, n, prec| {
        let e = if n == 1 { 1 } else { 4 * (n - 1) };
        let mut a = Complex::with_val(prec, x);
        a = a.pow(rug::Integer::from(e));
        a
    })
}

/// Evaluate b₀ + a₁/(1 + a₂/(1 + …)) to `depth` terms by the forward
/// recurrence, at both precisions and at doubled depth; any disagreement
/// beyond tolerance is an error. b₀ is 1 for F₁ and 0 for F₂ — encoded by
/// the first numerator shape.
fn stable_cf_value(
    x: &Complex,
    depth: u64,
    ctx: &PrecisionContext,
    what: &str,
    numerator: impl Fn(&Complex, u64, u32) -> Complex,
) -> Result<Complex> {
    if depth < 2 {
        return Err(Error::InvalidArgument("depth must be ≥ 2".into()));
    }
    let b0 = if what == "f1_series" { 1u32 } else { 0 };
    let eval = |d: u64, prec: u32| -> ExtendedComplex {
        let xx = Complex::with_val(prec, x);
        let mut a_prev = Complex::with_val(prec, (1, 0)); // A_{-1}
        let mut a_cur = Complex::with_val(prec, (b0, 0)); // A_0 = b0
        let mut b_prev = Complex::with_val(prec, (0, 0)); // B_{-1}
        let mut b_cur = Complex::with_val(prec, (1, 0)); // B_0
        for n in 1..=d {
            let an = numerator(&xx, n, prec);
            let a_new = a_cur.clone() + an.clone() * &a_prev;
            let b_new = b_cur.clone() + an * &b_prev;
            a_prev = std::mem::replace(&mut a_cur, a_new);
            b_prev = std::mem::replace(&mut b_cur, b_new);
        }
        if abs_f(&b_cur, prec) == 0 {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(Complex::with_val(prec, a_cur / b_cur))
        }
    };
    let v = eval(depth, ctx.bits());
    let v_shadow = eval(depth, ctx.shadow_bits());
    let v_deep = eval(depth * 2, ctx.shadow_bits());
    let v = match v {
        ExtendedComplex::Finite(z) => z,
        ExtendedComplex::Infinity => {
            return Err(Error::NonConvergence(format!("{what}: denominator vanished")))
        }
    };
    let one = Float::with_val(ctx.bits(), 1u32);
    match &v_shadow {
        ExtendedComplex::Finite(s) => ctx.check_complex(&v, s, &one, what)?,
        ExtendedComplex::Infinity => {
            return Err(Error::NonConvergence(format!("{what}: tracks disagree")))
        }
    }
    match &v_deep {
        ExtendedComplex::Finite(dv) => {
            if ctx.check_complex(&v, dv, &one, what).is_err() {
                return Err(Error::NonConvergence(format!(
                    "{what}: value moved between depth {depth} and {}",
                    depth * 2
                )));
            }
        }
        ExtendedComplex::Infinity => {
            return Err(Error::NonConvergence(format!("{what}: deep denominator vanished")))
        }
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct OddEvenLimits {
    /// Limit along the paper's odd reciprocal convergents (= even K-indices):
    /// agrees with F₁(x).
    pub odd: Complex,
    /// Limit along the even reciprocal convergents (= odd K-indices):
    /// agrees with F₂(x).
    pub even: Complex,
    pub gap: Float,
}

/// For 0 < |x| < 1/4: evaluate 1/K at 1/x along even and odd indices. The
/// reciprocal continued fraction's convergents are shifted by one, so its
/// odd convergents are the even K_n and vice versa.
pub fn odd_even_limits(
    x: &Complex,
    n_terms: u64,
    ctx: &PrecisionContext,
) -> Result<OddEvenLimits> {
    if n_terms < 10 || n_terms % 2 != 0 {
        return Err(Error::InvalidArgument(
            "odd_even_limits needs even N ≥ 10".into(),
        ));
    }
    let ax = abs_f(x, ctx.bits());
    if ax.is_zero() {
        return Err(Error::InvalidArgument(
            "odd_even_limits needs x ≠ 0 (1/x must exist)".into(),
        ));
    }
    if ax >= Float::with_val(ctx.bits(), 0.25f64) {
        return Err(Error::InvalidArgument(
            "odd_even_limits needs |x| < 1/4".into(),
        ));
    }
    let y = Complex::with_val(ctx.bits(), 1u32) / x.clone();
    let sy = Complex::with_val(ctx.shadow_bits(), 1u32)
        / Complex::with_val(ctx.shadow_bits(), x);
    let point = EvalPoint {
        z: y,
        shadow: sy,
        angle: None,
    };
    let mut state = ConvergentPair::new(point, ctx);
    state.advance_to(n_terms)?;
    let even_k = match state.k_n() {
        ExtendedComplex::Finite(z) => z,
        ExtendedComplex::Infinity => {
            return Err(Error::NonConvergence("K_N blew up".into()))
        }
    };
    state.advance()?;
    let odd_k = match state.k_n() {
        ExtendedComplex::Finite(z) => z,
        ExtendedComplex::Infinity => {
            return Err(Error::NonConvergence("K_{N+1} blew up".into()))
        }
    };
    let odd = Complex::with_val(ctx.bits(), even_k.recip_ref());
    let even = Complex::with_val(ctx.bits(), odd_k.recip_ref());
    let gap = abs_f(&(odd.clone() - &even), ctx.bits());
    Ok(OddEvenLimits { odd, even, gap })
}
