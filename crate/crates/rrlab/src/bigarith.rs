//! Arbitrary-precision scaffolding: precision contexts with a shadow track,
//! exact angles on the unit circle, chordal distance on the Riemann sphere,
//! and exact golden-ratio/Fibonacci/Lucas arithmetic.
//!
//! Every numerical constructor computes twice — once at the working precision
//! and once at double the working precision — and refuses to hand out a value
//! whose two tracks disagree by more than 2^-(bits-guard).

use rug::ops::CompleteRound;
use rug::{Complete, Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Hard ceiling on |k| for golden-power requests; φ^k at this size is a
/// ~3 MB integer pair, far beyond anything the traces need.
pub const POWER_CAP: i64 = 1 << 22;

pub const MIN_BITS: u32 = 64;
pub const DEFAULT_GUARD: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    bits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32, guard: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidArgument(format!(
                "precision {bits} bits is below the minimum {MIN_BITS}"
            )));
        }
        if guard >= bits {
            return Err(Error::InvalidArgument(format!(
                "guard bits {guard} must be smaller than precision {bits}"
            )));
        }
        Ok(Self { bits, guard })
    }

    pub fn with_bits(bits: u32) -> Result<Self> {
        Self::new(bits, DEFAULT_GUARD.min(bits / 2))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Precision of the shadow track.
    pub fn shadow_bits(&self) -> u32 {
        self.bits * 2
    }

    /// Comparison tolerance 2^-(bits-guard), as a Float at working precision.
    pub fn tol(&self) -> Float {
        Float::with_val(self.bits, 1u32) >> (self.bits - self.guard)
    }

    /// Number of significant decimal digits that guarantee bit-exact
    /// round-trips of `bits`-bit floats: ceil(bits·log10(2)) + 1.
    pub fn decimal_digits(&self) -> usize {
        digits_for_bits(self.bits)
    }

    /// Verify that a working-track value and its shadow agree to within
    /// tol·scale. `scale` lets callers compare relative to the magnitude of
    /// the quantities involved (pass 1 for absolute comparisons).
    pub fn check_float(&self, work: &Float, shadow: &Float, scale: &Float, what: &str) -> Result<()> {
        let diff = (work - shadow).complete(self.shadow_bits()).abs();
        let mut bound = self.tol();
        bound *= scale;
        if diff > bound {
            return Err(Error::PrecisionTooLow(format!(
                "{what}: tracks differ by {:e} (allowed {:e})",
                diff.to_f64(),
                bound.to_f64()
            )));
        }
        Ok(())
    }

    pub fn check_complex(
        &self,
        work: &Complex,
        shadow: &Complex,
        scale: &Float,
        what: &str,
    ) -> Result<()> {
        let diff = (work - shadow)
            .complete((self.shadow_bits(), self.shadow_bits()))
            .abs()
            .into_real_imag()
            .0;
        let mut bound = self.tol();
        bound *= scale;
        if diff > bound {
            return Err(Error::PrecisionTooLow(format!(
                "{what}: tracks differ by {:e} (allowed {:e})",
                diff.to_f64(),
                bound.to_f64()
            )));
        }
        Ok(())
    }
}

pub fn digits_for_bits(bits: u32) -> usize {
    // log10(2) rounded up at the 12th decimal keeps the ceiling exact for
    // every bits value that fits in u32.
    let d = (bits as f64 * 0.30102999566398_f64).ceil() as usize;
    d + 1
}

/// A point on the unit circle carrying its exact angle (as a fraction of a
/// full turn, reduced into [0,1)) plus both precision tracks of e^(2πiθ).
#[derive(Clone, Debug)]
pub struct UnitPoint {
    angle: Rational,
    z: Complex,
    shadow: Complex,
}

impl UnitPoint {
    /// Exact angle in turns, in [0,1).
    pub fn angle(&self) -> &Rational {
        &self.angle
    }

    pub fn value(&self) -> &Complex {
        &self.z
    }

    pub fn shadow(&self) -> &Complex {
        &self.shadow
    }

    /// Principal fifth root e^(2πiθ/5): the branch with argument in [0, 2π/5).
    pub fn fifth_root(&self, ctx: &PrecisionContext) -> Result<UnitPoint> {
        let fifth = (&self.angle / 5u32).complete();
        unit_point(&fifth, ctx)
    }

    /// x^(m/5) for the m-th root of unity x: e^(2πi·θ·m/5) with θ·m/5 exact.
    pub fn power_over_5(&self, m: i64, ctx: &PrecisionContext) -> Result<UnitPoint> {
        let mut a = Rational::from(&self.angle * Rational::from((m, 5)));
        reduce_turns(&mut a);
        unit_point(&a, ctx)
    }
}

fn reduce_turns(a: &mut Rational) {
    let floor = a.clone().floor();
    *a -= floor;
}

/// e^(2πiθ) with θ in turns; the angle is reduced into [0,1) exactly before
/// any rounding happens.
pub fn unit_point(angle: &Rational, ctx: &PrecisionContext) -> Result<UnitPoint> {
    let mut a = angle.clone();
    reduce_turns(&mut a);
    let z = circle_value(&a, ctx.bits());
    let shadow = circle_value(&a, ctx.shadow_bits());
    let one = Float::with_val(ctx.bits(), 1u32);
    ctx.check_complex(&z, &shadow, &one, "unit_point")?;
    // |z| must be 1 to working accuracy.
    let modulus = z.abs_ref().complete((ctx.bits(), ctx.bits())).into_real_imag().0;
    let dev = (modulus - 1u32).abs();
    if dev > ctx.tol() {
        return Err(Error::PrecisionTooLow(format!(
            "unit_point: modulus off unity by {:e}",
            dev.to_f64()
        )));
    }
    Ok(UnitPoint { angle: a, z, shadow })
}

fn circle_value(angle: &Rational, prec: u32) -> Complex {
    // Round the exact angle at padded precision, then sin/cos back down: the
    // padding keeps the argument error below the final ulp.
    let p = prec + 16;
    let theta = Float::with_val(p, angle) * Float::with_val(p, rug::float::Constant::Pi) * 2u32;
    let (sin, cos) = theta.sin_cos(Float::new(p));
    Complex::with_val(prec, (cos, sin))
}

/// Point of the Riemann sphere: a finite complex number or the point at
/// infinity (tails of a continued fraction genuinely hit ∞).
#[derive(Clone, Debug)]
pub enum ExtendedComplex {
    Finite(Complex),
    Infinity,
}

impl ExtendedComplex {
    pub fn as_finite(&self) -> Option<&Complex> {
        match self {
            ExtendedComplex::Finite(z) => Some(z),
            ExtendedComplex::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }
}

/// Chordal metric on the sphere:
///   d(w,z) = |w−z| / (√(1+|w|²)·√(1+|z|²)),  d(w,∞) = 1/√(1+|w|²).
/// Always in [0,1]; d(0,∞) = 1.
pub fn chordal_distance(
    w: &ExtendedComplex,
    z: &ExtendedComplex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let work = chordal_at(w, z, ctx.bits());
    let shadow = chordal_at(w, z, ctx.shadow_bits());
    let one = Float::with_val(ctx.bits(), 1u32);
    ctx.check_float(&work, &shadow, &one, "chordal_distance")?;
    Ok(work)
}

fn chordal_at(w: &ExtendedComplex, z: &ExtendedComplex, prec: u32) -> Float {
    use ExtendedComplex::*;
    match (w, z) {
        (Infinity, Infinity) => Float::with_val(prec, 0u32),
        (Finite(w), Infinity) | (Infinity, Finite(w)) => {
            let n = w.norm_ref().complete((prec, prec)).into_real_imag().0;
            let denom = (n + 1u32).sqrt();
            denom.recip()
        }
        (Finite(w), Finite(z)) => {
            let num = (w - z).complete((prec, prec)).abs().into_real_imag().0;
            let nw = (w.norm_ref().complete((prec, prec)).into_real_imag().0 + 1u32).sqrt();
            let nz = (z.norm_ref().complete((prec, prec)).into_real_imag().0 + 1u32).sqrt();
            num / (nw * nz)
        }
    }
}

/// Exact Fibonacci number, any sign of index: F(-n) = (-1)^(n+1) F(n).
pub fn fibonacci(n: i64) -> Integer {
    let (f, _) = fib_lucas_pair(n.unsigned_abs());
    if n < 0 && n % 2 == 0 {
        -f
    } else {
        f
    }
}

/// Exact Lucas number, any sign of index: L(-n) = (-1)^n L(n).
pub fn lucas(n: i64) -> Integer {
    let (_, l) = fib_lucas_pair(n.unsigned_abs());
    if n < 0 && n % 2 != 0 {
        -l
    } else {
        l
    }
}

/// (F(n), L(n)) for n ≥ 0 by fast doubling:
///   F(2k) = F(k)·(2F(k+1) − F(k)),  F(2k+1) = F(k)² + F(k+1)².
fn fib_lucas_pair(n: u64) -> (Integer, Integer) {
    let (f, f1) = fib_doubling(n);
    // L(n) = F(n-1) + F(n+1) = 2F(n+1) − F(n).
    let l = Integer::from(2u32 * &f1) - &f;
    (f, l)
}

fn fib_doubling(n: u64) -> (Integer, Integer) {
    if n == 0 {
        return (Integer::from(0u32), Integer::from(1u32));
    }
    let (a, b) = fib_doubling(n / 2);
    let two_b_minus_a = Integer::from(2u32 * &b) - &a;
    let c = Integer::from(&a * &two_b_minus_a); // F(2k)
    let d = Integer::from(&a * &a) + Integer::from(&b * &b); // F(2k+1)
    if n % 2 == 0 {
        (c, d)
    } else {
        let e = Integer::from(&c + &d);
        (d, e)
    }
}

/// (φ^k, φ̄^k) where φ = (1+√5)/2 and φ̄ = (1−√5)/2, via the exact expansion
/// φ^k = (L(k) + F(k)√5)/2; only √5 is rounded.
pub fn golden_powers(k: i64, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    if k.abs() > POWER_CAP {
        return Err(Error::CapExceeded(format!(
            "golden power exponent |{k}| exceeds cap {POWER_CAP}"
        )));
    }
    let f = fibonacci(k);
    let l = lucas(k);
    let compute = |prec: u32| {
        let s5 = Float::with_val(prec, 5u32).sqrt();
        let fs = Float::with_val(prec, &f) * &s5;
        let lf = Float::with_val(prec, &l);
        let phi_k = (lf.clone() + &fs) / 2u32;
        let phibar_k = (lf - &fs) / 2u32;
        (phi_k, phibar_k)
    };
    let (p, q) = compute(ctx.bits());
    let (ps, qs) = compute(ctx.shadow_bits());
    // Scale by the magnitude so huge powers are compared relatively.
    let scale = Float::with_val(ctx.bits(), p.abs_ref()).max(&Float::with_val(ctx.bits(), 1u32));
    ctx.check_float(&p, &ps, &scale, "golden_powers(phi)")?;
    ctx.check_float(&q, &qs, &scale, "golden_powers(phibar)")?;
    Ok((p, q))
}

pub fn phi(prec: u32) -> Float {
    (Float::with_val(prec, 5u32).sqrt() + 1u32) / 2u32
}

pub fn sqrt5(prec: u32) -> Float {
    Float::with_val(prec, 5u32).sqrt()
}

/// φ^k as a Float at `prec` (no context/doubling ceremonies; exact integer
/// pair underneath, for internal bound computations).
pub fn phi_power(k: i64, prec: u32) -> Float {
    let f = fibonacci(k);
    let l = lucas(k);
    let s5 = Float::with_val(prec, 5u32).sqrt();
    (Float::with_val(prec, &l) + Float::with_val(prec, &f) * s5) / 2u32
}

/// Run `f` over `items` on a small thread pool. Thread count comes from
/// RRLAB_THREADS (default: available parallelism, capped at 8). Order of the
/// results matches the input order.
pub fn parallel_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync,
{
    let threads = thread_count();
    if threads <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let n = items.len();
    let mut slots: Vec<Option<U>> = Vec::with_capacity(n);
    slots.resize_with(n, || None);
    let work: std::sync::Mutex<std::vec::IntoIter<(usize, T)>> =
        std::sync::Mutex::new(items.into_iter().enumerate().collect::<Vec<_>>().into_iter());
    let slots_mutex = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(n) {
            scope.spawn(|| loop {
                let next = work.lock().unwrap().next();
                match next {
                    Some((i, item)) => {
                        let out = f(item);
                        slots_mutex.lock().unwrap()[i] = Some(out);
                    }
                    None => break,
                }
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

pub fn thread_count() -> usize {
    if let Ok(v) = std::env::var("RRLAB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// Parse a decimal/scientific string into a Float at `bits`.
pub fn parse_float(s: &str, bits: u32) -> Result<Float> {
    Float::parse(s)
        .map(|v| Float::with_val(bits, v))
        .map_err(|e| Error::InvalidArgument(format!("bad float literal {s:?}: {e}")))
}

/// Render with exactly `digits` significant decimal digits (scientific form),
/// enough for bit-exact round-trips when digits = ceil(bits·log10 2)+1.
pub fn fmt_float(f: &Float, digits: usize) -> String {
    if f.is_infinite() {
        return if f.is_sign_negative() { "-inf" } else { "inf" }.to_string();
    }
    if f.is_nan() {
        return "nan".to_string();
    }
    format!("{:.*e}", digits, f)
}

pub fn fmt_complex(z: &Complex, digits: usize) -> String {
    format!(
        "{} {}",
        fmt_float(z.real(), digits),
        fmt_float(z.imag(), digits)
    )
}

/// x^(1/5) for a general nonzero complex x: principal modulus root combined
/// with arg(x)/5 taken from atan2, so the branch has argument in (−π/5, π/5].
pub fn fifth_root_general(x: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    if x.real().is_zero() && x.imag().is_zero() {
        return Ok(Complex::with_val(ctx.bits(), (0, 0)));
    }
    let compute = |prec: u32| {
        let r = x.abs_ref().complete((prec, prec)).into_real_imag().0;
        let r5 = r.root(5);
        let arg = Float::with_val(prec, x.imag()).atan2(&Float::with_val(prec, x.real()));
        let theta = arg / 5u32;
        let (sin, cos) = theta.sin_cos(Float::new(prec));
        Complex::with_val(prec, (cos * &r5, sin * r5))
    };
    let w = compute(ctx.bits());
    let s = compute(ctx.shadow_bits());
    let one = Float::with_val(ctx.bits(), 1u32);
    ctx.check_complex(&w, &s, &one, "fifth_root_general")?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128, 32).unwrap()
    }

    #[test]
    fn context_rejects_bad_parameters() {
        assert!(PrecisionContext::new(32, 8).is_err());
        assert!(PrecisionContext::new(128, 128).is_err());
        assert!(PrecisionContext::new(128, 200).is_err());
        assert!(PrecisionContext::new(64, 16).is_ok());
    }

    #[test]
    fn unit_point_cardinal_angles() {
        let c = ctx();
        let p = unit_point(&Rational::from(0u32), &c).unwrap();
        assert!((p.value().real().to_f64() - 1.0).abs() < 1e-30);
        assert!(p.value().imag().to_f64().abs() < 1e-30);

        let p = unit_point(&Rational::from((1u32, 2u32)), &c).unwrap();
        assert!((p.value().real().to_f64() + 1.0).abs() < 1e-30);

        let p = unit_point(&Rational::from((1u32, 4u32)), &c).unwrap();
        assert!(p.value().real().to_f64().abs() < 1e-30);
        assert!((p.value().imag().to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn unit_point_reduces_angle_exactly() {
        let c = ctx();
        // 7/3 turns ≡ 1/3 turn; -1/3 turn ≡ 2/3 turn.
        let a = unit_point(&Rational::from((7u32, 3u32)), &c).unwrap();
        assert_eq!(*a.angle(), Rational::from((1u32, 3u32)));
        let b = unit_point(&Rational::from((-1i32, 3i32)), &c).unwrap();
        assert_eq!(*b.angle(), Rational::from((2u32, 3u32)));
    }

    #[test]
    fn fifth_root_is_principal_branch() {
        let c = ctx();
        // x = -1 (half turn): principal fifth root on θ∈[0,1) is e^(iπ/5),
        // not the real root -1.
        let x = unit_point(&Rational::from((1u32, 2u32)), &c).unwrap();
        let r = x.fifth_root(&c).unwrap();
        assert_eq!(*r.angle(), Rational::from((1u32, 10u32)));
        let arg = r.value().imag().to_f64().atan2(r.value().real().to_f64());
        assert!(arg > 0.0 && arg < 2.0 * std::f64::consts::PI / 5.0);
        // And (fifth root)^5 returns to x.
        let back = r.power_over_5(25, &c).unwrap();
        let d = (back.value() - x.value()).complete((128, 128)).abs();
        assert!(d.real().to_f64() < 1e-30);
    }

    #[test]
    fn chordal_examples() {
        let c = ctx();
        let zero = ExtendedComplex::Finite(Complex::with_val(128, (0, 0)));
        let inf = ExtendedComplex::Infinity;
        let d = chordal_distance(&zero, &inf, &c).unwrap();
        assert!((d.to_f64() - 1.0).abs() < 1e-30);

        let one = ExtendedComplex::Finite(Complex::with_val(128, (1, 0)));
        let minus_one = ExtendedComplex::Finite(Complex::with_val(128, (-1, 0)));
        let d = chordal_distance(&one, &minus_one, &c).unwrap();
        assert!((d.to_f64() - 1.0).abs() < 1e-30);

        let d = chordal_distance(&inf, &inf, &c).unwrap();
        assert!(d.is_zero());

        let d = chordal_distance(&one, &one, &c).unwrap();
        assert!(d.to_f64() < 1e-30);
    }

    #[test]
    fn chordal_is_bounded_by_one() {
        let c = ctx();
        let big = ExtendedComplex::Finite(Complex::with_val(128, (1e300f64, -4.0f64)));
        let small = ExtendedComplex::Finite(Complex::with_val(128, (1e-300f64, 2.0f64)));
        let d = chordal_distance(&big, &small, &c).unwrap();
        assert!(d.to_f64() <= 1.0 + 1e-30);
    }

    #[test]
    fn fibonacci_lucas_small_table() {
        // Oracle: the naive recurrence.
        let mut a = Integer::from(0u32);
        let mut b = Integer::from(1u32);
        for n in 0..200i64 {
            assert_eq!(fibonacci(n), a, "F({n})");
            let next = Integer::from(&a + &b);
            a = b;
            b = next;
        }
        let mut l0 = Integer::from(2u32);
        let mut l1 = Integer::from(1u32);
        for n in 0..200i64 {
            assert_eq!(lucas(n), l0, "L({n})");
            let next = Integer::from(&l0 + &l1);
            l0 = l1;
            l1 = next;
        }
        assert_eq!(fibonacci(10), Integer::from(55u32));
        assert_eq!(lucas(10), Integer::from(123u32));
    }

    #[test]
    fn fibonacci_lucas_negative_indices() {
        for n in 1..50i64 {
            let sign_f = if n % 2 == 0 { -1i32 } else { 1 };
            let sign_l = if n % 2 == 0 { 1i32 } else { -1 };
            assert_eq!(fibonacci(-n), fibonacci(n) * sign_f);
            assert_eq!(lucas(-n), lucas(n) * sign_l);
        }
    }

    #[test]
    fn golden_power_identities() {
        let c = ctx();
        let (p1, q1) = golden_powers(1, &c).unwrap();
        // φ + φ̄ = 1, φ·φ̄ = −1.
        let sum = Float::with_val(128, &p1 + &q1);
        assert!((sum.to_f64() - 1.0).abs() < 1e-35);
        let prod = Float::with_val(128, &p1 * &q1);
        assert!((prod.to_f64() + 1.0).abs() < 1e-35);

        // φ^-1 = φ − 1.
        let (pm1, _) = golden_powers(-1, &c).unwrap();
        let diff = Float::with_val(128, &p1 - &pm1);
        assert!((diff.to_f64() - 1.0).abs() < 1e-35);

        // Reconstruction: (φ^k − φ̄^k)/√5 = F(k) and φ^k + φ̄^k = L(k).
        for k in [2i64, 7, 30, 101, -12] {
            let (p, q) = golden_powers(k, &c).unwrap();
            let f = Float::with_val(192, &p - &q) / sqrt5(192);
            let err = (f - fibonacci(k)).abs();
            assert!(err.to_f64() < 1e-20, "F({k}) reconstruction");
            let l = Float::with_val(192, &p + &q);
            let err = (l - lucas(k)).abs();
            assert!(err.to_f64() < 1e-20, "L({k}) reconstruction");
        }
    }

    #[test]
    fn golden_power_cap() {
        let c = ctx();
        assert!(matches!(
            golden_powers(POWER_CAP + 1, &c),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn doubling_check_detects_disagreement() {
        let c = ctx();
        let a = Float::with_val(128, 1u32);
        let mut b = Float::with_val(256, 1u32);
        b += Float::with_val(256, 1e-20f64);
        let one = Float::with_val(128, 1u32);
        assert!(matches!(
            c.check_float(&a, &b, &one, "synthetic"),
            Err(Error::PrecisionTooLow(_))
        ));
        // Disagreement below tolerance passes.
        let mut b2 = Float::with_val(256, 1u32);
        b2 += Float::with_val(256, 1e-40f64);
        assert!(c.check_float(&a, &b2, &one, "synthetic").is_ok());
    }

    #[test]
    fn digit_count_round_trips_floats() {
        // Round-trip: print with decimal_digits significant digits, parse
        // back, require bit-identical value.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for bits in [64u32, 128, 192, 333] {
            let digits = digits_for_bits(bits);
            for _ in 0..200 {
                let mut f = Float::with_val(bits, 0u32);
                // Random mantissa bits via random u64 chunks.
                for _ in 0..bits.div_ceil(64) {
                    f *= Float::with_val(bits, 2u64.pow(32)) * Float::with_val(bits, 2u64.pow(32));
                    f += rng.random::<u64>();
                }
                f >>= rng.random_range(0..200u32);
                if f.is_zero() {
                    continue;
                }
                let s = fmt_float(&f, digits);
                let back = parse_float(&s, bits).unwrap();
                assert_eq!(f, back, "round-trip at {bits} bits: {s}");
            }
        }
    }

    #[test]
    fn general_fifth_root_inside_disk() {
        let c = ctx();
        let x = Complex::with_val(128, (0.3f64, -0.4f64));
        let r = fifth_root_general(&x, &c).unwrap();
        let mut p = Complex::with_val(256, &r);
        p = p.pow(5u32);
        let d = (p - Complex::with_val(256, &x)).abs();
        assert!(d.real().to_f64() < 1e-35);
        // Principal branch: argument within (−π/5, π/5].
        let arg = r.imag().to_f64().atan2(r.real().to_f64());
        assert!(arg.abs() <= std::f64::consts::PI / 5.0 + 1e-12);
    }

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<u64> = (0..57).collect();
        let out = parallel_map(items.clone(), |x| x * x);
        let expect: Vec<u64> = items.iter().map(|x| x * x).collect();
        assert_eq!(out, expect);
    }
}
