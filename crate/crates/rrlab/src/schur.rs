//! Exact behaviour at roots of unity: the Legendre-symbol closed form
//! K(x) = λ·x^((1−λσm)/5)·K(λ) for 5 ∤ m, the catalog of the ten limit
//! values R_j, the boundary quadruple (P_{m−2}, P_{m−1}, Q_{m−2}, Q_{m−1}),
//! block composition of the recurrence over whole periods, Binet-form
//! coefficients for the Q subsequences, and the divergence-to-0/∞
//! classifier for 5 | m.

use rug::{Complex, Float, Rational};

use crate::bigarith::{self, unit_point, PrecisionContext, UnitPoint};
use crate::error::{Error, Result};
use crate::rrcf::{ConvergentPair, EvalPoint};

/// x = e^(2πik/m) with 0 ≤ k < m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootOfUnity {
    k: u64,
    m: u64,
}

impl RootOfUnity {
    pub fn new(k: i64, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("denominator m must be ≥ 1".into()));
        }
        let k = k.rem_euclid(m as i64) as u64;
        Ok(RootOfUnity { k, m })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn is_primitive(&self) -> bool {
        if self.m == 1 {
            return self.k == 0;
        }
        gcd(self.k, self.m) == 1
    }

    /// Exact angle k/m in turns.
    pub fn angle(&self) -> Rational {
        Rational::from((self.k, self.m))
    }

    pub fn unit(&self, ctx: &PrecisionContext) -> Result<UnitPoint> {
        unit_point(&self.angle(), ctx)
    }

    /// x^e for a (possibly negative) integer exponent, with exact angle
    /// arithmetic: e^(2πi·ke/m).
    pub fn power(&self, e: i64, ctx: &PrecisionContext) -> Result<UnitPoint> {
        let angle = Rational::from((self.k as i128 * e as i128, self.m as i128));
        unit_point(&angle, ctx)
    }

    pub fn eval_point(&self, ctx: &PrecisionContext) -> Result<EvalPoint> {
        Ok(EvalPoint::from_unit(&self.unit(ctx)?))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Legendre symbol (m/5): +1 when m is a nonzero square mod 5 ({1,4}),
/// −1 otherwise ({2,3}); rejected for 5 | m.
pub fn legendre5(m: u64) -> Result<i32> {
    match m % 5 {
        0 => Err(Error::WrongResidueClass(m)),
        1 | 4 => Ok(1),
        _ => Ok(-1),
    }
}

#[derive(Clone, Debug)]
pub struct SchurValue {
    pub lambda: i32,
    pub sigma: u32,
    /// Exponent e = (1 − λσm)/5; the divisibility is exact.
    pub exponent: i64,
    /// K(x) = λ x^e K(λ), with K(1) = φ and K(−1) = 1/φ.
    pub k_value: Complex,
    /// R(x) = x^(1/5)/K(x).
    pub r_value: Complex,
    /// Index of the catalog value R_j matched by r_value.
    pub r_index: u8,
}

/// The ten values R(x) takes at roots of unity x with 5 ∤ ord(x):
/// R_j = −φ·e^(2πij/5) for 1 ≤ j ≤ 5 and e^(2πij/5)/φ for 6 ≤ j ≤ 10.
pub fn r_catalog(j: u8, ctx: &PrecisionContext) -> Result<Complex> {
    if !(1..=10).contains(&j) {
        return Err(Error::InvalidArgument(format!("R-index {j} not in 1..=10")));
    }
    let turn = unit_point(&Rational::from((j as u32, 5u32)), ctx)?;
    let phi = bigarith::phi(ctx.bits());
    let v = if j <= 5 {
        -(turn.value().clone() * &phi)
    } else {
        turn.value().clone() / phi
    };
    Ok(Complex::with_val(ctx.bits(), v))
}

/// Nearest catalog entry: (index, distance, second-nearest distance).
pub fn classify_r(value: &Complex, ctx: &PrecisionContext) -> Result<(u8, Float, Float)> {
    let mut best = (0u8, Float::with_val(ctx.bits(), f64::INFINITY));
    let mut second = Float::with_val(ctx.bits(), f64::INFINITY);
    for j in 1..=10u8 {
        let rj = r_catalog(j, ctx)?;
        let d = (value.clone() - rj).abs().into_real_imag().0;
        if d < best.1 {
            second = best.1.clone();
            best = (j, d);
        } else if d < second {
            second = d;
        }
    }
    Ok((best.0, best.1, second))
}

/// Closed-form K and R at a primitive m-th root of unity with 5 ∤ m, with
/// the R-value classified against the catalog under an explicit margin.
pub fn schur_eval(x: &RootOfUnity, ctx: &PrecisionContext) -> Result<SchurValue> {
    if !x.is_primitive() {
        return Err(Error::InvalidArgument(format!(
            "{}/{} is not a primitive root (gcd ≠ 1)",
            x.k, x.m
        )));
    }
    if x.m % 5 == 0 {
        return Err(Error::WrongResidueClass(x.m));
    }
    let sigma = (x.m % 5) as u32;
    let lambda = legendre5(x.m)?;
    let num = 1i64 - lambda as i64 * sigma as i64 * x.m as i64;
    if num % 5 != 0 {
        // Provably impossible: (m/5)·(m mod 5)·m ≡ 1 (mod 5).
        return Err(Error::InvalidArgument(format!(
            "internal: (1 − λσm) = {num} not divisible by 5 at m = {}",
            x.m
        )));
    }
    let e = num / 5;
    let xe = x.power(e, ctx)?;
    // K(λ): φ for λ = 1, 1/φ = φ − 1 for λ = −1.
    let phi = bigarith::phi(ctx.bits());
    let k_lambda = if lambda == 1 {
        phi.clone()
    } else {
        phi.clone() - 1u32
    };
    let mut k_value = Complex::with_val(ctx.bits(), xe.value() * &k_lambda);
    if lambda == -1 {
        k_value = -k_value;
    }
    // R(x) = x^(1/5)/K(x), principal branch on the circle.
    let root = x.unit(ctx)?.fifth_root(ctx)?;
    let r_value = Complex::with_val(ctx.bits(), root.value() / k_value.clone());
    let (r_index, d, d2) = classify_r(&r_value, ctx)?;
    if d.to_f64() > 1e-10 || d2.to_f64() < 0.1 {
        return Err(Error::InvalidArgument(format!(
            "R-classification margin violated at k/m = {}/{}: d = {:e}, second = {:e}",
            x.k,
            x.m,
            d.to_f64(),
            d2.to_f64()
        )));
    }
    Ok(SchurValue {
        lambda,
        sigma,
        exponent: e,
        k_value,
        r_value,
        r_index,
    })
}

/// The boundary quadruple (P_{m−2}, P_{m−1}, Q_{m−2}, Q_{m−1}) at a
/// primitive m-th root, by residue class of m mod 5. All fifth-root
/// exponents reduce to exact integers. (In the m ≡ 0 row, Q_{m−2} is
/// −x^(m/5) − x^(−m/5) — the two entries genuinely differ, matching the
/// recurrence, even though they are sometimes typeset identically.)
#[derive(Clone, Debug)]
pub struct BoundaryQuad {
    pub p_m2: Complex,
    pub p_m1: Complex,
    pub q_m2: Complex,
    pub q_m1: Complex,
}

pub fn boundary_quad(x: &RootOfUnity, ctx: &PrecisionContext) -> Result<BoundaryQuad> {
    if !x.is_primitive() {
        return Err(Error::InvalidArgument("boundary_quad needs a primitive root".into()));
    }
    let m = x.m as i64;
    let b = ctx.bits();
    let one = || Complex::with_val(b, (1, 0));
    let zero = || Complex::with_val(b, (0, 0));
    let pw = |e: i64| -> Result<Complex> { Ok(x.power(e, ctx)?.value().clone()) };
    let neg_cos_sum = |e: i64| -> Result<Complex> {
        // −x^e − x^(−e)
        Ok(-(pw(e)? + pw(-e)?))
    };
    let quad = match x.m % 5 {
        0 => BoundaryQuad {
            p_m2: zero(),
            p_m1: neg_cos_sum(2 * m / 5)?,
            q_m2: neg_cos_sum(m / 5)?,
            q_m1: zero(),
        },
        1 => BoundaryQuad {
            p_m2: pw((1 - m) / 5)?,
            p_m1: one(),
            q_m2: zero(),
            q_m1: pw((m - 1) / 5)?,
        },
        4 => BoundaryQuad {
            p_m2: pw((1 + m) / 5)?,
            p_m1: one(),
            q_m2: zero(),
            q_m1: pw((-1 - m) / 5)?,
        },
        2 => BoundaryQuad {
            p_m2: -pw((1 + 2 * m) / 5)?,
            p_m1: zero(),
            q_m2: one(),
            q_m1: -pw((-1 - 2 * m) / 5)?,
        },
        _ => BoundaryQuad {
            p_m2: -pw((1 - 2 * m) / 5)?,
            p_m1: zero(),
            q_m2: one(),
            q_m1: -pw((2 * m - 1) / 5)?,
        },
    };
    Ok(quad)
}

/// One block of m recurrence steps in closed form:
///   P_n = P_{m−1}·P_{n−m} + P_{m−2}·Q_{n−m},
///   Q_n = Q_{m−1}·P_{n−m} + Q_{m−2}·Q_{n−m}.
pub fn block_step(
    quad: &BoundaryQuad,
    p_nm: &Complex,
    q_nm: &Complex,
    bits: u32,
) -> (Complex, Complex) {
    let p = Complex::with_val(bits, quad.p_m1.clone() * p_nm + quad.p_m2.clone() * q_nm);
    let q = Complex::with_val(bits, quad.q_m1.clone() * p_nm + quad.q_m2.clone() * q_nm);
    (p, q)
}

/// Solve Q_{qm+r} = b·φ^q + b′·φ̄^q from the q = 0, 1 values:
/// b = (Q_{m+r} − φ̄·Q_r)/√5, b′ = Q_r − b.
pub fn binet_solve(q_r: &Complex, q_mr: &Complex, ctx: &PrecisionContext) -> (Complex, Complex) {
    let bits = ctx.bits();
    let s5 = bigarith::sqrt5(bits);
    let phibar = (Float::with_val(bits, 1u32) - &s5) / 2u32;
    let b = Complex::with_val(bits, (q_mr.clone() - q_r.clone() * &phibar) / &s5);
    let bp = Complex::with_val(bits, q_r.clone() - &b);
    (b, bp)
}

/// Binet coefficients (b_r, b′_r) for the subsequence Q_{qm+r} at a
/// primitive m-th root with 5 ∤ m.
pub fn binet_coefficients(
    x: &RootOfUnity,
    r: u64,
    ctx: &PrecisionContext,
) -> Result<(Complex, Complex)> {
    if x.m % 5 == 0 {
        return Err(Error::WrongResidueClass(x.m));
    }
    if r >= x.m {
        return Err(Error::InvalidArgument(format!("r = {r} not below m = {}", x.m)));
    }
    let mut s = ConvergentPair::new(x.eval_point(ctx)?, ctx);
    s.advance_to(r)?;
    let q_r = s.q_n().clone();
    s.advance_to(x.m + r)?;
    let q_mr = s.q_n().clone();
    Ok(binet_solve(&q_r, &q_mr, ctx))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneralLimit {
    Zero,
    Infinity,
}

#[derive(Clone, Debug)]
pub struct GeneralLimitClass {
    pub limit: GeneralLimit,
    /// Max ratio M of consecutive |Q| (limit 0) or |P| (limit ∞) over the
    /// first period — the scale the witness constants must clear.
    pub max_ratio: Float,
    /// Witness tails v_n = M+1, w_n = M+2: S_n at both converges to the
    /// general limit while staying chordally separated.
    pub witness_v: Float,
    pub witness_w: Float,
}

/// For primitive m-th roots with 5 | m, K(x) converges generally to 0 or ∞
/// according to the quadrant of x^(m/5) = e^(2πi(k mod 5)/5): right half
/// (k ≡ ±1 mod 5) → ∞, left half (k ≡ ±2) → 0.
pub fn general_limit_class(x: &RootOfUnity, ctx: &PrecisionContext) -> Result<GeneralLimitClass> {
    if x.m % 5 != 0 {
        return Err(Error::WrongResidueClass(x.m));
    }
    if !x.is_primitive() {
        return Err(Error::InvalidArgument("general_limit_class needs a primitive root".into()));
    }
    let limit = match x.k % 5 {
        1 | 4 => GeneralLimit::Infinity,
        2 | 3 => GeneralLimit::Zero,
        _ => {
            // gcd(k, m) = 1 with 5 | m excludes 5 | k.
            return Err(Error::InvalidArgument("k ≡ 0 mod 5 impossible for primitive root".into()));
        }
    };
    let mut s = ConvergentPair::new(x.eval_point(ctx)?, ctx);
    let bits = ctx.bits();
    let mut max_ratio = Float::with_val(bits, 0u32);
    let tol = ctx.tol();
    for _ in 1..=x.m {
        let (prev_p, prev_q) = (s.p_n().clone(), s.q_n().clone());
        s.advance()?;
        let (num, den) = match limit {
            GeneralLimit::Zero => (s.q_n().clone(), prev_q),
            GeneralLimit::Infinity => (s.p_n().clone(), prev_p),
        };
        let den_abs = den.abs().into_real_imag().0;
        let mut floor = tol.clone();
        floor *= s.growth_scale();
        if den_abs <= floor {
            continue;
        }
        let ratio = num.abs().into_real_imag().0 / den_abs;
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    let witness_v = max_ratio.clone() + 1u32;
    let witness_w = max_ratio.clone() + 2u32;
    Ok(GeneralLimitClass {
        limit,
        max_ratio,
        witness_v,
        witness_w,
    })
}

/// Catalog row for the closed-form survey over a range of roots.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub m: u64,
    pub k: u64,
    pub value: SchurValue,
}

/// All primitive k/m with 5 ∤ m up to m_max, evaluated in closed form.
pub fn catalog_range(m_max: u64, ctx: &PrecisionContext) -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        if m % 5 == 0 {
            continue;
        }
        for k in 0..m {
            let x = RootOfUnity::new(k as i64, m)?;
            if !x.is_primitive() {
                continue;
            }
            let value = schur_eval(&x, ctx)?;
            out.push(CatalogEntry { m, k, value });
        }
    }
    Ok(out)
}
