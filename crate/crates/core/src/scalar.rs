use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use twofloat::TwoFloat;

/// Real scalar the network is generic over: `f32`, `f64`, or the
/// double-double [`TwoFloat`] used as a high-precision reference.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Width in bytes of the little-endian encoding.
    const BYTES: usize;

    fn write_le(self, out: &mut Vec<u8>);

    /// Decodes from exactly `BYTES` little-endian bytes.
    fn read_le(bytes: &[u8]) -> Self;

    /// Converts a literal; every finite `f64` is representable or rounds.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }

    // Elementary functions used by the graph. Overridden where the type's
    // own versions are less accurate than its arithmetic.
    fn exp_s(self) -> Self {
        self.exp()
    }

    fn ln_s(self) -> Self {
        self.ln()
    }

    fn tanh_s(self) -> Self {
        self.tanh()
    }

    /// Logistic function, evaluated on the side that cannot overflow.
    fn sigmoid_s(self) -> Self {
        if self >= Self::zero() {
            Self::one() / (Self::one() + (-self).exp_s())
        } else {
            let e = self.exp_s();
            e / (Self::one() + e)
        }
    }
}

impl Scalar for f32 {
    const BYTES: usize = 4;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }
}

impl Scalar for f64 {
    const BYTES: usize = 8;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }
}

// TwoFloat arithmetic carries ~106 bits but its elementary functions do not,
// so exp/ln/tanh are recomputed here to full double-double accuracy.
impl Scalar for TwoFloat {
    const BYTES: usize = 16;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.hi().to_le_bytes());
        out.extend_from_slice(&self.lo().to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        let hi = f64::from_le_bytes(bytes[..8].try_into().expect("16 bytes"));
        let lo = f64::from_le_bytes(bytes[8..16].try_into().expect("16 bytes"));
        TwoFloat::new_add(hi, lo)
    }

    fn lit(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn as_f64(self) -> f64 {
        self.hi() + self.lo()
    }

    fn exp_s(self) -> Self {
        dd_exp(self)
    }

    fn ln_s(self) -> Self {
        let x = self;
        if x.hi().is_nan() || x.hi() <= 0.0 || x.hi().is_infinite() {
            return x.ln();
        }
        // Newton on exp(y) = x from the f64 logarithm.
        let mut y = TwoFloat::from(x.hi().ln());
        for _ in 0..2 {
            y = y + x * dd_exp(-y) - 1.0;
        }
        y
    }

    fn tanh_s(self) -> Self {
        let a = self.abs();
        if a.hi() > 40.0 {
            return TwoFloat::from(self.hi().signum());
        }
        let e = dd_expm1(a * -2.0);
        let t = dd_div(-e, e + 2.0);
        if self.hi() < 0.0 {
            -t
        } else {
            t
        }
    }

    fn sigmoid_s(self) -> Self {
        // 1 / (1 + exp(-x)) = (1 + tanh(x / 2)) / 2
        ((self * 0.5).tanh_s() + 1.0) * 0.5
    }
}

/// TwoFloat's own quotient is only f64-accurate; one Newton step on the
/// residual (exact in double-double multiplication) restores full precision.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = a / b;
    q + (a - b * q) / b
}

/// Taylor series of `exp(r) - 1` for small `|r|`.
fn expm1_series(r: TwoFloat) -> TwoFloat {
    let mut term = r;
    let mut sum = r;
    for i in 2..30 {
        term = term * r / i as f64;
        sum += term;
        if term.hi().abs() < 1e-34 * sum.hi().abs() {
            break;
        }
    }
    sum
}

fn dd_expm1(x: TwoFloat) -> TwoFloat {
    if x.hi().abs() < 0.25 {
        expm1_series(x)
    } else {
        dd_exp(x) - 1.0
    }
}

fn dd_exp(x: TwoFloat) -> TwoFloat {
    let h = x.hi();
    if h.is_nan() {
        return x;
    }
    if h > 709.0 {
        return TwoFloat::from(f64::INFINITY);
    }
    if h < -745.0 {
        return TwoFloat::from(0.0);
    }
    // x = k·ln2 + r, then exp(r) = (exp(r / 2^10))^(2^10).
    let k = (h / std::f64::consts::LN_2).round();
    let r = (x - twofloat::consts::LN_2 * k) / 1024.0;
    let mut y = expm1_series(r);
    // Square (1 + y) ten times, keeping the small part separate.
    for _ in 0..10 {
        y = y * (y + 2.0);
    }
    (y + 1.0) * 2f64.powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(got: TwoFloat, hi: f64, lo: f64) {
        let want = TwoFloat::new_add(hi, lo);
        let rel = ((got - want) / want).abs().hi();
        assert!(rel < 1e-29, "{got:?} vs {want:?}: {rel:e}");
    }

    // References from a 250-bit evaluation.
    #[test]
    fn double_double_elementary_functions() {
        let t = TwoFloat::from;
        close(t(-0.75).exp_s(), 0.4723665527410147, 1.7984004434373214e-17);
        close(t(12.5).exp_s(), 268337.2865208745, -2.0035114163950887e-11);
        close(t(-30.25).exp_s(), 7.287724095819692e-14, 2.3339070041631973e-30);
        close(t(0.3).ln_s(), -1.2039728043259361, 8.935521583403776e-17);
        close(t(1234.5).ln_s(), 7.118421308785234, -1.865350488379875e-16);
        close(t(-0.75).tanh_s(), -0.6351489523872873, -1.7012977006564836e-17);
        close(t(1e-3).tanh_s(), 0.0009999996666668, 1.7800613799166557e-20);
        close(t(3.0).tanh_s(), 0.9950547536867305, -1.2991892863562624e-17);
        assert_eq!(t(800.0).exp_s().hi(), f64::INFINITY);
        assert_eq!(t(-800.0).exp_s().hi(), 0.0);
        assert_eq!(t(50.0).tanh_s().hi(), 1.0);
        close(t(0.8).sigmoid_s(), 0.6899744811276125, -5.236072257407167e-17);
        close(t(-2.5).sigmoid_s(), 0.07585818002124355, 5.328066821693456e-18);
        close(dd_div(t(1.0), t(3.0)), 0.3333333333333333, 1.850371707708594e-17);
    }

    #[test]
    fn byte_round_trip() {
        let x = TwoFloat::from(1.0) / 3.0;
        let mut buf = Vec::new();
        x.write_le(&mut buf);
        assert_eq!(buf.len(), TwoFloat::BYTES);
        assert_eq!(TwoFloat::read_le(&buf), x);
    }
}
