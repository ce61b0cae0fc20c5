//! Scalar math routed through std when available, libm otherwise, so every
//! numeric path compiles identically with and without the standard library.

#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    x.abs()
}

macro_rules! unary {
    ($name:ident, $libm:path) => {
        #[cfg(feature = "std")]
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            x.$name()
        }
        #[cfg(not(feature = "std"))]
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            $libm(x)
        }
    };
}

unary!(sqrt, libm::sqrt);
unary!(exp, libm::exp);
unary!(ln, libm::log);
unary!(sin, libm::sin);
unary!(tanh, libm::tanh);
unary!(round, libm::round);

/// Nonnegative integer power by repeated squaring; exact for the small
/// exponents used here.
#[inline]
pub(crate) fn powi(x: f64, n: u32) -> f64 {
    let mut base = x;
    let mut exp = n;
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integer_powers_match_multiplication() {
        assert_eq!(powi(2.0, 0), 1.0);
        assert_eq!(powi(2.0, 1), 2.0);
        assert_eq!(powi(2.0, 10), 1024.0);
        assert_abs_diff_eq!(powi(1.3, 10), 1.3f64.powi(10), epsilon = 1e-12);
    }
}
