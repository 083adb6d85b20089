//! One-variable functions of the transverse parameter `v`.
//!
//! The closed forms carry several "integration constants" that are really
//! arbitrary functions of `v` (`varphi`, `D`, `L`, `rho`, `C`). They are
//! accepted as anything implementing [`Profile`]: a plain `f64` constant, a
//! [`Polynomial`], or a closure.

pub trait Profile {
    fn at(&self, v: f64) -> f64;
}

impl Profile for f64 {
    fn at(&self, _v: f64) -> f64 {
        *self
    }
}

impl<F: Fn(f64) -> f64> Profile for F {
    fn at(&self, v: f64) -> f64 {
        self(v)
    }
}

/// Polynomial of degree at most two, `c0 + c1 v + c2 v^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Polynomial {
    pub coeffs: [f64; 3],
}

impl Polynomial {
    pub const fn new(c0: f64, c1: f64, c2: f64) -> Self {
        Self { coeffs: [c0, c1, c2] }
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0)
    }

    pub const fn linear(c0: f64, c1: f64) -> Self {
        Self::new(c0, c1, 0.0)
    }

    /// Builds from a coefficient list of length 1 to 3.
    pub fn from_slice(c: &[f64]) -> Option<Self> {
        match c {
            [a] => Some(Self::constant(*a)),
            [a, b] => Some(Self::linear(*a, *b)),
            [a, b, d] => Some(Self::new(*a, *b, *d)),
            _ => None,
        }
    }

    pub fn eval(&self, v: f64) -> f64 {
        let [a, b, c] = self.coeffs;
        a + v * (b + v * c)
    }

    pub fn derivative(&self) -> Self {
        let [_, b, c] = self.coeffs;
        Self::new(b, 2.0 * c, 0.0)
    }

    pub fn degree(&self) -> usize {
        match self.coeffs {
            [_, _, c] if c != 0.0 => 2,
            [_, b, _] if b != 0.0 => 1,
            _ => 0,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }
}

impl Profile for Polynomial {
    fn at(&self, v: f64) -> f64 {
        self.eval(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Polynomial::new(1.0, -2.0, 3.0);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 12.0);
        assert_eq!(p.derivative(), Polynomial::linear(-2.0, 6.0));
        assert_eq!(p.degree(), 2);
        assert!(Polynomial::constant(4.0).is_constant());
        assert!(Polynomial::from_slice(&[]).is_none());
    }

    #[test]
    fn closures_and_constants_are_profiles() {
        fn eval<P: Profile>(p: &P) -> f64 {
            p.at(3.0)
        }
        assert_eq!(eval(&2.5), 2.5);
        assert_eq!(eval(&|v: f64| v * v), 9.0);
    }
}
