//! Compensated accumulation. Every norm, mass, and field value in the crate
//! is reduced through [`NeumaierSum`] in a fixed order, which keeps results
//! reproducible and accurate for the highly oscillatory sums we form.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Kahan summation with Neumaier's correction for the `|b| > |a|` branch.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Compensated sum over an iterator of `f64`.
pub(crate) fn sum_f64<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// Compensated complex accumulator (independent real/imag compensation).
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}
