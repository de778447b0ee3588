use num_complex::Complex64;

use crate::dynamics::SystemMap;
use crate::error::{numerical, Result};
use crate::observables::{Dictionary, ExpTrig};
use crate::quadrature::{inner_product, QuadratureRule};
use crate::scalar::Scalar;

/// `κ_m(x, ξ) = Σₖ φₖ(F(x))·conj(φₖ(ξ))` over the retained exponentials.
pub struct TruncatedKernel<'a, S: ?Sized> {
    dict: ExpTrig,
    system: &'a S,
}

impl<'a, S: SystemMap + ?Sized> TruncatedKernel<'a, S> {
    pub fn new(dict: ExpTrig, system: &'a S) -> Self {
        Self { dict, system }
    }

    pub fn dictionary(&self) -> &ExpTrig {
        &self.dict
    }

    fn lifted_image(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let mut y = vec![0.0; x.len()];
        self.system.step_into(x, &mut y);
        self.dict.evaluate(&y)
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        let fx = self.lifted_image(x)?;
        let phi = self.dict.evaluate(xi)?;
        Ok(fx.iter().zip(&phi).map(|(a, b)| a * b.conj()).sum())
    }

    /// Projection coefficients `⟨g, φₖ⟩`; with these the transform at any
    /// `x` is `Σₖ φₖ(F(x))·⟨g, φₖ⟩`, equal to integrating `κ_m(x, ·)·g`.
    pub fn coefficients<T, G>(&self, g: G, rule: &QuadratureRule) -> Result<Vec<Complex64>>
    where
        T: Scalar,
        G: Fn(&[f64]) -> T,
    {
        (0..self.dict.len())
            .map(|idx| {
                let k = ExpTrig::harmonic(idx);
                inner_product(|x: &[f64]| g(x).to_c64(), |x: &[f64]| ExpTrig::phi(k, x[0]), rule)
            })
            .collect()
    }

    /// Truncated-kernel images of `g` at each point of `xs`.
    pub fn transform_many<T, G>(&self, g: G, rule: &QuadratureRule, xs: &[Vec<f64>]) -> Result<Vec<Complex64>>
    where
        T: Scalar,
        G: Fn(&[f64]) -> T,
    {
        let coef = self.coefficients(g, rule)?;
        xs.iter()
            .map(|x| {
                let v: Complex64 = self
                    .lifted_image(x)?
                    .iter()
                    .zip(&coef)
                    .map(|(p, c)| p * c)
                    .sum();
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(numerical(format!("kernel transform non-finite at {x:?}")))
                }
            })
            .collect()
    }
}

/// `Σᵢ wᵢ·κ_m(x, ξᵢ)·g(ξᵢ)`.
pub fn kernel_transform<S, T, G>(
    kernel: &TruncatedKernel<'_, S>,
    g: G,
    rule: &QuadratureRule,
    x: &[f64],
) -> Result<Complex64>
where
    S: SystemMap + ?Sized,
    T: Scalar,
    G: Fn(&[f64]) -> T,
{
    let fx = kernel.lifted_image(x)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phi = vec![Complex64::new(0.0, 0.0); kernel.dict.len()];
    for (i, (xi, w)) in rule.nodes().zip(rule.weights()).enumerate() {
        kernel.dict.evaluate_into(xi, &mut phi);
        let k: Complex64 = fx.iter().zip(&phi).map(|(a, b)| a * b.conj()).sum();
        let gv = g(xi).to_c64();
        let term = k * gv * *w;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(numerical(format!("kernel integrand non-finite at node {i} ({xi:?})")));
        }
        acc += term;
    }
    Ok(acc)
}
