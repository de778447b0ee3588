use faer::Mat;
use num_complex::Complex64;

/// `C` maps the interleaved exponential vector to the real Fourier vector;
/// `C⁻¹` maps back.
#[derive(Debug, Clone)]
pub struct ConversionMatrices {
    pub c: Mat<Complex64>,
    pub c_inv: Mat<Complex64>,
}

pub fn build_conversion(n_max: usize) -> ConversionMatrices {
    let m = 2 * n_max + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut c = Mat::from_fn(m, m, |_, _| zero);
    let mut c_inv = Mat::from_fn(m, m, |_, _| zero);
    c[(0, 0)] = Complex64::new(1.0, 0.0);
    c_inv[(0, 0)] = Complex64::new(1.0, 0.0);
    for n in 1..=n_max {
        let (p, q) = (2 * n - 1, 2 * n);
        // cos = (φ_n + φ_{-n})/2, sin = (φ_n − φ_{-n})/(2i)
        c[(p, p)] = Complex64::new(0.5, 0.0);
        c[(p, q)] = Complex64::new(0.5, 0.0);
        c[(q, p)] = Complex64::new(0.0, -0.5);
        c[(q, q)] = Complex64::new(0.0, 0.5);
        // φ_n = cos + i sin, φ_{-n} = cos − i sin
        c_inv[(p, p)] = Complex64::new(1.0, 0.0);
        c_inv[(p, q)] = Complex64::new(0.0, 1.0);
        c_inv[(q, p)] = Complex64::new(1.0, 0.0);
        c_inv[(q, q)] = Complex64::new(0.0, -1.0);
    }
    ConversionMatrices { c, c_inv }
}
