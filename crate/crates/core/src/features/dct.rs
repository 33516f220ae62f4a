use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Orthonormal DCT-II, `X_k = c_k Σ_n v_n cos(π(2n+1)k / 2N)` with
/// `c_0 = √(1/N)` and `c_k = √(2/N)`.
///
/// Computed with one N-point FFT of the even/odd reordered input.
pub fn dct2(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        buf[i].re = v[2 * i];
    }
    for i in 0..n / 2 {
        buf[n - 1 - i].re = v[2 * i + 1];
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let nf = n as f64;
    let (c0, ck) = ((1.0 / nf).sqrt(), (2.0 / nf).sqrt());
    buf.iter()
        .enumerate()
        .map(|(k, z)| {
            let theta = -std::f64::consts::PI * k as f64 / (2.0 * nf);
            let twiddled = z * Complex::new(theta.cos(), theta.sin());
            twiddled.re * if k == 0 { c0 } else { ck }
        })
        .collect()
}
