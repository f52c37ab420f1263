//! Additive convolution of value distributions over the group (F_q, +).
//!
//! With encodings as base-p digits, (F_q, +) is (Z/p)^nu laid out in
//! row-major order with axis j at stride p^j, so a convolution is a
//! nu-dimensional cyclic convolution of side p. The FFT route transforms
//! each axis with a length-p complex DFT and rounds back to integers; the
//! direct route is exact sparse-times-dense accumulation.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::Field;

/// Direct accumulation is preferred below this many additions.
const DIRECT_WORK_LIMIT: u128 = 40_000_000;

/// Largest admissible distance of an FFT output from the nearest integer.
const ROUNDING_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvolutionMethod {
    /// Direct when cheap, FFT otherwise.
    #[default]
    Auto,
    Direct,
    Fft,
}

/// Counts of every sum `v_1 + ... + v_m` with `v_i` drawn from `supports[i]`,
/// indexed by the encoding of the sum. Each support lists distinct encodings.
pub(crate) fn convolve_supports(
    field: &Field,
    supports: &[Vec<u64>],
    method: ConvolutionMethod,
) -> Result<Vec<u64>> {
    let method = match method {
        ConvolutionMethod::Auto if direct_work(field.q(), supports) <= DIRECT_WORK_LIMIT => {
            ConvolutionMethod::Direct
        }
        ConvolutionMethod::Auto => ConvolutionMethod::Fft,
        m => m,
    };
    match method {
        ConvolutionMethod::Direct => Ok(convolve_direct(field, supports)),
        _ => convolve_fft(field, supports),
    }
}

fn direct_work(q: u64, supports: &[Vec<u64>]) -> u128 {
    let mut nnz = supports[0].len() as u128;
    let mut work = 0u128;
    for s in &supports[1..] {
        work += nnz * s.len() as u128;
        nnz = (nnz * s.len() as u128).min(q as u128);
    }
    work
}

fn convolve_direct(field: &Field, supports: &[Vec<u64>]) -> Vec<u64> {
    let q = field.q() as usize;
    let p = field.p();
    let mut acc = vec![0u64; q];
    for &v in &supports[0] {
        acc[v as usize] += 1;
    }
    for support in &supports[1..] {
        let mut next = vec![0u64; q];
        for (w, &count) in acc.iter().enumerate() {
            if count == 0 {
                continue;
            }
            for &v in support {
                let sum = if field.nu() == 1 {
                    let s = w as u64 + v;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                } else {
                    field
                        .add(crate::ff::FieldElement::new(w as u64), crate::ff::FieldElement::new(v))
                        .enc()
                };
                next[sum as usize] += count;
            }
        }
        acc = next;
    }
    acc
}

struct AxisTransform {
    p: usize,
    nu: u32,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AxisTransform {
    fn new(p: usize, nu: u32) -> Self {
        let mut planner = FftPlanner::new();
        AxisTransform {
            p,
            nu,
            forward: planner.plan_fft_forward(p),
            inverse: planner.plan_fft_inverse(p),
        }
    }

    fn apply(&self, data: &mut [Complex<f64>], inverse: bool) {
        let fft = if inverse { &self.inverse } else { &self.forward };
        if self.nu == 1 {
            fft.process(data);
            return;
        }
        let p = self.p;
        let mut line = vec![Complex::new(0.0, 0.0); p];
        let mut stride = 1usize;
        for _ in 0..self.nu {
            let block = stride * p;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, &v) in line.iter().enumerate() {
                        data[base + k * stride] = v;
                    }
                }
            }
            stride = block;
        }
    }
}

fn convolve_fft(field: &Field, supports: &[Vec<u64>]) -> Result<Vec<u64>> {
    let q = field.q() as usize;
    let transform = AxisTransform::new(field.p() as usize, field.nu());
    let mut spectrum = vec![Complex::new(1.0, 0.0); q];
    let mut buf = vec![Complex::new(0.0, 0.0); q];
    for support in supports {
        buf.iter_mut().for_each(|z| *z = Complex::new(0.0, 0.0));
        for &v in support {
            buf[v as usize].re += 1.0;
        }
        transform.apply(&mut buf, false);
        for (s, z) in spectrum.iter_mut().zip(&buf) {
            *s *= z;
        }
    }
    transform.apply(&mut spectrum, true);
    let scale = 1.0 / q as f64;
    let expected_total: u128 = supports.iter().map(|s| s.len() as u128).product();
    let mut worst = 0.0f64;
    let counts: Vec<u64> = spectrum
        .iter()
        .map(|z| {
            let x = z.re * scale;
            let n = x.round();
            worst = worst.max((x - n).abs());
            n.max(0.0) as u64
        })
        .collect();
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if worst > ROUNDING_TOLERANCE || total != expected_total {
        return Err(Error::Precision(format!(
            "FFT convolution off by up to {worst:.3} from integers (total {total}, expected {expected_total})"
        )));
    }
    Ok(counts)
}
