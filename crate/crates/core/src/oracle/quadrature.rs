//! Globally adaptive Gauss–Kronrod (7, 15) quadrature on a finite interval.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerance and work limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { abs_tol: 1e-8, max_intervals: 20_000 }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Panel { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Integrates `f` over `[a, b]`, returning `(value, error estimate)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, settings: QuadSettings) -> Result<(f64, f64)> {
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let mut error = first.error;
    heap.push(first);
    while error > settings.abs_tol {
        if heap.len() >= settings.max_intervals {
            return Err(Error::Quadrature { achieved: error, target: settings.abs_tol });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at machine resolution; nothing more to gain.
            return Err(Error::Quadrature { achieved: error, target: settings.abs_tol });
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Resum occasionally so the running error does not drift.
        if heap.len() % 256 == 0 {
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    Ok((value, error))
}
