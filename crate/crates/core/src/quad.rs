//! Adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the 7-point rule at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm())
}

fn adapt<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let (value, err) = kronrod(f, a, b);
    if err <= tol || depth == 0 || (b - a) <= f64::EPSILON * a.abs().max(1.0) * 16.0 {
        return value;
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth - 1) + adapt(f, mid, b, 0.5 * tol, depth - 1)
}

/// Integrates `f` over `[a, b]`, first splitting into `panels` equal pieces and then
/// bisecting any piece whose Kronrod/Gauss difference exceeds its share of `abs_tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    abs_tol: f64,
) -> Complex64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let tol = abs_tol / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == panels { b } else { lo + width };
            adapt(&f, lo, hi, tol, MAX_DEPTH)
        })
        .sum()
}
