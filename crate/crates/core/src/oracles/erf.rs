//! Complementary error function and its scaled form.
//!
//! Rational Chebyshev approximations of W. J. Cody on three intervals:
//! `erf` for `|x| <= 0.46875`, `erfcx` for `0.46875 < |x| <= 4` and an
//! asymptotic rational form beyond. The scaled function
//! `erfcx(x) = exp(x²) erfc(x)` falls out of the last two intervals without
//! ever forming `exp(-x²)`, which keeps products such as `exp(a) erfc(b)`
//! finite when both factors are individually out of range.

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SMALL_BREAK: f64 = 0.46875;

const ERF_NUM: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const ERF_DEN: [f64; 4] = [
    2.360_129_095_234_412e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];
const MID_NUM: [f64; 9] = [
    5.641_884_969_886_701e-1,
    8.883_149_794_388_376e0,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_691e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const MID_DEN: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_098_6e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_6e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];
const TAIL_NUM: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_5e-1,
    1.608_378_514_874_227_7e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const TAIL_DEN: [f64; 5] = [
    2.568_520_192_289_822_4e0,
    1.872_952_849_923_460_5e0,
    5.279_051_029_514_284e-1,
    6.051_834_131_244_132e-2,
    2.335_204_976_268_691_8e-3,
];

fn erf_small(x: f64) -> f64 {
    let y2 = x * x;
    let mut num = ERF_NUM[4] * y2;
    let mut den = y2;
    for i in 0..3 {
        num = (num + ERF_NUM[i]) * y2;
        den = (den + ERF_DEN[i]) * y2;
    }
    x * (num + ERF_NUM[3]) / (den + ERF_DEN[3])
}

/// `erfcx(y)` for `y > 0.46875`.
fn erfcx_positive(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = MID_NUM[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + MID_NUM[i]) * y;
            den = (den + MID_DEN[i]) * y;
        }
        (num + MID_NUM[7]) / (den + MID_DEN[7])
    } else if y >= 6.71e7 {
        FRAC_1_SQRT_PI / y
    } else {
        let z = 1.0 / (y * y);
        let mut num = TAIL_NUM[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + TAIL_NUM[i]) * z;
            den = (den + TAIL_DEN[i]) * z;
        }
        let r = z * (num + TAIL_NUM[4]) / (den + TAIL_DEN[4]);
        (FRAC_1_SQRT_PI - r) / y
    }
}

/// `exp(-y²)` with the square split so the rounding of `y²` does not leak
/// into the result.
fn exp_neg_square(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    let tail = (y - head) * (y + head);
    (-head * head).exp() * (-tail).exp()
}

pub fn erf(x: f64) -> f64 {
    if x.abs() <= SMALL_BREAK {
        erf_small(x)
    } else {
        let r = 1.0 - erfc(x.abs());
        r.copysign(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= SMALL_BREAK {
        return 1.0 - erf_small(x);
    }
    let tail = if y >= 26.543 {
        0.0
    } else {
        exp_neg_square(y) * erfcx_positive(y)
    };
    if x < 0.0 {
        2.0 - tail
    } else {
        tail
    }
}

/// Scaled complementary error function `exp(x²) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= SMALL_BREAK {
        return (x * x).exp() * (1.0 - erf_small(x));
    }
    let scaled = erfcx_positive(y);
    if x >= 0.0 {
        scaled
    } else if x < -26.628 {
        f64::INFINITY
    } else {
        2.0 / exp_neg_square(y) - scaled
    }
}

/// `exp(a) * erfc(b)` without intermediate overflow.
pub fn exp_erfc(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        (a - b * b).exp() * erfcx(b)
    } else {
        a.exp() * erfc(b)
    }
}
