//! Published reference values the reproduction commands compare against.

/// Classic Blasius wall shear `f''(0)` with `P1 = P2 = 0`.
pub const BLASIUS_SKIN_FRICTION: f64 = 0.469599988361;

/// One printed row of the non-iterative parameter table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NitmRow {
    pub p1_star: f64,
    pub p2_star: f64,
    pub p1: f64,
    pub p2: f64,
    pub d2f0: f64,
}

const fn row(p1_star: f64, p2_star: f64, p1: f64, p2: f64, d2f0: f64) -> NitmRow {
    NitmRow {
        p1_star,
        p2_star,
        p1,
        p2,
        d2f0,
    }
}

pub const NITM_TABLE: [NitmRow; 8] = [
    row(0.25, 0.25, 0.140225769, 0.333807506, 0.42007973468),
    row(0.5, 0.5, 0.241979004, 0.336675506, 0.33667550559),
    row(0.75, 0.75, 0.309184205, 1.168108665, 0.26468787856),
    row(1.0, 1.0, 0.353764405, 1.681291175, 0.21041233684),
    row(1.5, 1.5, 0.405947260, 2.883381325, 0.14078861396),
    row(2.0, 2.0, 0.433836425, 4.294197226, 0.10102852811),
    row(2.5, 2.5, 0.450478633, 5.889425257, 0.07648940496),
    row(5.0, 5.0, 0.481068451, 16.119500068, 0.02984388156),
];

/// Index into [`NITM_TABLE`] of the row whose printed `P2` repeats its
/// `f''(0)` entry instead of `λ P2*`.
pub const NITM_P2_ERRATUM_ROW: usize = 1;

/// One printed bisection step for `P1 = 0.5`, `P2 = 0`; `lambda` is absent on
/// the two bracket endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionRow {
    pub h_star: f64,
    pub lambda: Option<f64>,
    pub gamma: f64,
}

const fn step(h_star: f64, lambda: Option<f64>, gamma: f64) -> BisectionRow {
    BisectionRow {
        h_star,
        lambda,
        gamma,
    }
}

pub const BISECTION_P1: f64 = 0.5;
pub const BISECTION_P2: f64 = 0.0;
pub const BISECTION_BRACKET: (f64, f64) = (0.75, 1.75);

pub const BISECTION_TRACE: [BisectionRow; 16] = [
    step(0.75, None, -0.424804078),
    step(1.75, None, 0.118076477),
    step(1.25, Some(1.389163618), -0.100177989),
    step(1.5, Some(1.466575876), 0.022790586),
    step(1.375, Some(1.425023536), -0.035103656),
    step(1.4375, Some(1.445108710), -0.005265147),
    step(1.46875, Some(1.455672550), 0.008983786),
    step(1.453125, Some(1.450347802), 0.001914850),
    step(1.4453125, Some(1.447717501), -0.001661237),
    step(1.44921875, Some(1.449029969), 0.000130281),
    step(1.447265625, Some(1.448373064), -0.0007646088),
    step(1.4482421875, Some(1.448701349), -0.0003169467),
    step(1.44873046875, Some(1.448865617), -0.0000932785),
    step(1.448974609375, Some(1.448947782), 0.0000185148),
    step(1.4488525390625, Some(1.448906697), -0.0000373785),
    step(1.44891357421875, Some(1.448927239), -0.0000094310),
];
