//! Statistics helpers: ordinary least squares, Welch's t-test and a
//! chi-square goodness-of-fit test. The tests return `None` instead of
//! panicking when the input carries too little information.

use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; 0 for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    pub n: usize,
}

/// Ordinary least squares on `(x, y)` points.
///
/// Returns `None` for fewer than two points or a vertical point cloud (all
/// x equal). With exactly two points the fit is exact and the standard
/// error is reported as 0. A constant y gives slope 0 and r² = 1 (the line
/// explains everything there is to explain).
pub fn linear_regression(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let xm = points.iter().map(|&(x, _)| x).sum::<f64>() / nf;
    let ym = points.iter().map(|&(_, y)| y).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|&(x, _)| (x - xm) * (x - xm)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|&(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;

    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let ss_tot: f64 = points.iter().map(|&(_, y)| (y - ym) * (y - ym)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    let slope_stderr = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    pub dof: f64,
    pub p_two_sided: f64,
}

impl WelchTest {
    /// One-sided p-value for the alternative `mean(a) > mean(b)`.
    pub fn p_greater(&self) -> f64 {
        1.0 - student_cdf(self.t, self.dof)
    }

    /// One-sided p-value for the alternative `mean(a) < mean(b)`.
    pub fn p_less(&self) -> f64 {
        student_cdf(self.t, self.dof)
    }
}

fn student_cdf(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    StudentsT::new(0.0, 1.0, dof)
        .map(|d| d.cdf(t))
        .unwrap_or(f64::NAN)
}

/// Welch's unequal-variance t-test of `mean(a) = mean(b)`.
///
/// Needs at least two values on each side. When both samples are constant
/// the test degenerates: equal means give p = 1, different means p = 0.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Option<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a), sample_variance(b));
    let sa = va / na;
    let sb = vb / nb;
    if sa + sb == 0.0 {
        let equal = ma == mb;
        return Some(WelchTest {
            t: if equal {
                0.0
            } else if ma > mb {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            dof: (na + nb - 2.0).max(1.0),
            p_two_sided: if equal { 1.0 } else { 0.0 },
        });
    }
    let t = (ma - mb) / (sa + sb).sqrt();
    let dof = (sa + sb) * (sa + sb)
        / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let p_two_sided = 2.0 * (1.0 - student_cdf(t.abs(), dof));
    Some(WelchTest { t, dof, p_two_sided })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square goodness of fit of observed counts against expected
/// counts. `None` if the shapes differ, any expected count is nonpositive,
/// or there are fewer than two categories.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Option<ChiSquareTest> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return None;
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = observed.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| 1.0 - d.cdf(statistic))
        .unwrap_or(f64::NAN);
    Some(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}
