//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! Small fixed-dimension driver for the Lie ODE systems: three coupled
//! equations at most, integrated over a group parameter interval.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Local error tolerance (absolute and relative combined).
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            tol: 1e-10,
            max_steps: 200_000,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `dy/dx = f(x, y)` from `x0` to `x1` (either direction).
///
/// The right-hand side may fail (domain exit, singular coefficient); the
/// failure is reported together with the parameter value reached.
pub fn rk45<const N: usize, F>(f: F, x0: f64, x1: f64, y0: [f64; N], opts: OdeOptions) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    if x0 == x1 {
        return Ok(y0);
    }
    let dir = (x1 - x0).signum();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = eval_rhs(&f, x, &y)?;
    let mut h = dir * 1e-3 * (1.0 + (x1 - x0).abs()).min(1.0);
    let mut steps = 0;
    while (x1 - x) * dir > 0.0 {
        if steps > opts.max_steps {
            return Err(Error::DomainExit {
                lambda: x,
                msg: "step limit exceeded".into(),
            });
        }
        steps += 1;
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let stage = |base: &[f64; N], coeffs: &[(f64, &[f64; N])]| {
            let mut out = *base;
            for v in out.iter_mut() {
                *v = 0.0;
            }
            for (c, k) in coeffs {
                for i in 0..N {
                    out[i] += c * k[i];
                }
            }
            for i in 0..N {
                out[i] = base[i] + h * out[i];
            }
            out
        };
        let try_step = (|| -> Result<([f64; N], [f64; N], f64)> {
            let y2 = stage(&y, &[(A21, &k1)]);
            let k2 = f(x + h / 5.0, &y2)?;
            let y3 = stage(&y, &[(A31, &k1), (A32, &k2)]);
            let k3 = f(x + 3.0 * h / 10.0, &y3)?;
            let y4 = stage(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            let k4 = f(x + 4.0 * h / 5.0, &y4)?;
            let y5 = stage(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let k5 = f(x + 8.0 * h / 9.0, &y5)?;
            let y6 = stage(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = f(x + h, &y6)?;
            let ynew = stage(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(x + h, &ynew)?;
            let mut err: f64 = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = opts.tol * (1.0 + y[i].abs().max(ynew[i].abs()));
                err = err.max((e / sc).abs());
            }
            Ok((ynew, k7, err))
        })();
        match try_step {
            Ok((ynew, k7, err)) if err <= 1.0 => {
                x += h;
                y = ynew;
                k1 = k7;
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                h *= fac;
            }
            Ok((_, _, err)) => {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h.abs() < 1e-14 * (1.0 + x.abs()) {
                    return Err(Error::DomainExit {
                        lambda: x,
                        msg: "step size underflow".into(),
                    });
                }
            }
            Err(e) => {
                // retry with smaller step; if the very first evaluation in the
                // step failed, shrinking cannot help
                h *= 0.25;
                if h.abs() < 1e-14 * (1.0 + x.abs()) {
                    return Err(Error::DomainExit {
                        lambda: x,
                        msg: e.to_string(),
                    });
                }
            }
        }
    }
    Ok(y)
}

fn eval_rhs<const N: usize, F>(f: &F, x: f64, y: &[f64; N]) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    f(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let y = rk45(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, 1.0, [1.0], OdeOptions::default()).unwrap();
        assert!((y[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn backward_integration() {
        let y = rk45(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, -1.0, [1.0], OdeOptions::default()).unwrap();
        assert!((y[0] - (-1f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn coupled_rotation() {
        let y = rk45(
            |_, y: &[f64; 2]| Ok([-y[1], y[0]]),
            0.0,
            std::f64::consts::PI,
            [1.0, 0.0],
            OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0] + 1.0).abs() < 1e-8 && y[1].abs() < 1e-8);
    }

    #[test]
    fn rhs_failure_reports_lambda() {
        let r = rk45(
            |x, _y: &[f64; 1]| {
                if x > 0.5 {
                    Err(Error::Domain("wall".into()))
                } else {
                    Ok([1.0])
                }
            },
            0.0,
            1.0,
            [0.0],
            OdeOptions::default(),
        );
        match r {
            Err(Error::DomainExit { lambda, .. }) => assert!(lambda <= 0.6),
            other => panic!("expected DomainExit, got {other:?}"),
        }
    }
}
