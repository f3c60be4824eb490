use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZTest {
    pub z: f64,
    /// Two-sided.
    pub p_value: f64,
}

impl ZTest {
    pub fn significant(&self, level: f64) -> bool {
        self.p_value < 1.0 - level
    }
}

/// Pooled two-proportion z-test of `s1/n1` against `s2/n2`.
pub fn two_proportion_z_test(s1: usize, n1: usize, s2: usize, n2: usize) -> Result<ZTest> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::EmptyInput("z-test group"));
    }
    if s1 > n1 || s2 > n2 {
        return Err(Error::Config("successes exceed trials".into()));
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let (p1, p2) = (s1 as f64 / n1f, s2 as f64 / n2f);
    let pooled = (s1 + s2) as f64 / (n1f + n2f);
    let var = pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f);
    if var == 0.0 {
        return Ok(if p1 == p2 {
            ZTest { z: 0.0, p_value: 1.0 }
        } else {
            ZTest { z: (p1 - p2).signum() * f64::INFINITY, p_value: 0.0 }
        });
    }
    let z = (p1 - p2) / var.sqrt();
    Ok(ZTest { z, p_value: erfc(z.abs() / std::f64::consts::SQRT_2) })
}
