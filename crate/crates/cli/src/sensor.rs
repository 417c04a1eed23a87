//! Differentiable view of a potential known only through sensor values:
//! piecewise cubic Hermite interpolation with central-difference node slopes
//! (one-sided at the ends). Queries outside the grid clamp to it.

pub struct SensorPotential {
    q: Vec<f64>,
    v: Vec<f64>,
    slopes: Vec<f64>,
}

impl SensorPotential {
    pub fn new(q: Vec<f64>, v: Vec<f64>) -> Result<Self, String> {
        if q.len() != v.len() || q.len() < 2 {
            return Err(format!(
                "need matching q/V columns with at least 2 rows, got {} and {}",
                q.len(),
                v.len()
            ));
        }
        if q.windows(2).any(|w| w[1] <= w[0]) {
            return Err("q column must be strictly increasing".into());
        }
        if q.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err("non-finite value in potential file".into());
        }
        let n = q.len();
        let mut slopes = Vec::with_capacity(n);
        for i in 0..n {
            let s = if i == 0 {
                (v[1] - v[0]) / (q[1] - q[0])
            } else if i == n - 1 {
                (v[n - 1] - v[n - 2]) / (q[n - 1] - q[n - 2])
            } else {
                (v[i + 1] - v[i - 1]) / (q[i + 1] - q[i - 1])
            };
            slopes.push(s);
        }
        Ok(Self { q, v, slopes })
    }

    /// Sensor values on the uniform [0, 1] grid.
    pub fn uniform(v: Vec<f64>) -> Result<Self, String> {
        let m = v.len();
        if m < 2 {
            return Err("need at least 2 sensor values".into());
        }
        let q = (0..m).map(|j| j as f64 / (m - 1) as f64).collect();
        Self::new(q, v)
    }

    pub fn value_and_slope(&self, x: f64) -> (f64, f64) {
        let n = self.q.len();
        let x = x.clamp(self.q[0], self.q[n - 1]);
        let k = match self
            .q
            .binary_search_by(|probe| probe.partial_cmp(&x).unwrap())
        {
            Ok(k) => return (self.v[k], self.slopes[k]),
            Err(k) => k.clamp(1, n - 1),
        };
        let (i0, i1) = (k - 1, k);
        let h = self.q[i1] - self.q[i0];
        let s = (x - self.q[i0]) / h;
        let (y0, y1) = (self.v[i0], self.v[i1]);
        let (d0, d1) = (self.slopes[i0] * h, self.slopes[i1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        let deriv = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (6.0 * s - 6.0 * s2) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / h;
        (value, deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let pot = SensorPotential::uniform((0..11).map(|j| 2.0 * j as f64 / 10.0).collect()).unwrap();
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            let (v, dv) = pot.value_and_slope(x);
            assert!((v - 2.0 * x).abs() < 1e-12);
            assert!((dv - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolates_nodes_and_clamps() {
        let pot = SensorPotential::new(vec![0.0, 0.5, 1.0], vec![2.0, 0.0, 2.0]).unwrap();
        assert_eq!(pot.value_and_slope(0.5).0, 0.0);
        assert_eq!(pot.value_and_slope(-1.0).0, 2.0);
        assert_eq!(pot.value_and_slope(9.0).0, 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SensorPotential::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(SensorPotential::new(vec![0.0], vec![1.0]).is_err());
        assert!(SensorPotential::new(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
    }
}
