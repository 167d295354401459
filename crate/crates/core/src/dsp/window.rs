use serde::{Deserialize, Serialize};

/// Time-domain taper applied to centered samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    #[default]
    Triangular,
}

impl WindowKind {
    /// Window value at time `t` for total duration `period` (support |t| <= period/2).
    pub fn eval(self, t: f64, period: f64) -> f64 {
        if t.abs() > period / 2.0 {
            return 0.0;
        }
        match self {
            WindowKind::Rectangular => 1.0,
            WindowKind::Triangular => 1.0 - 2.0 * (t / period).abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_shape() {
        let w = WindowKind::Triangular;
        assert_eq!(w.eval(0.0, 10.0), 1.0);
        assert_eq!(w.eval(2.5, 10.0), 0.5);
        assert_eq!(w.eval(-5.0, 10.0), 0.0);
        assert_eq!(w.eval(6.0, 10.0), 0.0);
        assert_eq!(WindowKind::Rectangular.eval(4.9, 10.0), 1.0);
    }
}
