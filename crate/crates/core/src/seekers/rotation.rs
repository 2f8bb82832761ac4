use nalgebra::Matrix2;

/// The rotation `Y(t) = [[sin ω0t, cos ω0t], [-cos ω0t, sin ω0t]]` that maps
/// rotating-frame coordinates back to position offsets: `x - x* = Y(t) z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationY {
    pub time: f64,
    pub omega0: f64,
}

impl RotationY {
    pub fn new(time: f64, omega0: f64) -> Self {
        Self { time, omega0 }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        let (s, c) = (self.omega0 * self.time).sin_cos();
        Matrix2::new(s, c, -c, s)
    }

    /// Analytic time derivative of `Yᵀ(t)`.
    pub fn transpose_derivative(&self) -> Matrix2<f64> {
        let (s, c) = (self.omega0 * self.time).sin_cos();
        self.omega0 * Matrix2::new(c, s, -s, c)
    }

    /// `Y(t) z`
    pub fn apply(&self, z: [f64; 2]) -> [f64; 2] {
        let (s, c) = (self.omega0 * self.time).sin_cos();
        [s * z[0] + c * z[1], -c * z[0] + s * z[1]]
    }

    /// `Yᵀ(t) v`
    pub fn apply_transpose(&self, v: [f64; 2]) -> [f64; 2] {
        let (s, c) = (self.omega0 * self.time).sin_cos();
        [s * v[0] - c * v[1], c * v[0] + s * v[1]]
    }
}

/// The skew generator `J0 = [[0, ω0], [-ω0, 0]]`.
pub fn j0(omega0: f64) -> Matrix2<f64> {
    Matrix2::new(0.0, omega0, -omega0, 0.0)
}

/// `z = Yᵀ(t)(x - x*)`.
pub fn to_rotating_frame(t: f64, x: [f64; 2], x_star: [f64; 2], omega0: f64) -> [f64; 2] {
    RotationY::new(t, omega0).apply_transpose([x[0] - x_star[0], x[1] - x_star[1]])
}

/// `x = x* + Y(t) z`.
pub fn from_rotating_frame(t: f64, z: [f64; 2], x_star: [f64; 2], omega0: f64) -> [f64; 2] {
    let v = RotationY::new(t, omega0).apply(z);
    [x_star[0] + v[0], x_star[1] + v[1]]
}
