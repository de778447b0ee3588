use serde::{Deserialize, Serialize};

use super::{Domain, SystemMap};
use crate::error::{argument, numerical, Result};

/// Slack/taut configuration of the two cables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Both cables slack.
    D1,
    /// Cable A taut, cable B slack.
    D2,
    /// Cable B taut, cable A slack.
    D3,
    /// Both cables taut.
    D4,
}

/// Physical constants of a point mass hanging from two elastic cables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CableParams {
    pub mass: f64,
    /// Gravitational acceleration vector (points down).
    pub gravity: [f64; 2],
    pub anchor_a: [f64; 2],
    pub anchor_b: [f64; 2],
    pub length_a: f64,
    pub length_b: f64,
    pub stiffness: f64,
    pub damping: f64,
    /// Fixed integration step defining the discrete map.
    pub step: f64,
}

impl Default for CableParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            gravity: [0.0, -9.81],
            anchor_a: [-1.0, 0.0],
            anchor_b: [1.0, 0.0],
            length_a: 1.5,
            length_b: 1.5,
            stiffness: 200.0,
            damping: 2.0,
            step: 0.02,
        }
    }
}

/// Two-cable point-mass system, discretized by one classical RK4 step.
///
/// State is `(x, y, ẋ, ẏ)`. Each cable pulls only when stretched past its
/// natural length, with tension `k·e + b·max(0, ė)`; it never pushes.
#[derive(Debug, Clone)]
pub struct CableSystem {
    params: CableParams,
    domain: Domain,
}

impl CableSystem {
    pub fn new(params: CableParams, domain: Domain) -> Result<Self> {
        let p = &params;
        if domain.dim() != 4 {
            return Err(argument("cable system needs a 4-D domain (x, y, vx, vy)"));
        }
        if !(p.mass > 0.0) {
            return Err(argument("cable mass must be positive"));
        }
        if !(p.stiffness > 0.0) {
            return Err(argument("cable stiffness must be positive"));
        }
        if !(p.damping >= 0.0) {
            return Err(argument("cable damping must be nonnegative"));
        }
        if !(p.step > 0.0) {
            return Err(argument("integration step must be positive"));
        }
        if !(p.length_a > 0.0 && p.length_b > 0.0) {
            return Err(argument("cable lengths must be positive"));
        }
        let all_finite = p
            .gravity
            .iter()
            .chain(&p.anchor_a)
            .chain(&p.anchor_b)
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(argument("cable geometry must be finite"));
        }
        Ok(Self { params, domain })
    }

    /// Default box: wide enough for releases from the slack region down to
    /// the taut equilibrium.
    pub fn default_domain() -> Domain {
        Domain::new(vec![-0.7, -1.35, -3.0, -3.0], vec![0.7, -0.45, 3.0, 3.0])
            .expect("valid default box")
    }

    pub fn params(&self) -> &CableParams {
        &self.params
    }

    fn cables(&self) -> [([f64; 2], f64); 2] {
        [
            (self.params.anchor_a, self.params.length_a),
            (self.params.anchor_b, self.params.length_b),
        ]
    }

    /// Distances from `pos` to anchors A and B.
    pub fn cable_lengths(&self, pos: [f64; 2]) -> [f64; 2] {
        self.cables()
            .map(|(anchor, _)| (anchor[0] - pos[0]).hypot(anchor[1] - pos[1]))
    }

    pub fn classify_region(&self, pos: [f64; 2]) -> Region {
        let [la, lb] = self.cable_lengths(pos);
        let taut_a = la > self.params.length_a;
        let taut_b = lb > self.params.length_b;
        match (taut_a, taut_b) {
            (false, false) => Region::D1,
            (true, false) => Region::D2,
            (false, true) => Region::D3,
            (true, true) => Region::D4,
        }
    }

    /// Cable tensions `(T_A, T_B)` at a full state; both are always `≥ 0`.
    pub fn tensions(&self, state: &[f64]) -> [f64; 2] {
        let (p, v) = ([state[0], state[1]], [state[2], state[3]]);
        self.cables().map(|(anchor, natural)| {
            let d = [anchor[0] - p[0], anchor[1] - p[1]];
            let len = d[0].hypot(d[1]);
            let stretch = len - natural;
            if stretch <= 0.0 || len == 0.0 {
                return 0.0;
            }
            let rate = -(v[0] * d[0] + v[1] * d[1]) / len;
            self.params.stiffness * stretch + self.params.damping * rate.max(0.0)
        })
    }

    /// Acceleration of the mass at `state`.
    pub fn acceleration(&self, state: &[f64]) -> [f64; 2] {
        let p = &self.params;
        let mut acc = p.gravity;
        let tensions = self.tensions(state);
        for ((anchor, _), t) in self.cables().iter().zip(tensions) {
            if t == 0.0 {
                continue;
            }
            let d = [anchor[0] - state[0], anchor[1] - state[1]];
            let len = d[0].hypot(d[1]);
            acc[0] += t * d[0] / (len * p.mass);
            acc[1] += t * d[1] / (len * p.mass);
        }
        acc
    }

    fn derivative(&self, s: &[f64; 4]) -> [f64; 4] {
        let a = self.acceleration(s);
        [s[2], s[3], a[0], a[1]]
    }

    /// One RK4 step of length `h` without domain projection.
    pub fn integrate(&self, s: [f64; 4], h: f64) -> [f64; 4] {
        let add = |s: &[f64; 4], k: &[f64; 4], f: f64| {
            [s[0] + f * k[0], s[1] + f * k[1], s[2] + f * k[2], s[3] + f * k[3]]
        };
        let k1 = self.derivative(&s);
        let k2 = self.derivative(&add(&s, &k1, h / 2.0));
        let k3 = self.derivative(&add(&s, &k2, h / 2.0));
        let k4 = self.derivative(&add(&s, &k3, h));
        let mut out = s;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }

    /// Checked one-step flow map (unclamped).
    pub fn cable_step(&self, x: &[f64]) -> Result<[f64; 4]> {
        self.domain.check_dim(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(numerical(format!("non-finite cable state {x:?}")));
        }
        let out = self.integrate([x[0], x[1], x[2], x[3]], self.params.step);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(numerical(format!("cable step diverged from {x:?}")));
        }
        Ok(out)
    }

    /// Static equilibrium with zero velocity, found by Newton iteration on
    /// the force balance starting below the midpoint of the anchors.
    pub fn static_equilibrium(&self) -> Result<[f64; 4]> {
        let p = &self.params;
        let mid = [
            0.5 * (p.anchor_a[0] + p.anchor_b[0]),
            0.5 * (p.anchor_a[1] + p.anchor_b[1]),
        ];
        let reach = p.length_a.max(p.length_b);
        let mut pos = [mid[0], mid[1] - reach];
        let force = |q: [f64; 2]| self.acceleration(&[q[0], q[1], 0.0, 0.0]);
        for _ in 0..100 {
            let f = force(pos);
            if f[0].hypot(f[1]) < 1e-13 {
                return Ok([pos[0], pos[1], 0.0, 0.0]);
            }
            let eps = 1e-7;
            let fx = force([pos[0] + eps, pos[1]]);
            let fy = force([pos[0], pos[1] + eps]);
            let j = [
                [(fx[0] - f[0]) / eps, (fy[0] - f[0]) / eps],
                [(fx[1] - f[1]) / eps, (fy[1] - f[1]) / eps],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            pos[0] -= (j[1][1] * f[0] - j[0][1] * f[1]) / det;
            pos[1] -= (-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        }
        Err(numerical("static equilibrium search did not converge"))
    }
}

impl Default for CableSystem {
    fn default() -> Self {
        Self::new(CableParams::default(), Self::default_domain()).expect("valid defaults")
    }
}

impl SystemMap for CableSystem {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn advance(&self, x: &[f64], out: &mut [f64]) {
        let s = self.integrate([x[0], x[1], x[2], x[3]], self.params.step);
        out.copy_from_slice(&s);
    }
}
