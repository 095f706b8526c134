//! Wormhole geometry: Euclidean space minus two unit balls, glued to a handle `S^2 x [0,1]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point3, SingularSet, SymTensorField};
use crate::maps::{DeviceRegion, ManifoldPiece, PieceMap, StoDesign};

/// Sphere radius `r(zeta)` of the handle metric `h^2 dzeta^2 + r(zeta)^2 g_{S^2}`.
#[derive(Clone)]
pub enum Warp {
    /// `r = 1`.
    Product,
    /// `r = c`.
    Constant(f64),
    /// `r = 1 - (1 - r_min) sin^2(pi zeta)`: narrows to `r_min` at the midpoint.
    Collimator { r_min: f64 },
    /// User hook returning `(r, dr/dzeta)`.
    Custom(Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>),
}

impl fmt::Debug for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warp::Product => write!(f, "Product"),
            Warp::Constant(c) => write!(f, "Constant({c})"),
            Warp::Collimator { r_min } => write!(f, "Collimator {{ r_min: {r_min} }}"),
            Warp::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Warp {
    /// `(r(zeta), r'(zeta))`.
    pub fn eval(&self, zeta: f64) -> (f64, f64) {
        match self {
            Warp::Product => (1.0, 0.0),
            Warp::Constant(c) => (*c, 0.0),
            Warp::Collimator { r_min } => {
                let s = (PI * zeta).sin();
                let c = (PI * zeta).cos();
                (1.0 - (1.0 - r_min) * s * s, -(1.0 - r_min) * 2.0 * PI * s * c)
            }
            Warp::Custom(f) => f(zeta),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Warp::Product => "product".into(),
            Warp::Constant(c) => format!("constant {c}"),
            Warp::Collimator { r_min } => format!("collimator r_min={r_min}"),
            Warp::Custom(_) => "custom".into(),
        }
    }
}

/// Wormhole manifold with the two removed balls centred at `O = 0` and `P = (0,0,L)`.
#[derive(Clone, Debug)]
pub struct WormholeDesign {
    pub separation: f64,
    pub handle_length: f64,
    pub warp: Warp,
    pub sto: StoDesign,
}

#[derive(Clone, Debug, Serialize)]
pub struct WormholeSummary {
    pub separation: f64,
    pub handle_length: f64,
    pub warp: String,
    pub ball_centres: [[f64; 3]; 2],
}

impl WormholeDesign {
    pub fn centre_o(&self) -> Point3 {
        Point3::origin()
    }

    pub fn centre_p(&self) -> Point3 {
        Point3::new(0.0, 0.0, self.separation)
    }

    pub fn summary(&self) -> WormholeSummary {
        WormholeSummary {
            separation: self.separation,
            handle_length: self.handle_length,
            warp: self.warp.name(),
            ball_centres: [[0.0; 3], [0.0, 0.0, self.separation]],
        }
    }
}

/// Builds the wormhole design. The gluing identifies the sphere around `O` with
/// `zeta = 0` via `n -> s` and the sphere around `P` with `zeta = 1` via the
/// reflection `(n_x, n_y, n_z) -> (n_x, n_y, -n_z)`, so that the handle is
/// traversed without twisting. The physical realisation of the gluing is left abstract.
pub fn wormhole_geometry(separation: f64, handle_length: f64, warp: Warp) -> Result<WormholeDesign> {
    if !(separation > 3.0) {
        return Err(Error::Parameter {
            name: "L",
            value: separation,
            constraint: "L > 3",
        });
    }
    if !(handle_length > 0.0) {
        return Err(Error::Parameter {
            name: "handle_length",
            value: handle_length,
            constraint: "positive handle length",
        });
    }
    for k in 0..=64 {
        let (r, dr) = warp.eval(k as f64 / 64.0);
        if !(r > 0.0 && dr.is_finite()) {
            return Err(Error::Parameter {
                name: "warp",
                value: r,
                constraint: "r(zeta) > 0 on [0, 1]",
            });
        }
    }
    let balls = SingularSet::Union {
        parts: vec![
            SingularSet::Ball {
                center: [0.0; 3],
                radius: 1.0,
            },
            SingularSet::Ball {
                center: [0.0, 0.0, separation],
                radius: 1.0,
            },
        ],
    };
    let sto = StoDesign {
        pieces: vec![
            ManifoldPiece {
                name: "M1".into(),
                domain: format!("R^3 minus unit balls at O and P=(0,0,{separation})"),
                metric: Some(SymTensorField::euclidean()),
                blowup: None,
            },
            ManifoldPiece {
                name: "M2".into(),
                domain: format!("S^2 x [0,1], length {handle_length}, warp {}", warp.name()),
                metric: None,
                blowup: None,
            },
        ],
        regions: vec![DeviceRegion {
            name: "N".into(),
            interface: balls,
        }],
        maps: vec![
            PieceMap {
                source: 0,
                target: 0,
                map: None,
                description: "F1 (abstract)".into(),
            },
            PieceMap {
                source: 1,
                target: 0,
                map: None,
                description: "F2 (abstract)".into(),
            },
        ],
    };
    sto.validate()?;
    Ok(WormholeDesign {
        separation,
        handle_length,
        warp,
        sto,
    })
}

/// Default design: `L = 4`, unit handle length, product metric.
pub fn default_wormhole() -> WormholeDesign {
    wormhole_geometry(4.0, 1.0, Warp::Product).expect("default parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_design() {
        let d = default_wormhole();
        assert_eq!(d.centre_p(), Point3::new(0.0, 0.0, 4.0));
        assert_eq!(d.sto.pieces.len(), 2);
        assert_eq!(d.sto.regions[0].interface.distance(&Point3::new(0.0, 0.0, 2.0)), 1.0);
    }

    #[test]
    fn overlapping_balls_are_rejected() {
        assert!(matches!(wormhole_geometry(3.0, 1.0, Warp::Product), Err(Error::Parameter { name: "L", .. })));
        assert!(wormhole_geometry(2.0, 1.0, Warp::Product).is_err());
        assert!(wormhole_geometry(4.0, 1.0, Warp::Constant(-1.0)).is_err());
    }

    #[test]
    fn collimator_shape() {
        let w = Warp::Collimator { r_min: 0.2 };
        assert_eq!(w.eval(0.0), (1.0, 0.0));
        assert!((w.eval(0.5).0 - 0.2).abs() < 1e-15);
        let h = 1e-6;
        for z in [0.1, 0.3, 0.77] {
            let fd = (w.eval(z + h).0 - w.eval(z - h).0) / (2.0 * h);
            assert!((fd - w.eval(z).1).abs() < 1e-8);
        }
    }
}
