//! The fixed catalogue of test maps used by the K–H checks.

use crate::geometry::Point;
use crate::maps::spec::MapSpec;

#[derive(Clone, Debug)]
pub struct TestMap {
    pub name: &'static str,
    pub map: MapSpec,
    pub center: Point,
    pub radius: f64,
}

pub fn builtin_test_maps() -> Vec<TestMap> {
    let e1_2 = Point::new2(1.0, 0.0);
    let e1_3 = Point::new3(1.0, 0.0, 0.0);
    let o2 = Point::zero(2);
    let o3 = Point::zero(3);
    let m = |name, map: crate::Result<MapSpec>, center, radius| TestMap { name, map: map.expect("valid builtin"), center, radius };
    vec![
        m("identity-2d", MapSpec::identity(2), o2, 1.0),
        m("identity-3d", MapSpec::identity(3), o3, 1.0),
        m("diag-2-1", MapSpec::diag(&[2.0, 1.0]), o2, 1.0),
        m("shear-2d", MapSpec::linear(2, &[vec![1.0, 0.5], vec![0.0, 1.0]]), o2, 1.0),
        m(
            "rotated-scaling-2d",
            MapSpec::composite(vec![MapSpec::rotation2(0.9).unwrap(), MapSpec::diag(&[1.3, 0.9]).unwrap()]),
            o2,
            1.0,
        ),
        m("diag-3d", MapSpec::diag(&[1.5, 1.0, 0.8]), o3, 1.0),
        m(
            "general-3d",
            MapSpec::linear(3, &[vec![1.1, 0.2, 0.0], vec![0.0, 0.9, 0.3], vec![0.1, 0.0, 1.2]]),
            o3,
            1.0,
        ),
        m("radial-0.8-2d", MapSpec::radial_stretch(2, 0.8), e1_2, 0.5),
        m("radial-1.25-2d", MapSpec::radial_stretch(2, 1.25), e1_2, 0.5),
        m("radial-0.8-3d", MapSpec::radial_stretch(3, 0.8), e1_3, 0.5),
        m("radial-blend-2d", MapSpec::radial_blend(2, 1.0, 0.8, 1.1, 1.5), Point::new2(1.3, 0.0), 0.5),
        m(
            "diag-after-radial-2d",
            MapSpec::composite(vec![MapSpec::diag(&[1.2, 1.0]).unwrap(), MapSpec::radial_stretch(2, 0.9).unwrap()]),
            e1_2,
            0.5,
        ),
    ]
}
