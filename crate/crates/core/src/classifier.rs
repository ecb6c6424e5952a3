//! Closed-form Fermat-Torricelli sets for projective triangles.
//!
//! With the vertices labelled so that `φ_AB <= φ_AC <= φ_BC`:
//!
//! | configuration                                  | minimizers      |
//! |------------------------------------------------|-----------------|
//! | equilateral, `φ > 60°`                          | `{A, B, C}`     |
//! | equilateral, `φ = 60°`                          | `{A, B, C, E}`  |
//! | equilateral, `φ < 60°`                          | `{E}`           |
//! | `60° <= φ_AB`, `φ_AC < φ_BC`                    | `{A}`           |
//! | `60° <= φ_AB < φ_AC = φ_BC`                     | `{A, B}`        |
//! | big triangle (any angles)                      | best vertices   |
//!
//! `E` is the normalized sum of sign-normalized representatives. Every other
//! triangle is reported as [`Coverage::NotCovered`] and left to the solver.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{evaluate, Metric, WeightedPointSet};
use crate::projective::{centroid, is_big, Angle, ProjectiveTriangle, UnitVector};

/// Objective values closer than this are ties.
pub const VALUE_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
    C,
    E,
    Numeric,
}

impl Label {
    pub fn vertex(i: usize) -> Label {
        [Label::A, Label::B, Label::C][i]
    }

    pub fn vertex_index(self) -> Option<usize> {
        match self {
            Label::A => Some(0),
            Label::B => Some(1),
            Label::C => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::A => "A",
            Label::B => "B",
            Label::C => "C",
            Label::E => "E",
            Label::Numeric => "P",
        })
    }
}

/// Which case of the classification produced a solution set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coverage {
    #[serde(rename = "Theorem1_1")]
    UniqueVertex,
    #[serde(rename = "Theorem1_2")]
    TwoVertices,
    #[serde(rename = "Theorem1_3a")]
    EquilateralVertices,
    #[serde(rename = "Theorem1_3b")]
    EquilateralCritical,
    #[serde(rename = "Theorem1_3c")]
    EquilateralCentroid,
    BigTriangle,
    NotCovered,
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coverage::UniqueVertex => "Theorem1_1",
            Coverage::TwoVertices => "Theorem1_2",
            Coverage::EquilateralVertices => "Theorem1_3a",
            Coverage::EquilateralCritical => "Theorem1_3b",
            Coverage::EquilateralCentroid => "Theorem1_3c",
            Coverage::BigTriangle => "BigTriangle",
            Coverage::NotCovered => "NotCovered",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionMember {
    pub label: Label,
    pub point: UnitVector,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub members: Vec<SolutionMember>,
    pub coverage: Coverage,
}

impl SolutionSet {
    pub fn labels(&self) -> Vec<Label> {
        self.members.iter().map(|m| m.label).collect()
    }

    pub fn is_covered(&self) -> bool {
        self.coverage != Coverage::NotCovered
    }

    /// Labels joined with `+`, e.g. `A+B`; `-` when empty.
    pub fn winner_string(&self) -> String {
        if self.members.is_empty() {
            return "-".into();
        }
        self.members.iter().map(|m| m.label.to_string()).collect::<Vec<_>>().join("+")
    }
}

/// `(J(A), J(B), J(C))`, e.g. `J(A) = sin φ_AB + sin φ_AC`.
pub fn vertex_objective_table(t: &ProjectiveTriangle) -> [f64; 3] {
    let (ab, ac, bc) = (t.phi_ab().sin(), t.phi_ac().sin(), t.phi_bc().sin());
    [ab + ac, ab + bc, ac + bc]
}

fn member(t: &ProjectiveTriangle, label: Label, point: UnitVector) -> SolutionMember {
    let ps = WeightedPointSet::triangle(t);
    let value = evaluate(&ps, &point, Metric::Sine).expect("triangle points are 3-dimensional");
    SolutionMember { label, point, value }
}

fn vertices(t: &ProjectiveTriangle, which: &[usize]) -> Vec<SolutionMember> {
    which.iter().map(|&i| member(t, Label::vertex(i), t.vertices()[i].clone())).collect()
}

/// Solution set of the triangle under the sine distance, where known in closed form.
///
/// `tol` is the angle-equality tolerance in radians.
pub fn classify(t: &ProjectiveTriangle, tol: f64) -> Result<SolutionSet> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance {tol} must be positive")));
    }
    let sixty = Angle::from_degrees(60.0);
    let (ab, ac, bc) = (t.phi_ab(), t.phi_ac(), t.phi_bc());

    if ab.approx_eq(bc, tol) {
        let phi = Angle((ab.0 + ac.0 + bc.0) / 3.0);
        let (members, coverage) = if phi.approx_eq(sixty, tol) {
            let mut m = vertices(t, &[0, 1, 2]);
            m.push(member(t, Label::E, centroid(t)?));
            (m, Coverage::EquilateralCritical)
        } else if phi.0 > sixty.0 {
            (vertices(t, &[0, 1, 2]), Coverage::EquilateralVertices)
        } else {
            (vec![member(t, Label::E, centroid(t)?)], Coverage::EquilateralCentroid)
        };
        return Ok(SolutionSet { members, coverage });
    }

    if ab.0 >= sixty.0 - tol {
        let set = if ac.approx_eq(bc, tol) {
            SolutionSet { members: vertices(t, &[0, 1]), coverage: Coverage::TwoVertices }
        } else {
            SolutionSet { members: vertices(t, &[0]), coverage: Coverage::UniqueVertex }
        };
        return Ok(set);
    }

    if is_big(t) {
        let table = vertex_objective_table(t);
        let best = table.iter().copied().fold(f64::INFINITY, f64::min);
        let which: Vec<usize> = (0..3).filter(|&i| table[i] - best <= VALUE_TIE_TOL).collect();
        return Ok(SolutionSet { members: vertices(t, &which), coverage: Coverage::BigTriangle });
    }

    Ok(SolutionSet { members: Vec::new(), coverage: Coverage::NotCovered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{triangle_from_angles, AngleTriple, DEFAULT_ANGLE_TOL};

    fn tri(x: f64, y: f64, z: f64) -> ProjectiveTriangle {
        triangle_from_angles(&AngleTriple::from_degrees(x, y, z).unwrap()).unwrap()
    }

    fn classify_deg(x: f64, y: f64, z: f64) -> SolutionSet {
        classify(&tri(x, y, z), DEFAULT_ANGLE_TOL).unwrap()
    }

    #[test]
    fn theorem_cases() {
        let s = classify_deg(65.0, 70.0, 80.0);
        assert_eq!((s.labels(), s.coverage), (vec![Label::A], Coverage::UniqueVertex));

        let s = classify_deg(65.0, 80.0, 80.0);
        assert_eq!((s.labels(), s.coverage), (vec![Label::A, Label::B], Coverage::TwoVertices));

        let s = classify_deg(50.0, 50.0, 50.0);
        assert_eq!((s.labels(), s.coverage), (vec![Label::E], Coverage::EquilateralCentroid));

        let s = classify_deg(60.0, 60.0, 60.0);
        assert_eq!(s.coverage, Coverage::EquilateralCritical);
        assert_eq!(s.labels(), vec![Label::A, Label::B, Label::C, Label::E]);
        for m in &s.members {
            assert!((m.value - 3f64.sqrt()).abs() < 1e-9);
        }

        let s = classify_deg(90.0, 90.0, 90.0);
        assert_eq!(s.coverage, Coverage::EquilateralVertices);
        assert_eq!(s.labels(), vec![Label::A, Label::B, Label::C]);
    }

    #[test]
    fn not_covered_below_sixty() {
        let s = classify_deg(50.0, 55.0, 58.0);
        assert_eq!(s.coverage, Coverage::NotCovered);
        assert!(s.members.is_empty());
        assert_eq!(s.winner_string(), "-");
    }

    #[test]
    fn big_triangle_picks_best_vertex() {
        let lines = [
            UnitVector::from3(1.0, 0.0, 0.0).unwrap(),
            UnitVector::from3(1.0, 1.0, 0.1).unwrap(),
            UnitVector::from3(1.0, -1.2, 0.1).unwrap(),
        ];
        let t = crate::projective::normalize_signs(lines).unwrap();
        assert!(t.phi_ab().degrees() < 60.0 && is_big(&t));
        let s = classify(&t, DEFAULT_ANGLE_TOL).unwrap();
        assert_eq!(s.coverage, Coverage::BigTriangle);
        assert_eq!(s.labels(), vec![Label::A]);
    }

    #[test]
    fn vertex_table_examples() {
        let t = tri(90.0, 90.0, 90.0);
        assert_eq!(vertex_objective_table(&t).map(|x| (x * 1e12).round() / 1e12), [2.0; 3]);
        let r3 = 3f64.sqrt();
        for x in vertex_objective_table(&tri(60.0, 60.0, 60.0)) {
            assert!((x - r3).abs() < 1e-12);
        }
        let s = |d: f64| d.to_radians().sin();
        let expect = [s(65.0) + s(70.0), s(65.0) + s(80.0), s(70.0) + s(80.0)];
        let got = vertex_objective_table(&tri(65.0, 70.0, 80.0));
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-12);
        }
        assert!((got[0] - 1.8460).abs() < 1e-4 && (got[1] - 1.8912).abs() < 1e-4 && (got[2] - 1.9245).abs() < 1e-4);
    }

    #[test]
    fn members_match_direct_evaluation() {
        let t = tri(65.0, 70.0, 80.0);
        let table = vertex_objective_table(&t);
        let s = classify(&t, DEFAULT_ANGLE_TOL).unwrap();
        assert!((s.members[0].value - table[0]).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(classify(&tri(65.0, 70.0, 80.0), 0.0).is_err());
    }
}
