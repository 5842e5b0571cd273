//! The four affine connections and their curvature tensors.
//!
//! Each connection is given by its coefficient table Γ[i][j] = ∇_{X_i} X_j
//! on the left-invariant frame, with entries affine in the metric parameter
//! L. The four kinds:
//!
//! * `LeviCivita` — the Levi-Civita connection of g_L.
//! * `SvK1` — the Schouten-Van Kampen connection of the splitting
//!   span{X1,X2} ⊕ span{X3}.
//! * `SvK2` — the Schouten-Van Kampen connection of the splitting
//!   span{X2,X3} ⊕ span{X1}.
//! * `Adapted` — the flat metric connection with all coefficients zero.
//!
//! The curvature tensor R(X_i, X_j)X_k is assembled generically from a
//! coefficient table and the bracket table ([X1,X2] = X3), never hard-coded,
//! so transcription errors in the tables are caught by the regression tests
//! against the known closed forms.

use serde::{Deserialize, Serialize};

use crate::heis::{FrameVector, MetricParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectionKind {
    LeviCivita,
    SvK1,
    SvK2,
    Adapted,
}

impl ConnectionKind {
    pub const ALL: [ConnectionKind; 4] = [
        ConnectionKind::LeviCivita,
        ConnectionKind::SvK1,
        ConnectionKind::SvK2,
        ConnectionKind::Adapted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConnectionKind::LeviCivita => "levi-civita",
            ConnectionKind::SvK1 => "svk1",
            ConnectionKind::SvK2 => "svk2",
            ConnectionKind::Adapted => "adapted",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "levi-civita" | "lc" => ConnectionKind::LeviCivita,
            "svk1" => ConnectionKind::SvK1,
            "svk2" => ConnectionKind::SvK2,
            "adapted" => ConnectionKind::Adapted,
            _ => return None,
        })
    }

    pub fn symbolic_table(self) -> &'static SymbolicTable {
        match self {
            ConnectionKind::LeviCivita => &LEVI_CIVITA_TABLE,
            ConnectionKind::SvK1 => &SVK1_TABLE,
            ConnectionKind::SvK2 => &SVK2_TABLE,
            ConnectionKind::Adapted => &ADAPTED_TABLE,
        }
    }
}

impl std::fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A coefficient component that is affine in L: `c0 + c1 * L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearInL {
    pub c0: f64,
    pub c1: f64,
}

impl LinearInL {
    pub fn at(self, l: f64) -> f64 {
        self.c0 + self.c1 * l
    }
}

const Z: LinearInL = LinearInL { c0: 0.0, c1: 0.0 };

const fn k(c0: f64) -> LinearInL {
    LinearInL { c0, c1: 0.0 }
}

const fn kl(c1: f64) -> LinearInL {
    LinearInL { c0: 0.0, c1 }
}

type SymEntry = [LinearInL; 3];
const ZV: SymEntry = [Z, Z, Z];

/// Coefficient table with L kept symbolic, one degree-1 polynomial per frame
/// component; `table.0[i][j]` is ∇_{X_{i+1}} X_{j+1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolicTable(pub [[SymEntry; 3]; 3]);

impl SymbolicTable {
    pub fn instantiate(&self, metric: MetricParam) -> CoeffTable {
        let l = metric.l();
        let mut gamma = [[FrameVector::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let e = self.0[i][j];
                gamma[i][j] = FrameVector::new(e[0].at(l), e[1].at(l), e[2].at(l));
            }
        }
        CoeffTable { gamma, metric }
    }
}

static LEVI_CIVITA_TABLE: SymbolicTable = SymbolicTable([
    [ZV, [Z, Z, k(0.5)], [Z, kl(-0.5), Z]],
    [[Z, Z, k(-0.5)], ZV, [kl(0.5), Z, Z]],
    [[Z, kl(-0.5), Z], [kl(0.5), Z, Z], ZV],
]);

static SVK1_TABLE: SymbolicTable = SymbolicTable([
    [ZV, ZV, ZV],
    [ZV, ZV, ZV],
    [[Z, kl(-0.5), Z], [kl(0.5), Z, Z], ZV],
]);

static SVK2_TABLE: SymbolicTable = SymbolicTable([
    [ZV, [Z, Z, k(0.5)], [Z, kl(-0.5), Z]],
    [ZV, ZV, ZV],
    [ZV, ZV, ZV],
]);

static ADAPTED_TABLE: SymbolicTable = SymbolicTable([[ZV; 3]; 3]);

/// Coefficient table instantiated at a concrete L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffTable {
    pub gamma: [[FrameVector; 3]; 3],
    pub metric: MetricParam,
}

pub fn coeff_table(kind: ConnectionKind, metric: MetricParam) -> CoeffTable {
    kind.symbolic_table().instantiate(metric)
}

impl CoeffTable {
    /// ∇ of a frame-vector field along a curve: V̇ plus the contraction of
    /// the velocity (in frame components) with the coefficient table.
    pub fn covariant_along(
        &self,
        velocity: FrameVector,
        v: FrameVector,
        v_dot: FrameVector,
    ) -> FrameVector {
        let mut out = v_dot;
        for i in 0..3 {
            let vi = velocity.component(i);
            if vi == 0.0 {
                continue;
            }
            for j in 0..3 {
                let vj = v.component(j);
                if vj == 0.0 {
                    continue;
                }
                out = out + self.gamma[i][j].scale(vi * vj);
            }
        }
        out
    }

    /// Torsion component T(X_i, X_j) = Γ[i][j] − Γ[j][i] − [X_i, X_j].
    pub fn torsion(&self, i: usize, j: usize) -> FrameVector {
        self.gamma[i][j] - self.gamma[j][i] - bracket(i, j)
    }
}

/// Bracket table of the left-invariant frame: [X1, X2] = X3, all others 0.
pub fn bracket(i: usize, j: usize) -> FrameVector {
    match (i, j) {
        (0, 1) => FrameVector::new(0.0, 0.0, 1.0),
        (1, 0) => FrameVector::new(0.0, 0.0, -1.0),
        _ => FrameVector::ZERO,
    }
}

/// All 27 values R(X_i, X_j)X_k of a connection's curvature tensor,
/// assembled generically from the coefficient table.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureTable {
    pub r: [[[FrameVector; 3]; 3]; 3],
    pub metric: MetricParam,
}

impl CurvatureTable {
    pub fn new(kind: ConnectionKind, metric: MetricParam) -> Self {
        let t = coeff_table(kind, metric);
        let mut r = [[[FrameVector::ZERO; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for kk in 0..3 {
                    r[i][j][kk] = curvature_from_table(&t, i, j, kk);
                }
            }
        }
        CurvatureTable { r, metric }
    }

    /// −⟨R(a, b)a, b⟩_L, expanded trilinearly over the table.
    pub fn sectional(&self, a: FrameVector, b: FrameVector) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            let ai = a.component(i);
            if ai == 0.0 {
                continue;
            }
            for j in 0..3 {
                let bj = b.component(j);
                if bj == 0.0 {
                    continue;
                }
                for kk in 0..3 {
                    let ak = a.component(kk);
                    if ak == 0.0 {
                        continue;
                    }
                    acc += ai * bj * ak * self.r[i][j][kk].dot_l(b, self.metric);
                }
            }
        }
        -acc
    }
}

/// R(X_i, X_j)X_k for a table of constant (per fixed L) coefficients:
/// since each ∇_{X_j}X_k has constant frame components, the covariant
/// derivative of it reduces to another table contraction, and the bracket
/// term picks out Γ[m][k] with the structure constants of [X_i, X_j].
fn curvature_from_table(t: &CoeffTable, i: usize, j: usize, k: usize) -> FrameVector {
    let mut out = FrameVector::ZERO;
    // ∇_{X_i}(∇_{X_j}X_k) − ∇_{X_j}(∇_{X_i}X_k)
    for m in 0..3 {
        let c_jk = t.gamma[j][k].component(m);
        if c_jk != 0.0 {
            out = out + t.gamma[i][m].scale(c_jk);
        }
        let c_ik = t.gamma[i][k].component(m);
        if c_ik != 0.0 {
            out = out - t.gamma[j][m].scale(c_ik);
        }
    }
    // − ∇_{[X_i, X_j]}X_k
    let br = bracket(i, j);
    for m in 0..3 {
        let c = br.component(m);
        if c != 0.0 {
            out = out - t.gamma[m][k].scale(c);
        }
    }
    out
}

/// R(X_i, X_j)X_k with 1-based indices hidden behind 0-based slots.
pub fn curvature_tensor(
    kind: ConnectionKind,
    metric: MetricParam,
    i: usize,
    j: usize,
    k: usize,
) -> FrameVector {
    curvature_from_table(&coeff_table(kind, metric), i, j, k)
}

/// Sectional-type curvature −⟨R(a,b)a, b⟩_L. Not normalized; callers pass
/// orthonormal pairs.
pub fn sectional(
    kind: ConnectionKind,
    metric: MetricParam,
    a: FrameVector,
    b: FrameVector,
) -> f64 {
    CurvatureTable::new(kind, metric).sectional(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::FrameVector as FV;

    fn m(l: f64) -> MetricParam {
        MetricParam::new(l).unwrap()
    }

    #[test]
    fn levi_civita_table_values() {
        for l in [0.25, 1.0, 7.0] {
            let t = coeff_table(ConnectionKind::LeviCivita, m(l));
            assert_eq!(t.gamma[0][1], FV::new(0.0, 0.0, 0.5));
            assert_eq!(t.gamma[1][0], FV::new(0.0, 0.0, -0.5));
            assert_eq!(t.gamma[0][2], FV::new(0.0, -l / 2.0, 0.0));
            assert_eq!(t.gamma[2][0], FV::new(0.0, -l / 2.0, 0.0));
            assert_eq!(t.gamma[1][2], FV::new(l / 2.0, 0.0, 0.0));
            assert_eq!(t.gamma[2][1], FV::new(l / 2.0, 0.0, 0.0));
            for j in 0..3 {
                assert_eq!(t.gamma[j][j], FV::ZERO);
            }
        }
    }

    #[test]
    fn svk1_table_values() {
        let l = 3.0;
        let t = coeff_table(ConnectionKind::SvK1, m(l));
        assert_eq!(t.gamma[2][0], FV::new(0.0, -1.5, 0.0));
        assert_eq!(t.gamma[2][1], FV::new(1.5, 0.0, 0.0));
        for i in 0..3 {
            for j in 0..3 {
                if !((i, j) == (2, 0) || (i, j) == (2, 1)) {
                    assert_eq!(t.gamma[i][j], FV::ZERO, "({}, {})", i, j);
                }
            }
        }
    }

    #[test]
    fn svk2_table_values() {
        let l = 5.0;
        let t = coeff_table(ConnectionKind::SvK2, m(l));
        assert_eq!(t.gamma[0][1], FV::new(0.0, 0.0, 0.5));
        assert_eq!(t.gamma[0][2], FV::new(0.0, -2.5, 0.0));
        for i in 0..3 {
            for j in 0..3 {
                if !((i, j) == (0, 1) || (i, j) == (0, 2)) {
                    assert_eq!(t.gamma[i][j], FV::ZERO, "({}, {})", i, j);
                }
            }
        }
    }

    #[test]
    fn adapted_table_is_zero() {
        let t = coeff_table(ConnectionKind::Adapted, m(9.0));
        for row in t.gamma {
            for entry in row {
                assert_eq!(entry, FV::ZERO);
            }
        }
    }

    #[test]
    fn all_four_tables_are_metric() {
        // ⟨Γ[i][j], X_k⟩_L + ⟨X_j, Γ[i][k]⟩_L = 0 since the frame inner
        // products are constant.
        for kind in ConnectionKind::ALL {
            for l in [0.5, 1.0, 10.0] {
                let metric = m(l);
                let t = coeff_table(kind, metric);
                for i in 0..3 {
                    for j in 0..3 {
                        for kk in 0..3 {
                            let s = t.gamma[i][j].dot_l(FV::basis(kk), metric)
                                + FV::basis(j).dot_l(t.gamma[i][kk], metric);
                            assert!(
                                s.abs() < 1e-14 * (1.0 + l),
                                "{} ({},{},{}): {}",
                                kind,
                                i,
                                j,
                                kk,
                                s
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn levi_civita_is_torsion_free() {
        let t = coeff_table(ConnectionKind::LeviCivita, m(2.5));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.torsion(i, j), FV::ZERO);
            }
        }
    }

    #[test]
    fn svk1_curvature_matches_expected_table() {
        for l in [0.5, 1.0, 4.0] {
            let metric = m(l);
            let r121 = curvature_tensor(ConnectionKind::SvK1, metric, 0, 1, 0);
            assert_eq!(r121, FV::new(0.0, l / 2.0, 0.0));
            let r122 = curvature_tensor(ConnectionKind::SvK1, metric, 0, 1, 1);
            assert_eq!(r122, FV::new(-l / 2.0, 0.0, 0.0));
            for i in 0..3 {
                for j in 0..3 {
                    for kk in 0..3 {
                        if (i, j) == (0, 1) && kk < 2 || (i, j) == (1, 0) && kk < 2 {
                            continue;
                        }
                        assert_eq!(
                            curvature_tensor(ConnectionKind::SvK1, metric, i, j, kk),
                            FV::ZERO,
                            "({}, {}, {})",
                            i,
                            j,
                            kk
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn svk2_and_adapted_curvature_vanish() {
        for kind in [ConnectionKind::SvK2, ConnectionKind::Adapted] {
            let metric = m(3.0);
            for i in 0..3 {
                for j in 0..3 {
                    for kk in 0..3 {
                        assert_eq!(
                            curvature_tensor(kind, metric, i, j, kk),
                            FV::ZERO,
                            "{} ({}, {}, {})",
                            kind,
                            i,
                            j,
                            kk
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_is_antisymmetric_in_first_slots() {
        for kind in ConnectionKind::ALL {
            let metric = m(2.0);
            for i in 0..3 {
                for j in 0..3 {
                    for kk in 0..3 {
                        let a = curvature_tensor(kind, metric, i, j, kk);
                        let b = curvature_tensor(kind, metric, j, i, kk);
                        assert_eq!(a, -b);
                    }
                }
            }
        }
    }

    #[test]
    fn svk1_sectional_of_horizontal_plane() {
        let metric = m(6.0);
        let v = sectional(
            ConnectionKind::SvK1,
            metric,
            FV::new(1.0, 0.0, 0.0),
            FV::new(0.0, 1.0, 0.0),
        );
        assert!((v - (-3.0)).abs() < 1e-14);
    }

    #[test]
    fn levi_civita_sectional_values() {
        // Hand contraction of the generic tensor: K(X1, X2) = −3L/4 and
        // K(X1, X̃3) = K(X2, X̃3) = L/4.
        for l in [0.5, 1.0, 4.0] {
            let metric = m(l);
            let k12 = sectional(
                ConnectionKind::LeviCivita,
                metric,
                FV::new(1.0, 0.0, 0.0),
                FV::new(0.0, 1.0, 0.0),
            );
            assert!((k12 + 0.75 * l).abs() < 1e-13 * (1.0 + l * l));
            let x3t = FV::new(0.0, 0.0, metric.inv_sqrt_l());
            let k13 = sectional(
                ConnectionKind::LeviCivita,
                metric,
                FV::new(1.0, 0.0, 0.0),
                x3t,
            );
            assert!((k13 - 0.25 * l).abs() < 1e-13 * (1.0 + l * l), "{}", k13);
            let k23 = sectional(
                ConnectionKind::LeviCivita,
                metric,
                FV::new(0.0, 1.0, 0.0),
                x3t,
            );
            assert!((k23 - 0.25 * l).abs() < 1e-13 * (1.0 + l * l));
        }
    }

    #[test]
    fn adapted_sectional_vanishes() {
        let metric = m(2.0);
        let v = sectional(
            ConnectionKind::Adapted,
            metric,
            FV::new(0.3, -0.4, 0.1),
            FV::new(1.0, 2.0, -0.5),
        );
        assert_eq!(v, 0.0);
    }
}
