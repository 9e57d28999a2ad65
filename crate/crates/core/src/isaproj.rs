//! Fixed linear projection of selected features onto the 2D instance space.

use crate::qsim::escape;
use crate::{FeatureVector, InstanceClass, Real};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("projection spec needs at least one feature")]
    EmptySpec,
    #[error("normalisation needs at least 2 instances, got {0}")]
    TooFewInstances(usize),
    #[error("non-finite coordinate for {0}")]
    NonFinite(String),
    #[error("no points to plot")]
    NoPoints,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

const DEFAULT_FEATURES: [&str; 10] = [
    "radius",
    "minimumDegree",
    "minimumDominatingSetSize",
    "regular",
    "planar",
    "averageDistance",
    "laplacianLargestEigenvalue",
    "numberOfOrbits",
    "groupSize",
    "numberOfEdges",
];

const DEFAULT_MATRIX: [[f64; 2]; 10] = [
    [0.5051, -0.485],
    [-0.6291, 0.0463],
    [0.4771, -0.0263],
    [-0.4878, -0.9917],
    [0.5781, -0.0577],
    [0.4284, -0.2866],
    [-0.0279, 0.9336],
    [-0.5347, -0.4114],
    [0.4849, 0.9991],
    [-0.4417, 0.5989],
];

/// Selected feature names and their `k × 2` coefficient matrix;
/// `z = Mᵀ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSpec<T> {
    features: Vec<String>,
    matrix: Vec<[T; 2]>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    features: Vec<String>,
    matrix: Vec<[f64; 2]>,
}

impl<T: Real> ProjectionSpec<T> {
    pub fn new(features: Vec<String>, matrix: Vec<[T; 2]>) -> Result<Self, ProjectionError> {
        if features.is_empty() {
            return Err(ProjectionError::EmptySpec);
        }
        if features.len() != matrix.len() {
            return Err(ProjectionError::Length { expected: features.len(), got: matrix.len() });
        }
        for f in &features {
            if !FeatureVector::NAMES.contains(&f.as_str()) {
                return Err(ProjectionError::UnknownFeature(f.clone()));
            }
        }
        Ok(Self { features, matrix })
    }

    /// The 10-feature instance space.
    pub fn standard() -> Self {
        let features = DEFAULT_FEATURES.iter().map(|s| s.to_string()).collect();
        let matrix = DEFAULT_MATRIX.iter().map(|r| [T::lit(r[0]), T::lit(r[1])]).collect();
        Self { features, matrix }
    }

    pub fn from_json(text: &str) -> Result<Self, ProjectionError> {
        let raw: SpecJson = serde_json::from_str(text)?;
        Self::new(raw.features, raw.matrix.iter().map(|r| [T::lit(r[0]), T::lit(r[1])]).collect())
    }

    pub fn to_json(&self) -> String {
        let raw = SpecJson {
            features: self.features.clone(),
            matrix: self.matrix.iter().map(|r| [r[0].as_f64(), r[1].as_f64()]).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("plain data serialises")
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn matrix(&self) -> &[[T; 2]] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// Selected features in spec order.
    pub fn select_features(&self, fv: &FeatureVector) -> Vec<T> {
        self.features
            .iter()
            .map(|f| T::lit(fv.get(f).expect("names validated on construction")))
            .collect()
    }

    pub fn project(&self, x: &[T]) -> Result<(T, T), ProjectionError> {
        if x.len() != self.dim() {
            return Err(ProjectionError::Length { expected: self.dim(), got: x.len() });
        }
        let mut z1 = T::zero();
        let mut z2 = T::zero();
        for (xi, row) in x.iter().zip(&self.matrix) {
            z1 += row[0] * *xi;
            z2 += row[1] * *xi;
        }
        Ok((z1, z2))
    }
}

/// Per-feature mean and sample standard deviation over a reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats<T> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

impl<T: Real> NormalizationStats<T> {
    pub fn fit(rows: &[Vec<T>]) -> Result<Self, ProjectionError> {
        if rows.len() < 2 {
            return Err(ProjectionError::TooFewInstances(rows.len()));
        }
        let d = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(ProjectionError::Length { expected: d, got: bad.len() });
        }
        let n = T::lit(rows.len() as f64);
        let mean: Vec<T> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<T>() / n).collect();
        let std = (0..d)
            .map(|j| {
                let ss: T = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum();
                (ss / (n - T::one())).sqrt()
            })
            .collect();
        Ok(Self { mean, std })
    }

    /// True when feature `j` carries no spread and is projected as 0.
    pub fn is_constant(&self, j: usize) -> bool {
        self.std[j] <= T::lit(1e-12) * self.mean[j].abs().max(T::one())
    }

    pub fn normalize(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .enumerate()
            .map(|(j, &v)| if self.is_constant(j) { T::zero() } else { (v - self.mean[j]) / self.std[j] })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstancePoint {
    pub id: String,
    pub class: InstanceClass,
    pub z1: f64,
    pub z2: f64,
}

/// Normalises the batch against itself and projects every instance.
pub fn project_batch(
    instances: &[(String, InstanceClass, FeatureVector)],
    spec: &ProjectionSpec<f64>,
) -> Result<Vec<InstancePoint>, ProjectionError> {
    let raw: Vec<Vec<f64>> = instances.iter().map(|(_, _, fv)| spec.select_features(fv)).collect();
    let stats = NormalizationStats::fit(&raw)?;
    instances
        .iter()
        .zip(&raw)
        .map(|((id, class, _), x)| {
            let (z1, z2) = spec.project(&stats.normalize(x))?;
            if !(z1.is_finite() && z2.is_finite()) {
                return Err(ProjectionError::NonFinite(id.clone()));
            }
            Ok(InstancePoint { id: id.clone(), class: *class, z1, z2 })
        })
        .collect()
}

/// Mean pairwise distance within classes and across classes.
pub fn cluster_separation(points: &[InstancePoint]) -> (f64, f64) {
    let (mut intra, mut ni, mut inter, mut nx) = (0.0, 0usize, 0.0, 0usize);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = (a.z1 - b.z1).hypot(a.z2 - b.z2);
            if a.class == b.class {
                intra += d;
                ni += 1;
            } else {
                inter += d;
                nx += 1;
            }
        }
    }
    (intra / ni.max(1) as f64, inter / nx.max(1) as f64)
}

pub fn class_color(class: InstanceClass) -> &'static str {
    match class {
        InstanceClass::UniformRandom => "#1f77b4",
        InstanceClass::PowerLawTree => "#ff7f0e",
        InstanceClass::WattsStrogatzSmallWorld => "#2ca02c",
        InstanceClass::Geometric => "#d62728",
        InstanceClass::ThreeRegular => "#9467bd",
        InstanceClass::FourRegular => "#8c564b",
        InstanceClass::NearlyCompleteBipartite => "#e377c2",
    }
}

pub fn scatter_csv(points: &[InstancePoint]) -> String {
    let mut s = String::from("id,class,z1,z2\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{}", p.id, p.class.tag(), crate::format::sig9(p.z1), crate::format::sig9(p.z2));
    }
    s
}

pub fn scatter_svg(points: &[InstancePoint]) -> String {
    let (w, h, pad, legend) = (640.0, 480.0, 40.0, 200.0);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p.z1);
        x1 = x1.max(p.z1);
        y0 = y0.min(p.z2);
        y1 = y1.max(p.z2);
    }
    let sx = if x1 > x0 { (w - 2.0 * pad) / (x1 - x0) } else { 0.0 };
    let sy = if y1 > y0 { (h - 2.0 * pad) / (y1 - y0) } else { 0.0 };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{h}" viewBox="0 0 {} {h}">"#,
        w + legend,
        w + legend
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">Z1</text><text x="12" y="{}" font-size="12">Z2</text>"#,
        w / 2.0,
        h - 8.0,
        h / 2.0
    );
    for p in points {
        let cx = if sx > 0.0 { pad + (p.z1 - x0) * sx } else { w / 2.0 };
        let cy = if sy > 0.0 { h - pad - (p.z2 - y0) * sy } else { h / 2.0 };
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{}" fill-opacity="0.8"><title>{}</title></circle>"#,
            class_color(p.class),
            escape(&p.id)
        );
    }
    let mut present: Vec<InstanceClass> = points.iter().map(|p| p.class).collect();
    present.sort();
    present.dedup();
    for (i, c) in present.iter().enumerate() {
        let y = pad + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}" font-size="12">{}</text>"#,
            w + 10.0,
            y - 9.0,
            class_color(*c),
            w + 26.0,
            y,
            escape(c.display_name())
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<stem>.csv` and `<stem>.svg`; returns both paths.
pub fn export_scatter(points: &[InstancePoint], stem: &Path) -> Result<(PathBuf, PathBuf), ProjectionError> {
    if points.is_empty() {
        return Err(ProjectionError::NoPoints);
    }
    let csv_path = stem.with_extension("csv");
    let svg_path = stem.with_extension("svg");
    fs::write(&csv_path, scatter_csv(points))?;
    fs::write(&svg_path, scatter_svg(points))?;
    Ok((csv_path, svg_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors_recover_rows() {
        let spec = ProjectionSpec::<f64>::standard();
        for i in 0..10 {
            let mut x = vec![0.0; 10];
            x[i] = 1.0;
            let (z1, z2) = spec.project(&x).unwrap();
            assert_eq!([z1, z2], DEFAULT_MATRIX[i]);
        }
        assert_eq!(spec.project(&[0.0; 10]).unwrap(), (0.0, 0.0));
        assert!(spec.project(&[0.0; 9]).is_err());
    }

    #[test]
    fn f32_projection() {
        let spec = ProjectionSpec::<f32>::standard();
        let mut x = vec![0.0f32; 10];
        x[0] = 1.0;
        assert_eq!(spec.project(&x).unwrap(), (0.5051f32, -0.485f32));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let spec = ProjectionSpec::<f64>::standard();
        assert_eq!(ProjectionSpec::<f64>::from_json(&spec.to_json()).unwrap(), spec);
        let bad = r#"{"features":["radius","nope"],"matrix":[[1,0],[0,1]]}"#;
        assert!(matches!(ProjectionSpec::<f64>::from_json(bad), Err(ProjectionError::UnknownFeature(_))));
    }

    #[test]
    fn normalisation_moments() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 5.0], vec![3.0, 5.0], vec![5.0, 5.0]];
        let st = NormalizationStats::fit(&rows).unwrap();
        assert_eq!(st.mean, vec![3.0, 5.0]);
        assert!((st.std[0] - 2.0).abs() < 1e-12);
        assert!(st.is_constant(1));
        assert_eq!(st.normalize(&[3.0, 5.0]), vec![0.0, 0.0]);
        assert_eq!(st.normalize(&[1.0, 5.0]), vec![-1.0, 0.0]);
        assert!(NormalizationStats::<f64>::fit(&rows[..1]).is_err());
    }

    #[test]
    fn export_requires_points() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("scatter");
        assert!(matches!(export_scatter(&[], &stem), Err(ProjectionError::NoPoints)));
        assert!(!stem.with_extension("csv").exists());
        let points: Vec<_> = InstanceClass::ALL
            .iter()
            .enumerate()
            .map(|(i, &c)| InstancePoint { id: format!("i{i}"), class: c, z1: i as f64, z2: -(i as f64) })
            .collect();
        let (c, s) = export_scatter(&points, &stem).unwrap();
        assert_eq!(fs::read_to_string(c).unwrap().lines().count(), 8);
        let svg = fs::read_to_string(s).unwrap();
        for class in InstanceClass::ALL {
            assert!(svg.contains(class_color(class)));
        }
    }
}
