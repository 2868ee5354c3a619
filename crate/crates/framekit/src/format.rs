//! Versioned JSON interchange for frame systems. JSON is canonical; CSV
//! emitters live in the report module.

use std::fs;
use std::path::Path;

use framekit_core::{FrameSystem, GeometryKind, KernelDiagonal, PointGeometry};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryFile {
    EuclideanBox {
        origin: Vec<f64>,
        side_lengths: Vec<f64>,
        periodic: bool,
        point_measure: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        kernel_diagonal: Option<KernelFile>,
    },
    CyclicTorus {
        modulus: usize,
        point_measure: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        kernel_diagonal: Option<KernelFile>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelFile {
    Constant { value: f64 },
    PerElement { values: Vec<f64> },
}

/// On-disk frame system. Vectors are entry lists of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub version: u32,
    pub ambient_dim: usize,
    pub geometry: GeometryFile,
    pub vectors: Vec<Vec<[f64; 2]>>,
    pub index_points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug)]
pub enum FormatError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Schema(String),
    Core(framekit_core::FrameError),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Io(e) => write!(f, "io error: {e}"),
            FormatError::Json(e) => write!(f, "json error: {e}"),
            FormatError::Schema(m) => write!(f, "schema error: {m}"),
            FormatError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<std::io::Error> for FormatError {
    fn from(e: std::io::Error) -> Self {
        FormatError::Io(e)
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

impl From<framekit_core::FrameError> for FormatError {
    fn from(e: framekit_core::FrameError) -> Self {
        FormatError::Core(e)
    }
}

fn kernel_to_file(k: &KernelDiagonal) -> KernelFile {
    match k {
        KernelDiagonal::Constant(v) => KernelFile::Constant { value: *v },
        KernelDiagonal::PerElement(v) => KernelFile::PerElement { values: v.clone() },
    }
}

fn kernel_from_file(k: &KernelFile) -> KernelDiagonal {
    match k {
        KernelFile::Constant { value } => KernelDiagonal::Constant(*value),
        KernelFile::PerElement { values } => KernelDiagonal::PerElement(values.clone()),
    }
}

pub fn geometry_to_file(g: &PointGeometry) -> GeometryFile {
    match &g.kind {
        GeometryKind::EuclideanBox { origin, side_lengths, periodic } => {
            GeometryFile::EuclideanBox {
                origin: origin.clone(),
                side_lengths: side_lengths.clone(),
                periodic: *periodic,
                point_measure: g.point_measure,
                kernel_diagonal: g.kernel_diagonal.as_ref().map(kernel_to_file),
            }
        }
        GeometryKind::CyclicTorus { modulus } => GeometryFile::CyclicTorus {
            modulus: *modulus,
            point_measure: g.point_measure,
            kernel_diagonal: g.kernel_diagonal.as_ref().map(kernel_to_file),
        },
    }
}

pub fn geometry_from_file(g: &GeometryFile) -> Result<PointGeometry, FormatError> {
    let geom = match g {
        GeometryFile::EuclideanBox {
            origin,
            side_lengths,
            periodic,
            point_measure,
            kernel_diagonal,
        } => {
            let mut geom =
                PointGeometry::euclidean_box(origin.clone(), side_lengths.clone(), *periodic)?
                    .with_point_measure(*point_measure);
            if let Some(k) = kernel_diagonal {
                geom = geom.with_kernel_diagonal(kernel_from_file(k));
            }
            geom
        }
        GeometryFile::CyclicTorus { modulus, point_measure, kernel_diagonal } => {
            let mut geom =
                PointGeometry::cyclic_torus(*modulus)?.with_point_measure(*point_measure);
            if let Some(k) = kernel_diagonal {
                geom = geom.with_kernel_diagonal(kernel_from_file(k));
            }
            geom
        }
    };
    geom.validate_kernel()?;
    Ok(geom)
}

pub fn system_to_file(f: &FrameSystem) -> SystemFile {
    SystemFile {
        version: SCHEMA_VERSION,
        ambient_dim: f.ambient_dim(),
        geometry: geometry_to_file(f.geometry()),
        vectors: f
            .vectors()
            .iter()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
        index_points: f.index_points().to_vec(),
        labels: f.labels().map(|l| l.to_vec()),
    }
}

pub fn system_from_file(file: &SystemFile) -> Result<FrameSystem, FormatError> {
    if file.version != SCHEMA_VERSION {
        return Err(FormatError::Schema(format!(
            "unsupported schema version {} (expected {})",
            file.version, SCHEMA_VERSION
        )));
    }
    let geometry = geometry_from_file(&file.geometry)?;
    let vectors: Vec<Vec<Complex64>> = file
        .vectors
        .iter()
        .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    Ok(FrameSystem::new(
        file.ambient_dim,
        vectors,
        file.index_points.clone(),
        geometry,
        file.labels.clone(),
    )?)
}

pub fn save_system(f: &FrameSystem, path: &Path) -> Result<(), FormatError> {
    let file = system_to_file(f);
    let json = serde_json::to_string_pretty(&file)?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_system(path: &Path) -> Result<FrameSystem, FormatError> {
    let text = fs::read_to_string(path)?;
    let file: SystemFile = serde_json::from_str(&text)?;
    system_from_file(&file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use framekit_core::{frame_bounds, gabor_system, GaborSpec};

    #[test]
    fn roundtrip_preserves_bounds_exactly() {
        let f = gabor_system(&GaborSpec::gaussian_full(6).unwrap()).unwrap();
        let file = system_to_file(&f);
        let json = serde_json::to_string(&file).unwrap();
        let back: SystemFile = serde_json::from_str(&json).unwrap();
        let g = system_from_file(&back).unwrap();
        let b0 = frame_bounds(&f).unwrap();
        let b1 = frame_bounds(&g).unwrap();
        // Bit-exact: serde_json round-trips f64 losslessly.
        assert_eq!(b0.lower.to_bits(), b1.lower.to_bits());
        assert_eq!(b0.upper.to_bits(), b1.upper.to_bits());
    }

    #[test]
    fn version_mismatch_rejected() {
        let f = gabor_system(&GaborSpec::gaussian_full(4).unwrap()).unwrap();
        let mut file = system_to_file(&f);
        file.version = 99;
        assert!(matches!(system_from_file(&file), Err(FormatError::Schema(_))));
    }
}
