//! Python bindings. Heavy calls release the GIL; structured results
//! (reports, crop plans, regions) come back as plain dicts and lists.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};
use serde_json::Value;

use faircrop_core::audit::synthetic::{synthetic_corpus as build_synthetic, SyntheticGroup, SyntheticParams};
use faircrop_core::audit::{
    confidence_interval as ci, demographic_parity_verdict, gaze_analysis, run_audit, AuditVariant, CiMethod,
    GazeAnalysisConfig, PairAuditConfig, VerticalAlign,
};
use faircrop_core::corpus::{decode_image, decode_image_bytes, encode_image, encode_image_bytes, load_manifest, ImageFormat};
use faircrop_core::crop::{self as crop_engine, AspectRatio, CropParams, CropStrategy};
use faircrop_core::saliency::pfm::{decode_pfm, encode_pfm, FloatGrid};
use faircrop_core::saliency::{
    is_horizontally_symmetric, max_salient_point, segment_salient_regions, top_k_salient_points,
};
use faircrop_core::{Point, Rgb};

create_exception!(faircrop, FaircropError, PyException);

fn err(e: faircrop_core::Error) -> PyErr {
    use faircrop_core::Error as E;
    match e {
        E::InvalidParameter(_) | E::DegenerateCrop { .. } => PyValueError::new_err(e.to_string()),
        other => FaircropError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serde_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| FaircropError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn parse_ar(s: &str) -> PyResult<AspectRatio> {
    s.parse().map_err(err)
}

fn parse_backend(s: &str) -> PyResult<faircrop_core::SaliencyBackend> {
    use faircrop_core::SaliencyBackend as B;
    match s {
        "spectral" => Ok(B::spectral()),
        "contrast" => Ok(B::contrast()),
        _ => match s.strip_prefix("external:") {
            Some(p) if !p.is_empty() => Ok(B::external(p)),
            _ => Err(PyValueError::new_err(format!(
                "unknown backend {s:?}; expected spectral, contrast or external:<path>"
            ))),
        },
    }
}

fn parse_strategy(name: &str, seed: u64, k: usize, focal: Option<(u32, u32)>, pad: (u8, u8, u8)) -> PyResult<CropStrategy> {
    Ok(match name {
        "argmax" => CropStrategy::Argmax,
        "sampling" => CropStrategy::Sampling { seed },
        "weighted" => CropStrategy::WeightedAverage,
        "topk" => CropStrategy::TopKAverage { k },
        "user" => {
            let (x, y) = focal.ok_or_else(|| PyValueError::new_err("strategy 'user' needs focal=(x, y)"))?;
            CropStrategy::UserFocal { point: Point::new(x, y) }
        }
        "pad" => CropStrategy::PadNoCrop {
            pad_color: Rgb([pad.0, pad.1, pad.2]),
        },
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown strategy {name:?}; expected argmax, sampling, weighted, topk, user or pad"
            )))
        }
    })
}

/// An RGB image.
#[pyclass(frozen, module = "faircrop")]
struct Image {
    inner: faircrop_core::ImageBuffer,
}

#[pymethods]
impl Image {
    #[staticmethod]
    fn open(path: PathBuf) -> PyResult<Image> {
        Ok(Image {
            inner: decode_image(&path).map_err(err)?,
        })
    }

    /// Decode PNG or JPEG bytes.
    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Image> {
        Ok(Image {
            inner: decode_image_bytes(data, std::path::Path::new("<bytes>")).map_err(err)?,
        })
    }

    /// Packed 8-bit RGB, row-major.
    #[staticmethod]
    fn from_rgb(width: u32, height: u32, data: Vec<u8>) -> PyResult<Image> {
        Ok(Image {
            inner: faircrop_core::ImageBuffer::new(width, height, data).map_err(err)?,
        })
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    fn rgb<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.inner.data())
    }

    fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> PyResult<Image> {
        Ok(Image {
            inner: self.inner.crop(x, y, w, h).map_err(err)?,
        })
    }

    fn png<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let bytes = encode_image_bytes(&self.inner, ImageFormat::Png).map_err(err)?;
        Ok(PyBytes::new(py, &bytes))
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        let format = ImageFormat::from_extension(&path).unwrap_or(ImageFormat::Png);
        encode_image(&self.inner, &path, format).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Image({}x{})", self.inner.width(), self.inner.height())
    }
}

/// Grid of saliency scores over an image.
#[pyclass(frozen, module = "faircrop")]
struct SaliencyMap {
    inner: faircrop_core::SaliencyMap,
}

#[pymethods]
impl SaliencyMap {
    #[new]
    #[pyo3(signature = (grid_w, grid_h, scores, source_w=None, source_h=None))]
    fn new(grid_w: u32, grid_h: u32, scores: Vec<f32>, source_w: Option<u32>, source_h: Option<u32>) -> PyResult<Self> {
        let inner = faircrop_core::SaliencyMap::new(
            grid_w,
            grid_h,
            scores,
            source_w.unwrap_or(grid_w),
            source_h.unwrap_or(grid_h),
        )
        .map_err(err)?;
        Ok(SaliencyMap { inner })
    }

    #[staticmethod]
    fn from_pfm(data: &[u8], source_w: u32, source_h: u32) -> PyResult<Self> {
        let inner = decode_pfm(data).and_then(|g| g.into_map(source_w, source_h)).map_err(err)?;
        Ok(SaliencyMap { inner })
    }

    fn pfm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &encode_pfm(&FloatGrid::from_map(&self.inner)))
    }

    #[getter]
    fn grid_w(&self) -> u32 {
        self.inner.grid_w()
    }

    #[getter]
    fn grid_h(&self) -> u32 {
        self.inner.grid_h()
    }

    #[getter]
    fn source_w(&self) -> u32 {
        self.inner.source_w()
    }

    #[getter]
    fn source_h(&self) -> u32 {
        self.inner.source_h()
    }

    /// Row-major scores.
    #[getter]
    fn scores(&self) -> Vec<f32> {
        self.inner.scores().to_vec()
    }

    /// `((x, y), score)` of the most salient cell centre.
    fn max_point(&self) -> ((u32, u32), f32) {
        let (p, s) = max_salient_point(&self.inner);
        ((p.x, p.y), s)
    }

    #[pyo3(signature = (k, min_sep=0.0))]
    fn top_k(&self, k: usize, min_sep: f64) -> Vec<((u32, u32), f32)> {
        top_k_salient_points(&self.inner, k, min_sep)
            .into_iter()
            .map(|(p, s)| ((p.x, p.y), s))
            .collect()
    }

    #[pyo3(signature = (tol=0.05))]
    fn is_symmetric(&self, tol: f64) -> bool {
        is_horizontally_symmetric(&self.inner, tol)
    }

    #[pyo3(signature = (threshold=0.3))]
    fn regions<'py>(&self, py: Python<'py>, threshold: f64) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &segment_salient_regions(&self.inner, threshold))
    }

    fn __repr__(&self) -> String {
        format!(
            "SaliencyMap({}x{} over {}x{})",
            self.inner.grid_w(),
            self.inner.grid_h(),
            self.inner.source_w(),
            self.inner.source_h()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (image, backend="spectral", grid_step=8))]
fn saliency(py: Python<'_>, image: &Image, backend: &str, grid_step: u32) -> PyResult<SaliencyMap> {
    let backend = parse_backend(backend)?;
    let img = &image.inner;
    let inner = py
        .detach(|| faircrop_core::saliency::compute_saliency(img, &backend, grid_step))
        .map_err(err)?;
    Ok(SaliencyMap { inner })
}

/// `(x, y, w, h)` of the one-dimension crop around a focal point.
#[pyfunction]
fn crop_around_focal(width: u32, height: u32, focal: (u32, u32), ar: &str) -> PyResult<(u32, u32, u32, u32)> {
    let r = crop_engine::crop_around_focal(width, height, Point::new(focal.0, focal.1), parse_ar(ar)?).map_err(err)?;
    Ok((r.x, r.y, r.w, r.h))
}

#[pyfunction]
fn center_crop(width: u32, height: u32, ar: &str) -> PyResult<(u32, u32, u32, u32)> {
    let r = crop_engine::center_crop(width, height, parse_ar(ar)?).map_err(err)?;
    Ok((r.x, r.y, r.w, r.h))
}

/// Plan crops for each ratio; returns `{"symmetric", "focal", "specs"}`.
#[pyfunction]
#[pyo3(signature = (map, ars, strategy="argmax", seed=0, k=3, focal=None, pad=(0, 0, 0)))]
#[allow(clippy::too_many_arguments)]
fn plan_crops<'py>(
    py: Python<'py>,
    map: &SaliencyMap,
    ars: Vec<String>,
    strategy: &str,
    seed: u64,
    k: usize,
    focal: Option<(u32, u32)>,
    pad: (u8, u8, u8),
) -> PyResult<Bound<'py, PyAny>> {
    let ars = ars.iter().map(|a| parse_ar(a)).collect::<PyResult<Vec<_>>>()?;
    let strategy = parse_strategy(strategy, seed, k, focal, pad)?;
    let plan = crop_engine::plan_crops(&map.inner, &strategy, &ars, &CropParams::default()).map_err(err)?;
    serde_to_py(py, &plan)
}

/// Saliency plus cropping in one call; returns one image per ratio.
#[pyfunction]
#[pyo3(signature = (image, ars, strategy="argmax", backend="spectral", grid_step=8, seed=0, k=3, focal=None, pad=(0, 0, 0)))]
#[allow(clippy::too_many_arguments)]
fn crop(
    py: Python<'_>,
    image: &Image,
    ars: Vec<String>,
    strategy: &str,
    backend: &str,
    grid_step: u32,
    seed: u64,
    k: usize,
    focal: Option<(u32, u32)>,
    pad: (u8, u8, u8),
) -> PyResult<Vec<Image>> {
    let ars = ars.iter().map(|a| parse_ar(a)).collect::<PyResult<Vec<_>>>()?;
    let strategy = parse_strategy(strategy, seed, k, focal, pad)?;
    let backend = parse_backend(backend)?;
    let params = CropParams {
        grid_step,
        ..CropParams::default()
    };
    let img = &image.inner;
    py.detach(|| {
        crop_engine::crop_pipeline(img, &backend, &strategy, &ars, &params)?
            .iter()
            .map(|spec| crop_engine::apply_crop(img, spec).map(|inner| Image { inner }))
            .collect::<faircrop_core::Result<Vec<_>>>()
    })
    .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p_hat, n, level=0.95, method="normal"))]
fn confidence_interval(p_hat: f64, n: usize, level: f64, method: &str) -> PyResult<(f64, f64)> {
    let method = match method {
        "normal" => CiMethod::Normal,
        "wilson" => CiMethod::Wilson,
        _ => return Err(PyValueError::new_err(format!("unknown interval method {method:?}"))),
    };
    ci(p_hat, n, level, method).map_err(err)
}

/// `(parity_ratio, disparate_impact)`.
#[pyfunction]
#[pyo3(signature = (p_favored, epsilon=0.2))]
fn parity(p_favored: f64, epsilon: f64) -> PyResult<(f64, bool)> {
    let v = demographic_parity_verdict(p_favored, epsilon).map_err(err)?;
    Ok((v.parity_ratio, v.disparate_impact))
}

/// A manifest with its images loaded.
#[pyclass(frozen, module = "faircrop")]
struct Corpus {
    inner: faircrop_core::corpus::Corpus,
}

#[pymethods]
impl Corpus {
    #[staticmethod]
    fn load(py: Python<'_>, manifest: PathBuf) -> PyResult<Corpus> {
        let inner = py
            .detach(|| {
                let m = load_manifest(&manifest).map_err(faircrop_core::Error::from)?;
                faircrop_core::corpus::Corpus::load(m)
            })
            .map_err(err)?;
        Ok(Corpus { inner })
    }

    #[getter]
    fn subgroups(&self) -> Vec<String> {
        self.inner.manifest().subgroups.iter().map(|g| g.id.clone()).collect()
    }

    fn members(&self, subgroup: &str) -> PyResult<Vec<String>> {
        Ok(self.inner.members(subgroup).map_err(err)?.to_vec())
    }

    fn image(&self, image_id: &str) -> PyResult<Image> {
        Ok(Image {
            inner: (**self.inner.image(image_id).map_err(err)?).clone(),
        })
    }

    fn __len__(&self) -> usize {
        self.inner.manifest().entries.len()
    }

    /// Pairwise demographic-parity audit. `variant` is `attach`,
    /// `scaled:<height>` or `noattach`; `keep_trials` adds per-trial records.
    #[pyo3(signature = (group_a, group_b, trials=10_000, variant="attach", backend="spectral", seed=0, grid_step=8, epsilon=0.2, ci_level=0.95, align="top", keep_trials=false))]
    #[allow(clippy::too_many_arguments)]
    fn audit<'py>(
        &self,
        py: Python<'py>,
        group_a: &str,
        group_b: &str,
        trials: usize,
        variant: &str,
        backend: &str,
        seed: u64,
        grid_step: u32,
        epsilon: f64,
        ci_level: f64,
        align: &str,
        keep_trials: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let variant = match variant {
            "attach" => AuditVariant::Attach,
            "noattach" => AuditVariant::NoAttachExhaustive,
            other => match other.strip_prefix("scaled:").and_then(|h| h.parse().ok()) {
                Some(height) => AuditVariant::AttachScaled { height },
                None => return Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
            },
        };
        let align = match align {
            "top" => VerticalAlign::Top,
            "center" => VerticalAlign::Center,
            "bottom" => VerticalAlign::Bottom,
            _ => return Err(PyValueError::new_err(format!("unknown alignment {align:?}"))),
        };
        let config = PairAuditConfig {
            n_trials: trials,
            seed,
            variant,
            backend: parse_backend(backend)?,
            grid_step,
            epsilon,
            ci_level,
            align,
            ..PairAuditConfig::new(group_a, group_b)
        };
        let corpus = &self.inner;
        let outcome = py.detach(|| run_audit(corpus, &config)).map_err(err)?;
        if keep_trials {
            serde_to_py(py, &outcome)
        } else {
            serde_to_py(py, &outcome.report)
        }
    }

    /// Off-head check of argmax crops. `config` keys match the CLI's gaze
    /// config file; missing keys take defaults.
    #[pyo3(signature = (config=None, backend="spectral"))]
    fn gaze<'py>(&self, py: Python<'py>, config: Option<&Bound<'py, PyDict>>, backend: &str) -> PyResult<Bound<'py, PyAny>> {
        let config: GazeAnalysisConfig = match config {
            None => GazeAnalysisConfig::default(),
            Some(d) => {
                let text: String = py.import("json")?.call_method1("dumps", (d,))?.extract()?;
                serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?
            }
        };
        let backend = parse_backend(backend)?;
        let corpus = &self.inner;
        let report = py.detach(|| gaze_analysis(corpus, &config, &backend)).map_err(err)?;
        serde_to_py(py, &report)
    }
}

/// Write a synthetic figure corpus to `out_dir`; returns the manifest path.
/// `groups` holds `(id, figure_luma, count)` tuples.
#[pyfunction]
#[pyo3(signature = (out_dir, groups, background=20, torso_luma=None, patch_luma=None, width=96, height=160, noise=4, seed=0))]
#[allow(clippy::too_many_arguments)]
fn synthetic_corpus(
    py: Python<'_>,
    out_dir: PathBuf,
    groups: Vec<(String, u8, usize)>,
    background: u8,
    torso_luma: Option<u8>,
    patch_luma: Option<u8>,
    width: u32,
    height: u32,
    noise: u8,
    seed: u64,
) -> PyResult<PathBuf> {
    let params = SyntheticParams {
        groups: groups.into_iter().map(|(id, luma, n)| SyntheticGroup::new(id, luma, n)).collect(),
        background_luma: background,
        torso_luma,
        patch_luma,
        width,
        height,
        noise,
        seed,
    };
    py.detach(|| build_synthetic(&params)?.write_to_dir(&out_dir)).map_err(err)
}

#[pymodule]
fn faircrop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FaircropError", m.py().get_type::<FaircropError>())?;
    m.add_class::<Image>()?;
    m.add_class::<SaliencyMap>()?;
    m.add_class::<Corpus>()?;
    m.add_function(wrap_pyfunction!(saliency, m)?)?;
    m.add_function(wrap_pyfunction!(crop_around_focal, m)?)?;
    m.add_function(wrap_pyfunction!(center_crop, m)?)?;
    m.add_function(wrap_pyfunction!(plan_crops, m)?)?;
    m.add_function(wrap_pyfunction!(crop, m)?)?;
    m.add_function(wrap_pyfunction!(confidence_interval, m)?)?;
    m.add_function(wrap_pyfunction!(parity, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_corpus, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
