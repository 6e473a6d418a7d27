use fractal_approx as fa;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn to_py(e: fa::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn poly_pairs(lam: &fa::LambdaVector) -> Vec<(f64, f64)> {
    lam.iter().map(|p| (p.c0, p.c1)).collect()
}

/// Interval partition `a = x_0 < ... < x_N = b`.
#[pyclass(name = "Partition", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPartition(fa::Partition);

#[pymethods]
impl PyPartition {
    #[new]
    #[pyo3(signature = (a, b, n=None, nodes=None))]
    fn new(a: f64, b: f64, n: Option<usize>, nodes: Option<Vec<f64>>) -> PyResult<Self> {
        let spec = match (n, nodes) {
            (Some(n), None) => fa::NodeSpec::Uniform(n),
            (None, Some(nodes)) => fa::NodeSpec::Explicit(nodes),
            _ => return Err(PyValueError::new_err("give exactly one of n or nodes")),
        };
        fa::Partition::new(a, b, spec).map(Self).map_err(to_py)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().to_vec()
    }

    #[getter]
    fn segments(&self) -> usize {
        self.0.segments()
    }

    fn segment_of(&self, x: f64) -> PyResult<usize> {
        self.0.segment_of(x).map_err(to_py)
    }

    /// `(slope, intercept)` of each map `u_l`.
    fn affine_maps(&self) -> Vec<(f64, f64)> {
        self.0
            .affine_maps()
            .iter()
            .map(|m| (m.slope, m.intercept))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Partition(nodes={:?})", self.0.nodes())
    }
}

#[pyclass(name = "ScaleVector", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScaleVector(fa::ScaleVector);

#[pymethods]
impl PyScaleVector {
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        fa::ScaleVector::new(values).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn constant(n: usize, s: f64) -> PyResult<Self> {
        fa::ScaleVector::constant(n, s).map(Self).map_err(to_py)
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.as_slice().to_vec()
    }

    #[getter]
    fn contraction(&self) -> f64 {
        self.0.contraction()
    }

    fn __repr__(&self) -> String {
        format!("ScaleVector({:?})", self.0.as_slice())
    }
}

/// Cardinal fractal interpolation basis on a partition.
#[pyclass(name = "CardinalBasis", frozen)]
struct PyCardinalBasis(fa::CardinalBasis);

#[pymethods]
impl PyCardinalBasis {
    #[new]
    fn new(partition: &PyPartition, scale: &PyScaleVector) -> PyResult<Self> {
        fa::cardinal_basis(&partition.0, &scale.0)
            .map(Self)
            .map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `λ^(k)` as `(c0, c1)` pairs, one list per basis function.
    #[getter]
    fn lambda_vectors(&self) -> Vec<Vec<(f64, f64)>> {
        self.0.lambda_vectors().iter().map(poly_pairs).collect()
    }

    fn combine(&self, alpha: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
        self.0
            .combine(&alpha)
            .map(|l| poly_pairs(&l))
            .map_err(to_py)
    }

    fn gram_matrix(&self) -> Vec<Vec<f64>> {
        fa::gram_matrix(&self.0).to_rows()
    }

    fn node_values(&self, alpha: Vec<f64>) -> PyResult<Vec<f64>> {
        let f = self.0.span_function(&alpha).map_err(to_py)?;
        Ok(f.node_values().to_vec())
    }

    fn continuity_residuals(&self, alpha: Vec<f64>) -> PyResult<Vec<f64>> {
        let f = self.0.span_function(&alpha).map_err(to_py)?;
        Ok(f.continuity_residuals())
    }

    /// Exact values of `Σ α_k φ_k` on the address grid.
    #[pyo3(signature = (alpha, depth=4, max_points=1 << 22))]
    fn sample(
        &self,
        py: Python<'_>,
        alpha: Vec<f64>,
        depth: usize,
        max_points: usize,
    ) -> PyResult<Vec<(f64, f64)>> {
        let f = self.0.span_function(&alpha).map_err(to_py)?;
        py.detach(|| f.sample(depth, max_points)).map_err(to_py)
    }

    /// `(value, error_bound)` of `Σ α_k φ_k` at `x`.
    #[pyo3(signature = (alpha, x, depth=20))]
    fn evaluate(&self, alpha: Vec<f64>, x: f64, depth: usize) -> PyResult<(f64, f64)> {
        let f = self.0.span_function(&alpha).map_err(to_py)?;
        let e = f
            .evaluate(x, &fa::EvalConfig::with_depth(depth))
            .map_err(to_py)?;
        Ok((e.value, e.error_bound))
    }
}

#[pyclass(name = "FitResult", frozen)]
struct PyFitResult(fa::FitResult);

#[pymethods]
impl PyFitResult {
    #[getter]
    fn alpha(&self) -> Vec<f64> {
        self.0.alpha.clone()
    }

    #[getter]
    fn collage_residual(&self) -> f64 {
        self.0.collage_residual
    }

    #[getter]
    fn contraction(&self) -> f64 {
        self.0.contraction
    }

    #[getter]
    fn collage_bound(&self) -> f64 {
        self.0.collage_bound
    }

    #[getter]
    fn measured_l2_error(&self) -> f64 {
        self.0.measured_l2_error
    }

    #[getter]
    fn max_node_jump(&self) -> f64 {
        self.0.max_node_jump
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.0.objective
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth
    }

    #[getter]
    fn lambda_vector(&self) -> Vec<(f64, f64)> {
        poly_pairs(&self.0.lambda)
    }

    /// `(x, target, approximation)` rows on the address grid.
    #[getter]
    fn samples(&self) -> Vec<(f64, f64, f64)> {
        self.0
            .samples
            .iter()
            .map(|p| (p.x, p.target, p.approx))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "FitResult(collage_residual={:e}, collage_bound={:e}, measured_l2_error={:e})",
            self.0.collage_residual, self.0.collage_bound, self.0.measured_l2_error
        )
    }
}

/// A builtin name (`"sin"`, `"poly:0,1"`, `"csv:path"`, ...) or a Python callable.
fn target_from(
    target: &Bound<'_, PyAny>,
    partition: &fa::Partition,
) -> PyResult<fa::TargetFunction> {
    if let Ok(spec) = target.extract::<String>() {
        let spec =
            fa::cli::TargetSpec::parse(&spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
        return fa::cli::load_target(&spec, partition.a(), partition.b())
            .map_err(|e| PyValueError::new_err(e.to_string()));
    }
    if !target.is_callable() {
        return Err(PyValueError::new_err(
            "target must be a builtin name or a callable",
        ));
    }
    let label = target
        .repr()
        .map(|r| r.to_string())
        .unwrap_or_else(|_| "<callable>".into());
    let func: Py<PyAny> = target.clone().unbind();
    Ok(fa::TargetFunction::new(label, move |x| {
        Python::attach(|py| {
            func.call1(py, (x,))
                .and_then(|v| v.extract::<f64>(py))
                .unwrap_or(f64::NAN)
        })
    }))
}

#[pyfunction]
#[pyo3(signature = (target, partition, scale, quad_panels=16, quad_points=5, depth=6))]
fn fit(
    py: Python<'_>,
    target: &Bound<'_, PyAny>,
    partition: &PyPartition,
    scale: &PyScaleVector,
    quad_panels: usize,
    quad_points: usize,
    depth: usize,
) -> PyResult<PyFitResult> {
    let f = target_from(target, &partition.0)?;
    let quad = fa::QuadConfig::new(quad_panels, quad_points).map_err(to_py)?;
    let eval = fa::EvalConfig::with_depth(depth);
    let (p, s) = (partition.0.clone(), scale.0.clone());
    py.detach(move || fa::fit(&f, &p, &s, &quad, &eval))
        .map(PyFitResult)
        .map_err(to_py)
}

/// Piecewise-linear L2 projection coefficients, for comparison at `s = 0`.
#[pyfunction]
fn hat_projection(
    py: Python<'_>,
    target: &Bound<'_, PyAny>,
    partition: &PyPartition,
) -> PyResult<Vec<f64>> {
    let f = target_from(target, &partition.0)?;
    let p = partition.0.clone();
    py.detach(move || fa::oracle::hat_projection(&f, &p, &fa::QuadConfig::default()))
        .map_err(to_py)
}

#[pyfunction]
fn lambda_for_data(
    partition: &PyPartition,
    scale: &PyScaleVector,
    y: Vec<f64>,
) -> PyResult<Vec<(f64, f64)>> {
    fa::lambda_for_data(&partition.0, &scale.0, &y)
        .map(|l| poly_pairs(&l))
        .map_err(to_py)
}

#[pymodule(name = "fractal_approx")]
fn fractal_approx_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyScaleVector>()?;
    m.add_class::<PyCardinalBasis>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(hat_projection, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_for_data, m)?)?;
    Ok(())
}
