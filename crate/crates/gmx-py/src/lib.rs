//! Python module `gmx`: matrices, models, cycle census, extraction,
//! decoding and BER simulation from gmx-core.

use gmx_core::bounds::model_bounds;
use gmx_core::cycles::{census, census_matrix};
use gmx_core::decode::{map_oracle, ChannelObservation, FloodDecoder};
use gmx_core::extract::{alg1_reduce_tanner, alg3_extract_gtg, alg4_extract_gm, n4, visible_labels};
use gmx_core::gf2::alist::{read_alist, write_alist};
use gmx_core::gmf::{read_gmf, write_gmf};
use gmx_core::model::{build_gtg, tanner_graph, DEFAULT_DIM_CAP};
use gmx_core::sim::{ber_sim, StopRule};
use gmx_core::{fixtures, report, BinaryMatrix, GraphicalModel, LinearCode};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(gmx, GmxError, PyException);
create_exception!(gmx, CapExceeded, GmxError);

fn err(e: gmx_core::Error) -> PyErr {
    if e.is_cap() {
        CapExceeded::new_err(e.to_string())
    } else {
        GmxError::new_err(e.to_string())
    }
}

/// Binary matrix over GF(2).
#[pyclass(name = "Matrix", module = "gmx", skip_from_py_object)]
#[derive(Clone)]
struct PyMatrix {
    inner: BinaryMatrix,
}

#[pymethods]
impl PyMatrix {
    /// Build from rows of '0'/'1' strings.
    #[new]
    fn new(rows: Vec<String>) -> PyResult<Self> {
        let r: Vec<&str> = rows.iter().map(String::as_str).collect();
        Ok(PyMatrix {
            inner: BinaryMatrix::from_strs(&r).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_alist(text: &str) -> PyResult<Self> {
        Ok(PyMatrix {
            inner: read_alist(text).map_err(err)?,
        })
    }

    fn to_alist(&self) -> String {
        write_alist(&self.inner)
    }

    fn to_rows(&self) -> Vec<String> {
        self.inner.to_strings()
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Number of 4-cycles in the Tanner graph.
    fn n4(&self) -> u64 {
        n4(&self.inner)
    }

    /// `girth,N_g,N_g+2[,N_g+4]` of the Tanner graph.
    #[pyo3(signature = (max_len=8))]
    fn census(&self, max_len: usize) -> PyResult<String> {
        Ok(census_matrix(&self.inner, max_len).map_err(err)?.csv_row())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// Normal graphical model.
#[pyclass(name = "Model", module = "gmx", skip_from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: GraphicalModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn from_gmf(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: read_gmf(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn tanner_graph(h: &PyMatrix) -> PyResult<Self> {
        Ok(PyModel {
            inner: tanner_graph(&h.inner, None).map_err(err)?,
        })
    }

    fn to_gmf(&self) -> String {
        write_gmf(&self.inner)
    }

    #[getter]
    fn visibles(&self) -> Vec<String> {
        self.inner.visibles().to_vec()
    }

    #[getter]
    fn num_constraints(&self) -> usize {
        self.inner.constraints().len()
    }

    #[getter]
    fn num_hidden(&self) -> usize {
        self.inner.hiddens().len()
    }

    /// Least m for which the model is q^m-ary.
    fn qm(&self) -> usize {
        self.inner.qm_report().m
    }

    fn verify_qm(&self, m: usize) -> bool {
        self.inner.verify_qm(m)
    }

    fn is_cycle_free(&self) -> bool {
        self.inner.topology().cycle_free
    }

    /// `(n, k)` of the realized code.
    #[pyo3(signature = (dim_cap=DEFAULT_DIM_CAP))]
    fn code_params(&self, dim_cap: usize) -> PyResult<(usize, usize)> {
        let c = self.inner.realized_code(dim_cap).map_err(err)?;
        Ok((c.n(), c.k()))
    }

    /// Whether the realized code is the null space of `h`.
    #[pyo3(signature = (h, dim_cap=DEFAULT_DIM_CAP))]
    fn realizes(&self, h: &PyMatrix, dim_cap: usize) -> PyResult<bool> {
        let c = self.inner.realized_code(dim_cap).map_err(err)?;
        Ok(c == LinearCode::from_parity_check(c.labels().to_vec(), &h.inner).map_err(err)?)
    }

    #[pyo3(signature = (max_len=8))]
    fn census(&self, max_len: usize) -> PyResult<String> {
        Ok(census(&self.inner, max_len).map_err(err)?.csv_row())
    }

    /// Cut-set bound report as key=value lines.
    #[pyo3(signature = (t_lower=None, r=None))]
    fn bounds(&self, t_lower: Option<usize>, r: Option<usize>) -> PyResult<String> {
        let mut rep = model_bounds(&self.inner, t_lower).map_err(err)?;
        if let Some(r) = r {
            rep = rep.with_root(r);
        }
        Ok(rep.to_string())
    }

    /// Flooding decoder: `(hard decisions, posterior llrs)`.
    #[pyo3(signature = (llrs, iterations=50))]
    fn decode(&self, llrs: Vec<f64>, iterations: usize) -> PyResult<(Vec<u8>, Vec<f64>)> {
        let d = FloodDecoder::new(&self.inner)
            .and_then(|f| f.decode(&llrs, iterations))
            .map_err(err)?;
        Ok((d.hard, d.llrs))
    }

    /// BER sweep; one `(snr_db, bits, bit_errors, frames, frame_errors)`
    /// tuple per point.
    #[pyo3(signature = (snrs, iterations=50, min_errors=100, max_bits=1_000_000, seed=0))]
    fn ber(
        &self,
        py: Python<'_>,
        snrs: Vec<f64>,
        iterations: usize,
        min_errors: u64,
        max_bits: u64,
        seed: u64,
    ) -> PyResult<Vec<(f64, u64, u64, u64, u64)>> {
        let stop = StopRule {
            min_bit_errors: min_errors,
            max_bits,
        };
        let gm = self.inner.clone();
        let recs = py.detach(move || ber_sim(&gm, &snrs, stop, iterations, seed)).map_err(err)?;
        Ok(recs
            .into_iter()
            .map(|r| (r.snr_db, r.bits, r.bit_errors, r.frames, r.frame_errors))
            .collect())
    }

    fn __repr__(&self) -> String {
        let t = self.inner.topology();
        format!("Model(visibles={}, constraints={}, edges={})", self.inner.visibles().len(), t.vertices, t.edges)
    }
}

#[pyfunction]
fn fixture(name: &str) -> PyResult<PyMatrix> {
    Ok(PyMatrix {
        inner: fixtures::fixture(name).map_err(err)?.h,
    })
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::FIXTURE_NAMES.to_vec()
}

/// Row-operation search: `(H', trace text)`.
#[pyfunction]
fn extract_tg(h: &PyMatrix) -> PyResult<(PyMatrix, String)> {
    let (h1, t) = alg1_reduce_tanner(&h.inner).map_err(err)?;
    Ok((PyMatrix { inner: h1 }, t.to_text()))
}

/// Partial-parity insertion: `(H_ext, ext-meta text, trace text, GTG model)`.
#[pyfunction]
fn extract_gtg(h: &PyMatrix) -> PyResult<(PyMatrix, String, String, PyModel)> {
    let (hx, ext, t) = alg3_extract_gtg(&h.inner).map_err(err)?;
    let gtg = build_gtg(&ext, &hx).map_err(err)?;
    Ok((PyMatrix { inner: hx }, ext.write_meta(), t.to_text(), PyModel { inner: gtg }))
}

/// Constraint merging under a q^m-ary bound: `(model, trace text)`.
#[pyfunction]
fn extract_gm(tg: &PyModel, max_m: usize) -> PyResult<(PyModel, String)> {
    let (gm, t) = alg4_extract_gm(&tg.inner, max_m).map_err(err)?;
    Ok((PyModel { inner: gm }, t.to_text()))
}

/// Exact bitwise posterior llrs of the null space of `h`.
#[pyfunction]
fn map_llrs(h: &PyMatrix, llrs: Vec<f64>) -> PyResult<Vec<f64>> {
    let code = LinearCode::from_parity_check(visible_labels(h.inner.cols()), &h.inner).map_err(err)?;
    map_oracle(&code, &ChannelObservation::new(llrs)).map_err(err)
}

/// Extension degree row as CSV, against the published values.
#[pyfunction]
fn table1_row(code: &str) -> PyResult<String> {
    Ok(report::degree_row(code).map_err(err)?.csv())
}

#[pymodule]
fn gmx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("GmxError", m.py().get_type::<GmxError>())?;
    m.add("CapExceeded", m.py().get_type::<CapExceeded>())?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(extract_tg, m)?)?;
    m.add_function(wrap_pyfunction!(extract_gtg, m)?)?;
    m.add_function(wrap_pyfunction!(extract_gm, m)?)?;
    m.add_function(wrap_pyfunction!(map_llrs, m)?)?;
    m.add_function(wrap_pyfunction!(table1_row, m)?)?;
    Ok(())
}
