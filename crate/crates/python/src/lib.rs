use pyo3::prelude::*;

#[pymodule]
fn freeflow_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
