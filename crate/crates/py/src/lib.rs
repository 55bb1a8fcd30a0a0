//! Python bindings for the qroots library.
//!
//! Scalar operations return plain Python values; experiment reports come
//! back as dicts mirroring their JSON serialization. Build with
//! `cargo build -p qroots-py` and import the produced cdylib as `qroots_py`
//! (see python/smoke_test.py at the repository root).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use qroots::experiments as qx;
use qroots::lattice as ql;
use qroots::modular as qm;
use qroots::parametrize as qp;

fn err(e: qroots::Error) -> PyErr {
    match e {
        qroots::Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.unbind().into()
            } else {
                n.as_f64()
                    .unwrap_or(f64::NAN)
                    .into_pyobject(py)?
                    .unbind()
                    .into()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.unbind().into()
        }
    })
}

fn report_to_py<T: serde::Serialize>(py: Python<'_>, report: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(report)
        .map_err(|e| PyRuntimeError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &value)
}

// ---- exact modular arithmetic ----

#[pyfunction]
fn jacobi(n: i128, m: i128) -> PyResult<i32> {
    qm::jacobi(n, m).map_err(err)
}

#[pyfunction]
fn is_prime(n: i128) -> bool {
    qm::is_prime(n)
}

#[pyfunction]
fn factorize(n: i128) -> PyResult<Vec<(i128, u32)>> {
    Ok(qm::factorize(n).map_err(err)?.factors().to_vec())
}

#[pyfunction]
fn gpf(n: i128) -> PyResult<i128> {
    qm::gpf(n).map_err(err)
}

#[pyfunction]
fn sqrt_mod_p(n: i128, p: i128) -> PyResult<Vec<i128>> {
    Ok(qm::sqrt_mod_p(n, p).map_err(err)?.roots)
}

#[pyfunction]
fn roots_mod_prime_power(a: i128, h: i128, p: i128, j: u32) -> PyResult<Vec<i128>> {
    Ok(qm::roots_mod_prime_power(a, h, p, j).map_err(err)?.roots)
}

#[pyfunction]
fn roots_mod_k(a: i128, h: i128, k: i128) -> PyResult<Vec<i128>> {
    Ok(qm::roots_mod_k(a, h, k).map_err(err)?.roots)
}

#[pyfunction]
fn rho(a: i128, h: i128, k: i128) -> PyResult<i128> {
    qm::rho(a, h, k).map_err(err)
}

// ---- lattice operations ----

fn to_uni(g: (i128, i128, i128, i128)) -> PyResult<ql::UniMat> {
    ql::UniMat::new(g.0, g.1, g.2, g.3).map_err(err)
}

#[pyfunction]
fn act(gamma: (i128, i128, i128, i128), g: (i128, i128, i128)) -> PyResult<(i128, i128, i128)> {
    let m = ql::act(&to_uni(gamma)?, &ql::SymMat::new(g.0, g.1, g.2)).map_err(err)?;
    Ok((m.a, m.b, m.c))
}

#[pyfunction]
fn c_transform(tau: (i128, i128, i128, i128), g: (i128, i128, i128)) -> PyResult<i128> {
    ql::c_transform(&to_uni(tau)?, &ql::SymMat::new(g.0, g.1, g.2)).map_err(err)
}

#[pyfunction]
#[allow(clippy::type_complexity)]
fn reduce(g: (i128, i128, i128)) -> PyResult<((i128, i128, i128, u8), (i128, i128, i128, i128))> {
    let (pt, t) = ql::reduce(&ql::SymMat::new(g.0, g.1, g.2)).map_err(err)?;
    Ok((
        (pt.sym.a, pt.sym.b, pt.sym.c, pt.stab_order),
        (t.a, t.b, t.c, t.d),
    ))
}

#[pyfunction]
fn heegner_points(h: i128) -> PyResult<Vec<(i128, i128, i128, u8)>> {
    Ok(ql::heegner_points(h)
        .map_err(err)?
        .into_iter()
        .map(|p| (p.sym.a, p.sym.b, p.sym.c, p.stab_order))
        .collect())
}

#[pyfunction]
fn coset_reps(q: i128) -> PyResult<Vec<(i128, i128, i128, i128)>> {
    Ok(ql::coset_reps(q)
        .map_err(err)?
        .into_iter()
        .map(|m| (m.a, m.b, m.c, m.d))
        .collect())
}

#[pyfunction]
fn u_invariant(w: (f64, f64), z: (f64, f64)) -> PyResult<f64> {
    let w = ql::UpperHalfPoint::new(w.0, w.1).map_err(err)?;
    let z = ql::UpperHalfPoint::new(z.0, z.1).map_err(err)?;
    Ok(ql::u_invariant(&w, &z))
}

#[pyfunction]
fn u_skewed(g: (f64, f64, f64, f64), r: f64) -> f64 {
    ql::u_skewed(
        &ql::RealMat {
            a: g.0,
            b: g.1,
            c: g.2,
            d: g.3,
        },
        r,
    )
}

// ---- parametrizations ----

#[pyfunction]
fn enumerate_s(a: i128, h: i128, d: i128, bound: i128) -> PyResult<Vec<(i128, i128, i128)>> {
    Ok(qp::enumerate_s(a, h, d, bound)
        .map_err(err)?
        .into_iter()
        .map(|m| (m.a, m.b, m.c))
        .collect())
}

#[pyfunction]
fn hecke_orbits(h: i128) -> PyResult<Vec<(i128, i128, i128)>> {
    Ok(qp::hecke_orbits(h)
        .map_err(err)?
        .into_iter()
        .map(|o| (o.e, o.f, o.g))
        .collect())
}

#[pyfunction]
fn hecke_apply(py: Python<'_>, h: i128, f: Py<PyAny>, g: (f64, f64, f64, f64)) -> PyResult<f64> {
    let failure: std::cell::RefCell<Option<PyErr>> = std::cell::RefCell::new(None);
    let value = qp::hecke_apply(
        h,
        |m: &ql::RealMat| {
            let call = f
                .call1(py, ((m.a, m.b, m.c, m.d),))
                .and_then(|v| v.extract::<f64>(py));
            match call {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        &ql::RealMat {
            a: g.0,
            b: g.1,
            c: g.2,
            d: g.3,
        },
    )
    .map_err(err)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

#[pyfunction]
#[allow(clippy::type_complexity)]
fn cube_decompose(
    g: (i128, i128, i128),
    h: i128,
    y: i128,
    a: i128,
    d: i128,
) -> PyResult<((i128, i128, i128), (i128, i128, i128))> {
    let (sigma, base) =
        qp::cube_decompose(&ql::SymMat::new(g.0, g.1, g.2), h, y, a, d).map_err(err)?;
    Ok(((sigma.e, sigma.f, sigma.g), (base.a, base.b, base.c)))
}

#[pyfunction]
fn verify_para1(py: Python<'_>, a: i128, h: i128, d: i128, bound: i128) -> PyResult<Py<PyAny>> {
    let mut v = serde_json::to_value(qp::verify_para1(a, h, d, bound).map_err(err)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    annotate_pass(&mut v);
    json_to_py(py, &v)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn verify_para2(
    py: Python<'_>,
    a: i128,
    h: i128,
    s: i128,
    n1: i128,
    n2: i128,
    bound: i128,
) -> PyResult<Py<PyAny>> {
    let mut v = serde_json::to_value(qp::verify_para2(a, h, s, n1, n2, bound).map_err(err)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    annotate_pass(&mut v);
    json_to_py(py, &v)
}

#[pyfunction]
fn verify_para3(
    py: Python<'_>,
    a: i128,
    h: i128,
    y: i128,
    d: i128,
    bound: i128,
) -> PyResult<Py<PyAny>> {
    let mut v = serde_json::to_value(qp::verify_para3(a, h, y, d, bound).map_err(err)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    annotate_pass(&mut v);
    json_to_py(py, &v)
}

fn annotate_pass(v: &mut serde_json::Value) {
    if let serde_json::Value::Object(map) = v {
        let pass = map["misses"].as_array().is_some_and(|m| m.is_empty())
            && map["double_hits"].as_array().is_some_and(|m| m.is_empty());
        map.insert("passes".to_string(), serde_json::Value::Bool(pass));
    }
}

// ---- experiments ----

#[pyfunction]
fn bump_eval(lo: f64, hi: f64, delta: f64, x: f64) -> PyResult<f64> {
    Ok(qx::BumpFn::new(lo, hi, delta).map_err(err)?.eval(x))
}

#[pyfunction]
fn bump_integral(lo: f64, hi: f64, delta: f64) -> PyResult<f64> {
    Ok(qx::BumpFn::new(lo, hi, delta).map_err(err)?.integral())
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn type1(
    py: Python<'_>,
    x: i64,
    k: i64,
    d: i64,
    a: i128,
    h: i128,
    theta: f64,
) -> PyResult<Py<PyAny>> {
    let psi1 = qx::BumpFn::new(1.0, 2.0, 1.0).map_err(err)?;
    let psi2 = qx::BumpFn::new(-1.0, 1.0, 1.0).map_err(err)?;
    let theta = qx::Theta::new(theta).map_err(err)?;
    report_to_py(
        py,
        &qx::type1(x, k, d, a, h, &psi1, &psi2, theta).map_err(err)?,
    )
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn type2(
    py: Python<'_>,
    x: i64,
    m: i64,
    n: i64,
    a: i128,
    h: i128,
    theta: f64,
    mobius_alpha: bool,
) -> PyResult<Py<PyAny>> {
    let psi = qx::BumpFn::new(-1.0, 1.0, 1.0).map_err(err)?;
    let theta = qx::Theta::new(theta).map_err(err)?;
    let alpha: Box<dyn Fn(i64) -> f64 + Sync> = if mobius_alpha {
        Box::new(|m: i64| qm::mobius(m as i128).unwrap_or(0) as f64)
    } else {
        Box::new(|_| 1.0)
    };
    let beta = |n: i64| {
        if qm::is_squarefree(n as i128).unwrap_or(false) {
            1.0
        } else {
            0.0
        }
    };
    report_to_py(
        py,
        &qx::type2(x, m, n, a, h, &*alpha, &beta, &psi, theta).map_err(err)?,
    )
}

#[pyfunction]
fn equidist(
    py: Python<'_>,
    x: u64,
    a: i128,
    h: i128,
    intervals: Vec<(f64, f64)>,
) -> PyResult<Py<PyAny>> {
    report_to_py(py, &qx::equidist(x, a, h, &intervals).map_err(err)?)
}

#[pyfunction]
fn weyl_sum(x: u64, a: i128, h: i128, m: i64) -> PyResult<(f64, f64, u64)> {
    let w = qx::weyl_sum(x, a, h, m).map_err(err)?;
    Ok((w.re, w.im, w.terms))
}

#[pyfunction]
fn hypothesis_sum(a: i128, h: i128, y: u64, z: u64) -> PyResult<(f64, u64)> {
    let s = qx::hypothesis_sum(a, h, y, z).map_err(err)?;
    Ok((s.sum, s.primes))
}

#[pyfunction]
fn hypothesis_bound(y: u64, z: u64, eps: f64) -> PyResult<f64> {
    qx::hypothesis_bound(y, z, eps).map_err(err)
}

#[pyfunction]
fn gpf_scan(py: Python<'_>, x: u64, a: i128, h: i128) -> PyResult<Py<PyAny>> {
    report_to_py(py, &qx::gpf_scan(x, a, h).map_err(err)?)
}

#[pyfunction]
fn chebyshev_identity(py: Python<'_>, x: u64, a: i128, h: i128) -> PyResult<Py<PyAny>> {
    report_to_py(py, &qx::chebyshev_identity(x, a, h).map_err(err)?)
}

#[pyfunction]
fn kernel_heegner(py: Python<'_>, q_lo: u64, q_hi: u64, h: i128, z: f64) -> PyResult<Py<PyAny>> {
    report_to_py(py, &qx::kernel_heegner(q_lo, q_hi, h, z).map_err(err)?)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn kernel_lowertriang(
    py: Python<'_>,
    d: i64,
    n0: i64,
    n1: i64,
    n2: i64,
    t: i64,
    v: i64,
    z: f64,
    r: f64,
) -> PyResult<Py<PyAny>> {
    let p = qx::LowerTriangParams {
        d_min: d,
        n0_max: n0,
        n1_max: n1,
        n2_max: n2,
        t_max: t,
        v_max: v,
        z,
        r,
    };
    report_to_py(py, &qx::kernel_lowertriang(&p).map_err(err)?)
}

#[pyfunction]
fn rho_cubic(a: i128, b: i128, y: i128, d: i128) -> PyResult<i128> {
    qx::rho_cubic(a, b, y, d).map_err(err)
}

#[pyfunction]
fn rho_cubic_complete_sum(a: i128, b: i128, d: i128) -> PyResult<i64> {
    qx::rho_cubic_complete_sum(a, b, d).map_err(err)
}

#[pyfunction]
fn ypoisson_check(
    py: Python<'_>,
    a: i128,
    b: i128,
    d: i128,
    big_b: i64,
    delta: f64,
) -> PyResult<Py<PyAny>> {
    let f2 = qx::BumpFn::new(1.0, 1.0 + delta, delta).map_err(err)?;
    report_to_py(py, &qx::ypoisson_check(a, b, d, big_b, &f2).map_err(err)?)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn x2y3_type_i2(
    py: Python<'_>,
    x: i64,
    k: i64,
    dmax: i64,
    a: i128,
    b: i128,
    big_a: i64,
    big_b: i64,
    delta: f64,
) -> PyResult<Py<PyAny>> {
    let f = qx::BumpFn::new(1.0, 1.0 + delta, delta).map_err(err)?;
    let p = qx::CubicDivisorParams {
        x,
        k_scale: k,
        d_max: dmax,
        a,
        b,
        big_a,
        big_b,
    };
    report_to_py(py, &qx::x2y3_type_i2(&p, &f, &f, &f).map_err(err)?)
}

#[pymodule]
fn qroots_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(gpf, m)?)?;
    m.add_function(wrap_pyfunction!(sqrt_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(roots_mod_prime_power, m)?)?;
    m.add_function(wrap_pyfunction!(roots_mod_k, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(act, m)?)?;
    m.add_function(wrap_pyfunction!(c_transform, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(heegner_points, m)?)?;
    m.add_function(wrap_pyfunction!(coset_reps, m)?)?;
    m.add_function(wrap_pyfunction!(u_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(u_skewed, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_s, m)?)?;
    m.add_function(wrap_pyfunction!(hecke_orbits, m)?)?;
    m.add_function(wrap_pyfunction!(hecke_apply, m)?)?;
    m.add_function(wrap_pyfunction!(cube_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(verify_para1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_para2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_para3, m)?)?;
    m.add_function(wrap_pyfunction!(bump_eval, m)?)?;
    m.add_function(wrap_pyfunction!(bump_integral, m)?)?;
    m.add_function(wrap_pyfunction!(type1, m)?)?;
    m.add_function(wrap_pyfunction!(type2, m)?)?;
    m.add_function(wrap_pyfunction!(equidist, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_sum, m)?)?;
    m.add_function(wrap_pyfunction!(hypothesis_sum, m)?)?;
    m.add_function(wrap_pyfunction!(hypothesis_bound, m)?)?;
    m.add_function(wrap_pyfunction!(gpf_scan, m)?)?;
    m.add_function(wrap_pyfunction!(chebyshev_identity, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_heegner, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_lowertriang, m)?)?;
    m.add_function(wrap_pyfunction!(rho_cubic, m)?)?;
    m.add_function(wrap_pyfunction!(rho_cubic_complete_sum, m)?)?;
    m.add_function(wrap_pyfunction!(ypoisson_check, m)?)?;
    m.add_function(wrap_pyfunction!(x2y3_type_i2, m)?)?;
    Ok(())
}
