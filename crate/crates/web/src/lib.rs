//! Browser demo: degree-3 classification, the Frobenius series of one
//! generator, and the exception conic. Each entry point returns JSON text so
//! the page can stay plain JavaScript.

use polmod::exceptions::{classify, exception_equation, is_n_exception};
use polmod::frobenius::sym_json;
use polmod::{frobenius_series, hilbert_series, oracle_series, polarization_module, Generator, OracleKind, Q};
use serde_json::{json, Value};

/// Largest `n` and `ell` the page accepts; anything bigger stalls a browser tab.
pub const MAX_N: usize = 6;
pub const MAX_ELL: usize = 3;

fn parse_q(text: &str) -> Result<Q, String> {
    let t = text.trim();
    let (num, den) = t.split_once('/').unwrap_or((t, "1"));
    let num = num.trim().parse().map_err(|_| format!("'{t}' is not a rational number"))?;
    let den: num_bigint::BigInt = den.trim().parse().map_err(|_| format!("'{t}' is not a rational number"))?;
    if den == 0.into() {
        return Err(format!("'{t}' has a zero denominator"));
    }
    Ok(Q::new(num, den))
}

fn check_size(n: usize, ell: usize) -> Result<(), String> {
    if n == 0 || ell == 0 {
        return Err("n and ell must be at least 1".into());
    }
    if n > MAX_N || ell > MAX_ELL {
        return Err(format!("the demo is limited to n <= {MAX_N} and ell <= {MAX_ELL}"));
    }
    Ok(())
}

/// Class of `a m_3 + b m_21 + c m_111` in `n` variables, with the closed-form
/// series for that class.
pub fn classify_point(n: usize, a: &str, b: &str, c: &str) -> Result<Value, String> {
    check_size(n, 1)?;
    let abc = [parse_q(a)?, parse_q(b)?, parse_q(c)?];
    let tag = classify(3, &abc, n).map_err(|e| e.to_string())?;
    let exception = is_n_exception(&abc[0], &abc[1], &abc[2], n).map_err(|e| e.to_string())?;
    let series = oracle_series(OracleKind::Degree3(tag), n).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "point": abc.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "class": tag.as_str(),
        "exception": exception,
        "frobenius": series.pretty(),
    }))
}

/// Frobenius and Hilbert series of the module generated by one expression.
pub fn generator_series(generator: &str, n: usize, ell: usize) -> Result<Value, String> {
    check_size(n, ell)?;
    let g = Generator::parse(generator).map_err(|e| e.to_string())?;
    let family = g.family(ell, n).map_err(|e| e.to_string())?;
    if family.polys.iter().all(|f| f.is_zero()) {
        return Err(format!("{generator} is zero for n = {n}"));
    }
    let module = polarization_module(&family, ell, n).map_err(|e| e.to_string())?;
    let series = frobenius_series(&module).map_err(|e| e.to_string())?;
    let hilbert = hilbert_series(&module).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "ell": ell,
        "generator": generator,
        "frobenius": series.pretty(),
        "frobenius_h": series.pretty_h(),
        "hilbert": hilbert.to_string(),
        "hilbert_terms": sym_json(&hilbert),
        "dimension": module.dimension(),
    }))
}

/// The conic `12ab + 6(n−2)ac = 4(n−1)b²` in the chart `a = 1`, where it is
/// the parabola `c = (4(n−1)b² − 12b) / (6(n−2))`, sampled at `samples`
/// values of `b` in `[lo, hi]`.
pub fn exception_conic(n: usize, lo: f64, hi: f64, samples: usize) -> Result<Value, String> {
    if n < 3 {
        return Ok(json!({
            "n": n,
            "equation": "b=0",
            "coefficients": null,
            "points": [],
        }));
    }
    if n > 64 {
        return Err(format!("n = {n} is too large"));
    }
    let eq = exception_equation(n).map_err(|e| e.to_string())?;
    let k = n as f64;
    let steps = samples.max(2);
    let points: Vec<[f64; 2]> = (0..steps)
        .map(|i| {
            let b = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            [b, (4.0 * (k - 1.0) * b * b - 12.0 * b) / (6.0 * (k - 2.0))]
        })
        .collect();
    Ok(json!({
        "n": n,
        "equation": eq.to_string(),
        "coefficients": {"ab": 12, "ac": 6 * (n - 2), "bb": 4 * (n - 1)},
        // [1:3:6] lies on every conic but is never an exception.
        "excluded": [3, 6],
        "points": points,
    }))
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn wrap(r: Result<serde_json::Value, String>) -> Result<String, JsValue> {
        r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen(js_name = classifyPoint)]
    pub fn classify_point(n: usize, a: &str, b: &str, c: &str) -> Result<String, JsValue> {
        wrap(super::classify_point(n, a, b, c))
    }

    #[wasm_bindgen(js_name = generatorSeries)]
    pub fn generator_series(generator: &str, n: usize, ell: usize) -> Result<String, JsValue> {
        wrap(super::generator_series(generator, n, ell))
    }

    #[wasm_bindgen(js_name = exceptionConic)]
    pub fn exception_conic(n: usize, lo: f64, hi: f64, samples: usize) -> Result<String, JsValue> {
        wrap(super::exception_conic(n, lo, hi, samples))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_listed_points() {
        let v = classify_point(3, "2", "-3", "12").unwrap();
        assert_eq!(v["class"], "P3");
        assert_eq!(v["exception"], true);
        assert_eq!(classify_point(4, "1", "1", "1").unwrap()["class"], "H3");
        assert_eq!(classify_point(5, "1/2", "3/2", "3").unwrap()["class"], "P1_CUBED");
        assert!(classify_point(3, "0", "0", "0").is_err());
        assert!(classify_point(3, "1/0", "0", "0").is_err());
    }

    #[test]
    fn series_of_power_sum() {
        let v = generator_series("p[2]", 3, 2).unwrap();
        assert_eq!(v["frobenius"], "(1 + s[1] + s[2]) s[n] + s[1] s[n-1,1]");
        assert_eq!(v["dimension"], 10);
        assert!(generator_series("p[2]", 9, 2).is_err());
        assert!(generator_series("e[3]", 2, 1).is_err());
    }

    #[test]
    fn conic_samples_satisfy_the_equation() {
        let v = exception_conic(4, -2.0, 2.0, 5).unwrap();
        assert_eq!(v["equation"], "a(b+c)=b^2");
        for p in v["points"].as_array().unwrap() {
            let (b, c) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
            assert!((b + c - b * b).abs() < 1e-9);
        }
        assert_eq!(exception_conic(2, 0.0, 1.0, 3).unwrap()["equation"], "b=0");
    }
}
