//! JSON file formats for matrices, decompositions, pairs and reports.
//!
//! Floats are written with 17 significant digits (`%.17g` style with trailing
//! zeros removed), so every value reads back bit-exactly.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::decompose::{Decomposition, DecompositionPair};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix, PureState};

/// `{"dim": d, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix<f64>) -> Self {
        let part =
            |f: fn(&Complex64) -> f64| (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect()).collect();
        Self { dim: m.rows(), re: part(|z| z.re), im: part(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMatrix<f64>> {
        let d = self.dim;
        let shaped = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if d == 0 || !shaped(&self.re) || !shaped(&self.im) {
            return Err(Error::Parse(format!("matrix must have dim = {d} rows of {d} entries in both re and im")));
        }
        Ok(CMatrix::from_fn(d, d, |i, j| Complex64::new(self.re[i][j], self.im[i][j])))
    }

    pub fn to_density(&self) -> Result<DensityMatrix<f64>> {
        DensityMatrix::new(self.to_matrix()?)
    }
}

impl From<&DensityMatrix<f64>> for MatrixJson {
    fn from(rho: &DensityMatrix<f64>) -> Self {
        Self::from_matrix(rho.matrix())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// `{"dim": d, "weights": [...], "states": [{"re": [...], "im": [...]}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub states: Vec<StateJson>,
}

impl DecompositionJson {
    pub fn from_decomposition(d: &Decomposition<f64>) -> Self {
        let states = d
            .states()
            .iter()
            .map(|s| StateJson {
                re: s.amplitudes().iter().map(|z| z.re).collect(),
                im: s.amplitudes().iter().map(|z| z.im).collect(),
            })
            .collect();
        Self { dim: d.dim(), weights: d.weights().to_vec(), states }
    }

    fn parts(&self) -> Result<(Vec<f64>, Vec<PureState<f64>>)> {
        let states = self
            .states
            .iter()
            .map(|s| {
                if s.re.len() != self.dim || s.im.len() != self.dim {
                    return Err(Error::Parse(format!("state vectors must have {} entries", self.dim)));
                }
                PureState::new(s.re.iter().zip(&s.im).map(|(&re, &im)| Complex64::new(re, im)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((self.weights.clone(), states))
    }

    /// Validated decomposition of `target`, or of its own reconstruction when
    /// no target is given.
    pub fn to_decomposition(&self, target: Option<&DensityMatrix<f64>>) -> Result<Decomposition<f64>> {
        let (weights, states) = self.parts()?;
        match target {
            Some(t) => Decomposition::new(weights, states, t.clone()),
            None => Decomposition::from_elements(weights, states),
        }
    }

    /// Structural checks only; numerical defects are left for the certificate.
    pub fn to_decomposition_unchecked(&self, target: &DensityMatrix<f64>) -> Result<Decomposition<f64>> {
        let (weights, states) = self.parts()?;
        Decomposition::unchecked(weights, states, target.clone())
    }
}

/// A decomposition of `rho` (left) and one of `sigma` (right). The summary
/// statistics are informational and ignored when reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub left: DecompositionJson,
    pub right: DecompositionJson,
    pub rho: MatrixJson,
    pub sigma: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs_product: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_avg: Option<f64>,
}

impl PairJson {
    pub fn from_pair(p: &DecompositionPair<f64>) -> Self {
        Self {
            left: DecompositionJson::from_decomposition(&p.left),
            right: DecompositionJson::from_decomposition(&p.right),
            rho: p.left.target().into(),
            sigma: p.right.target().into(),
            hs_product: Some(p.hs_product),
            max_deviation: Some(p.max_deviation),
            delta_avg: Some(p.delta_avg),
        }
    }

    pub fn to_pair(&self) -> Result<DecompositionPair<f64>> {
        let (rho, sigma) = (self.rho.to_density()?, self.sigma.to_density()?);
        DecompositionPair::new(self.left.to_decomposition(Some(&rho))?, self.right.to_decomposition(Some(&sigma))?)
    }

    /// Pair with valid targets but otherwise unvalidated decompositions, for
    /// certificate checking.
    pub fn to_pair_unchecked(&self) -> Result<DecompositionPair<f64>> {
        let (rho, sigma) = (self.rho.to_density()?, self.sigma.to_density()?);
        DecompositionPair::new(
            self.left.to_decomposition_unchecked(&rho)?,
            self.right.to_decomposition_unchecked(&sigma)?,
        )
    }
}

/// `%.17g` with trailing zeros stripped; `null` for non-finite values.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        strip_zeros(format!("{:.*}", (16 - exp) as usize, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa.to_string()), exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Pretty-printing JSON formatter using [`format_f64`] for floats.
#[derive(Debug, Default)]
pub struct G17Formatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident $(($arg:ident: $ty:ty))?),* $(,)?) => {$(
        fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> std::io::Result<()> {
            self.0.$name(w $(, $arg)?)
        }
    )*};
}

impl Formatter for G17Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        self.write_f64(w, v as f64)
    }

    delegate!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        begin_object_value,
        end_object_value,
    );
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter::default());
    value.serialize(&mut ser).map_err(|e| Error::Parse(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_json_str(&text)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json_string(value)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_density(path: impl AsRef<Path>) -> Result<DensityMatrix<f64>> {
    read_json::<MatrixJson>(path)?.to_density()
}

pub fn read_pair(path: impl AsRef<Path>) -> Result<DecompositionPair<f64>> {
    read_json::<PairJson>(path)?.to_pair()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(0.5), "0.5");
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(-0.0), "-0.0");
        assert_eq!(format_f64(1.0), "1");
        assert_eq!(format_f64(0.1), "0.10000000000000001");
        assert_eq!(format_f64(0.5f64.sqrt()), "0.70710678118654757");
        assert_eq!(format_f64(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_f64(2.5e20), "2.5e+20");
        assert_eq!(format_f64(f64::NAN), "null");
        assert_eq!(format_f64(123456.0), "123456");
    }

    #[test]
    fn floats_round_trip() {
        let values = [0.1, 1.0 / 3.0, -2.0f64.sqrt(), 1e-300, 6.02e23, f64::MIN_POSITIVE, f64::MAX, -0.0, 5e-324];
        for v in values {
            let back: f64 = format_f64(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
            let json: f64 = from_json_str(&to_json_string(&v).unwrap()).unwrap();
            assert_eq!(json.to_bits(), v.to_bits(), "{v}");
        }
    }
}
