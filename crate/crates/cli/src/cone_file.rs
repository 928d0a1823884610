//! Cone description files.
//!
//! A file is one JSON object whose `"type"` selects the remaining fields:
//!
//! | type       | fields                                                      |
//! |------------|-------------------------------------------------------------|
//! | `circular` | `rho`                                                       |
//! | `star`     | `fourier` or `samples`, optional `rho0`                     |
//! | `deformed` | `fourier` or `samples`, `rho0`, optional `t` (default 1)    |
//! | `polygon`  | `polygon` (`[[x, y], ...]` in the plane `x3 = 1`) or `koch` |
//!
//! Angles are radians; `rho`, `rho0`, `samples` and `fourier` also accept a
//! `_deg` twin in degrees. `notes` is free text and allowed everywhere.

use conekit::geometry::{koch_cross_section_with_aperture, KOCH_DEFAULT_APERTURE};
use conekit::{Complex64, ConeSpec, IndicatorRegion, RadialProfile};
use serde_json::{json, Map, Value};

/// A parsed file in canonical form: profiles are stored as Fourier
/// coefficients and degrees are converted.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeFile {
    pub shape: Shape,
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Circular { rho: f64 },
    Star { fourier: Vec<Complex64>, rho0: Option<f64> },
    Deformed { fourier: Vec<Complex64>, rho0: f64, t: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    Koch { depth: u32, aperture: f64 },
}

/// Where parsing failed, as a field path and a message.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn err<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, FieldError> {
    Err(FieldError { path: path.into(), message: message.into() })
}

struct Fields<'a> {
    obj: &'a Map<String, Value>,
    kind: &'a str,
}

impl<'a> Fields<'a> {
    fn allow_only(&self, keys: &[&str]) -> Result<(), FieldError> {
        for k in self.obj.keys() {
            if k != "type" && k != "notes" && !keys.contains(&k.as_str()) {
                return err(k.as_str(), format!("unexpected field for type `{}`", self.kind));
            }
        }
        Ok(())
    }

    /// Value of `key` or of `key_deg`, with the scale to radians.
    fn angle_field(&self, key: &str) -> Result<Option<(&'a Value, f64, String)>, FieldError> {
        let deg = format!("{key}_deg");
        match (self.obj.get(key), self.obj.get(&deg)) {
            (Some(_), Some(_)) => err(deg, format!("conflicts with `{key}`")),
            (Some(v), None) => Ok(Some((v, 1.0, key.to_string()))),
            (None, Some(v)) => Ok(Some((v, std::f64::consts::PI / 180.0, deg))),
            (None, None) => Ok(None),
        }
    }

    fn angle(&self, key: &str) -> Result<Option<f64>, FieldError> {
        match self.angle_field(key)? {
            Some((v, scale, path)) => Ok(Some(number(v, &path)? * scale)),
            None => Ok(None),
        }
    }

    fn required_angle(&self, key: &str) -> Result<f64, FieldError> {
        self.angle(key)?.map_or_else(|| err(key, format!("missing field for type `{}`", self.kind)), Ok)
    }

    fn profile(&self) -> Result<Vec<Complex64>, FieldError> {
        let fourier = self.angle_field("fourier")?;
        let samples = self.angle_field("samples")?;
        match (fourier, samples) {
            (Some((_, _, a)), Some((_, _, b))) => err(b, format!("conflicts with `{a}`")),
            (Some((v, scale, path)), None) => {
                let pairs = pair_list(v, &path)?;
                Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re * scale, im * scale)).collect())
            }
            (None, Some((v, scale, path))) => {
                let values: Vec<f64> = list(v, &path)?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| number(x, &format!("{path}[{i}]")).map(|x| x * scale))
                    .collect::<Result<_, _>>()?;
                let p = RadialProfile::from_samples(&values, None).or_else(|e| err(path, e.to_string()))?;
                Ok(p.coeffs().to_vec())
            }
            (None, None) => err("fourier", format!("type `{}` needs `fourier` or `samples`", self.kind)),
        }
    }
}

fn number(v: &Value, path: &str) -> Result<f64, FieldError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(path, "expected a finite number"),
    }
}

fn list<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, FieldError> {
    v.as_array().map_or_else(|| err(path, "expected an array"), Ok)
}

fn pair_list(v: &Value, path: &str) -> Result<Vec<[f64; 2]>, FieldError> {
    list(v, path)?
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let p = format!("{path}[{i}]");
            match item.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok([number(a, &format!("{p}[0]"))?, number(b, &format!("{p}[1]"))?]),
                _ => err(p, "expected a pair [a, b]"),
            }
        })
        .collect()
}

impl ConeFile {
    pub fn parse(text: &str) -> Result<Self, FieldError> {
        let root: Value = serde_json::from_str(text).or_else(|e| err("$", format!("malformed JSON: {e}")))?;
        Self::from_value(&root)
    }

    pub fn from_value(root: &Value) -> Result<Self, FieldError> {
        let obj = root.as_object().map_or_else(|| err("$", "expected a JSON object"), Ok)?;
        let kind = match obj.get("type") {
            Some(Value::String(s)) => s.as_str(),
            Some(_) => return err("type", "expected a string"),
            None => return err("type", "missing field"),
        };
        let notes = match obj.get("notes") {
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return err("notes", "expected a string"),
            None => None,
        };
        let f = Fields { obj, kind };
        let shape = match kind {
            "circular" => {
                f.allow_only(&["rho", "rho_deg"])?;
                Shape::Circular { rho: f.required_angle("rho")? }
            }
            "star" => {
                f.allow_only(&["fourier", "fourier_deg", "samples", "samples_deg", "rho0", "rho0_deg"])?;
                Shape::Star { fourier: f.profile()?, rho0: f.angle("rho0")? }
            }
            "deformed" => {
                f.allow_only(&["fourier", "fourier_deg", "samples", "samples_deg", "rho0", "rho0_deg", "t"])?;
                let t = match obj.get("t") {
                    Some(v) => number(v, "t")?,
                    None => 1.0,
                };
                Shape::Deformed { fourier: f.profile()?, rho0: f.required_angle("rho0")?, t }
            }
            "polygon" => {
                f.allow_only(&["polygon", "koch"])?;
                match (obj.get("polygon"), obj.get("koch")) {
                    (Some(_), Some(_)) => return err("koch", "conflicts with `polygon`"),
                    (Some(v), None) => Shape::Polygon { vertices: pair_list(v, "polygon")? },
                    (None, Some(v)) => koch(v)?,
                    (None, None) => return err("polygon", "type `polygon` needs `polygon` or `koch`"),
                }
            }
            other => return err("type", format!("unknown cone type `{other}`")),
        };
        Ok(Self { shape, notes })
    }

    /// Builds and validates the cone.
    pub fn build(&self) -> Result<ConeSpec, FieldError> {
        let geo = |e: conekit::Error| FieldError { path: "$".into(), message: e.to_string() };
        match &self.shape {
            Shape::Circular { rho } => ConeSpec::circular(*rho).map_err(|e| FieldError { path: "rho".into(), message: e.to_string() }),
            Shape::Star { fourier, rho0 } => ConeSpec::star(RadialProfile::from_fourier(fourier.clone(), *rho0).map_err(geo)?).map_err(geo),
            Shape::Deformed { fourier, rho0, t } => {
                ConeSpec::deformed(RadialProfile::from_fourier(fourier.clone(), None).map_err(geo)?, *rho0, *t).map_err(geo)
            }
            Shape::Polygon { vertices } => {
                let cone = ConeSpec::indicator(IndicatorRegion::new(vertices.clone()).map_err(|e| FieldError { path: "polygon".into(), message: e.to_string() })?);
                cone.validate().map_err(|e| FieldError { path: "polygon".into(), message: e.to_string() })?;
                Ok(cone)
            }
            Shape::Koch { depth, aperture } => {
                let cone = ConeSpec::indicator(koch_cross_section_with_aperture(*depth, *aperture).map_err(|e| FieldError { path: "koch".into(), message: e.to_string() })?);
                cone.validate().map_err(geo)?;
                Ok(cone)
            }
        }
    }

    /// Canonical JSON form; parsing it yields an equal `ConeFile`.
    pub fn to_value(&self) -> Value {
        let pairs = |c: &[Complex64]| -> Vec<[f64; 2]> { c.iter().map(|z| [z.re, z.im]).collect() };
        let mut v = match &self.shape {
            Shape::Circular { rho } => json!({ "type": "circular", "rho": rho }),
            Shape::Star { fourier, rho0 } => {
                let mut v = json!({ "type": "star", "fourier": pairs(fourier) });
                if let Some(r) = rho0 {
                    v["rho0"] = json!(r);
                }
                v
            }
            Shape::Deformed { fourier, rho0, t } => json!({ "type": "deformed", "fourier": pairs(fourier), "rho0": rho0, "t": t }),
            Shape::Polygon { vertices } => json!({ "type": "polygon", "polygon": vertices }),
            Shape::Koch { depth, aperture } => json!({ "type": "polygon", "koch": { "depth": depth, "aperture": aperture } }),
        };
        if let Some(n) = &self.notes {
            v["notes"] = json!(n);
        }
        v
    }
}

fn koch(v: &Value) -> Result<Shape, FieldError> {
    let obj = v.as_object().map_or_else(|| err("koch", "expected an object {\"depth\": n}"), Ok)?;
    for k in obj.keys() {
        if k != "depth" && k != "aperture" {
            return err(format!("koch.{k}"), "unexpected field");
        }
    }
    let depth = match obj.get("depth") {
        Some(d) => d.as_u64().and_then(|d| u32::try_from(d).ok()).map_or_else(|| err("koch.depth", "expected a nonnegative integer"), Ok)?,
        None => return err("koch.depth", "missing field"),
    };
    let aperture = match obj.get("aperture") {
        Some(a) => number(a, "koch.aperture")?,
        None => KOCH_DEFAULT_APERTURE,
    };
    Ok(Shape::Koch { depth, aperture })
}
