//! Spectral curves `y(z) = z - (1/2) sum_k t_{2k+3} z^{2k+1}`, presets, and the
//! kernel series `E(z)` with `1/(y(z) - y(-z)) = E(z)/z`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{factorial, int, parse_rational, rat, Coefficient, Generator, Rational};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// The time `t3`: either a rational constant or left formal (expressed via `s`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Time3 {
    Value(Rational),
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCurve {
    t3: Time3,
    /// `k -> t_{2k+3}` for `k >= 1`; absent entries are zero.
    times: BTreeMap<u32, Coefficient>,
    name: Option<String>,
    /// When set, the curve belongs to an infinite family truncated at
    /// `t_{2k+3}`, `k <= known_order`; higher times are unknown, not zero.
    known_order: Option<u32>,
}

/// `E(z)` such that `1/(y(z) - y(-z)) = z^{-1} E(z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSeries {
    pub series: TruncatedSeries,
}

impl SpectralCurve {
    pub fn new(t3: Time3, times: BTreeMap<u32, Coefficient>) -> Result<Self> {
        if let Some(&k) = times.keys().find(|&&k| k == 0) {
            return Err(Error::InvalidParameter(format!(
                "higher times are indexed by k >= 1, got k = {k}"
            )));
        }
        Ok(SpectralCurve {
            t3,
            times: times.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            name: None,
            known_order: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_known_order(mut self, order: u32) -> Self {
        self.known_order = Some(order);
        self
    }

    /// `y(z) = z`, all times zero.
    pub fn airy() -> Self {
        SpectralCurve {
            t3: Time3::Value(Rational::zero()),
            times: BTreeMap::new(),
            name: Some("airy".into()),
            known_order: None,
        }
    }

    /// `t3` symbolic and `t_{2k+3}` the generator `t{2k+3}` for `1 <= k <= order`.
    pub fn formal(order: u32) -> Self {
        SpectralCurve {
            t3: Time3::Symbolic,
            times: (1..=order)
                .map(|k| (k, Coefficient::var(Generator::time(2 * k + 3))))
                .collect(),
            name: Some("formal".into()),
            known_order: Some(order),
        }
    }

    /// `t3 = 1`, `t_{2k+3} = (-1)^{k+1} (4u)^k / (2k+1)!` with `u = pi^2`.
    pub fn weil_petersson(order: u32) -> Self {
        let four_u = Coefficient::var(Generator::u()).scale(&int(4));
        let times = (1..=order)
            .map(|k| {
                let sign = if k % 2 == 1 { int(1) } else { int(-1) };
                let c = four_u.pow(k).scale(&(sign / factorial(2 * k + 1)));
                (k, c)
            })
            .collect();
        SpectralCurve {
            t3: Time3::Value(Rational::one()),
            times,
            name: Some("weil_petersson".into()),
            known_order: Some(order),
        }
    }

    /// The curve whose conjugated times are `t~2 = value` and all others zero.
    pub fn kappa2(value: &Coefficient, t3: Rational, order: u32) -> Result<Self> {
        let tilde = BTreeMap::from([(2, value.clone())]);
        let curve = crate::moduli::inverse_conjugate_times(&tilde, &Time3::Value(t3), order)?;
        Ok(curve.with_name("kappa2"))
    }

    /// `t_k = lambda^{-k}`: `t3 = lambda^{-3}`, `t_{2k+3} = lambda^{-2k-3}`.
    pub fn discrete(lambda: &Rational, order: u32) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::InvalidParameter(
                "discrete curve needs lambda != 0".into(),
            ));
        }
        let inv = lambda.recip();
        let t3 = num_traits::pow(inv.clone(), 3);
        let times = (1..=order)
            .map(|k| {
                (
                    k,
                    Coefficient::constant(num_traits::pow(inv.clone(), 2 * k as usize + 3)),
                )
            })
            .collect();
        Ok(SpectralCurve {
            t3: Time3::Value(t3),
            times,
            name: Some("discrete".into()),
            known_order: Some(order),
        })
    }

    pub fn preset(preset: &Preset, order: u32) -> Result<Self> {
        match preset {
            Preset::Airy => Ok(SpectralCurve::airy()),
            Preset::WeilPetersson => Ok(SpectralCurve::weil_petersson(order)),
            Preset::Kappa2 { value, t3 } => SpectralCurve::kappa2(value, t3.clone(), order),
            Preset::Discrete { lambda } => SpectralCurve::discrete(lambda, order),
            Preset::Formal => Ok(SpectralCurve::formal(order)),
        }
    }

    pub fn t3(&self) -> &Time3 {
        &self.t3
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn known_order(&self) -> Option<u32> {
        self.known_order
    }

    /// `t_{2k+3}` for `k >= 1`.
    pub fn time(&self, k: u32) -> Coefficient {
        self.times.get(&k).cloned().unwrap_or_default()
    }

    pub fn times(&self) -> &BTreeMap<u32, Coefficient> {
        &self.times
    }

    /// Checks that every time `t_{2k+3}` with `k <= needed` is known.
    pub fn require_order(&self, needed: u32) -> Result<()> {
        match self.known_order {
            Some(known) if known < needed => Err(Error::InsufficientOrder {
                known: 2 * known + 3,
                needed: 2 * needed + 3,
            }),
            _ => Ok(()),
        }
    }

    /// `s = 1/(2 - t3)`, either a rational constant or the generator `s`.
    pub fn s(&self) -> Result<Coefficient> {
        match &self.t3 {
            Time3::Symbolic => Ok(Coefficient::var(Generator::s())),
            Time3::Value(t3) => {
                let two_minus = int(2) - t3;
                if two_minus.is_zero() {
                    return Err(Error::DegenerateCurve);
                }
                Ok(Coefficient::constant(two_minus.recip()))
            }
        }
    }

    /// Exact quotient `c / s`, i.e. `c * (2 - t3)`.
    pub fn divide_by_s(&self, c: &Coefficient) -> Result<Coefficient> {
        match &self.t3 {
            Time3::Symbolic => c
                .div_generator(&Generator::s())
                .ok_or_else(|| Error::InvalidInput(format!("`{c}` is not divisible by s"))),
            Time3::Value(t3) => {
                if *t3 == int(2) {
                    return Err(Error::DegenerateCurve);
                }
                Ok(c.scale(&(int(2) - t3)))
            }
        }
    }

    /// `s (y(z) - y(-z))/z = 1 - sum_k s t_{2k+3} z^{2k}` on `[0, max_degree]`.
    pub fn scaled_odd_part(&self, max_degree: i32) -> Result<TruncatedSeries> {
        let s = self.s()?;
        let mut out = TruncatedSeries::constant(Coefficient::one(), max_degree);
        for (&k, t) in &self.times {
            let deg = 2 * k as i32;
            if deg <= max_degree {
                out.add_to(deg, &-(&s * t));
            }
        }
        Ok(out)
    }

    /// `E(z) = s (1 - sum_k s t_{2k+3} z^{2k})^{-1}` up to `z^max_degree`.
    pub fn build_kernel(&self, max_degree: i32) -> Result<KernelSeries> {
        if max_degree < 0 {
            return Err(Error::InvalidParameter(format!(
                "kernel order must be >= 0, got {max_degree}"
            )));
        }
        let s = self.s()?;
        let mut d = TruncatedSeries::new(0, max_degree);
        for (&k, t) in &self.times {
            let deg = 2 * k as i32;
            if deg <= max_degree {
                d.add_to(deg, &(&s * t));
            }
        }
        Ok(KernelSeries {
            series: d.geometric_inverse()?.scale(&s),
        })
    }

    /// `s Phi(z)` where `d Phi = y dx`, on degrees `[3, max_degree]`:
    /// `s Phi(z) = z^3/3 - s sum_{k>=1} t_{2k+3} z^{2k+3}/(2k+3)`.
    pub fn scaled_phi(&self, max_degree: i32) -> Result<TruncatedSeries> {
        let s = self.s()?;
        let mut out = TruncatedSeries::new(3.min(max_degree), max_degree);
        if max_degree >= 3 {
            out.add_to(3, &Coefficient::constant(rat(1, 3)));
        }
        for (&k, t) in &self.times {
            let deg = 2 * k as i32 + 3;
            if deg <= max_degree {
                out.add_to(deg, &(&s * t).scale(&rat(-1, deg as i64)));
            }
        }
        Ok(out)
    }

    /// Replaces generators inside `t3` and the times by rationals; a symbolic
    /// `t3` is fixed through its `s` value if `s` is assigned.
    pub fn specialize(&self, assignment: &BTreeMap<Generator, Rational>) -> Result<SpectralCurve> {
        let t3 = match (&self.t3, assignment.get(&Generator::s())) {
            (Time3::Symbolic, Some(s)) => {
                if s.is_zero() {
                    return Err(Error::InvalidParameter("s = 0 has no t3".into()));
                }
                Time3::Value(int(2) - s.recip())
            }
            (t3, _) => t3.clone(),
        };
        let times = self
            .times
            .iter()
            .map(|(&k, c)| (k, c.specialize(assignment)))
            .collect();
        let mut out = SpectralCurve::new(t3, times)?;
        out.name = self.name.clone();
        out.known_order = self.known_order;
        Ok(out)
    }

    /// Canonical curve-file JSON.
    pub fn to_json(&self) -> Value {
        let t3 = match &self.t3 {
            Time3::Value(v) => Coefficient::constant(v.clone()),
            Time3::Symbolic => Coefficient::var(Generator::time(3)),
        };
        let times: Map<String, Value> = self
            .times
            .iter()
            .map(|(&k, c)| ((2 * k + 3).to_string(), c.to_json()))
            .collect();
        let mut doc = json!({
            "t3": t3.to_json(),
            "times": times,
            "name": self.name.clone().unwrap_or_default(),
        });
        if let Some(order) = self.known_order {
            doc["order"] = json!(order);
        }
        doc
    }

    /// Reads a curve file. `t3` is either a constant or exactly the generator `t3`.
    pub fn from_json(doc: &Value) -> Result<Self> {
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::Parse("curve file must be a JSON object".into()))?;
        let t3 = match obj.get("t3") {
            None | Some(Value::Null) => Time3::Value(Rational::zero()),
            Some(v) => {
                let c = Coefficient::from_json(v)?;
                if c == Coefficient::var(Generator::time(3)) {
                    Time3::Symbolic
                } else {
                    Time3::Value(c.as_constant().ok_or_else(|| {
                        Error::Parse(format!("t3 must be a constant or `t3`, got `{c}`"))
                    })?)
                }
            }
        };
        let mut times = BTreeMap::new();
        if let Some(raw) = obj.get("times") {
            let raw = raw
                .as_object()
                .ok_or_else(|| Error::Parse("`times` must be an object".into()))?;
            for (key, value) in raw {
                let index: u32 = key
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad time index `{key}`")))?;
                if index < 5 || index.is_multiple_of(2) {
                    return Err(Error::Parse(format!(
                        "time index must be odd and >= 5, got {index}"
                    )));
                }
                times.insert((index - 3) / 2, Coefficient::from_json(value)?);
            }
        }
        let mut curve = SpectralCurve::new(t3, times)?;
        curve.name = obj
            .get("name")
            .and_then(Value::as_str)
            .filter(|s| !s.is_empty())
            .map(String::from);
        if let Some(order) = obj.get("order") {
            let order = order
                .as_u64()
                .ok_or_else(|| Error::Parse("`order` must be a non-negative integer".into()))?;
            curve.known_order = Some(order as u32);
        }
        Ok(curve)
    }

    /// Stable hash of the canonical JSON form, used as a cache key.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_json().to_string().as_bytes());
        digest.iter().take(12).map(|b| format!("{b:02x}")).collect()
    }
}

/// Named curve families selectable from the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    Airy,
    WeilPetersson,
    Kappa2 { value: Coefficient, t3: Rational },
    Discrete { lambda: Rational },
    Formal,
}

impl FromStr for Preset {
    type Err = Error;

    /// `airy`, `wp` | `weil_petersson`, `kappa2:<value>[@<t3>]`,
    /// `discrete:<lambda>`, `formal`.
    fn from_str(text: &str) -> Result<Self> {
        let (head, arg) = match text.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (text, None),
        };
        match (head, arg) {
            ("airy", None) => Ok(Preset::Airy),
            ("wp" | "weil_petersson", None) => Ok(Preset::WeilPetersson),
            ("formal" | "symbolic", None) => Ok(Preset::Formal),
            ("kappa2", Some(arg)) => {
                let (value, t3) = match arg.split_once('@') {
                    Some((v, t)) => (v, parse_rational(t)?),
                    None => (arg, int(3)),
                };
                Ok(Preset::Kappa2 {
                    value: value.parse()?,
                    t3,
                })
            }
            ("discrete", Some(arg)) => Ok(Preset::Discrete {
                lambda: parse_rational(arg)?,
            }),
            _ => Err(Error::UnknownPreset(text.to_string())),
        }
    }
}

impl fmt::Display for SpectralCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.t3 {
            Time3::Value(v) => write!(f, "t3 = {v}")?,
            Time3::Symbolic => write!(f, "t3 = 2 - 1/s")?,
        }
        for (&k, t) in &self.times {
            write!(f, ", t{} = {t}", 2 * k + 3)?;
        }
        Ok(())
    }
}
