//! The residue recursion for the correlators `W_{g,n}`, free energies and the
//! dilaton identity.
//!
//! A correlator is stored through its coefficients
//! `W_{g,n} = sum_d c_d prod_i dz_i / z_i^{2 d_i + 2}`. The recursion for
//! `W_{g,n+1}(K, z_{n+1})` is evaluated by coefficient pairing: expanding
//! `1/(z_{n+1}^2 - z^2) = sum_m z^{2m} z_{n+1}^{-2m-2}`, the coefficient of
//! `dz_{n+1}/z_{n+1}^{2m+2}` is `(1/2) [z^{-2m}] (E(z) B(z))`, with `E` the
//! curve kernel and `B` the bracket of lower correlators (with the
//! `d(-z) = -dz` sign folded in).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde_json::{json, Value};

use crate::algebra::{int, rat, Coefficient, Rational};
use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// `3g - 3 + n`, the dimension of `M_{g,n}`.
pub fn dimension(g: u32, n: u32) -> i64 {
    3 * g as i64 - 3 + n as i64
}

pub fn is_stable(g: u32, n: u32) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// Stable `(g, n)` with `n >= 1` and `2g - 2 + n <= budget`, ordered by
/// `2g - 2 + n` and then `g`.
pub fn stable_pairs(budget: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for chi in 1..=budget as i64 {
        for g in 0..=((chi + 1) / 2) as u32 {
            let n = chi + 2 - 2 * g as i64;
            if n >= 1 {
                out.push((g, n as u32));
            }
        }
    }
    out
}

/// `W_{g,n}` as a map from multi-index `(d_1, ..., d_n)` to coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correlator {
    pub g: u32,
    pub n: u32,
    pub terms: BTreeMap<Vec<u32>, Coefficient>,
}

impl Correlator {
    pub fn new(g: u32, n: u32) -> Self {
        Correlator {
            g,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, index: &[u32]) -> Coefficient {
        self.terms.get(index).cloned().unwrap_or_default()
    }

    pub fn insert(&mut self, index: Vec<u32>, c: Coefficient) {
        debug_assert_eq!(index.len(), self.n as usize);
        if !c.is_zero() {
            self.terms.insert(index, c);
        }
    }

    /// Applies `f` to every coefficient, dropping the ones that become zero.
    pub fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> Correlator {
        let mut out = Correlator::new(self.g, self.n);
        for (d, c) in &self.terms {
            out.insert(d.clone(), f(c));
        }
        out
    }

    /// True if every permutation of every index carries the same coefficient.
    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(d, c)| {
            permutations(d)
                .into_iter()
                .all(|p| self.terms.get(&p) == Some(c))
        })
    }

    /// Largest `sum d_i` over the stored terms.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|d| d.iter().sum()).max()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(d, c)| json!({"d": d, "coeff": c.to_string()}))
            .collect();
        json!({"g": self.g, "n": self.n, "terms": terms})
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let field = |name: &str| {
            doc.get(name)
                .ok_or_else(|| Error::Parse(format!("correlator document lacks `{name}`")))
        };
        let as_u32 = |v: &Value, what: &str| {
            v.as_u64()
                .map(|x| x as u32)
                .ok_or_else(|| Error::Parse(format!("`{what}` must be a non-negative integer")))
        };
        let mut out = Correlator::new(as_u32(field("g")?, "g")?, as_u32(field("n")?, "n")?);
        let terms = field("terms")?
            .as_array()
            .ok_or_else(|| Error::Parse("`terms` must be a list".into()))?;
        for term in terms {
            let d = term
                .get("d")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term lacks `d`".into()))?
                .iter()
                .map(|x| as_u32(x, "d"))
                .collect::<Result<Vec<_>>>()?;
            if d.len() != out.n as usize {
                return Err(Error::Parse(format!(
                    "index {d:?} has length {}, expected {}",
                    d.len(),
                    out.n
                )));
            }
            let coeff: Coefficient = term
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("term lacks `coeff`".into()))?
                .parse()?;
            let slot = out.terms.entry(d).or_default();
            *slot += &coeff;
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

impl fmt::Display for Correlator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W_{{{},{}}}:", self.g, self.n)?;
        for (d, c) in &self.terms {
            let poles: Vec<String> = d
                .iter()
                .enumerate()
                .map(|(i, di)| format!("z{}^-{}", i + 1, 2 * di + 2))
                .collect();
            writeln!(f, "  [{}] {}", poles.join(" "), c)?;
        }
        Ok(())
    }
}

/// All distinct permutations of `d`.
pub(crate) fn permutations(d: &[u32]) -> Vec<Vec<u32>> {
    let mut sorted = d.to_vec();
    sorted.sort_unstable();
    let mut out = vec![sorted.clone()];
    while next_permutation(&mut sorted) {
        out.push(sorted.clone());
    }
    out
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `F_g` for `g >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeEnergy {
    pub g: u32,
    pub value: Coefficient,
}

/// Per spectator multi-index, the even Laurent series `B(z)` (degrees <= 0).
pub type Bracket = BTreeMap<Vec<u32>, TruncatedSeries>;

/// Memoizing recursion driver for one spectral curve.
///
/// Safe to share between threads: the cache only ever gains entries, and a
/// correlator computed twice by racing callers is identical.
pub struct Engine {
    curve: SpectralCurve,
    fingerprint: String,
    cache: RwLock<HashMap<(u32, u32), Arc<Correlator>>>,
}

impl Engine {
    pub fn new(curve: SpectralCurve) -> Result<Self> {
        curve.s()?;
        Ok(Engine {
            fingerprint: curve.fingerprint(),
            curve,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn curve(&self) -> &SpectralCurve {
        &self.curve
    }

    /// Cache key component identifying the curve.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// `W_{g,n}` for a stable pair.
    pub fn correlator(&self, g: u32, n: u32) -> Result<Arc<Correlator>> {
        if n == 0 || !is_stable(g, n) {
            return Err(Error::UnstablePair { g, n });
        }
        self.curve.require_order(dimension(g, n) as u32)?;
        self.get_or_compute(g, n)
    }

    fn get_or_compute(&self, g: u32, n: u32) -> Result<Arc<Correlator>> {
        if let Some(w) = self.cache.read().unwrap().get(&(g, n)) {
            return Ok(Arc::clone(w));
        }
        let computed = Arc::new(self.compute(g, n)?);
        let mut cache = self.cache.write().unwrap();
        Ok(Arc::clone(cache.entry((g, n)).or_insert(computed)))
    }

    /// The bracket for target `W_{g, m+1}` with `m` spectators.
    pub fn bracket(&self, g: u32, m: u32) -> Result<Bracket> {
        if !is_stable(g, m + 1) {
            return Err(Error::UnstablePair { g, n: m + 1 });
        }
        let mut acc = BracketBuilder::new(dimension(g, m + 1));

        if (g, m) == (0, 2) {
            // W02(z,z1) W02(-z,z2) + W02(z,z2) W02(-z,z1): only z^0 survives
            acc.add(vec![0, 0], 0, &Coefficient::integer(-2));
            return Ok(acc.finish());
        }

        if g >= 1 {
            if (g - 1, m + 2) == (0, 2) {
                // W02(z, -z) = -dz^2 / (4 z^2)
                acc.add(vec![], -2, &Coefficient::constant(rat(-1, 4)));
            } else {
                let w = self.get_or_compute(g - 1, m + 2)?;
                for (d, c) in &w.terms {
                    let deg = -2 * (d[0] + d[1]) as i32 - 4;
                    acc.add(d[2..].to_vec(), deg, &-c);
                }
            }
        }

        // products of two stable factors
        for h in 0..=g {
            for mask in 0u32..(1 << m) {
                let j = mask.count_ones();
                let (left, right) = ((h, 1 + j), (g - h, 1 + m - j));
                if !is_stable(left.0, left.1) || !is_stable(right.0, right.1) {
                    continue;
                }
                let w1 = self.get_or_compute(left.0, left.1)?;
                let w2 = self.get_or_compute(right.0, right.1)?;
                for (d1, c1) in &w1.terms {
                    for (d2, c2) in &w2.terms {
                        let spect = merge_spectators(m, mask, &d1[1..], &d2[1..]);
                        let deg = -2 * (d1[0] + d2[0]) as i32 - 4;
                        acc.add(spect, deg, &-(c1 * c2));
                    }
                }
            }
        }

        // W02(z, z_j) W_{g,m}(-z, K\j) and its mirror, expanded for |z| < |z_j|:
        // together -2 sum_p (2p+1) z^{2p} z_j^{-2p-2} w(z, K\j)
        if m >= 1 && is_stable(g, m) {
            let w = self.get_or_compute(g, m)?;
            for j in 0..m as usize {
                for (d, c) in &w.terms {
                    let a = d[0];
                    for p in 0..=a + 1 {
                        let mut spect = d[1..].to_vec();
                        spect.insert(j, p);
                        let deg = 2 * p as i32 - 2 * a as i32 - 2;
                        acc.add(spect, deg, &c.scale(&int(-2 * (2 * p as i64 + 1))));
                    }
                }
            }
        }
        Ok(acc.finish())
    }

    fn compute(&self, g: u32, n: u32) -> Result<Correlator> {
        let m = n - 1;
        let top = dimension(g, n) as i32;
        let kernel = self.curve.build_kernel(2 * top + 2)?.series;
        let bracket = self.bracket(g, m)?;
        let half = rat(1, 2);
        let mut out = Correlator::new(g, n);
        for (spect, b) in bracket {
            let product = kernel.mul(&b);
            for last in 0..=top {
                let c = product.coeff(-2 * last)?;
                if !c.is_zero() {
                    let mut index = spect.clone();
                    index.push(last as u32);
                    out.insert(index, c.scale(&half));
                }
            }
        }
        Ok(out)
    }

    /// `F_g = 1/(2g-2) Res_{z->0} Phi(z) W_{g,1}(z)` for `g >= 2`.
    pub fn free_energy(&self, g: u32) -> Result<FreeEnergy> {
        if g < 2 {
            return Err(Error::InvalidGenus(g));
        }
        let w = self.correlator(g, 1)?;
        let residue = self.phi_pairing(&w)?.remove(&vec![]).unwrap_or_default();
        let value = self
            .curve
            .divide_by_s(&residue)?
            .scale(&Rational::new(1.into(), (2 * g as i64 - 2).into()));
        Ok(FreeEnergy { g, value })
    }

    /// `Res_{z->0} s Phi(z) W(..., z)` in the last variable, per prefix index.
    fn phi_pairing(&self, w: &Correlator) -> Result<BTreeMap<Vec<u32>, Coefficient>> {
        let top = w.max_degree().unwrap_or(0) as i32;
        let phi = self.curve.scaled_phi(2 * top + 1)?;
        let mut per_prefix: BTreeMap<Vec<u32>, TruncatedSeries> = BTreeMap::new();
        for (d, c) in &w.terms {
            let (last, prefix) = d.split_last().expect("stable correlators have n >= 1");
            per_prefix
                .entry(prefix.to_vec())
                .or_insert_with(|| TruncatedSeries::new(-2 * top - 2, -2))
                .add_to(-2 * *last as i32 - 2, c);
        }
        per_prefix
            .into_iter()
            .map(|(prefix, series)| Ok((prefix, phi.mul(&series).residue()?)))
            .collect()
    }

    /// Checks `(2 - 2g - n) W_{g,n} = Res_{z->0} Phi(z) W_{g,n+1}(..., z)`
    /// exactly, coefficient by coefficient.
    pub fn dilaton_check(&self, g: u32, n: u32) -> Result<bool> {
        let lower = self.correlator(g, n)?;
        let upper = self.correlator(g, n + 1)?;
        let s = self.curve.s()?;
        let factor = int(2 - 2 * g as i64 - n as i64);
        let lhs = lower.map_coefficients(|c| (&s * c).scale(&factor));
        let rhs = self.phi_pairing(&upper)?;
        let mut rhs_terms = Correlator::new(g, n);
        for (d, c) in rhs {
            rhs_terms.insert(d, c);
        }
        Ok(lhs.terms == rhs_terms.terms)
    }
}

struct BracketBuilder {
    top: i64,
    series: Bracket,
}

impl BracketBuilder {
    fn new(top: i64) -> Self {
        BracketBuilder {
            top,
            series: BTreeMap::new(),
        }
    }

    fn add(&mut self, spect: Vec<u32>, degree: i32, c: &Coefficient) {
        if degree > 0 {
            return;
        }
        let min = -2 * self.top as i32;
        self.series
            .entry(spect)
            .or_insert_with(|| TruncatedSeries::new(min, 0))
            .add_to(degree, c);
    }

    fn finish(mut self) -> Bracket {
        self.series.retain(|_, s| !s.is_zero());
        self.series
    }
}

/// Interleaves spectator indices: positions in `mask` take `from_left`, the
/// rest take `from_right`, both in order.
fn merge_spectators(m: u32, mask: u32, from_left: &[u32], from_right: &[u32]) -> Vec<u32> {
    let mut left = from_left.iter();
    let mut right = from_right.iter();
    (0..m)
        .map(|i| {
            if mask & (1 << i) != 0 {
                *left.next().unwrap()
            } else {
                *right.next().unwrap()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(text: &str) -> Coefficient {
        text.parse().unwrap()
    }

    #[test]
    fn w03_generic() {
        let e = Engine::new(SpectralCurve::formal(4)).unwrap();
        let w = e.correlator(0, 3).unwrap();
        assert_eq!(w.terms.len(), 1);
        assert_eq!(w.coeff(&[0, 0, 0]), c("-s"));
    }

    #[test]
    fn w11_generic() {
        let e = Engine::new(SpectralCurve::formal(4)).unwrap();
        let w = e.correlator(1, 1).unwrap();
        assert_eq!(w.terms.len(), 2);
        assert_eq!(w.coeff(&[1]), c("-s/8"));
        assert_eq!(w.coeff(&[0]), c("-s^2*t5/8"));
    }

    #[test]
    fn w21_airy() {
        let e = Engine::new(SpectralCurve::airy()).unwrap();
        let w = e.correlator(2, 1).unwrap();
        assert_eq!(w.terms.len(), 1);
        assert_eq!(w.coeff(&[4]), Coefficient::constant(rat(-105, 1024)));
    }

    #[test]
    fn unstable_pairs_are_rejected() {
        let e = Engine::new(SpectralCurve::airy()).unwrap();
        assert_eq!(
            e.correlator(0, 1).unwrap_err(),
            Error::UnstablePair { g: 0, n: 1 }
        );
        assert_eq!(
            e.correlator(0, 2).unwrap_err(),
            Error::UnstablePair { g: 0, n: 2 }
        );
        assert!(e.correlator(1, 0).is_err());
    }

    #[test]
    fn degenerate_curve_is_rejected() {
        let curve =
            SpectralCurve::new(crate::curve::Time3::Value(int(2)), BTreeMap::new()).unwrap();
        assert_eq!(Engine::new(curve).err(), Some(Error::DegenerateCurve));
    }

    #[test]
    fn brackets_are_even() {
        let e = Engine::new(SpectralCurve::formal(6)).unwrap();
        for (g, n) in stable_pairs(4) {
            for b in e.bracket(g, n - 1).unwrap().values() {
                assert!(b.is_even(), "odd bracket for ({g},{n})");
            }
        }
    }

    #[test]
    fn w03_bracket_shape() {
        let e = Engine::new(SpectralCurve::airy()).unwrap();
        let b = e.bracket(0, 2).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[&vec![0, 0]].coeff(0).unwrap(), Coefficient::integer(-2));
        let b = e.bracket(1, 0).unwrap();
        assert_eq!(
            b[&vec![]].coeff(-2).unwrap(),
            Coefficient::constant(rat(-1, 4))
        );
    }

    #[test]
    fn free_energy_airy_vanishes() {
        let e = Engine::new(SpectralCurve::airy()).unwrap();
        assert!(e.free_energy(2).unwrap().value.is_zero());
        assert_eq!(e.free_energy(1), Err(Error::InvalidGenus(1)));
    }

    #[test]
    fn free_energy_pairs_every_phi_term() {
        // residue of Phi against W_{2,1}: the z^3 and z^{2k+3} terms both contribute
        let e = Engine::new(SpectralCurve::formal(4)).unwrap();
        assert_eq!(
            e.free_energy(2).unwrap().value,
            c("-21*s^5*t5^3/160 - 29*s^4*t5*t7/128 - 35*s^3*t9/384")
        );
    }

    #[test]
    fn free_energy_on_weil_petersson() {
        // V_{2,0} = 43 pi^6 / 2160
        let e = Engine::new(SpectralCurve::weil_petersson(4)).unwrap();
        assert_eq!(e.free_energy(2).unwrap().value, c("-43*u^3/2160"));
    }

    #[test]
    fn concurrent_requests_agree() {
        let e = Engine::new(SpectralCurve::formal(5)).unwrap();
        let results: Vec<Arc<Correlator>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..4)
                .map(|i| {
                    let e = &e;
                    scope.spawn(move || {
                        let (g, n) = if i % 2 == 0 { (2, 2) } else { (1, 4) };
                        e.correlator(1, 3).unwrap();
                        e.correlator(g, n).unwrap()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(results[0], results[2]);
        assert_eq!(results[1], results[3]);
        assert_eq!(
            *results[0],
            *Engine::new(SpectralCurve::formal(5))
                .unwrap()
                .correlator(2, 2)
                .unwrap()
        );
    }

    #[test]
    fn stable_pair_order() {
        assert_eq!(
            stable_pairs(3),
            vec![(0, 3), (1, 1), (0, 4), (1, 2), (0, 5), (1, 3), (2, 1)]
        );
    }

    #[test]
    fn merge_interleaves() {
        assert_eq!(
            merge_spectators(4, 0b0101, &[7, 8], &[1, 2]),
            vec![7, 1, 8, 2]
        );
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(permutations(&[1, 0, 1]).len(), 3);
        assert_eq!(permutations(&[2, 1, 0]).len(), 6);
    }

    #[test]
    fn memoized_results_are_shared() {
        let e = Engine::new(SpectralCurve::formal(4)).unwrap();
        let a = e.correlator(1, 2).unwrap();
        let b = e.correlator(1, 2).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn json_round_trip() {
        let e = Engine::new(SpectralCurve::formal(4)).unwrap();
        let w = e.correlator(1, 2).unwrap();
        let text = w.to_json().to_string();
        let back = Correlator::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(&back, w.as_ref());
    }
}
