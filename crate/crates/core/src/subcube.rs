//! Subcubes of the Boolean hypercube in dual-rail form.
//!
//! Dimension `i` carries two rails: `one[i]` holds when the subcube admits
//! value 1 there and `zero[i]` when it admits 0. A free dimension has both
//! rails set; at least one rail is always set.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde_json::{Map, Value};

use crate::bn::{ComponentId, Configuration, NameIndex, PartialAssignment};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subcube {
    one: FixedBitSet,
    zero: FixedBitSet,
}

impl Subcube {
    /// `*^n`.
    pub fn full(n: usize) -> Self {
        let mut one = FixedBitSet::with_capacity(n);
        one.insert_range(..);
        Self {
            zero: one.clone(),
            one,
        }
    }

    pub fn point(x: &Configuration) -> Self {
        let one = x.bits().clone();
        let mut zero = one.clone();
        zero.toggle_range(..);
        Self { one, zero }
    }

    /// Builds a subcube from its rails; `None` if some dimension has no rail.
    pub fn from_rails(one: FixedBitSet, zero: FixedBitSet) -> Option<Self> {
        assert_eq!(one.len(), zero.len());
        let mut union = one.clone();
        union.union_with(&zero);
        if union.count_ones(..) != union.len() {
            return None;
        }
        Some(Self { one, zero })
    }

    /// Builds a subcube from per-dimension values (`None` = free).
    pub fn from_values(values: &[Option<bool>]) -> Self {
        let n = values.len();
        let mut one = FixedBitSet::with_capacity(n);
        let mut zero = FixedBitSet::with_capacity(n);
        for (i, v) in values.iter().enumerate() {
            one.set(i, *v != Some(false));
            zero.set(i, *v != Some(true));
        }
        Self { one, zero }
    }

    /// Decodes the `k`-th subcube of `{0,1,*}^n` in base 3 (digit 2 = `*`).
    pub fn from_base3(n: usize, mut k: u64) -> Self {
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(match k % 3 {
                0 => Some(false),
                1 => Some(true),
                _ => None,
            });
            k /= 3;
        }
        Self::from_values(&values)
    }

    pub fn len(&self) -> usize {
        self.one.len()
    }

    pub fn is_empty(&self) -> bool {
        self.one.len() == 0
    }

    pub fn one_rail(&self) -> &FixedBitSet {
        &self.one
    }

    pub fn zero_rail(&self) -> &FixedBitSet {
        &self.zero
    }

    /// Rail `(b, i)`: true when value `b` is admitted on dimension `i`.
    pub fn rail(&self, b: bool, i: ComponentId) -> bool {
        if b {
            self.one.contains(i)
        } else {
            self.zero.contains(i)
        }
    }

    pub fn open_rail(&mut self, b: bool, i: ComponentId) {
        if b {
            self.one.insert(i);
        } else {
            self.zero.insert(i);
        }
    }

    /// Value of dimension `i`; `None` when free.
    pub fn get(&self, i: ComponentId) -> Option<bool> {
        match (self.one.contains(i), self.zero.contains(i)) {
            (true, true) => None,
            (true, false) => Some(true),
            (false, true) => Some(false),
            (false, false) => unreachable!("subcube with an empty dimension"),
        }
    }

    pub fn is_free(&self, i: ComponentId) -> bool {
        self.one.contains(i) && self.zero.contains(i)
    }

    pub fn set(&mut self, i: ComponentId, value: Option<bool>) {
        self.one.set(i, value != Some(false));
        self.zero.set(i, value != Some(true));
    }

    pub fn free_count(&self) -> usize {
        self.one.intersection(&self.zero).count()
    }

    pub fn free_dims(&self) -> impl Iterator<Item = ComponentId> + '_ {
        self.one.intersection(&self.zero)
    }

    pub fn fixed_dims(&self) -> impl Iterator<Item = (ComponentId, bool)> + '_ {
        self.one
            .symmetric_difference(&self.zero)
            .map(move |i| (i, self.one.contains(i)))
    }

    pub fn contains(&self, x: &Configuration) -> bool {
        (0..self.len()).all(|i| self.rail(x.get(i), i))
    }

    /// `c(self) ⊆ c(other)`.
    pub fn is_subcube_of(&self, other: &Subcube) -> bool {
        self.one.is_subset(&other.one) && self.zero.is_subset(&other.zero)
    }

    pub fn is_strict_subcube_of(&self, other: &Subcube) -> bool {
        self != other && self.is_subcube_of(other)
    }

    pub fn intersection(&self, other: &Subcube) -> Option<Subcube> {
        let mut one = self.one.clone();
        one.intersect_with(&other.one);
        let mut zero = self.zero.clone();
        zero.intersect_with(&other.zero);
        Subcube::from_rails(one, zero)
    }

    pub fn is_disjoint(&self, other: &Subcube) -> bool {
        self.intersection(other).is_none()
    }

    /// Every marked dimension is fixed to the marked value.
    pub fn matches(&self, marker: &PartialAssignment) -> bool {
        marker.iter().all(|(i, b)| self.get(i) == Some(b))
    }

    /// Some vertex, taking free dimensions from `fill`.
    pub fn vertex_from(&self, fill: &Configuration) -> Configuration {
        let mut x = fill.clone();
        for (i, b) in self.fixed_dims() {
            x.set(i, b);
        }
        x
    }

    /// Enumerates `c(self)`.
    pub fn vertices(&self) -> impl Iterator<Item = Configuration> + '_ {
        let free: Vec<ComponentId> = self.free_dims().collect();
        assert!(free.len() < 64, "too many free dimensions to enumerate");
        let base = self.vertex_from(&Configuration::zeros(self.len()));
        (0..(1u64 << free.len())).map(move |k| {
            let mut x = base.clone();
            for (bit, &i) in free.iter().enumerate() {
                x.set(i, (k >> bit) & 1 == 1);
            }
            x
        })
    }

    pub fn to_json_value(&self, names: &[String]) -> Value {
        let mut map = Map::new();
        for (i, name) in names.iter().enumerate() {
            let v = match self.get(i) {
                Some(b) => Value::from(u8::from(b)),
                None => Value::from("*"),
            };
            map.insert(name.clone(), v);
        }
        Value::Object(map)
    }

    pub fn from_json_value(names: &NameIndex, value: &Value) -> Result<Self> {
        let object = value.as_object().ok_or_else(|| Error::InvalidValue {
            name: "<root>".into(),
            message: "expected a JSON object of name -> 0/1/\"*\"".into(),
        })?;
        let mut values = vec![None; names.len()];
        let mut seen = vec![false; names.len()];
        for (name, v) in object {
            let i = names
                .index_of(name)
                .ok_or_else(|| Error::UnknownName(name.clone()))?;
            seen[i] = true;
            values[i] = match v {
                Value::Number(num) if num.as_u64() == Some(0) => Some(false),
                Value::Number(num) if num.as_u64() == Some(1) => Some(true),
                Value::String(s) if s == "*" => None,
                other => {
                    return Err(Error::InvalidValue {
                        name: name.clone(),
                        message: format!("expected 0, 1 or \"*\", found {other}"),
                    })
                }
            };
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidValue {
                name: names.names()[missing].clone(),
                message: "missing dimension".into(),
            });
        }
        Ok(Self::from_values(&values))
    }
}

impl fmt::Display for Subcube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(match self.get(i) {
                Some(true) => "1",
                Some(false) => "0",
                None => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Subcube {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '-' | '*' => Ok(None),
                other => Err(Error::InvalidValue {
                    name: s.to_string(),
                    message: format!("unexpected character `{other}` in subcube"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subcube::from_values(&values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(s: &str) -> Subcube {
        s.parse().unwrap()
    }

    #[test]
    fn text_form() {
        let h = cube("11*0");
        assert_eq!(h.to_string(), "11-0");
        assert_eq!(h.free_count(), 1);
        assert_eq!(h.get(2), None);
        assert_eq!(h.get(3), Some(false));
        assert!(h.rail(true, 2) && h.rail(false, 2) && !h.rail(true, 3));
    }

    #[test]
    fn containment_and_vertices() {
        let outer = cube("11--");
        let inner = cube("1101");
        assert!(inner.is_strict_subcube_of(&outer));
        assert!(!outer.is_subcube_of(&inner));
        let vs: Vec<String> = outer.vertices().map(|x| x.to_string()).collect();
        assert_eq!(vs.len(), 4);
        assert!(vs.contains(&"1110".to_string()));
        assert!(outer.vertices().all(|x| outer.contains(&x)));
        assert!(cube("0---").is_disjoint(&cube("1---")));
        assert_eq!(
            cube("1--0").intersection(&cube("-1-0")).unwrap(),
            cube("11-0")
        );
    }

    #[test]
    fn marker_matching() {
        let m: PartialAssignment = [(1, true), (2, true)].into_iter().collect();
        assert!(cube("01110").matches(&m));
        assert!(!cube("010--").matches(&m));
        assert!(!cube("0-1--").matches(&m));
        assert!(cube("-----").matches(&PartialAssignment::new()));
    }

    #[test]
    fn base3_covers_everything() {
        let n = 3;
        let all: std::collections::HashSet<Subcube> =
            (0..27).map(|k| Subcube::from_base3(n, k)).collect();
        assert_eq!(all.len(), 27);
    }

    #[test]
    fn json_form() {
        let names = NameIndex::new(vec!["a".into(), "b".into()]).unwrap();
        let h = cube("1-");
        let v = h.to_json_value(names.names());
        assert_eq!(v.to_string(), r#"{"a":1,"b":"*"}"#);
        assert_eq!(Subcube::from_json_value(&names, &v).unwrap(), h);
    }
}
