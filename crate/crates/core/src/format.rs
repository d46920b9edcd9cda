//! Text format for vector lists.
//!
//! ```toml
//! # optional; otherwise the space comes from the command line
//! space = { kind = "schreier" }
//!
//! [[vector]]
//! entries = { "1" = "1/2", "3" = "-1" }
//!
//! [[vector]]
//! entries = { "2:1" = "1" }   # depth-2 index (block 2, coordinate 1)
//! tail = "0"
//! ```
//!
//! Scalars are `"p/q"` strings, decimal strings or TOML integers; `tail`
//! defaults to 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::SpaceDescriptor;
use crate::vector::FiniteVector;

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorList {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDescriptor>,
    #[serde(default, rename = "vector")]
    pub vectors: Vec<FiniteVector>,
}

impl VectorList {
    pub fn new(space: Option<SpaceDescriptor>, vectors: Vec<FiniteVector>) -> Self {
        VectorList { space, vectors }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let list: VectorList = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(space) = &list.space {
            space.validate()?;
        }
        Ok(list)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("vector lists always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::vector::CoordIndex;

    #[test]
    fn parses_flat_and_nested_indices() {
        let text = r#"
            [[vector]]
            entries = { "1" = "1/2", "3" = -1 }

            [[vector]]
            entries = { "2:1" = "0.25" }
        "#;
        let list = VectorList::parse(text).unwrap();
        assert!(list.space.is_none());
        assert_eq!(list.vectors[0].get(&CoordIndex::flat(1)), &rat(1, 2));
        assert_eq!(list.vectors[0].get(&CoordIndex::flat(3)), &int(-1));
        assert_eq!(list.vectors[1].get(&CoordIndex::pair(2, 1)), &rat(1, 4));
    }

    #[test]
    fn round_trip_with_space() {
        let v = FiniteVector::from_slice(&[int(1), rat(-2, 3)]).add(&FiniteVector::constant(int(-1)));
        let list = VectorList::new(Some(SpaceDescriptor::C), vec![v, FiniteVector::basis(4)]);
        let text = list.to_text();
        assert_eq!(VectorList::parse(&text).unwrap(), list);
    }

    #[test]
    fn rejects_garbage() {
        assert!(VectorList::parse("[[vector]]\nentries = { \"0\" = \"1\" }").is_err());
        assert!(VectorList::parse("[[vector]]\nentries = { \"1\" = \"1/0\" }").is_err());
        assert!(VectorList::parse("bogus = 1").is_err());
    }
}
