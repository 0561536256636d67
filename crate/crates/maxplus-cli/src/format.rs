//! JSON instance and result files. `null` encodes the `-inf` entry.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use maxplus::ilp::IlpInstance;
use maxplus::knapsack::{Bound, Item, KnapsackInstance, Semantics, SolutionArray, Variant};
use maxplus::mdarray::{ExtInt, MDArray, SizeVec};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrayData {
    pub size: Vec<usize>,
    pub data: Vec<Option<i64>>,
}

impl ArrayData {
    pub fn from_mdarray(a: &MDArray) -> Self {
        ArrayData {
            size: a.size().dims().to_vec(),
            data: a.data().iter().map(|e| e.finite()).collect(),
        }
    }

    pub fn to_mdarray(&self) -> Result<MDArray, CliError> {
        let size = SizeVec::new(self.size.clone()).map_err(CliError::schema)?;
        let data = self
            .data
            .iter()
            .map(|v| match v {
                Some(x) => ExtInt::Finite(*x),
                None => ExtInt::NegInf,
            })
            .collect();
        MDArray::from_vec(size, data).map_err(CliError::schema)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VariantTag {
    ZeroOne,
    Bounded,
    Unbounded,
    ExactEq,
}

impl From<VariantTag> for Variant {
    fn from(v: VariantTag) -> Variant {
        match v {
            VariantTag::ZeroOne => Variant::ZeroOne,
            VariantTag::Bounded => Variant::Bounded,
            VariantTag::Unbounded => Variant::Unbounded,
            VariantTag::ExactEq => Variant::ExactEq,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ItemFile {
    pub w: Vec<u64>,
    pub p: i64,
    /// `null` means unbounded multiplicity
    pub bound: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SemanticsTag {
    ExactWeight,
    AtMostWeight,
}

/// Top-level document; `kind` selects the payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InstanceFile {
    #[serde(rename = "array")]
    Array {
        size: Vec<usize>,
        data: Vec<Option<i64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        semantics: Option<SemanticsTag>,
    },
    #[serde(rename = "conv")]
    Conv {
        a: ArrayData,
        b: ArrayData,
        /// optional third array, used by the upper-bound reduction
        #[serde(skip_serializing_if = "Option::is_none")]
        c: Option<ArrayData>,
    },
    #[serde(rename = "knapsack")]
    Knapsack {
        d: usize,
        t: Vec<u64>,
        variant: VariantTag,
        items: Vec<ItemFile>,
    },
    #[serde(rename = "ilp")]
    Ilp {
        #[serde(rename = "A")]
        a: Vec<Vec<i64>>,
        b: Vec<i64>,
        c: Vec<i64>,
        l: Vec<i64>,
        u: Vec<i64>,
    },
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("schema error in {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = self.to_json();
        fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string(self).expect("serializable");
        text.push('\n');
        text
    }

    pub fn from_solution(sol: &SolutionArray) -> Self {
        let arr = ArrayData::from_mdarray(&sol.array);
        InstanceFile::Array {
            size: arr.size,
            data: arr.data,
            semantics: Some(match sol.semantics {
                Semantics::ExactWeight => SemanticsTag::ExactWeight,
                Semantics::AtMostWeight => SemanticsTag::AtMostWeight,
            }),
        }
    }

    pub fn from_array(a: &MDArray) -> Self {
        let arr = ArrayData::from_mdarray(a);
        InstanceFile::Array {
            size: arr.size,
            data: arr.data,
            semantics: None,
        }
    }

    pub fn as_conv(&self) -> Result<(MDArray, MDArray), CliError> {
        match self {
            InstanceFile::Conv { a, b, .. } => Ok((a.to_mdarray()?, b.to_mdarray()?)),
            _ => Err(CliError::Input("expected a \"conv\" file".into())),
        }
    }

    /// The three arrays of an upper-bound question; requires the optional
    /// `c` field.
    pub fn as_conv_triple(&self) -> Result<(MDArray, MDArray, MDArray), CliError> {
        match self {
            InstanceFile::Conv { a, b, c: Some(c) } => {
                Ok((a.to_mdarray()?, b.to_mdarray()?, c.to_mdarray()?))
            }
            InstanceFile::Conv { c: None, .. } => Err(CliError::Input(
                "this reduction needs a \"conv\" file with a third array \"c\"".into(),
            )),
            _ => Err(CliError::Input("expected a \"conv\" file".into())),
        }
    }

    pub fn as_knapsack(&self) -> Result<KnapsackInstance, CliError> {
        match self {
            InstanceFile::Knapsack {
                d,
                t,
                variant,
                items,
            } => {
                if t.len() != *d {
                    return Err(CliError::Input(format!(
                        "capacity rank {} does not match d = {d}",
                        t.len()
                    )));
                }
                let items = items
                    .iter()
                    .map(|i| {
                        Item::new(
                            i.w.clone(),
                            i.p,
                            match i.bound {
                                Some(b) => Bound::Finite(b),
                                None => Bound::Unbounded,
                            },
                        )
                    })
                    .collect();
                KnapsackInstance::new(items, t.clone(), (*variant).into()).map_err(CliError::schema)
            }
            _ => Err(CliError::Input("expected a \"knapsack\" file".into())),
        }
    }

    pub fn as_ilp(&self) -> Result<IlpInstance, CliError> {
        match self {
            InstanceFile::Ilp { a, b, c, l, u } => {
                IlpInstance::new(a.clone(), b.clone(), c.clone(), l.clone(), u.clone())
                    .map_err(CliError::schema)
            }
            _ => Err(CliError::Input("expected an \"ilp\" file".into())),
        }
    }
}

/// Stable hex digest of a serialized document.
pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}
