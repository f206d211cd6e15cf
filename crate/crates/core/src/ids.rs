//! Interned identifiers for states and alphabet symbols.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

macro_rules! interned {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl AsRef<str>) -> Self {
                Self(Arc::from(s.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", &*self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(Arc::from(s))
            }
        }

        impl From<&String> for $name {
            fn from(s: &String) -> Self {
                Self::new(s)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d).map(Self::from)
            }
        }
    };
}

interned!(
    /// Name of a state value.
    StateId
);
interned!(
    /// A character of an input or output alphabet. The empty character is
    /// never a `Symbol`; it is represented by `None` wherever it may occur.
    Symbol
);

/// Spelling of the empty character in every textual artifact.
pub const EPS: &str = "eps";

/// Render a tuple of states as a product state id, e.g. `(a|b)`.
pub fn tuple_id<'a>(parts: impl IntoIterator<Item = &'a StateId>) -> StateId {
    let inner: Vec<&str> = parts.into_iter().map(StateId::as_str).collect();
    StateId::from(format!("({})", inner.join("|")))
}

pub fn render_opt(sym: Option<&Symbol>) -> &str {
    sym.map_or(EPS, Symbol::as_str)
}
