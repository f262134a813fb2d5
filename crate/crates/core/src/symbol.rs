//! Edge labels, type names and typed symbols.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

macro_rules! name_newtype {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl AsRef<str>) -> Self {
                $name(Arc::from(s.as_ref()))
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
                $name::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name::new(s)
            }
        }
    };
}

name_newtype!(
    /// An edge label (predicate).
    Label
);
name_newtype!(
    /// The name of a shape type.
    TypeName
);

/// Reserved name of the universal type.
pub const TOP: &str = "TOP";

/// A label paired with the type its target must satisfy, written `a::t`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypedSymbol {
    pub label: Label,
    pub ty: TypeName,
}

impl TypedSymbol {
    pub fn new(label: impl Into<Label>, ty: impl Into<TypeName>) -> Self {
        TypedSymbol { label: label.into(), ty: ty.into() }
    }
}

impl fmt::Display for TypedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.label, self.ty)
    }
}

impl fmt::Debug for TypedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A label paired with a set of candidate types, the neighbourhood symbol of
/// a multi-type typing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LabeledTypes {
    pub label: Label,
    pub types: BTreeSet<TypeName>,
}

impl fmt::Display for LabeledTypes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{{", self.label)?;
        for (i, t) in self.types.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}
