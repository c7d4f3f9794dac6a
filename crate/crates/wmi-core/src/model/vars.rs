use std::fmt;
use std::sync::Arc;

/// A real-valued problem variable, identified by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RealVar(pub Arc<str>);

/// A Boolean problem variable, identified by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoolVar(pub Arc<str>);

/// A fresh variable labeling one if-then-else occurrence in a weight term.
/// Index 0 is reserved for the top-level variable of the skeleton encoding.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YVar(pub usize);

impl RealVar {
    pub fn new(name: &str) -> Self {
        RealVar(name.into())
    }
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl BoolVar {
    pub fn new(name: &str) -> Self {
        BoolVar(name.into())
    }
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RealVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for RealVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for BoolVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for BoolVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for YVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "y")
        } else {
            write!(f, "y{}", self.0)
        }
    }
}

impl fmt::Debug for YVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
