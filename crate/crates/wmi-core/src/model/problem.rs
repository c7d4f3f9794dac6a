use std::collections::BTreeSet;

use super::atom::Atom;
use super::formula::Formula;
use super::vars::{BoolVar, RealVar};
use super::weight::WeightTerm;
use crate::error::{Result, WmiError};

/// One WMI instance: a formula over mixed Boolean/real atoms, a support
/// region, a weight term, and the declared variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Problem {
    pub phi: Formula,
    pub chi: Formula,
    pub weight: WeightTerm,
    pub reals: BTreeSet<RealVar>,
    pub bools: BTreeSet<BoolVar>,
}

impl Problem {
    /// Check that every variable used by the formulas and the weight is
    /// declared and that no EUF atoms leaked into the input.
    pub fn validate(&self) -> Result<()> {
        let mut atoms = self.phi.atoms();
        atoms.extend(self.chi.atoms());
        atoms.extend(self.weight.atoms());
        for a in &atoms {
            match a {
                Atom::Bool(v) => {
                    if !self.bools.contains(v) {
                        return Err(WmiError::UnknownIdentifier(v.name().to_string()));
                    }
                }
                Atom::Lra { term, .. } => {
                    for v in term.vars() {
                        if !self.reals.contains(v) {
                            return Err(WmiError::UnknownIdentifier(v.name().to_string()));
                        }
                    }
                }
                Atom::EufEq { .. } => {
                    return Err(WmiError::InvalidModel(
                        "uninterpreted equality atom in input".to_string(),
                    ))
                }
            }
        }
        let mut wvars = BTreeSet::new();
        self.weight.collect_real_vars(&mut wvars);
        for v in wvars {
            if !self.reals.contains(&v) {
                return Err(WmiError::UnknownIdentifier(v.name().to_string()));
            }
        }
        Ok(())
    }

    /// φ ∧ χ.
    pub fn phi_and_chi(&self) -> Formula {
        Formula::and(vec![self.phi.clone(), self.chi.clone()])
    }

    /// Atoms of φ ∧ χ plus all weight-condition atoms.
    pub fn all_atoms(&self) -> BTreeSet<Atom> {
        let mut atoms = self.phi.atoms();
        atoms.extend(self.chi.atoms());
        atoms.extend(self.weight.atoms());
        atoms
    }

    /// Conjoin extra support onto χ, leaving everything else unchanged.
    pub fn with_extra_support(&self, extra: Formula) -> Problem {
        Problem {
            chi: Formula::and(vec![self.chi.clone(), extra]),
            ..self.clone()
        }
    }
}
