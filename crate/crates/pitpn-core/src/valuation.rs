//! Parameter valuations: total assignments of rationals to time
//! parameters and naturals to marking parameters.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::expr::{Sort, Var};
use crate::net::{Net, ParamId};
use crate::rat::Rat;
use crate::CoreError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamValuation {
    values: BTreeMap<Var, Rat>,
}

impl ParamValuation {
    pub fn empty() -> Self {
        ParamValuation::default()
    }

    /// Builds a valuation for the net's parameters and checks totality,
    /// naturality of marking-parameter values, and the initial constraint.
    pub fn for_net<I, P>(net: &Net, pairs: I) -> Result<Self, CoreError>
    where
        I: IntoIterator<Item = (P, Rat)>,
        P: Into<ParamId>,
    {
        let mut values = BTreeMap::new();
        for (p, r) in pairs {
            let var = net.param_var(&p.into())?;
            values.insert(var, r);
        }
        let v = ParamValuation { values };
        v.check_against(net)?;
        Ok(v)
    }

    pub fn check_against(&self, net: &Net) -> Result<(), CoreError> {
        for var in net.param_vars() {
            let val = self
                .values
                .get(&var)
                .ok_or_else(|| CoreError::MissingParam(var.name.clone()))?;
            if var.sort == Sort::Int && (!val.is_integer() || val.is_negative()) {
                return Err(CoreError::NotNatural(var.name.clone()));
            }
        }
        let env = self.env();
        if !net.init_constraint().eval(&env)? {
            return Err(CoreError::ConstraintViolated);
        }
        Ok(())
    }

    pub fn get(&self, var: &Var) -> Option<&Rat> {
        self.values.get(var)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Var, &Rat)> {
        self.values.iter()
    }

    /// Evaluation environment over this valuation.
    pub fn env(&self) -> impl Fn(&Var) -> Option<Rat> + '_ {
        move |v: &Var| self.values.get(v).cloned()
    }
}

impl FromIterator<(Var, Rat)> for ParamValuation {
    fn from_iter<I: IntoIterator<Item = (Var, Rat)>>(iter: I) -> Self {
        ParamValuation { values: iter.into_iter().collect() }
    }
}
