//! Deciding production of a concrete molecule by concrete rules through the solver, for
//! cross-checking the encoding against the oracle.

use glycan_core::{Molecule, Rule};
use glycan_smt::{SatResult, Session, SolverConfig, VarPool};

use crate::cegis::SynthError;
use crate::encode::{encode_produce, EncodeOptions};
use crate::template::{concrete_rule_view, MolView};

pub struct ProduceChecker {
    session: Session,
    pool: VarPool,
    opts: EncodeOptions,
}

impl ProduceChecker {
    pub fn new(cfg: SolverConfig, opts: EncodeOptions) -> Result<Self, SynthError> {
        Ok(ProduceChecker {
            session: Session::open(cfg)?,
            pool: VarPool::new(),
            opts,
        })
    }

    pub fn options(&self) -> &EncodeOptions {
        &self.opts
    }

    /// Whether the encoding of "`rules` produce `m`" is satisfiable.
    pub fn produces(&mut self, m: &Molecule, rules: &[Rule]) -> Result<SatResult, SynthError> {
        let views = rules
            .iter()
            .enumerate()
            .map(|(i, r)| concrete_rule_view(r, i, self.opts.depth, self.opts.width))
            .collect::<Result<Vec<_>, _>>()?;
        let mol = MolView::from_molecule(m, self.opts.width)?;
        let (f, _) = encode_produce(&mut self.pool, &mol, &views, &self.opts, "q");
        self.session.push()?;
        self.session.assert(&self.pool, &f)?;
        let ans = self.session.check()?;
        self.session.pop()?;
        Ok(ans)
    }
}
