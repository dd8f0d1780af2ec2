use thiserror::Error;

use crate::{abelian, hnp, kummer, lee, localnorm, ono, units};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Abelian(#[from] abelian::AbelianError),
    #[error(transparent)]
    Kummer(#[from] kummer::KummerError),
    #[error(transparent)]
    Lee(#[from] lee::LeeError),
    #[error(transparent)]
    Hnp(#[from] hnp::HnpError),
    #[error(transparent)]
    LocalNorm(#[from] localnorm::LocalNormError),
    #[error(transparent)]
    Units(#[from] units::UnitsError),
    #[error(transparent)]
    Ono(#[from] ono::OnoError),
}
