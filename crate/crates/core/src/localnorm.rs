//! Local norm indices `[k_v^× : N(L_v^×)]` and unit norm indices
//! `[O_v^× : N(O_{L_v}^×)]`, computed from Galois-group data.
//!
//! For a finite place `v` the caller supplies `G̃_v = Gal(L̃_{v,ab}/k_v)`, the
//! Galois group of the compositum of the maximal abelian subextensions of the
//! `L_w`, together with one subgroup `H_w = Gal(L̃_{v,ab}/L_{w,ab})` per `w | v`.
//! Then `L_{v,ab} = ∩_w L_{w,ab}` has degree `[G̃_v : ⟨H_w⟩]`. The unit index is
//! the same computation on the inertia group `Ĩ_v` with subgroups `J_w`.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::abelian::{join_index, AbelianError, FiniteAbelianGroup, SubgroupGens};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalNormError {
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error("place {0}: no places w above v")]
    NoPlacesAbove(String),
    #[error("place {place}: {what} has ambient {found}, expected {expected}")]
    AmbientMismatch { place: String, what: String, found: String, expected: String },
    #[error("place {0}: real local degrees must be 1 or 2, got {1}")]
    BadRealDegree(String, u32),
    #[error("place {0}: H_w and J_w lists differ in length")]
    CountMismatch(String),
    #[error("place {0}: unit index needs a finite place")]
    NotFinite(String),
    #[error("place {0}: archimedean places cannot be ramified")]
    ArchimedeanRamified(String),
}

/// Local data at one finite place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLocalData {
    pub full_group: FiniteAbelianGroup,
    /// One `H_w` per `w | v`.
    pub decomposition: Vec<SubgroupGens>,
    pub inertia_group: FiniteAbelianGroup,
    /// One `J_w` per `w | v`, in the same order.
    pub inertia: Vec<SubgroupGens>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceKind {
    Finite(FiniteLocalData),
    /// `[L_w : R]` for each `w | v`, each 1 or 2.
    Real {
        local_degrees: Vec<u32>,
    },
    Complex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPlaceData {
    pub place_id: String,
    pub kind: PlaceKind,
    pub in_s: bool,
    /// No `w | v` is unramified.
    pub ramified: bool,
}

impl LocalPlaceData {
    pub fn finite(place_id: impl Into<String>, data: FiniteLocalData) -> Self {
        Self { place_id: place_id.into(), kind: PlaceKind::Finite(data), in_s: false, ramified: false }
    }

    fn check(&self) -> Result<(), LocalNormError> {
        let id = || self.place_id.clone();
        match &self.kind {
            PlaceKind::Finite(d) => {
                if d.decomposition.is_empty() {
                    return Err(LocalNormError::NoPlacesAbove(id()));
                }
                if d.decomposition.len() != d.inertia.len() {
                    return Err(LocalNormError::CountMismatch(id()));
                }
                for (what, ambient, subs) in
                    [("H_w", &d.full_group, &d.decomposition), ("J_w", &d.inertia_group, &d.inertia)]
                {
                    for s in subs {
                        if s.ambient() != ambient {
                            return Err(LocalNormError::AmbientMismatch {
                                place: id(),
                                what: what.to_string(),
                                found: s.ambient().to_string(),
                                expected: ambient.to_string(),
                            });
                        }
                    }
                }
            }
            PlaceKind::Real { local_degrees } => {
                if local_degrees.is_empty() {
                    return Err(LocalNormError::NoPlacesAbove(id()));
                }
                if let Some(&bad) = local_degrees.iter().find(|&&d| d != 1 && d != 2) {
                    return Err(LocalNormError::BadRealDegree(id(), bad));
                }
            }
            PlaceKind::Complex => {}
        }
        if self.ramified && !matches!(self.kind, PlaceKind::Finite(_)) {
            return Err(LocalNormError::ArchimedeanRamified(id()));
        }
        Ok(())
    }
}

/// `[k_v^× : N(L_v^×)] = [L_{v,ab} : k_v]`.
pub fn local_norm_index(d: &LocalPlaceData) -> Result<BigUint, LocalNormError> {
    d.check()?;
    Ok(match &d.kind {
        PlaceKind::Finite(f) => join_index(&f.full_group, &f.decomposition)?,
        PlaceKind::Real { local_degrees } => {
            if local_degrees.contains(&1) {
                BigUint::one()
            } else {
                BigUint::from(2u32)
            }
        }
        PlaceKind::Complex => BigUint::one(),
    })
}

/// `[O_v^× : N(O_{L_v}^×)] = e_v(L/k)`.
pub fn local_unit_norm_index(d: &LocalPlaceData) -> Result<BigUint, LocalNormError> {
    d.check()?;
    match &d.kind {
        PlaceKind::Finite(f) => Ok(join_index(&f.inertia_group, &f.inertia)?),
        _ => Err(LocalNormError::NotFinite(d.place_id.clone())),
    }
}

/// `∏_{v ∈ S} [L_{v,ab} : k_v] · ∏_{v ramified, v ∉ S} e_v(L/k)`.
pub fn global_local_factor(places: &[LocalPlaceData]) -> Result<BigUint, LocalNormError> {
    let mut acc = BigUint::one();
    for d in places {
        d.check()?;
        if d.in_s {
            acc *= local_norm_index(d)?;
        } else if d.ramified {
            acc *= local_unit_norm_index(d)?;
        }
    }
    Ok(acc)
}
