use crate::inr::MlpArchitecture;

use super::{BoundingBox, CodecError};

/// Area tiers mapping a bounding box to an object network size.
///
/// Entries are `(max_area_px, arch)` in strictly increasing area order; the
/// last entry has no bound and catches every larger box.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSizeTable {
    tiers: Vec<(Option<usize>, MlpArchitecture)>,
}

impl ObjectSizeTable {
    /// `bounded` tiers in increasing area order, followed by the catch-all arch.
    pub fn new(
        bounded: Vec<(usize, MlpArchitecture)>,
        catch_all: MlpArchitecture,
    ) -> Result<Self, CodecError> {
        if bounded.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(CodecError::InvalidTable(
                "area thresholds must be strictly increasing".to_owned(),
            ));
        }
        let mut tiers: Vec<_> = bounded
            .into_iter()
            .map(|(a, arch)| (Some(a), arch))
            .collect();
        tiers.push((None, catch_all));
        Ok(Self { tiers })
    }

    pub fn tiers(&self) -> &[(Option<usize>, MlpArchitecture)] {
        &self.tiers
    }

    /// First tier whose bound covers the box area.
    pub fn select(&self, bbox: &BoundingBox) -> MlpArchitecture {
        let area = bbox.area();
        self.tiers
            .iter()
            .find(|(max, _)| max.is_none_or(|m| area <= m))
            .map(|(_, arch)| *arch)
            .expect("table always ends with a catch-all tier")
    }
}

impl Default for ObjectSizeTable {
    /// `≤1024 px → 3x10`, `≤4096 → 3x15`, `≤16384 → 5x17`, otherwise `5x24`.
    fn default() -> Self {
        let a = |l, h| MlpArchitecture::new(l, h).expect("static architecture");
        Self::new(
            vec![(1024, a(3, 10)), (4096, a(3, 15)), (16384, a(5, 17))],
            a(5, 24),
        )
        .expect("static table")
    }
}

/// Picks the object network size for `bbox`.
pub fn select_object_arch(bbox: &BoundingBox, table: &ObjectSizeTable) -> MlpArchitecture {
    table.select(bbox)
}
