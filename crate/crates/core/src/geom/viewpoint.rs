use std::collections::BTreeMap;

use super::{GeomError, VolumePath, VolumeTree};
use crate::scene::{Axis, Plane};

/// Named camera preset, usually read from a resource file.
#[derive(Debug, Clone, PartialEq)]
pub struct Viewpoint {
    pub axis: Axis,
    pub slice: Option<Plane>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSettings {
    pub axis: Axis,
    pub slice: Option<Plane>,
    /// Only this subtree is shown.
    pub subtree: VolumePath,
}

pub fn subtree_view(
    tree: &VolumeTree,
    path: &VolumePath,
    viewpoint: &str,
    table: &BTreeMap<String, Viewpoint>,
) -> Result<SceneSettings, GeomError> {
    let vp = table
        .get(viewpoint)
        .ok_or_else(|| GeomError::UnknownViewpoint(viewpoint.to_string()))?;
    tree.volume_info(path)?;
    Ok(SceneSettings {
        axis: vp.axis,
        slice: vp.slice,
        subtree: path.clone(),
    })
}
