use std::collections::BTreeMap;

use super::{Primitive, SceneError, Transform};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneNode {
    /// Placement relative to the parent node.
    pub transform: Transform,
    pub primitives: Vec<Primitive>,
}

/// Hierarchy of transformed nodes addressed by slash-joined paths, rooted
/// at `/`. Paths mirror twig paths.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    nodes: BTreeMap<String, SceneNode>,
}

impl Default for SceneGraph {
    fn default() -> Self {
        Self::new()
    }
}

pub(crate) fn parent_path(path: &str) -> Option<&str> {
    if path == "/" {
        return None;
    }
    match path.rfind('/') {
        Some(0) => Some("/"),
        Some(i) => Some(&path[..i]),
        None => None,
    }
}

impl SceneGraph {
    pub fn new() -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert("/".to_string(), SceneNode::default());
        Self { nodes }
    }

    /// Scene holding `primitives` at the root.
    pub fn from_primitives(primitives: Vec<Primitive>) -> Self {
        let mut scene = Self::new();
        scene.root_mut().primitives = primitives;
        scene
    }

    pub fn root_mut(&mut self) -> &mut SceneNode {
        self.nodes.get_mut("/").expect("root exists")
    }

    /// Adds a node below an existing parent.
    pub fn add_node(&mut self, path: &str, transform: Transform) -> Result<&mut SceneNode, SceneError> {
        if self.nodes.contains_key(path) {
            return Err(SceneError::DuplicateNode(path.to_string()));
        }
        let parent = parent_path(path).ok_or_else(|| SceneError::MissingParent(path.to_string()))?;
        if !path.starts_with('/') || path.ends_with('/') || !self.nodes.contains_key(parent) {
            return Err(SceneError::MissingParent(path.to_string()));
        }
        Ok(self.nodes.entry(path.to_string()).or_insert(SceneNode {
            transform,
            primitives: Vec::new(),
        }))
    }

    /// Adds the node and any missing ancestors (with identity transforms).
    pub fn ensure_node(&mut self, path: &str) -> &mut SceneNode {
        if !self.nodes.contains_key(path) {
            if let Some(parent) = parent_path(path) {
                self.ensure_node(parent);
            }
            self.nodes.insert(path.to_string(), SceneNode::default());
        }
        self.nodes.get_mut(path).expect("just inserted")
    }

    pub fn node(&self, path: &str) -> Option<&SceneNode> {
        self.nodes.get(path)
    }

    pub fn node_mut(&mut self, path: &str) -> Option<&mut SceneNode> {
        self.nodes.get_mut(path)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, &SceneNode)> {
        self.nodes.iter().map(|(p, n)| (p.as_str(), n))
    }

    pub fn nodes_mut(&mut self) -> impl Iterator<Item = (&str, &mut SceneNode)> {
        self.nodes.iter_mut().map(|(p, n)| (p.as_str(), n))
    }

    /// Composition of node transforms from the root down to `path`.
    pub fn world_transform(&self, path: &str) -> Result<Transform, SceneError> {
        let node = self
            .nodes
            .get(path)
            .ok_or_else(|| SceneError::UnknownNode(path.to_string()))?;
        match parent_path(path) {
            None => Ok(node.transform),
            Some(parent) => Ok(self.world_transform(parent)?.then(&node.transform)),
        }
    }

    pub fn primitive_count(&self) -> usize {
        self.nodes.values().map(|n| n.primitives.len()).sum()
    }

    /// All primitives in world coordinates (transforms baked into vertices),
    /// in node path order.
    pub fn flatten(&self) -> Vec<Primitive> {
        let mut out = Vec::with_capacity(self.primitive_count());
        for (path, node) in &self.nodes {
            let world = self.world_transform(path).expect("node exists");
            out.extend(node.primitives.iter().map(|p| p.baked(&world)));
        }
        out
    }
}
