use std::collections::BTreeSet;

use super::{GeomError, LogicalVolume, VolumePath, VolumeTree};
use crate::scene::Transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraversalMode {
    /// Each logical volume once, at its first encounter.
    Logical,
    /// Every placement, with accumulated world transforms.
    Physical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraversalNode {
    pub logical: String,
    pub path: VolumePath,
    pub world: Transform,
}

impl TraversalNode {
    pub fn depth(&self) -> usize {
        self.path.depth() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsageDirection {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Usage {
    /// Logical volumes contained, directly or not.
    Logicals(BTreeSet<String>),
    /// Physical paths instantiating the volume.
    Paths(Vec<VolumePath>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeInfo {
    pub logical: String,
    pub material: String,
    pub sensitive: bool,
    pub copy: u32,
    pub world: Transform,
    pub daughters: usize,
}

impl VolumeTree {
    /// Pre-order walk, daughters in declared order.
    pub fn traverse(&self, mode: TraversalMode) -> Result<Vec<TraversalNode>, GeomError> {
        self.validate()?;
        let root = self.root()?;
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![TraversalNode {
            logical: root.name.clone(),
            path: VolumePath::root(&root.name),
            world: Transform::identity(),
        }];
        while let Some(node) = stack.pop() {
            if mode == TraversalMode::Logical && !seen.insert(node.logical.clone()) {
                continue;
            }
            let lv = &self.logicals[&node.logical];
            for d in lv.daughters.iter().rev() {
                stack.push(TraversalNode {
                    logical: d.logical.clone(),
                    path: node.path.child(&d.logical, d.copy),
                    world: node.world.then(&d.transform),
                });
            }
            out.push(node);
        }
        Ok(out)
    }

    fn select(&self, keep: impl Fn(&LogicalVolume) -> bool) -> Result<Vec<VolumePath>, GeomError> {
        Ok(self
            .traverse(TraversalMode::Physical)?
            .into_iter()
            .filter(|n| keep(&self.logicals[&n.logical]))
            .map(|n| n.path)
            .collect())
    }

    /// Physical paths whose material is exactly `material`.
    pub fn select_by_material(&self, material: &str) -> Result<Vec<VolumePath>, GeomError> {
        self.select(|lv| lv.material == material)
    }

    pub fn select_sensitive(&self) -> Result<Vec<VolumePath>, GeomError> {
        self.select(|lv| lv.sensitive)
    }

    pub fn usage_search(&self, logical: &str, direction: UsageDirection) -> Result<Usage, GeomError> {
        self.logical(logical)?;
        match direction {
            UsageDirection::Forward => {
                self.validate()?;
                let mut found = BTreeSet::new();
                let mut stack = vec![logical.to_string()];
                while let Some(name) = stack.pop() {
                    for d in &self.logicals[&name].daughters {
                        if found.insert(d.logical.clone()) {
                            stack.push(d.logical.clone());
                        }
                    }
                }
                Ok(Usage::Logicals(found))
            }
            UsageDirection::Reverse => Ok(Usage::Paths(self.select(|lv| lv.name == logical)?)),
        }
    }

    /// Properties of one physical volume.
    pub fn volume_info(&self, path: &VolumePath) -> Result<VolumeInfo, GeomError> {
        let unresolved = || GeomError::UnresolvablePath(path.to_string());
        let root = self.root()?;
        let mut steps = path.0.iter();
        match steps.next() {
            Some((name, 0)) if *name == root.name => {}
            _ => return Err(unresolved()),
        }
        let mut lv = root;
        let mut world = Transform::identity();
        let mut copy = 0;
        for (name, c) in steps {
            let placement = lv
                .daughters
                .iter()
                .find(|p| p.logical == *name && p.copy == *c)
                .ok_or_else(unresolved)?;
            world = world.then(&placement.transform);
            copy = *c;
            lv = &self.logicals[name];
        }
        Ok(VolumeInfo {
            logical: lv.name.clone(),
            material: lv.material.clone(),
            sensitive: lv.sensitive,
            copy,
            world,
            daughters: lv.daughters.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{shift, LogicalVolume, Solid};

    fn cube() -> Solid {
        Solid::cuboid(0.5, 0.5, 0.5)
    }

    /// World holds two Layers; each Layer holds L three times.
    fn tree() -> VolumeTree {
        let mut t = VolumeTree::new();
        t.add_logical(LogicalVolume::new("World", "air", false, Solid::cuboid(100.0, 100.0, 100.0))).unwrap();
        t.add_logical(LogicalVolume::new("Layer", "copper", false, Solid::cuboid(10.0, 10.0, 1.0))).unwrap();
        t.add_logical(LogicalVolume::new("L", "silicon", true, cube())).unwrap();
        t.place("World", "Layer", 0, shift(0.0, 0.0, -5.0)).unwrap();
        t.place("World", "Layer", 1, shift(0.0, 0.0, 5.0)).unwrap();
        for i in 0..3 {
            t.place("Layer", "L", i, shift(i as f64 * 2.0, 0.0, 0.0)).unwrap();
        }
        t.set_root("World").unwrap();
        t
    }

    #[test]
    fn logical_vs_physical() {
        let t = tree();
        let logical = t.traverse(TraversalMode::Logical).unwrap();
        assert_eq!(logical.iter().map(|n| n.logical.as_str()).collect::<Vec<_>>(), ["World", "Layer", "L"]);
        let physical = t.traverse(TraversalMode::Physical).unwrap();
        assert_eq!(physical.len(), 1 + 2 + 6);
        assert_eq!(physical[2].path.to_string(), "/World:0/Layer:0/L:0");
        assert_eq!(physical[2].depth(), 2);
        assert_eq!(physical[5].path.to_string(), "/World:0/Layer:1");
    }

    #[test]
    fn single_root() {
        let mut t = VolumeTree::new();
        t.add_logical(LogicalVolume::new("W", "air", false, cube())).unwrap();
        t.set_root("W").unwrap();
        assert_eq!(t.traverse(TraversalMode::Logical).unwrap().len(), 1);
        assert_eq!(t.traverse(TraversalMode::Physical).unwrap().len(), 1);
    }

    #[test]
    fn selectors() {
        let t = tree();
        assert_eq!(t.select_by_material("silicon").unwrap().len(), 6);
        assert_eq!(t.select_by_material("Silicon").unwrap().len(), 0);
        assert_eq!(t.select_sensitive().unwrap().len(), 6);
        assert_eq!(t.select_by_material("copper").unwrap().len(), 2);
    }

    #[test]
    fn usage() {
        let t = tree();
        let Usage::Paths(p) = t.usage_search("L", UsageDirection::Reverse).unwrap() else { panic!() };
        assert_eq!(p.len(), 6);
        let Usage::Logicals(l) = t.usage_search("World", UsageDirection::Forward).unwrap() else { panic!() };
        assert_eq!(l.into_iter().collect::<Vec<_>>(), ["L", "Layer"]);
        let Usage::Logicals(l) = t.usage_search("L", UsageDirection::Forward).unwrap() else { panic!() };
        assert!(l.is_empty());
        assert!(matches!(t.usage_search("Q", UsageDirection::Forward), Err(GeomError::UnknownLogical(_))));
    }

    #[test]
    fn info_composes_translations() {
        let mut t = VolumeTree::new();
        for n in ["A", "B", "C", "D"] {
            t.add_logical(LogicalVolume::new(n, "air", n == "D", cube())).unwrap();
        }
        t.place("A", "B", 0, shift(1.0, 0.0, 0.0)).unwrap();
        t.place("B", "C", 0, shift(0.0, 2.0, 0.0)).unwrap();
        t.place("C", "D", 4, shift(0.0, 0.0, 3.0)).unwrap();
        t.set_root("A").unwrap();
        let root = t.volume_info(&t.root_path().unwrap()).unwrap();
        assert_eq!(root.copy, 0);
        assert!(root.world.is_identity());
        let info = t.volume_info(&"/A:0/B:0/C:0/D:4".parse().unwrap()).unwrap();
        assert_eq!(*info.world.translation_part(), nalgebra::Vector3::new(1.0, 2.0, 3.0));
        assert!(info.sensitive);
        assert_eq!(info.copy, 4);
        assert!(matches!(
            t.volume_info(&"/A:0/B:1".parse().unwrap()),
            Err(GeomError::UnresolvablePath(_))
        ));
        assert!(matches!(t.volume_info(&"/B:0".parse().unwrap()), Err(GeomError::UnresolvablePath(_))));
    }
}
