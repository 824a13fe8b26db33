//! Contiguous SFC partitions, per-partition side grouping and the face-data
//! exchange contract.
//!
//! The geometric master of a side never changes with the partition count,
//! so flux evaluation is bitwise independent of `k`. What alternates on
//! partition interfaces is the *compute owner*: the partition that receives
//! the other side's trace, evaluates the flux and sends it back.

use super::{Mesh, SideKind};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::ops::Range;

/// Balanced contiguous ranges; sizes differ by at most one, larger ones first.
pub fn partition_ranges(n_elems: usize, k: usize) -> Result<Vec<Range<usize>>> {
    if k == 0 || k > n_elems {
        return Err(Error::InvalidArgument(format!("partition count {k} outside 1..={n_elems}")));
    }
    let base = n_elems / k;
    let extra = n_elems % k;
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for p in 0..k {
        let len = base + usize::from(p < extra);
        out.push(start..start + len);
        start += len;
    }
    Ok(out)
}

/// Side ids touched by one partition, in processing order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SideGroups {
    pub boundary: Vec<usize>,
    /// Sides with both elements in this partition, including mortars it owns.
    pub inner: Vec<usize>,
    /// Partition-interface sides this partition computes.
    pub mpi_master: Vec<usize>,
    /// Partition-interface sides computed by the neighbor.
    pub mpi_slave: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partitioning {
    pub ranges: Vec<Range<usize>>,
    pub elem_part: Vec<usize>,
    /// Partition computing each side's flux.
    pub side_owner: Vec<usize>,
    /// Sides whose two elements live in different partitions, ascending id.
    pub interface: Vec<usize>,
    /// Index into `interface` per side, `usize::MAX` for local sides.
    pub mirror_slot: Vec<usize>,
    pub groups: Vec<SideGroups>,
}

impl Partitioning {
    pub fn new(mesh: &Mesh, k: usize) -> Result<Self> {
        let ranges = partition_ranges(mesh.n_elems(), k)?;
        let mut elem_part = vec![0; mesh.n_elems()];
        for (p, r) in ranges.iter().enumerate() {
            for e in r.clone() {
                elem_part[e] = p;
            }
        }
        let mut side_owner = vec![0; mesh.sides.len()];
        let mut interface = Vec::new();
        let mut alternate: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        for s in &mesh.sides {
            let pm = elem_part[s.master.elem];
            side_owner[s.id] = match s.kind {
                SideKind::MortarChild { slave, .. } if elem_part[slave.elem] != pm => {
                    // mortars are always computed next to the big element
                    interface.push(s.id);
                    pm
                }
                SideKind::Interior { slave } if elem_part[slave.elem] != pm => {
                    interface.push(s.id);
                    let ps = elem_part[slave.elem];
                    let key = (pm.min(ps), pm.max(ps));
                    let turn = alternate.entry(key).or_insert(false);
                    let owner = if *turn { key.1 } else { key.0 };
                    *turn = !*turn;
                    owner
                }
                // mortars, boundaries and local sides stay with the geometric master
                _ => pm,
            };
        }
        let mut mirror_slot = vec![usize::MAX; mesh.sides.len()];
        for (k, &s) in interface.iter().enumerate() {
            mirror_slot[s] = k;
        }
        let mut groups = vec![SideGroups::default(); k];
        for s in &mesh.sides {
            let owner = side_owner[s.id];
            if s.is_boundary() {
                groups[owner].boundary.push(s.id);
            } else if mirror_slot[s.id] != usize::MAX {
                groups[owner].mpi_master.push(s.id);
                let slave = s.slave().expect("interface sides have two elements");
                let (a, b) = (elem_part[s.master.elem], elem_part[slave.elem]);
                let other = if a == owner { b } else { a };
                groups[other].mpi_slave.push(s.id);
            } else {
                groups[owner].inner.push(s.id);
            }
        }
        Ok(Self { ranges, elem_part, side_owner, interface, mirror_slot, groups })
    }

    pub fn count(&self) -> usize {
        self.ranges.len()
    }

    /// True if `elem` writes its trace of `side` to the outbox instead of the side slot.
    #[inline]
    pub fn is_remote(&self, side: usize, elem: usize) -> bool {
        self.mirror_slot[side] != usize::MAX && self.elem_part[elem] != self.side_owner[side]
    }

    /// Moves traces written by non-owners (`outbox`, one block of `width`
    /// values per interface side) into the owner-visible slots: the master
    /// slot if the non-owner is the master element, else the slave slot.
    pub fn exchange_face_data(
        &self,
        mesh: &Mesh,
        outbox: &[f64],
        width: usize,
        master_slots: &mut [f64],
        slave_slots: &mut [f64],
    ) -> Result<()> {
        if outbox.len() < self.interface.len() * width {
            return Err(Error::Exchange(format!(
                "outbox holds {} values, {} interface sides need {}",
                outbox.len(),
                self.interface.len(),
                self.interface.len() * width
            )));
        }
        for (k, &s) in self.interface.iter().enumerate() {
            let src = &outbox[k * width..(k + 1) * width];
            let master = mesh.sides[s].master.elem;
            let dst = if self.elem_part[master] != self.side_owner[s] { &mut *master_slots } else { &mut *slave_slots };
            dst[s * width..(s + 1) * width].copy_from_slice(src);
        }
        Ok(())
    }

    /// Sends owner-computed side data back to the non-owning partition's
    /// inbox, taking the master or slave view according to its role.
    pub fn return_face_data(&self, mesh: &Mesh, master_vals: &[f64], slave_vals: &[f64], width: usize, inbox: &mut [f64]) {
        for (k, &s) in self.interface.iter().enumerate() {
            let master = mesh.sides[s].master.elem;
            let src = if self.elem_part[master] != self.side_owner[s] { master_vals } else { slave_vals };
            inbox[k * width..(k + 1) * width].copy_from_slice(&src[s * width..(s + 1) * width]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Bounds;

    #[test]
    fn balanced_ranges() {
        let sizes: Vec<usize> = partition_ranges(10, 3).unwrap().iter().map(|r| r.len()).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(partition_ranges(10, 1).unwrap(), vec![0..10]);
        assert!(partition_ranges(5, 5).unwrap().iter().all(|r| r.len() == 1));
        assert!(partition_ranges(5, 0).is_err());
        assert!(partition_ranges(5, 6).is_err());
    }

    #[test]
    fn interface_ownership_is_balanced() {
        let m = Mesh::generate_cartesian(4, 4, Bounds::unit(), ["w"; 4], [false; 2]).unwrap();
        let p = Partitioning::new(&m, 2).unwrap();
        let a = p.groups[0].mpi_master.len() as i64;
        let b = p.groups[1].mpi_master.len() as i64;
        assert!(a + b > 0);
        assert!((a - b).abs() <= 1);
        assert_eq!(p.groups[0].mpi_slave.len() as i64, b);
        // every side appears exactly once among owners' groups
        let mut seen = vec![0; m.sides.len()];
        for g in &p.groups {
            for &s in g.boundary.iter().chain(&g.inner).chain(&g.mpi_master) {
                seen[s] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn single_partition_has_no_interface() {
        let m = Mesh::generate_cartesian(3, 3, Bounds::unit(), ["w"; 4], [true; 2]).unwrap();
        let p = Partitioning::new(&m, 1).unwrap();
        assert!(p.interface.is_empty());
        let mut um = vec![1.0; m.sides.len()];
        let mut us = vec![2.0; m.sides.len()];
        let before = (um.clone(), us.clone());
        p.exchange_face_data(&m, &[], 1, &mut um, &mut us).unwrap();
        assert_eq!((um, us), before);
    }

    #[test]
    fn exchange_is_a_pure_copy() {
        let m = Mesh::generate_cartesian(2, 1, Bounds::unit(), ["w"; 4], [false; 2]).unwrap();
        let p = Partitioning::new(&m, 2).unwrap();
        assert_eq!(p.interface.len(), 1);
        let s = p.interface[0];
        let width = 3;
        let mut um = vec![f64::NAN; m.sides.len() * width];
        let mut us = vec![f64::NAN; m.sides.len() * width];
        let outbox = vec![0.25, -1.5, 7.0];
        p.exchange_face_data(&m, &outbox, width, &mut um, &mut us).unwrap();
        // partition 0 owns the first interface side, so the slave's trace moved
        assert_eq!(p.side_owner[s], 0);
        assert_eq!(&us[s * width..(s + 1) * width], &outbox[..]);
        assert!(p.exchange_face_data(&m, &[0.0], width, &mut um, &mut us).is_err());
    }
}
