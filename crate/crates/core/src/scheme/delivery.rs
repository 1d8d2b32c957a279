//! XOR delivery: file store, encoder, per-user decoder and packet traces.

use std::io::{Read, Write};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::{DeliveryPlan, PlacementMap, SchemeInstance};
use crate::error::{Error, Result};

pub const DEFAULT_SUBFILE_LEN: usize = 64;

const TRACE_MAGIC: &[u8; 4] = b"PGTR";
const TRACE_VERSION: u32 = 1;

/// N files of F equal-length subfiles, stored contiguously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileStore {
    files: usize,
    subfiles: usize,
    subfile_len: usize,
    data: Vec<u8>,
}

impl FileStore {
    pub fn new(files: usize, subfiles: usize, subfile_len: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != files * subfiles * subfile_len {
            return Err(Error::InvalidDemands(format!(
                "store of {files}x{subfiles}x{subfile_len} bytes given {} bytes",
                data.len()
            )));
        }
        Ok(FileStore {
            files,
            subfiles,
            subfile_len,
            data,
        })
    }

    pub fn zeroed(files: usize, subfiles: usize, subfile_len: usize) -> Self {
        FileStore {
            files,
            subfiles,
            subfile_len,
            data: vec![0; files * subfiles * subfile_len],
        }
    }

    /// Bytes drawn from a SplitMix64 stream seeded with `seed`.
    pub fn random(files: usize, subfiles: usize, subfile_len: usize, seed: u64) -> Self {
        let mut s = Self::zeroed(files, subfiles, subfile_len);
        SplitMix64::seed_from_u64(seed).fill_bytes(&mut s.data);
        s
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn subfiles(&self) -> usize {
        self.subfiles
    }

    pub fn subfile_len(&self) -> usize {
        self.subfile_len
    }

    pub fn file(&self, i: usize) -> &[u8] {
        let size = self.subfiles * self.subfile_len;
        &self.data[i * size..(i + 1) * size]
    }

    pub fn subfile(&self, i: usize, f: usize) -> &[u8] {
        let start = (i * self.subfiles + f) * self.subfile_len;
        &self.data[start..start + self.subfile_len]
    }
}

/// What user `user` holds: every subfile whose placement bit is clear, for every file.
#[derive(Clone, Copy, Debug)]
pub struct CacheView<'a> {
    store: &'a FileStore,
    placement: &'a PlacementMap,
    user: usize,
}

impl<'a> CacheView<'a> {
    pub fn new(store: &'a FileStore, placement: &'a PlacementMap, user: usize) -> Self {
        CacheView { store, placement, user }
    }

    pub fn get(&self, file: usize, subfile: usize) -> Option<&'a [u8]> {
        (!self.placement.is_uncached(self.user, subfile)).then(|| self.store.subfile(file, subfile))
    }
}

/// One broadcast transmission; the header names the clique it serves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedPacket {
    pub clique_id: u32,
    pub payload: Vec<u8>,
}

fn check_demands(users: usize, files: usize, demands: &[usize]) -> Result<()> {
    if demands.len() != users {
        return Err(Error::InvalidDemands(format!(
            "{} demands for {users} users",
            demands.len()
        )));
    }
    if let Some((u, &d)) = demands.iter().enumerate().find(|&(_, &d)| d >= files) {
        return Err(Error::InvalidDemands(format!("user {u} demands file {d} of {files}")));
    }
    Ok(())
}

/// One packet per clique: the XOR of the demanded subfiles of its members.
pub fn encode(plan: &DeliveryPlan, store: &FileStore, demands: &[usize]) -> Result<Vec<CodedPacket>> {
    check_demands(plan.users(), store.files(), demands)?;
    if store.subfiles() != plan.subfiles() {
        return Err(Error::InvalidDemands(format!(
            "store has {} subfiles per file, scheme needs {}",
            store.subfiles(),
            plan.subfiles()
        )));
    }
    Ok(plan
        .cliques()
        .iter()
        .enumerate()
        .map(|(id, clique)| {
            let mut payload = vec![0u8; store.subfile_len()];
            for v in clique {
                let src = store.subfile(demands[v.user as usize], v.subfile as usize);
                payload.iter_mut().zip(src).for_each(|(a, b)| *a ^= b);
            }
            CodedPacket {
                clique_id: id as u32,
                payload,
            }
        })
        .collect())
}

fn find_packet(packets: &[CodedPacket], id: u32) -> Option<&CodedPacket> {
    if let Some(p) = packets.get(id as usize).filter(|p| p.clique_id == id) {
        return Some(p);
    }
    match packets.binary_search_by_key(&id, |p| p.clique_id) {
        Ok(i) => Some(&packets[i]),
        Err(_) => packets.iter().find(|p| p.clique_id == id),
    }
}

/// Reconstructs the file demanded by `user` from its cache and the broadcast.
///
/// Each uncached subfile lies in exactly one clique; every other term of that
/// clique's packet is cached at `user`, so XOR-ing them out leaves the subfile.
pub fn decode(
    user: usize,
    packets: &[CodedPacket],
    plan: &DeliveryPlan,
    cache: &CacheView<'_>,
    demands: &[usize],
) -> Result<Vec<u8>> {
    let store = cache.store;
    let placement = cache.placement;
    check_demands(plan.users(), store.files(), demands)?;
    if user >= plan.users() {
        return Err(Error::InvalidDemands(format!("no user {user}")));
    }
    let want = demands[user];
    let len = store.subfile_len();
    let mut out = vec![0u8; store.subfiles() * len];
    let mut filled = vec![false; store.subfiles()];
    for f in 0..store.subfiles() {
        if let Some(bytes) = cache.get(want, f) {
            out[f * len..(f + 1) * len].copy_from_slice(bytes);
            filled[f] = true;
        }
    }
    for &(f, ci) in plan.served(user) {
        let f = f as usize;
        let packet = find_packet(packets, ci).ok_or(Error::MissingPacket { user, subfile: f })?;
        let slot = &mut out[f * len..(f + 1) * len];
        slot.copy_from_slice(&packet.payload);
        for v in &plan.cliques()[ci as usize] {
            let (u, g) = (v.user as usize, v.subfile as usize);
            if u == user {
                continue;
            }
            let side = CacheView::new(store, placement, user)
                .get(demands[u], g)
                .ok_or(Error::Undecodable {
                    user,
                    file: demands[u],
                    subfile: g,
                })?;
            slot.iter_mut().zip(side).for_each(|(a, b)| *a ^= b);
        }
        filled[f] = true;
    }
    if let Some(f) = filled.iter().position(|&x| !x) {
        return Err(Error::MissingPacket { user, subfile: f });
    }
    Ok(out)
}

/// Result of one delivery round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeliveryOutcome {
    pub packets: Vec<CodedPacket>,
    /// Per user: decoded bytes equal the demanded file.
    pub decoded_ok: Vec<bool>,
}

impl DeliveryOutcome {
    pub fn all_ok(&self) -> bool {
        self.decoded_ok.iter().all(|&x| x)
    }
}

/// Encodes for `demands`, decodes at every user and compares with the store.
pub fn simulate(scheme: &SchemeInstance, store: &FileStore, demands: &[usize]) -> Result<DeliveryOutcome> {
    let packets = encode(scheme.delivery(), store, demands)?;
    let decoded_ok = (0..scheme.num_users())
        .map(|u| {
            let cache = CacheView::new(store, scheme.placement(), u);
            let file = decode(u, &packets, scheme.delivery(), &cache, demands)?;
            Ok(file == store.file(demands[u]))
        })
        .collect::<Result<_>>()?;
    Ok(DeliveryOutcome { packets, decoded_ok })
}

/// Demand vectors from a SplitMix64 stream: user u of each draw asks for
/// `next_u64() mod N`, users in index order.
#[derive(Clone, Debug)]
pub struct DemandSampler {
    rng: SplitMix64,
}

impl DemandSampler {
    pub fn new(seed: u64) -> Self {
        DemandSampler {
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self, users: usize, files: usize) -> Vec<usize> {
        (0..users).map(|_| (self.rng.next_u64() % files as u64) as usize).collect()
    }

    pub fn all_equal(users: usize, file: usize) -> Vec<usize> {
        vec![file; users]
    }

    /// User u asks for file u; needs N >= K.
    pub fn all_distinct(users: usize) -> Vec<usize> {
        (0..users).collect()
    }
}

/// Binary packet dump: "PGTR", u32 version, u32 count, then per packet
/// u32 clique id, u32 payload length, payload. Integers little-endian.
pub fn write_trace<W: Write>(mut w: W, packets: &[CodedPacket]) -> Result<()> {
    w.write_all(TRACE_MAGIC)?;
    w.write_all(&TRACE_VERSION.to_le_bytes())?;
    w.write_all(&(packets.len() as u32).to_le_bytes())?;
    for p in packets {
        w.write_all(&p.clique_id.to_le_bytes())?;
        w.write_all(&(p.payload.len() as u32).to_le_bytes())?;
        w.write_all(&p.payload)?;
    }
    Ok(())
}

pub fn read_trace<R: Read>(mut r: R) -> Result<Vec<CodedPacket>> {
    fn u32_le<R: Read>(r: &mut R) -> Result<u32> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != TRACE_MAGIC {
        return Err(Error::Schema("not a packet trace".into()));
    }
    let version = u32_le(&mut r)?;
    if version != TRACE_VERSION {
        return Err(Error::Schema(format!("trace version {version}, expected {TRACE_VERSION}")));
    }
    let count = u32_le(&mut r)?;
    let mut out = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let clique_id = u32_le(&mut r)?;
        let len = u32_le(&mut r)? as usize;
        let mut payload = vec![0u8; len];
        r.read_exact(&mut payload)?;
        out.push(CodedPacket { clique_id, payload });
    }
    Ok(out)
}
