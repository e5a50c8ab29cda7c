use super::SlotHash;
use crate::error::{Error, Result};

/// Size of one stored record: key, payload, meta word and next offset.
pub const RECORD_BYTES: usize = 24;

const NIL: u32 = u32::MAX;
const OCCUPIED: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy)]
struct Record {
    key: u64,
    payload: u64,
    meta: u32,
    next: u32,
}

const _: () = assert!(std::mem::size_of::<Record>() == RECORD_BYTES);

const EMPTY: Record = Record {
    key: 0,
    payload: 0,
    meta: 0,
    next: NIL,
};

impl Record {
    fn new(key: u64, payload: u64) -> Self {
        Self {
            key,
            payload,
            meta: OCCUPIED,
            next: NIL,
        }
    }

    fn occupied(&self) -> bool {
        self.meta & OCCUPIED != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapStats {
    pub slots: usize,
    pub keys: usize,
    pub empty_slots: usize,
    pub empty_slot_bytes: usize,
    /// Records visited to find a key, averaged over all stored keys.
    pub avg_probe_len: f64,
    /// Longest chain hanging off one home slot.
    pub max_chain: usize,
    /// Slots, overflow records and the hash function.
    pub size_bytes: usize,
}

fn check_input(keys: &[u64], payloads: &[u64]) -> Result<()> {
    if keys.len() != payloads.len() {
        return Err(Error::InvalidArgument(format!(
            "{} keys but {} payloads",
            keys.len(),
            payloads.len()
        )));
    }
    if keys.len() >= NIL as usize {
        return Err(Error::InvalidArgument("too many records for 32-bit offsets".into()));
    }
    Ok(())
}

fn walk(records: &[Record], first: usize, next_of: impl Fn(u32) -> Option<usize>, key: u64) -> Option<u64> {
    let mut i = Some(first);
    while let Some(at) = i {
        let r = &records[at];
        if r.occupied() && r.key == key {
            return Some(r.payload);
        }
        i = next_of(r.next);
    }
    None
}

/// Separate chaining where the first record of every chain lives in the slot
/// array and further records go to an overflow area.
#[derive(Debug, Clone)]
pub struct ChainedHashMap<H> {
    hash: H,
    slots: Vec<Record>,
    overflow: Vec<Record>,
}

impl<H: SlotHash> ChainedHashMap<H> {
    pub fn build(hash: H, keys: &[u64], payloads: &[u64]) -> Result<Self> {
        check_input(keys, payloads)?;
        let mut slots = vec![EMPTY; hash.num_slots()];
        let mut overflow: Vec<Record> = Vec::new();
        // last overflow record of each chain
        let mut tails = vec![NIL; slots.len()];
        for (&k, &p) in keys.iter().zip(payloads) {
            let s = hash.slot(k);
            if !slots[s].occupied() {
                slots[s] = Record::new(k, p);
                continue;
            }
            let idx = overflow.len() as u32;
            overflow.push(Record::new(k, p));
            match tails[s] {
                NIL => slots[s].next = idx,
                t => overflow[t as usize].next = idx,
            }
            tails[s] = idx;
        }
        Ok(Self { hash, slots, overflow })
    }

    pub fn hash(&self) -> &H {
        &self.hash
    }

    pub fn get(&self, key: u64) -> Option<u64> {
        let head = &self.slots[self.hash.slot(key)];
        if head.occupied() && head.key == key {
            return Some(head.payload);
        }
        let next = |n: u32| (n != NIL).then_some(n as usize);
        next(head.next).and_then(|first| walk(&self.overflow, first, next, key))
    }

    pub fn stats(&self) -> MapStats {
        let mut probes = 0usize;
        let mut max_chain = 0usize;
        let mut keys = 0usize;
        let mut empty = 0usize;
        for head in &self.slots {
            if !head.occupied() {
                empty += 1;
                continue;
            }
            let mut len = 1;
            let mut n = head.next;
            while n != NIL {
                len += 1;
                n = self.overflow[n as usize].next;
            }
            // the i-th record of a chain needs i probes
            probes += len * (len + 1) / 2;
            keys += len;
            max_chain = max_chain.max(len);
        }
        MapStats {
            slots: self.slots.len(),
            keys,
            empty_slots: empty,
            empty_slot_bytes: empty * RECORD_BYTES,
            avg_probe_len: if keys == 0 { 0.0 } else { probes as f64 / keys as f64 },
            max_chain,
            size_bytes: (self.slots.len() + self.overflow.len()) * RECORD_BYTES + self.hash.size_bytes(),
        }
    }
}

/// Chained map that stores every record inside a slot array of exactly `n`
/// slots. Pass one places each key at its home slot if free; pass two links
/// the skipped keys into the slots left free.
#[derive(Debug, Clone)]
pub struct InPlaceChainedHashMap<H> {
    hash: H,
    slots: Vec<Record>,
}

impl<H: SlotHash> InPlaceChainedHashMap<H> {
    /// `hash` must have exactly `keys.len()` slots.
    pub fn build(hash: H, keys: &[u64], payloads: &[u64]) -> Result<Self> {
        check_input(keys, payloads)?;
        if hash.num_slots() != keys.len() {
            return Err(Error::InvalidArgument(format!(
                "in-place map needs one slot per key: {} slots for {} keys",
                hash.num_slots(),
                keys.len()
            )));
        }
        let mut slots = vec![EMPTY; keys.len()];
        let mut skipped = Vec::new();
        for (i, &k) in keys.iter().enumerate() {
            let s = hash.slot(k);
            if slots[s].occupied() {
                skipped.push((s, i));
            } else {
                slots[s] = Record::new(k, payloads[i]);
            }
        }
        // free slots left after pass one are nobody's home slot, so a chain
        // never runs through another key's home
        let mut free = (0..slots.len()).filter(|&s| !slots[s].occupied()).collect::<Vec<_>>().into_iter();
        let mut tails: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for (home, i) in skipped {
            let f = free.next().expect("one free slot per skipped key");
            slots[f] = Record::new(keys[i], payloads[i]);
            let tail = *tails.get(&home).unwrap_or(&home);
            slots[tail].next = f as u32;
            tails.insert(home, f);
        }
        Ok(Self { hash, slots })
    }

    pub fn hash(&self) -> &H {
        &self.hash
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, key: u64) -> Option<u64> {
        if self.slots.is_empty() {
            return None;
        }
        walk(&self.slots, self.hash.slot(key), |n| (n != NIL).then_some(n as usize), key)
    }

    pub fn stats(&self) -> MapStats {
        let mut probes = 0usize;
        let mut max_chain = 0usize;
        let mut home_slots = 0usize;
        for (s, r) in self.slots.iter().enumerate() {
            // a chain starts at a record that sits in its own home slot
            if !r.occupied() || self.hash.slot(r.key) != s {
                continue;
            }
            home_slots += 1;
            let mut len = 1;
            let mut n = r.next;
            while n != NIL {
                len += 1;
                n = self.slots[n as usize].next;
            }
            probes += len * (len + 1) / 2;
            max_chain = max_chain.max(len);
        }
        let keys = self.slots.len();
        MapStats {
            slots: keys,
            keys,
            empty_slots: 0,
            empty_slot_bytes: 0,
            avg_probe_len: if keys == 0 { 0.0 } else { probes as f64 / keys as f64 },
            max_chain: max_chain.max(usize::from(home_slots > 0)),
            size_bytes: keys * RECORD_BYTES + self.hash.size_bytes(),
        }
    }
}
