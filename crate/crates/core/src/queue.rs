//! Addressable binary min-heap.
//!
//! `push` returns a stable [`Handle`] that can later be passed to `remove`.
//! Push, pop and remove are all `O(log m)`; freed handle slots are reused.

/// Stable reference to a queued entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Handle(u32);

#[derive(Debug, Clone)]
struct Slot<K> {
    key: K,
    // position in `heap`, or VACANT
    pos: usize,
}

const VACANT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct AddressableHeap<K> {
    slots: Vec<Slot<K>>,
    heap: Vec<u32>,
    free: Vec<u32>,
}

impl<K: PartialOrd + Clone> Default for AddressableHeap<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: PartialOrd + Clone> AddressableHeap<K> {
    pub fn new() -> Self {
        AddressableHeap {
            slots: Vec::new(),
            heap: Vec::new(),
            free: Vec::new(),
        }
    }

    pub fn with_capacity(capacity: usize) -> Self {
        AddressableHeap {
            slots: Vec::with_capacity(capacity),
            heap: Vec::with_capacity(capacity),
            free: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn push(&mut self, key: K) -> Handle {
        let pos = self.heap.len();
        let id = match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = Slot { key, pos };
                id
            }
            None => {
                self.slots.push(Slot { key, pos });
                (self.slots.len() - 1) as u32
            }
        };
        self.heap.push(id);
        self.sift_up(pos);
        Handle(id)
    }

    pub fn peek(&self) -> Option<(Handle, &K)> {
        self.heap.first().map(|&id| (Handle(id), &self.slots[id as usize].key))
    }

    pub fn pop(&mut self) -> Option<(Handle, K)> {
        let &id = self.heap.first()?;
        let key = self.remove(Handle(id))?;
        Some((Handle(id), key))
    }

    pub fn get(&self, handle: Handle) -> Option<&K> {
        self.slots
            .get(handle.0 as usize)
            .filter(|s| s.pos != VACANT)
            .map(|s| &s.key)
    }

    /// Removes the entry behind `handle`; `None` if it was already gone.
    pub fn remove(&mut self, handle: Handle) -> Option<K> {
        let pos = self.slots.get(handle.0 as usize)?.pos;
        if pos == VACANT {
            return None;
        }
        let last = self.heap.len() - 1;
        self.swap(pos, last);
        self.heap.pop();
        let slot = &mut self.slots[handle.0 as usize];
        slot.pos = VACANT;
        let key = slot.key.clone();
        self.free.push(handle.0);
        if pos < self.heap.len() {
            self.sift_down(pos);
            self.sift_up(pos);
        }
        Some(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Handle, &K)> {
        self.heap.iter().map(|&id| (Handle(id), &self.slots[id as usize].key))
    }

    #[inline]
    fn less(&self, a: usize, b: usize) -> bool {
        self.slots[self.heap[a] as usize].key < self.slots[self.heap[b] as usize].key
    }

    #[inline]
    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.slots[self.heap[a] as usize].pos = a;
        self.slots[self.heap[b] as usize].pos = b;
    }

    fn sift_up(&mut self, mut pos: usize) {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if !self.less(pos, parent) {
                break;
            }
            self.swap(pos, parent);
            pos = parent;
        }
    }

    fn sift_down(&mut self, mut pos: usize) {
        let n = self.heap.len();
        loop {
            let left = 2 * pos + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && self.less(right, left) {
                right
            } else {
                left
            };
            if !self.less(child, pos) {
                break;
            }
            self.swap(pos, child);
            pos = child;
        }
    }
}
