//! The lock-free ordered-set list and its per-thread operation context.
//!
//! A list holds head/tail sentinel nodes carrying the reserved extreme keys,
//! so every search terminates on the key comparison alone and no end-of-list
//! cases exist. An item is in the set iff its node is reachable from head and
//! its next link is unmarked. Marking is the logical delete; any traversal
//! that encounters a marked node helps by unlinking it.
//!
//! Nodes are never reclaimed while the list is alive: every node ever
//! published is registered and freed only when the list is dropped, after all
//! contexts (which borrow the list) are gone. This makes traversal from stale
//! cursors and backward pointers always memory-safe and removes ABA concerns.

use std::fmt;
use std::ptr;
use std::sync::atomic::Ordering;
use std::sync::Mutex;

use crate::counters::Counters;
use crate::link::{node_ref, LinkWord, Node, KEY_MAX, KEY_MIN};
use crate::rng::Rng;
use crate::variant::Variant;

/// Error for keys outside the open interval (`KEY_MIN`, `KEY_MAX`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyOutOfRange(pub i64);

impl fmt::Display for KeyOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "key {} is reserved for sentinels", self.0)
    }
}

impl std::error::Error for KeyOutOfRange {}

#[inline]
fn check_key(key: i64) -> Result<(), KeyOutOfRange> {
    if key == KEY_MIN || key == KEY_MAX {
        Err(KeyOutOfRange(key))
    } else {
        Ok(())
    }
}

#[inline]
fn ptr_of(node: &Node) -> *mut Node {
    node as *const Node as *mut Node
}

/// Shared list state: variant tag, sentinels, and the registry of every node
/// ever published (freed on drop).
pub struct List {
    variant: Variant,
    head: *mut Node,
    tail: *mut Node,
    allocated: Mutex<Vec<*mut Node>>,
}

// All post-construction mutation goes through atomics; nodes outlive every
// borrow of the list.
unsafe impl Send for List {}
unsafe impl Sync for List {}

impl List {
    pub fn new(variant: Variant) -> List {
        let tail = Node::alloc_sentinel(KEY_MAX);
        let head = Node::alloc(KEY_MIN, LinkWord::new(tail, false), ptr::null_mut());
        unsafe {
            // head's self-loop terminates every backward walk: head is never
            // marked and KEY_MIN is below any search key.
            (*head).prev.store(head, Ordering::Relaxed);
            (*tail).prev.store(head, Ordering::Relaxed);
        }
        List {
            variant,
            head,
            tail,
            allocated: Mutex::new(Vec::new()),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Creates a per-thread operation context with an unseeded (seed 0) PRNG.
    pub fn context(&self) -> ThreadContext<'_> {
        self.context_seeded(0)
    }

    pub fn context_seeded(&self, seed: u64) -> ThreadContext<'_> {
        ThreadContext {
            list: self,
            cursor_pred: self.head,
            cursor_curr: self.head,
            counters: Counters::default(),
            rng: Rng::seeded(seed),
            allocs: Vec::new(),
        }
    }

    /// Ordered keys of the unmarked chain, sentinels excluded. Quiescent use
    /// only: concurrent mutation makes the result a best-effort sample.
    pub fn snapshot(&self) -> Vec<i64> {
        let mut keys = Vec::new();
        unsafe {
            let mut p = (*self.head).next.load().pointer();
            while p != self.tail {
                let n = &*p;
                let w = n.next.load();
                if !w.is_marked() {
                    keys.push(n.key);
                }
                p = w.pointer();
            }
        }
        keys
    }

    pub(crate) fn head_node(&self) -> &Node {
        unsafe { node_ref(self.head) }
    }

    pub(crate) fn tail_node(&self) -> &Node {
        unsafe { node_ref(self.tail) }
    }

    /// Snapshot of the registry of every node ever published.
    pub(crate) fn allocated_nodes(&self) -> Vec<*mut Node> {
        self.allocated.lock().unwrap().clone()
    }

    // Registration also runs from context drops during panic unwinding, so it
    // must tolerate a poisoned lock rather than double-panic.
    pub(crate) fn register(&self, nodes: &mut Vec<*mut Node>) {
        if !nodes.is_empty() {
            let mut registry = match self.allocated.lock() {
                Ok(guard) => guard,
                Err(poisoned) => poisoned.into_inner(),
            };
            registry.append(nodes);
        }
    }
}

impl Drop for List {
    fn drop(&mut self) {
        // Having `&mut self` proves all contexts are gone and their
        // allocations flushed into the registry.
        let nodes = match self.allocated.lock() {
            Ok(mut guard) => std::mem::take(&mut *guard),
            Err(poisoned) => std::mem::take(&mut *poisoned.into_inner()),
        };
        unsafe {
            for p in nodes {
                drop(Box::from_raw(p));
            }
            drop(Box::from_raw(self.head));
            drop(Box::from_raw(self.tail));
        }
    }
}

impl fmt::Debug for List {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("List").field("variant", &self.variant).finish()
    }
}

/// Per-thread state: the cursor remembered from the previous operation, event
/// counters, a PRNG for workload generation, and the thread's pending node
/// registrations. Owned by exactly one thread; aligned to keep neighboring
/// contexts off each other's cache lines.
#[repr(align(128))]
pub struct ThreadContext<'l> {
    list: &'l List,
    cursor_pred: *mut Node,
    cursor_curr: *mut Node,
    counters: Counters,
    rng: Rng,
    allocs: Vec<*mut Node>,
}

// The raw pointers reference the list's node population, which this context
// borrows; the context itself is exclusively owned.
unsafe impl Send for ThreadContext<'_> {}

impl<'l> ThreadContext<'l> {
    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Flushes pending registrations and returns the final counters.
    pub fn finish(mut self) -> Counters {
        self.flush();
        self.counters
    }

    pub(crate) fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }

    #[cfg(test)]
    pub(crate) fn cursor(&self) -> (*mut Node, *mut Node) {
        (self.cursor_pred, self.cursor_curr)
    }

    fn flush(&mut self) {
        self.list.register(&mut self.allocs);
    }

    fn head(&self) -> &'l Node {
        unsafe { node_ref(self.list.head) }
    }

    /// Inserts `key`. Returns `Ok(true)` iff this call linked a new node in.
    pub fn add(&mut self, key: i64) -> Result<bool, KeyOutOfRange> {
        check_key(key)?;
        let is_doubly = self.list.variant.is_doubly();
        let (mut pred, mut curr) = self.search(key);
        let mut node: *mut Node = ptr::null_mut();
        loop {
            if curr.key == key {
                if !node.is_null() {
                    // Never published, still exclusively ours.
                    unsafe { drop(Box::from_raw(node)) };
                }
                return Ok(false);
            }
            let pred_ptr = ptr_of(pred);
            let curr_ptr = ptr_of(curr);
            if node.is_null() {
                let prev = if is_doubly { pred_ptr } else { ptr::null_mut() };
                node = Node::alloc(key, LinkWord::new(curr_ptr, false), prev);
            } else {
                let n = unsafe { node_ref(node) };
                n.next.store_unpublished(LinkWord::new(curr_ptr, false));
                if is_doubly {
                    n.prev.store(pred_ptr, Ordering::Relaxed);
                }
            }
            match pred
                .next
                .compare_exchange(LinkWord::new(curr_ptr, false), LinkWord::new(node, false))
            {
                Ok(()) => {
                    if is_doubly {
                        curr.prev.store(node, Ordering::Release);
                    }
                    self.allocs.push(node);
                    self.counters.adds += 1;
                    return Ok(true);
                }
                Err(_) => {
                    self.counters.fail += 1;
                    let found = self.search_resume(key, pred);
                    pred = found.0;
                    curr = found.1;
                }
            }
        }
    }

    /// Removes `key`. Returns `Ok(true)` iff this call's marking step set the
    /// delete mark; the subsequent unlink attempt's failure is ignored.
    pub fn remove(&mut self, key: i64) -> Result<bool, KeyOutOfRange> {
        check_key(key)?;
        let variant = self.list.variant;
        loop {
            let (pred, node) = self.search(key);
            if node.key != key {
                return Ok(false);
            }
            let node_ptr = ptr_of(node);
            let succ_ptr = match variant {
                Variant::Draconic => {
                    // Textbook: build the expected unmarked word; a failure for
                    // any reason reruns the whole operation.
                    let succ = node.next.load().pointer();
                    let clean = LinkWord::new(succ, false);
                    if node.next.compare_exchange(clean, clean.marked()).is_err() {
                        self.counters.fail += 1;
                        continue;
                    }
                    succ
                }
                Variant::SinglyFetchOr => {
                    let prior = node.next.fetch_or_mark();
                    if prior.is_marked() {
                        // Counted like a failed marking CAS so the fail column
                        // stays comparable across variants.
                        self.counters.fail += 1;
                        return Ok(false);
                    }
                    prior.pointer()
                }
                _ => {
                    let mut w = node.next.load();
                    loop {
                        if w.is_marked() {
                            return Ok(false);
                        }
                        match node.next.compare_exchange(w, w.marked()) {
                            Ok(()) => break,
                            Err(observed) => {
                                self.counters.fail += 1;
                                w = observed;
                            }
                        }
                    }
                    w.pointer()
                }
            };
            // One unlink attempt. If it fails some other traversal is already
            // helping; the node is marked and will go eventually.
            if pred
                .next
                .compare_exchange(LinkWord::new(node_ptr, false), LinkWord::new(succ_ptr, false))
                .is_err()
            {
                self.counters.fail += 1;
            }
            self.counters.rems += 1;
            return Ok(true);
        }
    }

    /// Wait-free membership test: no CAS, no unlinking, step count bounded by
    /// the node population.
    pub fn contains(&mut self, key: i64) -> Result<bool, KeyOutOfRange> {
        check_key(key)?;
        let start: &'l Node = match self.list.variant {
            Variant::Draconic | Variant::Singly | Variant::Doubly => self.head(),
            Variant::SinglyCursor | Variant::SinglyFetchOr => {
                let c = unsafe { node_ref::<'l>(self.cursor_pred) };
                // The cursor node itself may be the answer, hence <=.
                if c.key <= key && !c.next.load().is_marked() {
                    c
                } else {
                    self.head()
                }
            }
            Variant::DoublyCursor => {
                let mut c = unsafe { node_ref::<'l>(self.cursor_pred) };
                if c.key > key || c.next.load().is_marked() {
                    loop {
                        if !c.next.load().is_marked() && c.key < key {
                            break;
                        }
                        c = unsafe { node_ref(c.prev.load(Ordering::Acquire)) };
                        self.counters.cons += 1;
                    }
                }
                c
            }
        };
        let mut pred = start;
        let mut curr = start;
        while curr.key < key {
            pred = curr;
            curr = unsafe { node_ref(curr.next.load().pointer()) };
            self.counters.cons += 1;
        }
        self.cursor_pred = ptr_of(pred);
        self.cursor_curr = ptr_of(curr);
        Ok(curr.key == key && !curr.next.load().is_marked())
    }

    /// Variant-dispatched position search. Returns `(pred, curr)` with
    /// `pred.key < key <= curr.key`; every marked node met on the way has been
    /// unlinked (or left for the thread that beat us to it). Sets the cursor.
    pub(crate) fn search(&mut self, key: i64) -> (&'l Node, &'l Node) {
        let found = match self.list.variant {
            Variant::Draconic => self.search_draconic(key),
            Variant::Singly | Variant::SinglyCursor | Variant::SinglyFetchOr => {
                let start = self.singly_start(key);
                self.search_singly_from(key, start)
            }
            Variant::Doubly => self.search_doubly_from(key, self.list.head),
            Variant::DoublyCursor => self.search_doubly_from(key, self.cursor_pred),
        };
        self.cursor_pred = ptr_of(found.0);
        self.cursor_curr = ptr_of(found.1);
        found
    }

    /// Re-entry after a failed insert CAS on `pred`: continue forward from
    /// `pred` where the variant allows it instead of starting over.
    fn search_resume(&mut self, key: i64, pred: &'l Node) -> (&'l Node, &'l Node) {
        let found = match self.list.variant {
            Variant::Draconic => self.search_draconic(key),
            Variant::Singly | Variant::SinglyCursor | Variant::SinglyFetchOr => {
                if pred.next.load().is_marked() {
                    let start = self.singly_start(key);
                    self.search_singly_from(key, start)
                } else {
                    // Only the pointer changed; rereading it is enough.
                    self.search_singly_from(key, pred)
                }
            }
            // The backward walk normalizes a marked or oversized pred anyway.
            Variant::Doubly | Variant::DoublyCursor => self.search_doubly_from(key, ptr_of(pred)),
        };
        self.cursor_pred = ptr_of(found.0);
        self.cursor_curr = ptr_of(found.1);
        found
    }

    /// Start position for the singly linked variants: the cursor if this
    /// variant reads it and the cursor is a live strict predecessor, else head.
    fn singly_start(&mut self, key: i64) -> &'l Node {
        if self.list.variant.uses_cursor() {
            let c = unsafe { node_ref::<'l>(self.cursor_pred) };
            if !c.next.load().is_marked() && c.key < key {
                return c;
            }
        }
        self.head()
    }

    /// Textbook search: any failed unlink CAS restarts from head.
    fn search_draconic(&mut self, key: i64) -> (&'l Node, &'l Node) {
        'retry: loop {
            let mut pred = self.head();
            let mut curr = unsafe { node_ref::<'l>(pred.next.load().pointer()) };
            self.counters.trav += 1;
            loop {
                let mut succ_w = curr.next.load();
                while succ_w.is_marked() {
                    let succ = succ_w.pointer();
                    if pred
                        .next
                        .compare_exchange(
                            LinkWord::new(ptr_of(curr), false),
                            LinkWord::new(succ, false),
                        )
                        .is_err()
                    {
                        self.counters.fail += 1;
                        self.counters.rtry += 1;
                        continue 'retry;
                    }
                    curr = unsafe { node_ref(succ) };
                    self.counters.trav += 1;
                    succ_w = curr.next.load();
                }
                if key <= curr.key {
                    return (pred, curr);
                }
                pred = curr;
                curr = unsafe { node_ref(succ_w.pointer()) };
                self.counters.trav += 1;
            }
        }
    }

    /// Improved forward search for the singly linked variants. On a failed
    /// unlink CAS the predecessor's next is reread: only a marked predecessor
    /// forces a restart from the variant's start position.
    fn search_singly_from(&mut self, key: i64, start: &'l Node) -> (&'l Node, &'l Node) {
        let mut pred = start;
        'retry: loop {
            let mut curr = unsafe { node_ref::<'l>(pred.next.load().pointer()) };
            self.counters.trav += 1;
            loop {
                let mut succ_w = curr.next.load();
                while succ_w.is_marked() {
                    let succ = succ_w.pointer();
                    match pred.next.compare_exchange(
                        LinkWord::new(ptr_of(curr), false),
                        LinkWord::new(succ, false),
                    ) {
                        Ok(()) => {
                            curr = unsafe { node_ref(succ) };
                        }
                        Err(_) => {
                            self.counters.fail += 1;
                            let next_w = pred.next.load();
                            if next_w.is_marked() {
                                self.counters.rtry += 1;
                                pred = self.singly_start(key);
                                continue 'retry;
                            }
                            curr = unsafe { node_ref(next_w.pointer()) };
                        }
                    }
                    self.counters.trav += 1;
                    succ_w = curr.next.load();
                }
                if key <= curr.key {
                    return (pred, curr);
                }
                pred = curr;
                curr = unsafe { node_ref(succ_w.pointer()) };
                self.counters.trav += 1;
            }
        }
    }

    /// Search for the doubly linked variants. A retry walks backward through
    /// prev references to the nearest unmarked strict predecessor instead of
    /// returning to head; forward traversal repairs stale backward pointers.
    fn search_doubly_from(&mut self, key: i64, start: *mut Node) -> (&'l Node, &'l Node) {
        let mut pred = unsafe { node_ref::<'l>(start) };
        'retry: loop {
            // Backward normalization. The first pass is not a retry; head's
            // self-loop guarantees termination.
            loop {
                let w = pred.next.load();
                if !w.is_marked() && key > pred.key {
                    break;
                }
                pred = unsafe { node_ref(pred.prev.load(Ordering::Acquire)) };
                self.counters.trav += 1;
            }
            let mut curr = unsafe { node_ref::<'l>(pred.next.load().pointer()) };
            self.counters.trav += 1;
            loop {
                let mut succ_w = curr.next.load();
                while succ_w.is_marked() {
                    let succ = succ_w.pointer();
                    match pred.next.compare_exchange(
                        LinkWord::new(ptr_of(curr), false),
                        LinkWord::new(succ, false),
                    ) {
                        Ok(()) => {
                            // The successor's backward pointer skips the node
                            // we just linked out.
                            let s = unsafe { node_ref::<'l>(succ) };
                            s.prev.store(ptr_of(pred), Ordering::Release);
                            curr = s;
                        }
                        Err(_) => {
                            self.counters.fail += 1;
                            let next_w = pred.next.load();
                            if next_w.is_marked() {
                                self.counters.rtry += 1;
                                continue 'retry;
                            }
                            curr = unsafe { node_ref(next_w.pointer()) };
                        }
                    }
                    self.counters.trav += 1;
                    succ_w = curr.next.load();
                }
                // Atomic stores are expensive under coherence traffic, so
                // repair only when a relaxed pre-check shows a stale pointer.
                if curr.prev.load(Ordering::Relaxed) != ptr_of(pred) {
                    curr.prev.store(ptr_of(pred), Ordering::Release);
                }
                if key <= curr.key {
                    return (pred, curr);
                }
                pred = curr;
                curr = unsafe { node_ref(succ_w.pointer()) };
                self.counters.trav += 1;
            }
        }
    }
}

impl Drop for ThreadContext<'_> {
    fn drop(&mut self) {
        self.flush();
    }
}

impl fmt::Debug for ThreadContext<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThreadContext")
            .field("variant", &self.list.variant)
            .field("counters", &self.counters)
            .finish()
    }
}
