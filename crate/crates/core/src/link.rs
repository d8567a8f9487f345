//! Marked link words and list nodes.
//!
//! A node's `next` field packs the successor pointer and a 1-bit delete mark
//! into one machine word, stealing the pointer's always-zero low alignment
//! bit. Pointer and mark are therefore read and written together, and a single
//! compare-and-swap validates both at once. Once the mark is set it is never
//! cleared; a marked node is logically deleted and will be unlinked by some
//! later traversal.

use std::ptr;
use std::sync::atomic::{AtomicPtr, AtomicUsize, Ordering};

/// Keys are signed machine words. The two extreme values are reserved for the
/// head and tail sentinels; user-facing operations accept only keys strictly
/// between them.
pub const KEY_MIN: i64 = i64::MIN;
pub const KEY_MAX: i64 = i64::MAX;

const MARK_BIT: usize = 1;

/// One word holding a node pointer and the delete mark in its low bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LinkWord(usize);

impl LinkWord {
    /// Packs `succ` and `mark` into a word. `succ` must be aligned so its low
    /// bit is free; passing a misaligned pointer is a defect in the caller.
    #[inline]
    pub(crate) fn new(succ: *mut Node, mark: bool) -> Self {
        debug_assert_eq!(succ as usize & MARK_BIT, 0, "unaligned node pointer");
        LinkWord(succ as usize | mark as usize)
    }

    #[inline]
    pub(crate) fn pointer(self) -> *mut Node {
        (self.0 & !MARK_BIT) as *mut Node
    }

    #[inline]
    pub(crate) fn is_marked(self) -> bool {
        self.0 & MARK_BIT != 0
    }

    /// The same link with the mark bit set.
    #[inline]
    pub(crate) fn marked(self) -> Self {
        LinkWord(self.0 | MARK_BIT)
    }
}

/// Atomic cell holding a `LinkWord`.
///
/// Loads and compare-exchanges use acquire/release orderings: an acquire load
/// of a link published by a release CAS sees the pointed-to node fully
/// initialized.
#[derive(Debug)]
pub(crate) struct AtomicLink(AtomicUsize);

impl AtomicLink {
    pub(crate) fn new(word: LinkWord) -> Self {
        AtomicLink(AtomicUsize::new(word.0))
    }

    #[inline]
    pub(crate) fn load(&self) -> LinkWord {
        LinkWord(self.0.load(Ordering::Acquire))
    }

    /// Unsynchronized store; only valid while the owning node is unpublished.
    #[inline]
    pub(crate) fn store_unpublished(&self, word: LinkWord) {
        self.0.store(word.0, Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn compare_exchange(
        &self,
        expected: LinkWord,
        new: LinkWord,
    ) -> Result<(), LinkWord> {
        match self
            .0
            .compare_exchange(expected.0, new.0, Ordering::AcqRel, Ordering::Acquire)
        {
            Ok(_) => Ok(()),
            Err(observed) => Err(LinkWord(observed)),
        }
    }

    /// Atomically sets the mark bit, returning the prior word.
    #[inline]
    pub(crate) fn fetch_or_mark(&self) -> LinkWord {
        LinkWord(self.0.fetch_or(MARK_BIT, Ordering::AcqRel))
    }
}

/// A list item. The key never changes after construction; `next` is the marked
/// link; `prev` is the approximate backward pointer maintained only by the
/// doubly linked variants.
#[derive(Debug)]
pub(crate) struct Node {
    pub(crate) key: i64,
    pub(crate) next: AtomicLink,
    pub(crate) prev: AtomicPtr<Node>,
}

impl Node {
    /// Heap-allocates a node. The caller owns the returned pointer until the
    /// node is published into a list.
    pub(crate) fn alloc(key: i64, next: LinkWord, prev: *mut Node) -> *mut Node {
        Box::into_raw(Box::new(Node {
            key,
            next: AtomicLink::new(next),
            prev: AtomicPtr::new(prev),
        }))
    }

    pub(crate) fn alloc_sentinel(key: i64) -> *mut Node {
        Node::alloc(key, LinkWord::new(ptr::null_mut(), false), ptr::null_mut())
    }
}

/// Dereferences a node pointer obtained from this list's link or prev fields.
///
/// Safety: `p` must be non-null and originate from the owning list's node
/// population. Nodes are never freed while the list is alive, so the reference
/// stays valid for any caller-chosen lifetime bounded by the list borrow.
#[inline]
pub(crate) unsafe fn node_ref<'a>(p: *mut Node) -> &'a Node {
    debug_assert!(!p.is_null());
    &*p
}
