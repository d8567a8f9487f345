//! Shared helpers for the criterion microbenchmarks.

use lfol::{List, Variant};

/// Builds a list holding the even keys in `[0, 2*len)`, so probes for odd
/// keys miss and probes for even keys hit.
pub fn even_keys_list(variant: Variant, len: i64) -> List {
    let list = List::new(variant);
    {
        let mut ctx = list.context();
        for k in 0..len {
            ctx.add(2 * k).unwrap();
        }
    }
    list
}
