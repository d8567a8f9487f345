//! The six list implementation variants.

use std::fmt;
use std::str::FromStr;

/// Which search/retry strategy a list uses.
///
/// All variants implement the same ordered-set semantics; they differ in how a
/// search recovers from failed CAS operations and where it starts:
///
/// * `Draconic` - textbook: any failed unlink CAS restarts the search from the
///   head sentinel.
/// * `Singly` - restart from head only when the predecessor itself became
///   marked; otherwise reread its next pointer and continue.
/// * `Doubly` - like `Singly`, plus approximate backward pointers: a retry
///   walks backwards to the nearest unmarked smaller-key node instead of
///   returning to head.
/// * `SinglyCursor` - `Singly`, starting searches at a per-thread cursor (the
///   predecessor remembered from the previous operation) when valid.
/// * `SinglyFetchOr` - `SinglyCursor` with the delete mark set by an atomic
///   fetch-or instead of a CAS loop.
/// * `DoublyCursor` - `Doubly` with the per-thread cursor as the start
///   position, normalized by the backward walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Draconic,
    Singly,
    Doubly,
    SinglyCursor,
    SinglyFetchOr,
    DoublyCursor,
}

impl Variant {
    /// All variants in their conventional a)-f) order.
    pub const ALL: [Variant; 6] = [
        Variant::Draconic,
        Variant::Singly,
        Variant::Doubly,
        Variant::SinglyCursor,
        Variant::SinglyFetchOr,
        Variant::DoublyCursor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Draconic => "draconic",
            Variant::Singly => "singly",
            Variant::Doubly => "doubly",
            Variant::SinglyCursor => "singly-cursor",
            Variant::SinglyFetchOr => "singly-fetch-or",
            Variant::DoublyCursor => "doubly-cursor",
        }
    }

    /// Conventional single-letter tag, `a`..`f`.
    pub fn letter(self) -> char {
        match self {
            Variant::Draconic => 'a',
            Variant::Singly => 'b',
            Variant::Doubly => 'c',
            Variant::SinglyCursor => 'd',
            Variant::SinglyFetchOr => 'e',
            Variant::DoublyCursor => 'f',
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Variant::Draconic => "textbook: any failed CAS restarts the search from head",
            Variant::Singly => "restart only when the predecessor became marked",
            Variant::Doubly => "approximate backward pointers; retry walks backwards",
            Variant::SinglyCursor => "per-thread cursor as the search start position",
            Variant::SinglyFetchOr => "cursor plus fetch-or marking in remove",
            Variant::DoublyCursor => "backward pointers plus per-thread cursor",
        }
    }

    /// True for the variants that maintain backward pointers.
    pub fn is_doubly(self) -> bool {
        matches!(self, Variant::Doubly | Variant::DoublyCursor)
    }

    /// True for the variants that read the per-thread cursor at search start.
    pub fn uses_cursor(self) -> bool {
        matches!(
            self,
            Variant::SinglyCursor | Variant::SinglyFetchOr | Variant::DoublyCursor
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error returned when a variant name does not parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownVariant(pub String);

impl fmt::Display for UnknownVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown variant `{}`", self.0)
    }
}

impl std::error::Error for UnknownVariant {}

impl FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" | "draconic" => Ok(Variant::Draconic),
            "b" | "singly" => Ok(Variant::Singly),
            "c" | "doubly" => Ok(Variant::Doubly),
            "d" | "singly-cursor" => Ok(Variant::SinglyCursor),
            "e" | "singly-fetch-or" => Ok(Variant::SinglyFetchOr),
            "f" | "doubly-cursor" => Ok(Variant::DoublyCursor),
            other => Err(UnknownVariant(other.to_string())),
        }
    }
}

/// Whether this target lowers `fetch_or` on a machine word to a single native
/// read-modify-write instruction. Where it does not (x86 in particular), the
/// compiler emits a compare-exchange loop and the `singly-fetch-or` variant
/// runs on that emulation.
pub const fn fetch_or_is_native() -> bool {
    cfg!(any(target_arch = "aarch64", target_arch = "riscv64"))
}
