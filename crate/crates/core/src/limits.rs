/// Hard caps on enumeration work. Exceeding one aborts with
/// [`Error::ResourceCap`](crate::Error::ResourceCap).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Cap on the total number of stored vectors over all levels.
    pub max_level_vectors: usize,
    /// Cap on the number of matrix products formed at any single length.
    pub max_products: usize,
}

impl Limits {
    pub const DEFAULT_CAP: usize = 1_000_000;

    /// Same cap for both kinds of enumeration.
    pub fn uniform(cap: usize) -> Self {
        Limits {
            max_level_vectors: cap,
            max_products: cap,
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits::uniform(Self::DEFAULT_CAP)
    }
}
