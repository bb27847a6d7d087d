/// Limits on the exhaustive searches performed by the library.
///
/// Exceeding a limit aborts the operation with [`crate::Error::Resource`];
/// nothing is ever silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Candidate subsets examined by a single enumeration.
    pub max_subsets: usize,
    /// Default size bound for explicit configuration listings.
    pub max_config_size: usize,
    /// Largest carrier handled by isomorphism search and poset canonicalisation.
    pub max_iso_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_subsets: 1 << 20,
            max_config_size: 8,
            max_iso_nodes: 12,
        }
    }
}

/// Step counter charged against [`Budget::max_subsets`].
pub(crate) struct Meter {
    used: usize,
    limit: usize,
    what: &'static str,
}

impl Meter {
    pub(crate) fn new(budget: &Budget, what: &'static str) -> Self {
        Meter {
            used: 0,
            limit: budget.max_subsets,
            what,
        }
    }

    pub(crate) fn tick(&mut self) -> crate::Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(crate::Error::Resource(format!(
                "{} examined more than {} candidates",
                self.what, self.limit
            )));
        }
        Ok(())
    }
}
