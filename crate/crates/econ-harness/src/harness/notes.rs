//! Per-period notes that persist across an episode.

/// Append-only notes store, one slot per period.
#[derive(Debug, Default, Clone)]
pub struct NotesStore {
    entries: Vec<Vec<String>>,
}

impl NotesStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a notes entry for `period`. Multiple writes in one period are
    /// kept in order.
    pub fn write(&mut self, period: usize, text: &str) {
        if self.entries.len() <= period {
            self.entries.resize(period + 1, Vec::new());
        }
        self.entries[period].push(text.to_string());
    }

    /// Read the notes for `period`, which must not lie in the future.
    ///
    /// Returns `Ok(None)` when the period has been reached but holds no notes.
    pub fn read(&self, period: usize, current_period: usize) -> Result<Option<String>, String> {
        if period > current_period {
            return Err(format!(
                "attempt {period} not yet reached (current attempt is {current_period})"
            ));
        }
        let joined = self
            .entries
            .get(period)
            .filter(|notes| !notes.is_empty())
            .map(|notes| notes.join("\n"));
        Ok(joined)
    }

    /// All notes written during `period`, joined, if any.
    pub fn for_period(&self, period: usize) -> Option<String> {
        self.entries
            .get(period)
            .filter(|notes| !notes.is_empty())
            .map(|notes| notes.join("\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut store = NotesStore::new();
        store.write(0, "plan A");
        assert_eq!(store.read(0, 0).unwrap(), Some("plan A".to_string()));
    }

    #[test]
    fn empty_period_reads_as_none() {
        let store = NotesStore::new();
        assert_eq!(store.read(0, 3).unwrap(), None);
    }

    #[test]
    fn future_period_is_an_error() {
        let store = NotesStore::new();
        assert!(store.read(4, 3).is_err());
    }

    #[test]
    fn writes_concatenate_in_order() {
        // Oracle: a naive append list joined the same way.
        let mut store = NotesStore::new();
        let mut oracle: Vec<&str> = Vec::new();
        for text in ["first", "second", "third"] {
            store.write(2, text);
            oracle.push(text);
        }
        assert_eq!(store.read(2, 2).unwrap(), Some(oracle.join("\n")));
    }
}
