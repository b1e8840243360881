/// Direct-mapped memo of `a_h(y)` for one fixed `h`, private to one
/// worker. A miss just recomputes, so results never depend on it.
pub(crate) struct LocalCache {
    keys: Vec<u64>,
    values: Vec<f64>,
    shift: u32,
}

// A NaN bit pattern: never the key of a valid state.
const EMPTY: u64 = u64::MAX;

impl LocalCache {
    pub(crate) fn with_bits(bits: u32) -> Self {
        let size = 1usize << bits;
        Self { keys: vec![EMPTY; size], values: vec![0.0; size], shift: 64 - bits }
    }

    pub(crate) fn small() -> Self {
        Self::with_bits(10)
    }

    pub(crate) fn large() -> Self {
        Self::with_bits(16)
    }

    #[inline]
    fn slot(&self, key: u64) -> usize {
        (key.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> self.shift) as usize
    }

    #[inline]
    pub(crate) fn get(&self, y: f64) -> Option<f64> {
        let key = y.to_bits();
        let i = self.slot(key);
        (self.keys[i] == key).then(|| self.values[i])
    }

    #[inline]
    pub(crate) fn insert(&mut self, y: f64, a: f64) {
        let key = y.to_bits();
        let i = self.slot(key);
        self.keys[i] = key;
        self.values[i] = a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stores_and_overwrites() {
        let mut c = LocalCache::with_bits(2);
        assert_eq!(c.get(0.5), None);
        c.insert(0.5, 1.0);
        assert_eq!(c.get(0.5), Some(1.0));
        for i in 0..100 {
            c.insert(i as f64, i as f64);
        }
        assert_eq!(c.get(99.0), Some(99.0));
    }
}
