use std::fmt::Write;

/// Which queries succeed on which examples: bit `(q, e)` is set iff query
/// `q` has a solution on the example at position `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultSet {
    queries: usize,
    examples: usize,
    example_ids: Vec<u64>,
    words_per_row: usize,
    bits: Vec<u64>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BitmapError {
    #[error("bitmap is truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
}

impl ResultSet {
    /// An all-false matrix. `example_ids` names the columns.
    pub fn new(queries: usize, example_ids: Vec<u64>) -> ResultSet {
        let examples = example_ids.len();
        let words_per_row = examples.div_ceil(64);
        ResultSet {
            queries,
            examples,
            example_ids,
            words_per_row,
            bits: vec![0; queries * words_per_row],
        }
    }

    pub fn query_count(&self) -> usize {
        self.queries
    }

    pub fn example_count(&self) -> usize {
        self.examples
    }

    pub fn example_ids(&self) -> &[u64] {
        &self.example_ids
    }

    pub fn get(&self, query: usize, example: usize) -> bool {
        assert!(query < self.queries && example < self.examples);
        self.bits[query * self.words_per_row + example / 64] >> (example % 64) & 1 == 1
    }

    pub fn set(&mut self, query: usize, example: usize, value: bool) {
        assert!(query < self.queries && example < self.examples);
        let w = &mut self.bits[query * self.words_per_row + example / 64];
        let m = 1u64 << (example % 64);
        if value {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    /// Number of examples on which the query succeeds.
    pub fn count(&self, query: usize) -> usize {
        let row = &self.bits[query * self.words_per_row..(query + 1) * self.words_per_row];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row(&self, query: usize) -> Vec<bool> {
        (0..self.examples).map(|e| self.get(query, e)).collect()
    }

    /// Examples (by position) on which the query succeeds.
    pub fn covered(&self, query: usize) -> Vec<usize> {
        (0..self.examples).filter(|&e| self.get(query, e)).collect()
    }

    /// `query_id,example_id` for every set bit, query-major, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("query_id,example_id\n");
        for q in 0..self.queries {
            for e in self.covered(q) {
                let _ = writeln!(out, "{},{}", q, self.example_ids[e]);
            }
        }
        out
    }

    /// Query count and example count as little-endian u64, then all bits in
    /// query-major order, packed least significant bit first.
    pub fn to_bitmap(&self) -> Vec<u8> {
        let total = self.queries * self.examples;
        let mut out = Vec::with_capacity(16 + total.div_ceil(8));
        out.extend_from_slice(&(self.queries as u64).to_le_bytes());
        out.extend_from_slice(&(self.examples as u64).to_le_bytes());
        let mut body = vec![0u8; total.div_ceil(8)];
        for q in 0..self.queries {
            for e in 0..self.examples {
                if self.get(q, e) {
                    let k = q * self.examples + e;
                    body[k / 8] |= 1 << (k % 8);
                }
            }
        }
        out.extend_from_slice(&body);
        out
    }

    /// Inverse of [`ResultSet::to_bitmap`]. Example ids are positions.
    pub fn from_bitmap(bytes: &[u8]) -> Result<ResultSet, BitmapError> {
        let word = |i: usize| -> Result<usize, BitmapError> {
            let b = bytes.get(i * 8..i * 8 + 8).ok_or(BitmapError::Truncated {
                need: 16,
                have: bytes.len(),
            })?;
            Ok(u64::from_le_bytes(b.try_into().unwrap()) as usize)
        };
        let (queries, examples) = (word(0)?, word(1)?);
        let total = queries * examples;
        let need = 16 + total.div_ceil(8);
        if bytes.len() < need {
            return Err(BitmapError::Truncated {
                need,
                have: bytes.len(),
            });
        }
        let mut rs = ResultSet::new(queries, (0..examples as u64).collect());
        for k in 0..total {
            if bytes[16 + k / 8] >> (k % 8) & 1 == 1 {
                rs.set(k / examples, k % examples, true);
            }
        }
        Ok(rs)
    }
}
