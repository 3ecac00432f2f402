use std::collections::HashMap;
use std::ops::{Add, AddAssign};

use super::model::EmbeddingModel;

/// Fixed-point scale of the accumulator: 2^80.
const SCALE: f64 = 1_208_925_819_614_629_174_706_176.0;

fn to_fixed(x: f32) -> i128 {
    (x as f64 * SCALE) as i128
}

/// A composed element vector.
///
/// Components are accumulated as exact fixed-point integers, so summation
/// is associative: composing a concatenation gives exactly the sum of the
/// parts, whatever the grouping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeVector {
    acc: Vec<i128>,
}

impl CodeVector {
    pub fn zeros(dim: usize) -> Self {
        CodeVector { acc: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.acc.len()
    }

    pub fn add_f32(&mut self, v: &[f32]) {
        assert_eq!(v.len(), self.acc.len(), "dimension mismatch");
        for (a, x) in self.acc.iter_mut().zip(v) {
            *a += to_fixed(*x);
        }
    }

    fn add_fixed(&mut self, v: &[i128]) {
        for (a, x) in self.acc.iter_mut().zip(v) {
            *a += *x;
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.acc.iter().map(|a| *a as f64 / SCALE).collect()
    }

    /// Storage form used by embedding matrices.
    pub fn to_f32(&self) -> Vec<f32> {
        self.values().into_iter().map(|x| x as f32).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.acc.iter().all(|a| *a == 0)
    }
}

impl AddAssign<&CodeVector> for CodeVector {
    fn add_assign(&mut self, rhs: &CodeVector) {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        self.add_fixed(&rhs.acc);
    }
}

impl Add for CodeVector {
    type Output = CodeVector;

    fn add(mut self, rhs: CodeVector) -> CodeVector {
        self += &rhs;
        self
    }
}

/// Sum of the token vectors of `tokens`; the empty stream gives zero.
pub fn compose<S: AsRef<str>>(model: &EmbeddingModel, tokens: &[S]) -> CodeVector {
    Composer::new(model).compose(tokens)
}

/// Composes many streams against one model, memoizing token vectors.
pub struct Composer<'m> {
    model: &'m EmbeddingModel,
    cache: HashMap<String, Vec<i128>>,
}

impl<'m> Composer<'m> {
    pub fn new(model: &'m EmbeddingModel) -> Self {
        Composer { model, cache: HashMap::new() }
    }

    pub fn model(&self) -> &'m EmbeddingModel {
        self.model
    }

    pub fn compose<S: AsRef<str>>(&mut self, tokens: &[S]) -> CodeVector {
        let mut v = CodeVector::zeros(self.model.dim());
        for t in tokens {
            let t = t.as_ref();
            if !self.cache.contains_key(t) {
                let fixed = self.model.token_vector(t).into_iter().map(to_fixed).collect();
                self.cache.insert(t.to_string(), fixed);
            }
            v.add_fixed(&self.cache[t]);
        }
        v
    }
}
